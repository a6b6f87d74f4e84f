//! Slow reference computations, independent of the library code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ(x) = ½ + φ(x)·Σ_{k≥0} x^{2k+1} / (1·3·…·(2k+1)).
///
/// Every term has the sign of x, so the sum has no internal cancellation and
/// the absolute error stays near one ulp of ½ on [-8, 8].
pub fn phi_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= x2 / f64::from(2 * k + 1);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() || k > 10_000 {
            break;
        }
    }
    0.5 + density(x) * sum
}

/// Lower tail Φ(-t), t > 0, by Laplace's continued fraction
/// φ(t) / (t + 1/(t + 2/(t + 3/(t + …)))), evaluated bottom-up.
pub fn lower_tail_cf(t: f64) -> f64 {
    assert!(t > 0.0);
    let mut v = t;
    for k in (1..=400).rev() {
        v = t + f64::from(k) / v;
    }
    density(t) / v
}

/// G(x) from the series, switching to the continued fraction beyond 8.
pub fn g_series(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if x > 8.0 {
        1.0 - 2.0 * lower_tail_cf(x)
    } else {
        2.0 * phi_series(x) - 1.0
    }
}

/// ∫ G(x/σ) dσ · mass/(hi − lo) by the midpoint rule on `points` cells.
pub fn mixture_midpoint(x: f64, mass: f64, lo: f64, hi: f64, points: usize) -> f64 {
    let h = (hi - lo) / points as f64;
    let sum: f64 = (0..points)
        .map(|i| g_series(x / (lo + (i as f64 + 0.5) * h)))
        .sum();
    mass * sum / points as f64
}

/// Exact law of max(S_1, …, S_n) when each step takes one of `values` with
/// equal probability, by enumerating every path.
pub fn max_law_by_enumeration(values: &[f64], n: u32) -> BTreeMap<i64, f64> {
    let paths = values.len().pow(n);
    let p = 1.0 / paths as f64;
    let mut law = BTreeMap::new();
    for mut code in 0..paths {
        let (mut s, mut best) = (0.0, f64::NEG_INFINITY);
        for _ in 0..n {
            s += values[code % values.len()];
            code /= values.len();
            best = f64::max(best, s);
        }
        *law.entry(best.round() as i64).or_insert(0.0) += p;
    }
    law
}
