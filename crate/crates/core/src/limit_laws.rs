//! Closed-form limits of `P(max(S_1, …, S_n) < x√n)`.
//!
//! * [`erdos_kac_g`]: the i.i.d. zero-mean, unit-variance limit
//!   `G(x) = (2Φ(x) − 1)·1[x ≥ 0]`.
//! * [`mixture_g_mu`]: `G` mixed over the law of the conditional standard
//!   deviation, restricted to positive variance.
//! * [`weak_limit`]: the zero-drift limit, which adds a step at the origin
//!   for the degenerate (zero-variance) part of the directing measure.
//! * [`general_limit`]: no drift assumption; negative drift contributes a
//!   constant, positive drift contributes nothing. Its value at +∞ is
//!   `1 − p_pos`, so it is a distribution function only when `p_pos = 0`.
//!
//! All limits use the strict `<` convention; the indicator `1[x ≥ 0]` is 1 at
//! the origin.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{ensure_finite, Error};
use crate::normal::phi;
use crate::quadrature;

/// Slack on probability masses that come from summing exact weights.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Absolute tolerance of the quadrature behind continuous sigma laws.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SigmaAtom {
    pub weight: f64,
    pub sigma: f64,
}

/// Sub-probability law of the conditional standard deviation σ_F.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum SigmaLaw {
    Discrete { atoms: Vec<SigmaAtom> },
    /// σ uniform on `[lo, hi]`, carrying total mass `mass`.
    UniformInterval { mass: f64, lo: f64, hi: f64 },
}

impl SigmaLaw {
    pub fn empty() -> Self {
        SigmaLaw::Discrete { atoms: Vec::new() }
    }

    pub fn point(sigma: f64) -> Result<Self, Error> {
        Self::discrete([(1.0, sigma)])
    }

    pub fn discrete<I>(atoms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let law = SigmaLaw::Discrete {
            atoms: atoms
                .into_iter()
                .map(|(weight, sigma)| SigmaAtom { weight, sigma })
                .collect(),
        };
        law.validate()?;
        Ok(law)
    }

    pub fn uniform(mass: f64, lo: f64, hi: f64) -> Result<Self, Error> {
        let law = SigmaLaw::UniformInterval { mass, lo, hi };
        law.validate()?;
        Ok(law)
    }

    pub fn mass(&self) -> f64 {
        match self {
            SigmaLaw::Discrete { atoms } => atoms.iter().map(|a| a.weight).sum(),
            SigmaLaw::UniformInterval { mass, .. } => *mass,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidSigmaLaw(msg));
        match self {
            SigmaLaw::Discrete { atoms } => {
                for (i, a) in atoms.iter().enumerate() {
                    if !(a.weight.is_finite() && a.weight >= 0.0) {
                        return bad(format!("atom {i}: weight {} must be >= 0", a.weight));
                    }
                    if !(a.sigma.is_finite() && a.sigma >= 0.0) {
                        return bad(format!("atom {i}: sigma {} must be >= 0", a.sigma));
                    }
                }
            }
            SigmaLaw::UniformInterval { mass, lo, hi } => {
                if !(mass.is_finite() && *mass >= 0.0) {
                    return bad(format!("mass {mass} must be >= 0"));
                }
                if !(lo.is_finite() && *lo > 0.0) {
                    return bad(format!("uniform interval needs lo > 0, got {lo}"));
                }
                if !(hi.is_finite() && hi >= lo) {
                    return bad(format!("uniform interval needs hi >= lo, got [{lo}, {hi}]"));
                }
            }
        }
        let mass = self.mass();
        if mass > 1.0 + MASS_TOLERANCE {
            return bad(format!("total mass {mass} exceeds 1"));
        }
        Ok(())
    }

    /// Multiplies every σ by `c > 0`.
    pub fn scale(&self, c: f64) -> Result<Self, Error> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidSigmaLaw(format!("scale factor {c} must be > 0")));
        }
        let law = match self {
            SigmaLaw::Discrete { atoms } => SigmaLaw::Discrete {
                atoms: atoms
                    .iter()
                    .map(|a| SigmaAtom {
                        weight: a.weight,
                        sigma: a.sigma * c,
                    })
                    .collect(),
            },
            SigmaLaw::UniformInterval { mass, lo, hi } => SigmaLaw::UniformInterval {
                mass: *mass,
                lo: lo * c,
                hi: hi * c,
            },
        };
        law.validate()?;
        Ok(law)
    }

    fn has_zero_atom(&self) -> bool {
        match self {
            SigmaLaw::Discrete { atoms } => atoms.iter().any(|a| a.sigma == 0.0),
            SigmaLaw::UniformInterval { .. } => false,
        }
    }
}

/// Exact decomposition of a directing measure by the sign of the conditional
/// drift and the positivity of the conditional variance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSummary {
    /// Mass of `{E_F X_1 < 0}`.
    pub p_neg: f64,
    /// Mass of `{E_F X_1 > 0}`.
    pub p_pos: f64,
    /// Mass of `{E_F X_1 = 0, σ²_F = 0}`.
    pub p_zero_degenerate: f64,
    /// Law of σ_F on `{E_F X_1 = 0, σ²_F > 0}`.
    pub sigma_sub_law: SigmaLaw,
}

impl ModelSummary {
    pub fn new(
        p_neg: f64,
        p_pos: f64,
        p_zero_degenerate: f64,
        sigma_sub_law: SigmaLaw,
    ) -> Result<Self, Error> {
        let s = ModelSummary {
            p_neg,
            p_pos,
            p_zero_degenerate,
            sigma_sub_law,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, p) in [
            ("p_neg", self.p_neg),
            ("p_pos", self.p_pos),
            ("p_zero_degenerate", self.p_zero_degenerate),
        ] {
            if !(p.is_finite() && (0.0..=1.0 + MASS_TOLERANCE).contains(&p)) {
                return Err(Error::InvalidSummary(format!("{name} = {p} is not in [0, 1]")));
            }
        }
        self.sigma_sub_law
            .validate()
            .map_err(|e| Error::InvalidSummary(format!("{e}")))?;
        if self.sigma_sub_law.has_zero_atom() {
            return Err(Error::InvalidSummary(
                "sigma_sub_law must not contain a zero sigma atom (that mass belongs to p_zero_degenerate)".into(),
            ));
        }
        let total = self.total_mass();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidSummary(format!(
                "masses sum to {total}, expected 1 within {MASS_TOLERANCE:e}"
            )));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.p_neg + self.p_pos + self.p_zero_degenerate + self.sigma_sub_law.mass()
    }

    /// Points where the limit jumps; only the origin, and only with a degenerate part.
    pub fn atoms(&self) -> Vec<f64> {
        if self.p_zero_degenerate > 0.0 {
            alloc::vec![0.0]
        } else {
            Vec::new()
        }
    }
}

#[inline]
fn step(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn g(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        2.0 * phi(x) - 1.0
    }
}

/// `G(x) = (2Φ(x) − 1)·1[x ≥ 0]`.
pub fn erdos_kac_g(x: f64) -> Result<f64, Error> {
    ensure_finite("x", x)?;
    Ok(g(x))
}

pub(crate) fn mixture_unchecked(x: f64, law: &SigmaLaw) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    match law {
        SigmaLaw::Discrete { atoms } => atoms
            .iter()
            .filter(|a| a.sigma > 0.0)
            .map(|a| a.weight * g(x / a.sigma))
            .sum(),
        SigmaLaw::UniformInterval { mass, lo, hi } => {
            if *mass == 0.0 {
                0.0
            } else if hi == lo {
                mass * g(x / lo)
            } else {
                let density = mass / (hi - lo);
                quadrature::integrate(|s| density * g(x / s), *lo, *hi, QUADRATURE_TOLERANCE)
                    .value
                    .clamp(0.0, *mass)
            }
        }
    }
}

/// `G_μ(x) = ∫ 1(σ > 0)·G(x/σ) dL(σ)` over a sigma law.
///
/// Discrete laws are summed exactly; zero-sigma atoms contribute nothing.
/// Uniform laws are integrated to [`QUADRATURE_TOLERANCE`].
pub fn mixture_g_mu(x: f64, sigma_law: &SigmaLaw) -> Result<f64, Error> {
    ensure_finite("x", x)?;
    sigma_law.validate()?;
    Ok(mixture_unchecked(x, sigma_law))
}

/// Zero-drift limit: `p_zero_degenerate·1[x ≥ 0] + G_μ(x)`.
pub fn weak_limit(x: f64, summary: &ModelSummary) -> Result<f64, Error> {
    ensure_finite("x", x)?;
    summary.validate()?;
    if summary.p_neg > 0.0 || summary.p_pos > 0.0 {
        return Err(Error::NonzeroDrift {
            p_neg: summary.p_neg,
            p_pos: summary.p_pos,
        });
    }
    Ok(general_unchecked(x, summary))
}

pub(crate) fn general_unchecked(x: f64, summary: &ModelSummary) -> f64 {
    let v = summary.p_neg
        + summary.p_zero_degenerate * step(x)
        + mixture_unchecked(x, &summary.sigma_sub_law);
    v.clamp(0.0, 1.0)
}

/// Drift-decomposed limit: `p_neg + p_zero_degenerate·1[x ≥ 0] + G_μ(x)`,
/// with `G_μ` taken over the zero-drift, positive-variance part only.
pub fn general_limit(x: f64, summary: &ModelSummary) -> Result<f64, Error> {
    ensure_finite("x", x)?;
    summary.validate()?;
    Ok(general_unchecked(x, summary))
}
