//! Directing measures as finite mixtures of component laws.
//!
//! Conditionally on the component drawn from the mixture, the sequence is
//! i.i.d. with that component's law. [`DirectingMeasure::summarize`] gives
//! the exact drift/variance decomposition that the limit laws consume.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use crate::error::Error;
use crate::limit_laws::{ModelSummary, SigmaAtom, SigmaLaw, MASS_TOLERANCE};
use crate::stream::RandomStream;

/// Component means within this distance of zero count as zero drift.
pub const MEAN_ZERO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "snake_case"))]
pub enum ComponentLaw {
    Normal { mean: f64, variance: f64 },
    /// `shift ± scale`, each with probability ½.
    RademacherShifted { shift: f64, scale: f64 },
    PointMass { value: f64 },
    /// `B + Z` with `B` a fair ±1 sign and `Z` standard normal, independent.
    ConvolutionRademacherNormal,
}

impl ComponentLaw {
    /// Zero variance is normalized to a point mass at `mean`.
    pub fn normal(mean: f64, variance: f64) -> Result<Self, Error> {
        let law = if variance == 0.0 {
            ComponentLaw::PointMass { value: mean }
        } else {
            ComponentLaw::Normal { mean, variance }
        };
        law.validate()?;
        Ok(law)
    }

    /// Zero scale is normalized to a point mass at `shift`.
    pub fn rademacher_shifted(shift: f64, scale: f64) -> Result<Self, Error> {
        let law = if scale == 0.0 {
            ComponentLaw::PointMass { value: shift }
        } else {
            ComponentLaw::RademacherShifted { shift, scale }
        };
        law.validate()?;
        Ok(law)
    }

    pub fn point_mass(value: f64) -> Result<Self, Error> {
        let law = ComponentLaw::PointMass { value };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidLaw(format!("{name} must be finite, got {v}")))
            }
        };
        match *self {
            ComponentLaw::Normal { mean, variance } => {
                finite("mean", mean)?;
                finite("variance", variance)?;
                if variance < 0.0 {
                    return Err(Error::InvalidLaw(format!("variance {variance} must be >= 0")));
                }
            }
            ComponentLaw::RademacherShifted { shift, scale } => {
                finite("shift", shift)?;
                finite("scale", scale)?;
                if scale < 0.0 {
                    return Err(Error::InvalidLaw(format!("scale {scale} must be >= 0")));
                }
            }
            ComponentLaw::PointMass { value } => finite("value", value)?,
            ComponentLaw::ConvolutionRademacherNormal => {}
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ComponentLaw::Normal { mean, .. } => mean,
            ComponentLaw::RademacherShifted { shift, .. } => shift,
            ComponentLaw::PointMass { value } => value,
            ComponentLaw::ConvolutionRademacherNormal => 0.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            ComponentLaw::Normal { variance, .. } => variance,
            ComponentLaw::RademacherShifted { scale, .. } => scale * scale,
            ComponentLaw::PointMass { .. } => 0.0,
            ComponentLaw::ConvolutionRademacherNormal => 2.0,
        }
    }

    pub fn std_dev(&self) -> f64 {
        match *self {
            ComponentLaw::RademacherShifted { scale, .. } => scale,
            ComponentLaw::ConvolutionRademacherNormal => SQRT_2,
            _ => libm::sqrt(self.variance()),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.variance() == 0.0
    }

    /// The law of `c·X`; not available for the fixed convolution family.
    pub fn scaled(&self, c: f64) -> Result<Self, Error> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidLaw(format!("scale factor {c} must be > 0")));
        }
        let law = match *self {
            ComponentLaw::Normal { mean, variance } => ComponentLaw::Normal {
                mean: mean * c,
                variance: variance * c * c,
            },
            ComponentLaw::RademacherShifted { shift, scale } => ComponentLaw::RademacherShifted {
                shift: shift * c,
                scale: scale * c,
            },
            ComponentLaw::PointMass { value } => ComponentLaw::PointMass { value: value * c },
            ComponentLaw::ConvolutionRademacherNormal => {
                return Err(Error::InvalidLaw(
                    "convolution_rademacher_normal has no scale parameter".into(),
                ))
            }
        };
        law.validate()?;
        Ok(law)
    }

    pub fn sampler(&self) -> Sampler {
        match *self {
            ComponentLaw::Normal { mean, variance } => Sampler::Normal {
                mean,
                sd: libm::sqrt(variance),
            },
            ComponentLaw::RademacherShifted { shift, scale } => {
                Sampler::Rademacher { shift, scale }
            }
            ComponentLaw::PointMass { value } => Sampler::Constant(value),
            ComponentLaw::ConvolutionRademacherNormal => Sampler::SignPlusNormal,
        }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        self.sampler().draw(stream)
    }

    /// `n` i.i.d. draws.
    pub fn sample_iid(&self, n: usize, stream: &mut RandomStream) -> Vec<f64> {
        let sampler = self.sampler();
        (0..n).map(|_| sampler.draw(stream)).collect()
    }
}

/// A component law with its parameters preprocessed for repeated draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    Normal { mean: f64, sd: f64 },
    Rademacher { shift: f64, scale: f64 },
    Constant(f64),
    SignPlusNormal,
}

impl Sampler {
    #[inline]
    pub fn draw(&self, stream: &mut RandomStream) -> f64 {
        match *self {
            Sampler::Normal { mean, sd } => mean + sd * stream.standard_normal(),
            Sampler::Rademacher { shift, scale } => {
                if stream.coin() {
                    shift + scale
                } else {
                    shift - scale
                }
            }
            Sampler::Constant(v) => v,
            Sampler::SignPlusNormal => {
                let sign = if stream.coin() { 1.0 } else { -1.0 };
                sign + stream.standard_normal()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedLaw {
    pub weight: f64,
    pub law: ComponentLaw,
}

/// Law μ of the directing random measure, as a finite mixture.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DirectingMeasure {
    components: Vec<WeightedLaw>,
    tag: Option<String>,
}

impl DirectingMeasure {
    pub fn new<I>(components: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (f64, ComponentLaw)>,
    {
        let components: Vec<WeightedLaw> = components
            .into_iter()
            .map(|(weight, law)| WeightedLaw { weight, law })
            .collect();
        let m = DirectingMeasure {
            components,
            tag: None,
        };
        m.validate()?;
        Ok(m)
    }

    /// A measure with one component: the i.i.d. case.
    pub fn iid(law: ComponentLaw) -> Result<Self, Error> {
        Self::new([(1.0, law)])
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn components(&self) -> &[WeightedLaw] {
        &self.components
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.components.is_empty() {
            return Err(Error::InvalidMeasure("at least one component is required".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "component {i}: weight {} must be >= 0",
                    c.weight
                )));
            }
            c.law
                .validate()
                .map_err(|e| Error::InvalidMeasure(format!("component {i}: {e}")))?;
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, but must sum to 1 within {MASS_TOLERANCE:e}"
            )));
        }
        Ok(())
    }

    /// Unconditional mean `E X_1 = Σ w_j·mean_j`.
    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.weight * c.law.mean()).sum()
    }

    /// `E X_1 X_2 = Σ w_j·mean_j²` (conditional independence).
    pub fn mixed_moment(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.law.mean() * c.law.mean())
            .sum()
    }

    /// Draws a component index with probability equal to its weight.
    ///
    /// Consumes exactly one 64-bit word; zero-weight components are never drawn.
    pub fn sample_component(&self, stream: &mut RandomStream) -> usize {
        let u = stream.uniform();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (j, c) in self.components.iter().enumerate() {
            if c.weight > 0.0 {
                acc += c.weight;
                last_positive = j;
                if u < acc {
                    return j;
                }
            }
        }
        last_positive
    }

    pub fn law(&self, index: usize) -> &ComponentLaw {
        &self.components[index].law
    }

    /// Splits μ by the sign of the component mean and the positivity of its variance.
    pub fn summarize(&self) -> ModelSummary {
        let (mut p_neg, mut p_pos, mut p_zero_degenerate) = (0.0, 0.0, 0.0);
        let mut atoms = Vec::new();
        for c in self.components.iter().filter(|c| c.weight > 0.0) {
            let m = c.law.mean();
            if m < -MEAN_ZERO_TOLERANCE {
                p_neg += c.weight;
            } else if m > MEAN_ZERO_TOLERANCE {
                p_pos += c.weight;
            } else if c.law.is_degenerate() {
                p_zero_degenerate += c.weight;
            } else {
                atoms.push(SigmaAtom {
                    weight: c.weight,
                    sigma: c.law.std_dev(),
                });
            }
        }
        ModelSummary {
            p_neg,
            p_pos,
            p_zero_degenerate,
            sigma_sub_law: SigmaLaw::Discrete { atoms },
        }
    }

    /// Every component law scaled by `c`, same weights.
    pub fn scaled(&self, c: f64) -> Result<Self, Error> {
        let mut components = Vec::with_capacity(self.components.len());
        for w in &self.components {
            components.push(WeightedLaw {
                weight: w.weight,
                law: w.law.scaled(c)?,
            });
        }
        Ok(DirectingMeasure {
            components,
            tag: self.tag.clone(),
        })
    }
}

/// Exchangeable random walk plus noise: `X_n = Y_n + Z_n` with `Y_n = ±1`
/// exchangeable and `Z_n` i.i.d. standard normal.
///
/// The constraints on `Y` (values ±1, `E Y_1 Y_2 = 0`, `E Y_1² Y_2² = 1`)
/// force every conditional law of `Y` to be the fair sign: `E Y_1 Y_2 = 0`
/// gives `E_F Y_1 = 0` almost surely, and a ±1 variable with zero mean has
/// `P(Y = 1) = ½`. The directing measure of `Y` is the point mass at that law,
/// so `X` is i.i.d. with the single component
/// [`ComponentLaw::ConvolutionRademacherNormal`] (mean 0, variance 2).
pub fn example1_measure() -> DirectingMeasure {
    DirectingMeasure {
        components: alloc::vec![WeightedLaw {
            weight: 1.0,
            law: ComponentLaw::ConvolutionRademacherNormal,
        }],
        tag: Some("example1".into()),
    }
}

/// Default-indicator model `X_n = Y·ξ_n` with `P(Y = 1) = p`: mixture of
/// `xi_law` (weight `p`) and the point mass at 0 (weight `1 − p`).
pub fn example2_measure(p: f64, xi_law: ComponentLaw) -> Result<DirectingMeasure, Error> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidMeasure(format!("p = {p} must lie in the open interval (0, 1)")));
    }
    xi_law.validate()?;
    if xi_law.mean().abs() > MEAN_ZERO_TOLERANCE {
        return Err(Error::InvalidMeasure(format!(
            "xi law must have mean 0, got {}",
            xi_law.mean()
        )));
    }
    if xi_law.variance() <= 0.0 {
        return Err(Error::InvalidMeasure("xi law must have positive variance".into()));
    }
    Ok(DirectingMeasure::new([(p, xi_law), (1.0 - p, ComponentLaw::PointMass { value: 0.0 })])?
        .with_tag("example2"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal() -> ComponentLaw {
        ComponentLaw::normal(0.0, 1.0).unwrap()
    }

    fn atoms(s: &ModelSummary) -> Vec<(f64, f64)> {
        match &s.sigma_sub_law {
            SigmaLaw::Discrete { atoms } => atoms.iter().map(|a| (a.weight, a.sigma)).collect(),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn normalization_to_point_mass() {
        assert_eq!(
            ComponentLaw::normal(2.0, 0.0).unwrap(),
            ComponentLaw::PointMass { value: 2.0 }
        );
        assert_eq!(
            ComponentLaw::rademacher_shifted(-1.0, 0.0).unwrap(),
            ComponentLaw::PointMass { value: -1.0 }
        );
        assert!(ComponentLaw::normal(0.0, -1.0).is_err());
        assert!(ComponentLaw::rademacher_shifted(0.0, -1.0).is_err());
        assert!(ComponentLaw::point_mass(f64::NAN).is_err());
    }

    #[test]
    fn family_moments() {
        let r = ComponentLaw::rademacher_shifted(0.5, 2.0).unwrap();
        assert_eq!((r.mean(), r.variance(), r.std_dev()), (0.5, 4.0, 2.0));
        let c = ComponentLaw::ConvolutionRademacherNormal;
        assert_eq!((c.mean(), c.variance()), (0.0, 2.0));
        assert!(ComponentLaw::point_mass(3.0).unwrap().is_degenerate());
    }

    #[test]
    fn summarize_example2() {
        let s = example2_measure(0.5, std_normal()).unwrap().summarize();
        assert_eq!((s.p_neg, s.p_pos, s.p_zero_degenerate), (0.0, 0.0, 0.5));
        assert_eq!(atoms(&s), [(0.5, 1.0)]);
        s.validate().unwrap();
    }

    #[test]
    fn summarize_single_normal() {
        let s = DirectingMeasure::iid(std_normal()).unwrap().summarize();
        assert_eq!((s.p_neg, s.p_pos, s.p_zero_degenerate), (0.0, 0.0, 0.0));
        assert_eq!(atoms(&s), [(1.0, 1.0)]);
    }

    #[test]
    fn summarize_negative_drift() {
        let m = DirectingMeasure::new([
            (0.3, ComponentLaw::normal(-1.0, 1.0).unwrap()),
            (0.7, std_normal()),
        ])
        .unwrap();
        let s = m.summarize();
        assert_eq!((s.p_neg, s.p_pos, s.p_zero_degenerate), (0.3, 0.0, 0.0));
        assert_eq!(atoms(&s), [(0.7, 1.0)]);
        s.validate().unwrap();
    }

    #[test]
    fn summarize_example1() {
        let s = example1_measure().summarize();
        assert_eq!(atoms(&s), [(1.0, SQRT_2)]);
    }

    #[test]
    fn example2_preconditions() {
        assert!(example2_measure(0.0, std_normal()).is_err());
        assert!(example2_measure(1.0, std_normal()).is_err());
        assert!(example2_measure(0.5, ComponentLaw::normal(0.1, 1.0).unwrap()).is_err());
        assert!(example2_measure(0.5, ComponentLaw::point_mass(0.0).unwrap()).is_err());
        assert_eq!(example2_measure(0.25, std_normal()).unwrap().summarize().p_zero_degenerate, 0.75);
    }

    #[test]
    fn measure_validation() {
        let err = DirectingMeasure::new([(0.9, std_normal())]).unwrap_err();
        assert!(format!("{err}").contains("weights sum to 0.9"));
        assert!(DirectingMeasure::new([]).is_err());
        assert!(DirectingMeasure::new([(1.5, std_normal()), (-0.5, std_normal())]).is_err());
    }

    #[test]
    fn single_component_always_zero() {
        let m = DirectingMeasure::iid(std_normal()).unwrap();
        let mut s = RandomStream::new(1, 0);
        assert!((0..1000).all(|_| m.sample_component(&mut s) == 0));
    }

    #[test]
    fn zero_weight_never_drawn() {
        let m = DirectingMeasure::new([(1.0, std_normal()), (0.0, std_normal())]).unwrap();
        let mut s = RandomStream::new(2, 0);
        assert!((0..100_000).all(|_| m.sample_component(&mut s) == 0));
        let m = DirectingMeasure::new([(0.0, std_normal()), (1.0, std_normal())]).unwrap();
        assert!((0..100_000).all(|_| m.sample_component(&mut s) == 1));
    }

    #[test]
    fn fair_component_frequencies() {
        let m = DirectingMeasure::new([(0.5, std_normal()), (0.5, std_normal())]).unwrap();
        let mut s = RandomStream::new(3, 0);
        let zeros = (0..100_000).filter(|_| m.sample_component(&mut s) == 0).count();
        assert!((zeros as f64 / 1e5 - 0.5).abs() <= 0.01);
    }

    #[test]
    fn sample_supports() {
        let mut s = RandomStream::new(4, 0);
        assert_eq!(ComponentLaw::point_mass(0.0).unwrap().sample_iid(5, &mut s), [0.0; 5]);
        let r = ComponentLaw::rademacher_shifted(0.0, 1.0).unwrap();
        assert!(r.sample_iid(10_000, &mut s).iter().all(|&v| v == 1.0 || v == -1.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let law = ComponentLaw::ConvolutionRademacherNormal;
        let a = law.sample_iid(100, &mut RandomStream::new(5, 9));
        let b = law.sample_iid(100, &mut RandomStream::new(5, 9));
        assert_eq!(a, b);
    }

    #[test]
    fn convolution_cannot_scale() {
        assert!(ComponentLaw::ConvolutionRademacherNormal.scaled(2.0).is_err());
        assert!(std_normal().scaled(0.0).is_err());
    }

    #[test]
    fn mixture_moments() {
        let m = DirectingMeasure::new([
            (0.25, ComponentLaw::normal(2.0, 1.0).unwrap()),
            (0.75, ComponentLaw::point_mass(-1.0).unwrap()),
        ])
        .unwrap();
        assert_eq!(m.mean(), 0.5 - 0.75);
        assert_eq!(m.mixed_moment(), 1.0 + 0.75);
    }
}
