//! Positive Borel measures on ℝⁿ as finite sums of structured components.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::Axis;
use crate::region::Region;

mod integrate;
mod restrict;

pub(crate) use integrate::integrate_with;
pub use integrate::{
    growth_integral, growth_report, integrate, truncated_mass, truncated_mass_result, GrowthReport, GrowthStatus,
};
pub use restrict::{restrict_to_hyperplane, Restriction};

/// Overflow guard separating "diverged" from "inconclusive" growth integrals.
pub const GROWTH_DIVERGENCE_GUARD: f64 = 1e12;

/// A nonnegative density on ℝᵏ.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Density {
    Constant {
        value: f64,
    },
    /// `scale · ∏ (1 + s_ℓ²)^{-exponent}`.
    RationalDecay {
        scale: f64,
        exponent: f64,
    },
    /// Arbitrary user density. Integrable, but opaque to symbolic restriction and
    /// not serializable.
    #[serde(skip)]
    Custom(CustomDensity),
}

/// Shared closure behind [`Density::Custom`].
#[derive(Clone)]
pub struct CustomDensity(pub Arc<DensityFn>);

pub type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

impl Density {
    pub fn constant(value: f64) -> Density {
        Density::Constant { value }
    }

    pub fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Density {
        Density::Custom(CustomDensity(Arc::new(f)))
    }

    pub fn eval(&self, s: &[f64]) -> f64 {
        match self {
            Density::Constant { value } => *value,
            Density::RationalDecay { scale, exponent } => {
                scale * s.iter().map(|x| (1.0 + x * x).powf(-exponent)).product::<f64>()
            }
            Density::Custom(f) => (f.0)(s),
        }
    }

    /// The constant value, when the density is (symbolically) constant.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Density::Constant { value } => Some(*value),
            Density::RationalDecay { scale, exponent } if *exponent == 0.0 => Some(*scale),
            _ => None,
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, Density::Custom(_))
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Density::Constant { value } => value.is_finite() && *value >= 0.0,
            Density::RationalDecay { scale, exponent } => scale.is_finite() && *scale >= 0.0 && exponent.is_finite(),
            Density::Custom(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidMeasure("densities must be finite and nonnegative".into()))
        }
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Constant { value } => write!(f, "Constant({value})"),
            Density::RationalDecay { scale, exponent } => write!(f, "RationalDecay({scale}, {exponent})"),
            Density::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PartialEq for Density {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Density::Constant { value: a }, Density::Constant { value: b }) => a == b,
            (Density::RationalDecay { scale: a, exponent: x }, Density::RationalDecay { scale: b, exponent: y }) => {
                a == b && x == y
            }
            (Density::Custom(a), Density::Custom(b)) => Arc::ptr_eq(&a.0, &b.0),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureComponent {
    /// `weight · δ_location`.
    PointMass { location: Vec<f64>, weight: f64 },
    /// `constant · π · λ` on the hyperplane `t_axis = offset`.
    HyperplaneLebesgue { axis: Axis, offset: f64, constant: f64 },
    /// `weight ·` image of `density · λ_{ℝᵏ}` under `s ↦ M s + β` (`M` by rows, n×k).
    AffinePushforward { matrix: Vec<Vec<f64>>, offset: Vec<f64>, density: Density, weight: f64 },
    /// `density · λ_{ℝⁿ}`, optionally restricted to a region.
    FullDensity {
        density: Density,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Region>,
    },
    /// Image of `inner` under `t_axis ↦ 1/(pole − t_axis)`, weighted by the
    /// derivative of that map so that Lebesgue measure is preserved.
    MoebiusPushforward { inner: Box<Measure>, axis: Axis, pole: f64 },
}

impl MeasureComponent {
    pub fn dim(&self) -> usize {
        match self {
            MeasureComponent::PointMass { location, .. } => location.len(),
            MeasureComponent::AffinePushforward { matrix, .. } => matrix.len(),
            MeasureComponent::MoebiusPushforward { inner, .. } => inner.n,
            MeasureComponent::FullDensity { region: Some(r), .. } => r.dim(),
            MeasureComponent::HyperplaneLebesgue { .. } | MeasureComponent::FullDensity { region: None, .. } => 0,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidMeasure(m.to_string()));
        let nonneg = |x: f64| x.is_finite() && x >= 0.0;
        match self {
            MeasureComponent::PointMass { location, weight } => {
                if location.len() != n || location.iter().any(|x| !x.is_finite()) {
                    return bad("point mass location must be n finite reals");
                }
                if !nonneg(*weight) {
                    return bad("point mass weight must be finite and nonnegative");
                }
            }
            MeasureComponent::HyperplaneLebesgue { axis, offset, constant } => {
                axis.check(n)?;
                if !offset.is_finite() || !nonneg(*constant) {
                    return bad("hyperplane offset must be finite and constant nonnegative");
                }
            }
            MeasureComponent::AffinePushforward { matrix, offset, density, weight } => {
                let k = matrix.first().map_or(0, |r| r.len());
                if matrix.len() != n || k == 0 || k > n || matrix.iter().any(|r| r.len() != k) {
                    return bad("affine pushforward needs an n×k matrix with 1 ≤ k ≤ n");
                }
                if offset.len() != n || matrix.iter().flatten().chain(offset).any(|x| !x.is_finite()) {
                    return bad("affine pushforward offset must be n finite reals");
                }
                if !nonneg(*weight) {
                    return bad("affine pushforward weight must be finite and nonnegative");
                }
                density.validate()?;
            }
            MeasureComponent::FullDensity { density, region } => {
                density.validate()?;
                if let Some(r) = region {
                    r.validate()?;
                    if r.dim() != n {
                        return bad("region dimension differs from the measure's");
                    }
                }
            }
            MeasureComponent::MoebiusPushforward { inner, axis, pole } => {
                axis.check(n)?;
                if inner.n != n || !pole.is_finite() {
                    return bad("Möbius pushforward needs an inner measure of the same dimension and a finite pole");
                }
                let r = restrict_to_hyperplane(inner, *axis, *pole)?;
                if r.constant != 0.0 || r.non_lebesgue {
                    return Err(Error::HyperplaneMass { axis: *axis, offset: *pole });
                }
            }
        }
        Ok(())
    }
}

/// A positive measure on ℝⁿ; the empty component list is the zero measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc")]
pub struct Measure {
    n: usize,
    components: Vec<MeasureComponent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureDoc {
    n: usize,
    components: Vec<MeasureComponent>,
}

impl TryFrom<MeasureDoc> for Measure {
    type Error = Error;
    fn try_from(doc: MeasureDoc) -> Result<Self> {
        Measure::new(doc.n, doc.components)
    }
}

impl Measure {
    pub fn new(n: usize, components: Vec<MeasureComponent>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        for c in &components {
            c.validate(n)?;
        }
        Ok(Measure { n, components })
    }

    /// Internal constructor for components already known to be valid.
    pub(crate) fn from_valid(n: usize, components: Vec<MeasureComponent>) -> Self {
        Measure { n, components }
    }

    pub fn trivial(n: usize) -> Self {
        Measure { n, components: Vec::new() }
    }

    /// Lebesgue measure on ℝⁿ.
    pub fn lebesgue(n: usize) -> Self {
        Measure { n, components: vec![MeasureComponent::FullDensity { density: Density::constant(1.0), region: None }] }
    }

    /// `value · λ` restricted to `region`.
    pub fn lebesgue_on(region: Region, value: f64) -> Result<Self> {
        let n = region.dim();
        Measure::new(n, vec![MeasureComponent::FullDensity { density: Density::constant(value), region: Some(region) }])
    }

    pub fn point_mass(location: Vec<f64>, weight: f64) -> Result<Self> {
        Measure::new(location.len(), vec![MeasureComponent::PointMass { location, weight }])
    }

    /// `constant · π · λ` on `t_axis = offset`.
    pub fn hyperplane(n: usize, axis: Axis, offset: f64, constant: f64) -> Result<Self> {
        Measure::new(n, vec![MeasureComponent::HyperplaneLebesgue { axis, offset, constant }])
    }

    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>, density: Density, weight: f64) -> Result<Self> {
        Measure::new(matrix.len(), vec![MeasureComponent::AffinePushforward { matrix, offset, density, weight }])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[MeasureComponent] {
        &self.components
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    /// Sum of two measures (component lists concatenated).
    pub fn plus(&self, other: &Measure) -> Result<Measure> {
        if self.n != other.n {
            return Err(Error::InvalidMeasure("cannot add measures of different dimension".into()));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(Measure { n: self.n, components })
    }

    /// `factor · μ`.
    pub fn scaled(&self, factor: f64) -> Result<Measure> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::InvalidArgument("scale factor must be finite and nonnegative".into()));
        }
        Ok(Measure { n: self.n, components: self.components.iter().map(|c| scale_component(c, factor)).collect() })
    }

    /// Single-component measure holding the `index`-th component.
    pub fn component_measure(&self, index: usize) -> Measure {
        Measure { n: self.n, components: vec![self.components[index].clone()] }
    }

    /// `(J_axis^pole)_* μ`, kept lazy. Fails if μ charges the hyperplane `t_axis = pole`.
    pub fn pushforward_moebius(&self, axis: Axis, pole: f64) -> Result<Measure> {
        axis.check(self.n)?;
        if self.is_trivial() {
            return Ok(self.clone());
        }
        let c = MeasureComponent::MoebiusPushforward { inner: Box::new(self.clone()), axis, pole };
        Measure::new(self.n, vec![c])
    }

    /// Resolves Möbius pushforwards of point masses, hyperplane measures and
    /// constant densities into explicit components; anything else stays lazy.
    pub fn simplify(&self) -> Measure {
        let mut out = Vec::new();
        for c in &self.components {
            match c {
                MeasureComponent::MoebiusPushforward { inner, axis, pole } => {
                    for ic in inner.simplify().components {
                        out.push(restrict::resolve_moebius(ic, self.n, *axis, *pole));
                    }
                }
                other => out.push(other.clone()),
            }
        }
        Measure { n: self.n, components: out }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Measure> {
        Ok(serde_json::from_str(text)?)
    }
}

fn scale_component(c: &MeasureComponent, f: f64) -> MeasureComponent {
    match c.clone() {
        MeasureComponent::PointMass { location, weight } => {
            MeasureComponent::PointMass { location, weight: weight * f }
        }
        MeasureComponent::HyperplaneLebesgue { axis, offset, constant } => {
            MeasureComponent::HyperplaneLebesgue { axis, offset, constant: constant * f }
        }
        MeasureComponent::AffinePushforward { matrix, offset, density, weight } => {
            MeasureComponent::AffinePushforward { matrix, offset, density, weight: weight * f }
        }
        MeasureComponent::FullDensity { density, region } => {
            let density = match density {
                Density::Constant { value } => Density::Constant { value: value * f },
                Density::RationalDecay { scale, exponent } => Density::RationalDecay { scale: scale * f, exponent },
                Density::Custom(g) => Density::custom(move |s: &[f64]| f * (g.0)(s)),
            };
            MeasureComponent::FullDensity { density, region }
        }
        MeasureComponent::MoebiusPushforward { inner, axis, pole } => {
            let inner = Box::new(Measure {
                n: inner.n,
                components: inner.components.iter().map(|c| scale_component(c, f)).collect(),
            });
            MeasureComponent::MoebiusPushforward { inner, axis, pole }
        }
    }
}

/// Measures that appear throughout the theory, ready made.
pub mod catalog {
    use super::*;

    /// `π δ_0` on ℝ; represents `z ↦ −1/z`.
    pub fn pi_delta_zero() -> Measure {
        Measure::point_mass(vec![0.0], PI).expect("valid")
    }

    /// `π ·` image of `λ_ℝ` under `t ↦ (t, −t)`; represents `−1/(z₁+z₂)`.
    pub fn anti_diagonal() -> Measure {
        Measure::affine(vec![vec![1.0], vec![-1.0]], vec![0.0, 0.0], Density::constant(1.0), PI).expect("valid")
    }

    /// `π ·` image of `λ_{ℝ²}` under `s ↦ (s₁, s₂, −s₁−s₂)`; represents `−1/(z₁+z₂+z₃)`.
    pub fn plane_sum_zero() -> Measure {
        Measure::affine(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            vec![0.0; 3],
            Density::constant(1.0),
            PI,
        )
        .expect("valid")
    }

    /// Image of `λ_ℝ` under `t ↦ (t, …, t)`, supported on the diagonal.
    pub fn diagonal(n: usize) -> Measure {
        Measure::affine(vec![vec![1.0]; n], vec![0.0; n], Density::constant(1.0), 1.0).expect("valid")
    }

    /// Lebesgue measure restricted to `β₁ < t₂ − α t₁ < β₂` in ℝ².
    pub fn strip(alpha: f64, beta1: f64, beta2: f64) -> Measure {
        let r = Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(2), alpha, beta1, beta2 };
        Measure::lebesgue_on(r, 1.0).expect("valid")
    }
}
