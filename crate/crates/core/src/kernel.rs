//! The integral representation `q(z) = a + Σ b_ℓ z_ℓ + π^{-n} ∫ K_n(z,t) dμ(t)`
//! and the operations built on it: boundary limits at hyperplanes, pole
//! extraction and the coordinate Möbius change of variables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::measure::{integrate_with, restrict_to_hyperplane, Measure, MeasureComponent};
use crate::point::{Axis, HalfPlanePoint};
use crate::quadrature::{AxisCuts, IntegrationResult, QuadratureSpec};

fn check_dims(z: &HalfPlanePoint, t: &[f64]) {
    assert_eq!(z.dim(), t.len(), "point and boundary vector differ in dimension");
}

/// `K_n(z,t) = i [ 2/(2i)ⁿ ∏ (1/(t_ℓ−z_ℓ) − 1/(t_ℓ+i)) − ∏ 1/(1+t_ℓ²) ]`.
///
/// Each factor is evaluated as `(z+i)/((t−z)(t+i))`, which avoids cancelling
/// the two fractions for large `t`.
pub fn kernel_k(z: &HalfPlanePoint, t: &[f64]) -> Complex64 {
    check_dims(z, t);
    let i = Complex64::i();
    let n = t.len() as i32;
    let mut prod = Complex64::new(2.0, 0.0) / (2.0 * i).powi(n);
    let mut decay = 1.0;
    for (zl, &tl) in z.coords().iter().zip(t) {
        prod *= (zl + i) / ((tl - zl) * (tl + i));
        decay /= 1.0 + tl * tl;
    }
    i * (prod - decay)
}

/// Product Poisson kernel `∏ Im z_ℓ / |t_ℓ − z_ℓ|²`.
pub fn poisson_p(z: &HalfPlanePoint, t: &[f64]) -> f64 {
    check_dims(z, t);
    z.coords().iter().zip(t).map(|(zl, &tl)| zl.im / (tl - zl).norm_sqr()).product()
}

/// `Im K_n − P_n`.
pub fn remainder_r(z: &HalfPlanePoint, t: &[f64]) -> f64 {
    kernel_k(z, t).im - poisson_p(z, t)
}

/// Representing parameters `(a, b, μ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsDoc")]
pub struct RepresentationParams {
    n: usize,
    a: f64,
    b: Vec<f64>,
    mu: Measure,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    n: usize,
    a: f64,
    b: Vec<f64>,
    mu: Measure,
}

impl TryFrom<ParamsDoc> for RepresentationParams {
    type Error = Error;
    fn try_from(d: ParamsDoc) -> Result<Self> {
        RepresentationParams::new(d.a, d.b, d.mu).and_then(|p| {
            if p.n == d.n {
                Ok(p)
            } else {
                Err(Error::InvalidArgument("declared n differs from the measure's dimension".into()))
            }
        })
    }
}

impl RepresentationParams {
    pub fn new(a: f64, b: Vec<f64>, mu: Measure) -> Result<Self> {
        let n = mu.n();
        if b.len() != n {
            return Err(Error::InvalidArgument(format!("b has {} entries, expected {n}", b.len())));
        }
        if !a.is_finite() || b.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::InvalidArgument("a must be finite and every b_ℓ finite and nonnegative".into()));
        }
        Ok(RepresentationParams { n, a, b, mu })
    }

    /// `(0, 0, μ)`.
    pub fn from_measure(mu: Measure) -> Self {
        let n = mu.n();
        RepresentationParams { n, a: 0.0, b: vec![0.0; n], mu }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn mu(&self) -> &Measure {
        &self.mu
    }
}

/// The summand `c/(p − z_axis)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub axis: Axis,
    pub location: f64,
    pub strength: f64,
}

impl PoleTerm {
    pub fn eval(&self, z: &HalfPlanePoint) -> Complex64 {
        self.strength / (self.location - z.coords()[self.axis.index()])
    }
}

/// `q(z)` together with the quadrature bookkeeping of its integral part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub integral: IntegrationResult,
}

/// Evaluates the representation; the integral part may fail to converge.
pub fn evaluate_detailed(params: &RepresentationParams, z: &HalfPlanePoint, spec: &QuadratureSpec) -> Evaluation {
    assert_eq!(z.dim(), params.n, "point dimension differs from the representation's");
    let linear: Complex64 = params.b.iter().zip(z.coords()).map(|(b, zl)| zl * *b).sum::<Complex64>() + params.a;
    // The kernel peaks at t_ℓ = Re z_ℓ.
    let cuts = AxisCuts { per_axis: z.coords().iter().map(|w| vec![w.re]).collect() };
    let integral =
        integrate_with(&|t: &[f64]| kernel_k(z, t), &params.mu, &cuts, spec).scale(PI.powi(-(params.n as i32)));
    Evaluation { value: linear + integral.value, integral }
}

/// `q(z)`. Quadrature non-convergence is an error.
pub fn evaluate(params: &RepresentationParams, z: &HalfPlanePoint, spec: &QuadratureSpec) -> Result<Complex64> {
    let e = evaluate_detailed(params, z, spec);
    e.integral.into_result()?;
    Ok(e.value)
}

/// Vertical approach `z_j = p + iε_k`, `ε_k = eps0·2^{-k}`, `k = 0..steps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub eps0: f64,
    pub steps: usize,
    /// Value of every coordinate other than `j`.
    pub other: Complex64,
    /// Largest accepted extrapolation residual.
    pub tolerance: f64,
}

impl Default for PathSpec {
    fn default() -> Self {
        PathSpec { eps0: 1.0 / 16.0, steps: 9, other: Complex64::i(), tolerance: 1e-5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NontangentialLimit {
    /// Clamped estimate `max(Re raw, 0)`.
    pub c: f64,
    pub raw: Complex64,
    pub residual: f64,
}

/// Estimates `lim (p − z_j) q(z)` as `z_j → p` vertically, by first-order
/// Richardson extrapolation along a geometric sequence of heights.
pub fn nontangential_c(
    params: &RepresentationParams,
    axis: Axis,
    p: f64,
    path: &PathSpec,
    spec: &QuadratureSpec,
) -> Result<NontangentialLimit> {
    axis.check(params.n)?;
    if path.steps < 3 || !(path.eps0 > 0.0) || !(path.other.im > 0.0) {
        return Err(Error::InvalidArgument("path needs eps0 > 0, at least 3 steps and Im(other) > 0".into()));
    }
    let mut values = Vec::with_capacity(path.steps);
    for k in 0..path.steps {
        let eps = path.eps0 * 0.5f64.powi(k as i32);
        let zj = Complex64::new(p, eps);
        let mut coords = vec![path.other; params.n];
        coords[axis.index()] = zj;
        let z = HalfPlanePoint::new(coords)?;
        values.push((p - zj) * evaluate(params, &z, spec)?);
    }
    let extrapolated: Vec<Complex64> = values.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let last = extrapolated[extrapolated.len() - 1];
    let residual = (last - extrapolated[extrapolated.len() - 2]).norm();
    if !(residual <= path.tolerance) {
        return Err(Error::EstimationFailed { estimate: last.re, residual });
    }
    Ok(NontangentialLimit { c: last.re.max(0.0), raw: last, residual })
}

/// Poles split off a representation; `adjusted` represents what is left.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub poles: Vec<PoleTerm>,
    pub adjusted: RepresentationParams,
}

impl Decomposition {
    /// Sum of the poles plus the adjusted representation.
    pub fn evaluate(&self, z: &HalfPlanePoint, spec: &QuadratureSpec) -> Result<Complex64> {
        let poles: Complex64 = self.poles.iter().map(|p| p.eval(z)).sum();
        Ok(poles + evaluate(&self.adjusted, z, spec)?)
    }
}

/// Extracts `c_{j_i}(p_i)/(p_i − z_{j_i})` for each listed hyperplane.
pub fn decompose(params: &RepresentationParams, pairs: &[(Axis, f64)]) -> Result<Decomposition> {
    let mut poles = Vec::with_capacity(pairs.len());
    let mut remainder = params.mu.clone();
    let mut a = params.a;
    for (k, &(axis, p)) in pairs.iter().enumerate() {
        if pairs[..k].iter().any(|&(b, q)| b == axis && q == p) {
            return Err(Error::InvalidArgument(format!("hyperplane t_{axis} = {p} listed twice")));
        }
        let r = restrict_to_hyperplane(&remainder, axis, p)?;
        if r.non_lebesgue {
            return Err(Error::NotNevanlinna(format!(
                "the restriction to t_{axis} = {p} is not a multiple of Lebesgue measure"
            )));
        }
        a -= r.constant * p / (1.0 + p * p);
        poles.push(PoleTerm { axis, location: p, strength: r.constant });
        remainder = r.remainder;
    }
    let adjusted = RepresentationParams { n: params.n, a, b: params.b.clone(), mu: remainder };
    Ok(Decomposition { poles, adjusted })
}

/// Result of the change of variables `z_j ↦ p − 1/z_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transformed {
    /// Representation of `Q(z) = q(…, p − 1/z_j, …)`.
    pub params: RepresentationParams,
    /// New linear coefficient on axis `j`: the old `c_j(p)`.
    pub slope: f64,
    /// The old linear coefficient `b_j`, now a pole at `0`.
    pub pole: PoleTerm,
}

/// Representation of `Q(z) = q(z₁, …, p − 1/z_j, …, z_n)`.
///
/// The pole of `q` at `z_j = p` becomes the linear term of `Q`, the linear term of
/// `q` becomes a pole at `0`, and the remaining measure is carried along by the
/// coordinate map `t_j ↦ 1/(p − t_j)`. For `p ≠ 0` the new constant is fixed by
/// `Re Q(i, …, i) = Re q(i, …, p + i, …, i)`, which needs one evaluation of `q`.
pub fn transform_representation(
    params: &RepresentationParams,
    axis: Axis,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Transformed> {
    axis.check(params.n)?;
    let j = axis.index();
    let r = restrict_to_hyperplane(&params.mu, axis, p)?;
    if r.non_lebesgue {
        return Err(Error::NotNevanlinna(format!(
            "the restriction to t_{axis} = {p} is not a multiple of Lebesgue measure"
        )));
    }
    let bj = params.b[j];
    let mut components = Vec::new();
    if !r.remainder.is_trivial() {
        components.push(MeasureComponent::MoebiusPushforward { inner: Box::new(r.remainder), axis, pole: p });
    }
    if bj > 0.0 {
        components.push(MeasureComponent::HyperplaneLebesgue { axis, offset: 0.0, constant: bj });
    }
    let mu = Measure::new(params.n, components)?;
    let a = if p == 0.0 {
        params.a
    } else {
        let z = HalfPlanePoint::diagonal_i(params.n).with(axis, Complex64::new(p, 1.0))?;
        evaluate(params, &z, spec)?.re
    };
    let mut b = params.b.clone();
    b[j] = r.constant;
    Ok(Transformed {
        params: RepresentationParams { n: params.n, a, b, mu },
        slope: r.constant,
        pole: PoleTerm { axis, location: 0.0, strength: bj },
    })
}
