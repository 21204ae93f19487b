//! The poly-torus `[0,2π)ⁿ` side: Cayley transport of measures, mixed Fourier
//! coefficients, the polydisk representation and its hyperplane splitting.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::kernel::RepresentationParams;
use crate::measure::{integrate, integrate_with, restrict_to_hyperplane, Density, Measure, MeasureComponent};
use crate::point::{Axis, DiskPoint, HalfPlanePoint};
use crate::quadrature::{integrate_box, AxisCuts, AxisMap, IntegrationResult, NoCrossings, QuadratureSpec};
use crate::region::Region;
use crate::support::{classify, Verdict, VerdictKind};

/// A boundary chart `s ↦ −cot((s + shift)/2)` from the circle minus one seam point onto ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub shift: f64,
}

impl Chart {
    pub const STANDARD: Chart = Chart { shift: 0.0 };
    /// Seam moved to `s = 2π − 1`, for measures living on `s_j = 0`.
    pub const SHIFTED: Chart = Chart { shift: 1.0 };

    fn angle(&self, s: f64) -> f64 {
        (s + self.shift).rem_euclid(TAU)
    }

    pub fn to_line(&self, s: f64) -> Result<f64> {
        let u = self.angle(s);
        if u == 0.0 || !s.is_finite() {
            let hint = if self.shift == 0.0 { "; use the shifted chart" } else { "" };
            return Err(Error::Seam(format!("angle {s} lies on the chart seam{hint}")));
        }
        Ok(-1.0 / (u / 2.0).tan())
    }

    /// Angle in `[0, 2π)` mapped to `t`.
    pub fn from_line(&self, t: f64) -> f64 {
        (2.0 * 1f64.atan2(-t) - self.shift).rem_euclid(TAU)
    }

    /// `|φ′(s)| = 1/(1 − cos(s + shift))`.
    pub fn jacobian(&self, s: f64) -> f64 {
        1.0 / (1.0 - (s + self.shift).cos())
    }
}

/// `φ(s) = −cot(s/2)` for `s ∈ (0, 2π)`.
pub fn cayley(s: f64) -> Result<f64> {
    Chart::STANDARD.to_line(s)
}

/// Inverse of [`cayley`], valued in `(0, 2π)`.
pub fn cayley_inverse(t: f64) -> f64 {
    Chart::STANDARD.from_line(t)
}

pub fn cayley_jacobian(s: f64) -> f64 {
    Chart::STANDARD.jacobian(s)
}

/// `Φ⁻¹(region)`: membership is decided on the half-plane side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusRegion {
    pub preimage_of: Region,
}

impl TorusRegion {
    pub fn dim(&self) -> usize {
        self.preimage_of.dim()
    }

    /// Whether `s` lies in the set; points on a seam `s_j = 0` never do.
    pub fn contains(&self, s: &[f64], tol: f64) -> bool {
        let t: Result<Vec<f64>> = s.iter().map(|&x| cayley(x)).collect();
        t.is_ok_and(|t| self.preimage_of.contains(&t, tol))
    }
}

pub fn torus_region(region: &Region) -> Result<TorusRegion> {
    region.validate()?;
    Ok(TorusRegion { preimage_of: region.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TorusComponent {
    PointMass {
        location: Vec<f64>,
        weight: f64,
    },
    /// `d·λ` on `A_j(p) = {s_j = p}`; a point mass of weight `d` when `n = 1`.
    HyperplaneLebesgue {
        axis: Axis,
        offset: f64,
        d: f64,
    },
    /// `value·λ`, optionally restricted to a region.
    Lebesgue {
        value: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<TorusRegion>,
    },
    /// Image of a half-plane measure `μ` under the chart, divided by `∏|φ′|`.
    Transported {
        measure: Measure,
        #[serde(default)]
        shift: f64,
    },
}

/// A finite positive measure on `[0, 2π)ⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TorusDoc")]
pub struct TorusMeasure {
    n: usize,
    components: Vec<TorusComponent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusDoc {
    n: usize,
    components: Vec<TorusComponent>,
}

impl TryFrom<TorusDoc> for TorusMeasure {
    type Error = Error;
    fn try_from(d: TorusDoc) -> Result<Self> {
        TorusMeasure::new(d.n, d.components)
    }
}

fn check_component(c: &TorusComponent, n: usize) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidMeasure(m.into()));
    match c {
        TorusComponent::PointMass { location, weight } => {
            if location.len() != n || location.iter().any(|s| !s.is_finite()) {
                return bad("point mass location must have n finite angles");
            }
            if !(*weight >= 0.0 && weight.is_finite()) {
                return bad("point mass weight must be finite and nonnegative");
            }
        }
        TorusComponent::HyperplaneLebesgue { axis, offset, d } => {
            axis.check(n)?;
            if !offset.is_finite() || !(*d >= 0.0 && d.is_finite()) {
                return bad("hyperplane needs a finite offset and finite d ≥ 0");
            }
        }
        TorusComponent::Lebesgue { value, region } => {
            if !(*value >= 0.0 && value.is_finite()) {
                return bad("Lebesgue multiple must be finite and nonnegative");
            }
            if let Some(r) = region {
                r.preimage_of.validate()?;
                if r.dim() != n {
                    return bad("region dimension differs from the measure's");
                }
            }
        }
        TorusComponent::Transported { measure, shift } => {
            if measure.n() != n || !shift.is_finite() {
                return bad("transported measure has the wrong dimension");
            }
        }
    }
    Ok(())
}

impl TorusMeasure {
    pub fn new(n: usize, components: Vec<TorusComponent>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMeasure("dimension must be at least 1".into()));
        }
        for c in &components {
            check_component(c, n)?;
        }
        Ok(TorusMeasure { n, components })
    }

    pub fn trivial(n: usize) -> Self {
        TorusMeasure { n, components: vec![] }
    }

    pub fn lebesgue(n: usize) -> Self {
        TorusMeasure { n, components: vec![TorusComponent::Lebesgue { value: 1.0, region: None }] }
    }

    pub fn lebesgue_on(region: &Region, value: f64) -> Result<Self> {
        let r = torus_region(region)?;
        TorusMeasure::new(r.dim(), vec![TorusComponent::Lebesgue { value, region: Some(r) }])
    }

    pub fn point_mass(location: Vec<f64>, weight: f64) -> Result<Self> {
        TorusMeasure::new(location.len(), vec![TorusComponent::PointMass { location, weight }])
    }

    pub fn hyperplane(n: usize, axis: Axis, offset: f64, d: f64) -> Result<Self> {
        TorusMeasure::new(n, vec![TorusComponent::HyperplaneLebesgue { axis, offset, d }])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[TorusComponent] {
        &self.components
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    pub fn plus(&self, other: &TorusMeasure) -> Result<TorusMeasure> {
        if other.n != self.n {
            return Err(Error::InvalidMeasure("dimensions differ".into()));
        }
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Ok(TorusMeasure { n: self.n, components })
    }
}

/// `μ = ∏|φ′(s_j)| ν ∘ Φ⁻¹` in the standard chart.
pub fn transport(nu: &TorusMeasure) -> Result<Measure> {
    transport_with(nu, Chart::STANDARD)
}

pub fn transport_with(nu: &TorusMeasure, chart: Chart) -> Result<Measure> {
    let n = nu.n;
    let mut out = Vec::new();
    for c in &nu.components {
        out.push(match c {
            TorusComponent::PointMass { location, weight } => {
                let t = location.iter().map(|&s| chart.to_line(s)).collect::<Result<Vec<_>>>()?;
                let jac: f64 = location.iter().map(|&s| chart.jacobian(s)).product();
                MeasureComponent::PointMass { location: t, weight: weight * jac }
            }
            TorusComponent::HyperplaneLebesgue { axis, offset, d } => MeasureComponent::HyperplaneLebesgue {
                axis: *axis,
                offset: chart.to_line(*offset)?,
                constant: d * chart.jacobian(*offset) / PI,
            },
            TorusComponent::Lebesgue { value, region } => {
                if region.is_some() && chart.shift != 0.0 {
                    return Err(Error::InvalidArgument("torus regions are defined through the standard chart".into()));
                }
                MeasureComponent::FullDensity {
                    density: Density::constant(*value),
                    region: region.as_ref().map(|r| r.preimage_of.clone()),
                }
            }
            TorusComponent::Transported { measure, shift } => {
                if *shift != chart.shift {
                    return Err(Error::InvalidArgument("transported component belongs to another chart".into()));
                }
                out.extend(measure.components().iter().cloned());
                continue;
            }
        });
    }
    Measure::new(n, out)
}

/// Inverse of [`transport`] in the standard chart.
pub fn inverse_transport(mu: &Measure) -> TorusMeasure {
    inverse_transport_with(mu, Chart::STANDARD)
}

pub fn inverse_transport_with(mu: &Measure, chart: Chart) -> TorusMeasure {
    let n = mu.n();
    let components = mu
        .components()
        .iter()
        .map(|c| match c {
            MeasureComponent::PointMass { location, weight } => {
                let s: Vec<f64> = location.iter().map(|&t| chart.from_line(t)).collect();
                let jac: f64 = s.iter().map(|&x| chart.jacobian(x)).product();
                TorusComponent::PointMass { location: s, weight: weight / jac }
            }
            MeasureComponent::HyperplaneLebesgue { axis, offset, constant } => {
                let p = chart.from_line(*offset);
                TorusComponent::HyperplaneLebesgue { axis: *axis, offset: p, d: constant * PI / chart.jacobian(p) }
            }
            MeasureComponent::FullDensity { density: Density::Constant { value }, region }
                if region.is_none() || chart.shift == 0.0 =>
            {
                TorusComponent::Lebesgue {
                    value: *value,
                    region: region.as_ref().map(|r| TorusRegion { preimage_of: r.clone() }),
                }
            }
            other => TorusComponent::Transported {
                measure: Measure::new(n, vec![other.clone()]).expect("component of a valid measure"),
                shift: chart.shift,
            },
        })
        .collect();
    TorusMeasure { n, components }
}

fn hyperplane_embed(n: usize, j: usize, p: f64, rest: &[f64]) -> Vec<f64> {
    let mut s = Vec::with_capacity(n);
    s.extend_from_slice(&rest[..j]);
    s.push(p);
    s.extend_from_slice(&rest[j..]);
    s
}

fn chart_weight(t: &[f64]) -> f64 {
    t.iter().map(|x| 2.0 / (1.0 + x * x)).product()
}

fn integrate_transported(
    g: &dyn Fn(&[f64]) -> Complex64,
    mu: &Measure,
    chart: Chart,
    cuts: &AxisCuts,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    let f = |t: &[f64]| {
        let s: Vec<f64> = t.iter().map(|&x| chart.from_line(x)).collect();
        g(&s) * chart_weight(t)
    };
    integrate_with(&f, mu, cuts, spec)
}

fn integrate_torus_component(
    g: &dyn Fn(&[f64]) -> Complex64,
    c: &TorusComponent,
    n: usize,
    cuts: &AxisCuts,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    let full = AxisMap::Interval(0.0, TAU);
    match c {
        TorusComponent::PointMass { location, weight } => IntegrationResult::exact(g(location) * *weight),
        TorusComponent::HyperplaneLebesgue { axis, offset, d } => {
            let j = axis.index();
            if n == 1 {
                return IntegrationResult::exact(g(&[*offset]) * *d);
            }
            let f = |rest: &[f64]| g(&hyperplane_embed(n, j, *offset, rest));
            integrate_box(&f, &vec![full; n - 1], &NoCrossings, spec).scale(*d)
        }
        TorusComponent::Lebesgue { value, region: None } => {
            integrate_box(g, &vec![full; n], &NoCrossings, spec).scale(*value)
        }
        TorusComponent::Lebesgue { value, region: Some(r) } => {
            let mu = Measure::lebesgue_on(r.preimage_of.clone(), *value).expect("validated region");
            integrate_transported(g, &mu, Chart::STANDARD, cuts, spec)
        }
        TorusComponent::Transported { measure, shift } => {
            integrate_transported(g, measure, Chart { shift: *shift }, cuts, spec)
        }
    }
}

/// `∫ g dν`.
pub fn integrate_torus(g: impl Fn(&[f64]) -> Complex64, nu: &TorusMeasure, spec: &QuadratureSpec) -> IntegrationResult {
    let cuts = AxisCuts { per_axis: vec![vec![]; nu.n] };
    nu.components
        .iter()
        .fold(IntegrationResult::zero(), |acc, c| acc + integrate_torus_component(&g, c, nu.n, &cuts, spec))
}

/// Multi-index `m` of a Fourier coefficient `∫ e^{i m·s} dν`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourierIndex {
    pub m: Vec<i64>,
}

impl FourierIndex {
    pub fn new(m: Vec<i64>) -> Self {
        FourierIndex { m }
    }

    /// Some entry positive and some entry negative.
    pub fn is_mixed(&self) -> bool {
        self.m.iter().any(|&x| x > 0) && self.m.iter().any(|&x| x < 0)
    }
}

fn phase(m: &[i64], s: &[f64]) -> Complex64 {
    let x: f64 = m.iter().zip(s).map(|(&k, &v)| k as f64 * v).sum();
    Complex64::from_polar(1.0, x)
}

/// `∫ e^{i m·s} dν`, in closed form for point masses, hyperplanes and full Lebesgue measure.
pub fn fourier_coefficient(nu: &TorusMeasure, m: &FourierIndex, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    if m.m.len() != nu.n {
        return Err(Error::InvalidArgument("Fourier index length differs from the dimension".into()));
    }
    let n = nu.n;
    let cuts = AxisCuts { per_axis: vec![vec![]; n] };
    let g = |s: &[f64]| phase(&m.m, s);
    let zero_count = |skip: Option<usize>| (0..n).filter(|&k| Some(k) != skip).all(|k| m.m[k] == 0);
    Ok(nu.components.iter().fold(IntegrationResult::zero(), |acc, c| {
        let part = match c {
            TorusComponent::HyperplaneLebesgue { axis, offset, d } => {
                let j = axis.index();
                let v = if zero_count(Some(j)) {
                    Complex64::from_polar(d * TAU.powi(n as i32 - 1), m.m[j] as f64 * offset)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                IntegrationResult::exact(v)
            }
            TorusComponent::Lebesgue { value, region: None } => {
                let v = if zero_count(None) { value * TAU.powi(n as i32) } else { 0.0 };
                IntegrationResult::exact(Complex64::new(v, 0.0))
            }
            other => integrate_torus_component(&g, other, n, &cuts, spec),
        };
        acc + part
    }))
}

/// As [`fourier_coefficient`], failing when the quadrature does not converge.
pub fn mixed_fourier_coefficient(nu: &TorusMeasure, m: &FourierIndex, spec: &QuadratureSpec) -> Result<Complex64> {
    Ok(fourier_coefficient(nu, m, spec)?.into_result()?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierEntry {
    pub m: FourierIndex,
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Mixed coefficients over `|m|∞ ≤ bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierScan {
    pub bound: u32,
    pub entries: Vec<FourierEntry>,
    pub max_abs: f64,
    pub note: String,
}

impl FourierScan {
    /// Every sampled mixed coefficient converged and is at most `tol` in modulus.
    pub fn vanishes(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.converged && e.value.norm() <= tol)
    }

    /// Some converged coefficient exceeds `tol` beyond its error estimate.
    pub fn certifies_nonzero(&self, tol: f64) -> bool {
        self.entries.iter().any(|e| e.converged && e.value.norm() > tol + e.error)
    }
}

/// All mixed indices with `|m|∞ ≤ bound`, in lexicographic order.
pub fn mixed_indices(n: usize, bound: u32) -> Vec<FourierIndex> {
    let b = bound as i64;
    let side = (2 * b + 1) as usize;
    let total = side.pow(n as u32);
    (0..total)
        .map(|mut k| {
            let mut m = vec![0i64; n];
            for slot in m.iter_mut().rev() {
                *slot = (k % side) as i64 - b;
                k /= side;
            }
            FourierIndex::new(m)
        })
        .filter(FourierIndex::is_mixed)
        .collect()
}

pub fn fourier_scan(nu: &TorusMeasure, bound: u32, spec: &QuadratureSpec) -> Result<FourierScan> {
    let entries = mixed_indices(nu.n, bound)
        .into_par_iter()
        .map(|m| {
            let r = fourier_coefficient(nu, &m, spec)?;
            Ok(FourierEntry { m, value: r.value, error: r.error, converged: r.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_abs = entries.iter().map(|e| e.value.norm()).fold(0.0, f64::max);
    Ok(FourierScan { bound, entries, max_abs, note: format!("sampled: mixed indices with |m|∞ ≤ {bound} only") })
}

/// `2∏(1 − w_ℓ e^{−i s_ℓ})^{−1} − 1`.
pub fn disk_kernel(w: &DiskPoint, s: &[f64]) -> Complex64 {
    let prod: Complex64 =
        w.coords().iter().zip(s).map(|(wl, &sl)| 1.0 / (1.0 - wl * Complex64::from_polar(1.0, -sl))).product();
    2.0 * prod - 1.0
}

/// `(e^{ip} + w)/(e^{ip} − w)`.
fn herglotz_factor(p: f64, w: Complex64) -> Complex64 {
    let e = Complex64::from_polar(1.0, p);
    (e + w) / (e - w)
}

/// `i·imag_at_zero + (2π)^{−n} ∫ (2∏(1 − w_ℓ e^{−is_ℓ})^{−1} − 1) dν(s)`.
pub fn disk_evaluate(nu: &TorusMeasure, imag_at_zero: f64, w: &DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
    let n = nu.n;
    if w.dim() != n {
        return Err(Error::InvalidArgument("disk point dimension differs from the measure's".into()));
    }
    let cuts = AxisCuts { per_axis: vec![vec![]; n] };
    let g = |s: &[f64]| disk_kernel(w, s);
    let vol = TAU.powi(n as i32);
    let total = nu.components.iter().fold(IntegrationResult::zero(), |acc, c| {
        let part = match c {
            TorusComponent::HyperplaneLebesgue { axis, offset, d } => IntegrationResult::exact(
                herglotz_factor(*offset, w.coords()[axis.index()]) * (d * TAU.powi(n as i32 - 1)),
            ),
            TorusComponent::Lebesgue { value, region: None } => {
                IntegrationResult::exact(Complex64::new(value * vol, 0.0))
            }
            other => integrate_torus_component(&g, other, n, &cuts, spec),
        };
        acc + part
    });
    Ok(Complex64::new(0.0, imag_at_zero) + total.into_result()?.value / vol)
}

/// Splitting of `ν` along `A_j(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusRestriction {
    /// `d` with `ν|_{A_j(p)} = d·λ`.
    pub d: f64,
    pub remainder: TorusMeasure,
    /// Mass on `A_j(p)` not of the form `d·λ`: impossible for a measure with
    /// vanishing mixed coefficients.
    pub non_lebesgue: bool,
}

fn same_angle(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d) <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Splits off `ν|_{A_j(p)}` symbolically.
pub fn restrict_torus(nu: &TorusMeasure, axis: Axis, p: f64) -> Result<TorusRestriction> {
    axis.check(nu.n)?;
    if !p.is_finite() {
        return Err(Error::InvalidArgument("angle must be finite".into()));
    }
    let j = axis.index();
    let mut d = 0.0;
    let mut non_lebesgue = false;
    let mut rest = Vec::new();
    for c in &nu.components {
        match c {
            TorusComponent::PointMass { location, weight } if *weight > 0.0 && same_angle(location[j], p) => {
                if nu.n == 1 {
                    d += weight;
                } else {
                    non_lebesgue = true;
                }
            }
            TorusComponent::HyperplaneLebesgue { axis: a, offset, d: dc } if *a == axis && same_angle(*offset, p) => {
                d += dc;
            }
            TorusComponent::Transported { measure, shift } => {
                let chart = Chart { shift: *shift };
                match chart.to_line(p) {
                    // The seam is the image of t_j = ±∞, which carries no mass.
                    Err(_) => rest.push(c.clone()),
                    Ok(t) => {
                        let r = restrict_to_hyperplane(measure, axis, t)?;
                        d += r.constant * PI / chart.jacobian(p);
                        non_lebesgue |= r.non_lebesgue;
                        if !r.remainder.is_trivial() {
                            rest.push(TorusComponent::Transported { measure: r.remainder, shift: *shift });
                        }
                    }
                }
            }
            other => rest.push(other.clone()),
        }
    }
    Ok(TorusRestriction { d, remainder: TorusMeasure { n: nu.n, components: rest }, non_lebesgue })
}

/// One summand `(d/2π)·(e^{ip} + w_j)/(e^{ip} − w_j)` split off the disk representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeTerm {
    pub axis: Axis,
    pub location: f64,
    pub d: f64,
}

impl BlaschkeTerm {
    /// The factor in front of the Herglotz term under the `(2π)^{−n}` normalization.
    pub fn coefficient(&self) -> f64 {
        self.d / TAU
    }

    pub fn eval(&self, w: &DiskPoint) -> Complex64 {
        herglotz_factor(self.location, w.coords()[self.axis.index()]) * self.coefficient()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeDecomposition {
    pub terms: Vec<BlaschkeTerm>,
    pub remainder: TorusMeasure,
    pub imag_at_zero: f64,
}

impl BlaschkeDecomposition {
    pub fn evaluate(&self, w: &DiskPoint, spec: &QuadratureSpec) -> Result<Complex64> {
        let head: Complex64 = self.terms.iter().map(|t| t.eval(w)).sum();
        Ok(head + disk_evaluate(&self.remainder, self.imag_at_zero, w, spec)?)
    }
}

pub fn blaschke_decompose(
    nu: &TorusMeasure,
    imag_at_zero: f64,
    pairs: &[(Axis, f64)],
) -> Result<BlaschkeDecomposition> {
    for (k, (a, p)) in pairs.iter().enumerate() {
        if pairs[..k].iter().any(|(b, q)| a == b && same_angle(*p, *q)) {
            return Err(Error::InvalidArgument(format!("pair ({a}, {p}) listed twice")));
        }
    }
    let mut remainder = nu.clone();
    let mut terms = Vec::new();
    for &(axis, p) in pairs {
        let r = restrict_torus(&remainder, axis, p)?;
        if r.non_lebesgue {
            return Err(Error::NotNevanlinna(format!("mass on A_{axis}({p}) is not a multiple of Lebesgue measure")));
        }
        if r.d != 0.0 {
            terms.push(BlaschkeTerm { axis, location: p, d: r.d });
        }
        remainder = r.remainder;
    }
    Ok(BlaschkeDecomposition { terms, remainder, imag_at_zero })
}

/// `∫_{[ε, 2π)ⁿ} ∏ s_j^{−2} dν`.
pub fn torus_mass_divergence(nu: &TorusMeasure, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < PI) {
        return Err(Error::InvalidArgument("eps must lie in (0, π)".into()));
    }
    let n = nu.n;
    let line_integral = 1.0 / eps - 1.0 / TAU;
    let weight = |s: &[f64]| {
        if s.iter().all(|&x| x >= eps) {
            Complex64::new(s.iter().map(|x| x.powi(-2)).product(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let spec = QuadratureSpec::default();
    let edge = cayley(eps)?;
    let cuts = AxisCuts { per_axis: vec![vec![edge]; n] };
    let mut total = IntegrationResult::zero();
    for c in &nu.components {
        let part = match c {
            TorusComponent::PointMass { location, weight: w } => IntegrationResult::exact(weight(location) * *w),
            TorusComponent::HyperplaneLebesgue { offset, d, .. } => {
                let p = offset.rem_euclid(TAU);
                let v = if p >= eps { d * p.powi(-2) * line_integral.powi(n as i32 - 1) } else { 0.0 };
                IntegrationResult::exact(Complex64::new(v, 0.0))
            }
            TorusComponent::Lebesgue { value, region: None } => {
                IntegrationResult::exact(Complex64::new(value * line_integral.powi(n as i32), 0.0))
            }
            TorusComponent::Lebesgue { value, region: Some(r) } => {
                let mu = Measure::lebesgue_on(r.preimage_of.clone(), *value)?;
                integrate_transported(&weight, &mu, Chart::STANDARD, &cuts, &spec)
            }
            TorusComponent::Transported { measure, shift } => {
                let chart = Chart { shift: *shift };
                let cuts = AxisCuts { per_axis: vec![vec![chart.to_line(eps)?]; n] };
                integrate_transported(&weight, measure, chart, &cuts, &spec)
            }
        };
        total = total + part;
    }
    Ok(total.into_result()?.value.re)
}

/// The image `s₂` of the line `t₂ = k t₁ + m` over `s₁`: `2·arccot(k cot(s₁/2) − m)`.
pub fn torus_curve(k: f64, m: f64, s1: f64) -> Result<f64> {
    if k == 0.0 || !k.is_finite() || !m.is_finite() {
        return Err(Error::InvalidArgument("torus curve needs finite k ≠ 0 and finite m".into()));
    }
    let t1 = cayley(s1)?;
    Ok(cayley_inverse(k * t1 + m))
}

/// `w_j = (z_j − i)/(z_j + i)`.
pub fn disk_point_of(z: &HalfPlanePoint) -> DiskPoint {
    let i = Complex64::new(0.0, 1.0);
    DiskPoint::new(z.coords().iter().map(|zj| (zj - i) / (zj + i)).collect()).expect("Cayley image lies in the disk")
}

/// `z_j = i(1 + w_j)/(1 − w_j)`.
pub fn half_plane_point_of(w: &DiskPoint) -> HalfPlanePoint {
    let i = Complex64::new(0.0, 1.0);
    HalfPlanePoint::new(w.coords().iter().map(|wj| i * (1.0 + wj) / (1.0 - wj)).collect())
        .expect("inverse Cayley image lies in the half-plane")
}

/// Half-plane data `q = i·f∘w` of the disk function `f` represented by `(ν, imag_at_zero)`,
/// for ν without mass on the seams.
pub fn half_plane_params(nu: &TorusMeasure, imag_at_zero: f64) -> Result<RepresentationParams> {
    RepresentationParams::new(-imag_at_zero, vec![0.0; nu.n], transport(nu)?)
}

/// Verdict for `Φ⁻¹(region)`, lifted from the half-plane classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusVerdict {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_example: Option<TorusMeasure>,
}

pub fn classify_torus(region: &TorusRegion) -> Result<TorusVerdict> {
    let mut v = classify(&region.preimage_of)?;
    let mut torus_example = None;
    match v.kind {
        VerdictKind::Forbidden => {
            let lifted = match v.citation.as_str() {
                "Thm 3.23" => "Coro 4.5",
                "Thm 3.11" | "Thm 3.14" | "Coro 3.21" => "Coro 4.6",
                _ => "Thm 4.1",
            };
            v.notes.push(format!("lifted from {}", v.citation));
            if lifted == "Coro 4.6" {
                v.notes.push("requires ν to vanish on the seams {s_j = 0}".into());
            }
            v.citation = lifted.into();
        }
        VerdictKind::KnownAdmissible => {
            torus_example = v.example.as_ref().map(inverse_transport);
        }
        VerdictKind::Undecided => {}
    }
    Ok(TorusVerdict { verdict: v, torus_example })
}

/// `∫ g(Φ⁻¹ t) ∏ 2/(1+t²) dμ(t)` for a half-plane measure, i.e. `∫ g d(inverse_transport μ)`.
pub fn integrate_pulled_back(
    g: impl Fn(&[f64]) -> Complex64,
    mu: &Measure,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    integrate(|t| g(&t.iter().map(|&x| cayley_inverse(x)).collect::<Vec<_>>()) * chart_weight(t), mu, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::evaluate;
    use crate::measure::{catalog, truncated_mass};
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn chart_values() {
        assert!(cayley(PI).unwrap().abs() < 1e-15);
        assert!((cayley(FRAC_PI_2).unwrap() + 1.0).abs() < 1e-15);
        assert!((cayley_jacobian(PI) - 0.5).abs() < 1e-15);
        assert!(matches!(cayley(0.0), Err(Error::Seam(_))));
        assert!(Chart::SHIFTED.to_line(0.0).is_ok());
        for t in [-3.0, -0.2, 0.0, 1.5, 40.0] {
            let s = cayley_inverse(t);
            assert!(s > 0.0 && s < TAU);
            assert!((cayley(s).unwrap() - t).abs() < 1e-12 * t.abs().max(1.0));
            let u = Chart::SHIFTED.from_line(t);
            assert!((Chart::SHIFTED.to_line(u).unwrap() - t).abs() < 1e-12 * t.abs().max(1.0));
        }
    }

    #[test]
    fn transport_examples() {
        assert_eq!(transport(&TorusMeasure::lebesgue(2)).unwrap(), Measure::lebesgue(2));
        let mu = transport(&TorusMeasure::point_mass(vec![PI], TAU).unwrap()).unwrap();
        let MeasureComponent::PointMass { location, weight } = &mu.components()[0] else { panic!() };
        assert!(location[0].abs() < 1e-15 && (weight - PI).abs() < 1e-14);
        assert!(matches!(transport(&TorusMeasure::point_mass(vec![0.0], 1.0).unwrap()), Err(Error::Seam(_))));
        assert!(transport_with(&TorusMeasure::point_mass(vec![0.0], 1.0).unwrap(), Chart::SHIFTED).is_ok());
    }

    #[test]
    fn round_trip_preserves_truncated_mass() {
        for mu in [
            catalog::pi_delta_zero(),
            Measure::hyperplane(2, Axis::new(1), 2.0, 3.0).unwrap(),
            catalog::anti_diagonal(),
        ] {
            let back = transport(&inverse_transport(&mu)).unwrap();
            for r in [0.5, 3.0] {
                assert!((truncated_mass(&mu, r) - truncated_mass(&back, r)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fourier_examples() {
        let m = FourierIndex::new(vec![1, -1]);
        assert!(m.is_mixed() && !FourierIndex::new(vec![1, 0]).is_mixed());
        assert_eq!(mixed_fourier_coefficient(&TorusMeasure::lebesgue(2), &m, &spec()).unwrap(), c(0.0, 0.0));
        let point = TorusMeasure::point_mass(vec![0.0, 0.0], TAU * TAU).unwrap();
        assert!((mixed_fourier_coefficient(&point, &m, &spec()).unwrap() - TAU * TAU).norm() < 1e-12);
        let anti = inverse_transport(&catalog::anti_diagonal());
        assert!(mixed_fourier_coefficient(&anti, &m, &spec()).unwrap().norm() < 1e-4);
        assert_eq!(mixed_indices(2, 1).len(), 2);
    }

    #[test]
    fn disk_examples() {
        let w = DiskPoint::new(vec![c(0.3, -0.2)]).unwrap();
        assert!((disk_evaluate(&TorusMeasure::lebesgue(1), 0.0, &w, &spec()).unwrap() - 1.0).norm() < 1e-12);
        let nu = TorusMeasure::point_mass(vec![PI], TAU).unwrap();
        let want = herglotz_factor(PI, w.coords()[0]);
        assert!((disk_evaluate(&nu, 0.0, &w, &spec()).unwrap() - want).norm() < 1e-12);
        let zero = DiskPoint::new(vec![c(0.0, 0.0); 2]).unwrap();
        let nu = TorusMeasure::point_mass(vec![1.0, 2.0], 5.0).unwrap();
        assert!((disk_evaluate(&nu, 0.7, &zero, &spec()).unwrap() - c(5.0 / (TAU * TAU), 0.7)).norm() < 1e-12);
    }

    #[test]
    fn transported_lebesgue_matches_closed_form() {
        let nu = TorusMeasure {
            n: 1,
            components: vec![TorusComponent::Transported { measure: Measure::lebesgue(1), shift: 0.0 }],
        };
        let w = DiskPoint::new(vec![c(0.5, 0.1)]).unwrap();
        assert!((disk_evaluate(&nu, 0.0, &w, &spec()).unwrap() - 1.0).norm() < 1e-7);
    }

    #[test]
    fn restriction_examples() {
        let h = TorusMeasure::hyperplane(2, Axis::new(1), PI, 2.0).unwrap();
        assert_eq!(restrict_torus(&h, Axis::new(1), PI).unwrap().d, 2.0);
        let r = restrict_torus(&TorusMeasure::lebesgue(2), Axis::new(2), 1.0).unwrap();
        assert_eq!(r.d, 0.0);
        assert!(!r.non_lebesgue);
        let point = TorusMeasure::point_mass(vec![0.0, 0.0], TAU * TAU).unwrap();
        assert!(restrict_torus(&point, Axis::new(1), 0.0).unwrap().non_lebesgue);
        // Half-plane constant c at t = φ(p) corresponds to d = cπ(1 − cos p).
        let p = 2.0;
        let mu = Measure::hyperplane(2, Axis::new(1), cayley(p).unwrap(), 3.0).unwrap();
        let nu =
            TorusMeasure { n: 2, components: vec![TorusComponent::Transported { measure: mu.clone(), shift: 0.0 }] };
        let d = restrict_torus(&nu, Axis::new(1), p).unwrap().d;
        assert!((d - 3.0 * PI * (1.0 - p.cos())).abs() < 1e-12);
        let explicit = restrict_torus(&inverse_transport(&mu), Axis::new(1), p).unwrap().d;
        assert!((d - explicit).abs() < 1e-12);
    }

    #[test]
    fn blaschke_examples() {
        let w = DiskPoint::new(vec![c(0.2, 0.4)]).unwrap();
        let dec =
            blaschke_decompose(&TorusMeasure::point_mass(vec![PI], TAU).unwrap(), 0.0, &[(Axis::new(1), PI)]).unwrap();
        assert_eq!(dec.terms.len(), 1);
        assert!(dec.remainder.is_trivial());
        assert!((dec.terms[0].eval(&w) - herglotz_factor(PI, w.coords()[0])).norm() < 1e-15);
        let dec = blaschke_decompose(&TorusMeasure::lebesgue(2), 0.0, &[(Axis::new(1), 1.0)]).unwrap();
        assert!(dec.terms.is_empty());
        assert_eq!(dec.remainder, TorusMeasure::lebesgue(2));
        assert!(
            blaschke_decompose(&TorusMeasure::lebesgue(2), 0.0, &[(Axis::new(1), 1.0), (Axis::new(1), 1.0)]).is_err()
        );
    }

    #[test]
    fn mass_divergence() {
        let v = torus_mass_divergence(&TorusMeasure::lebesgue(1), 0.1).unwrap();
        assert!((v - (10.0 - 1.0 / TAU)).abs() < 1e-12);
        assert_eq!(torus_mass_divergence(&TorusMeasure::trivial(2), 0.1).unwrap(), 0.0);
        let a = torus_mass_divergence(&TorusMeasure::lebesgue(2), 0.01).unwrap();
        let b = torus_mass_divergence(&TorusMeasure::lebesgue(2), 0.001).unwrap();
        assert!((b / a - 100.0).abs() < 1.0);
        let lazy = TorusMeasure {
            n: 1,
            components: vec![TorusComponent::Transported { measure: Measure::lebesgue(1), shift: 0.0 }],
        };
        assert!((torus_mass_divergence(&lazy, 0.1).unwrap() - v).abs() < 1e-6);
    }

    #[test]
    fn curve_examples() {
        for s in [0.3, 1.0, PI, 5.0] {
            assert!((torus_curve(1.0, 0.0, s).unwrap() - s).abs() < 1e-12);
            assert!((torus_curve(-1.0, 0.0, s).unwrap() - (TAU - s)).abs() < 1e-12);
        }
        assert!((torus_curve(1.0, 1.0, PI).unwrap() - 1.5 * PI).abs() < 1e-12);
        assert!(torus_curve(0.0, 1.0, 1.0).is_err());
        assert!(matches!(torus_curve(1.0, 0.0, 0.0), Err(Error::Seam(_))));
    }

    #[test]
    fn half_plane_correspondence() {
        let nu = TorusMeasure::point_mass(vec![PI], TAU).unwrap().plus(&TorusMeasure::lebesgue(1)).unwrap();
        let params = half_plane_params(&nu, 0.3).unwrap();
        for z in [c(0.5, 1.0), c(-2.0, 0.3)] {
            let z = HalfPlanePoint::new(vec![z]).unwrap();
            let q = evaluate(&params, &z, &spec()).unwrap();
            let f = disk_evaluate(&nu, 0.3, &disk_point_of(&z), &spec()).unwrap();
            assert!((q - c(0.0, 1.0) * f).norm() < 1e-7, "{q} vs {f}");
        }
    }

    #[test]
    fn torus_verdicts() {
        let v = classify_torus(&torus_region(&Region::line(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(v.verdict.citation, "Coro 4.6");
        let v = classify_torus(&torus_region(&Region::first_orthant(2)).unwrap()).unwrap();
        assert_eq!(v.verdict.citation, "Coro 4.5");
        let v = classify_torus(&torus_region(&Region::line(-1.0, 0.0)).unwrap()).unwrap();
        assert!(v.torus_example.is_some());
    }

    #[test]
    fn json_round_trip() {
        let nu = TorusMeasure::lebesgue_on(&Region::first_orthant(2), 1.0)
            .unwrap()
            .plus(&TorusMeasure::hyperplane(2, Axis::new(2), 1.0, 0.5).unwrap())
            .unwrap();
        let text = serde_json::to_string(&nu).unwrap();
        assert_eq!(serde_json::from_str::<TorusMeasure>(&text).unwrap(), nu);
        assert!(serde_json::from_str::<TorusMeasure>(
            r#"{"n":1,"components":[{"kind":"point_mass","location":[1],"weight":-1}]}"#
        )
        .is_err());
    }
}
