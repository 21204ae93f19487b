//! Adaptive Gauss-Kronrod quadrature over boxes, half-open tori and all of ℝᵏ.
//!
//! Unbounded axes are compactified with `t = tan θ`, so integrands decaying like
//! `(1+t²)^{-1}` become bounded on `(-π/2, π/2)`. Multi-dimensional integrals are
//! iterated: every outer node triggers a full adaptive inner integration, and the
//! inner error estimates are integrated along with the values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// How an unbounded axis is handled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truncation {
    /// `t = tan θ` on `(-π/2, π/2)`; exact for integrable tails.
    Compactify,
    /// Integrate over `[-half_width, half_width]` only. Meant for integrands that
    /// do not decay; the result is then the windowed integral.
    Window { half_width: f64 },
}

/// Tolerances and refinement limits for every numeric integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
    pub truncation: Truncation,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { abs_tol: 1e-9, rel_tol: 1e-8, max_depth: 40, truncation: Truncation::Compactify }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        let spec = QuadratureSpec { abs_tol, rel_tol, max_depth, truncation: Truncation::Compactify };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// Same spec with both tolerances multiplied by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.abs_tol *= factor;
        self.rel_tol *= factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok_tol = |x: f64| x.is_finite() && x > 0.0;
        if !ok_tol(self.abs_tol) || !ok_tol(self.rel_tol) {
            return Err(Error::InvalidSpec("tolerances must be finite and positive".into()));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidSpec("max depth must be at least 1".into()));
        }
        if let Truncation::Window { half_width } = self.truncation {
            if !(half_width.is_finite() && half_width > 0.0) {
                return Err(Error::InvalidSpec("window half width must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Value, error estimate and bookkeeping of one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: u64,
}

impl IntegrationResult {
    pub fn zero() -> Self {
        IntegrationResult { value: Complex64::new(0.0, 0.0), error: 0.0, converged: true, evaluations: 0 }
    }

    /// An exactly known value (point evaluations).
    pub fn exact(value: Complex64) -> Self {
        IntegrationResult { value, error: 0.0, converged: value.re.is_finite() && value.im.is_finite(), evaluations: 1 }
    }

    pub fn scale(self, factor: f64) -> Self {
        IntegrationResult {
            value: self.value * factor,
            error: self.error * factor.abs(),
            converged: self.converged,
            evaluations: self.evaluations,
        }
    }

    /// Into a `Result`, failing when the quadrature did not converge.
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence { value: self.value, error: self.error })
        }
    }
}

/// Sum of two results; order of accumulation is the caller's responsibility.
impl std::ops::Add for IntegrationResult {
    type Output = IntegrationResult;
    fn add(self, other: IntegrationResult) -> IntegrationResult {
        IntegrationResult {
            value: self.value + other.value,
            error: self.error + other.error,
            converged: self.converged && other.converged,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// A straight line `base + λ·dir` in some coordinate space. Coordinates that are
/// not yet known (inner integration variables) are NaN in `base`.
#[derive(Debug, Clone)]
pub struct Line {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
}

impl Line {
    /// Line along coordinate axis `axis` through `point`, parametrized so that
    /// `λ` equals the coordinate value itself.
    pub fn axis_through(point: &[f64], axis: usize) -> Line {
        let mut base = point.to_vec();
        base[axis] = 0.0;
        let mut dir = vec![0.0; point.len()];
        dir[axis] = 1.0;
        Line { base, dir }
    }

    /// Is the direction a multiple of a single unit vector? Returns that axis.
    pub fn single_axis(&self) -> Option<usize> {
        let mut found = None;
        for (i, &d) in self.dir.iter().enumerate() {
            if d != 0.0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

/// Dot product that skips zero coefficients, so unknown (NaN) coordinates only
/// poison the result when they actually matter.
pub(crate) fn sparse_dot(coeffs: &[f64], x: &[f64]) -> f64 {
    coeffs.iter().zip(x).filter(|(c, _)| **c != 0.0).map(|(c, v)| c * v).sum()
}

/// Parameter values where a line crosses a non-smooth locus of an integrand:
/// region boundaries, truncation box faces, singular hyperplanes.
pub trait Crossings {
    fn crossings(&self, line: &Line, out: &mut Vec<f64>);
}

/// No known kinks.
pub struct NoCrossings;

impl Crossings for NoCrossings {
    fn crossings(&self, _line: &Line, _out: &mut Vec<f64>) {}
}

/// Union of several crossing sources.
pub struct CrossingSet<'a>(pub Vec<&'a dyn Crossings>);

impl Crossings for CrossingSet<'_> {
    fn crossings(&self, line: &Line, out: &mut Vec<f64>) {
        for c in &self.0 {
            c.crossings(line, out);
        }
    }
}

/// Axis-aligned hyperplanes `t_axis = value`, e.g. the faces of a truncation box.
#[derive(Debug, Clone, Default)]
pub struct AxisCuts {
    pub per_axis: Vec<Vec<f64>>,
}

impl AxisCuts {
    pub fn cube(n: usize, half_width: f64) -> Self {
        AxisCuts { per_axis: vec![vec![-half_width, half_width]; n] }
    }
}

impl Crossings for AxisCuts {
    fn crossings(&self, line: &Line, out: &mut Vec<f64>) {
        for (i, cuts) in self.per_axis.iter().enumerate() {
            let d = line.dir[i];
            if d == 0.0 {
                continue;
            }
            for &c in cuts {
                out.push((c - line.base[i]) / d);
            }
        }
    }
}

/// Hyperplane `normal · t = offset`.
pub(crate) fn hyperplane_crossing(normal: &[f64], offset: f64, line: &Line, out: &mut Vec<f64>) {
    let slope = sparse_dot(normal, &line.dir);
    if slope == 0.0 {
        return;
    }
    out.push((offset - sparse_dot(normal, &line.base)) / slope);
}

// Kronrod 15-point abscissae and weights; the Gauss 7-point rule uses the odd
// indexed abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Hard cap on live subintervals per one-dimensional integration.
const MAX_SEGMENTS: usize = 2000;

/// One integrand sample: the value plus any error it already carries (from an
/// inner integration).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: u64,
}

impl Sample {
    pub fn point(value: Complex64) -> Self {
        Sample { value, error: 0.0, converged: true, evaluations: 1 }
    }

    fn from_inner(r: IntegrationResult, jac: f64) -> Self {
        Sample { value: r.value * jac, error: r.error * jac, converged: r.converged, evaluations: r.evaluations }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    depth: u32,
    value: Complex64,
    error: f64,
    inner_error: f64,
}

struct RuleOutput {
    segment: Segment,
    finite: bool,
    converged: bool,
    evaluations: u64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err;
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * resabs;
        if min_err > e {
            e = min_err;
        }
    }
    e
}

fn gk15<F: FnMut(f64) -> Sample>(f: &mut F, a: f64, b: f64, depth: u32) -> RuleOutput {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [Sample::point(Complex64::new(0.0, 0.0)); 15];
    fv[7] = f(center);
    for k in 0..7 {
        let dx = half * XGK[k];
        fv[k] = f(center - dx);
        fv[14 - k] = f(center + dx);
    }
    let weight = |i: usize| WGK[if i <= 7 { i } else { 14 - i }];
    let mut kron = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = 0.0;
    let mut inner_error = 0.0;
    let mut finite = true;
    let mut converged = true;
    let mut evaluations = 0;
    for (i, s) in fv.iter().enumerate() {
        let w = weight(i);
        kron += s.value * w;
        resabs += w * s.value.norm();
        inner_error += w * s.error;
        finite &= s.value.re.is_finite() && s.value.im.is_finite();
        converged &= s.converged;
        evaluations += s.evaluations;
        // Odd positions (including the center) carry the Gauss nodes.
        if i % 2 == 1 {
            gauss += s.value * WG[(if i <= 7 { i } else { 14 - i }) / 2];
        }
    }
    let mean = kron * 0.5;
    let resasc: f64 = fv.iter().enumerate().map(|(i, s)| weight(i) * (s.value - mean).norm()).sum();
    let err = rescale_error((kron - gauss).norm() * half.abs(), resabs * half.abs(), resasc * half.abs());
    RuleOutput {
        segment: Segment { a, b, depth, value: kron * half, error: err, inner_error: inner_error * half.abs() },
        finite,
        converged,
        evaluations,
    }
}

/// Globally adaptive integration of `f` over the consecutive pieces
/// `[cuts[0], cuts[1]], [cuts[1], cuts[2]], ...`.
pub(crate) fn adaptive_1d<F: FnMut(f64) -> Sample>(
    mut f: F,
    cuts: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_depth: u32,
) -> IntegrationResult {
    let mut segs: Vec<Segment> = Vec::new();
    let mut evaluations = 0u64;
    let mut samples_ok = true;
    for w in cuts.windows(2) {
        if !(w[1] > w[0]) {
            continue;
        }
        let out = gk15(&mut f, w[0], w[1], 0);
        evaluations += out.evaluations;
        samples_ok &= out.converged;
        if !out.finite {
            return singular(evaluations);
        }
        segs.push(out.segment);
    }
    loop {
        let total: Complex64 = segs.iter().map(|s| s.value).sum();
        let rule_err: f64 = segs.iter().map(|s| s.error).sum();
        let inner_err: f64 = segs.iter().map(|s| s.inner_error).sum();
        let tol = abs_tol.max(rel_tol * total.norm());
        let err = rule_err + inner_err;
        let done = IntegrationResult { value: total, error: err, converged: false, evaluations };
        if err <= tol {
            return IntegrationResult { converged: samples_ok, ..done };
        }
        // Refining the outer rule cannot reduce inner error.
        if rule_err <= 0.25 * tol || segs.len() >= MAX_SEGMENTS {
            return done;
        }
        let worst = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < max_depth)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            return done;
        };
        let s = segs[i];
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            segs[i].depth = max_depth;
            continue;
        }
        let left = gk15(&mut f, s.a, mid, s.depth + 1);
        let right = gk15(&mut f, mid, s.b, s.depth + 1);
        evaluations += left.evaluations + right.evaluations;
        samples_ok &= left.converged && right.converged;
        if !left.finite || !right.finite {
            return singular(evaluations);
        }
        // Keep segments in position order so the final sum is deterministic.
        segs.splice(i..=i, [left.segment, right.segment]);
    }
}

fn singular(evaluations: u64) -> IntegrationResult {
    IntegrationResult { value: Complex64::new(f64::NAN, f64::NAN), error: f64::INFINITY, converged: false, evaluations }
}

/// Coordinate handling of one integration axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum AxisMap {
    /// `t = tan θ`, θ ∈ (-π/2, π/2).
    Tan,
    /// Identity on `[lo, hi]`.
    Interval(f64, f64),
}

impl AxisMap {
    pub fn for_spec(spec: &QuadratureSpec) -> AxisMap {
        match spec.truncation {
            Truncation::Compactify => AxisMap::Tan,
            Truncation::Window { half_width } => AxisMap::Interval(-half_width, half_width),
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            AxisMap::Tan => (-FRAC_PI_2, FRAC_PI_2),
            AxisMap::Interval(lo, hi) => (lo, hi),
        }
    }

    /// Physical coordinate and jacobian at the quadrature variable `u`.
    fn map(&self, u: f64) -> (f64, f64) {
        match self {
            AxisMap::Tan => {
                let c = u.cos();
                (u.tan(), 1.0 / (c * c))
            }
            AxisMap::Interval(..) => (u, 1.0),
        }
    }

    fn to_u(self, t: f64) -> f64 {
        match self {
            AxisMap::Tan => t.atan(),
            AxisMap::Interval(..) => t,
        }
    }
}

/// Iterated adaptive integration of `f` over the product of `axes`.
pub(crate) fn integrate_box(
    f: &dyn Fn(&[f64]) -> Complex64,
    axes: &[AxisMap],
    crossings: &dyn Crossings,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    let mut point = vec![f64::NAN; axes.len()];
    level(f, axes, crossings, spec, 0, &mut point, spec.abs_tol, spec.rel_tol)
}

#[allow(clippy::too_many_arguments)]
fn level(
    f: &dyn Fn(&[f64]) -> Complex64,
    axes: &[AxisMap],
    crossings: &dyn Crossings,
    spec: &QuadratureSpec,
    d: usize,
    point: &mut [f64],
    abs_tol: f64,
    rel_tol: f64,
) -> IntegrationResult {
    for x in point[d..].iter_mut() {
        *x = f64::NAN;
    }
    let axis = axes[d];
    let (lo, hi) = axis.range();
    let mut raw = Vec::new();
    crossings.crossings(&Line::axis_through(point, d), &mut raw);
    let mut cuts: Vec<f64> =
        raw.into_iter().filter(|t| t.is_finite()).map(|t| axis.to_u(t)).filter(|&u| u > lo && u < hi).collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let last = d + 1 == axes.len();
    // Inner tolerances: the integrated inner error stays below a quarter of the
    // outer budget.
    let inner_scale = 4.0 * (hi - lo);
    adaptive_1d(
        |u| {
            let (t, jac) = axis.map(u);
            point[d] = t;
            if last {
                Sample::point(f(point) * jac)
            } else if jac.is_finite() {
                let inner_abs = abs_tol / (inner_scale * jac);
                let inner = level(f, axes, crossings, spec, d + 1, point, inner_abs, 0.25 * rel_tol);
                Sample::from_inner(inner, jac)
            } else {
                Sample::point(Complex64::new(f64::NAN, 0.0))
            }
        },
        &cuts,
        abs_tol,
        rel_tol,
        spec.max_depth,
    )
}

/// One-dimensional integral of `f` over ℝ (or the window), with extra breakpoints.
pub fn integrate_line(f: impl Fn(f64) -> Complex64, breakpoints: &[f64], spec: &QuadratureSpec) -> IntegrationResult {
    let cuts = AxisCuts { per_axis: vec![breakpoints.to_vec()] };
    integrate_box(&|t: &[f64]| f(t[0]), &[AxisMap::for_spec(spec)], &cuts, spec)
}

/// One-dimensional integral over a bounded interval.
pub fn integrate_interval(
    f: impl Fn(f64) -> Complex64,
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> IntegrationResult {
    let cuts = AxisCuts { per_axis: vec![breakpoints.to_vec()] };
    integrate_box(&|t: &[f64]| f(t[0]), &[AxisMap::Interval(lo, hi)], &cuts, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn lorentzian_over_the_line() {
        let r = integrate_line(|t| c(1.0 / (1.0 + t * t)), &[], &QuadratureSpec::default());
        assert!(r.converged);
        assert!((r.value.re - PI).abs() < 1e-9);
    }

    #[test]
    fn conjugate_square_integrates_to_zero() {
        for z in [Complex64::new(0.0, 1.0), Complex64::new(1.0, 2.0)] {
            let r = integrate_line(|t| (c(t) - z.conj()).powi(-2), &[], &QuadratureSpec::default());
            assert!(r.converged);
            assert!(r.value.norm() < 1e-9, "{:?}", r);
        }
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let spec = QuadratureSpec::default();
        let r = integrate_line(|t| c(if t.abs() <= 3.0 { 1.0 } else { 0.0 }), &[-3.0, 3.0], &spec);
        assert!((r.value.re - 6.0).abs() < 1e-10);
    }

    #[test]
    fn product_integral_in_two_dimensions() {
        let spec = QuadratureSpec::default();
        let f = |t: &[f64]| c(1.0 / ((1.0 + t[0] * t[0]) * (1.0 + t[1] * t[1])));
        let r = integrate_box(&f, &[AxisMap::Tan, AxisMap::Tan], &NoCrossings, &spec);
        assert!(r.converged);
        assert!((r.value.re - PI * PI).abs() < 1e-8);
    }

    #[test]
    fn non_finite_samples_are_reported_not_panicked() {
        let r = integrate_interval(|t| c(1.0 / t), 0.0, 1.0, &[], &QuadratureSpec::default());
        assert!(!r.converged);
    }

    #[test]
    fn tighter_tolerance_does_not_increase_error() {
        let z = Complex64::new(0.3, 0.05);
        let f = |t: f64| (c(t) - z.conj()).powi(-2);
        let spec = QuadratureSpec::default();
        let a = integrate_line(f, &[], &spec.scaled(100.0));
        let b = integrate_line(f, &[], &spec.scaled(50.0));
        assert!(b.error <= a.error);
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-8, 10).is_err());
        assert!(QuadratureSpec::new(1e-9, 1e-8, 0).is_err());
        assert!(QuadratureSpec::new(1e-9, 1e-8, 1).is_ok());
    }
}
