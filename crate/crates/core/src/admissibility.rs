//! Numeric tests of the two conditions a representing measure must satisfy: the
//! growth condition and the vanishing of the mixed Nevanlinna integrals.
//!
//! "For all z" is sampled on a finite grid, so a pass is evidence, not proof.
//! A fail is a certificate: one nonzero residual already rules the measure out.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::remainder_r;
use crate::measure::{growth_report, integrate_with, GrowthReport, GrowthStatus, Measure};
use crate::point::{Axis, HalfPlanePoint};
use crate::quadrature::{integrate_line, AxisCuts, IntegrationResult, QuadratureSpec};

/// Relative pass threshold; multiplied by `max(1, growth integral)`.
pub const RESIDUAL_THRESHOLD: f64 = 1e-5;

fn peak_cuts(z: &HalfPlanePoint) -> AxisCuts {
    AxisCuts { per_axis: z.coords().iter().map(|w| vec![w.re]).collect() }
}

/// `∫ (t_{ℓ₁}−z_{ℓ₁})^{-2} (t_{ℓ₂}−z̄_{ℓ₂})^{-2} ∏_{j∉{ℓ₁,ℓ₂}} (1/(t_j−z_j) − 1/(t_j−z̄_j)) dμ`.
pub fn nevanlinna_residual(
    mu: &Measure,
    z: &HalfPlanePoint,
    l1: Axis,
    l2: Axis,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult> {
    let n = mu.n();
    if n < 2 || z.dim() != n {
        return Err(Error::InvalidArgument("the residual needs n ≥ 2 and a point of matching dimension".into()));
    }
    l2.check(n)?;
    if l1 >= l2 {
        return Err(Error::InvalidArgument("the residual needs l1 < l2".into()));
    }
    let (a, b) = (l1.index(), l2.index());
    let zs = z.coords();
    let f = |t: &[f64]| {
        let mut v = (t[a] - zs[a]).powi(-2) * (t[b] - zs[b].conj()).powi(-2);
        for (j, (&tj, zj)) in t.iter().zip(zs).enumerate() {
            if j != a && j != b {
                v *= Complex64::new(0.0, 2.0 * zj.im) / ((tj - zj) * (tj - zj.conj()));
            }
        }
        v
    };
    Ok(integrate_with(&f, mu, &peak_cuts(z), spec))
}

/// `∫ R_n(z,·) dμ`.
pub fn remainder_integral(mu: &Measure, z: &HalfPlanePoint, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    if z.dim() != mu.n() {
        return Err(Error::InvalidArgument("point dimension differs from the measure's".into()));
    }
    let f = |t: &[f64]| Complex64::new(remainder_r(z, t), 0.0);
    Ok(integrate_with(&f, mu, &peak_cuts(z), spec))
}

/// `∫_ℝ (t − z̄)^{-2} dt`, which vanishes for every `z` in the upper half-plane.
pub fn residue_identity_check(z: Complex64, spec: &QuadratureSpec) -> Result<IntegrationResult> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidArgument("z must lie in the upper half-plane".into()));
    }
    Ok(integrate_line(|t| (t - z.conj()).powi(-2), &[z.re], spec))
}

/// Sample points: the full product of `values` in every coordinate, then `extra`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGrid {
    #[serde(with = "crate::point::complex_list")]
    pub values: Vec<Complex64>,
    #[serde(default)]
    pub extra: Vec<HalfPlanePoint>,
}

impl Default for ZGrid {
    fn default() -> Self {
        ZGrid {
            values: vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 1.0), Complex64::new(-1.0, 2.0)],
            extra: vec![],
        }
    }
}

impl ZGrid {
    pub fn with_extra(mut self, z: HalfPlanePoint) -> Self {
        self.extra.push(z);
        self
    }

    pub fn points(&self, n: usize) -> Result<Vec<HalfPlanePoint>> {
        if self.values.is_empty() && self.extra.is_empty() {
            return Err(Error::InvalidArgument("empty z-grid".into()));
        }
        let mut out = Vec::new();
        if !self.values.is_empty() {
            let m = self.values.len();
            let total = m.checked_pow(n as u32).ok_or_else(|| Error::InvalidArgument("z-grid too large".into()))?;
            for mut k in 0..total {
                let mut z = vec![Complex64::new(0.0, 0.0); n];
                for slot in z.iter_mut().rev() {
                    *slot = self.values[k % m];
                    k /= m;
                }
                out.push(HalfPlanePoint::new(z)?);
            }
        }
        for z in &self.extra {
            if z.dim() != n {
                return Err(Error::InvalidArgument("extra grid point has the wrong dimension".into()));
            }
            out.push(z.clone());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub z: HalfPlanePoint,
    pub l1: Axis,
    pub l2: Axis,
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemainderEntry {
    pub z: HalfPlanePoint,
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Whether a sampled value is certainly zero, certainly nonzero, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Significance {
    Zero,
    Nonzero,
    Undecided,
}

/// An integral that ran out of budget may still count as zero when its error
/// estimate is an order of magnitude below the threshold; it never certifies nonzero.
fn significance(value: Complex64, error: f64, converged: bool, threshold: f64) -> Significance {
    if !converged {
        if error.is_finite() && error <= 0.1 * threshold && value.norm() + error <= threshold {
            Significance::Zero
        } else {
            Significance::Undecided
        }
    } else if value.norm() > threshold + error {
        Significance::Nonzero
    } else if value.norm() <= threshold {
        Significance::Zero
    } else {
        Significance::Undecided
    }
}

/// Verdicts of both conditions at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointVerdicts {
    pub z: HalfPlanePoint,
    /// Worst residual over all index pairs.
    pub residual: Significance,
    pub remainder: Significance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub growth: GrowthReport,
    pub threshold: f64,
    pub residuals: Vec<ResidualEntry>,
    pub remainders: Vec<RemainderEntry>,
    pub verdict: Verdict,
    pub max_residual: f64,
    /// Grid point of the largest certified-nonzero residual, on failure.
    pub failing_point: Option<HalfPlanePoint>,
    pub note: String,
}

impl ConditionReport {
    /// Zero/nonzero classification of the residual table and the remainder table,
    /// grid point by grid point.
    pub fn point_verdicts(&self) -> Vec<PointVerdicts> {
        self.remainders
            .iter()
            .map(|rem| {
                let entries: Vec<&ResidualEntry> = self.residuals.iter().filter(|r| r.z == rem.z).collect();
                let sig: Vec<Significance> =
                    entries.iter().map(|r| significance(r.value, r.error, r.converged, self.threshold)).collect();
                let residual = if sig.contains(&Significance::Nonzero) {
                    Significance::Nonzero
                } else if sig.iter().all(|s| *s == Significance::Zero) {
                    Significance::Zero
                } else {
                    Significance::Undecided
                };
                PointVerdicts {
                    z: rem.z.clone(),
                    residual,
                    remainder: significance(rem.value, rem.error, rem.converged, self.threshold),
                }
            })
            .collect()
    }

    /// Verdict implied by the remainder table alone (same rules as the residuals).
    pub fn remainder_verdict(&self) -> Verdict {
        let sig: Vec<Significance> =
            self.remainders.iter().map(|r| significance(r.value, r.error, r.converged, self.threshold)).collect();
        aggregate(self.growth.status, &sig)
    }
}

fn aggregate(growth: GrowthStatus, sig: &[Significance]) -> Verdict {
    if growth == GrowthStatus::Infinite || sig.contains(&Significance::Nonzero) {
        Verdict::Fail
    } else if growth == GrowthStatus::Finite && sig.iter().all(|s| *s == Significance::Zero) {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    }
}

/// Growth integral, residual table and remainder table of `mu` over `grid`.
pub fn check_measure(mu: &Measure, grid: &ZGrid, spec: &QuadratureSpec) -> Result<ConditionReport> {
    let n = mu.n();
    let points = grid.points(n)?;
    let growth = growth_report(mu, spec);
    let threshold = RESIDUAL_THRESHOLD * growth.value.abs().max(1.0);

    let mut tasks = Vec::new();
    for z in &points {
        for a in 0..n {
            for b in a + 1..n {
                tasks.push((z.clone(), Axis::from_index(a), Axis::from_index(b)));
            }
        }
    }
    let residuals: Vec<ResidualEntry> = tasks
        .into_par_iter()
        .map(|(z, l1, l2)| {
            let r = nevanlinna_residual(mu, &z, l1, l2, spec).expect("indices valid by construction");
            ResidualEntry { z, l1, l2, value: r.value, error: r.error, converged: r.converged }
        })
        .collect();
    let remainders: Vec<RemainderEntry> = points
        .par_iter()
        .map(|z| {
            let r = remainder_integral(mu, z, spec).expect("dimension checked");
            RemainderEntry { z: z.clone(), value: r.value, error: r.error, converged: r.converged }
        })
        .collect();

    let mut sig: Vec<Significance> =
        residuals.iter().map(|r| significance(r.value, r.error, r.converged, threshold)).collect();
    // Remainders that cannot be resolved also block a pass.
    if remainders.iter().any(|r| !r.converged && !(r.error <= 0.1 * threshold)) {
        sig.push(Significance::Undecided);
    }
    let verdict = aggregate(growth.status, &sig);
    let max_residual = residuals.iter().map(|r| r.value.norm()).fold(0.0, f64::max);
    let failing_point = residuals
        .iter()
        .filter(|r| significance(r.value, r.error, r.converged, threshold) == Significance::Nonzero)
        .max_by(|x, y| x.value.norm().total_cmp(&y.value.norm()))
        .map(|r| r.z.clone());
    Ok(ConditionReport {
        growth,
        threshold,
        residuals,
        remainders,
        verdict,
        max_residual,
        failing_point,
        note: "sampled on a finite z-grid: a pass is necessary-condition evidence, a fail is a certificate".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::catalog;
    use crate::region::Region;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(z: &[Complex64]) -> HalfPlanePoint {
        HalfPlanePoint::new(z.to_vec()).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn residue_identity() {
        for z in [c(0.0, 1.0), c(1.0, 2.0)] {
            let r = residue_identity_check(z, &spec()).unwrap();
            assert!(r.converged);
            assert!(r.value.norm() < 1e-9, "{:?}", r);
        }
    }

    #[test]
    fn lebesgue_plane_residual_vanishes() {
        let r = nevanlinna_residual(
            &Measure::lebesgue(2),
            &pt(&[c(0.0, 1.0), c(0.0, 1.0)]),
            Axis::new(1),
            Axis::new(2),
            &spec(),
        )
        .unwrap();
        assert!(r.value.norm() < 1e-7, "{:?}", r);
    }

    #[test]
    fn anti_diagonal_residual_vanishes() {
        let r = nevanlinna_residual(
            &catalog::anti_diagonal(),
            &pt(&[c(0.0, 1.0), c(0.0, 2.0)]),
            Axis::new(1),
            Axis::new(2),
            &spec(),
        )
        .unwrap();
        assert!(r.value.norm() < 1e-6, "{:?}", r);
    }

    #[test]
    fn residual_argument_checks() {
        let z = pt(&[c(0.0, 1.0), c(0.0, 1.0)]);
        assert!(nevanlinna_residual(&Measure::lebesgue(2), &z, Axis::new(2), Axis::new(1), &spec()).is_err());
        assert!(nevanlinna_residual(&Measure::lebesgue(1), &pt(&[c(0.0, 1.0)]), Axis::new(1), Axis::new(2), &spec())
            .is_err());
    }

    #[test]
    fn one_dimensional_remainder_vanishes() {
        let r = remainder_integral(&catalog::pi_delta_zero(), &pt(&[c(0.3, 0.5)]), &spec()).unwrap();
        assert!(r.value.norm() < 1e-15);
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let pts = ZGrid::default().points(2).unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[1].coords(), &[c(0.0, 1.0), c(1.0, 1.0)]);
        assert_eq!(pts[3].coords(), &[c(1.0, 1.0), c(0.0, 1.0)]);
    }

    #[test]
    fn verdict_examples() {
        let pass = check_measure(&Measure::lebesgue(2), &ZGrid::default(), &spec()).unwrap();
        assert_eq!(pass.verdict, Verdict::Pass, "{}", pass.max_residual);
        let fail =
            check_measure(&Measure::point_mass(vec![0.0, 0.0], 1.0).unwrap(), &ZGrid::default(), &spec()).unwrap();
        assert_eq!(fail.verdict, Verdict::Fail);
        assert!(fail.failing_point.is_some());
        let trivial = check_measure(&Measure::trivial(2), &ZGrid::default(), &spec()).unwrap();
        assert_eq!(trivial.verdict, Verdict::Pass);
        assert_eq!(trivial.max_residual, 0.0);
    }

    #[test]
    fn one_dimensional_measures_only_need_growth() {
        let r = check_measure(&Measure::lebesgue(1), &ZGrid::default(), &spec()).unwrap();
        assert!(r.residuals.is_empty());
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn strip_measure_fails() {
        let strip = Measure::lebesgue_on(
            Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(2), alpha: 1.0, beta1: -1.0, beta2: 1.0 },
            1.0,
        )
        .unwrap();
        let r = check_measure(&strip, &ZGrid::default(), &spec()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }
}
