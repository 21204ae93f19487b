use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{Measure, MeasureComponent, GROWTH_DIVERGENCE_GUARD};
use crate::quadrature::{
    integrate_box, sparse_dot, AxisCuts, AxisMap, CrossingSet, Crossings, IntegrationResult, Line, NoCrossings,
    QuadratureSpec,
};
use crate::region::axis_map_crossings;

/// `∫ f dμ`, summed component by component in list order.
pub fn integrate(f: impl Fn(&[f64]) -> Complex64, mu: &Measure, spec: &QuadratureSpec) -> IntegrationResult {
    integrate_with(&f, mu, &NoCrossings, spec)
}

/// As [`integrate`], with known kink locations of `f` (ambient coordinates).
pub(crate) fn integrate_with(
    f: &dyn Fn(&[f64]) -> Complex64,
    mu: &Measure,
    cuts: &dyn Crossings,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    mu.components.iter().fold(IntegrationResult::zero(), |acc, c| acc + integrate_component(f, c, mu.n, cuts, spec))
}

fn integrate_component(
    f: &dyn Fn(&[f64]) -> Complex64,
    c: &MeasureComponent,
    n: usize,
    cuts: &dyn Crossings,
    spec: &QuadratureSpec,
) -> IntegrationResult {
    match c {
        MeasureComponent::PointMass { location, weight } => {
            if *weight == 0.0 {
                return IntegrationResult::zero();
            }
            IntegrationResult::exact(f(location) * *weight)
        }
        MeasureComponent::HyperplaneLebesgue { axis, offset, constant } => {
            let j = axis.index();
            if *constant == 0.0 {
                return IntegrationResult::zero();
            }
            if n == 1 {
                return IntegrationResult::exact(f(&[*offset]) * (constant * PI));
            }
            // Embedding s ∈ ℝ^{n-1} ↦ t with t_j = offset.
            let mut matrix = vec![vec![0.0; n - 1]; n];
            for (i, row) in matrix.iter_mut().enumerate() {
                if i < j {
                    row[i] = 1.0;
                } else if i > j {
                    row[i - 1] = 1.0;
                }
            }
            let mut shift = vec![0.0; n];
            shift[j] = *offset;
            let embed = |s: &[f64]| {
                let mut t = Vec::with_capacity(n);
                t.extend_from_slice(&s[..j]);
                t.push(*offset);
                t.extend_from_slice(&s[j..]);
                t
            };
            let g = |s: &[f64]| f(&embed(s));
            let param_cuts = LinearCuts { matrix: &matrix, offset: &shift, ambient: cuts };
            integrate_box(&g, &vec![AxisMap::for_spec(spec); n - 1], &param_cuts, spec).scale(constant * PI)
        }
        MeasureComponent::AffinePushforward { matrix, offset, density, weight } => {
            if *weight == 0.0 {
                return IntegrationResult::zero();
            }
            let k = matrix[0].len();
            let g = |s: &[f64]| {
                let rho = density.eval(s);
                if rho == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let t: Vec<f64> = matrix.iter().zip(offset).map(|(row, b)| sparse_dot(row, s) + b).collect();
                f(&t) * rho
            };
            let param_cuts = LinearCuts { matrix, offset, ambient: cuts };
            integrate_box(&g, &vec![AxisMap::for_spec(spec); k], &param_cuts, spec).scale(*weight)
        }
        MeasureComponent::FullDensity { density, region } => {
            if region.as_ref().is_some_and(|r| r.is_null()) {
                return IntegrationResult::zero();
            }
            let g = |t: &[f64]| {
                if region.as_ref().is_some_and(|r| !r.contains(t, 0.0)) {
                    return Complex64::new(0.0, 0.0);
                }
                let rho = density.eval(t);
                if rho == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                f(t) * rho
            };
            let axes = vec![AxisMap::for_spec(spec); n];
            match region {
                Some(r) => integrate_box(&g, &axes, &CrossingSet(vec![cuts, r]), spec),
                None => integrate_box(&g, &axes, cuts, spec),
            }
        }
        MeasureComponent::MoebiusPushforward { inner, axis, pole } => {
            let j = axis.index();
            let p = *pole;
            let g = |t: &[f64]| {
                let d = p - t[j];
                if d == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let mut tau = t.to_vec();
                tau[j] = 1.0 / d;
                f(&tau) * (tau[j] * tau[j])
            };
            let inner_cuts = MoebiusCuts { ambient: cuts, axis: j, pole: p };
            integrate_with(&g, inner, &inner_cuts, spec)
        }
    }
}

/// Pulls ambient crossings back to parameter lines of an affine map.
struct LinearCuts<'a> {
    matrix: &'a [Vec<f64>],
    offset: &'a [f64],
    ambient: &'a dyn Crossings,
}

impl Crossings for LinearCuts<'_> {
    fn crossings(&self, line: &Line, out: &mut Vec<f64>) {
        let base = self.matrix.iter().zip(self.offset).map(|(row, b)| sparse_dot(row, &line.base) + b).collect();
        let dir = self.matrix.iter().map(|row| sparse_dot(row, &line.dir)).collect();
        self.ambient.crossings(&Line { base, dir }, out);
    }
}

/// Pulls outer crossings back through `t_j ↦ 1/(pole − t_j)`.
struct MoebiusCuts<'a> {
    ambient: &'a dyn Crossings,
    axis: usize,
    pole: f64,
}

impl Crossings for MoebiusCuts<'_> {
    fn crossings(&self, line: &Line, out: &mut Vec<f64>) {
        let p = self.pole;
        axis_map_crossings(
            line,
            self.axis,
            |t| 1.0 / (p - t),
            |tau| p - 1.0 / tau,
            p,
            &|l: &Line, o: &mut Vec<f64>| self.ambient.crossings(l, o),
            out,
        );
    }
}

fn growth_weight(t: &[f64]) -> Complex64 {
    Complex64::new(t.iter().map(|x| 1.0 / (1.0 + x * x)).product(), 0.0)
}

/// `∫ ∏ (1 + t_ℓ²)^{-1} dμ`.
pub fn growth_integral(mu: &Measure, spec: &QuadratureSpec) -> IntegrationResult {
    integrate(growth_weight, mu, spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthStatus {
    Finite,
    Infinite,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub value: f64,
    pub error: f64,
    pub status: GrowthStatus,
}

/// Growth integral with a finiteness verdict.
pub fn growth_report(mu: &Measure, spec: &QuadratureSpec) -> GrowthReport {
    let r = growth_integral(mu, spec);
    let value = r.value.re;
    let status = if r.converged && value.is_finite() {
        GrowthStatus::Finite
    } else if !value.is_finite() || value > GROWTH_DIVERGENCE_GUARD {
        GrowthStatus::Infinite
    } else {
        GrowthStatus::Inconclusive
    };
    GrowthReport { value, error: r.error, status }
}

/// `μ([−R, R]ⁿ)` with its quadrature bookkeeping.
pub fn truncated_mass_result(mu: &Measure, radius: f64) -> IntegrationResult {
    let spec = QuadratureSpec::default();
    let n = mu.n;
    let inside = |t: &[f64]| t.iter().all(|x| x.abs() <= radius);
    let indicator = |t: &[f64]| Complex64::new(if inside(t) { 1.0 } else { 0.0 }, 0.0);
    let cuts = AxisCuts::cube(n, radius);
    mu.components.iter().fold(IntegrationResult::zero(), |acc, c| {
        let part = match c {
            MeasureComponent::HyperplaneLebesgue { offset, constant, .. } => {
                let mass = if offset.abs() <= radius { constant * PI * (2.0 * radius).powi(n as i32 - 1) } else { 0.0 };
                IntegrationResult::exact(Complex64::new(mass, 0.0))
            }
            other => integrate_component(&indicator, other, n, &cuts, &spec),
        };
        acc + part
    })
}

/// `μ([−R, R]ⁿ)`.
pub fn truncated_mass(mu: &Measure, radius: f64) -> f64 {
    truncated_mass_result(mu, radius).value.re
}
