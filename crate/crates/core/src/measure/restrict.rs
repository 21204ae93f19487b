use nalgebra::DMatrix;
use std::f64::consts::PI;

use super::{Measure, MeasureComponent};
use crate::error::{Error, Result};
use crate::point::Axis;
use crate::region::transform_region;

/// Splitting of a measure along the hyperplane `t_j = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Restriction {
    /// `c` with `μ|_H = c·π·λ_{ℝ^{n−1}}` (Lebesgue-form parts only).
    pub constant: f64,
    /// `μ − μ|_H`.
    pub remainder: Measure,
    /// Some part concentrated on `H` is not of the form `c·π·λ`.
    pub non_lebesgue: bool,
}

struct Part {
    constant: f64,
    rest: Option<MeasureComponent>,
    non_lebesgue: bool,
}

impl Part {
    fn outside(c: &MeasureComponent) -> Part {
        Part { constant: 0.0, rest: Some(c.clone()), non_lebesgue: false }
    }

    fn lebesgue(constant: f64) -> Part {
        Part { constant, rest: None, non_lebesgue: false }
    }

    fn concentrated() -> Part {
        Part { constant: 0.0, rest: None, non_lebesgue: true }
    }
}

pub(crate) fn same_offset(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Splits off `μ|_{H_j(p)}` symbolically.
pub fn restrict_to_hyperplane(mu: &Measure, axis: Axis, p: f64) -> Result<Restriction> {
    axis.check(mu.n)?;
    if !p.is_finite() {
        return Err(Error::InvalidArgument("hyperplane offset must be finite".into()));
    }
    let mut constant = 0.0;
    let mut non_lebesgue = false;
    let mut rest = Vec::new();
    for c in &mu.components {
        let part = restrict_component(c, mu.n, axis, p)?;
        constant += part.constant;
        non_lebesgue |= part.non_lebesgue;
        rest.extend(part.rest);
    }
    Ok(Restriction { constant, remainder: Measure::from_valid(mu.n, rest), non_lebesgue })
}

fn restrict_component(c: &MeasureComponent, n: usize, axis: Axis, p: f64) -> Result<Part> {
    let j = axis.index();
    let undecidable = |reason: &str| Error::Undecidable { axis, offset: p, reason: reason.to_string() };
    Ok(match c {
        MeasureComponent::PointMass { location, weight } => {
            if *weight == 0.0 || !same_offset(location[j], p) {
                Part::outside(c)
            } else if n == 1 {
                Part::lebesgue(weight / PI)
            } else {
                Part::concentrated()
            }
        }
        MeasureComponent::HyperplaneLebesgue { axis: a, offset, constant } => {
            if *a == axis && same_offset(*offset, p) {
                Part::lebesgue(*constant)
            } else {
                Part::outside(c)
            }
        }
        MeasureComponent::AffinePushforward { matrix, offset, density, weight } => {
            let row_zero = matrix[j].iter().all(|x| *x == 0.0);
            if *weight == 0.0 || !row_zero || !same_offset(offset[j], p) {
                return Ok(Part::outside(c));
            }
            if density.is_custom() {
                return Err(undecidable("custom density concentrated on the hyperplane"));
            }
            if n == 1 {
                return Err(undecidable("total mass of a collapsed pushforward is not tracked symbolically"));
            }
            let k = matrix[0].len();
            let Some(g0) = density.constant_value() else {
                return Ok(Part::concentrated());
            };
            if g0 == 0.0 {
                return Ok(Part::outside(c));
            }
            if k != n - 1 {
                return Ok(Part::concentrated());
            }
            let reduced = DMatrix::from_fn(n - 1, k, |r, col| matrix[if r < j { r } else { r + 1 }][col]);
            let det = reduced.determinant();
            if det == 0.0 || !det.is_finite() {
                Part::concentrated()
            } else {
                Part::lebesgue(weight * g0 / (PI * det.abs()))
            }
        }
        MeasureComponent::FullDensity { .. } => Part::outside(c),
        MeasureComponent::MoebiusPushforward { inner, axis: a, pole } => {
            if *a != axis {
                let r = restrict_to_hyperplane(inner, axis, p)?;
                Part { constant: r.constant, rest: wrap(r.remainder, *a, *pole), non_lebesgue: r.non_lebesgue }
            } else if p == 0.0 {
                // τ_j = 0 is the image of t_j = ∞, which carries no mass.
                Part::outside(c)
            } else {
                let r = restrict_to_hyperplane(inner, axis, pole - 1.0 / p)?;
                Part { constant: r.constant * p * p, rest: wrap(r.remainder, *a, *pole), non_lebesgue: r.non_lebesgue }
            }
        }
    })
}

fn wrap(inner: Measure, axis: Axis, pole: f64) -> Option<MeasureComponent> {
    if inner.is_trivial() {
        None
    } else {
        Some(MeasureComponent::MoebiusPushforward { inner: Box::new(inner), axis, pole })
    }
}

/// Explicit form of `(J_axis^pole)_*` applied to a single component, when one exists.
pub(crate) fn resolve_moebius(c: MeasureComponent, n: usize, axis: Axis, pole: f64) -> MeasureComponent {
    let j = axis.index();
    match c {
        MeasureComponent::PointMass { mut location, weight } => {
            let d = pole - location[j];
            location[j] = 1.0 / d;
            MeasureComponent::PointMass { location, weight: weight / (d * d) }
        }
        MeasureComponent::HyperplaneLebesgue { axis: a, offset, constant } if a == axis => {
            let d = pole - offset;
            MeasureComponent::HyperplaneLebesgue { axis: a, offset: 1.0 / d, constant: constant / (d * d) }
        }
        h @ MeasureComponent::HyperplaneLebesgue { .. } => h,
        MeasureComponent::FullDensity { density, region } if density.constant_value().is_some() => {
            MeasureComponent::FullDensity { density, region: region.map(|r| transform_region(&r, axis, pole)) }
        }
        other => {
            MeasureComponent::MoebiusPushforward { inner: Box::new(Measure::from_valid(n, vec![other])), axis, pole }
        }
    }
}
