//! Symbolic candidate support sets in ℝⁿ.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Axis;
use crate::quadrature::{hyperplane_crossing, Crossings, Line};

/// The constraint `t_axis = value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisValue {
    pub axis: Axis,
    pub value: f64,
}

/// The open coordinate strip `lo < t_axis < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisStrip {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
}

/// The coordinate Möbius map with pole `pole` acting on axis `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisPole {
    pub axis: Axis,
    pub pole: f64,
}

/// Closed interval with optional ends; `None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    #[serde(default)]
    pub lo: Option<f64>,
    #[serde(default)]
    pub hi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// `{A s + β : s ∈ ℝᵏ}` with `A` given by rows.
    AffineImage { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// `β₁ < t_{j₂} − α t_{j₁} < β₂`.
    Strip { n: usize, j1: Axis, j2: Axis, alpha: f64, beta1: f64, beta2: f64 },
    /// Complement of the union of the given coordinate strips.
    CrossComplement { n: usize, strips: Vec<AxisStrip> },
    /// Intersection of coordinate hyperplanes.
    CoordinateAffine { n: usize, constraints: Vec<AxisValue> },
    /// Image of `inner` under the listed maps, applied in order.
    MoebiusImage { inner: Box<Region>, maps: Vec<AxisPole> },
    /// Product of closed intervals.
    Box { bounds: Vec<Interval> },
}

impl Region {
    /// The line `t₂ = slope·t₁ + intercept` in ℝ².
    pub fn line(slope: f64, intercept: f64) -> Region {
        Region::AffineImage { matrix: vec![vec![1.0, 0.0], vec![slope, 0.0]], offset: vec![0.0, intercept] }
    }

    /// Diagonal `t₁ = … = tₙ`.
    pub fn diagonal(n: usize) -> Region {
        let mut matrix = vec![vec![0.0; n]; n];
        for row in &mut matrix {
            row[0] = 1.0;
        }
        Region::AffineImage { matrix, offset: vec![0.0; n] }
    }

    pub fn hyperplane(n: usize, axis: Axis, value: f64) -> Region {
        Region::CoordinateAffine { n, constraints: vec![AxisValue { axis, value }] }
    }

    /// Closed first orthant `t ≥ 0`.
    pub fn first_orthant(n: usize) -> Region {
        Region::Box { bounds: vec![Interval { lo: Some(0.0), hi: None }; n] }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::AffineImage { matrix, .. } => matrix.len(),
            Region::Strip { n, .. } | Region::CrossComplement { n, .. } | Region::CoordinateAffine { n, .. } => *n,
            Region::MoebiusImage { inner, .. } => inner.dim(),
            Region::Box { bounds } => bounds.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRegion(m));
        let n = self.dim();
        if n == 0 {
            return bad("dimension must be at least 1".into());
        }
        let axis_ok = |a: Axis| a.index() < n;
        match self {
            Region::AffineImage { matrix, offset } => {
                let k = matrix.first().map_or(0, |r| r.len());
                if k == 0 || matrix.iter().any(|r| r.len() != k) {
                    return bad("affine image needs a nonempty rectangular matrix".into());
                }
                if offset.len() != n {
                    return bad("offset length differs from the number of matrix rows".into());
                }
                if matrix.iter().flatten().chain(offset).any(|x| !x.is_finite()) {
                    return bad("non-finite entry".into());
                }
            }
            Region::Strip { j1, j2, alpha, beta1, beta2, .. } => {
                if !axis_ok(*j1) || !axis_ok(*j2) || j1 == j2 {
                    return bad("strip needs two distinct axes within range".into());
                }
                if !(alpha.is_finite() && beta1.is_finite() && beta2.is_finite()) || beta1 >= beta2 {
                    return bad("strip needs finite slope and bounds beta1 < beta2".into());
                }
            }
            Region::CrossComplement { strips, .. } => {
                if strips.is_empty() {
                    return bad("cross complement needs at least one strip".into());
                }
                for s in strips {
                    if !axis_ok(s.axis) || !(s.lo < s.hi) || !s.lo.is_finite() || !s.hi.is_finite() {
                        return bad("each strip needs an axis in range and finite lo < hi".into());
                    }
                }
            }
            Region::CoordinateAffine { constraints, .. } => {
                if constraints.is_empty() {
                    return bad("coordinate affine set needs at least one constraint".into());
                }
                for (i, c) in constraints.iter().enumerate() {
                    if !axis_ok(c.axis) || !c.value.is_finite() {
                        return bad("constraint axis out of range or value not finite".into());
                    }
                    if constraints[..i].iter().any(|d| d.axis == c.axis) {
                        return bad(format!("axis {} constrained twice", c.axis));
                    }
                }
            }
            Region::MoebiusImage { inner, maps } => {
                inner.validate()?;
                if maps.iter().any(|m| !axis_ok(m.axis) || !m.pole.is_finite()) {
                    return bad("map axis out of range or pole not finite".into());
                }
            }
            Region::Box { bounds } => {
                for b in bounds {
                    if b.lo.is_some_and(|x| !x.is_finite()) || b.hi.is_some_and(|x| !x.is_finite()) {
                        return bad("box bounds must be finite when present".into());
                    }
                    if let (Some(lo), Some(hi)) = (b.lo, b.hi) {
                        if lo > hi {
                            return bad("box bound lo exceeds hi".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Membership of `t`. Lower-dimensional sets use the distance tolerance `tol`.
    pub fn contains(&self, t: &[f64], tol: f64) -> bool {
        match self {
            Region::AffineImage { matrix, offset } => affine_residual(matrix, offset, t) <= tol,
            Region::Strip { j1, j2, alpha, beta1, beta2, .. } => {
                let v = t[j2.index()] - alpha * t[j1.index()];
                *beta1 < v && v < *beta2
            }
            Region::CrossComplement { strips, .. } => {
                strips.iter().all(|s| !(s.lo < t[s.axis.index()] && t[s.axis.index()] < s.hi))
            }
            Region::CoordinateAffine { constraints, .. } => {
                constraints.iter().all(|c| (t[c.axis.index()] - c.value).abs() <= tol)
            }
            Region::MoebiusImage { inner, maps } => {
                let mut x = t.to_vec();
                for m in maps.iter().rev() {
                    let v = x[m.axis.index()];
                    if v == 0.0 {
                        return false;
                    }
                    x[m.axis.index()] = m.pole - 1.0 / v;
                }
                inner.contains(&x, tol)
            }
            Region::Box { bounds } => bounds
                .iter()
                .zip(t)
                .all(|(b, &x)| b.lo.is_none_or(|lo| x >= lo - tol) && b.hi.is_none_or(|hi| x <= hi + tol)),
        }
    }

    /// Whether the set is Lebesgue-null in ℝⁿ (lower-dimensional).
    pub fn is_null(&self) -> bool {
        match self {
            Region::AffineImage { matrix, .. } => affine_rank(matrix) < matrix.len(),
            Region::CoordinateAffine { .. } => true,
            Region::MoebiusImage { inner, .. } => inner.is_null(),
            Region::Strip { .. } | Region::CrossComplement { .. } | Region::Box { .. } => false,
        }
    }
}

/// The image of `region` under the coordinate map `t_axis ↦ 1/(pole − t_axis)`:
/// `{x : (…, pole − 1/x_axis, …) ∈ region}`.
pub fn transform_region(region: &Region, axis: Axis, pole: f64) -> Region {
    let map = AxisPole { axis, pole };
    match region {
        Region::MoebiusImage { inner, maps } => {
            let mut maps = maps.clone();
            maps.push(map);
            Region::MoebiusImage { inner: inner.clone(), maps }
        }
        other => Region::MoebiusImage { inner: Box::new(other.clone()), maps: vec![map] },
    }
}

pub(crate) fn to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let k = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(rows.len(), k, |i, j| rows[i][j])
}

pub(crate) fn affine_rank(rows: &[Vec<f64>]) -> usize {
    let m = to_matrix(rows);
    let scale = m.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    m.rank(1e-12 * scale)
}

/// Distance from `t` to the affine set `{A s + β}` (least squares).
fn affine_residual(rows: &[Vec<f64>], offset: &[f64], t: &[f64]) -> f64 {
    let a = to_matrix(rows);
    let rhs = DVector::from_iterator(t.len(), t.iter().zip(offset).map(|(x, b)| x - b));
    let svd = a.clone().svd(true, true);
    match svd.solve(&rhs, 1e-12) {
        Ok(s) => (&a * s - rhs).norm(),
        Err(_) => f64::INFINITY,
    }
}

impl Crossings for Region {
    fn crossings(&self, line: &Line, out: &mut Vec<f64>) {
        let n = line.dir.len();
        match self {
            Region::Strip { j1, j2, alpha, beta1, beta2, .. } => {
                let mut normal = vec![0.0; n];
                normal[j2.index()] = 1.0;
                normal[j1.index()] = -alpha;
                hyperplane_crossing(&normal, *beta1, line, out);
                hyperplane_crossing(&normal, *beta2, line, out);
            }
            Region::CrossComplement { strips, .. } => {
                for s in strips {
                    let d = line.dir[s.axis.index()];
                    if d != 0.0 {
                        out.push((s.lo - line.base[s.axis.index()]) / d);
                        out.push((s.hi - line.base[s.axis.index()]) / d);
                    }
                }
            }
            Region::Box { bounds } => {
                for (i, b) in bounds.iter().enumerate() {
                    let d = line.dir[i];
                    if d != 0.0 {
                        for x in [b.lo, b.hi].into_iter().flatten() {
                            out.push((x - line.base[i]) / d);
                        }
                    }
                }
            }
            Region::MoebiusImage { inner, maps } => {
                moebius_region_crossings(inner, maps, line, out);
            }
            // Null sets: an indicator of one is zero almost everywhere anyway.
            Region::AffineImage { .. } | Region::CoordinateAffine { .. } => {}
        }
    }
}

/// Crossings of `maps[last] ∘ … ∘ maps[0] (inner)`, peeling off the last map.
fn moebius_region_crossings(inner: &Region, maps: &[AxisPole], line: &Line, out: &mut Vec<f64>) {
    let Some((last, rest)) = maps.split_last() else {
        inner.crossings(line, out);
        return;
    };
    let p = last.pole;
    axis_map_crossings(
        line,
        last.axis.index(),
        |x| p - 1.0 / x,
        |u| 1.0 / (p - u),
        0.0,
        &|l: &Line, o: &mut Vec<f64>| moebius_region_crossings(inner, rest, l, o),
        out,
    );
}

/// Crossings through a change of variables acting on one coordinate.
///
/// Points on `line` are in outer coordinates; `forward` maps the outer value of
/// coordinate `j` to the inner one, `inverse` goes back, and `singular` is the outer
/// value where the map blows up (always reported as a crossing).
pub(crate) fn axis_map_crossings(
    line: &Line,
    j: usize,
    forward: impl Fn(f64) -> f64,
    inverse: impl Fn(f64) -> f64,
    singular: f64,
    inner: &dyn Fn(&Line, &mut Vec<f64>),
    out: &mut Vec<f64>,
) {
    if line.dir[j] == 0.0 {
        let bj = line.base[j];
        if bj == singular {
            return;
        }
        let mut mapped = line.clone();
        mapped.base[j] = forward(bj);
        inner(&mapped, out);
    } else if line.single_axis() == Some(j) {
        let d = line.dir[j];
        let b = line.base[j];
        let mut mapped = line.clone();
        mapped.base[j] = 0.0;
        mapped.dir[j] = 1.0;
        let mut raw = Vec::new();
        inner(&mapped, &mut raw);
        for u in raw.into_iter().filter(|u| u.is_finite()) {
            out.push((inverse(u) - b) / d);
        }
        out.push((singular - b) / d);
    }
    // Oblique lines through a nonlinear map: no breakpoints; the adaptive rule copes.
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strip(alpha: f64, b1: f64, b2: f64) -> Region {
        Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(2), alpha, beta1: b1, beta2: b2 }
    }

    #[test]
    fn membership_examples() {
        assert!(Region::diagonal(2).contains(&[3.0, 3.0], 1e-9));
        assert!(!Region::diagonal(2).contains(&[3.0, 3.1], 1e-9));
        assert!(!strip(1.0, -1.0, 1.0).contains(&[0.0, 2.0], 0.0));
        assert!(strip(1.0, -1.0, 1.0).contains(&[0.0, 0.5], 0.0));
        let hyperbola = transform_region(&Region::diagonal(2), Axis::new(1), 0.0);
        assert!(hyperbola.contains(&[-1.0, 1.0], 1e-9));
        assert!(hyperbola.contains(&[2.0, -0.5], 1e-9));
        assert!(!hyperbola.contains(&[1.0, 1.0], 1e-9));
        assert!(!hyperbola.contains(&[0.0, 1.0], 1e-9));
    }

    #[test]
    fn strip_images_match_closed_forms() {
        let s = strip(1.0, -1.0, 0.0);
        let once = transform_region(&s, Axis::new(1), 0.0);
        let twice = transform_region(&once, Axis::new(2), 0.0);
        for &(a, b) in &[(0.3, -2.0), (-0.7, 0.9), (2.0, -1.2), (-3.0, 0.1), (0.5, 0.5)] {
            let v1 = -1.0 / a - b;
            assert_eq!(once.contains(&[a, b], 0.0), 0.0 < v1 && v1 < 1.0);
            let v2 = -1.0 / a + 1.0 / b;
            assert_eq!(twice.contains(&[a, b], 0.0), 0.0 < v2 && v2 < 1.0);
        }
    }

    #[test]
    fn validation() {
        assert!(strip(1.0, 1.0, 1.0).validate().is_err());
        assert!(Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(1), alpha: 1.0, beta1: 0.0, beta2: 1.0 }
            .validate()
            .is_err());
        assert!(Region::diagonal(3).validate().is_ok());
        assert!(Region::AffineImage { matrix: vec![vec![1.0], vec![1.0, 2.0]], offset: vec![0.0, 0.0] }
            .validate()
            .is_err());
    }

    #[test]
    fn null_sets() {
        assert!(Region::diagonal(2).is_null());
        assert!(!strip(1.0, 0.0, 1.0).is_null());
        assert!(transform_region(&Region::diagonal(2), Axis::new(2), 1.0).is_null());
        assert!(!Region::AffineImage { matrix: vec![vec![1.0, 0.0], vec![0.0, 2.0]], offset: vec![0.0, 0.0] }.is_null());
    }

    #[test]
    fn crossings_of_transformed_strip_land_on_boundary() {
        let s = transform_region(&strip(1.0, -1.0, 0.0), Axis::new(1), 0.0);
        // Horizontal line at τ₂ = 0.25 crosses where −1/τ₁ − 0.25 ∈ {0, 1}.
        let line = Line { base: vec![0.0, 0.25], dir: vec![1.0, 0.0] };
        let mut out = Vec::new();
        s.crossings(&line, &mut out);
        out.sort_by(f64::total_cmp);
        let mut want = vec![-1.0 / 0.25, -1.0 / 1.25, 0.0];
        want.sort_by(f64::total_cmp);
        assert_eq!(out.len(), 3);
        for (a, b) in out.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let r = transform_region(&strip(2.0, -1.0, 3.0), Axis::new(2), 0.5);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<Region>(&text).unwrap(), r);
    }
}
