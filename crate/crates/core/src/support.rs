//! Which sets can carry a representing measure: the forbidden-region rules,
//! their witness points, and a short catalog of sets known to work.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{catalog, Measure};
use crate::point::{Axis, HalfPlanePoint};
use crate::region::{affine_rank, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Forbidden,
    KnownAdmissible,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Result the verdict rests on, e.g. `"Thm 3.11"`; empty when undecided.
    pub citation: String,
    /// A point where the mixed Nevanlinna integrand is single-signed on the set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<HalfPlanePoint>,
    /// A nontrivial measure supported on the set, for known-admissible sets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<Measure>,
    /// The function the example measure represents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub represents: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    fn forbidden(citation: &str) -> Verdict {
        Verdict {
            kind: VerdictKind::Forbidden,
            citation: citation.into(),
            witness: None,
            example: None,
            represents: None,
            notes: vec![],
        }
    }

    fn admissible(citation: &str, example: Measure, represents: impl Into<String>) -> Verdict {
        Verdict {
            kind: VerdictKind::KnownAdmissible,
            citation: citation.into(),
            witness: None,
            example: Some(example),
            represents: Some(represents.into()),
            notes: vec![],
        }
    }

    fn undecided(note: Option<&str>) -> Verdict {
        Verdict {
            kind: VerdictKind::Undecided,
            citation: String::new(),
            witness: None,
            example: None,
            represents: None,
            notes: note.map(|s| vec![s.to_string()]).unwrap_or_default(),
        }
    }

    fn with_witness(mut self, z: HalfPlanePoint) -> Verdict {
        self.witness = Some(z);
        self
    }

    fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.notes.push(note.into());
        self
    }

    pub fn is_forbidden(&self) -> bool {
        self.kind == VerdictKind::Forbidden
    }
}

const RATIO_TOL: f64 = 1e-12;

fn is_zero_row(row: &[f64]) -> bool {
    row.iter().all(|x| *x == 0.0)
}

/// `γ > 0` with `b = γ·a`, if it exists.
fn positive_ratio(a: &[f64], b: &[f64]) -> Option<f64> {
    let k = a.iter().zip(b).max_by(|x, y| x.0.abs().total_cmp(&y.0.abs()))?;
    if *k.0 == 0.0 {
        return None;
    }
    let gamma = k.1 / k.0;
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs()));
    let fits = a.iter().zip(b).all(|(x, y)| (y - gamma * x).abs() <= RATIO_TOL * scale);
    (gamma > 0.0 && fits).then_some(gamma)
}

/// First pair `j₁ < j₂` with `row_{j₂} = γ·row_{j₁}`, `γ > 0`.
fn proportional_pair(matrix: &[Vec<f64>]) -> Option<(usize, usize, f64)> {
    for a in 0..matrix.len() {
        for b in a + 1..matrix.len() {
            if let Some(g) = positive_ratio(&matrix[a], &matrix[b]) {
                return Some((a, b, g));
            }
        }
    }
    None
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Witness for `Σ(A,β)` when `row_{j₂} = γ·row_{j₁}`: `z_{j₁} = i`,
/// `z_{j₂} = β_{j₂} − γβ_{j₁} + γi`, every other coordinate `i`.
pub fn sigma_witness(matrix: &[Vec<f64>], offset: &[f64], j1: Axis, j2: Axis, gamma: f64) -> Result<HalfPlanePoint> {
    let n = matrix.len();
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument("the row ratio must be positive".into()));
    }
    j1.check(n)?;
    j2.check(n)?;
    if j1 == j2 || offset.len() != n {
        return Err(Error::InvalidArgument("need two distinct rows and an offset per row".into()));
    }
    let (a, b) = (j1.index(), j2.index());
    let scale = matrix[a].iter().chain(&matrix[b]).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    if matrix[a].len() != matrix[b].len()
        || matrix[a].iter().zip(&matrix[b]).any(|(x, y)| (y - gamma * x).abs() > RATIO_TOL * scale)
    {
        return Err(Error::InvalidArgument(format!("row {j2} is not {gamma} times row {j1}")));
    }
    let mut z = vec![i(); n];
    z[b] = Complex64::new(offset[b] - offset[a] * gamma, gamma);
    HalfPlanePoint::new(z)
}

/// Witness for `S_{j₁,j₂}(α,β₁,β₂)`. The construction fixes `x₁ = 0`,
/// `x₂ = max(β₂,0)+1` and takes `y` past the completed-square bound with a
/// 10% margin; the result is checked by sampling the strip.
pub fn strip_witness(alpha: f64, beta1: f64, beta2: f64, j1: Axis, j2: Axis, n: usize) -> Result<HalfPlanePoint> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument("strip witness needs alpha > 0".into()));
    }
    if !(beta1 < beta2 && beta1.is_finite() && beta2.is_finite()) {
        return Err(Error::InvalidArgument("strip witness needs finite beta1 < beta2".into()));
    }
    j1.check(n)?;
    j2.check(n)?;
    if j1 == j2 {
        return Err(Error::InvalidArgument("strip axes must differ".into()));
    }
    let x2 = beta2.max(0.0) + 1.0;
    let f = |s: f64| s * (s + x2);
    let bound = x2 * x2 / 4.0 + f(-beta2 / 2.0).max(f(-beta1 / 2.0));
    let y = if bound > 0.0 { 1.1 * bound.sqrt() } else { 1.0 };
    let (z1, z2) = (Complex64::new(0.0, y / alpha), Complex64::new(x2, y));
    if !strip_core_single_signed(alpha, beta1, beta2, z1, z2) {
        return Err(Error::EstimationFailed { estimate: y, residual: f64::NAN });
    }
    let mut z = vec![i(); n];
    z[j1.index()] = z1;
    z[j2.index()] = z2;
    HalfPlanePoint::new(z)
}

/// Imaginary part of `(t₁−z₁)^{-2}(t₂−z̄₂)^{-2}` keeps one sign over 10³ strip points.
fn strip_core_single_signed(alpha: f64, beta1: f64, beta2: f64, z1: Complex64, z2: Complex64) -> bool {
    let (mut pos, mut neg) = (false, false);
    for a in 0..40 {
        // Spread along the strip on a tan scale so far-out points are sampled too.
        let u = -1.5 + 3.0 * (a as f64 + 0.5) / 40.0;
        let t1 = 10.0 * u.tan();
        for b in 0..25 {
            let v = beta1 + (beta2 - beta1) * (b as f64 + 0.5) / 25.0;
            let t2 = alpha * t1 + v;
            let im = ((t1 - z1).powi(-2) * (t2 - z2.conj()).powi(-2)).im;
            pos |= im > 0.0;
            neg |= im < 0.0;
        }
    }
    !(pos && neg)
}

fn subscript(k: usize) -> String {
    k.to_string().chars().map(|c| char::from_u32(0x2080 + c.to_digit(10).unwrap()).unwrap()).collect()
}

/// `"requires μ|_{H₁(0)} ≡ 0"` for the map `J_1^0`.
pub(crate) fn hyperplane_note(axis: Axis, pole: f64) -> String {
    format!("requires μ|_{{H{}({})}} ≡ 0", subscript(axis.label()), pole + 0.0)
}

/// Rules (2) and (3): forbidden sets carrying a witness.
fn witnessed_rule(region: &Region) -> Result<Option<Verdict>> {
    Ok(match region {
        Region::AffineImage { matrix, offset } if matrix.len() >= 2 && !matrix.iter().any(|r| is_zero_row(r)) => {
            match proportional_pair(matrix) {
                Some((a, b, g)) => {
                    let z = sigma_witness(matrix, offset, Axis::from_index(a), Axis::from_index(b), g)?;
                    Some(Verdict::forbidden("Thm 3.11").with_witness(z))
                }
                None => None,
            }
        }
        Region::Strip { n, j1, j2, alpha, beta1, beta2 } if *alpha > 0.0 => {
            Some(Verdict::forbidden("Thm 3.14").with_witness(strip_witness(*alpha, *beta1, *beta2, *j1, *j2, *n)?))
        }
        _ => None,
    })
}

fn column_sums_vanish(matrix: &[Vec<f64>], offset: &[f64]) -> bool {
    let scale = matrix.iter().flatten().chain(offset).fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let k = matrix[0].len();
    (0..k).all(|c| matrix.iter().map(|r| r[c]).sum::<f64>().abs() <= RATIO_TOL * scale)
        && offset.iter().sum::<f64>().abs() <= RATIO_TOL * scale
}

fn catalog_match(region: &Region) -> Option<Verdict> {
    let Region::AffineImage { matrix, offset } = region else {
        return None;
    };
    let n = matrix.len();
    let rank = affine_rank(matrix);
    if rank == n {
        return Some(Verdict::admissible("catalog", Measure::lebesgue(n), "i"));
    }
    if n == 2 && rank == 1 && column_sums_vanish(matrix, offset) {
        return Some(Verdict::admissible("Example 3.13", catalog::anti_diagonal(), "−1/(z₁+z₂)"));
    }
    if n == 3 && rank == 2 && column_sums_vanish(matrix, offset) {
        return Some(
            Verdict::admissible("catalog", catalog::plane_sum_zero(), "−1/(z₁+z₂+z₃)")
                .with_note("Theorem 3.11 does not apply"),
        );
    }
    None
}

fn hyperplane_example(n: usize, axis: Axis, p: f64) -> Verdict {
    let mu = Measure::hyperplane(n, axis, p, 1.0).expect("valid hyperplane");
    let z = format!("z{}", subscript(axis.label()));
    let f = if p == 0.0 { format!("−1/{z}") } else { format!("−1/({z} − {p})") };
    Verdict::admissible("Thm 3.4", mu, f)
}

/// Applies the rule cascade to `region`.
pub fn classify(region: &Region) -> Result<Verdict> {
    region.validate()?;
    let n = region.dim();

    // (1) sets inside coordinate hyperplanes
    match region {
        Region::CoordinateAffine { constraints, .. } => {
            return Ok(if constraints.len() >= 2 {
                Verdict::forbidden("Coro 3.8")
            } else {
                hyperplane_example(n, constraints[0].axis, constraints[0].value)
            });
        }
        Region::AffineImage { matrix, offset } => {
            let zero: Vec<usize> = (0..n).filter(|&j| is_zero_row(&matrix[j])).collect();
            match zero.len() {
                0 => {}
                1 => {
                    let j = zero[0];
                    return Ok(if affine_rank(matrix) == n - 1 {
                        hyperplane_example(n, Axis::from_index(j), offset[j])
                    } else {
                        Verdict::forbidden("Thm 3.4")
                            .with_note("a proper subset of a coordinate hyperplane carries no constant multiple of its Lebesgue measure")
                    });
                }
                _ => return Ok(Verdict::forbidden("Coro 3.8")),
            }
        }
        _ => {}
    }

    // (2), (3)
    if let Some(v) = witnessed_rule(region)? {
        return Ok(v);
    }

    // (4) cross rule
    if n >= 2 {
        let covered = |has: &dyn Fn(usize) -> bool| (0..n).all(has);
        let cross = match region {
            Region::CrossComplement { strips, .. } => covered(&|j| strips.iter().any(|s| s.axis.index() == j)),
            Region::Box { bounds } => covered(&|j| bounds[j].lo.is_some() || bounds[j].hi.is_some()),
            _ => false,
        };
        if cross {
            return Ok(Verdict::forbidden("Thm 3.23"));
        }
    }

    // (5) transformed witnessed sets
    if let Region::MoebiusImage { inner, maps } = region {
        if witnessed_rule(inner)?.is_some() {
            let mut v = Verdict::forbidden("Coro 3.21");
            for m in maps {
                v = v.with_note(hyperplane_note(m.axis, m.pole));
            }
            return Ok(v);
        }
    }

    // (6) catalog
    if let Some(v) = catalog_match(region) {
        return Ok(v);
    }

    // (7)
    Ok(match region {
        Region::AffineImage { matrix, .. } if n == 2 && affine_rank(matrix) == 1 => Verdict::undecided(Some(
            "negative-slope lines other than the anti-diagonal have no encoded example measure",
        )),
        _ => Verdict::undecided(None),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::{transform_region, AxisStrip, AxisValue};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma_witness_examples() {
        let d = Region::diagonal(3);
        let Region::AffineImage { matrix, offset } = &d else { unreachable!() };
        let z = sigma_witness(matrix, offset, Axis::new(1), Axis::new(2), 1.0).unwrap();
        assert_eq!(z.coords(), &[i(), i(), i()]);
        let m = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let z = sigma_witness(&m, &[1.0, 0.0, 0.0], Axis::new(1), Axis::new(2), 2.0).unwrap();
        assert_eq!(z.coords(), &[i(), c(-2.0, 2.0), i()]);
        assert!(sigma_witness(&m, &[0.0; 3], Axis::new(1), Axis::new(2), -2.0).is_err());
        assert!(sigma_witness(&m, &[0.0; 3], Axis::new(1), Axis::new(3), 1.0).is_err());
    }

    #[test]
    fn strip_witness_construction() {
        let z = strip_witness(1.0, -1.0, 1.0, Axis::new(1), Axis::new(2), 2).unwrap();
        assert!((z.coords()[0] - c(0.0, 1.65)).norm() < 1e-12);
        assert!((z.coords()[1] - c(2.0, 1.65)).norm() < 1e-12);
        for (a, b1, b2) in [(1.0, -1.0, 0.0), (2.0, -3.0, 5.0), (0.5, 1.0, 2.0), (3.0, -10.0, -9.0)] {
            let z = strip_witness(a, b1, b2, Axis::new(2), Axis::new(1), 3).unwrap();
            assert!(z.coords().iter().all(|w| w.im > 0.0));
        }
        assert!(strip_witness(0.0, -1.0, 1.0, Axis::new(1), Axis::new(2), 2).is_err());
        assert!(strip_witness(1.0, 1.0, 1.0, Axis::new(1), Axis::new(2), 2).is_err());
    }

    #[test]
    fn eight_case_table() {
        let v = classify(&Region::diagonal(2)).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::Forbidden, "Thm 3.11"));
        assert!(v.witness.is_some());
        let v = classify(&Region::diagonal(3)).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::Forbidden, "Thm 3.11"));
        let v = classify(&Region::line(-1.0, 0.0)).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::KnownAdmissible, "Example 3.13"));
        let plane = Region::AffineImage {
            matrix: vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![-1.0, -1.0, 0.0]],
            offset: vec![0.0; 3],
        };
        let v = classify(&plane).unwrap();
        assert_eq!(v.kind, VerdictKind::KnownAdmissible);
        assert_eq!(v.notes, vec!["Theorem 3.11 does not apply".to_string()]);
        let strip = Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(2), alpha: 1.0, beta1: -1.0, beta2: 1.0 };
        let v = classify(&strip).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::Forbidden, "Thm 3.14"));
        assert!(v.witness.is_some());
        let v = classify(&Region::first_orthant(2)).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::Forbidden, "Thm 3.23"));
        let v = classify(&transform_region(&Region::diagonal(2), Axis::new(1), 0.0)).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::Forbidden, "Coro 3.21"));
        assert_eq!(v.notes, vec!["requires μ|_{H₁(0)} ≡ 0".to_string()]);
        let cross = Region::CrossComplement {
            n: 2,
            strips: vec![
                AxisStrip { axis: Axis::new(1), lo: -1.0, hi: 1.0 },
                AxisStrip { axis: Axis::new(2), lo: -1.0, hi: 1.0 },
            ],
        };
        let v = classify(&cross).unwrap();
        assert_eq!((v.kind, v.citation.as_str()), (VerdictKind::Forbidden, "Thm 3.23"));
        assert!(v.witness.is_none());
    }

    #[test]
    fn other_rules() {
        assert_eq!(classify(&Region::line(-2.0, 1.0)).unwrap().kind, VerdictKind::Undecided);
        assert_eq!(classify(&Region::line(3.0, 1.0)).unwrap().citation, "Thm 3.11");
        let h = classify(&Region::hyperplane(2, Axis::new(1), 2.0)).unwrap();
        assert_eq!((h.kind, h.citation.as_str()), (VerdictKind::KnownAdmissible, "Thm 3.4"));
        let point = Region::CoordinateAffine {
            n: 2,
            constraints: vec![
                AxisValue { axis: Axis::new(1), value: 0.0 },
                AxisValue { axis: Axis::new(2), value: 0.0 },
            ],
        };
        assert_eq!(classify(&point).unwrap().citation, "Coro 3.8");
        let vertical = Region::AffineImage { matrix: vec![vec![0.0], vec![1.0]], offset: vec![1.0, 0.0] };
        assert_eq!(classify(&vertical).unwrap().kind, VerdictKind::KnownAdmissible);
        let negative_strip =
            Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(2), alpha: -1.0, beta1: 0.0, beta2: 1.0 };
        assert_eq!(classify(&negative_strip).unwrap().kind, VerdictKind::Undecided);
        let half =
            Region::Box { bounds: vec![crate::region::Interval { lo: Some(0.0), hi: None }, Default::default()] };
        assert_eq!(classify(&half).unwrap().kind, VerdictKind::Undecided);
        assert_eq!(classify(&Region::first_orthant(1)).unwrap().kind, VerdictKind::Undecided);
        assert_eq!(
            classify(&Region::AffineImage { matrix: vec![vec![1.0, 0.0], vec![0.0, 1.0]], offset: vec![0.0; 2] })
                .unwrap()
                .represents
                .as_deref(),
            Some("i")
        );
    }

    #[test]
    fn malformed_regions_are_rejected() {
        let bad = Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(1), alpha: 1.0, beta1: 0.0, beta2: 1.0 };
        assert!(classify(&bad).is_err());
    }
}
