//! Coordinates: axis labels, points of the poly-upper half-plane and polydisk,
//! and the textual complex-number format used in scene files and reports.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};

/// A coordinate axis. Displayed and serialized 1-based (`t_1, …, t_n`),
/// stored 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Axis(usize);

impl Axis {
    /// Axis from its 1-based label. Panics on 0.
    pub fn new(label: usize) -> Axis {
        assert!(label >= 1, "axis labels start at 1");
        Axis(label - 1)
    }

    pub fn from_index(index: usize) -> Axis {
        Axis(index)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn label(self) -> usize {
        self.0 + 1
    }

    pub(crate) fn check(self, n: usize) -> Result<()> {
        if self.0 < n {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("axis {} out of range for dimension {n}", self.label())))
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl Serialize for Axis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.label() as u64)
    }
}

impl<'de> Deserialize<'de> for Axis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let label = u64::deserialize(d)?;
        if label == 0 {
            return Err(serde::de::Error::custom("axis labels start at 1"));
        }
        Ok(Axis(label as usize - 1))
    }
}

/// Point of the poly-upper half-plane: every coordinate has positive imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlanePoint(Vec<Complex64>);

impl HalfPlanePoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidArgument("empty point".into()));
        }
        for (j, w) in z.iter().enumerate() {
            if !(w.im > 0.0 && w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {} = {} is not in the upper half-plane",
                    j + 1,
                    format_complex(*w)
                )));
            }
        }
        Ok(HalfPlanePoint(z))
    }

    /// `(i, …, i)`.
    pub fn diagonal_i(n: usize) -> Self {
        HalfPlanePoint(vec![Complex64::i(); n])
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Same point with coordinate `axis` replaced.
    pub fn with(&self, axis: Axis, value: Complex64) -> Result<Self> {
        let mut z = self.0.clone();
        z[axis.index()] = value;
        HalfPlanePoint::new(z)
    }
}

impl fmt::Display for HalfPlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|z| format_complex_short(*z)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for HalfPlanePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        complex_list::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for HalfPlanePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let z = complex_list::deserialize(d)?;
        HalfPlanePoint::new(z).map_err(serde::de::Error::custom)
    }
}

/// Point of the open unit polydisk.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskPoint(Vec<Complex64>);

impl DiskPoint {
    pub fn new(w: Vec<Complex64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidArgument("empty point".into()));
        }
        if let Some(bad) = w.iter().find(|w| !(w.norm() < 1.0)) {
            return Err(Error::InvalidArgument(format!("{} is not in the open unit disk", format_complex(*bad))));
        }
        Ok(DiskPoint(w))
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl Serialize for DiskPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        complex_list::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for DiskPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = complex_list::deserialize(d)?;
        DiskPoint::new(w).map_err(serde::de::Error::custom)
    }
}

/// Serde helpers writing complex numbers as strings like `"1-2.5i"`.
pub mod complex_list {
    use super::*;

    pub fn serialize<S: Serializer>(z: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<String> = z.iter().map(|z| format_complex(*z)).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        let text = Vec::<String>::deserialize(d)?;
        text.iter().map(|t| parse_complex(t).map_err(serde::de::Error::custom)).collect()
    }
}

/// Parses `i`, `-2i`, `3`, `1+2i`, `-1.5e-3-i` and the like.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidArgument(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let real = |p: &str| p.parse::<f64>().map_err(|_| bad());
    let imag = |p: &str| match p {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(p),
    };
    let z = match s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
        None => Complex64::new(real(&s)?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
            match split {
                Some(k) => Complex64::new(real(&body[..k])?, imag(&body[k..])?),
                None => Complex64::new(0.0, imag(body)?),
            }
        }
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(bad())
    }
}

/// Lossless text form (shortest round-trip digits), e.g. `0+1i`.
pub fn format_complex(z: Complex64) -> String {
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Human-facing form rounded to 12 decimals, e.g. `0+1i` for `(-1e-17, 1)`.
pub fn format_complex_short(z: Complex64) -> String {
    let round = |x: f64| {
        let s = format!("{x:.12}");
        let s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    };
    let re = round(z.re);
    let im = round(z.im);
    match im.strip_prefix('-') {
        Some(abs) => format!("{re}-{abs}i"),
        None => format!("{re}+{im}i"),
    }
}
