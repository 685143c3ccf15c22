//! Exact-rational-or-tagged-irrational real numbers.

use std::fmt;

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use super::dd::DoubleDouble;
use super::symbolic::{self, SymbolicReal};
use crate::error::{GrlError, Result};

/// A coordinate of a time-frequency point.
///
/// Rationals are kept in lowest terms with a positive denominator. Irrationals
/// carry a finite float and an optional label (`sqrt2`, `-sqrt3/2`, `pi`, ...)
/// whose symbol is treated as ground truth by the orbit classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum Coordinate {
    Rational(Rational64),
    Irrational { value: f64, label: Option<String> },
}

impl Coordinate {
    pub fn integer(n: i64) -> Self {
        Coordinate::Rational(Rational64::from_integer(n))
    }

    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(GrlError::invalid("zero denominator"));
        }
        Ok(Coordinate::Rational(Rational64::new(p, q)))
    }

    /// An irrational with an optional label. A label naming a known constant
    /// must agree with `value` to 1e-12 relative.
    pub fn irrational(value: f64, label: Option<&str>) -> Result<Self> {
        if !value.is_finite() {
            return Err(GrlError::invalid(format!("irrational value {value} is not finite")));
        }
        let label = match label {
            None => None,
            Some(l) => {
                let (c, m) = symbolic::parse_label(l)?;
                if m.is_one() {
                    return Err(GrlError::invalid(format!("label '{l}' denotes a rational number")));
                }
                if let Some(exact) = symbolic::label_value(c, &m) {
                    let exact = exact.to_f64();
                    if (exact - value).abs() > 1e-12 * exact.abs().max(1.0) {
                        return Err(GrlError::invalid(format!(
                            "value {value} disagrees with label '{l}' ({exact})"
                        )));
                    }
                }
                Some(SymbolicReal::term(c, m).label().unwrap_or_else(|| l.to_string()))
            }
        };
        Ok(Coordinate::Irrational { value, label })
    }

    /// A labelled irrational whose value follows from the label.
    pub fn labelled(label: &str) -> Result<Self> {
        let (c, m) = symbolic::parse_label(label)?;
        let v = symbolic::label_value(c, &m)
            .ok_or_else(|| GrlError::Parse(format!("label '{label}' has no known value")))?;
        Coordinate::irrational(v.to_f64(), Some(label))
    }

    /// Parses `n`, `p/q`, a label such as `sqrt2` or `-3/2*sqrt5`, or `irr:<float>`.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.is_empty() {
            return Err(GrlError::Parse("empty coordinate".into()));
        }
        if let Some(raw) = s.strip_prefix("irr:") {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| GrlError::Parse(format!("bad float in '{text}'")))?;
            return Coordinate::irrational(v, None);
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Coordinate::integer(n));
        }
        if let Some((p, q)) = s.split_once('/') {
            if let (Ok(p), Ok(q)) = (p.trim().parse::<i64>(), q.trim().parse::<i64>()) {
                return Coordinate::rational(p, q);
            }
        }
        let (c, m) = symbolic::parse_label(s)?;
        if m.is_one() {
            return Ok(Coordinate::Rational(c));
        }
        Coordinate::labelled(s)
    }

    /// Comma-separated list of coordinates.
    pub fn parse_list(text: &str) -> Result<Vec<Self>> {
        text.split(',').map(Coordinate::parse).collect()
    }

    pub fn value(&self) -> f64 {
        match self {
            Coordinate::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Coordinate::Irrational { value, .. } => *value,
        }
    }

    pub fn value_dd(&self) -> DoubleDouble {
        match self {
            Coordinate::Rational(r) => DoubleDouble::from_ratio(*r.numer(), *r.denom()),
            Coordinate::Irrational { value, label } => label
                .as_deref()
                .and_then(|l| symbolic::parse_label(l).ok())
                .and_then(|(c, m)| symbolic::label_value(c, &m))
                .unwrap_or(DoubleDouble::from_f64(*value)),
        }
    }

    pub fn as_rational(&self) -> Option<Rational64> {
        match self {
            Coordinate::Rational(r) => Some(*r),
            Coordinate::Irrational { .. } => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coordinate::Rational(_))
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Coordinate::Rational(r) if r.is_integer())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coordinate::Rational(r) if r.is_zero())
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Coordinate::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Coordinate::Irrational { label, .. } => label.as_deref(),
            Coordinate::Rational(_) => None,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Coordinate::Rational(r) => Coordinate::Rational(-*r),
            Coordinate::Irrational { value, label } => {
                let label = label.as_deref().map(|l| {
                    symbolic::parse_label(l)
                        .ok()
                        .and_then(|(c, m)| SymbolicReal::term(-c, m).label())
                        .unwrap_or_else(|| format!("-{l}"))
                });
                Coordinate::Irrational {
                    value: -*value,
                    label,
                }
            }
        }
    }

    /// Symbolic form: rational constant, labelled symbol, or a per-float symbol.
    pub fn symbolic(&self) -> SymbolicReal {
        match self {
            Coordinate::Rational(r) => SymbolicReal::rational(*r),
            Coordinate::Irrational { value, label } => {
                let (c, m) = label
                    .as_deref()
                    .and_then(|l| symbolic::parse_label(l).ok())
                    .unwrap_or_else(|| symbolic::float_symbol(*value));
                SymbolicReal::term(c, m)
            }
        }
    }

    /// Equality of the represented numbers under the declared tags.
    pub fn exact_eq(&self, other: &Coordinate) -> bool {
        match (self, other) {
            (Coordinate::Rational(a), Coordinate::Rational(b)) => a == b,
            (Coordinate::Rational(_), _) | (_, Coordinate::Rational(_)) => false,
            _ => self.symbolic() == other.symbolic(),
        }
    }

    pub fn from_symbolic(s: &SymbolicReal, approx: DoubleDouble) -> Self {
        match s.as_rational() {
            Some(r) => Coordinate::Rational(r),
            None => Coordinate::Irrational {
                value: s.value().unwrap_or(approx).to_f64(),
                label: s.label(),
            },
        }
    }
}

/// `⟨a, b⟩` with exact rational/label arithmetic where available.
pub fn inner_product(a: &[Coordinate], b: &[Coordinate]) -> Result<Coordinate> {
    if a.len() != b.len() {
        return Err(GrlError::invalid(format!(
            "inner product of vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut sym = SymbolicReal::zero();
    let mut approx = DoubleDouble::ZERO;
    for (x, y) in a.iter().zip(b) {
        sym = sym.add(&x.symbolic().mul(&y.symbolic()));
        approx = approx + x.value_dd() * y.value_dd();
    }
    Ok(Coordinate::from_symbolic(&sym, approx))
}

/// `⟨a, b⟩` in double-double precision.
pub fn inner_product_dd(a: &[Coordinate], b: &[Coordinate]) -> DoubleDouble {
    a.iter()
        .zip(b)
        .fold(DoubleDouble::ZERO, |acc, (x, y)| acc + x.value_dd() * y.value_dd())
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Coordinate::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Coordinate::Irrational { label: Some(l), .. } => f.write_str(l),
            Coordinate::Irrational { value, label: None } => write!(f, "irr:{value}"),
        }
    }
}

impl Serialize for Coordinate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coordinate::Rational(r) if r.is_integer() => s.serialize_i64(*r.numer()),
            Coordinate::Rational(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
            Coordinate::Irrational { value, label } => {
                let mut m = s.serialize_map(Some(if label.is_some() { 2 } else { 1 }))?;
                m.serialize_entry("value", value)?;
                if let Some(l) = label {
                    m.serialize_entry("label", l)?;
                }
                m.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CoordinateRepr {
    Int(i64),
    Float(f64),
    Text(String),
    Tagged { value: f64, label: Option<String> },
}

impl<'de> Deserialize<'de> for Coordinate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match CoordinateRepr::deserialize(d)? {
            CoordinateRepr::Int(n) => Ok(Coordinate::integer(n)),
            CoordinateRepr::Float(v) => Coordinate::irrational(v, None).map_err(de::Error::custom),
            CoordinateRepr::Text(t) => Coordinate::parse(&t).map_err(de::Error::custom),
            CoordinateRepr::Tagged { value, label } => {
                Coordinate::irrational(value, label.as_deref()).map_err(de::Error::custom)
            }
        }
    }
}

/// Sign of a coordinate's value (exact for rationals).
pub fn is_negative(c: &Coordinate) -> bool {
    match c {
        Coordinate::Rational(r) => r.is_negative(),
        Coordinate::Irrational { value, .. } => *value < 0.0,
    }
}
