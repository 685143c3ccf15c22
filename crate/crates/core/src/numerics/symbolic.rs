//! Exact bookkeeping for labelled irrationals.
//!
//! A labelled coordinate such as `sqrt2`, `-3/2*sqrt5` or `pi` is read as a
//! rational multiple of a symbol. Symbols are square roots of square-free
//! integers or opaque names (`pi`, `e`, user labels, unlabelled floats). The
//! distinct non-constant monomials are taken to be linearly independent over
//! Q together with 1; that is the meaning of a declared tag.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

use super::dd::{self, DoubleDouble};
use crate::error::{GrlError, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Square-free radicand; 1 means no square-root factor.
    pub radicand: u64,
    /// Sorted opaque factors.
    pub opaque: Vec<String>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            radicand: 1,
            opaque: Vec::new(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.radicand == 1 && self.opaque.is_empty()
    }

    pub fn opaque(name: &str) -> Self {
        Monomial {
            radicand: 1,
            opaque: vec![name.to_string()],
        }
    }

    /// `sqrt(n)` as `(s, monomial)` with `sqrt(n) = s·sqrt(radicand)`.
    pub fn sqrt(n: u64) -> (i64, Self) {
        let (s, r) = square_split(n);
        (
            s as i64,
            Monomial {
                radicand: r,
                opaque: Vec::new(),
            },
        )
    }

    fn times(&self, other: &Monomial) -> (i64, Monomial) {
        let (s, r) = square_split(self.radicand * other.radicand);
        let mut opaque: Vec<String> = self.opaque.iter().chain(&other.opaque).cloned().collect();
        opaque.sort();
        (s as i64, Monomial { radicand: r, opaque })
    }

    fn value(&self) -> Option<DoubleDouble> {
        let mut v = DoubleDouble::sqrt_of(self.radicand);
        for name in &self.opaque {
            v = v * named_constant(name)?;
        }
        Some(v)
    }

    fn name(&self) -> Option<String> {
        match (self.radicand, self.opaque.as_slice()) {
            (r, []) if r > 1 => Some(format!("sqrt{r}")),
            (1, [name]) if !name.starts_with("float:") => Some(name.clone()),
            _ => None,
        }
    }
}

fn named_constant(name: &str) -> Option<DoubleDouble> {
    match name {
        "pi" => Some(dd::PI),
        "e" => Some(dd::E),
        _ => None,
    }
}

/// Splits `n = s² · r` with `r` square-free.
fn square_split(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        while n.is_multiple_of(p * p) {
            n /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, n)
}

/// Finite Q-linear combination of monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicReal {
    terms: BTreeMap<Monomial, Rational64>,
}

impl SymbolicReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: Rational64) -> Self {
        Self::term(r, Monomial::one())
    }

    pub fn term(coef: Rational64, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(m, coef);
        }
        SymbolicReal { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational64)> {
        self.terms.iter()
    }

    /// The value when no irrational monomial survives.
    pub fn as_rational(&self) -> Option<Rational64> {
        match self.terms.len() {
            0 => Some(Rational64::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(*c)
            }
            _ => None,
        }
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> Rational64 {
        self.terms.get(m).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn add(&self, other: &SymbolicReal) -> SymbolicReal {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert_with(Rational64::zero);
            *e += *c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }

    pub fn neg(&self) -> SymbolicReal {
        SymbolicReal {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -*c)).collect(),
        }
    }

    pub fn mul(&self, other: &SymbolicReal) -> SymbolicReal {
        let mut out = SymbolicReal::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let (s, m) = ma.times(mb);
                out = out.add(&SymbolicReal::term(*ca * *cb * Rational64::from_integer(s), m));
            }
        }
        out
    }

    /// High-precision value, when every opaque factor is a known constant.
    pub fn value(&self) -> Option<DoubleDouble> {
        let mut acc = DoubleDouble::ZERO;
        for (m, c) in &self.terms {
            acc = acc + scale(m.value()?, *c);
        }
        Some(acc)
    }

    /// Canonical single-term label, if representable.
    pub fn label(&self) -> Option<String> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let name = m.name()?;
        Some(render_label(*c, &name))
    }
}

fn scale(v: DoubleDouble, c: Rational64) -> DoubleDouble {
    (v * DoubleDouble::from_i128(*c.numer() as i128)).div_f64(*c.denom() as f64)
}

fn render_label(c: Rational64, name: &str) -> String {
    let mut s = String::new();
    if c.is_negative() {
        s.push('-');
    }
    let a = c.abs();
    let (p, q) = (*a.numer(), *a.denom());
    if p != 1 {
        if q == 1 {
            let _ = write!(s, "{p}*");
        } else {
            let _ = write!(s, "{p}/{q}*");
        }
        s.push_str(name);
    } else {
        s.push_str(name);
        if q != 1 {
            let _ = write!(s, "/{q}");
        }
    }
    s
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || GrlError::Parse(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => Ok(Rational64::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

/// Parses `[-][coef*]name[/den]`.
pub fn parse_label(label: &str) -> Result<(Rational64, Monomial)> {
    let bad = || GrlError::Parse(format!("unrecognised irrational label '{label}'"));
    let mut body = label.trim();
    let mut coef = Rational64::one();
    if let Some(rest) = body.strip_prefix('-') {
        coef = -coef;
        body = rest;
    }
    if let Some((c, rest)) = body.split_once('*') {
        coef *= parse_rational(c)?;
        body = rest;
    }
    if let Some((name, den)) = body.split_once('/') {
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        coef /= Rational64::from_integer(den);
        body = name;
    }
    let body = body.trim();
    if let Some(n) = body.strip_prefix("sqrt") {
        if let Ok(n) = n.parse::<u64>() {
            let (s, m) = Monomial::sqrt(n);
            return Ok((coef * Rational64::from_integer(s), m));
        }
    }
    if !valid_identifier(body) {
        return Err(bad());
    }
    Ok((coef, Monomial::opaque(body)))
}

/// Symbol for an unlabelled float; `x` and `-x` share it.
pub fn float_symbol(value: f64) -> (Rational64, Monomial) {
    let sign = if value < 0.0 { -1 } else { 1 };
    (
        Rational64::from_integer(sign),
        Monomial::opaque(&format!("float:{:016x}", value.abs().to_bits())),
    )
}

/// Value of a parsed label when its symbol is a known constant.
pub fn label_value(coef: Rational64, m: &Monomial) -> Option<DoubleDouble> {
    Some(scale(m.value()?, coef))
}
