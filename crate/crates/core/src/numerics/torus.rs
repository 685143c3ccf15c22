use serde::{Deserialize, Serialize};

use crate::error::{GrlError, Result};

/// A point of the torus `[0,1)^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    /// Reduces `coords` modulo 1.
    pub fn new(coords: &[f64]) -> Result<Self> {
        reduce_mod1(coords)
    }

    pub fn origin(m: usize) -> Self {
        TorusPoint(vec![0.0; m])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self + shift` reduced modulo 1.
    pub fn translate(&self, shift: &[f64]) -> TorusPoint {
        TorusPoint(self.0.iter().zip(shift).map(|(a, b)| frac(a + b)).collect())
    }

    pub(crate) fn from_reduced(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| (0.0..1.0).contains(c)));
        TorusPoint(coords)
    }
}

/// `x - floor(x)`, with the rounding case `1.0` folded back to `0.0`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Reduces every entry modulo 1 into `[0, 1)`.
pub fn reduce_mod1(v: &[f64]) -> Result<TorusPoint> {
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(GrlError::invalid(format!("cannot reduce non-finite value {bad}")));
    }
    Ok(TorusPoint(v.iter().map(|&x| frac(x)).collect()))
}

/// Splits `v` into its fractional part in `[0,1)` and integer part `floor(v)`.
pub fn frac_int_split(v: f64) -> Result<(f64, i64)> {
    if !v.is_finite() {
        return Err(GrlError::invalid(format!("cannot split non-finite value {v}")));
    }
    let fl = v.floor();
    let f = v - fl;
    if f >= 1.0 {
        Ok((0.0, fl as i64 + 1))
    } else {
        Ok((f, fl as i64))
    }
}

/// Circular distance between two numbers modulo 1.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}
