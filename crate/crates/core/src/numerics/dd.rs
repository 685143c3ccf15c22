//! Double-double arithmetic (about 106 bits of mantissa).
//!
//! Used for orbit positions `n·γ mod 1` and relation residuals `⟨r, γ⟩ mod 1`,
//! where plain `f64` loses the fractional digits once `n` or `|r|` grows.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

pub const PI: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::PI,
    lo: 1.224_646_799_147_353_2e-16,
};

pub const E: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::E,
    lo: 1.445_646_891_729_250_2e-16,
};

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    /// `p / q` correctly rounded to double-double precision.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        DoubleDouble::from_i128(p as i128).div_f64(q as f64)
    }

    /// Square root of a non-negative integer (one Newton correction on the `f64` root).
    pub fn sqrt_of(n: u64) -> Self {
        let x = (n as f64).sqrt();
        if x == 0.0 {
            return Self::ZERO;
        }
        let (p, e) = two_prod(x, x);
        let r = (DoubleDouble::from_i128(n as i128) - DoubleDouble { hi: p, lo: e }).to_f64();
        let (hi, lo) = quick_two_sum(x, r / (2.0 * x));
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let r = (self - DoubleDouble { hi: p, lo: e }).to_f64();
        let q2 = r / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            let fl = self.lo.floor();
            let (hi, lo) = quick_two_sum(fh, fl);
            DoubleDouble { hi, lo }
        } else {
            DoubleDouble { hi: fh, lo: 0.0 }
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(self) -> f64 {
        let f = (self - self.floor()).to_f64();
        if f >= 1.0 {
            0.0
        } else if f < 0.0 {
            (f + 1.0).min(f64::from_bits(1.0f64.to_bits() - 1))
        } else {
            f
        }
    }

    /// Distance to the nearest integer.
    pub fn dist_to_integer(self) -> f64 {
        let f = self.frac();
        f.min(1.0 - f)
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        DoubleDouble { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, o: DoubleDouble) -> DoubleDouble {
        self + (-o)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, o: DoubleDouble) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}
