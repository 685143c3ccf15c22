//! Compensated summation with a fixed left-to-right order.

use num_complex::Complex64;

/// Neumaier accumulator for real terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct StableSum {
    sum: f64,
    comp: f64,
}

impl StableSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Neumaier accumulator for complex terms, component-wise.
#[derive(Debug, Clone, Copy, Default)]
pub struct StableComplexSum {
    re: StableSum,
    im: StableSum,
}

impl StableComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of complex terms, bit-reproducible for a given order.
pub fn stable_sum<I: IntoIterator<Item = Complex64>>(terms: I) -> Complex64 {
    let mut acc = StableComplexSum::new();
    for z in terms {
        acc.add(z);
    }
    acc.value()
}

/// Compensated sum of real terms.
pub fn stable_sum_real<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = StableSum::new();
    for x in terms {
        acc.add(x);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn keeps_small_residue() {
        let s = stable_sum([c(1.0), c(-1.0), c(1e-16)]);
        assert_eq!(s, c(1e-16));
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(stable_sum(std::iter::empty()), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn million_tenths_against_exact_rational_sum() {
        // exact sum of the binary value of 0.1 repeated 10^6 times
        let tenth = BigRational::from_float(0.1).unwrap();
        let exact = tenth * BigRational::from_integer(1_000_000.into());
        let exact: f64 = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        let s = stable_sum(std::iter::repeat_n(c(0.1), 1_000_000));
        assert!((s.re - exact).abs() < 1e-9);
        assert!((s.re - 100000.0).abs() < 1e-9);
    }

    #[test]
    fn reproducible() {
        let terms: Vec<Complex64> = (0..1000)
            .map(|k| Complex64::new((k as f64).sin() * 1e8, (k as f64).cos()))
            .collect();
        let a = stable_sum(terms.iter().copied());
        let b = stable_sum(terms.iter().copied());
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}
