//! Truncated power series `c₀ + c₁t + … + c_{n−1}t^{n−1}` over `BigComplex`.

use serde::Serialize;

use super::complex::BigComplex;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct TruncatedSeries {
    pub coeffs: Vec<BigComplex>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<BigComplex>) -> Self {
        assert!(!coeffs.is_empty(), "series order must be at least 1");
        TruncatedSeries { coeffs }
    }

    pub fn constant(c: BigComplex, order: usize) -> Self {
        let bits = c.bits;
        let mut coeffs = vec![BigComplex::zero(bits); order];
        coeffs[0] = c;
        TruncatedSeries::new(coeffs)
    }

    pub fn one(order: usize, bits: usize) -> Self {
        Self::constant(BigComplex::one(bits), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, l: usize) -> &BigComplex {
        &self.coeffs[l]
    }

    pub fn add(&self, o: &Self) -> Self {
        TruncatedSeries::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        TruncatedSeries::new(self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &BigComplex) -> Self {
        TruncatedSeries::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let bits = self.coeffs[0].bits;
        let mut out = vec![BigComplex::zero(bits); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        TruncatedSeries::new(out)
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut out = TruncatedSeries::one(self.order(), self.coeffs[0].bits);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// `1/f`; needs a nonzero constant term.
    pub fn inv(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::OutOfRange("series inverse needs a nonzero constant term".into()));
        }
        let b0 = self.coeffs[0].inv();
        let mut out: Vec<BigComplex> = vec![b0.clone()];
        for n in 1..self.order() {
            let mut s = BigComplex::zero(b0.bits);
            for i in 1..=n {
                s = &s + &(&self.coeffs[i] * &out[n - i]);
            }
            out.push(-&(&s * &b0));
        }
        Ok(TruncatedSeries::new(out))
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(BigComplex::abs_f64).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::complex::bits_for;

    #[test]
    fn inverse_of_one_minus_t() {
        let b = bits_for(30);
        let f = TruncatedSeries::new(vec![BigComplex::one(b), BigComplex::from_i64(-1, b), BigComplex::zero(b), BigComplex::zero(b)]);
        let g = f.inv().unwrap();
        for c in &g.coeffs {
            assert!((c - &BigComplex::one(b)).abs_f64() < 1e-35);
        }
        let id = f.mul(&g);
        assert!((&id.sub(&TruncatedSeries::one(4, b))).max_abs() < 1e-35);
        assert!(TruncatedSeries::constant(BigComplex::zero(b), 2).inv().is_err());
    }

    #[test]
    fn powers_truncate() {
        let b = bits_for(20);
        let f = TruncatedSeries::new(vec![BigComplex::one(b), BigComplex::one(b), BigComplex::zero(b)]);
        let cube = f.powi(3);
        let want = [1.0, 3.0, 3.0];
        for (c, w) in cube.coeffs.iter().zip(want) {
            assert!((c.to_f64().0 - w).abs() < 1e-20);
        }
    }
}
