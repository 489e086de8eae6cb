//! Fixed-precision complex numbers on `astro-float`.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use crate::exact::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary precision used for `digits` decimal digits, with guard bits.
pub fn bits_for(digits: u32) -> usize {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 64
}

pub fn pi(bits: usize) -> BigFloat {
    with_cc(|cc| cc.pi(bits, RM))
}

pub fn float_from_bigint(n: &BigInt, bits: usize) -> BigFloat {
    match i64::try_from(n) {
        Ok(v) => BigFloat::from_i64(v, bits),
        Err(_) => with_cc(|cc| BigFloat::parse(&n.to_string(), Radix::Dec, bits, RM, cc)),
    }
}

pub fn float_from_rational(r: &Rational, bits: usize) -> BigFloat {
    float_from_bigint(r.numer(), bits).div(&float_from_bigint(r.denom(), bits), bits, RM)
}

pub fn float_to_string(x: &BigFloat) -> String {
    with_cc(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
}

pub fn float_to_f64(x: &BigFloat) -> f64 {
    float_to_string(x).parse().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: BigFloat,
    pub im: BigFloat,
    pub bits: usize,
}

impl BigComplex {
    pub fn new(re: BigFloat, im: BigFloat, bits: usize) -> Self {
        BigComplex { re, im, bits }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_i64(0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_i64(1, bits)
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        BigComplex { re: BigFloat::from_i64(v, bits), im: BigFloat::from_i64(0, bits), bits }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        BigComplex { re: BigFloat::from_f64(re, bits), im: BigFloat::from_f64(im, bits), bits }
    }

    pub fn from_real(re: BigFloat, bits: usize) -> Self {
        BigComplex { re, im: BigFloat::from_i64(0, bits), bits }
    }

    pub fn from_rational(r: &Rational, bits: usize) -> Self {
        Self::from_real(float_from_rational(r, bits), bits)
    }

    /// `i`.
    pub fn i(bits: usize) -> Self {
        BigComplex { re: BigFloat::from_i64(0, bits), im: BigFloat::from_i64(1, bits), bits }
    }

    /// `e^{2πi num/den}`.
    pub fn root_of_unity(num: i64, den: u64, bits: usize) -> Self {
        let w = bits + 32;
        let theta = pi(w)
            .mul(&BigFloat::from_i64(2 * num, w), w, RM)
            .div(&BigFloat::from_u64(den, w), w, RM);
        let (c, s) = with_cc(|cc| (theta.cos(w, RM, cc), theta.sin(w, RM, cc)));
        BigComplex::new(c, s, w).with_bits(bits)
    }

    pub fn with_bits(mut self, bits: usize) -> Self {
        self.re.set_precision(bits, RM).ok();
        self.im.set_precision(bits, RM).ok();
        self.bits = bits;
        self
    }

    pub fn conj(&self) -> Self {
        BigComplex { re: self.re.clone(), im: BigFloat::neg(&self.im), bits: self.bits }
    }

    pub fn scale(&self, x: &BigFloat) -> Self {
        let b = self.bits;
        BigComplex { re: self.re.mul(x, b, RM), im: self.im.mul(x, b, RM), bits: b }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&float_from_rational(r, self.bits))
    }

    pub fn norm_sqr(&self) -> BigFloat {
        let b = self.bits;
        self.re.mul(&self.re, b, RM).add(&self.im.mul(&self.im, b, RM), b, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm_sqr().sqrt(self.bits, RM)
    }

    pub fn abs_f64(&self) -> f64 {
        float_to_f64(&self.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn inv(&self) -> Self {
        let b = self.bits;
        let d = self.norm_sqr();
        BigComplex { re: self.re.div(&d, b, RM), im: BigFloat::neg(&self.im).div(&d, b, RM), bits: b }
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.inv()
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut out = BigComplex::one(self.bits);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (float_to_f64(&self.re), float_to_f64(&self.im))
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        let b = self.bits.max(o.bits);
        BigComplex { re: self.re.add(&o.re, b, RM), im: self.im.add(&o.im, b, RM), bits: b }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        let b = self.bits.max(o.bits);
        BigComplex { re: self.re.sub(&o.re, b, RM), im: self.im.sub(&o.im, b, RM), bits: b }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        let b = self.bits.max(o.bits);
        let re = self.re.mul(&o.re, b, RM).sub(&self.im.mul(&o.im, b, RM), b, RM);
        let im = self.re.mul(&o.im, b, RM).add(&self.im.mul(&o.re, b, RM), b, RM);
        BigComplex { re, im, bits: b }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: BigFloat::neg(&self.re), im: BigFloat::neg(&self.im), bits: self.bits }
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", float_to_string(&self.re), float_to_string(&self.im))
    }
}

impl Serialize for BigComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("BigComplex", 2)?;
        st.serialize_field("re", &float_to_string(&self.re))?;
        st.serialize_field("im", &float_to_string(&self.im))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn pi_and_roots() {
        let b = bits_for(50);
        let s = float_to_string(&pi(b));
        assert!(s.starts_with("3.14159265358979323846264338327950288419716939937510"), "{s}");
        let z = BigComplex::root_of_unity(1, 4, b);
        assert!((&z - &BigComplex::i(b)).abs_f64() < 1e-55);
        let w = BigComplex::root_of_unity(1, 7, b).powi(7);
        assert!((&w - &BigComplex::one(b)).abs_f64() < 1e-50);
    }

    #[test]
    fn field_operations() {
        let b = bits_for(40);
        let x = BigComplex::from_f64(1.5, -2.0, b);
        let y = BigComplex::from_f64(-0.25, 3.0, b);
        let back = &x.div(&y) * &y;
        assert!((&back - &x).abs_f64() < 1e-45);
        let r = BigComplex::from_rational(&ratio(-1, 3), b);
        assert!((float_to_f64(&r.re) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(BigComplex::from_f64(3.0, 4.0, b).abs_f64(), 5.0);
    }
}
