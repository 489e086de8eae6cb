//! Exact rationals and their textual form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats as `"num/den"`, the exchange format used by every JSON artifact.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `"a/b"` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// True when the reduced denominator is prime to `p`.
pub fn is_p_integral(r: &Rational, p: u64) -> bool {
    !(r.denom() % BigInt::from(p)).is_zero()
}

/// Reduces a p-integral rational modulo `modulus` (a power of p); the result lies in `[0, modulus)`.
pub fn rational_mod(r: &Rational, p: u64, modulus: &BigInt) -> Result<BigInt> {
    if !is_p_integral(r, p) {
        return Err(Error::Integrality { p, value: fmt_rational(r) });
    }
    let den_inv = mod_inverse(&r.denom().mod_floor(modulus), modulus)
        .ok_or_else(|| Error::Integrality { p, value: fmt_rational(r) })?;
    Ok((r.numer().mod_floor(modulus) * den_inv).mod_floor(modulus))
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.abs().is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, i| a * BigInt::from(i))
}

/// Stirling numbers of the second kind, `S(j, n)`, via `S(j+1, n) = S(j, n-1) + n S(j, n)`.
pub fn stirling2(j: usize, n: usize) -> BigInt {
    let mut row = vec![BigInt::one()];
    for jj in 0..j {
        let mut next = vec![BigInt::zero(); jj + 2];
        for (k, v) in row.iter().enumerate() {
            next[k + 1] += v;
            next[k] += v * BigInt::from(k);
        }
        row = next;
    }
    row.get(n).cloned().unwrap_or_else(BigInt::zero)
}

pub fn abs_bits(r: &Rational) -> u64 {
    r.numer().abs().bits().max(r.denom().bits())
}
