//! Integer-coefficient arithmetic in `ℤ[q]/([p]^n)` on dense `i128` vectors.
//!
//! Every value the miner vectorizes has integer coefficients (the closed-form inverse of `[m]`
//! is an integer polynomial), so this path is exact; overflow is reported, never wrapped.

use num_bigint::BigInt;
use num_traits::One;

use super::cycmod::CycModElement;
use super::poly::{q_int, Poly};
use super::rational::Rational;
use crate::error::{Error, Result};

pub type ZElem = Vec<i128>;

#[derive(Clone, Debug)]
pub struct ZRing {
    pub p: u64,
    pub n: u32,
    dim: usize,
    /// Monic `[p]^n`, lowest coefficient first, leading 1 omitted.
    modulus: Vec<i128>,
}

fn ck_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or(Error::Overflow("ℤ[q]/([p]^n) multiplication"))
}

fn ck_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or(Error::Overflow("ℤ[q]/([p]^n) addition"))
}

impl ZRing {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !crate::primes::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::ZeroPower);
        }
        let m = q_int(p)?.pow(n);
        let mut modulus: Vec<i128> = m
            .coeffs()
            .iter()
            .map(|c| i128::try_from(c.to_integer()).expect("[p]^n has small coefficients"))
            .collect();
        modulus.pop();
        Ok(ZRing { p, n, dim: modulus.len(), modulus })
    }

    /// `n(p-1)`, the number of coefficients of a residue.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zero(&self) -> ZElem {
        vec![0; self.dim]
    }

    pub fn one(&self) -> ZElem {
        self.constant(1)
    }

    pub fn constant(&self, c: i128) -> ZElem {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// Reduces an integer polynomial of any degree.
    pub fn reduce(&self, f: &[i128]) -> Result<ZElem> {
        let mut r = f.to_vec();
        let d = self.dim;
        if r.len() > d {
            for i in (d..r.len()).rev() {
                let c = r[i];
                if c == 0 {
                    continue;
                }
                r[i] = 0;
                for (j, &mc) in self.modulus.iter().enumerate() {
                    if mc != 0 {
                        r[i - d + j] = r[i - d + j]
                            .checked_sub(ck_mul(c, mc)?)
                            .ok_or(Error::Overflow("ℤ[q]/([p]^n) reduction"))?;
                    }
                }
            }
            r.truncate(d);
        }
        r.resize(d, 0);
        Ok(r)
    }

    pub fn add(&self, a: &[i128], b: &[i128]) -> Result<ZElem> {
        a.iter().zip(b).map(|(&x, &y)| ck_add(x, y)).collect()
    }

    pub fn add_assign(&self, a: &mut [i128], b: &[i128]) -> Result<()> {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = ck_add(*x, y)?;
        }
        Ok(())
    }

    pub fn sub(&self, a: &[i128], b: &[i128]) -> Result<ZElem> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| x.checked_sub(y).ok_or(Error::Overflow("ℤ[q]/([p]^n) subtraction")))
            .collect()
    }

    pub fn scale(&self, a: &[i128], c: i128) -> Result<ZElem> {
        a.iter().map(|&x| ck_mul(x, c)).collect()
    }

    pub fn mul(&self, a: &[i128], b: &[i128]) -> Result<ZElem> {
        let d = self.dim;
        let mut prod = vec![0i128; 2 * d - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = ck_add(prod[i + j], ck_mul(x, y)?)?;
                }
            }
        }
        self.reduce(&prod)
    }

    /// `q^e`.
    pub fn q_pow(&self, e: usize) -> Result<ZElem> {
        let mut f = vec![0i128; e + 1];
        f[e] = 1;
        self.reduce(&f)
    }

    /// Successive powers `q^0, q^1, …, q^emax`.
    pub fn q_powers(&self, emax: usize) -> Result<Vec<ZElem>> {
        let mut out = Vec::with_capacity(emax + 1);
        let mut cur = self.one();
        for _ in 0..=emax {
            let mut next = vec![0i128; self.dim + 1];
            next[1..].copy_from_slice(&cur);
            out.push(cur);
            cur = self.reduce(&next)?;
        }
        Ok(out)
    }

    pub fn from_poly(&self, f: &Poly) -> Result<ZElem> {
        let ints: Option<Vec<i128>> = f
            .coeffs()
            .iter()
            .map(|c| {
                if c.denom().is_one() {
                    i128::try_from(c.to_integer()).ok()
                } else {
                    None
                }
            })
            .collect();
        let ints = ints.ok_or(Error::Overflow("non-integral or oversized coefficient"))?;
        self.reduce(&ints)
    }

    pub fn to_poly(&self, a: &[i128]) -> Poly {
        Poly::new(a.iter().map(|&c| Rational::from_integer(BigInt::from(c))).collect())
    }

    pub fn to_cycmod(&self, a: &[i128]) -> CycModElement {
        CycModElement::new(self.to_poly(a), self.p, self.n).expect("integer residues are p-integral")
    }

    /// Closed-form `[m]^{-1}` (integer coefficients), `1 <= m < p`.
    pub fn inv_qint(&self, m: u64) -> Result<ZElem> {
        let (p, n) = (self.p, self.n);
        if m == 0 || m >= p {
            return Err(Error::QIntOutOfRange { m, p });
        }
        let l = (1..p).find(|l| (m * l) % p == 1).unwrap();
        let alpha = (m * l - 1) / p;
        let mut head = vec![0i128; ((l - 1) * m + 1) as usize];
        for i in 0..l {
            head[(i * m) as usize] = 1;
        }
        let head = self.reduce(&head)?;
        if alpha == 0 || n == 1 {
            return Ok(head);
        }
        // x = -q [alpha]_{q^p} [p]
        let mut x = vec![0i128; ((alpha - 1) * p + p + 1) as usize];
        for a in 0..alpha {
            for b in 0..p {
                x[(a * p + b + 1) as usize] -= 1;
            }
        }
        let x = self.reduce(&x)?;
        let mut sum = self.one();
        let mut pw = self.one();
        for _ in 1..n {
            pw = self.mul(&pw, &x)?;
            sum = self.add(&sum, &pw)?;
        }
        self.mul(&head, &sum)
    }
}
