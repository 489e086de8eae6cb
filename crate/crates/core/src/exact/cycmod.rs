//! The residue rings `Z_{p,n} = ℤ_(p)[q]/([p]^n)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use super::poly::{q_int, Poly};
use super::rational::{fmt_rational, parse_rational, rational_mod, Rational};
use crate::error::{Error, Result};
use crate::primes::is_prime;

fn modulus_cache() -> &'static RwLock<HashMap<(u64, u32), Arc<Poly>>> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, u32), Arc<Poly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `[p]^n`, memoized; monic with integer coefficients and degree `n(p-1)`.
pub fn qint_power(p: u64, n: u32) -> Arc<Poly> {
    if let Some(m) = modulus_cache().read().unwrap().get(&(p, n)) {
        return m.clone();
    }
    let m = Arc::new(q_int(p).expect("p >= 2").pow(n));
    modulus_cache().write().unwrap().entry((p, n)).or_insert(m).clone()
}

/// Remainder modulo the monic polynomial `m`.
fn rem_monic(f: &Poly, m: &Poly) -> Poly {
    let dm = m.degree().unwrap();
    let Some(df) = f.degree() else { return Poly::zero() };
    if df < dm {
        return f.clone();
    }
    let mc = m.coeffs();
    let mut r = f.coeffs().to_vec();
    for i in (dm..=df).rev() {
        let c = std::mem::take(&mut r[i]);
        if c.is_zero() {
            continue;
        }
        for j in 0..dm {
            if !mc[j].is_zero() {
                r[i - dm + j] -= &c * &mc[j];
            }
        }
    }
    r.truncate(dm);
    Poly::new(r)
}

fn check_ring(p: u64, n: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::ZeroPower);
    }
    Ok(())
}

/// A residue class in `Z_{p,n}`, stored as its reduced representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycModElement {
    p: u64,
    n: u32,
    residue: Poly,
}

/// An integer class modulo `p^n`, with `0 <= value < modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModInt {
    pub value: BigInt,
    pub modulus: BigInt,
}

/// Reduces `f` into `Z_{p,n}`; fails when some coefficient is not p-integral.
pub fn reduce(f: &Poly, p: u64, n: u32) -> Result<CycModElement> {
    CycModElement::new(f.clone(), p, n)
}

impl CycModElement {
    pub fn new(f: Poly, p: u64, n: u32) -> Result<Self> {
        check_ring(p, n)?;
        if let Some(c) = f.first_non_integral(p) {
            return Err(Error::Integrality { p, value: fmt_rational(c) });
        }
        let residue = rem_monic(&f, &qint_power(p, n));
        Ok(CycModElement { p, n, residue })
    }

    /// For callers that already hold a reduced, p-integral residue.
    fn from_reduced(residue: Poly, p: u64, n: u32) -> Self {
        CycModElement { p, n, residue }
    }

    pub fn zero(p: u64, n: u32) -> Result<Self> {
        check_ring(p, n)?;
        Ok(Self::from_reduced(Poly::zero(), p, n))
    }

    pub fn one(p: u64, n: u32) -> Result<Self> {
        Self::constant(Rational::one(), p, n)
    }

    pub fn constant(c: Rational, p: u64, n: u32) -> Result<Self> {
        Self::new(Poly::constant(c), p, n)
    }

    pub fn q(p: u64, n: u32) -> Result<Self> {
        Self::new(Poly::q(), p, n)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn residue(&self) -> &Poly {
        &self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    /// Same ring, new value; the value is reduced and checked.
    pub fn lift(&self, f: &Poly) -> Result<Self> {
        Self::new(f.clone(), self.p, self.n)
    }

    pub fn scale(&self, c: &Rational) -> Result<Self> {
        if let Some(bad) = Some(c).filter(|c| !super::rational::is_p_integral(c, self.p)) {
            return Err(Error::Integrality { p: self.p, value: fmt_rational(bad) });
        }
        Ok(Self::from_reduced(self.residue.scale(c), self.p, self.n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::from_reduced(Poly::one(), self.p, self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Image in `Z_{p,n'}` for `n' <= n`.
    pub fn project(&self, n2: u32) -> Result<Self> {
        if n2 == 0 || n2 > self.n {
            return Err(Error::OutOfRange(format!("projection to n = {n2} from n = {}", self.n)));
        }
        Ok(Self::from_reduced(rem_monic(&self.residue, &qint_power(self.p, n2)), self.p, n2))
    }

    /// Inverse through the extended Euclidean algorithm against `[p]^n`.
    pub fn inv(&self) -> Result<Self> {
        let not_inv = Error::NotInvertible { p: self.p, n: self.n };
        if self.is_zero() {
            return Err(not_inv);
        }
        let m = qint_power(self.p, self.n);
        // invariant: s_i * residue ≡ r_i (mod m)
        let (mut r0, mut r1) = ((*m).clone(), self.residue.clone());
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.div_rem(&r1);
            let s = &s0 - &(&qq * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.degree() != Some(0) {
            return Err(not_inv);
        }
        let c = r0.coeff(0).recip();
        Self::new(s0.scale(&c), self.p, self.n)
    }

    /// `q ↦ 1`, landing in `ℤ/p^nℤ`.
    pub fn eval_at_one_mod(&self) -> ModInt {
        let modulus = BigInt::from(self.p).pow(self.n);
        let value = rational_mod(&self.residue.eval_one(), self.p, &modulus)
            .expect("residues are p-integral by construction");
        ModInt { value, modulus }
    }

    fn assert_same_ring(&self, o: &Self) {
        assert!(
            self.p == o.p && self.n == o.n,
            "{}",
            Error::RingMismatch(self.p, self.n, o.p, o.n)
        );
    }

    pub fn to_json(&self) -> CycModJson {
        CycModJson { p: self.p, n: self.n, coeffs: self.residue.coeff_strings() }
    }

    pub fn from_json(j: &CycModJson) -> Result<Self> {
        let coeffs = j.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Self::new(Poly::new(coeffs), j.p, j.n)
    }
}

/// `[m]^{-1}` by the closed form `[l]_{q^m} Σ_{j<n} (−q[α]_{q^p}[p])^j`, where `ml − pα = 1`.
pub fn inv_qint_closed_form(m: u64, p: u64, n: u32) -> Result<CycModElement> {
    check_ring(p, n)?;
    if m == 0 || m >= p {
        return Err(Error::QIntOutOfRange { m, p });
    }
    let l = (1..p).find(|l| (m * l) % p == 1).expect("m is a unit mod p");
    let alpha = (m * l - 1) / p;
    let head = q_int(l)?.compose_power(m as usize);
    if alpha == 0 {
        return CycModElement::new(head, p, n);
    }
    let x = CycModElement::new(
        -&(&Poly::q() * &(&q_int(alpha)?.compose_power(p as usize) * &q_int(p)?)),
        p,
        n,
    )?;
    let mut sum = CycModElement::one(p, n)?;
    let mut pw = sum.clone();
    for _ in 1..n {
        pw = &pw * &x;
        sum = &sum + &pw;
    }
    Ok(&CycModElement::new(head, p, n)? * &sum)
}

impl Add for &CycModElement {
    type Output = CycModElement;
    fn add(self, o: &CycModElement) -> CycModElement {
        self.assert_same_ring(o);
        CycModElement::from_reduced(&self.residue + &o.residue, self.p, self.n)
    }
}

impl Sub for &CycModElement {
    type Output = CycModElement;
    fn sub(self, o: &CycModElement) -> CycModElement {
        self.assert_same_ring(o);
        CycModElement::from_reduced(&self.residue - &o.residue, self.p, self.n)
    }
}

impl Mul for &CycModElement {
    type Output = CycModElement;
    fn mul(self, o: &CycModElement) -> CycModElement {
        self.assert_same_ring(o);
        let prod = &self.residue * &o.residue;
        CycModElement::from_reduced(rem_monic(&prod, &qint_power(self.p, self.n)), self.p, self.n)
    }
}

impl Neg for &CycModElement {
    type Output = CycModElement;
    fn neg(self) -> CycModElement {
        CycModElement::from_reduced(-&self.residue, self.p, self.n)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycModElement {
            type Output = CycModElement;
            fn $m(self, o: CycModElement) -> CycModElement {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for CycModElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod [{}]^{}", self.residue, self.p, self.n)
    }
}

/// Exchange format `{"p":…, "n":…, "coeffs":["num/den", …]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycModJson {
    pub p: u64,
    pub n: u32,
    pub coeffs: Vec<String>,
}

impl Serialize for CycModElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycModElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CycModJson::deserialize(d)?;
        CycModElement::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Projection of a `𝒬_n` element onto a finite set of primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSlice {
    n: u32,
    entries: BTreeMap<u64, CycModElement>,
}

impl PrimeSlice {
    pub fn new(n: u32) -> Self {
        PrimeSlice { n, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, x: CycModElement) -> Result<()> {
        if x.n != self.n {
            return Err(Error::RingMismatch(x.p, x.n, x.p, self.n));
        }
        self.entries.insert(x.p, x);
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, p: u64) -> Option<&CycModElement> {
        self.entries.get(&p)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CycModElement> {
        self.entries.values()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(CycModElement::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{rat, ratio};

    fn el(c: &[i64], p: u64, n: u32) -> CycModElement {
        reduce(&Poly::from_ints(c), p, n).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert!(reduce(&Poly::monomial(rat(1), 5), 5, 1).unwrap().residue().is_one());
        assert!(reduce(&q_int(7).unwrap().pow(2), 7, 2).unwrap().is_zero());
        assert_eq!(el(&[1, 1], 5, 1).residue(), &Poly::from_ints(&[1, 1]));
        let bad = reduce(&Poly::constant(ratio(1, 5)), 5, 1);
        assert!(matches!(bad, Err(Error::Integrality { p: 5, .. })));
    }

    #[test]
    fn inverse_examples() {
        assert!(el(&[1], 7, 2).inv().unwrap().residue().is_one());
        // the representative of 1+q^2+q^4 below degree 4 is -q-q^3
        assert_eq!(el(&[1, 1], 5, 1).inv().unwrap(), el(&[1, 0, 1, 0, 1], 5, 1));
        let five = reduce(&q_int(5).unwrap(), 5, 2).unwrap();
        assert!(matches!(five.inv(), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn closed_form_matches_euclid() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            for n in 1..=3 {
                for m in 1..p {
                    let cf = inv_qint_closed_form(m, p, n).unwrap();
                    let eu = reduce(&q_int(m).unwrap(), p, n).unwrap().inv().unwrap();
                    assert_eq!(cf, eu, "m={m} p={p} n={n}");
                }
            }
        }
        assert!(inv_qint_closed_form(1, 7, 3).unwrap().residue().is_one());
        assert_eq!(inv_qint_closed_form(2, 5, 1).unwrap(), el(&[1, 0, 1, 0, 1], 5, 1));
        assert!(inv_qint_closed_form(5, 5, 1).is_err());
        assert!(inv_qint_closed_form(0, 5, 1).is_err());
    }

    #[test]
    fn slice_at_one() {
        let two = reduce(&q_int(2).unwrap(), 7, 2).unwrap();
        assert_eq!(two.eval_at_one_mod().value, BigInt::from(2));
        assert_eq!(CycModElement::q(7, 2).unwrap().eval_at_one_mod().value, BigInt::from(1));
        assert_eq!(two.eval_at_one_mod().modulus, BigInt::from(49));
    }

    #[test]
    fn json_round_trip() {
        let x = reduce(&Poly::new(vec![ratio(1, 2), rat(-3)]), 5, 2).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"p":5,"n":2,"coeffs":["1/2","-3/1"]}"#);
        let back: CycModElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
