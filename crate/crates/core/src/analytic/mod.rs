//! High-precision experiments with `H_{m−1}(k; q_m(t))`, where `q_m(t)` is the branch of
//! `[m]_q = t` through `q_m(0) = e^{2πi/m}`.
//!
//! Coefficients `α_l(k; m)` of `t^l` are computed two ways: by substituting the series `q_m(t)`
//! into the sum (`alpha_direct`), and by the residue formula in terms of `θ_q`-derivatives at
//! `ζ_m` (`alpha_via_formula`). The limits as `m → ∞` are approached numerically only.

pub mod complex;
pub mod series;

use std::collections::HashMap;

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

pub use complex::{bits_for, BigComplex};
pub use series::TruncatedSeries;

use crate::error::{Error, Result};
use crate::exact::rational::{binomial, factorial, stirling2};
use crate::exact::Rational;
use crate::index::{weak_compositions, ExpVector, Index};
use crate::verify::t_coefficient;

const RM: RoundingMode = RoundingMode::ToEven;

fn tolerance(digits: u32) -> f64 {
    10f64.powi(-(digits as i32 - 10))
}

/// `(a)_l = a(a+1)…(a+l−1)`.
fn pochhammer(a: &Rational, l: usize) -> Rational {
    (0..l).fold(Rational::one(), |acc, i| acc * (a + Rational::from_integer(BigInt::from(i))))
}

fn qm_series_unchecked(m: u64, order: usize, bits: usize) -> TruncatedSeries {
    let z = BigComplex::root_of_unity(1, m, bits);
    let coeffs = (0..order)
        .map(|l| {
            let mut c = BigComplex::zero(bits);
            let mut mz = BigComplex::one(bits);
            let neg_z = -&z;
            for j in 0..=l {
                let a = Rational::new(-BigInt::from(j as u64 + 1), BigInt::from(m));
                let r = pochhammer(&a, l)
                    / Rational::from_integer(factorial(j as u64 + 1) * factorial((l - j) as u64));
                c = &c + &mz.scale_rational(&r);
                mz = &mz * &neg_z;
            }
            &z * &c
        })
        .collect();
    TruncatedSeries::new(coeffs)
}

/// Successive `q^0, …, q^{count−1}` of a series.
fn powers(q: &TruncatedSeries, count: usize) -> Vec<TruncatedSeries> {
    let mut out = Vec::with_capacity(count);
    let mut cur = TruncatedSeries::one(q.order(), q.coeffs[0].bits);
    for _ in 0..count {
        let next = cur.mul(q);
        out.push(cur);
        cur = next;
    }
    out
}

/// `[m]_{q(t)} − t`.
pub fn qm_residual(q: &TruncatedSeries, m: u64) -> TruncatedSeries {
    let bits = q.coeffs[0].bits;
    let mut acc = TruncatedSeries::constant(BigComplex::zero(bits), q.order());
    for p in powers(q, m as usize) {
        acc = acc.add(&p);
    }
    if q.order() > 1 {
        acc.coeffs[1] = &acc.coeffs[1] - &BigComplex::one(bits);
    }
    acc
}

/// Taylor series of `q_m(t)` to `order` terms, with the defining equation checked.
pub fn qm_series(m: u64, order: usize, digits: u32) -> Result<TruncatedSeries> {
    if m < 2 || order == 0 {
        return Err(Error::OutOfRange(format!("q_m(t) needs m >= 2 and order >= 1 (m = {m}, order = {order})")));
    }
    let q = qm_series_unchecked(m, order, bits_for(digits));
    let r = qm_residual(&q, m).max_abs();
    if !(r < tolerance(digits)) {
        return Err(Error::Precision(format!("[m]_q(t) - t has a coefficient of size {r:e} (m = {m})")));
    }
    Ok(q)
}

/// Coefficients `α_l(m)` of `1 − q_m(t) = −(2πi/m) Σ α_l(m) t^l`.
pub fn one_minus_q_coefficients(m: u64, order: usize, digits: u32) -> Result<Vec<BigComplex>> {
    let q = qm_series(m, order, digits)?;
    let bits = bits_for(digits);
    let two_pi_i_over_m = BigComplex::new(
        BigFloat::from_i64(0, bits),
        complex::pi(bits).mul(&BigFloat::from_u64(2, bits), bits, RM).div(&BigFloat::from_u64(m, bits), bits, RM),
        bits,
    );
    let factor = (-&two_pi_i_over_m).inv();
    Ok(q.coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| {
            let v = if l == 0 { &BigComplex::one(bits) - c } else { -c };
            &v * &factor
        })
        .collect())
}

/// Nested sum `Σ_{m>n₁>…>n_d>0} Π_a f(a, n_a)` for a generic ring of values.
fn nested_sum<T: Clone>(depth: usize, m: u64, one: T, zero: T, add: impl Fn(&T, &T) -> T, mul: impl Fn(&T, &T) -> T, mut term: impl FnMut(usize, u64) -> T) -> T {
    // acc[a] = Σ over chains n_a > … > n_d with n_a ≤ current n, for the suffix starting at a
    let mut acc: Vec<T> = vec![zero; depth + 1];
    acc[depth] = one;
    for n in 1..m {
        for a in 0..depth {
            let inc = mul(&term(a, n), &acc[a + 1]);
            acc[a] = add(&acc[a], &inc);
        }
    }
    acc[0].clone()
}

/// `H_{m−1}(k; q_m(t))` as a truncated series.
pub fn alpha_direct(k: &Index, m: u64, order: usize, digits: u32) -> Result<TruncatedSeries> {
    let bits = bits_for(digits);
    if k.is_empty() {
        return Ok(TruncatedSeries::one(order.max(1), bits));
    }
    if k.depth() as u64 > m.saturating_sub(1) {
        return Err(Error::OutOfRange(format!("depth {} exceeds m - 1 = {}", k.depth(), m.saturating_sub(1))));
    }
    let q = qm_series(m, order, digits)?;
    let parts = k.parts().to_vec();
    let kmax = *parts.iter().max().unwrap();
    let mut qn = TruncatedSeries::one(order, bits);
    let mut bracket = TruncatedSeries::constant(BigComplex::zero(bits), order);
    // per n: term_k(n) = q^{(k−1)n} / [n]^k for the letters in use
    let mut cache: HashMap<u64, Vec<TruncatedSeries>> = HashMap::new();
    let mut current = 0u64;
    let mut next_terms = |n: u64| -> Result<Vec<TruncatedSeries>> {
        while current < n {
            bracket = bracket.add(&qn);
            qn = qn.mul(&q);
            current += 1;
        }
        let inv = bracket.inv()?;
        let mut out = Vec::with_capacity(kmax as usize);
        let mut qpow = TruncatedSeries::one(order, bits);
        let mut ipow = inv.clone();
        for _ in 1..=kmax {
            out.push(qpow.mul(&ipow));
            qpow = qpow.mul(&qn);
            ipow = ipow.mul(&inv);
        }
        Ok(out)
    };
    let mut first_err = None;
    let result = nested_sum(
        parts.len(),
        m,
        TruncatedSeries::one(order, bits),
        TruncatedSeries::constant(BigComplex::zero(bits), order),
        |a, b| a.add(b),
        |a, b| a.mul(b),
        |a, n| {
            if !cache.contains_key(&n) {
                cache.clear();
                match next_terms(n) {
                    Ok(t) => {
                        cache.insert(n, t);
                    }
                    Err(e) => {
                        first_err.get_or_insert(e);
                        return TruncatedSeries::constant(BigComplex::zero(bits), order);
                    }
                }
            }
            cache[&n][parts[a] as usize - 1].clone()
        },
    );
    match first_err {
        Some(e) => Err(e),
        None => Ok(result),
    }
}

/// `B_{l,j} = (1/j!) d^j/dy^j (y/(e^y − 1))^l |_{y=0}`.
pub fn b_coefficient(l: u32, j: u32) -> Rational {
    let n = j as usize + 1;
    // (e^y − 1)/y = Σ y^i/(i+1)!
    let f: Vec<Rational> = (0..n).map(|i| Rational::new(BigInt::one(), factorial(i as u64 + 1))).collect();
    let mut g = vec![Rational::zero(); n];
    g[0] = Rational::one();
    for i in 1..n {
        let s: Rational = (1..=i).map(|t| &f[t] * &g[i - t]).sum();
        g[i] = -s;
    }
    let mut pw = vec![Rational::zero(); n];
    pw[0] = Rational::one();
    for _ in 0..l {
        let mut next = vec![Rational::zero(); n];
        for (a, x) in pw.iter().enumerate() {
            for (b, y) in g.iter().take(n - a).enumerate() {
                next[a + b] += x * y;
            }
        }
        pw = next;
    }
    pw[j as usize].clone()
}

/// `S_{l,j}(m) = (1/j!) d^j/dy^j (ζ_m e^{y/m} − 1)^l |_{y=0}`.
pub fn s_coefficient(l: u32, j: u32, m: u64, bits: usize) -> BigComplex {
    let n = j as usize + 1;
    let z = BigComplex::root_of_unity(1, m, bits);
    let base: Vec<BigComplex> = (0..n)
        .map(|i| {
            if i == 0 {
                &z - &BigComplex::one(bits)
            } else {
                z.scale_rational(&Rational::new(BigInt::one(), factorial(i as u64) * BigInt::from(m).pow(i as u32)))
            }
        })
        .collect();
    let base = TruncatedSeries::new(base);
    base.powi(l).coeffs[j as usize].clone()
}

struct RootTable {
    m: u64,
    bits: usize,
    zeta: Vec<BigComplex>,
    inv_one_minus: Vec<BigComplex>,
}

impl RootTable {
    fn new(m: u64, bits: usize) -> Self {
        let zeta: Vec<BigComplex> = (0..m).map(|i| BigComplex::root_of_unity(i as i64, m, bits)).collect();
        let inv_one_minus = zeta
            .iter()
            .enumerate()
            .map(|(i, z)| if i == 0 { BigComplex::zero(bits) } else { (&BigComplex::one(bits) - z).inv() })
            .collect();
        RootTable { m, bits, zeta, inv_one_minus }
    }

    fn pow(&self, e: u64) -> &BigComplex {
        &self.zeta[(e % self.m) as usize]
    }
}

/// `(1/b!) θ_q^b [q^{(k−1)n}/(1−q^n)^k]` at `ζ_m`, expanded by the θ-lemma.
fn theta_term(t: &RootTable, k: u32, b: u32, n: u64) -> BigComplex {
    let mut acc = BigComplex::zero(t.bits);
    for s in 0..=b {
        let c = t_coefficient(s, b, k) * Rational::from_integer(binomial((k + s - 1) as u64, s as u64));
        if c.is_zero() {
            continue;
        }
        let v = t.pow((k + s - 1) as u64 * n) * &t.inv_one_minus[(n % t.m) as usize].powi(k + s);
        acc = &acc + &v.scale_rational(&c);
    }
    acc.scale_rational(&Rational::from_integer(BigInt::from(n).pow(b)))
}

/// `θ_q^r H_{m−1}(k; q)` at `q = ζ_m`, with `H = (1−q)^{wt} Ĥ` and `θ` applied by Leibniz.
pub fn theta_h(k: &Index, r: u32, m: u64, bits: usize) -> BigComplex {
    let t = RootTable::new(m, bits);
    theta_h_with(&t, k, r)
}

fn theta_h_with(t: &RootTable, k: &Index, r: u32) -> BigComplex {
    let bits = t.bits;
    if k.is_empty() {
        return if r == 0 { BigComplex::one(bits) } else { BigComplex::zero(bits) };
    }
    let w = k.weight();
    let omz = &BigComplex::one(bits) - &t.zeta[1 % t.m as usize];
    let parts = k.parts();
    let mut out = BigComplex::zero(bits);
    for a in 0..=r {
        // θ^a (1−q)^w = Σ_n S(a,n) q^n (−1)^n w!/(w−n)! (1−q)^{w−n}
        let mut pref = BigComplex::zero(bits);
        for nn in 0..=a.min(w) {
            let c = Rational::from_integer(stirling2(a as usize, nn as usize) * factorial(w as u64) / factorial((w - nn) as u64));
            if c.is_zero() {
                continue;
            }
            let c = if nn % 2 == 1 { -c } else { c };
            pref = &pref + &(t.pow(nn as u64) * &omz.powi(w - nn)).scale_rational(&c);
        }
        if pref.is_zero() {
            continue;
        }
        let b = r - a;
        let mut hat = BigComplex::zero(bits);
        for comp in weak_compositions(b, parts.len()) {
            let bs = comp.entries().to_vec();
            let mut memo: HashMap<(usize, u64), BigComplex> = HashMap::new();
            let v = nested_sum(
                parts.len(),
                t.m,
                BigComplex::one(bits),
                BigComplex::zero(bits),
                |x, y| x + y,
                |x, y| x * y,
                |ai, n| memo.entry((ai, n)).or_insert_with(|| theta_term(t, parts[ai], bs[ai], n)).clone(),
            );
            hat = &hat + &v;
        }
        hat = hat.scale_rational(&Rational::from_integer(factorial(b as u64)));
        out = &out + &(&pref * &hat).scale_rational(&Rational::from_integer(binomial(r as u64, a as u64)));
    }
    out
}

/// `α_l(k; m)` from the residue formula
/// `a_l = (1/l) Σ_{j₁+j₂+j₃=l−1} B_{l,j₁} S_{l,j₂}(m) (θ^{j₃+1}H)(ζ_m) / (j₃! m^{j₃+1})`.
pub fn alpha_via_formula(l: u32, k: &Index, m: u64, digits: u32) -> Result<BigComplex> {
    if l > 4 || k.weight() > 4 || m > 60 || m < 2 {
        return Err(Error::BoundExceeded(format!("alpha_via_formula supports l <= 4, weight <= 4, 2 <= m <= 60 (got l = {l}, weight = {}, m = {m})", k.weight())));
    }
    let bits = bits_for(digits);
    let t = RootTable::new(m, bits);
    if l == 0 {
        return Ok(theta_h_with(&t, k, 0));
    }
    let mut acc = BigComplex::zero(bits);
    for j1 in 0..l {
        let b = b_coefficient(l, j1);
        if b.is_zero() {
            continue;
        }
        for j2 in 0..l - j1 {
            let j3 = l - 1 - j1 - j2;
            let s = s_coefficient(l, j2, m, bits);
            let th = theta_h_with(&t, k, j3 + 1);
            let c = &b / Rational::from_integer(factorial(j3 as u64) * BigInt::from(m).pow(j3 + 1));
            acc = &acc + &(&s * &th).scale_rational(&c);
        }
    }
    Ok(acc.scale_rational(&Rational::new(BigInt::one(), BigInt::from(l))))
}

/// `Z_{m−1}(l; k) = Σ_{m−1≥m₁>…>m_d>0} Π (m_a/m)^{l_a} (−2πi/m)^{k_a} ζ_m^{(k_a−1)m_a}/(1−ζ_m^{m_a})^{k_a}`.
pub fn zsum(lvec: &ExpVector, k: &Index, m: u64, digits: u32) -> Result<BigComplex> {
    if lvec.len() != k.depth() {
        return Err(Error::LengthMismatch(lvec.len(), k.depth()));
    }
    let bits = bits_for(digits);
    if k.is_empty() {
        return Ok(BigComplex::one(bits));
    }
    let t = RootTable::new(m, bits);
    let two_pi = complex::pi(bits).mul(&BigFloat::from_u64(2, bits), bits, RM).div(&BigFloat::from_u64(m, bits), bits, RM);
    let c = BigComplex::new(BigFloat::from_i64(0, bits), two_pi.neg(), bits);
    let parts = k.parts();
    let ls = lvec.entries();
    Ok(nested_sum(parts.len(), m, BigComplex::one(bits), BigComplex::zero(bits), |x, y| x + y, |x, y| x * y, |a, n| {
        let kk = parts[a];
        let frac = Rational::new(BigInt::from(n), BigInt::from(m));
        let v = &(&c.powi(kk) * t.pow((kk as u64 - 1) * n)) * &t.inv_one_minus[n as usize].powi(kk);
        v.scale_rational(&num_traits::pow(frac, ls[a] as usize))
    }))
}

/// `π`, `ζ(2)`, `ζ(3)`, `ζ(4)` with ten guard digits.
#[derive(Clone, Debug)]
pub struct ReferenceConstants {
    pub digits: u32,
    pub pi: BigFloat,
    pub zeta2: BigFloat,
    pub zeta3: BigFloat,
    pub zeta4: BigFloat,
}

impl ReferenceConstants {
    pub fn new(digits: u32) -> Self {
        let bits = bits_for(digits + 10);
        let pi = complex::pi(bits);
        let pi2 = pi.mul(&pi, bits, RM);
        let zeta2 = pi2.div(&BigFloat::from_u64(6, bits), bits, RM);
        let zeta4 = pi2.mul(&pi2, bits, RM).div(&BigFloat::from_u64(90, bits), bits, RM);
        // ζ(3) = (5/2) Σ (−1)^{n+1} / (n³ C(2n, n))
        let mut zeta3 = BigFloat::from_i64(0, bits);
        let mut central = BigInt::one();
        for n in 1..=(bits / 2 + 10) as u64 {
            central = central * BigInt::from(2 * (2 * n - 1)) / BigInt::from(n);
            let den = complex::float_from_bigint(&(&central * BigInt::from(n).pow(3)), bits);
            let term = BigFloat::from_i64(if n % 2 == 1 { 1 } else { -1 }, bits).div(&den, bits, RM);
            zeta3 = zeta3.add(&term, bits, RM);
        }
        let zeta3 = zeta3.mul(&BigFloat::from_u64(5, bits), bits, RM).div(&BigFloat::from_u64(2, bits), bits, RM);
        ReferenceConstants { digits, pi, zeta2, zeta3, zeta4 }
    }

    pub fn zeta(&self, k: u32) -> Option<&BigFloat> {
        match k {
            2 => Some(&self.zeta2),
            3 => Some(&self.zeta3),
            4 => Some(&self.zeta4),
            _ => None,
        }
    }

    /// Limit of `α_l(k; m)` for the depth-one cases with a closed form.
    pub fn alpha_limit(&self, k: &Index, l: u32) -> Option<BigComplex> {
        let bits = bits_for(self.digits + 10);
        if k.depth() != 1 {
            return None;
        }
        let kk = k.parts()[0];
        match (kk, l) {
            (1, 0) => Some(BigComplex::new(BigFloat::from_i64(0, bits), self.pi.neg(), bits)),
            (kk, 0) if kk % 2 == 1 => Some(BigComplex::zero(bits)),
            (kk, 0) => self.zeta(kk).map(|z| BigComplex::from_real(z.mul(&BigFloat::from_u64(2, bits), bits, RM), bits)),
            (2, 1) => Some(BigComplex::from_real(self.zeta3.mul(&BigFloat::from_u64(2, bits), bits, RM), bits)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub m: u64,
    pub alpha: Vec<BigComplex>,
    /// `|α_l − limit|` where the limit is known.
    pub delta: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub index: Index,
    pub order: usize,
    pub digits: u32,
    pub limits: Vec<Option<BigComplex>>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn deltas(&self, l: usize) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.delta.get(l).copied().flatten()).collect()
    }

    /// The distance to the limit of `α_l` strictly decreases along the rows.
    pub fn monotone(&self, l: usize) -> bool {
        let d = self.deltas(l);
        d.len() == self.rows.len() && d.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn convergence_report(k: &Index, m_list: &[u64], order: usize, digits: u32) -> Result<ConvergenceReport> {
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("m list must be strictly increasing".into()));
    }
    let consts = ReferenceConstants::new(digits);
    let limits: Vec<Option<BigComplex>> = (0..order as u32).map(|l| consts.alpha_limit(k, l)).collect();
    let mut rows = Vec::new();
    for &m in m_list {
        let alpha = alpha_direct(k, m, order, digits)?.coeffs;
        let delta = alpha
            .iter()
            .zip(&limits)
            .map(|(a, lim)| lim.as_ref().map(|t| (a - t).abs_f64()))
            .collect();
        rows.push(ConvergenceRow { m, alpha, delta });
    }
    Ok(ConvergenceReport { index: k.clone(), order, digits, limits, rows })
}
