//! Mechanized checkers for the reversal, duality, cyclic-sum and weight-one identities in
//! `Z_{p,n}`, and for the exact rational-function identities used in their proofs.
//!
//! Each identity is assembled as a list of terms `Σ c_i · v_i = 0` with rational scalars `c_i`;
//! the residual is the actual value of the sum, so a failing case carries its own witness, and
//! a mutation is just a change to one `c_i`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{binomial, factorial, stirling2};
use crate::exact::{q_binom, q_int, rat, ratio, CycModElement, Poly, RatFun, Rational};
use crate::hsum::{hsum_exact, hsum_mod, Variant};
use crate::index::{b_binom, weak_compositions, Index, Orbit};

/// Serialized residual witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Residual {
    Cycmod { p: u64, n: u32, coeffs: Vec<String> },
    Ratfun { num: Vec<String>, den: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub identity: String,
    pub params: BTreeMap<String, String>,
    pub pass: bool,
    pub residual: Residual,
}

pub trait IdentityValue: Clone {
    fn add_scaled(&self, c: &Rational, x: &Self) -> Result<Self>;
    fn is_zero(&self) -> bool;
    fn witness(&self) -> Residual;
}

impl IdentityValue for CycModElement {
    fn add_scaled(&self, c: &Rational, x: &Self) -> Result<Self> {
        Ok(self + &x.scale(c)?)
    }
    fn is_zero(&self) -> bool {
        CycModElement::is_zero(self)
    }
    fn witness(&self) -> Residual {
        let j = self.to_json();
        Residual::Cycmod { p: j.p, n: j.n, coeffs: j.coeffs }
    }
}

impl IdentityValue for RatFun {
    fn add_scaled(&self, c: &Rational, x: &Self) -> Result<Self> {
        Ok(self + &x.scale(c))
    }
    fn is_zero(&self) -> bool {
        RatFun::is_zero(self)
    }
    fn witness(&self) -> Residual {
        Residual::Ratfun { num: self.num().coeff_strings(), den: self.den().coeff_strings() }
    }
}

#[derive(Clone, Debug)]
pub struct Term<T> {
    /// Which displayed line of the identity the term belongs to.
    pub group: &'static str,
    pub label: String,
    pub coeff: Rational,
    pub value: T,
}

#[derive(Clone, Debug)]
pub struct Identity<T> {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub terms: Vec<Term<T>>,
    zero: T,
}

impl<T: IdentityValue> Identity<T> {
    fn new(name: &str, zero: T) -> Self {
        Identity { name: name.to_string(), params: BTreeMap::new(), terms: Vec::new(), zero }
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.insert(k.to_string(), v.to_string());
        self
    }

    fn push(&mut self, group: &'static str, label: String, coeff: Rational, value: T) {
        self.terms.push(Term { group, label, coeff, value });
    }

    pub fn residual(&self) -> Result<T> {
        self.terms.iter().try_fold(self.zero.clone(), |acc, t| acc.add_scaled(&t.coeff, &t.value))
    }

    pub fn report(&self) -> Result<VerifyReport> {
        let r = self.residual()?;
        Ok(VerifyReport {
            identity: self.name.clone(),
            params: self.params.clone(),
            pass: r.is_zero(),
            residual: r.witness(),
        })
    }

    /// Same identity with term `i`'s scalar replaced by `c`.
    pub fn with_coeff(&self, i: usize, c: Rational) -> Self {
        let mut out = self.clone();
        out.terms[i].coeff = c;
        out.params.insert("mutation".into(), format!("coefficient of {} set", out.terms[i].label));
        out
    }

    pub fn perturb(&self, i: usize, delta: &Rational) -> Self {
        let c = &self.terms[i].coeff + delta;
        self.with_coeff(i, c)
    }

    /// Drops every term of one displayed line.
    pub fn without_group(&self, group: &str) -> Self {
        let mut out = self.clone();
        out.terms.retain(|t| t.group != group);
        out.params.insert("mutation".into(), format!("dropped {group}"));
        out
    }

    /// Up to `count` single-coefficient perturbations (`c ↦ c + 1`) spread evenly over the terms
    /// whose value is nonzero.
    pub fn sampled_mutations(&self, count: usize) -> Vec<Self> {
        let live: Vec<usize> = (0..self.terms.len()).filter(|&i| !self.terms[i].value.is_zero()).collect();
        if live.is_empty() {
            return Vec::new();
        }
        let count = count.min(live.len());
        let mut picks: Vec<usize> = (0..count).map(|j| live[j * live.len() / count]).collect();
        picks.dedup();
        picks.into_iter().map(|i| self.perturb(i, &Rational::one())).collect()
    }
}

/// Per-`(p, n)` constants and a memo of computed sums.
pub struct RingCtx {
    pub p: u64,
    pub n: u32,
    pub one: CycModElement,
    pub one_minus_q: CycModElement,
    /// `[p]`
    pub bracket: CycModElement,
    /// `q^p = 1 − (1−q)[p]`
    pub q_p: CycModElement,
    /// `q^{−p} = Σ_{l<n} ((1−q)[p])^l`
    pub q_neg_p: CycModElement,
    memo: HashMap<(Variant, Index), CycModElement>,
}

impl RingCtx {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        let one = CycModElement::one(p, n)?;
        let one_minus_q = one.lift(&Poly::one_minus_q())?;
        let bracket = one.lift(&q_int(p)?)?;
        let x = &one_minus_q * &bracket;
        let q_p = &one - &x;
        let mut q_neg_p = one.clone();
        let mut pw = one.clone();
        for _ in 1..n {
            pw = &pw * &x;
            q_neg_p = &q_neg_p + &pw;
        }
        Ok(RingCtx { p, n, one, one_minus_q, bracket, q_p, q_neg_p, memo: HashMap::new() })
    }

    pub fn h(&mut self, v: Variant, k: &Index) -> Result<CycModElement> {
        if let Some(x) = self.memo.get(&(v, k.clone())) {
            return Ok(x.clone());
        }
        let x = hsum_mod(v, self.p, self.n, k, None)?;
        self.memo.insert((v, k.clone()), x.clone());
        Ok(x)
    }

    fn zero(&self) -> CycModElement {
        CycModElement::zero(self.p, self.n).unwrap()
    }

    /// `q^{−p}[p]`
    fn lam(&self) -> CycModElement {
        &self.q_neg_p * &self.bracket
    }
}

fn ring_params<T: IdentityValue>(id: Identity<T>, p: u64, n: u32) -> Identity<T> {
    id.param("p", p).param("n", n)
}

fn star_or_plain(v: Variant) -> Result<(Variant, Variant)> {
    match v {
        Variant::Plain => Ok((Variant::Plain, Variant::Bar)),
        Variant::Star => Ok((Variant::Star, Variant::BarStar)),
        _ => Err(Error::Parse(format!("reversal takes plain or star, not {v}"))),
    }
}

/// `H̄(k) = (−q^{−p})^{wt}(q^p)^{dep} Σ_{wt(l)<n} (q^{−p}[p])^{wt l} b(k;l) H(rev(k+l))`.
pub fn reversal_identity(ctx: &mut RingCtx, k: &Index, v: Variant) -> Result<Identity<CycModElement>> {
    let (plain, bar) = star_or_plain(v)?;
    let mut id = ring_params(Identity::new("reversal", ctx.zero()), ctx.p, ctx.n)
        .param("index", k.literal())
        .param("variant", v);
    id.push("lhs", format!("bar {k}"), Rational::one(), ctx.h(bar, k)?);
    let sign = if k.weight() % 2 == 1 { -&ctx.one } else { ctx.one.clone() };
    let pre = &(&sign * &ctx.q_neg_p.pow(k.weight())) * &ctx.q_p.pow(k.depth() as u32);
    let lam = ctx.lam();
    for w in 0..ctx.n {
        let lw = &pre * &lam.pow(w);
        for l in weak_compositions(w, k.depth()) {
            let kl = k.plus(&l)?.reversed();
            let b = Rational::from_integer(b_binom(k, &l)?);
            id.push("layers", format!("l=({}) H{kl}", l.literal()), -b, &lw * &ctx.h(plain, &kl)?);
        }
    }
    Ok(id)
}

pub fn verify_reversal(p: u64, n: u32, k: &Index, v: Variant) -> Result<VerifyReport> {
    reversal_identity(&mut RingCtx::new(p, n)?, k, v)?.report()
}

/// `q^{p(p+1)/2} Σ_{l<n}[p]^l H*({1}^l,k) + Σ_{l<n}(q^{−p}[p])^l H̄*({1}^l,k^∨) = 0`, odd `p`.
pub fn hat_duality_identity(ctx: &mut RingCtx, k: &Index) -> Result<Identity<CycModElement>> {
    let dual = k.hoffman_dual()?;
    hat_duality_identity_with_dual(ctx, k, &dual)
}

/// As [`hat_duality_identity`], with an arbitrary index in place of `k^∨` (mutation hook).
pub fn hat_duality_identity_with_dual(
    ctx: &mut RingCtx,
    k: &Index,
    dual: &Index,
) -> Result<Identity<CycModElement>> {
    let p = ctx.p;
    if p == 2 {
        return Err(Error::OutOfRange("duality check needs an odd prime".into()));
    }
    let mut id = ring_params(Identity::new("duality", ctx.zero()), p, ctx.n)
        .param("index", k.literal())
        .param("dual", dual.literal());
    // q^{p(p+1)/2} = Σ_{l<n} C((p+1)/2, l) (−(1−q)[p])^l
    let x = -&(&ctx.one_minus_q * &ctx.bracket);
    let mut c = ctx.zero();
    for l in 0..ctx.n {
        let b = Rational::from_integer(binomial((p + 1) / 2, l as u64));
        c = &c + &x.pow(l).scale(&b)?;
    }
    let lam = ctx.lam();
    for l in 0..ctx.n as usize {
        let ones = Index::ones(l);
        let a = ones.concat(k);
        let v = &(&c * &ctx.bracket.pow(l as u32)) * &ctx.h(Variant::Star, &a)?;
        id.push("primal", format!("star {a}"), Rational::one(), v);
        let b = ones.concat(dual);
        let v = &lam.pow(l as u32) * &ctx.h(Variant::BarStar, &b)?;
        id.push("dual", format!("bar-star {b}"), Rational::one(), v);
    }
    Ok(id)
}

pub fn verify_hat_duality(p: u64, n: u32, k: &Index) -> Result<VerifyReport> {
    hat_duality_identity(&mut RingCtx::new(p, n)?, k)?.report()
}

/// Coefficient `c_j` of `|α|(1−q)^j ζ*(k+1−j)` in the starred cyclic sum formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarCyclicCoefficient {
    /// `(k/j − 1) C(d, j)`
    AsDisplayed,
    /// `(k − j)/d · C(d, j)`, read off from the expansion in the proof
    FromProof,
}

pub fn cyclic_identity(ctx: &mut RingCtx, orbit: &Orbit, starred: bool) -> Result<Identity<CycModElement>> {
    cyclic_identity_with(ctx, orbit, starred, StarCyclicCoefficient::FromProof)
}

pub fn cyclic_identity_with(
    ctx: &mut RingCtx,
    orbit: &Orbit,
    starred: bool,
    coeff: StarCyclicCoefficient,
) -> Result<Identity<CycModElement>> {
    let v = if starred { Variant::Star } else { Variant::Plain };
    let name = if starred { "cyclic-star" } else { "cyclic" };
    let members: Vec<String> = orbit.members.iter().map(Index::literal).collect();
    let mut id = ring_params(Identity::new(name, ctx.zero()), ctx.p, ctx.n).param("orbit", members.join(" | "));
    let lam = ctx.lam();
    let wt = orbit.weight();
    let d = orbit.depth() as u32;
    for k in &orbit.members {
        let k1 = k.parts()[0];
        let rest = k.suffix(1)?;
        for s in 0..k1.saturating_sub(1) {
            let idx = Index::new(vec![k1 - s]).unwrap().concat(&rest).concat(&Index::new(vec![s + 1]).unwrap());
            id.push("lhs", format!("H{idx}"), Rational::one(), ctx.h(v, &idx)?);
        }
        if !starred {
            let head = k.with_part(0, k1 + 1);
            id.push("head", format!("H{head}"), -Rational::one(), ctx.h(v, &head)?);
        }
        for l in 0..ctx.n {
            let lw = lam.pow(l);
            let a = rest.concat(&Index::new(vec![k1, l + 1]).unwrap());
            id.push("tail", format!("l={l} H{a}"), -Rational::one(), &lw * &ctx.h(v, &a)?);
            if !starred {
                let b = rest.concat(&Index::new(vec![k1 + l + 1]).unwrap());
                id.push("tail", format!("l={l} H{b}"), -Rational::one(), &lw * &ctx.h(v, &b)?);
                let c = rest.concat(&Index::new(vec![k1 + l]).unwrap());
                let val = &(&ctx.one_minus_q * &lw) * &ctx.h(v, &c)?;
                id.push("correction", format!("l={l} (1-q)H{c}"), -Rational::one(), val);
            }
        }
    }
    if starred {
        let size = orbit.size() as i64;
        let head = Index::new(vec![wt + 1]).unwrap();
        id.push("head", format!("H*{head}"), -ratio(wt as i64 * size, d as i64), ctx.h(v, &head)?);
        for j in 1..=d {
            let bin = binomial(d as u64, j as u64);
            let cj = match coeff {
                StarCyclicCoefficient::AsDisplayed => ratio(wt as i64 - j as i64, j as i64),
                StarCyclicCoefficient::FromProof => ratio(wt as i64 - j as i64, d as i64),
            } * Rational::from_integer(bin)
                * rat(size);
            let idx = Index::new(vec![wt + 1 - j]).unwrap();
            let val = &ctx.one_minus_q.pow(j) * &ctx.h(v, &idx)?;
            id.push("correction", format!("j={j} (1-q)^j H*{idx}"), -cj, val);
        }
    }
    Ok(id)
}

pub fn verify_cyclic(p: u64, n: u32, orbit: &Orbit, starred: bool) -> Result<VerifyReport> {
    cyclic_identity(&mut RingCtx::new(p, n)?, orbit, starred)?.report()
}

/// `H(1) − ((p−1)/2)(1−q) + ½ Σ_{1<=l<n} [p]^l H̄(1+l) = 0`.
pub fn weight_one_identity(ctx: &mut RingCtx) -> Result<Identity<CycModElement>> {
    let p = ctx.p;
    if p < 3 {
        return Err(Error::OutOfRange("weight-one relation needs p >= 3".into()));
    }
    let mut id = ring_params(Identity::new("wt1", ctx.zero()), p, ctx.n);
    id.push("lhs", "H(1)".into(), Rational::one(), ctx.h(Variant::Plain, &Index::ones(1))?);
    id.push("linear", "(1-q)".into(), -ratio(p as i64 - 1, 2), ctx.one_minus_q.clone());
    for l in 1..ctx.n {
        let idx = Index::new(vec![1 + l]).unwrap();
        let v = &ctx.bracket.pow(l) * &ctx.h(Variant::Bar, &idx)?;
        id.push("bar", format!("[p]^{l} bar H{idx}"), ratio(1, 2), v);
    }
    Ok(id)
}

pub fn verify_weight_one(p: u64, n: u32) -> Result<VerifyReport> {
    weight_one_identity(&mut RingCtx::new(p, n)?)?.report()
}

/// Which reading of the three mod-`[p]^2` relations to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Q2Form {
    /// The `n = 2` truncations of the weight-one, reversal and duality theorems.
    Truncated,
    /// The relations exactly as displayed in the dimension discussion.
    AsDisplayed,
}

/// The three relations in `Z_{p,2}`: weight one, reversal (plain) and star duality.
pub fn q2_identities(p: u64, k: &Index, form: Q2Form) -> Result<Vec<Identity<CycModElement>>> {
    if p == 2 {
        return Err(Error::OutOfRange("mod [p]^2 relations need an odd prime".into()));
    }
    let mut ctx = RingCtx::new(p, 2)?;
    let mut wt1 = weight_one_identity(&mut ctx)?;
    wt1.name = "q2-wt1".into();

    let (w, d) = (k.weight(), k.depth());
    let mut rev = ring_params(Identity::new("q2-reversal", ctx.zero()), p, 2)
        .param("index", k.literal())
        .param("form", format!("{form:?}"));
    let sign = if w % 2 == 1 { -Rational::one() } else { Rational::one() };
    rev.push("lhs", format!("bar {k}"), sign, ctx.h(Variant::Bar, k)?);
    let kr = k.reversed();
    let h_rev = ctx.h(Variant::Plain, &kr)?;
    rev.push("rev", format!("H{kr}"), -Rational::one(), h_rev.clone());
    if form == Q2Form::Truncated {
        let v = &(&ctx.one_minus_q * &ctx.bracket) * &h_rev;
        rev.push("prefactor", format!("(1-q)[p]H{kr}"), -rat(w as i64 - d as i64), v);
    }
    for l in weak_compositions(1, d) {
        let kl = k.plus(&l)?.reversed();
        let b = Rational::from_integer(b_binom(k, &l)?);
        let h = ctx.h(Variant::Plain, &kl)?;
        rev.push("layers", format!("[p]H{kl}"), -b, &ctx.bracket * &h);
    }

    let dual = k.hoffman_dual()?;
    let dual_v = if form == Q2Form::Truncated { Variant::BarStar } else { Variant::Star };
    let mut dua = ring_params(Identity::new("q2-duality", ctx.zero()), p, 2)
        .param("index", k.literal())
        .param("form", format!("{form:?}"));
    dua.push("main", format!("star {k}"), Rational::one(), ctx.h(Variant::Star, k)?);
    dua.push("main", format!("{dual_v} {dual}"), Rational::one(), ctx.h(dual_v, &dual)?);
    let one_k = Index::ones(1).concat(k);
    let one_dual = Index::ones(1).concat(&dual);
    let h = ctx.h(Variant::Star, &one_k)?;
    dua.push("layer", format!("[p] star {one_k}"), Rational::one(), &ctx.bracket * &h);
    let h = ctx.h(dual_v, &one_dual)?;
    dua.push("layer", format!("[p] {dual_v} {one_dual}"), Rational::one(), &ctx.bracket * &h);
    let h = ctx.h(Variant::Star, k)?;
    let v = &(&ctx.bracket * &ctx.one_minus_q) * &h;
    dua.push("layer", format!("[p](1-q) star {k}"), -ratio(p as i64 + 1, 2), v);
    Ok(vec![wt1, rev, dua])
}

pub fn verify_q2_suite(p: u64, k: &Index) -> Result<Vec<VerifyReport>> {
    q2_identities(p, k, Q2Form::Truncated)?.iter().map(Identity::report).collect()
}

/// Bradley's finite duality as an identity of rational functions, upper limit `n`.
pub fn bradley_identity(n: u64, k: &Index) -> Result<Identity<RatFun>> {
    bradley_identity_with_dual(n, k, &k.hoffman_dual()?)
}

pub fn bradley_identity_with_dual(n: u64, k: &Index, dual: &Index) -> Result<Identity<RatFun>> {
    if n == 0 || k.is_empty() {
        return Err(Error::OutOfRange("Bradley's identity needs n >= 1 and a nonempty index".into()));
    }
    let mut id = Identity::new("bradley", RatFun::zero())
        .param("n", n)
        .param("index", k.literal())
        .param("dual", dual.literal());
    let k1 = k.parts()[0];
    let rest = k.suffix(1)?;
    for m1 in 1..=n {
        let sign = if (m1 - 1) % 2 == 0 { 1 } else { -1 };
        let num = &q_binom(n - 1, m1 - 1)?.shift((m1 * (m1 - 1) / 2 + (k1 as u64 - 1) * m1) as usize) * &Poly::one();
        let t = RatFun::new(num, q_int(m1)?.pow(k1));
        let inner = hsum_exact(Variant::Star, m1, &rest, None)?;
        id.push("lhs", format!("m1={m1}"), rat(sign), &t * &inner);
    }
    let d1 = dual.parts()[0];
    let head = RatFun::new(Poly::one(), q_int(n)?.pow(d1));
    let inner = hsum_exact(Variant::BarStar, n, &dual.suffix(1)?, None)?;
    id.push("rhs", format!("m1={n}"), -Rational::one(), &head * &inner);
    Ok(id)
}

pub fn verify_bradley(n: u64, k: &Index) -> Result<VerifyReport> {
    bradley_identity(n, k)?.report()
}

/// `T_{s,l}(k) = (s!/l!) Σ_{a=s}^{l} C(l,a) S(a,s) (k−1)^{l−a}`.
pub fn t_coefficient(s: u32, l: u32, k: u32) -> Rational {
    let mut acc = BigInt::zero();
    for a in s..=l {
        acc += binomial(l as u64, a as u64)
            * stirling2(a as usize, s as usize)
            * BigInt::from(k as i64 - 1).pow(l - a);
    }
    Rational::new(factorial(s as u64) * acc, factorial(l as u64))
}

/// `(1/l!) θ^l [q^{(k−1)m}/(1−q^m)^k] = m^l Σ_s T_{s,l}(k) C(s+k−1,s) q^{(k+s−1)m}/(1−q^m)^{k+s}`.
pub fn theta_lemma_identity(l: u32, k: u32, m: u32) -> Result<Identity<RatFun>> {
    if k == 0 || m == 0 {
        return Err(Error::OutOfRange("theta lemma needs k, m >= 1".into()));
    }
    let mut id = Identity::new("theta", RatFun::zero()).param("l", l).param("k", k).param("m", m);
    let base = |e: u32| -> Poly {
        // 1 − q^m
        let mut c = vec![Rational::zero(); m as usize + 1];
        c[0] = Rational::one();
        c[m as usize] = -Rational::one();
        Poly::new(c).pow(e)
    };
    let mut f = RatFun::new(Poly::monomial(Rational::one(), ((k - 1) * m) as usize), base(k));
    for _ in 0..l {
        f = f.theta();
    }
    id.push("lhs", format!("theta^{l}/{l}!"), Rational::new(BigInt::one(), factorial(l as u64)), f);
    let ml = Rational::from_integer(BigInt::from(m).pow(l));
    for s in 0..=l {
        let c = &ml * t_coefficient(s, l, k) * Rational::from_integer(binomial((s + k - 1) as u64, s as u64));
        let g = RatFun::new(Poly::monomial(Rational::one(), ((k + s - 1) * m) as usize), base(k + s));
        id.push("rhs", format!("s={s}"), -c, g);
    }
    Ok(id)
}

pub fn verify_theta_lemma(l: u32, k: u32, m: u32) -> Result<VerifyReport> {
    theta_lemma_identity(l, k, m)?.report()
}

/// Outcome of one grid case: a report, or a prime excluded by an integrality failure.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CaseOutcome {
    Checked(VerifyReport),
    Skipped { identity: String, params: BTreeMap<String, String>, reason: String },
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        match self {
            CaseOutcome::Checked(r) => r.pass,
            CaseOutcome::Skipped { .. } => true,
        }
    }
}

fn outcome(identity: &str, params: &[(&str, String)], r: Result<Vec<VerifyReport>>) -> Vec<CaseOutcome> {
    match r {
        Ok(v) => v.into_iter().map(CaseOutcome::Checked).collect(),
        Err(e @ (Error::Integrality { .. } | Error::NotInvertible { .. })) => vec![CaseOutcome::Skipped {
            identity: identity.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            reason: e.to_string(),
        }],
        Err(e) => vec![CaseOutcome::Skipped {
            identity: identity.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            reason: format!("error: {e}"),
        }],
    }
}

/// Runs every `Z_{p,n}` checker over all indices and orbits up to `max_weight`.
pub fn identity_grid(primes: &[u64], ns: &[u32], max_weight: u32) -> Vec<CaseOutcome> {
    use crate::index::{compositions, orbits};
    let mut out = Vec::new();
    for &p in primes {
        for &n in ns {
            let mut ctx = match RingCtx::new(p, n) {
                Ok(c) => c,
                Err(e) => {
                    out.extend(outcome("grid", &[("p", p.to_string()), ("n", n.to_string())], Err(e)));
                    continue;
                }
            };
            let pn = |extra: (&'static str, String)| -> Vec<(&'static str, String)> { vec![("p", p.to_string()), ("n", n.to_string()), extra] };
            for w in 1..=max_weight {
                for k in compositions(w) {
                    for v in [Variant::Plain, Variant::Star] {
                        let r = reversal_identity(&mut ctx, &k, v).and_then(|i| i.report()).map(|r| vec![r]);
                        out.extend(outcome("reversal", &pn(("index", k.literal())), r));
                    }
                    if p != 2 {
                        let r = hat_duality_identity(&mut ctx, &k).and_then(|i| i.report()).map(|r| vec![r]);
                        out.extend(outcome("duality", &pn(("index", k.literal())), r));
                    }
                }
                for d in 1..=w as usize {
                    for orb in orbits(w, d).unwrap() {
                        for starred in [false, true] {
                            let r = cyclic_identity(&mut ctx, &orb, starred).and_then(|i| i.report()).map(|r| vec![r]);
                            out.extend(outcome("cyclic", &pn(("orbit", orb.representative().literal())), r));
                        }
                    }
                }
            }
            if p != 2 {
                let r = weight_one_identity(&mut ctx).and_then(|i| i.report()).map(|r| vec![r]);
                out.extend(outcome("wt1", &[("p", p.to_string()), ("n", n.to_string())], r));
            }
        }
        if p != 2 {
            for w in 1..=max_weight {
                for k in crate::index::compositions(w) {
                    let r = verify_q2_suite(p, &k);
                    out.extend(outcome("q2", &[("p", p.to_string()), ("index", k.literal())], r));
                }
            }
        }
    }
    out
}
