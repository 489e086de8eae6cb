//! Words in the letters `y_k`, quasi-shuffle products, and the relation space whose quotient
//! dimensions are tabulated for comparison with the finite/symmetric side.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Poly, Rational};
use crate::index::{compositions, Index};
use crate::linalg::{certified_kernel, IntMatrix, DEFAULT_MODULI};

/// `y_{k_1} ⋯ y_{k_d}`; the empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<u32>,
}

impl Word {
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::Parse("letters must be >= 1".into()));
        }
        Ok(Word { letters })
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn weight(&self) -> u32 {
        self.letters.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn to_index(&self) -> Index {
        Index::new(self.letters.clone()).expect("letters are positive")
    }

    fn prepend(&self, k: u32) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() + 1);
        letters.push(k);
        letters.extend_from_slice(&self.letters);
        Word { letters }
    }

    fn tail(&self) -> Word {
        Word { letters: self.letters[1..].to_vec() }
    }
}

impl From<&Index> for Word {
    fn from(k: &Index) -> Self {
        Word { letters: k.parts().to_vec() }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self.letters.iter().map(|k| format!("y{k}")).collect();
        write!(f, "{}", s.join(" "))
    }
}

/// Finite `ℚ[q]`-linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolySum {
    terms: BTreeMap<Word, Poly>,
}

impl PolySum {
    pub fn zero() -> Self {
        PolySum::default()
    }

    pub fn word(w: Word) -> Self {
        let mut s = PolySum::zero();
        s.add_term(w, Poly::one());
        s
    }

    pub fn terms(&self) -> &BTreeMap<Word, Poly> {
        &self.terms
    }

    pub fn coeff(&self, w: &Word) -> Poly {
        self.terms.get(w).cloned().unwrap_or_else(Poly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: Poly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&w) {
            Some(e) => e + &c,
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, sum);
        }
    }

    pub fn add(&self, other: &PolySum) -> PolySum {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> PolySum {
        let mut out = PolySum::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    /// `y_k · self`.
    pub fn prepend(&self, k: u32) -> PolySum {
        PolySum { terms: self.terms.iter().map(|(w, c)| (w.prepend(k), c.clone())).collect() }
    }

    /// Substitutes `q = 1` in every coefficient.
    pub fn at_q_one(&self) -> PolySum {
        let mut out = PolySum::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), Poly::constant(c.eval_one()));
        }
        out
    }
}

impl fmt::Display for PolySum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c}) {w}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Product {
    Stuffle,
    QStuffle,
    StuffleStar,
}

thread_local! {
    static MEMO: RefCell<HashMap<(Product, Word, Word), PolySum>> = RefCell::new(HashMap::new());
}

fn product(kind: Product, a: &Word, b: &Word) -> PolySum {
    if a.is_empty() {
        return PolySum::word(b.clone());
    }
    if b.is_empty() {
        return PolySum::word(a.clone());
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let key = (kind, a.clone(), b.clone());
    if let Some(v) = MEMO.with(|m| m.borrow().get(&key).cloned()) {
        return v;
    }
    let (k, l) = (a.letters[0], b.letters[0]);
    let (at, bt) = (a.tail(), b.tail());
    let mut out = product(kind, &at, b).prepend(k);
    out = out.add(&product(kind, a, &bt).prepend(l));
    let inner = product(kind, &at, &bt);
    let merge = inner.prepend(k + l);
    out = match kind {
        Product::StuffleStar => out.add(&merge.scale(&Poly::constant(-Rational::one()))),
        _ => out.add(&merge),
    };
    if kind == Product::QStuffle {
        out = out.add(&inner.prepend(k + l - 1).scale(&Poly::one_minus_q()));
    }
    MEMO.with(|m| m.borrow_mut().insert(key, out.clone()));
    out
}

/// `y_k w ∗ y_l w' = y_k(w ∗ y_l w') + y_l(y_k w ∗ w') + y_{k+l}(w ∗ w')`.
pub fn stuffle(a: &Word, b: &Word) -> PolySum {
    product(Product::Stuffle, a, b)
}

/// The stuffle recursion plus `(1−q) y_{k+l−1}(w ∘ w')`; mirrors the product of finite q-sums.
pub fn q_stuffle(a: &Word, b: &Word) -> PolySum {
    product(Product::QStuffle, a, b)
}

/// The stuffle recursion with the merge term subtracted.
pub fn stuffle_star(a: &Word, b: &Word) -> PolySum {
    product(Product::StuffleStar, a, b)
}

/// Extends a product bilinearly to `PolySum` operands.
pub fn product_sums(f: fn(&Word, &Word) -> PolySum, a: &PolySum, b: &PolySum) -> PolySum {
    let mut out = PolySum::zero();
    for (w1, c1) in a.terms() {
        for (w2, c2) in b.terms() {
            out = out.add(&f(w1, w2).scale(&(c1 * c2)));
        }
    }
    out
}

/// Generators of the relation space in weight `k`, columns indexed by the weight-`k` compositions
/// in lexicographic order.
#[derive(Clone, Debug)]
pub struct RelationSpace {
    pub weight: u32,
    pub columns: Vec<Index>,
    pub matrix: IntMatrix,
}

fn dual_rev(w: &Word) -> Result<Word> {
    if w.is_empty() {
        return Ok(Word::empty());
    }
    Ok(Word::from(&w.to_index().hoffman_dual()?.reversed()))
}

pub fn relation_space(k: u32) -> Result<RelationSpace> {
    if k == 0 {
        return Err(Error::OutOfRange("relation space needs weight >= 1".into()));
    }
    let columns = compositions(k);
    let col_of: HashMap<Word, usize> = columns.iter().enumerate().map(|(i, c)| (Word::from(c), i)).collect();
    let mut rows: Vec<Vec<(usize, i128)>> = Vec::new();
    let mut push = |s: &PolySum| -> Result<()> {
        let mut r = Vec::new();
        for (w, c) in s.terms() {
            let j = *col_of.get(w).ok_or_else(|| Error::OutOfRange(format!("word {w} has wrong weight")))?;
            let x = c.coeff(0);
            if c.degree() != Some(0) || !x.is_integer() {
                return Err(Error::OutOfRange("relation coefficients must be integer constants".into()));
            }
            r.push((j, i128::try_from(x.to_integer()).map_err(|_| Error::Overflow("relation coefficient"))?));
        }
        r.sort_unstable();
        if !r.is_empty() {
            rows.push(r);
        }
        Ok(())
    };
    let sign = Poly::constant(if k % 2 == 0 { -Rational::one() } else { Rational::one() });
    for a in 1..k {
        for kk in compositions(a) {
            for ll in compositions(k - a) {
                let (x, y) = (Word::from(&kk), Word::from(&ll));
                let lhs = stuffle_star(&x, &y);
                let rhs = stuffle_star(&dual_rev(&x)?, &dual_rev(&y)?);
                push(&lhs.add(&rhs.scale(&sign)))?;
            }
        }
    }
    let one = Word::new(vec![1]).unwrap();
    if k == 1 {
        push(&stuffle_star(&one, &Word::empty()))?;
    } else {
        for kk in compositions(k - 1) {
            push(&stuffle_star(&one, &Word::from(&kk)))?;
        }
    }
    for kk in &columns {
        let w = Word::from(kk);
        let mut s = PolySum::word(w.clone());
        let sg = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        s.add_term(dual_rev(&w)?, Poly::constant(sg));
        push(&s)?;
    }
    rows.sort();
    rows.dedup();
    let mut matrix = IntMatrix::new(columns.len());
    for r in rows {
        matrix.push_sparse(r);
    }
    Ok(RelationSpace { weight: k, columns, matrix })
}

impl RelationSpace {
    /// Writes the exact text format: a tab-separated header of column compositions, then one
    /// line of tab-separated fractions per relation generator.
    pub fn export(&self, out: &mut impl Write) -> Result<()> {
        let header: Vec<String> = self.columns.iter().map(Index::to_string).collect();
        writeln!(out, "{}", header.join("\t"))?;
        for r in &self.matrix.rows {
            let mut dense = vec![0i128; self.columns.len()];
            for &(j, v) in r {
                dense[j] = v;
            }
            let line: Vec<String> = dense.iter().map(|v| format!("{v}/1")).collect();
            writeln!(out, "{}", line.join("\t"))?;
        }
        Ok(())
    }
}

/// Quotient dimension `2^{k-1} − rank` with its certification status.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientDim {
    pub weight: u32,
    pub columns: usize,
    pub rank: usize,
    pub dim: usize,
    pub exact: bool,
}

pub fn word_quotient(k: u32) -> Result<QuotientDim> {
    let rs = relation_space(k)?;
    let ker = certified_kernel(&rs.matrix, DEFAULT_MODULI);
    Ok(QuotientDim { weight: k, columns: rs.columns.len(), rank: ker.rank, dim: ker.dim(), exact: ker.exact })
}

pub fn dim_word_quotient(k: u32) -> Result<usize> {
    let r = word_quotient(k)?;
    if !r.exact {
        return Err(Error::BoundExceeded(format!("rank of the weight-{k} relation space could not be certified")));
    }
    Ok(r.dim)
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("q-series coefficient"))
}

/// Applies `q^{(k−1)j} / [j]^k = q^{(k−1)j} ((1−q)/(1−q^j))^k` to a series truncated at `len`.
fn apply_letter(s: &[i128], k: u32, j: usize) -> Result<Vec<i128>> {
    let len = s.len();
    let sh = (k as usize - 1) * j;
    let mut v = vec![0i128; len];
    if sh < len {
        v[sh..].copy_from_slice(&s[..len - sh]);
    }
    for _ in 0..k {
        for i in (1..len).rev() {
            v[i] = ck(v[i].checked_sub(v[i - 1]))?;
        }
        for i in j..len {
            v[i] = ck(v[i].checked_add(v[i - j]))?;
        }
    }
    Ok(v)
}

fn mul_series(a: &[i128], b: &[i128], len: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; len];
    for (i, &x) in a.iter().enumerate().take(len) {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(len - i) {
            if y != 0 {
                out[i + j] = ck(out[i + j].checked_add(ck(x.checked_mul(y))?))?;
            }
        }
    }
    Ok(out)
}

/// `Σ_{d ≤ m, d > 1} φ(d)`, the degree of `lcm([1], …, [m])`.
fn lcm_degree(m: u64) -> usize {
    (2..=m).map(|d| crate::exact::cyclotomic(d).degree().unwrap()).sum()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomomorphismReport {
    pub max_m: u64,
    pub max_weight: u32,
    pub pairs: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl HomomorphismReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `H_m(w_1 ∘ w_2) = H_m(w_1) H_m(w_2)` for all unordered pairs of words of weight
/// `<= max_weight` (the empty word included) and all `1 <= m <= max_m`.
///
/// Both sides are rational functions whose denominators divide `lcm([1..m])^W` (`W` the total
/// weight) and whose degree exceeds that of the denominator by at most `W`, so after clearing
/// denominators the difference is a polynomial of degree `<= W·deg lcm + W`. Agreement of the
/// power series at `q = 0` through that order therefore proves the identity exactly.
pub fn check_q_stuffle_homomorphism(max_m: u64, max_weight: u32) -> Result<HomomorphismReport> {
    let mut words: Vec<Word> = (1..=2 * max_weight).flat_map(compositions).map(|k| Word::from(&k)).collect();
    words.insert(0, Word::empty());
    // longest first so that tails still hold the previous step's value during an update
    let mut order: Vec<usize> = (1..words.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(words[i].letters.len()));
    let pos: HashMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let tails: Vec<usize> = words.iter().map(|w| if w.is_empty() { 0 } else { pos[&w.tail()] }).collect();
    let len_max = (2 * max_weight as usize) * lcm_degree(max_m) + 2 * max_weight as usize + 1;

    let small: Vec<Word> = words.iter().filter(|w| w.weight() <= max_weight).cloned().collect();
    let mut pairs = Vec::new();
    for (i, a) in small.iter().enumerate() {
        for b in &small[i..] {
            pairs.push((a.clone(), b.clone(), q_stuffle(a, b)));
        }
    }

    let mut acc: Vec<Vec<i128>> = vec![vec![0; len_max]; words.len()];
    acc[0][0] = 1;
    let mut failures = Vec::new();
    let mut checks = 0;
    for m in 1..=max_m {
        for &i in &order {
            let k = words[i].letters[0];
            let inc = apply_letter(&acc[tails[i]], k, m as usize)?;
            for (x, y) in acc[i].iter_mut().zip(&inc) {
                *x = ck(x.checked_add(*y))?;
            }
        }
        let dl = lcm_degree(m);
        for (a, b, prod) in &pairs {
            let w = (a.weight() + b.weight()) as usize;
            let len = w * dl + w + 1;
            let lhs = mul_series(&acc[pos[a]], &acc[pos[b]], len)?;
            let mut rhs = vec![0i128; len];
            for (word, c) in prod.terms() {
                let cs: Vec<i128> = c
                    .coeffs()
                    .iter()
                    .map(|x| i128::try_from(x.to_integer()).map_err(|_| Error::Overflow("coefficient")))
                    .collect::<Result<_>>()?;
                let t = mul_series(&cs, &acc[pos[word]], len)?;
                for (x, y) in rhs.iter_mut().zip(&t) {
                    *x = ck(x.checked_add(*y))?;
                }
            }
            checks += 1;
            if lhs != rhs {
                failures.push(format!("m={m}: {a} o {b}"));
            }
        }
    }
    Ok(HomomorphismReport { max_m, max_weight, pairs: pairs.len(), checks, failures })
}

/// Evaluates `Σ c_w(q) H_m(w; q)` exactly.
pub fn eval_hsum(s: &PolySum, m: u64) -> Result<crate::exact::RatFun> {
    let mut out = crate::exact::RatFun::zero();
    for (w, c) in s.terms() {
        let h = crate::hsum::hsum_exact(crate::hsum::Variant::Plain, m, &w.to_index(), None)?;
        out = &out + &(&h * &crate::exact::RatFun::from_poly(c.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn w(l: &[u32]) -> Word {
        Word::new(l.to_vec()).unwrap()
    }

    fn ps(terms: &[(&[u32], Poly)]) -> PolySum {
        let mut s = PolySum::zero();
        for (l, c) in terms {
            s.add_term(w(l), c.clone());
        }
        s
    }

    fn c(x: i64) -> Poly {
        Poly::constant(rat(x))
    }

    #[test]
    fn stuffle_examples() {
        assert_eq!(stuffle(&w(&[1]), &w(&[1])), ps(&[(&[1, 1], c(2)), (&[2], c(1))]));
        assert_eq!(stuffle(&w(&[2]), &w(&[1])), ps(&[(&[2, 1], c(1)), (&[1, 2], c(1)), (&[3], c(1))]));
        assert_eq!(stuffle(&w(&[3, 1]), &Word::empty()), PolySum::word(w(&[3, 1])));
        assert_eq!(stuffle_star(&w(&[1]), &w(&[1])), ps(&[(&[1, 1], c(2)), (&[2], c(-1))]));
        assert_eq!(stuffle_star(&Word::empty(), &w(&[2])), PolySum::word(w(&[2])));
    }

    #[test]
    fn q_stuffle_depth_one() {
        let got = q_stuffle(&w(&[2]), &w(&[3]));
        let want = ps(&[(&[2, 3], c(1)), (&[3, 2], c(1)), (&[5], c(1)), (&[4], Poly::one_minus_q())]);
        assert_eq!(got, want);
        assert_eq!(q_stuffle(&w(&[2]), &Word::empty()), PolySum::word(w(&[2])));
        assert_eq!(got.at_q_one(), stuffle(&w(&[2]), &w(&[3])));
    }

    #[test]
    fn q_stuffle_matches_exact_products() {
        let ws = [w(&[1]), w(&[2]), w(&[1, 1]), w(&[2, 1])];
        for a in &ws {
            for b in &ws {
                for m in 1..=5 {
                    let lhs = eval_hsum(&q_stuffle(a, b), m).unwrap();
                    let ha = eval_hsum(&PolySum::word(a.clone()), m).unwrap();
                    let hb = eval_hsum(&PolySum::word(b.clone()), m).unwrap();
                    assert_eq!(lhs, &ha * &hb, "{a} {b} m={m}");
                }
            }
        }
    }

    #[test]
    fn series_check_small() {
        let r = check_q_stuffle_homomorphism(6, 2).unwrap();
        assert!(r.pass(), "{:?}", r.failures);
        assert_eq!(r.pairs, 10);
    }

    #[test]
    fn series_check_detects_plain_stuffle() {
        // the ordinary stuffle is not a homomorphism for q-sums
        let a = w(&[1]);
        let s = stuffle(&a, &a);
        let lhs = eval_hsum(&s, 3).unwrap();
        let h = eval_hsum(&PolySum::word(a), 3).unwrap();
        assert_ne!(lhs, &h * &h);
    }

    #[test]
    fn quotient_dimensions() {
        let want = [0, 0, 1, 0, 2, 1, 3];
        for (k, &d) in (1..=7).zip(want.iter()) {
            assert_eq!(dim_word_quotient(k).unwrap(), d, "k={k}");
        }
    }

    #[test]
    fn export_format() {
        let rs = relation_space(2).unwrap();
        let mut buf = Vec::new();
        rs.export(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "(1,1)\t(2)");
        assert!(lines.all(|l| l.split('\t').count() == 2 && l.contains('/')));
    }
}
