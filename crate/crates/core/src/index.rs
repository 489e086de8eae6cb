//! Indices (compositions), exponent vectors and the combinatorics on them.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::binomial;

/// An index `(k_1, …, k_d)` of positive integers; the empty index is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Index {
    parts: Vec<u32>,
}

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse("index parts must be positive".into()));
        }
        Ok(Index { parts })
    }

    pub fn empty() -> Self {
        Index { parts: Vec::new() }
    }

    /// `{1}^l`.
    pub fn ones(l: usize) -> Self {
        Index { parts: vec![1; l] }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_admissible(&self) -> bool {
        self.parts.first().is_some_and(|&k| k >= 2)
    }

    /// `k̄ = (k_d, …, k_1)`.
    pub fn reversed(&self) -> Index {
        Index { parts: self.parts.iter().rev().copied().collect() }
    }

    /// `k_a = (k_1, …, k_a)`.
    pub fn prefix(&self, a: usize) -> Result<Index> {
        if a > self.depth() {
            return Err(Error::OutOfRange(format!("prefix length {a} of depth {}", self.depth())));
        }
        Ok(Index { parts: self.parts[..a].to_vec() })
    }

    /// `k^a = (k_{a+1}, …, k_d)`.
    pub fn suffix(&self, a: usize) -> Result<Index> {
        if a > self.depth() {
            return Err(Error::OutOfRange(format!("suffix offset {a} of depth {}", self.depth())));
        }
        Ok(Index { parts: self.parts[a..].to_vec() })
    }

    /// Componentwise `k + l`.
    pub fn plus(&self, l: &ExpVector) -> Result<Index> {
        if l.len() != self.depth() {
            return Err(Error::LengthMismatch(self.depth(), l.len()));
        }
        Ok(Index { parts: self.parts.iter().zip(l.entries()).map(|(k, s)| k + s).collect() })
    }

    pub fn concat(&self, other: &Index) -> Index {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Index { parts }
    }

    /// `(k_1 + 1, k_2, …)`-style edits: the index with part `a` replaced by `v`.
    pub fn with_part(&self, a: usize, v: u32) -> Index {
        let mut parts = self.parts.clone();
        parts[a] = v;
        Index { parts }
    }

    /// Hoffman dual: comma positions are complemented inside `{1, …, wt-1}`.
    pub fn hoffman_dual(&self) -> Result<Index> {
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        let w = self.weight();
        let mut commas = vec![false; w as usize];
        let mut s = 0;
        for &k in &self.parts[..self.depth() - 1] {
            s += k;
            commas[s as usize] = true;
        }
        let mut parts = Vec::new();
        let mut run = 1;
        for pos in 1..w as usize {
            if commas[pos] {
                run += 1;
            } else {
                parts.push(run);
                run = 1;
            }
        }
        parts.push(run);
        Ok(Index { parts })
    }

    /// All `2^{d-1}` ways of replacing each comma by a comma or a plus.
    pub fn star_decompose(&self) -> Vec<Index> {
        let d = self.depth();
        if d <= 1 {
            return vec![self.clone()];
        }
        (0u64..1 << (d - 1))
            .map(|mask| {
                let mut parts = vec![self.parts[0]];
                for (g, &k) in self.parts[1..].iter().enumerate() {
                    if mask >> g & 1 == 1 {
                        *parts.last_mut().unwrap() += k;
                    } else {
                        parts.push(k);
                    }
                }
                Index { parts }
            })
            .collect()
    }

    /// Cyclic rotation `(k_2, …, k_d, k_1)`.
    pub fn rotate(&self) -> Index {
        let mut parts = self.parts.clone();
        if !parts.is_empty() {
            parts.rotate_left(1);
        }
        Index { parts }
    }

    /// Comma-separated literal, e.g. `2,1,1`; the empty index prints as the empty string.
    pub fn literal(&self) -> String {
        self.parts.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.literal())
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    let s = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
    if s.is_empty() || s == "∅" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad entry {t:?} in {s:?}"))))
        .collect()
}

impl FromStr for Index {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Index::new(parse_list(s)?)
    }
}

/// Exponent vector `s` of a generalized sum; entries may be zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpVector {
    entries: Vec<u32>,
}

impl ExpVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExpVector { entries }
    }

    pub fn zeros(d: usize) -> Self {
        ExpVector { entries: vec![0; d] }
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn literal(&self) -> String {
        self.entries.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

impl FromStr for ExpVector {
    type Err = Error;
    /// Accepts `3,0` or `s=3,0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("s=").unwrap_or(s);
        Ok(ExpVector { entries: parse_list(s)? })
    }
}

impl fmt::Display for ExpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s=({})", self.literal())
    }
}

/// `∏_j C(k_j + l_j − 1, l_j)`.
pub fn b_binom(k: &Index, l: &ExpVector) -> Result<BigInt> {
    if k.depth() != l.len() {
        return Err(Error::LengthMismatch(k.depth(), l.len()));
    }
    Ok(k.parts()
        .iter()
        .zip(l.entries())
        .fold(BigInt::one(), |acc, (&kj, &lj)| acc * binomial((kj + lj - 1) as u64, lj as u64)))
}

/// All indices of weight `k` in lexicographic order; `k = 0` gives just the empty index.
pub fn compositions(k: u32) -> Vec<Index> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Index>) {
        if rem == 0 {
            out.push(Index { parts: cur.clone() });
            return;
        }
        for first in 1..=rem {
            cur.push(first);
            rec(rem - first, cur, out);
            cur.pop();
        }
    }
    rec(k, &mut cur, &mut out);
    out
}

pub fn compositions_of_depth(k: u32, d: usize) -> Vec<Index> {
    compositions(k).into_iter().filter(|c| c.depth() == d).collect()
}

/// All length-`d` vectors of nonnegative integers with entry sum `w`, lexicographic.
pub fn weak_compositions(w: u32, d: usize) -> Vec<ExpVector> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(d);
    fn rec(rem: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<ExpVector>) {
        if left == 0 {
            if rem == 0 {
                out.push(ExpVector { entries: cur.clone() });
            }
            return;
        }
        for v in 0..=rem {
            cur.push(v);
            rec(rem - v, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(w, d, &mut cur, &mut out);
    out
}

/// All `s` with `0 <= s <= k` componentwise, lexicographic.
pub fn bounded_exponents(k: &Index) -> Vec<ExpVector> {
    let mut out = vec![Vec::new()];
    for &kj in k.parts() {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                (0..=kj).map(move |s| {
                    let mut w = v.clone();
                    w.push(s);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(ExpVector::new).collect()
}

/// An orbit of weight-`k`, depth-`d` indices under cyclic rotation, listed from its lexicographically
/// smallest member onward.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub members: Vec<Index>,
}

impl Orbit {
    pub fn of(k: &Index) -> Orbit {
        let mut members = vec![k.clone()];
        let mut cur = k.rotate();
        while &cur != k {
            members.push(cur.clone());
            cur = cur.rotate();
        }
        let start = members.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).unwrap().0;
        members.rotate_left(start);
        Orbit { members }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn weight(&self) -> u32 {
        self.members[0].weight()
    }

    pub fn depth(&self) -> usize {
        self.members[0].depth()
    }

    pub fn representative(&self) -> &Index {
        &self.members[0]
    }
}

/// `Π(k, d)`, ordered by the lexicographically smallest member of each orbit.
pub fn orbits(k: u32, d: usize) -> Result<Vec<Orbit>> {
    if d == 0 || d as u32 > k {
        return Err(Error::OutOfRange(format!("no index of weight {k} and depth {d}")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for c in compositions_of_depth(k, d) {
        if seen.contains(&c) {
            continue;
        }
        let o = Orbit::of(&c);
        seen.extend(o.members.iter().cloned());
        out.push(o);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(s: &str) -> Index {
        s.parse().unwrap()
    }

    #[test]
    fn duals() {
        assert_eq!(ix("3,1").hoffman_dual().unwrap(), ix("1,1,2"));
        assert_eq!(ix("1").hoffman_dual().unwrap(), ix("1"));
        assert_eq!(ix("2").hoffman_dual().unwrap(), ix("1,1"));
        assert!(Index::empty().hoffman_dual().is_err());
        for w in 1..=8 {
            for k in compositions(w) {
                let d = k.hoffman_dual().unwrap();
                assert_eq!(d.hoffman_dual().unwrap(), k);
                assert_eq!(d.weight(), w);
                assert_eq!(k.depth() + d.depth(), w as usize + 1);
            }
        }
    }

    #[test]
    fn contractions() {
        assert_eq!(ix("2,3").star_decompose(), vec![ix("2,3"), ix("5")]);
        assert_eq!(ix("4").star_decompose(), vec![ix("4")]);
        assert_eq!(
            ix("1,1,1").star_decompose(),
            vec![ix("1,1,1"), ix("2,1"), ix("1,2"), ix("3")]
        );
    }

    #[test]
    fn binomial_weights() {
        assert_eq!(b_binom(&ix("2,1"), &ExpVector::zeros(2)).unwrap(), BigInt::one());
        assert_eq!(b_binom(&ix("2"), &"1".parse().unwrap()).unwrap(), BigInt::from(2));
        assert_eq!(b_binom(&ix("3,1"), &"1,2".parse().unwrap()).unwrap(), BigInt::from(3));
        assert!(b_binom(&ix("3,1"), &"1".parse().unwrap()).is_err());
    }

    #[test]
    fn structural_ops() {
        assert_eq!(ix("2,1").reversed(), ix("1,2"));
        assert_eq!(ix("2,1").prefix(0).unwrap(), Index::empty());
        assert_eq!(ix("2,1").suffix(2).unwrap(), Index::empty());
        assert_eq!(ix("2,1").plus(&"1,0".parse().unwrap()).unwrap(), ix("3,1"));
        assert!(ix("2,1").prefix(3).is_err());
        assert_eq!("s=3,0".parse::<ExpVector>().unwrap(), ExpVector::new(vec![3, 0]));
        assert_eq!("".parse::<Index>().unwrap(), Index::empty());
        assert!("2,0".parse::<Index>().is_err());
    }

    #[test]
    fn orbit_enumeration() {
        let o = orbits(2, 2).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].members, vec![ix("1,1")]);
        let o = orbits(3, 2).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].size(), 2);
        let o = orbits(4, 2).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].members, vec![ix("1,3"), ix("3,1")]);
        assert_eq!(o[1].members, vec![ix("2,2")]);
        assert!(orbits(2, 3).is_err());
        for k in 1..=7 {
            for d in 1..=k as usize {
                for orb in orbits(k, d).unwrap() {
                    assert_eq!(d % orb.size(), 0);
                }
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(compositions(0), vec![Index::empty()]);
        assert_eq!(compositions(5).len(), 16);
        assert_eq!(compositions(3), vec![ix("1,1,1"), ix("1,2"), ix("2,1"), ix("3")]);
        assert_eq!(weak_compositions(2, 2).len(), 3);
        assert_eq!(bounded_exponents(&ix("2,1")).len(), 6);
    }
}
