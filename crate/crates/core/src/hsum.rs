//! Multiple harmonic q-sums: exactly as rational functions, and reduced into `Z_{p,n}` at `m = p − 1`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::zring::{ZElem, ZRing};
use crate::exact::{cyclotomic, inv_qint_closed_form, q_int, CycModElement, Poly, RatFun, Rational};
use crate::index::{ExpVector, Index};

/// Largest `m` accepted by [`hsum_exact`] unless a bound is passed explicitly.
pub const DEFAULT_EXACT_BOUND: u64 = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// numerators `q^{(k_a−1)m_a}`, strict chain
    Plain,
    /// plain numerators, non-strict chain
    Star,
    /// numerators `q^{m_a}`, strict chain
    Bar,
    /// numerators `q^{m_a}`, non-strict chain
    BarStar,
    /// numerators `q^{s_a m_a}`, strict chain
    Generalized,
}

impl Variant {
    pub fn is_star(self) -> bool {
        matches!(self, Variant::Star | Variant::BarStar)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Star => "star",
            Variant::Bar => "bar",
            Variant::BarStar => "bar-star",
            Variant::Generalized => "generalized",
        }
    }

    /// Numerator exponents `e_a` with summand `q^{e_a m_a}/[m_a]^{k_a}`.
    pub fn exponents(self, k: &Index, s: Option<&ExpVector>) -> Result<Vec<u32>> {
        match self {
            Variant::Plain | Variant::Star => Ok(k.parts().iter().map(|&x| x - 1).collect()),
            Variant::Bar | Variant::BarStar => Ok(vec![1; k.depth()]),
            Variant::Generalized => {
                let s = s.ok_or_else(|| Error::Parse("generalized sums need an exponent vector".into()))?;
                if s.len() != k.depth() {
                    return Err(Error::LengthMismatch(k.depth(), s.len()));
                }
                Ok(s.entries().to_vec())
            }
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "plain" => Variant::Plain,
            "star" => Variant::Star,
            "bar" => Variant::Bar,
            "bar-star" | "barstar" => Variant::BarStar,
            "generalized" | "gen" => Variant::Generalized,
            _ => return Err(Error::Parse(format!("unknown variant {s:?}"))),
        })
    }
}

/// Runs the suffix-accumulator sweep over `1..=m`.
///
/// `acc[a]` holds the partial sum over the suffix `k^a`; a strict chain updates `a` ascending so
/// that `acc[a+1]` is still the value from the previous step, a star chain updates descending.
fn sweep<T: Clone>(
    m: u64,
    depth: usize,
    star: bool,
    one: T,
    zero: T,
    mut term: impl FnMut(u64, usize, &T) -> Result<T>,
    add: impl Fn(&T, &T) -> Result<T>,
) -> Result<T> {
    let mut acc = vec![zero; depth + 1];
    acc[depth] = one;
    for mm in 1..=m {
        let order: Box<dyn Iterator<Item = usize>> =
            if star { Box::new((0..depth).rev()) } else { Box::new(0..depth) };
        for a in order {
            let inc = term(mm, a, &acc[a + 1])?;
            acc[a] = add(&acc[a], &inc)?;
        }
    }
    Ok(acc.swap_remove(0))
}

/// `H_{p−1}^v(k; q)` reduced into `Z_{p,n}`; `[m]^{-1}` is taken from the closed form.
///
/// Runs on the `i128` kernel and falls back to rational arithmetic if a coefficient overflows.
pub fn hsum_mod(v: Variant, p: u64, n: u32, k: &Index, s: Option<&ExpVector>) -> Result<CycModElement> {
    let ring = ZRing::new(p, n)?;
    match hsum_z(&ring, v, k, s) {
        Ok(x) => Ok(ring.to_cycmod(&x)),
        Err(Error::Overflow(_)) => hsum_mod_with(v, p, n, k, s, InverseMethod::ClosedForm),
        Err(e) => Err(e),
    }
}

/// `H_{p−1}^v(k; q)` as an integer residue vector of `ring`.
pub fn hsum_z(ring: &ZRing, v: Variant, k: &Index, s: Option<&ExpVector>) -> Result<ZElem> {
    let e = v.exponents(k, s)?;
    if k.is_empty() {
        return Ok(ring.one());
    }
    let kmax = *k.parts().iter().max().unwrap() as usize;
    let emax = *e.iter().max().unwrap() as usize;
    let mut cur_m = 0;
    let mut inv_pows: Vec<ZElem> = Vec::new();
    let mut qm_pows: Vec<ZElem> = Vec::new();
    sweep(
        ring.p - 1,
        k.depth(),
        v.is_star(),
        ring.one(),
        ring.zero(),
        |mm, a, prev| {
            if mm != cur_m {
                cur_m = mm;
                let inv = ring.inv_qint(mm)?;
                inv_pows = vec![ring.one()];
                for i in 0..kmax {
                    inv_pows.push(ring.mul(&inv_pows[i], &inv)?);
                }
                let qm = ring.q_pow(mm as usize)?;
                qm_pows = vec![ring.one()];
                for i in 0..emax {
                    qm_pows.push(ring.mul(&qm_pows[i], &qm)?);
                }
            }
            if prev.iter().all(|&c| c == 0) {
                return Ok(prev.clone());
            }
            let t = ring.mul(&qm_pows[e[a] as usize], &inv_pows[k.parts()[a] as usize])?;
            ring.mul(&t, prev)
        },
        |x, y| ring.add(x, y),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseMethod {
    ClosedForm,
    Euclid,
}

pub fn hsum_mod_with(
    v: Variant,
    p: u64,
    n: u32,
    k: &Index,
    s: Option<&ExpVector>,
    method: InverseMethod,
) -> Result<CycModElement> {
    let e = v.exponents(k, s)?;
    let one = CycModElement::one(p, n)?;
    if k.is_empty() {
        return Ok(one);
    }
    let kmax = *k.parts().iter().max().unwrap();
    let emax = *e.iter().max().unwrap();
    let q = CycModElement::q(p, n)?;
    // per-m tables: inverse powers and numerator powers, built lazily when m advances
    let mut cur_m = 0;
    let mut inv_pows: Vec<CycModElement> = Vec::new();
    let mut qm_pows: Vec<CycModElement> = Vec::new();
    let mut qm = one.clone();
    sweep(
        p - 1,
        k.depth(),
        v.is_star(),
        one.clone(),
        CycModElement::zero(p, n)?,
        |mm, a, prev| {
            if mm != cur_m {
                cur_m = mm;
                qm = &qm * &q;
                let inv = match method {
                    InverseMethod::ClosedForm => inv_qint_closed_form(mm, p, n)?,
                    InverseMethod::Euclid => crate::exact::reduce(&q_int(mm)?, p, n)?.inv()?,
                };
                inv_pows = vec![one.clone()];
                for i in 0..kmax as usize {
                    inv_pows.push(&inv_pows[i] * &inv);
                }
                qm_pows = vec![one.clone()];
                for i in 0..emax as usize {
                    qm_pows.push(&qm_pows[i] * &qm);
                }
            }
            if prev.is_zero() {
                return Ok(prev.clone());
            }
            let t = &qm_pows[e[a] as usize] * &inv_pows[k.parts()[a] as usize];
            Ok(&t * prev)
        },
        |x, y| Ok(x + y),
    )
}

/// Exact `H_m^v(k; q)` for `m <= DEFAULT_EXACT_BOUND`.
pub fn hsum_exact(v: Variant, m: u64, k: &Index, s: Option<&ExpVector>) -> Result<RatFun> {
    hsum_exact_bounded(v, m, k, s, DEFAULT_EXACT_BOUND)
}

/// Exact sum, accumulated over the fixed denominator `L^{wt}` with `L = ∏_{2<=d<=m} Φ_d`, then
/// reduced by trial division by each cyclotomic factor.
pub fn hsum_exact_bounded(v: Variant, m: u64, k: &Index, s: Option<&ExpVector>, bound: u64) -> Result<RatFun> {
    if m > bound {
        return Err(Error::BoundExceeded(format!("m = {m} > {bound}")));
    }
    let e = v.exponents(k, s)?;
    if k.is_empty() {
        return Ok(RatFun::one());
    }
    let w = k.weight();
    let cyc: Vec<(u64, Poly)> = (2..=m).map(|d| (d, cyclotomic(d))).collect();
    let l = cyc.iter().fold(Poly::one(), |acc, (_, f)| &acc * f);
    let cof: Vec<Poly> = (1..=m).map(|j| l.exact_div(&q_int(j).unwrap()).unwrap()).collect();
    let kmax = *k.parts().iter().max().unwrap() as usize;
    let mut cof_pows: Vec<Vec<Poly>> = Vec::new();
    for c in &cof {
        let mut row = vec![Poly::one()];
        for i in 0..kmax {
            row.push(&row[i] * c);
        }
        cof_pows.push(row);
    }
    let num = sweep(
        m,
        k.depth(),
        v.is_star(),
        Poly::one(),
        Poly::zero(),
        |mm, a, prev| {
            let shift = (e[a] as u64 * mm) as usize;
            Ok((&cof_pows[(mm - 1) as usize][k.parts()[a] as usize] * prev).shift(shift))
        },
        |x, y| Ok(x + y),
    )?;
    Ok(cancel_cyclotomic(num, cyc, w))
}

/// `num / ∏ Φ_d^e` in lowest terms.
pub(crate) fn cancel_cyclotomic(mut num: Poly, cyc: Vec<(u64, Poly)>, e: u32) -> RatFun {
    if num.is_zero() {
        return RatFun::zero();
    }
    let mut den = Poly::one();
    for (_, f) in cyc {
        let mut left = e;
        while left > 0 {
            match num.exact_div(&f) {
                Some(qq) => {
                    num = qq;
                    left -= 1;
                }
                None => break,
            }
        }
        den = &den * &f.pow(left);
    }
    RatFun::from_coprime(num, den)
}

/// The classical multiple harmonic sum `H_m(k)` (`q = 1`), plain or star.
pub fn harmonic_rational(m: u64, k: &Index, star: bool) -> Rational {
    if k.is_empty() {
        return Rational::one();
    }
    let inv: Vec<Rational> = (1..=m).map(|j| Rational::new(1.into(), j.into())).collect();
    let parts = k.parts();
    sweep(
        m,
        k.depth(),
        star,
        Rational::one(),
        Rational::zero(),
        |mm, a, prev| {
            let base = &inv[(mm - 1) as usize];
            let mut t = prev.clone();
            for _ in 0..parts[a] {
                t *= base;
            }
            Ok(t)
        },
        |x, y| Ok(x + y),
    )
    .expect("infallible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio, reduce};
    use crate::index::compositions;

    fn ix(s: &str) -> Index {
        s.parse().unwrap()
    }

    /// Independent nested enumeration of strict or weak chains.
    fn brute(m: u64, k: &[u32], e: &[u32], star: bool) -> RatFun {
        if k.is_empty() {
            return RatFun::one();
        }
        let mut total = RatFun::zero();
        for m1 in 1..=m {
            let t = RatFun::new(
                Poly::monomial(rat(1), (e[0] as u64 * m1) as usize),
                q_int(m1).unwrap().pow(k[0]),
            );
            let inner = brute(if star { m1 } else { m1 - 1 }, &k[1..], &e[1..], star);
            total = &total + &(&t * &inner);
        }
        total
    }

    #[test]
    fn exact_examples() {
        let h = hsum_exact(Variant::Plain, 2, &ix("1"), None).unwrap();
        assert_eq!(h, RatFun::new(Poly::from_ints(&[2, 1]), Poly::from_ints(&[1, 1])));
        assert_eq!(hsum_exact(Variant::Plain, 9, &Index::empty(), None).unwrap(), RatFun::one());
        assert_eq!(hsum_exact(Variant::Plain, 1, &ix("2"), None).unwrap(), RatFun::from_poly(Poly::q()));
        assert!(hsum_exact(Variant::Plain, 61, &ix("2"), None).is_err());
    }

    #[test]
    fn exact_matches_brute_force() {
        for m in 0..=6u64 {
            for w in 1..=4 {
                for k in compositions(w) {
                    for v in [Variant::Plain, Variant::Star, Variant::Bar, Variant::BarStar] {
                        let e = v.exponents(&k, None).unwrap();
                        let fast = hsum_exact(v, m, &k, None).unwrap();
                        assert_eq!(fast, brute(m, k.parts(), &e, v.is_star()), "{v} m={m} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn weight_one_closed_form() {
        let h = hsum_mod(Variant::Plain, 5, 1, &ix("1"), None).unwrap();
        assert_eq!(h.residue(), &Poly::from_ints(&[2, -2]));
    }

    #[test]
    fn depth_exceeding_m_vanishes() {
        assert!(hsum_mod(Variant::Plain, 2, 1, &ix("1,1"), None).unwrap().is_zero());
        assert!(hsum_mod(Variant::Plain, 3, 2, &ix("1,1,1"), None).unwrap().is_zero());
    }

    #[test]
    fn empty_index_is_one() {
        for v in [Variant::Plain, Variant::Star, Variant::Bar, Variant::BarStar] {
            assert!(hsum_mod(v, 7, 2, &Index::empty(), None).unwrap().residue().is_one());
        }
        let g = hsum_mod(Variant::Generalized, 7, 2, &Index::empty(), Some(&ExpVector::zeros(0))).unwrap();
        assert!(g.residue().is_one());
    }

    #[test]
    fn bar_is_generalized_with_ones() {
        for p in [3u64, 5, 7] {
            for n in 1..=2 {
                for k in compositions(4) {
                    let s = ExpVector::new(vec![1; k.depth()]);
                    assert_eq!(
                        hsum_mod(Variant::Bar, p, n, &k, None).unwrap(),
                        hsum_mod(Variant::Generalized, p, n, &k, Some(&s)).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn mod_agrees_with_exact_reduction() {
        for p in [3u64, 5, 7] {
            for n in 1..=2 {
                for w in 1..=3 {
                    for k in compositions(w) {
                        for v in [Variant::Plain, Variant::Star, Variant::Bar] {
                            let ex = hsum_exact(v, p - 1, &k, None).unwrap();
                            // the denominator is a unit mod [p]^n
                            let den = reduce(ex.den(), p, n).unwrap().inv().unwrap();
                            let want = &reduce(ex.num(), p, n).unwrap() * &den;
                            assert_eq!(hsum_mod(v, p, n, &k, None).unwrap(), want, "{v} p={p} n={n} k={k}");
                            let eu = hsum_mod_with(v, p, n, &k, None, InverseMethod::Euclid).unwrap();
                            assert_eq!(eu, want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rational_sums() {
        assert_eq!(harmonic_rational(4, &ix("1"), false), ratio(25, 12));
        assert_eq!(harmonic_rational(2, &ix("1,1"), true), rat(1) + ratio(1, 2) + ratio(1, 4));
        assert_eq!(harmonic_rational(3, &ix("1,1,1,1"), false), rat(0));
    }
}
