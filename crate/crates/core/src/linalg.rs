//! Exact linear algebra: fraction-free elimination over `ℤ`, and a certified modular route for
//! the larger relation matrices.
//!
//! The modular route computes the reduced echelon form modulo word-sized primes, lifts the
//! kernel basis by CRT and rational reconstruction, and then checks every lifted vector against
//! the integer matrix exactly. The rank modulo a prime never exceeds the rank over `ℚ`, so a
//! verified kernel of complementary dimension pins the rank exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::Rational;

/// Primes just below `2^61`, used as moduli.
pub const MODULI: [u64; 16] = [
    2305843009213693951,
    2305843009213693921,
    2305843009213693907,
    2305843009213693669,
    2305843009213693613,
    2305843009213693487,
    2305843009213693483,
    2305843009213693381,
    2305843009213693297,
    2305843009213693147,
    2305843009213692953,
    2305843009213692939,
    2305843009213692911,
    2305843009213692861,
    2305843009213692779,
    2305843009213692647,
];

/// Sparse integer matrix, rows of `(column, value)` with distinct columns.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntMatrix {
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, i128)>>,
}

impl IntMatrix {
    pub fn new(ncols: usize) -> Self {
        IntMatrix { ncols, rows: Vec::new() }
    }

    pub fn from_dense(rows: &[Vec<i128>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::new(ncols);
        for r in rows {
            m.push_dense(r);
        }
        m
    }

    pub fn push_dense(&mut self, r: &[i128]) {
        assert_eq!(r.len(), self.ncols);
        self.rows.push(r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, v)).collect());
    }

    pub fn push_sparse(&mut self, mut r: Vec<(usize, i128)>) {
        r.retain(|&(_, v)| v != 0);
        r.sort_unstable_by_key(|&(j, _)| j);
        debug_assert!(r.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(r.iter().all(|&(j, _)| j < self.ncols));
        self.rows.push(r);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut cols: Vec<Vec<(usize, i128)>> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, v) in r {
                cols[j].push((i, v));
            }
        }
        IntMatrix { ncols: self.rows.len(), rows: cols }
    }

    pub fn to_dense_big(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![BigInt::zero(); self.ncols];
                for &(j, v) in r {
                    d[j] = BigInt::from(v);
                }
                d
            })
            .collect()
    }

    /// `M v` over `ℤ` for an integer vector given as `(column, value)` pairs.
    pub fn apply(&self, v: &[(usize, BigInt)]) -> Vec<BigInt> {
        let mut dense = vec![BigInt::zero(); self.ncols];
        for (j, x) in v {
            dense[*j] = x.clone();
        }
        self.rows
            .iter()
            .map(|r| r.iter().fold(BigInt::zero(), |acc, &(j, a)| if dense[j].is_zero() { acc } else { acc + &dense[j] * a }))
            .collect()
    }
}

/// Fraction-free (Bareiss) elimination; returns the rank and the pivot columns.
pub fn bareiss(a: Vec<Vec<BigInt>>) -> (usize, Vec<usize>) {
    let (pivots, _) = bareiss_echelon(a);
    (pivots.len(), pivots)
}

/// Bareiss echelon form: pivot columns and the first `rank` rows, all entries integral.
pub fn bareiss_echelon(mut a: Vec<Vec<BigInt>>) -> (Vec<usize>, Vec<Vec<BigInt>>) {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, piv);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (pivots, a)
}

/// Clears denominators row by row.
pub fn integer_rows(m: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    bareiss(integer_rows(m)).0
}

/// Basis of `{x : M x = 0}` in reduced echelon form: one vector per non-pivot column `f`, with
/// entry 1 at `f` and zeros at the other non-pivot columns.
pub fn nullspace(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let ncols = m.first().map_or(0, Vec::len);
    let (pivots, e) = bareiss_echelon(integer_rows(m));
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); ncols];
            v[f] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate().rev() {
                let s: Rational = e[i][pc + 1..]
                    .iter()
                    .zip(&v[pc + 1..])
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, x)| Rational::from_integer(a.clone()) * x)
                    .sum();
                v[pc] = -s / Rational::from_integer(e[i][pc].clone());
            }
            v
        })
        .collect()
}

/// Textbook Gauss-Jordan over `ℚ`; returns the nonzero rows of the reduced echelon form.
pub fn rref_rational(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, piv);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    a.truncate(r);
    a
}

/// Rank by textbook rational elimination (test oracle).
pub fn rank_naive(m: &[Vec<Rational>]) -> usize {
    rref_rational(m).len()
}

#[inline]
fn mulmod(a: u64, b: u64, l: u64) -> u64 {
    ((a as u128 * b as u128) % l as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, l: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, l);
        }
        a = mulmod(a, a, l);
        e >>= 1;
    }
    r
}

fn to_mod(v: i128, l: u64) -> u64 {
    v.rem_euclid(l as i128) as u64
}

/// Reduced echelon form modulo `l`: pivot columns and, for each pivot row, the dense row.
pub struct ModRref {
    pub modulus: u64,
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<u64>>,
}

/// Products of two residues are below `2^122`, so 60 of them fit in a `u128` accumulator.
const LAZY: usize = 60;

/// `v[j] += f·row[j]` for `j >= from`, with `v` reduced whenever `pending` reaches [`LAZY`].
fn axpy_lazy(v: &mut [u128], f: u64, row: &[u64], from: usize, pending: &mut usize, l: u64) {
    if *pending == LAZY {
        for x in v.iter_mut() {
            *x %= l as u128;
        }
        *pending = 0;
    }
    for (x, &y) in v[from..].iter_mut().zip(&row[from..]) {
        *x += f as u128 * y as u128;
    }
    *pending += 1;
}

/// Reduced echelon form of `m` modulo the prime `l`, built row by row against the current
/// basis; the result is the unique RREF of the row space.
pub fn rref_mod(m: &IntMatrix, l: u64) -> ModRref {
    let ncols = m.ncols;
    let lw = l as u128;
    // basis rows, each with pivot 1 and zero on the pivots of rows inserted before it
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut v = vec![0u128; ncols];
    for r in &m.rows {
        v.iter_mut().for_each(|x| *x = 0);
        for &(j, x) in r {
            v[j] = to_mod(x, l) as u128;
        }
        let mut pending = 0;
        for (pc, row) in &basis {
            let c = (v[*pc] % lw) as u64;
            if c != 0 {
                axpy_lazy(&mut v, l - c, row, *pc, &mut pending, l);
            }
        }
        let Some(pc) = v.iter().position(|&x| x % lw != 0) else { continue };
        let inv = powmod((v[pc] % lw) as u64, l - 2, l);
        let row: Vec<u64> = v.iter().map(|&x| mulmod((x % lw) as u64, inv, l)).collect();
        basis.push((pc, row));
        if basis.len() == ncols {
            break;
        }
    }
    basis.sort_by_key(|(pc, _)| *pc);
    let nb = basis.len();
    let mut wide: Vec<Vec<u128>> = basis.iter().map(|(_, r)| r.iter().map(|&x| x as u128).collect()).collect();
    let mut pend = vec![0usize; nb];
    for i in (0..nb).rev() {
        let pc = basis[i].0;
        let row: Vec<u64> = wide[i].iter().map(|&x| (x % lw) as u64).collect();
        for t in 0..i {
            let c = (wide[t][pc] % lw) as u64;
            if c != 0 {
                axpy_lazy(&mut wide[t], l - c, &row, pc, &mut pend[t], l);
            }
        }
        wide[i] = row.iter().map(|&x| x as u128).collect();
    }
    ModRref {
        modulus: l,
        pivots: basis.iter().map(|(p, _)| *p).collect(),
        rows: wide.into_iter().map(|r| r.into_iter().map(|x| (x % lw) as u64).collect()).collect(),
    }
}

pub fn rank_mod(m: &IntMatrix, l: u64) -> usize {
    rref_mod(m, l).pivots.len()
}

/// Rational reconstruction of `a mod n` with `|num|, den <= sqrt(n/2)`.
pub fn rational_reconstruct(a: &BigInt, n: &BigInt) -> Option<Rational> {
    let bound = (n / 2u32).sqrt();
    let (mut r0, mut r1) = (n.clone(), a.mod_floor(n));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let r = Rational::new(r1, t1);
    Some(r)
}

/// Exact kernel `{x : M x = 0}` with its certification status.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub ncols: usize,
    /// Rank of `M` modulo the chosen prime; always a lower bound for the rank over `ℚ`.
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Non-pivot columns, in the order of `basis`.
    pub free: Vec<usize>,
    /// One vector per free column (entry 1 there, 0 at the other free columns); empty when the
    /// lift did not verify.
    pub basis: Vec<Vec<(usize, Rational)>>,
    /// Every basis vector was checked against `M` over `ℤ`, so `rank` is the exact rank.
    pub exact: bool,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.ncols - self.rank
    }
}

fn crt_pair(a: &BigInt, n: &BigInt, b: u64, l: u64) -> BigInt {
    // x ≡ a (mod n), x ≡ b (mod l)
    let lb = BigInt::from(l);
    let n_mod_l = u64::try_from(n.mod_floor(&lb)).unwrap();
    let a_mod_l = u64::try_from(a.mod_floor(&lb)).unwrap();
    let inv = powmod(n_mod_l, l - 2, l);
    let diff = (b + l - a_mod_l) % l;
    let t = mulmod(diff, inv, l);
    a + n * BigInt::from(t)
}

/// Column-major copy of a matrix, used to evaluate `M v` for sparse `v`.
pub struct Columns {
    nrows: usize,
    cols: Vec<Vec<(usize, i128)>>,
    max_abs: BigInt,
}

impl Columns {
    pub fn new(m: &IntMatrix) -> Self {
        let t = m.transpose();
        let max_abs = m.rows.iter().flatten().map(|&(_, v)| BigInt::from(v).abs()).max().unwrap_or_default();
        Columns { nrows: m.nrows(), cols: t.rows, max_abs }
    }

    /// Whether `M v = 0` over `ℚ`.
    ///
    /// With `w` the integer multiple of `v`, every entry of `M w` is bounded by
    /// `max|M|·‖w‖₁`; the products are checked modulo enough primes to exceed twice that bound,
    /// which makes the test exact.
    pub fn annihilates(&self, v: &[(usize, Rational)]) -> bool {
        self.annihilates_rows(v, 0..self.nrows)
    }

    /// As [`Columns::annihilates`], restricted to a range of rows.
    pub fn annihilates_rows(&self, v: &[(usize, Rational)], rows: std::ops::Range<usize>) -> bool {
        let den = v.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom()));
        let w: Vec<(usize, BigInt)> =
            v.iter().map(|(j, x)| (*j, (x * Rational::from_integer(den.clone())).to_integer())).collect();
        let norm: BigInt = w.iter().map(|(_, x)| x.abs()).sum();
        let bound: BigInt = &self.max_abs * norm * 2u32;
        let mut covered = BigInt::one();
        for &l in MODULI.iter().rev() {
            let lw = l as u128;
            let mut acc = vec![0u128; rows.len()];
            let mut pending = 0;
            for (j, x) in &w {
                let xm = u64::try_from(x.mod_floor(&BigInt::from(l))).unwrap() as u128;
                if xm == 0 {
                    continue;
                }
                if pending == LAZY {
                    acc.iter_mut().for_each(|a| *a %= lw);
                    pending = 0;
                }
                for &(i, a) in &self.cols[*j] {
                    if rows.contains(&i) {
                        acc[i - rows.start] += xm * to_mod(a, l) as u128;
                    }
                }
                pending += 1;
            }
            if acc.iter().any(|a| a % lw != 0) {
                return false;
            }
            covered *= l;
            if covered > bound {
                return true;
            }
        }
        // norms beyond the modular budget: fall back to big-integer arithmetic
        let mut acc = vec![BigInt::zero(); rows.len()];
        for (j, x) in &w {
            for &(i, a) in &self.cols[*j] {
                if rows.contains(&i) {
                    acc[i - rows.start] += x * a;
                }
            }
        }
        acc.iter().all(Zero::is_zero)
    }
}

/// Lifts kernel vectors for the free columns `wanted` (all free columns when `None`) from
/// echelon forms modulo successive primes; returns the lucky echelon form's pivots and the
/// verified vectors, or `None` if no lift verified within `max_moduli` primes.
fn lift(
    m: &IntMatrix,
    cols: &Columns,
    wanted: Option<&[usize]>,
    max_moduli: usize,
) -> (Vec<usize>, Option<Vec<Vec<(usize, Rational)>>>) {
    let ncols = m.ncols;
    let mut best: Option<ModRref> = None;
    let mut acc: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut previous: Option<Vec<Rational>> = None;
    for &l in MODULI.iter().take(max_moduli.max(1)) {
        let cur = rref_mod(m, l);
        let restart = match &best {
            None => true,
            Some(b) => {
                cur.pivots.len() > b.pivots.len() || (cur.pivots.len() == b.pivots.len() && cur.pivots < b.pivots)
            }
        };
        if restart {
            acc.clear();
            modulus = BigInt::one();
            previous = None;
        } else if best.as_ref().unwrap().pivots != cur.pivots {
            continue;
        }
        let pivots = cur.pivots.clone();
        let free: Vec<usize> = match wanted {
            Some(w) => w.to_vec(),
            None => (0..ncols).filter(|c| pivots.binary_search(c).is_err()).collect(),
        };
        if free.iter().any(|c| pivots.binary_search(c).is_ok()) {
            // a requested column is independent modulo this prime
            return (pivots, None);
        }
        let flat: Vec<u64> = cur.rows.iter().flat_map(|row| free.iter().map(move |&f| row[f])).collect();
        if acc.is_empty() {
            acc = flat.iter().map(|&x| BigInt::from(x)).collect();
            modulus = BigInt::from(l);
        } else {
            acc = acc.iter().zip(&flat).map(|(x, &y)| crt_pair(x, &modulus, y, l)).collect();
            modulus *= l;
        }
        best = Some(cur);
        let recon: Option<Vec<Rational>> = acc.iter().map(|x| rational_reconstruct(x, &modulus)).collect();
        let Some(recon) = recon else { continue };
        let stable = previous.as_ref() == Some(&recon) || recon.iter().all(Zero::is_zero);
        previous = Some(recon.clone());
        if !stable {
            continue;
        }
        let nf = free.len();
        let vectors: Vec<Vec<(usize, Rational)>> = (0..nf)
            .map(|fi| {
                let mut v = vec![(free[fi], Rational::one())];
                for (ri, &pc) in pivots.iter().enumerate() {
                    let x = &recon[ri * nf + fi];
                    if !x.is_zero() {
                        v.push((pc, -x.clone()));
                    }
                }
                v.sort_by_key(|(j, _)| *j);
                v
            })
            .collect();
        if vectors.iter().all(|v| cols.annihilates(v)) {
            return (pivots, Some(vectors));
        }
    }
    (best.map(|b| b.pivots).unwrap_or_default(), None)
}

/// Right kernel of `m`, lifted from modular echelon forms and verified exactly.
///
/// `max_moduli` caps how many primes are combined before giving up on certification.
pub fn certified_kernel(m: &IntMatrix, max_moduli: usize) -> Kernel {
    let cols = Columns::new(m);
    let (pivots, basis) = lift(m, &cols, None, max_moduli);
    let free: Vec<usize> = (0..m.ncols).filter(|c| pivots.binary_search(c).is_err()).collect();
    Kernel { ncols: m.ncols, rank: pivots.len(), pivots, free, exact: basis.is_some(), basis: basis.unwrap_or_default() }
}

/// Outcome of asking whether column `target` is a combination of the other columns.
#[derive(Clone, Debug)]
pub enum ColumnDependence {
    /// Verified kernel vector with entry 1 at `target`.
    Dependent(Vec<(usize, Rational)>),
    /// Column is a pivot of the echelon form modulo a prime.
    Independent,
    Unknown,
}

/// Exact dependence of the last column of `m` on the earlier ones.
pub fn last_column_dependence(m: &IntMatrix, max_moduli: usize) -> ColumnDependence {
    let target = m.ncols - 1;
    let cols = Columns::new(m);
    let (pivots, v) = lift(m, &cols, Some(&[target]), max_moduli);
    match v {
        Some(mut v) => ColumnDependence::Dependent(v.remove(0)),
        None if pivots.binary_search(&target).is_ok() => ColumnDependence::Independent,
        None => ColumnDependence::Unknown,
    }
}

/// A vector `y` with `M y = 0` and `t · y ≠ 0`, verified exactly; exists iff `t` is not in the
/// row space of `M`.
pub fn separating_functional(m: &IntMatrix, t: &[(usize, i128)], max_moduli: usize) -> Option<Vec<(usize, Rational)>> {
    let cols = Columns::new(m);
    let l = MODULI[0];
    let r = rref_mod(m, l);
    let tm: Vec<u64> = {
        let mut d = vec![0u64; m.ncols];
        for &(j, x) in t {
            d[j] = to_mod(x, l);
        }
        d
    };
    // kernel vector for free column f: e_f − Σ_i R[i][f] e_{pivot_i}
    let free = (0..m.ncols).filter(|c| r.pivots.binary_search(c).is_err()).find(|&f| {
        let mut dot = tm[f] as u128;
        for (i, &pc) in r.pivots.iter().enumerate() {
            dot += (l - r.rows[i][f]) as u128 * tm[pc] as u128 % l as u128;
        }
        dot % l as u128 != 0
    })?;
    let (_, v) = lift(m, &cols, Some(&[free]), max_moduli);
    let y = v?.remove(0);
    let dot: Rational = y
        .iter()
        .filter_map(|(j, x)| t.iter().find(|(tj, _)| tj == j).map(|(_, a)| x * Rational::from_integer(BigInt::from(*a))))
        .sum();
    if cols.annihilates(&y) && !dot.is_zero() {
        Some(y)
    } else {
        None
    }
}

/// Default number of moduli tried by [`certified_kernel`].
pub const DEFAULT_MODULI: usize = 12;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, rank: usize) -> Vec<Vec<i128>> {
        let a: Vec<Vec<i128>> = (0..r).map(|_| (0..rank).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let b: Vec<Vec<i128>> = (0..rank).map(|_| (0..c).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        (0..r).map(|i| (0..c).map(|j| (0..rank).map(|t| a[i][t] * b[t][j]).sum()).collect()).collect()
    }

    fn to_rat(m: &[Vec<i128>]) -> Vec<Vec<Rational>> {
        m.iter().map(|r| r.iter().map(|&x| rat(x as i64)).collect()).collect()
    }

    #[test]
    fn identity_rank() {
        let id: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| rat((i == j) as i64)).collect()).collect();
        assert_eq!(rank(&id), 3);
        assert!(nullspace(&id).is_empty());
    }

    #[test]
    fn bareiss_matches_naive_on_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for t in 0..20 {
            let m = random_matrix(&mut rng, 20, 30, 3 + t % 15);
            let q = to_rat(&m);
            assert_eq!(rank(&q), rank_naive(&q));
            let ns = nullspace(&q);
            assert_eq!(ns.len(), 30 - rank(&q));
            for v in &ns {
                for row in &q {
                    let s: Rational = row.iter().zip(v).map(|(a, b)| a * b).sum();
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn row_scaling_keeps_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = to_rat(&random_matrix(&mut rng, 8, 10, 5));
        let scaled: Vec<Vec<Rational>> =
            m.iter().enumerate().map(|(i, r)| r.iter().map(|x| x * Rational::new((i as i64 + 2).into(), 3.into())).collect()).collect();
        assert_eq!(rank(&m), rank(&scaled));
    }

    #[test]
    fn certified_kernel_matches_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for t in 0..10 {
            let m = random_matrix(&mut rng, 15, 12, 2 + t);
            let k = certified_kernel(&IntMatrix::from_dense(&m), DEFAULT_MODULI);
            assert!(k.exact);
            let q = to_rat(&m);
            assert_eq!(k.rank, rank(&q));
            let ns = nullspace(&q);
            for (v, w) in k.basis.iter().zip(&ns) {
                let mut dense = vec![Rational::zero(); 12];
                for (j, x) in v {
                    dense[*j] = x.clone();
                }
                assert_eq!(&dense, w);
            }
        }
    }

    #[test]
    fn reconstruction_roundtrip() {
        let n = BigInt::from(MODULI[0]);
        let x = Rational::new((-17).into(), 12.into());
        let a = (x.numer() * BigInt::from(powmod(12, MODULI[0] - 2, MODULI[0]))).mod_floor(&n);
        assert_eq!(rational_reconstruct(&a, &n), Some(x));
    }

    #[test]
    fn dependence_and_separation() {
        // columns: a, b, a + 2b / 3 scaled to integers, and an independent one
        let m = IntMatrix::from_dense(&[vec![1, 0, 3, 0], vec![0, 1, 2, 0], vec![0, 0, 0, 1]]);
        let dep = IntMatrix::from_dense(&[vec![3, 0, 3], vec![0, 3, 2], vec![0, 0, 0]]);
        match last_column_dependence(&dep, DEFAULT_MODULI) {
            ColumnDependence::Dependent(v) => {
                assert_eq!(v, vec![(0, rat(-1)), (1, Rational::new((-2).into(), 3.into())), (2, rat(1))]);
            }
            other => panic!("{other:?}"),
        }
        let ind = IntMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(matches!(last_column_dependence(&ind, DEFAULT_MODULI), ColumnDependence::Independent));
        // rows span {e0 + 3e2, e1 + 2e2, e3}; t = e2 is outside
        let y = separating_functional(&m, &[(2, 1)], DEFAULT_MODULI).unwrap();
        assert!(Columns::new(&m).annihilates(&y));
        assert!(separating_functional(&m, &[(0, 1), (2, 3)], DEFAULT_MODULI).is_none());
    }
}
