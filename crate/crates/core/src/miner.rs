//! Spanning families of finite q-sums, their exact vectorization over a prime set, and the
//! rank, relation and membership computations built on them.
//!
//! A generator `𝒑^h (1−q)^j [𝒑]^b ζ(k; s)` is represented at each prime `p` by the `n(p−1)`
//! integer coefficients of the canonical residue of `p^h (1−q)^j [p]^b H_{p−1}(k; s; q)` modulo
//! `[p]^n`; concatenating the blocks over `S` gives its vector. Relations found this way hold on
//! every prime of `S`, which is all that is claimed for them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::rational::binomial;
use crate::exact::zring::{ZElem, ZRing};
use crate::exact::{fmt_rational, parse_rational, CycModElement, Poly, Rational};
use crate::hsum::{hsum_mod, Variant};
use crate::index::{bounded_exponents, compositions, ExpVector, Index};
use crate::linalg::{
    certified_kernel, last_column_dependence, separating_functional, ColumnDependence, Columns, IntMatrix, Kernel,
    DEFAULT_MODULI,
};
use crate::primes::{next_prime, primes_in};

/// Bumped whenever the vectorization or the cache layout changes.
pub const KERNEL_VERSION: u32 = 1;

/// Cap on primes appended while waiting for the ranks to settle.
pub const MAX_EXTENSIONS: usize = 12;

/// Default upper end of the prime set.
pub const DEFAULT_PRIME_BOUND: u64 = 97;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpanFamily {
    O,
    Q,
    O2,
}

impl SpanFamily {
    /// Power of `[p]` the family is reduced modulo.
    pub fn n(self) -> u32 {
        match self {
            SpanFamily::O2 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for SpanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpanFamily::O => "O",
            SpanFamily::Q => "Q",
            SpanFamily::O2 => "O2",
        })
    }
}

impl FromStr for SpanFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "O" | "o" => Ok(SpanFamily::O),
            "Q" | "q" => Ok(SpanFamily::Q),
            "O2" | "o2" => Ok(SpanFamily::O2),
            _ => Err(Error::Parse(format!("unknown family {s:?} (expected O, Q or O2)"))),
        }
    }
}

/// `𝒑^h (1−q)^j [𝒑]^{pbracket} ζ(index; s)`; `s = None` is the plain sum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorDescriptor {
    pub h: u32,
    pub j: u32,
    pub index: Index,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<ExpVector>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub pbracket: bool,
}

impl GeneratorDescriptor {
    pub fn zeta(index: Index) -> Self {
        GeneratorDescriptor { h: 0, j: 0, index, s: None, pbracket: false }
    }

    pub fn zeta_s(index: Index, s: ExpVector) -> Self {
        GeneratorDescriptor { h: 0, j: 0, index, s: Some(s), pbracket: false }
    }

    pub fn power(h: u32, j: u32) -> Self {
        GeneratorDescriptor { h, j, index: Index::empty(), s: None, pbracket: false }
    }

    pub fn times(mut self, h: u32, j: u32) -> Self {
        self.h += h;
        self.j += j;
        self
    }

    /// Letters `(k_a, e_a)` of the underlying sum, `e_a` the exponent of `q^{m_a}`.
    fn letters(&self) -> Vec<(u32, u32)> {
        let parts = self.index.parts();
        match &self.s {
            Some(s) => parts.iter().zip(s.entries()).map(|(&k, &e)| (k, e)).collect(),
            None => parts.iter().map(|&k| (k, k - 1)).collect(),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(s) = &self.s {
            if s.len() != self.index.depth() {
                return Err(Error::LengthMismatch(self.index.depth(), s.len()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GeneratorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        if self.pbracket {
            out.push_str("[p]");
        }
        match self.h {
            0 => {}
            1 => out.push('p'),
            h => out.push_str(&format!("p^{h}")),
        }
        match self.j {
            0 => {}
            1 => out.push_str("(1-q)"),
            j => out.push_str(&format!("(1-q)^{j}")),
        }
        if !self.index.is_empty() {
            let ks: Vec<String> = self.index.parts().iter().map(u32::to_string).collect();
            match &self.s {
                None => out.push_str(&format!("zeta({})", ks.join(","))),
                Some(s) => out.push_str(&format!("zeta({};{})", ks.join(","), s.literal())),
            }
        }
        if out.is_empty() {
            out.push('1');
        }
        f.write_str(&out)
    }
}

fn indices_of_weight(w: u32) -> Vec<Index> {
    if w == 0 {
        vec![Index::empty()]
    } else {
        compositions(w)
    }
}

fn block(family: SpanFamily, jmax: u32, pbracket: bool) -> Vec<GeneratorDescriptor> {
    let mut out = Vec::new();
    for j in 0..=jmax {
        for h in 0..=j {
            for index in indices_of_weight(jmax - j) {
                let base = GeneratorDescriptor { h, j, index: index.clone(), s: None, pbracket };
                if family == SpanFamily::Q && !index.is_empty() {
                    for s in bounded_exponents(&index) {
                        out.push(GeneratorDescriptor { s: Some(s), ..base.clone() });
                    }
                } else {
                    out.push(base);
                }
            }
        }
    }
    out
}

/// Spanning set of the weight-`k` space, ordered by `(j, h, index, s)` ascending; for `O2`
/// the `[𝒑]`-multiplied set follows the plain one.
pub fn gens(family: SpanFamily, k: u32) -> Vec<GeneratorDescriptor> {
    let mut out = block(family, k, false);
    if family == SpanFamily::O2 {
        out.extend(block(family, k + 1, true));
    }
    out
}

/// Generators of `(1−q) Z_{k−1} + 𝒑(1−q) Z_{k−1}`.
pub fn v_gens(family: SpanFamily, k: u32) -> Vec<GeneratorDescriptor> {
    if k == 0 {
        return Vec::new();
    }
    let prev = gens(family, k - 1);
    let mut out: Vec<GeneratorDescriptor> = prev.iter().map(|g| g.clone().times(0, 1)).collect();
    out.extend(prev.iter().map(|g| g.clone().times(1, 1)));
    let mut seen = HashSet::new();
    out.retain(|g| seen.insert(g.clone()));
    out
}

/// Primes `p` with `k + 1 < p <= bound`.
pub fn default_primes(k: u32, bound: u64) -> Vec<u64> {
    primes_in(k as u64 + 1, bound)
}

/// `ℤ[q]/((q^p − 1)^n)`, which maps onto `ℤ[q]/([p]^n)` and has a sparse reduction rule.
struct CoverRing {
    dim: usize,
    /// `q^{np} = Σ coeff · q^{offset}`
    fold: Vec<(usize, i128)>,
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::Overflow("vectorization"))
}

impl CoverRing {
    fn new(p: u64, n: u32) -> Self {
        // (q^p − 1)^n = Σ_i C(n,i) (−1)^{n−i} q^{pi}
        let fold = (0..n)
            .map(|i| {
                let c = i128::try_from(binomial(n as u64, i as u64)).unwrap();
                let sign = if (n - i) % 2 == 0 { -1 } else { 1 };
                ((p as usize) * i as usize, sign * c)
            })
            .collect();
        CoverRing { dim: (p as usize) * n as usize, fold }
    }

    fn reduce(&self, mut f: Vec<i128>) -> Result<Vec<i128>> {
        let d = self.dim;
        for i in (d..f.len()).rev() {
            let c = f[i];
            if c == 0 {
                continue;
            }
            for &(off, a) in &self.fold {
                let t = i - d + off;
                f[t] = ck(f[t].checked_add(ck(a.checked_mul(c))?))?;
            }
        }
        f.truncate(d);
        f.resize(d, 0);
        Ok(f)
    }

    fn mul(&self, a: &[i128], b: &[i128]) -> Result<Vec<i128>> {
        let mut prod = vec![0i128; 2 * self.dim - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (t, &y) in prod[i..].iter_mut().zip(b) {
                if y != 0 {
                    *t = ck(t.checked_add(ck(x.checked_mul(y))?))?;
                }
            }
        }
        self.reduce(prod)
    }

    fn embed(&self, a: &[i128]) -> Result<Vec<i128>> {
        self.reduce(a.to_vec())
    }
}

/// `H_{p−1}` of every word in `words` (and their suffixes), as canonical residues mod `[p]^n`.
fn word_sums(ring: &ZRing, words: &[Vec<(u32, u32)>]) -> Result<HashMap<Vec<(u32, u32)>, ZElem>> {
    let p = ring.p;
    let cover = CoverRing::new(p, ring.n);
    let mut all: HashSet<Vec<(u32, u32)>> = HashSet::new();
    for w in words {
        for a in 0..=w.len() {
            all.insert(w[a..].to_vec());
        }
    }
    let mut list: Vec<Vec<(u32, u32)>> = all.into_iter().collect();
    list.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    let pos: HashMap<Vec<(u32, u32)>, usize> = list.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let tails: Vec<usize> = list.iter().map(|w| if w.is_empty() { usize::MAX } else { pos[&w[1..]] }).collect();
    let letters: Vec<(u32, u32)> = {
        let mut l: Vec<(u32, u32)> = list.iter().filter_map(|w| w.first().copied()).collect();
        l.sort_unstable();
        l.dedup();
        l
    };
    let mut acc: Vec<Vec<i128>> = vec![vec![0; cover.dim]; list.len()];
    let empty = pos[&Vec::new()];
    acc[empty][0] = 1;
    let mut nonzero: Vec<bool> = vec![false; list.len()];
    nonzero[empty] = true;
    for m in 1..p {
        let inv = cover.embed(&ring.inv_qint(m)?)?;
        let mut inv_pows = vec![cover.embed(&ring.one())?];
        let mut factors: HashMap<(u32, u32), Vec<i128>> = HashMap::new();
        for &(k, e) in &letters {
            while inv_pows.len() <= k as usize {
                let next = cover.embed(&ring.reduce(&cover.mul(inv_pows.last().unwrap(), &inv)?)?)?;
                inv_pows.push(next);
            }
            let mut mono = vec![0i128; e as usize * m as usize + 1];
            mono[e as usize * m as usize] = 1;
            let mono = cover.reduce(mono)?;
            let f = ring.reduce(&cover.mul(&mono, &inv_pows[k as usize])?)?;
            factors.insert((k, e), cover.embed(&f)?);
        }
        for i in 0..list.len() {
            let t = tails[i];
            if t == usize::MAX || !nonzero[t] {
                continue;
            }
            let inc = cover.mul(&factors[&list[i][0]], &acc[t])?;
            for (x, y) in acc[i].iter_mut().zip(&inc) {
                *x = ck(x.checked_add(*y))?;
            }
            // the canonical residue stays small where the cover-ring representative would not
            acc[i] = cover.embed(&ring.reduce(&acc[i])?)?;
            nonzero[i] = true;
        }
    }
    list.into_iter().zip(acc).map(|(w, a)| Ok((w, ring.reduce(&a)?))).collect()
}

/// Canonical residues of the descriptors at one prime.
pub fn vectorize_prime(p: u64, n: u32, descs: &[GeneratorDescriptor]) -> Result<Vec<ZElem>> {
    for d in descs {
        d.validate()?;
    }
    let ring = ZRing::new(p, n)?;
    let words: Vec<Vec<(u32, u32)>> = descs.iter().map(GeneratorDescriptor::letters).collect();
    let sums = word_sums(&ring, &words)?;
    let one_minus_q = ring.from_poly(&Poly::one_minus_q())?;
    let bracket = ring.from_poly(&crate::exact::q_int(p)?)?;
    descs
        .iter()
        .zip(&words)
        .map(|(d, w)| {
            let mut v = sums[w].clone();
            for _ in 0..d.j {
                v = ring.mul(&v, &one_minus_q)?;
            }
            if d.pbracket {
                v = ring.mul(&v, &bracket)?;
            }
            for _ in 0..d.h {
                v = ring.scale(&v, p as i128)?;
            }
            Ok(v)
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    version: u32,
    p: u64,
    n: u32,
    label: String,
    descriptors: Vec<GeneratorDescriptor>,
    vectors: Vec<Vec<String>>,
}

/// Vectorizes descriptor lists prime by prime, optionally through an on-disk cache.
///
/// A cache entry is one JSON file per `(p, n, descriptor list)`, named by the SHA-256 of the
/// kernel version and that key; files are written to a temporary name and renamed into place,
/// so concurrent readers never see a partial file.
#[derive(Clone, Debug, Default)]
pub struct Vectorizer {
    pub cache_dir: Option<PathBuf>,
}

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "QMZV_CACHE_DIR";

impl Vectorizer {
    pub fn new(cache_dir: Option<PathBuf>) -> Self {
        Vectorizer { cache_dir }
    }

    /// Uses `$QMZV_CACHE_DIR` when set, no cache otherwise.
    pub fn from_env() -> Self {
        Vectorizer { cache_dir: std::env::var_os(CACHE_ENV).map(PathBuf::from) }
    }

    fn key(p: u64, n: u32, descs: &[GeneratorDescriptor]) -> String {
        let mut h = Sha256::new();
        h.update(format!("qmzv-vectors|v{KERNEL_VERSION}|{p}|{n}|").as_bytes());
        h.update(serde_json::to_vec(descs).unwrap());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn load(path: &Path, p: u64, n: u32, descs: &[GeneratorDescriptor]) -> Option<Vec<ZElem>> {
        let text = fs::read_to_string(path).ok()?;
        let f: CacheFile = serde_json::from_str(&text).ok()?;
        if f.version != KERNEL_VERSION || f.p != p || f.n != n || f.descriptors != descs {
            return None;
        }
        f.vectors.iter().map(|v| v.iter().map(|x| x.parse().ok()).collect()).collect()
    }

    fn store(dir: &Path, path: &Path, file: &CacheFile) -> Result<()> {
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_vec(file)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn block(&self, p: u64, n: u32, descs: &[GeneratorDescriptor], label: &str) -> Result<Vec<ZElem>> {
        let Some(dir) = &self.cache_dir else { return vectorize_prime(p, n, descs) };
        let path = dir.join(format!("{}.json", Self::key(p, n, descs)));
        if let Some(v) = Self::load(&path, p, n, descs) {
            return Ok(v);
        }
        let v = vectorize_prime(p, n, descs)?;
        let file = CacheFile {
            version: KERNEL_VERSION,
            p,
            n,
            label: label.to_string(),
            descriptors: descs.to_vec(),
            vectors: v.iter().map(|r| r.iter().map(i128::to_string).collect()).collect(),
        };
        // a failed write only costs a recomputation later
        let _ = Self::store(dir, &path, &file);
        Ok(v)
    }
}

/// Vectors of a descriptor list over a prime set; primes whose computation fails are excluded.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    pub n: u32,
    pub descriptors: Vec<GeneratorDescriptor>,
    pub primes: Vec<u64>,
    pub excluded: Vec<(u64, String)>,
    /// Per prime, one residue vector per descriptor.
    pub blocks: Vec<Vec<ZElem>>,
}

impl GeneratorMatrix {
    pub fn build(vz: &Vectorizer, descs: &[GeneratorDescriptor], primes: &[u64], n: u32, label: &str) -> Result<Self> {
        let results: Vec<(u64, Result<Vec<ZElem>>)> =
            primes.par_iter().map(|&p| (p, vz.block(p, n, descs, label))).collect();
        let mut out = GeneratorMatrix {
            n,
            descriptors: descs.to_vec(),
            primes: Vec::new(),
            excluded: Vec::new(),
            blocks: Vec::new(),
        };
        for (p, r) in results {
            match r {
                Ok(b) => {
                    out.primes.push(p);
                    out.blocks.push(b);
                }
                Err(e) => out.excluded.push((p, e.to_string())),
            }
        }
        if out.primes.is_empty() {
            return Err(Error::EmptyPrimeSet);
        }
        Ok(out)
    }

    pub fn extend(&mut self, vz: &Vectorizer, p: u64, label: &str) -> Result<bool> {
        match vz.block(p, self.n, &self.descriptors, label) {
            Ok(b) => {
                self.primes.push(p);
                self.blocks.push(b);
                Ok(true)
            }
            Err(e) => {
                self.excluded.push((p, e.to_string()));
                Ok(false)
            }
        }
    }

    /// Coordinates as rows, the selected descriptors as columns, for the given prime blocks.
    fn transposed(&self, cols: &[usize], blocks: std::ops::Range<usize>) -> IntMatrix {
        let mut m = IntMatrix::new(cols.len());
        for b in &self.blocks[blocks] {
            let dim = b.first().map_or(0, Vec::len);
            for c in 0..dim {
                m.push_sparse(cols.iter().enumerate().map(|(ci, &g)| (ci, b[g][c])).collect());
            }
        }
        m
    }

    /// Descriptors as rows.
    fn rows(&self, cols: &[usize]) -> IntMatrix {
        let total: usize = self.blocks.iter().map(|b| b.first().map_or(0, Vec::len)).sum();
        let mut m = IntMatrix::new(total);
        for &g in cols {
            let mut r = Vec::new();
            let mut off = 0;
            for b in &self.blocks {
                for (c, &x) in b[g].iter().enumerate() {
                    r.push((off + c, x));
                }
                off += b[g].len();
            }
            m.push_sparse(r);
        }
        m
    }

    fn kernel(&self, cols: &[usize]) -> Kernel {
        certified_kernel(&self.transposed(cols, 0..self.blocks.len()), DEFAULT_MODULI)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimReport {
    pub family: SpanFamily,
    pub weight: u32,
    pub n: u32,
    /// The requested prime set.
    pub primes: Vec<u64>,
    /// Primes appended by the stabilization loop; the ranks are over `primes ∪ extension`.
    pub extension: Vec<u64>,
    pub excluded: Vec<(u64, String)>,
    pub generators: usize,
    pub rank_full: usize,
    pub rank_v: usize,
    pub dim_tilde: usize,
    /// The last two one-prime extensions left both ranks unchanged.
    pub stabilized: bool,
    /// Both ranks are certified (verified kernels), not just modular lower bounds.
    pub exact: bool,
}

fn kernel_survives(k: &Kernel, m: &IntMatrix) -> bool {
    let cols = Columns::new(m);
    k.exact && k.basis.iter().all(|v| cols.annihilates(v))
}

/// Dimension of `Z_k / ((1−q)Z_{k−1} + 𝒑(1−q)Z_{k−1})` over the prime set `primes` (default
/// rule when `None`), grown until two consecutive one-prime extensions change nothing.
pub fn dim_tilde(family: SpanFamily, k: u32, primes: Option<&[u64]>, vz: &Vectorizer) -> Result<DimReport> {
    if k == 0 {
        return Err(Error::OutOfRange("dim_tilde needs k >= 1".into()));
    }
    let primes = match primes {
        Some(p) => p.to_vec(),
        None => default_primes(k, DEFAULT_PRIME_BOUND),
    };
    let n = family.n();
    let mut all = gens(family, k);
    let v = v_gens(family, k);
    let have: HashSet<GeneratorDescriptor> = all.iter().cloned().collect();
    all.extend(v.iter().filter(|g| !have.contains(*g)).cloned());
    let pos: HashMap<&GeneratorDescriptor, usize> = all.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let full_cols: Vec<usize> = (0..all.len()).collect();
    let v_cols: Vec<usize> = v.iter().map(|g| pos[g]).collect();
    let label = format!("{family} weight {k}");
    let mut gm = GeneratorMatrix::build(vz, &all, &primes, n, &label)?;
    let base = gm.primes.len();
    let mut kf = gm.kernel(&full_cols);
    let mut kv = gm.kernel(&v_cols);

    // grow S one prime at a time until two consecutive extensions leave both kernels valid
    let mut unchanged = 0;
    let mut last = *primes.iter().max().unwrap_or(&(k as u64 + 1));
    for _ in 0..MAX_EXTENSIONS {
        if unchanged == 2 {
            break;
        }
        last = next_prime(last);
        if !gm.extend(vz, last, &label)? {
            continue;
        }
        let b = gm.blocks.len() - 1;
        let same = kernel_survives(&kf, &gm.transposed(&full_cols, b..b + 1))
            && kernel_survives(&kv, &gm.transposed(&v_cols, b..b + 1));
        if same {
            unchanged += 1;
        } else {
            kf = gm.kernel(&full_cols);
            kv = gm.kernel(&v_cols);
            unchanged = 0;
        }
    }
    Ok(DimReport {
        family,
        weight: k,
        n,
        primes: gm.primes[..base].to_vec(),
        extension: gm.primes[base..].to_vec(),
        excluded: gm.excluded,
        generators: all.len(),
        rank_full: kf.rank,
        rank_v: kv.rank,
        dim_tilde: kf.rank - kv.rank,
        stabilized: unchanged >= 2,
        exact: kf.exact && kv.exact,
    })
}

/// `Σ c_g g = 0` on every prime of the set it was found over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCandidate {
    pub coeffs: Vec<(GeneratorDescriptor, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    basis: Vec<GeneratorDescriptor>,
    coeffs: Vec<String>,
}

impl Serialize for RelationCandidate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RelationJson {
            basis: self.coeffs.iter().map(|(g, _)| g.clone()).collect(),
            coeffs: self.coeffs.iter().map(|(_, c)| fmt_rational(c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RelationCandidate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RelationJson::deserialize(d)?;
        if j.basis.len() != j.coeffs.len() {
            return Err(serde::de::Error::custom("basis and coeffs differ in length"));
        }
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| parse_rational(c).map_err(serde::de::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(RelationCandidate { coeffs: j.basis.into_iter().zip(coeffs).collect() })
    }
}

impl RelationCandidate {
    /// Scales so that the first nonzero coefficient is 1.
    pub fn normalized(&self) -> RelationCandidate {
        let lead = self.coeffs.iter().find(|(_, c)| !c.is_zero()).map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
        RelationCandidate { coeffs: self.coeffs.iter().map(|(g, c)| (g.clone(), c / &lead)).filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Substitutes the relation at `p` through the independent `hsum_mod` path.
    pub fn residual_at(&self, p: u64, n: u32) -> Result<CycModElement> {
        let mut acc = CycModElement::zero(p, n)?;
        let one = CycModElement::one(p, n)?;
        let omq = one.lift(&Poly::one_minus_q())?;
        let bracket = one.lift(&crate::exact::q_int(p)?)?;
        for (g, c) in &self.coeffs {
            let mut v = match &g.s {
                None => hsum_mod(Variant::Plain, p, n, &g.index, None)?,
                Some(s) => hsum_mod(Variant::Generalized, p, n, &g.index, Some(s))?,
            };
            v = &v * &omq.pow(g.j);
            if g.pbracket {
                v = &v * &bracket;
            }
            let scale = c * Rational::from_integer(BigInt::from(p).pow(g.h));
            acc = &acc + &v.scale(&scale)?;
        }
        Ok(acc)
    }

    pub fn holds_at(&self, primes: &[u64], n: u32) -> Result<bool> {
        for &p in primes {
            if !self.residual_at(p, n)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for RelationCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|(g, c)| format!("({}) {g}", fmt_rational(c))).collect();
        write!(f, "{} = 0", parts.join(" + "))
    }
}

/// Exact relations among `descs` over `primes`: one per generator that depends on earlier ones,
/// each re-checked by direct substitution at every prime.
pub fn find_relations_in(
    descs: &[GeneratorDescriptor],
    primes: &[u64],
    n: u32,
    vz: &Vectorizer,
) -> Result<Vec<RelationCandidate>> {
    let gm = GeneratorMatrix::build(vz, descs, primes, n, "relations")?;
    let cols: Vec<usize> = (0..descs.len()).collect();
    let ker = gm.kernel(&cols);
    if !ker.exact {
        return Err(Error::BoundExceeded("kernel could not be certified".into()));
    }
    let out: Vec<RelationCandidate> = ker
        .basis
        .iter()
        .map(|v| RelationCandidate { coeffs: v.iter().map(|(j, c)| (descs[*j].clone(), c.clone())).collect() })
        .collect();
    for r in &out {
        if !r.holds_at(&gm.primes, n)? {
            return Err(Error::BoundExceeded(format!("relation failed re-substitution: {r}")));
        }
    }
    Ok(out)
}

pub fn find_relations(family: SpanFamily, k: u32, primes: Option<&[u64]>, vz: &Vectorizer) -> Result<Vec<RelationCandidate>> {
    let primes = primes.map(<[u64]>::to_vec).unwrap_or_else(|| default_primes(k, DEFAULT_PRIME_BOUND));
    find_relations_in(&gens(family, k), &primes, family.n(), vz)
}

/// Whether `relation` lies in the span of `relations` (all over the same descriptors).
pub fn relation_in_span(relation: &RelationCandidate, relations: &[RelationCandidate]) -> bool {
    let mut idx: BTreeMap<GeneratorDescriptor, usize> = BTreeMap::new();
    for r in relations.iter().chain(std::iter::once(relation)) {
        for (g, _) in &r.coeffs {
            let l = idx.len();
            idx.entry(g.clone()).or_insert(l);
        }
    }
    let dense = |r: &RelationCandidate| {
        let mut v = vec![Rational::zero(); idx.len()];
        for (g, c) in &r.coeffs {
            v[idx[g]] = c.clone();
        }
        v
    };
    let mut rows: Vec<Vec<Rational>> = relations.iter().map(dense).collect();
    let r0 = crate::linalg::rank(&rows);
    rows.push(dense(relation));
    crate::linalg::rank(&rows) == r0
}

/// A span given by its generators, or `(1−q)Z_w + 𝒑(1−q)Z_w` for a family.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpanSpec {
    Shifted { family: SpanFamily, shifted_weight: u32 },
    Explicit { basis: Vec<GeneratorDescriptor>, n: Option<u32> },
}

impl SpanSpec {
    pub fn descriptors(&self) -> Vec<GeneratorDescriptor> {
        match self {
            SpanSpec::Shifted { family, shifted_weight } => v_gens(*family, shifted_weight + 1),
            SpanSpec::Explicit { basis, .. } => basis.clone(),
        }
    }

    pub fn n(&self) -> u32 {
        match self {
            SpanSpec::Shifted { family, .. } => family.n(),
            SpanSpec::Explicit { n, .. } => n.unwrap_or(1),
        }
    }
}

/// Linear combination of generators, JSON `{"basis": [...], "coeffs": ["a/b", ...]}`.
pub type Target = RelationCandidate;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeparatingEntry {
    pub p: u64,
    pub coeff_index: usize,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// Over this prime set only.
    pub primes: Vec<u64>,
    pub excluded: Vec<(u64, String)>,
    /// `target = Σ c_g g` when a member.
    pub certificate: Option<RelationCandidate>,
    /// A functional vanishing on the span but not on the target, when not a member.
    pub separating: Option<Vec<SeparatingEntry>>,
}

/// Decides whether `target` lies in the span over `primes`, with a certificate either way.
pub fn membership(target: &Target, span: &[GeneratorDescriptor], primes: &[u64], n: u32, vz: &Vectorizer) -> Result<Membership> {
    let mut descs: Vec<GeneratorDescriptor> = span.to_vec();
    let tpos: Vec<usize> = target
        .coeffs
        .iter()
        .map(|(g, _)| match descs.iter().position(|d| d == g) {
            Some(i) => i,
            None => {
                descs.push(g.clone());
                descs.len() - 1
            }
        })
        .collect();
    let gm = GeneratorMatrix::build(vz, &descs, primes, n, "membership")?;
    let den = target.coeffs.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let scaled: Vec<i128> = target
        .coeffs
        .iter()
        .map(|(_, c)| i128::try_from((c * Rational::from_integer(den.clone())).to_integer()).map_err(|_| Error::Overflow("target coefficient")))
        .collect::<Result<_>>()?;
    // target vector, block by block
    let mut tvec: Vec<Vec<i128>> = Vec::new();
    for b in &gm.blocks {
        let dim = b.first().map_or(0, Vec::len);
        let mut v = vec![0i128; dim];
        for (&ti, &c) in tpos.iter().zip(&scaled) {
            for (x, &y) in v.iter_mut().zip(&b[ti]) {
                *x = ck(x.checked_add(ck(c.checked_mul(y))?))?;
            }
        }
        tvec.push(v);
    }
    let span_cols: Vec<usize> = (0..span.len()).collect();
    let mut m = gm.transposed(&span_cols, 0..gm.blocks.len());
    m.ncols += 1;
    let mut r = 0;
    for t in &tvec {
        for &x in t {
            if x != 0 {
                m.rows[r].push((span.len(), x));
            }
            r += 1;
        }
    }
    let result = Membership { member: false, primes: gm.primes.clone(), excluded: gm.excluded.clone(), certificate: None, separating: None };
    match last_column_dependence(&m, DEFAULT_MODULI) {
        ColumnDependence::Dependent(v) => {
            // v = e_t + Σ v_g e_g, so target·den = −Σ v_g g
            let d = Rational::from_integer(den);
            let coeffs = v
                .iter()
                .filter(|(j, _)| *j < span.len())
                .map(|(j, c)| (span[*j].clone(), -c / &d))
                .collect();
            Ok(Membership { member: true, certificate: Some(RelationCandidate { coeffs }), ..result })
        }
        ColumnDependence::Independent | ColumnDependence::Unknown => {
            let rows = gm.rows(&span_cols);
            let t: Vec<(usize, i128)> = tvec.iter().flatten().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect();
            let y = separating_functional(&rows, &t, DEFAULT_MODULI)
                .ok_or_else(|| Error::BoundExceeded("membership undecided: no certificate found".into()))?;
            let mut offsets = Vec::new();
            let mut off = 0;
            for (b, &p) in gm.blocks.iter().zip(&gm.primes) {
                let dim = b.first().map_or(0, Vec::len);
                offsets.push((off, dim, p));
                off += dim;
            }
            let sep = y
                .iter()
                .map(|(i, c)| {
                    let (o, _, p) = *offsets.iter().find(|(o, d, _)| *i >= *o && *i < o + d).unwrap();
                    SeparatingEntry { p, coeff_index: i - o, value: fmt_rational(c) }
                })
                .collect();
            Ok(Membership { separating: Some(sep), ..result })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn ix(s: &str) -> Index {
        s.parse().unwrap()
    }

    #[test]
    fn generator_counts() {
        assert_eq!(gens(SpanFamily::O, 0), vec![GeneratorDescriptor::power(0, 0)]);
        assert_eq!(gens(SpanFamily::O, 2).len(), 7);
        assert_eq!(gens(SpanFamily::O, 3).len(), 15);
        for k in 0..8 {
            assert_eq!(gens(SpanFamily::O, k).len(), (1 << (k + 1)) - 1);
        }
        assert_eq!(gens(SpanFamily::Q, 2).len(), 14);
        let labels: Vec<String> = gens(SpanFamily::O, 2).iter().map(ToString::to_string).collect();
        assert_eq!(labels, ["zeta(1,1)", "zeta(2)", "(1-q)zeta(1)", "p(1-q)zeta(1)", "(1-q)^2", "p(1-q)^2", "p^2(1-q)^2"]);
    }

    #[test]
    fn v_is_the_shifted_part() {
        for f in [SpanFamily::O, SpanFamily::Q, SpanFamily::O2] {
            for k in 1..4 {
                let g: HashSet<_> = gens(f, k).into_iter().collect();
                let v = v_gens(f, k);
                assert!(v.iter().all(|x| g.contains(x)));
                assert_eq!(v.len(), g.iter().filter(|x| x.j >= 1).count());
            }
        }
    }

    #[test]
    fn vectorization_matches_hsum_mod() {
        let descs = vec![
            GeneratorDescriptor::zeta(ix("2,1")),
            GeneratorDescriptor::zeta_s(ix("1,2"), ExpVector::new(vec![0, 2])),
            GeneratorDescriptor::zeta(ix("3")).times(1, 2),
            GeneratorDescriptor { pbracket: true, ..GeneratorDescriptor::zeta(ix("1,1")).times(0, 1) },
        ];
        for (p, n) in [(5, 1), (7, 2), (11, 1), (13, 2), (5, 3)] {
            let v = vectorize_prime(p, n, &descs).unwrap();
            for (d, x) in descs.iter().zip(&v) {
                let r = RelationCandidate { coeffs: vec![(d.clone(), rat(1))] }.residual_at(p, n).unwrap();
                let ring = ZRing::new(p, n).unwrap();
                assert_eq!(ring.to_cycmod(x), r, "{d} p={p} n={n}");
            }
        }
    }

    #[test]
    fn weight_one_relation_vanishes() {
        let r = RelationCandidate {
            coeffs: vec![
                (GeneratorDescriptor::zeta(ix("1")), rat(1)),
                (GeneratorDescriptor::power(1, 1), ratio(-1, 2)),
                (GeneratorDescriptor::power(0, 1), ratio(1, 2)),
            ],
        };
        assert!(r.holds_at(&default_primes(1, 97), 1).unwrap());
        let v = vectorize_prime(7, 1, &[GeneratorDescriptor::power(0, 3)]).unwrap();
        assert!(v[0].iter().any(|&x| x != 0));
    }

    #[test]
    fn small_dimensions() {
        let vz = Vectorizer::default();
        for (k, d) in [(1, 0), (2, 0), (3, 1)] {
            let r = dim_tilde(SpanFamily::O, k, None, &vz).unwrap();
            assert_eq!(r.dim_tilde, d, "{r:?}");
            assert!(r.exact && r.stabilized);
        }
    }

    #[test]
    fn too_few_primes_grow() {
        let r = dim_tilde(SpanFamily::O, 3, Some(&[11, 13, 17]), &Vectorizer::default()).unwrap();
        assert!(r.stabilized && r.exact);
        assert_eq!(r.dim_tilde, 1);
        assert_eq!(r.primes, [11, 13, 17]);
        assert!(r.extension.len() >= 3);
    }

    #[test]
    fn weight_two_relation() {
        let descs = vec![
            GeneratorDescriptor::zeta(ix("2")),
            GeneratorDescriptor::power(0, 2),
            GeneratorDescriptor::power(1, 2),
            GeneratorDescriptor::power(2, 2),
        ];
        let rels = find_relations_in(&descs, &default_primes(2, 97), 1, &Vectorizer::default()).unwrap();
        assert_eq!(rels.len(), 1);
        let got: Vec<Rational> = rels[0].normalized().coeffs.iter().map(|(_, c)| c.clone()).collect();
        assert_eq!(got, vec![rat(1), ratio(-1, 12), ratio(1, 12)]);
    }

    #[test]
    fn relation_json_roundtrip() {
        let r = RelationCandidate { coeffs: vec![(GeneratorDescriptor::zeta(ix("2")), ratio(-1, 12))] };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"basis":[{"h":0,"j":0,"index":[2]}],"coeffs":["-1/12"]}"#);
        assert_eq!(serde_json::from_str::<RelationCandidate>(&s).unwrap(), r);
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let vz = Vectorizer::new(Some(dir.path().to_path_buf()));
        let descs = gens(SpanFamily::O, 2);
        let a = vz.block(11, 1, &descs, "t").unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
        let b = vz.block(11, 1, &descs, "t").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, vectorize_prime(11, 1, &descs).unwrap());
    }

    #[test]
    fn zero_is_a_member() {
        let span = gens(SpanFamily::O, 1);
        let target = RelationCandidate { coeffs: vec![(GeneratorDescriptor::zeta(ix("1")), rat(0))] };
        let m = membership(&target, &span, &[11, 13], 1, &Vectorizer::default()).unwrap();
        assert!(m.member);
    }
}
