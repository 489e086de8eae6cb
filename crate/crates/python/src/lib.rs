//! Python bindings. Structured results come back as plain dicts and lists.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

use qmzv_core::analytic::convergence_report;
use qmzv_core::exact::fmt_rational;
use qmzv_core::hsum::{harmonic_rational, hsum_mod, Variant};
use qmzv_core::index::{ExpVector, Index, Orbit};
use qmzv_core::miner::{self, SpanFamily, SpanSpec, Target, Vectorizer, DEFAULT_PRIME_BOUND};
use qmzv_core::verify::{self, VerifyReport};
use qmzv_core::words;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    let json = PyModule::import(py, "json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

fn from_py<T: serde::de::DeserializeOwned>(py: Python<'_>, v: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = if let Ok(s) = v.extract::<String>() {
        s
    } else {
        PyModule::import(py, "json")?.call_method1("dumps", (v,))?.extract()?
    };
    serde_json::from_str(&text).map_err(err)
}

fn index(parts: Vec<u32>) -> PyResult<Index> {
    Index::new(parts).map_err(err)
}

fn variant(name: &str) -> PyResult<Variant> {
    name.parse().map_err(err)
}

fn family(name: &str) -> PyResult<SpanFamily> {
    name.parse().map_err(err)
}

fn vectorizer(cache_dir: Option<PathBuf>) -> Vectorizer {
    match cache_dir {
        Some(d) => Vectorizer::new(Some(d)),
        None => Vectorizer::from_env(),
    }
}

/// Residue of a harmonic q-sum modulo `[p]^n`, as coefficient strings of degree `< n(p-1)`.
#[pyfunction]
#[pyo3(signature = (variant_name, p, n, k, s=None))]
fn hsum(py: Python<'_>, variant_name: &str, p: u64, n: u32, k: Vec<u32>, s: Option<Vec<u32>>) -> PyResult<Py<PyAny>> {
    let s = s.map(ExpVector::new);
    let x = hsum_mod(variant(variant_name)?, p, n, &index(k)?, s.as_ref()).map_err(err)?;
    let at_one = x.eval_at_one_mod();
    let out = serde_json::json!({
        "p": p,
        "n": n,
        "coeffs": x.to_json().coeffs,
        "at_one": { "value": at_one.value.to_string(), "modulus": at_one.modulus.to_string() },
    });
    to_py(py, &out)
}

/// Classical truncated harmonic sum as a fraction string.
#[pyfunction]
#[pyo3(signature = (m, k, star=false))]
fn harmonic(m: u64, k: Vec<u32>, star: bool) -> PyResult<String> {
    Ok(fmt_rational(&harmonic_rational(m, &index(k)?, star)))
}

/// Check one identity family. `name` is one of reversal, duality, cyclic, wt1, q2, bradley, theta.
#[pyfunction]
#[pyo3(signature = (name, p=None, n=1, k=None, star=false, m=None, l=None, kk=None))]
#[allow(clippy::too_many_arguments)]
fn verify_identity(
    py: Python<'_>,
    name: &str,
    p: Option<u64>,
    n: u32,
    k: Option<Vec<u32>>,
    star: bool,
    m: Option<u64>,
    l: Option<u32>,
    kk: Option<u32>,
) -> PyResult<Py<PyAny>> {
    let need_p = || p.ok_or_else(|| err("p is required"));
    let need_k = || k.clone().ok_or_else(|| err("k is required")).and_then(index);
    let need_m = || m.ok_or_else(|| err("m is required"));
    let reports: Vec<VerifyReport> = match name {
        "reversal" => {
            let v = if star { Variant::Star } else { Variant::Plain };
            vec![verify::verify_reversal(need_p()?, n, &need_k()?, v).map_err(err)?]
        }
        "duality" => vec![verify::verify_hat_duality(need_p()?, n, &need_k()?).map_err(err)?],
        "cyclic" => vec![verify::verify_cyclic(need_p()?, n, &Orbit::of(&need_k()?), star).map_err(err)?],
        "wt1" => vec![verify::verify_weight_one(need_p()?, n).map_err(err)?],
        "q2" => verify::verify_q2_suite(need_p()?, &need_k()?).map_err(err)?,
        "bradley" => vec![verify::verify_bradley(need_m()?, &need_k()?).map_err(err)?],
        "theta" => {
            let l = l.ok_or_else(|| err("l is required"))?;
            let kk = kk.ok_or_else(|| err("kk is required"))?;
            vec![verify::verify_theta_lemma(l, kk, need_m()? as u32).map_err(err)?]
        }
        other => return Err(err(format!("unknown identity {other:?}"))),
    };
    to_py(py, &reports)
}

/// Run every identity checker over a grid of primes, exponents and weights.
#[pyfunction]
fn identity_grid(py: Python<'_>, primes: Vec<u64>, ns: Vec<u32>, max_weight: u32) -> PyResult<Py<PyAny>> {
    let cases = py.detach(|| verify::identity_grid(&primes, &ns, max_weight));
    to_py(py, &cases)
}

/// Dimension of the weight-`k` quotient of the word algebra.
#[pyfunction]
fn word_quotient(py: Python<'_>, k: u32) -> PyResult<Py<PyAny>> {
    let r = py.detach(|| words::word_quotient(k)).map_err(err)?;
    to_py(py, &r)
}

/// Certified dimension report for one family and weight.
#[pyfunction]
#[pyo3(signature = (family_name, k, primes=None, cache_dir=None))]
fn dim_tilde(
    py: Python<'_>,
    family_name: &str,
    k: u32,
    primes: Option<Vec<u64>>,
    cache_dir: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let f = family(family_name)?;
    let vz = vectorizer(cache_dir);
    let r = py.detach(|| miner::dim_tilde(f, k, primes.as_deref(), &vz)).map_err(err)?;
    to_py(py, &r)
}

/// Candidate relations among the generators of one weight.
#[pyfunction]
#[pyo3(signature = (family_name, k, primes=None, cache_dir=None))]
fn find_relations(
    py: Python<'_>,
    family_name: &str,
    k: u32,
    primes: Option<Vec<u64>>,
    cache_dir: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let f = family(family_name)?;
    let vz = vectorizer(cache_dir);
    let used = primes.unwrap_or_else(|| miner::default_primes(k, DEFAULT_PRIME_BOUND));
    let rels = py.detach(|| miner::find_relations(f, k, Some(&used), &vz)).map_err(err)?;
    to_py(py, &rels)
}

/// Decide whether a target combination lies in a span. Both arguments take dicts or JSON strings.
#[pyfunction]
#[pyo3(signature = (target, span, primes=None, cache_dir=None))]
fn membership(
    py: Python<'_>,
    target: &Bound<'_, PyAny>,
    span: &Bound<'_, PyAny>,
    primes: Option<Vec<u64>>,
    cache_dir: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let target: Target = from_py(py, target)?;
    let span: SpanSpec = from_py(py, span)?;
    let weight = target.coeffs.iter().map(|(g, _)| g.index.weight() + g.j).max().unwrap_or(1).max(1);
    let used = primes.unwrap_or_else(|| miner::default_primes(weight, DEFAULT_PRIME_BOUND));
    let vz = vectorizer(cache_dir);
    let m = py
        .detach(|| miner::membership(&target, &span.descriptors(), &used, span.n(), &vz))
        .map_err(err)?;
    to_py(py, &m)
}

/// Limit coefficients of the sums at roots of unity, with convergence diagnostics.
#[pyfunction]
#[pyo3(signature = (k, ms, order=2, digits=30))]
fn limits(py: Python<'_>, k: Vec<u32>, ms: Vec<u64>, order: usize, digits: u32) -> PyResult<Py<PyAny>> {
    let k = index(k)?;
    let r = py.detach(|| convergence_report(&k, &ms, order, digits)).map_err(err)?;
    let checks: Vec<serde_json::Value> = (0..order)
        .filter(|&l| r.limits[l].is_some())
        .map(|l| serde_json::json!({ "l": l, "deltas": r.deltas(l), "monotone": r.monotone(l) }))
        .collect();
    to_py(py, &serde_json::json!({ "report": r, "checks": checks }))
}

#[pymodule]
fn qmzv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hsum, m)?)?;
    m.add_function(wrap_pyfunction!(harmonic, m)?)?;
    m.add_function(wrap_pyfunction!(verify_identity, m)?)?;
    m.add_function(wrap_pyfunction!(identity_grid, m)?)?;
    m.add_function(wrap_pyfunction!(word_quotient, m)?)?;
    m.add_function(wrap_pyfunction!(dim_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(find_relations, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(limits, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
