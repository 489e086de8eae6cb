//! End-to-end acceptance checks, one test per criterion. Each test writes a single
//! `acceptance N <name>: PASS|FAIL (<detail>)` line straight to stdout so the line survives
//! output capture, then asserts.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;
use num_traits::Zero;

use qmzv_core::analytic::{alpha_direct, alpha_via_formula, convergence_report};
use qmzv_core::exact::rational::rational_mod;
use qmzv_core::exact::{inv_qint_closed_form, parse_rational, q_int, reduce, RatFun, Rational};
use qmzv_core::hsum::{harmonic_rational, hsum_mod, Variant};
use qmzv_core::index::{compositions, ExpVector, Index, Orbit};
use qmzv_core::miner::{
    default_primes, dim_tilde, find_relations, find_relations_in, membership, relation_in_span, GeneratorDescriptor,
    RelationCandidate, SpanFamily, SpanSpec, Vectorizer, DEFAULT_PRIME_BOUND,
};
use qmzv_core::verify::{
    bradley_identity, cyclic_identity, hat_duality_identity, identity_grid, q2_identities, reversal_identity,
    theta_lemma_identity, verify_bradley, verify_theta_lemma, weight_one_identity, CaseOutcome, Identity,
    IdentityValue, Q2Form, RingCtx,
};
use qmzv_core::words::{check_q_stuffle_homomorphism, eval_hsum, q_stuffle, word_quotient, PolySum, Word};

const GRID_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const GRID_NS: [u32; 3] = [1, 2, 3];
const GRID_MAX_WEIGHT: u32 = 5;

const ALPHA_DIGITS: u32 = 50;
const ALPHA_TOL: f64 = 1e-35;
const ALPHA_MAX_M: u64 = 30;

const CONVERGENCE_MS: [u64; 4] = [250, 500, 1000, 2000];
const CONVERGENCE_DIGITS: u32 = 50;
const ALPHA0_TOL_AT_2000: f64 = 0.02;
const ALPHA1_TOL_AT_2000: f64 = 0.05;

const MUTATIONS_PER_CHECKER: usize = 3;

fn line(no: u32, name: &str, ok: bool, detail: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance {no} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    let _ = out.flush();
}

fn ix(s: &str) -> Index {
    s.parse().unwrap()
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn zeta(k: &str) -> GeneratorDescriptor {
    GeneratorDescriptor::zeta(ix(k))
}

fn zeta_s(k: &str, s: &[u32]) -> GeneratorDescriptor {
    GeneratorDescriptor::zeta_s(ix(k), ExpVector::new(s.to_vec()))
}

#[test]
fn identity_grid_is_exact() {
    let cases = identity_grid(&GRID_PRIMES, &GRID_NS, GRID_MAX_WEIGHT);
    let mut per_identity: BTreeMap<String, usize> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut skipped = Vec::new();
    for c in &cases {
        match c {
            CaseOutcome::Checked(r) => {
                *per_identity.entry(r.identity.clone()).or_default() += 1;
                if !r.pass {
                    failures.push(format!("{} {:?}", r.identity, r.params));
                }
            }
            CaseOutcome::Skipped { identity, params, reason } => skipped.push(format!("{identity} {params:?}: {reason}")),
        }
    }
    let families = ["reversal", "duality", "cyclic", "wt1", "q2"];
    let missing: Vec<&str> =
        families.iter().copied().filter(|f| !per_identity.keys().any(|k| k.starts_with(f))).collect();
    let ok = failures.is_empty() && skipped.is_empty() && missing.is_empty();
    line(
        1,
        "identity grid",
        ok,
        &format!("{} cases, {} failed, {} skipped, missing {:?}, per identity {:?}", cases.len(), failures.len(), skipped.len(), missing, per_identity),
    );
    assert!(ok, "failures {failures:?}\nskipped {skipped:?}\nmissing {missing:?}");
}

#[test]
fn dimension_tables_match() {
    let vz = Vectorizer::default();
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for (family, expected) in [
        (SpanFamily::O, vec![0usize, 0, 1, 0, 2, 1, 3]),
        (SpanFamily::Q, vec![0, 1, 2, 2, 6]),
        (SpanFamily::O2, vec![0, 1, 1, 2, 3, 4]),
    ] {
        let mut row = Vec::new();
        for (i, &want) in expected.iter().enumerate() {
            let k = i as u32 + 1;
            let r = dim_tilde(family, k, None, &vz).unwrap();
            row.push(r.dim_tilde);
            if r.dim_tilde != want || !r.stabilized || !r.exact {
                bad.push(format!("{family} k={k}: got {} (stabilized {}, exact {}), want {want}", r.dim_tilde, r.stabilized, r.exact));
            }
        }
        summary.push(format!("{family} {row:?}"));
    }
    let want_words = [0usize, 0, 1, 0, 2, 1, 3, 4, 5];
    let mut row = Vec::new();
    for (i, &want) in want_words.iter().enumerate() {
        let k = i as u32 + 1;
        let r = word_quotient(k).unwrap();
        row.push(r.dim);
        if r.dim != want || !r.exact {
            bad.push(format!("word k={k}: got {} (exact {}), want {want}", r.dim, r.exact));
        }
    }
    summary.push(format!("word {row:?}"));
    line(2, "dimension tables", bad.is_empty(), &summary.join("; "));
    assert!(bad.is_empty(), "{bad:#?}");
}

/// The unique relation over `basis`, normalized, must equal `want` (zero entries dropped).
fn unique_relation(basis: Vec<GeneratorDescriptor>, want: &[&str], primes: &[u64]) -> std::result::Result<RelationCandidate, String> {
    let rels = find_relations_in(&basis, primes, 1, &Vectorizer::default()).map_err(|e| e.to_string())?;
    if rels.len() != 1 {
        return Err(format!("expected one relation over {} generators, found {}", basis.len(), rels.len()));
    }
    let got = rels[0].normalized();
    let expected = RelationCandidate {
        coeffs: basis.iter().cloned().zip(want.iter().map(|c| q(c))).filter(|(_, c)| !c.is_zero()).collect(),
    };
    if got != expected {
        return Err(format!("got {got}, want {expected}"));
    }
    Ok(got)
}

#[test]
fn relations_are_recovered() {
    let vz = Vectorizer::default();
    let mut bad = Vec::new();
    let mut found = Vec::new();
    let cases: Vec<(u32, Vec<GeneratorDescriptor>, Vec<&str>)> = vec![
        // ζ(1) = ((p − 1)/2)(1 − q)
        (1, vec![zeta("1"), GeneratorDescriptor::power(0, 1), GeneratorDescriptor::power(1, 1)], vec!["1", "1/2", "-1/2"]),
        // ζ(2) + ((p² − 1)/12)(1 − q)² = 0
        (
            2,
            vec![zeta("2"), GeneratorDescriptor::power(0, 2), GeneratorDescriptor::power(1, 2), GeneratorDescriptor::power(2, 2)],
            vec!["1", "-1/12", "0", "1/12"],
        ),
        // 2ζ(2) + ζ(1,1) + (1 − q)ζ(1) = 0
        (2, vec![zeta("2"), zeta("1,1"), zeta("1").times(0, 1)], vec!["1", "1/2", "1/2"]),
    ];
    for (k, basis, want) in cases {
        let primes = default_primes(k, DEFAULT_PRIME_BOUND);
        match unique_relation(basis, &want, &primes) {
            Ok(rel) => {
                let mined = find_relations(SpanFamily::O, k, Some(&primes), &vz).unwrap();
                if relation_in_span(&rel, &mined) {
                    found.push(rel.to_string());
                } else {
                    bad.push(format!("{rel} not in the weight-{k} family kernel"));
                }
            }
            Err(e) => bad.push(e),
        }
    }
    line(3, "relation recovery", bad.is_empty(), &found.join("; "));
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn membership_over_default_primes() {
    let vz = Vectorizer::default();
    let primes = default_primes(5, DEFAULT_PRIME_BOUND);

    let inside = RelationCandidate {
        coeffs: vec![
            (zeta_s("4,1", &[3, 0]), q("1")),
            (zeta_s("3,1,1", &[2, 1, 0]), q("-1")),
            (zeta_s("3,1,1", &[2, 0, 1]), q("-1")),
        ],
    };
    let span_q = SpanSpec::Shifted { family: SpanFamily::Q, shifted_weight: 4 };
    let m_q = membership(&inside, &span_q.descriptors(), &primes, span_q.n(), &vz).unwrap();

    let outside = RelationCandidate { coeffs: vec![(zeta("4,1"), q("1")), (zeta("3,1,1"), q("-2"))] };
    let span_o = SpanSpec::Shifted { family: SpanFamily::O, shifted_weight: 4 };
    let m_o = membership(&outside, &span_o.descriptors(), &primes, span_o.n(), &vz).unwrap();

    let ok = m_q.member && m_q.certificate.is_some() && !m_o.member && m_o.separating.is_some();
    line(
        4,
        "membership over S",
        ok,
        &format!(
            "Q target member={} over S ({} primes), O target member={} over S (separating functional {})",
            m_q.member,
            m_q.primes.len(),
            m_o.member,
            if m_o.separating.is_some() { "found" } else { "missing" }
        ),
    );
    assert!(ok, "{m_q:?}\n{m_o:?}");
}

#[test]
fn exact_ingredient_identities() {
    let mut bad = Vec::new();
    let mut bradley = 0;
    for n in 1..=8u64 {
        for w in 1..=3 {
            for k in compositions(w) {
                let r = verify_bradley(n, &k).unwrap();
                bradley += 1;
                if !r.pass {
                    bad.push(format!("bradley n={n} k={}", k.literal()));
                }
            }
        }
    }
    let mut theta = 0;
    for l in 0..=4 {
        for k in 1..=3 {
            for m in 1..=5 {
                let r = verify_theta_lemma(l, k, m).unwrap();
                theta += 1;
                if !r.pass {
                    bad.push(format!("theta l={l} k={k} m={m}"));
                }
            }
        }
    }
    let h = check_q_stuffle_homomorphism(20, 4).unwrap();
    bad.extend(h.failures.iter().map(|f| format!("q-stuffle {f}")));
    let ok = bad.is_empty() && h.pass();
    line(
        5,
        "exact ingredient identities",
        ok,
        &format!("{bradley} bradley, {theta} theta, {} q-stuffle pairs x m<=20 ({} checks)", h.pairs, h.checks),
    );
    assert!(ok, "{bad:#?}");
}

#[test]
fn oracle_equivalences() {
    let mut bad = Vec::new();

    let mut inverses = 0;
    for &p in &GRID_PRIMES {
        for &n in &GRID_NS {
            for m in 1..p {
                let closed = inv_qint_closed_form(m, p, n).unwrap();
                let euclid = reduce(&q_int(m).unwrap(), p, n).unwrap().inv().unwrap();
                inverses += 1;
                if closed != euclid {
                    bad.push(format!("inverse of [{m}] mod [{p}]^{n}"));
                }
            }
        }
    }

    let mut worst = 0.0f64;
    for k in ["1", "2", "2,1"] {
        // below m = depth + 1 the nested sum is empty and the direct route rejects it
        for m in (ix(k).depth() as u64 + 1).max(2)..=ALPHA_MAX_M {
            let direct = alpha_direct(&ix(k), m, 3, ALPHA_DIGITS).unwrap();
            for l in 0..=2u32 {
                let f = alpha_via_formula(l, &ix(k), m, ALPHA_DIGITS).unwrap();
                let d = (&f - direct.coeff(l as usize)).abs_f64();
                worst = worst.max(d);
                if !(d < ALPHA_TOL) {
                    bad.push(format!("alpha k={k} m={m} l={l}: {d:e}"));
                }
            }
        }
    }

    let mut slices = 0;
    for p in [2u64, 3, 5, 7, 11, 13] {
        for n in 1..=2u32 {
            let modulus = BigInt::from(p).pow(n);
            for w in 1..=4 {
                for k in compositions(w) {
                    let at_one = hsum_mod(Variant::Plain, p, n, &k, None).unwrap().eval_at_one_mod();
                    let direct = rational_mod(&harmonic_rational(p - 1, &k, false), p, &modulus).unwrap();
                    slices += 1;
                    if at_one.modulus != modulus || at_one.value != direct {
                        bad.push(format!("slice p={p} n={n} k={}: {} vs {direct}", k.literal(), at_one.value));
                    }
                }
            }
        }
    }

    line(
        6,
        "oracle equivalences",
        bad.is_empty(),
        &format!("{inverses} inverses, alpha routes worst {worst:e} (tol {ALPHA_TOL:e}), {slices} q=1 slices"),
    );
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn analytic_convergence() {
    let mut bad = Vec::new();
    let mut detail = Vec::new();
    for (k, order) in [("2", 2usize), ("3", 1), ("1", 1)] {
        let r = convergence_report(&ix(k), &CONVERGENCE_MS, order, CONVERGENCE_DIGITS).unwrap();
        for l in 0..order {
            let d = r.deltas(l);
            detail.push(format!("alpha{l}(({k})) deltas {d:.4?}"));
            if !r.monotone(l) {
                bad.push(format!("alpha{l}(({k})) not monotone"));
            }
        }
        let last = |l: usize| r.deltas(l).last().copied().unwrap_or(f64::INFINITY);
        if k == "2" {
            if !(last(0) < ALPHA0_TOL_AT_2000) {
                bad.push(format!("alpha0((2)) at m=2000 off by {}", last(0)));
            }
            if !(last(1) < ALPHA1_TOL_AT_2000) {
                bad.push(format!("alpha1((2)) at m=2000 off by {}", last(1)));
            }
        }
    }
    line(7, "analytic convergence", bad.is_empty(), &detail.join("; "));
    assert!(bad.is_empty(), "{bad:#?}");
}

fn mutations_fail<T: IdentityValue>(id: &Identity<T>) -> usize {
    id.sampled_mutations(MUTATIONS_PER_CHECKER)
        .iter()
        .filter(|m| m.residual().map(|r| !r.is_zero()).unwrap_or(false) && !m.report().unwrap().pass)
        .count()
}

#[test]
fn mutations_are_detected() {
    let mut ctx = RingCtx::new(7, 2).unwrap();
    let k = ix("2,1,1");
    let orbit = Orbit::of(&ix("2,1,1"));
    let mut counts: Vec<(String, usize)> = vec![
        ("reversal".into(), mutations_fail(&reversal_identity(&mut ctx, &k, Variant::Plain).unwrap())),
        ("reversal-star".into(), mutations_fail(&reversal_identity(&mut ctx, &k, Variant::Star).unwrap())),
        ("duality".into(), mutations_fail(&hat_duality_identity(&mut ctx, &k).unwrap())),
        ("cyclic".into(), mutations_fail(&cyclic_identity(&mut ctx, &orbit, false).unwrap())),
        ("cyclic-star".into(), mutations_fail(&cyclic_identity(&mut ctx, &orbit, true).unwrap())),
        ("wt1".into(), mutations_fail(&weight_one_identity(&mut ctx).unwrap())),
        ("bradley".into(), mutations_fail(&bradley_identity(5, &ix("2,1")).unwrap())),
        ("theta".into(), mutations_fail(&theta_lemma_identity(2, 2, 4).unwrap())),
    ];
    for id in q2_identities(7, &ix("2,1"), Q2Form::Truncated).unwrap() {
        counts.push((id.name.clone(), mutations_fail(&id)));
    }

    // q-stuffle homomorphism: perturb one coefficient of the product expansion
    let (a, b) = (Word::new(vec![2]).unwrap(), Word::new(vec![1, 1]).unwrap());
    let prod = q_stuffle(&a, &b);
    let m = 6;
    let lhs = &eval_hsum(&PolySum::word(a.clone()), m).unwrap() * &eval_hsum(&PolySum::word(b.clone()), m).unwrap();
    assert!((&lhs - &eval_hsum(&prod, m).unwrap()).is_zero());
    let mut stuffle_fail = 0;
    for w in prod.terms().keys().take(MUTATIONS_PER_CHECKER) {
        let mut mutated = prod.clone();
        mutated.add_term(w.clone(), qmzv_core::exact::Poly::one());
        let r: RatFun = &lhs - &eval_hsum(&mutated, m).unwrap();
        if !r.is_zero() {
            stuffle_fail += 1;
        }
    }
    counts.push(("q-stuffle".into(), stuffle_fail));

    let short: Vec<&(String, usize)> = counts.iter().filter(|(_, c)| *c < MUTATIONS_PER_CHECKER).collect();
    let ok = short.is_empty();
    line(
        8,
        "mutation sensitivity",
        ok,
        &counts.iter().map(|(n, c)| format!("{n} {c}/{MUTATIONS_PER_CHECKER}")).collect::<Vec<_>>().join(", "),
    );
    assert!(ok, "{short:?}");
}
