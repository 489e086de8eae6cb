use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use qmzv_core::analytic::convergence_report;
use qmzv_core::hsum::{hsum_mod, Variant};
use qmzv_core::index::{ExpVector, Index, Orbit};
use qmzv_core::miner::{
    default_primes, dim_tilde, find_relations, membership, DimReport, SpanFamily, SpanSpec, Target, Vectorizer,
    DEFAULT_PRIME_BOUND,
};
use qmzv_core::tables::{compute_tables, TableBounds};
use qmzv_core::verify::{self, CaseOutcome, VerifyReport};

use crate::{Cli, Command, Expect, Format, IdentityId};

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn vectorizer(cli: &Cli) -> Result<Vectorizer> {
    if cli.no_cache {
        return Ok(Vectorizer::default());
    }
    let vz = match &cli.cache_dir {
        Some(d) => Vectorizer::new(Some(d.clone())),
        None => Vectorizer::from_env(),
    };
    if let Some(d) = &vz.cache_dir {
        fs::create_dir_all(d).with_context(|| format!("cache directory {} is not writable", d.display()))?;
    }
    Ok(vz)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<T>().map_err(|_| anyhow!("bad {what} {t:?}")))
        .collect()
}

fn parse_weights(s: &str) -> Result<Vec<u32>> {
    let ws: Vec<u32> = match s.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().context("weights")?;
            let b: u32 = b.trim().trim_start_matches('=').parse().context("weights")?;
            (a..=b).collect()
        }
        None => parse_list(s, "weight")?,
    };
    if ws.is_empty() || ws.contains(&0) {
        bail!("weights must be a nonempty range of positive integers");
    }
    Ok(ws)
}

/// `None` for the automatic rule.
fn parse_primes(s: &str) -> Result<Option<Vec<u64>>> {
    if s == "auto" {
        return Ok(None);
    }
    let ps: Vec<u64> = parse_list(s, "prime")?;
    if let Some(p) = ps.iter().find(|&&p| !qmzv_core::primes::is_prime(p)) {
        bail!("{p} is not a prime");
    }
    if ps.is_empty() {
        bail!("empty prime list");
    }
    Ok(Some(ps))
}

fn index(s: &Option<String>) -> Result<Index> {
    let s = s.as_deref().ok_or_else(|| anyhow!("--index is required"))?;
    Ok(s.parse()?)
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("{flag} is required"))
}

pub fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Hsum { variant, p, n, index: k, s } => {
            let v: Variant = variant.parse()?;
            let k: Index = k.parse()?;
            let s: Option<ExpVector> = s.as_deref().map(str::parse).transpose()?;
            let x = hsum_mod(v, *p, *n, &k, s.as_ref())?;
            let at_one = x.eval_at_one_mod();
            let out = json!({
                "variant": v.name(),
                "p": p,
                "n": n,
                "index": k.literal(),
                "s": s.map(|s| s.literal()),
                "residue": x.residue().to_string(),
                "coeffs": x.to_json().coeffs,
                "at_one": { "value": at_one.value.to_string(), "modulus": at_one.modulus.to_string() },
            });
            emit(cli, &to_json(&out)?)?;
            Ok(true)
        }
        Command::Verify { id, p, n, index: k, star, m, l, k: kk, primes, ns, max_weight } => {
            let reports: Vec<VerifyReport> = match id {
                IdentityId::Reversal => {
                    let v = if *star { Variant::Star } else { Variant::Plain };
                    vec![verify::verify_reversal(need(*p, "--p")?, *n, &index(k)?, v)?]
                }
                IdentityId::Duality => vec![verify::verify_hat_duality(need(*p, "--p")?, *n, &index(k)?)?],
                IdentityId::Cyclic => vec![verify::verify_cyclic(need(*p, "--p")?, *n, &Orbit::of(&index(k)?), *star)?],
                IdentityId::Wt1 => vec![verify::verify_weight_one(need(*p, "--p")?, *n)?],
                IdentityId::Q2 => verify::verify_q2_suite(need(*p, "--p")?, &index(k)?)?,
                IdentityId::Bradley => vec![verify::verify_bradley(need(*m, "--m")?, &index(k)?)?],
                IdentityId::Theta => {
                    vec![verify::verify_theta_lemma(need(*l, "--l")?, need(*kk, "--k")?, need(*m, "--m")? as u32)?]
                }
                IdentityId::Grid => {
                    let ps: Vec<u64> = parse_list(primes, "prime")?;
                    let ns: Vec<u32> = parse_list(ns, "n")?;
                    let cases = verify::identity_grid(&ps, &ns, *max_weight);
                    let failed = cases.iter().filter(|c| !c.passed()).count();
                    let skipped = cases.iter().filter(|c| matches!(c, CaseOutcome::Skipped { .. })).count();
                    let out = json!({ "cases": cases.len(), "failed": failed, "skipped": skipped, "outcomes": cases });
                    emit(cli, &to_json(&out)?)?;
                    return Ok(failed == 0);
                }
            };
            emit(cli, &to_json(&reports)?)?;
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Dims { family, weights, primes, format } => {
            let family: SpanFamily = family.parse()?;
            let primes = parse_primes(primes)?;
            let vz = vectorizer(cli)?;
            let reports: Vec<DimReport> = parse_weights(weights)?
                .into_iter()
                .map(|k| dim_tilde(family, k, primes.as_deref(), &vz))
                .collect::<qmzv_core::Result<_>>()?;
            for r in &reports {
                for (p, why) in &r.excluded {
                    eprintln!("warning: weight {}: prime {p} excluded ({why})", r.weight);
                }
            }
            let text = match format {
                Format::Json => to_json(&reports)?,
                Format::Csv => dims_csv(&reports),
            };
            emit(cli, &text)?;
            Ok(reports.iter().all(|r| r.exact && r.stabilized))
        }
        Command::Mine { family, weight, primes, emit: path } => {
            let family: SpanFamily = family.parse()?;
            let primes = parse_primes(primes)?;
            let used = primes.clone().unwrap_or_else(|| default_primes(*weight, DEFAULT_PRIME_BOUND));
            let rels = find_relations(family, *weight, Some(&used), &vectorizer(cli)?)?;
            let out = json!({
                "family": family.to_string(),
                "weight": weight,
                "n": family.n(),
                "primes": used,
                "note": "relations hold modulo [p]^n for every prime listed, not proven for all primes",
                "relations": rels,
            });
            let text = to_json(&out)?;
            if let Some(p) = path {
                write_file(p, &text)?;
            }
            let mut summary = format!("{} relation(s) in weight {weight} of family {family} over {} primes\n", rels.len(), used.len());
            for r in &rels {
                summary.push_str(&format!("{}\n", r.normalized()));
            }
            emit(cli, if path.is_some() { &summary } else { &text })?;
            Ok(true)
        }
        Command::Member { target, span, primes, expect } => {
            let target: Target = serde_json::from_str(&fs::read_to_string(target).with_context(|| format!("reading {}", target.display()))?)
                .context("target JSON")?;
            let span: SpanSpec = serde_json::from_str(&fs::read_to_string(span).with_context(|| format!("reading {}", span.display()))?)
                .context("span JSON")?;
            let weight = target.coeffs.iter().map(|(g, _)| g.index.weight() + g.j).max().unwrap_or(1).max(1);
            let used = parse_primes(primes)?.unwrap_or_else(|| default_primes(weight, DEFAULT_PRIME_BOUND));
            let m = membership(&target, &span.descriptors(), &used, span.n(), &vectorizer(cli)?)?;
            let out = json!({ "over": "S", "result": m });
            emit(cli, &to_json(&out)?)?;
            Ok(match expect {
                None => true,
                Some(Expect::Member) => m.member,
                Some(Expect::Nonmember) => !m.member,
            })
        }
        Command::Limits { index: k, m, order, digits } => {
            let k: Index = k.parse()?;
            let ms: Vec<u64> = parse_list(m, "m")?;
            let r = convergence_report(&k, &ms, *order, *digits)?;
            let checks: Vec<serde_json::Value> = (0..*order)
                .filter(|&l| r.limits[l].is_some())
                .map(|l| json!({ "l": l, "deltas": r.deltas(l), "monotone": r.monotone(l) }))
                .collect();
            let ok = checks.iter().all(|c| c["monotone"] == json!(true));
            emit(cli, &to_json(&json!({ "report": r, "checks": checks }))?)?;
            Ok(ok)
        }
        Command::Tables { out_dir, o_max, word_max, q_max, o2_max } => {
            let bounds = TableBounds { o: *o_max, word: *word_max, q: *q_max, o2: *o2_max };
            let results = compute_tables(&bounds, &vectorizer(cli)?)?;
            fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            let mut summary = Vec::new();
            for t in &results {
                write_file(&out_dir.join(format!("{}.csv", t.name)), &t.to_csv())?;
                summary.push(json!({ "table": t.name, "label": t.label, "all_match": t.all_match() }));
            }
            write_file(&out_dir.join("summary.json"), &to_json(&json!({ "bounds": bounds, "tables": summary }))?)?;
            emit(cli, &to_json(&summary)?)?;
            Ok(results.iter().all(|t| t.all_match()))
        }
    }
}

fn dims_csv(reports: &[DimReport]) -> String {
    let row = |name: &str, f: &dyn Fn(&DimReport) -> String| {
        let cells: Vec<String> = reports.iter().map(f).collect();
        format!("{name},{}\n", cells.join(","))
    };
    let mut out = String::new();
    out.push_str(&row("weight", &|r| r.weight.to_string()));
    out.push_str(&row("dim_tilde", &|r| r.dim_tilde.to_string()));
    out.push_str(&row("rank_full", &|r| r.rank_full.to_string()));
    out.push_str(&row("rank_v", &|r| r.rank_v.to_string()));
    out.push_str(&row("stabilized", &|r| r.stabilized.to_string()));
    out.push_str(&row("exact", &|r| r.exact.to_string()));
    out.push_str(&row("primes", &|r| (r.primes.len() + r.extension.len()).to_string()));
    out
}
