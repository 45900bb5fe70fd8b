//! Subcommand implementations.

use std::collections::BTreeMap;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use fqcharpoly::bounds::bound_report;
use fqcharpoly::charpoly_dist::{enumerate_charpoly_counts, enumerate_charpoly_distribution, ratio, ExactQ};
use fqcharpoly::counting::{count_N, count_N0, count_star, count_unitary, star_linear_exponent};
use fqcharpoly::derange::{
    condition_for, exact_condition_prob_capped, mc_condition_prob, trend_normalizer, SubgroupCondition,
};
use fqcharpoly::groups::{group_order, sample_with, Family, GroupSpec};
use fqcharpoly::invariable::{
    exact_invariable_gl, exact_invariable_sym, mc_invariable, mc_invariable_gl, prob_gl_no_invariant,
    prob_sym_no_invariant,
};
use fqcharpoly::series::{
    coef_upper_product, gen_binom_decay, gf_plain, gf_star, gf_unitary, gl_majorant, majorization_steps, RatSeries,
    Relation, UpperFlavor,
};
use fqcharpoly::stats::Proportion;
use fqcharpoly::verify::{run_check, VerifyOptions, CHECKS};
use fqcharpoly::{Error, PolyFq};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{big, cell, decimal, emit, fraction, opt_rat, rat, Format, Table};
use crate::{Cli, Command, GroupArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// Π (1 - u^d)^{-N(q;d)}, checked against its closed form.
    GfPlain,
    /// The unitary product, checked against its closed form.
    GfUnitary,
    /// The star product, checked against its closed form.
    GfStar,
    /// The upper-bound product for --flavor and --b.
    Upper,
    /// The GL majorant ((1 - u^b)/(1 - q^b u^b))^{1/b} · (1 - u)/(1 - q u).
    Majorant,
    /// Coefficients of (1 - u)^{-1/b} and their decay checks.
    Decay,
    /// The coefficientwise domination chains.
    Majorization,
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Count { q, max_degree } => count(fmt(Format::Csv), *q, *max_degree),
        Command::Order { group } => order(fmt(Format::Json), group),
        Command::Sample { group, count, seed } => sample(fmt(Format::Json), group, *count, *seed),
        Command::Dist { group, oracle } => dist(fmt(Format::Json), group, *oracle, cli.enum_cap),
        Command::Bounds { family, q, n_min, n_max } => bounds(fmt(Format::Csv), family, q, *n_min, *n_max),
        Command::Series { kind, q, b, flavor, truncation, e } => {
            series(fmt(Format::Json), *kind, *q, *b, flavor, *truncation, *e)
        }
        Command::Derange { group, b, cond, trials, seed, confidence } => {
            let mc = Mc { trials: *trials, seed: *seed, confidence: *confidence };
            derange(fmt(Format::Json), group, *b, cond.as_deref(), mc, cli.series_cap)
        }
        Command::Invariable { n, r, q, e, trials, seed, exact, confidence } => {
            let mc = Mc { trials: *trials, seed: *seed, confidence: *confidence };
            invariable(fmt(Format::Json), *n, *r, *q, *e, *exact, mc)
        }
        Command::Verify { max_order, seed, only } => {
            let opts = VerifyOptions { max_order: max_order.unwrap_or(cli.enum_cap), seed: *seed };
            return verify(fmt(Format::Json), &opts, only);
        }
    }?;
    Ok(ExitCode::SUCCESS)
}

fn spec_json(s: &GroupSpec) -> Value {
    json!({ "family": s.family.name(), "n": s.n, "q": s.q, "dim": s.dim(), "name": s.to_string() })
}

fn count(format: Format, q: u64, max_degree: usize) -> Result<()> {
    if max_degree == 0 {
        bail!("--max-degree must be at least 1");
    }
    fqcharpoly::field::gf(q)?;
    let header = ["d", "N0", "N", "Ntilde", "Mtilde", "Nstar", "Mstar"];
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    for d in 1..=max_degree {
        let (nt, mt) = count_unitary(q, d);
        let (ns, ms) = count_star(q, d);
        let values = [count_N0(q, d), count_N(q, d), nt, mt, ns, ms];
        table.push(std::iter::once(d.to_string()).chain(values.iter().map(|v| v.to_string())).collect());
        let mut row = serde_json::Map::new();
        row.insert("d".into(), json!(d));
        for (name, v) in header[1..].iter().zip(&values) {
            row.insert((*name).into(), big(v));
        }
        rows.push(Value::Object(row));
    }
    let value = json!({ "q": q, "star_linear_exponent": star_linear_exponent(q), "rows": rows });
    emit(format, &value, Some(table), "count")
}

fn order(format: Format, group: &GroupArgs) -> Result<()> {
    let s = group.spec()?;
    let o = group_order(&s)?;
    let mut table = Table::new(&["family", "n", "q", "dim", "order"]);
    table.push(vec![s.family.name().into(), s.n.to_string(), s.q.to_string(), s.dim().to_string(), o.to_string()]);
    let value = json!({ "spec": spec_json(&s), "order": big(&o) });
    emit(format, &value, Some(table), "order")
}

fn elem_json(ctx: &fqcharpoly::FieldCtx, x: fqcharpoly::FieldElem) -> Value {
    let text = ctx.format_elem(x);
    text.parse::<u64>().map(Value::from).unwrap_or(Value::String(text))
}

fn sample(format: Format, group: &GroupArgs, count: usize, seed: u64) -> Result<()> {
    let s = group.spec()?;
    let ctx = s.field()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let m = sample_with(&s, &mut rng)?;
        let rows: Vec<Value> =
            (0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(|&x| elem_json(&ctx, x)).collect())).collect();
        samples.push(Value::Array(rows));
    }
    let value = json!({ "spec": spec_json(&s), "field_size": ctx.q(), "seed": seed, "samples": samples });
    emit(format, &value, None, "sample")
}

fn dist(format: Format, group: &GroupArgs, oracle: bool, enum_cap: u64) -> Result<()> {
    let s = group.spec()?;
    let rows = enumerate_charpoly_distribution(&s)?;
    let observed = if oracle { Some(enumerated_frequencies(&s, enum_cap)?) } else { None };
    let total: ExactQ = rows.iter().map(|(_, p)| p.clone()).sum();
    let mut header = vec!["phi", "polynomial", "probability", "decimal"];
    if oracle {
        header.push("enumerated");
    }
    let mut table = Table::new(&header);
    let mut json_rows = Vec::new();
    for (phi, p) in &rows {
        let mut row = json!({
            "phi": phi.to_text(),
            "polynomial": phi.to_string(),
            "probability": rat(p),
            "decimal": decimal(p),
        });
        let mut csv_row = vec![phi.to_text(), phi.to_string(), fraction(p), decimal(p).to_string()];
        if let Some(obs) = &observed {
            let seen = obs.get(phi).cloned().unwrap_or_default();
            row["enumerated"] = rat(&seen);
            csv_row.push(fraction(&seen));
        }
        table.push(csv_row);
        json_rows.push(row);
    }
    let mut value = json!({ "spec": spec_json(&s), "total": rat(&total), "rows": json_rows });
    if let Some(obs) = &observed {
        let formula: BTreeMap<&PolyFq, &ExactQ> = rows.iter().map(|(p, v)| (p, v)).collect();
        let agrees = obs.len() == formula.len() && obs.iter().all(|(p, v)| formula.get(p) == Some(&v));
        value["oracle_agrees"] = json!(agrees);
    }
    emit(format, &value, Some(table), "dist")
}

/// Observed characteristic polynomial frequencies; orthogonal specs sum `O+` and `O-`.
fn enumerated_frequencies(s: &GroupSpec, cap: u64) -> Result<BTreeMap<PolyFq, ExactQ>> {
    let members = if s.family.is_orthogonal() {
        vec![GroupSpec::new(Family::Oplus, s.n, s.q)?, GroupSpec::new(Family::Ominus, s.n, s.q)?]
    } else {
        vec![*s]
    };
    let mut out: BTreeMap<PolyFq, ExactQ> = BTreeMap::new();
    for m in members {
        let order = group_order(&m)?;
        let counts = enumerate_charpoly_counts(&m, cap).with_context(|| format!("enumerating {m}"))?;
        for (phi, c) in counts {
            *out.entry(phi).or_default() += ratio(c, order.clone());
        }
    }
    Ok(out)
}

fn bounds(format: Format, families: &[Family], qs: &[u64], n_min: usize, n_max: usize) -> Result<()> {
    if families.contains(&Family::Mat) {
        bail!("Mat has no explicit bound");
    }
    let mut specs = Vec::new();
    for &f in families {
        for &q in qs {
            for n in n_min..=n_max {
                if let Ok(s) = GroupSpec::new(f, n, q) {
                    specs.push(s);
                }
            }
        }
    }
    let reports = specs.par_iter().map(bound_report).collect::<fqcharpoly::Result<Vec<_>>>()?;
    let mut table = Table::new(&["family", "n", "q", "bound", "exact_max", "margin"]);
    let mut rows = Vec::new();
    for r in &reports {
        let margin = r.max_exact.as_ref().map(|m| decimal(&(&r.bound - m)));
        table.push(vec![
            r.spec.family.name().into(),
            r.spec.n.to_string(),
            r.spec.q.to_string(),
            decimal(&r.bound).to_string(),
            cell(r.max_exact.as_ref().map(decimal)),
            cell(margin),
        ]);
        rows.push(json!({
            "spec": spec_json(&r.spec),
            "bound": rat(&r.bound),
            "bound_decimal": decimal(&r.bound),
            "exact_max": opt_rat(r.max_exact.as_ref()),
            "exact_max_decimal": r.max_exact.as_ref().map(decimal),
            "margin": margin,
            "satisfied": r.satisfied,
        }));
    }
    emit(format, &json!({ "rows": rows }), Some(table), "bounds")
}

fn coefficient_rows(s: &RatSeries) -> (Vec<Value>, Table) {
    let mut table = Table::new(&["degree", "coefficient", "decimal"]);
    let rows = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(d, c)| {
            table.push(vec![d.to_string(), fraction(c), decimal(c).to_string()]);
            json!({ "degree": d, "value": rat(c), "decimal": decimal(c) })
        })
        .collect();
    (rows, table)
}

fn series(
    format: Format,
    kind: SeriesKind,
    q: u64,
    b: usize,
    flavor: &str,
    trunc: usize,
    e: Option<usize>,
) -> Result<()> {
    let kind_name = kind.to_possible_value().expect("named variant").get_name().to_string();
    let with_coeffs = |s: RatSeries, extra: Value| {
        let (rows, table) = coefficient_rows(&s);
        let mut value = json!({ "kind": kind_name, "q": q, "truncation": s.trunc(), "coefficients": rows });
        if let Value::Object(m) = extra {
            value.as_object_mut().expect("object").extend(m);
        }
        emit(format, &value, Some(table), "series")
    };
    match kind {
        SeriesKind::GfPlain => with_coeffs(gf_plain(q, trunc)?, json!({})),
        SeriesKind::GfUnitary => with_coeffs(gf_unitary(q, trunc)?, json!({})),
        SeriesKind::GfStar => {
            let e = e.unwrap_or_else(|| star_linear_exponent(q));
            with_coeffs(gf_star(q, trunc, e)?, json!({ "e": e }))
        }
        SeriesKind::Upper => {
            let fl = UpperFlavor::parse(flavor)?;
            with_coeffs(coef_upper_product(q, b, fl, trunc)?, json!({ "b": b, "flavor": fl.name() }))
        }
        SeriesKind::Majorant => with_coeffs(gl_majorant(q, b, trunc)?, json!({ "b": b })),
        SeriesKind::Decay => {
            let t = gen_binom_decay(b, trunc)?;
            let mut table = Table::new(&["r", "coefficient", "normalized"]);
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|row| {
                    table.push(vec![row.r.to_string(), fraction(&row.coef), row.normalized.to_string()]);
                    json!({ "r": row.r, "coef": rat(&row.coef), "normalized": row.normalized })
                })
                .collect();
            let value = json!({
                "kind": kind_name,
                "b": t.b,
                "truncation": trunc,
                "raw_decreasing": t.raw_decreasing,
                "normalized_nondecreasing": t.normalized_nondecreasing,
                "within_envelope": t.within_envelope,
                "rows": rows,
            });
            emit(format, &value, Some(table), "series")
        }
        SeriesKind::Majorization => {
            let steps = majorization_steps(q, b, trunc)?;
            let mut table = Table::new(&["step", "relation", "holds", "failure"]);
            let rows: Vec<Value> = steps
                .iter()
                .map(|s| {
                    let relation = match s.relation {
                        Relation::Equal => "equal",
                        Relation::Dominated => "dominated",
                    };
                    table.push(vec![s.label.clone(), relation.into(), s.holds().to_string(), cell(s.failure)]);
                    json!({ "step": s.label, "relation": relation, "holds": s.holds(), "failure": s.failure })
                })
                .collect();
            let value = json!({ "kind": kind_name, "q": q, "b": b, "truncation": trunc, "steps": rows });
            emit(format, &value, Some(table), "series")
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Mc {
    trials: u64,
    seed: u64,
    confidence: f64,
}

fn proportion_fields(p: Option<&Proportion>) -> Value {
    json!({
        "successes": p.map(|p| p.successes),
        "estimate": p.map(|p| p.estimate),
        "ci_low": p.map(|p| p.ci_low),
        "ci_high": p.map(|p| p.ci_high),
    })
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn derange(
    format: Format,
    group: &GroupArgs,
    b: Option<usize>,
    cond: Option<&str>,
    mc: Mc,
    series_cap: usize,
) -> Result<()> {
    let s = group.spec()?;
    let condition = match (cond, b) {
        (Some(c), b) => SubgroupCondition::parse(c, b)?,
        (None, Some(b)) => condition_for(s.family, b)?,
        (None, None) => bail!("give --b or --cond"),
    };
    let exact = match exact_condition_prob_capped(&s, &condition, series_cap) {
        Ok(p) => Some(p),
        Err(Error::Unsupported(_) | Error::CapExceeded(_) | Error::OrderOverCap { .. }) if mc.trials > 0 => None,
        Err(e) => return Err(e.into()),
    };
    let estimate =
        if mc.trials > 0 { Some(mc_condition_prob(&s, &condition, mc.trials, mc.seed, mc.confidence)?) } else { None };
    let exact_decimal = exact.as_ref().map(decimal);
    let normalized = exact_decimal.map(|x| x * trend_normalizer(s.family, s.n, s.q));
    let zero = ExactQ::default();
    let mut value = json!({
        "spec": spec_json(&s),
        "condition": condition.kind.name(),
        "b": condition.b,
        "exact": opt_rat(exact.as_ref()),
        "exact_decimal": exact_decimal,
        "normalized": normalized,
        "outer_coset_mass": rat(&zero),
        "trials": mc.trials,
        "seed": mc.seed,
        "confidence": mc.confidence,
    });
    merge(&mut value, proportion_fields(estimate.as_ref()));
    let mut table = Table::new(&[
        "family",
        "n",
        "q",
        "condition",
        "b",
        "exact",
        "exact_decimal",
        "normalized",
        "estimate",
        "ci_low",
        "ci_high",
    ]);
    table.push(vec![
        s.family.name().into(),
        s.n.to_string(),
        s.q.to_string(),
        condition.kind.name().into(),
        condition.b.to_string(),
        cell(exact.as_ref().map(fraction)),
        cell(exact_decimal),
        cell(normalized),
        cell(estimate.map(|p| p.estimate)),
        cell(estimate.map(|p| p.ci_low)),
        cell(estimate.map(|p| p.ci_high)),
    ]);
    emit(format, &value, Some(table), "derange")
}

fn invariable(format: Format, n: usize, r: usize, q: Option<u64>, e: Option<usize>, exact: bool, mc: Mc) -> Result<()> {
    if mc.trials == 0 && !exact && e.is_none() {
        bail!("nothing to compute: give --trials, --exact or --e");
    }
    let exact_value = if exact {
        Some(match q {
            Some(q) => exact_invariable_gl(n, q, r)?,
            None => exact_invariable_sym(n, r)?,
        })
    } else {
        None
    };
    let estimate = if mc.trials > 0 {
        let est = match q {
            Some(q) => mc_invariable_gl(n, q, r, mc.trials, mc.seed, mc.confidence)?,
            None => mc_invariable(n, r, mc.trials, mc.seed, mc.confidence)?,
        };
        Some(est.estimate)
    } else {
        None
    };
    let no_invariant = match e {
        Some(e) => {
            if e == 0 || e >= n {
                bail!("--e must lie in 1..n");
            }
            let sym = prob_sym_no_invariant(n, e)?;
            let gl = q.map(|q| prob_gl_no_invariant(n, q, e)).transpose()?;
            Some((e, sym, gl))
        }
        None => None,
    };
    let mut value = json!({
        "n": n,
        "r": r,
        "q": q,
        "trials": mc.trials,
        "seed": mc.seed,
        "confidence": mc.confidence,
        "exact": opt_rat(exact_value.as_ref()),
        "exact_decimal": exact_value.as_ref().map(decimal),
        "no_invariant": no_invariant.as_ref().map(|(e, sym, gl)| json!({
            "e": e,
            "sym": rat(sym),
            "sym_decimal": decimal(sym),
            "gl": opt_rat(gl.as_ref()),
            "gl_decimal": gl.as_ref().map(decimal),
            "strict": gl.as_ref().map(|g| g < sym),
        })),
    });
    merge(&mut value, proportion_fields(estimate.as_ref()));
    let mut table = Table::new(&[
        "n",
        "r",
        "q",
        "trials",
        "seed",
        "estimate",
        "ci_low",
        "ci_high",
        "exact",
        "e",
        "no_invariant_sym",
        "no_invariant_gl",
    ]);
    table.push(vec![
        n.to_string(),
        r.to_string(),
        cell(q),
        mc.trials.to_string(),
        mc.seed.to_string(),
        cell(estimate.map(|p| p.estimate)),
        cell(estimate.map(|p| p.ci_low)),
        cell(estimate.map(|p| p.ci_high)),
        cell(exact_value.as_ref().map(fraction)),
        cell(no_invariant.as_ref().map(|x| x.0)),
        cell(no_invariant.as_ref().map(|x| fraction(&x.1))),
        cell(no_invariant.as_ref().and_then(|x| x.2.as_ref().map(fraction))),
    ]);
    emit(format, &value, Some(table), "invariable")
}

fn verify(format: Format, opts: &VerifyOptions, only: &[u32]) -> Result<ExitCode> {
    let ids: Vec<u32> = if only.is_empty() { CHECKS.iter().map(|(id, _)| *id).collect() } else { only.to_vec() };
    let mut outcomes = Vec::new();
    for id in ids {
        let outcome = run_check(id, opts).with_context(|| format!("unknown check {id}"))?;
        eprintln!("{outcome}");
        outcomes.push(outcome);
    }
    let passed = outcomes.iter().all(|o| o.passed);
    let mut table = Table::new(&["id", "name", "passed", "detail"]);
    let checks: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            table.push(vec![o.id.to_string(), o.name.into(), o.passed.to_string(), o.detail.clone()]);
            json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail })
        })
        .collect();
    let value = json!({ "max_order": opts.max_order, "seed": opts.seed, "passed": passed, "checks": checks });
    emit(format, &value, Some(table), "verify")?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
