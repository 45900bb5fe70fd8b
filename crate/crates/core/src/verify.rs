//! The acceptance suite: ten self-contained checks, each comparing an exact
//! formula against an independent oracle. Used by the `acceptance` test
//! target and by `fqcharpoly verify`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{bound_report, lower_bound_gl};
use crate::charpoly_dist::{
    enumerate_charpoly_counts, enumerate_charpoly_distribution, min_probability_gl, prob, prob_gl, prob_sp, ratio,
    unipotent_count_o_even, ExactQ,
};
use crate::counting::star_linear_exponent;
use crate::derange::{decay_trend, enumerated_condition_prob, exact_condition_prob, ConditionKind, SubgroupCondition};
use crate::groups::{
    enumerate_group, group_order, order_gl, order_sp, preserves_form, sample_gl_counted, sample_with, Family, GroupSpec,
};
use crate::invariable::{
    check_strict_inequality, exact_invariable_gl, exact_invariable_sym, mc_invariable, mc_invariable_gl,
};
use crate::poly::PolyFq;
use crate::series::{gf_plain, gf_star, gf_unitary, majorization_steps, ratio_to_f64};
use crate::stats::chi_square_uniform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyOptions {
    /// Largest group order that is enumerated.
    pub max_order: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_order: crate::groups::DEFAULT_ENUM_CAP, seed: 7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} [{:>2}] {}: {} ({:.1}s)", self.id, self.name, self.detail, self.seconds)
    }
}

pub const CHECKS: [(u32, &str); 10] = [
    (1, "oracle-equivalence"),
    (2, "normalization"),
    (3, "explicit-bounds"),
    (4, "gl-lower-bound"),
    (5, "generating-functions"),
    (6, "unipotent-counts"),
    (7, "derangement-masses"),
    (8, "sampler-soundness"),
    (9, "invariant-subspace-inequality"),
    (10, "invariable-trend"),
];

type Verdict = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($arg)*));
        }
    };
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

/// Runs one check by id.
pub fn run_check(id: u32, opts: &VerifyOptions) -> Option<CheckOutcome> {
    let name = CHECKS.iter().find(|(i, _)| *i == id)?.1;
    let start = Instant::now();
    let verdict = match id {
        1 => oracle_equivalence(opts),
        2 => normalization(),
        3 => explicit_bounds(opts),
        4 => gl_lower_bound(),
        5 => generating_functions(),
        6 => unipotent_counts(opts),
        7 => derangement_masses(opts),
        8 => sampler_soundness(opts),
        9 => invariant_subspace_inequality(),
        10 => invariable_trend(opts),
        _ => return None,
    };
    let (passed, detail) = match verdict {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CheckOutcome { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CheckOutcome> {
    CHECKS.iter().filter_map(|(id, _)| run_check(*id, opts)).collect()
}

fn spec(f: Family, n: usize, q: u64) -> GroupSpec {
    GroupSpec { family: f, n, q }
}

/// Concrete groups small enough to enumerate, orthogonal ones listed once
/// per `(n, q)` as `Oplus` (the check covers both form types).
pub fn enumerable_specs(max_order: u64) -> Vec<GroupSpec> {
    use Family::*;
    let mut out = Vec::new();
    let candidates: &[(Family, &[(usize, u64)])] = &[
        (Mat, &[(1, 2), (2, 2), (2, 3), (2, 4), (2, 5), (3, 2), (3, 3), (4, 2)]),
        (GL, &[(1, 2), (2, 2), (2, 3), (2, 4), (2, 5), (2, 7), (2, 8), (2, 9), (3, 2), (3, 3), (4, 2)]),
        (GU, &[(1, 2), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)]),
        (Sp, &[(1, 2), (1, 3), (1, 4), (1, 5), (1, 7), (1, 8), (1, 9), (2, 2), (2, 3)]),
        (Oplus, &[(2, 2), (2, 3), (2, 4), (2, 5), (3, 3), (3, 5), (4, 2), (4, 3), (4, 4), (6, 2)]),
    ];
    for (family, params) in candidates {
        for &(n, q) in params.iter() {
            let s = spec(*family, n, q);
            if members(&s).iter().all(|m| group_order(m).is_ok_and(|o| o <= BigInt::from(max_order))) {
                out.push(s);
            }
        }
    }
    out
}

/// The concrete groups behind a spec: both form types for orthogonal ones.
fn members(s: &GroupSpec) -> Vec<GroupSpec> {
    if s.family.is_orthogonal() {
        vec![spec(Family::Oplus, s.n, s.q), spec(Family::Ominus, s.n, s.q)]
    } else {
        vec![*s]
    }
}

fn all_members(specs: &[GroupSpec]) -> Vec<GroupSpec> {
    specs.iter().flat_map(members).collect()
}

fn oracle_mismatch(s: &GroupSpec) -> std::result::Result<Option<String>, String> {
    let mut empirical: BTreeMap<PolyFq, ExactQ> = BTreeMap::new();
    for m in members(s) {
        let order = group_order(&m).map_err(err)?;
        for (phi, c) in enumerate_charpoly_counts(&m, u64::MAX).map_err(err)? {
            *empirical.entry(phi).or_insert_with(ExactQ::zero) += ratio(c, order.clone());
        }
    }
    let formula = enumerate_charpoly_distribution(s).map_err(err)?;
    let keys: BTreeSet<PolyFq> = empirical.keys().cloned().chain(formula.into_iter().map(|(p, _)| p)).collect();
    for phi in keys {
        let exact = prob(s, &phi).map_err(err)?;
        let seen = empirical.get(&phi).cloned().unwrap_or_else(ExactQ::zero);
        if exact != seen {
            return Ok(Some(format!("{s} at {}: formula {exact}, enumeration {seen}", phi.to_text())));
        }
    }
    Ok(None)
}

const NAMED_GROUPS: [(Family, usize, u64); 10] = [
    (Family::GL, 4, 2),
    (Family::GL, 2, 3),
    (Family::GU, 2, 2),
    (Family::GU, 3, 2),
    (Family::Sp, 1, 3),
    (Family::Sp, 2, 2),
    (Family::Sp, 2, 3),
    (Family::Oplus, 2, 3),
    (Family::Oplus, 4, 2),
    (Family::Oplus, 3, 3),
];

fn oracle_equivalence(opts: &VerifyOptions) -> Verdict {
    let specs = enumerable_specs(opts.max_order);
    for (f, n, q) in NAMED_GROUPS {
        let s = spec(f, n, q);
        let small = members(&s).iter().all(|m| group_order(m).is_ok_and(|o| o <= BigInt::from(opts.max_order)));
        ensure!(!small || specs.contains(&s), "{s} is missing from the enumerated set");
    }
    let mismatches: Vec<String> = specs
        .par_iter()
        .map(oracle_mismatch)
        .collect::<std::result::Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    ensure!(mismatches.is_empty(), "{}", mismatches.join("; "));
    let groups = all_members(&specs).len();
    if opts.max_order >= crate::groups::DEFAULT_ENUM_CAP {
        ensure!(groups >= 12, "only {groups} groups enumerated");
    }
    Ok(format!("{groups} groups, every characteristic polynomial equal"))
}

fn normalization() -> Verdict {
    let mut specs = Vec::new();
    for q in [2, 3, 4] {
        specs.extend((1..=6).map(|n| spec(Family::GL, n, q)));
    }
    for q in [2, 3] {
        specs.extend((1..=4).map(|n| spec(Family::Mat, n, q)));
        specs.extend((1..=3).map(|n| spec(Family::GU, n, q)));
        specs.extend((1..=3).map(|n| spec(Family::Sp, n, q)));
    }
    specs.extend((2..=4).map(|n| spec(Family::Oplus, n, 3)));
    let totals: Vec<(GroupSpec, ExactQ)> = specs
        .par_iter()
        .map(|s| {
            let total: ExactQ = enumerate_charpoly_distribution(s)?.into_iter().map(|(_, p)| p).sum();
            Ok((*s, total))
        })
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    for (s, total) in &totals {
        let expected = if s.family.is_orthogonal() { ExactQ::from_integer(2.into()) } else { ExactQ::one() };
        ensure!(*total == expected, "{s}: sum {total}, expected {expected}");
    }
    Ok(format!("{} specs sum exactly to 1 (2 for the orthogonal sum)", totals.len()))
}

fn explicit_bounds(opts: &VerifyOptions) -> Verdict {
    let mut specs: Vec<GroupSpec> =
        all_members(&enumerable_specs(opts.max_order)).into_iter().filter(|s| s.family != Family::Mat).collect();
    for q in [2, 3] {
        for n in 1..=40 {
            specs.push(spec(Family::GL, n, q));
            specs.push(spec(Family::Sp, n, q));
        }
    }
    let reports = specs.par_iter().map(bound_report).collect::<crate::Result<Vec<_>>>().map_err(err)?;
    let mut worst = f64::INFINITY;
    for r in &reports {
        let max = r.max_exact.as_ref().ok_or_else(|| format!("{}: no exact maximum", r.spec))?;
        ensure!(*max <= r.bound, "{}: max {} exceeds bound {}", r.spec, ratio_to_f64(max), ratio_to_f64(&r.bound));
        worst = worst.min(ratio_to_f64(&r.bound) / ratio_to_f64(max));
    }
    Ok(format!("{} specs, smallest bound/max ratio {worst:.3}", reports.len()))
}

fn gl_lower_bound() -> Verdict {
    for q in [2u64, 3] {
        let ctx = crate::field::gf(q).map_err(err)?;
        for n in 1..=5 {
            let min = min_probability_gl(n, q).map_err(err)?;
            let target = ratio(BigInt::one(), num_traits::pow(BigInt::from(q), n) - 1);
            ensure!(min == target, "GL({n},{q}): minimum {min}, expected {target}");
            let irr = PolyFq::monic_of_degree(&ctx, n)
                .find(|f| f.is_irreducible() && !f.constant_term().is_zero())
                .ok_or_else(|| format!("no irreducible of degree {n} over F_{q}"))?;
            ensure!(prob_gl(n, q, &irr).map_err(err)? == target, "GL({n},{q}): minimum not attained");
        }
    }
    let mut identities = 0;
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        for n in 1..=12 {
            let lb = lower_bound_gl(n, q).map_err(err)?;
            let qn = num_traits::pow(BigInt::from(q), n) - 1;
            ensure!(&lb.element_count * &qn == order_gl(n, q), "GL({n},{q}): order identity fails");
            identities += 1;
        }
    }
    Ok(format!("minimum attained for n ≤ 5, q ≤ 3; {identities} order identities"))
}

fn generating_functions() -> Verdict {
    for q in 2..=5 {
        gf_plain(q, 30).map_err(err)?;
    }
    for q in [2, 3] {
        gf_unitary(q, 16).map_err(err)?;
        gf_star(q, 16, star_linear_exponent(q)).map_err(err)?;
    }
    let mut steps = 0;
    for q in [2, 3] {
        for b in [2, 3, 5] {
            for s in majorization_steps(q, b, 40).map_err(err)? {
                ensure!(s.holds(), "q={q} b={b}: {} fails at degree {:?}", s.label, s.failure);
                steps += 1;
            }
        }
    }
    Ok(format!("identities exact; {steps} domination steps hold to degree 40"))
}

fn unipotent_counts(opts: &VerifyOptions) -> Verdict {
    let ctx2 = crate::field::gf(2).map_err(err)?;
    let mut checked = Vec::new();
    for m in 1..=3 {
        for plus in [true, false] {
            let s = spec(if plus { Family::Oplus } else { Family::Ominus }, 2 * m, 2);
            if group_order(&s).map_err(err)? > BigInt::from(opts.max_order) {
                continue;
            }
            let unip = PolyFq::from_ints(&ctx2, &[1, 1]).pow(2 * m as u32);
            let counted = enumerate_charpoly_counts(&s, u64::MAX).map_err(err)?.remove(&unip).unwrap_or_default();
            let formula = unipotent_count_o_even(m, 2, plus).map_err(err)?;
            ensure!(counted == formula, "{s}: formula {formula}, enumeration {counted}");
            checked.push(s.to_string());
        }
    }
    for (n, q) in [(1, 2), (1, 3), (1, 4), (1, 5), (1, 7), (1, 8), (1, 9), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)] {
        let s = spec(Family::Sp, n, q);
        let ctx = s.field().map_err(err)?;
        let unip = PolyFq::from_ints(&ctx, &[-1, 1]).pow(2 * n as u32);
        let steinberg = num_traits::pow(BigInt::from(q), 2 * n * n);
        let order = order_sp(n, q);
        ensure!(
            prob_sp(n, q, &unip).map_err(err)? == ratio(steinberg.clone(), order.clone()),
            "{s}: Steinberg mismatch"
        );
        if order <= BigInt::from(opts.max_order) {
            let counted = enumerate_charpoly_counts(&s, u64::MAX).map_err(err)?.remove(&unip).unwrap_or_default();
            ensure!(counted == steinberg, "{s}: enumeration {counted}, Steinberg {steinberg}");
        }
        checked.push(s.to_string());
    }
    Ok(checked.join(", ").to_string())
}

fn conditions_for(family: Family) -> Vec<SubgroupCondition> {
    use ConditionKind::*;
    let c = |k, b| SubgroupCondition::new(k, b).expect("valid condition");
    let mut out = vec![SubgroupCondition::trivial()];
    match family {
        Family::GL => out.extend([c(ExtFieldGL, Some(2)), c(ExtFieldGL, Some(3))]),
        Family::GU => out.push(c(ExtFieldGU, Some(3))),
        Family::Sp => out.extend([c(ExtFieldSp, Some(3)), c(ExtFieldSp2, None), c(UnitaryInSp, None)]),
        Family::Oplus | Family::Ominus => out.extend([c(UnitaryInO, None), c(ExtFieldSp, Some(3))]),
        Family::Mat => {}
    }
    out
}

fn derangement_masses(opts: &VerifyOptions) -> Verdict {
    let specs: Vec<GroupSpec> =
        all_members(&enumerable_specs(opts.max_order)).into_iter().filter(|s| s.family != Family::Mat).collect();
    let cases: Vec<(GroupSpec, SubgroupCondition)> =
        specs.iter().flat_map(|s| conditions_for(s.family).into_iter().map(move |c| (*s, c))).collect();
    let bad: Vec<String> = cases
        .par_iter()
        .map(|(s, c)| {
            let exact = exact_condition_prob(s, c)?;
            let seen = enumerated_condition_prob(s, c, u64::MAX)?;
            Ok((exact != seen).then(|| format!("{s} {c}: exact {exact}, enumeration {seen}")))
        })
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?
        .into_iter()
        .flatten()
        .collect();
    ensure!(bad.is_empty(), "{}", bad.join("; "));
    let gl = decay_trend(Family::GL, 2, 2, &[4, 8, 16, 32, 64]).map_err(err)?;
    let sp = decay_trend(Family::Sp, 3, 2, &[2, 4, 8, 16]).map_err(err)?;
    let show = |t: &crate::derange::DecayTrend| {
        t.rows.iter().map(|r| format!("{:.3e}", r.raw_f64)).collect::<Vec<_>>().join(" > ")
    };
    ensure!(gl.raw_strictly_decreasing, "GL q=2 b=2 masses not decreasing: {}", show(&gl));
    ensure!(sp.raw_strictly_decreasing, "Sp q=3 b=2 masses not decreasing: {}", show(&sp));
    Ok(format!("{} (spec, condition) pairs exact; GL {}; Sp {}", cases.len(), show(&gl), show(&sp)))
}

fn sampler_soundness(opts: &VerifyOptions) -> Verdict {
    use Family::*;
    const SAMPLES: u64 = 10_000;
    let form_specs = [
        spec(Sp, 1, 3),
        spec(Sp, 2, 3),
        spec(Sp, 3, 2),
        spec(Sp, 2, 5),
        spec(GU, 2, 2),
        spec(GU, 3, 3),
        spec(GU, 4, 2),
        spec(Oplus, 4, 3),
        spec(Ominus, 4, 3),
        spec(Oplus, 5, 3),
        spec(Oplus, 6, 2),
        spec(Ominus, 6, 2),
        spec(Ominus, 6, 5),
    ];
    let failures = form_specs
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let form = s.form()?.expect("classical groups carry a form");
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(i as u64);
            let mut bad = 0u64;
            for _ in 0..SAMPLES {
                if !preserves_form(&sample_with(s, &mut rng)?, &form)? {
                    bad += 1;
                }
            }
            Ok((*s, bad))
        })
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    for (s, bad) in &failures {
        ensure!(*bad == 0, "{s}: {bad} of {SAMPLES} samples break the form");
    }
    let mut chi = Vec::new();
    for s in [spec(GU, 2, 2), spec(Sp, 2, 3)] {
        let elements = enumerate_group(&s, u64::MAX).map_err(err)?;
        let index: HashMap<_, usize> = elements.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut counts = vec![0u64; elements.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..100_000 {
            let m = sample_with(&s, &mut rng).map_err(err)?;
            let i = index.get(&m).ok_or_else(|| format!("{s}: sample outside the enumerated group"))?;
            counts[*i] += 1;
        }
        let test = chi_square_uniform(&counts);
        ensure!(test.p_value > 0.001, "{s}: chi-square p = {:.2e}", test.p_value);
        chi.push(format!("{s} p={:.3}", test.p_value));
    }
    let mut rates = Vec::new();
    for (n, q) in [(4usize, 2u64), (3, 3), (2, 5)] {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let accepted = 20_000u64;
        let mut drawn = 0u64;
        for _ in 0..accepted {
            drawn += sample_gl_counted(n, q, &mut rng).map_err(err)?.1;
        }
        let p: f64 = (1..=n).map(|i| 1.0 - (q as f64).powi(-(i as i32))).product();
        let observed = accepted as f64 / drawn as f64;
        let sigma = (p * (1.0 - p) / drawn as f64).sqrt();
        ensure!(
            (observed - p).abs() <= 3.0 * sigma,
            "GL({n},{q}): acceptance {observed:.4}, expected {p:.4} ± {sigma:.4}"
        );
        rates.push(format!("GL({n},{q}) {observed:.4}/{p:.4}"));
    }
    Ok(format!(
        "{} specs × {SAMPLES} form-preserving; {}; acceptance {}",
        form_specs.len(),
        chi.join(", "),
        rates.join(", ")
    ))
}

fn invariant_subspace_inequality() -> Verdict {
    let grid: Vec<(usize, u64, usize)> =
        (2..=12).flat_map(|n| [2u64, 3].into_iter().flat_map(move |q| (1..n).map(move |e| (n, q, e)))).collect();
    let checks = grid
        .par_iter()
        .map(|&(n, q, e)| check_strict_inequality(n, q, e))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(err)?;
    for c in &checks {
        ensure!(c.holds, "n={} q={} e={}: GL {} not below Sym {}", c.n, c.q, c.e, c.gl, c.sym);
    }
    Ok(format!("{} grid points strict", checks.len()))
}

fn invariable_trend(opts: &VerifyOptions) -> Verdict {
    let mut trend = Vec::new();
    for n in [10, 50, 100, 200] {
        trend.push(mc_invariable(n, 3, 100_000, opts.seed, 0.99).map_err(err)?.estimate);
    }
    for w in trend.windows(2) {
        let slack = 3.0 * (w[0].std_error().powi(2) + w[1].std_error().powi(2)).sqrt();
        ensure!(
            w[1].estimate <= w[0].estimate + slack,
            "r=3 estimates rise: {:.4} then {:.4}",
            w[0].estimate,
            w[1].estimate
        );
    }
    let mut covered = 0;
    for n in [3, 4, 5, 6, 8] {
        for r in [1, 2] {
            let exact = ratio_to_f64(&exact_invariable_sym(n, r).map_err(err)?);
            let est = mc_invariable(n, r, 20_000, opts.seed, 0.99).map_err(err)?.estimate;
            ensure!(est.covers(exact), "S_{n} r={r}: exact {exact:.4} outside [{:.4}, {:.4}]", est.ci_low, est.ci_high);
            covered += 1;
        }
    }
    for r in [1, 2] {
        let exact = ratio_to_f64(&exact_invariable_gl(3, 2, r).map_err(err)?);
        let est = mc_invariable_gl(3, 2, r, 10_000, opts.seed, 0.99).map_err(err)?.estimate;
        ensure!(est.covers(exact), "GL(3,2) r={r}: exact {exact:.4} outside [{:.4}, {:.4}]", est.ci_low, est.ci_high);
        covered += 1;
    }
    let shown: Vec<String> = trend.iter().map(|p| format!("{:.4}", p.estimate)).collect();
    Ok(format!("r=3 at n=10,50,100,200: {}; {covered} small cases covered", shown.join(", ")))
}
