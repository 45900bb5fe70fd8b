//! Characteristic-polynomial conditions for lying in an extension field
//! subgroup (or a unitary subgroup of a symplectic or orthogonal group),
//! and the exact and sampled proportion of elements meeting them.
//!
//! Only the necessary condition read off the characteristic polynomial is
//! modelled: every irreducible factor has degree divisible by `b` or
//! multiplicity divisible by `b`. Masses are therefore upper bounds for the
//! proportion of elements in a conjugate of the subgroup itself. Elements of
//! the outer coset `H.b \ H` are not modelled; their contribution is
//! reported as a separate zero term.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, prime_factors};
use crate::charpoly_dist::{class_count, class_mass, enumerate_charpoly_counts, ExactQ, SlotClass};
use crate::error::{Error, Result};
use crate::factor::{factor, Factorization};
use crate::field::FieldCtx;
use crate::groups::{group_order, sample_with, Family, GroupSpec, DEFAULT_ENUM_CAP};
use crate::matrix::{char_poly, Matrix};
use crate::poly::PolyFq;
use crate::series::{ratio_to_f64, DEFAULT_TRUNCATION};
use crate::stats::{parallel_successes, wilson, Proportion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConditionKind {
    /// `GL(n/b, q^b).b` in `GL(n, q)`.
    ExtFieldGL,
    /// `GU(n/b, q^b).b` in `GU(n, q)`, `b` odd.
    ExtFieldGU,
    /// `Sp(2n/b, q^b).b` in `Sp(2n, q)`, `b` odd.
    ExtFieldSp,
    /// `Sp(n, q²).2` in `Sp(2n, q)`.
    ExtFieldSp2,
    /// `GU(n, q).2` in `Sp(2n, q)`.
    UnitaryInSp,
    /// `U(n, q).2` in `O±(2n, q)`.
    UnitaryInO,
    /// Every characteristic polynomial passes.
    Trivial,
}

impl ConditionKind {
    pub const ALL: [ConditionKind; 7] = [
        ConditionKind::ExtFieldGL,
        ConditionKind::ExtFieldGU,
        ConditionKind::ExtFieldSp,
        ConditionKind::ExtFieldSp2,
        ConditionKind::UnitaryInSp,
        ConditionKind::UnitaryInO,
        ConditionKind::Trivial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::ExtFieldGL => "ext-gl",
            ConditionKind::ExtFieldGU => "ext-gu",
            ConditionKind::ExtFieldSp => "ext-sp",
            ConditionKind::ExtFieldSp2 => "ext-sp2",
            ConditionKind::UnitaryInSp => "unitary-in-sp",
            ConditionKind::UnitaryInO => "unitary-in-o",
            ConditionKind::Trivial => "trivial",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubgroupCondition {
    pub kind: ConditionKind,
    /// The prime `b`; 2 for the index-two kinds, 1 for `Trivial`.
    pub b: usize,
}

impl SubgroupCondition {
    pub fn new(kind: ConditionKind, b: Option<usize>) -> Result<SubgroupCondition> {
        let fixed = match kind {
            ConditionKind::ExtFieldSp2 | ConditionKind::UnitaryInSp | ConditionKind::UnitaryInO => Some(2),
            ConditionKind::Trivial => Some(1),
            _ => None,
        };
        let b = match (fixed, b) {
            (Some(f), None) => f,
            (Some(f), Some(x)) if x == f => f,
            (Some(f), Some(x)) => {
                return Err(Error::InvalidSpec(format!("condition {} has b = {f}, got {x}", kind.name())))
            }
            (None, Some(x)) => x,
            (None, None) => return Err(Error::InvalidSpec(format!("condition {} needs a prime b", kind.name()))),
        };
        if kind != ConditionKind::Trivial && !is_prime(b as u64) {
            return Err(Error::InvalidSpec(format!("b = {b} is not prime")));
        }
        if kind == ConditionKind::ExtFieldGU && b == 2 {
            return Err(Error::InvalidSpec("ext-gu needs an odd prime b: there is no embedding if b=2".into()));
        }
        if kind == ConditionKind::ExtFieldSp && b == 2 {
            return Err(Error::InvalidSpec("ext-sp needs an odd prime b (use ext-sp2 for b = 2)".into()));
        }
        Ok(SubgroupCondition { kind, b })
    }

    pub fn parse(kind: &str, b: Option<usize>) -> Result<SubgroupCondition> {
        let lower = kind.to_ascii_lowercase();
        let kind = ConditionKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::Parse(format!("unknown condition '{kind}'")))?;
        SubgroupCondition::new(kind, b)
    }

    pub fn trivial() -> SubgroupCondition {
        SubgroupCondition { kind: ConditionKind::Trivial, b: 1 }
    }

    /// Whether a factor of degree `d` with multiplicity `j` is allowed.
    pub fn allows(&self, d: usize, j: u32) -> bool {
        self.kind == ConditionKind::Trivial || d.is_multiple_of(self.b) || (j as usize).is_multiple_of(self.b)
    }

    fn applies_to(&self, family: Family) -> bool {
        use ConditionKind::*;
        match self.kind {
            Trivial => true,
            ExtFieldGL => family == Family::GL,
            ExtFieldGU => family == Family::GU,
            ExtFieldSp | ExtFieldSp2 => family == Family::Sp || family.is_orthogonal(),
            UnitaryInSp => family == Family::Sp,
            UnitaryInO => family.is_orthogonal(),
        }
    }

    fn check(&self, spec: &GroupSpec) -> Result<()> {
        if self.applies_to(spec.family) {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("condition {self} does not apply to {spec}")))
        }
    }
}

impl fmt::Display for SubgroupCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ConditionKind::ExtFieldGL | ConditionKind::ExtFieldGU | ConditionKind::ExtFieldSp => {
                write!(f, "{}(b={})", self.kind.name(), self.b)
            }
            _ => f.write_str(self.kind.name()),
        }
    }
}

/// The natural condition for `family` and the prime `b`.
pub fn condition_for(family: Family, b: usize) -> Result<SubgroupCondition> {
    let kind = match family {
        Family::GL => ConditionKind::ExtFieldGL,
        Family::GU => ConditionKind::ExtFieldGU,
        Family::Sp if b == 2 => ConditionKind::ExtFieldSp2,
        Family::Sp => ConditionKind::ExtFieldSp,
        Family::Oplus | Family::Ominus if b == 2 => ConditionKind::UnitaryInO,
        Family::Oplus | Family::Ominus => ConditionKind::ExtFieldSp,
        Family::Mat => return Err(Error::Unsupported("no subgroup condition for Mat".into())),
    };
    let b = if matches!(kind, ConditionKind::ExtFieldSp2 | ConditionKind::UnitaryInO) { None } else { Some(b) };
    SubgroupCondition::new(kind, b)
}

/// Degrees and multiplicities of the distinct irreducible factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegMultProfile {
    pub entries: Vec<(usize, u32)>,
}

impl DegMultProfile {
    pub fn new(mut entries: Vec<(usize, u32)>) -> Result<DegMultProfile> {
        if entries.iter().any(|&(d, j)| d == 0 || j == 0) {
            return Err(Error::OutOfRange("profile degrees and multiplicities must be positive".into()));
        }
        entries.sort_unstable();
        Ok(DegMultProfile { entries })
    }

    pub fn from_factorization(f: &Factorization) -> DegMultProfile {
        let mut entries = f.profile();
        entries.sort_unstable();
        DegMultProfile { entries }
    }

    pub fn of_poly(f: &PolyFq) -> Result<DegMultProfile> {
        Ok(DegMultProfile::from_factorization(&factor(f)?))
    }

    pub fn dimension(&self) -> usize {
        self.entries.iter().map(|&(d, j)| d * j as usize).sum()
    }
}

pub fn satisfies_condition(profile: &DegMultProfile, cond: &SubgroupCondition) -> bool {
    profile.entries.iter().all(|&(d, j)| cond.allows(d, j))
}

fn class_keep(cond: SubgroupCondition) -> impl Fn(&SlotClass, u32) -> bool {
    move |c: &SlotClass, j: u32| cond.allows(c.degree, j * c.mult_scale)
}

fn check_series_cap(spec: &GroupSpec, cap: usize) -> Result<()> {
    if spec.n > cap {
        return Err(Error::CapExceeded(format!("n = {} exceeds the series cap {cap}", spec.n)));
    }
    Ok(())
}

/// Number of characteristic polynomials meeting `cond`. For the orthogonal
/// families this counts polynomials realizable in `O+(n,q)` or `O-(n,q)`.
pub fn count_condition_polys(spec: &GroupSpec, cond: &SubgroupCondition) -> Result<BigInt> {
    count_condition_polys_capped(spec, cond, DEFAULT_TRUNCATION)
}

pub fn count_condition_polys_capped(spec: &GroupSpec, cond: &SubgroupCondition, cap: usize) -> Result<BigInt> {
    cond.check(spec)?;
    check_series_cap(spec, cap)?;
    class_count(spec, class_keep(*cond))
}

/// Exact proportion of elements of the group whose characteristic
/// polynomial meets `cond`. Orthogonal groups are handled by enumeration.
pub fn exact_condition_prob(spec: &GroupSpec, cond: &SubgroupCondition) -> Result<ExactQ> {
    exact_condition_prob_capped(spec, cond, DEFAULT_TRUNCATION)
}

pub fn exact_condition_prob_capped(spec: &GroupSpec, cond: &SubgroupCondition, cap: usize) -> Result<ExactQ> {
    cond.check(spec)?;
    if spec.family.is_orthogonal() {
        return enumerated_condition_prob(spec, cond, DEFAULT_ENUM_CAP);
    }
    check_series_cap(spec, cap)?;
    class_mass(spec, class_keep(*cond))
}

/// `Σ` of the masses in `O+(n,q)` and `O-(n,q)` (so the trivial condition gives 2).
pub fn exact_condition_mass_o_sum(n: usize, q: u64, cond: &SubgroupCondition) -> Result<ExactQ> {
    let spec = GroupSpec::new(Family::Oplus, n, q)?;
    cond.check(&spec)?;
    check_series_cap(&spec, DEFAULT_TRUNCATION)?;
    class_mass(&spec, class_keep(*cond))
}

/// Fraction of the enumerated group meeting `cond`.
pub fn enumerated_condition_prob(spec: &GroupSpec, cond: &SubgroupCondition, cap: u64) -> Result<ExactQ> {
    cond.check(spec)?;
    let counts = enumerate_charpoly_counts(spec, cap)?;
    let mut hit = BigInt::zero();
    for (phi, c) in &counts {
        if satisfies_condition(&DegMultProfile::of_poly(phi)?, cond) {
            hit += c;
        }
    }
    Ok(ExactQ::new(hit, group_order(spec)?))
}

/// Whether the characteristic polynomial of `m` meets `cond`.
pub fn matrix_meets(ctx: &Arc<FieldCtx>, m: &Matrix, cond: &SubgroupCondition) -> Result<bool> {
    let phi = char_poly(ctx, m)?;
    Ok(satisfies_condition(&DegMultProfile::of_poly(&phi)?, cond))
}

/// Monte Carlo estimate with a Wilson interval at `confidence`; see
/// [`parallel_successes`] for the seeding scheme.
pub fn mc_condition_prob(
    spec: &GroupSpec,
    cond: &SubgroupCondition,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<Proportion> {
    cond.check(spec)?;
    let ctx = spec.field()?;
    let hits = parallel_successes(trials, seed, |rng| {
        let m = sample_with(spec, rng)?;
        matrix_meets(&ctx, &m, cond)
    })?;
    Ok(wilson(hits, trials, confidence))
}

/// The normalizing factor `N(n)` such that the mass times `N(n)` should stay
/// bounded: `n^{1/2}/(1+log_q(n+1))^6` for GL, `n^{1/3}/(2+log_q(n+1))` for
/// GU, `n^{1/3}/(log_q(4n)+4)^3` for Sp of rank `n`, and
/// `m^{1/3}/(q (log_q(4m)+4)^3)` for orthogonal groups of dimension `2m`.
pub fn trend_normalizer(family: Family, n: usize, q: u64) -> f64 {
    let lq = |x: f64| x.ln() / (q as f64).ln();
    let nf = n as f64;
    match family {
        Family::GL | Family::Mat => nf.sqrt() / (1.0 + lq(nf + 1.0)).powi(6),
        Family::GU => nf.cbrt() / (2.0 + lq(nf + 1.0)),
        Family::Sp => nf.cbrt() / (lq(4.0 * nf) + 4.0).powi(3),
        Family::Oplus | Family::Ominus => {
            let m = nf / 2.0;
            m.cbrt() / (q as f64 * (lq(4.0 * m) + 4.0).powi(3))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendRow {
    pub n: usize,
    #[serde(skip)]
    pub raw: ExactQ,
    pub raw_f64: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayTrend {
    pub family: Family,
    pub q: u64,
    pub condition: SubgroupCondition,
    pub rows: Vec<TrendRow>,
    /// Exact masses strictly decreasing along the list.
    pub raw_strictly_decreasing: bool,
    /// Normalized values nonincreasing over the second half of the list.
    pub tail_nonincreasing: bool,
    pub normalized_max: f64,
}

/// Masses of the natural condition for `(family, b)` along `n_list`. For
/// orthogonal families the mass is the average over `O+` and `O-` (odd `q`).
pub fn decay_trend(family: Family, q: u64, b: usize, n_list: &[usize]) -> Result<DecayTrend> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange("n_list must be strictly increasing".into()));
    }
    let cond = condition_for(family, b)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let raw = if family.is_orthogonal() {
            exact_condition_mass_o_sum(n, q, &cond)? / ExactQ::from_integer(BigInt::from(2))
        } else {
            exact_condition_prob(&GroupSpec::new(family, n, q)?, &cond)?
        };
        let raw_f64 = ratio_to_f64(&raw);
        rows.push(TrendRow { n, raw_f64, normalized: raw_f64 * trend_normalizer(family, n, q), raw });
    }
    let raw_strictly_decreasing = rows.windows(2).all(|w| w[1].raw < w[0].raw);
    let tail = &rows[rows.len() / 2..];
    let tail_nonincreasing = tail.windows(2).all(|w| w[1].normalized <= w[0].normalized);
    let normalized_max = rows.iter().map(|r| r.normalized).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayTrend { family, q, condition: cond, rows, raw_strictly_decreasing, tail_nonincreasing, normalized_max })
}

/// `Σ_{b | n prime}` of the natural condition masses (GU skips `b = 2`).
pub fn union_condition_mass(family: Family, n: usize, q: u64) -> Result<ExactQ> {
    let mut total = ExactQ::zero();
    for b in prime_factors(n as u64) {
        let b = b.to_usize().expect("prime factor fits usize");
        if family == Family::GU && b == 2 {
            continue;
        }
        let cond = condition_for(family, b)?;
        total += if family.is_orthogonal() {
            exact_condition_mass_o_sum(n, q, &cond)? / ExactQ::from_integer(BigInt::from(2))
        } else {
            exact_condition_prob(&GroupSpec::new(family, n, q)?, &cond)?
        };
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(b: usize) -> SubgroupCondition {
        SubgroupCondition::new(ConditionKind::ExtFieldGL, Some(b)).unwrap()
    }

    #[test]
    fn profile_examples() {
        let c = ext(2);
        assert!(satisfies_condition(&DegMultProfile::new(vec![(2, 1)]).unwrap(), &c));
        assert!(!satisfies_condition(&DegMultProfile::new(vec![(1, 1), (1, 1)]).unwrap(), &c));
        assert!(satisfies_condition(&DegMultProfile::new(vec![(1, 2)]).unwrap(), &c));
        assert!(DegMultProfile::new(vec![(0, 1)]).is_err());
    }

    #[test]
    fn condition_validation() {
        assert!(SubgroupCondition::new(ConditionKind::ExtFieldGU, Some(2)).is_err());
        assert!(SubgroupCondition::new(ConditionKind::ExtFieldGL, Some(4)).is_err());
        assert!(SubgroupCondition::new(ConditionKind::ExtFieldGL, None).is_err());
        assert!(SubgroupCondition::new(ConditionKind::UnitaryInO, Some(3)).is_err());
        assert_eq!(SubgroupCondition::parse("ext-sp2", None).unwrap().b, 2);
        let gl = GroupSpec::new(Family::GL, 2, 2).unwrap();
        assert!(exact_condition_prob(&gl, &SubgroupCondition::parse("unitary-in-sp", None).unwrap()).is_err());
    }

    #[test]
    fn small_counts() {
        let gl22 = GroupSpec::new(Family::GL, 2, 2).unwrap();
        assert_eq!(count_condition_polys(&gl22, &ext(2)).unwrap(), BigInt::from(2));
        let gl32 = GroupSpec::new(Family::GL, 3, 2).unwrap();
        assert_eq!(count_condition_polys(&gl32, &ext(3)).unwrap(), BigInt::from(3));
    }

    #[test]
    fn gl22_is_full() {
        let gl22 = GroupSpec::new(Family::GL, 2, 2).unwrap();
        assert_eq!(exact_condition_prob(&gl22, &ext(2)).unwrap(), ExactQ::from_integer(BigInt::from(1)));
    }

    #[test]
    fn cap_is_enforced() {
        let big = GroupSpec::new(Family::GL, 65, 2).unwrap();
        assert!(matches!(exact_condition_prob(&big, &ext(5)), Err(Error::CapExceeded(_))));
    }
}
