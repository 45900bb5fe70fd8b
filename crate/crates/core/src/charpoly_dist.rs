//! Exact probability that a uniform element of a classical group has a
//! given characteristic polynomial, the enumerated oracle it is checked
//! against, and a class-level model of the distribution used for sums and
//! maxima over all characteristic polynomials.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{big_pow, bigint_pow, binomial_big};
use crate::counting::{count_N, count_star, count_unitary};
use crate::error::{Error, Result};
use crate::factor::{factor, Factorization};
use crate::field::FieldElem;
use crate::groups::{for_each_element, group_order, order_o, Family, GroupSpec, DEFAULT_ENUM_CAP};
use crate::matrix::char_poly;
use crate::poly::{ConjFlavor, PolyFq};

pub type ExactQ = BigRational;

/// Largest number of candidate polynomials `enumerate_charpoly_distribution` will scan.
pub const MAX_CANDIDATES: u64 = 1_000_000;

pub fn ratio(num: BigInt, den: BigInt) -> ExactQ {
    BigRational::new(num, den)
}

/// `Q^{j(j-1)} / |GL(j, Q)|`.
pub fn gl_weight(j: u32, big_q: &BigInt) -> ExactQ {
    let mut den = BigInt::one();
    let mut qi = BigInt::one();
    for _ in 1..=j {
        qi *= big_q;
        den *= &qi - 1;
    }
    ratio(bigint_pow(big_q, (j as u64) * (j as u64).saturating_sub(1) / 2), den)
}

/// `Q^{j(j-1)} / |GU(j, Q)|`.
pub fn gu_weight(j: u32, big_q: &BigInt) -> ExactQ {
    let mut den = BigInt::one();
    let mut qi = BigInt::one();
    for i in 1..=j {
        qi *= big_q;
        den *= if i % 2 == 0 { &qi - 1 } else { &qi + 1 };
    }
    ratio(bigint_pow(big_q, (j as u64) * (j as u64).saturating_sub(1) / 2), den)
}

/// `q^{2a²} / |Sp(2a, q)|`.
pub fn sp_weight(a: u32, q: u64) -> ExactQ {
    let mut den = BigInt::one();
    for i in 1..=a as u64 {
        den *= big_pow(q, 2 * i) - 1;
    }
    ratio(big_pow(q, (a as u64) * (a as u64)), den)
}

/// `F(m)`: `q^{m²/2}/|Sp(m,q)|` for even `m`, `F(m-1)` for odd `m`.
pub fn o_weight(m: u32, q: u64) -> ExactQ {
    sp_weight(m / 2, q)
}

/// Why a polynomial can or cannot be a characteristic polynomial in a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realizability {
    Realizable,
    Unrealizable(String),
}

impl Realizability {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Realizability::Realizable)
    }
}

/// Factorization of a self-conjugate polynomial into self-conjugate
/// irreducibles, conjugate pairs and the `z ∓ 1` parts.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub self_conj: Vec<(PolyFq, u32)>,
    /// `(φ, conj φ, j)` with `φ < conj φ`.
    pub pairs: Vec<(PolyFq, PolyFq, u32)>,
    /// Multiplicity of `z - 1` (star conjugation only).
    pub a: u32,
    /// Multiplicity of `z + 1` (star conjugation, odd `q` only).
    pub b: u32,
}

#[derive(Clone, Debug)]
pub struct CharPolyClass {
    pub spec: GroupSpec,
    pub phi: PolyFq,
    pub fact: Factorization,
    /// Present for GU, Sp and O when the polynomial is self-conjugate.
    pub decomposition: Option<Decomposition>,
}

impl CharPolyClass {
    pub fn new(spec: &GroupSpec, phi: &PolyFq) -> Result<CharPolyClass> {
        spec.validate()?;
        let ctx = spec.field()?;
        if !phi.ctx().same(&ctx) {
            return Err(Error::IncompatibleContexts);
        }
        if phi.is_zero() || phi.deg() != spec.dim() {
            return Err(Error::DegreeMismatch { expected: spec.dim(), got: phi.deg() });
        }
        if !phi.is_monic() {
            return Err(Error::NotMonic);
        }
        let fact = factor(phi)?;
        let flavor = match spec.family {
            Family::Mat | Family::GL => None,
            Family::GU => Some(ConjFlavor::Tilde),
            _ => Some(ConjFlavor::Star),
        };
        let decomposition = match flavor {
            Some(fl) if !phi.constant_term().is_zero() && phi.is_self_conjugate(fl)? => Some(decompose(&fact, fl)?),
            _ => None,
        };
        Ok(CharPolyClass { spec: *spec, phi: phi.clone(), fact, decomposition })
    }
}

fn decompose(fact: &Factorization, flavor: ConjFlavor) -> Result<Decomposition> {
    let mut d = Decomposition::default();
    for (f, j) in &fact.factors {
        let ctx = f.ctx();
        if flavor == ConjFlavor::Star && f.deg() == 1 {
            let root = ctx.neg(f.constant_term());
            if root == FieldElem::ONE {
                d.a = *j;
                continue;
            }
            if root == ctx.neg(FieldElem::ONE) {
                d.b = *j;
                continue;
            }
        }
        let g = f.conj(flavor)?;
        if g == *f {
            d.self_conj.push((f.clone(), *j));
        } else if *f < g {
            d.pairs.push((f.clone(), g, *j));
        }
    }
    Ok(d)
}

pub fn is_realizable(spec: &GroupSpec, phi: &PolyFq) -> Result<Realizability> {
    let class = CharPolyClass::new(spec, phi)?;
    Ok(realizability(&class))
}

fn realizability(class: &CharPolyClass) -> Realizability {
    use Realizability::*;
    let spec = &class.spec;
    if spec.family == Family::Mat {
        return Realizable;
    }
    if class.phi.constant_term().is_zero() {
        return Unrealizable("zero constant term: singular".into());
    }
    let Some(d) = &class.decomposition else {
        return match spec.family {
            Family::GL => Realizable,
            Family::GU => Unrealizable("not self-conjugate under f ↦ f̃".into()),
            _ => Unrealizable("not self-conjugate under f ↦ f*".into()),
        };
    };
    let symplectic_like = spec.family == Family::Sp || (spec.family.is_orthogonal() && !spec.odd_char());
    if symplectic_like && d.a % 2 == 1 {
        return Unrealizable("odd multiplicity of z - 1".into());
    }
    if spec.family == Family::Sp && d.b % 2 == 1 {
        return Unrealizable("odd multiplicity of z + 1".into());
    }
    Realizable
}

/// Proportion of `GL(n, q)` with characteristic polynomial `phi`.
pub fn prob_gl(n: usize, q: u64, phi: &PolyFq) -> Result<ExactQ> {
    prob(&GroupSpec::new(Family::GL, n, q)?, phi)
}

/// Proportion of all `n × n` matrices over `F_q` with characteristic polynomial `phi`.
pub fn prob_mat(n: usize, q: u64, phi: &PolyFq) -> Result<ExactQ> {
    prob(&GroupSpec::new(Family::Mat, n, q)?, phi)
}

/// Proportion of `GU(n, q)`; `phi` has coefficients in `F_{q²}`.
pub fn prob_gu(n: usize, q: u64, phi: &PolyFq) -> Result<ExactQ> {
    prob(&GroupSpec::new(Family::GU, n, q)?, phi)
}

/// Proportion of `Sp(2n, q)`; `phi` has degree `2n`.
pub fn prob_sp(n: usize, q: u64, phi: &PolyFq) -> Result<ExactQ> {
    prob(&GroupSpec::new(Family::Sp, n, q)?, phi)
}

/// Sum of the proportions in the two orthogonal groups of dimension `n`.
pub fn prob_o_sum(n: usize, q: u64, phi: &PolyFq) -> Result<ExactQ> {
    prob(&GroupSpec::new(Family::Oplus, n, q)?, phi)
}

/// Exact probability for any family (for `Oplus`/`Ominus` the sum over both types).
pub fn prob(spec: &GroupSpec, phi: &PolyFq) -> Result<ExactQ> {
    let class = CharPolyClass::new(spec, phi)?;
    prob_of_class(&class)
}

pub fn prob_of_class(class: &CharPolyClass) -> Result<ExactQ> {
    if !realizability(class).is_realizable() {
        return Ok(ExactQ::zero());
    }
    let spec = &class.spec;
    let q = spec.q;
    let mut p = ExactQ::one();
    match spec.family {
        Family::GL | Family::Mat => {
            for (f, j) in &class.fact.factors {
                p *= gl_weight(*j, &big_pow(q, f.deg() as u64));
            }
            if spec.family == Family::Mat {
                p *= mat_prefactor(spec.n, q);
            }
        }
        Family::GU => {
            let d = class.decomposition.as_ref().expect("realizable");
            for (f, j) in &d.self_conj {
                p *= gu_weight(*j, &big_pow(q, f.deg() as u64));
            }
            for (f, _, j) in &d.pairs {
                p *= gl_weight(*j, &big_pow(q, 2 * f.deg() as u64));
            }
        }
        Family::Sp => {
            let d = class.decomposition.as_ref().expect("realizable");
            p *= sp_weight(d.a / 2, q) * sp_weight(d.b / 2, q);
            p *= star_factor_product(d, q);
        }
        Family::Oplus | Family::Ominus if spec.odd_char() => {
            let d = class.decomposition.as_ref().expect("realizable");
            p *= o_weight(d.a, q) * o_weight(d.b, q);
            p *= star_factor_product(d, q);
        }
        Family::Oplus | Family::Ominus => return prob_o_even(class),
    }
    Ok(p)
}

fn star_factor_product(d: &Decomposition, q: u64) -> ExactQ {
    let mut p = ExactQ::one();
    for (f, j) in &d.self_conj {
        p *= gu_weight(*j, &big_pow(q, f.deg() as u64 / 2));
    }
    for (f, _, j) in &d.pairs {
        p *= gl_weight(*j, &big_pow(q, f.deg() as u64));
    }
    p
}

/// `∏_{i=1}^n (1 - q^{-i})`.
pub fn mat_prefactor(n: usize, q: u64) -> ExactQ {
    let mut p = ExactQ::one();
    for i in 1..=n as u64 {
        let qi = big_pow(q, i);
        p *= ratio(&qi - 1, qi);
    }
    p
}

/// Number of unipotent elements of `O^ε(2n, q)`, `q` even:
/// `q^{2n²-2n+1}(1 + 1/q ∓ 1/q^n)`.
pub fn unipotent_count_o_even(n: usize, q: u64, plus: bool) -> Result<BigInt> {
    if q % 2 == 1 {
        return Err(Error::Unsupported("unipotent count formula is for even q".into()));
    }
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let n = n as u64;
    let lead = big_pow(q, 2 * n * n - 2 * n + 1);
    let value = ratio(lead, BigInt::one())
        * (ExactQ::one() + ratio(BigInt::one(), BigInt::from(q))
            - ratio(BigInt::from(if plus { 1 } else { -1 }), big_pow(q, n)));
    if !value.is_integer() {
        return Err(Error::IdentityViolation { degree: n as usize, detail: format!("non-integral count {value}") });
    }
    Ok(value.to_integer())
}

fn prob_o_even(class: &CharPolyClass) -> Result<ExactQ> {
    let spec = class.spec;
    let dim = spec.n;
    let unipotent = class.phi == PolyFq::from_ints(class.phi.ctx(), &[-1, 1]).pow(dim as u32);
    if unipotent {
        let mut total = ExactQ::zero();
        for plus in [true, false] {
            let count = unipotent_count_o_even(dim / 2, spec.q, plus)?;
            total += ratio(count, order_o(plus, dim, spec.q));
        }
        return Ok(total);
    }
    let mut total = ExactQ::zero();
    for family in [Family::Oplus, Family::Ominus] {
        let s = GroupSpec::new(family, dim, spec.q)?;
        let counts = cached_counts(&s).map_err(|e| match e {
            Error::OrderOverCap { order, cap } => Error::Unsupported(format!(
                "even-characteristic orthogonal probabilities away from the unipotent class need enumeration; |{s}| = {order} exceeds {cap}"
            )),
            other => other,
        })?;
        let c = counts.get(&class.phi).cloned().unwrap_or_default();
        total += ratio(c, group_order(&s)?);
    }
    Ok(total)
}

type Counts = Arc<BTreeMap<PolyFq, BigInt>>;

fn cached_counts(spec: &GroupSpec) -> Result<Counts> {
    static CACHE: OnceLock<Mutex<HashMap<GroupSpec, Counts>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(c) = cache.lock().unwrap().get(spec) {
        return Ok(c.clone());
    }
    let counts = Arc::new(enumerate_charpoly_counts(spec, DEFAULT_ENUM_CAP)?);
    cache.lock().unwrap().insert(*spec, counts.clone());
    Ok(counts)
}

/// Oracle: characteristic polynomial counts over all elements of the group.
pub fn enumerate_charpoly_counts(spec: &GroupSpec, cap: u64) -> Result<BTreeMap<PolyFq, BigInt>> {
    let ctx = spec.field()?;
    let mut counts: BTreeMap<PolyFq, BigInt> = BTreeMap::new();
    let mut failure = None;
    for_each_element(spec, cap, |m| match char_poly(&ctx, m) {
        Ok(cp) => *counts.entry(cp).or_default() += 1,
        Err(e) => failure = Some(e),
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(counts),
    }
}

/// Every realizable characteristic polynomial with its exact probability,
/// in polynomial order. For orthogonal families the values are sums over
/// both form types and total 2.
pub fn enumerate_charpoly_distribution(spec: &GroupSpec) -> Result<Vec<(PolyFq, ExactQ)>> {
    spec.validate()?;
    let ctx = spec.field()?;
    let dim = spec.dim();
    let candidates = (ctx.q() as u64).checked_pow(dim as u32).filter(|&c| c <= MAX_CANDIDATES);
    if candidates.is_none() {
        return Err(Error::CapExceeded(format!(
            "{spec}: {}^{dim} candidate polynomials exceed {MAX_CANDIDATES}",
            ctx.q()
        )));
    }
    let mut out = Vec::new();
    for phi in PolyFq::monic_of_degree(&ctx, dim) {
        let p = prob(spec, &phi)?;
        if !p.is_zero() {
            out.push((phi, p));
        }
    }
    Ok(out)
}

/// How an irreducible (or a conjugate pair) enters the characteristic polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// A single irreducible, GL-type weight over `F_{q^degree}` (also `t` for `Mat`).
    Plain,
    /// `z - 1` or `z + 1` in `Sp` (weight `q^{2a²}/|Sp(2a,q)|`, multiplicity `2a`).
    SpLinear,
    /// `z - 1` or `z + 1` in the orthogonal sum (weight `F(a)`).
    OLinear,
    /// A self-conjugate irreducible with a GU-type weight.
    SelfConj,
    /// A conjugate pair `{φ, conj φ}` with a GL-type weight.
    Pair,
}

/// The weight function of a slot class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightBase {
    /// `Q^{j(j-1)}/|GL(j, Q)|`.
    Gl(BigInt),
    /// `Q^{j(j-1)}/|GU(j, Q)|`.
    Gu(BigInt),
    /// `q^{2j²}/|Sp(2j, q)|`.
    Sp(u64),
    /// `F(j)`.
    OrthF(u64),
}

impl WeightBase {
    pub fn weight(&self, j: u32) -> ExactQ {
        match self {
            WeightBase::Gl(big_q) => gl_weight(j, big_q),
            WeightBase::Gu(big_q) => gu_weight(j, big_q),
            WeightBase::Sp(q) => sp_weight(j, *q),
            WeightBase::OrthF(q) => o_weight(j, *q),
        }
    }
}

/// A set of interchangeable building blocks of the characteristic polynomial:
/// `slots` distinct irreducibles (or conjugate pairs), each member of degree
/// `degree`, whose probability factor depends only on the multiplicity unit `j`.
#[derive(Clone, Debug)]
pub struct SlotClass {
    pub kind: ClassKind,
    /// Degree of each irreducible member.
    pub degree: usize,
    /// 1, or 2 for a conjugate pair.
    pub members: usize,
    /// Multiplicity of each member per unit of `j`.
    pub mult_scale: u32,
    pub slots: BigInt,
    pub base: WeightBase,
}

impl SlotClass {
    /// Dimension consumed by one unit of multiplicity.
    pub fn unit_dim(&self) -> usize {
        self.degree * self.members * self.mult_scale as usize
    }

    /// Probability factor for one member used with `j` units.
    pub fn weight(&self, j: u32) -> ExactQ {
        self.base.weight(j)
    }
}

/// Slot classes covering every realizable characteristic polynomial of a
/// spec, together with the overall prefactor (`∏(1-q^{-i})` for `Mat`).
pub fn slot_classes(spec: &GroupSpec) -> Result<(Vec<SlotClass>, ExactQ)> {
    spec.validate()?;
    let q = spec.q;
    let dim = spec.dim();
    let mut out = Vec::new();
    let mk = |kind, degree, members, mult_scale, slots: BigInt, base| SlotClass {
        kind,
        degree,
        members,
        mult_scale,
        slots,
        base,
    };
    let mut prefactor = ExactQ::one();
    match spec.family {
        Family::GL | Family::Mat => {
            if spec.family == Family::Mat {
                out.push(mk(ClassKind::Plain, 1, 1, 1, BigInt::one(), WeightBase::Gl(BigInt::from(q))));
                prefactor = mat_prefactor(dim, q);
            }
            for d in 1..=dim {
                out.push(mk(ClassKind::Plain, d, 1, 1, count_N(q, d), WeightBase::Gl(big_pow(q, d as u64))));
            }
        }
        Family::GU => {
            for d in 1..=dim {
                let (nt, mt) = count_unitary(q, d);
                if !nt.is_zero() {
                    out.push(mk(ClassKind::SelfConj, d, 1, 1, nt, WeightBase::Gu(big_pow(q, d as u64))));
                }
                if 2 * d <= dim && !mt.is_zero() {
                    out.push(mk(ClassKind::Pair, d, 2, 1, mt, WeightBase::Gl(big_pow(q, 2 * d as u64))));
                }
            }
        }
        Family::Sp | Family::Oplus | Family::Ominus => {
            if !spec.odd_char() && spec.family != Family::Sp {
                return Err(Error::Unsupported("no class model for even-characteristic orthogonal groups".into()));
            }
            let (kind, scale, base) = if spec.family == Family::Sp {
                (ClassKind::SpLinear, 2, WeightBase::Sp(q))
            } else {
                (ClassKind::OLinear, 1, WeightBase::OrthF(q))
            };
            let e = if spec.odd_char() { 2 } else { 1 };
            for _ in 0..e {
                out.push(mk(kind, 1, 1, scale, BigInt::one(), base.clone()));
            }
            for d in 1..=dim / 2 {
                let (ns, _) = count_star(q, 2 * d);
                if !ns.is_zero() {
                    out.push(mk(ClassKind::SelfConj, 2 * d, 1, 1, ns, WeightBase::Gu(big_pow(q, d as u64))));
                }
                let (_, ms) = count_star(q, d);
                if !ms.is_zero() {
                    out.push(mk(ClassKind::Pair, d, 2, 1, ms, WeightBase::Gl(big_pow(q, d as u64))));
                }
            }
        }
    }
    Ok((out, prefactor))
}

/// `[u^dim]` of `prefactor · ∏_c (1 + Σ_{j ≥ 1, keep(c, j)} w_c(j) u^{unit_c·j})^{slots_c}`:
/// the total probability of the characteristic polynomials whose every
/// block passes `keep`.
pub fn class_mass(spec: &GroupSpec, keep: impl Fn(&SlotClass, u32) -> bool) -> Result<ExactQ> {
    let (classes, prefactor) = slot_classes(spec)?;
    Ok(class_product(&classes, spec.dim(), &keep, |c, j| c.weight(j)) * prefactor)
}

/// Number of realizable characteristic polynomials whose every block passes `keep`.
pub fn class_count(spec: &GroupSpec, keep: impl Fn(&SlotClass, u32) -> bool) -> Result<BigInt> {
    let (classes, _) = slot_classes(spec)?;
    Ok(class_product(&classes, spec.dim(), &keep, |_, _| ExactQ::one()).to_integer())
}

fn class_product(
    classes: &[SlotClass],
    dim: usize,
    keep: &dyn Fn(&SlotClass, u32) -> bool,
    weight: impl Fn(&SlotClass, u32) -> ExactQ,
) -> ExactQ {
    let mut series = vec![ExactQ::zero(); dim + 1];
    series[0] = ExactQ::one();
    for c in classes {
        if let Some(factor) = class_factor(c, dim, keep, &weight) {
            series = mul_trunc(&series, &factor);
        }
    }
    series.swap_remove(dim)
}

/// `(1 + Σ_{j ≥ 1, keep(c, j)} w(c, j) u^{unit·j})^{slots}` up to `u^dim`,
/// or `None` when the factor is identically 1.
pub fn class_factor(
    c: &SlotClass,
    dim: usize,
    keep: &dyn Fn(&SlotClass, u32) -> bool,
    weight: &dyn Fn(&SlotClass, u32) -> ExactQ,
) -> Option<Vec<ExactQ>> {
    let unit = c.unit_dim();
    if unit > dim {
        return None;
    }
    let mut base = vec![ExactQ::zero(); dim + 1];
    for j in 1..=(dim / unit) as u32 {
        if keep(c, j) {
            base[unit * j as usize] = weight(c, j);
        }
    }
    if base.iter().all(|x| x.is_zero()) {
        return None;
    }
    // (1 + S)^s = Σ_k C(s, k) S^k; S has no constant term so k ≤ dim / unit.
    let mut factor = vec![ExactQ::zero(); dim + 1];
    let mut power = vec![ExactQ::zero(); dim + 1];
    power[0] = ExactQ::one();
    for k in 0..=(dim / unit) as u64 {
        let binom = binomial_big(&c.slots, k);
        if binom.is_zero() {
            break;
        }
        let coef = ExactQ::from_integer(binom);
        for (f, p) in factor.iter_mut().zip(&power) {
            if !p.is_zero() {
                *f += &coef * p;
            }
        }
        power = mul_trunc(&power, &base);
    }
    Some(factor)
}

fn mul_trunc(a: &[ExactQ], b: &[ExactQ]) -> Vec<ExactQ> {
    let n = a.len();
    let mut out = vec![ExactQ::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// The largest probability of any single characteristic polynomial, with the
/// multiplicity units used per class (class index, units per member used).
#[derive(Clone, Debug)]
pub struct MaxProb {
    pub value: ExactQ,
    pub choice: Vec<(usize, Vec<u32>)>,
}

type Choice = Vec<(usize, Vec<u32>)>;

/// Maximum over characteristic polynomials of the exact probability, by a
/// knapsack over slot classes.
pub fn max_probability(spec: &GroupSpec) -> Result<MaxProb> {
    let (classes, prefactor) = slot_classes(spec)?;
    let dim = spec.dim();
    // best[x] = (value, choice) over the classes processed so far
    let mut best: Vec<Option<(ExactQ, Choice)>> = vec![None; dim + 1];
    best[0] = Some((ExactQ::one(), Vec::new()));
    for (ci, c) in classes.iter().enumerate() {
        let unit = c.unit_dim();
        if unit > dim {
            continue;
        }
        let per_class = best_partitions(c, dim / unit);
        let mut next = best.clone();
        for (x, slot) in best.iter().enumerate() {
            let Some((v, ch)) = slot else { continue };
            for (t, entry) in per_class.iter().enumerate().skip(1) {
                let y = x + t * unit;
                if y > dim {
                    break;
                }
                let Some((w, parts)) = entry else { continue };
                let cand = v * w;
                if next[y].as_ref().is_none_or(|(cur, _)| cand > *cur) {
                    let mut chosen = ch.clone();
                    chosen.push((ci, parts.clone()));
                    next[y] = Some((cand, chosen));
                }
            }
        }
        best = next;
    }
    let (value, choice) =
        best[dim].clone().ok_or_else(|| Error::InvalidSpec(format!("{spec}: no realizable polynomial")))?;
    Ok(MaxProb { value: value * prefactor, choice })
}

/// For `t = 0..=max_units`: the best product of weights over multisets of
/// multiplicities summing to `t`, with at most `slots` parts.
fn best_partitions(c: &SlotClass, max_units: usize) -> Vec<Option<(ExactQ, Vec<u32>)>> {
    let weights: Vec<ExactQ> = (0..=max_units as u32).map(|j| c.weight(j)).collect();
    let max_parts = c.slots.to_usize().unwrap_or(usize::MAX).min(max_units);
    let mut layer: Vec<Option<(ExactQ, Vec<u32>)>> = vec![None; max_units + 1];
    layer[0] = Some((ExactQ::one(), Vec::new()));
    let mut result = layer.clone();
    // parts in nonincreasing order: layer k holds products of exactly k parts
    for _ in 0..max_parts {
        let mut next: Vec<Option<(ExactQ, Vec<u32>)>> = vec![None; max_units + 1];
        for (t, slot) in layer.iter().enumerate() {
            let Some((v, parts)) = slot else { continue };
            let cap = parts.last().copied().unwrap_or(max_units as u32);
            for j in 1..=cap {
                let y = t + j as usize;
                if y > max_units {
                    break;
                }
                let cand = v * &weights[j as usize];
                if next[y].as_ref().is_none_or(|(cur, _)| cand > *cur) {
                    let mut p = parts.clone();
                    p.push(j);
                    next[y] = Some((cand, p));
                }
            }
        }
        for t in 0..=max_units {
            if let Some((v, p)) = &next[t] {
                if result[t].as_ref().is_none_or(|(cur, _)| v > cur) {
                    result[t] = Some((v.clone(), p.clone()));
                }
            }
        }
        layer = next;
    }
    result
}

/// `min_φ prob_gl(n, q, φ)` over realizable `φ` (by enumeration).
pub fn min_probability_gl(n: usize, q: u64) -> Result<ExactQ> {
    let dist = enumerate_charpoly_distribution(&GroupSpec::new(Family::GL, n, q)?)?;
    dist.into_iter().map(|(_, p)| p).min().ok_or_else(|| Error::InvalidSpec("empty distribution".into()))
}
