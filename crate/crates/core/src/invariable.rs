//! Invariant subsets of permutations against invariant subspaces of
//! matrices, and invariable generation.
//!
//! A permutation fixes a set of size `e` iff some sub-multiset of its cycle
//! lengths sums to `e`; a matrix fixes an `e`-dimensional subspace only if
//! its characteristic polynomial has a factor of degree `e`.
//!
//! Permutations `g_1, …, g_r` invariably generate a transitive subgroup iff
//! every `e ∈ {1, …, n-1}` is blocked by some `g_i`, i.e. `g_i` has no
//! invariant `e`-set. If every `g_i` fixes some `e`-set, conjugating each onto
//! one common `e`-set gives an intransitive `⟨g_1^{x_1}, …, g_r^{x_r}⟩`;
//! conversely a common invariant orbit of size `e` would be invariant under
//! every `g_i`.
//!
//! The matrix side uses the same criterion on characteristic polynomials; it
//! is a necessary condition for invariable irreducibility, reported as such.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::charpoly_dist::{class_factor, slot_classes, ExactQ};
use crate::derange::DegMultProfile;
use crate::error::{Error, Result};
use crate::groups::{sample_with, Family, GroupSpec};
use crate::matrix::char_poly;
use crate::stats::{parallel_successes, wilson, Proportion};

pub const SYM_EXACT_CAP: usize = 40;
pub const GL_EXACT_CAP: usize = 64;
pub const INVARIABLE_EXACT_CAP: usize = 16;

/// Cycle lengths of a permutation, in nonincreasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CycleType {
    parts: Vec<usize>,
}

impl CycleType {
    pub fn new(mut parts: Vec<usize>) -> Result<CycleType> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::OutOfRange("cycle lengths must be positive and nonempty".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CycleType { parts })
    }

    /// Cycle type of `perm`, a permutation of `0..perm.len()`.
    pub fn of_permutation(perm: &[usize]) -> CycleType {
        let mut seen = vec![false; perm.len()];
        let mut parts = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            parts.push(len);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        CycleType { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `|S_n| / |class|`, the centralizer order `∏ i^{a_i} a_i!`.
    pub fn centralizer_order(&self) -> BigInt {
        let mut counts: HashMap<usize, u32> = HashMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_default() += 1;
        }
        counts.into_iter().fold(BigInt::one(), |acc, (i, a)| {
            let fact: BigInt = (1..=a).map(BigInt::from).product();
            acc * BigInt::from(i).pow(a) * fact
        })
    }

    /// Proportion of `S_n` with this cycle type.
    pub fn probability(&self) -> ExactQ {
        ExactQ::new(BigInt::one(), self.centralizer_order())
    }
}

/// Subset sums `0..=n` as a bitset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumSet {
    words: Vec<u64>,
    n: usize,
}

impl SumSet {
    /// `{0}`.
    pub fn zero(n: usize) -> SumSet {
        let mut words = vec![0u64; n / 64 + 1];
        words[0] = 1;
        SumSet { words, n }
    }

    /// Adds `k` copies of an item of size `d`.
    pub fn add_items(&mut self, d: usize, k: usize) {
        for _ in 0..k {
            if d > self.n {
                return;
            }
            self.shift_or(d);
        }
    }

    fn shift_or(&mut self, d: usize) {
        let (ws, bs) = (d / 64, d % 64);
        for i in (0..self.words.len()).rev() {
            let mut v = 0;
            if i >= ws {
                v = self.words[i - ws] << bs;
                if bs > 0 && i > ws {
                    v |= self.words[i - ws - 1] >> (64 - bs);
                }
            }
            self.words[i] |= v;
        }
        let extra = self.words.len() * 64 - (self.n + 1);
        if extra > 0 {
            let last = self.words.len() - 1;
            self.words[last] &= u64::MAX >> extra;
        }
    }

    pub fn contains(&self, e: usize) -> bool {
        e <= self.n && self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn intersect(&mut self, other: &SumSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Whether no `e ∈ 1..n` is present.
    pub fn has_no_proper(&self) -> bool {
        (1..self.n).all(|e| !self.contains(e))
    }
}

fn cycle_sums(ct: &CycleType) -> SumSet {
    let mut s = SumSet::zero(ct.n());
    for &p in &ct.parts {
        s.add_items(p, 1);
    }
    s
}

fn profile_sums(profile: &DegMultProfile) -> SumSet {
    let mut s = SumSet::zero(profile.dimension());
    for &(d, j) in &profile.entries {
        s.add_items(d, j as usize);
    }
    s
}

pub fn has_invariant_subset(ct: &CycleType, e: usize) -> bool {
    cycle_sums(ct).contains(e)
}

pub fn has_invariant_subspace(profile: &DegMultProfile, e: usize) -> bool {
    profile_sums(profile).contains(e)
}

/// All partitions of `n`, parts nonincreasing.
pub fn partitions(n: usize) -> Vec<CycleType> {
    fn go(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<CycleType>) {
        if rem == 0 {
            out.push(CycleType { parts: cur.clone() });
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            go(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, n, &mut Vec::new(), &mut out);
    }
    out
}

fn check_e(n: usize, e: usize) -> Result<()> {
    if n == 0 || e > n {
        return Err(Error::OutOfRange(format!("need 0 <= e <= n and n >= 1 (n = {n}, e = {e})")));
    }
    Ok(())
}

/// Probability that a uniform element of `S_n` fixes no `e`-set.
pub fn prob_sym_no_invariant(n: usize, e: usize) -> Result<ExactQ> {
    check_e(n, e)?;
    if n > SYM_EXACT_CAP {
        return Err(Error::CapExceeded(format!("n = {n} exceeds the partition cap {SYM_EXACT_CAP}")));
    }
    Ok(partitions(n).iter().filter(|ct| !has_invariant_subset(ct, e)).map(CycleType::probability).sum())
}

/// Distribution over the subset-sum sets (bits `0..=limit`) of the
/// characteristic polynomial profile of a uniform element of `GL(n,q)`.
fn gl_sum_distribution(n: usize, q: u64, limit: usize) -> Result<HashMap<u128, ExactQ>> {
    assert!(limit < 128, "sum sets are tracked in 128 bits");
    let spec = GroupSpec::new(Family::GL, n, q)?;
    let (classes, _) = slot_classes(&spec)?;
    let full: u128 = if limit == 127 { u128::MAX } else { (1u128 << (limit + 1)) - 1 };
    let mut states: HashMap<(usize, u128), ExactQ> = HashMap::new();
    states.insert((0, 1), ExactQ::one());
    for c in &classes {
        let Some(factor) = class_factor(c, n, &|_, _| true, &|c, j| c.weight(j)) else { continue };
        let d = c.degree;
        let mut next: HashMap<(usize, u128), ExactQ> = HashMap::new();
        for ((dim, mask), mass) in &states {
            let mut m = *mask;
            for t in 0..=(n - dim) / d {
                if t > 0 {
                    m = (m | (m << d.min(127))) & full;
                }
                let f = &factor[d * t];
                if f.is_zero() {
                    continue;
                }
                *next.entry((dim + d * t, m)).or_insert_with(ExactQ::zero) += mass * f;
            }
        }
        states = next;
    }
    let mut out: HashMap<u128, ExactQ> = HashMap::new();
    for ((dim, mask), mass) in states {
        if dim == n {
            *out.entry(mask).or_insert_with(ExactQ::zero) += mass;
        }
    }
    Ok(out)
}

/// Probability that a uniform element of `GL(n,q)` has no characteristic
/// polynomial factor of degree `e` (so fixes no `e`-dimensional subspace).
pub fn prob_gl_no_invariant(n: usize, q: u64, e: usize) -> Result<ExactQ> {
    check_e(n, e)?;
    if n > GL_EXACT_CAP {
        return Err(Error::CapExceeded(format!("n = {n} exceeds the series cap {GL_EXACT_CAP}")));
    }
    let e = e.min(n - e);
    let dist = gl_sum_distribution(n, q, e)?;
    Ok(dist.into_iter().filter(|(m, _)| m >> e & 1 == 0).map(|(_, p)| p).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrictCheck {
    pub n: usize,
    pub q: u64,
    pub e: usize,
    #[serde(skip)]
    pub gl: ExactQ,
    #[serde(skip)]
    pub sym: ExactQ,
    pub holds: bool,
}

/// Whether `prob_gl_no_invariant < prob_sym_no_invariant`, with both values.
pub fn check_strict_inequality(n: usize, q: u64, e: usize) -> Result<StrictCheck> {
    let gl = prob_gl_no_invariant(n, q, e)?;
    let sym = prob_sym_no_invariant(n, e)?;
    Ok(StrictCheck { n, q, e, holds: gl < sym, gl, sym })
}

fn check_same_n(mut ns: impl Iterator<Item = usize>) -> Result<Option<usize>> {
    let Some(first) = ns.next() else { return Ok(None) };
    match ns.find(|&n| n != first) {
        Some(got) => Err(Error::DimensionMismatch { expected: first, got }),
        None => Ok(Some(first)),
    }
}

pub fn invariably_transitive(cts: &[CycleType]) -> Result<bool> {
    let Some(n) = check_same_n(cts.iter().map(CycleType::n))? else {
        return Err(Error::OutOfRange("need at least one cycle type".into()));
    };
    let mut common = SumSet::zero(n);
    common.add_items(1, n);
    for ct in cts {
        common.intersect(&cycle_sums(ct));
    }
    Ok(common.has_no_proper())
}

/// Necessary condition for invariable irreducibility read from the
/// characteristic polynomial profiles.
pub fn profiles_block_all(profiles: &[DegMultProfile]) -> Result<bool> {
    let Some(n) = check_same_n(profiles.iter().map(DegMultProfile::dimension))? else {
        return Err(Error::OutOfRange("need at least one profile".into()));
    };
    let mut common = SumSet::zero(n);
    common.add_items(1, n);
    for p in profiles {
        common.intersect(&profile_sums(p));
    }
    Ok(common.has_no_proper())
}

fn proper_mask(n: usize) -> u128 {
    if n < 2 {
        0
    } else {
        ((1u128 << n) - 1) & !1
    }
}

/// `P(r independent draws block every e ∈ 1..n)`, from the distribution of
/// the sum set (as a bitmask over `0..=n`).
fn blocking_probability(n: usize, r: usize, dist: &HashMap<u128, ExactQ>) -> ExactQ {
    let proper = proper_mask(n);
    let mut or_dist: HashMap<u128, ExactQ> = HashMap::new();
    or_dist.insert(0, ExactQ::one());
    for _ in 0..r {
        let mut next: HashMap<u128, ExactQ> = HashMap::new();
        for (acc, p) in &or_dist {
            for (mask, w) in dist {
                let blocked = !mask & proper;
                *next.entry(acc | blocked).or_insert_with(ExactQ::zero) += p * w;
            }
        }
        or_dist = next;
    }
    or_dist.into_iter().filter(|(m, _)| *m == proper).map(|(_, p)| p).sum()
}

fn check_invariable_cap(n: usize, r: usize) -> Result<()> {
    if n == 0 || r == 0 {
        return Err(Error::OutOfRange("need n >= 1 and r >= 1".into()));
    }
    if n > INVARIABLE_EXACT_CAP {
        return Err(Error::CapExceeded(format!("n = {n} exceeds the exact cap {INVARIABLE_EXACT_CAP}")));
    }
    Ok(())
}

/// Exact probability that `r` uniform elements of `S_n` invariably generate a transitive subgroup.
pub fn exact_invariable_sym(n: usize, r: usize) -> Result<ExactQ> {
    check_invariable_cap(n, r)?;
    let mut dist: HashMap<u128, ExactQ> = HashMap::new();
    for ct in partitions(n) {
        let s = cycle_sums(&ct);
        let mask = (0..=n).filter(|&e| s.contains(e)).fold(0u128, |m, e| m | 1 << e);
        *dist.entry(mask).or_insert_with(ExactQ::zero) += ct.probability();
    }
    Ok(blocking_probability(n, r, &dist))
}

/// Exact probability that the characteristic polynomials of `r` uniform
/// elements of `GL(n,q)` block every `e ∈ 1..n`.
pub fn exact_invariable_gl(n: usize, q: u64, r: usize) -> Result<ExactQ> {
    check_invariable_cap(n, r)?;
    Ok(blocking_probability(n, r, &gl_sum_distribution(n, q, n)?))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariableEstimate {
    pub n: usize,
    pub r: usize,
    /// `None` for `S_n`.
    pub q: Option<u64>,
    pub seed: u64,
    pub estimate: Proportion,
}

/// Monte Carlo estimate for `r` uniform permutations of `S_n`.
pub fn mc_invariable(n: usize, r: usize, trials: u64, seed: u64, confidence: f64) -> Result<InvariableEstimate> {
    if n == 0 || r == 0 || trials == 0 {
        return Err(Error::OutOfRange("need n, r, trials >= 1".into()));
    }
    let hits = parallel_successes(trials, seed, |rng| -> Result<bool> {
        let mut common = SumSet::zero(n);
        common.add_items(1, n);
        let mut perm: Vec<usize> = (0..n).collect();
        for _ in 0..r {
            perm.shuffle(rng);
            common.intersect(&cycle_sums(&CycleType::of_permutation(&perm)));
        }
        Ok(common.has_no_proper())
    })?;
    Ok(InvariableEstimate { n, r, q: None, seed, estimate: wilson(hits, trials, confidence) })
}

/// Monte Carlo estimate of the characteristic-polynomial blocking event for
/// `r` uniform elements of `GL(n,q)`, drawn as matrices.
pub fn mc_invariable_gl(
    n: usize,
    q: u64,
    r: usize,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<InvariableEstimate> {
    if r == 0 || trials == 0 {
        return Err(Error::OutOfRange("need r, trials >= 1".into()));
    }
    let spec = GroupSpec::new(Family::GL, n, q)?;
    let ctx = spec.field()?;
    let hits = parallel_successes(trials, seed, |rng| -> Result<bool> {
        let mut profiles = Vec::with_capacity(r);
        for _ in 0..r {
            let m = sample_with(&spec, rng)?;
            profiles.push(DegMultProfile::of_poly(&char_poly(&ctx, &m)?)?);
        }
        profiles_block_all(&profiles)
    })?;
    Ok(InvariableEstimate { n, r, q: Some(q), seed, estimate: wilson(hits, trials, confidence) })
}
