//! Factorization over `F_q`: squarefree decomposition, distinct-degree
//! splitting, then randomized equal-degree splitting (Cantor–Zassenhaus for
//! odd `q`, the trace map for even `q`).

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::poly::PolyFq;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    pub unit: FieldElem,
    /// Distinct monic irreducibles with multiplicities, in canonical order.
    pub factors: Vec<(PolyFq, u32)>,
}

impl Factorization {
    /// Reassembles `unit · ∏ f^j`.
    pub fn product(&self, ctx: &std::sync::Arc<crate::field::FieldCtx>) -> PolyFq {
        let mut out = PolyFq::new(ctx, vec![self.unit]);
        for (f, j) in &self.factors {
            out = &out * &f.pow(*j);
        }
        out
    }

    /// `(degree, multiplicity)` pairs.
    pub fn profile(&self) -> Vec<(usize, u32)> {
        self.factors.iter().map(|(f, j)| (f.deg(), *j)).collect()
    }

    pub fn multiplicity_of(&self, g: &PolyFq) -> u32 {
        self.factors.iter().find(|(f, _)| f == g).map_or(0, |(_, j)| *j)
    }
}

impl fmt::Debug for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|(g, j)| format!("({g})^{j}")).collect();
        write!(f, "{} * {}", self.unit.value(), parts.join(" * "))
    }
}

/// Factors `f` into monic irreducibles. The result does not depend on `seed`;
/// the seed only drives the randomized splitting.
pub fn factorize(f: &PolyFq, seed: u64) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.leading();
    let g = f.monic()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, mult) in squarefree(&g) {
        for (d, block) in distinct_degree(&part) {
            for irr in equal_degree(&block, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort();
    let mut merged: Vec<(PolyFq, u32)> = Vec::with_capacity(factors.len());
    for (p, j) in factors {
        match merged.last_mut() {
            Some((last, lj)) if *last == p => *lj += j,
            _ => merged.push((p, j)),
        }
    }
    Ok(Factorization { unit, factors: merged })
}

/// Convenience wrapper with a fixed seed.
pub fn factor(f: &PolyFq) -> Result<Factorization> {
    factorize(f, 0x5eed)
}

fn pth_root_poly(f: &PolyFq) -> PolyFq {
    let ctx = f.ctx();
    let p = ctx.p() as usize;
    let coeffs = f.coeffs().iter().step_by(p).map(|&c| ctx.pth_root(c)).collect();
    PolyFq::new(ctx, coeffs)
}

/// Squarefree decomposition of a monic polynomial: `(part, multiplicity)` with coprime parts.
fn squarefree(f: &PolyFq) -> Vec<(PolyFq, u32)> {
    let mut out = Vec::new();
    if f.deg() == 0 {
        return out;
    }
    let p = f.ctx().p();
    let d = f.derivative();
    let mut c = f.gcd(&d).unwrap();
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c).unwrap();
        let z = w.div_exact(&y).unwrap();
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w).unwrap();
    }
    if !c.is_one() {
        let root = pth_root_poly(&c);
        for (part, m) in squarefree(&root) {
            out.push((part, m * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into products of equal-degree irreducibles.
fn distinct_degree(f: &PolyFq) -> Vec<(usize, PolyFq)> {
    let ctx = f.ctx();
    let mut out = Vec::new();
    let mut g = f.clone();
    let x = PolyFq::x(ctx);
    let q = BigUint::from(ctx.q());
    let mut h = x.rem(&g).unwrap();
    let mut d = 0usize;
    while g.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(&q, &g).unwrap();
        let fd = g.gcd(&(&h - &x)).unwrap();
        if !fd.is_one() {
            g = g.div_exact(&fd).unwrap();
            h = h.rem(&g).unwrap();
            out.push((d, fd));
        }
    }
    if g.deg() > 0 {
        out.push((g.deg(), g));
    }
    out
}

fn random_poly(ctx: &std::sync::Arc<crate::field::FieldCtx>, below: usize, rng: &mut ChaCha8Rng) -> PolyFq {
    let coeffs = (0..below).map(|_| FieldElem(rng.gen_range(0..ctx.q()))).collect();
    PolyFq::new(ctx, coeffs)
}

fn equal_degree(f: &PolyFq, d: usize, rng: &mut ChaCha8Rng) -> Vec<PolyFq> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let ctx = f.ctx().clone();
    let n = f.deg();
    let q = BigUint::from(ctx.q());
    loop {
        let a = random_poly(&ctx, n, rng);
        if a.deg() == 0 {
            continue;
        }
        let candidate = if ctx.p() == 2 {
            // trace from F_{q^d} down to F_2: a + a^2 + ... + a^{2^{kd-1}}
            let steps = ctx.k() as usize * d;
            let two = BigUint::from(2u32);
            let mut term = a.rem(f).unwrap();
            let mut acc = term.clone();
            for _ in 1..steps {
                term = term.pow_mod(&two, f).unwrap();
                acc = &acc + &term;
            }
            acc
        } else {
            let e = (num_traits::pow(q.clone(), d) - BigUint::one()) / BigUint::from(2u32);
            &a.pow_mod(&e, f).unwrap() - &PolyFq::one(&ctx)
        };
        let g = f.gcd(&candidate).unwrap();
        if g.deg() > 0 && g.deg() < n {
            let rest = f.div_exact(&g).unwrap();
            let mut out = equal_degree(&g, d, rng);
            out.extend(equal_degree(&rest, d, rng));
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gf, quadratic_tower};
    use proptest::prelude::*;

    fn p(q: u64, c: &[i64]) -> PolyFq {
        PolyFq::from_ints(&gf(q).unwrap(), c)
    }

    #[test]
    fn examples() {
        let f = p(2, &[1, 1, 1]);
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors, vec![(f.clone(), 1)]);
        let fac = factor(&p(2, &[1, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(p(2, &[1, 1]), 2)]);
        let fac = factor(&p(2, &[0, 1, 0, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(p(2, &[0, 1]), 1), (p(2, &[1, 1]), 1), (p(2, &[1, 1, 1]), 1)]);
        assert_eq!(factor(&PolyFq::zero(&gf(2).unwrap())).unwrap_err(), Error::ZeroPolynomial);
    }

    #[test]
    fn high_multiplicity_in_char_p() {
        // (t+1)^6 (t^2+t+1)^4 over F_2 exercises the p-th root branch
        let f = &p(2, &[1, 1]).pow(6) * &p(2, &[1, 1, 1]).pow(4);
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors, vec![(p(2, &[1, 1]), 6), (p(2, &[1, 1, 1]), 4)]);
        let g = &p(3, &[1, 1]).pow(9) * &p(3, &[1, 0, 1]).pow(3);
        let fac = factor(&g).unwrap();
        assert_eq!(fac.factors, vec![(p(3, &[1, 1]), 9), (p(3, &[1, 0, 1]), 3)]);
    }

    #[test]
    fn seed_independence() {
        let f = &(&p(5, &[1, 1]) * &p(5, &[2, 0, 1])) * &(&p(5, &[3, 1]) * &p(5, &[2, 1, 0, 1]));
        let a = factorize(&f, 1).unwrap();
        for s in 2..20 {
            assert_eq!(factorize(&f, s).unwrap(), a);
        }
    }

    #[test]
    fn extension_field_factoring() {
        let f9 = quadratic_tower(&gf(3).unwrap()).unwrap();
        // t^2 + 1 splits over F_9
        let f = PolyFq::from_ints(&f9, &[1, 0, 1]);
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert!(fac.factors.iter().all(|(g, j)| g.deg() == 1 && *j == 1));
        assert_eq!(fac.product(&f9), f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn factor_then_multiply_round_trips(q in prop::sample::select(vec![2u64, 3, 4, 5]),
                                            coeffs in prop::collection::vec(0u32..5, 1..=9),
                                            lead in 1u32..5,
                                            seed in any::<u64>()) {
            let ctx = gf(q).unwrap();
            let mut c: Vec<FieldElem> = coeffs.iter().map(|&v| FieldElem(v % ctx.q())).collect();
            c.push(FieldElem(lead % (ctx.q() - 1) + 1));
            let f = PolyFq::new(&ctx, c);
            let fac = factorize(&f, seed).unwrap();
            prop_assert_eq!(fac.product(&ctx), f.clone());
            for (g, _) in &fac.factors {
                prop_assert!(g.is_irreducible() && g.is_monic());
            }
            for w in fac.factors.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }
    }
}
