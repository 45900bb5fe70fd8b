//! Univariate polynomials over a [`FieldCtx`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{split_top_level, FieldCtx, FieldElem};
use crate::polyraw;

#[derive(Clone)]
pub struct PolyFq {
    ctx: Arc<FieldCtx>,
    coeffs: Vec<FieldElem>,
}

/// Which conjugation involution to use for self-conjugacy.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ConjFlavor {
    /// Roots `α ↦ α^{-q}` over a quadratic tower `F_{q^2}` (unitary groups).
    Tilde,
    /// Roots `α ↦ α^{-1}` (symplectic and orthogonal groups).
    Star,
}

impl PolyFq {
    pub fn new(ctx: &Arc<FieldCtx>, coeffs: Vec<FieldElem>) -> PolyFq {
        debug_assert!(coeffs.iter().all(|c| ctx.contains(*c)));
        let mut coeffs = coeffs;
        polyraw::trim(&mut coeffs);
        PolyFq { ctx: ctx.clone(), coeffs }
    }

    pub fn try_new(ctx: &Arc<FieldCtx>, coeffs: Vec<FieldElem>) -> Result<PolyFq> {
        if let Some(c) = coeffs.iter().find(|c| !ctx.contains(**c)) {
            return Err(Error::ElementOutOfRange { value: c.value() as u64, q: ctx.q() });
        }
        Ok(PolyFq::new(ctx, coeffs))
    }

    /// Prime-subfield integer coefficients, lowest degree first.
    pub fn from_ints(ctx: &Arc<FieldCtx>, coeffs: &[i64]) -> PolyFq {
        PolyFq::new(ctx, coeffs.iter().map(|&c| ctx.from_int(c)).collect())
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> PolyFq {
        PolyFq { ctx: ctx.clone(), coeffs: Vec::new() }
    }

    pub fn one(ctx: &Arc<FieldCtx>) -> PolyFq {
        PolyFq { ctx: ctx.clone(), coeffs: vec![FieldElem::ONE] }
    }

    pub fn x(ctx: &Arc<FieldCtx>) -> PolyFq {
        PolyFq { ctx: ctx.clone(), coeffs: vec![FieldElem::ZERO, FieldElem::ONE] }
    }

    /// `t - c`.
    pub fn linear(ctx: &Arc<FieldCtx>, root: FieldElem) -> PolyFq {
        PolyFq::new(ctx, vec![ctx.neg(root), FieldElem::ONE])
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElem::ONE
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FieldElem::ONE
    }

    pub fn constant_term(&self) -> FieldElem {
        self.coeff(0)
    }

    fn check_ctx(&self, other: &PolyFq) -> Result<()> {
        if self.ctx.same(&other.ctx) {
            Ok(())
        } else {
            Err(Error::MixedContexts)
        }
    }

    pub fn try_add(&self, other: &PolyFq) -> Result<PolyFq> {
        self.check_ctx(other)?;
        Ok(PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::add(&self.ctx, &self.coeffs, &other.coeffs) })
    }

    pub fn try_sub(&self, other: &PolyFq) -> Result<PolyFq> {
        self.check_ctx(other)?;
        Ok(PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::sub(&self.ctx, &self.coeffs, &other.coeffs) })
    }

    pub fn try_mul(&self, other: &PolyFq) -> Result<PolyFq> {
        self.check_ctx(other)?;
        Ok(PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::mul(&self.ctx, &self.coeffs, &other.coeffs) })
    }

    pub fn scale(&self, c: FieldElem) -> PolyFq {
        PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::scale(&self.ctx, &self.coeffs, c) }
    }

    pub fn div_rem(&self, other: &PolyFq) -> Result<(PolyFq, PolyFq)> {
        self.check_ctx(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (q, r) = polyraw::divrem(&self.ctx, &self.coeffs, &other.coeffs);
        Ok((PolyFq { ctx: self.ctx.clone(), coeffs: q }, PolyFq { ctx: self.ctx.clone(), coeffs: r }))
    }

    pub fn rem(&self, other: &PolyFq) -> Result<PolyFq> {
        Ok(self.div_rem(other)?.1)
    }

    /// Exact division; errors if `other` does not divide `self`.
    pub fn div_exact(&self, other: &PolyFq) -> Result<PolyFq> {
        let (q, r) = self.div_rem(other)?;
        if !r.is_zero() {
            return Err(Error::Unsupported("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &PolyFq) -> Result<PolyFq> {
        self.check_ctx(other)?;
        Ok(PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::gcd(&self.ctx, &self.coeffs, &other.coeffs) })
    }

    pub fn derivative(&self) -> PolyFq {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.ctx.mul(self.ctx.from_int(i as i64), c))
            .collect();
        PolyFq::new(&self.ctx, coeffs)
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        let f = &self.ctx;
        self.coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn monic(&self) -> Result<PolyFq> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::monic(&self.ctx, &self.coeffs) })
    }

    pub fn pow(&self, e: u32) -> PolyFq {
        let mut out = PolyFq::one(&self.ctx);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn pow_mod(&self, e: &BigUint, m: &PolyFq) -> Result<PolyFq> {
        self.check_ctx(m)?;
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(PolyFq { ctx: self.ctx.clone(), coeffs: polyraw::powmod_big(&self.ctx, &self.coeffs, e, &m.coeffs) })
    }

    pub fn is_irreducible(&self) -> bool {
        polyraw::is_irreducible(&self.ctx, &self.coeffs)
    }

    /// Applies a map to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(FieldElem) -> FieldElem) -> PolyFq {
        PolyFq::new(&self.ctx, self.coeffs.iter().map(|&c| f(c)).collect())
    }

    fn check_conjugable(&self) -> Result<()> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !self.is_monic() {
            return Err(Error::NotMonic);
        }
        if self.constant_term().is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        Ok(())
    }

    /// `φ*(t) = t^n φ(1/t) / φ(0)`: the monic polynomial whose roots are the inverses of those of `φ`.
    pub fn conj_star(&self) -> Result<PolyFq> {
        self.check_conjugable()?;
        let f = &self.ctx;
        let a0_inv = f.inv(self.constant_term())?;
        let coeffs = self.coeffs.iter().rev().map(|&c| f.mul(c, a0_inv)).collect();
        Ok(PolyFq::new(f, coeffs))
    }

    /// `φ̃`: the star conjugate followed by `x ↦ x^q` on the coefficients of a
    /// polynomial over the quadratic tower `F_{q^2}`; roots map `α ↦ α^{-q}`.
    pub fn conj_tilde(&self) -> Result<PolyFq> {
        if !self.ctx.is_quadratic_tower() {
            return Err(Error::NotQuadraticTower);
        }
        let star = self.conj_star()?;
        let f = self.ctx.clone();
        let mut coeffs = Vec::with_capacity(star.coeffs.len());
        for &c in &star.coeffs {
            coeffs.push(f.conjugate(c)?);
        }
        Ok(PolyFq::new(&f, coeffs))
    }

    pub fn conj(&self, flavor: ConjFlavor) -> Result<PolyFq> {
        match flavor {
            ConjFlavor::Star => self.conj_star(),
            ConjFlavor::Tilde => self.conj_tilde(),
        }
    }

    pub fn is_self_conjugate(&self, flavor: ConjFlavor) -> Result<bool> {
        Ok(self.conj(flavor)? == *self)
    }

    /// Comma-separated coefficients, lowest degree first.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs.iter().map(|&c| self.ctx.format_elem(c)).collect::<Vec<_>>().join(",")
    }

    pub fn parse(ctx: &Arc<FieldCtx>, s: &str) -> Result<PolyFq> {
        let coeffs = split_top_level(s).iter().map(|t| ctx.parse_elem(t)).collect::<Result<Vec<_>>>()?;
        Ok(PolyFq::new(ctx, coeffs))
    }

    /// All monic polynomials of the given degree, in canonical order.
    pub fn monic_of_degree(ctx: &Arc<FieldCtx>, d: usize) -> impl Iterator<Item = PolyFq> + '_ {
        let q = ctx.q() as u64;
        let total = q.checked_pow(d as u32).expect("enumeration size fits u64");
        (0..total).map(move |code| {
            let mut v = code;
            let mut c = Vec::with_capacity(d + 1);
            for _ in 0..d {
                c.push(FieldElem((v % q) as u32));
                v /= q;
            }
            c.push(FieldElem::ONE);
            PolyFq { ctx: ctx.clone(), coeffs: c }
        })
    }

    /// All monic irreducible polynomials of degree `d`, in canonical order.
    pub fn irreducibles_of_degree(ctx: &Arc<FieldCtx>, d: usize) -> Vec<PolyFq> {
        PolyFq::monic_of_degree(ctx, d).filter(|f| f.is_irreducible()).collect()
    }
}

impl PartialEq for PolyFq {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for PolyFq {}

impl Hash for PolyFq {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.id().hash(state);
        self.coeffs.hash(state);
    }
}

/// Canonical order: degree, then coefficients compared from the highest power down.
impl Ord for PolyFq {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
            .then_with(|| self.ctx.id().cmp(&other.ctx.id()))
    }
}

impl PartialOrd for PolyFq {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PolyFq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = self.ctx.format_elem(c);
            match (i, c == FieldElem::ONE) {
                (0, _) => write!(f, "{cs}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{cs}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{cs}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &PolyFq {
    type Output = PolyFq;
    fn add(self, rhs: &PolyFq) -> PolyFq {
        self.try_add(rhs).expect("polynomials over the same field")
    }
}

impl Sub for &PolyFq {
    type Output = PolyFq;
    fn sub(self, rhs: &PolyFq) -> PolyFq {
        self.try_sub(rhs).expect("polynomials over the same field")
    }
}

impl Mul for &PolyFq {
    type Output = PolyFq;
    fn mul(self, rhs: &PolyFq) -> PolyFq {
        self.try_mul(rhs).expect("polynomials over the same field")
    }
}

impl Neg for &PolyFq {
    type Output = PolyFq;
    fn neg(self) -> PolyFq {
        self.map_coeffs(|c| self.ctx.neg(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gf, quadratic_tower};

    fn p(ctx: &Arc<FieldCtx>, c: &[i64]) -> PolyFq {
        PolyFq::from_ints(ctx, c)
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = gf(2).unwrap();
        let t1 = p(&f2, &[1, 1]);
        assert_eq!(&t1 * &t1, p(&f2, &[1, 0, 1]));
        assert_eq!(p(&f2, &[1, 0, 1]).gcd(&t1).unwrap(), t1);
        let f3 = gf(3).unwrap();
        let (q, r) = p(&f3, &[0, 0, 0, 1]).div_rem(&p(&f3, &[1, 0, 1])).unwrap();
        assert_eq!(q, p(&f3, &[0, 1]));
        assert_eq!(r, p(&f3, &[0, -1]));
        assert_eq!(t1.div_rem(&PolyFq::zero(&f2)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn mixed_contexts_rejected() {
        let a = p(&gf(2).unwrap(), &[1, 1]);
        let b = p(&gf(3).unwrap(), &[1, 1]);
        assert_eq!(a.try_add(&b).unwrap_err(), Error::MixedContexts);
    }

    #[test]
    fn conj_star_examples() {
        let f5 = gf(5).unwrap();
        assert_eq!(p(&f5, &[-2, 1]).conj_star().unwrap(), p(&f5, &[-3, 1]));
        let f2 = gf(2).unwrap();
        let q = p(&f2, &[1, 1, 1]);
        assert!(q.is_self_conjugate(ConjFlavor::Star).unwrap());
        let f3 = gf(3).unwrap();
        assert!(p(&f3, &[-1, 0, 1]).is_self_conjugate(ConjFlavor::Star).unwrap());
        assert!(!p(&f5, &[-2, 1]).is_self_conjugate(ConjFlavor::Star).unwrap());
        assert_eq!(p(&f3, &[0, 1]).conj_star().unwrap_err(), Error::ZeroConstantTerm);
        assert_eq!(p(&f3, &[1, 2]).conj_star().unwrap_err(), Error::NotMonic);
    }

    #[test]
    fn conj_tilde_examples() {
        let f4 = quadratic_tower(&gf(2).unwrap()).unwrap();
        let w = f4.elem(2).unwrap();
        let t_plus_w = PolyFq::new(&f4, vec![w, FieldElem::ONE]);
        // (ω^{-1})^2 = ω since ω^3 = 1
        let expect = f4.pow(f4.inv(w).unwrap(), 2);
        assert_eq!(expect, w);
        assert_eq!(t_plus_w.conj_tilde().unwrap(), t_plus_w);
        assert!(t_plus_w.is_self_conjugate(ConjFlavor::Tilde).unwrap());
        let t1 = PolyFq::from_ints(&f4, &[1, 1]);
        assert_eq!(t1.conj_tilde().unwrap(), t1);
        assert_eq!(p(&gf(8).unwrap(), &[1, 1]).conj_tilde().unwrap_err(), Error::NotQuadraticTower);
        assert_eq!(p(&gf(5).unwrap(), &[1, 1]).conj_tilde().unwrap_err(), Error::NotQuadraticTower);
        let mut checked = 0;
        for d in 1..=2 {
            for f in PolyFq::monic_of_degree(&f4, d) {
                if f.constant_term().is_zero() {
                    continue;
                }
                checked += 1;
                assert_eq!(f.conj_tilde().unwrap().conj_tilde().unwrap(), f);
            }
        }
        assert_eq!(checked, 15);
    }

    #[test]
    fn conj_tilde_maps_roots() {
        let f9 = quadratic_tower(&gf(3).unwrap()).unwrap();
        for a in f9.nonzero_elements() {
            let lin = PolyFq::linear(&f9, a);
            let img = f9.pow(f9.inv(a).unwrap(), 3);
            assert_eq!(lin.conj_tilde().unwrap(), PolyFq::linear(&f9, img));
        }
    }

    #[test]
    fn even_degree_irreducibles_never_tilde_self_conjugate() {
        for q in [2u64, 3] {
            let t = quadratic_tower(&gf(q).unwrap()).unwrap();
            for d in 1..=4usize {
                for f in PolyFq::irreducibles_of_degree(&t, d) {
                    if f.constant_term().is_zero() {
                        continue;
                    }
                    if f.is_self_conjugate(ConjFlavor::Tilde).unwrap() {
                        assert!(d % 2 == 1, "tilde-self-conjugate irreducible of even degree: {f}");
                    }
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let f9 = quadratic_tower(&gf(3).unwrap()).unwrap();
        let f = PolyFq::parse(&f9, "[1,2],0,[0,1],1").unwrap();
        assert_eq!(f.deg(), 3);
        assert_eq!(PolyFq::parse(&f9, &f.to_text()).unwrap(), f);
        let f2 = gf(2).unwrap();
        assert_eq!(PolyFq::parse(&f2, "1,1,1").unwrap(), p(&f2, &[1, 1, 1]));
    }
}
