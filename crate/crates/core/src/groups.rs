//! Finite classical groups in their natural matrix representation: orders,
//! standard forms, exhaustive enumeration and exactly uniform sampling.
//!
//! Every group other than `Mat` and `GL` is the isometry group of a fixed
//! standard form. A matrix is an isometry iff its columns `c_1, …, c_N`
//! reproduce the Gram data of the standard basis, so both the enumerator and
//! the sampler build matrices one column at a time: the pairings with earlier
//! columns are linear constraints on the next column, and the norm condition
//! and linear independence are checked on each candidate.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::big_pow;
use crate::error::{Error, Result};
use crate::field::{gf, quadratic_tower, FieldCtx, FieldElem};
use crate::matrix::Matrix;
use crate::poly::PolyFq;

pub const DEFAULT_ENUM_CAP: u64 = 100_000;
const GL_REJECTION_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Mat,
    GL,
    GU,
    Sp,
    Oplus,
    Ominus,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::Mat, Family::GL, Family::GU, Family::Sp, Family::Oplus, Family::Ominus];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mat => "Mat",
            Family::GL => "GL",
            Family::GU => "GU",
            Family::Sp => "Sp",
            Family::Oplus => "Oplus",
            Family::Ominus => "Ominus",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }

    pub fn is_orthogonal(self) -> bool {
        matches!(self, Family::Oplus | Family::Ominus)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A group family with its parameters. For `Sp`, `n` is the rank and the
/// matrices are `2n × 2n`; for every other family `n` is the matrix size.
/// `GU` matrices have entries in `F_{q²}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub n: usize,
    pub q: u64,
}

impl GroupSpec {
    pub fn new(family: Family, n: usize, q: u64) -> Result<GroupSpec> {
        let spec = GroupSpec { family, n, q };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = gf(self.q)?;
        if self.family == Family::GU {
            quadratic_tower(&ctx)?;
        }
        match self.family {
            Family::Mat | Family::GL | Family::GU if self.n == 0 => {
                Err(Error::InvalidSpec(format!("{} needs n ≥ 1", self.family)))
            }
            Family::Sp if self.n == 0 => Err(Error::InvalidSpec("Sp needs rank ≥ 1".into())),
            Family::Oplus | Family::Ominus if self.n < 2 => {
                Err(Error::InvalidSpec(format!("{} needs n ≥ 2", self.family)))
            }
            Family::Oplus | Family::Ominus if self.n % 2 == 1 && self.q.is_multiple_of(2) => Err(Error::Unsupported(
                "odd-dimensional orthogonal groups in even characteristic are symplectic groups".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Matrix size.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::Sp => 2 * self.n,
            _ => self.n,
        }
    }

    pub fn odd_char(&self) -> bool {
        self.q % 2 == 1
    }

    /// The field the matrix entries live in.
    pub fn field(&self) -> Result<Arc<FieldCtx>> {
        let base = gf(self.q)?;
        match self.family {
            Family::GU => quadratic_tower(&base),
            _ => Ok(base),
        }
    }

    pub fn form(&self) -> Result<Option<BilinearForm>> {
        self.validate()?;
        let ctx = self.field()?;
        Ok(match self.family {
            Family::Mat | Family::GL => None,
            Family::GU => Some(BilinearForm::hermitian(&ctx, self.n)),
            Family::Sp => Some(BilinearForm::symplectic(&ctx, self.n)),
            Family::Oplus => Some(BilinearForm::quadratic(&ctx, self.n, true)),
            Family::Ominus => Some(BilinearForm::quadratic(&ctx, self.n, false)),
        })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Sp => write!(f, "Sp({},{})", 2 * self.n, self.q),
            Family::Oplus if self.n % 2 == 1 => write!(f, "O({},{})", self.n, self.q),
            Family::Ominus if self.n % 2 == 1 => write!(f, "O'({},{})", self.n, self.q),
            Family::Oplus => write!(f, "O+({},{})", self.n, self.q),
            Family::Ominus => write!(f, "O-({},{})", self.n, self.q),
            fam => write!(f, "{}({},{})", fam, self.n, self.q),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormType {
    Symplectic,
    Hermitian,
    QuadraticPlus,
    QuadraticMinus,
}

/// A nondegenerate form on the standard basis. For quadratic forms `gram`
/// holds the upper-triangular `C` with `Q(x) = Σ_{i≤j} C_ij x_i x_j`; the
/// polar form is `C + Cᵀ`. Otherwise `gram` is the Gram matrix.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    pub ctx: Arc<FieldCtx>,
    pub form_type: FormType,
    pub gram: Matrix,
}

impl BilinearForm {
    /// Hyperbolic pairs `(e_i, f_i)` with `B(e_i, f_i) = 1`.
    pub fn symplectic(ctx: &Arc<FieldCtx>, rank: usize) -> BilinearForm {
        let mut g = Matrix::zeros(2 * rank, 2 * rank);
        for i in 0..rank {
            g.set(2 * i, 2 * i + 1, FieldElem::ONE);
            g.set(2 * i + 1, 2 * i, ctx.neg(FieldElem::ONE));
        }
        BilinearForm { ctx: ctx.clone(), form_type: FormType::Symplectic, gram: g }
    }

    /// `H(u, v) = Σ u_i v_i^q`.
    pub fn hermitian(ctx: &Arc<FieldCtx>, n: usize) -> BilinearForm {
        BilinearForm { ctx: ctx.clone(), form_type: FormType::Hermitian, gram: Matrix::identity(n) }
    }

    /// Hyperbolic planes, plus an anisotropic plane `x² + xy + c y²` (minus
    /// type, even dimension) or a last square term `x²` / `ν x²` with `ν` a
    /// nonsquare (odd dimension).
    pub fn quadratic(ctx: &Arc<FieldCtx>, n: usize, plus: bool) -> BilinearForm {
        let mut c = Matrix::zeros(n, n);
        let pairs = n / 2;
        let hyperbolic = if n.is_multiple_of(2) && !plus { pairs - 1 } else { pairs };
        for i in 0..hyperbolic {
            c.set(2 * i, 2 * i + 1, FieldElem::ONE);
        }
        if n % 2 == 1 {
            let last = if plus { FieldElem::ONE } else { smallest_nonsquare(ctx) };
            c.set(n - 1, n - 1, last);
        } else if !plus {
            let a = n - 2;
            c.set(a, a, FieldElem::ONE);
            c.set(a, a + 1, FieldElem::ONE);
            c.set(a + 1, a + 1, anisotropic_constant(ctx));
        }
        let form_type = if plus { FormType::QuadraticPlus } else { FormType::QuadraticMinus };
        BilinearForm { ctx: ctx.clone(), form_type, gram: c }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    fn is_quadratic(&self) -> bool {
        matches!(self.form_type, FormType::QuadraticPlus | FormType::QuadraticMinus)
    }

    /// Matrix `P` with pairing `u ↦ uᵀ P v` (Hermitian: `uᵀ P v̄`).
    fn pairing_matrix(&self) -> Matrix {
        if self.is_quadratic() {
            let f = &self.ctx;
            let t = self.gram.transpose();
            let mut p = self.gram.clone();
            for i in 0..p.rows() {
                for j in 0..p.cols() {
                    p.set(i, j, f.add(self.gram.get(i, j), t.get(i, j)));
                }
            }
            p
        } else {
            self.gram.clone()
        }
    }

    fn conj_vec(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        match self.form_type {
            FormType::Hermitian => v.iter().map(|&x| self.ctx.conjugate(x).expect("tower")).collect(),
            _ => v.to_vec(),
        }
    }

    /// `B(u, v)` for the pairing (polar form for quadratic forms).
    pub fn pair(&self, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
        let p = self.pairing_matrix();
        let pv = p.mul_vec(&self.ctx, &self.conj_vec(v));
        dot(&self.ctx, u, &pv)
    }

    /// `Q(v)` for quadratic forms, `B(v, v)` otherwise.
    pub fn norm(&self, v: &[FieldElem]) -> FieldElem {
        if self.is_quadratic() {
            let f = &self.ctx;
            let mut acc = FieldElem::ZERO;
            for i in 0..v.len() {
                for j in i..v.len() {
                    let c = self.gram.get(i, j);
                    if !c.is_zero() {
                        acc = f.add(acc, f.mul(c, f.mul(v[i], v[j])));
                    }
                }
            }
            acc
        } else {
            self.pair(v, v)
        }
    }
}

fn dot(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter().zip(b).fold(FieldElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Smallest (by residue value) nonsquare of an odd-order field.
pub fn smallest_nonsquare(ctx: &FieldCtx) -> FieldElem {
    ctx.nonzero_elements().find(|&x| !ctx.is_square(x)).expect("odd q has nonsquares")
}

/// Smallest `c` with `t² + t + c` irreducible over `F_q`.
pub fn anisotropic_constant(ctx: &Arc<FieldCtx>) -> FieldElem {
    ctx.elements()
        .find(|&c| PolyFq::new(ctx, vec![c, FieldElem::ONE, FieldElem::ONE]).is_irreducible())
        .expect("an irreducible t² + t + c exists")
}

/// Does `m` preserve `form`? Quadratic forms are checked on the polar form
/// and on `Q(M e_i) = Q(e_i)`.
pub fn preserves_form(m: &Matrix, form: &BilinearForm) -> Result<bool> {
    let n = form.dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.rows().max(m.cols()) });
    }
    let p = form.pairing_matrix();
    let cols: Vec<Vec<FieldElem>> = (0..n).map(|j| m.column(j)).collect();
    for i in 0..n {
        for j in 0..n {
            if form.pair(&cols[i], &cols[j]) != p.get(i, j) {
                return Ok(false);
            }
        }
        if form.is_quadratic() && form.norm(&cols[i]) != form.gram.get(i, i) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn order_gl(n: usize, q: u64) -> BigInt {
    let mut o = big_pow(q, (n * n.saturating_sub(1) / 2) as u64);
    for i in 1..=n {
        o *= big_pow(q, i as u64) - 1;
    }
    o
}

pub fn order_gu(n: usize, q: u64) -> BigInt {
    let mut o = big_pow(q, (n * n.saturating_sub(1) / 2) as u64);
    for i in 1..=n {
        let qi = big_pow(q, i as u64);
        o *= if i % 2 == 0 { qi - 1 } else { qi + 1 };
    }
    o
}

/// `|Sp(2·rank, q)|`; `|Sp(0, q)| = 1`.
pub fn order_sp(rank: usize, q: u64) -> BigInt {
    let mut o = big_pow(q, (rank * rank) as u64);
    for i in 1..=rank {
        o *= big_pow(q, 2 * i as u64) - 1;
    }
    o
}

/// `|O^ε(dim, q)|`; for odd `dim` the sign is irrelevant.
pub fn order_o(plus: bool, dim: usize, q: u64) -> BigInt {
    let m = dim / 2;
    if dim % 2 == 1 {
        return order_sp(m, q) * 2;
    }
    if m == 0 {
        return BigInt::one();
    }
    let qm = big_pow(q, m as u64);
    let mut o = big_pow(q, (m * (m - 1)) as u64) * 2 * if plus { qm - 1 } else { qm + 1 };
    for i in 1..m {
        o *= big_pow(q, 2 * i as u64) - 1;
    }
    o
}

pub fn group_order(spec: &GroupSpec) -> Result<BigInt> {
    spec.validate()?;
    let (n, q) = (spec.n, spec.q);
    Ok(match spec.family {
        Family::Mat => big_pow(q, (n * n) as u64),
        Family::GL => order_gl(n, q),
        Family::GU => order_gu(n, q),
        Family::Sp => order_sp(n, q),
        Family::Oplus => order_o(true, n, q),
        Family::Ominus => order_o(false, n, q),
    })
}

/// Incrementally maintained echelon basis for independence tests.
#[derive(Clone, Default)]
struct Echelon {
    rows: Vec<(usize, Vec<FieldElem>)>,
}

impl Echelon {
    /// Reduces `v`; returns the reduced vector if it is independent of the basis.
    fn reduce(&self, f: &FieldCtx, v: &[FieldElem]) -> Option<(usize, Vec<FieldElem>)> {
        let mut w = v.to_vec();
        for (piv, row) in &self.rows {
            let c = w[*piv];
            if !c.is_zero() {
                for (x, &r) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        let piv = w.iter().position(|x| !x.is_zero())?;
        let inv = f.inv(w[piv]).unwrap();
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        Some((piv, w))
    }

    fn push(&mut self, reduced: (usize, Vec<FieldElem>)) {
        self.rows.push(reduced);
    }
}

/// Affine solution set `x0 + span(basis)` of a linear system.
struct Affine {
    x0: Vec<FieldElem>,
    basis: Vec<Vec<FieldElem>>,
}

impl Affine {
    fn point(&self, f: &FieldCtx, coeffs: &[FieldElem]) -> Vec<FieldElem> {
        let mut v = self.x0.clone();
        for (b, &c) in self.basis.iter().zip(coeffs) {
            if !c.is_zero() {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(c, y));
                }
            }
        }
        v
    }
}

/// Solves `A x = rhs` (`A` given as rows of length `n`).
fn solve_affine(f: &FieldCtx, rows: &[Vec<FieldElem>], rhs: &[FieldElem], n: usize) -> Option<Affine> {
    let mut a: Vec<Vec<FieldElem>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, &b)| {
            let mut r = r.clone();
            r.push(b);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(p, rank);
        let inv = f.inv(a[rank][col]).unwrap();
        for x in a[rank].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for r in 0..a.len() {
            if r != rank && !a[r][col].is_zero() {
                let c = a[r][col];
                let pivot_row = a[rank].clone();
                for (x, &y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if a[rank..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut x0 = vec![FieldElem::ZERO; n];
    for (i, &pc) in pivots.iter().enumerate() {
        x0[pc] = a[i][n];
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![FieldElem::ZERO; n];
            v[fc] = FieldElem::ONE;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(a[i][fc]);
            }
            v
        })
        .collect();
    Some(Affine { x0, basis })
}

/// Column-by-column constraint state shared by the enumerator and sampler.
struct Builder<'a> {
    spec: GroupSpec,
    ctx: &'a Arc<FieldCtx>,
    form: Option<BilinearForm>,
    pairing: Option<Matrix>,
    n: usize,
}

impl<'a> Builder<'a> {
    fn new(spec: GroupSpec, ctx: &'a Arc<FieldCtx>) -> Result<Builder<'a>> {
        let form = spec.form()?;
        let pairing = form.as_ref().map(|f| f.pairing_matrix());
        Ok(Builder { spec, ctx, form, pairing, n: spec.dim() })
    }

    /// Solution space for column `j` given earlier columns.
    fn candidates(&self, cols: &[Vec<FieldElem>]) -> Option<Affine> {
        let j = cols.len();
        let (Some(form), Some(p)) = (&self.form, &self.pairing) else {
            return solve_affine(self.ctx, &[], &[], self.n);
        };
        // B(v, c_i) = P[j][i] for i < j; B(v, c) = vᵀ P c̄ is linear in v.
        let rows: Vec<Vec<FieldElem>> = cols.iter().map(|c| p.mul_vec(self.ctx, &form.conj_vec(c))).collect();
        let rhs: Vec<FieldElem> = (0..j).map(|i| p.get(j, i)).collect();
        solve_affine(self.ctx, &rows, &rhs, self.n)
    }

    fn norm_ok(&self, j: usize, v: &[FieldElem]) -> bool {
        match &self.form {
            None => true,
            Some(form) => {
                let target =
                    if form.is_quadratic() { form.gram.get(j, j) } else { self.pairing.as_ref().unwrap().get(j, j) };
                form.norm(v) == target
            }
        }
    }

    fn needs_independence(&self) -> bool {
        self.spec.family != Family::Mat
    }
}

/// Calls `visit` on every element of the group, each exactly once.
pub fn for_each_element(spec: &GroupSpec, cap: u64, mut visit: impl FnMut(&Matrix)) -> Result<()> {
    let order = group_order(spec)?;
    if order > BigInt::from(cap) {
        return Err(Error::OrderOverCap { order: order.to_string(), cap });
    }
    let ctx = spec.field()?;
    let builder = Builder::new(*spec, &ctx)?;
    let mut cols = Vec::with_capacity(builder.n);
    recurse(&builder, &mut cols, &Echelon::default(), &mut visit);
    Ok(())
}

fn recurse(b: &Builder, cols: &mut Vec<Vec<FieldElem>>, ech: &Echelon, visit: &mut impl FnMut(&Matrix)) {
    if cols.len() == b.n {
        visit(&Matrix::from_columns(cols));
        return;
    }
    let Some(aff) = b.candidates(cols) else { return };
    let q = b.ctx.q() as u64;
    let dim = aff.basis.len();
    let total = q.pow(dim as u32);
    let mut coeffs = vec![FieldElem::ZERO; dim];
    for code in 0..total {
        let mut c = code;
        for x in coeffs.iter_mut() {
            *x = FieldElem((c % q) as u32);
            c /= q;
        }
        let v = aff.point(b.ctx, &coeffs);
        if !b.norm_ok(cols.len(), &v) {
            continue;
        }
        let mut next = ech.clone();
        if b.needs_independence() {
            match ech.reduce(b.ctx, &v) {
                Some(r) => next.push(r),
                None => continue,
            }
        }
        cols.push(v);
        recurse(b, cols, &next, visit);
        cols.pop();
    }
}

/// All elements of a group of order at most `cap`.
pub fn enumerate_group(spec: &GroupSpec, cap: u64) -> Result<Vec<Matrix>> {
    let mut out = Vec::new();
    for_each_element(spec, cap, |m| out.push(m.clone()))?;
    Ok(out)
}

/// A uniformly random element, reproducible from `seed`.
pub fn sample_uniform(spec: &GroupSpec, seed: u64) -> Result<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(spec, &mut rng)
}

/// A uniformly random element drawn from `rng`.
pub fn sample_with<R: Rng>(spec: &GroupSpec, rng: &mut R) -> Result<Matrix> {
    if spec.family == Family::GL {
        return sample_gl_counted(spec.n, spec.q, rng).map(|(m, _)| m);
    }
    let ctx = spec.field()?;
    let b = Builder::new(*spec, &ctx)?;
    let q = ctx.q();
    let mut cols: Vec<Vec<FieldElem>> = Vec::with_capacity(b.n);
    let mut ech = Echelon::default();
    while cols.len() < b.n {
        let aff =
            b.candidates(&cols).ok_or_else(|| Error::InvalidSpec(format!("no admissible column for {}", spec)))?;
        let mut tries = 0u64;
        loop {
            tries += 1;
            if tries > GL_REJECTION_CAP {
                return Err(Error::RejectionCap(GL_REJECTION_CAP));
            }
            let coeffs: Vec<FieldElem> = (0..aff.basis.len()).map(|_| FieldElem(rng.gen_range(0..q))).collect();
            let v = aff.point(&ctx, &coeffs);
            if !b.norm_ok(cols.len(), &v) {
                continue;
            }
            if b.needs_independence() {
                match ech.reduce(&ctx, &v) {
                    Some(r) => ech.push(r),
                    None => continue,
                }
            }
            cols.push(v);
            break;
        }
    }
    Ok(Matrix::from_columns(&cols))
}

/// Rejection sampling of `GL(n, q)`: returns the matrix and the number of
/// random matrices drawn.
pub fn sample_gl_counted<R: Rng>(n: usize, q: u64, rng: &mut R) -> Result<(Matrix, u64)> {
    let ctx = gf(q)?;
    for attempt in 1..=GL_REJECTION_CAP {
        let m = Matrix::from_rows(
            (0..n).map(|_| (0..n).map(|_| FieldElem(rng.gen_range(0..ctx.q()))).collect()).collect(),
        )?;
        if m.is_invertible(&ctx) {
            return Ok((m, attempt));
        }
    }
    Err(Error::RejectionCap(GL_REJECTION_CAP))
}
