//! Truncated power series in `u` with exact rational coefficients, the
//! product identities for the irreducible counts and the majorizing
//! products used to bound how many characteristic polynomials can come
//! from an extension field subgroup.
//!
//! A series carries its truncation `D`: coefficients of degree `0..=D` are
//! exact, everything above is unknown. Binary operations keep the smaller
//! truncation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{big_pow, is_prime};
use crate::charpoly_dist::ExactQ;
use crate::counting::{count_N, count_N0, count_star, count_unitary, star_linear_exponent};
use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatSeries {
    coeffs: Vec<ExactQ>,
}

fn q_int(n: impl Into<BigInt>) -> ExactQ {
    ExactQ::from_integer(n.into())
}

impl RatSeries {
    /// Pads with zeros or cuts to exactly `trunc + 1` coefficients.
    pub fn new(mut coeffs: Vec<ExactQ>, trunc: usize) -> RatSeries {
        coeffs.resize(trunc + 1, ExactQ::zero());
        RatSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], trunc: usize) -> RatSeries {
        RatSeries::new(coeffs.iter().map(|&c| q_int(c)).collect(), trunc)
    }

    pub fn zero(trunc: usize) -> RatSeries {
        RatSeries::new(Vec::new(), trunc)
    }

    pub fn one(trunc: usize) -> RatSeries {
        RatSeries::new(vec![ExactQ::one()], trunc)
    }

    /// `c·u^k`.
    pub fn monomial(c: ExactQ, k: usize, trunc: usize) -> RatSeries {
        let mut s = RatSeries::zero(trunc);
        if k <= trunc {
            s.coeffs[k] = c;
        }
        s
    }

    /// `1/(1 - a·u^step)`.
    pub fn geometric(a: &ExactQ, step: usize, trunc: usize) -> RatSeries {
        assert!(step >= 1, "geometric series needs a positive step");
        let mut s = RatSeries::zero(trunc);
        let mut p = ExactQ::one();
        for k in (0..=trunc).step_by(step) {
            s.coeffs[k] = p.clone();
            p *= a;
        }
        s
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExactQ] {
        &self.coeffs
    }

    /// `None` beyond the truncation.
    pub fn coeff(&self, n: usize) -> Option<&ExactQ> {
        self.coeffs.get(n)
    }

    pub fn truncate(&self, trunc: usize) -> RatSeries {
        RatSeries::new(self.coeffs[..=trunc.min(self.trunc())].to_vec(), trunc.min(self.trunc()))
    }

    pub fn add(&self, other: &RatSeries) -> RatSeries {
        let d = self.trunc().min(other.trunc());
        RatSeries::new((0..=d).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(), d)
    }

    pub fn sub(&self, other: &RatSeries) -> RatSeries {
        let d = self.trunc().min(other.trunc());
        RatSeries::new((0..=d).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(), d)
    }

    pub fn scale(&self, c: &ExactQ) -> RatSeries {
        RatSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Cauchy product, truncated at the smaller truncation.
    pub fn mul(&self, other: &RatSeries) -> RatSeries {
        let d = self.trunc().min(other.trunc());
        let mut out = vec![ExactQ::zero(); d + 1];
        for (i, a) in self.coeffs[..=d].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs[..=d - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        RatSeries { coeffs: out }
    }

    /// `f(u^k)`. Known up to degree `k·D + k - 1`.
    pub fn substitute_power(&self, k: usize) -> RatSeries {
        assert!(k >= 1, "substitution needs a positive power");
        let d = k * self.trunc() + k - 1;
        let mut s = RatSeries::zero(d);
        for (i, c) in self.coeffs.iter().enumerate() {
            s.coeffs[i * k] = c.clone();
        }
        s
    }

    pub fn reciprocal(&self) -> Result<RatSeries> {
        let f0 = &self.coeffs[0];
        if f0.is_zero() {
            return Err(Error::Series("reciprocal of a series with zero constant term".into()));
        }
        let inv0 = f0.recip();
        let mut r: Vec<ExactQ> = Vec::with_capacity(self.coeffs.len());
        r.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = ExactQ::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &r[n - k];
                }
            }
            r.push(-acc * &inv0);
        }
        Ok(RatSeries { coeffs: r })
    }

    /// Requires constant term 1.
    pub fn log(&self) -> Result<RatSeries> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Series("log needs constant term 1".into()));
        }
        let mut g = vec![ExactQ::zero(); self.coeffs.len()];
        for n in 1..self.coeffs.len() {
            let mut acc = q_int(n) * &self.coeffs[n];
            for (k, gk) in g.iter().enumerate().take(n).skip(1) {
                if !gk.is_zero() && !self.coeffs[n - k].is_zero() {
                    acc -= q_int(k) * gk * &self.coeffs[n - k];
                }
            }
            g[n] = acc / q_int(n);
        }
        Ok(RatSeries { coeffs: g })
    }

    /// Requires constant term 0.
    pub fn exp(&self) -> Result<RatSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Series("exp needs constant term 0".into()));
        }
        let mut f = vec![ExactQ::zero(); self.coeffs.len()];
        f[0] = ExactQ::one();
        for n in 1..self.coeffs.len() {
            let mut acc = ExactQ::zero();
            for k in 1..=n {
                if !self.coeffs[k].is_zero() {
                    acc += q_int(k) * &self.coeffs[k] * &f[n - k];
                }
            }
            f[n] = acc / q_int(n);
        }
        Ok(RatSeries { coeffs: f })
    }

    /// `f^alpha = exp(alpha·log f)`; `f` must have constant term 1.
    pub fn pow_rational(&self, alpha: &ExactQ) -> Result<RatSeries> {
        self.log()?.scale(alpha).exp()
    }

    /// Coefficientwise `self ≤ other` on the common truncation.
    pub fn dominated_by(&self, other: &RatSeries) -> bool {
        self.first_excess(other).is_none()
    }

    /// Smallest degree where `self` exceeds `other`.
    pub fn first_excess(&self, other: &RatSeries) -> Option<usize> {
        let d = self.trunc().min(other.trunc());
        (0..=d).find(|&i| self.coeffs[i] > other.coeffs[i])
    }

    /// Smallest degree where the two differ on the common truncation.
    pub fn first_difference(&self, other: &RatSeries) -> Option<usize> {
        let d = self.trunc().min(other.trunc());
        (0..=d).find(|&i| self.coeffs[i] != other.coeffs[i])
    }

    /// Integer coefficients, or `None` if any is fractional.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

impl fmt::Display for RatSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*u")?,
                _ => write!(f, "{c}*u^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(u^{})", self.trunc() + 1)
    }
}

/// `∏ (1 - u^step)^{-exponent}` over the given factors, as
/// `exp(Σ exponent·(-log(1 - u^step)))`.
pub fn euler_product<I>(factors: I, trunc: usize) -> RatSeries
where
    I: IntoIterator<Item = (usize, ExactQ)>,
{
    let mut log = vec![ExactQ::zero(); trunc + 1];
    for (step, alpha) in factors {
        assert!(step >= 1, "euler_product needs positive steps");
        if alpha.is_zero() {
            continue;
        }
        for m in 1..=trunc / step {
            log[step * m] += &alpha / q_int(m);
        }
    }
    RatSeries { coeffs: log }.exp().expect("log series has zero constant term")
}

/// Coefficients `c_0..=c_rmax` of `(1 - u)^{-alpha}`.
pub fn gen_binom(alpha: &ExactQ, rmax: usize) -> Vec<ExactQ> {
    let mut out = Vec::with_capacity(rmax + 1);
    let mut c = ExactQ::one();
    out.push(c.clone());
    for r in 1..=rmax {
        c = c * (alpha + q_int(r - 1)) / q_int(r);
        out.push(c.clone());
    }
    out
}

fn check_identity(lhs: &RatSeries, rhs: &RatSeries, what: &str) -> Result<()> {
    match lhs.first_difference(rhs) {
        None => Ok(()),
        Some(d) => Err(Error::IdentityViolation {
            degree: d,
            detail: format!("{what}: product gives {}, closed form {}", lhs.coeffs[d], rhs.coeffs[d]),
        }),
    }
}

fn check_gf_args(q: u64, trunc: usize) -> Result<()> {
    if q < 2 {
        return Err(Error::OutOfRange(format!("q = {q} must be at least 2")));
    }
    if trunc < 1 {
        return Err(Error::OutOfRange("truncation must be at least 1".into()));
    }
    Ok(())
}

/// `∏_d (1 - u^d)^{-N(q;d)}`, checked against `(1 - u)/(1 - qu)`.
pub fn gf_plain(q: u64, trunc: usize) -> Result<RatSeries> {
    check_gf_args(q, trunc)?;
    let lhs = euler_product((1..=trunc).map(|d| (d, q_int(count_N(q, d)))), trunc);
    let rhs = RatSeries::geometric(&q_int(q), 1, trunc).mul(&RatSeries::from_ints(&[1, -1], trunc));
    check_identity(&lhs, &rhs, "plain")?;
    Ok(lhs)
}

/// `∏_{d odd} (1 - u^d)^{-Ñ(q;d)} ∏_d (1 - u^{2d})^{-M̃(q;d)}`, checked against `(1 + u)/(1 - qu)`.
pub fn gf_unitary(q: u64, trunc: usize) -> Result<RatSeries> {
    check_gf_args(q, trunc)?;
    let mut factors = Vec::new();
    for d in 1..=trunc {
        let (n, m) = count_unitary(q, d);
        if d % 2 == 1 {
            factors.push((d, q_int(n)));
        }
        if 2 * d <= trunc {
            factors.push((2 * d, q_int(m)));
        }
    }
    let lhs = euler_product(factors, trunc);
    let rhs = RatSeries::geometric(&q_int(q), 1, trunc).mul(&RatSeries::from_ints(&[1, 1], trunc));
    check_identity(&lhs, &rhs, "unitary")?;
    Ok(lhs)
}

/// `(1 - u)^{-e} ∏_d (1 - u^d)^{-N*(q;2d)} (1 - u^d)^{-M*(q;d)}`, checked against `1/(1 - qu)`.
pub fn gf_star(q: u64, trunc: usize, e: usize) -> Result<RatSeries> {
    check_gf_args(q, trunc)?;
    if e != 1 && e != 2 {
        return Err(Error::OutOfRange(format!("e = {e} must be 1 or 2")));
    }
    let mut factors = vec![(1, q_int(e))];
    for d in 1..=trunc {
        factors.push((d, q_int(count_star(q, 2 * d).0 + count_star(q, d).1)));
    }
    let lhs = euler_product(factors, trunc);
    let rhs = RatSeries::geometric(&q_int(q), 1, trunc);
    check_identity(&lhs, &rhs, "star")?;
    Ok(lhs)
}

/// Which counting product [`coef_upper_product`] expands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UpperFlavor {
    /// `∏ (1 - u^{bd})^{-N(q;bd)} ∏ (1 - u^{bd})^{-N(q;d)}`.
    Gl,
    /// The unitary analogue, `b` odd.
    U,
    /// The symplectic product with `(1 - u^b)^{-e}`, `b` odd.
    Sp,
    /// The symplectic product at `b = 2`.
    SpEven,
    /// `∏ (1 - u^{bd})^{-q^{bd}/(bd)}`.
    Uhelp,
}

impl UpperFlavor {
    pub const ALL: [UpperFlavor; 5] =
        [UpperFlavor::Gl, UpperFlavor::U, UpperFlavor::Sp, UpperFlavor::SpEven, UpperFlavor::Uhelp];

    pub fn name(self) -> &'static str {
        match self {
            UpperFlavor::Gl => "gl",
            UpperFlavor::U => "u",
            UpperFlavor::Sp => "sp",
            UpperFlavor::SpEven => "sp-even",
            UpperFlavor::Uhelp => "uhelp",
        }
    }

    pub fn parse(s: &str) -> Result<UpperFlavor> {
        let lower = s.to_ascii_lowercase();
        UpperFlavor::ALL
            .into_iter()
            .find(|f| f.name() == lower)
            .ok_or_else(|| Error::Parse(format!("unknown flavor '{s}' (expected gl, u, sp, sp-even, uhelp)")))
    }
}

impl fmt::Display for UpperFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact coefficients of the product named by `flavor` up to `u^trunc`.
///
/// The coefficient of `u^n` (for `Gl`, `U`) or of `u^n` with `2n` the
/// symplectic dimension (for `Sp`, `SpEven`) bounds the number of
/// characteristic polynomials whose irreducible factors each have degree
/// divisible by `b` or multiplicity divisible by `b`.
pub fn coef_upper_product(q: u64, b: usize, flavor: UpperFlavor, trunc: usize) -> Result<RatSeries> {
    check_gf_args(q, trunc)?;
    if !is_prime(b as u64) {
        return Err(Error::OutOfRange(format!("b = {b} must be prime")));
    }
    match flavor {
        UpperFlavor::U | UpperFlavor::Sp if b == 2 => {
            return Err(Error::OutOfRange(format!("flavor {flavor} needs an odd prime b")));
        }
        UpperFlavor::SpEven if b != 2 => {
            return Err(Error::OutOfRange("flavor sp-even needs b = 2".into()));
        }
        _ => {}
    }
    let mut factors: Vec<(usize, ExactQ)> = Vec::new();
    let steps = trunc / b;
    match flavor {
        UpperFlavor::Gl => {
            for d in 1..=steps {
                factors.push((b * d, q_int(count_N(q, b * d) + count_N(q, d))));
            }
        }
        UpperFlavor::U => {
            for d in 1..=steps {
                if d % 2 == 1 {
                    factors.push((b * d, q_int(count_unitary(q, b * d).0 + count_unitary(q, d).0)));
                }
                if 2 * b * d <= trunc {
                    factors.push((2 * b * d, q_int(count_unitary(q, b * d).1 + count_unitary(q, d).1)));
                }
            }
        }
        UpperFlavor::Sp | UpperFlavor::SpEven => {
            factors.push((b, q_int(star_linear_exponent(q))));
            for d in 1..=steps {
                let outer = count_star(q, 2 * b * d).0 + count_star(q, b * d).1;
                let inner = count_star(q, 2 * d).0 + count_star(q, d).1;
                factors.push((b * d, q_int(outer + inner)));
            }
        }
        UpperFlavor::Uhelp => {
            for d in 1..=steps {
                let bd = (b * d) as u64;
                factors.push((b * d, ExactQ::new(big_pow(q, bd), BigInt::from(bd))));
            }
        }
    }
    Ok(euler_product(factors, trunc))
}

/// `(1/(1 - uq))·(1/(1 - uq^b))^{1/b}`, the series whose `u^{n/b}`
/// coefficient majorizes the `Gl` product at `u^n`.
pub fn gl_majorant(q: u64, b: usize, trunc: usize) -> Result<RatSeries> {
    let qb = q_int(big_pow(q, b as u64));
    let root = RatSeries::from_ints(&[1], trunc)
        .sub(&RatSeries::monomial(qb, 1, trunc))
        .pow_rational(&ExactQ::new(BigInt::from(-1), BigInt::from(b)))?;
    Ok(RatSeries::geometric(&q_int(q), 1, trunc).mul(&root))
}

/// Both sides of the split-sum formula for the coefficient of `u^m` in
/// [`gl_majorant`]: the series coefficient, and
/// `Σ_{r=0}^{m} q^{m-r} q^{rb} c_r` with `c_r` the coefficient of `u^r` in `(1 - u)^{-1/b}`.
pub fn split_sum(q: u64, b: usize, m: usize) -> Result<(ExactQ, ExactQ)> {
    let series = gl_majorant(q, b, m)?;
    let c = gen_binom(&ExactQ::new(BigInt::one(), BigInt::from(b)), m);
    let mut sum = ExactQ::zero();
    for (r, cr) in c.iter().enumerate() {
        sum += cr * q_int(big_pow(q, (m - r) as u64) * big_pow(q, (r * b) as u64));
    }
    Ok((series.coeffs[m].clone(), sum))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Dominated,
}

/// One link `lhs = rhs` or `lhs ≪ rhs` of a majorization chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorizationStep {
    pub label: String,
    pub relation: Relation,
    pub trunc: usize,
    /// First degree where the relation fails.
    pub failure: Option<usize>,
}

impl MajorizationStep {
    fn check(label: String, relation: Relation, lhs: &RatSeries, rhs: &RatSeries) -> MajorizationStep {
        let failure = match relation {
            Relation::Equal => lhs.first_difference(rhs),
            Relation::Dominated => lhs.first_excess(rhs),
        };
        MajorizationStep { label, relation, trunc: lhs.trunc().min(rhs.trunc()), failure }
    }

    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// `(1 - c·u^step)^{-alpha}`.
fn binomial_power(c: &ExactQ, step: usize, alpha: &ExactQ, trunc: usize) -> RatSeries {
    let mut s = RatSeries::zero(trunc);
    let coefs = gen_binom(alpha, trunc / step);
    let mut p = ExactQ::one();
    for (j, g) in coefs.iter().enumerate() {
        s.coeffs[j * step] = g * &p;
        p *= c;
    }
    s
}

fn star_factors(q: u64, b: usize, outer: bool, trunc: usize) -> Vec<(usize, ExactQ)> {
    let mut f = Vec::new();
    if !outer {
        f.push((b, q_int(star_linear_exponent(q))));
    }
    for d in 1..=trunc / b {
        let k = if outer { b * d } else { d };
        f.push((b * d, q_int(count_star(q, 2 * k).0 + count_star(q, k).1)));
    }
    f
}

fn unitary_factors(q: u64, b: usize, outer: bool, trunc: usize) -> Vec<(usize, ExactQ)> {
    let mut f = Vec::new();
    for d in 1..=trunc / b {
        let k = if outer { b * d } else { d };
        let (n, m) = count_unitary(q, k);
        if d % 2 == 1 {
            f.push((b * d, q_int(n)));
        }
        if 2 * b * d <= trunc {
            f.push((2 * b * d, q_int(m)));
        }
    }
    f
}

/// Every coefficientwise step used to majorize the counting products for
/// the extension degree `b`, each checked exactly up to `u^trunc`.
pub fn majorization_steps(q: u64, b: usize, trunc: usize) -> Result<Vec<MajorizationStep>> {
    check_gf_args(q, trunc)?;
    if !is_prime(b as u64) {
        return Err(Error::OutOfRange(format!("b = {b} must be prime")));
    }
    use Relation::{Dominated, Equal};
    let mut steps = Vec::new();
    let qq = q_int(q);
    let qb = q_int(big_pow(q, b as u64));
    let inv_b = ExactQ::new(BigInt::one(), BigInt::from(b));
    let one = ExactQ::one();
    let qb_u64 = u64::try_from(big_pow(q, b as u64)).map_err(|_| Error::OutOfRange(format!("{q}^{b} overflows")))?;
    let geo_b = RatSeries::geometric(&qq, b, trunc);
    let minus_ub = RatSeries::one(trunc).sub(&RatSeries::monomial(one.clone(), b, trunc));
    let plus_ub = RatSeries::one(trunc).add(&RatSeries::monomial(one.clone(), b, trunc));

    // linear groups
    let gl_inner = euler_product((1..=trunc / b).map(|d| (b * d, q_int(count_N(q, d)))), trunc);
    let gl_inner_closed = geo_b.mul(&minus_ub);
    steps.push(MajorizationStep::check(
        format!("gl inner = (1-u^{b})/(1-q u^{b})"),
        Equal,
        &gl_inner,
        &gl_inner_closed,
    ));
    steps.push(MajorizationStep::check(format!("gl inner << 1/(1-q u^{b})"), Dominated, &gl_inner, &geo_b));
    let gl_outer = euler_product((1..=trunc / b).map(|d| (b * d, q_int(count_N(q, b * d)))), trunc);
    let ext = euler_product((1..=trunc / b).map(|d| (b * d, &inv_b * q_int(count_N(qb_u64, d)))), trunc);
    steps.push(MajorizationStep::check(format!("gl outer << [prod over F_q^{b}]^(1/{b})"), Dominated, &gl_outer, &ext));
    let ext_closed = binomial_power(&qb, b, &inv_b, trunc).mul(&binomial_power(&one, b, &-inv_b.clone(), trunc));
    steps.push(MajorizationStep::check(
        format!("[prod over F_q^{b}]^(1/{b}) = ((1-u^{b})/(1-q^{b}u^{b}))^(1/{b})"),
        Equal,
        &ext,
        &ext_closed,
    ));
    let root = binomial_power(&qb, b, &inv_b, trunc);
    steps.push(MajorizationStep::check(
        format!("((1-u^{b})/(1-q^{b}u^{b}))^(1/{b}) << (1-q^{b}u^{b})^(-1/{b})"),
        Dominated,
        &ext_closed,
        &root,
    ));
    let gl = coef_upper_product(q, b, UpperFlavor::Gl, trunc)?;
    steps.push(MajorizationStep::check("gl product = outer * inner".into(), Equal, &gl, &gl_outer.mul(&gl_inner)));
    let gl_major = gl_majorant(q, b, trunc / b)?.substitute_power(b).truncate(trunc);
    steps.push(MajorizationStep::check("gl product << majorant".into(), Dominated, &gl, &gl_major));

    // Uhelp: q^{bd}/(bd) ≤ (2/b)·N0(q^b;d)
    let uhelp = coef_upper_product(q, b, UpperFlavor::Uhelp, trunc)?;
    let two_over_b = ExactQ::new(BigInt::from(2), BigInt::from(b));
    let n0_pow = plain_power_product(qb_u64, b, &two_over_b, trunc);
    steps.push(MajorizationStep::check(format!("uhelp << [prod N0 over F_q^{b}]^(2/{b})"), Dominated, &uhelp, &n0_pow));
    let uhelp_closed = binomial_power(&qb, b, &two_over_b, trunc);
    steps.push(MajorizationStep::check(
        format!("[prod N0 over F_q^{b}]^(2/{b}) = (1-q^{b}u^{b})^(-2/{b})"),
        Equal,
        &n0_pow,
        &uhelp_closed,
    ));

    if b % 2 == 1 {
        // unitary groups
        let u_inner = euler_product(unitary_factors(q, b, false, trunc), trunc);
        let u_inner_closed = geo_b.mul(&plus_ub);
        steps.push(MajorizationStep::check(
            format!("u inner = (1+u^{b})/(1-q u^{b})"),
            Equal,
            &u_inner,
            &u_inner_closed,
        ));
        let u_outer = euler_product(unitary_factors(q, b, true, trunc), trunc);
        steps.push(MajorizationStep::check("u outer << uhelp".into(), Dominated, &u_outer, &uhelp));
        let u = coef_upper_product(q, b, UpperFlavor::U, trunc)?;
        steps.push(MajorizationStep::check("u product = outer * inner".into(), Equal, &u, &u_outer.mul(&u_inner)));
        let u_major = u_inner_closed.mul(&uhelp);
        steps.push(MajorizationStep::check("u product << (1+u^b)/(1-q u^b) * uhelp".into(), Dominated, &u, &u_major));
        let slack = geo_b.scale(&(ExactQ::one() + ExactQ::new(BigInt::one(), BigInt::from(q))));
        steps.push(MajorizationStep::check(
            "(1+u^b)/(1-q u^b) << (1+1/q)/(1-q u^b)".into(),
            Dominated,
            &u_inner_closed,
            &slack,
        ));
    }

    // symplectic groups
    let sp_flavor = if b == 2 { UpperFlavor::SpEven } else { UpperFlavor::Sp };
    let sp_inner = euler_product(star_factors(q, b, false, trunc), trunc);
    steps.push(MajorizationStep::check(format!("sp inner = 1/(1-q u^{b})"), Equal, &sp_inner, &geo_b));
    let sp_outer = euler_product(star_factors(q, b, true, trunc), trunc);
    steps.push(MajorizationStep::check("sp outer << uhelp".into(), Dominated, &sp_outer, &uhelp));
    let sp = coef_upper_product(q, b, sp_flavor, trunc)?;
    steps.push(MajorizationStep::check("sp product = outer * inner".into(), Equal, &sp, &sp_outer.mul(&sp_inner)));
    steps.push(MajorizationStep::check("sp product << uhelp/(1-q u^b)".into(), Dominated, &sp, &geo_b.mul(&uhelp)));
    if b == 2 {
        let two_thirds = ExactQ::new(BigInt::from(2), BigInt::from(3));
        let n0_pow = plain_power_product(qb_u64, 2, &two_thirds, trunc);
        steps.push(MajorizationStep::check("uhelp << [prod N0 over F_q^2]^(2/3)".into(), Dominated, &uhelp, &n0_pow));
        let closed = binomial_power(&qb, 2, &two_thirds, trunc);
        steps.push(MajorizationStep::check(
            "[prod N0 over F_q^2]^(2/3) = (1-q^2u^2)^(-2/3)".into(),
            Equal,
            &n0_pow,
            &closed,
        ));
    }
    Ok(steps)
}

/// Rational lower bound for `e`.
const E_LOWER: (i64, i64) = (2_718_281, 1_000_000);

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub r: usize,
    pub coef: ExactQ,
    /// `c_r · b · r^{1-1/b}`.
    pub normalized: f64,
}

/// Coefficients `c_r` of `(1 - u)^{-1/b}` and the shape checks on them.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayTable {
    pub b: usize,
    pub rows: Vec<DecayRow>,
    /// `c_r` strictly decreasing for `r ≥ 1`.
    pub raw_decreasing: bool,
    /// `c_r · b · r^{1-1/b}` nondecreasing for `r ≥ 1`.
    pub normalized_nondecreasing: bool,
    /// `c_r · b · r^{1-1/b} ≤ e^{1/b}` for every `r ≥ 1`.
    pub within_envelope: bool,
}

impl DecayTable {
    pub fn holds(&self) -> bool {
        self.raw_decreasing && self.normalized_nondecreasing && self.within_envelope
    }
}

/// All comparisons are exact: powers of `r^{1-1/b}` are cleared by raising
/// both sides to the `b`-th power.
pub fn gen_binom_decay(b: usize, rmax: usize) -> Result<DecayTable> {
    if b < 2 || rmax < 2 {
        return Err(Error::OutOfRange(format!("need b >= 2 and rmax >= 2 (got b = {b}, rmax = {rmax})")));
    }
    let alpha = ExactQ::new(BigInt::one(), BigInt::from(b));
    let c = gen_binom(&alpha, rmax);
    let bb = b as u32;
    let e_lower = ExactQ::new(BigInt::from(E_LOWER.0), BigInt::from(E_LOWER.1));

    let raw_decreasing = (1..rmax).all(|r| c[r + 1] < c[r]);
    // s_{r+1} ≥ s_r  ⇔  (c_{r+1}/c_r)^b · ((r+1)/r)^{b-1} ≥ 1
    let normalized_nondecreasing = (1..rmax).all(|r| {
        let ratio = &c[r + 1] / &c[r];
        let grow = ExactQ::new(BigInt::from(r + 1), BigInt::from(r));
        num_traits::pow(ratio, b) * num_traits::pow(grow, b - 1) >= ExactQ::one()
    });
    // s_r^b = (c_r·b)^b · r^{b-1} ≤ e
    let within_envelope = (1..=rmax).all(|r| {
        let cb = &c[r] * q_int(b);
        num_traits::pow(cb, b) * q_int(BigInt::from(r).pow(bb - 1)) <= e_lower
    });

    let rows = c
        .iter()
        .enumerate()
        .map(|(r, coef)| {
            let normalized =
                if r == 0 { 0.0 } else { ratio_to_f64(coef) * b as f64 * (r as f64).powf(1.0 - 1.0 / b as f64) };
            DecayRow { r, coef: coef.clone(), normalized }
        })
        .collect();
    Ok(DecayTable { b, rows, raw_decreasing, normalized_nondecreasing, within_envelope })
}

/// Nearest `f64` to a rational, robust to huge numerators and denominators.
pub fn ratio_to_f64(x: &ExactQ) -> f64 {
    let (n, d) = (x.numer(), x.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000) as usize;
    let nf = (n.abs() >> shift).to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let df = (d >> shift).to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let v = nf / df;
    if n.is_negative() {
        -v
    } else {
        v
    }
}

/// `∏_d (1 - u^{bd})^{-alpha·N0(q_b;d)}`.
pub fn plain_power_product(q_b: u64, b: usize, alpha: &ExactQ, trunc: usize) -> RatSeries {
    euler_product((1..=trunc / b).map(|d| (b * d, alpha * q_int(count_N0(q_b, d)))), trunc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> ExactQ {
        ExactQ::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn geometric_coefficients() {
        let s = RatSeries::geometric(&r(3, 1), 1, 6);
        for (k, c) in s.coeffs().iter().enumerate() {
            assert_eq!(*c, q_int(3i64.pow(k as u32)));
        }
    }

    #[test]
    fn reciprocal_of_one_minus_u() {
        let f = RatSeries::from_ints(&[1, -1], 10);
        assert_eq!(f.mul(&f.reciprocal().unwrap()), RatSeries::one(10));
        assert!(RatSeries::from_ints(&[0, 1], 4).reciprocal().is_err());
    }

    #[test]
    fn log_exp_errors() {
        assert!(RatSeries::from_ints(&[2, 1], 4).log().is_err());
        assert!(RatSeries::from_ints(&[1, 1], 4).exp().is_err());
    }

    #[test]
    fn pow_rational_examples() {
        let f = RatSeries::from_ints(&[1, -1], 8).reciprocal().unwrap();
        let half = f.pow_rational(&r(1, 2)).unwrap();
        assert_eq!(half.coeff(2), Some(&r(3, 8)));
        let two_thirds = f.pow_rational(&r(2, 3)).unwrap();
        assert_eq!(two_thirds.coeff(1), Some(&r(2, 3)));
        let one = f.pow_rational(&r(1, 1)).unwrap();
        assert!(one.coeffs().iter().all(|c| c.is_one()));
    }

    #[test]
    fn truncation_is_tightest() {
        let a = RatSeries::one(5);
        let b = RatSeries::one(9);
        assert_eq!(a.mul(&b).trunc(), 5);
        assert_eq!(a.add(&b).trunc(), 5);
        assert_eq!(RatSeries::one(3).substitute_power(2).trunc(), 7);
        assert_eq!(a.coeff(6), None);
    }

    #[test]
    fn small_identities() {
        gf_plain(2, 20).unwrap();
        gf_plain(5, 15).unwrap();
        let u = gf_unitary(2, 12).unwrap();
        assert_eq!(u.coeff(1), Some(&q_int(3)));
        gf_unitary(3, 10).unwrap();
        gf_star(3, 10, 2).unwrap();
        gf_star(2, 12, 1).unwrap();
        assert!(matches!(gf_star(3, 10, 1), Err(Error::IdentityViolation { degree: 1, .. })));
    }

    #[test]
    fn uhelp_first_term() {
        let s = coef_upper_product(2, 3, UpperFlavor::Uhelp, 6).unwrap();
        assert_eq!(s.coeff(3), Some(&r(8, 3)));
        assert!(s.coeff(1).unwrap().is_zero());
    }

    #[test]
    fn flavor_preconditions() {
        assert!(coef_upper_product(2, 4, UpperFlavor::Gl, 8).is_err());
        assert!(coef_upper_product(2, 2, UpperFlavor::U, 8).is_err());
        assert!(coef_upper_product(2, 3, UpperFlavor::SpEven, 8).is_err());
        assert!(UpperFlavor::parse("nope").is_err());
        assert_eq!(UpperFlavor::parse("SP-EVEN").unwrap(), UpperFlavor::SpEven);
    }

    #[test]
    fn decay_small() {
        let t = gen_binom_decay(2, 10).unwrap();
        assert_eq!(t.rows[1].coef, r(1, 2));
        assert_eq!(t.rows[2].coef, r(3, 8));
        assert!(t.holds());
    }

    #[test]
    fn display_form() {
        assert_eq!(RatSeries::from_ints(&[1, 0, -2], 3).to_string(), "1 + -2*u^2 + O(u^4)");
    }
}
