//! Explicit upper bounds on the probability of any single characteristic
//! polynomial, the `1/(q^n - 1)` lower bound for `GL`, and exact checks of
//! the elementary product inequalities the bounds rest on.
//!
//! Bounds are evaluated in `f64`, inflated by a relative `1e-12` (far above
//! the accumulated rounding error of a handful of `ln`/`exp`/`powf` calls)
//! and converted exactly to rationals, so comparisons against exact
//! probabilities are conservative.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::charpoly_dist::{enumerate_charpoly_counts, max_probability, ratio, ExactQ};
use crate::error::{Error, Result};
use crate::groups::{group_order, order_gl, Family, GroupSpec, DEFAULT_ENUM_CAP};

const INFLATE: f64 = 1.0 + 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(q: u64) -> Parity {
        if q % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

fn check_parity(q: u64, parity: Parity) -> Result<()> {
    if Parity::of(q) != parity {
        return Err(Error::InvalidSpec(format!("parity {parity:?} does not match q = {q}")));
    }
    Ok(())
}

fn log_q(x: f64, q: u64) -> f64 {
    x.ln() / (q as f64).ln()
}

fn rounded_up(v: f64) -> BigRational {
    BigRational::from_float(v * INFLATE).expect("finite bound")
}

/// `e^6 (1 + log_q(n+1))^6 / q^n`, rounded up.
pub fn bound_gl(n: usize, q: u64) -> Result<BigRational> {
    if n == 0 || q < 2 {
        return Err(Error::OutOfRange(format!("bound_gl needs n ≥ 1, q ≥ 2 (got {n}, {q})")));
    }
    let v = 6f64.exp() * (1.0 + log_q(n as f64 + 1.0, q)).powi(6) / (q as f64).powi(n as i32);
    Ok(rounded_up(v))
}

/// `e (2 + log_q(n+1)) / q^n`, rounded up.
pub fn bound_gu(n: usize, q: u64) -> Result<BigRational> {
    if n == 0 || q < 2 {
        return Err(Error::OutOfRange(format!("bound_gu needs n ≥ 1, q ≥ 2 (got {n}, {q})")));
    }
    let v = std::f64::consts::E * (2.0 + log_q(n as f64 + 1.0, q)) / (q as f64).powi(n as i32);
    Ok(rounded_up(v))
}

/// `Sp(2n, q)`: `20 [log_q(4n)+4]^{3/2} / q^n` (odd `q`) or
/// `242 [log_q(4n)+4]^3 / q^n` (even `q`), rounded up.
pub fn bound_sp(n: usize, q: u64, parity: Parity) -> Result<BigRational> {
    check_parity(q, parity)?;
    if n == 0 {
        return Err(Error::OutOfRange("bound_sp needs n ≥ 1".into()));
    }
    let l = log_q(4.0 * n as f64, q) + 4.0;
    let v = match parity {
        Parity::Odd => 20.0 * l.powf(1.5),
        Parity::Even => 242.0 * l.powi(3),
    } / (q as f64).powi(n as i32);
    Ok(rounded_up(v))
}

/// `O^±(n, q)` with `n` the dimension: `27 [log_q(4r)+4]^{3/2} / q^{r-1}`
/// with `r = ⌊n/2⌋` (odd `q`), or `352 [log_q(2n)+4]^3 / q^{n/2-1}` (even `q`,
/// even `n`), rounded up.
pub fn bound_o(n: usize, q: u64, parity: Parity) -> Result<BigRational> {
    check_parity(q, parity)?;
    if n < 2 {
        return Err(Error::OutOfRange("bound_o needs n ≥ 2".into()));
    }
    let v = match parity {
        Parity::Odd => {
            let r = n / 2;
            27.0 * (log_q(4.0 * r as f64, q) + 4.0).powf(1.5) / (q as f64).powi(r as i32 - 1)
        }
        Parity::Even => {
            if n % 2 == 1 {
                return Err(Error::Unsupported("odd-dimensional orthogonal groups in even characteristic".into()));
            }
            let m = n / 2;
            352.0 * (log_q(4.0 * m as f64, q) + 4.0).powi(3) / (q as f64).powi(m as i32 - 1)
        }
    };
    Ok(rounded_up(v))
}

/// The explicit bound for a spec (none exists for `Mat`).
pub fn bound_for(spec: &GroupSpec) -> Result<BigRational> {
    spec.validate()?;
    let (n, q) = (spec.n, spec.q);
    match spec.family {
        Family::GL => bound_gl(n, q),
        Family::GU => bound_gu(n, q),
        Family::Sp => bound_sp(n, q, Parity::of(q)),
        Family::Oplus | Family::Ominus => bound_o(n, q, Parity::of(q)),
        Family::Mat => Err(Error::Unsupported("no explicit bound for the matrix algebra".into())),
    }
}

#[derive(Clone, Debug)]
pub struct BoundReport {
    pub spec: GroupSpec,
    pub bound: BigRational,
    /// Largest single-polynomial probability, when computable. For orthogonal
    /// groups too large to enumerate this is the maximum of the summed
    /// `O^+ + O^-` proportion, which dominates either group's value.
    pub max_exact: Option<ExactQ>,
    pub satisfied: Option<bool>,
}

/// Compares the bound with the exact maximum (class model or enumeration).
pub fn bound_report(spec: &GroupSpec) -> Result<BoundReport> {
    let bound = bound_for(spec)?;
    let max_exact = exact_max(spec)?;
    let satisfied = max_exact.as_ref().map(|m| *m <= bound);
    Ok(BoundReport { spec: *spec, bound, max_exact, satisfied })
}

fn exact_max(spec: &GroupSpec) -> Result<Option<ExactQ>> {
    if spec.family.is_orthogonal() {
        let enumerable = group_order(spec)? <= BigInt::from(DEFAULT_ENUM_CAP);
        if enumerable {
            let order = group_order(spec)?;
            let counts = enumerate_charpoly_counts(spec, DEFAULT_ENUM_CAP)?;
            return Ok(counts.into_values().max().map(|c| ratio(c, order)));
        }
        if !spec.odd_char() {
            return Ok(None);
        }
    }
    Ok(Some(max_probability(spec)?.value))
}

/// The lower bound `1/(q^n - 1)` and the matching element count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub prob: ExactQ,
    /// `|GL(n-1, q)| · q^{n-1}`.
    pub element_count: BigInt,
}

/// `1/(q^n - 1)`, verifying `|GL(n,q)|/(q^n - 1) = |GL(n-1,q)| q^{n-1}` exactly.
pub fn lower_bound_gl(n: usize, q: u64) -> Result<LowerBound> {
    if n == 0 || q < 2 {
        return Err(Error::OutOfRange(format!("lower_bound_gl needs n ≥ 1, q ≥ 2 (got {n}, {q})")));
    }
    let qn = num_traits::pow(BigInt::from(q), n) - 1;
    let count = order_gl(n - 1, q) * num_traits::pow(BigInt::from(q), n - 1);
    let whole = order_gl(n, q);
    if &whole % &qn != BigInt::zero() || &whole / &qn != count {
        return Err(Error::IdentityViolation {
            degree: n,
            detail: format!("|GL({n},{q})|/(q^n-1) ≠ |GL(n-1,q)| q^(n-1)"),
        });
    }
    Ok(LowerBound { prob: ratio(BigInt::one(), qn), element_count: count })
}

/// Verifies, in exact rational arithmetic,
/// `∏_{k≥1} 1/(1 - x^k) ≤ 1/(1 - x - x²) ≤ 1 + c x ≤ e^{c x}` with `x = q^{-a}`.
/// `c` is the variant (6: `q ≥ 2, a ≥ 1`; 2: `q ≥ 2, a ≥ 2`; 3: `q ≥ 3, a ≥ 1`).
/// The product is truncated after 60 factors and the remainder bounded by
/// `1/(1 - x^61/((1-x)(1-x^61)))`.
pub fn euler_tail_bounds(q: u64, a: u32, variant: u32) -> Result<bool> {
    let ok = match variant {
        6 => q >= 2 && a >= 1,
        2 => q >= 2 && a >= 2,
        3 => q >= 3 && a >= 1,
        _ => return Err(Error::OutOfRange(format!("unknown variant {variant}"))),
    };
    if !ok {
        return Err(Error::OutOfRange(format!("(q, a) = ({q}, {a}) outside the range of variant {variant}")));
    }
    // Everything in integers with x = 1/Q; fractions compared by cross-multiplication.
    let big_q = num_traits::pow(BigInt::from(q), a as usize);
    let c = BigInt::from(variant);
    let mut prod_num = BigInt::one();
    let mut prod_den = BigInt::one();
    let mut qk = BigInt::one();
    for _ in 1..=60 {
        qk *= &big_q;
        prod_num *= &qk;
        prod_den *= &qk - 1u32;
    }
    // tail factor 1/(1 - T) with T = Q / ((Q - 1)(Q^61 - 1)) = Q / D
    let d = (&big_q - 1u32) * (&qk * &big_q - 1u32);
    let upper = (prod_num * &d, prod_den * (&d - &big_q));
    let q2 = &big_q * &big_q;
    let middle = (q2.clone(), &q2 - &big_q - 1u32);
    let linear = (&big_q + &c, big_q.clone());
    // e^y ≥ 1 + y + y²/2 + y³/6 for y = c/Q ≥ 0
    let q3 = &q2 * &big_q;
    let exp_lower = (&q3 * 6u32 + &q2 * &c * 6u32 + &big_q * &c * &c * 3u32 + &c * &c * &c, q3 * 6u32);
    let le = |x: &(BigInt, BigInt), y: &(BigInt, BigInt)| &x.0 * &y.1 <= &y.0 * &x.1;
    Ok(le(&upper, &middle) && le(&middle, &linear) && le(&linear, &exp_lower))
}

/// Smallest `r` with `q^r - 1 ≥ n`.
pub fn gl_r_selection(n: u64, q: u64) -> u32 {
    let mut r = 0u32;
    let mut qr: u128 = 1;
    while qr - 1 < n as u128 {
        qr *= q as u128;
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn bound_examples() {
        assert!(bound_gl(2, 2).unwrap() > ratio(2.into(), 3.into()));
        assert!(bound_gl(1, 2).unwrap() >= ExactQ::one());
        let gu12 = bound_gu(1, 2).unwrap().to_f64().unwrap();
        assert!((gu12 - 1.5 * std::f64::consts::E).abs() < 1e-9);
        assert!(bound_sp(1, 3, Parity::Odd).unwrap() >= ratio(3.into(), 8.into()));
        assert!(bound_sp(1, 2, Parity::Even).unwrap() >= ratio(2.into(), 3.into()));
        assert!(bound_sp(1, 2, Parity::Odd).is_err());
        assert!(bound_o(2, 3, Parity::Odd).unwrap() >= ExactQ::one());
        assert!(bound_o(3, 2, Parity::Even).is_err());
    }

    #[test]
    fn bounds_decrease_in_n_past_crossover() {
        let mut prev = bound_gl(10, 2).unwrap();
        for n in 11..=60 {
            let b = bound_gl(n, 2).unwrap();
            assert!(b < prev, "n = {n}");
            prev = b;
        }
    }

    #[test]
    fn lower_bound_examples() {
        let lb = lower_bound_gl(2, 2).unwrap();
        assert_eq!(lb.prob, ratio(1.into(), 3.into()));
        assert_eq!(lb.element_count, BigInt::from(2));
        assert_eq!(lower_bound_gl(3, 2).unwrap().prob, ratio(1.into(), 7.into()));
    }

    #[test]
    fn euler_examples() {
        assert!(euler_tail_bounds(2, 1, 6).unwrap());
        assert!(euler_tail_bounds(2, 2, 2).unwrap());
        assert!(euler_tail_bounds(3, 1, 3).unwrap());
        assert!(euler_tail_bounds(2, 1, 2).is_err());
        assert!(euler_tail_bounds(2, 1, 3).is_err());
        // 1/(1-x-x²) ≤ 1 + 2x fails at q = 2, a = 1: the range restriction matters
        assert!(euler_tail_bounds(2, 1, 5).is_err());
    }

    #[test]
    fn r_selection() {
        assert_eq!(gl_r_selection(1, 2), 1);
        assert_eq!(gl_r_selection(3, 2), 2);
        assert_eq!(gl_r_selection(4, 2), 3);
    }
}
