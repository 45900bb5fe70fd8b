//! Counts of monic irreducible polynomials: plain (`N⁰`, `N`), self-conjugate
//! under `f ↦ f̃` over `F_{q²}` (`Ñ`, `M̃`) and under `f ↦ f*` over `F_q`
//! (`N*`, `M*`).
//!
//! The conjugate counts are obtained by peeling the product identities
//!
//! ```text
//! ∏_{d odd} (1-u^d)^{-Ñ(d)} ∏_{d≥1} (1-u^{2d})^{-M̃(d)} = (1+u)/(1-qu)
//! (1-u)^{-e} ∏_{d≥1} (1-u^d)^{-N*(2d)} (1-u^d)^{-M*(d)} = 1/(1-qu)
//! ```
//!
//! one degree at a time (`e = 2` for odd `q`, `e = 1` for even `q`), and are
//! cross-checked against brute-force enumeration in the tests.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{big_pow, binomial_big, divisors, mobius};
use crate::error::{Error, Result};
use crate::field::{gf, quadratic_tower};
use crate::poly::{ConjFlavor, PolyFq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountFlavor {
    Plain,
    Unitary,
    Star,
}

/// Per-degree counts for one `q` and flavor. Each entry is a pair:
/// plain `(N⁰, N)`, unitary `(Ñ, M̃)`, star `(N*, M*)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub q: u64,
    pub flavor: CountFlavor,
    pub entries: BTreeMap<usize, (BigInt, BigInt)>,
}

impl CountTable {
    pub fn max_degree(&self) -> usize {
        self.entries.keys().next_back().copied().unwrap_or(0)
    }

    pub fn get(&self, d: usize) -> Option<&(BigInt, BigInt)> {
        self.entries.get(&d)
    }

    /// Builds the table for degrees `1..=max_d` from the closed forms and recursions.
    pub fn build(q: u64, flavor: CountFlavor, max_d: usize) -> Result<CountTable> {
        check_args(q, max_d.max(1));
        let entries = match flavor {
            CountFlavor::Plain => (1..=max_d).map(|d| (d, (count_N0(q, d), count_N(q, d)))).collect(),
            CountFlavor::Unitary => peel_unitary(q, max_d)?,
            CountFlavor::Star => peel_star(q, max_d)?,
        };
        Ok(CountTable { q, flavor, entries })
    }

    /// Builds the same table by enumerating irreducibles and classifying them
    /// under the relevant involution. Exponential in `max_d`.
    pub fn brute_force(q: u64, flavor: CountFlavor, max_d: usize) -> Result<CountTable> {
        let base = gf(q)?;
        let mut entries = BTreeMap::new();
        for d in 1..=max_d {
            let pair = match flavor {
                CountFlavor::Plain => {
                    let irr = PolyFq::irreducibles_of_degree(&base, d);
                    let nonzero = irr.iter().filter(|f| !f.constant_term().is_zero()).count();
                    (BigInt::from(irr.len()), BigInt::from(nonzero))
                }
                CountFlavor::Unitary => {
                    let ext = quadratic_tower(&base)?;
                    classify(&PolyFq::irreducibles_of_degree(&ext, d), ConjFlavor::Tilde, 0)?
                }
                CountFlavor::Star => {
                    let irr = PolyFq::irreducibles_of_degree(&base, d);
                    // t ± 1 are tracked separately
                    let skip = if d == 1 { star_linear_exponent(q) } else { 0 };
                    classify(&irr, ConjFlavor::Star, skip)?
                }
            };
            entries.insert(d, pair);
        }
        Ok(CountTable { q, flavor, entries })
    }
}

fn classify(irr: &[PolyFq], flavor: ConjFlavor, skip_fixed: usize) -> Result<(BigInt, BigInt)> {
    let mut fixed = 0usize;
    let mut moved = 0usize;
    for f in irr.iter().filter(|f| !f.constant_term().is_zero()) {
        if f.is_self_conjugate(flavor)? {
            fixed += 1;
        } else {
            moved += 1;
        }
    }
    Ok((BigInt::from(fixed - skip_fixed), BigInt::from(moved / 2)))
}

fn check_args(q: u64, d: usize) {
    assert!(q >= 2, "field size must be at least 2");
    assert!(d >= 1, "degree must be at least 1");
}

/// `e`: the number of distinct polynomials among `t - 1`, `t + 1`.
pub fn star_linear_exponent(q: u64) -> usize {
    if q.is_multiple_of(2) {
        1
    } else {
        2
    }
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`.
#[allow(non_snake_case)]
pub fn count_N0(q: u64, d: usize) -> BigInt {
    check_args(q, d);
    let mut total = BigInt::zero();
    for e in divisors(d as u64) {
        let mu = mobius(e);
        if mu != 0 {
            total += big_pow(q, d as u64 / e) * mu;
        }
    }
    total / BigInt::from(d)
}

/// Number of monic irreducible polynomials of degree `d` over `F_q` with nonzero constant term.
#[allow(non_snake_case)]
pub fn count_N(q: u64, d: usize) -> BigInt {
    check_args(q, d);
    if d == 1 {
        BigInt::from(q - 1)
    } else {
        count_N0(q, d)
    }
}

/// `(Ñ(q;d), M̃(q;d))`.
pub fn count_unitary(q: u64, d: usize) -> (BigInt, BigInt) {
    cached(q, CountFlavor::Unitary, d)
}

/// `(N*(q;d), M*(q;d))`, with `t ± 1` excluded.
pub fn count_star(q: u64, d: usize) -> (BigInt, BigInt) {
    cached(q, CountFlavor::Star, d)
}

fn cached(q: u64, flavor: CountFlavor, d: usize) -> (BigInt, BigInt) {
    check_args(q, d);
    type Tables = HashMap<(u64, CountFlavor), Arc<CountTable>>;
    static CACHE: OnceLock<Mutex<Tables>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let existing = cache.lock().unwrap().get(&(q, flavor)).cloned();
    let table = match existing {
        Some(t) if t.max_degree() >= d => t,
        other => {
            let target = d.max(other.map_or(0, |t| 2 * t.max_degree())).max(16);
            let t = Arc::new(CountTable::build(q, flavor, target).expect("product identity peeling is consistent"));
            cache.lock().unwrap().insert((q, flavor), t.clone());
            t
        }
    };
    table.entries[&d].clone()
}

/// Multiplies `series` (truncated at its length) by `(1 - u^m)^{-x}`.
fn mul_inverse_power(series: &mut [BigInt], m: usize, x: &BigInt) {
    if x.is_zero() {
        return;
    }
    let len = series.len();
    let coeffs: Vec<BigInt> =
        (0..len).step_by(m).enumerate().map(|(j, _)| binomial_big(&(x + j - 1u32), j as u64)).collect();
    for n in (0..len).rev() {
        let mut acc = BigInt::zero();
        for (j, c) in coeffs.iter().enumerate() {
            if j * m > n {
                break;
            }
            acc += c * &series[n - j * m];
        }
        series[n] = acc;
    }
}

fn peel_unitary(q: u64, max_d: usize) -> Result<BTreeMap<usize, (BigInt, BigInt)>> {
    let len = max_d + 1;
    let target: Vec<BigInt> = (0..len)
        .map(|d| if d == 0 { BigInt::one() } else { big_pow(q, d as u64) + big_pow(q, d as u64 - 1) })
        .collect();
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    let mut tilde_n = vec![BigInt::zero(); len];
    let mut tilde_m = vec![BigInt::zero(); len];
    for d in 1..len {
        let diff = &target[d] - &prod[d];
        if d % 2 == 1 {
            if diff.is_negative() {
                return Err(Error::CountInconsistency { degree: d, detail: format!("Ñ would be {diff}") });
            }
            tilde_n[d] = diff;
            let pairs = count_N(q * q, d) - &tilde_n[d];
            if pairs.is_odd() || pairs.is_negative() {
                return Err(Error::CountInconsistency {
                    degree: d,
                    detail: format!("N(q²;d) - Ñ = {pairs} is not a nonnegative even number"),
                });
            }
            tilde_m[d] = pairs / 2;
            mul_inverse_power(&mut prod, d, &tilde_n[d].clone());
        } else {
            if !diff.is_zero() {
                return Err(Error::CountInconsistency { degree: d, detail: format!("residual {diff} at even degree") });
            }
            let all = count_N(q * q, d);
            if all.is_odd() {
                return Err(Error::CountInconsistency { degree: d, detail: "odd pair count".into() });
            }
            tilde_m[d] = all / 2;
        }
        if 2 * d < len {
            mul_inverse_power(&mut prod, 2 * d, &tilde_m[d].clone());
        }
    }
    Ok((1..len).map(|d| (d, (tilde_n[d].clone(), tilde_m[d].clone()))).collect())
}

fn peel_star(q: u64, max_d: usize) -> Result<BTreeMap<usize, (BigInt, BigInt)>> {
    // u tracks half the degree; N*(2d) for 2d ≤ max_d needs d ≤ max_d / 2,
    // M*(d) needs d ≤ max_d.
    let len = max_d + 1;
    let e = star_linear_exponent(q);
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    mul_inverse_power(&mut prod, 1, &BigInt::from(e));
    let mut n_star = vec![BigInt::zero(); 2 * len];
    let mut m_star = vec![BigInt::zero(); len];
    for d in 1..len {
        let linear = if d == 1 { BigInt::from(e) } else { BigInt::zero() };
        let pairs = count_N(q, d) - &n_star[d] - linear;
        if pairs.is_odd() || pairs.is_negative() {
            return Err(Error::CountInconsistency {
                degree: d,
                detail: format!("N(q;d) - N*(q;d) - linear = {pairs} is not a nonnegative even number"),
            });
        }
        m_star[d] = pairs / 2;
        let combined = big_pow(q, d as u64) - &prod[d];
        let ns = &combined - &m_star[d];
        if ns.is_negative() {
            return Err(Error::CountInconsistency { degree: 2 * d, detail: format!("N* would be {ns}") });
        }
        n_star[2 * d] = ns;
        mul_inverse_power(&mut prod, d, &combined);
    }
    Ok((1..len).map(|d| (d, (n_star[d].clone(), m_star[d].clone()))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn plain_examples() {
        assert_eq!(count_N0(2, 1), b(2));
        assert_eq!(count_N0(2, 2), b(1));
        assert_eq!(count_N0(2, 4), b(3));
        assert_eq!(count_N(2, 1), b(1));
        assert_eq!(count_N(3, 1), b(2));
        let s: BigInt = [1usize, 2, 4].iter().map(|&d| count_N(2, d) * d).sum();
        assert_eq!(s, b(15));
    }

    #[test]
    fn necklace_identity() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for r in 1..=12usize {
                let s: BigInt = divisors(r as u64).iter().map(|&d| count_N(q, d as usize) * d).sum();
                assert_eq!(s, big_pow(q, r as u64) - 1);
            }
        }
    }

    #[test]
    fn unitary_examples() {
        assert_eq!(count_unitary(2, 1), (b(3), b(0)));
        assert_eq!(count_unitary(2, 2), (b(0), b(3)));
        for d in (2..=20).step_by(2) {
            assert!(count_unitary(3, d).0.is_zero());
        }
    }

    #[test]
    fn star_examples() {
        assert_eq!(count_star(3, 2), (b(1), b(1)));
        assert_eq!(count_star(2, 2).0, b(1));
        for q in [2u64, 3, 5] {
            assert_eq!(count_star(q, 1).0, b(0));
            for d in (3..=15).step_by(2) {
                assert!(count_star(q, d).0.is_zero());
            }
        }
    }

    #[test]
    fn series_product_truncation() {
        // (1-u)^{-1} = Σ u^n
        let mut s = vec![BigInt::zero(); 6];
        s[0] = BigInt::one();
        mul_inverse_power(&mut s, 1, &b(1));
        assert!(s.iter().all(|c| *c == b(1)));
        mul_inverse_power(&mut s, 2, &b(3));
        // Σ u^n · (1 + 3u^2 + 6u^4)
        assert_eq!(s, vec![b(1), b(1), b(4), b(4), b(10), b(10)]);
    }
}
