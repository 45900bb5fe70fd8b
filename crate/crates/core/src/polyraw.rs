//! Coefficient-slice polynomial kernels (lowest degree first) over a field context.
//! Used both by field construction and by [`crate::poly::PolyFq`].

use num_bigint::BigUint;

use crate::arith::prime_factors;
use crate::field::{FieldCtx, FieldElem};

pub fn trim(v: &mut Vec<FieldElem>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub fn add(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let mut out: Vec<FieldElem> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(FieldElem::ZERO);
            let y = b.get(i).copied().unwrap_or(FieldElem::ZERO);
            f.add(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

pub fn sub(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let n = a.len().max(b.len());
    let mut out: Vec<FieldElem> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(FieldElem::ZERO);
            let y = b.get(i).copied().unwrap_or(FieldElem::ZERO);
            f.sub(x, y)
        })
        .collect();
    trim(&mut out);
    out
}

pub fn mul(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FieldElem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

pub fn scale(f: &FieldCtx, a: &[FieldElem], c: FieldElem) -> Vec<FieldElem> {
    let mut out: Vec<FieldElem> = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero (trimmed).
pub fn divrem(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> (Vec<FieldElem>, Vec<FieldElem>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(b[db]).expect("nonzero leading coefficient");
    let mut quot = vec![FieldElem::ZERO; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let c = f.mul(*r.last().unwrap(), lead_inv);
        quot[shift] = c;
        for (i, &y) in b.iter().enumerate() {
            r[shift + i] = f.sub(r[shift + i], f.mul(c, y));
        }
        trim(&mut r);
    }
    trim(&mut quot);
    (quot, r)
}

pub fn rem(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    divrem(f, a, b).1
}

pub fn monic(f: &FieldCtx, a: &[FieldElem]) -> Vec<FieldElem> {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(f, a, f.inv(l).expect("nonzero lead")),
    }
}

pub fn gcd(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, &x)
}

pub fn mulmod(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem], m: &[FieldElem]) -> Vec<FieldElem> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod_u64(f: &FieldCtx, a: &[FieldElem], mut e: u64, m: &[FieldElem]) -> Vec<FieldElem> {
    let mut result = rem(f, &[FieldElem::ONE], m);
    let mut b = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(f, &result, &b, m);
        }
        e >>= 1;
        if e > 0 {
            b = mulmod(f, &b, &b, m);
        }
    }
    result
}

pub fn powmod_big(f: &FieldCtx, a: &[FieldElem], e: &BigUint, m: &[FieldElem]) -> Vec<FieldElem> {
    let mut result = rem(f, &[FieldElem::ONE], m);
    let b = rem(f, a, m);
    for i in (0..e.bits()).rev() {
        result = mulmod(f, &result, &result, m);
        if e.bit(i) {
            result = mulmod(f, &result, &b, m);
        }
    }
    result
}

/// `x^{q^i} mod m` for `i = 0..=count`, by repeated `q`-th powering.
pub fn frobenius_powers(f: &FieldCtx, m: &[FieldElem], count: usize) -> Vec<Vec<FieldElem>> {
    let x = rem(f, &[FieldElem::ZERO, FieldElem::ONE], m);
    let mut out = vec![x.clone()];
    let mut cur = x;
    for _ in 0..count {
        cur = powmod_u64(f, &cur, f.q() as u64, m);
        out.push(cur.clone());
    }
    out
}

/// Rabin's test: `f` of degree `n` is irreducible iff `x^{q^n} ≡ x` and
/// `gcd(x^{q^{n/r}} - x, f) = 1` for every prime `r | n`.
pub fn is_irreducible(f: &FieldCtx, poly: &[FieldElem]) -> bool {
    let mut p = poly.to_vec();
    trim(&mut p);
    if p.len() < 2 {
        return false;
    }
    let n = p.len() - 1;
    if n == 1 {
        return true;
    }
    let p = monic(f, &p);
    if p[0].is_zero() {
        return false;
    }
    let pows = frobenius_powers(f, &p, n);
    let x = vec![FieldElem::ZERO, FieldElem::ONE];
    if !sub(f, &pows[n], &x).is_empty() {
        return false;
    }
    for r in prime_factors(n as u64) {
        let d = n / r as usize;
        let g = gcd(f, &p, &sub(f, &pows[d], &x));
        if g.len() != 1 {
            return false;
        }
    }
    true
}
