//! Finite fields `F_q`, `q = p^k <= 2^16`, built as towers over a prime field.
//!
//! An element is stored as its coordinate vector in the power basis over the
//! immediate base field, packed into a single integer: an element
//! `c_0 + c_1 θ + ... + c_{m-1} θ^{m-1}` of `B[θ]/(f)` has value
//! `Σ c_i |B|^i`, where each `c_i` is itself the packed value of a base
//! element. The prime subfield therefore always occupies the values `0..p`,
//! and embedding a field into any tower built on top of it keeps the value.
//!
//! Multiplication goes through log/antilog tables and addition through a
//! Zech-logarithm table, so every operation is a handful of table lookups.
//! Contexts are interned: the same `(p, k)` or the same `(base, m)` always
//! returns the same shared context with the same canonical modulus.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, prime_factors, prime_power};
use crate::error::{Error, Result};
use crate::polyraw;

/// Default upper limit on the field size.
pub const DEFAULT_FIELD_CAP: u64 = 1 << 16;

const NO_LOG: u32 = u32::MAX;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Packed coordinate value; see the module docs.
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

pub struct FieldCtx {
    id: u64,
    p: u32,
    /// Absolute degree over the prime field.
    k: u32,
    q: u32,
    base: Option<Arc<FieldCtx>>,
    /// Monic modulus over the base field, lowest degree first. Empty for a prime field.
    modulus: Vec<FieldElem>,
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    neg_one_log: u32,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}", self.p, self.k)?;
        if let Some(b) = &self.base {
            write!(f, " over GF({})", b.q)?;
        }
        write!(f, ")")
    }
}

type Registry = Mutex<HashMap<(u64, u32), Arc<FieldCtx>>>;

fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn next_id() -> u64 {
    static NEXT: AtomicU64 = AtomicU64::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

/// `F_{p^k}` as a single extension of the prime field, with the default size cap.
pub fn make_field(p: u64, k: u32) -> Result<Arc<FieldCtx>> {
    make_field_with_cap(p, k, DEFAULT_FIELD_CAP)
}

pub fn make_field_with_cap(p: u64, k: u32, cap: u64) -> Result<Arc<FieldCtx>> {
    if k < 1 {
        return Err(Error::ZeroDegree);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let size = (p as u128).checked_pow(k).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::FieldTooLarge { size, cap });
    }
    let prime = FieldCtx::prime(p)?;
    if k == 1 {
        Ok(prime)
    } else {
        FieldCtx::extension_with_cap(&prime, k, cap)
    }
}

/// The field with `q` elements.
pub fn gf(q: u64) -> Result<Arc<FieldCtx>> {
    let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    make_field(p, k)
}

/// `F_{q^2}` as a degree-2 tower over `F_q`, so that `x ↦ x^q` is the tower Frobenius.
pub fn quadratic_tower(base: &Arc<FieldCtx>) -> Result<Arc<FieldCtx>> {
    FieldCtx::extension(base, 2)
}

impl FieldCtx {
    pub fn prime(p: u64) -> Result<Arc<FieldCtx>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > DEFAULT_FIELD_CAP {
            return Err(Error::FieldTooLarge { size: p as u128, cap: DEFAULT_FIELD_CAP });
        }
        let key = (0u64, p as u32);
        if let Some(ctx) = registry().lock().unwrap().get(&key) {
            return Ok(ctx.clone());
        }
        let ctx = Arc::new(Self::build_prime(p as u32));
        let mut reg = registry().lock().unwrap();
        Ok(reg.entry(key).or_insert(ctx).clone())
    }

    pub fn extension(base: &Arc<FieldCtx>, m: u32) -> Result<Arc<FieldCtx>> {
        Self::extension_with_cap(base, m, DEFAULT_FIELD_CAP)
    }

    pub fn extension_with_cap(base: &Arc<FieldCtx>, m: u32, cap: u64) -> Result<Arc<FieldCtx>> {
        if m < 1 {
            return Err(Error::ZeroDegree);
        }
        if m == 1 {
            return Ok(base.clone());
        }
        let size = (base.q as u128).checked_pow(m).unwrap_or(u128::MAX);
        if size > cap as u128 || size > u32::MAX as u128 {
            return Err(Error::FieldTooLarge { size, cap });
        }
        let key = (base.id, m);
        if let Some(ctx) = registry().lock().unwrap().get(&key) {
            return Ok(ctx.clone());
        }
        let modulus = canonical_irreducible(base, m as usize);
        let ctx = Arc::new(Self::build_extension(base.clone(), modulus));
        let mut reg = registry().lock().unwrap();
        Ok(reg.entry(key).or_insert(ctx).clone())
    }

    fn build_prime(p: u32) -> FieldCtx {
        let q = p;
        let order = q - 1;
        let g = if p == 2 {
            1
        } else {
            let ps = prime_factors(order as u64);
            (2..p)
                .find(|&g| ps.iter().all(|&r| mod_pow(g as u64, (order as u64) / r, p as u64) != 1))
                .expect("prime field has a primitive root")
        };
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![NO_LOG; q as usize];
        let mut x = 1u64;
        for (i, e) in exp.iter_mut().take(order as usize).enumerate() {
            *e = x as u32;
            log[x as usize] = i as u32;
            x = x * g as u64 % p as u64;
        }
        Self::finish(p, 1, None, Vec::new(), exp, log, |a, b| (a + b) % p)
    }

    fn build_extension(base: Arc<FieldCtx>, modulus: Vec<FieldElem>) -> FieldCtx {
        let m = modulus.len() - 1;
        let bq = base.q;
        let q = bq.pow(m as u32);
        let order = q - 1;
        let pack = |c: &[FieldElem]| -> u32 {
            let mut v = 0u32;
            for i in (0..m).rev() {
                v = v * bq + c.get(i).map_or(0, |e| e.0);
            }
            v
        };
        let unpack = |mut v: u32| -> Vec<FieldElem> {
            let mut c = Vec::with_capacity(m);
            for _ in 0..m {
                c.push(FieldElem(v % bq));
                v /= bq;
            }
            c
        };
        let mulmod = |a: &[FieldElem], b: &[FieldElem]| -> Vec<FieldElem> {
            let prod = polyraw::mul(&base, a, b);
            let r = polyraw::rem(&base, &prod, &modulus);
            let mut r = r;
            r.resize(m, FieldElem::ZERO);
            r
        };
        let powmod = |a: &[FieldElem], mut e: u64| -> Vec<FieldElem> {
            let mut result = unpack(1);
            let mut b = a.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    result = mulmod(&result, &b);
                }
                b = mulmod(&b, &b);
                e >>= 1;
            }
            result
        };
        let ps = prime_factors(order as u64);
        let gen = (2..q)
            .map(&unpack)
            .find(|g| {
                powmod(g, order as u64) == unpack(1) && ps.iter().all(|&r| powmod(g, order as u64 / r) != unpack(1))
            })
            .expect("finite field has a primitive element");
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![NO_LOG; q as usize];
        let mut x = unpack(1);
        for (i, e) in exp.iter_mut().take(order as usize).enumerate() {
            let v = pack(&x);
            *e = v;
            log[v as usize] = i as u32;
            x = mulmod(&x, &gen);
        }
        let base_for_add = base.clone();
        let add_packed = move |a: u32, b: u32| -> u32 {
            let mut v = 0u32;
            let mut scale = 1u32;
            let (mut a, mut b) = (a, b);
            for _ in 0..m {
                let s = base_for_add.add(FieldElem(a % bq), FieldElem(b % bq)).0;
                v += s * scale;
                scale = scale.wrapping_mul(bq);
                a /= bq;
                b /= bq;
            }
            v
        };
        let p = base.p;
        let k = base.k * m as u32;
        Self::finish(p, k, Some(base), modulus, exp, log, add_packed)
    }

    fn finish(
        p: u32,
        k: u32,
        base: Option<Arc<FieldCtx>>,
        modulus: Vec<FieldElem>,
        mut exp: Vec<u32>,
        log: Vec<u32>,
        add: impl Fn(u32, u32) -> u32,
    ) -> FieldCtx {
        let order = (exp.len() / 2) as u32;
        for i in 0..order as usize {
            exp[i + order as usize] = exp[i];
        }
        let zech = (0..order as usize)
            .map(|i| {
                let s = add(1, exp[i]);
                if s == 0 {
                    NO_LOG
                } else {
                    log[s as usize]
                }
            })
            .collect();
        let neg_one_log = if p == 2 { 0 } else { order / 2 };
        FieldCtx { id: next_id(), p, k, q: order + 1, base, modulus, exp, log, zech, neg_one_log }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Absolute degree over `F_p`.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn base(&self) -> Option<&Arc<FieldCtx>> {
        self.base.as_ref()
    }

    /// Degree over the immediate base field (1 for a prime field).
    pub fn degree_over_base(&self) -> usize {
        if self.base.is_some() {
            self.modulus.len() - 1
        } else {
            1
        }
    }

    /// Monic defining polynomial over the immediate base, lowest degree first.
    pub fn modulus(&self) -> &[FieldElem] {
        &self.modulus
    }

    pub fn is_quadratic_tower(&self) -> bool {
        self.base.is_some() && self.modulus.len() == 3
    }

    pub fn same(&self, other: &FieldCtx) -> bool {
        self.id == other.id
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Checked construction from a packed value.
    pub fn elem(&self, value: u64) -> Result<FieldElem> {
        if value < self.q as u64 {
            Ok(FieldElem(value as u32))
        } else {
            Err(Error::ElementOutOfRange { value, q: self.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn contains(&self, x: FieldElem) -> bool {
        x.0 < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    /// The primitive element used for the log tables.
    pub fn generator(&self) -> FieldElem {
        FieldElem(self.exp[1 % (self.q as usize - 1).max(1)])
    }

    /// Discrete log to the base of [`generator`](Self::generator).
    pub fn log(&self, x: FieldElem) -> Option<u32> {
        if x.0 == 0 {
            None
        } else {
            Some(self.log[x.0 as usize])
        }
    }

    pub fn exp(&self, e: u64) -> FieldElem {
        FieldElem(self.exp[(e % (self.q as u64 - 1)) as usize])
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.0 == 0 {
            return b;
        }
        if b.0 == 0 {
            return a;
        }
        let order = self.q - 1;
        let la = self.log[a.0 as usize];
        let lb = self.log[b.0 as usize];
        let d = if lb >= la { lb - la } else { lb + order - la };
        let z = self.zech[d as usize];
        if z == NO_LOG {
            FieldElem::ZERO
        } else {
            FieldElem(self.exp[(la + z) as usize])
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if a.0 == 0 || self.neg_one_log == 0 {
            return a;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize] + self.neg_one_log;
        FieldElem(self.exp[(l % order) as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        debug_assert!(self.contains(a) && self.contains(b));
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        FieldElem(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElem(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        FieldElem(self.exp[((l * (e % order)) % order) as usize])
    }

    /// Signed power; negative exponents require a nonzero base.
    pub fn pow_i(&self, a: FieldElem, e: i64) -> Result<FieldElem> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// `x ↦ x^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    /// Inverse of the absolute Frobenius, `x ↦ x^{q/p}`.
    pub fn pth_root(&self, a: FieldElem) -> FieldElem {
        self.pow(a, (self.q / self.p) as u64)
    }

    /// `x ↦ x^Q` where `Q` is the size of the immediate base field.
    pub fn conjugate(&self, a: FieldElem) -> Result<FieldElem> {
        let b = self.base.as_ref().ok_or(Error::NotQuadraticTower)?;
        Ok(self.pow(a, b.q as u64))
    }

    /// Coordinates over the immediate base field (a prime field reports one residue).
    pub fn coords(&self, a: FieldElem) -> Vec<u32> {
        match &self.base {
            None => vec![a.0],
            Some(b) => {
                let mut v = a.0;
                (0..self.degree_over_base())
                    .map(|_| {
                        let c = v % b.q;
                        v /= b.q;
                        c
                    })
                    .collect()
            }
        }
    }

    /// Coordinates over `F_p` in the flattened tower basis.
    pub fn prime_coords(&self, a: FieldElem) -> Vec<u32> {
        let mut v = a.0;
        (0..self.k)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[FieldElem]) -> Result<FieldElem> {
        match &self.base {
            None => {
                if coords.len() != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: coords.len() });
                }
                self.elem(coords[0].0 as u64)
            }
            Some(b) => {
                let m = self.degree_over_base();
                if coords.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: coords.len() });
                }
                let mut v = 0u64;
                for c in coords.iter().rev() {
                    if !b.contains(*c) {
                        return Err(Error::ElementOutOfRange { value: c.0 as u64, q: b.q });
                    }
                    v = v * b.q as u64 + c.0 as u64;
                }
                self.elem(v)
            }
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElem) -> Result<u64> {
        let l = self.log(a).ok_or(Error::ZeroInverse)? as u64;
        let n = (self.q - 1) as u64;
        Ok(n / num_integer::gcd(l, n))
    }

    pub fn is_square(&self, a: FieldElem) -> bool {
        match self.log(a) {
            None => true,
            Some(l) => self.p == 2 || l % 2 == 0,
        }
    }

    pub fn format_elem(&self, a: FieldElem) -> String {
        match &self.base {
            None => a.0.to_string(),
            Some(b) => {
                let parts: Vec<String> = self.coords(a).into_iter().map(|c| b.format_elem(FieldElem(c))).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }

    /// Parses the textual element format: a decimal integer is read in the
    /// prime subfield; `[c0,c1,...]` gives coordinates over the immediate base.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let b =
                self.base.as_ref().ok_or_else(|| Error::Parse(format!("bracketed element {s} in a prime field")))?;
            let parts = split_top_level(inner);
            let coords = parts.iter().map(|t| b.parse_elem(t)).collect::<Result<Vec<_>>>()?;
            self.from_coords(&coords)
        } else {
            let n: i64 = s.parse().map_err(|_| Error::Parse(format!("bad element {s:?}")))?;
            Ok(self.from_int(n))
        }
    }
}

/// Embeds an element of `source` into `target`, which must be built as a tower over `source`.
pub fn embed_subfield(x: FieldElem, source: &FieldCtx, target: &FieldCtx) -> Result<FieldElem> {
    if !source.contains(x) {
        return Err(Error::ElementOutOfRange { value: x.0 as u64, q: source.q });
    }
    let mut cur: Option<&FieldCtx> = Some(target);
    while let Some(c) = cur {
        if c.same(source) {
            return Ok(x);
        }
        cur = c.base.as_deref();
    }
    Err(Error::IncompatibleContexts)
}

/// Splits on commas that are not nested inside brackets.
pub(crate) fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Lowest monic irreducible of degree `m` over `base`, ordering candidates by
/// their lower coefficients read as base-`|base|` digits (the `t^{m-1}`
/// coefficient most significant).
fn canonical_irreducible(base: &FieldCtx, m: usize) -> Vec<FieldElem> {
    let bq = base.q as u64;
    let total = bq.pow(m as u32);
    for code in 0..total {
        let mut c = Vec::with_capacity(m + 1);
        let mut v = code;
        for _ in 0..m {
            c.push(FieldElem((v % bq) as u32));
            v /= bq;
        }
        c.push(FieldElem::ONE);
        if polyraw::is_irreducible(base, &c) {
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_f2() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.add(f.one(), f.one()), f.zero());
        assert_eq!(f.neg(f.one()), f.one());
    }

    #[test]
    fn f4_modulus_is_t2_t_1() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.q(), 4);
        let m: Vec<u32> = f.modulus().iter().map(|e| e.value()).collect();
        assert_eq!(m, vec![1, 1, 1]);
    }

    #[test]
    fn non_prime_and_cap_rejected() {
        assert_eq!(make_field(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(make_field(2, 17), Err(Error::FieldTooLarge { .. })));
        assert_eq!(make_field(3, 0).unwrap_err(), Error::ZeroDegree);
    }

    #[test]
    fn deterministic_context() {
        let a = make_field(3, 2).unwrap();
        let b = make_field(3, 2).unwrap();
        assert!(a.same(&b));
        assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn f4_omega_relations() {
        let f = make_field(2, 2).unwrap();
        let w = f.elem(2).unwrap(); // the root t of t^2+t+1
        let w2 = f.mul(w, w);
        assert_eq!(f.mul(w, w2), f.one());
        assert_eq!(f.add(f.add(w2, w), f.one()), f.zero());
        let t4 = quadratic_tower(&make_field(2, 1).unwrap()).unwrap();
        let w = t4.elem(2).unwrap();
        assert_eq!(t4.conjugate(w).unwrap(), t4.mul(w, w));
    }

    #[test]
    fn f5_inverse() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(3));
        assert_eq!(f.inv(f.zero()), Err(Error::ZeroInverse));
    }

    #[test]
    fn small_fields_axioms_exhaustive() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4), (3, 3), (2, 6), (5, 2)] {
            let f = make_field(p, k).unwrap();
            let q = f.q() as u64;
            assert!(q <= 64);
            // cyclic multiplicative group of order q-1
            assert_eq!(f.order(f.generator()).unwrap(), q - 1);
            let mut seen = std::collections::HashSet::new();
            for i in 0..q - 1 {
                seen.insert(f.exp(i));
            }
            assert_eq!(seen.len() as u64, q - 1);
            for a in f.elements() {
                // Frobenius^k = id
                let mut x = a;
                for _ in 0..k {
                    x = f.frobenius(x);
                }
                assert_eq!(x, a);
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                    if !b.is_zero() {
                        assert_eq!(f.mul(f.div(a, b).unwrap(), b), a);
                    }
                    for c in [f.one(), f.generator()] {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn tower_conjugation_is_involution_fixing_base() {
        for q in [2u64, 3, 4, 5, 7] {
            let base = gf(q).unwrap();
            let t = quadratic_tower(&base).unwrap();
            assert_eq!(t.q() as u64, q * q);
            for x in t.elements() {
                let c = t.conjugate(x).unwrap();
                assert_eq!(t.conjugate(c).unwrap(), x);
            }
            for x in base.elements() {
                let e = embed_subfield(x, &base, &t).unwrap();
                assert_eq!(t.conjugate(e).unwrap(), e);
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let f2 = make_field(2, 1).unwrap();
        let f4 = quadratic_tower(&f2).unwrap();
        assert_eq!(embed_subfield(f2.one(), &f2, &f4).unwrap(), f4.one());
        let f3 = make_field(3, 1).unwrap();
        let f9 = quadratic_tower(&f3).unwrap();
        assert_eq!(embed_subfield(f3.zero(), &f3, &f9).unwrap(), f9.zero());
        for a in f3.elements() {
            for b in f3.elements() {
                let lhs = f9.add(embed_subfield(a, &f3, &f9).unwrap(), embed_subfield(b, &f3, &f9).unwrap());
                let rhs = embed_subfield(f3.add(a, b), &f3, &f9).unwrap();
                assert_eq!(lhs, rhs);
                let lhs = f9.mul(embed_subfield(a, &f3, &f9).unwrap(), embed_subfield(b, &f3, &f9).unwrap());
                assert_eq!(lhs, embed_subfield(f3.mul(a, b), &f3, &f9).unwrap());
            }
        }
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(embed_subfield(f5.one(), &f5, &f9), Err(Error::IncompatibleContexts));
    }

    #[test]
    fn parse_and_format_round_trip() {
        let f9 = quadratic_tower(&gf(3).unwrap()).unwrap();
        for x in f9.elements() {
            assert_eq!(f9.parse_elem(&f9.format_elem(x)).unwrap(), x);
        }
        assert_eq!(f9.parse_elem("2").unwrap(), f9.from_int(2));
    }
}
