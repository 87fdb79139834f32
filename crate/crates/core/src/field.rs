//! Finite fields `F_{p^e}` with table-driven arithmetic.
//!
//! Elements are `u32` values whose base-`p` digits are the coefficients of the
//! element in the polynomial basis `1, x, ..., x^{e-1}`. In particular the prime
//! field embeds as `0..p`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Fe = u32;

/// Largest field order we are willing to tabulate.
const MAX_ORDER: u64 = 1 << 20;
const ADD_TABLE_MAX: u32 = 1024;

/// Field order data as it appears in reports and JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
}

impl FieldSpec {
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidParameter("extension degree must be >= 1".into()));
        }
        let order = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "field of order {p}^{e} is too large"
            )));
        }
        Ok(Self { p, e })
    }

    /// Smallest extension with at least 64 elements.
    pub fn with_default_extension(p: u32) -> Result<Self> {
        let mut e = 1;
        while (p as u64).pow(e) < 64 {
            e += 1;
        }
        Self::new(p, e)
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.e)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `a` with `q = p^a`, or `None` if `q` is not a positive power of `p`
/// (`q = 1` gives `Some(0)`).
pub fn log_p(q: u64, p: u64) -> Option<u32> {
    if q == 0 || p < 2 {
        return None;
    }
    let mut a = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        a += 1;
    }
    (r == 1).then_some(a)
}

struct Tables {
    spec: FieldSpec,
    order: u32,
    /// Coefficients of the defining polynomial below the leading term.
    modulus: Vec<u32>,
    exp: Vec<Fe>,
    log: Vec<u32>,
    add: Option<Vec<Fe>>,
    neg: Vec<Fe>,
}

/// A finite field. Cheap to clone.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.t.spec.p, self.t.spec.e)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.t.spec == other.t.spec
    }
}

impl Eq for Field {}

fn digits(mut a: u32, p: u32, e: u32) -> Vec<u32> {
    let mut d = vec![0; e as usize];
    for slot in d.iter_mut() {
        *slot = a % p;
        a /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

fn digit_add(a: u32, b: u32, p: u32, e: u32) -> u32 {
    let da = digits(a, p, e);
    let db = digits(b, p, e);
    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    undigits(&s, p)
}

fn digit_neg(a: u32, p: u32, e: u32) -> u32 {
    let d: Vec<u32> = digits(a, p, e).iter().map(|x| (p - x) % p).collect();
    undigits(&d, p)
}

/// Multiplies a digit vector by `x` modulo the monic polynomial
/// `x^e + modulus[e-1] x^{e-1} + ... + modulus[0]`.
fn times_x(d: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = d.len();
    let top = d[e - 1];
    let mut out = vec![0; e];
    for i in (1..e).rev() {
        out[i] = d[i - 1];
    }
    for i in 0..e {
        out[i] = (out[i] + (p - top) * modulus[i]) % p;
    }
    out
}

/// Tries `modulus` as a primitive polynomial; on success returns the exp table.
fn try_primitive(modulus: &[u32], p: u32, e: u32, order: u32) -> Option<Vec<Fe>> {
    let n = (order - 1) as usize;
    let mut exp = Vec::with_capacity(n);
    let mut cur = vec![0; e as usize];
    cur[0] = 1;
    let mut seen = vec![false; order as usize];
    for _ in 0..n {
        let v = undigits(&cur, p);
        if v == 0 || seen[v as usize] {
            return None;
        }
        seen[v as usize] = true;
        exp.push(v);
        cur = times_x(&cur, modulus, p);
    }
    (undigits(&cur, p) == 1).then_some(exp)
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let spec = FieldSpec::new(spec.p, spec.e)?;
        let (p, e) = (spec.p, spec.e);
        let order = spec.order();
        let (modulus, exp_base) = if e == 1 {
            // Primitive root search directly in Z/p.
            let mut found = None;
            for g in 1..p.max(2) {
                let m = vec![(p - g) % p];
                if let Some(t) = try_primitive(&m, p, 1, order) {
                    found = Some((m, t));
                    break;
                }
            }
            found.ok_or_else(|| Error::InvalidParameter("no primitive root".into()))?
        } else {
            let mut found = None;
            for code in 0..order {
                let m = digits(code, p, e);
                if m[0] == 0 {
                    continue;
                }
                if let Some(t) = try_primitive(&m, p, e, order) {
                    found = Some((m, t));
                    break;
                }
            }
            found.ok_or_else(|| Error::InvalidParameter("no primitive polynomial".into()))?
        };
        let n = (order - 1) as usize;
        let mut log = vec![0u32; order as usize];
        for (i, &v) in exp_base.iter().enumerate() {
            log[v as usize] = i as u32;
        }
        let mut exp = exp_base.clone();
        exp.extend_from_slice(&exp_base);
        debug_assert_eq!(exp.len(), 2 * n);
        let neg: Vec<Fe> = (0..order).map(|a| digit_neg(a, p, e)).collect();
        let add = if p != 2 && order <= ADD_TABLE_MAX {
            let mut t = vec![0; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    t[(a * order + b) as usize] = digit_add(a, b, p, e);
                }
            }
            Some(t)
        } else {
            None
        };
        Ok(Field {
            t: Arc::new(Tables {
                spec,
                order,
                modulus,
                exp,
                log,
                add,
                neg,
            }),
        })
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(FieldSpec::new(p, 1)?)
    }

    pub fn spec(&self) -> FieldSpec {
        self.t.spec
    }

    pub fn characteristic(&self) -> u32 {
        self.t.spec.p
    }

    pub fn order(&self) -> u32 {
        self.t.order
    }

    /// Coefficients `m_0..m_{e-1}` of the defining polynomial
    /// `x^e + m_{e-1} x^{e-1} + ... + m_0`.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    /// The class of `x`, a primitive element.
    pub fn generator(&self) -> Fe {
        self.t.exp[1 % self.t.exp.len().max(1)]
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.t.spec.p == 2 {
            return a ^ b;
        }
        match &self.t.add {
            Some(t) => t[(a * self.t.order + b) as usize],
            None => digit_add(a, b, self.t.spec.p, self.t.spec.e),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.t.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.t;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a == 0 {
            return None;
        }
        let t = &self.t;
        let n = t.order - 1;
        Some(t.exp[((n - t.log[a as usize]) % n) as usize])
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &self.t;
        let n = (t.order - 1) as u64;
        let l = (t.log[a as usize] as u64 * (k % n)) % n;
        t.exp[l as usize]
    }

    /// Image of an integer under `Z -> F_p -> F_{p^e}`.
    pub fn from_int(&self, v: i64) -> Fe {
        v.rem_euclid(self.t.spec.p as i64) as Fe
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        rng.gen_range(0..self.t.order)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        rng.gen_range(1..self.t.order)
    }

    /// Iterates over all field elements.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.t.order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields() -> Vec<Field> {
        [(2, 1), (2, 6), (3, 1), (3, 4), (5, 3), (7, 1), (2, 11)]
            .iter()
            .map(|&(p, e)| Field::new(FieldSpec { p, e }).unwrap())
            .collect()
    }

    #[test]
    fn default_extensions() {
        let e: Vec<u32> = [2, 3, 5, 7]
            .iter()
            .map(|&p| FieldSpec::with_default_extension(p).unwrap().e)
            .collect();
        assert_eq!(e, vec![6, 4, 3, 3]);
    }

    #[test]
    fn axioms_exhaustive_small() {
        for f in fields().into_iter().filter(|f| f.order() <= 81) {
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in [0, 1, f.generator(), f.order() - 1] {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn prime_field_is_integers_mod_p() {
        let f = Field::new(FieldSpec { p: 3, e: 4 }).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(f.add(a, b), (a + b) % 3);
                assert_eq!(f.mul(a, b), (a * b) % 3);
            }
        }
    }

    #[test]
    fn frobenius_is_additive() {
        for f in fields() {
            let p = f.characteristic() as u64;
            for a in f.elements().step_by(7) {
                for b in f.elements().step_by(5) {
                    assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                }
            }
        }
    }

    #[test]
    fn fermat() {
        for f in fields() {
            let q = f.order() as u64;
            for a in f.elements().step_by(3) {
                assert_eq!(f.pow(a, q), a);
            }
        }
    }

    #[test]
    fn log_p_values() {
        assert_eq!(log_p(8, 2), Some(3));
        assert_eq!(log_p(1, 5), Some(0));
        assert_eq!(log_p(6, 2), None);
        assert!(FieldSpec::new(4, 1).is_err());
    }
}
