//! Bihomogeneous polynomials in `x_0..x_n` (the `L` factor) and `y_0..y_n`
//! (the `h` factor) over a finite field, plus binary forms for lines.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::field::{Fe, Field};

/// Exponent vector `[x_0..x_n, y_0..y_n]`. Negative entries appear only in
/// cohomology labels.
pub type Mono = Vec<i32>;

/// All exponent vectors of `nvars` nonnegative entries summing to `d`, in
/// graded-lex (descending lex) order: `x_0^d` first.
pub fn monomials(nvars: usize, d: i64) -> Arc<Vec<Vec<i32>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, i64), Arc<Vec<Vec<i32>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(nvars, d)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if d >= 0 && nvars > 0 {
        let mut cur = vec![0i32; nvars];
        fill(&mut cur, 0, d as i32, &mut out);
    } else if d == 0 {
        out.push(Vec::new());
    }
    let v = Arc::new(out);
    cache.lock().unwrap().insert((nvars, d), v.clone());
    v
}

fn fill(cur: &mut Vec<i32>, pos: usize, rem: i32, out: &mut Vec<Vec<i32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(cur.clone());
        return;
    }
    for e in (0..=rem).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, rem - e, out);
    }
    cur[pos] = 0;
}

/// `C(m, k)` for nonnegative arguments as a machine integer.
pub fn binom_u(m: i64, k: i64) -> u64 {
    if k < 0 || m < k || m < 0 {
        return 0;
    }
    let k = k.min(m - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (m - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

/// Number of monomials of degree `d` in `nvars` variables.
pub fn count_monomials(nvars: usize, d: i64) -> usize {
    if d < 0 {
        return 0;
    }
    binom_u(d + nvars as i64 - 1, nvars as i64 - 1) as usize
}

/// A polynomial in `x_0..x_n, y_0..y_n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BiPoly {
    pub n: usize,
    pub terms: BTreeMap<Mono, Fe>,
}

/// Serialized term: `[coeff, x-exponents, y-exponents]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson(pub Fe, pub Vec<i32>, pub Vec<i32>);

impl BiPoly {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Fe) -> Self {
        let mut p = Self::zero(n);
        if c != 0 {
            p.terms.insert(vec![0; 2 * (n + 1)], c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, 1)
    }

    pub fn monomial(n: usize, exps: Mono, c: Fe) -> Self {
        assert_eq!(exps.len(), 2 * (n + 1));
        let mut p = Self::zero(n);
        if c != 0 {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn x(n: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * (n + 1)];
        e[i] = 1;
        Self::monomial(n, e, 1)
    }

    pub fn y(n: usize, j: usize) -> Self {
        let mut e = vec![0; 2 * (n + 1)];
        e[n + 1 + j] = 1;
        Self::monomial(n, e, 1)
    }

    /// `Σ_i coeffs[i] x_i`.
    pub fn linear_x(n: usize, coeffs: &[Fe]) -> Self {
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; 2 * (n + 1)];
                e[i] = 1;
                p.terms.insert(e, c);
            }
        }
        p
    }

    /// `Σ_j coeffs[j] y_j`.
    pub fn linear_y(n: usize, coeffs: &[Fe]) -> Self {
        let mut p = Self::zero(n);
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; 2 * (n + 1)];
                e[n + 1 + j] = 1;
                p.terms.insert(e, c);
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    /// Bidegree `(deg_x, deg_y)` if homogeneous in both; `None` for zero or
    /// inhomogeneous polynomials.
    pub fn bidegree(&self) -> Option<(i64, i64)> {
        let n1 = self.n + 1;
        let mut it = self.terms.keys().map(|e| {
            (
                e[..n1].iter().map(|&v| v as i64).sum::<i64>(),
                e[n1..].iter().map(|&v| v as i64).sum::<i64>(),
            )
        });
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self, f: &Field) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c, f);
        }
        out
    }

    pub fn sub(&self, other: &Self, f: &Field) -> Self {
        self.add(&other.scale(f.neg(1), f), f)
    }

    pub fn scale(&self, c: Fe, f: &Field) -> Self {
        let mut out = Self::zero(self.n);
        if c == 0 {
            return out;
        }
        for (m, &v) in &self.terms {
            out.terms.insert(m.clone(), f.mul(v, c));
        }
        out
    }

    pub fn neg(&self, f: &Field) -> Self {
        self.scale(f.neg(1), f)
    }

    fn add_term(&mut self, m: Mono, c: Fe, f: &Field) {
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = f.add(*v, c);
                if *v == 0 {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        assert_eq!(self.n, other.n);
        let mut acc: HashMap<Mono, Fe> = HashMap::new();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let m: Mono = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let e = acc.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(ca, cb));
            }
        }
        Self {
            n: self.n,
            terms: acc.into_iter().filter(|&(_, c)| c != 0).collect(),
        }
    }

    /// `self^k` by repeated squaring of honest products.
    pub fn pow(&self, k: u64, f: &Field) -> Self {
        let mut result = Self::one(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, f);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, f);
            }
        }
        result
    }

    pub fn eval(&self, x: &[Fe], y: &[Fe], f: &Field) -> Fe {
        let n1 = self.n + 1;
        assert_eq!(x.len(), n1);
        assert_eq!(y.len(), n1);
        let mut total = 0;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if i < n1 { x[i] } else { y[i - n1] };
                v = f.mul(v, f.pow(base, e as u64));
                if v == 0 {
                    break;
                }
            }
            total = f.add(total, v);
        }
        total
    }

    /// Exchanges the roles of `x` and `y`.
    pub fn flip(&self) -> Self {
        let n1 = self.n + 1;
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    let mut e = m[n1..].to_vec();
                    e.extend_from_slice(&m[..n1]);
                    (e, c)
                })
                .collect(),
        }
    }

    /// Sets `x_n = y_n = 0` and drops those variables.
    pub fn drop_last_pair(&self) -> Self {
        let n = self.n;
        assert!(n >= 1);
        let n1 = n + 1;
        Self {
            n: n - 1,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m[n] == 0 && m[n1 + n] == 0)
                .map(|(m, &c)| {
                    let mut e = m[..n].to_vec();
                    e.extend_from_slice(&m[n1..n1 + n]);
                    (e, c)
                })
                .collect(),
        }
    }

    /// Entrywise Frobenius shortcut: `Σ c^q m^q`. Equal to `self.pow(q)`
    /// when `q` is a power of the characteristic.
    pub fn frobenius_shortcut(&self, q: u64, f: &Field) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| (m.iter().map(|&e| e * q as i32).collect(), f.pow(c, q)))
                .collect(),
        }
    }

    pub fn to_json_terms(&self) -> Vec<TermJson> {
        let n1 = self.n + 1;
        self.terms
            .iter()
            .map(|(m, &c)| TermJson(c, m[..n1].to_vec(), m[n1..].to_vec()))
            .collect()
    }

    pub fn from_json_terms(n: usize, terms: &[TermJson], f: &Field) -> Self {
        let mut p = Self::zero(n);
        for TermJson(c, xe, ye) in terms {
            let mut e = xe.clone();
            e.extend_from_slice(ye);
            p.add_term(e, *c, f);
        }
        p
    }

    /// Substitutes a parametrization of each factor and returns the binary
    /// form in `(u, v)`.
    pub fn restrict(&self, x: &FactorParam, y: &FactorParam, f: &Field) -> BinaryForm {
        let n1 = self.n + 1;
        let mut out = BinaryForm::zero(0);
        let mut first = true;
        for (m, &c) in &self.terms {
            let mut term = BinaryForm::constant(c);
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let lin = if i < n1 { x.coordinate(i) } else { y.coordinate(i - n1) };
                term = term.mul(&lin.pow(e as u32, f), f);
            }
            if first {
                out = term;
                first = false;
            } else {
                out = out.add(&term, f);
            }
        }
        out
    }
}

/// Either a point of `P^n` or a line through two points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorParam {
    Point(Vec<Fe>),
    Line(Vec<Fe>, Vec<Fe>),
}

impl FactorParam {
    /// The `i`-th coordinate as a binary form of degree 0 or 1.
    pub fn coordinate(&self, i: usize) -> BinaryForm {
        match self {
            FactorParam::Point(p) => BinaryForm::constant(p[i]),
            FactorParam::Line(p, q) => BinaryForm {
                degree: 1,
                coeffs: vec![p[i], q[i]],
            },
        }
    }
}

/// Homogeneous binary form `Σ coeffs[i] u^{d-i} v^i` of degree `d`. The zero
/// form still carries a degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryForm {
    pub degree: usize,
    pub coeffs: Vec<Fe>,
}

impl BinaryForm {
    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0; degree + 1],
        }
    }

    pub fn constant(c: Fe) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self, f: &Field) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        Self {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        let d = self.degree + other.degree;
        let mut coeffs = vec![0; d + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
            }
        }
        Self { degree: d, coeffs }
    }

    pub fn pow(&self, k: u32, f: &Field) -> Self {
        let mut r = Self::constant(1);
        for _ in 0..k {
            r = r.mul(self, f);
        }
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn monomial_order_and_count() {
        let m = monomials(3, 2);
        assert_eq!(m.len(), 6);
        assert_eq!(m[0], vec![2, 0, 0]);
        assert_eq!(m[1], vec![1, 1, 0]);
        assert_eq!(m[5], vec![0, 0, 2]);
        for nv in 1..5 {
            for d in 0..6 {
                assert_eq!(monomials(nv, d).len(), count_monomials(nv, d));
            }
        }
        assert!(monomials(3, -1).is_empty());
    }

    #[test]
    fn freshman_dream() {
        let f = Field::new(FieldSpec { p: 3, e: 2 }).unwrap();
        let n = 2;
        let l = BiPoly::linear_x(n, &[1, 5, 7]).add(&BiPoly::linear_y(n, &[2, 0, 3]), &f);
        assert_eq!(l.pow(9, &f), l.frobenius_shortcut(9, &f));
        assert_eq!(l.pow(3, &f).bidegree(), None);
        assert_eq!(BiPoly::linear_x(n, &[1, 1, 0]).pow(3, &f).bidegree(), Some((3, 0)));
    }

    #[test]
    fn restriction_to_line() {
        let f = Field::new(FieldSpec { p: 5, e: 1 }).unwrap();
        let n = 1;
        // f = x0*y0 + x1*y1 on the line x = u*(1,0) + v*(0,1), y = (2,3).
        let g = BiPoly::x(n, 0)
            .mul(&BiPoly::y(n, 0), &f)
            .add(&BiPoly::x(n, 1).mul(&BiPoly::y(n, 1), &f), &f);
        let b = g.restrict(
            &FactorParam::Line(vec![1, 0], vec![0, 1]),
            &FactorParam::Point(vec![2, 3]),
            &f,
        );
        assert_eq!(b.degree, 1);
        assert_eq!(b.coeffs, vec![2, 3]);
    }

    #[test]
    fn cancellation_removes_terms() {
        let f = Field::new(FieldSpec { p: 2, e: 1 }).unwrap();
        let a = BiPoly::x(2, 0);
        assert!(a.add(&a, &f).is_zero());
    }
}
