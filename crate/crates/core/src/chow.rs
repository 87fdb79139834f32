//! The Chow ring `Z[L,h]/(L^{n+1}, h^{n+1})` of `P^n_L x P^n_h` and Chern-class
//! calculus: twists, duals, Frobenius pullback, exterior and symmetric powers,
//! Chern characters and Hirzebruch-Riemann-Roch.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::log_p;

/// A divisor class `l*L + h*h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Divisor {
    pub l: i64,
    pub h: i64,
}

impl Divisor {
    pub const fn new(l: i64, h: i64) -> Self {
        Self { l, h }
    }

    pub fn neg(self) -> Self {
        Self::new(-self.l, -self.h)
    }

    pub fn add(self, o: Self) -> Self {
        Self::new(self.l + o.l, self.h + o.h)
    }

    pub fn scale(self, k: i64) -> Self {
        Self::new(self.l * k, self.h * k)
    }
}

/// Integer class in the Chow ring. `coeff[i][j]` is the coefficient of `L^i h^j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChowClass {
    n: usize,
    coeff: Vec<Vec<BigInt>>,
}

impl fmt::Debug for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChowClass(n={}, {})", self.n, self)
    }
}

impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for d in 0..=2 * self.n {
            for i in (0..=d.min(self.n)).rev() {
                let j = d - i;
                if j > self.n {
                    continue;
                }
                let c = &self.coeff[i][j];
                if c.is_zero() {
                    continue;
                }
                let mono = match (i, j) {
                    (0, 0) => String::new(),
                    _ => {
                        let mut s = String::new();
                        if i > 0 {
                            s.push('L');
                            if i > 1 {
                                s.push_str(&format!("^{i}"));
                            }
                        }
                        if j > 0 {
                            s.push('h');
                            if j > 1 {
                                s.push_str(&format!("^{j}"));
                            }
                        }
                        s
                    }
                };
                let s = if mono.is_empty() {
                    c.to_string()
                } else if c.is_one() {
                    mono
                } else if *c == -BigInt::one() {
                    format!("-{mono}")
                } else {
                    format!("{c}{mono}")
                };
                parts.push(s);
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

impl ChowClass {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            coeff: vec![vec![BigInt::zero(); n + 1]; n + 1],
        }
    }

    pub fn one(n: usize) -> Self {
        let mut c = Self::zero(n);
        c.coeff[0][0] = BigInt::one();
        c
    }

    /// `1 + l*L + h*h`.
    pub fn one_plus(n: usize, d: Divisor) -> Self {
        Self::one(n).add(&Self::divisor(n, d)).unwrap()
    }

    pub fn divisor(n: usize, d: Divisor) -> Self {
        let mut c = Self::zero(n);
        if n >= 1 {
            c.coeff[1][0] = BigInt::from(d.l);
            c.coeff[0][1] = BigInt::from(d.h);
        }
        c
    }

    /// Builds a class from a coefficient function; entries outside the grid are ignored.
    pub fn from_fn(n: usize, mut g: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut c = Self::zero(n);
        for i in 0..=n {
            for j in 0..=n {
                c.coeff[i][j] = g(i, j);
            }
        }
        c
    }

    pub fn from_grid(n: usize, grid: Vec<Vec<BigInt>>) -> Result<Self> {
        if grid.len() != n + 1 || grid.iter().any(|r| r.len() != n + 1) {
            return Err(Error::InvalidParameter(format!(
                "coefficient grid must be {0}x{0}",
                n + 1
            )));
        }
        Ok(Self { n, coeff: grid })
    }

    /// Convenience constructor from small integers, `rows[i][j]` for `L^i h^j`.
    pub fn from_i64(n: usize, rows: &[&[i64]]) -> Self {
        Self::from_fn(n, |i, j| {
            BigInt::from(rows.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0))
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, i: usize, j: usize) -> &BigInt {
        &self.coeff[i][j]
    }

    pub fn grid(&self) -> &[Vec<BigInt>] {
        &self.coeff
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.coeff[i][j] = v;
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_fn(self.n, |i, j| &self.coeff[i][j] + &other.coeff[i][j]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::from_fn(self.n, |i, j| &self.coeff[i][j] - &other.coeff[i][j]))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.n, |i, j| -&self.coeff[i][j])
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_fn(self.n, |i, j| &self.coeff[i][j] * k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().flatten().all(|c| c.is_zero())
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..=n {
            for j in 0..=n {
                let a = &self.coeff[i][j];
                if a.is_zero() {
                    continue;
                }
                for k in 0..=n - i {
                    for l in 0..=n - j {
                        let b = &other.coeff[k][l];
                        if !b.is_zero() {
                            out.coeff[i + k][j + l] += a * b;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = Self::one(self.n);
        for _ in 0..k {
            r = r.mul(self).unwrap();
        }
        r
    }

    /// Homogeneous part of total degree `d`.
    pub fn degree_part(&self, d: usize) -> Self {
        Self::from_fn(self.n, |i, j| {
            if i + j == d {
                self.coeff[i][j].clone()
            } else {
                BigInt::zero()
            }
        })
    }

    /// Coefficients `(L, h)` of the degree-one part.
    pub fn c1(&self) -> (BigInt, BigInt) {
        if self.n == 0 {
            return (BigInt::zero(), BigInt::zero());
        }
        (self.coeff[1][0].clone(), self.coeff[0][1].clone())
    }

    /// The degree-one part as a divisor, if it fits in `i64`.
    pub fn c1_divisor(&self) -> Option<Divisor> {
        let (l, h) = self.c1();
        Some(Divisor::new(l.to_i64()?, h.to_i64()?))
    }

    pub fn is_unit(&self) -> bool {
        self.coeff[0][0].is_one()
    }

    /// Multiplies every codimension-`d` coefficient by `s^d`.
    fn scale_by_degree(&self, s: &BigInt) -> Self {
        Self::from_fn(self.n, |i, j| &self.coeff[i][j] * s.pow((i + j) as u32))
    }

    pub fn to_rational(&self) -> QClass {
        QClass {
            n: self.n,
            c: (0..=self.n)
                .flat_map(|i| (0..=self.n).map(move |j| (i, j)))
                .map(|(i, j)| BigRational::from_integer(self.coeff[i][j].clone()))
                .collect(),
        }
    }
}

/// Inverse of a class with constant term 1.
pub fn inv_unit(a: &ChowClass) -> Result<ChowClass> {
    if !a.is_unit() {
        return Err(Error::NonUnit(a.coeff[0][0].to_string()));
    }
    // a = 1 - u with u nilpotent: a^{-1} = Σ u^k, u^{2n+1} = 0.
    let u = ChowClass::one(a.n).sub(a)?;
    let mut result = ChowClass::one(a.n);
    let mut power = ChowClass::one(a.n);
    for _ in 0..2 * a.n {
        power = power.mul(&u)?;
        if power.is_zero() {
            break;
        }
        result = result.add(&power)?;
    }
    Ok(result)
}

pub fn chow_mul(a: &ChowClass, b: &ChowClass) -> Result<ChowClass> {
    a.mul(b)
}

/// Rank and total Chern class of a bundle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleClassData {
    pub rank: usize,
    #[serde(rename = "totalChern")]
    pub total_chern: ChowClass,
}

impl BundleClassData {
    pub fn new(rank: usize, total_chern: ChowClass) -> Result<Self> {
        if !total_chern.is_unit() {
            return Err(Error::NonUnit(total_chern.coeff[0][0].to_string()));
        }
        Ok(Self { rank, total_chern })
    }

    pub fn line(n: usize, d: Divisor) -> Self {
        Self {
            rank: 1,
            total_chern: ChowClass::one_plus(n, d),
        }
    }

    pub fn trivial(n: usize, rank: usize) -> Self {
        Self {
            rank,
            total_chern: ChowClass::one(n),
        }
    }

    pub fn n(&self) -> usize {
        self.total_chern.n
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            rank: self.rank + other.rank,
            total_chern: self.total_chern.mul(&other.total_chern)?,
        })
    }

    pub fn twist(&self, m: Divisor) -> Self {
        Self {
            rank: self.rank,
            total_chern: twist_chern(self.rank, &self.total_chern, m),
        }
    }

    pub fn dual(&self) -> Self {
        Self {
            rank: self.rank,
            total_chern: dual_chern(&self.total_chern),
        }
    }
}

/// Validates `q` as a power of some prime and returns that prime (`None` for `q = 1`).
fn prime_of(q: u64) -> Result<Option<u64>> {
    if q == 0 {
        return Err(Error::InvalidParameter("q must be positive".into()));
    }
    if q == 1 {
        return Ok(None);
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    if log_p(q, p).is_none() {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    Ok(Some(p))
}

/// `c(E_0[n,q,k](-L)) = (1 + (q-k)L - kh) / ((1 - qh)(1 + qL))`, rank `n`.
pub fn chern_e0_symbolic(n: usize, q: u64, k: u64) -> Result<BundleClassData> {
    prime_of(q)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    if k < 1 || k > q {
        return Err(Error::InvalidParameter(format!("k={k} outside [1, {q}]")));
    }
    let (q, k) = (q as i64, k as i64);
    let num = ChowClass::one_plus(n, Divisor::new(q - k, -k));
    let d1 = inv_unit(&ChowClass::one_plus(n, Divisor::new(0, -q)))?;
    let d2 = inv_unit(&ChowClass::one_plus(n, Divisor::new(q, 0)))?;
    BundleClassData::new(n, d1.mul(&num)?.mul(&d2)?)
}

/// `c(O_{mA}(D)) = c(O(D)) / c(O(D - m(L+h)))`, where `A` is a divisor of type `L+h`.
pub fn chern_divisor_sheaf(n: usize, m: i64, d: Divisor) -> Result<ChowClass> {
    let num = ChowClass::one_plus(n, d);
    let den = ChowClass::one_plus(n, d.add(Divisor::new(-m, -m)));
    num.mul(&inv_unit(&den)?)
}

/// `c_j(E ⊗ M) = Σ_i C(r-i, j-i) c_i(E) m^{j-i}`.
pub fn twist_chern(r: usize, c: &ChowClass, m: Divisor) -> ChowClass {
    let n = c.n;
    let mpow: Vec<ChowClass> = {
        let md = ChowClass::divisor(n, m);
        let mut v = vec![ChowClass::one(n)];
        for _ in 0..2 * n {
            let next = v.last().unwrap().mul(&md).unwrap();
            v.push(next);
        }
        v
    };
    let parts: Vec<ChowClass> = (0..=2 * n).map(|d| c.degree_part(d)).collect();
    let mut out = ChowClass::zero(n);
    for j in 0..=2 * n {
        for i in 0..=j.min(r) {
            let b = binom_big(r as i64 - i as i64, (j - i) as i64);
            if b.is_zero() {
                continue;
            }
            let term = parts[i].mul(&mpow[j - i]).unwrap().scale(&b);
            out = out.add(&term).unwrap();
        }
    }
    out
}

/// `c_i ↦ (-1)^i c_i`.
pub fn dual_chern(c: &ChowClass) -> ChowClass {
    c.scale_by_degree(&BigInt::from(-1))
}

/// Pullback along the `q`-power Frobenius: a codimension-`d` class scales by `q^d`.
pub fn frobenius_pull_chern(c: &ChowClass, q: i64) -> Result<ChowClass> {
    if q < 1 {
        return Err(Error::InvalidParameter(format!("Frobenius power {q} < 1")));
    }
    Ok(c.scale_by_degree(&BigInt::from(q)))
}

/// Polynomial binomial `m(m-1)...(m-k+1)/k!`, valid for negative `m`.
pub fn binom_big(m: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(m - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Rational class, flattened `(n+1)x(n+1)` grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QClass {
    pub n: usize,
    c: Vec<BigRational>,
}

impl QClass {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            c: vec![BigRational::zero(); (n + 1) * (n + 1)],
        }
    }

    pub fn constant(n: usize, v: BigRational) -> Self {
        let mut q = Self::zero(n);
        q.c[0] = v;
        q
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.c[self.idx(i, j)]
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            n: self.n,
            c: self.c.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..=n {
            for j in 0..=n {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..=n - i {
                    for l in 0..=n - j {
                        let b = o.get(k, l);
                        if !b.is_zero() {
                            let t = out.idx(i + k, j + l);
                            out.c[t] += a * b;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn degree_part(&self, d: usize) -> Self {
        let mut out = Self::zero(self.n);
        for i in 0..=self.n {
            for j in 0..=self.n {
                if i + j == d {
                    let t = self.idx(i, j);
                    out.c[t] = self.c[t].clone();
                }
            }
        }
        out
    }

    /// Multiplies the degree-`d` part by `s^d`.
    pub fn scale_by_degree(&self, s: &BigRational) -> Self {
        let mut out = self.clone();
        for i in 0..=self.n {
            for j in 0..=self.n {
                let t = self.idx(i, j);
                out.c[t] = &self.c[t] * s.pow((i + j) as i32);
            }
        }
        out
    }

    pub fn to_integral(&self) -> Option<ChowClass> {
        let mut out = ChowClass::zero(self.n);
        for i in 0..=self.n {
            for j in 0..=self.n {
                let v = self.get(i, j);
                if !v.is_integer() {
                    return None;
                }
                out.coeff[i][j] = v.to_integer();
            }
        }
        Some(out)
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn rat(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

/// Power sums `p_1..p_{2n}` of the Chern roots, by Newton's identities.
pub fn power_sums(c: &ChowClass) -> Vec<ChowClass> {
    let n = c.n;
    let e: Vec<ChowClass> = (0..=2 * n).map(|d| c.degree_part(d)).collect();
    let mut p: Vec<ChowClass> = vec![ChowClass::zero(n)];
    for d in 1..=2 * n {
        let mut acc = e[d].scale(&BigInt::from(d as i64));
        if d % 2 == 0 {
            acc = acc.neg();
        }
        for i in 1..d {
            let mut t = e[i].mul(&p[d - i]).unwrap();
            if i % 2 == 0 {
                t = t.neg();
            }
            acc = acc.add(&t).unwrap();
        }
        p.push(acc);
    }
    p
}

/// Chern character `r + Σ p_d / d!`.
pub fn chern_character(r: usize, c: &ChowClass) -> QClass {
    let n = c.n;
    let p = power_sums(c);
    let mut ch = QClass::constant(n, rat(BigInt::from(r)));
    for (d, pd) in p.iter().enumerate().skip(1) {
        ch = ch.add(&pd.to_rational().scale(&BigRational::new(BigInt::one(), factorial(d))));
    }
    ch
}

/// Recovers `(rank, c)` from a Chern character, asserting integrality.
pub fn chern_from_character(ch: &QClass) -> Result<(usize, ChowClass)> {
    let n = ch.n;
    let r0 = ch.get(0, 0);
    if !r0.is_integer() || r0.is_negative() {
        return Err(Error::ArithmeticFault(format!("rank {r0} is not a natural number")));
    }
    let rank = r0.to_integer().to_usize().ok_or_else(|| {
        Error::ArithmeticFault("rank does not fit in usize".into())
    })?;
    let p: Vec<QClass> = (0..=2 * n)
        .map(|d| ch.degree_part(d).scale(&rat(factorial(d))))
        .collect();
    let mut e: Vec<QClass> = vec![QClass::constant(n, BigRational::one())];
    for d in 1..=2 * n {
        let mut acc = QClass::zero(n);
        for i in 1..=d {
            let mut t = e[d - i].mul(&p[i]);
            if i % 2 == 0 {
                t = t.scale(&rat(BigInt::from(-1)));
            }
            acc = acc.add(&t);
        }
        e.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(d as i64))));
    }
    let total = e.iter().fold(QClass::zero(n), |acc, x| acc.add(x));
    let c = total
        .to_integral()
        .ok_or_else(|| Error::ArithmeticFault("non-integral Chern class".into()))?;
    Ok((rank, c))
}

/// Chern class of a tensor product via Chern characters.
pub fn tensor_chern(a: &BundleClassData, b: &BundleClassData) -> Result<BundleClassData> {
    let ch = chern_character(a.rank, &a.total_chern).mul(&chern_character(b.rank, &b.total_chern));
    let (rank, c) = chern_from_character(&ch)?;
    BundleClassData::new(rank, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerKind {
    Wedge,
    Sym,
}

/// Exterior or symmetric power, computed in the rational Chow ring from Adams
/// operations: `λ_t = exp(Σ (-1)^{m-1} ψ^m t^m / m)` and
/// `σ_t = exp(Σ ψ^m t^m / m)`.
pub fn wedge_sym_chern(r: usize, c: &ChowClass, k: usize, kind: PowerKind) -> Result<BundleClassData> {
    let n = c.n;
    if kind == PowerKind::Wedge && k > r {
        return Err(Error::WedgeOutOfRange { k, rank: r });
    }
    if k == 0 {
        return Ok(BundleClassData::trivial(n, 1));
    }
    let ch = chern_character(r, c);
    // s_m = ±ψ^m(ch)/m.
    let s: Vec<QClass> = (0..=k)
        .map(|m| {
            if m == 0 {
                return QClass::zero(n);
            }
            let psi = ch.scale_by_degree(&rat(BigInt::from(m as i64)));
            let sign = if kind == PowerKind::Wedge && m % 2 == 0 { -1 } else { 1 };
            psi.scale(&BigRational::new(BigInt::from(sign), BigInt::from(m as i64)))
        })
        .collect();
    // j e_j = Σ_{m=1}^{j} m s_m e_{j-m}.
    let mut e: Vec<QClass> = vec![QClass::constant(n, BigRational::one())];
    for j in 1..=k {
        let mut acc = QClass::zero(n);
        for m in 1..=j {
            acc = acc.add(&s[m].mul(&e[j - m]).scale(&rat(BigInt::from(m as i64))));
        }
        e.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(j as i64))));
    }
    let (rank, total) = chern_from_character(&e[k])?;
    let expected = match kind {
        PowerKind::Wedge => binom_big(r as i64, k as i64),
        PowerKind::Sym => binom_big((r + k) as i64 - 1, k as i64),
    };
    if BigInt::from(rank) != expected {
        return Err(Error::ArithmeticFault(format!(
            "rank {rank} of power differs from {expected}"
        )));
    }
    BundleClassData::new(rank, total)
}

/// Univariate Todd series of `P^n`: `(x / (1 - e^{-x}))^{n+1}` to degree `n`.
fn todd_series(n: usize) -> Vec<BigRational> {
    // g(x) = (1 - e^{-x})/x = Σ (-1)^k x^k / (k+1)!.
    let g: Vec<BigRational> = (0..=n)
        .map(|k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            BigRational::new(BigInt::from(s), factorial(k + 1))
        })
        .collect();
    // 1/g by power series inversion.
    let mut inv = vec![BigRational::zero(); n + 1];
    inv[0] = BigRational::one();
    for d in 1..=n {
        let mut acc = BigRational::zero();
        for i in 1..=d {
            acc += &g[i] * &inv[d - i];
        }
        inv[d] = -acc;
    }
    let mut out = vec![BigRational::zero(); n + 1];
    out[0] = BigRational::one();
    for _ in 0..=n {
        let mut next = vec![BigRational::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                next[i + j] += &out[i] * &inv[j];
            }
        }
        out = next;
    }
    out
}

/// Todd class of `P^n x P^n`.
pub fn todd_class(n: usize) -> QClass {
    let t = todd_series(n);
    let mut q = QClass::zero(n);
    for i in 0..=n {
        for j in 0..=n {
            let idx = q.idx(i, j);
            q.c[idx] = &t[i] * &t[j];
        }
    }
    q
}

/// `χ = ∫ ch(E) Td(P^n x P^n)`.
pub fn euler_char_hrr(r: usize, c: &ChowClass) -> Result<BigInt> {
    let n = c.n;
    let integrand = chern_character(r, c).mul(&todd_class(n));
    let top = integrand.get(n, n);
    if !top.is_integer() {
        return Err(Error::ArithmeticFault(format!("non-integral Euler characteristic {top}")));
    }
    Ok(top.to_integer())
}

/// `χ(O(a,b)) = C(n+a, n) C(n+b, n)` with polynomial binomials.
pub fn chi_line(n: usize, d: Divisor) -> BigInt {
    binom_big(n as i64 + d.l, n as i64) * binom_big(n as i64 + d.h, n as i64)
}

/// `c(E_0[n, pq](-L))` from `c(E_0[n, q](-L))` along
/// `0 -> F^* E_0[n,q](-L) -> E_0[n,pq](-L) -> O_{(p-1)A}((pq-1)L - h) -> 0`.
pub fn chern_recursion_step(prev: &ChowClass, p: u64, q: u64) -> Result<ChowClass> {
    let n = prev.n;
    let big_q = (p * q) as i64;
    let pulled = frobenius_pull_chern(prev, p as i64)?;
    let quotient = chern_divisor_sheaf(n, p as i64 - 1, Divisor::new(big_q - 1, -1))?;
    pulled.mul(&quotient)
}

/// `c(E_0[n, p^a, 1](-L))` built by iterating [`chern_recursion_step`] from `q = 1`.
pub fn chern_e0_recursive(n: usize, p: u64, a: u32) -> Result<ChowClass> {
    let mut c = chern_e0_symbolic(n, 1, 1)?.total_chern;
    let mut q = 1;
    for _ in 0..a {
        c = chern_recursion_step(&c, p, q)?;
        q *= p;
    }
    Ok(c)
}

impl Serialize for ChowClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let grid: Vec<Vec<serde_json::Value>> = self
            .coeff
            .iter()
            .map(|row| row.iter().map(big_to_json).collect())
            .collect();
        let mut st = s.serialize_struct("ChowClass", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("coeff", &grid)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ChowClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            coeff: Vec<Vec<serde_json::Value>>,
        }
        let raw = Raw::deserialize(d)?;
        let grid = raw
            .coeff
            .iter()
            .map(|row| row.iter().map(json_to_big).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| serde::de::Error::custom("coefficient is not an integer"))?;
        ChowClass::from_grid(raw.n, grid).map_err(serde::de::Error::custom)
    }
}

/// Integers that fit in `i64` become JSON numbers; larger ones become strings.
pub fn big_to_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn json_to_big(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(num) => num
            .as_i64()
            .map(BigInt::from)
            .or_else(|| num.as_u64().map(BigInt::from)),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}
