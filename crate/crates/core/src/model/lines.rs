use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{BilinearFormA, Monad};
use crate::cohomology::Bidegree;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::Matrix;
use crate::poly::{BinaryForm, FactorParam};

/// Degrees `a_1 >= … >= a_r` of a splitting `⊕ O(a_i)` on a line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SplittingType {
    pub degrees: Vec<i64>,
}

impl SplittingType {
    pub fn new(mut degrees: Vec<i64>) -> Self {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Self { degrees }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree_sum(&self) -> i64 {
        self.degrees.iter().sum()
    }

    /// `h^0(⊕ O(a_i + t))`.
    pub fn h0(&self, t: i64) -> u64 {
        self.degrees.iter().map(|&a| (a + t + 1).max(0) as u64).sum()
    }

    pub fn negate(&self) -> Self {
        Self::new(self.degrees.iter().map(|a| -a).collect())
    }

    /// Recovers the multiset from `h^0(t)` on a window `[lo, hi]` wide enough
    /// that `h^0(lo+1) = 0` and every degree is at least `-hi`.
    pub fn from_profile(profile: &[(i64, u64)], rank: usize) -> Result<Self> {
        let bad = |msg: String| Error::ModelInconsistency(msg);
        if profile.len() < 3 {
            return Err(bad("profile window too short".into()));
        }
        for w in profile.windows(2) {
            if w[1].0 != w[0].0 + 1 {
                return Err(bad("profile twists must be consecutive".into()));
            }
        }
        let h: Vec<i64> = profile.iter().map(|&(_, v)| v as i64).collect();
        if h[0] != 0 || h[1] != 0 {
            return Err(bad(format!("profile does not start at zero: {:?}", &h[..2])));
        }
        let delta: Vec<i64> = h.windows(2).map(|w| w[1] - w[0]).collect();
        let mut degrees = Vec::new();
        for idx in 1..delta.len() {
            let t = profile[idx + 1].0;
            let c = delta[idx] - delta[idx - 1];
            if c < 0 {
                return Err(bad(format!("profile is not convex at t = {t}")));
            }
            degrees.extend(std::iter::repeat(-t).take(c as usize));
        }
        let st = Self::new(degrees);
        if st.rank() != rank {
            return Err(bad(format!(
                "profile gives {} summands, expected rank {rank}",
                st.rank()
            )));
        }
        if let Some(&(t, v)) = profile.iter().find(|&&(t, v)| st.h0(t) != v) {
            return Err(bad(format!("profile not reproduced at t = {t}: measured {v}, fitted {}", st.h0(t))));
        }
        Ok(st)
    }
}

impl fmt::Display for SplittingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.degrees.iter().map(i64::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `dim ker` of `⊕ O(src_i) -> ⊕ O(dst_r)` on `P^1` at twist `t`.
fn kernel_h0(src: &[i64], dst: &[i64], ent: &[Vec<BinaryForm>], t: i64, field: &Field) -> u64 {
    let size = |d: i64| (d + t + 1).max(0) as usize;
    let rows: usize = dst.iter().map(|&d| size(d)).sum();
    let cols: usize = src.iter().map(|&d| size(d)).sum();
    if cols == 0 {
        return 0;
    }
    let mut m = Matrix::zeros(rows.max(1), cols);
    let mut c0 = 0;
    for (i, &d) in src.iter().enumerate() {
        let mut r0 = 0;
        for (r, &e) in dst.iter().enumerate() {
            let p = &ent[r][i];
            if !p.is_zero() {
                for a in 0..size(d) {
                    for (ix, &v) in p.coeffs.iter().enumerate() {
                        m.set(r0 + ix + a, c0 + a, field.add(m.get(r0 + ix + a, c0 + a), v));
                    }
                }
            }
            r0 += size(e);
        }
        c0 += size(d);
    }
    (cols - m.rank(field)) as u64
}

fn line_degree(d: Bidegree, on_x: bool) -> i64 {
    if on_x {
        d.0
    } else {
        d.1
    }
}

enum Presentation {
    /// The bundle is the kernel.
    Kernel,
    /// The dual bundle is the kernel.
    DualKernel,
}

struct Restricted {
    kind: Presentation,
    src: Vec<i64>,
    dst: Vec<i64>,
    ent: Vec<Vec<BinaryForm>>,
}

fn restrict_monad(m: &Monad, x: &FactorParam, y: &FactorParam) -> Result<Restricted> {
    let on_x = match (x, y) {
        (FactorParam::Line(..), FactorParam::Point(_)) => true,
        (FactorParam::Point(_), FactorParam::Line(..)) => false,
        _ => return Err(Error::InvalidParameter("exactly one factor must be a line".into())),
    };
    if m.left.len() > 1 || m.right.len() > 1 {
        return Err(Error::InvalidParameter("line restriction supports one left and one right summand".into()));
    }
    let f = &m.field;
    let deg = |d: Bidegree| line_degree(d, on_x);
    let res = |p: &crate::poly::BiPoly, d: i64| {
        let b = p.restrict(x, y, f);
        if b.is_zero() {
            BinaryForm::zero(d.max(0) as usize)
        } else {
            b
        }
    };
    let a: Vec<BinaryForm> = m
        .a
        .iter()
        .enumerate()
        .map(|(j, row)| match row.first() {
            Some(p) => res(p, deg(m.middle[j]) - deg(m.left[0])),
            None => BinaryForm::zero(0),
        })
        .collect();
    let b: Vec<BinaryForm> = match m.b.first() {
        Some(row) => row
            .iter()
            .enumerate()
            .map(|(j, p)| res(p, deg(m.right[0]) - deg(m.middle[j])))
            .collect(),
        None => Vec::new(),
    };
    let constant = |v: &[BinaryForm]| v.iter().position(|p| p.degree == 0 && !p.is_zero());
    let mid: Vec<i64> = m.middle.iter().map(|&d| deg(d)).collect();
    if let (false, Some(j)) = (m.left.is_empty(), constant(&a)) {
        let keep: Vec<usize> = (0..mid.len()).filter(|&i| i != j).collect();
        return Ok(Restricted {
            kind: Presentation::Kernel,
            src: keep.iter().map(|&i| mid[i]).collect(),
            dst: m.right.iter().map(|&d| deg(d)).collect(),
            ent: if b.is_empty() {
                Vec::new()
            } else {
                vec![keep.iter().map(|&i| b[i].clone()).collect()]
            },
        });
    }
    if let (false, Some(j)) = (m.right.is_empty(), constant(&b)) {
        let keep: Vec<usize> = (0..mid.len()).filter(|&i| i != j).collect();
        return Ok(Restricted {
            kind: Presentation::DualKernel,
            src: keep.iter().map(|&i| -mid[i]).collect(),
            dst: m.left.iter().map(|&d| -deg(d)).collect(),
            ent: if a.is_empty() || m.left.is_empty() {
                Vec::new()
            } else {
                vec![keep.iter().map(|&i| a[i].clone()).collect()]
            },
        });
    }
    if m.left.is_empty() {
        return Ok(Restricted {
            kind: Presentation::Kernel,
            src: mid,
            dst: m.right.iter().map(|&d| deg(d)).collect(),
            ent: vec![b],
        });
    }
    Err(Error::InvalidParameter(
        "no monad map has a constant entry on this line".into(),
    ))
}

fn window(m: &Monad) -> i64 {
    m.left
        .iter()
        .chain(&m.middle)
        .chain(&m.right)
        .flat_map(|&(s, t)| [s.abs(), t.abs()])
        .max()
        .unwrap_or(0)
}

/// `h^0(E|_line(t))` for `t` in `[-w-3, w+2]`, with `w` the largest twist
/// magnitude in the monad. For a dual presentation the profile is of `E*`.
pub fn splitting_profile(m: &Monad, x: &FactorParam, y: &FactorParam) -> Result<(bool, Vec<(i64, u64)>)> {
    let r = restrict_monad(m, x, y)?;
    let w = window(m);
    let prof = (-w - 3..=w + 2)
        .map(|t| (t, kernel_h0(&r.src, &r.dst, &r.ent, t, &m.field)))
        .collect();
    Ok((matches!(r.kind, Presentation::DualKernel), prof))
}

/// Splitting type of the monad cohomology on a line lying in a fibre of one
/// projection (one factor a point, the other a line).
pub fn splitting_type(m: &Monad, x: &FactorParam, y: &FactorParam) -> Result<SplittingType> {
    let (dual, prof) = splitting_profile(m, x, y)?;
    let st = SplittingType::from_profile(&prof, m.rank())?;
    Ok(if dual { st.negate() } else { st })
}

/// A line in a fibre of one of the projections.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineSample {
    /// `true`: the line moves in the `x` factor over the fixed `y` point.
    pub in_x: bool,
    pub point: Vec<Fe>,
    pub p: Vec<Fe>,
    pub q: Vec<Fe>,
}

impl LineSample {
    pub fn params(&self) -> (FactorParam, FactorParam) {
        let pt = FactorParam::Point(self.point.clone());
        let ln = FactorParam::Line(self.p.clone(), self.q.clone());
        if self.in_x {
            (ln, pt)
        } else {
            (pt, ln)
        }
    }

    /// The same line after exchanging the factors.
    pub fn flipped(&self) -> Self {
        Self {
            in_x: !self.in_x,
            ..self.clone()
        }
    }
}

fn random_point<R: Rng + ?Sized>(n: usize, field: &Field, rng: &mut R) -> Vec<Fe> {
    loop {
        let v: Vec<Fe> = (0..=n).map(|_| field.random(rng)).collect();
        if v.iter().any(|&c| c != 0) {
            return v;
        }
    }
}

fn independent(p: &[Fe], q: &[Fe], field: &Field) -> bool {
    (0..p.len()).any(|i| (i + 1..p.len()).any(|j| field.sub(field.mul(p[i], q[j]), field.mul(p[j], q[i])) != 0))
}

fn dot(a: &[Fe], b: &[Fe], field: &Field) -> Fe {
    a.iter().zip(b).fold(0, |acc, (&u, &v)| field.add(acc, field.mul(u, v)))
}

/// Random point of the hyperplane `{z : Σ c_i z_i = 0}`, `c ≠ 0`.
fn random_in_hyperplane<R: Rng + ?Sized>(c: &[Fe], field: &Field, rng: &mut R) -> Vec<Fe> {
    let piv = c.iter().position(|&v| v != 0).expect("nonzero hyperplane");
    loop {
        let mut z: Vec<Fe> = (0..c.len()).map(|_| field.random(rng)).collect();
        z[piv] = 0;
        let s = dot(c, &z, field);
        z[piv] = field.neg(field.mul(s, field.inv(c[piv]).unwrap()));
        if z.iter().any(|&v| v != 0) {
            return z;
        }
    }
}

fn random_pair<R: Rng + ?Sized>(
    mut draw: impl FnMut(&mut R) -> Vec<Fe>,
    field: &Field,
    rng: &mut R,
) -> (Vec<Fe>, Vec<Fe>) {
    loop {
        let p = draw(rng);
        let q = draw(rng);
        if independent(&p, &q, field) {
            return (p, q);
        }
    }
}

/// `c_i = Σ_j a_ij y_j`: `f(x, y0) = Σ c_i x_i`.
fn x_hyperplane(form: &BilinearFormA, y0: &[Fe], field: &Field) -> Vec<Fe> {
    (0..=form.n).map(|i| dot(&form.a[i], y0, field)).collect()
}

/// `c_j = Σ_i a_ij x_i`: `f(x0, y) = Σ c_j y_j`.
fn y_hyperplane(form: &BilinearFormA, x0: &[Fe], field: &Field) -> Vec<Fe> {
    (0..=form.n).map(|j| dot(&form.lambda(j), x0, field)).collect()
}

/// Random `L`-line `ℓ ⊂ P^n_L x {y0}` not contained in `A`.
pub fn random_l_line_off_a<R: Rng + ?Sized>(form: &BilinearFormA, field: &Field, rng: &mut R) -> LineSample {
    let n = form.n;
    loop {
        let y0 = random_point(n, field, rng);
        let c = x_hyperplane(form, &y0, field);
        let (p, q) = random_pair(|r| random_point(n, field, r), field, rng);
        if dot(&c, &p, field) != 0 || dot(&c, &q, field) != 0 {
            return LineSample { in_x: true, point: y0, p, q };
        }
    }
}

/// Random `L`-line inside `A`.
pub fn random_l_line_in_a<R: Rng + ?Sized>(form: &BilinearFormA, field: &Field, rng: &mut R) -> LineSample {
    let y0 = random_point(form.n, field, rng);
    let c = x_hyperplane(form, &y0, field);
    let (p, q) = random_pair(|r| random_in_hyperplane(&c, field, r), field, rng);
    LineSample { in_x: true, point: y0, p, q }
}

/// Random `h`-line `{x0} x M` with `M` not inside `A ∩ ({x0} x P^n_h)`.
pub fn random_h_line<R: Rng + ?Sized>(form: &BilinearFormA, field: &Field, rng: &mut R) -> LineSample {
    let n = form.n;
    loop {
        let x0 = random_point(n, field, rng);
        let c = y_hyperplane(form, &x0, field);
        let (p, q) = random_pair(|r| random_point(n, field, r), field, rng);
        if dot(&c, &p, field) != 0 || dot(&c, &q, field) != 0 {
            return LineSample { in_x: false, point: x0, p, q };
        }
    }
}

/// Random `h`-line inside `A ∩ ({x0} x P^n_h)`; for `n = 2` this is the whole
/// intersection.
pub fn random_jumping_h_line<R: Rng + ?Sized>(form: &BilinearFormA, field: &Field, rng: &mut R) -> LineSample {
    let x0 = random_point(form.n, field, rng);
    let c = y_hyperplane(form, &x0, field);
    let (p, q) = random_pair(|r| random_in_hyperplane(&c, field, r), field, rng);
    LineSample { in_x: false, point: x0, p, q }
}
