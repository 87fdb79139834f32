use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{bott_h, les_chase, Interval, SesInput};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::{Matrix, SparseEchelon, SparseMap, SparseVec};
use crate::poly::monomials;

/// Degree-`d` piece of a free module `⊕_{slots} S` over `S = k[x_0..x_n]`,
/// all generators in degree 0.
struct Piece {
    slots: usize,
    monos: Vec<Vec<i32>>,
    pos: HashMap<Vec<i32>, usize>,
}

impl Piece {
    fn new(n: usize, slots: usize, d: i64) -> Self {
        let monos = monomials(n + 1, d).to_vec();
        let pos = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Self { slots, monos, pos }
    }

    fn dim(&self) -> usize {
        self.slots * self.monos.len()
    }

    fn index(&self, slot: usize, mono: &[i32]) -> usize {
        slot * self.monos.len() + self.pos[mono]
    }
}

/// A module element `Σ c · x^u · slot`, all terms of one degree.
type Elem = Vec<(usize, Vec<i32>, Fe)>;

/// Degree-`d` pieces of `elem · S_{d - deg elem}`.
fn multiples(p: &Piece, elem: &Elem, elem_deg: i64, d: i64, f: &Field) -> Vec<SparseVec> {
    let nv = p.monos.first().map_or(0, |m| m.len());
    if d < elem_deg || nv == 0 {
        return Vec::new();
    }
    monomials(nv, d - elem_deg)
        .iter()
        .map(|m| {
            let mut v: Vec<(usize, Fe)> = elem
                .iter()
                .map(|(s, u, c)| {
                    let e: Vec<i32> = u.iter().zip(m).map(|(a, b)| a + b).collect();
                    (p.index(*s, &e), *c)
                })
                .collect();
            v.sort_unstable();
            crate::linalg::normalize_sparse(v, f)
        })
        .collect()
}

fn unit(n: usize, i: usize, e: i32) -> Vec<i32> {
    let mut v = vec![0; n + 1];
    v[i] = e;
    v
}

/// Slot maps with constant coefficients, applied monomial by monomial.
fn apply(src: &Piece, dst: &Piece, slot_map: &dyn Fn(usize) -> Vec<(usize, Fe)>, v: &[(usize, Fe)], f: &Field) -> SparseVec {
    let m = src.monos.len();
    let mut out = Vec::new();
    for &(idx, c) in v {
        let (s, k) = (idx / m, idx % m);
        for (t, a) in slot_map(s) {
            out.push((t * m + k, f.mul(a, c)));
        }
    }
    debug_assert_eq!(src.monos.len(), dst.monos.len());
    crate::linalg::normalize_sparse(out, f)
}

fn basis(p: &Piece) -> Vec<SparseVec> {
    (0..p.dim()).map(|i| vec![(i, 1)]).collect()
}

fn rank_of(f: &Field, dim: usize, vs: &[SparseVec]) -> usize {
    let mut e = SparseEchelon::new(f, dim.max(1));
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

/// `dim span(vs ∪ rels) - dim span(rels)`.
fn rank_mod(f: &Field, dim: usize, vs: &[SparseVec], rels: &[SparseVec]) -> usize {
    let mut all = rels.to_vec();
    all.extend_from_slice(vs);
    rank_of(f, dim, &all) - rank_of(f, dim, rels)
}

fn all_in(f: &Field, dim: usize, vs: &[SparseVec], rels: &[SparseVec]) -> bool {
    let mut e = SparseEchelon::new(f, dim.max(1));
    for r in rels {
        e.insert(r);
    }
    vs.iter().all(|v| e.contains(v))
}

/// A quotient `ambient / rels` in one degree.
struct Quot {
    piece: Piece,
    rels: Vec<SparseVec>,
}

impl Quot {
    fn dim(&self, f: &Field) -> usize {
        self.piece.dim() - rank_of(f, self.piece.dim(), &self.rels)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharpCheck {
    pub name: String,
    pub degree: Option<i64>,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharpReport {
    pub n: usize,
    pub p: u32,
    pub max_degree: i64,
    /// `h^0` of each sheaf twisted by `d`, computed from module presentations.
    pub dims: BTreeMap<String, Vec<u64>>,
    pub fibre_ranks: BTreeMap<String, usize>,
    pub checks: Vec<CharpCheck>,
}

impl CharpReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CharpCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Layout {
    n: usize,
}

impl Layout {
    fn v(&self) -> usize {
        self.n + 1
    }
    /// Unordered pairs `i <= j`.
    fn sym(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let m = self.v();
        a * m - a * (a + 1) / 2 + b
    }
    fn sym_count(&self) -> usize {
        self.v() * (self.v() + 1) / 2
    }
    /// Pairs `i < j`.
    fn wedge(&self, i: usize, j: usize) -> usize {
        let m = self.v();
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }
    fn wedge_count(&self) -> usize {
        self.v() * (self.v() - 1) / 2
    }
    fn tensor(&self, i: usize, j: usize) -> usize {
        i * self.v() + j
    }
    fn pairs_le(&self) -> Vec<(usize, usize)> {
        (0..self.v()).flat_map(|i| (i..self.v()).map(move |j| (i, j))).collect()
    }
    fn pairs_lt(&self) -> Vec<(usize, usize)> {
        (0..self.v()).flat_map(|i| (i + 1..self.v()).map(move |j| (i, j))).collect()
    }
}

struct Pieces {
    fq: Quot,
    s2: Quot,
    l2: Quot,
    qq: Quot,
    d2: Quot,
    /// `d2` ambient: symmetric tensors `t_ii`, `t_ij = e_i⊗e_j + e_j⊗e_i`.
    sym_in_qq: Vec<SparseVec>,
}

fn build_pieces(lay: &Layout, d: i64, f: &Field) -> Pieces {
    let n = lay.n;
    let one = 1;
    let w = |slot: &dyn Fn(usize) -> usize| -> Elem { (0..=n).map(|i| (slot(i), unit(n, i, 1), one)).collect() };

    let p_v = Piece::new(n, lay.v(), d);
    let fw: Elem = (0..=n).map(|i| (i, unit(n, i, 2), one)).collect();
    let fq_rels = multiples(&p_v, &fw, 2, d, f);

    let p_s2 = Piece::new(n, lay.sym_count(), d);
    let mut s2_rels = Vec::new();
    for j in 0..=n {
        s2_rels.extend(multiples(&p_s2, &w(&|i| lay.sym(i, j)), 1, d, f));
    }

    let p_l2 = Piece::new(n, lay.wedge_count(), d);
    let mut l2_rels = Vec::new();
    for j in 0..=n {
        let elem: Elem = (0..=n)
            .filter(|&i| i != j)
            .map(|i| {
                if i < j {
                    (lay.wedge(i, j), unit(n, i, 1), one)
                } else {
                    (lay.wedge(j, i), unit(n, i, 1), f.neg(one))
                }
            })
            .collect();
        l2_rels.extend(multiples(&p_l2, &elem, 1, d, f));
    }

    let p_qq = Piece::new(n, lay.v() * lay.v(), d);
    let mut qq_rels = Vec::new();
    for j in 0..=n {
        qq_rels.extend(multiples(&p_qq, &w(&|i| lay.tensor(i, j)), 1, d, f));
        qq_rels.extend(multiples(&p_qq, &w(&|i| lay.tensor(j, i)), 1, d, f));
    }

    // Symmetric tensors and their relations: the preimage of the tensor relations.
    let p_sym = Piece::new(n, lay.sym_count(), d);
    let pairs = lay.pairs_le();
    let sym_slot = |s: usize| -> Vec<(usize, Fe)> {
        let (i, j) = pairs[s];
        if i == j {
            vec![(lay.tensor(i, i), 1)]
        } else {
            vec![(lay.tensor(i, j), 1), (lay.tensor(j, i), 1)]
        }
    };
    let sym_in_qq: Vec<SparseVec> = basis(&p_sym)
        .iter()
        .map(|v| apply(&p_sym, &p_qq, &sym_slot, v, f))
        .collect();
    let mut cols = sym_in_qq.clone();
    cols.extend(qq_rels.iter().cloned());
    let ker = SparseMap {
        src_dim: cols.len(),
        dst_dim: p_qq.dim(),
        cols,
    }
    .kernel(f);
    let sd = p_sym.dim();
    let d2_rels: Vec<SparseVec> = ker
        .into_iter()
        .map(|v| v.into_iter().filter(|&(i, _)| i < sd).collect::<SparseVec>())
        .filter(|v| !v.is_empty())
        .collect();

    Pieces {
        fq: Quot { piece: p_v, rels: fq_rels },
        s2: Quot { piece: p_s2, rels: s2_rels },
        l2: Quot { piece: p_l2, rels: l2_rels },
        qq: Quot { piece: p_qq, rels: qq_rels },
        d2: Quot { piece: p_sym, rels: d2_rels },
        sym_in_qq,
    }
}

struct Seq<'a> {
    name: &'a str,
    x: &'a Quot,
    y: &'a Quot,
    z: &'a Quot,
    alpha: &'a dyn Fn(usize) -> Vec<(usize, Fe)>,
    beta: &'a dyn Fn(usize) -> Vec<(usize, Fe)>,
}

fn check_sequence(s: &Seq, d: i64, f: &Field, out: &mut Vec<CharpCheck>) {
    let img = |q: &Quot, r: &Quot, m: &dyn Fn(usize) -> Vec<(usize, Fe)>, vs: &[SparseVec]| -> Vec<SparseVec> {
        vs.iter().map(|v| apply(&q.piece, &r.piece, m, v, f)).collect()
    };
    let (dx, dy, dz) = (s.x.dim(f), s.y.dim(f), s.z.dim(f));
    let ydim = s.y.piece.dim();
    let zdim = s.z.piece.dim();
    let well = all_in(f, ydim, &img(s.x, s.y, s.alpha, &s.x.rels), &s.y.rels)
        && all_in(f, zdim, &img(s.y, s.z, s.beta, &s.y.rels), &s.z.rels);
    let ax = img(s.x, s.y, s.alpha, &basis(&s.x.piece));
    let inj = rank_mod(f, ydim, &ax, &s.y.rels) == dx;
    let bax = img(s.y, s.z, s.beta, &ax);
    let zero = all_in(f, zdim, &bax, &s.z.rels);
    let by = img(s.y, s.z, s.beta, &basis(&s.y.piece));
    let surj = rank_mod(f, zdim, &by, &s.z.rels) == dz;
    let middle = dy == dx + dz;
    let mut push = |what: &str, ok: bool, detail: String| {
        out.push(CharpCheck {
            name: format!("{}/{what}", s.name),
            degree: Some(d),
            passed: ok,
            detail,
        })
    };
    push("well_defined", well, String::new());
    push("injective", inj, format!("dim {dx}"));
    push("composite_zero", zero, String::new());
    push("surjective", surj, format!("dim {dz}"));
    push("exact", inj && zero && surj && middle, format!("{dx} + {dz} = {dy}"));
}

/// Fibre rank of `ambient / rels` at a point, relations evaluated there.
fn fibre_rank(slots: usize, rel_gens: &[Elem], x: &[Fe], f: &Field) -> usize {
    let rows: Vec<Vec<Fe>> = rel_gens
        .iter()
        .map(|e| {
            let mut row = vec![0; slots];
            for (s, u, c) in e {
                let v = u.iter().enumerate().fold(*c, |acc, (i, &k)| f.mul(acc, f.pow(x[i], k as u64)));
                row[*s] = f.add(row[*s], v);
            }
            row
        })
        .collect();
    slots - Matrix::from_rows(&rows).rank(f)
}

/// Checks the characteristic-2 sequences `0 -> F*Q -> S²Q -> Λ²Q -> 0` and
/// `0 -> Λ²Q -> D²Q -> F*Q -> 0` on `P^n` in each degree `0..=max_degree`,
/// using graded-module presentations from the Euler sequence, and for `n = 2`
/// the dimensions of the divided-power example.
pub fn charp_multilinear_suite(n: usize, field: &Field, max_degree: i64, seed: u64) -> Result<CharpReport> {
    let p = field.characteristic();
    if p != 2 {
        return Err(Error::InvalidParameter(format!("the suite needs characteristic 2, got {p}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("the suite needs n >= 2".into()));
    }
    let lay = Layout { n };
    let pairs_le = lay.pairs_le();
    let pairs_lt = lay.pairs_lt();
    let mut checks = Vec::new();
    let mut dims: BTreeMap<String, Vec<u64>> = BTreeMap::new();

    let fq_to_s2 = |s: usize| vec![(lay.sym(s, s), 1)];
    let s2_to_l2 = |s: usize| {
        let (i, j) = pairs_le[s];
        if i == j {
            vec![]
        } else {
            vec![(lay.wedge(i, j), 1)]
        }
    };
    let l2_to_d2 = |s: usize| {
        let (i, j) = pairs_lt[s];
        vec![(lay.sym(i, j), 1)]
    };
    let d2_to_fq = |s: usize| {
        let (i, j) = pairs_le[s];
        if i == j {
            vec![(i, 1)]
        } else {
            vec![]
        }
    };
    let qq_to_l2 = |s: usize| {
        let (i, j) = (s / lay.v(), s % lay.v());
        match i.cmp(&j) {
            std::cmp::Ordering::Less => vec![(lay.wedge(i, j), 1)],
            std::cmp::Ordering::Greater => vec![(lay.wedge(j, i), field.neg(1))],
            std::cmp::Ordering::Equal => vec![],
        }
    };

    for d in 0..=max_degree {
        let pc = build_pieces(&lay, d, field);
        check_sequence(
            &Seq {
                name: "frobenius_sym_wedge",
                x: &pc.fq,
                y: &pc.s2,
                z: &pc.l2,
                alpha: &fq_to_s2,
                beta: &s2_to_l2,
            },
            d,
            field,
            &mut checks,
        );
        check_sequence(
            &Seq {
                name: "wedge_divided_frobenius",
                x: &pc.l2,
                y: &pc.d2,
                z: &pc.fq,
                alpha: &l2_to_d2,
                beta: &d2_to_fq,
            },
            d,
            field,
            &mut checks,
        );
        // D²Q as the kernel of Q⊗Q -> Λ²Q.
        let qdim = pc.qq.piece.dim();
        let ldim = pc.l2.piece.dim();
        let img: Vec<SparseVec> = basis(&pc.qq.piece)
            .iter()
            .map(|v| apply(&pc.qq.piece, &pc.l2.piece, &qq_to_l2, v, field))
            .collect();
        let qq_dim = pc.qq.dim(field);
        let ker_dim = qq_dim - rank_mod(field, ldim, &img, &pc.l2.rels);
        let d2_dim = pc.d2.dim(field);
        let sym_image = rank_mod(field, qdim, &pc.sym_in_qq, &pc.qq.rels);
        checks.push(CharpCheck {
            name: "divided_square_is_kernel".into(),
            degree: Some(d),
            passed: ker_dim == d2_dim && sym_image == d2_dim,
            detail: format!("kernel {ker_dim}, symmetric image {sym_image}, D² {d2_dim}"),
        });
        for (name, q) in [("F*Q", &pc.fq), ("S2Q", &pc.s2), ("L2Q", &pc.l2), ("QxQ", &pc.qq), ("D2Q", &pc.d2)] {
            dims.entry(name.to_string()).or_default().push(q.dim(field) as u64);
        }
    }

    // Fibre ranks at a random point.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Fe> = loop {
        let v: Vec<Fe> = (0..=n).map(|_| field.random(&mut rng)).collect();
        if v.iter().any(|&c| c != 0) {
            break v;
        }
    };
    let one: Fe = 1;
    let w_in = |slot: &dyn Fn(usize) -> usize| -> Elem { (0..=n).map(|i| (slot(i), unit(n, i, 1), one)).collect() };
    let mut fibre_ranks = BTreeMap::new();
    let fw: Elem = (0..=n).map(|i| (i, unit(n, i, 2), one)).collect();
    fibre_ranks.insert("F*Q".to_string(), fibre_rank(lay.v(), &[fw], &x, field));
    let s2g: Vec<Elem> = (0..=n).map(|j| w_in(&|i| lay.sym(i, j))).collect();
    fibre_ranks.insert("S2Q".to_string(), fibre_rank(lay.sym_count(), &s2g, &x, field));
    let l2g: Vec<Elem> = (0..=n)
        .map(|j| {
            (0..=n)
                .filter(|&i| i != j)
                .map(|i| if i < j { (lay.wedge(i, j), unit(n, i, 1), one) } else { (lay.wedge(j, i), unit(n, i, 1), one) })
                .collect()
        })
        .collect();
    fibre_ranks.insert("L2Q".to_string(), fibre_rank(lay.wedge_count(), &l2g, &x, field));
    let expect_ranks = [("F*Q", n), ("S2Q", n * (n + 1) / 2), ("L2Q", n * (n - 1) / 2)];
    for (name, r) in expect_ranks {
        let got = fibre_ranks[name];
        checks.push(CharpCheck {
            name: format!("fibre_rank/{name}"),
            degree: None,
            passed: got == r,
            detail: format!("measured {got}, expected {r}"),
        });
    }

    if n == 2 {
        example_checks(&dims, &mut checks)?;
    }

    Ok(CharpReport {
        n,
        p,
        max_degree,
        dims,
        fibre_ranks,
        checks,
    })
}

fn exact_col(v: &[u64]) -> Vec<Interval> {
    v.iter().map(|&x| Interval::exact(x)).collect()
}

/// `h^i(F*Q(d))` on `P^2` from `0 -> O(d-2) -> 3O(d) -> F*Q(d) -> 0`.
fn frobenius_q_cohomology(d: i64) -> Result<Vec<Interval>> {
    let a = bott_h(2, d - 2).dims;
    let b: Vec<u64> = bott_h(2, d).dims.iter().map(|x| 3 * x).collect();
    let out = les_chase(&SesInput::new(exact_col(&a), exact_col(&b), vec![Interval::unknown(); 3]))?;
    Ok(out.c)
}

fn example_checks(dims: &BTreeMap<String, Vec<u64>>, checks: &mut Vec<CharpCheck>) -> Result<()> {
    let mut push = |name: &str, ok: bool, detail: String| {
        checks.push(CharpCheck {
            name: name.into(),
            degree: None,
            passed: ok,
            detail,
        })
    };
    let fq0 = frobenius_q_cohomology(0)?;
    let fqm1 = frobenius_q_cohomology(-1)?;
    push(
        "example/h0_frobenius_q",
        fq0[0] == Interval::exact(3) && dims["F*Q"][0] == 3,
        format!("chase {}, module {}", fq0[0], dims["F*Q"][0]),
    );
    push("example/h1_frobenius_q", fq0[1] == Interval::exact(0), format!("{}", fq0[1]));
    push("example/h0_frobenius_q_minus_1", fqm1[0] == Interval::exact(0), format!("{}", fqm1[0]));
    // h^1(F*Q(-1)) = h^2(O(-3)) = 1.
    push("example/h1_frobenius_q_minus_1", fqm1[1] == Interval::exact(1), format!("{}", fqm1[1]));
    push("example/h0_divided_square", dims["D2Q"][0] == 6, format!("{}", dims["D2Q"][0]));

    // 0 -> Λ²Q(-1) = O -> D²Q(-1) -> F*Q(-1) -> 0.
    let out = les_chase(&SesInput::new(
        exact_col(&bott_h(2, 0).dims),
        vec![Interval::unknown(); 3],
        fqm1.clone(),
    ))?;
    push(
        "example/h0_divided_square_minus_1",
        out.b[0] == Interval::exact(1),
        format!("{}", out.b[0]),
    );

    // 0 -> O(d-2) -> O(d+1) ⊕ 3O(d) -> D²Q(d) -> 0.
    let mut ok = true;
    let mut detail = Vec::new();
    for (idx, d) in (-1..dims["D2Q"].len() as i64).enumerate() {
        let h = |e: i64| bott_h(2, e).dims[0] as i64;
        let res = h(d + 1) + 3 * h(d) - h(d - 2);
        let measured = if d < 0 { out.b[0].lo as i64 } else { dims["D2Q"][idx - 1] as i64 };
        ok &= res == measured;
        detail.push(format!("d={d}: {measured}/{res}"));
    }
    push("example/resolution_bookkeeping", ok, detail.join(", "));
    Ok(())
}
