//! Symbolic bundle expressions, their Chern data, and the pullback searches.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chow::{
    chern_e0_symbolic, dual_chern, frobenius_pull_chern, inv_unit, tensor_chern, twist_chern,
    wedge_sym_chern, BundleClassData, ChowClass, Divisor, PowerKind,
};
use crate::error::{Error, Result};

/// Expression tree of bundle constructors on `P^n_L x P^n_h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BundleExpr {
    /// `O(l L + h h)`.
    LineBundle { l: i64, h: i64 },
    /// Tautological quotient of `P^n_h`, pulled back.
    PullbackQh,
    /// Tautological quotient of `P^n_L`, pulled back.
    #[serde(rename = "pullback_ql")]
    PullbackQL,
    /// Pullback along the `p^a`-power Frobenius.
    Frobenius { a: u32, child: Box<BundleExpr> },
    Dual { child: Box<BundleExpr> },
    Tensor { children: Vec<BundleExpr> },
    DirectSum { children: Vec<BundleExpr> },
    Wedge { k: usize, child: Box<BundleExpr> },
    Sym { k: usize, child: Box<BundleExpr> },
    /// `E_0[n,q,k](-L)`.
    E0Kernel { n: usize, q: u64, k: u64 },
}

impl BundleExpr {
    pub fn line(l: i64, h: i64) -> Self {
        BundleExpr::LineBundle { l, h }
    }

    pub fn frobenius(a: u32, child: BundleExpr) -> Self {
        BundleExpr::Frobenius {
            a,
            child: Box::new(child),
        }
    }

    pub fn dual(child: BundleExpr) -> Self {
        BundleExpr::Dual {
            child: Box::new(child),
        }
    }

    pub fn wedge(k: usize, child: BundleExpr) -> Self {
        BundleExpr::Wedge {
            k,
            child: Box::new(child),
        }
    }

    pub fn sym(k: usize, child: BundleExpr) -> Self {
        BundleExpr::Sym {
            k,
            child: Box::new(child),
        }
    }

    pub fn tensor(children: Vec<BundleExpr>) -> Self {
        BundleExpr::Tensor { children }
    }

    pub fn direct_sum(children: Vec<BundleExpr>) -> Self {
        BundleExpr::DirectSum { children }
    }

    /// `self ⊗ O(l L + h h)`.
    pub fn twisted(self, l: i64, h: i64) -> Self {
        BundleExpr::tensor(vec![self, BundleExpr::line(l, h)])
    }
}

/// Ambient dimension and characteristic used to evaluate an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalContext {
    pub n: usize,
    pub p: u64,
}

/// Rank and total Chern class of an expression.
pub fn eval_expr(ctx: EvalContext, e: &BundleExpr) -> Result<BundleClassData> {
    let n = ctx.n;
    match e {
        BundleExpr::LineBundle { l, h } => Ok(BundleClassData::line(n, Divisor::new(*l, *h))),
        BundleExpr::PullbackQh => BundleClassData::new(
            n,
            inv_unit(&ChowClass::one_plus(n, Divisor::new(0, -1)))?,
        ),
        BundleExpr::PullbackQL => BundleClassData::new(
            n,
            inv_unit(&ChowClass::one_plus(n, Divisor::new(-1, 0)))?,
        ),
        BundleExpr::Frobenius { a, child } => {
            let inner = eval_expr(ctx, child)?;
            let q = ctx
                .p
                .checked_pow(*a)
                .and_then(|q| i64::try_from(q).ok())
                .ok_or_else(|| Error::InvalidParameter("Frobenius power overflows".into()))?;
            BundleClassData::new(inner.rank, frobenius_pull_chern(&inner.total_chern, q)?)
        }
        BundleExpr::Dual { child } => {
            let inner = eval_expr(ctx, child)?;
            Ok(BundleClassData {
                rank: inner.rank,
                total_chern: dual_chern(&inner.total_chern),
            })
        }
        BundleExpr::DirectSum { children } => {
            let mut acc = BundleClassData {
                rank: 0,
                total_chern: ChowClass::one(n),
            };
            for c in children {
                acc = acc.direct_sum(&eval_expr(ctx, c)?)?;
            }
            Ok(acc)
        }
        BundleExpr::Tensor { children } => {
            let mut acc = BundleClassData::trivial(n, 1);
            for c in children {
                let next = eval_expr(ctx, c)?;
                acc = tensor_pair(&acc, &next)?;
            }
            Ok(acc)
        }
        BundleExpr::Wedge { k, child } => {
            let inner = eval_expr(ctx, child)?;
            wedge_sym_chern(inner.rank, &inner.total_chern, *k, PowerKind::Wedge)
        }
        BundleExpr::Sym { k, child } => {
            let inner = eval_expr(ctx, child)?;
            wedge_sym_chern(inner.rank, &inner.total_chern, *k, PowerKind::Sym)
        }
        BundleExpr::E0Kernel { n: kn, q, k } => {
            if *kn != n {
                return Err(Error::DimensionMismatch(*kn, n));
            }
            chern_e0_symbolic(n, *q, *k)
        }
    }
}

fn line_divisor(b: &BundleClassData) -> Option<Divisor> {
    (b.rank == 1).then(|| b.total_chern.c1_divisor()).flatten()
}

fn tensor_pair(a: &BundleClassData, b: &BundleClassData) -> Result<BundleClassData> {
    if let Some(m) = line_divisor(b) {
        return Ok(BundleClassData {
            rank: a.rank,
            total_chern: twist_chern(a.rank, &a.total_chern, m),
        });
    }
    if let Some(m) = line_divisor(a) {
        return Ok(BundleClassData {
            rank: b.rank,
            total_chern: twist_chern(b.rank, &b.total_chern, m),
        });
    }
    tensor_chern(a, b)
}

/// True iff no twist of `E_0[n,q](-L)` has first Chern class a multiple of `L`
/// or of `h`. Since `c_1(E_0(-L)(aL+bh)) = (na-1)L + (q-1+nb)h`, this holds iff
/// `n` divides neither `1` nor `q-1`.
pub fn factor_pullback_obstruction(n: u64, q: u64) -> bool {
    n >= 2 && (q - 1) % n != 0
}

/// A solution of the degree-one and degree-two coefficient equations.
///
/// The twist is `O(a h + b L)`; the pulled-back hyperplane class is
/// `alpha h + beta L`; `u[i]` is the coefficient of `ell^{i+1}` in the total
/// Chern class of the putative source bundle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PullbackSolution {
    pub a: i64,
    pub b: i64,
    pub alpha: i64,
    pub beta: i64,
    pub u: Vec<i64>,
}

/// Solves `u2 * (alpha^2, 2 alpha beta, beta^2) = (h2, hl, l2)` for an integer `u2`.
fn solve_u2(alpha: i64, beta: i64, h2: &BigInt, hl: &BigInt, l2: &BigInt) -> Option<i64> {
    let ah = BigInt::from(alpha * alpha);
    let am = BigInt::from(2 * alpha * beta);
    let al = BigInt::from(beta * beta);
    let (num, den) = if !ah.is_zero() {
        (h2, &ah)
    } else if !al.is_zero() {
        (l2, &al)
    } else {
        return None;
    };
    let (u2, rem) = num.div_rem(den);
    if !rem.is_zero() {
        return None;
    }
    if &(&u2 * &ah) != h2 || &(&u2 * &am) != hl || &(&u2 * &al) != l2 {
        return None;
    }
    u2.to_i64()
}

/// Enumerates twists `|a|,|b| <= bound` of a class on `P^2 x P^2` and every
/// `(alpha, beta, u1, u2)` with `c(E(ah+bL)) = 1 + u1 ell + u2 ell^2` for
/// `ell = alpha h + beta L`, after normalising `u1` into `0..rank`. Results are
/// sorted by `(a, b, alpha, beta)`.
pub fn nondegeneracy_search(rank: usize, c: &ChowClass, bound: i64) -> Result<Vec<PullbackSolution>> {
    if c.n() != 2 {
        return Err(Error::InvalidParameter(format!(
            "search is implemented for n = 2, got n = {}",
            c.n()
        )));
    }
    if rank == 0 {
        return Err(Error::InvalidParameter("rank must be positive".into()));
    }
    let twists: Vec<(i64, i64)> = (-bound..=bound)
        .flat_map(|a| (-bound..=bound).map(move |b| (a, b)))
        .collect();
    let mut out: Vec<PullbackSolution> = twists
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let t = twist_chern(rank, c, Divisor::new(b, a));
            solutions_for(&t, rank, a, b, bound)
        })
        .collect();
    out.sort();
    Ok(out)
}

fn solutions_for(t: &ChowClass, rank: usize, a: i64, b: i64, bound: i64) -> Vec<PullbackSolution> {
    let c1h = t.coeff(0, 1).clone();
    let c1l = t.coeff(1, 0).clone();
    let (h2, hl, l2) = (t.coeff(0, 2), t.coeff(1, 1), t.coeff(2, 0));
    let mut out = Vec::new();
    for u1 in 0..rank as i64 {
        if u1 == 0 {
            if !c1h.is_zero() || !c1l.is_zero() {
                continue;
            }
            for alpha in 0..=bound {
                for beta in 0..=bound {
                    if alpha == 0 && beta == 0 {
                        continue;
                    }
                    if let Some(u2) = solve_u2(alpha, beta, h2, hl, l2) {
                        out.push(PullbackSolution {
                            a,
                            b,
                            alpha,
                            beta,
                            u: vec![0, u2],
                        });
                    }
                }
            }
            continue;
        }
        let u = BigInt::from(u1);
        let (alpha, ra) = c1h.div_rem(&u);
        let (beta, rb) = c1l.div_rem(&u);
        if !ra.is_zero() || !rb.is_zero() || alpha.is_negative() || beta.is_negative() {
            continue;
        }
        let (Some(alpha), Some(beta)) = (alpha.to_i64(), beta.to_i64()) else {
            continue;
        };
        if alpha == 0 && beta == 0 {
            continue;
        }
        if let Some(u2) = solve_u2(alpha, beta, h2, hl, l2) {
            out.push(PullbackSolution {
                a,
                b,
                alpha,
                beta,
                u: vec![u1, u2],
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::twist_chern;

    const N2P2: EvalContext = EvalContext { n: 2, p: 2 };

    #[test]
    fn line_bundle_and_kernel() {
        let e = eval_expr(N2P2, &BundleExpr::line(2, -1)).unwrap();
        assert_eq!(e.rank, 1);
        assert_eq!(e.total_chern, ChowClass::one_plus(2, Divisor::new(2, -1)));
        let k = eval_expr(N2P2, &BundleExpr::E0Kernel { n: 2, q: 2, k: 1 }).unwrap();
        assert_eq!(k, chern_e0_symbolic(2, 2, 1).unwrap());
        assert!(eval_expr(N2P2, &BundleExpr::E0Kernel { n: 3, q: 2, k: 1 }).is_err());
    }

    #[test]
    fn frobenius_of_qh() {
        // 0 -> O(-2h) -> 3O -> F^*Q_h -> 0 gives c = 1/(1-2h).
        let e = eval_expr(N2P2, &BundleExpr::frobenius(1, BundleExpr::PullbackQh)).unwrap();
        assert_eq!(e.rank, 2);
        assert_eq!(
            e.total_chern,
            inv_unit(&ChowClass::one_plus(2, Divisor::new(0, -2))).unwrap()
        );
    }

    #[test]
    fn extreme_k_closed_form() {
        for (n, p, a) in [(2usize, 2u64, 1u32), (2, 2, 2), (3, 3, 1)] {
            let q = p.pow(a);
            let ctx = EvalContext { n, p };
            let kernel = eval_expr(ctx, &BundleExpr::E0Kernel { n, q, k: q }).unwrap();
            let dual_form = eval_expr(
                ctx,
                &BundleExpr::frobenius(a, BundleExpr::dual(BundleExpr::PullbackQL)),
            )
            .unwrap();
            assert_eq!(kernel, dual_form, "n={n} q={q}");
            let twisted =
                eval_expr(ctx, &BundleExpr::frobenius(a, BundleExpr::PullbackQL).twisted(-(q as i64), 0))
                    .unwrap();
            // F^*Q_L(-qL) agrees only when Q_L^* = Q_L(-L), i.e. n = 2.
            assert_eq!(kernel == twisted, n == 2, "n={n} q={q}");
        }
    }

    #[test]
    fn general_tensor_and_sum() {
        let qh = BundleExpr::PullbackQh;
        let ql = BundleExpr::PullbackQL;
        let t = eval_expr(N2P2, &BundleExpr::tensor(vec![qh.clone(), ql.clone()])).unwrap();
        assert_eq!(t.rank, 4);
        let s = eval_expr(N2P2, &BundleExpr::direct_sum(vec![qh.clone(), ql.clone()])).unwrap();
        let a = eval_expr(N2P2, &qh).unwrap();
        let b = eval_expr(N2P2, &ql).unwrap();
        assert_eq!(s.total_chern, a.total_chern.mul(&b.total_chern).unwrap());
        // Q_h ⊗ Q_L = (Q_h ⊗ 3O) / (Q_h(-L)), from the Euler sequence of P_L.
        let num = tensor_pair(&a, &BundleClassData::trivial(2, 3)).unwrap();
        let sub = a.twist(Divisor::new(-1, 0));
        let expect = num.total_chern.mul(&inv_unit(&sub.total_chern).unwrap()).unwrap();
        assert_eq!(t.total_chern, expect);
    }

    #[test]
    fn obstruction_matches_brute_force() {
        for n in 2u64..=5 {
            for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
                let e = chern_e0_symbolic(n as usize, q, 1).unwrap();
                let mut found = false;
                let lim = q as i64 + 1;
                for a in -lim..=lim {
                    for b in -lim..=lim {
                        let c = twist_chern(e.rank, &e.total_chern, Divisor::new(a, b));
                        let (l, h) = c.c1();
                        if l.is_zero() || h.is_zero() {
                            found = true;
                        }
                    }
                }
                assert_eq!(factor_pullback_obstruction(n, q), !found, "n={n} q={q}");
            }
        }
        assert!(factor_pullback_obstruction(2, 2));
        assert!(!factor_pullback_obstruction(2, 3));
        assert!(factor_pullback_obstruction(3, 2));
    }

    #[test]
    fn search_e0_is_empty() {
        let e = chern_e0_symbolic(2, 2, 1).unwrap();
        let e0 = e.twist(Divisor::new(1, 0));
        assert!(nondegeneracy_search(2, &e0.total_chern, 10).unwrap().is_empty());
    }

    #[test]
    fn search_finds_factor_pullback() {
        // p_h^* T_{P^2}: c = 1 + 3h + 3h^2.
        let t = ChowClass::from_i64(2, &[&[1, 3, 3]]);
        let sols = nondegeneracy_search(2, &t, 4).unwrap();
        assert!(sols.contains(&PullbackSolution {
            a: -1,
            b: 0,
            alpha: 1,
            beta: 0,
            u: vec![1, 1]
        }));
    }

    #[test]
    fn search_trivial_bundle() {
        let sols = nondegeneracy_search(2, &ChowClass::one(2), 2).unwrap();
        assert!(sols.iter().any(|s| s.a == 0 && s.b == 0 && s.u == vec![0, 0]));
    }

    #[test]
    fn json_tree_roundtrip() {
        let e = BundleExpr::wedge(
            1,
            BundleExpr::frobenius(2, BundleExpr::dual(BundleExpr::PullbackQL)).twisted(1, -1),
        );
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains("\"kind\":\"wedge\""));
        let back: BundleExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        let k: BundleExpr = serde_json::from_str(r#"{"kind":"e0_kernel","n":2,"q":2,"k":1}"#).unwrap();
        assert_eq!(k, BundleExpr::E0Kernel { n: 2, q: 2, k: 1 });
    }
}
