use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval of non-negative integers; `hi == u64::MAX` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self { lo, hi }
    }

    pub fn exact(v: u64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn unknown() -> Self {
        Self { lo: 0, hi: u64::MAX }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> Option<u64> {
        self.is_exact().then_some(self.lo)
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn add(self, o: Self) -> Self {
        Self::new(self.lo.saturating_add(o.lo), self.hi.saturating_add(o.hi))
    }

    /// `{x - y : x in self, y in o, x - y >= 0}` (lower bound clamped at 0).
    fn sub(self, o: Self) -> Self {
        let hi = if self.hi == u64::MAX {
            u64::MAX
        } else {
            self.hi.saturating_sub(o.lo)
        };
        let lo = if o.hi == u64::MAX { 0 } else { self.lo.saturating_sub(o.hi) };
        Self::new(lo, hi)
    }

    fn meet(self, o: Self) -> Option<Self> {
        let r = Self::new(self.lo.max(o.lo), self.hi.min(o.hi));
        (r.lo <= r.hi).then_some(r)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.is_exact(), self.hi == u64::MAX) {
            (true, _) => write!(f, "{}", self.lo),
            (false, true) => write!(f, "[{}, inf)", self.lo),
            (false, false) => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}

/// Dimensions and map ranks along an exact chain `V_0 -> V_1 -> ... -> V_{m-1}`.
/// `ranks[j]` is the rank of `V_j -> V_{j+1}`; the chain starts and ends in 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSolution {
    pub dims: Vec<Interval>,
    pub ranks: Vec<Interval>,
}

impl ChainSolution {
    /// Propagate `dim V_j = rank_{j-1} + rank_j` to a fixpoint.
    pub fn solve(dims: Vec<Interval>, ranks: Vec<Interval>) -> Result<Self> {
        let m = dims.len();
        if m == 0 {
            return Ok(Self { dims, ranks });
        }
        if ranks.len() + 1 != m {
            return Err(Error::DimensionMismatch(ranks.len() + 1, m));
        }
        let mut s = Self { dims, ranks };
        let infeasible = |what: &str, j: usize| Error::Infeasible(format!("{what} {j} has no feasible value"));
        loop {
            let before = (s.dims.clone(), s.ranks.clone());
            for j in 0..m {
                let left = if j == 0 { Interval::exact(0) } else { s.ranks[j - 1] };
                let right = if j + 1 == m { Interval::exact(0) } else { s.ranks[j] };
                s.dims[j] = s.dims[j].meet(left.add(right)).ok_or_else(|| infeasible("object", j))?;
                if j > 0 {
                    s.ranks[j - 1] = s.ranks[j - 1]
                        .meet(s.dims[j].sub(right))
                        .ok_or_else(|| infeasible("map", j - 1))?;
                }
                if j + 1 < m {
                    s.ranks[j] = s.ranks[j]
                        .meet(s.dims[j].sub(left))
                        .ok_or_else(|| infeasible("map", j))?;
                }
            }
            if (s.dims.clone(), s.ranks.clone()) == before {
                return Ok(s);
            }
        }
    }
}

/// Long exact sequence of `0 -> A -> B -> C -> 0` in degrees `0..=top`.
/// Missing rank constraints are left unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SesInput {
    pub a: Vec<Interval>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
    /// Rank of `H^i(A) -> H^i(B)`.
    pub alpha: Vec<Option<u64>>,
    /// Rank of `H^i(B) -> H^i(C)`.
    pub beta: Vec<Option<u64>>,
    /// Rank of `H^i(C) -> H^{i+1}(A)`.
    pub delta: Vec<Option<u64>>,
}

impl SesInput {
    pub fn new(a: Vec<Interval>, b: Vec<Interval>, c: Vec<Interval>) -> Self {
        let len = a.len().max(b.len()).max(c.len());
        Self {
            a,
            b,
            c,
            alpha: vec![None; len],
            beta: vec![None; len],
            delta: vec![None; len],
        }
    }

    /// All three columns given as exact dimensions except the unknowns, passed as `None`.
    pub fn from_options(a: &[Option<u64>], b: &[Option<u64>], c: &[Option<u64>]) -> Self {
        let conv = |v: &[Option<u64>]| v.iter().map(|x| x.map_or(Interval::unknown(), Interval::exact)).collect();
        Self::new(conv(a), conv(b), conv(c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SesOutput {
    pub a: Vec<Interval>,
    pub b: Vec<Interval>,
    pub c: Vec<Interval>,
    pub alpha: Vec<Interval>,
    pub beta: Vec<Interval>,
    pub delta: Vec<Interval>,
}

/// Bound every unknown in the long exact sequence by interval propagation.
pub fn les_chase(input: &SesInput) -> Result<SesOutput> {
    let len = input.a.len().max(input.b.len()).max(input.c.len());
    let at = |v: &Vec<Interval>, i: usize| v.get(i).copied().unwrap_or(Interval::exact(0));
    let rank_at = |v: &Vec<Option<u64>>, i: usize| {
        v.get(i)
            .copied()
            .flatten()
            .map_or(Interval::unknown(), Interval::exact)
    };
    let mut dims = Vec::with_capacity(3 * len);
    let mut ranks = Vec::with_capacity(3 * len);
    for i in 0..len {
        dims.extend([at(&input.a, i), at(&input.b, i), at(&input.c, i)]);
        ranks.extend([rank_at(&input.alpha, i), rank_at(&input.beta, i)]);
        if i + 1 < len {
            ranks.push(rank_at(&input.delta, i));
        }
    }
    let sol = ChainSolution::solve(dims, ranks)?;
    let mut out = SesOutput {
        a: Vec::new(),
        b: Vec::new(),
        c: Vec::new(),
        alpha: Vec::new(),
        beta: Vec::new(),
        delta: Vec::new(),
    };
    for i in 0..len {
        out.a.push(sol.dims[3 * i]);
        out.b.push(sol.dims[3 * i + 1]);
        out.c.push(sol.dims[3 * i + 2]);
        out.alpha.push(sol.ranks[3 * i]);
        out.beta.push(sol.ranks[3 * i + 1]);
        out.delta
            .push(sol.ranks.get(3 * i + 2).copied().unwrap_or(Interval::exact(0)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::bott_h;
    use crate::poly::monomials;

    fn ex(v: &[u64]) -> Vec<Interval> {
        v.iter().map(|&x| Interval::exact(x)).collect()
    }

    #[test]
    fn euler_sequence_on_p2() {
        // 0 -> O(-1) -> 3 O -> T(-1) -> 0
        let a = bott_h(2, -1).dims;
        let b: Vec<u64> = bott_h(2, 0).dims.iter().map(|d| 3 * d).collect();
        let inp = SesInput::new(ex(&a), ex(&b), vec![Interval::unknown(); 3]);
        let out = les_chase(&inp).unwrap();
        assert_eq!(out.c, ex(&[3, 0, 0]));
    }

    #[test]
    fn underdetermined_stays_an_interval() {
        // 0 -> A -> B -> C -> 0 with only h^0(B) = 2 and h^1(A) = 1 known.
        let inp = SesInput::new(
            ex(&[0, 1]),
            vec![Interval::exact(2), Interval::unknown()],
            vec![Interval::unknown(); 2],
        );
        let out = les_chase(&inp).unwrap();
        assert_eq!(out.c[0], Interval::new(2, 3));
        assert!(!out.b[1].is_exact());
    }

    #[test]
    fn pinned_rank_tightens() {
        let mut inp = SesInput::new(
            ex(&[0, 1]),
            vec![Interval::exact(2), Interval::unknown()],
            vec![Interval::unknown(); 2],
        );
        inp.delta[0] = Some(1);
        let out = les_chase(&inp).unwrap();
        assert_eq!(out.c[0], Interval::exact(3));
        assert_eq!(out.alpha[1], Interval::exact(0));
    }

    #[test]
    fn inconsistent_data_is_infeasible() {
        // O -> O -> 0 cannot have h^0 dimensions 1, 3, 0.
        let inp = SesInput::new(ex(&[1]), ex(&[3]), ex(&[0]));
        assert!(matches!(les_chase(&inp), Err(Error::Infeasible(_))));
    }

    #[test]
    fn chain_endpoints_are_zero() {
        let s = ChainSolution::solve(ex(&[2, 5, 3]), vec![Interval::unknown(); 2]).unwrap();
        assert_eq!(s.ranks, ex(&[2, 3]));
    }

    /// `0 -> K -> (n+1)O(q) -> O(2q) -> 0` on `P^n`, the map given by `x_i^q`.
    /// `h^1(K)` is the number of degree-`2q` monomials with all exponents `< q`.
    #[test]
    fn frobenius_kernel_h1() {
        for (n, q, expect) in [(2usize, 2i64, 0u64), (2, 3, 1), (3, 2, 1)] {
            let b0 = (n as u64 + 1) * bott_h(n, q).dims[0];
            let c0 = bott_h(n, 2 * q).dims[0];
            let coker = monomials(n + 1, 2 * q)
                .iter()
                .filter(|m| m.iter().all(|&e| (e as i64) < q))
                .count() as u64;
            let mut a = vec![Interval::unknown(); n + 1];
            let mut b = vec![Interval::exact(0); n + 1];
            let mut c = vec![Interval::exact(0); n + 1];
            a[0] = Interval::unknown();
            b[0] = Interval::exact(b0);
            c[0] = Interval::exact(c0);
            let mut inp = SesInput::new(a, b, c);
            inp.beta[0] = Some(c0 - coker);
            let out = les_chase(&inp).unwrap();
            assert_eq!(out.a[1], Interval::exact(expect), "n={n} q={q}");
            assert_eq!(coker, expect);
        }
    }
}
