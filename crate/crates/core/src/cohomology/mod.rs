//! Line-bundle cohomology on `P^n` and `P^n x P^n`, explicit multiplication
//! maps between cohomology spaces, and dimension chasing along exact sequences.

mod basis;
mod chase;
mod table;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::chow::{binom_big, Divisor};
use crate::poly::binom_u;

pub use basis::{map_on_sums, mult_matrix, CohomBasis};
pub use chase::{les_chase, ChainSolution, Interval, SesInput, SesOutput};
pub use table::{monad_cohom_table, monad_cohomology, MonadCohomology};

/// A bidegree `(s, t)`: `s` is the `L` (x) degree, `t` the `h` (y) degree.
pub type Bidegree = (i64, i64);

/// Cohomology dimensions `h^0, h^1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CohomVector {
    pub dims: Vec<u64>,
}

impl CohomVector {
    pub fn zero(len: usize) -> Self {
        Self { dims: vec![0; len] }
    }

    pub fn get(&self, i: usize) -> u64 {
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.dims.len().max(other.dims.len());
        Self {
            dims: (0..len).map(|i| self.get(i) + other.get(i)).collect(),
        }
    }

    /// `Σ (-1)^i h^i`.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Cohomology of `O(d)` on `P^n`.
pub fn bott_h(n: usize, d: i64) -> CohomVector {
    let mut v = CohomVector::zero(n + 1);
    let n_i = n as i64;
    if d >= 0 {
        v.dims[0] = binom_u(n_i + d, n_i);
    } else if d <= -n_i - 1 {
        v.dims[n] = binom_u(-d - 1, n_i);
    }
    v
}

/// Cohomology of `O(a, b)` on `P^n x P^n`.
pub fn kunneth_h(n: usize, d: Bidegree) -> CohomVector {
    let x = bott_h(n, d.0);
    let y = bott_h(n, d.1);
    let mut v = CohomVector::zero(2 * n + 1);
    for (j, &dx) in x.dims.iter().enumerate() {
        for (k, &dy) in y.dims.iter().enumerate() {
            v.dims[j + k] += dx * dy;
        }
    }
    v
}

/// Cohomology of a direct sum of line bundles twisted by `tw`.
pub fn kunneth_sum(n: usize, summands: &[Bidegree], tw: Bidegree) -> CohomVector {
    summands
        .iter()
        .fold(CohomVector::zero(2 * n + 1), |acc, &(a, b)| {
            acc.add(&kunneth_h(n, (a + tw.0, b + tw.1)))
        })
}

/// `χ(O(a, b)) = C(n+a, n) C(n+b, n)` with polynomial binomials.
pub fn chi_line_bundle(n: usize, d: Bidegree) -> BigInt {
    binom_big(n as i64 + d.0, n as i64) * binom_big(n as i64 + d.1, n as i64)
}

/// `χ(E_0[n,q,k](-L)(s,t))` from the monad
/// `O(-qh) -> (n+1)O ⊕ O((q-k)L - kh) -> O(qL)`.
pub fn monad_chi(n: usize, q: i64, k: i64, tw: Bidegree) -> BigInt {
    let (s, t) = tw;
    let middle = chi_line_bundle(n, (s, t)) * BigInt::from(n as i64 + 1)
        + chi_line_bundle(n, (s + q - k, t - k));
    middle - chi_line_bundle(n, (s, t - q)) - chi_line_bundle(n, (s + q, t))
}

/// Monad twists as divisors, for callers that work in the Chow ring.
pub fn as_divisor(d: Bidegree) -> Divisor {
    Divisor::new(d.0, d.1)
}

/// One table cell: an exact dimension or an interval of feasible values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomEntry {
    pub i: usize,
    pub s: i64,
    pub t: i64,
    pub dim: Option<u64>,
    pub lo: u64,
    pub hi: u64,
    pub exact: bool,
}

impl CohomEntry {
    pub fn from_interval(i: usize, tw: Bidegree, iv: Interval) -> Self {
        let exact = iv.lo == iv.hi;
        Self {
            i,
            s: tw.0,
            t: tw.1,
            dim: exact.then_some(iv.lo),
            lo: iv.lo,
            hi: iv.hi,
            exact,
        }
    }
}

/// Map `(i, (s,t)) -> dimension or interval`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CohomTable {
    pub entries: BTreeMap<(usize, i64, i64), CohomEntry>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    entries: Vec<CohomEntry>,
}

impl CohomTable {
    pub fn insert(&mut self, e: CohomEntry) {
        self.entries.insert((e.i, e.s, e.t), e);
    }

    pub fn get(&self, i: usize, tw: Bidegree) -> Option<&CohomEntry> {
        self.entries.get(&(i, tw.0, tw.1))
    }

    /// Exact value, if present and determined.
    pub fn exact(&self, i: usize, tw: Bidegree) -> Option<u64> {
        self.get(i, tw).and_then(|e| e.dim)
    }

    pub fn merge(&mut self, other: CohomTable) {
        self.entries.extend(other.entries);
    }

    pub fn twists(&self) -> Vec<Bidegree> {
        let mut v: Vec<Bidegree> = self.entries.keys().map(|&(_, s, t)| (s, t)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// True when every entry at this twist is exact.
    pub fn column_exact(&self, tw: Bidegree) -> bool {
        self.entries
            .values()
            .filter(|e| (e.s, e.t) == tw)
            .all(|e| e.exact)
    }

    /// `Σ (-1)^i h^i` over a fully exact column.
    pub fn column_chi(&self, tw: Bidegree) -> Option<i64> {
        let mut chi = 0i64;
        let mut any = false;
        for e in self.entries.values().filter(|e| (e.s, e.t) == tw) {
            let d = e.dim? as i64;
            chi += if e.i % 2 == 0 { d } else { -d };
            any = true;
        }
        any.then_some(chi)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TableJson {
            entries: self.entries.values().copied().collect(),
        })
        .expect("table serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> serde_json::Result<Self> {
        let raw: TableJson = serde_json::from_value(v.clone())?;
        let mut t = CohomTable::default();
        for e in raw.entries {
            t.insert(e);
        }
        Ok(t)
    }

    /// CSV with header `i,s,t,dim,lo,hi,exact`; inexact rows leave `dim` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,s,t,dim,lo,hi,exact\n");
        for e in self.entries.values() {
            let dim = e.dim.map(|d| d.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e.i, e.s, e.t, dim, e.lo, e.hi, e.exact
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::{chern_e0_symbolic, euler_char_hrr, twist_chern};

    #[test]
    fn bott_examples() {
        assert_eq!(bott_h(2, 2).dims, vec![6, 0, 0]);
        assert_eq!(bott_h(2, -3).dims, vec![0, 0, 1]);
        assert_eq!(bott_h(3, -2).dims, vec![0, 0, 0, 0]);
    }

    #[test]
    fn kunneth_examples() {
        assert_eq!(kunneth_h(2, (-3, 0)).dims, vec![0, 0, 1, 0, 0]);
        assert_eq!(kunneth_h(2, (-4, 1)).dims, vec![0, 0, 9, 0, 0]);
        assert_eq!(kunneth_h(2, (0, 0)).dims, vec![1, 0, 0, 0, 0]);
        assert_eq!(kunneth_h(2, (-3, -3)).dims, vec![0, 0, 0, 0, 1]);
    }

    #[test]
    fn kunneth_alternating_sum_is_polynomial_chi() {
        for n in 1..=4usize {
            for a in -8..=8 {
                for b in -8..=8 {
                    let v = kunneth_h(n, (a, b));
                    assert_eq!(BigInt::from(v.euler_characteristic()), chi_line_bundle(n, (a, b)));
                }
            }
        }
    }

    #[test]
    fn monad_chi_values() {
        assert_eq!(monad_chi(2, 2, 1, (0, 0)), BigInt::from(-3));
        assert_eq!(monad_chi(2, 2, 1, (1, 0)), BigInt::from(-1));
    }

    #[test]
    fn monad_chi_matches_hrr() {
        for (n, q, k) in [(2usize, 2i64, 1i64), (2, 4, 2), (3, 2, 1), (3, 3, 3)] {
            let e = chern_e0_symbolic(n, q as u64, k as u64).unwrap();
            for s in -4..=4 {
                for t in -4..=4 {
                    let c = twist_chern(n, &e.total_chern, Divisor::new(s, t));
                    assert_eq!(euler_char_hrr(n, &c).unwrap(), monad_chi(n, q, k, (s, t)));
                }
            }
        }
    }

    #[test]
    fn table_serialization() {
        let mut t = CohomTable::default();
        t.insert(CohomEntry::from_interval(0, (1, 0), Interval::exact(0)));
        t.insert(CohomEntry::from_interval(1, (1, 0), Interval::new(0, 2)));
        let j = t.to_json();
        assert_eq!(j["entries"][0]["dim"], serde_json::json!(0));
        assert_eq!(j["entries"][1]["dim"], serde_json::Value::Null);
        assert_eq!(CohomTable::from_json(&j).unwrap(), t);
        let csv = t.to_csv();
        assert!(csv.starts_with("i,s,t,dim,lo,hi,exact\n0,1,0,0,0,0,true\n1,1,0,,0,2,false"));
        assert_eq!(t.column_chi((1, 0)), None);
    }
}
