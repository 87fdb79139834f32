use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kunneth_sum, les_chase, map_on_sums, Bidegree, CohomEntry, CohomTable, Interval, SesInput};
use crate::error::{Error, Result};
use crate::model::{h0_twist, Monad};

/// All `h^i` of the monad cohomology at one twist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadCohomology {
    pub twist: Bidegree,
    pub h: Vec<Interval>,
    /// `h^i` of `ker B`, always exact.
    pub kernel: Vec<u64>,
    pub chi: i64,
}

impl MonadCohomology {
    pub fn is_exact(&self) -> bool {
        self.h.iter().all(Interval::is_exact)
    }

    /// Exact values, if every degree is determined.
    pub fn exact(&self) -> Option<Vec<u64>> {
        self.h.iter().map(Interval::value).collect()
    }

    /// True when every `h^i`, `i > 0`, is exactly zero.
    pub fn higher_vanish(&self) -> bool {
        self.h[1..].iter().all(|iv| iv.value() == Some(0))
    }
}

fn strata(n: usize) -> Vec<usize> {
    let mut v = vec![0, n, 2 * n];
    v.dedup();
    v
}

fn ranks_on(m: &Monad, tw: Bidegree, which: char) -> Result<Vec<Option<u64>>> {
    let n = m.n;
    let mut out = vec![Some(0); 2 * n + 1];
    for i in strata(n) {
        let map = match which {
            'a' => map_on_sums(n, i, &m.left, &m.middle, &m.a, tw, &m.field)?,
            _ => map_on_sums(n, i, &m.middle, &m.right, &m.b, tw, &m.field)?,
        };
        out[i] = Some(map.rank(&m.field) as u64);
    }
    Ok(out)
}

fn exact_vec(v: &[u64]) -> Vec<Interval> {
    v.iter().map(|&d| Interval::exact(d)).collect()
}

/// Cohomology of the monad cohomology `E` twisted by `tw`, from the two short
/// exact sequences `0 -> K -> M -> R -> 0` and `0 -> L -> K -> E -> 0` with
/// map ranks taken from explicit multiplication matrices. For `n >= 2`
/// `h^0` and `h^{2n}` are also computed directly (the latter from the dual
/// monad) and must agree with the chase.
pub fn monad_cohomology(m: &Monad, tw: Bidegree) -> Result<MonadCohomology> {
    let n = m.n;
    let top = 2 * n;
    let l = kunneth_sum(n, &m.left, tw);
    let mid = kunneth_sum(n, &m.middle, tw);
    let r = kunneth_sum(n, &m.right, tw);
    let b = ranks_on(m, tw, 'b')?;
    let a = ranks_on(m, tw, 'a')?;

    let mut s1 = SesInput::new(vec![Interval::unknown(); top + 1], exact_vec(&mid.dims), exact_vec(&r.dims));
    s1.beta = b.clone();
    let o1 = les_chase(&s1)?;
    let kernel: Vec<u64> = o1
        .a
        .iter()
        .map(|iv| iv.value().ok_or_else(|| Error::ModelInconsistency("kernel dimension not forced".into())))
        .collect::<Result<_>>()?;

    // rank(H^i(L) -> H^i(K)) equals rank of A on H^i(M) when H^i(K) injects.
    let mut s2 = SesInput::new(exact_vec(&l.dims), exact_vec(&kernel), vec![Interval::unknown(); top + 1]);
    for i in 0..=top {
        let injects = i == 0 || o1.delta[i - 1].value() == Some(0);
        s2.alpha[i] = if injects { a[i] } else { None };
    }
    let mut o2 = les_chase(&s2)?;

    if n >= 2 {
        let h0 = h0_twist(m, tw)?;
        let serre = (-tw.0 - n as i64 - 1, -tw.1 - n as i64 - 1);
        let h2n = h0_twist(&m.dual(), serre)?;
        for (i, v) in [(0, h0), (top, h2n)] {
            if !o2.c[i].contains(v) {
                return Err(Error::ModelInconsistency(format!(
                    "h^{i} at {tw:?}: direct value {v} outside chased range {}",
                    o2.c[i]
                )));
            }
        }
        if !(o2.c[0].is_exact() && o2.c[top].is_exact()) {
            let mut c = o2.c.clone();
            c[0] = Interval::exact(h0);
            c[top] = Interval::exact(h2n);
            s2.c = c;
            o2 = les_chase(&s2)?;
        }
    }

    let chi = mid.euler_characteristic() - l.euler_characteristic() - r.euler_characteristic();
    let out = MonadCohomology {
        twist: tw,
        h: o2.c,
        kernel,
        chi,
    };
    if let Some(v) = out.exact() {
        let alt: i64 = v
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum();
        if alt != chi {
            return Err(Error::ModelInconsistency(format!(
                "alternating sum {alt} differs from chi {chi} at {tw:?}"
            )));
        }
    }
    Ok(out)
}

/// `monad_cohomology` over a list of twists, computed in parallel.
pub fn monad_cohom_table(m: &Monad, twists: &[Bidegree]) -> Result<CohomTable> {
    let cols: Vec<MonadCohomology> = twists
        .par_iter()
        .map(|&tw| monad_cohomology(m, tw))
        .collect::<Result<_>>()?;
    let mut t = CohomTable::default();
    for c in cols {
        for (i, &iv) in c.h.iter().enumerate() {
            t.insert(CohomEntry::from_interval(i, c.twist, iv));
        }
    }
    Ok(t)
}
