use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::Bidegree;
use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::{normalize_sparse, SparseMap};
use crate::poly::{monomials, BiPoly, Mono};

/// Monomial basis of `H^i(O(a,b))` on `P^n x P^n`.
///
/// `H^0` of a factor is spanned by monomials of degree `d`; `H^n` by Laurent
/// monomials with every exponent `<= -1` and degree `d`, the Čech classes
/// dual to the monomials of degree `-d-n-1`. A label is the concatenated
/// exponent vector `[x | y]`. Pieces are ordered by the cohomological degree
/// of the `x` factor; within a piece the index is `ix * |Y| + iy`.
#[derive(Debug)]
pub struct CohomBasis {
    pub n: usize,
    pub i: usize,
    pub twist: Bidegree,
    pub labels: Vec<Mono>,
    index: HashMap<Mono, usize>,
}

fn factor_labels(n: usize, j: usize, d: i64) -> Vec<Vec<i32>> {
    let nv = n + 1;
    if j == 0 {
        return monomials(nv, d).to_vec();
    }
    debug_assert_eq!(j, n);
    monomials(nv, -d - nv as i64)
        .iter()
        .map(|e| e.iter().map(|&v| -1 - v).collect())
        .collect()
}

impl CohomBasis {
    pub fn get(n: usize, i: usize, twist: Bidegree) -> Arc<CohomBasis> {
        type Cache = Mutex<HashMap<(usize, usize, i64, i64), Arc<CohomBasis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (n, i, twist.0, twist.1);
        if let Some(b) = cache.lock().unwrap().get(&key) {
            return b.clone();
        }
        let b = Arc::new(Self::build(n, i, twist));
        cache.lock().unwrap().insert(key, b.clone());
        b
    }

    fn build(n: usize, i: usize, twist: Bidegree) -> Self {
        let mut labels = Vec::new();
        for j in [0, n] {
            if i < j || !(i - j == 0 || i - j == n) {
                continue;
            }
            let k = i - j;
            let xs = factor_labels(n, j, twist.0);
            let ys = factor_labels(n, k, twist.1);
            for x in &xs {
                for y in &ys {
                    let mut m = x.clone();
                    m.extend_from_slice(y);
                    labels.push(m);
                }
            }
            if n == 0 {
                break;
            }
        }
        let index = labels.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        Self {
            n,
            i,
            twist,
            labels,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, m: &[i32]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// Matrix of multiplication by `f` from `H^i(O(src))` to `H^i(O(dst))`.
///
/// On `H^0` factors this is polynomial multiplication; on `H^n` factors it
/// adds exponents and drops any label that leaves the all-negative range,
/// which is contraction on the dual monomials.
pub fn mult_matrix(
    n: usize,
    i: usize,
    src: Bidegree,
    dst: Bidegree,
    f: &BiPoly,
    field: &Field,
) -> Result<SparseMap> {
    let sb = CohomBasis::get(n, i, src);
    let db = CohomBasis::get(n, i, dst);
    if f.is_zero() {
        return Ok(SparseMap::zero(sb.len(), db.len()));
    }
    let expected = (dst.0 - src.0, dst.1 - src.1);
    match f.bidegree() {
        Some(d) if d == expected => {}
        Some(d) => {
            return Err(Error::DegreeMismatch { expected, found: d });
        }
        None => {
            return Err(Error::InvalidParameter("polynomial is not bihomogeneous".into()));
        }
    }
    if f.n != n {
        return Err(Error::DimensionMismatch(f.n, n));
    }
    let mut cols = Vec::with_capacity(sb.len());
    let mut buf: Mono = vec![0; 2 * (n + 1)];
    for m in &sb.labels {
        let mut col: Vec<(usize, Fe)> = Vec::new();
        for (u, &c) in &f.terms {
            for (k, slot) in buf.iter_mut().enumerate() {
                *slot = m[k] + u[k];
            }
            if let Some(r) = db.index_of(&buf) {
                col.push((r, c));
            }
        }
        cols.push(normalize_sparse(col, field));
    }
    Ok(SparseMap {
        src_dim: sb.len(),
        dst_dim: db.len(),
        cols,
    })
}

/// Induced map on `H^i` between sums of line bundles, all twisted by `tw`.
/// `entries[r][c]` maps summand `c` of the source to summand `r` of the target.
pub fn map_on_sums(
    n: usize,
    i: usize,
    src: &[Bidegree],
    dst: &[Bidegree],
    entries: &[Vec<BiPoly>],
    tw: Bidegree,
    field: &Field,
) -> Result<SparseMap> {
    let shift = |d: &Bidegree| (d.0 + tw.0, d.1 + tw.1);
    let src_sizes: Vec<usize> = src.iter().map(|d| CohomBasis::get(n, i, shift(d)).len()).collect();
    let dst_sizes: Vec<usize> = dst.iter().map(|d| CohomBasis::get(n, i, shift(d)).len()).collect();
    let dst_off: Vec<usize> = dst_sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let total_src: usize = src_sizes.iter().sum();
    let total_dst: usize = dst_sizes.iter().sum();
    let mut cols: Vec<Vec<(usize, Fe)>> = Vec::with_capacity(total_src);
    for (c, sd) in src.iter().enumerate() {
        let blocks: Vec<SparseMap> = dst
            .iter()
            .enumerate()
            .map(|(r, dd)| mult_matrix(n, i, shift(sd), shift(dd), &entries[r][c], field))
            .collect::<Result<_>>()?;
        for k in 0..src_sizes[c] {
            let mut col = Vec::new();
            for (r, b) in blocks.iter().enumerate() {
                col.extend(b.cols[k].iter().map(|&(row, v)| (row + dst_off[r], v)));
            }
            cols.push(col);
        }
    }
    Ok(SparseMap {
        src_dim: total_src,
        dst_dim: total_dst,
        cols,
    })
}
