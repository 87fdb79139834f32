use super::Monad;
use crate::cohomology::{kunneth_h, map_on_sums, Bidegree, CohomBasis};
use crate::error::{Error, Result};
use crate::linalg::{SparseEchelon, SparseMap, SparseVec};
use crate::poly::BiPoly;

fn shift(d: Bidegree, tw: Bidegree) -> Bidegree {
    (d.0 + tw.0, d.1 + tw.1)
}

fn sizes(n: usize, ds: &[Bidegree], tw: Bidegree) -> Vec<usize> {
    ds.iter().map(|&d| CohomBasis::get(n, 0, shift(d, tw)).len()).collect()
}

fn require_n2(m: &Monad) -> Result<()> {
    if m.n < 2 {
        return Err(Error::InvalidParameter(
            "section computations need n >= 2 (no H^1 of line bundles)".into(),
        ));
    }
    Ok(())
}

fn mult_diag(m: &Monad, ds: &[Bidegree], g: &BiPoly, tw: Bidegree, e: Bidegree) -> Result<SparseMap> {
    let n = m.n;
    let src = sizes(n, ds, shift(tw, (-e.0, -e.1)));
    let dst = sizes(n, ds, tw);
    let mut cols = Vec::new();
    let mut off = 0;
    for (j, &d) in ds.iter().enumerate() {
        let blk = crate::cohomology::mult_matrix(
            n,
            0,
            shift(d, (tw.0 - e.0, tw.1 - e.1)),
            shift(d, tw),
            g,
            &m.field,
        )?;
        debug_assert_eq!(blk.src_dim, src[j]);
        cols.extend(
            blk.cols
                .into_iter()
                .map(|c| c.into_iter().map(|(i, v)| (i + off, v)).collect::<SparseVec>()),
        );
        off += dst[j];
    }
    Ok(SparseMap {
        src_dim: src.iter().sum(),
        dst_dim: off,
        cols,
    })
}

fn span_rank(field: &crate::field::Field, dim: usize, groups: &[&SparseMap]) -> usize {
    let mut ech = SparseEchelon::new(field, dim);
    for g in groups {
        for c in &g.cols {
            ech.insert(c);
        }
    }
    ech.rank()
}

/// `h^0` of the monad cohomology twisted by `tw`: `dim ker B - rank A` on global
/// sections of the middle term.
pub fn h0_twist(m: &Monad, tw: Bidegree) -> Result<u64> {
    require_n2(m)?;
    let mid: usize = sizes(m.n, &m.middle, tw).iter().sum();
    if mid == 0 {
        return Ok(0);
    }
    let (rb, ra) = rayon::join(
        || map_on_sums(m.n, 0, &m.middle, &m.right, &m.b, tw, &m.field).map(|s| s.rank(&m.field)),
        || map_on_sums(m.n, 0, &m.left, &m.middle, &m.a, tw, &m.field).map(|s| s.rank(&m.field)),
    );
    let (rb, ra) = (rb?, ra?);
    let h = mid as i64 - rb as i64 - ra as i64;
    if h < 0 {
        return Err(Error::ModelInconsistency(format!("negative h0 at twist {tw:?}")));
    }
    Ok(h as u64)
}

/// `h^0` of the monad cohomology restricted to the divisor `g = 0`, twisted by `tw`.
///
/// Computed as `dim ker(B mod g) - dim (im A + g·middle)` inside sections of
/// the middle term. Errors when `H^1` of the restricted left term could
/// contribute (possible only for `n = 2`).
pub fn h0_mod(m: &Monad, tw: Bidegree, g: &BiPoly) -> Result<u64> {
    require_n2(m)?;
    let e = g
        .bidegree()
        .ok_or_else(|| Error::InvalidParameter("divisor equation must be nonzero and bihomogeneous".into()))?;
    if m.n == 2 {
        h1_left_vanishes_in_middle(m, tw, g, e)?;
    }
    let f = &m.field;
    let mid: usize = sizes(m.n, &m.middle, tw).iter().sum();
    let right: usize = sizes(m.n, &m.right, tw).iter().sum();
    let bmap = map_on_sums(m.n, 0, &m.middle, &m.right, &m.b, tw, f)?;
    let amap = map_on_sums(m.n, 0, &m.left, &m.middle, &m.a, tw, f)?;
    let gr = mult_diag(m, &m.right, g, tw, e)?;
    let gm = mult_diag(m, &m.middle, g, tw, e)?;
    let r1 = span_rank(f, right, &[&bmap, &gr]);
    let r2 = span_rank(f, right, &[&gr]);
    let dim_p = mid - (r1 - r2);
    let im = span_rank(f, mid, &[&amap, &gm]);
    if im > dim_p {
        return Err(Error::ModelInconsistency(format!("image exceeds kernel at twist {tw:?}")));
    }
    Ok((dim_p - im) as u64)
}

/// For `n = 2`, `H^1` of the left term restricted to `g = 0` is
/// `ker(g: H^2(L(-e)) -> H^2(L))`. The section count in `h0_mod` is exact when
/// `A` maps this space injectively into `H^1` of the restricted middle term.
fn h1_left_vanishes_in_middle(m: &Monad, tw: Bidegree, g: &BiPoly, e: Bidegree) -> Result<()> {
    let n = m.n;
    let low = shift(tw, (-e.0, -e.1));
    if m.left.iter().all(|&l| kunneth_h(n, shift(l, low)).get(n) == 0) {
        return Ok(());
    }
    let f = &m.field;
    let k = m.left.len();
    let diag: Vec<Vec<BiPoly>> = (0..k)
        .map(|r| (0..k).map(|c| if r == c { g.clone() } else { BiPoly::zero(n) }).collect())
        .collect();
    let shifted: Vec<Bidegree> = m.left.iter().map(|&l| shift(l, e)).collect();
    let gmap = map_on_sums(n, n, &m.left, &shifted, &diag, low, f)?;
    let ker = gmap.kernel(f);
    let amap = map_on_sums(n, n, &m.left, &m.middle, &m.a, low, f)?;
    let mut ech = SparseEchelon::new(f, amap.dst_dim.max(1));
    let injective = ker.iter().all(|v| ech.insert(&amap.apply(v, f)));
    if injective {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "h^0 on the divisor is not determined by sections of the middle term at twist {tw:?}"
        )))
    }
}

/// Generators of `ker B` (or of `ker(B mod g)` when `g` is given) on sections
/// of the middle term twisted by `tw`, as vectors of polynomials. Their
/// classes span `H^0` of the monad cohomology (restricted to `g = 0`).
pub fn section_basis(m: &Monad, tw: Bidegree, g: Option<&BiPoly>) -> Result<Vec<Vec<BiPoly>>> {
    let f = &m.field;
    let n = m.n;
    let bmap = map_on_sums(n, 0, &m.middle, &m.right, &m.b, tw, f)?;
    let mid_sizes = sizes(n, &m.middle, tw);
    let mid: usize = mid_sizes.iter().sum();
    let full = match g {
        None => bmap,
        Some(g) => {
            let e = g
                .bidegree()
                .ok_or_else(|| Error::InvalidParameter("divisor equation must be bihomogeneous".into()))?;
            let gr = mult_diag(m, &m.right, g, tw, e)?;
            let mut cols = bmap.cols;
            cols.extend(gr.cols);
            SparseMap {
                src_dim: mid + gr.src_dim,
                dst_dim: bmap.dst_dim,
                cols,
            }
        }
    };
    let ker = full.kernel(f);
    let bases: Vec<_> = m.middle.iter().map(|&d| CohomBasis::get(n, 0, shift(d, tw))).collect();
    let mut out = Vec::new();
    let mut ech = SparseEchelon::new(f, mid.max(1));
    for v in ker {
        let proj: SparseVec = v.into_iter().filter(|&(i, _)| i < mid).collect();
        if proj.is_empty() || !ech.insert(&proj) {
            continue;
        }
        let mut polys = vec![BiPoly::zero(n); m.middle.len()];
        for (i, c) in proj {
            let mut j = 0;
            let mut idx = i;
            while idx >= mid_sizes[j] {
                idx -= mid_sizes[j];
                j += 1;
            }
            let mono = BiPoly::monomial(n, bases[j].labels[idx].clone(), c);
            polys[j] = polys[j].add(&mono, f);
        }
        out.push(polys);
    }
    Ok(out)
}
