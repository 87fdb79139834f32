use crate::chow::{chow_mul, inv_unit, BundleClassData, ChowClass, Divisor};
use crate::cohomology::Bidegree;
use crate::error::{Error, Result};
use crate::field::{log_p, Field};
use crate::poly::BiPoly;

/// A map `⊕O(src) -> ⊕O(dst)` given by bihomogeneous entries `entries[r][c]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    pub n: usize,
    pub src: Vec<Bidegree>,
    pub dst: Vec<Bidegree>,
    pub entries: Vec<Vec<BiPoly>>,
}

impl PolyMatrix {
    /// The Euler column `O(-1) -> (n+1)O` on the `y` factor (`on_y`) or the `x` factor.
    pub fn euler_column(n: usize, on_y: bool) -> Self {
        let (src, var): (Bidegree, fn(usize, usize) -> BiPoly) =
            if on_y { ((0, -1), BiPoly::y) } else { ((-1, 0), BiPoly::x) };
        Self {
            n,
            src: vec![src],
            dst: vec![(0, 0); n + 1],
            entries: (0..=n).map(|j| vec![var(n, j)]).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PolyMatrix, f: &Field) -> Result<PolyMatrix> {
        if other.dst != self.src {
            return Err(Error::InvalidParameter("composable matrices need matching summands".into()));
        }
        let entries = self
            .entries
            .iter()
            .map(|row| {
                (0..other.src.len())
                    .map(|c| {
                        row.iter()
                            .zip(&other.entries)
                            .fold(BiPoly::zero(self.n), |acc, (a, orow)| acc.add(&a.mul(&orow[c], f), f))
                    })
                    .collect()
            })
            .collect();
        Ok(PolyMatrix {
            n: self.n,
            src: other.src.clone(),
            dst: self.dst.clone(),
            entries,
        })
    }
}

/// Frobenius pullback of a presentation: every entry raised to the `q`-th
/// power and every twist multiplied by `q`.
pub fn frobenius_presentation(m: &PolyMatrix, q: u64, f: &Field) -> Result<PolyMatrix> {
    let p = f.characteristic() as u64;
    if log_p(q, p).is_none() {
        return Err(Error::NotCharacteristicPower { q, p });
    }
    let qi = q as i64;
    let sc = |v: &[Bidegree]| v.iter().map(|&(s, t)| (qi * s, qi * t)).collect();
    Ok(PolyMatrix {
        n: m.n,
        src: sc(&m.src),
        dst: sc(&m.dst),
        entries: m.entries.iter().map(|r| r.iter().map(|e| e.pow(q, f)).collect()).collect(),
    })
}

/// Chern data of the cokernel of an injective map of sums of line bundles
/// with locally free cokernel: `c = Π(1+dst) / Π(1+src)`.
pub fn cokernel_chern(m: &PolyMatrix) -> Result<BundleClassData> {
    let n = m.n;
    if m.dst.len() < m.src.len() {
        return Err(Error::InvalidParameter("cokernel would have negative rank".into()));
    }
    let prod = |v: &[Bidegree]| -> Result<ChowClass> {
        v.iter().try_fold(ChowClass::one(n), |acc, &(s, t)| {
            chow_mul(&acc, &ChowClass::one_plus(n, Divisor::new(s, t)))
        })
    };
    let c = chow_mul(&prod(&m.dst)?, &inv_unit(&prod(&m.src)?)?)?;
    BundleClassData::new(m.dst.len() - m.src.len(), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chow::frobenius_pull_chern;
    use crate::model::{build_monad, default_field, BilinearFormA};
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn euler_column_pulls_back_to_monad_block() {
        let fld = default_field(2).unwrap();
        let e = PolyMatrix::euler_column(2, true);
        let fe = frobenius_presentation(&e, 4, &fld).unwrap();
        let m = build_monad(&fld, 2, 4, 1, &BilinearFormA::identity(2)).unwrap();
        for j in 0..=2 {
            assert_eq!(fe.entries[j][0], m.monad.a[j][0]);
        }
        assert_eq!(fe.src, vec![(0, -4)]);
    }

    #[test]
    fn shortcut_agrees_with_power() {
        let fld = default_field(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let form = BilinearFormA::random(2, &fld, &mut rng);
        let f = form.poly(&fld);
        assert_eq!(f.pow(9, &fld), f.frobenius_shortcut(9, &fld));
    }

    #[test]
    fn pullback_is_multiplicative() {
        let fld = default_field(2).unwrap();
        let n = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let form = BilinearFormA::random(n, &fld, &mut rng);
        // (n+1)O -> O(1,1) by the row (μ_i), composed with the x-Euler column.
        let row = PolyMatrix {
            n,
            src: vec![(0, 0); n + 1],
            dst: vec![(0, 1)],
            entries: vec![(0..=n).map(|i| BiPoly::linear_y(n, &form.mu(i))).collect()],
        };
        let col = PolyMatrix::euler_column(n, false);
        let lhs = frobenius_presentation(&row.compose(&col, &fld).unwrap(), 4, &fld).unwrap();
        let rhs = frobenius_presentation(&row, 4, &fld)
            .unwrap()
            .compose(&frobenius_presentation(&col, 4, &fld).unwrap(), &fld)
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cokernel_c1_scales_by_q() {
        let fld = default_field(2).unwrap();
        let e = PolyMatrix::euler_column(2, true);
        let c = cokernel_chern(&e).unwrap();
        for q in [2u64, 4] {
            let fc = cokernel_chern(&frobenius_presentation(&e, q, &fld).unwrap()).unwrap();
            assert_eq!(fc.rank, 2);
            assert_eq!(fc.total_chern, frobenius_pull_chern(&c.total_chern, q as i64).unwrap());
            assert_eq!(fc.total_chern.c1(), (BigInt::from(0), BigInt::from(q)));
        }
    }

    #[test]
    fn rejects_wrong_characteristic() {
        let fld = default_field(2).unwrap();
        let e = PolyMatrix::euler_column(2, true);
        assert!(matches!(
            frobenius_presentation(&e, 3, &fld),
            Err(Error::NotCharacteristicPower { .. })
        ));
    }
}
