use serde::{Deserialize, Serialize};

use super::{build_monad, h0_mod, h0_twist, MonadData};
use crate::cohomology::{kunneth_h, monad_cohomology, Bidegree};
use crate::error::{Error, Result};
use crate::model::Monad;
use crate::poly::BiPoly;

/// Sets `x_n = y_n = 0`. The result presents `E_0[n-1,q,k](-L) ⊕ O` on
/// `P^{n-1} x P^{n-1}` whenever the leading `n x n` block of the form is
/// nondegenerate.
pub fn restrict_hyperplane_pair(m: &MonadData) -> Result<MonadData> {
    if m.n < 2 {
        return Err(Error::InvalidParameter("restriction needs n >= 2".into()));
    }
    let form = m.form.leading_block();
    if form.det(m.field()) == 0 {
        return Err(Error::SingularForm);
    }
    Ok(MonadData {
        n: m.n - 1,
        q: m.q,
        k: m.k,
        form,
        monad: m.monad.drop_last_pair(),
        flipped: m.flipped,
    })
}

/// The monad `E_0[n-1,q,k]` expected as the nontrivial summand of the restriction.
pub fn compatible_lower(m: &MonadData) -> Result<MonadData> {
    build_monad(m.field(), m.n - 1, m.q, m.k, &m.form.leading_block())
}

fn shift(d: Bidegree, tw: Bidegree) -> Bidegree {
    (d.0 + tw.0, d.1 + tw.1)
}

/// `h^0` of the monad cohomology on `g = 0` (degree `e`), by two routes: sections
/// of the middle term modulo `g`, and `h^0(E) - h^0(E(-e))` when `h^1(E(-e)) = 0`.
/// `None` when neither route is conclusive; an error when they disagree.
pub fn h0_on_divisor(m: &Monad, tw: Bidegree, g: &BiPoly) -> Result<Option<u64>> {
    let e = g
        .bidegree()
        .ok_or_else(|| Error::InvalidParameter("divisor equation must be bihomogeneous".into()))?;
    let direct = match h0_mod(m, tw, g) {
        Ok(v) => Some(v),
        Err(Error::InvalidParameter(_)) => None,
        Err(err) => return Err(err),
    };
    let low = monad_cohomology(m, shift(tw, (-e.0, -e.1)))?;
    let via_twist = if low.h[1].value() == Some(0) {
        let hi = h0_twist(m, tw)?;
        let lo = low.h[0].value().expect("h^0 is always exact");
        Some(hi - lo)
    } else {
        None
    };
    match (direct, via_twist) {
        (Some(a), Some(b)) if a != b => Err(Error::ModelInconsistency(format!(
            "h^0 on divisor at {tw:?}: {a} from sections mod g, {b} from the twist sequence"
        ))),
        (Some(a), _) | (None, Some(a)) => Ok(Some(a)),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KaRow {
    pub twist: Bidegree,
    /// `h^0(E_0[n,q,k](-L)|_{kA}(s,t))`.
    pub total: Option<u64>,
    /// `h^0(O_{kA}((q-k+s)L + (t-k)h))`.
    pub line_part: u64,
    /// `h^0(E'(s,t))` on `kA`, `E'` the monad without the last middle summand
    /// (a complex only modulo `f^k`).
    pub e_prime: Option<u64>,
    /// `total = line_part + e_prime`, when both sides are determined.
    pub additive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KaReport {
    pub q: u64,
    pub k: u64,
    /// The summand `O((q-k)L-kh)` decouples on `kA` only if both `f^k` and
    /// `f^{q-k}` vanish there, i.e. `2k <= q`.
    pub split_expected: bool,
    pub rows: Vec<KaRow>,
}

impl KaReport {
    /// Every determined row is additive (vacuous if the split is not expected).
    pub fn holds(&self) -> bool {
        !self.split_expected || self.rows.iter().all(|r| r.additive != Some(false))
    }

    pub fn determined(&self) -> usize {
        self.rows.iter().filter(|r| r.additive.is_some()).count()
    }
}

/// Dimension bookkeeping for `E|_{kA} = O_{kA}((q-k)L-kh) ⊕ E'` over the given twists.
pub fn restrict_to_ka(m: &MonadData, twists: &[Bidegree]) -> Result<KaReport> {
    if m.flipped {
        return Err(Error::InvalidParameter("restriction to kA expects the unflipped monad".into()));
    }
    let n = m.n;
    let f = m.field();
    let g = m.f().pow(m.k, f);
    let last = m.monad.middle.len() - 1;
    let e_mon = m.monad.without_middle(last);
    let (q, k) = (m.q as i64, m.k as i64);
    let mut rows = Vec::new();
    for &tw in twists {
        let total = h0_on_divisor(&m.monad, tw, &g)?;
        // E' is a complex only modulo f^k, so only the sections route applies.
        let e_prime = match h0_mod(&e_mon, tw, &g) {
            Ok(v) => Some(v),
            Err(Error::InvalidParameter(_)) => None,
            Err(err) => return Err(err),
        };
        let d = shift((q - k, -k), tw);
        let line_part = kunneth_h(n, d).get(0) - kunneth_h(n, shift(d, (-k, -k))).get(0);
        let additive = match (total, e_prime) {
            (Some(a), Some(b)) => Some(a == line_part + b),
            _ => None,
        };
        rows.push(KaRow {
            twist: tw,
            total,
            line_part,
            e_prime,
            additive,
        });
    }
    Ok(KaReport {
        q: m.q,
        k: m.k,
        split_expected: 2 * k <= q,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_field, BilinearFormA};

    fn box_twists(lo: i64, hi: i64) -> Vec<Bidegree> {
        (lo..=hi).flat_map(|s| (lo..=hi).map(move |t| (s, t))).collect()
    }

    #[test]
    fn identity_form_restricts_to_identity() {
        let fld = default_field(2).unwrap();
        let m = build_monad(&fld, 3, 2, 1, &BilinearFormA::identity(3)).unwrap();
        let r = restrict_hyperplane_pair(&m).unwrap();
        assert_eq!(r.form, BilinearFormA::identity(2));
        assert!(r.monad.composite_is_zero());
    }

    #[test]
    fn degenerate_block_is_rejected() {
        let fld = default_field(2).unwrap();
        let form = BilinearFormA::from_rows(vec![
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
            vec![1, 0, 0, 0],
        ])
        .unwrap();
        let m = build_monad(&fld, 3, 2, 1, &form).unwrap();
        assert!(matches!(restrict_hyperplane_pair(&m), Err(Error::SingularForm)));
    }

    #[test]
    fn ka_additivity_q2_k1() {
        let fld = default_field(2).unwrap();
        let m = build_monad(&fld, 2, 2, 1, &BilinearFormA::identity(2)).unwrap();
        let rep = restrict_to_ka(&m, &box_twists(0, 3)).unwrap();
        assert!(rep.split_expected);
        assert!(rep.holds(), "{:?}", rep.rows);
        assert_eq!(rep.determined(), 13, "{:?}", rep.rows);
        assert!(rep.rows.iter().filter(|r| r.additive.is_none()).all(|r| r.twist.1 == 0 && r.twist.0 > 0));
    }

    #[test]
    fn ka_split_not_expected_when_2k_exceeds_q() {
        let fld = default_field(2).unwrap();
        let m = build_monad(&fld, 2, 2, 2, &BilinearFormA::identity(2)).unwrap();
        let rep = restrict_to_ka(&m, &[(1, 1)]).unwrap();
        assert!(!rep.split_expected);
    }
}
