//! Explicit finite-field monads for `E_0[n,q,k](-L)` and the computations
//! built on them: sections, line restrictions, restriction to `kA` and to
//! hyperplane pairs, global-generation probes, the factor flip, and the
//! characteristic-2 multilinear checks on `P^n`.

mod charp;
mod frobenius;
mod lines;
mod probe;
mod restrict;
mod sections;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::Bidegree;
use crate::error::{Error, Result};
use crate::field::{log_p, Fe, Field, FieldSpec};
use crate::linalg::Matrix;
use crate::poly::{BiPoly, TermJson};

pub use charp::{charp_multilinear_suite, CharpCheck, CharpReport};
pub use frobenius::{cokernel_chern, frobenius_presentation, PolyMatrix};
pub use lines::{
    random_h_line, random_jumping_h_line, random_l_line_in_a, random_l_line_off_a, splitting_profile,
    splitting_type, LineSample, SplittingType,
};
pub use probe::{global_gen_probe, ProbePoint, ProbeReport, ProbeTarget};
pub use restrict::{compatible_lower, h0_on_divisor, restrict_hyperplane_pair, restrict_to_ka, KaReport, KaRow};
pub use sections::{h0_mod, h0_twist, section_basis};

/// Matrix `(a_ij)` of the form `f = Σ a_ij x_i y_j` cutting out `A ∈ |L+h|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilinearFormA {
    pub n: usize,
    pub a: Vec<Vec<Fe>>,
}

impl BilinearFormA {
    pub fn identity(n: usize) -> Self {
        let a = (0..=n)
            .map(|i| (0..=n).map(|j| Fe::from(i == j)).collect())
            .collect();
        Self { n, a }
    }

    pub fn from_rows(rows: Vec<Vec<Fe>>) -> Result<Self> {
        let m = rows.len();
        if m < 2 || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidParameter(format!(
                "form must be a square matrix of size at least 2, got {m} rows"
            )));
        }
        Ok(Self { n: m - 1, a: rows })
    }

    /// A uniformly random nondegenerate form.
    pub fn random<R: Rng + ?Sized>(n: usize, field: &Field, rng: &mut R) -> Self {
        loop {
            let a = (0..=n)
                .map(|_| (0..=n).map(|_| field.random(rng)).collect())
                .collect();
            let form = Self { n, a };
            if form.det(field) != 0 {
                return form;
            }
        }
    }

    pub fn det(&self, field: &Field) -> Fe {
        Matrix::from_rows(&self.a).det(field)
    }

    pub fn check(&self, field: &Field) -> Result<()> {
        if self.a.iter().flatten().any(|&c| c >= field.order()) {
            return Err(Error::InvalidParameter("form entry outside the field".into()));
        }
        if self.det(field) == 0 {
            return Err(Error::SingularForm);
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let m = self.n + 1;
        Self {
            n: self.n,
            a: (0..m).map(|i| (0..m).map(|j| self.a[j][i]).collect()).collect(),
        }
    }

    /// Leading `n x n` block, the form left after `x_n = y_n = 0`.
    pub fn leading_block(&self) -> Self {
        Self {
            n: self.n - 1,
            a: self.a[..self.n].iter().map(|r| r[..self.n].to_vec()).collect(),
        }
    }

    pub fn poly(&self, field: &Field) -> BiPoly {
        let n = self.n;
        let mut f = BiPoly::zero(n);
        for i in 0..=n {
            for j in 0..=n {
                let mut e = vec![0; 2 * (n + 1)];
                e[i] = 1;
                e[n + 1 + j] = 1;
                f = f.add(&BiPoly::monomial(n, e, self.a[i][j]), field);
            }
        }
        f
    }

    /// `λ_j = Σ_i a_ij x_i`, so that `f = Σ_j λ_j y_j`.
    pub fn lambda(&self, j: usize) -> Vec<Fe> {
        (0..=self.n).map(|i| self.a[i][j]).collect()
    }

    /// `μ_i = Σ_j a_ij y_j`, so that `f = Σ_i x_i μ_i`.
    pub fn mu(&self, i: usize) -> Vec<Fe> {
        self.a[i].clone()
    }
}

/// A monad `⊕O(left) -A-> ⊕O(middle) -B-> ⊕O(right)` of sums of line bundles
/// on `P^n x P^n`. `a[m][l]` and `b[r][m]` are bihomogeneous entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monad {
    pub field: Field,
    pub n: usize,
    pub left: Vec<Bidegree>,
    pub middle: Vec<Bidegree>,
    pub right: Vec<Bidegree>,
    pub a: Vec<Vec<BiPoly>>,
    pub b: Vec<Vec<BiPoly>>,
}

fn check_entries(
    what: &str,
    entries: &[Vec<BiPoly>],
    src: &[Bidegree],
    dst: &[Bidegree],
    n: usize,
) -> Result<()> {
    if entries.len() != dst.len() || entries.iter().any(|r| r.len() != src.len()) {
        return Err(Error::InvalidParameter(format!("{what}: matrix shape does not match the summands")));
    }
    for (r, row) in entries.iter().enumerate() {
        for (c, p) in row.iter().enumerate() {
            if p.n != n {
                return Err(Error::DimensionMismatch(p.n, n));
            }
            if p.is_zero() {
                continue;
            }
            let expected = (dst[r].0 - src[c].0, dst[r].1 - src[c].1);
            match p.bidegree() {
                Some(d) if d == expected => {}
                Some(d) => return Err(Error::DegreeMismatch { expected, found: d }),
                None => {
                    return Err(Error::InvalidParameter(format!("{what}[{r}][{c}] is not bihomogeneous")));
                }
            }
        }
    }
    Ok(())
}

impl Monad {
    pub fn new(
        field: Field,
        n: usize,
        left: Vec<Bidegree>,
        middle: Vec<Bidegree>,
        right: Vec<Bidegree>,
        a: Vec<Vec<BiPoly>>,
        b: Vec<Vec<BiPoly>>,
    ) -> Result<Self> {
        check_entries("A", &a, &left, &middle, n)?;
        check_entries("B", &b, &middle, &right, n)?;
        let m = Self {
            field,
            n,
            left,
            middle,
            right,
            a,
            b,
        };
        if !m.composite_is_zero() {
            return Err(Error::ModelInconsistency("B∘A is not zero".into()));
        }
        Ok(m)
    }

    /// `B∘A` as a `right x left` matrix of polynomials.
    pub fn composite(&self) -> Vec<Vec<BiPoly>> {
        let f = &self.field;
        self.b
            .iter()
            .map(|brow| {
                (0..self.left.len())
                    .map(|l| {
                        brow.iter()
                            .zip(&self.a)
                            .fold(BiPoly::zero(self.n), |acc, (bp, arow)| acc.add(&bp.mul(&arow[l], f), f))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn composite_is_zero(&self) -> bool {
        self.composite().iter().flatten().all(BiPoly::is_zero)
    }

    /// Rank of the bundle presented by the monad.
    pub fn rank(&self) -> usize {
        self.middle.len() - self.left.len() - self.right.len()
    }

    /// Dual monad `⊕O(-right) -Bᵀ-> ⊕O(-middle) -Aᵀ-> ⊕O(-left)`.
    pub fn dual(&self) -> Self {
        let neg = |v: &[Bidegree]| v.iter().map(|&(s, t)| (-s, -t)).collect::<Vec<_>>();
        Self {
            field: self.field.clone(),
            n: self.n,
            left: neg(&self.right),
            middle: neg(&self.middle),
            right: neg(&self.left),
            a: transpose(&self.b),
            b: transpose(&self.a),
        }
    }

    /// Pullback under the involution exchanging the factors.
    pub fn flip(&self) -> Self {
        let sw = |v: &[Bidegree]| v.iter().map(|&(s, t)| (t, s)).collect::<Vec<_>>();
        let fl = |m: &[Vec<BiPoly>]| m.iter().map(|r| r.iter().map(BiPoly::flip).collect()).collect();
        Self {
            field: self.field.clone(),
            n: self.n,
            left: sw(&self.left),
            middle: sw(&self.middle),
            right: sw(&self.right),
            a: fl(&self.a),
            b: fl(&self.b),
        }
    }

    /// Substitutes `x_n = y_n = 0`.
    pub fn drop_last_pair(&self) -> Self {
        let dr = |m: &[Vec<BiPoly>]| m.iter().map(|r| r.iter().map(BiPoly::drop_last_pair).collect()).collect();
        Self {
            field: self.field.clone(),
            n: self.n - 1,
            left: self.left.clone(),
            middle: self.middle.clone(),
            right: self.right.clone(),
            a: dr(&self.a),
            b: dr(&self.b),
        }
    }

    /// Removes middle summand `m` together with its row of `A` and column of `B`.
    pub fn without_middle(&self, m: usize) -> Self {
        let mut out = self.clone();
        out.middle.remove(m);
        out.a.remove(m);
        for row in &mut out.b {
            row.remove(m);
        }
        out
    }
}

fn transpose(m: &[Vec<BiPoly>]) -> Vec<Vec<BiPoly>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|c| m.iter().map(|r| r[c].clone()).collect()).collect()
}

/// The monad of `E_0[n,q,k](-L)` together with its construction parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadData {
    pub n: usize,
    pub q: u64,
    pub k: u64,
    pub form: BilinearFormA,
    pub monad: Monad,
    /// Built over the `L` factor, i.e. with the roles of the factors exchanged.
    pub flipped: bool,
}

fn linear_power(n: usize, coeffs: &[Fe], q: u64, on_x: bool, field: &Field) -> BiPoly {
    let lin = if on_x {
        BiPoly::linear_x(n, coeffs)
    } else {
        BiPoly::linear_y(n, coeffs)
    };
    lin.pow(q, field)
}

fn validate(field: &Field, n: usize, q: u64, k: u64, form: &BilinearFormA) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if form.n != n {
        return Err(Error::DimensionMismatch(form.n, n));
    }
    let p = field.characteristic() as u64;
    if log_p(q, p).is_none() {
        return Err(Error::NotCharacteristicPower { q, p });
    }
    if k < 1 || k > q {
        return Err(Error::InvalidParameter(format!("k = {k} must satisfy 1 <= k <= q = {q}")));
    }
    form.check(field)
}

/// `O(-qh) -> (n+1)O ⊕ O((q-k)L-kh) -> O(qL)` with
/// `A = (y_0^q, …, y_n^q, -f^{q-k})ᵀ` and `B = (λ_0^q, …, λ_n^q, f^k)`.
pub fn build_monad(field: &Field, n: usize, q: u64, k: u64, form: &BilinearFormA) -> Result<MonadData> {
    validate(field, n, q, k, form)?;
    let qi = q as i64;
    let ki = k as i64;
    let f = form.poly(field);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..=n {
        a.push(vec![BiPoly::y(n, j).pow(q, field)]);
        b.push(linear_power(n, &form.lambda(j), q, true, field));
    }
    a.push(vec![f.pow(q - k, field).neg(field)]);
    b.push(f.pow(k, field));
    let mut middle = vec![(0, 0); n + 1];
    middle.push((qi - ki, -ki));
    let monad = Monad::new(field.clone(), n, vec![(0, -qi)], middle, vec![(qi, 0)], a, vec![b])?;
    Ok(MonadData {
        n,
        q,
        k,
        form: form.clone(),
        monad,
        flipped: false,
    })
}

/// The same construction carried out over the `L` factor:
/// `O(-qL) -> (n+1)O ⊕ O(-kL+(q-k)h) -> O(qh)` with
/// `A = (x_0^q, …, x_n^q, -f^{q-k})ᵀ` and `B = (μ_0^q, …, μ_n^q, f^k)`.
pub fn build_monad_l_side(field: &Field, n: usize, q: u64, k: u64, form: &BilinearFormA) -> Result<MonadData> {
    validate(field, n, q, k, form)?;
    let qi = q as i64;
    let ki = k as i64;
    let f = form.poly(field);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..=n {
        a.push(vec![BiPoly::x(n, i).pow(q, field)]);
        b.push(linear_power(n, &form.mu(i), q, false, field));
    }
    a.push(vec![f.pow(q - k, field).neg(field)]);
    b.push(f.pow(k, field));
    let mut middle = vec![(0, 0); n + 1];
    middle.push((-ki, qi - ki));
    let monad = Monad::new(field.clone(), n, vec![(-qi, 0)], middle, vec![(0, qi)], a, vec![b])?;
    Ok(MonadData {
        n,
        q,
        k,
        form: form.clone(),
        monad,
        flipped: true,
    })
}

/// Pullback of the monad under the factor swap; the form is transposed so
/// that `f` still defines the image divisor.
pub fn flip_monad(m: &MonadData) -> MonadData {
    MonadData {
        n: m.n,
        q: m.q,
        k: m.k,
        form: m.form.transpose(),
        monad: m.monad.flip(),
        flipped: !m.flipped,
    }
}

impl MonadData {
    pub fn field(&self) -> &Field {
        &self.monad.field
    }

    /// The equation `f` of `A`.
    pub fn f(&self) -> BiPoly {
        self.form.poly(self.field())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let enc = |m: &[Vec<BiPoly>]| -> Vec<Vec<Vec<TermJson>>> {
            m.iter().map(|r| r.iter().map(BiPoly::to_json_terms).collect()).collect()
        };
        serde_json::to_value(MonadJson {
            field: self.field().spec(),
            n: self.n,
            q: self.q,
            k: self.k,
            form: self.form.a.clone(),
            flipped: self.flipped,
            left: self.monad.left.clone(),
            middle: self.monad.middle.clone(),
            right: self.monad.right.clone(),
            a: enc(&self.monad.a),
            b: enc(&self.monad.b),
        })
        .expect("monad serializes")
    }

    /// Rebuilds from JSON, re-checking degrees and `B∘A = 0`.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: MonadJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let field = Field::new(raw.field)?;
        let n = raw.n;
        let dec = |m: &[Vec<Vec<TermJson>>]| -> Vec<Vec<BiPoly>> {
            m.iter()
                .map(|r| r.iter().map(|t| BiPoly::from_json_terms(n, t, &field)).collect())
                .collect()
        };
        let form = BilinearFormA::from_rows(raw.form)?;
        validate(&field, n, raw.q, raw.k, &form)?;
        let monad = Monad::new(
            field.clone(),
            n,
            raw.left,
            raw.middle,
            raw.right,
            dec(&raw.a),
            dec(&raw.b),
        )?;
        Ok(Self {
            n,
            q: raw.q,
            k: raw.k,
            form,
            monad,
            flipped: raw.flipped,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MonadJson {
    field: FieldSpec,
    n: usize,
    q: u64,
    k: u64,
    form: Vec<Vec<Fe>>,
    flipped: bool,
    left: Vec<Bidegree>,
    middle: Vec<Bidegree>,
    right: Vec<Bidegree>,
    a: Vec<Vec<Vec<TermJson>>>,
    b: Vec<Vec<Vec<TermJson>>>,
}

/// Default coefficient field for characteristic `p`: `F_{p^e}` with `p^e >= 64`.
pub fn default_field(p: u32) -> Result<Field> {
    Field::new(FieldSpec::with_default_extension(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_form_example() {
        let fld = default_field(2).unwrap();
        let m = build_monad(&fld, 2, 2, 1, &BilinearFormA::identity(2)).unwrap();
        let f = BilinearFormA::identity(2).poly(&fld);
        assert_eq!(m.monad.a[0][0], BiPoly::y(2, 0).pow(2, &fld));
        assert_eq!(m.monad.a[3][0], f.neg(&fld));
        assert_eq!(m.monad.b[0][1], BiPoly::x(2, 1).pow(2, &fld));
        assert_eq!(m.monad.b[0][3], f);
        assert_eq!(m.monad.rank(), 2);
    }

    #[test]
    fn composite_vanishes_for_random_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, p, q, k) in [(2usize, 2u32, 2u64, 1u64), (2, 2, 4, 3), (3, 2, 2, 2), (2, 3, 3, 2)] {
            let fld = default_field(p).unwrap();
            for _ in 0..3 {
                let form = BilinearFormA::random(n, &fld, &mut rng);
                let m = build_monad(&fld, n, q, k, &form).unwrap();
                assert!(m.monad.composite_is_zero());
                assert!(m.monad.dual().composite_is_zero());
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let fld = default_field(2).unwrap();
        let sing = BilinearFormA::from_rows(vec![vec![1, 1, 0], vec![1, 1, 0], vec![0, 0, 1]]).unwrap();
        assert!(matches!(build_monad(&fld, 2, 2, 1, &sing), Err(Error::SingularForm)));
        let id = BilinearFormA::identity(2);
        assert!(matches!(build_monad(&fld, 2, 2, 3, &id), Err(Error::InvalidParameter(_))));
        assert!(matches!(
            build_monad(&fld, 2, 3, 1, &id),
            Err(Error::NotCharacteristicPower { q: 3, p: 2 })
        ));
    }

    #[test]
    fn non_frobenius_power_breaks_the_complex() {
        // With q not a power of the characteristic, (Σ λ_j y_j)^q ≠ Σ λ_j^q y_j^q.
        let fld = default_field(3).unwrap();
        let form = BilinearFormA::identity(2);
        let f = form.poly(&fld);
        let lhs = f.pow(2, &fld);
        let rhs = (0..=2).fold(BiPoly::zero(2), |acc, j| {
            acc.add(&BiPoly::x(2, j).pow(2, &fld).mul(&BiPoly::y(2, j).pow(2, &fld), &fld), &fld)
        });
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn flip_is_an_involution_and_matches_l_side() {
        let fld = default_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let form = BilinearFormA::random(2, &fld, &mut rng);
        let m = build_monad(&fld, 2, 2, 1, &form).unwrap();
        assert_eq!(flip_monad(&flip_monad(&m)), m);
        let l = build_monad_l_side(&fld, 2, 2, 1, &form).unwrap();
        assert_eq!(flip_monad(&build_monad(&fld, 2, 2, 1, &form.transpose()).unwrap()), l);
    }

    #[test]
    fn json_roundtrip() {
        let fld = default_field(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let form = BilinearFormA::random(2, &fld, &mut rng);
        let m = build_monad(&fld, 2, 3, 2, &form).unwrap();
        let j = m.to_json();
        assert_eq!(j["a"][0][0][0], serde_json::json!([1, [0, 0, 0], [3, 0, 0]]));
        assert_eq!(MonadData::from_json(&j).unwrap(), m);
    }

    #[test]
    fn tampered_json_is_rejected() {
        let fld = default_field(2).unwrap();
        let m = build_monad(&fld, 2, 2, 1, &BilinearFormA::identity(2)).unwrap();
        let mut j = m.to_json();
        j["a"][0][0][0] = serde_json::json!([1, [0, 0, 0], [1, 1, 0]]);
        assert!(MonadData::from_json(&j).is_err());
    }
}
