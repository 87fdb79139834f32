//! Exact linear algebra over a [`Field`].

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::field::{Fe, Field};

/// Sparse vector: strictly increasing indices, nonzero values.
pub type SparseVec = Vec<(usize, Fe)>;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Fe>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Fe) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix, f: &Field) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        let v = f.add(out.get(i, j), f.mul(a, b));
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Fe], f: &Field) -> Vec<Fe> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self, f: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("nonzero pivot");
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c);
                if factor == 0 {
                    continue;
                }
                let nf = f.neg(factor);
                for j in c..self.cols {
                    let pv = self.get(r, j);
                    if pv != 0 {
                        let v = f.add(self.get(i, j), f.mul(nf, pv));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.clone().rref(f).len()
    }

    /// Basis of `{v : self * v = 0}`, one vector per free column.
    pub fn nullspace(&self, f: &Field) -> Vec<Vec<Fe>> {
        let mut m = self.clone();
        let pivots = m.rref(f);
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m.get(r, free));
            }
            basis.push(v);
        }
        basis
    }

    /// Determinant of a square matrix.
    pub fn det(&self, f: &Field) -> Fe {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = 1;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| m.get(i, c) != 0) else {
                return 0;
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = m.get(c, c);
            det = f.mul(det, pv);
            let inv = f.inv(pv).expect("nonzero pivot");
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor == 0 {
                    continue;
                }
                let nf = f.neg(factor);
                for j in c..n {
                    let v = f.add(m.get(i, j), f.mul(nf, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }
}

/// Incrementally built echelon basis of a subspace of `F^dim`, stored sparsely.
///
/// Each stored row is monic in its leading (smallest) index. Inserting a
/// vector reduces it against the stored rows and keeps the remainder if it is
/// nonzero, so `rank()` is the dimension of the span of everything inserted.
#[derive(Debug, Clone)]
pub struct SparseEchelon {
    field: Field,
    dim: usize,
    pivots: HashMap<usize, SparseVec>,
    acc: Vec<Fe>,
}

impl SparseEchelon {
    pub fn new(field: &Field, dim: usize) -> Self {
        Self {
            field: field.clone(),
            dim,
            pivots: HashMap::new(),
            acc: vec![0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the basis; returns the remainder (empty if `v` is
    /// in the span).
    pub fn reduce(&mut self, v: &[(usize, Fe)]) -> SparseVec {
        let f = &self.field;
        let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::with_capacity(v.len() * 2);
        for &(i, x) in v {
            debug_assert!(i < self.dim);
            if x != 0 {
                self.acc[i] = f.add(self.acc[i], x);
                heap.push(Reverse(i));
            }
        }
        let mut rest: SparseVec = Vec::new();
        while let Some(Reverse(i)) = heap.pop() {
            let x = self.acc[i];
            if x == 0 {
                continue;
            }
            if let Some(row) = self.pivots.get(&i) {
                let nx = f.neg(x);
                for &(j, y) in row {
                    let before = self.acc[j];
                    self.acc[j] = f.add(before, f.mul(nx, y));
                    if before == 0 {
                        heap.push(Reverse(j));
                    }
                }
                debug_assert_eq!(self.acc[i], 0);
            } else {
                rest.push((i, x));
                self.acc[i] = 0;
            }
        }
        rest
    }

    /// Inserts `v`; returns true if the rank grew.
    pub fn insert(&mut self, v: &[(usize, Fe)]) -> bool {
        let rest = self.reduce(v);
        if rest.is_empty() {
            return false;
        }
        let f = &self.field;
        let inv = f.inv(rest[0].1).expect("nonzero");
        let row: SparseVec = rest.into_iter().map(|(j, y)| (j, f.mul(y, inv))).collect();
        self.pivots.insert(row[0].0, row);
        true
    }

    pub fn contains(&mut self, v: &[(usize, Fe)]) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
}

/// A linear map given by the images of basis vectors, as sparse columns.
#[derive(Debug, Clone)]
pub struct SparseMap {
    pub src_dim: usize,
    pub dst_dim: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMap {
    pub fn zero(src_dim: usize, dst_dim: usize) -> Self {
        Self {
            src_dim,
            dst_dim,
            cols: vec![Vec::new(); src_dim],
        }
    }

    pub fn rank(&self, f: &Field) -> usize {
        let mut ech = SparseEchelon::new(f, self.dst_dim);
        for c in &self.cols {
            ech.insert(c);
        }
        ech.rank()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dst_dim, self.src_dim);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m.set(i, j, v);
            }
        }
        m
    }

    /// Composite `other ∘ self`.
    pub fn then(&self, other: &SparseMap, f: &Field) -> SparseMap {
        assert_eq!(self.dst_dim, other.src_dim);
        let cols = self
            .cols
            .iter()
            .map(|col| {
                let mut acc: HashMap<usize, Fe> = HashMap::new();
                for &(k, a) in col {
                    for &(i, b) in &other.cols[k] {
                        let e = acc.entry(i).or_insert(0);
                        *e = f.add(*e, f.mul(a, b));
                    }
                }
                let mut v: SparseVec = acc.into_iter().filter(|&(_, x)| x != 0).collect();
                v.sort_unstable();
                v
            })
            .collect();
        SparseMap {
            src_dim: self.src_dim,
            dst_dim: other.dst_dim,
            cols,
        }
    }
}

impl SparseMap {
    /// Basis of the kernel, each vector sparse in source coordinates.
    pub fn kernel(&self, f: &Field) -> Vec<SparseVec> {
        let mut pivots: HashMap<usize, (SparseVec, SparseVec)> = HashMap::new();
        let mut img = vec![0; self.dst_dim];
        let mut comb = vec![0; self.src_dim];
        let mut out = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            let mut heap: BinaryHeap<Reverse<usize>> = BinaryHeap::new();
            let mut touched: Vec<usize> = vec![j];
            comb[j] = 1;
            for &(i, x) in col {
                img[i] = f.add(img[i], x);
                heap.push(Reverse(i));
            }
            let mut rest: SparseVec = Vec::new();
            while let Some(Reverse(i)) = heap.pop() {
                let x = img[i];
                if x == 0 {
                    continue;
                }
                if let Some((row, rc)) = pivots.get(&i) {
                    let nx = f.neg(x);
                    for &(k, y) in row {
                        let before = img[k];
                        img[k] = f.add(before, f.mul(nx, y));
                        if before == 0 {
                            heap.push(Reverse(k));
                        }
                    }
                    for &(k, y) in rc {
                        if comb[k] == 0 {
                            touched.push(k);
                        }
                        comb[k] = f.add(comb[k], f.mul(nx, y));
                    }
                } else {
                    rest.push((i, x));
                    img[i] = 0;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let c: SparseVec = touched
                .iter()
                .filter(|&&k| comb[k] != 0)
                .map(|&k| (k, comb[k]))
                .collect();
            for &k in &touched {
                comb[k] = 0;
            }
            if rest.is_empty() {
                out.push(c);
            } else {
                let inv = f.inv(rest[0].1).expect("nonzero");
                let row: SparseVec = rest.into_iter().map(|(k, y)| (k, f.mul(y, inv))).collect();
                let rc: SparseVec = c.into_iter().map(|(k, y)| (k, f.mul(y, inv))).collect();
                pivots.insert(row[0].0, (row, rc));
            }
        }
        out
    }

    /// Image of a sparse source vector.
    pub fn apply(&self, v: &[(usize, Fe)], f: &Field) -> SparseVec {
        let mut acc = Vec::new();
        for &(j, a) in v {
            acc.extend(self.cols[j].iter().map(|&(i, b)| (i, f.mul(a, b))));
        }
        normalize_sparse(acc, f)
    }
}

/// Adds `c * src` into a dense accumulator.
pub fn axpy(acc: &mut [Fe], c: Fe, src: &[Fe], f: &Field) {
    if c == 0 {
        return;
    }
    for (a, &s) in acc.iter_mut().zip(src) {
        if s != 0 {
            *a = f.add(*a, f.mul(c, s));
        }
    }
}

/// Sorts and merges a list of sparse entries, dropping zeros.
pub fn normalize_sparse(mut v: Vec<(usize, Fe)>, f: &Field) -> SparseVec {
    v.sort_unstable_by_key(|&(i, _)| i);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y = f.add(*y, x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|&(_, x)| x != 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(f: &Field, r: usize, c: usize, rank: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut a = Matrix::zeros(r, rank);
        let mut b = Matrix::zeros(rank, c);
        for x in a.data.iter_mut().chain(b.data.iter_mut()) {
            *x = f.random(rng);
        }
        a.mul(&b, f)
    }

    #[test]
    fn rank_nullity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in [FieldSpec { p: 2, e: 1 }, FieldSpec { p: 3, e: 4 }, FieldSpec { p: 5, e: 3 }] {
            let f = Field::new(spec).unwrap();
            for _ in 0..10 {
                let m = random_matrix(&f, 9, 12, 5, &mut rng);
                let r = m.rank(&f);
                assert!(r <= 5);
                let ns = m.nullspace(&f);
                assert_eq!(ns.len() + r, 12);
                for v in &ns {
                    assert!(m.mul_vec(v, &f).iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn sparse_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Field::new(FieldSpec { p: 3, e: 2 }).unwrap();
        for _ in 0..20 {
            let m = random_matrix(&f, 15, 10, 6, &mut rng);
            let mut ech = SparseEchelon::new(&f, 10);
            for i in 0..15 {
                let v: SparseVec = m
                    .row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(j, &x)| (j, x))
                    .collect();
                ech.insert(&v);
            }
            assert_eq!(ech.rank(), m.rank(&f));
        }
    }

    #[test]
    fn determinant_of_identity_and_singular() {
        let f = Field::new(FieldSpec { p: 5, e: 1 }).unwrap();
        assert_eq!(Matrix::identity(4).det(&f), 1);
        let m = Matrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.det(&f), 0);
        let m = Matrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det(&f), 4);
    }

    #[test]
    fn sparse_kernel_is_kernel() {
        let f = Field::new(FieldSpec::new(5, 1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (r, c, k) in [(6, 9, 4), (10, 10, 10), (3, 8, 0), (12, 7, 5)] {
            let m = random_matrix(&f, r, c, k, &mut rng);
            let mut cols = Vec::new();
            for j in 0..c {
                cols.push((0..r).filter(|&i| m.get(i, j) != 0).map(|i| (i, m.get(i, j))).collect());
            }
            let sm = SparseMap { src_dim: c, dst_dim: r, cols };
            let ker = sm.kernel(&f);
            assert_eq!(ker.len(), c - m.rank(&f));
            for v in &ker {
                assert!(sm.apply(v, &f).is_empty());
            }
            let mut ech = SparseEchelon::new(&f, c);
            for v in &ker {
                assert!(ech.insert(v));
            }
        }
    }
}
