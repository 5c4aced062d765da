//! Dense linear algebra over any [`Field`]: row reduction, kernels, solves,
//! subspaces in reduced echelon form, and exhaustive subspace enumeration
//! over finite fields. Also the inertia of a symmetric matrix over an exact
//! ordered field.

use crate::exact::Scalar;
use crate::field::Field;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Mat {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn zeros<F: Field<Elem = E>>(f: &F, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, f.zero())
    }

    pub fn identity<F: Field<Elem = E>>(f: &F, n: usize) -> Self {
        let mut m = Self::zeros(f, n, n);
        for i in 0..n {
            m.set(i, i, f.one());
        }
        m
    }

    /// Builds a matrix from rows. `cols` is needed when there are no rows.
    pub fn from_rows(cols: usize, rows: Vec<Vec<E>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Mat {
            rows: n,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<E>]) -> Self {
        let mut data = Vec::with_capacity(rows * cols.len());
        for i in 0..rows {
            for c in cols {
                data.push(c[i].clone());
            }
        }
        Mat {
            rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, f: &F) -> bool {
        self.data.iter().all(|x| f.is_zero(x))
    }
}

pub fn mat_mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!(a.cols, b.rows, "shape mismatch in product");
    let mut out = Mat::zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = a.get(i, k);
            if f.is_zero(x) {
                continue;
            }
            for j in 0..b.cols {
                let v = f.add(out.get(i, j), &f.mul(x, b.get(k, j)));
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn mat_vec<F: Field>(f: &F, a: &Mat<F::Elem>, v: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.cols, v.len(), "shape mismatch in matrix-vector product");
    (0..a.rows)
        .map(|i| dot(f, a.row(i), v))
        .collect()
}

pub fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter()
        .zip(b)
        .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

/// Reduced row echelon form and pivot columns.
pub fn rref<F: Field>(f: &F, m: &Mat<F::Elem>) -> (Mat<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = f.inv(a.get(r, c)).expect("nonzero pivot");
        for j in c..a.cols {
            let v = f.mul(a.get(r, j), &inv);
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r || f.is_zero(a.get(i, c)) {
                continue;
            }
            let factor = a.get(i, c).clone();
            for j in c..a.cols {
                let v = f.sub(a.get(i, j), &f.mul(&factor, a.get(r, j)));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
    rref(f, m).1.len()
}

/// Basis of `{x : m x = 0}`, one vector per free column.
pub fn null_space<F: Field>(f: &F, m: &Mat<F::Elem>) -> Vec<Vec<F::Elem>> {
    let (r, pivots) = rref(f, m);
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![f.zero(); m.cols];
        v[free] = f.one();
        for (row, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(r.get(row, free));
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `a x = b`, or `None` if the system is inconsistent.
pub fn solve<F: Field>(f: &F, a: &Mat<F::Elem>, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
    assert_eq!(a.rows, b.len());
    let mut aug = Mat::zeros(f, a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, a.cols, b[i].clone());
    }
    let (r, pivots) = rref(f, &aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![f.zero(); a.cols];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, a.cols).clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(f: &F, a: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    if a.rows != a.cols {
        return None;
    }
    let n = a.rows;
    let mut aug = Mat::zeros(f, n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n + i, f.one());
    }
    let (r, pivots) = rref(f, &aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let mut inv = Mat::zeros(f, n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, r.get(i, n + j).clone());
        }
    }
    Some(inv)
}

pub fn det<F: Field>(f: &F, a: &Mat<F::Elem>) -> F::Elem {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let mut m = a.clone();
    let n = m.rows;
    let mut acc = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !f.is_zero(m.get(i, c))) else {
            return f.zero();
        };
        if p != c {
            m.swap_rows(p, c);
            acc = f.neg(&acc);
        }
        let pivot = m.get(c, c).clone();
        acc = f.mul(&acc, &pivot);
        let inv = f.inv(&pivot).expect("nonzero pivot");
        for i in c + 1..n {
            if f.is_zero(m.get(i, c)) {
                continue;
            }
            let factor = f.mul(m.get(i, c), &inv);
            for j in c..n {
                let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(c, j)));
                m.set(i, j, v);
            }
        }
    }
    acc
}

/// A linear subspace of `K^n`, stored by its reduced echelon basis so that
/// structural equality is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace<E> {
    ambient: usize,
    basis: Vec<Vec<E>>,
}

impl<E: Clone + PartialEq> Subspace<E> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full<F: Field<Elem = E>>(f: &F, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![f.zero(); ambient];
                v[i] = f.one();
                v
            })
            .collect();
        Subspace { ambient, basis }
    }

    pub fn span<F: Field<Elem = E>>(f: &F, ambient: usize, vectors: &[Vec<E>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Mat::from_rows(ambient, vectors.to_vec());
        let (r, pivots) = rref(f, &m);
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis }
    }

    /// Wraps rows already in reduced echelon form.
    pub fn from_echelon(ambient: usize, basis: Vec<Vec<E>>) -> Self {
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<E>] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn contains<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> bool {
        if v.iter().all(|x| f.is_zero(x)) {
            return true;
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rank(f, &Mat::from_rows(self.ambient, rows)) == self.dim()
    }

    pub fn contains_subspace<F: Field<Elem = E>>(&self, f: &F, other: &Subspace<E>) -> bool {
        other.basis.iter().all(|v| self.contains(f, v))
    }

    pub fn sum<F: Field<Elem = E>>(&self, f: &F, other: &Subspace<E>) -> Self {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::span(f, self.ambient, &rows)
    }

    pub fn intersect<F: Field<Elem = E>>(&self, f: &F, other: &Subspace<E>) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        // x·A = y·B  ⇔  (x, −y) in the left kernel of [A; B].
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.iter().map(|x| f.neg(x)).collect()));
        let m = Mat::from_cols(self.ambient, &cols);
        let kernel = null_space(f, &m);
        let vectors: Vec<Vec<E>> = kernel
            .iter()
            .map(|k| {
                let mut v = vec![f.zero(); self.ambient];
                for (c, b) in k.iter().zip(&self.basis) {
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi = f.add(vi, &f.mul(c, bi));
                    }
                }
                v
            })
            .collect();
        Self::span(f, self.ambient, &vectors)
    }

    /// Image under `m`, a matrix with `self.ambient()` columns.
    pub fn image<F: Field<Elem = E>>(&self, f: &F, m: &Mat<E>) -> Self {
        let vectors: Vec<Vec<E>> = self.basis.iter().map(|b| mat_vec(f, m, b)).collect();
        Self::span(f, m.rows(), &vectors)
    }

    /// Linear equations cutting out the subspace: rows `a` with `a·v = 0`
    /// exactly for `v` in the subspace.
    pub fn annihilator<F: Field<Elem = E>>(&self, f: &F) -> Vec<Vec<E>> {
        if self.is_zero() {
            return Subspace::full(f, self.ambient).basis;
        }
        null_space(f, &Mat::from_rows(self.ambient, self.basis.clone()))
    }

    /// `{v : m v ∈ target}`.
    pub fn preimage<F: Field<Elem = E>>(f: &F, m: &Mat<E>, target: &Subspace<E>) -> Self {
        let ann = target.annihilator(f);
        if ann.is_empty() {
            return Self::full(f, m.cols());
        }
        let eqs = mat_mul(f, &Mat::from_rows(m.rows(), ann), m);
        let kernel = null_space(f, &eqs);
        Self::span(f, m.cols(), &kernel)
    }

    /// Coordinates of the basis as the columns of a matrix.
    pub fn as_columns(&self) -> Mat<E> {
        Mat::from_cols(self.ambient, &self.basis)
    }
}

/// Number of subspaces of `F_q^n` (sum of Gaussian binomials), saturating.
pub fn subspace_count(q: u64, n: usize) -> u128 {
    (0..=n).fold(0u128, |acc, k| acc.saturating_add(gaussian_binomial(q, n, k)))
}

pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let a = q.saturating_pow((n - i) as u32).saturating_sub(1);
        let b = q.saturating_pow((i + 1) as u32).saturating_sub(1);
        num = num.saturating_mul(a);
        den = den.saturating_mul(b);
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// Every subspace of `F_q^n`, each exactly once, ordered by dimension, then
/// pivot set, then free entries.
pub fn all_subspaces<F: Field>(f: &F, n: usize) -> Vec<Subspace<F::Elem>> {
    let elems = f.elements().expect("subspace enumeration needs a finite field");
    let mut out = Vec::new();
    for k in 0..=n {
        for pivots in combinations(n, k) {
            // Free slots: row r, column c > pivots[r], c not a pivot.
            let slots: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let piv = pivots.clone();
                    ((pivots[r] + 1)..n)
                        .filter(move |c| !piv.contains(c))
                        .map(move |c| (r, c))
                })
                .collect();
            let mut counter = vec![0usize; slots.len()];
            loop {
                let mut rows = vec![vec![f.zero(); n]; k];
                for (r, &p) in pivots.iter().enumerate() {
                    rows[r][p] = f.one();
                }
                for (&(r, c), &e) in slots.iter().zip(&counter) {
                    rows[r][c] = elems[e].clone();
                }
                out.push(Subspace::from_echelon(n, rows));
                if !advance(&mut counter, elems.len()) {
                    break;
                }
            }
        }
    }
    out
}

/// Odometer increment; false once it wraps around.
pub(crate) fn advance(counter: &mut [usize], base: usize) -> bool {
    for c in counter.iter_mut() {
        *c += 1;
        if *c < base {
            return true;
        }
        *c = 0;
    }
    false
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix over an exact
/// ordered field, by symmetric Gaussian elimination. When every remaining
/// diagonal entry vanishes, a congruence `e_i ← e_i + e_j` creates a nonzero
/// pivot from an off-diagonal entry.
pub fn symmetric_inertia(a: &[Vec<Scalar>]) -> (usize, usize, usize) {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a.to_vec();
    for row in &m {
        assert_eq!(row.len(), n, "matrix must be square");
    }
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&k| !m[k][k].is_zero());
        let k = match pivot {
            Some(k) => k,
            None => {
                let pair = active.iter().find_map(|&i| {
                    active
                        .iter()
                        .copied()
                        .find(|&j| j != i && !m[i][j].is_zero())
                        .map(|j| (i, j))
                });
                let Some((i, j)) = pair else { break };
                for c in 0..n {
                    let v = &m[i][c] + &m[j][c];
                    m[i][c] = v;
                }
                for r in 0..n {
                    let v = &m[r][i] + &m[r][j];
                    m[r][i] = v;
                }
                i
            }
        };
        let p = m[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&x| x != k);
        let pivot_row = m[k].clone();
        for &i in &active {
            if pivot_row[i].is_zero() {
                continue;
            }
            let factor = &pivot_row[i] / &p;
            for &j in &active {
                let v = &m[i][j] - &(&factor * &pivot_row[j]);
                m[i][j] = v;
            }
        }
        for &i in &active {
            m[i][k] = Scalar::zero();
            m[k][i] = Scalar::zero();
        }
    }
    (pos, neg, n - pos - neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::FieldKind;
    use crate::field::{ExactField, GaloisField};

    fn q() -> ExactField {
        ExactField(FieldKind::Rational)
    }

    fn s(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| Scalar::int(x)).collect())
            .collect()
    }

    #[test]
    fn inertia_examples() {
        assert_eq!(symmetric_inertia(&s(&[&[0, 1], &[1, 0]])), (1, 1, 0));
        assert_eq!(
            symmetric_inertia(&s(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]])),
            (1, 2, 0)
        );
        assert_eq!(symmetric_inertia(&s(&[&[3]])), (1, 0, 0));
        assert_eq!(symmetric_inertia(&s(&[&[1, 1], &[1, 1]])), (1, 0, 1));
        assert_eq!(symmetric_inertia(&s(&[&[0, 0], &[0, 0]])), (0, 0, 2));
    }

    #[test]
    fn solve_and_inverse() {
        let f = q();
        let a = Mat::from_rows(2, s(&[&[0, 1], &[1, 0]]));
        let x = solve(&f, &a, &[Scalar::int(1), Scalar::int(0)]).unwrap();
        assert_eq!(x, vec![Scalar::int(0), Scalar::int(1)]);
        let inv = inverse(&f, &a).unwrap();
        assert_eq!(mat_mul(&f, &a, &inv), Mat::identity(&f, 2));
        assert_eq!(det(&f, &a), Scalar::int(-1));
        let singular = Mat::from_rows(2, s(&[&[1, 2], &[2, 4]]));
        assert!(inverse(&f, &singular).is_none());
        assert_eq!(null_space(&f, &singular).len(), 1);
    }

    #[test]
    fn subspace_operations() {
        let f = q();
        let x = Subspace::span(&f, 3, &s(&[&[1, 0, 0], &[0, 1, 0]]));
        let y = Subspace::span(&f, 3, &s(&[&[0, 1, 0], &[0, 0, 1]]));
        assert_eq!(x.intersect(&f, &y), Subspace::span(&f, 3, &s(&[&[0, 5, 0]])));
        assert!(x.sum(&f, &y).is_full());
        let proj = Mat::from_rows(3, s(&[&[1, 0, 0]]));
        let pre = Subspace::preimage(&f, &proj, &Subspace::zero(1));
        assert_eq!(pre, Subspace::span(&f, 3, &s(&[&[0, 1, 0], &[0, 0, 1]])));
    }

    #[test]
    fn enumeration_counts_match_gaussian_binomials() {
        for (qq, n) in [(2u32, 3usize), (3, 2), (4, 2), (2, 4)] {
            let f = GaloisField::new(qq).unwrap();
            let all = all_subspaces(&f, n);
            assert_eq!(all.len() as u128, subspace_count(qq as u64, n));
            let mut seen = std::collections::HashSet::new();
            for sub in &all {
                assert!(seen.insert(sub.clone()));
                assert_eq!(&Subspace::span(&f, n, sub.basis()), sub);
            }
        }
        assert_eq!(gaussian_binomial(2, 4, 2), 35);
    }
}
