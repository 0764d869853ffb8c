//! Dense exact linear algebra over ℚ and over the scalar fields.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::rational::Rational;
use crate::scalars::Scalar;

/// Exact field elements usable as matrix entries.
///
/// Elements of [`Scalar`] carry their field, so constants are produced from
/// an existing element rather than from nothing.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn try_recip(&self) -> Option<Self>;
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn try_recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Coeff for Scalar {
    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn one_like(&self) -> Self {
        self.field().one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn try_recip(&self) -> Option<Self> {
        self.inv().ok()
    }
}

/// Row-major dense matrix. The stored `zero` lets empty matrices still
/// produce constants.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    zero: T,
}

impl<T: Coeff> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i)))
            .finish()
    }
}

impl<T: Coeff> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize, zero: &T) -> Self {
        let zero = zero.zero_like();
        Matrix { rows, cols, data: vec![zero.clone(); rows * cols], zero }
    }

    pub fn identity(n: usize, sample: &T) -> Self {
        let mut m = Self::zeros(n, n, sample);
        for i in 0..n {
            m.data[i * n + i] = sample.one_like();
        }
        m
    }

    /// Builds from rows; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize, zero: &T) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix { rows: r, cols, data, zero: zero.zero_like() }
    }

    /// A column vector.
    pub fn column(v: Vec<T>, zero: &T) -> Self {
        let n = v.len();
        Matrix { rows: n, cols: 1, data: v, zero: zero.zero_like() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn zero_elem(&self) -> &T {
        &self.zero
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
            zero: self.zero.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Coeff::is_zero_elem)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows, &self.zero);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols, &self.zero);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_elem() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero_elem() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] = out.data[idx].plus(&a.times(b));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.plus(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data, zero: self.zero.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.minus(b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data, zero: self.zero.clone() }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.times(c))
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.zero.clone(), |acc, (a, b)| acc.plus(&a.times(b)))
            })
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(self.zero.clone(), |acc, i| acc.plus(self.get(i, i)))
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero_elem()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).try_recip().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero_elem() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j).minus(&f.times(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{v : M v = 0}`, one vector per free column, in column order.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![self.zero.clone(); self.cols];
                v[f] = self.zero.one_like();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(i, f).negated();
                }
                v
            })
            .collect()
    }

    /// The nonzero rows of the reduced row-echelon form.
    pub fn row_space_basis(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut aug = Self::zeros(n, 2 * n, &self.zero);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, self.zero.one_like());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(n, n, &self.zero);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Some solution of `M x = b`, if any.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1, &self.zero);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.zero.clone(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn determinant(&self) -> T {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = self.zero.one_like();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero_elem()) else {
                return self.zero.clone();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.negated();
            }
            let pv = m.get(c, c).clone();
            det = det.times(&pv);
            let inv = pv.try_recip().expect("nonzero pivot");
            for i in c + 1..n {
                if m.get(i, c).is_zero_elem() {
                    continue;
                }
                let f = m.get(i, c).times(&inv);
                for j in c..n {
                    let v = m.get(i, j).minus(&f.times(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// `Some(c)` when the matrix equals `c · I`.
    pub fn scalar_multiple_of_identity(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(self.zero.one_like());
        }
        let c = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want = if i == j { &c } else { &self.zero };
                if self.get(i, j) != want {
                    return None;
                }
            }
        }
        Some(c)
    }

    /// The unique `c` with `self = c · other`, when `other ≠ 0` and such a `c` exists.
    pub fn ratio_to(&self, other: &Self) -> Option<T> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        let k = other.data.iter().position(|x| !x.is_zero_elem())?;
        let c = self.data[k].times(&other.data[k].try_recip()?);
        if &other.scale(&c) == self {
            Some(c)
        } else {
            None
        }
    }

    /// Block-places `block` with its top-left corner at `(r, c)`.
    pub fn set_block(&mut self, r: usize, c: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r: usize, c: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols, &self.zero);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r + i, c + j).clone());
            }
        }
        out
    }
}

impl Matrix<Scalar> {
    /// Entrywise conjugate transpose.
    pub fn conj_transpose(&self) -> Self {
        self.transpose().map(Scalar::conj)
    }
}

/// Dot product of equal-length vectors.
pub fn dot<T: Coeff>(a: &[T], b: &[T], zero: &T) -> T {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(zero.zero_like(), |acc, (x, y)| acc.plus(&x.times(y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::scalars::Field;

    fn q(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        let cols = rows[0].len();
        Matrix::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect(),
            cols,
            &int(0),
        )
    }

    #[test]
    fn kernel_and_rank() {
        let m = q(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        assert_eq!(m.rank(), 1);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_and_determinant() {
        let m = q(vec![vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2, &int(1)));
        assert_eq!(m.determinant(), int(1));
        let s = q(vec![vec![1, 2], vec![2, 4]]);
        assert!(s.inverse().is_none());
        assert_eq!(s.determinant(), int(0));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = q(vec![vec![1, 1], vec![1, -1]]);
        assert_eq!(m.solve(&[int(3), int(1)]).unwrap(), vec![int(2), int(1)]);
        let s = q(vec![vec![1, 1], vec![2, 2]]);
        assert!(s.solve(&[int(1), int(3)]).is_none());
    }

    #[test]
    fn scalar_identity_detection() {
        let m = Matrix::identity(3, &int(1)).scale(&rat(1, 2));
        assert_eq!(m.scalar_multiple_of_identity(), Some(rat(1, 2)));
        assert_eq!(q(vec![vec![1, 1], vec![0, 1]]).scalar_multiple_of_identity(), None);
        let a = q(vec![vec![2, 4], vec![0, 6]]);
        let b = q(vec![vec![1, 2], vec![0, 3]]);
        assert_eq!(a.ratio_to(&b), Some(int(2)));
        assert_eq!(b.ratio_to(&q(vec![vec![1, 0], vec![0, 3]])), None);
    }

    #[test]
    fn scalar_matrices() {
        let f = Field::new(4, None).unwrap();
        let i = f.zeta();
        let m = Matrix::from_rows(
            vec![vec![f.zero(), i.clone()], vec![i.clone(), f.zero()]],
            2,
            &f.zero(),
        );
        let sq = m.mul(&m);
        assert_eq!(sq.scalar_multiple_of_identity(), Some(f.int(-1)));
        assert_eq!(m.conj_transpose().get(0, 1), &-&i);
        assert_eq!(m.inverse().unwrap().mul(&m), Matrix::identity(2, &f.one()));
    }
}
