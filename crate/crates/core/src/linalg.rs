//! Dense matrices over an exact field.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Field;

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds the matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.data[i * cols.len() + j] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[F]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in entries.iter().enumerate() {
            m.data[i * n + i] = x.clone();
        }
        m
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

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&F) -> F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> Self {
        self.transpose().map(F::conj)
    }

    pub fn mul(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j].mul_acc(a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![F::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    o.mul_acc(a, x);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.zip_with(other, |a, b| a.clone() + b)
    }

    pub fn sub(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        self.zip_with(other, |a, b| a.clone() - b)
    }

    fn zip_with(&self, other: &Matrix<F>, f: impl Fn(&F, &F) -> F) -> Result<Matrix<F>> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape("matrix dimensions differ".into()));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: &F) -> Matrix<F> {
        self.map(|x| x.clone() * c)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        let cols = self.cols.max(other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let x = m.get(r, j).clone() * &inv;
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let t = m.get(r, j).clone();
                    if t.is_zero() {
                        continue;
                    }
                    let x = m.get(i, j).clone() - &(f.clone() * &t);
                    m.set(i, j, x);
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

    /// Basis of `{x : M x = 0}` in the standard rref parametrization: each
    /// basis vector has a 1 in one free column and 0 in the others.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    /// A basis of the column space, in reduced form (rows of the rref of
    /// the transpose).
    pub fn column_space(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.transpose().rref();
        (0..pivots.len()).map(|i| r.row(i)).collect()
    }

    /// Some solution of `M x = b`.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let mut aug = Self::zeros(self.rows, self.cols + 1);
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
        let mut x = vec![F::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Determinant and, when it is nonzero, an inverse verified on both
    /// sides.
    pub fn det_inverse(&self) -> Result<(F, Option<Matrix<F>>)> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "determinant of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a.get(i, c).is_zero()) else {
                return Ok((F::zero(), None));
            };
            if p != c {
                a.swap_rows(p, c);
                inv.swap_rows(p, c);
                det = -det;
            }
            let piv = a.get(c, c).clone();
            det = det * &piv;
            let pinv = piv.inv().ok_or(Error::DivisionByZero)?;
            for j in 0..n {
                let x = a.get(c, j).clone() * &pinv;
                a.set(c, j, x);
                let y = inv.get(c, j).clone() * &pinv;
                inv.set(c, j, y);
            }
            for i in 0..n {
                if i == c {
                    continue;
                }
                let f = a.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let t = a.get(c, j).clone();
                    if !t.is_zero() {
                        let x = a.get(i, j).clone() - &(f.clone() * &t);
                        a.set(i, j, x);
                    }
                    let u = inv.get(c, j).clone();
                    if !u.is_zero() {
                        let y = inv.get(i, j).clone() - &(f.clone() * &u);
                        inv.set(i, j, y);
                    }
                }
            }
        }
        if !self.mul(&inv)?.is_identity() || !inv.mul(self)?.is_identity() {
            return Err(Error::Verification("computed inverse failed M·M⁻¹ = I".into()));
        }
        Ok((det, Some(inv)))
    }

    pub fn det(&self) -> Result<F> {
        Ok(self.det_inverse()?.0)
    }

    pub fn inverse(&self) -> Result<Option<Matrix<F>>> {
        Ok(self.det_inverse()?.1)
    }
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

// Small vector helpers shared by the algebra modules.

pub fn vec_add<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y).collect()
}

pub fn vec_sub<F: Field>(a: &[F], b: &[F]) -> Vec<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y).collect()
}

pub fn vec_scale<F: Field>(a: &[F], c: &F) -> Vec<F> {
    a.iter().map(|x| x.clone() * c).collect()
}

pub fn vec_is_zero<F: Field>(a: &[F]) -> bool {
    a.iter().all(F::is_zero)
}

pub fn unit_vector<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// Coordinates of `v` with respect to linearly independent `basis`
/// vectors, or `None` when `v` is outside their span.
pub fn coordinates_in<F: Field>(basis: &[Vec<F>], v: &[F]) -> Option<Vec<F>> {
    if basis.is_empty() {
        return vec_is_zero(v).then(Vec::new);
    }
    Matrix::from_columns(v.len(), basis).solve(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::scalar::Cyclo;

    fn c(k: i64) -> Cyclo {
        Cyclo::from_int(k)
    }

    #[test]
    fn identity_det_and_inverse() {
        let id = Matrix::<Cyclo>::identity(3);
        let (d, inv) = id.det_inverse().unwrap();
        assert_eq!(d, c(1));
        assert_eq!(inv.unwrap(), id);
    }

    #[test]
    fn diag_of_i_and_minus_i_has_det_one() {
        let i = Cyclo::zeta_pow(4, 1);
        let m = Matrix::diagonal(&[i.clone(), -i]);
        assert_eq!(m.det().unwrap(), c(1));
    }

    #[test]
    fn rank_one_matrix_is_singular() {
        let m = Matrix::from_rows(vec![vec![c(1), c(1)], vec![c(1), c(1)]]).unwrap();
        let (d, inv) = m.det_inverse().unwrap();
        assert!(d.is_zero());
        assert!(inv.is_none());
        assert_eq!(m.nullspace(), vec![vec![c(-1), c(1)]]);
    }

    #[test]
    fn non_square_is_rejected() {
        let m = Matrix::<Cyclo>::zeros(2, 3);
        assert!(matches!(m.det_inverse(), Err(Error::Shape(_))));
    }

    #[test]
    fn solve_and_coordinates() {
        let m = Matrix::from_rows(vec![vec![c(2), c(0)], vec![c(1), c(1)]]).unwrap();
        let x = m.solve(&[c(4), c(5)]).unwrap();
        assert_eq!(x, vec![c(2), c(3)]);
        let basis = vec![vec![c(1), c(1), c(0)], vec![c(0), c(1), c(1)]];
        assert_eq!(coordinates_in(&basis, &[c(1), c(3), c(2)]), Some(vec![c(1), c(2)]));
        assert_eq!(coordinates_in(&basis, &[c(1), c(0), c(0)]), None);
    }
}
