//! Dense exact linear algebra: row reduction, kernels, linear solves and
//! subspace lattice operations.
//!
//! Pivoting is deterministic (first nonzero entry scanning columns left to
//! right, rows top to bottom), so the reduced row echelon form of a matrix
//! is a function of the matrix alone and two [`Subspace`]s are equal exactly
//! when their stored bases are.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Scalar::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Self> {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        Matrix::from_rows(rows, cols).expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = &o[(k, c)];
                    if !b.is_zero() {
                        let p = a * b;
                        out[(r, c)] += &p;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect())
    }

    /// Stacks `o` below `self`.
    pub fn vstack(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.cols && self.rows > 0 && o.rows > 0 {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { o.cols };
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + o.rows,
            cols,
            data,
        })
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Scalar::one();
        }
        let red = rref(&aug);
        if red.pivots.len() < n || red.pivots[n - 1] >= n {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = red.matrix[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    /// Determinant by fraction-free elimination over the field.
    pub fn det(&self) -> Option<Scalar> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Some(Scalar::zero());
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = &det * &piv;
            let inv = piv.inv().unwrap();
            for r in c + 1..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = &m[(r, c)] * &inv;
                for k in c..n {
                    let t = &f * &m[(c, k)];
                    m[(r, k)] -= &t;
                }
            }
        }
        Some(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|s| s.to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += &(x * y);
        }
    }
    acc
}

/// Result of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    /// Reduced row echelon form, same shape as the input; zero rows last.
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form with first-nonzero pivoting.
pub fn rref(m: &Matrix) -> Rref {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(p, row);
        let inv = a[(row, col)].inv().unwrap();
        for c in col..a.cols {
            if !a[(row, c)].is_zero() {
                a[(row, c)] = &a[(row, c)] * &inv;
            }
        }
        for r in 0..a.rows {
            if r == row || a[(r, col)].is_zero() {
                continue;
            }
            let f = a[(r, col)].clone();
            for c in col..a.cols {
                if !a[(row, c)].is_zero() {
                    let t = &f * &a[(row, c)];
                    a[(r, c)] -= &t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref {
        matrix: a,
        rank: row,
        pivots,
    }
}

/// Null space `{v : m v = 0}`.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let red = rref(m);
    let n = m.cols;
    let free: Vec<usize> = (0..n).filter(|c| !red.pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![Scalar::zero(); n];
        v[f] = Scalar::one();
        for (r, &p) in red.pivots.iter().enumerate() {
            v[p] = -&red.matrix[(r, f)];
        }
        basis.push(v);
    }
    Subspace::span(n, basis).expect("kernel vectors have ambient length")
}

/// Outcome of [`solve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// A solution with every free variable set to zero.
    Unique(Vec<Scalar>),
    NoSolution,
}

/// Solves `m x = rhs`; free variables are set to zero.
pub fn solve(m: &Matrix, rhs: &[Scalar]) -> Result<Solution> {
    if rhs.len() != m.rows {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for {} rows",
            rhs.len(),
            m.rows
        )));
    }
    let mut aug = Matrix::zeros(m.rows, m.cols + 1);
    for r in 0..m.rows {
        for c in 0..m.cols {
            aug[(r, c)] = m[(r, c)].clone();
        }
        aug[(r, m.cols)] = rhs[r].clone();
    }
    let red = rref(&aug);
    if red.pivots.last() == Some(&m.cols) {
        return Ok(Solution::NoSolution);
    }
    let mut x = vec![Scalar::zero(); m.cols];
    for (r, &p) in red.pivots.iter().enumerate() {
        x[p] = red.matrix[(r, m.cols)].clone();
    }
    Ok(Solution::Unique(x))
}

/// A linear subspace of `K^ambient`, stored by its RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::zeros(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Matrix::identity(ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors.
    pub fn span(ambient: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        let m = Matrix::from_rows(vectors, ambient)?;
        Ok(Subspace::from_rref(ambient, rref(&m)))
    }

    fn from_rref(ambient: usize, red: Rref) -> Self {
        let rows: Vec<Vec<Scalar>> = (0..red.rank).map(|r| red.matrix.row(r).to_vec()).collect();
        Subspace {
            ambient,
            basis: Matrix::from_rows(rows, ambient).unwrap(),
            pivots: red.pivots,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Scalar>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, o: &Subspace) -> Result<()> {
        if self.ambient != o.ambient {
            return Err(Error::Dimension(format!(
                "ambient dimensions {} and {} differ",
                self.ambient, o.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        let m = self.basis.vstack(&o.basis)?;
        Ok(Subspace::from_rref(self.ambient, rref(&m)))
    }

    /// Annihilator in the dual space, identified with `K^ambient` through the
    /// standard bilinear pairing.
    pub fn annihilator(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient);
        }
        kernel_basis(&self.basis)
    }

    pub fn intersection(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        let ann = self.annihilator().sum(&o.annihilator())?;
        if ann.dim() == 0 {
            return Ok(Subspace::full(self.ambient));
        }
        Ok(kernel_basis(&ann.basis))
    }

    pub fn contains(&self, v: &[Scalar]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::Dimension("vector length differs from ambient".into()));
        }
        Ok(self.coordinates(v).is_some())
    }

    pub fn contains_subspace(&self, o: &Subspace) -> Result<bool> {
        self.check(o)?;
        Ok(self.sum(o)?.dim() == self.dim())
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let coords: Vec<Scalar> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (k, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (x, b) in rest.iter_mut().zip(self.basis.row(k)) {
                if !b.is_zero() {
                    *x -= &(c * b);
                }
            }
        }
        rest.iter().all(Scalar::is_zero).then_some(coords)
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(ambient={}, basis={:?})", self.ambient, self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Scalar> {
        xs.iter().map(|&x| Scalar::from_int(x)).collect()
    }

    #[test]
    fn rref_examples() {
        let r = rref(&Matrix::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        let id = Matrix::identity(3);
        let r = rref(&id);
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);
        let i = Scalar::i();
        let m = Matrix::from_rows(
            vec![vec![Scalar::one(), i.clone()], vec![i, Scalar::from_int(-1)]],
            2,
        )
        .unwrap();
        assert_eq!(rref(&m).rank, 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&Matrix::zeros(2, 3)).dim(), 3);
        assert_eq!(kernel_basis(&Matrix::identity(4)).dim(), 0);
        let k = kernel_basis(&Matrix::from_ints(&[&[1, 1, 0]]));
        assert_eq!(k.dim(), 2);
        assert!(k.contains(&v(&[1, -1, 0])).unwrap());
    }

    #[test]
    fn solve_examples() {
        let m = Matrix::from_ints(&[&[1, 1]]);
        assert_eq!(solve(&m, &v(&[2])).unwrap(), Solution::Unique(v(&[2, 0])));
        let m = Matrix::from_ints(&[&[1], &[1]]);
        assert_eq!(solve(&m, &v(&[0, 1])).unwrap(), Solution::NoSolution);
        let m = Matrix::from_ints(&[&[2]]);
        assert_eq!(
            solve(&m, &v(&[3])).unwrap(),
            Solution::Unique(vec![Scalar::ratio(3, 2)])
        );
        assert!(matches!(solve(&m, &v(&[1, 2])), Err(Error::Dimension(_))));
    }

    #[test]
    fn subspace_examples() {
        let a = Subspace::span(3, vec![v(&[1, 1, 0])]).unwrap();
        assert_eq!(a.intersection(&a).unwrap(), a);
        let x = Subspace::span(2, vec![v(&[1, 0])]).unwrap();
        let y = Subspace::span(2, vec![v(&[0, 1])]).unwrap();
        assert_eq!(x.sum(&y).unwrap(), Subspace::full(2));
        let b = Subspace::span(3, vec![v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        assert_eq!(a.intersection(&b).unwrap(), a);
        assert!(a.sum(&Subspace::zero(2)).is_err());
    }

    #[test]
    fn inverse_and_det() {
        let m = Matrix::from_ints(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(m.det().unwrap(), Scalar::one());
        assert!(Matrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
