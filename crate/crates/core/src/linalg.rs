//! Dense exact linear algebra over [`FieldElement`]s.

use crate::error::{Error, Result};
use crate::valued_field::FieldElement;

pub type Vector = Vec<FieldElement>;

pub fn zero_vector(n: usize) -> Vector {
    vec![FieldElement::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> Vector {
    let mut v = zero_vector(n);
    v[i] = FieldElement::one();
    v
}

pub fn is_zero_vector(v: &[FieldElement]) -> bool {
    v.iter().all(FieldElement::is_zero)
}

pub fn dot(a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(FieldElement::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[FieldElement], b: &[FieldElement]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &FieldElement, v: &[FieldElement]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

/// `target -= c·v`, skipping zero entries.
pub fn axpy_neg(target: &mut [FieldElement], c: &FieldElement, v: &[FieldElement]) {
    if c.is_zero() {
        return;
    }
    for (t, x) in target.iter_mut().zip(v) {
        if !x.is_zero() {
            *t = &*t - &(c * x);
        }
    }
}

/// `Σ coeffs[i]·vectors[i]` in a space of dimension `dim`.
pub fn combine(coeffs: &[FieldElement], vectors: &[Vector], dim: usize) -> Vector {
    let mut out = zero_vector(dim);
    for (c, v) in coeffs.iter().zip(vectors) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            if !x.is_zero() {
                *o = &*o + &(c * x);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElement::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vector], rows: usize) -> Result<Self> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: FieldElement) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if other.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let cols = other.columns();
        let mut out = Matrix::zeros(self.rows, other.cols);
        for (j, c) in cols.iter().enumerate() {
            for i in 0..self.rows {
                out.set(i, j, dot(self.row(i), c));
            }
        }
        Ok(out)
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, found: self.cols });
        }
        let n = self.rows;
        let mut a = self.row_vectors();
        let mut inv = Matrix::identity(n).row_vectors();
        for col in 0..n {
            let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularBasis)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].inverse().expect("nonzero pivot");
            a[col] = scale(&p, &a[col]);
            inv[col] = scale(&p, &inv[col]);
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                let (pa, pi) = (a[col].clone(), inv[col].clone());
                axpy_neg(&mut a[r], &f, &pa);
                axpy_neg(&mut inv[r], &f, &pi);
            }
        }
        Matrix::from_rows(inv, n)
    }

    pub fn rank(&self) -> usize {
        rref(self.row_vectors(), self.cols).1.len()
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = rref(self.row_vectors(), self.cols);
        let mut out = Vec::new();
        let mut is_pivot = vec![None; self.cols];
        for (row, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(row);
        }
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut v = unit_vector(self.cols, free);
            for (row, &c) in pivots.iter().enumerate() {
                v[c] = -&r[row][free];
            }
            out.push(v);
        }
        out
    }

    /// Some solution of `A x = b`, or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Option<Vector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: b.len() });
        }
        let aug: Vec<Vector> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let (r, pivots) = rref(aug, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = zero_vector(self.cols);
        for (row, &c) in pivots.iter().enumerate() {
            x[c] = r[row][self.cols].clone();
        }
        Ok(Some(x))
    }
}

/// Reduced row echelon form; returns the reduced rows and the pivot columns.
pub fn rref(mut a: Vec<Vector>, cols: usize) -> (Vec<Vector>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(piv) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, piv);
        let p = a[row][col].inverse().expect("nonzero pivot");
        a[row] = scale(&p, &a[row]);
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pr = a[row].clone();
                axpy_neg(&mut a[r], &f, &pr);
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

pub fn rank_of(vectors: &[Vector], dim: usize) -> usize {
    rref(vectors.to_vec(), dim).1.len()
}

/// Indices of a maximal independent subfamily, chosen greedily in order.
pub fn independent_subset(vectors: &[Vector], dim: usize) -> Vec<usize> {
    let mut rows: Vec<(Vector, usize)> = Vec::new();
    let mut idx = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        debug_assert_eq!(v.len(), dim);
        let mut r = v.clone();
        for (row, piv) in &rows {
            if !r[*piv].is_zero() {
                let f = &r[*piv] / &row[*piv];
                axpy_neg(&mut r, &f, row);
            }
        }
        if let Some(piv) = r.iter().position(|x| !x.is_zero()) {
            rows.push((r, piv));
            idx.push(i);
        }
    }
    idx
}

/// Standard basis vectors completing an independent family to a basis,
/// chosen greedily by index.
///
/// `e_i` is taken exactly when its image modulo the family is independent of
/// the images of `e_0, …, e_{i-1}`; reading images through the annihilator
/// of the family, these are the pivot columns of its row echelon form.
pub fn complete_with_units(vectors: &[Vector], dim: usize) -> Vec<Vector> {
    let annihilator = if vectors.is_empty() {
        Matrix::identity(dim).row_vectors()
    } else {
        Matrix::from_rows(vectors.to_vec(), dim).expect("vectors of length dim").kernel()
    };
    rref(annihilator, dim).1.into_iter().map(|i| unit_vector(dim, i)).collect()
}
