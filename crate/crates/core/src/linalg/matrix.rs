use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};

pub type Vector = Vec<FieldElem>;

/// Dense matrix over a finite field; vectors are columns and `g * v` is the
/// action on the natural module.
#[derive(Clone)]
pub struct Matrix {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && (Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field)
    }
}

impl Eq for Matrix {}

impl Hash for Matrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.data.hash(state);
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matrix {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.rows, self.cols, &self.data).cmp(&(other.rows, other.cols, &other.data))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|&x| self.field.format(x)).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn new(field: &Arc<Field>, rows: usize, cols: usize, data: Vec<FieldElem>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if let Some(bad) = data.iter().find(|x| x.index() >= field.order()) {
            return Err(Error::OutOfRange(format!("entry code {}", bad.index())));
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(field: &Arc<Field>, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> Self {
        Self::scalar(field, n, field.one())
    }

    pub fn scalar(field: &Arc<Field>, n: usize, lambda: FieldElem) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = lambda;
        }
        m
    }

    pub fn diag(field: &Arc<Field>, entries: &[FieldElem]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(field, n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    pub fn from_rows(field: &Arc<Field>, rows: &[Vector]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Matrix::new(field, r, c, data)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &Arc<Field>, n: usize, cols: &[Vector]) -> Result<Self> {
        let mut m = Matrix::zeros(field, n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: col.len(),
                });
            }
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: FieldElem) {
        self.data[i * self.cols + j] = x;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[FieldElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.data
    }

    pub fn same_field(&self, other: &Matrix) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let f = &*self.field;
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (l, &a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let orow = &other.data[l * other.cols..(l + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = f.add(*d, f.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Matrix, op: impl Fn(FieldElem, FieldElem) -> FieldElem) -> Result<Matrix> {
        if !self.same_field(other) {
            return Err(Error::FieldMismatch);
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| op(a, b)).collect();
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        let f = self.field.clone();
        self.zip_with(other, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, lambda: FieldElem) -> Matrix {
        let f = &self.field;
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f.mul(lambda, x)).collect(),
        }
    }

    /// `self - lambda * I` for a square matrix.
    pub fn shift(&self, lambda: FieldElem) -> Matrix {
        assert!(self.is_square(), "shift needs a square matrix");
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i);
            m.set(i, i, self.field.sub(v, lambda));
        }
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j));
            }
        }
        m
    }

    /// Entrywise field conjugation (identity on odd-degree fields).
    pub fn conj(&self) -> Matrix {
        let f = &self.field;
        Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f.conj_unchecked(x)).collect(),
        }
    }

    pub fn apply(&self, v: &[FieldElem]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length must match column count");
        let f = &*self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(FieldElem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { FieldElem::ONE } else { FieldElem::ZERO })
            })
    }

    /// Returns `Some(lambda)` when the matrix is `lambda * I`.
    pub fn as_scalar(&self) -> Option<FieldElem> {
        if !self.is_square() || self.rows == 0 {
            return None;
        }
        let l = self.get(0, 0);
        let ok = (0..self.rows)
            .all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { l } else { FieldElem::ZERO }));
        ok.then_some(l)
    }

    /// Row-reduces a copy; returns the reduced matrix and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&self.field, &mut m.data, m.rows, m.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        rref_in_place(&self.field, &mut data, self.rows, self.cols).len()
    }

    pub fn det(&self) -> Result<FieldElem> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let f = &*self.field;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = f.one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r * n + col].is_zero()) else {
                return Ok(f.zero());
            };
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                det = f.neg(det);
            }
            let p = a[col * n + col];
            det = f.mul(det, p);
            let pinv = f.inv(p)?;
            for r in col + 1..n {
                let factor = f.mul(a[r * n + col], pinv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = f.sub(a[r * n + j], f.mul(factor, a[col * n + j]));
                    a[r * n + j] = v;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let w = 2 * n;
        let mut aug = vec![FieldElem::ZERO; n * w];
        for i in 0..n {
            aug[i * w..i * w + n].copy_from_slice(self.row(i));
            aug[i * w + n + i] = FieldElem::ONE;
        }
        let pivots = rref_in_place(&self.field, &mut aug, n, w);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::DivisionByZero);
        }
        let mut inv = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            inv.data[i * n..(i + 1) * n].copy_from_slice(&aug[i * w + n..(i + 1) * w]);
        }
        Ok(inv)
    }

    /// Text format: header `p k rows cols`, then one line per row.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} {} {}\n",
            self.field.characteristic(),
            self.field.degree(),
            self.rows,
            self.cols
        );
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|&x| self.field.format(x)).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses [`Matrix::to_text`] output, building the field from the header.
    pub fn from_text(text: &str) -> Result<Matrix> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or(Error::Empty("matrix text"))?;
        let nums = header
            .split_whitespace()
            .map(|t| t.parse::<u64>().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let [p, k, rows, cols] = nums[..] else {
            return Err(Error::Parse(format!("header needs `p k n m`, got {header:?}")));
        };
        let field = Field::new(p, k as u32)?;
        Self::from_text_body(&field, rows as usize, cols as usize, lines)
    }

    /// Parses text in a known field, checking the header agrees.
    pub fn from_text_in(field: &Arc<Field>, text: &str) -> Result<Matrix> {
        let m = Self::from_text(text)?;
        if *m.field != **field {
            return Err(Error::FieldMismatch);
        }
        Ok(Matrix {
            field: field.clone(),
            ..m
        })
    }

    fn from_text_body<'a>(
        field: &Arc<Field>,
        rows: usize,
        cols: usize,
        lines: impl Iterator<Item = &'a str>,
    ) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows * cols);
        let mut seen = 0;
        for line in lines.take(rows) {
            let row = line
                .split_whitespace()
                .map(|t| field.parse(t))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row);
            seen += 1;
        }
        if seen != rows {
            return Err(Error::DimensionMismatch {
                expected: rows,
                got: seen,
            });
        }
        Matrix::new(field, rows, cols, data)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product of incompatible operands")
    }
}

/// Gauss-Jordan elimination on a row-major buffer; returns pivot columns.
pub(crate) fn rref_in_place(f: &Field, a: &mut [FieldElem], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            a[r * cols + j] = f.mul(a[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = f.sub(a[i * cols + j], f.mul(factor, a[r * cols + j]));
                a[i * cols + j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}
