use std::fmt;
use std::sync::Arc;

use super::matrix::{rref_in_place, Matrix, Vector};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};

/// A subspace of `F^n` stored by its reduced row echelon basis, so equal
/// subspaces have equal representations.
#[derive(Clone)]
pub struct Subspace {
    field: Arc<Field>,
    n: usize,
    basis: Vec<Vector>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.basis == other.basis
    }
}

impl Eq for Subspace {}

impl std::hash::Hash for Subspace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.basis.hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) [", self.basis.len(), self.n)?;
        for v in &self.basis {
            let s: Vec<String> = v.iter().map(|&x| self.field.format(x)).collect();
            write!(f, " ({})", s.join(" "))?;
        }
        write!(f, " ]")
    }
}

impl Subspace {
    pub fn zero(field: &Arc<Field>, n: usize) -> Self {
        Subspace {
            field: field.clone(),
            n,
            basis: Vec::new(),
        }
    }

    pub fn full(field: &Arc<Field>, n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![FieldElem::ZERO; n];
                v[i] = FieldElem::ONE;
                v
            })
            .collect();
        Subspace {
            field: field.clone(),
            n,
            basis,
        }
    }

    pub fn span(field: &Arc<Field>, n: usize, vectors: &[Vector]) -> Result<Self> {
        let mut data = Vec::with_capacity(vectors.len() * n);
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
            data.extend_from_slice(v);
        }
        let rank = rref_in_place(field, &mut data, vectors.len(), n).len();
        let basis = data.chunks(n.max(1)).take(rank).map(|c| c.to_vec()).collect();
        Ok(Subspace {
            field: field.clone(),
            n,
            basis,
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Subspace::span(&self.field, self.n, &rows).map_or(false, |s| s.dim() == self.dim())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Subspace::span(&self.field, self.n, &rows).expect("same ambient dimension")
    }

    /// Annihilator under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(&self.field, self.n);
        }
        let m = Matrix::from_rows(&self.field, &self.basis).expect("rectangular basis");
        super::kernel(&m)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Image under a square matrix acting on columns.
    pub fn image(&self, g: &Matrix) -> Subspace {
        let vs: Vec<Vector> = self.basis.iter().map(|v| g.apply(v)).collect();
        Subspace::span(&self.field, self.n, &vs).expect("matrix matches ambient dimension")
    }

    /// Coordinates of `v` in an arbitrary (not necessarily echelon) basis.
    pub fn coordinates_in(field: &Arc<Field>, basis: &[Vector], v: &[FieldElem]) -> Option<Vector> {
        let n = v.len();
        let k = basis.len();
        // columns = basis vectors, augmented with v
        let w = k + 1;
        let mut a = vec![FieldElem::ZERO; n * w];
        for i in 0..n {
            for (j, b) in basis.iter().enumerate() {
                a[i * w + j] = b[i];
            }
            a[i * w + k] = v[i];
        }
        let pivots = rref_in_place(field, &mut a, n, w);
        if pivots.contains(&k) {
            return None;
        }
        let mut coords = vec![FieldElem::ZERO; k];
        for (r, &c) in pivots.iter().enumerate() {
            coords[c] = a[r * w + k];
        }
        Some(coords)
    }

    /// Every subspace of `F^n`, grouped by dimension, by walking echelon
    /// forms directly. Only sensible for tiny spaces (oracle use).
    pub fn enumerate_all(field: &Arc<Field>, n: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        for d in 0..=n {
            out.extend(Self::enumerate_dim(field, n, d));
        }
        out
    }

    pub fn enumerate_dim(field: &Arc<Field>, n: usize, d: usize) -> Vec<Subspace> {
        let mut out = Vec::new();
        let q = field.order() as u64;
        for pivots in combinations(n, d) {
            // free positions: in row r, columns c > pivots[r] that are not pivots
            let free: Vec<(usize, usize)> = (0..d)
                .flat_map(|r| {
                    let pv = pivots.clone();
                    (pivots[r] + 1..n).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
                })
                .collect();
            let total = q.pow(free.len() as u32);
            for code in 0..total {
                let mut basis = vec![vec![FieldElem::ZERO; n]; d];
                for (r, &p) in pivots.iter().enumerate() {
                    basis[r][p] = FieldElem::ONE;
                }
                let mut c = code;
                for &(r, col) in &free {
                    basis[r][col] = field.elem((c % q) as u32).expect("in range");
                    c /= q;
                }
                out.push(Subspace {
                    field: field.clone(),
                    n,
                    basis,
                });
            }
        }
        out
    }

    /// All vectors in the subspace (q^dim of them).
    pub fn vectors(&self) -> Vec<Vector> {
        let q = self.field.order() as u64;
        let d = self.dim();
        let total = q.pow(d as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![FieldElem::ZERO; self.n];
                for b in &self.basis {
                    let c = self.field.elem((code % q) as u32).expect("in range");
                    code /= q;
                    if c.is_zero() {
                        continue;
                    }
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = self.field.add(*x, self.field.mul(c, y));
                    }
                }
                v
            })
            .collect()
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_binomial_counts() {
        let f = Field::new(3, 1).unwrap();
        let counts: Vec<usize> = (0..=4).map(|d| Subspace::enumerate_dim(&f, 4, d).len()).collect();
        assert_eq!(counts, vec![1, 40, 130, 40, 1]);
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(Subspace::enumerate_all(&f2, 3).len(), 1 + 7 + 7 + 1);
    }

    #[test]
    fn intersection_and_sum() {
        let f = Field::new(5, 1).unwrap();
        let e = |i: usize| {
            let mut v = vec![f.zero(); 4];
            v[i] = f.one();
            v
        };
        let a = Subspace::span(&f, 4, &[e(0), e(1)]).unwrap();
        let b = Subspace::span(&f, 4, &[e(1), e(2)]).unwrap();
        assert_eq!(a.intersect(&b), Subspace::span(&f, 4, &[e(1)]).unwrap());
        assert_eq!(a.sum(&b).dim(), 3);
        assert!(a.contains(&e(0)));
        assert!(!a.contains(&e(3)));
    }

    #[test]
    fn coordinates_recover_combination() {
        let f = Field::new(7, 1).unwrap();
        let b = vec![
            vec![f.from_int(1), f.from_int(2), f.from_int(3)],
            vec![f.from_int(0), f.from_int(1), f.from_int(4)],
        ];
        let v: Vec<_> = (0..3)
            .map(|i| f.add(f.mul(f.from_int(3), b[0][i]), f.mul(f.from_int(5), b[1][i])))
            .collect();
        assert_eq!(
            Subspace::coordinates_in(&f, &b, &v).unwrap(),
            vec![f.from_int(3), f.from_int(5)]
        );
        assert!(Subspace::coordinates_in(&f, &b, &[f.one(), f.zero(), f.zero()]).is_none());
    }
}
