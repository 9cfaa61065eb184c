//! Exact linear algebra over a [`Field`]: ranks, kernels, eigenspaces at
//! given scalars, block-diagonal assembly, and the minimum rank of `g - mu I`
//! over a set of scalar shifts.

mod matrix;
mod subspace;

pub use matrix::{Matrix, Vector};
pub use subspace::Subspace;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};

pub fn rank(m: &Matrix) -> usize {
    m.rank()
}

/// Right kernel `{v : M v = 0}`.
pub fn kernel(m: &Matrix) -> Subspace {
    let (r, pivots) = m.rref();
    let n = m.cols();
    let field = m.field();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let vectors: Vec<Vector> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![FieldElem::ZERO; n];
            v[fc] = FieldElem::ONE;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = field.neg(r.get(row, fc));
            }
            v
        })
        .collect();
    Subspace::span(field, n, &vectors).expect("kernel vectors have ambient length")
}

pub fn eigenspace(g: &Matrix, lambda: FieldElem) -> Result<Subspace> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            got: g.cols(),
        });
    }
    Ok(kernel(&g.shift(lambda)))
}

/// `min_{mu in shifts} rank(g - mu I)`, with the least minimising `mu`.
pub fn min_shift_rank(g: &Matrix, shifts: &[FieldElem]) -> Result<(FieldElem, usize)> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch {
            expected: g.rows(),
            got: g.cols(),
        });
    }
    let mut sorted = shifts.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut best: Option<(FieldElem, usize)> = None;
    for mu in sorted {
        let r = g.shift(mu).rank();
        if best.map_or(true, |(_, b)| r < b) {
            best = Some((mu, r));
            if r == 0 {
                break;
            }
        }
    }
    best.ok_or(Error::Empty("shift set"))
}

/// Block-diagonal matrix with the given square blocks.
pub fn block_embed(parts: &[Matrix]) -> Result<Matrix> {
    let first = parts.first().ok_or(Error::Empty("block list"))?;
    let field: Arc<Field> = first.field().clone();
    let mut n = 0;
    for p in parts {
        if !p.same_field(first) {
            return Err(Error::FieldMismatch);
        }
        if !p.is_square() {
            return Err(Error::DimensionMismatch {
                expected: p.rows(),
                got: p.cols(),
            });
        }
        n += p.rows();
    }
    let mut out = Matrix::zeros(&field, n, n);
    let mut off = 0;
    for p in parts {
        for i in 0..p.rows() {
            for j in 0..p.cols() {
                out.set(off + i, off + j, p.get(i, j));
            }
        }
        off += p.rows();
    }
    Ok(out)
}

/// The cyclic subgroup generated by a nonzero scalar, in increasing order.
pub fn cyclic_group(field: &Field, lambda: FieldElem) -> Result<Vec<FieldElem>> {
    let ord = field.mult_order(lambda)?;
    let mut out: Vec<FieldElem> = (0..ord as i64).map(|e| field.pow(lambda, e)).collect::<Result<_>>()?;
    out.sort();
    Ok(out)
}
