//! Classical groups given by their natural module: membership, the spinor
//! norm and Dickson invariant, quasiscalars and the geometric witnesses,
//! plus enumeration of small groups into [`GroupTable`]s.

mod descriptor;
mod swap;
mod table;

pub use descriptor::{Family, GroupDescriptor};
pub use swap::SwapWitness;
pub use table::{Backend, GroupTable, DEFAULT_CAP};

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::{FormKind, FormSpace};
use crate::gf::{Field, FieldElem};
use crate::linalg::{Matrix, Subspace, Vector};

/// A classical group together with its standard form space. Cheap to query
/// repeatedly; construct once per descriptor.
#[derive(Debug, Clone)]
pub struct ClassicalGroup {
    desc: GroupDescriptor,
    space: FormSpace,
}

impl ClassicalGroup {
    pub fn new(desc: &GroupDescriptor) -> Result<Self> {
        if !desc.is_classical() {
            return Err(Error::WrongFamily(desc.to_string()));
        }
        Ok(ClassicalGroup {
            desc: desc.clone(),
            space: FormSpace::standard(desc)?,
        })
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.desc
    }

    pub fn space(&self) -> &FormSpace {
        &self.space
    }

    pub fn field(&self) -> &Arc<Field> {
        self.space.field()
    }

    pub fn dim(&self) -> usize {
        self.desc.n
    }

    fn check_shape(&self, g: &Matrix) -> Result<()> {
        if g.rows() != self.dim() || g.cols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: if g.rows() != self.dim() { g.rows() } else { g.cols() },
            });
        }
        if **g.field() != **self.field() {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Determinant one, form preserved, and the orthogonal invariant trivial.
    pub fn contains(&self, g: &Matrix) -> Result<bool> {
        self.check_shape(g)?;
        if !self.space.preserves(g) || g.det()? != FieldElem::ONE {
            return Ok(false);
        }
        if !self.desc.is_orthogonal() {
            return Ok(true);
        }
        let bit = if self.desc.char_two() {
            self.dickson_invariant(g)?
        } else {
            self.spinor_norm(g)?
        };
        Ok(bit == 0)
    }

    fn require_orthogonal(&self, char_two: bool) -> Result<()> {
        if !self.desc.is_orthogonal() || self.desc.char_two() != char_two {
            let what = if char_two { "Dickson invariant" } else { "spinor norm" };
            return Err(Error::WrongFamily(format!("{what} on {}", self.desc)));
        }
        Ok(())
    }

    /// Rank of `g - 1` mod 2, for `g` preserving `Q` (q even).
    pub fn dickson_invariant(&self, g: &Matrix) -> Result<u8> {
        self.require_orthogonal(true)?;
        self.check_shape(g)?;
        if !self.space.preserves(g) {
            return Err(Error::NotMember(format!("O({}) (Q not preserved)", self.desc)));
        }
        Ok((g.shift(FieldElem::ONE).rank() % 2) as u8)
    }

    /// Square class (0 trivial) of the spinor norm of `g` in `SO`, q odd.
    ///
    /// Factors `g` into reflections: while `g != 1`, pick `v` with
    /// `w = (g - 1) v` non-isotropic, so that `r_w g` fixes `v` and everything
    /// `g` fixed. When the image of `g - 1` is totally isotropic we first
    /// multiply by some reflection. Each reflection `r_w` contributes the
    /// class of `f(w, w)`.
    pub fn spinor_norm(&self, g: &Matrix) -> Result<u8> {
        self.require_orthogonal(false)?;
        self.check_shape(g)?;
        if !self.space.preserves(g) || g.det()? != FieldElem::ONE {
            return Err(Error::NotMember(format!("SO({})", self.desc)));
        }
        let f = &**self.field();
        let n = self.dim();
        let candidates = self.probe_vectors();
        let mut h = g.clone();
        let mut bit = 0u8;
        for _ in 0..4 * n + 8 {
            if h.is_identity() {
                return Ok(bit);
            }
            let d = h.shift(FieldElem::ONE);
            let mut fallback = None;
            let mut chosen = None;
            for v in &candidates {
                let w = d.apply(v);
                let fw = self.space.f(&w, &w);
                if fw.is_zero() {
                    continue;
                }
                let next = &self.space.reflection(&w)? * &h;
                if next.is_identity() || !self.image_totally_isotropic(&next) {
                    chosen = Some((next, fw));
                    break;
                }
                fallback.get_or_insert((next, fw));
            }
            let (next, fw) = match chosen.or(fallback) {
                Some(x) => x,
                None => {
                    // image of h - 1 is totally isotropic
                    let mut pick = None;
                    for u in &candidates {
                        let fu = self.space.f(u, u);
                        if fu.is_zero() {
                            continue;
                        }
                        let next = &self.space.reflection(u)? * &h;
                        if !self.image_totally_isotropic(&next) {
                            pick = Some((next, fu));
                            break;
                        }
                    }
                    pick.ok_or_else(|| Error::Internal("no reflection escapes isotropic image".into()))?
                }
            };
            bit ^= f.square_class(fw)?;
            h = next;
        }
        Err(Error::Internal("reflection factorisation did not terminate".into()))
    }

    /// `e_i`, then `e_i + t e_j` for `i < j` and every nonzero `t`.
    fn probe_vectors(&self) -> Vec<Vector> {
        let n = self.dim();
        let f = self.field();
        let unit = |i: usize| {
            let mut v = vec![FieldElem::ZERO; n];
            v[i] = FieldElem::ONE;
            v
        };
        let mut out: Vec<Vector> = (0..n).map(unit).collect();
        for i in 0..n {
            for j in i + 1..n {
                for t in f.nonzero_elements() {
                    let mut v = unit(i);
                    v[j] = t;
                    out.push(v);
                }
            }
        }
        out
    }

    fn image_totally_isotropic(&self, h: &Matrix) -> bool {
        let d = h.shift(FieldElem::ONE);
        let cols: Vec<Vector> = (0..self.dim()).map(|j| d.column(j)).collect();
        let img = Subspace::span(self.field(), self.dim(), &cols).expect("square");
        let b = img.basis();
        b.iter().all(|x| b.iter().all(|y| self.space.f(x, y).is_zero()))
    }

    /// The quasiscalar group `S(H)` in increasing order.
    pub fn quasiscalars(&self) -> Vec<FieldElem> {
        let f = &**self.field();
        let mut out: Vec<FieldElem> = match self.desc.family {
            Family::SL => f.nonzero_elements().collect(),
            Family::SU => {
                let q = self.desc.q as i64;
                f.nonzero_elements()
                    .filter(|&x| f.pow(x, q + 1).map_or(false, |y| y == FieldElem::ONE))
                    .collect()
            }
            _ => vec![f.one(), f.neg(f.one())],
        };
        out.sort();
        out.dedup();
        out
    }

    /// A diagonal member of `H` with at least `n - 2` diagonal entries equal
    /// to `lambda`, in the standard basis of [`FormSpace::standard`] (which is
    /// orthonormal, or diagonal `(1, .., 1, delta)`, as the construction needs).
    pub fn quasiscalar_witness(&self, lambda: FieldElem) -> Result<Matrix> {
        if !self.quasiscalars().contains(&lambda) {
            return Err(Error::NotMember(format!("S({})", self.desc)));
        }
        let f = &**self.field();
        let n = self.dim();
        let field = self.field();
        let h = if lambda == FieldElem::ONE {
            Matrix::identity(field, n)
        } else {
            match self.desc.family {
                Family::SL | Family::SU => {
                    let mut d = vec![lambda; n];
                    d[n - 1] = f.pow(lambda, -(n as i64 - 1))?;
                    Matrix::diag(field, &d)
                }
                Family::Sp => Matrix::scalar(field, n, lambda),
                Family::OmegaOdd => {
                    let mut d = vec![lambda; n];
                    d[n - 1] = f.one();
                    Matrix::diag(field, &d)
                }
                Family::OmegaPlus | Family::OmegaMinus => {
                    let mut d = vec![lambda; n];
                    d[n - 2] = f.one();
                    d[n - 1] = f.one();
                    Matrix::diag(field, &d)
                }
                Family::Alt => unreachable!("rejected in new"),
            }
        };
        if !self.contains(&h)? {
            return Err(Error::Internal(format!("quasiscalar witness not in {}", self.desc)));
        }
        Ok(h)
    }

    /// The unique nonzero scalar `lambda` with `rk(g - lambda) / n < 1/4`.
    pub fn projective_scalar(&self, g: &Matrix) -> Result<Option<FieldElem>> {
        self.check_shape(g)?;
        let n = self.dim();
        let hits: Vec<FieldElem> = self
            .field()
            .nonzero_elements()
            .filter(|&l| 4 * g.shift(l).rank() < n)
            .collect();
        match hits.as_slice() {
            [] => Ok(None),
            [l] => Ok(Some(*l)),
            _ => Err(Error::Internal("several scalars within rank distance 1/4".into())),
        }
    }

    /// A random generator of `H` from the fixed families: elementary or
    /// form transvections for SL, Sp, SU; `r_u r_v` with matching square
    /// classes (q odd) or any `r_u r_v` (q even) for orthogonal groups.
    pub fn random_generator<R: Rng>(&self, rng: &mut R) -> Matrix {
        let f = &**self.field();
        let field = self.field();
        let n = self.dim();
        let nonzero = |rng: &mut R| loop {
            let x = f.elem(rng.gen_range(1..f.order())).expect("in range");
            if !x.is_zero() {
                break x;
            }
        };
        match self.desc.family {
            Family::SL => {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                let mut m = Matrix::identity(field, n);
                m.set(i, j, nonzero(rng));
                m
            }
            Family::Sp => {
                let v = self.random_vector(rng, |_| true);
                self.space.transvection(&v, nonzero(rng)).expect("alternating")
            }
            Family::SU => {
                let v = self.random_vector(rng, |v| self.space.f(v, v).is_zero());
                let trace_zero: Vec<FieldElem> = f
                    .nonzero_elements()
                    .filter(|&a| f.add(a, f.conj_unchecked(a)).is_zero())
                    .collect();
                let a = trace_zero[rng.gen_range(0..trace_zero.len())];
                self.space.transvection(&v, a).expect("isotropic vector")
            }
            Family::OmegaOdd | Family::OmegaPlus | Family::OmegaMinus => {
                let u = self.random_vector(rng, |v| !self.space.norm(v).is_zero());
                let v = if self.desc.char_two() {
                    self.random_vector(rng, |v| !self.space.norm(v).is_zero())
                } else {
                    let class = f.square_class(self.space.norm(&u)).expect("odd q");
                    self.random_vector(rng, |v| {
                        let nv = self.space.norm(v);
                        !nv.is_zero() && f.square_class(nv).expect("odd q") == class
                    })
                };
                &self.space.reflection(&u).expect("non-singular") * &self.space.reflection(&v).expect("non-singular")
            }
            Family::Alt => unreachable!("rejected in new"),
        }
    }

    /// A random element of the full group `SO` (q odd) or `GO` (q even):
    /// `r_u r_v` for arbitrary non-singular `u, v`, or a single `r_u`.
    pub fn random_full_generator<R: Rng>(&self, rng: &mut R) -> Result<Matrix> {
        if !self.desc.is_orthogonal() {
            return Err(Error::WrongFamily(format!("full orthogonal group of {}", self.desc)));
        }
        let u = self.random_vector(rng, |v| !self.space.norm(v).is_zero());
        let ru = self.space.reflection(&u)?;
        if self.desc.char_two() {
            return Ok(ru);
        }
        let v = self.random_vector(rng, |v| !self.space.norm(v).is_zero());
        Ok(&ru * &self.space.reflection(&v)?)
    }

    pub(crate) fn random_vector<R: Rng>(&self, rng: &mut R, accept: impl Fn(&Vector) -> bool) -> Vector {
        let f = self.field();
        loop {
            let v: Vector = (0..self.dim())
                .map(|_| f.elem(rng.gen_range(0..f.order())).expect("in range"))
                .collect();
            if v.iter().any(|x| !x.is_zero()) && accept(&v) {
                return v;
            }
        }
    }

    /// A random subspace of dimension `dim`.
    pub fn random_subspace<R: Rng>(&self, rng: &mut R, dim: usize) -> Result<Subspace> {
        if dim > self.dim() {
            return Err(Error::OutOfRange(format!("dimension {dim}")));
        }
        loop {
            let vs: Vec<Vector> = (0..dim).map(|_| self.random_vector(rng, |_| true)).collect();
            let u = Subspace::span(self.field(), self.dim(), &vs)?;
            if u.dim() == dim {
                return Ok(u);
            }
        }
    }

    /// A random subspace of dimension `dim` that is non-singular for the form.
    pub fn random_nonsingular<R: Rng>(&self, rng: &mut R, dim: usize) -> Result<Subspace> {
        if self.space.kind() == FormKind::Linear {
            return Err(Error::WrongFamily("linear groups have no form".into()));
        }
        if dim > self.dim() {
            return Err(Error::OutOfRange(format!("dimension {dim}")));
        }
        for _ in 0..10_000 {
            let vs: Vec<Vector> = (0..dim).map(|_| self.random_vector(rng, |_| true)).collect();
            let u = Subspace::span(self.field(), self.dim(), &vs)?;
            if u.dim() == dim && self.space.is_nonsingular(&u)? {
                return Ok(u);
            }
        }
        Err(Error::Precondition(format!("no non-singular subspace of dimension {dim}")))
    }
}

/// Convenience wrapper: `ClassicalGroup::new(d)?.contains(g)`.
pub fn contains(d: &GroupDescriptor, g: &Matrix) -> Result<bool> {
    ClassicalGroup::new(d)?.contains(g)
}
