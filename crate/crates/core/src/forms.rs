//! Form spaces: the natural module of a classical group together with its
//! alternating, hermitian, symmetric or quadratic form.
//!
//! Besides evaluation and perpendicular spaces this module provides the
//! geometric constructions the classical witnesses rely on:
//!
//! * [`FormSpace::extract_nonsingular`] finds a non-singular `W <= U` with
//!   `dim W >= 2 dim U - n` by greedy growth.
//! * [`FormSpace::witt_basis`] computes a canonical basis of a non-singular
//!   subspace (symplectic pairs, an orthonormal basis, a diagonal basis
//!   `(1, .., 1, delta)`, or hyperbolic pairs plus at most one normalised
//!   anisotropic plane). Two subspaces are isometric exactly when their
//!   canonical signatures agree, and matching canonical bases gives the
//!   isometry.
//! * [`FormSpace::isometric_copy`] builds, inside a larger non-singular
//!   space, a subspace isometric to a given one.
//!
//! The only searches are over the vectors of a single plane or over the
//! field itself.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::classical::{Family, GroupDescriptor};
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::linalg::{kernel, Matrix, Subspace, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormKind {
    Linear,
    Alternating,
    Hermitian,
    Symmetric,
    Quadratic,
}

#[derive(Debug, Clone)]
pub struct FormSpace {
    field: Arc<Field>,
    n: usize,
    kind: FormKind,
    /// Gram matrix of `f`; the polarisation of `Q` for quadratic spaces.
    gram: Matrix,
    /// Diagonal coefficients `Q(e_i)` (quadratic kind only).
    quad_diag: Vec<FieldElem>,
    nonsquare_disc: bool,
    minus_type: bool,
}

/// Canonical isometry type of a non-singular space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    Symplectic { dim: usize },
    Unitary { dim: usize },
    /// Diagonal `(1, ..., 1, last)` with `last` either 1 or the least non-square.
    Orthogonal { dim: usize, last: FieldElem },
    /// Hyperbolic pairs, the last pair anisotropic when `anisotropic`.
    Quadratic { dim: usize, anisotropic: bool },
}

impl Signature {
    pub fn dim(&self) -> usize {
        match *self {
            Signature::Symplectic { dim }
            | Signature::Unitary { dim }
            | Signature::Orthogonal { dim, .. }
            | Signature::Quadratic { dim, .. } => dim,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WittBasis {
    pub vectors: Vec<Vector>,
    pub signature: Signature,
}

/// A linear isometry between two subspaces given on a basis:
/// `domain[i] -> image[i]`.
#[derive(Debug, Clone)]
pub struct Isometry {
    pub domain: Vec<Vector>,
    pub image: Vec<Vector>,
}

impl Isometry {
    pub fn apply(&self, field: &Arc<Field>, v: &[FieldElem]) -> Option<Vector> {
        let coords = Subspace::coordinates_in(field, &self.domain, v)?;
        let n = v.len();
        let mut out = vec![FieldElem::ZERO; n];
        for (c, w) in coords.iter().zip(&self.image) {
            axpy(field, &mut out, *c, w);
        }
        Some(out)
    }

    pub fn compose(&self, field: &Arc<Field>, then: &Isometry) -> Option<Isometry> {
        let image = self
            .image
            .iter()
            .map(|v| then.apply(field, v))
            .collect::<Option<Vec<_>>>()?;
        Some(Isometry {
            domain: self.domain.clone(),
            image,
        })
    }
}

pub(crate) fn axpy(f: &Field, y: &mut [FieldElem], a: FieldElem, x: &[FieldElem]) {
    if a.is_zero() {
        return;
    }
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = f.add(*yi, f.mul(a, xi));
    }
}

fn scaled(f: &Field, a: FieldElem, x: &[FieldElem]) -> Vector {
    x.iter().map(|&xi| f.mul(a, xi)).collect()
}

fn lin2(f: &Field, a: FieldElem, x: &[FieldElem], b: FieldElem, y: &[FieldElem]) -> Vector {
    x.iter().zip(y).map(|(&xi, &yi)| f.add(f.mul(a, xi), f.mul(b, yi))).collect()
}

fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![FieldElem::ZERO; n];
    v[i] = FieldElem::ONE;
    v
}

impl FormSpace {
    pub fn linear(field: &Arc<Field>, n: usize) -> Self {
        FormSpace {
            field: field.clone(),
            n,
            kind: FormKind::Linear,
            gram: Matrix::zeros(field, n, n),
            quad_diag: Vec::new(),
            nonsquare_disc: false,
            minus_type: false,
        }
    }

    /// Checked constructor for alternating, hermitian and symmetric forms.
    pub fn with_gram(kind: FormKind, gram: Matrix) -> Result<Self> {
        let field = gram.field().clone();
        let n = gram.rows();
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: gram.cols(),
            });
        }
        let f = &*field;
        let ok = match kind {
            FormKind::Alternating => (0..n).all(|i| {
                gram.get(i, i).is_zero() && (0..n).all(|j| gram.get(i, j) == f.neg(gram.get(j, i)))
            }),
            FormKind::Symmetric => {
                f.characteristic() != 2 && (0..n).all(|i| (0..n).all(|j| gram.get(i, j) == gram.get(j, i)))
            }
            FormKind::Hermitian => {
                f.degree() % 2 == 0
                    && (0..n).all(|i| (0..n).all(|j| gram.get(i, j) == f.conj_unchecked(gram.get(j, i))))
            }
            FormKind::Linear | FormKind::Quadratic => {
                return Err(Error::WrongFamily(format!("{kind:?} via with_gram")))
            }
        };
        if !ok {
            return Err(Error::Precondition(format!("Gram matrix is not {kind:?}")));
        }
        if gram.rank() != n {
            return Err(Error::Precondition("form is degenerate".into()));
        }
        Ok(FormSpace {
            field,
            n,
            kind,
            gram,
            quad_diag: Vec::new(),
            nonsquare_disc: false,
            minus_type: false,
        })
    }

    /// Quadratic form `Q(v) = sum a_i v_i^2 + sum_{i<j} c_ij v_i v_j` given by
    /// its diagonal `a` and upper cross terms; the polarisation is derived.
    pub fn quadratic(field: &Arc<Field>, diag: Vec<FieldElem>, cross: &Matrix) -> Result<Self> {
        let n = diag.len();
        if cross.rows() != n || cross.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: cross.rows(),
            });
        }
        let f = &**field;
        let mut gram = Matrix::zeros(field, n, n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j {
                    f.add(diag[i], diag[i])
                } else if i < j {
                    cross.get(i, j)
                } else {
                    cross.get(j, i)
                };
                gram.set(i, j, v);
            }
        }
        if f.characteristic() != 2 {
            return Err(Error::WrongFamily("quadratic kind is for characteristic 2".into()));
        }
        if gram.rank() != n {
            return Err(Error::Precondition("polar form is degenerate".into()));
        }
        Ok(FormSpace {
            field: field.clone(),
            n,
            kind: FormKind::Quadratic,
            gram,
            quad_diag: diag,
            nonsquare_disc: false,
            minus_type: false,
        })
    }

    /// The natural module of a classical group with its standard form.
    pub fn standard(d: &GroupDescriptor) -> Result<Self> {
        d.validate()?;
        let field = d.matrix_field()?;
        let f = &*field;
        let n = d.n;
        let mut space = match d.family {
            Family::Alt => return Err(Error::WrongFamily(d.to_string())),
            Family::SL => FormSpace::linear(&field, n),
            Family::Sp => {
                let mut g = Matrix::zeros(&field, n, n);
                for i in (0..n).step_by(2) {
                    g.set(i, i + 1, f.one());
                    g.set(i + 1, i, f.neg(f.one()));
                }
                FormSpace::with_gram(FormKind::Alternating, g)?
            }
            Family::SU => FormSpace::with_gram(FormKind::Hermitian, Matrix::identity(&field, n))?,
            Family::OmegaOdd => {
                let alpha = f.least_non_square().expect("odd q");
                let mut diag = vec![f.one(); n];
                if d.nonsquare_disc {
                    diag[n - 1] = alpha;
                }
                FormSpace::with_gram(FormKind::Symmetric, Matrix::diag(&field, &diag))?
            }
            Family::OmegaPlus | Family::OmegaMinus if !d.char_two() => {
                // diag(1,..,1,delta) is of plus type iff (-1)^m delta is a square
                let m = n / 2;
                let sign = if m % 2 == 0 { f.one() } else { f.neg(f.one()) };
                let alpha = f.least_non_square().expect("odd q");
                let want_plus = d.family == Family::OmegaPlus;
                let delta = if f.is_square(sign) == want_plus { f.one() } else { alpha };
                let mut diag = vec![f.one(); n];
                diag[n - 1] = delta;
                FormSpace::with_gram(FormKind::Symmetric, Matrix::diag(&field, &diag))?
            }
            Family::OmegaPlus | Family::OmegaMinus => {
                let mut cross = Matrix::zeros(&field, n, n);
                let mut diag = vec![f.zero(); n];
                for i in (0..n).step_by(2) {
                    cross.set(i, i + 1, f.one());
                }
                if d.family == Family::OmegaMinus {
                    diag[n - 2] = f.one();
                    diag[n - 1] = artin_schreier_constant(f);
                }
                FormSpace::quadratic(&field, diag, &cross)?
            }
        };
        space.nonsquare_disc = d.nonsquare_disc;
        space.minus_type = d.family == Family::OmegaMinus;
        Ok(space)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn nonsquare_disc(&self) -> bool {
        self.nonsquare_disc
    }

    pub fn minus_type(&self) -> bool {
        self.minus_type
    }

    fn require_form(&self) -> Result<()> {
        if self.kind == FormKind::Linear {
            Err(Error::WrongFamily("linear space has no form".into()))
        } else {
            Ok(())
        }
    }

    fn check_len(&self, v: &[FieldElem]) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `f(u, v)`, linear in `u` and (for hermitian forms) semilinear in `v`.
    pub fn form_eval(&self, u: &[FieldElem], v: &[FieldElem]) -> Result<FieldElem> {
        self.require_form()?;
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.f(u, v))
    }

    #[inline]
    pub(crate) fn f(&self, u: &[FieldElem], v: &[FieldElem]) -> FieldElem {
        let fld = &*self.field;
        let herm = self.kind == FormKind::Hermitian;
        let mut acc = FieldElem::ZERO;
        for (i, &ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            let row = self.gram.row(i);
            let mut s = FieldElem::ZERO;
            for (j, &vj) in v.iter().enumerate() {
                let g = row[j];
                if g.is_zero() || vj.is_zero() {
                    continue;
                }
                let vj = if herm { fld.conj_unchecked(vj) } else { vj };
                s = fld.add(s, fld.mul(g, vj));
            }
            acc = fld.add(acc, fld.mul(ui, s));
        }
        acc
    }

    /// `Q(v)`: the explicit quadratic form, or `f(v,v)/2` for symmetric forms.
    pub fn q_eval(&self, v: &[FieldElem]) -> Result<FieldElem> {
        self.check_len(v)?;
        match self.kind {
            FormKind::Quadratic | FormKind::Symmetric => Ok(self.q(v)),
            _ => Err(Error::WrongFamily(format!("{:?} has no quadratic form", self.kind))),
        }
    }

    pub(crate) fn q(&self, v: &[FieldElem]) -> FieldElem {
        let f = &*self.field;
        match self.kind {
            FormKind::Quadratic => {
                let mut acc = FieldElem::ZERO;
                for i in 0..self.n {
                    if v[i].is_zero() {
                        continue;
                    }
                    acc = f.add(acc, f.mul(self.quad_diag[i], f.mul(v[i], v[i])));
                    for j in i + 1..self.n {
                        let c = self.gram.get(i, j);
                        if !c.is_zero() && !v[j].is_zero() {
                            acc = f.add(acc, f.mul(c, f.mul(v[i], v[j])));
                        }
                    }
                }
                acc
            }
            _ => {
                let two = f.from_int(2);
                f.div(self.f(v, v), two).expect("odd characteristic")
            }
        }
    }

    /// The "norm" a reflection or transvection divides by: `Q(v)` for
    /// quadratic spaces, `f(v, v)` otherwise.
    pub(crate) fn norm(&self, v: &[FieldElem]) -> FieldElem {
        if self.kind == FormKind::Quadratic {
            self.q(v)
        } else {
            self.f(v, v)
        }
    }

    pub fn restricted_gram(&self, basis: &[Vector]) -> Matrix {
        let k = basis.len();
        let mut m = Matrix::zeros(&self.field, k, k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, self.f(&basis[i], &basis[j]));
            }
        }
        m
    }

    pub fn perp(&self, u: &Subspace) -> Result<Subspace> {
        self.require_form()?;
        self.check_len(&vec![FieldElem::ZERO; u.ambient_dim()])?;
        if u.is_zero() {
            return Ok(Subspace::full(&self.field, self.n));
        }
        Ok(self.perp_of(u.basis()))
    }

    pub(crate) fn perp_of(&self, vectors: &[Vector]) -> Subspace {
        if vectors.is_empty() {
            return Subspace::full(&self.field, self.n);
        }
        let f = &*self.field;
        let herm = self.kind == FormKind::Hermitian;
        // f(u, v) = (u^T G) . sigma(v) = 0  <=>  sigma(u^T G) . v = 0
        let rows: Vec<Vector> = vectors
            .iter()
            .map(|u| {
                (0..self.n)
                    .map(|j| {
                        let mut s = FieldElem::ZERO;
                        for (i, &ui) in u.iter().enumerate() {
                            s = f.add(s, f.mul(ui, self.gram.get(i, j)));
                        }
                        if herm {
                            f.conj_unchecked(s)
                        } else {
                            s
                        }
                    })
                    .collect()
            })
            .collect();
        kernel(&Matrix::from_rows(&self.field, &rows).expect("rectangular"))
    }

    pub fn is_nonsingular(&self, u: &Subspace) -> Result<bool> {
        self.require_form()?;
        Ok(self.is_nonsingular_basis(u.basis()))
    }

    pub(crate) fn is_nonsingular_basis(&self, basis: &[Vector]) -> bool {
        basis.is_empty() || self.restricted_gram(basis).rank() == basis.len()
    }

    /// Greedy maximal non-singular subspace of `u`.
    pub fn extract_nonsingular(&self, u: &Subspace) -> Result<Subspace> {
        self.require_form()?;
        let mut w: Vec<Vector> = Vec::new();
        loop {
            let rest = if w.is_empty() {
                u.clone()
            } else {
                self.perp_of(&w).intersect(u)
            };
            let b = rest.basis();
            if let Some(v) = b.iter().find(|v| !self.f(v, v).is_zero()) {
                w.push(v.clone());
                continue;
            }
            let pair = (0..b.len())
                .flat_map(|i| (i + 1..b.len()).map(move |j| (i, j)))
                .find(|&(i, j)| !self.f(&b[i], &b[j]).is_zero());
            match pair {
                Some((i, j)) => {
                    w.push(b[i].clone());
                    w.push(b[j].clone());
                }
                None => break,
            }
        }
        Subspace::span(&self.field, self.n, &w)
    }

    /// Canonical basis of a non-singular subspace.
    pub fn witt_basis(&self, u: &Subspace) -> Result<WittBasis> {
        self.require_form()?;
        if !self.is_nonsingular_basis(u.basis()) {
            return Err(Error::Precondition("subspace is singular".into()));
        }
        let basis = u.basis().to_vec();
        match self.kind {
            FormKind::Alternating => {
                let pairs = self.symplectic_pairs(basis)?;
                let dim = pairs.len() * 2;
                Ok(WittBasis {
                    vectors: pairs.into_iter().flat_map(|(e, f)| [e, f]).collect(),
                    signature: Signature::Symplectic { dim },
                })
            }
            FormKind::Hermitian => {
                let ortho = self.orthogonal_basis(basis)?;
                let f = &*self.field;
                let vectors = ortho
                    .into_iter()
                    .map(|(v, d)| {
                        // find c with c * conj(c) * d = 1
                        let c = f
                            .nonzero_elements()
                            .find(|&c| f.mul(f.mul(c, f.conj_unchecked(c)), d) == f.one())
                            .ok_or_else(|| Error::Internal("norm map not onto".into()))?;
                        Ok(scaled(f, c, &v))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let dim = vectors.len();
                Ok(WittBasis {
                    vectors,
                    signature: Signature::Unitary { dim },
                })
            }
            FormKind::Symmetric => {
                let ortho = self.orthogonal_basis(basis)?;
                let (vectors, last) = self.normalize_diagonal(ortho)?;
                let dim = vectors.len();
                Ok(WittBasis {
                    vectors,
                    signature: Signature::Orthogonal { dim, last },
                })
            }
            FormKind::Quadratic => {
                let (pairs, aniso) = self.quadratic_decomposition(basis)?;
                let dim = 2 * pairs.len() + if aniso.is_some() { 2 } else { 0 };
                let mut vectors: Vec<Vector> = pairs.into_iter().flat_map(|(e, f)| [e, f]).collect();
                let anisotropic = aniso.is_some();
                if let Some((e, f)) = aniso {
                    vectors.push(e);
                    vectors.push(f);
                }
                Ok(WittBasis {
                    vectors,
                    signature: Signature::Quadratic { dim, anisotropic },
                })
            }
            FormKind::Linear => unreachable!("checked above"),
        }
    }

    /// An isometry `U -> W` (preserving `Q` as well for quadratic spaces),
    /// or `None` when the two are not isometric.
    pub fn isometry_between(&self, u: &Subspace, w: &Subspace) -> Result<Option<Isometry>> {
        if u.dim() != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: u.dim(),
                got: w.dim(),
            });
        }
        let bu = self.witt_basis(u)?;
        let bw = self.witt_basis(w)?;
        if bu.signature != bw.signature {
            return Ok(None);
        }
        Ok(Some(Isometry {
            domain: bu.vectors,
            image: bw.vectors,
        }))
    }

    /// A subspace of `within` isometric to `u`, with the isometry from `u`.
    /// Needs both non-singular; returns `None` if no copy exists.
    pub fn isometric_copy(&self, u: &Subspace, within: &Subspace) -> Result<Option<Isometry>> {
        let bu = self.witt_basis(u)?;
        let bp = self.witt_basis(within)?;
        let k = bu.signature.dim();
        let m = bp.signature.dim();
        if k > m {
            return Ok(None);
        }
        if bu.signature == bp.signature || k == 0 {
            let image = bp.vectors[..k].to_vec();
            return Ok(Some(Isometry {
                domain: bu.vectors,
                image,
            }));
        }
        let f = &*self.field;
        let p = &bp.vectors;
        let image: Vec<Vector> = match (bu.signature, bp.signature) {
            (Signature::Symplectic { .. }, _) | (Signature::Unitary { .. }, _) => p[..k].to_vec(),
            (Signature::Orthogonal { last, .. }, Signature::Orthogonal { last: plast, .. }) => {
                if k == m {
                    return Ok(None);
                }
                // values of p[k-1], p[k] are (1, 1), or (1, plast) when k == m - 1
                let d2 = if k == m - 1 { plast } else { f.one() };
                let w = find_in_plane(f, |a, b| {
                    let val = f.add(f.mul(a, a), f.mul(d2, f.mul(b, b)));
                    val == last
                })
                .map(|(a, b)| lin2(f, a, &p[k - 1], b, &p[k]))
                .ok_or_else(|| Error::Internal("binary form not universal".into()))?;
                let mut img = p[..k - 1].to_vec();
                img.push(w);
                img
            }
            (
                Signature::Quadratic { anisotropic: true, .. },
                Signature::Quadratic {
                    anisotropic: false, ..
                },
            ) => {
                if m < k + 2 {
                    return Ok(None);
                }
                // k/2 - 1 hyperbolic pairs, then an anisotropic plane built from
                // the next two hyperbolic pairs (e,f), (e',f'):
                // u = e + f, v = e + beta e' + f'.
                let beta = artin_schreier_constant(f);
                let mut img = p[..k - 2].to_vec();
                let (e, fv, e2, f2) = (&p[k - 2], &p[k - 1], &p[k], &p[k + 1]);
                let u = lin2(f, f.one(), e, f.one(), fv);
                let mut v = lin2(f, f.one(), e, beta, e2);
                axpy(f, &mut v, f.one(), f2);
                img.push(u);
                img.push(v);
                img
            }
            (Signature::Quadratic { anisotropic: false, .. }, Signature::Quadratic { anisotropic: t, .. }) => {
                let pairs = if t { m / 2 - 1 } else { m / 2 };
                if k / 2 > pairs {
                    return Ok(None);
                }
                p[..k].to_vec()
            }
            (Signature::Quadratic { anisotropic: true, .. }, Signature::Quadratic { .. }) => {
                // target has an anisotropic plane at the end
                let mut img = p[..k - 2].to_vec();
                img.push(p[m - 2].clone());
                img.push(p[m - 1].clone());
                img
            }
            _ => return Err(Error::Internal("mismatched form kinds".into())),
        };
        let iso = Isometry {
            domain: bu.vectors,
            image,
        };
        if !self.is_isometry(&iso) {
            return Err(Error::Internal("constructed copy is not isometric".into()));
        }
        Ok(Some(iso))
    }

    pub fn is_isometry(&self, iso: &Isometry) -> bool {
        let k = iso.domain.len();
        if iso.image.len() != k {
            return false;
        }
        let span = Subspace::span(&self.field, self.n, &iso.image).map(|s| s.dim());
        if span != Ok(k) {
            return false;
        }
        for i in 0..k {
            for j in 0..k {
                if self.f(&iso.domain[i], &iso.domain[j]) != self.f(&iso.image[i], &iso.image[j]) {
                    return false;
                }
            }
            if self.kind == FormKind::Quadratic && self.q(&iso.domain[i]) != self.q(&iso.image[i]) {
                return false;
            }
        }
        true
    }

    /// Whether `g` preserves the form (and `Q` in the quadratic case).
    pub fn preserves(&self, g: &Matrix) -> bool {
        if g.rows() != self.n || !g.is_square() {
            return false;
        }
        match self.kind {
            FormKind::Linear => true,
            FormKind::Hermitian => {
                let lhs = &(&g.transpose() * &self.gram) * &g.conj();
                lhs == self.gram
            }
            _ => {
                let lhs = &(&g.transpose() * &self.gram) * g;
                if lhs != self.gram {
                    return false;
                }
                self.kind != FormKind::Quadratic
                    || (0..self.n).all(|i| self.q(&g.column(i)) == self.quad_diag[i])
            }
        }
    }

    /// The reflection (q odd) or orthogonal transvection (char 2) in `v`:
    /// `x -> x - f(x, v) / N(v) * v` with `N(v) = Q(v)` in the quadratic case
    /// and `f(v,v)/2` otherwise.
    pub fn reflection(&self, v: &[FieldElem]) -> Result<Matrix> {
        if !matches!(self.kind, FormKind::Symmetric | FormKind::Quadratic) {
            return Err(Error::WrongFamily(format!("reflection in {:?} space", self.kind)));
        }
        let qv = self.q(v);
        if qv.is_zero() {
            return Err(Error::Precondition("reflection vector is singular".into()));
        }
        let f = &*self.field;
        let inv = f.inv(qv)?;
        let mut m = Matrix::identity(&self.field, self.n);
        for j in 0..self.n {
            let c = f.mul(self.f(&unit(self.n, j), v), inv);
            if c.is_zero() {
                continue;
            }
            for i in 0..self.n {
                let cur = m.get(i, j);
                m.set(i, j, f.sub(cur, f.mul(c, v[i])));
            }
        }
        Ok(m)
    }

    /// Symplectic or unitary transvection `x -> x + a f(x, v) v`.
    pub fn transvection(&self, v: &[FieldElem], a: FieldElem) -> Result<Matrix> {
        let f = &*self.field;
        match self.kind {
            FormKind::Alternating => {}
            FormKind::Hermitian => {
                if !self.f(v, v).is_zero() || f.add(a, f.conj_unchecked(a)) != f.zero() {
                    return Err(Error::Precondition(
                        "unitary transvection needs isotropic v and a + conj(a) = 0".into(),
                    ));
                }
            }
            _ => return Err(Error::WrongFamily(format!("transvection in {:?} space", self.kind))),
        }
        let mut m = Matrix::identity(&self.field, self.n);
        for j in 0..self.n {
            let c = f.mul(a, self.f(&unit(self.n, j), v));
            if c.is_zero() {
                continue;
            }
            for i in 0..self.n {
                let cur = m.get(i, j);
                m.set(i, j, f.add(cur, f.mul(c, v[i])));
            }
        }
        Ok(m)
    }

    // ---- canonical decompositions ----

    /// Symplectic pairs `(e, f)` with `f(e, f) = 1` (alternating polar forms).
    fn symplectic_pairs(&self, mut rest: Vec<Vector>) -> Result<Vec<(Vector, Vector)>> {
        let f = &*self.field;
        let mut pairs = Vec::new();
        while !rest.is_empty() {
            let e = rest[0].clone();
            let j = (1..rest.len())
                .find(|&j| !self.f(&e, &rest[j]).is_zero())
                .ok_or_else(|| Error::Precondition("subspace is singular".into()))?;
            let c = f.inv(self.f(&e, &rest[j]))?;
            let fv = scaled(f, c, &rest[j]);
            rest = self.project_off_pair(&rest, &e, &fv);
            pairs.push((e, fv));
        }
        Ok(pairs)
    }

    /// Spans `{b - f(b,fv) e + f(b,e) fv}`: the part of `rest` perpendicular
    /// to a pair with `f(e, fv) = 1`.
    fn project_off_pair(&self, rest: &[Vector], e: &[FieldElem], fv: &[FieldElem]) -> Vec<Vector> {
        let f = &*self.field;
        let projected: Vec<Vector> = rest
            .iter()
            .map(|b| {
                let mut nb = b.clone();
                axpy(f, &mut nb, f.neg(self.f(b, fv)), e);
                axpy(f, &mut nb, self.f(b, e), fv);
                nb
            })
            .collect();
        Subspace::span(&self.field, self.n, &projected)
            .expect("ambient length")
            .basis()
            .to_vec()
    }

    /// Orthogonal basis with values `f(v, v)` (symmetric or hermitian).
    fn orthogonal_basis(&self, mut rest: Vec<Vector>) -> Result<Vec<(Vector, FieldElem)>> {
        let f = &*self.field;
        let mut out = Vec::new();
        while !rest.is_empty() {
            let v = self
                .non_isotropic_in(&rest)
                .ok_or_else(|| Error::Precondition("subspace is singular".into()))?;
            let d = self.f(&v, &v);
            let dinv = f.inv(d)?;
            let projected: Vec<Vector> = rest
                .iter()
                .map(|b| {
                    let mut nb = b.clone();
                    axpy(f, &mut nb, f.neg(f.mul(self.f(b, &v), dinv)), &v);
                    nb
                })
                .collect();
            rest = Subspace::span(&self.field, self.n, &projected)?.basis().to_vec();
            out.push((v, d));
        }
        Ok(out)
    }

    fn non_isotropic_in(&self, basis: &[Vector]) -> Option<Vector> {
        if let Some(v) = basis.iter().find(|v| !self.f(v, v).is_zero()) {
            return Some(v.clone());
        }
        let f = &*self.field;
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                for t in f.nonzero_elements() {
                    let mut v = basis[i].clone();
                    axpy(f, &mut v, t, &basis[j]);
                    if !self.f(&v, &v).is_zero() {
                        return Some(v);
                    }
                }
            }
        }
        None
    }

    /// Turns a diagonal basis into values `(1, .., 1, last)` with `last` in
    /// `{1, least non-square}`.
    fn normalize_diagonal(&self, diag: Vec<(Vector, FieldElem)>) -> Result<(Vec<Vector>, FieldElem)> {
        let f = &*self.field;
        let mut vs: Vec<Vector> = diag.iter().map(|(v, _)| v.clone()).collect();
        let mut ds: Vec<FieldElem> = diag.iter().map(|&(_, d)| d).collect();
        let k = vs.len();
        for i in 0..k.saturating_sub(1) {
            let (d1, d2) = (ds[i], ds[i + 1]);
            let (a, b) = find_in_plane(f, |a, b| {
                f.add(f.mul(d1, f.mul(a, a)), f.mul(d2, f.mul(b, b))) == f.one()
            })
            .ok_or_else(|| Error::Internal("binary form does not represent 1".into()))?;
            let x = lin2(f, a, &vs[i], b, &vs[i + 1]);
            let y = lin2(f, f.mul(b, d2), &vs[i], f.neg(f.mul(a, d1)), &vs[i + 1]);
            vs[i] = x;
            vs[i + 1] = y;
            ds[i] = f.one();
            ds[i + 1] = f.mul(d1, d2);
        }
        if k == 0 {
            return Ok((vs, f.one()));
        }
        let d = ds[k - 1];
        let target = if f.is_square(d) {
            f.one()
        } else {
            f.least_non_square().expect("odd characteristic")
        };
        let c = f
            .sqrt(f.div(target, d)?)
            .ok_or_else(|| Error::Internal("square root".into()))?;
        vs[k - 1] = scaled(f, c, &vs[k - 1]);
        Ok((vs, target))
    }

    /// Hyperbolic pairs plus at most one anisotropic plane normalised to
    /// `Q(e) = 1, f(e, f) = 1, Q(f) = beta` (characteristic 2).
    #[allow(clippy::type_complexity)]
    fn quadratic_decomposition(
        &self,
        mut rest: Vec<Vector>,
    ) -> Result<(Vec<(Vector, Vector)>, Option<(Vector, Vector)>)> {
        let f = &*self.field;
        let mut pairs = Vec::new();
        while !rest.is_empty() {
            let sym = self.symplectic_pairs(rest.clone())?;
            let singular = match self.singular_in_plane(&sym[0].0, &sym[0].1) {
                Some(e) => Some(e),
                None if sym.len() >= 2 => Some(
                    self.singular_in_plane(&sym[1].0, &sym[1].1)
                        .map_or_else(|| self.singular_from_two_anisotropic(&sym[0], &sym[1]), Ok)?,
                ),
                None => None,
            };
            let Some(e) = singular else {
                // rest is a single anisotropic plane
                let (a, b) = &sym[0];
                let c = f
                    .sqrt(f.inv(self.q(a))?)
                    .ok_or_else(|| Error::Internal("square root".into()))?;
                let e = scaled(f, c, a);
                let fv = scaled(f, f.inv(self.f(&e, b))?, b);
                let beta = artin_schreier_constant(f);
                let t = f
                    .elements()
                    .find(|&t| f.add(f.add(self.q(&fv), t), f.mul(t, t)) == beta)
                    .ok_or_else(|| Error::Internal("Arf class mismatch".into()))?;
                let mut fv2 = fv.clone();
                axpy(f, &mut fv2, t, &e);
                return Ok((pairs, Some((e, fv2))));
            };
            let partner = rest
                .iter()
                .find(|b| !self.f(&e, b).is_zero())
                .ok_or_else(|| Error::Precondition("subspace is singular".into()))?;
            let mut fv = scaled(f, f.inv(self.f(&e, partner))?, partner);
            let qf = self.q(&fv);
            axpy(f, &mut fv, qf, &e);
            rest = self.project_off_pair(&rest, &e, &fv);
            pairs.push((e, fv));
        }
        Ok((pairs, None))
    }

    fn singular_in_plane(&self, a: &[FieldElem], b: &[FieldElem]) -> Option<Vector> {
        if self.q(a).is_zero() {
            return Some(a.to_vec());
        }
        let f = &*self.field;
        f.elements().map(|t| lin2(f, f.one(), b, t, a)).find(|v| self.q(v).is_zero())
    }

    /// Two perpendicular anisotropic planes: pick `x, y` with `Q = 1` in each,
    /// then `Q(x + y) = 1 + 1 = 0`.
    fn singular_from_two_anisotropic(&self, p1: &(Vector, Vector), p2: &(Vector, Vector)) -> Result<Vector> {
        let f = &*self.field;
        let find_unit = |(a, b): &(Vector, Vector)| {
            find_in_plane(f, |x, y| self.q(&lin2(f, x, a, y, b)) == f.one())
                .map(|(x, y)| lin2(f, x, a, y, b))
                .ok_or_else(|| Error::Internal("anisotropic plane misses 1".into()))
        };
        let x = find_unit(p1)?;
        let y = find_unit(p2)?;
        Ok(lin2(f, f.one(), &x, f.one(), &y))
    }
}

/// The least `beta` with `x^2 + x + beta` irreducible over a field of
/// characteristic 2.
pub fn artin_schreier_constant(f: &Field) -> FieldElem {
    f.elements()
        .find(|&b| f.elements().all(|t| f.add(f.mul(t, t), t) != b))
        .expect("Artin-Schreier map is not onto")
}

fn find_in_plane(f: &Field, pred: impl Fn(FieldElem, FieldElem) -> bool) -> Option<(FieldElem, FieldElem)> {
    for a in f.elements() {
        for b in f.elements() {
            if (a.is_zero() && b.is_zero()) || !pred(a, b) {
                continue;
            }
            return Some((a, b));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(s: &str) -> FormSpace {
        FormSpace::standard(&s.parse().unwrap()).unwrap()
    }

    fn span(s: &FormSpace, vs: &[Vector]) -> Subspace {
        Subspace::span(s.field(), s.dim(), vs).unwrap()
    }

    #[test]
    fn standard_kinds() {
        assert_eq!(space("SL(4,5)").kind(), FormKind::Linear);
        assert_eq!(space("Sp(4,3)").kind(), FormKind::Alternating);
        assert_eq!(space("SU(4,3)").kind(), FormKind::Hermitian);
        assert_eq!(space("O(7,3)").kind(), FormKind::Symmetric);
        assert_eq!(space("O-(8,2)").kind(), FormKind::Quadratic);
        assert!("Sp(4,2)".parse::<GroupDescriptor>().is_err());
    }

    #[test]
    fn alternating_is_alternating() {
        let s = space("Sp(4,3)");
        for v in Subspace::full(s.field(), 4).vectors() {
            assert!(s.form_eval(&v, &v).unwrap().is_zero());
        }
    }

    #[test]
    fn hermitian_orthonormal() {
        let s = space("SU(4,3)");
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { FieldElem::ONE } else { FieldElem::ZERO };
                assert_eq!(s.form_eval(&unit(4, i), &unit(4, j)).unwrap(), want);
            }
        }
    }

    #[test]
    fn linear_space_has_no_perp() {
        let s = space("SL(3,5)");
        assert!(s.perp(&Subspace::zero(s.field(), 3)).is_err());
        assert!(s.form_eval(&unit(3, 0), &unit(3, 1)).is_err());
    }

    #[test]
    fn perp_extremes() {
        let s = space("Sp(4,3)");
        let f = s.field().clone();
        assert!(s.perp(&Subspace::full(&f, 4)).unwrap().is_zero());
        assert_eq!(s.perp(&Subspace::zero(&f, 4)).unwrap().dim(), 4);
        let plane = span(&s, &[unit(4, 0), unit(4, 1)]);
        assert!(s.is_nonsingular(&plane).unwrap());
        let p = s.perp(&plane).unwrap();
        assert!(p.intersect(&plane).is_zero());
        assert_eq!(p.dim() + plane.dim(), 4);
    }

    #[test]
    fn nonsingularity_examples() {
        let s = space("Sp(4,3)");
        assert!(s.is_nonsingular(&Subspace::zero(s.field(), 4)).unwrap());
        assert!(!s.is_nonsingular(&span(&s, &[unit(4, 0)])).unwrap());
    }

    #[test]
    fn extraction_on_nonsingular_and_isotropic() {
        let s = space("Sp(6,3)");
        let plane = span(&s, &[unit(6, 0), unit(6, 1)]);
        assert_eq!(s.extract_nonsingular(&plane).unwrap(), plane);
        let iso = span(&s, &[unit(6, 0), unit(6, 2), unit(6, 4)]);
        assert!(s.extract_nonsingular(&iso).unwrap().is_zero());
    }

    #[test]
    fn isometry_of_symplectic_planes() {
        let s = space("Sp(6,3)");
        let u = span(&s, &[unit(6, 0), unit(6, 1)]);
        let w = span(&s, &[unit(6, 2), unit(6, 3)]);
        let iso = s.isometry_between(&u, &w).unwrap().unwrap();
        assert!(s.is_isometry(&iso));
        let id = s.isometry_between(&u, &u).unwrap().unwrap();
        for v in u.vectors() {
            assert_eq!(id.apply(s.field(), &v).unwrap(), v);
        }
    }

    #[test]
    fn square_classes_obstruct_isometry() {
        let s = space("O(5,3)");
        let f = s.field().clone();
        // f(e1,e1) = 1 is a square, f(e1+e2, e1+e2) = 2 is not
        let mut v = unit(5, 0);
        v[1] = f.one();
        let u = span(&s, &[unit(5, 0)]);
        let w = span(&s, &[v]);
        assert!(s.isometry_between(&u, &w).unwrap().is_none());
    }

    #[test]
    fn polarization_identity() {
        let s = space("O-(6,2)");
        let all = Subspace::full(s.field(), 6).vectors();
        let f = s.field().clone();
        for u in all.iter().step_by(3) {
            for v in all.iter().step_by(5) {
                let sum: Vector = u.iter().zip(v).map(|(&a, &b)| f.add(a, b)).collect();
                let lhs = f.sub(f.sub(s.q(&sum), s.q(u)), s.q(v));
                assert_eq!(lhs, s.f(u, v));
            }
        }
    }

    #[test]
    fn singular_vector_counts_fix_type() {
        // (q^m - eps)(q^(m-1) + eps) nonzero singular vectors in dimension 2m
        for (s, want) in [("O+(6,2)", 35), ("O-(6,2)", 27), ("O+(6,3)", 26 * 10), ("O-(6,3)", 28 * 8)] {
            let sp = space(s);
            let count = Subspace::full(sp.field(), 6)
                .vectors()
                .iter()
                .filter(|v| v.iter().any(|x| !x.is_zero()) && sp.q(v).is_zero())
                .count();
            assert_eq!(count, want, "{s}");
        }
    }

    #[test]
    fn isometric_copies_exist_in_larger_complements() {
        for d in ["O(7,3)", "O(7,3):d", "O+(8,2)", "O-(8,2)", "SU(5,2)", "Sp(8,3)"] {
            let s = space(d);
            let w = s.witt_basis(&Subspace::full(s.field(), s.dim())).unwrap();
            let u = span(&s, &w.vectors[..2]);
            let p = s.perp(&u).unwrap();
            let iso = s.isometric_copy(&u, &p).unwrap().expect(d);
            assert!(s.is_isometry(&iso));
            let img = span(&s, &iso.image);
            assert!(p.contains_subspace(&img));
        }
    }
}
