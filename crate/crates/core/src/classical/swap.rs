use crate::error::{Error, Result};
use crate::forms::FormKind;
use crate::gf::FieldElem;
use crate::linalg::{Matrix, Subspace, Vector};

use super::{ClassicalGroup, Family};

/// An element `h` of `H` with `U^perp = W1 + W2`, `h` fixing `W2` pointwise
/// and interchanging `U` and `W1`.
#[derive(Debug, Clone)]
pub struct SwapWitness {
    pub h: Matrix,
    /// The isometric involution before the family corrections.
    pub involution: Matrix,
    pub w1: Subspace,
    pub w2: Subspace,
}

impl ClassicalGroup {
    pub fn swap_element(&self, u: &Subspace) -> Result<SwapWitness> {
        let n = self.dim();
        let space = self.space();
        let field = self.field();
        let f = &**field;
        if self.descriptor().family == Family::SL {
            return Err(Error::WrongFamily("swap needs a form".into()));
        }
        if u.ambient_dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: u.ambient_dim(),
            });
        }
        let k = u.dim();
        if k < 2 || 2 * k >= n {
            return Err(Error::Precondition(format!("need 2 <= dim U < n/2, got dim U = {k}, n = {n}")));
        }
        if !space.is_nonsingular(u)? {
            return Err(Error::Precondition("U is singular".into()));
        }
        let perp = space.perp(u)?;
        let theta = space
            .isometric_copy(u, &perp)?
            .ok_or_else(|| Error::Internal("no isometric copy of U in its complement".into()))?;
        let w1 = Subspace::span(field, n, &theta.image)?;
        let sum = u.sum(&w1);
        let w2 = space.perp(&sum)?;

        // h1: u_i <-> theta(u_i), identity on W2
        let mut src: Vec<Vector> = theta.domain.clone();
        src.extend(theta.image.iter().cloned());
        src.extend(w2.basis().iter().cloned());
        let mut dst: Vec<Vector> = theta.image.clone();
        dst.extend(theta.domain.iter().cloned());
        dst.extend(w2.basis().iter().cloned());
        let b = Matrix::from_columns(field, n, &src)?;
        let b2 = Matrix::from_columns(field, n, &dst)?;
        let h1 = &b2 * &b.inverse()?;

        let mut h = h1.clone();
        let fam = self.descriptor().family;
        let odd_orth = self.descriptor().is_orthogonal() && !self.descriptor().char_two();
        if fam == Family::SU || odd_orth {
            // h2 scales a non-isotropic vector of U by det(h1) = +-1
            let eps = h1.det()?;
            if eps != f.one() {
                let v = u
                    .vectors()
                    .into_iter()
                    .find(|v| !space.f(v, v).is_zero())
                    .ok_or_else(|| Error::Internal("U has no non-isotropic vector".into()))?;
                h = &h * &scale_line(self, &v, eps)?;
            }
        }
        if odd_orth && self.spinor_norm(&h)? == 1 {
            // s in SO(U) of non-trivial spinor norm: r_a r_b with classes of
            // f(a,a), f(b,b) different
            let vs = u.vectors();
            let a = vs.iter().find(|v| !space.f(v, v).is_zero()).expect("non-singular U");
            let ca = f.square_class(space.f(a, a))?;
            let b = vs
                .iter()
                .find(|v| {
                    let x = space.f(v, v);
                    !x.is_zero() && f.square_class(x).map_or(false, |c| c != ca)
                })
                .ok_or_else(|| Error::Internal("U does not represent both square classes".into()))?;
            let s = &space.reflection(a)? * &space.reflection(b)?;
            h = &h * &s;
        }
        if self.descriptor().is_orthogonal() && self.descriptor().char_two() && self.dickson_invariant(&h)? == 1 {
            let a = u
                .vectors()
                .into_iter()
                .find(|v| !space.q(v).is_zero())
                .ok_or_else(|| Error::Internal("U is totally singular".into()))?;
            h = &h * &space.reflection(&a)?;
        }
        debug_assert!(space.kind() != FormKind::Linear);
        Ok(SwapWitness {
            h,
            involution: h1,
            w1,
            w2,
        })
    }
}

/// `x -> x + (eps - 1) f(x, v) / f(v, v) v`: scales `v` by `eps`, fixes `v^perp`.
fn scale_line(g: &ClassicalGroup, v: &[FieldElem], eps: FieldElem) -> Result<Matrix> {
    let space = g.space();
    let f = &**g.field();
    let n = g.dim();
    let c = f.div(f.sub(eps, f.one()), space.f(v, v))?;
    let mut m = Matrix::identity(g.field(), n);
    for j in 0..n {
        let mut e = vec![FieldElem::ZERO; n];
        e[j] = FieldElem::ONE;
        let a = f.mul(c, space.f(&e, v));
        for i in 0..n {
            let cur = m.get(i, j);
            m.set(i, j, f.add(cur, f.mul(a, v[i])));
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(g: &ClassicalGroup, u: &Subspace) {
        let w = g.swap_element(u).unwrap();
        assert!(g.contains(&w.h).unwrap());
        assert_eq!(u.image(&w.h), w.w1);
        assert_eq!(w.w1.image(&w.h), *u);
        for z in w.w2.basis() {
            assert_eq!(&w.h.apply(z), z);
        }
        let perp = g.space().perp(u).unwrap();
        assert_eq!(w.w1.sum(&w.w2), perp);
        assert!(w.w1.intersect(&w.w2).is_zero());
        assert!((&w.involution * &w.involution).is_identity());
    }

    #[test]
    fn symplectic_plane_swap() {
        let g = ClassicalGroup::new(&"Sp(6,3)".parse().unwrap()).unwrap();
        let f = g.field().clone();
        let e = |i: usize| {
            let mut v = vec![f.zero(); 6];
            v[i] = f.one();
            v
        };
        let u = Subspace::span(&f, 6, &[e(0), e(1)]).unwrap();
        check(&g, &u);
        let big = Subspace::span(&f, 6, &[e(0), e(1), e(2), e(3)]).unwrap();
        assert!(matches!(g.swap_element(&big), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_swaps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (s, dims) in [("O(7,3)", vec![2, 3]), ("SU(5,2)", vec![2]), ("O-(8,2)", vec![2]), ("O+(8,3)", vec![2, 3])] {
            let g = ClassicalGroup::new(&s.parse().unwrap()).unwrap();
            for &d in &dims {
                for _ in 0..4 {
                    let u = g.random_nonsingular(&mut rng, d).unwrap();
                    check(&g, &u);
                }
            }
        }
    }
}
