//! Two elements of `SL_q(q)` that do not generate each other in few steps.
//!
//! With `F_q^* = <zeta>`, `q - 1 = ab`, `gcd(a, b) = 1`, put `lambda = zeta^a`,
//! `mu = zeta^b`, `h1 = diag(1, lambda, .., lambda)` and `h2 = diag(1, mu, .., mu)`.
//! Every conjugate of `h1^{+-1}` is `lambda^{+-1}` times a matrix differing
//! from the identity in rank one, so a product `w` of `k` of them satisfies
//! `rk(w - nu) <= k` for some `nu` in `<lambda>`. For `h2` the least such
//! rank is `q - 1`, because `mu` is not in `<lambda>`. That rank is the
//! certificate: it excludes `h2` from every `k`-fold product with `k < q - 1`.
//! Sampling only exercises the upper bound on words.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{prime_power, Field, FieldElem};
use crate::linalg::{cyclic_group, min_shift_rank, Matrix};

#[derive(Debug, Clone)]
pub struct ExampleInstance {
    pub q: u64,
    pub a: u64,
    pub b: u64,
    pub field: Arc<Field>,
    pub lambda: FieldElem,
    pub mu: FieldElem,
    pub h1: Matrix,
    pub h2: Matrix,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn build_example(q: u64, a: u64, b: u64) -> Result<ExampleInstance> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    if a < 2 || b < 2 || a * b != q - 1 || gcd(a, b) != 1 {
        return Err(Error::Precondition(format!(
            "need a, b > 1 coprime with ab = q - 1, got q = {q}, a = {a}, b = {b}"
        )));
    }
    let (p, k) = prime_power(q)?;
    let field = Field::new(p as u64, k)?;
    let f = &*field;
    let zeta = f.primitive_element();
    let lambda = f.pow(zeta, a as i64)?;
    let mu = f.pow(zeta, b as i64)?;
    let n = q as usize;
    let diag = |x: FieldElem| {
        let mut d = vec![x; n];
        d[0] = f.one();
        Matrix::diag(&field, &d)
    };
    let inst = ExampleInstance {
        q,
        a,
        b,
        lambda,
        mu,
        h1: diag(lambda),
        h2: diag(mu),
        field: field.clone(),
    };
    let gl = cyclic_group(f, lambda)?;
    let gm = cyclic_group(f, mu)?;
    if gl.contains(&mu) || gm.contains(&lambda) {
        return Err(Error::Internal("lambda and mu generate each other".into()));
    }
    if inst.h1.det()? != f.one() || inst.h2.det()? != f.one() {
        return Err(Error::Internal("example elements are not in SL".into()));
    }
    Ok(inst)
}

impl ExampleInstance {
    /// The same instance with the roles of `(a, lambda, h1)` and `(b, mu, h2)`
    /// exchanged.
    pub fn swapped(&self) -> ExampleInstance {
        ExampleInstance {
            q: self.q,
            a: self.b,
            b: self.a,
            field: self.field.clone(),
            lambda: self.mu,
            mu: self.lambda,
            h1: self.h2.clone(),
            h2: self.h1.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.q as usize
    }

    /// `min over nu in <lambda> of rk(g - nu)`.
    pub fn certificate(&self, g: &Matrix) -> Result<usize> {
        let shifts = cyclic_group(&self.field, self.lambda)?;
        Ok(min_shift_rank(g, &shifts)?.1)
    }

    /// A product of `k` random conjugates of `h1^{+-1}`.
    pub fn random_word<R: Rng>(&self, rng: &mut R, k: usize) -> Matrix {
        let f = &*self.field;
        let n = self.dim();
        let inv = f.inv(self.lambda).expect("nonzero");
        let mut w = Matrix::identity(&self.field, n);
        for _ in 0..k {
            let x = if rng.gen_bool(0.5) { self.lambda } else { inv };
            let mut d = vec![x; n];
            d[0] = f.one();
            let mut h = Matrix::diag(&self.field, &d);
            // conjugate by 2n random elementary transvections, as row/column ops
            for _ in 0..2 * n {
                let i = rng.gen_range(0..n);
                let j = (i + rng.gen_range(1..n)) % n;
                let c = f.elem(rng.gen_range(1..f.order())).expect("in range");
                conjugate_elementary(f, &mut h, i, j, c);
            }
            w = &w * &h;
        }
        w
    }
}

/// `h <- E h E^{-1}` with `E = 1 + c e_ij`.
fn conjugate_elementary(f: &Field, h: &mut Matrix, i: usize, j: usize, c: FieldElem) {
    let n = h.rows();
    for col in 0..n {
        let v = f.add(h.get(i, col), f.mul(c, h.get(j, col)));
        h.set(i, col, v);
    }
    for row in 0..n {
        let v = f.sub(h.get(row, j), f.mul(c, h.get(row, i)));
        h.set(row, j, v);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LengthReport {
    pub k: usize,
    pub samples: usize,
    /// `histogram[r]` words had certificate `r`.
    pub histogram: Vec<usize>,
    pub max_certificate: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub q: u64,
    pub a: u64,
    pub b: u64,
    pub lambda: String,
    pub mu: String,
    pub k_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub h2_certificate: usize,
    pub lengths: Vec<LengthReport>,
    pub pass: bool,
}

pub fn verify_obstruction(inst: &ExampleInstance, k_max: usize, samples: usize, seed: u64) -> Result<ObstructionReport> {
    let q = inst.q as usize;
    if k_max == 0 || k_max > q - 2 {
        return Err(Error::OutOfRange(format!("k_max = {k_max}, need 1 <= k_max <= {}", q - 2)));
    }
    if samples == 0 {
        return Err(Error::Precondition("samples must be at least 1".into()));
    }
    let h2_certificate = inst.certificate(&inst.h2)?;
    let mut lengths = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let certs: Vec<usize> = (0..samples)
            .into_par_iter()
            .map(|idx| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(((k as u64) << 32) | idx as u64);
                let w = inst.random_word(&mut rng, k);
                inst.certificate(&w)
            })
            .collect::<Result<_>>()?;
        let mut histogram = vec![0; q + 1];
        for &c in &certs {
            histogram[c] += 1;
        }
        lengths.push(LengthReport {
            k,
            samples,
            max_certificate: certs.iter().copied().max().unwrap_or(0),
            violations: certs.iter().filter(|&&c| c > k).count(),
            histogram,
        });
    }
    let pass = h2_certificate == q - 1 && lengths.iter().all(|l| l.violations == 0);
    Ok(ObstructionReport {
        q: inst.q,
        a: inst.a,
        b: inst.b,
        lambda: inst.field.format(inst.lambda),
        mu: inst.field.format(inst.mu),
        k_max,
        samples,
        seed,
        h2_certificate,
        lengths,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q7_orders() {
        let inst = build_example(7, 2, 3).unwrap();
        let f = &*inst.field;
        assert_eq!(f.mult_order(inst.lambda).unwrap(), 3);
        assert_eq!(f.mult_order(inst.mu).unwrap(), 2);
    }

    #[test]
    fn bad_factorisations() {
        assert!(matches!(build_example(5, 2, 2), Err(Error::Precondition(_))));
        assert!(matches!(build_example(7, 1, 6), Err(Error::Precondition(_))));
        assert!(matches!(build_example(13, 2, 6), Err(Error::Precondition(_))));
    }

    #[test]
    fn single_conjugate_has_certificate_one() {
        let inst = build_example(7, 2, 3).unwrap();
        assert_eq!(inst.certificate(&inst.h1).unwrap(), 1);
        assert_eq!(inst.certificate(&inst.h2).unwrap(), 6);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(inst.certificate(&inst.random_word(&mut rng, 1)).unwrap(), 1);
        }
    }

    #[test]
    fn words_stay_in_sl() {
        let inst = build_example(7, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = inst.random_word(&mut rng, 4);
        assert_eq!(w.det().unwrap(), FieldElem::ONE);
    }

    #[test]
    fn k_max_range() {
        let inst = build_example(7, 2, 3).unwrap();
        assert!(matches!(verify_obstruction(&inst, 6, 1, 0), Err(Error::OutOfRange(_))));
        assert!(matches!(verify_obstruction(&inst, 0, 1, 0), Err(Error::OutOfRange(_))));
        assert!(verify_obstruction(&inst, 5, 0, 0).is_err());
    }

    #[test]
    fn q7_passes_and_replays() {
        let inst = build_example(7, 2, 3).unwrap();
        let r = verify_obstruction(&inst, 5, 50, 42).unwrap();
        assert!(r.pass);
        assert_eq!(r.h2_certificate, 6);
        let again = verify_obstruction(&inst, 5, 50, 42).unwrap();
        assert_eq!(format!("{:?}", r.lengths), format!("{:?}", again.lengths));
    }

    #[test]
    fn swapped_roles_pass() {
        let inst = build_example(7, 2, 3).unwrap().swapped();
        assert!(verify_obstruction(&inst, 5, 50, 1).unwrap().pass);
    }
}
