//! Convergence types of null sequences `r_i = C n_i^{-a} (log n_i)^b`, the
//! linear order on them, order ideals, and elements of prescribed rank
//! fraction.
//!
//! Only this family is modelled. Inside it every limit of `r_i / s_i`
//! exists, so "eventually" stands in for the ultrafilter.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::classical::{ClassicalGroup, Family, GroupDescriptor};
use crate::error::{Error, Result};
use crate::gf::FieldElem;
use crate::linalg::{block_embed, Matrix};

pub type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConvergenceType {
    Zero,
    Power { c: Q, a: Q, b: Q },
}

impl ConvergenceType {
    /// `C n^{-a} (log n)^b`, checked to be a null sequence lying in `L`
    /// (at least of order `1/n`).
    pub fn power(c: Q, a: Q, b: Q) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::OutOfRange(format!("coefficient {c} must be positive")));
        }
        let one = Q::from_integer(1);
        let null = a.is_positive() || (a.is_zero() && b.is_negative());
        if !null {
            return Err(Error::OutOfRange(format!("n^-{a} log^{b} does not tend to 0")));
        }
        let in_l = a < one || (a == one && !b.is_negative());
        if !in_l {
            return Err(Error::OutOfRange(format!("n^-{a} log^{b} decays faster than 1/n")));
        }
        Ok(ConvergenceType::Power { c, a, b })
    }

    /// The type of `1/n`.
    pub fn one_over_n() -> Self {
        let one = Q::from_integer(1);
        ConvergenceType::Power {
            c: one,
            a: one,
            b: Q::zero(),
        }
    }

    fn key(&self) -> Option<(Q, Q)> {
        match *self {
            ConvergenceType::Zero => None,
            ConvergenceType::Power { a, b, .. } => Some((-a, b)),
        }
    }
}

/// `r <= s` iff `r_i / s_i` stays bounded. Ignores `C`.
pub fn ct_compare(r: &ConvergenceType, s: &ConvergenceType) -> Ordering {
    // None < Some: the zero sequence is below everything
    r.key().cmp(&s.key())
}

impl fmt::Display for ConvergenceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvergenceType::Zero => write!(f, "0"),
            ConvergenceType::Power { c, a, b } => {
                write!(f, "{c}*n^-{a}")?;
                if !b.is_zero() {
                    write!(f, "*log^{b}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_q(s: &str) -> Result<Q> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

impl FromStr for ConvergenceType {
    type Err = Error;

    /// `0`, or `C*n^-A` optionally followed by `*log^B`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(ConvergenceType::Zero);
        }
        let parts: Vec<&str> = s.split('*').map(str::trim).collect();
        let bad = || Error::Parse(format!("expected C*n^-A[*log^B], got {s:?}"));
        let (c, rest) = match parts.first() {
            Some(p) if p.starts_with('n') => (Q::from_integer(1), &parts[..]),
            Some(p) => (parse_q(p)?, &parts[1..]),
            None => return Err(bad()),
        };
        let a = match rest.first().and_then(|p| p.strip_prefix("n^")) {
            Some(e) => match e.strip_prefix('-') {
                Some(a) => parse_q(a)?,
                None => -parse_q(e)?,
            },
            None => return Err(bad()),
        };
        let b = match rest.get(1) {
            None => Q::zero(),
            Some(p) => parse_q(p.strip_prefix("log^").ok_or_else(bad)?)?,
        };
        if rest.len() > 2 {
            return Err(bad());
        }
        ConvergenceType::power(c, a, b)
    }
}

/// `{r : r <= cut}` when closed, `{r : r < cut}` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderIdeal {
    pub cut: ConvergenceType,
    pub closed: bool,
}

impl OrderIdeal {
    /// `{0}`.
    pub fn i0() -> Self {
        OrderIdeal {
            cut: ConvergenceType::Zero,
            closed: true,
        }
    }

    /// `{r : n_i r_i` bounded`}`.
    pub fn i1() -> Self {
        OrderIdeal {
            cut: ConvergenceType::one_over_n(),
            closed: true,
        }
    }

    pub fn contains(&self, r: &ConvergenceType) -> bool {
        match ct_compare(r, &self.cut) {
            Ordering::Less => true,
            Ordering::Equal => self.closed,
            Ordering::Greater => false,
        }
    }
}

/// An element of `H` with rank length within `2/n` of `r`, built from
/// `floor(n r / rho)` commuting blocks of rank `rho` on mutually orthogonal
/// non-singular pieces (`rho = rk(g0 - 1)` when a 2x2 block `g0` is given).
///
/// `g0` may be given for SL and Sp only; the default is `[[1,1],[0,1]]`.
pub fn rank_fraction_element(d: &GroupDescriptor, r: Ratio<u64>, g0: Option<&Matrix>) -> Result<Matrix> {
    let g = ClassicalGroup::new(d)?;
    let field = g.field().clone();
    let f = &*field;
    let n = d.n;
    if r.is_zero() {
        return Ok(Matrix::identity(&field, n));
    }
    if r < Ratio::new(1, n as u64) || r > Ratio::new(1, 2) {
        return Err(Error::OutOfRange(format!("rank fraction {r} outside [1/{n}, 1/2]")));
    }
    let nr = (r * Ratio::from_integer(n as u64)).to_integer() as usize;
    let out = match d.family {
        Family::SL | Family::Sp => {
            let block = match g0 {
                Some(b) => {
                    if b.rows() != 2 || b.cols() != 2 || **b.field() != *f {
                        return Err(Error::Precondition("g0 must be a 2x2 matrix over the group's field".into()));
                    }
                    if b.det()? != f.one() || b.is_identity() {
                        return Err(Error::Precondition("g0 must be a non-identity element of SL_2".into()));
                    }
                    b.clone()
                }
                None => Matrix::from_rows(&field, &[vec![f.one(), f.one()], vec![f.zero(), f.one()]])?,
            };
            let rho = block.shift(FieldElem::ONE).rank();
            let m = nr / rho;
            let mut parts = vec![block; m];
            if n > 2 * m {
                parts.push(Matrix::identity(&field, n - 2 * m));
            }
            block_embed(&parts)?
        }
        _ if g0.is_some() => return Err(Error::WrongFamily(format!("g0 on {d}"))),
        Family::SU => {
            // v = e_{2i} + x e_{2i+1} with x conj(x) = -1 is isotropic
            let minus = f.neg(f.one());
            let x = f
                .nonzero_elements()
                .find(|&x| f.mul(x, f.conj_unchecked(x)) == minus)
                .ok_or_else(|| Error::Internal("norm map misses -1".into()))?;
            let a = f
                .nonzero_elements()
                .find(|&a| f.add(a, f.conj_unchecked(a)).is_zero())
                .ok_or_else(|| Error::Internal("no trace-zero scalar".into()))?;
            let mut out = Matrix::identity(&field, n);
            for i in 0..nr {
                let mut v = vec![FieldElem::ZERO; n];
                v[2 * i] = f.one();
                v[2 * i + 1] = x;
                out = &out * &g.space().transvection(&v, a)?;
            }
            out
        }
        Family::OmegaOdd | Family::OmegaPlus | Family::OmegaMinus if !d.char_two() => {
            // -1 on planes of discriminant 1, away from the last coordinate
            let m = nr / 2;
            let mut diag = vec![f.one(); n];
            for x in diag.iter_mut().take(2 * m) {
                *x = f.neg(f.one());
            }
            Matrix::diag(&field, &diag)
        }
        Family::OmegaPlus | Family::OmegaMinus => {
            // an even number of reflections in e + f, one per hyperbolic pair
            let m = nr / 2;
            let mut out = Matrix::identity(&field, n);
            for j in 0..2 * m {
                let mut v = vec![FieldElem::ZERO; n];
                v[2 * j] = f.one();
                v[2 * j + 1] = f.one();
                out = &out * &g.space().reflection(&v)?;
            }
            out
        }
        Family::OmegaOdd | Family::Alt => unreachable!("handled above"),
    };
    if !g.contains(&out)? {
        return Err(Error::Internal(format!("rank fraction element not in {d}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengths::rank_length_of;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn ct(s: &str) -> ConvergenceType {
        s.parse().unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(ct_compare(&ConvergenceType::Zero, &ct("1*n^-1")), Ordering::Less);
        assert_eq!(ct_compare(&ct("1*n^-1"), &ct("5*n^-1")), Ordering::Equal);
        assert_eq!(ct_compare(&ct("1*n^-1/2"), &ct("1*n^-1")), Ordering::Greater);
        assert_eq!(ct_compare(&ct("1*n^-1/2"), &ct("3*n^-1*log^1")), Ordering::Greater);
        assert_eq!(ct_compare(&ct("1*n^-1*log^2"), &ct("1*n^-1*log^1")), Ordering::Greater);
    }

    #[test]
    fn membership_in_l() {
        assert!(ConvergenceType::power(q(1, 1), q(2, 1), q(0, 1)).is_err());
        assert!(ConvergenceType::power(q(1, 1), q(1, 1), q(-1, 1)).is_err());
        assert!(ConvergenceType::power(q(1, 1), q(0, 1), q(0, 1)).is_err());
        assert!(ConvergenceType::power(q(1, 1), q(0, 1), q(-1, 1)).is_ok());
        assert!(ConvergenceType::power(q(0, 1), q(1, 2), q(0, 1)).is_err());
    }

    #[test]
    fn ideals() {
        let i0 = OrderIdeal::i0();
        let i1 = OrderIdeal::i1();
        assert!(i0.contains(&ConvergenceType::Zero));
        assert!(!i0.contains(&ct("1*n^-1")));
        assert!(i1.contains(&ct("7*n^-1")));
        assert!(!i1.contains(&ct("1*n^-1*log^1")));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "1*n^-1/2", "3*n^-1*log^1", "2/3*n^-1/3*log^-2", "1*n^0*log^-1"] {
            let t = ct(s);
            assert_eq!(ct(&t.to_string()), t);
        }
        assert_eq!(ct("n^-1"), ConvergenceType::one_over_n());
        for s in ["", "1*m^-1", "1*n^-1*log", "x*n^-1", "1*n^-1*log^1*n"] {
            assert!(s.parse::<ConvergenceType>().is_err(), "{s}");
        }
    }

    #[test]
    fn rank_fraction_examples() {
        let d: GroupDescriptor = "SL(20,5)".parse().unwrap();
        let g = rank_fraction_element(&d, Ratio::new(1, 4), None).unwrap();
        assert_eq!(rank_length_of(&g).ratio(), Ratio::new(1, 4));
        assert!(rank_length_of(&rank_fraction_element(&d, Ratio::from_integer(0), None).unwrap()).is_zero());
        let sp: GroupDescriptor = "Sp(20,3)".parse().unwrap();
        let h = rank_fraction_element(&sp, Ratio::new(1, 5), None).unwrap();
        assert_eq!(rank_length_of(&h).ratio(), Ratio::new(1, 5));
        assert!(rank_fraction_element(&d, Ratio::new(3, 4), None).is_err());
        assert!(rank_fraction_element(&d, Ratio::new(1, 40), None).is_err());
    }

    #[test]
    fn g0_with_full_rank() {
        let d: GroupDescriptor = "SL(10,5)".parse().unwrap();
        let f = crate::gf::Field::new(5, 1).unwrap();
        let g0 = Matrix::diag(&f, &[f.from_int(2), f.from_int(3)]);
        let g = rank_fraction_element(&d, Ratio::new(1, 2), Some(&g0)).unwrap();
        assert_eq!(rank_length_of(&g).ratio(), Ratio::new(2, 5));
        let o: GroupDescriptor = "O(7,3)".parse().unwrap();
        assert!(matches!(rank_fraction_element(&o, Ratio::new(1, 7), Some(&g0)), Err(Error::WrongFamily(_))));
    }
}
