//! Length functions: rank length, projective rank length, conjugacy length
//! and Hamming length.
//!
//! The first, second and fourth are exact rationals with denominator `n`.
//! The conjugacy length `log|h^H| / log|H|` is irrational in general, so it
//! is kept as the exact pair (class size, group order); comparisons between
//! such values go through the pair, and the float is for display only.

use std::fmt;

use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::classical::{ClassicalGroup, GroupTable};
use crate::error::{Error, Result};
use crate::gf::FieldElem;
use crate::linalg::{min_shift_rank, Matrix};
use crate::perm::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LengthValue(Ratio<u64>);

impl LengthValue {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::OutOfRange(format!("length {num}/{den}")));
        }
        Ok(LengthValue(Ratio::new(num, den)))
    }

    pub fn zero() -> Self {
        LengthValue(Ratio::from_integer(0))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn num(self) -> u64 {
        *self.0.numer()
    }

    pub fn den(self) -> u64 {
        *self.0.denom()
    }

    pub fn is_zero(self) -> bool {
        self.num() == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num() as f64 / self.den() as f64
    }
}

impl fmt::Display for LengthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num(), self.den())
    }
}

impl Serialize for LengthValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LengthValue", 2)?;
        st.serialize_field("num", &self.num())?;
        st.serialize_field("den", &self.den())?;
        st.end()
    }
}

fn frac(num: usize, den: usize) -> LengthValue {
    LengthValue(Ratio::new(num as u64, den as u64))
}

fn member(g: &ClassicalGroup, m: &Matrix) -> Result<()> {
    if g.contains(m)? {
        Ok(())
    } else {
        Err(Error::NotMember(g.descriptor().to_string()))
    }
}

/// `rk(1 - g) / n`.
pub fn rank_length(g: &ClassicalGroup, m: &Matrix) -> Result<LengthValue> {
    member(g, m)?;
    Ok(rank_length_of(m))
}

/// Rank length without the membership check.
pub fn rank_length_of(m: &Matrix) -> LengthValue {
    frac(m.shift(FieldElem::ONE).rank(), m.rows())
}

/// `min over nonzero scalars lambda of rk(lambda - g) / n`, scalars taken in
/// the matrix field (GF(q^2) for unitary groups).
pub fn projective_rank_length(g: &ClassicalGroup, m: &Matrix) -> Result<LengthValue> {
    member(g, m)?;
    Ok(projective_rank_length_of(m))
}

pub fn projective_rank_length_of(m: &Matrix) -> LengthValue {
    let scalars: Vec<FieldElem> = m.field().nonzero_elements().collect();
    let (_, r) = min_shift_rank(m, &scalars).expect("nonempty scalar set");
    frac(r, m.rows())
}

/// `|supp(sigma)| / n`.
pub fn hamming_length(p: &Permutation) -> LengthValue {
    frac(p.support().len(), p.degree().max(1))
}

/// `log |h^H| / log |H|` kept as its defining pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugacyLength {
    pub class_size: u64,
    pub group_order: u64,
    pub value: f64,
}

impl ConjugacyLength {
    pub fn is_zero(&self) -> bool {
        self.class_size == 1
    }

    /// `l(x) <= l(y) + l(z)` with all three in one group, decided exactly:
    /// `|x^H| <= |y^H| |z^H|`.
    pub fn subadditive(&self, y: &ConjugacyLength, z: &ConjugacyLength) -> bool {
        (self.class_size as u128) <= y.class_size as u128 * z.class_size as u128
    }
}

pub fn conjugacy_length(t: &GroupTable, i: u32) -> Result<ConjugacyLength> {
    if i as usize >= t.len() {
        return Err(Error::OutOfRange(format!("element {i} of {}", t.label())));
    }
    let class_size = t.class_size(t.class_of(i));
    let group_order = t.len() as u64;
    Ok(ConjugacyLength {
        class_size,
        group_order,
        value: (class_size as f64).ln() / (group_order as f64).ln(),
    })
}

/// The length the relative generation results use on a table element:
/// rank length for matrix groups, Hamming length for alternating groups.
pub fn table_rank_length(t: &GroupTable, i: u32) -> LengthValue {
    match t.matrix(i) {
        Some(m) => rank_length_of(&m),
        None => hamming_length(&t.perm(i).expect("permutation table")),
    }
}

/// Projective rank length for matrix groups, Hamming length for alternating
/// groups.
pub fn table_projective_length(t: &GroupTable, i: u32) -> LengthValue {
    match t.matrix(i) {
        Some(m) => projective_rank_length_of(&m),
        None => hamming_length(&t.perm(i).expect("permutation table")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::DEFAULT_CAP;

    fn group(s: &str) -> ClassicalGroup {
        ClassicalGroup::new(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn rank_lengths() {
        let g = group("Sp(6,5)");
        let f = g.field().clone();
        let one = Matrix::identity(&f, 6);
        assert!(rank_length(&g, &one).unwrap().is_zero());
        let minus = Matrix::scalar(&f, 6, f.neg(f.one()));
        assert_eq!(rank_length(&g, &minus).unwrap(), LengthValue::new(1, 1).unwrap());
        assert!(projective_rank_length(&g, &minus).unwrap().is_zero());
    }

    #[test]
    fn example_element() {
        let g = group("SL(7,7)");
        let f = g.field().clone();
        let l = f.from_int(2);
        let mut d = vec![l; 7];
        d[0] = f.one();
        // det = 2^6 = 64 = 1 mod 7
        let h1 = Matrix::diag(&f, &d);
        assert_eq!(rank_length(&g, &h1).unwrap(), LengthValue::new(6, 7).unwrap());
        assert_eq!(projective_rank_length(&g, &h1).unwrap(), LengthValue::new(1, 7).unwrap());
    }

    #[test]
    fn non_members_are_rejected() {
        let g = group("SL(3,5)");
        let f = g.field().clone();
        let m = Matrix::scalar(&f, 3, f.from_int(2));
        assert!(matches!(rank_length(&g, &m), Err(Error::NotMember(_))));
    }

    #[test]
    fn hamming() {
        assert!(hamming_length(&Permutation::identity(6)).is_zero());
        let c: Permutation = "(1 2 3 4 5)".parse().unwrap();
        assert_eq!(hamming_length(&c), LengthValue::new(1, 1).unwrap());
        let d = Permutation::parse(8, "(1 2)(3 4)").unwrap();
        assert_eq!(hamming_length(&d), LengthValue::new(1, 2).unwrap());
        let t = Permutation::parse(5, "(1 2 3)").unwrap();
        assert_eq!(hamming_length(&t), LengthValue::new(3, 5).unwrap());
    }

    #[test]
    fn conjugacy_lengths() {
        let t = GroupTable::enumerate(&"SL(2,5)".parse().unwrap(), DEFAULT_CAP).unwrap();
        assert!(conjugacy_length(&t, t.identity()).unwrap().is_zero());
        for i in 0..t.len() as u32 {
            let c = conjugacy_length(&t, i).unwrap();
            assert!((0.0..1.0).contains(&c.value));
        }
        assert!(conjugacy_length(&t, 999).is_err());
    }

    #[test]
    fn json_shape() {
        let v = LengthValue::new(2, 4).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"num":1,"den":2}"#);
    }
}
