//! Finite fields GF(p^k) in polynomial representation.
//!
//! An element is stored as the integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! built from its coefficient vector in the basis `1, t, ..., t^{k-1}`, where
//! `t` is a root of the field's modulus. Integer order on these codes is the
//! total order used for every deterministic choice in the crate (it compares
//! coefficient vectors from the top coefficient down).
//!
//! Multiplication goes through discrete log / exp tables built from the
//! least primitive element, so a `Field` is cheap to query but should be
//! shared (`Arc<Field>`) rather than rebuilt.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Wraps a raw code; callers guarantee it is below the field order.
    #[inline]
    pub(crate) const fn raw(code: u32) -> Self {
        FieldElem(code)
    }
}

pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    primitive: FieldElem,
    /// exp[i] = primitive^i for i in 0..q-1
    exp: Vec<u32>,
    /// log[x] for x != 0; log[0] is unused
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k`, or fails when `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::NotPrimePower(q));
    }
    Ok((p as u32, k))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---- dense polynomial helpers over GF(p), little-endian coefficient vectors ----

fn poly_trim(a: &mut Vec<u32>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm && r.len() > 1 {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn poly_from_index(mut idx: u32, p: u32, len: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    for c in v.iter_mut() {
        *c = idx % p;
        idx /= p;
    }
    v
}

/// Irreducibility by trial division against every monic polynomial of
/// degree at most half the degree of `m`.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut f = poly_from_index(idx as u32, p, d);
            f.push(1);
            let mut r = poly_rem(m, &f, p);
            poly_trim(&mut r);
            if r.len() == 1 && r[0] == 0 {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds GF(p^k) with the least irreducible monic modulus of degree k.
    pub fn new(p: u64, k: u32) -> Result<Arc<Field>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = (p as u128).pow(k);
        if q > MAX_ORDER as u128 {
            return Err(Error::FieldTooLarge(q.min(u64::MAX as u128) as u64));
        }
        let p = p as u32;
        let q = q as u32;
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            let count = q; // p^k candidates for the lower coefficients
            (0..count)
                .map(|idx| {
                    let mut m = poly_from_index(idx, p, k as usize);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible(m, p))
                .ok_or_else(|| Error::Internal("no irreducible modulus found".into()))?
        };
        let mut field = Field {
            p,
            k,
            q,
            modulus,
            primitive: FieldElem::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add: None,
        };
        field.neg = (0..q).map(|x| field.neg_slow(x)).collect();
        field.build_tables()?;
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_slow(a, b);
                }
            }
            field.add = Some(table);
        }
        Ok(Arc::new(field))
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let k = self.k as usize;
        let pa = poly_from_index(a, self.p, k);
        let pb = poly_from_index(b, self.p, k);
        let prod = poly_mul(&pa, &pb, self.p);
        let r = if self.k == 1 {
            prod
        } else {
            poly_rem(&prod, &self.modulus, self.p)
        };
        let mut idx = 0u32;
        for (i, &c) in r.iter().enumerate().take(k) {
            idx += c * self.p.pow(i as u32);
        }
        idx
    }

    fn add_slow(&self, mut a: u32, mut b: u32) -> u32 {
        if self.k == 1 {
            return (a + b) % self.p;
        }
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg_slow(&self, mut a: u32) -> u32 {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.k {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn build_tables(&mut self) -> Result<()> {
        let order = (self.q - 1) as u64;
        let factors = prime_factors(order);
        let pow_slow = |x: u32, mut e: u64, f: &Field| {
            let mut base = x;
            let mut acc = 1u32;
            while e > 0 {
                if e & 1 == 1 {
                    acc = f.mul_slow(acc, base);
                }
                base = f.mul_slow(base, base);
                e >>= 1;
            }
            acc
        };
        let generator = (1..self.q)
            .find(|&x| factors.iter().all(|&r| pow_slow(x, order / r, self) != 1))
            .ok_or_else(|| Error::Internal("no primitive element".into()))?;
        self.primitive = FieldElem(generator);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; self.q as usize];
        let mut acc = 1u32;
        for i in 0..order as u32 {
            exp.push(acc);
            log[acc as usize] = i;
            acc = self.mul_slow(acc, generator);
        }
        if acc != 1 {
            return Err(Error::Internal("exp table did not close".into()));
        }
        self.exp = exp;
        self.log = log;
        Ok(())
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic modulus, little-endian coefficients.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// The least element of multiplicative order q - 1.
    #[inline]
    pub fn primitive_element(&self) -> FieldElem {
        self.primitive
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElem> {
        (1..self.q).map(FieldElem)
    }

    /// Reads an element from its integer code, rejecting out-of-range codes.
    pub fn elem(&self, code: u32) -> Result<FieldElem> {
        if code >= self.q {
            return Err(Error::OutOfRange(format!(
                "element code {code} in field of order {}",
                self.q
            )));
        }
        Ok(FieldElem(code))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        poly_from_index(x.0, self.p, self.k as usize)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() != self.k as usize {
            return Err(Error::DimensionMismatch {
                expected: self.k as usize,
                got: coeffs.len(),
            });
        }
        let mut idx = 0;
        for (i, &c) in coeffs.iter().enumerate() {
            if c >= self.p {
                return Err(Error::OutOfRange(format!("coefficient {c} mod {}", self.p)));
            }
            idx += c * self.p.pow(i as u32);
        }
        Ok(FieldElem(idx))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.k == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= self.p { s - self.p } else { s });
        }
        match &self.add {
            Some(t) => FieldElem(t[(a.0 * self.q + b.0) as usize]),
            None => FieldElem(self.add_slow(a.0, b.0)),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let n = self.q - 1;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        FieldElem(self.exp[(if s >= n { s - n } else { s }) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElem(self.exp[((n - l) % n) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`; negative exponents need `a != 0`, and `0^0 = 1`.
    pub fn pow(&self, a: FieldElem, e: i64) -> Result<FieldElem> {
        if a.is_zero() {
            return match e {
                0 => Ok(FieldElem::ONE),
                e if e > 0 => Ok(FieldElem::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        let n = (self.q - 1) as i64;
        let l = self.log[a.0 as usize] as i64;
        let idx = ((l as i128 * e as i128).rem_euclid(n as i128)) as usize;
        Ok(FieldElem(self.exp[idx]))
    }

    /// Discrete logarithm base the primitive element.
    pub fn log(&self, a: FieldElem) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.log[a.0 as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElem) -> Result<u32> {
        let l = self.log(a)?;
        let n = self.q - 1;
        Ok(n / gcd(l, n))
    }

    /// x -> x^(p^(k/2)), the involution of GF(q^2) over GF(q).
    pub fn conj(&self, a: FieldElem) -> Result<FieldElem> {
        if self.k % 2 == 1 {
            return Err(Error::NoConjugation(self.k));
        }
        Ok(self.conj_unchecked(a))
    }

    /// Conjugation for fields known to have even degree; identity otherwise.
    #[inline]
    pub(crate) fn conj_unchecked(&self, a: FieldElem) -> FieldElem {
        if self.k % 2 == 1 || a.is_zero() {
            return a;
        }
        let n = (self.q - 1) as u64;
        let r = (self.p as u64).pow(self.k / 2);
        let l = self.log[a.0 as usize] as u64;
        FieldElem(self.exp[((l * r) % n) as usize])
    }

    /// Order of the subfield fixed by `conj` (only meaningful for even k).
    pub fn conj_subfield_order(&self) -> u32 {
        self.p.pow(self.k / 2)
    }

    pub fn is_square(&self, a: FieldElem) -> bool {
        a.is_zero() || self.p == 2 || self.log[a.0 as usize] % 2 == 0
    }

    /// 0 for nonzero squares, 1 for non-squares. Needs odd characteristic.
    pub fn square_class(&self, a: FieldElem) -> Result<u8> {
        if self.p == 2 {
            return Err(Error::SquareClass("characteristic 2"));
        }
        if a.is_zero() {
            return Err(Error::SquareClass("zero has no square class"));
        }
        Ok((self.log[a.0 as usize] % 2) as u8)
    }

    pub fn sqrt(&self, a: FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return Some(a);
        }
        let l = self.log[a.0 as usize];
        if self.p == 2 {
            // squaring is a bijection; x^(q/2) squares back to x
            return self.pow(a, (self.q / 2) as i64).ok();
        }
        if l % 2 == 1 {
            return None;
        }
        Some(FieldElem(self.exp[(l / 2) as usize]))
    }

    /// The least non-square (odd characteristic only).
    pub fn least_non_square(&self) -> Option<FieldElem> {
        self.nonzero_elements().find(|&x| !self.is_square(x))
    }

    pub fn format(&self, a: FieldElem) -> String {
        if self.k == 1 {
            a.0.to_string()
        } else {
            self.coeffs(a)
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }

    /// Inverse of [`Field::format`].
    pub fn parse(&self, s: &str) -> Result<FieldElem> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad field element {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if self.k == 1 {
            if parts.len() != 1 {
                return Err(Error::Parse(format!("bad prime-field element {s:?}")));
            }
            return self.elem(parts[0]);
        }
        self.from_coeffs(&parts)
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A small expression language over one field, used to evaluate the
/// operations exposed on the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldExpr {
    Const(FieldElem),
    Add(Box<FieldExpr>, Box<FieldExpr>),
    Mul(Box<FieldExpr>, Box<FieldExpr>),
    Neg(Box<FieldExpr>),
    Inv(Box<FieldExpr>),
    Pow(Box<FieldExpr>, i64),
    Conj(Box<FieldExpr>),
}

impl FieldExpr {
    pub fn eval(&self, f: &Field) -> Result<FieldElem> {
        Ok(match self {
            FieldExpr::Const(c) => *c,
            FieldExpr::Add(a, b) => f.add(a.eval(f)?, b.eval(f)?),
            FieldExpr::Mul(a, b) => f.mul(a.eval(f)?, b.eval(f)?),
            FieldExpr::Neg(a) => f.neg(a.eval(f)?),
            FieldExpr::Inv(a) => f.inv(a.eval(f)?)?,
            FieldExpr::Pow(a, e) => f.pow(a.eval(f)?, *e)?,
            FieldExpr::Conj(a) => f.conj(a.eval(f)?)?,
        })
    }
}
