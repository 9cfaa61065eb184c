//! Permutations of `{0, .., n-1}` and the alternating-group helpers: cycle
//! notation (1-based in text), supports, parity, and `A_n` class sizes.
//!
//! Composition follows functions: `(s * t)(x) = s(t(x))`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u8).collect(),
        }
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::Parse(format!("not a bijection: {images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of degree `n` from 0-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u8> = (0..n as u8).collect();
        let mut used = vec![false; n];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= n || used[x] {
                    return Err(Error::Parse(format!("bad cycle {c:?} for degree {n}")));
                }
                used[x] = true;
                images[x] = c[(i + 1) % c.len()] as u8;
            }
        }
        Ok(Permutation { images })
    }

    /// Parses `"(1 2 3)(4 5)"` (points 1-based, commas optional); `"()"` is
    /// the identity.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let err = || Error::Parse(format!("bad cycle notation {s:?}"));
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(err)?;
            let close = body.find(')').ok_or_else(err)?;
            let pts = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| match t.parse::<usize>() {
                    Ok(p) if p >= 1 => Ok(p - 1),
                    _ => Err(err()),
                })
                .collect::<Result<Vec<_>>>()?;
            if !pts.is_empty() {
                cycles.push(pts);
            }
            rest = body[close + 1..].trim_start();
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::DimensionMismatch {
                expected: self.degree(),
                got: other.degree(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    /// `t s t^-1`.
    pub fn conjugate_by(&self, t: &Permutation) -> Result<Permutation> {
        t.compose(self)?.compose(&t.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Moved points (0-based).
    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.degree()).filter(|&i| self.apply(i) != i).collect()
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = vec![start];
            seen[start] = true;
            let mut x = self.apply(start);
            while x != start {
                seen[x] = true;
                c.push(x);
                x = self.apply(x);
            }
            out.push(c);
        }
        out
    }

    /// Cycle lengths including fixed points, in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn is_even(&self) -> bool {
        self.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
    }

    pub fn order(&self) -> u64 {
        self.cycle_type()
            .into_iter()
            .fold(1u64, |acc, l| {
                let l = l as u64;
                let (mut a, mut b) = (acc, l);
                while b != 0 {
                    (a, b) = (b, a % b);
                }
                acc / a * l
            })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

/// Degree-less parsing: the degree is the largest point mentioned.
impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .split(|c: char| !c.is_ascii_digit())
            .filter_map(|t| t.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        Self::parse(n, s)
    }
}

/// Conjugacy class of an even permutation in `A_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AltClass {
    pub n: usize,
    pub cycle_type: Vec<usize>,
    pub size: u64,
    /// The `S_n` class splits into two `A_n` classes.
    pub split: bool,
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn alt_class(rep: &Permutation) -> Result<AltClass> {
    let n = rep.degree();
    if n < 5 {
        return Err(Error::Excluded(format!("A({n})")));
    }
    if !rep.is_even() {
        return Err(Error::OddPermutation);
    }
    let ct = rep.cycle_type();
    // centraliser in S_n: prod l^{m_l} m_l!
    let mut cent = 1u64;
    let mut i = 0;
    while i < ct.len() {
        let l = ct[i];
        let m = ct[i..].iter().take_while(|&&x| x == l).count();
        cent *= (l as u64).pow(m as u32) * factorial(m);
        i += m;
    }
    let sn_size = factorial(n) / cent;
    let mut distinct = ct.clone();
    distinct.dedup();
    let split = distinct.len() == ct.len() && ct.iter().all(|l| l % 2 == 1);
    let size = if split { sn_size / 2 } else { sn_size };
    Ok(AltClass {
        n,
        cycle_type: ct,
        size,
        split,
    })
}

/// All even permutations of degree `n`, in lexicographic order of image arrays.
pub fn alternating_elements(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut out = Vec::with_capacity((factorial(n) / 2) as usize);
    loop {
        let p = Permutation { images: cur.clone() };
        if p.is_even() {
            out.push(p);
        }
        // next permutation in lex order
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Generators of `A_n`: `(1 2 3)` with `(1 .. n)` for odd `n` or `(2 .. n)` for even `n`.
pub fn alternating_generators(n: usize) -> Vec<Permutation> {
    let three = Permutation::from_cycles(n, &[vec![0, 1, 2]]).expect("n >= 3");
    let long: Vec<usize> = if n % 2 == 1 { (0..n).collect() } else { (1..n).collect() };
    let long = Permutation::from_cycles(n, &[long]).expect("valid cycle");
    vec![three, long]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Permutation {
        Permutation::parse(n, s).unwrap()
    }

    #[test]
    fn support_and_print() {
        assert!(Permutation::identity(5).support().is_empty());
        let c = p(5, "(1 2 3)");
        assert_eq!(c.support(), [0, 1, 2].into_iter().collect());
        assert_eq!(c.to_string(), "(1 2 3)");
        assert_eq!(p(6, "(1,2)(3 4)").to_string(), "(1 2)(3 4)");
        assert_eq!(Permutation::identity(4).to_string(), "()");
    }

    #[test]
    fn involution_squares_to_identity() {
        let s = p(5, "(1 2)(3 4)");
        assert!(s.compose(&s).unwrap().is_identity());
    }

    #[test]
    fn composition_is_right_to_left() {
        let a = p(3, "(1 2)");
        let b = p(3, "(2 3)");
        // (1 2)(2 3): 3 -> 2 -> 1
        assert_eq!(a.compose(&b).unwrap().to_string(), "(1 2 3)");
        assert!(a.compose(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Permutation::parse(5, "(1 2").is_err());
        assert!(Permutation::parse(5, "(1 6)").is_err());
        assert!(Permutation::parse(5, "(1 2)(2 3)").is_err());
        assert_eq!("(1 4)(2 3)".parse::<Permutation>().unwrap().degree(), 4);
    }

    #[test]
    fn alt_class_sizes() {
        assert_eq!(alt_class(&p(5, "(1 2 3)")).unwrap().size, 20);
        let five = alt_class(&p(5, "(1 2 3 4 5)")).unwrap();
        assert_eq!((five.size, five.split), (12, true));
        assert_eq!(alt_class(&Permutation::identity(5)).unwrap().size, 1);
        assert_eq!(alt_class(&p(5, "(1 2)")).unwrap_err(), Error::OddPermutation);
    }

    #[test]
    fn alternating_enumeration_is_sorted() {
        let a5 = alternating_elements(5);
        assert_eq!(a5.len(), 60);
        assert!(a5.windows(2).all(|w| w[0] < w[1]));
        assert!(a5[0].is_identity());
    }
}
