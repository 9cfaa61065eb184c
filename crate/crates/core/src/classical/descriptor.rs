use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{prime_power, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    SL,
    SU,
    Sp,
    OmegaOdd,
    OmegaPlus,
    OmegaMinus,
    Alt,
}

/// A group label: a classical family with dimension and field order, or an
/// alternating group of degree `n` (then `q == 0`).
///
/// Text grammar: `SL(n,q)`, `SU(n,q)`, `Sp(n,q)` (n even), `O(n,q)` (n odd,
/// optional `:d` for the non-square discriminant), `O+(n,q)`, `O-(n,q)`,
/// `A(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupDescriptor {
    pub family: Family,
    pub n: usize,
    pub q: u64,
    /// Only for `OmegaOdd`: the last diagonal Gram entry is a non-square.
    pub nonsquare_disc: bool,
}

impl GroupDescriptor {
    pub fn new(family: Family, n: usize, q: u64) -> Result<Self> {
        let d = GroupDescriptor {
            family,
            n,
            q,
            nonsquare_disc: false,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn alt(n: usize) -> Result<Self> {
        Self::new(Family::Alt, n, 0)
    }

    pub fn with_nonsquare_disc(mut self) -> Result<Self> {
        if self.family != Family::OmegaOdd {
            return Err(Error::WrongFamily(format!("discriminant flag on {self}")));
        }
        self.nonsquare_disc = true;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |why: &str| Err(Error::Excluded(format!("{self} ({why})")));
        let (p, _) = if self.family == Family::Alt {
            (0, 0)
        } else {
            prime_power(self.q)?
        };
        match self.family {
            Family::SL => {
                if self.n < 2 {
                    return bad("n >= 2");
                }
                if self.n == 2 && (self.q == 2 || self.q == 3) {
                    return bad("SL_2(2), SL_2(3) are solvable");
                }
            }
            Family::SU => {
                if self.n < 3 {
                    return bad("n >= 3");
                }
                if self.n == 3 && self.q == 2 {
                    return bad("SU_3(2) is solvable");
                }
            }
            Family::Sp => {
                if self.n % 2 == 1 || self.n < 4 {
                    return bad("n = 2m with m >= 2");
                }
                if self.n == 4 && self.q == 2 {
                    return bad("Sp_4(2) is not perfect");
                }
            }
            Family::OmegaOdd => {
                if self.n % 2 == 0 || self.n < 5 {
                    return bad("n = 2m + 1 with m >= 2");
                }
                if p == 2 {
                    return bad("odd dimension needs odd q");
                }
            }
            Family::OmegaPlus | Family::OmegaMinus => {
                if self.n % 2 == 1 || self.n < 6 {
                    return bad("n = 2m with m >= 3");
                }
            }
            Family::Alt => {
                if self.n < 5 {
                    return bad("n >= 5");
                }
            }
        }
        if self.nonsquare_disc && self.family != Family::OmegaOdd {
            return bad("discriminant flag only for odd orthogonal groups");
        }
        Ok(())
    }

    pub fn is_classical(&self) -> bool {
        self.family != Family::Alt
    }

    pub fn is_orthogonal(&self) -> bool {
        matches!(
            self.family,
            Family::OmegaOdd | Family::OmegaPlus | Family::OmegaMinus
        )
    }

    pub fn char_two(&self) -> bool {
        self.is_classical() && self.q % 2 == 0
    }

    /// GF(q), or GF(q^2) for unitary groups.
    pub fn matrix_field(&self) -> Result<Arc<Field>> {
        if !self.is_classical() {
            return Err(Error::WrongFamily(self.to_string()));
        }
        let (p, e) = prime_power(self.q)?;
        let k = if self.family == Family::SU { 2 * e } else { e };
        Field::new(p as u64, k)
    }

    /// Group order from the standard formulas.
    pub fn order(&self) -> u128 {
        let q = self.q as u128;
        let n = self.n as u32;
        let prod = |range: std::ops::RangeInclusive<u32>, f: &dyn Fn(u32) -> u128| -> u128 {
            range.map(f).product()
        };
        match self.family {
            Family::SL => q.pow(n * (n - 1) / 2) * prod(2..=n, &|i| q.pow(i) - 1),
            Family::SU => {
                q.pow(n * (n - 1) / 2)
                    * prod(2..=n, &|i| if i % 2 == 0 { q.pow(i) - 1 } else { q.pow(i) + 1 })
            }
            Family::Sp => {
                let m = n / 2;
                q.pow(m * m) * prod(1..=m, &|i| q.pow(2 * i) - 1)
            }
            Family::OmegaOdd => {
                let m = (n - 1) / 2;
                q.pow(m * m) * prod(1..=m, &|i| q.pow(2 * i) - 1) / 2
            }
            Family::OmegaPlus | Family::OmegaMinus => {
                let m = n / 2;
                let so = q.pow(m * (m - 1)) * prod(1..=m - 1, &|i| q.pow(2 * i) - 1);
                let so = if self.family == Family::OmegaPlus {
                    so * (q.pow(m) - 1)
                } else {
                    so * (q.pow(m) + 1)
                };
                if q % 2 == 0 {
                    so
                } else {
                    so / 2
                }
            }
            Family::Alt => (1..=self.n as u128).product::<u128>() / 2,
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::SL => "SL",
            Family::SU => "SU",
            Family::Sp => "Sp",
            Family::OmegaOdd => "O",
            Family::OmegaPlus => "O+",
            Family::OmegaMinus => "O-",
            Family::Alt => return write!(f, "A({})", self.n),
        };
        write!(f, "{name}({},{})", self.n, self.q)?;
        if self.nonsquare_disc {
            write!(f, ":d")?;
        }
        Ok(())
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = || Error::Parse(format!("bad group descriptor {s:?}"));
        let (body, disc) = match s.strip_suffix(":d") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let open = body.find('(').ok_or_else(err)?;
        let inner = body[open + 1..].strip_suffix(')').ok_or_else(err)?;
        let args = inner
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| err()))
            .collect::<Result<Vec<_>>>()?;
        let family = match &body[..open] {
            "SL" => Family::SL,
            "SU" => Family::SU,
            "Sp" => Family::Sp,
            "O" => Family::OmegaOdd,
            "O+" => Family::OmegaPlus,
            "O-" => Family::OmegaMinus,
            "A" => Family::Alt,
            _ => return Err(err()),
        };
        let d = match (family, args.as_slice()) {
            (Family::Alt, [n]) => GroupDescriptor::alt(*n as usize)?,
            (Family::Alt, _) => return Err(err()),
            (fam, [n, q]) => GroupDescriptor::new(fam, *n as usize, *q)?,
            _ => return Err(err()),
        };
        if disc {
            d.with_nonsquare_disc()
        } else {
            Ok(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> GroupDescriptor {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        for s in ["SL(4,5)", "SU(4,3)", "Sp(6,3)", "O(7,3)", "O(7,3):d", "O+(8,2)", "O-(6,3)", "A(7)"] {
            assert_eq!(d(s).to_string(), s);
        }
        assert!("SL(4)".parse::<GroupDescriptor>().is_err());
        assert!("Foo(4,5)".parse::<GroupDescriptor>().is_err());
        assert!("SL(3,6)".parse::<GroupDescriptor>().is_err());
        assert!("Sp(6,3):d".parse::<GroupDescriptor>().is_err());
    }

    #[test]
    fn excluded_small_cases() {
        for s in ["SL(2,2)", "SL(2,3)", "Sp(4,2)", "SU(3,2)", "O(7,4)", "Sp(5,3)", "A(4)"] {
            assert!(
                matches!(s.parse::<GroupDescriptor>(), Err(Error::Excluded(_))),
                "{s} should be excluded"
            );
        }
    }

    #[test]
    fn orders() {
        assert_eq!(d("SL(2,5)").order(), 120);
        assert_eq!(d("SL(3,3)").order(), 5616);
        assert_eq!(d("SL(3,2)").order(), 168);
        assert_eq!(d("SU(4,2)").order(), 25920);
        assert_eq!(d("Sp(4,3)").order(), 51840);
        assert_eq!(d("O(5,3)").order(), 25920);
        assert_eq!(d("O+(6,2)").order(), 20160);
        assert_eq!(d("O-(6,2)").order(), 25920);
        assert_eq!(d("A(5)").order(), 60);
        assert_eq!(d("A(9)").order(), 181440);
    }
}
