//! Products of normal sets over enumerated groups.
//!
//! Two routes compute the same thing:
//!
//! * [`product_set`] multiplies dense element sets directly (every pair).
//! * The class route works on [`ClassSet`]s. Since a product of normal sets
//!   is normal, `C_a C_b` is the union of the classes of `x r_b` for `x` in
//!   `C_a` and a fixed representative `r_b`; [`GroupTable::class_product`]
//!   tabulates this once per group and everything here is then a few
//!   bitset unions.
//!
//! Covering numbers, relative exponents and the fitted constants all use the
//! class route; the dense route is the cross-check.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::{Backend, GroupTable};
use crate::error::{Error, Result};
use crate::lengths::{table_projective_length, table_rank_length, LengthValue};

/// Set of conjugacy classes of one table, as a bitset over class ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassSet {
    words: Vec<u64>,
    n: usize,
}

impl ClassSet {
    pub fn empty(n: usize) -> Self {
        ClassSet {
            words: vec![0; n.div_ceil(64)],
            n,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for c in 0..n {
            s.insert(c);
        }
        s
    }

    pub fn singleton(n: usize, c: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(c);
        s
    }

    #[inline]
    pub fn insert(&mut self, c: usize) {
        self.words[c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub fn contains(&self, c: usize) -> bool {
        self.words[c / 64] >> (c % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &ClassSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(|&c| self.contains(c))
    }

    /// `{c : C_c meets A B}` for class sets `A`, `B` of table `t`.
    pub fn product(&self, other: &ClassSet, t: &GroupTable) -> ClassSet {
        let mut out = ClassSet::empty(self.n);
        for a in self.iter() {
            for b in other.iter() {
                out.union_with(t.class_product(a, b));
            }
        }
        out
    }
}

/// A subset of an enumerated group closed under conjugation, as dense bits
/// over element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalSet {
    table_id: u64,
    bits: Vec<u64>,
    n: usize,
}

impl NormalSet {
    fn empty_for(t: &GroupTable) -> Self {
        NormalSet {
            table_id: t.id(),
            bits: vec![0; t.len().div_ceil(64)],
            n: t.len(),
        }
    }

    #[inline]
    fn set(&mut self, i: u32) {
        self.bits[i as usize / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: u32) -> bool {
        self.bits[i as usize / 64] >> (i % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.n as u32).filter(|&i| self.contains(i))
    }

    pub fn from_classes(t: &GroupTable, classes: &ClassSet) -> Self {
        let mut s = Self::empty_for(t);
        for i in 0..t.len() as u32 {
            if classes.contains(t.class_of(i)) {
                s.set(i);
            }
        }
        s
    }

    pub fn whole(t: &GroupTable) -> Self {
        Self::from_classes(t, &ClassSet::full(t.num_classes()))
    }

    pub fn singleton_identity(t: &GroupTable) -> Self {
        let mut s = Self::empty_for(t);
        s.set(t.identity());
        s
    }

    /// The classes met by this set, or `NotNormal` if it is not a union of
    /// classes.
    pub fn classes(&self, t: &GroupTable) -> Result<ClassSet> {
        if self.table_id != t.id() {
            return Err(Error::TableMismatch);
        }
        let mut cs = ClassSet::empty(t.num_classes());
        for i in self.iter() {
            cs.insert(t.class_of(i));
        }
        if cs.iter().map(|c| t.class_size(c) as usize).sum::<usize>() != self.len() {
            return Err(Error::NotNormal);
        }
        Ok(cs)
    }

    /// Direct check: every generator conjugate of every member is a member.
    pub fn is_normal(&self, t: &GroupTable) -> bool {
        self.iter()
            .all(|x| t.generators().iter().all(|&g| self.contains(t.conj(x, g))))
    }
}

/// `h^H`, or `h^H u (h^-1)^H` when `symmetric`.
pub fn class_set(t: &GroupTable, h: u32, symmetric: bool) -> NormalSet {
    NormalSet::from_classes(t, &class_generator(t, h, symmetric))
}

fn class_generator(t: &GroupTable, h: u32, symmetric: bool) -> ClassSet {
    let mut cs = ClassSet::singleton(t.num_classes(), t.class_of(h));
    if symmetric {
        cs.insert(t.class_of(t.inv(h)));
    }
    cs
}

/// `{s t : s in S, t in T}` element by element.
pub fn product_set(t: &GroupTable, s: &NormalSet, u: &NormalSet) -> Result<NormalSet> {
    if s.table_id != t.id() || u.table_id != t.id() {
        return Err(Error::TableMismatch);
    }
    let left: Vec<u32> = s.iter().collect();
    let right: Vec<u32> = u.iter().collect();
    let chunks: Vec<NormalSet> = left
        .par_chunks(64)
        .map(|xs| {
            let mut part = NormalSet::empty_for(t);
            for &x in xs {
                for &y in &right {
                    part.set(t.mul(x, y));
                }
            }
            part
        })
        .collect();
    let mut out = NormalSet::empty_for(t);
    for p in chunks {
        for (a, b) in out.bits.iter_mut().zip(&p.bits) {
            *a |= b;
        }
    }
    Ok(out)
}

/// Least `k` with `(h^H)^{*k} = H`.
pub fn covering_number(t: &GroupTable, h: u32) -> Result<usize> {
    if t.is_central(h) {
        return Err(Error::Central);
    }
    let l = class_generator(t, h, false);
    let mut ball = l.clone();
    let mut seen = HashSet::new();
    for k in 1.. {
        if ball.is_full() {
            return Ok(k);
        }
        if !seen.insert(ball.clone()) {
            return Err(Error::Internal(format!(
                "powers of a class of {} cycle below the whole group",
                t.label()
            )));
        }
        ball = ball.product(&l, t);
    }
    unreachable!()
}

/// Least `k` with `h2 in L^{*k}`, `L = h1^H` (symmetrised when asked), or
/// `None` when the periodic sequence of powers never contains `h2` or `max_k`
/// is exceeded.
pub fn relative_k(t: &GroupTable, h1: u32, h2: u32, symmetric: bool, max_k: Option<usize>) -> Option<usize> {
    let l = class_generator(t, h1, symmetric);
    relative_k_classes(t, &l, t.class_of(h2), max_k)
}

fn relative_k_classes(t: &GroupTable, l: &ClassSet, target: usize, max_k: Option<usize>) -> Option<usize> {
    let mut ball = l.clone();
    let mut seen = HashSet::new();
    for k in 1.. {
        if ball.contains(target) {
            return Some(k);
        }
        if max_k.map_or(false, |m| k >= m) || !seen.insert(ball.clone()) {
            return None;
        }
        ball = ball.product(l, t);
    }
    unreachable!()
}

/// Exponents from class `a` to every class `c`: the least `k` with `C_c` in
/// `C_a^{*k}`, and the least `K` with `C_c` in `C_a^{*k}` for every `k >= K`.
/// Powers of a class need not grow (they miss `1` when `C_a` is not real), so
/// the two can differ; both are `None` when `C_c` is never reached.
fn relative_row(t: &GroupTable, a: usize) -> Vec<(Option<usize>, Option<usize>)> {
    let nc = t.num_classes();
    let l = ClassSet::singleton(nc, a);
    let mut balls: Vec<ClassSet> = Vec::new();
    let mut seen: HashMap<ClassSet, usize> = HashMap::new();
    let mut ball = l.clone();
    // balls[i] is the (i+1)-fold power; the sequence is periodic from `start`
    let start = loop {
        if let Some(&j) = seen.get(&ball) {
            break j;
        }
        seen.insert(ball.clone(), balls.len());
        let next = ball.product(&l, t);
        balls.push(ball);
        ball = next;
    };
    (0..nc)
        .map(|c| {
            let least = balls.iter().position(|b| b.contains(c)).map(|i| i + 1);
            let stable = if balls[start..].iter().all(|b| b.contains(c)) {
                Some(balls.iter().rposition(|b| !b.contains(c)).map_or(1, |i| i + 2))
            } else {
                None
            };
            (least, stable)
        })
        .collect()
}

fn is_alternating(t: &GroupTable) -> bool {
    matches!(t.backend(), Backend::Perm { .. })
}

/// Per non-central class: representative, length and covering number.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringRow {
    pub group: String,
    pub class: usize,
    pub rep: u32,
    pub class_size: u64,
    /// Projective rank length (Hamming length for alternating groups).
    pub length: LengthValue,
    pub k: usize,
}

pub fn covering_rows(t: &GroupTable) -> Result<Vec<CoveringRow>> {
    (0..t.num_classes())
        .filter(|&c| t.class_size(c) > 1)
        .map(|c| {
            let rep = t.class_rep(c);
            Ok(CoveringRow {
                group: t.label().to_string(),
                class: c,
                rep,
                class_size: t.class_size(c),
                length: table_projective_length(t, rep),
                k: covering_number(t, rep)?,
            })
        })
        .collect()
}

/// One class pair `(h1, h2)` with its relative exponents.
#[derive(Debug, Clone, Serialize)]
pub struct RelativeRow {
    pub group: String,
    pub class1: usize,
    pub class2: usize,
    pub length1: LengthValue,
    pub length2: LengthValue,
    /// Least `k` with `h2` in `(h1^H)^{*k}`.
    pub k: Option<usize>,
    /// Least `K` with `h2` in `(h1^H)^{*k}` for all `k >= K`.
    pub k_stable: Option<usize>,
}

/// All pairs with `h1` non-central and (matrix groups) `l(h1) <= 1 - epsilon`.
pub fn relative_rows(t: &GroupTable, epsilon: Ratio<u64>) -> Vec<RelativeRow> {
    let nc = t.num_classes();
    let lengths: Vec<LengthValue> = (0..nc).map(|c| table_rank_length(t, t.class_rep(c))).collect();
    let alt = is_alternating(t);
    let limit = Ratio::from_integer(1) - epsilon.min(Ratio::from_integer(1));
    (0..nc)
        .filter(|&a| t.class_size(a) > 1 && (alt || lengths[a].ratio() <= limit))
        .flat_map(|a| {
            let row = relative_row(t, a);
            let lengths = &lengths;
            (0..nc).map(move |b| RelativeRow {
                group: t.label().to_string(),
                class1: a,
                class2: b,
                length1: lengths[a],
                length2: lengths[b],
                k: row[b].0,
                k_stable: row[b].1,
            })
        })
        .collect()
}

/// Empirical constants, fitted to the stable thresholds `k_stable` so that
/// the bound holds for every `k` above it. All values are exact.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    /// max of covering number times projective length (Hamming for `A_n`).
    pub c_hat: Ratio<u64>,
    /// The relative bound `k <= max(C l(h2)/l(h1), D)` on matrix groups.
    pub big_c_hat: Option<Ratio<u64>>,
    pub d_hat: Option<usize>,
    /// `max k / max(l(s)/l(t), 1)` over alternating groups.
    pub c_alt_hat: Option<Ratio<u64>>,
    pub epsilon: Ratio<u64>,
    pub groups: Vec<String>,
    pub pairs: usize,
}

fn ratio_of(a: LengthValue, b: LengthValue) -> Ratio<u64> {
    a.ratio() / b.ratio()
}

pub fn fit_constants(tables: &[&GroupTable], epsilon: Ratio<u64>) -> Result<FitReport> {
    if tables.is_empty() {
        return Err(Error::Empty("table list"));
    }
    let mut c_hat: Option<Ratio<u64>> = None;
    let mut matrix_rows = Vec::new();
    let mut alt_rows = Vec::new();
    for t in tables {
        for r in covering_rows(t)? {
            let v = r.length.ratio() * Ratio::from_integer(r.k as u64);
            c_hat = Some(c_hat.map_or(v, |c| c.max(v)));
        }
        let rows = relative_rows(t, epsilon);
        if let Some(bad) = rows.iter().find(|r| r.k_stable.is_none()) {
            return Err(Error::Internal(format!(
                "powers of class {} of {} do not settle on class {}",
                bad.class1, bad.group, bad.class2
            )));
        }
        if is_alternating(t) {
            alt_rows.extend(rows);
        } else {
            matrix_rows.extend(rows);
        }
    }
    let c_hat = c_hat.ok_or(Error::Empty("non-central elements"))?;
    if matrix_rows.is_empty() && alt_rows.is_empty() {
        return Err(Error::Empty("admissible pairs"));
    }
    let (big_c_hat, d_hat) = if matrix_rows.is_empty() {
        (None, None)
    } else {
        let d = matrix_rows
            .iter()
            .filter(|r| r.length2 <= r.length1)
            .map(|r| r.k_stable.expect("checked"))
            .max()
            .unwrap_or(0);
        let c = matrix_rows
            .iter()
            .filter(|r| r.k_stable.expect("checked") > d)
            .map(|r| ratio_of(r.length1, r.length2) * Ratio::from_integer(r.k_stable.expect("checked") as u64))
            .max()
            .unwrap_or(Ratio::from_integer(0));
        (Some(c), Some(d))
    };
    let c_alt_hat = alt_rows
        .iter()
        .map(|r| Ratio::from_integer(r.k_stable.expect("checked") as u64) / alt_scale(r))
        .max();
    Ok(FitReport {
        c_hat,
        big_c_hat,
        d_hat,
        c_alt_hat,
        epsilon,
        groups: tables.iter().map(|t| t.label().to_string()).collect(),
        pairs: matrix_rows.len() + alt_rows.len(),
    })
}

fn alt_scale(r: &RelativeRow) -> Ratio<u64> {
    ratio_of(r.length2, r.length1).max(Ratio::from_integer(1))
}

/// A pair that breaks the fitted bound.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub row: RelativeRow,
    pub bound: Ratio<u64>,
}

/// Re-checks the fitted bound (on `k_stable`) on `t` without refitting: the matrix bound for
/// matrix groups, `c_alt max(ratio, 1)` for alternating groups.
pub fn check_relative_bound(t: &GroupTable, fit: &FitReport) -> Result<Vec<Violation>> {
    let alt = is_alternating(t);
    let mut out = Vec::new();
    for row in relative_rows(t, fit.epsilon) {
        let bound = if alt {
            fit.c_alt_hat.ok_or(Error::Empty("alternating constant"))? * alt_scale(&row)
        } else {
            let c = fit.big_c_hat.ok_or(Error::Empty("matrix constants"))?;
            let d = Ratio::from_integer(fit.d_hat.unwrap_or(0) as u64);
            if row.length2.is_zero() {
                d
            } else {
                (c * ratio_of(row.length2, row.length1)).max(d)
            }
        };
        let ok = row.k_stable.map_or(false, |k| Ratio::from_integer(k as u64) <= bound);
        if !ok {
            out.push(Violation { row, bound });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::DEFAULT_CAP;
    use crate::perm::Permutation;

    fn table(s: &str) -> GroupTable {
        GroupTable::enumerate(&s.parse().unwrap(), DEFAULT_CAP).unwrap()
    }

    fn perm(t: &GroupTable, s: &str) -> u32 {
        let n = t.descriptor().n;
        t.index_of_perm(&Permutation::parse(n, s).unwrap()).unwrap()
    }

    #[test]
    fn class_sets() {
        let t = table("A(5)");
        assert_eq!(class_set(&t, t.identity(), false).len(), 1);
        assert_eq!(class_set(&t, perm(&t, "(1 2 3)"), false).len(), 20);
        let inv = perm(&t, "(1 2)(3 4)");
        assert_eq!(class_set(&t, inv, true), class_set(&t, inv, false));
    }

    #[test]
    fn products_with_identity_and_inverse() {
        let t = table("A(5)");
        let s = class_set(&t, perm(&t, "(1 2 3 4 5)"), false);
        let one = NormalSet::singleton_identity(&t);
        assert_eq!(product_set(&t, &s, &one).unwrap(), s);
        let sinv = class_set(&t, t.inv(perm(&t, "(1 2 3 4 5)")), false);
        assert!(product_set(&t, &s, &sinv).unwrap().contains(t.identity()));
    }

    #[test]
    fn table_mismatch() {
        let a = table("A(5)");
        let b = table("A(5)");
        let s = NormalSet::whole(&a);
        assert_eq!(product_set(&b, &s, &s).unwrap_err(), Error::TableMismatch);
    }

    #[test]
    fn central_elements_have_no_covering_number() {
        let t = table("SL(2,5)");
        assert_eq!(covering_number(&t, t.identity()).unwrap_err(), Error::Central);
        let f = crate::gf::Field::new(5, 1).unwrap();
        let minus = crate::linalg::Matrix::scalar(&f, 2, f.from_int(-1));
        let m = t.index_of_matrix(&minus).unwrap();
        assert_eq!(covering_number(&t, m).unwrap_err(), Error::Central);
    }

    #[test]
    fn relative_trivial_cases() {
        let t = table("A(6)");
        let h = perm(&t, "(1 2 3)");
        assert_eq!(relative_k(&t, h, h, false, None), Some(1));
        assert!(relative_k(&t, h, t.identity(), true, None).unwrap() <= 2);
    }

    #[test]
    fn class_route_matches_dense_route() {
        let t = table("A(5)");
        let h = perm(&t, "(1 2 3)");
        let l = class_set(&t, h, false);
        let lc = l.classes(&t).unwrap();
        let mut dense = l.clone();
        let mut classes = lc.clone();
        for _ in 0..4 {
            dense = product_set(&t, &dense, &l).unwrap();
            classes = classes.product(&lc, &t);
            assert_eq!(dense, NormalSet::from_classes(&t, &classes));
            assert!(dense.is_normal(&t));
        }
    }

    #[test]
    fn empty_fit_is_an_error() {
        assert_eq!(fit_constants(&[], Ratio::new(1, 8)).unwrap_err(), Error::Empty("table list"));
    }
}
