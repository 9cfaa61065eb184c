//! The class-level product engine against a plain set-of-permutations oracle
//! that shares nothing with it beyond `Permutation::compose`.

use std::collections::HashSet;

use relgen::classical::{GroupTable, DEFAULT_CAP};
use relgen::genball::{class_set, ClassSet, covering_number, product_set, relative_k, NormalSet};
use relgen::perm::{alternating_elements, Permutation};

fn table(s: &str) -> GroupTable {
    GroupTable::enumerate(&s.parse().unwrap(), DEFAULT_CAP).unwrap()
}

fn conjugacy_class(n: usize, x: &Permutation) -> HashSet<Permutation> {
    alternating_elements(n)
        .iter()
        .map(|g| x.conjugate_by(g).unwrap())
        .collect()
}

fn times(a: &HashSet<Permutation>, b: &HashSet<Permutation>) -> HashSet<Permutation> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x.compose(y).unwrap()))
        .collect()
}

/// Least k with `s` in `(t^{A_n})^{*k}`, by brute force.
fn oracle_k(n: usize, t: &str, s: &str) -> usize {
    let c = conjugacy_class(n, &Permutation::parse(n, t).unwrap());
    let target = Permutation::parse(n, s).unwrap();
    let mut ball = c.clone();
    for k in 1..20 {
        if ball.contains(&target) {
            return k;
        }
        ball = times(&ball, &c);
    }
    panic!("not reached");
}

fn oracle_covering(n: usize, t: &str) -> usize {
    let c = conjugacy_class(n, &Permutation::parse(n, t).unwrap());
    let order = alternating_elements(n).len();
    let mut ball = c.clone();
    for k in 1..20 {
        if ball.len() == order {
            return k;
        }
        ball = times(&ball, &c);
    }
    panic!("no cover");
}

fn idx(t: &GroupTable, s: &str) -> u32 {
    let n = t.descriptor().n;
    t.index_of_perm(&Permutation::parse(n, s).unwrap()).unwrap()
}

#[test]
fn a5_relative_exponent_matches_oracle() {
    let t = table("A(5)");
    let k = relative_k(&t, idx(&t, "(1 2)(3 4)"), idx(&t, "(1 2 3)"), false, None).unwrap();
    assert_eq!(k, oracle_k(5, "(1 2)(3 4)", "(1 2 3)"));
    assert_eq!(k, 2);
}

#[test]
fn a5_covering_numbers_match_oracle() {
    let t = table("A(5)");
    for (s, k) in [("(1 2 3)", 2), ("(1 2)(3 4)", 2), ("(1 2 3 4 5)", 3)] {
        let ours = covering_number(&t, idx(&t, s)).unwrap();
        assert_eq!(ours, oracle_covering(5, s), "{s}");
        assert_eq!(ours, k, "{s}");
    }
}

#[test]
fn a8_fixed_point_free_involutions_need_four_steps_to_a_three_cycle() {
    let t = table("A(8)");
    let inv = "(1 2)(3 4)(5 6)(7 8)";
    let k = relative_k(&t, idx(&t, inv), idx(&t, "(6 7 8)"), false, None).unwrap();
    assert_eq!(k, oracle_k(8, inv, "(6 7 8)"));
    assert_eq!(k, 4);
}

#[test]
fn sl25_covering_numbers_match_dense_products() {
    let t = table("SL(2,5)");
    for c in 0..t.num_classes() {
        let h = t.class_rep(c);
        if t.is_central(h) {
            continue;
        }
        let l = class_set(&t, h, false);
        let whole = NormalSet::whole(&t);
        let mut ball = l.clone();
        let mut k = 1;
        while ball != whole {
            ball = product_set(&t, &ball, &l).unwrap();
            k += 1;
        }
        assert_eq!(covering_number(&t, h).unwrap(), k);
    }
}

#[test]
fn symmetrised_balls_grow_to_the_whole_group() {
    let t = table("SL(3,2)");
    for c in 0..t.num_classes() {
        let h = t.class_rep(c);
        if t.is_central(h) {
            continue;
        }
        let mut gen = ClassSet::singleton(t.num_classes(), c);
        gen.insert(t.class_of(t.inv(h)));
        gen.insert(t.class_of(t.identity()));
        let base = NormalSet::from_classes(&t, &gen);
        let mut ball = base.clone();
        loop {
            let next = product_set(&t, &ball, &base).unwrap();
            assert!(ball.iter().all(|x| next.contains(x)));
            if next == ball {
                break;
            }
            ball = next;
        }
        assert_eq!(ball, NormalSet::whole(&t));
    }
}
