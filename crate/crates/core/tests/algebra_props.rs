//! Fields, matrices, permutations and convergence types, checked against
//! small test-side models.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Ratio;
use proptest::prelude::*;
use relgen::classical::{GroupTable, DEFAULT_CAP};
use relgen::ctypes::{ct_compare, ConvergenceType, OrderIdeal};
use relgen::gf::{Field, FieldElem};
use relgen::linalg::{kernel, Matrix};
use relgen::obstruction::{build_example, verify_obstruction};
use relgen::perm::{alt_class, alternating_elements, Permutation};

const FIELDS: [u64; 9] = [2, 3, 5, 7, 4, 8, 9, 25, 27];

fn field(q: u64) -> Arc<Field> {
    let (p, k) = relgen::gf::prime_power(q).unwrap();
    Field::new(p as u64, k).unwrap()
}

/// Schoolbook product of coefficient vectors modulo the monic modulus.
fn poly_mul(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
    let p = f.characteristic();
    let k = f.degree() as usize;
    let m = f.modulus();
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (k..2 * k).rev() {
        let c = prod[d];
        if c != 0 {
            for i in 0..k {
                prod[d - k + i] = (prod[d - k + i] + p * p - c * m[i] % p) % p;
            }
            prod[d] = 0;
        }
    }
    prod.truncate(k);
    prod
}

#[test]
fn multiplication_matches_polynomial_model() {
    for &q in &FIELDS {
        let f = field(q);
        for a in f.elements() {
            for b in f.elements() {
                let want = poly_mul(&f, &f.coeffs(a), &f.coeffs(b));
                assert_eq!(f.coeffs(f.mul(a, b)), want, "GF({q})");
                let sum: Vec<u32> = f
                    .coeffs(a)
                    .iter()
                    .zip(f.coeffs(b))
                    .map(|(x, y)| (x + y) % f.characteristic())
                    .collect();
                assert_eq!(f.coeffs(f.add(a, b)), sum, "GF({q})");
            }
        }
    }
}

#[test]
fn frobenius_fixes_every_element() {
    for (p, k) in [(2, 1), (3, 1), (2, 4), (3, 4), (5, 2), (7, 2), (2, 6), (3, 3)] {
        let f = Field::new(p, k).unwrap();
        for x in f.elements() {
            assert_eq!(f.pow(x, f.order() as i64).unwrap(), x, "GF({p}^{k})");
        }
    }
}

#[test]
fn primitive_elements() {
    for &q in &FIELDS {
        let f = field(q);
        let z = f.primitive_element();
        assert_eq!(f.mult_order(z).unwrap(), f.order() - 1);
        // least code with full order, by brute force
        let least = f
            .nonzero_elements()
            .find(|&x| {
                let mut y = x;
                let mut ord = 1;
                while y != f.one() {
                    y = f.mul(y, x);
                    ord += 1;
                }
                ord == f.order() - 1
            })
            .unwrap();
        assert_eq!(z, least, "GF({q})");
    }
    let f7 = Field::new(7, 1).unwrap();
    assert_eq!(f7.format(f7.primitive_element()), "3");
    let f9 = Field::new(3, 2).unwrap();
    assert_eq!(f9.primitive_element().index(), 4);
    assert_eq!(f9.format(f9.primitive_element()), "1,1");
}

#[test]
fn square_classes_are_multiplicative() {
    for q in [3u64, 5, 7, 9, 25, 27] {
        let f = field(q);
        let squares: Vec<FieldElem> = f.nonzero_elements().map(|x| f.mul(x, x)).collect();
        for a in f.nonzero_elements() {
            assert_eq!(f.is_square(a), squares.contains(&a), "GF({q})");
            for b in f.nonzero_elements() {
                let c = f.square_class(f.mul(a, b)).unwrap();
                assert_eq!(c, f.square_class(a).unwrap() ^ f.square_class(b).unwrap());
            }
        }
    }
}

fn elem_in(f: &Field, code: u32) -> FieldElem {
    f.elem(code % f.order()).unwrap()
}

proptest! {
    #[test]
    fn field_axioms(qi in 0usize..FIELDS.len(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = field(FIELDS[qi]);
        let (a, b, c) = (elem_in(&f, a), elem_in(&f, b), elem_in(&f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!((f.order() - 1) % f.mult_order(a).unwrap(), 0);
        }
        prop_assert_eq!(f.parse(&f.format(a)).unwrap(), a);
    }

    #[test]
    fn matrix_identities(qi in 0usize..4, n in 1usize..5, seed in any::<u64>()) {
        let f = field([2, 3, 4, 9][qi]);
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as u32 };
        let mut random = |r: usize, c: usize| {
            let data = (0..r * c).map(|_| elem_in(&f, next())).collect();
            Matrix::new(&f, r, c, data).unwrap()
        };
        let a = random(n, n);
        let b = random(n, n);
        prop_assert_eq!((&a * &b).det().unwrap(), f.mul(a.det().unwrap(), b.det().unwrap()));
        prop_assert_eq!(a.transpose().det().unwrap(), a.det().unwrap());
        prop_assert_eq!(a.rank() + kernel(&a).dim(), n);
        prop_assert_eq!(a.rank() == n, !a.det().unwrap().is_zero());
        if let Ok(inv) = a.inverse() {
            prop_assert!((&a * &inv).is_identity());
            prop_assert!((&inv * &a).is_identity());
        } else {
            prop_assert!(a.det().unwrap().is_zero());
        }
        let wide = random(n, n + 2);
        prop_assert_eq!(wide.rank() + kernel(&wide).dim(), n + 2);
        prop_assert_eq!(Matrix::from_text(&a.to_text()).unwrap(), a);
    }
}

fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u8).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

proptest! {
    #[test]
    fn permutation_group_laws(s in arb_perm(7), t in arb_perm(7), u in arb_perm(7)) {
        let st = s.compose(&t).unwrap();
        prop_assert_eq!(st.compose(&u).unwrap(), s.compose(&t.compose(&u).unwrap()).unwrap());
        for x in 0..7 {
            prop_assert_eq!(st.apply(x), s.apply(t.apply(x)));
        }
        prop_assert!(s.compose(&s.inverse()).unwrap().is_identity());
        prop_assert_eq!(st.is_even(), s.is_even() == t.is_even());
        let c = s.conjugate_by(&t).unwrap();
        prop_assert_eq!(c.cycle_type(), s.cycle_type());
        prop_assert_eq!(Permutation::parse(7, &s.to_string()).unwrap(), s.clone());
        let mut p = Permutation::identity(7);
        for _ in 0..s.order() {
            p = p.compose(&s).unwrap();
        }
        prop_assert!(p.is_identity());
    }
}

#[test]
fn alt_class_sizes_match_orbit_counts() {
    for n in [5, 6] {
        let elems = alternating_elements(n);
        let mut by_type: HashMap<Vec<usize>, u64> = HashMap::new();
        for g in &elems {
            *by_type.entry(g.cycle_type()).or_default() += 1;
        }
        for g in &elems {
            if g.is_identity() {
                continue;
            }
            let orbit: std::collections::HashSet<_> =
                elems.iter().map(|t| g.conjugate_by(t).unwrap()).collect();
            let c = alt_class(g).unwrap();
            assert_eq!(c.size, orbit.len() as u64, "{g}");
            assert_eq!(c.split, by_type[&g.cycle_type()] != orbit.len() as u64, "{g}");
        }
    }
}

/// Number of classes is the number of commuting pairs divided by `|G|`.
fn burnside_classes(t: &GroupTable) -> usize {
    let n = t.len() as u32;
    let mut pairs = 0usize;
    for x in 0..n {
        for y in 0..n {
            if t.mul(x, y) == t.mul(y, x) {
                pairs += 1;
            }
        }
    }
    pairs / n as usize
}

#[test]
fn class_counts_match_commuting_pairs() {
    for (s, want) in [("A(5)", 5), ("SL(2,5)", 9), ("SL(3,2)", 6), ("A(6)", 7), ("SL(2,7)", 11)] {
        let t = GroupTable::enumerate(&s.parse().unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(burnside_classes(&t), want, "{s}");
        assert_eq!(t.num_classes(), want, "{s}");
        let total: u64 = (0..t.num_classes()).map(|c| t.class_size(c)).sum();
        assert_eq!(total, t.len() as u64);
    }
}

fn ct(s: &str) -> ConvergenceType {
    s.parse().unwrap()
}

proptest! {
    #[test]
    fn convergence_order_is_total_and_scale_free(
        a1 in 0i64..8, b1 in -3i64..4, a2 in 0i64..8, b2 in -3i64..4, c in 1i64..50,
    ) {
        let mk = |a: i64, b: i64, c: i64| ConvergenceType::power(Ratio::from_integer(c), Ratio::new(a, 7), Ratio::from_integer(b));
        let (Ok(r), Ok(s)) = (mk(a1, b1, 1), mk(a2, b2, 1)) else { return Ok(()) };
        prop_assert_eq!(ct_compare(&r, &s), ct_compare(&s, &r).reverse());
        prop_assert_eq!(ct_compare(&r, &mk(a1, b1, c).unwrap()), Ordering::Equal);
        prop_assert_eq!(ct_compare(&ConvergenceType::Zero, &r), Ordering::Less);
        prop_assert_eq!(ct(&r.to_string()), r);
        // log of the value at ln n = 1e6, where the larger type is larger
        if a1 != a2 {
            let ln_n = 1e6_f64;
            let v = |a: i64, b: i64| -(a as f64) / 7.0 * ln_n + b as f64 * ln_n.ln();
            prop_assert_eq!(ct_compare(&r, &s), v(a1, b1).partial_cmp(&v(a2, b2)).unwrap());
        }
        for ideal in [OrderIdeal::i0(), OrderIdeal::i1()] {
            if ideal.contains(&s) && ct_compare(&r, &s) != Ordering::Greater {
                prop_assert!(ideal.contains(&r));
            }
        }
    }
}

#[test]
fn obstruction_fixture_q11() {
    let inst = build_example(11, 2, 5).unwrap();
    let f = &*inst.field;
    assert_eq!(f.format(inst.lambda), "4");
    assert_eq!(f.format(inst.mu), "10");
    assert_eq!(f.mult_order(inst.lambda).unwrap(), 5);
    assert_eq!(f.mult_order(inst.mu).unwrap(), 2);
    let r = verify_obstruction(&inst, 9, 40, 7).unwrap();
    assert!(r.pass);
    assert_eq!(r.h2_certificate, 10);
    let again = verify_obstruction(&inst, 9, 40, 7).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    assert!(verify_obstruction(&inst.swapped(), 9, 40, 7).unwrap().pass);
}
