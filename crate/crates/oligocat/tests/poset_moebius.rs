use num_bigint::BigInt;
use oligocat::group::PermGroup;
use oligocat::poset::{FinitePoset, TopMoebius};
use oligocat::regcat::{FinGSetCat, OpFinSetCat, RegularCategory};
use oligocat::ring::{Rat, Ring};
use oligocat::Error;
use proptest::prelude::*;

fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

/// The lattice of subobjects of a set in instance B: set partitions, coarsest first.
fn partition_lattice(n: usize) -> (FinitePoset, usize, usize) {
    let b = OpFinSetCat::new();
    let x = b.set(n);
    let (p, subs) = FinitePoset::of_subobjects(&b, &x).unwrap();
    let bottom = subs.iter().position(|s| *s == b.bottom(&x).unwrap()).unwrap();
    let top = subs.iter().position(|s| *s == b.top(&x)).unwrap();
    (p, bottom, top)
}

#[test]
fn diagonal_values_are_one() {
    let p = FinitePoset::boolean(3);
    for x in 0..8 {
        assert_eq!(p.moebius(x, x).unwrap(), int(1));
    }
}

#[test]
fn boolean_lattice_alternates() {
    for n in 0..5 {
        let p = FinitePoset::boolean(n);
        let want = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(p.moebius(0, (1 << n) - 1).unwrap(), int(want));
    }
}

#[test]
fn partition_lattices_match_the_factorial_formula() {
    // μ̃(0̂, 1̂) = (-1)^{n-1} (n-1)! on the lattice of partitions of an n-set.
    let want = [1, 1, -1, 2, -6, 24];
    for n in 1..=5 {
        let (p, bottom, top) = partition_lattice(n);
        assert_eq!(p.moebius(bottom, top).unwrap(), int(want[n]), "n = {n}");
    }
}

#[test]
fn moebius_outside_an_interval_is_a_domain_error() {
    let p = FinitePoset::chain(3);
    assert!(matches!(p.moebius(2, 0), Err(Error::Domain(_))));
}

#[test]
fn inversion_examples() {
    let p = FinitePoset::chain(2);
    let zero = vec![Rat::zero(); 2];
    assert_eq!(p.moebius_invert(&zero).unwrap(), zero);
    let top = vec![Rat::zero(), Rat::one()];
    assert_eq!(p.moebius_invert(&top).unwrap(), vec![Rat::zero(), Rat::one()]);
    let const_one = vec![Rat::one(), Rat::one()];
    assert_eq!(p.moebius_invert(&const_one).unwrap(), vec![Rat::one(), Rat::zero()]);
}

#[test]
fn non_orders_are_rejected() {
    assert!(FinitePoset::new(2, |_, _| true).is_err());
    assert!(FinitePoset::new(2, |a, b| a != b).is_err());
    assert!(FinitePoset::new(3, |a, b| a == b || (a, b) == (0, 1) || (a, b) == (1, 2)).is_err());
}

#[test]
fn top_moebius_agrees_with_the_full_table() {
    let z = FinGSetCat::new(PermGroup::cyclic(2));
    let g = z.regular().unwrap();
    let x = g.disjoint_union(&z.points(2));
    let (p, subs) = FinitePoset::of_subobjects(&z, &x).unwrap();
    let top = subs.len() - 1;
    assert_eq!(subs[top], z.top(&x));
    let mut tm = TopMoebius::new(&z, &x);
    for (i, s) in subs.iter().enumerate() {
        assert_eq!(tm.get(s).unwrap(), p.moebius(i, top).unwrap());
    }
    let b = OpFinSetCat::new();
    let y = b.set(4);
    let (p, subs) = FinitePoset::of_subobjects(&b, &y).unwrap();
    let top = subs.iter().position(|s| *s == b.top(&y)).unwrap();
    let mut tm = TopMoebius::new(&b, &y);
    for (i, s) in subs.iter().enumerate() {
        assert_eq!(tm.get(s).unwrap(), p.moebius(i, top).unwrap());
    }
}

fn lattices() -> Vec<FinitePoset> {
    let a = FinGSetCat::trivial_group();
    let z = FinGSetCat::new(PermGroup::cyclic(2));
    let b = OpFinSetCat::new();
    let g = z.regular().unwrap();
    vec![
        FinitePoset::boolean(3),
        FinitePoset::of_subobjects(&a, &a.points(4)).unwrap().0,
        FinitePoset::of_subobjects(&z, &z.product(&g, &g)).unwrap().0,
        FinitePoset::of_subobjects(&b, &b.set(3)).unwrap().0,
        FinitePoset::of_subobjects(&b, &b.set(4)).unwrap().0,
    ]
}

#[test]
fn moebius_sums_vanish_on_proper_intervals() {
    for p in lattices() {
        for x in 0..p.len() {
            for y in 0..p.len() {
                if !p.leq(x, y) {
                    continue;
                }
                let s: BigInt = p.interval(x, y).into_iter().map(|z| p.moebius(z, y).unwrap()).sum();
                assert_eq!(s, int(i64::from(x == y)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inversion_round_trips(which in 0usize..5, values in prop::collection::vec(-50i64..50, 15)) {
        let p = &lattices()[which];
        let f: Vec<Rat> = (0..p.len()).map(|i| Rat::int(values[i % values.len()])).collect();
        let g = p.moebius_invert(&f).unwrap();
        prop_assert_eq!(p.zeta(&g), f.clone());
        prop_assert_eq!(p.moebius_invert(&p.zeta(&f)).unwrap(), f);
    }
}
