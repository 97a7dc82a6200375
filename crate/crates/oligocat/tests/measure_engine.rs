use oligocat::atoms::{a1_map, build_a1, AtomMap};
use oligocat::group::PermGroup;
use oligocat::measure::{
    alpha, beta_measure, beta_unchecked, check_degree_axioms, check_measure_axioms, check_recovered_degree,
    degree_origin_test, f2_regular_measure, is_mu_constant, is_odd_category, mu_of_general_map,
    regular_constraint_solve, satisfies_all, ConstantNonIso, DegreeFunction, DerivedMeasure, FnDegree, FnMeasure,
    Measure, SurjectionTable, TPowerDegree, TrivialDegree,
};
use oligocat::regcat::{ample_subobjects, FinGSetCat, OpFinSetCat, RegularCategory};
use oligocat::ring::{Poly, Rat, Ring, F2};
use oligocat::{Error, Result};
use proptest::prelude::*;

fn z2() -> FinGSetCat {
    FinGSetCat::new(PermGroup::cyclic(2))
}

fn s3() -> FinGSetCat {
    FinGSetCat::new(PermGroup::from_cycle_generators(3, &[vec![vec![0, 1]], vec![vec![0, 1, 2]]]).unwrap())
}

fn derived_trivial() -> DerivedMeasure<FinGSetCat, Rat, TrivialDegree> {
    DerivedMeasure::new(TrivialDegree)
}

#[test]
fn trivial_degree_passes_the_axioms() {
    for cat in [FinGSetCat::trivial_group(), z2()] {
        let rep = check_degree_axioms::<_, Rat, _>(&cat, &TrivialDegree, 4).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.cases > 0);
    }
}

#[test]
fn t_power_degree_passes_the_axioms() {
    let rep = check_degree_axioms(&OpFinSetCat::new(), &TPowerDegree, 4).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn a_constant_off_isomorphisms_fails() {
    let rep = check_degree_axioms(&FinGSetCat::trivial_group(), &ConstantNonIso(Rat::int(2)), 3).unwrap();
    assert!(!rep.passed());
    assert!(rep.failures.iter().any(|w| w.axiom == "b"));
}

#[test]
fn derived_values() {
    let a = FinGSetCat::trivial_group();
    let mu = derived_trivial();
    let f = a.to_terminal(&a.points(2));
    assert_eq!(mu.value(&a, &f).unwrap(), Rat::int(-1));
    for n in 1..4 {
        assert_eq!(mu.value(&a, &a.identity(&a.points(n))).unwrap(), Rat::one());
    }
    for x in a.objects(4).unwrap().into_iter().filter(|x| x.points() > 0) {
        let want = if x.orbit_count() % 2 == 1 { 1 } else { -1 };
        assert_eq!(mu.object_value(&a, &x).unwrap(), Rat::int(want));
    }
}

#[test]
fn derived_measures_reject_non_surjections() {
    let a = FinGSetCat::trivial_group();
    let inc = a.gmor(&a.points(1), &a.points(2), vec![0]).unwrap();
    assert!(matches!(derived_trivial().value(&a, &inc), Err(Error::Domain(_))));
}

#[test]
fn trivial_degree_round_trips() {
    let a = FinGSetCat::trivial_group();
    let rep = check_recovered_degree(&a, &derived_trivial(), &TrivialDegree, 6).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
    let z = z2();
    let rep = check_recovered_degree(&z, &derived_trivial(), &TrivialDegree, 6).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn t_power_degree_round_trips() {
    let b = OpFinSetCat::new();
    let mu = DerivedMeasure::new(TPowerDegree);
    let rep = check_recovered_degree(&b, &mu, &TPowerDegree, 4).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn alpha_recovers_the_trivial_degree() {
    for cat in [FinGSetCat::trivial_group(), z2()] {
        let rep = check_recovered_degree(&cat, &alpha(), &TrivialDegree, 4).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }
}

#[test]
fn alpha_on_g_times_g() {
    let z = z2();
    let g = z.regular().unwrap();
    let gg = z.product(&g, &g);
    let a = alpha();
    let mut total = Rat::zero();
    let mut counts = Vec::new();
    for w in ample_subobjects(&z, &g, &g).unwrap() {
        let obj = z.sub_object(&gg, &w).0;
        counts.push(obj.orbit_count());
        total = total + a.object_value(&z, &obj).unwrap();
    }
    counts.sort();
    assert_eq!(counts, vec![1, 1, 2]);
    let gv = a.object_value(&z, &g).unwrap();
    assert_eq!(total, gv.clone() * gv);
    assert_eq!(total, Rat::one());
}

#[test]
fn derived_trivial_is_a_measure() {
    for cat in [FinGSetCat::trivial_group(), z2()] {
        let rep = check_measure_axioms(&cat, &derived_trivial(), 4, false).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
    }
    let rep = check_measure_axioms(&s3(), &derived_trivial(), 3, false).unwrap();
    assert!(rep.passed(), "{:?}", rep.failures);
}

#[test]
fn a_zero_object_value_breaks_the_axioms() {
    let a = FinGSetCat::trivial_group();
    let broken = FnMeasure {
        name: "alpha with a zero".into(),
        f: |cat: &FinGSetCat, f: &<FinGSetCat as RegularCategory>::Mor| -> Result<Rat> {
            if cat.source(f).points() == 3 && cat.target(f).points() == 1 {
                return Ok(Rat::zero());
            }
            alpha().value(cat, f)
        },
    };
    let rep = check_measure_axioms(&a, &broken, 3, false).unwrap();
    assert!(!rep.passed());
}

#[test]
fn general_map_values() {
    let a = FinGSetCat::trivial_group();
    let mu = alpha();
    let two = a.points(2);
    let f = a.to_terminal(&two);
    let single = AtomMap::<FinGSetCat> {
        source: vec![two.clone()],
        target: vec![a.points(1)],
        components: vec![(0, f.clone())],
    };
    assert_eq!(mu_of_general_map(&a, &mu, &single).unwrap(), vec![Some(Rat::int(-1))]);
    let doubled = AtomMap::<FinGSetCat> {
        source: vec![two.clone(), two.clone()],
        target: vec![two.clone()],
        components: vec![(0, a.identity(&two)), (0, a.identity(&two))],
    };
    assert_eq!(mu_of_general_map(&a, &mu, &doubled).unwrap(), vec![Some(Rat::int(2))]);
    let (_, _, map) = a1_map(&a, &f).unwrap();
    assert_eq!(mu_of_general_map(&a, &mu, &map).unwrap(), vec![Some(Rat::one())]);
    let empty_target = AtomMap::<FinGSetCat> {
        source: vec![],
        target: vec![two.clone()],
        components: vec![],
    };
    assert_eq!(mu_of_general_map(&a, &mu, &empty_target).unwrap(), vec![None]);
}

#[test]
fn alpha_is_constant_on_a1_maps() {
    let a = FinGSetCat::trivial_group();
    let table = SurjectionTable::new(&a, 4).unwrap();
    for f in table.all() {
        let (_, _, map) = a1_map(&a, f).unwrap();
        let (constant, _) = is_mu_constant(&a, &alpha(), &map).unwrap();
        assert!(constant, "{}", a.describe_mor(f));
    }
    let b1 = build_a1(&a, &a.points(1)).unwrap();
    assert_eq!(b1.len(), 1);
}

#[test]
fn beta_is_not_constant_somewhere() {
    let a = FinGSetCat::trivial_group();
    let table = SurjectionTable::new(&a, 4).unwrap();
    let mut witness = None;
    for f in table.all() {
        let (_, _, map) = a1_map(&a, f).unwrap();
        let (constant, vals) = is_mu_constant(&a, &beta_unchecked(), &map).unwrap();
        if !constant {
            witness = Some(vals);
            break;
        }
    }
    let vals = witness.expect("beta is constant on every map");
    assert!(vals.iter().all(Option::is_some));
    let origin = degree_origin_test(&a, &beta_unchecked(), 4).unwrap();
    assert!(!origin.comes_from_degree());
    assert!(origin.witness.is_some());
}

#[test]
fn degree_origin_examples() {
    let a = FinGSetCat::trivial_group();
    let o = degree_origin_test(&a, &alpha(), 4).unwrap();
    assert!(o.comes_from_degree());
    assert_eq!(o.rederived, Some(true));
    let b = OpFinSetCat::new();
    let mu = DerivedMeasure::new(TPowerDegree);
    let o = degree_origin_test(&b, &mu, 4).unwrap();
    assert!(o.comes_from_degree());
    let rep = check_recovered_degree(&b, &mu, &TPowerDegree, 4).unwrap();
    assert!(rep.passed());
}

#[test]
fn oddness_examples() {
    assert!(is_odd_category(&FinGSetCat::trivial_group(), 5).unwrap().odd());
    let rep = is_odd_category(&z2(), 2).unwrap();
    assert!(!rep.odd());
    assert!(rep.witness.unwrap().contains("2 orbits"));
    let empty = is_odd_category(&z2(), 0).unwrap();
    assert!(empty.odd());
    assert_eq!(empty.cospans, 0);
}

#[test]
fn beta_requires_oddness() {
    assert!(beta_measure(&FinGSetCat::trivial_group(), 5).is_ok());
    match beta_measure(&z2(), 2) {
        Err(Error::Precondition { witness, .. }) => assert!(witness.contains("2 orbits")),
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

#[test]
fn f2_measure_exists_exactly_for_odd_categories() {
    let z3 = FinGSetCat::new(PermGroup::cyclic(3));
    for (cat, bound) in [(FinGSetCat::trivial_group(), 5), (z2(), 2), (z3, 3), (s3(), 6)] {
        let odd = is_odd_category(&cat, bound).unwrap().odd();
        let (f2, _) = f2_regular_measure(&cat, bound).unwrap();
        assert_eq!(f2.is_some(), odd);
        assert_eq!(beta_measure(&cat, bound).is_ok(), odd);
        if let Some(m) = f2 {
            assert_eq!(m.s, F2::one());
        }
    }
}

#[test]
fn regular_constraints() {
    let a = FinGSetCat::trivial_group();
    let s = regular_constraint_solve(&a, 2).unwrap();
    // s² = 2s + 4s² + s³ becomes s³ + 3s² + 2s = 0.
    assert!(s.constraints.contains(&Poly::from_ints(&[0, 2, 3, 1])));
    let roots: Vec<Rat> = s.roots.iter().cloned().map(Rat).collect();
    assert_eq!(roots, vec![Rat::int(-2), Rat::int(-1)]);
    assert!(!satisfies_all(&s, 1));
    let s4 = regular_constraint_solve(&a, 4).unwrap();
    assert!(satisfies_all(&s4, -1));
    assert!(satisfies_all(&s4, -2));
}

/// `μ(f) μ(X) = μ(Y)` for every surjection `f: Y -> X`.
fn check_regular<C: RegularCategory, R: Ring, M: Measure<C, R>>(cat: &C, mu: &M, bound: usize) {
    let table = SurjectionTable::new(cat, bound).unwrap();
    for f in table.all() {
        let lhs = mu.value(cat, f).unwrap() * mu.object_value(cat, &cat.target(f)).unwrap();
        assert_eq!(lhs, mu.object_value(cat, &cat.source(f)).unwrap());
    }
}

#[test]
fn regular_measures_are_multiplicative_on_objects() {
    check_regular(&FinGSetCat::trivial_group(), &alpha(), 4);
    check_regular(&FinGSetCat::trivial_group(), &beta_unchecked(), 4);
    check_regular(&z2(), &alpha(), 4);
    check_regular(&z2(), &derived_trivial(), 4);
}

/// `ν_c(f) = c^{|Y| - |X|}`, the t-power degree evaluated at `t = c`.
fn nu_at(c: i64) -> impl DegreeFunction<OpFinSetCat, Rat> {
    FnDegree {
        name: format!("t = {c}"),
        f: move |cat: &OpFinSetCat, f: &<OpFinSetCat as RegularCategory>::Mor| -> Result<Rat> {
            let d = cat.underlying_size(&cat.source(f)) - cat.underlying_size(&cat.target(f));
            Ok(Rat::int(c).pow(d as u32))
        },
    }
}

/// `c^{ρ(Y) - ρ(X)}` on finite G-sets: a candidate degree function that is not trivial for `c ≠ 1`.
fn orbit_power(c: i64) -> impl DegreeFunction<FinGSetCat, Rat> {
    FnDegree {
        name: format!("orbit power {c}"),
        f: move |cat: &FinGSetCat, f: &<FinGSetCat as RegularCategory>::Mor| -> Result<Rat> {
            let d = cat.atom_count(&cat.source(f)) - cat.atom_count(&cat.target(f));
            Ok(Rat::int(c).pow(d as u32))
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn specialized_t_power_round_trips(c in -3i64..4) {
        let b = OpFinSetCat::new();
        let nu = nu_at(c);
        prop_assert!(check_degree_axioms(&b, &nu, 3).unwrap().passed());
        let mu = DerivedMeasure::new(nu_at(c));
        prop_assert!(check_measure_axioms(&b, &mu, 3, false).unwrap().passed());
        prop_assert!(check_recovered_degree(&b, &mu, &nu, 3).unwrap().passed());
        prop_assert!(degree_origin_test(&b, &mu, 3).unwrap().comes_from_degree());
    }

    #[test]
    fn only_the_trivial_degree_function_on_finite_sets(c in -3i64..4) {
        let a = FinGSetCat::trivial_group();
        let rep = check_degree_axioms(&a, &orbit_power(c), 3).unwrap();
        prop_assert_eq!(rep.passed(), c == 1);
        let z = z2();
        let rep = check_degree_axioms(&z, &orbit_power(c), 4).unwrap();
        prop_assert_eq!(rep.passed(), c == 1);
    }
}
