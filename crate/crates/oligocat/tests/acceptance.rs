//! Acceptance suite: one PASS/FAIL line per criterion with its time limit.
//!
//! Lines are printed for every criterion; the process exits 0 after the
//! summary so that failures are reported rather than aborting the test run.
//! Set `ACCEPTANCE_STRICT=1` to exit 1 when any criterion fails, and
//! `ACCEPTANCE_ONLY=3,7` to run a subset.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use oligocat::atoms::*;
use oligocat::deligne;
use oligocat::group::{GSet, PermGroup};
use oligocat::measure::*;
use oligocat::nilpotent::find_nilpotent_nonzero_trace;
use oligocat::regcat::*;
use oligocat::ring::*;
use oligocat::tensor::*;
use oligocat::Result;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn selected(n: usize) -> bool {
    match std::env::var("ACCEPTANCE_ONLY") {
        Ok(list) => list.split(',').any(|s| s.trim() == n.to_string()),
        Err(_) => true,
    }
}

fn run(n: usize, name: &str, limit: Duration, f: impl FnOnce() -> Result<Outcome>) -> Option<bool> {
    if !selected(n) {
        return None;
    }
    let start = Instant::now();
    let res = f();
    let took = start.elapsed();
    let (pass, detail) = match res {
        Ok(o) if took > limit => (false, format!("{} [over time limit]", o.detail)),
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "criterion {n:>2} {} {name} ({:.1}s, limit {}s): {detail}",
        if pass { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        limit.as_secs()
    );
    Some(pass)
}

fn groups() -> Vec<(&'static str, PermGroup)> {
    vec![
        ("1", PermGroup::trivial()),
        ("Z/2", PermGroup::cyclic(2)),
        ("S3", PermGroup::symmetric(3)),
    ]
}

fn ample_count() -> Result<Outcome> {
    let cat = FinGSetCat::trivial_group();
    let n = ample_subobjects(&cat, &cat.points(2), &cat.points(2))?.len();
    outcome(n == 7, format!("{n} ample subsets of [2]x[2]"))
}

fn alpha_formula() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, g) in groups() {
        let cat = FinGSetCat::new(g);
        let mu = DerivedMeasure::<_, Rat, _>::new(TrivialDegree);
        let objects = cat.objects_with_orbits(4)?;
        let mut bad = 0;
        for x in &objects {
            let want = Rat::int(-1).pow(x.orbit_count() as u32 - 1);
            if mu.object_value(&cat, x)? != want {
                bad += 1;
            }
        }
        ok &= bad == 0;
        parts.push(format!("G={name}: {} objects, {bad} mismatches", objects.len()));
    }
    outcome(ok, parts.join("; "))
}

fn find_identity(rep: &CheckReport, terms: &[(usize, &str, usize)], total: &str) -> bool {
    rep.identities.iter().any(|id| {
        id.total == total
            && id.terms.len() == terms.len()
            && id.terms.iter().zip(terms).all(|(a, b)| a.0 == b.0 && a.1 == b.1 && a.2 == b.2)
    })
}

const M3: [(usize, &str, usize); 3] = [(1, "1", 3), (2, "-2", 3), (3, "4", 1)];
const TYPE2: [(usize, &str, usize); 3] = [(2, "-2", 2), (3, "4", 4), (4, "-8", 1)];

fn beta_identities() -> Result<Outcome> {
    let cat = FinGSetCat::trivial_group();
    let beta = beta_measure(&cat, 4)?;
    let rep = check_measure_axioms(&cat, &beta, 4, true)?;
    let m3 = find_identity(&rep, &M3, "1");
    let t2 = find_identity(&rep, &TYPE2, "4");
    let mut detail = format!(
        "axioms {} over {} cases; type-2 identity 2·(-2) + 4·4 + 1·(-8) = 4 {}; m=3 identity 3·1 + 3·(-2) + 1·4 = 1 {} on trivial G",
        if rep.passed() { "pass" } else { "FAIL" },
        rep.cases,
        if t2 { "found" } else { "MISSING" },
        if m3 { "found" } else { "absent" },
    );
    if !m3 {
        let max_atoms = rep
            .identities
            .iter()
            .filter(|id| id.total == "1")
            .map(|id| id.terms.iter().map(|t| t.2).sum::<usize>())
            .max()
            .unwrap_or(0);
        let z3 = FinGSetCat::new(PermGroup::cyclic(3));
        let rz = check_measure_axioms(&z3, &beta_measure(&z3, 3)?, 3, true)?;
        detail.push_str(&format!(
            " (over the one-point atom of finite sets the fiber is a single point, so m=1 there and every identity with total 1 involves at most {max_atoms} ample W; on G=Z/3 the m=3 identity is {} and axioms {})",
            if find_identity(&rz, &M3, "1") { "reproduced" } else { "also absent" },
            if rz.passed() { "pass" } else { "FAIL" }
        ));
    }
    outcome(rep.passed() && m3 && t2, detail)
}

fn oddness() -> Result<Outcome> {
    let triv = FinGSetCat::trivial_group();
    let z2 = FinGSetCat::new(PermGroup::cyclic(2));
    let ot = is_odd_category(&triv, 5)?;
    let oz = is_odd_category(&z2, 2)?;
    let witness_ok = oz.witness.as_deref().is_some_and(|w| w.starts_with("2-point orbit -> 1-point orbit <- 2-point orbit: 2 orbits"));
    let beta_t = beta_measure(&triv, 5).is_ok();
    let beta_z = matches!(beta_measure(&z2, 2), Err(oligocat::Error::Precondition { .. }));
    let (ft, _) = f2_regular_measure(&triv, 5)?;
    let (fz, _) = f2_regular_measure(&z2, 2)?;
    let f2_ok = ft.is_some() == ot.odd() && fz.is_some() == oz.odd();
    let pass = ot.odd() && !oz.odd() && witness_ok && beta_t && beta_z && f2_ok;
    outcome(
        pass,
        format!(
            "trivial G odd={} ({} cospans); Z/2 odd={} witness [{}]; beta ok on trivial={beta_t}, refused on Z/2={beta_z}; F2 measure matches oddness={f2_ok}",
            ot.odd(),
            ot.cospans,
            oz.odd(),
            oz.witness.clone().unwrap_or_default()
        ),
    )
}

fn round_trip() -> Result<Outcome> {
    let a = FinGSetCat::trivial_group();
    let b = OpFinSetCat::new();
    let mu_a = DerivedMeasure::<_, Rat, _>::new(TrivialDegree);
    let mu_b = DerivedMeasure::<_, Poly, _>::new(TPowerDegree);
    let reports = [
        check_recovered_degree(&a, &mu_a, &TrivialDegree, 6)?,
        check_degree_axioms::<_, Rat, _>(&a, &TrivialDegree, 4)?,
        check_measure_axioms(&a, &mu_a, 4, false)?,
        check_recovered_degree(&b, &mu_b, &TPowerDegree, 4)?,
        check_degree_axioms::<_, Poly, _>(&b, &TPowerDegree, 4)?,
        check_measure_axioms(&b, &mu_b, 4, false)?,
    ];
    let labels = [
        "recover trivial (finite sets, <=6)",
        "degree axioms trivial (<=4)",
        "measure axioms derived trivial (<=4)",
        "recover t-power (B, <=4)",
        "degree axioms t-power (B, <=4)",
        "measure axioms derived t-power (B, <=4)",
    ];
    let parts: Vec<String> = reports
        .iter()
        .zip(labels)
        .map(|(r, l)| format!("{l}: {} cases {}", r.cases, if r.passed() { "ok" } else { "FAIL" }))
        .collect();
    outcome(reports.iter().all(CheckReport::passed), parts.join("; "))
}

fn phi_line(name: &str, r: &PhiReport) -> String {
    let slowest = r.timings.iter().map(|t| t.1).max().unwrap_or_default();
    let mut s = format!(
        "{name}: {} objects, {} Hom spaces, {}/{} triples verified ({} basis pairs), {} failures, slowest triple {:.1}s",
        r.objects,
        r.hom_spaces,
        r.triples_checked,
        r.triples_checked + r.triples_skipped.len(),
        r.pairs,
        r.failures.len(),
        slowest.as_secs_f64()
    );
    if !r.triples_skipped.is_empty() {
        s.push_str(&format!(
            ", not exhaustive: {}; {} random pairs checked in {} of these",
            summarize(&r.triples_skipped),
            r.sampled_pairs,
            r.sampled_triples
        ));
    }
    s
}

fn summarize(items: &[String]) -> String {
    if items.len() <= 2 {
        items.join(", ")
    } else {
        format!("{}, ... ({} in total)", items[..2].join(", "), items.len())
    }
}

fn phi() -> Result<Outcome> {
    let triv = FinGSetCat::trivial_group();
    let z2 = FinGSetCat::new(PermGroup::cyclic(2));
    let b = OpFinSetCat::new();
    let opts = |cap| PhiOptions {
        triple_cap: Some(cap),
        samples: 20,
        sample_fiber_cap: 10,
        seed: 1,
    };
    let ra = verify_phi::<_, Rat, _>(&triv, TrivialDegree, 3, &opts(18))?;
    let rz = verify_phi::<_, Rat, _>(&z2, TrivialDegree, 4, &opts(12))?;
    let rb = verify_phi::<_, Poly, _>(&b, TPowerDegree, 3, &PhiOptions::default())?;
    let pass = [&ra, &rz, &rb].iter().all(|r| r.passed() && r.complete());
    let detail = [
        phi_line("finite sets <=3", &ra),
        phi_line("Z/2 <=4", &rz),
        phi_line("B with t-power <=3", &rb),
    ]
    .join("; ");
    outcome(pass, detail)
}

fn deligne_recovery() -> Result<Outcome> {
    let rep = deligne::compare_with_knop(3)?;
    let cat = OpFinSetCat::new();
    let one = cat.set(1);
    let split = Partition { blocks: vec![0, 1] };
    let a = KnopMor::<_, Poly>::basis(&cat, &one, &one, split.clone())?;
    let c = knop_compose(&cat, &a, &a, &TPowerDegree)?;
    let singleton = c.terms.into_iter().collect::<Vec<_>>() == vec![(split, Poly::t_pow(1))];
    outcome(
        rep.passed() && singleton,
        format!(
            "{} diagram pairs, {} disagreements; singleton composite is exactly t·[{{{{z}},{{x}}}}]: {singleton}",
            rep.pairs,
            rep.failures.len()
        ),
    )
}

fn regular_classification() -> Result<Outcome> {
    let cat = FinGSetCat::trivial_group();
    let small = regular_constraint_solve(&cat, 2)?;
    let square = Poly::from_ints(&[0, 2, 3, 1]);
    let has_square = small.constraints.iter().any(|p| *p == square || *p == -square.clone());
    let q = |k: i64| BigRational::from_integer(k.into());
    let roots_ok = small.roots == vec![q(-2), q(-1)];
    let big = regular_constraint_solve(&cat, 4)?;
    let both = satisfies_all(&big, -1) && satisfies_all(&big, -2);
    let big_roots = big.roots == vec![q(-2), q(-1)];
    let roots: Vec<String> = small.roots.iter().map(|r| r.to_string()).collect();
    outcome(
        has_square && roots_ok && both && big_roots,
        format!(
            "square constraint 2s + 3s^2 + s^3 = 0 present: {has_square}; roots {{{}}}; {} constraints up to size 4, alpha and beta satisfy all: {both}; common roots unchanged: {big_roots}",
            roots.join(", "),
            big.constraints.len()
        ),
    )
}

fn equivalence_calculus() -> Result<Outcome> {
    const BUDGET: usize = 5_000_000;
    let mut subgroups = 0;
    let mut sub_bad = Vec::new();
    let mut quotients = 0;
    let mut quot_bad = Vec::new();
    let mut checked = 0;
    let mut over_budget = 0;
    let mut passing = 0;
    let mut closure_bad = 0;
    for g in [PermGroup::trivial(), PermGroup::cyclic(2)] {
        let cat = FinGSetCat::new(g);
        for x in cat.objects(4)? {
            let xx = cat.product(&x, &x);
            for h in automorphism_subgroups(&cat, &x)? {
                subgroups += 1;
                let autos: Vec<GMor> = h.iter().map(|m| cat.gmor(&x, &x, m.clone())).collect::<Result<_>>()?;
                let r = RelationSet::of_automorphisms(&cat, &x, &autos)?;
                let verdict = relation_set_check(&cat, &r, BUDGET);
                checked += 1;
                if verdict? == RelationSetVerdict::Pass {
                    passing += 1;
                    if !closed_under_composition(&cat, &r)? {
                        closure_bad += 1;
                    }
                }
                if equivalence_dichotomy(&cat, &r)? != Dichotomy::Subgroup(h.clone()) {
                    sub_bad.push(format!("{} with {} automorphisms", cat.describe_obj(&x), h.len()));
                }
            }
            for q in proper_quotients(&cat, &x)? {
                quotients += 1;
                let r = RelationSet::of_quotient(&cat, &q)?;
                match relation_set_check(&cat, &r, BUDGET) {
                    Ok(v) => {
                        checked += 1;
                        if v == RelationSetVerdict::Pass {
                            passing += 1;
                            if !closed_under_composition(&cat, &r)? {
                                closure_bad += 1;
                            }
                        } else {
                            quot_bad.push(format!("{}: {v:?}", cat.describe_mor(&q)));
                        }
                    }
                    Err(oligocat::Error::SizeLimit { .. }) => over_budget += 1,
                    Err(e) => return Err(e),
                }
                let kernel = cat.fiber_product(&q, &q);
                match equivalence_dichotomy(&cat, &r)? {
                    Dichotomy::ProperQuotient { kernel: k, .. } if k == kernel => {}
                    other => quot_bad.push(format!("{}: {other:?}", cat.describe_sub(&xx, &kernel))),
                }
            }
        }
    }
    let pass = sub_bad.is_empty() && quot_bad.is_empty() && closure_bad == 0;
    outcome(
        pass,
        format!(
            "{subgroups} subgroups recovered ({} mismatches); {quotients} quotients recovered with matching kernel pair ({} mismatches); relation-set check run on {checked} sets, {passing} pass, composition closure fails on {closure_bad}; {over_budget} quotient relation sets exceed the check budget of {BUDGET} candidates",
            sub_bad.len(),
            quot_bad.len()
        ),
    )
}

fn random_matrix<C: RegularCategory>(
    cat: &C,
    rng: &mut ChaCha8Rng,
    source: &[C::Obj],
    target: &[C::Obj],
) -> Result<PermMatrix<C, Rat>> {
    let mut m = PermMatrix::zero(source, target);
    for key in matrix_basis(cat, source, target)? {
        let v: i64 = rng.gen_range(-3..=3);
        m.add_entry(key, Rat::int(v));
    }
    Ok(m)
}

fn trace_suite() -> Result<Outcome> {
    let cat = FinGSetCat::trivial_group();
    let z2 = FinGSetCat::new(PermGroup::cyclic(2));
    let derived = DerivedMeasure::<_, Rat, _>::new(TrivialDegree);
    let mut dims = 0;
    let mut dim_bad = 0;
    for x in cat.objects(4)? {
        for v in [
            (categorical_dim(&cat, &[x.clone()], &alpha())?, alpha().object_value(&cat, &x)?),
            (categorical_dim(&cat, &[x.clone()], &beta_unchecked())?, beta_unchecked().object_value(&cat, &x)?),
            (categorical_dim(&cat, &[x.clone()], &derived)?, derived.object_value(&cat, &x)?),
        ] {
            dims += 1;
            dim_bad += usize::from(v.0 != v.1);
        }
    }
    let z2_derived = DerivedMeasure::<_, Rat, _>::new(TrivialDegree);
    for x in z2.objects(4)? {
        dims += 1;
        dim_bad += usize::from(categorical_dim(&z2, &[x.clone()], &z2_derived)? != z2_derived.object_value(&z2, &x)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pool: Vec<GSet> = cat.objects(2)?;
    let alpha = alpha();
    let composer_a = PermComposer::new(&alpha);
    let mut cyc_bad = 0;
    for _ in 0..100 {
        let pick = |rng: &mut ChaCha8Rng| -> Vec<GSet> {
            let k = rng.gen_range(1..=2);
            (0..k).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
        };
        let (s, t) = (pick(&mut rng), pick(&mut rng));
        let m = random_matrix(&cat, &mut rng, &s, &t)?;
        let n = random_matrix(&cat, &mut rng, &t, &s)?;
        let mn = trace(&cat, &composer_a.compose(&cat, &m, &n)?, &alpha)?;
        let nm = trace(&cat, &composer_a.compose(&cat, &n, &m)?, &alpha)?;
        cyc_bad += usize::from(mn != nm);
    }
    let a1 = build_a1(&cat, &cat.points(2))?;
    let search = find_nilpotent_nonzero_trace(&cat, &a1.objects, &alpha, 200)?;
    let found = search.witness.is_some();
    let nil = match &search.witness {
        Some(w) => format!("witness with nilpotency index {} and trace {}", w.index, w.trace),
        None => format!(
            "no witness: the {}-dimensional endomorphism algebra has radical of dimension {}, so the trace vanishes on every nilpotent",
            search.dim, search.radical_dim
        ),
    };
    outcome(
        dim_bad == 0 && cyc_bad == 0 && found,
        format!("dim = mu on {dims} atoms ({dim_bad} mismatches); tr(MN) = tr(NM) on 100 samples ({cyc_bad} mismatches); nilpotent search on Vec of A1([2]) under alpha: {nil}"),
    )
}

fn main() {
    let results: BTreeMap<usize, bool> = [
        (1, run(1, "ample count", Duration::from_secs(1), ample_count)),
        (2, run(2, "alpha formula", Duration::from_secs(10), alpha_formula)),
        (3, run(3, "beta identities", Duration::from_secs(30), beta_identities)),
        (4, run(4, "oddness dichotomy", Duration::from_secs(10), oddness)),
        (5, run(5, "degree/measure round trip", Duration::from_secs(60), round_trip)),
        (6, run(6, "comparison functor", Duration::from_secs(300), phi)),
        (7, run(7, "Deligne recovery", Duration::from_secs(60), deligne_recovery)),
        (8, run(8, "regular-measure classification", Duration::from_secs(30), regular_classification)),
        (9, run(9, "equivalence-relation calculus", Duration::from_secs(300), equivalence_calculus)),
        (10, run(10, "trace suite", Duration::from_secs(120), trace_suite)),
    ]
    .into_iter()
    .filter_map(|(n, r)| r.map(|p| (n, p)))
    .collect();
    let failed: Vec<String> = results.iter().filter(|(_, p)| !**p).map(|(n, _)| n.to_string()).collect();
    println!(
        "acceptance: {}/{} criteria pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(", ")) }
    );
    if !failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
