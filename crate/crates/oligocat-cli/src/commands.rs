use serde_json::{json, Value};

use oligocat::atoms::{
    atom_product, automorphism_subgroups, build_a1, closed_under_composition, equivalence_dichotomy, proper_quotients,
    relation_set_check, Dichotomy, RelationSet, RelationSetVerdict,
};
use oligocat::deligne::compare_with_knop;
use oligocat::measure::{
    alpha, beta_measure, beta_unchecked, check_degree_axioms, check_measure_axioms, check_recovered_degree,
    f2_regular_measure, is_odd_category, regular_constraint_solve, satisfies_all, DegreeFunction, DerivedMeasure,
    Measure, RegularMeasure, TPowerDegree, TrivialDegree,
};
use oligocat::nilpotent::find_nilpotent_nonzero_trace;
use oligocat::poset::FinitePoset;
use oligocat::regcat::{FinGSetCat, OpFinSetCat, RegularCategory};
use oligocat::ring::{Poly, Rat, Ring, F2};
use oligocat::tensor::{
    knop_compose, matrix_basis, perm_compose, verify_phi, KnopMor, PermMatrix, PhiOptions,
};

use crate::report::Report;
use crate::scenario::{parse_gset, parse_set, DegreeName, Instance, MeasureName, RingName};

const RELATION_SET_BUDGET: usize = 1_000_000;
const NILPOTENT_MAX_DIM: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Subobjects,
    Mobius,
    CheckDegree,
    DeriveMeasure,
    CheckMeasure,
    Oddness,
    RegularSolve,
    AtomProduct,
    Dichotomy,
    KnopCompose,
    PermCompose,
    PhiVerify,
    DeligneCompare,
    NilpotentSearch,
    ReportAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Subobjects => "subobjects",
            Command::Mobius => "mobius",
            Command::CheckDegree => "check-degree",
            Command::DeriveMeasure => "derive-measure",
            Command::CheckMeasure => "check-measure",
            Command::Oddness => "oddness",
            Command::RegularSolve => "regular-solve",
            Command::AtomProduct => "atom-product",
            Command::Dichotomy => "dichotomy",
            Command::KnopCompose => "knop-compose",
            Command::PermCompose => "perm-compose",
            Command::PhiVerify => "phi-verify",
            Command::DeligneCompare => "deligne-compare",
            Command::NilpotentSearch => "nilpotent-search",
            Command::ReportAll => "report-all",
        }
    }
}

#[derive(Clone)]
pub struct Ctx {
    pub bound: usize,
    pub object: Option<String>,
    pub object2: Option<String>,
    pub seed: u64,
    pub triple_cap: Option<usize>,
    pub samples: usize,
    pub ring: RingName,
    pub degree: DegreeName,
    pub measure: MeasureName,
}

#[derive(Debug)]
pub enum CmdError {
    /// Malformed input or an exceeded bound.
    Input(String),
    /// A precondition of the requested check does not hold; reported as a failure.
    Precondition { message: String, witness: String },
}

impl From<oligocat::Error> for CmdError {
    fn from(e: oligocat::Error) -> Self {
        match e {
            oligocat::Error::Precondition { message, witness } => CmdError::Precondition { message, witness },
            other => CmdError::Input(other.to_string()),
        }
    }
}

impl From<String> for CmdError {
    fn from(s: String) -> Self {
        CmdError::Input(s)
    }
}

type Res<T> = std::result::Result<T, CmdError>;

/// Instance-specific pieces the generic commands need.
pub trait CliCat: RegularCategory {
    fn parse(&self, text: &str) -> std::result::Result<Self::Obj, String>;
    fn beta(&self, bound: usize) -> oligocat::Result<RegularMeasure<Rat>>;
    fn gf2(&self, bound: usize) -> Res<RegularMeasure<F2>>;
}

impl CliCat for FinGSetCat {
    fn parse(&self, text: &str) -> std::result::Result<Self::Obj, String> {
        parse_gset(self, text)
    }

    fn beta(&self, bound: usize) -> oligocat::Result<RegularMeasure<Rat>> {
        beta_measure(self, bound)
    }

    fn gf2(&self, bound: usize) -> Res<RegularMeasure<F2>> {
        let (m, rep) = f2_regular_measure(self, bound)?;
        m.ok_or_else(|| CmdError::Precondition {
            message: "no regular GF(2) measure".into(),
            witness: rep.witness.unwrap_or_default(),
        })
    }
}

impl CliCat for OpFinSetCat {
    fn parse(&self, text: &str) -> std::result::Result<Self::Obj, String> {
        parse_set(self, text)
    }

    fn beta(&self, _bound: usize) -> oligocat::Result<RegularMeasure<Rat>> {
        Ok(beta_unchecked())
    }

    fn gf2(&self, _bound: usize) -> Res<RegularMeasure<F2>> {
        Err(CmdError::Input("the GF(2) measure is only defined for G-set instances".into()))
    }
}

fn object<C: CliCat>(cat: &C, ctx: &Ctx, second: bool) -> Res<C::Obj> {
    let (flag, text) = if second {
        ("--object2", &ctx.object2)
    } else {
        ("--object", &ctx.object)
    };
    let text = text
        .as_deref()
        .ok_or_else(|| CmdError::Input(format!("{flag} is required (or set it in the scenario)")))?;
    let x = cat.parse(text)?;
    if cat.underlying_size(&x) > ctx.bound {
        return Err(CmdError::Input(format!(
            "{} has {} points, above the bound {}",
            cat.describe_obj(&x),
            cat.underlying_size(&x),
            ctx.bound
        )));
    }
    Ok(x)
}

fn knop_json<C: RegularCategory, R: Ring>(cat: &C, m: &KnopMor<C, R>) -> Value {
    let yx = cat.product(&m.target, &m.source);
    Value::Array(
        m.terms
            .iter()
            .map(|(s, c)| json!({ "relation": cat.describe_sub(&yx, s), "coeff": c.to_string() }))
            .collect(),
    )
}

fn perm_json<C: RegularCategory, R: Ring>(cat: &C, m: &PermMatrix<C, R>) -> Value {
    Value::Array(
        m.entries
            .iter()
            .map(|((j, k, s), c)| {
                let prod = cat.product(&m.target[*j], &m.source[*k]);
                json!({ "row": j, "col": k, "orbit": cat.describe_sub(&prod, s), "coeff": c.to_string() })
            })
            .collect(),
    )
}

fn subobjects<C: CliCat>(cat: &C, ctx: &Ctx) -> Res<Report> {
    let x = object(cat, ctx, false)?;
    let subs = cat.subobjects(&x)?;
    let mut r = Report::new("subobjects", cat.name(), ctx.bound);
    r.set("object", cat.describe_obj(&x));
    r.set("count", subs.len());
    r.set(
        "subobjects",
        subs.iter().map(|s| cat.describe_sub(&x, s)).collect::<Vec<_>>(),
    );
    Ok(r)
}

fn mobius<C: CliCat>(cat: &C, ctx: &Ctx) -> Res<Report> {
    let x = object(cat, ctx, false)?;
    let (p, subs) = FinitePoset::of_subobjects(cat, &x)?;
    let bottom = cat.bottom(&x)?;
    let top = cat.top(&x);
    let index = |s: &C::Sub| subs.iter().position(|t| t == s).expect("bottom and top are subobjects");
    let mut table = Vec::new();
    for i in 0..p.len() {
        for j in 0..p.len() {
            if p.leq(i, j) {
                table.push(json!({
                    "lower": cat.describe_sub(&x, &subs[i]),
                    "upper": cat.describe_sub(&x, &subs[j]),
                    "value": p.moebius(i, j)?.to_string(),
                }));
            }
        }
    }
    let mut r = Report::new("mobius", cat.name(), ctx.bound);
    r.set("object", cat.describe_obj(&x));
    r.set("size", p.len());
    r.set("bottom", cat.describe_sub(&x, &bottom));
    r.set("top", cat.describe_sub(&x, &top));
    r.set("bottom_to_top", p.moebius(index(&bottom), index(&top))?.to_string());
    r.set("table", table);
    Ok(r)
}

fn regular_solve<C: CliCat>(cat: &C, ctx: &Ctx) -> Res<Report> {
    let s = regular_constraint_solve(cat, ctx.bound)?;
    let mut r = Report::new("regular-solve", cat.name(), ctx.bound);
    // An empty root set is an answer, not a failed check.
    r.set("variable", "t stands for the common value s");
    r.set("constraints", s.constraints.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    r.set("gcd", s.gcd.to_string());
    r.set("roots", s.roots.iter().map(|q| q.to_string()).collect::<Vec<_>>());
    r.set("alpha_satisfies_all", satisfies_all(&s, -1));
    r.set("beta_satisfies_all", satisfies_all(&s, -2));
    Ok(r)
}

fn atom_product_cmd<C: CliCat>(cat: &C, ctx: &Ctx) -> Res<Report> {
    let x = object(cat, ctx, false)?;
    let y = object(cat, ctx, true)?;
    let prod = cat.product(&x, &y);
    let atoms = atom_product(cat, &x, &y)?;
    let mut r = Report::new("atom-product", cat.name(), ctx.bound);
    r.set("left", cat.describe_obj(&x));
    r.set("right", cat.describe_obj(&y));
    r.set("count", atoms.len());
    r.set(
        "atoms",
        atoms
            .iter()
            .map(|w| json!({ "subobject": cat.describe_sub(&prod, &w.sub), "object": cat.describe_obj(&w.object) }))
            .collect::<Vec<_>>(),
    );
    Ok(r)
}

fn oddness(cat: &FinGSetCat, ctx: &Ctx) -> Res<Report> {
    let odd = is_odd_category(cat, ctx.bound)?;
    let (f2, _) = f2_regular_measure(cat, ctx.bound)?;
    let mut r = Report::new("oddness", cat.name(), ctx.bound);
    if let Some(w) = &odd.witness {
        r.fail("odd", w.clone());
    }
    r.set("cospans", odd.cospans);
    r.set("odd", odd.odd());
    r.set("gf2_measure_exists", f2.is_some());
    r.set("beta_available", beta_measure(cat, ctx.bound).is_ok());
    Ok(r)
}

fn dichotomy_on(cat: &FinGSetCat, x: &oligocat::group::GSet, r: &mut Report) -> Res<(usize, usize)> {
    let name = cat.describe_obj(x);
    let subgroups = automorphism_subgroups(cat, x)?;
    for gamma in &subgroups {
        let autos = gamma
            .iter()
            .map(|m| cat.gmor(x, x, m.clone()))
            .collect::<oligocat::Result<Vec<_>>>()?;
        let set = RelationSet::of_automorphisms(cat, x, &autos)?;
        if let RelationSetVerdict::Fail(tag, d) = relation_set_check(cat, &set, RELATION_SET_BUDGET)? {
            r.fail(&format!("relation-set-{tag}"), format!("{name}, subgroup {gamma:?}: {d}"));
        }
        if !closed_under_composition(cat, &set)? {
            r.fail("closure", format!("{name}, subgroup {gamma:?}"));
        }
        let got = equivalence_dichotomy(cat, &set)?;
        if got != Dichotomy::Subgroup(gamma.clone()) {
            r.fail("subgroup", format!("{name}, subgroup {gamma:?}: got {got:?}"));
        }
    }
    let quotients = proper_quotients(cat, x)?;
    for q in &quotients {
        let set = RelationSet::of_quotient(cat, q)?;
        if let RelationSetVerdict::Fail(tag, d) = relation_set_check(cat, &set, RELATION_SET_BUDGET)? {
            r.fail(&format!("relation-set-{tag}"), format!("{name}, quotient {:?}: {d}", q.map));
        }
        let kernel = cat.fiber_product(q, q);
        match equivalence_dichotomy(cat, &set)? {
            Dichotomy::ProperQuotient { kernel: k, .. } if k == kernel => {}
            other => r.fail("quotient", format!("{name}, quotient {:?}: got {other:?}", q.map)),
        }
    }
    Ok((subgroups.len(), quotients.len()))
}

fn dichotomy(cat: &FinGSetCat, ctx: &Ctx) -> Res<Report> {
    let objects = match &ctx.object {
        Some(_) => vec![object(cat, ctx, false)?],
        None => cat.objects(ctx.bound)?.into_iter().filter(|x| x.points() > 0).collect(),
    };
    let mut r = Report::new("dichotomy", cat.name(), ctx.bound);
    let mut rows = Vec::new();
    for x in &objects {
        let (s, q) = dichotomy_on(cat, x, &mut r)?;
        rows.push(json!({ "object": cat.describe_obj(x), "subgroups": s, "quotients": q }));
    }
    r.set("objects", rows);
    Ok(r)
}

fn deligne(ctx: &Ctx) -> Res<Report> {
    let rep = compare_with_knop(ctx.bound)?;
    let mut r = Report::new("deligne-compare", OpFinSetCat::new().name(), ctx.bound);
    r.fail_all(&rep.failures);
    r.set("pairs", rep.pairs);
    Ok(r)
}

/// A command generic over the coefficient ring and degree function.
trait DegreeJob {
    fn run<C: CliCat, R: Ring, D: DegreeFunction<C, R> + Clone>(&self, cat: &C, nu: D, ctx: &Ctx) -> Res<Report>;
}

fn with_degree<C: CliCat, J: DegreeJob>(cat: &C, ctx: &Ctx, job: &J) -> Res<Report> {
    match (ctx.ring, ctx.degree) {
        (RingName::Rational, DegreeName::Trivial) => job.run::<C, Rat, _>(cat, TrivialDegree, ctx),
        (RingName::PolyT, DegreeName::Trivial) => job.run::<C, Poly, _>(cat, TrivialDegree, ctx),
        (RingName::Gf2, DegreeName::Trivial) => job.run::<C, F2, _>(cat, TrivialDegree, ctx),
        (RingName::PolyT, DegreeName::TPower) => job.run(cat, TPowerDegree, ctx),
        (_, DegreeName::TPower) => Err(CmdError::Input("the t-power degree needs --ring poly-t".into())),
    }
}

/// A command generic over the measure.
trait MeasureJob {
    fn run<C: CliCat, R: Ring, M: Measure<C, R>>(&self, cat: &C, mu: &M, ctx: &Ctx) -> Res<Report>;
}

struct Derived<'j, J>(&'j J);

impl<J: MeasureJob> DegreeJob for Derived<'_, J> {
    fn run<C: CliCat, R: Ring, D: DegreeFunction<C, R> + Clone>(&self, cat: &C, nu: D, ctx: &Ctx) -> Res<Report> {
        self.0.run(cat, &DerivedMeasure::new(nu), ctx)
    }
}

fn require_rational(ctx: &Ctx, what: &str) -> Res<()> {
    if ctx.ring != RingName::Rational {
        return Err(CmdError::Input(format!("the {what} measure needs --ring rational")));
    }
    Ok(())
}

fn with_measure<C: CliCat, J: MeasureJob>(cat: &C, ctx: &Ctx, job: &J) -> Res<Report> {
    match ctx.measure {
        MeasureName::Derived => with_degree(cat, ctx, &Derived(job)),
        MeasureName::Alpha => {
            require_rational(ctx, "alpha")?;
            job.run(cat, &alpha(), ctx)
        }
        MeasureName::Beta => {
            require_rational(ctx, "beta")?;
            job.run(cat, &cat.beta(ctx.bound)?, ctx)
        }
        MeasureName::Gf2AllOnes => {
            if ctx.ring != RingName::Gf2 {
                return Err(CmdError::Input("the gf2-all-ones measure needs --ring gf2".into()));
            }
            job.run(cat, &cat.gf2(ctx.bound)?, ctx)
        }
    }
}

struct CheckDegree;

impl DegreeJob for CheckDegree {
    fn run<C: CliCat, R: Ring, D: DegreeFunction<C, R> + Clone>(&self, cat: &C, nu: D, ctx: &Ctx) -> Res<Report> {
        let rep = check_degree_axioms(cat, &nu, ctx.bound)?;
        let mut r = Report::new("check-degree", cat.name(), ctx.bound);
        r.fail_all(&rep.failures);
        r.set("degree", nu.name());
        r.set("cases", rep.cases);
        Ok(r)
    }
}

struct DeriveMeasure;

impl DegreeJob for DeriveMeasure {
    fn run<C: CliCat, R: Ring, D: DegreeFunction<C, R> + Clone>(&self, cat: &C, nu: D, ctx: &Ctx) -> Res<Report> {
        let mu = DerivedMeasure::new(nu.clone());
        let mut values = Vec::new();
        for x in cat.objects(ctx.bound)?.into_iter().filter(|x| cat.is_principal(x)) {
            values.push(json!({
                "object": cat.describe_obj(&x),
                "atoms": cat.atom_count(&x),
                "value": mu.object_value(cat, &x)?.to_string(),
            }));
        }
        let rep = check_recovered_degree(cat, &mu, &nu, ctx.bound)?;
        let mut r = Report::new("derive-measure", cat.name(), ctx.bound);
        r.fail_all(&rep.failures);
        r.set("measure", mu.name());
        r.set("values", values);
        r.set("round_trip_cases", rep.cases);
        Ok(r)
    }
}

struct PhiVerify;

impl DegreeJob for PhiVerify {
    fn run<C: CliCat, R: Ring, D: DegreeFunction<C, R> + Clone>(&self, cat: &C, nu: D, ctx: &Ctx) -> Res<Report> {
        let opts = PhiOptions {
            seed: ctx.seed,
            triple_cap: ctx.triple_cap,
            samples: ctx.samples,
            sample_fiber_cap: 10,
        };
        let rep = verify_phi(cat, nu, ctx.bound, &opts)?;
        let mut r = Report::new("phi-verify", cat.name(), ctx.bound);
        r.fail_all(&rep.failures);
        // Triples above the cap are sampled rather than exhausted; the report says so.
        r.set("complete", rep.complete());
        r.set("triples_skipped", rep.triples_skipped.clone());
        r.set("sampled_pairs", rep.sampled_pairs);
        r.set("objects", rep.objects);
        r.set("hom_spaces", rep.hom_spaces);
        r.set("pairs", rep.pairs);
        r.set("triples_checked", rep.triples_checked);
        Ok(r)
    }
}

struct KnopComposeJob;

impl DegreeJob for KnopComposeJob {
    fn run<C: CliCat, R: Ring, D: DegreeFunction<C, R> + Clone>(&self, cat: &C, nu: D, ctx: &Ctx) -> Res<Report> {
        let x = object(cat, ctx, false)?;
        let y = object(cat, ctx, true)?;
        let there = principal_relations::<C, R>(cat, &x, &y)?;
        let back = principal_relations::<C, R>(cat, &y, &x)?;
        let mut r = Report::new("knop-compose", cat.name(), ctx.bound);
        let (id_x, id_y) = (KnopMor::identity(cat, &x), KnopMor::identity(cat, &y));
        let mut rows = Vec::new();
        for a in &there {
            if knop_compose(cat, &id_y, a, &nu)? != *a || knop_compose(cat, a, &id_x, &nu)? != *a {
                r.fail("identity", format!("identity law fails on {}", knop_json(cat, a)));
            }
            for b in &back {
                let c = knop_compose(cat, b, a, &nu)?;
                rows.push(json!({ "a": knop_json(cat, a), "b": knop_json(cat, b), "b_after_a": knop_json(cat, &c) }));
            }
        }
        r.set("degree", nu.name());
        r.set("source", cat.describe_obj(&x));
        r.set("target", cat.describe_obj(&y));
        r.set("composites", rows);
        Ok(r)
    }
}

fn principal_relations<C: CliCat, R: Ring>(cat: &C, x: &C::Obj, y: &C::Obj) -> Res<Vec<KnopMor<C, R>>> {
    let yx = cat.product(y, x);
    let mut out = Vec::new();
    for s in cat.subobjects(&yx)? {
        if cat.is_principal(&cat.sub_object(&yx, &s).0) {
            out.push(KnopMor::basis(cat, x, y, s)?);
        }
    }
    Ok(out)
}

struct CheckMeasure;

impl MeasureJob for CheckMeasure {
    fn run<C: CliCat, R: Ring, M: Measure<C, R>>(&self, cat: &C, mu: &M, ctx: &Ctx) -> Res<Report> {
        let rep = check_measure_axioms(cat, mu, ctx.bound, true)?;
        let mut r = Report::new("check-measure", cat.name(), ctx.bound);
        r.fail_all(&rep.failures);
        r.set("measure", mu.name());
        r.set("cases", rep.cases);
        r.set(
            "base_change_identities",
            rep.identities.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        );
        Ok(r)
    }
}

struct PermComposeJob;

impl MeasureJob for PermComposeJob {
    fn run<C: CliCat, R: Ring, M: Measure<C, R>>(&self, cat: &C, mu: &M, ctx: &Ctx) -> Res<Report> {
        let xs = vec![object(cat, ctx, false)?];
        let ys = vec![object(cat, ctx, true)?];
        let units = |s: &[C::Obj], t: &[C::Obj]| -> Res<Vec<PermMatrix<C, R>>> {
            Ok(matrix_basis(cat, s, t)?
                .into_iter()
                .map(|k| {
                    let mut m = PermMatrix::zero(s, t);
                    m.add_entry(k, R::one());
                    m
                })
                .collect())
        };
        let there = units(&xs, &ys)?;
        let back = units(&ys, &xs)?;
        let (id_x, id_y) = (PermMatrix::identity(cat, &xs), PermMatrix::identity(cat, &ys));
        let mut r = Report::new("perm-compose", cat.name(), ctx.bound);
        let mut rows = Vec::new();
        for a in &there {
            if perm_compose(cat, &id_y, a, mu)? != *a || perm_compose(cat, a, &id_x, mu)? != *a {
                r.fail("identity", format!("identity law fails on {}", perm_json(cat, a)));
            }
            for b in &back {
                let c = perm_compose(cat, b, a, mu)?;
                rows.push(json!({ "a": perm_json(cat, a), "b": perm_json(cat, b), "b_after_a": perm_json(cat, &c) }));
            }
        }
        r.set("measure", mu.name());
        r.set("source", cat.describe_obj(&xs[0]));
        r.set("target", cat.describe_obj(&ys[0]));
        r.set("composites", rows);
        Ok(r)
    }
}

fn nilpotent_with<C: CliCat, M: Measure<C, Rat>>(cat: &C, mu: &M, ctx: &Ctx) -> Res<Report> {
    let x = object(cat, ctx, false)?;
    let atoms = build_a1(cat, &x)?.objects;
    let s = find_nilpotent_nonzero_trace(cat, &atoms, mu, NILPOTENT_MAX_DIM)?;
    let mut r = Report::new("nilpotent-search", cat.name(), ctx.bound);
    r.set("measure", mu.name());
    r.set("object", cat.describe_obj(&x));
    r.set("atoms", atoms.len());
    r.set("dim", s.dim);
    r.set("radical_dim", s.radical_dim);
    r.set("candidates", s.candidates);
    r.set("exhausted", s.exhausted());
    r.set(
        "witness",
        match &s.witness {
            Some(w) => json!({
                "coords": w.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "index": w.index,
                "trace": w.trace.to_string(),
            }),
            None => Value::Null,
        },
    );
    Ok(r)
}

fn nilpotent<C: CliCat>(cat: &C, ctx: &Ctx) -> Res<Report> {
    let rational = ctx.ring == RingName::Rational;
    match ctx.measure {
        MeasureName::Alpha if rational => nilpotent_with(cat, &alpha(), ctx),
        MeasureName::Beta if rational => nilpotent_with(cat, &cat.beta(ctx.bound)?, ctx),
        MeasureName::Derived if rational && ctx.degree == DegreeName::Trivial => {
            nilpotent_with(cat, &DerivedMeasure::<C, Rat, _>::new(TrivialDegree), ctx)
        }
        _ => Err(CmdError::Input("the nilpotent search needs --ring rational and a rational measure".into())),
    }
}

fn only(kind: &str, cmd: Command) -> CmdError {
    CmdError::Input(format!("{} is only available for {kind} instances", cmd.name()))
}

fn run_generic<C: CliCat>(cmd: Command, cat: &C, ctx: &Ctx) -> Res<Report> {
    match cmd {
        Command::Subobjects => subobjects(cat, ctx),
        Command::Mobius => mobius(cat, ctx),
        Command::CheckDegree => with_degree(cat, ctx, &CheckDegree),
        Command::DeriveMeasure => with_degree(cat, ctx, &DeriveMeasure),
        Command::CheckMeasure => with_measure(cat, ctx, &CheckMeasure),
        Command::RegularSolve => regular_solve(cat, ctx),
        Command::AtomProduct => atom_product_cmd(cat, ctx),
        Command::KnopCompose => with_degree(cat, ctx, &KnopComposeJob),
        Command::PermCompose => with_measure(cat, ctx, &PermComposeJob),
        Command::PhiVerify => with_degree(cat, ctx, &PhiVerify),
        Command::NilpotentSearch => nilpotent(cat, ctx),
        Command::Oddness | Command::Dichotomy => Err(only("G-set", cmd)),
        Command::DeligneCompare => Err(only("op-finset", cmd)),
        Command::ReportAll => unreachable!("report-all is expanded by the caller"),
    }
}

fn run_single(cmd: Command, inst: &Instance, ctx: &Ctx) -> Res<Report> {
    match (inst, cmd) {
        (Instance::GSet(c), Command::Oddness) => oddness(c, ctx),
        (Instance::GSet(c), Command::Dichotomy) => dichotomy(c, ctx),
        (Instance::OpFinSet(_), Command::DeligneCompare) => deligne(ctx),
        (Instance::GSet(c), _) => run_generic(cmd, c, ctx),
        (Instance::OpFinSet(c), _) => run_generic(cmd, c, ctx),
    }
}

/// Turns a failed precondition into a failing report; other errors pass through.
fn settle(cmd: Command, inst: &Instance, ctx: &Ctx, res: Res<Report>) -> Res<Report> {
    match res {
        Err(CmdError::Precondition { message, witness }) => {
            let instance = match inst {
                Instance::GSet(c) => c.name(),
                Instance::OpFinSet(c) => c.name(),
            };
            let mut r = Report::new(cmd.name(), instance, ctx.bound);
            r.fail("precondition", format!("{message}: {witness}"));
            Ok(r)
        }
        other => other,
    }
}

fn report_all(inst: &Instance, ctx: &Ctx) -> Res<Report> {
    let mut cmds = vec![
        Command::CheckDegree,
        Command::DeriveMeasure,
        Command::CheckMeasure,
        Command::RegularSolve,
        Command::PhiVerify,
    ];
    let instance = match inst {
        Instance::GSet(c) => {
            cmds.push(Command::Dichotomy);
            c.name()
        }
        Instance::OpFinSet(c) => {
            cmds.push(Command::DeligneCompare);
            c.name()
        }
    };
    let mut all = Report::new("report-all", instance, ctx.bound);
    let mut reports = Vec::new();
    // The dichotomy runs over every object within the bound, not only the scenario's.
    let all_objects = Ctx {
        object: None,
        ..ctx.clone()
    };
    for cmd in cmds {
        let c = if cmd == Command::Dichotomy { &all_objects } else { ctx };
        let r = settle(cmd, inst, c, run_single(cmd, inst, c))?;
        for w in &r.witnesses {
            all.witnesses.push(json!({ "check": cmd.name(), "witness": w }));
        }
        reports.push(r.to_json());
    }
    // Oddness is a property of the instance, not a pass/fail criterion here.
    if let Instance::GSet(c) = inst {
        let odd = is_odd_category(c, ctx.bound)?;
        all.set("odd", odd.odd());
        all.set("oddness_witness", odd.witness.map_or(Value::Null, Value::String));
    }
    all.set("reports", reports);
    Ok(all)
}

pub fn run(cmd: Command, inst: &Instance, ctx: &Ctx) -> Res<Report> {
    if cmd == Command::ReportAll {
        return report_all(inst, ctx);
    }
    settle(cmd, inst, ctx, run_single(cmd, inst, ctx))
}
