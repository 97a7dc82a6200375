//! Degree functions on surjections, measures on the associated order, and the
//! checks relating them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::atoms::{a1_map, AtomMap};
use crate::error::{Error, Result};
use crate::group::{self, GSet};
use crate::poset::TopMoebius;
use crate::regcat::{ample_in_fiber_product, base_change, restrict, FinGSetCat, IsoKey, RegularCategory};
use crate::ring::{Poly, Rat, Ring, F2};

/// A function on surjections between principal objects.
pub trait DegreeFunction<C: RegularCategory, R: Ring> {
    fn name(&self) -> String;
    fn value(&self, cat: &C, f: &C::Mor) -> Result<R>;
}

/// `ν ≡ 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialDegree;

impl<C: RegularCategory, R: Ring> DegreeFunction<C, R> for TrivialDegree {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn value(&self, _cat: &C, _f: &C::Mor) -> Result<R> {
        Ok(R::one())
    }
}

/// `ν_t(f: Y -> X) = t^{|Y| - |X|}` in the polynomial ring.
#[derive(Clone, Copy, Debug, Default)]
pub struct TPowerDegree;

impl<C: RegularCategory> DegreeFunction<C, Poly> for TPowerDegree {
    fn name(&self) -> String {
        "t-power".into()
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<Poly> {
        let (y, x) = (cat.underlying_size(&cat.source(f)), cat.underlying_size(&cat.target(f)));
        if y < x {
            return Err(Error::Domain(format!("{} is not a surjection", cat.describe_mor(f))));
        }
        Ok(Poly::t_pow(y - x))
    }
}

/// `1` on isomorphisms and a fixed constant on every other surjection.
#[derive(Clone, Debug)]
pub struct ConstantNonIso<R>(pub R);

impl<C: RegularCategory, R: Ring> DegreeFunction<C, R> for ConstantNonIso<R> {
    fn name(&self) -> String {
        format!("constant {} off isomorphisms", self.0)
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<R> {
        Ok(if cat.is_iso(f) { R::one() } else { self.0.clone() })
    }
}

/// A degree function given by a closure.
pub struct FnDegree<F> {
    pub name: String,
    pub f: F,
}

impl<C, R, F> DegreeFunction<C, R> for FnDegree<F>
where
    C: RegularCategory,
    R: Ring,
    F: Fn(&C, &C::Mor) -> Result<R>,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<R> {
        (self.f)(cat, f)
    }
}

/// `ν(f: Y -> X) = Σ_{Z ⊆ Y, f(Z) = X} μ(f|_Z)`, the degree function a measure comes from.
pub struct RecoveredDegree<'m, M> {
    pub measure: &'m M,
}

impl<'m, C, R, M> DegreeFunction<C, R> for RecoveredDegree<'m, M>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    fn name(&self) -> String {
        format!("recovered from {}", self.measure.name())
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<R> {
        check_surjection(cat, f)?;
        let x_top = cat.top(&cat.target(f));
        let mut acc = R::zero();
        for z in cat.subobjects(&cat.source(f))? {
            if cat.sub_image(f, &z) == x_top {
                let (_, fz) = restrict(cat, f, &z);
                acc = acc + self.measure.value(cat, &fz)?;
            }
        }
        Ok(acc)
    }
}

/// A measure, given by its value `μ(𝔅(Y) -> 𝔅(X))` on maps of atoms, i.e. on
/// surjections `Y -> X` of principal objects.
pub trait Measure<C: RegularCategory, R: Ring> {
    fn name(&self) -> String;
    fn value(&self, cat: &C, f: &C::Mor) -> Result<R>;

    /// `μ(𝔅(X)) = μ(𝔅(X) -> 𝔅(1))`.
    fn object_value(&self, cat: &C, x: &C::Obj) -> Result<R> {
        self.value(cat, &cat.to_terminal(x))
    }
}

fn check_surjection<C: RegularCategory>(cat: &C, f: &C::Mor) -> Result<()> {
    if !cat.is_surjection(f) {
        return Err(Error::Domain(format!("{} is not a surjection", cat.describe_mor(f))));
    }
    if !cat.is_principal(&cat.source(f)) || !cat.is_principal(&cat.target(f)) {
        return Err(Error::Domain(format!("{} is not a map of principal objects", cat.describe_mor(f))));
    }
    Ok(())
}

/// `μ_ν(f: Y -> X) = Σ_{Z ⊆ Y, f(Z) = X} μ̃(Z, Y) ν(f|_Z)`, cached by isomorphism class.
pub struct DerivedMeasure<C: RegularCategory, R, D> {
    pub degree: D,
    cache: Mutex<HashMap<IsoKey, R>>,
    moebius: Mutex<HashMap<C::Obj, HashMap<C::Sub, BigInt>>>,
    _cat: PhantomData<fn(&C)>,
}

impl<C: RegularCategory, R: Ring, D: DegreeFunction<C, R>> DerivedMeasure<C, R, D> {
    pub fn new(degree: D) -> Self {
        DerivedMeasure {
            degree,
            cache: Mutex::new(HashMap::new()),
            moebius: Mutex::new(HashMap::new()),
            _cat: PhantomData,
        }
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

impl<C: RegularCategory, R: Ring, D: DegreeFunction<C, R>> Measure<C, R> for DerivedMeasure<C, R, D> {
    fn name(&self) -> String {
        format!("derived from {}", self.degree.name())
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<R> {
        check_surjection(cat, f)?;
        let key = cat.iso_key(f);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let y = cat.source(f);
        let x_top = cat.top(&cat.target(f));
        let memo = self.moebius.lock().unwrap().remove(&y).unwrap_or_default();
        let mut tm = TopMoebius::with_memo(cat, &y, memo);
        let mut acc = R::zero();
        let mut err = None;
        for z in cat.subobjects(&y)? {
            if cat.sub_image(f, &z) != x_top {
                continue;
            }
            let m = match tm.get(&z) {
                Ok(m) => m,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            };
            if m.is_zero() {
                continue;
            }
            let (_, fz) = restrict(cat, f, &z);
            match self.degree.value(cat, &fz) {
                Ok(v) => acc = acc + R::from_int(&m) * v,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        self.moebius.lock().unwrap().insert(y, tm.into_memo());
        if let Some(e) = err {
            return Err(e);
        }
        self.cache.lock().unwrap().insert(key, acc.clone());
        Ok(acc)
    }
}

/// `μ(𝔅(X)) = s^{ρ(X) - 1}` with `ρ` the number of atoms, so that
/// `μ(𝔅(Y) -> 𝔅(X)) = s^{ρ(Y) - ρ(X)}`.
#[derive(Clone, Debug)]
pub struct RegularMeasure<R> {
    pub label: String,
    pub s: R,
}

impl<R: Ring> RegularMeasure<R> {
    pub fn new(label: impl Into<String>, s: R) -> Self {
        RegularMeasure { label: label.into(), s }
    }
}

/// `α`: object values `(-1)^{ρ - 1}`.
pub fn alpha() -> RegularMeasure<Rat> {
    RegularMeasure::new("alpha", Rat::int(-1))
}

/// `β` without its precondition check: object values `(-2)^{ρ - 1}`.
pub fn beta_unchecked() -> RegularMeasure<Rat> {
    RegularMeasure::new("beta", Rat::int(-2))
}

impl<C: RegularCategory, R: Ring> Measure<C, R> for RegularMeasure<R> {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<R> {
        check_surjection(cat, f)?;
        let (ry, rx) = (cat.atom_count(&cat.source(f)), cat.atom_count(&cat.target(f)));
        if ry < rx {
            return Err(Error::Domain("a surjection cannot decrease the atom count".into()));
        }
        Ok(self.s.pow((ry - rx) as u32))
    }
}

/// A measure given by a closure.
pub struct FnMeasure<F> {
    pub name: String,
    pub f: F,
}

impl<C, R, F> Measure<C, R> for FnMeasure<F>
where
    C: RegularCategory,
    R: Ring,
    F: Fn(&C, &C::Mor) -> Result<R>,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn value(&self, cat: &C, f: &C::Mor) -> Result<R> {
        (self.f)(cat, f)
    }
}

/// A failed instance of an axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub axiom: String,
    pub detail: String,
}

/// One instance of base change written in absolute form: the object values
/// `μ(𝔅(W))` over the ample `W ⊆ Y ×_X X'`, grouped by atom count and value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BaseChangeIdentity {
    /// `(atom count of W, value, number of W)`, sorted by atom count.
    pub terms: Vec<(usize, String, usize)>,
    pub total: String,
}

impl BaseChangeIdentity {
    /// Number of `W` with each atom count.
    pub fn profile(&self) -> BTreeMap<usize, usize> {
        let mut p = BTreeMap::new();
        for (rho, _, n) in &self.terms {
            *p.entry(*rho).or_insert(0) += n;
        }
        p
    }
}

fn paren(v: &str) -> String {
    if v.starts_with('-') || v.contains(' ') {
        format!("({v})")
    } else {
        v.to_string()
    }
}

impl fmt::Display for BaseChangeIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(_, v, n)| format!("{n}·{}", paren(v)))
            .collect();
        write!(f, "{} = {}", parts.join(" + "), self.total)
    }
}

/// Result of an exhaustive check over a bounded family.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub check: String,
    pub instance: String,
    pub bound: usize,
    /// Number of individual equations evaluated.
    pub cases: usize,
    pub failures: Vec<Witness>,
    pub identities: Vec<BaseChangeIdentity>,
}

impl CheckReport {
    fn new(check: &str, instance: String, bound: usize) -> Self {
        CheckReport {
            check: check.into(),
            instance,
            bound,
            cases: 0,
            failures: Vec::new(),
            identities: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, axiom: &str, detail: String) {
        if self.failures.len() < 20 {
            self.failures.push(Witness {
                axiom: axiom.into(),
                detail,
            });
        } else if self.failures.len() == 20 {
            self.failures.push(Witness {
                axiom: axiom.into(),
                detail: "further failures omitted".into(),
            });
        }
    }
}

/// Surjections between principal objects with at most `bound` points, grouped by
/// `(source index, target index)` into [`RegularCategory::objects`].
pub struct SurjectionTable<C: RegularCategory> {
    pub objects: Vec<C::Obj>,
    pub surjections: BTreeMap<(usize, usize), Vec<C::Mor>>,
}

impl<C: RegularCategory> SurjectionTable<C> {
    pub fn new(cat: &C, bound: usize) -> Result<Self> {
        let objects: Vec<C::Obj> = cat.objects(bound)?.into_iter().filter(|x| cat.is_principal(x)).collect();
        let mut surjections = BTreeMap::new();
        for (i, y) in objects.iter().enumerate() {
            for (j, x) in objects.iter().enumerate() {
                if cat.underlying_size(y) < cat.underlying_size(x) {
                    continue;
                }
                let s: Vec<C::Mor> = cat.morphisms(y, x)?.into_iter().filter(|f| cat.is_surjection(f)).collect();
                if !s.is_empty() {
                    surjections.insert((i, j), s);
                }
            }
        }
        Ok(SurjectionTable { objects, surjections })
    }

    pub fn all(&self) -> impl Iterator<Item = &C::Mor> {
        self.surjections.values().flatten()
    }

    pub fn into_target(&self, target: usize) -> impl Iterator<Item = &C::Mor> {
        self.surjections
            .iter()
            .filter(move |((_, j), _)| *j == target)
            .flat_map(|(_, v)| v)
    }

    pub fn from_source(&self, source: usize) -> impl Iterator<Item = &C::Mor> {
        self.surjections
            .iter()
            .filter(move |((i, _), _)| *i == source)
            .flat_map(|(_, v)| v)
    }

    pub fn count(&self) -> usize {
        self.surjections.values().map(Vec::len).sum()
    }
}

/// Axioms of a degree function on surjections of principal objects with at most
/// `bound` points: (a) `ν = 1` on isomorphisms, (b) multiplicativity, (c)
/// invariance under base change along arbitrary maps.
pub fn check_degree_axioms<C, R, D>(cat: &C, nu: &D, bound: usize) -> Result<CheckReport>
where
    C: RegularCategory,
    R: Ring,
    D: DegreeFunction<C, R>,
{
    let table = SurjectionTable::new(cat, bound)?;
    let mut rep = CheckReport::new("degree-axioms", cat.name(), bound);
    for f in table.all() {
        if cat.is_iso(f) {
            rep.cases += 1;
            let v = nu.value(cat, f)?;
            if !v.is_one() {
                rep.fail("a", format!("ν({}) = {v}", cat.describe_mor(f)));
            }
        }
    }
    for (&(i, _), gs) in &table.surjections {
        for g in gs {
            let vg = nu.value(cat, g)?;
            for f in table.into_target(i) {
                rep.cases += 1;
                let gf = cat.compose(g, f);
                let lhs = nu.value(cat, &gf)?;
                let rhs = vg.clone() * nu.value(cat, f)?;
                if lhs != rhs {
                    rep.fail(
                        "b",
                        format!(
                            "ν(g∘f) = {lhs}, ν(g)ν(f) = {rhs} for f = {}, g = {}",
                            cat.describe_mor(f),
                            cat.describe_mor(g)
                        ),
                    );
                }
            }
        }
    }
    for (&(_, j), fs) in &table.surjections {
        let x = &table.objects[j];
        for xp in &table.objects {
            let gs = cat.morphisms(xp, x)?;
            for f in fs {
                let vf = nu.value(cat, f)?;
                for g in &gs {
                    rep.cases += 1;
                    let (_, fp, _) = base_change(cat, f, g);
                    let v = nu.value(cat, &fp)?;
                    if v != vf {
                        rep.fail(
                            "c",
                            format!(
                                "ν(f) = {vf}, ν(f') = {v} for f = {}, g = {}",
                                cat.describe_mor(f),
                                cat.describe_mor(g)
                            ),
                        );
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Axioms of a measure on maps of atoms `𝔅(Y) -> 𝔅(X)` with `X, Y` of at most
/// `bound` points: (a) `μ = 1` on isomorphisms, (b) multiplicativity, (c)
/// `μ(f) = Σ_W μ(W -> X')` over the atoms `𝔅(W)` of `𝔅(Y) ×_{𝔅(X)} 𝔅(X')`.
///
/// With `record`, each instance of (c) is also recorded in absolute form.
pub fn check_measure_axioms<C, R, M>(cat: &C, mu: &M, bound: usize, record: bool) -> Result<CheckReport>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    let table = SurjectionTable::new(cat, bound)?;
    let mut rep = CheckReport::new("measure-axioms", cat.name(), bound);
    let mut seen = std::collections::BTreeSet::new();
    for f in table.all() {
        if cat.is_iso(f) {
            rep.cases += 1;
            let v = mu.value(cat, f)?;
            if !v.is_one() {
                rep.fail("a", format!("μ({}) = {v}", cat.describe_mor(f)));
            }
        }
    }
    for (&(i, _), gs) in &table.surjections {
        for g in gs {
            let vg = mu.value(cat, g)?;
            for f in table.into_target(i) {
                rep.cases += 1;
                let lhs = mu.value(cat, &cat.compose(g, f))?;
                let rhs = vg.clone() * mu.value(cat, f)?;
                if lhs != rhs {
                    rep.fail(
                        "b",
                        format!(
                            "μ(g∘f) = {lhs}, μ(g)μ(f) = {rhs} for f = {}, g = {}",
                            cat.describe_mor(f),
                            cat.describe_mor(g)
                        ),
                    );
                }
            }
        }
    }
    for j in 0..table.objects.len() {
        let into: Vec<&C::Mor> = table.into_target(j).collect();
        for f in &into {
            let vf = mu.value(cat, f)?;
            for g in &into {
                rep.cases += 1;
                let (y, xp) = (cat.source(f), cat.source(g));
                let prod = cat.product(&y, &xp);
                let p2 = cat.proj2(&y, &xp);
                let mut sum = R::zero();
                let mut terms: BTreeMap<(usize, String), usize> = BTreeMap::new();
                let mut abs = R::zero();
                for w in ample_in_fiber_product(cat, f, g)? {
                    let (w_obj, inc) = cat.sub_object(&prod, &w);
                    let fw = cat.compose(&p2, &inc);
                    sum = sum + mu.value(cat, &fw)?;
                    if record {
                        let ow = mu.object_value(cat, &w_obj)?;
                        abs = abs + ow.clone();
                        *terms.entry((cat.atom_count(&w_obj), ow.to_string())).or_insert(0) += 1;
                    }
                }
                if sum != vf {
                    rep.fail(
                        "c",
                        format!(
                            "μ(f) = {vf}, Σ_W μ(W -> X') = {sum} for f = {}, g = {}",
                            cat.describe_mor(f),
                            cat.describe_mor(g)
                        ),
                    );
                }
                if record {
                    let id = BaseChangeIdentity {
                        terms: terms.into_iter().map(|((r, v), n)| (r, v, n)).collect(),
                        total: abs.to_string(),
                    };
                    if seen.insert(id.clone()) {
                        rep.identities.push(id);
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Checks `ν(f) = Σ_{Z ⊆ Y, f(Z) = X} μ(f|_Z)` for all surjections within `bound`.
pub fn check_recovered_degree<C, R, M, D>(cat: &C, mu: &M, nu: &D, bound: usize) -> Result<CheckReport>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
    D: DegreeFunction<C, R>,
{
    let table = SurjectionTable::new(cat, bound)?;
    let rec = RecoveredDegree { measure: mu };
    let mut rep = CheckReport::new("recover-degree", cat.name(), bound);
    for f in table.all() {
        rep.cases += 1;
        let (a, b) = (rec.value(cat, f)?, nu.value(cat, f)?);
        if a != b {
            rep.fail("recover", format!("recovered {a}, expected {b} for {}", cat.describe_mor(f)));
        }
    }
    Ok(rep)
}

/// For each target atom `j` of `f: 𝔜 -> 𝔛`, `μ(f|: 𝔜_j -> 𝔛_j)` where `𝔜_j` is the
/// union of source atoms over `j`; `None` if no source atom lies over `j`.
pub fn mu_of_general_map<C, R, M>(cat: &C, mu: &M, f: &AtomMap<C>) -> Result<Vec<Option<R>>>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    let mut out: Vec<Option<R>> = vec![None; f.target.len()];
    for (j, e) in &f.components {
        let v = mu.value(cat, e)?;
        out[*j] = Some(match out[*j].take() {
            None => v,
            Some(a) => a + v,
        });
    }
    Ok(out)
}

/// Whether `μ(f|)` takes the same value over every target atom.
pub fn is_mu_constant<C, R, M>(cat: &C, mu: &M, f: &AtomMap<C>) -> Result<(bool, Vec<Option<R>>)>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    let vals = mu_of_general_map(cat, mu, f)?;
    let first = vals.iter().flatten().next().cloned();
    let constant = vals.iter().all(|v| v.is_some() && *v == first);
    Ok((constant, vals))
}

/// Result of testing whether a measure comes from a degree function.
#[derive(Clone, Debug)]
pub struct DegreeOrigin {
    pub bound: usize,
    pub maps_checked: usize,
    /// The first `𝔄₁(f)` on which `μ` is not constant, with its per-atom values.
    pub witness: Option<(String, Vec<String>)>,
    /// When constant throughout: whether the measure derived from the recovered
    /// degree function reproduces `μ` on every surjection within the bound.
    pub rederived: Option<bool>,
}

impl DegreeOrigin {
    pub fn comes_from_degree(&self) -> bool {
        self.witness.is_none() && self.rederived == Some(true)
    }
}

pub fn degree_origin_test<C, R, M>(cat: &C, mu: &M, bound: usize) -> Result<DegreeOrigin>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    let table = SurjectionTable::new(cat, bound)?;
    let mut out = DegreeOrigin {
        bound,
        maps_checked: 0,
        witness: None,
        rederived: None,
    };
    for f in table.all() {
        out.maps_checked += 1;
        let (_, _, map) = a1_map(cat, f)?;
        let (constant, vals) = is_mu_constant(cat, mu, &map)?;
        if !constant {
            let shown = vals
                .iter()
                .map(|v| v.as_ref().map_or("none".to_string(), |v| v.to_string()))
                .collect();
            out.witness = Some((cat.describe_mor(f), shown));
            return Ok(out);
        }
    }
    let derived = DerivedMeasure::new(RecoveredDegree { measure: mu });
    let mut ok = true;
    for f in table.all() {
        if derived.value(cat, f)? != mu.value(cat, f)? {
            ok = false;
            break;
        }
    }
    out.rederived = Some(ok);
    Ok(out)
}

/// Result of the oddness test on transitive G-sets.
#[derive(Clone, Debug)]
pub struct OddnessReport {
    pub bound: usize,
    pub cospans: usize,
    /// A cospan `Y -> X <- X'` whose fiber product has an even number of orbits.
    pub witness: Option<String>,
}

impl OddnessReport {
    pub fn odd(&self) -> bool {
        self.witness.is_none()
    }
}

fn describe_gset(x: &GSet) -> String {
    format!("{}-point orbit", x.points())
}

/// Whether every fiber product of transitive G-sets (at most `bound` points each)
/// over a transitive G-set has an odd number of orbits.
pub fn is_odd_category(cat: &FinGSetCat, bound: usize) -> Result<OddnessReport> {
    let mut rep = OddnessReport {
        bound,
        cospans: 0,
        witness: None,
    };
    let atoms: Vec<GSet> = group::transitive_gsets(cat.group())?
        .into_iter()
        .filter(|t| t.points() <= bound)
        .collect();
    for x in &atoms {
        let mut into = Vec::new();
        for y in &atoms {
            for f in cat.morphisms(y, x)? {
                into.push(f);
            }
        }
        for f in &into {
            for g in &into {
                rep.cospans += 1;
                let fp = cat.fiber_product(f, g);
                let prod = cat.product(&f.source, &g.source);
                let orbits = cat.sub_object(&prod, &fp).0.orbit_count();
                if orbits % 2 == 0 {
                    rep.witness = Some(format!(
                        "{} -> {} <- {}: {} orbits via {:?} and {:?}",
                        describe_gset(&f.source),
                        describe_gset(x),
                        describe_gset(&g.source),
                        orbits,
                        f.map,
                        g.map
                    ));
                    return Ok(rep);
                }
            }
        }
    }
    Ok(rep)
}

/// The all-ones assignment on transitive G-sets, validated as a regular measure
/// over GF(2): for every cospan of atoms the sum of `1` over the orbits of the
/// fiber product must be `1`. Returns `None` with the failing cospan otherwise.
pub fn f2_regular_measure(cat: &FinGSetCat, bound: usize) -> Result<(Option<RegularMeasure<F2>>, OddnessReport)> {
    let mut rep = OddnessReport {
        bound,
        cospans: 0,
        witness: None,
    };
    let atoms: Vec<GSet> = group::transitive_gsets(cat.group())?
        .into_iter()
        .filter(|t| t.points() <= bound)
        .collect();
    for x in &atoms {
        let mut into = Vec::new();
        for y in &atoms {
            into.extend(cat.morphisms(y, x)?);
        }
        for f in &into {
            for g in &into {
                rep.cospans += 1;
                let prod = cat.product(&f.source, &g.source);
                let fp = cat.sub_object(&prod, &cat.fiber_product(f, g)).0;
                let mut sum = F2::zero();
                for _ in fp.orbits() {
                    sum = sum + F2::one();
                }
                if sum != F2::one() {
                    rep.witness = Some(format!(
                        "{} -> {} <- {}: Σ 1 over {} orbits is {sum}",
                        describe_gset(&f.source),
                        describe_gset(x),
                        describe_gset(&g.source),
                        fp.orbit_count()
                    ));
                    return Ok((None, rep));
                }
            }
        }
    }
    Ok((Some(RegularMeasure::new("gf2 all-ones", F2::one())), rep))
}

/// `β`, available only when the category is odd up to `bound`.
pub fn beta_measure(cat: &FinGSetCat, bound: usize) -> Result<RegularMeasure<Rat>> {
    let odd = is_odd_category(cat, bound)?;
    match odd.witness {
        None => Ok(beta_unchecked()),
        Some(w) => Err(Error::Precondition {
            message: "the category is not odd".into(),
            witness: w,
        }),
    }
}

/// Constraints on `s` for `μ(𝔅(X)) = s^{ρ(X) - 1}` to be a measure, and their common roots.
#[derive(Clone, Debug)]
pub struct RegularSolve {
    pub bound: usize,
    /// Distinct non-zero constraint polynomials `Σ_W s^{ρ(W)-1} s^{ρ(X)-1} - s^{ρ(X')-1} s^{ρ(Y)-1}`.
    pub constraints: Vec<Poly>,
    pub gcd: Poly,
    /// Common non-zero rational roots.
    pub roots: Vec<BigRational>,
}

pub fn regular_constraint_solve<C: RegularCategory>(cat: &C, bound: usize) -> Result<RegularSolve> {
    let table = SurjectionTable::new(cat, bound)?;
    let rho = |x: &C::Obj| cat.atom_count(x) - 1;
    let mut constraints: Vec<Poly> = Vec::new();
    for j in 0..table.objects.len() {
        let x = &table.objects[j];
        let into: Vec<&C::Mor> = table.into_target(j).collect();
        for f in &into {
            for g in &into {
                let (y, xp) = (cat.source(f), cat.source(g));
                let prod = cat.product(&y, &xp);
                let mut p = Poly::zero();
                for w in ample_in_fiber_product(cat, f, g)? {
                    let (w_obj, _) = cat.sub_object(&prod, &w);
                    p = p + Poly::t_pow(rho(&w_obj) + rho(x));
                }
                p = p - Poly::t_pow(rho(&xp) + rho(&y));
                if !p.is_zero() && !constraints.contains(&p) {
                    constraints.push(p);
                }
            }
        }
    }
    let gcd = constraints.iter().fold(Poly::zero(), |acc, p| acc.gcd(p));
    let mut roots: Vec<BigRational> = if constraints.is_empty() {
        Vec::new()
    } else {
        gcd.rational_roots().into_iter().filter(|r| !r.is_zero()).collect()
    };
    roots.sort();
    roots.retain(|r| constraints.iter().all(|p| p.eval(r).is_zero()));
    Ok(RegularSolve {
        bound,
        constraints,
        gcd,
        roots,
    })
}

/// Whether the value `s` satisfies every constraint.
pub fn satisfies_all(solve: &RegularSolve, s: i64) -> bool {
    let v = BigRational::from_integer(BigInt::from(s));
    solve.constraints.iter().all(|p| p.eval(&v).is_zero())
}
