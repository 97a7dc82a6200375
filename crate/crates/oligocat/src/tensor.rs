//! The two tensor categories: the relation-basis category `T⁰(𝓔; ν)` and the
//! orbit-matrix category `Perm(C; μ)`, with the functor `Φ` between them.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::{build_a1, AtomMap, A1};
use crate::error::{Error, Result};
use crate::measure::{DegreeFunction, DerivedMeasure, Measure, Witness};
use crate::regcat::{compose_rel, is_ample, RegularCategory, Relation};
use crate::ring::Ring;

/// A linear combination of principal relations `A ⊆ Y × X`, a morphism `[X] -> [Y]`.
pub struct KnopMor<C: RegularCategory, R> {
    pub source: C::Obj,
    pub target: C::Obj,
    pub terms: BTreeMap<C::Sub, R>,
}

impl<C: RegularCategory, R: Ring> KnopMor<C, R> {
    pub fn zero(source: &C::Obj, target: &C::Obj) -> Self {
        KnopMor {
            source: source.clone(),
            target: target.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// `[A]` for a principal subobject `A ⊆ target × source`.
    pub fn basis(cat: &C, source: &C::Obj, target: &C::Obj, a: C::Sub) -> Result<Self> {
        let prod = cat.product(target, source);
        if !cat.is_principal(&cat.sub_object(&prod, &a).0) {
            return Err(Error::Invalid(format!(
                "{} is not a principal relation",
                cat.describe_sub(&prod, &a)
            )));
        }
        let mut m = KnopMor::zero(source, target);
        m.terms.insert(a, R::one());
        Ok(m)
    }

    /// `[Δ_X]`.
    pub fn identity(cat: &C, x: &C::Obj) -> Self {
        let mut m = KnopMor::zero(x, x);
        m.terms.insert(Relation::diagonal(cat, x).sub, R::one());
        m
    }

    pub fn add_term(&mut self, a: C::Sub, c: R) {
        let v = match self.terms.remove(&a) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(a, v);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Mismatch("morphisms have different endpoints".into()));
        }
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = KnopMor::zero(&self.source, &self.target);
        for (a, v) in &self.terms {
            out.add_term(a.clone(), c.clone() * v.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

macro_rules! structural_impls {
    ($name:ident { $($field:ident),* }) => {
        impl<C: RegularCategory, R: Clone> Clone for $name<C, R> {
            fn clone(&self) -> Self {
                $name { $($field: self.$field.clone()),* }
            }
        }

        impl<C: RegularCategory, R: PartialEq> PartialEq for $name<C, R> {
            fn eq(&self, other: &Self) -> bool {
                true $(&& self.$field == other.$field)*
            }
        }

        impl<C: RegularCategory, R: Eq> Eq for $name<C, R> {}

        impl<C: RegularCategory, R: std::fmt::Debug> std::fmt::Debug for $name<C, R> {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.debug_struct(stringify!($name))$(.field(stringify!($field), &self.$field))*.finish()
            }
        }
    };
}

structural_impls!(KnopMor { source, target, terms });
structural_impls!(PermMatrix { source, target, entries });

impl<C: RegularCategory> Clone for TensorAtom<C> {
    fn clone(&self) -> Self {
        TensorAtom {
            left: self.left,
            right: self.right,
            sub: self.sub.clone(),
            object: self.object.clone(),
        }
    }
}

/// `[B] ∘ [A] = ν(f) [B ∘ A]` with `f: B ×_Y A -> B ∘ A`, zero when `B ∘ A` is not principal.
pub fn knop_compose<C, R, D>(cat: &C, b: &KnopMor<C, R>, a: &KnopMor<C, R>, nu: &D) -> Result<KnopMor<C, R>>
where
    C: RegularCategory,
    R: Ring,
    D: DegreeFunction<C, R>,
{
    if b.source != a.target {
        return Err(Error::Mismatch("middle objects differ".into()));
    }
    let mut out = KnopMor::zero(&a.source, &b.target);
    for (bs, bc) in &b.terms {
        let br = Relation::new(b.source.clone(), b.target.clone(), bs.clone());
        for (as_, ac) in &a.terms {
            let ar = Relation::new(a.source.clone(), a.target.clone(), as_.clone());
            let comp = compose_rel(cat, &br, &ar)?;
            let c_obj = cat.target(&comp.surjection);
            if !cat.is_principal(&c_obj) {
                continue;
            }
            let w = nu.value(cat, &comp.surjection)?;
            out.add_term(comp.relation.sub, bc.clone() * ac.clone() * w);
        }
    }
    Ok(out)
}

/// The isomorphism `(Y × Y') × (X × X') -> (Y × X) × (Y' × X')`.
fn reassociate<C: RegularCategory>(cat: &C, y: &C::Obj, yp: &C::Obj, x: &C::Obj, xp: &C::Obj) -> C::Mor {
    let yy = cat.product(y, yp);
    let xx = cat.product(x, xp);
    let q1 = cat.proj1(&yy, &xx);
    let q2 = cat.proj2(&yy, &xx);
    let fy = cat.compose(&cat.proj1(y, yp), &q1);
    let fyp = cat.compose(&cat.proj2(y, yp), &q1);
    let fx = cat.compose(&cat.proj1(x, xp), &q2);
    let fxp = cat.compose(&cat.proj2(x, xp), &q2);
    cat.pair(&cat.pair(&fy, &fx), &cat.pair(&fyp, &fxp))
}

/// `[A] ⊗ [B] = [A × B]`, extended bilinearly.
pub fn knop_tensor<C: RegularCategory, R: Ring>(cat: &C, a: &KnopMor<C, R>, b: &KnopMor<C, R>) -> KnopMor<C, R> {
    let (x, y, xp, yp) = (&a.source, &a.target, &b.source, &b.target);
    let r = reassociate(cat, y, yp, x, xp);
    let yx = cat.product(y, x);
    let ypxp = cat.product(yp, xp);
    let big = cat.product(&yx, &ypxp);
    let mut out = KnopMor::zero(&cat.product(x, xp), &cat.product(y, yp));
    for (sa, ca) in &a.terms {
        let pa = cat.preimage(&cat.proj1(&yx, &ypxp), sa);
        for (sb, cb) in &b.terms {
            let pb = cat.preimage(&cat.proj2(&yx, &ypxp), sb);
            let ab = cat.sub_meet(&big, &pa, &pb);
            out.add_term(cat.preimage(&r, &ab), ca.clone() * cb.clone());
        }
    }
    out
}

/// A map of orbit functions: entries indexed by `(target atom, source atom, W)` with `W`
/// an ample subobject of the product of the two atoms.
pub struct PermMatrix<C: RegularCategory, R> {
    pub source: Vec<C::Obj>,
    pub target: Vec<C::Obj>,
    pub entries: BTreeMap<(usize, usize, C::Sub), R>,
}

impl<C: RegularCategory, R: Ring> PermMatrix<C, R> {
    pub fn zero(source: &[C::Obj], target: &[C::Obj]) -> Self {
        PermMatrix {
            source: source.to_vec(),
            target: target.to_vec(),
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(cat: &C, atoms: &[C::Obj]) -> Self {
        let mut m = PermMatrix::zero(atoms, atoms);
        for (j, o) in atoms.iter().enumerate() {
            m.entries.insert((j, j, Relation::diagonal(cat, o).sub), R::one());
        }
        m
    }

    pub fn add_entry(&mut self, key: (usize, usize, C::Sub), c: R) {
        let v = match self.entries.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.entries.insert(key, v);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Mismatch("matrices have different shapes".into()));
        }
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.add_entry(k.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        let mut out = PermMatrix::zero(&self.source, &self.target);
        for (k, v) in &self.entries {
            out.add_entry(k.clone(), c.clone() * v.clone());
        }
        out
    }

    pub fn get(&self, j: usize, k: usize, w: &C::Sub) -> R {
        self.entries.get(&(j, k, w.clone())).cloned().unwrap_or_else(R::zero)
    }
}

/// All index triples `(j, k, W)` of matrices between two atom lists.
pub fn matrix_basis<C: RegularCategory>(cat: &C, source: &[C::Obj], target: &[C::Obj]) -> Result<Vec<(usize, usize, C::Sub)>> {
    let mut out = Vec::new();
    for (j, y) in target.iter().enumerate() {
        for (k, x) in source.iter().enumerate() {
            for w in crate::regcat::ample_subobjects(cat, y, x)? {
                out.push((j, k, w));
            }
        }
    }
    Ok(out)
}

type UnitKey<C> = (
    <C as RegularCategory>::Obj,
    <C as RegularCategory>::Obj,
    <C as RegularCategory>::Obj,
    <C as RegularCategory>::Sub,
    <C as RegularCategory>::Sub,
);

/// Composition in `Perm(C; μ)`, memoizing products of single orbit indicators.
pub struct PermComposer<'m, C: RegularCategory, R, M> {
    pub mu: &'m M,
    cache: Mutex<HashMap<UnitKey<C>, Vec<(C::Sub, R)>>>,
}

impl<'m, C: RegularCategory, R: Ring, M: Measure<C, R>> PermComposer<'m, C, R, M> {
    pub fn new(mu: &'m M) -> Self {
        PermComposer {
            mu,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `1_B ∘ 1_A` for `B ⊆ Z × Y`, `A ⊆ Y × X` ample: the sum over ample
    /// `W ⊆ B ×_Y A` of `μ(𝔅(W) -> 𝔅(p₁₃ W)) 1_{p₁₃ W}`.
    pub fn unit_product(
        &self,
        cat: &C,
        z: &C::Obj,
        y: &C::Obj,
        x: &C::Obj,
        b: &C::Sub,
        a: &C::Sub,
    ) -> Result<Vec<(C::Sub, R)>> {
        let key = (z.clone(), y.clone(), x.clone(), b.clone(), a.clone());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let (b_obj, b_inc) = cat.sub_object(&cat.product(z, y), b);
        let (a_obj, a_inc) = cat.sub_object(&cat.product(y, x), a);
        let b_y = cat.compose(&cat.proj2(z, y), &b_inc);
        let a_y = cat.compose(&cat.proj1(y, x), &a_inc);
        let fp = cat.fiber_product(&b_y, &a_y);
        let (fp_obj, fp_inc) = cat.sub_object(&cat.product(&b_obj, &a_obj), &fp);
        let to_b = cat.compose(&cat.proj1(&b_obj, &a_obj), &fp_inc);
        let to_a = cat.compose(&cat.proj2(&b_obj, &a_obj), &fp_inc);
        let to_z = cat.compose(&cat.proj1(z, y), &cat.compose(&b_inc, &to_b));
        let to_x = cat.compose(&cat.proj2(y, x), &cat.compose(&a_inc, &to_a));
        let p13 = cat.pair(&to_z, &to_x);
        let proj = [to_b, to_a];
        let mut acc: BTreeMap<C::Sub, R> = BTreeMap::new();
        for s in cat.subobjects(&fp_obj)? {
            if !is_ample(cat, &proj, &s) {
                continue;
            }
            let (_, s_inc) = cat.sub_object(&fp_obj, &s);
            let (c, _, e) = cat.factor_through_image(&cat.compose(&p13, &s_inc));
            let v = self.mu.value(cat, &e)?;
            let slot = acc.entry(c).or_insert_with(R::zero);
            *slot = slot.clone() + v;
        }
        let out: Vec<(C::Sub, R)> = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        self.cache.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    pub fn compose(&self, cat: &C, b: &PermMatrix<C, R>, a: &PermMatrix<C, R>) -> Result<PermMatrix<C, R>> {
        if b.source != a.target {
            return Err(Error::Mismatch("middle objects differ".into()));
        }
        let mut by_j: BTreeMap<usize, Vec<(usize, &C::Sub, &R)>> = BTreeMap::new();
        for ((j, k, s), v) in &a.entries {
            by_j.entry(*j).or_default().push((*k, s, v));
        }
        let mut out = PermMatrix::zero(&a.source, &b.target);
        for ((i, j, bs), bv) in &b.entries {
            let Some(list) = by_j.get(j) else { continue };
            for (k, as_, av) in list {
                let coeff = bv.clone() * (*av).clone();
                for (c, w) in self.unit_product(cat, &b.target[*i], &b.source[*j], &a.source[*k], bs, as_)? {
                    out.add_entry((*i, *k, c), coeff.clone() * w);
                }
            }
        }
        Ok(out)
    }
}

pub fn perm_compose<C, R, M>(cat: &C, b: &PermMatrix<C, R>, a: &PermMatrix<C, R>, mu: &M) -> Result<PermMatrix<C, R>>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    PermComposer::new(mu).compose(cat, b, a)
}

/// An atom of `Vec_X ⊗ Vec_X'`: atoms `k`, `l` and an ample `U ⊆ X_k × X'_l`.
#[derive(Debug)]
pub struct TensorAtom<C: RegularCategory> {
    pub left: usize,
    pub right: usize,
    pub sub: C::Sub,
    pub object: C::Obj,
}

pub fn tensor_atoms<C: RegularCategory>(cat: &C, xs: &[C::Obj], xps: &[C::Obj]) -> Result<Vec<TensorAtom<C>>> {
    let mut out = Vec::new();
    for (k, x) in xs.iter().enumerate() {
        for (l, xp) in xps.iter().enumerate() {
            let prod = cat.product(x, xp);
            for u in crate::regcat::ample_subobjects(cat, x, xp)? {
                let object = cat.sub_object(&prod, &u).0;
                out.push(TensorAtom {
                    left: k,
                    right: l,
                    sub: u,
                    object,
                });
            }
        }
    }
    Ok(out)
}

/// The Kronecker product: the entry at an orbit `W` of `(Y_j × Y'_j') × (X_k × X'_k')`
/// is the product of the entries at its images in `Y_j × X_k` and `Y'_j' × X'_k'`.
pub fn perm_tensor<C: RegularCategory, R: Ring>(
    cat: &C,
    a: &PermMatrix<C, R>,
    b: &PermMatrix<C, R>,
) -> Result<(PermMatrix<C, R>, Vec<TensorAtom<C>>, Vec<TensorAtom<C>>)> {
    let src = tensor_atoms(cat, &a.source, &b.source)?;
    let tgt = tensor_atoms(cat, &a.target, &b.target)?;
    let src_objs: Vec<C::Obj> = src.iter().map(|t| t.object.clone()).collect();
    let tgt_objs: Vec<C::Obj> = tgt.iter().map(|t| t.object.clone()).collect();
    let mut out = PermMatrix::zero(&src_objs, &tgt_objs);
    let a_blocks: std::collections::BTreeSet<(usize, usize)> = a.entries.keys().map(|(j, k, _)| (*j, *k)).collect();
    let b_blocks: std::collections::BTreeSet<(usize, usize)> = b.entries.keys().map(|(j, k, _)| (*j, *k)).collect();
    for (ti, t) in tgt.iter().enumerate() {
        for (si, s) in src.iter().enumerate() {
            if !a_blocks.contains(&(t.left, s.left)) || !b_blocks.contains(&(t.right, s.right)) {
                continue;
            }
            let (y, yp) = (&a.target[t.left], &b.target[t.right]);
            let (x, xp) = (&a.source[s.left], &b.source[s.right]);
            let (_, v_inc) = cat.sub_object(&cat.product(y, yp), &t.sub);
            let (_, u_inc) = cat.sub_object(&cat.product(x, xp), &s.sub);
            let (vo, uo) = (&t.object, &s.object);
            let q1 = cat.compose(&v_inc, &cat.proj1(vo, uo));
            let q2 = cat.compose(&u_inc, &cat.proj2(vo, uo));
            let to_a = cat.pair(
                &cat.compose(&cat.proj1(y, yp), &q1),
                &cat.compose(&cat.proj1(x, xp), &q2),
            );
            let to_b = cat.pair(
                &cat.compose(&cat.proj2(y, yp), &q1),
                &cat.compose(&cat.proj2(x, xp), &q2),
            );
            for w in crate::regcat::ample_subobjects(cat, vo, uo)? {
                let va = a.get(t.left, s.left, &cat.sub_image(&to_a, &w));
                if va.is_zero() {
                    continue;
                }
                let vb = b.get(t.right, s.right, &cat.sub_image(&to_b, &w));
                if !vb.is_zero() {
                    out.add_entry((ti, si, w), va * vb);
                }
            }
        }
    }
    Ok((out, src, tgt))
}

/// `f_*` on orbit functions: `1_A ↦ μ(A -> f(A)) 1_{f(A)}` extended linearly.
pub fn pushforward<C, R, M>(cat: &C, f: &AtomMap<C>, v: &[R], mu: &M) -> Result<Vec<R>>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    if v.len() != f.source.len() {
        return Err(Error::Mismatch(format!(
            "orbit function has {} values, the source has {} atoms",
            v.len(),
            f.source.len()
        )));
    }
    let mut out = vec![R::zero(); f.target.len()];
    for ((j, e), c) in f.components.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        out[*j] = out[*j].clone() + mu.value(cat, e)? * c.clone();
    }
    Ok(out)
}

/// `1_A` on `𝔄₁(X)`: one on the atoms `𝔅(Z)` with `Z ⊆ A`.
pub fn a1_indicator<C: RegularCategory, R: Ring>(cat: &C, a1: &A1<C>, a: &C::Sub) -> Vec<R> {
    a1.subs
        .iter()
        .map(|z| if cat.sub_leq(&a1.ambient, z, a) { R::one() } else { R::zero() })
        .collect()
}

/// `tr(m) = Σ_j μ(𝔅(X_j)) m(j, j, Δ)`.
pub fn trace<C, R, M>(cat: &C, m: &PermMatrix<C, R>, mu: &M) -> Result<R>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    if m.source != m.target {
        return Err(Error::Mismatch("trace of a non-endomorphism".into()));
    }
    let mut acc = R::zero();
    for (j, o) in m.source.iter().enumerate() {
        let d = m.get(j, j, &Relation::diagonal(cat, o).sub);
        if !d.is_zero() {
            acc = acc + mu.object_value(cat, o)? * d;
        }
    }
    Ok(acc)
}

pub fn categorical_dim<C, R, M>(cat: &C, atoms: &[C::Obj], mu: &M) -> Result<R>
where
    C: RegularCategory,
    R: Ring,
    M: Measure<C, R>,
{
    trace(cat, &PermMatrix::identity(cat, atoms), mu)
}

/// The index of `Φ` between `𝔄₁(X)` and `𝔄₁(Y)`: each triple `(j, k, W)` with its image
/// `C ⊆ Y × X`, a principal subobject; the image map is a bijection.
pub struct PhiIndex<C: RegularCategory> {
    pub source: A1<C>,
    pub target: A1<C>,
    pub triples: Vec<((usize, usize, C::Sub), C::Sub)>,
}

impl<C: RegularCategory> PhiIndex<C> {
    pub fn new(cat: &C, x: &C::Obj, y: &C::Obj) -> Result<Self> {
        let source = build_a1(cat, x)?;
        let target = build_a1(cat, y)?;
        let yx = cat.product(y, x);
        let mut triples = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (j, (ys, yo)) in target.subs.iter().zip(&target.objects).enumerate() {
            let (_, iy) = cat.sub_object(y, ys);
            for (k, (xs, xo)) in source.subs.iter().zip(&source.objects).enumerate() {
                let (_, ix) = cat.sub_object(x, xs);
                let into = cat.pair(
                    &cat.compose(&iy, &cat.proj1(yo, xo)),
                    &cat.compose(&ix, &cat.proj2(yo, xo)),
                );
                for w in crate::regcat::ample_subobjects(cat, yo, xo)? {
                    let c = cat.sub_image(&into, &w);
                    if !seen.insert(c.clone()) {
                        return Err(Error::Mismatch(format!(
                            "two orbit indices have image {}",
                            cat.describe_sub(&yx, &c)
                        )));
                    }
                    triples.push(((j, k, w), c));
                }
            }
        }
        Ok(PhiIndex {
            source,
            target,
            triples,
        })
    }

    pub fn source_atoms(&self) -> &[C::Obj] {
        &self.source.objects
    }

    pub fn target_atoms(&self) -> &[C::Obj] {
        &self.target.objects
    }

    /// `Φ([A])`: the indicator of the orbits whose image lies in `A`, extended linearly.
    pub fn phi<R: Ring>(&self, cat: &C, a: &KnopMor<C, R>) -> PermMatrix<C, R> {
        let yx = cat.product(&self.target.ambient, &self.source.ambient);
        let mut m = PermMatrix::zero(self.source_atoms(), self.target_atoms());
        for (s, c) in &a.terms {
            for (key, img) in &self.triples {
                if cat.sub_leq(&yx, img, s) {
                    m.add_entry(key.clone(), c.clone());
                }
            }
        }
        m
    }
}

/// `Φ([X]) = Vec_{𝔄₁(X)}` as its atom list.
pub fn phi_object<C: RegularCategory>(cat: &C, x: &C::Obj) -> Result<Vec<C::Obj>> {
    Ok(build_a1(cat, x)?.objects)
}

pub fn phi_morphism<C: RegularCategory, R: Ring>(cat: &C, a: &KnopMor<C, R>) -> Result<PermMatrix<C, R>> {
    Ok(PhiIndex::new(cat, &a.source, &a.target)?.phi(cat, a))
}

/// Outcome of checking that `Φ` is a functor and bijective on Hom within a bound.
#[derive(Clone, Debug, Default)]
pub struct PhiReport {
    pub bound: usize,
    pub objects: usize,
    pub hom_spaces: usize,
    /// Composable pairs of basis relations checked.
    pub pairs: usize,
    /// Object triples `(X, Y, Z)` checked, and those skipped by the size cap.
    pub triples_checked: usize,
    pub triples_skipped: Vec<String>,
    /// Time spent on each checked triple.
    pub timings: Vec<(String, std::time::Duration)>,
    /// Random basis pairs checked inside skipped triples, and the number of
    /// skipped triples that received at least one.
    pub sampled_pairs: usize,
    pub sampled_triples: usize,
    pub failures: Vec<Witness>,
}

/// How much of the bounded family [`verify_phi`] checks exhaustively.
#[derive(Clone, Debug)]
pub struct PhiOptions {
    /// Triples whose product `Z × Y × X` has more atoms are not checked exhaustively.
    pub triple_cap: Option<usize>,
    /// Random basis pairs to try in each such triple.
    pub samples: usize,
    /// Sampled pairs with `B ×_Y A` of more atoms are redrawn.
    pub sample_fiber_cap: usize,
    pub seed: u64,
}

impl Default for PhiOptions {
    fn default() -> Self {
        PhiOptions {
            triple_cap: None,
            samples: 0,
            sample_fiber_cap: 12,
            seed: 0,
        }
    }
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.triples_skipped.is_empty()
    }
}

/// Basis relations of one Hom space with their images under `Φ`.
struct HomData<C: RegularCategory, R> {
    basis: Vec<C::Sub>,
    images: Vec<PermMatrix<C, R>>,
}

fn principal_relations<C: RegularCategory>(cat: &C, x: &C::Obj, y: &C::Obj) -> Result<Vec<C::Sub>> {
    let yx = cat.product(y, x);
    Ok(cat
        .subobjects(&yx)?
        .into_iter()
        .filter(|s| cat.is_principal(&cat.sub_object(&yx, s).0))
        .collect())
}

/// `Φ` on every basis relation of a Hom space, checking that each image has
/// coefficient 1 on the orbit of the relation itself and support below it.
fn hom_data<C: RegularCategory, R: Ring>(
    cat: &C,
    idx: &PhiIndex<C>,
    rep: &mut PhiReport,
) -> Result<HomData<C, R>> {
    let (x, y) = (&idx.source.ambient, &idx.target.ambient);
    let yx = cat.product(y, x);
    let basis = principal_relations(cat, x, y)?;
    let position: HashMap<&C::Sub, usize> = idx.triples.iter().enumerate().map(|(i, (_, c))| (c, i)).collect();
    let mut images = Vec::with_capacity(basis.len());
    for a in &basis {
        let m = idx.phi(cat, &KnopMor::basis(cat, x, y, a.clone())?);
        let ok_diag = position
            .get(a)
            .is_some_and(|&i| m.entries.get(&idx.triples[i].0).is_some_and(|v: &R| v.is_one()));
        let ok_support = m.entries.len()
            == idx.triples.iter().filter(|(_, c)| cat.sub_leq(&yx, c, a)).count();
        if !ok_diag || !ok_support {
            rep.failures.push(Witness {
                axiom: "unitriangular".into(),
                detail: cat.describe_sub(&yx, a),
            });
        }
        images.push(m);
    }
    Ok(HomData { basis, images })
}

/// Checks `Φ([B] ∘ [A]) = Φ([B]) ∘ Φ([A])` for all basis relations between principal
/// objects of at most `bound` points, that orbit indices and basis relations
/// correspond bijectively on every Hom space, and that `Φ` is unitriangular.
///
/// Triples beyond `opts.triple_cap` are listed as skipped, and then checked on
/// `opts.samples` random basis pairs each.
pub fn verify_phi<C, R, D>(cat: &C, nu: D, bound: usize, opts: &PhiOptions) -> Result<PhiReport>
where
    C: RegularCategory,
    R: Ring,
    D: DegreeFunction<C, R>,
{
    let objects: Vec<C::Obj> = cat.objects(bound)?.into_iter().filter(|x| cat.is_principal(x)).collect();
    let mu = DerivedMeasure::new(nu);
    let composer = PermComposer::new(&mu);
    let mut rep = PhiReport {
        bound,
        objects: objects.len(),
        ..PhiReport::default()
    };
    let n = objects.len();
    let mut index: HashMap<(usize, usize), PhiIndex<C>> = HashMap::new();
    for xi in 0..n {
        for yi in 0..n {
            let (x, y) = (&objects[xi], &objects[yi]);
            rep.hom_spaces += 1;
            match PhiIndex::new(cat, x, y) {
                Ok(idx) => {
                    let rels = principal_relations(cat, x, y)?.len();
                    if idx.triples.len() != rels {
                        rep.failures.push(Witness {
                            axiom: "bijective".into(),
                            detail: format!(
                                "{} orbit indices but {} basis relations for {} -> {}",
                                idx.triples.len(),
                                rels,
                                cat.describe_obj(x),
                                cat.describe_obj(y)
                            ),
                        });
                    }
                    index.insert((xi, yi), idx);
                }
                Err(Error::Mismatch(m)) => rep.failures.push(Witness {
                    axiom: "bijective".into(),
                    detail: m,
                }),
                Err(e) => return Err(e),
            }
        }
    }
    let mut homs: HashMap<(usize, usize), HomData<C, R>> = HashMap::new();
    let mut skipped = Vec::new();
    for xi in 0..n {
        for yi in 0..n {
            for zi in 0..n {
                let (x, y, z) = (&objects[xi], &objects[yi], &objects[zi]);
                let name = format!(
                    "{} -> {} -> {}",
                    cat.describe_obj(x),
                    cat.describe_obj(y),
                    cat.describe_obj(z)
                );
                let size = cat.atom_count(&cat.product(&cat.product(z, y), x));
                if opts.triple_cap.is_some_and(|cap| size > cap) {
                    rep.triples_skipped.push(name);
                    skipped.push((xi, yi, zi));
                    continue;
                }
                let started = std::time::Instant::now();
                for key in [(xi, yi), (yi, zi)] {
                    if !homs.contains_key(&key) {
                        let Some(idx) = index.get(&key) else { continue };
                        let data = hom_data(cat, idx, &mut rep)?;
                        homs.insert(key, data);
                    }
                }
                let (Some(ha), Some(hb), Some(idx_xz)) = (homs.get(&(xi, yi)), homs.get(&(yi, zi)), index.get(&(xi, zi)))
                else {
                    continue;
                };
                rep.triples_checked += 1;
                for (b, ib) in hb.basis.iter().zip(&hb.images) {
                    for (a, ia) in ha.basis.iter().zip(&ha.images) {
                        rep.pairs += 1;
                        check_pair(cat, &mu, &composer, idx_xz, (x, y, z), (b, ib), (a, ia), &mut rep)?;
                    }
                }
                rep.timings.push((name, started.elapsed()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut relations: HashMap<(usize, usize), Vec<C::Sub>> = HashMap::new();
    for (xi, yi, zi) in skipped {
        if opts.samples == 0 {
            break;
        }
        let (x, y, z) = (&objects[xi], &objects[yi], &objects[zi]);
        let (Some(idx_xy), Some(idx_yz), Some(idx_xz)) = (index.get(&(xi, yi)), index.get(&(yi, zi)), index.get(&(xi, zi)))
        else {
            continue;
        };
        for key in [(xi, yi), (yi, zi)] {
            if !relations.contains_key(&key) {
                relations.insert(key, principal_relations(cat, &objects[key.0], &objects[key.1])?);
            }
        }
        let (ra, rb) = (&relations[&(xi, yi)], &relations[&(yi, zi)]);
        let mut done = 0;
        for _ in 0..opts.samples * 50 {
            if done == opts.samples {
                break;
            }
            let a = &ra[rng.gen_range(0..ra.len())];
            let b = &rb[rng.gen_range(0..rb.len())];
            let comp = compose_rel(
                cat,
                &Relation::new(y.clone(), z.clone(), b.clone()),
                &Relation::new(x.clone(), y.clone(), a.clone()),
            )?;
            if cat.atom_count(&comp.intermediate) > opts.sample_fiber_cap {
                continue;
            }
            let ia = idx_xy.phi(cat, &KnopMor::basis(cat, x, y, a.clone())?);
            let ib = idx_yz.phi(cat, &KnopMor::basis(cat, y, z, b.clone())?);
            check_pair(cat, &mu, &composer, idx_xz, (x, y, z), (b, &ib), (a, &ia), &mut rep)?;
            done += 1;
        }
        rep.sampled_pairs += done;
        rep.sampled_triples += usize::from(done > 0);
    }
    Ok(rep)
}

#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn check_pair<C, R, D>(
    cat: &C,
    mu: &DerivedMeasure<C, R, D>,
    composer: &PermComposer<'_, C, R, DerivedMeasure<C, R, D>>,
    idx_xz: &PhiIndex<C>,
    (x, y, z): (&C::Obj, &C::Obj, &C::Obj),
    (b, ib): (&C::Sub, &PermMatrix<C, R>),
    (a, ia): (&C::Sub, &PermMatrix<C, R>),
    rep: &mut PhiReport,
) -> Result<()>
where
    C: RegularCategory,
    R: Ring,
    D: DegreeFunction<C, R>,
{
    let kb = KnopMor::basis(cat, y, z, b.clone())?;
    let ka = KnopMor::basis(cat, x, y, a.clone())?;
    let lhs = idx_xz.phi(cat, &knop_compose(cat, &kb, &ka, &mu.degree)?);
    let rhs = composer.compose(cat, ib, ia)?;
    if lhs != rhs && rep.failures.len() < 20 {
        rep.failures.push(Witness {
            axiom: "functor".into(),
            detail: format!(
                "B = {}, A = {}",
                cat.describe_sub(&cat.product(z, y), b),
                cat.describe_sub(&cat.product(y, x), a)
            ),
        });
    }
    Ok(())
}
