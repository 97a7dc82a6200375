//! Objects of the order built from a regular category: finite unions of atoms
//! `𝔅(X)`, their products and fiber products via ample subobjects, `𝔄₁(X)`,
//! and the calculus of invariant equivalence relations on `𝔅(X)`.

use std::collections::{BTreeSet, HashMap};

use crate::error::{size_limit, Error, Result};
use crate::group::{self, GSet, Permutation};
use crate::regcat::{
    ample_in_fiber_product, ample_subobjects, compose_rel, is_ample, is_equivalence_relation, rel_leq,
    transpose_rel, FinGSetCat, PointSet, RegularCategory, Relation,
};

/// An atom `𝔅(X)`, optionally divided by a group of automorphisms of `X`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom<O> {
    pub object: O,
    /// Generators of `Γ ≤ Aut(X)` as point permutations; empty means no quotient.
    pub gamma: Vec<Vec<usize>>,
}

impl<O> Atom<O> {
    pub fn plain(object: O) -> Self {
        Atom {
            object,
            gamma: Vec::new(),
        }
    }
}

/// A finite disjoint union of atoms.
#[derive(Clone, Debug)]
pub struct CObject<C: RegularCategory> {
    pub atoms: Vec<Atom<C::Obj>>,
}

impl<C: RegularCategory> CObject<C> {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The atoms in canonical (sorted) order.
    pub fn canonical(&self) -> Vec<Atom<C::Obj>> {
        let mut a = self.atoms.clone();
        a.sort();
        a
    }
}

/// One atom `𝔅(W)` of a product or fiber product, indexed by an ample subobject `W`.
#[derive(Clone, Debug)]
pub struct ProductAtom<C: RegularCategory> {
    pub sub: C::Sub,
    pub object: C::Obj,
}

/// `𝔅(X) × 𝔅(Y)`: one atom per ample subobject of `X × Y`.
pub fn atom_product<C: RegularCategory>(cat: &C, x: &C::Obj, y: &C::Obj) -> Result<Vec<ProductAtom<C>>> {
    let prod = cat.product(x, y);
    Ok(ample_subobjects(cat, x, y)?
        .into_iter()
        .map(|w| {
            let object = cat.sub_object(&prod, &w).0;
            ProductAtom { sub: w, object }
        })
        .collect())
}

/// `𝔅(X) ×_{𝔅(Z)} 𝔅(Y)` for surjections `f: X -> Z`, `g: Y -> Z`.
pub fn atom_fiber_product<C: RegularCategory>(cat: &C, f: &C::Mor, g: &C::Mor) -> Result<Vec<ProductAtom<C>>> {
    if !cat.is_surjection(f) || !cat.is_surjection(g) {
        return Err(Error::Invalid("atom maps must be induced by surjections".into()));
    }
    let prod = cat.product(&cat.source(f), &cat.source(g));
    Ok(ample_in_fiber_product(cat, f, g)?
        .into_iter()
        .map(|w| {
            let object = cat.sub_object(&prod, &w).0;
            ProductAtom { sub: w, object }
        })
        .collect())
}

pub fn cobject_of<C: RegularCategory>(atoms: &[ProductAtom<C>]) -> CObject<C> {
    CObject {
        atoms: atoms.iter().map(|a| Atom::plain(a.object.clone())).collect(),
    }
}

/// `𝔄₁(X)`: one atom `𝔅(Y)` per principal subobject `Y ⊆ X`.
#[derive(Clone, Debug)]
pub struct A1<C: RegularCategory> {
    pub ambient: C::Obj,
    pub subs: Vec<C::Sub>,
    pub objects: Vec<C::Obj>,
    index: HashMap<C::Sub, usize>,
}

impl<C: RegularCategory> A1<C> {
    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn index_of(&self, s: &C::Sub) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn cobject(&self) -> CObject<C> {
        CObject {
            atoms: self.objects.iter().cloned().map(Atom::plain).collect(),
        }
    }
}

pub fn build_a1<C: RegularCategory>(cat: &C, x: &C::Obj) -> Result<A1<C>> {
    if !cat.is_principal(x) {
        return Err(Error::Invalid(format!("{} is not principal", cat.describe_obj(x))));
    }
    let mut subs = Vec::new();
    let mut objects = Vec::new();
    for s in cat.subobjects(x)? {
        let (obj, _) = cat.sub_object(x, &s);
        if cat.is_principal(&obj) {
            subs.push(s);
            objects.push(obj);
        }
    }
    let index = subs.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(A1 {
        ambient: x.clone(),
        subs,
        objects,
        index,
    })
}

/// Checks `𝔄₁(X) × 𝔄₁(Y) = 𝔄₁(X × Y)`: the triples `(A, B, W)` with `W` ample in
/// `A × B` correspond bijectively, via their images, to principal subobjects of `X × Y`.
/// Returns the number of atoms on each side.
pub fn check_a1_product<C: RegularCategory>(cat: &C, x: &C::Obj, y: &C::Obj) -> Result<(usize, usize)> {
    let ax = build_a1(cat, x)?;
    let ay = build_a1(cat, y)?;
    let xy = cat.product(x, y);
    let axy = build_a1(cat, &xy)?;
    let mut seen = vec![false; axy.len()];
    let mut count = 0;
    for (a, a_obj) in ax.subs.iter().zip(&ax.objects) {
        let (_, ia) = cat.sub_object(x, a);
        for (b, b_obj) in ay.subs.iter().zip(&ay.objects) {
            let (_, ib) = cat.sub_object(y, b);
            let ab = cat.product(a_obj, b_obj);
            let into = cat.pair(
                &cat.compose(&ia, &cat.proj1(a_obj, b_obj)),
                &cat.compose(&ib, &cat.proj2(a_obj, b_obj)),
            );
            debug_assert_eq!(cat.source(&into), ab);
            for w in ample_subobjects(cat, a_obj, b_obj)? {
                count += 1;
                let img = cat.sub_image(&into, &w);
                let i = axy
                    .index_of(&img)
                    .ok_or_else(|| Error::Mismatch("product atom is not a principal subobject".into()))?;
                if seen[i] {
                    return Err(Error::Mismatch("two product atoms have the same image".into()));
                }
                seen[i] = true;
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Mismatch("some principal subobject of the product is missed".into()));
    }
    Ok((count, axy.len()))
}

/// A map of unions of atoms: each source atom goes to one target atom by a surjection.
#[derive(Clone, Debug)]
pub struct AtomMap<C: RegularCategory> {
    pub source: Vec<C::Obj>,
    pub target: Vec<C::Obj>,
    /// For each source atom, the target atom index and the inducing surjection.
    pub components: Vec<(usize, C::Mor)>,
}

/// `𝔄₁(f): 𝔄₁(Y) -> 𝔄₁(X)` for a map `f: Y -> X` of principal objects.
pub fn a1_map<C: RegularCategory>(cat: &C, f: &C::Mor) -> Result<(A1<C>, A1<C>, AtomMap<C>)> {
    let ay = build_a1(cat, &cat.source(f))?;
    let ax = build_a1(cat, &cat.target(f))?;
    let mut components = Vec::new();
    for (z, z_obj) in ay.subs.iter().zip(&ay.objects) {
        let (_, inc) = cat.sub_object(&ay.ambient, z);
        let fz = cat.compose(f, &inc);
        let (im, im_obj, e) = cat.factor_through_image(&fz);
        let j = ax.index_of(&im).expect("image of a principal subobject is principal");
        debug_assert_eq!(&im_obj, &ax.objects[j]);
        debug_assert_eq!(&cat.source(&e), z_obj);
        components.push((j, e));
    }
    let map = AtomMap {
        source: ay.objects.clone(),
        target: ax.objects.clone(),
        components,
    };
    Ok((ay, ax, map))
}

/// In `𝔅(X) × 𝔅(Y)`, the number of ample subobjects other than `X × Y` whose object is
/// isomorphic to `X × Y` (multiplicity one means this is zero).
pub fn product_multiplicity(cat: &FinGSetCat, x: &GSet, y: &GSet) -> Result<usize> {
    let xy = cat.product(x, y);
    let full = cat.top(&xy);
    let mut count = 0;
    for a in atom_product(cat, x, y)? {
        if a.sub != full && group::are_isomorphic(cat.group(), &a.object, &xy)?.is_some() {
            count += 1;
        }
    }
    Ok(count)
}

/// A set of ample subobjects of `X × X`.
#[derive(Clone, Debug)]
pub struct RelationSet<C: RegularCategory> {
    pub ambient: C::Obj,
    pub members: BTreeSet<C::Sub>,
}

/// Outcome of checking conditions (a)–(c) on a relation set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationSetVerdict {
    Pass,
    /// The first failing condition, `"a"`, `"b"` or `"c"`, with a description.
    Fail(String, String),
}

impl<C: RegularCategory> RelationSet<C> {
    pub fn new(cat: &C, x: &C::Obj, members: impl IntoIterator<Item = C::Sub>) -> Result<Self> {
        let members: BTreeSet<C::Sub> = members.into_iter().collect();
        let p = [cat.proj1(x, x), cat.proj2(x, x)];
        if let Some(m) = members.iter().find(|m| !is_ample(cat, &p, m)) {
            return Err(Error::Invalid(format!(
                "{} is not ample",
                cat.describe_sub(&cat.product(x, x), m)
            )));
        }
        Ok(RelationSet {
            ambient: x.clone(),
            members,
        })
    }

    pub fn relation(&self, s: &C::Sub) -> Relation<C> {
        Relation::new(self.ambient.clone(), self.ambient.clone(), s.clone())
    }

    /// All ample subobjects of `X ×_Y X` for a surjection `q: X -> Y`.
    pub fn of_quotient(cat: &C, q: &C::Mor) -> Result<Self> {
        let x = cat.source(q);
        RelationSet::new(cat, &x, ample_in_fiber_product(cat, q, q)?)
    }

    /// Graphs of a set of automorphisms, given as point maps `γ`; the graph is `{(γx, x)}`.
    pub fn of_automorphisms(cat: &C, x: &C::Obj, autos: &[C::Mor]) -> Result<Self> {
        let members: Vec<C::Sub> = autos.iter().map(|g| Relation::graph(cat, g).sub).collect();
        RelationSet::new(cat, x, members)
    }
}

/// Conditions (a)–(c) of an invariant equivalence relation on `𝔅(X)`.
///
/// Condition (c) asks, for all `A, B ∈ 𝓡` and every `W ⊆ B ×_X A ⊆ X × X × X`
/// with `p₁₂(W) = B` and `p₂₃(W) = A`, that `p₁₃(W) ∈ 𝓡`. Such images are ample
/// subobjects `C ⊆ B ∘ A`, and `C` occurs exactly when the largest candidate
/// `W_C = (B ×_X A) ∩ p₁₃⁻¹(C)` projects onto `B`, `A` and `C`; so only the
/// ample `C ∉ 𝓡` below `B ∘ A` are examined, cached per composite. `budget`
/// caps the number of pairs plus enumerated candidates.
pub fn relation_set_check<C: RegularCategory>(
    cat: &C,
    r: &RelationSet<C>,
    budget: usize,
) -> Result<RelationSetVerdict> {
    let x = &r.ambient;
    let diag = Relation::diagonal(cat, x).sub;
    if !r.members.contains(&diag) {
        return Ok(RelationSetVerdict::Fail("a".into(), "the diagonal is missing".into()));
    }
    for m in &r.members {
        let t = transpose_rel(cat, &r.relation(m)).sub;
        if !r.members.contains(&t) {
            return Ok(RelationSetVerdict::Fail(
                "b".into(),
                format!("transpose of {} is missing", cat.describe_sub(&cat.product(x, x), m)),
            ));
        }
    }
    let xx = cat.product(x, x);
    let proj = [cat.proj1(x, x), cat.proj2(x, x)];
    let mut spent = 0usize;
    let mut outside: HashMap<C::Sub, Vec<C::Sub>> = HashMap::new();
    for b in &r.members {
        let (b_obj, b_inc) = cat.sub_object(&xx, b);
        let b_first = cat.compose(&proj[0], &b_inc);
        let b_second = cat.compose(&proj[1], &b_inc);
        for a in &r.members {
            let (a_obj, a_inc) = cat.sub_object(&xx, a);
            let a_first = cat.compose(&proj[0], &a_inc);
            let a_second = cat.compose(&proj[1], &a_inc);
            // Triples (u, v, w) with (u, v) ∈ B and (v, w) ∈ A.
            let fp = cat.fiber_product(&b_second, &a_first);
            let ba = cat.product(&b_obj, &a_obj);
            let (_, fp_inc) = cat.sub_object(&ba, &fp);
            let to_b = cat.compose(&cat.proj1(&b_obj, &a_obj), &fp_inc);
            let to_a = cat.compose(&cat.proj2(&b_obj, &a_obj), &fp_inc);
            let p13 = cat.pair(&cat.compose(&b_first, &to_b), &cat.compose(&a_second, &to_a));
            spent += 1;
            let comp = cat.image(&p13);
            if !outside.contains_key(&comp) {
                let (comp_obj, comp_inc) = cat.sub_object(&xx, &comp);
                let subs = cat.subobjects(&comp_obj)?;
                spent += subs.len();
                let bad = subs
                    .iter()
                    .map(|s| cat.sub_image(&comp_inc, s))
                    .filter(|c| !r.members.contains(c) && is_ample(cat, &proj, c))
                    .collect();
                outside.insert(comp.clone(), bad);
            }
            if spent > budget {
                return Err(size_limit("relation-set check candidates", budget, spent));
            }
            let (top_b, top_a) = (cat.top(&b_obj), cat.top(&a_obj));
            for c in &outside[&comp] {
                spent += 1;
                let w = cat.preimage(&p13, c);
                if cat.sub_image(&to_b, &w) == top_b && cat.sub_image(&to_a, &w) == top_a && cat.sub_image(&p13, &w) == *c
                {
                    return Ok(RelationSetVerdict::Fail(
                        "c".into(),
                        format!(
                            "p13 of a subobject over ({}, {}) is {}",
                            cat.describe_sub(&xx, b),
                            cat.describe_sub(&xx, a),
                            cat.describe_sub(&xx, c)
                        ),
                    ));
                }
            }
        }
    }
    Ok(RelationSetVerdict::Pass)
}

/// Whether `B ∘ A ∈ 𝓡` for all `A, B ∈ 𝓡`.
pub fn closed_under_composition<C: RegularCategory>(cat: &C, r: &RelationSet<C>) -> Result<bool> {
    for b in &r.members {
        for a in &r.members {
            let c = compose_rel(cat, &r.relation(b), &r.relation(a))?.relation.sub;
            if !r.members.contains(&c) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The maximal member of `𝓡°` (members containing the diagonal), after verifying
/// that it is an equivalence relation, contains all of `𝓡°`, and that all of its
/// ample subobjects lie in `𝓡`.
pub fn maximal_reflexive_element<C: RegularCategory>(cat: &C, r: &RelationSet<C>) -> Result<C::Sub> {
    let x = &r.ambient;
    let xx = cat.product(x, x);
    let diag = Relation::diagonal(cat, x);
    let reflexive: Vec<&C::Sub> = r
        .members
        .iter()
        .filter(|m| rel_leq(cat, &diag, &r.relation(m)))
        .collect();
    let maximal: Vec<&C::Sub> = reflexive
        .iter()
        .copied()
        .filter(|m| !reflexive.iter().any(|n| n != m && cat.sub_leq(&xx, m, n)))
        .collect();
    let big = match maximal.as_slice() {
        [one] => (*one).clone(),
        [] => return Err(Error::Precondition {
            message: "no member contains the diagonal".into(),
            witness: cat.describe_obj(x),
        }),
        _ => return Err(Error::Precondition {
            message: "reflexive members have several maximal elements".into(),
            witness: format!("{} maximal elements", maximal.len()),
        }),
    };
    let big_rel = r.relation(&big);
    if !is_equivalence_relation(cat, &big_rel)? {
        return Err(Error::Precondition {
            message: "maximal reflexive member is not an equivalence relation".into(),
            witness: cat.describe_sub(&xx, &big),
        });
    }
    let (r_obj, r_inc) = cat.sub_object(&xx, &big);
    let p = [
        cat.compose(&cat.proj1(x, x), &r_inc),
        cat.compose(&cat.proj2(x, x), &r_inc),
    ];
    for s in cat.subobjects(&r_obj)? {
        if is_ample(cat, &p, &s) && !r.members.contains(&cat.sub_image(&r_inc, &s)) {
            return Err(Error::Precondition {
                message: "an ample subobject of the maximal reflexive member is missing".into(),
                witness: cat.describe_sub(&xx, &cat.sub_image(&r_inc, &s)),
            });
        }
    }
    Ok(big)
}

/// The two outcomes of the dichotomy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    /// `X -> X/R` for the maximal reflexive member `R ≠ Δ`.
    ProperQuotient { map: Vec<usize>, target: GSet, kernel: PointSet },
    /// All members are graphs of automorphisms; the group they form, as sorted point maps.
    Subgroup(Vec<Vec<usize>>),
}

pub fn equivalence_dichotomy(cat: &FinGSetCat, r: &RelationSet<FinGSetCat>) -> Result<Dichotomy> {
    let x = &r.ambient;
    let n = x.points();
    let big = maximal_reflexive_element(cat, r)?;
    let diag = Relation::diagonal(cat, x).sub;
    if big != diag {
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for a in 0..n {
            if class[a] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(a);
            for b in 0..n {
                if big.contains(b * n + a) {
                    class[b] = id;
                }
            }
        }
        let action = x
            .action()
            .iter()
            .map(|g| reps.iter().map(|&a| class[g[a]]).collect())
            .collect();
        let target = GSet::new(cat.group(), reps.len(), action)?;
        return Ok(Dichotomy::ProperQuotient {
            map: class,
            target,
            kernel: big,
        });
    }
    let mut autos: BTreeSet<Vec<usize>> = BTreeSet::new();
    for m in &r.members {
        // {(y, x)}: both projections must be bijective.
        let mut gamma = vec![usize::MAX; n];
        let mut hit = vec![false; n];
        for p in m.points() {
            let (y, xx) = (p / n, p % n);
            if gamma[xx] != usize::MAX || hit[y] {
                return Err(Error::Precondition {
                    message: "a member is not the graph of an automorphism".into(),
                    witness: cat.describe_sub(&cat.product(x, x), m),
                });
            }
            gamma[xx] = y;
            hit[y] = true;
        }
        autos.insert(gamma);
    }
    for a in &autos {
        let pa = Permutation::from_images(a.clone())?;
        if !autos.contains(pa.inverse().images()) {
            return Err(Error::Precondition {
                message: "automorphisms are not closed under inverses".into(),
                witness: format!("{a:?}"),
            });
        }
        for b in &autos {
            let c: Vec<usize> = b.iter().map(|&i| a[i]).collect();
            if !autos.contains(&c) {
                return Err(Error::Precondition {
                    message: "automorphisms are not closed under composition".into(),
                    witness: format!("{a:?} ∘ {b:?}"),
                });
            }
        }
    }
    Ok(Dichotomy::Subgroup(autos.into_iter().collect()))
}

/// Every automorphism subgroup of `X`, as sorted lists of point maps.
pub fn automorphism_subgroups(cat: &FinGSetCat, x: &GSet) -> Result<Vec<Vec<Vec<usize>>>> {
    if x.points() == 0 {
        return Ok(vec![vec![Vec::new()]]);
    }
    let aut = group::aut_gset(cat.group(), x)?;
    let els = aut.elements()?.to_vec();
    Ok(aut
        .subgroups()?
        .into_iter()
        .map(|h| {
            let mut v: Vec<Vec<usize>> = h.iter().map(|&i| els[i].images().to_vec()).collect();
            v.sort();
            v
        })
        .collect())
}

/// Proper quotients of `X` (surjections that are not isomorphisms), one per
/// G-invariant equivalence relation, as point maps onto class indices.
pub fn proper_quotients(cat: &FinGSetCat, x: &GSet) -> Result<Vec<crate::regcat::GMor>> {
    let n = x.points();
    let mut out = Vec::new();
    for p in crate::regcat::Partition::all(n) {
        if p.block_count() == n {
            continue;
        }
        let invariant = x
            .action()
            .iter()
            .all(|g| (0..n).all(|a| (0..n).all(|b| p.blocks[a] != p.blocks[b] || p.blocks[g[a]] == p.blocks[g[b]])));
        if !invariant {
            continue;
        }
        let k = p.block_count();
        let mut rep = vec![0; k];
        for a in (0..n).rev() {
            rep[p.blocks[a]] = a;
        }
        let action = x
            .action()
            .iter()
            .map(|g| rep.iter().map(|&a| p.blocks[g[a]]).collect())
            .collect();
        let target = GSet::new(cat.group(), k, action)?;
        out.push(cat.gmor(x, &target, p.blocks.clone())?);
    }
    Ok(out)
}
