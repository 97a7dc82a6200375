//! Regular categories with finitely many subobjects, two concrete instances,
//! and the calculus of relations.
//!
//! Instance A ([`FinGSetCat`]) is finite G-sets for a finite permutation group.
//! Instance B ([`OpFinSetCat`]) is the opposite of finite sets: a morphism
//! `X -> Y` is stored as a set map `Y -> X`, products are disjoint unions and
//! subobjects are set partitions.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{size_limit, Error, Result};
use crate::group::{self, GSet, PermGroup};

/// A complete isomorphism invariant of an arrow, used as a cache key.
pub type IsoKey = Vec<usize>;

/// Default bound on the orbit count of a G-set whose subobjects are enumerated.
pub const DEFAULT_ORBIT_BOUND: usize = 20;
/// Default bound on the size of a finite set whose partitions are enumerated.
pub const DEFAULT_PARTITION_BOUND: usize = 10;

pub trait RegularCategory {
    type Obj: Clone + Eq + Hash + Ord + Debug;
    type Mor: Clone + Eq + Hash + Debug;
    type Sub: Clone + Eq + Hash + Ord + Debug;

    fn name(&self) -> String;

    fn source(&self, f: &Self::Mor) -> Self::Obj;
    fn target(&self, f: &Self::Mor) -> Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::Mor;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::Mor, f: &Self::Mor) -> Self::Mor;

    fn terminal(&self) -> Self::Obj;
    fn to_terminal(&self, x: &Self::Obj) -> Self::Mor;
    fn product(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Obj;
    fn proj1(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Mor;
    fn proj2(&self, x: &Self::Obj, y: &Self::Obj) -> Self::Mor;
    /// The map `T -> X × Y` with components `f: T -> X` and `g: T -> Y`.
    fn pair(&self, f: &Self::Mor, g: &Self::Mor) -> Self::Mor;

    /// All subobjects of `x` in canonical order.
    fn subobjects(&self, x: &Self::Obj) -> Result<Vec<Self::Sub>>;
    fn sub_leq(&self, x: &Self::Obj, a: &Self::Sub, b: &Self::Sub) -> bool;
    fn sub_meet(&self, x: &Self::Obj, a: &Self::Sub, b: &Self::Sub) -> Self::Sub;
    fn top(&self, x: &Self::Obj) -> Self::Sub;
    /// The object underlying a subobject, with its inclusion.
    fn sub_object(&self, x: &Self::Obj, s: &Self::Sub) -> (Self::Obj, Self::Mor);
    fn image(&self, f: &Self::Mor) -> Self::Sub;
    /// Image of a subobject of the source.
    fn sub_image(&self, f: &Self::Mor, s: &Self::Sub) -> Self::Sub;
    /// Pullback of a subobject of the target.
    fn preimage(&self, f: &Self::Mor, s: &Self::Sub) -> Self::Sub;
    /// `X ×_Z Y` as a subobject of `X × Y`, for `f: X -> Z`, `g: Y -> Z`.
    fn fiber_product(&self, f: &Self::Mor, g: &Self::Mor) -> Self::Sub;
    /// `f = i ∘ e` with `e` surjective; returns the image, its object and `e`.
    fn factor_through_image(&self, f: &Self::Mor) -> (Self::Sub, Self::Obj, Self::Mor);

    fn is_surjection(&self, f: &Self::Mor) -> bool;
    fn is_injection(&self, f: &Self::Mor) -> bool;
    fn is_principal(&self, x: &Self::Obj) -> bool;
    /// Cardinality of the underlying finite set.
    fn underlying_size(&self, x: &Self::Obj) -> usize;
    /// Number of atoms (orbits for G-sets; an object of instance B is one atom).
    fn atom_count(&self, x: &Self::Obj) -> usize;

    /// Representatives of the isomorphism classes of objects of size at most `bound`.
    fn objects(&self, bound: usize) -> Result<Vec<Self::Obj>>;
    fn morphisms(&self, x: &Self::Obj, y: &Self::Obj) -> Result<Vec<Self::Mor>>;
    fn iso_key(&self, f: &Self::Mor) -> IsoKey;

    fn describe_obj(&self, x: &Self::Obj) -> String;
    fn describe_sub(&self, x: &Self::Obj, s: &Self::Sub) -> String;
    fn describe_mor(&self, f: &Self::Mor) -> String;

    /// Index of the image of `x -> 1` among the subobjects of the final object: 0 (empty) or 1.
    fn type_of(&self, x: &Self::Obj) -> usize {
        if self.is_principal(x) {
            1
        } else {
            0
        }
    }

    fn is_iso(&self, f: &Self::Mor) -> bool {
        self.is_surjection(f) && self.is_injection(f)
    }

    fn bottom(&self, x: &Self::Obj) -> Result<Self::Sub> {
        Ok(self.subobjects(x)?.into_iter().next().expect("subobject lattice is non-empty"))
    }

    /// Subobjects `t` of `x` with `s <= t`.
    fn subobjects_above(&self, x: &Self::Obj, s: &Self::Sub) -> Result<Vec<Self::Sub>> {
        Ok(self
            .subobjects(x)?
            .into_iter()
            .filter(|t| self.sub_leq(x, s, t))
            .collect())
    }
}

/// A bit set over the points of a finite set; the subobject type of instance A.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet {
    words: Vec<u64>,
}

impl PointSet {
    pub fn empty(n: usize) -> Self {
        PointSet {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_points(n: usize, pts: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for p in pts {
            s.insert(p);
        }
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn points(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(k * 64 + b);
                w &= w - 1;
            }
        }
        out
    }
}

/// An equivariant map, the morphism type of instance A.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GMor {
    pub source: GSet,
    pub target: GSet,
    pub map: Vec<usize>,
}

/// Disjoint unions of the given transitive G-sets, one per multiset, kept while `fits` holds.
fn multisets(types: &[GSet], fits: impl Fn(&GSet) -> bool) -> Vec<GSet> {
    fn go(types: &[GSet], start: usize, cur: Option<GSet>, fits: &dyn Fn(&GSet) -> bool, out: &mut Vec<GSet>) {
        if let Some(c) = &cur {
            out.push(c.clone());
        }
        for i in start..types.len() {
            let next = match &cur {
                None => types[i].clone(),
                Some(c) => c.disjoint_union(&types[i]),
            };
            if fits(&next) {
                go(types, i, Some(next), fits, out);
            }
        }
    }
    let mut out = Vec::new();
    go(types, 0, None, &fits, &mut out);
    out
}

/// Instance A: finite G-sets.
#[derive(Clone, Debug)]
pub struct FinGSetCat {
    group: PermGroup,
    orbit_bound: usize,
}

impl FinGSetCat {
    pub fn new(group: PermGroup) -> Self {
        FinGSetCat {
            group,
            orbit_bound: DEFAULT_ORBIT_BOUND,
        }
    }

    pub fn with_orbit_bound(mut self, bound: usize) -> Self {
        self.orbit_bound = bound;
        self
    }

    pub fn trivial_group() -> Self {
        Self::new(PermGroup::trivial())
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// `n` points with trivial action.
    pub fn points(&self, n: usize) -> GSet {
        GSet::trivial(&self.group, n)
    }

    pub fn regular(&self) -> Result<GSet> {
        GSet::regular(&self.group)
    }

    pub fn gmor(&self, source: &GSet, target: &GSet, map: Vec<usize>) -> Result<GMor> {
        let g = group::GMap::new(source.clone(), target.clone(), map)?;
        Ok(GMor {
            source: g.source,
            target: g.target,
            map: g.map,
        })
    }

    /// Non-empty G-sets with at most `max_orbits` orbits, up to isomorphism.
    pub fn objects_with_orbits(&self, max_orbits: usize) -> Result<Vec<GSet>> {
        let types = group::transitive_gsets(&self.group)?;
        let mut out = multisets(&types, |x| x.orbit_count() <= max_orbits);
        out.sort_by_key(|x| (x.orbit_count(), x.points()));
        Ok(out)
    }

    /// Stable subset generated by a set of points.
    pub fn stable_closure(&self, x: &GSet, pts: &[usize]) -> PointSet {
        let mut s = PointSet::empty(x.points());
        let mut stack: Vec<usize> = pts.to_vec();
        while let Some(p) = stack.pop() {
            if s.contains(p) {
                continue;
            }
            s.insert(p);
            for a in x.action() {
                if !s.contains(a[p]) {
                    stack.push(a[p]);
                }
            }
        }
        s
    }

    fn point_image(&self, f: &GMor, s: &PointSet) -> PointSet {
        PointSet::from_points(f.target.points(), s.points().into_iter().map(|p| f.map[p]))
    }
}

/// BFS relabeling of the orbit of `base`: the action table in new labels,
/// the visiting order, and each point's new label (`usize::MAX` off the orbit).
fn pointed_table(x: &GSet, base: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let order = x.bfs_order(base);
    let mut pos = vec![usize::MAX; x.points()];
    for (i, &p) in order.iter().enumerate() {
        pos[p] = i;
    }
    let mut table = Vec::with_capacity(order.len() * x.action().len());
    for &p in &order {
        for a in x.action() {
            table.push(pos[a[p]]);
        }
    }
    (table, order, pos)
}

fn push_block(key: &mut Vec<usize>, block: &[usize]) {
    key.push(block.len());
    key.extend_from_slice(block);
}

impl RegularCategory for FinGSetCat {
    type Obj = GSet;
    type Mor = GMor;
    type Sub = PointSet;

    fn name(&self) -> String {
        format!("fin-gset(order {})", self.group.order().unwrap_or(0))
    }

    fn source(&self, f: &GMor) -> GSet {
        f.source.clone()
    }

    fn target(&self, f: &GMor) -> GSet {
        f.target.clone()
    }

    fn identity(&self, x: &GSet) -> GMor {
        GMor {
            source: x.clone(),
            target: x.clone(),
            map: (0..x.points()).collect(),
        }
    }

    fn compose(&self, g: &GMor, f: &GMor) -> GMor {
        debug_assert_eq!(f.target, g.source);
        GMor {
            source: f.source.clone(),
            target: g.target.clone(),
            map: f.map.iter().map(|&y| g.map[y]).collect(),
        }
    }

    fn terminal(&self) -> GSet {
        self.points(1)
    }

    fn to_terminal(&self, x: &GSet) -> GMor {
        GMor {
            source: x.clone(),
            target: self.terminal(),
            map: vec![0; x.points()],
        }
    }

    fn product(&self, x: &GSet, y: &GSet) -> GSet {
        x.product(y)
    }

    fn proj1(&self, x: &GSet, y: &GSet) -> GMor {
        let m = y.points();
        GMor {
            source: x.product(y),
            target: x.clone(),
            map: (0..x.points() * m).map(|p| p / m).collect(),
        }
    }

    fn proj2(&self, x: &GSet, y: &GSet) -> GMor {
        let m = y.points();
        GMor {
            source: x.product(y),
            target: y.clone(),
            map: (0..x.points() * m).map(|p| p % m).collect(),
        }
    }

    fn pair(&self, f: &GMor, g: &GMor) -> GMor {
        debug_assert_eq!(f.source, g.source);
        let m = g.target.points();
        GMor {
            source: f.source.clone(),
            target: f.target.product(&g.target),
            map: f.map.iter().zip(&g.map).map(|(&a, &b)| a * m + b).collect(),
        }
    }

    fn subobjects(&self, x: &GSet) -> Result<Vec<PointSet>> {
        let orbits = x.orbits();
        if orbits.len() > self.orbit_bound {
            return Err(size_limit("orbit count for subobject enumeration", self.orbit_bound, orbits.len()));
        }
        let k = orbits.len();
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u64..(1u64 << k) {
            let mut s = PointSet::empty(x.points());
            for (i, o) in orbits.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for &p in o {
                        s.insert(p);
                    }
                }
            }
            out.push((mask.count_ones(), s));
        }
        out.sort();
        Ok(out.into_iter().map(|(_, s)| s).collect())
    }

    fn sub_leq(&self, _x: &GSet, a: &PointSet, b: &PointSet) -> bool {
        a.is_subset(b)
    }

    fn sub_meet(&self, _x: &GSet, a: &PointSet, b: &PointSet) -> PointSet {
        a.intersection(b)
    }

    fn top(&self, x: &GSet) -> PointSet {
        PointSet::full(x.points())
    }

    fn bottom(&self, x: &GSet) -> Result<PointSet> {
        Ok(PointSet::empty(x.points()))
    }

    fn subobjects_above(&self, x: &GSet, s: &PointSet) -> Result<Vec<PointSet>> {
        let free: Vec<Vec<usize>> = x.orbits().into_iter().filter(|o| !s.contains(o[0])).collect();
        if free.len() > self.orbit_bound {
            return Err(size_limit("orbit count for subobject enumeration", self.orbit_bound, free.len()));
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for mask in 0u64..(1u64 << free.len()) {
            let mut t = s.clone();
            for (i, o) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for &p in o {
                        t.insert(p);
                    }
                }
            }
            out.push(t);
        }
        Ok(out)
    }

    fn sub_object(&self, x: &GSet, s: &PointSet) -> (GSet, GMor) {
        let pts = s.points();
        let obj = x.restrict(&pts);
        let incl = GMor {
            source: obj.clone(),
            target: x.clone(),
            map: pts,
        };
        (obj, incl)
    }

    fn image(&self, f: &GMor) -> PointSet {
        PointSet::from_points(f.target.points(), f.map.iter().copied())
    }

    fn sub_image(&self, f: &GMor, s: &PointSet) -> PointSet {
        self.point_image(f, s)
    }

    fn preimage(&self, f: &GMor, s: &PointSet) -> PointSet {
        PointSet::from_points(
            f.source.points(),
            (0..f.source.points()).filter(|&p| s.contains(f.map[p])),
        )
    }

    fn fiber_product(&self, f: &GMor, g: &GMor) -> PointSet {
        let m = g.source.points();
        let mut s = PointSet::empty(f.source.points() * m);
        for x in 0..f.source.points() {
            for y in 0..m {
                if f.map[x] == g.map[y] {
                    s.insert(x * m + y);
                }
            }
        }
        s
    }

    fn factor_through_image(&self, f: &GMor) -> (PointSet, GSet, GMor) {
        let im = self.image(f);
        let pts = im.points();
        let mut pos = vec![usize::MAX; f.target.points()];
        for (i, &p) in pts.iter().enumerate() {
            pos[p] = i;
        }
        let obj = f.target.restrict(&pts);
        let e = GMor {
            source: f.source.clone(),
            target: obj.clone(),
            map: f.map.iter().map(|&y| pos[y]).collect(),
        };
        (im, obj, e)
    }

    fn is_surjection(&self, f: &GMor) -> bool {
        let mut hit = vec![false; f.target.points()];
        for &y in &f.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    fn is_injection(&self, f: &GMor) -> bool {
        let mut hit = vec![false; f.target.points()];
        for &y in &f.map {
            if hit[y] {
                return false;
            }
            hit[y] = true;
        }
        true
    }

    fn is_principal(&self, x: &GSet) -> bool {
        x.points() > 0
    }

    fn underlying_size(&self, x: &GSet) -> usize {
        x.points()
    }

    fn atom_count(&self, x: &GSet) -> usize {
        x.orbit_count()
    }

    /// Non-empty G-sets with at most `bound` points, up to isomorphism.
    fn objects(&self, bound: usize) -> Result<Vec<GSet>> {
        let types: Vec<GSet> = group::transitive_gsets(&self.group)?
            .into_iter()
            .filter(|t| t.points() <= bound)
            .collect();
        let mut out = multisets(&types, |x| x.points() <= bound);
        out.sort_by_key(|x| (x.points(), x.orbit_count()));
        Ok(out)
    }

    fn morphisms(&self, x: &GSet, y: &GSet) -> Result<Vec<GMor>> {
        Ok(group::equivariant_maps(&self.group, x, y)?
            .into_iter()
            .map(|map| GMor {
                source: x.clone(),
                target: y.clone(),
                map,
            })
            .collect())
    }

    fn iso_key(&self, f: &GMor) -> IsoKey {
        let src_orbits = f.source.orbits();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for o_orbit in f.target.orbits() {
            let over: Vec<&Vec<usize>> = src_orbits
                .iter()
                .filter(|p| o_orbit.binary_search(&f.map[p[0]]).is_ok())
                .collect();
            let mut best: Option<Vec<usize>> = None;
            for &o in &o_orbit {
                let (t_o, _, pos_o) = pointed_table(&f.target, o);
                let mut encs: Vec<Vec<usize>> = Vec::new();
                for p_orbit in &over {
                    let mut best_p: Option<Vec<usize>> = None;
                    for &p in p_orbit.iter().filter(|&&p| f.map[p] == o) {
                        let (t_p, order_p, _) = pointed_table(&f.source, p);
                        let mut e = Vec::new();
                        push_block(&mut e, &t_p);
                        let fv: Vec<usize> = order_p.iter().map(|&q| pos_o[f.map[q]]).collect();
                        push_block(&mut e, &fv);
                        if best_p.as_ref().is_none_or(|b| e < *b) {
                            best_p = Some(e);
                        }
                    }
                    encs.push(best_p.expect("every source orbit over O has a point over o"));
                }
                encs.sort();
                let mut k = Vec::new();
                push_block(&mut k, &t_o);
                k.push(encs.len());
                for e in &encs {
                    push_block(&mut k, e);
                }
                if best.as_ref().is_none_or(|b| k < *b) {
                    best = Some(k);
                }
            }
            blocks.push(best.unwrap());
        }
        blocks.sort();
        let mut key = vec![blocks.len()];
        for b in &blocks {
            push_block(&mut key, b);
        }
        key
    }

    fn describe_obj(&self, x: &GSet) -> String {
        if self.group.generators().is_empty() {
            return format!("[{}]", x.points());
        }
        let sizes: Vec<String> = x.orbits().iter().map(|o| o.len().to_string()).collect();
        format!("gset({} points; orbits {})", x.points(), sizes.join("+"))
    }

    fn describe_sub(&self, _x: &GSet, s: &PointSet) -> String {
        format!("{:?}", s.points())
    }

    fn describe_mor(&self, f: &GMor) -> String {
        format!(
            "{} -> {}: {:?}",
            self.describe_obj(&f.source),
            self.describe_obj(&f.target),
            f.map
        )
    }
}

/// A finite set with explicit labels, an object of instance B.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledSet {
    pub labels: Vec<String>,
}

impl LabeledSet {
    pub fn standard(n: usize) -> Self {
        LabeledSet {
            labels: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A morphism `source -> target` of instance B, stored as the set map `rev: target -> source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpMor {
    pub source: LabeledSet,
    pub target: LabeledSet,
    pub rev: Vec<usize>,
}

/// A set partition in restricted-growth form: block index per element, blocks
/// numbered in order of their minimum element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub blocks: Vec<usize>,
}

impl Partition {
    /// Kernel partition of a function given by its values.
    pub fn kernel(values: &[usize]) -> Self {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        let blocks = values
            .iter()
            .map(|v| {
                let n = seen.len();
                *seen.entry(*v).or_insert(n)
            })
            .collect();
        Partition { blocks }
    }

    pub fn discrete(n: usize) -> Self {
        Partition {
            blocks: (0..n).collect(),
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    pub fn block_lists(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (i, &b) in self.blocks.iter().enumerate() {
            out[b].push(i);
        }
        out
    }

    /// Whether `self` refines `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let mut rep: HashMap<usize, usize> = HashMap::new();
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(&a, &b)| *rep.entry(a).or_insert(b) == b)
    }

    /// All partitions of an `n`-set in restricted-growth order.
    pub fn all(n: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; n];
        fn go(i: usize, maxb: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if i == cur.len() {
                out.push(Partition { blocks: cur.clone() });
                return;
            }
            for b in 0..=maxb {
                cur[i] = b;
                go(i + 1, maxb.max(b + 1), cur, out);
            }
        }
        if n == 0 {
            out.push(Partition { blocks: Vec::new() });
        } else {
            go(1, 1, &mut cur, &mut out);
        }
        out
    }
}

/// Union-find over `0..n`, returning the partition of connected classes.
pub(crate) fn join_classes(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Partition {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (a, b) in pairs {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    Partition::kernel(&roots)
}

/// Instance B: the opposite of the category of finite sets.
#[derive(Clone, Debug)]
pub struct OpFinSetCat {
    partition_bound: usize,
}

impl Default for OpFinSetCat {
    fn default() -> Self {
        OpFinSetCat {
            partition_bound: DEFAULT_PARTITION_BOUND,
        }
    }
}

impl OpFinSetCat {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_partition_bound(mut self, bound: usize) -> Self {
        self.partition_bound = bound;
        self
    }

    pub fn set(&self, n: usize) -> LabeledSet {
        LabeledSet::standard(n)
    }

    /// The morphism `source -> target` whose underlying set map is `rev: target -> source`.
    pub fn op_mor(&self, source: &LabeledSet, target: &LabeledSet, rev: Vec<usize>) -> Result<OpMor> {
        if rev.len() != target.len() || rev.iter().any(|&i| i >= source.len()) {
            return Err(Error::Invalid("reversed map has the wrong shape".into()));
        }
        Ok(OpMor {
            source: source.clone(),
            target: target.clone(),
            rev,
        })
    }
}

impl RegularCategory for OpFinSetCat {
    type Obj = LabeledSet;
    type Mor = OpMor;
    type Sub = Partition;

    fn name(&self) -> String {
        "op-finset".into()
    }

    fn source(&self, f: &OpMor) -> LabeledSet {
        f.source.clone()
    }

    fn target(&self, f: &OpMor) -> LabeledSet {
        f.target.clone()
    }

    fn identity(&self, x: &LabeledSet) -> OpMor {
        OpMor {
            source: x.clone(),
            target: x.clone(),
            rev: (0..x.len()).collect(),
        }
    }

    fn compose(&self, g: &OpMor, f: &OpMor) -> OpMor {
        debug_assert_eq!(f.target, g.source);
        OpMor {
            source: f.source.clone(),
            target: g.target.clone(),
            rev: g.rev.iter().map(|&z| f.rev[z]).collect(),
        }
    }

    fn terminal(&self) -> LabeledSet {
        LabeledSet::standard(0)
    }

    fn to_terminal(&self, x: &LabeledSet) -> OpMor {
        OpMor {
            source: x.clone(),
            target: self.terminal(),
            rev: Vec::new(),
        }
    }

    fn product(&self, x: &LabeledSet, y: &LabeledSet) -> LabeledSet {
        let labels = x
            .labels
            .iter()
            .map(|l| format!("0:{l}"))
            .chain(y.labels.iter().map(|l| format!("1:{l}")))
            .collect();
        LabeledSet { labels }
    }

    fn proj1(&self, x: &LabeledSet, y: &LabeledSet) -> OpMor {
        OpMor {
            source: self.product(x, y),
            target: x.clone(),
            rev: (0..x.len()).collect(),
        }
    }

    fn proj2(&self, x: &LabeledSet, y: &LabeledSet) -> OpMor {
        OpMor {
            source: self.product(x, y),
            target: y.clone(),
            rev: (0..y.len()).map(|i| x.len() + i).collect(),
        }
    }

    fn pair(&self, f: &OpMor, g: &OpMor) -> OpMor {
        debug_assert_eq!(f.source, g.source);
        OpMor {
            source: f.source.clone(),
            target: self.product(&f.target, &g.target),
            rev: f.rev.iter().chain(&g.rev).copied().collect(),
        }
    }

    fn subobjects(&self, x: &LabeledSet) -> Result<Vec<Partition>> {
        if x.len() > self.partition_bound {
            return Err(size_limit("set size for partition enumeration", self.partition_bound, x.len()));
        }
        let mut all = Partition::all(x.len());
        all.sort_by_key(|p| p.block_count());
        Ok(all)
    }

    fn sub_leq(&self, _x: &LabeledSet, a: &Partition, b: &Partition) -> bool {
        b.refines(a)
    }

    fn sub_meet(&self, _x: &LabeledSet, a: &Partition, b: &Partition) -> Partition {
        let n = a.blocks.len();
        let mut pairs = Vec::new();
        for p in [a, b] {
            for blk in p.block_lists() {
                for w in blk.windows(2) {
                    pairs.push((w[0], w[1]));
                }
            }
        }
        join_classes(n, pairs)
    }

    fn top(&self, x: &LabeledSet) -> Partition {
        Partition::discrete(x.len())
    }

    fn bottom(&self, x: &LabeledSet) -> Result<Partition> {
        Ok(Partition {
            blocks: vec![0; x.len()],
        })
    }

    /// Refinements of `s`: a partition of each block, combined.
    fn subobjects_above(&self, x: &LabeledSet, s: &Partition) -> Result<Vec<Partition>> {
        if x.len() > self.partition_bound {
            return Err(size_limit("set size for partition enumeration", self.partition_bound, x.len()));
        }
        let blocks = s.block_lists();
        let per_block: Vec<Vec<Partition>> = blocks.iter().map(|b| Partition::all(b.len())).collect();
        let mut out = Vec::new();
        let mut pick = vec![0usize; blocks.len()];
        loop {
            let mut vals = vec![0usize; x.len()];
            let mut offset = 0;
            for (bi, b) in blocks.iter().enumerate() {
                let q = &per_block[bi][pick[bi]];
                for (k, &e) in b.iter().enumerate() {
                    vals[e] = offset + q.blocks[k];
                }
                offset += q.block_count();
            }
            out.push(Partition::kernel(&vals));
            let mut i = 0;
            loop {
                if i == pick.len() {
                    return Ok(out);
                }
                pick[i] += 1;
                if pick[i] < per_block[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    fn sub_object(&self, x: &LabeledSet, s: &Partition) -> (LabeledSet, OpMor) {
        let obj = LabeledSet::standard(s.block_count());
        let incl = OpMor {
            source: obj.clone(),
            target: x.clone(),
            rev: s.blocks.clone(),
        };
        (obj, incl)
    }

    fn image(&self, f: &OpMor) -> Partition {
        Partition::kernel(&f.rev)
    }

    fn sub_image(&self, f: &OpMor, s: &Partition) -> Partition {
        let vals: Vec<usize> = f.rev.iter().map(|&x| s.blocks[x]).collect();
        Partition::kernel(&vals)
    }

    fn preimage(&self, f: &OpMor, s: &Partition) -> Partition {
        let mut pairs = Vec::new();
        for blk in s.block_lists() {
            for w in blk.windows(2) {
                pairs.push((f.rev[w[0]], f.rev[w[1]]));
            }
        }
        join_classes(f.source.len(), pairs)
    }

    fn fiber_product(&self, f: &OpMor, g: &OpMor) -> Partition {
        let n = f.source.len();
        join_classes(
            n + g.source.len(),
            f.rev.iter().zip(&g.rev).map(|(&a, &b)| (a, n + b)),
        )
    }

    fn factor_through_image(&self, f: &OpMor) -> (Partition, LabeledSet, OpMor) {
        let im = self.image(f);
        let k = im.block_count();
        let obj = LabeledSet::standard(k);
        let mut rev = vec![0; k];
        for (y, &b) in im.blocks.iter().enumerate() {
            rev[b] = f.rev[y];
        }
        let e = OpMor {
            source: f.source.clone(),
            target: obj.clone(),
            rev,
        };
        (im, obj, e)
    }

    fn is_surjection(&self, f: &OpMor) -> bool {
        let mut hit = vec![false; f.source.len()];
        for &x in &f.rev {
            if hit[x] {
                return false;
            }
            hit[x] = true;
        }
        true
    }

    fn is_injection(&self, f: &OpMor) -> bool {
        let mut hit = vec![false; f.source.len()];
        for &x in &f.rev {
            hit[x] = true;
        }
        hit.into_iter().all(|h| h)
    }

    fn is_principal(&self, _x: &LabeledSet) -> bool {
        true
    }

    fn underlying_size(&self, x: &LabeledSet) -> usize {
        x.len()
    }

    fn atom_count(&self, _x: &LabeledSet) -> usize {
        1
    }

    fn objects(&self, bound: usize) -> Result<Vec<LabeledSet>> {
        Ok((0..=bound).map(LabeledSet::standard).collect())
    }

    fn morphisms(&self, x: &LabeledSet, y: &LabeledSet) -> Result<Vec<OpMor>> {
        let (n, m) = (x.len(), y.len());
        let total = (n as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if total > 1_000_000 {
            return Err(size_limit("morphism count", 1_000_000, total.min(usize::MAX as u128) as usize));
        }
        let mut out = Vec::new();
        let mut rev = vec![0usize; m];
        if n == 0 && m > 0 {
            return Ok(out);
        }
        loop {
            out.push(OpMor {
                source: x.clone(),
                target: y.clone(),
                rev: rev.clone(),
            });
            let mut i = 0;
            loop {
                if i == m {
                    return Ok(out);
                }
                rev[i] += 1;
                if rev[i] < n {
                    break;
                }
                rev[i] = 0;
                i += 1;
            }
        }
    }

    fn iso_key(&self, f: &OpMor) -> IsoKey {
        let mut fibers = vec![0usize; f.source.len()];
        for &x in &f.rev {
            fibers[x] += 1;
        }
        fibers.sort_unstable();
        fibers
    }

    fn describe_obj(&self, x: &LabeledSet) -> String {
        format!("{{{}}}", x.labels.join(","))
    }

    fn describe_sub(&self, x: &LabeledSet, s: &Partition) -> String {
        let blocks: Vec<String> = s
            .block_lists()
            .iter()
            .map(|b| {
                let ls: Vec<&str> = b.iter().map(|&i| x.labels[i].as_str()).collect();
                format!("{{{}}}", ls.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(","))
    }

    fn describe_mor(&self, f: &OpMor) -> String {
        format!(
            "{} -> {} (set map {:?})",
            self.describe_obj(&f.source),
            self.describe_obj(&f.target),
            f.rev
        )
    }
}

/// A relation from `source` to `target`: a subobject of `target × source`.
pub struct Relation<C: RegularCategory> {
    pub source: C::Obj,
    pub target: C::Obj,
    pub sub: C::Sub,
}

impl<C: RegularCategory> Clone for Relation<C> {
    fn clone(&self) -> Self {
        Relation::new(self.source.clone(), self.target.clone(), self.sub.clone())
    }
}

impl<C: RegularCategory> PartialEq for Relation<C> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.sub == other.sub
    }
}

impl<C: RegularCategory> Eq for Relation<C> {}

impl<C: RegularCategory> Debug for Relation<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Relation")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("sub", &self.sub)
            .finish()
    }
}

/// The composite relation together with `B ×_Y A` and the surjection onto the composite.
#[derive(Clone, Debug)]
pub struct Composite<C: RegularCategory> {
    pub relation: Relation<C>,
    pub intermediate: C::Obj,
    pub surjection: C::Mor,
}

impl<C: RegularCategory> Relation<C> {
    pub fn new(source: C::Obj, target: C::Obj, sub: C::Sub) -> Self {
        Relation { source, target, sub }
    }

    pub fn diagonal(cat: &C, x: &C::Obj) -> Self {
        let id = cat.identity(x);
        let d = cat.pair(&id, &id);
        Relation::new(x.clone(), x.clone(), cat.image(&d))
    }

    /// `{(f x, x)}` for `f: X -> Y`.
    pub fn graph(cat: &C, f: &C::Mor) -> Self {
        let x = cat.source(f);
        let g = cat.pair(f, &cat.identity(&x));
        Relation::new(x, cat.target(f), cat.image(&g))
    }

    pub fn ambient(&self, cat: &C) -> C::Obj {
        cat.product(&self.target, &self.source)
    }
}

/// The canonical isomorphism `X × Y -> Y × X`.
pub fn swap<C: RegularCategory>(cat: &C, x: &C::Obj, y: &C::Obj) -> C::Mor {
    cat.pair(&cat.proj2(x, y), &cat.proj1(x, y))
}

pub fn transpose_rel<C: RegularCategory>(cat: &C, a: &Relation<C>) -> Relation<C> {
    let s = swap(cat, &a.target, &a.source);
    Relation::new(a.target.clone(), a.source.clone(), cat.sub_image(&s, &a.sub))
}

/// `B ∘ A`: the image of `B ×_Y A` in `Z × X`.
pub fn compose_rel<C: RegularCategory>(cat: &C, b: &Relation<C>, a: &Relation<C>) -> Result<Composite<C>> {
    if b.source != a.target {
        return Err(Error::Mismatch("relations are not composable".into()));
    }
    let (x, y, z) = (&a.source, &a.target, &b.target);
    let (a_obj, a_inc) = cat.sub_object(&cat.product(y, x), &a.sub);
    let (b_obj, b_inc) = cat.sub_object(&cat.product(z, y), &b.sub);
    let b_y = cat.compose(&cat.proj2(z, y), &b_inc);
    let a_y = cat.compose(&cat.proj1(y, x), &a_inc);
    let d = cat.fiber_product(&b_y, &a_y);
    let (d_obj, d_inc) = cat.sub_object(&cat.product(&b_obj, &a_obj), &d);
    let to_b = cat.compose(&cat.proj1(&b_obj, &a_obj), &d_inc);
    let to_a = cat.compose(&cat.proj2(&b_obj, &a_obj), &d_inc);
    let to_z = cat.compose(&cat.proj1(z, y), &cat.compose(&b_inc, &to_b));
    let to_x = cat.compose(&cat.proj2(y, x), &cat.compose(&a_inc, &to_a));
    let (c, _, e) = cat.factor_through_image(&cat.pair(&to_z, &to_x));
    Ok(Composite {
        relation: Relation::new(x.clone(), z.clone(), c),
        intermediate: d_obj,
        surjection: e,
    })
}

/// Whether a subobject of the product of `factors` maps onto every factor.
pub fn is_ample<C: RegularCategory>(cat: &C, projections: &[C::Mor], s: &C::Sub) -> bool {
    projections.iter().all(|p| cat.sub_image(p, s) == cat.top(&cat.target(p)))
}

/// Ample subobjects of `X × Y`.
pub fn ample_subobjects<C: RegularCategory>(cat: &C, x: &C::Obj, y: &C::Obj) -> Result<Vec<C::Sub>> {
    let p = [cat.proj1(x, y), cat.proj2(x, y)];
    Ok(cat
        .subobjects(&cat.product(x, y))?
        .into_iter()
        .filter(|s| is_ample(cat, &p, s))
        .collect())
}

/// Ample subobjects of `X ×_Z Y` for `f: X -> Z`, `g: Y -> Z`, as subobjects of `X × Y`.
///
/// Enumerates the subobjects of the fiber product object rather than of `X × Y`.
pub fn ample_in_fiber_product<C: RegularCategory>(cat: &C, f: &C::Mor, g: &C::Mor) -> Result<Vec<C::Sub>> {
    let (x, y) = (cat.source(f), cat.source(g));
    let prod = cat.product(&x, &y);
    let fp = cat.fiber_product(f, g);
    let (fp_obj, inc) = cat.sub_object(&prod, &fp);
    let p1 = cat.compose(&cat.proj1(&x, &y), &inc);
    let p2 = cat.compose(&cat.proj2(&x, &y), &inc);
    let mut out: Vec<C::Sub> = cat
        .subobjects(&fp_obj)?
        .into_iter()
        .filter(|s| is_ample(cat, &[p1.clone(), p2.clone()], s))
        .map(|s| cat.sub_image(&inc, &s))
        .collect();
    out.sort();
    Ok(out)
}

/// Base change of `f: Y -> X` along `g: X' -> X`: the object `Y ×_X X'` and `f': Y ×_X X' -> X'`.
pub fn base_change<C: RegularCategory>(cat: &C, f: &C::Mor, g: &C::Mor) -> (C::Obj, C::Mor, C::Mor) {
    let (y, xp) = (cat.source(f), cat.source(g));
    let fp = cat.fiber_product(f, g);
    let (obj, inc) = cat.sub_object(&cat.product(&y, &xp), &fp);
    let f_prime = cat.compose(&cat.proj2(&y, &xp), &inc);
    let g_prime = cat.compose(&cat.proj1(&y, &xp), &inc);
    (obj, f_prime, g_prime)
}

/// Containment of relations with the same endpoints.
pub fn rel_leq<C: RegularCategory>(cat: &C, a: &Relation<C>, b: &Relation<C>) -> bool {
    cat.sub_leq(&a.ambient(cat), &a.sub, &b.sub)
}

pub fn is_equivalence_relation<C: RegularCategory>(cat: &C, r: &Relation<C>) -> Result<bool> {
    if r.source != r.target {
        return Ok(false);
    }
    let d = Relation::diagonal(cat, &r.source);
    if !rel_leq(cat, &d, r) {
        return Ok(false);
    }
    if transpose_rel(cat, r).sub != r.sub {
        return Ok(false);
    }
    let rr = compose_rel(cat, r, r)?.relation;
    Ok(rel_leq(cat, &rr, r))
}

/// The restriction `f ∘ incl` of `f` to a subobject of its source.
pub fn restrict<C: RegularCategory>(cat: &C, f: &C::Mor, s: &C::Sub) -> (C::Obj, C::Mor) {
    let (obj, inc) = cat.sub_object(&cat.source(f), s);
    let r = cat.compose(f, &inc);
    (obj, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_small_sets() {
        assert_eq!(Partition::all(3).len(), 5);
        assert_eq!(Partition::all(4).len(), 15);
        assert_eq!(Partition::all(0).len(), 1);
    }

    #[test]
    fn pointset_basics() {
        let mut s = PointSet::empty(130);
        s.insert(3);
        s.insert(129);
        assert_eq!(s.points(), vec![3, 129]);
        assert!(s.is_subset(&PointSet::full(130)));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn product_sizes() {
        let a = FinGSetCat::trivial_group();
        assert_eq!(a.product(&a.points(2), &a.points(3)).points(), 6);
        let b = OpFinSetCat::new();
        assert_eq!(b.product(&b.set(1), &b.set(1)).len(), 2);
    }

    #[test]
    fn ample_count_two_by_two() {
        let a = FinGSetCat::trivial_group();
        let two = a.points(2);
        assert_eq!(ample_subobjects(&a, &two, &two).unwrap().len(), 7);
    }

    #[test]
    fn pushout_size() {
        let b = OpFinSetCat::new();
        let x = b.set(1);
        let y = b.set(2);
        let xp = b.set(1);
        // Injection {x} -> {y1,y2} in sets is a morphism Y -> X in the opposite category.
        let f = b.op_mor(&y, &x, vec![0]).unwrap();
        let g = b.op_mor(&xp, &x, vec![0]).unwrap();
        let fp = b.fiber_product(&f, &g);
        assert_eq!(fp.block_count(), 2);
    }

    #[test]
    fn op_image_is_kernel_partition() {
        let b = OpFinSetCat::new();
        let f = b.op_mor(&b.set(1), &b.set(2), vec![0, 0]).unwrap();
        assert_eq!(b.image(&f), Partition { blocks: vec![0, 0] });
    }
}
