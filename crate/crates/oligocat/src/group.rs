//! Finite permutation groups, finite G-sets and equivariant maps.
//!
//! Groups are given by generators acting on `0..degree`. A [`GSet`] stores one
//! permutation of its points per generator of its group; every group element
//! then acts through any word representing it, and [`element_actions`] checks
//! that this is well defined.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::OnceLock;

use crate::error::{size_limit, Error, Result};

/// Default bound on the degree of a group whose elements are enumerated.
pub const DEFAULT_DEGREE_BOUND: usize = 10;
/// Default bound on the number of points of a G-set whose automorphisms are enumerated.
pub const DEFAULT_AUT_POINT_BOUND: usize = 12;
/// Hard cap on the number of elements materialized for any group.
pub const ELEMENT_CAP: usize = 200_000;

/// A bijection of `0..n`, stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::Invalid(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation of `0..n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n || used[a] {
                    return Err(Error::Invalid(format!(
                        "cycle {cycle:?} is out of range or overlaps another cycle"
                    )));
                }
                used[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Disjoint cycles of length at least two, each starting at its minimum.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut i = self.images[start];
            while i != start {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }
}

/// A finite permutation group given by generators.
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: OnceLock<std::result::Result<Vec<Permutation>, Error>>,
    index: OnceLock<HashMap<Permutation, usize>>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let g = PermGroup::new_unchecked(self.degree, self.generators.clone());
        if let Some(e) = self.elements.get() {
            let _ = g.elements.set(e.clone());
        }
        g
    }
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generators == other.generators
    }
}

impl Eq for PermGroup {}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::Invalid("group degree must be positive".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::Invalid(format!(
                "generator {:?} does not have degree {degree}",
                g.images
            )));
        }
        Ok(Self::new_unchecked(degree, generators))
    }

    fn new_unchecked(degree: usize, generators: Vec<Permutation>) -> Self {
        PermGroup {
            degree,
            generators,
            elements: OnceLock::new(),
            index: OnceLock::new(),
        }
    }

    pub fn from_cycle_generators(degree: usize, gens: &[Vec<Vec<usize>>]) -> Result<Self> {
        let perms = gens
            .iter()
            .map(|c| Permutation::from_cycles(degree, c))
            .collect::<Result<Vec<_>>>()?;
        PermGroup::new(degree, perms)
    }

    pub fn trivial() -> Self {
        Self::new_unchecked(1, Vec::new())
    }

    pub fn cyclic(n: usize) -> Self {
        let gen: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::new_unchecked(n, vec![Permutation { images: gen }])
    }

    pub fn symmetric(n: usize) -> Self {
        let mut gens = Vec::new();
        if n >= 2 {
            gens.push(Permutation::from_cycles(n, &[vec![0, 1]]).unwrap());
        }
        if n >= 3 {
            let c: Vec<usize> = (0..n).collect();
            gens.push(Permutation::from_cycles(n, &[c]).unwrap());
        }
        Self::new_unchecked(n.max(1), gens)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// All elements in lexicographic order of their image arrays.
    pub fn elements(&self) -> Result<&[Permutation]> {
        self.elements_bounded(DEFAULT_DEGREE_BOUND)
    }

    pub fn elements_bounded(&self, degree_bound: usize) -> Result<&[Permutation]> {
        if self.elements.get().is_none() && self.degree > degree_bound {
            return Err(size_limit("group degree", degree_bound, self.degree));
        }
        self.elements
            .get_or_init(|| closure(self.degree, &self.generators))
            .as_ref()
            .map(|v| v.as_slice())
            .map_err(|e| e.clone())
    }

    pub fn order(&self) -> Result<usize> {
        Ok(self.elements()?.len())
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        let index = self.index.get_or_init(|| {
            self.elements()
                .map(|els| {
                    els.iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), i))
                        .collect()
                })
                .unwrap_or_default()
        });
        index.get(p).copied()
    }

    /// A group whose element list is already known.
    pub fn with_elements(degree: usize, generators: Vec<Permutation>, mut elements: Vec<Permutation>) -> Self {
        elements.sort();
        let g = Self::new_unchecked(degree, generators);
        let _ = g.elements.set(Ok(elements));
        g
    }

    /// Every subgroup, as a sorted list of element indices; sorted by order, then lexicographically.
    pub fn subgroups(&self) -> Result<Vec<Vec<usize>>> {
        let els = self.elements()?;
        let id = self.index_of(&Permutation::identity(self.degree)).unwrap();
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        found.insert(vec![id]);
        queue.push_back(vec![id]);
        while let Some(h) = queue.pop_front() {
            let hset: BTreeSet<usize> = h.iter().copied().collect();
            for g in 0..els.len() {
                if hset.contains(&g) {
                    continue;
                }
                let mut gens: Vec<Permutation> = h.iter().map(|&i| els[i].clone()).collect();
                gens.push(els[g].clone());
                let k = self.closure_indices(&gens)?;
                if found.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        Ok(out)
    }

    fn closure_indices(&self, gens: &[Permutation]) -> Result<Vec<usize>> {
        let mut idx: Vec<usize> = closure(self.degree, gens)?
            .iter()
            .map(|p| self.index_of(p).expect("closure stays inside the group"))
            .collect();
        idx.sort_unstable();
        Ok(idx)
    }

    /// Smallest conjugate (as a sorted index list) of a subgroup.
    pub fn conjugacy_representative(&self, h: &[usize]) -> Result<Vec<usize>> {
        let els = self.elements()?;
        let mut best: Option<Vec<usize>> = None;
        for g in els {
            let gi = g.inverse();
            let mut conj: Vec<usize> = h
                .iter()
                .map(|&x| self.index_of(&g.compose(&els[x]).compose(&gi)).unwrap())
                .collect();
            conj.sort_unstable();
            if best.as_ref().is_none_or(|b| conj < *b) {
                best = Some(conj);
            }
        }
        Ok(best.unwrap())
    }

    /// Subgroups up to conjugacy, one representative each.
    pub fn subgroup_classes(&self) -> Result<Vec<Vec<usize>>> {
        let mut reps = BTreeSet::new();
        for h in self.subgroups()? {
            reps.insert(self.conjugacy_representative(&h)?);
        }
        let mut out: Vec<Vec<usize>> = reps.into_iter().collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        Ok(out)
    }
}

fn closure(degree: usize, gens: &[Permutation]) -> Result<Vec<Permutation>> {
    let id = Permutation::identity(degree);
    let mut seen: std::collections::HashSet<Permutation> = std::collections::HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = g.compose(&p);
            if !seen.contains(&q) {
                if seen.len() >= ELEMENT_CAP {
                    return Err(size_limit("group order", ELEMENT_CAP, seen.len() + 1));
                }
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    let mut out: Vec<Permutation> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// A finite set with an action of a fixed [`PermGroup`]: one point permutation per generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GSet {
    points: usize,
    action: Vec<Vec<usize>>,
}

impl GSet {
    /// Validates shapes and that the action is well defined on group elements.
    pub fn new(group: &PermGroup, points: usize, action: Vec<Vec<usize>>) -> Result<Self> {
        if action.len() != group.generators().len() {
            return Err(Error::Invalid(format!(
                "G-set lists {} generator actions, group has {} generators",
                action.len(),
                group.generators().len()
            )));
        }
        for a in &action {
            if a.len() != points {
                return Err(Error::Invalid("action array has the wrong length".into()));
            }
            Permutation::from_images(a.clone())?;
        }
        let x = GSet { points, action };
        element_actions(group, &x)?;
        Ok(x)
    }

    /// `m` points, every generator acting trivially.
    pub fn trivial(group: &PermGroup, m: usize) -> Self {
        GSet {
            points: m,
            action: vec![(0..m).collect(); group.generators().len()],
        }
    }

    /// The group acting on its own elements by left multiplication.
    pub fn regular(group: &PermGroup) -> Result<Self> {
        let id = group.index_of(&Permutation::identity(group.degree())).unwrap();
        Self::coset_space(group, &[id])
    }

    /// The left cosets `G/H` of a subgroup given by element indices; the coset `H` is point 0.
    pub fn coset_space(group: &PermGroup, h: &[usize]) -> Result<Self> {
        let els = group.elements()?;
        let hs: Vec<&Permutation> = h.iter().map(|&i| &els[i]).collect();
        let mut coset_of = vec![usize::MAX; els.len()];
        let mut count = 0;
        // Enumerate cosets starting from the identity so that H is point 0.
        let id_idx = group.index_of(&Permutation::identity(group.degree())).unwrap();
        let order: Vec<usize> = std::iter::once(id_idx)
            .chain((0..els.len()).filter(|&i| i != id_idx))
            .collect();
        for g in order {
            if coset_of[g] != usize::MAX {
                continue;
            }
            for hh in &hs {
                let e = group.index_of(&els[g].compose(hh)).unwrap();
                coset_of[e] = count;
            }
            count += 1;
        }
        let mut action = Vec::new();
        for s in group.generators() {
            let mut img = vec![0; count];
            for (g, el) in els.iter().enumerate() {
                let sg = group.index_of(&s.compose(el)).unwrap();
                img[coset_of[g]] = coset_of[sg];
            }
            action.push(img);
        }
        Ok(GSet {
            points: count,
            action,
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn action(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Image of point `x` under generator `g`.
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g][x]
    }

    pub fn disjoint_union(&self, other: &GSet) -> GSet {
        let n = self.points;
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|&y| y + n)).collect())
            .collect();
        GSet {
            points: n + other.points,
            action,
        }
    }

    /// Cartesian product with the diagonal action; `(x, y)` is point `x * |other| + y`.
    pub fn product(&self, other: &GSet) -> GSet {
        let m = other.points;
        let action = self
            .action
            .iter()
            .zip(&other.action)
            .map(|(a, b)| {
                let mut img = vec![0; self.points * m];
                for x in 0..self.points {
                    for y in 0..m {
                        img[x * m + y] = a[x] * m + b[y];
                    }
                }
                img
            })
            .collect();
        GSet {
            points: self.points * m,
            action,
        }
    }

    /// Orbit partition, each orbit sorted, orbits ordered by minimum.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.points];
        let mut out = Vec::new();
        for start in 0..self.points {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut orbit = vec![start];
            label[start] = id;
            let mut k = 0;
            while k < orbit.len() {
                let x = orbit[k];
                for a in &self.action {
                    let y = a[x];
                    if label[y] == usize::MAX {
                        label[y] = id;
                        orbit.push(y);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// Number of orbits.
    pub fn orbit_count(&self) -> usize {
        self.orbits().len()
    }

    /// Orbit index of every point.
    pub fn orbit_labels(&self) -> Vec<usize> {
        let mut label = vec![0; self.points];
        for (i, o) in self.orbits().iter().enumerate() {
            for &x in o {
                label[x] = i;
            }
        }
        label
    }

    /// Restriction to a stable subset, points renumbered in increasing order.
    pub fn restrict(&self, subset: &[usize]) -> GSet {
        let mut pos = vec![usize::MAX; self.points];
        for (i, &x) in subset.iter().enumerate() {
            pos[x] = i;
        }
        let action = self
            .action
            .iter()
            .map(|a| subset.iter().map(|&x| pos[a[x]]).collect())
            .collect();
        GSet {
            points: subset.len(),
            action,
        }
    }

    /// Relabels the points of one orbit breadth-first from `base`, following
    /// generators in order. Returns the points in their new order.
    pub fn bfs_order(&self, base: usize) -> Vec<usize> {
        let mut seen = vec![false; self.points];
        let mut order = vec![base];
        seen[base] = true;
        let mut k = 0;
        while k < order.len() {
            let x = order[k];
            for a in &self.action {
                let y = a[x];
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
            k += 1;
        }
        order
    }
}

/// The permutation of `x`'s points induced by every group element, aligned with
/// `group.elements()`. Fails if two words for one element act differently.
pub fn element_actions(group: &PermGroup, x: &GSet) -> Result<Vec<Vec<usize>>> {
    let els = group.elements()?;
    let mut acts: Vec<Option<Vec<usize>>> = vec![None; els.len()];
    let id = group.index_of(&Permutation::identity(group.degree())).unwrap();
    acts[id] = Some((0..x.points).collect());
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        let cur = acts[e].clone().unwrap();
        for (gi, g) in group.generators().iter().enumerate() {
            let f = group.index_of(&g.compose(&els[e])).unwrap();
            let img: Vec<usize> = cur.iter().map(|&p| x.action[gi][p]).collect();
            match &acts[f] {
                None => {
                    acts[f] = Some(img);
                    queue.push_back(f);
                }
                Some(prev) if *prev != img => {
                    return Err(Error::Invalid(format!(
                        "action is not well defined: group element {:?} acts in two ways",
                        els[f].images()
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(acts.into_iter().map(|a| a.unwrap()).collect())
}

/// The transitive G-sets up to isomorphism, one per conjugacy class of subgroups, smallest first.
pub fn transitive_gsets(group: &PermGroup) -> Result<Vec<GSet>> {
    let mut out = group
        .subgroup_classes()?
        .iter()
        .map(|h| GSet::coset_space(group, h))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|x| x.points);
    Ok(out)
}

/// An equivariant map between two G-sets over the same group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GMap {
    pub source: GSet,
    pub target: GSet,
    pub map: Vec<usize>,
}

impl GMap {
    pub fn new(source: GSet, target: GSet, map: Vec<usize>) -> Result<Self> {
        let f = GMap {
            source,
            target,
            map,
        };
        if f.map.len() != f.source.points || f.map.iter().any(|&y| y >= f.target.points) {
            return Err(Error::Invalid("map has the wrong shape".into()));
        }
        if !f.is_equivariant() {
            return Err(Error::Invalid("map is not equivariant".into()));
        }
        Ok(f)
    }

    pub fn is_equivariant(&self) -> bool {
        self.source
            .action
            .iter()
            .zip(&self.target.action)
            .all(|(a, b)| (0..self.source.points).all(|x| self.map[a[x]] == b[self.map[x]]))
    }
}

/// All equivariant bijections `x -> y`; stops after the first when `first_only`.
fn equivariant_bijections(
    group: &PermGroup,
    x: &GSet,
    y: &GSet,
    first_only: bool,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    if x.points != y.points {
        return Ok(Vec::new());
    }
    let xo = x.orbits();
    let yo = y.orbits();
    let mut xs: Vec<usize> = xo.iter().map(|o| o.len()).collect();
    let mut ys: Vec<usize> = yo.iter().map(|o| o.len()).collect();
    xs.sort_unstable();
    ys.sort_unstable();
    if xs != ys {
        return Ok(Vec::new());
    }
    let xa = element_actions(group, x)?;
    let ya = element_actions(group, y)?;
    let stab = |acts: &[Vec<usize>], p: usize| -> Vec<usize> {
        (0..acts.len()).filter(|&g| acts[g][p] == p).collect()
    };
    let reps: Vec<usize> = xo.iter().map(|o| o[0]).collect();
    let rep_stab: Vec<Vec<usize>> = reps.iter().map(|&r| stab(&xa, r)).collect();
    let y_stab: Vec<Vec<usize>> = (0..y.points).map(|p| stab(&ya, p)).collect();
    let y_orbit = y.orbit_labels();

    struct St<'a> {
        xo: &'a [Vec<usize>],
        reps: &'a [usize],
        rep_stab: &'a [Vec<usize>],
        y_stab: &'a [Vec<usize>],
        y_orbit: &'a [usize],
        yo: &'a [Vec<usize>],
        xa: &'a [Vec<usize>],
        ya: &'a [Vec<usize>],
        first_only: bool,
        cap: usize,
    }
    fn go(
        st: &St,
        i: usize,
        used: &mut Vec<bool>,
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if i == st.reps.len() {
            if out.len() >= st.cap {
                return Err(size_limit("automorphism count", st.cap, out.len() + 1));
            }
            out.push(map.clone());
            return Ok(());
        }
        let r = st.reps[i];
        for (yi, orbit) in st.yo.iter().enumerate() {
            if used[yi] || orbit.len() != st.xo[i].len() {
                continue;
            }
            for &cand in orbit {
                if st.y_stab[cand] != st.rep_stab[i] {
                    continue;
                }
                debug_assert_eq!(st.y_orbit[cand], yi);
                for g in 0..st.xa.len() {
                    map[st.xa[g][r]] = st.ya[g][cand];
                }
                used[yi] = true;
                go(st, i + 1, used, map, out)?;
                used[yi] = false;
                if st.first_only && !out.is_empty() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
    let st = St {
        xo: &xo,
        reps: &reps,
        rep_stab: &rep_stab,
        y_stab: &y_stab,
        y_orbit: &y_orbit,
        yo: &yo,
        xa: &xa,
        ya: &ya,
        first_only,
        cap,
    };
    let mut out = Vec::new();
    let mut used = vec![false; yo.len()];
    let mut map = vec![0; x.points];
    go(&st, 0, &mut used, &mut map, &mut out)?;
    Ok(out)
}

/// The automorphism group of a G-set, as a permutation group on its points.
pub fn aut_gset(group: &PermGroup, x: &GSet) -> Result<PermGroup> {
    aut_gset_bounded(group, x, DEFAULT_AUT_POINT_BOUND)
}

pub fn aut_gset_bounded(group: &PermGroup, x: &GSet, point_bound: usize) -> Result<PermGroup> {
    if x.points > point_bound {
        return Err(size_limit("G-set points", point_bound, x.points));
    }
    let n = x.points.max(1);
    let elements: Vec<Permutation> = equivariant_bijections(group, x, x, false, ELEMENT_CAP)?
        .into_iter()
        .map(|m| {
            if x.points == 0 {
                Permutation::identity(1)
            } else {
                Permutation { images: m }
            }
        })
        .collect();
    // Greedy generating set.
    let mut gens: Vec<Permutation> = Vec::new();
    let mut span: std::collections::HashSet<Permutation> =
        std::iter::once(Permutation::identity(n)).collect();
    for e in &elements {
        if !span.contains(e) {
            gens.push(e.clone());
            span = closure(n, &gens)?.into_iter().collect();
        }
    }
    Ok(PermGroup::with_elements(n, gens, elements))
}

/// An equivariant bijection `x -> y`, or `None` if the G-sets are not isomorphic.
pub fn are_isomorphic(group: &PermGroup, x: &GSet, y: &GSet) -> Result<Option<Vec<usize>>> {
    Ok(equivariant_bijections(group, x, y, true, 1)?.into_iter().next())
}

/// All equivariant maps `x -> y`.
pub fn equivariant_maps(group: &PermGroup, x: &GSet, y: &GSet) -> Result<Vec<Vec<usize>>> {
    let xo = x.orbits();
    let xa = element_actions(group, x)?;
    let ya = element_actions(group, y)?;
    let mut choices: Vec<Vec<usize>> = Vec::new();
    for o in &xo {
        let r = o[0];
        let st: Vec<usize> = (0..xa.len()).filter(|&g| xa[g][r] == r).collect();
        choices.push(
            (0..y.points)
                .filter(|&p| st.iter().all(|&g| ya[g][p] == p))
                .collect(),
        );
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; xo.len()];
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(out);
    }
    loop {
        let mut map = vec![0; x.points];
        for (i, o) in xo.iter().enumerate() {
            let target = choices[i][pick[i]];
            for g in 0..xa.len() {
                map[xa[g][o[0]]] = ya[g][target];
            }
        }
        out.push(map);
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> PermGroup {
        PermGroup::cyclic(2)
    }

    #[test]
    fn enumerate_small_groups() {
        assert_eq!(PermGroup::trivial().order().unwrap(), 1);
        assert_eq!(z2().order().unwrap(), 2);
        let s3 = PermGroup::from_cycle_generators(3, &[vec![vec![0, 1]], vec![vec![0, 1, 2]]]).unwrap();
        assert_eq!(s3.order().unwrap(), 6);
    }

    #[test]
    fn degree_bound_is_enforced() {
        let big = PermGroup::symmetric(11);
        assert!(matches!(big.elements(), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn orbits_of_diagonal_action() {
        let g = z2();
        let reg = GSet::regular(&g).unwrap();
        assert_eq!(reg.orbit_count(), 1);
        let sq = reg.product(&reg);
        assert_eq!(sq.orbits(), vec![vec![0, 3], vec![1, 2]]);
        assert_eq!(GSet::trivial(&g, 3).orbit_count(), 3);
    }

    #[test]
    fn automorphism_groups() {
        let g = z2();
        let reg = GSet::regular(&g).unwrap();
        assert_eq!(aut_gset(&g, &reg).unwrap().order().unwrap(), 2);
        assert_eq!(aut_gset(&g, &reg.disjoint_union(&reg)).unwrap().order().unwrap(), 8);
        let t = PermGroup::trivial();
        assert_eq!(aut_gset(&t, &GSet::trivial(&t, 4)).unwrap().order().unwrap(), 24);
    }

    #[test]
    fn isomorphism_tests() {
        let g = z2();
        let reg = GSet::regular(&g).unwrap();
        let sq = reg.product(&reg);
        let o1 = sq.restrict(&[0, 3]);
        assert!(are_isomorphic(&g, &o1, &reg).unwrap().is_some());
        assert!(are_isomorphic(&g, &GSet::trivial(&g, 2), &reg).unwrap().is_none());
    }

    #[test]
    fn inconsistent_action_is_rejected() {
        // Z/2 generated by (01); an action of order 3 cannot factor through it.
        let g = z2();
        assert!(GSet::new(&g, 3, vec![vec![1, 2, 0]]).is_err());
    }

    #[test]
    fn transitive_sets_of_s3() {
        let s3 = PermGroup::symmetric(3);
        let sizes: Vec<usize> = transitive_gsets(&s3).unwrap().iter().map(|x| x.points()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 6]);
    }

    #[test]
    fn equivariant_maps_count() {
        let g = z2();
        let reg = GSet::regular(&g).unwrap();
        let pt = GSet::trivial(&g, 1);
        assert_eq!(equivariant_maps(&g, &reg, &pt).unwrap().len(), 1);
        assert_eq!(equivariant_maps(&g, &pt, &reg).unwrap().len(), 0);
        assert_eq!(equivariant_maps(&g, &reg, &reg).unwrap().len(), 2);
    }
}
