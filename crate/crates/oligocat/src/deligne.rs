//! Partition diagrams with the classical stacking rule, kept independent of the
//! relation calculus so that it can serve as an oracle for it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::measure::{TPowerDegree, Witness};
use crate::regcat::{OpFinSetCat, Partition};
use crate::ring::Poly;
use crate::tensor::{knop_compose, KnopMor};

/// A partition of `top ⊔ bottom`; points `0..top` are the top row, the rest the bottom row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionDiagram {
    pub top: usize,
    pub bottom: usize,
    /// Block label of each point, in restricted-growth form.
    pub blocks: Vec<usize>,
}

fn normalize(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let n = map.len();
            *map.entry(*l).or_insert(n)
        })
        .collect()
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl PartitionDiagram {
    pub fn new(top: usize, bottom: usize, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != top + bottom {
            return Err(Error::Invalid(format!(
                "diagram on {top}+{bottom} points needs {} labels, got {}",
                top + bottom,
                labels.len()
            )));
        }
        Ok(PartitionDiagram {
            top,
            bottom,
            blocks: normalize(&labels),
        })
    }

    pub fn identity(n: usize) -> Self {
        let labels = (0..n).chain(0..n).collect::<Vec<_>>();
        PartitionDiagram::new(n, n, labels).expect("sizes match")
    }

    /// Every diagram with the given row sizes.
    pub fn all(top: usize, bottom: usize) -> Vec<Self> {
        let n = top + bottom;
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        fn go(n: usize, cur: &mut Vec<usize>, max: usize, top: usize, bottom: usize, out: &mut Vec<PartitionDiagram>) {
            if cur.len() == n {
                out.push(PartitionDiagram {
                    top,
                    bottom,
                    blocks: cur.clone(),
                });
                return;
            }
            for l in 0..=max {
                cur.push(l);
                go(n, cur, if l == max { max + 1 } else { max }, top, bottom, out);
                cur.pop();
            }
        }
        go(n, &mut cur, 0, top, bottom, &mut out);
        out
    }

    /// `self ∘ other`: `other` has rows (middle, bottom), `self` has rows (top, middle).
    /// Returns the number of blocks lying entirely in the middle row and the result.
    pub fn compose(&self, other: &PartitionDiagram) -> Result<(usize, PartitionDiagram)> {
        if self.bottom != other.top {
            return Err(Error::Mismatch("middle rows differ".into()));
        }
        let (t, m, b) = (self.top, self.bottom, other.bottom);
        // Layers: top 0..t, middle t..t+m, bottom t+m..t+m+b.
        let mut dsu = Dsu((0..t + m + b).collect());
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (i, &l) in self.blocks.iter().enumerate() {
            match first.get(&l) {
                Some(&j) => dsu.union(i, j),
                None => {
                    first.insert(l, i);
                }
            }
        }
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (i, &l) in other.blocks.iter().enumerate() {
            let p = t + i;
            match first.get(&l) {
                Some(&j) => dsu.union(p, j),
                None => {
                    first.insert(l, p);
                }
            }
        }
        let mut outer = std::collections::HashSet::new();
        for p in (0..t).chain(t + m..t + m + b) {
            outer.insert(dsu.find(p));
        }
        let mut middle = std::collections::HashSet::new();
        for p in t..t + m {
            let r = dsu.find(p);
            if !outer.contains(&r) {
                middle.insert(r);
            }
        }
        let labels: Vec<usize> = (0..t).chain(t + m..t + m + b).map(|p| dsu.find(p)).collect();
        Ok((middle.len(), PartitionDiagram::new(t, b, labels)?))
    }
}

/// Outcome of comparing relation composition in instance B under `ν_t` with diagram stacking.
#[derive(Clone, Debug, Default)]
pub struct DeligneReport {
    pub bound: usize,
    pub pairs: usize,
    pub failures: Vec<Witness>,
}

impl DeligneReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The diagram of a relation `A ⊆ Y × X` in instance B: top row `Y`, bottom row `X`.
pub fn diagram_of(y: usize, x: usize, a: &Partition) -> Result<PartitionDiagram> {
    PartitionDiagram::new(y, x, a.blocks.clone())
}

/// `knop_compose` with `ν_t` against [`PartitionDiagram::compose`] on every pair of
/// diagrams whose three layers have at most `bound` points.
pub fn compare_with_knop(bound: usize) -> Result<DeligneReport> {
    let cat = OpFinSetCat::new();
    let mut rep = DeligneReport {
        bound,
        ..DeligneReport::default()
    };
    for x in 0..=bound {
        for y in 0..=bound {
            let (ox, oy) = (cat.set(x), cat.set(y));
            let lower = PartitionDiagram::all(y, x);
            for z in 0..=bound {
                let oz = cat.set(z);
                let upper = PartitionDiagram::all(z, y);
                for b in &upper {
                    let kb = KnopMor::<_, Poly>::basis(&cat, &oy, &oz, Partition { blocks: b.blocks.clone() })?;
                    for a in &lower {
                        rep.pairs += 1;
                        let ka = KnopMor::<_, Poly>::basis(&cat, &ox, &oy, Partition { blocks: a.blocks.clone() })?;
                        let got = knop_compose(&cat, &kb, &ka, &TPowerDegree)?;
                        let (k, d) = b.compose(a)?;
                        let mut want = KnopMor::zero(&ox, &oz);
                        want.add_term(Partition { blocks: d.blocks }, Poly::t_pow(k));
                        if got != want && rep.failures.len() < 20 {
                            let shown: Vec<String> = got.terms.iter().map(|(p, c)| format!("{c}·{:?}", p.blocks)).collect();
                            rep.failures.push(Witness {
                                axiom: "deligne".into(),
                                detail: format!(
                                    "{:?} ∘ {:?}: relations give [{}], diagrams give t^{k}·{:?}",
                                    b.blocks,
                                    a.blocks,
                                    shown.join(" + "),
                                    want.terms.keys().next().map(|p| p.blocks.clone()).unwrap_or_default()
                                ),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_neutral() {
        for d in PartitionDiagram::all(2, 1) {
            assert_eq!(PartitionDiagram::identity(2).compose(&d).unwrap(), (0, d.clone()));
            assert_eq!(d.compose(&PartitionDiagram::identity(1)).unwrap(), (0, d));
        }
    }

    #[test]
    fn singleton_loop() {
        let d = PartitionDiagram::new(1, 1, vec![0, 1]).unwrap();
        let (k, r) = d.compose(&d).unwrap();
        assert_eq!(k, 1);
        assert_eq!(r, d);
    }

    #[test]
    fn singleton_relations_compose_with_one_factor_of_t() {
        let cat = OpFinSetCat::new();
        let one = cat.set(1);
        let split = Partition { blocks: vec![0, 1] };
        let a = KnopMor::<_, Poly>::basis(&cat, &one, &one, split.clone()).unwrap();
        let c = knop_compose(&cat, &a, &a, &TPowerDegree).unwrap();
        assert_eq!(c.terms.into_iter().collect::<Vec<_>>(), vec![(split, Poly::t_pow(1))]);
    }

    #[test]
    fn diagram_counts_are_bell_numbers() {
        assert_eq!(PartitionDiagram::all(1, 1).len(), 2);
        assert_eq!(PartitionDiagram::all(2, 2).len(), 15);
        assert_eq!(PartitionDiagram::all(3, 3).len(), 203);
    }
}
