//! Finite posets, their Möbius functions, and Möbius inversion.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::regcat::RegularCategory;
use crate::ring::Ring;

/// A finite poset on `0..n` given by its comparison table.
#[derive(Debug)]
pub struct FinitePoset {
    leq: Vec<Vec<bool>>,
    memo: Mutex<HashMap<(usize, usize), BigInt>>,
}

impl Clone for FinitePoset {
    fn clone(&self) -> Self {
        FinitePoset {
            leq: self.leq.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

impl FinitePoset {
    /// Builds a poset from a comparison, checking the partial order axioms.
    pub fn new(n: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let table: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| leq(i, j)).collect()).collect();
        for i in 0..n {
            if !table[i][i] {
                return Err(Error::Invalid(format!("element {i} is not below itself")));
            }
            for j in 0..n {
                if i != j && table[i][j] && table[j][i] {
                    return Err(Error::Invalid(format!("elements {i} and {j} violate antisymmetry")));
                }
                if table[i][j] {
                    for k in 0..n {
                        if table[j][k] && !table[i][k] {
                            return Err(Error::Invalid(format!(
                                "elements {i} <= {j} <= {k} violate transitivity"
                            )));
                        }
                    }
                }
            }
        }
        Ok(FinitePoset {
            leq: table,
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// The subobject lattice of `x`, elements in the category's canonical order.
    pub fn of_subobjects<C: RegularCategory>(cat: &C, x: &C::Obj) -> Result<(Self, Vec<C::Sub>)> {
        let subs = cat.subobjects(x)?;
        let p = FinitePoset::new(subs.len(), |i, j| cat.sub_leq(x, &subs[i], &subs[j]))?;
        Ok((p, subs))
    }

    /// Boolean lattice of subsets of an `n`-set, elements indexed by bitmask.
    pub fn boolean(n: usize) -> Self {
        FinitePoset::new(1 << n, |a, b| a & !b == 0).expect("subset order is a partial order")
    }

    /// A chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        FinitePoset::new(n, |a, b| a <= b).expect("a chain is a partial order")
    }

    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.leq[x][y]
    }

    /// Elements `z` with `x <= z <= y`.
    pub fn interval(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.len()).filter(|&z| self.leq[x][z] && self.leq[z][y]).collect()
    }

    /// `μ̃(x, y)`, defined for `x <= y`.
    pub fn moebius(&self, x: usize, y: usize) -> Result<BigInt> {
        if x >= self.len() || y >= self.len() {
            return Err(Error::Invalid("element out of range".into()));
        }
        if !self.leq[x][y] {
            return Err(Error::Domain(format!("element {x} is not below {y}")));
        }
        if let Some(v) = self.memo.lock().unwrap().get(&(x, y)) {
            return Ok(v.clone());
        }
        // μ̃(x, z) for every z in [x, y], by the recursion from x upwards.
        let mut iv = self.interval(x, y);
        iv.sort_by_key(|&z| self.interval(x, z).len());
        let mut vals: HashMap<usize, BigInt> = HashMap::new();
        for &z in &iv {
            let v = if z == x {
                BigInt::one()
            } else {
                let s: BigInt = iv
                    .iter()
                    .filter(|&&w| w != z && self.leq[w][z])
                    .map(|w| vals[w].clone())
                    .sum();
                -s
            };
            vals.insert(z, v);
        }
        let mut memo = self.memo.lock().unwrap();
        for (z, v) in &vals {
            memo.insert((x, *z), v.clone());
        }
        Ok(vals[&y].clone())
    }

    /// `g(y) = Σ_{x <= y} μ̃(x, y) f(x)`.
    pub fn moebius_invert<R: Ring>(&self, f: &[R]) -> Result<Vec<R>> {
        if f.len() != self.len() {
            return Err(Error::Invalid("function length does not match the poset".into()));
        }
        let mut g = Vec::with_capacity(self.len());
        for y in 0..self.len() {
            let mut acc = R::zero();
            for (x, fx) in f.iter().enumerate() {
                if self.leq[x][y] {
                    let m = self.moebius(x, y)?;
                    if !m.is_zero() {
                        acc = acc + R::from_int(&m) * fx.clone();
                    }
                }
            }
            g.push(acc);
        }
        Ok(g)
    }

    /// `f(y) = Σ_{x <= y} g(x)`.
    pub fn zeta<R: Ring>(&self, g: &[R]) -> Vec<R> {
        (0..self.len())
            .map(|y| {
                g.iter()
                    .enumerate()
                    .filter(|(x, _)| self.leq[*x][y])
                    .fold(R::zero(), |acc, (_, v)| acc + v.clone())
            })
            .collect()
    }
}

/// `μ̃(z, top)` on the subobject lattice of `x`, computed on demand by the
/// recursion from the top over up-sets and memoized.
pub struct TopMoebius<'a, C: RegularCategory> {
    cat: &'a C,
    x: C::Obj,
    top: C::Sub,
    memo: HashMap<C::Sub, BigInt>,
}

impl<'a, C: RegularCategory> TopMoebius<'a, C> {
    pub fn new(cat: &'a C, x: &C::Obj) -> Self {
        TopMoebius {
            cat,
            x: x.clone(),
            top: cat.top(x),
            memo: HashMap::new(),
        }
    }

    /// Resumes from a memo table produced by [`TopMoebius::into_memo`] for the same object.
    pub fn with_memo(cat: &'a C, x: &C::Obj, memo: HashMap<C::Sub, BigInt>) -> Self {
        TopMoebius {
            cat,
            x: x.clone(),
            top: cat.top(x),
            memo,
        }
    }

    pub fn into_memo(self) -> HashMap<C::Sub, BigInt> {
        self.memo
    }

    pub fn get(&mut self, s: &C::Sub) -> Result<BigInt> {
        if let Some(v) = self.memo.get(s) {
            return Ok(v.clone());
        }
        let v = if *s == self.top {
            BigInt::one()
        } else {
            let mut acc = BigInt::zero();
            for t in self.cat.subobjects_above(&self.x, s)? {
                if t != *s {
                    acc += self.get(&t)?;
                }
            }
            -acc
        };
        self.memo.insert(s.clone(), v.clone());
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regcat::Partition;
    use crate::ring::Rat;

    #[test]
    fn boolean_lattice() {
        let p = FinitePoset::boolean(3);
        assert_eq!(p.moebius(0, 7).unwrap(), BigInt::from(-1));
        assert_eq!(p.moebius(5, 5).unwrap(), BigInt::one());
    }

    #[test]
    fn partition_lattice_of_three() {
        let parts = Partition::all(3);
        // Refinement order: finer is smaller.
        let p = FinitePoset::new(parts.len(), |i, j| parts[i].refines(&parts[j])).unwrap();
        let bottom = parts.iter().position(|q| q.block_count() == 3).unwrap();
        let top = parts.iter().position(|q| q.block_count() == 1).unwrap();
        assert_eq!(p.moebius(bottom, top).unwrap(), BigInt::from(2));
    }

    #[test]
    fn domain_error() {
        let p = FinitePoset::chain(2);
        assert!(matches!(p.moebius(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn indicator_of_top_on_chain() {
        let p = FinitePoset::chain(2);
        let g = p.moebius_invert(&[Rat::int(0), Rat::int(1)]).unwrap();
        assert_eq!(g, vec![Rat::int(0), Rat::int(1)]);
    }

    #[test]
    fn rejects_non_posets() {
        assert!(FinitePoset::new(2, |_, _| true).is_err());
        assert!(FinitePoset::new(2, |a, b| a != b).is_err());
    }
}
