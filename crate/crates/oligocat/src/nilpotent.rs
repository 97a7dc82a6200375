//! Exact linear algebra on endomorphism algebras of `Perm(C; μ)` and the search
//! for nilpotent endomorphisms of non-zero trace.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{size_limit, Result};
use crate::measure::Measure;
use crate::regcat::RegularCategory;
use crate::ring::{Rat, Ring};
use crate::tensor::{matrix_basis, trace, PermComposer, PermMatrix};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let d = &f * &m[r][j];
                    m[i][j] = &m[i][j] - d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// A basis of `{v : m v = 0}`.
pub fn nullspace(m: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -a[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// The endomorphism algebra of `Vec` of an atom list, with structure constants.
pub struct EndAlgebra<C: RegularCategory> {
    pub atoms: Vec<C::Obj>,
    pub basis: Vec<(usize, usize, C::Sub)>,
    /// `mult[a][b]` = coordinates of `e_a ∘ e_b`.
    pub mult: Vec<Vec<Vec<BigRational>>>,
}

impl<C: RegularCategory> EndAlgebra<C> {
    pub fn new<M: Measure<C, Rat>>(cat: &C, atoms: &[C::Obj], mu: &M, max_dim: usize) -> Result<Self> {
        let basis = matrix_basis(cat, atoms, atoms)?;
        if basis.len() > max_dim {
            return Err(size_limit("endomorphism algebra dimension", max_dim, basis.len()));
        }
        let composer = PermComposer::new(mu);
        let units: Vec<PermMatrix<C, Rat>> = (0..basis.len()).map(|i| Self::unit(atoms, &basis, i)).collect();
        let mut mult = Vec::with_capacity(basis.len());
        for a in &units {
            let mut row = Vec::with_capacity(basis.len());
            for b in &units {
                let p = composer.compose(cat, a, b)?;
                row.push(Self::coords_of(&basis, &p));
            }
            mult.push(row);
        }
        Ok(EndAlgebra {
            atoms: atoms.to_vec(),
            basis,
            mult,
        })
    }

    fn unit(atoms: &[C::Obj], basis: &[(usize, usize, C::Sub)], i: usize) -> PermMatrix<C, Rat> {
        let mut m = PermMatrix::zero(atoms, atoms);
        m.add_entry(basis[i].clone(), Rat::int(1));
        m
    }

    fn coords_of(basis: &[(usize, usize, C::Sub)], m: &PermMatrix<C, Rat>) -> Vec<BigRational> {
        basis
            .iter()
            .map(|k| m.entries.get(k).map_or_else(BigRational::zero, |v| v.0.clone()))
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.mult.len()
    }

    pub fn matrix(&self, v: &[BigRational]) -> PermMatrix<C, Rat> {
        let mut m = PermMatrix::zero(&self.atoms, &self.atoms);
        for (k, c) in self.basis.iter().zip(v) {
            if !c.is_zero() {
                m.add_entry(k.clone(), Rat(c.clone()));
            }
        }
        m
    }

    pub fn mul(&self, x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim();
        let mut out = vec![BigRational::zero(); n];
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let c = xa * yb;
                for (k, v) in self.mult[a][b].iter().enumerate() {
                    if !v.is_zero() {
                        out[k] = &out[k] + &c * v;
                    }
                }
            }
        }
        out
    }

    /// Trace of left multiplication by `x`.
    fn regular_trace(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for b in 0..self.dim() {
                acc += xa * &self.mult[a][b][b];
            }
        }
        acc
    }

    /// The Jacobson radical: the kernel of `(x, y) ↦ Tr(L_{xy})` (characteristic zero).
    pub fn radical(&self) -> Vec<Vec<BigRational>> {
        let n = self.dim();
        let e = |i: usize| {
            let mut v = vec![BigRational::zero(); n];
            v[i] = BigRational::one();
            v
        };
        let form: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| self.regular_trace(&self.mul(&e(j), &e(i)))).collect())
            .collect();
        nullspace(&form, n)
    }

    /// The least `k <= dim + 1` with `x^k = 0`, if any.
    pub fn nilpotency_index(&self, x: &[BigRational]) -> Option<usize> {
        let mut p = x.to_vec();
        for k in 1..=self.dim() + 1 {
            if p.iter().all(Zero::is_zero) {
                return Some(k);
            }
            p = self.mul(&p, x);
        }
        None
    }
}

/// A verified nilpotent endomorphism with non-zero trace.
#[derive(Clone, Debug)]
pub struct NilpotentWitness {
    pub coords: Vec<BigRational>,
    pub index: usize,
    pub trace: Rat,
}

#[derive(Clone, Debug)]
pub struct NilpotentSearch {
    pub dim: usize,
    pub radical_dim: usize,
    /// Radical basis vectors whose trace was evaluated.
    pub candidates: usize,
    pub witness: Option<NilpotentWitness>,
}

impl NilpotentSearch {
    /// Without a witness the search is exhaustive: the trace vanishes on the
    /// radical, so it factors through a semisimple quotient where nilpotents
    /// have trace zero.
    pub fn exhausted(&self) -> bool {
        self.witness.is_none()
    }
}

/// Decides whether the endomorphism algebra of `Vec` of `atoms` contains a
/// nilpotent of non-zero trace. Such an element exists exactly when the trace
/// is non-zero somewhere on the radical, so it suffices to test a radical basis.
/// A returned witness has nilpotency and trace re-checked.
pub fn find_nilpotent_nonzero_trace<C, M>(cat: &C, atoms: &[C::Obj], mu: &M, max_dim: usize) -> Result<NilpotentSearch>
where
    C: RegularCategory,
    M: Measure<C, Rat>,
{
    let alg = EndAlgebra::new(cat, atoms, mu, max_dim)?;
    alg.search_radical(|v| trace(cat, &alg.matrix(v), mu))
}

impl<C: RegularCategory> EndAlgebra<C> {
    /// Evaluates `tr` on a basis of the radical and returns the first element
    /// with non-zero trace, after confirming that it is nilpotent.
    pub fn search_radical(&self, tr: impl Fn(&[BigRational]) -> Result<Rat>) -> Result<NilpotentSearch> {
        let rad = self.radical();
        let mut out = NilpotentSearch {
            dim: self.dim(),
            radical_dim: rad.len(),
            candidates: 0,
            witness: None,
        };
        for v in rad {
            out.candidates += 1;
            let t = tr(&v)?;
            if t.is_zero() {
                continue;
            }
            if let Some(index) = self.nilpotency_index(&v) {
                out.witness = Some(NilpotentWitness {
                    coords: v,
                    index,
                    trace: t,
                });
                break;
            }
        }
        Ok(out)
    }
}
