//! Groupoid ring, regular representation, trace and von Neumann dimension.

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::complex::{GSpace, TransversalRule};
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, ArrowSet, FiniteGroupoid};
use crate::linalg::{self, Matrix, Projector, Scalar};
use crate::rational::{ComplexRational, Rational};

/// An element of the groupoid ring `ℂ[G]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrowFunction<'g> {
    groupoid: &'g FiniteGroupoid,
    values: Vec<ComplexRational>,
}

impl<'g> ArrowFunction<'g> {
    pub fn zero(groupoid: &'g FiniteGroupoid) -> Self {
        ArrowFunction { groupoid, values: vec![ComplexRational::zero(); groupoid.n_arrows()] }
    }

    pub fn from_values(groupoid: &'g FiniteGroupoid, values: Vec<ComplexRational>) -> Result<Self> {
        if values.len() != groupoid.n_arrows() {
            return Err(Error::GroupoidMismatch);
        }
        Ok(ArrowFunction { groupoid, values })
    }

    pub fn from_real(groupoid: &'g FiniteGroupoid, values: Vec<Rational>) -> Result<Self> {
        Self::from_values(groupoid, values.into_iter().map(ComplexRational::from_rational).collect())
    }

    pub fn indicator(groupoid: &'g FiniteGroupoid, set: &ArrowSet) -> Self {
        let mut f = Self::zero(groupoid);
        for g in set.iter() {
            f.values[g.0] = ComplexRational::one();
        }
        f
    }

    /// The unit `1_X` of the ring.
    pub fn identity(groupoid: &'g FiniteGroupoid) -> Self {
        Self::indicator(groupoid, &groupoid.unit_set())
    }

    pub fn groupoid(&self) -> &'g FiniteGroupoid {
        self.groupoid
    }

    pub fn value(&self, g: ArrowId) -> &ComplexRational {
        &self.values[g.0]
    }

    pub fn values(&self) -> &[ComplexRational] {
        &self.values
    }

    pub fn set(&mut self, g: ArrowId, value: ComplexRational) {
        self.values[g.0] = value;
    }

    fn same_groupoid(&self, other: &ArrowFunction<'_>) -> bool {
        std::ptr::eq(self.groupoid, other.groupoid) || self.groupoid == other.groupoid
    }

    pub fn add(&self, other: &ArrowFunction<'_>) -> Result<ArrowFunction<'g>> {
        if !self.same_groupoid(other) {
            return Err(Error::GroupoidMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(ArrowFunction { groupoid: self.groupoid, values })
    }

    pub fn scale(&self, c: &ComplexRational) -> ArrowFunction<'g> {
        ArrowFunction { groupoid: self.groupoid, values: self.values.iter().map(|a| a * c).collect() }
    }

    /// `(f₁ f₂)(g) = Σ_{g₁g₂ = g} f₁(g₁) f₂(g₂)`.
    pub fn convolve(&self, other: &ArrowFunction<'_>) -> Result<ArrowFunction<'g>> {
        if !self.same_groupoid(other) {
            return Err(Error::GroupoidMismatch);
        }
        let g = self.groupoid;
        let mut out = Self::zero(g);
        for a in g.arrow_ids() {
            if self.values[a.0].is_zero() {
                continue;
            }
            for b in g.arrow_ids() {
                if other.values[b.0].is_zero() {
                    continue;
                }
                if let Some(p) = g.compose(a, b) {
                    out.values[p.0] = &out.values[p.0] + &self.values[a.0] * &other.values[b.0];
                }
            }
        }
        Ok(out)
    }

    /// `f*(g) = conj(f(g⁻¹))`.
    pub fn adjoint(&self) -> ArrowFunction<'g> {
        let g = self.groupoid;
        let values = g.arrow_ids().map(|a| self.values[g.inverse(a).0].conj()).collect();
        ArrowFunction { groupoid: g, values }
    }

    /// `τ(f) = Σ_x f(1_x) μ(x)`.
    pub fn trace(&self) -> ComplexRational {
        let g = self.groupoid;
        g.atoms().fold(ComplexRational::zero(), |acc, x| {
            acc + &self.values[g.unit(x).0] * ComplexRational::from_rational(g.weight(x).clone())
        })
    }

    /// Restriction to the unit arrows.
    pub fn conditional_expectation(&self) -> ArrowFunction<'g> {
        let g = self.groupoid;
        let mut out = Self::zero(g);
        for x in g.atoms() {
            out.values[g.unit(x).0] = self.values[g.unit(x).0].clone();
        }
        out
    }

    /// Left convolution on `L²(G, μ^G)` in the basis of arrow indicators.
    pub fn regular_rep(&self) -> LinearOperator<ComplexRational> {
        let g = self.groupoid;
        let m = g.n_arrows();
        let mut matrix: Matrix<ComplexRational> = Matrix::zeros(m, m);
        for col in g.arrow_ids() {
            for a in g.arrow_ids() {
                if self.values[a.0].is_zero() {
                    continue;
                }
                if let Some(p) = g.compose(a, col) {
                    let v = matrix.get(p.0, col.0).clone() + self.values[a.0].clone();
                    matrix.set(p.0, col.0, v);
                }
            }
        }
        let weights: Vec<Rational> = g.arrow_ids().map(|a| g.weight(g.source(a)).clone()).collect();
        LinearOperator { matrix, dom_weights: weights.clone(), cod_weights: weights }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

/// The partial isometry `u(E) = 1_E` of a one-sheeted set.
pub fn u<'g>(groupoid: &'g FiniteGroupoid, e: &ArrowSet) -> Result<ArrowFunction<'g>> {
    if !e.one_sheeted() {
        return Err(Error::NotOneSheeted);
    }
    Ok(ArrowFunction::indicator(groupoid, e))
}

/// A matrix between weighted coordinate spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearOperator<S> {
    pub matrix: Matrix<S>,
    pub dom_weights: Vec<Rational>,
    pub cod_weights: Vec<Rational>,
}

impl<S: Scalar> LinearOperator<S> {
    pub fn new(matrix: Matrix<S>, dom_weights: Vec<Rational>, cod_weights: Vec<Rational>) -> Self {
        assert_eq!(matrix.cols(), dom_weights.len());
        assert_eq!(matrix.rows(), cod_weights.len());
        LinearOperator { matrix, dom_weights, cod_weights }
    }

    /// Adjoint with respect to the weighted inner products.
    pub fn adjoint(&self) -> Self {
        LinearOperator {
            matrix: linalg::weighted_adjoint(&self.matrix, &self.dom_weights, &self.cod_weights),
            dom_weights: self.cod_weights.clone(),
            cod_weights: self.dom_weights.clone(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        LinearOperator {
            matrix: self.matrix.mul(&other.matrix),
            dom_weights: other.dom_weights.clone(),
            cod_weights: self.cod_weights.clone(),
        }
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.matrix.mul_vec(v)
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

/// A closed subspace of `Γ²(U)` that is invariant under the groupoid action.
///
/// The orthogonal projection is computed on first use and cached.
#[derive(Debug)]
pub struct InvariantSubspace<'a, S: Scalar> {
    space: &'a GSpace,
    fibers: Vec<Vec<usize>>,
    local: Vec<Vec<Vec<S>>>,
    global: Option<Vec<Vec<S>>>,
    projection: OnceLock<Result<Vec<Projector<S>>>>,
}

impl<'a, S: Scalar> InvariantSubspace<'a, S> {
    /// The span of the given vectors, in point coordinates.
    pub fn new(space: &'a GSpace, vectors: Vec<Vec<S>>) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != space.len()) {
            return Err(Error::NotInvariant("vector length differs from the space".into()));
        }
        let fibers = space.fibers();
        let local = fibers
            .iter()
            .map(|pts| {
                vectors
                    .iter()
                    .map(|v| pts.iter().map(|&p| v[p].clone()).collect::<Vec<S>>())
                    .filter(|v| v.iter().any(|c| !c.is_zero()))
                    .collect()
            })
            .collect();
        let spans_fibers = vectors.iter().any(|v| {
            let mut atoms = v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(p, _)| space.anchor(p));
            let first = atoms.next();
            atoms.any(|x| Some(x) != first)
        });
        Ok(InvariantSubspace { space, fibers, local, global: spans_fibers.then_some(vectors), projection: OnceLock::new() })
    }

    /// The span of vectors given fiber by fiber, in the local coordinates
    /// of [`GSpace::fibers`].
    pub fn from_fiber_vectors(space: &'a GSpace, local: Vec<Vec<Vec<S>>>) -> Result<Self> {
        let fibers = space.fibers();
        if local.len() != fibers.len() || local.iter().zip(&fibers).any(|(vs, pts)| vs.iter().any(|v| v.len() != pts.len())) {
            return Err(Error::NotInvariant("fiber vectors do not match the fibers".into()));
        }
        Ok(InvariantSubspace { space, fibers, local, global: None, projection: OnceLock::new() })
    }

    pub fn full(space: &'a GSpace) -> Self {
        let fibers = space.fibers();
        let local = fibers
            .iter()
            .map(|pts| {
                (0..pts.len())
                    .map(|i| {
                        let mut e = vec![S::zero(); pts.len()];
                        e[i] = S::one();
                        e
                    })
                    .collect()
            })
            .collect();
        InvariantSubspace { space, fibers, local, global: None, projection: OnceLock::new() }
    }

    pub fn zero(space: &'a GSpace) -> Self {
        let fibers = space.fibers();
        let local = vec![Vec::new(); fibers.len()];
        InvariantSubspace { space, fibers, local, global: None, projection: OnceLock::new() }
    }

    pub fn space(&self) -> &'a GSpace {
        self.space
    }

    /// Per-fiber projections, after checking that the subspace splits along
    /// fibers and is invariant under every arrow.
    pub fn projectors(&self) -> Result<&[Projector<S>]> {
        self.projection.get_or_init(|| self.compute_projectors()).as_ref().map(Vec::as_slice).map_err(Clone::clone)
    }

    fn compute_projectors(&self) -> Result<Vec<Projector<S>>> {
        let projectors: Vec<Projector<S>> = self
            .fibers
            .iter()
            .zip(&self.local)
            .enumerate()
            .map(|(x, (pts, vs))| {
                let w = self.space.atom_weights()[x].clone();
                Projector::new(vec![w; pts.len()], vs)
            })
            .collect();
        if let Some(global) = &self.global {
            let split: usize = projectors.iter().map(Projector::rank).sum();
            if linalg::rank_of(self.space.len(), global) != split {
                return Err(Error::NotInvariant("subspace does not split along fibers".into()));
            }
        }
        let mut position = vec![0; self.space.len()];
        for pts in &self.fibers {
            for (i, &p) in pts.iter().enumerate() {
                position[p] = i;
            }
        }
        let n_atoms = self.space.n_atoms();
        for a in (n_atoms..self.space.n_arrows()).map(ArrowId) {
            for (x, pts) in self.fibers.iter().enumerate() {
                let Some(image0) = pts.first().and_then(|&p| self.space.act(a, p)) else { continue };
                let y = self.space.anchor(image0).0;
                let target = &self.fibers[y];
                for q in projectors[x].orthogonal_basis() {
                    let mut moved = vec![S::zero(); target.len()];
                    for (i, &p) in pts.iter().enumerate() {
                        let v = self.space.act(a, p).expect("arrow acts on its source fiber");
                        moved[position[v]] = q[i].clone();
                    }
                    if !projectors[y].contains(&moved) {
                        return Err(Error::NotInvariant(format!("arrow #{} moves a vector out of the subspace", a.0)));
                    }
                }
            }
        }
        Ok(projectors)
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.projectors()?.iter().map(Projector::rank).sum())
    }

    /// Orthogonal projection of a vector in point coordinates.
    pub fn project(&self, v: &[S]) -> Result<Vec<S>> {
        let projectors = self.projectors()?;
        let mut out = vec![S::zero(); v.len()];
        for (pts, p) in self.fibers.iter().zip(projectors) {
            let local: Vec<S> = pts.iter().map(|&i| v[i].clone()).collect();
            for (&i, c) in pts.iter().zip(p.project(&local)) {
                out[i] = c;
            }
        }
        Ok(out)
    }

    pub fn contains(&self, v: &[S]) -> Result<bool> {
        Ok(self.project(v)? == v)
    }

    /// Orthonormal-up-to-scale basis, fiber by fiber, in local coordinates.
    pub fn fiber_bases(&self) -> Result<Vec<Vec<Vec<S>>>> {
        Ok(self.projectors()?.iter().map(|p| p.orthogonal_basis().to_vec()).collect())
    }
}

/// Von Neumann dimension using the least-id fundamental domain.
pub fn vn_dimension<S: Scalar>(v: &InvariantSubspace<'_, S>) -> Result<Rational> {
    vn_dimension_with(v, TransversalRule::LeastId)
}

/// `Σ_i ⟨P 1_{F_i}, 1_{F_i}⟩` over the sections of a quasi-periodic
/// decomposition chosen by `rule`.
pub fn vn_dimension_with<S: Scalar>(v: &InvariantSubspace<'_, S>, rule: TransversalRule) -> Result<Rational> {
    let decomposition = v.space.quasi_periodic_decomposition(rule)?;
    let projectors = v.projectors()?;
    let mut position = vec![0; v.space.len()];
    for pts in &v.fibers {
        for (i, &p) in pts.iter().enumerate() {
            position[p] = i;
        }
    }
    let mut total = S::zero();
    for section in &decomposition.sections {
        // Points of a section lie in distinct fibers, so cross terms vanish.
        for &f in section {
            let x = v.space.anchor(f).0;
            let mut e = vec![S::zero(); v.fibers[x].len()];
            e[position[f]] = S::one();
            total = total + projectors[x].quadratic_form(&e);
        }
    }
    if total.conj() != total {
        return Err(Error::Internal("dimension has an imaginary part".into()));
    }
    Ok(total.real_part())
}

/// `i` as a complex rational.
pub fn imaginary_unit() -> ComplexRational {
    Complex::new(Rational::zero(), Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    fn c(v: Rational) -> ComplexRational {
        ComplexRational::from_rational(v)
    }

    #[test]
    fn convolution_examples() {
        let g = fixtures::r2();
        let f = g.arrow_by_name("f").unwrap();
        let finv = g.inverse(f);
        let one_f = ArrowFunction::indicator(&g, &ArrowSet::new(&g, [f]).unwrap());
        let one_finv = ArrowFunction::indicator(&g, &ArrowSet::new(&g, [finv]).unwrap());
        let y = g.atom_by_name("y").unwrap();
        let expected = ArrowFunction::indicator(&g, &ArrowSet::new(&g, [g.unit(y)]).unwrap());
        assert_eq!(one_f.convolve(&one_finv).unwrap(), expected);
        let id = ArrowFunction::identity(&g);
        assert_eq!(id.convolve(&one_f).unwrap(), one_f);

        let z = fixtures::z2pt();
        let a = ArrowFunction::indicator(&z, &ArrowSet::new(&z, [ArrowId(1)]).unwrap());
        assert_eq!(a.convolve(&a).unwrap(), ArrowFunction::identity(&z));
        assert_eq!(a.conditional_expectation(), ArrowFunction::zero(&z));
        assert_eq!(a.convolve(&a).unwrap().conditional_expectation(), ArrowFunction::identity(&z));
        assert_eq!(a.convolve(&one_f), Err(Error::GroupoidMismatch));
    }

    #[test]
    fn adjoint_examples() {
        let g = fixtures::r2();
        assert_eq!(ArrowFunction::identity(&g).adjoint(), ArrowFunction::identity(&g));
        let f = g.arrow_by_name("f").unwrap();
        let mut h = ArrowFunction::zero(&g);
        h.set(f, imaginary_unit());
        let mut expected = ArrowFunction::zero(&g);
        expected.set(g.inverse(f), -imaginary_unit());
        assert_eq!(h.adjoint(), expected);
    }

    #[test]
    fn partial_isometries() {
        let g = fixtures::r2();
        let f = g.arrow_by_name("f").unwrap();
        let e = ArrowSet::new(&g, [f]).unwrap();
        let uf = u(&g, &e).unwrap();
        let x = g.atom_by_name("x").unwrap();
        let y = g.atom_by_name("y").unwrap();
        let one_x = ArrowFunction::indicator(&g, &ArrowSet::new(&g, [g.unit(x)]).unwrap());
        let one_y = ArrowFunction::indicator(&g, &ArrowSet::new(&g, [g.unit(y)]).unwrap());
        assert_eq!(uf.adjoint().convolve(&uf).unwrap(), one_x);
        assert_eq!(uf.convolve(&uf.adjoint()).unwrap(), one_y);
        assert_eq!(uf.adjoint().convolve(&uf).unwrap().trace(), c(g.mu_g(&e)));

        let r3 = fixtures::r3();
        let sigma = &r3.one_sheeted_decomposition()[1];
        let us = u(&r3, sigma).unwrap();
        assert_eq!(us.adjoint().convolve(&us).unwrap(), ArrowFunction::identity(&r3));
        assert_eq!(us.convolve(&us.adjoint()).unwrap(), ArrowFunction::identity(&r3));

        let bad = ArrowSet::new(&g, [f, g.unit(x)]).unwrap();
        assert_eq!(u(&g, &bad), Err(Error::NotOneSheeted));
    }

    #[test]
    fn traces() {
        let g = fixtures::r2();
        assert_eq!(ArrowFunction::identity(&g).trace(), c(int(1)));
        let f = g.arrow_by_name("f").unwrap();
        assert_eq!(ArrowFunction::indicator(&g, &ArrowSet::new(&g, [f]).unwrap()).trace(), c(int(0)));
    }

    #[test]
    fn regular_representation() {
        let g = fixtures::z2pt();
        assert_eq!(ArrowFunction::identity(&g).regular_rep().matrix, Matrix::identity(2));
        let a = ArrowFunction::indicator(&g, &ArrowSet::new(&g, [ArrowId(1)]).unwrap());
        let swap = Matrix::from_rows(vec![
            vec![ComplexRational::zero(), ComplexRational::one()],
            vec![ComplexRational::one(), ComplexRational::zero()],
        ]);
        assert_eq!(a.regular_rep().matrix, swap);
    }

    #[test]
    fn vn_dimension_examples() {
        let g = fixtures::z2pt();
        let space = GSpace::left_regular(&g);
        let v = InvariantSubspace::new(&space, vec![vec![int(1), int(1)]]).unwrap();
        assert_eq!(vn_dimension(&v).unwrap(), rat(1, 2));
        assert_eq!(vn_dimension(&InvariantSubspace::<Rational>::zero(&space)).unwrap(), int(0));
        assert_eq!(vn_dimension(&InvariantSubspace::<Rational>::full(&space)).unwrap(), int(1));

        let r2 = fixtures::r2();
        let space = GSpace::left_regular(&r2);
        assert_eq!(vn_dimension(&InvariantSubspace::<Rational>::full(&space)).unwrap(), int(1));
    }

    #[test]
    fn non_invariant_subspace_is_rejected() {
        let g = fixtures::z2pt();
        let space = GSpace::left_regular(&g);
        let v = InvariantSubspace::new(&space, vec![vec![int(1), int(0)]]).unwrap();
        assert!(matches!(vn_dimension(&v), Err(Error::NotInvariant(_))));

        // Spans both fibers of R2 without containing its fiber components.
        let r2 = fixtures::r2();
        let space = GSpace::left_regular(&r2);
        let v = InvariantSubspace::new(&space, vec![vec![int(1), int(1), int(1), int(1)]]).unwrap();
        assert!(matches!(vn_dimension(&v), Err(Error::NotInvariant(_))));
    }
}
