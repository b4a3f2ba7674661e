mod common;

use common::{beta0_by_formula, brute_force_cost, closure, cost_by_formula, shapes};
use groupoid_core::betti::{self, betti_groupoid};
use groupoid_core::complex::{
    alpha, antisymmetric_subspace, boundary_norm, build_graphing_complex, validate_complex, GSpace, TransversalRule,
};
use groupoid_core::cost::{self, minimal_cost, Optimality};
use groupoid_core::hilbert::{vn_dimension, vn_dimension_with, ArrowFunction, InvariantSubspace};
use groupoid_core::rational::{int, rat};
use groupoid_core::groupoid::Violation;
use groupoid_core::{ArrowId, ArrowSet, Atom, Rational};
use num_traits::Zero;
use proptest::prelude::*;

const BUDGET: u64 = 2_000_000;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_groupoids_are_valid(shape in shapes(5, 3)) {
        let g = shape.build();
        prop_assert!(g.validate().is_valid());
        prop_assert_eq!(g.units().total_mass(), int(1));
        prop_assert_eq!(g.is_principal(), shape.isotropy.iter().all(|&q| q == 1));
    }

    #[test]
    fn closure_agrees_with_oracle(shape in shapes(4, 3), picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..5)) {
        let g = shape.build();
        let gens: Vec<ArrowId> = picks.iter().map(|i| ArrowId(i.index(g.n_arrows()))).collect();
        prop_assert_eq!(g.closure_mask(gens.iter().copied()), closure(&g, &gens));
    }

    #[test]
    fn minimal_cost_matches_brute_force(shape in shapes(4, 3)) {
        let g = shape.build();
        let cert = minimal_cost(&g, BUDGET);
        prop_assert_eq!(cert.optimality, Optimality::Exact);
        prop_assert!(g.generates(cert.arrows.iter().copied()));
        prop_assert_eq!(g.mass_of_arrows(cert.arrows.iter().copied()), cert.value.clone());
        prop_assert_eq!(&cert.value, &cost_by_formula(&shape));
        if g.non_unit_arrows().count() <= 14 {
            prop_assert_eq!(&cert.value, &brute_force_cost(&g));
        }
    }

    #[test]
    fn treeable_iff_principal(shape in shapes(4, 3)) {
        let g = shape.build();
        let search = cost::find_treeing(&g, BUDGET);
        prop_assert_eq!(search.treeable(), Some(g.is_principal()));
        if let Some(t) = search.treeing {
            let sets: Vec<ArrowSet> = t.iter().map(|&a| ArrowSet::new(&g, [a]).unwrap()).collect();
            prop_assert!(cost::treeing_cost_check(&g, &sets, BUDGET).holds());
        }
    }

    #[test]
    fn beta0_matches_orbit_formula(shape in shapes(4, 3)) {
        let g = shape.build();
        let b = betti_groupoid(&g).unwrap();
        prop_assert_eq!(&b.beta0, &beta0_by_formula(&shape));
        prop_assert_eq!(&b.beta0, &betti::beta0_from_orbits(&g));
        if g.is_principal() {
            prop_assert!(b.exact1);
            prop_assert_eq!(b.beta1, int(0));
        }
    }

    #[test]
    fn cost_theorems_hold(shape in shapes(4, 3), pick in any::<prop::sample::Index>()) {
        let g = shape.build();
        prop_assert!(cost::cost_vs_betti_check(&g, BUDGET).unwrap().holds());
        prop_assert!(cost::cost_decomposition_check(&g, BUDGET).holds());
        prop_assert!(cost::orbit_relation_cost_check(&g, BUDGET).holds());
        // One atom per orbit plus one more arbitrary atom meets every orbit.
        let mut y: Vec<Atom> = (0..shape.n_orbits()).map(|o| shape.orbit_atoms(o)[0]).collect();
        let extra = Atom(pick.index(g.n_atoms()));
        if !y.contains(&extra) {
            y.push(extra);
        }
        let r = cost::induction_check(&g, &y, BUDGET);
        prop_assert!(r.holds(), "{}", r);
    }

    #[test]
    fn trace_is_tracial_and_positive(
        shape in shapes(3, 2),
        a in proptest::collection::vec(-3i64..=3, 36),
        b in proptest::collection::vec(-3i64..=3, 36),
    ) {
        let g = shape.build();
        let m = g.n_arrows();
        let f = ArrowFunction::from_real(&g, a[..m].iter().map(|&v| int(v)).collect()).unwrap();
        let h = ArrowFunction::from_real(&g, b[..m].iter().map(|&v| int(v)).collect()).unwrap();
        prop_assert_eq!(f.convolve(&h).unwrap().trace(), h.convolve(&f).unwrap().trace());
        let ff = f.adjoint().convolve(&f).unwrap().trace();
        prop_assert!(ff.im.is_zero() && ff.re >= Rational::zero());
        prop_assert_eq!(ff.re.is_zero(), f.is_zero());
        let fh = f.convolve(&h).unwrap();
        prop_assert_eq!(fh.regular_rep().matrix, f.regular_rep().matrix.mul(&h.regular_rep().matrix));
        prop_assert_eq!(f.regular_rep().adjoint().matrix, f.adjoint().regular_rep().matrix);
    }

    #[test]
    fn vn_dimension_is_additive_and_decomposition_independent(shape in shapes(4, 2), pick in any::<prop::sample::Index>()) {
        let g = shape.build();
        let atoms: Vec<Atom> = g.atoms().collect();
        let cut = pick.index(atoms.len() + 1);
        let left = GSpace::translated_section(&g, &atoms[..cut]);
        let right = GSpace::translated_section(&g, &atoms[cut..]);
        let sum = left.disjoint_union(&right).unwrap();
        let d = |s: &GSpace| vn_dimension(&InvariantSubspace::<Rational>::full(s)).unwrap();
        prop_assert_eq!(d(&sum), d(&left) + d(&right));
        prop_assert_eq!(d(&sum), int(1));
        for s in [&left, &right, &sum] {
            let full = InvariantSubspace::<Rational>::full(s);
            prop_assert_eq!(
                vn_dimension_with(&full, TransversalRule::LeastId).unwrap(),
                vn_dimension_with(&full, TransversalRule::GreatestId).unwrap()
            );
            prop_assert_eq!(s.gamma2_dimension().unwrap(), d(s));
        }

        let gens = minimal_cost(&g, BUDGET).arrows;
        let sets: Vec<ArrowSet> = gens.iter().map(|&a| ArrowSet::new(&g, [a]).unwrap()).collect();
        let complex = build_graphing_complex(&g, &sets).unwrap();
        for n in 0..=complex.top_dim() {
            let v = antisymmetric_subspace(&complex, n).unwrap();
            prop_assert_eq!(
                vn_dimension_with(&v, TransversalRule::LeastId).unwrap(),
                vn_dimension_with(&v, TransversalRule::GreatestId).unwrap()
            );
        }
    }

    #[test]
    fn graphing_complexes_satisfy_morse_and_euler(shape in shapes(4, 3)) {
        let g = shape.build();
        let gens = minimal_cost(&g, BUDGET).arrows;
        let sets: Vec<ArrowSet> = gens.iter().map(|&a| ArrowSet::new(&g, [a]).unwrap()).collect();
        let complex = build_graphing_complex(&g, &sets).unwrap();
        let e = betti::euler(&complex).unwrap();
        prop_assert!(e.equal);
        let bound = validate_complex(&complex).ulb_bound as f64;
        for n in 0..=complex.top_dim() {
            let r = betti::morse_check(&complex, n).unwrap();
            prop_assert!(r.holds(), "{}", r);
            let norm = boundary_norm(&complex, n).unwrap();
            prop_assert!(norm <= (n + 1) as f64 * bound.sqrt() + 1e-9);
        }
        let a1 = alpha(&complex, 1).unwrap();
        prop_assert!(a1.agree());
        if gens.iter().all(|&a| g.inverse(a) != a) {
            prop_assert_eq!(a1.by_domain, cost::cost_of_graphing(&g, &sets));
        }
    }

    #[test]
    fn restriction_and_orbit_relation(shape in shapes(5, 3), pick in proptest::collection::vec(any::<bool>(), 5)) {
        let g = shape.build();
        let y: Vec<Atom> = g.atoms().filter(|x| pick[x.0]).collect();
        match g.restriction(&y) {
            Ok(r) => {
                prop_assert!(!y.is_empty());
                // Weights are inherited, so only the total mass differs from a valid groupoid.
                let report = r.validate();
                let only_mass = report.violations.iter().all(|v| matches!(v, Violation::MassNotOne { .. }));
                prop_assert!(only_mass);
                prop_assert_eq!(r.units().total_mass(), g.units().mass_of(&y));
                prop_assert_eq!(r.n_atoms(), y.len());
            }
            Err(_) => prop_assert!(y.is_empty()),
        }
        let rel = g.orbit_relation();
        prop_assert!(rel.is_principal());
        prop_assert_eq!(rel.invariant_partition(), g.invariant_partition());
    }
}

#[test]
fn r3_constant_function_dimension() {
    let g = groupoid_core::fixtures::r3();
    let space = GSpace::left_regular(&g);
    // Per fiber, the constant vector spans an invariant subspace.
    let fibers = space.fibers();
    let mut local = Vec::new();
    for fiber in &fibers {
        local.push(vec![fiber.iter().map(|_| int(1)).collect::<Vec<Rational>>()]);
    }
    let v = InvariantSubspace::from_fiber_vectors(&space, local).unwrap();
    assert_eq!(vn_dimension(&v).unwrap(), rat(1, 3));
}
