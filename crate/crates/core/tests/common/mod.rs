#![allow(dead_code)]

use groupoid_core::rational::int;
use groupoid_core::{ArrowId, Atom, FiniteGroupoid, GroupTable, Rational, WeightedUnitSpace};
use proptest::prelude::*;

/// Orbit shape: (orbit of each atom, mass weight per orbit, isotropy order per orbit).
#[derive(Clone, Debug)]
pub struct Shape {
    pub orbit_of: Vec<usize>,
    pub masses: Vec<i64>,
    pub isotropy: Vec<usize>,
}

impl Shape {
    pub fn n_orbits(&self) -> usize {
        self.masses.len()
    }

    pub fn orbit_atoms(&self, o: usize) -> Vec<Atom> {
        (0..self.orbit_of.len()).filter(|&i| self.orbit_of[i] == o).map(Atom).collect()
    }

    pub fn build(&self) -> FiniteGroupoid {
        let total: i64 = self.masses.iter().sum();
        let sizes: Vec<i64> = (0..self.n_orbits()).map(|o| self.orbit_atoms(o).len() as i64).collect();
        let weights: Vec<Rational> = self
            .orbit_of
            .iter()
            .map(|&o| Rational::new(self.masses[o].into(), (total * sizes[o]).into()))
            .collect();
        let names = (0..self.orbit_of.len()).map(|i| format!("x{i}")).collect();
        let units = WeightedUnitSpace::new(names, weights).unwrap();
        let blocks: Vec<(Vec<Atom>, GroupTable)> =
            (0..self.n_orbits()).map(|o| (self.orbit_atoms(o), GroupTable::cyclic(self.isotropy[o]))).collect();
        FiniteGroupoid::orbit_product(units, &blocks).unwrap()
    }

    /// Weight of a single atom in orbit `o`.
    pub fn atom_weight(&self, o: usize) -> Rational {
        let total: i64 = self.masses.iter().sum();
        Rational::new(self.masses[o].into(), (total * self.orbit_atoms(o).len() as i64).into())
    }
}

/// Shapes with every orbit nonempty.
pub fn shapes(max_atoms: usize, max_isotropy: usize) -> impl Strategy<Value = Shape> {
    (1..=max_atoms)
        .prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..n, n),
                proptest::collection::vec(1i64..=4, n),
                proptest::collection::vec(1..=max_isotropy, n),
            )
        })
        .prop_map(|(raw, masses, isotropy)| {
            // Relabel orbits by first occurrence so none is empty.
            let mut seen: Vec<usize> = Vec::new();
            let orbit_of: Vec<usize> = raw
                .iter()
                .map(|r| match seen.iter().position(|s| s == r) {
                    Some(i) => i,
                    None => {
                        seen.push(*r);
                        seen.len() - 1
                    }
                })
                .collect();
            let k = seen.len();
            Shape { orbit_of, masses: masses[..k].to_vec(), isotropy: isotropy[..k].to_vec() }
        })
}

/// Closure of a set under composition and inversion, from the raw tables.
pub fn closure(g: &FiniteGroupoid, generators: &[ArrowId]) -> Vec<bool> {
    let mut inside = vec![false; g.n_arrows()];
    for x in g.atoms() {
        inside[g.unit(x).0] = true;
    }
    for &a in generators {
        inside[a.0] = true;
        inside[g.inverse(a).0] = true;
    }
    loop {
        let mut changed = false;
        for a in g.arrow_ids().filter(|a| inside[a.0]).collect::<Vec<_>>() {
            for b in g.arrow_ids().filter(|b| inside[b.0]).collect::<Vec<_>>() {
                if let Some(c) = g.compose(a, b) {
                    if !inside[c.0] {
                        inside[c.0] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return inside;
        }
    }
}

/// Minimum mass of a generating set of non-unit arrows, by enumerating
/// every subset.
pub fn brute_force_cost(g: &FiniteGroupoid) -> Rational {
    let arrows: Vec<ArrowId> = g.non_unit_arrows().collect();
    assert!(arrows.len() <= 16, "brute force is limited to 16 arrows");
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << arrows.len()) {
        let chosen: Vec<ArrowId> = (0..arrows.len()).filter(|i| mask >> i & 1 == 1).map(|i| arrows[i]).collect();
        let mass = chosen.iter().fold(int(0), |acc, a| acc + g.weight(g.source(*a)));
        if best.as_ref().is_some_and(|b| &mass >= b) {
            continue;
        }
        if closure(g, &chosen).iter().all(|&b| b) {
            best = Some(mass);
        }
    }
    best.unwrap()
}

/// Each orbit needs a spanning tree, plus one generator for nontrivial
/// cyclic isotropy.
pub fn cost_by_formula(shape: &Shape) -> Rational {
    (0..shape.n_orbits()).fold(int(0), |acc, o| {
        let need = shape.orbit_atoms(o).len() - 1 + usize::from(shape.isotropy[o] > 1);
        acc + shape.atom_weight(o) * int(need as i64)
    })
}

/// `Σ_orbits μ(x)/|isotropy|`.
pub fn beta0_by_formula(shape: &Shape) -> Rational {
    (0..shape.n_orbits()).fold(int(0), |acc, o| acc + shape.atom_weight(o) / int(shape.isotropy[o] as i64))
}
