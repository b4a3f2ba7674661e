//! Seeded random groupoids: a random orbit partition, each orbit carrying
//! its full relation times a cyclic isotropy group.

use groupoid_core::{ArrowId, ArrowSet, Atom, FiniteGroupoid, GroupTable, Rational, WeightedUnitSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::document::GroupoidDocument;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub seed: u64,
    pub atoms: usize,
    pub isotropy_max: usize,
    /// Upper limit on the number of non-unit arrows.
    pub arrow_budget: Option<usize>,
}

/// Attempts before giving up on fitting the arrow budget.
const ATTEMPTS: usize = 256;

/// Generates a valid document with a generating graphing named `gen`
/// made of singletons: a random spanning tree per orbit plus a generator
/// of each nontrivial isotropy group.
pub fn random_groupoid(params: RandomParams) -> Result<GroupoidDocument, String> {
    if params.atoms == 0 {
        return Err("at least one atom is required".into());
    }
    if params.isotropy_max == 0 {
        return Err("isotropy-max must be at least 1".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..ATTEMPTS {
        let shape = Shape::sample(&mut rng, params.atoms, params.isotropy_max);
        if params.arrow_budget.is_some_and(|b| shape.non_unit_arrows() > b) {
            continue;
        }
        return Ok(shape.build(&mut rng));
    }
    Err(format!("no instance within an arrow budget of {} found", params.arrow_budget.unwrap_or(0)))
}

struct Shape {
    orbits: Vec<Vec<usize>>,
    masses: Vec<u64>,
    isotropy: Vec<usize>,
    atoms: usize,
}

impl Shape {
    fn sample(rng: &mut ChaCha8Rng, atoms: usize, isotropy_max: usize) -> Self {
        let labels: Vec<usize> = (0..atoms).map(|_| rng.random_range(0..atoms)).collect();
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        let mut seen: Vec<usize> = Vec::new();
        for (x, l) in labels.iter().enumerate() {
            match seen.iter().position(|s| s == l) {
                Some(i) => orbits[i].push(x),
                None => {
                    seen.push(*l);
                    orbits.push(vec![x]);
                }
            }
        }
        let masses = orbits.iter().map(|_| rng.random_range(1..=4)).collect();
        let isotropy = orbits.iter().map(|_| rng.random_range(1..=isotropy_max)).collect();
        Shape { orbits, masses, isotropy, atoms }
    }

    fn non_unit_arrows(&self) -> usize {
        self.orbits.iter().zip(&self.isotropy).map(|(o, q)| o.len() * o.len() * q - o.len()).sum()
    }

    fn build(&self, rng: &mut ChaCha8Rng) -> GroupoidDocument {
        let total: u64 = self.masses.iter().sum();
        let mut weights = vec![Rational::default(); self.atoms];
        for (orbit, &mass) in self.orbits.iter().zip(&self.masses) {
            for &x in orbit {
                weights[x] = Rational::new(mass.into(), (total * orbit.len() as u64).into());
            }
        }
        let names = (0..self.atoms).map(|i| format!("x{i}")).collect();
        let units = WeightedUnitSpace::new(names, weights).expect("distinct names");
        let blocks: Vec<(Vec<Atom>, GroupTable)> = self
            .orbits
            .iter()
            .zip(&self.isotropy)
            .map(|(o, &q)| (o.iter().map(|&x| Atom(x)).collect(), GroupTable::cyclic(q)))
            .collect();
        let g = FiniteGroupoid::orbit_product(units, &blocks).expect("orbit blocks partition the atoms");

        let mut generators = Vec::new();
        for (orbit, &q) in self.orbits.iter().zip(&self.isotropy) {
            let mut order = orbit.clone();
            order.shuffle(rng);
            for i in 1..order.len() {
                let parent = order[rng.random_range(0..i)];
                generators.push(untwisted_arrow(&g, Atom(parent), Atom(order[i])));
            }
            if q > 1 {
                let x = Atom(order[0]);
                let iso = g.isotropy_arrows(x);
                let k = rng.random_range(1..q);
                // Any element coprime to q generates the cyclic group.
                let step = (1..q).cycle().skip(k - 1).find(|&j| gcd(j, q) == 1).expect("1 is coprime");
                generators.push(power_of(&g, &iso, step));
            }
        }
        debug_assert!(g.generates(generators.iter().copied()));
        let mut doc = GroupoidDocument::new(g);
        let mut set_names = Vec::new();
        for (i, &a) in generators.iter().enumerate() {
            let name = format!("e{i}");
            doc.sets.insert(name.clone(), ArrowSet::new(&doc.groupoid, [a]).expect("own arrow"));
            set_names.push(name);
        }
        doc.graphings.insert("gen".into(), set_names);
        doc
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// The arrow from `source` to `range` whose isotropy label is the identity.
fn untwisted_arrow(g: &FiniteGroupoid, source: Atom, range: Atom) -> ArrowId {
    let candidates: Vec<ArrowId> = g.arrow_ids().filter(|&a| g.source(a) == source && g.range(a) == range).collect();
    let untwisted = |a: &&ArrowId| {
        let name = g.arrow_name(**a);
        !name.contains('.') || name.ends_with(".e")
    };
    *candidates.iter().find(untwisted).unwrap_or(&candidates[0])
}

/// The `step`-th element `t_step` of a cyclic isotropy group named `e, t1, …`.
fn power_of(g: &FiniteGroupoid, iso: &[ArrowId], step: usize) -> ArrowId {
    let suffix = format!(".t{step}");
    *iso.iter().find(|&&a| g.arrow_name(a).ends_with(&suffix)).unwrap_or(&iso[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(seed: u64, atoms: usize, isotropy_max: usize) -> RandomParams {
        RandomParams { seed, atoms, isotropy_max, arrow_budget: None }
    }

    #[test]
    fn deterministic_in_seed() {
        let a = random_groupoid(params(7, 4, 3)).unwrap();
        let b = random_groupoid(params(7, 4, 3)).unwrap();
        assert_eq!(a.serialize(), b.serialize());
    }

    #[test]
    fn principal_when_isotropy_is_trivial() {
        let doc = random_groupoid(params(1, 3, 1)).unwrap();
        assert_eq!(doc.groupoid.n_atoms(), 3);
        assert!(doc.groupoid.is_principal());
        assert!(doc.groupoid.validate().is_valid());
    }

    #[test]
    fn gen_graphing_generates() {
        for seed in 0..50 {
            let doc = random_groupoid(params(seed, 4, 3)).unwrap();
            let g = &doc.groupoid;
            let gen = doc.graphing("gen").unwrap();
            assert!(g.generates(gen.iter().flat_map(|e| e.iter())), "seed {seed}");
        }
    }

    #[test]
    fn infeasible_parameters() {
        assert!(random_groupoid(params(0, 0, 1)).is_err());
        assert!(random_groupoid(params(0, 2, 0)).is_err());
        let p = RandomParams { arrow_budget: Some(0), ..params(0, 3, 2) };
        // Only all-singleton orbits with trivial isotropy fit; they may not be drawn.
        if let Ok(doc) = random_groupoid(p) {
            assert_eq!(doc.groupoid.non_unit_arrows().count(), 0);
        }
    }
}
