use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, Atom, FiniteGroupoid};
use crate::hilbert::{self, InvariantSubspace};
use crate::rational::Rational;

/// A finite set fibered over the atoms with a left groupoid action.
///
/// `g · u` is defined exactly when `s(g)` is the anchor of `u`, and then
/// `g · u` is anchored at `r(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSpace {
    groupoid: u64,
    atom_weights: Vec<Rational>,
    anchors: Vec<Atom>,
    act: Vec<Vec<Option<u32>>>,
    labels: Vec<String>,
}

/// Which point of each orbit is chosen as its representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TransversalRule {
    #[default]
    LeastId,
    GreatestId,
}

/// One point from each orbit, with its total mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalDomain {
    pub points: Vec<usize>,
    pub measure: Rational,
}

/// A fundamental domain split into sections on which the anchor map is
/// injective, with the equivariant identification of the space with the
/// disjoint union of the translated sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPeriodicDecomposition {
    pub sections: Vec<Vec<usize>>,
    pub atom_sets: Vec<Vec<Atom>>,
    /// `embedding[u] = (i, g)` when `u = g · f` for the point `f` of section `i`.
    pub embedding: Vec<(usize, ArrowId)>,
}

impl QuasiPeriodicDecomposition {
    pub fn measure(&self, atom_weights: &[Rational]) -> Rational {
        self.atom_sets.iter().flatten().fold(Rational::zero(), |acc, x| acc + &atom_weights[x.0])
    }
}

impl GSpace {
    /// Builds a G-space from an action callback and checks the axioms.
    pub fn explicit(
        g: &FiniteGroupoid,
        anchors: Vec<Atom>,
        labels: Vec<String>,
        act: impl Fn(ArrowId, usize) -> usize,
    ) -> Result<Self> {
        if labels.len() != anchors.len() {
            return Err(Error::GSpace("one label per point required".into()));
        }
        if let Some(x) = anchors.iter().find(|x| x.0 >= g.n_atoms()) {
            return Err(Error::UnknownAtom(x.0));
        }
        let mut table = vec![vec![None; anchors.len()]; g.n_arrows()];
        for a in g.arrow_ids() {
            for (u, &x) in anchors.iter().enumerate() {
                if g.source(a) == x {
                    let v = act(a, u);
                    if v >= anchors.len() {
                        return Err(Error::GSpace(format!("{} sends point {u} outside the space", g.arrow_name(a))));
                    }
                    table[a.0][u] = Some(v as u32);
                }
            }
        }
        let space = GSpace::from_table(g, anchors, labels, table);
        space.check_axioms(g)?;
        Ok(space)
    }

    pub(crate) fn from_table(
        g: &FiniteGroupoid,
        anchors: Vec<Atom>,
        labels: Vec<String>,
        act: Vec<Vec<Option<u32>>>,
    ) -> Self {
        GSpace { groupoid: g.fingerprint(), atom_weights: g.units().weights().to_vec(), anchors, act, labels }
    }

    pub(crate) fn check_axioms(&self, g: &FiniteGroupoid) -> Result<()> {
        for a in g.arrow_ids() {
            for u in 0..self.len() {
                let defined = self.act[a.0][u].is_some();
                if defined != (g.source(a) == self.anchors[u]) {
                    return Err(Error::GSpace(format!("domain of {} is wrong at point {u}", g.arrow_name(a))));
                }
                if let Some(v) = self.act(a, u) {
                    if self.anchors[v] != g.range(a) {
                        return Err(Error::GSpace(format!("{} · {u} is anchored off r({})", g.arrow_name(a), g.arrow_name(a))));
                    }
                    if g.is_unit(a) && v != u {
                        return Err(Error::GSpace(format!("unit {} moves point {u}", g.arrow_name(a))));
                    }
                }
            }
        }
        for a in g.arrow_ids() {
            for b in g.arrow_ids() {
                let Some(ab) = g.compose(a, b) else { continue };
                for u in 0..self.len() {
                    let Some(bu) = self.act(b, u) else { continue };
                    if self.act(ab, u) != self.act(a, bu) {
                        return Err(Error::GSpace(format!(
                            "({}{}) · {u} differs from {} · ({} · {u})",
                            g.arrow_name(a),
                            g.arrow_name(b),
                            g.arrow_name(a),
                            g.arrow_name(b)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `G` acting on itself by left translation, anchored by the range map.
    pub fn left_regular(g: &FiniteGroupoid) -> Self {
        Self::translated_section(g, &g.atoms().collect::<Vec<_>>())
    }

    /// `G · X₁`: arrows with source in `atoms`, anchored by the range map.
    pub fn translated_section(g: &FiniteGroupoid, atoms: &[Atom]) -> Self {
        let points: Vec<ArrowId> = g.arrow_ids().filter(|&h| atoms.contains(&g.source(h))).collect();
        let index: BTreeMap<ArrowId, usize> = points.iter().enumerate().map(|(i, &h)| (h, i)).collect();
        let anchors = points.iter().map(|&h| g.range(h)).collect();
        let labels = points.iter().map(|&h| g.arrow_name(h).to_string()).collect();
        let mut table = vec![vec![None; points.len()]; g.n_arrows()];
        for a in g.arrow_ids() {
            for (u, &h) in points.iter().enumerate() {
                if let Some(p) = g.compose(a, h) {
                    table[a.0][u] = Some(index[&p] as u32);
                }
            }
        }
        GSpace::from_table(g, anchors, labels, table)
    }

    /// `copies` disjoint copies of the left regular space.
    pub fn copies(g: &FiniteGroupoid, copies: usize) -> Self {
        let one = Self::left_regular(g);
        let mut out = GSpace { groupoid: one.groupoid, atom_weights: one.atom_weights.clone(), anchors: Vec::new(), act: vec![Vec::new(); g.n_arrows()], labels: Vec::new() };
        for c in 0..copies {
            out = out.disjoint_union(&one.relabeled(|l| format!("{l}#{c}"))).expect("same groupoid");
        }
        out
    }

    fn relabeled(&self, f: impl Fn(&str) -> String) -> Self {
        GSpace { labels: self.labels.iter().map(|l| f(l)).collect(), ..self.clone() }
    }

    pub fn disjoint_union(&self, other: &GSpace) -> Result<GSpace> {
        if self.groupoid != other.groupoid {
            return Err(Error::GroupoidMismatch);
        }
        let shift = self.len() as u32;
        let act = self
            .act
            .iter()
            .zip(&other.act)
            .map(|(a, b)| a.iter().copied().chain(b.iter().map(|v| v.map(|v| v + shift))).collect())
            .collect();
        Ok(GSpace {
            groupoid: self.groupoid,
            atom_weights: self.atom_weights.clone(),
            anchors: self.anchors.iter().chain(&other.anchors).copied().collect(),
            act,
            labels: self.labels.iter().chain(&other.labels).cloned().collect(),
        })
    }

    /// Whether this space was built over `g`.
    pub fn is_over(&self, g: &FiniteGroupoid) -> bool {
        self.groupoid == g.fingerprint()
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn n_arrows(&self) -> usize {
        self.act.len()
    }

    pub fn n_atoms(&self) -> usize {
        self.atom_weights.len()
    }

    pub fn atom_weights(&self) -> &[Rational] {
        &self.atom_weights
    }

    pub fn anchor(&self, u: usize) -> Atom {
        self.anchors[u]
    }

    pub fn anchors(&self) -> &[Atom] {
        &self.anchors
    }

    pub fn label(&self, u: usize) -> &str {
        &self.labels[u]
    }

    pub fn weight(&self, u: usize) -> &Rational {
        &self.atom_weights[self.anchors[u].0]
    }

    /// Point weights, in point order.
    pub fn weights(&self) -> Vec<Rational> {
        (0..self.len()).map(|u| self.weight(u).clone()).collect()
    }

    pub fn act(&self, g: ArrowId, u: usize) -> Option<usize> {
        self.act[g.0][u].map(|v| v as usize)
    }

    /// Points grouped by anchor, indexed by atom.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.n_atoms()];
        for (u, x) in self.anchors.iter().enumerate() {
            fibers[x.0].push(u);
        }
        fibers
    }

    /// Orbits, each sorted, ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut orbits = Vec::new();
        for u in 0..self.len() {
            if seen[u] {
                continue;
            }
            let mut orbit: Vec<usize> =
                (0..self.n_arrows()).filter_map(|a| self.act(ArrowId(a), u)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &v in &orbit {
                seen[v] = true;
            }
            orbits.push(orbit);
        }
        orbits
    }

    /// Fails with a witness if some non-unit arrow fixes a point.
    pub fn check_free(&self) -> Result<()> {
        for a in self.n_atoms()..self.n_arrows() {
            for u in 0..self.len() {
                if self.act(ArrowId(a), u) == Some(u) {
                    return Err(Error::NotFree { arrow: a, point: u });
                }
            }
        }
        Ok(())
    }

    /// Verifies freeness and returns the least-id orbit transversal.
    pub fn check_quasi_periodic(&self) -> Result<FundamentalDomain> {
        self.fundamental_domain(TransversalRule::LeastId)
    }

    pub fn fundamental_domain(&self, rule: TransversalRule) -> Result<FundamentalDomain> {
        self.check_free()?;
        let points: Vec<usize> = self
            .orbits()
            .into_iter()
            .map(|o| match rule {
                TransversalRule::LeastId => o[0],
                TransversalRule::GreatestId => *o.last().unwrap(),
            })
            .collect();
        let measure = points.iter().fold(Rational::zero(), |acc, &u| acc + self.weight(u));
        Ok(FundamentalDomain { points, measure })
    }

    /// Splits a fundamental domain into sections on which the anchor map
    /// is injective (first fit, in transversal order).
    pub fn quasi_periodic_decomposition(&self, rule: TransversalRule) -> Result<QuasiPeriodicDecomposition> {
        let domain = self.fundamental_domain(rule)?;
        let mut sections: Vec<Vec<usize>> = Vec::new();
        let mut atom_sets: Vec<Vec<Atom>> = Vec::new();
        for &f in &domain.points {
            let x = self.anchor(f);
            match atom_sets.iter().position(|s| !s.contains(&x)) {
                Some(i) => {
                    sections[i].push(f);
                    atom_sets[i].push(x);
                }
                None => {
                    sections.push(vec![f]);
                    atom_sets.push(vec![x]);
                }
            }
        }
        let mut embedding = vec![None; self.len()];
        for (i, section) in sections.iter().enumerate() {
            for &f in section {
                for a in 0..self.n_arrows() {
                    if let Some(u) = self.act(ArrowId(a), f) {
                        if embedding[u].replace((i, ArrowId(a))).is_some() {
                            return Err(Error::Internal(format!("point {u} reached twice from the fundamental domain")));
                        }
                    }
                }
            }
        }
        let embedding = embedding
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Internal("fundamental domain misses an orbit".into()))?;
        Ok(QuasiPeriodicDecomposition { sections, atom_sets, embedding })
    }

    /// Von Neumann dimension of the full space `Γ²(U)`.
    pub fn gamma2_dimension(&self) -> Result<Rational> {
        hilbert::vn_dimension(&InvariantSubspace::<Rational>::full(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    #[test]
    fn union_rejects_other_groupoids() {
        // Same weights and arrow count, different structure.
        let r2 = GSpace::left_regular(&fixtures::r2());
        let swap = GSpace::left_regular(&fixtures::swap());
        assert_eq!(r2.disjoint_union(&swap), Err(Error::GroupoidMismatch));
        assert!(r2.is_over(&fixtures::r2()) && !r2.is_over(&fixtures::swap()));
    }

    #[test]
    fn regular_space_has_unit_domain() {
        let g = fixtures::r3();
        let u = GSpace::left_regular(&g);
        let f = u.check_quasi_periodic().unwrap();
        assert_eq!(f.measure, int(1));
        assert_eq!(u.gamma2_dimension().unwrap(), int(1));
        let d = u.quasi_periodic_decomposition(TransversalRule::LeastId).unwrap();
        assert_eq!(d.sections.len(), 1);
        assert_eq!(d.atom_sets[0].len(), 3);
        assert_eq!(d.sections[0], vec![0, 1, 2]);
    }

    #[test]
    fn copies_and_sections() {
        let g = fixtures::r2();
        let u = GSpace::copies(&g, 3);
        assert_eq!(u.gamma2_dimension().unwrap(), int(3));
        let d = u.quasi_periodic_decomposition(TransversalRule::GreatestId).unwrap();
        assert_eq!(d.sections.len(), 3);
        let x = g.atom_by_name("x").unwrap();
        let half = GSpace::translated_section(&g, &[x]);
        assert_eq!(half.gamma2_dimension().unwrap(), rat(1, 2));
    }

    #[test]
    fn fixed_point_is_reported() {
        let g = fixtures::z2pt();
        let u = GSpace::explicit(&g, vec![Atom(0)], vec!["p".into()], |_, p| p).unwrap();
        assert_eq!(u.check_quasi_periodic(), Err(Error::NotFree { arrow: 1, point: 0 }));
    }

    #[test]
    fn explicit_rejects_non_actions() {
        let g = fixtures::r2();
        // Both points over x, so f cannot land over y.
        let bad = GSpace::explicit(&g, vec![Atom(0), Atom(0)], vec!["p".into(), "q".into()], |_, p| p);
        assert!(bad.is_err());
    }
}
