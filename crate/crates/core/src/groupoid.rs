//! Finite pmp groupoids: tables, validation and structural operations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_pq, Rational};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(pub usize);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowId(pub usize);

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// Atoms of the unit space with their masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedUnitSpace {
    names: Vec<String>,
    weights: Vec<Rational>,
}

impl WeightedUnitSpace {
    pub fn new(names: Vec<String>, weights: Vec<Rational>) -> Result<Self> {
        if names.len() != weights.len() {
            return Err(Error::Structure("atom names and weights differ in length".into()));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != names.len() {
            return Err(Error::Structure("duplicate atom name".into()));
        }
        Ok(WeightedUnitSpace { names, weights })
    }

    /// `n` atoms named `x0, x1, …` of mass `1/n` each.
    pub fn uniform(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        WeightedUnitSpace { names: (0..n).map(|i| format!("x{i}")).collect(), weights: vec![w; n] }
    }

    pub fn named_uniform(names: &[&str]) -> Self {
        let w = Rational::new(1.into(), (names.len() as i64).into());
        WeightedUnitSpace { names: names.iter().map(|s| s.to_string()).collect(), weights: vec![w; names.len()] }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, x: Atom) -> &str {
        &self.names[x.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weight(&self, x: Atom) -> &Rational {
        &self.weights[x.0]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        (0..self.names.len()).map(Atom)
    }

    pub fn total_mass(&self) -> Rational {
        self.weights.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn mass_of<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Rational {
        atoms.into_iter().fold(Rational::zero(), |a, x| a + &self.weights[x.0])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: Atom,
    pub range: Atom,
}

impl Arrow {
    pub fn new(name: impl Into<String>, source: Atom, range: Atom) -> Self {
        Arrow { name: name.into(), source, range }
    }
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl GroupTable {
    pub fn new(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n || row.iter().any(|&v| v >= n)) {
            return Err(Error::NotAGroup("table is not square over the element list".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::NotAGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails on ({}, {}, {})",
                            names[a], names[b], names[c]
                        )));
                    }
                }
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::NotAGroup(format!("{} has no inverse", names[a])))?;
            inverses.push(inv);
        }
        Ok(GroupTable { names, table, identity, inverses })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let names = (0..n).map(|i| if i == 0 { "e".to_string() } else { format!("t{i}") }).collect();
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable { names, table, identity: 0, inverses: (0..n).map(|a| (n - a) % n).collect() }
    }

    pub fn direct_product(a: &GroupTable, b: &GroupTable) -> Self {
        let (na, nb) = (a.order(), b.order());
        let idx = |i: usize, j: usize| i * nb + j;
        let names = (0..na)
            .flat_map(|i| (0..nb).map(move |j| (i, j)))
            .map(|(i, j)| {
                if i == a.identity && j == b.identity {
                    "e".to_string()
                } else {
                    format!("{}{}", a.names[i], b.names[j])
                }
            })
            .collect();
        let mut table = vec![vec![0; na * nb]; na * nb];
        for i in 0..na {
            for j in 0..nb {
                for k in 0..na {
                    for l in 0..nb {
                        table[idx(i, j)][idx(k, l)] = idx(a.mul(i, k), b.mul(j, l));
                    }
                }
            }
        }
        GroupTable::new(names, table).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }
}

/// A subset of arrows with its one-sheetedness flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrowSet {
    arrows: Vec<ArrowId>,
    one_sheeted: bool,
}

impl ArrowSet {
    pub fn new(g: &FiniteGroupoid, arrows: impl IntoIterator<Item = ArrowId>) -> Result<Self> {
        let mut v: Vec<ArrowId> = arrows.into_iter().collect();
        if let Some(bad) = v.iter().find(|a| a.0 >= g.n_arrows()) {
            return Err(Error::UnknownArrow(bad.0));
        }
        v.sort_unstable();
        v.dedup();
        let one_sheeted = g.is_one_sheeted(&v);
        Ok(ArrowSet { arrows: v, one_sheeted })
    }

    pub fn empty() -> Self {
        ArrowSet { arrows: Vec::new(), one_sheeted: true }
    }

    pub fn arrows(&self) -> &[ArrowId] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn one_sheeted(&self) -> bool {
        self.one_sheeted
    }

    pub fn contains(&self, a: ArrowId) -> bool {
        self.arrows.binary_search(&a).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = ArrowId> + '_ {
        self.arrows.iter().copied()
    }
}

/// A partition of the unit space into invariant blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantPartition {
    pub blocks: Vec<Vec<Atom>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NonPositiveWeight { atom: Atom },
    MassNotOne { total: Rational },
    MissingComposition { left: ArrowId, right: ArrowId },
    SpuriousComposition { left: ArrowId, right: ArrowId },
    CompositionEndpoints { left: ArrowId, right: ArrowId, product: ArrowId },
    Associativity { a: ArrowId, b: ArrowId, c: ArrowId },
    UnitLaw { arrow: ArrowId },
    InverseLaw { arrow: ArrowId },
    WeightMismatch { arrow: ArrowId },
}

impl Violation {
    pub fn describe(&self, g: &FiniteGroupoid) -> String {
        let n = |a: &ArrowId| g.arrow_name(*a).to_string();
        match self {
            Violation::NonPositiveWeight { atom } => format!("weight of atom {} is not positive", g.atom_name(*atom)),
            Violation::MassNotOne { total } => format!("unit weights sum to {} instead of 1", format_pq(total)),
            Violation::MissingComposition { left, right } => {
                format!("composable pair ({}, {}) has no product", n(left), n(right))
            }
            Violation::SpuriousComposition { left, right } => {
                format!("product defined for non-composable pair ({}, {})", n(left), n(right))
            }
            Violation::CompositionEndpoints { left, right, product } => {
                format!("product {} of ({}, {}) has wrong source or range", n(product), n(left), n(right))
            }
            Violation::Associativity { a, b, c } => {
                format!("associativity fails on ({}, {}, {})", n(a), n(b), n(c))
            }
            Violation::UnitLaw { arrow } => format!("unit law fails for {}", n(arrow)),
            Violation::InverseLaw { arrow } => format!("inverse law fails for {}", n(arrow)),
            Violation::WeightMismatch { arrow } => {
                let a = g.arrow(*arrow);
                format!(
                    "weight(s({})) = {} differs from weight(r({})) = {}",
                    a.name,
                    format_pq(g.weight(a.source)),
                    a.name,
                    format_pq(g.weight(a.range))
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub principal: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A finite discrete groupoid over a weighted atomic unit space.
///
/// Arrow `i < n_atoms()` is the unit at atom `i`. The product `g1 g2` is
/// defined exactly when `s(g1) = r(g2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: WeightedUnitSpace,
    arrows: Vec<Arrow>,
    inverse: Vec<ArrowId>,
    compose: Vec<Option<ArrowId>>,
}

impl FiniteGroupoid {
    /// Assembles a groupoid from raw tables, checking only structural
    /// well-formedness. Axioms are checked by [`FiniteGroupoid::validate`].
    pub fn from_parts(
        units: WeightedUnitSpace,
        arrows: Vec<Arrow>,
        inverse: Vec<ArrowId>,
        compose: Vec<Option<ArrowId>>,
    ) -> Result<Self> {
        let n = units.len();
        let m = arrows.len();
        if m < n {
            return Err(Error::Structure("fewer arrows than atoms".into()));
        }
        for (i, a) in arrows.iter().enumerate() {
            if a.source.0 >= n || a.range.0 >= n {
                return Err(Error::Structure(format!("arrow {} has an endpoint outside the unit space", a.name)));
            }
            if i < n && (a.source.0 != i || a.range.0 != i) {
                return Err(Error::Structure(format!("arrow #{i} must be the unit at atom #{i}")));
            }
        }
        let distinct: BTreeSet<&String> = arrows.iter().map(|a| &a.name).collect();
        if distinct.len() != m {
            return Err(Error::Structure("duplicate arrow name".into()));
        }
        if inverse.len() != m || inverse.iter().any(|a| a.0 >= m) {
            return Err(Error::Structure("inverse table has wrong shape".into()));
        }
        if compose.len() != m * m || compose.iter().flatten().any(|a| a.0 >= m) {
            return Err(Error::Structure("composition table has wrong shape".into()));
        }
        Ok(FiniteGroupoid { units, arrows, inverse, compose })
    }

    /// Builds a principal groupoid from the unit space and its non-unit
    /// arrows, each determined by its `(source, range)` pair.
    pub fn principal(units: WeightedUnitSpace, non_units: Vec<Arrow>) -> Result<Self> {
        let n = units.len();
        let mut arrows: Vec<Arrow> = units.atoms().map(|x| Arrow::new(units.name(x), x, x)).collect();
        arrows.extend(non_units);
        let mut by_pair: HashMap<(Atom, Atom), ArrowId> = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if a.source.0 >= n || a.range.0 >= n {
                return Err(Error::Structure(format!("arrow {} has an endpoint outside the unit space", a.name)));
            }
            if i >= n && a.source == a.range {
                return Err(Error::Structure(format!("arrow {} is a loop in a principal groupoid", a.name)));
            }
            if by_pair.insert((a.source, a.range), ArrowId(i)).is_some() {
                return Err(Error::Structure(format!("arrow {} duplicates a (source, range) pair", a.name)));
            }
        }
        let m = arrows.len();
        let lookup = |s: Atom, r: Atom| {
            by_pair
                .get(&(s, r))
                .copied()
                .ok_or_else(|| Error::Structure(format!("relation is not closed: missing pair ({}, {})", s, r)))
        };
        let mut inverse = Vec::with_capacity(m);
        for a in &arrows {
            inverse.push(lookup(a.range, a.source)?);
        }
        let mut compose = vec![None; m * m];
        for (i, a) in arrows.iter().enumerate() {
            for (j, b) in arrows.iter().enumerate() {
                if a.source == b.range {
                    compose[i * m + j] = Some(lookup(b.source, a.range)?);
                }
            }
        }
        Self::from_parts(units, arrows, inverse, compose)
    }

    /// The full equivalence relation on the unit space.
    pub fn full_relation(units: WeightedUnitSpace) -> Self {
        let non_units = pairs_of(units.len())
            .map(|(s, r)| Arrow::new(format!("{}_{}", units.name(s), units.name(r)), s, r))
            .collect();
        Self::principal(units, non_units).expect("full relation is closed")
    }

    /// Disjoint union over blocks of `(full relation on block) × group`.
    ///
    /// The arrow `(y, x, γ)` has source `x`, range `y`, and
    /// `(z, y, γ)(y, x, δ) = (z, x, γδ)`.
    pub fn orbit_product(units: WeightedUnitSpace, blocks: &[(Vec<Atom>, GroupTable)]) -> Result<Self> {
        let n = units.len();
        let mut seen = vec![false; n];
        for (block, _) in blocks {
            for x in block {
                if x.0 >= n {
                    return Err(Error::UnknownAtom(x.0));
                }
                if std::mem::replace(&mut seen[x.0], true) {
                    return Err(Error::Structure(format!("atom {} lies in two blocks", units.name(*x))));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Structure("blocks do not cover the unit space".into()));
        }
        let mut block_of = vec![0; n];
        for (b, (block, _)) in blocks.iter().enumerate() {
            for x in block {
                block_of[x.0] = b;
            }
        }
        // (source, range, element) triples, units first.
        let mut triples: Vec<(Atom, Atom, usize)> =
            units.atoms().map(|x| (x, x, blocks[block_of[x.0]].1.identity())).collect();
        for (block, group) in blocks {
            for &x in block {
                for &y in block {
                    for gamma in 0..group.order() {
                        if x == y && gamma == group.identity() {
                            continue;
                        }
                        triples.push((x, y, gamma));
                    }
                }
            }
        }
        let index: HashMap<(Atom, Atom, usize), ArrowId> =
            triples.iter().enumerate().map(|(i, &t)| (t, ArrowId(i))).collect();
        let arrows: Vec<Arrow> = triples
            .iter()
            .enumerate()
            .map(|(i, &(x, y, gamma))| {
                if i < n {
                    return Arrow::new(units.name(x), x, x);
                }
                let group = &blocks[block_of[x.0]].1;
                let name = if group.order() == 1 {
                    format!("{}_{}", units.name(x), units.name(y))
                } else {
                    format!("{}_{}.{}", units.name(x), units.name(y), group.name(gamma))
                };
                Arrow::new(name, x, y)
            })
            .collect();
        let m = arrows.len();
        let inverse = triples
            .iter()
            .map(|&(x, y, gamma)| index[&(y, x, blocks[block_of[x.0]].1.inverse(gamma))])
            .collect();
        let mut compose = vec![None; m * m];
        for (i, &(x1, y1, g1)) in triples.iter().enumerate() {
            for (j, &(x2, y2, g2)) in triples.iter().enumerate() {
                if x1 == y2 {
                    let group = &blocks[block_of[x1.0]].1;
                    compose[i * m + j] = Some(index[&(x2, y1, group.mul(g1, g2))]);
                }
            }
        }
        Self::from_parts(units, arrows, inverse, compose)
    }

    /// Transformation groupoid of a right action: arrow `(x, γ)` has
    /// `r = x`, `s = xγ`, and `(x, γ₁)(xγ₁, γ₂) = (x, γ₁γ₂)`.
    ///
    /// `action[x][γ]` is the atom `xγ`.
    pub fn transformation_groupoid(
        group: &GroupTable,
        action: &[Vec<usize>],
        units: WeightedUnitSpace,
    ) -> Result<Self> {
        let n = units.len();
        let k = group.order();
        if action.len() != n || action.iter().any(|row| row.len() != k || row.iter().any(|&y| y >= n)) {
            return Err(Error::InvalidAction("action table has wrong shape".into()));
        }
        for x in 0..n {
            if action[x][group.identity()] != x {
                return Err(Error::InvalidAction(format!("identity moves atom {}", units.name(Atom(x)))));
            }
            for a in 0..k {
                for b in 0..k {
                    if action[action[x][a]][b] != action[x][group.mul(a, b)] {
                        return Err(Error::InvalidAction(format!(
                            "not a right action at atom {} with ({}, {})",
                            units.name(Atom(x)),
                            group.name(a),
                            group.name(b)
                        )));
                    }
                }
            }
            for a in 0..k {
                if units.weight(Atom(x)) != units.weight(Atom(action[x][a])) {
                    return Err(Error::NotMeasurePreserving { atom: x, image: action[x][a] });
                }
            }
        }
        let e = group.identity();
        let mut pairs: Vec<(usize, usize)> = (0..n).map(|x| (x, e)).collect();
        for x in 0..n {
            for gamma in (0..k).filter(|&g| g != e) {
                pairs.push((x, gamma));
            }
        }
        let index: HashMap<(usize, usize), ArrowId> = pairs.iter().enumerate().map(|(i, &p)| (p, ArrowId(i))).collect();
        let arrows: Vec<Arrow> = pairs
            .iter()
            .map(|&(x, gamma)| {
                let name = if gamma == e {
                    units.name(Atom(x)).to_string()
                } else {
                    format!("{}.{}", units.name(Atom(x)), group.name(gamma))
                };
                Arrow::new(name, Atom(action[x][gamma]), Atom(x))
            })
            .collect();
        let m = arrows.len();
        let inverse = pairs.iter().map(|&(x, gamma)| index[&(action[x][gamma], group.inverse(gamma))]).collect();
        let mut compose = vec![None; m * m];
        for (i, &(x1, g1)) in pairs.iter().enumerate() {
            for (j, &(x2, g2)) in pairs.iter().enumerate() {
                if action[x1][g1] == x2 {
                    compose[i * m + j] = Some(index[&(x1, group.mul(g1, g2))]);
                }
            }
        }
        Self::from_parts(units, arrows, inverse, compose)
    }

    pub fn units(&self) -> &WeightedUnitSpace {
        &self.units
    }

    pub fn n_atoms(&self) -> usize {
        self.units.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> {
        self.units.atoms()
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn non_unit_arrows(&self) -> impl Iterator<Item = ArrowId> {
        (self.units.len()..self.arrows.len()).map(ArrowId)
    }

    pub fn arrow(&self, g: ArrowId) -> &Arrow {
        &self.arrows[g.0]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_name(&self, g: ArrowId) -> &str {
        &self.arrows[g.0].name
    }

    pub fn atom_name(&self, x: Atom) -> &str {
        self.units.name(x)
    }

    pub fn weight(&self, x: Atom) -> &Rational {
        self.units.weight(x)
    }

    pub fn source(&self, g: ArrowId) -> Atom {
        self.arrows[g.0].source
    }

    pub fn range(&self, g: ArrowId) -> Atom {
        self.arrows[g.0].range
    }

    pub fn unit(&self, x: Atom) -> ArrowId {
        ArrowId(x.0)
    }

    pub fn is_unit(&self, g: ArrowId) -> bool {
        g.0 < self.units.len()
    }

    pub fn inverse(&self, g: ArrowId) -> ArrowId {
        self.inverse[g.0]
    }

    /// `g1 g2`, defined iff `s(g1) = r(g2)`.
    pub fn compose(&self, g1: ArrowId, g2: ArrowId) -> Option<ArrowId> {
        self.compose[g1.0 * self.arrows.len() + g2.0]
    }

    pub fn atom_by_name(&self, name: &str) -> Option<Atom> {
        self.units.names.iter().position(|n| n == name).map(Atom)
    }

    pub fn arrow_by_name(&self, name: &str) -> Option<ArrowId> {
        self.arrows.iter().position(|a| a.name == name).map(ArrowId)
    }

    /// A hash of the unit weights, endpoints, inverses and products,
    /// used to tell apart G-spaces over different groupoids.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.units.weights().hash(&mut h);
        for a in &self.arrows {
            (a.source, a.range).hash(&mut h);
        }
        self.inverse.hash(&mut h);
        self.compose.hash(&mut h);
        h.finish()
    }

    /// Checks every groupoid axiom; violations are collected, not raised.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for x in self.atoms() {
            if !self.weight(x).is_positive() {
                violations.push(Violation::NonPositiveWeight { atom: x });
            }
        }
        let total = self.units.total_mass();
        if !total.is_one() {
            violations.push(Violation::MassNotOne { total });
        }
        let ids: Vec<ArrowId> = self.arrow_ids().collect();
        for &a in &ids {
            for &b in &ids {
                let composable = self.source(a) == self.range(b);
                match (composable, self.compose(a, b)) {
                    (true, None) => violations.push(Violation::MissingComposition { left: a, right: b }),
                    (false, Some(_)) => violations.push(Violation::SpuriousComposition { left: a, right: b }),
                    (true, Some(p)) if self.source(p) != self.source(b) || self.range(p) != self.range(a) => {
                        violations.push(Violation::CompositionEndpoints { left: a, right: b, product: p })
                    }
                    _ => {}
                }
            }
        }
        let structural = violations
            .iter()
            .any(|v| matches!(v, Violation::MissingComposition { .. } | Violation::CompositionEndpoints { .. }));
        if !structural {
            'assoc: for &a in &ids {
                for &b in &ids {
                    let Some(ab) = self.compose(a, b) else { continue };
                    for &c in &ids {
                        let Some(bc) = self.compose(b, c) else { continue };
                        if self.compose(ab, c) != self.compose(a, bc) {
                            violations.push(Violation::Associativity { a, b, c });
                            break 'assoc;
                        }
                    }
                }
            }
        }
        for &g in &ids {
            let (s, r) = (self.source(g), self.range(g));
            if self.compose(self.unit(r), g) != Some(g) || self.compose(g, self.unit(s)) != Some(g) {
                violations.push(Violation::UnitLaw { arrow: g });
            }
            let inv = self.inverse(g);
            let ok = self.inverse(inv) == g
                && self.compose(g, inv) == Some(self.unit(r))
                && self.compose(inv, g) == Some(self.unit(s));
            if !ok {
                violations.push(Violation::InverseLaw { arrow: g });
            }
            if self.weight(s) != self.weight(r) {
                violations.push(Violation::WeightMismatch { arrow: g });
            }
        }
        ValidationReport { violations, principal: self.is_principal() }
    }

    /// Whether `g ↦ (r(g), s(g))` is injective.
    pub fn is_principal(&self) -> bool {
        let pairs: BTreeSet<(Atom, Atom)> = self.arrows.iter().map(|a| (a.range, a.source)).collect();
        pairs.len() == self.arrows.len()
    }

    pub fn is_one_sheeted(&self, arrows: &[ArrowId]) -> bool {
        let sources: BTreeSet<Atom> = arrows.iter().map(|&g| self.source(g)).collect();
        let ranges: BTreeSet<Atom> = arrows.iter().map(|&g| self.range(g)).collect();
        let distinct: BTreeSet<ArrowId> = arrows.iter().copied().collect();
        sources.len() == distinct.len() && ranges.len() == distinct.len()
    }

    pub fn unit_set(&self) -> ArrowSet {
        ArrowSet { arrows: (0..self.n_atoms()).map(ArrowId).collect(), one_sheeted: true }
    }

    pub fn all_arrows(&self) -> ArrowSet {
        ArrowSet::new(self, self.arrow_ids()).expect("own arrows")
    }

    /// `μ^G(B) = Σ_{g ∈ B} μ(s(g))`.
    pub fn mu_g(&self, arrows: &ArrowSet) -> Rational {
        self.mass_of_arrows(arrows.iter())
    }

    pub fn mass_of_arrows(&self, arrows: impl IntoIterator<Item = ArrowId>) -> Rational {
        arrows.into_iter().fold(Rational::zero(), |acc, g| acc + self.weight(self.source(g)))
    }

    /// Greedy decomposition into one-sheeted pieces, scanning arrows in id
    /// order and placing each in the first piece where it fits. The first
    /// piece is the unit set.
    pub fn one_sheeted_decomposition(&self) -> Vec<ArrowSet> {
        let n = self.n_atoms();
        let mut pieces: Vec<(Vec<ArrowId>, Vec<bool>, Vec<bool>)> = Vec::new();
        for g in self.arrow_ids() {
            let (s, r) = (self.source(g).0, self.range(g).0);
            let slot = pieces.iter().position(|(_, src, rng)| !src[s] && !rng[r]);
            let idx = match slot {
                Some(i) => i,
                None => {
                    pieces.push((Vec::new(), vec![false; n], vec![false; n]));
                    pieces.len() - 1
                }
            };
            let piece = &mut pieces[idx];
            piece.0.push(g);
            piece.1[s] = true;
            piece.2[r] = true;
        }
        pieces.into_iter().map(|(arrows, _, _)| ArrowSet { arrows, one_sheeted: true }).collect()
    }

    /// `φ_E = r ∘ (s|_E)⁻¹` as a map from `s(E)` to `r(E)`.
    pub fn partial_bijection(&self, e: &ArrowSet) -> Result<BTreeMap<Atom, Atom>> {
        if !e.one_sheeted() {
            return Err(Error::NotOneSheeted);
        }
        Ok(e.iter().map(|g| (self.source(g), self.range(g))).collect())
    }

    /// Membership mask of the subgroupoid generated by `arrows`: all
    /// products of generators and their inverses, together with the units.
    pub fn closure_mask(&self, arrows: impl IntoIterator<Item = ArrowId>) -> Vec<bool> {
        let mut gens: Vec<ArrowId> = Vec::new();
        for g in arrows {
            gens.push(g);
            gens.push(self.inverse(g));
        }
        gens.sort_unstable();
        gens.dedup();
        let mut by_source: Vec<Vec<ArrowId>> = vec![Vec::new(); self.n_atoms()];
        for &t in &gens {
            by_source[self.source(t).0].push(t);
        }
        let mut member = vec![false; self.n_arrows()];
        let mut queue: VecDeque<ArrowId> = VecDeque::new();
        for x in self.atoms() {
            member[self.unit(x).0] = true;
            queue.push_back(self.unit(x));
        }
        while let Some(h) = queue.pop_front() {
            for &t in &by_source[self.range(h).0] {
                if let Some(p) = self.compose(t, h) {
                    if !member[p.0] {
                        member[p.0] = true;
                        queue.push_back(p);
                    }
                }
            }
        }
        member
    }

    pub fn generates(&self, arrows: impl IntoIterator<Item = ArrowId>) -> bool {
        self.closure_mask(arrows).into_iter().all(|b| b)
    }

    /// Smallest wide subgroupoid containing `a`.
    pub fn generated_subgroupoid(&self, a: &ArrowSet) -> FiniteGroupoid {
        let mask = self.closure_mask(a.iter());
        self.wide_subgroupoid(&mask).expect("closure is a subgroupoid")
    }

    /// The wide subgroupoid with the given arrow mask. Fails unless the
    /// mask contains the units and is closed under products and inverses.
    pub fn wide_subgroupoid(&self, mask: &[bool]) -> Result<FiniteGroupoid> {
        if mask.len() != self.n_arrows() {
            return Err(Error::NotSubgroupoid("mask has wrong length".into()));
        }
        let keep: Vec<ArrowId> = self.arrow_ids().filter(|g| mask[g.0]).collect();
        for x in self.atoms() {
            if !mask[self.unit(x).0] {
                return Err(Error::NotSubgroupoid(format!("unit {} missing", self.atom_name(x))));
            }
        }
        for &g in &keep {
            if !mask[self.inverse(g).0] {
                return Err(Error::NotSubgroupoid(format!("inverse of {} missing", self.arrow_name(g))));
            }
            for &h in &keep {
                if let Some(p) = self.compose(g, h) {
                    if !mask[p.0] {
                        return Err(Error::NotSubgroupoid(format!(
                            "product of {} and {} missing",
                            self.arrow_name(g),
                            self.arrow_name(h)
                        )));
                    }
                }
            }
        }
        let atom_map: Vec<Option<Atom>> = self.atoms().map(Some).collect();
        Ok(self.induced(self.units.clone(), &atom_map, &keep))
    }

    /// Builds the groupoid on `keep` (closed, units first) with atoms
    /// renumbered by `atom_map`.
    fn induced(&self, units: WeightedUnitSpace, atom_map: &[Option<Atom>], keep: &[ArrowId]) -> FiniteGroupoid {
        let mut new_index = vec![None; self.n_arrows()];
        for (i, g) in keep.iter().enumerate() {
            new_index[g.0] = Some(ArrowId(i));
        }
        let arrows: Vec<Arrow> = keep
            .iter()
            .map(|&g| {
                let a = self.arrow(g);
                Arrow::new(a.name.clone(), atom_map[a.source.0].unwrap(), atom_map[a.range.0].unwrap())
            })
            .collect();
        let m = keep.len();
        let inverse = keep.iter().map(|&g| new_index[self.inverse(g).0].unwrap()).collect();
        let mut compose = vec![None; m * m];
        for (i, &g) in keep.iter().enumerate() {
            for (j, &h) in keep.iter().enumerate() {
                compose[i * m + j] = self.compose(g, h).map(|p| new_index[p.0].unwrap());
            }
        }
        FiniteGroupoid::from_parts(units, arrows, inverse, compose).expect("induced tables are well formed")
    }

    /// Arrows with source and range in `y`; weights are inherited unchanged.
    pub fn restriction(&self, y: &[Atom]) -> Result<FiniteGroupoid> {
        if y.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut in_y = vec![false; self.n_atoms()];
        for x in y {
            if x.0 >= self.n_atoms() {
                return Err(Error::UnknownAtom(x.0));
            }
            in_y[x.0] = true;
        }
        let mut atom_map = vec![None; self.n_atoms()];
        let mut names = Vec::new();
        let mut weights = Vec::new();
        for x in self.atoms().filter(|x| in_y[x.0]) {
            atom_map[x.0] = Some(Atom(names.len()));
            names.push(self.atom_name(x).to_string());
            weights.push(self.weight(x).clone());
        }
        let keep: Vec<ArrowId> =
            self.arrow_ids().filter(|&g| in_y[self.source(g).0] && in_y[self.range(g).0]).collect();
        let units = WeightedUnitSpace::new(names, weights)?;
        Ok(self.induced(units, &atom_map, &keep))
    }

    /// The principal groupoid `(r × s)(G)`; each pair is named after the
    /// first arrow realizing it.
    pub fn orbit_relation(&self) -> FiniteGroupoid {
        let mut seen = BTreeSet::new();
        let mut non_units = Vec::new();
        for g in self.arrow_ids() {
            let a = self.arrow(g);
            if a.source != a.range && seen.insert((a.source, a.range)) {
                non_units.push(a.clone());
            }
        }
        FiniteGroupoid::principal(self.units.clone(), non_units).expect("orbit relation is an equivalence relation")
    }

    /// Finest partition of the atoms into invariant blocks (the orbits),
    /// ordered by least atom.
    pub fn invariant_partition(&self) -> InvariantPartition {
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(self.n_atoms());
        for a in &self.arrows {
            uf.union(a.source.0, a.range.0);
        }
        let mut blocks: BTreeMap<usize, Vec<Atom>> = BTreeMap::new();
        for x in self.atoms() {
            blocks.entry(uf.find(x.0)).or_default().push(x);
        }
        let mut blocks: Vec<Vec<Atom>> = blocks.into_values().collect();
        blocks.sort();
        InvariantPartition { blocks }
    }

    /// Arrows with source and range `x`.
    pub fn isotropy_arrows(&self, x: Atom) -> Vec<ArrowId> {
        self.arrow_ids().filter(|&g| self.source(g) == x && self.range(g) == x).collect()
    }

    /// The isotropy group at `x` with the induced multiplication.
    pub fn isotropy(&self, x: Atom) -> GroupTable {
        let elems = self.isotropy_arrows(x);
        let pos: HashMap<ArrowId, usize> = elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let table = elems
            .iter()
            .map(|&a| elems.iter().map(|&b| pos[&self.compose(a, b).expect("loops compose")]).collect())
            .collect();
        let names = elems.iter().map(|&g| self.arrow_name(g).to_string()).collect();
        GroupTable::new(names, table).expect("isotropy of a valid groupoid is a group")
    }
}

/// Ordered pairs `(s, r)` of distinct indices below `n`, `s` major.
fn pairs_of(n: usize) -> impl Iterator<Item = (Atom, Atom)> {
    (0..n).flat_map(move |s| (0..n).filter(move |&r| r != s).map(move |r| (Atom(s), Atom(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, rat};

    #[test]
    fn r2_is_valid_and_principal() {
        let g = fixtures::r2();
        let report = g.validate();
        assert!(report.is_valid(), "{:?}", report);
        assert!(report.principal);
        assert_eq!(g.n_arrows(), 4);
    }

    #[test]
    fn z2pt_is_valid_not_principal() {
        let report = fixtures::z2pt().validate();
        assert!(report.is_valid());
        assert!(!report.principal);
    }

    #[test]
    fn unequal_weights_break_invariance() {
        let units = WeightedUnitSpace::new(vec!["x".into(), "y".into()], vec![rat(1, 3), rat(2, 3)]).unwrap();
        let g = FiniteGroupoid::full_relation(units);
        let report = g.validate();
        assert!(report.violations.iter().any(|v| matches!(v, Violation::WeightMismatch { .. })));
        let f = g.arrow_by_name("x_y").unwrap();
        assert!(report.violations.contains(&Violation::WeightMismatch { arrow: f }));
    }

    #[test]
    fn mu_g_values() {
        let g = fixtures::r2();
        let f = g.arrow_by_name("f").unwrap();
        assert_eq!(g.mu_g(&ArrowSet::new(&g, [f]).unwrap()), rat(1, 2));
        assert_eq!(g.mu_g(&g.all_arrows()), int(2));
        assert_eq!(g.mu_g(&ArrowSet::empty()), int(0));
        assert_eq!(g.mu_g(&g.unit_set()), int(1));
        assert!(ArrowSet::new(&g, [ArrowId(9)]).is_err());
    }

    #[test]
    fn decomposition_of_fixtures() {
        let g = fixtures::triv2();
        assert_eq!(g.one_sheeted_decomposition(), vec![g.unit_set()]);

        // f and f⁻¹ have disjoint sources and ranges, so greedy packs them together.
        let g = fixtures::r2();
        let d = g.one_sheeted_decomposition();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], g.unit_set());

        let g = fixtures::r3();
        let d = g.one_sheeted_decomposition();
        assert_eq!(d.len(), 3);
        let sigma = g.partial_bijection(&d[1]).unwrap();
        let a = g.atom_by_name("a").unwrap();
        let b = g.atom_by_name("b").unwrap();
        let c = g.atom_by_name("c").unwrap();
        assert_eq!(sigma, BTreeMap::from([(a, b), (b, c), (c, a)]));
    }

    #[test]
    fn partial_bijection_rejects_non_one_sheeted() {
        let g = fixtures::r2();
        let x = g.atom_by_name("x").unwrap();
        let f = g.arrow_by_name("f").unwrap();
        let bad = ArrowSet::new(&g, [g.unit(x), g.inverse(f)]).unwrap();
        assert!(!bad.one_sheeted());
        assert_eq!(g.partial_bijection(&bad), Err(Error::NotOneSheeted));
        let id = g.partial_bijection(&g.unit_set()).unwrap();
        assert!(id.iter().all(|(s, r)| s == r));
    }

    #[test]
    fn generated_subgroupoids() {
        let g = fixtures::r3();
        let ab = g.arrow_by_name("ab").unwrap();
        let bc = g.arrow_by_name("bc").unwrap();
        assert_eq!(g.generated_subgroupoid(&ArrowSet::new(&g, [ab, bc]).unwrap()), g);
        let units_only = g.generated_subgroupoid(&ArrowSet::empty());
        assert_eq!(units_only.n_arrows(), 3);
        let z = fixtures::z2pt();
        let a = z.arrow_by_name("a").unwrap();
        assert_eq!(z.generated_subgroupoid(&ArrowSet::new(&z, [a]).unwrap()), z);
    }

    #[test]
    fn restrictions() {
        let g = fixtures::r3();
        let a = g.atom_by_name("a").unwrap();
        let b = g.atom_by_name("b").unwrap();
        let r = g.restriction(&[a, b]).unwrap();
        assert_eq!(r.n_arrows(), 4);
        assert!(r.units().weights().iter().all(|w| *w == rat(1, 3)));
        let r = g.restriction(&[a]).unwrap();
        assert_eq!(r.n_arrows(), 1);
        assert_eq!(r.units().total_mass(), rat(1, 3));
        let z = fixtures::z2pt();
        assert_eq!(z.restriction(&[Atom(0)]).unwrap(), z);
        assert_eq!(g.restriction(&[]), Err(Error::EmptySubset));
        assert_eq!(g.restriction(&[Atom(7)]), Err(Error::UnknownAtom(7)));
    }

    #[test]
    fn orbit_relations() {
        let z = fixtures::z2pt().orbit_relation();
        assert_eq!(z.n_arrows(), 1);
        assert_eq!(fixtures::r2().orbit_relation(), fixtures::r2());
        let swap = fixtures::swap().orbit_relation();
        assert!(swap.is_principal());
        assert_eq!(swap.n_arrows(), 4);
        assert_eq!(swap.orbit_relation(), swap);
    }

    #[test]
    fn invariant_partitions() {
        assert_eq!(fixtures::r3().invariant_partition().blocks.len(), 1);
        assert_eq!(fixtures::triv_action().invariant_partition().blocks, vec![vec![Atom(0)], vec![Atom(1)]]);
        assert_eq!(fixtures::triv2().invariant_partition().blocks.len(), 2);
    }

    #[test]
    fn transformation_groupoids() {
        let swap = fixtures::swap();
        assert_eq!(swap.n_arrows(), 4);
        assert!(swap.validate().is_valid());
        assert!(swap.is_principal());
        let triv = fixtures::triv_action();
        assert!(triv.validate().is_valid());
        assert!(!triv.is_principal());
        assert_eq!(triv.isotropy(Atom(0)).order(), 2);
        assert_eq!(triv.isotropy(Atom(1)).order(), 2);
        let t = FiniteGroupoid::transformation_groupoid(
            &GroupTable::trivial(),
            &[vec![0], vec![1], vec![2]],
            WeightedUnitSpace::uniform(3),
        )
        .unwrap();
        assert_eq!(t.n_arrows(), 3);
    }

    #[test]
    fn transformation_groupoid_rejects_bad_input() {
        let units = WeightedUnitSpace::new(vec!["x".into(), "y".into()], vec![rat(1, 3), rat(2, 3)]).unwrap();
        let err = FiniteGroupoid::transformation_groupoid(&GroupTable::cyclic(2), &[vec![0, 1], vec![1, 0]], units);
        assert!(matches!(err, Err(Error::NotMeasurePreserving { .. })));
        let bad = GroupTable::new(vec!["e".into(), "a".into()], vec![vec![0, 1], vec![1, 1]]);
        assert!(bad.is_err());
    }

    #[test]
    fn isotropy_groups() {
        assert_eq!(fixtures::z2pt().isotropy(Atom(0)).order(), 2);
        assert_eq!(fixtures::r2().isotropy(Atom(0)).order(), 1);
    }

    #[test]
    fn orbit_product_matches_transformation_groupoid() {
        let units = WeightedUnitSpace::uniform(2);
        let g = FiniteGroupoid::orbit_product(units, &[(vec![Atom(0)], GroupTable::cyclic(2)), (vec![Atom(1)], GroupTable::cyclic(2))])
            .unwrap();
        assert!(g.validate().is_valid());
        assert_eq!(g.n_arrows(), 4);
        assert!(!g.is_principal());
        let units = WeightedUnitSpace::uniform(3);
        let g = FiniteGroupoid::orbit_product(units, &[(vec![Atom(0), Atom(1), Atom(2)], GroupTable::cyclic(3))]).unwrap();
        assert!(g.validate().is_valid());
        assert_eq!(g.n_arrows(), 27);
    }

    #[test]
    fn missing_composition_is_reported() {
        let g = fixtures::r2();
        let mut compose = g.compose.clone();
        let f = g.arrow_by_name("f").unwrap();
        let finv = g.inverse(f);
        compose[f.0 * g.n_arrows() + finv.0] = None;
        let broken = FiniteGroupoid::from_parts(g.units.clone(), g.arrows.clone(), g.inverse.clone(), compose).unwrap();
        let report = broken.validate();
        assert!(report.violations.contains(&Violation::MissingComposition { left: f, right: finv }));
    }
}
