//! G-spaces, simplicial G-complexes, chain spaces and boundary operators.

mod gspace;

use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::Zero;
use petgraph::unionfind::UnionFind;

pub use gspace::{FundamentalDomain, GSpace, QuasiPeriodicDecomposition, TransversalRule};

use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, ArrowSet, Atom, FiniteGroupoid};
use crate::hilbert::{self, InvariantSubspace, LinearOperator};
use crate::linalg::Matrix;
use crate::rational::{int, Rational};

/// A simplicial G-complex: graded sets of ordered vertex tuples.
///
/// Level `n` holds `(n+1)`-tuples of level-0 points. Level 0 is always the
/// full vertex set.
#[derive(Debug)]
pub struct GComplex {
    groupoid: FiniteGroupoid,
    vertices: GSpace,
    levels: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    spaces: Vec<OnceLock<Result<GSpace>>>,
    chains: Vec<OnceLock<ChainSpace>>,
}

impl Clone for GComplex {
    fn clone(&self) -> Self {
        GComplex::new(self.groupoid.clone(), self.vertices.clone(), self.levels[1..].to_vec()).expect("already checked")
    }
}

impl GComplex {
    /// Assembles a complex from its vertex space and its levels `1, 2, …`.
    /// Tuples are deduplicated and sorted; the complex axioms are checked by
    /// [`validate_complex`].
    pub fn new(groupoid: FiniteGroupoid, vertices: GSpace, higher: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if !vertices.is_over(&groupoid) {
            return Err(Error::GroupoidMismatch);
        }
        let mut levels = vec![(0..vertices.len()).map(|v| vec![v]).collect::<Vec<_>>()];
        for (i, level) in higher.into_iter().enumerate() {
            let n = i + 1;
            let set: BTreeSet<Vec<usize>> = level.into_iter().collect();
            if let Some(t) = set.iter().find(|t| t.len() != n + 1 || t.iter().any(|&v| v >= vertices.len())) {
                return Err(Error::InvalidComplex(format!("malformed tuple {t:?} at level {n}")));
            }
            levels.push(set.into_iter().collect());
        }
        while levels.len() > 1 && levels.last().is_some_and(Vec::is_empty) {
            levels.pop();
        }
        let index = levels.iter().map(|l| l.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect()).collect();
        let spaces = (0..levels.len()).map(|_| OnceLock::new()).collect();
        let chains = (0..levels.len()).map(|_| OnceLock::new()).collect();
        Ok(GComplex { groupoid, vertices, levels, index, spaces, chains })
    }

    pub fn groupoid(&self) -> &FiniteGroupoid {
        &self.groupoid
    }

    pub fn vertices(&self) -> &GSpace {
        &self.vertices
    }

    /// Highest nonempty level (0 for a vertex-only complex).
    pub fn top_dim(&self) -> usize {
        self.levels.len() - 1
    }

    /// Ordered tuples at level `n`; empty above the top.
    pub fn level(&self, n: usize) -> &[Vec<usize>] {
        self.levels.get(n).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        !tuple.is_empty() && self.index.get(tuple.len() - 1).is_some_and(|ix| ix.contains_key(tuple))
    }

    /// Level `n` as a G-space under the diagonal action.
    pub fn level_space(&self, n: usize) -> Result<&GSpace> {
        if n > self.top_dim() {
            return Err(Error::MissingLevel(n));
        }
        if n == 0 {
            return Ok(&self.vertices);
        }
        self.spaces[n].get_or_init(|| self.build_level_space(n)).as_ref().map_err(Clone::clone)
    }

    fn build_level_space(&self, n: usize) -> Result<GSpace> {
        let tuples = &self.levels[n];
        let g = &self.groupoid;
        let mut anchors = Vec::with_capacity(tuples.len());
        for t in tuples {
            let x = self.vertices.anchor(t[0]);
            if t.iter().any(|&v| self.vertices.anchor(v) != x) {
                return Err(Error::InvalidComplex(format!("tuple {t:?} at level {n} mixes fibers")));
            }
            anchors.push(x);
        }
        let labels = tuples.iter().map(|t| format!("({})", t.iter().map(|&v| self.vertices.label(v)).join(","))).collect();
        let mut table = vec![vec![None; tuples.len()]; g.n_arrows()];
        for a in g.arrow_ids() {
            for (u, t) in tuples.iter().enumerate() {
                if g.source(a) != anchors[u] {
                    continue;
                }
                let image: Vec<usize> = t.iter().map(|&v| self.vertices.act(a, v).expect("vertex action")).collect();
                let Some(&j) = self.index[n].get(&image) else {
                    return Err(Error::LevelNotInvariant(n));
                };
                table[a.0][u] = Some(j as u32);
            }
        }
        Ok(GSpace::from_table(g, anchors, labels, table))
    }

    /// The chain space of antisymmetric functions on level `n`.
    pub fn chain_space(&self, n: usize) -> ChainSpace {
        if n > self.top_dim() {
            return ChainSpace::empty(n, self.vertices.n_atoms());
        }
        self.chains[n].get_or_init(|| ChainSpace::new(self, n)).clone()
    }

    fn chain_ref(&self, n: usize) -> Option<&ChainSpace> {
        (n <= self.top_dim()).then(|| self.chains[n].get_or_init(|| ChainSpace::new(self, n)))
    }

    /// Whether every level of `self` is contained in the same level of `other`.
    pub fn is_subcomplex_of(&self, other: &GComplex) -> bool {
        self.vertices == other.vertices
            && self.groupoid == other.groupoid
            && self.levels.iter().flatten().all(|t| other.contains(t))
    }
}

/// Oriented basis of the antisymmetric chains at one level: one sorted
/// tuple per unordered simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSpace {
    pub level: usize,
    pub basis: Vec<Vec<usize>>,
    pub anchors: Vec<Atom>,
    pub weights: Vec<Rational>,
    /// Basis indices grouped by anchor.
    pub fibers: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl ChainSpace {
    fn empty(level: usize, n_atoms: usize) -> Self {
        ChainSpace {
            level,
            basis: Vec::new(),
            anchors: Vec::new(),
            weights: Vec::new(),
            fibers: vec![Vec::new(); n_atoms],
            index: HashMap::new(),
        }
    }

    fn new(complex: &GComplex, level: usize) -> Self {
        let vs = &complex.vertices;
        let basis: Vec<Vec<usize>> = complex.levels[level].iter().filter(|t| t.windows(2).all(|w| w[0] < w[1])).cloned().collect();
        let anchors: Vec<Atom> = basis.iter().map(|t| vs.anchor(t[0])).collect();
        let weights = anchors.iter().map(|x| vs.atom_weights()[x.0].clone()).collect();
        let mut fibers = vec![Vec::new(); vs.n_atoms()];
        for (i, x) in anchors.iter().enumerate() {
            fibers[x.0].push(i);
        }
        let index = basis.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        ChainSpace { level, basis, anchors, weights, fibers, index }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, sorted: &[usize]) -> Option<usize> {
        self.index.get(sorted).copied()
    }

    /// Basis index and orientation sign of an ordered tuple.
    pub fn oriented(&self, tuple: &[usize]) -> Option<(usize, i64)> {
        let (sorted, sign) = sort_with_sign(tuple);
        self.index_of(&sorted).map(|i| (i, sign))
    }
}

/// Sorts a tuple of distinct entries and returns the parity sign of the
/// sorting permutation.
pub fn sort_with_sign(tuple: &[usize]) -> (Vec<usize>, i64) {
    let mut inversions = 0;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] > tuple[j] {
                inversions += 1;
            }
        }
    }
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    (sorted, if inversions % 2 == 0 { 1 } else { -1 })
}

/// Sparse boundary `∂_n` in the oriented bases: column `j` lists
/// `(row, coefficient)` pairs.
///
/// On antisymmetric functions the face sum counts each face `n+1` times,
/// so deleting the `p`-th sorted vertex contributes `(n+1)(-1)^p`.
pub(crate) fn boundary_columns(complex: &GComplex, n: usize) -> Result<Vec<Vec<(usize, i64)>>> {
    let Some(top) = complex.chain_ref(n) else {
        return Ok(Vec::new());
    };
    let bottom = complex.chain_ref(n - 1).ok_or(Error::MissingLevel(n - 1))?;
    let scale = (n + 1) as i64;
    top.basis
        .iter()
        .map(|t| {
            (0..=n)
                .map(|p| {
                    let face: Vec<usize> = t.iter().enumerate().filter(|&(i, _)| i != p).map(|(_, &v)| v).collect();
                    let row = bottom.index_of(&face).ok_or_else(|| {
                        Error::InvalidComplex(format!("face {face:?} of {t:?} is missing"))
                    })?;
                    Ok((row, if p % 2 == 0 { scale } else { -scale }))
                })
                .collect()
        })
        .collect()
}

/// Matrix of `∂_n: C_n → C_{n-1}` with the weighted inner products.
pub fn boundary_matrix(complex: &GComplex, n: usize) -> Result<LinearOperator<Rational>> {
    if n == 0 {
        return Err(Error::MissingLevel(0));
    }
    let top = complex.chain_space(n);
    let bottom = complex.chain_space(n - 1);
    let mut matrix = Matrix::zeros(bottom.len(), top.len());
    for (j, col) in boundary_columns(complex, n)?.into_iter().enumerate() {
        for (i, c) in col {
            matrix.set(i, j, int(c));
        }
    }
    Ok(LinearOperator::new(matrix, top.weights.clone(), bottom.weights.clone()))
}

/// Dense block of `∂_n` between the fiber-`x` parts of levels `n` and `n-1`.
pub(crate) fn boundary_block(complex: &GComplex, n: usize, x: usize) -> Result<Matrix<Rational>> {
    let top = complex.chain_space(n);
    let bottom = complex.chain_space(n.saturating_sub(1));
    let cols = &top.fibers[x];
    let rows = &bottom.fibers[x];
    let mut local_row = HashMap::new();
    for (i, &r) in rows.iter().enumerate() {
        local_row.insert(r, i);
    }
    let mut m = Matrix::zeros(rows.len(), cols.len());
    if n == 0 || cols.is_empty() {
        return Ok(m);
    }
    let columns = boundary_columns(complex, n)?;
    for (j, &c) in cols.iter().enumerate() {
        for &(r, v) in &columns[c] {
            m.set(local_row[&r], j, int(v));
        }
    }
    Ok(m)
}

/// Lifts fiber-local chain coefficients to antisymmetric functions on the
/// ordered tuples of the same fiber in [`GComplex::level_space`].
pub(crate) fn lift_to_tuples(
    complex: &GComplex,
    n: usize,
    x: usize,
    vectors: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>> {
    let space = complex.level_space(n)?;
    let chains = complex.chain_space(n);
    let mut local = HashMap::new();
    for (i, &b) in chains.fibers[x].iter().enumerate() {
        local.insert(b, i);
    }
    let points: Vec<usize> = space.fibers()[x].clone();
    let tuples = complex.level(n);
    let coords: Vec<(usize, i64)> = points
        .iter()
        .map(|&p| {
            let (b, sign) = chains.oriented(&tuples[p]).expect("sorted tuple is in the basis");
            (local[&b], sign)
        })
        .collect();
    Ok(vectors
        .iter()
        .map(|v| {
            coords.iter().map(|&(i, sign)| if sign > 0 { v[i].clone() } else { -v[i].clone() }).collect()
        })
        .collect())
}

/// `(A_n f)(u) = ((n+1)!)⁻¹ Σ_σ sgn(σ) f(σ⁻¹ u)` for a function on the
/// ordered tuples of level `n`. Permuted tuples outside the level count as 0.
pub fn antisymmetrize(complex: &GComplex, n: usize, f: &[Rational]) -> Result<Vec<Rational>> {
    let tuples = complex.level(n);
    if f.len() != tuples.len() {
        return Err(Error::InvalidComplex("function length differs from the level".into()));
    }
    let perms: Vec<Vec<usize>> = (0..=n).permutations(n + 1).collect();
    let factorial = int(perms.len() as i64);
    let index = &complex.index[n.min(complex.top_dim())];
    Ok(tuples
        .iter()
        .map(|u| {
            let total = perms.iter().fold(Rational::zero(), |acc, p| {
                let permuted: Vec<usize> = p.iter().map(|&i| u[i]).collect();
                match index.get(&permuted) {
                    Some(&j) if !f[j].is_zero() => {
                        let (_, sign) = sort_with_sign(p);
                        if sign > 0 {
                            acc + &f[j]
                        } else {
                            acc - &f[j]
                        }
                    }
                    _ => acc,
                }
            });
            total / &factorial
        })
        .collect())
}

/// The invariant subspace of antisymmetric functions on level `n`, the
/// image of the antisymmetrizer.
pub fn antisymmetric_subspace(complex: &GComplex, n: usize) -> Result<InvariantSubspace<'_, Rational>> {
    let space = complex.level_space(n)?;
    let chains = complex.chain_space(n);
    let local = (0..space.n_atoms())
        .map(|x| {
            let d = chains.fibers[x].len();
            let units: Vec<Vec<Rational>> = (0..d)
                .map(|i| {
                    let mut e = vec![Rational::zero(); d];
                    e[i] = int(1);
                    e
                })
                .collect();
            lift_to_tuples(complex, n, x, &units)
        })
        .collect::<Result<Vec<_>>>()?;
    InvariantSubspace::from_fiber_vectors(space, local)
}

/// `α_n` computed from a fundamental domain and from the antisymmetrizer's image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alpha {
    pub by_domain: Rational,
    pub by_projection: Rational,
}

impl Alpha {
    pub fn agree(&self) -> bool {
        self.by_domain == self.by_projection
    }
}

/// `α_n = μ(G \ Σ⁽ⁿ⁾) / (n+1)!`, also computed as the von Neumann dimension
/// of the antisymmetric chains. Levels above the top give zero.
pub fn alpha(complex: &GComplex, n: usize) -> Result<Alpha> {
    if n > complex.top_dim() {
        return Ok(Alpha { by_domain: Rational::zero(), by_projection: Rational::zero() });
    }
    let space = complex.level_space(n)?;
    let domain = space.check_quasi_periodic()?;
    let factorial: i64 = (1..=(n as i64 + 1)).product();
    let by_domain = domain.measure / int(factorial);
    let by_projection = hilbert::vn_dimension(&antisymmetric_subspace(complex, n)?)?;
    Ok(Alpha { by_domain, by_projection })
}

/// Operator norm of `∂_n` on `Γ²` chains, via singular values of the fiber blocks.
pub fn boundary_norm(complex: &GComplex, n: usize) -> Result<f64> {
    let mut norm: f64 = 0.0;
    for x in 0..complex.vertices.n_atoms() {
        let block = boundary_block(complex, n, x)?;
        if block.rows() == 0 || block.cols() == 0 {
            continue;
        }
        let svd = block.to_f64().svd(false, false);
        norm = norm.max(svd.singular_values.max());
    }
    Ok(norm / ((n + 1) as f64).sqrt())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexViolation {
    PermutationClosure { level: usize, tuple: Vec<usize> },
    Degenerate { level: usize, tuple: Vec<usize> },
    FaceClosure { level: usize, tuple: Vec<usize>, face: Vec<usize> },
    MixedFibers { level: usize, tuple: Vec<usize> },
    NotInvariant { level: usize },
    NotFree { level: usize, arrow: usize, point: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexReport {
    pub violations: Vec<ComplexViolation>,
    /// Largest number of simplices (of any dimension) containing a vertex.
    pub ulb_bound: usize,
    /// Fundamental-domain measure of each level, where defined.
    pub domain_measures: Vec<Option<Rational>>,
}

impl ComplexReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the simplicial G-complex axioms and reports the ULB constant.
pub fn validate_complex(complex: &GComplex) -> ComplexReport {
    let mut violations = Vec::new();
    let vs = &complex.vertices;
    if let Err(Error::NotFree { arrow, point }) = vs.check_free() {
        violations.push(ComplexViolation::NotFree { level: 0, arrow, point });
    }
    let mut per_vertex = vec![0usize; vs.len()];
    let mut domain_measures = vec![vs.check_quasi_periodic().ok().map(|d| d.measure)];
    for v in per_vertex.iter_mut() {
        *v = 1;
    }
    for n in 1..=complex.top_dim() {
        let mut level_ok = true;
        for t in complex.level(n) {
            if t[0] == t[1] || t.iter().collect::<BTreeSet<_>>().len() != t.len() {
                violations.push(ComplexViolation::Degenerate { level: n, tuple: t.clone() });
                level_ok = false;
                continue;
            }
            let x = vs.anchor(t[0]);
            if t.iter().any(|&v| vs.anchor(v) != x) {
                violations.push(ComplexViolation::MixedFibers { level: n, tuple: t.clone() });
                level_ok = false;
            }
            for p in (0..=n).permutations(n + 1) {
                let permuted: Vec<usize> = p.iter().map(|&i| t[i]).collect();
                if !complex.contains(&permuted) {
                    violations.push(ComplexViolation::PermutationClosure { level: n, tuple: permuted });
                    level_ok = false;
                    break;
                }
            }
            for j in 0..=n {
                let face: Vec<usize> = t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v).collect();
                if !complex.contains(&face) {
                    violations.push(ComplexViolation::FaceClosure { level: n, tuple: t.clone(), face });
                    level_ok = false;
                    break;
                }
            }
            if t.windows(2).all(|w| w[0] < w[1]) {
                for &v in t {
                    per_vertex[v] += 1;
                }
            }
        }
        let measure = if level_ok {
            match complex.level_space(n) {
                Ok(space) => match space.check_quasi_periodic() {
                    Ok(d) => Some(d.measure),
                    Err(Error::NotFree { arrow, point }) => {
                        violations.push(ComplexViolation::NotFree { level: n, arrow, point });
                        None
                    }
                    Err(_) => None,
                },
                Err(_) => {
                    violations.push(ComplexViolation::NotInvariant { level: n });
                    None
                }
            }
        } else {
            None
        };
        domain_measures.push(measure);
    }
    ComplexReport { violations, ulb_bound: per_vertex.into_iter().max().unwrap_or(0), domain_measures }
}

/// Fails unless the complex satisfies every axiom.
pub fn require_valid(complex: &GComplex) -> Result<()> {
    let report = validate_complex(complex);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidComplex(format!("{v:?}"))),
    }
}

/// The two-level complex of a disjoint family of one-sheeted sets: level 0
/// is `G` under left translation, level 1 holds the ordered pairs
/// `(g₀, g₁)` with `r(g₀) = r(g₁)`, `g₀ ≠ g₁` and `g₀⁻¹g₁` or `g₁⁻¹g₀` in
/// some member.
pub fn build_graphing_complex(g: &FiniteGroupoid, graphing: &[ArrowSet]) -> Result<GComplex> {
    let mut member = vec![false; g.n_arrows()];
    for e in graphing {
        for a in e.iter() {
            if a.0 >= g.n_arrows() {
                return Err(Error::UnknownArrow(a.0));
            }
            if std::mem::replace(&mut member[a.0], true) {
                return Err(Error::NotDisjoint);
            }
        }
    }
    let vertices = GSpace::left_regular(g);
    let mut edges = Vec::new();
    for h0 in g.arrow_ids() {
        for h1 in g.arrow_ids() {
            if h0 == h1 || g.range(h0) != g.range(h1) {
                continue;
            }
            let q = g.compose(g.inverse(h0), h1).expect("equal ranges compose");
            if member[q.0] || member[g.inverse(q).0] {
                edges.push(vec![h0.0, h1.0]);
            }
        }
    }
    GComplex::new(g.clone(), vertices, vec![edges])
}

/// Shape of one fiber `Σ_x` of a complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport {
    pub atom: Atom,
    pub vertices: usize,
    pub edges: usize,
    pub connected: bool,
    /// Defined only for complexes of dimension at most one.
    pub is_tree: Option<bool>,
}

pub fn fiber_report(complex: &GComplex) -> Vec<FiberReport> {
    let vs = &complex.vertices;
    let fibers = vs.fibers();
    let mut uf = UnionFind::<usize>::new(vs.len());
    let mut edges = vec![0usize; vs.n_atoms()];
    for t in complex.level(1) {
        if t[0] < t[1] {
            uf.union(t[0], t[1]);
            edges[vs.anchor(t[0]).0] += 1;
        }
    }
    fibers
        .iter()
        .enumerate()
        .map(|(x, pts)| {
            let components: BTreeSet<usize> = pts.iter().map(|&p| uf.find(p)).collect();
            let connected = components.len() <= 1;
            FiberReport {
                atom: Atom(x),
                vertices: pts.len(),
                edges: edges[x],
                connected,
                is_tree: (complex.top_dim() <= 1).then(|| connected && edges[x] + 1 == pts.len()),
            }
        })
        .collect()
}

/// The arrow acting between two vertices of the left regular space, if any.
pub fn translating_arrow(g: &FiniteGroupoid, from: ArrowId, to: ArrowId) -> Option<ArrowId> {
    g.compose(to, g.inverse(from))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    fn single(g: &FiniteGroupoid, name: &str) -> Vec<ArrowSet> {
        vec![ArrowSet::new(g, [g.arrow_by_name(name).unwrap()]).unwrap()]
    }

    #[test]
    fn graphing_complex_shapes() {
        let g = fixtures::r2();
        let c = build_graphing_complex(&g, &single(&g, "f")).unwrap();
        assert_eq!(c.level(0).len(), 4);
        assert_eq!(c.level(1).len(), 4);
        assert_eq!(c.chain_space(1).len(), 2);

        let z = fixtures::z2pt();
        let c = build_graphing_complex(&z, &single(&z, "a")).unwrap();
        assert_eq!(c.level(1), &[vec![0, 1], vec![1, 0]]);

        let t = fixtures::triv2();
        let c = build_graphing_complex(&t, &[]).unwrap();
        assert_eq!(c.top_dim(), 0);
        assert_eq!(c.level(0).len(), 2);
    }

    #[test]
    fn overlapping_graphing_is_rejected() {
        let g = fixtures::r2();
        let mut e = single(&g, "f");
        e.push(e[0].clone());
        assert_eq!(build_graphing_complex(&g, &e).unwrap_err(), Error::NotDisjoint);
    }

    #[test]
    fn quasi_periodic_edge_level() {
        let g = fixtures::r2();
        let c = build_graphing_complex(&g, &single(&g, "f")).unwrap();
        let space = c.level_space(1).unwrap();
        let f = space.check_quasi_periodic().unwrap();
        assert_eq!(f.points.len(), 2);
        assert_eq!(f.measure, int(1));
        let d = space.quasi_periodic_decomposition(TransversalRule::LeastId).unwrap();
        assert_eq!(d.measure(space.atom_weights()), int(1));
    }

    #[test]
    fn graphing_complexes_validate() {
        let g = fixtures::r2();
        let c = build_graphing_complex(&g, &single(&g, "f")).unwrap();
        let report = validate_complex(&c);
        assert!(report.is_valid(), "{:?}", report.violations);
        // Each vertex lies in one edge.
        assert_eq!(report.ulb_bound, 2);
    }

    #[test]
    fn broken_complexes_are_reported() {
        let g = fixtures::r2();
        let vs = GSpace::left_regular(&g);
        let c = GComplex::new(g.clone(), vs.clone(), vec![vec![vec![0, 3]]]).unwrap();
        let report = validate_complex(&c);
        assert!(report.violations.iter().any(|v| matches!(v, ComplexViolation::PermutationClosure { .. })));
        let c = GComplex::new(g.clone(), vs, vec![vec![vec![0, 0]]]).unwrap();
        let report = validate_complex(&c);
        assert!(report.violations.iter().any(|v| matches!(v, ComplexViolation::Degenerate { .. })));
    }

    #[test]
    fn boundary_ranks() {
        let g = fixtures::r2();
        let c = build_graphing_complex(&g, &single(&g, "f")).unwrap();
        assert_eq!(boundary_matrix(&c, 1).unwrap().rank(), 2);
        let z = fixtures::z2pt();
        let c = build_graphing_complex(&z, &single(&z, "a")).unwrap();
        assert_eq!(boundary_matrix(&c, 1).unwrap().rank(), 1);
        let t = fixtures::triv2();
        let c = build_graphing_complex(&t, &[]).unwrap();
        let d = boundary_matrix(&c, 1).unwrap();
        assert_eq!((d.matrix.rows(), d.matrix.cols(), d.rank()), (2, 0, 0));
    }

    #[test]
    fn antisymmetrizer_examples() {
        let z = fixtures::z2pt();
        let c = build_graphing_complex(&z, &single(&z, "a")).unwrap();
        let f = vec![int(1), int(0)];
        assert_eq!(antisymmetrize(&c, 1, &f).unwrap(), vec![rat(1, 2), rat(-1, 2)]);
        let sym = vec![int(1), int(1)];
        assert_eq!(antisymmetrize(&c, 1, &sym).unwrap(), vec![int(0), int(0)]);
        let anti = vec![int(3), int(-3)];
        assert_eq!(antisymmetrize(&c, 1, &anti).unwrap(), anti);
    }

    #[test]
    fn alpha_examples() {
        let g = fixtures::r2();
        let c = build_graphing_complex(&g, &single(&g, "f")).unwrap();
        assert_eq!(alpha(&c, 0).unwrap(), Alpha { by_domain: int(1), by_projection: int(1) });
        assert_eq!(alpha(&c, 1).unwrap(), Alpha { by_domain: rat(1, 2), by_projection: rat(1, 2) });
        let z = fixtures::z2pt();
        let c = build_graphing_complex(&z, &single(&z, "a")).unwrap();
        assert_eq!(alpha(&c, 1).unwrap(), Alpha { by_domain: rat(1, 2), by_projection: rat(1, 2) });
    }

    #[test]
    fn fiber_reports() {
        let g = fixtures::r2();
        let c = build_graphing_complex(&g, &single(&g, "f")).unwrap();
        assert!(fiber_report(&c).iter().all(|f| f.vertices == 2 && f.edges == 1 && f.is_tree == Some(true)));
        let t = fixtures::triv2();
        let c = build_graphing_complex(&t, &[]).unwrap();
        assert!(fiber_report(&c).iter().all(|f| f.is_tree == Some(true)));
        let r3 = fixtures::r3();
        let d = r3.one_sheeted_decomposition();
        let c = build_graphing_complex(&r3, &d[1..]).unwrap();
        assert!(fiber_report(&c).iter().all(|f| f.connected && f.is_tree == Some(false) && f.edges == 3));
    }

    #[test]
    fn single_edge_norm_exceeds_n_sqrt_n() {
        // One edge over a point: ‖∂₁‖ = 2, while n√N = √2 with N = 2.
        let z = fixtures::z2pt();
        let c = build_graphing_complex(&z, &single(&z, "a")).unwrap();
        let norm = boundary_norm(&c, 1).unwrap();
        let n_bound = validate_complex(&c).ulb_bound as f64;
        assert!((norm - 2.0).abs() < 1e-9);
        assert!(norm > n_bound.sqrt());
        assert!(norm <= 2.0 * n_bound.sqrt() + 1e-9);
    }
}
