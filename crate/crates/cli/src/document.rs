//! The `.gpd` text format.
//!
//! ```text
//! # comment
//! unit x 1/2
//! unit y 1/2
//! arrow f x y
//! arrow g y x
//! inverse f g
//! compose f g y
//! compose g f x
//! set E f
//! graphing main E
//! atoms Y x
//! freeproduct G1 G2
//! ```
//!
//! The unit arrow at an atom carries the atom's name. Compositions and
//! inverses involving units are implied; every other composable pair needs
//! a `compose` line.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use groupoid_core::rational::{format_pq, is_positive, parse_pq};
use groupoid_core::{Arrow, ArrowId, ArrowSet, Atom, FiniteGroupoid, WeightedUnitSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DocumentError {
    Parse { line: usize, message: String },
    Semantic { line: usize, message: String },
    Validation(Vec<String>),
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Parse { line, message } => write!(f, "parse error at line {line}: {message}"),
            DocumentError::Semantic { line, message } => write!(f, "semantic error at line {line}: {message}"),
            DocumentError::Validation(v) => write!(f, "validation failed: {}", v.join("; ")),
        }
    }
}

impl std::error::Error for DocumentError {}

/// A groupoid with its named arrow sets, graphings and atom subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidDocument {
    pub groupoid: FiniteGroupoid,
    pub sets: BTreeMap<String, ArrowSet>,
    /// Graphings as lists of set names.
    pub graphings: BTreeMap<String, Vec<String>>,
    pub atom_sets: BTreeMap<String, Vec<Atom>>,
    /// Set names of the two factors.
    pub free_product: Option<(String, String)>,
}

impl GroupoidDocument {
    pub fn new(groupoid: FiniteGroupoid) -> Self {
        GroupoidDocument {
            groupoid,
            sets: BTreeMap::new(),
            graphings: BTreeMap::new(),
            atom_sets: BTreeMap::new(),
            free_product: None,
        }
    }

    pub fn graphing(&self, name: &str) -> Option<Vec<ArrowSet>> {
        self.graphings.get(name).map(|names| names.iter().map(|n| self.sets[n].clone()).collect())
    }

    pub fn free_product_sets(&self) -> Option<(ArrowSet, ArrowSet)> {
        self.free_product.as_ref().map(|(a, b)| (self.sets[a].clone(), self.sets[b].clone()))
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        Parser::default().run(text)
    }

    /// Canonical text: declarations grouped by kind, each group in id or
    /// name order.
    pub fn serialize(&self) -> String {
        let g = &self.groupoid;
        let mut out = String::new();
        for x in g.atoms() {
            writeln!(out, "unit {} {}", g.atom_name(x), format_pq(g.weight(x))).unwrap();
        }
        for a in g.non_unit_arrows() {
            writeln!(out, "arrow {} {} {}", g.arrow_name(a), g.atom_name(g.source(a)), g.atom_name(g.range(a))).unwrap();
        }
        for a in g.non_unit_arrows() {
            if a <= g.inverse(a) {
                writeln!(out, "inverse {} {}", g.arrow_name(a), g.arrow_name(g.inverse(a))).unwrap();
            }
        }
        for a in g.non_unit_arrows() {
            for b in g.non_unit_arrows() {
                if let Some(p) = g.compose(a, b) {
                    writeln!(out, "compose {} {} {}", g.arrow_name(a), g.arrow_name(b), g.arrow_name(p)).unwrap();
                }
            }
        }
        for (name, set) in &self.sets {
            let members: Vec<&str> = set.iter().map(|a| g.arrow_name(a)).collect();
            writeln!(out, "set {name}{}", prefixed(&members)).unwrap();
        }
        for (name, members) in &self.graphings {
            writeln!(out, "graphing {name}{}", prefixed(members)).unwrap();
        }
        for (name, atoms) in &self.atom_sets {
            let members: Vec<&str> = atoms.iter().map(|&x| g.atom_name(x)).collect();
            writeln!(out, "atoms {name}{}", prefixed(&members)).unwrap();
        }
        if let Some((a, b)) = &self.free_product {
            writeln!(out, "freeproduct {a} {b}").unwrap();
        }
        out
    }
}

fn prefixed<S: AsRef<str>>(items: &[S]) -> String {
    items.iter().map(|s| format!(" {}", s.as_ref())).collect()
}

#[derive(Default)]
struct Parser {
    atoms: Vec<(String, groupoid_core::Rational)>,
    atom_index: HashMap<String, usize>,
    arrows: Vec<(String, usize, usize, usize)>,
    inverses: Vec<(usize, String, String)>,
    composes: Vec<(usize, String, String, String)>,
    sets: Vec<(usize, String, Vec<String>)>,
    graphings: Vec<(usize, String, Vec<String>)>,
    atom_sets: Vec<(usize, String, Vec<String>)>,
    free_product: Option<(usize, String, String)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Parse { line, message: message.into() }
}

fn semantic(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Semantic { line, message: message.into() }
}

impl Parser {
    fn run(mut self, text: &str) -> Result<GroupoidDocument, DocumentError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let words: Vec<&str> = content.split_whitespace().collect();
            let Some((&keyword, rest)) = words.split_first() else { continue };
            let owned = || rest.iter().map(|s| s.to_string()).collect::<Vec<_>>();
            let arity = |n: usize| {
                if rest.len() == n {
                    Ok(())
                } else {
                    Err(parse_err(line, format!("`{keyword}` takes {n} fields, found {}", rest.len())))
                }
            };
            match keyword {
                "unit" => {
                    arity(2)?;
                    let weight =
                        parse_pq(rest[1]).ok_or_else(|| parse_err(line, format!("`{}` is not a rational p/q", rest[1])))?;
                    if !is_positive(&weight) {
                        return Err(semantic(line, format!("nonpositive weight {} for atom {}", rest[1], rest[0])));
                    }
                    if self.atom_index.insert(rest[0].to_string(), self.atoms.len()).is_some() {
                        return Err(semantic(line, format!("duplicate atom {}", rest[0])));
                    }
                    self.atoms.push((rest[0].to_string(), weight));
                }
                "arrow" => {
                    arity(3)?;
                    let s = self.atom(line, rest[1])?;
                    let r = self.atom(line, rest[2])?;
                    self.arrows.push((rest[0].to_string(), s, r, line));
                }
                "inverse" => {
                    arity(2)?;
                    self.inverses.push((line, rest[0].to_string(), rest[1].to_string()));
                }
                "compose" => {
                    arity(3)?;
                    self.composes.push((line, rest[0].to_string(), rest[1].to_string(), rest[2].to_string()));
                }
                "set" | "graphing" | "atoms" => {
                    if rest.is_empty() {
                        return Err(parse_err(line, format!("`{keyword}` needs a name")));
                    }
                    let mut items = owned();
                    let name = items.remove(0);
                    let target = match keyword {
                        "set" => &mut self.sets,
                        "graphing" => &mut self.graphings,
                        _ => &mut self.atom_sets,
                    };
                    if target.iter().any(|(_, n, _)| *n == name) {
                        return Err(semantic(line, format!("duplicate {keyword} {name}")));
                    }
                    target.push((line, name, items));
                }
                "freeproduct" => {
                    arity(2)?;
                    if self.free_product.is_some() {
                        return Err(semantic(line, "more than one freeproduct declaration"));
                    }
                    self.free_product = Some((line, rest[0].to_string(), rest[1].to_string()));
                }
                other => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
            }
        }
        self.assemble()
    }

    fn atom(&self, line: usize, name: &str) -> Result<usize, DocumentError> {
        self.atom_index.get(name).copied().ok_or_else(|| semantic(line, format!("unknown atom {name}")))
    }

    fn assemble(self) -> Result<GroupoidDocument, DocumentError> {
        if self.atoms.is_empty() {
            return Err(semantic(0, "no units declared"));
        }
        let n = self.atoms.len();
        let mut arrows: Vec<Arrow> = self.atoms.iter().enumerate().map(|(i, (name, _))| Arrow::new(name, Atom(i), Atom(i))).collect();
        let mut arrow_index: HashMap<String, usize> = self.atom_index.clone();
        for (name, s, r, line) in &self.arrows {
            if arrow_index.insert(name.clone(), arrows.len()).is_some() {
                return Err(semantic(*line, format!("duplicate arrow {name}")));
            }
            arrows.push(Arrow::new(name, Atom(*s), Atom(*r)));
        }
        let m = arrows.len();
        let lookup = |line: usize, name: &str| {
            arrow_index.get(name).copied().ok_or_else(|| semantic(line, format!("unknown arrow {name}")))
        };

        let mut inverse: Vec<Option<usize>> = (0..m).map(|i| (i < n).then_some(i)).collect();
        for (line, a, b) in &self.inverses {
            let (a, b) = (lookup(*line, a)?, lookup(*line, b)?);
            for (x, y) in [(a, b), (b, a)] {
                if inverse[x].is_some_and(|z| z != y) {
                    return Err(semantic(*line, format!("conflicting inverse for {}", arrows[x].name)));
                }
                inverse[x] = Some(y);
            }
        }
        let inverse: Vec<ArrowId> = inverse
            .iter()
            .enumerate()
            .map(|(i, v)| v.map(ArrowId).ok_or_else(|| semantic(0, format!("arrow {} has no inverse", arrows[i].name))))
            .collect::<Result<_, _>>()?;

        let mut compose: Vec<Option<ArrowId>> = vec![None; m * m];
        for (i, a) in arrows.iter().enumerate() {
            compose[a.range.0 * m + i] = Some(ArrowId(i));
            compose[i * m + a.source.0] = Some(ArrowId(i));
        }
        for (line, a, b, p) in &self.composes {
            let (a, b, p) = (lookup(*line, a)?, lookup(*line, b)?, lookup(*line, p)?);
            let slot = &mut compose[a * m + b];
            if slot.is_some_and(|q| q.0 != p) {
                return Err(semantic(*line, format!("conflicting composition {} * {}", arrows[a].name, arrows[b].name)));
            }
            *slot = Some(ArrowId(p));
        }

        let (names, weights) = self.atoms.into_iter().unzip();
        let units = WeightedUnitSpace::new(names, weights).map_err(|e| semantic(0, e.to_string()))?;
        let groupoid =
            FiniteGroupoid::from_parts(units, arrows, inverse, compose).map_err(|e| semantic(0, e.to_string()))?;
        let report = groupoid.validate();
        if !report.is_valid() {
            return Err(DocumentError::Validation(report.violations.iter().map(|v| v.describe(&groupoid)).collect()));
        }

        let mut doc = GroupoidDocument::new(groupoid);
        let g = &doc.groupoid;
        for (line, name, members) in &self.sets {
            let ids = members
                .iter()
                .map(|a| g.arrow_by_name(a).ok_or_else(|| semantic(*line, format!("unknown arrow {a}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let set = ArrowSet::new(g, ids).map_err(|e| semantic(*line, e.to_string()))?;
            doc.sets.insert(name.clone(), set);
        }
        for (line, name, members) in &self.graphings {
            for s in members {
                let set = doc.sets.get(s).ok_or_else(|| semantic(*line, format!("unknown set {s}")))?;
                if !set.one_sheeted() {
                    return Err(semantic(*line, format!("set {s} in graphing {name} is not one-sheeted")));
                }
            }
            doc.graphings.insert(name.clone(), members.clone());
        }
        for (line, name, members) in &self.atom_sets {
            let atoms = members
                .iter()
                .map(|x| doc.groupoid.atom_by_name(x).ok_or_else(|| semantic(*line, format!("unknown atom {x}"))))
                .collect::<Result<Vec<_>, _>>()?;
            doc.atom_sets.insert(name.clone(), atoms);
        }
        if let Some((line, a, b)) = &self.free_product {
            for s in [a, b] {
                if !doc.sets.contains_key(s) {
                    return Err(semantic(*line, format!("unknown set {s}")));
                }
            }
            doc.free_product = Some((a.clone(), b.clone()));
        }
        Ok(doc)
    }
}
