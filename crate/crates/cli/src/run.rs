use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use groupoid_core::betti::{self, DEFAULT_BUDGET};
use groupoid_core::complex::{alpha, build_graphing_complex, fiber_report};
use groupoid_core::cost::{self, FreeProductCertificate, Optimality};
use groupoid_core::rational::int;
use groupoid_core::{ArrowId, ArrowSet, Assertion, Atom, CheckReport, FiniteGroupoid, Relation};
use serde_json::{json, Value};

use crate::document::{DocumentError, GroupoidDocument};
use crate::random::{random_groupoid, RandomParams};
use crate::report::{self, pq, EXIT_INPUT, EXIT_PASS, EXIT_UNMET, EXIT_VIOLATED};

pub const SUITES: [&str; 8] = ["morse", "euler", "induction", "additivity", "treeing", "cvb", "decomp", "orbit"];

#[derive(Parser, Debug)]
#[command(name = "groupoid", version, about = "Exact L2-Betti numbers and costs of finite measured groupoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComplexKind {
    Graphing,
    Eg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a document.
    Validate { file: PathBuf },
    /// One-sheeted decomposition, orbits and isotropy.
    Decompose { file: PathBuf },
    /// L2-Betti numbers of a graphing complex or of a truncated universal complex.
    Betti {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "graphing")]
        complex: ComplexKind,
        /// Named graphing of the document; defaults to a treeing or a cheapest generating set.
        #[arg(long)]
        graphing: Option<String>,
        /// Number of copies of G among the vertices.
        #[arg(long = "N", default_value_t = 1)]
        copies: usize,
        /// Number of one-sheeted pieces used.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "dim-cap", default_value_t = 2)]
        dim_cap: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Exact minimal cost by branch and bound.
    Cost {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Check the cost and Betti theorems on an instance.
    Verify {
        file: PathBuf,
        /// Comma-separated suite items, or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        suite: Vec<String>,
        /// Named atom subset used by the induction check.
        #[arg(long = "Y")]
        y: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Emit a seeded random document.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        atoms: usize,
        #[arg(long = "isotropy-max", default_value_t = 1)]
        isotropy_max: usize,
        /// Largest allowed number of non-unit arrows.
        #[arg(long = "arrow-budget")]
        arrow_budget: Option<usize>,
    },
}

/// What a command printed and how it exited.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
    /// The JSON report, absent for `random` and usage errors.
    pub report: Option<Value>,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Invocation { exit_code: code, stdout, stderr, report: None };
        }
    };
    let out = cli.out.clone();
    let mut invocation = execute(cli.command);
    if let Some(path) = out {
        match std::fs::write(&path, &invocation.stdout) {
            Ok(()) => invocation.stdout.clear(),
            Err(e) => {
                invocation.stderr.push_str(&format!("cannot write {}: {e}\n", path.display()));
                invocation.exit_code = EXIT_INPUT;
            }
        }
    }
    invocation
}

fn execute(command: Command) -> Invocation {
    if let Command::Random { seed, atoms, isotropy_max, arrow_budget } = command {
        return match random_groupoid(RandomParams { seed, atoms, isotropy_max, arrow_budget }) {
            Ok(doc) => Invocation { exit_code: EXIT_PASS, stdout: doc.serialize(), stderr: String::new(), report: None },
            Err(e) => Invocation { exit_code: EXIT_INPUT, stdout: String::new(), stderr: format!("{e}\n"), report: None },
        };
    }
    let start = Instant::now();
    let (name, file) = match &command {
        Command::Validate { file } => ("validate", file),
        Command::Decompose { file } => ("decompose", file),
        Command::Betti { file, .. } => ("betti", file),
        Command::Cost { file, .. } => ("cost", file),
        Command::Verify { file, .. } => ("verify", file),
        Command::Random { .. } => unreachable!(),
    };
    let mut report = json!({ "command": name, "file": file.display().to_string() });
    let code = match load(file) {
        Err(e) => {
            report["error"] = document_error(&e);
            EXIT_INPUT
        }
        Ok(doc) => {
            report["digest"] = Value::String(report::digest(&doc));
            let (code, body) = match &command {
                Command::Validate { .. } => validate(&doc),
                Command::Decompose { .. } => decompose(&doc),
                Command::Betti { complex, graphing, copies, k, dim_cap, budget, .. } => match complex {
                    ComplexKind::Graphing => betti_graphing(&doc, graphing.as_deref(), *budget),
                    ComplexKind::Eg => betti_eg(&doc, *copies, *k, *dim_cap),
                },
                Command::Cost { budget, .. } => cost_command(&doc, *budget),
                Command::Verify { suite, y, budget, .. } => verify(&doc, suite, y.as_deref(), *budget),
                Command::Random { .. } => unreachable!(),
            };
            for (k, v) in body {
                report[k] = v;
            }
            code
        }
    };
    report["exit_code"] = json!(code);
    report["status"] = json!(match code {
        EXIT_PASS => "pass",
        EXIT_VIOLATED => "violated",
        EXIT_INPUT => "input_error",
        _ => "hypothesis_unmet",
    });
    report["timing_us"] = json!(start.elapsed().as_micros() as u64);
    let stdout = format!("{}\n", serde_json::to_string_pretty(&report).expect("json values serialize"));
    Invocation { exit_code: code, stdout, stderr: String::new(), report: Some(report) }
}

fn load(path: &Path) -> Result<GroupoidDocument, DocumentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DocumentError::Parse { line: 0, message: format!("cannot read {}: {e}", path.display()) })?;
    GroupoidDocument::parse(&text)
}

fn document_error(e: &DocumentError) -> Value {
    match e {
        DocumentError::Parse { line, message } => json!({ "kind": "parse", "line": line, "message": message }),
        DocumentError::Semantic { line, message } => json!({ "kind": "semantic", "line": line, "message": message }),
        DocumentError::Validation(v) => json!({ "kind": "validation", "violations": v }),
    }
}

type Body = Vec<(&'static str, Value)>;

fn names(g: &FiniteGroupoid, arrows: impl IntoIterator<Item = ArrowId>) -> Vec<String> {
    arrows.into_iter().map(|a| g.arrow_name(a).to_string()).collect()
}

fn atom_names(g: &FiniteGroupoid, atoms: &[Atom]) -> Vec<String> {
    atoms.iter().map(|&x| g.atom_name(x).to_string()).collect()
}

fn validate(doc: &GroupoidDocument) -> (i32, Body) {
    let g = &doc.groupoid;
    let v = g.validate();
    let results = json!({
        "valid": v.is_valid(),
        "principal": v.principal,
        "atoms": g.n_atoms(),
        "arrows": g.n_arrows(),
        "non_unit_arrows": g.non_unit_arrows().count(),
        "total_mass": pq(&g.units().total_mass()),
    });
    (if v.is_valid() { EXIT_PASS } else { EXIT_INPUT }, vec![("results", results)])
}

fn decompose(doc: &GroupoidDocument) -> (i32, Body) {
    let g = &doc.groupoid;
    let pieces: Vec<Value> = g
        .one_sheeted_decomposition()
        .iter()
        .map(|e| json!({ "arrows": names(g, e.iter()), "mass": pq(&g.mu_g(e)) }))
        .collect();
    let orbits: Vec<Value> = g
        .invariant_partition()
        .blocks
        .iter()
        .map(|b| {
            json!({
                "atoms": atom_names(g, b),
                "mass": pq(&g.units().mass_of(b)),
                "isotropy_order": g.isotropy_arrows(b[0]).len(),
            })
        })
        .collect();
    let results = json!({
        "pieces": pieces,
        "orbits": orbits,
        "principal": g.is_principal(),
        "orbit_relation_arrows": g.orbit_relation().n_arrows(),
    });
    (EXIT_PASS, vec![("results", results)])
}

fn named_graphing(doc: &GroupoidDocument, name: &str) -> Result<Vec<ArrowSet>, (i32, Body)> {
    doc.graphing(name).ok_or_else(|| {
        (EXIT_INPUT, vec![("error", json!({ "kind": "semantic", "line": 0, "message": format!("unknown graphing {name}") }))])
    })
}

fn core_error(e: groupoid_core::Error) -> (i32, Body) {
    (EXIT_VIOLATED, vec![("error", json!({ "kind": "computation", "message": e.to_string() }))])
}

fn betti_graphing(doc: &GroupoidDocument, graphing: Option<&str>, budget: u64) -> (i32, Body) {
    let g = &doc.groupoid;
    let Some(name) = graphing else {
        let b = match betti::betti_groupoid_with_budget(g, budget) {
            Ok(b) => b,
            Err(e) => return core_error(e),
        };
        let mut cross = CheckReport::new("beta0 from orbits");
        cross.record(Assertion::new("beta0 = sum of mu(x)/|isotropy|", b.beta0.clone(), Relation::Eq, betti::beta0_from_orbits(g)));
        let results = json!({
            "beta0": pq(&b.beta0),
            "beta1": pq(&b.beta1),
            "beta1_exact": b.exact1,
            "generators": names(g, b.generators.iter().copied()),
            "from_treeing": b.from_treeing,
        });
        return (report::exit_code(&cross.outcome), vec![("results", results), ("checks", json!([report::check(&cross)]))]);
    };
    let sets = match named_graphing(doc, name) {
        Ok(s) => s,
        Err(e) => return e,
    };
    let run = || -> groupoid_core::Result<Value> {
        let complex = build_graphing_complex(g, &sets)?;
        let betti = betti::betti_numbers(&complex)?;
        let alphas = (0..=complex.top_dim()).map(|n| alpha(&complex, n).map(|a| pq(&a.by_domain))).collect::<Result<Vec<_>, _>>()?;
        let euler = betti::euler(&complex)?;
        let fibers: Vec<Value> = fiber_report(&complex)
            .iter()
            .map(|f| json!({ "atom": g.atom_name(f.atom), "vertices": f.vertices, "edges": f.edges, "connected": f.connected, "tree": f.is_tree }))
            .collect();
        Ok(json!({
            "graphing": name,
            "betti": betti.iter().map(pq).collect::<Vec<_>>(),
            "alpha": alphas,
            "euler": { "chi": pq(&euler.chi), "chi2": pq(&euler.chi2) },
            "fibers": fibers,
        }))
    };
    match run() {
        Ok(results) => (EXIT_PASS, vec![("results", results)]),
        Err(e) => core_error(e),
    }
}

fn betti_eg(doc: &GroupoidDocument, copies: usize, k: usize, dim_cap: usize) -> (i32, Body) {
    let g = &doc.groupoid;
    let run = || -> groupoid_core::Result<(i32, Body)> {
        let t = betti::eg_truncation(g, copies, k, dim_cap)?;
        let numbers = betti::betti_numbers(&t.complex)?;
        let mut check = CheckReport::new("local finiteness");
        check.record(Assertion::new(
            "simplices per first vertex <= bound",
            int(t.max_first_entry_count as i64),
            Relation::Le,
            int(t.local_bound as i64),
        ));
        let results = json!({
            "N": copies,
            "k": k,
            "dim_cap": dim_cap,
            "pieces_used": t.pieces_used,
            "simplices": (0..=t.complex.top_dim()).map(|n| t.complex.level(n).len()).collect::<Vec<_>>(),
            "betti": numbers.iter().map(pq).collect::<Vec<_>>(),
        });
        Ok((report::exit_code(&check.outcome), vec![("results", results), ("checks", json!([report::check(&check)]))]))
    };
    run().unwrap_or_else(core_error)
}

fn cost_command(doc: &GroupoidDocument, budget: u64) -> (i32, Body) {
    let g = &doc.groupoid;
    let cert = cost::minimal_cost(g, budget);
    let exact = cert.optimality == Optimality::Exact;
    let results = json!({
        "value": pq(&cert.value),
        "arrows": names(g, cert.arrows.iter().copied()),
        "optimality": if exact { "exact" } else { "upper_bound" },
    });
    let stats = json!({ "nodes": cert.stats.nodes, "prunes": cert.stats.prunes });
    (if exact { EXIT_PASS } else { EXIT_UNMET }, vec![("results", results), ("stats", stats)])
}

/// Result of one suite item.
enum Item {
    Checks(Vec<CheckReport>),
    Skipped(String),
    Failed(String),
}

fn verify(doc: &GroupoidDocument, suite: &[String], y: Option<&str>, budget: u64) -> (i32, Body) {
    let mut items: Vec<&str> = Vec::new();
    for s in suite {
        if s == "all" {
            items.extend(SUITES);
        } else if let Some(known) = SUITES.iter().find(|k| *k == s) {
            items.push(known);
        } else {
            let message = format!("unknown suite item {s}; expected one of {} or all", SUITES.join(","));
            return (EXIT_INPUT, vec![("error", json!({ "kind": "usage", "message": message }))]);
        }
    }
    items.sort_unstable();
    items.dedup();
    let y_atoms = match y {
        None => None,
        Some(name) => match doc.atom_sets.get(name) {
            Some(atoms) => Some(atoms.clone()),
            None => {
                let message = format!("unknown atom set {name}");
                return (EXIT_INPUT, vec![("error", json!({ "kind": "semantic", "line": 0, "message": message }))]);
            }
        },
    };
    let results: BTreeMap<&str, Item> = std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .iter()
            .map(|&item| {
                let y_atoms = y_atoms.clone();
                (item, scope.spawn(move || run_item(doc, item, y_atoms, budget)))
            })
            .collect();
        handles.into_iter().map(|(item, h)| (item, h.join().unwrap_or_else(|_| Item::Failed("panicked".into())))).collect()
    });
    let mut codes = Vec::new();
    let mut suite_json = serde_json::Map::new();
    for (item, result) in &results {
        let value = match result {
            Item::Checks(checks) => {
                codes.extend(checks.iter().map(|c| report::exit_code(&c.outcome)));
                json!({ "status": "ran", "checks": checks.iter().map(report::check).collect::<Vec<_>>() })
            }
            Item::Skipped(reason) => json!({ "status": "skipped", "reason": reason }),
            Item::Failed(message) => {
                codes.push(EXIT_VIOLATED);
                json!({ "status": "error", "message": message })
            }
        };
        suite_json.insert(item.to_string(), value);
    }
    (report::combine(codes), vec![("suite", Value::Object(suite_json))])
}

/// Graphings the complex-based items run on: the declared ones, or the
/// singletons of a cheapest generating set.
fn subject_graphings(doc: &GroupoidDocument, budget: u64) -> Vec<(String, Vec<ArrowSet>)> {
    if doc.graphings.is_empty() {
        let g = &doc.groupoid;
        let arrows = cost::minimal_cost(g, budget).arrows;
        let sets = arrows.iter().map(|&a| ArrowSet::new(g, [a]).expect("own arrow")).collect();
        vec![("cheapest generators".into(), sets)]
    } else {
        doc.graphings.keys().map(|n| (n.clone(), doc.graphing(n).expect("declared"))).collect()
    }
}

/// A suite item evaluated on one named graphing.
type ComplexItem<'a> = dyn Fn(&str, &[ArrowSet]) -> groupoid_core::Result<Vec<CheckReport>> + 'a;

fn run_item(doc: &GroupoidDocument, item: &str, y: Option<Vec<Atom>>, budget: u64) -> Item {
    let g = &doc.groupoid;
    let complex_checks = |f: &ComplexItem| {
        let mut out = Vec::new();
        for (name, sets) in subject_graphings(doc, budget) {
            match f(&name, &sets) {
                Ok(mut c) => out.append(&mut c),
                Err(e) => return Item::Failed(format!("graphing {name}: {e}")),
            }
        }
        Item::Checks(out)
    };
    match item {
        "morse" => complex_checks(&|name, sets| {
            let complex = match build_graphing_complex(g, sets) {
                Ok(c) => c,
                Err(groupoid_core::Error::NotDisjoint) => {
                    return Ok(vec![CheckReport::new(format!("morse [{name}]")).hypothesis_unmet("graphing is not disjoint")]);
                }
                Err(e) => return Err(e),
            };
            (0..=complex.top_dim())
                .map(|n| {
                    betti::morse_check(&complex, n).map(|mut r| {
                        r.name = format!("{} [{name}]", r.name);
                        r
                    })
                })
                .collect()
        }),
        "euler" => complex_checks(&|name, sets| {
            let complex = match build_graphing_complex(g, sets) {
                Ok(c) => c,
                Err(groupoid_core::Error::NotDisjoint) => {
                    return Ok(vec![CheckReport::new(format!("euler [{name}]")).hypothesis_unmet("graphing is not disjoint")]);
                }
                Err(e) => return Err(e),
            };
            let e = betti::euler(&complex)?;
            let mut r = CheckReport::new(format!("euler [{name}]"));
            r.record(Assertion::new("chi = chi2", e.chi, Relation::Eq, e.chi2));
            let mut identity = cost::graphing_complex_check(g, sets)?;
            identity.name = format!("{} [{name}]", identity.name);
            Ok(vec![r, identity])
        }),
        "induction" => {
            let subsets: Vec<(String, Vec<Atom>)> = match y {
                Some(atoms) => vec![("Y".into(), atoms)],
                None if !doc.atom_sets.is_empty() => doc.atom_sets.iter().map(|(n, a)| (n.clone(), a.clone())).collect(),
                None => {
                    let transversal = g.invariant_partition().blocks.iter().map(|b| b[0]).collect();
                    vec![("orbit transversal".into(), transversal)]
                }
            };
            Item::Checks(
                subsets
                    .into_iter()
                    .map(|(name, atoms)| {
                        let mut r = cost::induction_check(g, &atoms, budget);
                        r.name = format!("{} [{name}]", r.name);
                        r
                    })
                    .collect(),
            )
        }
        "additivity" => match doc.free_product_sets() {
            None => Item::Skipped("no freeproduct declaration".into()),
            Some((g1, g2)) => {
                let cert = FreeProductCertificate::new(g, g1, g2);
                Item::Checks(vec![cost::free_product_check(g, &cert, budget)])
            }
        },
        "treeing" => {
            if doc.graphings.is_empty() {
                let search = cost::find_treeing(g, budget);
                match search.treeing {
                    Some(t) => {
                        let sets: Vec<ArrowSet> = t.iter().map(|&a| ArrowSet::new(g, [a]).expect("own arrow")).collect();
                        Item::Checks(vec![cost::treeing_cost_check(g, &sets, budget)])
                    }
                    None if search.exhausted => {
                        let mut r = CheckReport::new("treeing attains cost");
                        r.mark_budget_exhausted();
                        r.note("treeability search budget exhausted");
                        Item::Checks(vec![r])
                    }
                    None => Item::Skipped("the groupoid is not treeable".into()),
                }
            } else {
                Item::Checks(
                    doc.graphings
                        .keys()
                        .map(|n| {
                            let mut r = cost::treeing_cost_check(g, &doc.graphing(n).expect("declared"), budget);
                            r.name = format!("{} [{n}]", r.name);
                            r
                        })
                        .collect(),
                )
            }
        }
        "cvb" => match cost::cost_vs_betti_check(g, budget) {
            Ok(mut r) => {
                if r.assertions.first().is_some_and(|a| a.holds && a.lhs < a.rhs) {
                    r.note("inequality is strict");
                }
                Item::Checks(vec![r])
            }
            Err(e) => Item::Failed(e.to_string()),
        },
        "decomp" => Item::Checks(vec![cost::cost_decomposition_check(g, budget)]),
        "orbit" => Item::Checks(vec![cost::orbit_relation_cost_check(g, budget)]),
        _ => unreachable!("suite items are checked before running"),
    }
}
