use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lad_core::discrete::{decide, DiscreteError};
use lad_core::dtree::{DeltaTree, DtreeError};
use lad_core::scopo::{attractor, classify, enumerate_scopos, Attractor, ScopoError, ENUMERATION_EDGE_LIMIT};
use lad_core::universal::{oracle_consistency, SearchOutcome, UgroupError};
use lad_core::{corpus, diagram, Diagram};

/// Local action diagrams: validation, classification, discreteness and
/// Δ-trees.
#[derive(Parser)]
#[command(name = "lad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a diagram is well formed.
    Validate { diagram: PathBuf },
    /// Report the action type of the universal group.
    Classify { diagram: PathBuf },
    /// Decide whether the universal group is discrete.
    Discrete { diagram: PathBuf },
    /// Build the Δ-tree ball around a vertex.
    Tree {
        diagram: PathBuf,
        /// Base vertex; defaults to the first declared vertex.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Emit Graphviz DOT instead of vertex records.
        #[arg(long)]
        dot: bool,
    },
    /// Test the discreteness verdict against a search on a truncated tree.
    Oracle {
        diagram: PathBuf,
        #[arg(long, default_value_t = 2)]
        fix_radius: usize,
        #[arg(long, default_value_t = 4)]
        ball_radius: usize,
        /// Print the elements found by the search.
        #[arg(long)]
        elements: bool,
    },
    /// List every strongly confluent partial orientation with its attractor.
    Scopos {
        diagram: PathBuf,
        /// Largest number of edges to enumerate.
        #[arg(long, default_value_t = ENUMERATION_EDGE_LIMIT)]
        cap: usize,
    },
    /// Print the underlying graph.
    Graph {
        diagram: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Builtin example diagrams.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the builtin names.
    List,
    /// Print the `.lad` text of a builtin.
    Emit { name: String },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    const INCONSISTENT: u8 = 1;
    const INVALID: u8 = 2;
    const PARSE: u8 = 3;
    const REFUSED: u8 = 4;

    fn new(code: u8, message: impl Display) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<ScopoError> for Failure {
    fn from(e: ScopoError) -> Self {
        Failure::new(Failure::REFUSED, e)
    }
}

impl From<DiscreteError> for Failure {
    fn from(e: DiscreteError) -> Self {
        Failure::new(Failure::REFUSED, e)
    }
}

impl From<DtreeError> for Failure {
    fn from(e: DtreeError) -> Self {
        let code = match e {
            DtreeError::UnknownVertex(_) | DtreeError::UnknownColour(_) | DtreeError::UnknownElement(_) => {
                Failure::INVALID
            }
            DtreeError::UnbuildableRadius { .. } => Failure::REFUSED,
        };
        Failure::new(code, e)
    }
}

impl From<UgroupError> for Failure {
    fn from(e: UgroupError) -> Self {
        match e {
            UgroupError::InvalidRadii { .. } => Failure::new(Failure::INVALID, e),
            UgroupError::Dtree(inner) => inner.into(),
            _ => Failure::new(Failure::REFUSED, e),
        }
    }
}

/// Reads a diagram from a file, or from the corpus for `builtin:<name>`.
fn read(path: &PathBuf) -> Result<Diagram, Failure> {
    let text = match path.to_str().and_then(|p| p.strip_prefix("builtin:")) {
        Some(name) => corpus::get(name)
            .ok_or_else(|| Failure::new(Failure::INVALID, format!("no builtin `{name}`")))?
            .text
            .to_string(),
        None => std::fs::read_to_string(path)
            .map_err(|e| Failure::new(Failure::INVALID, format!("{}: {e}", path.display())))?,
    };
    diagram::load(&text).map_err(|e| Failure::new(Failure::PARSE, format!("{}: {e}", path.display())))
}

fn read_valid(path: &PathBuf) -> Result<Diagram, Failure> {
    let d = read(path)?;
    let violations = d.validate();
    if violations.is_empty() {
        Ok(d)
    } else {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        Err(Failure::new(Failure::INVALID, format!("invalid diagram: {}", list.join("; "))))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { diagram } => {
            let d = read(&diagram)?;
            let violations = d.validate();
            if violations.is_empty() {
                println!(
                    "valid=yes vertices={} edges={} rays={}",
                    d.vertex_count(),
                    d.edge_count(),
                    d.rays().len()
                );
                return Ok(());
            }
            println!("valid=no violations={}", violations.len());
            for v in &violations {
                println!("violation={v}");
            }
            Err(Failure::new(Failure::INVALID, "diagram failed validation"))
        }
        Command::Classify { diagram } => {
            let d = read_valid(&diagram)?;
            println!("{}", classify(&d)?.record(&d));
            Ok(())
        }
        Command::Discrete { diagram } => {
            let d = read_valid(&diagram)?;
            let action = classify(&d)?;
            println!("{}", decide(&d, &action)?.record());
            Ok(())
        }
        Command::Tree {
            diagram,
            base,
            radius,
            dot,
        } => {
            let d = read_valid(&diagram)?;
            let base = base.unwrap_or_else(|| d.graph().vertex_name(0).to_string());
            let t = DeltaTree::build(&d, &base, radius)?;
            if dot {
                print!("{}", t.to_dot());
                return Ok(());
            }
            println!("base={base} radius={radius} vertices={}", t.len());
            for i in 0..t.len() {
                println!(
                    "vertex path={} depth={} projection={}",
                    t.path_string(i),
                    t.depth(i),
                    t.project(i)
                );
            }
            Ok(())
        }
        Command::Oracle {
            diagram,
            fix_radius,
            ball_radius,
            elements,
        } => {
            let d = read_valid(&diagram)?;
            let action = classify(&d)?;
            let verdict = decide(&d, &action)?;
            let report = oracle_consistency(&d, &action, &verdict, fix_radius, ball_radius)?;
            println!("{}", verdict.record());
            if elements {
                let t = DeltaTree::build(&d, &report.base, ball_radius)?;
                for check in &report.checks {
                    if let SearchOutcome::Found(g) = &check.outcome {
                        for line in g.describe(&t) {
                            println!("element fix={} {line}", check.fixed);
                        }
                    }
                }
            }
            println!("{report}");
            if report.consistent() {
                Ok(())
            } else {
                Err(Failure::new(Failure::INCONSISTENT, "oracle disagrees with the verdict"))
            }
        }
        Command::Scopos { diagram, cap } => {
            let d = read_valid(&diagram)?;
            let edges = d.edge_count();
            if edges > cap.min(ENUMERATION_EDGE_LIMIT) {
                return Err(ScopoError::TooManyEdges {
                    edges,
                    limit: cap.min(ENUMERATION_EDGE_LIMIT),
                }
                .into());
            }
            let scopos = enumerate_scopos(&d)?;
            println!("scopos={}", scopos.len());
            for o in &scopos {
                let result = attractor(&d, o);
                let k = match &result.attractor {
                    Attractor::Periodic(set) => set.display(&d).to_string(),
                    Attractor::End(r) => format!("end:{}", d.ray(*r).id),
                };
                println!("scopo={} attractor={k} type={}", o.display(&d), result.kind.letter());
            }
            Ok(())
        }
        Command::Graph { diagram, dot } => {
            let d = read(&diagram)?;
            let g = d.graph();
            if dot {
                let name = diagram.file_stem().and_then(|s| s.to_str()).unwrap_or("diagram");
                print!("{}", g.to_dot(name.trim_start_matches("builtin:")));
                return Ok(());
            }
            println!(
                "vertices={} arcs={} edges={} connected={} tree={}",
                g.vertex_count(),
                g.arc_count(),
                g.edges().len(),
                g.is_connected(),
                g.is_tree()
            );
            for a in 0..g.arc_count() {
                println!(
                    "arc={} origin={} terminus={} reverse={}",
                    g.arc_name(a),
                    g.vertex_name(g.origin(a)),
                    g.vertex_name(g.terminus(a)),
                    g.arc_name(g.reverse(a))
                );
            }
            for r in d.rays() {
                println!("ray={} attach={} period={}", r.id, g.vertex_name(r.attach), r.period());
            }
            Ok(())
        }
        Command::Examples { action } => {
            match action {
                ExamplesAction::List => {
                    for e in corpus::all() {
                        println!("{}", e.name);
                    }
                }
                ExamplesAction::Emit { name } => {
                    let entry = corpus::get(&name)
                        .ok_or_else(|| Failure::new(Failure::INVALID, format!("no builtin `{name}`")))?;
                    print!("{}", entry.text);
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lad: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
