//! The `homcount` command line.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::enumerate::for_each_in_class;
use crate::enumerate::Budget;
use crate::harness::{negative_demo, verify_theorem_over, Bounds, TheoremId};
use crate::hom::{compare_profiles, count_homs, ProfileBound};
use crate::logic::{check, equivalent, parse, Assignment, Language};
use crate::semiring::Semiring;
use crate::structure::{classify, from_json, to_dot, to_json, to_json_value, ClassKind, ClassTag, PointedStructure, Signature};
use crate::transform;

/// Exit code for success or agreement.
pub const EXIT_OK: i32 = 0;
/// Exit code when a disagreement (or a negative verdict) is found.
pub const EXIT_DIFFER: i32 = 1;
/// Exit code for usage and input errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "homcount", version, about = "Homomorphism-count profiles of labeled transition systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the structure classes and depths of a structure.
    Classify(InArg),
    /// Apply a structure transformation.
    Transform(TransformArgs),
    /// Count homomorphisms from a source into a target over a semiring.
    HomCount(HomCountArgs),
    /// Compare two left profiles over an enumerated class slice.
    ProfileCompare(ProfileArgs),
    /// Model-check a formula at the distinguished state.
    Check(CheckArgs),
    /// Decide logical equivalence of two structures.
    Equiv(EquivArgs),
    /// Emit every structure of a class slice, one JSON object per line.
    Enumerate(EnumerateArgs),
    /// Run a theorem verification suite.
    Verify(VerifyArgs),
    /// Run the periodic-semiring demonstration.
    NegativeDemo(NegativeArgs),
}

#[derive(Debug, Args)]
struct InArg {
    /// Structure file (`-` for stdin).
    #[arg(long = "in", default_value = "-")]
    input: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformOp {
    Unravel,
    Gsub,
    Backexp,
    Globexp,
    Down,
    Flip,
    Pgaug,
    Rgconnect,
}

#[derive(Debug, Args)]
struct TransformArgs {
    op: TransformOp,
    #[command(flatten)]
    input: InArg,
    /// Depth for `unravel` (required) and `gsub` (optional).
    #[arg(long = "k", visible_alias = "depth")]
    k: Option<usize>,
    /// Emit Graphviz DOT instead of JSON.
    #[arg(long)]
    dot: bool,
}

#[derive(Debug, Args)]
struct HomCountArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value = "nat")]
    semiring: Semiring,
}

#[derive(Debug, Args)]
struct ProfileArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    /// tree, acyclic, forest, pg, connected or any.
    #[arg(long, default_value = "tree")]
    class: ClassKind,
    #[arg(long, default_value = "nat")]
    semiring: Semiring,
    #[arg(long, default_value_t = 4)]
    max_states: usize,
    /// Depth bound of the class slice.
    #[arg(long, visible_alias = "k")]
    depth: Option<usize>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InArg,
    #[arg(long)]
    formula: String,
    /// World-variable assignments `x=STATE`.
    #[arg(long = "assign", value_parser = parse_assignment)]
    assign: Vec<(String, usize)>,
}

#[derive(Debug, Args)]
struct EquivArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    /// ml, ml+, pml, pmlb, pmlg, gml, gmlb, gmlg, hl or hlb.
    #[arg(long)]
    logic: Language,
    /// Modal depth for the depth-bounded logics.
    #[arg(long = "k", visible_alias = "depth")]
    k: Option<usize>,
}

#[derive(Debug, Args)]
struct EnumerateArgs {
    #[arg(long, default_value = "tree")]
    class: ClassKind,
    /// Comma-separated proposition letters.
    #[arg(long, default_value = "p", value_delimiter = ',')]
    props: Vec<String>,
    /// Comma-separated actions.
    #[arg(long, default_value = "R", value_delimiter = ',')]
    actions: Vec<String>,
    #[arg(long, default_value_t = 3)]
    max_states: usize,
    #[arg(long, visible_alias = "depth")]
    max_depth: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// T3.2, T3.5, T3.7, T4.5, T4.12, T-global, T5.4, T-HLB, Lovász, Fact2.1, L4.4, P4.9 or L5.3.
    #[arg(long)]
    theorem: TheoremId,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = Bounds::default().max_states)]
    max_states: usize,
    #[arg(long, visible_alias = "k", default_value_t = Bounds::default().max_depth)]
    depth: usize,
    #[arg(long, default_value_t = Bounds::default().source_states)]
    source_states: usize,
    #[arg(long, default_value_t = Bounds::default().sample)]
    sample: usize,
    #[arg(long, default_value = "p", value_delimiter = ',')]
    props: Vec<String>,
    #[arg(long, default_value = "R", value_delimiter = ',')]
    actions: Vec<String>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct NegativeArgs {
    #[arg(long, default_value = "bool")]
    semiring: Semiring,
    #[arg(long)]
    json: bool,
}

fn parse_assignment(s: &str) -> Result<(String, usize), String> {
    let (var, state) = s.split_once('=').ok_or_else(|| format!("expected VAR=STATE, got `{s}`"))?;
    let state = state.trim().parse().map_err(|_| format!("bad state in `{s}`"))?;
    Ok((var.trim().to_string(), state))
}

type Failure = Box<dyn std::error::Error>;

fn read_structure(path: &Path) -> Result<PointedStructure, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?
    };
    Ok(from_json(&text)?)
}

fn signature(props: &[String], actions: &[String]) -> Result<Arc<Signature>, Failure> {
    let props: Vec<&str> = props.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    let actions: Vec<&str> = actions.iter().map(String::as_str).filter(|s| !s.is_empty()).collect();
    Ok(Arc::new(Signature::new(props, actions)?))
}

fn apply(op: TransformOp, m: &PointedStructure, k: Option<usize>) -> Result<PointedStructure, Failure> {
    Ok(match op {
        TransformOp::Unravel => transform::unravel(m, k.ok_or("unravel needs --k")?),
        TransformOp::Gsub => transform::gsub(m, k),
        TransformOp::Backexp => transform::backward_expansion(m)?,
        TransformOp::Globexp => transform::global_expansion(m)?,
        TransformOp::Down => transform::down_transform(m)?,
        TransformOp::Flip => transform::flip(m)?,
        TransformOp::Pgaug => transform::pg_augment(m)?,
        TransformOp::Rgconnect => transform::rg_connect(m)?,
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Classify(a) => {
            let m = read_structure(&a.input)?;
            let c = classify(&m);
            let kinds: Vec<&str> = c.kinds.iter().map(|k| k.name()).collect();
            let v = json!({
                "kinds": kinds,
                "directedDepth": c.directed_depth,
                "undirectedDepth": c.undirected_depth,
                "forestDepth": c.forest_depth,
            });
            writeln!(out, "{v}")?;
        }
        Command::Transform(a) => {
            let m = read_structure(&a.input.input)?;
            let r = apply(a.op, &m, a.k)?;
            if a.dot {
                write!(out, "{}", to_dot(&r))?;
            } else {
                writeln!(out, "{}", to_json(&r))?;
            }
        }
        Command::HomCount(a) => {
            let (t, m) = (read_structure(&a.source)?, read_structure(&a.target)?);
            writeln!(out, "{}", count_homs(&a.semiring, &t, &m)?)?;
        }
        Command::ProfileCompare(a) => {
            let (m, n) = (read_structure(&a.left)?, read_structure(&a.right)?);
            let tag = ClassTag::new(a.class, a.depth);
            let v = compare_profiles(&m, &n, tag, &a.semiring, ProfileBound::new(a.max_states, a.depth))?;
            writeln!(out, "{}", v.to_json_value())?;
            return Ok(if v.is_equal() { EXIT_OK } else { EXIT_DIFFER });
        }
        Command::Check(a) => {
            let m = read_structure(&a.input.input)?;
            let phi = parse(&a.formula, Some(m.signature()))?;
            let g: Assignment = a.assign.into_iter().collect();
            writeln!(out, "{}", check(&m, &g, &phi)?)?;
        }
        Command::Equiv(a) => {
            let (m, n) = (read_structure(&a.left)?, read_structure(&a.right)?);
            let same = equivalent(&m, &n, a.logic, a.k)?;
            writeln!(out, "{}", if same { "equivalent" } else { "not equivalent" })?;
            return Ok(if same { EXIT_OK } else { EXIT_DIFFER });
        }
        Command::Enumerate(a) => {
            let sig = signature(&a.props, &a.actions)?;
            let tag = ClassTag::new(a.class, a.max_depth);
            let mut failed = None;
            for_each_in_class(tag, &sig, a.max_states, a.max_depth, &Budget::default(), |m| {
                match writeln!(out, "{}", to_json_value(m)) {
                    Ok(()) => true,
                    Err(e) => {
                        failed = Some(e);
                        false
                    }
                }
            })?;
            if let Some(e) = failed {
                return Err(e.into());
            }
        }
        Command::Verify(a) => {
            let sig = signature(&a.props, &a.actions)?;
            let bounds =
                Bounds { max_states: a.max_states, max_depth: a.depth, source_states: a.source_states, sample: a.sample };
            let report = verify_theorem_over(a.theorem, &sig, &bounds, a.seed)?;
            if a.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json())?)?;
            } else {
                writeln!(out, "{report}")?;
            }
            return Ok(if report.passed() { EXIT_OK } else { EXIT_DIFFER });
        }
        Command::NegativeDemo(a) => {
            let report = negative_demo(&a.semiring)?;
            if a.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json())?)?;
            } else {
                writeln!(out, "{report}")?;
            }
            return Ok(if report.holds { EXIT_OK } else { EXIT_DIFFER });
        }
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
