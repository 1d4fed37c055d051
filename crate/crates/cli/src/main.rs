//! `facecolor` command-line tool.
//!
//! Diagrams are read as graph PD text, abstract graphs as rotation-system
//! text or JSON. Input comes from `--input` or stdin. Exit codes: 1 usage,
//! 2 invalid input, 3 over budget, 4 internal inconsistency.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use facecolor::homology::{self, DEFAULT_DIM_BUDGET};
use facecolor::invariants::{census, pk_bracket_with, PkMethod, DEFAULT_BUDGET};
use facecolor::ribbon::{j_family, ImmersionMethod};
use facecolor::states::{self, StateError, StateSpace};
use facecolor::{
    color_bracket, oracle_pm_colorings, penrose, tensor_contraction, total_polynomial, HomologyError, IntPoly,
    InvariantError, PdError, PmDiagram, RibbonError, RibbonGraph, StateIndex, VirtualChoice,
};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Parser, Debug)]
#[command(
    name = "facecolor",
    version,
    about = "Face colour invariants of perfect matching diagrams"
)]
struct Cli {
    /// Worker threads for the state sums (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    workers: Option<u16>,
    /// Step budget for the brute-force oracles.
    #[arg(long, global = true, env = "FACECOLOR_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Check PK-bracket, colour bracket and tensor contraction agree before printing.
    #[arg(long, global = true)]
    self_check: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Input file; stdin when omitted.
    #[arg(long, short)]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MatchingChoice {
    /// Use this perfect matching (index in enumeration order) instead of the file's.
    #[arg(long)]
    matching: Option<usize>,
}

impl MatchingChoice {
    fn apply(&self, g: RibbonGraph) -> Result<RibbonGraph, CliError> {
        let Some(k) = self.matching else {
            return Ok(g);
        };
        let all = g.matchings();
        let m = all
            .get(k)
            .ok_or_else(|| CliError::Usage(format!("matching {k} out of range; the graph has {}", all.len())))?;
        Ok(g.clone().with_matching(m)?)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Invariant {
    Pk,
    Penrose,
    Color,
    Total,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Auto,
    Full,
    Reduced,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Drawing {
    Planarize,
    Spine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a diagram and print it in normal form.
    Parse(Input),
    /// Check a diagram's arc labels.
    Validate(Input),
    /// Compute one invariant of a diagram.
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "pk")]
        invariant: Invariant,
        /// Substitute this many colours.
        #[arg(long)]
        n: Option<i64>,
        /// Substitute this value for the degree variable.
        #[arg(long)]
        t: Option<i64>,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Count perfect matching colourings of a matched graph by brute force.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        matching: MatchingChoice,
    },
    /// Contract the diagram's tensor network at `n` colours.
    Tensor {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: u64,
    },
    /// Filtered colour homology at desk scale.
    Homology {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Betti numbers (default when nothing else is asked for).
        #[arg(long)]
        betti: bool,
        /// Harmonic colouring dimension of the state given by `--alpha`.
        #[arg(long, requires = "alpha")]
        harmonic: bool,
        /// State bits, site 0 first.
        #[arg(long)]
        alpha: Option<String>,
        /// Verify the colour basis identities at `n`; needs no input.
        #[arg(long)]
        check_basis: bool,
        /// Cap on the total dimension of the complex.
        #[arg(long, default_value_t = DEFAULT_DIM_BUDGET)]
        max_dim: u64,
    },
    /// PK-bracket of every perfect matching of a graph.
    Census {
        #[command(flatten)]
        input: Input,
        /// Colour counts to evaluate each row at.
        #[arg(long, value_delimiter = ',', default_value = "3,4")]
        probe: Vec<i64>,
    },
    /// Blow up every vertex of a graph into a triangle.
    Blowup {
        #[command(flatten)]
        input: Input,
        /// Print the immersed diagram instead of the graph.
        #[arg(long)]
        pd: bool,
    },
    /// Turn a matched graph into a diagram.
    Immerse {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        matching: MatchingChoice,
        #[arg(long, value_enum, default_value = "planarize")]
        method: Drawing,
    },
    /// Diagram of the J_m family member, `m` odd and at least 3.
    Jm {
        #[arg(long)]
        m: u32,
    },
    /// Circles of one state, or a summary of every state.
    States {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        alpha: Option<String>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error(transparent)]
    Ribbon(#[from] RibbonError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Pd(_) | CliError::Ribbon(_) | CliError::State(_) => 2,
            CliError::Invariant(e) if e.is_budget() => 3,
            CliError::Invariant(InvariantError::BadColors { .. }) => 1,
            CliError::Invariant(_) => 2,
            CliError::Homology(HomologyError::Budget { .. } | HomologyError::TooManySites(_)) => 3,
            CliError::Homology(HomologyError::BadColors(_)) => 1,
            CliError::Homology(HomologyError::State(_)) => 2,
            CliError::Homology(HomologyError::IllConditioned { .. }) => 4,
            CliError::Inconsistent(_) => 4,
        }
    }
}

struct Output {
    text: String,
    json: Value,
    /// Exit code for a result that printed normally but reports a failure.
    failed: Option<u8>,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            failed: None,
        }
    }
}

fn read_input(input: &Input) -> Result<String, CliError> {
    match &input.input {
        Some(path) => {
            std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
        }
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn diagram(input: &Input) -> Result<PmDiagram, CliError> {
    Ok(PmDiagram::parse_file(&read_input(input)?)?)
}

fn graph(input: &Input) -> Result<RibbonGraph, CliError> {
    Ok(RibbonGraph::parse(&read_input(input)?)?)
}

fn with_schema(v: Value) -> Value {
    let mut out = json!({ "schema": "1" });
    if let (Value::Object(dst), Value::Object(src)) = (&mut out, v) {
        dst.extend(src);
    }
    out
}

/// PK-bracket, colour bracket and (within budget) tensor contraction at `n = 3` must agree.
fn self_check(d: &PmDiagram, budget: u64) -> Result<(), CliError> {
    let pk = facecolor::pk_bracket(d)?;
    let color = color_bracket(d)?;
    if pk != color {
        return Err(CliError::Inconsistent(format!(
            "PK-bracket {pk} differs from colour bracket {color}"
        )));
    }
    match tensor_contraction(d, 3, budget) {
        Ok(r) => {
            let expected = pk.eval(3, 0);
            if expected.to_string() != r.value.to_string() || !r.all_terms_plus_one {
                return Err(CliError::Inconsistent(format!(
                    "tensor contraction at n=3 gives {} (all terms +1: {}), bracket gives {expected}",
                    r.value, r.all_terms_plus_one
                )));
            }
        }
        Err(e) if e.is_budget() => eprintln!("self-check: tensor contraction skipped ({e})"),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn parse_alpha(bits: &str, d: &PmDiagram) -> Result<StateIndex, CliError> {
    Ok(StateIndex::parse(bits, d.num_matchings())?)
}

/// Substitutes the given values, leaving the other variable symbolic.
fn specialize(p: &IntPoly, n: Option<i64>, t: Option<i64>) -> IntPoly {
    let p = match t {
        Some(t) => p.at_t(t),
        None => p.clone(),
    };
    match n {
        Some(n) => {
            let top = p.degree_t().unwrap_or(0);
            IntPoly::from_terms((0..=top).map(|i| ((0, i), p.t_coefficient(i).eval(n, 0))))
        }
        None => p,
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let budget = cli.budget;
    let check = |d: &PmDiagram| if cli.self_check { self_check(d, budget) } else { Ok(()) };
    match &cli.command {
        Command::Parse(input) => {
            let d = diagram(input)?;
            check(&d)?;
            let arcs = d.arc_labels().len();
            let text = format!(
                "{}\nmatchings: {}\nvirtuals: {}\nloops: {}\narcs: {arcs}",
                d.serialize(),
                d.num_matchings(),
                d.num_virtuals(),
                d.loops
            );
            let value = json!({
                "diagram": d.serialize(),
                "matchings": d.num_matchings(),
                "virtuals": d.num_virtuals(),
                "loops": d.loops,
                "arcs": arcs,
            });
            Ok(Output::ok(text, value))
        }
        Command::Validate(input) => match PmDiagram::parse_file(&read_input(input)?) {
            Ok(d) => {
                check(&d)?;
                Ok(Output::ok("ok".into(), json!({ "valid": true, "violations": [] })))
            }
            Err(PdError::Invalid(v)) => {
                let violations: Vec<String> = v.iter().map(|v| v.to_string()).collect();
                Ok(Output {
                    text: violations.join("\n"),
                    json: json!({ "valid": false, "violations": violations }),
                    failed: Some(2),
                })
            }
            Err(e) => Err(e.into()),
        },
        Command::Eval {
            input,
            invariant,
            n,
            t,
            method,
        } => {
            let d = diagram(input)?;
            check(&d)?;
            let p = match invariant {
                Invariant::Pk => pk_bracket_with(
                    &d,
                    match method {
                        Method::Auto => PkMethod::Auto,
                        Method::Full => PkMethod::StateSum,
                        Method::Reduced => PkMethod::Reduced,
                    },
                )?,
                Invariant::Penrose => penrose(&d)?,
                Invariant::Color => color_bracket(&d)?,
                Invariant::Total => total_polynomial(&d)?,
            };
            let name = format!("{invariant:?}").to_lowercase();
            let mut value = json!({ "invariant": name, "polynomial": p.to_string(), "terms": p.to_json() });
            let mut text = p.to_string();
            if n.is_some() || t.is_some() {
                let s = specialize(&p, *n, *t);
                text = s.to_string();
                value["value"] = json!(s.to_string());
                if let Some(n) = n {
                    value["n"] = json!(n);
                }
                if let Some(t) = t {
                    value["t"] = json!(t);
                }
            }
            Ok(Output::ok(text, value))
        }
        Command::Oracle { input, n, matching } => {
            let g = matching.apply(graph(input)?)?;
            if cli.self_check {
                self_check(&g.immerse()?, budget)?;
            }
            let count = oracle_pm_colorings(&g, *n, budget)?;
            Ok(Output::ok(
                count.to_string(),
                json!({ "n": n, "colorings": count.to_string() }),
            ))
        }
        Command::Tensor { input, n } => {
            let d = diagram(input)?;
            check(&d)?;
            let r = tensor_contraction(&d, *n, budget)?;
            let text = format!(
                "value: {}\nall_terms_plus_one: {}\nnonzero_terms: {}",
                r.value, r.all_terms_plus_one, r.nonzero_terms
            );
            let value = json!({
                "n": n,
                "value": r.value.to_string(),
                "all_terms_plus_one": r.all_terms_plus_one,
                "nonzero_terms": r.nonzero_terms.to_string(),
            });
            Ok(Output::ok(text, value))
        }
        Command::Homology {
            input,
            n,
            betti,
            harmonic,
            alpha,
            check_basis,
            max_dim,
        } => {
            let mut lines = Vec::new();
            let mut value = json!({ "n": n });
            let mut failed = None;
            if *check_basis {
                let r = homology::color_basis_check(*n)?;
                for c in &r.checks {
                    let scalar = c.scalar.map(|s| format!(" (scalar {s:.6})")).unwrap_or_default();
                    lines.push(format!("{}: {:.3e}{scalar}", c.name, c.max_deviation));
                }
                lines.push(format!("basis check: {}", if r.passed { "pass" } else { "FAIL" }));
                if !r.passed {
                    failed = Some(4);
                }
                value["basis"] = serde_json::to_value(&r).expect("report serializes");
            }
            let wants_betti = *betti || (!*harmonic && !*check_basis);
            if wants_betti || *harmonic {
                let d = diagram(input)?;
                check(&d)?;
                if wants_betti {
                    let c = homology::build_complex(&d, *n, *max_dim)?;
                    let r = homology::betti(&c)?;
                    lines.push(format!("dims: {:?}", r.dims));
                    lines.push(format!("ranks: {:?}", r.ranks));
                    lines.push(format!("betti: {:?}", r.betti));
                    lines.push(format!("euler characteristic: {}", r.euler_characteristic));
                    lines.push(format!("d^2 defect: {:.3e}", r.d_squared_defect));
                    value["betti"] = serde_json::to_value(&r).expect("report serializes");
                }
                if *harmonic {
                    let bits = alpha.as_deref().expect("clap enforces --alpha");
                    let s = parse_alpha(bits, &d)?;
                    let h = homology::harmonic_dim(&d, s, *n)?;
                    lines.push(format!("harmonic dimension at {s}: {h}"));
                    value["harmonic"] = json!({ "alpha": s.to_string(), "dim": h });
                }
            }
            Ok(Output {
                text: lines.join("\n"),
                json: value,
                failed,
            })
        }
        Command::Census { input, probe } => {
            let g = graph(input)?;
            let rows = census(&g, probe)?;
            if cli.self_check {
                for m in g.matchings() {
                    self_check(&g.clone().with_matching(&m)?.immerse()?, budget)?;
                }
            }
            let text = rows
                .iter()
                .map(|r| {
                    let evals: Vec<String> = r.evaluations.iter().map(|(n, v)| format!("n={n}: {v}")).collect();
                    format!("{:?}\t{}\t{}", r.matching, r.pk, evals.join(", "))
                })
                .collect::<Vec<_>>()
                .join("\n");
            let zeros = rows.iter().filter(|r| r.zero).count();
            let value = json!({ "rows": rows, "zero_rows": zeros });
            Ok(Output::ok(text, value))
        }
        Command::Blowup { input, pd } => {
            let b = graph(input)?.blowup();
            if *pd {
                let d = b.immerse()?;
                check(&d)?;
                Ok(Output::ok(d.serialize(), json!({ "diagram": d.serialize() })))
            } else {
                Ok(Output::ok(
                    b.to_text().trim_end().to_string(),
                    json!({ "graph": b.to_json() }),
                ))
            }
        }
        Command::Immerse {
            input,
            matching,
            method,
        } => {
            let method = match method {
                Drawing::Planarize => ImmersionMethod::Planarize,
                Drawing::Spine => ImmersionMethod::Spine,
            };
            let d = matching.apply(graph(input)?)?.immerse_with(method)?;
            check(&d)?;
            Ok(Output::ok(d.serialize(), json!({ "diagram": d.serialize() })))
        }
        Command::Jm { m } => {
            let d = j_family(*m)?;
            check(&d)?;
            Ok(Output::ok(d.serialize(), json!({ "m": m, "diagram": d.serialize() })))
        }
        Command::States { input, alpha } => {
            let d = diagram(input)?;
            check(&d)?;
            match alpha {
                Some(bits) => {
                    let s = parse_alpha(bits, &d)?;
                    let dec = states::circles(&d, s, VirtualChoice::all_plain(d.num_virtuals()))?;
                    let tg = states::touch_graph_of(&dec);
                    let mut lines: Vec<String> = dec
                        .circles
                        .iter()
                        .map(|c| {
                            let arcs: Vec<String> = c.arcs.iter().map(u32::to_string).collect();
                            format!("circle {}: {}", c.id.0, arcs.join(" "))
                        })
                        .collect();
                    let edges: Vec<String> = tg
                        .edges
                        .iter()
                        .map(|&(a, b)| format!("{}-{}", tg.vertices[a].0, tg.vertices[b].0))
                        .collect();
                    lines.push(format!("touch: {}", edges.join(" ")));
                    let value = json!({ "alpha": s.to_string(), "decomposition": dec, "touch": tg });
                    Ok(Output::ok(lines.join("\n"), value))
                }
                None => {
                    let space = StateSpace::new(&d);
                    let loops = d.loops as usize;
                    let rows: Vec<(String, u32, usize)> = StateIndex::all(d.num_matchings())
                        .map(|s| (s.to_string(), s.weight(), space.circle_count(s) + loops))
                        .collect();
                    let text = rows
                        .iter()
                        .map(|(s, w, k)| format!("{s}\tdegree {w}\tcircles {k}"))
                        .collect::<Vec<_>>()
                        .join("\n");
                    let value = json!({
                        "states": rows
                            .iter()
                            .map(|(s, w, k)| json!({ "alpha": s, "degree": w, "circles": k }))
                            .collect::<Vec<_>>()
                    });
                    Ok(Output::ok(text, value))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w as usize).build_global() {
            eprintln!("error: cannot start {w} workers: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", with_schema(out.json));
            } else if !out.text.is_empty() {
                println!("{}", out.text);
            }
            out.failed.map_or(ExitCode::SUCCESS, ExitCode::from)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
