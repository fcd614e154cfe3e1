//! The `subkit` command line.
//!
//! Exit codes: `sat` and `brute` return 0 for SAT, 1 for UNSAT and 2 when the
//! search bound was reached. Every other command returns 0 on success. Errors
//! use 64 (usage), 65 (malformed input), 66 (unreadable file) and 70
//! (internal invariant).

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bisim::{bisimilar, max_bisimulation};
use crate::calculus::{assemble_reduction_proof, check_derivation, verify_reduction_trace, Derivation};
use crate::checker::{stage_sequence, truth_set, Checker};
use crate::games::{
    correspondence_check, pcp_bounded_search, pcp_encode_with, pcp_fixtures, pcp_witness_model, strategy_for,
    win_ranks, Board, PcpEncoding, PcpInstance,
};
use crate::kripke::{generate, KripkeModel, ModelKind, PointedModel};
use crate::reduce::{reduce_to_ml, ReductionTrace};
use crate::sat::{brute_force_search, msl_sat, SatResult, SatStatus};
use crate::syntax::{parse_formula, Formula, PropName};
use crate::translate::{
    imr_truth_set, mu_truth_set, mu_unfold, parse_imr, parse_pdl, pdl_truth_set, translate_imr, translate_pdl,
};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Io(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::Io(_) => 66,
            CliError::Internal(_) => 70,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) | CliError::Internal(m) => m,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

type CliResult = Result<Output, CliError>;

struct Output {
    json: Value,
    text: String,
    code: i32,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "subkit", version, about = "Modal substitution logic workbench")]
struct Cli {
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Seed for generated models (`chain:N`, `tree:B:H`, `random:N:D`).
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FormulaArg {
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file")]
    formula: Option<String>,
    /// File holding the formula text.
    #[arg(long)]
    formula_file: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truth value at one state.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long)]
        state: String,
        #[command(flatten)]
        f: FormulaArg,
        #[arg(long)]
        max_stages: Option<usize>,
    },
    /// States where a formula holds.
    Truthset {
        #[arg(long)]
        model: String,
        #[command(flatten)]
        f: FormulaArg,
        #[arg(long)]
        max_stages: Option<usize>,
    },
    /// Stage sequence of a letter under repeated substitution.
    Stages {
        #[arg(long)]
        model: String,
        #[arg(long)]
        pivot: String,
        #[arg(long)]
        body: String,
        #[arg(long)]
        max_stages: Option<usize>,
    },
    /// Substitution-free equivalent with its rewrite trace.
    Reduce {
        #[command(flatten)]
        f: FormulaArg,
        /// Writes the trace as JSON lines.
        #[arg(long)]
        trace_out: Option<String>,
    },
    /// Decides satisfiability of a star-free formula.
    Sat {
        #[command(flatten)]
        f: FormulaArg,
    },
    /// Bounded model search for any formula.
    Brute {
        #[command(flatten)]
        f: FormulaArg,
        #[arg(long, default_value_t = 4)]
        max_states: usize,
    },
    /// Largest bisimulation between two models.
    Bisim {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, requires = "right_state")]
        left_state: Option<String>,
        #[arg(long, requires = "left_state")]
        right_state: Option<String>,
    },
    /// Translates a PDL or announcement formula.
    Translate {
        #[arg(long, value_enum)]
        from: Source,
        #[arg(long)]
        formula: String,
        /// Compares direct evaluation with the translation on this model.
        #[arg(long)]
        model: Option<String>,
    },
    /// Least fixpoint of a positive body.
    Mu {
        #[arg(long)]
        model: String,
        #[arg(long)]
        pivot: String,
        #[arg(long)]
        body: String,
    },
    /// Reachability games.
    Game {
        #[command(subcommand)]
        action: GameAction,
    },
    /// Correspondence-problem instances.
    Pcp {
        #[command(subcommand)]
        action: PcpAction,
    },
    /// Checks a derivation, or derives a formula's reduct.
    Prove {
        /// Derivation in JSON lines.
        #[arg(long, conflicts_with_all = ["formula", "trace"])]
        proof: Option<String>,
        /// Prints a derivation of this formula's reduction.
        #[arg(long)]
        formula: Option<String>,
        /// Verifies a reduction trace of `--formula`.
        #[arg(long, requires = "formula")]
        trace: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Source {
    Pdl,
    Imr,
}

#[derive(Subcommand, Debug)]
enum GameAction {
    /// Rank of every position.
    Ranks {
        #[arg(long)]
        board: String,
    },
    /// Compares the ranks with the winning formulas.
    Check {
        #[arg(long)]
        board: String,
    },
    /// Winning strategy from a position.
    Strategy {
        #[arg(long)]
        board: String,
        #[arg(long)]
        start: String,
    },
}

#[derive(Subcommand, Debug)]
enum PcpAction {
    /// Formula satisfiable iff the instance has a solution.
    Encode {
        #[arg(long)]
        instance: String,
        /// Uses the encoding without the repaired witness clause.
        #[arg(long)]
        literal: bool,
    },
    /// Bounded search for a solution.
    Solve {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Model built from a solution, checked against the encoding.
    Witness {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn load_formula(f: &FormulaArg) -> Result<Formula, CliError> {
    let text = match (&f.formula, &f.formula_file) {
        (Some(t), None) => t.clone(),
        (None, Some(path)) => read_file(path)?,
        _ => return Err(CliError::Usage("give exactly one of --formula, --formula-file".into())),
    };
    parse_formula(text.trim()).map_err(data)
}

fn default_pcp() -> PcpInstance {
    pcp_fixtures().remove("two_pairs").expect("fixture")
}

/// `chain:N`, `tree:B:H` or `random:N:D`, over letters p and q.
fn generated_model(spec: &str, seed: u64) -> Option<Result<KripkeModel, CliError>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let int = |s: &str| s.parse::<usize>().map_err(data);
    let kind = match parts.as_slice() {
        ["chain", n] => int(n).map(|len| ModelKind::Chain { len }),
        ["tree", b, h] => int(b).and_then(|branching| Ok(ModelKind::Tree { branching, height: int(h)? })),
        ["random", n, d] => int(n).and_then(|states| {
            let density = d.parse::<f64>().map_err(data)?;
            Ok(ModelKind::Random { states, density })
        }),
        _ => return None,
    };
    let atoms = [PropName::new("p").expect("valid"), PropName::new("q").expect("valid")];
    Some(kind.and_then(|k| generate(k, &atoms, seed).map_err(data)))
}

fn load_model(name: &str, seed: u64) -> Result<KripkeModel, CliError> {
    if let Some(m) = KripkeModel::fixture(name) {
        return Ok(m);
    }
    if let Some(m) = generated_model(name, seed) {
        return m;
    }
    if name == "fig9" {
        let inst = default_pcp();
        let sol = pcp_bounded_search(&inst, 8).ok_or_else(|| CliError::Internal("fixture instance unsolved".into()))?;
        return Ok(pcp_witness_model(&inst, &sol).map_err(data)?.model);
    }
    KripkeModel::from_json(&read_file(name)?).map_err(data)
}

fn load_board(name: &str, seed: u64) -> Result<Board, CliError> {
    Board::from_model(load_model(name, seed)?).map_err(data)
}

fn load_instance(name: &str) -> Result<PcpInstance, CliError> {
    if let Some(i) = pcp_fixtures().remove(name) {
        return Ok(i);
    }
    PcpInstance::from_json(&read_file(name)?).map_err(data)
}

fn prop_name(s: &str) -> Result<PropName, CliError> {
    PropName::new(s).map_err(data)
}

fn write_out(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn sat_output(r: &SatResult) -> Output {
    let code = match r.status {
        SatStatus::Sat => 0,
        SatStatus::Unsat => 1,
        SatStatus::Unknown => 2,
    };
    let mut json = json!({ "status": r.status });
    let mut text = r.status.to_string();
    if let Some(w) = &r.witness {
        json["witness"] = w.to_json_value();
        let _ = write!(text, "\nwitness at {}: {}", w.point, w.model.to_json());
    }
    Output { json, text, code }
}

fn names_text(names: &[String]) -> String {
    format!("{{{}}}", names.join(","))
}

fn execute(cmd: Command, seed: u64) -> CliResult {
    match cmd {
        Command::Check {
            model,
            state,
            f,
            max_stages,
        } => {
            let m = load_model(&model, seed)?;
            let f = load_formula(&f)?;
            let mut c = Checker::new(&m);
            if let Some(cap) = max_stages {
                c = c.with_max_stages(cap);
            }
            let r = c.eval(&state, &f).map_err(data)?;
            Ok(Output::ok(json!({ "result": r }), r.to_string()))
        }
        Command::Truthset { model, f, max_stages } => {
            let m = load_model(&model, seed)?;
            let f = load_formula(&f)?;
            let mut c = Checker::new(&m);
            if let Some(cap) = max_stages {
                c = c.with_max_stages(cap);
            }
            let names = m.names_of(&c.truth_set(&f).map_err(data)?);
            Ok(Output::ok(json!({ "states": names }), names_text(&names)))
        }
        Command::Stages {
            model,
            pivot,
            body,
            max_stages,
        } => {
            let m = load_model(&model, seed)?;
            let body = parse_formula(&body).map_err(data)?;
            let seq = stage_sequence(&m, &prop_name(&pivot)?, &body, max_stages).map_err(data)?;
            let stages: Vec<Vec<String>> = seq.stages.iter().map(|s| m.names_of(s)).collect();
            let mut text: Vec<String> = stages.iter().map(|s| names_text(s)).collect();
            text.push(format!("pre_period {} period {}", seq.pre_period, seq.period));
            Ok(Output::ok(
                json!({ "stages": stages, "pre_period": seq.pre_period, "period": seq.period }),
                text.join("\n"),
            ))
        }
        Command::Reduce { f, trace_out } => {
            let f = load_formula(&f)?;
            let (out, trace) = reduce_to_ml(&f).map_err(data)?;
            if let Some(path) = trace_out {
                write_out(&path, &trace.to_json_lines())?;
            }
            Ok(Output::ok(
                json!({ "formula": out, "rewrites": trace.rewrite_count(), "steps": trace.steps.len() }),
                out.to_string(),
            ))
        }
        Command::Sat { f } => {
            let f = load_formula(&f)?;
            Ok(sat_output(&msl_sat(&f).map_err(data)?))
        }
        Command::Brute { f, max_states } => {
            let f = load_formula(&f)?;
            Ok(sat_output(&brute_force_search(&f, max_states).map_err(data)?))
        }
        Command::Bisim {
            left,
            right,
            left_state,
            right_state,
        } => {
            let (l, r) = (load_model(&left, seed)?, load_model(&right, seed)?);
            let vocab: BTreeSet<PropName> = l.props().chain(r.props()).cloned().collect();
            let rel = max_bisimulation(&l, &r, &vocab).map_err(data)?;
            let mut text: Vec<String> = rel.iter().map(|(a, b)| format!("{a} ~ {b}")).collect();
            let mut json = json!({ "bisimulation": rel });
            if let (Some(a), Some(b)) = (left_state, right_state) {
                let yes = bisimilar(&l, &a, &r, &b, &vocab).map_err(data)?;
                json["bisimilar"] = json!(yes);
                text.push(format!("{a} ~ {b}: {yes}"));
            }
            Ok(Output::ok(json, text.join("\n")))
        }
        Command::Translate { from, formula, model } => {
            let m = model.as_deref().map(|m| load_model(m, seed)).transpose()?;
            let (out, agree) = match from {
                Source::Pdl => {
                    let g = parse_pdl(&formula).map_err(data)?;
                    let t = translate_pdl(&g);
                    let agree = m
                        .as_ref()
                        .map(|m| Ok::<_, CliError>(pdl_truth_set(m, &g).map_err(data)? == truth_set(m, &t).map_err(data)?))
                        .transpose()?;
                    (t, agree)
                }
                Source::Imr => {
                    let g = parse_imr(&formula).map_err(data)?;
                    let t = translate_imr(&g);
                    let agree = m
                        .as_ref()
                        .map(|m| Ok::<_, CliError>(imr_truth_set(m, &g).map_err(data)? == truth_set(m, &t).map_err(data)?))
                        .transpose()?;
                    (t, agree)
                }
            };
            let mut json = json!({ "formula": out });
            let mut text = out.to_string();
            if let Some(a) = agree {
                json["agree"] = json!(a);
                let _ = write!(text, "\nagree: {a}");
            }
            Ok(Output::ok(json, text))
        }
        Command::Mu { model, pivot, body } => {
            let m = load_model(&model, seed)?;
            let p = prop_name(&pivot)?;
            let body = parse_formula(&body).map_err(data)?;
            let unfolded = mu_unfold(&p, &body).map_err(data)?;
            let direct = mu_truth_set(&m, &p, &body).map_err(data)?;
            if truth_set(&m, &unfolded).map_err(data)? != direct {
                return Err(CliError::Internal("fixpoint and its unfolding disagree".into()));
            }
            let names = m.names_of(&direct);
            Ok(Output::ok(
                json!({ "unfolding": unfolded, "states": names }),
                format!("{}\n{}", unfolded, names_text(&names)),
            ))
        }
        Command::Game { action } => game(action, seed),
        Command::Pcp { action } => pcp(action),
        Command::Prove { proof, formula, trace } => prove(proof, formula, trace),
    }
}

fn game(action: GameAction, seed: u64) -> CliResult {
    match action {
        GameAction::Ranks { board } => {
            let b = load_board(&board, seed)?;
            let t = win_ranks(&b);
            let text = t
                .ranks
                .iter()
                .map(|(s, r)| format!("{s}\t{r}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output::ok(json!({ "ranks": t.ranks }), text))
        }
        GameAction::Check { board } => {
            let ok = correspondence_check(&load_board(&board, seed)?);
            Ok(Output::ok(json!({ "correspondence": ok }), ok.to_string()))
        }
        GameAction::Strategy { board, start } => {
            let s = strategy_for(&load_board(&board, seed)?, &start).map_err(data)?;
            let text = s
                .iter()
                .map(|(a, b)| format!("{a} -> {b}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output::ok(json!({ "strategy": s }), text))
        }
    }
}

fn pcp(action: PcpAction) -> CliResult {
    match action {
        PcpAction::Encode { instance, literal } => {
            let inst = load_instance(&instance)?;
            let enc = if literal {
                PcpEncoding::Literal
            } else {
                PcpEncoding::Repaired
            };
            let f = pcp_encode_with(&inst, enc).map_err(data)?;
            Ok(Output::ok(json!({ "formula": f }), f.to_string()))
        }
        PcpAction::Solve { instance, max_len } => {
            let inst = load_instance(&instance)?;
            let sol = pcp_bounded_search(&inst, max_len);
            let text = match &sol {
                Some(s) => s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
                None => format!("no solution up to length {max_len}"),
            };
            Ok(Output::ok(json!({ "solution": sol }), text))
        }
        PcpAction::Witness { instance, max_len } => {
            let inst = load_instance(&instance)?;
            let sol = pcp_bounded_search(&inst, max_len)
                .ok_or_else(|| CliError::Data(format!("no solution up to length {max_len}")))?;
            let w: PointedModel = pcp_witness_model(&inst, &sol).map_err(data)?;
            let f = pcp_encode_with(&inst, PcpEncoding::Repaired).map_err(data)?;
            let holds = Checker::new(&w.model).eval(&w.point, &f).map_err(data)?;
            Ok(Output::ok(
                json!({ "solution": sol, "witness": w.to_json_value(), "satisfies": holds }),
                format!("witness at {} satisfies encoding: {holds}\n{}", w.point, w.model.to_json()),
            ))
        }
    }
}

fn prove(proof: Option<String>, formula: Option<String>, trace: Option<String>) -> CliResult {
    if let Some(path) = proof {
        let d = Derivation::from_json_lines(&read_file(&path)?).map_err(data)?;
        return match check_derivation(&d) {
            Ok(rep) => Ok(Output::ok(
                json!({ "ok": true, "lines": rep.lines, "hypotheses": rep.hypotheses, "conclusion": rep.conclusion }),
                format!("ok, {} lines", rep.lines),
            )),
            Err(e) => Err(data(e)),
        };
    }
    let Some(src) = formula else {
        return Err(CliError::Usage("give --proof or --formula".into()));
    };
    let f = parse_formula(&src).map_err(data)?;
    if let Some(path) = trace {
        let t = ReductionTrace::from_json_lines(f, &read_file(&path)?).map_err(data)?;
        verify_reduction_trace(&t).map_err(data)?;
        return Ok(Output::ok(
            json!({ "ok": true, "steps": t.steps.len(), "output": t.output }),
            format!("ok, {} steps", t.steps.len()),
        ));
    }
    let d = assemble_reduction_proof(&f).map_err(data)?;
    check_derivation(&d).map_err(|e| CliError::Internal(format!("assembled derivation rejected: {e}")))?;
    let lines = d.to_json_lines();
    let json: Vec<Value> = d
        .lines
        .iter()
        .map(|l| serde_json::to_value(l).expect("serializable"))
        .collect();
    Ok(Output::ok(json!({ "proof": json }), lines.trim_end().to_string()))
}

/// Runs one command; returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let format = cli.format;
    match execute(cli.command, cli.seed) {
        Ok(o) => {
            let _ = match format {
                Format::Json => writeln!(out, "{}", o.json),
                Format::Text => writeln!(out, "{}", o.text),
            };
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "subkit: {}", e.message());
            e.code()
        }
    }
}
