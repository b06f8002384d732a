use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use rhmember::autostruct::{builtin_from_spec, AutomaticStructure};
use rhmember::completion::{run_completion_traced, CompletionOutcome, CompletionState};
use rhmember::lstallings::{LStallingsOutcome, LStallingsRun, LStallingsSummary};
use rhmember::oracle::family_membership;
use rhmember::presentation::PresentationFile;
use rhmember::relhyp::{decide_membership, MembershipVerdict, RelHypInstance, Schedule, VerdictReport};
use rhmember::stallings::{Index, StallingsGraph};
use rhmember::words::{Alphabet, Word};
use rhmember::Error;

const EXIT_MEMBER: u8 = 0;
const EXIT_NON_MEMBER: u8 = 1;
const EXIT_EXHAUSTED: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_BUNDLE: u8 = 4;
const EXIT_PANIC: u8 = 5;
const EXIT_NO_ORACLE: u8 = 6;

#[derive(Parser)]
#[command(name = "rhmember", version, about = "Subgroup membership via Stallings graphs and automatic structures")]
struct Cli {
    /// Print JSON instead of a text summary.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for per-step artifacts.
    #[arg(long, global = true)]
    trace_dir: Option<PathBuf>,
    /// Seed for randomized choices (fold order).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FreeArgs {
    /// Comma-separated generators, e.g. "a*a,a*b^-1".
    #[arg(long, default_value = "")]
    gens: String,
    /// Comma-separated generator names; inferred from the words if omitted.
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    gens1: String,
    #[arg(long)]
    gens2: String,
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Stallings graph of a subgroup of a free group.
    Fold {
        #[command(flatten)]
        free: FreeArgs,
        /// Write the graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the graph as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank and a free basis.
    Rank {
        #[command(flatten)]
        free: FreeArgs,
    },
    /// Index in the free group.
    Index {
        #[command(flatten)]
        free: FreeArgs,
    },
    /// Intersection of two subgroups of a free group.
    Intersect {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Whether two subgroups of a free group are conjugate.
    Conjugate {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Positive membership search by relator completion.
    Complete {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, default_value = "")]
        subgroup: String,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
        /// Glue every rotation and inverse of each relator.
        #[arg(long)]
        glue_closure: bool,
    },
    /// Stallings graph relative to an automatic structure.
    LStallings {
        /// Bundle directory, manifest file, or `builtin:...`.
        #[arg(long)]
        structure: String,
        #[arg(long, default_value = "")]
        subgroup: String,
        #[arg(long, default_value_t = 50)]
        budget: usize,
        /// Test these comma-separated words against the certified graph.
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        emit_dot: Option<PathBuf>,
    },
    /// Decide membership in a relatively quasi-convex subgroup.
    Member {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long)]
        structure: String,
        #[arg(long, default_value = "")]
        subgroup: String,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = rhmember::relhyp::DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, value_enum, default_value = "diag")]
        schedule: ScheduleArg,
        /// Write the non-membership certificate here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Membership by normal forms, for builtin structures.
    Oracle {
        #[arg(long)]
        structure: String,
        #[arg(long, default_value = "")]
        subgroup: String,
        #[arg(long)]
        element: String,
    },
    /// Check a structure's axioms on all words up to a length.
    ValidateStructure {
        #[arg(long)]
        structure: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ScheduleArg {
    Diag,
    Alt,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StructureInvalid(_) | Error::UnsupportedStructure(_) => EXIT_BUNDLE,
            Error::NoOracle(_) => EXIT_NO_ORACLE,
            _ => EXIT_PARSE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = catch_unwind(AssertUnwindSafe(|| run(&cli)));
    match result {
        Ok(Ok(code)) => ExitCode::from(code),
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(EXIT_PANIC),
    }
}

fn emit<T: Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        print!("{}", text());
    }
}

/// Generator names used by `words`, sorted.
fn infer_alphabet(words: &[&str]) -> Result<Alphabet, Error> {
    let mut names: Vec<String> = Vec::new();
    for list in words {
        let mut offset = 0;
        for token in list.split(|c| c == ',' || c == '*') {
            let base = token.split('^').next().unwrap_or("");
            let pos = offset + (base.len() - base.trim_start().len());
            offset += token.len() + 1;
            let base = base.trim();
            if base.is_empty() || base == "1" {
                continue;
            }
            if !base.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::Parse { pos, msg: format!("bad generator name {base:?}") });
            }
            if !names.iter().any(|n| n == base) {
                names.push(base.to_string());
            }
        }
    }
    names.sort();
    Alphabet::new(names.iter().map(String::as_str))
}

fn alphabet_for(given: &Option<String>, words: &[&str]) -> Result<Alphabet, Error> {
    match given {
        Some(a) => Alphabet::new(a.split(',').map(str::trim).filter(|s| !s.is_empty())),
        None => infer_alphabet(words),
    }
}

fn load_structure(spec: &str) -> Result<AutomaticStructure, Error> {
    if spec.starts_with("builtin:") {
        builtin_from_spec(spec)
    } else {
        AutomaticStructure::load(Path::new(spec))
    }
}

fn index_str(i: Index) -> String {
    match i {
        Index::Finite(n) => n.to_string(),
        Index::Infinite => "∞".into(),
    }
}

fn index_json(i: Index) -> serde_json::Value {
    match i {
        Index::Finite(n) => json!(n),
        Index::Infinite => json!("infinite"),
    }
}

fn free_graph(cli: &Cli, free: &FreeArgs) -> Result<StallingsGraph, Error> {
    let a = alphabet_for(&free.alphabet, &[&free.gens])?;
    let gens = a.parse_word_list(&free.gens)?;
    let raw = rhmember::stallings::bouquet(&a, &gens)?;
    let mut order: Vec<usize> = (0..raw.num_edges()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cli.seed));
    Ok(raw.fold_in_order(&order).trim())
}

fn words_json(a: &Alphabet, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| a.format_word(w)).collect()
}

fn graph_summary(g: &StallingsGraph) -> serde_json::Value {
    let (rank, basis) = g.rank_and_basis();
    json!({
        "vertices": g.num_vertices(),
        "edges": g.num_edges(),
        "rank": rank,
        "index": index_json(g.index_free()),
        "basis": words_json(g.alphabet(), &basis),
    })
}

fn graph_text(g: &StallingsGraph) -> String {
    let (rank, _) = g.rank_and_basis();
    format!(
        "vertices: {}\nedges: {}\nrank: {rank}\nindex: {}\n",
        g.num_vertices(),
        g.num_edges(),
        index_str(g.index_free())
    )
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Fold { free, dot, out } => {
            let g = free_graph(cli, free)?;
            if let Some(p) = dot {
                fs::write(p, g.to_dot())?;
            }
            if let Some(p) = out {
                write_json(p, &g.to_json())?;
            }
            emit(cli, &graph_summary(&g), || graph_text(&g));
            Ok(0)
        }
        Command::Rank { free } => {
            let g = free_graph(cli, free)?;
            let (rank, basis) = g.rank_and_basis();
            let basis = words_json(g.alphabet(), &basis);
            emit(cli, &json!({ "rank": rank, "basis": basis }), || {
                format!("rank: {rank}\nbasis: {}\n", basis.join(", "))
            });
            Ok(0)
        }
        Command::Index { free } => {
            let g = free_graph(cli, free)?;
            let i = g.index_free();
            emit(cli, &json!({ "index": index_json(i) }), || format!("index: {}\n", index_str(i)));
            Ok(0)
        }
        Command::Intersect { pair } => {
            let a = alphabet_for(&pair.alphabet, &[&pair.gens1, &pair.gens2])?;
            let g1 = rhmember::stallings::stallings_graph(&a, &a.parse_word_list(&pair.gens1)?)?;
            let g2 = rhmember::stallings::stallings_graph(&a, &a.parse_word_list(&pair.gens2)?)?;
            let g = g1.intersect_free(&g2)?;
            emit(cli, &graph_summary(&g), || {
                let (_, basis) = g.rank_and_basis();
                format!("{}basis: {}\n", graph_text(&g), words_json(&a, &basis).join(", "))
            });
            Ok(0)
        }
        Command::Conjugate { pair } => {
            let a = alphabet_for(&pair.alphabet, &[&pair.gens1, &pair.gens2])?;
            let g1 = rhmember::stallings::stallings_graph(&a, &a.parse_word_list(&pair.gens1)?)?;
            let g2 = rhmember::stallings::stallings_graph(&a, &a.parse_word_list(&pair.gens2)?)?;
            let c = g1.conjugate_free(&g2)?;
            let cs = c.as_ref().map(|w| a.format_word(w));
            emit(cli, &json!({ "conjugate": c.is_some(), "conjugator": cs }), || match &cs {
                Some(w) => format!("conjugate by: {}\n", if w.is_empty() { "1" } else { w }),
                None => "not conjugate\n".into(),
            });
            Ok(0)
        }
        Command::Complete { presentation, subgroup, element, rounds, glue_closure } => {
            let (pres, _) = PresentationFile::read(presentation)?.build()?;
            let a = pres.alphabet().clone();
            let gens = a.parse_word_list(subgroup)?;
            let g = a.parse_word(element)?;
            let state = CompletionState::new(pres, &gens, g)?.with_glue_closure(*glue_closure);
            let mut trace_err = None;
            let outcome = run_completion_traced(state, *rounds, |s| {
                if let Some(dir) = &cli.trace_dir {
                    let path = dir.join(format!("round_{:03}.json", s.round()));
                    if let Err(e) = write_json(&path, &s.graph().to_json()) {
                        trace_err.get_or_insert(e);
                    }
                }
            });
            if let Some(e) = trace_err {
                return Err(e.into());
            }
            emit(cli, &outcome, || match outcome {
                CompletionOutcome::Member { rounds } => format!("member (round {rounds})\n"),
                CompletionOutcome::BudgetExhausted { rounds } => format!("undecided after {rounds} rounds\n"),
            });
            Ok(match outcome {
                CompletionOutcome::Member { .. } => EXIT_MEMBER,
                CompletionOutcome::BudgetExhausted { .. } => EXIT_EXHAUSTED,
            })
        }
        Command::LStallings { structure, subgroup, budget, element, emit_dot } => {
            let s = Arc::new(load_structure(structure)?);
            let a = s.alphabet().clone();
            let gens = a.parse_word_list(subgroup)?;
            let outcome = LStallingsRun::new(s, &gens)?.run(*budget)?;
            match outcome {
                LStallingsOutcome::Certified(g) => {
                    if let Some(p) = emit_dot {
                        fs::write(p, g.graph().to_dot())?;
                    }
                    if let Some(dir) = &cli.trace_dir {
                        write_json(&dir.join("l_stallings.json"), &g.graph().to_json())?;
                    }
                    let mut answers = Vec::new();
                    for w in a.parse_word_list(element.as_deref().unwrap_or(""))? {
                        answers.push((a.format_word(&w), g.membership(&w)?));
                    }
                    let summary = LStallingsSummary::from(&g);
                    let report = json!({ "certified": true, "graph": summary, "membership": answers });
                    emit(cli, &report, || {
                        let mut t = format!(
                            "certified\nvertices: {}\nedges: {}\n",
                            g.graph().num_vertices(),
                            g.graph().num_edges()
                        );
                        for (w, m) in &answers {
                            t += &format!("{}: {}\n", if w.is_empty() { "1" } else { w }, if *m { "member" } else { "non-member" });
                        }
                        t
                    });
                    Ok(EXIT_MEMBER)
                }
                LStallingsOutcome::BudgetExhausted { iterations, graph } => {
                    if let Some(p) = emit_dot {
                        fs::write(p, graph.to_dot())?;
                    }
                    let report = json!({ "certified": false, "iterations": iterations, "vertices": graph.num_vertices() });
                    emit(cli, &report, || format!("not certified after {iterations} iterations\n"));
                    Ok(EXIT_EXHAUSTED)
                }
            }
        }
        Command::Member { presentation, structure, subgroup, element, budget, schedule, certificate } => {
            let (pres, peripherals) = PresentationFile::read(presentation)?.build()?;
            let s = Arc::new(load_structure(structure)?);
            let instance = RelHypInstance::new(pres, peripherals, s)?;
            let a = instance.presentation().alphabet().clone();
            let gens = a.parse_word_list(subgroup)?;
            let g = a.parse_word(element)?;
            let schedule = match schedule {
                ScheduleArg::Diag => Schedule::Diag,
                ScheduleArg::Alt => Schedule::Alt,
            };
            let verdict = decide_membership(&instance, &gens, &g, schedule, *budget)?;
            let report = VerdictReport::new(&verdict, &instance, &gens, &g);
            if let (Some(path), Some(cert)) = (certificate, &report.certificate) {
                write_json(path, cert)?;
            }
            if let Some(dir) = &cli.trace_dir {
                write_json(&dir.join("member.json"), &report)?;
            }
            emit(cli, &report, || {
                let sp = &report.spent;
                format!(
                    "{}\nsteps: {}\ncompletion rounds: {}\ncandidates: {}\nrelative iterations: {}\n",
                    report.verdict.replace('_', " "),
                    sp.steps,
                    sp.completion_rounds,
                    sp.candidates_admitted,
                    sp.lstallings_iterations
                )
            });
            Ok(match verdict {
                MembershipVerdict::Member { .. } => EXIT_MEMBER,
                MembershipVerdict::NonMember { .. } => EXIT_NON_MEMBER,
                MembershipVerdict::BudgetExhausted { .. } => EXIT_EXHAUSTED,
            })
        }
        Command::Oracle { structure, subgroup, element } => {
            let s = load_structure(structure)?;
            let family = s
                .family()
                .ok_or_else(|| Error::NoOracle("only builtin structures carry a normal-form oracle".into()))?;
            let a = s.alphabet();
            let gens = a.parse_word_list(subgroup)?;
            let member = family_membership(family, &gens, &a.parse_word(element)?)?;
            emit(cli, &json!({ "member": member }), || {
                format!("{}\n", if member { "member" } else { "non-member" })
            });
            Ok(if member { EXIT_MEMBER } else { EXIT_NON_MEMBER })
        }
        Command::ValidateStructure { structure, depth } => {
            let s = load_structure(structure)?;
            let report = s.validate(*depth);
            let value = json!({ "ok": report.is_ok(), "report": report });
            emit(cli, &value, || {
                let mut t = format!("checked {} words up to length {}\n", report.words_checked, report.depth);
                for v in &report.violations {
                    t += &format!("violation at {} {:?}: {}\n", v.word, v.letter, v.problem);
                }
                t += if report.is_ok() { "ok\n" } else { "invalid\n" };
                t
            });
            Ok(if report.is_ok() { 0 } else { EXIT_BUNDLE })
        }
    }
}
