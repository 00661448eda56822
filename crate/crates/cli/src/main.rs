use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dialgebra::ccs::{build_ccs_dialgebra, check_async_dialgebraic, experiment_channels};
use dialgebra::dialgebra::{bff_bisim_pr, induced_lts, quotient, FiniteDialgebra};
use dialgebra::gen::{shrink_pair, TermGenerator, DEFAULT_SEED};
use dialgebra::lts::{reachable, strong_bisim, LtsGraph};
use dialgebra::mealy::{mealy_bisim, MealyMachine};
use dialgebra::oracle::{async_bisim_oracle, async_check_pair_trace, InputClause};
use dialgebra::{parse, Error, Limits, Partition, Process};
use rayon::prelude::*;

/// Largest term size accepted by `random`.
const MAX_RANDOM_SIZE: usize = 16;

const EXIT_OK: u8 = 0;
const EXIT_DISTINGUISHED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;

#[derive(Parser)]
#[command(name = "ccs", version, about = "Asynchronous CCS through dialgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Dot,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Semantics {
    Sync,
    Async,
    AsyncOracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Agreement,
    Inclusion,
    EquivalenceLaws,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MinimizeSemantics {
    Sync,
    Async,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and print its syntax tree.
    Parse {
        /// The term; omit when using --file.
        term: Option<String>,
        #[arg(long, conflicts_with = "term")]
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the labelled transition system reachable from a term.
    Lts {
        term: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the CCS dialgebra generated by a term.
    Dialgebra {
        term: String,
        /// Number of unused channels added to the send experiments.
        #[arg(long, default_value_t = 0)]
        fresh: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Decide whether two terms are equivalent.
    Check {
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = Semantics::Async)]
        semantics: Semantics,
        #[arg(long, default_value_t = 0)]
        fresh: usize,
        /// Also print the bisimulation or the distinguishing play.
        #[arg(long)]
        certificate: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Quotient a term's closure, or a dialgebra file, by bisimilarity.
    Minimize {
        /// The term; omit when using --from-json.
        term: Option<String>,
        /// A dialgebra in the JSON form written by `ccs dialgebra --format json`.
        #[arg(long, conflicts_with = "term")]
        from_json: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MinimizeSemantics::Async)]
        semantics: MinimizeSemantics,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a property over seeded random terms.
    Random {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        size: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Mode::Agreement)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare two states of a Mealy machine given as JSON.
    Mealy {
        file: PathBuf,
        s1: String,
        s2: String,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = Limits::from_env();
    let result = match cli.command {
        Command::Parse { term, file, format } => cmd_parse(term, file, format),
        Command::Lts { term, format } => cmd_lts(&term, format, limits),
        Command::Dialgebra { term, fresh, format } => cmd_dialgebra(&term, fresh, format, limits),
        Command::Check { left, right, semantics, fresh, certificate, format } => {
            cmd_check(&left, &right, semantics, fresh, certificate, format, limits)
        }
        Command::Minimize { term, from_json, semantics, format } => {
            cmd_minimize(term, from_json, semantics, format, limits)
        }
        Command::Random { seed, size, count, mode, format } => cmd_random(seed, size, count, mode, format, limits),
        Command::Mealy { file, s1, s2 } => cmd_mealy(&file, &s1, &s2),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::StateCap { .. } => EXIT_CAP,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn term(text: &str) -> Result<Process, Failure> {
    parse(text).map_err(|e| Failure::Lib(e.into()))
}

fn unsupported(cmd: &str, format: &str) -> Failure {
    Failure::Usage(format!("`{cmd}` has no {format} output"))
}

fn json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json prints"));
}

fn cmd_parse(inline: Option<String>, file: Option<PathBuf>, format: Format) -> Outcome {
    let text = match (inline, file) {
        (Some(t), _) => t,
        (None, Some(f)) => read(&f)?,
        (None, None) => return Err(Failure::Usage("give a term or --file".into())),
    };
    let p = term(&text)?;
    match format {
        Format::Text => println!("{p:?}"),
        Format::Json => json(&serde_json::json!({ "term": p.render(), "ast": format!("{p:?}"), "size": p.size() })),
        Format::Dot => return Err(unsupported("parse", "dot")),
    }
    Ok(EXIT_OK)
}

fn lts_text(g: &LtsGraph) -> String {
    let mut s = format!("{} states, {} transitions\n", g.states.len(), g.transitions.len());
    for (i, p) in g.states.iter().enumerate() {
        writeln!(s, "  {i}: {p}").unwrap();
    }
    for t in &g.transitions {
        writeln!(s, "  {} --{}--> {}", t.src, t.label, t.dst).unwrap();
    }
    s
}

fn print_lts(g: &LtsGraph, format: Format) {
    match format {
        Format::Text => print!("{}", lts_text(g)),
        Format::Dot => print!("{}", g.to_dot()),
        Format::Json => json(&g.to_json()),
    }
}

fn cmd_lts(text: &str, format: Format, limits: Limits) -> Outcome {
    let g = reachable(&term(text)?, limits)?;
    print_lts(&g, format);
    Ok(EXIT_OK)
}

fn dialgebra_text(d: &FiniteDialgebra) -> String {
    let lts = induced_lts(d);
    let mut s = format!("{} states, {} transitions\n", d.num_states(), d.transition_count());
    for (i, p) in d.payloads().iter().enumerate() {
        writeln!(s, "  {i}: {p}").unwrap();
    }
    let shapes = d.signature().shapes();
    for (x, l, y) in &lts.transitions {
        let shape = &shapes[l.shape];
        writeln!(s, "  {x} --{}({}) / {}--> {y}", shape.id, shape.params[l.param], d.obs_alphabet()[l.obs]).unwrap();
    }
    s
}

fn print_dialgebra(d: &FiniteDialgebra, format: Format) {
    match format {
        Format::Text => print!("{}", dialgebra_text(d)),
        Format::Dot => print!("{}", induced_lts(d).to_dot(d)),
        Format::Json => json(&d.to_json()),
    }
}

fn cmd_dialgebra(text: &str, fresh: usize, format: Format, limits: Limits) -> Outcome {
    let p = term(text)?;
    let chans = experiment_channels(&p, &p, fresh);
    let closure = build_ccs_dialgebra(&[p], &chans, limits)?;
    print_dialgebra(&closure.dialgebra, format);
    Ok(EXIT_OK)
}

/// The blocks of `partition` as lists of rendered terms.
fn named_blocks(names: &[Process], partition: &Partition) -> Vec<Vec<String>> {
    partition.blocks().iter().map(|b| b.iter().map(|&i| names[i].render()).collect()).collect()
}

fn cmd_check(
    left: &str,
    right: &str,
    semantics: Semantics,
    fresh: usize,
    certificate: bool,
    format: Format,
    limits: Limits,
) -> Outcome {
    let (p, q) = (term(left)?, term(right)?);
    if format == Format::Dot {
        return Err(unsupported("check", "dot"));
    }
    let (equivalent, evidence) = match semantics {
        Semantics::Sync => {
            let r = strong_bisim(&p, &q, limits)?;
            let blocks = named_blocks(&r.graph.states, &r.partition);
            (r.equivalent, serde_json::json!({ "partition": blocks }))
        }
        Semantics::Async => {
            let r = check_async_dialgebraic(&p, &q, fresh, limits)?;
            let blocks = named_blocks(&r.closure.processes, &r.partition);
            (r.equivalent, serde_json::json!({ "partition": blocks }))
        }
        Semantics::AsyncOracle => {
            let v = async_check_pair_trace(&p, &q, InputClause::ParallelTau, limits)?;
            (v.is_equivalent(), v.to_json())
        }
    };
    let verdict = if equivalent { "equivalent" } else { "distinguished" };
    match format {
        Format::Json => {
            let mut doc = serde_json::json!({ "verdict": verdict });
            if certificate {
                doc["certificate"] = evidence;
            }
            json(&doc);
        }
        _ => {
            println!("{verdict}");
            if certificate {
                print!("{}", evidence_text(&evidence));
            }
        }
    }
    Ok(if equivalent { EXIT_OK } else { EXIT_DISTINGUISHED })
}

fn evidence_text(v: &serde_json::Value) -> String {
    let mut s = String::new();
    let strings = |v: &serde_json::Value| -> Vec<String> {
        v.as_array()
            .into_iter()
            .flatten()
            .map(|x| x.as_str().unwrap_or_default().to_string())
            .collect()
    };
    if let Some(blocks) = v["partition"].as_array() {
        for (i, b) in blocks.iter().enumerate() {
            writeln!(s, "block {i}: {}", strings(b).join(", ")).unwrap();
        }
    }
    if let Some(pairs) = v["pairs"].as_array() {
        for pair in pairs {
            let xy = strings(pair);
            writeln!(s, "pair: {}  ~  {}", xy[0], xy[1]).unwrap();
        }
    }
    if let Some(trace) = v["trace"].as_array() {
        for (i, step) in trace.iter().enumerate() {
            let pair = strings(&step["pair"]);
            let answer = step["response"].as_str().unwrap_or("no answer");
            writeln!(
                s,
                "{i}: ({}, {}) {} moves {} [{} clause], answer: {answer}",
                pair[0],
                pair[1],
                step["side"].as_str().unwrap_or_default(),
                step["move"].as_str().unwrap_or_default(),
                step["clause"].as_str().unwrap_or_default(),
            )
            .unwrap();
        }
    }
    s
}

fn cmd_minimize(
    inline: Option<String>,
    from_json: Option<PathBuf>,
    semantics: MinimizeSemantics,
    format: Format,
    limits: Limits,
) -> Outcome {
    let report = |before: usize, after: usize| format!("{before} states minimized to {after}");
    if let Some(path) = from_json {
        let d = FiniteDialgebra::from_json(&read(&path)?)?;
        let q = quotient(&d, &bff_bisim_pr(&d))?.dialgebra;
        return finish_minimize(report(d.num_states(), q.num_states()), format, |f| print_dialgebra(&q, f));
    }
    let Some(text) = inline else {
        return Err(Failure::Usage("give a term or --from-json".into()));
    };
    let p = term(&text)?;
    match semantics {
        MinimizeSemantics::Sync => {
            let r = strong_bisim(&p, &p, limits)?;
            let q = r.graph.quotient(&r.partition);
            finish_minimize(report(r.graph.states.len(), q.states.len()), format, |f| print_lts(&q, f))
        }
        MinimizeSemantics::Async => {
            let chans = experiment_channels(&p, &p, 0);
            let closure = build_ccs_dialgebra(&[p], &chans, limits)?;
            let d = &closure.dialgebra;
            let q = quotient(d, &bff_bisim_pr(d))?.dialgebra;
            finish_minimize(report(d.num_states(), q.num_states()), format, |f| print_dialgebra(&q, f))
        }
    }
}

/// Text output leads with the size report; exports keep stdout clean and
/// report on stderr.
fn finish_minimize(report: String, format: Format, export: impl FnOnce(Format)) -> Outcome {
    if format == Format::Text {
        println!("{report}");
    } else {
        eprintln!("{report}");
    }
    export(format);
    Ok(EXIT_OK)
}

struct RunFailure {
    index: usize,
    left: Process,
    right: Process,
    detail: String,
}

fn cmd_random(seed: u64, size: usize, count: usize, mode: Mode, format: Format, limits: Limits) -> Outcome {
    if size == 0 || size > MAX_RANDOM_SIZE {
        return Err(Failure::Usage(format!("--size must be between 1 and {MAX_RANDOM_SIZE}")));
    }
    if format == Format::Dot {
        return Err(unsupported("random", "dot"));
    }
    let mut g = TermGenerator::new(seed);
    let pairs: Vec<(Process, Process)> = (0..count).map(|_| g.pair(size)).collect();

    // Returns a description of the violation, if any.
    let property = |p: &Process, q: &Process| -> Result<Option<String>, Error> {
        match mode {
            Mode::Agreement => {
                let d = check_async_dialgebraic(p, q, 0, limits)?.equivalent;
                let o = async_bisim_oracle(p, q, limits)?;
                Ok((d != o).then(|| format!("dialgebraic says {d}, oracle says {o}")))
            }
            Mode::Inclusion => {
                let s = strong_bisim(p, q, limits)?.equivalent;
                let a = check_async_dialgebraic(p, q, 0, limits)?.equivalent;
                Ok((s && !a).then(|| "strongly bisimilar but not asynchronously bisimilar".to_string()))
            }
            Mode::EquivalenceLaws => {
                // (p, q, q | 0): reflexivity, symmetry and transitivity
                let padded = Process::par(q.clone(), Process::Nil);
                let eq = |x: &Process, y: &Process| check_async_dialgebraic(x, y, 0, limits).map(|r| r.equivalent);
                if !eq(p, p)? {
                    return Ok(Some("not reflexive".into()));
                }
                let pq = eq(p, q)?;
                if pq != eq(q, p)? {
                    return Ok(Some("not symmetric".into()));
                }
                if pq && eq(q, &padded)? && !eq(p, &padded)? {
                    return Ok(Some("not transitive through q | 0".into()));
                }
                Ok(None)
            }
        }
    };

    let results: Vec<Result<Option<String>, Error>> = pairs.par_iter().map(|(p, q)| property(p, q)).collect();
    let mut failures = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        if let Some(detail) = r? {
            let (p, q) = &pairs[index];
            let (left, right) = shrink_pair(p.clone(), q.clone(), |x, y| matches!(property(x, y), Ok(Some(_))));
            failures.push(RunFailure { index, left, right, detail });
        }
    }

    let passed = count - failures.len();
    let mode_name = match mode {
        Mode::Agreement => "agreement",
        Mode::Inclusion => "inclusion",
        Mode::EquivalenceLaws => "equivalence-laws",
    };
    match format {
        Format::Json => json(&serde_json::json!({
            "mode": mode_name,
            "seed": seed,
            "size": size,
            "count": count,
            "passed": passed,
            "failures": failures
                .iter()
                .map(|f| serde_json::json!({
                    "index": f.index,
                    "left": f.left.render(),
                    "right": f.right.render(),
                    "detail": f.detail,
                }))
                .collect::<Vec<_>>(),
        })),
        _ => {
            for f in &failures {
                println!("pair {}: {}; shrunk counterexample: {}  vs  {}", f.index, f.detail, f.left, f.right);
            }
            println!("{mode_name}: {passed}/{count} pairs pass (seed {seed}, size {size})");
        }
    }
    Ok(if failures.is_empty() { EXIT_OK } else { EXIT_DISTINGUISHED })
}

fn cmd_mealy(file: &PathBuf, s1: &str, s2: &str) -> Outcome {
    let m = MealyMachine::from_json(&read(file)?)?;
    for s in [s1, s2] {
        if m.state_index(s).is_none() {
            return Err(Failure::Usage(format!("unknown state {s:?}")));
        }
    }
    let equivalent = mealy_bisim(&m, s1, s2)?;
    println!("{}", if equivalent { "equivalent" } else { "distinguished" });
    Ok(if equivalent { EXIT_OK } else { EXIT_DISTINGUISHED })
}
