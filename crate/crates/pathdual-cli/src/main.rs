//! Command-line front end for the library: homomorphism and constraint
//! satisfaction checks, linear Datalog runs, Krom SNP evaluation, the
//! pebble-relation game with obstruction output, path decomposition
//! search, bounded duality checks, the implicational and hitting-set
//! solvers, 2-CNF encoding, format conversion, and stock generators.
//!
//! Exit codes: 0 for a positive verdict (homomorphism found, accepted,
//! true, Duplicator wins, decomposition found, no counterexample,
//! satisfiable), 1 for the negative verdict, 2 for usage errors,
//! unreadable or malformed input, and failed cross-checks.
//!
//! Every run is deterministic given identical inputs. `--json` switches
//! the report to a single JSON document with `"schema": 1`. `--verify`
//! re-derives each verdict through an independent route and fails loudly
//! on disagreement. Witnesses are re-verified before they are emitted,
//! and emitted objects are checked to re-parse to an equal value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathdual::datalog::{
    accepts, derivation_witness, least_fixpoint, least_fixpoint_naive, LinearDatalogProgram,
};
use pathdual::game::{
    check_path_duality_bounded, decide_game, extract_obstruction, GameMove, SpoilerPlay, Winner,
};
use pathdual::generators::{
    b_2sat, directed_cycle, k_clique, odd_closed_walk_program, oriented_path, sym_cycle,
};
use pathdual::ihsb::{classify_ihsb, solve_ihsb, IHSBClass, IHSBClause, IHSBSign};
use pathdual::implicational::{implicational_obstruction, solve_implicational};
use pathdual::pathwidth::{
    check_path_decomposition, find_path_decomposition, minimal_widths, PathDecomposition,
};
use pathdual::sat_encoding::{encode_2sat, parse_dimacs};
use pathdual::snp::{datalog_to_snp, evaluate_snp, snp_to_datalog, KromSNPSentence};
use pathdual::text;
use pathdual::{
    all_homomorphisms, find_homomorphism, is_homomorphism, PartialMap, RelationalStructure,
    Vocabulary,
};

/// Workbench for finite relational structures: homomorphisms, the
/// pebble-relation game, path decompositions, linear Datalog, Krom SNP,
/// and the specialized polynomial solvers.
#[derive(Parser)]
#[command(name = "pathdual", version, about)]
struct Cli {
    /// Emit the run report as one JSON document.
    #[arg(long, global = true)]
    json: bool,

    /// Re-derive each verdict through an independent route and fail on
    /// disagreement.
    #[arg(long, global = true)]
    verify: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a homomorphism from one structure into another.
    Hom {
        /// Source structure file.
        #[arg(long)]
        a: PathBuf,
        /// Target structure file.
        #[arg(long)]
        b: PathBuf,
    },
    /// Decide a constraint satisfaction instance against a template.
    Csp {
        /// Instance structure file.
        #[arg(long)]
        instance: PathBuf,
        /// Template structure file.
        #[arg(long)]
        template: PathBuf,
    },
    /// Run a linear Datalog program on an input structure.
    Datalog {
        /// Program file.
        #[arg(long)]
        program: PathBuf,
        /// Input structure file.
        #[arg(long)]
        input: PathBuf,
        /// Evaluate by naive iteration instead of semi-naive.
        #[arg(long)]
        naive: bool,
        /// On acceptance, emit a derivation witness: a structure of width
        /// within the program bounds that maps into the input and is
        /// itself accepted.
        #[arg(long)]
        witness: bool,
    },
    /// Evaluate a Krom monotone SNP sentence on a structure.
    Snp {
        /// Sentence file.
        #[arg(long)]
        sentence: PathBuf,
        /// Input structure file.
        #[arg(long)]
        input: PathBuf,
    },
    /// Decide the pebble-relation game; a Spoiler win emits an
    /// obstruction of width within the played bounds.
    Game {
        /// Left structure file (Spoiler pebbles here).
        #[arg(long)]
        a: PathBuf,
        /// Right structure file (Duplicator answers here).
        #[arg(long)]
        b: PathBuf,
        /// Bound on pebbles carried across a blow move.
        #[arg(short)]
        j: usize,
        /// Bound on pebbles placed at once.
        #[arg(short)]
        k: usize,
    },
    /// Search for a path decomposition within a width budget.
    Pathwidth {
        /// Structure file.
        #[arg(long)]
        input: PathBuf,
        /// Bound on consecutive bag intersections.
        #[arg(short)]
        j: usize,
        /// Bound on bag size.
        #[arg(short)]
        k: usize,
        /// Also list the Pareto-minimal achievable widths.
        #[arg(long)]
        minimal: bool,
    },
    /// Enumerate small structures (one per isomorphism class) and report
    /// every one that refutes path duality of the template at the given
    /// width: Duplicator wins the game yet no homomorphism exists.
    Duality {
        /// Template structure file.
        #[arg(long)]
        b: PathBuf,
        /// Bound on pebbles carried across a blow move.
        #[arg(short)]
        j: usize,
        /// Bound on pebbles placed at once.
        #[arg(short)]
        k: usize,
        /// Largest universe size to enumerate.
        #[arg(long)]
        n_max: usize,
    },
    /// Solve an instance against an implicational template; unsatisfiable
    /// instances get a path-shaped obstruction.
    SolveImplicational {
        /// Instance structure file.
        #[arg(long)]
        instance: PathBuf,
        /// Template structure file (every relation must be binary and
        /// implicational).
        #[arg(long)]
        template: PathBuf,
    },
    /// Classify a Boolean template as a hitting-set template and solve an
    /// instance by closure.
    SolveIhsb {
        /// Instance structure file.
        #[arg(long)]
        instance: PathBuf,
        /// Template structure file over universe {0, 1}.
        #[arg(long)]
        template: PathBuf,
        /// Maximum clause width.
        #[arg(short)]
        k: usize,
        /// Which sign of wide clauses to allow.
        #[arg(long, value_enum)]
        sign: SignArg,
    },
    /// Encode a DIMACS 2-CNF file as a structure over the Boolean
    /// template; satisfying assignments become homomorphisms.
    #[command(name = "encode-2sat")]
    Encode2Sat {
        /// DIMACS file with exactly two literals per clause.
        #[arg(long)]
        cnf: PathBuf,
    },
    /// Convert one object format into another (exactly one direction).
    Convert(ConvertArgs),
    /// Generate a stock structure or program and print it.
    Gen {
        /// What to generate.
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of vertices (clique, cycle, dicycle, random).
        #[arg(long)]
        n: Option<usize>,
        /// Edge orientation pattern over {F, B} (path).
        #[arg(long)]
        pattern: Option<String>,
        /// Seed for the random generator (random).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge probability (random).
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
    },
}

#[derive(clap::Args)]
#[group(required = true, multiple = false)]
struct ConvertArgs {
    /// Translate a linear Datalog program into a Krom SNP sentence whose
    /// value is the negation of acceptance.
    #[arg(long, value_name = "FILE")]
    datalog_to_snp: Option<PathBuf>,

    /// Translate a Krom SNP sentence back into a linear Datalog program.
    #[arg(long, value_name = "FILE")]
    snp_to_datalog: Option<PathBuf>,

    /// Encode a DIMACS 2-CNF file as a structure over the Boolean
    /// template.
    #[arg(long, value_name = "FILE")]
    cnf_to_structure: Option<PathBuf>,

    /// Decode a structure over the Boolean template into a DIMACS 2-CNF
    /// file (variables are numbered in universe order).
    #[arg(long, value_name = "FILE")]
    structure_to_cnf: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for IHSBSign {
    fn from(s: SignArg) -> IHSBSign {
        match s {
            SignArg::Plus => IHSBSign::Plus,
            SignArg::Minus => IHSBSign::Minus,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    /// Complete loopless digraph on n vertices.
    Clique,
    /// Undirected cycle on n vertices.
    Cycle,
    /// Directed cycle on n vertices.
    Dicycle,
    /// Oriented path following an F/B pattern.
    Path,
    /// The Boolean 2-SAT template with relations P0, P1, P2.
    BoolTemplate,
    /// Random digraph with seeded edges.
    Random,
    /// Linear Datalog program accepting digraphs with an odd closed walk.
    OddWalkProgram,
}

/// Everything one invocation reports: the echoed command line, the
/// verdict with its exit code, labeled witness payloads, and the notes
/// from cross-checks. `bare` marks conversion output printed without the
/// report banner so it can be piped straight into a file.
struct Report {
    command: String,
    verdict: String,
    exit: u8,
    bare: bool,
    items: Vec<(String, String)>,
    checks: Vec<String>,
}

impl Report {
    fn new(verdict: impl Into<String>, exit: u8) -> Self {
        Report {
            command: String::new(),
            verdict: verdict.into(),
            exit,
            bare: false,
            items: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn emit(&self, json: bool, elapsed_ms: u128) {
        if json {
            let witnesses: Vec<serde_json::Value> = self
                .items
                .iter()
                .map(|(label, content)| serde_json::json!({ "label": label, "content": content }))
                .collect();
            let doc = serde_json::json!({
                "schema": 1,
                "command": self.command,
                "verdict": self.verdict,
                "exit": self.exit,
                "elapsed_ms": elapsed_ms as u64,
                "checks": self.checks,
                "witnesses": witnesses,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("report is serializable")
            );
        } else if self.bare {
            for check in &self.checks {
                eprintln!("check: {check}");
            }
            for (_, content) in &self.items {
                print!("{content}");
                if !content.ends_with('\n') {
                    println!();
                }
            }
        } else {
            println!("command: {}", self.command);
            println!("verdict: {}", self.verdict);
            for check in &self.checks {
                println!("check: {check}");
            }
            println!("elapsed-ms: {elapsed_ms}");
            for (label, content) in &self.items {
                println!("--- {label} ---");
                print!("{content}");
                if !content.ends_with('\n') {
                    println!();
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            report.emit(cli.json, start.elapsed().as_millis());
            ExitCode::from(report.exit)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<Report, String> {
    let verify = cli.verify;
    let mut report = match &cli.command {
        Command::Hom { a, b } => run_hom(a, b, "homomorphism", verify)?,
        Command::Csp { instance, template } => run_hom(instance, template, "assignment", verify)?,
        Command::Datalog {
            program,
            input,
            naive,
            witness,
        } => run_datalog(program, input, *naive, *witness, verify)?,
        Command::Snp { sentence, input } => run_snp(sentence, input, verify)?,
        Command::Game { a, b, j, k } => run_game(a, b, *j, *k, verify)?,
        Command::Pathwidth {
            input,
            j,
            k,
            minimal,
        } => run_pathwidth(input, *j, *k, *minimal, verify)?,
        Command::Duality { b, j, k, n_max } => run_duality(b, *j, *k, *n_max, verify)?,
        Command::SolveImplicational { instance, template } => {
            run_implicational(instance, template, verify)?
        }
        Command::SolveIhsb {
            instance,
            template,
            k,
            sign,
        } => run_ihsb(instance, template, *k, (*sign).into(), verify)?,
        Command::Encode2Sat { cnf } => run_encode(cnf, verify)?,
        Command::Convert(args) => run_convert(args, verify)?,
        Command::Gen {
            kind,
            n,
            pattern,
            seed,
            edge_prob,
        } => run_gen(*kind, *n, pattern.as_deref(), *seed, *edge_prob)?,
    };
    report.command = echoed_command();
    Ok(report)
}

fn echoed_command() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("pathdual {}", args.join(" "))
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn estr(e: pathdual::Error) -> String {
    e.to_string()
}

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn located(path: &Path, e: pathdual::Error) -> String {
    format!("{}: {e}", path.display())
}

fn load_structure(path: &Path) -> Result<RelationalStructure, String> {
    let (_, s) = text::parse_structure(&read_file(path)?).map_err(|e| located(path, e))?;
    Ok(s)
}

fn load_program(path: &Path) -> Result<(String, LinearDatalogProgram), String> {
    text::parse_program(&read_file(path)?).map_err(|e| located(path, e))
}

fn load_sentence(path: &Path) -> Result<(String, KromSNPSentence), String> {
    text::parse_sentence(&read_file(path)?).map_err(|e| located(path, e))
}

fn map_text(map: &PartialMap) -> String {
    let mut out = String::new();
    for (x, y) in map {
        let _ = writeln!(out, "{x} -> {y}");
    }
    out
}

fn play_text(play: &SpoilerPlay) -> String {
    let mut out = String::new();
    for m in &play.moves {
        let (kind, set) = match m {
            GameMove::Shrink(s) => ("shrink", s),
            GameMove::Blow(s) => ("blow", s),
        };
        let elems: Vec<&str> = set.iter().map(|e| e.as_str()).collect();
        let _ = writeln!(out, "{kind} ({})", elems.join(" "));
    }
    out
}

/// Formats a structure and checks the text re-parses to an equal value.
fn emit_structure(name: &str, s: &RelationalStructure) -> Result<String, String> {
    let out = text::format_structure(name, s);
    let (_, back) = text::parse_structure(&out).map_err(estr)?;
    if back != *s {
        return fail("emitted structure does not re-parse to an equal value");
    }
    Ok(out)
}

fn emit_decomposition(d: &PathDecomposition) -> Result<String, String> {
    let out = text::format_decomposition(d);
    let back = text::parse_decomposition(&out).map_err(estr)?;
    if back != *d {
        return fail("emitted decomposition does not re-parse to an equal value");
    }
    Ok(out)
}

/// Round trip compares rules, goal, and IDB; the text format infers the
/// input vocabulary from rule bodies, so never-mentioned input symbols do
/// not survive a round trip and are not compared.
fn emit_program(name: &str, p: &LinearDatalogProgram) -> Result<String, String> {
    let out = text::format_program(name, p);
    let (_, back) = text::parse_program(&out).map_err(estr)?;
    if back.rules() != p.rules() || back.goal() != p.goal() || back.idb() != p.idb() {
        return fail("emitted program does not re-parse to an equal value");
    }
    Ok(out)
}

fn emit_sentence(name: &str, f: &KromSNPSentence) -> Result<String, String> {
    let out = text::format_sentence(name, f);
    let (_, back) = text::parse_sentence(&out).map_err(estr)?;
    if back.clauses() != f.clauses() || back.so() != f.so() || back.fo_vars() != f.fo_vars() {
        return fail("emitted sentence does not re-parse to an equal value");
    }
    Ok(out)
}

fn run_hom(
    a_path: &Path,
    b_path: &Path,
    witness_label: &str,
    verify: bool,
) -> Result<Report, String> {
    let a = load_structure(a_path)?;
    let b = load_structure(b_path)?;
    let found = find_homomorphism(&a, &b, &PartialMap::new()).map_err(estr)?;
    let mut report = match &found {
        Some(h) => {
            if !is_homomorphism(&a, &b, h).map_err(estr)? {
                return fail("cross-check failed: emitted map is not a homomorphism");
            }
            let mut r = Report::new("homomorphism found", 0);
            r.checks.push("witness map re-verified".to_string());
            r.items.push((witness_label.to_string(), map_text(h)));
            r
        }
        None => Report::new("no homomorphism", 1),
    };
    if verify {
        let count = all_homomorphisms(&a, &b).map_err(estr)?.len();
        if (count > 0) != found.is_some() {
            return fail("cross-check failed: search and full enumeration disagree");
        }
        report
            .checks
            .push(format!("full enumeration agrees ({count} total)"));
    }
    Ok(report)
}

fn run_datalog(
    program_path: &Path,
    input_path: &Path,
    naive: bool,
    witness: bool,
    verify: bool,
) -> Result<Report, String> {
    let (_, p) = load_program(program_path)?;
    let a = load_structure(input_path)?;
    let accepted = if naive {
        let fix = least_fixpoint_naive(&p, &a).map_err(estr)?;
        !fix.relation(p.goal()).map_err(estr)?.is_empty()
    } else {
        accepts(&p, &a).map_err(estr)?
    };
    let mut report = if accepted {
        Report::new("accepted", 0)
    } else {
        Report::new("rejected", 1)
    };
    if verify {
        let semi = least_fixpoint(&p, &a).map_err(estr)?;
        let plain = least_fixpoint_naive(&p, &a).map_err(estr)?;
        if semi != plain {
            return fail("cross-check failed: semi-naive and naive fixpoints differ");
        }
        report
            .checks
            .push("semi-naive and naive fixpoints agree".to_string());
        let f = datalog_to_snp(&p);
        if evaluate_snp(&f, &a).map_err(estr)? != !accepted {
            return fail("cross-check failed: translated sentence disagrees with acceptance");
        }
        report
            .checks
            .push("translated sentence value is the negation of acceptance".to_string());
    }
    if accepted && witness {
        let Some((pw, d, h)) = derivation_witness(&p, &a).map_err(estr)? else {
            return fail("cross-check failed: accepted input yielded no derivation witness");
        };
        let width = check_path_decomposition(&pw, &d).map_err(estr)?;
        let (jb, kb) = p.bounds();
        if width.j > jb || width.k > kb {
            return fail("cross-check failed: witness width exceeds the program bounds");
        }
        if !is_homomorphism(&pw, &a, &h).map_err(estr)? {
            return fail("cross-check failed: witness does not map into the input");
        }
        if !accepts(&p, &pw).map_err(estr)? {
            return fail("cross-check failed: witness is not itself accepted");
        }
        report.checks.push(format!(
            "witness re-verified: width ({}, {}) within bounds ({jb}, {kb}), maps into the input, accepted",
            width.j, width.k
        ));
        report
            .items
            .push(("witness structure".to_string(), emit_structure("witness", &pw)?));
        report
            .items
            .push(("witness decomposition".to_string(), emit_decomposition(&d)?));
        report.items.push(("witness map".to_string(), map_text(&h)));
    }
    Ok(report)
}

fn run_snp(sentence_path: &Path, input_path: &Path, verify: bool) -> Result<Report, String> {
    let (_, f) = load_sentence(sentence_path)?;
    let a = load_structure(input_path)?;
    let value = evaluate_snp(&f, &a).map_err(estr)?;
    let mut report = if value {
        Report::new("true", 0)
    } else {
        Report::new("false", 1)
    };
    if verify {
        match snp_to_datalog(&f) {
            Ok(p) => {
                if accepts(&p, &a).map_err(estr)? != !value {
                    return fail("cross-check failed: translated program disagrees with the sentence");
                }
                report
                    .checks
                    .push("translated program acceptance is the negation of the value".to_string());
            }
            Err(e) => report
                .checks
                .push(format!("translation cross-check skipped: {e}")),
        }
    }
    Ok(report)
}

fn run_game(
    a_path: &Path,
    b_path: &Path,
    j: usize,
    k: usize,
    verify: bool,
) -> Result<Report, String> {
    let a = load_structure(a_path)?;
    let b = load_structure(b_path)?;
    let (winner, play) = decide_game(&a, &b, j, k).map_err(estr)?;
    let mut report = match winner {
        Winner::Duplicator => Report::new("duplicator", 0),
        Winner::Spoiler => {
            let Some(play) = play else {
                return fail("cross-check failed: Spoiler verdict without a play");
            };
            let (pw, d, h) = extract_obstruction(&a, &b, j, k, &play).map_err(estr)?;
            let width = check_path_decomposition(&pw, &d).map_err(estr)?;
            if width.j > j || width.k > k {
                return fail("cross-check failed: obstruction width exceeds the played bounds");
            }
            if !is_homomorphism(&pw, &a, &h).map_err(estr)? {
                return fail("cross-check failed: obstruction does not project into the left structure");
            }
            if find_homomorphism(&pw, &b, &PartialMap::new())
                .map_err(estr)?
                .is_some()
            {
                return fail("cross-check failed: obstruction maps into the right structure");
            }
            let mut r = Report::new("spoiler", 1);
            r.checks.push(format!(
                "obstruction re-verified: width ({}, {}) within ({j}, {k}), projects left, no map right",
                width.j, width.k
            ));
            r.items.push(("spoiler play".to_string(), play_text(&play)));
            r.items
                .push(("obstruction structure".to_string(), emit_structure("obstruction", &pw)?));
            r.items
                .push(("obstruction decomposition".to_string(), emit_decomposition(&d)?));
            r.items.push(("projection".to_string(), map_text(&h)));
            r
        }
    };
    if verify {
        let hom = find_homomorphism(&a, &b, &PartialMap::new()).map_err(estr)?;
        match (hom.is_some(), winner) {
            (true, Winner::Spoiler) => {
                return fail("cross-check failed: a homomorphism exists yet Spoiler wins");
            }
            (true, Winner::Duplicator) => report
                .checks
                .push("homomorphism exists, so the Duplicator win is forced".to_string()),
            (false, Winner::Spoiler) => report
                .checks
                .push("no homomorphism exists, consistent with the Spoiler win".to_string()),
            (false, Winner::Duplicator) => report.checks.push(
                "no homomorphism exists although Duplicator wins; this width cannot separate the pair"
                    .to_string(),
            ),
        }
    }
    Ok(report)
}

fn run_pathwidth(
    input_path: &Path,
    j: usize,
    k: usize,
    minimal: bool,
    verify: bool,
) -> Result<Report, String> {
    let s = load_structure(input_path)?;
    let found = find_path_decomposition(&s, j, k);
    let mut report = match &found {
        Some(d) => {
            let width = check_path_decomposition(&s, d).map_err(estr)?;
            if width.j > j || width.k > k {
                return fail("cross-check failed: decomposition width exceeds the budget");
            }
            let mut r = Report::new(format!("decomposition of width ({}, {})", width.j, width.k), 0);
            r.checks
                .push("decomposition re-verified against the structure".to_string());
            r.items
                .push(("decomposition".to_string(), emit_decomposition(d)?));
            r
        }
        None => Report::new("no decomposition", 1),
    };
    if verify {
        let frontier = minimal_widths(&s, k);
        let feasible = frontier.iter().any(|w| w.j <= j && w.k <= k);
        if feasible != found.is_some() {
            return fail("cross-check failed: the minimal-width frontier disagrees with the search");
        }
        report
            .checks
            .push("minimal-width frontier agrees with the search".to_string());
    }
    if minimal {
        let frontier = minimal_widths(&s, s.size());
        let mut out = String::new();
        for w in &frontier {
            let _ = writeln!(out, "({}, {})", w.j, w.k);
        }
        report.items.push(("minimal widths".to_string(), out));
    }
    Ok(report)
}

fn run_duality(
    b_path: &Path,
    j: usize,
    k: usize,
    n_max: usize,
    verify: bool,
) -> Result<Report, String> {
    let b = load_structure(b_path)?;
    let counterexamples = check_path_duality_bounded(&b, j, k, n_max).map_err(estr)?;
    let mut report = if counterexamples.is_empty() {
        Report::new(format!("no counterexample up to {n_max} elements"), 0)
    } else {
        Report::new(format!("{} counterexamples", counterexamples.len()), 1)
    };
    for (i, c) in counterexamples.iter().enumerate() {
        if find_homomorphism(c, &b, &PartialMap::new())
            .map_err(estr)?
            .is_some()
        {
            return fail("cross-check failed: counterexample maps into the template");
        }
        if verify && decide_game(c, &b, j, k).map_err(estr)?.0 != Winner::Duplicator {
            return fail("cross-check failed: counterexample is not a Duplicator win");
        }
        let name = format!("counterexample{}", i + 1);
        report
            .items
            .push((format!("counterexample {}", i + 1), emit_structure(&name, c)?));
    }
    if !counterexamples.is_empty() {
        report.checks.push(if verify {
            "counterexamples re-verified: no homomorphism, Duplicator wins".to_string()
        } else {
            "counterexamples re-verified: no homomorphism into the template".to_string()
        });
    }
    Ok(report)
}

fn run_implicational(
    instance_path: &Path,
    template_path: &Path,
    verify: bool,
) -> Result<Report, String> {
    let a = load_structure(instance_path)?;
    let b = load_structure(template_path)?;
    let (sat, hom) = solve_implicational(&a, &b).map_err(estr)?;
    let mut report = if sat {
        let Some(h) = hom else {
            return fail("cross-check failed: satisfiable verdict without an assignment");
        };
        if !is_homomorphism(&a, &b, &h).map_err(estr)? {
            return fail("cross-check failed: emitted assignment is not a homomorphism");
        }
        let mut r = Report::new("satisfiable", 0);
        r.checks.push("assignment re-verified".to_string());
        r.items.push(("assignment".to_string(), map_text(&h)));
        r
    } else {
        let (pw, d, h) = implicational_obstruction(&a, &b).map_err(estr)?;
        let width = check_path_decomposition(&pw, &d).map_err(estr)?;
        if !is_homomorphism(&pw, &a, &h).map_err(estr)? {
            return fail("cross-check failed: obstruction does not map into the instance");
        }
        if find_homomorphism(&pw, &b, &PartialMap::new())
            .map_err(estr)?
            .is_some()
        {
            return fail("cross-check failed: obstruction maps into the template");
        }
        let mut r = Report::new("unsatisfiable", 1);
        r.checks.push(format!(
            "obstruction re-verified: width ({}, {}), maps into the instance, no map into the template",
            width.j, width.k
        ));
        r.items
            .push(("obstruction structure".to_string(), emit_structure("obstruction", &pw)?));
        r.items
            .push(("obstruction decomposition".to_string(), emit_decomposition(&d)?));
        r.items.push(("projection".to_string(), map_text(&h)));
        r
    };
    if verify {
        let brute = find_homomorphism(&a, &b, &PartialMap::new())
            .map_err(estr)?
            .is_some();
        if brute != sat {
            return fail("cross-check failed: backtracking search disagrees with the conflict graph");
        }
        report
            .checks
            .push("backtracking search agrees with the conflict graph".to_string());
    }
    Ok(report)
}

fn clauses_text(class: &IHSBClass) -> String {
    let mut out = String::new();
    for (rel, clauses) in class.clauses() {
        for c in clauses {
            let body = match (class.sign(), c) {
                (IHSBSign::Plus, IHSBClause::Unit(i)) => format!("!x{i}"),
                (IHSBSign::Minus, IHSBClause::Unit(i)) => format!("x{i}"),
                (_, IHSBClause::Implication(i, j)) => format!("!x{i} | x{j}"),
                (IHSBSign::Plus, IHSBClause::Wide(sup)) => sup
                    .iter()
                    .map(|i| format!("x{i}"))
                    .collect::<Vec<_>>()
                    .join(" | "),
                (IHSBSign::Minus, IHSBClause::Wide(sup)) => sup
                    .iter()
                    .map(|i| format!("!x{i}"))
                    .collect::<Vec<_>>()
                    .join(" | "),
            };
            let _ = writeln!(out, "{rel}: {body}");
        }
    }
    out
}

fn run_ihsb(
    instance_path: &Path,
    template_path: &Path,
    k: usize,
    sign: IHSBSign,
    verify: bool,
) -> Result<Report, String> {
    let a = load_structure(instance_path)?;
    let b = load_structure(template_path)?;
    let Some(class) = classify_ihsb(&b, k, sign).map_err(estr)? else {
        return fail(format!(
            "template is not definable by width-{k} hitting-set clauses under the requested sign"
        ));
    };
    let sat = solve_ihsb(&a, &class).map_err(estr)?;
    let mut report = if sat {
        Report::new("satisfiable", 0)
    } else {
        Report::new("unsatisfiable", 1)
    };
    report
        .items
        .push(("template clauses".to_string(), clauses_text(&class)));
    if verify {
        let hom = find_homomorphism(&a, &b, &PartialMap::new()).map_err(estr)?;
        if hom.is_some() != sat {
            return fail("cross-check failed: backtracking search disagrees with the closure solver");
        }
        report
            .checks
            .push("backtracking search agrees with the closure solver".to_string());
        if let Some(h) = hom {
            if !is_homomorphism(&a, &b, &h).map_err(estr)? {
                return fail("cross-check failed: emitted assignment is not a homomorphism");
            }
            report.items.push(("assignment".to_string(), map_text(&h)));
        }
    }
    Ok(report)
}

fn encode_cnf_file(path: &Path, verify: bool) -> Result<(String, Vec<String>), String> {
    let source = read_file(path)?;
    let cnf = parse_dimacs(&source).map_err(|e| located(path, e))?;
    let s = encode_2sat(&cnf).map_err(estr)?;
    let out = emit_structure("encoded", &s)?;
    let mut checks = Vec::new();
    if verify {
        if cnf.num_vars >= 24 {
            checks.push("equisatisfiability cross-check skipped: too many variables".to_string());
        } else {
            let truth = cnf.brute_force_satisfiable();
            let hom = find_homomorphism(&s, &b_2sat(), &PartialMap::new())
                .map_err(estr)?
                .is_some();
            if truth != hom {
                return fail("cross-check failed: encoding is not equisatisfiable with the formula");
            }
            checks.push("truth-table satisfiability matches homomorphism existence".to_string());
        }
    }
    Ok((out, checks))
}

fn run_encode(cnf_path: &Path, verify: bool) -> Result<Report, String> {
    let (out, checks) = encode_cnf_file(cnf_path, verify)?;
    let mut report = Report::new("encoded", 0);
    report.bare = true;
    report.checks = checks;
    report.items.push(("structure".to_string(), out));
    Ok(report)
}

/// Renames the universe of `s` to "1".."n" in universe order.
fn renumber(s: &RelationalStructure) -> Result<RelationalStructure, String> {
    let name = |e: &str| (s.elem_index(e).expect("element is in the universe") + 1).to_string();
    let universe: Vec<String> = (1..=s.size()).map(|i| i.to_string()).collect();
    let mut out = RelationalStructure::new(s.vocab().clone(), universe).map_err(estr)?;
    for (sym, t) in s.tuples() {
        let mapped: Vec<String> = t.iter().map(|e| name(e)).collect();
        out.add_tuple(sym, mapped).map_err(estr)?;
    }
    Ok(out)
}

fn structure_to_cnf_text(s: &RelationalStructure, verify: bool) -> Result<(String, Vec<String>), String> {
    let template = b_2sat();
    if s.vocab() != template.vocab() {
        return fail("structure is not over the Boolean template vocabulary (P0/2, P1/2, P2/2)");
    }
    let mut out = String::new();
    for (i, e) in s.universe().iter().enumerate() {
        let _ = writeln!(out, "c var {} = {}", i + 1, e);
    }
    let _ = writeln!(out, "p cnf {} {}", s.size(), s.total_tuple_count());
    let var = |e: &str| (s.elem_index(e).expect("element is in the universe") + 1) as i64;
    for (sym, first_pos, second_pos) in
        [("P0", true, true), ("P1", true, false), ("P2", false, false)]
    {
        for t in s.relation(sym).map_err(estr)? {
            let x = var(&t[0]);
            let y = var(&t[1]);
            let _ = writeln!(
                out,
                "{} {} 0",
                if first_pos { x } else { -x },
                if second_pos { y } else { -y }
            );
        }
    }
    let mut checks = Vec::new();
    if verify {
        let back = encode_2sat(&parse_dimacs(&out).map_err(estr)?).map_err(estr)?;
        if back != renumber(s)? {
            return fail("cross-check failed: decoded formula does not re-encode to the structure");
        }
        checks.push("decoded formula re-encodes to the renumbered structure".to_string());
    }
    Ok((out, checks))
}

fn run_convert(args: &ConvertArgs, verify: bool) -> Result<Report, String> {
    let mut report = Report::new("converted", 0);
    report.bare = true;
    if let Some(path) = &args.datalog_to_snp {
        let (name, p) = load_program(path)?;
        let f = datalog_to_snp(&p);
        report
            .items
            .push(("sentence".to_string(), emit_sentence(&name, &f)?));
        if verify {
            let back = snp_to_datalog(&f).map_err(estr)?;
            if back.rules() != p.rules() {
                report
                    .checks
                    .push("translated sentence does not round-trip rule-for-rule".to_string());
            } else {
                report
                    .checks
                    .push("sentence translates back to the same rules".to_string());
            }
        }
    } else if let Some(path) = &args.snp_to_datalog {
        let (name, f) = load_sentence(path)?;
        let p = snp_to_datalog(&f).map_err(|e| located(path, e))?;
        report
            .items
            .push(("program".to_string(), emit_program(&name, &p)?));
        if verify {
            let back = datalog_to_snp(&p);
            if back.clauses() == f.clauses() {
                report
                    .checks
                    .push("program translates back to the same clauses".to_string());
            } else {
                report
                    .checks
                    .push("program round trip normalizes the clause list".to_string());
            }
        }
    } else if let Some(path) = &args.cnf_to_structure {
        let (out, checks) = encode_cnf_file(path, verify)?;
        report.checks = checks;
        report.items.push(("structure".to_string(), out));
    } else if let Some(path) = &args.structure_to_cnf {
        let s = load_structure(path)?;
        let (out, checks) = structure_to_cnf_text(&s, verify)?;
        report.checks = checks;
        report.items.push(("formula".to_string(), out));
    } else {
        return fail("convert requires exactly one direction flag");
    }
    Ok(report)
}

fn run_gen(
    kind: GenKind,
    n: Option<usize>,
    pattern: Option<&str>,
    seed: u64,
    edge_prob: f64,
) -> Result<Report, String> {
    let need_n = || n.ok_or_else(|| "this kind requires --n".to_string());
    let (label, out) = match kind {
        GenKind::Clique => {
            let n = need_n()?;
            if n == 0 {
                return fail("--n must be at least 1");
            }
            ("structure", emit_structure(&format!("k{n}"), &k_clique(n))?)
        }
        GenKind::Cycle => {
            let n = need_n()?;
            if n == 0 {
                return fail("--n must be at least 1");
            }
            ("structure", emit_structure(&format!("c{n}"), &sym_cycle(n))?)
        }
        GenKind::Dicycle => {
            let n = need_n()?;
            if n == 0 {
                return fail("--n must be at least 1");
            }
            (
                "structure",
                emit_structure(&format!("dc{n}"), &directed_cycle(n))?,
            )
        }
        GenKind::Path => {
            let pattern = pattern.ok_or("kind `path` requires --pattern")?;
            if !pattern.chars().all(|c| c == 'F' || c == 'B') {
                return fail("--pattern must use only the characters F and B");
            }
            ("structure", emit_structure("path", &oriented_path(pattern))?)
        }
        GenKind::BoolTemplate => ("structure", emit_structure("b2sat", &b_2sat())?),
        GenKind::Random => {
            let n = need_n()?;
            if !(0.0..=1.0).contains(&edge_prob) {
                return fail("--edge-prob must lie in [0, 1]");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let universe: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let mut s = RelationalStructure::new(Vocabulary::binary(), universe).map_err(estr)?;
            for i in 0..n {
                for j in 0..n {
                    if rng.gen_bool(edge_prob) {
                        s.add_tuple("E", vec![i.to_string(), j.to_string()])
                            .map_err(estr)?;
                    }
                }
            }
            ("structure", emit_structure(&format!("random{n}"), &s)?)
        }
        GenKind::OddWalkProgram => (
            "program",
            emit_program("odd_closed_walk", &odd_closed_walk_program())?,
        ),
    };
    let mut report = Report::new("generated", 0);
    report.bare = true;
    report.items.push((label.to_string(), out));
    Ok(report)
}
