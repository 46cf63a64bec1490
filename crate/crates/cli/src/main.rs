//! Command-line driver: generate test matrices, search for
//! almost-monochromatic rectangles, build protocol trees and compute
//! discrepancy bounds, all with reproducible seeds.
//!
//! Exit codes: 0 success, 1 usage error, 2 domain error (guards, hypothesis
//! violations, malformed input files), 3 I/O error.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use lowrank_rect::discrepancy::{
    brute_force_rectangle_discrepancy, discrepancy_witness, game_discrepancy,
};
use lowrank_rect::factorize::{format_factorization, rank_factorization};
use lowrank_rect::generators::{equality_matrix, kotlov_lovasz, rectangle_partition_random};
use lowrank_rect::john::john_rescale;
use lowrank_rect::matrix::{
    format_sign_matrix, parse_measure, parse_sign_matrix, rank, SignMatrix,
};
use lowrank_rect::protocol::{build_protocol, protocol_stats, serialize_tree, ProtocolConfig};
use lowrank_rect::rounding::{
    find_almost_monochromatic, fmt_sig12, run_report, FindError, RoundingConfig, RoundingVariant,
};
use lowrank_rect::{EntryMeasure64, Factorization64};

const USAGE: &str = "usage: lowrank-rect <command> [options]

commands:
  gen kl --r R [--out FILE] [--fact-out FILE]
  gen eq --n N [--out FILE]
  gen rectpart --n N --m M --k K --seed S [--out FILE]
  rect MATRIX [--delta D] [--variant multi|cap] [--attempts N] [--seed S]
              [--c7 X] [--cap-constant X] [--measure FILE] [--threads N]
              [--print-rectangle]
  protocol MATRIX [--seed S] [--attempts N] [--variant multi|cap]
                  [--threads N] [--out FILE]
  disc MATRIX --mode witness|brute|game [--trials N] [--iterations N]
              [--seed S] [--measure FILE] [--threads N]

Matrices are read in the text format: a \"rows cols\" header line followed by
rows lines of '+'/'-' characters. --threads defaults to the
LOWRANK_RECT_THREADS environment variable, then to available parallelism.";

enum CliError {
    Usage(String),
    Domain(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Domain(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

impl From<lowrank_rect::Error> for CliError {
    fn from(e: lowrank_rect::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("{USAGE}");
            }
            e.code()
        }
    }
}

/// Minimal flag parser: positionals stay in order, `--name value` pairs and
/// bare `--switch` flags are collected by name.
struct Flags {
    positional: Vec<String>,
    values: Vec<(String, String)>,
    switches: Vec<String>,
}

const SWITCH_NAMES: &[&str] = &["print-rectangle"];

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, CliError> {
        let mut flags = Flags { positional: Vec::new(), values: Vec::new(), switches: Vec::new() };
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            if let Some(name) = arg.strip_prefix("--") {
                if SWITCH_NAMES.contains(&name) {
                    flags.switches.push(name.to_string());
                } else {
                    let value = it.next().ok_or_else(|| {
                        CliError::Usage(format!("flag --{name} expects a value"))
                    })?;
                    flags.values.push((name.to_string(), value.clone()));
                }
            } else {
                flags.positional.push(arg.clone());
            }
        }
        Ok(flags)
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    fn get_parsed<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("invalid value for --{name}: {v:?}"))),
        }
    }

    fn require_parsed<T: std::str::FromStr>(&self, name: &str) -> Result<T, CliError> {
        self.get_parsed(name)?
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{name}")))
    }

    fn has_switch(&self, name: &str) -> bool {
        self.switches.iter().any(|s| s == name)
    }

    fn check_known(&self, known: &[&str]) -> Result<(), CliError> {
        for (name, _) in &self.values {
            if !known.contains(&name.as_str()) {
                return Err(CliError::Usage(format!("unknown flag --{name}")));
            }
        }
        for name in &self.switches {
            if !known.contains(&name.as_str()) {
                return Err(CliError::Usage(format!("unknown flag --{name}")));
            }
        }
        Ok(())
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let Some(command) = args.first() else {
        return Err(CliError::Usage("no command given".into()));
    };
    let rest = &args[1..];
    match command.as_str() {
        "gen" => cmd_gen(rest),
        "rect" => cmd_rect(rest),
        "protocol" => cmd_protocol(rest),
        "disc" => cmd_disc(rest),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

fn threads_from(flags: &Flags) -> Result<usize, CliError> {
    if let Some(t) = flags.get_parsed::<usize>("threads")? {
        return Ok(t);
    }
    if let Ok(env) = std::env::var("LOWRANK_RECT_THREADS") {
        return env
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid LOWRANK_RECT_THREADS: {env:?}")));
    }
    Ok(0) // the library resolves 0 to available parallelism
}

fn variant_from(flags: &Flags) -> Result<RoundingVariant, CliError> {
    match flags.get("variant") {
        None | Some("multi") => Ok(RoundingVariant::MultiHyperplane),
        Some("cap") => Ok(RoundingVariant::SingleCap),
        Some(other) => Err(CliError::Usage(format!(
            "invalid --variant {other:?} (expected multi or cap)"
        ))),
    }
}

fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {path}: {e}")))
}

fn load_matrix(path: &str) -> Result<SignMatrix, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("reading {path}: {e}")))?;
    parse_sign_matrix(&text).map_err(|e| CliError::Domain(format!("{path}: {e}")))
}

fn load_measure(flags: &Flags, m: &SignMatrix) -> Result<EntryMeasure64, CliError> {
    match flags.get("measure") {
        None => Ok(EntryMeasure64::uniform(m.n_rows(), m.n_cols())),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("reading {path}: {e}")))?;
            let mu = parse_measure::<f64>(&text)
                .map_err(|e| CliError::Domain(format!("{path}: {e}")))?;
            if mu.n_rows() != m.n_rows() || mu.n_cols() != m.n_cols() {
                return Err(CliError::Domain(format!(
                    "measure is {}x{} but the matrix is {}x{}",
                    mu.n_rows(),
                    mu.n_cols(),
                    m.n_rows(),
                    m.n_cols()
                )));
            }
            Ok(mu)
        }
    }
}

fn certified_pipeline(m: &SignMatrix) -> Result<Factorization64, CliError> {
    let f = rank_factorization::<f64>(m, 1e-9);
    john_rescale(&f, lowrank_rect::john::DEFAULT_EPS).map_err(CliError::from)
}

fn cmd_gen(args: &[String]) -> Result<(), CliError> {
    let Some(kind) = args.first() else {
        return Err(CliError::Usage("gen needs a generator: kl, eq or rectpart".into()));
    };
    let flags = Flags::parse(&args[1..])?;
    match kind.as_str() {
        "kl" => {
            flags.check_known(&["r", "out", "fact-out"])?;
            let r: usize = flags.require_parsed("r")?;
            if r == 0 {
                return Err(CliError::Usage("--r must be at least 1".into()));
            }
            let (m, f, _) = kotlov_lovasz::<f64>(r)?;
            emit_matrix(&flags, &m)?;
            if let Some(path) = flags.get("fact-out") {
                write_file(path, &format_factorization(&f))?;
            }
            Ok(())
        }
        "eq" => {
            flags.check_known(&["n", "out"])?;
            let n: usize = flags.require_parsed("n")?;
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            emit_matrix(&flags, &equality_matrix(n))
        }
        "rectpart" => {
            flags.check_known(&["n", "m", "k", "seed", "out"])?;
            let n: usize = flags.require_parsed("n")?;
            let m: usize = flags.require_parsed("m")?;
            let k: usize = flags.require_parsed("k")?;
            let seed: u64 = flags.get_parsed("seed")?.unwrap_or(0);
            if n == 0 || m == 0 || k == 0 {
                return Err(CliError::Usage("--n, --m and --k must be at least 1".into()));
            }
            emit_matrix(&flags, &rectangle_partition_random(n, m, k, seed))
        }
        other => Err(CliError::Usage(format!("unknown generator {other:?}"))),
    }
}

fn emit_matrix(flags: &Flags, m: &SignMatrix) -> Result<(), CliError> {
    let text = format_sign_matrix(m);
    match flags.get("out") {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_rect(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args)?;
    flags.check_known(&[
        "delta",
        "variant",
        "attempts",
        "seed",
        "c7",
        "cap-constant",
        "measure",
        "threads",
        "print-rectangle",
    ])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("rect expects exactly one matrix path".into()));
    };
    let m = load_matrix(path)?;
    let mu = load_measure(&flags, &m)?;
    let r = rank::<f64>(&m);
    let delta: f64 = flags
        .get_parsed("delta")?
        .unwrap_or(1.0 / (8.0 * r.max(1) as f64));
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::Usage(format!("--delta must lie in (0,1), got {delta}")));
    }
    let f = certified_pipeline(&m)?;
    let mut config = RoundingConfig::new(delta, flags.get_parsed("seed")?.unwrap_or(0));
    config.variant = variant_from(&flags)?;
    config.max_attempts = flags.get_parsed("attempts")?.unwrap_or(10_000);
    if let Some(c7) = flags.get_parsed("c7")? {
        config.constant_c7 = c7;
    }
    if let Some(cap) = flags.get_parsed("cap-constant")? {
        config.cap_constant = cap;
    }
    config.threads = threads_from(&flags)?;
    let outcome = match find_almost_monochromatic(&m, &f, &mu, &config) {
        Ok(outcome) => outcome,
        Err(FindError::Domain(e)) => return Err(e.into()),
        Err(FindError::NoQualifyingRectangle(e)) => {
            return Err(CliError::Domain(e.to_string()));
        }
    };
    print!("{}", run_report(&config, f.dim(), &outcome));
    if flags.has_switch("print-rectangle") {
        println!("rows={}", join_indices(outcome.rectangle.rows()));
        println!("cols={}", join_indices(outcome.rectangle.cols()));
    }
    Ok(())
}

fn join_indices(indices: &[usize]) -> String {
    let mut out = String::new();
    for (i, idx) in indices.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{idx}");
    }
    out
}

fn cmd_protocol(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args)?;
    flags.check_known(&["seed", "attempts", "variant", "threads", "out"])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("protocol expects exactly one matrix path".into()));
    };
    let m = load_matrix(path)?;
    let mut config = ProtocolConfig::<f64>::default();
    config.master_seed = flags.get_parsed("seed")?.unwrap_or(0);
    if let Some(attempts) = flags.get_parsed("attempts")? {
        config.max_attempts = attempts;
    }
    config.variant = variant_from(&flags)?;
    config.threads = threads_from(&flags)?;
    let tree = build_protocol(&m, &config);
    let out_path = flags.get("out").unwrap_or("tree.txt");
    write_file(out_path, &serialize_tree(&tree))?;
    let stats = protocol_stats(&tree);
    let r = rank::<f64>(&m);
    let log2_rank = (r.max(1) as f64).log2();
    println!("leaves={}", stats.leaves);
    println!("worst_case_cost={}", stats.worst_case_cost);
    println!("depth={}", stats.depth);
    println!("rank={r}");
    println!("log2_rank={}", fmt_sig12(log2_rank));
    println!(
        "cost_lower_bound_ok={}",
        f64::from(stats.worst_case_cost) >= log2_rank - 1e-9
    );
    println!("tree_file={out_path}");
    Ok(())
}

fn cmd_disc(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args)?;
    flags.check_known(&["mode", "trials", "iterations", "seed", "measure", "threads"])?;
    let [path] = flags.positional.as_slice() else {
        return Err(CliError::Usage("disc expects exactly one matrix path".into()));
    };
    let mode = flags
        .get("mode")
        .ok_or_else(|| CliError::Usage("disc needs --mode witness|brute|game".into()))?;
    let m = load_matrix(path)?;
    let r = rank::<f64>(&m);
    let sqrt_r = (r.max(1) as f64).sqrt();
    match mode {
        "witness" => {
            let mu = load_measure(&flags, &m)?;
            let trials: usize = flags.get_parsed("trials")?.unwrap_or(100_000);
            let seed: u64 = flags.get_parsed("seed")?.unwrap_or(0);
            let threads = threads_from(&flags)?;
            let f = certified_pipeline(&m)?;
            let rep = discrepancy_witness(&m, &f, &mu, trials, seed, threads)?;
            println!("mode=witness");
            println!("value={}", fmt_sig12(rep.best_value));
            println!("mean={}", fmt_sig12(rep.mean_value));
            println!("bound={}", fmt_sig12(1.0 / (14.0 * sqrt_r)));
            println!("rank={r}");
            println!("trials={trials}");
            println!("seed={seed}");
        }
        "brute" => {
            let mu = load_measure(&flags, &m)?;
            let value = brute_force_rectangle_discrepancy(&m, &mu)?;
            println!("mode=brute");
            println!("value={}", fmt_sig12(value));
            println!("bound={}", fmt_sig12(1.0 / (8.0 * sqrt_r)));
            println!("rank={r}");
        }
        "game" => {
            let iterations: usize = flags.get_parsed("iterations")?.unwrap_or(10_000);
            let (value, _) = game_discrepancy::<f64>(&m, iterations)?;
            println!("mode=game");
            println!("value={}", fmt_sig12(value));
            println!("bound={}", fmt_sig12(1.0 / (8.0 * sqrt_r)));
            println!("rank={r}");
            println!("iterations={iterations}");
        }
        other => {
            return Err(CliError::Usage(format!(
                "invalid --mode {other:?} (expected witness, brute or game)"
            )))
        }
    }
    Ok(())
}
