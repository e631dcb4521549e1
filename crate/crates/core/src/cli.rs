//! Command-line front end. Every subcommand prints one JSON document.
//!
//! Exit codes: 0 success, 2 parse error, 3 resource cap or inconclusive
//! search, 4 precondition failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::characterizations::{check_enum_bounded, check_partition_escape, check_rare_at_horizon};
use crate::constructions::{
    build_g_h, defeat_one_g2, extract_dominating_function, refute_two_g1_with, steal_two_g2,
    ClaimConfig,
};
use crate::error::{GameError, Result};
use crate::filters::FilterHandle;
use crate::model::{GameKind, IntervalPartition, Move};
use crate::referee::{judge, judge_g1, play, JudgeConfig, Thresholds};
use crate::strategies::{stock_strategy, IntFn, Strategy};

#[derive(Parser, Debug)]
#[command(
    name = "filter-games",
    version,
    about = "Play filter games on the naturals and run strategy constructions",
    args_override_self = true
)]
struct Cli {
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Evaluate bound_over by exhaustive search only.
    #[arg(long, global = true)]
    no_fast_path: bool,
    /// Seed for randomized adversaries. The constructions are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Read key=value lines mirroring the flags; `command=` names the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play a game to a horizon and judge it.
    Play(PlayArgs),
    /// Refute a strategy for TWO in G1.
    RefuteTwo(RefuteArgs),
    /// Steal a strategy for TWO in G2.
    Steal(StealArgs),
    /// Extract a dominating function from a G1 strategy for ONE.
    ExtractG(UptoArgs),
    /// Growth tables g and h of a G2 strategy for ONE.
    BuildGh(UptoArgs),
    /// Counterplay for TWO against a G2 strategy for ONE over a rare filter.
    DefeatOne(DefeatArgs),
    /// Finite-window filter checks.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Run several config files, concurrently.
    Batch(BatchArgs),
}

#[derive(Args, Debug)]
struct PlayArgs {
    #[arg(long)]
    game: String,
    #[arg(long, default_value = "frechet")]
    filter: String,
    #[arg(long)]
    one: String,
    #[arg(long)]
    two: String,
    #[arg(long)]
    horizon: u64,
    /// Minimum beat count in G1 (default ⌊N/2⌋).
    #[arg(long)]
    beat_min: Option<u64>,
    /// Maximum domination index in G2 (default ⌈N/2⌉).
    #[arg(long)]
    domination_max: Option<u64>,
}

#[derive(Args, Debug)]
struct RefuteArgs {
    #[arg(long)]
    two: String,
    #[arg(long, default_value_t = 1000)]
    budget: u64,
    #[arg(long)]
    horizon: u64,
    #[arg(long, default_value_t = 2)]
    max_tau_len: usize,
    #[arg(long, default_value_t = 32)]
    max_entry: u64,
}

#[derive(Args, Debug)]
struct StealArgs {
    #[arg(long)]
    two: String,
    #[arg(long, default_value_t = 1)]
    first_move: u64,
    #[arg(long)]
    horizon: u64,
}

#[derive(Args, Debug)]
struct UptoArgs {
    #[arg(long)]
    one: String,
    #[arg(long)]
    upto: u64,
}

#[derive(Args, Debug)]
struct DefeatArgs {
    #[arg(long)]
    one: String,
    #[arg(long, default_value = "rare:leftmost")]
    oracle: String,
    /// Number of partition blocks laid out.
    #[arg(long, default_value_t = 1000)]
    horizon: u64,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    EnumBounded {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        g: String,
        /// Inclusive range `a..b`.
        #[arg(long, default_value = "1..50")]
        bases: String,
        #[arg(long, default_value_t = 1000)]
        scan: u64,
    },
    Escape {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 5)]
        threshold: u64,
        #[arg(long, default_value_t = 1000)]
        scan: u64,
    },
    Rare {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value_t = 1000)]
        scan: u64,
    },
}

#[derive(Args, Debug)]
struct BatchArgs {
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    configs: Vec<PathBuf>,
}

/// Failure of one invocation.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError {
            code: e.exit_code(),
            message: e.to_string(),
        }
    }
}

fn parse_error(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

/// Parse a config file into `--key value` arguments and an optional
/// subcommand path.
fn read_config(path: &Path) -> std::result::Result<(Vec<String>, Vec<String>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| parse_error(format!("cannot read config {}: {e}", path.display())))?;
    let mut command = Vec::new();
    let mut flags = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            parse_error(format!("{}:{}: expected key=value", path.display(), i + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "command" {
            command = value.split_whitespace().map(String::from).collect();
        } else if value == "true" {
            flags.push(format!("--{key}"));
        } else if value != "false" {
            flags.push(format!("--{key}"));
            flags.push(value.to_string());
        }
    }
    Ok((command, flags))
}

/// Expand `--config <path>` into the arguments it stands for. Config values
/// come first, so flags given on the command line override them.
fn expand_config(argv: Vec<String>) -> std::result::Result<Vec<String>, CliError> {
    let mut rest = Vec::new();
    let mut config = None;
    let mut it = argv.into_iter();
    let program = it.next().unwrap_or_else(|| "filter-games".into());
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(
                it.next()
                    .ok_or_else(|| parse_error("--config needs a path"))?,
            );
        } else if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = config else {
        let mut out = vec![program];
        out.extend(rest);
        return Ok(out);
    };
    let (file_command, file_flags) = read_config(Path::new(&path))?;
    let given: Vec<String> = rest
        .iter()
        .take_while(|a| !a.starts_with('-'))
        .cloned()
        .collect();
    let tail = rest[given.len()..].to_vec();
    let command = if given.is_empty() {
        file_command
    } else {
        given
    };
    let mut out = vec![program];
    out.extend(command);
    out.extend(file_flags);
    out.extend(tail);
    Ok(out)
}

fn strategy(spec: &str, no_fast_path: bool) -> Result<Strategy> {
    let s = stock_strategy(spec)?;
    Ok(if no_fast_path {
        s.without_fast_path()
    } else {
        s
    })
}

fn parse_bases(spec: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let bad = || GameError::Parse(format!("bad base range {spec:?}"));
    let (a, b) = spec.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v)
        .map_err(|e| GameError::Precondition(format!("serialization failed: {e}")))
}

fn dispatch(cli: &Cli) -> Result<Value> {
    let nf = cli.no_fast_path;
    match &cli.command {
        Command::Play(a) => {
            let game: GameKind = a.game.parse()?;
            let filter: FilterHandle = a.filter.parse()?;
            let (one, two) = (strategy(&a.one, nf)?, strategy(&a.two, nf)?);
            let mut t = play(game, &one, &two, a.horizon)?;
            let cfg = JudgeConfig {
                thresholds: Thresholds {
                    beat_min: a.beat_min,
                    domination_max: a.domination_max,
                },
                ..JudgeConfig::default()
            };
            t.verdict = Some(judge(&t, &filter, &cfg)?);
            to_value(&t)
        }
        Command::RefuteTwo(a) => {
            let two = strategy(&a.two, nf)?;
            let cfg = ClaimConfig {
                max_tau_len: a.max_tau_len,
                max_entry: a.max_entry,
                budget: a.budget,
            };
            let ev = refute_two_g1_with(&two, &cfg, a.horizon)?;
            let mut verdicts = Vec::new();
            for (i, t) in ev.plays().iter().enumerate() {
                for f in FilterHandle::stock_concrete() {
                    let v = judge_g1(t, &f)?;
                    verdicts.push(json!({
                        "play": i,
                        "filter": f.to_string(),
                        "beat_count": v.beat_count,
                        "two_winning_at_horizon": v.two_winning_at_horizon,
                    }));
                }
            }
            Ok(json!({ "evidence": to_value(&ev)?, "verdicts": verdicts }))
        }
        Command::Steal(a) => {
            let two = strategy(&a.two, nf)?;
            to_value(&steal_two_g2(&two, &Move::new(a.first_move)?, a.horizon)?)
        }
        Command::ExtractG(a) => to_value(&extract_dominating_function(
            &strategy(&a.one, nf)?,
            a.upto,
        )?),
        Command::BuildGh(a) => to_value(&build_g_h(&strategy(&a.one, nf)?, a.upto)?),
        Command::DefeatOne(a) => {
            let oracle: FilterHandle = a.oracle.parse()?;
            to_value(&defeat_one_g2(&strategy(&a.one, nf)?, &oracle, a.horizon)?)
        }
        Command::Check(c) => match c {
            CheckCommand::EnumBounded {
                filter,
                g,
                bases,
                scan,
            } => {
                let g: IntFn = g.parse()?;
                to_value(&check_enum_bounded(
                    &filter.parse()?,
                    &g,
                    parse_bases(bases)?,
                    *scan,
                )?)
            }
            CheckCommand::Escape {
                filter,
                partition,
                threshold,
                scan,
            } => {
                let p: IntervalPartition = partition.parse()?;
                to_value(&check_partition_escape(
                    &filter.parse()?,
                    &p,
                    *threshold,
                    *scan,
                )?)
            }
            CheckCommand::Rare {
                filter,
                partition,
                scan,
            } => {
                let p: IntervalPartition = partition.parse()?;
                to_value(&check_rare_at_horizon(&filter.parse()?, &p, *scan)?)
            }
        },
        Command::Batch(_) => unreachable!("batch is handled by the caller"),
    }
}

fn write_out(out: &Option<PathBuf>, text: &str) -> std::result::Result<Option<String>, CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError {
                code: 4,
                message: format!("cannot write {}: {e}", path.display()),
            })?;
            Ok(None)
        }
        None => Ok(Some(text.to_string())),
    }
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn run_batch(a: &BatchArgs) -> Value {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Value>>> = Mutex::new(vec![None; a.configs.len()]);
    std::thread::scope(|scope| {
        for _ in 0..a.jobs.max(1).min(a.configs.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = a.configs.get(i) else { break };
                let argv = vec![
                    "filter-games".to_string(),
                    "--config".to_string(),
                    path.display().to_string(),
                ];
                let entry = match execute(argv) {
                    Ok(text) => {
                        let output = text
                            .map(|t| serde_json::from_str::<Value>(&t).expect("own output parses"))
                            .unwrap_or(Value::Null);
                        json!({ "config": path.display().to_string(), "exit_code": 0, "output": output })
                    }
                    Err(e) => json!({
                        "config": path.display().to_string(),
                        "exit_code": e.code,
                        "error": e.message,
                    }),
                };
                results.lock().expect("no poisoning")[i] = Some(entry);
            });
        }
    });
    Value::Array(
        results
            .into_inner()
            .expect("no poisoning")
            .into_iter()
            .flatten()
            .collect(),
    )
}

/// Run one invocation. Returns the JSON text when it goes to stdout.
pub fn execute(argv: Vec<String>) -> std::result::Result<Option<String>, CliError> {
    let argv = expand_config(argv)?;
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError {
            code: 0,
            message: e.to_string(),
        },
        _ => parse_error(e.to_string()),
    })?;
    let value = match &cli.command {
        Command::Batch(a) => run_batch(a),
        _ => dispatch(&cli)?,
    };
    write_out(&cli.out, &render(&value))
}

/// Entry point for the binary; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    match execute(argv) {
        Ok(Some(text)) => {
            print!("{text}");
            0
        }
        Ok(None) => 0,
        Err(CliError { code: 0, message }) => {
            print!("{message}");
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message.trim_end());
            e.code
        }
    }
}
