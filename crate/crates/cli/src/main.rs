//! Trace harness for the dynamic LIS engines: replay edit scripts, fuzz
//! engines against the patience oracle, and benchmark update-time scaling.
//!
//! Exit codes: 0 all contracts held, 1 a contract was violated, 2 usage
//! or input error.

mod trace;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use dynlis_core::engine::{
    bench_engine, build_engine, log_log_slope, BenchSample, EngineKind, EngineOptions,
    PatienceEngine,
};
use dynlis_core::exact::{Mode, Params};
use dynlis_core::rng::Rng64;
use dynlis_core::seq::EditOp;
use dynlis_core::DynLisEngine;

use trace::{parse_trace, TraceOp};

#[derive(Parser)]
#[command(name = "dynlis", about = "dynamic LIS engines: replay, fuzz, bench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Engine: patience | ccp | exact | approx
    #[arg(long, default_value = "patience")]
    engine: EngineKind,
    /// RNG seed (instances, fuzzing, benches)
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Approximation factor for the approx engine
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Update-time exponent knob for the approx engine
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Exact-engine parameter mode
    #[arg(long, value_parser = parse_mode, default_value = "exact2")]
    mode: Mode,
    /// Ensemble size override for the exact engine
    #[arg(long)]
    instances: Option<usize>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "exact2" => Ok(Mode::OracleSweep),
        "exact08" => Ok(Mode::DenseTables),
        other => Err(format!("unknown mode {other:?} (exact2|exact08)")),
    }
}

impl EngineArgs {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            kind: self.engine,
            params: Params {
                mode: self.mode,
                instances: self.instances,
                ..Params::default()
            },
            eps: self.eps,
            kappa: self.kappa,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Replay a trace file against an engine.
    RunTrace {
        #[command(flatten)]
        engine: EngineArgs,
        /// Trace file (see README for the line format)
        #[arg(long)]
        trace: std::path::PathBuf,
        /// Recompute a patience answer after every op and flag mismatches
        #[arg(long)]
        oracle: bool,
    },
    /// Random traces checked against the oracle after every op.
    Fuzz {
        #[command(flatten)]
        engine: EngineArgs,
        /// Largest initial sequence length
        #[arg(long, default_value_t = 256)]
        n_max: usize,
        /// Ops per trial
        #[arg(long, default_value_t = 200)]
        ops: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Amortized update-time scaling; CSV output plus a log-log slope.
    Bench {
        #[command(flatten)]
        engine: EngineArgs,
        /// Comma-separated sizes, e.g. 4096,8192,16384
        #[arg(long, value_delimiter = ',', default_value = "4096,8192,16384")]
        sizes: Vec<usize>,
        /// Ops per size
        #[arg(long, default_value_t = 64)]
        ops: usize,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::RunTrace {
            engine,
            trace,
            oracle,
        } => run_trace(&engine, &trace, oracle),
        Command::Fuzz {
            engine,
            n_max,
            ops,
            trials,
        } => fuzz(&engine, n_max, ops, trials),
        Command::Bench {
            engine,
            sizes,
            ops,
            csv,
        } => bench(&engine, &sizes, ops, csv.as_deref()),
    }
}

fn run_trace(args: &EngineArgs, path: &std::path::Path, oracle: bool) -> Result<bool> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let trace = parse_trace(&text)?;
    let opts = args.options();
    let mut engine = build_engine(&trace.initial, &opts);
    let mut check = oracle.then(|| PatienceEngine::new(&trace.initial));
    let eps = args.eps;

    let mut mismatches = 0usize;
    let mut answers = 0usize;
    let start = Instant::now();
    for (k, op) in trace.ops.iter().enumerate() {
        match op {
            TraceOp::Edit(e) => {
                engine
                    .apply(*e)
                    .with_context(|| format!("op {}: invalid against current length", k + 1))?;
                if let Some(c) = &mut check {
                    c.apply(*e).expect("oracle tracks the same sequence");
                }
            }
            TraceOp::ReportLis => {
                let got = engine.lis();
                answers += 1;
                let note = if let Some(c) = &mut check {
                    let want = c.lis();
                    let ok = answer_ok(engine.exact(), eps, got, want);
                    if !ok {
                        mismatches += 1;
                    }
                    format!(" oracle={want}{}", if ok { "" } else { " MISMATCH" })
                } else {
                    String::new()
                };
                println!("op {}: L -> {got}{note}", k + 1);
            }
            TraceOp::QueryRect(r) => {
                let got = engine.rect(r);
                answers += 1;
                let note = if let Some(c) = &mut check {
                    let want = c.rect(r);
                    let ok = answer_ok(engine.exact(), eps, got, want);
                    if !ok {
                        mismatches += 1;
                    }
                    format!(" oracle={want}{}", if ok { "" } else { " MISMATCH" })
                } else {
                    String::new()
                };
                println!("op {}: Q -> {got}{note}", k + 1);
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "trace done: engine={} ops={} answers={} mismatches={} time={:?}",
        engine.name(),
        trace.ops.len(),
        answers,
        mismatches,
        elapsed
    );
    Ok(mismatches == 0)
}

/// Exact engines must match the oracle; approximate ones must stay within
/// [(1-eps) truth, truth].
fn answer_ok(exact: bool, eps: f64, got: usize, want: usize) -> bool {
    if exact {
        got == want
    } else {
        got <= want && got as f64 >= (1.0 - eps) * want as f64 - 1e-9
    }
}

fn fuzz(args: &EngineArgs, n_max: usize, ops: usize, trials: usize) -> Result<bool> {
    let opts = args.options();
    let eps = args.eps;
    let failures: Vec<(u64, String)> = (0..trials)
        .into_par_iter()
        .filter_map(|t| {
            let trial_seed = args.seed.wrapping_add(t as u64);
            fuzz_one(&opts, eps, n_max, ops, trial_seed)
                .err()
                .map(|e| (trial_seed, e))
        })
        .collect();
    for (seed, what) in &failures {
        eprintln!("violation (repro with --seed {seed} --trials 1): {what}");
    }
    println!(
        "fuzz done: engine={:?} trials={} ops={} violations={}",
        opts.kind,
        trials,
        ops,
        failures.len()
    );
    Ok(failures.is_empty())
}

fn fuzz_one(
    opts: &EngineOptions,
    eps: f64,
    n_max: usize,
    ops: usize,
    seed: u64,
) -> std::result::Result<(), String> {
    let mut rng = Rng64::new(seed);
    let n0 = rng.gen_usize(n_max + 1);
    let mut pool: Vec<i64> = (0..(2 * (n_max + ops)) as i64 + 4).collect();
    rng.shuffle(&mut pool);
    let initial: Vec<i64> = pool.drain(..n0).collect();
    let mut engine = build_engine(&initial, &EngineOptions { seed, ..*opts });
    let mut oracle = PatienceEngine::new(&initial);
    for k in 0..ops {
        let insert = oracle.len() == 0 || rng.gen_bool();
        let op = if insert {
            EditOp::Insert {
                pos: rng.gen_usize(oracle.len() + 1) + 1,
                val: pool.pop().expect("pool large enough"),
            }
        } else {
            EditOp::Delete {
                pos: rng.gen_usize(oracle.len()) + 1,
            }
        };
        engine.apply(op).map_err(|e| format!("op {k}: {e}"))?;
        oracle.apply(op).expect("same sequence");
        let got = engine.lis();
        let want = oracle.lis();
        if !answer_ok(engine.exact(), eps, got, want) {
            return Err(format!("op {k}: got {got}, oracle {want}"));
        }
    }
    Ok(())
}

fn bench(
    args: &EngineArgs,
    sizes: &[usize],
    ops: usize,
    csv: Option<&std::path::Path>,
) -> Result<bool> {
    let opts = args.options();
    let mut samples: Vec<BenchSample> = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let s = bench_engine(&opts, n, ops, args.seed.wrapping_add(i as u64));
        eprintln!(
            "bench n={} ops={} amortized={} ns",
            s.n, s.ops, s.amortized_ns
        );
        samples.push(s);
    }
    let mut out = String::from("n,ops,total_ns,amortized_ns,answer_checksum\n");
    for s in &samples {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.n, s.ops, s.total_ns, s.amortized_ns, s.answer_checksum
        ));
    }
    match csv {
        Some(path) => std::fs::write(path, &out)
            .with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(out.as_bytes())?,
    }
    if samples.len() >= 2 {
        println!("log-log slope: {:.4}", log_log_slope(&samples));
    }
    Ok(true)
}
