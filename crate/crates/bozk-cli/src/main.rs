//! `bozk`: runs one experiment from a configuration file and writes CSV,
//! JSON and binary artifacts plus a run manifest.
//!
//! Exit codes: 0 when every check passes, 2 when a check fails, 1 on error.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use serde_json::{Map, Value};

use commands::{Check, Command};
use output::{fnv1a_hex, Artifacts};

#[derive(Debug, Parser)]
#[command(name = "bozk", version, about = "Dispersive BO-ZK experiment runner")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Optional config file followed by `key=value` overrides.
    args: Vec<String>,
    /// Config file (alternative to the positional form).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "bozk-out")]
    out_dir: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sweeps.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Print the configuration keys with defaults and exit.
    #[arg(long)]
    print_defaults: bool,
}

struct Run {
    config: Option<config::Config>,
    config_path: Option<PathBuf>,
    checks: Vec<Check>,
    inputs: Vec<(String, String)>,
    error: Option<String>,
}

fn split_args(cli: &Cli) -> Result<(Option<PathBuf>, Vec<String>)> {
    let mut path = cli.config.clone();
    let mut overrides = Vec::new();
    for a in &cli.args {
        if a.contains('=') {
            overrides.push(a.clone());
        } else if path.is_none() {
            path = Some(PathBuf::from(a));
        } else {
            bail!("unexpected argument '{a}': only one config file may be given");
        }
    }
    if let Some(s) = cli.seed {
        overrides.push(format!("seed={s}"));
    }
    Ok((path, overrides))
}

fn execute(cli: &Cli, out: &mut Artifacts, run: &mut Run) -> Result<()> {
    let (path, overrides) = split_args(cli)?;
    run.config_path = path.clone();
    if let Some(p) = &path {
        let bytes = std::fs::read(p).with_context(|| format!("cannot read config {}", p.display()))?;
        run.inputs.push((p.display().to_string(), fnv1a_hex(&bytes)));
    }
    let cfg = config::resolve(cli.command.schema(), path.as_deref(), &overrides)?;
    run.config = Some(cfg.clone());
    let outcome = cli.command.run(&cfg, out)?;
    run.inputs.extend(outcome.inputs);
    run.checks = outcome.checks.clone();

    let mut checks = Map::new();
    for c in &outcome.checks {
        let mut m = Map::new();
        m.insert("passed".into(), Value::Bool(c.passed));
        m.insert("detail".into(), Value::String(c.detail.clone()));
        checks.insert(c.name.clone(), Value::Object(m));
    }
    let mut summary = Map::new();
    summary.insert("subcommand".into(), Value::String(cli.command.name().into()));
    summary.insert("config".into(), config_json(&cfg));
    summary.insert("checks".into(), Value::Object(checks));
    summary.insert("results".into(), Value::Object(outcome.results));
    out.json("summary.json", &Value::Object(summary))?;
    Ok(())
}

fn config_json(cfg: &config::Config) -> Value {
    Value::Object(
        cfg.entries()
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect(),
    )
}

fn write_manifest(
    dir: &Path,
    cli: &Cli,
    run: &Run,
    outputs: &[(String, String)],
    started: String,
    code: u8,
) -> Result<()> {
    let mut m = Map::new();
    m.insert("tool".into(), Value::String(format!("bozk {}", env!("CARGO_PKG_VERSION"))));
    m.insert("subcommand".into(), Value::String(cli.command.name().into()));
    m.insert("config".into(), run.config.as_ref().map_or(Value::Null, config_json));
    m.insert(
        "config_file".into(),
        run.config_path
            .as_ref()
            .map_or(Value::Null, |p| Value::String(p.display().to_string())),
    );
    let seed = run
        .config
        .as_ref()
        .map_or(Value::Null, |c| Value::from(c.int("seed")));
    m.insert("seed".into(), seed);
    m.insert("threads".into(), Value::from(rayon::current_num_threads()));
    m.insert("started".into(), Value::String(started));
    m.insert("finished".into(), Value::String(chrono::Utc::now().to_rfc3339()));
    let digests = |v: &[(String, String)]| -> Value {
        Value::Object(v.iter().map(|(k, d)| (k.clone(), Value::String(d.clone()))).collect())
    };
    m.insert("inputs".into(), digests(&run.inputs));
    m.insert("outputs".into(), digests(outputs));
    m.insert(
        "checks".into(),
        Value::Object(
            run.checks
                .iter()
                .map(|c| (c.name.clone(), Value::Bool(c.passed)))
                .collect(),
        ),
    );
    m.insert("exit_code".into(), Value::from(code));
    m.insert("error".into(), run.error.clone().map_or(Value::Null, Value::String));
    let mut s = serde_json::to_string_pretty(&Value::Object(m))?;
    s.push('\n');
    std::fs::write(dir.join("manifest.json"), s).context("cannot write manifest.json")?;
    Ok(())
}

fn print_defaults(cmd: Command) {
    println!("# {} defaults", cmd.name());
    for k in cmd.schema() {
        println!("{} = {}    # {}", k.key, k.default, k.help);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.print_defaults {
        print_defaults(cli.command);
        return ExitCode::SUCCESS;
    }
    let started = chrono::Utc::now().to_rfc3339();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start {} threads: {e}", cli.threads);
        return ExitCode::from(1);
    }
    let mut out = match Artifacts::new(&cli.out_dir) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let mut run = Run {
        config: None,
        config_path: None,
        checks: Vec::new(),
        inputs: Vec::new(),
        error: None,
    };
    let code = match execute(&cli, &mut out, &mut run) {
        Ok(()) => {
            for c in &run.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if run.checks.iter().all(|c| c.passed) {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            run.error = Some(format!("{e:#}"));
            1
        }
    };
    if let Err(e) = write_manifest(out.dir(), &cli, &run, out.digests(), started, code) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
