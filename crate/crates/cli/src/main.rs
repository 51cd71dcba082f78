mod args;
mod commands;
mod output;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use arithdeg::search::write_atomic;
use arithdeg::Error;
use clap::Parser;

use args::{Cli, Format, RunConfig};
use commands::CliError;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Append `--key value` for every `key = value` line of the config file whose
/// flag is absent from the command line. A value of `true` gives a bare flag;
/// repeated keys give repeated flags.
fn merge_config_file(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config-file" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config-file=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let given: Vec<String> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();
    let mut out = argv;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key = value", lineno + 1))?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        if given.contains(&k) {
            continue;
        }
        out.push(format!("--{k}"));
        if v != "true" {
            out.push(v.to_string());
        }
    }
    Ok(out)
}

fn exit_code(e: &CliError) -> u8 {
    match e {
        CliError::Usage(_) => EXIT_USAGE,
        CliError::Core(e) if e.is_resource_bound() => EXIT_RESOURCE,
        CliError::Core(Error::Verification(_)) => EXIT_FAIL,
        CliError::Core(_) => EXIT_USAGE,
    }
}

fn fail(e: CliError) -> ExitCode {
    let msg = match &e {
        CliError::Usage(m) => m.clone(),
        CliError::Core(e) => e.to_string(),
    };
    eprintln!("error: {msg}");
    ExitCode::from(exit_code(&e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    write_atomic(path, bytes).map_err(CliError::Core)
}

fn main() -> ExitCode {
    let argv = match merge_config_file(std::env::args().collect()) {
        Ok(a) => a,
        Err(m) => return fail(CliError::Usage(m)),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(w) = cli.workers {
        if w == 0 {
            return fail(CliError::Usage("--workers must be positive".into()));
        }
        arithdeg::set_workers(w);
    }
    let mut command = cli.command;
    if let Err(e) = commands::normalize(&mut command) {
        return fail(e);
    }
    let cfg = RunConfig {
        command,
        format: if cli.json {
            Format::Json
        } else if cli.csv {
            Format::Csv
        } else {
            Format::Text
        },
        workers: cli.workers,
    };
    let out = match commands::run(&cfg.command) {
        Ok(o) => o,
        Err(e) => return fail(e),
    };
    // Every output is produced in memory first so a failure leaves no partial files.
    let report = output::render(&cfg, &out, cli.output.is_some());
    let mut writes = Vec::new();
    if let Some((path, set)) = &out.solutions {
        match output::solution_bytes(&cfg, set) {
            Ok(b) => writes.push((path.clone(), b)),
            Err(e) => return fail(e.into()),
        }
    }
    if let Some(path) = &cli.output {
        writes.push((path.clone(), report.clone().into_bytes()));
    }
    for (path, bytes) in &writes {
        if let Err(e) = write_file(path, bytes) {
            return fail(e);
        }
    }
    if cli.output.is_none() {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(report.as_bytes());
    }
    if !out.pass {
        if let Some(row) = out.json.get("rows").and_then(|r| r.as_array()).and_then(|r| r.iter().find(|x| x["pass"] == false)) {
            eprintln!("first failing row: {row}");
        } else {
            eprintln!("verification failed");
        }
        return ExitCode::from(EXIT_FAIL);
    }
    ExitCode::SUCCESS
}
