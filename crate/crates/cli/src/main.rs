mod commands;
mod settings;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use settings::{resolve, Cli, Settings};

const USAGE: u8 = 2;
const FAILURE: u8 = 1;

fn error_json(op: &str, kind: &str, message: &str) -> String {
    json!({ "op": op, "kind": kind, "message": message }).to_string()
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("{}", error_json("cli::run", "usage", message));
    ExitCode::from(USAGE)
}

fn set_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CIRCINV_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CIRCINV_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn write_artifacts(dir: &Path, report: &commands::Report, command: &str, s: &Settings) -> circinv_core::Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| circinv_core::Error::Io {
        op: "cli::write_artifacts",
        source: e,
    })?;
    for (name, text) in &report.artifacts {
        circinv_core::io::write_text(dir.join(name), text)?;
    }
    let summary = json!({
        "command": command,
        "r": s.r,
        "modes": s.modes,
        "grid": s.grid,
        "seed": s.seed,
        "summary": report.summary,
        "details": report.details,
        "ok": report.failure.is_none(),
    });
    circinv_core::io::write_text(dir.join("summary.json"), &circinv_core::io::pretty(&summary))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version print and exit 0; real misuse exits 2
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(msg) = set_threads() {
        return usage_error(&msg);
    }
    let s = match resolve(cli.flags) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let report = match commands::run(cli.command, &s) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", error_json(e.op(), e.kind(), &e.to_string()));
            return ExitCode::from(FAILURE);
        }
    };
    println!("{}", report.summary);
    if let Some(dir) = &s.out {
        if let Err(e) = write_artifacts(dir, &report, cli.command.name(), &s) {
            eprintln!("{}", error_json(e.op(), e.kind(), &e.to_string()));
            return ExitCode::from(FAILURE);
        }
    }
    match &report.failure {
        None => ExitCode::SUCCESS,
        Some(e) => {
            eprintln!("{}", error_json(e.op(), e.kind(), &e.to_string()));
            ExitCode::from(FAILURE)
        }
    }
}
