mod args;
mod commands;
mod config;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser};

use args::{Cli, Command, ReplayArgs};
use manifest::{Inputs, OutputRecord, RunManifest};

/// Bad or inconsistent arguments; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect(), &Cli::command()) {
        Ok(a) => a,
        Err(e) => return fail(e.into()),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Replay(r) => replay(&r),
        cmd => record(cmd, Inputs::default()).map(|_| ()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: anyhow::Error) -> ExitCode {
    if e.downcast_ref::<UsageError>().is_some() {
        eprintln!("error: {e}");
        ExitCode::from(2)
    } else {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    }
}

/// Runs `cmd` and writes its manifest next to the outputs.
fn record(mut cmd: Command, mut inputs: Inputs) -> Result<RunManifest> {
    let path = match cmd.common_mut().and_then(|c| c.manifest.clone()) {
        Some(p) => p,
        None => manifest::default_path(&cmd).context("command has no output to name the manifest after")?,
    };
    let started = manifest::unix_ms();
    let summary = commands::execute(&cmd, &mut inputs)?;
    let finished = manifest::unix_ms();
    let outputs = cmd
        .outputs()
        .iter()
        .map(|p| OutputRecord::of(p))
        .collect::<Result<Vec<_>>>()?;
    let seed = cmd.seed();
    // The manifest path is part of the echo only when given explicitly.
    if let Some(c) = cmd.common_mut() {
        c.manifest = Some(path.clone());
    }
    let m = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cmd,
        seed,
        inputs: inputs.records,
        outputs,
        started_unix_ms: started,
        finished_unix_ms: finished,
        summary,
    };
    let text = serde_json::to_string_pretty(&m)? + "\n";
    std::fs::write(&path, text).with_context(|| format!("writing manifest {}", path.display()))?;
    Ok(m)
}

fn relocate(path: &mut PathBuf, dir: &Path) {
    if let Some(name) = path.file_name() {
        *path = dir.join(name);
    }
}

fn replay(r: &ReplayArgs) -> Result<()> {
    let old = manifest::load(&r.manifest)?;
    let mut cmd = old.command.clone();
    if matches!(cmd, Command::Replay(_)) {
        bail!(UsageError("manifest records a replay".into()));
    }
    if let Some(dir) = &r.out_dir {
        for p in cmd.outputs_mut() {
            relocate(p, dir);
        }
        if let Some(m) = cmd.common_mut().and_then(|c| c.manifest.as_mut()) {
            relocate(m, dir);
        }
    }
    if let (Some(w), Some(run)) = (r.workers, cmd.run_args_mut()) {
        run.workers = w;
    }
    eprintln!("replaying {} from {}", cmd.name(), r.manifest.display());
    let new = record(cmd, Inputs::from_manifest(&old))?;
    let mut diverged = Vec::new();
    for (a, b) in old.outputs.iter().zip(&new.outputs) {
        let same = a.sha256 == b.sha256 && a.bytes == b.bytes;
        println!("{} {}", if same { "identical" } else { "DIFFERS  " }, b.path.display());
        if !same {
            diverged.push(b.path.display().to_string());
        }
    }
    if !diverged.is_empty() {
        bail!("replay diverged from the recorded outputs: {}", diverged.join(", "));
    }
    Ok(())
}
