mod checksim;
mod curve;
mod manifest;
mod output;
mod table;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use manifest::RunManifest;
use output::{CliError, Status};

#[derive(Debug, Parser)]
#[command(
    name = "otlab",
    version,
    about = "Seeded simulations of qutrit one-time-table generation"
)]
struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, env = "OTLAB_SEED", default_value_t = 0)]
    seed: u64,

    /// Write the primary output here instead of stdout; a manifest goes next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Replay a run recorded in a manifest; its seed overrides `--seed`.
    #[arg(long)]
    from_manifest: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate honest one-time tables.
    Table(table::TableArgs),
    /// Run a property sweep.
    Verify(verify::VerifyArgs),
    /// Sample the information tradeoff curve.
    Curve(curve::CurveArgs),
    /// Simulate table checking with abort.
    Checksim(checksim::ChecksimArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Table(_) => "table",
            Command::Verify(_) => "verify",
            Command::Curve(_) => "curve",
            Command::Checksim(_) => "checksim",
        }
    }

    fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::Table(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
            Command::Curve(a) => serde_json::to_value(a),
            Command::Checksim(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }

    fn from_parameters(name: &str, params: serde_json::Value) -> Result<Self, CliError> {
        let bad =
            |e: serde_json::Error| CliError::Usage(format!("manifest parameters for {name}: {e}"));
        Ok(match name {
            "table" => Command::Table(serde_json::from_value(params).map_err(bad)?),
            "verify" => Command::Verify(serde_json::from_value(params).map_err(bad)?),
            "curve" => Command::Curve(serde_json::from_value(params).map_err(bad)?),
            "checksim" => Command::Checksim(serde_json::from_value(params).map_err(bad)?),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown subcommand {other:?} in manifest"
                )))
            }
        })
    }

    fn run(
        &self,
        seed: u64,
        out: Option<&std::path::Path>,
    ) -> Result<(Status, Vec<PathBuf>), CliError> {
        match self {
            Command::Table(a) => table::run(a, seed, out),
            Command::Verify(a) => verify::run(a, seed, out),
            Command::Curve(a) => curve::run(a, seed, out),
            Command::Checksim(a) => checksim::run(a, seed, out),
        }
    }
}

fn execute(cli: Cli) -> Result<Status, CliError> {
    let (command, seed, out) = match (&cli.from_manifest, cli.command) {
        (Some(path), None) => {
            let m = RunManifest::load(path)?;
            let out = cli.out.or_else(|| m.outputs.first().map(PathBuf::from));
            (
                Command::from_parameters(&m.subcommand, m.parameters)?,
                m.seed,
                out,
            )
        }
        (None, Some(cmd)) => (cmd, cli.seed, cli.out),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--from-manifest replaces the subcommand".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Usage(
                "a subcommand or --from-manifest is required".into(),
            ))
        }
    };
    let (status, outputs) = command.run(seed, out.as_deref())?;
    if let Some(path) = &out {
        RunManifest {
            subcommand: command.name().to_string(),
            parameters: command.parameters(),
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        }
        .save(&manifest::manifest_path(path))?;
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match execute(cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
