//! `qkz`: run a verification suite and write a machine-readable report.
//!
//! Exit status: 0 all cases pass, 1 some case fails, 2 configuration error,
//! 3 numeric abort (pole, non-generic point, contour failure).

mod checks;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use checks::Case;
use config::{Command, FileConfig, Format, RunConfig, SCHEMA};

#[derive(Debug, Parser)]
#[command(name = "qkz", version, about = "Numerical checks for hypergeometric qKZ solutions")]
struct Cli {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    command: Option<Command>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// quadrature nodes per base circle
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// report destination; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Cli {
    fn flags(&self) -> FileConfig {
        FileConfig {
            schema: None,
            command: self.command,
            q: self.q,
            k: self.k,
            m: self.m,
            n: self.n,
            l: self.l,
            nodes: self.nodes,
            seed: self.seed,
            z: None,
            out: self.out.clone(),
            format: self.format,
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    schema: u32,
    command: &'a str,
    params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    z: Option<Vec<[f64; 2]>>,
    cases: &'a [Case],
    max_residual: f64,
    pass: bool,
}

enum Failure {
    Config(String),
    Numeric(qkz::Error),
    Io(String),
}

impl From<qkz::Error> for Failure {
    fn from(e: qkz::Error) -> Self {
        match e {
            qkz::Error::InvalidParams(msg) => Failure::Config(msg),
            other => Failure::Numeric(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("qkz: config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("qkz: numeric abort: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("qkz: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Config)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::resolve(file, cli.flags()).map_err(Failure::Config)?;

    let mut z_out = None;
    let mut rows = None;
    let cases = match cfg.command {
        Command::CheckQseries => checks::qseries(&cfg)?,
        Command::CheckRmatrix => checks::rmatrix(&cfg)?,
        Command::CheckLemma => checks::lemma(&cfg)?,
        Command::CheckTheorem => checks::theorem(&cfg)?,
        Command::CheckQkz => checks::qkz(&cfg)?,
        Command::Eval => {
            let (z, r) = checks::eval(&cfg)?;
            z_out = Some(z.iter().map(|x| [x.re, x.im]).collect());
            let cases = checks::eval_cases(&r);
            rows = Some(r);
            cases
        }
    };
    let max_residual = cases.iter().map(|c| c.residual).fold(0.0, f64::max);
    let pass = cases.iter().all(|c| c.pass);

    let body = match (cfg.format, &rows) {
        (Format::Csv, Some(rows)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["bits", "real", "imag"]).map_err(|e| Failure::Io(e.to_string()))?;
            for (bits, v) in rows {
                w.write_record([checks::bits_label(bits), v.re.to_string(), v.im.to_string()])
                    .map_err(|e| Failure::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Io(e.to_string()))?
        }
        (Format::Csv, None) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["inputs", "residual", "pass"]).map_err(|e| Failure::Io(e.to_string()))?;
            for c in &cases {
                w.write_record([c.inputs.to_string(), c.residual.to_string(), c.pass.to_string()])
                    .map_err(|e| Failure::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Io(e.to_string()))?
        }
        (Format::Json, _) => {
            let report = Report {
                schema: SCHEMA,
                command: cfg.command.name(),
                params: checks::params_json(&cfg.params),
                z: z_out,
                cases: &cases,
                max_residual,
                pass,
            };
            let mut text = serde_json::to_vec_pretty(&report).map_err(|e| Failure::Io(e.to_string()))?;
            text.push(b'\n');
            text
        }
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, &body).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&body).map_err(|e| Failure::Io(e.to_string()))?,
    }
    eprintln!(
        "{}: {} ({} cases, max residual {:.2e})",
        cfg.command.name(),
        if pass { "pass" } else { "FAIL" },
        cases.len(),
        max_residual
    );
    Ok(pass)
}
