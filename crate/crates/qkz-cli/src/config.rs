//! Run configuration: JSON file merged with command-line flags (flags win).

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qkz::{ParameterSet, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;
/// Smallest pairwise phase gap of automatically drawn z.
pub const MIN_PHASE_GAP: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckQseries,
    CheckRmatrix,
    CheckLemma,
    CheckTheorem,
    CheckQkz,
    Eval,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckQseries => "check-qseries",
            Command::CheckRmatrix => "check-rmatrix",
            Command::CheckLemma => "check-lemma",
            Command::CheckTheorem => "check-theorem",
            Command::CheckQkz => "check-qkz",
            Command::Eval => "eval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// "auto" or an explicit list of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZSpec {
    Auto(AutoTag),
    Explicit(Vec<[f64; 2]>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// Everything a config file may set; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema: Option<u32>,
    pub command: Option<Command>,
    pub q: Option<f64>,
    pub k: Option<f64>,
    pub m: Option<u32>,
    pub n: Option<usize>,
    pub l: Option<usize>,
    pub nodes: Option<usize>,
    pub seed: Option<u64>,
    pub z: Option<ZSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: FileConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        match cfg.schema {
            None | Some(SCHEMA) => Ok(cfg),
            Some(v) => Err(format!("{}: unsupported schema {v}, expected {SCHEMA}", path.display())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: ParameterSet,
    pub z: ZSpec,
    pub seed: u64,
    pub nodes: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    /// Merge `flags` over `file` over the defaults.
    pub fn resolve(file: FileConfig, flags: FileConfig) -> Result<Self, String> {
        let command = flags.command.or(file.command).ok_or("no command given (--command or \"command\")")?;
        let q = flags.q.or(file.q).unwrap_or(0.6);
        let k = flags.k.or(file.k).unwrap_or(1.0);
        let m = flags.m.or(file.m).unwrap_or(0);
        let n = flags.n.or(file.n).unwrap_or(2);
        let l = flags.l.or(file.l).unwrap_or(1);
        let params = ParameterSet::new(q, k, m, n, l).map_err(|e| e.to_string())?;
        if !params.is_default_regime() {
            return Err(format!("need real 0 < q < 1 and k > -1, got q={q}, k={k}"));
        }
        let nodes = flags.nodes.or(file.nodes).unwrap_or(qkz::contours::DEFAULT_NODES);
        if nodes < 8 {
            return Err(format!("need at least 8 nodes, got {nodes}"));
        }
        let z = flags.z.or(file.z).unwrap_or(ZSpec::Auto(AutoTag::Auto));
        if let ZSpec::Explicit(list) = &z {
            if list.len() != n {
                return Err(format!("explicit z has {} entries, n = {n}", list.len()));
            }
        }
        Ok(Self {
            command,
            params,
            z,
            seed: flags.seed.or(file.seed).unwrap_or(7),
            nodes,
            out: flags.out.or(file.out),
            format: flags.format.or(file.format).unwrap_or(Format::Json),
        })
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// The configured z, or unit-modulus points drawn from `rng`.
    pub fn z_points(&self, rng: &mut ChaCha8Rng) -> Vec<C64> {
        match &self.z {
            ZSpec::Explicit(list) => list.iter().map(|&[re, im]| C64::new(re, im)).collect(),
            ZSpec::Auto(_) => auto_points(rng, self.params.n),
        }
    }
}

/// Unit-modulus points with pairwise circular phase gap >= MIN_PHASE_GAP.
pub fn auto_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let tau = std::f64::consts::TAU;
    let mut phases: Vec<f64> = Vec::with_capacity(n);
    while phases.len() < n {
        let a: f64 = rng.random_range(0.0..tau);
        if phases.iter().all(|&b| {
            let d = (a - b).rem_euclid(tau);
            d.min(tau - d) >= MIN_PHASE_GAP
        }) {
            phases.push(a);
        }
    }
    phases.into_iter().map(|a| C64::from_polar(1.0, a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = FileConfig { command: Some(Command::CheckQkz), n: Some(3), l: Some(1), seed: Some(1), ..Default::default() };
        let flags = FileConfig { n: Some(2), ..Default::default() };
        let cfg = RunConfig::resolve(file, flags).unwrap();
        assert_eq!(cfg.command, Command::CheckQkz);
        assert_eq!((cfg.params.n, cfg.params.l, cfg.seed), (2, 1, 1));
    }

    #[test]
    fn z_spec_parses_both_forms() {
        let auto: FileConfig = serde_json::from_str(r#"{"z": "auto"}"#).unwrap();
        assert_eq!(auto.z, Some(ZSpec::Auto(AutoTag::Auto)));
        let explicit: FileConfig = serde_json::from_str(r#"{"z": [[1.0, 0.0], [0.0, 1.0]]}"#).unwrap();
        assert_eq!(explicit.z, Some(ZSpec::Explicit(vec![[1.0, 0.0], [0.0, 1.0]])));
        assert!(serde_json::from_str::<FileConfig>(r#"{"zz": 1}"#).is_err());
    }

    #[test]
    fn auto_points_are_separated() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = auto_points(&mut rng, 6);
        for i in 0..6 {
            assert!((z[i].norm() - 1.0).abs() < 1e-15);
            for j in 0..i {
                let d = (z[i].arg() - z[j].arg()).rem_euclid(std::f64::consts::TAU);
                assert!(d.min(std::f64::consts::TAU - d) >= MIN_PHASE_GAP - 1e-12);
            }
        }
    }

    #[test]
    fn missing_command_and_bad_params() {
        assert!(RunConfig::resolve(FileConfig::default(), FileConfig::default()).is_err());
        let flags = FileConfig { command: Some(Command::Eval), l: Some(5), ..Default::default() };
        assert!(RunConfig::resolve(FileConfig::default(), flags).is_err());
    }
}
