//! Command-line flags, JSON config files and their merge into one validated
//! [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use plateau_core::dqnn::{CostKind, Family};
use plateau_core::variance::Scheme;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Gradient statistics over a grid of (n, family, cost, scheme) cells.
    VarianceSweep,
    /// Single-layer toy network against its closed-form variances.
    ToyModel,
    /// Monte-Carlo checks of the Haar moment identities.
    VerifyMoments,
    /// Closed-form bounds and toy variances for a range of n.
    BoundTable,
    /// Flow-time gradient statistics for deep global networks.
    MatrixFlow,
    /// Parameter-shift, flow and hardware-efficient consistency checks.
    VerifyGradients,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VarianceSweep => "variance-sweep",
            Command::ToyModel => "toy-model",
            Command::VerifyMoments => "verify-moments",
            Command::BoundTable => "bound-table",
            Command::MatrixFlow => "matrix-flow",
            Command::VerifyGradients => "verify-gradients",
        }
    }

    fn statistical(self) -> bool {
        !matches!(self, Command::BoundTable | Command::VerifyGradients)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    GlobalDeep,
    LocalM1,
    LocalM2,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::GlobalDeep => Family::GlobalDeep,
            FamilyArg::LocalM1 => Family::LocalM1Toy,
            FamilyArg::LocalM2 => Family::LocalM2Brick,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CostArg {
    Global,
    Local,
    Both,
}

impl CostArg {
    pub fn kinds(self) -> Vec<CostKind> {
        match self {
            CostArg::Global => vec![CostKind::Global],
            CostArg::Local => vec![CostKind::Local],
            CostArg::Both => vec![CostKind::Global, CostKind::Local],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Rpqc,
    MatrixFlow,
    Both,
}

impl SchemeArg {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeArg::Rpqc => vec![Scheme::Rpqc],
            SchemeArg::MatrixFlow => vec![Scheme::MatrixFlow],
            SchemeArg::Both => vec![Scheme::Rpqc, Scheme::MatrixFlow],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Inclusive range `a..b`, or a single value `a`.
pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("'{s}' is not a range like 2..5"))
    };
    match s.split_once("..") {
        Some((a, b)) => Ok((num(a)?, num(b.strip_prefix('=').unwrap_or(b))?)),
        None => num(s).map(|a| (a, a)),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "plateau-lab",
    version,
    about = "Gradient-variance experiments for dissipative perceptron quantum neural networks",
    after_help = "Flags override values from --config. Defaults per command:\n  \
        variance-sweep: --family global-deep --cost global --scheme rpqc, --n and --samples required\n  \
        toy-model: --n 2..5 --cost both --samples 100000\n  \
        matrix-flow: --family global-deep --cost global --n 2..4 --samples 10000\n  \
        verify-moments: --n 1..2 (unitary dimensions 2^n) --samples 100000 --instances 1\n  \
        bound-table: --n 1..20\n  \
        verify-gradients: --n 4 (brick width of the circuit checks) --instances 50 (shift checks per family;\n    \
        20 flow checks; 100 circuit checks per width)\n\
        Brick networks (local-m2) use two layers and skip odd n. Registers above 14 qubits are refused (exit 3).\n\
        Exit codes: 0 success, 1 failed verification or simulation error, 2 usage error, 3 resource guard."
)]
pub struct Cli {
    /// Command to run; may instead come from the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON config file; keys as in the embedded config of an output file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Network family, comma separated for several.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub family: Option<Vec<FamilyArg>>,
    #[arg(long, value_enum)]
    pub cost: Option<CostArg>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Width range `a..b` (inclusive) or a single width.
    #[arg(long, value_parser = parse_range)]
    pub n: Option<(usize, usize)>,
    /// Monte-Carlo samples per cell (at least 100).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Training pairs per sample.
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "PLATEAU_LAB_WORKERS")]
    pub workers: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Record per-cell wall time (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Haar-random inputs on the whole input register instead of product states.
    #[arg(long)]
    pub entangled_inputs: bool,
    /// Random operand sets or instances for the verify commands.
    #[arg(long)]
    pub instances: Option<usize>,
}

/// Every key a config file may carry. Also the shape of the embedded config.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub families: Option<Vec<FamilyArg>>,
    pub cost_kind: Option<CostArg>,
    pub scheme: Option<SchemeArg>,
    pub samples: Option<usize>,
    pub training_pairs: Option<usize>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub timing: Option<bool>,
    pub entangled_inputs: Option<bool>,
    pub instances: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// Validated settings for one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n_min: usize,
    pub n_max: usize,
    pub families: Vec<FamilyArg>,
    pub cost_kind: CostArg,
    pub scheme: SchemeArg,
    pub samples: usize,
    pub training_pairs: usize,
    pub seed: u64,
    /// Not embedded in outputs: results do not depend on it.
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub entangled_inputs: bool,
    pub instances: usize,
}

struct Defaults {
    n: Option<(usize, usize)>,
    families: Vec<FamilyArg>,
    cost: CostArg,
    scheme: SchemeArg,
    samples: Option<usize>,
    instances: usize,
}

fn defaults(command: Command) -> Defaults {
    let base = Defaults {
        n: None,
        families: vec![FamilyArg::GlobalDeep],
        cost: CostArg::Global,
        scheme: SchemeArg::Rpqc,
        samples: None,
        instances: 1,
    };
    match command {
        Command::VarianceSweep => base,
        Command::ToyModel => Defaults {
            n: Some((2, 5)),
            families: vec![FamilyArg::LocalM1],
            cost: CostArg::Both,
            samples: Some(100_000),
            ..base
        },
        Command::MatrixFlow => Defaults {
            n: Some((2, 4)),
            scheme: SchemeArg::MatrixFlow,
            samples: Some(10_000),
            ..base
        },
        Command::VerifyMoments => Defaults {
            n: Some((1, 2)),
            samples: Some(100_000),
            ..base
        },
        Command::BoundTable => Defaults {
            n: Some((1, 20)),
            ..base
        },
        Command::VerifyGradients => Defaults {
            n: Some((4, 4)),
            instances: 50,
            ..base
        },
    }
}

/// Smallest sample count accepted by the statistical commands.
pub const MIN_SAMPLES: usize = 100;

/// Merges flags over the config file (if any) over per-command defaults.
pub fn resolve(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let command = cli.command.or(file.command).ok_or_else(|| {
        CliError::Usage("missing command (give one or set 'command' in --config)".into())
    })?;
    let d = defaults(command);
    let file_n = match (file.n_min, file.n_max) {
        (Some(a), Some(b)) => Some((a, b)),
        (Some(a), None) | (None, Some(a)) => Some((a, a)),
        (None, None) => None,
    };
    let (n_min, n_max) =
        cli.n.or(file_n).or(d.n).ok_or_else(|| {
            CliError::Usage(format!("missing required 'n' for {}", command.name()))
        })?;
    let samples = match cli.samples.or(file.samples).or(d.samples) {
        Some(s) => s,
        None if command.statistical() => {
            return Err(CliError::Usage(format!(
                "missing required 'samples' for {}",
                command.name()
            )))
        }
        None => 0,
    };
    let cfg = ExperimentConfig {
        command,
        n_min,
        n_max,
        families: cli.family.or(file.families).unwrap_or(d.families),
        cost_kind: cli.cost.or(file.cost_kind).unwrap_or(d.cost),
        scheme: cli.scheme.or(file.scheme).unwrap_or(d.scheme),
        samples,
        training_pairs: cli.pairs.or(file.training_pairs).unwrap_or(1),
        seed: cli.seed.or(file.seed).unwrap_or(0),
        workers: cli.workers.or(file.workers).unwrap_or(0),
        output_path: cli.out.or(file.output_path),
        format: cli.format.or(file.format).unwrap_or_default(),
        timing: cli.timing || file.timing.unwrap_or(false),
        entangled_inputs: cli.entangled_inputs || file.entangled_inputs.unwrap_or(false),
        instances: cli.instances.or(file.instances).unwrap_or(d.instances),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.n_min > self.n_max {
            return usage(format!(
                "'n_min' ({}) exceeds 'n_max' ({})",
                self.n_min, self.n_max
            ));
        }
        if self.n_min == 0 {
            return usage("'n_min' must be at least 1".into());
        }
        if self.command.statistical() && self.samples < MIN_SAMPLES {
            return usage(format!(
                "'samples' is {}; need at least {MIN_SAMPLES}",
                self.samples
            ));
        }
        if self.training_pairs == 0 {
            return usage("'training_pairs' must be at least 1".into());
        }
        if self.families.is_empty() {
            return usage("'families' is empty".into());
        }
        if self.instances == 0 {
            return usage("'instances' must be at least 1".into());
        }
        Ok(())
    }

    /// The embedded form: a config file without workers or output path.
    pub fn embedded(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<ExperimentConfig, CliError> {
        let mut argv = vec!["plateau-lab"];
        argv.extend_from_slice(args);
        resolve(Cli::try_parse_from(argv).unwrap())
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("2..5"), Ok((2, 5)));
        assert_eq!(parse_range("2..=5"), Ok((2, 5)));
        assert_eq!(parse_range("4"), Ok((4, 4)));
        assert!(parse_range("a..3").is_err());
    }

    #[test]
    fn sweep_flags() {
        let c = parse(&[
            "variance-sweep",
            "--family",
            "local-m1",
            "--cost",
            "global",
            "--n",
            "2..5",
            "--samples",
            "100000",
            "--seed",
            "7",
        ])
        .unwrap();
        assert_eq!((c.n_min, c.n_max, c.samples, c.seed), (2, 5, 100_000, 7));
        assert_eq!(c.families, [FamilyArg::LocalM1]);
        assert_eq!(c.cost_kind, CostArg::Global);
    }

    #[test]
    fn usage_errors() {
        assert!(
            matches!(parse(&["variance-sweep", "--n", "2..3"]), Err(CliError::Usage(m)) if m.contains("samples"))
        );
        assert!(matches!(
            parse(&["variance-sweep", "--n", "3..2", "--samples", "100"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            parse(&["toy-model", "--samples", "99"]),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(parse(&[]), Err(CliError::Usage(_))));
    }

    #[test]
    fn command_defaults() {
        let t = parse(&["toy-model"]).unwrap();
        assert_eq!(
            (t.n_min, t.n_max, t.samples, t.cost_kind),
            (2, 5, 100_000, CostArg::Both)
        );
        assert!(parse(&["bound-table"]).is_ok());
        assert_eq!(parse(&["verify-gradients"]).unwrap().instances, 50);
    }

    #[test]
    fn embedded_config_omits_run_settings() {
        let c = parse(&["toy-model", "--workers", "3", "--out", "x.csv"]).unwrap();
        let v = c.embedded();
        assert!(v.get("workers").is_none() && v.get("output_path").is_none());
        let back: ConfigFile = serde_json::from_value(v).unwrap();
        assert_eq!(back.samples, Some(100_000));
        assert_eq!(back.command, Some(Command::ToyModel));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = serde_json::from_str::<ConfigFile>(r#"{"samples": 100, "sample_count": 3}"#)
            .unwrap_err();
        assert!(e.to_string().contains("sample_count"));
    }
}
