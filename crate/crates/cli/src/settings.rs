//! Flag parsing and the flag > config file > default merge.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

pub const DEFAULT_R: f64 = 1.0;
pub const DEFAULT_MODES: usize = 32;
pub const DEFAULT_GRID: usize = 512;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_K: u32 = 1;
pub const DEFAULT_AMPLITUDE: f64 = 0.02;
pub const DEFAULT_PAIRS: usize = 200;
pub const DEFAULT_MAX_ITER: usize = 50;

/// Circular integral invariant experiments.
///
/// Without --curve the input curve is a random normalized perturbed circle
/// drawn from --seed and --amplitude (amplitude 0 gives the unit circle).
/// Artifacts are written only when --out is given. Values in a --config JSON
/// file (same keys as the flags, with max_iter for --max-iter) are overridden
/// by flags.
#[derive(Debug, Parser)]
#[command(name = "circinv", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Invariant profile of the input curve
    Invariant,
    /// Analytic profile against the polygon oracle
    OracleCompare,
    /// Derivative against central finite differences
    DerivativeCheck,
    /// Eigenvalues of the derivative at the unit circle
    Spectrum,
    /// Operator matrix, singular values and constrained margin
    Injectivity,
    /// Gauss–Newton recovery of the input curve from its invariant
    Reconstruct,
    /// Empirical stability constant over random curve pairs
    Stability,
    /// Rigid-motion, reparameterization and scaling checks
    InvarianceSuite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Invariant => "invariant",
            Command::OracleCompare => "oracle-compare",
            Command::DerivativeCheck => "derivative-check",
            Command::Spectrum => "spectrum",
            Command::Injectivity => "injectivity",
            Command::Reconstruct => "reconstruct",
            Command::Stability => "stability",
            Command::InvarianceSuite => "invariance-suite",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Disk radius [default: 1]
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Fourier modes per coordinate [default: 32]
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    /// Grid points, at least 4 × modes [default: 512]
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Input curve JSON
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,
    /// Artifact directory, created if missing
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Random seed [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Derivative order of the stability norms [default: 1]
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Radial perturbation amplitude of random curves [default: 0.02]
    #[arg(long, global = true)]
    pub amplitude: Option<f64>,
    /// Curve pairs for stability [default: 200]
    #[arg(long, global = true)]
    pub pairs: Option<usize>,
    /// Gauss–Newton iteration cap [default: 50]
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// JSON config file
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl Flags {
    /// Fields set here win over `base`.
    fn over(self, base: Flags) -> Flags {
        Flags {
            r: self.r.or(base.r),
            modes: self.modes.or(base.modes),
            grid: self.grid.or(base.grid),
            curve: self.curve.or(base.curve),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            k: self.k.or(base.k),
            amplitude: self.amplitude.or(base.amplitude),
            pairs: self.pairs.or(base.pairs),
            max_iter: self.max_iter.or(base.max_iter),
            config: None,
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub r: f64,
    pub modes: usize,
    pub grid: usize,
    pub curve: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub k: u32,
    pub amplitude: f64,
    pub pairs: usize,
    pub max_iter: usize,
}

fn read_config(path: &Path) -> Result<Flags, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut file: Flags = serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?;
    // relative paths in the file are taken relative to the file
    let dir = path.parent().unwrap_or(Path::new(""));
    file.curve = file.curve.map(|p| dir.join(p));
    file.out = file.out.map(|p| dir.join(p));
    Ok(file)
}

/// Merge flags over the config file over defaults, then validate.
pub fn resolve(flags: Flags) -> Result<Settings, String> {
    let file = match &flags.config {
        Some(path) => read_config(path)?,
        None => Flags::default(),
    };
    let f = flags.over(file);
    let s = Settings {
        r: f.r.unwrap_or(DEFAULT_R),
        modes: f.modes.unwrap_or(DEFAULT_MODES),
        grid: f.grid.unwrap_or(DEFAULT_GRID),
        curve: f.curve,
        out: f.out,
        seed: f.seed.unwrap_or(DEFAULT_SEED),
        k: f.k.unwrap_or(DEFAULT_K),
        amplitude: f.amplitude.unwrap_or(DEFAULT_AMPLITUDE),
        pairs: f.pairs.unwrap_or(DEFAULT_PAIRS),
        max_iter: f.max_iter.unwrap_or(DEFAULT_MAX_ITER),
    };
    if !(s.r.is_finite() && s.r > 0.0) {
        return Err(format!("--r must be positive, got {}", s.r));
    }
    if s.modes == 0 {
        return Err("--modes must be at least 1".into());
    }
    if s.grid < 4 * s.modes {
        return Err(format!(
            "--grid {} must be at least 4 × modes = {}",
            s.grid,
            4 * s.modes
        ));
    }
    if !(s.amplitude.is_finite() && s.amplitude >= 0.0) {
        return Err(format!("--amplitude must be non-negative, got {}", s.amplitude));
    }
    if s.pairs == 0 {
        return Err("--pairs must be at least 1".into());
    }
    if s.max_iter == 0 {
        return Err("--max-iter must be at least 1".into());
    }
    Ok(s)
}
