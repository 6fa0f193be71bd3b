use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gbc_tin::{db_to_linear, MiMethod, RateMode, DEFAULT_MC_SAMPLES, DEFAULT_QUAD_ORDER, DEFAULT_SEED};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Mc,
    Lb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("bad seed `{s}`: {e}"))
}

/// Flags shared by every sweep command. Unset flags fall back to the config
/// file, then to the per-command defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat `key = value` file; keys mirror the long flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr1_db: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr2_db: Option<f64>,
    /// Number of α samples per modulation-order pair.
    #[arg(long)]
    pub alpha_grid: Option<usize>,
    /// Number of time-sharing weights per segment.
    #[arg(long)]
    pub lambda_grid: Option<usize>,
    #[arg(long, value_enum)]
    pub mi_method: Option<MethodArg>,
    #[arg(long)]
    pub quad_order: Option<usize>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Decimal or `0x`-prefixed hex.
    #[arg(long, value_parser = parse_seed)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Fully resolved settings. SNRs are converted to linear scale here and nowhere else.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub snr1: f64,
    pub snr2: f64,
    pub alpha_grid_size: usize,
    pub lambda_grid_size: usize,
    pub mi_method: MethodArg,
    pub quad_order: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: Format,
}

/// Per-command fallbacks.
#[derive(Debug, Clone, Copy)]
pub struct Defaults {
    pub snr1_db: f64,
    pub snr2_db: f64,
    pub alpha_grid_size: usize,
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, defaults: Defaults) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let snr1_db = pick(args.snr1_db, file.get("snr1_db")?, defaults.snr1_db);
        let snr2_db = pick(args.snr2_db, file.get("snr2_db")?, defaults.snr2_db);
        let cfg = Self {
            snr1_db,
            snr2_db,
            snr1: db_to_linear(snr1_db),
            snr2: db_to_linear(snr2_db),
            alpha_grid_size: pick(args.alpha_grid, file.get("alpha_grid")?, defaults.alpha_grid_size),
            lambda_grid_size: pick(args.lambda_grid, file.get("lambda_grid")?, 33),
            mi_method: pick(
                args.mi_method,
                file.get_with("mi_method", |s| MethodArg::from_str(s, true))?,
                MethodArg::Quad,
            ),
            quad_order: pick(args.quad_order, file.get("quad_order")?, DEFAULT_QUAD_ORDER),
            mc_samples: pick(args.mc_samples, file.get("mc_samples")?, DEFAULT_MC_SAMPLES),
            seed: pick(args.seed, file.get_with("seed", parse_seed)?, DEFAULT_SEED),
            out_dir: pick(
                args.out.clone(),
                file.get_with("out", |s| Ok::<_, String>(PathBuf::from(s)))?,
                PathBuf::from("."),
            ),
            format: pick(
                args.format,
                file.get_with("format", |s| Format::from_str(s, true))?,
                Format::Csv,
            ),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.snr1_db > self.snr2_db) {
            return Err(CliError::Config(format!(
                "snr1-db ({}) must exceed snr2-db ({})",
                self.snr1_db, self.snr2_db
            )));
        }
        if self.alpha_grid_size < 2 || self.lambda_grid_size < 2 {
            return Err(CliError::Config("grid sizes must be at least 2".into()));
        }
        Ok(())
    }

    pub fn method(&self) -> MiMethod {
        match self.mi_method {
            MethodArg::Mc => MiMethod::MonteCarlo {
                samples: self.mc_samples,
                seed: self.seed,
            },
            _ => MiMethod::Quadrature { order: self.quad_order },
        }
    }

    pub fn rate_mode(&self) -> RateMode {
        match self.mi_method {
            MethodArg::Lb => RateMode::ClosedForm,
            _ => RateMode::Exact(self.method()),
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[derive(Debug, Default)]
struct ConfigFile {
    path: PathBuf,
    entries: BTreeMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "snr1_db",
    "snr2_db",
    "alpha_grid",
    "lambda_grid",
    "mi_method",
    "quad_order",
    "mc_samples",
    "seed",
    "out",
    "format",
];

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut entries = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("{}:{}: expected `key = value`", path.display(), n + 1)))?;
            let key = k.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "{}:{}: unknown key `{}`",
                    path.display(),
                    n + 1,
                    k.trim()
                )));
            }
            entries.insert(key, v.trim().to_string());
        }
        Ok(Self {
            path: path.to_path_buf(),
            entries,
        })
    }

    fn get_with<T, E: std::fmt::Display>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Option<T>, CliError> {
        self.entries
            .get(key)
            .map(|v| {
                parse(v).map_err(|e| CliError::Config(format!("{}: bad value for `{key}`: {e}", self.path.display())))
            })
            .transpose()
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get_with(key, str::parse::<T>)
    }
}
