use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "lacsum", version, about = "L1 norms of exponential sums and the lacunary CLT")]
pub struct Cli {
    /// Directory that receives run records.
    #[arg(long, global = true, default_value = "runs")]
    pub runs_dir: PathBuf,
    /// Do not write a run record.
    #[arg(long, global = true)]
    pub no_record: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Evaluate S(θ) at one point.
    Eval(EvalArgs),
    /// L^p norm by quadrature or Monte Carlo.
    Norms(NormsArgs),
    /// Additive energy and the Hölder lower bound.
    Energy(EnergyArgs),
    /// Print a prefix of the Mian–Chowla sequence in the frequency-set file format.
    Sidon(SidonArgs),
    /// Central limit diagnostics for (μ, ν).
    Clt(CltArgs),
    /// Search for sets with large normalized L1 norm.
    Search(SearchArgs),
    /// Convergence study along q^1, …, q^n.
    Study(StudyArgs),
    /// Re-run a recorded run and compare payloads.
    #[serde(skip)]
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Norms(_) => "norms",
            Command::Energy(_) => "energy",
            Command::Sidon(_) => "sidon",
            Command::Clt(_) => "clt",
            Command::Search(_) => "search",
            Command::Study(_) => "study",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct FreqArgs {
    /// Comma-separated frequencies, e.g. 1,2,5.
    #[arg(long)]
    pub freqs: Option<String>,
    /// File with one frequency per line; `#` starts a comment.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freqs_file: Option<PathBuf>,
    /// `q,n` for the set {q, q², …, qⁿ}.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lacunary: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: FreqArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMethod {
    Auto,
    Quad,
    Mc,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct McArgs {
    /// Number of samples; accepts forms like 1e7.
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub samples: u64,
    /// RNG seed; a fresh one is drawn and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = parse_count, default_value = "65536")]
    pub chunk_size: u64,
    /// Pair θ with 1 − θ.
    #[arg(long)]
    pub antithetic: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NormsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: FreqArgs,
    /// 1, 2 or 4.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: NormMethod,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    /// Target accuracy for `--method auto`.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long, default_value_t = 32)]
    pub points_per_period: u64,
    /// JSON is the default output; accepted for compatibility.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EnergyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: FreqArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SidonArgs {
    #[arg(long)]
    pub n: usize,
    /// Print JSON instead of the file format.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub set: FreqArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    /// `default`, `none`, or comma-separated values whose square is the grid.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    pub phi_grid: String,
    #[arg(long)]
    pub chain_audit: bool,
    /// Also write the report JSON here.
    #[arg(long)]
    #[serde(skip)]
    pub report: Option<PathBuf>,
    /// Write the φ grid here, and the marginal ECDF next to it as `<stem>.ecdf.csv`.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Anneal,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub max_freq: u64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: SearchMode,
    /// Annealing steps.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub budget: u64,
    /// Annealing seed; a fresh one is drawn and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 32)]
    pub points_per_period: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StudyArgs {
    #[arg(long, default_value_t = 8)]
    pub q: u64,
    #[arg(long, value_delimiter = ',', default_value = "4,8,12,16")]
    pub n_list: Vec<u32>,
    #[command(flatten)]
    #[serde(flatten)]
    pub mc: McArgs,
    /// Write the rows as CSV here.
    #[arg(long)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Run directory (or its record.json).
    pub run: PathBuf,
}

/// Non-negative integer, also in exponent form (`1e7`, `2.5e6`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if !v.is_finite() || v < 0.0 || v.fract() != 0.0 || v >= 18_446_744_073_709_551_616.0 {
        return Err(format!("not a non-negative integer: {s:?}"));
    }
    Ok(v as u64)
}
