use std::fs;
use std::path::{Path, PathBuf};

use lacsum_core::clt::{
    cartesian_grid, clt_report_with_marginals, default_grid, limit_value, normal_cdf, Marginals, LIMIT_VARIANCE,
};
use lacsum_core::search::{anneal_sigma_with, fit_rate, summarize_study};
use lacsum_core::{
    convergence_study, evaluate_sum, exhaustive_sigma, holder_lower_bound, l1_auto, l1_monte_carlo,
    lacunary_set, lp_norm_quadrature, mian_chowla, FrequencySet, McConfig, MuNu, QuadratureConfig,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::CliError;
use crate::output::{float, to_json, with_schema};

/// What a command produced: the payload kept in the run record, and the text
/// printed on stdout (usually the payload itself).
pub struct Output {
    pub payload: Value,
    pub stdout: String,
}

impl Output {
    fn json(payload: Value) -> Self {
        let stdout = to_json(&payload);
        Output { payload, stdout }
    }
}

/// Fills in everything a replay needs: fresh seeds, and the contents of
/// `--freqs-file` as an explicit list.
pub fn resolve(cmd: &mut Command) -> Result<Vec<u64>, CliError> {
    fn fresh(seed: &mut Option<u64>) -> u64 {
        *seed.get_or_insert_with(rand::random)
    }
    fn inline_file(set: &mut FreqArgs) -> Result<(), CliError> {
        if let Some(path) = set.freqs_file.take() {
            let fs = read_freqs_file(&path)?;
            let list: Vec<String> = fs.freqs().iter().map(u64::to_string).collect();
            set.freqs = Some(list.join(","));
        }
        Ok(())
    }
    let seeds = match cmd {
        Command::Eval(a) => {
            inline_file(&mut a.set)?;
            vec![]
        }
        Command::Energy(a) => {
            inline_file(&mut a.set)?;
            vec![]
        }
        Command::Norms(a) => {
            inline_file(&mut a.set)?;
            if a.method == NormMethod::Quad {
                vec![]
            } else {
                vec![fresh(&mut a.mc.seed)]
            }
        }
        Command::Clt(a) => {
            inline_file(&mut a.set)?;
            vec![fresh(&mut a.mc.seed)]
        }
        Command::Search(a) => match a.mode {
            SearchMode::Anneal => vec![fresh(&mut a.seed)],
            SearchMode::Exhaustive => vec![],
        },
        Command::Study(a) => vec![fresh(&mut a.mc.seed)],
        Command::Sidon(_) | Command::Replay(_) => vec![],
    };
    Ok(seeds)
}

fn read_freqs_file(path: &Path) -> Result<FrequencySet, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    FrequencySet::parse_file_format(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn frequency_set(set: &FreqArgs) -> Result<FrequencySet, CliError> {
    if let Some(list) = &set.freqs {
        return Ok(list.parse::<FrequencySet>()?);
    }
    if let Some(path) = &set.freqs_file {
        return read_freqs_file(path);
    }
    if let Some(spec) = &set.lacunary {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        let parsed = match parts.as_slice() {
            [q, n] => q.parse::<u64>().ok().zip(n.parse::<u32>().ok()),
            _ => None,
        };
        let (q, n) = parsed.ok_or_else(|| CliError::Usage(format!("--lacunary expects q,n, got {spec:?}")))?;
        if q < 2 || n == 0 {
            return Err(CliError::Usage(format!("--lacunary needs q >= 2 and n >= 1, got {spec:?}")));
        }
        return Ok(lacunary_set(q, n)?);
    }
    Err(CliError::Usage("one of --freqs, --freqs-file, --lacunary is required".into()))
}

fn mc_config(a: &McArgs) -> McConfig {
    McConfig {
        samples: a.samples,
        seed: a.seed.expect("seed resolved before running"),
        chunk_size: a.chunk_size,
        antithetic: a.antithetic,
    }
}

/// Runs `cmd`. File outputs (`--report`, `--csv`) are written only when
/// `side_effects` is set.
pub fn execute(cmd: &Command, side_effects: bool) -> Result<Output, CliError> {
    match cmd {
        Command::Eval(a) => eval(a),
        Command::Norms(a) => norms(a),
        Command::Energy(a) => energy(a),
        Command::Sidon(a) => sidon(a),
        Command::Clt(a) => clt(a, side_effects),
        Command::Search(a) => search(a),
        Command::Study(a) => study(a, side_effects),
        Command::Replay(_) => unreachable!("replay is dispatched by main"),
    }
}

fn eval(a: &EvalArgs) -> Result<Output, CliError> {
    if !a.theta.is_finite() {
        return Err(CliError::Usage(format!("theta must be finite, got {}", a.theta)));
    }
    let fs = frequency_set(&a.set)?;
    let s = evaluate_sum(&fs, a.theta);
    let m = MuNu::from_sum(s, fs.len());
    Ok(Output::json(json!({
        "schema": 1,
        "n": fs.len(),
        "theta": a.theta,
        "re": s.re,
        "im": s.im,
        "abs": s.norm(),
        "mu": m.mu,
        "nu": m.nu,
    })))
}

fn norms(a: &NormsArgs) -> Result<Output, CliError> {
    let fs = frequency_set(&a.set)?;
    let quad = QuadratureConfig { points_per_period: a.points_per_period, ..Default::default() };
    let est = match a.method {
        NormMethod::Quad => lp_norm_quadrature(&fs, a.p, &quad)?,
        NormMethod::Mc => {
            if a.p != 1 {
                return Err(CliError::Usage("--method mc supports --p 1 only".into()));
            }
            l1_monte_carlo(&fs, &mc_config(&a.mc))?
        }
        NormMethod::Auto => {
            if a.p == 1 {
                l1_auto(&fs, a.tol, a.mc.seed.expect("seed resolved"))?
            } else {
                lp_norm_quadrature(&fs, a.p, &quad)?
            }
        }
    };
    Ok(Output::json(with_schema(&est)))
}

fn energy(a: &EnergyArgs) -> Result<Output, CliError> {
    let fs = frequency_set(&a.set)?;
    let cert = holder_lower_bound(&fs)?;
    Ok(Output::json(with_schema(&cert)))
}

fn sidon(a: &SidonArgs) -> Result<Output, CliError> {
    let fs = mian_chowla(a.n)?;
    let cert = holder_lower_bound(&fs)?;
    let payload = json!({
        "schema": 1,
        "n": a.n,
        "freqs": fs.freqs(),
        "energy": cert.energy,
        "normalized_lower_bound": cert.normalized_lower_bound,
    });
    if a.json {
        return Ok(Output::json(payload));
    }
    let stdout = format!("# Mian-Chowla sequence, first {} terms\n{}", a.n, fs.to_file_format());
    Ok(Output { payload, stdout })
}

fn phi_grid(spec: &str) -> Result<Vec<(f64, f64)>, CliError> {
    match spec.trim() {
        "default" => Ok(default_grid()),
        "none" => Ok(vec![]),
        list => {
            let values = list
                .split(',')
                .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| CliError::Usage(format!("--phi-grid: expected default, none or numbers, got {list:?}")))?;
            Ok(cartesian_grid(&values))
        }
    }
}

fn clt(a: &CltArgs, side_effects: bool) -> Result<Output, CliError> {
    let fs = frequency_set(&a.set)?;
    let grid = phi_grid(&a.phi_grid)?;
    let (report, marginals) = clt_report_with_marginals(&fs, &mc_config(&a.mc), &grid, a.chain_audit)?;
    let out = Output::json(with_schema(&report));
    if side_effects {
        if let Some(path) = &a.report {
            write(path, &out.stdout)?;
        }
        if let Some(path) = &a.csv {
            let mut phi = String::from("s,t,re,im,std_error,gaussian,deviation\n");
            for p in &report.phi_grid {
                let row = [p.s, p.t, p.phi.re, p.phi.im, p.std_error, p.gaussian, p.deviation()];
                phi.push_str(&csv_row(&row));
            }
            write(path, &phi)?;
            write(&ecdf_path(path), &ecdf_csv(&marginals))?;
        }
    }
    Ok(out)
}

/// `out.csv` → `out.ecdf.csv`
pub fn ecdf_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.ecdf.csv"))
}

const ECDF_ROWS: usize = 1000;

/// Evenly spaced order statistics of both marginals next to the limiting CDF.
fn ecdf_csv(m: &Marginals) -> String {
    let mut out = String::from("p,mu,cdf_mu,nu,cdf_nu\n");
    let len = m.mu.len();
    if len == 0 {
        return out;
    }
    let rows = ECDF_ROWS.min(len);
    for i in 0..rows {
        let idx = if rows == 1 { len - 1 } else { i * (len - 1) / (rows - 1) };
        let p = (idx + 1) as f64 / len as f64;
        let (mu, nu) = (m.mu[idx], m.nu[idx]);
        out.push_str(&csv_row(&[p, mu, normal_cdf(mu, LIMIT_VARIANCE), nu, normal_cdf(nu, LIMIT_VARIANCE)]));
    }
    out
}

fn csv_row(values: &[f64]) -> String {
    let row: Vec<String> = values.iter().map(|&v| float(v)).collect();
    row.join(",") + "\n"
}

fn search(a: &SearchArgs) -> Result<Output, CliError> {
    let cfg = QuadratureConfig { points_per_period: a.points_per_period, ..Default::default() };
    let result = match a.mode {
        SearchMode::Exhaustive => exhaustive_sigma(a.n, a.max_freq, &cfg)?,
        SearchMode::Anneal => anneal_sigma_with(a.n, a.max_freq, a.budget, a.seed.expect("seed resolved"), &cfg)?,
    };
    let cert = holder_lower_bound(&result.best_set)?;
    let mut payload = with_schema(&result);
    payload["certificate"] = serde_json::to_value(cert).expect("certificate serializes");
    Ok(Output::json(payload))
}

fn study(a: &StudyArgs, side_effects: bool) -> Result<Output, CliError> {
    if a.q < 2 || a.n_list.is_empty() || a.n_list.contains(&0) {
        return Err(CliError::Usage("study needs --q >= 2 and a non-empty --n-list of positive n".into()));
    }
    let mc = mc_config(&a.mc);
    let rows = convergence_study(a.q, &a.n_list, &mc)?;
    let payload = json!({
        "schema": 1,
        "q": a.q,
        "samples": mc.evaluations(),
        "seed": mc.seed,
        "limit": limit_value(),
        "rows": rows,
        "summary": summarize_study(&rows),
        "rate_fit": fit_rate(&rows),
    });
    if side_effects {
        if let Some(path) = &a.csv {
            let mut csv = String::from("n,normalized_l1,std_error,gap_to_limit\n");
            for r in &rows {
                csv.push_str(&format!("{},", r.n));
                csv.push_str(&csv_row(&[r.normalized_l1, r.std_error, r.gap_to_limit]));
            }
            write(path, &csv)?;
        }
    }
    Ok(Output::json(payload))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
