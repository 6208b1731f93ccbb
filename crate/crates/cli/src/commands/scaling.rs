use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use dwlab_core::observables::DiscordOptions;
use dwlab_core::scaling::{
    fit_position_exponent, fit_value_scaling, locate_peaks, Observable, ObservableSet, ScalingFit,
    ScalingModel, ScanConfig, ScanField, DEFAULT_LAMBDA_STAR, DEFAULT_PROMINENCE,
    DEFAULT_REFINE_NODES,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::parse_list;
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, Cell, Format, Progress, Run, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Every prominent χ peak, tracked by order in λ.
    ChiPeaks,
    /// Highest discord maximum.
    DiscordPeak,
    /// Highest mutual-information maximum.
    MutualInfoPeak,
}

impl Target {
    fn field(self) -> ScanField {
        match self {
            Target::ChiPeaks => ScanField::ChiFd,
            Target::DiscordPeak => ScanField::Discord,
            Target::MutualInfoPeak => ScanField::MutualInfo,
        }
    }

    fn default_window(self) -> (f64, f64, usize, usize) {
        match self {
            Target::ChiPeaks => (1.8, 2.5, 500, DEFAULT_REFINE_NODES),
            _ => (1.95, 2.25, 61, 41),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    /// Tilt V0; required unless --from-table is given.
    #[arg(long)]
    pub v0: Option<f64>,
    /// Comma list of particle numbers (at least 3).
    #[arg(long)]
    pub n_list: Option<String>,
    #[arg(long, value_enum, default_value_t = Target::ChiPeaks)]
    pub target: Target,
    /// `min,max` of the coarse λ grid.
    #[arg(long)]
    pub lambda_window: Option<String>,
    /// Coarse λ nodes [default: 500 for chi-peaks, 61 otherwise].
    #[arg(long)]
    pub steps: Option<usize>,
    /// Nodes of the refinement scan around each peak.
    #[arg(long)]
    pub refine_nodes: Option<usize>,
    /// Relative prominence [default: 0.05 for chi-peaks, 0 otherwise].
    #[arg(long)]
    pub prominence: Option<f64>,
    /// Limit point of the peak positions.
    #[arg(long, default_value_t = DEFAULT_LAMBDA_STAR)]
    pub lambda_star: f64,
    /// Intervals per angle in the discord measurement search.
    #[arg(long, default_value_t = 100)]
    pub discord_grid: usize,
    /// Fit a CSV peak table (columns n, lambda_max, height, optional peak)
    /// instead of computing one.
    #[arg(long)]
    pub from_table: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeakRow {
    pub n: usize,
    #[serde(default)]
    pub peak: usize,
    pub lambda_max: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub peak: usize,
    pub quantity: &'static str,
    pub model: &'static str,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub exponent: f64,
}

impl FitRow {
    fn new(peak: usize, quantity: &'static str, fit: &ScalingFit) -> Self {
        Self {
            peak,
            quantity,
            model: match fit.model {
                ScalingModel::PowerLaw => "power-law",
                ScalingModel::Exponential => "exponential",
            },
            slope: fit.fit.slope,
            intercept: fit.fit.intercept,
            r_squared: fit.fit.r_squared,
            exponent: fit.exponent,
        }
    }
}

fn read_table(path: &Path) -> CliResult<Vec<PeakRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Usage(format!("--from-table {}: {e}", path.display())))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| CliError::Usage(format!("--from-table {}: {e}", path.display()))))
        .collect()
}

fn compute_table(args: &ScalingArgs, ns: &[usize], progress: &Progress) -> CliResult<Vec<PeakRow>> {
    let v0 = args
        .v0
        .ok_or_else(|| CliError::Usage("--v0 is required without --from-table".into()))?;
    let (mut lo, mut hi, steps, refine) = args.target.default_window();
    if let Some(w) = &args.lambda_window {
        match parse_list::<f64>(w, "--lambda-window")?.as_slice() {
            [a, b] => (lo, hi) = (*a, *b),
            _ => return Err(CliError::Usage("--lambda-window takes min,max".into())),
        }
    }
    let steps = args.steps.unwrap_or(steps);
    let refine = args.refine_nodes.unwrap_or(refine);
    let prominence = args.prominence.unwrap_or(match args.target {
        Target::ChiPeaks => DEFAULT_PROMINENCE,
        _ => 0.0,
    });
    if !(prominence >= 0.0) {
        return Err(CliError::Usage("--prominence must be >= 0".into()));
    }
    let observable = match args.target {
        Target::ChiPeaks => Observable::Chi,
        _ => Observable::Correlations,
    };

    let mut configs = Vec::with_capacity(ns.len());
    for &n in ns {
        let mut c =
            ScanConfig::new(n, v0, lo, hi, steps).with_observables(ObservableSet::only(observable));
        c.discord = DiscordOptions {
            grid_intervals: args.discord_grid,
            refine: true,
        };
        c.validate()?;
        configs.push(c);
    }

    let mut rows = Vec::new();
    let mut count = None;
    for c in &configs {
        let mut peaks = locate_peaks(c, args.target.field(), prominence, refine)?;
        if args.target != Target::ChiPeaks {
            peaks.sort_by(|a, b| b.height.total_cmp(&a.height));
            peaks.truncate(1);
        }
        progress.note(&format!(
            "N={}: {} peak(s) {:?}",
            c.n_particles,
            peaks.len(),
            peaks.iter().map(|p| p.lambda_max).collect::<Vec<_>>()
        ));
        if peaks.is_empty() {
            return Err(CliError::Numerical(format!(
                "no peak found for N={}",
                c.n_particles
            )));
        }
        match count {
            Some(k) if k != peaks.len() => {
                return Err(CliError::Numerical(format!(
                    "peak count changes with N ({k} vs {} at N={}); cannot pair peaks",
                    peaks.len(),
                    c.n_particles
                )))
            }
            _ => count = Some(peaks.len()),
        }
        rows.extend(peaks.iter().enumerate().map(|(i, p)| PeakRow {
            n: c.n_particles,
            peak: i,
            lambda_max: p.lambda_max,
            height: p.height,
        }));
    }
    Ok(rows)
}

fn fits(rows: &[PeakRow], lambda_star: f64) -> CliResult<Vec<FitRow>> {
    let mut peaks: Vec<usize> = rows.iter().map(|r| r.peak).collect();
    peaks.sort_unstable();
    peaks.dedup();
    let mut out = Vec::new();
    for p in peaks {
        let mut series: Vec<&PeakRow> = rows.iter().filter(|r| r.peak == p).collect();
        series.sort_by_key(|r| r.n);
        let ns: Vec<usize> = series.iter().map(|r| r.n).collect();
        if ns.len() < 3 {
            return Err(CliError::Usage(format!("peak {p} has fewer than 3 sizes")));
        }
        let lm: Vec<f64> = series.iter().map(|r| r.lambda_max).collect();
        let h: Vec<f64> = series.iter().map(|r| r.height).collect();
        out.push(FitRow::new(
            p,
            "position",
            &fit_position_exponent(&ns, &lm, lambda_star)?,
        ));
        for model in [ScalingModel::PowerLaw, ScalingModel::Exponential] {
            out.push(FitRow::new(
                p,
                "height",
                &fit_value_scaling(&ns, &h, model)?.fit,
            ));
        }
    }
    Ok(out)
}

fn encode(rows: &[PeakRow], fit_rows: &[FitRow], format: Format) -> CliResult<Vec<u8>> {
    match format {
        Format::Json => json_bytes(&json!({ "peaks": rows, "fits": fit_rows })),
        Format::Csv => {
            let mut t = Table::new([
                "record",
                "peak",
                "n",
                "lambda_max",
                "height",
                "quantity",
                "model",
                "slope",
                "intercept",
                "r_squared",
                "exponent",
            ]);
            for r in rows {
                t.push(vec![
                    Cell::Text("peak".into()),
                    Cell::Int(r.peak as u64),
                    Cell::Int(r.n as u64),
                    Cell::Float(r.lambda_max),
                    Cell::Float(r.height),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]);
            }
            for f in fit_rows {
                t.push(vec![
                    Cell::Text("fit".into()),
                    Cell::Int(f.peak as u64),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Text(f.quantity.into()),
                    Cell::Text(f.model.into()),
                    Cell::Float(f.slope),
                    Cell::Float(f.intercept),
                    Cell::Float(f.r_squared),
                    Cell::Float(f.exponent),
                ]);
            }
            t.to_csv()
        }
    }
}

pub fn run(args: &ScalingArgs, quiet: bool) -> CliResult<()> {
    let progress = Progress::new("scaling", quiet);
    let rows = match &args.from_table {
        Some(path) => read_table(path)?,
        None => {
            let raw = args.n_list.as_deref().ok_or_else(|| {
                CliError::Usage("--n-list is required without --from-table".into())
            })?;
            let ns: Vec<usize> = parse_list(raw, "--n-list")?;
            let mut distinct = ns.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 3 {
                return Err(CliError::Usage(
                    "--n-list needs at least 3 distinct sizes".into(),
                ));
            }
            compute_table(args, &ns, &progress)?
        }
    };
    let mut run = Run::start("scaling", args)?;
    let fit_rows = fits(&rows, args.lambda_star)?;
    run.emit(args.out.as_deref(), &encode(&rows, &fit_rows, args.format)?)?;
    let summary: Vec<Value> = fit_rows
        .iter()
        .map(|f| json!({ "peak": f.peak, "quantity": f.quantity, "model": f.model, "exponent": f.exponent, "r_squared": f.r_squared }))
        .collect();
    run.finish(0, json!({ "fits": summary }))?;
    Ok(())
}
