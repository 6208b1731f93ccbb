use std::path::PathBuf;

use clap::Args;
use dwlab_core::observables::DiscordOptions;
use dwlab_core::scaling::{
    find_peaks, scan_with_progress, ObservableSet, ScanConfig, ScanField, ScanResult,
    DEFAULT_PROMINENCE,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{Cell, Format, Progress, Run, Table};

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// Number of bosons.
    #[arg(long)]
    pub n: usize,
    /// Tilt V0 between the wells.
    #[arg(long)]
    pub v0: f64,
    /// Lower end of the λ grid.
    #[arg(long, default_value_t = 1.8)]
    pub lambda_min: f64,
    /// Upper end of the λ grid.
    #[arg(long, default_value_t = 2.5)]
    pub lambda_max: f64,
    /// Number of λ nodes, endpoints included.
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Finite-difference step for χ [default: 1e-4/sqrt(N)].
    #[arg(long)]
    pub dlambda: Option<f64>,
    /// Comma list from chi, chi-sum, entropy, correlations, phase.
    #[arg(long, default_value = "chi")]
    pub observables: String,
    /// Intervals per angle in the discord measurement search.
    #[arg(long, default_value_t = 100)]
    pub discord_grid: usize,
    /// Relative prominence for the χ peaks listed in the manifest.
    #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
    pub prominence: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub const COLUMNS: [&str; 15] = [
    "lambda",
    "chi_fd",
    "chi_fd_converged",
    "chi_sum",
    "e0",
    "gap",
    "s1",
    "s2",
    "mutual_info",
    "classical_corr",
    "discord",
    "theta_min",
    "phi_min",
    "mean_imbalance",
    "phase_label",
];

impl ScanArgs {
    pub fn config(&self) -> CliResult<ScanConfig> {
        let observables: ObservableSet = self.observables.parse()?;
        let config = ScanConfig {
            n_particles: self.n,
            tilt: self.v0,
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            lambda_steps: self.steps,
            delta_lambda: self.dlambda,
            discord: DiscordOptions {
                grid_intervals: self.discord_grid,
                refine: true,
            },
            observables,
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn table(result: &ScanResult) -> Table {
    let mut t = Table::new(COLUMNS);
    for r in &result.rows {
        let c = r.correlations;
        t.push(vec![
            Cell::Float(r.lambda),
            Cell::opt(r.chi_fd.map(|x| x.chi)),
            r.chi_fd.map_or(Cell::Empty, |x| Cell::Bool(x.converged)),
            Cell::opt(r.chi_sum),
            Cell::opt(r.e0),
            Cell::opt(r.gap),
            Cell::opt(r.s1),
            Cell::opt(r.s2),
            Cell::opt(r.mutual_info),
            Cell::opt(c.map(|x| x.classical)),
            Cell::opt(c.map(|x| x.discord)),
            Cell::opt(c.map(|x| x.argmin_basis.theta)),
            Cell::opt(c.map(|x| x.argmin_basis.azimuth)),
            Cell::opt(r.mean_imbalance),
            r.phase
                .as_ref()
                .map_or(Cell::Empty, |p| Cell::Text(p.phase.as_str().to_string())),
        ]);
    }
    t
}

pub fn run(args: &ScanArgs, quiet: bool) -> CliResult<()> {
    if !(args.prominence >= 0.0) {
        return Err(CliError::Usage("--prominence must be >= 0".into()));
    }
    let config = args.config()?;
    let mut run = Run::start("scan", &json!({ "args": args, "resolved": &config }))?;
    let progress = Progress::new("scan", quiet);
    let result = scan_with_progress(&config, |done, total| progress.tick(done, total))?;

    let warnings = result.warning_count();
    for r in result.rows.iter().filter(|r| !r.errors.is_empty()) {
        progress.note(&format!("lambda={}: {}", r.lambda, r.errors.join("; ")));
    }
    run.emit(args.out.as_deref(), &table(&result).encode(args.format)?)?;

    let chi_peaks = if config.observables.chi && result.rows.len() >= 3 {
        Some(find_peaks(&result, ScanField::ChiFd, args.prominence))
    } else {
        None
    };
    let summary = json!({
        "rows": result.rows.len(),
        "rows_with_errors": result.rows.iter().filter(|r| !r.errors.is_empty()).count(),
        "chi_peaks": chi_peaks,
    });
    if let Some(path) = run.finish(warnings, summary)? {
        progress.note(&format!("manifest {}", path.display()));
    }
    if warnings > 0 {
        progress.note(&format!("{warnings} warnings"));
    }
    Ok(())
}
