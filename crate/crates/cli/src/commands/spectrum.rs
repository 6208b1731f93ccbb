use std::path::PathBuf;

use clap::Args;
use dwlab_core::fock::{
    classify_phase, ground_state, spectrum_weights, ModelParams, DEFAULT_ASYMMETRY_THRESHOLD,
    DEFAULT_PEAK_PROMINENCE,
};
use serde::Serialize;
use serde_json::json;

use super::parse_list;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Format, Progress, Run, Table};

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    /// Number of bosons.
    #[arg(long)]
    pub n: usize,
    /// Tilt V0 between the wells.
    #[arg(long)]
    pub v0: f64,
    /// Comma list of couplings λ.
    #[arg(long)]
    pub lambdas: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub fn run(args: &SpectrumArgs, quiet: bool) -> CliResult<()> {
    let lambdas: Vec<f64> = parse_list(&args.lambdas, "--lambdas")?;
    if lambdas.is_empty() {
        return Err(CliError::Usage("--lambdas is empty".into()));
    }
    let params = lambdas
        .iter()
        .map(|&l| ModelParams::new(args.n, l, args.v0))
        .collect::<Result<Vec<_>, _>>()?;
    let mut run = Run::start("spectrum", args)?;
    let progress = Progress::new("spectrum", quiet);

    let mut columns = Vec::with_capacity(params.len());
    let mut labels = Vec::with_capacity(params.len());
    let mut warnings = 0;
    for (i, p) in params.iter().enumerate() {
        let gs = ground_state(p)?;
        let w = spectrum_weights(&gs);
        match classify_phase(&w, DEFAULT_PEAK_PROMINENCE, DEFAULT_ASYMMETRY_THRESHOLD) {
            Ok(l) => labels.push(json!({
                "lambda": p.lambda,
                "phase": l.phase.as_str(),
                "peaks": l.peak_positions,
                "asymmetry": l.asymmetry,
            })),
            Err(e) => {
                warnings += 1;
                labels.push(json!({ "lambda": p.lambda, "error": e.to_string() }));
            }
        }
        if gs.quasi_degenerate {
            warnings += 1;
        }
        columns.push(w);
        progress.tick(i + 1, params.len());
    }

    let mut table = Table::new(
        std::iter::once("k".to_string()).chain(lambdas.iter().map(|l| format!("lambda={l}"))),
    );
    for k in 0..=args.n {
        let mut row = vec![Cell::Int(k as u64)];
        row.extend(columns.iter().map(|c| Cell::Float(c[k])));
        table.push(row);
    }
    run.emit(args.out.as_deref(), &table.encode(args.format)?)?;
    run.finish(warnings, json!({ "phases": labels }))?;
    Ok(())
}
