use std::path::PathBuf;

use clap::Args;
use dwlab_core::semiclassical::{
    critical_lambda, stationary_z, z_min, DEFAULT_JUMP_THRESHOLD, DEFAULT_RESOLUTION,
};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::output::{Cell, Format, Progress, Run, Table};

#[derive(Debug, Args, Serialize)]
pub struct SemiclassicalArgs {
    /// Tilt V0 between the wells.
    #[arg(long)]
    pub v0: f64,
    /// Only shifts the energy constant.
    #[arg(long, default_value_t = 800)]
    pub n: usize,
    /// Lower end of the λ grid.
    #[arg(long, default_value_t = 0.0)]
    pub lambda_min: f64,
    /// Upper end of the λ grid.
    #[arg(long, default_value_t = 4.0)]
    pub lambda_max: f64,
    /// Number of λ nodes, endpoints included.
    #[arg(long, default_value_t = 401)]
    pub steps: usize,
    /// λ step of the jump detector.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: f64,
    /// Rise of z_min across one step that counts as a jump.
    #[arg(long, default_value_t = DEFAULT_JUMP_THRESHOLD)]
    pub jump_threshold: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

pub fn run(args: &SemiclassicalArgs, quiet: bool) -> CliResult<()> {
    if args.steps == 0 || (args.steps == 1) != (args.lambda_min == args.lambda_max) {
        return Err(CliError::Usage(
            "--steps must be >= 2 with lambda_min < lambda_max, or 1 with equal bounds".into(),
        ));
    }
    if !(args.lambda_min <= args.lambda_max) {
        return Err(CliError::Usage("--lambda-min exceeds --lambda-max".into()));
    }
    let mut run = Run::start("semiclassical", args)?;
    let progress = Progress::new("semiclassical", quiet);

    let mut table = Table::new([
        "lambda",
        "z_min",
        "energy_per_particle",
        "n_stationary_points",
    ]);
    let last = args.steps.saturating_sub(1).max(1);
    for i in 0..args.steps {
        let lambda = if i + 1 == args.steps {
            args.lambda_max
        } else {
            args.lambda_min + (args.lambda_max - args.lambda_min) * i as f64 / last as f64
        };
        let point = z_min(lambda, args.v0, args.n)?;
        let count = stationary_z(lambda, args.v0)?.len();
        table.push(vec![
            Cell::Float(lambda),
            Cell::Float(point.z),
            Cell::Float(point.energy_per_particle),
            Cell::Int(count as u64),
        ]);
    }
    let critical = critical_lambda(args.v0, args.n, args.resolution, args.jump_threshold)?;
    run.emit(args.out.as_deref(), &table.encode(args.format)?)?;

    let line = match critical {
        Some(l) => format!("critical_lambda={l:.16e}"),
        None => "critical_lambda=none".to_string(),
    };
    if args.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    progress.note("done");
    run.finish(
        0,
        json!({ "critical_lambda": critical.map_or(json!("none"), |l| json!(l)) }),
    )?;
    Ok(())
}
