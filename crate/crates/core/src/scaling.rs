//! λ sweeps, peak detection and finite-size scaling fits.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fock::{
    classify_phase, ground_state, spectrum_weights, ModelParams, PhaseLabel,
    DEFAULT_ASYMMETRY_THRESHOLD, DEFAULT_PEAK_PROMINENCE,
};
use crate::numerics::{linear_fit, local_maxima, refine_peak, LinearFit};
use crate::observables::{
    chi_finite_difference, chi_perturbative, correlations, default_delta_lambda, rho1, rho2,
    von_neumann_entropy, ChiDenominator, ChiResult, CorrelationSet, DiscordOptions,
};

/// Relative prominence a χ maximum needs to count as a peak.
pub const DEFAULT_PROMINENCE: f64 = 0.05;
/// Nodes of the refinement pass around each coarse peak.
pub const DEFAULT_REFINE_NODES: usize = 100;
/// Half-width of the refinement window in coarse grid cells.
pub const REFINE_HALF_WIDTH_CELLS: f64 = 2.0;
pub const DEFAULT_LAMBDA_STAR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    /// Finite-difference fidelity susceptibility.
    Chi,
    /// Perturbative sum over the full spectrum.
    ChiSum,
    /// S1, S2 and the mutual information.
    Entropy,
    /// Entropy plus classical correlation and discord.
    Correlations,
    Phase,
}

impl Observable {
    pub const ALL: [Observable; 5] = [
        Observable::Chi,
        Observable::ChiSum,
        Observable::Entropy,
        Observable::Correlations,
        Observable::Phase,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Observable::Chi => "chi",
            Observable::ChiSum => "chi-sum",
            Observable::Entropy => "entropy",
            Observable::Correlations => "correlations",
            Observable::Phase => "phase",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .into_iter()
            .find(|o| o.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidInput(format!("unknown observable '{s}'")))
    }
}

/// Which observables a scan evaluates. The ground-state energy, gap and mean
/// imbalance are always reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservableSet {
    pub chi: bool,
    pub chi_sum: bool,
    pub entropy: bool,
    pub correlations: bool,
    pub phase: bool,
}

impl ObservableSet {
    pub fn all() -> Self {
        Self {
            chi: true,
            chi_sum: true,
            entropy: true,
            correlations: true,
            phase: true,
        }
    }

    pub fn only(o: Observable) -> Self {
        let mut s = Self::default();
        s.insert(o);
        s
    }

    pub fn insert(&mut self, o: Observable) {
        match o {
            Observable::Chi => self.chi = true,
            Observable::ChiSum => self.chi_sum = true,
            Observable::Entropy => self.entropy = true,
            Observable::Correlations => self.correlations = true,
            Observable::Phase => self.phase = true,
        }
    }

    pub fn contains(&self, o: Observable) -> bool {
        match o {
            Observable::Chi => self.chi,
            Observable::ChiSum => self.chi_sum,
            Observable::Entropy => self.entropy,
            Observable::Correlations => self.correlations,
            Observable::Phase => self.phase,
        }
    }
}

impl FromStr for ObservableSet {
    type Err = Error;

    /// Comma-separated list such as `chi,entropy`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = Self::default();
        for item in s.split(',').filter(|t| !t.trim().is_empty()) {
            set.insert(item.parse()?);
        }
        if set == Self::default() {
            return invalid("observable list is empty");
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n_particles: usize,
    pub tilt: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Number of λ nodes, endpoints included. A single node requires
    /// `lambda_min == lambda_max`.
    pub lambda_steps: usize,
    /// Finite-difference step for χ; `None` means `1e−4/√N`.
    pub delta_lambda: Option<f64>,
    pub discord: DiscordOptions,
    pub observables: ObservableSet,
}

impl ScanConfig {
    pub fn new(
        n_particles: usize,
        tilt: f64,
        lambda_min: f64,
        lambda_max: f64,
        lambda_steps: usize,
    ) -> Self {
        Self {
            n_particles,
            tilt,
            lambda_min,
            lambda_max,
            lambda_steps,
            delta_lambda: None,
            discord: DiscordOptions::default(),
            observables: ObservableSet::only(Observable::Chi),
        }
    }

    pub fn with_observables(mut self, observables: ObservableSet) -> Self {
        self.observables = observables;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.n_particles, self.lambda_min, self.tilt)?;
        ModelParams::new(self.n_particles, self.lambda_max, self.tilt)?;
        match self.lambda_steps {
            0 => return invalid("lambda_steps must be at least 1"),
            1 if self.lambda_min != self.lambda_max => {
                return invalid("a single lambda node needs lambda_min == lambda_max")
            }
            1 => {}
            _ if !(self.lambda_min < self.lambda_max) => {
                return invalid(format!(
                    "lambda_min ({}) must be below lambda_max ({})",
                    self.lambda_min, self.lambda_max
                ))
            }
            _ => {}
        }
        if let Some(d) = self.delta_lambda {
            if !(d > 0.0) || !d.is_finite() {
                return invalid(format!("delta_lambda must be > 0, got {d}"));
            }
        }
        if self.discord.grid_intervals < 2 {
            return invalid("discord grid needs at least 2 intervals");
        }
        if (self.observables.entropy || self.observables.correlations) && self.n_particles < 2 {
            return invalid("entropies and correlations need N >= 2");
        }
        Ok(())
    }

    /// Uniform λ nodes; the last node is exactly `lambda_max`.
    pub fn lambdas(&self) -> Vec<f64> {
        if self.lambda_steps <= 1 {
            return vec![self.lambda_min; self.lambda_steps];
        }
        let last = self.lambda_steps - 1;
        let span = self.lambda_max - self.lambda_min;
        (0..=last)
            .map(|i| {
                if i == last {
                    self.lambda_max
                } else {
                    self.lambda_min + span * i as f64 / last as f64
                }
            })
            .collect()
    }

    pub fn effective_delta_lambda(&self) -> f64 {
        self.delta_lambda
            .unwrap_or_else(|| default_delta_lambda(self.n_particles))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub chi_fd: Option<ChiResult>,
    pub chi_sum: Option<f64>,
    pub e0: Option<f64>,
    pub gap: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub mutual_info: Option<f64>,
    pub correlations: Option<CorrelationSet>,
    pub mean_imbalance: Option<f64>,
    pub phase: Option<PhaseLabel>,
    /// Numerical failures for this node; the other fields are still filled
    /// where possible.
    pub errors: Vec<String>,
}

impl ScanRow {
    fn empty(lambda: f64) -> Self {
        Self {
            lambda,
            chi_fd: None,
            chi_sum: None,
            e0: None,
            gap: None,
            s1: None,
            s2: None,
            mutual_info: None,
            correlations: None,
            mean_imbalance: None,
            phase: None,
            errors: Vec::new(),
        }
    }

    /// Errors plus unconverged χ estimates.
    pub fn warning_count(&self) -> usize {
        self.errors.len() + usize::from(self.chi_fd.is_some_and(|c| !c.converged))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub config: ScanConfig,
    /// Sorted by λ.
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    pub fn warning_count(&self) -> usize {
        self.rows.iter().map(ScanRow::warning_count).sum()
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.lambda).collect()
    }

    /// Column of `field`, with `NaN` where it was not computed.
    pub fn column(&self, field: ScanField) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| field.value(r).unwrap_or(f64::NAN))
            .collect()
    }
}

fn evaluate_row(config: &ScanConfig, lambda: f64) -> ScanRow {
    let mut row = ScanRow::empty(lambda);
    let obs = &config.observables;
    let params = match ModelParams::new(config.n_particles, lambda, config.tilt) {
        Ok(p) => p,
        Err(e) => {
            row.errors.push(e.to_string());
            return row;
        }
    };
    let gs = match ground_state(&params) {
        Ok(g) => g,
        Err(e) => {
            row.errors.push(format!("ground state: {e}"));
            return row;
        }
    };
    row.e0 = Some(gs.energy);
    row.gap = Some(gs.gap);
    row.mean_imbalance = Some(gs.mean_imbalance());
    if gs.quasi_degenerate {
        row.errors
            .push(format!("quasi-degenerate ground state (gap {:e})", gs.gap));
    }

    if obs.chi {
        match chi_finite_difference(&params, config.effective_delta_lambda()) {
            Ok(c) => row.chi_fd = Some(c),
            Err(e) => row.errors.push(format!("chi: {e}")),
        }
    }
    if obs.chi_sum {
        match chi_perturbative(&params, ChiDenominator::Squared) {
            Ok(c) => row.chi_sum = Some(c),
            Err(e) => row.errors.push(format!("chi-sum: {e}")),
        }
    }
    if obs.correlations {
        match correlations(&gs, config.discord) {
            Ok(c) => {
                row.s1 = Some(c.s1);
                row.s2 = Some(c.s2);
                row.mutual_info = Some(c.mutual_info);
                row.correlations = Some(c);
            }
            Err(e) => row.errors.push(format!("correlations: {e}")),
        }
    } else if obs.entropy {
        let entropies = rho2(&gs).and_then(|r2| {
            let s1 = von_neumann_entropy(&rho1(&gs))?;
            let s2 = von_neumann_entropy(&r2)?;
            Ok((s1, s2))
        });
        match entropies {
            Ok((s1, s2)) => {
                row.s1 = Some(s1);
                row.s2 = Some(s2);
                row.mutual_info = Some(2.0 * s1 - s2);
            }
            Err(e) => row.errors.push(format!("entropy: {e}")),
        }
    }
    if obs.phase {
        match classify_phase(
            &spectrum_weights(&gs),
            DEFAULT_PEAK_PROMINENCE,
            DEFAULT_ASYMMETRY_THRESHOLD,
        ) {
            Ok(p) => row.phase = Some(p),
            Err(e) => row.errors.push(format!("phase: {e}")),
        }
    }
    row
}

/// Evaluates every λ node. Rows run in parallel on the current rayon pool and
/// are returned in λ order; the result does not depend on the thread count.
pub fn scan(config: &ScanConfig) -> Result<ScanResult> {
    scan_with_progress(config, |_, _| {})
}

/// As [`scan`], calling `progress(done, total)` after each row completes.
/// Calls may arrive out of λ order.
pub fn scan_with_progress<F>(config: &ScanConfig, progress: F) -> Result<ScanResult>
where
    F: Fn(usize, usize) + Sync,
{
    config.validate()?;
    let lambdas = config.lambdas();
    let total = lambdas.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let rows = lambdas
        .par_iter()
        .map(|&l| {
            let row = evaluate_row(config, l);
            let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            progress(k, total);
            row
        })
        .collect();
    Ok(ScanResult {
        config: config.clone(),
        rows,
    })
}

/// Scalar column of a scan that peaks can be searched in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanField {
    ChiFd,
    ChiSum,
    S1,
    S2,
    MutualInfo,
    Classical,
    Discord,
    MeanImbalance,
}

impl ScanField {
    pub fn value(&self, row: &ScanRow) -> Option<f64> {
        match self {
            ScanField::ChiFd => row.chi_fd.map(|c| c.chi),
            ScanField::ChiSum => row.chi_sum,
            ScanField::S1 => row.s1,
            ScanField::S2 => row.s2,
            ScanField::MutualInfo => row.mutual_info,
            ScanField::Classical => row.correlations.map(|c| c.classical),
            ScanField::Discord => row.correlations.map(|c| c.discord),
            ScanField::MeanImbalance => row.mean_imbalance,
        }
    }

    /// Observable that has to be computed for this column to be filled.
    pub fn required_observable(&self) -> Observable {
        match self {
            ScanField::ChiFd => Observable::Chi,
            ScanField::ChiSum => Observable::ChiSum,
            ScanField::S1 | ScanField::S2 | ScanField::MutualInfo => Observable::Entropy,
            ScanField::Classical | ScanField::Discord => Observable::Correlations,
            ScanField::MeanImbalance => Observable::Phase,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakInfo {
    /// Parabola vertex through the peak node and its neighbours.
    pub lambda_max: f64,
    pub height: f64,
    /// Index of the peak node in the scan it was found in.
    pub grid_index: usize,
}

/// Interior local maxima of `ys` whose prominence relative to their own
/// height is at least `prominence`, refined by a three-point parabola.
pub fn find_peaks_in(xs: &[f64], ys: &[f64], prominence: f64) -> Vec<PeakInfo> {
    if xs.len() < 3 || xs.len() != ys.len() {
        return Vec::new();
    }
    local_maxima(ys, false)
        .into_iter()
        .filter(|m| m.value > 0.0 && m.prominence / m.value >= prominence)
        .map(|m| {
            let (lambda_max, height) = match refine_peak(xs, ys, m.index) {
                Ok(p) => (
                    p.x.clamp(xs[m.index - 1], xs[m.index + 1]),
                    p.y.max(m.value),
                ),
                Err(_) => (xs[m.index], m.value),
            };
            PeakInfo {
                lambda_max,
                height,
                grid_index: m.index,
            }
        })
        .collect()
}

/// Peaks of one scan column; rows without a value break the series.
pub fn find_peaks(result: &ScanResult, field: ScanField, prominence: f64) -> Vec<PeakInfo> {
    find_peaks_in(&result.lambdas(), &result.column(field), prominence)
}

/// Coarse scan, peak detection, then a `refine_nodes`-node scan over ±2
/// coarse cells around every coarse peak. Each returned peak comes from the
/// highest interior maximum of its fine scan (`grid_index` refers to that
/// fine scan); if the fine scan has none the coarse peak is kept.
pub fn locate_peaks(
    config: &ScanConfig,
    field: ScanField,
    prominence: f64,
    refine_nodes: usize,
) -> Result<Vec<PeakInfo>> {
    let mut cfg = config.clone();
    cfg.observables.insert(field.required_observable());
    let coarse = scan(&cfg)?;
    let peaks = find_peaks(&coarse, field, prominence);
    if refine_nodes < 3 || cfg.lambda_steps < 2 {
        return Ok(peaks);
    }
    let cell = (cfg.lambda_max - cfg.lambda_min) / (cfg.lambda_steps - 1) as f64;
    let mut out = Vec::with_capacity(peaks.len());
    for p in peaks {
        let centre = coarse.rows[p.grid_index].lambda;
        let mut fine = cfg.clone();
        fine.lambda_min = (centre - REFINE_HALF_WIDTH_CELLS * cell).max(0.0);
        fine.lambda_max = centre + REFINE_HALF_WIDTH_CELLS * cell;
        fine.lambda_steps = refine_nodes;
        let result = scan(&fine)?;
        let best = find_peaks(&result, field, 0.0)
            .into_iter()
            .max_by(|a, b| a.height.total_cmp(&b.height));
        out.push(best.unwrap_or(p));
    }
    out.sort_by(|a, b| a.lambda_max.total_cmp(&b.lambda_max));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingModel {
    /// `ln y` against `ln N`.
    PowerLaw,
    /// `ln y` against `N`.
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    /// `−slope` of the fit.
    pub exponent: f64,
    pub fit: LinearFit,
    pub n_values: Vec<usize>,
    pub model: ScalingModel,
}

/// Requested fit plus the goodness of fit of both models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueScaling {
    pub fit: ScalingFit,
    pub power_law_r_squared: f64,
    pub exponential_r_squared: f64,
}

fn check_sizes(n_values: &[usize], ys: &[f64]) -> Result<()> {
    if n_values.len() != ys.len() {
        return invalid("size list and value list differ in length");
    }
    if n_values.len() < 3 {
        return invalid(format!(
            "scaling fits need at least 3 sizes, got {}",
            n_values.len()
        ));
    }
    if n_values.contains(&0) {
        return invalid("particle numbers must be positive");
    }
    Ok(())
}

/// Fits `|λ_max − λ*| ∝ N^(−d_p)` on a log-log scale.
pub fn fit_position_exponent(
    n_values: &[usize],
    lambda_maxes: &[f64],
    lambda_star: f64,
) -> Result<ScalingFit> {
    check_sizes(n_values, lambda_maxes)?;
    let mut ys = Vec::with_capacity(lambda_maxes.len());
    for (&n, &l) in n_values.iter().zip(lambda_maxes) {
        let d = (l - lambda_star).abs();
        if d == 0.0 {
            return Err(Error::DegenerateLog { n });
        }
        ys.push(d.ln());
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let fit = linear_fit(&xs, &ys)?;
    Ok(ScalingFit {
        exponent: -fit.slope,
        fit,
        n_values: n_values.to_vec(),
        model: ScalingModel::PowerLaw,
    })
}

/// Fits peak values against `N` under `model`, reporting both models' r².
pub fn fit_value_scaling(
    n_values: &[usize],
    values: &[f64],
    model: ScalingModel,
) -> Result<ValueScaling> {
    check_sizes(n_values, values)?;
    if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
        return invalid(format!("scaling fit needs positive values, got {v}"));
    }
    let ln_y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let ln_n: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let lin_n: Vec<f64> = n_values.iter().map(|&n| n as f64).collect();
    let power = linear_fit(&ln_n, &ln_y)?;
    let expo = linear_fit(&lin_n, &ln_y)?;
    let fit = match model {
        ScalingModel::PowerLaw => power,
        ScalingModel::Exponential => expo,
    };
    Ok(ValueScaling {
        fit: ScalingFit {
            exponent: -fit.slope,
            fit,
            n_values: n_values.to_vec(),
            model,
        },
        power_law_r_squared: power.r_squared,
        exponential_r_squared: expo.r_squared,
    })
}
