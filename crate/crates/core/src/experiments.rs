//! Charging runs and parameter sweeps: single traces, atom-number scaling,
//! atom-split sweeps, cutoff convergence and exchange-constant sensitivity.
//!
//! Sweep rows are independent and run on a rayon pool sized by
//! [`RunSettings::workers`]; rows are always returned in sweep order.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::{build_basis, StateVector};
use crate::model::{build_hq, build_total, initial_state, ChargingProtocol, ModelParams, Switch};
use crate::observables::{expectation_real, find_maxima, ChargingSummary, ChargingTrace};
use crate::propagate::{evolve_streaming, DenseOracle, Method, Propagator, PropagatorConfig, TimeGrid};
use crate::VERSION;

/// Everything except the physical parameters that determines a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub grid: TimeGrid,
    pub propagator: PropagatorConfig,
    pub switch: Switch,
    /// Refine maxima by parabolic interpolation plus re-propagation.
    pub refine: bool,
    /// Worker threads for sweeps; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            grid: TimeGrid::default(),
            propagator: PropagatorConfig::default(),
            switch: Switch::On,
            refine: true,
            workers: 0,
        }
    }
}

/// A charging trace together with its maxima.
#[derive(Clone, Debug)]
pub struct ChargingRun {
    pub trace: ChargingTrace,
    pub summary: ChargingSummary,
}

/// E(t), P(t) for one parameter point with the charging switch on.
pub fn run_trace(params: &ModelParams, grid: &TimeGrid, cfg: &PropagatorConfig) -> Result<ChargingTrace> {
    let settings = RunSettings {
        grid: *grid,
        propagator: *cfg,
        refine: false,
        ..RunSettings::default()
    };
    Ok(run_charging(params, &settings)?.trace)
}

/// Streams the evolution, keeping only the energies and the states at the
/// running maxima (needed to re-propagate during refinement).
pub fn run_charging(params: &ModelParams, settings: &RunSettings) -> Result<ChargingRun> {
    let grid = settings.grid;
    let basis = build_basis(params)?;
    let protocol = ChargingProtocol::new(settings.switch, grid.t_max())?;
    let h = build_total(&basis, &protocol);
    let hq = build_hq(&basis);
    let psi0 = initial_state(&basis)?;
    let e0 = expectation_real(&hq, &psi0)?;

    let mut energy = Vec::with_capacity(grid.samples());
    let mut best_e: Option<(f64, f64, StateVector)> = None;
    let mut best_p: Option<(f64, f64, StateVector)> = None;
    evolve_streaming(&h, &psi0, &grid, &settings.propagator, |k, t, psi| {
        let e = if k == 0 { 0.0 } else { expectation_real(&hq, psi)? - e0 };
        energy.push(e);
        if settings.refine {
            if best_e.as_ref().is_none_or(|b| e > b.0) {
                best_e = Some((e, t, psi.clone()));
            }
            if k > 0 {
                let p = e / t;
                if best_p.as_ref().is_none_or(|b| p > b.0) {
                    best_p = Some((p, t, psi.clone()));
                }
            }
        }
        Ok(())
    })?;

    let trace = ChargingTrace::from_energy(params.clone(), grid, energy)?;
    if trace.energy.iter().all(|&e| e == 0.0) {
        // nothing couples the initial state to anything else
        return Ok(ChargingRun {
            trace,
            summary: ChargingSummary {
                e_max: 0.0,
                t_e: 0.0,
                p_max: 0.0,
                t_p: 0.0,
                boundary_e: false,
                boundary_p: false,
            },
        });
    }

    let summary = if settings.refine {
        let anchors: Vec<(f64, StateVector)> = [best_e, best_p]
            .into_iter()
            .flatten()
            .map(|(_, t, psi)| (t, psi))
            .collect();
        let mut prop = Propagator::new(&h, &settings.propagator)?;
        let mut probe = |t: f64| -> Result<f64> {
            let (t0, psi) = anchors
                .iter()
                .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
                .expect("at least one anchor");
            let mut psi = psi.clone();
            prop.advance(&mut psi, t - t0)?;
            Ok(expectation_real(&hq, &psi)? - e0)
        };
        find_maxima(&trace, Some(&mut probe))?
    } else {
        find_maxima(&trace, None)?
    };
    Ok(ChargingRun { trace, summary })
}

/// How a total atom number N is divided between the chains.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitRule {
    /// N_a = N_b = N/2.
    Symmetric,
    /// N_a = k.
    FixedAsymmetric(u32),
    /// N_a = 2, N_b = N − 2.
    MostAsymmetric,
}

/// Smallest chain that still charges collectively.
pub const MIN_CHAIN: u32 = 2;

impl SplitRule {
    pub fn split(self, n: u32) -> Result<(u32, u32)> {
        if n < 2 * MIN_CHAIN {
            return Err(Error::InvalidSplit(format!("N = {n} < 4 leaves a chain with fewer than 2 atoms")));
        }
        let n_a = match self {
            SplitRule::Symmetric => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidSplit(format!("symmetric split needs even N, got {n}")));
                }
                n / 2
            }
            SplitRule::FixedAsymmetric(k) => k,
            SplitRule::MostAsymmetric => MIN_CHAIN,
        };
        if n_a < MIN_CHAIN || n < n_a + MIN_CHAIN {
            return Err(Error::InvalidSplit(format!("N_a = {n_a} invalid for N = {n}")));
        }
        Ok((n_a, n - n_a))
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "symmetric" => Some(SplitRule::Symmetric),
            "most_asymmetric" | "most-asymmetric" => Some(SplitRule::MostAsymmetric),
            _ => {
                let k = s
                    .strip_prefix("fixed_asymmetric(")
                    .or_else(|| s.strip_prefix("fixed-asymmetric("))?
                    .strip_suffix(')')?;
                k.trim().parse().ok().map(SplitRule::FixedAsymmetric)
            }
        }
    }
}

impl fmt::Display for SplitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitRule::Symmetric => write!(f, "symmetric"),
            SplitRule::FixedAsymmetric(k) => write!(f, "fixed_asymmetric({k})"),
            SplitRule::MostAsymmetric => write!(f, "most_asymmetric"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// Full parameter snapshot; re-running it reproduces the row.
    pub params: ModelParams,
    pub summary: ChargingSummary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepMeta {
    pub settings: RunSettings,
    /// Name of the swept variable or split rule.
    pub rule: String,
    pub version: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub meta: SweepMeta,
}

fn run_rows(params: Vec<ModelParams>, settings: &RunSettings, rule: String) -> Result<SweepResult> {
    let job = |p: &ModelParams| -> Result<SweepRow> {
        let run = run_charging(p, settings)?;
        Ok(SweepRow {
            params: p.clone(),
            summary: run.summary,
        })
    };
    let rows = if settings.workers == 0 {
        params.par_iter().map(job).collect::<Result<Vec<_>>>()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(settings.workers)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?
            .install(|| params.par_iter().map(job).collect::<Result<Vec<_>>>())?
    };
    Ok(SweepResult {
        rows,
        meta: SweepMeta {
            settings: *settings,
            rule,
            version: VERSION,
        },
    })
}

/// One row per total atom number, split according to `rule`.
pub fn sweep_total_atoms(
    n_list: &[u32],
    rule: SplitRule,
    template: &ModelParams,
    settings: &RunSettings,
) -> Result<SweepResult> {
    let points = n_list
        .iter()
        .map(|&n| {
            let (n_a, n_b) = rule.split(n)?;
            let p = ModelParams { n_a, n_b, ..template.clone() };
            p.validate()?;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    run_rows(points, settings, rule.to_string())
}

/// One row per N_a ∈ [2, N − 2] at fixed total N.
pub fn sweep_split(n_total: u32, template: &ModelParams, settings: &RunSettings) -> Result<SweepResult> {
    if n_total < 2 * MIN_CHAIN {
        return Err(Error::InvalidSplit(format!("N = {n_total} < 4")));
    }
    let points = (MIN_CHAIN..=n_total - MIN_CHAIN)
        .map(|n_a| {
            let p = ModelParams { n_a, n_b: n_total - n_a, ..template.clone() };
            p.validate()?;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    run_rows(points, settings, format!("split(N={n_total})"))
}

/// Result of a least-squares fit of log P_max against log N.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    /// Largest |log residual|.
    pub residual: f64,
    pub n_values: Vec<u32>,
}

/// Fits P_max ∝ N^α over the rows of a sweep.
pub fn fit_power_law(sweep: &SweepResult) -> Result<ScalingFit> {
    let n: Vec<u32> = sweep.rows.iter().map(|r| r.params.n_total()).collect();
    let p: Vec<f64> = sweep.rows.iter().map(|r| r.summary.p_max).collect();
    fit_power_law_points(&n, &p)
}

pub fn fit_power_law_points(n_values: &[u32], values: &[f64]) -> Result<ScalingFit> {
    if n_values.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: n_values.len(), found: values.len() });
    }
    if n_values.len() < 4 {
        return Err(Error::DegenerateFit("need at least four points"));
    }
    if n_values.iter().all(|&n| n == n_values[0]) {
        return Err(Error::DegenerateFit("all N equal"));
    }
    if n_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::DegenerateFit("N values must be strictly increasing"));
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateFit("P_max must be positive"));
    }
    let x: Vec<f64> = n_values.iter().map(|&n| f64::from(n).ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let len = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / len;
    let y_mean = y.iter().sum::<f64>() / len;
    let sxx: f64 = x.iter().map(|xi| (xi - x_mean).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - x_mean) * (yi - y_mean)).sum();
    let exponent = sxy / sxx;
    let intercept = y_mean - exponent * x_mean;
    let residual = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| (yi - intercept - exponent * xi).abs())
        .fold(0.0, f64::max);
    Ok(ScalingFit {
        exponent,
        intercept,
        residual,
        n_values: n_values.to_vec(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n_ph: u32,
    pub summary: ChargingSummary,
    /// |e_max − e_max(previous cutoff)|.
    pub delta_e: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    /// Threshold on consecutive e_max differences, 1e−4·N·ω_q.
    pub threshold: f64,
    /// First cutoff whose delta falls below the threshold.
    pub converged_at: Option<u32>,
}

/// Relative threshold on consecutive e_max differences (times N·ω_q).
pub const CONVERGENCE_REL: f64 = 1e-4;

pub fn convergence_study(params: &ModelParams, cutoffs: &[u32], settings: &RunSettings) -> Result<ConvergenceStudy> {
    if cutoffs.is_empty() {
        return Err(Error::InvalidParameter { field: "cutoffs", reason: "empty list".into() });
    }
    if cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter { field: "cutoffs", reason: "must be strictly increasing".into() });
    }
    let required = params.n_a.max(params.n_b);
    if cutoffs[0] < required {
        return Err(Error::CutoffTooSmall { n_ph: cutoffs[0], required });
    }
    let points: Vec<ModelParams> = cutoffs.iter().map(|&n_ph| ModelParams { n_ph, ..params.clone() }).collect();
    let sweep = run_rows(points, settings, "n_ph".into())?;
    let threshold = CONVERGENCE_REL * f64::from(params.n_total()) * params.omega_q;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(sweep.rows.len());
    let mut converged_at = None;
    for row in sweep.rows {
        let delta_e = rows.last().map(|prev| (row.summary.e_max - prev.summary.e_max).abs());
        if converged_at.is_none() && delta_e.is_some_and(|d| d < threshold) {
            converged_at = Some(row.params.n_ph);
        }
        rows.push(ConvergenceRow { n_ph: row.params.n_ph, summary: row.summary, delta_e });
    }
    Ok(ConvergenceStudy { rows, threshold, converged_at })
}

/// One row per value of the inter-chain exchange A.
pub fn sensitivity_a(params: &ModelParams, a_list: &[f64], settings: &RunSettings) -> Result<SweepResult> {
    if a_list.iter().any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter { field: "a_list", reason: "values must be finite".into() });
    }
    let points = a_list
        .iter()
        .map(|&a_exchange| ModelParams { a_exchange, ..params.clone() })
        .collect();
    run_rows(points, settings, "a".into())
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheck {
    pub times: Vec<f64>,
    /// ‖ψ_krylov(t) − ψ_dense(t)‖ per sample.
    pub deviations: Vec<f64>,
}

impl OracleCheck {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().cloned().fold(0.0, f64::max)
    }
}

/// Steps the Krylov propagator along the grid and compares every sample
/// against the dense spectral solution evaluated directly at t_k.
pub fn oracle_check(params: &ModelParams, settings: &RunSettings) -> Result<OracleCheck> {
    let basis = build_basis(params)?;
    let protocol = ChargingProtocol::new(settings.switch, settings.grid.t_max())?;
    let h = build_total(&basis, &protocol);
    let psi0 = initial_state(&basis)?;
    let oracle = DenseOracle::new(&h)?;
    let cfg = PropagatorConfig { method: Method::Krylov, ..settings.propagator };
    let mut times = Vec::new();
    let mut deviations = Vec::new();
    evolve_streaming(&h, &psi0, &settings.grid, &cfg, |_, t, psi| {
        let exact = oracle.propagate(&psi0, t)?;
        times.push(t);
        deviations.push(psi.distance(&exact)?);
        Ok(())
    })?;
    Ok(OracleCheck { times, deviations })
}
