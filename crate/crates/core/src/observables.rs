//! Stored energy E(t) = ⟨H_Q⟩_t − ⟨H_Q⟩_0, charging power P(t) = E(t)/t, and
//! their maxima over a sampled trace.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{BasisSet, SparseHermitianOperator, StateVector};
use crate::model::{build_hq, build_hq_interaction, fully_inverted_state, initial_state, ModelParams};
use crate::propagate::TimeGrid;

/// Largest imaginary part tolerated in an expectation of a Hermitian operator.
pub const IMAG_TOL: f64 = 1e-10;

/// Sampled E(t) and P(t) on a time grid.
#[derive(Clone, Debug)]
pub struct ChargingTrace {
    pub params: ModelParams,
    pub grid: TimeGrid,
    pub energy: Vec<f64>,
    pub power: Vec<f64>,
}

impl ChargingTrace {
    /// Wraps sampled energies; power follows from [`charging_power`].
    pub fn from_energy(params: ModelParams, grid: TimeGrid, energy: Vec<f64>) -> Result<Self> {
        if energy.len() != grid.samples() {
            return Err(Error::DimensionMismatch {
                expected: grid.samples(),
                found: energy.len(),
            });
        }
        let power = charging_power(&energy, &grid);
        Ok(Self {
            params,
            grid,
            energy,
            power,
        })
    }

    pub fn len(&self) -> usize {
        self.energy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energy.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.grid.time(k)
    }
}

/// Maxima of a trace. Boundary flags mark maxima found at the last sample,
/// which usually means the window was too short.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargingSummary {
    pub e_max: f64,
    pub t_e: f64,
    pub p_max: f64,
    pub t_p: f64,
    pub boundary_e: bool,
    pub boundary_p: bool,
}

/// Real part of ⟨ψ|M|ψ⟩ after checking the imaginary residue.
pub fn expectation_real(op: &SparseHermitianOperator, psi: &StateVector) -> Result<f64> {
    let z = op.expectation(psi)?;
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ComplexExpectation(z.im));
    }
    Ok(z.re)
}

pub fn stored_energy(psi_t: &StateVector, psi_0: &StateVector, hq: &SparseHermitianOperator) -> Result<f64> {
    Ok(expectation_real(hq, psi_t)? - expectation_real(hq, psi_0)?)
}

/// P(t_k) = E(t_k)/t_k, with P(0) = 0.
pub fn charging_power(energy: &[f64], grid: &TimeGrid) -> Vec<f64> {
    energy
        .iter()
        .enumerate()
        .map(|(k, &e)| if k == 0 { 0.0 } else { e / grid.time(k) })
        .collect()
}

/// Re-evaluates E at an arbitrary time during maximum refinement.
pub trait EnergyProbe {
    fn energy_at(&mut self, t: f64) -> Result<f64>;
}

impl<F: FnMut(f64) -> Result<f64>> EnergyProbe for F {
    fn energy_at(&mut self, t: f64) -> Result<f64> {
        self(t)
    }
}

/// Earliest index of the largest value in `xs[from..]`.
fn argmax_from(xs: &[f64], from: usize) -> usize {
    let mut best = from;
    for k in from + 1..xs.len() {
        if xs[k] > xs[best] {
            best = k;
        }
    }
    best
}

/// Vertex of the parabola through three equally spaced samples, as an offset
/// from the middle one in units of the spacing. `None` when not concave.
fn parabola_vertex(left: f64, mid: f64, right: f64) -> Option<f64> {
    let curvature = left - 2.0 * mid + right;
    if curvature >= 0.0 {
        return None;
    }
    Some((0.5 * (left - right) / curvature).clamp(-1.0, 1.0))
}

/// Discrete maxima of E and P (ties go to the earliest sample). With a
/// probe, each interior maximum is refined by a three-point parabola and
/// the observable re-evaluated at the vertex; the refined point replaces the
/// sample only if it is larger.
pub fn find_maxima(trace: &ChargingTrace, mut probe: Option<&mut dyn EnergyProbe>) -> Result<ChargingSummary> {
    let n = trace.len();
    if n < 3 {
        return Err(Error::DegenerateTrace("need at least three samples"));
    }
    if trace.energy.iter().all(|&e| e == trace.energy[0]) {
        return Err(Error::DegenerateTrace("all samples equal"));
    }
    let last = n - 1;
    let dt = trace.grid.dt();

    let ke = argmax_from(&trace.energy, 0);
    let mut summary = ChargingSummary {
        e_max: trace.energy[ke],
        t_e: trace.time(ke),
        p_max: 0.0,
        t_p: 0.0,
        boundary_e: ke == last,
        boundary_p: false,
    };
    let kp = argmax_from(&trace.power, 1);
    summary.p_max = trace.power[kp];
    summary.t_p = trace.time(kp);
    summary.boundary_p = kp == last;

    if let Some(probe) = probe.as_mut() {
        if ke > 0 && ke < last {
            let e = &trace.energy;
            if let Some(off) = parabola_vertex(e[ke - 1], e[ke], e[ke + 1]) {
                let t = trace.time(ke) + off * dt;
                let value = probe.energy_at(t)?;
                if value > summary.e_max {
                    summary.e_max = value;
                    summary.t_e = t;
                }
            }
        }
        if kp < last {
            let p = &trace.power;
            if let Some(off) = parabola_vertex(p[kp - 1], p[kp], p[kp + 1]) {
                let t = trace.time(kp) + off * dt;
                if t > 0.0 {
                    let value = probe.energy_at(t)? / t;
                    if value > summary.p_max {
                        summary.p_max = value;
                        summary.t_p = t;
                    }
                }
            }
        }
    }
    Ok(summary)
}

/// Capacity N·ω_q: the stored energy when every atom is inverted.
pub fn capacity_bound(params: &ModelParams) -> f64 {
    f64::from(params.n_total()) * params.omega_q
}

/// Evaluation of the capacity statement on an explicit basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityCheck {
    pub capacity: f64,
    /// ⟨H_Q⟩ on the fully inverted state minus ⟨H_Q⟩ on the initial state.
    pub stored_at_inversion: f64,
    pub interaction_initial: f64,
    pub interaction_inverted: f64,
}

pub fn capacity_check(basis: &Arc<BasisSet>) -> Result<CapacityCheck> {
    let hq = build_hq(basis);
    let inter = build_hq_interaction(basis);
    let psi0 = initial_state(basis)?;
    let top = fully_inverted_state(basis);
    Ok(CapacityCheck {
        capacity: capacity_bound(basis.params()),
        stored_at_inversion: stored_energy(&top, &psi0, &hq)?,
        interaction_initial: expectation_real(&inter, &psi0)?,
        interaction_inverted: expectation_real(&inter, &top)?,
    })
}

/// λ_max(H_Q) − ⟨H_Q⟩₀, a rigorous upper bound on E(t). H_Q is diagonal.
pub fn stored_energy_upper_bound(basis: &Arc<BasisSet>) -> Result<f64> {
    let hq = build_hq(basis);
    let top = (0..hq.dim())
        .map(|i| hq.get(i, i).re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(top - expectation_real(&hq, &initial_state(basis)?)?)
}
