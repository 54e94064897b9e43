//! Physical parameters and assembly of the charging Hamiltonian
//! H = H_Q + H_E + θ·H_I.
//!
//! * H_Q = ω_q(S_a^z + S_b^z) + Σ_c (g/N_c)(S_c² − (S_c^z)² − N_c/2), diagonal in
//!   the fixed-j basis.
//! * H_E = ω_a a₁†a₁ + ω_b a₂†a₂.
//! * H_I = g₁ S_a^x (a₁† + a₁) + g₂ S_b^x (a₂† + a₂) + A (S_a⁺S_b⁻ + S_b⁺S_a⁻),
//!   counter-rotating terms kept.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hilbert::{
    collective_ladder_op, collective_x_op, quadrature_op, BasisSet, BasisState, Ladder, Mode,
    SparseHermitianOperator, SparseOperator, StateVector,
};

/// Model constants. Energies in units of ω_q, ħ = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub omega_q: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    /// Intra-chain flip-flop coupling.
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    /// Inter-chain collective exchange.
    pub a_exchange: f64,
    pub n_a: u32,
    pub n_b: u32,
    /// Photon cutoff per cavity.
    pub n_ph: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_q: 1.0,
            omega_a: 1.0,
            omega_b: 1.0,
            g: 0.5,
            g1: 0.5,
            g2: 0.5,
            a_exchange: 0.5,
            n_a: 5,
            n_b: 5,
            n_ph: 30,
        }
    }
}

impl ModelParams {
    /// Total atom number N = N_a + N_b.
    pub fn n_total(&self) -> u32 {
        self.n_a + self.n_b
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_a == 0 {
            return Err(invalid("n_a", "at least one atom per chain"));
        }
        if self.n_b == 0 {
            return Err(invalid("n_b", "at least one atom per chain"));
        }
        let required = self.n_a.max(self.n_b);
        if self.n_ph < required {
            return Err(Error::CutoffTooSmall {
                n_ph: self.n_ph,
                required,
            });
        }
        for (field, w) in [
            ("omega_q", self.omega_q),
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
        ] {
            if !(w > 0.0 && w.is_finite()) {
                return Err(invalid(field, "frequencies must be positive"));
            }
        }
        for (field, c) in [
            ("g", self.g),
            ("g1", self.g1),
            ("g2", self.g2),
            ("a", self.a_exchange),
        ] {
            if !c.is_finite() {
                return Err(invalid(field, "coupling must be finite"));
            }
        }
        Ok(())
    }

    /// Relabels cavity a ↔ cavity b.
    pub fn swapped(&self) -> Self {
        Self {
            omega_a: self.omega_b,
            omega_b: self.omega_a,
            g1: self.g2,
            g2: self.g1,
            n_a: self.n_b,
            n_b: self.n_a,
            ..self.clone()
        }
    }
}

fn invalid(field: &'static str, reason: &str) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.to_string(),
    }
}

/// Value of the charging switch θ multiplying H_I.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Switch {
    Off,
    On,
}

impl Switch {
    pub fn value(self) -> f64 {
        match self {
            Switch::Off => 0.0,
            Switch::On => 1.0,
        }
    }
}

/// Constant switch held over a window of length `duration`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChargingProtocol {
    pub switch: Switch,
    pub duration: f64,
}

impl ChargingProtocol {
    pub fn new(switch: Switch, duration: f64) -> Result<Self> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(invalid("duration", "must be positive"));
        }
        Ok(Self { switch, duration })
    }

    pub fn charging(duration: f64) -> Result<Self> {
        Self::new(Switch::On, duration)
    }
}

/// (g/N)(j(j+1) − m² − N/2) for a chain of `atoms` = 2j atoms, evaluated in
/// integers as (g/N)·(N² − (2m)²)/4.
fn flip_flop_diag(g: f64, atoms: u32, two_m: i32) -> f64 {
    let n = i64::from(atoms);
    let m2 = i64::from(two_m);
    let quarter = (n * n - m2 * m2) as f64 / 4.0;
    g / f64::from(atoms) * quarter
}

/// Free part ω_q(S_a^z + S_b^z) of H_Q.
pub fn build_hq_free(basis: &Arc<BasisSet>) -> SparseHermitianOperator {
    let wq = basis.params().omega_q;
    hermitian(SparseOperator::diagonal(basis, |s| {
        wq * f64::from(s.two_m_a + s.two_m_b) / 2.0
    }))
}

/// Intra-chain interaction part of H_Q.
pub fn build_hq_interaction(basis: &Arc<BasisSet>) -> SparseHermitianOperator {
    let p = basis.params();
    let (g, na, nb) = (p.g, p.n_a, p.n_b);
    hermitian(SparseOperator::diagonal(basis, |s| {
        flip_flop_diag(g, na, s.two_m_a) + flip_flop_diag(g, nb, s.two_m_b)
    }))
}

/// Diagonal value of H_Q on one basis state.
pub fn hq_diagonal(params: &ModelParams, s: &BasisState) -> f64 {
    params.omega_q * f64::from(s.two_m_a + s.two_m_b) / 2.0
        + flip_flop_diag(params.g, params.n_a, s.two_m_a)
        + flip_flop_diag(params.g, params.n_b, s.two_m_b)
}

/// Atomic (battery) Hamiltonian H_Q.
pub fn build_hq(basis: &Arc<BasisSet>) -> SparseHermitianOperator {
    let p = basis.params().clone();
    hermitian(SparseOperator::diagonal(basis, |s| hq_diagonal(&p, &s)))
}

/// Cavity Hamiltonian H_E.
pub fn build_he(basis: &Arc<BasisSet>) -> SparseHermitianOperator {
    let p = basis.params();
    let (wa, wb) = (p.omega_a, p.omega_b);
    hermitian(SparseOperator::diagonal(basis, |s| {
        wa * f64::from(s.n1) + wb * f64::from(s.n2)
    }))
}

/// Interaction Hamiltonian H_I.
pub fn build_hi(basis: &Arc<BasisSet>) -> SparseHermitianOperator {
    let p = basis.params();
    let mut total = SparseOperator::zero(basis);
    for (mode, coupling) in [(Mode::A, p.g1), (Mode::B, p.g2)] {
        if coupling != 0.0 {
            let sx = collective_x_op(basis, mode);
            let x = quadrature_op(basis, mode);
            let term = sx.mul(&x).expect("same basis").scale_real(coupling);
            total = total.add(&term).expect("same basis");
        }
    }
    if p.a_exchange != 0.0 {
        let ap = collective_ladder_op(basis, Mode::A, Ladder::Raise);
        let am = collective_ladder_op(basis, Mode::A, Ladder::Lower);
        let bp = collective_ladder_op(basis, Mode::B, Ladder::Raise);
        let bm = collective_ladder_op(basis, Mode::B, Ladder::Lower);
        let exchange = ap
            .mul(&bm)
            .and_then(|x| x.add(&bp.mul(&am)?))
            .expect("same basis")
            .scale_real(p.a_exchange);
        total = total.add(&exchange).expect("same basis");
    }
    hermitian(total)
}

/// H_Q + H_E + θ·H_I.
pub fn build_total(basis: &Arc<BasisSet>, protocol: &ChargingProtocol) -> SparseHermitianOperator {
    let diag = build_hq(basis).add(&build_he(basis)).expect("same basis");
    match protocol.switch {
        Switch::Off => diag,
        Switch::On => diag
            .add(&build_hi(basis).scale(protocol.switch.value()))
            .expect("same basis"),
    }
}

fn hermitian(op: SparseOperator) -> SparseHermitianOperator {
    SparseHermitianOperator::new(op).expect("assembled operator is hermitian by construction")
}

/// |N_a, N_b, −j_a, −j_b⟩: both cavities in Fock states holding one photon
/// per atom, all atoms in the ground state.
pub fn initial_state(basis: &Arc<BasisSet>) -> Result<StateVector> {
    let p = basis.params();
    let required = p.n_a.max(p.n_b);
    if p.n_ph < required {
        return Err(Error::CutoffTooSmall {
            n_ph: p.n_ph,
            required,
        });
    }
    StateVector::basis_state(basis, initial_basis_state(p))
}

pub fn initial_basis_state(p: &ModelParams) -> BasisState {
    BasisState {
        n1: p.n_a,
        n2: p.n_b,
        two_m_a: -(p.n_a as i32),
        two_m_b: -(p.n_b as i32),
    }
}

/// |0, 0, +j_a, +j_b⟩: cavities empty, every atom inverted.
pub fn fully_inverted_state(basis: &Arc<BasisSet>) -> StateVector {
    let p = basis.params();
    StateVector::basis_state(
        basis,
        BasisState {
            n1: 0,
            n2: 0,
            two_m_a: p.n_a as i32,
            two_m_b: p.n_b as i32,
        },
    )
    .expect("inverted state always lies in the basis")
}
