//! Unitary time evolution ψ(t) = e^{−iHt} ψ(0) for a time-independent
//! Hamiltonian.
//!
//! Two routes are provided:
//!
//! * [`DenseOracle`]: full spectral decomposition, exact up to eigensolver
//!   round-off; limited to [`DENSE_MAX_DIM`].
//! * Lanczos exponential: builds an orthonormal Krylov basis
//!   {v, Hv, H²v, ...} with full reorthogonalisation, exponentiates the
//!   tridiagonal projection, and picks the substep length from the a-posteriori
//!   estimate β₀·β_k·|e_kᵀ exp(−iτT_k) e₁|. The subspace grows only until the
//!   estimate meets the tolerance; if `krylov_dim` vectors are not enough the
//!   substep is halved.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{dot, norm, BasisSet, SparseHermitianOperator, StateVector};

/// Largest dimension accepted by the dense spectral route.
pub const DENSE_MAX_DIM: usize = 4000;

/// Halvings allowed before a step is declared non-convergent.
const MAX_HALVINGS: u32 = 40;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Uniform sampling t_k = k·dt, k = 0..samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    dt: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: "must be positive".into(),
            });
        }
        if !(t_max >= dt && t_max.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "t_max",
                reason: "must be at least dt".into(),
            });
        }
        // tolerate representation error in t_max/dt (50/0.05 = 999.99...)
        let samples = (t_max / dt * (1.0 + 1e-12)).floor() as usize + 1;
        Ok(Self {
            t_max,
            dt,
            samples,
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples).map(move |k| self.time(k))
    }

    /// Time of the last sample (≤ t_max).
    pub fn last_time(&self) -> f64 {
        self.time(self.samples - 1)
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self::new(50.0, 0.05).expect("default grid is valid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    DenseOracle,
    Krylov,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::DenseOracle => "dense-oracle",
            Method::Krylov => "krylov",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dense-oracle" | "dense" => Some(Method::DenseOracle),
            "krylov" => Some(Method::Krylov),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig {
    pub method: Method,
    /// Maximum Krylov subspace size.
    pub krylov_dim: usize,
    /// Local error tolerance per substep.
    pub tol: f64,
    /// Largest internal substep.
    pub max_step: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            method: Method::Krylov,
            krylov_dim: 30,
            tol: 1e-9,
            max_step: 1.0,
        }
    }
}

impl PropagatorConfig {
    pub fn dense() -> Self {
        Self {
            method: Method::DenseOracle,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.krylov_dim < 2 {
            return Err(Error::InvalidParameter {
                field: "krylov_dim",
                reason: "must be at least 2".into(),
            });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                field: "tol",
                reason: "must be positive".into(),
            });
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParameter {
                field: "max_step",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// Eigendecomposition H = V Λ V† of a small Hermitian operator.
pub struct DenseOracle {
    basis: Arc<BasisSet>,
    vectors: DMatrix<Complex64>,
    values: DVector<f64>,
}

impl DenseOracle {
    pub fn new(h: &SparseHermitianOperator) -> Result<Self> {
        if h.dim() > DENSE_MAX_DIM {
            return Err(Error::InvalidParameter {
                field: "method",
                reason: format!(
                    "dense oracle limited to dimension {DENSE_MAX_DIM}, got {}",
                    h.dim()
                ),
            });
        }
        let eig = SymmetricEigen::new(h.to_dense());
        Ok(Self {
            basis: Arc::clone(h.basis()),
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    /// e^{−iHt} ψ.
    pub fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if !self.basis.same_space(psi.basis()) {
            return Err(Error::DimensionMismatch {
                expected: self.basis.dim(),
                found: psi.dim(),
            });
        }
        let v = DVector::from_column_slice(psi.amplitudes());
        let mut coeff = self.vectors.ad_mul(&v);
        for (c, &lambda) in coeff.iter_mut().zip(self.values.iter()) {
            *c *= Complex64::from_polar(1.0, -lambda * t);
        }
        let out = &self.vectors * coeff;
        StateVector::from_amplitudes(&self.basis, out.as_slice().to_vec())
    }
}

/// Reusable Lanczos workspace.
struct Krylov {
    cfg: PropagatorConfig,
    vectors: Vec<Vec<Complex64>>,
    w: Vec<Complex64>,
}

/// Tridiagonal projection and its eigendecomposition.
struct Projection {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Projection {
    fn new(alphas: &[f64], betas: &[f64]) -> Self {
        let k = alphas.len();
        let mut t = DMatrix::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alphas[i];
            if i + 1 < k {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        Self {
            values: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    /// exp(−iτT) e₁.
    fn exp_e1(&self, tau: f64) -> Vec<Complex64> {
        let k = self.values.len();
        let weights: Vec<Complex64> = (0..k)
            .map(|j| Complex64::from_polar(self.vectors[(0, j)], -self.values[j] * tau))
            .collect();
        (0..k)
            .map(|i| {
                (0..k).fold(ZERO, |acc, j| acc + weights[j] * self.vectors[(i, j)])
            })
            .collect()
    }
}

impl Krylov {
    fn new(dim: usize, cfg: PropagatorConfig) -> Self {
        let m = cfg.krylov_dim.min(dim.max(1));
        Self {
            cfg,
            vectors: (0..m).map(|_| vec![ZERO; dim]).collect(),
            w: vec![ZERO; dim],
        }
    }

    /// Advances `v` by one substep of length at most |tau| and returns the
    /// signed length taken.
    fn substep(&mut self, h: &SparseHermitianOperator, v: &mut [Complex64], tau: f64) -> Result<f64> {
        let beta0 = norm(v);
        if beta0 == 0.0 {
            return Ok(tau);
        }
        let tol = self.cfg.tol;
        let m = self.vectors.len();
        for (b, x) in self.vectors[0].iter_mut().zip(v.iter()) {
            *b = x / beta0;
        }
        let mut alphas: Vec<f64> = Vec::with_capacity(m);
        let mut betas: Vec<f64> = Vec::with_capacity(m);
        let mut scale = 0.0f64;

        let (projection, last_beta) = loop {
            let k = alphas.len();
            h.apply_into(&self.vectors[k], &mut self.w);
            let alpha = dot(&self.vectors[k], &self.w).re;
            axpy(-Complex64::new(alpha, 0.0), &self.vectors[k], &mut self.w);
            if k > 0 {
                axpy(-Complex64::new(betas[k - 1], 0.0), &self.vectors[k - 1], &mut self.w);
            }
            for i in 0..=k {
                let c = dot(&self.vectors[i], &self.w);
                axpy(-c, &self.vectors[i], &mut self.w);
            }
            let beta = norm(&self.w);
            alphas.push(alpha);
            scale = scale.max(alpha.abs()).max(beta);

            let projection = Projection::new(&alphas, &betas);
            let invariant = beta <= 1e-14 * scale.max(1.0);
            if invariant {
                break (projection, 0.0);
            }
            let estimate = beta0 * beta * projection.exp_e1(tau)[k].norm();
            if estimate <= tol || k + 1 == m {
                break (projection, beta);
            }
            betas.push(beta);
            for (b, x) in self.vectors[k + 1].iter_mut().zip(self.w.iter()) {
                *b = x / beta;
            }
        };

        let k = alphas.len();
        let mut step = tau;
        let mut halvings = 0;
        let mut y = projection.exp_e1(step);
        loop {
            let estimate = beta0 * last_beta * y[k - 1].norm();
            if estimate <= tol {
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::NonConvergence {
                    tol,
                    step,
                    estimate,
                });
            }
            step *= 0.5;
            y = projection.exp_e1(step);
        }

        v.iter_mut().for_each(|x| *x = ZERO);
        for (i, yi) in y.iter().enumerate() {
            axpy(yi * beta0, &self.vectors[i], v);
        }
        Ok(step)
    }

    fn advance(&mut self, h: &SparseHermitianOperator, v: &mut [Complex64], t: f64) -> Result<()> {
        let total = t.abs();
        let sign = t.signum();
        let mut done = 0.0;
        while done < total {
            let request = (total - done).min(self.cfg.max_step);
            let taken = self.substep(h, v, sign * request)?.abs();
            if taken == request && request == total - done {
                break;
            }
            done += taken;
        }
        Ok(())
    }
}

fn axpy(a: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Stateful propagator bound to one Hamiltonian.
pub struct Propagator<'h> {
    h: &'h SparseHermitianOperator,
    engine: Engine,
}

enum Engine {
    Dense(DenseOracle),
    Krylov(Krylov),
}

impl<'h> Propagator<'h> {
    pub fn new(h: &'h SparseHermitianOperator, cfg: &PropagatorConfig) -> Result<Self> {
        cfg.validate()?;
        let engine = match cfg.method {
            Method::DenseOracle => Engine::Dense(DenseOracle::new(h)?),
            Method::Krylov => Engine::Krylov(Krylov::new(h.dim(), *cfg)),
        };
        Ok(Self { h, engine })
    }

    /// Replaces `psi` by e^{−iHt} psi. Negative `t` runs backwards.
    pub fn advance(&mut self, psi: &mut StateVector, t: f64) -> Result<()> {
        if !self.h.basis().same_space(psi.basis()) {
            return Err(Error::DimensionMismatch {
                expected: self.h.dim(),
                found: psi.dim(),
            });
        }
        if t == 0.0 {
            return Ok(());
        }
        match &mut self.engine {
            Engine::Dense(oracle) => *psi = oracle.propagate(psi, t)?,
            Engine::Krylov(k) => k.advance(self.h, psi.amplitudes_mut(), t)?,
        }
        Ok(())
    }
}

/// e^{−iHt} ψ₀.
pub fn propagate_to(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    t: f64,
    cfg: &PropagatorConfig,
) -> Result<StateVector> {
    let mut prop = Propagator::new(h, cfg)?;
    let mut psi = psi0.clone();
    prop.advance(&mut psi, t)?;
    Ok(psi)
}

/// Steps through `grid`, handing each sample to `observe(k, t_k, ψ(t_k))`.
/// States are not retained; returns the final state.
pub fn evolve_streaming(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
    mut observe: impl FnMut(usize, f64, &StateVector) -> Result<()>,
) -> Result<StateVector> {
    let mut prop = Propagator::new(h, cfg)?;
    let mut psi = psi0.clone();
    if !h.basis().same_space(psi.basis()) {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    observe(0, 0.0, &psi)?;
    for k in 1..grid.samples() {
        let step = grid.time(k) - grid.time(k - 1);
        prop.advance(&mut psi, step)?;
        observe(k, grid.time(k), &psi)?;
    }
    Ok(psi)
}

/// All states on `grid`.
pub fn evolve_trace(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
) -> Result<Vec<StateVector>> {
    let mut out = Vec::with_capacity(grid.samples());
    evolve_streaming(h, psi0, grid, cfg, |_, _, psi| {
        out.push(psi.clone());
        Ok(())
    })?;
    Ok(out)
}
