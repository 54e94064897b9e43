//! Truncated product basis |n1, n2, m_a, m_b⟩ and the elementary operators
//! (photon ladders, collective spin ladders, S^z) acting on it.
//!
//! The spin quantum numbers j_a = N_a/2 and j_b = N_b/2 are fixed by the
//! basis. Magnetic numbers are stored doubled (`two_m = 2m`) so every index
//! computation is integer arithmetic.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Rows per task in the parallel matrix-vector product.
const MATVEC_CHUNK: usize = 4096;

/// Selects one of the two cavity/chain pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// One product basis state. `two_m_a` is 2·m_a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub n1: u32,
    pub n2: u32,
    pub two_m_a: i32,
    pub two_m_b: i32,
}

impl BasisState {
    pub fn m_a(&self) -> f64 {
        f64::from(self.two_m_a) / 2.0
    }

    pub fn m_b(&self) -> f64 {
        f64::from(self.two_m_b) / 2.0
    }

    pub fn photons(&self, mode: Mode) -> u32 {
        match mode {
            Mode::A => self.n1,
            Mode::B => self.n2,
        }
    }

    pub fn two_m(&self, mode: Mode) -> i32 {
        match mode {
            Mode::A => self.two_m_a,
            Mode::B => self.two_m_b,
        }
    }

    fn with_photons(mut self, mode: Mode, n: u32) -> Self {
        match mode {
            Mode::A => self.n1 = n,
            Mode::B => self.n2 = n,
        }
        self
    }

    fn with_two_m(mut self, mode: Mode, two_m: i32) -> Self {
        match mode {
            Mode::A => self.two_m_a = two_m,
            Mode::B => self.two_m_b = two_m,
        }
        self
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "|{}, {}, {}/2, {}/2⟩",
            self.n1, self.n2, self.two_m_a, self.two_m_b
        )
    }
}

/// Enumerated basis with lexicographic ordering in (n1, n2, m_a, m_b).
#[derive(Clone, Debug)]
pub struct BasisSet {
    params: ModelParams,
    dim: usize,
}

/// Validates `params` and enumerates the truncated basis.
pub fn build_basis(params: &ModelParams) -> Result<Arc<BasisSet>> {
    params.validate()?;
    let nph1 = params.n_ph as usize + 1;
    let dim = nph1 * nph1 * (params.n_a as usize + 1) * (params.n_b as usize + 1);
    Ok(Arc::new(BasisSet {
        params: params.clone(),
        dim,
    }))
}

impl BasisSet {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_ph(&self) -> u32 {
        self.params.n_ph
    }

    /// Atom count (= 2j) of the given chain.
    pub fn atoms(&self, mode: Mode) -> u32 {
        match mode {
            Mode::A => self.params.n_a,
            Mode::B => self.params.n_b,
        }
    }

    /// True when both sets enumerate the same states in the same order.
    pub fn same_space(&self, other: &BasisSet) -> bool {
        self.params.n_a == other.params.n_a
            && self.params.n_b == other.params.n_b
            && self.params.n_ph == other.params.n_ph
    }

    pub fn contains(&self, s: &BasisState) -> bool {
        let (na, nb) = (self.params.n_a as i32, self.params.n_b as i32);
        s.n1 <= self.params.n_ph
            && s.n2 <= self.params.n_ph
            && s.two_m_a.abs() <= na
            && s.two_m_b.abs() <= nb
            && (s.two_m_a + na) % 2 == 0
            && (s.two_m_b + nb) % 2 == 0
    }

    pub fn index_of(&self, s: &BasisState) -> Option<usize> {
        if !self.contains(s) {
            return None;
        }
        let nph1 = self.params.n_ph as usize + 1;
        let na1 = self.params.n_a as usize + 1;
        let nb1 = self.params.n_b as usize + 1;
        let ka = ((s.two_m_a + self.params.n_a as i32) / 2) as usize;
        let kb = ((s.two_m_b + self.params.n_b as i32) / 2) as usize;
        Some(((s.n1 as usize * nph1 + s.n2 as usize) * na1 + ka) * nb1 + kb)
    }

    /// Inverse of [`index_of`](Self::index_of). Panics if `idx >= dim`.
    pub fn state(&self, idx: usize) -> BasisState {
        assert!(idx < self.dim, "basis index {idx} out of range {}", self.dim);
        let nph1 = self.params.n_ph as usize + 1;
        let na1 = self.params.n_a as usize + 1;
        let nb1 = self.params.n_b as usize + 1;
        let kb = idx % nb1;
        let rest = idx / nb1;
        let ka = rest % na1;
        let rest = rest / na1;
        let n2 = rest % nph1;
        let n1 = rest / nph1;
        BasisState {
            n1: n1 as u32,
            n2: n2 as u32,
            two_m_a: 2 * ka as i32 - self.params.n_a as i32,
            two_m_b: 2 * kb as i32 - self.params.n_b as i32,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = BasisState> + '_ {
        (0..self.dim).map(move |i| self.state(i))
    }
}

/// Complex sparse matrix in compressed-row form. Columns within a row are
/// sorted and unique.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    basis: Arc<BasisSet>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOperator {
    /// Builds from coordinate triplets; duplicate coordinates are summed and
    /// exact zeros dropped.
    pub fn from_triplets(
        basis: &Arc<BasisSet>,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> Self {
        let dim = basis.dim();
        triplets.sort_by_key(|x| (x.0, x.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside dimension {dim}");
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut out_cols = Vec::with_capacity(cols.len());
        let mut out_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                out_cols.push(c);
                out_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            basis: Arc::clone(basis),
            row_ptr,
            cols: out_cols,
            vals: out_vals,
        }
    }

    pub fn zero(basis: &Arc<BasisSet>) -> Self {
        Self::from_triplets(basis, Vec::new())
    }

    pub fn identity(basis: &Arc<BasisSet>) -> Self {
        Self::diagonal(basis, |_| 1.0)
    }

    /// Diagonal operator with entry `f(state)`.
    pub fn diagonal(basis: &Arc<BasisSet>, f: impl Fn(BasisState) -> f64) -> Self {
        let triplets = basis
            .iter()
            .enumerate()
            .map(|(i, s)| (i, i, Complex64::new(f(s), 0.0)))
            .collect();
        Self::from_triplets(basis, triplets)
    }

    pub fn basis(&self) -> &Arc<BasisSet> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn row_nnz(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.dim()).map(|r| self.row_nnz(r)).max().unwrap_or(0)
    }

    /// All stored entries as (row, column, value), row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim()).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => ZERO,
        }
    }

    fn check_same(&self, other: &SparseOperator) -> Result<()> {
        if self.basis.same_space(&other.basis) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        if c == ZERO {
            return Self::zero(&self.basis);
        }
        out
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &SparseOperator) -> Result<Self> {
        self.check_same(other)?;
        let triplets = self.entries().chain(other.entries()).collect();
        Ok(Self::from_triplets(&self.basis, triplets))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &SparseOperator) -> Result<Self> {
        self.check_same(other)?;
        let dim = self.dim();
        let mut acc = vec![ZERO; dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut triplets = Vec::new();
        for r in 0..dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if acc[c] == ZERO && !touched.contains(&c) {
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                triplets.push((r, c, acc[c]));
                acc[c] = ZERO;
            }
            touched.clear();
        }
        Ok(Self::from_triplets(&self.basis, triplets))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let triplets = self.entries().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(&self.basis, triplets)
    }

    /// max over entries of |M_rc − conj(M_cr)|.
    pub fn hermiticity_residual(&self) -> f64 {
        self.entries()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry-wise difference between two operators.
    pub fn max_abs_diff(&self, other: &SparseOperator) -> Result<f64> {
        self.check_same(other)?;
        let diff = self.add(&other.scale_real(-1.0))?;
        Ok(diff.vals.iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// `y = M x`. Rows are processed in parallel chunks; each row sum is
    /// accumulated in storage order, so the result does not depend on the
    /// thread count.
    pub fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        y.par_chunks_mut(MATVEC_CHUNK)
            .enumerate()
            .for_each(|(chunk, out)| {
                let base = chunk * MATVEC_CHUNK;
                for (i, yi) in out.iter_mut().enumerate() {
                    let r = base + i;
                    let mut s = ZERO;
                    for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                        s += self.vals[k] * x[self.cols[k]];
                    }
                    *yi = s;
                }
            });
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if !self.basis.same_space(&psi.basis) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: psi.dim(),
            });
        }
        let mut out = vec![ZERO; self.dim()];
        self.apply_into(&psi.amps, &mut out);
        Ok(StateVector {
            basis: Arc::clone(&self.basis),
            amps: out,
        })
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }
}

/// A [`SparseOperator`] known to be Hermitian.
#[derive(Clone, Debug)]
pub struct SparseHermitianOperator(SparseOperator);

impl SparseHermitianOperator {
    /// Relative tolerance (against the largest entry) on |M − M†|.
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(raw: SparseOperator) -> Result<Self> {
        let scale = raw.vals.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let residual = raw.hermiticity_residual();
        if residual > Self::TOLERANCE * scale {
            return Err(Error::NotHermitian(residual));
        }
        Ok(Self(raw))
    }

    pub fn raw(&self) -> &SparseOperator {
        &self.0
    }

    pub fn into_raw(self) -> SparseOperator {
        self.0
    }

    pub fn add(&self, other: &SparseHermitianOperator) -> Result<Self> {
        Ok(Self(self.0.add(&other.0)?))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale_real(c))
    }

    /// ⟨ψ|M|ψ⟩ (complex; the imaginary part is round-off).
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        let m_psi = self.0.apply(psi)?;
        psi.inner(&m_psi)
    }
}

impl std::ops::Deref for SparseHermitianOperator {
    type Target = SparseOperator;

    fn deref(&self) -> &SparseOperator {
        &self.0
    }
}

/// Complex amplitudes over a basis.
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<BasisSet>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(basis: &Arc<BasisSet>) -> Self {
        Self {
            basis: Arc::clone(basis),
            amps: vec![ZERO; basis.dim()],
        }
    }

    /// Unit vector on a single basis state.
    pub fn basis_state(basis: &Arc<BasisSet>, state: BasisState) -> Result<Self> {
        let idx = basis.index_of(&state).ok_or_else(|| Error::InvalidParameter {
            field: "state",
            reason: format!("{state} is not in the truncated basis"),
        })?;
        let mut v = Self::zeros(basis);
        v.amps[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_amplitudes(basis: &Arc<BasisSet>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amps.len(),
            });
        }
        Ok(Self {
            basis: Arc::clone(basis),
            amps,
        })
    }

    pub fn basis(&self) -> &Arc<BasisSet> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, state: BasisState) -> Complex64 {
        self.basis
            .index_of(&state)
            .map(|i| self.amps[i])
            .unwrap_or(ZERO)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(dot(&self.amps, &other.amps))
    }

    /// ‖self − other‖.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if !self.basis.same_space(&other.basis) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// Conjugate-linear in the first argument. Sequential so the summation order
/// is fixed.
pub(crate) fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

pub(crate) fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn raw_from_map(
    basis: &Arc<BasisSet>,
    f: impl Fn(BasisState) -> Option<(BasisState, f64)>,
) -> SparseOperator {
    let triplets = basis
        .iter()
        .enumerate()
        .filter_map(|(col, s)| {
            let (target, value) = f(s)?;
            let row = basis.index_of(&target)?;
            Some((row, col, Complex64::new(value, 0.0)))
        })
        .collect();
    SparseOperator::from_triplets(basis, triplets)
}

/// Photon creation operator; states at the cutoff map to zero.
pub fn creation_op(basis: &Arc<BasisSet>, mode: Mode) -> SparseOperator {
    let n_ph = basis.n_ph();
    raw_from_map(basis, |s| {
        let n = s.photons(mode);
        (n < n_ph).then(|| (s.with_photons(mode, n + 1), f64::from(n + 1).sqrt()))
    })
}

pub fn annihilation_op(basis: &Arc<BasisSet>, mode: Mode) -> SparseOperator {
    raw_from_map(basis, |s| {
        let n = s.photons(mode);
        (n > 0).then(|| (s.with_photons(mode, n - 1), f64::from(n).sqrt()))
    })
}

/// Collective J± on one chain with j = N_chain/2:
/// J±|j,m⟩ = √(j(j+1) − m(m±1)) |j,m±1⟩.
pub fn collective_ladder_op(basis: &Arc<BasisSet>, mode: Mode, dir: Ladder) -> SparseOperator {
    let two_j = basis.atoms(mode) as i64;
    raw_from_map(basis, |s| {
        let two_m = s.two_m(mode) as i64;
        let two_m_new = match dir {
            Ladder::Raise => two_m + 2,
            Ladder::Lower => two_m - 2,
        };
        if two_m_new.abs() > two_j {
            return None;
        }
        // 4·[j(j+1) − m·m'] in integers, symmetric in (m, m').
        let radicand = two_j * (two_j + 2) - two_m * two_m_new;
        Some((
            s.with_two_m(mode, two_m_new as i32),
            (radicand as f64).sqrt() / 2.0,
        ))
    })
}

/// Diagonal S^z of one chain.
pub fn collective_z_op(basis: &Arc<BasisSet>, mode: Mode) -> SparseHermitianOperator {
    SparseHermitianOperator(SparseOperator::diagonal(basis, |s| {
        f64::from(s.two_m(mode)) / 2.0
    }))
}

/// S^x = (J+ + J−)/2.
pub fn collective_x_op(basis: &Arc<BasisSet>, mode: Mode) -> SparseHermitianOperator {
    let plus = collective_ladder_op(basis, mode, Ladder::Raise);
    let minus = collective_ladder_op(basis, mode, Ladder::Lower);
    SparseHermitianOperator(plus.add(&minus).unwrap().scale_real(0.5))
}

/// S^y = (J+ − J−)/(2i).
pub fn collective_y_op(basis: &Arc<BasisSet>, mode: Mode) -> SparseHermitianOperator {
    let plus = collective_ladder_op(basis, mode, Ladder::Raise);
    let minus = collective_ladder_op(basis, mode, Ladder::Lower);
    let diff = plus.add(&minus.scale_real(-1.0)).unwrap();
    SparseHermitianOperator(diff.scale(Complex64::new(0.0, -0.5)))
}

/// Field quadrature a + a†.
pub fn quadrature_op(basis: &Arc<BasisSet>, mode: Mode) -> SparseHermitianOperator {
    let up = creation_op(basis, mode);
    let down = annihilation_op(basis, mode);
    SparseHermitianOperator(up.add(&down).unwrap())
}
