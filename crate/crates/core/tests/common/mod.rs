//! Test-only oracles built without the collective basis or the sparse
//! machinery: dense Kronecker products of per-atom Pauli matrices and Fock
//! ladders, diagonalised with nalgebra.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Annihilation operator on Fock states 0..=n_ph.
pub fn annihilation(n_ph: usize) -> CMat {
    let mut a = CMat::zeros(n_ph + 1, n_ph + 1);
    for n in 1..=n_ph {
        a[(n - 1, n)] = c((n as f64).sqrt());
    }
    a
}

/// Pauli x, y, z in the basis (|g⟩, |e⟩) with σ_z|g⟩ = −|g⟩.
pub fn paulis() -> [CMat; 3] {
    let i = Complex64::new(0.0, 1.0);
    let sx = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
    let sy = CMat::from_row_slice(2, 2, &[c(0.0), i, -i, c(0.0)]);
    let sz = CMat::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(1.0)]);
    [sx, sy, sz]
}

/// Embeds `op` acting on factor `slot` of a tensor product with `dims`.
pub fn embed(op: &CMat, slot: usize, dims: &[usize]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for (k, &d) in dims.iter().enumerate() {
        let factor = if k == slot { op.clone() } else { eye(d) };
        out = kron(&out, &factor);
    }
    out
}

pub struct Evolver {
    vectors: CMat,
    values: DVector<f64>,
}

impl Evolver {
    pub fn new(h: &CMat) -> Self {
        let herm = (h + h.adjoint()) * c(0.5);
        let eig = SymmetricEigen::new(herm);
        Self {
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        }
    }

    pub fn evolve(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let mut coeff = self.vectors.ad_mul(psi);
        for (x, &l) in coeff.iter_mut().zip(self.values.iter()) {
            *x *= Complex64::from_polar(1.0, -l * t);
        }
        &self.vectors * coeff
    }
}

pub fn expect(op: &CMat, psi: &DVector<Complex64>) -> f64 {
    psi.dotc(&(op * psi)).re
}

/// Unreduced model: two Fock modes and N_a + N_b individual spin-½ atoms.
/// Factor order: mode 1, mode 2, atoms of chain a, atoms of chain b.
pub struct FullSpinModel {
    pub h: CMat,
    pub hq: CMat,
    /// Projector onto maximal total spin in both chains.
    pub symmetric: CMat,
    pub psi0: DVector<Complex64>,
}

pub struct FullParams {
    pub n_a: usize,
    pub n_b: usize,
    pub n_ph: usize,
    pub omega_q: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub a: f64,
}

impl FullSpinModel {
    pub fn new(p: &FullParams) -> Self {
        let f = p.n_ph + 1;
        let mut dims = vec![f, f];
        dims.extend(std::iter::repeat_n(2, p.n_a + p.n_b));
        let dim: usize = dims.iter().product();
        let [px, py, pz] = paulis();
        let half = c(0.5);

        let chain = |first: usize, count: usize| -> [CMat; 3] {
            let mut s = [CMat::zeros(dim, dim), CMat::zeros(dim, dim), CMat::zeros(dim, dim)];
            for atom in first..first + count {
                s[0] += embed(&px, atom, &dims) * half;
                s[1] += embed(&py, atom, &dims) * half;
                s[2] += embed(&pz, atom, &dims) * half;
            }
            s
        };
        let sa = chain(2, p.n_a);
        let sb = chain(2 + p.n_a, p.n_b);
        let a1 = embed(&annihilation(p.n_ph), 0, &dims);
        let a2 = embed(&annihilation(p.n_ph), 1, &dims);
        let id = eye(dim);

        let casimir = |s: &[CMat; 3]| &s[0] * &s[0] + &s[1] * &s[1] + &s[2] * &s[2];
        let hq_chain = |s: &[CMat; 3], n: usize| {
            &s[2] * c(p.omega_q)
                + (casimir(s) - &s[2] * &s[2] - &id * c(n as f64 / 2.0)) * c(p.g / n as f64)
        };
        let hq = hq_chain(&sa, p.n_a) + hq_chain(&sb, p.n_b);
        let he = a1.adjoint() * &a1 * c(p.omega_a) + a2.adjoint() * &a2 * c(p.omega_b);
        let i = Complex64::new(0.0, 1.0);
        let plus = |s: &[CMat; 3]| &s[0] + &s[1] * i;
        let minus = |s: &[CMat; 3]| &s[0] - &s[1] * i;
        let hi = &sa[0] * (&a1 + a1.adjoint()) * c(p.g1)
            + &sb[0] * (&a2 + a2.adjoint()) * c(p.g2)
            + (plus(&sa) * minus(&sb) + plus(&sb) * minus(&sa)) * c(p.a);
        let h = &hq + he + hi;

        // maximal-j projector: ∏ over chains of ∏_{j' < j} (S² − j'(j'+1)) / (j(j+1) − j'(j'+1))
        let projector = |s: &[CMat; 3], n: usize| {
            let j = n as f64 / 2.0;
            let mut proj = id.clone();
            let mut jp = j - 1.0;
            while jp >= -1e-9 {
                let num = casimir(s) - &id * c(jp * (jp + 1.0));
                proj = proj * num * c(1.0 / (j * (j + 1.0) - jp * (jp + 1.0)));
                jp -= 1.0;
            }
            proj
        };
        let symmetric = projector(&sa, p.n_a) * projector(&sb, p.n_b);

        // |n1 = N_a⟩ ⊗ |n2 = N_b⟩ ⊗ |g…g⟩: spin index 0 is |g⟩ in every atom factor
        let mut psi0 = DVector::zeros(dim);
        let spin_states = 1usize << (p.n_a + p.n_b);
        psi0[(p.n_a * f + p.n_b) * spin_states] = c(1.0);

        Self { h, hq, symmetric, psi0 }
    }

    /// Norm of the component outside the maximal-j sector.
    pub fn leakage(&self, psi: &DVector<Complex64>) -> f64 {
        (psi - &self.symmetric * psi).norm()
    }
}

/// Single chain of `atoms` spins coupled to one cavity, in the |n, m⟩ basis
/// with matrix elements written out directly. Returns E(t) at `times`.
pub fn single_cavity_energy(
    atoms: usize,
    n_ph: usize,
    omega_q: f64,
    omega_c: f64,
    coupling: f64,
    g: f64,
    times: &[f64],
) -> Vec<f64> {
    let j = atoms as f64 / 2.0;
    let nm = atoms + 1;
    let dim = (n_ph + 1) * nm;
    let idx = |n: usize, k: usize| n * nm + k;
    let m_of = |k: usize| k as f64 - j;
    let mut h = CMat::zeros(dim, dim);
    let mut hq = CMat::zeros(dim, dim);
    for n in 0..=n_ph {
        for k in 0..nm {
            let m = m_of(k);
            let q = omega_q * m + g / atoms as f64 * (j * (j + 1.0) - m * m - atoms as f64 / 2.0);
            hq[(idx(n, k), idx(n, k))] = c(q);
            h[(idx(n, k), idx(n, k))] = c(q + omega_c * n as f64);
            for (dn, dk) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                let (n2, k2) = (n as i64 + dn, k as i64 + dk);
                if n2 < 0 || n2 > n_ph as i64 || k2 < 0 || k2 >= nm as i64 {
                    continue;
                }
                let photon = if dn > 0 { (n as f64 + 1.0).sqrt() } else { (n as f64).sqrt() };
                let m2 = m_of(k2 as usize);
                let spin = 0.5 * (j * (j + 1.0) - m * m2).sqrt();
                h[(idx(n2 as usize, k2 as usize), idx(n, k))] += c(coupling * photon * spin);
            }
        }
    }
    let mut psi0 = DVector::zeros(dim);
    psi0[idx(atoms, 0)] = c(1.0);
    let e0 = expect(&hq, &psi0);
    let ev = Evolver::new(&h);
    times.iter().map(|&t| expect(&hq, &ev.evolve(&psi0, t)) - e0).collect()
}
