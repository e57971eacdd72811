//! N-qubit states and the frequency-generating Hamiltonian in the
//! computational basis.
//!
//! Basis index `m` is the big-endian bit string of atom states with bit
//! value 0 meaning spin up (+1/2), so the Hamiltonian H = ½Σ_j σ^z_j is
//! diagonal with entries h_m = (N − 2·popcount(m))/2. All constructors
//! return immutable values; everything here is a pure function of its
//! arguments.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest qubit count accepted by the dense-matrix constructors
/// (dimension 2^10 = 1024 keeps a full eigendecomposition fast).
pub const DEFAULT_N_MAX: usize = 10;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = -1e-10;

/// Number of two-level atoms.
///
/// Arbitrarily large counts are fine for the closed-form expressions; the
/// dense constructors additionally enforce [`DEFAULT_N_MAX`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QubitCount(usize);

impl QubitCount {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroQubits);
        }
        Ok(Self(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Hilbert-space dimension 2^n. Only meaningful for dense work; callers
    /// must have passed [`ensure_dense`](Self::ensure_dense) first.
    pub fn dim(self) -> usize {
        assert!(self.0 < 64, "2^{} does not fit in usize", self.0);
        1usize << self.0
    }

    /// Guard for operations that materialize 2^n × 2^n matrices.
    pub fn ensure_dense(self, n_max: usize) -> Result<()> {
        if self.0 > n_max {
            return Err(Error::DimensionOverflow { n: self.0, n_max });
        }
        Ok(())
    }
}

impl std::fmt::Display for QubitCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Density matrix of an N-qubit state in the computational (H-eigen) basis.
///
/// Invariants: Hermitian to 1e-12, trace 1 to 1e-12, and positive
/// semidefinite with min eigenvalue ≥ −1e-10. [`DensityMatrix::new`]
/// checks all three; the in-crate constructors preserve them by
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validating constructor for externally supplied matrices.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        let rho = Self { mat };
        rho.validate()?;
        Ok(rho)
    }

    /// In-crate constructor for matrices valid by construction.
    pub(crate) fn trusted(mat: DMatrix<C64>) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    /// Re-checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let d = self.mat.nrows();
        if self.mat.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.mat.ncols(),
            });
        }
        if d < 2 || !d.is_power_of_two() {
            return Err(Error::NotQubitDimension(d));
        }
        let mut asym = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let delta = (self.mat[(i, j)] - self.mat[(j, i)].conj()).norm();
                asym = asym.max(delta);
            }
        }
        if asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let tr = self.mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let eig = hermitian_eigen(&self.mat)?;
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < PSD_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Qubit count recovered from the dimension.
    pub fn qubits(&self) -> QubitCount {
        QubitCount(self.dim().trailing_zeros() as usize)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Tr(ρ²); 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// The maximally mixed state I/2^N.
    pub fn maximally_mixed(n: QubitCount) -> Result<Self> {
        n.ensure_dense(DEFAULT_N_MAX)?;
        let d = n.dim();
        let w = 1.0 / d as f64;
        Ok(Self::trusted(DMatrix::from_diagonal_element(
            d,
            d,
            C64::new(w, 0.0),
        )))
    }
}

/// Dense Hermitian eigendecomposition used throughout the crate.
pub(crate) fn hermitian_eigen(
    mat: &DMatrix<C64>,
) -> Result<nalgebra::SymmetricEigen<C64, nalgebra::Dyn>> {
    mat.clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenFailure(mat.nrows()))
}

/// Diagonal of H = ½Σ_j σ^z_j: values[m] = (N − 2·popcount(m))/2.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianDiagonal {
    values: Vec<f64>,
}

impl HamiltonianDiagonal {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Level splitting h_m − h_n between two basis states.
    pub fn splitting(&self, m: usize, n: usize) -> f64 {
        self.values[m] - self.values[n]
    }
}

pub fn hamiltonian_diagonal(n: QubitCount) -> HamiltonianDiagonal {
    let nf = n.as_f64();
    let values = (0..n.dim())
        .map(|m| (nf - 2.0 * m.count_ones() as f64) / 2.0)
        .collect();
    HamiltonianDiagonal { values }
}

/// The maximally correlated state (|0…0⟩ + |1…1⟩)/√2 as a density matrix.
pub fn ghz_state(n: QubitCount) -> Result<DensityMatrix> {
    n.ensure_dense(DEFAULT_N_MAX)?;
    let d = n.dim();
    let mut mat = DMatrix::zeros(d, d);
    let half = C64::new(0.5, 0.0);
    for &i in &[0, d - 1] {
        for &j in &[0, d - 1] {
            mat[(i, j)] = half;
        }
    }
    Ok(DensityMatrix::trusted(mat))
}

/// The uncorrelated coherent spin state (|+⟩⟨+|)^⊗N: every entry 2^{-N}.
pub fn css_state(n: QubitCount) -> Result<DensityMatrix> {
    n.ensure_dense(DEFAULT_N_MAX)?;
    let d = n.dim();
    let w = C64::new(1.0 / d as f64, 0.0);
    Ok(DensityMatrix::trusted(DMatrix::from_element(d, d, w)))
}

/// Haar-random pure state, deterministic in the seed.
///
/// Draws a complex standard-normal vector from a ChaCha8 stream, normalizes
/// it and takes the outer product. The same seed yields a bit-identical
/// matrix; that determinism is part of the contract.
pub fn random_pure_state(n: QubitCount, seed: u64) -> Result<DensityMatrix> {
    n.ensure_dense(DEFAULT_N_MAX)?;
    let d = n.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amp: Vec<C64> = Vec::with_capacity(d);
    for _ in 0..d {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        amp.push(C64::new(re, im));
    }
    let norm_sqr: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
    let mat = DMatrix::from_fn(d, d, |i, j| amp[i] * amp[j].conj() / norm_sqr);
    Ok(DensityMatrix::trusted(mat))
}

/// Variance of H in the state ρ: Tr(ρH²) − (Tr(ρH))².
///
/// For pure states 4·Var(H) equals the initial factor I_ρ, which makes this
/// an independent cross-check on the SLD solver.
pub fn variance_of_h(rho: &DensityMatrix) -> f64 {
    let h = hamiltonian_diagonal(rho.qubits());
    let mut mean = 0.0;
    let mut second = 0.0;
    for m in 0..rho.dim() {
        let p = rho.entry(m, m).re;
        let hm = h.values()[m];
        mean += p * hm;
        second += p * hm * hm;
    }
    second - mean * mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn n(v: usize) -> QubitCount {
        QubitCount::new(v).unwrap()
    }

    #[test]
    fn qubit_count_rejects_zero() {
        assert!(matches!(QubitCount::new(0), Err(Error::ZeroQubits)));
    }

    #[test]
    fn dense_limit_enforced() {
        assert!(matches!(
            ghz_state(n(DEFAULT_N_MAX + 1)),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(ghz_state(n(DEFAULT_N_MAX)).is_ok());
    }

    #[test]
    fn ghz_single_qubit_is_plus_state() {
        let rho = ghz_state(n(1)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(rho.entry(i, j).re, 0.5, max_relative = 1e-15);
                assert_eq!(rho.entry(i, j).im, 0.0);
            }
        }
    }

    #[test]
    fn ghz_three_qubits_has_four_corner_entries() {
        let rho = ghz_state(n(3)).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let expected = if (i == 0 || i == 7) && (j == 0 || j == 7) {
                    0.5
                } else {
                    0.0
                };
                assert_eq!(rho.entry(i, j), C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn css_entries_are_uniform() {
        let rho = css_state(n(2)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(rho.entry(i, j), C64::new(0.25, 0.0));
            }
        }
        let rho1 = css_state(n(1)).unwrap();
        assert_eq!(rho1.entry(0, 1), C64::new(0.5, 0.0));
    }

    #[test]
    fn constructors_produce_valid_states() {
        for nn in 1..=4 {
            ghz_state(n(nn)).unwrap().validate().unwrap();
            css_state(n(nn)).unwrap().validate().unwrap();
            random_pure_state(n(nn), 7).unwrap().validate().unwrap();
            DensityMatrix::maximally_mixed(n(nn))
                .unwrap()
                .validate()
                .unwrap();
        }
    }

    #[test]
    fn random_pure_state_is_pure_and_deterministic() {
        let a = random_pure_state(n(3), 12345).unwrap();
        let b = random_pure_state(n(3), 12345).unwrap();
        assert_eq!(a, b);
        assert_relative_eq!(a.purity(), 1.0, epsilon = 1e-12);
        let c = random_pure_state(n(3), 12346).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn hamiltonian_diagonal_known_values() {
        assert_eq!(hamiltonian_diagonal(n(1)).values(), &[0.5, -0.5]);
        assert_eq!(hamiltonian_diagonal(n(2)).values(), &[1.0, 0.0, 0.0, -1.0]);
        // m = 5 = 0b101 has popcount 2, so h = (3 − 4)/2.
        assert_eq!(hamiltonian_diagonal(n(3)).values()[5], -0.5);
    }

    #[test]
    fn hamiltonian_spectrum_is_symmetric() {
        for nn in 1..=6 {
            let mut v = hamiltonian_diagonal(n(nn)).values().to_vec();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let negated_rev: Vec<f64> = v.iter().rev().map(|x| -x).collect();
            assert_eq!(v, negated_rev);
            assert_eq!(v[v.len() - 1], nn as f64 / 2.0);
        }
    }

    #[test]
    fn variance_of_h_ghz_by_support_summation() {
        for nn in 1..=6 {
            let rho = ghz_state(n(nn)).unwrap();
            // Oracle: direct summation over the two support levels ±N/2 with
            // weight 1/2 each, mean zero.
            let half_n = nn as f64 / 2.0;
            let oracle = 0.5 * half_n.powi(2) + 0.5 * half_n.powi(2);
            assert_relative_eq!(variance_of_h(&rho), oracle, max_relative = 1e-12);
        }
    }

    #[test]
    fn variance_of_h_css_matches_binomial_enumeration() {
        for nn in 1..=6 {
            let rho = css_state(n(nn)).unwrap();
            // Oracle: enumerate popcount weights of the uniform distribution.
            let d = 1usize << nn;
            let mut mean = 0.0;
            let mut second = 0.0;
            for m in 0..d {
                let h = (nn as f64 - 2.0 * m.count_ones() as f64) / 2.0;
                mean += h / d as f64;
                second += h * h / d as f64;
            }
            let oracle = second - mean * mean;
            assert_relative_eq!(variance_of_h(&rho), oracle, max_relative = 1e-12);
            assert_relative_eq!(oracle, nn as f64 / 4.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn variance_of_h_vanishes_on_basis_states() {
        let d = 8;
        for m in 0..d {
            let mut mat = DMatrix::zeros(d, d);
            mat[(m, m)] = C64::new(1.0, 0.0);
            let rho = DensityMatrix::new(mat).unwrap();
            assert!(variance_of_h(&rho).abs() < 1e-14);
        }
    }

    #[test]
    fn new_rejects_invalid_matrices() {
        // Wrong dimension.
        let bad = DMatrix::from_element(3, 3, C64::new(1.0 / 3.0, 0.0));
        assert!(matches!(
            DensityMatrix::new(bad),
            Err(Error::NotQubitDimension(3))
        ));
        // Non-Hermitian.
        let mut mat = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        mat[(0, 1)] = C64::new(0.3, 0.0);
        assert!(matches!(
            DensityMatrix::new(mat),
            Err(Error::NotHermitian(_))
        ));
        // Wrong trace.
        let mat = DMatrix::from_diagonal_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(DensityMatrix::new(mat), Err(Error::InvalidTrace(_))));
        // Not PSD: eigenvalues 1.5 and −0.5.
        let mut mat = DMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        mat[(0, 1)] = C64::new(1.0, 0.0);
        mat[(1, 0)] = C64::new(1.0, 0.0);
        assert!(matches!(
            DensityMatrix::new(mat),
            Err(Error::NotPositiveSemidefinite(_))
        ));
    }
}
