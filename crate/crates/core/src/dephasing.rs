//! The decoherence function γ(t) and the Gaussian dephasing channels.
//!
//! Dephasing acts entrywise in the H eigenbasis: populations are untouched
//! and each coherence is damped by an exact exponential factor (this module
//! is the analytic channel, never a sampled-noise simulator). Local noise
//! draws an independent Gaussian phase per atom with variance 2γ(t), which
//! damps entry (m, n̄) by exp(−γ(t)·d_H(m, n̄)) with d_H the Hamming
//! distance; collective noise is one shared phase, damping by
//! exp(−γ(t)·(h_m − h_n̄)²). On GHZ states the corner coherences pick up
//! exp(−γ(t)·N^k) with k = 1 (local) or 2 (collective), and on product
//! states the local channel factorizes qubit by qubit.
//!
//! The Markovian law γ(t) = rate·t composes as a semigroup,
//! Λ_{t₁+t₂} = Λ_{t₁}Λ_{t₂}; the quadratic short-time law
//! γ(t) = (γ²/2)·t² breaks that composition, which is the defining
//! non-Markovian signature exercised by the tests.

use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{hamiltonian_diagonal, DensityMatrix, HamiltonianDiagonal, C64};

/// Noise geometry: independent phases per atom or one shared phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseGeometry {
    Local,
    Collective,
}

impl NoiseGeometry {
    /// GHZ decoherence exponent k in exp(−γ(t)·N^k).
    pub fn ghz_exponent(self) -> u32 {
        match self {
            NoiseGeometry::Local => 1,
            NoiseGeometry::Collective => 2,
        }
    }
}

impl std::fmt::Display for NoiseGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseGeometry::Local => write!(f, "local"),
            NoiseGeometry::Collective => write!(f, "collective"),
        }
    }
}

/// Closed-form model families (tabulated data has neither).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Markovian,
    Zeno,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Markovian => write!(f, "markovian"),
            ModelKind::Zeno => write!(f, "zeno"),
        }
    }
}

/// The decoherence function γ(t).
#[derive(Clone, Debug, PartialEq)]
pub enum DecoherenceModel {
    /// γ(t) = rate·t.
    Markovian { rate: f64 },
    /// γ(t) = (gamma²/2)·t², the universal short-time law of a Gaussian
    /// environment.
    Zeno { gamma: f64 },
    /// Piecewise-linear interpolation of (t, γ(t)) samples. No
    /// extrapolation beyond the last sample.
    Tabulated { samples: Vec<(f64, f64)> },
}

impl DecoherenceModel {
    pub fn markovian(rate: f64) -> Result<Self> {
        if rate <= 0.0 || !rate.is_finite() {
            return Err(Error::NonPositive {
                name: "rate",
                value: rate,
            });
        }
        Ok(Self::Markovian { rate })
    }

    pub fn zeno(gamma: f64) -> Result<Self> {
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::NonPositive {
                name: "gamma",
                value: gamma,
            });
        }
        Ok(Self::Zeno { gamma })
    }

    /// Samples must start at (0, 0), have strictly increasing t and
    /// nonnegative γ values.
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::TabulatedFormat("no samples".into()));
        }
        if samples[0] != (0.0, 0.0) {
            return Err(Error::TabulatedFormat(format!(
                "first sample must be (0, 0), got ({}, {})",
                samples[0].0, samples[0].1
            )));
        }
        for w in samples.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::TabulatedFormat(format!(
                    "times must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some((t, g)) = samples.iter().find(|(t, g)| !t.is_finite() || *g < 0.0) {
            return Err(Error::TabulatedFormat(format!(
                "invalid sample ({t}, {g}): gamma must be finite and >= 0"
            )));
        }
        Ok(Self::Tabulated { samples })
    }

    /// Loads a tabulated model from a two-column CSV file with header
    /// `t,gamma`, strictly increasing t and first row `0,0`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::TabulatedFormat(e.to_string()))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::TabulatedFormat(e.to_string()))?;
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "gamma" {
            return Err(Error::TabulatedFormat(format!(
                "expected header `t,gamma`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut samples = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::TabulatedFormat(e.to_string()))?;
            let parse = |i: usize| -> Result<f64> {
                record[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::TabulatedFormat(format!("bad number `{}`", &record[i])))
            };
            samples.push((parse(0)?, parse(1)?));
        }
        Self::tabulated(samples)
    }

    /// Builds the closed-form model of the given kind with parameter `gamma`
    /// (Markovian rate or Zeno gamma, both 1/time).
    pub fn from_kind(kind: ModelKind, gamma: f64) -> Result<Self> {
        match kind {
            ModelKind::Markovian => Self::markovian(gamma),
            ModelKind::Zeno => Self::zeno(gamma),
        }
    }

    pub fn kind(&self) -> Option<ModelKind> {
        match self {
            Self::Markovian { .. } => Some(ModelKind::Markovian),
            Self::Zeno { .. } => Some(ModelKind::Zeno),
            Self::Tabulated { .. } => None,
        }
    }

    /// Evaluates γ(t). Tabulated models interpolate linearly and refuse to
    /// extrapolate.
    pub fn gamma_at(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        match self {
            Self::Markovian { rate } => Ok(rate * t),
            Self::Zeno { gamma } => Ok(0.5 * gamma * gamma * t * t),
            Self::Tabulated { samples } => {
                let t_max = samples[samples.len() - 1].0;
                if t > t_max {
                    return Err(Error::TabulatedRange {
                        t,
                        t_min: 0.0,
                        t_max,
                    });
                }
                let idx = samples.partition_point(|(ti, _)| *ti <= t);
                if idx == 0 {
                    return Ok(samples[0].1);
                }
                if idx == samples.len() {
                    return Ok(samples[idx - 1].1);
                }
                let (t0, g0) = samples[idx - 1];
                let (t1, g1) = samples[idx];
                Ok(g0 + (g1 - g0) * (t - t0) / (t1 - t0))
            }
        }
    }
}

/// Local dephasing: entry (m, n̄) ↦ entry·exp(−γ_t·d_H(m, n̄)).
pub fn apply_local_dephasing(rho: &DensityMatrix, gamma_t: f64) -> Result<DensityMatrix> {
    if gamma_t < 0.0 {
        return Err(Error::NegativeGamma(gamma_t));
    }
    let d = rho.dim();
    let mat = DMatrix::from_fn(d, d, |m, n| {
        let hamming = (m ^ n).count_ones() as f64;
        rho.entry(m, n) * (-gamma_t * hamming).exp()
    });
    Ok(DensityMatrix::trusted(mat))
}

/// Collective dephasing: entry (m, n̄) ↦ entry·exp(−γ_t·(h_m − h_n̄)²).
pub fn apply_collective_dephasing(
    rho: &DensityMatrix,
    gamma_t: f64,
    hdiag: &HamiltonianDiagonal,
) -> Result<DensityMatrix> {
    if gamma_t < 0.0 {
        return Err(Error::NegativeGamma(gamma_t));
    }
    if hdiag.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: hdiag.dim(),
        });
    }
    let d = rho.dim();
    let mat = DMatrix::from_fn(d, d, |m, n| {
        let s = hdiag.splitting(m, n);
        rho.entry(m, n) * (-gamma_t * s * s).exp()
    });
    Ok(DensityMatrix::trusted(mat))
}

/// Applies the geometry's dephasing channel with exponent `gamma_t`.
pub fn apply_dephasing(
    rho: &DensityMatrix,
    gamma_t: f64,
    geometry: NoiseGeometry,
) -> Result<DensityMatrix> {
    match geometry {
        NoiseGeometry::Local => apply_local_dephasing(rho, gamma_t),
        NoiseGeometry::Collective => {
            let hdiag = hamiltonian_diagonal(rho.qubits());
            apply_collective_dephasing(rho, gamma_t, &hdiag)
        }
    }
}

/// Full evolution ρ_{ω,t} = e^{−iωtH} Λ_t(ρ) e^{iωtH}.
///
/// Dephasing and the unitary rotation are both entrywise multiplicative in
/// this basis, so they commute; the channel is applied first.
pub fn evolve(
    rho: &DensityMatrix,
    omega: f64,
    t: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
) -> Result<DensityMatrix> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let gamma_t = model.gamma_at(t)?;
    let dephased = apply_dephasing(rho, gamma_t, geometry)?;
    let hdiag = hamiltonian_diagonal(rho.qubits());
    let d = rho.dim();
    let mat = DMatrix::from_fn(d, d, |m, n| {
        let phase = -omega * t * hdiag.splitting(m, n);
        dephased.entry(m, n) * C64::new(phase.cos(), phase.sin())
    });
    Ok(DensityMatrix::trusted(mat))
}
