//! Exact SLD solver and quantum Fisher information, the closed-form GHZ/CSS
//! expressions, the initial factor I_ρ, and classical Fisher information for
//! explicit POVM measurements.
//!
//! The symmetric logarithmic derivative L solves the Lyapunov equation
//! σL + Lσ = −2i[H, σ] in the eigenbasis of σ: with σ = Σλ_i|i⟩⟨i| and
//! B = −2i[H, σ], the solution is L_ij = B_ij/(λ_i + λ_j) wherever
//! λ_i + λ_j exceeds the kernel cutoff, and 0 elsewhere (the minimal-norm
//! convention; the QFI does not depend on the kernel block). The QFI of the
//! evolved state is then t²·Tr(σL²) — the t² factor lives in [`qfi_at`], not
//! in [`solve_sld`], so the solver doubles as the I_ρ evaluator.

use nalgebra::DMatrix;

use crate::dephasing::{apply_dephasing, evolve, DecoherenceModel, NoiseGeometry};
use crate::error::{Error, Result};
use crate::hilbert::{
    hamiltonian_diagonal, hermitian_eigen, DensityMatrix, HamiltonianDiagonal, QubitCount, C64,
};

/// Entries of L across eigenvalue pairs with λ_i + λ_j below this fraction
/// of the largest eigenvalue are zeroed.
pub const KERNEL_RELATIVE_CUTOFF: f64 = 1e-12;

/// Phase step (in radians of ωt) for the central finite difference in
/// [`classical_fisher`]; the ω step is this divided by t.
pub const FD_PHASE_STEP: f64 = 1e-5;

/// Outcomes with probability below this floor contribute nothing to the
/// classical Fisher sum.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Solution of the SLD Lyapunov equation for one state.
#[derive(Clone, Debug)]
pub struct SldSolution {
    /// The symmetric logarithmic derivative L (Hermitian).
    pub sld: DMatrix<C64>,
    /// Tr(σL²) without the t² prefactor; equals I_ρ when σ is undephased.
    pub qfi: f64,
    /// Rank of σ above the kernel cutoff.
    pub support_dim: usize,
}

/// Solves σL + Lσ = −2i[H, σ] for the dephased (or initial) state σ.
pub fn solve_sld(sigma: &DensityMatrix, hdiag: &HamiltonianDiagonal) -> Result<SldSolution> {
    let d = sigma.dim();
    if hdiag.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: hdiag.dim(),
        });
    }
    let eig = hermitian_eigen(sigma.matrix())?;
    let vectors = &eig.eigenvectors;
    let lambda = &eig.eigenvalues;

    // B = −2i[H, σ] has entries −2i(h_m − h_n)σ_mn for diagonal H.
    let b = DMatrix::from_fn(d, d, |m, n| {
        C64::new(0.0, -2.0 * hdiag.splitting(m, n)) * sigma.entry(m, n)
    });
    let b_eig = vectors.adjoint() * &b * vectors;

    let lambda_max = lambda.iter().cloned().fold(0.0, f64::max);
    let cutoff = KERNEL_RELATIVE_CUTOFF * lambda_max;

    // Fill the upper triangle and mirror: the denominator is symmetric, so
    // this keeps L exactly Hermitian instead of only up to transform noise.
    let mut l_eig = DMatrix::<C64>::zeros(d, d);
    let mut qfi = 0.0;
    let mut support_dim = 0;
    for i in 0..d {
        if lambda[i] > cutoff {
            support_dim += 1;
        }
        for j in i..d {
            let s = lambda[i] + lambda[j];
            if s > cutoff {
                if i == j {
                    // B̃ has an exactly real diagonal; dropping the noise-level
                    // imaginary part keeps L Hermitian even when s is tiny.
                    let lii = C64::new(b_eig[(i, i)].re / s, 0.0);
                    l_eig[(i, i)] = lii;
                    qfi += lambda[i].max(0.0) * lii.norm_sqr();
                } else {
                    let lij = b_eig[(i, j)] / C64::new(s, 0.0);
                    l_eig[(i, j)] = lij;
                    l_eig[(j, i)] = lij.conj();
                    qfi += (lambda[i].max(0.0) + lambda[j].max(0.0)) * lij.norm_sqr();
                }
            }
        }
    }
    let sld = vectors * l_eig * vectors.adjoint();
    Ok(SldSolution {
        sld,
        qfi,
        support_dim,
    })
}

/// Quantum Fisher information F_{ρ,t} = t²·Tr(Λ_t(ρ)L²) of the dephased
/// state.
///
/// The ω rotation is omitted: it conjugates σ by a diagonal unitary that
/// commutes with H, leaving the QFI unchanged.
pub fn qfi_at(
    rho: &DensityMatrix,
    t: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let gamma_t = model.gamma_at(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let sigma = apply_dephasing(rho, gamma_t, geometry)?;
    let hdiag = hamiltonian_diagonal(rho.qubits());
    let solution = solve_sld(&sigma, &hdiag)?;
    Ok(t * t * solution.qfi)
}

/// Initial factor I_ρ = Tr(ρL_ρ²) of the undephased state; time-independent
/// and at most N².
pub fn sld_initial_factor(rho: &DensityMatrix, hdiag: &HamiltonianDiagonal) -> Result<f64> {
    Ok(solve_sld(rho, hdiag)?.qfi)
}

/// Closed form N²t²e^{−2γ(t)N^k} for the dephased GHZ state; k is 1 for
/// local and 2 for collective noise. Valid for arbitrarily large N.
pub fn analytic_qfi_ghz(
    n: QubitCount,
    t: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let gamma_t = model.gamma_at(t)?;
    let nf = n.as_f64();
    let nk = nf.powi(geometry.ghz_exponent() as i32);
    Ok(nf * nf * t * t * (-2.0 * gamma_t * nk).exp())
}

/// Closed form Nt²e^{−2γ(t)} for the locally dephased CSS state.
pub fn analytic_qfi_css_local(n: QubitCount, t: f64, model: &DecoherenceModel) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let gamma_t = model.gamma_at(t)?;
    Ok(n.as_f64() * t * t * (-2.0 * gamma_t).exp())
}

/// A POVM: positive elements summing to the identity.
#[derive(Clone, Debug)]
pub struct PovmMeasurement {
    elements: Vec<DMatrix<C64>>,
}

impl PovmMeasurement {
    pub fn new(elements: Vec<DMatrix<C64>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let d = elements[0].nrows();
        let mut sum = DMatrix::<C64>::zeros(d, d);
        for (x, element) in elements.iter().enumerate() {
            if element.nrows() != d || element.ncols() != d {
                return Err(Error::InvalidPovm(format!(
                    "element {x} is {}x{}, expected {d}x{d}",
                    element.nrows(),
                    element.ncols()
                )));
            }
            let eig = hermitian_eigen(element)?;
            let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if min < -1e-10 {
                return Err(Error::InvalidPovm(format!(
                    "element {x} has negative eigenvalue {min:.3e}"
                )));
            }
            sum += element;
        }
        for i in 0..d {
            for j in 0..d {
                let expected = if i == j { 1.0 } else { 0.0 };
                if (sum[(i, j)] - C64::new(expected, 0.0)).norm() > 1e-10 {
                    return Err(Error::InvalidPovm(
                        "elements do not sum to the identity".into(),
                    ));
                }
            }
        }
        Ok(Self { elements })
    }

    pub(crate) fn trusted(elements: Vec<DMatrix<C64>>) -> Self {
        Self { elements }
    }

    /// Projectors onto the ±1 eigenspaces of ⊗σ^x (the Ramsey parity
    /// measurement): Π_± = (I ± X^{⊗N})/2.
    pub fn parity_x(n: QubitCount) -> Result<Self> {
        n.ensure_dense(crate::hilbert::DEFAULT_N_MAX)?;
        let d = n.dim();
        let mask = d - 1;
        let mut plus = DMatrix::<C64>::zeros(d, d);
        let mut minus = DMatrix::<C64>::zeros(d, d);
        let half = C64::new(0.5, 0.0);
        for m in 0..d {
            plus[(m, m)] = half;
            minus[(m, m)] = half;
            plus[(m, m ^ mask)] += half;
            minus[(m, m ^ mask)] -= half;
        }
        Ok(Self::trusted(vec![plus, minus]))
    }

    pub fn elements(&self) -> &[DMatrix<C64>] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }
}

fn trace_product_re(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let d = a.nrows();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Classical Fisher information of the outcome distribution
/// p_ω(x) = Tr(ρ_{ω,t}Π_x), with ∂_ω by central finite difference.
pub fn classical_fisher(
    povm: &PovmMeasurement,
    rho: &DensityMatrix,
    omega: f64,
    t: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::NonPositive {
            name: "t",
            value: t,
        });
    }
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: povm.dim(),
        });
    }
    let h_omega = FD_PHASE_STEP / t;
    let probs = |w: f64| -> Result<Vec<f64>> {
        let state = evolve(rho, w, t, model, geometry)?;
        Ok(povm
            .elements()
            .iter()
            .map(|p| trace_product_re(state.matrix(), p))
            .collect())
    };
    let center = probs(omega)?;
    let plus = probs(omega + h_omega)?;
    let minus = probs(omega - h_omega)?;
    let mut fisher = 0.0;
    let mut any_above_floor = false;
    for x in 0..center.len() {
        if center[x] >= PROBABILITY_FLOOR {
            any_above_floor = true;
            let derivative = (plus[x] - minus[x]) / (2.0 * h_omega);
            fisher += derivative * derivative / center[x];
        }
    }
    if !any_above_floor {
        return Err(Error::DegeneratePovm);
    }
    Ok(fisher)
}
