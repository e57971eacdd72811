//! Lyapunov-equation residuals of the SLD solver across a broad sample of
//! dephased random states.

use nalgebra::DMatrix;

use ramsey_core::dephasing::{apply_dephasing, DecoherenceModel, NoiseGeometry};
use ramsey_core::hilbert::{
    hamiltonian_diagonal, random_pure_state, DensityMatrix, HamiltonianDiagonal, QubitCount, C64,
};
use ramsey_core::parallel::par_map;
use ramsey_core::qfi::{solve_sld, KERNEL_RELATIVE_CUTOFF};

/// Max |entry| of σL + Lσ + 2i[H, σ] projected onto the support of σ.
fn support_residual(sigma: &DensityMatrix, hdiag: &HamiltonianDiagonal, sld: &DMatrix<C64>) -> f64 {
    let d = sigma.dim();
    let b = DMatrix::from_fn(d, d, |m, n| {
        C64::new(0.0, -2.0 * hdiag.splitting(m, n)) * sigma.entry(m, n)
    });
    let residual = sigma.matrix() * sld + sld * sigma.matrix() - b;
    let eig = sigma
        .matrix()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .unwrap();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut projector = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        if eig.eigenvalues[i] > KERNEL_RELATIVE_CUTOFF * lambda_max {
            let v = eig.eigenvectors.column(i);
            projector += v * v.adjoint();
        }
    }
    let projected = &projector * residual * &projector;
    projected.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn residuals_stay_below_threshold_across_models_and_sizes() {
    // 50 random states spread over N = 2..=6, five times per model, both
    // geometries.
    let times = [0.05, 0.2, 0.5, 1.0, 2.0];
    let models = [
        DecoherenceModel::markovian(0.3).unwrap(),
        DecoherenceModel::zeno(0.8).unwrap(),
    ];
    let mut cases = Vec::new();
    for seed in 0..50u64 {
        let n = 2 + (seed as usize) % 5;
        for t in times {
            for model in &models {
                for geometry in [NoiseGeometry::Local, NoiseGeometry::Collective] {
                    cases.push((n, seed, t, model.clone(), geometry));
                }
            }
        }
    }
    let worst = par_map(&cases, |(n, seed, t, model, geometry)| {
        let qubits = QubitCount::new(*n).unwrap();
        let rho = random_pure_state(qubits, *seed).unwrap();
        let gamma_t = model.gamma_at(*t).unwrap();
        let sigma = apply_dephasing(&rho, gamma_t, *geometry).unwrap();
        let hdiag = hamiltonian_diagonal(qubits);
        let solution = solve_sld(&sigma, &hdiag).unwrap();
        let herm = (&solution.sld - solution.sld.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(herm < 1e-10, "non-Hermitian SLD: {herm}");
        assert!(solution.qfi >= 0.0);
        support_residual(&sigma, &hdiag, &solution.sld)
    })
    .into_iter()
    .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "worst Lyapunov residual {worst}");
}
