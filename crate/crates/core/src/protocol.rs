//! Total-time resource accounting: splitting a budget T into experiments,
//! optimal interrogation times, and the uniform-division check.
//!
//! A total time T divided into n experiments of length t yields
//! F_T = Σ_j F_{ρ_j,t_j}; for identical experiments F_T = (T/t)·F_{ρ,t}.
//! The optimizers maximize that objective over t, treating n = T/t as
//! continuous and reporting the nearest-integer re-evaluation alongside.
//! Closed forms exist for GHZ/CSS under the Markovian and quadratic
//! short-time laws; everything else goes through derivative-free numeric
//! maximization on a log-t bracket.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::dephasing::{DecoherenceModel, ModelKind, NoiseGeometry};
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, QubitCount};
use crate::parallel::par_map_range;
use crate::qfi::{analytic_qfi_css_local, analytic_qfi_ghz, qfi_at};

/// Relative tolerance in t for the golden-section stage.
const GOLDEN_REL_TOL: f64 = 1e-8;
/// Relative probe step for the parabolic refinement after golden section.
const REFINE_STEP: f64 = 1e-4;
/// Distance (in log t, units of the tolerance) from a bracket edge at which
/// the maximizer is treated as having run into the edge.
const EDGE_FACTOR: f64 = 10.0;

const ALLOCATION_MAX_ITERS: usize = 20_000;

/// A total time split into positive interrogation times.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolBudget {
    total_time: f64,
    times: Vec<f64>,
}

impl ProtocolBudget {
    /// Validates that the times are positive and sum to `total_time` within
    /// relative 1e-10.
    pub fn new(total_time: f64, times: Vec<f64>) -> Result<Self> {
        if total_time <= 0.0 || !total_time.is_finite() {
            return Err(Error::NonPositive {
                name: "total_time",
                value: total_time,
            });
        }
        if let Some(&bad) = times.iter().find(|&&t| t <= 0.0 || !t.is_finite()) {
            return Err(Error::NonPositive {
                name: "interrogation time",
                value: bad,
            });
        }
        let sum: f64 = times.iter().sum();
        if (sum - total_time).abs() > 1e-10 * total_time {
            return Err(Error::BudgetMismatch {
                sum,
                total: total_time,
            });
        }
        Ok(Self { total_time, times })
    }

    /// n equal slices of T.
    pub fn uniform(n: usize, total_time: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::NonPositive {
                name: "n",
                value: 0.0,
            });
        }
        let t = total_time / n as f64;
        Self::new(total_time, vec![t; n])
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Initial-state family with a closed-form QFI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    Ghz,
    Css,
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateClass::Ghz => write!(f, "ghz"),
            StateClass::Css => write!(f, "css"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizeMethod {
    ClosedForm,
    Numeric,
}

/// Result of an interrogation-time optimization.
#[derive(Clone, Debug, Serialize)]
pub struct OptimumReport {
    pub t_star: f64,
    /// Continuous experiment count T/t_star.
    pub n_star: f64,
    pub f_max: f64,
    pub method: OptimizeMethod,
    /// Nearest integer number of experiments (at least 1).
    pub n_integer: u64,
    /// Total QFI re-evaluated at t = T/n_integer.
    pub f_at_integer: f64,
}

/// Total QFI F_T = Σ_j F_{ρ_j,t_j} for per-experiment states and times.
pub fn total_qfi(
    states: &[DensityMatrix],
    budget: &ProtocolBudget,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
) -> Result<f64> {
    if states.len() != budget.times().len() {
        return Err(Error::LengthMismatch {
            states: states.len(),
            times: budget.times().len(),
        });
    }
    let mut sum = 0.0;
    for (rho, &t) in states.iter().zip(budget.times()) {
        sum += qfi_at(rho, t, model, geometry)?;
    }
    Ok(sum)
}

/// Per-experiment analytic QFI for a state class, when one exists.
fn analytic_single(
    state: StateClass,
    n: QubitCount,
    t: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
) -> Result<f64> {
    match (state, geometry) {
        (StateClass::Ghz, _) => analytic_qfi_ghz(n, t, model, geometry),
        (StateClass::Css, NoiseGeometry::Local) => analytic_qfi_css_local(n, t, model),
        (StateClass::Css, NoiseGeometry::Collective) => Err(Error::UnsupportedCombination(
            "css/collective: no closed-form QFI, use the exact solver for N within the dense \
             limit"
                .into(),
        )),
    }
}

/// Closed-form optimal interrogation time and maximal total QFI.
///
/// Supported combinations and their optima:
///
/// | state | model     | geometry   | t_star        | f_max              |
/// |-------|-----------|------------|---------------|--------------------|
/// | GHZ   | Markovian | Local      | 1/(2γN)       | NT/(2γe)           |
/// | CSS   | Markovian | Local      | 1/(2γ)        | NT/(2γe)           |
/// | GHZ   | Zeno      | Local      | 1/(γ√(2N))    | N^{3/2}T/(γ√(2e))  |
/// | GHZ   | Zeno      | Collective | 1/(√2·γN)     | NT/(γ√(2e))        |
/// | CSS   | Zeno      | Local      | 1/(√2·γ)      | NT/(γ√(2e))        |
///
/// Anything else returns an unsupported-combination error naming the reason.
pub fn optimize_time_closed_form(
    state: StateClass,
    n: QubitCount,
    total_time: f64,
    kind: ModelKind,
    gamma: f64,
    geometry: NoiseGeometry,
) -> Result<OptimumReport> {
    if total_time <= 0.0 || !total_time.is_finite() {
        return Err(Error::NonPositive {
            name: "total_time",
            value: total_time,
        });
    }
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::NonPositive {
            name: "gamma",
            value: gamma,
        });
    }
    let nf = n.as_f64();
    let sqrt_2e = (2.0 * std::f64::consts::E).sqrt();
    let (t_star, f_max) = match (state, kind, geometry) {
        (StateClass::Ghz, ModelKind::Markovian, NoiseGeometry::Local) => (
            1.0 / (2.0 * gamma * nf),
            nf * total_time / (2.0 * gamma * std::f64::consts::E),
        ),
        (StateClass::Css, ModelKind::Markovian, NoiseGeometry::Local) => (
            1.0 / (2.0 * gamma),
            nf * total_time / (2.0 * gamma * std::f64::consts::E),
        ),
        (StateClass::Ghz, ModelKind::Zeno, NoiseGeometry::Local) => (
            1.0 / (gamma * (2.0 * nf).sqrt()),
            nf.powf(1.5) * total_time / (gamma * sqrt_2e),
        ),
        (StateClass::Ghz, ModelKind::Zeno, NoiseGeometry::Collective) => (
            1.0 / (std::f64::consts::SQRT_2 * gamma * nf),
            nf * total_time / (gamma * sqrt_2e),
        ),
        (StateClass::Css, ModelKind::Zeno, NoiseGeometry::Local) => (
            1.0 / (std::f64::consts::SQRT_2 * gamma),
            nf * total_time / (gamma * sqrt_2e),
        ),
        (state, kind, geometry) => {
            return Err(Error::UnsupportedCombination(format!(
                "{state}/{kind}/{geometry}: no closed-form optimum; use the numeric optimizer"
            )));
        }
    };
    let model = DecoherenceModel::from_kind(kind, gamma)?;
    let single = |t: f64| analytic_single(state, n, t, &model, geometry);
    finish_report(
        t_star,
        f_max,
        total_time,
        OptimizeMethod::ClosedForm,
        single,
    )
}

/// Golden-section maximization of `objective` over log t, followed by one
/// parabolic refinement that recovers the maximizer position below the
/// flat-top resolution of pure section search.
fn golden_max_log(
    objective: &dyn Fn(f64) -> Result<f64>,
    bracket: (f64, f64),
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    if lo <= 0.0 || hi <= lo {
        return Err(Error::BracketFailure { lo, hi });
    }
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let eval = |u: f64| objective(u.exp());
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > rel_tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (mut u_best, mut f_best) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    // Parabolic vertex through three points around the golden result.
    let du = REFINE_STEP;
    let f_minus = eval(u_best - du)?;
    let f_plus = eval(u_best + du)?;
    let curvature = f_minus - 2.0 * f_best + f_plus;
    if curvature < 0.0 {
        let shift = 0.5 * du * (f_minus - f_plus) / curvature;
        let u_refined = u_best + shift.clamp(-du, du);
        let f_refined = eval(u_refined)?;
        if f_refined >= f_best {
            u_best = u_refined;
            f_best = f_refined;
        }
    }
    Ok((u_best.exp(), f_best))
}

fn finish_report(
    t_star: f64,
    f_max: f64,
    total_time: f64,
    method: OptimizeMethod,
    single: impl Fn(f64) -> Result<f64>,
) -> Result<OptimumReport> {
    let n_star = total_time / t_star;
    let n_integer = (n_star.round().max(1.0)) as u64;
    let t_integer = total_time / n_integer as f64;
    let f_at_integer = n_integer as f64 * single(t_integer)?;
    Ok(OptimumReport {
        t_star,
        n_star,
        f_max,
        method,
        n_integer,
        f_at_integer,
    })
}

/// Drives the shared numeric maximizer for a per-experiment QFI function.
fn optimize_single(
    single: impl Fn(f64) -> Result<f64>,
    total_time: f64,
    bracket: (f64, f64),
) -> Result<OptimumReport> {
    if total_time <= 0.0 || !total_time.is_finite() {
        return Err(Error::NonPositive {
            name: "total_time",
            value: total_time,
        });
    }
    let objective = |t: f64| -> Result<f64> { Ok(total_time / t * single(t)?) };
    let (t_star, f_max) = golden_max_log(&objective, bracket, GOLDEN_REL_TOL)?;
    if !f_max.is_finite() || f_max <= 0.0 {
        return Err(Error::DegenerateObjective);
    }
    let edge = EDGE_FACTOR * GOLDEN_REL_TOL;
    if (t_star.ln() - bracket.0.ln()).abs() < edge || (bracket.1.ln() - t_star.ln()).abs() < edge
    {
        return Err(Error::BracketFailure {
            lo: bracket.0,
            hi: bracket.1,
        });
    }
    finish_report(t_star, f_max, total_time, OptimizeMethod::Numeric, single)
}

/// Default log-t bracket [1e-4/γ, 1e2/γ] around the rate scale γ.
pub fn default_bracket(gamma: f64) -> (f64, f64) {
    (1e-4 / gamma, 1e2 / gamma)
}

/// Numeric maximization of (T/t)·F_{ρ,t} for an explicit state, via the
/// exact solver.
///
/// The bracket must contain an interior maximum; a monotone objective is
/// reported as a bracket failure and an identically zero one (states
/// commuting with H) as a degenerate objective.
pub fn optimize_time_numeric(
    state: &DensityMatrix,
    total_time: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
    bracket: (f64, f64),
) -> Result<OptimumReport> {
    optimize_single(
        |t| qfi_at(state, t, model, geometry),
        total_time,
        bracket,
    )
}

/// Numeric maximization of (T/t)·F for a state class via the analytic QFI
/// formulas; valid for arbitrarily large N.
pub fn optimize_time_analytic(
    state: StateClass,
    n: QubitCount,
    total_time: f64,
    model: &DecoherenceModel,
    geometry: NoiseGeometry,
    bracket: (f64, f64),
) -> Result<OptimumReport> {
    optimize_single(
        |t| analytic_single(state, n, t, model, geometry),
        total_time,
        bracket,
    )
}

/// Outcome of the uniform-division check for one (n, T, c, γ) point.
#[derive(Clone, Debug, Serialize)]
pub struct UniformAllocationReport {
    pub n: usize,
    pub total_time: f64,
    pub c: f64,
    pub gamma: f64,
    /// Objective Σ t_j²/(γ²t_j² + c) at the uniform allocation.
    pub uniform_value: f64,
    /// Best objective found over all restarts.
    pub best_value: f64,
    pub best_allocation: Vec<f64>,
    /// (best − uniform)/uniform.
    pub gap_relative: f64,
    /// False when some allocation beat uniform by more than 1e-9 relative.
    pub uniform_is_best: bool,
    pub restarts: usize,
    pub converged_restarts: usize,
    /// Gradient-ascent iteration count per restart.
    pub iterations: Vec<usize>,
}

/// The Zeno-bound allocation objective Σ_j t_j²/(γ²t_j² + c); c plays the
/// role of 1/N (local) or 1/N² (collective).
pub fn allocation_objective(times: &[f64], c: f64, gamma: f64) -> f64 {
    times
        .iter()
        .map(|&t| t * t / (gamma * gamma * t * t + c))
        .sum()
}

/// Analytic gradient ∂_j = 2c·t_j/(γ²t_j² + c)².
pub fn allocation_gradient(times: &[f64], c: f64, gamma: f64) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            let denom = gamma * gamma * t * t + c;
            2.0 * c * t / (denom * denom)
        })
        .collect()
}

/// Euclidean projection onto {t_j ≥ floor, Σ t_j = total}.
fn project_allocation(times: &[f64], total: f64, floor: f64) -> Vec<f64> {
    let n = times.len();
    let budget = total - floor * n as f64;
    let shifted: Vec<f64> = times.iter().map(|&t| t - floor).collect();
    // Sort-based simplex projection.
    let mut sorted = shifted.clone();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &value) in sorted.iter().enumerate() {
        cumulative += value;
        let candidate = (cumulative - budget) / (k + 1) as f64;
        if value - candidate > 0.0 {
            theta = candidate;
        }
    }
    shifted
        .iter()
        .map(|&y| (y - theta).max(0.0) + floor)
        .collect()
}

fn ascend_allocation(
    mut times: Vec<f64>,
    c: f64,
    gamma: f64,
    total: f64,
) -> (f64, Vec<f64>, bool, usize) {
    let floor = 1e-10 * total;
    let mut value = allocation_objective(&times, c, gamma);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < ALLOCATION_MAX_ITERS {
        iterations += 1;
        let gradient = allocation_gradient(&times, c, gamma);
        let mean = gradient.iter().sum::<f64>() / gradient.len() as f64;
        let projected: Vec<f64> = gradient.iter().map(|g| g - mean).collect();
        let norm = projected.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm * total <= 1e-13 * value.max(1e-300) {
            converged = true;
            break;
        }
        let mut step = 0.25 * total / norm;
        let mut improved = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = times
                .iter()
                .zip(&projected)
                .map(|(&t, &g)| t + step * g)
                .collect();
            let candidate = project_allocation(&candidate, total, floor);
            let candidate_value = allocation_objective(&candidate, c, gamma);
            if candidate_value > value {
                times = candidate;
                value = candidate_value;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            // No ascent direction survives the projection at fp resolution.
            converged = true;
            break;
        }
    }
    (value, times, converged, iterations)
}

/// Numerically probes whether the uniform division of T into n experiments
/// maximizes Σ_j t_j²/(γ²t_j² + c) over the simplex Σt_j = T.
///
/// Restart 0 starts from the uniform point (so the reported best can never
/// fall below it); the remaining `trials` starts are random interior points
/// drawn deterministically from `seed`. A non-uniform winner is flagged,
/// not treated as an error: outside the regime γ²(T/n)² ≤ c the maximum
/// genuinely concentrates the budget on fewer experiments.
pub fn verify_uniform_allocation(
    n: usize,
    total_time: f64,
    c: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<UniformAllocationReport> {
    if n < 2 {
        return Err(Error::NonPositive {
            name: "n (need at least 2 experiments)",
            value: n as f64,
        });
    }
    if total_time <= 0.0 {
        return Err(Error::NonPositive {
            name: "total_time",
            value: total_time,
        });
    }
    if c <= 0.0 {
        return Err(Error::NonPositive { name: "c", value: c });
    }
    if gamma <= 0.0 {
        return Err(Error::NonPositive {
            name: "gamma",
            value: gamma,
        });
    }
    let uniform = vec![total_time / n as f64; n];
    let uniform_value = allocation_objective(&uniform, c, gamma);

    let runs = par_map_range(trials + 1, |restart| {
        let start = if restart == 0 {
            uniform.clone()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            );
            // Exponential weights give a uniform draw from the simplex.
            let weights: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1) + 1e-12).collect();
            let sum: f64 = weights.iter().sum();
            weights.iter().map(|w| w / sum * total_time).collect()
        };
        ascend_allocation(start, c, gamma, total_time)
    });

    let converged_restarts = runs.iter().filter(|r| r.2).count();
    if converged_restarts == 0 {
        return Err(Error::NonConvergence {
            iterations: ALLOCATION_MAX_ITERS,
        });
    }
    let iterations: Vec<usize> = runs.iter().map(|r| r.3).collect();
    let best = runs
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then_with(|| j.cmp(i))
        })
        .map(|(_, r)| r)
        .expect("at least one restart");
    let gap_relative = (best.0 - uniform_value) / uniform_value;
    Ok(UniformAllocationReport {
        n,
        total_time,
        c,
        gamma,
        uniform_value,
        best_value: best.0,
        best_allocation: best.1.clone(),
        gap_relative,
        uniform_is_best: gap_relative <= 1e-9,
        restarts: trials + 1,
        converged_restarts,
        iterations,
    })
}
