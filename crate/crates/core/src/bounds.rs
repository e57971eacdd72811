//! Closed-form upper bounds on the quantum Fisher information.
//!
//! Single-experiment bounds (per geometry, in units of time²):
//!
//! - local:      F ≤ t²·N/(2γ(t) + N/I_ρ)
//! - collective: F ≤ t²/(2γ(t) + 1/I_ρ)
//! - Escher-style (local): F ≤ N·t²/(e^{2γ(t)} − 1 + 1/N), tighter than the
//!   local bound above with I_ρ = N² since e^x − 1 ≥ x.
//!
//! Total-time bounds for a budget T split into experiments (units of time):
//!
//! - Markovian:  NT/(2γ) (local) and T/(2γ) (collective), any division.
//! - Zeno regime γ(t) ≈ (γ²/2)t²: N^{3/2}T/(2γ) (local, optimum at
//!   t = 1/(γ√N)) and NT/(2γ) (collective, optimum at t = 1/(γN)); for the
//!   uncorrelated CSS state under collective noise, √N·T/(2γ) with optimum
//!   t = 1/(γ√N). These carry a small-time-approximation caveat in their
//!   reports: they hold where the quadratic short-time law is accurate,
//!   which the optimal times approach as N grows.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dephasing::ModelKind;
use crate::error::{Error, Result};
use crate::hilbert::QubitCount;

/// One evaluated bound with its arguments, ready for machine-readable
/// output.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_opt: Option<f64>,
    pub arguments: BTreeMap<&'static str, f64>,
    /// True for Zeno-regime totals, which rely on the quadratic
    /// small-time law.
    pub zeno_small_time_approximation: bool,
}

fn check_time(value: f64) -> Result<()> {
    if value < 0.0 || !value.is_finite() {
        return Err(Error::NegativeTime(value));
    }
    Ok(())
}

fn check_gamma_t(value: f64) -> Result<()> {
    if value < 0.0 || !value.is_finite() {
        return Err(Error::NegativeGamma(value));
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value <= 0.0 || !value.is_finite() {
        return Err(Error::NonPositive { name, value });
    }
    Ok(())
}

fn check_i_rho(i_rho: f64) -> Result<()> {
    if i_rho < 0.0 || !i_rho.is_finite() {
        return Err(Error::NegativeInitialFactor(i_rho));
    }
    Ok(())
}

/// Local single-experiment bound t²·N/(2γ_t + N/I_ρ).
///
/// States commuting with H have I_ρ = 0 and zero QFI; by continuity the
/// bound returns 0 there instead of erroring.
pub fn bound_single_local(n: QubitCount, t: f64, gamma_t: f64, i_rho: f64) -> Result<f64> {
    check_time(t)?;
    check_gamma_t(gamma_t)?;
    check_i_rho(i_rho)?;
    if i_rho == 0.0 {
        return Ok(0.0);
    }
    let nf = n.as_f64();
    Ok(t * t * nf / (2.0 * gamma_t + nf / i_rho))
}

/// Collective single-experiment bound t²/(2γ_t + 1/I_ρ).
pub fn bound_single_collective(t: f64, gamma_t: f64, i_rho: f64) -> Result<f64> {
    check_time(t)?;
    check_gamma_t(gamma_t)?;
    check_i_rho(i_rho)?;
    if i_rho == 0.0 {
        return Ok(0.0);
    }
    Ok(t * t / (2.0 * gamma_t + 1.0 / i_rho))
}

/// Tighter local bound N·t²/(e^{2γ_t} − 1 + 1/N).
pub fn bound_escher(n: QubitCount, t: f64, gamma_t: f64) -> Result<f64> {
    check_time(t)?;
    check_gamma_t(gamma_t)?;
    let nf = n.as_f64();
    Ok(nf * t * t / ((2.0 * gamma_t).exp_m1() + 1.0 / nf))
}

/// Markovian total-time bound NT/(2γ) for local noise.
pub fn bound_total_markovian_local(n: QubitCount, total_time: f64, rate: f64) -> Result<f64> {
    check_positive("total_time", total_time)?;
    check_positive("rate", rate)?;
    Ok(n.as_f64() * total_time / (2.0 * rate))
}

/// Markovian total-time bound T/(2γ) for collective noise; N-independent.
pub fn bound_total_markovian_collective(total_time: f64, rate: f64) -> Result<f64> {
    check_positive("total_time", total_time)?;
    check_positive("rate", rate)?;
    Ok(total_time / (2.0 * rate))
}

/// Zeno-regime total bound N^{3/2}·T/(2γ) for local noise, with the optimal
/// interrogation time t = 1/(γ√N) that maximizes T·t/(γ²t² + 1/N) per unit
/// of N.
pub fn bound_total_zeno_local(
    n: QubitCount,
    total_time: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    check_positive("total_time", total_time)?;
    check_positive("gamma", gamma)?;
    let nf = n.as_f64();
    let bound = nf.powf(1.5) * total_time / (2.0 * gamma);
    let t_opt = 1.0 / (gamma * nf.sqrt());
    Ok((bound, t_opt))
}

/// Zeno-regime total bound N·T/(2γ) for collective noise, optimum at
/// t = 1/(γN).
pub fn bound_total_zeno_collective(
    n: QubitCount,
    total_time: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    check_positive("total_time", total_time)?;
    check_positive("gamma", gamma)?;
    let nf = n.as_f64();
    let bound = nf * total_time / (2.0 * gamma);
    let t_opt = 1.0 / (gamma * nf);
    Ok((bound, t_opt))
}

/// Zeno-regime total bound √N·T/(2γ) for the CSS state under collective
/// noise (I_CSS = N), optimum of T·t/(γ²t² + 1/N) at t = 1/(γ√N).
pub fn bound_total_zeno_css_collective(
    n: QubitCount,
    total_time: f64,
    gamma: f64,
) -> Result<(f64, f64)> {
    check_positive("total_time", total_time)?;
    check_positive("gamma", gamma)?;
    let nf = n.as_f64();
    let bound = nf.sqrt() * total_time / (2.0 * gamma);
    let t_opt = 1.0 / (gamma * nf.sqrt());
    Ok((bound, t_opt))
}

/// Evaluates the three single-experiment bounds at one point.
pub fn single_experiment_reports(
    n: QubitCount,
    t: f64,
    gamma_t: f64,
    i_rho: f64,
) -> Result<Vec<BoundReport>> {
    let nf = n.as_f64();
    let base: BTreeMap<&'static str, f64> =
        [("n", nf), ("t", t), ("gamma_t", gamma_t)].into();
    let mut with_i = base.clone();
    with_i.insert("i_rho", i_rho);
    Ok(vec![
        BoundReport {
            name: "single_local",
            value: bound_single_local(n, t, gamma_t, i_rho)?,
            t_opt: None,
            arguments: with_i.clone(),
            zeno_small_time_approximation: false,
        },
        BoundReport {
            name: "single_collective",
            value: bound_single_collective(t, gamma_t, i_rho)?,
            t_opt: None,
            arguments: with_i,
            zeno_small_time_approximation: false,
        },
        BoundReport {
            name: "escher_local",
            value: bound_escher(n, t, gamma_t)?,
            t_opt: None,
            arguments: base,
            zeno_small_time_approximation: false,
        },
    ])
}

/// Evaluates the total-time bounds for one model family.
pub fn total_time_reports(
    n: QubitCount,
    total_time: f64,
    gamma: f64,
    kind: ModelKind,
) -> Result<Vec<BoundReport>> {
    let nf = n.as_f64();
    let args: BTreeMap<&'static str, f64> =
        [("n", nf), ("total_time", total_time), ("gamma", gamma)].into();
    match kind {
        ModelKind::Markovian => Ok(vec![
            BoundReport {
                name: "total_markovian_local",
                value: bound_total_markovian_local(n, total_time, gamma)?,
                t_opt: None,
                arguments: args.clone(),
                zeno_small_time_approximation: false,
            },
            BoundReport {
                name: "total_markovian_collective",
                value: bound_total_markovian_collective(total_time, gamma)?,
                t_opt: None,
                arguments: args,
                zeno_small_time_approximation: false,
            },
        ]),
        ModelKind::Zeno => {
            let (local, t_local) = bound_total_zeno_local(n, total_time, gamma)?;
            let (coll, t_coll) = bound_total_zeno_collective(n, total_time, gamma)?;
            let (css, t_css) = bound_total_zeno_css_collective(n, total_time, gamma)?;
            Ok(vec![
                BoundReport {
                    name: "total_zeno_local",
                    value: local,
                    t_opt: Some(t_local),
                    arguments: args.clone(),
                    zeno_small_time_approximation: true,
                },
                BoundReport {
                    name: "total_zeno_collective",
                    value: coll,
                    t_opt: Some(t_coll),
                    arguments: args.clone(),
                    zeno_small_time_approximation: true,
                },
                BoundReport {
                    name: "total_zeno_css_collective",
                    value: css,
                    t_opt: Some(t_css),
                    arguments: args,
                    zeno_small_time_approximation: true,
                },
            ])
        }
    }
}
