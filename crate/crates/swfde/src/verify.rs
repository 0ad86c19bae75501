//! Numerical verification of certificates against simulated trajectories.
//!
//! A certificate with decay rate `α`, mismatch `γ`, and dwell bound `τ*`
//! predicts, for signals with average dwell time `τ_a > τ*`, an exponential
//! envelope with effective rate `λ = α − ln γ / τ_a`. The checks here
//! measure the empirical envelope constant and the observed decay rate of a
//! trajectory, and run seeded Monte Carlo batches of random histories and
//! random admissible signals.

use crate::certify::Certificate;
use crate::error::{Error, Result};
use crate::simulate::{simulate_with, Psi, Trajectory};
use crate::switching::{generate_adt_signal, AdtSpec};
use crate::system::{InitialHistory, SwitchedSystem};
use crate::tol;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Thresholds for [`envelope_check_with`].
#[derive(Copy, Clone, Debug)]
pub struct EnvelopeConfig {
    /// Largest acceptable empirical envelope constant.
    pub m_cap: f64,
    /// Slack subtracted from the target rate before comparing the fit.
    pub fit_slack: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        Self { m_cap: tol::ENVELOPE_CAP, fit_slack: tol::ENVELOPE_FIT_SLACK }
    }
}

/// Outcome of an envelope check.
#[derive(Serialize, Copy, Clone, Debug)]
pub struct EnvelopeReport {
    /// `max_t ‖x(t)‖_∞ e^{λt} / ‖φ‖`.
    pub m_emp: f64,
    pub lambda_target: f64,
    /// Decay rate fitted to the trajectory tail.
    pub lambda_fit: f64,
    pub pass: bool,
}

/// Least-squares decay rate of a trajectory.
///
/// The fit runs on the natural log of the backward running supremum of the
/// state norms (so oscillations do not poison the slope), restricted to the
/// second half of the time window. Values below 1e-300 are dropped to avoid
/// log underflow; if nothing is left the trajectory has collapsed to zero
/// and the rate is `+∞`. A constant trajectory fits 0.
pub fn fit_decay_rate(traj: &Trajectory) -> f64 {
    let m = traj.times.len();
    let mut tail_sup = vec![0.0_f64; m];
    let mut run = 0.0_f64;
    for i in (0..m).rev() {
        run = run.max(traj.norm_at(i));
        tail_sup[i] = run;
    }
    let t_mid = 0.5 * (traj.times[0] + traj.times[m - 1]);
    let pts: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&tail_sup)
        .filter(|(&t, &r)| t >= t_mid && r > tol::SUP_UNDERFLOW && r.is_finite())
        .map(|(&t, &r)| (t, r.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let len = pts.len() as f64;
    let t_mean = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let y_mean = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (t, y) in &pts {
        cov += (t - t_mean) * (y - y_mean);
        var += (t - t_mean) * (t - t_mean);
    }
    if var == 0.0 {
        return 0.0;
    }
    -(cov / var)
}

/// Checks one trajectory against a decay-rate target with default
/// thresholds.
pub fn envelope_check(traj: &Trajectory, lambda_target: f64) -> Result<EnvelopeReport> {
    envelope_check_with(traj, lambda_target, &EnvelopeConfig::default())
}

/// Checks one trajectory against a decay-rate target.
///
/// Computes the empirical envelope constant `M_emp` relative to the initial
/// history norm and the fitted tail decay rate; the check passes when
/// `M_emp` stays under the cap and the fitted rate reaches the target minus
/// the slack. Errors on a zero initial history, which admits no relative
/// envelope.
pub fn envelope_check_with(
    traj: &Trajectory,
    lambda_target: f64,
    cfg: &EnvelopeConfig,
) -> Result<EnvelopeReport> {
    if !(traj.phi_norm.is_finite() && traj.phi_norm > 0.0) {
        return Err(Error::Argument(
            "envelope check needs a nonzero initial history norm".into(),
        ));
    }
    if !lambda_target.is_finite() {
        return Err(Error::Argument(format!("target rate must be finite, got {lambda_target}")));
    }
    let mut m_emp = 0.0_f64;
    for (i, &t) in traj.times.iter().enumerate() {
        m_emp = m_emp.max(traj.norm_at(i) * (lambda_target * t).exp() / traj.phi_norm);
    }
    let lambda_fit = fit_decay_rate(traj);
    let pass = m_emp <= cfg.m_cap && lambda_fit >= lambda_target - cfg.fit_slack;
    Ok(EnvelopeReport { m_emp, lambda_target, lambda_fit, pass })
}

/// Options for [`monte_carlo_ges_with`].
#[derive(Clone, Debug)]
pub struct McOptions {
    pub horizon: f64,
    pub dt: f64,
    /// Nonlinearity for sector modes, if the system has any.
    pub psi: Option<Psi>,
    /// Worker threads; trials are deterministic regardless of the count.
    pub jobs: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { horizon: 30.0, dt: 1e-3, psi: None, jobs: 1 }
    }
}

/// One trial that did not meet its envelope.
#[derive(Clone, Debug)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub reason: String,
}

/// Aggregate result of a Monte Carlo batch.
#[derive(Serialize, Clone, Debug)]
pub struct McSummary {
    pub trials: usize,
    pub passes: usize,
    #[serde(rename = "max_M_emp")]
    pub max_m_emp: f64,
    pub min_lambda_fit: f64,
    pub lambda_target: f64,
    #[serde(skip)]
    pub failures: Vec<TrialFailure>,
}

struct TrialOutcome {
    seed: u64,
    m_emp: f64,
    lambda_fit: f64,
    pass: bool,
    error: Option<String>,
}

fn random_history(rng: &mut ChaCha8Rng, n: usize, h: f64) -> InitialHistory {
    const SEGMENTS: usize = 8;
    let thetas: Vec<f64> =
        (0..=SEGMENTS).map(|i| -h + h * i as f64 / SEGMENTS as f64).collect();
    let mut thetas = thetas;
    *thetas.last_mut().unwrap() = 0.0;
    let states: Vec<Vec<f64>> = (0..=SEGMENTS)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    InitialHistory::from_samples(thetas, states).expect("grid is strictly increasing")
}

fn run_trial(
    sys: &SwitchedSystem,
    spec: &AdtSpec,
    lambda_target: f64,
    opts: &McOptions,
    trial_seed: u64,
) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let signal_seed: u64 = rng.gen();
    let signal = generate_adt_signal(spec, sys.mode_count(), opts.horizon, signal_seed);
    let phi = random_history(&mut rng, sys.n(), sys.h());
    match simulate_with(sys, &signal, &phi, opts.horizon, opts.dt, opts.psi.as_ref()) {
        Ok(traj) => {
            let report = envelope_check(&traj, lambda_target)?;
            Ok(TrialOutcome {
                seed: trial_seed,
                m_emp: report.m_emp,
                lambda_fit: report.lambda_fit,
                pass: report.pass,
                error: None,
            })
        }
        Err(Error::Divergence { t, norm }) => Ok(TrialOutcome {
            seed: trial_seed,
            m_emp: f64::INFINITY,
            lambda_fit: f64::NEG_INFINITY,
            pass: false,
            error: Some(format!("trajectory diverged at t = {t} with norm {norm:.3e}")),
        }),
        Err(other) => Err(other),
    }
}

/// Monte Carlo check of a certificate with default options.
pub fn monte_carlo_ges(
    sys: &SwitchedSystem,
    cert: &Certificate,
    spec: &AdtSpec,
    trials: usize,
    seed: u64,
) -> Result<McSummary> {
    monte_carlo_ges_with(sys, cert, spec, trials, seed, &McOptions::default())
}

/// Monte Carlo check of a certificate: random piecewise-linear histories
/// with entries in `[-1, 1]` against random signals satisfying the
/// dwell-time spec, each trial checked against the envelope with rate
/// `λ = α − ln γ / τ_a`.
///
/// Requires `τ_a > τ*`; anything else is refused since the certificate
/// makes no claim there. Trials are seeded from the master seed, so results
/// are reproducible and independent of the worker count.
pub fn monte_carlo_ges_with(
    sys: &SwitchedSystem,
    cert: &Certificate,
    spec: &AdtSpec,
    trials: usize,
    seed: u64,
    opts: &McOptions,
) -> Result<McSummary> {
    if trials == 0 {
        return Err(Error::Argument("at least one trial is required".into()));
    }
    spec.validate()?;
    if spec.tau_a <= cert.tau_star {
        return Err(Error::Argument(format!(
            "average dwell time {} does not exceed the certified bound {}; \
             the certificate makes no claim there",
            spec.tau_a, cert.tau_star
        )));
    }
    let lambda_target = cert.alpha - cert.gamma.ln() / spec.tau_a;
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let trial_seeds: Vec<u64> = (0..trials).map(|_| master.gen()).collect();

    let jobs = opts.jobs.max(1).min(trials);
    let outcomes: Vec<TrialOutcome> = if jobs == 1 {
        trial_seeds
            .iter()
            .map(|&s| run_trial(sys, spec, lambda_target, opts, s))
            .collect::<Result<Vec<_>>>()?
    } else {
        let chunks: Vec<Vec<(usize, u64)>> = (0..jobs)
            .map(|w| {
                trial_seeds
                    .iter()
                    .enumerate()
                    .skip(w)
                    .step_by(jobs)
                    .map(|(i, &s)| (i, s))
                    .collect()
            })
            .collect();
        let mut indexed: Vec<(usize, TrialOutcome)> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .into_iter()
                .map(|chunk| {
                    scope.spawn(move || {
                        chunk
                            .into_iter()
                            .map(|(i, s)| {
                                run_trial(sys, spec, lambda_target, opts, s).map(|o| (i, o))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|handle| handle.join().expect("trial worker panicked"))
                .collect::<Result<Vec<_>>>()
                .map(|per_worker| per_worker.into_iter().flatten().collect())
        })?;
        indexed.sort_by_key(|(i, _)| *i);
        indexed.into_iter().map(|(_, o)| o).collect()
    };

    let mut summary = McSummary {
        trials,
        passes: 0,
        max_m_emp: 0.0,
        min_lambda_fit: f64::INFINITY,
        lambda_target,
        failures: Vec::new(),
    };
    for (i, o) in outcomes.iter().enumerate() {
        if o.pass {
            summary.passes += 1;
        } else {
            let reason = o.error.clone().unwrap_or_else(|| {
                format!("M_emp = {:.3e}, lambda_fit = {:.4}", o.m_emp, o.lambda_fit)
            });
            summary.failures.push(TrialFailure { trial: i, seed: o.seed, reason });
        }
        summary.max_m_emp = summary.max_m_emp.max(o.m_emp);
        summary.min_lambda_fit = summary.min_lambda_fit.min(o.lambda_fit);
    }
    Ok(summary)
}
