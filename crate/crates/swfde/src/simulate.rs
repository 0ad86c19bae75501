//! Numerical integration of switched delay systems.
//!
//! The integrator is a fixed-step classical Runge-Kutta scheme driven by the
//! method of steps: the solution so far is kept in a dense history buffer
//! with cubic Hermite interpolation between step endpoints, and delayed
//! arguments are answered from that buffer (or from the initial history for
//! nonpositive times). Each constant-mode interval of the switching signal
//! is subdivided evenly so that every switching instant is an exact grid
//! point; the state is carried across switches unchanged.
//!
//! At a switching instant the buffer stores two samples with the same time
//! and state but different derivatives, one per adjacent mode, so the
//! interpolant is continuous with the correct one-sided slopes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::switching::SwitchingSignal;
use crate::system::{History, InitialHistory, Mode, SwitchedSystem};
use crate::tol;
use std::fmt;
use std::fmt::Write as _;
use std::sync::Arc;

/// Diagonal nonlinearity `ψ(x) = (ψ_1(x_1), …, ψ_n(x_n))`.
#[derive(Clone)]
pub struct Psi {
    fns: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
}

impl Psi {
    pub fn new(fns: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>) -> Self {
        Self { fns }
    }

    /// The identity nonlinearity, which sits in every sector with `β ≥ 1`.
    pub fn identity(n: usize) -> Self {
        Self { fns: (0..n).map(|_| Arc::new(|x| x) as _).collect() }
    }

    pub fn len(&self) -> usize {
        self.fns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fns.is_empty()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.fns.len(), "state length must match psi");
        for ((f, &v), o) in self.fns.iter().zip(x).zip(out.iter_mut()) {
            *o = f(v);
        }
    }
}

impl fmt::Debug for Psi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Psi").field("len", &self.fns.len()).finish_non_exhaustive()
    }
}

/// A computed solution on `[0, horizon]`.
///
/// `times` is strictly increasing and includes 0, every switching instant
/// inside the horizon, and the horizon itself. `modes[i]` is the active
/// (right-continuous) mode at `times[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub modes: Vec<usize>,
    /// Human-readable accuracy warnings collected during integration.
    pub warnings: Vec<String>,
    /// Sup norm of the initial history the run started from.
    pub phi_norm: f64,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("a trajectory is never empty")
    }

    /// Sup norm of the state at row `i`.
    pub fn norm_at(&self, i: usize) -> f64 {
        self.states[i].iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Serializes to `t,x1,…,xn,mode` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("t");
        for j in 1..=n {
            let _ = write!(out, ",x{j}");
        }
        out.push_str(",mode\n");
        for ((t, x), m) in self.times.iter().zip(&self.states).zip(&self.modes) {
            let _ = write!(out, "{t:.16e}");
            for v in x {
                let _ = write!(out, ",{v:.16e}");
            }
            let _ = writeln!(out, ",{m}");
        }
        out
    }

    /// Parses the format written by [`Self::to_csv`]. The initial history is
    /// not stored in the CSV, so `phi_norm` is taken from the first row.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty trajectory file".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 3 || cols[0] != "t" || *cols.last().unwrap() != "mode" {
            return Err(Error::Parse(format!("unexpected trajectory header {header:?}")));
        }
        let n = cols.len() - 2;
        for (j, c) in cols[1..=n].iter().enumerate() {
            if *c != format!("x{}", j + 1) {
                return Err(Error::Parse(format!("unexpected state column {c:?}")));
            }
        }
        let mut times = Vec::new();
        let mut states = Vec::new();
        let mut modes = Vec::new();
        for (idx, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != n + 2 {
                return Err(Error::Parse(format!("row {}: expected {} fields", idx + 2, n + 2)));
            }
            let t: f64 = fields[0]
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad time", idx + 2)))?;
            if let Some(&prev) = times.last() {
                if t <= prev {
                    return Err(Error::Parse(format!("row {}: times must increase", idx + 2)));
                }
            }
            let x = fields[1..=n]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| Error::Parse(format!("row {}: bad state", idx + 2)))?;
            let m: usize = fields[n + 1]
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad mode", idx + 2)))?;
            times.push(t);
            states.push(x);
            modes.push(m);
        }
        if times.is_empty() {
            return Err(Error::Parse("trajectory file has no rows".into()));
        }
        let phi_norm = states[0].iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        Ok(Self { times, states, modes, warnings: Vec::new(), phi_norm })
    }
}

/// Dense solution history: initial history for `t ≤ 0`, Hermite-interpolated
/// step samples afterwards. Queries past the newest sample extrapolate the
/// last cubic, which is how sub-step delayed arguments are served.
struct StepHistory<'a> {
    phi: &'a InitialHistory,
    n: usize,
    ts: Vec<f64>,
    xs: Vec<Vec<f64>>,
    dxs: Vec<Vec<f64>>,
}

impl<'a> StepHistory<'a> {
    fn new(phi: &'a InitialHistory, n: usize) -> Self {
        Self { phi, n, ts: Vec::new(), xs: Vec::new(), dxs: Vec::new() }
    }

    fn push(&mut self, t: f64, x: Vec<f64>, dx: Vec<f64>) {
        self.ts.push(t);
        self.xs.push(x);
        self.dxs.push(dx);
    }

    fn hermite(&self, lo: usize, hi: usize, t: f64, out: &mut [f64]) {
        let (t0, t1) = (self.ts[lo], self.ts[hi]);
        let d = t1 - t0;
        let u = (t - t0) / d;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = 3.0 * u2 - 2.0 * u3;
        let h11 = u3 - u2;
        let (x0, x1) = (&self.xs[lo], &self.xs[hi]);
        let (d0, d1) = (&self.dxs[lo], &self.dxs[hi]);
        for i in 0..self.n {
            out[i] = h00 * x0[i] + h01 * x1[i] + d * (h10 * d0[i] + h11 * d1[i]);
        }
    }
}

impl History for StepHistory<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn state_at(&self, t: f64, out: &mut [f64]) {
        if t <= 0.0 || self.ts.is_empty() {
            self.phi.eval(t, out);
            return;
        }
        let len = self.ts.len();
        let idx = self.ts.partition_point(|&s| s <= t);
        if idx == 0 {
            self.phi.eval(t, out);
            return;
        }
        if idx < len {
            // Strict bracketing: equal-time duplicates can never straddle t.
            self.hermite(idx - 1, idx, t, out);
            return;
        }
        // Past the end: extend the last distinct segment's cubic.
        let hi = len - 1;
        let mut lo = hi;
        while lo > 0 && self.ts[lo - 1] >= self.ts[hi] {
            lo -= 1;
        }
        if lo == 0 {
            // Only t = 0 samples exist yet: linear prediction from the slope.
            for i in 0..self.n {
                out[i] = self.xs[hi][i] + (t - self.ts[hi]) * self.dxs[hi][i];
            }
            return;
        }
        self.hermite(lo - 1, hi, t, out);
    }
}

/// `out[i] += s · (M x)_i`.
fn mat_vec_acc(m: &Matrix, x: &[f64], s: f64, out: &mut [f64]) {
    let e = m.entries();
    let cols = m.cols();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &e[i * cols..(i + 1) * cols];
        *o += s * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Scratch space shared by all right-hand side evaluations of one run.
struct EvalTmp {
    xd: Vec<f64>,
    psix: Vec<f64>,
}

impl EvalTmp {
    fn new(n: usize) -> Self {
        Self { xd: vec![0.0; n], psix: vec![0.0; n] }
    }
}

fn eval_mode(
    mode: &Mode,
    psi: Option<&Psi>,
    t: f64,
    x: &[f64],
    hist: &dyn History,
    out: &mut [f64],
    tmp: &mut EvalTmp,
) -> Result<()> {
    match mode {
        Mode::Linear(sub) => {
            out.fill(0.0);
            mat_vec_acc(&sub.a.at(t), x, 1.0, out);
            let op = &sub.delay_op;
            for (i, term) in op.discrete_terms().iter().enumerate() {
                hist.state_at(t - op.lag_at(i, t), &mut tmp.xd);
                mat_vec_acc(&term.b.at(t), &tmp.xd, 1.0, out);
            }
            if let Some(k) = op.kernel() {
                let last = k.samples.len() - 1;
                for (j, c) in k.samples.iter().enumerate() {
                    let w = if j == 0 || j == last { 0.5 * k.dtheta } else { k.dtheta };
                    if j == last {
                        // θ = 0 refers to the current (stage) state.
                        mat_vec_acc(c, x, w, out);
                    } else {
                        let theta = -op.h() + j as f64 * k.dtheta;
                        hist.state_at(t + theta, &mut tmp.xd);
                        mat_vec_acc(c, &tmp.xd, w, out);
                    }
                }
            }
        }
        Mode::Sector(sub) => {
            let psi = psi.ok_or_else(|| {
                Error::Argument("sector modes need a nonlinearity; pass one explicitly".into())
            })?;
            out.fill(0.0);
            psi.apply(x, &mut tmp.psix);
            mat_vec_acc(&sub.p.at(t), &tmp.psix, 1.0, out);
            hist.state_at(t - sub.h, &mut tmp.xd);
            let (xd, psix) = (&tmp.xd, &mut tmp.psix);
            psi.apply(xd, psix);
            mat_vec_acc(&sub.b.at(t), psix, 1.0, out);
        }
        Mode::BlackBox(bb) => {
            (bb.f)(t, x, hist, out);
        }
    }
    Ok(())
}

/// Evaluates the right-hand side of one mode (1-based index) at `(t, x)`
/// against an arbitrary history accessor.
pub fn rhs_eval(
    sys: &SwitchedSystem,
    mode: usize,
    t: f64,
    x: &[f64],
    history: &dyn History,
    psi: Option<&Psi>,
) -> Result<Vec<f64>> {
    if mode == 0 || mode > sys.mode_count() {
        return Err(Error::Argument(format!(
            "mode {mode} is out of range 1..={}",
            sys.mode_count()
        )));
    }
    if x.len() != sys.n() {
        return Err(Error::Dimension(format!(
            "state has length {}, system dimension is {}",
            x.len(),
            sys.n()
        )));
    }
    let mut out = vec![0.0; sys.n()];
    let mut tmp = EvalTmp::new(sys.n());
    eval_mode(&sys.modes()[mode - 1], psi, t, x, history, &mut out, &mut tmp)?;
    Ok(out)
}

fn smallest_lag(sys: &SwitchedSystem) -> Option<f64> {
    sys.modes()
        .iter()
        .filter_map(|m| match m {
            Mode::Linear(sub) => sub.delay_op.min_discrete_lag(),
            Mode::Sector(sub) => Some(sub.h),
            Mode::BlackBox(_) => None,
        })
        .min_by(f64::total_cmp)
}

/// Integrates the switched system under the given signal. Equivalent to
/// [`simulate_with`] without a nonlinearity.
pub fn simulate(
    sys: &SwitchedSystem,
    signal: &SwitchingSignal,
    phi: &InitialHistory,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    simulate_with(sys, signal, phi, horizon, dt, None)
}

/// Integrates one mode of the system as an unswitched subsystem (1-based
/// index). Identical, sample for sample, to [`simulate`] with a constant
/// signal.
pub fn simulate_subsystem(
    sys: &SwitchedSystem,
    mode: usize,
    phi: &InitialHistory,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    if mode == 0 || mode > sys.mode_count() {
        return Err(Error::Argument(format!(
            "mode {mode} is out of range 1..={}",
            sys.mode_count()
        )));
    }
    simulate_with(sys, &SwitchingSignal::constant(mode), phi, horizon, dt, None)
}

/// Integrates the switched system, supplying a nonlinearity for sector
/// modes.
///
/// Aborts with [`Error::Divergence`] when the state norm passes 1e12. A
/// step size above the smallest discrete lag is integrated anyway but
/// recorded as a warning on the trajectory.
pub fn simulate_with(
    sys: &SwitchedSystem,
    signal: &SwitchingSignal,
    phi: &InitialHistory,
    horizon: f64,
    dt: f64,
    psi: Option<&Psi>,
) -> Result<Trajectory> {
    let n = sys.n();
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Argument(format!("step size must be positive, got {dt}")));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Argument(format!("horizon must be positive, got {horizon}")));
    }
    if phi.n() != n {
        return Err(Error::Dimension(format!(
            "initial history has dimension {}, system has {n}",
            phi.n()
        )));
    }
    if phi.span() < sys.h() - 1e-12 * sys.h().max(1.0) {
        return Err(Error::Argument(format!(
            "initial history covers [-{}, 0] but the system looks back {}",
            phi.span(),
            sys.h()
        )));
    }
    if signal.max_mode() > sys.mode_count() {
        return Err(Error::Argument(format!(
            "signal uses mode {}, system has {} modes",
            signal.max_mode(),
            sys.mode_count()
        )));
    }
    let has_sector = sys.modes().iter().any(|m| matches!(m, Mode::Sector(_)));
    if has_sector {
        match psi {
            None => {
                return Err(Error::Argument(
                    "sector modes need a nonlinearity; pass one explicitly".into(),
                ))
            }
            Some(p) if p.len() != n => {
                return Err(Error::Dimension(format!(
                    "nonlinearity has {} components, system dimension is {n}",
                    p.len()
                )))
            }
            Some(_) => {}
        }
    }

    let mut warnings = Vec::new();
    if let Some(lag) = smallest_lag(sys) {
        if dt > lag {
            warnings.push(format!(
                "step size {dt} exceeds the smallest lag {lag}; delayed arguments are \
                 extrapolated and accuracy degrades"
            ));
            log::warn!("{}", warnings.last().unwrap());
        }
    }

    let segments = signal.segments(horizon);
    let mut hist = StepHistory::new(phi, n);
    let mut tmp = EvalTmp::new(n);
    let mut x = vec![0.0; n];
    phi.eval(0.0, &mut x);

    let modes_ref = sys.modes();
    let first_mode = segments[0].2;
    let mut dx = vec![0.0; n];
    eval_mode(&modes_ref[first_mode - 1], psi, 0.0, &x, &hist, &mut dx, &mut tmp)?;
    hist.push(0.0, x.clone(), dx.clone());

    let rows = segments.len() + (horizon / dt).ceil() as usize + 1;
    let mut times = Vec::with_capacity(rows);
    let mut states = Vec::with_capacity(rows);
    let mut row_modes = Vec::with_capacity(rows);
    times.push(0.0);
    states.push(x.clone());
    row_modes.push(first_mode);

    let mut k = vec![vec![0.0; n]; 4];
    let mut xs = vec![0.0; n];

    for (seg, &(a, b, mode)) in segments.iter().enumerate() {
        let mode_ref = &modes_ref[mode - 1];
        let width = b - a;
        let steps = ((width / dt - 1e-9).ceil() as usize).max(1);
        let mut t0 = a;
        for j in 1..=steps {
            let t1 = if j == steps { b } else { a + width * j as f64 / steps as f64 };
            let s = t1 - t0;
            // k1 is the stored derivative at the current sample.
            k[0].copy_from_slice(&dx);
            for i in 0..n {
                xs[i] = x[i] + 0.5 * s * k[0][i];
            }
            let (k2, rest) = k[1..].split_first_mut().unwrap();
            eval_mode(mode_ref, psi, t0 + 0.5 * s, &xs, &hist, k2, &mut tmp)?;
            for i in 0..n {
                xs[i] = x[i] + 0.5 * s * k2[i];
            }
            let (k3, rest) = rest.split_first_mut().unwrap();
            eval_mode(mode_ref, psi, t0 + 0.5 * s, &xs, &hist, k3, &mut tmp)?;
            for i in 0..n {
                xs[i] = x[i] + s * k3[i];
            }
            let k4 = &mut rest[0];
            eval_mode(mode_ref, psi, t1, &xs, &hist, k4, &mut tmp)?;
            for i in 0..n {
                x[i] += s / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
            }
            let norm = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if !norm.is_finite() || norm > tol::BLOWUP_NORM {
                return Err(Error::Divergence { t: t1, norm });
            }
            eval_mode(mode_ref, psi, t1, &x, &hist, &mut dx, &mut tmp)?;
            hist.push(t1, x.clone(), dx.clone());
            times.push(t1);
            states.push(x.clone());
            row_modes.push(mode);
            t0 = t1;
        }
        if seg + 1 < segments.len() {
            // Switch at b: same state, derivative of the incoming mode. The
            // row at b reports the incoming mode (the signal is
            // right-continuous).
            let next_mode = segments[seg + 1].2;
            eval_mode(&modes_ref[next_mode - 1], psi, b, &x, &hist, &mut dx, &mut tmp)?;
            hist.push(b, x.clone(), dx.clone());
            *row_modes.last_mut().unwrap() = next_mode;
        }
    }

    Ok(Trajectory { times, states, modes: row_modes, warnings, phi_norm: phi.norm_inf() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::switching::periodic_signal;
    use crate::system::{
        DelayOperator, DiscreteTerm, Kernel, LinearDelaySubsystem, SectorSubsystem, TimeVarying,
    };
    use crate::linalg::PositiveVector;

    fn scalar_linear(a: f64, b: f64, lag: f64) -> SwitchedSystem {
        let term = DiscreteTerm {
            b: TimeVarying::Constant(Matrix::from_rows(&[vec![b]]).unwrap()),
            lag: TimeVarying::Constant(lag),
        };
        let op = DelayOperator::new(1, 1.0, vec![term], None).unwrap();
        let sub = LinearDelaySubsystem::new(
            TimeVarying::Constant(Matrix::from_rows(&[vec![a]]).unwrap()),
            op,
        )
        .unwrap();
        SwitchedSystem::new(1, 1.0, vec![Mode::Linear(sub)]).unwrap()
    }

    fn undelayed(a: f64) -> SwitchedSystem {
        let op = DelayOperator::empty(1, 1.0).unwrap();
        let sub = LinearDelaySubsystem::new(
            TimeVarying::Constant(Matrix::from_rows(&[vec![a]]).unwrap()),
            op,
        )
        .unwrap();
        SwitchedSystem::new(1, 1.0, vec![Mode::Linear(sub)]).unwrap()
    }

    #[test]
    fn pure_decay_matches_the_exponential() {
        let sys = undelayed(-1.0);
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let traj =
            simulate(&sys, &SwitchingSignal::constant(1), &phi, 1.0, 1e-3).unwrap();
        let last = traj.final_state()[0];
        assert!((last - (-1.0_f64).exp()).abs() <= 1e-9, "got {last}");
    }

    #[test]
    fn zero_history_stays_zero() {
        let sys = scalar_linear(-1.0, 0.5, 1.0);
        let phi = InitialHistory::zero(1, 1.0);
        let traj = simulate(&sys, &SwitchingSignal::constant(1), &phi, 3.0, 1e-2).unwrap();
        assert!(traj.states.iter().all(|x| x[0] == 0.0));
    }

    #[test]
    fn switching_instants_are_grid_points() {
        let mk = |a: f64| {
            let op = DelayOperator::empty(1, 1.0).unwrap();
            LinearDelaySubsystem::new(
                TimeVarying::Constant(Matrix::from_rows(&[vec![a]]).unwrap()),
                op,
            )
            .unwrap()
        };
        let sys = SwitchedSystem::new(
            1,
            1.0,
            vec![Mode::Linear(mk(-1.0)), Mode::Linear(mk(-2.0))],
        )
        .unwrap();
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let sig = periodic_signal(0.5, 2, 2.0);
        let traj = simulate(&sys, &sig, &phi, 2.0, 1e-3).unwrap();
        assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
        let idx = traj.times.iter().position(|&t| t == 0.5).expect("switch instant on grid");
        assert_eq!(traj.modes[idx], 2);
        assert_eq!(traj.modes[idx - 1], 1);
        // Piecewise product of exponentials at t = 2.
        let expected = (-0.5_f64).exp() * (-1.0_f64).exp() * (-0.5_f64).exp() * (-1.0_f64).exp();
        assert!((traj.final_state()[0] - expected).abs() < 1e-9);
    }

    #[test]
    fn one_mode_signal_matches_subsystem_bit_for_bit() {
        let sys = scalar_linear(-1.0, 0.5, 1.0);
        let phi = InitialHistory::from_fn(1, 1.0, |theta, out| out[0] = 0.5 + 0.25 * theta.sin());
        let a = simulate(&sys, &SwitchingSignal::constant(1), &phi, 4.0, 1e-3).unwrap();
        let b = simulate_subsystem(&sys, 1, &phi, 4.0, 1e-3).unwrap();
        assert_eq!(a.times.len(), b.times.len());
        for (xa, xb) in a.states.iter().zip(&b.states) {
            assert_eq!(xa[0].to_bits(), xb[0].to_bits());
        }
    }

    #[test]
    fn divergence_is_reported() {
        let sys = undelayed(1.0);
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let err = simulate(&sys, &SwitchingSignal::constant(1), &phi, 40.0, 1e-2).unwrap_err();
        match err {
            Error::Divergence { t, norm } => {
                assert!(t > 25.0 && t < 30.0, "diverged at {t}");
                assert!(norm > tol::BLOWUP_NORM);
            }
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn coarse_step_records_a_warning() {
        let sys = scalar_linear(-1.0, 0.1, 5e-4);
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let traj = simulate(&sys, &SwitchingSignal::constant(1), &phi, 0.05, 1e-3).unwrap();
        assert_eq!(traj.warnings.len(), 1);
        assert!(traj.warnings[0].contains("smallest lag"));
    }

    #[test]
    fn kernel_quadrature_is_exact_for_constants() {
        let samples = vec![Matrix::from_rows(&[vec![0.5]]).unwrap(); 5];
        let op = DelayOperator::new(1, 1.0, vec![], Some(Kernel { dtheta: 0.25, samples }))
            .unwrap();
        let sub = LinearDelaySubsystem::new(
            TimeVarying::Constant(Matrix::zeros(1, 1)),
            op,
        )
        .unwrap();
        let sys = SwitchedSystem::new(1, 1.0, vec![Mode::Linear(sub)]).unwrap();
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let dx = rhs_eval(&sys, 1, 0.0, &[1.0], &phi, None).unwrap();
        assert!((dx[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sector_rhs_evaluation() {
        let sub = SectorSubsystem::new(
            TimeVarying::Constant(Matrix::from_rows(&[vec![-2.0]]).unwrap()),
            TimeVarying::Constant(Matrix::from_rows(&[vec![1.0]]).unwrap()),
            1.0,
            PositiveVector::new(vec![2.0]).unwrap(),
        )
        .unwrap();
        let sys = SwitchedSystem::new(1, 1.0, vec![Mode::Sector(sub)]).unwrap();
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 0.5);
        let psi = Psi::new(vec![Arc::new(|x| 2.0 * x)]);
        let dx = rhs_eval(&sys, 1, 0.0, &[1.0], &phi, Some(&psi)).unwrap();
        assert!((dx[0] - (-2.0 * 2.0 + 1.0 * 1.0)).abs() < 1e-15);
        assert!(rhs_eval(&sys, 1, 0.0, &[1.0], &phi, None).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let sys = scalar_linear(-1.0, 0.5, 1.0);
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let traj = simulate(&sys, &SwitchingSignal::constant(1), &phi, 0.5, 0.1).unwrap();
        let text = traj.to_csv();
        assert!(text.starts_with("t,x1,mode\n"));
        let parsed = Trajectory::from_csv(&text).unwrap();
        assert_eq!(parsed.times, traj.times);
        assert_eq!(parsed.states, traj.states);
        assert_eq!(parsed.modes, traj.modes);
    }

    #[test]
    fn input_validation() {
        let sys = scalar_linear(-1.0, 0.5, 1.0);
        let phi = InitialHistory::from_fn(1, 1.0, |_, out| out[0] = 1.0);
        let short_phi = InitialHistory::from_fn(1, 0.25, |_, out| out[0] = 1.0);
        let wide_phi = InitialHistory::from_fn(2, 1.0, |_, out| out.fill(1.0));
        let sig = SwitchingSignal::constant(1);
        assert!(simulate(&sys, &sig, &phi, 1.0, 0.0).is_err());
        assert!(simulate(&sys, &sig, &phi, 0.0, 0.1).is_err());
        assert!(simulate(&sys, &sig, &short_phi, 1.0, 0.1).is_err());
        assert!(simulate(&sys, &sig, &wide_phi, 1.0, 0.1).is_err());
        assert!(simulate(&sys, &SwitchingSignal::constant(2), &phi, 1.0, 0.1).is_err());
        assert!(simulate_subsystem(&sys, 0, &phi, 1.0, 0.1).is_err());
        assert!(simulate_subsystem(&sys, 2, &phi, 1.0, 0.1).is_err());
    }
}
