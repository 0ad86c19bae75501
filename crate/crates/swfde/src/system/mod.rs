//! System model: delay operators, constituent subsystems, whole switched
//! systems, and initial histories.
//!
//! A switched system is a family of modes sharing one dimension `n` and one
//! delay horizon `h`. Three mode flavors are supported:
//!
//! * linear with multiple discrete delays and an optional distributed kernel,
//! * sector: `P(t)ψ(x) + B(t)ψ(x(t−h))` with a diagonal nonlinearity `ψ`
//!   confined to the sector `0 < x_iψ_i(x_i) ≤ β_i x_i²`,
//! * black box: an arbitrary right-hand side plus user-declared bounding
//!   matrices.
//!
//! Every mode reduces to a pair `(Â, V̂)` of bounding matrices, a Metzler
//! part and a nonnegative delay-variation part, which is all the certificate
//! machinery in [`crate::certify`] needs.

mod schema;

pub use schema::{
    BoundsFile, DelayFile, KernelFile, LagFile, ModeFile, PhiFile, SystemFile, TvMatrixFile,
};

use crate::certify::ModeBounds;
use crate::error::{Error, Result};
use crate::linalg::{metzler_projection, Matrix, MetzlerMatrix, PositiveVector};
use crate::tol;
use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

/// Coefficient that is either constant or piecewise linear in time.
///
/// Sampled data carries the user's promise that the samples dominate the true
/// coefficient; sups over a piecewise-linear function are attained at the
/// vertices, so vertex scans below are exact for this representation.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeVarying<T> {
    Constant(T),
    Sampled { times: Vec<f64>, values: Vec<T> },
}

impl<T> TimeVarying<T> {
    pub fn is_constant(&self) -> bool {
        matches!(self, TimeVarying::Constant(_))
    }

    fn check_times(times: &[f64], count: usize) -> Result<()> {
        if times.len() != count || times.is_empty() {
            return Err(Error::Dimension("sample times and values must align".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Argument("sample times must be finite".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("sample times must be strictly increasing".into()));
        }
        Ok(())
    }

    /// Index of the segment containing `t`, clamping outside the range.
    fn segment(times: &[f64], t: f64) -> (usize, f64) {
        if t <= times[0] {
            return (0, 0.0);
        }
        let last = times.len() - 1;
        if t >= times[last] {
            return (last.saturating_sub(1), 1.0);
        }
        let hi = times.partition_point(|&s| s <= t);
        let lo = hi - 1;
        let u = (t - times[lo]) / (times[hi] - times[lo]);
        (lo, u)
    }
}

impl TimeVarying<f64> {
    pub fn validate_scalar(&self) -> Result<()> {
        match self {
            TimeVarying::Constant(v) => {
                if !v.is_finite() {
                    return Err(Error::Argument("scalar coefficient must be finite".into()));
                }
            }
            TimeVarying::Sampled { times, values } => {
                Self::check_times(times, values.len())?;
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Argument("scalar samples must be finite".into()));
                }
            }
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> f64 {
        match self {
            TimeVarying::Constant(v) => *v,
            TimeVarying::Sampled { times, values } => {
                if values.len() == 1 {
                    return values[0];
                }
                let (lo, u) = Self::segment(times, t);
                values[lo] + u * (values[lo + 1] - values[lo])
            }
        }
    }

    pub fn min_value(&self) -> f64 {
        match self {
            TimeVarying::Constant(v) => *v,
            TimeVarying::Sampled { values, .. } => values.iter().fold(f64::INFINITY, |a, &b| a.min(b)),
        }
    }

    pub fn max_value(&self) -> f64 {
        match self {
            TimeVarying::Constant(v) => *v,
            TimeVarying::Sampled { values, .. } => {
                values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            }
        }
    }
}

impl TimeVarying<Matrix> {
    pub fn validate_matrix(&self, rows: usize, cols: usize) -> Result<()> {
        let check = |m: &Matrix| -> Result<()> {
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::Dimension(format!(
                    "expected a {}x{} matrix, got {}x{}",
                    rows,
                    cols,
                    m.rows(),
                    m.cols()
                )));
            }
            Ok(())
        };
        match self {
            TimeVarying::Constant(m) => check(m),
            TimeVarying::Sampled { times, values } => {
                Self::check_times(times, values.len())?;
                values.iter().try_for_each(check)
            }
        }
    }

    pub fn at(&self, t: f64) -> Cow<'_, Matrix> {
        match self {
            TimeVarying::Constant(m) => Cow::Borrowed(m),
            TimeVarying::Sampled { times, values } => {
                if values.len() == 1 {
                    return Cow::Borrowed(&values[0]);
                }
                let (lo, u) = Self::segment(times, t);
                Cow::Owned(Matrix::lerp(&values[lo], &values[lo + 1], u))
            }
        }
    }

    /// Entrywise maximum of `f(sample)` over all vertices.
    fn sup_map(&self, f: impl Fn(&Matrix) -> Matrix) -> Matrix {
        match self {
            TimeVarying::Constant(m) => f(m),
            TimeVarying::Sampled { values, .. } => {
                let mut acc = f(&values[0]);
                for v in &values[1..] {
                    acc = Matrix::sup(&acc, &f(v)).expect("validated equal shapes");
                }
                acc
            }
        }
    }
}

/// One discrete delay term `B(t) · x(t − lag(t))`.
#[derive(Clone, Debug)]
pub struct DiscreteTerm {
    pub b: TimeVarying<Matrix>,
    pub lag: TimeVarying<f64>,
}

/// Distributed-delay kernel `C(θ)` stored on a uniform grid over `[−h, 0]`,
/// first sample at `θ = −h`, last at `θ = 0`.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub dtheta: f64,
    pub samples: Vec<Matrix>,
}

/// The delay part of a linear mode: discrete terms plus an optional kernel.
#[derive(Clone, Debug)]
pub struct DelayOperator {
    n: usize,
    h: f64,
    discrete_terms: Vec<DiscreteTerm>,
    kernel: Option<Kernel>,
}

impl DelayOperator {
    pub fn new(
        n: usize,
        h: f64,
        discrete_terms: Vec<DiscreteTerm>,
        kernel: Option<Kernel>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("delay operator dimension must be positive".into()));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Argument("delay horizon must be positive".into()));
        }
        for term in &discrete_terms {
            term.b.validate_matrix(n, n)?;
            term.lag.validate_scalar()?;
            let (lo, hi) = (term.lag.min_value(), term.lag.max_value());
            if lo <= 0.0 || hi > h + 1e-12 {
                return Err(Error::Argument(format!(
                    "lag range [{lo}, {hi}] must lie within (0, {h}]"
                )));
            }
        }
        if let Some(k) = &kernel {
            if !k.dtheta.is_finite() || k.dtheta <= 0.0 {
                return Err(Error::Argument("kernel grid spacing must be positive".into()));
            }
            if k.samples.len() < 2 {
                return Err(Error::Argument("kernel needs at least two grid samples".into()));
            }
            for s in &k.samples {
                if s.rows() != n || s.cols() != n {
                    return Err(Error::Dimension("kernel samples must be n x n".into()));
                }
            }
            let span = k.dtheta * (k.samples.len() - 1) as f64;
            if (span - h).abs() > 1e-9 * h.max(1.0) {
                return Err(Error::Argument(format!(
                    "kernel grid spans {span}, expected the delay horizon {h}"
                )));
            }
        }
        Ok(Self { n, h, discrete_terms, kernel })
    }

    /// Operator with no delay terms at all.
    pub fn empty(n: usize, h: f64) -> Result<Self> {
        Self::new(n, h, Vec::new(), None)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn discrete_terms(&self) -> &[DiscreteTerm] {
        &self.discrete_terms
    }

    pub fn kernel(&self) -> Option<&Kernel> {
        self.kernel.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.discrete_terms.is_empty() && self.kernel.is_none()
    }

    /// Lag of term `i` at time `t`, clamped to the valid range.
    pub fn lag_at(&self, i: usize, t: f64) -> f64 {
        self.discrete_terms[i].lag.at(t).clamp(tol::LAG_MIN, self.h)
    }

    /// Smallest discrete lag that can occur, or `None` without discrete terms.
    pub fn min_discrete_lag(&self) -> Option<f64> {
        self.discrete_terms
            .iter()
            .map(|term| term.lag.min_value().clamp(tol::LAG_MIN, self.h))
            .min_by(f64::total_cmp)
    }

    /// Total-variation bound at time `t`: `Σ_i |B^i(t)|` plus the composite
    /// trapezoid approximation of `∫_{−h}^{0} |C(θ)| dθ`. Entrywise
    /// nonnegative by construction.
    pub fn variation_bound(&self, t: f64) -> Matrix {
        let mut acc = Matrix::zeros(self.n, self.n);
        for term in &self.discrete_terms {
            acc = acc.add(&term.b.at(t).abs()).expect("validated shapes");
        }
        if let Some(k) = &self.kernel {
            acc = acc
                .add(&trapezoid(&k.samples, k.dtheta, Matrix::abs))
                .expect("validated shapes");
        }
        acc
    }

    /// Entrywise sup of the variation bound over all sample vertices.
    pub fn variation_sup(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.n, self.n);
        for term in &self.discrete_terms {
            acc = acc.add(&term.b.sup_map(Matrix::abs)).expect("validated shapes");
        }
        if let Some(k) = &self.kernel {
            acc = acc
                .add(&trapezoid(&k.samples, k.dtheta, Matrix::abs))
                .expect("validated shapes");
        }
        acc
    }

    /// Aggregate delay matrix at zero: `Σ_i B^i + ∫ C` for a time-invariant
    /// operator.
    pub fn eta_at_zero(&self) -> Result<Matrix> {
        let mut acc = Matrix::zeros(self.n, self.n);
        for term in &self.discrete_terms {
            match &term.b {
                TimeVarying::Constant(b) => acc = acc.add(b).expect("validated shapes"),
                TimeVarying::Sampled { .. } => {
                    return Err(Error::Unsupported(
                        "eta_at_zero needs a time-invariant operator".into(),
                    ))
                }
            }
        }
        if let Some(k) = &self.kernel {
            acc = acc
                .add(&trapezoid(&k.samples, k.dtheta, Matrix::clone))
                .expect("validated shapes");
        }
        Ok(acc)
    }

    fn is_time_invariant(&self) -> bool {
        self.discrete_terms
            .iter()
            .all(|t| t.b.is_constant() && t.lag.is_constant())
    }

    fn is_sampled(&self) -> bool {
        !self.is_time_invariant()
    }
}

fn trapezoid(samples: &[Matrix], dtheta: f64, f: impl Fn(&Matrix) -> Matrix) -> Matrix {
    let last = samples.len() - 1;
    let mut acc = f(&samples[0]).scale(0.5);
    for s in &samples[1..last] {
        acc = acc.add(&f(s)).expect("validated shapes");
    }
    acc = acc.add(&f(&samples[last]).scale(0.5)).expect("validated shapes");
    acc.scale(dtheta)
}

/// Linear mode `ẋ = A(t)x + Σ B^i(t)x(t−h^i(t)) + ∫C(θ)x(t+θ)dθ`.
#[derive(Clone, Debug)]
pub struct LinearDelaySubsystem {
    pub a: TimeVarying<Matrix>,
    pub delay_op: DelayOperator,
}

impl LinearDelaySubsystem {
    pub fn new(a: TimeVarying<Matrix>, delay_op: DelayOperator) -> Result<Self> {
        a.validate_matrix(delay_op.n(), delay_op.n())?;
        Ok(Self { a, delay_op })
    }

    pub fn n(&self) -> usize {
        self.delay_op.n()
    }

    /// `Â`: entrywise sup over vertices of the Metzler projection of `A(t)`.
    pub fn a_hat(&self) -> MetzlerMatrix {
        let sup = self
            .a
            .sup_map(|m| metzler_projection(m).expect("square by construction").into_inner());
        MetzlerMatrix::new(sup).expect("entrywise sup of Metzler matrices is Metzler")
    }

    /// `V̂`: entrywise sup of the delay-variation bound.
    pub fn v_hat(&self) -> Matrix {
        self.delay_op.variation_sup()
    }

    fn is_sampled(&self) -> bool {
        !self.a.is_constant() || self.delay_op.is_sampled()
    }
}

/// Sector mode `ẋ = P(t)ψ(x) + B(t)ψ(x(t−h))` with diagonal `ψ` confined to
/// the sector `0 < x_iψ_i(x_i) ≤ β_i x_i²`.
#[derive(Clone, Debug)]
pub struct SectorSubsystem {
    pub p: TimeVarying<Matrix>,
    pub b: TimeVarying<Matrix>,
    pub h: f64,
    pub beta: PositiveVector,
}

impl SectorSubsystem {
    pub fn new(
        p: TimeVarying<Matrix>,
        b: TimeVarying<Matrix>,
        h: f64,
        beta: PositiveVector,
    ) -> Result<Self> {
        let n = beta.len();
        p.validate_matrix(n, n)?;
        b.validate_matrix(n, n)?;
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Argument("sector mode delay must be positive".into()));
        }
        Ok(Self { p, b, h, beta })
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    /// `Â = sup_t M(P(t)) · D_β` (column `j` scaled by `β_j`).
    pub fn a_hat(&self) -> MetzlerMatrix {
        let sup = self
            .p
            .sup_map(|m| metzler_projection(m).expect("square by construction").into_inner());
        let scaled = sup.scale_cols(&self.beta).expect("beta length checked");
        MetzlerMatrix::new(scaled).expect("positive column scaling preserves Metzler")
    }

    /// `V̂ = sup_t |B(t)| · D_β`.
    pub fn v_hat(&self) -> Matrix {
        self.b
            .sup_map(Matrix::abs)
            .scale_cols(&self.beta)
            .expect("beta length checked")
    }

    fn is_sampled(&self) -> bool {
        !self.p.is_constant() || !self.b.is_constant()
    }
}

/// Read access to a solution segment; the argument is absolute time.
///
/// Implementations must serve every `t` in `[t_now − h, t_now]` for the
/// current integration time and delegate `t ≤ 0` to the initial history.
pub trait History {
    fn dim(&self) -> usize;
    fn state_at(&self, t: f64, out: &mut [f64]);
}

/// User-supplied right-hand side for a black-box mode. Receives the current
/// time, the current state, a history accessor, and the output slot.
pub type RhsFn = Arc<dyn Fn(f64, &[f64], &dyn History, &mut [f64]) + Send + Sync>;

/// Mode given by an arbitrary callback plus declared bounding data.
#[derive(Clone)]
pub struct BlackBoxMode {
    pub name: String,
    pub f: RhsFn,
    pub bounds: Option<(MetzlerMatrix, Matrix)>,
}

impl fmt::Debug for BlackBoxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBoxMode")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

/// One constituent subsystem of a switched system.
#[derive(Clone, Debug)]
pub enum Mode {
    Linear(LinearDelaySubsystem),
    Sector(SectorSubsystem),
    BlackBox(BlackBoxMode),
}

impl Mode {
    pub fn kind(&self) -> &'static str {
        match self {
            Mode::Linear(_) => "linear",
            Mode::Sector(_) => "sector",
            Mode::BlackBox(_) => "blackbox",
        }
    }
}

/// A switched system: `N ≥ 1` modes sharing dimension `n` and horizon `h`.
#[derive(Clone, Debug)]
pub struct SwitchedSystem {
    n: usize,
    h: f64,
    modes: Vec<Mode>,
}

impl SwitchedSystem {
    pub fn new(n: usize, h: f64, modes: Vec<Mode>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("system dimension must be positive".into()));
        }
        if !h.is_finite() || h <= 0.0 {
            return Err(Error::Argument("delay horizon must be positive".into()));
        }
        if modes.is_empty() {
            return Err(Error::Argument("a switched system needs at least one mode".into()));
        }
        for (k, mode) in modes.iter().enumerate() {
            let (mode_n, mode_h) = match mode {
                Mode::Linear(sub) => (sub.n(), sub.delay_op.h()),
                Mode::Sector(sub) => (sub.n(), sub.h),
                Mode::BlackBox(bb) => {
                    if let Some((a, v)) = &bb.bounds {
                        if a.dim() != n || v.rows() != n || v.cols() != n {
                            return Err(Error::Dimension(format!(
                                "mode {}: declared bounds are not {n}x{n}",
                                k + 1
                            )));
                        }
                        if !v.is_nonneg() {
                            return Err(Error::Argument(format!(
                                "mode {}: declared variation bound must be nonnegative",
                                k + 1
                            )));
                        }
                    }
                    (n, h)
                }
            };
            if mode_n != n {
                return Err(Error::Dimension(format!(
                    "mode {} has dimension {mode_n}, system has {n}",
                    k + 1
                )));
            }
            if (mode_h - h).abs() > 1e-12 * h.max(1.0) {
                return Err(Error::Argument(format!(
                    "mode {} has horizon {mode_h}, system has {h}",
                    k + 1
                )));
            }
        }
        Ok(Self { n, h, modes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    /// Per-mode bounding pairs `(Â_k, V̂_k)` for the certificate machinery.
    ///
    /// Linear and sector modes are bounded by exact vertex sups; black-box
    /// modes pass their declared bounds through and taint the result as
    /// conditional. Sampled time-varying coefficients taint it as a
    /// sampled-bound certificate.
    pub fn bounding_data(&self) -> Result<Vec<ModeBounds>> {
        self.modes
            .iter()
            .enumerate()
            .map(|(k, mode)| match mode {
                Mode::Linear(sub) => {
                    let b = ModeBounds::computed(sub.a_hat(), sub.v_hat())?;
                    Ok(if sub.is_sampled() { b.mark_sampled() } else { b })
                }
                Mode::Sector(sub) => {
                    let b = ModeBounds::computed(sub.a_hat(), sub.v_hat())?;
                    Ok(if sub.is_sampled() { b.mark_sampled() } else { b })
                }
                Mode::BlackBox(bb) => match &bb.bounds {
                    Some((a, v)) => ModeBounds::declared(a.clone(), v.clone()),
                    None => Err(Error::MissingBounds(k + 1)),
                },
            })
            .collect()
    }

    /// True iff every mode is a time-invariant linear mode with Metzler `A`
    /// and entrywise nonnegative delay matrices, so that nonnegative initial
    /// histories yield nonnegative trajectories.
    pub fn check_positivity(&self) -> Result<bool> {
        let mut ok = true;
        for (k, mode) in self.modes.iter().enumerate() {
            let sub = match mode {
                Mode::Linear(sub) => sub,
                other => {
                    return Err(Error::Unsupported(format!(
                        "positivity classification covers linear modes only; mode {} is {}",
                        k + 1,
                        other.kind()
                    )))
                }
            };
            let a = match &sub.a {
                TimeVarying::Constant(a) => a,
                TimeVarying::Sampled { .. } => {
                    return Err(Error::Unsupported(format!(
                        "positivity classification needs time-invariant modes; mode {} is sampled",
                        k + 1
                    )))
                }
            };
            if metzler_projection(a).map(|m| m.as_matrix() != a).unwrap_or(true) {
                ok = false;
            }
            for term in sub.delay_op.discrete_terms() {
                match &term.b {
                    TimeVarying::Constant(b) => {
                        if !b.is_nonneg() {
                            ok = false;
                        }
                    }
                    TimeVarying::Sampled { .. } => {
                        return Err(Error::Unsupported(format!(
                            "positivity classification needs time-invariant modes; mode {} is sampled",
                            k + 1
                        )))
                    }
                }
            }
            if let Some(kern) = sub.delay_op.kernel() {
                if kern.samples.iter().any(|s| !s.is_nonneg()) {
                    ok = false;
                }
            }
        }
        Ok(ok)
    }
}

#[derive(Clone)]
enum HistRepr {
    Callback(Arc<dyn Fn(f64, &mut [f64]) + Send + Sync>),
    Samples { thetas: Vec<f64>, states: Vec<Vec<f64>> },
}

/// Initial history `φ: [−h, 0] → Rⁿ`, either a callback or piecewise-linear
/// samples, with its sup norm cached.
#[derive(Clone)]
pub struct InitialHistory {
    n: usize,
    h: f64,
    repr: HistRepr,
    norm_inf: f64,
}

impl fmt::Debug for InitialHistory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialHistory")
            .field("n", &self.n)
            .field("h", &self.h)
            .field("norm_inf", &self.norm_inf)
            .finish_non_exhaustive()
    }
}

const NORM_SAMPLES: usize = 2048;

impl InitialHistory {
    /// History from a callback on `[−h, 0]`. The sup norm is estimated on a
    /// uniform grid of 2049 points including both endpoints.
    pub fn from_fn(n: usize, h: f64, f: impl Fn(f64, &mut [f64]) + Send + Sync + 'static) -> Self {
        assert!(n > 0, "history dimension must be positive");
        assert!(h.is_finite() && h > 0.0, "history span must be positive");
        let mut buf = vec![0.0; n];
        let mut norm = 0.0_f64;
        for i in 0..=NORM_SAMPLES {
            let theta = -h + h * i as f64 / NORM_SAMPLES as f64;
            f(theta, &mut buf);
            for v in &buf {
                norm = norm.max(v.abs());
            }
        }
        Self { n, h, repr: HistRepr::Callback(Arc::new(f)), norm_inf: norm }
    }

    /// Piecewise-linear history through `(thetas[i], states[i])`. Times must
    /// increase strictly and end at 0; the span defines `h`.
    pub fn from_samples(thetas: Vec<f64>, states: Vec<Vec<f64>>) -> Result<Self> {
        if thetas.len() != states.len() || thetas.len() < 2 {
            return Err(Error::Argument("history needs at least two aligned samples".into()));
        }
        if thetas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument("history times must be strictly increasing".into()));
        }
        let last = *thetas.last().unwrap();
        if last != 0.0 {
            return Err(Error::Argument(format!("history must end at 0, ends at {last}")));
        }
        if thetas[0] >= 0.0 {
            return Err(Error::Argument("history must start strictly before 0".into()));
        }
        let n = states[0].len();
        if n == 0 || states.iter().any(|s| s.len() != n) {
            return Err(Error::Dimension("history states must share one positive length".into()));
        }
        if states.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Argument("history states must be finite".into()));
        }
        // Piecewise linear: the sup norm is attained at a vertex.
        let norm = states
            .iter()
            .flatten()
            .fold(0.0_f64, |a, v| a.max(v.abs()));
        Ok(Self { n, h: -thetas[0], repr: HistRepr::Samples { thetas, states }, norm_inf: norm })
    }

    /// Identically zero history.
    pub fn zero(n: usize, h: f64) -> Self {
        Self::from_fn(n, h, |_, out| out.fill(0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the covered interval `[−h, 0]`.
    pub fn span(&self) -> f64 {
        self.h
    }

    /// Cached `sup_{θ ∈ [−h,0]} ‖φ(θ)‖_∞`. Exact for sampled histories,
    /// grid-estimated for callbacks.
    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    /// Evaluates `φ(θ)`, clamping `θ` into the covered interval.
    pub fn eval(&self, theta: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.n);
        let theta = theta.clamp(-self.h, 0.0);
        match &self.repr {
            HistRepr::Callback(f) => f(theta, out),
            HistRepr::Samples { thetas, states } => {
                let hi = thetas.partition_point(|&s| s <= theta);
                if hi == 0 {
                    out.copy_from_slice(&states[0]);
                    return;
                }
                if hi == thetas.len() {
                    out.copy_from_slice(states.last().unwrap());
                    return;
                }
                let lo = hi - 1;
                let u = (theta - thetas[lo]) / (thetas[hi] - thetas[lo]);
                for (i, o) in out.iter_mut().enumerate() {
                    *o = states[lo][i] + u * (states[hi][i] - states[lo][i]);
                }
            }
        }
    }
}

impl History for InitialHistory {
    fn dim(&self) -> usize {
        self.n
    }

    fn state_at(&self, t: f64, out: &mut [f64]) {
        self.eval(t, out);
    }
}
