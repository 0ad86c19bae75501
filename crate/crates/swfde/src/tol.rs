//! Centralized numeric tolerances.
//!
//! Every threshold that decides feasibility, root acceptance, or trajectory
//! health lives here so the contracts stay auditable in one place.

/// Relative strictness margin for `M ξ ≪ 0`: every component must be at most
/// `-FEASIBILITY_MARGIN * (1 + ‖M‖_∞ ‖ξ‖_∞)`. Scale-aware so that certificates
/// from near-singular solves are rejected rather than accepted by luck.
pub const FEASIBILITY_MARGIN: f64 = 1e-9;

/// Upper box bound `U` for the common-vector search `1 ≤ ξ_j ≤ U`.
pub const XI_BOX_MAX: f64 = 1e6;

/// Absolute bracket width at which the α-root bisection stops.
pub const ROOT_BRACKET: f64 = 1e-12;

/// Relative residual bound for accepted α-roots: `|g(α)| < ROOT_RESIDUAL * scale`
/// where `scale` sums the magnitudes of the terms of `g`.
pub const ROOT_RESIDUAL: f64 = 1e-10;

/// Smallest lag the integrator will evaluate; lags are clamped into
/// `(LAG_MIN, h]`, so a declared zero lag is treated as `LAG_MIN`.
pub const LAG_MIN: f64 = 1e-9;

/// Minimal gap between consecutive switching instants (Zeno protection).
pub const ZENO_GAP: f64 = 1e-6;

/// Slack used when checking the ADT inequality `p ≤ N_0 + τ_p/τ_a`, absorbing
/// round-off in `τ_p/τ_a` for instants placed exactly on the bound.
pub const ADT_SLACK: f64 = 1e-9;

/// Sup-norm at which the integrator aborts with a divergence error.
pub const BLOWUP_NORM: f64 = 1e12;

/// Default cap on the empirical envelope constant `M_emp`.
pub const ENVELOPE_CAP: f64 = 1e6;

/// Default slack allowed between the fitted decay rate and the target rate.
pub const ENVELOPE_FIT_SLACK: f64 = 0.05;

/// Largest negative excursion tolerated when checking positivity preservation,
/// relative to `‖φ‖_∞`.
pub const POSITIVITY_DIP: f64 = 1e-8;

/// Sup-norm values below this are treated as numerical zero when fitting decay
/// rates on a log scale.
pub const SUP_UNDERFLOW: f64 = 1e-300;
