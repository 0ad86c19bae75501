//! Switching signals, average dwell-time specifications, and signal
//! generation.
//!
//! A switching signal is piecewise constant and right-continuous: mode
//! indices are 1-based, the signal starts in its initial mode at `t = 0`,
//! and a switch at instant `τ` means the new mode is active on `[τ, …)`.
//! Switch counting uses half-open windows `(0, t]` with a closed right
//! endpoint.

use crate::error::{Error, Result};
use crate::tol;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Piecewise-constant, right-continuous mode schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchingSignal {
    initial_mode: usize,
    instants: Vec<f64>,
    modes: Vec<usize>,
}

impl SwitchingSignal {
    /// Builds a signal from an initial mode and `(instant, new_mode)` pairs.
    /// Instants must be finite, strictly positive, and strictly increasing;
    /// modes must be 1-based.
    pub fn new(initial_mode: usize, switches: Vec<(f64, usize)>) -> Result<Self> {
        if initial_mode == 0 {
            return Err(Error::Argument("mode indices are 1-based".into()));
        }
        let mut prev = 0.0;
        for &(t, mode) in &switches {
            if !t.is_finite() || t <= prev {
                return Err(Error::Argument(format!(
                    "switch instants must increase strictly from 0, got {t} after {prev}"
                )));
            }
            if mode == 0 {
                return Err(Error::Argument("mode indices are 1-based".into()));
            }
            prev = t;
        }
        let (instants, modes) = switches.into_iter().unzip();
        Ok(Self { initial_mode, instants, modes })
    }

    /// Signal that stays in one mode forever.
    pub fn constant(mode: usize) -> Self {
        Self::new(mode, Vec::new()).expect("a constant signal is always valid")
    }

    pub fn initial_mode(&self) -> usize {
        self.initial_mode
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    /// New modes, aligned with [`Self::instants`].
    pub fn switch_modes(&self) -> &[usize] {
        &self.modes
    }

    /// Active mode at time `t` (right-continuous; initial mode for `t < 0`).
    pub fn mode_at(&self, t: f64) -> usize {
        let idx = self.instants.partition_point(|&s| s <= t);
        if idx == 0 {
            self.initial_mode
        } else {
            self.modes[idx - 1]
        }
    }

    /// Number of switches in `(0, t]`.
    pub fn count_switches(&self, t: f64) -> usize {
        self.instants.partition_point(|&s| s <= t)
    }

    /// Largest mode index the signal ever uses.
    pub fn max_mode(&self) -> usize {
        self.modes.iter().copied().fold(self.initial_mode, usize::max)
    }

    /// Constant-mode segments `[start, end)` covering `[0, horizon]`.
    /// Switches at or beyond the horizon are ignored.
    pub fn segments(&self, horizon: f64) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::new();
        let mut start = 0.0;
        let mut mode = self.initial_mode;
        for (&t, &m) in self.instants.iter().zip(&self.modes) {
            if t >= horizon {
                break;
            }
            out.push((start, t, mode));
            start = t;
            mode = m;
        }
        out.push((start, horizon, mode));
        out
    }

    /// Serializes to `t,mode` CSV, first row at `t = 0`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mode\n");
        let _ = writeln!(out, "0,{}", self.initial_mode);
        for (t, m) in self.instants.iter().zip(&self.modes) {
            let _ = writeln!(out, "{t},{m}");
        }
        out
    }

    /// Parses the format written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some("t,mode") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header \"t,mode\", got {other:?}"
                )))
            }
        }
        let mut rows = Vec::new();
        for (idx, line) in lines.enumerate() {
            let (t, m) = line.split_once(',').ok_or_else(|| {
                Error::Parse(format!("row {}: expected \"t,mode\", got {line:?}", idx + 2))
            })?;
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad time {t:?}", idx + 2)))?;
            let m: usize = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad mode {m:?}", idx + 2)))?;
            rows.push((t, m));
        }
        let Some(&(first_t, initial)) = rows.first() else {
            return Err(Error::Parse("signal file has no rows".into()));
        };
        if first_t != 0.0 {
            return Err(Error::Parse(format!("first row must be at t = 0, got {first_t}")));
        }
        Self::new(initial, rows[1..].to_vec())
    }
}

/// Average dwell-time class: signals with `N(0, t] ≤ n0 + t / tau_a`.
#[derive(Serialize, Deserialize, Copy, Clone, Debug, PartialEq)]
pub struct AdtSpec {
    pub tau_a: f64,
    pub n0: f64,
}

impl AdtSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.tau_a.is_finite() || self.tau_a <= 0.0 {
            return Err(Error::Argument(format!(
                "average dwell time must be positive, got {}",
                self.tau_a
            )));
        }
        if !self.n0.is_finite() || self.n0 < 0.0 {
            return Err(Error::Argument(format!("chatter bound must be nonnegative, got {}", self.n0)));
        }
        Ok(())
    }
}

/// Result of checking a signal against an [`AdtSpec`].
#[derive(Serialize, Copy, Clone, Debug, PartialEq)]
pub struct AdtVerdict {
    pub valid: bool,
    /// Earliest switch instant at which the count exceeds the budget.
    pub first_violation: Option<f64>,
}

/// Checks `p ≤ n0 + τ_p / tau_a` at every switch instant `τ_p` up to the
/// horizon. Between instants the count is constant, so checking at the
/// instants is exact; a relative slack of 1e-9 absorbs float rounding.
pub fn validate_adt(signal: &SwitchingSignal, spec: &AdtSpec, horizon: f64) -> AdtVerdict {
    spec.validate().expect("ADT spec must be valid");
    for (idx, &t) in signal.instants().iter().enumerate() {
        if t > horizon {
            break;
        }
        let budget = spec.n0 + t / spec.tau_a;
        if (idx + 1) as f64 > budget + tol::ADT_SLACK * (1.0 + budget) {
            return AdtVerdict { valid: false, first_violation: Some(t) };
        }
    }
    AdtVerdict { valid: true, first_violation: None }
}

/// Generates a random signal satisfying the dwell-time spec by construction.
///
/// Gaps are drawn uniformly from `[0.5, 1.5) · tau_a` and pushed later when
/// the running budget would be exceeded, so every prefix satisfies the spec
/// strictly. Modes are drawn uniformly without immediate repeats. The same
/// seed always yields the same signal.
pub fn generate_adt_signal(
    spec: &AdtSpec,
    n_modes: usize,
    horizon: f64,
    seed: u64,
) -> SwitchingSignal {
    spec.validate().expect("ADT spec must be valid");
    assert!(n_modes >= 1, "need at least one mode");
    assert!(horizon.is_finite() && horizon > 0.0, "horizon must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = rng.gen_range(1..=n_modes);
    if n_modes == 1 {
        return SwitchingSignal::constant(initial);
    }
    let mut switches = Vec::new();
    let mut t = 0.0_f64;
    let mut current = initial;
    for p in 1_u64.. {
        let mut candidate = t + spec.tau_a * rng.gen_range(0.5..1.5);
        let over_budget = p as f64 - spec.n0;
        if over_budget > 0.0 {
            // Earliest instant keeping p <= n0 + t/tau_a with strict slack.
            candidate = candidate.max(over_budget * spec.tau_a + 1e-6);
        }
        candidate = candidate.max(t + tol::ZENO_GAP);
        if candidate >= horizon {
            break;
        }
        let r = rng.gen_range(0..n_modes - 1);
        let next = if r + 1 < current { r + 1 } else { r + 2 };
        switches.push((candidate, next));
        t = candidate;
        current = next;
    }
    let signal = SwitchingSignal::new(initial, switches).expect("construction is monotone");
    debug_assert!(validate_adt(&signal, spec, horizon).valid);
    signal
}

/// Round-robin periodic signal: mode 1 on `[0, period)`, then cycling
/// through all modes with the given period. Satisfies `AdtSpec { tau_a:
/// period, n0: 1 }`.
pub fn periodic_signal(period: f64, n_modes: usize, horizon: f64) -> SwitchingSignal {
    assert!(period.is_finite() && period > 0.0, "period must be positive");
    assert!(n_modes >= 1, "need at least one mode");
    assert!(horizon.is_finite() && horizon >= 0.0, "horizon must be nonnegative");
    if n_modes == 1 {
        return SwitchingSignal::constant(1);
    }
    let mut switches = Vec::new();
    for k in 1_usize.. {
        let t = k as f64 * period;
        if t >= horizon {
            break;
        }
        switches.push((t, (k % n_modes) + 1));
    }
    SwitchingSignal::new(1, switches).expect("periodic instants increase strictly")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(initial: usize, switches: &[(f64, usize)]) -> SwitchingSignal {
        SwitchingSignal::new(initial, switches.to_vec()).unwrap()
    }

    #[test]
    fn counting_uses_closed_right_endpoint() {
        let s = sig(1, &[(1.0, 2), (2.0, 1), (3.0, 2)]);
        assert_eq!(s.count_switches(3.0), 3);
        assert_eq!(s.count_switches(2.999), 2);
        assert_eq!(s.count_switches(0.0), 0);
    }

    #[test]
    fn mode_lookup_is_right_continuous() {
        let s = sig(1, &[(2.0, 3), (4.0, 2)]);
        assert_eq!(s.mode_at(0.0), 1);
        assert_eq!(s.mode_at(1.999), 1);
        assert_eq!(s.mode_at(2.0), 3);
        assert_eq!(s.mode_at(3.999), 3);
        assert_eq!(s.mode_at(4.0), 2);
        assert_eq!(s.mode_at(100.0), 2);
        assert_eq!(s.mode_at(-1.0), 1);
    }

    #[test]
    fn adt_boundary_equality_is_valid() {
        let s = sig(1, &[(3.0, 2), (6.0, 1), (9.0, 2)]);
        let v = validate_adt(&s, &AdtSpec { tau_a: 3.0, n0: 0.0 }, 10.0);
        assert!(v.valid);
        assert_eq!(v.first_violation, None);
    }

    #[test]
    fn adt_reports_first_violation() {
        let s = sig(1, &[(1.0, 2), (2.0, 1)]);
        let v = validate_adt(&s, &AdtSpec { tau_a: 3.0, n0: 1.0 }, 10.0);
        assert!(!v.valid);
        assert_eq!(v.first_violation, Some(2.0));
    }

    #[test]
    fn empty_signal_is_always_valid() {
        let s = SwitchingSignal::constant(4);
        let v = validate_adt(&s, &AdtSpec { tau_a: 0.001, n0: 0.0 }, 1e9);
        assert!(v.valid);
    }

    #[test]
    fn periodic_signal_example() {
        let s = periodic_signal(3.0, 2, 12.0);
        assert_eq!(s.instants(), &[3.0, 6.0, 9.0]);
        assert_eq!(s.initial_mode(), 1);
        assert_eq!(s.switch_modes(), &[2, 1, 2]);
        assert!(validate_adt(&s, &AdtSpec { tau_a: 3.0, n0: 1.0 }, 12.0).valid);
    }

    #[test]
    fn generated_signals_respect_their_spec() {
        for seed in 0..20 {
            let spec = AdtSpec { tau_a: 0.7, n0: (seed % 4) as f64 };
            let s = generate_adt_signal(&spec, 3, 40.0, seed);
            assert!(validate_adt(&s, &spec, 40.0).valid, "seed {seed}");
            assert!(s.max_mode() <= 3);
            let mut prev_mode = s.initial_mode();
            let mut prev_t = 0.0;
            for (&t, &m) in s.instants().iter().zip(s.switch_modes()) {
                assert_ne!(m, prev_mode, "immediate repeat at seed {seed}");
                assert!(t - prev_t >= tol::ZENO_GAP * 0.9);
                prev_mode = m;
                prev_t = t;
            }
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = AdtSpec { tau_a: 1.5, n0: 2.0 };
        let a = generate_adt_signal(&spec, 4, 25.0, 99);
        let b = generate_adt_signal(&spec, 4, 25.0, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn long_dwell_time_limits_switch_count() {
        let spec = AdtSpec { tau_a: 50.0, n0: 0.0 };
        let s = generate_adt_signal(&spec, 2, 30.0, 5);
        assert!(s.instants().len() <= 1);
    }

    #[test]
    fn csv_round_trip() {
        let s = sig(2, &[(0.75, 1), (1.5, 3), (2.625, 2)]);
        let text = s.to_csv();
        assert!(text.starts_with("t,mode\n0,2\n"));
        assert_eq!(SwitchingSignal::from_csv(&text).unwrap(), s);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(SwitchingSignal::from_csv("mode,t\n0,1\n").is_err());
        assert!(SwitchingSignal::from_csv("t,mode\n1,1\n").is_err());
        assert!(SwitchingSignal::from_csv("t,mode\n0,1\n2,0\n").is_err());
        assert!(SwitchingSignal::from_csv("t,mode\n0,1\n2,2\n1,1\n").is_err());
        assert!(SwitchingSignal::from_csv("t,mode\n").is_err());
    }

    #[test]
    fn construction_rejects_bad_switch_lists() {
        assert!(SwitchingSignal::new(0, vec![]).is_err());
        assert!(SwitchingSignal::new(1, vec![(0.0, 2)]).is_err());
        assert!(SwitchingSignal::new(1, vec![(1.0, 2), (1.0, 1)]).is_err());
        assert!(SwitchingSignal::new(1, vec![(1.0, 0)]).is_err());
    }

    #[test]
    fn segments_cover_the_horizon() {
        let s = sig(1, &[(1.0, 2), (2.5, 1), (30.0, 2)]);
        let segs = s.segments(10.0);
        assert_eq!(segs, vec![(0.0, 1.0, 1), (1.0, 2.5, 2), (2.5, 10.0, 1)]);
    }
}
