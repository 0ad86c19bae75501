//! Registry of named right-hand sides, initial histories, nonlinearities,
//! and ready-made example systems.
//!
//! System spec files refer to black-box dynamics and initial histories by
//! name; this module is where those names resolve. The two bundled examples
//! (`ex1`, a switched nonlinear time-varying delay system with declared
//! bounding data, and `ex2`, a switched sector system) double as end-to-end
//! fixtures for the command-line tools.

use std::sync::Arc;

use crate::linalg::{Matrix, MetzlerMatrix, PositiveVector};
use crate::simulate::Psi;
use crate::system::{
    BlackBoxMode, InitialHistory, Mode, RhsFn, SectorSubsystem, SwitchedSystem, TimeVarying,
};

/// Names accepted by [`rhs`].
pub const RHS_NAMES: &[&str] = &["ex1_mode1", "ex1_mode2"];

/// Names accepted by [`phi`].
pub const PHI_NAMES: &[&str] = &["ex1_phi", "ex2_phi"];

/// Names accepted by [`psi`].
pub const PSI_NAMES: &[&str] = &["ex2_psi"];

/// Names accepted by [`example_system`].
pub const EXAMPLE_NAMES: &[&str] = &["ex1", "ex2"];

/// Looks up a named black-box right-hand side.
///
/// Both `ex1` modes are genuinely nonlinear and time-varying: they mix a
/// norm term, trigonometric gains, and delayed states sampled one time unit
/// back, yet stay inside the bounding data declared in [`example_system`].
pub fn rhs(name: &str) -> Option<RhsFn> {
    match name {
        "ex1_mode1" => Some(Arc::new(|t, x, hist, out| {
            let mut xd = [0.0; 2];
            hist.state_at(t - 1.0, &mut xd);
            let r = x[0].hypot(x[1]);
            let (st, ct) = t.sin_cos();
            out[0] = -6.0 * x[0] + r * st * st + 2.0 * st * xd[0] + ct * xd[1];
            out[1] = x[0] * xd[1].sin().powi(2) - 5.0 * x[1] + x[1] * xd[0].sin().powi(2)
                + ct * xd[0]
                + 2.0 * ct * xd[1];
        })),
        "ex1_mode2" => Some(Arc::new(|t, x, hist, out| {
            let mut xd = [0.0; 2];
            hist.state_at(t - 1.0, &mut xd);
            let r = x[0].hypot(x[1]);
            let (st, ct) = t.sin_cos();
            out[0] = -5.0 * x[0] + x[0] * xd[0].cos().powi(2) + x[1] * xd[1].sin().powi(2)
                + 2.0 * ct * xd[0]
                + ct * xd[1];
            out[1] = r * ct * ct - 6.0 * x[1] + st * xd[0] + 2.0 * st * xd[1];
        })),
        _ => None,
    }
}

/// Looks up a named initial history. All bundled histories span one time
/// unit.
pub fn phi(name: &str) -> Option<InitialHistory> {
    match name {
        "ex1_phi" => Some(InitialHistory::from_fn(2, 1.0, |theta, out| {
            out[0] = -1.0;
            out[1] = theta.cos();
        })),
        "ex2_phi" => Some(InitialHistory::from_fn(2, 1.0, |theta, out| {
            out[0] = theta.sin();
            out[1] = theta.cos();
        })),
        _ => None,
    }
}

/// Looks up a named sector nonlinearity.
///
/// `ex2_psi` pairs `ψ₁(s) = 2s + s·cos²s / (1 + sin²s)` with
/// `ψ₂(s) = s + s·e^{−s²}`; both satisfy `s·ψ(s) > 0` for `s ≠ 0` and stay
/// under the slope bound `β = 3` used by the `ex2` system.
pub fn psi(name: &str) -> Option<Psi> {
    match name {
        "ex2_psi" => Some(Psi::new(vec![
            Arc::new(|s: f64| 2.0 * s + s * s.cos().powi(2) / (1.0 + s.sin().powi(2))),
            Arc::new(|s: f64| s + s * (-s * s).exp()),
        ])),
        _ => None,
    }
}

fn metzler(rows: &[Vec<f64>]) -> MetzlerMatrix {
    MetzlerMatrix::new(Matrix::from_rows(rows).expect("static example data"))
        .expect("static example data")
}

/// Builds a bundled example system.
pub fn example_system(name: &str) -> Option<SwitchedSystem> {
    match name {
        "ex1" => {
            let modes = vec![
                Mode::BlackBox(BlackBoxMode {
                    name: "ex1_mode1".into(),
                    f: rhs("ex1_mode1").unwrap(),
                    bounds: Some((
                        metzler(&[vec![-5.0, 1.0], vec![1.0, -4.0]]),
                        Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(),
                    )),
                }),
                Mode::BlackBox(BlackBoxMode {
                    name: "ex1_mode2".into(),
                    f: rhs("ex1_mode2").unwrap(),
                    bounds: Some((
                        metzler(&[vec![-4.0, 1.0], vec![1.0, -5.0]]),
                        Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap(),
                    )),
                }),
            ];
            Some(SwitchedSystem::new(2, 1.0, modes).expect("static example data"))
        }
        "ex2" => {
            let beta = PositiveVector::new(vec![3.0, 3.0]).unwrap();
            let p1 = Matrix::from_rows(&[vec![-2.0, 0.0], vec![1.0, -4.0]]).unwrap();
            let b1 = Matrix::from_rows(&[vec![0.0, 2.0], vec![0.0, 2.0]]).unwrap();
            let p2 = Matrix::from_rows(&[vec![-2.0, 0.0], vec![0.0, -2.0]]).unwrap();
            let b2 = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
            let modes = vec![
                Mode::Sector(
                    SectorSubsystem::new(
                        TimeVarying::Constant(p1),
                        TimeVarying::Constant(b1),
                        1.0,
                        beta.clone(),
                    )
                    .unwrap(),
                ),
                Mode::Sector(
                    SectorSubsystem::new(
                        TimeVarying::Constant(p2),
                        TimeVarying::Constant(b2),
                        1.0,
                        beta,
                    )
                    .unwrap(),
                ),
            ];
            Some(SwitchedSystem::new(2, 1.0, modes).expect("static example data"))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::certify_sector;
    use crate::system::History;

    #[test]
    fn unknown_names_resolve_to_none() {
        assert!(rhs("nope").is_none());
        assert!(phi("nope").is_none());
        assert!(psi("nope").is_none());
        assert!(example_system("nope").is_none());
    }

    #[test]
    fn every_advertised_name_resolves() {
        for name in RHS_NAMES {
            assert!(rhs(name).is_some(), "{name}");
        }
        for name in PHI_NAMES {
            assert!(phi(name).is_some(), "{name}");
        }
        for name in PSI_NAMES {
            assert!(psi(name).is_some(), "{name}");
        }
        for name in EXAMPLE_NAMES {
            assert!(example_system(name).is_some(), "{name}");
        }
    }

    #[test]
    fn ex1_rhs_matches_hand_evaluation_at_zero() {
        let f = rhs("ex1_mode1").unwrap();
        let hist = phi("ex1_phi").unwrap();
        let x = [-1.0, 1.0];
        let mut out = [0.0; 2];
        f(0.0, &x, &hist, &mut out);
        // At t = 0: sin t = 0, cos t = 1, and x(t−1) = φ(−1) = (−1, cos 1).
        let xd = [-1.0, (-1.0_f64).cos()];
        assert!((out[0] - (6.0 + xd[1])).abs() <= 1e-12);
        let expect =
            x[0] * xd[1].sin().powi(2) - 5.0 * x[1] + x[1] * xd[0].sin().powi(2) + xd[0]
                + 2.0 * xd[1];
        assert!((out[1] - expect).abs() <= 1e-12);
    }

    #[test]
    fn ex1_histories_evaluate_and_clamp() {
        let hist = phi("ex1_phi").unwrap();
        let mut out = [0.0; 2];
        hist.state_at(-0.5, &mut out);
        assert_eq!(out[0], -1.0);
        assert!((out[1] - 0.5_f64.cos()).abs() <= 1e-15);
        assert!((hist.norm_inf() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ex2_psi_respects_its_sector() {
        let psi = psi("ex2_psi").unwrap();
        let mut out = [0.0; 2];
        for i in -40..=40 {
            let s = i as f64 * 0.25;
            psi.apply(&[s, s], &mut out);
            for &v in &out {
                if s != 0.0 {
                    assert!(s * v > 0.0, "sign condition at {s}");
                }
                assert!(s * v <= 3.0 * s * s + 1e-12, "slope bound at {s}");
            }
        }
    }

    #[test]
    fn ex2_certifies_for_arbitrary_switching() {
        let sys = example_system("ex2").unwrap();
        let sectors: Vec<_> = sys
            .modes()
            .iter()
            .filter_map(|m| match m {
                Mode::Sector(s) => Some(s.clone()),
                _ => None,
            })
            .collect();
        let report = certify_sector(&sectors).unwrap();
        assert!(report.feasible);
        let cert = report.certificate.unwrap();
        assert_eq!(cert.gamma, 1.0);
        assert_eq!(cert.tau_star, 0.0);
    }
}
