//! Shared test oracles, implemented independently of the crate under test:
//! eigenvalue-based Hurwitz checks, a grid-scan decay-rate root finder, and
//! seeded random instance generators. Everything here works on plain
//! `Vec<Vec<f64>>` rows so no crate code is exercised by the oracles
//! themselves.
#![allow(dead_code)]

use rand::Rng;

type C = (f64, f64);

fn cadd(a: C, b: C) -> C {
    (a.0 + b.0, a.1 + b.1)
}

fn csub(a: C, b: C) -> C {
    (a.0 - b.0, a.1 - b.1)
}

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C, b: C) -> C {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn cabs(a: C) -> f64 {
    a.0.hypot(a.1)
}

fn trace(m: &[Vec<f64>]) -> f64 {
    (0..m.len()).map(|i| m[i][i]).sum()
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Monic characteristic polynomial coefficients `[1, c1, ..., cn]` with
/// `p(λ) = λ^n + c1 λ^{n−1} + … + cn`, by the Faddeev-LeVerrier recurrence.
fn char_poly(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![1.0];
    let mut m = a.to_vec();
    for k in 1..=n {
        let ck = -trace(&m) / k as f64;
        coeffs.push(ck);
        if k == n {
            break;
        }
        for i in 0..n {
            m[i][i] += ck;
        }
        m = mat_mul(a, &m);
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], z: C) -> C {
    let mut acc = (0.0, 0.0);
    for &c in coeffs {
        acc = cadd(cmul(acc, z), (c, 0.0));
    }
    acc
}

/// All roots of a monic real polynomial by Durand-Kerner iteration.
fn poly_roots(coeffs: &[f64]) -> Vec<C> {
    let n = coeffs.len() - 1;
    let seed: C = (0.4, 0.9);
    let mut z: Vec<C> = Vec::with_capacity(n);
    let mut p = seed;
    for _ in 0..n {
        z.push(p);
        p = cmul(p, seed);
    }
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for j in 0..n {
            let mut denom = (1.0, 0.0);
            for l in 0..n {
                if l != j {
                    denom = cmul(denom, csub(z[j], z[l]));
                }
            }
            let step = cdiv(poly_eval(coeffs, z[j]), denom);
            z[j] = csub(z[j], step);
            max_step = max_step.max(cabs(step));
        }
        let zmax = z.iter().map(|w| cabs(*w)).fold(0.0, f64::max);
        if max_step < 1e-13 * (1.0 + zmax) {
            break;
        }
    }
    z
}

/// Largest real part over the spectrum of a real square matrix.
pub fn spectral_abscissa(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    match n {
        1 => a[0][0],
        2 => {
            let tr = a[0][0] + a[1][1];
            let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            let disc = tr * tr - 4.0 * det;
            if disc >= 0.0 {
                (tr + disc.sqrt()) / 2.0
            } else {
                tr / 2.0
            }
        }
        _ => poly_roots(&char_poly(a))
            .into_iter()
            .map(|z| z.0)
            .fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn is_hurwitz_oracle(a: &[Vec<f64>]) -> bool {
    spectral_abscissa(a) < 0.0
}

/// Independent dense linear solve (partial pivoting); `None` on singular.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for j in col..=n {
                m[r][j] -= f * m[col][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = m[i][n];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}

/// Worst certificate residual `max_{k,i} g_{k,i}(α)` with
/// `g_{k,i}(α) = (Âξ_k)_i + e^{αh}(V̂ξ_k)_i + αξ_{k,i}`.
pub fn worst_residual(
    a_hat: &[Vec<Vec<f64>>],
    v_hat: &[Vec<Vec<f64>>],
    xi: &[Vec<f64>],
    h: f64,
    alpha: f64,
) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let e = (alpha * h).exp();
    for k in 0..a_hat.len() {
        let n = xi[k].len();
        for i in 0..n {
            let mut g = alpha * xi[k][i];
            for j in 0..n {
                g += a_hat[k][i][j] * xi[k][j] + e * v_hat[k][i][j] * xi[k][j];
            }
            worst = worst.max(g);
        }
    }
    worst
}

/// Grid-scan oracle for the maximal decay rate: the smallest α where some
/// residual row turns nonnegative, located by three successive refinements
/// down to a 1e−6 grid. Returns the cell midpoint.
pub fn grid_alpha_root(
    a_hat: &[Vec<Vec<f64>>],
    v_hat: &[Vec<Vec<f64>>],
    xi: &[Vec<f64>],
    h: f64,
) -> f64 {
    let g = |alpha: f64| worst_residual(a_hat, v_hat, xi, h, alpha);
    assert!(g(0.0) < 0.0, "grid oracle needs a feasible certificate at alpha = 0");
    let mut lo = 0.0;
    let mut step = 1e-2;
    let mut hi;
    loop {
        hi = lo + step;
        if g(hi) >= 0.0 {
            break;
        }
        lo = hi;
        assert!(lo < 1e4, "no sign change found below alpha = 1e4");
    }
    for fine in [1e-4, 1e-6] {
        step = fine;
        let mut a = lo;
        loop {
            let b = a + step;
            if b >= hi || g(b) >= 0.0 {
                lo = a;
                hi = b.min(hi);
                break;
            }
            a = b;
        }
    }
    0.5 * (lo + hi)
}

/// Random Metzler matrix: off-diagonal entries in [0, 2), diagonal in
/// [−2n − 1, 1). Hurwitz about half the time for the sizes used in tests.
pub fn random_metzler<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = if i == j {
                rng.gen_range(-(2.0 * n as f64 + 1.0)..1.0)
            } else {
                rng.gen_range(0.0..2.0)
            };
        }
    }
    m
}

/// Random certified instance: a Hurwitz Metzler sum `M = Â + V̂` built by
/// diagonal dominance, split into a Metzler part and a nonnegative part, plus
/// the canonical positive vector from an independent solve of `Mξ = −1`.
pub fn random_certified_mode<R: Rng>(
    rng: &mut R,
    n: usize,
) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<f64>) {
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut off_sum = 0.0;
        for j in 0..n {
            if i != j {
                m[i][j] = rng.gen_range(0.0..2.0);
                off_sum += m[i][j];
            }
        }
        m[i][i] = -off_sum - rng.gen_range(0.1..3.0);
    }
    let mut a_hat = m.clone();
    let mut v_hat = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                let c = rng.gen_range(0.0..0.5);
                v_hat[i][i] = c;
                a_hat[i][i] = m[i][i] - c;
            } else {
                let s: f64 = rng.gen_range(0.0..1.0);
                v_hat[i][j] = s * m[i][j];
                a_hat[i][j] = m[i][j] - v_hat[i][j];
            }
        }
    }
    let xi = gauss_solve(&m, &vec![-1.0; n]).expect("diagonally dominant, nonsingular");
    assert!(xi.iter().all(|&v| v > 0.0));
    (a_hat, v_hat, xi)
}

#[test]
fn oracle_spectral_abscissa_known_cases() {
    assert!((spectral_abscissa(&[vec![-3.0]]) + 3.0).abs() < 1e-12);
    // Rotation-like block: eigenvalues −1 ± 2i.
    let rot = vec![vec![-1.0, 2.0], vec![-2.0, -1.0]];
    assert!((spectral_abscissa(&rot) + 1.0).abs() < 1e-12);
    // Upper triangular: spectrum on the diagonal.
    let tri = vec![
        vec![-5.0, 1.0, 2.0],
        vec![0.0, -0.5, 3.0],
        vec![0.0, 0.0, -2.0],
    ];
    assert!((spectral_abscissa(&tri) + 0.5).abs() < 1e-9);
    // Companion matrix of (λ+1)(λ+2)(λ−0.25)(λ+4): abscissa 0.25.
    let p = [1.0, 6.75, 12.25, 4.5, -2.0];
    let companion = vec![
        vec![-p[1], -p[2], -p[3], -p[4]],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ];
    assert!((spectral_abscissa(&companion) - 0.25).abs() < 1e-9);
}

#[test]
fn oracle_grid_root_matches_closed_form() {
    // V̂ = 0 reduces g to (Âξ)_i + αξ_i with root min_i −(Âξ)_i/ξ_i; for
    // Â = −I and ξ = 1 the root is exactly 1.
    let a = vec![vec![vec![-1.0, 0.0], vec![0.0, -1.0]]];
    let v = vec![vec![vec![0.0, 0.0], vec![0.0, 0.0]]];
    let xi = vec![vec![1.0, 1.0]];
    let root = grid_alpha_root(&a, &v, &xi, 1.0);
    assert!((root - 1.0).abs() < 1e-5);
}

#[test]
fn oracle_gauss_solve_round_trip() {
    let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]];
    let x = gauss_solve(&a, &[3.0, 5.0, 5.0]).unwrap();
    for i in 0..3 {
        let r: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
        assert!((r - [3.0, 5.0, 5.0][i]).abs() < 1e-12);
    }
    let sing = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
    assert!(gauss_solve(&sing, &[1.0, 2.0]).is_none());
}
