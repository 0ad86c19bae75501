//! Minimal dense two-phase simplex for the common-vector feasibility program.
//!
//! Problems here are tiny (a handful of variables, a few dozen rows), so a
//! plain tableau with Bland's anti-cycling rule is plenty. Not exposed outside
//! the crate.

const TOL: f64 = 1e-9;
const MAX_ITER: usize = 10_000;

#[derive(Debug)]
pub(crate) enum LpResult {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    ncols: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        self.rhs[r] /= piv;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.rows[i][e];
            if f == 0.0 {
                continue;
            }
            for j in 0..self.ncols {
                let upd = self.rows[r][j];
                self.rows[i][j] -= f * upd;
            }
            self.rhs[i] -= f * self.rhs[r];
            if self.rhs[i].abs() < 1e-13 {
                self.rhs[i] = 0.0;
            }
        }
        self.basis[r] = e;
    }

    fn reduced_costs(&self, cost: &[f64]) -> (Vec<f64>, f64) {
        let mut red = cost.to_vec();
        let mut value = 0.0;
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..self.ncols {
                red[j] -= cb * self.rows[i][j];
            }
            value += cb * self.rhs[i];
        }
        (red, value)
    }

    /// Maximizes `cost · x` over the current feasible tableau. Columns with
    /// index ≥ `col_limit` are barred from entering the basis.
    fn run(&mut self, cost: &[f64], col_limit: usize) -> Result<f64, LpResult> {
        for _ in 0..MAX_ITER {
            let (red, value) = self.reduced_costs(cost);
            let entering = (0..col_limit).find(|&j| red[j] > TOL);
            let Some(e) = entering else {
                return Ok(value);
            };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..self.m {
                let a = self.rows[i][e];
                if a > TOL {
                    let ratio = self.rhs[i] / a;
                    let better = ratio < best - 1e-12
                        || (ratio <= best + 1e-12
                            && leave.is_none_or(|l| self.basis[i] < self.basis[l]));
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(LpResult::Unbounded);
            };
            self.pivot(r, e);
        }
        log::warn!("simplex hit the iteration cap; reporting infeasible");
        Err(LpResult::Infeasible)
    }
}

/// Maximizes `c · x` subject to `a_ub · x ≤ b_ub` and `x ≥ 0`.
pub(crate) fn maximize(c: &[f64], a_ub: &[Vec<f64>], b_ub: &[f64]) -> LpResult {
    let m = a_ub.len();
    let n = c.len();
    debug_assert!(m > 0, "caller always supplies constraint rows");
    debug_assert!(a_ub.iter().all(|r| r.len() == n));
    debug_assert_eq!(b_ub.len(), m);

    // Columns: n structural, m slacks, then one artificial per negative-rhs
    // row. Rows with b < 0 are sign-flipped so every rhs starts nonnegative.
    let n_art = b_ub.iter().filter(|&&b| b < 0.0).count();
    let ncols = n + m + n_art;
    let mut t = Tableau {
        m,
        ncols,
        rows: vec![vec![0.0; ncols]; m],
        rhs: vec![0.0; m],
        basis: vec![0; m],
    };
    let art_start = n + m;
    let mut art = art_start;
    for i in 0..m {
        let flip = b_ub[i] < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        for j in 0..n {
            t.rows[i][j] = sign * a_ub[i][j];
        }
        t.rows[i][n + i] = sign;
        t.rhs[i] = sign * b_ub[i];
        if flip {
            t.rows[i][art] = 1.0;
            t.basis[i] = art;
            art += 1;
        } else {
            t.basis[i] = n + i;
        }
    }

    if n_art > 0 {
        let mut phase1_cost = vec![0.0; ncols];
        for j in art_start..ncols {
            phase1_cost[j] = -1.0;
        }
        let scale = 1.0 + b_ub.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        match t.run(&phase1_cost, ncols) {
            Ok(value) => {
                if value < -TOL * scale {
                    return LpResult::Infeasible;
                }
            }
            Err(_) => return LpResult::Infeasible,
        }
        // Drive leftover artificials out of the basis so phase 2 cannot drift
        // back into them; a row with no eligible pivot is redundant.
        for i in 0..t.m {
            if t.basis[i] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| t.rows[i][j].abs() > TOL) {
                    t.pivot(i, j);
                }
            }
        }
        let keep: Vec<usize> = (0..t.m).filter(|&i| t.basis[i] < art_start).collect();
        t.rows = keep.iter().map(|&i| std::mem::take(&mut t.rows[i])).collect();
        t.rhs = keep.iter().map(|&i| t.rhs[i]).collect();
        t.basis = keep.iter().map(|&i| t.basis[i]).collect();
        t.m = t.basis.len();
        for row in t.rows.iter_mut() {
            row.truncate(art_start);
        }
        t.ncols = art_start;
    }

    let mut cost = vec![0.0; t.ncols];
    cost[..n].copy_from_slice(c);
    match t.run(&cost, t.ncols) {
        Ok(objective) => {
            let mut x = vec![0.0; n];
            for i in 0..t.m {
                if t.basis[i] < n {
                    x[t.basis[i]] = t.rhs[i];
                }
            }
            LpResult::Optimal { x, objective }
        }
        Err(e) => e,
    }
}
