//! Stability certificates for switched delay systems.
//!
//! Everything here operates on per-mode bounding pairs `(Â_k, V̂_k)`: a
//! Metzler matrix bounding the undelayed part and a nonnegative matrix
//! bounding the total variation of the delay part. A certificate consists of
//! positive vectors `ξ_k`, a decay rate `α`, a mode-mismatch factor `γ`, and
//! the induced average dwell-time bound `τ* = ln γ / α`.
//!
//! The decay rate is the largest `α` with
//!
//! ```text
//! (Â_k ξ_k)_i + e^{αh} (V̂_k ξ_k)_i + α ξ_{k,i} ≤ 0   for all k, i,
//! ```
//!
//! found row by row as the unique positive root of an increasing function.
//! With `γ = max_{k,l,i} ξ_{k,i} / ξ_{l,i}` after sup-norm normalization,
//! the certified system is globally exponentially stable under every
//! switching signal of average dwell time `τ_a > τ*`; when a single common
//! vector works (`γ = 1`), the certificate holds for every switching signal.

use crate::error::{Error, Result};
use crate::linalg::{
    find_common_positive_vector, find_positive_vector, Matrix, MetzlerMatrix, PositiveVector,
};
use crate::system::{Mode, SectorSubsystem, SwitchedSystem, TimeVarying};
use crate::tol;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Which stability criterion produced a certificate.
#[derive(Serialize, Deserialize, Copy, Clone, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// General functional criterion, per-mode vectors.
    Thm1,
    /// General functional criterion, common vector.
    Thm2,
    /// Bounding-pair criterion, per-mode vectors.
    Cor1,
    /// Time-invariant delay criterion.
    Cor3,
    /// Bounding-pair criterion, common vector.
    Cor5,
    /// Positive-system criterion.
    Cor6,
    /// Sector-nonlinearity criterion.
    Thm4,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Bounding pair `(Â, V̂)` for one mode.
#[derive(Clone, Debug)]
pub struct ModeBounds {
    a_hat: MetzlerMatrix,
    v_hat: Matrix,
    declared: bool,
    sampled: bool,
}

impl ModeBounds {
    fn validated(a_hat: MetzlerMatrix, v_hat: Matrix, declared: bool) -> Result<Self> {
        if v_hat.rows() != a_hat.dim() || v_hat.cols() != a_hat.dim() {
            return Err(Error::Dimension(format!(
                "variation bound is {}x{}, expected {0}x{0} to match Ahat",
                v_hat.rows(),
                v_hat.cols(),
            )));
        }
        if !v_hat.is_nonneg() {
            return Err(Error::Argument("variation bound must be entrywise nonnegative".into()));
        }
        Ok(Self { a_hat, v_hat, declared, sampled: false })
    }

    /// Bounds computed from model data.
    pub fn computed(a_hat: MetzlerMatrix, v_hat: Matrix) -> Result<Self> {
        Self::validated(a_hat, v_hat, false)
    }

    /// User-declared bounds; certificates built on them are conditional.
    pub fn declared(a_hat: MetzlerMatrix, v_hat: Matrix) -> Result<Self> {
        Self::validated(a_hat, v_hat, true)
    }

    /// Marks the bounds as a sup over sampled time-varying data.
    pub fn mark_sampled(mut self) -> Self {
        self.sampled = true;
        self
    }

    pub fn a_hat(&self) -> &MetzlerMatrix {
        &self.a_hat
    }

    pub fn v_hat(&self) -> &Matrix {
        &self.v_hat
    }

    pub fn is_declared(&self) -> bool {
        self.declared
    }

    pub fn is_sampled(&self) -> bool {
        self.sampled
    }

    pub fn dim(&self) -> usize {
        self.a_hat.dim()
    }

    /// Closed matrix `Â + V̂`, Metzler by construction.
    pub fn closed(&self) -> MetzlerMatrix {
        self.a_hat.add_nonneg(&self.v_hat).expect("shapes and signs validated")
    }
}

/// A positive-vector stability certificate.
#[derive(Serialize, Clone, Debug)]
pub struct Certificate {
    /// One normalized positive vector per mode (`‖ξ_k‖_∞ = 1`).
    pub xi: Vec<PositiveVector>,
    /// Certified exponential decay rate.
    pub alpha: f64,
    /// Mode-mismatch factor `max_{k,l,i} ξ_{k,i}/ξ_{l,i} ≥ 1`.
    pub gamma: f64,
    /// Average dwell-time bound `ln γ / α` (zero when `γ = 1`).
    pub tau_star: f64,
    /// Criterion that produced the certificate.
    pub theorem: Theorem,
    /// True when any mode's bounds were user-declared rather than computed.
    pub conditional: bool,
}

/// Outcome of running one criterion.
#[derive(Serialize, Clone, Debug)]
pub struct CriterionReport {
    pub feasible: bool,
    pub certificate: Option<Certificate>,
    /// Rows `g_{k,i}(α)` at the certified rate; all `≤ 0` when feasible.
    pub residuals: Vec<Vec<f64>>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn infeasible(notes: Vec<String>) -> Self {
        Self { feasible: false, certificate: None, residuals: Vec::new(), notes }
    }
}

fn check_bounds_xi(bounds: &[ModeBounds], xi: &[PositiveVector]) -> Result<()> {
    if bounds.is_empty() {
        return Err(Error::Argument("at least one mode is required".into()));
    }
    if bounds.len() != xi.len() {
        return Err(Error::Dimension(format!(
            "{} modes but {} candidate vectors",
            bounds.len(),
            xi.len()
        )));
    }
    for (k, (b, x)) in bounds.iter().zip(xi).enumerate() {
        if b.dim() != x.len() {
            return Err(Error::Dimension(format!(
                "mode {}: bounds are {}-dimensional, vector has length {}",
                k + 1,
                b.dim(),
                x.len()
            )));
        }
    }
    Ok(())
}

/// Largest decay rate supported by the given vectors: the minimum over all
/// rows of the unique positive root of
/// `g_{k,i}(α) = (Â_kξ_k)_i + e^{αh}(V̂_kξ_k)_i + αξ_{k,i}`.
///
/// Each root is bisected to a bracket of width 1e-12 and the lower end is
/// returned, so re-evaluating the rows at the result stays nonpositive.
/// Errors with [`Error::InvalidCertificate`] if any row is already
/// nonnegative at `α = 0`.
pub fn compute_alpha_max(bounds: &[ModeBounds], xi: &[PositiveVector], h: f64) -> Result<f64> {
    check_bounds_xi(bounds, xi)?;
    if !h.is_finite() || h < 0.0 {
        return Err(Error::Argument(format!("delay horizon must be nonnegative, got {h}")));
    }
    let mut alpha = f64::INFINITY;
    for (k, (b, x)) in bounds.iter().zip(xi).enumerate() {
        let ax = b.a_hat().mul_vec(x);
        let vx = b.v_hat().mul_vec(x);
        for i in 0..b.dim() {
            let g = |alpha: f64| ax[i] + (alpha * h).exp() * vx[i] + alpha * x[i];
            if g(0.0) >= 0.0 {
                return Err(Error::InvalidCertificate(format!(
                    "mode {}, row {}: (Ahat + Vhat) xi is not negative ({})",
                    k + 1,
                    i + 1,
                    g(0.0)
                )));
            }
            // g is strictly increasing, negative at 0, and unbounded above.
            let mut lo = 0.0;
            let mut hi = 1.0;
            while g(hi) <= 0.0 {
                lo = hi;
                hi *= 2.0;
            }
            while hi - lo > tol::ROOT_BRACKET {
                let mid = 0.5 * (lo + hi);
                if g(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            alpha = alpha.min(lo);
        }
    }
    Ok(alpha)
}

/// Mode-mismatch factor of a family of positive vectors: the largest
/// componentwise ratio between any two of them after normalization.
pub fn compute_gamma(xi: &[PositiveVector]) -> Result<f64> {
    if xi.is_empty() {
        return Err(Error::Argument("at least one vector is required".into()));
    }
    let n = xi[0].len();
    if xi.iter().any(|x| x.len() != n) {
        return Err(Error::Dimension("all vectors must share one length".into()));
    }
    let normalized: Vec<PositiveVector> = xi.iter().map(PositiveVector::normalized).collect();
    let mut gamma = 1.0_f64;
    for a in &normalized {
        for b in &normalized {
            for i in 0..n {
                gamma = gamma.max(a[i] / b[i]);
            }
        }
    }
    Ok(gamma)
}

/// Average dwell-time bound `τ* = ln γ / α`, exactly zero when `γ = 1`.
pub fn compute_tau_star(gamma: f64, alpha: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::Argument(format!("gamma must be at least 1, got {gamma}")));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Argument(format!("decay rate must be positive, got {alpha}")));
    }
    if gamma == 1.0 {
        return Ok(0.0);
    }
    Ok(gamma.ln() / alpha)
}

/// Residual rows `g_{k,i}(α)` for a candidate certificate.
pub fn certificate_residuals(
    bounds: &[ModeBounds],
    xi: &[PositiveVector],
    h: f64,
    alpha: f64,
) -> Result<Vec<Vec<f64>>> {
    check_bounds_xi(bounds, xi)?;
    let scale = (alpha * h).exp();
    bounds
        .iter()
        .zip(xi)
        .map(|(b, x)| {
            let ax = b.a_hat().mul_vec(x);
            let vx = b.v_hat().mul_vec(x);
            Ok((0..b.dim()).map(|i| ax[i] + scale * vx[i] + alpha * x[i]).collect())
        })
        .collect()
}

fn provenance_notes(bounds: &[ModeBounds], notes: &mut Vec<String>) {
    for (k, b) in bounds.iter().enumerate() {
        if b.is_declared() {
            notes.push(format!(
                "mode {}: bounds are user-declared; the certificate is conditional on them",
                k + 1
            ));
        }
        if b.is_sampled() {
            notes.push(format!(
                "mode {}: sampled-bound certificate; bounds are sups over the sample vertices",
                k + 1
            ));
        }
    }
}

fn assemble(
    bounds: &[ModeBounds],
    xi: Vec<PositiveVector>,
    h: f64,
    theorem: Theorem,
    mut notes: Vec<String>,
) -> Result<CriterionReport> {
    let xi: Vec<PositiveVector> = xi.iter().map(PositiveVector::normalized).collect();
    let alpha = compute_alpha_max(bounds, &xi, h)?;
    let gamma = compute_gamma(&xi)?;
    let tau_star = compute_tau_star(gamma, alpha)?;
    let residuals = certificate_residuals(bounds, &xi, h, alpha)?;
    if tau_star == 0.0 {
        notes.push("single-vector certificate: holds for every switching signal".into());
    } else {
        notes.push(format!(
            "holds for every switching signal with average dwell time above {tau_star:.6}"
        ));
    }
    provenance_notes(bounds, &mut notes);
    let conditional = bounds.iter().any(ModeBounds::is_declared);
    let certificate =
        Certificate { xi, alpha, gamma, tau_star, theorem, conditional };
    Ok(CriterionReport { feasible: true, certificate: Some(certificate), residuals, notes })
}

fn per_mode_core(bounds: &[ModeBounds], h: f64, theorem: Theorem) -> Result<CriterionReport> {
    if bounds.is_empty() {
        return Err(Error::Argument("at least one mode is required".into()));
    }
    let mut xi = Vec::with_capacity(bounds.len());
    for (k, b) in bounds.iter().enumerate() {
        match find_positive_vector(&b.closed()) {
            Some(x) => xi.push(x),
            None => {
                return Ok(CriterionReport::infeasible(vec![format!(
                    "mode {}: Ahat + Vhat is not Hurwitz, no positive vector exists",
                    k + 1
                )]))
            }
        }
    }
    assemble(bounds, xi, h, theorem, Vec::new())
}

fn common_core(
    bounds: &[ModeBounds],
    h: f64,
    theorem: Theorem,
    mut notes: Vec<String>,
) -> Result<CriterionReport> {
    if bounds.is_empty() {
        return Err(Error::Argument("at least one mode is required".into()));
    }
    let closed: Vec<MetzlerMatrix> = bounds.iter().map(ModeBounds::closed).collect();
    match find_common_positive_vector(&closed)? {
        Some(x) => {
            notes.push("common positive vector across all modes".into());
            let xi = vec![x; bounds.len()];
            assemble(bounds, xi, h, theorem, notes)
        }
        None => Ok(CriterionReport::infeasible(vec![
            "no common positive vector for the closed bounding matrices".into(),
        ])),
    }
}

/// Certifies each mode with its own positive vector and derives the dwell
/// time bound from the mismatch between the vectors.
pub fn certify_per_mode(bounds: &[ModeBounds], h: f64) -> Result<CriterionReport> {
    per_mode_core(bounds, h, Theorem::Cor1)
}

/// Like [`certify_per_mode`] but with caller-supplied candidate vectors.
///
/// The candidates are validated, not recomputed: each must make its own
/// closed matrix row-negative, otherwise [`Error::InvalidCertificate`].
pub fn certify_per_mode_with(
    bounds: &[ModeBounds],
    h: f64,
    candidates: &[PositiveVector],
) -> Result<CriterionReport> {
    check_bounds_xi(bounds, candidates)?;
    for (k, (b, x)) in bounds.iter().zip(candidates).enumerate() {
        let rows = b.closed().mul_vec(x);
        if rows.iter().any(|&r| r >= 0.0) {
            return Err(Error::InvalidCertificate(format!(
                "mode {}: candidate vector does not make Ahat + Vhat row-negative",
                k + 1
            )));
        }
    }
    assemble(bounds, candidates.to_vec(), h, Theorem::Cor1, Vec::new())
}

/// Searches for one positive vector that certifies every mode at once.
/// Success means stability under arbitrary switching (`γ = 1`, `τ* = 0`).
pub fn certify_common(bounds: &[ModeBounds], h: f64) -> Result<CriterionReport> {
    common_core(bounds, h, Theorem::Cor5, Vec::new())
}

/// Certifies a positive switched system through `Â_k = A_k` and
/// `V̂_k = η_k(0)`, the aggregate delay matrix.
///
/// Errors with [`Error::Unsupported`] when the system is not positive (or
/// positivity cannot be decided). For positive systems the criterion is also
/// necessary mode by mode: an infeasible mode is itself not exponentially
/// stable.
pub fn certify_positive(sys: &SwitchedSystem) -> Result<CriterionReport> {
    if !sys.check_positivity()? {
        return Err(Error::Unsupported(
            "system is not positive: needs Metzler A and nonnegative delay data".into(),
        ));
    }
    let mut bounds = Vec::with_capacity(sys.mode_count());
    for mode in sys.modes() {
        let sub = match mode {
            Mode::Linear(sub) => sub,
            _ => unreachable!("check_positivity admits linear modes only"),
        };
        let a = match &sub.a {
            TimeVarying::Constant(a) => MetzlerMatrix::new(a.clone())?,
            _ => unreachable!("check_positivity admits time-invariant modes only"),
        };
        bounds.push(ModeBounds::computed(a, sub.delay_op.eta_at_zero()?)?);
    }
    let mut report = per_mode_core(&bounds, sys.h(), Theorem::Cor6)?;
    if report.feasible {
        report
            .notes
            .push("for positive systems this criterion is also necessary mode by mode".into());
    } else {
        report
            .notes
            .push("the infeasible mode is itself not exponentially stable (necessity)".into());
    }
    Ok(report)
}

fn sector_bounds(modes: &[SectorSubsystem]) -> Result<(Vec<ModeBounds>, f64)> {
    if modes.is_empty() {
        return Err(Error::Argument("at least one mode is required".into()));
    }
    let n = modes[0].n();
    let h = modes[0].h;
    let beta = &modes[0].beta;
    for (k, m) in modes.iter().enumerate() {
        if m.n() != n {
            return Err(Error::Dimension(format!("mode {} has a different dimension", k + 1)));
        }
        if (m.h - h).abs() > 1e-12 * h.max(1.0) {
            return Err(Error::Argument(format!("mode {} has a different delay", k + 1)));
        }
        if m.beta.as_slice() != beta.as_slice() {
            return Err(Error::Argument(format!(
                "mode {} has a different sector bound; all modes must share beta",
                k + 1
            )));
        }
    }
    let bounds = modes
        .iter()
        .map(|m| ModeBounds::computed(m.a_hat(), m.v_hat()))
        .collect::<Result<Vec<_>>>()?;
    Ok((bounds, h))
}

/// Certifies a switched sector system, trying a common vector first and
/// falling back to per-mode vectors. Feasibility means absolute exponential
/// stability for every nonlinearity in the sector.
pub fn certify_sector(modes: &[SectorSubsystem]) -> Result<CriterionReport> {
    let (bounds, h) = sector_bounds(modes)?;
    let notes =
        vec!["absolute certificate: valid for every nonlinearity in the declared sector".into()];
    let common = common_core(&bounds, h, Theorem::Thm4, notes.clone())?;
    if common.feasible {
        return Ok(common);
    }
    let mut report = per_mode_core(&bounds, h, Theorem::Thm4)?;
    if report.feasible {
        report.notes.extend(notes);
        report.notes.push("no common vector; certificate uses per-mode vectors".into());
    }
    Ok(report)
}

/// One row of a [`ComparisonTable`].
#[derive(Serialize, Clone, Debug)]
pub struct ComparisonRow {
    pub label: String,
    pub feasible: bool,
    pub zeta: Option<PositiveVector>,
}

/// Feasibility of three common-vector tests for the same sector data.
///
/// All three look for a single positive vector; they differ in how the delay
/// matrices enter. The per-mode row pairs each `M(P_k)` with its own
/// `|B_k|`; the pooled row uses the entrywise envelope of all `|B_k|` and
/// transposed matrices; the pairwise row requires every cross pairing
/// `(M(P_k) + |B_s|)ᵀ` to be covered. The sector gains are immaterial to
/// feasibility and are left out.
#[derive(Serialize, Clone, Debug)]
pub struct ComparisonTable {
    pub per_mode: ComparisonRow,
    pub pooled: ComparisonRow,
    pub pairwise: ComparisonRow,
}

impl ComparisonTable {
    pub fn rows(&self) -> [&ComparisonRow; 3] {
        [&self.per_mode, &self.pooled, &self.pairwise]
    }
}

fn common_row(label: &str, mats: &[MetzlerMatrix]) -> Result<ComparisonRow> {
    let zeta = find_common_positive_vector(mats)?.map(|z| z.normalized());
    Ok(ComparisonRow { label: label.into(), feasible: zeta.is_some(), zeta })
}

/// Runs the three common-vector tests on time-invariant sector data.
pub fn compare_criteria(modes: &[SectorSubsystem]) -> Result<ComparisonTable> {
    let (_, _) = sector_bounds(modes)?;
    let mut ps = Vec::with_capacity(modes.len());
    let mut bs = Vec::with_capacity(modes.len());
    for (k, m) in modes.iter().enumerate() {
        match (&m.p, &m.b) {
            (TimeVarying::Constant(p), TimeVarying::Constant(b)) => {
                ps.push(crate::linalg::metzler_projection(p)?);
                bs.push(b.abs());
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "criterion comparison needs time-invariant modes; mode {} is sampled",
                    k + 1
                )))
            }
        }
    }
    let per_mode_mats = ps
        .iter()
        .zip(&bs)
        .map(|(p, b)| p.add_nonneg(b))
        .collect::<Result<Vec<_>>>()?;
    let mut pooled_b = Matrix::zeros(modes[0].n(), modes[0].n());
    for b in &bs {
        pooled_b = Matrix::sup(&pooled_b, b)?;
    }
    let pooled_mats = ps
        .iter()
        .map(|p| MetzlerMatrix::new(p.add_nonneg(&pooled_b)?.transpose()))
        .collect::<Result<Vec<_>>>()?;
    let mut pairwise_mats = Vec::with_capacity(ps.len() * bs.len());
    for p in &ps {
        for b in &bs {
            pairwise_mats.push(MetzlerMatrix::new(p.add_nonneg(b)?.transpose())?);
        }
    }
    Ok(ComparisonTable {
        per_mode: common_row("common vector, per-mode delay bounds", &per_mode_mats)?,
        pooled: common_row("common vector, pooled delay bound (transposed)", &pooled_mats)?,
        pairwise: common_row("common vector, pairwise delay bounds (transposed)", &pairwise_mats)?,
    })
}

/// Certifies a whole system from its bounding data: sector systems go
/// through the sector criterion, everything else tries a common vector
/// first and falls back to per-mode vectors.
pub fn certify_system(sys: &SwitchedSystem) -> Result<CriterionReport> {
    let sectors: Vec<SectorSubsystem> = sys
        .modes()
        .iter()
        .filter_map(|m| match m {
            Mode::Sector(s) => Some(s.clone()),
            _ => None,
        })
        .collect();
    if sectors.len() == sys.mode_count() {
        return certify_sector(&sectors);
    }
    let bounds = sys.bounding_data()?;
    let common = certify_common(&bounds, sys.h())?;
    if common.feasible {
        return Ok(common);
    }
    let mut report = certify_per_mode(&bounds, sys.h())?;
    report
        .notes
        .insert(0, "no common positive vector; using per-mode vectors".into());
    Ok(report)
}

/// Flat on-disk form of a [`CriterionReport`].
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CertificateFile {
    pub feasible: bool,
    pub theorem: Option<Theorem>,
    pub xi: Option<Vec<Vec<f64>>>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub tau_star: Option<f64>,
    pub residuals: Vec<Vec<f64>>,
    pub conditional: bool,
    pub notes: Vec<String>,
}

impl CertificateFile {
    pub fn from_report(report: &CriterionReport) -> Self {
        let cert = report.certificate.as_ref();
        Self {
            feasible: report.feasible,
            theorem: cert.map(|c| c.theorem),
            xi: cert.map(|c| c.xi.iter().map(|x| x.as_slice().to_vec()).collect()),
            alpha: cert.map(|c| c.alpha),
            gamma: cert.map(|c| c.gamma),
            tau_star: cert.map(|c| c.tau_star),
            residuals: report.residuals.clone(),
            conditional: cert.map(|c| c.conditional).unwrap_or(false),
            notes: report.notes.clone(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("invalid certificate file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate files always serialize")
    }

    /// Reconstructs the in-memory certificate, if the file holds one.
    pub fn to_certificate(&self) -> Result<Certificate> {
        if !self.feasible {
            return Err(Error::InvalidCertificate(
                "certificate file records an infeasible run".into(),
            ));
        }
        let missing =
            || Error::InvalidCertificate("certificate file is missing required fields".into());
        let xi = self
            .xi
            .as_ref()
            .ok_or_else(missing)?
            .iter()
            .map(|x| PositiveVector::new(x.clone()))
            .collect::<Result<Vec<_>>>()?;
        let alpha = self.alpha.ok_or_else(missing)?;
        let gamma = self.gamma.ok_or_else(missing)?;
        let tau_star = self.tau_star.ok_or_else(missing)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidCertificate(format!("bad decay rate {alpha}")));
        }
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::InvalidCertificate(format!("bad mismatch factor {gamma}")));
        }
        if !(tau_star.is_finite() && tau_star >= 0.0) {
            return Err(Error::InvalidCertificate(format!("bad dwell bound {tau_star}")));
        }
        Ok(Certificate {
            xi,
            alpha,
            gamma,
            tau_star,
            theorem: self.theorem.ok_or_else(missing)?,
            conditional: self.conditional,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn metzler(rows: &[&[f64]]) -> MetzlerMatrix {
        MetzlerMatrix::new(mat(rows)).unwrap()
    }

    fn pv(v: &[f64]) -> PositiveVector {
        PositiveVector::new(v.to_vec()).unwrap()
    }

    fn neg_identity_bounds(n: usize) -> ModeBounds {
        ModeBounds::computed(
            MetzlerMatrix::new(Matrix::identity(n).scale(-1.0)).unwrap(),
            Matrix::zeros(n, n),
        )
        .unwrap()
    }

    #[test]
    fn alpha_max_without_delay_part() {
        let bounds = [neg_identity_bounds(2)];
        let xi = [pv(&[1.0, 1.0])];
        let alpha = compute_alpha_max(&bounds, &xi, 1.0).unwrap();
        assert!((alpha - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn alpha_max_brackets_the_root() {
        let bounds = [ModeBounds::computed(metzler(&[&[-2.0]]), mat(&[&[0.5]])).unwrap()];
        let xi = [pv(&[1.0])];
        let alpha = compute_alpha_max(&bounds, &xi, 1.0).unwrap();
        let g = |a: f64| -2.0 + a.exp() * 0.5 + a;
        assert!(g(alpha) <= 0.0);
        assert!(g(alpha + 1e-9) > 0.0);
        assert!((alpha - 0.8406) < 1e-2);
    }

    #[test]
    fn alpha_max_rejects_nonnegative_rows() {
        let bounds = [ModeBounds::computed(metzler(&[&[-1.0]]), mat(&[&[2.0]])).unwrap()];
        let xi = [pv(&[1.0])];
        assert!(matches!(
            compute_alpha_max(&bounds, &xi, 1.0),
            Err(Error::InvalidCertificate(_))
        ));
    }

    #[test]
    fn gamma_of_mirrored_vectors() {
        let gamma = compute_gamma(&[pv(&[1.0, 0.5]), pv(&[0.5, 1.0])]).unwrap();
        assert_eq!(gamma, 2.0);
    }

    #[test]
    fn gamma_is_at_least_one() {
        let gamma = compute_gamma(&[pv(&[2.0, 3.0]), pv(&[4.0, 6.0])]).unwrap();
        assert_eq!(gamma, 1.0);
    }

    #[test]
    fn tau_star_examples() {
        let t = compute_tau_star(std::f64::consts::E, 1.0).unwrap();
        assert!((t - 1.0).abs() < 1e-15);
        assert_eq!(compute_tau_star(1.0, 0.01).unwrap(), 0.0);
        assert!(compute_tau_star(2.0, 0.0).is_err());
        assert!(compute_tau_star(2.0, -1.0).is_err());
        assert!(compute_tau_star(0.5, 1.0).is_err());
    }

    #[test]
    fn per_mode_single_stable_mode() {
        let report = certify_per_mode(&[neg_identity_bounds(2)], 1.0).unwrap();
        assert!(report.feasible);
        let cert = report.certificate.unwrap();
        assert_eq!(cert.gamma, 1.0);
        assert_eq!(cert.tau_star, 0.0);
        assert_eq!(cert.xi[0].as_slice(), &[1.0, 1.0]);
        assert!(report.residuals.iter().flatten().all(|&r| r <= 0.0));
    }

    #[test]
    fn per_mode_infeasible_mode_is_reported() {
        let bad = ModeBounds::computed(metzler(&[&[-1.0]]), mat(&[&[2.0]])).unwrap();
        let report = certify_per_mode(&[bad], 1.0).unwrap();
        assert!(!report.feasible);
        assert!(report.certificate.is_none());
        assert!(report.notes[0].contains("mode 1"));
    }

    #[test]
    fn candidates_are_validated_not_recomputed() {
        let bounds = [neg_identity_bounds(1)];
        let err = certify_per_mode_with(&bounds, 1.0, &[pv(&[1.0]), pv(&[1.0])]);
        assert!(matches!(err, Err(Error::Dimension(_))));

        let bad = ModeBounds::computed(metzler(&[&[-1.0]]), mat(&[&[2.0]])).unwrap();
        let err = certify_per_mode_with(&[bad], 1.0, &[pv(&[1.0])]);
        assert!(matches!(err, Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn candidate_scaling_is_immaterial() {
        let bounds = [
            ModeBounds::computed(metzler(&[&[-5.0, 1.0], &[1.0, -4.0]]), mat(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap(),
            ModeBounds::computed(metzler(&[&[-4.0, 1.0], &[1.0, -5.0]]), mat(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap(),
        ];
        let base = certify_per_mode_with(&bounds, 1.0, &[pv(&[0.8, 1.0]), pv(&[1.0, 0.8])])
            .unwrap()
            .certificate
            .unwrap();
        let scaled = certify_per_mode_with(&bounds, 1.0, &[pv(&[13.6, 17.0]), pv(&[17.0, 13.6])])
            .unwrap()
            .certificate
            .unwrap();
        assert!((base.alpha - scaled.alpha).abs() <= 1e-12);
        assert!((base.gamma - scaled.gamma).abs() <= 1e-12);
        assert!((base.tau_star - scaled.tau_star).abs() <= 1e-12);
    }

    #[test]
    fn common_reduces_to_per_mode_for_one_mode() {
        let bounds = [neg_identity_bounds(3)];
        let common = certify_common(&bounds, 1.0).unwrap();
        let per = certify_per_mode(&bounds, 1.0).unwrap();
        assert!(common.feasible);
        let (c, p) = (common.certificate.unwrap(), per.certificate.unwrap());
        assert!((c.alpha - p.alpha).abs() <= 1e-12);
        assert_eq!(c.gamma, 1.0);
        assert_eq!(c.tau_star, 0.0);
        assert!(common.notes.iter().any(|n| n.contains("every switching signal")));
    }

    #[test]
    fn positive_system_criterion() {
        use crate::system::{
            DelayOperator, DiscreteTerm, LinearDelaySubsystem, Mode, SwitchedSystem, TimeVarying,
        };
        let make = |a: Matrix, b: Matrix| {
            let term =
                DiscreteTerm { b: TimeVarying::Constant(b), lag: TimeVarying::Constant(1.0) };
            let op = DelayOperator::new(2, 1.0, vec![term], None).unwrap();
            let sub = LinearDelaySubsystem::new(TimeVarying::Constant(a), op).unwrap();
            SwitchedSystem::new(2, 1.0, vec![Mode::Linear(sub)]).unwrap()
        };
        let good = make(mat(&[&[-3.0, 1.0], &[0.0, -3.0]]), Matrix::identity(2));
        let report = certify_positive(&good).unwrap();
        assert!(report.feasible);
        assert_eq!(report.certificate.unwrap().theorem, Theorem::Cor6);
        assert!(report.notes.iter().any(|n| n.contains("necessary")));

        let bad = make(Matrix::identity(2).scale(-1.0), Matrix::identity(2).scale(2.0));
        let report = certify_positive(&bad).unwrap();
        assert!(!report.feasible);

        let not_positive = make(mat(&[&[-3.0, -1.0], &[0.0, -3.0]]), Matrix::identity(2));
        assert!(matches!(certify_positive(&not_positive), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sector_single_mode() {
        let sub = SectorSubsystem::new(
            TimeVarying::Constant(Matrix::identity(2).scale(-2.0)),
            TimeVarying::Constant(Matrix::identity(2)),
            1.0,
            pv(&[1.0, 1.0]),
        )
        .unwrap();
        let report = certify_sector(&[sub]).unwrap();
        assert!(report.feasible);
        let cert = report.certificate.unwrap();
        assert_eq!(cert.theorem, Theorem::Thm4);
        assert_eq!(cert.gamma, 1.0);
    }

    #[test]
    fn sector_requires_shared_beta() {
        let make = |beta: &[f64]| {
            SectorSubsystem::new(
                TimeVarying::Constant(Matrix::identity(1).scale(-3.0)),
                TimeVarying::Constant(Matrix::zeros(1, 1)),
                1.0,
                pv(beta),
            )
            .unwrap()
        };
        assert!(certify_sector(&[make(&[1.0]), make(&[2.0])]).is_err());
    }

    #[test]
    fn comparison_rows_agree_for_symmetric_single_mode() {
        let sub = SectorSubsystem::new(
            TimeVarying::Constant(mat(&[&[-4.0, 1.0], &[1.0, -4.0]])),
            TimeVarying::Constant(mat(&[&[0.5, 0.2], &[0.2, 0.5]])),
            1.0,
            pv(&[1.0, 1.0]),
        )
        .unwrap();
        let table = compare_criteria(&[sub]).unwrap();
        assert!(table.per_mode.feasible);
        assert!(table.pooled.feasible);
        assert!(table.pairwise.feasible);
    }

    #[test]
    fn comparison_all_feasible_without_delays() {
        let make = || {
            SectorSubsystem::new(
                TimeVarying::Constant(Matrix::identity(2).scale(-2.0)),
                TimeVarying::Constant(Matrix::zeros(2, 2)),
                1.0,
                pv(&[1.0, 1.0]),
            )
            .unwrap()
        };
        let table = compare_criteria(&[make(), make()]).unwrap();
        for row in table.rows() {
            assert!(row.feasible, "{} should be feasible", row.label);
        }
    }

    #[test]
    fn certificate_file_round_trips() {
        let report = certify_per_mode(&[neg_identity_bounds(2)], 1.0).unwrap();
        let file = CertificateFile::from_report(&report);
        let parsed = CertificateFile::parse(&file.to_json()).unwrap();
        let cert = parsed.to_certificate().unwrap();
        let orig = report.certificate.unwrap();
        assert_eq!(cert.alpha, orig.alpha);
        assert_eq!(cert.gamma, orig.gamma);
        assert_eq!(cert.theorem, orig.theorem);

        let infeasible = CriterionReport::infeasible(vec!["nope".into()]);
        let file = CertificateFile::from_report(&infeasible);
        assert!(file.to_certificate().is_err());
    }

    #[test]
    fn theorem_names_serialize_exactly() {
        assert_eq!(serde_json::to_string(&Theorem::Cor1).unwrap(), "\"Cor1\"");
        assert_eq!(serde_json::to_string(&Theorem::Thm4).unwrap(), "\"Thm4\"");
        assert_eq!(Theorem::Cor5.to_string(), "Cor5");
    }
}
