//! Inverses of Γ: the splitting series inverse, minimal-norm solves, decay certificates,
//! approximate inverses assembled from graded reference orbits, and Neumann inversion.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, torus_dist, MapModel, OrbitWindow, TorusPoint};
use crate::error::{BudgetTerm, Error, Result, Side};
use crate::operator::{assemble_gamma, norm_upper, MatrixRep, TransferOperator};
use crate::seqspace::{Grade, TangentSequence, Window};
use crate::splitting::{compute_splitting, SplittingFrames};

/// `|B_{i,j}| ≤ c λ^{|j−i|}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub c_decay: f64,
    pub lambda_decay: f64,
}

/// Block matrix realizing an inverse (or approximate inverse) of Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseOperator {
    pub rep: MatrixRep,
    pub certificate: Option<DecayCertificate>,
    pub grade_in: Grade,
    pub grade_out: Grade,
    /// Recorded norm bound.
    pub bound: f64,
    /// Name of the estimate `bound` instantiates.
    pub bound_name: String,
    /// Pesin level `m` of the data the inverse was built from.
    pub level: Option<u32>,
    /// Uniform `X_∞` bound `4 m d³ / (1 − e^{−1/n})` when a level is attached.
    pub uniform_bound: Option<f64>,
}

#[derive(Serialize)]
struct CertificateRecord {
    c_decay: Option<f64>,
    lambda_decay: Option<f64>,
    grade_in: Grade,
    grade_out: Grade,
    bound: f64,
    bound_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    uniform_bound: Option<f64>,
}

impl InverseOperator {
    /// `{c_decay, lambda_decay, grade_in, grade_out, bound, bound_name}`.
    pub fn certificate_json(&self) -> serde_json::Value {
        serde_json::to_value(CertificateRecord {
            c_decay: self.certificate.map(|c| c.c_decay),
            lambda_decay: self.certificate.map(|c| c.lambda_decay),
            grade_in: self.grade_in,
            grade_out: self.grade_out,
            bound: self.bound,
            bound_name: self.bound_name.clone(),
            uniform_bound: self.uniform_bound,
        })
        .expect("certificate serializes")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "rep": self.rep.to_json(), "certificate": self.certificate_json() })
    }

    pub fn apply(&self, seq: &TangentSequence) -> Result<TangentSequence> {
        self.rep.apply(seq)
    }
}

/// Names under which bounds are reported.
pub mod bound_names {
    pub const SPLITTING_SERIES: &str = "splitting_series";
    pub const ROW_SUM: &str = "row_sum";
    pub const NEUMANN: &str = "neumann_geometric";
    pub const PESIN_UNIFORM: &str = "pesin_uniform";
    pub const GRADED_TO_UNIFORM: &str = "graded_to_uniform";
}

/// `a c (1 + λ e^{1/n}) / (1 − λ e^{1/n})`.
pub fn splitting_series_bound(a: f64, c: f64, lambda: f64, grade: Grade) -> Result<f64> {
    let q = lambda * grade.ratio_bound();
    if q >= 1.0 {
        return Err(Error::GradeTooCoarse(q));
    }
    Ok(a * c * (1.0 + q) / (1.0 - q))
}

/// Propagates `P^s(x_j)` forward or `−P^u(x_j)` backward to produce `Υ_{i,j}`.
fn splitting_block(gamma: &TransferOperator, frames: &SplittingFrames, inv: &[DMatrix<f64>], i: i64, j: i64) -> DMatrix<f64> {
    let k0 = gamma.input_window().k_min;
    if i >= j {
        let mut m = frames.frame(j).ps.clone();
        for t in j..i {
            m = &frames.frame(t + 1).ps * (gamma.df(t) * m);
        }
        m
    } else {
        let mut m = frames.frame(j).pu.clone();
        for t in (i..j).rev() {
            m = &frames.frame(t).pu * (&inv[(t - k0) as usize] * m);
        }
        -m
    }
}

/// `Υ_{i,j} = Df^{i−j}(x_j) P^s(x_j)` for `i ≥ j`, `−Df^{i−j}(x_j) P^u(x_j)` for `i < j`.
///
/// Rows run over Γ's domain window and columns over its range window. The recorded bound is
/// the splitting series estimate at `grade`.
pub fn splitting_inverse(gamma: &TransferOperator, frames: &SplittingFrames, grade: Grade) -> Result<InverseOperator> {
    let rows = gamma.input_window();
    let cols = gamma.output_window();
    if !frames.window().covers(&rows) {
        return Err(Error::Precondition(format!(
            "frames on {} do not cover the operator window {}",
            frames.window(),
            rows
        )));
    }
    let k = frames.constants;
    let bound = splitting_series_bound(k.a, k.c, k.lambda, grade)?;
    let inv = inverse_cocycle(gamma)?;
    let d = gamma.dim();
    let columns: Vec<Vec<(i64, DMatrix<f64>)>> = cols
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&j| {
            let mut out = Vec::with_capacity(rows.len());
            let mut m = frames.frame(j).ps.clone();
            out.push((j, m.clone()));
            // P^s Df = Df P^s; applying it every step stops rounding from growing
            for i in j + 1..=rows.k_max {
                m = &frames.frame(i).ps * (gamma.df(i - 1) * m);
                out.push((i, m.clone()));
            }
            let mut m = frames.frame(j).pu.clone();
            for i in (rows.k_min..j).rev() {
                m = &frames.frame(i).pu * (&inv[(i - rows.k_min) as usize] * m);
                out.push((i, -m.clone()));
            }
            out
        })
        .collect();
    let mut rep = MatrixRep::new(rows, cols, d);
    for (j, col) in cols.iter().zip(columns) {
        for (i, b) in col {
            rep.insert(i, j, b);
        }
    }
    let certificate = decay_certificate(&rep, gamma.sup_subdiagonal().max(1.0), norm_upper(&rep, Grade::Infinity, Grade::Infinity)).ok();
    Ok(InverseOperator {
        rep,
        certificate,
        grade_in: grade,
        grade_out: grade,
        bound,
        bound_name: bound_names::SPLITTING_SERIES.into(),
        level: None,
        uniform_bound: None,
    })
}

/// Only the requested rows of the splitting inverse.
pub fn splitting_inverse_rows(gamma: &TransferOperator, frames: &SplittingFrames, rows_wanted: &[i64], grade: Grade) -> Result<InverseOperator> {
    let rows = gamma.input_window();
    let cols = gamma.output_window();
    if !frames.window().covers(&rows) {
        return Err(Error::Precondition(format!("frames on {} do not cover {}", frames.window(), rows)));
    }
    let k = frames.constants;
    let bound = splitting_series_bound(k.a, k.c, k.lambda, grade)?;
    let inv = inverse_cocycle(gamma)?;
    let mut rep = MatrixRep::new(rows, cols, gamma.dim());
    for &i in rows_wanted {
        for j in cols.iter() {
            rep.insert(i, j, splitting_block(gamma, frames, &inv, i, j));
        }
    }
    Ok(InverseOperator {
        rep,
        certificate: None,
        grade_in: grade,
        grade_out: grade,
        bound,
        bound_name: bound_names::SPLITTING_SERIES.into(),
        level: Some(bound.ceil() as u32),
        uniform_bound: None,
    })
}

fn inverse_cocycle(gamma: &TransferOperator) -> Result<Vec<DMatrix<f64>>> {
    gamma
        .cocycle()
        .iter()
        .map(|a| a.clone().try_inverse().ok_or_else(|| Error::Numeric("singular derivative".into())))
        .collect()
}

/// Factorization for minimal weighted-norm solutions of `Γξ = rhs`.
///
/// With `W = diag(exp(−|k|/n))` the problem is `min |Wξ|₂` subject to `ΓW^{-1}ζ = rhs`,
/// `ζ = Wξ`. Writing `(ΓW^{-1})ᵀ = QR`, the solution is `ζ = Q R^{-T} rhs`.
#[derive(Debug, Clone)]
pub struct MinNormSolver {
    gamma: TransferOperator,
    grade: Grade,
    winv: Vec<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl MinNormSolver {
    pub fn new(gamma: &TransferOperator, grade: Grade) -> Self {
        let d = gamma.dim();
        let input = gamma.input_window();
        let winv: Vec<f64> = input.iter().flat_map(|k| std::iter::repeat(1.0 / grade.weight(k)).take(d)).collect();
        let mut m = gamma.to_dense();
        for (c, s) in winv.iter().enumerate() {
            m.column_mut(c).scale_mut(*s);
        }
        let qr = m.transpose().qr();
        MinNormSolver { gamma: gamma.clone(), grade, winv, q: qr.q(), r: qr.r() }
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn solve(&self, rhs: &TangentSequence) -> Result<TangentSequence> {
        if rhs.window() != self.gamma.output_window() || rhs.dim() != self.gamma.dim() {
            return Err(Error::Dimension(format!(
                "right-hand side on {} for operator range {}",
                rhs.window(),
                self.gamma.output_window()
            )));
        }
        let b = rhs.to_dvector();
        let y = self
            .r
            .transpose()
            .solve_lower_triangular(&b)
            .ok_or_else(|| Error::Numeric("rank-deficient transfer operator".into()))?;
        let mut xi = &self.q * y;
        for (x, s) in xi.iter_mut().zip(&self.winv) {
            *x *= s;
        }
        let xi = TangentSequence::from_dvector(self.gamma.input_window().k_min, self.gamma.dim(), &xi)?;
        let res = self.gamma.apply(&xi)?.lin_comb(1.0, rhs, -1.0)?.sup_norm();
        let scale = rhs.sup_norm().max(f64::MIN_POSITIVE);
        if res > 1e-8 * scale.max(1.0) {
            return Err(Error::Numeric(format!("minimal-norm residual {res:e} too large")));
        }
        Ok(xi)
    }

    /// The solution operator `W^{-1} Q R^{-T}` as a block matrix.
    pub fn to_inverse(&self) -> Result<InverseOperator> {
        let n = self.r.nrows();
        let rinv_t = self
            .r
            .transpose()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::Numeric("rank-deficient transfer operator".into()))?;
        let mut dense = &self.q * rinv_t;
        for (r, s) in self.winv.iter().enumerate() {
            dense.row_mut(r).scale_mut(*s);
        }
        let rep = MatrixRep::from_dense(self.gamma.input_window(), self.gamma.output_window(), self.gamma.dim(), &dense);
        let bound = norm_upper(&rep, self.grade, self.grade);
        let certificate = decay_certificate(&rep, self.gamma.sup_subdiagonal().max(1.0), norm_upper(&rep, Grade::Infinity, Grade::Infinity)).ok();
        Ok(InverseOperator {
            rep,
            certificate,
            grade_in: self.grade,
            grade_out: self.grade,
            bound,
            bound_name: bound_names::ROW_SUM.into(),
            level: None,
            uniform_bound: None,
        })
    }
}

/// Minimal weighted-norm solution of `Γξ = rhs`.
pub fn minimal_norm_solve(gamma: &TransferOperator, rhs: &TangentSequence, grade: Grade) -> Result<TangentSequence> {
    MinNormSolver::new(gamma, grade).solve(rhs)
}

/// Reciprocal smallest singular value of `W Γ W^{-1}` on `[−K, K]` for each `K`.
pub fn solve_norm_proxy(gamma: &TransferOperator, grade: Grade, k_list: &[i64]) -> Result<Vec<(i64, f64)>> {
    if k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("K_list must be strictly increasing".into()));
    }
    k_list
        .par_iter()
        .map(|&k| {
            let sub = gamma.restrict(Window::centered(k))?;
            Ok((k, 1.0 / smallest_singular_value(&sub, grade)))
        })
        .collect()
}

/// `σ_min(W Γ W^{-1})`.
pub fn smallest_singular_value(gamma: &TransferOperator, grade: Grade) -> f64 {
    let d = gamma.dim();
    let mut m = gamma.to_dense();
    for (c, k) in gamma.input_window().iter().enumerate() {
        let s = 1.0 / grade.weight(k);
        for t in 0..d {
            m.column_mut(c * d + t).scale_mut(s);
        }
    }
    for (r, k) in gamma.output_window().iter().enumerate() {
        let s = grade.weight(k);
        for t in 0..d {
            m.row_mut(r * d + t).scale_mut(s);
        }
    }
    m.singular_values().min()
}

/// `c = max(a, b) λ / (λ − ab(1 − λ))`, finite for `λ ∈ (ab/(ab + 1), 1)`.
pub fn decay_constant(a: f64, b: f64, lambda: f64) -> f64 {
    a.max(b) * lambda / (lambda - a * b * (1.0 - lambda))
}

/// Number of candidate rates tried by [`decay_certificate`].
pub const DECAY_GRID: usize = 64;

/// Exponential off-diagonal decay certificate, see [`decay_certificate_graded`].
pub fn decay_certificate(rep: &MatrixRep, a: f64, b: f64) -> Result<DecayCertificate> {
    decay_certificate_graded(rep, a, b, Grade::Infinity)
}

/// Picks `λ` on a grid of `DECAY_GRID` values in `(ab/(ab+1), 1)` minimizing `c(λ) λ^w`, `w`
/// the window half-width (ties go to the smaller `λ`), then checks every block against
/// `c λ^{|j−i|} exp((|i| − |j|)/n)`.
///
/// `a` bounds the subdiagonal blocks of Γ and `b` the norm of the inverse.
pub fn decay_certificate_graded(rep: &MatrixRep, a: f64, b: f64, grade: Grade) -> Result<DecayCertificate> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Precondition(format!("decay certificate needs a, b > 0 (a = {a}, b = {b})")));
    }
    let ab = a * b;
    let lo = ab / (ab + 1.0);
    let w = ((rep.rows().len().max(rep.cols().len()) as f64 - 1.0) / 2.0).max(1.0);
    let mut best: Option<(f64, f64, f64)> = None;
    for t in 0..DECAY_GRID {
        let lambda = lo + (1.0 - lo) * (t + 1) as f64 / (DECAY_GRID + 1) as f64;
        let c = decay_constant(a, b, lambda);
        let score = c * lambda.powf(w);
        if best.map_or(true, |(s, _, _)| score < s) {
            best = Some((score, c, lambda));
        }
    }
    let (_, c, lambda) = best.expect("grid is nonempty");
    for (i, j, blk) in rep.blocks() {
        let norm = crate::linalg::spectral_norm(blk);
        let bound = c * lambda.powi((j - i).unsigned_abs() as i32) * ((i.abs() - j.abs()) as f64 * grade.inv()).exp();
        if norm > bound + 1e-9 {
            return Err(Error::CertificateViolation { i, j, norm, bound });
        }
    }
    Ok(DecayCertificate { c_decay: c, lambda_decay: lambda })
}

/// `2 c4 d√d / (1 − e^{−1/n})`.
pub fn graded_to_uniform_bound(c4: f64, n: u32, d: usize) -> f64 {
    let d = d as f64;
    2.0 * c4 * d * d.sqrt() / (1.0 - (-1.0 / n as f64).exp())
}

/// `4 m d³ / (1 − e^{−1/n})`.
pub fn pesin_uniform_bound(m: u32, n: u32, d: usize) -> f64 {
    4.0 * m as f64 * (d as f64).powi(3) / (1.0 - (-1.0 / n as f64).exp())
}

/// Least-squares slope of `log |B_{row, row+l}|` against `|l|` over `1 ≤ |l| ≤ max_offset`,
/// returned as a positive decay rate.
pub fn fit_decay_rate(rep: &MatrixRep, row: i64, max_offset: i64) -> f64 {
    let pts: Vec<(f64, f64)> = rep
        .row(row)
        .filter(|(j, _)| {
            let l = (j - row).abs();
            l >= 1 && l <= max_offset
        })
        .map(|(j, b)| ((j - row).abs() as f64, crate::linalg::spectral_norm(b)))
        .filter(|(_, n)| *n > 0.0)
        .map(|(l, n)| (l, n.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

/// Reference data at one pseudo-orbit site: the graded point `z_i` and rows 0 and 1 of the
/// inverse of Γ along its orbit.
#[derive(Debug, Clone)]
pub struct PesinSite {
    pub z: TorusPoint,
    pub inverse: InverseOperator,
}

/// Builds [`PesinSite`]s with `z_i = y_i` and windows of half-width `half` for every site.
pub fn central_inverses(
    model: &dyn MapModel,
    pseudo: &OrbitWindow,
    half: i64,
    iters: usize,
    grade: Grade,
) -> Result<BTreeMap<i64, PesinSite>> {
    let sites: Vec<i64> = pseudo.window().iter().collect();
    let built: Vec<Result<(i64, PesinSite)>> = sites
        .par_iter()
        .map(|&i| {
            let z = pseudo.point(i).clone();
            let pad = half + iters as i64;
            let orbit = evolve(model, &z, -pad, pad)?;
            let frames = compute_splitting(model, &orbit, iters)?;
            let gamma = assemble_gamma(model, &orbit.restrict(model, Window::centered(half))?)?;
            let inverse = splitting_inverse_rows(&gamma, &frames, &[0, 1], grade)?;
            Ok((i, PesinSite { z, inverse }))
        })
        .collect();
    built.into_iter().collect()
}

/// Damping and cutoffs of the approximate inverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproxInverseParams {
    pub damping: f64,
    pub p: usize,
    pub q: usize,
    /// Rows within this distance of the window edge are excluded from the left defect.
    pub guard: usize,
}

impl Default for ApproxInverseParams {
    fn default() -> Self {
        ApproxInverseParams { damping: 0.99, p: 32, q: 64, guard: 16 }
    }
}

/// Budget terms of one side, each to be compared with 1/8.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetReport {
    pub side: Side,
    pub terms: Vec<(BudgetTerm, f64)>,
    pub measured_defect: f64,
}

impl BudgetReport {
    /// Largest term.
    pub fn dominant(&self) -> (BudgetTerm, f64) {
        self.terms
            .iter()
            .copied()
            .fold((BudgetTerm::Tail, f64::NEG_INFINITY), |acc, t| if t.1 > acc.1 { t } else { acc })
    }

    pub fn total(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum()
    }
}

/// Result of [`approximate_inverse`].
#[derive(Debug, Clone)]
pub struct ApproxInverse {
    pub theta: MatrixRep,
    pub params: ApproxInverseParams,
    /// Measured `d(q)`.
    pub d_q: f64,
    /// Measured `e(p)`.
    pub e_p: f64,
    pub left: BudgetReport,
    pub right: BudgetReport,
    /// Pesin level `m` used in the budget.
    pub level: u32,
}

/// `Θ̃_{i,j} = λ^{|j−i|} Υ^{(i)}_{0,j−i}` over the pseudo-orbit window.
///
/// Errors with [`Error::PseudoOrbitTooFar`] when either measured defect exceeds 1/2; the
/// error names the largest budget term of the failing side.
pub fn approximate_inverse(
    model: &dyn MapModel,
    pesin: &BTreeMap<i64, PesinSite>,
    pseudo: &OrbitWindow,
    params: ApproxInverseParams,
    grade: Grade,
) -> Result<ApproxInverse> {
    let lambda = params.damping;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Precondition(format!("damping must lie in (0, 1), got {lambda}")));
    }
    let window = pseudo.window();
    if let Some(k) = window.iter().find(|k| !pesin.contains_key(k)) {
        return Err(Error::Precondition(format!("no graded reference data at site {k}")));
    }
    let gamma = assemble_gamma(model, pseudo)?;
    let rows = gamma.input_window();
    let cols = gamma.output_window();
    let d = gamma.dim();

    let mut theta = MatrixRep::new(rows, cols, d);
    for i in rows.iter() {
        let ups = &pesin[&i].inverse.rep;
        for (l, b) in ups.row(0) {
            let j = i + l;
            if cols.contains(j) {
                theta.insert(i, j, b * lambda.powi(l.unsigned_abs() as i32));
            }
        }
    }

    let right_defect = {
        let prod = gamma.to_rep().compose(&theta)?.minus_identity()?;
        norm_upper(&prod, grade, grade)
    };
    let left_defect = {
        let prod = theta.compose(&gamma.to_rep())?.minus_identity()?;
        let g = params.guard as i64;
        let interior = Window::new(rows.k_min + g, (rows.k_max - g).max(rows.k_min + g));
        norm_upper(&prod.restrict(interior, rows)?, grade, grade)
    };

    // budget constants
    let reg = model.regularity();
    let level = pesin.values().map(|s| s.inverse.bound.ceil() as u32).max().unwrap_or(1).max(1);
    let df = d as f64;
    let c1 = reg.c1;
    let c3 = grade.ratio_bound() * level as f64 * df * df.sqrt();
    let q = params.q as i64;
    let p = params.p as i64;
    let mut d_q = 0.0_f64;
    for i in rows.iter() {
        let z = &pesin[&i].z;
        let orbit = evolve(model, z, -(q - 1), q - 1)?;
        for l in -(q - 1)..=(q - 1) {
            if rows.contains(i + l) {
                d_q = d_q.max(torus_dist(orbit.point(l), pseudo.point(i + l)).powf(reg.alpha));
            }
        }
    }
    let mut e_p = 0.0_f64;
    for i in rows.iter().skip(1) {
        let cur = &pesin[&i].inverse.rep;
        let prev = &pesin[&(i - 1)].inverse.rep;
        for l in -p..=p {
            let a = if cur.cols().contains(l) { cur.block(0, l) } else { DMatrix::zeros(d, d) };
            let b = if prev.cols().contains(l + 1) { prev.block(1, l + 1) } else { DMatrix::zeros(d, d) };
            e_p = e_p.max(crate::linalg::spectral_norm(&(a - b)));
        }
    }
    let closeness_right = rows
        .iter()
        .map(|i| torus_dist(&pesin[&i].z, pseudo.point(i)).powf(reg.alpha))
        .fold(0.0, f64::max);
    let c4p: f64 = (-(p - 1)..=(p - 1)).map(|j| 1.0 / grade.weight(j)).sum();

    let left = BudgetReport {
        side: Side::Left,
        terms: vec![
            (BudgetTerm::Tail, lambda.powi(q as i32) * 2.0 * c1 * c3),
            (BudgetTerm::Damping, c1 * (1.0 - lambda) * c3),
            (BudgetTerm::Closeness, c3 * (2.0 * c1).min(reg.c2 * d_q)),
        ],
        measured_defect: left_defect,
    };
    let right = BudgetReport {
        side: Side::Right,
        terms: vec![
            (BudgetTerm::Tail, lambda.powi(p as i32) * (2.0 * c1 * c3 + 2.0 * level as f64)),
            (BudgetTerm::Damping, c1 * (1.0 - lambda) * c3),
            (BudgetTerm::Closeness, c3 * (2.0 * c1).min(reg.c2 * closeness_right)),
            (BudgetTerm::Continuity, c4p * e_p),
        ],
        measured_defect: right_defect,
    };
    for report in [&left, &right] {
        if report.measured_defect > 0.5 {
            let (term, value) = report.dominant();
            return Err(Error::PseudoOrbitTooFar { side: report.side, measured: report.measured_defect, term, value });
        }
    }
    Ok(ApproxInverse { theta, params, d_q, e_p, left, right, level })
}

/// Maximum number of Neumann terms.
pub const NEUMANN_MAX_TERMS: usize = 64;

/// `Θ = Θ̃ Σ_k (I − ΓΘ̃)^k`, an exact right inverse of Γ when `||I − ΓΘ̃||_n ≤ 1/2`.
///
/// The series stops once an increment has norm below 1e−14 or after 64 terms. When `level`
/// is given and the grade is finite, the uniform bound `4 m d³ / (1 − e^{−1/n})` is attached.
pub fn neumann_invert(theta_tilde: &MatrixRep, gamma: &TransferOperator, grade: Grade, level: Option<u32>) -> Result<(InverseOperator, usize)> {
    let gamma_rep = gamma.to_rep();
    let defect = gamma_rep.compose(theta_tilde)?.minus_identity()?;
    let q = norm_upper(&defect, grade, grade);
    if q > 0.5 {
        return Err(Error::Precondition(format!("Neumann series not contracting: ||I - Gamma Theta~|| = {q} > 1/2")));
    }
    let out = gamma.output_window();
    let d = gamma.dim();
    let r = -defect.to_dense();
    let n = r.nrows();
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut terms = 1;
    while terms < NEUMANN_MAX_TERMS {
        term = &term * &r;
        let inc = norm_upper(&MatrixRep::from_dense(out, out, d, &term), grade, grade);
        if inc == 0.0 {
            break;
        }
        sum += &term;
        terms += 1;
        if inc < 1e-14 {
            break;
        }
    }
    let dense = theta_tilde.to_dense() * sum;
    let rep = MatrixRep::from_dense(theta_tilde.rows(), theta_tilde.cols(), d, &dense);
    let tilde_norm = norm_upper(theta_tilde, grade, grade);
    let bound = tilde_norm / (1.0 - q);
    let measured = norm_upper(&rep, grade, grade);
    if measured > 2.0 * tilde_norm * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::Numeric(format!("Neumann inverse norm {measured} exceeds twice {tilde_norm}")));
    }
    let uniform_bound = match (level, grade) {
        (Some(m), Grade::Finite(nn)) => Some(pesin_uniform_bound(m, nn, d)),
        _ => None,
    };
    let certificate = decay_certificate(&rep, gamma.sup_subdiagonal().max(1.0), norm_upper(&rep, Grade::Infinity, Grade::Infinity)).ok();
    Ok((
        InverseOperator {
            rep,
            certificate,
            grade_in: grade,
            grade_out: grade,
            bound,
            bound_name: bound_names::NEUMANN.into(),
            level,
            uniform_bound,
        },
        terms,
    ))
}
