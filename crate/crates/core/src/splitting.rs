//! Stable/unstable splittings along orbit windows.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dynamics::{cocycle, MapModel, OrbitWindow};
use crate::error::{Error, Result};
use crate::inverse::InverseOperator;
use crate::linalg::{orthonormalize, qr_with_scales, spectral_norm, subspace_distance};
use crate::seqspace::{TangentSequence, Window};

/// Exponents inside `±GUARD_BAND` count as zero.
pub const GUARD_BAND: f64 = 1e-3;
/// Minimal singular value ratio accumulated across the sweep length.
pub const MIN_SEPARATION: f64 = 1.01;
/// Step count used for the contraction rate `λ`.
pub const RATE_STEPS: usize = 8;

/// Frame at one site.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingFrame {
    pub k: i64,
    /// Orthonormal basis of `E^s`, `d × d_s`.
    pub es: DMatrix<f64>,
    /// Orthonormal basis of `E^u`, `d × d_u`.
    pub eu: DMatrix<f64>,
    pub ps: DMatrix<f64>,
    pub pu: DMatrix<f64>,
}

/// Window-measured hyperbolicity constants `|Df^k|_{E^s}| ≤ c λ^k`, `|P^{s,u}| ≤ a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingConstants {
    pub c: f64,
    pub lambda: f64,
    pub a: f64,
}

/// Frames over a window together with the measured constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SplittingFrames {
    window: Window,
    frames: Vec<SplittingFrame>,
    /// Cocycle `Df(y_k)` over the frame window.
    dfs: Vec<DMatrix<f64>>,
    pub constants: SplittingConstants,
    pub d_s: usize,
    pub d_u: usize,
    /// Finite-time Lyapunov exponents of the full orbit window, descending.
    pub exponents: Vec<f64>,
    /// Largest subspace distance between two sweeps started from different subspaces.
    pub convergence: f64,
}

/// Deterministic generic starting subspace.
fn generic_start(d: usize, cols: usize, salt: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, cols, |i, j| (1.0 + salt + 1.7 * i as f64 + 2.9 * j as f64 + 0.3 * (i * j) as f64).sin());
    orthonormalize(&m)
}

/// Finite-time exponents from a QR sweep, descending.
pub fn finite_time_exponents(dfs: &[DMatrix<f64>]) -> Vec<f64> {
    let d = dfs[0].nrows();
    let mut q = DMatrix::identity(d, d);
    let mut sums = vec![0.0; d];
    for a in dfs {
        let (nq, scales) = qr_with_scales(&(a * &q));
        for (s, r) in sums.iter_mut().zip(scales) {
            *s += r.ln();
        }
        q = nq;
    }
    let mut ex: Vec<f64> = sums.into_iter().map(|s| s / dfs.len() as f64).collect();
    ex.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ex
}

fn sweep_forward(dfs: &[DMatrix<f64>], start: DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(dfs.len() + 1);
    let mut q = start;
    out.push(q.clone());
    for a in dfs {
        q = orthonormalize(&(a * &q));
        out.push(q.clone());
    }
    out
}

fn sweep_backward(inv: &[DMatrix<f64>], start: DMatrix<f64>) -> Vec<DMatrix<f64>> {
    let mut out = Vec::with_capacity(inv.len() + 1);
    let mut q = start;
    out.push(q.clone());
    for a in inv.iter().rev() {
        q = orthonormalize(&(a * &q));
        out.push(q.clone());
    }
    out.reverse();
    out
}

/// Projections `(P^s, P^u)` of the splitting `E^s ⊕ E^u`.
fn projections(es: &DMatrix<f64>, eu: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let d = es.nrows();
    let (ds, du) = (es.ncols(), eu.ncols());
    let mut b = DMatrix::zeros(d, d);
    b.columns_mut(0, ds).copy_from(es);
    b.columns_mut(ds, du).copy_from(eu);
    let binv = b
        .try_inverse()
        .ok_or_else(|| Error::DegenerateSplitting("stable and unstable spaces are not transverse".into()))?;
    let ps = es * binv.rows(0, ds);
    let pu = eu * binv.rows(ds, du);
    Ok((ps, pu))
}

/// Computes `E^u` by forward and `E^s` by backward re-orthonormalized sweeps along the orbit.
///
/// Frames are returned for the interior `[k_min + iters, k_max − iters]`, where both sweeps
/// have run for at least `iters` steps.
pub fn compute_splitting(model: &dyn MapModel, orbit: &OrbitWindow, iters: usize) -> Result<SplittingFrames> {
    let dfs = cocycle(model, orbit);
    splitting_from_cocycle(orbit.k_min(), &dfs, iters)
}

/// As [`compute_splitting`], from `Df(y_k)` for every site of the window starting at `k_min`.
pub fn splitting_from_cocycle(k_min: i64, dfs: &[DMatrix<f64>], iters: usize) -> Result<SplittingFrames> {
    let l = dfs.len();
    if l < 2 * iters + 2 {
        return Err(Error::Precondition(format!(
            "orbit of length {l} too short for {iters} sweep iterations on each side"
        )));
    }
    let d = dfs[0].nrows();
    let steps = &dfs[..l - 1];
    let exponents = finite_time_exponents(steps);
    let d_u = exponents.iter().filter(|e| **e > GUARD_BAND).count();
    let d_s = exponents.iter().filter(|e| **e < -GUARD_BAND).count();
    if d_u + d_s != d {
        return Err(Error::DegenerateSplitting(format!(
            "finite-time exponents {exponents:?} fall inside the guard band ±{GUARD_BAND}"
        )));
    }
    if d_u > 0 && d_s > 0 {
        let gap = exponents[d_u - 1] - exponents[d_u];
        let ratio = (gap * iters as f64).exp();
        if ratio < MIN_SEPARATION {
            return Err(Error::DegenerateSplitting(format!(
                "singular value separation {ratio:.6} < {MIN_SEPARATION} over {iters} steps"
            )));
        }
    }
    let inv: Vec<DMatrix<f64>> = steps
        .iter()
        .map(|a| a.clone().try_inverse().ok_or_else(|| Error::Numeric("singular derivative".into())))
        .collect::<Result<_>>()?;

    let eu = sweep_forward(steps, generic_start(d, d_u, 0.0));
    let eu2 = sweep_forward(steps, generic_start(d, d_u, 0.61));
    let es = sweep_backward(&inv, generic_start(d, d_s, 0.37));
    let es2 = sweep_backward(&inv, generic_start(d, d_s, 1.13));

    let lo = iters;
    let hi = l - 1 - iters;
    let window = Window::new(k_min + lo as i64, k_min + hi as i64);
    let mut frames = Vec::with_capacity(hi - lo + 1);
    let mut convergence = 0.0_f64;
    let mut a = 1.0_f64;
    for t in lo..=hi {
        let (ps, pu) = projections(&es[t], &eu[t])?;
        a = a.max(spectral_norm(&ps)).max(spectral_norm(&pu));
        if d_u > 0 {
            convergence = convergence.max(subspace_distance(&eu[t], &eu2[t]));
        }
        if d_s > 0 {
            convergence = convergence.max(subspace_distance(&es[t], &es2[t]));
        }
        frames.push(SplittingFrame { k: k_min + t as i64, es: es[t].clone(), eu: eu[t].clone(), ps, pu });
    }
    let local = dfs[lo..=hi].to_vec();
    let (c, lambda) = measure_rates(&frames, &local)?;
    Ok(SplittingFrames {
        window,
        frames,
        dfs: local,
        constants: SplittingConstants { c, lambda, a },
        d_s,
        d_u,
        exponents,
        convergence,
    })
}

/// `λ` from `RATE_STEPS`-step growth and the smallest `c ≥ 1` with
/// `|Df^j|_{E^s}| ≤ c λ^j`, `|Df^{−j}|_{E^u}| ≤ c λ^j` for all pairs inside the window.
fn measure_rates(frames: &[SplittingFrame], dfs: &[DMatrix<f64>]) -> Result<(f64, f64)> {
    let n = frames.len();
    let inv: Vec<DMatrix<f64>> =
        dfs.iter().map(|a| a.clone().try_inverse().expect("derivative invertible")).collect();
    // growth[s][k][j-1] = |Df^j|_{E^s(k)}|, growth[u] similarly backwards
    let mut stable: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut unstable: Vec<Vec<f64>> = vec![Vec::new(); n];
    for k in 0..n {
        // re-projecting each step keeps rounding out of the opposite bundle
        let mut v = frames[k].es.clone();
        for t in k..n - 1 {
            let q = &frames[t + 1].es;
            v = q * (q.transpose() * (&dfs[t] * v));
            stable[k].push(spectral_norm_cols(&v));
        }
        let mut w = frames[k].eu.clone();
        for t in (0..k).rev() {
            let q = &frames[t].eu;
            w = q * (q.transpose() * (&inv[t] * w));
            unstable[k].push(spectral_norm_cols(&w));
        }
    }
    let j = RATE_STEPS.min(n.saturating_sub(1)).max(1);
    let mut lambda = 0.0_f64;
    for k in 0..n {
        if let Some(g) = stable[k].get(j - 1) {
            lambda = lambda.max(g.powf(1.0 / j as f64));
        }
        if let Some(g) = unstable[k].get(j - 1) {
            lambda = lambda.max(g.powf(1.0 / j as f64));
        }
    }
    if lambda == 0.0 {
        return Err(Error::Precondition("window too short to measure contraction rate".into()));
    }
    let mut c = 1.0_f64;
    for k in 0..n {
        for (idx, g) in stable[k].iter().enumerate() {
            c = c.max(g / lambda.powi(idx as i32 + 1));
        }
        for (idx, g) in unstable[k].iter().enumerate() {
            c = c.max(g / lambda.powi(idx as i32 + 1));
        }
    }
    Ok((c, lambda))
}

fn spectral_norm_cols(v: &DMatrix<f64>) -> f64 {
    if v.ncols() == 0 {
        0.0
    } else {
        spectral_norm(v)
    }
}

impl SplittingFrames {
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn frames(&self) -> &[SplittingFrame] {
        &self.frames
    }

    pub fn frame(&self, k: i64) -> &SplittingFrame {
        &self.frames[self.window.offset(k)]
    }

    pub fn dim(&self) -> usize {
        self.d_s + self.d_u
    }

    /// `Df(y_k)` for `k` in the frame window.
    pub fn df(&self, k: i64) -> &DMatrix<f64> {
        &self.dfs[self.window.offset(k)]
    }

    /// Frames on a sub-window; constants are kept.
    pub fn restrict(&self, window: Window) -> Result<Self> {
        if !self.window.covers(&window) {
            return Err(Error::Dimension(format!("frames on {} do not cover {}", self.window, window)));
        }
        let o = self.window.offset(window.k_min);
        Ok(SplittingFrames {
            window,
            frames: self.frames[o..o + window.len()].to_vec(),
            dfs: self.dfs[o..o + window.len()].to_vec(),
            ..self.clone()
        })
    }

    /// Same frames re-indexed so the window moves by `j`.
    pub fn reindexed(&self, j: i64) -> Self {
        let mut out = self.clone();
        out.window = self.window.shifted(j);
        for f in &mut out.frames {
            f.k += j;
        }
        out
    }

    /// Largest subspace distance between `Df(y_k) E(y_k)` and `E(y_{k+1})` over the window.
    pub fn invariance_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for t in 0..self.frames.len() - 1 {
            let a = &self.dfs[t];
            for (cur, next) in [(&self.frames[t].es, &self.frames[t + 1].es), (&self.frames[t].eu, &self.frames[t + 1].eu)] {
                if cur.ncols() > 0 {
                    worst = worst.max(subspace_distance(&orthonormalize(&(a * cur)), next));
                }
            }
        }
        worst
    }

    /// JSON list of `{k, Es, Eu, Ps, Pu}` with matrices as lists of rows.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
        };
        serde_json::Value::Array(
            self.frames
                .iter()
                .map(|f| {
                    serde_json::json!({
                        "k": f.k, "Es": rows(&f.es), "Eu": rows(&f.eu), "Ps": rows(&f.ps), "Pu": rows(&f.pu)
                    })
                })
                .collect(),
        )
    }
}

/// `θ^s = (Υ Jθ)_0` and `θ^u = −Df(x_{−1}) (Υ Jθ)_{−1}`, where `J` places `θ` at index 0.
pub fn extract_splitting_via_inverse(
    inverse: &InverseOperator,
    df_at_minus1: &DMatrix<f64>,
    theta: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rep = &inverse.rep;
    if !rep.cols().contains(0) || !rep.rows().contains(0) || !rep.rows().contains(-1) {
        return Err(Error::Precondition("inverse must cover indices 0 and -1".into()));
    }
    let t = DVector::from_column_slice(theta);
    let s = rep.block(0, 0) * &t;
    let u = -(df_at_minus1 * (rep.block(-1, 0) * &t));
    Ok((s.as_slice().to_vec(), u.as_slice().to_vec()))
}

/// Componentwise `η^s_k = P^s(x_k) η_k`, `η^u_k = P^u(x_k) η_k`.
pub fn split_sequence(seq: &TangentSequence, frames: &SplittingFrames) -> Result<(TangentSequence, TangentSequence)> {
    if !frames.window().covers(&seq.window()) || seq.dim() != frames.dim() {
        return Err(Error::Dimension(format!(
            "frames on {} do not cover sequence on {}",
            frames.window(),
            seq.window()
        )));
    }
    let d = seq.dim();
    let mut s = Vec::with_capacity(seq.len() * d);
    let mut u = Vec::with_capacity(seq.len() * d);
    for (k, v) in seq.iter() {
        let f = frames.frame(k);
        let v = DVector::from_column_slice(v);
        s.extend((&f.ps * &v).iter());
        u.extend((&f.pu * &v).iter());
    }
    Ok((
        TangentSequence::from_flat(seq.k_min(), d, s)?,
        TangentSequence::from_flat(seq.k_min(), d, u)?,
    ))
}

/// `|Df^j(x_k)|_{E^s(x_k)}|` for the frame at `k`, used by property checks.
pub fn stable_growth(frames: &SplittingFrames, k: i64, j: usize) -> f64 {
    let mut v = frames.frame(k).es.clone();
    for t in 0..j as i64 {
        let q = &frames.frame(k + t + 1).es;
        v = q * (q.transpose() * (frames.df(k + t) * v));
    }
    spectral_norm_cols(&v)
}
