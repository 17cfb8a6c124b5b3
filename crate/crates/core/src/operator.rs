//! The transfer operator Γ on finite windows and block matrix representations.
//!
//! On a window `[k_min, k_max]` Γ is rectangular: it maps sequences on the whole window to
//! sequences on `[k_min + 1, k_max]`, one output row for every site with a predecessor.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{cocycle, MapModel, OrbitWindow};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::rng;
use crate::seqspace::{Grade, TangentSequence, Window};

/// Blocks whose spectral norm falls below this are dropped when converting from dense form.
pub const DROP_TOL: f64 = 1e-15;

/// `(Γη)_k = η_k − Df(y_{k−1}) η_{k−1}` for `k ∈ [k_min + 1, k_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperator {
    k_min: i64,
    d: usize,
    /// `Df(y_k)` for `k ∈ [k_min, k_max − 1]`.
    dfs: Vec<DMatrix<f64>>,
}

impl TransferOperator {
    /// Builds Γ from the derivatives `Df(y_k)`, `k = k_min, …, k_max − 1`.
    pub fn from_cocycle(k_min: i64, dfs: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = dfs.first() else {
            return Err(Error::Dimension("transfer operator needs at least two sites".into()));
        };
        let d = first.nrows();
        if dfs.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::Dimension("cocycle blocks must all be d×d".into()));
        }
        Ok(TransferOperator { k_min, d, dfs })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Domain window `[k_min, k_max]`.
    pub fn input_window(&self) -> Window {
        Window::new(self.k_min, self.k_min + self.dfs.len() as i64)
    }

    /// Range window `[k_min + 1, k_max]`.
    pub fn output_window(&self) -> Window {
        Window::new(self.k_min + 1, self.k_min + self.dfs.len() as i64)
    }

    /// `Df(y_k)`.
    pub fn df(&self, k: i64) -> &DMatrix<f64> {
        &self.dfs[(k - self.k_min) as usize]
    }

    pub fn cocycle(&self) -> &[DMatrix<f64>] {
        &self.dfs
    }

    /// `sup_k |Df(y_k)|` over the subdiagonal.
    pub fn sup_subdiagonal(&self) -> f64 {
        self.dfs.iter().map(spectral_norm).fold(0.0, f64::max)
    }

    pub fn apply(&self, seq: &TangentSequence) -> Result<TangentSequence> {
        if seq.window() != self.input_window() || seq.dim() != self.d {
            return Err(Error::Dimension(format!(
                "sequence on {} (d = {}) for operator on {} (d = {})",
                seq.window(),
                seq.dim(),
                self.input_window(),
                self.d
            )));
        }
        let out = self.output_window();
        let mut data = Vec::with_capacity(out.len() * self.d);
        for k in out.iter() {
            let prev = seq.get(k - 1);
            let cur = seq.get(k);
            let a = self.df(k - 1);
            for r in 0..self.d {
                let mut acc = cur[r];
                for c in 0..self.d {
                    acc -= a[(r, c)] * prev[c];
                }
                data.push(acc);
            }
        }
        TangentSequence::from_flat(out.k_min, self.d, data)
    }

    pub fn to_rep(&self) -> MatrixRep {
        let mut rep = MatrixRep::new(self.output_window(), self.input_window(), self.d);
        for k in self.output_window().iter() {
            rep.insert(k, k, DMatrix::identity(self.d, self.d));
            rep.insert(k, k - 1, -self.df(k - 1));
        }
        rep
    }

    /// Dense `(L−1)d × Ld` matrix.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let (l, d) = (self.dfs.len() + 1, self.d);
        let mut m = DMatrix::zeros((l - 1) * d, l * d);
        for (t, a) in self.dfs.iter().enumerate() {
            let r0 = t * d;
            for r in 0..d {
                m[(r0 + r, (t + 1) * d + r)] = 1.0;
                for c in 0..d {
                    m[(r0 + r, t * d + c)] = -a[(r, c)];
                }
            }
        }
        m
    }

    /// Γ on a sub-window of the domain.
    pub fn restrict(&self, window: Window) -> Result<Self> {
        if !self.input_window().covers(&window) || window.len() < 2 {
            return Err(Error::Dimension(format!(
                "cannot restrict operator on {} to {}",
                self.input_window(),
                window
            )));
        }
        let o = (window.k_min - self.k_min) as usize;
        Self::from_cocycle(window.k_min, self.dfs[o..o + window.len() - 1].to_vec())
    }

    /// Operator of the shifted point sequence: `(conj)_{i,k} = Γ_{i+j,k+j}`.
    pub fn shift_conjugate(&self, j: i64) -> Self {
        TransferOperator { k_min: self.k_min - j, d: self.d, dfs: self.dfs.clone() }
    }
}

/// Γ along the points of `orbit`.
pub fn assemble_gamma(model: &dyn MapModel, orbit: &OrbitWindow) -> Result<TransferOperator> {
    if orbit.len() < 2 {
        return Err(Error::Dimension("assemble_gamma needs at least two points".into()));
    }
    let mut dfs = cocycle(model, orbit);
    dfs.pop();
    TransferOperator::from_cocycle(orbit.k_min(), dfs)
}

/// Sparse block matrix `A_{i,j}` with row indices in `rows` and column indices in `cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRep {
    rows: Window,
    cols: Window,
    d: usize,
    blocks: BTreeMap<(i64, i64), DMatrix<f64>>,
}

#[derive(Serialize, Deserialize)]
struct BlockRecord {
    i: i64,
    j: i64,
    block: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RepRecord {
    rows: Window,
    cols: Window,
    d: usize,
    blocks: Vec<BlockRecord>,
}

impl MatrixRep {
    pub fn new(rows: Window, cols: Window, d: usize) -> Self {
        MatrixRep { rows, cols, d, blocks: BTreeMap::new() }
    }

    pub fn identity(window: Window, d: usize) -> Self {
        let mut rep = Self::new(window, window, d);
        for k in window.iter() {
            rep.insert(k, k, DMatrix::identity(d, d));
        }
        rep
    }

    pub fn rows(&self) -> Window {
        self.rows
    }

    pub fn cols(&self) -> Window {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn nnz(&self) -> usize {
        self.blocks.len()
    }

    /// Stores a block (replacing any previous one).
    pub fn insert(&mut self, i: i64, j: i64, block: DMatrix<f64>) {
        assert!(self.rows.contains(i) && self.cols.contains(j), "block ({i}, {j}) outside rep");
        assert!(block.nrows() == self.d && block.ncols() == self.d);
        self.blocks.insert((i, j), block);
    }

    pub fn get(&self, i: i64, j: i64) -> Option<&DMatrix<f64>> {
        self.blocks.get(&(i, j))
    }

    /// Block or zero.
    pub fn block(&self, i: i64, j: i64) -> DMatrix<f64> {
        self.get(i, j).cloned().unwrap_or_else(|| DMatrix::zeros(self.d, self.d))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i64, i64, &DMatrix<f64>)> {
        self.blocks.iter().map(|(&(i, j), b)| (i, j, b))
    }

    /// Nonzero blocks of row `i`.
    pub fn row(&self, i: i64) -> impl Iterator<Item = (i64, &DMatrix<f64>)> {
        self.blocks.range((i, i64::MIN)..=(i, i64::MAX)).map(|(&(_, j), b)| (j, b))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.d;
        let mut m = DMatrix::zeros(self.rows.len() * d, self.cols.len() * d);
        for (i, j, b) in self.blocks() {
            let (r0, c0) = (self.rows.offset(i) * d, self.cols.offset(j) * d);
            m.view_mut((r0, c0), (d, d)).copy_from(b);
        }
        m
    }

    /// Blocks with spectral norm below `DROP_TOL` are dropped.
    pub fn from_dense(rows: Window, cols: Window, d: usize, m: &DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), rows.len() * d);
        assert_eq!(m.ncols(), cols.len() * d);
        let mut rep = Self::new(rows, cols, d);
        for i in rows.iter() {
            for j in cols.iter() {
                let b = m.view((rows.offset(i) * d, cols.offset(j) * d), (d, d)).into_owned();
                if spectral_norm(&b) >= DROP_TOL {
                    rep.blocks.insert((i, j), b);
                }
            }
        }
        rep
    }

    pub fn apply(&self, seq: &TangentSequence) -> Result<TangentSequence> {
        if seq.window() != self.cols || seq.dim() != self.d {
            return Err(Error::Dimension(format!(
                "sequence on {} for rep with columns {}",
                seq.window(),
                self.cols
            )));
        }
        let d = self.d;
        let mut data = vec![0.0; self.rows.len() * d];
        for (i, j, b) in self.blocks() {
            let x = seq.get(j);
            let o = self.rows.offset(i) * d;
            for r in 0..d {
                let mut acc = 0.0;
                for c in 0..d {
                    acc += b[(r, c)] * x[c];
                }
                data[o + r] += acc;
            }
        }
        TangentSequence::from_flat(self.rows.k_min, d, data)
    }

    /// `self · other`.
    pub fn compose(&self, other: &MatrixRep) -> Result<MatrixRep> {
        if self.cols != other.rows || self.d != other.d {
            return Err(Error::Dimension(format!(
                "cannot compose rep with columns {} and rep with rows {}",
                self.cols, other.rows
            )));
        }
        let m = self.to_dense() * other.to_dense();
        Ok(Self::from_dense(self.rows, other.cols, self.d, &m))
    }

    /// `self − I` for a square rep.
    pub fn minus_identity(&self) -> Result<MatrixRep> {
        if self.rows != self.cols {
            return Err(Error::Dimension("minus_identity needs equal row and column windows".into()));
        }
        let mut out = self.clone();
        for k in self.rows.iter() {
            let b = out.block(k, k) - DMatrix::<f64>::identity(self.d, self.d);
            out.blocks.insert((k, k), b);
        }
        Ok(out)
    }

    /// `(conj)_{i,k} = A_{i+j,k+j}`.
    pub fn shift_conjugate(&self, j: i64) -> MatrixRep {
        MatrixRep {
            rows: self.rows.shifted(-j),
            cols: self.cols.shifted(-j),
            d: self.d,
            blocks: self.blocks.iter().map(|(&(i, k), b)| ((i - j, k - j), b.clone())).collect(),
        }
    }

    /// Sub-block matrix on the given windows.
    pub fn restrict(&self, rows: Window, cols: Window) -> Result<MatrixRep> {
        if !self.rows.covers(&rows) || !self.cols.covers(&cols) {
            return Err(Error::Dimension(format!(
                "rep on {}×{} does not cover {}×{}",
                self.rows, self.cols, rows, cols
            )));
        }
        let mut out = MatrixRep::new(rows, cols, self.d);
        for (i, j, b) in self.blocks() {
            if rows.contains(i) && cols.contains(j) {
                out.blocks.insert((i, j), b.clone());
            }
        }
        Ok(out)
    }

    /// Largest block spectral norm over blocks satisfying `pred`.
    pub fn max_block_norm(&self, pred: impl Fn(i64, i64) -> bool) -> f64 {
        self.blocks()
            .filter(|(i, j, _)| pred(*i, *j))
            .map(|(_, _, b)| spectral_norm(b))
            .fold(0.0, f64::max)
    }

    /// `{rows, cols, d, blocks: [{i, j, block}]}` with blocks row-major.
    pub fn to_json(&self) -> serde_json::Value {
        let rec = RepRecord {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            blocks: self.blocks_records(),
        };
        serde_json::to_value(rec).expect("rep serializes")
    }

    /// The bare list `[{i, j, block}]`.
    pub fn blocks_json(&self) -> serde_json::Value {
        serde_json::to_value(self.blocks_records()).expect("blocks serialize")
    }

    fn blocks_records(&self) -> Vec<BlockRecord> {
        self.blocks()
            .map(|(i, j, b)| BlockRecord { i, j, block: b.transpose().as_slice().to_vec() })
            .collect()
    }

    pub fn from_json(value: &serde_json::Value) -> Result<MatrixRep> {
        let rec: RepRecord = serde_json::from_value(value.clone())?;
        let mut rep = MatrixRep::new(rec.rows, rec.cols, rec.d);
        for b in rec.blocks {
            if b.block.len() != rec.d * rec.d || !rec.rows.contains(b.i) || !rec.cols.contains(b.j) {
                return Err(Error::Parse(format!("bad block ({}, {})", b.i, b.j)));
            }
            rep.blocks.insert((b.i, b.j), DMatrix::from_row_slice(rec.d, rec.d, &b.block));
        }
        Ok(rep)
    }
}

/// `sup_i exp(−|i|/n_out) Σ_j exp(|j|/n_in) |A_{i,j}|`, an upper bound for the induced
/// weighted sup-norm `X_{n_in} → X_{n_out}`.
pub fn norm_upper(rep: &MatrixRep, grade_in: Grade, grade_out: Grade) -> f64 {
    let mut best = 0.0_f64;
    let mut current: Option<i64> = None;
    let mut acc = 0.0;
    for (i, j, b) in rep.blocks() {
        if current != Some(i) {
            if let Some(r) = current {
                best = best.max(acc * grade_out.weight(r));
            }
            current = Some(i);
            acc = 0.0;
        }
        acc += spectral_norm(b) / grade_in.weight(j);
    }
    if let Some(r) = current {
        best = best.max(acc * grade_out.weight(r));
    }
    best
}

/// `norm_upper / (d√d)`, a lower bound for the induced norm.
pub fn norm_lower(rep: &MatrixRep, grade: Grade) -> f64 {
    let d = rep.dim() as f64;
    norm_upper(rep, grade, grade) / (d * d.sqrt())
}

/// Weighted row blocks `exp(−|i|/n) exp(|j|/n) A_{i,j}` of row `i`.
fn weighted_row(rep: &MatrixRep, i: i64, grade: Grade) -> Vec<DMatrix<f64>> {
    let wi = grade.weight(i);
    rep.row(i).map(|(j, b)| b * (wi / grade.weight(j))).collect()
}

/// `Σ_j |B_jᵀ u|`.
fn row_objective(blocks: &[DMatrix<f64>], u: &DVector<f64>) -> f64 {
    blocks.iter().map(|b| (b.transpose() * u).norm()).sum()
}

/// Fixed-point ascent `u ← normalize(Σ_j B_j v_j)`, `v_j = B_jᵀu / |B_jᵀu|`. The objective is
/// convex and 1-homogeneous, so each step does not decrease it.
fn ascend(blocks: &[DMatrix<f64>], mut u: DVector<f64>) -> f64 {
    let mut val = row_objective(blocks, &u);
    for _ in 0..200 {
        let mut g = DVector::zeros(u.len());
        for b in blocks {
            let v = b.transpose() * &u;
            let n = v.norm();
            if n > 0.0 {
                g += b * (v / n);
            }
        }
        let gn = g.norm();
        if gn == 0.0 {
            break;
        }
        let next = g / gn;
        let nv = row_objective(blocks, &next);
        if nv <= val * (1.0 + 1e-15) {
            val = val.max(nv);
            break;
        }
        u = next;
        val = nv;
    }
    val
}

/// Estimate of the induced `X_n → X_n` sup-norm.
///
/// Row `i` of the norm is `max_{|u|=1} Σ_j w_{ij} |A_{i,j}ᵀ u|`. This is exact for `d = 1`;
/// for `d = 2` the circle is scanned at 256 angles and refined by ascent, for `d ≥ 3` axis,
/// random and block singular directions seed the ascent. The result never exceeds the row
/// maximum, so it is a lower-biased estimate.
pub fn induced_norm_estimate(rep: &MatrixRep, grade: Grade) -> f64 {
    let d = rep.dim();
    let mut best = 0.0_f64;
    let mut rows: Vec<i64> = rep.blocks().map(|(i, _, _)| i).collect();
    rows.dedup();
    for i in rows {
        let blocks = weighted_row(rep, i, grade);
        let val = if d == 1 {
            blocks.iter().map(|b| b[(0, 0)].abs()).sum()
        } else {
            let mut cands: Vec<DVector<f64>> = Vec::new();
            if d == 2 {
                for t in 0..256 {
                    let a = std::f64::consts::PI * t as f64 / 256.0;
                    cands.push(DVector::from_vec(vec![a.cos(), a.sin()]));
                }
            } else {
                for c in 0..d {
                    let mut e = DVector::zeros(d);
                    e[c] = 1.0;
                    cands.push(e);
                }
                let mut g = rng::stream(0x1d_u64, i as u64);
                for _ in 0..64 {
                    let v = DVector::from_fn(d, |_, _| rand::Rng::gen_range(&mut g, -1.0..1.0));
                    cands.push(crate::linalg::unit(v));
                }
                let mut by_norm: Vec<&DMatrix<f64>> = blocks.iter().collect();
                by_norm.sort_by(|a, b| spectral_norm(b).partial_cmp(&spectral_norm(a)).unwrap());
                for b in by_norm.into_iter().take(8) {
                    let svd = b.clone().svd(true, false);
                    if let Some(u) = svd.u {
                        cands.push(u.column(0).into_owned());
                    }
                }
            }
            let mut scored: Vec<(f64, DVector<f64>)> =
                cands.into_iter().map(|u| (row_objective(&blocks, &u), u)).collect();
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            scored.into_iter().take(4).map(|(_, u)| ascend(&blocks, u)).fold(0.0, f64::max)
        };
        best = best.max(val);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{cat_eigenvalues, evolve, LinearToral, StandardMap, TorusPoint};
    use crate::seqspace::shift;
    use approx::assert_relative_eq;

    fn cat_gamma(half: i64) -> TransferOperator {
        let cat = LinearToral::cat();
        let o = evolve(&cat, &TorusPoint::new(vec![0.3, 0.2]), -half, half).unwrap();
        assemble_gamma(&cat, &o).unwrap()
    }

    #[test]
    fn three_site_cat_gamma() {
        let g = cat_gamma(1);
        let m = g.to_dense();
        #[rustfmt::skip]
        let expect = DMatrix::from_row_slice(4, 6, &[
            -2.0, -1.0, 1.0, 0.0, 0.0, 0.0,
            -1.0, -1.0, 0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, -2.0, -1.0, 1.0, 0.0,
            0.0, 0.0, -1.0, -1.0, 0.0, 1.0,
        ]);
        assert_eq!(m, expect);
        assert_eq!(g.to_rep().to_dense(), expect);
    }

    #[test]
    fn apply_examples() {
        let g = cat_gamma(3);
        let w = g.input_window();
        let theta = [0.3, -0.7];
        let c = TangentSequence::new(w.k_min, vec![theta.to_vec(); w.len()]).unwrap();
        let out = g.apply(&c).unwrap();
        for (_, v) in out.iter() {
            assert_relative_eq!(v[0], theta[0] - (2.0 * theta[0] + theta[1]), epsilon = 1e-15);
            assert_relative_eq!(v[1], theta[1] - (theta[0] + theta[1]), epsilon = 1e-15);
        }
        let delta = TangentSequence::delta(w, 0, &[1.0, 0.0]);
        let out = g.apply(&delta).unwrap();
        assert_eq!(out.get(0), &[1.0, 0.0]);
        assert_eq!(out.get(1), &[-2.0, -1.0]);
        assert!(out.iter().filter(|(_, v)| v.iter().any(|x| *x != 0.0)).count() <= 2);
    }

    #[test]
    fn tangent_orbit_is_in_kernel() {
        let m = StandardMap::new(0.9).unwrap();
        let o = evolve(&m, &TorusPoint::new(vec![0.11, 0.52]), -6, 6).unwrap();
        let g = assemble_gamma(&m, &o).unwrap();
        let mut v = vec![vec![0.4, -0.2]];
        for k in -5..=6 {
            let a = g.df(k - 1);
            let p = &v[v.len() - 1];
            v.push(vec![a[(0, 0)] * p[0] + a[(0, 1)] * p[1], a[(1, 0)] * p[0] + a[(1, 1)] * p[1]]);
        }
        let eta = TangentSequence::new(-6, v).unwrap();
        assert!(g.apply(&eta).unwrap().sup_norm() < 1e-9);
    }

    #[test]
    fn norm_upper_examples() {
        let id = MatrixRep::identity(Window::centered(4), 2);
        for n in [Grade::Finite(1), Grade::Finite(5), Grade::Infinity] {
            assert_relative_eq!(norm_upper(&id, n, n), 1.0, epsilon = 1e-15);
        }
        assert_relative_eq!(norm_lower(&id, Grade::Infinity), 1.0 / (2.0 * 2f64.sqrt()), epsilon = 1e-15);
        let (lu, _) = cat_eigenvalues();
        let g = cat_gamma(5).to_rep();
        assert_relative_eq!(norm_upper(&g, Grade::Infinity, Grade::Infinity), 1.0 + lu, epsilon = 1e-13);
    }

    #[test]
    fn two_grade_norm_of_vanishing_band() {
        // subdiagonal blocks vanish for |k| <= j, elsewhere they have norm c1
        let (j, n, c1) = (5_i64, 3_u32, 2.5);
        let dfs: Vec<DMatrix<f64>> = (-20..20)
            .map(|k: i64| if k.abs() <= j { DMatrix::zeros(2, 2) } else { DMatrix::identity(2, 2) * c1 })
            .collect();
        let mut rep = TransferOperator::from_cocycle(-20, dfs).unwrap().to_rep();
        for k in rep.rows().iter() {
            rep.blocks.remove(&(k, k));
        }
        let bound = norm_upper(&rep, Grade::Finite(2 * n), Grade::Finite(n));
        assert!(bound <= 2.0 * c1 * (-((j - 1) as f64) / (2.0 * n as f64)).exp() + 1e-12);
    }

    #[test]
    fn sandwich_and_scalar_equality() {
        let mut g = rng::stream(11, 0);
        for d in [1usize, 2, 3] {
            let mut rep = MatrixRep::new(Window::new(-3, 3), Window::new(-4, 4), d);
            for i in -3..=3 {
                for j in -4..=4 {
                    if rand::Rng::gen_bool(&mut g, 0.5) {
                        rep.insert(i, j, DMatrix::from_fn(d, d, |_, _| rand::Rng::gen_range(&mut g, -1.0..1.0)));
                    }
                }
            }
            for n in [Grade::Finite(2), Grade::Infinity] {
                let lo = norm_lower(&rep, n);
                let est = induced_norm_estimate(&rep, n);
                let hi = norm_upper(&rep, n, n);
                assert!(lo <= est + 1e-12 && est <= hi + 1e-12, "d={d}: {lo} {est} {hi}");
                if d == 1 {
                    assert_relative_eq!(lo, hi, epsilon = 1e-14);
                    assert_relative_eq!(est, hi, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn diagonal_rep_estimate() {
        let mut rep = MatrixRep::new(Window::centered(3), Window::centered(3), 2);
        for k in -3..=3 {
            rep.insert(k, k, DMatrix::identity(2, 2) * (k as f64 + 0.5));
        }
        assert_relative_eq!(induced_norm_estimate(&rep, Grade::Infinity), 3.5, epsilon = 1e-12);
    }

    #[test]
    fn shift_conjugate_examples() {
        let m = StandardMap::new(1.1).unwrap();
        let o = evolve(&m, &TorusPoint::new(vec![0.7, 0.1]), -5, 5).unwrap();
        let g = assemble_gamma(&m, &o).unwrap();
        assert_eq!(g.shift_conjugate(0), g);
        let c = g.shift_conjugate(1);
        for k in c.output_window().iter() {
            let orig = g.to_rep();
            assert_eq!(c.to_rep().block(k, k - 1), orig.block(k + 1, k));
        }
        let s = TangentSequence::new(-6, (0..11).map(|i| vec![i as f64, 1.0 - i as f64]).collect()).unwrap();
        let lhs = c.apply(&s).unwrap();
        let rhs = shift(&g.apply(&shift(&s, 1)).unwrap(), -1);
        assert_eq!(lhs, rhs);
        assert_eq!(g.to_rep().shift_conjugate(1), c.to_rep());
    }

    #[test]
    fn rep_json_round_trip() {
        let rep = cat_gamma(2).to_rep();
        let v = rep.to_json();
        assert_eq!(MatrixRep::from_json(&v).unwrap(), rep);
        let first = &rep.blocks_json()[0];
        assert_eq!(first["block"].as_array().unwrap().len(), 4);
    }
}
