//! Torus diffeomorphisms, orbits, pseudo-orbits and derivative cocycles.

use std::fmt;
use std::io::{Read, Write};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::rng;
use crate::seqspace::{check_contiguous, euclid, read_indexed_csv, Window};

/// Point of `R^d / Z^d` with coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint(Vec<f64>);

fn reduce(x: f64) -> f64 {
    let r = x - x.floor();
    // x slightly below an integer can round up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `t` in `(−1/2, 1/2]`.
fn centered_coord(t: f64) -> f64 {
    let mut c = t - t.round();
    if c <= -0.5 {
        c += 1.0;
    }
    if c > 0.5 {
        c -= 1.0;
    }
    c
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        TorusPoint(coords.into_iter().map(reduce).collect())
    }

    pub fn origin(d: usize) -> Self {
        TorusPoint(vec![0.0; d])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Lift in `(−1/2, 1/2]^d`.
    pub fn centered(&self) -> Vec<f64> {
        self.0.iter().map(|&t| centered_coord(t)).collect()
    }

    /// `self + v` reduced to the torus.
    pub fn translate(&self, v: &[f64]) -> TorusPoint {
        TorusPoint(self.0.iter().zip(v).map(|(x, y)| reduce(x + y)).collect())
    }

    /// Euclidean norm of the centered lift, i.e. the distance to the origin.
    pub fn norm(&self) -> f64 {
        euclid(&self.centered())
    }
}

/// Wrap-around representative of `a − b` in `(−1/2, 1/2]^d`.
pub fn torus_diff(a: &TorusPoint, b: &TorusPoint) -> Vec<f64> {
    a.0.iter().zip(&b.0).map(|(x, y)| centered_coord(x - y)).collect()
}

pub fn torus_dist(a: &TorusPoint, b: &TorusPoint) -> f64 {
    euclid(&torus_diff(a, b))
}

/// Regularity constants `|Df| ≤ c1`, `|Df(x) − Df(y)| ≤ c2 |x − y|^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub c1: f64,
    pub c2: f64,
    pub alpha: f64,
    /// Whether `c2` was estimated by sampling rather than derived.
    pub estimated: bool,
    /// Pair separation used by the sampling estimate.
    pub resolution: Option<f64>,
}

/// A torus diffeomorphism with derivative and inverse.
pub trait MapModel: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn apply(&self, x: &TorusPoint) -> TorusPoint;
    fn apply_inverse(&self, x: &TorusPoint) -> TorusPoint;
    fn derivative(&self, x: &TorusPoint) -> DMatrix<f64>;
    fn regularity(&self) -> Regularity;
    fn name(&self) -> String;

    /// `log |det Df(x)|`.
    fn log_abs_det(&self, x: &TorusPoint) -> f64 {
        self.derivative(x).determinant().abs().ln()
    }

    /// Whether the model preserves Lebesgue measure (|det Df| ≡ 1).
    fn area_preserving(&self) -> bool {
        false
    }
}

/// Linear toral automorphism `x ↦ Mx mod 1` for an integer matrix with `|det M| = 1`.
#[derive(Debug, Clone)]
pub struct LinearToral {
    rows: Vec<Vec<i64>>,
    m: DMatrix<f64>,
    inv: DMatrix<f64>,
    label: String,
    c1: f64,
}

impl LinearToral {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::with_label(rows, "linear")
    }

    fn with_label(rows: Vec<Vec<i64>>, label: &str) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Config("matrix must be square and nonempty".into()));
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j] as f64);
        let det = m.determinant().round();
        if det.abs() != 1.0 {
            return Err(Error::Config(format!("matrix must be unimodular, det = {det}")));
        }
        let inv = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Config("matrix not invertible".into()))?
            .map(f64::round);
        let c1 = spectral_norm(&m);
        Ok(LinearToral { rows, m, inv, label: label.to_string(), c1 })
    }

    /// Arnold's cat map `[[2,1],[1,1]]`.
    pub fn cat() -> Self {
        Self::with_label(vec![vec![2, 1], vec![1, 1]], "cat").expect("cat matrix is unimodular")
    }

    pub fn cat_with(rows: Vec<Vec<i64>>) -> Result<Self> {
        Self::with_label(rows, "cat")
    }

    /// `f = id` on `T^d`.
    pub fn identity(d: usize) -> Self {
        let rows = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        Self::with_label(rows, "identity").expect("identity is unimodular")
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn inverse_matrix(&self) -> &DMatrix<f64> {
        &self.inv
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    fn mul(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum()).collect()
    }
}

impl MapModel for LinearToral {
    fn dim(&self) -> usize {
        self.m.nrows()
    }

    fn apply(&self, x: &TorusPoint) -> TorusPoint {
        TorusPoint::new(Self::mul(&self.m, x.coords()))
    }

    fn apply_inverse(&self, x: &TorusPoint) -> TorusPoint {
        TorusPoint::new(Self::mul(&self.inv, x.coords()))
    }

    fn derivative(&self, _x: &TorusPoint) -> DMatrix<f64> {
        self.m.clone()
    }

    fn regularity(&self) -> Regularity {
        Regularity { c1: self.c1, c2: 0.0, alpha: 1.0, estimated: false, resolution: None }
    }

    fn name(&self) -> String {
        self.label.clone()
    }

    fn log_abs_det(&self, _x: &TorusPoint) -> f64 {
        0.0
    }

    fn area_preserving(&self) -> bool {
        true
    }
}

/// Cat map slowed down near the fixed point 0.
///
/// Inside `B(0, r)` the map is the time-`τ(|x|)` flow of `H = log A`,
/// `f(x) = exp(τ(|x|) H) x` with `τ(ρ) = κ + (1 − κ) ψ(ρ/r)`, `ψ(t) = 3t² − 2t³`; outside
/// it is `A`. `τ(r) = 1` and `τ'(r) = 0`, so `f` and `Df` are continuous across the sphere
/// and `Df` is Lipschitz. `Df(0) = A^κ`; `κ = 0` gives `Df(0) = I`.
#[derive(Debug, Clone)]
pub struct SlowedCatMap {
    base: LinearToral,
    r: f64,
    kappa: f64,
    basis: DMatrix<f64>,
    logs: Vec<f64>,
    h: DMatrix<f64>,
    c1: f64,
    c2: f64,
    c2_resolution: f64,
}

/// Pairs used for the sampled Hölder estimate.
const C2_SAMPLES: usize = 100_000;

impl SlowedCatMap {
    pub fn new(base: LinearToral, r: f64, kappa: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 0.5) {
            return Err(Error::Config(format!("slowdown radius must lie in (0, 1/2], got {r}")));
        }
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::Config(format!("slowdown kappa must lie in [0, 1], got {kappa}")));
        }
        let m = base.matrix();
        if (m - m.transpose()).abs().max() > 0.0 {
            return Err(Error::Config("slowed map needs a symmetric base matrix".into()));
        }
        let eig = SymmetricEigen::new(m.clone());
        if eig.eigenvalues.iter().any(|&l| l <= 0.0 || (l - 1.0).abs() < 1e-12) {
            return Err(Error::Config(
                "slowed map needs a positive definite hyperbolic base matrix".into(),
            ));
        }
        let logs: Vec<f64> = eig.eigenvalues.iter().map(|l| l.ln()).collect();
        let basis = eig.eigenvectors.clone();
        let d = m.nrows();
        let h = &basis * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(logs.clone())) * basis.transpose();
        let lmax = eig.eigenvalues.max();
        let hnorm = logs.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
        // |Df| ≤ |exp(τH)| (1 + ρ τ'(ρ) |H|) and ρ τ'(ρ) ≤ (8/9)(1 − κ)
        let c1 = lmax * (1.0 + 8.0 / 9.0 * (1.0 - kappa) * hnorm);
        let mut map = SlowedCatMap {
            base,
            r,
            kappa,
            basis,
            logs,
            h,
            c1,
            c2: 0.0,
            c2_resolution: r * 1e-3,
        };
        debug_assert_eq!(map.h.nrows(), d);
        map.c2 = map.estimate_c2();
        Ok(map)
    }

    pub fn arnold(r: f64, kappa: f64) -> Result<Self> {
        Self::new(LinearToral::cat(), r, kappa)
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn base(&self) -> &LinearToral {
        &self.base
    }

    /// `exp(t H)`.
    pub fn flow(&self, t: f64) -> DMatrix<f64> {
        let diag = nalgebra::DVector::from_iterator(self.logs.len(), self.logs.iter().map(|l| (t * l).exp()));
        &self.basis * DMatrix::from_diagonal(&diag) * self.basis.transpose()
    }

    fn tau(&self, rho: f64) -> f64 {
        let t = (rho / self.r).min(1.0);
        self.kappa + (1.0 - self.kappa) * t * t * (3.0 - 2.0 * t)
    }

    fn dtau(&self, rho: f64) -> f64 {
        let t = (rho / self.r).min(1.0);
        (1.0 - self.kappa) * 6.0 * t * (1.0 - t) / self.r
    }

    fn inside(&self, lift: &[f64]) -> bool {
        euclid(lift) < self.r
    }

    fn mul(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
        LinearToral::mul(m, x)
    }

    fn estimate_c2(&self) -> f64 {
        let mut g = rng::stream(0x5eed_c2, 0);
        let d = self.dim();
        let h = self.c2_resolution;
        let mut best = 0.0_f64;
        for _ in 0..C2_SAMPLES {
            let x: Vec<f64> = (0..d).map(|_| g.gen_range(-1.05..1.05) * self.r).collect();
            let u: Vec<f64> = (0..d).map(|_| g.gen_range(-1.0..1.0)).collect();
            let un = euclid(&u).max(1e-12);
            let y: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + h * b / un).collect();
            let px = TorusPoint::new(x);
            let py = TorusPoint::new(y);
            let diff = spectral_norm(&(self.derivative(&px) - self.derivative(&py)));
            best = best.max(diff / torus_dist(&px, &py));
        }
        best
    }
}

impl MapModel for SlowedCatMap {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, x: &TorusPoint) -> TorusPoint {
        let lift = x.centered();
        if !self.inside(&lift) {
            return self.base.apply(x);
        }
        let rho = euclid(&lift);
        TorusPoint::new(Self::mul(&self.flow(self.tau(rho)), &lift))
    }

    fn apply_inverse(&self, y: &TorusPoint) -> TorusPoint {
        let pre = self.base.apply_inverse(y);
        let p = pre.centered();
        if !self.inside(&p) {
            return pre;
        }
        // The lift G of f equals A off the ball and maps B(0, r) onto A·B(0, r), so the
        // preimage is the unique x in the ball with exp(τ(|x|)H) x = A p.
        let target = Self::mul(self.base.matrix(), &p);
        let gap = |rho: f64| euclid(&Self::mul(&self.flow(-self.tau(rho)), &target)) - rho;
        let (mut lo, mut hi) = (0.0_f64, self.r);
        if gap(lo) <= 0.0 {
            hi = 0.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let rho = 0.5 * (lo + hi);
        TorusPoint::new(Self::mul(&self.flow(-self.tau(rho)), &target))
    }

    fn derivative(&self, x: &TorusPoint) -> DMatrix<f64> {
        let lift = x.centered();
        if !self.inside(&lift) {
            return self.base.matrix().clone();
        }
        let rho = euclid(&lift);
        let e = self.flow(self.tau(rho));
        if rho == 0.0 {
            return e;
        }
        let d = self.dim();
        let xv = nalgebra::DVector::from_column_slice(&lift);
        let rank_one = &self.h * &xv * xv.transpose() * (self.dtau(rho) / rho);
        e * (DMatrix::identity(d, d) + rank_one)
    }

    fn regularity(&self) -> Regularity {
        Regularity {
            c1: self.c1,
            c2: self.c2,
            alpha: 1.0,
            estimated: true,
            resolution: Some(self.c2_resolution),
        }
    }

    fn name(&self) -> String {
        format!("slowed(r={}, kappa={})", self.r, self.kappa)
    }
}

/// Chirikov standard map on `(x, p)`: `p' = p + (K/2π) sin 2πx`, `x' = x + p'`.
#[derive(Debug, Clone)]
pub struct StandardMap {
    k: f64,
}

impl StandardMap {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::Config("K_standard must be finite".into()));
        }
        Ok(StandardMap { k })
    }

    fn kick(&self, x: f64) -> f64 {
        self.k / (2.0 * std::f64::consts::PI) * (2.0 * std::f64::consts::PI * x).sin()
    }
}

impl MapModel for StandardMap {
    fn dim(&self) -> usize {
        2
    }

    fn apply(&self, z: &TorusPoint) -> TorusPoint {
        let (x, p) = (z.coords()[0], z.coords()[1]);
        let p1 = p + self.kick(x);
        TorusPoint::new(vec![x + p1, p1])
    }

    fn apply_inverse(&self, z: &TorusPoint) -> TorusPoint {
        let (x1, p1) = (z.coords()[0], z.coords()[1]);
        let x = x1 - p1;
        TorusPoint::new(vec![x, p1 - self.kick(x)])
    }

    fn derivative(&self, z: &TorusPoint) -> DMatrix<f64> {
        let c = self.k * (2.0 * std::f64::consts::PI * z.coords()[0]).cos();
        DMatrix::from_row_slice(2, 2, &[1.0 + c, 1.0, c, 1.0])
    }

    fn regularity(&self) -> Regularity {
        // spectral norm is convex in the kick slope, so the sup sits at slope ±K
        let at = |c: f64| spectral_norm(&DMatrix::from_row_slice(2, 2, &[1.0 + c, 1.0, c, 1.0]));
        Regularity {
            c1: at(self.k).max(at(-self.k)),
            c2: 2.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI * self.k.abs(),
            alpha: 1.0,
            estimated: false,
            resolution: None,
        }
    }

    fn name(&self) -> String {
        format!("standard(K={})", self.k)
    }

    fn log_abs_det(&self, _x: &TorusPoint) -> f64 {
        0.0
    }

    fn area_preserving(&self) -> bool {
        true
    }
}

/// Model selection as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Cat {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<i64>>>,
    },
    Slowed {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<i64>>>,
        r: f64,
        kappa: f64,
    },
    Standard {
        #[serde(rename = "K_standard")]
        k_standard: f64,
    },
    Identity {
        #[serde(default = "default_identity_dim")]
        d: usize,
    },
}

fn default_identity_dim() -> usize {
    2
}

impl ModelSpec {
    pub fn build(&self) -> Result<Arc<dyn MapModel>> {
        Ok(match self {
            ModelSpec::Cat { matrix } => match matrix {
                Some(m) => Arc::new(LinearToral::cat_with(m.clone())?),
                None => Arc::new(LinearToral::cat()),
            },
            ModelSpec::Slowed { matrix, r, kappa } => {
                let base = match matrix {
                    Some(m) => LinearToral::cat_with(m.clone())?,
                    None => LinearToral::cat(),
                };
                Arc::new(SlowedCatMap::new(base, *r, *kappa)?)
            }
            ModelSpec::Standard { k_standard } => Arc::new(StandardMap::new(*k_standard)?),
            ModelSpec::Identity { d } => {
                if *d == 0 {
                    return Err(Error::Config("identity dimension must be >= 1".into()));
                }
                Arc::new(LinearToral::identity(*d))
            }
        })
    }
}

/// Points `y_k` over `[k_min, k_max]` with their recomputed defect.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitWindow {
    k_min: i64,
    points: Vec<TorusPoint>,
    defect: f64,
}

impl OrbitWindow {
    /// The defect is recomputed from `model`.
    pub fn new(model: &dyn MapModel, k_min: i64, points: Vec<TorusPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Dimension("orbit window needs at least one point".into()));
        }
        let d = model.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != d) {
            return Err(Error::Dimension(format!("point of dimension {} for a {d}-dimensional model", p.dim())));
        }
        if points.iter().flat_map(|p| p.coords()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("orbit point".into()));
        }
        let defect = if points.len() >= 2 { defect(model, &points) } else { 0.0 };
        Ok(OrbitWindow { k_min, points, defect })
    }

    pub fn window(&self) -> Window {
        Window::new(self.k_min, self.k_min + self.points.len() as i64 - 1)
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.points.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    pub fn point(&self, k: i64) -> &TorusPoint {
        &self.points[(k - self.k_min) as usize]
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn restrict(&self, model: &dyn MapModel, window: Window) -> Result<Self> {
        if !self.window().covers(&window) {
            return Err(Error::Dimension(format!("{} does not cover {}", self.window(), window)));
        }
        let o = self.window().offset(window.k_min);
        Self::new(model, window.k_min, self.points[o..o + window.len()].to_vec())
    }

    /// Same points re-indexed so that the window moves by `j`.
    pub fn reindexed(&self, j: i64) -> Self {
        OrbitWindow { k_min: self.k_min + j, points: self.points.clone(), defect: self.defect }
    }

    /// CSV with header `k,x_1,...,x_d`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["k".to_string()];
        header.extend((1..=self.dim()).map(|i| format!("x_{i}")));
        wr.write_record(&header)?;
        for (i, p) in self.points.iter().enumerate() {
            let mut row = vec![(self.k_min + i as i64).to_string()];
            row.extend(p.coords().iter().map(|x| x.to_string()));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(model: &dyn MapModel, r: R) -> Result<Self> {
        let rows = read_indexed_csv(r)?;
        let k_min = check_contiguous(&rows)?;
        Self::new(model, k_min, rows.into_iter().map(|(_, x)| TorusPoint::new(x)).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.points
                .iter()
                .enumerate()
                .map(|(i, p)| serde_json::json!({ "k": self.k_min + i as i64, "x": p.coords() }))
                .collect(),
        )
    }
}

/// `y_k = f^k(x0)` over `[k_min, k_max]`.
pub fn evolve(model: &dyn MapModel, x0: &TorusPoint, k_min: i64, k_max: i64) -> Result<OrbitWindow> {
    let window = Window::new(k_min, k_max);
    let mut points = vec![TorusPoint::origin(model.dim()); window.len()];
    let mut place = |k: i64, p: &TorusPoint| {
        if window.contains(k) {
            points[window.offset(k)] = p.clone();
        }
    };
    place(0, x0);
    let mut x = x0.clone();
    for k in 1..=k_max.max(0) {
        x = model.apply(&x);
        place(k, &x);
    }
    let mut x = x0.clone();
    for k in (k_min.min(0)..0).rev() {
        x = model.apply_inverse(&x);
        place(k, &x);
    }
    if points.iter().flat_map(|p| p.coords()).any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("iterate of evolve".into()));
    }
    OrbitWindow::new(model, k_min, points)
}

/// Uniform sample from the open ball of radius `beta` in `R^d`.
fn ball_sample(g: &mut rng::Rng, d: usize, beta: f64) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..d).map(|_| g.gen_range(-1.0..1.0)).collect();
        if euclid(&u) < 1.0 {
            return u.into_iter().map(|x| x * beta).collect();
        }
    }
}

/// `β`-pseudo-orbit through `y_0 = x0`: `y_k = f(y_{k−1}) + ζ_k` for `k > 0` and
/// `y_{k−1} = f^{-1}(y_k − ζ_k)` for `k ≤ 0`, with `ζ_k` uniform in the ball of radius `β`.
pub fn pseudo_orbit(
    model: &dyn MapModel,
    x0: &TorusPoint,
    k_min: i64,
    k_max: i64,
    beta_target: f64,
    seed: u64,
) -> Result<OrbitWindow> {
    if !(beta_target >= 0.0) {
        return Err(Error::Precondition(format!("beta_target must be >= 0, got {beta_target}")));
    }
    if beta_target == 0.0 {
        return evolve(model, x0, k_min, k_max);
    }
    let window = Window::new(k_min, k_max);
    let d = model.dim();
    let mut g = rng::stream(seed, 0);
    let mut points = vec![TorusPoint::origin(d); window.len()];
    if window.contains(0) {
        points[window.offset(0)] = x0.clone();
    }
    let mut y = x0.clone();
    for k in 1..=k_max.max(0) {
        y = model.apply(&y).translate(&ball_sample(&mut g, d, beta_target));
        if window.contains(k) {
            points[window.offset(k)] = y.clone();
        }
    }
    let mut y = x0.clone();
    for k in (k_min.min(0)..0).rev() {
        let z: Vec<f64> = ball_sample(&mut g, d, beta_target).iter().map(|v| -v).collect();
        y = model.apply_inverse(&y.translate(&z));
        if window.contains(k) {
            points[window.offset(k)] = y.clone();
        }
    }
    OrbitWindow::new(model, k_min, points)
}

/// `max_k dist(f(y_{k−1}), y_k)`.
pub fn defect(model: &dyn MapModel, points: &[TorusPoint]) -> f64 {
    points.windows(2).map(|w| torus_dist(&model.apply(&w[0]), &w[1])).fold(0.0, f64::max)
}

/// `Df(y_k)` for every point of the window.
pub fn cocycle(model: &dyn MapModel, orbit: &OrbitWindow) -> Vec<DMatrix<f64>> {
    orbit.points().iter().map(|p| model.derivative(p)).collect()
}

/// Eigenvalues `(λ_u, λ_s)` of the cat matrix `[[2,1],[1,1]]`.
pub fn cat_eigenvalues() -> (f64, f64) {
    let s = 5f64.sqrt();
    ((3.0 + s) / 2.0, (3.0 - s) / 2.0)
}
