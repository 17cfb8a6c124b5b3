//! Hyperbolicity classification on finite windows: K-stability of the solve-norm proxy,
//! two-grade inverse bounds, Lyapunov exponents and Pesin level sets.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, torus_dist, MapModel, TorusPoint};
use crate::error::{Error, Result};
use crate::inverse::{solve_norm_proxy, splitting_inverse};
use crate::operator::{assemble_gamma, norm_upper};
use crate::rng;
use crate::seqspace::{Grade, Window};
use crate::splitting::{compute_splitting, SplittingConstants};

/// Cutoffs turning finite-window measurements into verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Growth per doubling of K at or below which the proxy counts as bounded.
    pub bounded: f64,
    /// Growth per doubling of K at or above which the proxy counts as degenerate.
    pub degenerate: f64,
    /// Fraction of sampled points standing in for "almost every".
    pub ae_fraction: f64,
    /// Lyapunov exponents within this distance of zero count as zero.
    pub guard_band: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { bounded: 1.25, degenerate: 10.0, ae_fraction: 0.99, guard_band: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UniformLike,
    NonuniformLike,
    Degenerate,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::UniformLike => "uniform-like",
            Verdict::NonuniformLike => "nonuniform-like",
            Verdict::Degenerate => "degenerate",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Knobs shared by the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticOptions {
    pub thresholds: Thresholds,
    /// Sweep iterations of the splitting computation on each side of the window.
    pub splitting_iters: usize,
    pub lyapunov_steps: usize,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        DiagnosticOptions { thresholds: Thresholds::default(), splitting_iters: 64, lyapunov_steps: 1000 }
    }
}

/// Measurements at one sample point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub x: Vec<f64>,
    pub k_list: Vec<i64>,
    pub proxies: Vec<f64>,
    /// Largest growth of the proxy per doubling of K.
    pub growth: f64,
    pub splitting: Option<SplittingConstants>,
    pub splitting_failure: Option<String>,
    pub lyapunov: Vec<f64>,
    /// `||Υ||_{n→m}` on each window of `k_list` (two-grade test only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_grade: Option<Vec<f64>>,
    /// `||Υ||_{n→n}` on the largest window (two-grade test only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_grade_bound: Option<f64>,
    pub verdict: Verdict,
}

/// Outcome of [`mather_test`] or [`nonuniform_proxy`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub test: String,
    pub model: String,
    pub grades: Vec<Grade>,
    pub k_list: Vec<i64>,
    pub thresholds: Thresholds,
    pub sampler: String,
    pub points: Vec<PointRecord>,
    /// Fraction of points with a finite two-grade bound (two-grade test only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_fraction: Option<f64>,
    pub verdict: Verdict,
}

impl HyperbolicityReport {
    /// Largest per-point proxy growth.
    pub fn max_growth(&self) -> f64 {
        self.points.iter().map(|p| p.growth).fold(0.0, f64::max)
    }

    /// `(max − min)/min` of the proxies at each K, maximized over K.
    pub fn proxy_spread(&self) -> f64 {
        let mut spread = 0.0_f64;
        for t in 0..self.k_list.len() {
            let vals: Vec<f64> = self.points.iter().map(|p| p.proxies[t]).collect();
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(0.0, f64::max);
            spread = spread.max((hi - lo) / lo);
        }
        spread
    }

    /// CSV with one row per point and K: `point,x_1..x_d,K,proxy`.
    pub fn proxy_csv(&self) -> String {
        let d = self.points.first().map_or(0, |p| p.x.len());
        let mut out = String::from("point");
        for i in 1..=d {
            out.push_str(&format!(",x_{i}"));
        }
        out.push_str(",K,proxy\n");
        for (idx, p) in self.points.iter().enumerate() {
            for (k, v) in p.k_list.iter().zip(&p.proxies) {
                out.push_str(&idx.to_string());
                for c in &p.x {
                    out.push_str(&format!(",{c:?}"));
                }
                out.push_str(&format!(",{k},{v:?}\n"));
            }
        }
        out
    }
}

/// Source of sample points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sampler {
    /// Uniform on the torus, sample `i` drawn from stream `i` of `seed`.
    Lebesgue { samples: usize, seed: u64 },
    Points { points: Vec<Vec<f64>> },
}

impl Sampler {
    pub fn points(&self, d: usize) -> Vec<TorusPoint> {
        match self {
            Sampler::Lebesgue { samples, seed } => (0..*samples as u64)
                .map(|i| {
                    let mut g = rng::stream(*seed, i);
                    TorusPoint::new((0..d).map(|_| g.gen::<f64>()).collect())
                })
                .collect(),
            Sampler::Points { points } => points.iter().map(|p| TorusPoint::new(p.clone())).collect(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Sampler::Lebesgue { samples, seed } => format!("lebesgue(samples={samples}, seed={seed})"),
            Sampler::Points { points } => format!("explicit({} points)", points.len()),
        }
    }
}

fn check_k_list(k_list: &[i64]) -> Result<()> {
    if k_list.len() < 3 {
        return Err(Error::Precondition(format!("K_list needs at least 3 entries, got {}", k_list.len())));
    }
    if k_list[0] < 1 || k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("K_list must be positive and strictly increasing".into()));
    }
    Ok(())
}

/// Growth per doubling of K between consecutive entries, maximized.
fn growth_per_doubling(k_list: &[i64], values: &[f64]) -> f64 {
    k_list
        .windows(2)
        .zip(values.windows(2))
        .map(|(k, v)| {
            let doublings = (k[1] as f64 / k[0] as f64).log2();
            (v[1] / v[0]).powf(1.0 / doublings)
        })
        .fold(0.0, f64::max)
}

fn classify(growth: f64, splitting_ok: bool, t: &Thresholds) -> Verdict {
    if !growth.is_finite() || growth >= t.degenerate {
        Verdict::Degenerate
    } else if growth <= t.bounded && splitting_ok {
        Verdict::UniformLike
    } else if !splitting_ok && growth > t.bounded {
        Verdict::Degenerate
    } else {
        Verdict::Inconclusive
    }
}

struct PointData {
    record: PointRecord,
    frames: Option<crate::splitting::SplittingFrames>,
    gamma: crate::operator::TransferOperator,
}

fn measure_point(model: &dyn MapModel, x: &TorusPoint, grade: Grade, k_list: &[i64], opts: &DiagnosticOptions) -> Result<PointData> {
    let kmax = *k_list.last().expect("nonempty");
    let pad = kmax + opts.splitting_iters as i64;
    let orbit = evolve(model, x, -pad, pad)?;
    let gamma = assemble_gamma(model, &orbit.restrict(model, Window::centered(kmax))?)?;
    let proxies: Vec<f64> = solve_norm_proxy(&gamma, grade, k_list)?.into_iter().map(|p| p.1).collect();
    let growth = growth_per_doubling(k_list, &proxies);
    let (frames, failure) = match compute_splitting(model, &orbit, opts.splitting_iters) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let lyapunov = lyapunov_exponents(model, x, opts.lyapunov_steps.max(1000))?;
    let verdict = classify(growth, frames.is_some(), &opts.thresholds);
    Ok(PointData {
        record: PointRecord {
            x: x.coords().to_vec(),
            k_list: k_list.to_vec(),
            proxies,
            growth,
            splitting: frames.as_ref().map(|f| f.constants),
            splitting_failure: failure,
            lyapunov,
            two_grade: None,
            single_grade_bound: None,
            verdict,
        },
        frames,
        gamma,
    })
}

fn aggregate(points: &[PointRecord]) -> Verdict {
    let all = |v: Verdict| points.iter().all(|p| p.verdict == v);
    if points.is_empty() {
        Verdict::Inconclusive
    } else if all(Verdict::UniformLike) {
        Verdict::UniformLike
    } else if all(Verdict::Degenerate) {
        Verdict::Degenerate
    } else if points.iter().any(|p| p.verdict == Verdict::UniformLike) {
        Verdict::NonuniformLike
    } else {
        Verdict::Inconclusive
    }
}

/// K-stability of the solve-norm proxy on windows `[−K, K]` through each point.
///
/// A point is uniform-like when its proxy grows by at most `bounded` per doubling of K and
/// the splitting computation succeeds there. The report is uniform-like when every point is.
pub fn mather_test(
    model: &dyn MapModel,
    points: &[TorusPoint],
    grade: Grade,
    k_list: &[i64],
    opts: &DiagnosticOptions,
) -> Result<HyperbolicityReport> {
    check_k_list(k_list)?;
    let records: Vec<PointRecord> = points
        .par_iter()
        .map(|x| measure_point(model, x, grade, k_list, opts).map(|d| d.record))
        .collect::<Result<_>>()?;
    let verdict = aggregate(&records);
    Ok(HyperbolicityReport {
        test: "mather".into(),
        model: model.name(),
        grades: vec![grade],
        k_list: k_list.to_vec(),
        thresholds: opts.thresholds,
        sampler: format!("explicit({} points)", points.len()),
        points: records,
        finite_fraction: None,
        verdict,
    })
}

/// Two-grade test: the splitting inverse measured as an `X_n → X_m` operator.
///
/// A point has a finite two-grade bound when the splitting exists and `||Υ||_{n→m}` grows by
/// at most `bounded` per doubling of K. The verdict is nonuniform-like when at least
/// `ae_fraction` of the points have a finite bound while the single-grade `X_∞` proxy is
/// unbounded somewhere, and uniform-like when the proxy is bounded everywhere as well.
pub fn nonuniform_proxy(
    model: &dyn MapModel,
    sampler: &Sampler,
    n: Grade,
    m: Grade,
    k_list: &[i64],
    opts: &DiagnosticOptions,
) -> Result<HyperbolicityReport> {
    check_k_list(k_list)?;
    let coarser = match (n, m) {
        (Grade::Infinity, Grade::Finite(_)) => true,
        (Grade::Finite(a), Grade::Finite(b)) => a > b,
        _ => false,
    };
    if !coarser {
        return Err(Error::Precondition(format!("two-grade test needs n > m, got n = {n}, m = {m}")));
    }
    let t = opts.thresholds;
    let points = sampler.points(model.dim());
    let records: Vec<PointRecord> = points
        .par_iter()
        .map(|x| {
            let data = measure_point(model, x, Grade::Infinity, k_list, opts)?;
            let mut rec = data.record;
            if let Some(frames) = &data.frames {
                let mut vals = Vec::with_capacity(k_list.len());
                let mut single = 0.0;
                for &k in k_list {
                    let g = data.gamma.restrict(Window::centered(k))?;
                    let f = frames.restrict(Window::centered(k))?;
                    let inv = splitting_inverse(&g, &f, Grade::Infinity)?;
                    vals.push(norm_upper(&inv.rep, n, m));
                    single = norm_upper(&inv.rep, n, n);
                }
                rec.single_grade_bound = Some(single);
                rec.two_grade = Some(vals);
            }
            Ok(rec)
        })
        .collect::<Result<_>>()?;
    let finite = records
        .iter()
        .filter(|r| r.two_grade.as_ref().is_some_and(|v| growth_per_doubling(k_list, v) <= t.bounded))
        .count();
    let fraction = finite as f64 / records.len().max(1) as f64;
    let single_unbounded = records.iter().any(|r| r.growth > t.bounded);
    let verdict = if fraction >= t.ae_fraction {
        if single_unbounded {
            Verdict::NonuniformLike
        } else {
            Verdict::UniformLike
        }
    } else if records.iter().all(|r| r.verdict == Verdict::Degenerate) {
        Verdict::Degenerate
    } else {
        Verdict::Inconclusive
    };
    Ok(HyperbolicityReport {
        test: "two_grade".into(),
        model: model.name(),
        grades: vec![n, m],
        k_list: k_list.to_vec(),
        thresholds: t,
        sampler: sampler.describe(),
        points: records,
        finite_fraction: Some(fraction),
        verdict,
    })
}

/// Lyapunov exponents from QR re-orthonormalization of the cocycle, sorted descending.
pub fn lyapunov_exponents(model: &dyn MapModel, x0: &TorusPoint, steps: usize) -> Result<Vec<f64>> {
    if steps < 1000 {
        return Err(Error::Precondition(format!("Lyapunov estimate needs at least 1000 steps, got {steps}")));
    }
    let d = model.dim();
    let mut q = nalgebra::DMatrix::<f64>::identity(d, d);
    let mut sums = vec![0.0; d];
    let mut x = x0.clone();
    for _ in 0..steps {
        let qr = (model.derivative(&x) * q).qr();
        let r = qr.r();
        for (i, s) in sums.iter_mut().enumerate() {
            *s += r[(i, i)].abs().ln();
        }
        q = qr.q();
        x = model.apply(&x);
    }
    let mut out: Vec<f64> = sums.into_iter().map(|s| s / steps as f64).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Mean of `log |det Df|` along `steps` iterates.
pub fn mean_log_det(model: &dyn MapModel, x0: &TorusPoint, steps: usize) -> f64 {
    let mut x = x0.clone();
    let mut acc = 0.0;
    for _ in 0..steps {
        acc += model.log_abs_det(&x);
        x = model.apply(&x);
    }
    acc / steps as f64
}

/// Whether every exponent is at least `guard_band` away from zero.
pub fn is_u_hyperbolic(exponents: &[f64], guard_band: f64) -> bool {
    exponents.iter().all(|e| e.abs() > guard_band)
}

/// Refinement parameters of the Pesin grading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefinementParams {
    /// Pairs closer than `1/r` are compared.
    pub r: u32,
    /// Offsets `|j| ≤ p` of the central row are compared.
    pub p: i64,
    pub eps: f64,
}

impl Default for RefinementParams {
    fn default() -> Self {
        RefinementParams { r: 100, p: 8, eps: 0.1 }
    }
}

/// Continuity data for one close pair of members.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairContinuity {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
    /// `sup_{|j|≤p} |Υ^{(a)}_{0,j} − Υ^{(b)}_{0,j}|`.
    pub difference: f64,
}

/// Level set `Λ_m` at a grade: points whose measured window inverse norm is at most `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PesinGrade {
    pub level: u32,
    pub grade: Grade,
    /// Indices into the sample list.
    pub members: Vec<usize>,
    pub refinement: RefinementParams,
    pub pairs: Vec<PairContinuity>,
    /// Connected components of members joined by pairs within `eps`.
    pub groups: Vec<Vec<usize>>,
}

/// Per-point outcome of [`grade_pesin_sets`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PesinAssignment {
    pub norms: Vec<f64>,
    /// Least integer level `m ≥ norm`, `None` when no splitting exists.
    pub levels: Vec<Option<u32>>,
    pub grades: Vec<PesinGrade>,
}

/// Least integer `m ≥ 1` with `norm ≤ m`.
pub fn level_of(norm: f64) -> Option<u32> {
    if norm.is_finite() {
        Some(norm.ceil().max(1.0) as u32)
    } else {
        None
    }
}

/// Assigns each point its least level and builds `Λ_m` for every requested level.
pub fn grade_pesin_sets(
    model: &dyn MapModel,
    points: &[TorusPoint],
    grade: Grade,
    m_levels: &[u32],
    k: i64,
    refinement: RefinementParams,
    opts: &DiagnosticOptions,
) -> Result<PesinAssignment> {
    let iters = opts.splitting_iters;
    let measured: Vec<(f64, Option<crate::operator::MatrixRep>)> = points
        .par_iter()
        .map(|x| {
            let pad = k + iters as i64;
            let orbit = evolve(model, x, -pad, pad)?;
            let frames = match compute_splitting(model, &orbit, iters) {
                Ok(f) => f,
                Err(Error::DegenerateSplitting(_)) => return Ok((f64::INFINITY, None)),
                Err(e) => return Err(e),
            };
            let gamma = assemble_gamma(model, &orbit.restrict(model, Window::centered(k))?)?;
            let inv = splitting_inverse(&gamma, &frames, Grade::Infinity)?;
            Ok((norm_upper(&inv.rep, grade, grade), Some(inv.rep)))
        })
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = measured.iter().map(|m| m.0).collect();
    let levels: Vec<Option<u32>> = norms.iter().map(|n| level_of(*n)).collect();
    let radius = 1.0 / refinement.r.max(1) as f64;
    let mut sorted = m_levels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let grades = sorted
        .into_iter()
        .map(|m| {
            let members: Vec<usize> = (0..points.len()).filter(|&i| norms[i] <= m as f64).collect();
            let mut pairs = Vec::new();
            for (ia, &a) in members.iter().enumerate() {
                for &b in &members[ia + 1..] {
                    let distance = torus_dist(&points[a], &points[b]);
                    if distance < radius {
                        let (ra, rb) = (measured[a].1.as_ref().unwrap(), measured[b].1.as_ref().unwrap());
                        let difference = (-refinement.p..=refinement.p)
                            .filter(|j| ra.cols().contains(*j))
                            .map(|j| crate::linalg::spectral_norm(&(ra.block(0, j) - rb.block(0, j))))
                            .fold(0.0, f64::max);
                        pairs.push(PairContinuity { a, b, distance, difference });
                    }
                }
            }
            let groups = components(&members, pairs.iter().filter(|p| p.difference < refinement.eps).map(|p| (p.a, p.b)));
            PesinGrade { level: m, grade, members, refinement, pairs, groups }
        })
        .collect();
    Ok(PesinAssignment { norms, levels, grades })
}

fn components(members: &[usize], edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let idx = |v: usize| members.binary_search(&v).expect("member");
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, idx(a)), find(&mut parent, idx(b)));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..members.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(members[i]);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{cat_eigenvalues, LinearToral, SlowedCatMap, StandardMap};

    #[test]
    fn cat_lyapunov_exponents() {
        let cat = LinearToral::cat();
        let le = lyapunov_exponents(&cat, &TorusPoint::new(vec![0.1, 0.2]), 10_000).unwrap();
        let (lu, _) = cat_eigenvalues();
        assert!((le[0] - lu.ln()).abs() < 1e-3);
        assert!((le[1] + lu.ln()).abs() < 1e-3);
        let id = LinearToral::identity(2);
        assert_eq!(lyapunov_exponents(&id, &TorusPoint::new(vec![0.1, 0.2]), 1000).unwrap(), vec![0.0, 0.0]);
        assert!(lyapunov_exponents(&cat, &TorusPoint::origin(2), 999).is_err());
    }

    #[test]
    fn area_preserving_exponent_sums_vanish() {
        let models: Vec<Box<dyn MapModel>> = vec![
            Box::new(LinearToral::cat()),
            Box::new(StandardMap::new(0.9).unwrap()),
        ];
        for m in models {
            let le = lyapunov_exponents(m.as_ref(), &TorusPoint::new(vec![0.3, 0.45]), 5000).unwrap();
            assert!(le.iter().sum::<f64>().abs() < 1e-6, "{}: {le:?}", m.name());
        }
    }

    #[test]
    fn slowed_exponent_sum_matches_log_det() {
        let f = SlowedCatMap::arnold(0.2, 0.3).unwrap();
        let x = TorusPoint::new(vec![0.123, 0.456]);
        let le = lyapunov_exponents(&f, &x, 4000).unwrap();
        assert!((le.iter().sum::<f64>() - mean_log_det(&f, &x, 4000)).abs() < 1e-6);
    }

    #[test]
    fn cat_mather_uniform() {
        let cat = LinearToral::cat();
        let pts = Sampler::Lebesgue { samples: 6, seed: 3 }.points(2);
        let rep = mather_test(&cat, &pts, Grade::Infinity, &[8, 16, 32], &DiagnosticOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::UniformLike);
        assert!(rep.proxy_spread() < 0.05);
    }

    #[test]
    fn identity_is_degenerate() {
        let id = LinearToral::identity(2);
        let pts = Sampler::Lebesgue { samples: 3, seed: 1 }.points(2);
        let rep = mather_test(&id, &pts, Grade::Infinity, &[8, 16, 32], &DiagnosticOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Degenerate);
        assert!(rep.points.iter().all(|p| p.splitting_failure.is_some()));
    }

    #[test]
    fn k_list_precondition() {
        let cat = LinearToral::cat();
        assert!(mather_test(&cat, &[], Grade::Infinity, &[8, 16], &DiagnosticOptions::default()).is_err());
        let s = Sampler::Points { points: vec![vec![0.1, 0.2]] };
        let e = nonuniform_proxy(&cat, &s, Grade::Finite(4), Grade::Finite(4), &[8, 16, 32], &DiagnosticOptions::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn cat_two_grade_finite_everywhere() {
        let cat = LinearToral::cat();
        let s = Sampler::Lebesgue { samples: 4, seed: 9 };
        let rep = nonuniform_proxy(&cat, &s, Grade::Finite(8), Grade::Finite(4), &[8, 16, 32], &DiagnosticOptions::default()).unwrap();
        assert_eq!(rep.finite_fraction, Some(1.0));
        assert_eq!(rep.verdict, Verdict::UniformLike);
        for p in &rep.points {
            let two = *p.two_grade.as_ref().unwrap().last().unwrap();
            assert!(two <= p.single_grade_bound.unwrap() + 1e-12);
        }
    }

    #[test]
    fn cat_pesin_level_three() {
        let cat = LinearToral::cat();
        let pts = Sampler::Lebesgue { samples: 5, seed: 2 }.points(2);
        let out = grade_pesin_sets(&cat, &pts, Grade::Infinity, &[2, 3, 4], 16, RefinementParams::default(), &DiagnosticOptions::default()).unwrap();
        assert!(out.levels.iter().all(|l| *l == Some(3)));
        assert!(out.grades[0].members.is_empty());
        assert_eq!(out.grades[1].members.len(), 5);
        assert_eq!(out.grades[2].members.len(), 5);
    }

    #[test]
    fn verdict_serializes_kebab() {
        assert_eq!(serde_json::to_string(&Verdict::UniformLike).unwrap(), "\"uniform-like\"");
    }
}
