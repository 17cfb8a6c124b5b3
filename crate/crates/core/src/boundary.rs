//! Families of slowed cat maps `f_m` agreeing with the cat map off shrinking balls
//! `B(0, r_m)`, the boundary criterion `μ(A_m^c) log(a_m c_m) → 0`, residence statistics and
//! the invertibility certificate.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{cat_eigenvalues, cocycle, evolve, LinearToral, MapModel, SlowedCatMap, TorusPoint};
use crate::error::{Error, Result};
use crate::inverse::{neumann_invert, splitting_inverse};
use crate::operator::{assemble_gamma, norm_upper, MatrixRep, TransferOperator};
use crate::rng;
use crate::seqspace::{Grade, Window};
use crate::splitting::splitting_from_cocycle;

/// Reported with every experiment output.
pub const MEASURE_CAVEAT: &str = "Lebesgue measure is used throughout; it is invariant for the cat map but the invariant measure of the slowed maps is not constructed";

/// Sample points of `A_m` used to check that `f_m` agrees with the base map there.
pub const COINCIDENCE_SAMPLES: usize = 1000;
/// Orbits through `B(0, r_m)` used to measure the hyperbolicity constants of `f_m`.
pub const CONSTANT_ORBITS: usize = 24;
/// Half-length of the window on which constants are measured.
const CONSTANT_WINDOW: i64 = 24;
/// Orbit horizon replacing "infinitely many indices".
pub const DEFAULT_HORIZON: usize = 10_000;

#[derive(Debug, Clone)]
pub struct FamilyLevel {
    pub m: usize,
    pub radius: f64,
    pub kappa: f64,
    pub map: Arc<SlowedCatMap>,
    /// `μ(A_m^c) = π r_m²`.
    pub complement_measure: f64,
    pub a: f64,
    pub c: f64,
    pub lambda: f64,
}

impl FamilyLevel {
    /// Whether `x` lies in `A_m`, the torus minus the open ball `B(0, r_m)`.
    pub fn in_region(&self, x: &TorusPoint) -> bool {
        x.norm() >= self.radius
    }
}

/// Outcome of each family condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyChecks {
    /// Largest `|f_m(x) − f(x)|` over sampled `x ∈ A_m`.
    pub coincidence_deviation: f64,
    /// Uniform bound `b` on `|Df_m|`.
    pub derivative_bound: f64,
    /// Largest sampled `|Df_m|`.
    pub derivative_sampled: f64,
    /// `λ = sup_m λ_m`.
    pub lambda: f64,
    pub regions_nested: bool,
}

#[derive(Debug, Clone)]
pub struct AnosovFamily {
    pub base: LinearToral,
    pub levels: Vec<FamilyLevel>,
    pub b: f64,
    pub lambda: f64,
    pub checks: FamilyChecks,
    pub caveat: String,
}

#[derive(Serialize)]
struct LevelRecord {
    m: usize,
    radius: f64,
    kappa: f64,
    complement_measure: f64,
    a: f64,
    c: f64,
    lambda: f64,
}

impl AnosovFamily {
    /// Map the family converges to off the fixed point: the base map.
    pub fn limit(&self) -> &LinearToral {
        &self.base
    }

    pub fn level(&self, m: usize) -> Option<&FamilyLevel> {
        self.levels.iter().find(|l| l.m == m)
    }

    pub fn deepest(&self) -> &FamilyLevel {
        self.levels.last().expect("family has levels")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<LevelRecord> = self
            .levels
            .iter()
            .map(|l| LevelRecord {
                m: l.m,
                radius: l.radius,
                kappa: l.kappa,
                complement_measure: l.complement_measure,
                a: l.a,
                c: l.c,
                lambda: l.lambda,
            })
            .collect();
        serde_json::json!({
            "levels": levels,
            "b": self.b,
            "lambda": self.lambda,
            "checks": self.checks,
            "caveat": self.caveat,
        })
    }
}

fn family_error(condition: &str, detail: String) -> Error {
    Error::FamilyConstruction { condition: condition.into(), detail }
}

/// Sweep iterations giving `~e^{−28}` convergence of the frames at the fixed point.
fn sweep_iters(kappa: f64) -> usize {
    let (lu, _) = cat_eigenvalues();
    ((28.0 / (2.0 * kappa * lu.ln())).ceil() as usize).max(40)
}

/// Point uniformly distributed in the disc of radius `r` about the origin.
fn point_in_ball(g: &mut rng::Rng, r: f64) -> TorusPoint {
    let rad = r * g.gen::<f64>().sqrt();
    let th = 2.0 * PI * g.gen::<f64>();
    TorusPoint::new(vec![rad * th.cos(), rad * th.sin()])
}

/// `(a, c, λ)` of `f_m` from splitting computations on orbits through `B(0, r_m)`,
/// including the fixed point.
fn measure_constants(map: &SlowedCatMap, m: usize) -> Result<(f64, f64, f64)> {
    let iters = sweep_iters(map.kappa());
    let pad = CONSTANT_WINDOW + iters as i64;
    let starts: Vec<TorusPoint> = std::iter::once(TorusPoint::origin(2))
        .chain((0..CONSTANT_ORBITS as u64).map(|i| point_in_ball(&mut rng::stream(0xfa_0001 + m as u64, i), map.radius())))
        .collect();
    let measured: Vec<(f64, f64, f64)> = starts
        .par_iter()
        .map(|x| {
            let orbit = evolve(map, x, -pad, pad)?;
            let frames = splitting_from_cocycle(orbit.k_min(), &cocycle(map, &orbit), iters)?;
            let k = frames.constants;
            Ok((k.a, k.c, k.lambda))
        })
        .collect::<Result<_>>()?;
    Ok(measured.into_iter().fold((1.0_f64, 1.0_f64, 0.0_f64), |acc, v| (acc.0.max(v.0), acc.1.max(v.1), acc.2.max(v.2))))
}

/// Builds `f_m` for each `(r_m, κ_m)` and checks the four family conditions.
pub fn build_slowed_family(radii: &[f64], slowdowns: &[f64]) -> Result<AnosovFamily> {
    if radii.is_empty() || radii.len() != slowdowns.len() {
        return Err(Error::Precondition(format!(
            "need equally many radii and slowdowns, got {} and {}",
            radii.len(),
            slowdowns.len()
        )));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) || radii[0] > 0.5 || *radii.last().unwrap() <= 0.0 {
        return Err(Error::Precondition("radii must be strictly decreasing in (0, 1/2]".into()));
    }
    if slowdowns.iter().any(|k| !(*k > 0.0 && *k <= 1.0)) {
        return Err(Error::Precondition("slowdowns must lie in (0, 1]".into()));
    }
    let base = LinearToral::cat();
    let mut levels = Vec::with_capacity(radii.len());
    for (idx, (&r, &kappa)) in radii.iter().zip(slowdowns).enumerate() {
        let map = Arc::new(SlowedCatMap::new(base.clone(), r, kappa)?);
        let (a, c, lambda) = measure_constants(&map, idx + 1)?;
        levels.push(FamilyLevel { m: idx + 1, radius: r, kappa, map, complement_measure: PI * r * r, a, c, lambda });
    }

    // (i) f_m = f on A_m
    let mut deviation = 0.0_f64;
    let mut sampled_df = 0.0_f64;
    for level in &levels {
        let mut g = rng::stream(0xfa_0002, level.m as u64);
        let mut n = 0;
        while n < COINCIDENCE_SAMPLES {
            let x = TorusPoint::new(vec![g.gen::<f64>(), g.gen::<f64>()]);
            if !level.in_region(&x) {
                continue;
            }
            n += 1;
            deviation = deviation.max(crate::dynamics::torus_dist(&level.map.apply(&x), &base.apply(&x)));
            let y = point_in_ball(&mut g, level.radius);
            sampled_df = sampled_df.max(crate::linalg::spectral_norm(&level.map.derivative(&y)));
        }
    }
    if deviation > 1e-14 {
        return Err(family_error("coincide_on_region", format!("f_m differs from the base map by {deviation:e} on A_m")));
    }
    // (ii) uniform derivative bound
    let b = levels.iter().map(|l| l.map.regularity().c1).fold(0.0, f64::max);
    if !b.is_finite() || sampled_df > b * (1.0 + 1e-12) {
        return Err(family_error("uniform_derivative_bound", format!("sampled |Df_m| = {sampled_df} exceeds b = {b}")));
    }
    // (iii) uniform contraction
    let lambda = levels.iter().map(|l| l.lambda).fold(0.0, f64::max);
    if lambda >= 1.0 {
        return Err(family_error("uniform_contraction", format!("sup lambda_m = {lambda} is not below 1")));
    }
    // (iv) nested regions exhausting the torus up to the fixed point
    let regions_nested = levels.windows(2).all(|w| w[1].radius < w[0].radius);
    if !regions_nested {
        return Err(family_error("increasing_regions", "regions A_m are not increasing".into()));
    }
    Ok(AnosovFamily {
        base,
        levels,
        b,
        lambda,
        checks: FamilyChecks {
            coincidence_deviation: deviation,
            derivative_bound: b,
            derivative_sampled: sampled_df,
            lambda,
            regions_nested,
        },
        caveat: MEASURE_CAVEAT.into(),
    })
}

/// `value(m) = μ(A_m^c) log(a_m c_m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub values: Vec<(usize, f64)>,
    /// Strictly decreasing over the last half of the levels.
    pub decreasing_last_half: bool,
    pub decreasing: bool,
    /// `value(last) / value(first)`.
    pub last_first_ratio: f64,
    pub caveat: String,
}

impl CriterionReport {
    /// `m,value` rows.
    pub fn to_csv(&self, family: &AnosovFamily) -> String {
        let mut out = String::from("m,r,mu_complement,a,c,lambda,value\n");
        for ((m, v), l) in self.values.iter().zip(&family.levels) {
            out.push_str(&format!("{m},{:?},{:?},{:?},{:?},{:?},{v:?}\n", l.radius, l.complement_measure, l.a, l.c, l.lambda));
        }
        out
    }
}

pub fn boundary_criterion(family: &AnosovFamily) -> CriterionReport {
    let values: Vec<(usize, f64)> =
        family.levels.iter().map(|l| (l.m, l.complement_measure * (l.a * l.c).ln())).collect();
    let strictly = |s: &[(usize, f64)]| s.windows(2).all(|w| w[1].1 < w[0].1);
    let half = values.len() / 2;
    CriterionReport {
        decreasing_last_half: strictly(&values[half..]),
        decreasing: strictly(&values),
        last_first_ratio: values.last().unwrap().1 / values[0].1,
        values,
        caveat: family.caveat.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidenceStats {
    pub epsilon: f64,
    /// `(m_i, j_i)` with `j_i = ceil(ε/μ(A_{m_i}^c))`; levels whose `j_i` exceeds the horizon
    /// are left out.
    pub pairs: Vec<(usize, usize)>,
    /// Fraction of samples whose orbit window of half-length `j_i` stays in `A_{m_i}`.
    pub level_fractions: Vec<f64>,
    /// Fraction of samples passing at least two levels.
    pub estimate: f64,
    /// `1 − 4ε`.
    pub lower_bound: f64,
    pub samples: usize,
    pub seed: u64,
    pub horizon: usize,
    pub caveat: String,
}

/// Per-sample level outcomes: whether `f^{−j_i}(x), …, f^{j_i}(x)` all lie in `A_{m_i}`.
///
/// Orbits are computed with the base map: a window inside `A_m` is the same for `f_m` and
/// the base map, and the first excursion into the ball already fails the level.
pub fn residence_levels(family: &AnosovFamily, pairs: &[(usize, usize)], x: &TorusPoint) -> Vec<bool> {
    let jmax = pairs.iter().map(|p| p.1).max().unwrap_or(0);
    let base = family.limit();
    // running minimum of |f^k(x)| over |k| ≤ j
    let mut min_abs = vec![x.norm(); jmax + 1];
    let (mut fwd, mut bwd) = (x.clone(), x.clone());
    for j in 1..=jmax {
        fwd = base.apply(&fwd);
        bwd = base.apply_inverse(&bwd);
        min_abs[j] = min_abs[j - 1].min(fwd.norm()).min(bwd.norm());
    }
    pairs.iter().map(|&(m, j)| min_abs[j] >= family.level(m).expect("level").radius).collect()
}

/// Monte Carlo estimate of `μ(P_ε)` over Lebesgue-random points.
pub fn residence_statistics(family: &AnosovFamily, epsilon: f64, samples: usize, seed: u64, horizon: usize) -> Result<ResidenceStats> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1/4), got {epsilon}")));
    }
    if samples < 1000 {
        return Err(Error::Precondition(format!("residence statistics need at least 1000 samples, got {samples}")));
    }
    let pairs: Vec<(usize, usize)> = family
        .levels
        .iter()
        .map(|l| (l.m, (epsilon / l.complement_measure).ceil().max(1.0) as usize))
        .filter(|p| p.1 <= horizon)
        .collect();
    let outcomes: Vec<Vec<bool>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut g = rng::stream(seed, i);
            let x = TorusPoint::new(vec![g.gen::<f64>(), g.gen::<f64>()]);
            residence_levels(family, &pairs, &x)
        })
        .collect();
    let level_fractions = (0..pairs.len())
        .map(|t| outcomes.iter().filter(|o| o[t]).count() as f64 / samples as f64)
        .collect();
    let passing = outcomes.iter().filter(|o| o.iter().filter(|b| **b).count() >= 2).count();
    Ok(ResidenceStats {
        epsilon,
        pairs,
        level_fractions,
        estimate: passing as f64 / samples as f64,
        lower_bound: 1.0 - 4.0 * epsilon,
        samples,
        seed,
        horizon,
        caveat: family.caveat.clone(),
    })
}

/// Everything measured by [`invertibility_certificate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertibilityReport {
    pub level: usize,
    pub n: u32,
    pub n0: u32,
    pub delta: f64,
    pub epsilon: f64,
    /// `c = log 2b + log(4/(1 − λe^{1/n₀})) + 1/(2n₀)`.
    pub c: f64,
    /// `μ(A_m^c) log(a_m c_m) + c μ(A_m^c) + μ(A_m^c) log(1/δ)`.
    pub lhs: f64,
    /// `ε/(2n)`.
    pub rhs: f64,
    pub inequality_holds: bool,
    /// `||Υ^{(m)}||_{n,n}`.
    pub upsilon_norm: Option<f64>,
    /// `||Γ − Γ^{(m)}||_{2n,n}`.
    pub difference_norm: Option<f64>,
    /// `||Υ^{(m)}||_{n,n} ||Γ − Γ^{(m)}||_{2n,n}`.
    pub left_product: Option<f64>,
    /// `||(Γ − Γ^{(m)}) Υ^{(m)}||_{n,n}`.
    pub right_product: Option<f64>,
    pub numeric_holds: Option<bool>,
    /// `||Γ^{-1}||_n ≤ ||Υ^{(m)}||_n/(1 − δ)` on the window.
    pub neumann_sound: Option<bool>,
    pub passed: bool,
}

/// Least `n₀` with `λ e^{1/n₀} < 1`.
pub fn minimal_grade(lambda: f64) -> Result<u32> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Precondition(format!("contraction rate {lambda} outside (0, 1)")));
    }
    Ok((1.0 / -lambda.ln()).floor() as u32 + 1)
}

/// Certifies invertibility of Γ at `x` for the limit map from the level-`m` inverse.
///
/// The inequality is evaluated from the family constants; when it holds, the products
/// `||Υ^{(m)}|| ||Γ − Γ^{(m)}||` and `||(Γ − Γ^{(m)})Υ^{(m)}||` are measured on the window
/// `[−half, half]` through `x` and compared with `δ`.
#[allow(clippy::too_many_arguments)]
pub fn invertibility_certificate(
    family: &AnosovFamily,
    x: &TorusPoint,
    n: u32,
    delta: f64,
    epsilon: f64,
    m: usize,
    half: i64,
) -> Result<InvertibilityReport> {
    let level = family.level(m).ok_or_else(|| Error::Precondition(format!("no level {m} in the family")))?;
    let n0 = minimal_grade(family.lambda)?;
    if n < n0 {
        return Err(Error::Precondition(format!("grade n = {n} below n0 = {n0}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1), got {delta}")));
    }
    let q = family.lambda * (1.0 / n0 as f64).exp();
    let c = (2.0 * family.b).ln() + (4.0 / (1.0 - q)).ln() + 1.0 / (2.0 * n0 as f64);
    let mu = level.complement_measure;
    let lhs = mu * (level.a * level.c).ln() + c * mu + mu * (1.0 / delta).ln();
    let rhs = epsilon / (2.0 * n as f64);
    let mut report = InvertibilityReport {
        level: m,
        n,
        n0,
        delta,
        epsilon,
        c,
        lhs,
        rhs,
        inequality_holds: lhs < rhs,
        upsilon_norm: None,
        difference_norm: None,
        left_product: None,
        right_product: None,
        numeric_holds: None,
        neumann_sound: None,
        passed: false,
    };
    if !report.inequality_holds {
        return Ok(report);
    }
    let f = family.limit();
    let fm = level.map.as_ref();
    let iters = sweep_iters(level.kappa);
    let pad = half + iters as i64;
    let orbit = evolve(f, x, -pad, pad)?;
    let dfm: Vec<DMatrix<f64>> = orbit.points().iter().map(|p| fm.derivative(p)).collect();
    let grade = Grade::Finite(n);
    let frames = match splitting_from_cocycle(orbit.k_min(), &dfm, iters) {
        Ok(fr) => fr,
        Err(Error::DegenerateSplitting(_)) => {
            report.numeric_holds = Some(false);
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let w = Window::centered(half);
    let gamma = assemble_gamma(f, &orbit.restrict(f, w)?)?;
    let gamma_m = TransferOperator::from_cocycle(-half, dfm[iters..iters + 2 * half as usize].to_vec())?;
    let upsilon = splitting_inverse(&gamma_m, &frames, Grade::Infinity)?;
    let mut diff = MatrixRep::new(gamma.output_window(), gamma.input_window(), 2);
    for k in gamma.output_window().iter() {
        let blk = gamma_m.df(k - 1) - gamma.df(k - 1);
        if blk.abs().max() > 0.0 {
            diff.insert(k, k - 1, blk);
        }
    }
    let un = norm_upper(&upsilon.rep, grade, grade);
    let dn = norm_upper(&diff, Grade::Finite(2 * n), grade);
    let right = norm_upper(&diff.compose(&upsilon.rep)?, grade, grade);
    let numeric = un * dn < delta && right < delta;
    report.upsilon_norm = Some(un);
    report.difference_norm = Some(dn);
    report.left_product = Some(un * dn);
    report.right_product = Some(right);
    report.numeric_holds = Some(numeric);
    if numeric && right <= 0.5 {
        let (theta, _) = neumann_invert(&upsilon.rep, &gamma, grade, None)?;
        report.neumann_sound = Some(norm_upper(&theta.rep, grade, grade) <= un / (1.0 - delta) + 1e-12);
    }
    report.passed = numeric && report.neumann_sound.unwrap_or(false);
    Ok(report)
}

/// Fraction of `points` at which [`invertibility_certificate`] passes.
pub fn certificate_pass_rate(
    family: &AnosovFamily,
    points: &[TorusPoint],
    n: u32,
    delta: f64,
    epsilon: f64,
    m: usize,
    half: i64,
) -> Result<(f64, Vec<InvertibilityReport>)> {
    let reports: Vec<InvertibilityReport> = points
        .par_iter()
        .map(|x| invertibility_certificate(family, x, n, delta, epsilon, m, half))
        .collect::<Result<_>>()?;
    let rate = reports.iter().filter(|r| r.passed).count() as f64 / reports.len().max(1) as f64;
    Ok((rate, reports))
}
