//! Refinement of pseudo-orbits into true orbits by the contraction
//! `Φ_y(ξ) = ξ + Γ_y^{-1}(A_y(ξ) − ξ)`, `A_y(ξ)_k = f(y_{k−1} + ξ_{k−1}) − y_k`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{torus_diff, torus_dist, MapModel, OrbitWindow, TorusPoint};
use crate::error::{Error, Result};
use crate::inverse::{pesin_uniform_bound, InverseOperator, MinNormSolver};
use crate::operator::assemble_gamma;
use crate::seqspace::{Grade, TangentSequence, Window};

/// Defect at which the iteration stops.
pub const DEFECT_TOL: f64 = 1e-12;
/// Defect below which [`verify_shadowing`] accepts an orbit.
pub const VERIFY_TOL: f64 = 1e-10;

/// How `Γ_y^{-1}` is applied at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineMode {
    /// Apply the supplied inverse.
    #[default]
    Precomputed,
    /// Minimal-norm solve of `Γ_y δ = r` at every step.
    SolveEachStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowingConfig {
    pub kappa: f64,
    /// Bound `K` on the inverse.
    pub k_bound: f64,
    pub rho: f64,
    pub beta: f64,
    /// Grading distance.
    pub delta: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub mode: RefineMode,
}

fn default_max_iter() -> usize {
    50
}

/// Default contraction target.
pub const DEFAULT_KAPPA: f64 = 0.5;

impl ShadowingConfig {
    /// `ρ = Kβ/(1 − κ)`.
    pub fn from_inverse_bound(k_bound: f64, kappa: f64, beta: f64) -> Result<Self> {
        let rho = k_bound * beta / (1.0 - kappa);
        let cfg = ShadowingConfig { kappa, k_bound, rho, beta, delta: rho, max_iter: default_max_iter(), mode: RefineMode::Precomputed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: RefineMode) -> Self {
        self.mode = mode;
        self
    }

    /// Positivity and `Kβ ≤ (1 − κ)ρ`.
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa < 1.0) {
            return Err(Error::Config(format!("kappa must lie in (0, 1), got {}", self.kappa)));
        }
        for (name, v) in [("K", self.k_bound), ("rho", self.rho), ("beta", self.beta), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let lhs = self.k_bound * self.beta;
        let rhs = (1.0 - self.kappa) * self.rho;
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(Error::Precondition(format!(
                "beta_bound violated: K*beta = {lhs:e} exceeds (1 - kappa)*rho = {rhs:e}"
            )));
        }
        Ok(())
    }
}

/// `K = 4md³/(1 − e^{−1/n})`, `κ = 1/2`, `ρ = min(ρ_req, (κ/(K c2))^{1/α})`, `β = (1 − κ)ρ/K`.
pub fn shadowing_constants(model: &dyn MapModel, m: u32, n: Grade, rho_request: f64) -> Result<ShadowingConfig> {
    let Grade::Finite(nn) = n else {
        return Err(Error::Precondition("shadowing constants need a finite grade".into()));
    };
    if m == 0 || !(rho_request > 0.0) {
        return Err(Error::Precondition("need m ≥ 1 and rho_request > 0".into()));
    }
    let k_bound = pesin_uniform_bound(m, nn, model.dim());
    let kappa = DEFAULT_KAPPA;
    let reg = model.regularity();
    let rho = if reg.c2 > 0.0 { rho_request.min((kappa / (k_bound * reg.c2)).powf(1.0 / reg.alpha)) } else { rho_request };
    let beta = (1.0 - kappa) * rho / k_bound;
    Ok(ShadowingConfig { kappa, k_bound, rho, beta, delta: rho, max_iter: default_max_iter(), mode: RefineMode::Precomputed })
}

/// Result of [`refine`].
#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub orbit: OrbitWindow,
    pub offsets: TangentSequence,
    /// `sup_k |ξ_k|`.
    pub shadow_distance: f64,
    pub iterations: usize,
    /// `sup |A_y(ξ) − ξ|` before each step and after the last.
    pub defect_history: Vec<f64>,
    /// `sup |ξ^{t+1} − ξ^t|` per step.
    pub step_norms: Vec<f64>,
    /// Ratios of successive step norms.
    pub contraction_ratios: Vec<f64>,
    pub kappa_measured: f64,
    /// Edge margin excluded from the certified window.
    pub guard: usize,
    pub certified: Window,
    pub config: ShadowingConfig,
}

#[derive(Serialize)]
struct RefineRecord<'a> {
    beta: f64,
    rho: f64,
    kappa: f64,
    k_bound: f64,
    kappa_measured: f64,
    iterations: usize,
    guard: usize,
    certified_window: Window,
    shadow_distance: f64,
    final_defect: f64,
    defect_history: &'a [f64],
    step_norms: &'a [f64],
    mode: RefineMode,
}

impl RefineOutcome {
    pub fn final_defect(&self) -> f64 {
        *self.defect_history.last().expect("history is nonempty")
    }

    /// `{beta, rho, kappa_measured, iterations, guard, shadow_distance, …}`.
    pub fn certificate_json(&self) -> serde_json::Value {
        serde_json::to_value(RefineRecord {
            beta: self.config.beta,
            rho: self.config.rho,
            kappa: self.config.kappa,
            k_bound: self.config.k_bound,
            kappa_measured: self.kappa_measured,
            iterations: self.iterations,
            guard: self.guard,
            certified_window: self.certified,
            shadow_distance: self.shadow_distance,
            final_defect: self.final_defect(),
            defect_history: &self.defect_history,
            step_norms: &self.step_norms,
            mode: self.config.mode,
        })
        .expect("record serializes")
    }

    /// `step,defect` rows.
    pub fn defect_csv(&self) -> String {
        let mut out = String::from("step,defect\n");
        for (i, d) in self.defect_history.iter().enumerate() {
            out.push_str(&format!("{i},{d:?}\n"));
        }
        out
    }
}

/// `ceil(log 1e−12 / log λ_decay)` capped at half the window.
pub fn guard_width(inverse: &InverseOperator, window: Window) -> usize {
    let cap = (window.len().saturating_sub(1)) / 2;
    match inverse.certificate {
        Some(c) if c.lambda_decay > 0.0 && c.lambda_decay < 1.0 => {
            let g = (1e-12_f64.ln() / c.lambda_decay.ln()).ceil();
            (g.max(0.0) as usize).min(cap)
        }
        _ => cap,
    }
}

fn residual(model: &dyn MapModel, pseudo: &OrbitWindow, xi: &TangentSequence) -> Result<TangentSequence> {
    let w = pseudo.window();
    let d = pseudo.dim();
    let mut data = Vec::with_capacity((w.len() - 1) * d);
    for k in w.k_min + 1..=w.k_max {
        let prev = pseudo.point(k - 1).translate(xi.get(k - 1));
        let cur = pseudo.point(k).translate(xi.get(k));
        data.extend(torus_diff(&model.apply(&prev), &cur));
    }
    TangentSequence::from_flat(w.k_min + 1, d, data)
}

/// Iterates `Φ_y` from `ξ = 0` until the defect is at most 1e−12.
///
/// Errors: [`Error::ContractionViolated`] when the defect fails to decrease,
/// [`Error::RhoViolation`] when `sup|ξ|` leaves the ball of radius ρ, and
/// [`Error::NoConvergence`] after `max_iter` steps.
pub fn refine(model: &dyn MapModel, pseudo: &OrbitWindow, inverse: &InverseOperator, config: &ShadowingConfig) -> Result<RefineOutcome> {
    config.validate()?;
    let window = pseudo.window();
    if inverse.rep.rows() != window || inverse.rep.cols() != Window::new(window.k_min + 1, window.k_max) {
        return Err(Error::Dimension(format!(
            "inverse on {}×{} does not match pseudo-orbit window {}",
            inverse.rep.rows(),
            inverse.rep.cols(),
            window
        )));
    }
    if pseudo.defect() > config.beta {
        return Err(Error::Precondition(format!(
            "pseudo-orbit defect {:e} exceeds beta = {:e}",
            pseudo.defect(),
            config.beta
        )));
    }
    if inverse.bound > config.k_bound * (1.0 + 1e-9) {
        return Err(Error::Precondition(format!(
            "inverse bound {} exceeds configured K = {}",
            inverse.bound, config.k_bound
        )));
    }
    let solver = match config.mode {
        RefineMode::Precomputed => None,
        RefineMode::SolveEachStep => Some(MinNormSolver::new(&assemble_gamma(model, pseudo)?, inverse.grade_in)),
    };
    let d = pseudo.dim();
    let mut xi = TangentSequence::zeros(window, d);
    let mut r = residual(model, pseudo, &xi)?;
    let mut history = vec![r.sup_norm()];
    let mut steps = Vec::new();
    let mut ratios = Vec::new();
    let mut iterations = 0;
    while history[iterations] > DEFECT_TOL {
        if iterations == config.max_iter {
            return Err(Error::NoConvergence { iterations, defect: history[iterations] });
        }
        let delta = match &solver {
            None => inverse.apply(&r)?,
            Some(s) => s.solve(&r)?,
        };
        xi = xi.lin_comb(1.0, &delta, 1.0)?;
        iterations += 1;
        let step = delta.sup_norm();
        if let Some(prev) = steps.last() {
            ratios.push(step / prev);
        }
        steps.push(step);
        let norm = xi.iter().map(|(_, v)| v.iter().map(|c| c * c).sum::<f64>().sqrt()).fold(0.0, f64::max);
        if norm > config.rho {
            return Err(Error::RhoViolation { step: iterations, norm, rho: config.rho });
        }
        r = residual(model, pseudo, &xi)?;
        let current = r.sup_norm();
        let previous = history[iterations - 1];
        if current >= previous {
            return Err(Error::ContractionViolated { step: iterations, previous, current });
        }
        history.push(current);
    }
    let points: Vec<TorusPoint> = window.iter().map(|k| pseudo.point(k).translate(xi.get(k))).collect();
    let orbit = OrbitWindow::new(model, window.k_min, points)?;
    let shadow_distance = window.iter().map(|k| torus_dist(orbit.point(k), pseudo.point(k))).fold(0.0, f64::max);
    let guard = guard_width(inverse, window);
    let certified = Window::new(window.k_min + guard as i64, window.k_max - guard as i64);
    Ok(RefineOutcome {
        orbit,
        offsets: xi,
        shadow_distance,
        iterations,
        defect_history: history,
        step_norms: steps,
        kappa_measured: ratios.iter().copied().fold(0.0, f64::max),
        contraction_ratios: ratios,
        guard,
        certified,
        config: *config,
    })
}

/// Refines several pseudo-orbits in parallel.
pub fn refine_many(
    model: &dyn MapModel,
    jobs: &[(OrbitWindow, InverseOperator)],
    config: &ShadowingConfig,
) -> Vec<Result<RefineOutcome>> {
    jobs.par_iter().map(|(p, inv)| refine(model, p, inv, config)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShadowingVerification {
    pub passed: bool,
    pub defect: f64,
    pub max_distance: f64,
}

/// Passes iff `defect(orbit) ≤ 1e−10` and `max_k dist(x_k, y_k) ≤ ρ`.
pub fn verify_shadowing(model: &dyn MapModel, orbit: &OrbitWindow, pseudo: &OrbitWindow, rho: f64) -> Result<ShadowingVerification> {
    if orbit.window() != pseudo.window() {
        return Err(Error::Dimension(format!("orbit on {} and pseudo-orbit on {}", orbit.window(), pseudo.window())));
    }
    let defect = crate::dynamics::defect(model, orbit.points());
    let max_distance = orbit.window().iter().map(|k| torus_dist(orbit.point(k), pseudo.point(k))).fold(0.0, f64::max);
    Ok(ShadowingVerification { passed: defect <= VERIFY_TOL && max_distance <= rho, defect, max_distance })
}

/// One row of the shadowable-set table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowableEntry {
    pub level: u32,
    pub r: u32,
    pub delta: f64,
    pub beta: f64,
    pub rho: f64,
    pub k_bound: f64,
}

/// `δ` and `β` actually used for each Pesin pair `(m, r)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ShadowableTable {
    pub entries: Vec<ShadowableEntry>,
}

impl ShadowableTable {
    pub fn record(&mut self, level: u32, r: u32, config: &ShadowingConfig) {
        self.entries.retain(|e| (e.level, e.r) != (level, r));
        self.entries.push(ShadowableEntry { level, r, delta: config.delta, beta: config.beta, rho: config.rho, k_bound: config.k_bound });
        self.entries.sort_by_key(|e| (e.level, e.r));
    }

    pub fn get(&self, level: u32, r: u32) -> Option<&ShadowableEntry> {
        self.entries.iter().find(|e| (e.level, e.r) == (level, r))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,r,delta,beta,rho,K\n");
        for e in &self.entries {
            out.push_str(&format!("{},{},{:?},{:?},{:?},{:?}\n", e.level, e.r, e.delta, e.beta, e.rho, e.k_bound));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, pseudo_orbit, LinearToral};
    use crate::inverse::splitting_inverse;
    use crate::splitting::compute_splitting;
    use approx::assert_relative_eq;

    fn cat_inverse_along(pseudo: &OrbitWindow) -> InverseOperator {
        // frames from the pseudo-orbit's own (constant) cocycle
        let cat = LinearToral::cat();
        let w = pseudo.window();
        let ext = evolve(&cat, pseudo.point(w.k_min), w.k_min - 30, w.k_max + 30).unwrap();
        let frames = compute_splitting(&cat, &ext, 30).unwrap();
        let gamma = assemble_gamma(&cat, pseudo).unwrap();
        splitting_inverse(&gamma, &frames, Grade::Infinity).unwrap()
    }

    #[test]
    fn constants_arithmetic() {
        let cat = LinearToral::cat();
        let c = shadowing_constants(&cat, 3, Grade::Finite(4), 1e-3).unwrap();
        assert_relative_eq!(c.k_bound, 434.0, epsilon = 0.05);
        assert_relative_eq!(c.beta, 1.152e-6, max_relative = 1e-3);
        assert_relative_eq!(c.k_bound * c.beta / (1.0 - c.kappa), c.rho, max_relative = 1e-14);
        assert!(shadowing_constants(&cat, 3, Grade::Infinity, 1e-3).is_err());
    }

    #[test]
    fn true_orbit_needs_no_iteration() {
        let cat = LinearToral::cat();
        let o = evolve(&cat, &TorusPoint::new(vec![0.2, 0.3]), 0, 60).unwrap();
        let inv = cat_inverse_along(&o);
        let cfg = ShadowingConfig::from_inverse_bound(inv.bound, 0.5, 1e-6).unwrap();
        let out = refine(&cat, &o, &inv, &cfg).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.offsets.sup_norm(), 0.0);
    }

    #[test]
    fn cat_refines_in_one_step() {
        let cat = LinearToral::cat();
        let beta = 1e-6;
        let p = pseudo_orbit(&cat, &TorusPoint::new(vec![0.41, 0.13]), 0, 199, beta, 11).unwrap();
        let inv = cat_inverse_along(&p);
        let cfg = ShadowingConfig::from_inverse_bound(inv.bound, 0.5, beta).unwrap();
        let out = refine(&cat, &p, &inv, &cfg).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.final_defect() <= 1e-12);
        assert!(out.shadow_distance <= 5f64.sqrt() * beta * 1.05);
        assert!(verify_shadowing(&cat, &out.orbit, &p, cfg.rho).unwrap().passed);
    }

    #[test]
    fn modes_agree_in_the_interior() {
        let cat = LinearToral::cat();
        let beta = 1e-6;
        let p = pseudo_orbit(&cat, &TorusPoint::new(vec![0.7, 0.05]), 0, 99, beta, 4).unwrap();
        let inv = cat_inverse_along(&p);
        let cfg = ShadowingConfig::from_inverse_bound(inv.bound, 0.5, beta).unwrap();
        let a = refine(&cat, &p, &inv, &cfg).unwrap();
        let b = refine(&cat, &p, &inv, &cfg.with_mode(RefineMode::SolveEachStep)).unwrap();
        for k in a.certified.iter() {
            assert!(torus_dist(a.orbit.point(k), b.orbit.point(k)) < 1e-12);
        }
    }

    #[test]
    fn beta_bound_and_rho_errors() {
        let bad = ShadowingConfig { kappa: 0.5, k_bound: 10.0, rho: 1e-3, beta: 1e-3, delta: 1e-3, max_iter: 10, mode: RefineMode::Precomputed };
        assert!(matches!(bad.validate(), Err(Error::Precondition(m)) if m.contains("beta_bound")));
        let cat = LinearToral::cat();
        let p = pseudo_orbit(&cat, &TorusPoint::new(vec![0.3, 0.3]), 0, 59, 1e-6, 2).unwrap();
        let inv = cat_inverse_along(&p);
        // an understated bound gives a ρ smaller than the actual offsets
        let mut lying = inv.clone();
        lying.bound = 0.1;
        let cfg = ShadowingConfig::from_inverse_bound(0.1, 0.5, 1e-6).unwrap();
        assert!(matches!(refine(&cat, &p, &lying, &cfg), Err(Error::RhoViolation { .. })));
        let strict = ShadowingConfig::from_inverse_bound(inv.bound, 0.5, 1e-9).unwrap();
        assert!(matches!(refine(&cat, &p, &inv, &strict), Err(Error::Precondition(_))));
    }

    #[test]
    fn verify_detects_displacement() {
        let cat = LinearToral::cat();
        let o = evolve(&cat, &TorusPoint::new(vec![0.2, 0.3]), 0, 20).unwrap();
        let rho = 1e-4;
        assert!(verify_shadowing(&cat, &o, &o, rho).unwrap().passed);
        let mut pts = o.points().to_vec();
        pts[7] = pts[7].translate(&[2.0 * rho, 0.0]);
        let moved = OrbitWindow::new(&cat, 0, pts).unwrap();
        assert!(!verify_shadowing(&cat, &moved, &o, rho).unwrap().passed);
    }

    #[test]
    fn table_roundtrip() {
        let mut t = ShadowableTable::default();
        let c = ShadowingConfig::from_inverse_bound(3.0, 0.5, 1e-6).unwrap();
        t.record(3, 10, &c);
        t.record(3, 10, &c);
        t.record(2, 5, &c);
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.entries[0].level, 2);
        assert!(t.to_csv().starts_with("level,r,delta,beta,rho,K\n2,5,"));
    }
}
