use std::fs::File;
use std::path::Path;
use std::sync::Arc;

use hypshadow::boundary::{
    boundary_criterion, build_slowed_family, certificate_pass_rate, minimal_grade, residence_statistics,
};
use hypshadow::diagnostics::{mather_test, nonuniform_proxy, Sampler};
use hypshadow::inverse::{
    approximate_inverse, central_inverses, fit_decay_rate, graded_to_uniform_bound, neumann_invert, splitting_inverse,
    MinNormSolver,
};
use hypshadow::linalg::spectral_norm;
use hypshadow::operator::{assemble_gamma, induced_norm_estimate, norm_lower, norm_upper};
use hypshadow::shadowing::{refine, verify_shadowing, ShadowingConfig};
use hypshadow::splitting::compute_splitting;
use hypshadow::{
    evolve, pseudo_orbit, Error, Grade, InverseOperator, MapModel, OrbitWindow, Result, TorusPoint, TransferOperator,
    Window,
};
use serde_json::{json, Value};

use crate::config::{BoundaryConfig, DiagnoseConfig, DiagnoseTest, InverseConfig, InverseMethod, NormsConfig, ShadowConfig};

/// Result section of the record plus CSV tables keyed by file suffix.
pub struct Artifacts {
    pub result: Value,
    pub tables: Vec<(&'static str, String)>,
}

fn point(model: &dyn MapModel, coords: &[f64]) -> Result<TorusPoint> {
    if coords.len() != model.dim() {
        return Err(Error::Config(format!("x0 has {} coordinates, model dimension is {}", coords.len(), model.dim())));
    }
    Ok(TorusPoint::new(coords.to_vec()))
}

pub fn diagnose(cfg: &DiagnoseConfig) -> Result<Artifacts> {
    let model = cfg.model.build()?;
    let sampler = match &cfg.points {
        Some(p) => Sampler::Points { points: p.clone() },
        None => Sampler::Lebesgue { samples: cfg.samples, seed: cfg.seed },
    };
    let report = match cfg.test {
        DiagnoseTest::Mather => {
            let pts = sampler.points(model.dim());
            let mut r = mather_test(model.as_ref(), &pts, cfg.grade, &cfg.k_list, &cfg.options)?;
            r.sampler = sampler.describe();
            r
        }
        DiagnoseTest::Nonuniform => {
            let low = cfg.grade_low.ok_or_else(|| Error::Config("the nonuniform test needs `grade_low`".into()))?;
            nonuniform_proxy(model.as_ref(), &sampler, cfg.grade, low, &cfg.k_list, &cfg.options)?
        }
    };
    let result = json!({
        "verdict": report.verdict,
        "max_growth": report.max_growth(),
        "proxy_spread": report.proxy_spread(),
        "report": report,
    });
    Ok(Artifacts { result, tables: vec![("proxy.csv", report.proxy_csv())] })
}

/// Pseudo-orbit extended by `pad` true-orbit points on each side, for the splitting sweeps.
fn padded(model: &dyn MapModel, pseudo: &OrbitWindow, pad: usize) -> Result<OrbitWindow> {
    let pad = pad as i64;
    let left = evolve(model, pseudo.point(pseudo.k_min()), -pad, 0)?;
    let right = evolve(model, pseudo.point(pseudo.k_max()), 0, pad)?;
    let mut pts: Vec<TorusPoint> = left.points()[..pad as usize].to_vec();
    pts.extend_from_slice(pseudo.points());
    pts.extend_from_slice(&right.points()[1..]);
    OrbitWindow::new(model, pseudo.k_min() - pad, pts)
}

fn load_pseudo(cfg: &ShadowConfig, model: &dyn MapModel, base: &Path) -> Result<OrbitWindow> {
    match (&cfg.pseudo_orbit, &cfg.generate) {
        (Some(_), Some(_)) => Err(Error::Config("give only one of `pseudo_orbit` and `generate`".into())),
        (Some(p), None) => OrbitWindow::read_csv(model, File::open(base.join(p))?),
        (None, Some(g)) => pseudo_orbit(model, &point(model, &g.x0)?, g.k_min, g.k_max, g.beta_target, cfg.seed),
        (None, None) => Err(Error::Config("missing required fields for `shadow`: one of pseudo_orbit, generate".into())),
    }
}

fn shadow_inverse(cfg: &ShadowConfig, model: &dyn MapModel, pseudo: &OrbitWindow, gamma: &TransferOperator) -> Result<(InverseOperator, Value)> {
    Ok(match cfg.inverse {
        InverseMethod::Splitting => {
            let frames = compute_splitting(model, &padded(model, pseudo, cfg.splitting_iters)?, cfg.splitting_iters)?;
            (splitting_inverse(gamma, &frames, cfg.grade)?, json!({ "splitting": frames.constants }))
        }
        InverseMethod::MinNorm => (MinNormSolver::new(gamma, cfg.grade).to_inverse()?, Value::Null),
        InverseMethod::Neumann => {
            let pesin = central_inverses(model, pseudo, cfg.pesin_half, cfg.splitting_iters, cfg.grade)?;
            let approx = approximate_inverse(model, &pesin, pseudo, cfg.approx, cfg.grade)?;
            let (theta, terms) = neumann_invert(&approx.theta, gamma, cfg.grade, Some(approx.level))?;
            let info = json!({
                "neumann_terms": terms,
                "level": approx.level,
                "d_q": approx.d_q,
                "e_p": approx.e_p,
                "left_budget": approx.left,
                "right_budget": approx.right,
            });
            (theta, info)
        }
    })
}

pub fn shadow(cfg: &ShadowConfig, base: &Path) -> Result<Artifacts> {
    let model: Arc<dyn MapModel> = cfg.model.build()?;
    let pseudo = load_pseudo(cfg, model.as_ref(), base)?;
    let gamma = assemble_gamma(model.as_ref(), &pseudo)?;
    let (inverse, inverse_info) = shadow_inverse(cfg, model.as_ref(), &pseudo, &gamma)?;
    let beta = cfg.beta.unwrap_or_else(|| pseudo.defect().max(1e-15));
    let mut sc = match cfg.rho {
        Some(rho) => {
            let sc = ShadowingConfig { kappa: cfg.kappa, k_bound: inverse.bound, rho, beta, delta: rho, max_iter: cfg.max_iter, mode: cfg.mode };
            sc.validate()?;
            sc
        }
        None => ShadowingConfig::from_inverse_bound(inverse.bound, cfg.kappa, beta)?,
    };
    sc.max_iter = cfg.max_iter;
    sc.mode = cfg.mode;
    let out = refine(model.as_ref(), &pseudo, &inverse, &sc)?;
    let verification = verify_shadowing(model.as_ref(), &out.orbit, &pseudo, sc.rho)?;
    let mut orbit_csv = Vec::new();
    out.orbit.write_csv(&mut orbit_csv)?;
    let result = json!({
        "pseudo_orbit_defect": pseudo.defect(),
        "window": pseudo.window(),
        "certificate": out.certificate_json(),
        "inverse": inverse.certificate_json(),
        "inverse_construction": inverse_info,
        "verification": verification,
    });
    Ok(Artifacts {
        result,
        tables: vec![("orbit.csv", String::from_utf8(orbit_csv).expect("csv is utf-8")), ("defects.csv", out.defect_csv())],
    })
}

pub fn boundary(cfg: &BoundaryConfig) -> Result<Artifacts> {
    let family = build_slowed_family(&cfg.radii, &cfg.slowdowns)?;
    let criterion = boundary_criterion(&family);
    let residence = residence_statistics(&family, cfg.epsilon, cfg.samples, cfg.seed, cfg.horizon)?;
    let n0 = minimal_grade(family.lambda)?;
    let n = cfg.n.unwrap_or(n0);
    let pts = Sampler::Lebesgue { samples: cfg.certificate_points, seed: cfg.seed }.points(2);
    let deepest = family.deepest().m;
    let (rate, reports) = certificate_pass_rate(&family, &pts, n, cfg.delta, cfg.epsilon, deepest, cfg.certificate_half)?;
    let result = json!({
        "family": family.to_json(),
        "criterion": criterion,
        "residence": residence,
        "certificate": {
            "level": deepest,
            "n": n,
            "n0": n0,
            "pass_rate": rate,
            "points": pts.len(),
            "reports": reports,
        },
    });
    Ok(Artifacts { result, tables: vec![("criterion.csv", criterion.to_csv(&family))] })
}

fn gamma_and_inverse(
    model: &dyn MapModel,
    x0: &[f64],
    half: i64,
    iters: usize,
    grade: Grade,
    method: InverseMethod,
) -> Result<(TransferOperator, InverseOperator)> {
    if half < 1 {
        return Err(Error::Config(format!("half must be >= 1, got {half}")));
    }
    let x = point(model, x0)?;
    let pad = half + iters as i64;
    let orbit = evolve(model, &x, -pad, pad)?;
    let gamma = assemble_gamma(model, &orbit.restrict(model, Window::centered(half))?)?;
    let inverse = match method {
        InverseMethod::Splitting => splitting_inverse(&gamma, &compute_splitting(model, &orbit, iters)?, grade)?,
        InverseMethod::MinNorm => MinNormSolver::new(&gamma, grade).to_inverse()?,
        InverseMethod::Neumann => {
            return Err(Error::Config("method `neumann` needs a pseudo-orbit; use the `shadow` command".into()))
        }
    };
    Ok((gamma, inverse))
}

pub fn inverse(cfg: &InverseConfig) -> Result<Artifacts> {
    let model = cfg.model.build()?;
    let (gamma, inv) = gamma_and_inverse(model.as_ref(), &cfg.x0, cfg.half, cfg.splitting_iters, cfg.grade, cfg.method)?;
    let right = gamma.to_rep().compose(&inv.rep)?.minus_identity()?.max_block_norm(|_, _| true);
    let offsets = cfg.decay_offsets.min(cfg.half);
    let mut decay = String::from("offset,block_norm\n");
    for j in -offsets..=offsets {
        if inv.rep.cols().contains(j) {
            decay.push_str(&format!("{j},{:?}\n", spectral_norm(&inv.rep.block(0, j))));
        }
    }
    let result = json!({
        "certificate": inv.certificate_json(),
        "induced_estimate": induced_norm_estimate(&inv.rep, cfg.grade),
        "norm_lower": norm_lower(&inv.rep, cfg.grade),
        "norm_upper": norm_upper(&inv.rep, cfg.grade, cfg.grade),
        "fitted_decay_rate": fit_decay_rate(&inv.rep, 0, offsets),
        "right_identity_defect": right,
    });
    Ok(Artifacts { result, tables: vec![("decay.csv", decay)] })
}

pub fn norms(cfg: &NormsConfig) -> Result<Artifacts> {
    let model = cfg.model.build()?;
    let d = model.dim();
    let mut csv = String::from("grade,operator,lower,estimate,upper,uniform_from_graded\n");
    let mut rows = Vec::new();
    // Υ does not depend on the grade, only its recorded bound does
    let (gamma, inv) = gamma_and_inverse(model.as_ref(), &cfg.x0, cfg.half, cfg.splitting_iters, Grade::Infinity, InverseMethod::Splitting)?;
    let reps = [("gamma", gamma.to_rep()), ("inverse", inv.rep)];
    for &g in &cfg.grades {
        for (name, rep) in &reps {
            let lower = norm_lower(rep, g);
            let estimate = induced_norm_estimate(rep, g);
            let upper = norm_upper(rep, g, g);
            let uniform = match g {
                Grade::Finite(n) if *name == "inverse" => Some(graded_to_uniform_bound(estimate, n, d)),
                _ => None,
            };
            let u = uniform.map(|v| format!("{v:?}")).unwrap_or_default();
            csv.push_str(&format!("{g},{name},{lower:?},{estimate:?},{upper:?},{u}\n"));
            rows.push(json!({ "grade": g, "operator": name, "lower": lower, "estimate": estimate, "upper": upper, "uniform_from_graded": uniform }));
        }
    }
    Ok(Artifacts { result: json!({ "norms": rows }), tables: vec![("norms.csv", csv)] })
}
