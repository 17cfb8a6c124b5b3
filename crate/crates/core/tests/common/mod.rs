#![allow(dead_code)]

use std::collections::BTreeMap;

use hypshadow::diagnostics::{mather_test, DiagnosticOptions, Sampler};
use hypshadow::inverse::{
    approximate_inverse, central_inverses, minimal_norm_solve, neumann_invert, splitting_inverse, ApproxInverseParams,
    PesinSite,
};
use hypshadow::operator::{assemble_gamma, induced_norm_estimate, norm_lower, norm_upper};
use hypshadow::seqspace::{shift, weighted_norm};
use hypshadow::shadowing::{refine, RefineOutcome, ShadowingConfig};
use hypshadow::splitting::compute_splitting;
use hypshadow::{
    evolve, pseudo_orbit, BudgetTerm, Error, Grade, InverseOperator, LinearToral, MapModel, MatrixRep, OrbitWindow,
    Side, SlowedCatMap, SplittingFrames, StandardMap, TangentSequence, TorusPoint, TransferOperator, Window,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const SLOWED_RADIUS: f64 = 0.2;

/// Γ, frames and splitting inverse along the orbit of `x` on `[−half, half]`.
pub fn inverse_along(model: &dyn MapModel, x: &TorusPoint, half: i64, iters: usize, grade: Grade) -> (TransferOperator, SplittingFrames, InverseOperator) {
    let pad = half + iters as i64;
    let orbit = evolve(model, x, -pad, pad).unwrap();
    let frames = compute_splitting(model, &orbit, iters).unwrap();
    let gamma = assemble_gamma(model, &orbit.restrict(model, Window::centered(half)).unwrap()).unwrap();
    let inv = splitting_inverse(&gamma, &frames, grade).unwrap();
    (gamma, frames, inv)
}

/// Cat-map pseudo-orbit of length `len` refined with the splitting inverse of its cocycle.
pub fn cat_shadow(beta: f64, len: i64, seed: u64) -> (OrbitWindow, RefineOutcome, InverseOperator) {
    let cat = LinearToral::cat();
    let pseudo = pseudo_orbit(&cat, &TorusPoint::new(vec![0.37, 0.71]), 0, len - 1, beta, seed).unwrap();
    let ext = evolve(&cat, pseudo.point(0), -30, len + 29).unwrap();
    let frames = compute_splitting(&cat, &ext, 30).unwrap();
    let gamma = assemble_gamma(&cat, &pseudo).unwrap();
    let inv = splitting_inverse(&gamma, &frames, Grade::Infinity).unwrap();
    let cfg = ShadowingConfig::from_inverse_bound(inv.bound, 0.5, beta).unwrap();
    let out = refine(&cat, &pseudo, &inv, &cfg).unwrap();
    (pseudo, out, inv)
}

/// Slowed-map pseudo-orbit starting near the fixed point, refined through graded reference
/// inverses, the approximate inverse and Neumann inversion.
pub fn slowed_shadow(kappa: f64, beta: f64, len: i64, seed: u64) -> Result<(SlowedCatMap, OrbitWindow, RefineOutcome, InverseOperator), Error> {
    let f = SlowedCatMap::arnold(SLOWED_RADIUS, kappa)?;
    let pseudo = pseudo_orbit(&f, &TorusPoint::new(vec![0.03, 0.01]), 0, len - 1, beta, seed)?;
    let iters = ((28.0 / (2.0 * kappa * 0.9624)).ceil() as usize).max(40);
    let pesin = central_inverses(&f, &pseudo, 64, iters, Grade::Infinity)?;
    let approx = approximate_inverse(&f, &pesin, &pseudo, ApproxInverseParams { damping: 0.99, p: 32, q: 64, guard: 16 }, Grade::Infinity)?;
    let gamma = assemble_gamma(&f, &pseudo)?;
    let (theta, _) = neumann_invert(&approx.theta, &gamma, Grade::Infinity, Some(approx.level))?;
    let cfg = ShadowingConfig::from_inverse_bound(theta.bound, 0.5, beta)?;
    let out = refine(&f, &pseudo, &theta, &cfg)?;
    Ok((f, pseudo, out, theta))
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn err(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn grade_strategy() -> impl Strategy<Value = Grade> {
    prop_oneof![(1u32..12).prop_map(Grade::Finite), Just(Grade::Infinity)]
}

fn point_strategy() -> impl Strategy<Value = TorusPoint> {
    (0.0f64..1.0, 0.0f64..1.0).prop_map(|(a, b)| TorusPoint::new(vec![a, b]))
}

fn model_for(which: u8, k: f64) -> Box<dyn MapModel> {
    match which % 2 {
        0 => Box::new(LinearToral::cat()),
        _ => Box::new(StandardMap::new(k).unwrap()),
    }
}

/// Random block matrix on `[-h, h] × [-h, h]`.
fn rep_strategy() -> impl Strategy<Value = MatrixRep> {
    (1i64..5, prop::collection::vec(-2.0f64..2.0, 4 * 81)).prop_map(|(h, vals)| {
        let w = Window::centered(h);
        let mut rep = MatrixRep::new(w, w, 2);
        let mut it = vals.chunks(4);
        for i in w.iter() {
            for j in w.iter() {
                let c = it.next().unwrap();
                rep.insert(i, j, DMatrix::from_row_slice(2, 2, c));
            }
        }
        rep
    })
}

/// Sequence norms increase with the grade up to the sup-norm, and every operator norm
/// estimate is sandwiched by the lower and upper block bounds.
pub fn prop_norm_grading_chain(cases: u32) -> Result<(), String> {
    let seqs = (1i64..20, prop::collection::vec(-5.0f64..5.0, 2 * 41), 1u32..10);
    runner(cases)
        .run(&(seqs, rep_strategy(), grade_strategy()), |((h, vals, n), rep, g)| {
            let w = Window::centered(h);
            let s = TangentSequence::from_flat(w.k_min, 2, vals[..w.len() * 2].to_vec()).map_err(err)?;
            let chain = [Grade::Finite(n), Grade::Finite(2 * n), Grade::Finite(4 * n), Grade::Infinity];
            let norms: Vec<f64> = chain.iter().map(|c| weighted_norm(&s, c).unwrap()).collect();
            for p in norms.windows(2) {
                prop_assert!(p[0] <= p[1] * (1.0 + 1e-15), "{norms:?}");
            }
            let lo = norm_lower(&rep, g);
            let mid = induced_norm_estimate(&rep, g);
            let hi = norm_upper(&rep, g, g);
            prop_assert!(lo <= mid * (1.0 + 1e-12) && mid <= hi * (1.0 + 1e-12), "{lo} {mid} {hi}");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Γ and its splitting inverse commute with re-indexing the orbit.
pub fn prop_shift_conjugation(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(point_strategy(), -20i64..20, 2i64..6, any::<u8>(), 0.2f64..0.9), |(x, j, h, which, k)| {
            let model = model_for(which, k);
            let pad = h + 24;
            let orbit = evolve(model.as_ref(), &x, -pad, pad).map_err(err)?;
            let frames = match compute_splitting(model.as_ref(), &orbit, 24) {
                Ok(f) => f,
                Err(Error::DegenerateSplitting(_)) => return Ok(()),
                Err(e) => return Err(err(e)),
            };
            let core = orbit.restrict(model.as_ref(), Window::centered(h)).map_err(err)?;
            let gamma = assemble_gamma(model.as_ref(), &core).map_err(err)?;
            let moved = assemble_gamma(model.as_ref(), &core.reindexed(-j)).map_err(err)?;
            prop_assert_eq!(&moved, &gamma.shift_conjugate(j));
            let eta = TangentSequence::new(-h, (0..2 * h + 1).map(|t| vec![(t as f64).sin(), 0.5]).collect()).map_err(err)?;
            let lhs = moved.apply(&shift(&eta, -j)).map_err(err)?;
            let rhs = shift(&gamma.apply(&eta).map_err(err)?, -j);
            prop_assert_eq!(lhs, rhs);
            let inv = match splitting_inverse(&gamma, &frames, Grade::Infinity) {
                Ok(i) => i,
                Err(Error::GradeTooCoarse(_)) => return Ok(()),
                Err(e) => return Err(err(e)),
            };
            let inv_moved = splitting_inverse(&moved, &frames.reindexed(-j), Grade::Infinity).map_err(err)?;
            prop_assert_eq!(inv_moved.rep, inv.rep.shift_conjugate(j));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Tangent orbits are annihilated by Γ and Γ has full row rank, so they make up its kernel.
pub fn prop_kernel_is_tangent_orbits(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(point_strategy(), 1i64..8, any::<u8>(), 0.2f64..2.0, -1.0f64..1.0, -1.0f64..1.0), |(x, h, which, k, a, b)| {
            let model = model_for(which, k);
            let orbit = evolve(model.as_ref(), &x, -h, h).map_err(err)?;
            let gamma = assemble_gamma(model.as_ref(), &orbit).map_err(err)?;
            let mut v = nalgebra::DVector::from_vec(vec![a, b]);
            let mut vecs = vec![v.as_slice().to_vec()];
            for t in -h..h {
                v = gamma.df(t) * v;
                vecs.push(v.as_slice().to_vec());
            }
            let tangent = TangentSequence::new(-h, vecs).map_err(err)?;
            let scale = tangent.sup_norm().max(1.0);
            prop_assert!(gamma.apply(&tangent).map_err(err)?.sup_norm() <= 1e-12 * scale);
            let sv = gamma.to_dense().singular_values();
            prop_assert!(sv.min() > 1e-8, "rank deficient: {}", sv.min());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Minimal-norm solutions satisfy `Γξ = rhs` to 1e−10 relative.
pub fn prop_min_norm_feasible(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(
            &(point_strategy(), 2i64..12, any::<u8>(), 0.2f64..2.0, prop_oneof![(2u32..12).prop_map(Grade::Finite), Just(Grade::Infinity)], prop::collection::vec(-1.0f64..1.0, 48)),
            |(x, h, which, k, g, vals)| {
                let model = model_for(which, k);
                let orbit = evolve(model.as_ref(), &x, -h, h).map_err(err)?;
                let gamma = assemble_gamma(model.as_ref(), &orbit).map_err(err)?;
                let rhs = TangentSequence::from_flat(-h + 1, 2, vals[..4 * h as usize].to_vec()).map_err(err)?;
                let xi = minimal_norm_solve(&gamma, &rhs, g).map_err(err)?;
                let res = gamma.apply(&xi).map_err(err)?.lin_comb(1.0, &rhs, -1.0).map_err(err)?.sup_norm();
                prop_assert!(res <= 1e-10 * rhs.sup_norm().max(1e-300), "residual {res}");
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

pub struct BudgetFixture {
    pub pseudo: OrbitWindow,
    pub pesin: BTreeMap<i64, PesinSite>,
}

pub fn budget_fixture() -> BudgetFixture {
    let cat = LinearToral::cat();
    let pseudo = pseudo_orbit(&cat, &TorusPoint::new(vec![0.21, 0.64]), 0, 59, 1e-6, 5).unwrap();
    let pesin = central_inverses(&cat, &pseudo, 40, 20, Grade::Infinity).unwrap();
    BudgetFixture { pseudo, pesin }
}

/// A rejected approximate inverse names the largest budget term of the failing side, and
/// that term exceeds 1/8. For the cat map the closeness term vanishes and continuity is at
/// rounding level, so the expected name is the larger of the closed-form tail and damping.
pub fn prop_budget_errors_name_term(cases: u32, fx: &BudgetFixture) -> Result<(), String> {
    let cat = LinearToral::cat();
    let c1 = cat.regularity().c1;
    let level = fx.pesin.values().map(|s| s.inverse.bound.ceil()).fold(1.0, f64::max);
    let c3 = Grade::Infinity.ratio_bound() * level * 2.0 * 2f64.sqrt();
    runner(cases)
        .run(&(0.05f64..0.999, 1usize..40, 1usize..40), |(damping, p, q)| {
            let params = ApproxInverseParams { damping, p, q, guard: 10 };
            match approximate_inverse(&cat, &fx.pesin, &fx.pseudo, params, Grade::Infinity) {
                Ok(a) => {
                    prop_assert!(a.left.measured_defect <= 0.5 && a.right.measured_defect <= 0.5);
                }
                Err(Error::PseudoOrbitTooFar { side, measured, term, value }) => {
                    prop_assert!(measured > 0.5);
                    prop_assert!(value > 0.125, "{side} {term} {value}");
                    let damp = c1 * (1.0 - damping) * c3;
                    let tail = match side {
                        Side::Left => damping.powi(q as i32) * 2.0 * c1 * c3,
                        Side::Right => damping.powi(p as i32) * (2.0 * c1 * c3 + 2.0 * level),
                    };
                    if (tail - damp).abs() > 1e-9 * tail.max(damp) {
                        let expected = if tail > damp { BudgetTerm::Tail } else { BudgetTerm::Damping };
                        prop_assert_eq!(term, expected, "{} tail {} damping {}", side, tail, damp);
                        prop_assert!((value - tail.max(damp)).abs() <= 1e-12 * value);
                    }
                }
                Err(e) => return Err(err(e)),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Two runs with the same seed serialize to identical bytes.
pub fn prop_reruns_identical(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(any::<u64>(), point_strategy()), |(seed, x)| {
            let cat = LinearToral::cat();
            let run = || -> Result<String, Error> {
                let p = pseudo_orbit(&cat, &x, -10, 10, 1e-3, seed)?;
                let pts = Sampler::Lebesgue { samples: 1, seed }.points(2);
                let rep = mather_test(&cat, &pts, Grade::Infinity, &[2, 4, 8], &DiagnosticOptions::default())?;
                Ok(format!("{}{}", p.to_json(), serde_json::to_string(&rep)?))
            };
            prop_assert_eq!(run().map_err(err)?, run().map_err(err)?);
            Ok(())
        })
        .map_err(|e| e.to_string())
}
