use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hypshadow::inverse::{splitting_inverse, MinNormSolver};
use hypshadow::operator::{assemble_gamma, induced_norm_estimate, norm_upper};
use hypshadow::shadowing::{refine, ShadowingConfig};
use hypshadow::splitting::compute_splitting;
use hypshadow::{evolve, pseudo_orbit, Grade, LinearToral, TorusPoint, Window};

const ITERS: usize = 30;

fn cat_orbit(half: i64) -> hypshadow::OrbitWindow {
    let pad = half + ITERS as i64;
    evolve(&LinearToral::cat(), &TorusPoint::new(vec![0.2718, 0.5772]), -pad, pad).unwrap()
}

fn splitting(c: &mut Criterion) {
    let cat = LinearToral::cat();
    let mut g = c.benchmark_group("splitting_inverse");
    for half in [16i64, 32, 64] {
        let orbit = cat_orbit(half);
        let frames = compute_splitting(&cat, &orbit, ITERS).unwrap();
        let gamma = assemble_gamma(&cat, &orbit.restrict(&cat, Window::centered(half)).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(half), &half, |b, _| {
            b.iter(|| splitting_inverse(black_box(&gamma), &frames, Grade::Infinity).unwrap())
        });
    }
    g.finish();
}

fn min_norm(c: &mut Criterion) {
    let cat = LinearToral::cat();
    let mut g = c.benchmark_group("min_norm_factorization");
    for half in [16i64, 32, 64] {
        let orbit = cat_orbit(half);
        let gamma = assemble_gamma(&cat, &orbit.restrict(&cat, Window::centered(half)).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(half), &half, |b, _| {
            b.iter(|| MinNormSolver::new(black_box(&gamma), Grade::Finite(4)))
        });
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let cat = LinearToral::cat();
    let orbit = cat_orbit(32);
    let frames = compute_splitting(&cat, &orbit, ITERS).unwrap();
    let gamma = assemble_gamma(&cat, &orbit.restrict(&cat, Window::centered(32)).unwrap()).unwrap();
    let inv = splitting_inverse(&gamma, &frames, Grade::Infinity).unwrap();
    c.bench_function("norm_upper/32", |b| b.iter(|| norm_upper(black_box(&inv.rep), Grade::Finite(4), Grade::Finite(4))));
    c.bench_function("induced_norm_estimate/32", |b| b.iter(|| induced_norm_estimate(black_box(&inv.rep), Grade::Finite(4))));
}

fn shadowing(c: &mut Criterion) {
    let cat = LinearToral::cat();
    let beta = 1e-6;
    let pseudo = pseudo_orbit(&cat, &TorusPoint::new(vec![0.37, 0.71]), 0, 199, beta, 17).unwrap();
    let ext = evolve(&cat, pseudo.point(0), -(ITERS as i64), 199 + ITERS as i64).unwrap();
    let frames = compute_splitting(&cat, &ext, ITERS).unwrap();
    let gamma = assemble_gamma(&cat, &pseudo).unwrap();
    let inv = splitting_inverse(&gamma, &frames, Grade::Infinity).unwrap();
    let cfg = ShadowingConfig::from_inverse_bound(inv.bound, 0.5, beta).unwrap();
    let mut g = c.benchmark_group("refine");
    g.sample_size(20);
    g.bench_function("cat/200", |b| b.iter(|| refine(&cat, black_box(&pseudo), &inv, &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, splitting, min_norm, norms, shadowing);
criterion_main!(benches);
