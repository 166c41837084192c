use criterion::{criterion_group, criterion_main, Criterion};
use quartic_bench::{klein_mesh, random_factor};
use quartic_core::{balance, spectral, testmap, uniform, CurveMesh, PlaneCurve};

fn mesh_build(c: &mut Criterion) {
    let curve = PlaneCurve::klein_quartic();
    let mut g = c.benchmark_group("mesh");
    g.sample_size(10);
    for level in [3u32, 4] {
        g.bench_function(format!("build_klein_L{level}"), |b| {
            b.iter(|| CurveMesh::build(&curve, level, 0).unwrap())
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let mesh = klein_mesh(4);
    let mut g = c.benchmark_group("spectral");
    g.sample_size(10);
    g.bench_function("lambda1_area_klein_L4", |b| {
        b.iter(|| spectral::lambda1_area(&mesh.topo, None).unwrap())
    });
    g.bench_function("stiffness_klein_L4", |b| {
        b.iter(|| spectral::assemble_stiffness(&mesh.topo).unwrap())
    });
    g.finish();
}

fn balancing(c: &mut Criterion) {
    let mesh = klein_mesh(3);
    let f = random_factor(&mesh, 1);
    let a1 = testmap::minimize_f().a1_f64;
    let mut g = c.benchmark_group("balance");
    g.sample_size(10);
    g.bench_function("solve_balance_klein_L3", |b| {
        b.iter(|| balance::solve_balance(&mesh, Some(&f), a1).unwrap())
    });
    g.finish();
}

fn uniformization(c: &mut Criterion) {
    let mesh = klein_mesh(4);
    let mut g = c.benchmark_group("uniform");
    g.sample_size(10);
    g.bench_function("hyperbolic_klein_L4", |b| {
        b.iter(|| uniform::uniformize(&mesh, -1.0).unwrap())
    });
    g.finish();
}

criterion_group!(benches, mesh_build, spectrum, balancing, uniformization);
criterion_main!(benches);
