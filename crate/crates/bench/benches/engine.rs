use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use statgeom::geometry::AmbientJets;
use statgeom::hypersurface::HypersurfaceAt;
use statgeom::submanifold::InducedGeometryAt;
use statgeom::{bundled_scenario, run_scenario, ExprTree, RunOptions, SamplePlan};

fn expressions(c: &mut Criterion) {
    let coords: Vec<String> = ["x1", "x2", "x3", "x4"].iter().map(|s| s.to_string()).collect();
    let e = ExprTree::parse("(1+exp(x3-x1))/exp(-2*(x1-x3)) + sin(x2)*cosh(x4)", &coords).unwrap();
    let p = [0.3, -0.2, 0.5, 0.1];
    c.bench_function("expr/value", |b| b.iter(|| e.eval_value(black_box(&p)).unwrap()));
    c.bench_function("expr/jet2", |b| b.iter(|| e.eval_jet(black_box(&p)).unwrap()));
}

fn pointwise(c: &mut Criterion) {
    let e2 = bundled_scenario("E2").unwrap();
    let x = [0.3, -0.2, 0.5, 0.1];
    c.bench_function("ambient/jets_E2", |b| b.iter(|| AmbientJets::at(&e2.geom, black_box(&x)).unwrap()));

    let e5 = bundled_scenario("E5").unwrap();
    let imm = e5.immersion.clone().unwrap();
    let u = [0.3, -0.2, 0.5];
    c.bench_function("submanifold/induced_E5", |b| {
        b.iter(|| InducedGeometryAt::compute(&e5.geom, &imm, black_box(&u)).unwrap())
    });

    let e7 = bundled_scenario("E7").unwrap();
    let imm7 = e7.immersion.clone().unwrap();
    c.bench_function("hypersurface/xi_E7", |b| {
        b.iter(|| HypersurfaceAt::compute(&e7.geom, &imm7, black_box(&u)).unwrap().xi().unwrap())
    });
}

fn scenarios(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    let opts = RunOptions { plan: Some(SamplePlan { grid: 0, random: 8, seed: 42 }), ..Default::default() };
    for id in ["E2", "E5", "E7"] {
        let doc = bundled_scenario(id).unwrap();
        g.bench_function(id, |b| b.iter(|| run_scenario(&doc, &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, expressions, pointwise, scenarios);
criterion_main!(benches);
