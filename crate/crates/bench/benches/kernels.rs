use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rtbpa_bench::{hidden_dipole, triangle_soup};
use rtbpa_core::geometry::Vec3;
use rtbpa_core::imaging::{naive_bpa, rt_bpa, PathTable};
use rtbpa_core::propagation::{find_paths_sbr, ImageTracer, SbrConfig};
use std::hint::black_box;

fn intersect(c: &mut Criterion) {
    let (scene, rays) = triangle_soup(2000, 256);
    let mut g = c.benchmark_group("intersect_2000_tris");
    g.bench_function("bvh", |b| {
        b.iter(|| rays.iter().filter(|r| scene.intersect(r).is_some()).count())
    });
    g.bench_function("brute_force", |b| {
        b.iter(|| rays.iter().filter(|r| scene.intersect_brute_force(r).is_some()).count())
    });
    g.finish();
}

fn paths(c: &mut Criterion) {
    let (sc, _) = hidden_dipole(8);
    let point = Vec3::new(0.1, 0.04, 0.7);
    let rx = &sc.array.rx_positions;
    let tracer = ImageTracer::new(sc.scene(), 2).unwrap();
    c.bench_function("images_order2_1360_rx", |b| {
        b.iter(|| tracer.paths_to_all(black_box(&point), rx))
    });
    let cfg = SbrConfig {
        ray_count: 10_000,
        ..SbrConfig::default()
    };
    c.bench_function("sbr_10k_rays_one_rx", |b| {
        b.iter(|| find_paths_sbr(black_box(&point), &rx[700], sc.scene(), &cfg).unwrap())
    });
}

fn imaging(c: &mut Criterion) {
    let (sc, data) = hidden_dipole(16);
    let cfg = sc.reconstruction_config();
    let mut g = c.benchmark_group("imaging_16x16");
    g.sample_size(10);
    g.bench_function("naive_bpa", |b| b.iter(|| naive_bpa(&data, &sc.grid).unwrap()));
    g.bench_function("rt_bpa", |b| {
        b.iter(|| rt_bpa(&data, &sc.grid, sc.scene(), &cfg).unwrap())
    });
    g.bench_function("path_table_build", |b| {
        b.iter(|| PathTable::build(&data, &sc.grid, sc.scene(), &cfg).unwrap())
    });
    let table = PathTable::build(&data, &sc.grid, sc.scene(), &cfg).unwrap();
    g.bench_function("path_table_reconstruct", |b| {
        b.iter_batched(|| &data, |d| table.reconstruct(d).unwrap(), BatchSize::SmallInput)
    });
    g.finish();
}

criterion_group!(benches, intersect, paths, imaging);
criterion_main!(benches);
