use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use scalemix::dist::{log_hmt_clique_term, sample_gig, sample_pg};
use scalemix::graph::{can_add_edge, propose_edge_move};
use scalemix::gsm::GsmSampler;
use scalemix::mixed::MixedSampler;
use scalemix::DecomposableGraph;
use scalemix_bench::{continuous_config, continuous_data, mixed_config, mixed_data};

fn hmt_term(c: &mut Criterion) {
    let data = continuous_data(1);
    let mut g = c.benchmark_group("hmt_clique_term");
    for size in [2usize, 5, 10] {
        let block = data.columns(0, size).clone_owned();
        g.bench_with_input(BenchmarkId::from_parameter(size), &block, |b, block| {
            b.iter(|| log_hmt_clique_term(black_box(block), 10.0, 0.5).unwrap())
        });
    }
    g.finish();
}

fn graph_moves(c: &mut Criterion) {
    let edges: Vec<(usize, usize)> = (0..50)
        .flat_map(|u| [(u, u + 1), (u, u + 2)])
        .filter(|&(_, v)| v < 50)
        .collect();
    let graph = DecomposableGraph::from_edges(50, &edges).unwrap();
    let mut rng = scalemix::rng_from_seed(2);
    c.bench_function("propose_edge_move/banded50", |b| {
        b.iter(|| propose_edge_move(black_box(&graph), &mut rng).unwrap())
    });
    c.bench_function("can_add_edge/banded50", |b| {
        b.iter(|| can_add_edge(black_box(&graph), 3, 6))
    });
}

fn sweeps(c: &mut Criterion) {
    let mut g = c.benchmark_group("sweep");
    g.sample_size(20);
    let data = continuous_data(3);
    let config = continuous_config(3);
    let mut gsm = GsmSampler::new(&data, &config).unwrap();
    g.bench_function("gsm_q50", |b| b.iter(|| gsm.sweep().unwrap()));
    let mixed = mixed_data(4);
    let config = mixed_config(4);
    let mut sampler = MixedSampler::new(&mixed, &config).unwrap();
    g.bench_function("mixed_q50", |b| b.iter(|| sampler.sweep().unwrap()));
    g.finish();
}

fn variates(c: &mut Criterion) {
    let mut rng = scalemix::rng_from_seed(5);
    c.bench_function("sample_pg/b1", |b| b.iter(|| sample_pg(black_box(1), &mut rng)));
    c.bench_function("sample_pg/b4", |b| b.iter(|| sample_pg(black_box(4), &mut rng)));
    c.bench_function("sample_gig/0.5,1,2", |b| {
        b.iter(|| sample_gig(black_box(0.5), 1.0, 2.0, &mut rng).unwrap())
    });
}

criterion_group!(benches, hmt_term, graph_moves, sweeps, variates);
criterion_main!(benches);
