use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DMatrix;

use mixgap::chain::{dilated_pseudo_spectral_gap, stationary_distribution, TransitionMatrix};
use mixgap::estimators::{third_magnitude, GapRoute};
use mixgap::rng::Stream;
use mixgap::trajectory::{smoothed_estimates, SkippedCounts};

fn random_chain(d: usize, seed: u64) -> TransitionMatrix {
    let mut rng = Stream::new(seed);
    TransitionMatrix::normalized(DMatrix::from_fn(d, d, |_, _| rng.uniform() + 1e-3)).unwrap()
}

/// Smoothed estimates from the counts of a random closed walk.
fn balanced_estimates(d: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
    let mut rng = Stream::new(seed);
    let mut n = vec![0u64; d * d];
    let mut cur = 0;
    let len = 20 * d * d;
    for step in 0..len {
        let next = if step + 1 == len { 0 } else { (rng.uniform() * d as f64) as usize };
        n[cur * d + next] += 1;
        cur = next;
    }
    let est = smoothed_estimates(&SkippedCounts::from_transitions(1, d, n).unwrap(), 1.0).unwrap();
    (est.l_hat, est.pi_hat)
}

fn gap_routes(c: &mut Criterion) {
    let mut g = c.benchmark_group("third magnitude");
    g.sample_size(20);
    for d in [16, 64, 200] {
        let (l, pi) = balanced_estimates(d, 7);
        for (name, route) in [("dense", GapRoute::Dense), ("lanczos", GapRoute::Lanczos), ("deflated", GapRoute::Deflated)] {
            if d > 64 && route == GapRoute::Dense {
                continue;
            }
            g.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| {
                b.iter(|| third_magnitude(&l, &pi, route).unwrap())
            });
        }
    }
    g.finish();
}

fn exact_gaps(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(20);
    for d in [5, 50] {
        let m = random_chain(d, 3);
        g.bench_with_input(BenchmarkId::new("stationary", d), &d, |b, _| {
            b.iter(|| stationary_distribution(&m).unwrap())
        });
        let pi = stationary_distribution(&m).unwrap();
        g.bench_with_input(BenchmarkId::new("dilated pseudo gap", d), &d, |b, _| {
            b.iter(|| dilated_pseudo_spectral_gap(&m, &pi, None).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, gap_routes, exact_gaps);
criterion_main!(benches);
