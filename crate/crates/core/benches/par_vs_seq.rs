//! Parallel-vs-sequential benches for the data-parallel hot paths: the
//! multistart channel search, the exact blind adversary, and the per-type
//! discrete sweep. With the `parallel` feature (default) the same code is
//! run both on the default rayon pool and inside a single-thread pool;
//! without it only the sequential path exists.

use criterion::{criterion_group, criterion_main, Criterion};

use blurlab_core::cipher::blind_adversary;
use blurlab_core::exponents::{r_blur, SolverOptions};
use blurlab_core::rd::conditional_rd;
use blurlab_core::types_lab::{enum_types, qstar};
use blurlab_core::{Dist, DistortionMatrix, DistortionSpec, Joint2};

fn ham(level: f64) -> DistortionSpec {
    DistortionSpec::with_level_f64(DistortionMatrix::hamming(2), level).unwrap()
}

fn bench_with_pools<F>(c: &mut Criterion, group: &str, mut f: F)
where
    F: FnMut() + Send,
{
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function("default-pool", |b| b.iter(&mut f));
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool");
        g.bench_function("single-thread", |b| b.iter(|| pool.install(&mut f)));
    }
    g.finish();
}

fn bench_blur(c: &mut Criterion) {
    let p = Dist::bernoulli(0.5).unwrap();
    let d = ham(0.25);
    let e = ham(0.1);
    let opts = SolverOptions::with_seed(3);
    bench_with_pools(c, "r_blur_binary_hamming", || {
        let v = r_blur(&p, &d, &e, &opts).unwrap().value;
        assert!(v > 0.3);
    });
}

fn bench_blind(c: &mut Criterion) {
    let p = Dist::bernoulli(0.4).unwrap();
    let e = ham(0.25);
    bench_with_pools(c, "blind_adversary_n12", || {
        let r = blind_adversary(&p, 12, &e).unwrap();
        assert!(r.success.as_f64() > 0.0);
    });
}

fn bench_type_sweep(c: &mut Criterion) {
    let d = DistortionSpec::with_level_ratio(DistortionMatrix::hamming(2), 1, 4).unwrap();
    let e = DistortionSpec::with_level_ratio(DistortionMatrix::hamming(2), 1, 8).unwrap();
    let types = enum_types(8, 2).unwrap();
    bench_with_pools(c, "qstar_sweep_n8", || {
        for t in &types {
            qstar(t, &d, &e).unwrap();
        }
    });
}

fn bench_conditional_rd(c: &mut Criterion) {
    let j = Joint2::new(2, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
    let e = ham(0.1);
    let mut g = c.benchmark_group("conditional_rd");
    g.bench_function("binary_solve", |b| {
        b.iter(|| conditional_rd(&j, &e).unwrap().value)
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_blur,
    bench_blind,
    bench_type_sweep,
    bench_conditional_rd
);
criterion_main!(benches);
