use blurlab_core::exponents::*;
use blurlab_core::rd::rd_function;
use blurlab_core::simplex::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_dist(k: usize, rng: &mut ChaCha12Rng) -> Dist {
    let w: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln() + 1e-9
        })
        .collect();
    Dist::normalize(w).unwrap()
}
fn random_matrix(nx: usize, ny: usize, rng: &mut ChaCha12Rng) -> DistortionMatrix {
    DistortionMatrix::new(
        nx,
        ny,
        (0..nx * ny).map(|_| 2.0 * rng.random::<f64>()).collect(),
    )
    .unwrap()
}
fn random_spec(nx: usize, ny: usize, lo: f64, hi: f64, rng: &mut ChaCha12Rng) -> DistortionSpec {
    let m = random_matrix(nx, ny, rng);
    let (dmin, dmax) = (m.d_min(), m.d_max());
    let u = lo + (hi - lo) * rng.random::<f64>();
    DistortionSpec::with_level_f64(m, dmin + u * (dmax - dmin).max(1e-6)).unwrap()
}
fn nontrivial(p: &Dist, lo: f64, hi: f64, rng: &mut ChaCha12Rng) -> DistortionSpec {
    for _ in 0..50 {
        let s = random_spec(p.len(), 2, lo, hi, rng);
        if rd_function(p, &s).map(|r| r.value > 0.05).unwrap_or(false) {
            return s;
        }
    }
    random_spec(p.len(), 2, lo, hi, rng)
}

fn main() {
    let opts = SolverOptions {
        seed: 1,
        random_starts: 4,
        grid_step: 2e-3,
        max_evals_per_start: 250,
        ascent_tol: 1e-5,
        ..Default::default()
    };
    for i in 0..20u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        rng.set_stream(500 + i);
        let p = random_dist(2, &mut rng);
        let d = nontrivial(&p, 0.2, 0.8, &mut rng);
        let e = nontrivial(&p, 0.2, 0.6, &mut rng);
        let t0 = std::time::Instant::now();
        let nk = exponent_nokey(&p, &d, &e, &opts).unwrap();
        let t_nk = t0.elapsed();
        let t0 = std::time::Instant::now();
        let k = exponent_key(&p, &d, &e, 2.0, 0.0, f64::INFINITY, &opts).unwrap();
        println!(
            "i={i}: nokey {:.6} ({t_nk:?}), keyed {:.6} ({:?})",
            nk.value,
            k.value,
            t0.elapsed()
        );
    }
}
