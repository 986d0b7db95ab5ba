//! Single-letter secrecy quantities: the worst-side-information values with
//! and without a rate constraint, the secrecy exponents of the no-key and
//! keyed systems, the perfect secrecy exponent, and the minimum key rate.
//!
//! The outer maximization over test channels is nonconvex, so it is solved
//! by multistart projected coordinate ascent. The structured starts (the
//! rate-distortion-optimal test channel and the induced independence
//! channel) pin the provable lower bound R_e - R; the random starts guard
//! against local maxima. All randomness flows from the explicit seed, with
//! per-start streams, so identical seeds give identical results regardless
//! of scheduling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::par::par_map;
use crate::rd::{conditional_rd, conditional_rd_value, rd_curve, CondRDResult};
use crate::simplex::{
    binary_entropy, conditional_mutual_information, entropy, kl_divergence, Channel, Dist,
    DistortionSpec, Joint2, Joint3,
};

/// Knobs for the nonconvex searches. Defaults follow the artifact's pinned
/// choices; tests override only where a coarser grid is demonstrably enough.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub seed: u64,
    /// Number of Dirichlet(1) random channel starts besides the two
    /// structured ones.
    pub random_starts: usize,
    /// Random simplex starts for the outer Q search on alphabets >= 3.
    pub q_random_starts: usize,
    /// Grid step for the dense 1-D Q scan on binary alphabets.
    pub grid_step: f64,
    /// Branch-and-bound slack when skipping grid points whose cheap lower
    /// bound already exceeds the incumbent.
    pub prune_margin: f64,
    /// Stop an ascent once a full sweep improves by less than this
    /// (relative).
    pub ascent_tol: f64,
    /// Hard cap on objective evaluations per start.
    pub max_evals_per_start: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            seed: 0,
            random_starts: 16,
            q_random_starts: 8,
            grid_step: 1e-3,
            prune_margin: 5e-3,
            ascent_tol: 1e-7,
            max_evals_per_start: 4000,
        }
    }
}

impl SolverOptions {
    pub fn with_seed(seed: u64) -> Self {
        SolverOptions {
            seed,
            ..Default::default()
        }
    }
}

/// Result of a worst-side-information maximization (with or without the
/// rate constraint).
#[derive(Debug, Clone)]
pub struct BlurValue {
    /// max R(P_XY, D_e) in bits over feasible test channels.
    pub value: f64,
    pub argmax_channel: Channel,
    /// The conditional rate-distortion solve at the maximizer.
    pub inner: CondRDResult,
    pub starts_used: usize,
}

/// Result of an exponent minimization over source laws Q.
#[derive(Debug, Clone)]
pub struct ExponentResult {
    pub value: f64,
    pub argmin_q: Dist,
    /// Which term of the outer min achieved the value.
    pub branch: String,
    pub diagnostics: BTreeMap<String, f64>,
}

// ---------------------------------------------------------------------------
// Channel search.

#[derive(Clone)]
struct Flat {
    w: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl Flat {
    fn from_channel(c: &Channel) -> Flat {
        let (nx, ny) = (c.input_len(), c.output_len());
        let mut w = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                w[x * ny + y] = c.get(x, y);
            }
        }
        Flat { w, nx, ny }
    }

    fn to_channel(&self) -> Channel {
        Channel::from_rows(
            (0..self.nx)
                .map(|x| self.w[x * self.ny..(x + 1) * self.ny].to_vec())
                .collect(),
        )
        .expect("search iterate is a valid channel")
    }

    fn blend_from(&self, base: &Flat, t: f64) -> Flat {
        let w = base
            .w
            .iter()
            .zip(self.w.iter())
            .map(|(&b, &s)| b + t * (s - b))
            .collect();
        Flat {
            w,
            nx: self.nx,
            ny: self.ny,
        }
    }
}

struct ChannelSearch<'a> {
    p: &'a Dist,
    spec_d: &'a DistortionSpec,
    spec_e: &'a DistortionSpec,
    rate: Option<f64>,
    anchor: Flat,
    /// R_e(P, D_e): no feasible channel can push the objective above this
    /// (property P3), so an ascent that reaches it stops.
    upper: f64,
}

impl<'a> ChannelSearch<'a> {
    fn ed(&self, f: &Flat) -> f64 {
        let mut e = 0.0;
        for x in 0..f.nx {
            let px = self.p.get(x);
            if px <= 0.0 {
                continue;
            }
            for y in 0..f.ny {
                e += px * f.w[x * f.ny + y] * self.spec_d.matrix.get(x, y);
            }
        }
        e
    }

    fn mi(&self, f: &Flat) -> f64 {
        let mut qy = vec![0.0; f.ny];
        for x in 0..f.nx {
            let px = self.p.get(x);
            for y in 0..f.ny {
                qy[y] += px * f.w[x * f.ny + y];
            }
        }
        let mut i = 0.0;
        for x in 0..f.nx {
            let px = self.p.get(x);
            if px <= 0.0 {
                continue;
            }
            for y in 0..f.ny {
                let w = f.w[x * f.ny + y];
                if w > 0.0 && qy[y] > 0.0 {
                    i += px * w * (w / qy[y]).log2();
                }
            }
        }
        i.max(0.0)
    }

    /// Largest step along [base, target] that stays feasible; base must be
    /// feasible. E[d] is linear along the segment so it clips exactly;
    /// I(X;Y) is convex so its boundary is found by bisection.
    fn project(&self, target: &Flat, base: &Flat) -> Flat {
        let level = self.spec_d.level_f64();
        let e_base = self.ed(base);
        let e_t = self.ed(target);
        let mut t = if e_t <= level + 1e-12 {
            1.0
        } else if e_t > e_base {
            (((level - e_base) / (e_t - e_base)) - 1e-12).clamp(0.0, 1.0)
        } else {
            1.0
        };
        if let Some(rcap) = self.rate {
            let cand = target.blend_from(base, t);
            if self.mi(&cand) > rcap + 1e-12 {
                let mut lo = 0.0;
                let mut hi = t;
                for _ in 0..48 {
                    let mid = 0.5 * (lo + hi);
                    if self.mi(&target.blend_from(base, mid)) <= rcap {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-9 {
                        break;
                    }
                }
                t = lo;
            }
        }
        target.blend_from(base, t)
    }

    fn evaluate(&self, f: &Flat, hint: Option<f64>) -> Result<(f64, f64)> {
        let j = self.joint(f)?;
        conditional_rd_value(&j, self.spec_e, hint)
    }

    fn joint(&self, f: &Flat) -> Result<Joint2> {
        let mut t = vec![0.0; f.nx * f.ny];
        for x in 0..f.nx {
            let px = self.p.get(x);
            for y in 0..f.ny {
                t[x * f.ny + y] = px * f.w[x * f.ny + y];
            }
        }
        Joint2::new(f.nx, f.ny, t)
    }

    fn ascend(&self, start: Flat, opts: &SolverOptions) -> Result<(f64, Flat)> {
        let (mut best_val, mut hint) = self.evaluate(&start, None)?;
        let mut best = start;
        let mut evals = 1usize;
        let mut delta = 0.5_f64;
        let mut stalls = 0u32;
        'outer: while delta >= 1e-5
            && evals < opts.max_evals_per_start
            && best_val < self.upper - 1e-9
        {
            let level_base = best_val;
            loop {
                let mut improved = false;
                for x in 0..best.nx {
                    if self.p.get(x) <= 0.0 {
                        continue;
                    }
                    for yt in 0..best.ny {
                        let mut prop = best.clone();
                        let base = x * best.ny;
                        let mut moved = 0.0;
                        for y in 0..best.ny {
                            let target = if y == yt { 1.0 } else { 0.0 };
                            let nv = (1.0 - delta) * prop.w[base + y] + delta * target;
                            moved += (nv - prop.w[base + y]).abs();
                            prop.w[base + y] = nv;
                        }
                        if moved < 1e-14 {
                            continue;
                        }
                        let cand = self.project(&prop, &best);
                        let (v, l) = self.evaluate(&cand, Some(hint))?;
                        evals += 1;
                        if v > best_val + 1e-12 {
                            best_val = v;
                            best = cand;
                            hint = l;
                            improved = true;
                        }
                        if evals >= opts.max_evals_per_start || best_val >= self.upper - 1e-9 {
                            break 'outer;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            if best_val - level_base <= opts.ascent_tol * best_val.abs().max(1.0) {
                stalls += 1;
                if stalls >= 2 && delta <= 0.02 {
                    break;
                }
            } else {
                stalls = 0;
            }
            delta *= 0.5;
        }
        Ok((best_val, best))
    }
}

fn dirichlet_rows(nx: usize, ny: usize, rng: &mut ChaCha12Rng) -> Flat {
    let mut w = vec![0.0; nx * ny];
    for x in 0..nx {
        let mut s = 0.0;
        for y in 0..ny {
            let u: f64 = rng.random();
            let e = -(1.0 - u).ln();
            w[x * ny + y] = e;
            s += e;
        }
        for y in 0..ny {
            w[x * ny + y] /= s;
        }
    }
    Flat { w, nx, ny }
}

fn r_blur_core(
    p: &Dist,
    rate: Option<f64>,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
    extra_starts: &[Channel],
) -> Result<BlurValue> {
    if p.len() != spec_d.matrix.nx() || p.len() != spec_e.matrix.nx() {
        return Err(Error::validation(
            "r_blur: source and distortion matrices disagree on |X|",
        ));
    }
    let rd = rd_curve(p, &spec_d.matrix, spec_d.level_f64())?;
    if let Some(r) = rate {
        if r < rd.value - 1e-9 {
            return Err(Error::infeasible(format!(
                "rate {r} below R(P,D) = {}",
                rd.value
            )));
        }
    }
    let anchor = Flat::from_channel(&rd.argmin_channel);
    let upper = rd_curve(p, &spec_e.matrix, spec_e.level_f64())?.value;
    let search = ChannelSearch {
        p,
        spec_d,
        spec_e,
        rate,
        anchor: anchor.clone(),
        upper,
    };

    // A slack budget (level at or above every entry of d) makes all
    // channels feasible, and an independent Y then attains the P3 upper
    // bound R_e(P, D_e) exactly; no search is needed.
    if spec_d.level_f64() >= spec_d.matrix.d_max() - 1e-15 {
        let inner = conditional_rd(&search.joint(&anchor)?, spec_e)?;
        return Ok(BlurValue {
            value: inner.value,
            argmax_channel: anchor.to_channel(),
            inner,
            starts_used: 1,
        });
    }

    let mut starts: Vec<Flat> = Vec::new();
    starts.push(anchor.clone());
    // Independence channel carrying the RD output marginal.
    let qy = search.joint(&anchor)?.marginal_y();
    let ind = Flat::from_channel(&Channel::independent(p.len(), &qy));
    starts.push(search.project(&ind, &search.anchor));
    for i in 0..opts.random_starts {
        let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
        rng.set_stream(1 + i as u64);
        let f = dirichlet_rows(p.len(), spec_d.matrix.ny(), &mut rng);
        starts.push(search.project(&f, &search.anchor));
    }
    for c in extra_starts {
        let f = Flat::from_channel(c);
        starts.push(search.project(&f, &search.anchor));
    }
    let starts_used = starts.len();

    let outcomes: Vec<Result<(f64, Flat)>> = par_map(starts, |s| search.ascend(s, opts));
    let mut best: Option<(f64, Flat)> = None;
    for o in outcomes {
        let (v, f) = o?;
        match &best {
            Some((bv, _)) if v <= bv + 1e-12 => {}
            _ => best = Some((v, f)),
        }
    }
    let (_, best_f) = best.expect("at least one start");
    let inner = conditional_rd(&search.joint(&best_f)?, spec_e)?;
    Ok(BlurValue {
        value: inner.value,
        argmax_channel: best_f.to_channel(),
        inner,
        starts_used,
    })
}

/// R(P, D, D_e): the worst side information the primary user can feed the
/// eavesdropper under the distortion budget alone.
pub fn r_blur(
    p: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
) -> Result<BlurValue> {
    r_blur_core(p, None, spec_d, spec_e, opts, &[])
}

/// [`r_blur`] with additional warm-start channels.
pub fn r_blur_with_starts(
    p: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
    extra_starts: &[Channel],
) -> Result<BlurValue> {
    r_blur_core(p, None, spec_d, spec_e, opts, extra_starts)
}

/// R(P, R, D, D_e): as [`r_blur`] with the transmitter rate constraint
/// I(X;Y) <= R enforced by feasibility projection.
pub fn r_blur_rate(
    p: &Dist,
    rate: f64,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
) -> Result<BlurValue> {
    r_blur_core(p, Some(rate), spec_d, spec_e, opts, &[])
}

/// [`r_blur_rate`] with additional warm-start channels (used e.g. to check
/// monotonicity in R by warm-starting from a lower-rate maximizer).
pub fn r_blur_rate_with_starts(
    p: &Dist,
    rate: f64,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
    extra_starts: &[Channel],
) -> Result<BlurValue> {
    r_blur_core(p, Some(rate), spec_d, spec_e, opts, extra_starts)
}

// ---------------------------------------------------------------------------
// Outer minimizations over source laws Q.

#[derive(Clone, Copy)]
enum QRegion {
    Full,
    /// D(Q||P) <= alpha.
    Ball(f64),
    /// D(Q||P) >= alpha.
    Outside(f64),
}

impl QRegion {
    fn contains(&self, q: &Dist, p: &Dist) -> bool {
        match *self {
            QRegion::Full => true,
            QRegion::Ball(a) => kl_divergence(q, p).map(|d| d <= a + 1e-12).unwrap_or(false),
            QRegion::Outside(a) => kl_divergence(q, p).map(|d| d >= a - 1e-12).unwrap_or(true),
        }
    }

    fn is_empty_outside(&self, p: &Dist) -> bool {
        match *self {
            QRegion::Outside(a) => {
                if !a.is_finite() {
                    return true;
                }
                // The KL sup over the simplex is max_i log2(1/p_i).
                let m = p
                    .probs()
                    .iter()
                    .map(|&pi| (1.0 / pi).log2())
                    .fold(0.0, f64::max);
                a > m + 1e-12
            }
            _ => false,
        }
    }
}

struct QOutcome {
    value: f64,
    argmin: Dist,
}

/// Minimize `objective` over the region. `lower` (when given) is a cheap
/// per-point lower bound used for branch-and-bound pruning: a point is
/// skipped only when its bound already exceeds the incumbent by the prune
/// margin, which cannot displace the argmin nor the tie set.
fn minimize_q(
    p: &Dist,
    region: QRegion,
    objective: &(dyn Fn(&Dist) -> Result<f64> + Sync),
    lower: Option<&(dyn Fn(&Dist) -> Result<f64> + Sync)>,
    opts: &SolverOptions,
) -> Result<Option<QOutcome>> {
    if region.is_empty_outside(p) {
        return Ok(None);
    }
    if p.len() == 2 {
        minimize_q_binary(p, region, objective, lower, opts).map(Some)
    } else {
        minimize_q_descent(p, region, objective, opts).map(Some)
    }
}

fn minimize_q_binary(
    p: &Dist,
    region: QRegion,
    objective: &(dyn Fn(&Dist) -> Result<f64> + Sync),
    lower: Option<&(dyn Fn(&Dist) -> Result<f64> + Sync)>,
    opts: &SolverOptions,
) -> Result<QOutcome> {
    let n = (1.0 / opts.grid_step).round().max(2.0) as usize;
    let mut candidates: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    // The ball around P can be narrower than the grid step; always include P
    // itself and the region boundaries among the candidates.
    candidates.push(p.get(1));
    if let QRegion::Ball(a) | QRegion::Outside(a) = region {
        if a.is_finite() {
            candidates.extend(kl_ball_boundaries_binary(p, a));
        }
    }
    candidates.retain(|&q| region.contains(&Dist::bernoulli(q).expect("grid point"), p));
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    if candidates.is_empty() {
        return Err(Error::infeasible("empty Q region"));
    }

    // Phase 1: coarse pass to establish an incumbent for pruning.
    let coarse_stride = (candidates.len() / 40).max(1);
    let coarse: Vec<f64> = candidates
        .iter()
        .cloned()
        .step_by(coarse_stride)
        .chain(std::iter::once(*candidates.last().unwrap()))
        .collect();
    let coarse_vals: Vec<Result<f64>> =
        par_map(coarse, |q| objective(&Dist::bernoulli(q).unwrap()));
    let mut incumbent = f64::INFINITY;
    for v in &coarse_vals {
        if let Ok(v) = v {
            incumbent = incumbent.min(*v);
        }
    }
    for v in coarse_vals {
        if let Err(e) = v {
            if !matches!(e, Error::Infeasible(_)) {
                return Err(e);
            }
        }
    }

    // Phase 2: full grid with branch-and-bound pruning. Candidates are
    // visited in ascending order of their cheap lower bound and pruned
    // against a shared incumbent that only decreases, so a skipped point
    // provably exceeds the final minimum by more than the margin; the
    // minimizer and value are schedule-independent.
    let evals: Vec<Option<(f64, f64)>> = {
        let lowers: Vec<Result<Option<f64>>> = match lower {
            Some(lb) => par_map(candidates.clone(), |q| {
                match lb(&Dist::bernoulli(q).unwrap()) {
                    Ok(v) => Ok(Some(v)),
                    Err(Error::Infeasible(_)) => Ok(None),
                    Err(e) => Err(e),
                }
            }),
            None => candidates.iter().map(|_| Ok(Some(0.0))).collect(),
        };
        let mut ordered: Vec<(f64, f64)> = Vec::with_capacity(candidates.len());
        for (q, l) in candidates.iter().zip(lowers) {
            if let Some(l) = l? {
                ordered.push((l, *q));
            }
        }
        if lower.is_some() {
            ordered.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let shared = std::sync::Mutex::new(incumbent);
        let results: Vec<Result<Option<(f64, f64)>>> = par_map(ordered, |(l, q)| {
            if lower.is_some() && l > *shared.lock().expect("incumbent") + opts.prune_margin {
                return Ok(None);
            }
            let d = Dist::bernoulli(q).unwrap();
            match objective(&d) {
                Ok(v) => {
                    let mut best = shared.lock().expect("incumbent");
                    if v < *best {
                        *best = v;
                    }
                    Ok(Some((q, v)))
                }
                Err(Error::Infeasible(_)) => Ok(None),
                Err(e) => Err(e),
            }
        });
        let mut out = Vec::with_capacity(results.len());
        for r in results {
            out.push(r?);
        }
        out
    };
    let mut best: Option<(f64, f64)> = None;
    for (q, v) in evals.into_iter().flatten() {
        best = Some(match best {
            None => (q, v),
            Some((bq, bv)) => {
                if v < bv - 1e-9 || (v < bv + 1e-9 && q < bq) {
                    (q, v)
                } else {
                    (bq, bv)
                }
            }
        });
    }
    let (bq, bv) = best.ok_or_else(|| Error::infeasible("all Q grid points infeasible"))?;

    // Golden-section polish around the grid argmin, staying in the region.
    let lo = (bq - 1.0 / n as f64).max(0.0);
    let hi = (bq + 1.0 / n as f64).min(1.0);
    let gold = golden_min(
        &|q| {
            let d = Dist::bernoulli(q).unwrap();
            if !region.contains(&d, p) {
                return Ok(f64::INFINITY);
            }
            match objective(&d) {
                Ok(v) => Ok(v),
                Err(Error::Infeasible(_)) => Ok(f64::INFINITY),
                Err(e) => Err(e),
            }
        },
        lo,
        hi,
        40,
    )?;
    let (fq, fv) = match gold {
        Some((gq, gv)) if gv < bv - 1e-12 => (gq, gv),
        _ => (bq, bv),
    };
    Ok(QOutcome {
        value: fv,
        argmin: Dist::bernoulli(fq).unwrap(),
    })
}

/// The two points where D(Ber(q) || P) = alpha, found by bisection on each
/// side of P(1) (KL is convex in q with minimum 0 there).
fn kl_ball_boundaries_binary(p: &Dist, alpha: f64) -> Vec<f64> {
    let center = p.get(1);
    let kl = |q: f64| kl_divergence(&Dist::bernoulli(q).unwrap(), p).unwrap_or(f64::INFINITY);
    let mut out = Vec::new();
    for (a, b) in [(0.0, center), (center, 1.0)] {
        let going_down = a < center;
        let (mut lo, mut hi) = (a, b);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let inside = kl(mid) <= alpha;
            if going_down {
                if inside {
                    hi = mid;
                } else {
                    lo = mid;
                }
            } else if inside {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

fn golden_min(
    f: &dyn Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    iters: usize,
) -> Result<Option<(f64, f64)>> {
    if b <= a {
        return Ok(None);
    }
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    let mut x1 = a + phi * (b - a);
    let mut x2 = b - phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = a + phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = b - phi * (b - a);
            f2 = f(x2)?;
        }
    }
    let (x, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if v.is_finite() {
        Ok(Some((x, v)))
    } else {
        Ok(None)
    }
}

/// Multistart projected coordinate descent for |X| >= 3.
fn minimize_q_descent(
    p: &Dist,
    region: QRegion,
    objective: &(dyn Fn(&Dist) -> Result<f64> + Sync),
    opts: &SolverOptions,
) -> Result<QOutcome> {
    let k = p.len();
    let mut starts: Vec<Dist> = vec![p.clone(), Dist::uniform(k)];
    for i in 0..opts.q_random_starts {
        let mut rng = ChaCha12Rng::seed_from_u64(opts.seed);
        rng.set_stream(1000 + i as u64);
        let mut w = Vec::with_capacity(k);
        for _ in 0..k {
            let u: f64 = rng.random();
            w.push(-(1.0 - u).ln());
        }
        starts.push(Dist::normalize(w)?);
    }
    let starts: Vec<Dist> = starts
        .into_iter()
        .filter_map(|q| project_into_region(&q, p, region))
        .collect();
    if starts.is_empty() {
        return Err(Error::infeasible("no feasible Q starts in region"));
    }

    let run = |start: Dist| -> Result<(f64, Dist)> {
        let mut best = start;
        let mut best_val = match objective(&best) {
            Ok(v) => v,
            Err(Error::Infeasible(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let mut delta = 0.5_f64;
        while delta >= 1e-6 {
            let mut improved = true;
            while improved {
                improved = false;
                for i in 0..k {
                    let mut prop: Vec<f64> = best.probs().to_vec();
                    for (j, v) in prop.iter_mut().enumerate() {
                        let tgt = if j == i { 1.0 } else { 0.0 };
                        *v = (1.0 - delta) * *v + delta * tgt;
                    }
                    let prop = Dist::new(prop)?;
                    let cand = match project_segment(&prop, &best, p, region) {
                        Some(c) => c,
                        None => continue,
                    };
                    let v = match objective(&cand) {
                        Ok(v) => v,
                        Err(Error::Infeasible(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    if v < best_val - 1e-12 {
                        best_val = v;
                        best = cand;
                        improved = true;
                    }
                }
            }
            delta *= 0.5;
        }
        Ok((best_val, best))
    };
    let outcomes: Vec<Result<(f64, Dist)>> = par_map(starts, run);
    let mut best: Option<(f64, Dist)> = None;
    for o in outcomes {
        let (v, q) = o?;
        best = Some(match best {
            None => (v, q),
            Some((bv, bq)) => {
                if v < bv - 1e-9 || (v < bv + 1e-9 && q.lex_le(&bq) && !bq.lex_le(&q)) {
                    (v, q)
                } else {
                    (bv, bq)
                }
            }
        });
    }
    let (value, argmin) = best.unwrap();
    if !value.is_finite() {
        return Err(Error::infeasible("Q descent found no feasible point"));
    }
    Ok(QOutcome { value, argmin })
}

/// Move `q` into the region along a straight segment (toward `p` for the KL
/// ball, toward the most distant vertex for its complement).
fn project_into_region(q: &Dist, p: &Dist, region: QRegion) -> Option<Dist> {
    if region.contains(q, p) {
        return Some(q.clone());
    }
    match region {
        QRegion::Full => Some(q.clone()),
        QRegion::Ball(_) => project_segment(q, p, p, region),
        QRegion::Outside(a) => {
            let k = p.len();
            let (best_i, best_kl) = (0..k)
                .map(|i| {
                    (
                        i,
                        kl_divergence(&Dist::point_mass(k, i), p).unwrap_or(f64::INFINITY),
                    )
                })
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                .unwrap();
            if best_kl < a {
                return None;
            }
            let vertex = Dist::point_mass(k, best_i);
            project_segment(q, &vertex, p, region)
        }
    }
}

/// Largest feasible step from `base` (in-region) toward `target`.
fn project_segment(target: &Dist, base: &Dist, p: &Dist, region: QRegion) -> Option<Dist> {
    if region.contains(target, p) {
        return Some(target.clone());
    }
    let blend = |t: f64| -> Dist {
        Dist::new(
            base.probs()
                .iter()
                .zip(target.probs())
                .map(|(&b, &s)| b + t * (s - b))
                .collect(),
        )
        .expect("segment stays on simplex")
    };
    if !region.contains(base, p) {
        return None;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if region.contains(&blend(mid), p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(blend(lo))
}

// ---------------------------------------------------------------------------
// Exponents.

fn validate_exponent_inputs(
    p: &Dist,
    spec_e: &DistortionSpec,
    spec_d: Option<&DistortionSpec>,
) -> Result<()> {
    if !p.full_support() {
        return Err(Error::validation(
            "source must have full support (degenerate symbols can be dropped)",
        ));
    }
    if spec_e.matrix.nx() != p.len() {
        return Err(Error::validation("d_e has the wrong source alphabet"));
    }
    if let Some(d) = spec_d {
        if d.matrix.nx() != p.len() {
            return Err(Error::validation("d has the wrong source alphabet"));
        }
    }
    Ok(())
}

/// Perfect secrecy exponent E_0(P, D_e) = min_Q D(Q||P) + R_e(Q, D_e).
pub fn exponent_perfect(
    p: &Dist,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
) -> Result<ExponentResult> {
    validate_exponent_inputs(p, spec_e, None)?;
    let objective = |q: &Dist| -> Result<f64> {
        Ok(kl_divergence(q, p)? + rd_curve(q, &spec_e.matrix, spec_e.level_f64())?.value)
    };
    let out = minimize_q(p, QRegion::Full, &objective, None, opts)?
        .expect("full region is never empty");
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("kl".into(), kl_divergence(&out.argmin, p)?);
    diagnostics.insert(
        "re".into(),
        rd_curve(&out.argmin, &spec_e.matrix, spec_e.level_f64())?.value,
    );
    Ok(ExponentResult {
        value: out.value,
        argmin_q: out.argmin,
        branch: "perfect".into(),
        diagnostics,
    })
}

/// No-key secrecy exponent E(P, D, D_e) = min_Q D(Q||P) + R(Q, D, D_e).
pub fn exponent_nokey(
    p: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
) -> Result<ExponentResult> {
    validate_exponent_inputs(p, spec_e, Some(spec_d))?;
    let objective = |q: &Dist| -> Result<f64> {
        Ok(kl_divergence(q, p)? + r_blur(q, spec_d, spec_e, opts)?.value)
    };
    // P3 sandwich: R(Q,D,D_e) >= max(0, R_e(Q,D_e) - R(Q,D)).
    let lower = |q: &Dist| -> Result<f64> {
        let re = rd_curve(q, &spec_e.matrix, spec_e.level_f64())?.value;
        let rd = rd_curve(q, &spec_d.matrix, spec_d.level_f64())?.value;
        Ok(kl_divergence(q, p)? + (re - rd).max(0.0))
    };
    let out = minimize_q(p, QRegion::Full, &objective, Some(&lower), opts)?
        .expect("full region is never empty");
    let blur = r_blur(&out.argmin, spec_d, spec_e, opts)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("kl".into(), kl_divergence(&out.argmin, p)?);
    diagnostics.insert("blur".into(), blur.value);
    Ok(ExponentResult {
        value: out.value,
        argmin_q: out.argmin,
        branch: "nokey".into(),
        diagnostics,
    })
}

/// R_alpha = max over {Q : D(Q||P) <= alpha} of R(Q, D); the feasibility
/// threshold of assumption A4.
#[allow(non_snake_case)]
pub fn compute_R_alpha(
    p: &Dist,
    spec_d: &DistortionSpec,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    if alpha < 0.0 {
        return Err(Error::validation(format!("alpha = {alpha}")));
    }
    if alpha == 0.0 {
        return Ok(rd_curve(p, &spec_d.matrix, spec_d.level_f64())?.value);
    }
    let region = if alpha.is_infinite() {
        QRegion::Full
    } else {
        QRegion::Ball(alpha)
    };
    let objective =
        |q: &Dist| -> Result<f64> { Ok(-rd_curve(q, &spec_d.matrix, spec_d.level_f64())?.value) };
    let out = minimize_q(p, region, &objective, None, opts)?
        .ok_or_else(|| Error::infeasible("empty KL ball"))?;
    Ok(-out.value)
}

struct KeyInner {
    /// min over the KL ball of D(Q||P) + R(Q, R, D, D_e).
    term: f64,
    argmin: Dist,
    /// min over the KL ball of D(Q||P) + R_e(Q, D_e).
    ball_kl_re: f64,
    /// min outside the ball of D(Q||P) + R_e(Q, D_e) (+inf when empty).
    outside_kl_re: f64,
}

fn key_inner_min(
    p: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    rate: f64,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<KeyInner> {
    let ball = if alpha.is_infinite() {
        QRegion::Full
    } else {
        QRegion::Ball(alpha)
    };
    let objective = |q: &Dist| -> Result<f64> {
        Ok(kl_divergence(q, p)? + r_blur_rate(q, rate, spec_d, spec_e, opts)?.value)
    };
    let lower = |q: &Dist| -> Result<f64> {
        let re = rd_curve(q, &spec_e.matrix, spec_e.level_f64())?.value;
        let rd = rd_curve(q, &spec_d.matrix, spec_d.level_f64())?.value;
        Ok(kl_divergence(q, p)? + (re - rd).max(0.0))
    };
    let out = minimize_q(p, ball, &objective, Some(&lower), opts)?
        .ok_or_else(|| Error::infeasible("empty KL ball"))?;

    let kl_re = |q: &Dist| -> Result<f64> {
        Ok(kl_divergence(q, p)? + rd_curve(q, &spec_e.matrix, spec_e.level_f64())?.value)
    };
    let ball_out = minimize_q(p, ball, &kl_re, None, opts)?
        .ok_or_else(|| Error::infeasible("empty KL ball"))?;
    let outside = if alpha.is_infinite() {
        None
    } else {
        minimize_q(p, QRegion::Outside(alpha), &kl_re, None, opts)?
    };
    Ok(KeyInner {
        term: out.value,
        argmin: out.argmin,
        ball_kl_re: ball_out.value,
        outside_kl_re: outside.map_or(f64::INFINITY, |o| o.value),
    })
}

/// Keyed-system secrecy exponent (lossy Shannon cipher system):
/// min{ E_0(P, D_e), r + min over {Q : D(Q||P) <= alpha} of
/// D(Q||P) + R(Q, R, D, D_e) }.
///
/// The equivalent regrouped form (splitting Q inside vs. outside the KL
/// ball, with the blind floor folded per type) is evaluated alongside and
/// recorded in the diagnostics as `eq_alt`; the two must agree within
/// numerical tolerance.
pub fn exponent_key(
    p: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    rate: f64,
    key_rate: f64,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<ExponentResult> {
    validate_exponent_inputs(p, spec_e, Some(spec_d))?;
    if key_rate < 0.0 {
        return Err(Error::validation(format!("key rate r = {key_rate}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::validation(format!("alpha = {alpha} must be > 0")));
    }
    let r_alpha = compute_R_alpha(p, spec_d, alpha, opts)?;
    if rate <= r_alpha + 1e-9 {
        return Err(Error::RateInfeasible { rate, r_alpha });
    }
    let perfect = exponent_perfect(p, spec_e, opts)?;
    let inner = key_inner_min(p, spec_d, spec_e, rate, alpha, opts)?;
    let eq_main = perfect.value.min(key_rate + inner.term);
    // Regrouped form: dummy types outside the ball contribute kl + R_e;
    // types inside contribute kl + min(r + blur, R_e).
    let eq_alt = inner
        .outside_kl_re
        .min(key_rate + inner.term)
        .min(inner.ball_kl_re);

    let (branch, argmin) = if perfect.value <= key_rate + inner.term + 1e-12 {
        ("perfect-floor".to_string(), perfect.argmin_q.clone())
    } else {
        ("key-term".to_string(), inner.argmin.clone())
    };
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("e0".into(), perfect.value);
    diagnostics.insert("inner_min".into(), inner.term);
    diagnostics.insert("eq_main".into(), eq_main);
    diagnostics.insert("eq_alt".into(), eq_alt);
    diagnostics.insert("ball_kl_re".into(), inner.ball_kl_re);
    diagnostics.insert("outside_kl_re".into(), inner.outside_kl_re);
    diagnostics.insert("r_alpha".into(), r_alpha);
    Ok(ExponentResult {
        value: eq_main,
        argmin_q: argmin,
        branch,
        diagnostics,
    })
}

/// Minimum key rate achieving the perfect secrecy exponent:
/// r_0 = max(0, E_0 - min over the KL ball of D(Q||P) + R(Q,R,D,D_e)).
pub fn min_key_rate(
    p: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    rate: f64,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    validate_exponent_inputs(p, spec_e, Some(spec_d))?;
    let r_alpha = compute_R_alpha(p, spec_d, alpha, opts)?;
    if rate <= r_alpha + 1e-9 {
        return Err(Error::RateInfeasible { rate, r_alpha });
    }
    let perfect = exponent_perfect(p, spec_e, opts)?;
    let inner = key_inner_min(p, spec_d, spec_e, rate, alpha, opts)?;
    Ok((perfect.value - inner.term).max(0.0))
}

/// Closed form of the worst-side-information value for a binary source with
/// Hamming distortions and D_e <= D < 1/2: zero below H(D_e), then
/// H(Q) - H(D_e), saturating at H(D) - H(D_e).
pub fn closed_form_binary(q: f64, d_level: f64, de_level: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::validation(format!("q = {q} outside (0,1)")));
    }
    if !(de_level <= d_level && d_level < 0.5) {
        return Err(Error::validation(format!(
            "need D_e <= D < 1/2, got D = {d_level}, D_e = {de_level}"
        )));
    }
    let hq = binary_entropy(q)?;
    let hd = binary_entropy(d_level)?;
    let hde = binary_entropy(de_level)?;
    Ok(if hq <= hde {
        0.0
    } else if hq >= hd {
        hd - hde
    } else {
        hq - hde
    })
}

/// Report from probing whether the worst-side-information value collapses to
/// R_e(Q, D_e) - R(Q, D), i.e. whether the rate-distortion-optimal test
/// channel is already worst-case (successive refinability).
#[derive(Debug, Clone)]
pub struct RefinabilityReport {
    pub refinable: bool,
    pub blur_value: f64,
    pub re: f64,
    pub rd: f64,
    /// Whether the RD-optimal test channel attains the max (within 2e-3);
    /// only evaluated when `refinable`.
    pub rd_channel_near_optimal: Option<bool>,
    /// I(X;Y|V) of the composed optimal laws (zero iff X - V - Y).
    pub defect_i_xy_given_v: Option<f64>,
    /// I(Y;V|X) of the composed optimal laws.
    pub defect_i_yv_given_x: Option<f64>,
}

pub fn successive_refinability_probe(
    q: &Dist,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    opts: &SolverOptions,
) -> Result<RefinabilityReport> {
    let blur = r_blur(q, spec_d, spec_e, opts)?;
    let re = rd_curve(q, &spec_e.matrix, spec_e.level_f64())?.value;
    let rd = rd_curve(q, &spec_d.matrix, spec_d.level_f64())?;
    let refinable = (blur.value - (re - rd.value)).abs() <= 2e-3;
    if !refinable {
        return Ok(RefinabilityReport {
            refinable,
            blur_value: blur.value,
            re,
            rd: rd.value,
            rd_channel_near_optimal: None,
            defect_i_xy_given_v: None,
            defect_i_yv_given_x: None,
        });
    }
    let j = Joint2::from_source_channel(q, &rd.argmin_channel)?;
    let inner = conditional_rd(&j, spec_e)?;
    let rd_channel_near_optimal = Some(inner.value >= blur.value - 2e-3);
    let j3 = Joint3::from_joint_channel(&j, &inner.argmin_channel)?;
    Ok(RefinabilityReport {
        refinable,
        blur_value: blur.value,
        re,
        rd: rd.value,
        rd_channel_near_optimal,
        defect_i_xy_given_v: Some(cmi_x_y_given_v(&j3)),
        defect_i_yv_given_x: Some(cmi_y_v_given_x(&j3)),
    })
}

/// I(X;Y|V) of an (X,Y,V) law, via axis permutation.
fn cmi_x_y_given_v(j: &Joint3) -> f64 {
    let (nx, ny, nv) = (j.nx(), j.ny(), j.nv());
    let mut t = vec![0.0; nx * ny * nv];
    for x in 0..nx {
        for y in 0..ny {
            for v in 0..nv {
                // axes (X, V, Y): conditioning variable in the middle slot
                t[(x * nv + v) * ny + y] = j.get(x, y, v);
            }
        }
    }
    conditional_mutual_information(&Joint3::new(nx, nv, ny, t).expect("permuted law"))
}

/// I(Y;V|X) of an (X,Y,V) law.
fn cmi_y_v_given_x(j: &Joint3) -> f64 {
    let (nx, ny, nv) = (j.nx(), j.ny(), j.nv());
    let mut t = vec![0.0; nx * ny * nv];
    for x in 0..nx {
        for y in 0..ny {
            for v in 0..nv {
                // axes (Y, X, V)
                t[(y * nx + x) * nv + v] = j.get(x, y, v);
            }
        }
    }
    conditional_mutual_information(&Joint3::new(ny, nx, nv, t).expect("permuted law"))
}

/// Entropy of a source law, re-exported for the perfect-reconstruction
/// identity checks.
pub fn source_entropy(p: &Dist) -> f64 {
    entropy(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::DistortionMatrix;

    fn ham_spec(level: f64) -> DistortionSpec {
        DistortionSpec::with_level_f64(DistortionMatrix::hamming(2), level).unwrap()
    }

    fn zero_spec(nx: usize, ny: usize) -> DistortionSpec {
        DistortionSpec::with_level_f64(DistortionMatrix::zero(nx, ny), 0.0).unwrap()
    }

    fn fast_opts() -> SolverOptions {
        SolverOptions {
            seed: 7,
            random_starts: 8,
            grid_step: 4e-3,
            ..Default::default()
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn closed_form_branches() {
        assert!(close(
            closed_form_binary(0.5, 0.25, 0.1).unwrap(),
            0.342282,
            1e-6
        ));
        assert!(close(
            closed_form_binary(0.05, 0.25, 0.1).unwrap(),
            0.0,
            1e-12
        ));
        assert!(close(
            closed_form_binary(0.15, 0.25, 0.1).unwrap(),
            0.140844,
            1e-6
        ));
        assert!(closed_form_binary(0.0, 0.25, 0.1).is_err());
        assert!(closed_form_binary(0.5, 0.5, 0.1).is_err());
        assert!(closed_form_binary(0.5, 0.25, 0.3).is_err());
    }

    #[test]
    fn blur_matches_hamming_closed_form() {
        let p = Dist::bernoulli(0.5).unwrap();
        let b = r_blur(&p, &ham_spec(0.25), &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(close(b.value, 0.342282, 1e-3), "{}", b.value);

        let p = Dist::bernoulli(0.05).unwrap();
        let b = r_blur(&p, &ham_spec(0.25), &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(b.value <= 1e-3, "{}", b.value);
    }

    #[test]
    fn blur_trivial_legitimate_distortion() {
        // d == 0 removes the primary constraint entirely, so the value is
        // the plain eavesdropper rate-distortion function.
        let p = Dist::bernoulli(0.5).unwrap();
        let b = r_blur(&p, &zero_spec(2, 2), &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(close(b.value, 0.531004, 1e-3), "{}", b.value);
    }

    #[test]
    fn blur_rate_unconstrained_matches_blur() {
        let p = Dist::bernoulli(0.5).unwrap();
        let b = r_blur_rate(&p, 1.0, &ham_spec(0.25), &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(close(b.value, 0.342282, 1e-3), "{}", b.value);
    }

    #[test]
    fn blur_rate_perfect_reconstruction_identity() {
        // D_e = 0 with Hamming d_e: the value is H(Q) - R(Q, D) = H_b(D)
        // for a binary Hamming pair at D below the source bias.
        let p = Dist::bernoulli(0.3).unwrap();
        let b = r_blur_rate(&p, 1.0, &ham_spec(0.25), &ham_spec(0.0), &fast_opts()).unwrap();
        let expect = binary_entropy(0.25).unwrap();
        assert!(close(b.value, expect, 2e-3), "{} vs {expect}", b.value);
    }

    #[test]
    fn blur_rate_infeasible_rate_rejected() {
        let p = Dist::bernoulli(0.5).unwrap();
        let r = r_blur_rate(&p, 0.05, &ham_spec(0.25), &ham_spec(0.1), &fast_opts());
        assert!(r.is_err());
    }

    #[test]
    fn perfect_exponent_binary() {
        let p = Dist::bernoulli(0.5).unwrap();
        let e = exponent_perfect(&p, &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(close(e.value, 0.531004, 1e-3), "{}", e.value);

        // Slack level: exponent 0 at Q = P.
        let e = exponent_perfect(&p, &ham_spec(1.0), &fast_opts()).unwrap();
        assert!(e.value.abs() <= 1e-9);
    }

    #[test]
    fn perfect_exponent_skewed_vs_dense_scan() {
        // Independent 1-D oracle: direct scan of
        // D(q || 0.8) + [H_b(q) - H_b(0.1)]^+ with step 1e-4.
        let p = Dist::bernoulli(0.8).unwrap();
        let hde = binary_entropy(0.1).unwrap();
        let mut oracle = f64::INFINITY;
        for i in 0..=10_000 {
            let q = i as f64 / 10_000.0;
            let kl = kl_divergence(&Dist::bernoulli(q).unwrap(), &p).unwrap();
            let re = (binary_entropy(q).unwrap() - hde).max(0.0);
            oracle = oracle.min(kl + re);
        }
        let e = exponent_perfect(&p, &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(close(e.value, oracle, 1e-3), "{} vs {oracle}", e.value);
    }

    #[test]
    fn nokey_exponent_binary_cases() {
        let p = Dist::bernoulli(0.5).unwrap();
        // Trivial legitimate distortion: reduces to the perfect exponent.
        let e = exponent_nokey(&p, &zero_spec(2, 2), &ham_spec(0.1), &fast_opts()).unwrap();
        assert!(close(e.value, 0.531004, 2e-3), "{}", e.value);

        // Equal levels: H(D) - H(D_e) = 0 at Q = P, and D(P||P) = 0.
        let e = exponent_nokey(&p, &ham_spec(0.25), &ham_spec(0.25), &fast_opts()).unwrap();
        assert!(e.value.abs() <= 2e-3, "{}", e.value);

        let degenerate = Dist::new(vec![1.0, 0.0]).unwrap();
        assert!(
            exponent_nokey(&degenerate, &ham_spec(0.25), &ham_spec(0.1), &fast_opts()).is_err()
        );
    }

    #[test]
    fn r_alpha_cases() {
        let p = Dist::bernoulli(0.3).unwrap();
        let spec = ham_spec(0.25);
        // Unconstrained: maximized at the uniform source.
        let r = compute_R_alpha(&p, &spec, f64::INFINITY, &fast_opts()).unwrap();
        assert!(close(r, 0.188722, 1e-3), "{r}");
        // alpha = 0: only Q = P.
        let r0 = compute_R_alpha(&p, &spec, 0.0, &fast_opts()).unwrap();
        let expect = binary_entropy(0.3).unwrap() - binary_entropy(0.25).unwrap();
        assert!(close(r0, expect, 1e-5), "{r0} vs {expect}");
        // Tiny ball: within 1e-3 of R(P, D).
        let rt = compute_R_alpha(&p, &spec, 1e-6, &fast_opts()).unwrap();
        assert!(close(rt, expect, 1e-3), "{rt} vs {expect}");
    }

    #[test]
    fn key_exponent_hamming_closed_form() {
        let p = Dist::bernoulli(0.5).unwrap();
        let opts = fast_opts();
        let e = exponent_key(
            &p,
            &ham_spec(0.25),
            &ham_spec(0.1),
            1.0,
            0.1,
            f64::INFINITY,
            &opts,
        )
        .unwrap();
        assert!(close(e.value, 0.442282, 2e-3), "{}", e.value);
        let agree = (e.diagnostics["eq_main"] - e.diagnostics["eq_alt"]).abs();
        assert!(agree <= 2e-3, "forms disagree by {agree}");

        let e = exponent_key(
            &p,
            &ham_spec(0.25),
            &ham_spec(0.1),
            1.0,
            0.3,
            f64::INFINITY,
            &opts,
        )
        .unwrap();
        assert!(close(e.value, 0.531004, 2e-3), "{}", e.value);
        assert_eq!(e.branch, "perfect-floor");
    }

    #[test]
    fn min_key_rate_hamming() {
        let p = Dist::bernoulli(0.5).unwrap();
        let r0 = min_key_rate(
            &p,
            &ham_spec(0.25),
            &ham_spec(0.1),
            1.0,
            f64::INFINITY,
            &fast_opts(),
        )
        .unwrap();
        assert!(close(r0, 0.188722, 2e-3), "{r0}");

        // Both distortions trivial: every term vanishes.
        let r0 = min_key_rate(
            &p,
            &zero_spec(2, 2),
            &zero_spec(2, 2),
            1.0,
            f64::INFINITY,
            &fast_opts(),
        )
        .unwrap();
        assert!(r0.abs() <= 1e-9, "{r0}");
    }

    #[test]
    fn refinability_probe_hamming() {
        let q = Dist::bernoulli(0.5).unwrap();
        let rep = successive_refinability_probe(&q, &ham_spec(0.25), &ham_spec(0.1), &fast_opts())
            .unwrap();
        assert!(rep.refinable);
        assert_eq!(rep.rd_channel_near_optimal, Some(true));

        let rep = successive_refinability_probe(&q, &zero_spec(2, 2), &ham_spec(0.1), &fast_opts())
            .unwrap();
        assert!(rep.refinable);
    }

    #[test]
    fn a4_violation_reported() {
        let p = Dist::bernoulli(0.5).unwrap();
        let e = exponent_key(
            &p,
            &ham_spec(0.25),
            &ham_spec(0.1),
            0.1,
            0.1,
            f64::INFINITY,
            &fast_opts(),
        );
        match e {
            Err(Error::RateInfeasible { r_alpha, .. }) => {
                assert!(close(r_alpha, 0.188722, 1e-3));
            }
            other => panic!("expected A4 violation, got {other:?}"),
        }
    }
}
