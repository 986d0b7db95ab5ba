//! Convex inner solvers: the rate-distortion function, its inverse, and the
//! conditional rate-distortion function with side information.
//!
//! All of these are alternating-minimization (Blahut-Arimoto style) solvers
//! run at a fixed Lagrangian slope on the distortion, with an outer bisection
//! on the slope to meet the expected-distortion target. The conditional
//! problem separates into one standard subproblem per side-information
//! symbol, coupled only through the shared slope.

use crate::error::{Error, Result};
use crate::simplex::{Channel, Dist, DistortionMatrix, DistortionSpec, Joint2};

/// Inner fixed-point termination: relative change of the Lagrangian below
/// this, or [`MAX_INNER_ITERS`] iterations (flat regions near the distortion
/// floor converge slowly; non-convergence is flagged, not an error).
pub const INNER_TOL: f64 = 1e-11;
pub const MAX_INNER_ITERS: u64 = 5000;
/// Slope bisection stops when the achieved distortion is within this of the
/// target, or the bracket is narrower than [`SLOPE_BRACKET_TOL`].
pub const DIST_TOL: f64 = 1e-7;
pub const SLOPE_BRACKET_TOL: f64 = 1e-10;

/// Result of a rate-distortion solve.
#[derive(Debug, Clone)]
pub struct RDResult {
    /// R(P, D) in bits.
    pub value: f64,
    /// The reproduction channel achieving it.
    pub argmin_channel: Channel,
    /// Lagrangian slope at the solution (infinite at the distortion floor).
    pub lagrange_slope: f64,
    pub achieved_distortion: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// Result of a conditional rate-distortion solve.
#[derive(Debug, Clone)]
pub struct CondRDResult {
    /// R(P_XY, D_e) = min I(X;V|Y) in bits.
    pub value: f64,
    /// Reproduction channel P(v | x,y); rows are indexed x * ny + y.
    pub argmin_channel: Channel,
    /// Slope on E[d_e] per y-slice; the slices share a single scalar.
    pub per_y_slopes: Vec<f64>,
    pub achieved_distortion: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// One Blahut-Arimoto subproblem: source `p`, reproduction cost rows of `d`.
/// The kernel `k[x][y]` is either 2^(-lambda d(x,y)) (row-rescaled for
/// stability) or a 0/1 support indicator for the slope -> infinity corner.
struct BaProblem<'a> {
    p: &'a [f64],
    kernel: Vec<f64>,
    d: &'a DistortionMatrix,
    ny: usize,
    lambda: f64,
}

struct BaOutcome {
    mi: f64,
    dist: f64,
    rows: Vec<f64>,
    iters: u64,
    converged: bool,
}

impl<'a> BaProblem<'a> {
    fn with_slope(p: &'a [f64], d: &'a DistortionMatrix, lambda: f64) -> Self {
        let (nx, ny) = (d.nx(), d.ny());
        let mut kernel = vec![0.0; nx * ny];
        for x in 0..nx {
            let m = d.row_min(x);
            for y in 0..ny {
                kernel[x * ny + y] = (-lambda * (d.get(x, y) - m)).exp2();
            }
        }
        BaProblem {
            p,
            kernel,
            d,
            ny,
            lambda,
        }
    }

    /// Support indicator restricted to each row's distortion minimizers.
    fn restricted(p: &'a [f64], d: &'a DistortionMatrix) -> Self {
        let (nx, ny) = (d.nx(), d.ny());
        let mut kernel = vec![0.0; nx * ny];
        for x in 0..nx {
            let m = d.row_min(x);
            for y in 0..ny {
                if d.get(x, y) <= m + 1e-12 * (1.0 + m) {
                    kernel[x * ny + y] = 1.0;
                }
            }
        }
        BaProblem {
            p,
            kernel,
            d,
            ny,
            lambda: 0.0,
        }
    }

    /// Run the fixed-point iteration from the uniform output law. Each call
    /// starts fresh: reusing the output law across different slopes lets the
    /// iteration stall on a flat Lagrangian before the distortion has
    /// re-converged, which silently breaks the outer bisection.
    fn solve(&self) -> BaOutcome {
        let ny = self.ny;
        let nx = self.p.len();
        let mut q = vec![1.0 / ny as f64; ny];
        let mut rows = vec![0.0; nx * ny];
        let mut prev = f64::INFINITY;
        let mut prev_dist = f64::INFINITY;
        let mut iters = 0;
        let mut converged = false;
        while iters < MAX_INNER_ITERS {
            iters += 1;
            // w(y|x) proportional to q(y) kernel(x,y); then q <- sum_x p w.
            let mut qn = vec![0.0; ny];
            for x in 0..nx {
                if self.p[x] <= 0.0 {
                    continue;
                }
                let base = x * ny;
                let mut z = 0.0;
                for y in 0..ny {
                    let w = q[y] * self.kernel[base + y];
                    rows[base + y] = w;
                    z += w;
                }
                let inv = 1.0 / z;
                for y in 0..ny {
                    rows[base + y] *= inv;
                    qn[y] += self.p[x] * rows[base + y];
                }
            }
            q = qn;
            let (mi, dist) = self.evaluate(&rows, &q);
            let val = mi + self.lambda * dist;
            if (prev - val).abs() <= INNER_TOL * val.abs().max(1.0)
                && (prev_dist - dist).abs() <= 1e-10 * (1.0 + dist)
            {
                converged = true;
                break;
            }
            prev = val;
            prev_dist = dist;
        }
        let (mi, dist) = self.evaluate(&rows, &q);
        // Rows for zero-mass source symbols: point mass on a best
        // reconstruction, so the returned channel is always valid.
        for x in 0..nx {
            if self.p[x] <= 0.0 {
                let m = self.d.row_min(x);
                let best = (0..ny)
                    .find(|&y| self.d.get(x, y) <= m + 1e-12 * (1.0 + m))
                    .unwrap_or(0);
                for y in 0..ny {
                    rows[x * ny + y] = if y == best { 1.0 } else { 0.0 };
                }
            }
        }
        BaOutcome {
            mi,
            dist,
            rows,
            iters,
            converged,
        }
    }

    fn evaluate(&self, rows: &[f64], q: &[f64]) -> (f64, f64) {
        let ny = self.ny;
        let mut mi = 0.0;
        let mut dist = 0.0;
        for x in 0..self.p.len() {
            let px = self.p[x];
            if px <= 0.0 {
                continue;
            }
            for y in 0..ny {
                let w = rows[x * ny + y];
                if w > 0.0 {
                    mi += px * w * (w / q[y]).log2();
                    dist += px * w * self.d.get(x, y);
                }
            }
        }
        (mi.max(0.0), dist)
    }
}

fn channel_from_rows(rows: Vec<f64>, nx: usize, ny: usize) -> Channel {
    let mut out = Vec::with_capacity(nx);
    for x in 0..nx {
        let row = rows[x * ny..(x + 1) * ny].to_vec();
        out.push(Dist::normalize(row).expect("solver row"));
    }
    Channel::new(out).expect("solver channel")
}

/// Distortion floor reachable by any channel: sum_x p(x) min_y d(x,y).
fn distortion_floor(p: &[f64], d: &DistortionMatrix) -> f64 {
    (0..p.len()).map(|x| p[x] * d.row_min(x)).sum()
}

/// Smallest expected distortion achievable with a constant reproduction.
fn blind_floor(p: &[f64], d: &DistortionMatrix) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for y in 0..d.ny() {
        let e: f64 = (0..p.len()).map(|x| p[x] * d.get(x, y)).sum();
        if e < best {
            best = e;
            arg = y;
        }
    }
    (best, arg)
}

/// Rate-distortion curve point for any level at or above the distortion
/// floor of `p`'s support. No A3 gating here; `rd_function` adds it.
pub(crate) fn rd_curve(p: &Dist, d: &DistortionMatrix, level: f64) -> Result<RDResult> {
    if p.len() != d.nx() {
        return Err(Error::validation("rd: source/matrix alphabet mismatch"));
    }
    let probs = p.probs();
    let floor = distortion_floor(probs, d);
    if level < floor - 1e-12 * (1.0 + floor) {
        return Err(Error::infeasible(format!(
            "distortion level {level} below achievable floor {floor}"
        )));
    }
    let (d0, blind) = blind_floor(probs, d);
    if level >= d0 - 1e-15 * (1.0 + d0) {
        // A constant reproduction meets the level: R = 0.
        return Ok(RDResult {
            value: 0.0,
            argmin_channel: Channel::independent(p.len(), &Dist::point_mass(d.ny(), blind)),
            lagrange_slope: 0.0,
            achieved_distortion: d0,
            iterations: 0,
            converged: true,
        });
    }
    let corner = |iters: u64| -> RDResult {
        let out = BaProblem::restricted(probs, d).solve();
        RDResult {
            value: out.mi,
            argmin_channel: channel_from_rows(out.rows, p.len(), d.ny()),
            lagrange_slope: f64::INFINITY,
            achieved_distortion: out.dist,
            iterations: iters + out.iters,
            converged: out.converged,
        }
    };
    if level <= floor + 1e-12 * (1.0 + floor) {
        // Bisection cannot reach the corner; solve the infinite-slope limit
        // directly on the row-minimizing supports.
        return Ok(corner(0));
    }

    let spread = d.d_max() - d.d_min();
    let lambda_max = 50.0 / (spread + 1e-9);
    let mut iters = 0u64;
    let hi_out = BaProblem::with_slope(probs, d, lambda_max).solve();
    iters += hi_out.iters;
    if hi_out.dist > level {
        // The level sits between the corner and what the largest slope
        // reaches; the restricted solve is the accurate answer there.
        return Ok(corner(iters));
    }
    let mut lo = 0.0;
    let mut hi = lambda_max;
    let mut best = hi_out;
    let mut best_lambda = lambda_max;
    let mut all_converged = best.converged;
    while (best.dist - level).abs() > DIST_TOL && hi - lo > SLOPE_BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        let out = BaProblem::with_slope(probs, d, mid).solve();
        iters += out.iters;
        all_converged &= out.converged;
        if out.dist <= level {
            hi = mid;
            best = out;
            best_lambda = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RDResult {
        value: best.mi,
        argmin_channel: channel_from_rows(best.rows, p.len(), d.ny()),
        lagrange_slope: best_lambda,
        achieved_distortion: best.dist,
        iterations: iters,
        converged: all_converged,
    })
}

/// The rate-distortion function R(P, D) in bits.
pub fn rd_function(p: &Dist, spec: &DistortionSpec) -> Result<RDResult> {
    // Feasibility on the support of p (A3): the level must reach every
    // supported symbol's best reconstruction.
    let sup_min = (0..p.len())
        .filter(|&x| p.get(x) > 0.0)
        .map(|x| spec.matrix.row_min(x))
        .fold(0.0, f64::max);
    if spec.level_f64() < sup_min - 1e-12 * (1.0 + sup_min) {
        return Err(Error::infeasible(format!(
            "level {} below d_min {} on the source support",
            spec.level_f64(),
            sup_min
        )));
    }
    rd_curve(p, &spec.matrix, spec.level_f64())
}

/// Distortion-rate function: min E[d(X,Y)] over channels with I(X;Y) <= R.
pub fn distortion_rate(p: &Dist, d: &DistortionMatrix, rate: f64) -> Result<f64> {
    if rate < 0.0 {
        return Err(Error::validation(format!("distortion_rate: R = {rate}")));
    }
    let probs = p.probs();
    let floor = distortion_floor(probs, d);
    let (d0, _) = blind_floor(probs, d);
    if rate <= 1e-15 {
        return Ok(d0);
    }
    // Rate needed at the distortion floor.
    let floor_rate = BaProblem::restricted(probs, d).solve().mi;
    if rate >= floor_rate - 1e-12 {
        return Ok(floor);
    }
    let mut lo = floor;
    let mut hi = d0;
    // R(D) is decreasing in D; find the smallest D with R(D) <= rate.
    while hi - lo > 1e-11 * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        let r = rd_curve(p, d, mid)?.value;
        if r <= rate {
            hi = mid;
        } else {
            lo = mid;
        }
        if (r - rate).abs() <= 1e-9 {
            break;
        }
    }
    Ok(hi)
}

struct Slice {
    py: f64,
    cond: Vec<f64>,
}

/// Value-only conditional rate-distortion solve, skipping channel assembly.
/// `hint` warm-starts the slope bracket; returns (value, slope). This is the
/// hot path of the outer channel searches.
pub(crate) fn conditional_rd_value(
    j: &Joint2,
    spec_e: &DistortionSpec,
    hint: Option<f64>,
) -> Result<(f64, f64)> {
    let d = &spec_e.matrix;
    if j.nx() != d.nx() {
        return Err(Error::validation(
            "conditional_rd: joint/matrix source alphabet mismatch",
        ));
    }
    let (nx, ny) = (j.nx(), j.ny());
    let level = spec_e.level_f64();
    let mut slices: Vec<Slice> = Vec::with_capacity(ny);
    for y in 0..ny {
        let py: f64 = (0..nx).map(|x| j.get(x, y)).sum();
        if py <= 0.0 {
            continue;
        }
        slices.push(Slice {
            py,
            cond: (0..nx).map(|x| j.get(x, y) / py).collect(),
        });
    }
    if slices.is_empty() {
        return Err(Error::validation("conditional_rd: joint law has no mass"));
    }
    let floor: f64 = slices
        .iter()
        .map(|s| s.py * distortion_floor(&s.cond, d))
        .sum();
    if level < floor - 1e-12 * (1.0 + floor) {
        return Err(Error::infeasible(format!(
            "eavesdropper level {level} below achievable floor {floor}"
        )));
    }
    let d0: f64 = slices
        .iter()
        .map(|s| s.py * blind_floor(&s.cond, d).0)
        .sum();
    if level >= d0 - 1e-15 * (1.0 + d0) {
        return Ok((0.0, 0.0));
    }
    let run = |slices: &[Slice], lambda: Option<f64>| -> (f64, f64) {
        let mut mi = 0.0;
        let mut dist = 0.0;
        for s in slices.iter() {
            let prob = match lambda {
                Some(l) => BaProblem::with_slope(&s.cond, d, l),
                None => BaProblem::restricted(&s.cond, d),
            };
            let out = prob.solve();
            mi += s.py * out.mi;
            dist += s.py * out.dist;
        }
        (mi, dist)
    };
    if level <= floor + 1e-12 * (1.0 + floor) {
        let (mi, _) = run(&slices, None);
        return Ok((mi, f64::INFINITY));
    }
    let spread = d.d_max() - d.d_min();
    let lambda_max = 50.0 / (spread + 1e-9);
    // Establish a bracket [lo, hi] with dist(hi) <= level, preferring a
    // narrow one around the hint.
    let mut lo = 0.0;
    let mut hi = lambda_max;
    let mut best: Option<(f64, f64, f64)> = None; // (mi, dist, lambda)
    if let Some(h) = hint {
        if h.is_finite() && h > 0.0 {
            let mut cand = (h * 2.0).min(lambda_max);
            let mut known_infeasible = 0.0_f64;
            let mut expanded = false;
            loop {
                let (mi, dist) = run(&slices, Some(cand));
                if dist <= level {
                    hi = cand;
                    best = Some((mi, dist, cand));
                    if expanded {
                        lo = known_infeasible;
                    } else {
                        // Walk downward until the lower end is on the
                        // infeasible side (or pinned at zero).
                        lo = cand / 4.0;
                        loop {
                            if lo <= 1e-6 {
                                lo = 0.0;
                                break;
                            }
                            let (mi2, dist2) = run(&slices, Some(lo));
                            if dist2 > level {
                                break;
                            }
                            hi = lo;
                            best = Some((mi2, dist2, lo));
                            lo /= 4.0;
                        }
                    }
                    break;
                }
                known_infeasible = cand;
                expanded = true;
                if cand >= lambda_max {
                    lo = known_infeasible;
                    hi = lambda_max;
                    break;
                }
                cand = (cand * 4.0).min(lambda_max);
            }
        }
    }
    if best.is_none() {
        let (mi, dist) = run(&slices, Some(hi));
        if dist > level {
            let (mi, _) = run(&slices, None);
            return Ok((mi, f64::INFINITY));
        }
        best = Some((mi, dist, hi));
    }
    let (mut best_mi, mut best_dist, mut best_l) = best.unwrap();
    while (best_dist - level).abs() > DIST_TOL && hi - lo > SLOPE_BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        let (mi, dist) = run(&slices, Some(mid));
        if dist <= level {
            hi = mid;
            best_mi = mi;
            best_dist = dist;
            best_l = mid;
        } else {
            lo = mid;
        }
    }
    Ok((best_mi.max(0.0), best_l))
}

/// Conditional rate-distortion with side information:
/// min I(X;V|Y) over P(v|x,y) subject to E[d_e(X,V)] <= level.
pub fn conditional_rd(j: &Joint2, spec_e: &DistortionSpec) -> Result<CondRDResult> {
    let d = &spec_e.matrix;
    if j.nx() != d.nx() {
        return Err(Error::validation(
            "conditional_rd: joint/matrix source alphabet mismatch",
        ));
    }
    let (nx, ny, nv) = (j.nx(), j.ny(), d.ny());
    let level = spec_e.level_f64();
    let py_all: Vec<f64> = (0..ny)
        .map(|y| (0..nx).map(|x| j.get(x, y)).sum())
        .collect();
    let mut slices: Vec<(usize, Slice)> = Vec::new();
    for y in 0..ny {
        if py_all[y] <= 0.0 {
            continue;
        }
        let cond: Vec<f64> = (0..nx).map(|x| j.get(x, y) / py_all[y]).collect();
        slices.push((y, Slice { py: py_all[y], cond }));
    }
    if slices.is_empty() {
        return Err(Error::validation("conditional_rd: joint law has no mass"));
    }

    // Placeholder rows (point mass on each x's best reconstruction) for
    // zero-mass slices, overwritten below for active ones.
    let mut rows = vec![0.0; nx * ny * nv];
    for x in 0..nx {
        let m = d.row_min(x);
        let best = (0..nv)
            .find(|&v| d.get(x, v) <= m + 1e-12 * (1.0 + m))
            .unwrap_or(0);
        for y in 0..ny {
            rows[(x * ny + y) * nv + best] = 1.0;
        }
    }
    let install =
        |rows: &mut Vec<f64>, y: usize, slice_rows: &[f64]| {
            for x in 0..nx {
                for v in 0..nv {
                    rows[(x * ny + y) * nv + v] = slice_rows[x * nv + v];
                }
            }
        };
    let finish = |rows: Vec<f64>,
                  value: f64,
                  slope: f64,
                  dist: f64,
                  iters: u64,
                  conv: bool| CondRDResult {
        value: value.max(0.0),
        argmin_channel: channel_from_rows(rows, nx * ny, nv),
        per_y_slopes: vec![slope; ny],
        achieved_distortion: dist,
        iterations: iters,
        converged: conv,
    };

    let floor: f64 = slices
        .iter()
        .map(|(_, s)| s.py * distortion_floor(&s.cond, d))
        .sum();
    if level < floor - 1e-12 * (1.0 + floor) {
        return Err(Error::infeasible(format!(
            "eavesdropper level {level} below achievable floor {floor}"
        )));
    }
    let d0: f64 = slices
        .iter()
        .map(|(_, s)| s.py * blind_floor(&s.cond, d).0)
        .sum();
    if level >= d0 - 1e-15 * (1.0 + d0) {
        // Per-slice constant reconstructions reach the level: value 0.
        let mut total = 0.0;
        for (y, s) in &slices {
            let (e, v) = blind_floor(&s.cond, d);
            total += s.py * e;
            let mut slice_rows = vec![0.0; nx * nv];
            for x in 0..nx {
                slice_rows[x * nv + v] = 1.0;
            }
            install(&mut rows, *y, &slice_rows);
        }
        return Ok(finish(rows, 0.0, 0.0, total, 0, true));
    }

    let run = |slices: &[(usize, Slice)], lambda: Option<f64>| -> (f64, f64, u64, bool) {
        let mut mi = 0.0;
        let mut dist = 0.0;
        let mut iters = 0;
        let mut conv = true;
        for (_, s) in slices.iter() {
            let prob = match lambda {
                Some(l) => BaProblem::with_slope(&s.cond, d, l),
                None => BaProblem::restricted(&s.cond, d),
            };
            let out = prob.solve();
            mi += s.py * out.mi;
            dist += s.py * out.dist;
            iters += out.iters;
            conv &= out.converged;
        }
        (mi, dist, iters, conv)
    };
    let install_all = |rows: &mut Vec<f64>, slices: &[(usize, Slice)], lambda: Option<f64>| {
        for (y, s) in slices.iter() {
            let prob = match lambda {
                Some(l) => BaProblem::with_slope(&s.cond, d, l),
                None => BaProblem::restricted(&s.cond, d),
            };
            let out = prob.solve();
            install(rows, *y, &out.rows);
        }
    };

    if level <= floor + 1e-12 * (1.0 + floor) {
        // Infinite-slope corner: restrict each x to its distortion
        // minimizers, per slice.
        let (mi, dist, iters, conv) = run(&slices, None);
        install_all(&mut rows, &slices, None);
        return Ok(finish(rows, mi, f64::INFINITY, dist, iters, conv));
    }

    let spread = d.d_max() - d.d_min();
    let lambda_max = 50.0 / (spread + 1e-9);
    let (mut best_mi, hi_dist, mut iters, mut conv) = run(&slices, Some(lambda_max));
    if hi_dist > level {
        let (mi, dist, it, cv) = run(&slices, None);
        install_all(&mut rows, &slices, None);
        return Ok(finish(rows, mi, f64::INFINITY, dist, iters + it, cv));
    }
    let mut lo = 0.0;
    let mut hi = lambda_max;
    let mut best_dist = hi_dist;
    while (best_dist - level).abs() > DIST_TOL && hi - lo > SLOPE_BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        let (mi, dist, it, cv) = run(&slices, Some(mid));
        iters += it;
        conv &= cv;
        if dist <= level {
            hi = mid;
            best_mi = mi;
            best_dist = dist;
        } else {
            lo = mid;
        }
    }
    install_all(&mut rows, &slices, Some(hi));
    Ok(finish(rows, best_mi, hi, best_dist, iters, conv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::binary_entropy;

    fn ham2_spec(level: f64) -> DistortionSpec {
        DistortionSpec::with_level_f64(DistortionMatrix::hamming(2), level).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn binary_rd_curve() {
        let p = Dist::bernoulli(0.5).unwrap();
        let r = rd_function(&p, &ham2_spec(0.25)).unwrap();
        assert!(close(r.value, 1.0 - binary_entropy(0.25).unwrap(), 1e-5), "{}", r.value);
        assert!(r.achieved_distortion <= 0.25 + 1e-9);

        // Constant reproduction feasible.
        let r = rd_function(&p, &ham2_spec(1.0)).unwrap();
        assert_eq!(r.value, 0.0);

        // Lossless corner equals the entropy.
        let r = rd_function(&p, &ham2_spec(0.0)).unwrap();
        assert!(close(r.value, 1.0, 1e-9));
    }

    #[test]
    fn skewed_binary_rd_matches_formula() {
        // R(D) = H(q) - H(D) for D < min(q, 1-q).
        let p = Dist::bernoulli(0.3).unwrap();
        let r = rd_function(&p, &ham2_spec(0.1)).unwrap();
        let expect = binary_entropy(0.3).unwrap() - binary_entropy(0.1).unwrap();
        assert!(close(r.value, expect, 1e-5), "{} vs {expect}", r.value);
    }

    #[test]
    fn infeasible_level_rejected() {
        // Row minima 1 and 1, so d_min = 1; a level of 0.5 is infeasible.
        let m = DistortionMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!(DistortionSpec::with_level_f64(m, 0.5).is_err());
    }

    #[test]
    fn distortion_rate_examples() {
        let p = Dist::bernoulli(0.5).unwrap();
        let ham = DistortionMatrix::hamming(2);
        assert!(close(distortion_rate(&p, &ham, 1.0).unwrap(), 0.0, 1e-9));
        assert!(close(distortion_rate(&p, &ham, 0.0).unwrap(), 0.5, 1e-12));
        let d = distortion_rate(&p, &ham, 0.188722).unwrap();
        assert!(close(d, 0.25, 1e-5), "{d}");
    }

    #[test]
    fn conditional_rd_identity_coupling() {
        let j = Joint2::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        for level in [0.0, 0.1, 0.7] {
            let r = conditional_rd(&j, &ham2_spec(level)).unwrap();
            assert!(close(r.value, 0.0, 1e-9), "level {level}: {}", r.value);
        }
    }

    #[test]
    fn conditional_rd_independent_side_info() {
        // X independent of Y: side information is useless, value matches the
        // unconditional rate-distortion function.
        let j = Joint2::new(2, 2, vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        let r = conditional_rd(&j, &ham2_spec(0.1)).unwrap();
        let expect = 1.0 - binary_entropy(0.1).unwrap();
        assert!(close(r.value, expect, 1e-5), "{} vs {expect}", r.value);

        // Level at the largest entry: zero rate.
        let r = conditional_rd(&j, &ham2_spec(1.0)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn conditional_rd_zero_level_is_cond_entropy() {
        // D_e = 0 forces V = X, so the value is H(X|Y).
        let j = Joint2::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let r = conditional_rd(&j, &ham2_spec(0.0)).unwrap();
        let hxy = 0.721928; // H(X|Y) of this joint
        assert!(close(r.value, hxy, 1e-5), "{}", r.value);
    }

    #[test]
    fn conditional_rd_monotone_convex_in_level() {
        let j = Joint2::new(2, 2, vec![0.35, 0.15, 0.1, 0.4]).unwrap();
        let levels = [0.02, 0.08, 0.14, 0.2, 0.26, 0.32];
        let vals: Vec<f64> = levels
            .iter()
            .map(|&l| conditional_rd(&j, &ham2_spec(l)).unwrap().value)
            .collect();
        for w in vals.windows(2) {
            assert!(w[1] <= w[0] + 1e-8, "monotone: {vals:?}");
        }
        for i in 1..levels.len() - 1 {
            // Equally spaced grid: midpoint value below the chord.
            assert!(
                vals[i] <= 0.5 * (vals[i - 1] + vals[i + 1]) + 1e-6,
                "convex: {vals:?}"
            );
        }
    }
}
