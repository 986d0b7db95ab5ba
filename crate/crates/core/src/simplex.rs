//! Distributions, channels, joint laws, divergences and distortion
//! expectations on finite alphabets.
//!
//! All information quantities are in bits (base-2 logarithms). Values are
//! immutable after construction and every operation here is a pure function,
//! so everything in this module is safe to share across threads.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Tolerance for the "sums to one" check at construction time.
pub const SUM_TOL: f64 = 1e-12;

fn check_prob_vec(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::validation(format!("{what}: empty alphabet")));
    }
    for (i, &x) in p.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::validation(format!(
                "{what}: entry {i} is {x}, must be finite and >= 0"
            )));
        }
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::validation(format!(
            "{what}: entries sum to {s}, expected 1 within {SUM_TOL:e}"
        )));
    }
    Ok(())
}

/// Exact rational view of an `f64` (every finite float is a dyadic
/// rational). Reduced to canonical form so equality comparisons hold.
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float").reduced()
}

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    probs: Vec<f64>,
}

impl Dist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_prob_vec(&probs, "Dist")?;
        Ok(Dist { probs })
    }

    /// Explicit renormalization of nonnegative weights. Inputs are never
    /// renormalized implicitly anywhere else.
    pub fn normalize(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::validation("Dist::normalize: empty alphabet"));
        }
        let s: f64 = weights.iter().sum();
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::validation(format!(
                "Dist::normalize: weight sum {s} not positive"
            )));
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::validation(format!(
                    "Dist::normalize: weight {i} is {w}"
                )));
            }
        }
        Ok(Dist {
            probs: weights.iter().map(|w| w / s).collect(),
        })
    }

    pub fn uniform(k: usize) -> Self {
        Dist {
            probs: vec![1.0 / k as f64; k],
        }
    }

    /// Binary distribution (P(0), P(1)) = (1 - p1, p1).
    pub fn bernoulli(p1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) {
            return Err(Error::validation(format!("bernoulli: p1 = {p1}")));
        }
        Ok(Dist {
            probs: vec![1.0 - p1, p1],
        })
    }

    pub fn point_mass(k: usize, i: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[i] = 1.0;
        Dist { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn full_support(&self) -> bool {
        self.probs.iter().all(|&x| x > 0.0)
    }

    /// Lexicographic comparison of the probability vectors, used for
    /// deterministic tie-breaking in the solvers.
    pub fn lex_le(&self, other: &Dist) -> bool {
        for (a, b) in self.probs.iter().zip(other.probs.iter()) {
            if a < b {
                return true;
            }
            if a > b {
                return false;
            }
        }
        true
    }
}

/// A conditional probability table: one output `Dist` per input symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: Vec<Dist>,
}

impl Channel {
    pub fn new(rows: Vec<Dist>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("Channel: no rows"));
        }
        let ny = rows[0].len();
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::validation("Channel: rows of unequal length"));
        }
        Ok(Channel { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Channel::new(rows.into_iter().map(Dist::new).collect::<Result<_>>()?)
    }

    /// Identity channel on a square alphabet.
    pub fn identity(k: usize) -> Self {
        Channel {
            rows: (0..k).map(|i| Dist::point_mass(k, i)).collect(),
        }
    }

    /// Channel ignoring its input: every row equals `out`.
    pub fn independent(nx: usize, out: &Dist) -> Self {
        Channel {
            rows: vec![out.clone(); nx],
        }
    }

    pub fn input_len(&self) -> usize {
        self.rows.len()
    }

    pub fn output_len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &Dist {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x].get(y)
    }
}

/// A joint law over X x Y, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint2 {
    p: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl Joint2 {
    pub fn new(nx: usize, ny: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != nx * ny {
            return Err(Error::validation(format!(
                "Joint2: table has {} entries, expected {}",
                p.len(),
                nx * ny
            )));
        }
        check_prob_vec(&p, "Joint2")?;
        Ok(Joint2 { p, nx, ny })
    }

    /// Joint law induced by a source and a channel: p(x,y) = p(x) w(y|x).
    pub fn from_source_channel(src: &Dist, ch: &Channel) -> Result<Self> {
        if src.len() != ch.input_len() {
            return Err(Error::validation(
                "Joint2::from_source_channel: alphabet mismatch",
            ));
        }
        let (nx, ny) = (src.len(), ch.output_len());
        let mut p = vec![0.0; nx * ny];
        for x in 0..nx {
            for y in 0..ny {
                p[x * ny + y] = src.get(x) * ch.get(x, y);
            }
        }
        Ok(Joint2 { p, nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.ny + y]
    }

    pub fn table(&self) -> &[f64] {
        &self.p
    }

    pub fn marginal_x(&self) -> Dist {
        let mut m = vec![0.0; self.nx];
        for x in 0..self.nx {
            for y in 0..self.ny {
                m[x] += self.get(x, y);
            }
        }
        Dist { probs: clamp_unit(m) }
    }

    pub fn marginal_y(&self) -> Dist {
        let mut m = vec![0.0; self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                m[y] += self.get(x, y);
            }
        }
        Dist { probs: clamp_unit(m) }
    }

    /// Conditional law of X given Y = y, or `None` if P(y) = 0.
    pub fn cond_x_given_y(&self, y: usize) -> Option<Dist> {
        let py: f64 = (0..self.nx).map(|x| self.get(x, y)).sum();
        if py <= 0.0 {
            return None;
        }
        Some(Dist {
            probs: (0..self.nx).map(|x| self.get(x, y) / py).collect(),
        })
    }

    pub fn transpose(&self) -> Joint2 {
        let mut p = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                p[y * self.nx + x] = self.get(x, y);
            }
        }
        Joint2 {
            p,
            nx: self.ny,
            ny: self.nx,
        }
    }
}

/// A joint law over X x Y x V, stored with v fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Joint3 {
    p: Vec<f64>,
    nx: usize,
    ny: usize,
    nv: usize,
}

impl Joint3 {
    pub fn new(nx: usize, ny: usize, nv: usize, p: Vec<f64>) -> Result<Self> {
        if p.len() != nx * ny * nv {
            return Err(Error::validation(format!(
                "Joint3: table has {} entries, expected {}",
                p.len(),
                nx * ny * nv
            )));
        }
        check_prob_vec(&p, "Joint3")?;
        Ok(Joint3 { p, nx, ny, nv })
    }

    /// Joint law p(x,y) w(v | x,y) where `cond` has one row per (x,y) pair,
    /// indexed x * ny + y.
    pub fn from_joint_channel(j: &Joint2, cond: &Channel) -> Result<Self> {
        if cond.input_len() != j.nx() * j.ny() {
            return Err(Error::validation(
                "Joint3::from_joint_channel: conditional rows must be indexed by (x,y)",
            ));
        }
        let (nx, ny, nv) = (j.nx(), j.ny(), cond.output_len());
        let mut p = vec![0.0; nx * ny * nv];
        for x in 0..nx {
            for y in 0..ny {
                for v in 0..nv {
                    p[(x * ny + y) * nv + v] = j.get(x, y) * cond.get(x * ny + y, v);
                }
            }
        }
        Ok(Joint3 { p, nx, ny, nv })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn get(&self, x: usize, y: usize, v: usize) -> f64 {
        self.p[(x * self.ny + y) * self.nv + v]
    }

    pub fn marginal_xy(&self) -> Joint2 {
        let mut p = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for v in 0..self.nv {
                    p[x * self.ny + y] += self.get(x, y, v);
                }
            }
        }
        Joint2 {
            p: clamp_unit(p),
            nx: self.nx,
            ny: self.ny,
        }
    }

    pub fn marginal_xv(&self) -> Joint2 {
        let mut p = vec![0.0; self.nx * self.nv];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for v in 0..self.nv {
                    p[x * self.nv + v] += self.get(x, y, v);
                }
            }
        }
        Joint2 {
            p: clamp_unit(p),
            nx: self.nx,
            ny: self.nv,
        }
    }

    pub fn marginal_yv(&self) -> Joint2 {
        let mut p = vec![0.0; self.ny * self.nv];
        for x in 0..self.nx {
            for y in 0..self.ny {
                for v in 0..self.nv {
                    p[y * self.nv + v] += self.get(x, y, v);
                }
            }
        }
        Joint2 {
            p: clamp_unit(p),
            nx: self.ny,
            ny: self.nv,
        }
    }

    pub fn marginal_y(&self) -> Dist {
        self.marginal_xy().marginal_y()
    }
}

fn clamp_unit(mut v: Vec<f64>) -> Vec<f64> {
    // Marginalization of a valid table can leave -0.0 or 1 + few ulp drift.
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    v
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy in bits, with 0 log 0 = 0.
pub fn entropy(p: &Dist) -> f64 {
    -p.probs().iter().map(|&x| xlog2x(x)).sum::<f64>()
}

/// Binary entropy function H_b(q) in bits.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::validation(format!(
            "binary_entropy: {q} outside [0,1]"
        )));
    }
    Ok(-xlog2x(q) - xlog2x(1.0 - q))
}

/// Kullback-Leibler divergence D(q || p) in bits.
///
/// Returns `f64::INFINITY` when q puts mass where p has none; this is a
/// representable value, never a silently large float.
pub fn kl_divergence(q: &Dist, p: &Dist) -> Result<f64> {
    if q.len() != p.len() {
        return Err(Error::validation(format!(
            "kl_divergence: alphabet sizes {} vs {}",
            q.len(),
            p.len()
        )));
    }
    let mut d = 0.0;
    for (&qi, &pi) in q.probs().iter().zip(p.probs().iter()) {
        if qi > 0.0 {
            if pi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            d += qi * (qi / pi).log2();
        }
    }
    Ok(d.max(0.0))
}

/// Mutual information I(X;Y) of a joint law, in bits.
pub fn mutual_information(j: &Joint2) -> f64 {
    let px = j.marginal_x();
    let py = j.marginal_y();
    let mut i = 0.0;
    for x in 0..j.nx() {
        for y in 0..j.ny() {
            let pxy = j.get(x, y);
            if pxy > 0.0 {
                i += pxy * (pxy / (px.get(x) * py.get(y))).log2();
            }
        }
    }
    i.max(0.0)
}

/// Conditional mutual information I(X;V|Y) = sum_y P(y) I(X;V | Y=y), in bits.
pub fn conditional_mutual_information(j: &Joint3) -> f64 {
    let mut total = 0.0;
    for y in 0..j.ny() {
        let py: f64 = (0..j.nx())
            .map(|x| (0..j.nv()).map(|v| j.get(x, y, v)).sum::<f64>())
            .sum();
        if py <= 0.0 {
            continue;
        }
        // I(X;V | Y=y) under the conditional law.
        let mut px = vec![0.0; j.nx()];
        let mut pv = vec![0.0; j.nv()];
        for x in 0..j.nx() {
            for v in 0..j.nv() {
                let w = j.get(x, y, v) / py;
                px[x] += w;
                pv[v] += w;
            }
        }
        let mut iy = 0.0;
        for x in 0..j.nx() {
            for v in 0..j.nv() {
                let w = j.get(x, y, v) / py;
                if w > 0.0 {
                    iy += w * (w / (px[x] * pv[v])).log2();
                }
            }
        }
        total += py * iy.max(0.0);
    }
    total.max(0.0)
}

/// A distortion table d(x, y) >= 0, indexed (source symbol, reconstruction).
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionMatrix {
    entries: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl DistortionMatrix {
    pub fn new(nx: usize, ny: usize, entries: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || entries.len() != nx * ny {
            return Err(Error::validation(format!(
                "DistortionMatrix: {nx}x{ny} with {} entries",
                entries.len()
            )));
        }
        for (i, &e) in entries.iter().enumerate() {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::validation(format!(
                    "DistortionMatrix: entry ({},{}) is {e}, must be finite and >= 0",
                    i / ny,
                    i % ny
                )));
            }
        }
        Ok(DistortionMatrix { entries, nx, ny })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nx = rows.len();
        let ny = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::validation("DistortionMatrix: ragged rows"));
        }
        DistortionMatrix::new(nx, ny, rows.into_iter().flatten().collect())
    }

    /// Hamming distance on a square alphabet.
    pub fn hamming(k: usize) -> Self {
        let mut entries = vec![1.0; k * k];
        for i in 0..k {
            entries[i * k + i] = 0.0;
        }
        DistortionMatrix { entries, nx: k, ny: k }
    }

    /// The all-zero table (a trivial distortion constraint).
    pub fn zero(nx: usize, ny: usize) -> Self {
        DistortionMatrix {
            entries: vec![0.0; nx * ny],
            nx,
            ny,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.ny + y]
    }

    pub fn get_exact(&self, x: usize, y: usize) -> BigRational {
        f64_to_rational(self.get(x, y))
    }

    pub fn row_min(&self, x: usize) -> f64 {
        (0..self.ny).map(|y| self.get(x, y)).fold(f64::INFINITY, f64::min)
    }

    /// D_min = max over source symbols of the row minimum (assumption A3).
    pub fn d_min(&self) -> f64 {
        (0..self.nx).map(|x| self.row_min(x)).fold(0.0, f64::max)
    }

    /// Largest entry of the table.
    pub fn d_max(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0.0)
    }
}

/// (d_min, d_max) of a distortion table: the max-min feasibility floor of
/// assumption A3 and the largest entry.
pub fn min_distortion_levels(m: &DistortionMatrix) -> (f64, f64) {
    (m.d_min(), m.d_max())
}

/// A distortion level carried both as a float (for the convex solvers) and as
/// an exact rational (for type-level boundary comparisons).
#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    value: f64,
    exact: BigRational,
}

impl Level {
    /// Level from a float; the exact view is the float's own dyadic value.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::validation(format!("Level: {value}")));
        }
        Ok(Level {
            value,
            exact: f64_to_rational(value),
        })
    }

    /// Level from an exact fraction, e.g. 1/3, so that boundary cases like
    /// E[d] = D at blocklength 6 compare exactly.
    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num < 0 {
            return Err(Error::validation(format!("Level: {num}/{den}")));
        }
        let exact = BigRational::new(BigInt::from(num), BigInt::from(den));
        Ok(Level {
            value: num as f64 / den as f64,
            exact,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }
}

/// A distortion table together with its allowed level.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    pub matrix: DistortionMatrix,
    pub level: Level,
}

impl DistortionSpec {
    pub fn new(matrix: DistortionMatrix, level: Level) -> Result<Self> {
        // A3 feasibility: the level must reach every source symbol's best
        // reconstruction.
        let d_min = matrix.d_min();
        if level.value() < d_min && level.exact() < &f64_to_rational(d_min) {
            return Err(Error::infeasible(format!(
                "distortion level {} below d_min = {}",
                level.value(),
                d_min
            )));
        }
        Ok(DistortionSpec { matrix, level })
    }

    pub fn with_level_f64(matrix: DistortionMatrix, level: f64) -> Result<Self> {
        DistortionSpec::new(matrix, Level::from_f64(level)?)
    }

    pub fn with_level_ratio(matrix: DistortionMatrix, num: i64, den: i64) -> Result<Self> {
        DistortionSpec::new(matrix, Level::from_ratio(num, den)?)
    }

    pub fn level_f64(&self) -> f64 {
        self.level.value()
    }

    pub fn level_exact(&self) -> &BigRational {
        self.level.exact()
    }
}

/// Expected distortion of a joint law under a distortion table.
pub fn expected_distortion(j: &Joint2, m: &DistortionMatrix) -> Result<f64> {
    if j.nx() != m.nx() || j.ny() != m.ny() {
        return Err(Error::validation(format!(
            "expected_distortion: joint {}x{} vs matrix {}x{}",
            j.nx(),
            j.ny(),
            m.nx(),
            m.ny()
        )));
    }
    let mut e = 0.0;
    for x in 0..j.nx() {
        for y in 0..j.ny() {
            e += j.get(x, y) * m.get(x, y);
        }
    }
    Ok(e)
}

/// Exact-rational expected distortion of an integer count table, used for
/// boundary-exact feasibility tests at the type level.
pub fn counts_distortion_exact(counts: &[u64], m: &DistortionMatrix) -> BigRational {
    let mut acc = BigRational::zero();
    for x in 0..m.nx() {
        for y in 0..m.ny() {
            let c = counts[x * m.ny() + y];
            if c > 0 {
                acc += m.get_exact(x, y) * BigRational::from_integer(BigInt::from(c));
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn entropy_examples() {
        assert!(close(entropy(&Dist::new(vec![0.5, 0.5]).unwrap()), 1.0, 1e-12));
        assert!(close(entropy(&Dist::new(vec![1.0, 0.0]).unwrap()), 0.0, 1e-12));
        assert!(close(
            entropy(&Dist::new(vec![0.25, 0.75]).unwrap()),
            0.811278,
            1e-6
        ));
    }

    #[test]
    fn binary_entropy_examples() {
        assert!(close(binary_entropy(0.5).unwrap(), 1.0, 1e-12));
        assert!(close(binary_entropy(0.0).unwrap(), 0.0, 1e-12));
        assert!(close(binary_entropy(0.1).unwrap(), 0.468996, 1e-6));
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
    }

    #[test]
    fn kl_examples() {
        let p = Dist::new(vec![0.3, 0.7]).unwrap();
        assert!(close(kl_divergence(&p, &p).unwrap(), 0.0, 1e-12));

        let q = Dist::new(vec![1.0, 0.0]).unwrap();
        let u = Dist::new(vec![0.5, 0.5]).unwrap();
        assert!(close(kl_divergence(&q, &u).unwrap(), 1.0, 1e-12));

        let q2 = Dist::new(vec![0.25, 0.75]).unwrap();
        assert!(close(kl_divergence(&q2, &u).unwrap(), 0.188722, 1e-6));

        // q with mass where p has none: +infinity, representable.
        let p0 = Dist::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(kl_divergence(&u, &p0).unwrap(), f64::INFINITY);

        let tri = Dist::uniform(3);
        assert!(kl_divergence(&u, &tri).is_err());
    }

    #[test]
    fn mutual_information_examples() {
        let prod = Joint2::new(2, 2, vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!(close(mutual_information(&prod), 0.0, 1e-12));

        let ident = Joint2::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(close(mutual_information(&ident), 1.0, 1e-12));

        let j = Joint2::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        assert!(close(mutual_information(&j), 0.278072, 1e-6));
    }

    #[test]
    fn conditional_mutual_information_examples() {
        // V independent of (X,Y).
        let mut p = vec![0.0; 8];
        for x in 0..2 {
            for y in 0..2 {
                for v in 0..2 {
                    p[(x * 2 + y) * 2 + v] = 0.25 * 0.5;
                }
            }
        }
        let j = Joint3::new(2, 2, 2, p).unwrap();
        assert!(close(conditional_mutual_information(&j), 0.0, 1e-12));

        // Y constant, V = X uniform: reduces to I(X;X) = 1 bit.
        let mut p = vec![0.0; 8];
        p[(0 * 2 + 0) * 2 + 0] = 0.5;
        p[(1 * 2 + 0) * 2 + 1] = 0.5;
        let j = Joint3::new(2, 2, 2, p).unwrap();
        assert!(close(conditional_mutual_information(&j), 1.0, 1e-12));

        // V = X on top of the correlated joint: I(X;X|Y) = H(X|Y).
        let base = Joint2::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        let mut p = vec![0.0; 8];
        for x in 0..2 {
            for y in 0..2 {
                p[(x * 2 + y) * 2 + x] = base.get(x, y);
            }
        }
        let j = Joint3::new(2, 2, 2, p).unwrap();
        // I(X;X|Y) = H(X|Y) = H(X,Y) - H(Y) = 1.721928 - 1.
        assert!(close(conditional_mutual_information(&j), 0.721928, 1e-6));
    }

    #[test]
    fn expected_distortion_examples() {
        let ham = DistortionMatrix::hamming(2);
        let ident = Joint2::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(close(expected_distortion(&ident, &ham).unwrap(), 0.0, 1e-12));

        let prod = Joint2::new(2, 2, vec![0.25, 0.25, 0.25, 0.25]).unwrap();
        assert!(close(expected_distortion(&prod, &ham).unwrap(), 0.5, 1e-12));

        let j = Joint2::new(2, 2, vec![0.4, 0.1, 0.1, 0.4]).unwrap();
        assert!(close(expected_distortion(&j, &ham).unwrap(), 0.2, 1e-12));

        let bad = DistortionMatrix::hamming(3);
        assert!(expected_distortion(&j, &bad).is_err());
    }

    #[test]
    fn distortion_levels() {
        let ham = DistortionMatrix::hamming(2);
        assert_eq!(min_distortion_levels(&ham), (0.0, 1.0));

        let m = DistortionMatrix::from_rows(vec![vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert_eq!(min_distortion_levels(&m), (1.0, 3.0));

        let c = DistortionMatrix::new(2, 2, vec![0.7; 4]).unwrap();
        assert_eq!(min_distortion_levels(&c), (0.7, 0.7));
    }

    #[test]
    fn dist_validation() {
        assert!(Dist::new(vec![]).is_err());
        assert!(Dist::new(vec![0.5, 0.6]).is_err());
        assert!(Dist::new(vec![-0.1, 1.1]).is_err());
        assert!(Dist::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        let d = Dist::normalize(vec![2.0, 6.0]).unwrap();
        assert!(close(d.get(0), 0.25, 1e-15));
    }

    #[test]
    fn level_exactness() {
        let third = Level::from_ratio(1, 3).unwrap();
        // The float view rounds, the exact view does not.
        assert!(third.value() < 1.0 / 3.0 + 1e-16);
        let two_sixths = BigRational::new(BigInt::from(2), BigInt::from(6));
        assert_eq!(third.exact(), &two_sixths);

        let f = Level::from_f64(1.0 / 3.0).unwrap();
        assert!(f.exact() < third.exact());
    }
}
