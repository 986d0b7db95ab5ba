//! Exact adversary evaluation engines: optimal (MAP) guessing given the
//! public observation, genie-aided MAP given the source type, the two-stage
//! type-guessing strategy, blind guessing, and the key-guessing strategy for
//! keyed systems. Success probabilities are exact rationals; Monte Carlo
//! sampling (with a Wilson interval) is used only as a labeled fallback when
//! an exact path's enumeration guard is exceeded.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::par::par_map;
use crate::rd::{conditional_rd, rd_curve};
use crate::simplex::{f64_to_rational, Dist, DistortionSpec};
use crate::types_lab::{
    counts_multinomial, enumerate_type_class, joint_types_given_marginal_y, pstar_n, JointType2,
    Seq, TypeVec,
};

use super::{
    exact_two_pow, AdversaryReport, BlurSystem, KeyedSystem, Message, SuccessProb,
};

// ---------------------------------------------------------------------------
// Ball membership.

enum BallTest<'a> {
    /// Binary alphabet with a symmetric zero-diagonal distortion: membership
    /// depends only on the mismatch count. Sequences are bit masks.
    BinaryHamming { mmax: u32 },
    /// General exact test via the pair composition, memoized.
    General {
        spec: &'a DistortionSpec,
        memo: std::sync::Mutex<HashMap<Vec<u32>, bool>>,
    },
}

impl<'a> BallTest<'a> {
    fn new(spec: &'a DistortionSpec, nx: usize, n: u32) -> BallTest<'a> {
        let m = &spec.matrix;
        if nx == 2
            && m.nx() == 2
            && m.ny() == 2
            && m.get(0, 0) == 0.0
            && m.get(1, 1) == 0.0
            && m.get(0, 1) == m.get(1, 0)
            && m.get(0, 1) > 0.0
        {
            // Largest mismatch count m with m * off <= n * level, exactly.
            let off = f64_to_rational(m.get(0, 1));
            let budget = spec.level_exact() * BigRational::from_integer(BigInt::from(n));
            let q = budget / off;
            let mmax = q.floor().to_integer().to_u32().unwrap_or(n).min(n);
            BallTest::BinaryHamming { mmax }
        } else {
            BallTest::General {
                spec,
                memo: std::sync::Mutex::new(HashMap::new()),
            }
        }
    }

    fn member(&self, x: &[u8], xmask: u32, v: &[u8], vmask: u32) -> bool {
        match self {
            BallTest::BinaryHamming { mmax } => (xmask ^ vmask).count_ones() <= *mmax,
            BallTest::General { spec, memo } => {
                let m = &spec.matrix;
                let mut key = vec![0u32; m.nx() * m.ny()];
                for (&a, &b) in x.iter().zip(v.iter()) {
                    key[a as usize * m.ny() + b as usize] += 1;
                }
                if let Some(&hit) = memo.lock().expect("ball memo").get(&key) {
                    return hit;
                }
                let counts: Vec<u64> = key.iter().map(|&c| c as u64).collect();
                let lhs = crate::simplex::counts_distortion_exact(&counts, m);
                let rhs = spec.level_exact()
                    * BigRational::from_integer(BigInt::from(x.len() as u64));
                let ok = lhs <= rhs;
                memo.lock().expect("ball memo").insert(key, ok);
                ok
            }
        }
    }
}

fn seq_mask(seq: &[u8]) -> u32 {
    seq.iter()
        .enumerate()
        .fold(0u32, |m, (i, &s)| m | (((s & 1) as u32) << i))
}

fn next_odometer(v: &mut [u8], base: usize) -> bool {
    for d in v.iter_mut().rev() {
        *d += 1;
        if (*d as usize) < base {
            return true;
        }
        *d = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// The MAP engine.

struct MapGroup {
    /// (index into xs, weight class)
    members: Vec<(u32, u16)>,
    class_w: Vec<BigRational>,
    class_w_f64: Vec<f64>,
    /// Source type per member (for the per-type breakdown).
    member_type: Vec<u32>,
}

struct GroupOutcome {
    best_mass: BigRational,
    /// Successful mass of each source type at the optimal guess.
    per_type_mass: Vec<BigRational>,
}

fn solve_group(
    xs: &[Seq],
    xmasks: &[u32],
    group: &MapGroup,
    nv: usize,
    n: u32,
    ball: &BallTest,
    n_types: usize,
) -> GroupOutcome {
    // Single pass over the guess space: track the float-best score and keep
    // the distinct class-count vectors near the top for exact comparison.
    let mut best_f64 = f64::NEG_INFINITY;
    let mut candidates: HashMap<Vec<u32>, (f64, u64)> = HashMap::new();
    let mut v = vec![0u8; n as usize];
    let mut vidx: u64 = 0;
    loop {
        let vmask = seq_mask(&v);
        let mut score = 0.0;
        let mut counts = vec![0u32; group.class_w.len()];
        for &(xi, cls) in &group.members {
            if ball.member(&xs[xi as usize], xmasks[xi as usize], &v, vmask) {
                score += group.class_w_f64[cls as usize];
                counts[cls as usize] += 1;
            }
        }
        if score > best_f64 {
            best_f64 = score;
        }
        if score >= best_f64 * (1.0 - 1e-9) - 1e-300 {
            candidates
                .entry(counts)
                .and_modify(|e| {
                    if score > e.0 {
                        e.0 = score;
                    }
                })
                .or_insert((score, vidx));
        }
        vidx += 1;
        if !next_odometer(&mut v, nv) {
            break;
        }
    }
    // Exact comparison among surviving candidates; earliest guess wins ties.
    let cutoff = best_f64 * (1.0 - 1e-9) - 1e-300;
    let mut best: Option<(BigRational, u64, Vec<u32>)> = None;
    for (counts, (score, first_v)) in candidates {
        if score < cutoff {
            continue;
        }
        let mut mass = BigRational::zero();
        for (cls, &c) in counts.iter().enumerate() {
            if c > 0 {
                mass += &group.class_w[cls] * BigRational::from_integer(BigInt::from(c));
            }
        }
        let better = match &best {
            None => true,
            Some((bm, bv, _)) => mass > *bm || (mass == *bm && first_v < *bv),
        };
        if better {
            best = Some((mass, first_v, counts));
        }
    }
    let (best_mass, best_vidx, _) = best.expect("guess space is nonempty");
    // Recover the winning guess and split its mass by source type.
    let mut v = vec![0u8; n as usize];
    let mut rem = best_vidx;
    for i in (0..n as usize).rev() {
        v[i] = (rem % nv as u64) as u8;
        rem /= nv as u64;
    }
    let vmask = seq_mask(&v);
    let mut per_type_mass = vec![BigRational::zero(); n_types];
    for (mi, &(xi, cls)) in group.members.iter().enumerate() {
        if ball.member(&xs[xi as usize], xmasks[xi as usize], &v, vmask) {
            per_type_mass[group.member_type[mi] as usize] += &group.class_w[cls as usize];
        }
    }
    GroupOutcome {
        best_mass,
        per_type_mass,
    }
}

fn guard_map_work(nv: usize, n: u32, total_members: u128, fast: bool) -> Result<()> {
    let space = (nv as u128).checked_pow(n).unwrap_or(u128::MAX);
    let work = space.saturating_mul(total_members.max(1));
    let limit: u128 = if fast { 1 << 31 } else { 30_000_000 };
    if work > limit {
        return Err(Error::Guard {
            what: "exact MAP evaluation".into(),
            size: work,
            limit,
            advice: "reduce the blocklength, or use the Hamming fast path (binary symmetric d_e)"
                .into(),
        });
    }
    Ok(())
}

fn enumerate_source(system_nx: usize, n: u32) -> Result<Vec<Seq>> {
    let space = (system_nx as u128).checked_pow(n).unwrap_or(u128::MAX);
    if space > crate::types_lab::TYPE_CLASS_GUARD {
        return Err(Error::Guard {
            what: "source space X^n".into(),
            size: space,
            limit: crate::types_lab::TYPE_CLASS_GUARD,
            advice: "reduce the blocklength".into(),
        });
    }
    let mut out = Vec::with_capacity(space as usize);
    let mut x = vec![0u8; n as usize];
    loop {
        out.push(x.clone());
        if !next_odometer(&mut x, system_nx) {
            break;
        }
    }
    Ok(out)
}

fn finish_report(
    strategy: &str,
    n: u32,
    success: BigRational,
    per_type_mass: Vec<BigRational>,
    types: &[TypeVec],
    source: &Dist,
) -> AdversaryReport {
    let mut report = AdversaryReport::new(strategy, n, SuccessProb::Exact(success));
    for (t, mass) in types.iter().zip(per_type_mass) {
        let prob = t.class_prob_exact(source);
        if prob.is_zero() {
            continue;
        }
        report
            .per_type
            .push((t.clone(), SuccessProb::Exact(mass / prob)));
    }
    report
}

/// Exact optimal (MAP) adversary for a blur system: for each observation,
/// the guess maximizing the covered posterior mass.
pub fn map_adversary(system: &BlurSystem) -> Result<AdversaryReport> {
    map_adversary_inner(system, false)
}

/// Exact genie-aided MAP: the guess may additionally depend on the true
/// source type. Its success dominates plain MAP.
pub fn genie_map_adversary(system: &BlurSystem) -> Result<AdversaryReport> {
    map_adversary_inner(system, true)
}

fn map_adversary_inner(system: &BlurSystem, genie: bool) -> Result<AdversaryReport> {
    let n = system.n;
    let nv = system.nv();
    let xs = enumerate_source(system.nx(), n)?;
    let xmasks: Vec<u32> = xs.iter().map(|x| seq_mask(x)).collect();
    let ball = BallTest::new(&system.spec_e, system.nx(), n);
    let fast = matches!(ball, BallTest::BinaryHamming { .. });

    // Weight classes: one per source type (i.i.d. point probability).
    let types: Vec<TypeVec> = system.per_type.iter().map(|tc| tc.type_vec.clone()).collect();
    let class_w: Vec<BigRational> = types
        .iter()
        .map(|t| t.point_prob_exact(&system.source))
        .collect();
    let class_w_f64: Vec<f64> = class_w
        .iter()
        .map(|w| w.to_f64().unwrap_or(0.0))
        .collect();

    let mut groups: BTreeMap<(Seq, u32), Vec<(u32, u16)>> = BTreeMap::new();
    let mut total_members: u128 = 0;
    for (xi, x) in xs.iter().enumerate() {
        let t = TypeVec::of_sequence(x, system.nx())?;
        let t_idx = system
            .type_index(&t)
            .ok_or_else(|| Error::validation("type missing from system"))? as u32;
        if class_w_f64[t_idx as usize] == 0.0 && class_w[t_idx as usize].is_zero() {
            continue;
        }
        let y = system.encode(x)?;
        let key = (y, if genie { t_idx } else { u32::MAX });
        groups.entry(key).or_default().push((xi as u32, t_idx as u16));
        total_members += 1;
    }
    guard_map_work(nv, n, total_members, fast)?;

    let group_list: Vec<MapGroup> = groups
        .into_values()
        .map(|members| MapGroup {
            member_type: members.iter().map(|&(_, t)| t as u32).collect(),
            members,
            class_w: class_w.clone(),
            class_w_f64: class_w_f64.clone(),
        })
        .collect();
    let outcomes: Vec<GroupOutcome> = par_map(group_list, |g| {
        solve_group(&xs, &xmasks, &g, nv, n, &ball, types.len())
    });
    let mut success = BigRational::zero();
    let mut per_type_mass = vec![BigRational::zero(); types.len()];
    for o in outcomes {
        success += o.best_mass;
        for (t, m) in per_type_mass.iter_mut().zip(o.per_type_mass) {
            *t += m;
        }
    }
    let mut report = finish_report(
        if genie { "genie-map" } else { "map" },
        n,
        success,
        per_type_mass,
        &types,
        &system.source,
    );
    report
        .notes
        .insert("ball_path".into(), if fast { "hamming-mask" } else { "general-exact" }.into());
    Ok(report)
}

// ---------------------------------------------------------------------------
// Two-stage strategy.

/// Exact success probability of the two-stage strategy for one pair
/// composition: a uniformly guessed joint type consistent with the
/// observation, then a uniform draw from the conditional class of the
/// guessed type's best extension. When the observation admits no consistent
/// joint type, the strategy falls back to the all-zeros guess.
pub fn two_stage_pair_success(
    pair: &JointType2,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
) -> Result<BigRational> {
    let qy = pair.marginal_y();
    let guesses = joint_types_given_marginal_y(&qy, pair.nx(), spec_d)?;
    if guesses.is_empty() {
        // No consistent joint type: fixed fallback guess (all-zeros).
        let qx = pair.marginal_x();
        let counts: Vec<u64> = (0..pair.nx())
            .flat_map(|x| {
                let mut row = vec![0u64; spec_e.matrix.ny()];
                row[0] = qx.counts()[x] as u64;
                row
            })
            .collect();
        let lhs = crate::simplex::counts_distortion_exact(&counts, &spec_e.matrix);
        let rhs =
            spec_e.level_exact() * BigRational::from_integer(BigInt::from(pair.n()));
        return Ok(if lhs <= rhs {
            BigRational::one()
        } else {
            BigRational::zero()
        });
    }
    let mut total = BigRational::zero();
    for guess in &guesses {
        let pstar = pstar_n(guess, spec_e)?;
        let t_yv = pstar.joint.marginal_yv();
        total += conditional_cover_fraction(pair, &t_yv, spec_e)?;
    }
    Ok(total / BigRational::from_integer(BigInt::from(guesses.len() as u64)))
}

/// Probability that a uniform draw from T_{Q_{V|Y}}(y^n) lands within the
/// eavesdropper ball of x^n, for (x^n, y^n) of the given pair composition
/// and the given (y, v) joint type.
fn conditional_cover_fraction(
    pair: &JointType2,
    t_yv: &JointType2,
    spec_e: &DistortionSpec,
) -> Result<BigRational> {
    let (nx, ny) = (pair.nx(), pair.ny());
    let nv = t_yv.ny();
    // Denominator: |T_{Q_{V|Y}}(y^n)| = prod_y multinomial(c_y; t_{y,.}).
    let mut denom = BigRational::one();
    for y in 0..ny {
        let row: Vec<u32> = (0..nv).map(|v| t_yv.get(y, v)).collect();
        let c: u32 = row.iter().sum();
        denom *= BigRational::from_integer(BigInt::from(counts_multinomial(c, &row)));
    }
    // Numerator: weighted count of per-y transportation tables (rows: the
    // pair's (x,y) cell counts; columns: t_{y,v}) convolved across y under
    // the exact distortion budget.
    let budget = spec_e.level_exact() * BigRational::from_integer(BigInt::from(pair.n()));
    let mut acc: BTreeMap<BigRational, BigRational> = BTreeMap::new();
    acc.insert(BigRational::zero(), BigRational::one());
    for y in 0..ny {
        let rows: Vec<u32> = (0..nx).map(|x| pair.get(x, y)).collect();
        let cols: Vec<u32> = (0..nv).map(|v| t_yv.get(y, v)).collect();
        if rows.iter().sum::<u32>() != cols.iter().sum::<u32>() {
            return Err(Error::validation(
                "pair and (y,v) type disagree on the y marginal",
            ));
        }
        let tables = transportation_tables(&rows, &cols);
        if tables.is_empty() {
            return Ok(BigRational::zero());
        }
        let mut slice: Vec<(BigRational, BigRational)> = Vec::new();
        for t in tables {
            let mut weight = BigRational::one();
            let mut dist = BigRational::zero();
            for x in 0..nx {
                let cell: Vec<u32> = (0..nv).map(|v| t[x * nv + v]).collect();
                weight *= BigRational::from_integer(BigInt::from(counts_multinomial(
                    rows[x], &cell,
                )));
                for (v, &a) in cell.iter().enumerate() {
                    if a > 0 {
                        dist += spec_e.matrix.get_exact(x, v)
                            * BigRational::from_integer(BigInt::from(a));
                    }
                }
            }
            slice.push((dist, weight));
        }
        let mut next: BTreeMap<BigRational, BigRational> = BTreeMap::new();
        for (d0, w0) in &acc {
            for (d1, w1) in &slice {
                let d = d0 + d1;
                if d > budget {
                    continue;
                }
                *next.entry(d).or_insert_with(BigRational::zero) += w0 * w1;
            }
        }
        acc = next;
        if acc.is_empty() {
            return Ok(BigRational::zero());
        }
    }
    let mut favorable = BigRational::zero();
    for (_, w) in acc {
        favorable += w;
    }
    Ok(favorable / denom)
}

/// All nonnegative integer tables with the given row and column sums.
fn transportation_tables(rows: &[u32], cols: &[u32]) -> Vec<Vec<u32>> {
    let (nr, nc) = (rows.len(), cols.len());
    let mut out = Vec::new();
    let mut table = vec![0u32; nr * nc];
    fn rec(
        table: &mut Vec<u32>,
        r: usize,
        rows: &[u32],
        colrem: &mut Vec<u32>,
        nc: usize,
        out: &mut Vec<Vec<u32>>,
    ) {
        if r == rows.len() {
            out.push(table.clone());
            return;
        }
        // Allocate row r among the columns respecting remaining budgets.
        fn alloc(
            table: &mut Vec<u32>,
            r: usize,
            c: usize,
            rem: u32,
            rows: &[u32],
            colrem: &mut Vec<u32>,
            nc: usize,
            out: &mut Vec<Vec<u32>>,
        ) {
            if c == nc - 1 {
                if rem <= colrem[c] {
                    table[r * nc + c] = rem;
                    colrem[c] -= rem;
                    rec(table, r + 1, rows, colrem, nc, out);
                    colrem[c] += rem;
                    table[r * nc + c] = 0;
                }
                return;
            }
            let top = rem.min(colrem[c]);
            for a in 0..=top {
                table[r * nc + c] = a;
                colrem[c] -= a;
                alloc(table, r, c + 1, rem - a, rows, colrem, nc, out);
                colrem[c] += a;
                table[r * nc + c] = 0;
            }
        }
        alloc(table, r, 0, rows[r], rows, colrem, nc, out);
    }
    let mut colrem = cols.to_vec();
    rec(&mut table, 0, rows, &mut colrem, nc, &mut out);
    out
}

/// Exact success probability of the two-stage adversary against a blur
/// system: every source sequence of a type shares the pair composition with
/// its encoding, so the evaluation is a per-type closed count form.
pub fn two_stage_adversary(system: &BlurSystem) -> Result<AdversaryReport> {
    let types: Vec<TypeVec> = system
        .per_type
        .iter()
        .map(|tc| tc.type_vec.clone())
        .collect();
    let per_type: Vec<Result<BigRational>> = par_map(system.per_type.clone(), |tc| {
        two_stage_pair_success(&tc.joint, &system.spec_d, &system.spec_e)
    });
    let mut success = BigRational::zero();
    let mut report = AdversaryReport::new("two-stage", system.n, SuccessProb::Exact(BigRational::zero()));
    for (t, s) in types.iter().zip(per_type) {
        let s = s?;
        let mass = t.class_prob_exact(&system.source);
        success += &mass * &s;
        if !mass.is_zero() {
            report.per_type.push((t.clone(), SuccessProb::Exact(s)));
        }
    }
    let done = AdversaryReport::new("two-stage", system.n, SuccessProb::Exact(success));
    Ok(AdversaryReport {
        per_type: report.per_type,
        ..done
    })
}

/// Monte Carlo run of the two-stage adversary (labeled estimate); available
/// for cases where the exact count convolution would exceed its guard.
pub fn two_stage_adversary_mc(
    system: &BlurSystem,
    samples: u64,
    seed: u64,
) -> Result<AdversaryReport> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut wins = 0u64;
    let mut guess_cache: HashMap<TypeVec, Vec<JointType2>> = HashMap::new();
    for _ in 0..samples {
        let x = sample_source(&system.source, system.n, &mut rng);
        let y = system.encode(&x)?;
        if let Some(v) = two_stage_sample(system, &y, &mut guess_cache, &mut rng)? {
            if crate::types_lab::ball_membership(&x, &v, &system.spec_e)? {
                wins += 1;
            }
        }
    }
    let (mean, radius) = wilson_interval(wins, samples, 1.96);
    let mut report = AdversaryReport::new(
        "two-stage-mc",
        system.n,
        SuccessProb::Estimate {
            mean,
            radius,
            samples,
            seed,
        },
    );
    report
        .notes
        .insert("method".into(), "monte-carlo (exact guard exceeded or requested)".into());
    Ok(report)
}

fn sample_source(p: &Dist, n: u32, rng: &mut ChaCha12Rng) -> Seq {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, &pi) in p.probs().iter().enumerate() {
                acc += pi;
                if u < acc {
                    return i as u8;
                }
            }
            (p.len() - 1) as u8
        })
        .collect()
}

fn two_stage_sample(
    system: &BlurSystem,
    y: &[u8],
    guess_cache: &mut HashMap<TypeVec, Vec<JointType2>>,
    rng: &mut ChaCha12Rng,
) -> Result<Option<Seq>> {
    let qy = TypeVec::of_sequence(y, system.ny())?;
    let guesses = match guess_cache.get(&qy) {
        Some(g) => g.clone(),
        None => {
            let g = joint_types_given_marginal_y(&qy, system.nx(), &system.spec_d)?;
            guess_cache.insert(qy.clone(), g.clone());
            g
        }
    };
    if guesses.is_empty() {
        return Ok(Some(vec![0u8; y.len()]));
    }
    let guess = &guesses[rng.random_range(0..guesses.len())];
    let pstar = pstar_n(guess, &system.spec_e)?;
    let t_yv = pstar.joint.marginal_yv();
    // Uniform draw from T_{Q_{V|Y}}(y): per y symbol, a random arrangement
    // of the prescribed v multiset over that symbol's positions.
    let mut v = vec![0u8; y.len()];
    for ys in 0..system.ny() {
        let positions: Vec<usize> = y
            .iter()
            .enumerate()
            .filter(|(_, &s)| s as usize == ys)
            .map(|(i, _)| i)
            .collect();
        let mut bag: Vec<u8> = (0..t_yv.ny())
            .flat_map(|vs| std::iter::repeat(vs as u8).take(t_yv.get(ys, vs) as usize))
            .collect();
        if bag.len() != positions.len() {
            return Err(Error::validation("conditional class arity mismatch"));
        }
        // Fisher-Yates
        for i in (1..bag.len()).rev() {
            let j = rng.random_range(0..=i);
            bag.swap(i, j);
        }
        for (pos, s) in positions.into_iter().zip(bag) {
            v[pos] = s;
        }
    }
    Ok(Some(v))
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.5, 0.5);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let radius = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (center, radius)
}

// ---------------------------------------------------------------------------
// Blind guessing.

/// Exact blind adversary: the best constant guess, searched over guess
/// compositions (the success probability of an i.i.d. source depends on the
/// guess only through its composition).
pub fn blind_adversary(p: &Dist, n: u32, spec_e: &DistortionSpec) -> Result<AdversaryReport> {
    if spec_e.matrix.nx() != p.len() {
        return Err(Error::validation("d_e has the wrong source alphabet"));
    }
    let nv = spec_e.matrix.ny();
    let vtypes = crate::types_lab::enum_types(n, nv)?;
    let budget = spec_e.level_exact() * BigRational::from_integer(BigInt::from(n));
    let mut best: Option<(BigRational, TypeVec)> = None;
    for vt in vtypes {
        let mut dist: BTreeMap<BigRational, BigRational> = BTreeMap::new();
        dist.insert(BigRational::zero(), BigRational::one());
        for (vs, &c) in vt.counts().iter().enumerate() {
            if c == 0 {
                continue;
            }
            let unit: Vec<(BigRational, BigRational)> = (0..p.len())
                .filter(|&x| p.get(x) > 0.0)
                .map(|x| {
                    (
                        spec_e.matrix.get_exact(x, vs),
                        f64_to_rational(p.get(x)),
                    )
                })
                .collect();
            for _ in 0..c {
                let mut next: BTreeMap<BigRational, BigRational> = BTreeMap::new();
                for (d0, w0) in &dist {
                    for (d1, w1) in &unit {
                        let d = d0 + d1;
                        if d > budget {
                            continue;
                        }
                        *next.entry(d).or_insert_with(BigRational::zero) += w0 * w1;
                    }
                }
                dist = next;
                if dist.len() as u128 > 200_000 {
                    return Err(Error::Guard {
                        what: "blind-guess distortion convolution".into(),
                        size: dist.len() as u128,
                        limit: 200_000,
                        advice: "reduce the blocklength or use simpler distortion values".into(),
                    });
                }
            }
        }
        let mut win = BigRational::zero();
        for (_, w) in dist {
            win += w;
        }
        let better = match &best {
            None => true,
            Some((bw, _)) => win > *bw,
        };
        if better {
            best = Some((win, vt));
        }
    }
    let (win, vt) = best.expect("at least one guess composition");
    let mut report = AdversaryReport::new("blind", n, SuccessProb::Exact(win));
    report
        .notes
        .insert("guess_composition".into(), format!("{:?}", vt.counts()));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Keyed adversaries.

/// Per-message outcome of the exact keyed MAP evaluation, with the
/// per-message guessing bound check.
#[derive(Debug, Clone)]
pub struct MessageCheck {
    pub message: Message,
    /// P(success | M = m) at the optimal guess, exact.
    pub success_given_m: BigRational,
    /// 2^(-n (min{R_e(Q_X,D_e), r + R(Q_XY,D_e)} - 8 epsilon)).
    pub bound: BigRational,
    pub holds: bool,
}

/// Result of [`keyed_map_adversary`]: the report plus the per-type guessing
/// event flags derived from the per-message bound checks.
#[derive(Debug, Clone)]
pub struct KeyedMapOutcome {
    pub report: AdversaryReport,
    pub etilde: Vec<(TypeVec, bool)>,
    pub per_message: Vec<MessageCheck>,
}

/// Exact optimal adversary for the keyed system, observing the public
/// message only (the key is marginalized out). Also verifies the
/// per-message guessing bound for every coded message.
pub fn keyed_map_adversary(system: &KeyedSystem) -> Result<KeyedMapOutcome> {
    let n = system.n;
    let nv = system.nv();
    let ball = BallTest::new(&system.spec_e, system.nx(), n);
    let fast = matches!(ball, BallTest::BinaryHamming { .. });
    let key_weight = BigRational::new(BigInt::one(), BigInt::from(system.num_keys));

    // Per message: member sequences with their exact joint weights
    // P(x) P(m | x); weight classes dedupe identical rationals.
    struct Pending {
        message: Message,
        type_pos: Option<usize>,
        xs: Vec<Seq>,
        weights: Vec<BigRational>,
        types: Vec<u32>,
    }
    let mut pending: Vec<Pending> = Vec::new();
    let all_types: Vec<TypeVec> = system
        .kept
        .iter()
        .map(|k| k.type_vec.clone())
        .chain(system.dummy_types.iter().cloned())
        .collect();

    for (tp, kt) in system.kept.iter().enumerate() {
        let class_seqs = enumerate_type_class(&kt.type_vec)?;
        let point = kt.type_vec.point_prob_exact(&system.source);
        if point.is_zero() {
            continue;
        }
        for index in 0..kt.books.codewords_per_book as u32 {
            let mut xs = Vec::new();
            let mut weights = Vec::new();
            for (rank, x) in class_seqs.iter().enumerate() {
                let mut w = BigRational::zero();
                for key in 0..system.num_keys as usize {
                    let pm = system.message_prob(tp, index, rank, key);
                    if !pm.is_zero() {
                        w += pm;
                    }
                }
                if w.is_zero() {
                    continue;
                }
                xs.push(x.clone());
                weights.push(&point * w * &key_weight);
            }
            if xs.is_empty() {
                continue;
            }
            let types = vec![tp as u32; xs.len()];
            pending.push(Pending {
                message: Message::Coded {
                    type_pos: tp as u32,
                    index,
                },
                type_pos: Some(tp),
                xs,
                weights,
                types,
            });
        }
    }
    if !system.dummy_mass.is_zero() {
        let mut xs = Vec::new();
        let mut weights = Vec::new();
        let mut types = Vec::new();
        for (di, t) in system.dummy_types.iter().enumerate() {
            let point = t.point_prob_exact(&system.source);
            if point.is_zero() {
                continue;
            }
            for x in enumerate_type_class(t)? {
                xs.push(x);
                weights.push(point.clone());
                types.push((system.kept.len() + di) as u32);
            }
        }
        pending.push(Pending {
            message: Message::Dummy,
            type_pos: None,
            xs,
            weights,
            types,
        });
    }

    let total_members: u128 = pending.iter().map(|p| p.xs.len() as u128).sum();
    guard_map_work(nv, n, total_members, fast)?;

    struct Solved {
        message: Message,
        type_pos: Option<usize>,
        best_mass: BigRational,
        message_prob: BigRational,
        per_type_mass: Vec<BigRational>,
    }
    let n_types = all_types.len();
    let solved: Vec<Solved> = par_map(pending, |p| {
        // Dedupe exact weights into classes.
        let mut class_of: BTreeMap<BigRational, u16> = BTreeMap::new();
        let mut class_w: Vec<BigRational> = Vec::new();
        let mut members = Vec::with_capacity(p.xs.len());
        for w in &p.weights {
            let next_id = class_w.len() as u16;
            let id = *class_of.entry(w.clone()).or_insert_with(|| {
                class_w.push(w.clone());
                next_id
            });
            members.push(id);
        }
        let class_w_f64: Vec<f64> = class_w.iter().map(|w| w.to_f64().unwrap_or(0.0)).collect();
        let xmasks: Vec<u32> = p.xs.iter().map(|x| seq_mask(x)).collect();
        let group = MapGroup {
            members: (0..p.xs.len() as u32).zip(members).collect(),
            class_w,
            class_w_f64,
            member_type: p.types.clone(),
        };
        let out = solve_group(&p.xs, &xmasks, &group, nv, n, &ball, n_types);
        let mut message_prob = BigRational::zero();
        for w in &p.weights {
            message_prob += w;
        }
        Solved {
            message: p.message,
            type_pos: p.type_pos,
            best_mass: out.best_mass,
            message_prob,
            per_type_mass: out.per_type_mass,
        }
    });

    let mut success = BigRational::zero();
    let mut per_type_mass = vec![BigRational::zero(); n_types];
    let mut per_message = Vec::new();
    let mut etilde: Vec<(TypeVec, bool)> =
        system.kept.iter().map(|k| (k.type_vec.clone(), false)).collect();
    for s in &solved {
        success += &s.best_mass;
        for (t, m) in per_type_mass.iter_mut().zip(&s.per_type_mass) {
            *t += m;
        }
        if let Some(tp) = s.type_pos {
            let kt = &system.kept[tp];
            // Per-message guessing bound of the keyed construction.
            let re = rd_curve(
                &kt.type_vec.as_dist(),
                &system.spec_e.matrix,
                system.spec_e.level_f64(),
            )?
            .value;
            let rjt = conditional_rd(&kt.choice.joint.as_joint2(), &system.spec_e)?.value;
            let exponent = re.min(system.params.key_rate + rjt) - 8.0 * system.params.epsilon;
            let bound = exact_two_pow(n as f64 * exponent);
            let success_given_m = if s.message_prob.is_zero() {
                BigRational::zero()
            } else {
                &s.best_mass / &s.message_prob
            };
            let holds = success_given_m <= bound;
            if !holds {
                etilde[tp].1 = true;
            }
            per_message.push(MessageCheck {
                message: s.message,
                success_given_m,
                bound,
                holds,
            });
        }
    }
    let mut report = finish_report(
        "keyed-map",
        n,
        success,
        per_type_mass,
        &all_types,
        &system.source,
    );
    report.notes.insert(
        "messages".into(),
        format!("{} coded + dummy", per_message.len()),
    );
    Ok(KeyedMapOutcome {
        report,
        etilde,
        per_message,
    })
}

/// Exact key-guessing adversary: guess a key uniformly, reconstruct as the
/// legitimate receiver would, then run the two-stage strategy on that
/// reconstruction. Averages exactly over the key, the guess, the encoder
/// randomization and the two-stage randomness.
pub fn key_guess_adversary(system: &KeyedSystem, _seed: u64) -> Result<AdversaryReport> {
    let n = system.n;
    let key_w = BigRational::new(BigInt::one(), BigInt::from(system.num_keys));
    let mut s2_cache: BTreeMap<JointType2, BigRational> = BTreeMap::new();
    let mut s2 = |pair: JointType2| -> Result<BigRational> {
        if let Some(hit) = s2_cache.get(&pair) {
            return Ok(hit.clone());
        }
        let v = two_stage_pair_success(&pair, &system.spec_d, &system.spec_e)?;
        s2_cache.insert(pair, v.clone());
        Ok(v)
    };

    let mut success = BigRational::zero();
    let mut per_type: Vec<(TypeVec, SuccessProb)> = Vec::new();

    for (tp, kt) in system.kept.iter().enumerate() {
        let point = kt.type_vec.point_prob_exact(&system.source);
        if point.is_zero() {
            continue;
        }
        let class_seqs = enumerate_type_class(&kt.type_vec)?;
        let mut type_success = BigRational::zero();
        for (rank, x) in class_seqs.iter().enumerate() {
            let mut x_term = BigRational::zero();
            for key in 0..system.num_keys as usize {
                let book = &kt.books.books[key];
                let support: Vec<u32> = if book.event_e {
                    (0..kt.books.codewords_per_book as u32).collect()
                } else {
                    book.cover[rank].clone()
                };
                if support.is_empty() {
                    continue;
                }
                let pm = BigRational::new(BigInt::one(), BigInt::from(support.len() as u64));
                for &index in &support {
                    // Average over the guessed key.
                    let mut guess_term = BigRational::zero();
                    for tilde in 0..system.num_keys as usize {
                        let yt = &system.kept[tp].books.books[tilde].codewords[index as usize];
                        let pair =
                            JointType2::of_pair(x, yt, system.nx(), system.ny())?;
                        guess_term += s2(pair)?;
                    }
                    x_term += &pm * guess_term * &key_w;
                }
            }
            // Average over the true key.
            type_success += x_term * &key_w;
        }
        let mass = &point * &type_success;
        success += mass;
        let class_total = kt.type_vec.class_prob_exact(&system.source);
        if !class_total.is_zero() {
            let class_size = BigRational::from_integer(BigInt::from(
                crate::types_lab::type_class_size(&kt.type_vec),
            ));
            per_type.push((
                kt.type_vec.clone(),
                SuccessProb::Exact(type_success / class_size),
            ));
        }
        let _ = tp;
    }
    // Dummy types: the public message is constant, the reconstruction is the
    // fixed fallback sequence; the strategy runs on that.
    for t in &system.dummy_types {
        let point = t.point_prob_exact(&system.source);
        if point.is_zero() {
            continue;
        }
        let y0 = vec![0u8; n as usize];
        let mut type_success = BigRational::zero();
        for x in enumerate_type_class(t)? {
            let pair = JointType2::of_pair(&x, &y0, system.nx(), system.ny())?;
            type_success += s2(pair)?;
        }
        success += &point * &type_success;
        let class_size =
            BigRational::from_integer(BigInt::from(crate::types_lab::type_class_size(t)));
        per_type.push((t.clone(), SuccessProb::Exact(type_success / class_size)));
    }

    let mut report = AdversaryReport::new("key-guess", n, SuccessProb::Exact(success));
    report.per_type = per_type;
    Ok(report)
}
