//! Exact small-blocklength implementations of the coding schemes and their
//! adversaries: the type-by-type blur encoder with greedy covering codes,
//! the keyed encoder with a dummy message for low-probability types, and
//! exact MAP / genie-aided MAP / two-stage / key-guessing / blind guessing
//! evaluation with success probabilities as exact rationals.
//!
//! Construction is deterministic given the seed; adversary evaluations are
//! pure functions of a constructed system.

mod adversary;

pub use adversary::{
    blind_adversary, genie_map_adversary, key_guess_adversary, keyed_map_adversary,
    map_adversary, two_stage_adversary, two_stage_adversary_mc, two_stage_pair_success,
    wilson_interval, KeyedMapOutcome,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::simplex::{f64_to_rational, Dist, DistortionSpec};
use crate::types_lab::{
    enum_types, enumerate_type_class, keyed_codebooks_streamed, low_prob_types, qstar, qstar_rate,
    rank_in_type_class, rational_log2, type_class_size, greedy_cover, CoverCode, JointType2,
    JointType3, KeyedCodebooks, QStarRate, Seq, TypeVec,
};

/// Exact or estimated success probability of an adversary.
#[derive(Debug, Clone)]
pub enum SuccessProb {
    Exact(BigRational),
    /// Monte Carlo estimate with a Wilson confidence radius; used only when
    /// an exact evaluation's guard is exceeded, and labeled as such.
    Estimate {
        mean: f64,
        radius: f64,
        samples: u64,
        seed: u64,
    },
}

impl SuccessProb {
    pub fn as_f64(&self) -> f64 {
        match self {
            SuccessProb::Exact(r) => r.to_f64().unwrap_or_else(|| rational_log2(r).exp2()),
            SuccessProb::Estimate { mean, .. } => *mean,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            SuccessProb::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SuccessProb::Exact(_))
    }

    fn to_json(&self) -> Value {
        match self {
            SuccessProb::Exact(r) => json!({
                "num": r.numer().to_string(),
                "den": r.denom().to_string(),
                "float": self.as_f64(),
            }),
            SuccessProb::Estimate {
                mean,
                radius,
                samples,
                seed,
            } => json!({
                "estimate": mean,
                "wilson_radius": radius,
                "samples": samples,
                "seed": seed,
            }),
        }
    }
}

/// Outcome of evaluating one guessing strategy against one system.
#[derive(Debug, Clone)]
pub struct AdversaryReport {
    pub strategy: String,
    pub success: SuccessProb,
    /// Per-source-type success probability conditioned on the type.
    pub per_type: Vec<(TypeVec, SuccessProb)>,
    /// -(1/n) log2 of the success probability.
    pub empirical_exponent: f64,
    pub notes: BTreeMap<String, String>,
}

impl AdversaryReport {
    pub fn new(strategy: &str, n: u32, success: SuccessProb) -> Self {
        let empirical_exponent = match &success {
            SuccessProb::Exact(r) if r.is_zero() => f64::INFINITY,
            s => -rational_or_float_log2(s) / n as f64,
        };
        AdversaryReport {
            strategy: strategy.to_string(),
            success,
            per_type: Vec::new(),
            empirical_exponent,
            notes: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": "1",
            "strategy": self.strategy,
            "success": self.success.to_json(),
            "empirical_exponent": self.empirical_exponent,
            "per_type": self.per_type.iter().map(|(t, s)| json!({
                "counts": t.counts(),
                "success": s.to_json(),
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

fn rational_or_float_log2(s: &SuccessProb) -> f64 {
    match s {
        SuccessProb::Exact(r) => rational_log2(r),
        SuccessProb::Estimate { mean, .. } => mean.log2(),
    }
}

// ---------------------------------------------------------------------------
// Blur system (no key).

/// Per-type code of a blur system.
#[derive(Debug, Clone)]
pub struct TypeCode {
    pub type_vec: TypeVec,
    /// The joint type chosen for this source type (the discrete worst-case
    /// side information).
    pub joint: JointType2,
    /// Its inner-minimizer extension and value I(X;V|Y).
    pub extension: JointType3,
    pub value_bits: f64,
    pub code: CoverCode,
}

/// The no-key system: a deterministic type-by-type encoder into greedy
/// covering codes at the per-type worst-case joint type. Construction never
/// reads the source law; it is stored only for evaluation.
#[derive(Debug, Clone)]
pub struct BlurSystem {
    pub source: Dist,
    pub n: u32,
    pub spec_d: DistortionSpec,
    pub spec_e: DistortionSpec,
    pub per_type: Vec<TypeCode>,
}

impl BlurSystem {
    pub fn type_index(&self, t: &TypeVec) -> Option<usize> {
        self.per_type.iter().position(|tc| &tc.type_vec == t)
    }

    /// Deterministic encoder: the first covering codeword of the sequence's
    /// type code.
    pub fn encode(&self, x: &[u8]) -> Result<Seq> {
        let t = TypeVec::of_sequence(x, self.source.len())?;
        let idx = self
            .type_index(&t)
            .ok_or_else(|| Error::validation("sequence type missing from the system"))?;
        let tc = &self.per_type[idx];
        let rank = rank_in_type_class(x, &t)? as usize;
        let ci = tc.code.first_cover(rank) as usize;
        Ok(tc.code.codewords[ci].clone())
    }

    /// Exhaustively verify the per-realization distortion constraint
    /// d(x^n, f(x^n)) <= D for every source sequence.
    pub fn verify_encoder(&self) -> Result<()> {
        for tc in &self.per_type {
            let seqs = enumerate_type_class(&tc.type_vec)?;
            for x in &seqs {
                let y = self.encode(x)?;
                let pair = JointType2::of_pair(x, &y, self.source.len(), self.ny())?;
                if !pair.distortion_within(&self.spec_d) {
                    return Err(Error::validation(format!(
                        "encoder violates the distortion budget on {x:?}"
                    )));
                }
                if pair != tc.joint {
                    return Err(Error::validation(format!(
                        "encoder output off the chosen joint type on {x:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        self.source.len()
    }

    pub fn ny(&self) -> usize {
        self.spec_d.matrix.ny()
    }

    pub fn nv(&self) -> usize {
        self.spec_e.matrix.ny()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": "1",
            "kind": "blur",
            "source": self.source.probs(),
            "n": self.n,
            "per_type": self.per_type.iter().map(|tc| json!({
                "counts": tc.type_vec.counts(),
                "joint": tc.joint.counts(),
                "pstar_value_bits": tc.value_bits,
                "code_size": tc.code.size(),
                "code_digest": format!("{:016x}", code_digest(&tc.code.codewords)),
            })).collect::<Vec<_>>(),
        })
    }
}

fn code_digest(codewords: &[Seq]) -> u64 {
    // FNV-1a over the flattened codewords; an integrity label, not crypto.
    let mut h: u64 = 0xcbf29ce484222325;
    for c in codewords {
        for &b in c {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Build the no-key blur system at blocklength n.
pub fn build_blur_system(
    p: &Dist,
    n: u32,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
) -> Result<BlurSystem> {
    if spec_d.matrix.nx() != p.len() || spec_e.matrix.nx() != p.len() {
        return Err(Error::validation("distortion matrices disagree on |X|"));
    }
    let space = (p.len() as u128).checked_pow(n).unwrap_or(u128::MAX);
    if space > crate::types_lab::TYPE_CLASS_GUARD {
        return Err(Error::Guard {
            what: "source space X^n".into(),
            size: space,
            limit: crate::types_lab::TYPE_CLASS_GUARD,
            advice: "reduce the blocklength".into(),
        });
    }
    let types = enum_types(n, p.len())?;
    let per_type: Vec<TypeCode> = crate::par::par_map(types, |t| -> Result<TypeCode> {
        let qs = qstar(&t, spec_d, spec_e)?;
        let code = greedy_cover(&qs.joint)?;
        Ok(TypeCode {
            type_vec: t,
            joint: qs.joint,
            extension: qs.extension,
            value_bits: qs.value_bits,
            code,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    Ok(BlurSystem {
        source: p.clone(),
        n,
        spec_d: spec_d.clone(),
        spec_e: spec_e.clone(),
        per_type,
    })
}

// ---------------------------------------------------------------------------
// Keyed system (lossy Shannon cipher).

/// Construction parameters for the keyed system.
#[derive(Debug, Clone)]
pub struct KeyedParams {
    /// Public channel rate R (bits per symbol).
    pub rate: f64,
    /// Key rate r; 2^(n r) must be an integer.
    pub key_rate: f64,
    /// Reliability exponent for the excess-distortion probability.
    pub alpha: f64,
    /// Type-filter slack on top of alpha.
    pub delta: f64,
    /// Covering-event parameter for the random codebooks.
    pub epsilon: f64,
    pub seed: u64,
}

/// A kept source type with its chosen joint type and keyed codebooks.
#[derive(Debug, Clone)]
pub struct KeptType {
    pub type_vec: TypeVec,
    pub choice: QStarRate,
    pub books: KeyedCodebooks,
}

/// The public message: either the dummy message for discarded types or a
/// (type, codeword index) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Message {
    Dummy,
    Coded { type_pos: u32, index: u32 },
}

/// The keyed system: kept types get banks of keyed random codebooks over
/// their rate-constrained worst-case joint type; all other sequences map to
/// the dummy message.
#[derive(Debug, Clone)]
pub struct KeyedSystem {
    pub source: Dist,
    pub n: u32,
    pub spec_d: DistortionSpec,
    pub spec_e: DistortionSpec,
    pub params: KeyedParams,
    /// Internal code rate R' (budget left after the type header).
    pub rate_prime: f64,
    pub num_keys: u64,
    pub kept: Vec<KeptType>,
    pub dummy_types: Vec<TypeVec>,
    /// Exact probability mass of the dummy types (the excess-distortion
    /// probability bound).
    pub dummy_mass: BigRational,
    pub type_bits: u32,
    pub index_bits: u32,
}

impl KeyedSystem {
    pub fn nx(&self) -> usize {
        self.source.len()
    }

    pub fn ny(&self) -> usize {
        self.spec_d.matrix.ny()
    }

    pub fn nv(&self) -> usize {
        self.spec_e.matrix.ny()
    }

    pub fn kept_index(&self, t: &TypeVec) -> Option<usize> {
        self.kept.iter().position(|k| &k.type_vec == t)
    }

    /// Reconstruction at the legitimate receiver: h(m, k). The dummy message
    /// decodes to an arbitrary fixed sequence (all-zeros).
    pub fn reconstruct(&self, m: Message, key: u64) -> Result<Seq> {
        match m {
            Message::Dummy => Ok(vec![0u8; self.n as usize]),
            Message::Coded { type_pos, index } => {
                let kt = self
                    .kept
                    .get(type_pos as usize)
                    .ok_or_else(|| Error::validation("message type out of range"))?;
                let book = kt
                    .books
                    .books
                    .get(key as usize)
                    .ok_or_else(|| Error::validation("key out of range"))?;
                book.codewords
                    .get(index as usize)
                    .cloned()
                    .ok_or_else(|| Error::validation("codeword index out of range"))
            }
        }
    }

    /// Exact conditional law P(M = (t, i) | X^n = x, K = k): uniform over the
    /// covering set, or uniform over the whole book when that book failed
    /// its covering event.
    pub fn message_prob(&self, type_pos: usize, index: u32, x_rank: usize, key: usize) -> BigRational {
        let kt = &self.kept[type_pos];
        let book = &kt.books.books[key];
        if book.event_e {
            BigRational::new(
                BigInt::one(),
                BigInt::from(kt.books.codewords_per_book),
            )
        } else {
            let cover = &book.cover[x_rank];
            if cover.binary_search(&index).is_ok() {
                BigRational::new(BigInt::one(), BigInt::from(cover.len() as u64))
            } else {
                BigRational::zero()
            }
        }
    }

    /// Record the guessing-event flags computed by an exact keyed MAP
    /// evaluation onto the codebook banks.
    pub fn record_etilde(&mut self, outcome: &KeyedMapOutcome) {
        for (t, flag) in &outcome.etilde {
            if let Some(idx) = self.kept_index(t) {
                self.kept[idx].books.event_etilde = Some(*flag);
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "version": "1",
            "kind": "keyed",
            "source": self.source.probs(),
            "n": self.n,
            "rate": self.params.rate,
            "key_rate": self.params.key_rate,
            "alpha": if self.params.alpha.is_finite() { json!(self.params.alpha) } else { json!("inf") },
            "delta": self.params.delta,
            "epsilon": self.params.epsilon,
            "seed": self.params.seed,
            "num_keys": self.num_keys,
            "dummy_mass": SuccessProb::Exact(self.dummy_mass.clone()).to_json(),
            "kept": self.kept.iter().map(|kt| json!({
                "counts": kt.type_vec.counts(),
                "joint": kt.choice.joint.counts(),
                "crd_value_bits": kt.choice.crd_value_bits,
                "books": kt.books.books.iter().map(|b| json!({
                    "digest": format!("{:016x}", code_digest(&b.codewords)),
                    "event_e": b.event_e,
                })).collect::<Vec<_>>(),
                "event_etilde": kt.books.event_etilde,
                "retries": kt.books.retries,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Build the keyed system. Persistent covering failures do not abort the
/// construction: the affected banks keep their event flags and the encoder
/// falls back to a uniform message for them.
pub fn build_keyed_system(
    p: &Dist,
    n: u32,
    spec_d: &DistortionSpec,
    spec_e: &DistortionSpec,
    params: &KeyedParams,
) -> Result<KeyedSystem> {
    if spec_d.matrix.nx() != p.len() || spec_e.matrix.nx() != p.len() {
        return Err(Error::validation("distortion matrices disagree on |X|"));
    }
    if !(params.alpha > 0.0) {
        return Err(Error::validation("alpha must be positive"));
    }
    let space = (p.len() as u128).checked_pow(n).unwrap_or(u128::MAX);
    if space > crate::types_lab::TYPE_CLASS_GUARD {
        return Err(Error::Guard {
            what: "source space X^n".into(),
            size: space,
            limit: crate::types_lab::TYPE_CLASS_GUARD,
            advice: "reduce the blocklength".into(),
        });
    }
    let keys_f = (n as f64 * params.key_rate).exp2();
    let num_keys = keys_f.round() as u64;
    if (keys_f - num_keys as f64).abs() > 1e-9 || num_keys == 0 {
        return Err(Error::validation(format!(
            "2^(n r) = {keys_f} is not a positive integer"
        )));
    }

    let kept_types = low_prob_types(p, n, params.alpha, params.delta)?;
    let all_types = enum_types(n, p.len())?;
    let dummy_types: Vec<TypeVec> = all_types
        .into_iter()
        .filter(|t| !kept_types.contains(t))
        .collect();
    let mut dummy_mass = BigRational::zero();
    for t in &dummy_types {
        dummy_mass += t.class_prob_exact(p);
    }
    // Excess-distortion budget, exactly: dummy mass <= 2^(-n alpha).
    if params.alpha.is_finite() {
        let budget = f64_to_rational((-(n as f64) * params.alpha).exp2());
        if dummy_mass > budget {
            return Err(Error::validation(format!(
                "excess-distortion budget violated: dummy mass {} > 2^(-n alpha) = {}; \
                 increase delta or alpha",
                dummy_mass.to_f64().unwrap_or(f64::NAN),
                budget.to_f64().unwrap_or(f64::NAN)
            )));
        }
    } else if !dummy_mass.is_zero() {
        return Err(Error::validation("dummy mass must vanish when alpha = inf"));
    }

    // Internal code rate: reserve the type header and rounding bits out of
    // the public budget.
    let overhead = (p.len() as f64 * ((n + 1) as f64).log2() + 3.0) / n as f64;
    let rate_prime = params.rate - overhead;
    if rate_prime <= 0.0 {
        return Err(Error::validation(format!(
            "rate budget too small at n = {n}: header overhead {overhead} consumes R = {}",
            params.rate
        )));
    }

    let kept: Vec<KeptType> = kept_types
        .into_iter()
        .enumerate()
        .map(|(i, t)| -> Result<KeptType> {
            let choice = qstar_rate(&t, rate_prime, spec_d, spec_e)?;
            let books = match keyed_codebooks_streamed(
                &choice.joint,
                params.key_rate,
                params.epsilon,
                params.seed,
                (i as u64) << 32,
            ) {
                Ok(b) => b,
                // Persistent covering failure: keep the flagged bank.
                Err(Error::PersistentCoveringFailure { books, .. }) => *books,
                Err(e) => return Err(e),
            };
            Ok(KeptType {
                type_vec: t,
                choice,
                books,
            })
        })
        .collect::<Result<_>>()?;

    let max_codewords = kept
        .iter()
        .map(|k| k.books.codewords_per_book)
        .max()
        .unwrap_or(1);
    let type_bits = ((kept.len() as u64 + 1) as f64).log2().ceil() as u32;
    let index_bits = (max_codewords as f64).log2().ceil().max(0.0) as u32;
    let budget = (n as f64 * params.rate).floor() as u32;
    if type_bits + index_bits > budget {
        return Err(Error::validation(format!(
            "message needs {} + {} bits but n R = {budget}",
            type_bits, index_bits
        )));
    }

    Ok(KeyedSystem {
        source: p.clone(),
        n,
        spec_d: spec_d.clone(),
        spec_e: spec_e.clone(),
        params: params.clone(),
        rate_prime,
        num_keys,
        kept,
        dummy_types,
        dummy_mass,
        type_bits,
        index_bits,
    })
}

// ---------------------------------------------------------------------------
// Exponent trends.

/// One row of an exponent-trend table.
#[derive(Debug, Clone)]
pub struct TrendRow {
    pub n: u32,
    pub success: SuccessProb,
    pub empirical_exponent: f64,
    pub theory_exponent: f64,
    pub gap: f64,
}

/// Evaluate a per-blocklength report function over a list of blocklengths
/// against a theoretical exponent.
pub fn exponent_trend(
    eval: impl Fn(u32) -> Result<(AdversaryReport, f64)>,
    ns: &[u32],
) -> Result<Vec<TrendRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let (report, theory) = eval(n)?;
        rows.push(TrendRow {
            n,
            empirical_exponent: report.empirical_exponent,
            gap: report.empirical_exponent - theory,
            theory_exponent: theory,
            success: report.success,
        });
    }
    Ok(rows)
}

/// CSV rows for a trend table: n, success as exact fraction, float, the
/// empirical exponent, the theoretical exponent and the gap.
pub fn trend_csv(rows: &[TrendRow]) -> String {
    let mut out =
        String::from("n,success_num,success_den,success_float,empirical_exponent,theory_exponent,gap\n");
    for r in rows {
        let (num, den) = match &r.success {
            SuccessProb::Exact(x) => (x.numer().to_string(), x.denom().to_string()),
            SuccessProb::Estimate { .. } => ("".into(), "".into()),
        };
        out.push_str(&format!(
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.n,
            num,
            den,
            r.success.as_f64(),
            r.empirical_exponent,
            r.theory_exponent,
            r.gap
        ));
    }
    out
}

pub(crate) fn exact_two_pow(neg_exponent: f64) -> BigRational {
    f64_to_rational((-neg_exponent).exp2())
}

/// Exact total mass of a list of types under an i.i.d. source.
pub fn types_mass_exact(types: &[TypeVec], p: &Dist) -> BigRational {
    let mut acc = BigRational::zero();
    for t in types {
        acc += t.class_prob_exact(p);
    }
    acc
}

/// Convenience: exact class size as f64 log2 (diagnostics).
pub fn class_size_log2(t: &TypeVec) -> f64 {
    rational_log2(&BigRational::from_integer(BigInt::from(type_class_size(t))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::DistortionMatrix;
    use num_traits::One;

    fn ham_spec(num: i64, den: i64) -> DistortionSpec {
        DistortionSpec::with_level_ratio(DistortionMatrix::hamming(2), num, den).unwrap()
    }

    fn zero_spec(nx: usize, ny: usize) -> DistortionSpec {
        DistortionSpec::with_level_ratio(DistortionMatrix::zero(nx, ny), 0, 1).unwrap()
    }

    /// Exact binomial tail Pr(Bin(n, 1/2) <= m).
    fn binomial_tail_half(n: u32, m: u32) -> BigRational {
        let mut num = num_bigint::BigUint::ZERO;
        for k in 0..=m.min(n) {
            num += crate::types_lab::counts_multinomial(n, &[k, n - k]);
        }
        BigRational::new(
            BigInt::from(num),
            BigInt::from(num_bigint::BigUint::one() << n),
        )
    }

    #[test]
    fn blur_system_identity_at_zero_distortion() {
        let p = Dist::bernoulli(0.5).unwrap();
        let sys = build_blur_system(&p, 4, &ham_spec(0, 1), &ham_spec(1, 4)).unwrap();
        sys.verify_encoder().unwrap();
        for x in [[0u8, 1, 0, 1], [1, 1, 0, 0], [0, 0, 0, 0]] {
            assert_eq!(sys.encode(&x).unwrap(), x.to_vec());
        }
        // Identity encoder reveals everything: MAP succeeds surely.
        let rep = map_adversary(&sys).unwrap();
        assert_eq!(rep.success.exact().unwrap(), &BigRational::one());
    }

    #[test]
    fn blur_system_trivial_distortion_single_code() {
        // d == 0: the per-type constraint is vacuous; all sequences of a
        // type map into one shared code.
        let p = Dist::bernoulli(0.5).unwrap();
        let sys = build_blur_system(&p, 4, &zero_spec(2, 2), &ham_spec(1, 4)).unwrap();
        sys.verify_encoder().unwrap();
        for tc in &sys.per_type {
            let seqs = crate::types_lab::enumerate_type_class(&tc.type_vec).unwrap();
            for x in &seqs {
                let y = sys.encode(x).unwrap();
                assert!(tc.code.codewords.contains(&y));
            }
        }
    }

    #[test]
    fn blur_system_third_sixth_builds_and_validates() {
        let p = Dist::bernoulli(0.5).unwrap();
        let sys = build_blur_system(&p, 6, &ham_spec(1, 3), &ham_spec(1, 6)).unwrap();
        sys.verify_encoder().unwrap();
    }

    #[test]
    fn constant_encoder_map_equals_binomial_tail() {
        // |Y| = 1 with d == 0: the encoder is constant, MAP reduces to the
        // blind optimum, an exact binomial tail for the uniform source.
        let p = Dist::bernoulli(0.5).unwrap();
        for (n, num, den) in [(6u32, 1i64, 4i64), (9, 1, 4)] {
            let sys =
                build_blur_system(&p, n, &zero_spec(2, 1), &ham_spec(num, den)).unwrap();
            let rep = map_adversary(&sys).unwrap();
            let m = (n as i64 * num / den) as u32;
            assert_eq!(
                rep.success.exact().unwrap(),
                &binomial_tail_half(n, m),
                "n={n}"
            );
        }
    }

    #[test]
    fn genie_dominates_map() {
        let p = Dist::bernoulli(0.3).unwrap();
        let sys = build_blur_system(&p, 5, &ham_spec(2, 5), &ham_spec(1, 5)).unwrap();
        let map = map_adversary(&sys).unwrap();
        let genie = genie_map_adversary(&sys).unwrap();
        assert!(genie.success.exact().unwrap() >= map.success.exact().unwrap());
    }

    #[test]
    fn map_dominates_specific_strategies() {
        let p = Dist::bernoulli(0.5).unwrap();
        let sys = build_blur_system(&p, 6, &ham_spec(1, 3), &ham_spec(1, 6)).unwrap();
        let map = map_adversary(&sys).unwrap();
        let two = two_stage_adversary(&sys).unwrap();
        let blind = blind_adversary(&p, 6, &ham_spec(1, 6)).unwrap();
        assert!(map.success.exact().unwrap() >= two.success.exact().unwrap());
        assert!(map.success.exact().unwrap() >= blind.success.exact().unwrap());
    }

    #[test]
    fn two_stage_lemma4_bound_small() {
        // Per-pair success >= (n+1)^{-|X||Y|(|V|+1)} 2^{-n I(P*)} for every
        // pair with d <= D; n = 4 spot check (n = 6 runs in acceptance).
        let d = ham_spec(1, 4);
        let e = ham_spec(1, 4);
        for t in crate::types_lab::enum_types(4, 4).unwrap() {
            let jt = JointType2::new(2, 2, t.counts().to_vec()).unwrap();
            if !jt.distortion_within(&d) {
                continue;
            }
            let s = two_stage_pair_success(&jt, &d, &e).unwrap();
            let pstar = crate::types_lab::pstar_n(&jt, &e).unwrap();
            let bound = 12.0 * (5.0f64).log2() + 4.0 * pstar.value_bits;
            let s_log2 = rational_log2(&s);
            assert!(
                s_log2 >= -bound - 1e-9,
                "pair {:?}: {} < {}",
                jt.counts(),
                s_log2,
                -bound
            );
        }
    }

    #[test]
    fn blind_examples() {
        let p = Dist::bernoulli(0.5).unwrap();
        let rep = blind_adversary(&p, 8, &ham_spec(1, 4)).unwrap();
        assert_eq!(rep.success.exact().unwrap(), &binomial_tail_half(8, 2));

        // Slack level: certain success.
        let rep = blind_adversary(&p, 4, &ham_spec(1, 1)).unwrap();
        assert_eq!(rep.success.exact().unwrap(), &BigRational::one());

        // Skewed source: the optimal guess is the all-likely-symbol word;
        // success = Pr(Bin(10, 0.2) <= 1) exactly.
        let p = Dist::bernoulli(0.8).unwrap();
        let rep = blind_adversary(&p, 10, &ham_spec(1, 10)).unwrap();
        let q8 = f64_to_rational(p.get(1));
        let q2 = f64_to_rational(p.get(0));
        let pow = |r: &BigRational, k: u32| -> BigRational {
            let mut acc = BigRational::one();
            for _ in 0..k {
                acc *= r.clone();
            }
            acc
        };
        let expect = pow(&q8, 10)
            + BigRational::from_integer(BigInt::from(10)) * pow(&q8, 9) * q2;
        assert_eq!(rep.success.exact().unwrap(), &expect);
        assert!(rep.notes["guess_composition"].contains("[0, 10]"));
    }

    #[test]
    fn exponent_trend_blind() {
        let p = Dist::bernoulli(0.5).unwrap();
        let theory = 1.0 - crate::simplex::binary_entropy(0.25).unwrap();
        let rows = exponent_trend(
            |n| {
                let rep = blind_adversary(&p, n, &ham_spec(1, 4))?;
                Ok((rep, theory))
            },
            &[4, 8, 12],
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert!(r.success.is_exact());
            assert!(r.empirical_exponent >= theory - 1e-12);
        }
        let csv = trend_csv(&rows);
        assert!(csv.starts_with("n,success_num"));
        assert_eq!(csv.lines().count(), 4);
    }

    fn keyed_params(rate: f64, key_rate: f64, alpha: f64, seed: u64) -> KeyedParams {
        KeyedParams {
            rate,
            key_rate,
            alpha,
            delta: 0.0,
            epsilon: 0.5,
            seed,
        }
    }

    #[test]
    fn keyed_system_construction_audit() {
        let p = Dist::bernoulli(0.5).unwrap();
        let params = keyed_params(2.0, 0.25, f64::INFINITY, 1);
        let sys =
            build_keyed_system(&p, 8, &zero_spec(2, 2), &ham_spec(1, 10), &params).unwrap();
        assert_eq!(sys.num_keys, 4);
        assert_eq!(sys.kept.len(), 9);
        assert!(sys.dummy_types.is_empty());
        for kt in &sys.kept {
            assert_eq!(kt.books.num_books(), 4);
        }
        // Deterministic under the seed.
        let again =
            build_keyed_system(&p, 8, &zero_spec(2, 2), &ham_spec(1, 10), &params).unwrap();
        for (a, b) in sys.kept.iter().zip(again.kept.iter()) {
            for (ba, bb) in a.books.books.iter().zip(b.books.books.iter()) {
                assert_eq!(ba.codewords, bb.codewords);
            }
        }
        // Message law is normalized for every (x, k).
        for (tp, kt) in sys.kept.iter().enumerate() {
            let class = crate::types_lab::enumerate_type_class(&kt.type_vec).unwrap();
            for rank in 0..class.len() {
                for key in 0..sys.num_keys as usize {
                    let mut total = BigRational::zero();
                    for i in 0..kt.books.codewords_per_book as u32 {
                        total += sys.message_prob(tp, i, rank, key);
                    }
                    assert_eq!(total, BigRational::one());
                }
            }
        }
    }

    #[test]
    fn keyed_dummy_budget() {
        let p = Dist::bernoulli(0.5).unwrap();
        // alpha = 0.5 keeps all but the two extreme types at n = 8:
        // dummy mass 2/256 = 2^-7 <= 2^-4.
        let ok = build_keyed_system(
            &p,
            8,
            &zero_spec(2, 2),
            &ham_spec(1, 10),
            &keyed_params(2.0, 0.0, 0.5, 3),
        )
        .unwrap();
        assert_eq!(ok.dummy_types.len(), 2);
        let expected = BigRational::new(BigInt::from(1), BigInt::from(128));
        assert_eq!(ok.dummy_mass, expected);

        // alpha = 0.9 still discards the same two types but the budget
        // 2^-7.2 is now smaller than their mass: construction must refuse.
        let bad = build_keyed_system(
            &p,
            8,
            &zero_spec(2, 2),
            &ham_spec(1, 10),
            &keyed_params(2.0, 0.0, 0.9, 3),
        );
        assert!(matches!(bad, Err(Error::Validation(_))));
    }

    #[test]
    fn keyed_map_bound_and_etilde() {
        let p = Dist::bernoulli(0.5).unwrap();
        let params = keyed_params(2.0, 0.25, f64::INFINITY, 1);
        let mut sys =
            build_keyed_system(&p, 8, &zero_spec(2, 2), &ham_spec(1, 10), &params).unwrap();
        let out = keyed_map_adversary(&sys).unwrap();
        assert!(out.report.success.is_exact());
        // Every per-message bound holds (epsilon = 0.5 gives generous slack).
        for chk in &out.per_message {
            assert!(chk.holds, "message {:?}", chk.message);
        }
        for (_, flag) in &out.etilde {
            assert!(!flag);
        }
        sys.record_etilde(&out);
        assert_eq!(sys.kept[0].books.event_etilde, Some(false));
    }

    #[test]
    fn key_guess_correct_key_decomposition() {
        let p = Dist::bernoulli(0.5).unwrap();
        let params = keyed_params(2.0, 0.25, f64::INFINITY, 1);
        let sys =
            build_keyed_system(&p, 8, &zero_spec(2, 2), &ham_spec(1, 10), &params).unwrap();
        let kg = key_guess_adversary(&sys, 0).unwrap();
        // Correct-key two-stage success, computed independently: average
        // over x, the true key and the encoder's codeword choice of the
        // two-stage success at the true reconstruction.
        let key_w = BigRational::new(BigInt::one(), BigInt::from(sys.num_keys));
        let mut correct = BigRational::zero();
        for kt in &sys.kept {
            let point = kt.type_vec.point_prob_exact(&sys.source);
            let class = crate::types_lab::enumerate_type_class(&kt.type_vec).unwrap();
            for (rank, x) in class.iter().enumerate() {
                for key in 0..sys.num_keys as usize {
                    let book = &kt.books.books[key];
                    let support: Vec<u32> = if book.event_e {
                        (0..kt.books.codewords_per_book as u32).collect()
                    } else {
                        book.cover[rank].clone()
                    };
                    let pm =
                        BigRational::new(BigInt::one(), BigInt::from(support.len() as u64));
                    for &i in &support {
                        let y = &book.codewords[i as usize];
                        let pair = JointType2::of_pair(x, y, 2, 2).unwrap();
                        let s2 =
                            two_stage_pair_success(&pair, &sys.spec_d, &sys.spec_e).unwrap();
                        correct += &point * &key_w * &pm * s2;
                    }
                }
            }
        }
        let floor = &key_w * &correct;
        assert!(
            kg.success.exact().unwrap() >= &floor,
            "key-guess {} < floor {}",
            kg.success.as_f64(),
            floor.to_f64().unwrap()
        );
    }

    #[test]
    fn keyed_single_key_matches_combined_eval() {
        // r = 0: one book; the key-guess strategy always "guesses" the key
        // correctly, so its success equals the correct-key two-stage value.
        let p = Dist::bernoulli(0.5).unwrap();
        let params = keyed_params(2.0, 0.0, f64::INFINITY, 5);
        let sys =
            build_keyed_system(&p, 6, &ham_spec(1, 3), &ham_spec(1, 6), &params).unwrap();
        let kg = key_guess_adversary(&sys, 0).unwrap();
        let mut expect = BigRational::zero();
        for kt in &sys.kept {
            let point = kt.type_vec.point_prob_exact(&sys.source);
            let class = crate::types_lab::enumerate_type_class(&kt.type_vec).unwrap();
            for (rank, x) in class.iter().enumerate() {
                let book = &kt.books.books[0];
                let support: Vec<u32> = if book.event_e {
                    (0..kt.books.codewords_per_book as u32).collect()
                } else {
                    book.cover[rank].clone()
                };
                let pm = BigRational::new(BigInt::one(), BigInt::from(support.len() as u64));
                for &i in &support {
                    let y = &book.codewords[i as usize];
                    let pair = JointType2::of_pair(x, y, 2, 2).unwrap();
                    expect +=
                        &point * &pm * two_stage_pair_success(&pair, &sys.spec_d, &sys.spec_e)
                            .unwrap();
                }
            }
        }
        assert_eq!(kg.success.exact().unwrap(), &expect);
    }

    #[test]
    fn reports_serialize() {
        let p = Dist::bernoulli(0.5).unwrap();
        let rep = blind_adversary(&p, 4, &ham_spec(1, 4)).unwrap();
        let v = rep.to_json();
        assert_eq!(v["strategy"], "blind");
        assert!(v["success"]["num"].is_string());

        let sys = build_blur_system(&p, 4, &ham_spec(1, 4), &ham_spec(1, 4)).unwrap();
        let sj = sys.to_json();
        assert_eq!(sj["kind"], "blur");
        assert_eq!(sj["per_type"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn wilson_sanity() {
        let (c, r) = wilson_interval(50, 100, 1.96);
        assert!((c - 0.5).abs() < 0.01);
        assert!(r > 0.05 && r < 0.15);
        let (c0, _) = wilson_interval(0, 100, 1.96);
        assert!(c0 > 0.0);
    }

    #[test]
    fn two_stage_mc_agrees_loosely() {
        let p = Dist::bernoulli(0.5).unwrap();
        let sys = build_blur_system(&p, 6, &ham_spec(1, 3), &ham_spec(1, 6)).unwrap();
        let exact = two_stage_adversary(&sys).unwrap();
        let mc = two_stage_adversary_mc(&sys, 4000, 42).unwrap();
        match mc.success {
            SuccessProb::Estimate { mean, radius, .. } => {
                let truth = exact.success.as_f64();
                assert!(
                    (mean - truth).abs() <= radius * 1.5 + 0.02,
                    "mc {mean} vs exact {truth} (radius {radius})"
                );
            }
            _ => panic!("expected an estimate"),
        }
    }
}
