//! Keyed subcodes: a public list code augmented with `K` secret stabilizer
//! generators.
//!
//! Step `j` draws an element of a small-bias set of length `2r`, where `r` is
//! the current number of logical qubits, reads it as a logical Pauli over the
//! current logical basis (`r` X-coefficients then `r` Z-coefficients), and
//! adds that operator as a generator. The logical basis then shrinks by one
//! pair. The decoder looks up the public syndrome, enumerates the list, and
//! keeps the candidates whose commutation with each secret generator matches
//! the secret syndrome bits.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::biased::{self, BiasedSet};
use crate::bounds::failure_bound;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, SpanBasis};
use crate::listcode::ListTable;
use crate::pauli::PauliOp;
use crate::stabilizer::{LogicalPair, StabilizerCode, Syndrome};
use crate::stats::{trial_rng, Proportion};

/// Largest key space swept exhaustively.
pub const MAX_SWEEP_KEY_BITS: usize = 16;
/// Largest list rank the decoder enumerates.
pub const MAX_DECODE_RANK: usize = 20;

fn symplectic_omega(a: &BitVec, b: &BitVec) -> bool {
    let n = a.len() / 2;
    a.slice(0, n).dot(&b.slice(n, 2 * n)) ^ a.slice(n, 2 * n).dot(&b.slice(0, n))
}

/// A symplectic basis `(x_i, z_i)` of the current logical space, stored as
/// `(x | z)` vectors of length `2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticFrame {
    xs: Vec<BitVec>,
    zs: Vec<BitVec>,
}

impl SymplecticFrame {
    /// The standard basis of `n` qubits.
    pub fn standard(n: usize) -> Self {
        Self {
            xs: (0..n).map(|i| BitVec::unit(2 * n, i)).collect(),
            zs: (0..n).map(|i| BitVec::unit(2 * n, n + i)).collect(),
        }
    }

    pub fn from_pairs(pairs: &[LogicalPair]) -> Self {
        Self {
            xs: pairs.iter().map(|p| p.x.to_symplectic()).collect(),
            zs: pairs.iter().map(|p| p.z.to_symplectic()).collect(),
        }
    }

    /// Number of logical qubits left.
    pub fn rank(&self) -> usize {
        self.xs.len()
    }

    /// `sum_i a_i x_i + b_i z_i` for `bits = (a | b)`.
    pub fn lift(&self, bits: &BitVec) -> BitVec {
        let r = self.rank();
        assert_eq!(bits.len(), 2 * r, "coordinate vector has wrong length");
        let mut v = BitVec::zeros(self.xs.first().map_or(0, BitVec::len));
        for i in bits.iter_ones() {
            v.xor_assign(if i < r { &self.xs[i] } else { &self.zs[i - r] });
        }
        v
    }

    /// Coordinates `(a | b)` of a vector commuting with everything removed
    /// so far; inverse of [`SymplecticFrame::lift`].
    pub fn coords(&self, v: &BitVec) -> BitVec {
        let r = self.rank();
        let mut c = BitVec::zeros(2 * r);
        for i in 0..r {
            c.set(i, symplectic_omega(v, &self.zs[i]));
            c.set(r + i, symplectic_omega(v, &self.xs[i]));
        }
        c
    }

    /// Restricts to the commutant of `lift(bits)` modulo `lift(bits)`,
    /// dropping one pair.
    pub fn restrict(&mut self, bits: &BitVec) {
        let r = self.rank();
        let p = (0..r)
            .find(|&i| bits.get(i) || bits.get(r + i))
            .expect("nonzero coordinates");
        let pivot = if bits.get(p) {
            self.zs[p].clone()
        } else {
            self.xs[p].clone()
        };
        for i in (0..r).filter(|&i| i != p) {
            if bits.get(r + i) {
                self.xs[i].xor_assign(&pivot);
            }
            if bits.get(i) {
                self.zs[i].xor_assign(&pivot);
            }
        }
        self.xs.remove(p);
        self.zs.remove(p);
    }

    pub fn pairs(&self) -> Vec<LogicalPair> {
        self.xs
            .iter()
            .zip(&self.zs)
            .map(|(x, z)| LogicalPair {
                x: PauliOp::from_symplectic(x),
                z: PauliOp::from_symplectic(z),
            })
            .collect()
    }
}

/// The set used at one step, with its effective bias after key wrapping
/// and the zero-draw fallback.
#[derive(Clone, Debug)]
pub struct StepSet {
    pub set: Arc<BiasedSet>,
    /// Index substituted when the draw is the zero vector.
    pub fallback: usize,
    pub zero_fraction: f64,
    /// `effective_bias + 2 * zero_fraction`: moving the zero mass onto one
    /// fixed element changes every parity by at most twice that mass.
    pub eta_eff: f64,
}

impl StepSet {
    /// Smallest construction of length `m` whose effective bias is at most
    /// `eta`.
    pub fn for_target(m: usize, eta: f64) -> Result<Self> {
        let start = biased::ell_for(m, eta)?;
        for ell in start..=biased::MAX_ELL {
            let set = if m <= 2 * ell {
                biased::full_space(m)?
            } else {
                biased::aghp(m, ell)?
            };
            let step = Self::from_set(set)?;
            if step.eta_eff <= eta {
                return Ok(step);
            }
            if m <= 2 * ell {
                break;
            }
        }
        Err(Error::Domain(format!(
            "no set of length {m} reaches effective bias {eta}"
        )))
    }

    pub fn from_set(set: BiasedSet) -> Result<Self> {
        let fallback = (0..set.size())
            .find(|&i| !set.element(i).is_zero())
            .ok_or_else(|| Error::Domain("biased set has no nonzero element".into()))?;
        let zero_fraction = set.zero_count() as f64 / set.size() as f64;
        let eta_eff = set.effective_bias() + 2.0 * zero_fraction;
        Ok(Self {
            set: Arc::new(set),
            fallback,
            zero_fraction,
            eta_eff,
        })
    }

    pub fn key_bits(&self) -> usize {
        self.set.key_bits()
    }

    /// Drawn element and whether the fallback replaced a zero draw.
    pub fn draw(&self, key: &BitVec) -> Result<(usize, BitVec, bool)> {
        let index = key.to_u64() as usize % self.set.size();
        let v = self.set.draw(key)?;
        if v.is_zero() {
            Ok((self.fallback, self.set.element(self.fallback), true))
        } else {
            Ok((index, v, false))
        }
    }
}

/// The sets for all `K` steps of an augmentation of a code with `k` logical
/// qubits. Step `j` has length `2 (k - j)`.
#[derive(Clone, Debug)]
pub struct KeySchedule {
    k: usize,
    eta_target: f64,
    steps: Vec<StepSet>,
}

impl KeySchedule {
    pub fn new(k: usize, k_extra: usize, eta_target: f64) -> Result<Self> {
        if k_extra > 0 && k_extra >= k {
            return Err(Error::Domain(format!("K={k_extra} must be below k={k}")));
        }
        let steps = (0..k_extra)
            .map(|j| StepSet::for_target(2 * (k - j), eta_target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k,
            eta_target,
            steps,
        })
    }

    pub fn num_logical(&self) -> usize {
        self.k
    }

    pub fn k_extra(&self) -> usize {
        self.steps.len()
    }

    pub fn eta_target(&self) -> f64 {
        self.eta_target
    }

    pub fn steps(&self) -> &[StepSet] {
        &self.steps
    }

    /// Total key bits, `sum_j ceil(log2 |A_j|)`.
    pub fn key_len(&self) -> usize {
        self.steps.iter().map(StepSet::key_bits).sum()
    }

    pub fn set_sizes(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.set.size()).collect()
    }

    /// Largest per-step effective bias; zero when `K = 0`.
    pub fn eta_eff(&self) -> f64 {
        self.steps.iter().map(|s| s.eta_eff).fold(0.0, f64::max)
    }

    pub fn random_key<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVec {
        let bits: Vec<bool> = (0..self.key_len()).map(|_| rng.random()).collect();
        BitVec::from_bools(&bits)
    }

    /// Adds the secret generators selected by `key` to `base`. Only the first
    /// [`KeySchedule::key_len`] bits are consumed.
    pub fn augment(&self, base: &StabilizerCode, key: &BitVec) -> Result<KeyedCode> {
        if base.num_logical() != self.k {
            return Err(Error::Domain(format!(
                "schedule built for k={}, code has k={}",
                self.k,
                base.num_logical()
            )));
        }
        let needed = self.key_len();
        if key.len() < needed {
            return Err(Error::KeyExhausted {
                needed,
                available: key.len(),
            });
        }
        let mut frame = SymplecticFrame::from_pairs(base.logical_basis());
        let mut gens = base.generators().to_vec();
        let mut extra = Vec::with_capacity(self.steps.len());
        let mut draws = Vec::with_capacity(self.steps.len());
        let mut offset = 0;
        for step in &self.steps {
            let bits = step.key_bits();
            let (index, coords, fallback) = step.draw(&key.slice(offset, offset + bits))?;
            offset += bits;
            let t = PauliOp::from_symplectic(&frame.lift(&coords));
            frame.restrict(&coords);
            gens.push(t.clone());
            extra.push(t);
            draws.push(Draw {
                index,
                fallback,
                coords,
            });
        }
        let n = base.num_qubits();
        let payload = self.k - self.steps.len();
        let augmented = StabilizerCode::with_logicals(gens, n, payload, frame.pairs())?;
        Ok(KeyedCode {
            base: base.clone(),
            augmented,
            extra,
            key: key.slice(0, needed),
            draws,
            steps: self.steps.clone(),
        })
    }
}

/// One biased-set draw.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Draw {
    pub index: usize,
    pub fallback: bool,
    /// Logical coordinates of the new generator in the frame of that step.
    pub coords: BitVec,
}

/// A list code with `K` secret generators.
#[derive(Clone, Debug)]
pub struct KeyedCode {
    base: StabilizerCode,
    augmented: StabilizerCode,
    extra: Vec<PauliOp>,
    key: BitVec,
    draws: Vec<Draw>,
    steps: Vec<StepSet>,
}

/// One-shot [`KeySchedule::new`] followed by [`KeySchedule::augment`].
pub fn augment(
    base: &StabilizerCode,
    k_extra: usize,
    key: &BitVec,
    eta_target: f64,
) -> Result<KeyedCode> {
    KeySchedule::new(base.num_logical(), k_extra, eta_target)?.augment(base, key)
}

impl KeyedCode {
    pub fn base(&self) -> &StabilizerCode {
        &self.base
    }

    /// Base generators followed by the secret ones, with the shrunken
    /// logical basis.
    pub fn augmented(&self) -> &StabilizerCode {
        &self.augmented
    }

    pub fn extra(&self) -> &[PauliOp] {
        &self.extra
    }

    pub fn k_extra(&self) -> usize {
        self.extra.len()
    }

    /// The consumed key prefix.
    pub fn key(&self) -> &BitVec {
        &self.key
    }

    pub fn draws(&self) -> &[Draw] {
        &self.draws
    }

    pub fn sets(&self) -> impl Iterator<Item = &BiasedSet> {
        self.steps.iter().map(|s| s.set.as_ref())
    }

    pub fn eta_eff(&self) -> f64 {
        self.steps.iter().map(|s| s.eta_eff).fold(0.0, f64::max)
    }

    pub fn payload_qubits(&self) -> usize {
        self.augmented.num_logical()
    }

    /// Commutation bits of `e` with the secret generators.
    pub fn secret_bits(&self, e: &PauliOp) -> BitVec {
        let mut s = BitVec::zeros(self.extra.len());
        for (j, t) in self.extra.iter().enumerate() {
            if e.omega(t) {
                s.set(j, true);
            }
        }
        s
    }
}

/// Public syndrome from the base generators and the secret bits.
pub fn full_syndrome(kc: &KeyedCode, e: &PauliOp) -> Result<(Syndrome, BitVec)> {
    let public = kc.base.syndrome(e)?;
    Ok((public, kc.secret_bits(e)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    Unique(PauliOp),
    /// Several inequivalent list elements match; the first is the canonical
    /// fallback.
    Ambiguous(Vec<PauliOp>),
    Uncorrectable,
}

impl Decoded {
    /// The correction actually applied: the unique match, else the canonical
    /// fallback.
    pub fn correction(&self) -> Option<&PauliOp> {
        match self {
            Decoded::Unique(c) => Some(c),
            Decoded::Ambiguous(cs) => cs.first(),
            Decoded::Uncorrectable => None,
        }
    }

    pub fn status(&self) -> DecodeStatus {
        match self {
            Decoded::Unique(_) => DecodeStatus::Unique,
            Decoded::Ambiguous(_) => DecodeStatus::Ambiguous,
            Decoded::Uncorrectable => DecodeStatus::Uncorrectable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecodeStatus {
    Unique,
    Ambiguous,
    Uncorrectable,
}

/// List decoding filtered by the secret bits. Matches equivalent modulo the
/// augmented stabilizer count once.
pub fn decode(
    kc: &KeyedCode,
    table: &ListTable,
    public: &Syndrome,
    secret: &BitVec,
) -> Result<Decoded> {
    if table.code() != &kc.base {
        return Err(Error::Domain("table was built for a different code".into()));
    }
    if secret.len() != kc.k_extra() {
        return Err(Error::DimensionMismatch {
            expected: kc.k_extra(),
            found: secret.len(),
        });
    }
    let Some(entry) = table.get(public) else {
        return Ok(Decoded::Uncorrectable);
    };
    if entry.rank() > MAX_DECODE_RANK {
        return Err(Error::CapExceeded {
            what: "list rank for decoding",
            required: entry.rank() as u128,
            cap: MAX_DECODE_RANK as u128,
        });
    }
    let class_len = 2 * kc.base.num_logical();
    let mut found: Vec<PauliOp> = Vec::new();
    for v in entry.span_vectors(class_len) {
        let q = entry.rep.mul(&kc.base.lift_class(&v)).letter_form();
        if &kc.secret_bits(&q) != secret {
            continue;
        }
        if !found.iter().any(|f| kc.augmented.in_stabilizer(&f.mul(&q))) {
            found.push(q);
        }
    }
    Ok(match found.len() {
        0 => Decoded::Uncorrectable,
        1 => Decoded::Unique(found.pop().expect("one element")),
        _ => Decoded::Ambiguous(found),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Unique decode whose correction matches the error on the payload.
    pub success: bool,
    pub status: DecodeStatus,
    pub syndrome_public: Syndrome,
    pub syndrome_secret: BitVec,
    /// Payload coordinates of the applied correction.
    pub decoded_class: Option<BitVec>,
    /// Payload coordinates of the error.
    pub truth_class: BitVec,
    /// Whether the applied correction, including an ambiguous fallback,
    /// undoes the error on the payload.
    pub correction_restores: bool,
}

impl TrialOutcome {
    pub fn label(&self) -> &'static str {
        match (self.status, self.success) {
            (DecodeStatus::Unique, true) => "success",
            (DecodeStatus::Unique, false) => "wrong",
            (DecodeStatus::Ambiguous, _) => "ambiguous",
            (DecodeStatus::Uncorrectable, _) => "uncorrectable",
        }
    }
}

/// Syndrome extraction, decoding and a payload check for one error.
pub fn run_trial(kc: &KeyedCode, table: &ListTable, e: &PauliOp) -> Result<TrialOutcome> {
    if e.weight() > table.max_weight() {
        return Err(Error::Domain(format!(
            "error weight {} exceeds t={}",
            e.weight(),
            table.max_weight()
        )));
    }
    let (public, secret) = full_syndrome(kc, e)?;
    let decoded = decode(kc, table, &public, &secret)?;
    let truth_class = kc.augmented.logical_bits(e);
    let decoded_class = decoded.correction().map(|c| kc.augmented.logical_bits(c));
    let correction_restores = decoded
        .correction()
        .is_some_and(|c| kc.augmented.in_stabilizer(&c.mul(e)));
    let status = decoded.status();
    Ok(TrialOutcome {
        success: status == DecodeStatus::Unique && decoded_class.as_ref() == Some(&truth_class),
        status,
        syndrome_public: public,
        syndrome_secret: secret,
        decoded_class,
        truth_class,
        correction_restores,
    })
}

/// Exact outcome counts over every key of a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct KeySweep {
    pub keys: u64,
    /// Trials that are not a unique correct decode.
    pub failures: u64,
    /// Trials where the applied correction leaves a logical error.
    pub decode_failures: u64,
}

impl KeySweep {
    pub fn failure_rate(&self) -> f64 {
        self.failures as f64 / self.keys as f64
    }

    pub fn decode_failure_rate(&self) -> f64 {
        self.decode_failures as f64 / self.keys as f64
    }
}

/// Runs `e` against every key of the schedule.
pub fn sweep_keys(
    schedule: &KeySchedule,
    base: &StabilizerCode,
    table: &ListTable,
    e: &PauliOp,
) -> Result<KeySweep> {
    let bits = schedule.key_len();
    if bits > MAX_SWEEP_KEY_BITS {
        return Err(Error::CapExceeded {
            what: "key space bits",
            required: bits as u128,
            cap: MAX_SWEEP_KEY_BITS as u128,
        });
    }
    (0u64..1 << bits)
        .into_par_iter()
        .map(|k| {
            let kc = schedule.augment(base, &BitVec::from_u64(bits, k))?;
            let out = run_trial(&kc, table, e)?;
            Ok(KeySweep {
                keys: 1,
                failures: u64::from(!out.success),
                decode_failures: u64::from(!out.correction_restores),
            })
        })
        .try_reduce(KeySweep::default, |a, b| {
            Ok(KeySweep {
                keys: a.keys + b.keys,
                failures: a.failures + b.failures,
                decode_failures: a.decode_failures + b.decode_failures,
            })
        })
}

/// Per-step instrumentation of the distinguishing experiment. `alive`
/// counts (trial, list difference) pairs whose probe bits were all zero
/// before this step; `commuting` those whose bit is zero again.
#[derive(Clone, Debug, PartialEq)]
pub struct StepStats {
    pub m: usize,
    pub set_size: usize,
    pub key_bits: usize,
    pub eta_eff: f64,
    pub alive: u64,
    pub commuting: u64,
}

impl StepStats {
    /// Empirical `Pr(M_j | M_1 ... M_{j-1})`.
    pub fn conditional(&self) -> Option<Proportion> {
        (self.alive > 0).then(|| Proportion::new(self.commuting, self.alive))
    }

    /// The per-step limit `(1 + eta) / 2`.
    pub fn limit(&self) -> f64 {
        (1.0 + self.eta_eff) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishResult {
    pub k_logical: usize,
    pub l: usize,
    pub k_extra: usize,
    pub eta_target: f64,
    pub seed: u64,
    /// Trials in which some pair of list elements received equal probe bits.
    pub collisions: Proportion,
    /// Differences that became products of probes (not failures).
    pub absorbed: u64,
    pub steps: Vec<StepStats>,
    pub eta_eff: f64,
    pub key_bits: usize,
    /// `2^{2L} ((1 + eta_eff) / 2)^K`.
    pub bound: f64,
}

#[derive(Clone, Default)]
struct TrialTally {
    collisions: u64,
    absorbed: u64,
    alive: Vec<u64>,
    commuting: Vec<u64>,
}

impl TrialTally {
    fn merge(mut self, other: Self) -> Self {
        self.collisions += other.collisions;
        self.absorbed += other.absorbed;
        if self.alive.is_empty() {
            return Self {
                collisions: self.collisions,
                absorbed: self.absorbed,
                ..other
            };
        }
        for (a, b) in self.alive.iter_mut().zip(&other.alive) {
            *a += b;
        }
        for (a, b) in self.commuting.iter_mut().zip(&other.commuting) {
            *a += b;
        }
        self
    }
}

/// The core of the keyed-subcode analysis with no physical code: a random
/// list of `2^L` logical Paulis on `k_logical` qubits, `K` biased probes
/// drawn progressively, and the frequency of some pair of list elements
/// receiving identical probe bits.
pub fn distinguish_experiment(
    k_logical: usize,
    l: usize,
    k_extra: usize,
    eta_target: f64,
    trials: u64,
    seed: u64,
) -> Result<DistinguishResult> {
    if k_logical == 0 || l > k_logical {
        return Err(Error::Domain(format!(
            "need 1 <= k and L <= k, got k={k_logical}, L={l}"
        )));
    }
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    let schedule = KeySchedule::new(k_logical, k_extra, eta_target)?;
    let run = |index: u64| -> Result<TrialTally> {
        let mut rng = trial_rng(seed, index);
        let dim = 2 * k_logical;
        let mut span = SpanBasis::new();
        let mut gens = Vec::with_capacity(l);
        while gens.len() < l {
            let bits: Vec<bool> = (0..dim).map(|_| rng.random()).collect();
            let v = BitVec::from_bools(&bits);
            if span.insert(&v) {
                gens.push(v);
            }
        }
        let mut diffs: Vec<BitVec> = (1u64..1 << l)
            .map(|mask| {
                let mut d = BitVec::zeros(dim);
                for (i, g) in gens.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        d.xor_assign(g);
                    }
                }
                d
            })
            .collect();
        let mut frame = SymplecticFrame::standard(k_logical);
        let mut tally = TrialTally {
            alive: vec![0; k_extra],
            commuting: vec![0; k_extra],
            ..Default::default()
        };
        for (j, step) in schedule.steps().iter().enumerate() {
            let bits: Vec<bool> = (0..step.key_bits()).map(|_| rng.random()).collect();
            let (_, coords, _) = step.draw(&BitVec::from_bools(&bits))?;
            let probe = frame.lift(&coords);
            let before = diffs.len();
            diffs.retain(|d| !frame.coords(d).is_zero());
            tally.absorbed += (before - diffs.len()) as u64;
            tally.alive[j] += diffs.len() as u64;
            diffs.retain(|d| !symplectic_omega(&probe, d));
            tally.commuting[j] += diffs.len() as u64;
            frame.restrict(&coords);
        }
        let before = diffs.len();
        diffs.retain(|d| !frame.coords(d).is_zero());
        tally.absorbed += (before - diffs.len()) as u64;
        tally.collisions = u64::from(!diffs.is_empty());
        Ok(tally)
    };
    let tally = (0..trials)
        .into_par_iter()
        .map(run)
        .try_reduce(TrialTally::default, |a, b| Ok(a.merge(b)))?;
    let steps = schedule
        .steps()
        .iter()
        .enumerate()
        .map(|(j, s)| StepStats {
            m: s.set.len_bits(),
            set_size: s.set.size(),
            key_bits: s.key_bits(),
            eta_eff: s.eta_eff,
            alive: tally.alive.get(j).copied().unwrap_or(0),
            commuting: tally.commuting.get(j).copied().unwrap_or(0),
        })
        .collect();
    let eta_eff = schedule.eta_eff();
    Ok(DistinguishResult {
        k_logical,
        l,
        k_extra,
        eta_target,
        seed,
        collisions: Proportion::new(tally.collisions, trials),
        absorbed: tally.absorbed,
        steps,
        eta_eff,
        key_bits: schedule.key_len(),
        bound: failure_bound(l, eta_eff, k_extra),
    })
}
