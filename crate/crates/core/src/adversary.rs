//! Pauli-level attacks on keyed subcodes.
//!
//! A [`Strategy`] sees the public code and list table when it is built and
//! the trial index and a trial generator when it emits. It never receives
//! key material: the key is drawn after the error, from the same trial
//! stream, inside [`run_trials`].

use rand::{Rng, RngCore};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::listcode::{build_table_with_cap, ListTable};
use crate::pauli::{enumerate_errors_with_cap, ErrorSet, PauliOp, DEFAULT_ENUMERATION_CAP};
use crate::protocol::{run_trial, sweep_keys, KeySchedule, KeySweep, TrialOutcome};
use crate::stabilizer::{StabilizerCode, Syndrome};
use crate::stats::{trial_rng, Proportion};

pub trait Strategy: Send + Sync {
    fn name(&self) -> &str;

    /// Weight cap of every emitted error.
    fn max_weight(&self) -> usize;

    fn emit(&self, trial: u64, rng: &mut dyn RngCore) -> PauliOp;
}

/// Uniform over all errors of weight at most `t`.
pub struct Uniform {
    errors: ErrorSet,
}

pub fn uniform_strategy(n: usize, t: usize) -> Result<Uniform> {
    uniform_strategy_with_cap(n, t, DEFAULT_ENUMERATION_CAP)
}

pub fn uniform_strategy_with_cap(n: usize, t: usize, cap: u128) -> Result<Uniform> {
    Ok(Uniform {
        errors: enumerate_errors_with_cap(n, t, cap)?,
    })
}

impl Strategy for Uniform {
    fn name(&self) -> &str {
        "uniform"
    }

    fn max_weight(&self) -> usize {
        self.errors.max_weight()
    }

    fn emit(&self, _trial: u64, rng: &mut dyn RngCore) -> PauliOp {
        self.errors.elements()[rng.random_range(0..self.errors.len())].clone()
    }
}

/// Always the same error.
pub struct Fixed {
    name: String,
    error: PauliOp,
}

impl Fixed {
    pub fn new(name: impl Into<String>, error: PauliOp) -> Self {
        Self {
            name: name.into(),
            error,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new("identity", PauliOp::identity(n))
    }

    pub fn error(&self) -> &PauliOp {
        &self.error
    }
}

impl Strategy for Fixed {
    fn name(&self) -> &str {
        &self.name
    }

    fn max_weight(&self) -> usize {
        self.error.weight()
    }

    fn emit(&self, _trial: u64, _rng: &mut dyn RngCore) -> PauliOp {
        self.error.clone()
    }
}

/// Two errors from the syndrome with the largest list, with different
/// logical classes, played with equal probability.
pub struct WorstPair {
    syndrome: Syndrome,
    pair: [PauliOp; 2],
    t: usize,
    degenerate: bool,
}

impl WorstPair {
    /// Set when every list has rank zero; the strategy then plays one fixed
    /// error.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn syndrome(&self) -> &Syndrome {
        &self.syndrome
    }

    pub fn pair(&self) -> &[PauliOp; 2] {
        &self.pair
    }
}

pub fn worst_pair_strategy(table: &ListTable) -> Result<WorstPair> {
    let code = table.code();
    let report = table.report();
    let entry = table
        .get(&report.worst_syndrome)
        .expect("worst syndrome is a table key");
    let t = table.max_weight();
    if entry.rank() == 0 {
        return Ok(WorstPair {
            syndrome: report.worst_syndrome,
            pair: [entry.rep.clone(), entry.rep.clone()],
            t,
            degenerate: true,
        });
    }
    let errors = enumerate_errors_with_cap(code.num_qubits(), t, u128::MAX)?;
    let partner = errors
        .iter()
        .find(|e| {
            code.syndrome(e).ok().as_ref() == Some(&report.worst_syndrome)
                && !code.logical_bits(&entry.rep.mul(e)).is_zero()
        })
        .expect("a nonzero list rank has a witness");
    Ok(WorstPair {
        syndrome: report.worst_syndrome,
        pair: [entry.rep.clone(), partner.clone()],
        t,
        degenerate: false,
    })
}

impl Strategy for WorstPair {
    fn name(&self) -> &str {
        "worst-pair"
    }

    fn max_weight(&self) -> usize {
        self.t
    }

    fn emit(&self, _trial: u64, rng: &mut dyn RngCore) -> PauliOp {
        if self.degenerate {
            return self.pair[0].clone();
        }
        self.pair[usize::from(rng.random::<bool>())].clone()
    }
}

/// The public instance: base code, its list table and the key schedule.
#[derive(Clone, Debug)]
pub struct KeyedCodeFactory {
    pub base: StabilizerCode,
    pub table: ListTable,
    pub schedule: KeySchedule,
}

impl KeyedCodeFactory {
    pub fn new(
        base: StabilizerCode,
        t: usize,
        k_extra: usize,
        eta: f64,
        cap: u128,
    ) -> Result<Self> {
        let table = build_table_with_cap(&base, t, cap)?;
        let schedule = KeySchedule::new(base.num_logical(), k_extra, eta)?;
        Ok(Self {
            base,
            table,
            schedule,
        })
    }

    pub fn t(&self) -> usize {
        self.table.max_weight()
    }
}

/// The fixed error with the largest exact failure probability over the
/// whole key space, ties broken by decode failures.
#[derive(Clone, Debug)]
pub struct ExhaustiveWorst {
    pub error: PauliOp,
    pub sweep: KeySweep,
    /// Every error of weight at most `t` with its sweep, in enumeration
    /// order.
    pub all: Vec<(PauliOp, KeySweep)>,
}

impl ExhaustiveWorst {
    pub fn strategy(&self) -> Fixed {
        Fixed::new("exhaustive-worst", self.error.clone())
    }

    /// Largest decode-failure rate over all errors.
    pub fn max_decode_failure(&self) -> f64 {
        self.all
            .iter()
            .map(|(_, s)| s.decode_failure_rate())
            .fold(0.0, f64::max)
    }
}

pub fn exhaustive_worst(factory: &KeyedCodeFactory) -> Result<ExhaustiveWorst> {
    let errors = enumerate_errors_with_cap(factory.base.num_qubits(), factory.t(), u128::MAX)?;
    let mut all = Vec::with_capacity(errors.len());
    for e in errors.iter() {
        all.push((
            e.clone(),
            sweep_keys(&factory.schedule, &factory.base, &factory.table, e)?,
        ));
    }
    let (error, sweep) = all
        .iter()
        .fold(None::<&(PauliOp, KeySweep)>, |best, cur| match best {
            Some(b)
                if (b.1.failures, b.1.decode_failures)
                    >= (cur.1.failures, cur.1.decode_failures) =>
            {
                Some(b)
            }
            _ => Some(cur),
        })
        .cloned()
        .expect("error set contains the identity");
    Ok(ExhaustiveWorst { error, sweep, all })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub index: u64,
    pub key: BitVec,
    pub error: PauliOp,
    pub outcome: TrialOutcome,
}

/// Runs `trials` independent trials. Trial `i` uses its own generator from
/// `(seed, i)`: the strategy emits first, then the key is drawn.
pub fn run_trials(
    factory: &KeyedCodeFactory,
    strategy: &dyn Strategy,
    trials: u64,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    (0..trials)
        .into_par_iter()
        .map(|index| {
            let mut rng = trial_rng(seed, index);
            let error = strategy.emit(index, &mut rng);
            if error.weight() > factory.t() {
                return Err(Error::Domain(format!(
                    "strategy {} emitted weight {} above t={}",
                    strategy.name(),
                    error.weight(),
                    factory.t()
                )));
            }
            let key = factory.schedule.random_key(&mut rng);
            let kc = factory.schedule.augment(&factory.base, &key)?;
            let outcome = run_trial(&kc, &factory.table, &error)?;
            Ok(TrialRecord {
                index,
                key,
                error,
                outcome,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureEstimate {
    /// Trials that were not a unique correct decode.
    pub failures: Proportion,
    /// Trials whose applied correction left a logical error.
    pub decode_failures: Proportion,
    pub ambiguous: u64,
    pub uncorrectable: u64,
}

impl FailureEstimate {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let n = records.len() as u64;
        let count = |f: &dyn Fn(&TrialOutcome) -> bool| {
            records.iter().filter(|r| f(&r.outcome)).count() as u64
        };
        use crate::protocol::DecodeStatus;
        Self {
            failures: Proportion::new(count(&|o| !o.success), n),
            decode_failures: Proportion::new(count(&|o| !o.correction_restores), n),
            ambiguous: count(&|o| o.status == DecodeStatus::Ambiguous),
            uncorrectable: count(&|o| o.status == DecodeStatus::Uncorrectable),
        }
    }
}

/// Failure frequency over fresh keys, with Wilson intervals.
pub fn estimate_failure(
    factory: &KeyedCodeFactory,
    strategy: &dyn Strategy,
    trials: u64,
    seed: u64,
) -> Result<FailureEstimate> {
    if trials == 0 {
        return Err(Error::Domain("trials must be positive".into()));
    }
    Ok(FailureEstimate::from_records(&run_trials(
        factory, strategy, trials, seed,
    )?))
}
