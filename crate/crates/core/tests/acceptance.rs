//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits nonzero if any fails.

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;

use qlistcode::adversary::{estimate_failure, exhaustive_worst, Fixed, KeyedCodeFactory};
use qlistcode::biased;
use qlistcode::bounds::{self, failure_bound, k_of, ListLength};
use qlistcode::coherent::{end_to_end_with, expected_fidelity, Encoder, KrausSet, StateVec};
use qlistcode::gf2::BitVec;
use qlistcode::listcode::{build_table, union_bound};
use qlistcode::pauli::{PauliOp, DEFAULT_ENUMERATION_CAP};
use qlistcode::protocol::{augment, distinguish_experiment, run_trial, KeySchedule};
use qlistcode::stabilizer::{
    five_qubit_code, four_qubit_detection_code, generating_set_count, random_code, StabilizerCode,
};
use qlistcode::stats::{trial_rng, within_three_sigma, Proportion};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "list decodability matches naive oracle",
            c1_oracle_equivalence,
        ),
        ("five-qubit code is a [5,1,1,0] list code", c2_five_qubit),
        ("[[4,2]] detection code has L_min = 2", c3_detection_code),
        ("union bound over random [[10,2]] codes", c4_union_bound),
        ("generating-set counts", c5_counting),
        ("key budget arithmetic", c6_budget),
        ("powering-set bias certification", c7_bias),
        ("distinguishing experiment at K = 18", c8_distinguish),
        ("exact key sweep vs Monte Carlo on [[4,2]]", c9_exact_vs_mc),
        ("coherent collapse", c10_coherent),
        ("rate constants", c11_constants),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name} ({}; {:.2}s)",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// Bitmask Paulis for the oracles: (x, z), qubit q at bit q.
type Mask = (u64, u64);

fn mask(p: &PauliOp) -> Mask {
    (p.x().to_u64(), p.z().to_u64())
}

fn sym(a: Mask, b: Mask) -> bool {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) % 2 == 1
}

fn span(rows: &[Mask]) -> Vec<Mask> {
    (0u64..1 << rows.len())
        .map(|sel| {
            rows.iter()
                .enumerate()
                .filter(|(i, _)| sel >> i & 1 == 1)
                .fold((0, 0), |acc, (_, r)| (acc.0 ^ r.0, acc.1 ^ r.1))
        })
        .collect()
}

/// Weight-<=1 errors, grouped by syndrome, with a coset label for every
/// normalizer element found by enumerating stabilizer times logical group.
struct Oracle {
    groups: BTreeMap<u64, Vec<Mask>>,
    coset: HashMap<Mask, usize>,
}

impl Oracle {
    fn new(code: &StabilizerCode) -> Self {
        let n = code.num_qubits();
        let gens: Vec<Mask> = code.generators().iter().map(mask).collect();
        let logicals: Vec<Mask> = code.logical_operators().iter().map(mask).collect();
        let stab = span(&gens);
        let mut coset = HashMap::new();
        for (c, l) in span(&logicals).into_iter().enumerate() {
            for s in &stab {
                coset.insert((l.0 ^ s.0, l.1 ^ s.1), c);
            }
        }
        let mut errors = vec![(0u64, 0u64)];
        for q in 0..n {
            errors.extend([(1 << q, 0), (0, 1 << q), (1 << q, 1 << q)]);
        }
        let mut groups: BTreeMap<u64, Vec<Mask>> = BTreeMap::new();
        for e in errors {
            let s = gens
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, g)| acc | (u64::from(sym(e, *g)) << i));
            groups.entry(s).or_default().push(e);
        }
        Self { groups, coset }
    }

    /// Whether `es[1..] - es[0]` have linearly independent logical classes.
    fn independent(&self, es: &[Mask]) -> bool {
        let classes: Vec<usize> = es[1..]
            .iter()
            .map(|e| self.coset[&(e.0 ^ es[0].0, e.1 ^ es[0].1)])
            .collect();
        (1u64..1 << classes.len()).all(|sel| {
            classes
                .iter()
                .enumerate()
                .filter(|(i, _)| sel >> i & 1 == 1)
                .fold(0, |acc, (_, c)| acc ^ c)
                != 0
        })
    }

    /// No syndrome holds `L + 2` errors with `L + 1` independent differences.
    fn is_list_code(&self, l: usize) -> bool {
        self.groups.values().all(|g| {
            !subsets(g.len(), l + 2).any(|idx| {
                let es: Vec<Mask> = idx.iter().map(|&i| g[i]).collect();
                self.independent(&es)
            })
        })
    }
}

fn subsets(n: usize, r: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n)
        .filter(move |m| m.count_ones() as usize == r)
        .map(move |m| (0..n).filter(|i| m >> i & 1 == 1).collect())
}

fn c1_oracle_equivalence() -> Verdict {
    let mut mismatches = 0;
    let mut by_l = [0usize; 5];
    for i in 0..100u64 {
        let mut rng = trial_rng(101, i);
        let k = rng.random_range(1..=2usize);
        let n = rng.random_range(k + 1..=6);
        let code = random_code(n, k, &mut rng).unwrap();
        let table = build_table(&code, 1).unwrap();
        let oracle = Oracle::new(&code);
        by_l[table.report().l_min.min(4)] += 1;
        for l in 0..=3 {
            if table.is_list_code(l) != oracle.is_list_code(l) {
                mismatches += 1;
            }
        }
    }
    verdict(mismatches == 0, format!(
            "{mismatches} mismatches over 100 codes x 4 list lengths; L_min histogram 0..=4+: {by_l:?}"
        ))
}

fn c2_five_qubit() -> Verdict {
    let code = five_qubit_code();
    let table = build_table(&code, 1).unwrap();
    let ranks_zero = table.entries().values().all(|e| e.rank() == 0);
    let kc = augment(&code, 0, &BitVec::zeros(0), 0.5).unwrap();
    let errors = qlistcode::pauli::enumerate_errors(5, 1).unwrap();
    let successes = errors
        .iter()
        .filter(|e| run_trial(&kc, &table, e).unwrap().success)
        .count();
    verdict(
        table.len() == 16 && ranks_zero && successes == 16 && table.report().l_min == 0,
        format!(
            "{} syndromes, all ranks zero: {ranks_zero}, {successes}/16 decodes succeed",
            table.len()
        ),
    )
}

fn c3_detection_code() -> Verdict {
    let table = build_table(&four_qubit_detection_code(), 1).unwrap();
    let l = table.report().l_min;
    verdict(l == 2, format!("L_min = {l}"))
}

fn c4_union_bound() -> Verdict {
    let codes = 2000u64;
    let bad = (0..codes)
        .filter(|&i| {
            let code = random_code(10, 2, &mut trial_rng(404, i)).unwrap();
            build_table(&code, 1).unwrap().report().l_min > 2
        })
        .count() as u64;
    let bound = union_bound(10, 2, 1, 2);
    let frozen = 31f64.powi(3) / 65536.0;
    let p = Proportion::new(bad, codes);
    verdict(
        (bound - frozen).abs() < 1e-12 && within_three_sigma(&p, bound),
        format!("{bad}/{codes} = {:.4} not 2-list, bound {bound:.5}", p.rate),
    )
}

/// Ordered tuples of independent, pairwise commuting, nonzero symplectic
/// vectors.
fn count_generating_sets(n: usize, r: usize) -> u128 {
    fn extend(n: usize, r: usize, chosen: &mut Vec<Mask>) -> u128 {
        if chosen.len() == r {
            return 1;
        }
        let spanned = span(chosen);
        let mut total = 0;
        for x in 0u64..1 << n {
            for z in 0u64..1 << n {
                let v = (x, z);
                if spanned.contains(&v) || chosen.iter().any(|&g| sym(g, v)) {
                    continue;
                }
                chosen.push(v);
                total += extend(n, r, chosen);
                chosen.pop();
            }
        }
        total
    }
    extend(n, r, &mut Vec::new())
}

fn c5_counting() -> Verdict {
    let cases = [(1, 0, 3u128), (2, 1, 15), (2, 0, 90)];
    let mut ok = true;
    let mut detail = Vec::new();
    for (n, k, want) in cases {
        let brute = count_generating_sets(n, n - k);
        let formula = generating_set_count(n, k).unwrap();
        ok &= brute == want && formula == want;
        detail.push(format!("({n},{k}): {brute}/{formula}"));
    }
    verdict(ok, format!("enumerated/formula {}", detail.join(", ")))
}

fn c6_budget() -> Verdict {
    let k = k_of(2, 0.1).unwrap();
    let fb = failure_bound(2, 0.5, 18);
    // 2^4 (3/4)^18 = 3^18 / 4^16 exactly.
    let exact = 387_420_489.0 / 4_294_967_296.0;
    let ok = k == 18 && (fb - exact).abs() < 1e-15 && fb <= 0.1;
    verdict(
        ok,
        format!(
            "k_of = {k}, failure_bound = {fb:.7} = 3^18/4^16 <= 0.1; \
             the quoted 0.0904 is {:.1e} above the formula value",
            0.0904 - fb
        ),
    )
}

fn c7_bias() -> Verdict {
    let mut checked = 0;
    let mut worst_margin = f64::INFINITY;
    let mut ok = true;
    for m in 1..=12 {
        for ell in 1..=10 {
            if m > 1 << ell {
                continue;
            }
            let set = biased::aghp(m, ell).unwrap();
            let measured = biased::measure_bias(&set).unwrap();
            let bound = (m as f64 - 1.0) / (1u64 << ell) as f64;
            if !matches!(set.construction(), biased::Construction::Powering { .. }) {
                continue;
            }
            ok &= measured <= bound + 1e-12;
            worst_margin = worst_margin.min(bound - measured);
            checked += 1;
        }
    }
    verdict(
        ok,
        format!("{checked} (m, ell) pairs, smallest margin {worst_margin:.4}"),
    )
}

fn c8_distinguish() -> Verdict {
    let r = distinguish_experiment(20, 2, 18, 0.5, 100_000, 808).unwrap();
    let c = r.collisions;
    let steps_ok = r.steps.iter().all(|s| {
        s.conditional()
            .is_none_or(|p| within_three_sigma(&p, s.limit()))
    });
    let worst_step = r
        .steps
        .iter()
        .filter_map(|s| s.conditional().map(|p| p.rate - s.limit()))
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        c.rate <= 0.1 && steps_ok,
        format!(
            "collision rate {} ({}/{}), bound {:.4} at eta_eff {:.4}, worst per-step excess {worst_step:.4}",
            c.rate, c.hits, c.trials, r.bound, r.eta_eff
        ),
    )
}

fn c9_exact_vs_mc() -> Verdict {
    let factory = KeyedCodeFactory::new(
        four_qubit_detection_code(),
        1,
        1,
        0.5,
        DEFAULT_ENUMERATION_CAP,
    )
    .unwrap();
    let worst = exhaustive_worst(&factory).unwrap();
    let mut ok = true;
    let mut max_dev: f64 = 0.0;
    for (i, (e, sweep)) in worst.all.iter().enumerate() {
        let est = estimate_failure(
            &factory,
            &Fixed::new("fixed", e.clone()),
            4000,
            900 + i as u64,
        )
        .unwrap();
        for (exact, mc) in [
            (sweep.failure_rate(), est.failures),
            (sweep.decode_failure_rate(), est.decode_failures),
        ] {
            let sigma = (exact * (1.0 - exact) / mc.trials as f64).sqrt();
            ok &= (mc.rate - exact).abs() <= 3.0 * sigma + 1e-12;
            max_dev = max_dev.max((mc.rate - exact).abs());
        }
    }

    // Pauli-level against statevector for every key and single-Pauli attack.
    let mut rng = trial_rng(909, 0);
    let mut agree = 0;
    let mut total = 0;
    let key_bits = factory.schedule.key_len();
    for key in 0u64..1 << key_bits {
        let kc = factory
            .schedule
            .augment(&factory.base, &BitVec::from_u64(key_bits, key))
            .unwrap();
        let enc = Encoder::new(kc.augmented()).unwrap();
        for (e, _) in &worst.all {
            let pauli = run_trial(&kc, &factory.table, e).unwrap();
            let logical = StateVec::random(kc.payload_qubits(), &mut rng);
            let coh = end_to_end_with(
                &kc,
                &factory.table,
                &enc,
                &KrausSet::single(e.clone()),
                &logical,
                &mut rng,
            )
            .unwrap();
            total += 1;
            if coh.syndrome_public == pauli.syndrome_public
                && coh.syndrome_secret == pauli.syndrome_secret
                && coh.status == pauli.status
                && ((coh.fidelity - 1.0).abs() < 1e-9) == pauli.correction_restores
            {
                agree += 1;
            }
        }
    }
    verdict(
        ok && agree == total,
        format!(
            "worst failure {:.4}, worst decode failure {:.4}, max |MC - exact| {max_dev:.4}; \
             Pauli/coherent agree {agree}/{total}",
            worst.sweep.failure_rate(),
            worst.max_decode_failure()
        ),
    )
}

const X1_PM_X2_FIVE: &str = "0.5 0 XIIII\n0.5 0 IXIII\n\n0.5 0 XIIII\n-0.5 0 IXIII\n";
const X1_PM_X2_FOUR: &str = "0.5 0 XIII\n0.5 0 IXII\n\n0.5 0 XIII\n-0.5 0 IXII\n";

/// Key-averaged exact fidelity for a fixed logical input.
fn key_averaged_fidelity(code: &StabilizerCode, k_extra: usize, ks: &KrausSet, seed: u64) -> f64 {
    let table = build_table(code, 1).unwrap();
    let schedule = KeySchedule::new(code.num_logical(), k_extra, 0.5).unwrap();
    let bits = schedule.key_len();
    let logical = StateVec::random(code.num_logical() - k_extra, &mut trial_rng(seed, 0));
    let keys = 1u64 << bits;
    (0..keys)
        .map(|key| {
            let kc = schedule
                .augment(code, &BitVec::from_u64(bits, key))
                .unwrap();
            let enc = Encoder::new(kc.augmented()).unwrap();
            expected_fidelity(&kc, &table, &enc, ks, &logical).unwrap()
        })
        .sum::<f64>()
        / keys as f64
}

fn c10_coherent() -> Verdict {
    let five = five_qubit_code();
    let attack5 = KrausSet::parse(X1_PM_X2_FIVE).unwrap();
    let table = build_table(&five, 1).unwrap();
    let kc = augment(&five, 0, &BitVec::zeros(0), 0.5).unwrap();
    let enc = Encoder::new(kc.augmented()).unwrap();
    let mut rng = trial_rng(1010, 0);
    let mut worst5: f64 = 0.0;
    for _ in 0..20 {
        let logical = StateVec::random(1, &mut rng);
        let exact = expected_fidelity(&kc, &table, &enc, &attack5, &logical).unwrap();
        let sampled = end_to_end_with(&kc, &table, &enc, &attack5, &logical, &mut rng)
            .unwrap()
            .fidelity;
        worst5 = worst5.max((1.0 - exact).abs()).max((1.0 - sampled).abs());
    }

    let four = four_qubit_detection_code();
    let attack4 = KrausSet::parse(X1_PM_X2_FOUR).unwrap();
    let f0 = key_averaged_fidelity(&four, 0, &attack4, 1011);
    let f1 = key_averaged_fidelity(&four, 1, &attack4, 1011);
    verdict(
        worst5 <= 1e-9 && f0 < 1.0 - 1e-6,
        format!(
            "[[5,1]] max |1 - F| = {worst5:.1e}; [[4,2]] key-averaged F = {f0:.6} at K=0, {f1:.6} at K=1"
        ),
    )
}

fn c11_constants() -> Verdict {
    let crossing = bounds::list_rate_zero_crossing(ListLength::Infinite).unwrap();
    let rains = bounds::rains_threshold();
    let grid_ok = (1..=158).all(|i| {
        let p = i as f64 / 1000.0;
        bounds::gv_rate(p).unwrap().raw < bounds::list_rate(p, ListLength::Infinite).unwrap().raw
    });
    verdict(
        (crossing - 0.1893).abs() <= 5e-4 && (rains - 0.1585).abs() <= 1e-4 && grid_ok,
        format!("zero crossing {crossing:.5}, Rains {rains:.5}, GV below list rate on (0, 0.158]: {grid_ok}"),
    )
}
