//! The `qlistcode` command-line harness.
//!
//! Every stochastic command takes a mandatory seed and writes it, with all
//! parameters, into a header comment. Outputs are plain CSV or line formats
//! whose first line names a schema version.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand_chacha::ChaCha8Rng;

use crate::adversary::{
    estimate_failure, exhaustive_worst, run_trials, uniform_strategy_with_cap, worst_pair_strategy,
    FailureEstimate, Fixed, KeyedCodeFactory, Strategy,
};
use crate::biased::{self, BiasedSet};
use crate::bounds::{self, failure_bound, ListLength};
use crate::coherent::{end_to_end_with, Encoder, KrausSet, StateVec};
use crate::error::{Error, Result};
use crate::listcode::{build_table_with_cap, union_bound};
use crate::pauli::DEFAULT_ENUMERATION_CAP;
use crate::protocol::distinguish_experiment;
use crate::stabilizer::{five_qubit_code, four_qubit_detection_code, random_code, StabilizerCode};
use crate::stats::{trial_rng, within_three_sigma, Proportion};

pub const BOUNDS_SCHEMA: &str = "# qlistcode-bounds v1";
pub const TRIALS_SCHEMA: &str = "# qlistcode-trials v1";
pub const STEPS_SCHEMA: &str = "# qlistcode-steps v1";
pub const TRIALS_HEADER: &str = "index,key_hex,syndrome_hex,secret_bits,outcome";

#[derive(Debug, Parser)]
#[command(
    name = "qlistcode",
    version,
    about = "Quantum list codes over adversarial channels"
)]
pub struct Cli {
    /// Seed for every random choice; required by stochastic commands.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads. Changes speed only, never results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Override the error-enumeration cap.
    #[arg(long, global = true)]
    pub cap: Option<u128>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the rate bounds over an error-fraction range.
    Bounds {
        #[arg(long, default_value_t = 0.0)]
        p_min: f64,
        #[arg(long, default_value_t = 0.25)]
        p_max: f64,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        /// Finite list length for the `list_rate_L` column.
        #[arg(long = "list-length", short = 'L', default_value_t = 2)]
        list_length: usize,
    },
    /// Sample a random [[n, k]] stabilizer code.
    GenCode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Compute the minimal list length of a code file.
    CheckList {
        /// Code file, or `five-qubit` / `four-qubit`.
        #[arg(long)]
        code: String,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long = "list-length", short = 'L')]
        list_length: Option<usize>,
    },
    /// Build a small-bias set and export it.
    BiasedSet {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        ell: Option<usize>,
        /// Measure the bias exhaustively (m <= 24).
        #[arg(long)]
        measure: bool,
    },
    /// Failure rate of a keyed subcode under a Pauli adversary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Fidelity of a keyed subcode under a coherent Kraus attack.
    Coherent {
        #[arg(long)]
        config: PathBuf,
    },
    /// Full pipeline with per-trial CSV and a pass/fail summary.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Parses `args` (program name first) and runs the command, writing to
/// `stdout` or the `--out` file.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                write!(stdout, "{e}")?;
                return Ok(());
            }
            return Err(Error::Usage(e.to_string().trim_end().to_string()));
        }
    };
    match cli.threads {
        Some(0) => Err(Error::Usage("--threads must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::Usage(e.to_string()))?;
            let mut buf = Vec::new();
            let res = pool.install(|| dispatch(&cli, &mut buf));
            stdout.write_all(&buf)?;
            res
        }
        None => dispatch(&cli, stdout),
    }
}

struct Output<'a> {
    path: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Output<'_> {
    /// Main output: the `--out` file if given, else stdout.
    fn emit(&mut self, text: &str) -> Result<()> {
        match self.path {
            Some(p) => std::fs::write(p, text)?,
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn note(&mut self, text: &str) -> Result<()> {
        self.stdout.write_all(text.as_bytes())?;
        Ok(())
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let cap = cli.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let mut out = Output {
        path: cli.out.as_deref(),
        stdout,
    };
    match &cli.command {
        Command::Bounds {
            p_min,
            p_max,
            step,
            list_length,
        } => out.emit(&bounds_csv(*p_min, *p_max, *step, *list_length)?),
        Command::GenCode { n, k } => {
            let seed = require_seed(cli.seed, None)?;
            out.emit(&gen_code(*n, *k, seed)?)
        }
        Command::CheckList {
            code,
            t,
            list_length,
        } => {
            let code = load_code(code, None)?;
            let table = build_table_with_cap(&code, *t, cap)?;
            let report = table.report();
            let mut s = String::new();
            let _ = writeln!(
                s,
                "n = {}, k = {}, t = {t}",
                code.num_qubits(),
                code.num_logical()
            );
            let _ = writeln!(s, "N_E = {}", report.n_e);
            let _ = writeln!(s, "syndromes = {}", report.entry_count);
            let _ = writeln!(s, "L_min = {}", report.l_min);
            let _ = writeln!(s, "worst_syndrome = {}", report.worst_syndrome);
            if let Some(l) = list_length {
                let _ = writeln!(s, "list_code(L={l}) = {}", table.is_list_code(*l));
                let _ = writeln!(
                    s,
                    "union_bound(L={l}) = {}",
                    union_bound(code.num_qubits(), code.num_logical(), *t, *l)
                );
            }
            if let Some(p) = cli.out.as_deref() {
                std::fs::write(p, table.export())?;
            }
            out.note(&s)
        }
        Command::BiasedSet {
            m,
            eta,
            ell,
            measure,
        } => {
            let mut set = match (ell, eta) {
                (Some(ell), _) => biased::aghp(*m, *ell)?,
                (None, Some(eta)) => biased::for_target(*m, *eta)?,
                (None, None) => return Err(Error::Usage("biased-set needs --eta or --ell".into())),
            };
            if *measure {
                set.certify()?;
            }
            let summary = biased_summary(&set);
            if cli.out.is_some() {
                out.emit(&set.export())?;
                out.note(&summary)
            } else {
                out.emit(&set.export())
            }
        }
        Command::Simulate { config } => {
            let cfg = Config::load(config, SIMULATE_KEYS)?;
            let seed = require_seed(cli.seed, cfg.get("seed")?)?;
            let text = simulate(&cfg, seed, cap)?;
            out.emit(&text)
        }
        Command::Coherent { config } => {
            let cfg = Config::load(config, COHERENT_KEYS)?;
            let seed = require_seed(cli.seed, cfg.get("seed")?)?;
            out.emit(&coherent(&cfg, seed, cap)?)
        }
        Command::Experiment { config } => {
            let cfg = Config::load(config, EXPERIMENT_KEYS)?;
            let seed = require_seed(cli.seed, cfg.get("seed")?)?;
            let (csv, summary) = experiment(&cfg, seed, cap)?;
            if cli.out.is_some() {
                out.emit(&csv)?;
            } else {
                out.note(&csv)?;
            }
            out.note(&summary)
        }
    }
}

fn require_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    flag.or(config)
        .ok_or_else(|| Error::Usage("a seed is required (--seed or seed= in the config)".into()))
}

/// Sweep with columns `p, list_rate_Linf, list_rate_L, gv_rate, rains_flag`.
/// `gv_rate` is empty above `p = 1/4`.
pub fn bounds_csv(p_min: f64, p_max: f64, step: f64, l: usize) -> Result<String> {
    let valid = step > 0.0 && p_min >= 0.0 && p_max <= 0.5 && p_min <= p_max;
    if !valid {
        return Err(Error::Domain(format!(
            "range [{p_min}, {p_max}] with step {step} yields no rows"
        )));
    }
    if l == 0 {
        return Err(Error::Domain("list length must be at least 1".into()));
    }
    let rows = ((p_max - p_min) / step + 1e-9).floor() as usize + 1;
    let mut s = String::new();
    let _ = writeln!(s, "{BOUNDS_SCHEMA}");
    let _ = writeln!(s, "# p_min={p_min} p_max={p_max} step={step} L={l}");
    let _ = writeln!(s, "p,list_rate_Linf,list_rate_L,gv_rate,rains_flag");
    let threshold = bounds::rains_threshold();
    for i in 0..rows {
        let p = p_min + i as f64 * step;
        let inf = bounds::list_rate(p, ListLength::Infinite)?.value;
        let fin = bounds::list_rate(p, ListLength::Finite(l))?.value;
        let gv = bounds::gv_rate(p)
            .map(|r| r.value.to_string())
            .unwrap_or_default();
        let _ = writeln!(s, "{p},{inf},{fin},{gv},{}", u8::from(p >= threshold));
    }
    Ok(s)
}

/// Generator for code sampling, disjoint from all trial streams.
pub fn code_rng(seed: u64) -> ChaCha8Rng {
    trial_rng(seed, u64::MAX)
}

pub fn gen_code(n: usize, k: usize, seed: u64) -> Result<String> {
    let code = random_code(n, k, &mut code_rng(seed))?;
    Ok(format!(
        "# gen-code n={n} k={k} seed={seed}\n{}",
        code.to_code_file(true)
    ))
}

fn biased_summary(set: &BiasedSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "size = {}", set.size());
    let _ = writeln!(s, "key_bits = {}", set.key_bits());
    let _ = writeln!(s, "bias_bound = {}", set.bias_bound());
    if let Some(b) = set.bias_exact() {
        let _ = writeln!(s, "bias_exact = {b}");
    }
    s
}

/// Flat `key = value` configuration; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
    base_dir: PathBuf,
}

const SHARED_KEYS: &[&str] = &["code", "n", "k", "t", "K", "eta", "trials", "seed", "cap"];
const SIMULATE_KEYS: &[&str] = &["adversary"];
const COHERENT_KEYS: &[&str] = &["kraus", "logical", "samples"];
const EXPERIMENT_KEYS: &[&str] = &["mode", "adversary", "k_logical", "L", "epsilon"];

impl Config {
    /// Parses config text. Keys outside `SHARED_KEYS` and `extra` are
    /// rejected.
    pub fn parse(text: &str, extra: &[&str]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Usage(format!("config line {}: expected key = value", i + 1))
            })?;
            let k = k.trim();
            if !SHARED_KEYS.contains(&k) && !extra.contains(&k) {
                return Err(Error::Usage(format!(
                    "config line {}: unknown key {k:?}",
                    i + 1
                )));
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Usage(format!(
                    "config line {}: duplicate key {k:?}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            values,
            base_dir: PathBuf::new(),
        })
    }

    pub fn load(path: &Path, extra: &[&str]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, extra)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::Usage(format!("config key {key}: cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::Usage(format!("config key {key} is required")))
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// A path value resolved against the config file's directory and
    /// checked to exist.
    pub fn path(&self, key: &str) -> Result<PathBuf> {
        let raw = self
            .get_str(key)
            .ok_or_else(|| Error::Usage(format!("config key {key} is required")))?;
        let p = self.base_dir.join(raw);
        if !p.exists() {
            return Err(Error::Usage(format!(
                "{key}: {} does not exist",
                p.display()
            )));
        }
        Ok(p)
    }
}

/// A built-in name (`five-qubit`, `four-qubit`), `random` (needs `n`, `k`
/// and a seed), or a code file path.
fn load_code(spec: &str, random: Option<(&Config, u64)>) -> Result<StabilizerCode> {
    match spec {
        "five-qubit" => Ok(five_qubit_code()),
        "four-qubit" => Ok(four_qubit_detection_code()),
        "random" => {
            let (cfg, seed) = random
                .ok_or_else(|| Error::Usage("code=random is only valid in configs".into()))?;
            random_code(cfg.require("n")?, cfg.require("k")?, &mut code_rng(seed))
        }
        path => {
            let base = random.map(|(c, _)| c.base_dir.clone()).unwrap_or_default();
            let p = base.join(path);
            let text = std::fs::read_to_string(&p)
                .map_err(|e| Error::Usage(format!("cannot read code file {}: {e}", p.display())))?;
            StabilizerCode::from_code_file(&text)
        }
    }
}

struct Instance {
    factory: KeyedCodeFactory,
    trials: u64,
    k_extra: usize,
    eta: f64,
}

fn instance(cfg: &Config, seed: u64, cap: u128, trials_key: &str) -> Result<Instance> {
    let trials: u64 = cfg.require(trials_key)?;
    if trials == 0 {
        return Err(Error::Usage(format!("{trials_key} must be positive")));
    }
    let code = load_code(cfg.get_str("code").unwrap_or("random"), Some((cfg, seed)))?;
    let t = cfg.get("t")?.unwrap_or(1);
    let k_extra = cfg.get("K")?.unwrap_or(0);
    let eta = cfg.get("eta")?.unwrap_or(0.5);
    let cap = cfg.get("cap")?.unwrap_or(cap);
    Ok(Instance {
        factory: KeyedCodeFactory::new(code, t, k_extra, eta, cap)?,
        trials,
        k_extra,
        eta,
    })
}

fn strategy(cfg: &Config, f: &KeyedCodeFactory, cap: u128) -> Result<Box<dyn Strategy>> {
    Ok(match cfg.get_str("adversary").unwrap_or("worst-pair") {
        "uniform" => Box::new(uniform_strategy_with_cap(f.base.num_qubits(), f.t(), cap)?),
        "worst-pair" => Box::new(worst_pair_strategy(&f.table)?),
        "identity" => Box::new(Fixed::identity(f.base.num_qubits())),
        "exhaustive-worst" => Box::new(exhaustive_worst(f)?.strategy()),
        other => return Err(Error::Usage(format!("unknown adversary {other:?}"))),
    })
}

fn header(kind: &str, cfg: &Config, seed: u64) -> String {
    let params: Vec<String> = cfg
        .values
        .iter()
        .filter(|(k, _)| k.as_str() != "seed")
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    format!("# {kind} seed={seed} {}\n", params.join(" "))
}

struct Verdict {
    lines: String,
}

fn physical_summary(inst: &Instance, est: &FailureEstimate, strategy: &str) -> Verdict {
    let f = &inst.factory;
    let l = f.table.report().l_min;
    let eta_eff = f.schedule.eta_eff();
    let bound = failure_bound(l, eta_eff, inst.k_extra);
    let rate = est.failures;
    let pass = within_three_sigma(&rate, bound);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "code = [[{}, {}]]",
        f.base.num_qubits(),
        f.base.num_logical()
    );
    let _ = writeln!(s, "t = {}", f.t());
    let _ = writeln!(s, "L_min = {l}");
    let _ = writeln!(s, "K = {}", inst.k_extra);
    let _ = writeln!(s, "eta_target = {}", inst.eta);
    let _ = writeln!(s, "eta_eff = {eta_eff}");
    let _ = writeln!(s, "adversary = {strategy}");
    let _ = writeln!(s, "trials = {}", rate.trials);
    let _ = writeln!(s, "failures = {}", rate.hits);
    let _ = writeln!(s, "failure_rate = {}", rate.rate);
    let _ = writeln!(s, "wilson95 = [{}, {}]", rate.lo, rate.hi);
    let _ = writeln!(s, "decode_failure_rate = {}", est.decode_failures.rate);
    let _ = writeln!(s, "failure_bound = {bound}");
    let _ = writeln!(s, "key_bits = {}", f.schedule.key_len());
    let _ = writeln!(s, "verdict = {}", if pass { "PASS" } else { "FAIL" });
    Verdict { lines: s }
}

fn simulate(cfg: &Config, seed: u64, cap: u128) -> Result<String> {
    let inst = instance(cfg, seed, cap, "trials")?;
    let strat = strategy(cfg, &inst.factory, cap)?;
    let est = estimate_failure(&inst.factory, strat.as_ref(), inst.trials, seed)?;
    let mut s = header("simulate", cfg, seed);
    s.push_str(&physical_summary(&inst, &est, strat.name()).lines);
    Ok(s)
}

fn coherent(cfg: &Config, seed: u64, cap: u128) -> Result<String> {
    let inst = instance(cfg, seed, cap, "samples")?;
    let kraus_path = cfg.path("kraus")?;
    let ks = KrausSet::parse(&std::fs::read_to_string(&kraus_path)?)?;
    if ks.max_weight() > inst.factory.t() {
        return Err(Error::Domain(format!(
            "Kraus terms reach weight {} above t={}",
            ks.max_weight(),
            inst.factory.t()
        )));
    }
    let random_logical = match cfg.get_str("logical").unwrap_or("random") {
        "random" => true,
        "zero" => false,
        other => {
            return Err(Error::Usage(format!(
                "logical must be random or zero, got {other:?}"
            )))
        }
    };
    let f = &inst.factory;
    let payload = f.base.num_logical() - inst.k_extra;
    let fids = (0..inst.trials)
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let key = f.schedule.random_key(&mut rng);
            let kc = f.schedule.augment(&f.base, &key)?;
            let enc = Encoder::new(kc.augmented())?;
            let logical = if random_logical {
                StateVec::random(payload, &mut rng)
            } else {
                StateVec::zero(payload)
            };
            Ok(end_to_end_with(&kc, &f.table, &enc, &ks, &logical, &mut rng)?.fidelity)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = fids.len() as f64;
    let mean = fids.iter().sum::<f64>() / n;
    let var = fids.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let min = fids.iter().copied().fold(f64::INFINITY, f64::min);
    let mut s = header("coherent", cfg, seed);
    let _ = writeln!(s, "samples = {}", fids.len());
    let _ = writeln!(s, "mean_fidelity = {mean}");
    let _ = writeln!(s, "stderr = {}", (var / n).sqrt());
    let _ = writeln!(s, "min_fidelity = {min}");
    Ok(s)
}

fn experiment(cfg: &Config, seed: u64, cap: u128) -> Result<(String, String)> {
    match cfg.get_str("mode").unwrap_or("physical") {
        "physical" => {
            let inst = instance(cfg, seed, cap, "trials")?;
            let strat = strategy(cfg, &inst.factory, cap)?;
            let records = run_trials(&inst.factory, strat.as_ref(), inst.trials, seed)?;
            let mut csv = String::new();
            let _ = writeln!(csv, "{TRIALS_SCHEMA}");
            csv.push_str(&header("experiment", cfg, seed));
            let _ = writeln!(csv, "{TRIALS_HEADER}");
            for r in &records {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    r.index,
                    r.key.to_hex(),
                    r.outcome.syndrome_public.to_hex(),
                    r.outcome.syndrome_secret.to_bit_string(),
                    r.outcome.label()
                );
            }
            let est = FailureEstimate::from_records(&records);
            Ok((csv, physical_summary(&inst, &est, strat.name()).lines))
        }
        "distinguish" => {
            let k_logical = cfg.require("k_logical")?;
            let l = cfg.require("L")?;
            let k_extra = cfg.require("K")?;
            let eta = cfg.get("eta")?.unwrap_or(0.5);
            let trials: u64 = cfg.require("trials")?;
            if trials == 0 {
                return Err(Error::Usage("trials must be positive".into()));
            }
            let epsilon: Option<f64> = cfg.get("epsilon")?;
            let r = distinguish_experiment(k_logical, l, k_extra, eta, trials, seed)?;
            let mut csv = String::new();
            let _ = writeln!(csv, "{STEPS_SCHEMA}");
            csv.push_str(&header("experiment", cfg, seed));
            let _ = writeln!(
                csv,
                "step,m,set_size,key_bits,eta_eff,alive,commuting,conditional,limit"
            );
            let mut steps_ok = true;
            for (j, st) in r.steps.iter().enumerate() {
                let cond = st.conditional();
                if let Some(c) = cond {
                    steps_ok &= within_three_sigma(&c, st.limit());
                }
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{}",
                    j + 1,
                    st.m,
                    st.set_size,
                    st.key_bits,
                    st.eta_eff,
                    st.alive,
                    st.commuting,
                    cond.map(|c| c.rate.to_string()).unwrap_or_default(),
                    st.limit()
                );
            }
            let c: Proportion = r.collisions;
            let mut pass = steps_ok && within_three_sigma(&c, r.bound);
            if let Some(eps) = epsilon {
                pass &= c.rate <= eps;
            }
            let mut s = String::new();
            let _ = writeln!(s, "k_logical = {k_logical}");
            let _ = writeln!(s, "L = {l}");
            let _ = writeln!(s, "K = {k_extra}");
            let _ = writeln!(s, "eta_target = {eta}");
            let _ = writeln!(s, "eta_eff = {}", r.eta_eff);
            let _ = writeln!(s, "trials = {}", c.trials);
            let _ = writeln!(s, "collisions = {}", c.hits);
            let _ = writeln!(s, "failure_rate = {}", c.rate);
            let _ = writeln!(s, "wilson95 = [{}, {}]", c.lo, c.hi);
            let _ = writeln!(s, "absorbed = {}", r.absorbed);
            let _ = writeln!(s, "failure_bound = {}", r.bound);
            let _ = writeln!(s, "key_bits = {}", r.key_bits);
            let _ = writeln!(
                s,
                "per_step_conditionals = {}",
                if steps_ok { "ok" } else { "violated" }
            );
            let _ = writeln!(s, "verdict = {}", if pass { "PASS" } else { "FAIL" });
            Ok((csv, s))
        }
        other => Err(Error::Usage(format!("unknown mode {other:?}"))),
    }
}

/// One row of the per-trial CSV.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRow {
    pub index: u64,
    pub key_hex: String,
    pub syndrome_hex: String,
    pub secret_bits: String,
    pub outcome: String,
}

/// Reads per-trial CSV, rejecting any schema other than the current one.
pub fn parse_trials_csv(text: &str) -> Result<Vec<TrialRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next().map(str::trim) {
        Some(TRIALS_SCHEMA) => {}
        other => {
            return Err(Error::Parse(format!(
                "unsupported trials schema {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in lines.filter(|l| !l.starts_with('#')) {
        if !saw_header {
            if line.trim() != TRIALS_HEADER {
                return Err(Error::Parse(format!("unexpected column header {line:?}")));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let [index, key, syn, secret, outcome] = f[..] else {
            return Err(Error::Parse(format!("bad row {line:?}")));
        };
        rows.push(TrialRow {
            index: index
                .parse()
                .map_err(|_| Error::Parse(format!("bad index {index:?}")))?,
            key_hex: key.into(),
            syndrome_hex: syn.into(),
            secret_bits: secret.into(),
            outcome: outcome.into(),
        });
    }
    Ok(rows)
}
