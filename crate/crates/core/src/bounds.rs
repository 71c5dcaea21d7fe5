//! Closed-form rates, thresholds and key budgets. All logarithms are base 2.

use std::fmt;

use crate::error::{Error, Result};

/// List length parameter; `Infinite` is the `L → ∞` limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListLength {
    Finite(usize),
    Infinite,
}

impl fmt::Display for ListLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ListLength::Finite(l) => write!(f, "{l}"),
            ListLength::Infinite => f.write_str("inf"),
        }
    }
}

/// A rate evaluated at error fraction `p`. `value` is `raw` clamped at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub p: f64,
    pub raw: f64,
    pub value: f64,
}

impl RatePoint {
    fn new(p: f64, raw: f64) -> Self {
        Self {
            p,
            raw,
            value: raw.max(0.0),
        }
    }
}

/// Binary entropy with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn check_unit(p: f64, hi: f64, what: &str) -> Result<()> {
    if !(0.0..=hi).contains(&p) {
        return Err(Error::Domain(format!("{what}: p={p} outside [0, {hi}]")));
    }
    Ok(())
}

/// `1 - (1 + 1/L)(H(p) + p log 3)`, the list-code rate; `L = ∞` gives
/// `1 - H(p) - p log 3`.
pub fn list_rate(p: f64, l: ListLength) -> Result<RatePoint> {
    check_unit(p, 0.5, "list_rate")?;
    let factor = match l {
        ListLength::Finite(0) => {
            return Err(Error::Domain("list_rate needs L >= 1".into()));
        }
        ListLength::Finite(l) => 1.0 + 1.0 / l as f64,
        ListLength::Infinite => 1.0,
    };
    let raw = 1.0 - factor * (binary_entropy(p) + p * 3f64.log2());
    Ok(RatePoint::new(p, raw))
}

/// Quantum Gilbert–Varshamov rate `1 - H(2p) - 2p log 3`.
pub fn gv_rate(p: f64) -> Result<RatePoint> {
    check_unit(p, 0.25, "gv_rate")?;
    let raw = 1.0 - binary_entropy(2.0 * p) - 2.0 * p * 3f64.log2();
    Ok(RatePoint::new(p, raw))
}

/// `(3 - √3) / 8`: no code sends a qubit exactly at or above this error
/// fraction.
pub fn rains_threshold() -> f64 {
    (3.0 - 3f64.sqrt()) / 8.0
}

/// `n (3 - √3) / 4`, the largest possible distance of an `n`-qubit code.
pub fn rains_distance(n: f64) -> f64 {
    n * (3.0 - 3f64.sqrt()) / 4.0
}

/// Smallest `p` in `(0, 1/2)` where the raw list rate reaches zero, by
/// bisection to `1e-12`.
pub fn list_rate_zero_crossing(l: ListLength) -> Result<f64> {
    let f = |p: f64| list_rate(p, l).map(|r| r.raw);
    let (mut lo, mut hi) = (0.0, 0.5);
    if f(hi)? > 0.0 {
        return Err(Error::Domain("list rate stays positive on [0, 1/2]".into()));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Number of extra generators `ceil((2L + log(1/ε)) / log(4/3))` needed for
/// failure probability below `ε` at bias `η = 1/2`.
pub fn k_of(l: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Domain(format!("epsilon={epsilon} outside (0, 1/2)")));
    }
    let k = (2.0 * l as f64 + (1.0 / epsilon).log2()) / (4.0f64 / 3.0).log2();
    Ok(k.ceil() as usize)
}

/// Union bound `2^{2L} ((1 + η) / 2)^K` on some pair of list elements
/// receiving identical secret syndromes. Uncapped: values `>= 1` are
/// vacuous.
pub fn failure_bound(l: usize, eta: f64, k: usize) -> f64 {
    debug_assert!((0.0..=1.0).contains(&eta));
    (2.0 * l as f64).exp2() * ((1.0 + eta) / 2.0).powi(k as i32)
}

/// Bits needed to index a set of the given size: `ceil(log2 size)`.
pub fn index_bits(size: usize) -> usize {
    if size <= 1 {
        0
    } else {
        (usize::BITS - (size - 1).leading_zeros()) as usize
    }
}

/// Secret-key accounting for `K` biased-set draws.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyBudget {
    pub k_extra: usize,
    pub eta: f64,
    /// `ceil(log2 |A_j|)` per step.
    pub per_set_bits: Vec<usize>,
    /// Exact total.
    pub key_bits: usize,
    /// `K log2(n^2 / η)`, the asymptotic envelope without its constant.
    pub envelope_bits: f64,
}

pub fn key_bits(n: usize, eta: f64, set_sizes: &[usize]) -> KeyBudget {
    let per_set_bits: Vec<usize> = set_sizes.iter().map(|&s| index_bits(s)).collect();
    let k_extra = set_sizes.len();
    KeyBudget {
        k_extra,
        eta,
        key_bits: per_set_bits.iter().sum(),
        per_set_bits,
        envelope_bits: k_extra as f64 * ((n * n) as f64 / eta).log2(),
    }
}

/// Payload qubits per channel use after spending `K` logical qubits on
/// secret generators: `(k - K) / n`.
pub fn net_rate(n: usize, k: usize, k_extra: usize) -> f64 {
    (k as f64 - k_extra as f64) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent evaluation with natural logs.
    fn list_rate_inf_ln(p: f64) -> f64 {
        let h = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / 2f64.ln();
        1.0 - h - p * 3f64.ln() / 2f64.ln()
    }

    #[test]
    fn list_rate_examples() {
        let r = list_rate(0.1, ListLength::Infinite).unwrap();
        assert!((r.value - list_rate_inf_ln(0.1)).abs() < 1e-12);
        assert!((r.value - 0.3725082).abs() < 1e-6);
        for l in [
            ListLength::Finite(1),
            ListLength::Finite(5),
            ListLength::Infinite,
        ] {
            assert_eq!(list_rate(0.0, l).unwrap().value, 1.0);
        }
        let p = list_rate_zero_crossing(ListLength::Infinite).unwrap();
        assert!((p - 0.189).abs() < 5e-4, "zero crossing {p}");
        assert!(list_rate(0.6, ListLength::Infinite).is_err());
        assert!(list_rate(0.1, ListLength::Finite(0)).is_err());
        assert_eq!(list_rate(0.4, ListLength::Infinite).unwrap().value, 0.0);
        assert!(list_rate(0.4, ListLength::Infinite).unwrap().raw < 0.0);
    }

    #[test]
    fn gv_rate_examples() {
        let g = gv_rate(0.05).unwrap();
        assert!((g.value - list_rate(0.1, ListLength::Infinite).unwrap().value).abs() < 1e-12);
        assert_eq!(gv_rate(0.0).unwrap().value, 1.0);
        assert!(gv_rate(0.3).is_err());
        let mut p = 0.001;
        while p <= 0.158 {
            assert!(gv_rate(p).unwrap().value < list_rate(p, ListLength::Infinite).unwrap().value);
            p += 0.001;
        }
    }

    #[test]
    fn rains_examples() {
        assert!((rains_threshold() - 0.15849).abs() < 1e-5);
        assert!((rains_distance(100.0) - 31.698).abs() < 1e-3);
        assert_eq!(rains_distance(0.0), 0.0);
    }

    #[test]
    fn k_of_examples() {
        assert_eq!(k_of(2, 0.1).unwrap(), 18);
        assert_eq!(k_of(0, 0.5 - 1e-9).unwrap(), 3);
        assert!(k_of(1, 0.5).is_err());
        assert!(k_of(1, 0.0).is_err());
        for l in 0..=4 {
            for eps in [0.25, 0.1, 0.01] {
                assert!(failure_bound(l, 0.5, k_of(l, eps).unwrap()) <= eps);
            }
        }
    }

    #[test]
    fn failure_bound_examples() {
        // 16 (3/4)^18 = 3^18 / 4^16 exactly.
        let exact = 3f64.powi(18) / 4f64.powi(16);
        assert!((failure_bound(2, 0.5, 18) - exact).abs() < 1e-15);
        assert!((failure_bound(2, 0.5, 18) - 0.0902034).abs() < 1e-6);
        assert_eq!(failure_bound(3, 0.2, 0), 64.0);
        assert_eq!(failure_bound(0, 0.0, 1), 0.5);
    }

    #[test]
    fn key_bits_examples() {
        assert_eq!(key_bits(10, 0.5, &[64]).key_bits, 6);
        assert_eq!(key_bits(10, 0.5, &[1, 1, 1]).key_bits, 0);
        assert_eq!(index_bits(48), 6);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(6400), 13);
    }

    #[test]
    fn rates_are_monotone() {
        let grid = |hi: f64| (0..).map(|i| i as f64 * 1e-3).take_while(move |&p| p <= hi);
        let mut prev = [f64::INFINITY; 3];
        for p in grid(0.25) {
            let vals = [
                list_rate(p, ListLength::Infinite).unwrap().value,
                list_rate(p, ListLength::Finite(3)).unwrap().value,
                gv_rate(p).unwrap().value,
            ];
            for (v, pv) in vals.iter().zip(prev.iter()) {
                assert!(v <= pv);
            }
            prev = vals;
        }
        for p in grid(0.5) {
            let mut last = f64::NEG_INFINITY;
            for l in 1..20 {
                let v = list_rate(p, ListLength::Finite(l)).unwrap().raw;
                assert!(v >= last);
                last = v;
            }
            assert!(last <= list_rate(p, ListLength::Infinite).unwrap().raw);
        }
    }
}
