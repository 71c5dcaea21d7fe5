//! Small-bias sets over `{0,1}^m`.
//!
//! The main construction is the powering set: for `x, y` in GF(2^ell) the
//! element indexed by `(x, y)` has bit `i` equal to `<x^i, y>`, the parity of
//! the bitwise AND of the field elements. Two distinct polynomials of degree
//! below `m` agree on at most `m - 1` points, which gives bias at most
//! `(m - 1) / 2^ell` with `4^ell` elements.

use std::fmt::Write as _;

use rand::Rng;

use crate::bounds::index_bits;
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// Largest `m` for exhaustive bias measurement.
pub const MAX_EXHAUSTIVE_M: usize = 24;
/// Largest field degree with a tabulated polynomial.
pub const MAX_ELL: usize = 16;
/// Largest `m` for the full-space set.
pub const MAX_FULL_SPACE_M: usize = 24;

pub const SET_SCHEMA: &str = "# biased-set v1";

/// Irreducible polynomials for GF(2^ell), bit `i` is the coefficient of
/// `x^i`, leading term included.
const IRREDUCIBLE: [u32; MAX_ELL + 1] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x211, 0x409, 0x805, 0x1009, 0x201B, 0x4021,
    0x8003, 0x1002B,
];

pub fn irreducible_poly(ell: usize) -> Option<u32> {
    (1..=MAX_ELL).contains(&ell).then(|| IRREDUCIBLE[ell])
}

/// Multiplication in GF(2^ell) modulo `poly`.
pub fn gf_mul(mut a: u32, mut b: u32, ell: usize, poly: u32) -> u32 {
    let top = 1u32 << ell;
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= poly;
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Powering set over GF(2^ell).
    Powering { ell: usize, poly: u32 },
    /// All `2^m` vectors in counting order.
    FullSpace,
    /// An explicit element list.
    Explicit(Vec<BitVec>),
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::Powering { .. } => "powering",
            Construction::FullSpace => "full",
            Construction::Explicit(_) => "explicit",
        }
    }
}

/// An ordered multiset of `m`-bit vectors with a certified bias bound.
/// Structured constructions compute elements on demand from their index.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedSet {
    m: usize,
    construction: Construction,
    bias_bound: f64,
    bias_exact: Option<f64>,
}

/// Powering set of length `m` over GF(2^ell). Length 1 routes to the full
/// space.
pub fn aghp(m: usize, ell: usize) -> Result<BiasedSet> {
    if m == 0 {
        return Err(Error::Domain("biased set length must be positive".into()));
    }
    if m == 1 {
        return full_space(1);
    }
    let poly = irreducible_poly(ell)
        .ok_or_else(|| Error::Domain(format!("ell={ell} outside 1..={MAX_ELL}")))?;
    if m > 1 << ell {
        return Err(Error::Domain(format!(
            "m={m} exceeds 2^ell={}",
            1u64 << ell
        )));
    }
    Ok(BiasedSet {
        m,
        construction: Construction::Powering { ell, poly },
        bias_bound: (m - 1) as f64 / (1u64 << ell) as f64,
        bias_exact: None,
    })
}

/// All of `{0,1}^m`, bias exactly zero.
pub fn full_space(m: usize) -> Result<BiasedSet> {
    if m == 0 || m > MAX_FULL_SPACE_M {
        return Err(Error::Domain(format!(
            "full space needs 1 <= m <= {MAX_FULL_SPACE_M}, got {m}"
        )));
    }
    Ok(BiasedSet {
        m,
        construction: Construction::FullSpace,
        bias_bound: 0.0,
        bias_exact: Some(0.0),
    })
}

/// Smallest `ell` with `(m - 1) / 2^ell <= eta`.
pub fn ell_for(m: usize, eta: f64) -> Result<usize> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!("eta={eta} outside (0, 1]")));
    }
    (1..=MAX_ELL)
        .find(|&ell| m <= 1 << ell && (m - 1) as f64 / (1u64 << ell) as f64 <= eta)
        .ok_or_else(|| Error::Domain(format!("no tabulated field reaches bias {eta} at m={m}")))
}

/// Powering set at the smallest sufficient `ell`, or the full space when it
/// is no larger.
pub fn for_target(m: usize, eta: f64) -> Result<BiasedSet> {
    let ell = ell_for(m, eta)?;
    if m <= 2 * ell {
        full_space(m)
    } else {
        aghp(m, ell)
    }
}

impl BiasedSet {
    /// Wraps an explicit element list; the bias is measured exhaustively.
    pub fn from_elements(m: usize, elements: Vec<BitVec>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Domain("empty biased set".into()));
        }
        if let Some(e) = elements.iter().find(|e| e.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: e.len(),
            });
        }
        let mut set = Self {
            m,
            construction: Construction::Explicit(elements),
            bias_bound: 1.0,
            bias_exact: None,
        };
        let bias = measure_bias(&set)?;
        set.bias_bound = bias;
        set.bias_exact = Some(bias);
        Ok(set)
    }

    pub fn len_bits(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> usize {
        match &self.construction {
            Construction::Powering { ell, .. } => 1 << (2 * ell),
            Construction::FullSpace => 1 << self.m,
            Construction::Explicit(v) => v.len(),
        }
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    pub fn bias_bound(&self) -> f64 {
        self.bias_bound
    }

    pub fn bias_exact(&self) -> Option<f64> {
        self.bias_exact
    }

    /// Measures the bias exhaustively and records it.
    pub fn certify(&mut self) -> Result<f64> {
        let b = measure_bias(self)?;
        self.bias_exact = Some(b);
        Ok(b)
    }

    /// Element `index` in construction order.
    pub fn element(&self, index: usize) -> BitVec {
        assert!(index < self.size(), "index {index} out of range");
        match &self.construction {
            Construction::Powering { ell, poly } => {
                let x = (index >> ell) as u32;
                let y = (index & ((1 << ell) - 1)) as u32;
                let mut v = BitVec::zeros(self.m);
                let mut pow = 1u32;
                for i in 0..self.m {
                    if (pow & y).count_ones() & 1 == 1 {
                        v.set(i, true);
                    }
                    pow = gf_mul(pow, x, *ell, *poly);
                }
                v
            }
            Construction::FullSpace => BitVec::from_u64(self.m, index as u64),
            Construction::Explicit(v) => v[index].clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = BitVec> + '_ {
        (0..self.size()).map(|i| self.element(i))
    }

    /// Key length consumed by [`BiasedSet::draw`].
    pub fn key_bits(&self) -> usize {
        index_bits(self.size())
    }

    /// Element selected by a key read as a little-endian integer, reduced
    /// modulo the set size.
    pub fn draw(&self, key: &BitVec) -> Result<BitVec> {
        if key.len() != self.key_bits() {
            return Err(Error::DimensionMismatch {
                expected: self.key_bits(),
                found: key.len(),
            });
        }
        Ok(self.element(key.to_u64() as usize % self.size()))
    }

    /// Bias bound of the distribution induced by [`BiasedSet::draw`] on
    /// uniform keys. With `2^b = q |A| + r`, the first `r` elements carry one
    /// extra key each, so the bias is at most `q |A| eta / 2^b + r / 2^b`.
    pub fn effective_bias(&self) -> f64 {
        let keys = 1u128 << self.key_bits();
        let size = self.size() as u128;
        let (q, r) = (keys / size, keys % size);
        let eta = self.bias_exact.unwrap_or(self.bias_bound);
        (q * size) as f64 / keys as f64 * eta + r as f64 / keys as f64
    }

    /// Number of all-zero elements.
    pub fn zero_count(&self) -> usize {
        match &self.construction {
            // Element (x, y) is zero iff y is orthogonal to 1, x, ..., x^{m-1};
            // there are 2^{ell - rank} such y.
            Construction::Powering { ell, poly } => (0..1u32 << ell)
                .map(|x| {
                    let mut span = crate::gf2::SpanBasis::new();
                    let mut pow = 1u32;
                    for _ in 0..self.m {
                        span.insert(&BitVec::from_u64(*ell, pow as u64));
                        pow = gf_mul(pow, x, *ell, *poly);
                    }
                    1usize << (ell - span.dim())
                })
                .sum(),
            Construction::FullSpace => 1,
            Construction::Explicit(v) => v.iter().filter(|e| e.is_zero()).count(),
        }
    }

    /// Serializes as a header plus one hex row per element.
    pub fn export(&self) -> String {
        let (ell, poly) = match self.construction {
            Construction::Powering { ell, poly } => (ell, poly),
            _ => (0, 0),
        };
        let mut out = String::new();
        let _ = writeln!(out, "{SET_SCHEMA}");
        let _ = write!(
            out,
            "m={} ell={} poly={:#x} bias_bound={} construction={} size={}",
            self.m,
            ell,
            poly,
            self.bias_bound,
            self.construction.name(),
            self.size()
        );
        if let Some(b) = self.bias_exact {
            let _ = write!(out, " bias_exact={b}");
        }
        out.push('\n');
        for e in self.iter() {
            let _ = writeln!(out, "{}", e.to_hex());
        }
        out
    }

    /// Parses [`BiasedSet::export`] output. Structured constructions are
    /// rebuilt and checked row by row against the file.
    pub fn import(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(SET_SCHEMA) {
            return Err(Error::Parse(format!("expected '{SET_SCHEMA}' header")));
        }
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing parameter line".into()))?;
        let field = |key: &str| -> Result<&str> {
            header
                .split_whitespace()
                .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
                .ok_or_else(|| Error::Parse(format!("missing field {key}")))
        };
        let num = |key: &str| -> Result<usize> {
            field(key)?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {key}")))
        };
        let float = |key: &str| -> Result<f64> {
            field(key)?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {key}")))
        };
        let m = num("m")?;
        let rows = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| BitVec::from_hex(m, l.trim()))
            .collect::<Result<Vec<_>>>()?;
        let mut set = match field("construction")? {
            "powering" => aghp(m, num("ell")?)?,
            "full" => full_space(m)?,
            "explicit" => Self::from_elements(m, rows.clone())?,
            other => return Err(Error::Parse(format!("unknown construction {other}"))),
        };
        if set.size() != rows.len() || set.iter().zip(&rows).any(|(a, b)| &a != b) {
            return Err(Error::Parse(
                "rows do not match the stated construction".into(),
            ));
        }
        set.bias_bound = float("bias_bound")?;
        if let Ok(b) = float("bias_exact") {
            set.bias_exact = Some(b);
        }
        Ok(set)
    }
}

/// Max over nonzero `e` of `|W(e)| / total` for a histogram over
/// `{0,1}^m`, via the Walsh–Hadamard transform.
fn histogram_bias(mut counts: Vec<i64>, total: i64) -> f64 {
    let size = counts.len();
    let mut h = 1;
    while h < size {
        for block in (0..size).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (counts[i], counts[i + h]);
                counts[i] = a + b;
                counts[i + h] = a - b;
            }
        }
        h *= 2;
    }
    counts[1..]
        .iter()
        .map(|w| w.unsigned_abs())
        .max()
        .unwrap_or(0) as f64
        / total as f64
}

fn check_exhaustive(m: usize) -> Result<()> {
    if m > MAX_EXHAUSTIVE_M {
        return Err(Error::CapExceeded {
            what: "exhaustive bias measurement length",
            required: m as u128,
            cap: MAX_EXHAUSTIVE_M as u128,
        });
    }
    Ok(())
}

/// `max_{e != 0} |Pr(e.a = 0) - Pr(e.a = 1)|` over the set, exhaustively.
pub fn measure_bias(set: &BiasedSet) -> Result<f64> {
    check_exhaustive(set.m)?;
    let mut counts = vec![0i64; 1 << set.m];
    for a in set.iter() {
        counts[a.to_u64() as usize] += 1;
    }
    Ok(histogram_bias(counts, set.size() as i64))
}

/// Exhaustive bias of the distribution actually produced by
/// [`BiasedSet::draw`] over all `2^key_bits` keys.
pub fn measure_draw_bias(set: &BiasedSet) -> Result<f64> {
    check_exhaustive(set.m)?;
    let keys = 1u64 << set.key_bits();
    let mut counts = vec![0i64; 1 << set.m];
    for key in 0..keys {
        let a = set.element(key as usize % set.size());
        counts[a.to_u64() as usize] += 1;
    }
    Ok(histogram_bias(counts, keys as i64))
}

/// Largest bias seen over `samples` random nonzero functionals. A lower
/// bound on the true bias.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampledBias {
    pub max_observed: f64,
    pub functionals: usize,
}

pub fn sample_bias<R: Rng + ?Sized>(set: &BiasedSet, samples: usize, rng: &mut R) -> SampledBias {
    let elements: Vec<BitVec> = set.iter().collect();
    let mut max_observed: f64 = 0.0;
    for _ in 0..samples {
        let e = loop {
            let bools: Vec<bool> = (0..set.m).map(|_| rng.random()).collect();
            let e = BitVec::from_bools(&bools);
            if !e.is_zero() {
                break e;
            }
        };
        let odd = elements.iter().filter(|a| a.dot(&e)).count() as f64;
        let n = elements.len() as f64;
        max_observed = max_observed.max(((n - odd) - odd).abs() / n);
    }
    SampledBias {
        max_observed,
        functionals: samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // Trial division by every polynomial of degree 1..=deg/2.
    fn is_irreducible(poly: u32) -> bool {
        let deg = 31 - poly.leading_zeros();
        let rem = |mut a: u32, b: u32| {
            let db = 31 - b.leading_zeros();
            while a != 0 && 31 - a.leading_zeros() >= db {
                a ^= b << (31 - a.leading_zeros() - db);
            }
            a
        };
        (2u32..1 << (deg / 2 + 1)).all(|d| rem(poly, d) != 0)
    }

    // Direct double loop over functionals and elements.
    fn naive_bias(set: &BiasedSet) -> f64 {
        let elements: Vec<BitVec> = set.iter().collect();
        let n = elements.len() as f64;
        (1u64..1 << set.m)
            .map(|e| {
                let e = BitVec::from_u64(set.m, e);
                let odd = elements.iter().filter(|a| a.dot(&e)).count() as f64;
                ((n - odd) - odd).abs() / n
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn tabulated_polynomials_are_irreducible() {
        for ell in 1..=MAX_ELL {
            let p = irreducible_poly(ell).unwrap();
            assert_eq!(31 - p.leading_zeros(), ell as u32);
            assert!(is_irreducible(p), "ell={ell}");
        }
        assert!(!is_irreducible(0b101));
    }

    #[test]
    fn field_multiplication_has_inverses() {
        for ell in 1..=8 {
            let p = irreducible_poly(ell).unwrap();
            for a in 1..1u32 << ell {
                assert!((1..1u32 << ell).any(|b| gf_mul(a, b, ell, p) == 1));
            }
        }
    }

    #[test]
    fn powering_examples() {
        let s = aghp(4, 3).unwrap();
        assert_eq!(s.size(), 64);
        assert_eq!(s.bias_bound(), 3.0 / 8.0);
        let b = measure_bias(&s).unwrap();
        assert_eq!(b, naive_bias(&s));
        assert!(b <= 3.0 / 8.0);

        let s = aghp(8, 4).unwrap();
        assert!(measure_bias(&s).unwrap() <= 7.0 / 16.0);

        let s = aghp(1, 5).unwrap();
        assert_eq!(measure_bias(&s).unwrap(), 0.0);
        assert_eq!(s.bias_bound(), 0.0);

        assert!(aghp(9, 3).is_err());
        assert!(aghp(4, 0).is_err());
        assert!(aghp(4, 17).is_err());
    }

    #[test]
    fn measure_examples() {
        for m in 1..=12 {
            assert_eq!(measure_bias(&full_space(m).unwrap()).unwrap(), 0.0);
        }
        let single = BiasedSet::from_elements(5, vec![BitVec::zeros(5)]).unwrap();
        assert_eq!(single.bias_exact(), Some(1.0));
        assert!(measure_bias(&full_space(24).unwrap()).is_ok());
        let big = BiasedSet {
            m: 25,
            construction: Construction::FullSpace,
            bias_bound: 0.0,
            bias_exact: None,
        };
        assert!(matches!(measure_bias(&big), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn draw_examples() {
        let s = aghp(6, 3).unwrap();
        assert_eq!(s.key_bits(), 6);
        assert_eq!(s.draw(&BitVec::zeros(6)).unwrap(), s.element(0));
        let key = BitVec::from_u64(6, 41);
        assert_eq!(s.draw(&key).unwrap(), s.draw(&key).unwrap());
        assert!(s.draw(&BitVec::zeros(5)).is_err());
    }

    #[test]
    fn draws_are_uniform_over_indices() {
        // Chi-square over 64 cells, 63 degrees of freedom; the 0.999 quantile
        // is about 103.4.
        let s = full_space(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = [0u64; 64];
        let draws = 100_000;
        for _ in 0..draws {
            let key = BitVec::from_u64(6, rng.random_range(0..64));
            counts[s.draw(&key).unwrap().to_u64() as usize] += 1;
        }
        let expected = draws as f64 / 64.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 103.4, "chi2 = {chi2}");
    }

    #[test]
    fn wrap_accounting_covers_measured_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let elements: Vec<BitVec> = (0..48)
            .map(|_| BitVec::from_u64(6, rng.random_range(0..64)))
            .collect();
        let s = BiasedSet::from_elements(6, elements).unwrap();
        assert_eq!(s.key_bits(), 6);
        let measured = measure_draw_bias(&s).unwrap();
        assert!(s.effective_bias() >= measured - 1e-12);
        assert!(s.effective_bias() >= s.bias_exact().unwrap());
    }

    #[test]
    fn zero_count_matches_enumeration() {
        for (m, ell) in [(4, 3), (6, 3), (8, 4), (5, 4), (12, 4)] {
            let s = aghp(m, ell).unwrap();
            let direct = s.iter().filter(|e| e.is_zero()).count();
            assert_eq!(s.zero_count(), direct, "m={m} ell={ell}");
        }
    }

    #[test]
    fn target_selection() {
        assert_eq!(ell_for(40, 0.5).unwrap(), 7);
        assert_eq!(ell_for(33, 0.5).unwrap(), 6);
        let s = for_target(4, 0.5).unwrap();
        assert_eq!(s.construction(), &Construction::FullSpace);
        let s = for_target(40, 0.5).unwrap();
        assert_eq!(s.size(), 1 << 14);
        assert!(ell_for(4, 0.0).is_err());
    }

    #[test]
    fn export_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let explicit = BiasedSet::from_elements(
            7,
            (0..10)
                .map(|_| BitVec::from_u64(7, rng.random_range(0..128)))
                .collect(),
        )
        .unwrap();
        let mut certified = aghp(5, 3).unwrap();
        certified.certify().unwrap();
        for s in [
            aghp(6, 3).unwrap(),
            full_space(4).unwrap(),
            explicit,
            certified,
        ] {
            let text = s.export();
            let back = BiasedSet::import(&text).unwrap();
            assert_eq!(back, s);
            assert_eq!(back.export(), text);
        }
        let tampered = aghp(4, 3).unwrap().export().replacen("\n0\n", "\n1\n", 1);
        assert!(BiasedSet::import(&tampered).is_err());
    }
}
