//! Dense statevector simulation of superposed Pauli attacks.
//!
//! Basis index bit `j` is qubit `j`. A Pauli `i^t X^u Z^v` maps `|b>` to
//! `i^t (-1)^{v.b} |b xor u>`, so every operator here acts by a permutation
//! with phases and nothing of size `4^n` is ever built.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::listcode::ListTable;
use crate::pauli::PauliOp;
use crate::protocol::{decode, DecodeStatus, KeyedCode};
use crate::stabilizer::{StabilizerCode, Syndrome};

/// Default qubit limit for statevectors built from codes.
pub const MAX_QUBITS: usize = 12;
/// Limit reachable through [`Encoder::with_limit`], with a warning.
pub const EXTENDED_MAX_QUBITS: usize = 14;
/// Tolerance for completeness and stabilizer checks.
pub const TOLERANCE: f64 = 1e-9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const PHASES: [Complex64; 4] = [
    Complex64 { re: 1.0, im: 0.0 },
    Complex64 { re: 0.0, im: 1.0 },
    Complex64 { re: -1.0, im: 0.0 },
    Complex64 { re: 0.0, im: -1.0 },
];

#[derive(Clone, Debug, PartialEq)]
pub struct StateVec {
    n: usize,
    amps: Vec<Complex64>,
}

fn masks(p: &PauliOp) -> (usize, usize) {
    (p.x().to_u64() as usize, p.z().to_u64() as usize)
}

impl StateVec {
    pub fn basis(n: usize, index: usize) -> Self {
        assert!(n <= EXTENDED_MAX_QUBITS, "statevector of {n} qubits");
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = PHASES[0];
        Self { n, amps }
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    /// A normalized state with independent uniform components in
    /// `[-1, 1] + i[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let amps = (0..1 << n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut s = Self { n, amps };
        s.normalize().expect("random state is nonzero");
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm < 1e-12 {
            return Err(Error::ZeroProbability);
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVec) -> Complex64 {
        assert_eq!(self.n, other.n, "qubit counts differ");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_pauli(&self, p: &PauliOp) -> StateVec {
        assert_eq!(
            p.num_qubits(),
            self.n,
            "Pauli acts on the wrong qubit count"
        );
        let (u, v) = masks(p);
        let phase = PHASES[p.phase() as usize];
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let sign = if (v & b).count_ones() & 1 == 1 {
                -phase
            } else {
                phase
            };
            out[b ^ u] = sign * a;
        }
        StateVec {
            n: self.n,
            amps: out,
        }
    }

    fn add_scaled(&mut self, c: Complex64, other: &StateVec) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    fn scale(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// `(I + s g) / 2` applied to the state, `s = +1` when `minus` is false.
    pub fn project(&self, g: &PauliOp, minus: bool) -> StateVec {
        let mut out = self.clone();
        let c = if minus { -0.5 } else { 0.5 };
        out.scale(Complex64::new(0.5, 0.0));
        out.add_scaled(Complex64::new(c, 0.0), &self.apply_pauli(g));
        out
    }

    /// Real part of `<psi|g|psi>`.
    pub fn expectation(&self, g: &PauliOp) -> f64 {
        self.inner(&self.apply_pauli(g)).re
    }
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &StateVec, b: &StateVec) -> f64 {
    a.inner(b).norm_sqr()
}

/// One Kraus operator as a complex combination of Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausOp {
    pub terms: Vec<(Complex64, PauliOp)>,
}

impl KrausOp {
    pub fn apply(&self, state: &StateVec) -> StateVec {
        let mut out = StateVec {
            n: state.n,
            amps: vec![ZERO; state.amps.len()],
        };
        for (c, p) in &self.terms {
            out.add_scaled(*c, &state.apply_pauli(p));
        }
        out
    }

    pub fn max_weight(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, p)| p.weight())
            .max()
            .unwrap_or(0)
    }
}

/// A complete set of Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet {
    n: usize,
    ops: Vec<KrausOp>,
}

impl KrausSet {
    /// Rejects sets whose `sum_i A_i^dag A_i` differs from the identity by
    /// more than [`TOLERANCE`] in any Pauli coefficient.
    pub fn new(n: usize, ops: Vec<KrausOp>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Incomplete(1.0));
        }
        for (_, p) in ops.iter().flat_map(|op| &op.terms) {
            if p.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.num_qubits(),
                });
            }
        }
        let set = Self { n, ops };
        let dev = set.completeness_deviation();
        if dev > TOLERANCE {
            return Err(Error::Incomplete(dev));
        }
        Ok(set)
    }

    /// A single Pauli applied with certainty.
    pub fn single(p: PauliOp) -> Self {
        let n = p.num_qubits();
        Self::new(
            n,
            vec![KrausOp {
                terms: vec![(PHASES[0], p)],
            }],
        )
        .expect("a Pauli is unitary")
    }

    /// Largest Pauli-basis coefficient of `sum_i A_i^dag A_i - I`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut acc: HashMap<BitVec, Complex64> = HashMap::new();
        for op in &self.ops {
            for (a, p) in &op.terms {
                let pd = p.dagger();
                for (b, q) in &op.terms {
                    let prod = pd.mul(q);
                    let c = a.conj() * b * PHASES[prod.phase() as usize];
                    *acc.entry(prod.to_symplectic()).or_insert(ZERO) += c;
                }
            }
        }
        let id = BitVec::zeros(2 * self.n);
        let id_dev = (acc.get(&id).copied().unwrap_or(ZERO) - PHASES[0]).norm();
        acc.iter()
            .filter(|(k, _)| **k != id)
            .map(|(_, c)| c.norm())
            .fold(id_dev, f64::max)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[KrausOp] {
        &self.ops
    }

    pub fn max_weight(&self) -> usize {
        self.ops.iter().map(KrausOp::max_weight).max().unwrap_or(0)
    }

    /// Parses lines `re im pauli`; a blank line ends an operator and `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::new();
        let mut current = Vec::new();
        let mut n = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                if raw.trim().is_empty() && !current.is_empty() {
                    ops.push(KrausOp {
                        terms: std::mem::take(&mut current),
                    });
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [re, im, pauli] = fields[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected 're im pauli'",
                    lineno + 1
                )));
            };
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {s}", lineno + 1)))
            };
            let p: PauliOp = pauli.parse()?;
            n.get_or_insert(p.num_qubits());
            current.push((Complex64::new(num(re)?, num(im)?), p));
        }
        if !current.is_empty() {
            ops.push(KrausOp { terms: current });
        }
        let n = n.ok_or_else(|| Error::Parse("no Kraus operators".into()))?;
        Self::new(n, ops)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for (c, p) in &op.terms {
                let _ = writeln!(out, "{} {} {}", c.re, c.im, p);
            }
        }
        out
    }
}

/// Samples a Kraus branch with probability `||A_i psi||^2` and returns the
/// normalized branch state with its index.
pub fn apply_kraus<R: Rng + ?Sized>(
    state: &StateVec,
    ks: &KrausSet,
    rng: &mut R,
) -> Result<(StateVec, usize)> {
    if ks.n != state.n {
        return Err(Error::DimensionMismatch {
            expected: state.n,
            found: ks.n,
        });
    }
    let branches: Vec<StateVec> = ks.ops.iter().map(|op| op.apply(state)).collect();
    let weights: Vec<f64> = branches.iter().map(StateVec::norm_sqr).collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut pick = weights.len() - 1;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            pick = i;
            break;
        }
        u -= w;
    }
    let mut out = branches.into_iter().nth(pick).expect("index in range");
    out.normalize()?;
    Ok((out, pick))
}

/// Encoding isometry of a stabilizer code onto its `+1` eigenspace, with
/// the logical basis `|j> -> prod X̄^{j} |0̄>`.
#[derive(Clone, Debug)]
pub struct Encoder {
    code: StabilizerCode,
    basis: Vec<StateVec>,
}

impl Encoder {
    pub fn new(code: &StabilizerCode) -> Result<Self> {
        Self::with_limit(code, MAX_QUBITS)
    }

    /// Allows up to [`EXTENDED_MAX_QUBITS`]; above [`MAX_QUBITS`] a warning is
    /// printed to stderr.
    pub fn with_limit(code: &StabilizerCode, limit: usize) -> Result<Self> {
        let n = code.num_qubits();
        let limit = limit.min(EXTENDED_MAX_QUBITS);
        if n > limit {
            return Err(Error::CapExceeded {
                what: "statevector qubits",
                required: n as u128,
                cap: limit as u128,
            });
        }
        if n > MAX_QUBITS {
            eprintln!(
                "warning: {n}-qubit statevectors use {} MiB each",
                (16usize << n) >> 20
            );
        }
        if let Some(g) = code.generators().iter().find(|g| !g.is_hermitian()) {
            return Err(Error::Domain(format!("generator {g} is not Hermitian")));
        }
        let logicals = code.logical_basis();
        let mut zero = None;
        for seed in 0..1usize << n {
            let mut s = StateVec::basis(n, seed);
            for g in code.generators() {
                s = s.project(g, false);
            }
            for pair in logicals {
                s = s.project(&pair.z, false);
            }
            if s.norm_sqr() > 1e-6 {
                s.normalize()?;
                zero = Some(s);
                break;
            }
        }
        let zero = zero.expect("the code space meets some basis state");
        let k = code.num_logical();
        let basis = (0..1usize << k)
            .map(|j| {
                let mut s = zero.clone();
                for (q, pair) in logicals.iter().enumerate() {
                    if j >> q & 1 == 1 {
                        s = s.apply_pauli(&pair.x);
                    }
                }
                s
            })
            .collect();
        Ok(Self {
            code: code.clone(),
            basis,
        })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    /// Encoded basis state `|j̄>`.
    pub fn basis_state(&self, j: usize) -> &StateVec {
        &self.basis[j]
    }

    pub fn encode(&self, logical: &StateVec) -> Result<StateVec> {
        let k = self.code.num_logical();
        if logical.n != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: logical.n,
            });
        }
        let mut out = StateVec {
            n: self.code.num_qubits(),
            amps: vec![ZERO; 1 << self.code.num_qubits()],
        };
        for (a, b) in logical.amps.iter().zip(&self.basis) {
            out.add_scaled(*a, b);
        }
        Ok(out)
    }

    /// Logical amplitudes `<j̄|state>`; the norm is the weight of the state
    /// inside the code space.
    pub fn unencode(&self, state: &StateVec) -> StateVec {
        let amps = self.basis.iter().map(|b| b.inner(state)).collect();
        StateVec {
            n: self.code.num_logical(),
            amps,
        }
    }
}

/// Convenience wrapper building an [`Encoder`] for one state.
pub fn encode(code: &StabilizerCode, logical: &StateVec) -> Result<StateVec> {
    Encoder::new(code)?.encode(logical)
}

/// Measures every augmented generator in order (base generators, then the
/// secret ones). Bit 1 is the `-1` outcome.
pub fn measure_syndrome<R: Rng + ?Sized>(
    state: &StateVec,
    kc: &KeyedCode,
    rng: &mut R,
) -> Result<(Syndrome, BitVec, StateVec)> {
    let gens = kc.augmented().generators();
    let public_len = kc.base().generators().len();
    let mut bits = BitVec::zeros(gens.len());
    let mut s = state.clone();
    for (i, g) in gens.iter().enumerate() {
        let plus = s.project(g, false);
        let p_plus = plus.norm_sqr() / s.norm_sqr();
        let minus_outcome = rng.random::<f64>() >= p_plus;
        let mut next = if minus_outcome {
            s.project(g, true)
        } else {
            plus
        };
        next.normalize()?;
        bits.set(i, minus_outcome);
        s = next;
    }
    Ok((
        Syndrome(bits.slice(0, public_len)),
        bits.slice(public_len, gens.len()),
        s,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndToEnd {
    pub fidelity: f64,
    pub branch: usize,
    pub syndrome_public: Syndrome,
    pub syndrome_secret: BitVec,
    pub status: DecodeStatus,
}

/// Encode, attack, measure, correct, unencode, compare. The encoder must
/// belong to `kc.augmented()`.
pub fn end_to_end_with<R: Rng + ?Sized>(
    kc: &KeyedCode,
    table: &ListTable,
    encoder: &Encoder,
    ks: &KrausSet,
    logical: &StateVec,
    rng: &mut R,
) -> Result<EndToEnd> {
    if encoder.code() != kc.augmented() {
        return Err(Error::Domain("encoder belongs to a different code".into()));
    }
    let encoded = encoder.encode(logical)?;
    let (hit, branch) = apply_kraus(&encoded, ks, rng)?;
    let (public, secret, post) = measure_syndrome(&hit, kc, rng)?;
    let decoded = decode(kc, table, &public, &secret)?;
    let corrected = match decoded.correction() {
        Some(c) => post.apply_pauli(c),
        None => post,
    };
    let out = encoder.unencode(&corrected);
    Ok(EndToEnd {
        fidelity: fidelity(logical, &out),
        branch,
        syndrome_public: public,
        syndrome_secret: secret,
        status: decoded.status(),
    })
}

pub fn end_to_end<R: Rng + ?Sized>(
    kc: &KeyedCode,
    table: &ListTable,
    ks: &KrausSet,
    logical: &StateVec,
    rng: &mut R,
) -> Result<EndToEnd> {
    let encoder = Encoder::new(kc.augmented())?;
    end_to_end_with(kc, table, &encoder, ks, logical, rng)
}

/// Fidelity averaged exactly over Kraus branches and syndrome outcomes.
pub fn expected_fidelity(
    kc: &KeyedCode,
    table: &ListTable,
    encoder: &Encoder,
    ks: &KrausSet,
    logical: &StateVec,
) -> Result<f64> {
    let encoded = encoder.encode(logical)?;
    let gens = kc.augmented().generators();
    let public_len = kc.base().generators().len();
    let mut total = 0.0;
    for op in &ks.ops {
        let branch = op.apply(&encoded);
        // Depth-first over measurement outcomes; states stay unnormalized so
        // their squared norm is the path probability.
        let mut stack = vec![(branch, BitVec::zeros(gens.len()), 0usize)];
        while let Some((s, bits, i)) = stack.pop() {
            let w = s.norm_sqr();
            if w < 1e-15 {
                continue;
            }
            if i == gens.len() {
                let public = Syndrome(bits.slice(0, public_len));
                let secret = bits.slice(public_len, gens.len());
                let decoded = decode(kc, table, &public, &secret)?;
                let mut post = s;
                post.normalize()?;
                if let Some(c) = decoded.correction() {
                    post = post.apply_pauli(c);
                }
                total += w * fidelity(logical, &encoder.unencode(&post));
                continue;
            }
            let mut flipped = bits.clone();
            flipped.set(i, true);
            stack.push((s.project(&gens[i], true), flipped, i + 1));
            stack.push((s.project(&gens[i], false), bits, i + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::listcode::build_table;
    use crate::pauli::enumerate_errors;
    use crate::protocol::{augment, full_syndrome, run_trial, KeySchedule};
    use crate::stabilizer::{five_qubit_code, four_qubit_detection_code};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    // Dense matrix of a Pauli from its letters, qubit j acting on bit j.
    #[allow(clippy::needless_range_loop)]
    fn dense(p: &PauliOp) -> Vec<Vec<Complex64>> {
        let n = p.num_qubits();
        let dim = 1 << n;
        let mut m = vec![vec![ZERO; dim]; dim];
        for b in 0..dim {
            let mut amp = PHASES[p.letter_phase() as usize];
            let mut out = b;
            for q in 0..n {
                let bit = b >> q & 1;
                match p.letter(q) {
                    crate::pauli::Letter::I => {}
                    crate::pauli::Letter::X => out ^= 1 << q,
                    crate::pauli::Letter::Z => {
                        if bit == 1 {
                            amp = -amp;
                        }
                    }
                    crate::pauli::Letter::Y => {
                        out ^= 1 << q;
                        amp *= if bit == 0 { PHASES[1] } else { PHASES[3] };
                    }
                }
            }
            m[out][b] = amp;
        }
        m
    }

    #[test]
    fn pauli_action_matches_dense_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in ["XIZ", "YYI", "-iZXY", "iIIY", "-XYZ"] {
            let op = p(s);
            let psi = StateVec::random(3, &mut rng);
            let m = dense(&op);
            let got = psi.apply_pauli(&op);
            for (r, row) in m.iter().enumerate() {
                let want: Complex64 = row.iter().zip(psi.amplitudes()).map(|(a, b)| a * b).sum();
                assert!((want - got.amplitudes()[r]).norm() < 1e-12, "{s}");
            }
        }
    }

    #[test]
    fn five_qubit_encoding() {
        let code = five_qubit_code();
        let enc = Encoder::new(&code).unwrap();
        let zero = enc.encode(&StateVec::zero(1)).unwrap();
        for g in code.generators() {
            assert!((zero.expectation(g) - 1.0).abs() < TOLERANCE);
        }
        let zbar = &code.logical_basis()[0].z;
        assert!((zero.expectation(zbar) - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn trivial_code_encoding_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let enc = Encoder::new(&StabilizerCode::trivial(3)).unwrap();
        let psi = StateVec::random(3, &mut rng);
        let e = enc.encode(&psi).unwrap();
        assert!((fidelity(&psi, &e) - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn encoding_is_an_isometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let enc = Encoder::new(&four_qubit_detection_code()).unwrap();
        for _ in 0..20 {
            let a = StateVec::random(2, &mut rng);
            let b = StateVec::random(2, &mut rng);
            let ea = enc.encode(&a).unwrap();
            let eb = enc.encode(&b).unwrap();
            assert!((a.inner(&b) - ea.inner(&eb)).norm() < TOLERANCE);
            assert!((fidelity(&a, &enc.unencode(&ea)) - 1.0).abs() < TOLERANCE);
        }
    }

    #[test]
    fn kraus_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = StateVec::random(3, &mut rng);
        let id = KrausSet::single(PauliOp::identity(3));
        let same = |a: &StateVec, b: &StateVec| (a.inner(b) - c(1.0)).norm() < 1e-12;
        assert!(same(&apply_kraus(&psi, &id, &mut rng).unwrap().0, &psi));
        let x = KrausSet::single(p("XII"));
        assert!(same(
            &apply_kraus(&psi, &x, &mut rng).unwrap().0,
            &psi.apply_pauli(&p("XII"))
        ));

        let half = (0.5f64).sqrt();
        let bad = KrausSet::new(
            2,
            vec![KrausOp {
                terms: vec![(c(half), p("XI")), (c(half), p("IX"))],
            }],
        );
        assert!(matches!(bad, Err(Error::Incomplete(_))));
    }

    #[test]
    fn kraus_branch_frequencies_follow_born_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ks = KrausSet::parse("0.5 0 XI\n0.5 0 IX\n\n0.5 0 XI\n-0.5 0 IX\n").unwrap();
        let psi = StateVec::random(2, &mut rng);
        let w0 = ks.ops()[0].apply(&psi).norm_sqr();
        let samples = 10_000;
        let hits = (0..samples)
            .filter(|_| apply_kraus(&psi, &ks, &mut rng).unwrap().1 == 0)
            .count() as f64;
        let sigma = (w0 * (1.0 - w0) / samples as f64).sqrt();
        assert!((hits / samples as f64 - w0).abs() <= 3.0 * sigma + 1e-12);
    }

    #[test]
    fn kraus_text_round_trip() {
        let text = "# two branches\n0.5 0 XI\n0 0.5 IX   # note\n\n0.5 0 XI\n0 -0.5 IX\n";
        let ks = KrausSet::parse(text).unwrap();
        assert_eq!(ks.ops().len(), 2);
        assert_eq!(KrausSet::parse(&ks.to_text()).unwrap(), ks);
        assert!(KrausSet::parse("1 0\n").is_err());
    }

    #[test]
    fn syndrome_measurement_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let base = four_qubit_detection_code();
        let schedule = KeySchedule::new(2, 1, 0.5).unwrap();
        let kc = schedule.augment(&base, &BitVec::from_u64(4, 5)).unwrap();
        let enc = Encoder::new(kc.augmented()).unwrap();
        let psi = enc.encode(&StateVec::random(1, &mut rng)).unwrap();
        let (s, b, post) = measure_syndrome(&psi, &kc, &mut rng).unwrap();
        assert!(s.is_trivial() && b.is_zero());
        assert!((fidelity(&psi, &post) - 1.0).abs() < TOLERANCE);
        for e in enumerate_errors(4, 2).unwrap().iter() {
            let hit = psi.apply_pauli(e);
            let (s, b, _) = measure_syndrome(&hit, &kc, &mut rng).unwrap();
            assert_eq!((s, b), full_syndrome(&kc, e).unwrap(), "{e}");
        }
    }

    #[test]
    fn superposed_errors_collapse() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let code = five_qubit_code();
        let kc = augment(&code, 0, &BitVec::zeros(0), 0.5).unwrap();
        let enc = Encoder::new(&code).unwrap();
        let psi = enc.encode(&StateVec::random(1, &mut rng)).unwrap();
        let (e1, e2) = (p("XIIII"), p("IXIII"));
        let mut sup = psi.apply_pauli(&e1);
        sup.add_scaled(c(1.0), &psi.apply_pauli(&e2));
        sup.normalize().unwrap();
        let s1 = code.syndrome(&e1).unwrap();
        let samples = 4000;
        let mut first = 0;
        for _ in 0..samples {
            let (s, _, post) = measure_syndrome(&sup, &kc, &mut rng).unwrap();
            let expected = if s == s1 {
                psi.apply_pauli(&e1)
            } else {
                psi.apply_pauli(&e2)
            };
            assert!((fidelity(&expected, &post) - 1.0).abs() < TOLERANCE);
            first += usize::from(s == s1);
        }
        let sigma = (0.25 / samples as f64).sqrt();
        assert!((first as f64 / samples as f64 - 0.5).abs() <= 3.0 * sigma);
    }

    #[test]
    fn pauli_and_coherent_outcomes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (code, kx) in [(five_qubit_code(), 0), (four_qubit_detection_code(), 1)] {
            let table = build_table(&code, 1).unwrap();
            let schedule = KeySchedule::new(code.num_logical(), kx, 0.5).unwrap();
            for key in 0..1u64 << schedule.key_len() {
                let kc = schedule
                    .augment(&code, &BitVec::from_u64(schedule.key_len(), key))
                    .unwrap();
                let enc = Encoder::new(kc.augmented()).unwrap();
                for e in enumerate_errors(code.num_qubits(), 1).unwrap().iter() {
                    let pauli = run_trial(&kc, &table, e).unwrap();
                    let logical = StateVec::random(kc.payload_qubits(), &mut rng);
                    let coh = end_to_end_with(
                        &kc,
                        &table,
                        &enc,
                        &KrausSet::single(e.clone()),
                        &logical,
                        &mut rng,
                    )
                    .unwrap();
                    assert_eq!(coh.status, pauli.status);
                    assert_eq!(
                        (coh.fidelity - 1.0).abs() < TOLERANCE,
                        pauli.correction_restores
                    );
                }
            }
        }
    }

    #[test]
    fn expected_fidelity_matches_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let code = four_qubit_detection_code();
        let table = build_table(&code, 1).unwrap();
        let kc = augment(&code, 0, &BitVec::zeros(0), 0.5).unwrap();
        let enc = Encoder::new(&code).unwrap();
        let ks = KrausSet::parse("0.5 0 XIII\n0.5 0 IXII\n\n0.5 0 XIII\n-0.5 0 IXII\n").unwrap();
        let logical = StateVec::random(2, &mut rng);
        let exact = expected_fidelity(&kc, &table, &enc, &ks, &logical).unwrap();
        let samples = 2000;
        let fids: Vec<f64> = (0..samples)
            .map(|_| {
                end_to_end_with(&kc, &table, &enc, &ks, &logical, &mut rng)
                    .unwrap()
                    .fidelity
            })
            .collect();
        let mean = fids.iter().sum::<f64>() / samples as f64;
        let var = fids.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / samples as f64;
        assert!((mean - exact).abs() <= 3.0 * (var / samples as f64).sqrt() + 1e-9);
        assert!(exact < 1.0);
    }

    #[test]
    fn size_cap() {
        let big = StabilizerCode::trivial(13);
        assert!(matches!(Encoder::new(&big), Err(Error::CapExceeded { .. })));
    }
}
