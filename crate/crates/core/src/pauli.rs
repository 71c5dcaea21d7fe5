//! Phase-tracked Pauli operators in the normal form `i^t X^u Z^v`.
//!
//! `u` and `v` are bit vectors over the qubits and `t` lives in Z_4. The
//! single-qubit `Y` is stored as `t = 1, u = 1, v = 1` since `Y = iXZ`.
//!
//! Text form is an optional phase token (`+`, `i`, `-`, `-i`) followed by one
//! letter from `IXYZ` per qubit, e.g. `-iXIZY`. The token is the scalar in
//! front of the plain tensor product of letters, so `Y` parses to the normal
//! form above and prints back as `Y`.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// Largest error set [`enumerate_errors`] will materialize by default.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    /// The non-identity letters in canonical enumeration order.
    pub const NONTRIVIAL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator `i^phase X^x Z^z`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliOp {
    phase: u8,
    x: BitVec,
    z: BitVec,
}

impl PauliOp {
    pub fn identity(n: usize) -> Self {
        Self {
            phase: 0,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    /// Normal-form constructor; `phase` is reduced mod 4.
    pub fn new(phase: u8, x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self {
            phase: phase % 4,
            x,
            z,
        })
    }

    /// The Hermitian operator given by the plain tensor product of letters
    /// with the given X and Z supports.
    pub fn from_xz(x: BitVec, z: BitVec) -> Result<Self> {
        let mut p = Self::new(0, x, z)?;
        p.phase = p.y_count();
        Ok(p)
    }

    /// A single letter on qubit `q` of `n`.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(q, letter);
        p
    }

    /// Letter-form operator from a `2n`-bit symplectic vector `(x | z)`.
    pub fn from_symplectic(v: &BitVec) -> Self {
        assert!(
            v.len().is_multiple_of(2),
            "symplectic vector must have even length"
        );
        let n = v.len() / 2;
        Self::from_xz(v.slice(0, n), v.slice(n, 2 * n)).expect("halves have equal length")
    }

    /// Enumerates the Paulis modulo phase: bits `0..n` of `index` are the X
    /// part, bits `n..2n` the Z part.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(2 * n <= 64);
        Self::from_symplectic(&BitVec::from_u64(2 * n, index))
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    /// Exponent `t` of `i`.
    #[inline]
    pub fn phase(&self) -> u8 {
        self.phase
    }

    #[inline]
    pub fn x(&self) -> &BitVec {
        &self.x
    }

    #[inline]
    pub fn z(&self) -> &BitVec {
        &self.z
    }

    pub fn to_symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    /// Replaces the letter on qubit `q`, keeping the scalar in front of the
    /// letter product unchanged.
    pub fn set_letter(&mut self, q: usize, letter: Letter) {
        let old_y = self.letter(q) == Letter::Y;
        let (bx, bz) = letter.bits();
        self.x.set(q, bx);
        self.z.set(q, bz);
        let new_y = letter == Letter::Y;
        self.phase = (self.phase + 4 + new_y as u8 - old_y as u8) % 4;
    }

    fn y_count(&self) -> u8 {
        (self.x.and(&self.z).count_ones() % 4) as u8
    }

    /// Scalar in front of the letter product, as a power of `i`.
    pub fn letter_phase(&self) -> u8 {
        (self.phase + 4 - self.y_count()) % 4
    }

    /// The same letters with a `+` in front. Always Hermitian.
    pub fn letter_form(&self) -> Self {
        Self {
            phase: self.y_count(),
            x: self.x.clone(),
            z: self.z.clone(),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.letter_phase().is_multiple_of(2)
    }

    /// Number of qubits acted on nontrivially.
    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).iter_ones().collect()
    }

    pub fn is_identity_mod_phase(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Commutation bit `u1·v2 + u2·v1`. Panics on a qubit-count mismatch;
    /// see [`omega`] for the checked form.
    #[inline]
    pub fn omega(&self, other: &PauliOp) -> bool {
        assert_eq!(
            self.num_qubits(),
            other.num_qubits(),
            "qubit count mismatch"
        );
        self.x.dot(&other.z) ^ other.x.dot(&self.z)
    }

    pub fn commutes_with(&self, other: &PauliOp) -> bool {
        !self.omega(other)
    }

    /// Normal-form product `self · other`. Moving `Z^{v1}` past `X^{u2}`
    /// contributes `(-1)^{v1·u2}`.
    pub fn mul(&self, other: &PauliOp) -> PauliOp {
        assert_eq!(
            self.num_qubits(),
            other.num_qubits(),
            "qubit count mismatch"
        );
        let sign = if self.z.dot(&other.x) { 2 } else { 0 };
        PauliOp {
            phase: (self.phase + other.phase + sign) % 4,
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        }
    }

    pub fn checked_mul(&self, other: &PauliOp) -> Result<PauliOp> {
        check_same_n(self, other)?;
        Ok(self.mul(other))
    }

    /// Multiplies by the phase `i^t`.
    pub fn times_phase(&self, t: u8) -> PauliOp {
        let mut p = self.clone();
        p.phase = (p.phase + t) % 4;
        p
    }

    /// Adjoint: `(i^t X^u Z^v)† = i^{-t} (-1)^{u·v} X^u Z^v`.
    pub fn dagger(&self) -> PauliOp {
        let sign = if self.x.dot(&self.z) { 2 } else { 0 };
        PauliOp {
            phase: (4 - self.phase + sign) % 4,
            x: self.x.clone(),
            z: self.z.clone(),
        }
    }

    /// Equality up to an overall phase.
    pub fn eq_mod_phase(&self, other: &PauliOp) -> bool {
        self.x == other.x && self.z == other.z
    }
}

fn check_same_n(p: &PauliOp, q: &PauliOp) -> Result<()> {
    if p.num_qubits() != q.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: p.num_qubits(),
            found: q.num_qubits(),
        });
    }
    Ok(())
}

/// Checked commutation bit: `true` iff `p` and `q` anticommute.
pub fn omega(p: &PauliOp, q: &PauliOp) -> Result<bool> {
    check_same_n(p, q)?;
    Ok(p.omega(q))
}

impl Mul for &PauliOp {
    type Output = PauliOp;

    fn mul(self, rhs: &PauliOp) -> PauliOp {
        PauliOp::mul(self, rhs)
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let token = match self.letter_phase() {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(token)?;
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOp({self})")
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (token, rest) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                _ => Err(Error::Parse(format!("invalid Pauli letter {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliOp::from_letters(&letters).times_phase(token))
    }
}

/// GF(2) rank of the stacked `(x | z)` rows; phases are ignored.
pub fn symplectic_rank(ps: &[PauliOp]) -> usize {
    let Some(first) = ps.first() else {
        return 0;
    };
    let n = first.num_qubits();
    let rows = ps
        .iter()
        .map(|p| {
            assert_eq!(p.num_qubits(), n, "qubit count mismatch");
            p.to_symplectic()
        })
        .collect();
    BitMatrix::from_rows(2 * n, rows)
        .expect("rows share length")
        .rank()
}

/// `N_E = sum_{r=0}^{t} 3^r C(n, r)`, the number of Paulis of weight at most
/// `t` modulo phase. Saturates at `u128::MAX`.
pub fn error_count(n: usize, t: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    let mut pow3: u128 = 1;
    for r in 0..=t.min(n) {
        if r > 0 {
            binom = binom.saturating_mul((n - r + 1) as u128) / r as u128;
            pow3 = pow3.saturating_mul(3);
        }
        total = total.saturating_add(binom.saturating_mul(pow3));
    }
    total
}

/// All Paulis of weight at most `t` in canonical order.
#[derive(Clone, Debug)]
pub struct ErrorSet {
    n: usize,
    t: usize,
    elements: Vec<PauliOp>,
}

impl ErrorSet {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn max_weight(&self) -> usize {
        self.t
    }

    pub fn elements(&self) -> &[PauliOp] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PauliOp> {
        self.elements.iter()
    }
}

impl<'a> IntoIterator for &'a ErrorSet {
    type Item = &'a PauliOp;
    type IntoIter = std::slice::Iter<'a, PauliOp>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// [`enumerate_errors_with_cap`] with [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_errors(n: usize, t: usize) -> Result<ErrorSet> {
    enumerate_errors_with_cap(n, t, DEFAULT_ENUMERATION_CAP)
}

/// Every letter-form Pauli of weight `<= t`, ordered by weight, then by
/// lexicographic support, then by letters with `X < Y < Z` (first qubit of
/// the support most significant). The identity comes first.
pub fn enumerate_errors_with_cap(n: usize, t: usize, cap: u128) -> Result<ErrorSet> {
    if t > n {
        return Err(Error::Domain(format!("weight bound t={t} exceeds n={n}")));
    }
    let count = error_count(n, t);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "error set size N_E",
            required: count,
            cap,
        });
    }
    let mut elements = Vec::with_capacity(count as usize);
    for w in 0..=t {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            push_letter_assignments(n, &support, &mut elements);
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    debug_assert_eq!(elements.len() as u128, count);
    Ok(ErrorSet { n, t, elements })
}

fn push_letter_assignments(n: usize, support: &[usize], out: &mut Vec<PauliOp>) {
    let w = support.len();
    let mut digits = vec![0usize; w];
    loop {
        let mut p = PauliOp::identity(n);
        for (&q, &d) in support.iter().zip(&digits) {
            p.set_letter(q, Letter::NONTRIVIAL[d]);
        }
        out.push(p);
        // Odometer with the last support position fastest.
        let mut i = w;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Advances `c` to the next `|c|`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn omega_examples() {
        assert!(p("X").omega(&p("Z")));
        assert!(!p("XX").omega(&p("ZZ")));
        assert!(!p("Y").omega(&p("Y")));
        assert!(omega(&p("X"), &p("XX")).is_err());
    }

    #[test]
    fn mul_examples() {
        let xz = p("X").mul(&p("Z"));
        assert_eq!((xz.phase(), xz.x().get(0), xz.z().get(0)), (0, true, true));
        assert_eq!(xz.to_string(), "-iY");
        let zx = p("Z").mul(&p("X"));
        assert_eq!((zx.phase(), zx.x().get(0), zx.z().get(0)), (2, true, true));
        assert_eq!(zx.to_string(), "iY");
        assert!(p("X").checked_mul(&p("XX")).is_err());
    }

    #[test]
    fn y_is_i_x_z() {
        let y = p("Y");
        assert_eq!(y.phase(), 1);
        assert_eq!(y.mul(&y), PauliOp::identity(1));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(PauliOp::identity(4).weight(), 0);
        assert_eq!(PauliOp::single(5, 1, Letter::Y).weight(), 1);
        assert_eq!(p("XIZY").weight(), 3);
    }

    #[test]
    fn text_round_trip_examples() {
        for s in ["-iXIZY", "XZZXI", "iY", "-ZZ", "", "IIII", "-i"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+XY").to_string(), "XY");
        assert!("XQ".parse::<PauliOp>().is_err());
    }

    #[test]
    fn dagger_inverts() {
        for s in ["-iXIZY", "iY", "XZ", "-iZ"] {
            let a = p(s);
            assert_eq!(a.mul(&a.dagger()), PauliOp::identity(a.num_qubits()));
        }
    }

    #[test]
    fn enumerate_small_sets() {
        let e = enumerate_errors(5, 1).unwrap();
        assert_eq!(e.len(), 16);
        assert_eq!(error_count(5, 1), 1 + 3 * 5);
        assert_eq!(e.elements()[0], PauliOp::identity(5));
        assert_eq!(e.elements()[1].to_string(), "XIIII");
        assert_eq!(e.elements()[2].to_string(), "YIIII");
        assert_eq!(e.elements()[4].to_string(), "IXIII");

        let e0 = enumerate_errors(7, 0).unwrap();
        assert_eq!(e0.elements(), &[PauliOp::identity(7)]);

        let e2 = enumerate_errors(4, 2).unwrap();
        assert_eq!(e2.len(), 67);
        assert_eq!(e2.elements()[13].to_string(), "XXII");
        assert_eq!(e2.elements()[14].to_string(), "XYII");
        assert!(e2.iter().all(|q| q.weight() <= 2 && q.is_hermitian()));
        let distinct: std::collections::HashSet<_> = e2.iter().collect();
        assert_eq!(distinct.len(), 67);
    }

    #[test]
    fn enumeration_cap_refuses_with_count() {
        match enumerate_errors_with_cap(10, 3, 100) {
            Err(Error::CapExceeded { required, .. }) => assert_eq!(required, error_count(10, 3)),
            other => panic!("expected cap refusal, got {other:?}"),
        }
        assert!(matches!(enumerate_errors(3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn symplectic_rank_examples() {
        assert_eq!(symplectic_rank(&[p("X"), p("Z")]), 2);
        assert_eq!(symplectic_rank(&[p("X"), p("Z"), p("Y")]), 2);
        assert_eq!(symplectic_rank(&[]), 0);
    }
}
