//! Stabilizer codes: validation, syndromes, normalizer membership, logical
//! operators and the sequential random-generator sampler.
//!
//! Signs of stabilizer elements are never consulted. Membership in the
//! stabilizer is row-span membership of the `(x | z)` vector, and every code
//! is taken in its +1 sector.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, SpanBasis};
use crate::pauli::PauliOp;

/// Commutation bits of an error with each stabilizer generator, in
/// generator order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Syndrome(pub BitVec);

impl Syndrome {
    pub fn zeros(len: usize) -> Self {
        Syndrome(BitVec::zeros(len))
    }

    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_hex(&self) -> String {
        self.0.to_hex()
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A logical `(X̄, Z̄)` pair: they anticommute with each other and commute
/// with every generator and every other pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalPair {
    pub x: PauliOp,
    pub z: PauliOp,
}

/// An `[[n, k]]` stabilizer code given by `n - k` independent commuting
/// generators.
#[derive(Clone)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    gens: Vec<PauliOp>,
    span: SpanBasis,
    logicals: OnceLock<Vec<LogicalPair>>,
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StabilizerCode")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("gens", &self.gens)
            .finish()
    }
}

impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.gens == other.gens
    }
}

impl StabilizerCode {
    /// Checks that `gens` are `n - k` pairwise commuting, independent
    /// operators on `n` qubits.
    pub fn validate(gens: Vec<PauliOp>, n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Domain(format!("k={k} exceeds n={n}")));
        }
        if gens.len() != n - k {
            return Err(Error::Domain(format!(
                "expected {} generators for [[{n},{k}]], got {}",
                n - k,
                gens.len()
            )));
        }
        if let Some(g) = gens.iter().find(|g| g.num_qubits() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.num_qubits(),
            });
        }
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                if gens[i].omega(&gens[j]) {
                    return Err(Error::NotCommuting(i, j));
                }
            }
        }
        let mut span = SpanBasis::new();
        for (i, g) in gens.iter().enumerate() {
            if !span.insert(&g.to_symplectic()) {
                return Err(Error::DependentGenerator(i));
            }
        }
        Ok(Self {
            n,
            k,
            gens,
            span,
            logicals: OnceLock::new(),
        })
    }

    /// Validates the generators and installs an explicit logical basis in
    /// place of the computed one.
    pub fn with_logicals(
        gens: Vec<PauliOp>,
        n: usize,
        k: usize,
        logicals: Vec<LogicalPair>,
    ) -> Result<Self> {
        let code = Self::validate(gens, n, k)?;
        check_logicals(&code, &logicals)?;
        let _ = code.logicals.set(logicals);
        Ok(code)
    }

    /// The `[[n, n]]` code with no generators.
    pub fn trivial(n: usize) -> Self {
        Self::validate(Vec::new(), n, n).expect("empty generator set is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn num_logical(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.gens
    }

    /// `(n - k) x 2n` binary symplectic check matrix.
    pub fn check_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(
            2 * self.n,
            self.gens.iter().map(PauliOp::to_symplectic).collect(),
        )
        .expect("generators share length")
    }

    /// Bit `i` is `omega(e, gens[i])`.
    pub fn syndrome(&self, e: &PauliOp) -> Result<Syndrome> {
        if e.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: e.num_qubits(),
            });
        }
        Ok(self.syndrome_unchecked(e))
    }

    pub(crate) fn syndrome_unchecked(&self, e: &PauliOp) -> Syndrome {
        let mut s = BitVec::zeros(self.gens.len());
        for (i, g) in self.gens.iter().enumerate() {
            if e.omega(g) {
                s.set(i, true);
            }
        }
        Syndrome(s)
    }

    pub fn in_normalizer(&self, p: &PauliOp) -> bool {
        self.gens.iter().all(|g| !p.omega(g))
    }

    /// Membership modulo phase.
    pub fn in_stabilizer(&self, p: &PauliOp) -> bool {
        self.in_normalizer(p) && self.span.contains(&p.to_symplectic())
    }

    /// `k` logical pairs, computed once by symplectic Gram–Schmidt over the
    /// normalizer's complement of the stabilizer.
    pub fn logical_basis(&self) -> &[LogicalPair] {
        self.logicals.get_or_init(|| compute_logical_basis(self))
    }

    /// Logical operators flattened as `X̄_1, Z̄_1, X̄_2, Z̄_2, ...`.
    pub fn logical_operators(&self) -> Vec<PauliOp> {
        self.logical_basis()
            .iter()
            .flat_map(|pair| [pair.x.clone(), pair.z.clone()])
            .collect()
    }

    /// Symplectic coordinates of `p` over the logical basis: bit `j` is
    /// `omega(p, Z̄_j)` and bit `k + j` is `omega(p, X̄_j)`. Meaningful as a
    /// class only when `p` is in the normalizer.
    pub fn logical_bits(&self, p: &PauliOp) -> BitVec {
        let k = self.k;
        let mut v = BitVec::zeros(2 * k);
        for (j, pair) in self.logical_basis().iter().enumerate() {
            if p.omega(&pair.z) {
                v.set(j, true);
            }
            if p.omega(&pair.x) {
                v.set(k + j, true);
            }
        }
        v
    }

    /// Class of a normalizer element in N(S)/S. Zero iff `p` is in the
    /// stabilizer.
    pub fn logical_class(&self, p: &PauliOp) -> Result<BitVec> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.num_qubits(),
            });
        }
        if !self.in_normalizer(p) {
            return Err(Error::NotInNormalizer);
        }
        Ok(self.logical_bits(p))
    }

    /// The letter-form product `prod_j X̄_j^{v_j} Z̄_j^{v_{k+j}}`, whose class
    /// is `v`.
    pub fn lift_class(&self, v: &BitVec) -> PauliOp {
        assert_eq!(v.len(), 2 * self.k, "class vector has wrong length");
        let mut acc = PauliOp::identity(self.n);
        for (j, pair) in self.logical_basis().iter().enumerate() {
            if v.get(j) {
                acc = acc.mul(&pair.x);
            }
            if v.get(self.k + j) {
                acc = acc.mul(&pair.z);
            }
        }
        acc.letter_form()
    }

    /// Parses the line format: a header `n k`, then `n - k` generator
    /// strings, then optionally `2k` logical strings as `X̄_1, Z̄_1, ...`.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn from_code_file(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let mut fields = header.split_whitespace();
        let parse_num = |f: Option<&str>| -> Result<usize> {
            f.ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad header {header:?}")))
        };
        let n = parse_num(fields.next())?;
        let k = parse_num(fields.next())?;
        if fields.next().is_some() || k > n {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let ops = lines
            .map(|l| {
                let p: PauliOp = l.parse()?;
                if p.num_qubits() != n {
                    return Err(Error::Parse(format!("operator {l:?} is not on {n} qubits")));
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        let r = n - k;
        if ops.len() == r {
            Self::validate(ops, n, k)
        } else if ops.len() == r + 2 * k {
            let mut ops = ops;
            let logical_ops = ops.split_off(r);
            let logicals = logical_ops
                .chunks(2)
                .map(|c| LogicalPair {
                    x: c[0].clone(),
                    z: c[1].clone(),
                })
                .collect();
            Self::with_logicals(ops, n, k, logicals)
        } else {
            Err(Error::Parse(format!(
                "expected {r} or {} operator lines, found {}",
                r + 2 * k,
                ops.len()
            )))
        }
    }

    pub fn to_code_file(&self, with_logicals: bool) -> String {
        let mut s = format!("{} {}\n", self.n, self.k);
        for g in &self.gens {
            s.push_str(&format!("{g}\n"));
        }
        if with_logicals {
            for p in self.logical_operators() {
                s.push_str(&format!("{p}\n"));
            }
        }
        s
    }
}

fn check_logicals(code: &StabilizerCode, logicals: &[LogicalPair]) -> Result<()> {
    if logicals.len() != code.k {
        return Err(Error::InvalidLogicals(format!(
            "expected {} pairs, got {}",
            code.k,
            logicals.len()
        )));
    }
    let ops: Vec<&PauliOp> = logicals.iter().flat_map(|p| [&p.x, &p.z]).collect();
    for (a, op) in ops.iter().enumerate() {
        if op.num_qubits() != code.n || !code.in_normalizer(op) {
            return Err(Error::InvalidLogicals(format!(
                "operator {a} does not commute with the stabilizer"
            )));
        }
        for (b, other) in ops.iter().enumerate().skip(a + 1) {
            let partners = a / 2 == b / 2;
            if op.omega(other) != partners {
                return Err(Error::InvalidLogicals(format!(
                    "operators {a} and {b} have the wrong commutation relation"
                )));
            }
        }
    }
    let mut span = code.span.clone();
    for op in ops {
        if !span.insert(&op.to_symplectic()) {
            return Err(Error::InvalidLogicals(
                "operators are not independent".into(),
            ));
        }
    }
    Ok(())
}

/// Kernel of the commutation constraints: rows `(z | x)` of each operator,
/// so that `row · (u | v) = omega`.
fn commutant_basis(n: usize, ops: &[PauliOp]) -> BitMatrix {
    let rows = ops.iter().map(|g| g.z().concat(g.x())).collect();
    BitMatrix::from_rows(2 * n, rows)
        .expect("rows share length")
        .kernel_basis()
}

fn compute_logical_basis(code: &StabilizerCode) -> Vec<LogicalPair> {
    let normalizer = commutant_basis(code.n, &code.gens);
    let mut span = code.span.clone();
    let mut pool: Vec<PauliOp> = normalizer
        .rows()
        .iter()
        .filter(|v| span.insert(v))
        .map(PauliOp::from_symplectic)
        .collect();
    debug_assert_eq!(pool.len(), 2 * code.k);
    let mut pairs = Vec::with_capacity(code.k);
    while !pool.is_empty() {
        let a = pool.remove(0);
        let idx = pool
            .iter()
            .position(|b| a.omega(b))
            .expect("form is nondegenerate on N(S)/S");
        let b = pool.remove(idx);
        for c in pool.iter_mut() {
            let mut next = c.clone();
            if c.omega(&b) {
                next = next.mul(&a);
            }
            if c.omega(&a) {
                next = next.mul(&b);
            }
            *c = next;
        }
        pairs.push(LogicalPair {
            x: a.letter_form(),
            z: b.letter_form(),
        });
    }
    pairs
}

/// Samples an ordered generating set one generator at a time: each new
/// generator is uniform over the Paulis (mod phase) that commute with the
/// previous ones and lie outside their span.
pub fn random_code<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<StabilizerCode> {
    if k > n {
        return Err(Error::Domain(format!("k={k} exceeds n={n}")));
    }
    let mut gens: Vec<PauliOp> = Vec::with_capacity(n - k);
    let mut span = SpanBasis::new();
    for _ in 0..n - k {
        let basis = commutant_basis(n, &gens);
        let v = loop {
            let mut v = BitVec::zeros(2 * n);
            for row in basis.rows() {
                if rng.random::<bool>() {
                    v.xor_assign(row);
                }
            }
            if !span.contains(&v) {
                break v;
            }
        };
        span.insert(&v);
        gens.push(PauliOp::from_symplectic(&v));
    }
    StabilizerCode::validate(gens, n, k)
}

/// Number of ordered generating sets of `[[n, k]]` stabilizer groups,
/// `prod_{a=0}^{n-k-1} (2^{2n-a} - 2^a)`. `None` on overflow.
pub fn generating_set_count(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    (0..n - k).try_fold(1u128, |acc, a| {
        let hi = 1u128.checked_shl((2 * n - a) as u32)?;
        acc.checked_mul(hi - (1u128 << a))
    })
}

fn parse_all(strs: &[&str]) -> Vec<PauliOp> {
    strs.iter()
        .map(|s| s.parse().expect("valid literal"))
        .collect()
}

/// The [[5,1,3]] perfect code with cyclic generators `XZZXI`, ...
pub fn five_qubit_code() -> StabilizerCode {
    StabilizerCode::validate(parse_all(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]), 5, 1)
        .expect("five-qubit code is valid")
}

/// The [[4,2,2]] error-detecting code with generators `XXXX`, `ZZZZ`.
pub fn four_qubit_detection_code() -> StabilizerCode {
    StabilizerCode::validate(parse_all(&["XXXX", "ZZZZ"]), 4, 2).expect("[[4,2]] code is valid")
}
