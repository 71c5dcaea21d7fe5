//! Bit-packed vectors and matrices over GF(2).
//!
//! Everything symplectic in this crate bottoms out here: Pauli operators are
//! pairs of [`BitVec`]s, check matrices are [`BitMatrix`]es, and logical
//! bases come from [`BitMatrix::kernel_basis`]. Elimination always pivots on
//! the lowest available column and never touches the caller's matrix, so
//! every derived object is reproducible bit-for-bit.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD: usize = 64;

type Words = SmallVec<[u64; 2]>;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2), packed 64 bits per word.
///
/// Bits past `len` are always zero, so the derived equality, ordering and
/// hashing only ever see meaningful bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Words,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        let mut words = Words::new();
        words.resize(words_for(len), 0);
        Self { len, words }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.mask_tail();
        v
    }

    /// Unit vector with a single set bit.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector from the low `len` bits of `value` (bit `i` of the
    /// integer becomes entry `i`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.mask_tail();
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `0`/`1` characters; character `i` is entry `i`.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Error::Parse(format!(
                        "invalid bit character {c:?} in {s:?}"
                    )))
                }
            }
        }
        Ok(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        out
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Copy of entries `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len);
        let mut out = BitVec::zeros(end - start);
        for i in self.iter_ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    /// Low 64 entries as an integer (entry `i` is bit `i`).
    pub fn to_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Lowercase hex of the integer `sum b_i 2^i`, zero-padded to
    /// `ceil(len / 4)` digits (most significant digit first).
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nib = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.len && self.get(i) {
                    nib |= 1 << b;
                }
            }
            s.push(char::from_digit(nib as u32, 16).expect("nibble"));
        }
        s
    }

    /// Inverse of [`BitVec::to_hex`]. Set bits beyond `len` are rejected.
    pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        let mut v = BitVec::zeros(len);
        for (pos, c) in hex.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = pos * 4 + b;
                    if i >= len {
                        return Err(Error::Parse(format!(
                            "hex value {hex:?} exceeds {len} bits"
                        )));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// A dense matrix over GF(2), stored as a sequence of row vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    /// Nonzero rows of the reduced matrix, one per pivot.
    pub rows: Vec<BitVec>,
    /// `pivots[i]` is the leading column of `rows[i]`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Convenience constructor from `0`/`1` strings of equal length.
    pub fn from_bit_strs(rows: &[&str]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| BitVec::from_bit_str(r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(cols, rows)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    /// `self · x` over GF(2).
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(x) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form, pivoting on the lowest available column.
    pub fn row_echelon(&self) -> RowEchelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            let Some(found) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, found);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        RowEchelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.row_echelon().pivots.len()
    }

    /// Some `x` with `self · x = b`, or `None` when the system is
    /// inconsistent. Free variables are set to zero, so the answer is fixed
    /// by the lowest-column pivot rule.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>> {
        if b.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                found: b.len(),
            });
        }
        // Augment with b as the last column and reduce.
        let augmented = BitMatrix {
            cols: self.cols + 1,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.concat(&BitVec::from_bools(&[b.get(i)])))
                .collect(),
        };
        let ech = augmented.row_echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            if row.get(self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of `{x : self · x = 0}`, one row per free column in increasing
    /// column order. Row count is `cols - rank`.
    pub fn kernel_basis(&self) -> BitMatrix {
        let ech = self.row_echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVec::unit(self.cols, free);
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        BitMatrix {
            cols: self.cols,
            rows,
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Incrementally maintained span of a set of vectors, kept in reduced
/// echelon form so membership and reduction are a single pass.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span. Returns `false` if it was already a member.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for row in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    /// Reduced basis rows, ordered by pivot column.
    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Exhaustive span size, independent of elimination.
    fn span_rank(rows: &[BitVec], cols: usize) -> usize {
        let mut seen = std::collections::HashSet::new();
        for mask in 0u32..(1 << rows.len()) {
            let mut acc = BitVec::zeros(cols);
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc.xor_assign(r);
                }
            }
            seen.insert(acc);
        }
        seen.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        assert_eq!(BitMatrix::zeros(4, 4).rank(), 0);
        let m = BitMatrix::from_bit_strs(&["110", "011", "101"]).unwrap();
        assert_eq!(span_rank(m.rows(), 3), 2);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn rank_does_not_mutate_input() {
        let m = BitMatrix::from_bit_strs(&["110", "011", "101"]).unwrap();
        let before = m.clone();
        let _ = m.rank();
        let _ = m.kernel_basis();
        assert_eq!(m, before);
    }

    #[test]
    fn solve_examples() {
        let id = BitMatrix::identity(3);
        let b = BitVec::from_bit_str("101").unwrap();
        assert_eq!(id.solve(&b).unwrap(), Some(b.clone()));

        let zero = BitMatrix::zeros(1, 3);
        assert_eq!(
            zero.solve(&BitVec::from_bit_str("1").unwrap()).unwrap(),
            None
        );

        // Solutions of {110, 011} x = 11 by enumeration: 010 and 101.
        let a = BitMatrix::from_bit_strs(&["110", "011"]).unwrap();
        let rhs = BitVec::from_bit_str("11").unwrap();
        let sols: Vec<_> = (0..8u64)
            .map(|v| BitVec::from_u64(3, v))
            .filter(|x| a.mul_vec(x).unwrap() == rhs)
            .map(|x| x.to_bit_string())
            .collect();
        assert_eq!(sols, vec!["010", "101"]);
        assert_eq!(a.solve(&rhs).unwrap().unwrap().to_bit_string(), "010");
    }

    #[test]
    fn solve_dimension_mismatch_is_an_error() {
        let a = BitMatrix::identity(3);
        assert!(matches!(
            a.solve(&BitVec::zeros(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(BitMatrix::identity(2).kernel_basis().num_rows(), 0);
        assert_eq!(BitMatrix::zeros(2, 3).kernel_basis().num_rows(), 3);

        let a = BitMatrix::from_bit_strs(&["111"]).unwrap();
        let k = a.kernel_basis();
        assert_eq!(k.num_rows(), 2);
        // 4 of the 8 vectors are annihilated by 111; the kernel rows must span them.
        let annihilated: Vec<_> = (0..8u64)
            .map(|v| BitVec::from_u64(3, v))
            .filter(|x| !a.row(0).dot(x))
            .collect();
        assert_eq!(annihilated.len(), 4);
        assert_eq!(span_rank(k.rows(), 3), 2);
        for r in k.rows() {
            assert!(!a.row(0).dot(r));
        }
    }

    #[test]
    fn hex_and_bits_round_trip() {
        let v = BitVec::from_bit_str("1000110").unwrap();
        assert_eq!(v.to_hex(), "31");
        assert_eq!(BitVec::from_hex(7, &v.to_hex()).unwrap(), v);
        assert!(BitVec::from_hex(3, "f").is_err());
        assert_eq!(BitVec::zeros(0).to_hex(), "");
    }

    #[test]
    fn ones_masks_tail() {
        let v = BitVec::ones(70);
        assert_eq!(v.count_ones(), 70);
        let w = BitVec::from_u64(3, u64::MAX);
        assert_eq!(w.count_ones(), 3);
    }

    #[test]
    fn span_basis_tracks_membership() {
        let mut s = SpanBasis::new();
        assert!(s.insert(&BitVec::from_bit_str("110").unwrap()));
        assert!(s.insert(&BitVec::from_bit_str("011").unwrap()));
        assert!(!s.insert(&BitVec::from_bit_str("101").unwrap()));
        assert!(s.contains(&BitVec::zeros(3)));
        assert!(!s.contains(&BitVec::from_bit_str("100").unwrap()));
        assert_eq!(s.dim(), 2);
    }
}
