//! Brute-force list decodability.
//!
//! Errors of weight at most `t` are grouped by syndrome. Within a group the
//! canonically first error is the representative `E_0`, and the group's list
//! is the span of the logical classes of `E_0† E_j`. A code is an
//! `[n, k, t, L]`-list code exactly when every group's span has rank at most
//! `L`; errors that differ by a stabilizer element count as the same list
//! element.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::{BitVec, SpanBasis};
use crate::pauli::{enumerate_errors_with_cap, error_count, PauliOp, DEFAULT_ENUMERATION_CAP};
use crate::stabilizer::{StabilizerCode, Syndrome};

/// Table export schema tag, first line of [`ListTable::export`].
pub const TABLE_SCHEMA: &str = "# list-table v1";

/// Errors below this count are grouped on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;
const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListEntry {
    /// Canonically first error with this syndrome.
    pub rep: PauliOp,
    /// Reduced basis of the logical classes `class(rep† E_j)`.
    pub class_basis: Vec<BitVec>,
    /// Number of weight-`<= t` errors with this syndrome.
    pub members: usize,
}

impl ListEntry {
    pub fn rank(&self) -> usize {
        self.class_basis.len()
    }

    /// The `2^rank` span vectors in mask order (bit `i` of the mask selects
    /// basis row `i`), starting with the zero class.
    pub fn span_vectors(&self, class_len: usize) -> Vec<BitVec> {
        let r = self.class_basis.len();
        (0u64..1 << r)
            .map(|mask| {
                let mut v = BitVec::zeros(class_len);
                for (i, row) in self.class_basis.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v.xor_assign(row);
                    }
                }
                v
            })
            .collect()
    }
}

/// Per-syndrome lists for all errors of weight at most `t`.
#[derive(Clone, Debug)]
pub struct ListTable {
    code: StabilizerCode,
    t: usize,
    n_e: u128,
    entries: BTreeMap<Syndrome, ListEntry>,
}

/// Summary of a table: the smallest `L` for which the code is a list code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListReport {
    pub l_min: usize,
    /// Lowest syndrome attaining `l_min`.
    pub worst_syndrome: Syndrome,
    pub entry_count: usize,
    pub n_e: u128,
}

/// Outcome of a public list lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ListDecode<'a> {
    List(&'a ListEntry),
    /// No error of weight `<= t` produces this syndrome.
    Uncorrectable,
}

// Partial grouping of a contiguous run of errors: first element per
// syndrome plus the span of classes relative to it.
type Partial = BTreeMap<Syndrome, (PauliOp, SpanBasis, usize)>;

fn group(code: &StabilizerCode, errors: &[PauliOp]) -> Partial {
    let mut out = Partial::new();
    for e in errors {
        let s = code.syndrome_unchecked(e);
        match out.get_mut(&s) {
            Some((rep, span, members)) => {
                span.insert(&code.logical_bits(&rep.mul(e)));
                *members += 1;
            }
            None => {
                out.insert(s, (e.clone(), SpanBasis::new(), 1));
            }
        }
    }
    out
}

// Associative merge of two adjacent runs; the left representative wins and
// the right span is shifted by class(rep_l · rep_r).
fn merge(code: &StabilizerCode, mut left: Partial, right: Partial) -> Partial {
    for (s, (rep_r, span_r, m_r)) in right {
        match left.get_mut(&s) {
            Some((rep_l, span_l, m_l)) => {
                span_l.insert(&code.logical_bits(&rep_l.mul(&rep_r)));
                for row in span_r.rows() {
                    span_l.insert(row);
                }
                *m_l += m_r;
            }
            None => {
                left.insert(s, (rep_r, span_r, m_r));
            }
        }
    }
    left
}

/// [`build_table_with_cap`] with the default enumeration cap.
pub fn build_table(code: &StabilizerCode, t: usize) -> Result<ListTable> {
    build_table_with_cap(code, t, DEFAULT_ENUMERATION_CAP)
}

pub fn build_table_with_cap(code: &StabilizerCode, t: usize, cap: u128) -> Result<ListTable> {
    let errors = enumerate_errors_with_cap(code.num_qubits(), t, cap)?;
    // Force the logical basis before fanning out.
    code.logical_basis();
    let elems = errors.elements();
    let grouped = if elems.len() < PARALLEL_THRESHOLD {
        group(code, elems)
    } else {
        elems
            .par_chunks(CHUNK)
            .map(|chunk| group(code, chunk))
            .reduce(Partial::new, |a, b| merge(code, a, b))
    };
    let entries = grouped
        .into_iter()
        .map(|(s, (rep, span, members))| {
            (
                s,
                ListEntry {
                    rep,
                    class_basis: span.into_rows(),
                    members,
                },
            )
        })
        .collect();
    Ok(ListTable {
        code: code.clone(),
        t,
        n_e: error_count(code.num_qubits(), t),
        entries,
    })
}

impl ListTable {
    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn max_weight(&self) -> usize {
        self.t
    }

    pub fn n_e(&self) -> u128 {
        self.n_e
    }

    pub fn entries(&self) -> &BTreeMap<Syndrome, ListEntry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &Syndrome) -> Option<&ListEntry> {
        self.entries.get(s)
    }

    pub fn report(&self) -> ListReport {
        let (worst, l_min) = self
            .entries
            .iter()
            .map(|(s, e)| (s, e.rank()))
            .fold(None::<(&Syndrome, usize)>, |best, (s, r)| match best {
                Some((_, br)) if br >= r => best,
                _ => Some((s, r)),
            })
            .expect("identity is always in the table");
        ListReport {
            l_min,
            worst_syndrome: worst.clone(),
            entry_count: self.entries.len(),
            n_e: self.n_e,
        }
    }

    /// Whether the code is an `[n, k, t, L]`-list code.
    pub fn is_list_code(&self, l: usize) -> bool {
        self.entries.values().all(|e| e.rank() <= l)
    }

    /// Structured text: schema line, a parameter line, then one line per
    /// syndrome: `hex rep [basis rows]`.
    pub fn export(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{TABLE_SCHEMA}");
        let _ = writeln!(
            s,
            "n={} k={} t={} entries={} n_e={}",
            self.code.num_qubits(),
            self.code.num_logical(),
            self.t,
            self.entries.len(),
            self.n_e
        );
        for (syn, e) in &self.entries {
            let rows: Vec<String> = e.class_basis.iter().map(BitVec::to_bit_string).collect();
            let _ = writeln!(s, "{} {} [{}]", syn.to_hex(), e.rep, rows.join(","));
        }
        s
    }
}

pub fn min_list_length(code: &StabilizerCode, t: usize) -> Result<ListReport> {
    Ok(build_table(code, t)?.report())
}

/// Public list lookup for a syndrome.
pub fn decode_list<'a>(table: &'a ListTable, s: &Syndrome) -> Result<ListDecode<'a>> {
    let r = table.code.num_qubits() - table.code.num_logical();
    if s.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: s.len(),
        });
    }
    Ok(match table.entries.get(s) {
        Some(e) => ListDecode::List(e),
        None => ListDecode::Uncorrectable,
    })
}

/// `N_E^{L+1} 2^{-L(n-k)}`, the union bound on a random `[[n, k]]` code
/// failing to be an `L`-list code at weight `t`. Evaluated in log space.
pub fn union_bound(n: usize, k: usize, t: usize, l: usize) -> f64 {
    let log_ne = (error_count(n, t) as f64).log2();
    ((l as f64 + 1.0) * log_ne - (l * (n - k)) as f64).exp2()
}

/// The tighter `C(N_E, L+1) 2^{-L(n-k)}` form.
pub fn union_bound_binomial(n: usize, k: usize, t: usize, l: usize) -> f64 {
    let ne = error_count(n, t) as f64;
    if ne < (l + 1) as f64 {
        return 0.0;
    }
    let log_binom: f64 = (0..=l)
        .map(|i| (ne - i as f64).log2() - ((i + 1) as f64).log2())
        .sum();
    (log_binom - (l * (n - k)) as f64).exp2()
}
