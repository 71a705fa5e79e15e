//! Shintani matrices and the 0/1 support vectors derived from their columns.
//!
//! A [`SigmaMatrix`] is an `n x r` matrix of non-negative reals with at least
//! one positive entry in every row and every column. Its zero pattern alone
//! determines the polyhedra and pole families studied elsewhere in the crate,
//! so supports are stored as exact bitsets.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported row count (support vectors are `u64` bitsets).
pub const MAX_DIM: usize = 64;

/// Largest supported column count for subset enumeration.
pub const MAX_SUBSET_SIZE: usize = 63;

/// A nonzero vector in `{0,1}^n`, stored as a bitset over `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SupportVector {
    dim: usize,
    bits: u64,
}

impl SupportVector {
    pub fn new(dim: usize, bits: u64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        if bits == 0 {
            return Err(Error::EmptySupport);
        }
        if dim < 64 && bits >> dim != 0 {
            return Err(Error::IndexOutOfRange {
                index: 64 - bits.leading_zeros() as usize,
                len: dim,
            });
        }
        Ok(Self { dim, bits })
    }

    /// Builds a support vector from 0-based coordinate indices.
    pub fn from_indices(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &i in indices {
            if i >= dim {
                return Err(Error::IndexOutOfRange {
                    index: i + 1,
                    len: dim,
                });
            }
            bits |= 1 << i;
        }
        Self::new(dim, bits)
    }

    /// Builds a support vector from a slice of 0/1 values.
    pub fn from_bits(values: &[u8]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &v) in values.iter().enumerate() {
            match v {
                0 => {}
                1 if i < MAX_DIM => bits |= 1 << i,
                1 => {
                    return Err(Error::DimensionTooLarge {
                        dim: values.len(),
                        max: MAX_DIM,
                    })
                }
                _ => return Err(Error::Parse(format!("support entry {v} is not 0 or 1"))),
            }
        }
        Self::new(values.len(), bits)
    }

    /// The vector `(1, ..., 1)`.
    pub fn full(dim: usize) -> Result<Self> {
        let bits = if dim >= 64 {
            u64::MAX
        } else {
            (1u64 << dim) - 1
        };
        Self::new(dim, bits)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of nonzero coordinates.
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.dim && self.bits >> i & 1 == 1
    }

    /// 0-based indices of the support, ascending.
    pub fn support(&self) -> Vec<usize> {
        iter_bits(self.bits).collect()
    }

    /// True when the vector is a canonical basis vector `e_i`.
    pub fn is_basis_vector(&self) -> bool {
        self.bits.count_ones() == 1
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            bits: self.bits | other.bits,
        }
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.bits & other.bits != 0
    }

    /// `<mu, x>`, i.e. the sum of `x` over the support.
    pub fn dot(&self, x: &[f64]) -> f64 {
        iter_bits(self.bits).map(|i| x[i]).sum()
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.dim).map(|i| self.contains(i) as u8).collect()
    }

    /// Ordering used for reports: by support size, then by the ascending
    /// list of support indices compared lexicographically.
    pub fn report_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.support().cmp(&other.support()))
    }
}

impl fmt::Debug for SupportVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SupportVector(")?;
        for b in self.to_vec() {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn iter_bits(mut bits: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        }
    })
}

/// A non-empty subset of column indices `J ⊆ [r]`, stored as a bitset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnSubset(u64);

impl ColumnSubset {
    pub fn new(bits: u64, universe: usize) -> Result<Self> {
        if bits == 0 {
            return Err(Error::EmptySubset);
        }
        if universe > MAX_SUBSET_SIZE {
            return Err(Error::DimensionTooLarge {
                dim: universe,
                max: MAX_SUBSET_SIZE,
            });
        }
        if bits >> universe != 0 {
            return Err(Error::IndexOutOfRange {
                index: 64 - bits.leading_zeros() as usize,
                len: universe,
            });
        }
        Ok(Self(bits))
    }

    /// From 0-based indices.
    pub fn from_indices(indices: &[usize], universe: usize) -> Result<Self> {
        let mut bits = 0u64;
        for &j in indices {
            if j >= universe || j >= MAX_SUBSET_SIZE {
                return Err(Error::IndexOutOfRange {
                    index: j + 1,
                    len: universe,
                });
            }
            bits |= 1 << j;
        }
        Self::new(bits, universe)
    }

    /// From 1-based indices, as used in the JSON formats.
    pub fn from_one_based(indices: &[usize], universe: usize) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(indices.len());
        for &j in indices {
            if j == 0 {
                return Err(Error::IndexOutOfRange {
                    index: 0,
                    len: universe,
                });
            }
            zero_based.push(j - 1);
        }
        Self::from_indices(&zero_based, universe)
    }

    /// The full subset `[r]`.
    pub fn full(universe: usize) -> Result<Self> {
        if universe == 0 || universe > MAX_SUBSET_SIZE {
            return Err(Error::DimensionTooLarge {
                dim: universe,
                max: MAX_SUBSET_SIZE,
            });
        }
        Ok(Self((1u64 << universe) - 1))
    }

    pub fn bits(&self) -> u64 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: usize) -> bool {
        j < 64 && self.0 >> j & 1 == 1
    }

    pub fn indices(&self) -> Vec<usize> {
        iter_bits(self.0).collect()
    }

    pub fn one_based(&self) -> Vec<usize> {
        iter_bits(self.0).map(|j| j + 1).collect()
    }

    /// Every non-empty subset of `[universe]`, in increasing bitmask order.
    pub fn all_nonempty(universe: usize) -> impl Iterator<Item = ColumnSubset> {
        (1u64..(1u64 << universe)).map(ColumnSubset)
    }
}

/// Upper bound on the size of a set whose `2^k - 1` non-empty subsets get
/// enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetCap(usize);

impl SubsetCap {
    pub const DEFAULT: usize = 20;
    pub const ENV_VAR: &'static str = "SHINTANI_SUBSET_CAP";

    pub fn new(cap: usize) -> Result<Self> {
        if cap == 0 || cap > MAX_SUBSET_SIZE {
            return Err(Error::InvalidParameter(format!(
                "subset cap must lie in 1..={MAX_SUBSET_SIZE}, got {cap}"
            )));
        }
        Ok(Self(cap))
    }

    /// Reads `SHINTANI_SUBSET_CAP`, falling back to the default when unset.
    pub fn from_env() -> Result<Self> {
        match std::env::var(Self::ENV_VAR) {
            Ok(v) => {
                let cap = v.trim().parse::<usize>().map_err(|e| {
                    Error::InvalidParameter(format!("{}={v:?}: {e}", Self::ENV_VAR))
                })?;
                Self::new(cap)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn get(&self) -> usize {
        self.0
    }

    pub fn check(&self, size: usize) -> Result<()> {
        if size > self.0 {
            Err(Error::SubsetCapExceeded { size, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for SubsetCap {
    fn default() -> Self {
        Self(Self::DEFAULT)
    }
}

/// A validated `n x r` Shintani matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl SigmaMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `C_j(eps) = <eps, C_j>`, the linear form of column `j`.
    pub fn column_form(&self, j: usize, eps: &[f64]) -> f64 {
        (0..self.rows).map(|i| self.get(i, j) * eps[i]).sum()
    }

    /// Matrix with rows reordered so that row `k` of the result is row
    /// `perm[k]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<SigmaMatrix> {
        validate_matrix(perm.iter().map(|&p| self.row(p).to_vec()).collect())
    }

    /// Matrix with columns reordered so that column `k` of the result is
    /// column `perm[k]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Result<SigmaMatrix> {
        validate_matrix(
            (0..self.rows)
                .map(|i| perm.iter().map(|&p| self.get(i, p)).collect())
                .collect(),
        )
    }
}

/// Validates a raw grid as a Shintani matrix. Entries are preserved exactly;
/// positivity means `> 0.0` with no tolerance.
pub fn validate_matrix(raw: Vec<Vec<f64>>) -> Result<SigmaMatrix> {
    let rows = raw.len();
    if rows == 0 || raw[0].is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let cols = raw[0].len();
    for (i, row) in raw.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::NotRectangular {
                row: i + 1,
                expected: cols,
                found: row.len(),
            });
        }
    }
    if rows > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: rows,
            max: MAX_DIM,
        });
    }
    for (i, row) in raw.iter().enumerate() {
        for (j, &a) in row.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::NonFiniteEntry {
                    row: i + 1,
                    col: j + 1,
                });
            }
            if a < 0.0 {
                return Err(Error::NegativeEntry {
                    row: i + 1,
                    col: j + 1,
                });
            }
        }
    }
    if let Some(i) = raw.iter().position(|row| row.iter().all(|&a| a == 0.0)) {
        return Err(Error::ZeroRow(i + 1));
    }
    if let Some(j) = (0..cols).find(|&j| raw.iter().all(|row| row[j] == 0.0)) {
        return Err(Error::ZeroColumn(j + 1));
    }
    Ok(SigmaMatrix {
        rows,
        cols,
        entries: raw.into_iter().flatten().collect(),
    })
}

/// The 0/1 matrix recording the zero pattern of `a`.
pub fn skeleton(a: &SigmaMatrix) -> SigmaMatrix {
    SigmaMatrix {
        rows: a.rows,
        cols: a.cols,
        entries: a
            .entries
            .iter()
            .map(|&x| if x > 0.0 { 1.0 } else { 0.0 })
            .collect(),
    }
}

/// `mu_j` for every column: the support `{i : a_ij > 0}`.
pub fn column_supports(a: &SigmaMatrix) -> Vec<SupportVector> {
    (0..a.cols)
        .map(|j| {
            let bits = (0..a.rows)
                .filter(|&i| a.get(i, j) > 0.0)
                .fold(0u64, |acc, i| acc | 1 << i);
            SupportVector::new(a.rows, bits).expect("validated columns are nonzero")
        })
        .collect()
}

/// The `n x (m+1)` matrix whose first `m` columns are the given supports and
/// whose last column is all ones.
pub fn matrix_from_supports(mus: &[SupportVector], n: usize) -> Result<SigmaMatrix> {
    for (j, mu) in mus.iter().enumerate() {
        if mu.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mu.dim(),
            });
        }
        if mu.len() < 2 {
            return Err(Error::SupportTooSmall(j + 1));
        }
    }
    let raw = (0..n)
        .map(|i| {
            mus.iter()
                .map(|mu| if mu.contains(i) { 1.0 } else { 0.0 })
                .chain(std::iter::once(1.0))
                .collect()
        })
        .collect();
    validate_matrix(raw)
}
