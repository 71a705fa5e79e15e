//! Pole hyperplane families of `ζ_A` and its absolute-convergence region.
//!
//! Every non-empty column subset `J` contributes the 0/1 normal `mu_J`, whose
//! support is the union of the supports of the columns in `J`. The possible
//! poles lie on `<mu_J, s> = |J| - l`. Families are merged by `mu` with the
//! largest `|J|` kept as the level `nu`.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{column_supports, ColumnSubset, SigmaMatrix, SubsetCap, SupportVector};
use crate::polyhedra::{subset_normals, HalfspaceConstraint, HalfspaceSystem, Strictness};

/// Which `l` values are reported for canonical-basis normals.
pub const L_RANGE_CONVENTION: &str =
    "canonical-basis normals carry l in {0,...,nu-1}; all other normals carry every l >= 0";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LRange {
    /// Every `l >= 0`.
    All,
    /// The listed values only.
    Finite(Vec<u32>),
}

impl LRange {
    pub fn contains(&self, l: u32) -> bool {
        match self {
            LRange::All => true,
            LRange::Finite(ls) => ls.contains(&l),
        }
    }
}

/// Hyperplanes `<mu, s> = nu - l` for `l` in `l_range`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PoleFamily {
    pub mu: SupportVector,
    pub nu: u32,
    pub l_range: LRange,
    /// Every column subset `J` with `mu_J == mu`, ordered by size then
    /// lexicographically.
    pub witnesses: Vec<ColumnSubset>,
}

impl fmt::Display for PoleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs: Vec<String> = self
            .mu
            .support()
            .iter()
            .map(|i| format!("s{}", i + 1))
            .collect();
        match &self.l_range {
            LRange::All => write!(f, "{} = {} - l, l >= 0", lhs.join(" + "), self.nu),
            LRange::Finite(ls) => {
                let ls: Vec<String> = ls.iter().map(u32::to_string).collect();
                write!(
                    f,
                    "{} = {} - l, l in {{{}}}",
                    lhs.join(" + "),
                    self.nu,
                    ls.join(",")
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleReport {
    pub n: usize,
    pub r: usize,
    pub families: Vec<PoleFamily>,
    /// Strict constraints `<mu, sigma> > nu` for every family, plus
    /// `sigma_i > 0`.
    pub convergence: HalfspaceSystem,
}

impl PoleReport {
    /// Whether `sigma` lies in the absolute-convergence region.
    pub fn converges_at(&self, sigma: &[f64]) -> Result<bool> {
        self.convergence.contains(sigma, Strictness::Strict)
    }

    /// The first convergence constraint `sigma` violates, if any.
    pub fn violated_constraint(&self, sigma: &[f64]) -> Result<Option<HalfspaceConstraint>> {
        Ok(self
            .convergence
            .first_violation(sigma, Strictness::Strict)?
            .copied())
    }
}

/// `mu_J`: the 0/1 vector supported on the union of the column supports in `J`.
pub fn mu_vector(a: &SigmaMatrix, subset: ColumnSubset) -> Result<SupportVector> {
    let supports = column_supports(a);
    let mut bits = 0u64;
    for j in subset.indices() {
        let col = supports.get(j).ok_or(Error::IndexOutOfRange {
            index: j + 1,
            len: a.cols(),
        })?;
        bits |= col.bits();
    }
    SupportVector::new(a.rows(), bits)
}

/// Enumerates `mu_J` over all `2^r - 1` non-empty column subsets and merges
/// them into pole families.
pub fn enumerate_pole_families(a: &SigmaMatrix, cap: SubsetCap) -> Result<PoleReport> {
    cap.check(a.cols())?;
    let supports = column_supports(a);
    let full = ColumnSubset::full(a.cols())?;
    let mut families: Vec<PoleFamily> = subset_normals(&supports, full)
        .into_iter()
        .map(|(mu, nu, witnesses)| PoleFamily {
            l_range: if mu.is_basis_vector() {
                LRange::Finite((0..nu).collect())
            } else {
                LRange::All
            },
            mu,
            nu,
            witnesses,
        })
        .collect();
    families.sort_by(|x, y| x.mu.report_cmp(&y.mu));
    let convergence =
        HalfspaceSystem::from_pairs(a.rows(), families.iter().map(|f| (f.mu, f.nu)).collect());
    Ok(PoleReport {
        n: a.rows(),
        r: a.cols(),
        families,
        convergence,
    })
}

/// Whether `sigma` lies in the absolute-convergence region of `ζ_A`.
pub fn convergence_check(a: &SigmaMatrix, sigma: &[f64], cap: SubsetCap) -> Result<bool> {
    check_len(a.rows(), sigma.len())?;
    enumerate_pole_families(a, cap)?.converges_at(sigma)
}

/// The coarse sufficient condition `min_i sigma_i > r`.
pub fn sufficient_box_check(a: &SigmaMatrix, sigma: &[f64]) -> Result<bool> {
    check_len(a.rows(), sigma.len())?;
    let r = a.cols() as f64;
    Ok(sigma.iter().all(|&x| x > r))
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A pole family after the change of variables `s -> B s`: hyperplanes
/// `<normal, s> = nu - l`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedFamily {
    pub normal: Vec<f64>,
    pub nu: u32,
    pub l_range: LRange,
}

/// Replaces every family normal `mu` by `B^t mu`.
pub fn transform_pole_families(
    report: &PoleReport,
    b: &[Vec<f64>],
) -> Result<Vec<TransformedFamily>> {
    let n = report.n;
    check_len(n, b.len())?;
    for row in b {
        check_len(n, row.len())?;
    }
    Ok(report
        .families
        .iter()
        .map(|f| {
            let support = f.mu.support();
            let normal = (0..n)
                .map(|k| support.iter().map(|&i| b[i][k]).sum())
                .collect();
            TransformedFamily {
                normal,
                nu: f.nu,
                l_range: f.l_range.clone(),
            }
        })
        .collect())
}
