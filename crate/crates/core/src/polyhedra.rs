//! The polyhedra `Δ_{C_J} + R^n_+` and two independent ways of deciding
//! membership in them.
//!
//! * [`FlowOracle`] decides whether `sigma` splits as a sum of one point per
//!   column polyhedron `Δ_{C_j} + R^n_+`, which is a transportation problem.
//! * [`HalfspaceOracle`] evaluates the halfspace description
//!   `<mu_K, sigma> > |K|` for every non-empty `K ⊆ J`, plus `sigma > 0`.
//!
//! [`verify_polyhedron_equality`] samples points and compares the two.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flow::{FlowNetwork, FLOW_TOL};
use crate::matrix::{column_supports, ColumnSubset, SigmaMatrix, SubsetCap, SupportVector};
use crate::registry::{Named, Registry};

/// Points closer than this to a constraint hyperplane are numerically
/// ambiguous and skipped by the verification harness.
pub const AMBIGUITY_TOL: f64 = 1e-9;

/// Magnitude of the perturbation applied to boundary samples.
pub const BOUNDARY_PERTURBATION: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strictness {
    /// The open polyhedron (`>` everywhere).
    Strict,
    /// Its closure (`>=` everywhere).
    Closed,
}

/// `<normal, sigma> > rhs` (or `>=` when not strict). Positivity constraints
/// `sigma_i > 0` have a basis-vector normal and `rhs == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfspaceConstraint {
    pub normal: SupportVector,
    pub rhs: u32,
    pub strict: bool,
}

impl HalfspaceConstraint {
    pub fn is_positivity(&self) -> bool {
        self.rhs == 0
    }

    pub fn value(&self, sigma: &[f64]) -> f64 {
        self.normal.dot(sigma) - self.rhs as f64
    }

    pub fn holds(&self, sigma: &[f64], strictness: Strictness) -> bool {
        let v = self.normal.dot(sigma);
        let rhs = self.rhs as f64;
        match (self.strict, strictness) {
            (true, Strictness::Strict) => v > rhs,
            _ => v >= rhs,
        }
    }

    /// Human-readable form using subscripted sigmas, e.g. `σ₁+σ₂>2`.
    pub fn describe(&self) -> String {
        let lhs: Vec<String> = self
            .normal
            .support()
            .iter()
            .map(|&i| format!("σ{}", subscript(i + 1)))
            .collect();
        let op = if self.strict { ">" } else { "≥" };
        format!("{}{}{}", lhs.join("+"), op, self.rhs)
    }
}

fn subscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// A finite intersection of halfspaces in `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceSystem {
    dim: usize,
    constraints: Vec<HalfspaceConstraint>,
}

impl HalfspaceSystem {
    /// Builds a system from deduplicated `(mu, rhs)` pairs plus the
    /// positivity constraints, all strict.
    pub(crate) fn from_pairs(dim: usize, mut pairs: Vec<(SupportVector, u32)>) -> Self {
        pairs.sort_by(|a, b| a.0.report_cmp(&b.0));
        let mut constraints: Vec<HalfspaceConstraint> = pairs
            .into_iter()
            .map(|(normal, rhs)| HalfspaceConstraint {
                normal,
                rhs,
                strict: true,
            })
            .collect();
        constraints.extend((0..dim).map(|i| HalfspaceConstraint {
            normal: SupportVector::from_indices(dim, &[i]).expect("i < dim"),
            rhs: 0,
            strict: true,
        }));
        Self { dim, constraints }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[HalfspaceConstraint] {
        &self.constraints
    }

    /// Constraints other than `sigma_i > 0`.
    pub fn support_constraints(&self) -> impl Iterator<Item = &HalfspaceConstraint> {
        self.constraints.iter().filter(|c| !c.is_positivity())
    }

    pub fn contains(&self, sigma: &[f64], strictness: Strictness) -> Result<bool> {
        check_dim(self.dim, sigma)?;
        Ok(self.constraints.iter().all(|c| c.holds(sigma, strictness)))
    }

    /// First constraint that `sigma` violates, if any.
    pub fn first_violation(
        &self,
        sigma: &[f64],
        strictness: Strictness,
    ) -> Result<Option<&HalfspaceConstraint>> {
        check_dim(self.dim, sigma)?;
        Ok(self
            .constraints
            .iter()
            .find(|c| !c.holds(sigma, strictness)))
    }

    /// Distance in value, `min |<mu, sigma> - rhs|`, to the nearest constraint.
    pub fn min_gap(&self, sigma: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.value(sigma).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_dim(expected: usize, sigma: &[f64]) -> Result<()> {
    if sigma.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: sigma.len(),
        });
    }
    Ok(())
}

fn check_subset(a: &SigmaMatrix, subset: ColumnSubset) -> Result<()> {
    if subset.bits() >> a.cols() != 0 {
        return Err(Error::IndexOutOfRange {
            index: 64 - subset.bits().leading_zeros() as usize,
            len: a.cols(),
        });
    }
    Ok(())
}

/// `mu_K` for every non-empty `K ⊆ J`, deduplicated on the bitset with the
/// largest `|K|` kept.
pub(crate) fn subset_normals(
    supports: &[SupportVector],
    subset: ColumnSubset,
) -> Vec<(SupportVector, u32, Vec<ColumnSubset>)> {
    use std::collections::BTreeMap;
    let j_bits = subset.bits();
    let mut by_mu: BTreeMap<u64, (u32, Vec<ColumnSubset>)> = BTreeMap::new();
    // Enumerate submasks of J.
    let mut k = j_bits;
    while k != 0 {
        let union = crate::matrix::iter_bits(k).fold(0u64, |acc, j| acc | supports[j].bits());
        let size = k.count_ones();
        let entry = by_mu.entry(union).or_insert((0, Vec::new()));
        entry.0 = entry.0.max(size);
        entry
            .1
            .push(ColumnSubset::new(k, crate::matrix::MAX_SUBSET_SIZE).expect("submask of J"));
        k = (k - 1) & j_bits;
    }
    let dim = supports[0].dim();
    by_mu
        .into_iter()
        .map(|(bits, (nu, mut witnesses))| {
            witnesses.sort_by(|a, b| a.len().cmp(&b.len()).then(a.indices().cmp(&b.indices())));
            (
                SupportVector::new(dim, bits).expect("union of nonempty supports"),
                nu,
                witnesses,
            )
        })
        .collect()
}

/// The halfspace description of `Δ_{C_J} + R^n_+`: `<mu_K, sigma> > |K|` for
/// every non-empty `K ⊆ J` (deduplicated) and `sigma_i > 0`.
pub fn halfspace_description(
    a: &SigmaMatrix,
    subset: ColumnSubset,
    cap: SubsetCap,
) -> Result<HalfspaceSystem> {
    check_subset(a, subset)?;
    cap.check(subset.len())?;
    let supports = column_supports(a);
    let pairs = subset_normals(&supports, subset)
        .into_iter()
        .map(|(mu, nu, _)| (mu, nu))
        .collect();
    Ok(HalfspaceSystem::from_pairs(a.rows(), pairs))
}

/// Decides `sigma ∈ Δ_{C_J} + R^n_+` (or its closure) with the
/// transportation network of the columns in `J`.
pub fn membership_flow(
    a: &SigmaMatrix,
    subset: ColumnSubset,
    sigma: &[f64],
    strictness: Strictness,
) -> Result<bool> {
    FlowMembership::new(a, subset)?.contains(sigma, strictness)
}

/// A membership test prepared for a fixed `(A, J)`.
pub trait Membership {
    fn contains(&self, sigma: &[f64], strictness: Strictness) -> Result<bool>;
}

impl Membership for HalfspaceSystem {
    fn contains(&self, sigma: &[f64], strictness: Strictness) -> Result<bool> {
        HalfspaceSystem::contains(self, sigma, strictness)
    }
}

/// Flow-based membership for a fixed `(A, J)`.
#[derive(Clone, Debug)]
pub struct FlowMembership {
    dim: usize,
    sets: Vec<SupportVector>,
}

impl FlowMembership {
    pub fn new(a: &SigmaMatrix, subset: ColumnSubset) -> Result<Self> {
        check_subset(a, subset)?;
        let supports = column_supports(a);
        Ok(Self {
            dim: a.rows(),
            sets: subset.indices().into_iter().map(|j| supports[j]).collect(),
        })
    }

    fn network(&self, sigma: &[f64]) -> Result<FlowNetwork> {
        FlowNetwork::new(self.sets.clone(), sigma.to_vec())
    }
}

impl Membership for FlowMembership {
    fn contains(&self, sigma: &[f64], strictness: Strictness) -> Result<bool> {
        check_dim(self.dim, sigma)?;
        match strictness {
            Strictness::Closed => {
                if sigma.iter().any(|&x| x.is_nan() || x < 0.0) {
                    return Ok(false);
                }
                Ok(self.network(sigma)?.is_saturating())
            }
            Strictness::Strict => {
                if sigma.iter().any(|&x| x.is_nan() || x <= 0.0) {
                    return Ok(false);
                }
                // Interior iff every Hall inequality has positive slack, i.e.
                // sigma - delta * 1 stays feasible for some delta > 0.
                let (slack, _) = self.network(sigma)?.min_hall_slack();
                Ok(slack > FLOW_TOL)
            }
        }
    }
}

/// A named way of building a [`Membership`] test for `(A, J)`.
pub trait MembershipOracle: Named + Send + Sync {
    fn prepare(
        &self,
        a: &SigmaMatrix,
        subset: ColumnSubset,
        cap: SubsetCap,
    ) -> Result<Box<dyn Membership>>;
}

pub struct FlowOracle;

impl Named for FlowOracle {
    fn name(&self) -> &'static str {
        "flow"
    }
}

impl MembershipOracle for FlowOracle {
    fn prepare(
        &self,
        a: &SigmaMatrix,
        subset: ColumnSubset,
        _cap: SubsetCap,
    ) -> Result<Box<dyn Membership>> {
        Ok(Box::new(FlowMembership::new(a, subset)?))
    }
}

pub struct HalfspaceOracle;

impl Named for HalfspaceOracle {
    fn name(&self) -> &'static str {
        "halfspace"
    }
}

impl MembershipOracle for HalfspaceOracle {
    fn prepare(
        &self,
        a: &SigmaMatrix,
        subset: ColumnSubset,
        cap: SubsetCap,
    ) -> Result<Box<dyn Membership>> {
        Ok(Box::new(halfspace_description(a, subset, cap)?))
    }
}

pub fn membership_oracles() -> Registry<dyn MembershipOracle> {
    Registry::<dyn MembershipOracle>::new()
        .with(Box::new(FlowOracle))
        .with(Box::new(HalfspaceOracle))
        .with_default("flow")
}

/// Outcome of comparing two membership oracles on sampled points.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub subset: ColumnSubset,
    pub samples: usize,
    pub agree: usize,
    /// Samples skipped because they lie within [`AMBIGUITY_TOL`] of a
    /// constraint.
    pub discarded: usize,
    /// Points where the oracles disagree, sorted lexicographically.
    pub disagree: Vec<Vec<f64>>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.disagree.is_empty()
    }
}

/// Compares the flow oracle against the halfspace description of
/// `Δ_{C_J} + R^n_+` on `sample_count` points. Half of the points are uniform
/// in `[0, 2|J|]^n`; the rest lie within [`BOUNDARY_PERTURBATION`] of a
/// randomly chosen constraint hyperplane. Both the open set and its closure
/// are compared. Deterministic in `seed`.
pub fn verify_polyhedron_equality(
    a: &SigmaMatrix,
    subset: ColumnSubset,
    sample_count: usize,
    seed: u64,
    cap: SubsetCap,
) -> Result<VerificationReport> {
    verify_with(
        &FlowOracle,
        &HalfspaceOracle,
        a,
        subset,
        sample_count,
        seed,
        cap,
    )
}

pub fn verify_with(
    candidate: &dyn MembershipOracle,
    reference: &dyn MembershipOracle,
    a: &SigmaMatrix,
    subset: ColumnSubset,
    sample_count: usize,
    seed: u64,
    cap: SubsetCap,
) -> Result<VerificationReport> {
    if sample_count == 0 {
        return Err(Error::InvalidParameter(
            "sample_count must be at least 1".into(),
        ));
    }
    let system = halfspace_description(a, subset, cap)?;
    let lhs = candidate.prepare(a, subset, cap)?;
    let rhs = reference.prepare(a, subset, cap)?;
    let n = a.rows();
    let side = 2.0 * subset.len() as f64;
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ subset.bits().wrapping_mul(0x9E37_79B9_7F4A_7C15));

    let mut report = VerificationReport {
        subset,
        samples: sample_count,
        agree: 0,
        discarded: 0,
        disagree: Vec::new(),
    };
    for k in 0..sample_count {
        let mut sigma: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=side)).collect();
        if k % 2 == 1 {
            let c = system.constraints()[rng.gen_range(0..system.constraints().len())];
            let size = c.normal.len() as f64;
            let shift = -c.value(&sigma) / size;
            let t = rng.gen_range(-BOUNDARY_PERTURBATION..=BOUNDARY_PERTURBATION) / size.sqrt();
            for i in c.normal.support() {
                sigma[i] += shift + t;
            }
        }
        if system.min_gap(&sigma) <= AMBIGUITY_TOL {
            report.discarded += 1;
            continue;
        }
        let mut agrees = true;
        for strictness in [Strictness::Strict, Strictness::Closed] {
            if lhs.contains(&sigma, strictness)? != rhs.contains(&sigma, strictness)? {
                agrees = false;
            }
        }
        if agrees {
            report.agree += 1;
        } else {
            report.disagree.push(sigma);
        }
    }
    report.disagree.sort_by(|x, y| {
        x.iter()
            .zip(y)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(report)
}
