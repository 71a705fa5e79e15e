//! Splitting a weight vector `sigma` over a set family `S_1..S_m` so that
//! every set receives at least unit mass on its own coordinates.
//!
//! A decomposition exists iff `sigma(∪_{k∈K} S_k) >= |K|` for every
//! non-empty `K` (see [`hall`]). Two constructors are provided behind the
//! [`Decomposer`] trait: the intersection-graph redistribution in [`graph`]
//! and a max-flow constructor in [`transport`]. The strict variant (every
//! bound strict, every entry positive) is derived from the non-strict one by
//! shrinking `sigma` and spreading the shrinkage back over all parts.

use std::fmt;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::matrix::{SigmaMatrix, SupportVector, MAX_DIM, MAX_SUBSET_SIZE};
use crate::registry::{Named, Registry};

pub mod graph;
pub mod hall;
pub mod transport;

pub use graph::{GraphDecomposer, IntersectionGraph};
pub use hall::{check_hall_condition, hall_checkers, HallChecker, HallReport, HALL_TOL};
pub use transport::FlowDecomposer;

/// Per-coordinate tolerance on `Σ_j sigma_j = sigma`.
pub const SUM_TOL: f64 = 1e-9;

/// Tolerance on the per-set bound in the non-strict variant.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct WeightInstance {
    n: usize,
    sets: Vec<SupportVector>,
    sigma: Vec<f64>,
    strict: bool,
}

impl WeightInstance {
    /// Builds an instance from 1-based coordinate lists.
    pub fn new(n: usize, sets: &[Vec<usize>], sigma: Vec<f64>, strict: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: n,
                max: MAX_DIM,
            });
        }
        let mut supports = Vec::with_capacity(sets.len());
        for set in sets {
            let mut zero_based = Vec::with_capacity(set.len());
            for &i in set {
                if i == 0 || i > n {
                    return Err(Error::IndexOutOfRange { index: i, len: n });
                }
                zero_based.push(i - 1);
            }
            supports.push(SupportVector::from_indices(n, &zero_based)?);
        }
        Self::from_supports(supports, sigma, strict)
    }

    pub fn from_supports(sets: Vec<SupportVector>, sigma: Vec<f64>, strict: bool) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::EmptySubset);
        }
        if sets.len() > MAX_SUBSET_SIZE {
            return Err(Error::DimensionTooLarge {
                dim: sets.len(),
                max: MAX_SUBSET_SIZE,
            });
        }
        let n = sigma.len();
        for s in &sets {
            if s.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: s.dim(),
                    found: n,
                });
            }
            if s.is_empty() {
                return Err(Error::EmptySupport);
            }
        }
        for (i, &x) in sigma.iter().enumerate() {
            let ok = if strict { x > 0.0 } else { x >= 0.0 };
            if !x.is_finite() || !ok {
                return Err(Error::InvalidParameter(format!(
                    "sigma[{}] = {} must be {}",
                    i + 1,
                    x,
                    if strict { "positive" } else { "non-negative" }
                )));
            }
        }
        Ok(Self {
            n,
            sets,
            sigma,
            strict,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[SupportVector] {
        &self.sets
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    /// 1-based coordinate lists, as in the JSON format.
    pub fn sets_one_based(&self) -> Vec<Vec<usize>> {
        self.sets
            .iter()
            .map(|s| s.support().into_iter().map(|i| i + 1).collect())
            .collect()
    }

    /// Same sets with a different weight vector and strictness.
    pub fn with_sigma(&self, sigma: Vec<f64>, strict: bool) -> Result<Self> {
        Self::from_supports(self.sets.clone(), sigma, strict)
    }

    pub(crate) fn network(&self) -> FlowNetwork {
        FlowNetwork::new(self.sets.clone(), self.sigma.clone()).expect("validated instance")
    }

    /// `sigma(∪_{k∈K} S_k) - |K|` for 0-based `K`.
    pub fn slack_of(&self, k: &[usize]) -> f64 {
        self.network().hall_slack_of(k)
    }
}

/// The `n × m` 0/1 matrix whose column `j` is the indicator of `S_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacteristicMatrix {
    rows: Vec<Vec<u8>>,
}

impl CharacteristicMatrix {
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// The matrix as a [`SigmaMatrix`], valid when every coordinate belongs
    /// to some set.
    pub fn to_sigma_matrix(&self) -> Result<SigmaMatrix> {
        crate::matrix::validate_matrix(
            self.rows
                .iter()
                .map(|r| r.iter().map(|&x| x as f64).collect())
                .collect(),
        )
    }
}

pub fn characteristic_matrix(inst: &WeightInstance) -> CharacteristicMatrix {
    let rows = (0..inst.n)
        .map(|i| inst.sets.iter().map(|s| s.contains(i) as u8).collect())
        .collect();
    CharacteristicMatrix { rows }
}

/// `sigma_1..sigma_m`, one vector per set.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub parts: Vec<Vec<f64>>,
}

/// Why a [`Decomposition`] fails to be valid for an instance. Indices are
/// 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Defect {
    Shape,
    SumMismatch {
        coord: usize,
        error: f64,
    },
    Negative {
        part: usize,
        coord: usize,
        value: f64,
    },
    BoundNotMet {
        part: usize,
        mass: f64,
    },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Shape => write!(f, "wrong number or length of parts"),
            Defect::SumMismatch { coord, error } => {
                write!(
                    f,
                    "parts do not sum to sigma at coordinate {coord} (error {error:e})"
                )
            }
            Defect::Negative { part, coord, value } => {
                write!(f, "part {part} has entry {value} at coordinate {coord}")
            }
            Defect::BoundNotMet { part, mass } => {
                write!(f, "part {part} has mass {mass} on its own set")
            }
        }
    }
}

impl Decomposition {
    /// Mass of part `j` on `S_j`.
    pub fn own_mass(&self, inst: &WeightInstance, j: usize) -> f64 {
        inst.sets[j].dot(&self.parts[j])
    }

    /// Checks `Σ sigma_j = sigma` to [`SUM_TOL`], non-negativity and the
    /// per-set bounds. The strict variant demands positive entries and
    /// own-set mass strictly above 1.
    pub fn validate(&self, inst: &WeightInstance) -> std::result::Result<(), Defect> {
        if self.parts.len() != inst.m() || self.parts.iter().any(|p| p.len() != inst.n) {
            return Err(Defect::Shape);
        }
        for i in 0..inst.n {
            let total: f64 = self.parts.iter().map(|p| p[i]).sum();
            let error = (total - inst.sigma[i]).abs();
            if error.is_nan() || error > SUM_TOL {
                return Err(Defect::SumMismatch {
                    coord: i + 1,
                    error,
                });
            }
        }
        for (j, p) in self.parts.iter().enumerate() {
            for (i, &x) in p.iter().enumerate() {
                let ok = if inst.strict { x > 0.0 } else { x >= 0.0 };
                if !ok {
                    return Err(Defect::Negative {
                        part: j + 1,
                        coord: i + 1,
                        value: x,
                    });
                }
            }
            let mass = self.own_mass(inst, j);
            let ok = if inst.strict {
                mass > 1.0
            } else {
                mass >= 1.0 - BOUND_TOL
            };
            if !ok {
                return Err(Defect::BoundNotMet { part: j + 1, mass });
            }
        }
        Ok(())
    }
}

/// A constructor of decompositions.
pub trait Decomposer: Named + Send + Sync {
    /// Decomposes a Hall-feasible instance, ignoring its strictness flag.
    fn decompose_non_strict(&self, inst: &WeightInstance) -> Result<Decomposition>;

    /// Checks the Hall condition, decomposes, and validates the result. Strict
    /// instances are shrunk by `lambda`, decomposed non-strictly, and
    /// `lambda / m` is added back to every part.
    fn decompose(&self, inst: &WeightInstance) -> Result<Decomposition> {
        let hall = check_hall_condition(inst)?;
        if !hall.feasible {
            return Err(hall.into_error());
        }
        let out = if inst.strict {
            let lambda = strict_shrink(inst, hall.slack);
            let shrunk: Vec<f64> = inst.sigma.iter().zip(&lambda).map(|(s, l)| s - l).collect();
            let inner = inst.with_sigma(shrunk, false)?;
            let mut d = self.decompose_non_strict(&inner)?;
            let m = inst.m() as f64;
            for p in &mut d.parts {
                for (x, l) in p.iter_mut().zip(&lambda) {
                    *x += l / m;
                }
            }
            d
        } else {
            self.decompose_non_strict(inst)?
        };
        out.validate(inst).map_err(|d| {
            Error::Internal(format!(
                "{} produced an invalid decomposition: {d}",
                self.name()
            ))
        })?;
        Ok(out)
    }
}

/// Shrinkage `lambda_i = min(delta / (2n), sigma_i / 2)` with `delta` half the
/// minimal Hall slack. Every Hall slack of `sigma - lambda` stays at least
/// `3/4` of the original minimum.
fn strict_shrink(inst: &WeightInstance, slack: f64) -> Vec<f64> {
    let delta = slack / 2.0;
    let uniform = delta / (2.0 * inst.n as f64);
    inst.sigma.iter().map(|&s| uniform.min(s / 2.0)).collect()
}

pub fn decomposers() -> Registry<dyn Decomposer> {
    Registry::<dyn Decomposer>::new()
        .with(Box::new(GraphDecomposer::default()))
        .with(Box::new(FlowDecomposer))
        .with_default("graph")
}

/// The intersection-graph algorithm.
pub fn decompose_graph(inst: &WeightInstance) -> Result<Decomposition> {
    GraphDecomposer::default().decompose(inst)
}

/// The max-flow constructor.
pub fn decompose_flow(inst: &WeightInstance) -> Result<Decomposition> {
    FlowDecomposer.decompose(inst)
}
