//! The Hall-type condition `sigma(∪_{k∈K} S_k) >= |K|` for all non-empty `K`.

use crate::error::{Error, Result};
use crate::matrix::{iter_bits, SubsetCap};
use crate::registry::{Named, Registry};

use super::WeightInstance;

/// A strict instance is feasible iff its minimal slack exceeds this; a
/// non-strict one iff the slack is at least its negative.
pub const HALL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct HallReport {
    pub feasible: bool,
    /// A minimizing `K` (0-based) when infeasible.
    pub violating: Option<Vec<usize>>,
    /// `min over non-empty K of sigma(∪ S_K) - |K|`.
    pub slack: f64,
    /// Minimizing `K` (0-based), reported whether or not feasible.
    pub argmin: Vec<usize>,
}

impl HallReport {
    fn new(inst: &WeightInstance, slack: f64, argmin: Vec<usize>) -> Self {
        let feasible = if inst.strict() {
            slack > HALL_TOL
        } else {
            slack >= -HALL_TOL
        };
        Self {
            feasible,
            violating: (!feasible).then(|| argmin.clone()),
            slack,
            argmin,
        }
    }

    /// The infeasibility error, with `K` 1-based.
    pub fn into_error(self) -> Error {
        Error::InfeasibleInstance {
            violating: self.argmin.iter().map(|k| k + 1).collect(),
            slack: self.slack,
        }
    }
}

pub trait HallChecker: Named + Send + Sync {
    fn check(&self, inst: &WeightInstance) -> Result<HallReport>;
}

/// Enumerates all `2^m - 1` subsets. Ties go to the smallest bitmask.
pub struct ExhaustiveHall {
    pub cap: SubsetCap,
}

impl Named for ExhaustiveHall {
    fn name(&self) -> &'static str {
        "exhaustive"
    }
}

impl HallChecker for ExhaustiveHall {
    fn check(&self, inst: &WeightInstance) -> Result<HallReport> {
        let m = inst.m();
        self.cap.check(m)?;
        let sigma = inst.sigma();
        let mut unions = vec![0u64; 1 << m];
        let mut best = (f64::INFINITY, 0u64);
        for k in 1u64..(1 << m) {
            let low = k.trailing_zeros() as usize;
            let union = unions[(k & (k - 1)) as usize] | inst.sets()[low].bits();
            unions[k as usize] = union;
            let mass: f64 = iter_bits(union).map(|i| sigma[i]).sum();
            let slack = mass - k.count_ones() as f64;
            if slack < best.0 {
                best = (slack, k);
            }
        }
        Ok(HallReport::new(inst, best.0, iter_bits(best.1).collect()))
    }
}

/// One forced minimum cut per set; polynomial in `m`.
pub struct MinCutHall;

impl Named for MinCutHall {
    fn name(&self) -> &'static str {
        "min-cut"
    }
}

impl HallChecker for MinCutHall {
    fn check(&self, inst: &WeightInstance) -> Result<HallReport> {
        let (slack, k) = inst.network().min_hall_slack();
        Ok(HallReport::new(inst, slack, k))
    }
}

pub fn hall_checkers() -> Registry<dyn HallChecker> {
    Registry::<dyn HallChecker>::new()
        .with(Box::new(ExhaustiveHall {
            cap: SubsetCap::default(),
        }))
        .with(Box::new(MinCutHall))
}

/// Exhaustive for `m <= 20`, min-cut otherwise.
pub fn check_hall_condition(inst: &WeightInstance) -> Result<HallReport> {
    if inst.m() <= SubsetCap::DEFAULT {
        ExhaustiveHall {
            cap: SubsetCap::default(),
        }
        .check(inst)
    } else {
        MinCutHall.check(inst)
    }
}
