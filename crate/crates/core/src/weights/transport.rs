use crate::error::Result;
use crate::flow::FLOW_TOL;
use crate::registry::Named;

use super::hall::HallReport;
use super::{Decomposer, Decomposition, WeightInstance};

/// Ships one unit from every set to its coordinates through the transportation
/// network and gives whatever `sigma` is left over to the last set.
pub struct FlowDecomposer;

impl Named for FlowDecomposer {
    fn name(&self) -> &'static str {
        "flow"
    }
}

impl Decomposer for FlowDecomposer {
    fn decompose_non_strict(&self, inst: &WeightInstance) -> Result<Decomposition> {
        let net = inst.network();
        let sol = net.solve();
        let m = inst.m();
        if sol.value < m as f64 - FLOW_TOL {
            let (slack, k) = net.min_hall_slack();
            return Err(HallReport {
                feasible: false,
                violating: Some(k.clone()),
                slack,
                argmin: k,
            }
            .into_error());
        }
        let mut parts = sol.assignment;
        for i in 0..inst.n() {
            let used: f64 = parts.iter().map(|p| p[i]).sum();
            parts[m - 1][i] += (inst.sigma()[i] - used).max(0.0);
        }
        Ok(Decomposition { parts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::tests::worked_instance;

    #[test]
    fn worked_example_is_valid() {
        let inst = worked_instance();
        let d = FlowDecomposer.decompose(&inst).unwrap();
        assert_eq!(d.validate(&inst), Ok(()));
    }

    #[test]
    fn tight_identity_instance() {
        let inst = WeightInstance::new(2, &[vec![1], vec![2]], vec![1.0, 1.0], false).unwrap();
        let d = FlowDecomposer.decompose(&inst).unwrap();
        assert_eq!(d.parts, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn residual_goes_to_last_set() {
        let inst = WeightInstance::new(2, &[vec![1, 2], vec![2]], vec![1.0, 3.0], false).unwrap();
        let d = FlowDecomposer.decompose(&inst).unwrap();
        assert_eq!(d.validate(&inst), Ok(()));
        let total: f64 = d.parts[0].iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
