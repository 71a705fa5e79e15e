#![allow(dead_code)]

use proptest::prelude::*;

use shintani_core::matrix::{validate_matrix, SigmaMatrix, SupportVector};
use shintani_core::weights::WeightInstance;

fn matrix_from<E>(max_dim: usize, entry: E) -> impl Strategy<Value = SigmaMatrix>
where
    E: Strategy<Value = f64> + Clone,
{
    (1..=max_dim, 1..=max_dim)
        .prop_flat_map(move |(n, r)| {
            proptest::collection::vec(proptest::collection::vec(entry.clone(), r), n)
        })
        .prop_filter_map("zero row or column", |rows| validate_matrix(rows).ok())
}

/// Valid matrices with `n, r` in `1..=max_dim` and positive entries drawn
/// from `lo..hi`; roughly half of the entries are zero.
pub fn matrix(max_dim: usize, lo: f64, hi: f64) -> impl Strategy<Value = SigmaMatrix> {
    matrix_from(max_dim, prop_oneof![Just(0.0), lo..hi])
}

pub fn binary_matrix(max_dim: usize) -> impl Strategy<Value = SigmaMatrix> {
    matrix_from(max_dim, prop_oneof![Just(0.0), Just(1.0)])
}

/// A point with coordinates in `[0, hi)`.
pub fn point(n: usize, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0..hi, n)
}

pub fn instance(max_n: usize, max_m: usize, scale: f64) -> impl Strategy<Value = WeightInstance> {
    (1..=max_n, 1..=max_m).prop_flat_map(move |(n, m)| {
        (
            proptest::collection::vec(1u64..(1 << n), m),
            proptest::collection::vec(0.0..scale, n),
            any::<bool>(),
        )
            .prop_map(move |(masks, sigma, strict)| {
                let sets = masks
                    .into_iter()
                    .map(|b| SupportVector::new(n, b).unwrap())
                    .collect();
                WeightInstance::from_supports(sets, sigma, strict).unwrap()
            })
    })
}

/// Instances built from an explicit decomposition, so always feasible. Some
/// parts carry mass exactly one.
pub fn feasible_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = WeightInstance> {
    (1..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        proptest::collection::vec(
            (
                1u64..(1 << n),
                proptest::collection::vec(0.01f64..1.0, n),
                prop_oneof![Just(1.0), 1.0f64..2.0],
            ),
            m,
        )
        .prop_map(move |parts| {
            let mut sigma = vec![0.0; n];
            let mut sets = Vec::new();
            for (mask, weights, mass) in parts {
                let set = SupportVector::new(n, mask).unwrap();
                let total: f64 = set.support().iter().map(|&i| weights[i]).sum();
                for i in set.support() {
                    sigma[i] += mass * weights[i] / total;
                }
                sets.push(set);
            }
            WeightInstance::from_supports(sets, sigma, false).unwrap()
        })
    })
}
