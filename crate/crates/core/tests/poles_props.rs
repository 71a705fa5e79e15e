mod common;

use proptest::prelude::*;

use shintani_core::matrix::{skeleton, ColumnSubset, SubsetCap};
use shintani_core::poles::{
    convergence_check, enumerate_pole_families, mu_vector, sufficient_box_check, LRange,
};
use shintani_core::polyhedra::{membership_flow, Strictness};

fn cap() -> SubsetCap {
    SubsetCap::default()
}

proptest! {
    #[test]
    fn skeleton_invariance(a in common::matrix(5, 0.001, 10.0)) {
        prop_assert_eq!(
            enumerate_pole_families(&a, cap()).unwrap(),
            enumerate_pole_families(&skeleton(&a), cap()).unwrap()
        );
    }

    #[test]
    fn families_are_consistent_with_witnesses(a in common::binary_matrix(5)) {
        let rep = enumerate_pole_families(&a, cap()).unwrap();
        let mut seen = Vec::new();
        for f in &rep.families {
            prop_assert!(!seen.contains(&f.mu));
            seen.push(f.mu);
            prop_assert!(!f.witnesses.is_empty());
            for w in &f.witnesses {
                prop_assert_eq!(mu_vector(&a, *w).unwrap(), f.mu);
            }
            let largest = f.witnesses.iter().map(ColumnSubset::len).max().unwrap();
            prop_assert_eq!(f.nu as usize, largest);
            match &f.l_range {
                LRange::Finite(ls) => {
                    prop_assert!(f.mu.is_basis_vector());
                    prop_assert_eq!(ls.clone(), (0..f.nu).collect::<Vec<_>>());
                }
                LRange::All => prop_assert!(!f.mu.is_basis_vector()),
            }
        }
        // Every non-empty J has its mu among the families.
        for j in ColumnSubset::all_nonempty(a.cols()) {
            let mu = mu_vector(&a, j).unwrap();
            prop_assert!(seen.contains(&mu));
        }
    }

    #[test]
    fn adding_a_column_never_shrinks_the_support(a in common::binary_matrix(5), bits in any::<u64>(), extra in 0usize..5) {
        let r = a.cols();
        let j = ColumnSubset::new((bits & ((1 << r) - 1)).max(1), r).unwrap();
        let bigger = ColumnSubset::new(j.bits() | 1 << (extra % r), r).unwrap();
        let small = mu_vector(&a, j).unwrap();
        let large = mu_vector(&a, bigger).unwrap();
        prop_assert_eq!(small.union(&large), large);
    }

    #[test]
    fn box_region_converges(a in common::matrix(5, 0.1, 5.0), excess in common::point(5, 3.0)) {
        let r = a.cols() as f64;
        let sigma: Vec<f64> = excess[..a.rows()].iter().map(|e| r + 1e-6 + e).collect();
        prop_assert!(sufficient_box_check(&a, &sigma).unwrap());
        prop_assert!(convergence_check(&a, &sigma, cap()).unwrap());
    }

    #[test]
    fn convergence_is_membership_for_every_subset(a in common::matrix(4, 0.1, 5.0), sigma in common::point(4, 4.0)) {
        let sigma = &sigma[..a.rows()];
        let all = ColumnSubset::all_nonempty(a.cols())
            .all(|j| membership_flow(&a, j, sigma, Strictness::Strict).unwrap());
        prop_assert_eq!(convergence_check(&a, sigma, cap()).unwrap(), all);
    }
}

#[test]
fn convergence_respects_the_subset_cap() {
    let a = shintani_core::matrix::validate_matrix(vec![vec![1.0; 4]]).unwrap();
    let cap = SubsetCap::new(3).unwrap();
    assert!(matches!(
        convergence_check(&a, &[5.0], cap),
        Err(shintani_core::Error::SubsetCapExceeded { size: 4, cap: 3 })
    ));
}
