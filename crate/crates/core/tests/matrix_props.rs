mod common;

use proptest::prelude::*;

use shintani_core::matrix::{
    column_supports, matrix_from_supports, skeleton, validate_matrix, SupportVector,
};

fn supports(max_n: usize) -> impl Strategy<Value = (usize, Vec<SupportVector>)> {
    (2..=max_n).prop_flat_map(|n| {
        let full = (1u64 << n) - 1;
        (
            Just(n),
            proptest::collection::vec(
                (1u64..=full).prop_filter("at least two coordinates", |b| b.count_ones() >= 2),
                0..5,
            ),
        )
            .prop_map(|(n, masks)| {
                (
                    n,
                    masks
                        .into_iter()
                        .map(|b| SupportVector::new(n, b).unwrap())
                        .collect(),
                )
            })
    })
}

proptest! {
    #[test]
    fn skeleton_is_idempotent(a in common::matrix(5, 0.001, 10.0)) {
        let sk = skeleton(&a);
        prop_assert_eq!(skeleton(&sk), sk.clone());
        prop_assert_eq!(column_supports(&a), column_supports(&sk));
    }

    #[test]
    fn matrix_from_supports_is_valid((n, mus) in supports(6)) {
        let a = matrix_from_supports(&mus, n).unwrap();
        prop_assert!(validate_matrix(a.to_rows()).is_ok());
        let mut want = mus.clone();
        want.push(SupportVector::full(n).unwrap());
        prop_assert_eq!(column_supports(&a), want);
    }

    #[test]
    fn row_and_column_permutations_permute_supports(
        a in common::matrix(5, 0.1, 3.0),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..a.cols()).collect();
        perm.shuffle(&mut rng);
        let b = a.permute_cols(&perm).unwrap();
        let sa = column_supports(&a);
        let sb = column_supports(&b);
        for (j, &p) in perm.iter().enumerate() {
            prop_assert_eq!(sb[j], sa[p]);
        }
    }
}
