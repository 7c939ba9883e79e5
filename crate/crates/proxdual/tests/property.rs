//! Property tests over arbitrary inputs for the separable operators and the
//! sparse simplex specialist.

use nalgebra::DVector;
use proptest::prelude::*;
use proxdual::problems::sparse_simplex_project;
use proxdual::proxlib::{hard_threshold, positive_part_topk};

fn vector(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0f64..50.0, 1..=max_len)
}

proptest! {
    #[test]
    fn hard_threshold_is_idempotent_and_never_grows_entries(
        z in vector(12),
        lambda in 0.01f64..4.0,
    ) {
        let z = DVector::from_vec(z);
        let once = hard_threshold(&z, lambda).unwrap();
        let twice = hard_threshold(&once.point, lambda).unwrap();
        prop_assert_eq!(&twice.point, &once.point);
        for i in 0..z.len() {
            prop_assert!(once.point[i] == 0.0 || once.point[i] == z[i]);
        }
        prop_assert!(once.envelope >= 0.0);
    }

    #[test]
    fn topk_output_is_feasible_and_idempotent(
        z in vector(10),
        k in 1usize..6,
    ) {
        prop_assume!(k <= z.len());
        let z = DVector::from_vec(z);
        let res = positive_part_topk(&z, k).unwrap();
        prop_assert!(res.point.iter().all(|&v| v >= 0.0));
        prop_assert!(res.point.iter().filter(|&&v| v != 0.0).count() <= k);
        let twice = positive_part_topk(&res.point, k).unwrap();
        prop_assert_eq!(&twice.point, &res.point);
    }

    #[test]
    fn sparse_simplex_projection_lands_on_the_set(
        z in vector(9),
        k in 1usize..4,
    ) {
        prop_assume!(k < z.len());
        let z = DVector::from_vec(z);
        let (x, y) = sparse_simplex_project(&z, k).unwrap();
        prop_assert!((x.sum() - 1.0).abs() <= 1e-12 * (1.0 + z.norm()));
        prop_assert!(x.iter().all(|&v| v >= 0.0));
        prop_assert!(x.iter().filter(|&&v| v != 0.0).count() <= k);
        // the multiplier satisfies the root equation e^T [(z + e y)^+]_k = 1
        let shifted = DVector::from_fn(z.len(), |i, _| z[i] + y);
        let proj = positive_part_topk(&shifted, k).unwrap();
        prop_assert!((proj.point.sum() - 1.0).abs() <= 1e-10 * (1.0 + z.norm()));
    }
}
