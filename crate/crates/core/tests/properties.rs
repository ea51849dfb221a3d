//! Property tests for the projection operators and array responses.

use proptest::prelude::*;

use cogmimo::channel::ula_response;
use cogmimo::numerics::ComplexMatrix;
use cogmimo::projections::{project_unit_modulus, TraceConstraintSet};
use cogmimo::rng::SeededRng;
use cogmimo::{CMat, Real};

fn random_matrix(rows: usize, cols: usize, seed: u64, scale: Real) -> CMat {
    let mut rng = SeededRng::from_seed(seed);
    CMat::random_gaussian(rows, cols, &mut rng).scale_real(scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_modulus_projection_is_idempotent_with_unit_entries(
        rows in 1usize..6,
        cols in 1usize..6,
        seed in 0u64..1_000_000,
    ) {
        let a = random_matrix(rows, cols, seed, 1.0);
        let p = project_unit_modulus(&a);
        for z in p.entries_row_major() {
            let m = z.norm();
            prop_assert!(m == 0.0 || (m - 1.0).abs() < 1e-14);
        }
        let pp = project_unit_modulus(&p);
        prop_assert!(p.dist_frob(&pp) < 1e-14);
    }

    #[test]
    fn ula_response_unit_norm_and_periodic(
        elements in 1usize..24,
        phi in -10.0f64..10.0,
        spacing in 0.05f64..1.0,
    ) {
        let a = ula_response::<Real>(elements, phi, spacing);
        prop_assert!((a.frob_norm() - 1.0).abs() < 1e-12);
        let b = ula_response::<Real>(elements, phi + std::f64::consts::TAU, spacing);
        prop_assert!(a.dist_frob(&b) < 1e-9);
    }

    #[test]
    fn trace_projection_feasible_idempotent_nonexpansive(
        t_s in 2usize..7,
        cols in 1usize..4,
        seed in 0u64..1_000_000,
        scale in 0.2f64..4.0,
    ) {
        let mut rng = SeededRng::from_seed(seed);
        let h = ComplexMatrix::random_gaussian(2, t_s, &mut rng);
        let set = TraceConstraintSet::new(h.clone(), 1.0, 0.5).unwrap();
        let a = ComplexMatrix::random_gaussian(t_s, cols, &mut rng).scale_real(scale);
        let b = ComplexMatrix::random_gaussian(t_s, cols, &mut rng).scale_real(scale);
        let pa = set.project(&a).unwrap();
        let pb = set.project(&b).unwrap();
        prop_assert!(pa.frob_norm_sq() <= 1.0 + 1e-9);
        prop_assert!((&h * &pa).frob_norm_sq() <= 0.5 * (1.0 + 1e-9));
        prop_assert!(set.project(&pa).unwrap().dist_frob(&pa) < 1e-9);
        prop_assert!(pa.dist_frob(&pb) <= a.dist_frob(&b) + 1e-9);
    }
}
