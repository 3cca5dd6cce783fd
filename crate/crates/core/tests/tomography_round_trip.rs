use std::sync::Arc;

use gfwigner::field::{make_field, ordering, OrderStrategy};
use gfwigner::phase_space::build_mubs;
use gfwigner::random::{random_density, rng};
use gfwigner::rotations::canonical_rotation_set;
use gfwigner::tomography::{reconstruct, round_trip_error, tomogram_of};

#[test]
fn hundred_states_per_dimension() {
    for (p, n) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2)] {
        let f = make_field(p, n, None).unwrap();
        let o = Arc::new(ordering(&f, OrderStrategy::PrimitivePower { primitive: None }).unwrap());
        let r = canonical_rotation_set(&f, None).unwrap();
        let m = build_mubs(&o, &r).unwrap();
        let mut g = rng(u64::from(p * 10 + n));
        for _ in 0..100 {
            let rho = random_density(&o, &mut g);
            assert!(round_trip_error(&rho, &m).unwrap() < 1e-9);
            let rec = reconstruct(&tomogram_of(&rho, &m).unwrap(), &o, &r).unwrap();
            assert!(rec.f00_discrepancy < 1e-12 && rec.asymmetry < 1e-12);
        }
    }
}
