use hirschlab::hirsch::{cone_commutation, extend_map, stabilized_cohomology, ConeSign, StabilizeParams};
use hirschlab::random::Sampler;

#[test]
fn random_cones_commute_only_with_the_minus_sign() {
    let mut s = Sampler::new(2024);
    let mut plus_failures = 0;
    for k in 0..20 {
        let (src, tgt, f) = s.compatible_pair(1 + k % 2, 6);
        let n = 1 + k % 4;
        let good = cone_commutation(&f, &src, &tgt, n, ConeSign::Minus).unwrap();
        assert!(good.commutes(), "instance {k}: {:?}", good.mismatch);
        if !cone_commutation(&f, &src, &tgt, n, ConeSign::Plus).unwrap().commutes() {
            plus_failures += 1;
        }
    }
    assert!(plus_failures > 0);
}

#[test]
fn acyclic_data_have_acyclic_colimits() {
    let mut s = Sampler::new(99);
    for k in 0..10 {
        let h = s.acyclic_datum(1 + k % 2);
        assert!(h.complex().is_acyclic());
        for q in 0..=3 {
            assert_eq!(stabilized_cohomology(&h, q, StabilizeParams::default()).unwrap().dim, 0, "instance {k}");
        }
    }
}

#[test]
fn extended_quasi_isomorphisms_stay_quasi_isomorphisms() {
    let mut s = Sampler::new(5);
    for _ in 0..10 {
        let (src, tgt, f) = s.compatible_pair(2, 6);
        for n in 0..=4 {
            assert!(extend_map(&f, &src, &tgt, n).unwrap().map.is_quasi_iso());
        }
    }
}
