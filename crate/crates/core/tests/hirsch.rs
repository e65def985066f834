use std::collections::BTreeMap;

use hirschlab::complex::complex_from_i64;
use hirschlab::hirsch::{
    cone_commutation, extend_map, first_map_difference, residue_sequence, stabilized_cohomology, stabilized_map,
    substitute_variables, ConeSign, HirschDatum, HirschError, Identity, StabilizeParams, TruncatedHirschExtension,
};
use hirschlab::{ChainMap, SparseRatMatrix};

fn m(rows: &[Vec<i64>]) -> SparseRatMatrix {
    SparseRatMatrix::from_i64_rows(rows)
}

/// `e` in degree 0, `f` in degree 1, `d = 0`, `L e = f`.
fn log_point() -> HirschDatum {
    let c = complex_from_i64(0, &[1, 1], &[vec![vec![0]]]).unwrap();
    HirschDatum::new(c, vec![BTreeMap::from([(0, m(&[vec![1]]))])]).unwrap()
}

/// `Λ(v1, v2)` with zero differential and `L_j = v_j ∧ -`, optionally with operators replaced.
fn exterior_plane(coeffs: &[(i64, i64)]) -> HirschDatum {
    let c = complex_from_i64(0, &[1, 2, 1], &[vec![vec![0], vec![0]], vec![vec![0, 0]]]).unwrap();
    let ops = coeffs
        .iter()
        .map(|&(a, b)| {
            // a L1 + b L2 on 1 -> (a, b); on (v1, v2) -> v1v2 with v1 ∧ v2 = 1.
            BTreeMap::from([(0, m(&[vec![a], vec![b]])), (1, m(&[vec![-b, a]]))])
        })
        .collect();
    HirschDatum::new(c, ops).unwrap()
}

#[test]
fn log_point_stabilizes_to_the_point() {
    let h = log_point();
    let h0 = stabilized_cohomology(&h, 0, StabilizeParams::default()).unwrap();
    let h1 = stabilized_cohomology(&h, 1, StabilizeParams::default()).unwrap();
    assert_eq!((h0.dim, h1.dim), (1, 0));
    // Each truncation keeps a top class in degree 1 that dies in the next one.
    assert!(h1.certificate.truncation_dims.iter().all(|&(_, d)| d == 1));
    let ext = TruncatedHirschExtension::new(&h, 4);
    let (aug, quot) = ext.augmentation().unwrap();
    assert_eq!(quot.complex().bettis(), vec![1, 0]);
    assert_eq!(aug.induced_rank(0), 1);
}

#[test]
fn operator_identities_are_checked() {
    let c = complex_from_i64(0, &[1, 1, 1], &[vec![vec![0]], vec![vec![0]]]).unwrap();
    let op = BTreeMap::from([(0, m(&[vec![1]])), (1, m(&[vec![1]]))]);
    match HirschDatum::new(c, vec![op]) {
        Err(HirschError::DatumViolation { identity: Identity::Square(0), degree: 0, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn exterior_plane_has_trivial_colimit() {
    let h = exterior_plane(&[(1, 0), (0, 1)]);
    for q in 0..=2 {
        let s = stabilized_cohomology(&h, q, StabilizeParams::default()).unwrap();
        assert_eq!(s.dim, usize::from(q == 0), "degree {q}");
    }
}

#[test]
fn cone_commutes_only_with_the_minus_sign() {
    let h = exterior_plane(&[(1, 0), (0, 1)]);
    let id = ChainMap::identity(h.complex());
    let good = cone_commutation(&id, &h, &h, 3, ConeSign::Minus).unwrap();
    assert!(good.commutes(), "{good:?}");
    let bad = cone_commutation(&id, &h, &h, 3, ConeSign::Plus).unwrap();
    assert!(!bad.commutes());
    let ext = extend_map(&id, &h, &h, 3).unwrap();
    assert!(ext.map.is_quasi_iso());
    let s = stabilized_map(&id, &h, &h, 0, StabilizeParams::default()).unwrap();
    assert!(s.iso);
}

#[test]
fn substitutions_compose() {
    let h = exterior_plane(&[(1, 0), (0, 1)]);
    let h1 = exterior_plane(&[(1, 1), (0, 1)]);
    let h2 = exterior_plane(&[(1, 2)]);
    let a = m(&[vec![1, 0], vec![1, 1]]);
    let b = m(&[vec![1], vec![1]]);
    let id = ChainMap::identity(h.complex());
    for n in 0..4 {
        let sa = substitute_variables(&id, &h1, &h, &a, n).unwrap();
        let sb = substitute_variables(&id, &h2, &h1, &b, n).unwrap();
        let sab = substitute_variables(&id, &h2, &h, &a.mul(&b), n).unwrap();
        let composed = sa.map.compose(&sb.map).unwrap();
        assert_eq!(first_map_difference(&composed, &sab.map), None, "bound {n}");
    }
    assert!(matches!(
        substitute_variables(&id, &h2, &h, &a.mul(&a.mul(&b)), 2),
        Err(HirschError::CompatibilityViolation { .. })
    ));
}

#[test]
fn residue_sequence_of_the_plane_is_exact() {
    let h = exterior_plane(&[(1, 0), (0, 1)]);
    for i in 1..=2 {
        let seq = residue_sequence(&h, i).unwrap();
        assert!(seq.exactness().unwrap().is_exact(), "stage {i}");
        assert!(seq.long_sequence().all_split(), "stage {i}");
    }
}

#[test]
fn column_filtration_degenerates_onto_the_quotient() {
    let h = log_point();
    let n = 4;
    let ext = TruncatedHirschExtension::new(&h, n);
    let fc = ext.column_filtration();
    assert_eq!((fc.lo(), fc.hi()), (-(n as i32), 0));
    let e2 = fc.spectral_page(2);
    for (&(p, t), &dim) in &e2.entries {
        if p > -(n as i32) && p < 0 {
            assert_eq!(dim, 0, "spot ({p}, {t})");
        }
    }
    assert_eq!(e2.dim(0, 0), 1);
    assert_eq!(e2.dim(0, 1), 0);
}

#[test]
fn hodge_levels_add_u_degree() {
    let ext = TruncatedHirschExtension::new(&log_point(), 2);
    let fc = ext.hodge_filtration(None).unwrap();
    let levels = fc.coordinate_levels().unwrap();
    assert_eq!(levels[&0], vec![0, 1, 2]);
    assert_eq!(levels[&1], vec![1, 2, 3]);
}
