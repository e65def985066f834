use std::collections::BTreeMap;

use hirschlab::cech::{comparison_suite, resolution_check, CechError, ComponentDiagram, DoubleComplex};
use hirschlab::complex::{complex_from_i64, ChainMap};
use hirschlab::models::{build_component_diagram, canned, ring_diagram, xy_nilpotent};

#[test]
fn rho_squares_to_zero_on_three_components() {
    let d = ring_diagram(&canned("xyz_snc").unwrap()).unwrap();
    for m in 0..d.m_max() - 1 {
        let comp = d.rho(m + 1).compose(&d.rho(m)).unwrap();
        assert!(comp.is_zero(), "level {m}");
    }
    assert!(d.double_complex().is_ok());
}

#[test]
fn two_component_rho_signs() {
    let d = ring_diagram(&canned("xy_snc").unwrap().with_degree_bound(1)).unwrap();
    // Level 0 is {1, x2} ⊕ {1, x1}; level 1 is {1}.
    let rho = d.rho(0).map(0);
    assert_eq!(rho.to_dense().len(), 1);
    let row: Vec<String> = rho.to_dense()[0].iter().map(|x| x.to_string()).collect();
    assert_eq!(row, vec!["-1", "0", "1", "0"]);
}

#[test]
fn single_column_totalization_is_the_column() {
    let c = complex_from_i64(0, &[2, 1], &[vec![vec![1, -1]]]).unwrap();
    let dc = DoubleComplex::new(vec![c.clone()], Vec::new()).unwrap();
    let t = dc.totalize();
    assert_eq!(t.d(0), c.d(0));
    assert_eq!(t.bettis(), c.bettis());
}

#[test]
fn cone_of_identity_totalizes_to_acyclic() {
    let c = complex_from_i64(0, &[2, 1], &[vec![vec![1, 1]]]).unwrap();
    let id = ChainMap::identity(&c);
    let dc = DoubleComplex::new(vec![c.clone(), c], vec![id]).unwrap();
    assert!(dc.totalize().is_acyclic());
}

#[test]
fn ring_resolution_of_a_single_component_is_an_isomorphism() {
    let d = ring_diagram(&canned("log_point").unwrap()).unwrap();
    assert_eq!(d.m_max(), 0);
    let aug = d.augmentation().unwrap();
    assert!(aug.map(0).is_identity());
    assert!(resolution_check(&d).unwrap().is_exact());
}

#[test]
fn xy_comparisons_hold() {
    for model in [canned("xy_snc").unwrap(), xy_nilpotent()] {
        let d = build_component_diagram(&model).unwrap();
        let report = comparison_suite(&d, 6, 2, 4).unwrap();
        assert!(report.relative_resolution.holds());
        assert!(report.hirsch_resolution.holds());
        assert!(report.cech_augmentation.holds());
        assert!(report.square_commutes());
    }
}

#[test]
fn corrupted_restriction_sign_is_caught() {
    let d = build_component_diagram(&canned("xy_snc").unwrap()).unwrap();
    let f = d.restriction(&[0], &[0, 1]).unwrap().clone();
    let neg: BTreeMap<i32, _> = f.maps().iter().map(|(&q, m)| (q, m.neg())).collect();
    let flipped = ChainMap::new(f.source().clone(), f.target().clone(), neg).unwrap();
    let bad = d.with_restriction_unchecked(vec![0], vec![0, 1], flipped);
    assert!(matches!(bad.validate(), Err(CechError::SquareMismatch { .. })));
}

#[test]
fn diagram_json_roundtrip() {
    let d = build_component_diagram(&canned("xy_snc").unwrap().with_degree_bound(1)).unwrap();
    let s = serde_json::to_string(&d).unwrap();
    let back: ComponentDiagram = serde_json::from_str(&s).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), s);
}
