use hirschlab::filt::FilteredComplex;
use hirschlab::hirsch::TruncatedHirschExtension;
use hirschlab::models::{build_log_dga, build_relative_quotient, canned};

#[test]
fn column_filtration_collapses_to_the_relative_quotient() {
    let n = 6;
    for name in ["log_point", "xy_snc", "xyz_snc"] {
        let model = canned(name).unwrap().with_degree_bound(2);
        let h = build_log_dga(&model).unwrap();
        let rel = build_relative_quotient(&model).unwrap();
        let ext = TruncatedHirschExtension::new(&h, n);
        let ss = ext.column_filtration().spectral_sequence();
        assert!(ss.consistency_failures().is_empty());
        let e2 = ss.page(2).unwrap();
        for (&(p, q), &d) in &e2.entries {
            // Column -N is the truncation boundary.
            if p > -(n as i32) && p < 0 {
                assert_eq!(d, 0, "{name} spot ({p}, {q})");
            }
        }
        for q in rel.degrees() {
            assert_eq!(e2.dim(0, q), rel.betti(q), "{name} degree {q}");
        }
        for (deg, inf, betti) in ss.convergence(ext.complex()) {
            assert_eq!(inf, betti, "{name} degree {deg}");
        }
    }
}

#[test]
fn every_filtration_converges() {
    let h = build_log_dga(&canned("xy_snc").unwrap().with_degree_bound(1)).unwrap();
    let ext = TruncatedHirschExtension::new(&h, 4);
    let c = ext.complex().clone();
    for fc in [
        ext.column_filtration(),
        ext.hodge_filtration(None).unwrap(),
        FilteredComplex::stupid(c.clone()),
        FilteredComplex::trivial(c.clone()),
    ] {
        let ss = fc.spectral_sequence();
        assert!(ss.convergence(&c).iter().all(|(_, inf, b)| inf == b));
    }
}

#[test]
fn log_point_column_filtration_does_not_degenerate_at_e1() {
    let h = build_log_dga(&canned("log_point").unwrap()).unwrap();
    let fc = TruncatedHirschExtension::new(&h, 3).column_filtration();
    assert!(!fc.check_degeneration(1).degenerates);
    let e1 = fc.spectral_page(1);
    assert!(!e1.differentials.is_empty());
}

#[test]
fn pages_settle_once_totals_reach_cohomology() {
    use hirschlab::filt::SpectralSequence;
    let h = build_log_dga(&canned("log_point").unwrap()).unwrap();
    let ext = TruncatedHirschExtension::new(&h, 3);
    let fc = ext.column_filtration();
    let c = ext.complex();
    let ss = fc.spectral_sequence();
    assert_eq!(ss.pages.len(), fc.levels().count() + 2);
    let settled = ss
        .pages
        .iter()
        .position(|pg| c.degrees().all(|n| pg.total(n) == c.betti(n)))
        .expect("reaches the limit");
    // The log point has a nonzero d_1, so the limit is not E_0.
    assert!(settled >= 1);
    for pg in &ss.pages[settled..] {
        assert_eq!(pg.entries, ss.pages[settled].entries);
        assert!(pg.differentials.values().all(|d| d.is_zero()));
    }
    for r in 0..ss.pages.len() {
        let prefix = SpectralSequence::compute_until(&fc, r);
        assert_eq!(prefix.pages[..], ss.pages[..=r]);
    }
}
