use hirschlab::hirsch::{
    residue_kernel_defect, residue_sequence, stabilized_cohomology, tower_comparison, StabilizeParams,
};
use hirschlab::koszul::{gr_identify, koszul_profile, KoszulInput};
use hirschlab::models::{
    build_log_dga, build_log_dga_unchecked, build_relative_quotient, canned, devissage_step, eigenvalue_one,
    no_poles_pieces, weight_decompose, xy_nilpotent, CANNED,
};
use hirschlab::SparseRatMatrix;

fn stabilized_dims(name: &str, degrees: std::ops::RangeInclusive<i32>) -> (Vec<usize>, Vec<usize>) {
    let model = canned(name).unwrap();
    let h = build_log_dga(&model).unwrap();
    let rel = build_relative_quotient(&model).unwrap();
    let stab = degrees.clone().map(|q| stabilized_cohomology(&h, q, StabilizeParams::default()).unwrap().dim);
    (stab.collect(), degrees.map(|q| rel.betti(q)).collect())
}

#[test]
fn log_point_colimit_is_a_point() {
    let (stab, rel) = stabilized_dims("log_point", 0..=3);
    assert_eq!(stab, vec![1, 0, 0, 0]);
    assert_eq!(stab, rel);
}

#[test]
fn nilpotent_rank2_colimit_has_two_classes() {
    let (stab, rel) = stabilized_dims("nilpotent_rank2", 0..=3);
    assert_eq!(stab, vec![2, 0, 0, 0]);
    assert_eq!(stab, rel);
}

#[test]
fn xy_colimit_matches_relative_quotient() {
    for model in [canned("xy_snc").unwrap(), xy_nilpotent()] {
        let h = build_log_dga(&model).unwrap();
        let rel = build_relative_quotient(&model).unwrap();
        for q in 0..=3 {
            let s = stabilized_cohomology(&h, q, StabilizeParams::default()).unwrap();
            assert_eq!(s.dim, rel.betti(q), "degree {q}");
            assert!(!s.certificate.ranks.is_empty());
        }
    }
}

#[test]
fn two_log_vars_tower_matches_relative_quotient() {
    let h = build_log_dga(&canned("two_log_vars").unwrap()).unwrap();
    let rows = tower_comparison(&h, 0..=3, StabilizeParams::default()).unwrap();
    assert_eq!(rows.len(), 8);
    for (row, _) in rows {
        assert_eq!(row.stabilized, row.relative, "{row:?}");
    }
}

#[test]
fn residue_sequences_are_exact_per_weight_block() {
    for name in ["log_point", "xy_snc", "xyz_snc", "two_log_vars"] {
        let model = canned(name).unwrap().with_degree_bound(2);
        let h = build_log_dga(&model).unwrap();
        for block in weight_decompose(&model, &h) {
            for i in 1..=block.datum.r() {
                let seq = residue_sequence(&block.datum, i).unwrap();
                assert!(seq.exactness().unwrap().is_exact(), "{name} {:?} i = {i}", block.multidegree);
                assert!(residue_kernel_defect(&block.datum, i).unwrap().iter().all(|&(_, k)| k == 0));
            }
        }
    }
}

#[test]
fn no_poles_pieces_have_split_long_sequences() {
    let model = canned("nilpotent_rank2").unwrap();
    let (sub, quot) = devissage_step(&model, 1).unwrap();
    assert_eq!((sub.coefficient_dim(), quot.coefficient_dim()), (1, 1));
    for piece in no_poles_pieces(&model) {
        let h = build_log_dga(&piece).unwrap();
        let report = residue_sequence(&h, 1).unwrap().long_sequence();
        assert!(report.all_split(), "{report:?}");
        assert!(report.rows.iter().filter(|r| r.degree <= 3).count() >= 3);
    }
}

#[test]
fn unit_eigenvalue_breaks_the_long_sequence() {
    let h = build_log_dga_unchecked(&eigenvalue_one()).unwrap();
    let seq = residue_sequence(&h, 1).unwrap();
    // The short sequence of complexes is still exact; only cohomology fails to split.
    assert!(seq.exactness().unwrap().is_exact());
    let report = seq.long_sequence();
    assert!(!report.all_split());
    let row = report.rows.iter().find(|r| r.degree == 0).unwrap();
    assert_eq!((row.middle, row.after, row.projection_rank), (0, 1, 0));
}

#[test]
fn graded_pieces_are_koszul_complexes() {
    for name in CANNED {
        let h = build_log_dga(&canned(name).unwrap().with_degree_bound(1)).unwrap();
        for i in 0..=4 {
            let (ident, verdict) = gr_identify(&h, i, 4).unwrap();
            assert!(verdict.is_iso(), "{name} i = {i}: {verdict:?}");
            assert_eq!(ident.gr.dims(), ident.koszul.dims());
        }
    }
}

#[test]
fn koszul_profile_of_a_rank_one_map() {
    // ψ: Q^2 -> Q^3 of rank 1: ker 1, coker 2.
    let psi = SparseRatMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4], vec![0, 0]]);
    let p = koszul_profile(&KoszulInput::new(psi), 3);
    assert_eq!(p.rank_psi, 1);
    assert!(p.matches(), "{p:?}");
    let dims: Vec<usize> = p.rows.iter().map(|r| r.computed).collect();
    // Γ_{3-q}(Q) ⊗ Λ^q(Q^2): 1, 2, 1, 0.
    assert_eq!(dims, vec![1, 2, 1, 0]);
}
