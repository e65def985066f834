use hirschlab::complex::mapping_cone;
use hirschlab::linalg::{dense_rref, kernel_basis, rank, rref, rref_with_transform, sparse_rref};
use hirschlab::random::Sampler;
use hirschlab::{ChainMap, SparseRatMatrix};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = SparseRatMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r)
            .prop_map(|rows| SparseRatMatrix::from_i64_rows(&rows))
    })
}

proptest! {
    #[test]
    fn dense_and_sparse_elimination_agree(a in small_matrix()) {
        let (d, s) = (dense_rref(&a), sparse_rref(&a));
        prop_assert_eq!(d.rank, s.rank);
        prop_assert_eq!(d.r, s.r);
    }

    #[test]
    fn rank_plus_nullity_is_width(a in small_matrix()) {
        let k = kernel_basis(&a);
        prop_assert_eq!(rank(&a) + k.cols(), a.cols());
        prop_assert!(a.mul(&k).is_zero());
    }

    #[test]
    fn rref_is_idempotent(a in small_matrix()) {
        let once = rref(&a);
        prop_assert_eq!(rref(&once.r).r, once.r);
    }

    #[test]
    fn transform_reproduces_rref(a in small_matrix()) {
        let (r, t) = rref_with_transform(&a);
        prop_assert_eq!(t.mul(&a), r.r);
    }

    #[test]
    fn rank_of_transpose(a in small_matrix()) {
        prop_assert_eq!(rank(&a), rank(&a.transpose()));
    }

    #[test]
    fn euler_characteristic_is_additive_over_cones(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let k = s.complex(2, 3, false);
        let f = s.homotopy_perturbation(&k, 0);
        let cone = mapping_cone(&f).complex;
        prop_assert_eq!(cone.euler_characteristic(), f.target().euler_characteristic() - k.euler_characteristic());
        let alt: i64 = k.degrees().map(|q| if q % 2 == 0 { k.dim(q) as i64 } else { -(k.dim(q) as i64) }).sum();
        prop_assert_eq!(k.euler_characteristic(), alt);
        prop_assert!(mapping_cone(&ChainMap::identity(&k)).complex.is_acyclic());
    }
}
