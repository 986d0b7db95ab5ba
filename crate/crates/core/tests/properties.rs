//! Property-based invariants for the information primitives, the convex
//! solvers and the exact type machinery.

use proptest::prelude::*;

use blurlab_core::rd::{conditional_rd, rd_function};
use blurlab_core::simplex::{
    binary_entropy, conditional_mutual_information, entropy, expected_distortion, kl_divergence,
    Dist, DistortionMatrix, DistortionSpec, Joint2, Joint3,
};
use blurlab_core::types_lab::{
    ball_membership, enum_types, enumerate_type_class, rank_in_type_class, type_class_size,
    JointType2, TypeVec,
};

fn dist_strategy(k: usize) -> impl Strategy<Value = Dist> {
    prop::collection::vec(1e-6f64..1.0, k)
        .prop_map(|w| Dist::normalize(w).expect("positive weights"))
}

fn joint2_strategy(nx: usize, ny: usize) -> impl Strategy<Value = Joint2> {
    prop::collection::vec(1e-6f64..1.0, nx * ny).prop_map(move |w| {
        let s: f64 = w.iter().sum();
        Joint2::new(nx, ny, w.iter().map(|x| x / s).collect()).expect("normalized")
    })
}

fn joint3_strategy() -> impl Strategy<Value = Joint3> {
    prop::collection::vec(1e-6f64..1.0, 8).prop_map(|w| {
        let s: f64 = w.iter().sum();
        Joint3::new(2, 2, 2, w.iter().map(|x| x / s).collect()).expect("normalized")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_within_bounds(p in dist_strategy(3)) {
        let h = entropy(&p);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (3.0f64).log2() + 1e-12);
    }

    #[test]
    fn kl_nonnegative_zero_iff_equal(q in dist_strategy(3), p in dist_strategy(3)) {
        let d = kl_divergence(&q, &p).unwrap();
        prop_assert!(d >= -1e-12);
        prop_assert!(kl_divergence(&q, &q).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn cmi_nonneg_and_chain_identity(j in joint3_strategy()) {
        let cmi = conditional_mutual_information(&j);
        prop_assert!(cmi >= -1e-12);
        // H(X|Y) - H(X|V,Y) computed from entropies directly.
        let hxy = {
            let m = j.marginal_xy();
            let hy = entropy(&m.marginal_y());
            -m.table().iter().map(|&x| if x > 0.0 { x * x.log2() } else { 0.0 }).sum::<f64>() - hy
        };
        let hxvy = {
            let mut h = 0.0;
            for x in 0..2 { for y in 0..2 { for v in 0..2 {
                let p = j.get(x, y, v);
                if p > 0.0 { h -= p * p.log2(); }
            }}}
            let myv = j.marginal_yv();
            h + myv.table().iter().map(|&x| if x > 0.0 { x * x.log2() } else { 0.0 }).sum::<f64>()
        };
        prop_assert!((cmi - (hxy - hxvy)).abs() <= 1e-10);
    }

    #[test]
    fn expected_distortion_in_range(j in joint2_strategy(2, 3)) {
        let m = DistortionMatrix::from_rows(vec![vec![0.0, 1.0, 2.0], vec![0.5, 0.0, 1.5]]).unwrap();
        let e = expected_distortion(&j, &m).unwrap();
        prop_assert!((0.0..=2.0).contains(&e));
    }

    #[test]
    fn binary_entropy_symmetric(q in 0.0f64..=1.0) {
        let a = binary_entropy(q).unwrap();
        let b = binary_entropy(1.0 - q).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn rd_monotone_convex_in_level(p in dist_strategy(2), u in 0.05f64..0.4) {
        let m = DistortionMatrix::hamming(2);
        let v = |l: f64| rd_function(&p, &DistortionSpec::with_level_f64(m.clone(), l).unwrap()).unwrap().value;
        let (l1, l2, l3) = (u, u + 0.2, u + 0.4);
        let (v1, v2, v3) = (v(l1), v(l2), v(l3));
        prop_assert!(v1 >= v2 - 1e-7);
        prop_assert!(v2 >= v3 - 1e-7);
        prop_assert!(v2 <= 0.5 * (v1 + v3) + 1e-6);
    }

    #[test]
    fn conditional_rd_monotone_in_level(j in joint2_strategy(2, 2), u in 0.05f64..0.5) {
        let m = DistortionMatrix::hamming(2);
        let v = |l: f64| conditional_rd(&j, &DistortionSpec::with_level_f64(m.clone(), l).unwrap()).unwrap().value;
        prop_assert!(v(u) >= v(u + 0.3) - 1e-8);
    }

    #[test]
    fn conditional_rd_bounded_by_unconditional(j in joint2_strategy(2, 2), u in 0.05f64..0.8) {
        let spec = DistortionSpec::with_level_f64(DistortionMatrix::hamming(2), u).unwrap();
        let c = conditional_rd(&j, &spec).unwrap().value;
        let re = rd_function(&j.marginal_x(), &spec).unwrap().value;
        prop_assert!(c <= re + 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn type_partition_counts(n in 1u32..=10, k in 1usize..=3) {
        let total: num_bigint::BigUint = enum_types(n, k)
            .unwrap()
            .iter()
            .map(type_class_size)
            .sum();
        prop_assert_eq!(total, num_bigint::BigUint::from(k).pow(n));
    }

    #[test]
    fn rank_enumerate_roundtrip(c0 in 0u32..=5, c1 in 0u32..=5) {
        prop_assume!(c0 + c1 >= 1);
        let t = TypeVec::new(vec![c0, c1]).unwrap();
        let seqs = enumerate_type_class(&t).unwrap();
        for (i, s) in seqs.iter().enumerate() {
            prop_assert_eq!(rank_in_type_class(s, &t).unwrap(), i as u128);
        }
    }

    #[test]
    fn ball_membership_matches_pair_type(
        x in prop::collection::vec(0u8..2, 6),
        v in prop::collection::vec(0u8..2, 6),
        num in 0i64..=6,
    ) {
        let spec = DistortionSpec::with_level_ratio(DistortionMatrix::hamming(2), num, 6).unwrap();
        let member = ball_membership(&x, &v, &spec).unwrap();
        let pair = JointType2::of_pair(&x, &v, 2, 2).unwrap();
        prop_assert_eq!(member, pair.distortion_within(&spec));
    }
}
