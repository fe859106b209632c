mod common;

use common::{each, gauss_bonnet_loops, q, r, s};
use curvident::curvature::{constant_curvature, invariants};
use curvident::delta::Layout;
use curvident::identities::*;
use curvident::models::{einsteinize, example_5d, example_6d, nikolayevsky, random_curvature, sl3_so3};
use curvident::{CurvatureTensor, Scalar, Tensor};
use proptest::prelude::*;

fn einstein(dim: usize, seed: u64) -> CurvatureTensor {
    einsteinize(&random_curvature(dim, seed, 3), &s(1)).unwrap()
}

fn all_hold(subs: &[SubIdentity]) -> Vec<&str> {
    subs.iter().filter(|x| !x.holds()).map(|x| x.label.as_str()).collect()
}

#[test]
fn nikolayevsky_block_table() {
    for (a, b) in [(1, 1), (2, 1), (0, 1), (1, 0)] {
        let rc = nikolayevsky(&s(a), &s(b));
        let got = pa5_block_values(&rc, [0, 1, 2, 3]).unwrap();
        let want = [
            2 * (2 * a - 5 * b) * b,
            2 * (2 * a - 5 * b) * b,
            2 * (2 * a + b) * b,
            -6 * (2 * a - 3 * b) * b,
        ]
        .map(s);
        assert_eq!(got, want, "({a},{b})");
        assert!(got.iter().sum::<Scalar>().is_zero());
        let rep = pa5_residual(&rc).unwrap();
        assert!(rep.hypothesis_holds && rep.is_zero, "({a},{b})");
        assert!(thm_a_super_residual(&rc).unwrap().is_zero);
    }
}

#[test]
fn five_dim_examples() {
    for k in [s(1), s(2), q(-1, 3)] {
        let rc = example_5d(&k);
        assert!(lemma5_einstein_residual(&rc).unwrap().is_zero);
        assert!(thm_a_einstein_residual(&rc).unwrap().is_zero);
        let b = thm_a_super_residual(&rc).unwrap();
        assert!(!b.is_zero && !b.hypothesis_holds);
        assert!(b.witness.is_some());
    }
    let rc = sl3_so3();
    let inv = invariants(&rc);
    // 4R̊ − 2R̂ = −135 g and (9/50·τ|R|² − τ³/50) = −135
    let lhs = inv.r_ring2.scale(&s(4)).sub(&inv.r_hat2.scale(&s(2)));
    assert_eq!(lhs, Tensor::metric(5).scale(&s(-135)));
    for rep in [
        pa5_residual(&rc),
        thm_a_super_residual(&rc),
        thm_a_einstein_residual(&rc),
        lemma5_einstein_residual(&rc),
    ] {
        let rep = rep.unwrap();
        assert!(rep.hypothesis_holds && rep.is_zero, "{}", rep.identity);
    }
    let c = constant_curvature(5, &s(1)).unwrap();
    for rep in [pa5_residual(&c), thm_a_super_residual(&c), lemma5_einstein_residual(&c)] {
        assert!(rep.unwrap().is_zero);
    }
}

#[test]
fn six_dim_examples() {
    let rc = example_6d(&s(1));
    let inv = invariants(&rc);
    let g = Tensor::metric(6);
    // 4τŤ + 12Ř + 12R̂ − 24R̊ = 240 g = (τ|R|² − 4R̊ + 2R̂) g
    let lhs = inv
        .t_check
        .scale(&(&s(4) * &inv.tau))
        .add(&inv.r_check.scale(&s(12)))
        .add(&inv.r_hat2.scale(&s(12)))
        .sub(&inv.r_ring2.scale(&s(24)));
    assert_eq!(lhs, g.scale(&s(240)));
    // 2R̊ − R̂ = 4 g = (2R̊ − R̂)/6 g
    assert_eq!(inv.r_ring2.scale(&s(2)).sub(&inv.r_hat2), g.scale(&s(4)));
    for c in [
        rc,
        constant_curvature(6, &s(1)).unwrap(),
        constant_curvature(6, &q(-2, 5)).unwrap(),
    ] {
        for rep in [
            lemma6_einstein_residual(&c),
            thm_b_einstein_residual(&c),
            thm_b_einstein_alt_residual(&c),
            super6_intermediate_residual(&c),
            thm_b_super_residual(&c),
            appendix34_residual(&c),
        ] {
            let rep = rep.unwrap();
            assert!(rep.hypothesis_holds && rep.is_zero, "{}", rep.identity);
        }
    }
}

#[test]
fn dimension_and_order_errors() {
    let r5 = example_5d(&s(1));
    let r6 = example_6d(&s(1));
    assert!(matches!(
        lemma6_einstein_residual(&r5),
        Err(IdentityError::Dim { got: 5, .. })
    ));
    assert!(matches!(
        super6_intermediate_residual(&r5),
        Err(IdentityError::Dim { .. })
    ));
    assert!(matches!(
        thm_a_einstein_residual(&r6),
        Err(IdentityError::Dim { got: 6, .. })
    ));
    assert!(matches!(gauss_bonnet_integrand_6(&r5), Err(IdentityError::Dim { .. })));
    assert!(matches!(
        patterson_residual(&r5, 3, LeftoverMode::Free),
        Err(IdentityError::Order { r: 3, max: 2, dim: 5 })
    ));
    assert!(matches!(
        patterson_residual(&r5, 0, LeftoverMode::Free),
        Err(IdentityError::Order { .. })
    ));
}

#[test]
fn patterson_examples() {
    let c = constant_curvature(5, &s(1)).unwrap();
    let rep = patterson_residual(&c, 1, LeftoverMode::Free).unwrap();
    assert_eq!((rep.rank, rep.layout, rep.is_zero), (8, Layout::Dense, true));
    let rep = patterson_residual(&sl3_so3(), 2, LeftoverMode::Free).unwrap();
    assert_eq!((rep.rank, rep.is_zero), (4, true));
    let rep = patterson_residual(&random_curvature(4, 8, 3), 2, LeftoverMode::Traced).unwrap();
    assert_eq!((rep.rank, rep.is_zero), (2, true));
    // dimension 6, r = 1 leaves rank 2 + 2·4 = 10, kept as its rank-2 complement
    let rep = patterson_residual(&random_curvature(6, 8, 2), 1, LeftoverMode::Free).unwrap();
    assert_eq!((rep.rank, rep.layout, rep.is_zero), (2, Layout::Complement, true));
    for r in 1..=3 {
        assert!(
            patterson_residual(&random_curvature(6, 8, 2), r, LeftoverMode::Traced)
                .unwrap()
                .is_zero
        );
    }
}

#[test]
fn weyl_expansions_agree_with_delta() {
    for (dim, seed) in [(5, 1), (5, 2), (6, 1)] {
        let rc = random_curvature(dim, seed, 3);
        let x = weyl_expansion(&rc).unwrap();
        assert!(x.agrees(), "dim {dim}: {:?}", x.grades);
        assert!(x.sum.is_zero());
        assert!(x.blocks.iter().any(|(_, b)| !b.is_zero()));
        assert!(weyl_patterson_residual(&rc, 2, LeftoverMode::Free).unwrap().is_zero);
    }
    let c = constant_curvature(6, &s(3)).unwrap();
    let x = weyl_expansion(&c).unwrap();
    assert!(x.blocks.iter().all(|(_, b)| b.is_zero()));
    assert!(matches!(
        weyl_expansion(&random_curvature(4, 1, 2)),
        Err(IdentityError::Dim { .. })
    ));
}

#[test]
fn printed_l_row_signs_do_not_cancel() {
    let rc = random_curvature(6, 3, 3);
    assert!(!weyl6_sum_with_flipped_l_rows(&rc).unwrap().is_zero());
    assert!(weyl_expansion(&rc).unwrap().sum.is_zero());
}

#[test]
fn random_einstein_five() {
    for seed in 0..4 {
        let rc = einstein(5, seed);
        assert!(lemma5_einstein_residual(&rc).unwrap().is_zero);
        assert!(thm_a_einstein_residual(&rc).unwrap().is_zero);
        let tv = lemma5_transvections(&rc).unwrap();
        assert_eq!(tv.len(), 6);
        assert_eq!(all_hold(&tv), Vec::<&str>::new(), "seed {seed}");
        // random Einstein tensors are not super-Einstein
        let b = thm_a_super_residual(&rc).unwrap();
        assert!(!b.hypothesis_holds && !b.is_zero);
    }
}

#[test]
fn lemma5_transvections_need_einstein() {
    let rc = random_curvature(5, 17, 3);
    let rep = lemma5_einstein_residual(&rc).unwrap();
    assert!(!rep.hypothesis_holds && !rep.is_zero);
    assert!(!all_hold(&lemma5_transvections(&rc).unwrap()).is_empty());
    for k in [s(1), q(-2, 7)] {
        assert_eq!(
            all_hold(&lemma5_transvections(&example_5d(&k)).unwrap()),
            Vec::<&str>::new()
        );
    }
}

#[test]
fn pa5_transvections_on_super_einstein() {
    for rc in [sl3_so3(), nikolayevsky(&s(2), &s(1)), nikolayevsky(&q(1, 2), &q(-3, 4))] {
        assert_eq!(all_hold(&pa5_transvections(&rc).unwrap()), Vec::<&str>::new());
    }
}

#[test]
fn random_einstein_six() {
    let rc = einstein(6, 5);
    assert!(lemma6_einstein_residual(&rc).unwrap().is_zero);
    let groups = einstein6_term_groups(&rc).unwrap();
    assert_eq!(groups.groups.len(), 34);
    let bad: Vec<usize> = groups.groups.iter().filter(|g| !g.holds()).map(|g| g.item).collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert!(groups.rhs_sum_matches);
    assert!(appendix34_residual(&rc).unwrap().is_zero);
    let a = thm_b_einstein_residual(&rc).unwrap();
    let b = thm_b_einstein_alt_residual(&rc).unwrap();
    assert!(a.is_zero);
    assert_eq!(a.residual, b.residual);
    let tv = lemma6_transvections(&rc).unwrap();
    assert_eq!(tv.len(), 1 + 9 + 9 + 1 + 1);
    assert_eq!(all_hold(&tv), Vec::<&str>::new());
    let neg = thm_b_super_residual(&rc).unwrap();
    assert!(!neg.hypothesis_holds && !neg.is_zero);
    assert!(!super6_intermediate_residual(&rc).unwrap().is_zero);
}

#[test]
fn six_dim_negative_controls() {
    // not Einstein: the Einstein identities fail and the alternative
    // arrangement still matches componentwise
    let rc = random_curvature(6, 2, 3);
    let a = thm_b_einstein_residual(&rc).unwrap();
    assert!(!a.hypothesis_holds && !a.is_zero);
    assert_eq!(a.residual, thm_b_einstein_alt_residual(&rc).unwrap().residual);
    assert!(!lemma6_einstein_residual(&rc).unwrap().is_zero);
    let groups = einstein6_term_groups(&rc).unwrap();
    assert!(groups.groups.iter().any(|g| !g.holds()));
    let rep = appendix34_residual(&rc).unwrap();
    assert!(!rep.is_zero && rep.note.is_some());
}

#[test]
fn super_einstein_six_transvections() {
    for rc in [
        example_6d(&s(1)),
        example_6d(&q(-3, 2)),
        constant_curvature(6, &s(2)).unwrap(),
    ] {
        assert_eq!(all_hold(&super6_transvections(&rc).unwrap()), Vec::<&str>::new());
    }
}

#[test]
fn tsa_decomposition() {
    let flat = constant_curvature(6, &Scalar::ZERO).unwrap();
    let d = tsa(&flat);
    assert!(d.t.is_zero() && d.s.is_zero() && d.a.is_zero());

    let c = constant_curvature(6, &s(1)).unwrap();
    let d = tsa(&c);
    each(6, 4, |x| {
        let (p, qq, rr, ss) = (x[0], x[1], x[2], x[3]);
        let mut t = Scalar::ZERO;
        let mut sv = Scalar::ZERO;
        each(6, 2, |y| {
            t += &r(&c, p, y[0], y[1], qq) * &r(&c, rr, y[0], y[1], ss);
            sv += &r(&c, y[0], y[1], p, qq) * &r(&c, y[0], y[1], rr, ss);
        });
        assert_eq!(d.t.get(x), &t);
        assert_eq!(d.s.get(x), &sv);
    });

    let rc = example_6d(&s(1));
    let d = tsa(&rc);
    let mut trace = Scalar::ZERO;
    each(6, 2, |x| trace += d.s.get(&[x[0], x[1], x[0], x[1]]));
    assert_eq!(trace, invariants(&rc).r_norm_sq);
    assert_eq!(trace, s(24));
    let rnd = random_curvature(6, 4, 2);
    let s4 = tsa(&rnd).s;
    assert_eq!(s4.permute(&[2, 3, 0, 1]), s4);
    assert_eq!(s4.permute(&[1, 0, 2, 3]), s4.neg());
    assert_eq!(s4.permute(&[0, 1, 3, 2]), s4.neg());
}

#[test]
fn gauss_bonnet() {
    let c = constant_curvature(6, &s(1)).unwrap();
    let bracket = gauss_bonnet_integrand_6(&c).unwrap();
    assert_eq!(bracket, gauss_bonnet_loops(&c));
    assert_eq!(bracket, s(720));
    let vol = even_sphere_volume(6);
    assert_eq!(vol, (q(16, 15), 3));
    assert_eq!(euler_characteristic_6(&bracket, vol), Some(s(2)));
    assert_eq!(euler_characteristic_6(&bracket, even_sphere_volume(4)), None);
    assert_eq!(even_sphere_volume(2), (s(4), 1));

    let flat = constant_curvature(6, &Scalar::ZERO).unwrap();
    assert!(gauss_bonnet_integrand_6(&flat).unwrap().is_zero());
    for rc in [example_6d(&s(1)), einstein(6, 3), random_curvature(6, 3, 2)] {
        let v = gauss_bonnet_integrand_6(&rc).unwrap();
        assert_eq!(v, gauss_bonnet_loops(&rc));
        assert_eq!(v, gauss_bonnet_from_invariants(&rc, &invariants(&rc)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn patterson_vanishes(dim in 4usize..=5, seed in any::<u64>(), terms in 1usize..=3) {
        let rc = random_curvature(dim, seed, terms);
        for r in 1..=max_order(dim) {
            prop_assert!(patterson_residual(&rc, r, LeftoverMode::Free).unwrap().is_zero);
            prop_assert!(patterson_residual(&rc, r, LeftoverMode::Traced).unwrap().is_zero);
        }
    }

    #[test]
    fn scaled_einstein_inputs(seed in any::<u64>(), lam in prop_oneof![Just(2i64), Just(-1i64)]) {
        let rc = einstein(5, seed).scale(&s(lam));
        prop_assert!(lemma5_einstein_residual(&rc).unwrap().is_zero);
        prop_assert!(thm_a_einstein_residual(&rc).unwrap().is_zero);
        let base = thm_a_super_residual(&einstein(5, seed)).unwrap().residual;
        let scaled = thm_a_super_residual(&rc).unwrap().residual;
        prop_assert_eq!(scaled, base.scale(&s(lam * lam * lam)));
    }
}
