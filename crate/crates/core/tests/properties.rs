use proptest::prelude::*;

use irc_core::gauss::{sum_rate, sum_rate_with, CSwap, GaussConfig, HkParams};
use irc_core::{hull_union, NamedJoint, Polygon2D, RateInequality, RateRegion2D, Variable};

fn joint_from(weights: Vec<f64>) -> NamedJoint {
    let total: f64 = weights.iter().sum();
    let table = weights.iter().map(|w| w / total).collect();
    NamedJoint::new(
        vec![Variable::new("A", 2), Variable::new("B", 3), Variable::new("C", 2)],
        table,
    )
    .unwrap()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 12).prop_filter("not all zero", |w| w.iter().sum::<f64>() > 1e-3)
}

fn region() -> impl Strategy<Value = RateRegion2D> {
    (0.0f64..3.0, 0.0f64..3.0, 0.0f64..5.0, 0.0f64..8.0, 0.0f64..8.0).prop_map(|(a, b, s, t, u)| {
        RateRegion2D::new(vec![
            RateInequality::new(1, 0, a, "R1"),
            RateInequality::new(0, 1, b, "R2"),
            RateInequality::new(1, 1, s, "R1+R2"),
            RateInequality::new(2, 1, t, "2R1+R2"),
            RateInequality::new(1, 2, u, "R1+2R2"),
        ])
        .unwrap()
    })
}

fn gauss_point() -> impl Strategy<Value = (GaussConfig, HkParams)> {
    (
        prop::array::uniform6(0.0f64..2.0),
        0.1f64..100.0,
        0.0f64..3.0,
        0.0f64..=1.0,
        0.0f64..=1.0,
        0.01f64..20.0,
    )
        .prop_map(|(g, p, r0, a1, a2, s)| {
            let cfg = GaussConfig {
                g31: g[0],
                g32: g[1],
                g41: g[2],
                g42: g[3],
                g51: g[4],
                g52: g[5],
                p,
                r0,
            };
            (cfg, HkParams::new(a1, a2, s).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mutual_information_is_nonnegative_and_symmetric(w in weights()) {
        let j = joint_from(w);
        let ab_c = j.mutual_info(&["A"], &["B"], &["C"]).unwrap();
        prop_assert!(ab_c >= 0.0);
        prop_assert!((ab_c - j.mutual_info(&["B"], &["A"], &["C"]).unwrap()).abs() < 1e-12);
        prop_assert!(j.mutual_info(&["A", "C"], &["B"], &[] as &[&str]).unwrap() >= -1e-15);
    }

    #[test]
    fn chain_rule(w in weights()) {
        let j = joint_from(w);
        let none: &[&str] = &[];
        let whole = j.mutual_info(&["A"], &["B", "C"], none).unwrap();
        let parts = j.mutual_info(&["A"], &["C"], none).unwrap() + j.mutual_info(&["A"], &["B"], &["C"]).unwrap();
        prop_assert!((whole - parts).abs() < 1e-12);
        let h = j.entropy(&["A", "B", "C"]).unwrap();
        let chain = j.entropy(&["C"]).unwrap()
            + j.cond_entropy(&["B"], &["C"]).unwrap()
            + j.cond_entropy(&["A"], &["B", "C"]).unwrap();
        prop_assert!((h - chain).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_bounded_by_alphabet(w in weights()) {
        let j = joint_from(w);
        let h = j.entropy(&["B"]).unwrap();
        prop_assert!(h >= 0.0 && h <= 3f64.log2() + 1e-12);
        prop_assert!(j.cond_entropy(&["B"], &["A", "C"]).unwrap() <= h + 1e-12);
    }

    #[test]
    fn frontier_vertices_are_feasible(r in region()) {
        for &(x, y) in r.frontier().vertices() {
            prop_assert!(x >= -1e-12 && y >= -1e-12);
            prop_assert!(r.contains(x, y));
        }
    }

    #[test]
    fn weighted_maximum_dominates_vertices(r in region(), w1 in 0.0f64..2.0, w2 in 0.0f64..2.0) {
        let (best, (x, y)) = r.max_weighted(w1, w2).unwrap();
        prop_assert!(r.contains(x, y));
        prop_assert!((w1 * x + w2 * y - best).abs() < 1e-9);
        for &(a, b) in r.frontier().vertices() {
            prop_assert!(w1 * a + w2 * b <= best + 1e-9);
        }
    }

    #[test]
    fn tightening_a_bound_gives_a_subset(r in region(), k in 0usize..5, cut in 0.0f64..1.0) {
        let mut tighter = r.inequalities().to_vec();
        tighter[k].rhs *= cut;
        let t = RateRegion2D::new(tighter).unwrap();
        prop_assert!(t.is_subset(&r));
    }

    #[test]
    fn hull_contains_each_part(a in region(), b in region()) {
        let parts: Vec<Polygon2D> = vec![a.frontier(), b.frontier()];
        let hull = hull_union(&parts).unwrap();
        for p in &parts {
            prop_assert!(p.is_within(&hull));
        }
    }

    #[test]
    fn gaussian_sum_rate_is_symmetric_under_user_swap((cfg, hk) in gauss_point()) {
        let s = sum_rate(&cfg, &hk);
        prop_assert!(s >= 0.0);
        prop_assert!((s - sum_rate(&cfg.swapped(), &hk.swapped())).abs() < 1e-9);
    }

    #[test]
    fn gaussian_sum_rate_grows_with_r0((cfg, hk) in gauss_point(), extra in 0.0f64..2.0) {
        let mut more = cfg;
        more.r0 += extra;
        prop_assert!(sum_rate(&more, &hk) >= sum_rate(&cfg, &hk) - 1e-12);
    }

    #[test]
    fn c_swap_readings_agree((cfg, hk) in gauss_point()) {
        let a = sum_rate_with(&cfg, &hk, CSwap::Pattern);
        let b = sum_rate_with(&cfg, &hk, CSwap::Verbatim);
        prop_assert!((a - b).abs() < 1e-9);
    }
}
