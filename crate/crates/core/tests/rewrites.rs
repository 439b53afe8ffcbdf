mod common;

use balflip_core::rewrites::{
    certify, expand_bes_via_bts_pc, expand_bes_via_ps, expand_bew_via_ps_btw,
    expand_with_default_budget, RewriteError,
};
use balflip_core::{enumerate_sites, FlipKind, FlipSite, Triangulation};
use common::*;
use proptest::prelude::*;
use rand::seq::IndexedRandom;

fn delta_sum(seq: &[FlipSite]) -> i64 {
    seq.iter().map(|s| s.kind().vertex_delta()).sum()
}

/// Some orientation of the BES edge has its far apex off the opposite side.
fn bes_hypothesis(t: &Triangulation, s: &FlipSite) -> bool {
    let v = s.vertices();
    let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
    [(c, d, a, b), (d, c, a, b), (c, d, b, a), (d, c, b, a)]
        .into_iter()
        .any(|(x, y, v0, v1)| {
            let u = t
                .neighbors(x)
                .iter()
                .copied()
                .find(|&u| u != v0 && t.has_face(x, v1, u))
                .unwrap();
            u != y && !t.has_edge(u, y)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn bes_splits_into_two_ps(seed in any::<u64>()) {
        let (t, c) = sample_sphere(&mut rng(seed), 14);
        for s in enumerate_sites(&t, &c, FlipKind::Bes) {
            match expand_bes_via_ps(&t, &c, &s) {
                Ok(seq) => {
                    prop_assert!(bes_hypothesis(&t, &s));
                    prop_assert!(seq.iter().all(|x| x.kind() == FlipKind::Ps));
                    prop_assert_eq!(delta_sum(&seq), 2);
                    prop_assert!(certify(&t, &c, &s, &seq).unwrap());
                }
                Err(RewriteError::NoEligibleOrientation) => prop_assert!(!bes_hypothesis(&t, &s)),
                Err(e) => prop_assert!(false, "{}", e),
            }
        }
    }

    #[test]
    fn two_move_recipes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (t, c) = sample_any(&mut r, 16);
        if let Some(s) = enumerate_sites(&t, &c, FlipKind::Bes).choose(&mut r) {
            let seq = expand_bes_via_bts_pc(&t, &c, s).unwrap();
            prop_assert_eq!(delta_sum(&seq), 2);
            prop_assert!(certify(&t, &c, s, &seq).unwrap());
        }
        if let Some(s) = enumerate_sites(&t, &c, FlipKind::Bew).choose(&mut r) {
            let seq = expand_bew_via_ps_btw(&t, &c, s).unwrap();
            prop_assert_eq!(delta_sum(&seq), -2);
            prop_assert!(certify(&t, &c, s, &seq).unwrap());
        }
    }
}

#[test]
fn default_budgets_realize_n_and_p2() {
    let mut r = rng(99);
    let (mut n_done, mut p2_done) = (0, 0);
    for _ in 0..12 {
        let (t, c) = sample_small(&mut r, 14);
        for kind in [FlipKind::NFlip, FlipKind::P2Flip] {
            for s in enumerate_sites(&t, &c, kind).iter().take(3) {
                let seq = expand_with_default_budget(&t, &c, s).unwrap();
                assert_eq!(delta_sum(&seq), 0, "{s}");
                assert!(certify(&t, &c, s, &seq).unwrap(), "{s}");
                assert_eq!(expand_with_default_budget(&t, &c, s).unwrap(), seq);
                if kind == FlipKind::NFlip {
                    n_done += 1;
                } else {
                    p2_done += 1;
                }
            }
        }
    }
    assert!(n_done > 0 && p2_done > 0, "{n_done} {p2_done}");
}

#[test]
fn no_default_budget_for_plain_moves() {
    let (t, c) = balflip_core::explorer::build_octahedron();
    let s = enumerate_sites(&t, &c, FlipKind::Bts)[0].clone();
    assert!(matches!(
        expand_with_default_budget(&t, &c, &s),
        Err(RewriteError::NoDefaultBudget(FlipKind::Bts))
    ));
}
