mod common;

use balflip_core::explorer::{build_cube_subdivision, build_k333_torus, build_octahedron};
use balflip_core::surface::{canonical_form, isomorphism};
use balflip_core::{
    apply_flip, canonical_code, enumerate_sites, find_coloring, is_isomorphic, validate, ColorMode,
    Coloring, FlipKind, FlipSite, Surface,
};
use common::*;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn small_fixed_cases() {
    let (t, c) = build_octahedron();
    assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (6, 12, 8));
    assert_eq!(t.euler_characteristic(), 2);
    assert_eq!(t.surface(), Surface::Orientable { genus: 0 });
    assert!(c.is_proper(&t));

    let (t, _) = build_k333_torus();
    assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (9, 27, 18));
    assert_eq!(t.euler_characteristic(), 0);
    assert!(t.is_orientable());

    let (t, _) = build_cube_subdivision();
    assert_eq!(t.vertex_count(), 14);
}

#[test]
fn bes_on_any_octahedron_edge_gives_one_code() {
    let (t, c) = build_octahedron();
    let codes: Vec<_> = enumerate_sites(&t, &c, FlipKind::Bes)
        .iter()
        .map(|s| {
            let (r, rc) = apply_flip(&t, &c, s).unwrap();
            canonical_code(&r, Some(&rc), ColorMode::UpToPermutation).unwrap()
        })
        .collect();
    assert_eq!(codes.len(), 12);
    assert!(codes.windows(2).all(|w| w[0] == w[1]));
    // edges {1,3} and {2,4} in 1-based ids
    let a = FlipSite::new(FlipKind::Bes, vec![0, 2, 4, 5]).unwrap();
    let b = FlipSite::new(FlipKind::Bes, vec![1, 3, 4, 5]).unwrap();
    let (ta, ca) = apply_flip(&t, &c, &a).unwrap();
    let (tb, cb) = apply_flip(&t, &c, &b).unwrap();
    assert!(brute_iso_tri(&ta, &tb, Some((&ca, &cb))));
}

#[test]
fn color_permutations_keep_codes() {
    let (t, c) = build_octahedron();
    let swapped = c.permuted([1, 0, 2]);
    let fixed = |col: &Coloring| canonical_code(&t, Some(col), ColorMode::Fixed).unwrap();
    let perm = |col: &Coloring| canonical_code(&t, Some(col), ColorMode::UpToPermutation).unwrap();
    assert_eq!(perm(&c), perm(&swapped));
    // the octahedron's symmetry group permutes its color classes freely
    assert_eq!(fixed(&c), fixed(&swapped));

    let (s, sc) = apply_flip(&t, &c, &FlipSite::new(FlipKind::Bts, vec![0, 2, 4]).unwrap()).unwrap();
    let f1 = canonical_code(&s, Some(&sc), ColorMode::UpToPermutation).unwrap();
    let f2 = canonical_code(&s, Some(&sc.permuted([2, 0, 1])), ColorMode::UpToPermutation).unwrap();
    assert_eq!(f1, f2);
}

#[test]
fn isomorphism_map_is_a_face_bijection() {
    let mut r = rng(7);
    for _ in 0..50 {
        let (t, c) = sample_any(&mut r, 14);
        let (u, uc) = shuffle(&mut r, &t, &c);
        let map = isomorphism(&t, Some(&c), &u, Some(&uc), ColorMode::UpToPermutation)
            .unwrap()
            .expect("relabeling is an isomorphism");
        for f in t.faces() {
            assert!(u.has_face(map[f[0]], map[f[1]], map[f[2]]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn validate_of_faces_is_identity(seed in any::<u64>()) {
        let (t, _) = sample_any(&mut rng(seed), 16);
        let again = validate(t.faces()).unwrap();
        prop_assert_eq!(again.faces(), t.faces());
    }

    #[test]
    fn handshake(seed in any::<u64>()) {
        let (t, _) = sample_any(&mut rng(seed), 16);
        let deg: usize = (0..t.vertex_count()).map(|v| t.degree(v)).sum();
        prop_assert_eq!(deg, 2 * t.edge_count());
        prop_assert_eq!(2 * t.edge_count(), 3 * t.face_count());
    }

    #[test]
    fn balanced_means_even_degrees(seed in any::<u64>()) {
        let (t, c) = sample_any(&mut rng(seed), 16);
        let found = find_coloring(&t).unwrap();
        prop_assert!(found.is_proper(&t));
        prop_assert!(c.is_proper(&t));
        prop_assert!((0..t.vertex_count()).all(|v| t.degree(v) % 2 == 0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn code_survives_relabeling_and_recoloring(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (t, c) = sample_any(&mut r, 14);
        let base_ign = canonical_code(&t, None, ColorMode::Ignore).unwrap();
        let base_fix = canonical_code(&t, Some(&c), ColorMode::Fixed).unwrap();
        let base_perm = canonical_code(&t, Some(&c), ColorMode::UpToPermutation).unwrap();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        for i in 0..100 {
            let (u, uc) = shuffle(&mut r, &t, &c);
            prop_assert_eq!(&canonical_code(&u, None, ColorMode::Ignore).unwrap(), &base_ign);
            prop_assert_eq!(&canonical_code(&u, Some(&uc), ColorMode::Fixed).unwrap(), &base_fix);
            let rc = uc.permuted(perms[i % 6]);
            prop_assert_eq!(&canonical_code(&u, Some(&rc), ColorMode::UpToPermutation).unwrap(), &base_perm);
        }
    }

    #[test]
    fn labeling_is_a_permutation(seed in any::<u64>()) {
        let (t, c) = sample_any(&mut rng(seed), 14);
        let f = canonical_form(&t, Some(&c), ColorMode::Fixed).unwrap();
        let mut l = f.labeling.clone();
        l.sort_unstable();
        prop_assert_eq!(l, (0..t.vertex_count()).collect::<Vec<_>>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn iso_agrees_with_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, ac) = sample_sphere(&mut r, 10);
        let (b, bc) = if r.random_bool(0.5) {
            shuffle(&mut r, &a, &ac)
        } else {
            sample_sphere(&mut r, 10)
        };
        let ours = is_isomorphic(&a, Some(&ac), &b, Some(&bc), ColorMode::UpToPermutation).unwrap();
        prop_assert_eq!(ours, brute_iso_tri(&a, &b, Some((&ac, &bc))));
        let plain = is_isomorphic(&a, None, &b, None, ColorMode::Ignore).unwrap();
        prop_assert_eq!(plain, brute_iso_tri(&a, &b, None));
    }
}
