//! Randomized property tests for the evaluation, pencil, and structure
//! invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use freespectra::catalog::{self, CatalogParams};
use freespectra::convexotonic;
use freespectra::generic;
use freespectra::linalg;
use freespectra::pencil::{Membership, Pencil};
use freespectra::rng;
use freespectra::series::FreeSeries;
use freespectra::tuple::{self, fock_shift_tuple};
use freespectra::word::Word;

fn word_strategy(g: u8, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(1..=g, 0..=max_len).prop_map(|ls| Word::from_letters(&ls))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn word_evaluation_is_multiplicative(
        seed in 0u64..1000,
        u in word_strategy(3, 4),
        v in word_strategy(3, 4),
    ) {
        let x = rng::ginibre_tuple(&mut rng::seeded(seed), 3, 3);
        let uv = u.concat(&v);
        let lhs = tuple::eval_word(&uv, &x).unwrap();
        let rhs = tuple::eval_word(&u, &x).unwrap() * tuple::eval_word(&v, &x).unwrap();
        prop_assert!(linalg::max_abs(&(lhs - rhs)) < 1e-8);
    }

    #[test]
    fn series_product_evaluates_multiplicatively_on_nilpotents(
        seed in 0u64..1000,
        n in 2usize..=4,
    ) {
        // degree-N truncations are exact on nilpotents of order <= N + 1
        let mut r = rng::seeded(seed);
        let md = n; // nilpotent order is n, so degree n covers it
        let mut f = FreeSeries::zero(2, 2, 2, md);
        let mut h = FreeSeries::zero(2, 2, 2, md);
        for w in freespectra::word::words_up_to(2, 2) {
            f.set_coeff(w.clone(), rng::ginibre(&mut r, 2, 2));
            h.set_coeff(w, rng::ginibre(&mut r, 2, 2));
        }
        let x = rng::nilpotent_tuple(&mut r, 2, n);
        let fh = f.mul(&h).unwrap();
        let lhs = fh.eval(&x).unwrap();
        let rhs = f.eval(&x).unwrap() * h.eval(&x).unwrap();
        // truncation must not matter because X is nilpotent
        prop_assert!(f.max_degree() + h.max_degree() >= n);
        let scale = 1.0 + linalg::max_abs(&rhs);
        prop_assert!(linalg::max_abs(&(lhs - rhs)) < 1e-10 * scale);
    }

    #[test]
    fn fock_evaluation_is_faithful(seed in 0u64..1000) {
        // the vacuum column of the Fock evaluation recovers every
        // coefficient of a degree-N series
        let n = 3usize;
        let mut r = rng::seeded(seed);
        let mut f = FreeSeries::zero(2, 1, 1, n);
        for w in freespectra::word::words_up_to(2, n) {
            f.set_coeff(w, rng::ginibre(&mut r, 1, 1));
        }
        let x = fock_shift_tuple(2, n);
        let fx = f.eval(&x).unwrap();
        // vacuum is the first basis word; coefficient of word w appears in
        // the row indexed by w
        let words = freespectra::word::words_up_to(2, n);
        for (i, w) in words.iter().enumerate() {
            let got = fx[(i, 0)];
            let want = f.coeff(w)[(0, 0)];
            prop_assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn pencil_eigenvalue_is_unitarily_invariant(seed in 0u64..1000) {
        let mut r = rng::seeded(seed);
        let a = Pencil::new(rng::ginibre_tuple(&mut r, 2, 3));
        let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, 2, 4), 0.5);
        let u = rng::haar_unitary(&mut r, 4);
        let conj = x.conjugate(&u).unwrap();
        let e1 = linalg::lambda_min(&a.eval(&x).unwrap());
        let e2 = linalg::lambda_min(&a.eval(&conj).unwrap());
        prop_assert!((e1 - e2).abs() < 1e-10);
    }

    #[test]
    fn membership_respects_isometric_compression(seed in 0u64..1000) {
        let mut r = rng::seeded(seed);
        let a = Pencil::new(rng::ginibre_tuple(&mut r, 2, 3));
        let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, 2, 4), 0.2);
        let (m, _) = a.membership(&x, 1e-8).unwrap();
        prop_assume!(m == Membership::Interior);
        // isometry from C^2 into C^4
        let q = rng::haar_unitary(&mut r, 4).columns(0, 2).into_owned();
        let compressed = x.conjugate(&q).unwrap();
        let (mc, _) = a.membership(&compressed, 1e-8).unwrap();
        prop_assert!(mc == Membership::Interior || mc == Membership::Boundary);
    }

    #[test]
    fn direct_sum_membership_is_componentwise(seed in 0u64..1000) {
        let mut r = rng::seeded(seed);
        let a = Pencil::new(rng::ginibre_tuple(&mut r, 2, 3));
        let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, 2, 2), 0.3);
        let y = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, 2, 3), 0.3);
        let both = x.direct_sum(&y).unwrap();
        let ex = linalg::lambda_min(&a.eval(&x).unwrap());
        let ey = linalg::lambda_min(&a.eval(&y).unwrap());
        let eboth = linalg::lambda_min(&a.eval(&both).unwrap());
        prop_assert!((eboth - ex.min(ey)).abs() < 1e-10);
    }

    #[test]
    fn affine_normalization_round_trips(seed in 0u64..1000) {
        let mut r = rng::seeded(seed);
        let a = Pencil::new(rng::ginibre_tuple(&mut r, 2, 3));
        let shift: Vec<Complex64> = (0..2).map(|_| rng::gaussian(&mut r) * Complex64::new(0.05, 0.0)).collect();
        let m = linalg::identity(2) + rng::ginibre(&mut r, 2, 2).map(|z| z * Complex64::new(0.2, 0.0));
        prop_assume!(m.clone().try_inverse().is_some());
        let result = a.affine_normalize(&shift, &m);
        prop_assume!(result.is_ok());
        let (_, map) = result.unwrap();
        let inv = map.inverse().unwrap();
        let composed = inv.compose(&map);
        let identity = freespectra::pencil::AffineMap::identity(2);
        prop_assert!(composed.distance(&identity) < 1e-10);
    }

    #[test]
    fn ball_tuples_are_convexotonic(seed in 0u64..1000) {
        let mut r = rng::seeded(seed);
        let v: Vec<Complex64> = (0..3)
            .map(|_| rng::gaussian(&mut r) * Complex64::new(0.3, 0.0))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm < 1.0 && norm > 1e-6);
        let xi = convexotonic::ball_tuple(&v);
        prop_assert!(xi.relation_residual() < 1e-12);
    }

    #[test]
    fn accepted_probes_have_clean_kernels(seed in 0u64..1000) {
        let mut r = rng::seeded(seed);
        let a = Pencil::new(rng::ginibre_tuple(&mut r, 2, 3));
        let alpha: Vec<Complex64> = (0..2).map(|_| rng::gaussian(&mut r)).collect();
        let probe = generic::top_singular_probe(&a, &freespectra::pencil::scalar_tuple(&alpha));
        prop_assume!(probe.is_ok());
        let probe = probe.unwrap();
        prop_assert!(probe.gap > generic::GAP_THRESHOLD);
        prop_assert!(probe.pairing_residual < 1e-10);
        let lam = a.eval_lambda(&probe.alpha).unwrap();
        let m = linalg::identity(3) - linalg::adj(&lam) * &lam;
        let eig = linalg::lambda_min(&m);
        prop_assert!(eig.abs() < 1e-10);
    }
}

#[test]
fn extended_structure_identity_on_catalog_entries() {
    // Xi_k Xi^a = sum_s (Xi^a)_{k,s} Xi_s through degree 4
    for (id, _) in catalog::list() {
        let mut params = CatalogParams::default();
        match id.as_str() {
            "g3.02" => params.alpha = Some(0.5),
            "ball" => params.v = Some(vec![Complex64::new(0.4, 0.0), Complex64::new(0.0, 0.3)]),
            "ex6.4" => params.size = Some(3),
            _ => {}
        }
        let entry = catalog::get(&id, &params).unwrap();
        let g = entry.g;
        for alpha in freespectra::word::words_up_to(g, 4) {
            let xi_alpha = entry.xi.word_power(&alpha);
            for k in 1..=g {
                let lhs = entry.xi.entry(k) * &xi_alpha;
                let mut rhs = linalg::zeros(g, g);
                for s in 1..=g {
                    rhs += entry.xi.entry(s).map(|z| z * xi_alpha[(k - 1, s - 1)]);
                }
                assert!(
                    linalg::max_abs(&(lhs - rhs)) < 1e-10,
                    "entry {id}, word {alpha}, row {k}"
                );
            }
        }
    }
}

#[test]
fn catalog_nilpotent_entries_vanishing_words_transfer() {
    // if R^a = 0 then Xi^a = 0, checked on the nilpotent catalog entries
    for id in ["g2.I", "g3.01", "g3.03"] {
        let entry = catalog::get(id, &CatalogParams::default()).unwrap();
        for alpha in freespectra::word::words_up_to(entry.g, 5) {
            if alpha.is_empty() {
                continue;
            }
            let r_alpha = tuple::eval_word(&alpha, &entry.basis).unwrap();
            if linalg::max_abs(&r_alpha) < 1e-14 {
                let xi_alpha = entry.xi.word_power(&alpha);
                assert!(
                    linalg::max_abs(&xi_alpha) < 1e-12,
                    "entry {id}, word {alpha}"
                );
            }
        }
    }
}

#[test]
fn map_series_and_resolvent_agree_on_nilpotents() {
    let entry = catalog::get("g2.II", &CatalogParams::default()).unwrap();
    let (p, _) = entry.xi.map_series(5).unwrap();
    for seed in 0..5 {
        let x = rng::nilpotent_tuple(&mut rng::seeded(seed), 2, 4);
        let via_series = p.eval(&x).unwrap();
        let via_resolvent = entry.xi.map_eval(&x, false).unwrap();
        for j in 1..=2 {
            assert!(
                linalg::max_abs(&(via_series.entry(j) - via_resolvent.entry(j))) < 1e-10,
                "seed {seed}, component {j}"
            );
        }
    }
}

#[test]
fn structure_matrices_invert_embedding() {
    for (id, _) in catalog::list() {
        if id == "ball" || id == "ex6.4" || id == "g3.02" {
            continue;
        }
        let entry = catalog::get(&id, &CatalogParams::default()).unwrap();
        let embedded = entry.xi.embed_tuple();
        let recovered = convexotonic::structure_matrices(&embedded, &embedded, 1e-8).unwrap();
        assert!(
            recovered
                .tuple()
                .sub(entry.xi.tuple())
                .unwrap()
                .max_entry_norm()
                < 1e-12,
            "{id}"
        );
    }
}
