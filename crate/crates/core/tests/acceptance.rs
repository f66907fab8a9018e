//! End-to-end acceptance checks. Each test prints a single PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).

use num_complex::Complex64;
use std::time::Instant;

use freespectra::catalog::{self, CatalogParams};
use freespectra::certify::{self, HereditaryPoly};
use freespectra::convexotonic::composition_probe;
use freespectra::gallery::{self, PQFamily};
use freespectra::generic;
use freespectra::linalg;
use freespectra::pencil::{scalar_tuple, Pencil, BOUNDARY_TOL};
use freespectra::rng;
use freespectra::series::{FreeMap, FreeSeries};
use freespectra::tuple::MatrixTuple;
use freespectra::word::Word;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn finish(num: usize, label: &str, result: Result<(), String>) {
    match result {
        Ok(()) => println!("[{num:2}] {label}: PASS"),
        Err(msg) => {
            println!("[{num:2}] {label}: FAIL ({msg})");
            panic!("criterion {num} ({label}) failed: {msg}");
        }
    }
}

const FIXED_IDS: [&str; 16] = [
    "g2.I", "g2.II", "g2.III", "g2.IV", "g3.01", "g3.02", "g3.03", "g3.04", "g3.05", "g3.06",
    "g3.07", "g3.08", "g3.09", "g3.10", "g3.11", "g3.12",
];

fn fixed_entry(id: &str) -> catalog::CatalogEntry {
    let params = CatalogParams {
        alpha: if id == "g3.02" { Some(0.5) } else { None },
        ..Default::default()
    };
    catalog::get(id, &params).unwrap()
}

#[test]
fn criterion_01_catalog_validity() {
    finish(1, "catalog validity", (|| {
        let start = Instant::now();
        for (i, id) in FIXED_IDS.iter().enumerate() {
            let entry = fixed_entry(id);
            if !entry.xi.is_convexotonic(1e-12) {
                return Err(format!("{id}: structure relations violated"));
            }
            let rep = entry
                .xi
                .verify_inverse_pair(8, 100, 400 + i as u64)
                .map_err(|e| format!("{id}: {e}"))?;
            if rep.series_residual >= 1e-10 {
                return Err(format!("{id}: series residual {}", rep.series_residual));
            }
            if rep.sample_residual >= 1e-8 {
                return Err(format!("{id}: sample residual {}", rep.sample_residual));
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 10.0 {
            return Err(format!("took {elapsed:.1}s, budget 10s"));
        }
        Ok(())
    })());
}

#[test]
fn criterion_02_degree_bounds() {
    finish(2, "nilpotent degree bounds", (|| {
        for id in FIXED_IDS {
            let entry = fixed_entry(id);
            let rep = entry
                .xi
                .nilpotency_and_degree()
                .map_err(|e| format!("{id}: {e}"))?;
            if let Some(nu) = rep.nilpotent_order {
                if nu > entry.g {
                    return Err(format!("{id}: order {nu} exceeds g = {}", entry.g));
                }
                if rep.map_degree != Some(nu) {
                    return Err(format!(
                        "{id}: deg p = {:?}, expected {nu}",
                        rep.map_degree
                    ));
                }
            }
        }
        for g in 2..=4usize {
            let params = CatalogParams {
                size: Some(g),
                ..Default::default()
            };
            let entry = catalog::get("ex6.4", &params).map_err(|e| format!("ex6.4: {e}"))?;
            let rep = entry.xi.nilpotency_and_degree().unwrap();
            if rep.map_degree != Some(g) {
                return Err(format!("ex6.4 g={g}: deg p = {:?}", rep.map_degree));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_03_pinned_formulas() {
    finish(3, "pinned quadratic maps", (|| {
        // the nilpotent two-variable entry has p = (x1, x2 + x1^2)
        let entry = catalog::get("g2.I", &CatalogParams::default()).unwrap();
        let mut want1 = FreeSeries::zero(2, 1, 1, 8);
        want1.set_coeff(Word::letter(1), linalg::identity(1));
        let mut want2 = FreeSeries::zero(2, 1, 1, 8);
        want2.set_coeff(Word::letter(2), linalg::identity(1));
        want2.set_coeff(Word::from_letters(&[1, 1]), linalg::identity(1));
        let want = FreeMap::new(vec![want1, want2]).unwrap();
        let dist = entry.p.distance(&want).map_err(|e| e.to_string())?;
        if dist >= 1e-12 {
            return Err(format!("g2.I map residual {dist}"));
        }

        // block family at gamma = -1: p = (x1, x2 + 4 x1^2)
        let fam = PQFamily::example();
        let pqm = gallery::pq_map(&fam, c(-1.0)).map_err(|e| e.to_string())?;
        let c2 = pqm.p.component(2);
        let quad = c2.coeff(&Word::from_letters(&[1, 1]))[(0, 0)];
        if (quad - c(4.0)).norm() >= 1e-10 {
            return Err(format!("gamma=-1 quadratic coefficient {quad}"));
        }

        // structure-matrix extraction for three unimodular gammas
        let third = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        for gamma in [c(-1.0), Complex64::new(0.0, 1.0), third] {
            let v = gallery::v_gamma(gamma, 2);
            let ext = certify::extract_convexotonic(fam.pencil(), &v, 1e-8)
                .map_err(|e| format!("gamma {gamma}: {e}"))?;
            let mut xi1 = linalg::zeros(2, 2);
            xi1[(0, 1)] = -c(2.0) * (gamma - c(1.0));
            let dev = linalg::max_abs(&(ext.xi.entry(1) - xi1))
                .max(linalg::max_abs(ext.xi.entry(2)));
            if dev >= 1e-10 {
                return Err(format!("gamma {gamma}: extraction residual {dev}"));
            }
        }
        Ok(())
    })());
}

/// Catalog bases paired with unitaries of spectral margin > 0.1 from 1.
fn seeded_pairs(count: usize) -> Vec<gallery::PairSpec> {
    let ids = ["g2.I", "g2.II", "g2.III", "g2.IV", "g3.01", "g3.04", "g3.07", "g3.10"];
    let mut pairs = Vec::with_capacity(count);
    let mut attempt = 0u64;
    while pairs.len() < count {
        let id = ids[pairs.len() % ids.len()];
        let entry = catalog::get(id, &CatalogParams::default()).unwrap();
        let d = entry.basis.level();
        let cmat = rng::haar_unitary(&mut rng::substream(7000, attempt), d);
        attempt += 1;
        match gallery::build_pair(&entry.basis, &cmat, None, 0.1, id) {
            Ok(pair) => pairs.push(pair),
            Err(_) => continue, // margin violated; draw another unitary
        }
        assert!(attempt < 400, "unitary sampling stalled");
    }
    pairs
}

#[test]
fn criterion_04_certificate_suite() {
    finish(4, "certificate suite on 20 pairs", (|| {
        let start = Instant::now();
        for (i, pair) in seeded_pairs(20).iter().enumerate() {
            let d = pair.a.d();
            let cert = certify::build_certificate(&pair.a, &pair.c, &linalg::identity(d), 6)
                .map_err(|e| format!("pair {i}: {e}"))?;
            let rel = certify::verify_relations(&cert, 6);
            if rel.quadratic.max(rel.linear).max(rel.isometry) >= 1e-10 {
                return Err(format!("pair {i}: relation residual {}", rel.max_residual()));
            }
            if rel.w_recursion >= 1e-12 || rel.g_formula >= 1e-12 {
                return Err(format!(
                    "pair {i}: recursion {} / formula {}",
                    rel.w_recursion, rel.g_formula
                ));
            }
            let nil = certify::verify_on_nilpotents(&cert, 4).map_err(|e| e.to_string())?;
            if nil.max_residual() >= 1e-10 {
                return Err(format!("pair {i}: nilpotent residual {}", nil.max_residual()));
            }
            let samp = certify::verify_on_samples(&cert, 100, 0.05, 9000 + i as u64);
            if samp.max_residual >= 1e-8 {
                return Err(format!("pair {i}: sample residual {}", samp.max_residual));
            }
        }
        let elapsed = start.elapsed().as_secs_f64();
        if elapsed >= 60.0 {
            return Err(format!("took {elapsed:.1}s, budget 60s"));
        }
        Ok(())
    })());
}

#[test]
fn criterion_05_perturbation_detection() {
    finish(5, "perturbation detection", (|| {
        let pair = seeded_pairs(1).remove(0);
        let d = pair.a.d();
        let cert =
            certify::build_certificate(&pair.a, &pair.c, &linalg::identity(d), 5).unwrap();
        for (row, col) in [(0, 0), (1, d - 1)] {
            let bad = cert.with_perturbed_w(&Word::letter(1), row, col, c(1e-3));
            let rel = certify::verify_relations(&bad, 5);
            if rel.max_residual() < 1e-4 {
                return Err(format!(
                    "coefficient check missed ({row},{col}): {}",
                    rel.max_residual()
                ));
            }
            let nil = certify::verify_on_nilpotents(&bad, 5).map_err(|e| e.to_string())?;
            if nil.max_residual() < 1e-4 {
                return Err(format!(
                    "nilpotent check missed ({row},{col}): {}",
                    nil.max_residual()
                ));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_06_block_family_end_to_end() {
    finish(6, "block family end to end", (|| {
        let fam = PQFamily::example();
        let evidence = fam.pencil().boundedness_evidence(1000, 0);
        if !evidence.all_passed() {
            return Err("boundedness evidence failed".into());
        }
        let pqm = gallery::pq_map(&fam, c(-1.0)).map_err(|e| e.to_string())?;
        let worst = gallery::boundary_map_residual(fam.pencil(), &pqm.b, &pqm.p, 50, 3, 11)
            .map_err(|e| e.to_string())?;
        if worst >= 1e-7 {
            return Err(format!("boundary image residual {worst}"));
        }

        let fam_auto = PQFamily::example_automorphic();
        let auto = |phi: Complex64| gallery::pq_automorphism(&fam_auto, phi, c(0.0), c(1.0));
        let s1 = auto(c(1.0)).map_err(|e| e.to_string())?;
        let id = FreeMap::identity(2, 2);
        if s1.distance(&id).unwrap() != 0.0 {
            return Err("s_1 is not exactly the identity".into());
        }
        let mut r = rng::seeded(31);
        for i in 0..10 {
            let phi = Complex64::from_polar(1.0, rng::gaussian(&mut r).re * 3.0);
            let psi = Complex64::from_polar(1.0, rng::gaussian(&mut r).re * 3.0);
            let lhs = auto(phi)
                .unwrap()
                .compose_polynomial(&auto(psi).unwrap())
                .map_err(|e| e.to_string())?;
            let rhs = auto(phi * psi).unwrap();
            let dist = lhs.distance(&rhs).unwrap();
            if dist >= 1e-10 {
                return Err(format!("group law failed at pair {i}: {dist}"));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_07_ball_family() {
    finish(7, "ball automorphisms", (|| {
        let g = 2usize;
        let mut r = rng::seeded(57);
        for i in 0..10 {
            let raw: Vec<Complex64> = (0..g).map(|_| rng::gaussian(&mut r)).collect();
            let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let scale = 0.7 * ((i + 1) as f64 / 10.0) / norm;
            let v: Vec<Complex64> = raw.iter().map(|z| z * c(scale)).collect();
            let xi = freespectra::convexotonic::ball_tuple(&v);
            if xi.relation_residual() != 0.0 {
                return Err(format!("ball tuple {i} not exactly convexotonic"));
            }
        }

        let v = vec![c(0.4), Complex64::new(0.1, 0.35)];
        let l = catalog::ball_pencil(g);
        let mut index = 0u64;
        for level in 1..=3usize {
            for _ in 0..10 {
                let dir = rng::ginibre_tuple(&mut rng::substream(58, index), g, level);
                index += 1;
                let (_, x) = l.boundary_point(&dir, BOUNDARY_TOL).map_err(|e| e.to_string())?;
                let image = catalog::ball_automorphism(&v, &x).map_err(|e| e.to_string())?;
                let eig = linalg::lambda_min(&l.eval(&image).unwrap());
                if eig.abs() >= 1e-7 {
                    return Err(format!("boundary image at level {level}: margin {eig}"));
                }
            }
        }

        let at_v = catalog::ball_automorphism(&v, &scalar_tuple(&v)).unwrap();
        if at_v.max_entry_norm() >= 1e-10 {
            return Err(format!("F_v(v) = {} != 0", at_v.max_entry_norm()));
        }
        Ok(())
    })());
}

#[test]
fn criterion_08_composition_non_closure() {
    finish(8, "composition non-closure", (|| {
        let entry = catalog::get("g2.I", &CatalogParams::default()).unwrap();
        let swap =
            freespectra::CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let b = entry.xi.change_basis(&swap).map_err(|e| e.to_string())?;
        let rep = composition_probe(&entry.xi, &b, 8).map_err(|e| e.to_string())?;
        let expect: &[(&[u8], usize)] = &[
            (&[1], 1),
            (&[2, 2], 1),
            (&[2], 2),
            (&[1, 1], 2),
            (&[1, 2, 2], 2),
            (&[2, 2, 1], 2),
            (&[2, 2, 2, 2], 2),
        ];
        for (letters, comp) in expect {
            let val = rep
                .composite
                .component(*comp)
                .coeff(&Word::from_letters(letters))[(0, 0)];
            if (val - c(1.0)).norm() >= 1e-12 {
                return Err(format!("coefficient at {letters:?} in p^{comp} is {val}"));
            }
        }
        let terms: usize = (1..=2).map(|i| rep.composite.component(i).num_terms()).sum();
        if terms != expect.len() {
            return Err(format!("composite has {terms} terms, expected {}", expect.len()));
        }
        if rep.degree != 4 || rep.convexotonic {
            return Err(format!(
                "expected degree 4 > g = 2 and non-convexotonic, got degree {} ({})",
                rep.degree, rep.convexotonic
            ));
        }
        Ok(())
    })());
}

#[test]
fn criterion_09_hereditary_verifier() {
    finish(9, "hereditary verifier", (|| {
        // h = L_A with the single weight f = I
        let a = Pencil::new(rng::hermitian_tuple(&mut rng::seeded(61), 2, 3));
        let h = HereditaryPoly::from_pencil(&a);
        let f = FreeSeries::constant(linalg::identity(3), 2, 2);
        let rep = certify::verify_hereditary(&a, &h, &[], &[f.clone()], 1e-12)
            .map_err(|e| e.to_string())?;
        if rep.max_mismatch != 0.0 {
            return Err(format!("pencil certificate mismatch {}", rep.max_mismatch));
        }

        // h = x* x over the trivial pencil, certified by the square [x]
        let trivial = Pencil::new(MatrixTuple::new(vec![linalg::zeros(1, 1)]).unwrap());
        let mut sq = HereditaryPoly::new(1, 1);
        sq.add_term(Word::letter(1), Word::letter(1), &linalg::identity(1));
        let x = FreeSeries::variable(1, 1, 2);
        let rep = certify::verify_hereditary(&trivial, &sq, &[x.clone()], &[], 1e-12)
            .map_err(|e| e.to_string())?;
        if rep.max_mismatch != 0.0 {
            return Err(format!("square certificate mismatch {}", rep.max_mismatch));
        }

        // a 1e-3 bump in any single target coefficient must be located
        let mut bad = HereditaryPoly::from_pencil(&a);
        let bump = linalg::identity(3).map(|z| z * c(1e-3 / 3.0));
        bad.add_term(Word::empty(), Word::letter(2), &bump);
        let rep = certify::verify_hereditary(&a, &bad, &[], &[f], 1e-12).unwrap();
        if rep.max_mismatch < 1e-4 {
            return Err(format!("perturbed pencil accepted ({})", rep.max_mismatch));
        }
        let (u, v) = rep.worst_term.clone().ok_or("no located mismatch")?;
        if !(u.is_empty() && v == Word::letter(2)) {
            return Err(format!("mismatch located at ({u}, {v})"));
        }

        let mut bad_sq = sq.clone();
        bad_sq.add_term(Word::letter(1), Word::letter(1), &linalg::identity(1).map(|z| z * c(1e-3)));
        let rep = certify::verify_hereditary(&trivial, &bad_sq, &[x], &[], 1e-12).unwrap();
        if rep.max_mismatch < 1e-4 || rep.worst_term.is_none() {
            return Err(format!("perturbed square accepted ({})", rep.max_mismatch));
        }
        Ok(())
    })());
}

#[test]
fn criterion_10_genericity() {
    finish(10, "genericity witnesses", (|| {
        for i in 0..10u64 {
            let a = Pencil::new(rng::ginibre_tuple(&mut rng::substream(83, i), 2, 3));
            let report = generic::check_sv_generic(&a, 500, 8300 + i);
            if !report.witnessed {
                return Err(format!("random pencil {i} not witnessed in budget"));
            }
        }

        // single Jordan cell: every probe kernel is spanned by e_2, so no
        // hyperbasis of 3 vectors can ever be assembled
        let mut jordan = linalg::zeros(2, 2);
        jordan[(0, 1)] = c(1.0);
        let a = Pencil::new(MatrixTuple::new(vec![jordan]).unwrap());
        let report = generic::check_sv_generic(&a, 200, 17);
        if report.witnessed || report.hyperbasis_indices.is_some() {
            return Err("degenerate pencil spuriously witnessed".into());
        }

        let fam = PQFamily::example();
        let probes: Vec<MatrixTuple> = (0..6)
            .map(|i| rng::ginibre_tuple(&mut rng::substream(9, i), 2, 4))
            .collect();
        let report =
            generic::check_eig_star_generic(fam.pencil(), &probes).map_err(|e| e.to_string())?;
        if !report.eig.witnessed {
            return Err("block example eig-genericity not witnessed".into());
        }
        Ok(())
    })());
}
