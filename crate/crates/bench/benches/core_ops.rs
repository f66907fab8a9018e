use criterion::{criterion_group, criterion_main, Criterion};

use freespectra::catalog::{self, CatalogParams};
use freespectra::certify;
use freespectra::convexotonic;
use freespectra::linalg;
use freespectra::pencil::Pencil;
use freespectra::rng;

fn catalog_load(c: &mut Criterion) {
    // includes the full self-validation (relations, extraction, series match)
    c.bench_function("catalog_get_g3_07", |b| {
        b.iter(|| catalog::get("g3.07", &CatalogParams::default()).unwrap())
    });
}

fn map_eval(c: &mut Criterion) {
    let entry = catalog::get("g3.07", &CatalogParams::default()).unwrap();
    let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut rng::seeded(5), 3, 8), 0.1);
    c.bench_function("map_eval_level_8", |b| {
        b.iter(|| entry.xi.map_eval(&x, false).unwrap())
    });
}

fn series_inverse_pair(c: &mut Criterion) {
    let entry = catalog::get("g2.IV", &CatalogParams::default()).unwrap();
    c.bench_function("inverse_pair_degree_6", |b| {
        b.iter(|| entry.xi.verify_inverse_pair(6, 0, 0).unwrap())
    });
}

fn certificate_pipeline(c: &mut Criterion) {
    let entry = catalog::get("g2.II", &CatalogParams::default()).unwrap();
    let d = entry.basis.level();
    let cmat = rng::haar_unitary(&mut rng::seeded(11), d);
    let a = Pencil::new(
        freespectra::MatrixTuple::new(
            entry
                .basis
                .entries()
                .iter()
                .map(|r| linalg::inverse(&(&cmat - linalg::identity(d))).unwrap() * r)
                .collect(),
        )
        .unwrap(),
    );
    c.bench_function("certificate_build_and_fock", |b| {
        b.iter(|| {
            let cert = certify::build_certificate(&a, &cmat, &linalg::identity(d), 5).unwrap();
            certify::verify_on_nilpotents(&cert, 4).unwrap()
        })
    });
}

fn structure_extraction(c: &mut Criterion) {
    let entry = catalog::get("g3.10", &CatalogParams::default()).unwrap();
    c.bench_function("structure_matrices", |b| {
        b.iter(|| convexotonic::structure_matrices(&entry.basis, &entry.basis, 1e-8).unwrap())
    });
}

criterion_group!(
    benches,
    catalog_load,
    map_eval,
    series_inverse_pair,
    certificate_pipeline,
    structure_extraction
);
criterion_main!(benches);
