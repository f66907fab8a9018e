//! Shipped library of the low-dimensional convexotonic maps: the four
//! two-variable algebras, the twelve three-variable algebras, the
//! row-contraction ball family, and the truncated-shift family.
//!
//! Fixed entries are loaded from versioned JSON fixtures and revalidated on
//! load: the basis reproduces the structure matrices, the structure matrices
//! satisfy the convexotonic relations, and the stored closed-form maps match
//! the resolvent series through degree 8.

use num_complex::Complex64;
use serde::Deserialize;

use crate::convexotonic::{self, ConvexotonicTuple};
use crate::error::Error;
use crate::json::{self, TupleJson};
use crate::linalg::{self, CMatrix};
use crate::series::{FreeMap, FreeSeries};
use crate::tuple::MatrixTuple;

/// Truncation degree for the stored map series.
pub const SERIES_DEGREE: usize = 8;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub g: usize,
    /// Relation table of the underlying algebra, as text for auditing.
    pub relations: String,
    /// An algebra basis whose structure matrices are `xi`.
    pub basis: MatrixTuple,
    pub xi: ConvexotonicTuple,
    /// Closed-form map, truncated to `SERIES_DEGREE`.
    pub p: FreeMap,
    /// Closed-form inverse map, truncated to `SERIES_DEGREE`.
    pub q: FreeMap,
}

#[derive(Clone, Debug, Default)]
pub struct CatalogParams {
    /// Real parameter for the `g3.02` family.
    pub alpha: Option<f64>,
    /// Row vector with norm < 1 for the `ball` family.
    pub v: Option<Vec<Complex64>>,
    /// Variable count for the `ex6.4` truncated-shift family.
    pub size: Option<usize>,
}

#[derive(Deserialize)]
struct FixtureJson {
    id: String,
    g: usize,
    relations: String,
    #[serde(rename = "Xi")]
    xi: TupleJson,
    #[serde(rename = "R")]
    r: Option<TupleJson>,
}

const FIXTURES: &[(&str, &str)] = &[
    ("g2.I", include_str!("../fixtures/v1/g2_I.json")),
    ("g2.II", include_str!("../fixtures/v1/g2_II.json")),
    ("g2.III", include_str!("../fixtures/v1/g2_III.json")),
    ("g2.IV", include_str!("../fixtures/v1/g2_IV.json")),
    ("g3.01", include_str!("../fixtures/v1/g3_01.json")),
    ("g3.03", include_str!("../fixtures/v1/g3_03.json")),
    ("g3.04", include_str!("../fixtures/v1/g3_04.json")),
    ("g3.05", include_str!("../fixtures/v1/g3_05.json")),
    ("g3.06", include_str!("../fixtures/v1/g3_06.json")),
    ("g3.07", include_str!("../fixtures/v1/g3_07.json")),
    ("g3.08", include_str!("../fixtures/v1/g3_08.json")),
    ("g3.09", include_str!("../fixtures/v1/g3_09.json")),
    ("g3.10", include_str!("../fixtures/v1/g3_10.json")),
    ("g3.11", include_str!("../fixtures/v1/g3_11.json")),
    ("g3.12", include_str!("../fixtures/v1/g3_12.json")),
];

/// All entry ids with one-line descriptions, in deterministic order.
pub fn list() -> Vec<(String, String)> {
    let mut out = Vec::new();
    for id in [
        "g2.I", "g2.II", "g2.III", "g2.IV", "g3.01", "g3.02", "g3.03", "g3.04", "g3.05",
        "g3.06", "g3.07", "g3.08", "g3.09", "g3.10", "g3.11", "g3.12", "ball", "ex6.4",
    ] {
        out.push((id.to_string(), describe(id)));
    }
    out
}

fn describe(id: &str) -> String {
    match id {
        "g2.I" => "two variables, nilpotent; p = (x1, x2 + x1^2)".into(),
        "g2.II" => "two variables; p = ((1-x1)^-1 x1, (1-x1)^-1 x2)".into(),
        "g2.III" => "two variables; p = (x1 (1-x1)^-1, x2 (1-x1)^-1)".into(),
        "g2.IV" => "two variables; p = (x1 (1-x1)^-1, (1-x1)^-1 x2 (1-x1)^-1)".into(),
        "g3.02" => "three variables, parameter alpha; p = (x1, x2 + x1x3 + a x3x1, x3)".into(),
        "ball" => "row-contraction ball tuple for a vector v with |v| < 1".into(),
        "ex6.4" => "truncated-shift family attaining map degree g".into(),
        other if other.starts_with("g3.") => {
            format!("three variables, indecomposable algebra {}", &other[3..])
        }
        other => other.into(),
    }
}

/// Load and validate a catalog entry.
pub fn get(id: &str, params: &CatalogParams) -> Result<CatalogEntry, Error> {
    let entry = match id {
        "g3.02" => {
            let alpha = params
                .alpha
                .ok_or_else(|| Error::InvalidParameter("g3.02 requires alpha".into()))?;
            build_g3_02(alpha)?
        }
        "ball" => {
            let v = params
                .v
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("ball requires v".into()))?;
            build_ball(v)?
        }
        "ex6.4" => {
            let size = params
                .size
                .ok_or_else(|| Error::InvalidParameter("ex6.4 requires size".into()))?;
            build_shift_family(size)?
        }
        _ => {
            let (_, text) = FIXTURES
                .iter()
                .find(|(fid, _)| *fid == id)
                .ok_or_else(|| Error::UnknownCatalogId(id.to_string()))?;
            build_fixture(text)?
        }
    };
    validate(&entry)?;
    Ok(entry)
}

fn validate(entry: &CatalogEntry) -> Result<(), Error> {
    let residual = entry.xi.relation_residual();
    if residual > 1e-12 {
        return Err(Error::NotConvexotonic { residual });
    }
    let from_basis = convexotonic::structure_matrices(&entry.basis, &entry.basis, 1e-10)?;
    let basis_residual = from_basis
        .tuple()
        .sub(entry.xi.tuple())?
        .max_entry_norm();
    if basis_residual > 1e-10 {
        return Err(Error::NotExtractable(format!(
            "basis does not reproduce the structure matrices (residual {basis_residual})"
        )));
    }
    let (p, q) = entry.xi.map_series(SERIES_DEGREE)?;
    let dp = entry.p.distance(&p)?;
    let dq = entry.q.distance(&q)?;
    if dp > 1e-10 || dq > 1e-10 {
        return Err(Error::NotExtractable(format!(
            "stored maps disagree with the series (p: {dp}, q: {dq})"
        )));
    }
    Ok(())
}

fn build_fixture(text: &str) -> Result<CatalogEntry, Error> {
    let fx: FixtureJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    let xi_tuple = json::tuple_from_json(&fx.xi)?;
    if xi_tuple.g() != fx.g {
        return Err(Error::Json("fixture g disagrees with Xi".into()));
    }
    let xi = ConvexotonicTuple::validated(xi_tuple, 1e-12)?;
    let basis = match &fx.r {
        Some(r) => json::tuple_from_json(r)?,
        None => xi.embed_tuple(),
    };
    let (p, q) = closed_form(&fx.id)?;
    Ok(CatalogEntry {
        id: fx.id,
        g: fx.g,
        relations: fx.relations,
        basis,
        xi,
        p,
        q,
    })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn x(g: usize, j: u8) -> FreeSeries {
    FreeSeries::variable(g, j, SERIES_DEGREE)
}

/// `(1 - x_j)^{-1}` truncated.
fn im(g: usize, j: u8) -> FreeSeries {
    FreeSeries::one(g, SERIES_DEGREE)
        .sub(&x(g, j))
        .unwrap()
        .inverse()
        .unwrap()
}

/// `(1 + x_j)^{-1}` truncated.
fn ip(g: usize, j: u8) -> FreeSeries {
    FreeSeries::one(g, SERIES_DEGREE)
        .add(&x(g, j))
        .unwrap()
        .inverse()
        .unwrap()
}

fn prod(factors: &[&FreeSeries]) -> FreeSeries {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = acc.mul(f).unwrap();
    }
    acc
}

fn sum(terms: &[&FreeSeries]) -> FreeSeries {
    let mut acc = terms[0].clone();
    for t in &terms[1..] {
        acc = acc.add(t).unwrap();
    }
    acc
}

fn neg(s: &FreeSeries) -> FreeSeries {
    s.scale(c(-1.0))
}

/// The closed-form `(p, q)` for a fixed catalog id.
fn closed_form(id: &str) -> Result<(FreeMap, FreeMap), Error> {
    let (p, q): (Vec<FreeSeries>, Vec<FreeSeries>) = match id {
        "g2.I" => {
            let (x1, x2) = (x(2, 1), x(2, 2));
            let sq = prod(&[&x1, &x1]);
            (
                vec![x1.clone(), sum(&[&x2, &sq])],
                vec![x1, sum(&[&x2, &neg(&sq)])],
            )
        }
        "g2.II" => {
            let (x1, x2) = (x(2, 1), x(2, 2));
            let (a, b) = (im(2, 1), ip(2, 1));
            (
                vec![prod(&[&a, &x1]), prod(&[&a, &x2])],
                vec![prod(&[&b, &x1]), prod(&[&b, &x2])],
            )
        }
        "g2.III" => {
            let (x1, x2) = (x(2, 1), x(2, 2));
            let (a, b) = (im(2, 1), ip(2, 1));
            (
                vec![prod(&[&x1, &a]), prod(&[&x2, &a])],
                vec![prod(&[&x1, &b]), prod(&[&x2, &b])],
            )
        }
        "g2.IV" => {
            let (x1, x2) = (x(2, 1), x(2, 2));
            let (a, b) = (im(2, 1), ip(2, 1));
            (
                vec![prod(&[&x1, &a]), prod(&[&a, &x2, &a])],
                vec![prod(&[&x1, &b]), prod(&[&b, &x2, &b])],
            )
        }
        "g3.01" => return closed_form_g3_02(1.0),
        "g3.03" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let x1sq = prod(&[&x1, &x1]);
            let x1cb = prod(&[&x1sq, &x1]);
            let x1x2 = prod(&[&x1, &x2]);
            let x2x1 = prod(&[&x2, &x1]);
            (
                vec![
                    x1.clone(),
                    sum(&[&x2, &x1sq]),
                    sum(&[&x3, &x1cb, &x1x2, &x2x1]),
                ],
                vec![
                    x1,
                    sum(&[&x2, &neg(&x1sq)]),
                    sum(&[&x3, &x1cb, &neg(&x1x2), &neg(&x2x1)]),
                ],
            )
        }
        "g3.04" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            let x1x3 = prod(&[&x1, &x3]);
            (
                vec![
                    x1.clone(),
                    prod(&[&sum(&[&x2, &x1x3]), &a]),
                    prod(&[&x3, &a]),
                ],
                vec![
                    x1,
                    prod(&[&sum(&[&x2, &neg(&x1x3)]), &b]),
                    prod(&[&x3, &b]),
                ],
            )
        }
        "g3.05" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            (
                vec![prod(&[&a, &x1]), prod(&[&x2, &a]), prod(&[&x3, &a])],
                vec![prod(&[&b, &x1]), prod(&[&x2, &b]), prod(&[&x3, &b])],
            )
        }
        "g3.06" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            let x3x1 = prod(&[&x3, &x1]);
            (
                vec![
                    x1.clone(),
                    prod(&[&a, &sum(&[&x2, &x3x1])]),
                    prod(&[&x3, &a]),
                ],
                vec![
                    x1,
                    prod(&[&b, &sum(&[&x2, &neg(&x3x1)])]),
                    prod(&[&x3, &b]),
                ],
            )
        }
        "g3.07" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a3, b3) = (im(3, 3), ip(3, 3));
            let (a2, b2) = (im(3, 2), ip(3, 2));
            (
                vec![
                    prod(&[&a3, &x1, &a2]),
                    prod(&[&x2, &a2]),
                    prod(&[&x3, &a3]),
                ],
                vec![
                    prod(&[&b3, &x1, &b2]),
                    prod(&[&x2, &b2]),
                    prod(&[&x3, &b3]),
                ],
            )
        }
        "g3.08" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            (
                vec![prod(&[&a, &x1, &a]), prod(&[&x2, &a]), prod(&[&x3, &a])],
                vec![prod(&[&b, &x1, &b]), prod(&[&x2, &b]), prod(&[&x3, &b])],
            )
        }
        "g3.09" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            (
                vec![prod(&[&a, &x1]), prod(&[&a, &x2, &a]), prod(&[&x3, &a])],
                vec![prod(&[&b, &x1]), prod(&[&b, &x2, &b]), prod(&[&x3, &b])],
            )
        }
        "g3.10" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            (
                vec![prod(&[&a, &x1, &a]), prod(&[&a, &x2, &a]), prod(&[&x3, &a])],
                vec![prod(&[&b, &x1, &b]), prod(&[&b, &x2, &b]), prod(&[&x3, &b])],
            )
        }
        "g3.11" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            let x1x3 = prod(&[&x1, &x3]);
            let x3x1 = prod(&[&x3, &x1]);
            let x3x1x3 = prod(&[&x3x1, &x3]);
            (
                vec![
                    x1.clone(),
                    prod(&[&a, &sum(&[&x2, &x1x3, &x3x1, &neg(&x3x1x3)]), &a]),
                    prod(&[&x3, &a]),
                ],
                vec![
                    x1,
                    prod(&[
                        &b,
                        &sum(&[&x2, &neg(&x1x3), &neg(&x3x1), &neg(&x3x1x3)]),
                        &b,
                    ]),
                    prod(&[&x3, &b]),
                ],
            )
        }
        "g3.12" => {
            let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
            let (a, b) = (im(3, 3), ip(3, 3));
            let inner_p = sum(&[&prod(&[&x1, &a, &x1]), &x2]);
            let inner_q = sum(&[&x2, &neg(&prod(&[&x1, &b, &x1]))]);
            (
                vec![
                    prod(&[&a, &x1, &a]),
                    prod(&[&a, &inner_p, &a]),
                    prod(&[&x3, &a]),
                ],
                vec![
                    prod(&[&b, &x1, &b]),
                    prod(&[&b, &inner_q, &b]),
                    prod(&[&x3, &b]),
                ],
            )
        }
        other => return Err(Error::UnknownCatalogId(other.to_string())),
    };
    Ok((FreeMap::new(p)?, FreeMap::new(q)?))
}

fn closed_form_g3_02(alpha: f64) -> Result<(FreeMap, FreeMap), Error> {
    let (x1, x2, x3) = (x(3, 1), x(3, 2), x(3, 3));
    let x1x3 = prod(&[&x1, &x3]);
    let x3x1 = prod(&[&x3, &x1]).scale(c(alpha));
    let p = vec![x1.clone(), sum(&[&x2, &x1x3, &x3x1]), x3.clone()];
    let q = vec![x1, sum(&[&x2, &neg(&x1x3), &neg(&x3x1)]), x3];
    Ok((FreeMap::new(p)?, FreeMap::new(q)?))
}

fn build_g3_02(alpha: f64) -> Result<CatalogEntry, Error> {
    let z = linalg::zeros(3, 3);
    let mut xi1 = z.clone();
    xi1[(2, 1)] = c(alpha);
    let mut xi3 = z.clone();
    xi3[(0, 1)] = c(1.0);
    let xi = ConvexotonicTuple::validated(MatrixTuple::new(vec![xi1, z, xi3])?, 1e-12)?;
    let (p, q) = closed_form_g3_02(alpha)?;
    Ok(CatalogEntry {
        id: "g3.02".into(),
        g: 3,
        relations: format!(
            "R1R3 = R2, R3R1 = {alpha} R2 (alpha real); all other products zero"
        ),
        basis: xi.embed_tuple(),
        xi,
        p,
        q,
    })
}

fn build_ball(v: &[Complex64]) -> Result<CatalogEntry, Error> {
    let g = v.len();
    if g == 0 {
        return Err(Error::InvalidParameter("ball vector is empty".into()));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "ball requires |v| < 1, got {norm}"
        )));
    }
    let xi = convexotonic::ball_tuple(v);
    // p^i = (1 - sum_j conj(v_j) x_j)^{-1} x_i, and q with the opposite sign
    let mut s = FreeSeries::zero(g, 1, 1, SERIES_DEGREE);
    for (j, vj) in v.iter().enumerate() {
        s = s.add(&x(g, j as u8 + 1).scale(vj.conj()))?;
    }
    let inv_m = FreeSeries::one(g, SERIES_DEGREE).sub(&s)?.inverse()?;
    let inv_p = FreeSeries::one(g, SERIES_DEGREE).add(&s)?.inverse()?;
    let p = FreeMap::new(
        (1..=g as u8)
            .map(|i| inv_m.mul(&x(g, i)).unwrap())
            .collect(),
    )?;
    let q = FreeMap::new(
        (1..=g as u8)
            .map(|i| inv_p.mul(&x(g, i)).unwrap())
            .collect(),
    )?;
    Ok(CatalogEntry {
        id: "ball".into(),
        g,
        relations: "Xi_k Xi_j = conj(v_k) Xi_j (rank-one family)".into(),
        basis: xi.embed_tuple(),
        xi,
        p,
        q,
    })
}

fn build_shift_family(g: usize) -> Result<CatalogEntry, Error> {
    if g < 2 {
        return Err(Error::InvalidParameter("ex6.4 requires size >= 2".into()));
    }
    if g > 6 {
        return Err(Error::InvalidParameter("ex6.4 supports size <= 6".into()));
    }
    let mut s = linalg::zeros(g, g);
    for i in 0..g - 1 {
        s[(i, i + 1)] = c(1.0);
    }
    let mut entries = Vec::with_capacity(g);
    let mut pw = linalg::identity(g);
    for _ in 0..g {
        pw = &pw * &s;
        entries.push(pw.clone());
    }
    let xi = ConvexotonicTuple::validated(MatrixTuple::new(entries)?, 1e-12)?;
    // independent construction through explicit word powers
    let (p, q) = convexotonic::map_series_by_word_powers(&xi, SERIES_DEGREE)?;
    Ok(CatalogEntry {
        id: "ex6.4".into(),
        g,
        relations: "R_j = S^j for the truncated shift S; R_j R_k = R_{j+k} (zero past g)".into(),
        basis: xi.embed_tuple(),
        xi,
        p,
        q,
    })
}

/// The row-contraction ball automorphism
/// `F_v(x) = v - (1 - v v*)^{1/2} (1 - x v*)^{-1} x (I - v* v)^{1/2}`
/// evaluated at a tuple.
pub fn ball_automorphism(v: &[Complex64], x: &MatrixTuple) -> Result<MatrixTuple, Error> {
    let g = v.len();
    if x.g() != g {
        return Err(Error::VariableMismatch {
            expected: g,
            got: x.g(),
        });
    }
    let norm_sq = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if norm_sq >= 1.0 {
        return Err(Error::InvalidParameter("ball requires |v| < 1".into()));
    }
    let n = x.level();
    let scalar = (1.0 - norm_sq).sqrt();
    // (I_g - v* v)^{1/2} with (v* v)_{a,b} = conj(v_a) v_b
    let vsv = CMatrix::from_fn(g, g, |a, b| v[a].conj() * v[b]);
    let k = linalg::psd_sqrt(&(linalg::identity(g) - vsv), 1e-12)?;
    // (I_n - sum_j conj(v_j) X_j)^{-1}
    let mut resolvent = linalg::identity(n);
    for j in 0..g {
        resolvent -= x.entry(j + 1).map(|z| z * v[j].conj());
    }
    let resolvent = resolvent.try_inverse().ok_or(Error::OutsideDomain)?;
    let entries = (0..g)
        .map(|i| {
            let mut acc = linalg::identity(n).map(|z| z * v[i]);
            for j in 0..g {
                let w = k[(j, i)] * Complex64::new(scalar, 0.0);
                if w.norm() > 0.0 {
                    acc -= (&resolvent * x.entry(j + 1)).map(|z| z * w);
                }
            }
            acc
        })
        .collect();
    MatrixTuple::new(entries)
}

/// The row-contraction ball pencil on `C^(g+1)`: `A_j = e_1 e_{j+1}*`, whose
/// spectrahedron is the set of row contractions `sum X_j X_j* <= I`.
pub fn ball_pencil(g: usize) -> crate::pencil::Pencil {
    let entries = (0..g)
        .map(|j| {
            let mut a = linalg::zeros(g + 1, g + 1);
            a[(0, j + 1)] = c(1.0);
            a
        })
        .collect();
    crate::pencil::Pencil::new(MatrixTuple::new(entries).unwrap())
}
