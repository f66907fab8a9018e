//! One-term and hereditary positivity certificates.
//!
//! A one-term certificate packages a pencil `L_A`, a unitary `C` and an
//! isometry `W0`. From these it derives `R_j = (C - I) A_j`, the resolvent
//! series `W(x) = (I - Lambda_R(x))^{-1} W0` and
//! `G(x) = W0* C Lambda_A(x) W(x)`, so that
//! `I + G(X) + G(X)* = W(X)* L_A(X) W(X)` on nilpotent tuples and in a
//! neighborhood of the origin. The extraction routine recovers the
//! structure matrices of the underlying algebra from `(A, C)` alone.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::convexotonic::{self, ConvexotonicTuple};
use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::pencil::Pencil;
use crate::series::{self, FreeMap, FreeSeries};
use crate::tuple::{self, fock_shift_tuple, MatrixTuple};
use crate::word::{self, Word};
use crate::rng;

/// Unitarity and isometry tolerance for certificate inputs.
pub const INPUT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Certificate {
    a: Pencil,
    c: CMatrix,
    w0: CMatrix,
    r: MatrixTuple,
    w: FreeSeries,
    g_series: FreeSeries,
    degree: usize,
}

impl Certificate {
    pub fn pencil(&self) -> &Pencil {
        &self.a
    }

    pub fn c(&self) -> &CMatrix {
        &self.c
    }

    pub fn w0(&self) -> &CMatrix {
        &self.w0
    }

    /// The tuple `R = (C - I) A`.
    pub fn r(&self) -> &MatrixTuple {
        &self.r
    }

    /// Truncated series of `W(x) = (I - Lambda_R(x))^{-1} W0`.
    pub fn w_series(&self) -> &FreeSeries {
        &self.w
    }

    /// Truncated series of `G(x) = W0* C Lambda_A(x) W(x)`.
    pub fn g_series(&self) -> &FreeSeries {
        &self.g_series
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The compressed coefficients `B_j = W0* C A_j W0`.
    pub fn b_tuple(&self) -> MatrixTuple {
        let left = linalg::adj(&self.w0) * &self.c;
        MatrixTuple::new(
            self.a
                .coefficients()
                .entries()
                .iter()
                .map(|aj| &left * aj * &self.w0)
                .collect(),
        )
        .unwrap()
    }

    /// Copy with one `W` coefficient entry shifted, for detector tests.
    pub fn with_perturbed_w(&self, word: &Word, row: usize, col: usize, delta: Complex64) -> Certificate {
        let mut out = self.clone();
        let mut coeff = out.w.coeff(word);
        coeff[(row, col)] += delta;
        out.w.set_coeff(word.clone(), coeff);
        out
    }
}

/// Build a certificate from `(A, C, W0)` with series truncated at degree `n`.
pub fn build_certificate(
    a: &Pencil,
    c: &CMatrix,
    w0: &CMatrix,
    n: usize,
) -> Result<Certificate, Error> {
    let d = a.d();
    if c.nrows() != d || c.ncols() != d {
        return Err(Error::ShapeMismatch(format!(
            "C must be {d}x{d}, got {}x{}",
            c.nrows(),
            c.ncols()
        )));
    }
    if w0.nrows() != d {
        return Err(Error::ShapeMismatch(format!(
            "W0 must have {d} rows, got {}",
            w0.nrows()
        )));
    }
    let unitary_res = linalg::max_abs(&(linalg::adj(c) * c - linalg::identity(d)));
    if unitary_res > INPUT_TOL {
        return Err(Error::NotUnitary {
            residual: unitary_res,
        });
    }
    let e = w0.ncols();
    let isometry_res = linalg::max_abs(&(linalg::adj(w0) * w0 - linalg::identity(e)));
    if isometry_res > INPUT_TOL {
        return Err(Error::NotIsometry {
            residual: isometry_res,
        });
    }
    let g = a.g();
    let c_minus_i = c - linalg::identity(d);
    let r = MatrixTuple::new(
        a.coefficients()
            .entries()
            .iter()
            .map(|aj| &c_minus_i * aj)
            .collect(),
    )?;
    let resolvent = series::geometric_inverse(&FreeSeries::linear(&r, n), n)?;
    let w = resolvent.mul(&FreeSeries::constant(w0.clone(), g, n))?;
    let lam_a = FreeSeries::linear(a.coefficients(), n);
    let g_series = FreeSeries::constant(linalg::adj(w0) * c, g, n)
        .mul(&lam_a)?
        .mul(&w)?;
    let cert = Certificate {
        a: a.clone(),
        c: c.clone(),
        w0: w0.clone(),
        r,
        w,
        g_series,
        degree: n,
    };
    let check = verify_relations(&cert, n.min(3));
    if check.max_residual() > 1e-9 {
        return Err(Error::NotExtractable(format!(
            "construction failed its own relations (residual {})",
            check.max_residual()
        )));
    }
    Ok(cert)
}

/// Residuals of the coefficient identities, maximized over words up to the
/// requested degree.
#[derive(Clone, Debug)]
pub struct RelationReport {
    /// `W_b* A_k* W_{x_j a} + W_{x_k b}* A_j W_a + W_{x_k b}* W_{x_j a} = 0`.
    pub quadratic: f64,
    /// `W0* (A_k W_a + W_{x_k a}) = G_{x_k a}`.
    pub linear: f64,
    /// `W0* W0 = I`.
    pub isometry: f64,
    /// `W_{x_j a} = (C - I) A_j W_a`.
    pub w_recursion: f64,
    /// `G_{x_j a} = W0* C A_j R^a W0`.
    pub g_formula: f64,
}

impl RelationReport {
    pub fn max_residual(&self) -> f64 {
        self.quadratic
            .max(self.linear)
            .max(self.isometry)
            .max(self.w_recursion)
            .max(self.g_formula)
    }
}

pub fn verify_relations(cert: &Certificate, n: usize) -> RelationReport {
    let g = cert.a.g();
    let a = cert.a.coefficients();
    let n = n.min(cert.degree);
    let inner = if n == 0 { 0 } else { n - 1 };
    let words = word::words_up_to(g, inner);
    let w0 = &cert.w0;
    let w0_adj = linalg::adj(w0);
    let e = w0.ncols();

    let w_coeff = |w: &Word| cert.w.coeff(w);
    let g_coeff = |w: &Word| cert.g_series.coeff(w);

    let mut quadratic: f64 = 0.0;
    let mut linear: f64 = 0.0;
    let mut w_recursion: f64 = 0.0;
    let mut g_formula: f64 = 0.0;

    let c_minus_i = &cert.c - linalg::identity(cert.a.d());
    let left = &w0_adj * &cert.c;

    for alpha in &words {
        let w_alpha = w_coeff(alpha);
        let r_alpha = tuple::eval_word(alpha, &cert.r).unwrap();
        for j in 1..=g {
            let xj_alpha = alpha.prepend(j as u8);
            let w_xj_alpha = w_coeff(&xj_alpha);
            let aj = a.entry(j);

            let rec = &w_xj_alpha - &c_minus_i * aj * &w_alpha;
            w_recursion = w_recursion.max(linalg::max_abs(&rec));

            let gf = g_coeff(&xj_alpha) - &left * aj * &r_alpha * w0;
            g_formula = g_formula.max(linalg::max_abs(&gf));

            let lin = &w0_adj * (aj * &w_alpha + &w_xj_alpha) - g_coeff(&xj_alpha);
            linear = linear.max(linalg::max_abs(&lin));

            for beta in &words {
                let w_beta = w_coeff(beta);
                for k in 1..=g {
                    let ak = a.entry(k);
                    let w_xk_beta = w_coeff(&beta.prepend(k as u8));
                    let quad = linalg::adj(&w_beta) * linalg::adj(ak) * &w_xj_alpha
                        + linalg::adj(&w_xk_beta) * aj * &w_alpha
                        + linalg::adj(&w_xk_beta) * &w_xj_alpha;
                    quadratic = quadratic.max(linalg::max_abs(&quad));
                }
            }
        }
    }

    let isometry = linalg::max_abs(&(&w0_adj * w0 - linalg::identity(e)));
    RelationReport {
        quadratic,
        linear,
        isometry,
        w_recursion,
        g_formula,
    }
}

#[derive(Clone, Debug)]
pub struct NilpotentReport {
    pub fock_residual: f64,
    pub sample_residual: f64,
    pub samples: usize,
}

impl NilpotentReport {
    pub fn max_residual(&self) -> f64 {
        self.fock_residual.max(self.sample_residual)
    }
}

/// Residual of `I + G(X) + G(X)* - W(X)* L_A(X) W(X)` with the series
/// evaluated directly at `X`.
fn identity_residual_series(cert: &Certificate, x: &MatrixTuple) -> Result<f64, Error> {
    let wx = cert.w.eval(x)?;
    let gx = cert.g_series.eval(x)?;
    let lx = cert.a.eval(x)?;
    let lhs = linalg::identity(gx.nrows()) + &gx + linalg::adj(&gx);
    let rhs = linalg::adj(&wx) * lx * wx;
    Ok(linalg::max_abs(&(lhs - rhs)))
}

/// Check the certificate identity on the order-`n` truncated shift tuple and
/// on random jointly nilpotent tuples. Passing the shift check at order
/// `n - 1` certifies the coefficient identities up to degree `n`.
pub fn verify_on_nilpotents(cert: &Certificate, n: usize) -> Result<NilpotentReport, Error> {
    let g = cert.a.g();
    let order = n.saturating_sub(1).max(1).min(cert.degree);
    let fock = fock_shift_tuple(g, order);
    let fock_residual = identity_residual_series(cert, &fock)?;

    let samples = 20;
    let residuals: Result<Vec<f64>, Error> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(2024, i as u64);
            let size = (2 + (i % 3)).min(cert.degree + 1);
            let x = rng::nilpotent_tuple(&mut rng, g, size);
            identity_residual_series(cert, &x)
        })
        .collect();
    let sample_residual = residuals?.into_iter().fold(0.0f64, f64::max);
    Ok(NilpotentReport {
        fock_residual,
        sample_residual,
        samples,
    })
}

#[derive(Clone, Debug)]
pub struct SampleReport {
    pub samples: usize,
    pub skipped: usize,
    pub max_residual: f64,
}

/// Check the certificate identity at random tuples of joint spectral radius
/// below `radius`, with `W(X)` computed by a linear solve rather than the
/// truncated series.
pub fn verify_on_samples(
    cert: &Certificate,
    samples: usize,
    radius: f64,
    seed: u64,
) -> SampleReport {
    let g = cert.a.g();
    let d = cert.a.d();
    let w0 = &cert.w0;
    let results: Vec<Option<f64>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::substream(seed, i as u64);
            let level = 3;
            let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut rng, g, level), radius * 0.99);
            let m = x.level();
            let eye_m = linalg::identity(m);
            let mut resolvent = linalg::identity(d * m);
            let mut lam = linalg::zeros(d * m, d * m);
            for j in 1..=g {
                resolvent -= linalg::kron(cert.r.entry(j), x.entry(j));
                lam += linalg::kron(cert.a.coefficients().entry(j), x.entry(j));
            }
            let inv = resolvent.try_inverse()?;
            let wx = inv * linalg::kron(w0, &eye_m);
            let gx = linalg::kron(&(linalg::adj(w0) * &cert.c), &eye_m) * &lam * &wx;
            let lx = linalg::identity(d * m) + &lam + linalg::adj(&lam);
            let lhs = linalg::identity(gx.nrows()) + &gx + linalg::adj(&gx);
            let rhs = linalg::adj(&wx) * lx * wx;
            Some(linalg::max_abs(&(lhs - rhs)))
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    let max_residual = results.into_iter().flatten().fold(0.0f64, f64::max);
    SampleReport {
        samples,
        skipped,
        max_residual,
    }
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub xi: ConvexotonicTuple,
    /// `B = C A`.
    pub b: MatrixTuple,
    pub p: FreeMap,
    /// Worst relative residual of the module identities checked.
    pub max_residual: f64,
    /// Nilpotency order of `R`, when jointly nilpotent.
    pub r_order: Option<usize>,
    /// Nilpotency order of the extracted structure matrices.
    pub xi_order: Option<usize>,
}

/// Recover the structure matrices from `(A, C)` by solving
/// `A_k (C - I) A_j = sum_s (Xi_j)_{k,s} A_s` in least squares, then check
/// the module identity `A_k R^a = sum_t (Xi^a)_{k,t} A_t` through degree 4.
pub fn extract_convexotonic(a: &Pencil, c: &CMatrix, tol: f64) -> Result<Extraction, Error> {
    let d = a.d();
    let unitary_res = linalg::max_abs(&(linalg::adj(c) * c - linalg::identity(d)));
    if unitary_res > INPUT_TOL {
        return Err(Error::NotUnitary {
            residual: unitary_res,
        });
    }
    let g = a.g();
    let c_minus_i = c - linalg::identity(d);
    let r = MatrixTuple::new(
        a.coefficients()
            .entries()
            .iter()
            .map(|aj| &c_minus_i * aj)
            .collect(),
    )?;
    let xi = convexotonic::structure_matrices(a.coefficients(), &r, tol)?;

    let scale = a
        .coefficients()
        .max_entry_norm()
        .max(1e-300);
    let mut max_residual: f64 = 0.0;
    for alpha in word::words_up_to(g, 4) {
        let r_alpha = tuple::eval_word(&alpha, &r)?;
        let xi_alpha = xi.word_power(&alpha);
        for k in 1..=g {
            let mut rhs = linalg::zeros(d, d);
            for t in 1..=g {
                rhs += a.coefficients().entry(t).map(|z| z * xi_alpha[(k - 1, t - 1)]);
            }
            let res = linalg::max_abs(&(a.coefficients().entry(k) * &r_alpha - rhs)) / scale;
            max_residual = max_residual.max(res);
        }
    }
    if max_residual > tol {
        return Err(Error::NotAModule {
            residual: max_residual,
        });
    }

    let b = MatrixTuple::new(
        a.coefficients()
            .entries()
            .iter()
            .map(|aj| c * aj)
            .collect(),
    )?;
    let (p, _) = xi.map_series(8)?;

    let nil_order = |t: &MatrixTuple, top: usize| -> Option<usize> {
        (1..=top).find(|&k| t.is_jointly_nilpotent_of_order(k, 1e-10))
    };
    let r_order = nil_order(&r, d + 1);
    let xi_order = nil_order(xi.tuple(), g + 1);
    // words of length nu vanish for Xi, hence words of length nu + 1 vanish
    // for R, and vanishing R words force vanishing Xi words
    if let (Some(mu), Some(nu)) = (r_order, xi_order) {
        if !(nu <= mu && mu <= nu + 1) {
            return Err(Error::NotExtractable(format!(
                "nilpotency orders out of range: R order {mu}, Xi order {nu}"
            )));
        }
    }
    Ok(Extraction {
        xi,
        b,
        p,
        max_residual,
        r_order,
        xi_order,
    })
}

#[derive(Clone, Debug)]
pub struct PolyNilpotentReport {
    /// Smallest order at which `R` is jointly nilpotent, if any.
    pub nilpotent_order: Option<usize>,
    /// Degree of the truncated `W` series (None for identically zero).
    pub w_degree: Option<usize>,
    /// Whether the truncation stabilized, i.e. `W` is a polynomial.
    pub w_is_polynomial: bool,
    /// `R` nilpotent if and only if `W` polynomial.
    pub consistent: bool,
}

/// In the square case, `R` is jointly nilpotent exactly when `W` (and `G`)
/// are polynomials; reports the order against the degree.
pub fn check_polynomial_iff_nilpotent(cert: &Certificate) -> Result<PolyNilpotentReport, Error> {
    let d = cert.a.d();
    if cert.w0.ncols() != d {
        return Err(Error::ShapeMismatch(
            "polynomial-nilpotent check needs a square (invertible) W0".into(),
        ));
    }
    let nilpotent_order =
        (1..=d + 1).find(|&k| cert.r.is_jointly_nilpotent_of_order(k, 1e-10));
    let w_degree = cert.w.degree(1e-10);
    let w_is_polynomial = match w_degree {
        Some(deg) => deg < cert.degree,
        None => true,
    };
    let consistent = match nilpotent_order {
        Some(mu) => w_is_polynomial && w_degree.map_or(true, |deg| deg <= mu.saturating_sub(1)),
        None => !w_is_polynomial,
    };
    Ok(PolyNilpotentReport {
        nilpotent_order,
        w_degree,
        w_is_polynomial,
        consistent,
    })
}

/// A symmetric hereditary polynomial `h = sum h_{u,v} u(x)* v(x)` with
/// square matrix coefficients.
#[derive(Clone, Debug)]
pub struct HereditaryPoly {
    g: usize,
    nu: usize,
    terms: BTreeMap<(Word, Word), CMatrix>,
}

impl HereditaryPoly {
    pub fn new(g: usize, nu: usize) -> Self {
        HereditaryPoly {
            g,
            nu,
            terms: BTreeMap::new(),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &CMatrix)> {
        self.terms.iter()
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> CMatrix {
        self.terms
            .get(&(u.clone(), v.clone()))
            .cloned()
            .unwrap_or_else(|| linalg::zeros(self.nu, self.nu))
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: &CMatrix) {
        assert_eq!(c.nrows(), self.nu);
        assert_eq!(c.ncols(), self.nu);
        let key = (u, v);
        let entry = self
            .terms
            .entry(key.clone())
            .or_insert_with(|| linalg::zeros(self.nu, self.nu));
        *entry += c;
        if linalg::max_abs(entry) == 0.0 {
            self.terms.remove(&key);
        }
    }

    /// The pencil `L_A` viewed as a hereditary polynomial.
    pub fn from_pencil(l: &Pencil) -> Self {
        let mut h = HereditaryPoly::new(l.g(), l.d());
        let e = Word::empty();
        h.add_term(e.clone(), e.clone(), &linalg::identity(l.d()));
        for j in 1..=l.g() {
            let aj = l.coefficients().entry(j);
            h.add_term(e.clone(), Word::letter(j as u8), aj);
            h.add_term(Word::letter(j as u8), e.clone(), &linalg::adj(aj));
        }
        h
    }

    /// `h(X) = sum h_{u,v} (tensor) (X^u)* X^v`.
    pub fn eval(&self, x: &MatrixTuple) -> Result<CMatrix, Error> {
        if x.g() != self.g {
            return Err(Error::VariableMismatch {
                expected: self.g,
                got: x.g(),
            });
        }
        let m = x.level();
        let mut out = linalg::zeros(self.nu * m, self.nu * m);
        for ((u, v), c) in &self.terms {
            let xu = tuple::eval_word(u, x)?;
            let xv = tuple::eval_word(v, x)?;
            out += linalg::kron(c, &(linalg::adj(&xu) * xv));
        }
        Ok(out)
    }

    /// Max deviation from `h_{v,u} = h_{u,v}*`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ((u, v), c) in &self.terms {
            let flipped = self.coeff(v, u);
            worst = worst.max(linalg::max_abs(&(linalg::adj(c) - flipped)));
        }
        worst
    }

    /// Largest `max(|u|, |v|)` over stored terms.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|(u, v)| u.len().max(v.len()))
            .max()
            .unwrap_or(0)
    }
}

/// Expand `sum_k h_k* h_k + sum_j f_j* L f_j` into hereditary coefficients.
fn expand_weighted(
    l: &Pencil,
    squares: &[FreeSeries],
    weights: &[FreeSeries],
    nu: usize,
) -> Result<HereditaryPoly, Error> {
    let g = l.g();
    let mut out = HereditaryPoly::new(g, nu);
    for hk in squares {
        if hk.cols() != nu {
            return Err(Error::ShapeMismatch(format!(
                "square term must have {nu} columns, got {}",
                hk.cols()
            )));
        }
        for (v, cv) in hk.terms() {
            for (w, cw) in hk.terms() {
                out.add_term(v.clone(), w.clone(), &(linalg::adj(cv) * cw));
            }
        }
    }
    for f in weights {
        if f.rows() != l.d() || f.cols() != nu {
            return Err(Error::ShapeMismatch(format!(
                "weight must be {}x{nu}, got {}x{}",
                l.d(),
                f.rows(),
                f.cols()
            )));
        }
        for (v, cv) in f.terms() {
            for (w, cw) in f.terms() {
                // f* f
                out.add_term(v.clone(), w.clone(), &(linalg::adj(cv) * cw));
                for j in 1..=g {
                    let aj = l.coefficients().entry(j);
                    // f* (Lambda f): coefficient at (v, x_j w)
                    out.add_term(
                        v.clone(),
                        w.prepend(j as u8),
                        &(linalg::adj(cv) * aj * cw),
                    );
                    // (Lambda f)* f: coefficient at (x_j v, w)
                    out.add_term(
                        v.prepend(j as u8),
                        w.clone(),
                        &(linalg::adj(cv) * linalg::adj(aj) * cw),
                    );
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct HereditaryReport {
    pub max_mismatch: f64,
    /// The (left word, right word) position of the worst mismatch.
    pub worst_term: Option<(Word, Word)>,
    /// Smallest eigenvalue of `h(X)` over the sampled domain points.
    pub sample_min_eig: f64,
    pub samples: usize,
}

impl HereditaryReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_mismatch <= tol && self.sample_min_eig >= -tol
    }
}

/// Verify `h = sum h_k* h_k + sum f_j* L f_j` coefficientwise, then spot
/// check positivity of `h(X)` at sampled points of the spectrahedron.
pub fn verify_hereditary(
    l: &Pencil,
    h: &HereditaryPoly,
    squares: &[FreeSeries],
    weights: &[FreeSeries],
    tol: f64,
) -> Result<HereditaryReport, Error> {
    if h.g() != l.g() {
        return Err(Error::VariableMismatch {
            expected: l.g(),
            got: h.g(),
        });
    }
    let bound = h.degree() + 1;
    for (label, list) in [("square", squares), ("weight", weights)] {
        for s in list {
            if let Some(deg) = s.degree(0.0) {
                if deg > bound {
                    return Err(Error::DegreeBound(format!(
                        "{label} term has degree {deg}, bound is {bound}"
                    )));
                }
            }
        }
    }
    let expanded = expand_weighted(l, squares, weights, h.nu())?;

    let mut keys: Vec<(Word, Word)> = h.terms.keys().cloned().collect();
    for k in expanded.terms.keys() {
        if !h.terms.contains_key(k) {
            keys.push(k.clone());
        }
    }
    let mut max_mismatch: f64 = 0.0;
    let mut worst_term = None;
    for (u, v) in keys {
        let diff = linalg::max_abs(&(h.coeff(&u, &v) - expanded.coeff(&u, &v)));
        if diff > max_mismatch {
            max_mismatch = diff;
            worst_term = Some((u, v));
        }
    }

    let samples = 20;
    let mut sample_min_eig = f64::INFINITY;
    for i in 0..samples {
        let mut rng = rng::substream(77, i as u64);
        let level = 1 + (i % 3);
        let mut x = rng::rescale_to_norm(&rng::hermitian_tuple(&mut rng, l.g(), level), 0.5);
        // shrink until strictly inside the spectrahedron
        for _ in 0..60 {
            if linalg::lambda_min(&l.eval(&x)?) > 1e-9 {
                break;
            }
            x = x.scale(Complex64::new(0.5, 0.0));
        }
        let hx = h.eval(&x)?;
        sample_min_eig = sample_min_eig.min(linalg::lambda_min(&hx));
    }
    let _ = tol;
    Ok(HereditaryReport {
        max_mismatch,
        worst_term,
        sample_min_eig,
        samples,
    })
}
