//! Truncated free (noncommutative) power series with matrix coefficients.
//!
//! A series is stored as a sparse map from words to `rows x cols` complex
//! coefficient matrices, together with a truncation degree. Arithmetic keeps
//! only the part of the result that is determined by the inputs.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::tuple::{eval_word, MatrixTuple};
use crate::word::Word;

/// Entries smaller than this are dropped from coefficient maps.
const DROP_TOL: f64 = 0.0;

#[derive(Clone, Debug)]
pub struct FreeSeries {
    g: usize,
    rows: usize,
    cols: usize,
    max_degree: usize,
    terms: BTreeMap<Word, CMatrix>,
}

impl FreeSeries {
    pub fn zero(g: usize, rows: usize, cols: usize, max_degree: usize) -> Self {
        FreeSeries {
            g,
            rows,
            cols,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    /// Scalar unit series `1`.
    pub fn one(g: usize, max_degree: usize) -> Self {
        Self::constant(linalg::identity(1), g, max_degree)
    }

    /// Constant series with the given coefficient at the empty word.
    pub fn constant(coeff: CMatrix, g: usize, max_degree: usize) -> Self {
        let mut s = Self::zero(g, coeff.nrows(), coeff.ncols(), max_degree);
        s.set_coeff(Word::empty(), coeff);
        s
    }

    /// The scalar variable `x_j` (1-based).
    pub fn variable(g: usize, j: u8, max_degree: usize) -> Self {
        assert!(j >= 1 && (j as usize) <= g, "variable index out of range");
        let mut s = Self::zero(g, 1, 1, max_degree);
        s.set_coeff(Word::letter(j), linalg::identity(1));
        s
    }

    /// Homogeneous linear series `sum_j A_j x_j` from a coefficient tuple.
    pub fn linear(a: &MatrixTuple, max_degree: usize) -> Self {
        let d = a.level();
        let mut s = Self::zero(a.g(), d, d, max_degree);
        for j in 1..=a.g() {
            s.set_coeff(Word::letter(j as u8), a.entry(j).clone());
        }
        s
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &CMatrix)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient at `w` (zero matrix if absent).
    pub fn coeff(&self, w: &Word) -> CMatrix {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| linalg::zeros(self.rows, self.cols))
    }

    pub fn set_coeff(&mut self, w: Word, c: CMatrix) {
        assert_eq!((c.nrows(), c.ncols()), (self.rows, self.cols));
        assert!(w.fits(self.g), "word letter exceeds variable count");
        if w.len() > self.max_degree || linalg::max_abs(&c) <= DROP_TOL {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, c);
        }
    }

    pub fn add_to_coeff(&mut self, w: &Word, c: &CMatrix) {
        if w.len() > self.max_degree {
            return;
        }
        let cur = self.coeff(w);
        self.set_coeff(w.clone(), cur + c);
    }

    /// Largest word length with a coefficient above `tol`, or None for the
    /// (numerically) zero series.
    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.terms
            .iter()
            .filter(|(_, c)| linalg::max_abs(c) > tol)
            .map(|(w, _)| w.len())
            .max()
    }

    /// True when the series is `sum_j c_j x_j` with no constant term.
    pub fn is_homogeneous_linear(&self, tol: f64) -> bool {
        self.terms
            .iter()
            .all(|(w, c)| w.len() == 1 || linalg::max_abs(c) <= tol)
    }

    pub fn truncate(&self, max_degree: usize) -> FreeSeries {
        let mut out = FreeSeries::zero(self.g, self.rows, self.cols, max_degree);
        for (w, c) in &self.terms {
            if w.len() <= max_degree {
                out.set_coeff(w.clone(), c.clone());
            }
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> FreeSeries {
        let mut out = self.clone();
        out.terms = self
            .terms
            .iter()
            .map(|(w, c)| (w.clone(), c.map(|e| e * z)))
            .collect();
        if z == Complex64::new(0.0, 0.0) {
            out.terms.clear();
        }
        out
    }

    pub fn add(&self, other: &FreeSeries) -> Result<FreeSeries, Error> {
        self.check_shape(other)?;
        let md = self.max_degree.min(other.max_degree);
        let mut out = self.truncate(md);
        for (w, c) in &other.terms {
            out.add_to_coeff(w, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FreeSeries) -> Result<FreeSeries, Error> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    fn check_shape(&self, other: &FreeSeries) -> Result<(), Error> {
        if self.g != other.g {
            return Err(Error::VariableMismatch {
                expected: self.g,
                got: other.g,
            });
        }
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Series product. Coefficients multiply as matrices, words concatenate.
    /// The result is truncated at `min` of the operand truncation degrees.
    pub fn mul(&self, other: &FreeSeries) -> Result<FreeSeries, Error> {
        if self.g != other.g {
            return Err(Error::VariableMismatch {
                expected: self.g,
                got: other.g,
            });
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "inner dimensions {} vs {}",
                self.cols, other.rows
            )));
        }
        let md = self.max_degree.min(other.max_degree);
        let mut out = FreeSeries::zero(self.g, self.rows, other.cols, md);
        for (u, cu) in &self.terms {
            if u.len() > md {
                continue;
            }
            for (v, cv) in &other.terms {
                if u.len() + v.len() > md {
                    continue;
                }
                out.add_to_coeff(&u.concat(v), &(cu * cv));
            }
        }
        Ok(out)
    }

    /// Formal adjoint: words reverse, coefficients take conjugate transpose.
    pub fn adjoint(&self) -> FreeSeries {
        let mut out = FreeSeries::zero(self.g, self.cols, self.rows, self.max_degree);
        for (w, c) in &self.terms {
            out.set_coeff(w.reversed(), c.adjoint());
        }
        out
    }

    /// Multiplicative inverse of a square series whose constant term is an
    /// invertible matrix, via the Neumann expansion around that constant.
    pub fn inverse(&self) -> Result<FreeSeries, Error> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("inverse of non-square series".into()));
        }
        let c0 = self.coeff(&Word::empty());
        let c0_inv = linalg::inverse(&c0)?;
        // self = c0 (I + c0^{-1} f_+); inverse = (sum_k (-c0^{-1} f_+)^k) c0^{-1}
        let mut tail = self.clone();
        tail.set_coeff(Word::empty(), linalg::zeros(self.rows, self.cols));
        let minus_step = FreeSeries::constant(c0_inv.clone(), self.g, self.max_degree)
            .mul(&tail)?
            .scale(Complex64::new(-1.0, 0.0));
        let mut acc = FreeSeries::constant(linalg::identity(self.rows), self.g, self.max_degree);
        let mut pw = acc.clone();
        for _ in 0..self.max_degree {
            pw = pw.mul(&minus_step)?;
            if pw.terms.is_empty() {
                break;
            }
            acc = acc.add(&pw)?;
        }
        acc.mul(&FreeSeries::constant(c0_inv, self.g, self.max_degree))
    }

    /// Evaluate at a matrix tuple: `f(X) = sum_w f_w (x) w(X)`, the
    /// coefficient sitting on the left of the Kronecker product.
    pub fn eval(&self, x: &MatrixTuple) -> Result<CMatrix, Error> {
        if x.g() != self.g {
            return Err(Error::VariableMismatch {
                expected: self.g,
                got: x.g(),
            });
        }
        let n = x.level();
        let mut acc = linalg::zeros(self.rows * n, self.cols * n);
        for (w, c) in &self.terms {
            acc += linalg::kron(c, &eval_word(w, x)?);
        }
        Ok(acc)
    }

    /// Crude lower estimate of the radius of convergence:
    /// `(sum_{|w|=N} ||f_w||)^{-1/N}` at the top stored degree `N`.
    pub fn convergence_radius_estimate(&self) -> Option<f64> {
        let n = self.degree(0.0)?;
        if n == 0 {
            return None;
        }
        let total: f64 = self
            .terms
            .iter()
            .filter(|(w, _)| w.len() == n)
            .map(|(_, c)| linalg::op_norm(c))
            .sum();
        if total == 0.0 {
            None
        } else {
            Some(total.powf(-1.0 / n as f64))
        }
    }

    /// Largest absolute difference of coefficients, over words up to the
    /// common truncation degree.
    pub fn coeff_distance(&self, other: &FreeSeries) -> Result<f64, Error> {
        self.check_shape(other)?;
        let md = self.max_degree.min(other.max_degree);
        let mut worst = 0.0f64;
        for (w, c) in self.terms.iter().chain(other.terms.iter()) {
            if w.len() > md {
                continue;
            }
            let d = linalg::max_abs(&(self.coeff(w) - other.coeff(w)));
            worst = worst.max(d);
            let _ = c;
        }
        Ok(worst)
    }
}

/// Truncated expansion of `(I - lam)^{-1} = sum_k lam^k` for a homogeneous
/// linear square series `lam`.
pub fn geometric_inverse(lam: &FreeSeries, n: usize) -> Result<FreeSeries, Error> {
    if lam.rows() != lam.cols() {
        return Err(Error::ShapeMismatch("linear part must be square".into()));
    }
    if !lam.is_homogeneous_linear(0.0) {
        return Err(Error::NotLinear);
    }
    let step = lam.truncate(n);
    let mut acc = FreeSeries::constant(linalg::identity(lam.rows()), lam.g(), n);
    let mut pw = acc.clone();
    for _ in 0..n {
        pw = pw.mul(&step)?;
        if pw.num_terms() == 0 {
            break;
        }
        acc = acc.add(&pw)?;
    }
    Ok(acc)
}

/// A tuple of scalar series in the same variables: a free map
/// `x -> (f^1(x), ..., f^h(x))`.
#[derive(Clone, Debug)]
pub struct FreeMap {
    components: Vec<FreeSeries>,
}

impl FreeMap {
    pub fn new(components: Vec<FreeSeries>) -> Result<Self, Error> {
        if components.is_empty() {
            return Err(Error::ShapeMismatch("map needs at least one component".into()));
        }
        let g = components[0].g();
        for c in &components {
            if c.g() != g {
                return Err(Error::VariableMismatch {
                    expected: g,
                    got: c.g(),
                });
            }
            if c.rows() != 1 || c.cols() != 1 {
                return Err(Error::ShapeMismatch(
                    "map components must have scalar coefficients".into(),
                ));
            }
        }
        Ok(FreeMap { components })
    }

    /// The identity map on `g` variables.
    pub fn identity(g: usize, max_degree: usize) -> Self {
        FreeMap {
            components: (1..=g as u8)
                .map(|j| FreeSeries::variable(g, j, max_degree))
                .collect(),
        }
    }

    pub fn g(&self) -> usize {
        self.components[0].g()
    }

    /// Number of output components.
    pub fn h(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[FreeSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &FreeSeries {
        &self.components[i - 1]
    }

    pub fn max_degree(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.max_degree())
            .min()
            .unwrap()
    }

    pub fn degree(&self, tol: f64) -> Option<usize> {
        self.components.iter().filter_map(|c| c.degree(tol)).max()
    }

    /// Evaluate every component at `X`, returning a tuple at the same level.
    pub fn eval(&self, x: &MatrixTuple) -> Result<MatrixTuple, Error> {
        MatrixTuple::new(
            self.components
                .iter()
                .map(|c| c.eval(x))
                .collect::<Result<_, _>>()?,
        )
    }

    /// Composition `self(other(x))` as truncated series. `other` must have as
    /// many components as `self` has variables, and each component of `other`
    /// must have zero constant term (so the composition is well defined
    /// degree by degree).
    pub fn compose(&self, other: &FreeMap) -> Result<FreeMap, Error> {
        if other.h() != self.g() {
            return Err(Error::VariableMismatch {
                expected: self.g(),
                got: other.h(),
            });
        }
        let md = self.max_degree().min(other.max_degree());
        for c in &other.components {
            if linalg::max_abs(&c.coeff(&Word::empty())) > 0.0 {
                return Err(Error::InvalidParameter(
                    "composition requires the inner map to vanish at the origin".into(),
                ));
            }
        }
        let g_inner = other.g();
        let components = self
            .components
            .iter()
            .map(|f| {
                // Substitute word by word, memoizing prefix products.
                let mut memo: BTreeMap<Word, FreeSeries> = BTreeMap::new();
                memo.insert(Word::empty(), FreeSeries::one(g_inner, md));
                let mut out = FreeSeries::zero(g_inner, 1, 1, md);
                for (w, c) in f.terms() {
                    if w.len() > md {
                        continue;
                    }
                    let prod = word_substitution(w, other, md, &mut memo)?;
                    out = out.add(&prod.scale(c[(0, 0)]))?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        FreeMap::new(components)
    }

    /// Composition `self(other(x))` for a polynomial outer map. Unlike
    /// `compose`, the inner components may carry constant terms; the result
    /// is computed exactly by multiplying out each word of `self`.
    pub fn compose_polynomial(&self, other: &FreeMap) -> Result<FreeMap, Error> {
        if other.h() != self.g() {
            return Err(Error::VariableMismatch {
                expected: self.g(),
                got: other.h(),
            });
        }
        let outer_deg = self.degree(0.0).unwrap_or(0);
        let inner_deg = other
            .components
            .iter()
            .filter_map(|c| c.degree(0.0))
            .max()
            .unwrap_or(0);
        let md = (outer_deg * inner_deg.max(1)).max(1);
        let g_inner = other.g();
        let components = self
            .components
            .iter()
            .map(|f| {
                let mut out = FreeSeries::zero(g_inner, 1, 1, md);
                for (w, c) in f.terms() {
                    let mut prod = FreeSeries::one(g_inner, md);
                    for &letter in w.letters() {
                        prod = prod.mul(&other.component(letter as usize).truncate(md))?;
                    }
                    out = out.add(&prod.scale(c[(0, 0)]))?;
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>, Error>>()?;
        FreeMap::new(components)
    }

    /// Largest coefficient distance across components.
    pub fn distance(&self, other: &FreeMap) -> Result<f64, Error> {
        if self.h() != other.h() {
            return Err(Error::ShapeMismatch("component count".into()));
        }
        let mut worst = 0.0f64;
        for (a, b) in self.components.iter().zip(&other.components) {
            worst = worst.max(a.coeff_distance(b)?);
        }
        Ok(worst)
    }

    /// True when every component is `sum c_j x_j`.
    pub fn is_homogeneous_linear(&self, tol: f64) -> bool {
        self.components.iter().all(|c| c.is_homogeneous_linear(tol))
    }
}

fn word_substitution(
    w: &Word,
    q: &FreeMap,
    md: usize,
    memo: &mut BTreeMap<Word, FreeSeries>,
) -> Result<FreeSeries, Error> {
    if let Some(s) = memo.get(w) {
        return Ok(s.clone());
    }
    let letters = w.letters();
    let head = letters[0] as usize;
    let tail = Word::from_letters(&letters[1..]);
    let rest = word_substitution(&tail, q, md, memo)?;
    let s = q.component(head).truncate(md).mul(&rest)?;
    memo.insert(w.clone(), s.clone());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::word;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn variable_times_variable() {
        let x1 = FreeSeries::variable(2, 1, 6);
        let x2 = FreeSeries::variable(2, 2, 6);
        let p = x1.mul(&x2).unwrap();
        assert_eq!(p.coeff(&Word::from_letters(&[1, 2]))[(0, 0)], c(1.0));
        assert_eq!(p.num_terms(), 1);
        // noncommutativity
        let q = x2.mul(&x1).unwrap();
        assert!(p.coeff_distance(&q).unwrap() > 0.5);
    }

    #[test]
    fn geometric_series_inverse() {
        // (1 - x1)^{-1} = 1 + x1 + x1^2 + ...
        let s = FreeSeries::one(1, 5)
            .sub(&FreeSeries::variable(1, 1, 5))
            .unwrap();
        let inv = s.inverse().unwrap();
        for k in 0..=5 {
            let w = Word::from_letters(&vec![1u8; k]);
            assert!((inv.coeff(&w)[(0, 0)] - c(1.0)).norm() < 1e-12, "k={k}");
        }
        // check s * inv = 1 up to truncation
        let prod = s.mul(&inv).unwrap();
        let dist = prod
            .truncate(4)
            .coeff_distance(&FreeSeries::one(1, 4))
            .unwrap();
        assert!(dist < 1e-12);
    }

    #[test]
    fn inverse_with_matrix_constant() {
        let mut s = FreeSeries::zero(2, 2, 2, 4);
        s.set_coeff(
            Word::empty(),
            CMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(0.0), c(1.0)]),
        );
        s.set_coeff(
            Word::letter(1),
            CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
        );
        let inv = s.inverse().unwrap();
        let prod = s.mul(&inv).unwrap();
        let id = FreeSeries::constant(linalg::identity(2), 2, 4);
        assert!(prod.coeff_distance(&id).unwrap() < 1e-12);
    }

    #[test]
    fn eval_matches_direct_polynomial() {
        // p = x2 + x1^2 at a random tuple
        let p = FreeSeries::variable(2, 2, 4)
            .add(
                &FreeSeries::variable(2, 1, 4)
                    .mul(&FreeSeries::variable(2, 1, 4))
                    .unwrap(),
            )
            .unwrap();
        let x = rng::ginibre_tuple(&mut rng::seeded(11), 2, 3);
        let lhs = p.eval(&x).unwrap();
        let rhs = x.entry(2) + x.entry(1) * x.entry(1);
        assert!(linalg::max_abs(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn eval_kron_coefficient_on_left() {
        // f = A x1 with A = e12 (2x2); f(X) = A (x) X1
        let mut f = FreeSeries::zero(1, 2, 2, 2);
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        f.set_coeff(Word::letter(1), a.clone());
        let x = rng::ginibre_tuple(&mut rng::seeded(3), 1, 2);
        let got = f.eval(&x).unwrap();
        let expect = linalg::kron(&a, x.entry(1));
        assert!(linalg::max_abs(&(got - expect)) < 1e-14);
    }

    #[test]
    fn adjoint_reverses_words() {
        let mut f = FreeSeries::zero(2, 1, 1, 3);
        f.set_coeff(Word::from_letters(&[1, 2]), CMatrix::from_element(1, 1, Complex64::new(0.0, 1.0)));
        let fa = f.adjoint();
        assert_eq!(
            fa.coeff(&Word::from_letters(&[2, 1]))[(0, 0)],
            Complex64::new(0.0, -1.0)
        );
    }

    #[test]
    fn adjoint_is_involutive_and_antimultiplicative() {
        let mut rng = rng::seeded(9);
        let mut f = FreeSeries::zero(2, 1, 1, 3);
        let mut g = FreeSeries::zero(2, 1, 1, 3);
        for w in word::words_up_to(2, 2) {
            f.set_coeff(w.clone(), rng::ginibre(&mut rng, 1, 1));
            g.set_coeff(w, rng::ginibre(&mut rng, 1, 1));
        }
        assert!(f.adjoint().adjoint().coeff_distance(&f).unwrap() < 1e-14);
        let lhs = f.mul(&g).unwrap().adjoint();
        let rhs = g.adjoint().mul(&f.adjoint()).unwrap();
        assert!(lhs.coeff_distance(&rhs).unwrap() < 1e-13);
    }

    #[test]
    fn compose_with_identity() {
        let p = FreeMap::new(vec![
            FreeSeries::variable(2, 1, 5),
            FreeSeries::variable(2, 2, 5)
                .add(
                    &FreeSeries::variable(2, 1, 5)
                        .mul(&FreeSeries::variable(2, 1, 5))
                        .unwrap(),
                )
                .unwrap(),
        ])
        .unwrap();
        let id = FreeMap::identity(2, 5);
        assert!(p.compose(&id).unwrap().distance(&p).unwrap() < 1e-14);
        assert!(id.compose(&p).unwrap().distance(&p).unwrap() < 1e-14);
    }

    #[test]
    fn compose_substitutes_words() {
        // f = x1 x2, q = (x2, x1^2) => f(q) = x2 x1^2
        let f = FreeMap::new(vec![FreeSeries::variable(2, 1, 6)
            .mul(&FreeSeries::variable(2, 2, 6))
            .unwrap()])
        .unwrap();
        let q = FreeMap::new(vec![
            FreeSeries::variable(2, 2, 6),
            FreeSeries::variable(2, 1, 6)
                .mul(&FreeSeries::variable(2, 1, 6))
                .unwrap(),
        ])
        .unwrap();
        let fq = f.compose(&q).unwrap();
        let expect = Word::from_letters(&[2, 1, 1]);
        assert!((fq.component(1).coeff(&expect)[(0, 0)] - c(1.0)).norm() < 1e-14);
        assert_eq!(fq.component(1).num_terms(), 1);
    }

    #[test]
    fn eval_respects_direct_sums() {
        let p = FreeSeries::variable(2, 1, 4)
            .mul(&FreeSeries::variable(2, 2, 4))
            .unwrap()
            .add(&FreeSeries::variable(2, 2, 4))
            .unwrap();
        let mut r = rng::seeded(21);
        let x = rng::ginibre_tuple(&mut r, 2, 2);
        let y = rng::ginibre_tuple(&mut r, 2, 3);
        let both = x.direct_sum(&y).unwrap();
        let px = p.eval(&x).unwrap();
        let py = p.eval(&y).unwrap();
        let pboth = p.eval(&both).unwrap();
        assert!(linalg::max_abs(&(pboth.view((0, 0), (2, 2)).clone_owned() - px)) < 1e-12);
        assert!(linalg::max_abs(&(pboth.view((2, 2), (3, 3)).clone_owned() - py)) < 1e-12);
    }

    #[test]
    fn fock_evaluation_recovers_coefficients() {
        // the coefficient of w in f equals <e_w applied part, vacuum> at the
        // truncated shift tuple
        let mut r = rng::seeded(33);
        let n = 3;
        let mut f = FreeSeries::zero(2, 1, 1, n);
        for w in word::words_up_to(2, n) {
            f.set_coeff(w, rng::ginibre(&mut r, 1, 1));
        }
        let s = crate::tuple::fock_shift_tuple(2, n);
        let fs = f.eval(&s).unwrap();
        let basis = word::words_up_to(2, n);
        // vacuum is the basis vector of the empty word (index 0)
        for (i, w) in basis.iter().enumerate() {
            let got = fs[(i, 0)];
            let expect = f.coeff(w)[(0, 0)];
            assert!((got - expect).norm() < 1e-12, "word {w}");
        }
    }

    #[test]
    fn convergence_radius_of_geometric() {
        let s = FreeSeries::one(1, 12)
            .sub(&FreeSeries::variable(1, 1, 12))
            .unwrap()
            .inverse()
            .unwrap();
        let r = s.convergence_radius_estimate().unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
