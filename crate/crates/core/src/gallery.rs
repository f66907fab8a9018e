//! Constructive example families: the spectrahedral-pair builder from an
//! algebra basis and a unitary, and the block P-Q family with its
//! quadratic bianalytic maps and polynomial automorphism group.

use num_complex::Complex64;

use crate::certify;
use crate::convexotonic::{self, ConvexotonicTuple};
use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::pencil::Pencil;
use crate::rng;
use crate::series::{FreeMap, FreeSeries};
use crate::tuple::MatrixTuple;
use crate::word::Word;

/// Default spectral margin keeping 1 away from the spectrum of `C`.
pub const EIGENVALUE_MARGIN: f64 = 0.1;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A pair of pencils bianalytic under a convexotonic map.
#[derive(Clone, Debug)]
pub struct PairSpec {
    pub a: Pencil,
    pub c: CMatrix,
    pub b: Pencil,
    pub xi: ConvexotonicTuple,
    pub provenance: String,
}

/// Build a spectrahedral pair from an algebra basis `R` and a unitary `C`
/// whose spectrum stays away from 1: `A = (C - I)^{-1} R`, `B = C A`
/// (conjugated by `u` when given). The construction is verified through the
/// certificate pipeline before being returned.
pub fn build_pair(
    r: &MatrixTuple,
    cmat: &CMatrix,
    u: Option<&CMatrix>,
    margin: f64,
    provenance: &str,
) -> Result<PairSpec, Error> {
    let d = r.level();
    if cmat.nrows() != d || cmat.ncols() != d {
        return Err(Error::ShapeMismatch(format!(
            "C must be {d}x{d}, got {}x{}",
            cmat.nrows(),
            cmat.ncols()
        )));
    }
    let unitary_res = linalg::max_abs(&(linalg::adj(cmat) * cmat - linalg::identity(d)));
    if unitary_res > 1e-12 {
        return Err(Error::NotUnitary {
            residual: unitary_res,
        });
    }
    // for a normal matrix the singular values of C - I are the distances
    // of its eigenvalues to 1
    let c_minus_i = cmat - linalg::identity(d);
    let sv = linalg::singular_values(&c_minus_i);
    let min_dist = sv.last().copied().unwrap_or(0.0);
    if min_dist <= margin {
        return Err(Error::MarginViolated { margin: min_dist });
    }
    let xi = convexotonic::structure_matrices(r, r, 1e-8)?;
    let inv = linalg::inverse(&c_minus_i)?;
    let a = Pencil::new(MatrixTuple::new(
        r.entries().iter().map(|rj| &inv * rj).collect(),
    )?);
    let mut b_entries: Vec<CMatrix> = a
        .coefficients()
        .entries()
        .iter()
        .map(|aj| cmat * aj)
        .collect();
    if let Some(u) = u {
        let u_res = linalg::max_abs(&(linalg::adj(u) * u - linalg::identity(d)));
        if u_res > 1e-12 {
            return Err(Error::NotUnitary { residual: u_res });
        }
        b_entries = b_entries
            .into_iter()
            .map(|bj| linalg::adj(u) * bj * u)
            .collect();
    }
    let b = Pencil::new(MatrixTuple::new(b_entries)?);

    let cert = certify::build_certificate(&a, cmat, &linalg::identity(d), 4)?;
    let nil = certify::verify_on_nilpotents(&cert, 4)?;
    if nil.max_residual() > 1e-10 {
        return Err(Error::NotExtractable(format!(
            "constructed pair failed nilpotent verification ({})",
            nil.max_residual()
        )));
    }
    Ok(PairSpec {
        a,
        c: cmat.clone(),
        b,
        xi,
        provenance: provenance.to_string(),
    })
}

/// The block family built from an invertible `Q` and invertible
/// `P12, P21, P22` of the same size with `P21 P12 = -2Q`.
#[derive(Clone, Debug)]
pub struct PQFamily {
    pub q: CMatrix,
    pub p12: CMatrix,
    pub p21: CMatrix,
    pub p22: CMatrix,
    a: Pencil,
}

impl PQFamily {
    pub fn pencil(&self) -> &Pencil {
        &self.a
    }

    /// Block size of `Q` (the pencil has size `2k`).
    pub fn block_size(&self) -> usize {
        self.q.nrows()
    }

    /// Worked example data: `P12 = [[1,1],[1,0]]`, `P21 = [[2,-2],[0,1]]`,
    /// `P22 = I`, `Q = -P21 P12 / 2`.
    pub fn example() -> PQFamily {
        let (q, p12, p21) = example_blocks();
        pq_build(&q, &p12, &p21, &linalg::identity(2)).unwrap()
    }

    /// Variant with `P22 = P12* P12 + P21 P21*`, which admits the
    /// one-parameter automorphism group.
    pub fn example_automorphic() -> PQFamily {
        let (q, p12, p21) = example_blocks();
        let p22 = linalg::adj(&p12) * &p12 + &p21 * linalg::adj(&p21);
        pq_build(&q, &p12, &p21, &p22).unwrap()
    }

    /// Decide whether `P22 = a1 Q + a3 (P12* P12 + P21 P21*)` holds within
    /// `tol`.
    pub fn p22_in_span(&self, alpha1: Complex64, alpha3: Complex64, tol: f64) -> bool {
        let s = linalg::adj(&self.p12) * &self.p12 + &self.p21 * linalg::adj(&self.p21);
        let expect = self.q.map(|z| z * alpha1) + s.map(|z| z * alpha3);
        linalg::max_abs(&(&self.p22 - expect)) <= tol
    }

    /// Search for a nonzero `c` with `P21* + c P12` singular but
    /// `P21 - c P12` invertible; the outcome is reported, not asserted.
    pub fn c_condition_evidence(&self) -> CConditionReport {
        let p21_adj = linalg::adj(&self.p21);
        // det(P21* + c P12) is a polynomial in c of degree <= k; find its
        // roots by eigenvalues of -P12^{-1} P21* when P12 is invertible
        let report_default = CConditionReport {
            holds: false,
            c: None,
        };
        let inv_p12 = match linalg::inverse(&self.p12) {
            Ok(m) => m,
            Err(_) => return report_default,
        };
        // P21* + c P12 singular  <=>  det(P12) det(P12^{-1} P21* + cI) = 0
        let m = &inv_p12 * &p21_adj;
        let eigs = complex_eigenvalues(&m);
        for lambda in eigs {
            let cval = -lambda;
            if cval.norm() < 1e-10 {
                continue;
            }
            let diff = &self.p21 - self.p12.map(|z| z * cval);
            let sv = linalg::singular_values(&diff);
            if sv.last().copied().unwrap_or(0.0) > 1e-8 {
                return CConditionReport {
                    holds: true,
                    c: Some(cval),
                };
            }
        }
        report_default
    }
}

#[derive(Clone, Debug)]
pub struct CConditionReport {
    pub holds: bool,
    pub c: Option<Complex64>,
}

fn complex_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    match m.clone().try_schur(1e-12, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..t.nrows()).map(|i| t[(i, i)]).collect()
        }
        None => Vec::new(),
    }
}

fn example_blocks() -> (CMatrix, CMatrix, CMatrix) {
    let mut p12 = linalg::zeros(2, 2);
    p12[(0, 0)] = c(1.0);
    p12[(0, 1)] = c(1.0);
    p12[(1, 0)] = c(1.0);
    let mut p21 = linalg::zeros(2, 2);
    p21[(0, 0)] = c(2.0);
    p21[(0, 1)] = c(-2.0);
    p21[(1, 1)] = c(1.0);
    let q = (&p21 * &p12).map(|z| z * c(-0.5));
    (q, p12, p21)
}

/// Validate and assemble a block family.
pub fn pq_build(
    q: &CMatrix,
    p12: &CMatrix,
    p21: &CMatrix,
    p22: &CMatrix,
) -> Result<PQFamily, Error> {
    let k = q.nrows();
    for (name, m) in [("Q", q), ("P12", p12), ("P21", p21), ("P22", p22)] {
        if m.nrows() != k || m.ncols() != k {
            return Err(Error::ShapeMismatch(format!(
                "{name} must be {k}x{k}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let sv = linalg::singular_values(m);
        if sv.last().copied().unwrap_or(0.0) < 1e-10 {
            return Err(Error::InvalidParameter(format!("{name} is not invertible")));
        }
    }
    let constraint = p21 * p12 + q.map(|z| z * c(2.0));
    let res = linalg::max_abs(&constraint);
    if res > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "P21 P12 + 2Q must vanish, residual {res}"
        )));
    }
    // boundedness evidence for the one-variable spectrahedron of Q
    let dq = Pencil::new(MatrixTuple::new(vec![q.clone()])?);
    let evidence = dq.boundedness_evidence(200, 0);
    if !evidence.all_passed() {
        return Err(Error::InvalidParameter(
            "boundedness evidence for Q failed".into(),
        ));
    }
    let mut a1 = linalg::zeros(2 * k, 2 * k);
    a1.view_mut((0, k), (k, k)).copy_from(p12);
    a1.view_mut((k, 0), (k, k)).copy_from(p21);
    a1.view_mut((k, k), (k, k)).copy_from(p22);
    let mut a2 = linalg::zeros(2 * k, 2 * k);
    a2.view_mut((k, k), (k, k)).copy_from(q);
    let a = Pencil::new(MatrixTuple::new(vec![a1, a2])?);
    Ok(PQFamily {
        q: q.clone(),
        p12: p12.clone(),
        p21: p21.clone(),
        p22: p22.clone(),
        a,
    })
}

/// `V_gamma = diag(gamma I_k, I_k)`.
pub fn v_gamma(gamma: Complex64, k: usize) -> CMatrix {
    let mut v = linalg::identity(2 * k);
    for i in 0..k {
        v[(i, i)] = gamma;
    }
    v
}

#[derive(Clone, Debug)]
pub struct PQMap {
    pub gamma: Complex64,
    pub p: FreeMap,
    pub b: Pencil,
    pub xi: ConvexotonicTuple,
}

/// The quadratic bianalytic map `p = (x1, x2 + 2(1 - gamma) x1^2)` from the
/// family's spectrahedron onto that of `V_gamma A`, cross-checked against
/// the structure-matrix extraction.
pub fn pq_map(fam: &PQFamily, gamma: Complex64) -> Result<PQMap, Error> {
    if (gamma.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "gamma must be unimodular, |gamma| = {}",
            gamma.norm()
        )));
    }
    let k = fam.block_size();
    let v = v_gamma(gamma, k);
    let ext = certify::extract_convexotonic(&fam.a, &v, 1e-8)?;
    let mut xi1 = linalg::zeros(2, 2);
    xi1[(0, 1)] = -c(2.0) * (gamma - c(1.0));
    let dev = linalg::max_abs(&(ext.xi.entry(1) - xi1)).max(linalg::max_abs(ext.xi.entry(2)));
    if dev > 1e-10 {
        return Err(Error::NotExtractable(format!(
            "extracted structure matrices deviate from the closed form by {dev}"
        )));
    }
    let x1 = FreeSeries::variable(2, 1, 2);
    let x2 = FreeSeries::variable(2, 2, 2);
    let p = FreeMap::new(vec![
        x1.clone(),
        x2.add(&x1.mul(&x1)?.scale(c(2.0) * (c(1.0) - gamma)))?,
    ])?;
    if p.distance(&ext.p)? > 1e-10 {
        return Err(Error::NotExtractable(
            "extracted map disagrees with the closed form".into(),
        ));
    }
    let b = Pencil::new(MatrixTuple::new(
        fam.a
            .coefficients()
            .entries()
            .iter()
            .map(|aj| &v * aj)
            .collect(),
    )?);
    Ok(PQMap {
        gamma,
        p,
        b,
        xi: ext.xi,
    })
}

/// The polynomial automorphism `s_phi` of the family's spectrahedron, valid
/// when `P22 = a1 Q + a3 (P12* P12 + P21 P21*)`.
pub fn pq_automorphism(
    fam: &PQFamily,
    phi: Complex64,
    alpha1: Complex64,
    alpha3: Complex64,
) -> Result<FreeMap, Error> {
    if (phi.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "phi must be unimodular, |phi| = {}",
            phi.norm()
        )));
    }
    if !fam.p22_in_span(alpha1, alpha3, 1e-10) {
        return Err(Error::InvalidParameter(
            "P22 is not of the form a1 Q + a3 (P12* P12 + P21 P21*)".into(),
        ));
    }
    let one = c(1.0);
    let a3bar = alpha3.conj();
    let const1 = a3bar * (one - phi);
    let const2 = -a3bar * (one - phi) * (c(2.0) * a3bar * (one - phi) + alpha1);
    let lin21 = -(one - phi) * (c(4.0) * a3bar * phi - alpha1);
    let quad2 = c(2.0) * (one - phi * phi);

    let mut s1 = FreeSeries::zero(2, 1, 1, 2);
    s1.set_coeff(Word::empty(), linalg::identity(1).map(|z| z * const1));
    s1.set_coeff(Word::letter(1), linalg::identity(1).map(|z| z * phi));
    let mut s2 = FreeSeries::zero(2, 1, 1, 2);
    s2.set_coeff(Word::empty(), linalg::identity(1).map(|z| z * const2));
    s2.set_coeff(Word::letter(1), linalg::identity(1).map(|z| z * lin21));
    s2.set_coeff(Word::letter(2), linalg::identity(1));
    s2.set_coeff(
        Word::from_letters(&[1, 1]),
        linalg::identity(1).map(|z| z * quad2),
    );
    FreeMap::new(vec![s1, s2])
}

/// Map boundary points of `D_A` through `p` and measure how far the images
/// sit from the boundary of `D_B`. Returns the worst `|lambda_min|`.
pub fn boundary_map_residual(
    a: &Pencil,
    b: &Pencil,
    p: &FreeMap,
    per_level: usize,
    max_level: usize,
    seed: u64,
) -> Result<f64, Error> {
    let mut worst: f64 = 0.0;
    let mut index = 0u64;
    for level in 1..=max_level {
        for _ in 0..per_level {
            let mut r = rng::substream(seed, index);
            index += 1;
            let dir = rng::ginibre_tuple(&mut r, a.g(), level);
            let (_, x) = a.boundary_point(&dir, crate::pencil::BOUNDARY_TOL)?;
            let image = p.eval(&x)?;
            let eig = linalg::lambda_min(&b.eval(&image)?);
            worst = worst.max(eig.abs());
        }
    }
    Ok(worst)
}

/// Seeded search for an affine map `l` and matrix `Y` with
/// `L_A(l(X)) = Y* L_B(X) Y` at sampled points. A small best residual is
/// evidence of affine equivalence; a large one is evidence (not proof)
/// against it.
pub fn affine_equivalence_search(
    a: &Pencil,
    b: &Pencil,
    restarts: usize,
    seed: u64,
) -> f64 {
    let g = a.g();
    let d = a.d();
    let level = 2;
    let points: Vec<MatrixTuple> = (0..6)
        .map(|i| {
            let mut r = rng::substream(seed, 1000 + i);
            rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, g, level), 0.3)
        })
        .collect();

    let residual = |m: &CMatrix, shift: &[Complex64], y: &CMatrix| -> f64 {
        let mut total = 0.0f64;
        for x in &points {
            let n = x.level();
            let mut mapped = Vec::with_capacity(g);
            for i in 0..g {
                let mut acc = linalg::identity(n).map(|z| z * shift[i]);
                for j in 0..g {
                    acc += x.entry(j + 1).map(|z| z * m[(j, i)]);
                }
                mapped.push(acc);
            }
            let mapped = MatrixTuple::new(mapped).unwrap();
            let la = a.eval(&mapped).unwrap();
            let yk = linalg::kron(y, &linalg::identity(n));
            let lb = linalg::adj(&yk) * b.eval(x).unwrap() * yk;
            total = total.max(linalg::max_abs(&(la - lb)));
        }
        total
    };

    let mut best = f64::INFINITY;
    for restart in 0..restarts {
        let mut r = rng::substream(seed, restart as u64);
        let (mut m, mut shift, mut y) = if restart == 0 {
            (
                linalg::identity(g),
                vec![Complex64::new(0.0, 0.0); g],
                linalg::identity(d),
            )
        } else {
            (
                rng::ginibre(&mut r, g, g),
                (0..g).map(|_| rng::gaussian(&mut r) * c(0.2)).collect(),
                rng::haar_unitary(&mut r, d),
            )
        };
        let mut current = residual(&m, &shift, &y);
        let mut step = 0.2f64;
        for _ in 0..150 {
            let mut m2 = m.clone();
            for e in m2.iter_mut() {
                *e += rng::gaussian(&mut r) * c(step);
            }
            let mut shift2 = shift.clone();
            for e in shift2.iter_mut() {
                *e += rng::gaussian(&mut r) * c(step * 0.3);
            }
            let mut y2 = y.clone();
            for e in y2.iter_mut() {
                *e += rng::gaussian(&mut r) * c(step * 0.3);
            }
            let cand = residual(&m2, &shift2, &y2);
            if cand < current {
                current = cand;
                m = m2;
                shift = shift2;
                y = y2;
            } else {
                step *= 0.97;
            }
        }
        best = best.min(current);
    }
    best
}
