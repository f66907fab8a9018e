//! Monic linear pencils `L_A(x) = I + Λ_A(x) + Λ_A(x)*` and their free
//! spectrahedra `D_A = { X : L_A(X) >= 0 }`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::rng;
use crate::tuple::MatrixTuple;

/// Default tolerance for the interior/boundary/outside split on `lambda_min`.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// A monic linear pencil, stored through its coefficient tuple.
#[derive(Clone, Debug)]
pub struct Pencil {
    a: MatrixTuple,
}

impl Pencil {
    pub fn new(a: MatrixTuple) -> Self {
        Pencil { a }
    }

    pub fn g(&self) -> usize {
        self.a.g()
    }

    /// Coefficient size d.
    pub fn d(&self) -> usize {
        self.a.level()
    }

    pub fn coefficients(&self) -> &MatrixTuple {
        &self.a
    }

    /// `Λ_A(X) = sum_j A_j (x) X_j`.
    pub fn eval_lambda(&self, x: &MatrixTuple) -> Result<CMatrix, Error> {
        if x.g() != self.g() {
            return Err(Error::VariableMismatch {
                expected: self.g(),
                got: x.g(),
            });
        }
        let n = x.level();
        let mut acc = linalg::zeros(self.d() * n, self.d() * n);
        for j in 1..=self.g() {
            acc += linalg::kron(self.a.entry(j), x.entry(j));
        }
        Ok(acc)
    }

    /// `Λ_A(α)` at a scalar point `α ∈ C^g` (a d x d matrix).
    pub fn eval_lambda_scalar(&self, alpha: &[Complex64]) -> Result<CMatrix, Error> {
        if alpha.len() != self.g() {
            return Err(Error::VariableMismatch {
                expected: self.g(),
                got: alpha.len(),
            });
        }
        let mut acc = linalg::zeros(self.d(), self.d());
        for j in 1..=self.g() {
            acc += self.a.entry(j).map(|z| z * alpha[j - 1]);
        }
        Ok(acc)
    }

    /// `L_A(X) = I + Λ_A(X) + Λ_A(X)*`, explicitly symmetrized.
    pub fn eval(&self, x: &MatrixTuple) -> Result<CMatrix, Error> {
        let lam = self.eval_lambda(x)?;
        let raw = linalg::identity(self.d() * x.level()) + &lam + lam.adjoint();
        let sym = (&raw + raw.adjoint()).scale(0.5);
        debug_assert!(linalg::max_abs(&(&sym - &raw)) < 1e-12);
        Ok(sym)
    }

    /// Membership classification of `X` in `D_A` by the smallest eigenvalue
    /// of `L_A(X)`.
    pub fn membership(&self, x: &MatrixTuple, tol: f64) -> Result<(Membership, f64), Error> {
        let min_eig = linalg::lambda_min(&self.eval(x)?);
        let verdict = if min_eig > tol {
            Membership::Interior
        } else if min_eig >= -tol {
            Membership::Boundary
        } else {
            Membership::Outside
        };
        Ok((verdict, min_eig))
    }

    /// Scale a nonzero direction until the ray `t -> t·direction` crosses the
    /// boundary of `D_A`, then bisect `t` to relative width `1e-12`. Returns
    /// `(t, t·direction)`.
    pub fn boundary_point(
        &self,
        direction: &MatrixTuple,
        tol: f64,
    ) -> Result<(f64, MatrixTuple), Error> {
        if direction.max_entry_norm() == 0.0 {
            return Err(Error::InvalidParameter("zero direction".into()));
        }
        let min_at = |t: f64| -> Result<f64, Error> {
            Ok(linalg::lambda_min(
                &self.eval(&direction.scale(Complex64::new(t, 0.0)))?,
            ))
        };
        const T_MAX: f64 = 1e8;
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        while min_at(hi)? >= 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > T_MAX {
                return Err(Error::UnboundedDirection { t_max: T_MAX });
            }
        }
        while hi - lo > 1e-12 * hi {
            let mid = 0.5 * (lo + hi);
            if min_at(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let x = direction.scale(Complex64::new(t, 0.0));
        let residual = min_at(t)?;
        if residual.abs() > tol {
            return Err(Error::InvalidParameter(format!(
                "bisection stalled, |lambda_min| = {}",
                residual.abs()
            )));
        }
        Ok((t, x))
    }

    /// Randomized evidence for boundedness of `D_A`: for each sampled unit
    /// direction `α ∈ C^g`, the Hermitian part `Λ_A(α) + Λ_A(α)*` must be
    /// indefinite. A failed direction proves `D_A(1)` unbounded along it; an
    /// all-pass run is evidence only.
    pub fn boundedness_evidence(&self, samples: usize, seed: u64) -> BoundednessReport {
        let results: Vec<Option<Vec<Complex64>>> = (0..samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut r = rng::substream(seed, i);
                let v = rng::unit_vector(&mut r, self.g());
                let alpha: Vec<Complex64> = v.iter().copied().collect();
                let lam = self.eval_lambda_scalar(&alpha).unwrap();
                let evs = linalg::hermitian_eigenvalues(&(&lam + lam.adjoint()));
                let indefinite = evs[0] < -1e-9 && evs[evs.len() - 1] > 1e-9;
                if indefinite {
                    None
                } else {
                    Some(alpha)
                }
            })
            .collect();
        let counterexample = results.iter().flatten().next().cloned();
        let passes = results.iter().filter(|r| r.is_none()).count();
        BoundednessReport {
            samples,
            passes,
            counterexample,
        }
    }

    /// Affine change of variables: given an interior scalar point `b` and an
    /// invertible recombination `M`, produce the pencil `F` with
    /// `F_i = H^{-1} (MB)_i H^{-1}` where `H` is the positive square root of
    /// `L_B(b)`, together with the affine map `l(x) = (-b + x) M^{-1}`.
    /// Then `L_F(l(X)) = (H^{-1} (x) I) L_B(X) (H^{-1} (x) I)`.
    pub fn affine_normalize(
        &self,
        b: &[Complex64],
        m: &CMatrix,
    ) -> Result<(Pencil, AffineMap), Error> {
        let g = self.g();
        if b.len() != g {
            return Err(Error::VariableMismatch {
                expected: g,
                got: b.len(),
            });
        }
        if m.nrows() != g || m.ncols() != g {
            return Err(Error::ShapeMismatch("recombination must be g x g".into()));
        }
        let lam_b = self.eval_lambda_scalar(b)?;
        let lb = linalg::identity(self.d()) + &lam_b + lam_b.adjoint();
        let evs = linalg::hermitian_eigenvalues(&lb);
        if evs[0] <= 1e-12 {
            return Err(Error::NotPositiveDefinite { min_eig: evs[0] });
        }
        let h = linalg::psd_sqrt(&lb, 1e-12)?;
        let h_inv = linalg::inverse(&h)?;
        let m_inv = linalg::inverse(m)?;
        // (MB)_i = sum_j M_{ij} B_j
        let f_entries: Vec<CMatrix> = (0..g)
            .map(|i| {
                let mut acc = linalg::zeros(self.d(), self.d());
                for j in 0..g {
                    acc += self.a.entry(j + 1).map(|z| z * m[(i, j)]);
                }
                &h_inv * acc * &h_inv
            })
            .collect();
        let ell = AffineMap {
            shift: b.iter().map(|z| -z).collect(),
            matrix: m_inv,
            shift_first: true,
        };
        Ok((Pencil::new(MatrixTuple::new(f_entries)?), ell))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Membership::Interior => write!(f, "interior"),
            Membership::Boundary => write!(f, "boundary"),
            Membership::Outside => write!(f, "outside"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundednessReport {
    pub samples: usize,
    pub passes: usize,
    /// First sampled direction along which indefiniteness failed, if any.
    pub counterexample: Option<Vec<Complex64>>,
}

impl BoundednessReport {
    pub fn all_passed(&self) -> bool {
        self.counterexample.is_none() && self.passes == self.samples
    }
}

/// Affine map on tuples, row-vector convention. With `shift_first` it is
/// `x -> (shift + x) M`, otherwise `x -> shift + x M`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    pub shift: Vec<Complex64>,
    pub matrix: CMatrix,
    pub shift_first: bool,
}

impl AffineMap {
    pub fn identity(g: usize) -> Self {
        AffineMap {
            shift: vec![Complex64::new(0.0, 0.0); g],
            matrix: linalg::identity(g),
            shift_first: true,
        }
    }

    pub fn g(&self) -> usize {
        self.shift.len()
    }

    pub fn apply(&self, x: &MatrixTuple) -> Result<MatrixTuple, Error> {
        let g = self.g();
        if x.g() != g {
            return Err(Error::VariableMismatch {
                expected: g,
                got: x.g(),
            });
        }
        let n = x.level();
        let id = linalg::identity(n);
        let shifted: Vec<CMatrix> = if self.shift_first {
            (0..g)
                .map(|j| x.entry(j + 1) + id.map(|z| z * self.shift[j]))
                .collect()
        } else {
            x.entries().to_vec()
        };
        let mut out: Vec<CMatrix> = (0..g)
            .map(|i| {
                let mut acc = linalg::zeros(n, n);
                for (j, s) in shifted.iter().enumerate() {
                    acc += s.map(|z| z * self.matrix[(j, i)]);
                }
                acc
            })
            .collect();
        if !self.shift_first {
            for (i, m) in out.iter_mut().enumerate() {
                *m += id.map(|z| z * self.shift[i]);
            }
        }
        MatrixTuple::new(out)
    }

    /// The inverse affine map.
    pub fn inverse(&self) -> Result<AffineMap, Error> {
        let m_inv = linalg::inverse(&self.matrix)?;
        // (s + x) M inverted: x -> x M^{-1} - s   (shift last)
        // s + x M inverted: x -> (-s + x) M^{-1}  (shift first)
        if self.shift_first {
            Ok(AffineMap {
                shift: self.shift.iter().map(|z| -z).collect(),
                matrix: m_inv,
                shift_first: false,
            })
        } else {
            Ok(AffineMap {
                shift: self.shift.iter().map(|z| -z).collect(),
                matrix: m_inv,
                shift_first: true,
            })
        }
    }

    /// Coefficient-level distance to another affine map of the same shape.
    pub fn distance(&self, other: &AffineMap) -> f64 {
        // normalize both to the shift-last form x -> x M + c
        let (m1, c1) = self.normal_form();
        let (m2, c2) = other.normal_form();
        let dm = linalg::max_abs(&(m1 - m2));
        let dc = c1
            .iter()
            .zip(&c2)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        dm.max(dc)
    }

    /// `(M, c)` with the map written as `x -> x M + c`.
    pub fn normal_form(&self) -> (CMatrix, Vec<Complex64>) {
        if self.shift_first {
            // (s + x) M = x M + s M
            let g = self.g();
            let c = (0..g)
                .map(|i| {
                    (0..g)
                        .map(|j| self.shift[j] * self.matrix[(j, i)])
                        .sum::<Complex64>()
                })
                .collect();
            (self.matrix.clone(), c)
        } else {
            (self.matrix.clone(), self.shift.clone())
        }
    }

    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        // self(inner(x)): with normal forms x M2 + c2 then (.) M1 + c1
        let (m1, c1) = self.normal_form();
        let (m2, c2) = inner.normal_form();
        let m = &m2 * &m1;
        let g = self.g();
        let c = (0..g)
            .map(|i| {
                (0..g).map(|j| c2[j] * m1[(j, i)]).sum::<Complex64>() + c1[i]
            })
            .collect();
        AffineMap {
            shift: c,
            matrix: m,
            shift_first: false,
        }
    }
}

/// The scalar tuple `(b_1 I_1, ..., b_g I_1)` at level 1.
pub fn scalar_tuple(b: &[Complex64]) -> MatrixTuple {
    MatrixTuple::new(b.iter().map(|z| CMatrix::from_element(1, 1, *z)).collect()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cone, czero};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// g=1 disk pencil A = [[0,1],[0,0]].
    fn disk() -> Pencil {
        let a = CMatrix::from_row_slice(2, 2, &[czero(), cone(), czero(), czero()]);
        Pencil::new(MatrixTuple::new(vec![a]).unwrap())
    }

    #[test]
    fn pencil_at_zero_is_identity() {
        let p = disk();
        let x = MatrixTuple::zero(1, 3);
        let l = p.eval(&x).unwrap();
        assert!(linalg::max_abs(&(l - linalg::identity(6))) < 1e-14);
    }

    #[test]
    fn disk_pencil_at_scalar() {
        let p = disk();
        let z = scalar_tuple(&[Complex64::new(0.3, 0.4)]);
        let l = p.eval(&z).unwrap();
        // [[1, z], [conj(z), 1]]
        assert!((l[(0, 1)] - Complex64::new(0.3, 0.4)).norm() < 1e-14);
        assert!((l[(1, 0)] - Complex64::new(0.3, -0.4)).norm() < 1e-14);
        // eigenvalues 1 +- |z|
        let evs = linalg::hermitian_eigenvalues(&l);
        assert!((evs[0] - 0.5).abs() < 1e-12);
        assert!((evs[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn membership_classification() {
        let p = disk();
        let (m, e) = p.membership(&MatrixTuple::zero(1, 1), BOUNDARY_TOL).unwrap();
        assert_eq!(m, Membership::Interior);
        assert!((e - 1.0).abs() < 1e-12);
        let (m, e) = p.membership(&scalar_tuple(&[c(1.0)]), BOUNDARY_TOL).unwrap();
        assert_eq!(m, Membership::Boundary);
        assert!(e.abs() < 1e-12);
        let (m, e) = p.membership(&scalar_tuple(&[c(2.0)]), BOUNDARY_TOL).unwrap();
        assert_eq!(m, Membership::Outside);
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn direct_sum_membership() {
        let p = disk();
        let x = scalar_tuple(&[c(0.5)]);
        let y = scalar_tuple(&[c(2.0)]);
        let both = x.direct_sum(&y).unwrap();
        let (m, e) = p.membership(&both, BOUNDARY_TOL).unwrap();
        assert_eq!(m, Membership::Outside);
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_invariance_of_min_eig() {
        let p = disk();
        let mut r = rng::seeded(5);
        let x = rng::ginibre_tuple(&mut r, 1, 4);
        let u = rng::haar_unitary(&mut r, 4);
        let e1 = linalg::lambda_min(&p.eval(&x).unwrap());
        let e2 = linalg::lambda_min(&p.eval(&x.conjugate(&u).unwrap()).unwrap());
        assert!((e1 - e2).abs() < 1e-10);
    }

    #[test]
    fn isometric_compression_stays_inside() {
        let p = disk();
        let mut r = rng::seeded(6);
        let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, 1, 4), 0.9);
        assert_eq!(p.membership(&x, BOUNDARY_TOL).unwrap().0, Membership::Interior);
        // isometry C^2 -> C^4 from the first two columns of a Haar unitary
        let u = rng::haar_unitary(&mut r, 4);
        let v = u.columns(0, 2).clone_owned();
        let cx = x.conjugate(&v).unwrap();
        assert_eq!(p.membership(&cx, BOUNDARY_TOL).unwrap().0, Membership::Interior);
    }

    #[test]
    fn boundary_point_on_disk() {
        let p = disk();
        let (t, x) = p.boundary_point(&scalar_tuple(&[c(1.0)]), BOUNDARY_TOL).unwrap();
        assert!((t - 1.0).abs() < 1e-9);
        let (m, _) = p.membership(&x, BOUNDARY_TOL).unwrap();
        assert_eq!(m, Membership::Boundary);
        // ray invariance: doubling the direction halves t
        let (t2, _) = p.boundary_point(&scalar_tuple(&[c(2.0)]), BOUNDARY_TOL).unwrap();
        assert!((t2 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn unbounded_direction_detected() {
        // g=1, A = [[0,0],[0,0]]... use A with Lambda(alpha) PSD along the ray:
        // A = I gives L(t) = I + 2tI which never loses positivity for t > 0
        let a = linalg::identity(2);
        let p = Pencil::new(MatrixTuple::new(vec![a]).unwrap());
        let err = p.boundary_point(&scalar_tuple(&[c(1.0)]), BOUNDARY_TOL);
        assert!(matches!(err, Err(Error::UnboundedDirection { .. })));
    }

    #[test]
    fn boundedness_disk_passes() {
        let p = disk();
        let rep = p.boundedness_evidence(200, 3);
        assert!(rep.all_passed(), "disk directions should be indefinite");
    }

    #[test]
    fn boundedness_scalar_identity_fails() {
        // g=1, A=1 (1x1): alpha = i gives Hermitian part 0, not indefinite
        let p = Pencil::new(MatrixTuple::new(vec![CMatrix::from_element(1, 1, cone())]).unwrap());
        let rep = p.boundedness_evidence(200, 3);
        assert!(rep.counterexample.is_some());
    }

    #[test]
    fn affine_normalize_trivial() {
        let p = disk();
        let (f, ell) = p
            .affine_normalize(&[czero()], &linalg::identity(1))
            .unwrap();
        assert!(linalg::max_abs(&(f.coefficients().entry(1) - p.coefficients().entry(1))) < 1e-12);
        assert!(ell.distance(&AffineMap::identity(1)) < 1e-12);
    }

    #[test]
    fn affine_normalize_linear_recombination() {
        // b = 0, M arbitrary: H = I and F = MB
        let p = disk();
        let m = CMatrix::from_element(1, 1, Complex64::new(0.0, 2.0));
        let (f, _) = p.affine_normalize(&[czero()], &m).unwrap();
        let expect = p.coefficients().entry(1).map(|z| z * Complex64::new(0.0, 2.0));
        assert!(linalg::max_abs(&(f.coefficients().entry(1) - expect)) < 1e-12);
    }

    #[test]
    fn affine_normalize_conjugation_identity() {
        // interior point b = 0.4 for the disk, M = [[2]]
        let p = disk();
        let b = [c(0.4)];
        let m = CMatrix::from_element(1, 1, c(2.0));
        let (f, ell) = p.affine_normalize(&b, &m).unwrap();
        let lam_b = p.eval_lambda_scalar(&b).unwrap();
        let lb = linalg::identity(2) + &lam_b + lam_b.adjoint();
        let h_inv = linalg::inverse(&linalg::psd_sqrt(&lb, 1e-12).unwrap()).unwrap();
        let mut r = rng::seeded(8);
        for _ in 0..5 {
            let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, 1, 3), 0.5);
            let lhs = f.eval(&ell.apply(&x).unwrap()).unwrap();
            let conj = linalg::kron(&h_inv, &linalg::identity(3));
            let rhs = &conj * p.eval(&x).unwrap() * &conj;
            assert!(linalg::max_abs(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn affine_inverse_round_trip() {
        let mut r = rng::seeded(9);
        let m = rng::ginibre(&mut r, 3, 3);
        let ell = AffineMap {
            shift: vec![c(1.0), c(-2.0), Complex64::new(0.0, 1.0)],
            matrix: m,
            shift_first: true,
        };
        let comp = ell.inverse().unwrap().compose(&ell);
        assert!(comp.distance(&AffineMap::identity(3)) < 1e-12);
        let x = rng::ginibre_tuple(&mut r, 3, 2);
        let back = ell.inverse().unwrap().apply(&ell.apply(&x).unwrap()).unwrap();
        assert!(linalg::max_abs(&(back.entry(1) - x.entry(1))) < 1e-12);
    }
}
