//! Randomized witness checkers for the singular-vector genericity
//! conditions: sv-generic (scalar probes), eig-generic and *-generic
//! (matrix probes).
//!
//! All checkers search for witnesses; "not witnessed" within a budget is
//! never a disproof. A probe `alpha` is accepted when, after rescaling so
//! `||Lambda_A(alpha)|| = 1`, the matrix `I - Lambda* Lambda` is positive
//! semidefinite with a one-dimensional kernel separated from the rest of
//! the spectrum.

use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::pencil::Pencil;
use crate::rng;
use crate::tuple::MatrixTuple;

/// Minimum separation between the two smallest eigenvalues of
/// `I - Lambda* Lambda` for a probe to count.
pub const GAP_THRESHOLD: f64 = 1e-6;
/// How close to zero the smallest eigenvalue must be.
pub const KERNEL_TOL: f64 = 1e-10;
/// Rank and independence tolerance for basis searches.
pub const BASIS_TOL: f64 = 1e-8;

/// An accepted singular-vector probe.
#[derive(Clone, Debug)]
pub struct Probe {
    /// The probe tuple, rescaled so the pencil part has operator norm one.
    pub alpha: MatrixTuple,
    /// Unit kernel vector of `I - Lambda* Lambda` (or the adjoint-side
    /// variant), living in `C^d (tensor) C^n`.
    pub u: CMatrix,
    /// The decomposition `u = sum_a u_a (tensor) e_a`.
    pub components: Vec<CMatrix>,
    /// Distance from the smallest eigenvalue to the next one.
    pub gap: f64,
    /// Residual of the kernel pairing `(-Lambda u) (+) u` against the
    /// doubled pencil `[[I, Lambda], [Lambda*, I]]`.
    pub pairing_residual: f64,
}

fn probe_from_lambda(lam: &CMatrix, d: usize, n: usize) -> Result<Probe, Error> {
    let dim = lam.nrows();
    let m = linalg::identity(dim) - linalg::adj(lam) * lam;
    let (values, vectors) = linalg::hermitian_eigen(&m);
    if dim < 2 {
        return Err(Error::InvalidParameter(
            "probe space too small to isolate a kernel".into(),
        ));
    }
    if values[0].abs() > KERNEL_TOL {
        return Err(Error::InvalidParameter(format!(
            "probe kernel eigenvalue {} too far from zero",
            values[0]
        )));
    }
    let gap = values[1] - values[0];
    if gap < GAP_THRESHOLD {
        return Err(Error::InvalidParameter(format!(
            "degenerate probe: spectral gap {gap}"
        )));
    }
    let u = CMatrix::from_fn(dim, 1, |r, _| vectors[(r, 0)]);
    let components = (0..n)
        .map(|a| CMatrix::from_fn(d, 1, |i, _| u[(i * n + a, 0)]))
        .collect();
    // the bottom block of [[I, L], [L*, I]] applied to (-L u) (+) u; the top
    // block cancels identically
    let bottom = &u - linalg::adj(lam) * (lam * &u);
    let pairing_residual = linalg::max_abs(&bottom);
    Ok(Probe {
        alpha: MatrixTuple::zero(1, 1), // replaced by callers
        u,
        components,
        gap,
        pairing_residual,
    })
}

fn rescaled_lambda(a: &Pencil, alpha: &MatrixTuple) -> Result<(MatrixTuple, CMatrix), Error> {
    let lam = a.eval_lambda(alpha)?;
    let norm = linalg::op_norm(&lam);
    if norm < 1e-14 {
        return Err(Error::InvalidParameter("probe evaluates to zero".into()));
    }
    let scale = Complex64::new(1.0 / norm, 0.0);
    Ok((alpha.scale(scale), lam.map(|z| z * scale)))
}

/// Extract the right-singular witness of a probe: the kernel vector of
/// `I - Lambda_A(alpha)* Lambda_A(alpha)` after rescaling.
pub fn top_singular_probe(a: &Pencil, alpha: &MatrixTuple) -> Result<Probe, Error> {
    let (scaled, lam) = rescaled_lambda(a, alpha)?;
    let mut probe = probe_from_lambda(&lam, a.d(), alpha.level())?;
    probe.alpha = scaled;
    Ok(probe)
}

/// Adjoint-side variant: kernel vector of
/// `I - Lambda_A(alpha) Lambda_A(alpha)*`.
pub fn top_singular_probe_left(a: &Pencil, alpha: &MatrixTuple) -> Result<Probe, Error> {
    let (scaled, lam) = rescaled_lambda(a, alpha)?;
    let mut probe = probe_from_lambda(&linalg::adj(&lam), a.d(), alpha.level())?;
    probe.alpha = scaled;
    Ok(probe)
}

/// True when every `d`-element subset of the given vectors in `C^d` has
/// smallest singular value above `tol`.
pub fn hyperbasis_check(vectors: &[CMatrix], tol: f64) -> bool {
    if vectors.is_empty() {
        return false;
    }
    let d = vectors[0].nrows();
    if vectors.len() <= d {
        return false;
    }
    let mut indices = vec![0usize; d];
    subsets_ok(vectors, d, 0, 0, &mut indices, tol)
}

fn subsets_ok(
    vectors: &[CMatrix],
    d: usize,
    depth: usize,
    start: usize,
    indices: &mut Vec<usize>,
    tol: f64,
) -> bool {
    if depth == d {
        return subset_sigma_min(vectors, indices) > tol;
    }
    for i in start..vectors.len() {
        indices[depth] = i;
        if !subsets_ok(vectors, d, depth + 1, i + 1, indices, tol) {
            return false;
        }
    }
    true
}

fn subset_sigma_min(vectors: &[CMatrix], indices: &[usize]) -> f64 {
    let d = vectors[0].nrows();
    let m = CMatrix::from_fn(d, indices.len(), |r, c| vectors[indices[c]][(r, 0)]);
    linalg::singular_values(&m)
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// Search a vector pool for a hyperbasis: a basis plus one vector with all
/// coordinates nonzero. Returns the chosen indices and the worst subset
/// `sigma_min`.
fn find_hyperbasis(vectors: &[CMatrix], tol: f64) -> Option<(Vec<usize>, f64)> {
    if vectors.is_empty() {
        return None;
    }
    let d = vectors[0].nrows();
    // greedy basis by rank growth
    let mut basis: Vec<usize> = Vec::new();
    let mut ortho: Vec<CMatrix> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for q in &ortho {
            let coeff = (linalg::adj(q) * &w)[(0, 0)];
            w -= q.map(|z| z * coeff);
        }
        let norm = w.norm();
        if norm > tol {
            ortho.push(w.map(|z| z / Complex64::new(norm, 0.0)));
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return None;
    }
    let m = CMatrix::from_fn(d, d, |r, c| vectors[basis[c]][(r, 0)]);
    for (i, v) in vectors.iter().enumerate() {
        if basis.contains(&i) {
            continue;
        }
        let coords = match linalg::lstsq(&m, v) {
            Ok(c) => c,
            Err(_) => continue,
        };
        if (0..d).all(|j| coords[(j, 0)].norm() > tol) {
            let mut subset: Vec<usize> = basis.clone();
            subset.push(i);
            let pool: Vec<CMatrix> = subset.iter().map(|&k| vectors[k].clone()).collect();
            if hyperbasis_check(&pool, tol) {
                let mut worst = f64::INFINITY;
                for skip in 0..pool.len() {
                    let idx: Vec<usize> =
                        (0..pool.len()).filter(|&k| k != skip).collect();
                    worst = worst.min(subset_sigma_min(&pool, &idx));
                }
                return Some((subset, worst));
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct GenericityReport {
    pub condition: String,
    pub witnessed: bool,
    pub probes_used: usize,
    pub accepted_probes: usize,
    /// Indices (into the accepted-witness pool) of the hyperbasis found.
    pub hyperbasis_indices: Option<Vec<usize>>,
    /// Worst `sigma_min` over the subsets of the chosen hyperbasis.
    pub hyperbasis_sigma_min: Option<f64>,
    pub basis_indices: Option<Vec<usize>>,
    pub basis_sigma_min: Option<f64>,
    /// Smallest spectral gap among accepted probes.
    pub min_gap: Option<f64>,
}

/// Look for scalar-probe witnesses of the sv-generic condition: `d + 1`
/// right kernel vectors forming a hyperbasis and `d` left kernel vectors
/// forming a basis. Never a disproof.
pub fn check_sv_generic(a: &Pencil, probe_budget: usize, seed: u64) -> GenericityReport {
    let g = a.g();
    let d = a.d();
    let mut right: Vec<CMatrix> = Vec::new();
    let mut left: Vec<CMatrix> = Vec::new();
    let mut accepted = 0usize;
    let mut min_gap = f64::INFINITY;
    let mut hyper: Option<(Vec<usize>, f64)> = None;
    let mut basis: Option<(Vec<usize>, f64)> = None;
    let mut used = 0usize;

    for i in 0..probe_budget {
        if hyper.is_some() && basis.is_some() {
            break;
        }
        used = i + 1;
        let mut r = rng::substream(seed, i as u64);
        let alpha: Vec<Complex64> = (0..g).map(|_| rng::gaussian(&mut r)).collect();
        let scalar = crate::pencil::scalar_tuple(&alpha);
        if hyper.is_none() {
            if let Ok(p) = top_singular_probe(a, &scalar) {
                accepted += 1;
                min_gap = min_gap.min(p.gap);
                right.push(p.u.clone());
                if right.len() > d {
                    hyper = find_hyperbasis(&right, BASIS_TOL);
                }
            }
        }
        if basis.is_none() {
            if let Ok(p) = top_singular_probe_left(a, &scalar) {
                left.push(p.u.clone());
                basis = find_basis(&left, d, BASIS_TOL);
            }
        }
    }
    GenericityReport {
        condition: "sv".into(),
        witnessed: hyper.is_some() && basis.is_some(),
        probes_used: used,
        accepted_probes: accepted,
        hyperbasis_indices: hyper.as_ref().map(|(ix, _)| ix.clone()),
        hyperbasis_sigma_min: hyper.as_ref().map(|(_, s)| *s),
        basis_indices: basis.as_ref().map(|(ix, _)| ix.clone()),
        basis_sigma_min: basis.as_ref().map(|(_, s)| *s),
        min_gap: if accepted > 0 { Some(min_gap) } else { None },
    }
}

fn find_basis(vectors: &[CMatrix], d: usize, tol: f64) -> Option<(Vec<usize>, f64)> {
    if vectors.is_empty() || vectors[0].nrows() != d {
        return None;
    }
    let mut chosen: Vec<usize> = Vec::new();
    let mut ortho: Vec<CMatrix> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for q in &ortho {
            let coeff = (linalg::adj(q) * &w)[(0, 0)];
            w -= q.map(|z| z * coeff);
        }
        let norm = w.norm();
        if norm > tol {
            ortho.push(w.map(|z| z / Complex64::new(norm, 0.0)));
            chosen.push(i);
            if chosen.len() == d {
                let sigma = subset_sigma_min(vectors, &chosen);
                if sigma > tol {
                    return Some((chosen, sigma));
                }
                return None;
            }
        }
    }
    None
}

/// Orthonormal basis of the row space of the stacked `A_j` (that is, of
/// `ker(A)^perp = range(A*)`).
fn row_space_basis(a: &Pencil, tol: f64) -> CMatrix {
    let d = a.d();
    let g = a.g();
    let mut stacked = linalg::zeros(g * d, d);
    for j in 0..g {
        stacked.view_mut((j * d, 0), (d, d)).copy_from(a.coefficients().entry(j + 1));
    }
    orthonormal_row_basis(&stacked, tol)
}

/// Orthonormal basis of the column space of the side-by-side `A_j` (that
/// is, of `range(A)`).
fn column_space_basis(a: &Pencil, tol: f64) -> CMatrix {
    let d = a.d();
    let g = a.g();
    let mut wide = linalg::zeros(d, g * d);
    for j in 0..g {
        wide.view_mut((0, j * d), (d, d)).copy_from(a.coefficients().entry(j + 1));
    }
    orthonormal_col_basis(&wide, tol)
}

fn orthonormal_row_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.unwrap();
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    // rows of vt are right singular vectors; return them as columns
    CMatrix::from_fn(m.ncols(), rank, |r, c| vt[(c, r)].conj())
}

fn orthonormal_col_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.unwrap();
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    CMatrix::from_fn(m.nrows(), rank, |r, c| u[(r, c)])
}

#[derive(Clone, Debug)]
pub struct EigStarReport {
    pub eig: GenericityReport,
    pub star: GenericityReport,
    /// Dimension of the joint kernel of the `A_j`.
    pub kernel_dim: usize,
    /// Whether the single-probe construction added a second probe.
    pub constructed_probe: bool,
}

/// Check the eig-generic and *-generic conditions against matrix-level
/// probes. When a single probe is supplied whose kernel-vector components
/// already span, a second probe `T alpha T*` is constructed from a unitary
/// `T` with dense first column.
pub fn check_eig_star_generic(
    a: &Pencil,
    probes: &[MatrixTuple],
) -> Result<EigStarReport, Error> {
    let d = a.d();
    for probe in probes {
        if probe.g() != a.g() {
            return Err(Error::VariableMismatch {
                expected: a.g(),
                got: probe.g(),
            });
        }
    }
    let row_basis = row_space_basis(a, BASIS_TOL);
    let rank = row_basis.ncols();
    let kernel_dim = d - rank;

    let mut probe_list: Vec<MatrixTuple> = probes.to_vec();
    let mut constructed_probe = false;
    if probes.len() == 1 {
        if let Some(extra) = single_probe_companion(a, &probes[0]) {
            probe_list.push(extra);
            constructed_probe = true;
        }
    }

    let mut right_components: Vec<CMatrix> = Vec::new();
    let mut left_components: Vec<CMatrix> = Vec::new();
    let mut accepted = 0usize;
    let mut min_gap = f64::INFINITY;
    for probe in &probe_list {
        if let Ok(p) = top_singular_probe(a, probe) {
            accepted += 1;
            min_gap = min_gap.min(p.gap);
            for comp in &p.components {
                let norm = comp.norm();
                if norm > BASIS_TOL {
                    right_components.push(comp.map(|z| z / Complex64::new(norm, 0.0)));
                }
            }
        }
        if let Ok(p) = top_singular_probe_left(a, probe) {
            for comp in &p.components {
                let norm = comp.norm();
                if norm > BASIS_TOL {
                    left_components.push(comp.map(|z| z / Complex64::new(norm, 0.0)));
                }
            }
        }
    }

    // eig: components projected to ker(A)^perp must contain a hyperbasis
    let projected: Vec<CMatrix> = right_components
        .iter()
        .map(|v| linalg::adj(&row_basis) * v)
        .collect();
    let hyper = find_hyperbasis(&projected, BASIS_TOL);
    let eig_witnessed = hyper.is_some() && kernel_dim == 0;
    let eig = GenericityReport {
        condition: if kernel_dim == 0 {
            "eig".into()
        } else {
            "weak-eig".into()
        },
        witnessed: if kernel_dim == 0 {
            eig_witnessed
        } else {
            hyper.is_some()
        },
        probes_used: probe_list.len(),
        accepted_probes: accepted,
        hyperbasis_indices: hyper.as_ref().map(|(ix, _)| ix.clone()),
        hyperbasis_sigma_min: hyper.as_ref().map(|(_, s)| *s),
        basis_indices: None,
        basis_sigma_min: None,
        min_gap: if accepted > 0 { Some(min_gap) } else { None },
    };

    // star: components must span C^d (strong) or range(A) (weak)
    let spans_full = find_basis(&left_components, d, BASIS_TOL);
    let star_witnessed = spans_full.is_some();
    let weak_star = if star_witnessed {
        true
    } else {
        let col_basis = column_space_basis(a, BASIS_TOL);
        let proj: Vec<CMatrix> = left_components
            .iter()
            .map(|v| linalg::adj(&col_basis) * v)
            .collect();
        find_basis(&proj, col_basis.ncols(), BASIS_TOL).is_some()
    };
    let star = GenericityReport {
        condition: if star_witnessed {
            "star".into()
        } else if weak_star {
            "weak-star".into()
        } else {
            "star".into()
        },
        witnessed: star_witnessed,
        probes_used: probe_list.len(),
        accepted_probes: accepted,
        hyperbasis_indices: None,
        hyperbasis_sigma_min: None,
        basis_indices: spans_full.as_ref().map(|(ix, _)| ix.clone()),
        basis_sigma_min: spans_full.as_ref().map(|(_, s)| *s),
        min_gap: if accepted > 0 { Some(min_gap) } else { None },
    };
    Ok(EigStarReport {
        eig,
        star,
        kernel_dim,
        constructed_probe,
    })
}

/// Given a single probe whose kernel-vector components span `C^d`, build
/// the companion probe `T alpha T*` with `T` unitary, `T_{k,1} != 0` for
/// `k <= d` and `T_{k,1} = 0` for `k > d`.
fn single_probe_companion(a: &Pencil, alpha: &MatrixTuple) -> Option<MatrixTuple> {
    let d = a.d();
    let n = alpha.level();
    if n < d {
        return None;
    }
    let probe = top_singular_probe(a, alpha).ok()?;
    let stacked = CMatrix::from_fn(d, probe.components.len(), |r, c| {
        probe.components[c][(r, 0)]
    });
    let sv = linalg::singular_values(&stacked);
    if sv.len() < d || sv[d - 1] < BASIS_TOL {
        return None;
    }
    // Householder reflection sending e_1 to the dense unit vector c
    let inv_sqrt = 1.0 / (d as f64).sqrt();
    let mut c = linalg::zeros(n, 1);
    for k in 0..d {
        c[(k, 0)] = Complex64::new(inv_sqrt, 0.0);
    }
    let mut w = -c;
    w[(0, 0)] += Complex64::new(1.0, 0.0);
    let t = if w.norm() < 1e-14 {
        linalg::identity(n)
    } else {
        let w = w.map(|z| z / Complex64::new(w.norm(), 0.0));
        linalg::identity(n) - (&w * linalg::adj(&w)).map(|z| z * Complex64::new(2.0, 0.0))
    };
    let entries = alpha
        .entries()
        .iter()
        .map(|aj| &t * aj * linalg::adj(&t))
        .collect();
    MatrixTuple::new(entries).ok()
}
