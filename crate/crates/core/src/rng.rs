//! Seeded random generation of matrices and tuples. All sampling in the
//! crate flows through a `ChaCha8Rng` so results are reproducible from a
//! single `u64` seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, CMatrix};
use crate::tuple::MatrixTuple;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream for a work item, so parallel loops stay
/// deterministic regardless of scheduling.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) / 2f64.sqrt()
}

/// Complex Ginibre matrix: iid standard complex Gaussian entries.
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the standard
/// phase correction.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = ginibre(rng, n, n);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Random unit column vector, uniform on the sphere in `C^n`.
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    loop {
        let v = ginibre(rng, n, 1);
        let norm = linalg::fro_norm(&v);
        if norm > 1e-8 {
            return v.map(|z| z / norm);
        }
    }
}

/// Random Hermitian matrix (GUE-style, entries O(1)).
pub fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = ginibre(rng, n, n);
    (&a + a.adjoint()).scale(0.5)
}

/// Random `g`-tuple of `n x n` Ginibre matrices.
pub fn ginibre_tuple(rng: &mut ChaCha8Rng, g: usize, n: usize) -> MatrixTuple {
    MatrixTuple::new((0..g).map(|_| ginibre(rng, n, n)).collect()).unwrap()
}

/// Random `g`-tuple of Hermitian `n x n` matrices.
pub fn hermitian_tuple(rng: &mut ChaCha8Rng, g: usize, n: usize) -> MatrixTuple {
    MatrixTuple::new((0..g).map(|_| hermitian(rng, n)).collect()).unwrap()
}

/// Random jointly nilpotent tuple: strictly upper triangular entries in a
/// common basis, then a joint unitary conjugation to hide the flag.
/// Products of `n` or more entries vanish.
pub fn nilpotent_tuple(rng: &mut ChaCha8Rng, g: usize, n: usize) -> MatrixTuple {
    let u = haar_unitary(rng, n);
    let entries = (0..g)
        .map(|_| {
            let mut m = linalg::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    m[(i, j)] = gaussian(rng);
                }
            }
            u.adjoint() * m * &u
        })
        .collect();
    MatrixTuple::new(entries).unwrap()
}

/// Rescale a tuple so that `max_j ||X_j|| = target`.
pub fn rescale_to_norm(x: &MatrixTuple, target: f64) -> MatrixTuple {
    let m = x.max_entry_norm();
    if m == 0.0 {
        x.clone()
    } else {
        x.scale(Complex64::new(target / m, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeding_is_reproducible() {
        let a = ginibre(&mut seeded(7), 3, 3);
        let b = ginibre(&mut seeded(7), 3, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn substreams_differ() {
        let a = ginibre(&mut substream(7, 0), 3, 3);
        let b = ginibre(&mut substream(7, 1), 3, 3);
        assert_ne!(a, b);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(&mut seeded(1), 5);
        let res = &u * u.adjoint() - linalg::identity(5);
        assert!(linalg::max_abs(&res) < 1e-12);
    }

    #[test]
    fn unit_vector_has_norm_one() {
        let v = unit_vector(&mut seeded(2), 6);
        assert!((linalg::fro_norm(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_is_selfadjoint() {
        let h = hermitian(&mut seeded(3), 4);
        assert!(linalg::max_abs(&(&h - h.adjoint())) < 1e-15);
    }

    #[test]
    fn nilpotent_tuple_vanishes() {
        let x = nilpotent_tuple(&mut seeded(4), 2, 4);
        assert!(x.is_jointly_nilpotent_of_order(4, 1e-10));
    }

    #[test]
    fn rescale_hits_target() {
        let x = ginibre_tuple(&mut seeded(5), 2, 3);
        let y = rescale_to_norm(&x, 0.25);
        assert!((y.max_entry_norm() - 0.25).abs() < 1e-12);
    }
}
