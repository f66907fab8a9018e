//! Tuples of square complex matrices: the evaluation points of free
//! polynomials and pencils.

use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::word::{self, Word};

/// A `g`-tuple of `n x n` complex matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    entries: Vec<CMatrix>,
    n: usize,
}

impl MatrixTuple {
    pub fn new(entries: Vec<CMatrix>) -> Result<Self, Error> {
        if entries.is_empty() {
            return Err(Error::ShapeMismatch("tuple must have g >= 1".into()));
        }
        let n = entries[0].nrows();
        for (j, m) in entries.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "entry {} is {}x{}, expected {n}x{n}",
                    j + 1,
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(MatrixTuple { entries, n })
    }

    pub fn zero(g: usize, n: usize) -> Self {
        MatrixTuple {
            entries: vec![linalg::zeros(n, n); g],
            n,
        }
    }

    pub fn g(&self) -> usize {
        self.entries.len()
    }

    /// Matrix size (the level of the tuple).
    pub fn level(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[CMatrix] {
        &self.entries
    }

    /// 1-based access matching the usual `X_j` indexing.
    pub fn entry(&self, j: usize) -> &CMatrix {
        &self.entries[j - 1]
    }

    /// Levelwise direct sum `X (+) Y`.
    pub fn direct_sum(&self, other: &MatrixTuple) -> Result<MatrixTuple, Error> {
        if self.g() != other.g() {
            return Err(Error::VariableMismatch {
                expected: self.g(),
                got: other.g(),
            });
        }
        let n = self.n + other.n;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                let mut m = linalg::zeros(n, n);
                m.view_mut((0, 0), (self.n, self.n)).copy_from(a);
                m.view_mut((self.n, self.n), (other.n, other.n)).copy_from(b);
                m
            })
            .collect();
        Ok(MatrixTuple { entries, n })
    }

    /// Simultaneous conjugation `V* X V` (V need not be square).
    pub fn conjugate(&self, v: &CMatrix) -> Result<MatrixTuple, Error> {
        if v.nrows() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "conjugator has {} rows, tuple level is {}",
                v.nrows(),
                self.n
            )));
        }
        let va = v.adjoint();
        let entries: Vec<CMatrix> = self.entries.iter().map(|x| &va * x * v).collect();
        MatrixTuple::new(entries)
    }

    pub fn scale(&self, c: Complex64) -> MatrixTuple {
        MatrixTuple {
            entries: self.entries.iter().map(|m| m.map(|z| z * c)).collect(),
            n: self.n,
        }
    }

    pub fn add(&self, other: &MatrixTuple) -> Result<MatrixTuple, Error> {
        if self.g() != other.g() || self.n != other.n {
            return Err(Error::ShapeMismatch("tuple add".into()));
        }
        Ok(MatrixTuple {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
            n: self.n,
        })
    }

    pub fn sub(&self, other: &MatrixTuple) -> Result<MatrixTuple, Error> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest operator norm among the entries.
    pub fn max_entry_norm(&self) -> f64 {
        self.entries.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    /// True when every product of `order` entries vanishes (within `tol`)
    /// while some product of `order - 1` entries does not.
    pub fn is_jointly_nilpotent_of_order(&self, order: usize, tol: f64) -> bool {
        let some_nonzero = order == 0
            || word::words_of_len(self.g(), order - 1)
                .iter()
                .any(|w| linalg::max_abs(&eval_word(w, self).unwrap()) > tol);
        let all_zero = word::words_of_len(self.g(), order)
            .iter()
            .all(|w| linalg::max_abs(&eval_word(w, self).unwrap()) <= tol);
        some_nonzero && all_zero
    }
}

/// Evaluate a word at a tuple: `w(X) = X_{i_1} ... X_{i_m}`, with the empty
/// word mapping to the identity.
pub fn eval_word(w: &Word, x: &MatrixTuple) -> Result<CMatrix, Error> {
    let mut acc = linalg::identity(x.level());
    for &j in w.letters() {
        if j < 1 || j as usize > x.g() {
            return Err(Error::LetterOutOfRange { letter: j, g: x.g() });
        }
        acc *= x.entry(j as usize);
    }
    Ok(acc)
}

/// Finite-depth estimate of the joint spectral radius
/// `max { ||X^a||^(1/N) : |a| = N }`. Upper-biased for finite `N`.
pub fn joint_spectral_radius(x: &MatrixTuple, depth: usize) -> f64 {
    assert!(depth >= 1, "depth must be >= 1");
    // DFS over words of length `depth`, carrying the running product.
    fn go(x: &MatrixTuple, prod: &CMatrix, remaining: usize, best: &mut f64) {
        if remaining == 0 {
            *best = best.max(linalg::op_norm(prod));
            return;
        }
        if linalg::max_abs(prod) == 0.0 {
            return;
        }
        for j in 1..=x.g() {
            let next = prod * x.entry(j);
            go(x, &next, remaining - 1, best);
        }
    }
    let mut best = 0.0;
    go(x, &linalg::identity(x.level()), depth, &mut best);
    best.powf(1.0 / depth as f64)
}

/// The tuple of truncated creation (shift) operators on the Fock space of
/// words of length at most `n`, with orthonormal word basis in
/// graded-lexicographic order: `S_j e_w = e_{x_j w}` when `|w| < n`, else 0.
///
/// Jointly nilpotent of order exactly `n + 1`; evaluation of a degree `<= n`
/// series at this tuple is faithful on coefficients.
pub fn fock_shift_tuple(g: usize, n: usize) -> MatrixTuple {
    assert!(g >= 1 && n >= 1);
    let basis = word::words_up_to(g, n);
    let index: std::collections::HashMap<&Word, usize> =
        basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let dim = basis.len();
    let entries = (1..=g as u8)
        .map(|j| {
            let mut s = linalg::zeros(dim, dim);
            for (col, w) in basis.iter().enumerate() {
                if w.len() < n {
                    let row = index[&w.prepend(j)];
                    s[(row, col)] = Complex64::new(1.0, 0.0);
                }
            }
            s
        })
        .collect();
    MatrixTuple { entries, n: dim }
}
