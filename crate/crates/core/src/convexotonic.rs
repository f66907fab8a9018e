//! Convexotonic tuples and their birational maps
//! `p(x) = x (I - Λ_Ξ(x))^{-1}` and `q(x) = x (I + Λ_Ξ(x))^{-1}`.

use num_complex::Complex64;

use crate::error::Error;
use crate::linalg::{self, CMatrix};
use crate::rng;
use crate::series::{self, FreeMap, FreeSeries};
use crate::tuple::{eval_word, MatrixTuple};
use crate::word::{self, Word};

/// Default residual tolerance on the defining relations.
pub const XI_TOL: f64 = 1e-12;

/// Relative singular-value threshold for basis independence.
pub const INDEPENDENCE_RATIO: f64 = 1e-8;

/// A `g`-tuple of `g x g` matrices satisfying
/// `Ξ_k Ξ_j = sum_s (Ξ_j)_{k,s} Ξ_s`.
#[derive(Clone, Debug)]
pub struct ConvexotonicTuple {
    xi: MatrixTuple,
}

impl ConvexotonicTuple {
    /// Wrap without validation (for experiments with raw tuples); use
    /// `validated` to enforce the defining relations.
    pub fn new_unchecked(xi: MatrixTuple) -> Result<Self, Error> {
        if xi.level() != xi.g() {
            return Err(Error::ShapeMismatch(format!(
                "need g x g entries, got {} x {} with g = {}",
                xi.level(),
                xi.level(),
                xi.g()
            )));
        }
        Ok(ConvexotonicTuple { xi })
    }

    pub fn validated(xi: MatrixTuple, tol: f64) -> Result<Self, Error> {
        let t = Self::new_unchecked(xi)?;
        let residual = t.relation_residual();
        if residual > tol {
            return Err(Error::NotConvexotonic { residual });
        }
        Ok(t)
    }

    pub fn zero(g: usize) -> Self {
        ConvexotonicTuple {
            xi: MatrixTuple::zero(g, g),
        }
    }

    pub fn g(&self) -> usize {
        self.xi.g()
    }

    pub fn tuple(&self) -> &MatrixTuple {
        &self.xi
    }

    pub fn entry(&self, j: usize) -> &CMatrix {
        self.xi.entry(j)
    }

    /// Max residual of `Ξ_k Ξ_j - sum_s (Ξ_j)_{k,s} Ξ_s` over all j, k.
    pub fn relation_residual(&self) -> f64 {
        let g = self.g();
        let mut worst = 0.0f64;
        for j in 1..=g {
            for k in 1..=g {
                let lhs = self.entry(k) * self.entry(j);
                let mut rhs = linalg::zeros(g, g);
                for s in 1..=g {
                    rhs += self.entry(s).map(|z| z * self.entry(j)[(k - 1, s - 1)]);
                }
                worst = worst.max(linalg::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    pub fn is_convexotonic(&self, tol: f64) -> bool {
        self.relation_residual() <= tol
    }

    /// `Ξ^α` for a word `α` (empty word gives the identity).
    pub fn word_power(&self, alpha: &Word) -> CMatrix {
        eval_word(alpha, &self.xi).unwrap()
    }

    /// The `(g+1) x (g+1)` embedding `R_j = [[0, e_j*], [0, Ξ_j]]`, a
    /// linearly independent algebra basis whose structure matrices are `Ξ`.
    pub fn embed_tuple(&self) -> MatrixTuple {
        let g = self.g();
        let entries = (1..=g)
            .map(|j| {
                let mut r = linalg::zeros(g + 1, g + 1);
                r[(0, j)] = linalg::cone();
                r.view_mut((1, 1), (g, g)).copy_from(self.entry(j));
                r
            })
            .collect();
        MatrixTuple::new(entries).unwrap()
    }

    /// Degree-`n` truncations of the mutually inverse maps `(p, q)`.
    pub fn map_series(&self, n: usize) -> Result<(FreeMap, FreeMap), Error> {
        Ok((self.one_map_series(n, false)?, self.one_map_series(n, true)?))
    }

    fn one_map_series(&self, n: usize, inverse: bool) -> Result<FreeMap, Error> {
        let g = self.g();
        let sign = if inverse { -1.0 } else { 1.0 };
        let lam = FreeSeries::linear(&self.xi, n).scale(Complex64::new(sign, 0.0));
        let resolvent = series::geometric_inverse(&lam, n)?;
        let mut comps: Vec<FreeSeries> = (0..g).map(|_| FreeSeries::zero(g, 1, 1, n)).collect();
        for (w, c) in resolvent.terms() {
            if w.len() + 1 > n {
                continue;
            }
            for j in 1..=g {
                for i in 1..=g {
                    let z = c[(j - 1, i - 1)];
                    if z.norm() > 0.0 {
                        comps[i - 1]
                            .add_to_coeff(&w.prepend(j as u8), &CMatrix::from_element(1, 1, z));
                    }
                }
            }
        }
        FreeMap::new(comps)
    }

    /// Exact evaluation of `p` (or `q` with `inverse`) at a tuple, through
    /// the block resolvent: block `(j,i)` of `B` is
    /// `δ_{ji} I_n - sign · sum_k (Ξ_k)_{j,i} X_k`, and
    /// `p^i(X) = sum_j X_j (B^{-1})_{j,i}`.
    pub fn map_eval(&self, x: &MatrixTuple, inverse: bool) -> Result<MatrixTuple, Error> {
        let g = self.g();
        if x.g() != g {
            return Err(Error::VariableMismatch {
                expected: g,
                got: x.g(),
            });
        }
        let n = x.level();
        let sign = if inverse { -1.0 } else { 1.0 };
        let mut b = linalg::zeros(g * n, g * n);
        for j in 0..g {
            for i in 0..g {
                let mut block = if i == j {
                    linalg::identity(n)
                } else {
                    linalg::zeros(n, n)
                };
                for k in 1..=g {
                    let z = self.entry(k)[(j, i)] * Complex64::new(sign, 0.0);
                    if z.norm() > 0.0 {
                        block -= x.entry(k).map(|e| e * z);
                    }
                }
                b.view_mut((j * n, i * n), (n, n)).copy_from(&block);
            }
        }
        let b_inv = b.try_inverse().ok_or(Error::OutsideDomain)?;
        let entries = (0..g)
            .map(|i| {
                let mut acc = linalg::zeros(n, n);
                for j in 0..g {
                    acc += x.entry(j + 1) * b_inv.view((j * n, i * n), (n, n)).clone_owned();
                }
                acc
            })
            .collect();
        MatrixTuple::new(entries)
    }

    /// Check that `p` and `q` are mutually inverse: series composition up to
    /// degree `n` and sampled evaluation round-trips at norm `<= 0.1`.
    pub fn verify_inverse_pair(
        &self,
        n: usize,
        samples: usize,
        seed: u64,
    ) -> Result<InversePairReport, Error> {
        let (p, q) = self.map_series(n)?;
        let id = FreeMap::identity(self.g(), n);
        let series_residual = p
            .compose(&q)?
            .distance(&id)?
            .max(q.compose(&p)?.distance(&id)?);
        let mut sample_residual = 0.0f64;
        for i in 0..samples {
            let mut r = rng::substream(seed, i as u64);
            let x = rng::rescale_to_norm(&rng::ginibre_tuple(&mut r, self.g(), 3), 0.1);
            let fwd = self.map_eval(&x, false)?;
            let back = self.map_eval(&fwd, true)?;
            sample_residual = sample_residual.max(back.sub(&x)?.max_entry_norm());
            let bwd = self.map_eval(&x, true)?;
            let fore = self.map_eval(&bwd, false)?;
            sample_residual = sample_residual.max(fore.sub(&x)?.max_entry_norm());
        }
        Ok(InversePairReport {
            degree: n,
            samples,
            series_residual,
            sample_residual,
        })
    }

    /// Smallest `ν` with all products of `ν` entries zero (nilpotency order),
    /// together with the degree of `p`. For nilpotent tuples `ν <= g` and
    /// `deg p = ν`.
    pub fn nilpotency_and_degree(&self) -> Result<NilpotencyReport, Error> {
        let g = self.g();
        let tol = 1e-12;
        let mut order = None;
        for nu in 1..=g {
            let all_zero = word::words_of_len(g, nu)
                .iter()
                .all(|w| linalg::max_abs(&self.word_power(w)) <= tol);
            if all_zero {
                order = Some(nu);
                break;
            }
        }
        let n = g + 2;
        let (p, _) = self.map_series(n)?;
        let deg_p = p.degree(tol);
        Ok(NilpotencyReport {
            nilpotent_order: order,
            map_degree: deg_p,
        })
    }

    /// Block-diagonal direct sum on `g' + g''` variables.
    pub fn direct_sum(&self, other: &ConvexotonicTuple) -> ConvexotonicTuple {
        let g1 = self.g();
        let g2 = other.g();
        let g = g1 + g2;
        let entries = (0..g)
            .map(|j| {
                let mut m = linalg::zeros(g, g);
                if j < g1 {
                    m.view_mut((0, 0), (g1, g1)).copy_from(self.entry(j + 1));
                } else {
                    m.view_mut((g1, g1), (g2, g2)).copy_from(other.entry(j - g1 + 1));
                }
                m
            })
            .collect();
        ConvexotonicTuple {
            xi: MatrixTuple::new(entries).unwrap(),
        }
    }

    /// Linear change of variables `y = x M^{-1}`:
    /// `Ξ̃_j = M (sum_k M_{jk} Ξ_k) M^{-1}`, so that the new map satisfies
    /// `p̃(y) = p(yM) M^{-1}`.
    pub fn change_basis(&self, m: &CMatrix) -> Result<ConvexotonicTuple, Error> {
        let g = self.g();
        if m.nrows() != g || m.ncols() != g {
            return Err(Error::ShapeMismatch("change of basis must be g x g".into()));
        }
        let m_inv = linalg::inverse(m)?;
        let entries = (0..g)
            .map(|j| {
                let mut mix = linalg::zeros(g, g);
                for k in 0..g {
                    mix += self.entry(k + 1).map(|z| z * m[(j, k)]);
                }
                m * mix * &m_inv
            })
            .collect();
        Ok(ConvexotonicTuple {
            xi: MatrixTuple::new(entries).unwrap(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct InversePairReport {
    pub degree: usize,
    pub samples: usize,
    pub series_residual: f64,
    pub sample_residual: f64,
}

impl InversePairReport {
    pub fn passes(&self, series_tol: f64, sample_tol: f64) -> bool {
        self.series_residual < series_tol && self.sample_residual < sample_tol
    }
}

#[derive(Clone, Debug)]
pub struct NilpotencyReport {
    /// `Some(ν)` when jointly nilpotent of order `ν`.
    pub nilpotent_order: Option<usize>,
    /// Degree of the truncated `p` (None for the zero map, which cannot
    /// occur since `p` starts with the identity).
    pub map_degree: Option<usize>,
}

/// Build `(p, q)` directly from the coefficient formula
/// `p^i = sum_{j,a} (Ξ^a)_{j,i} x_j a` (signs `(-1)^{|a|}` for `q`), using
/// explicit word powers of `Ξ` instead of the series resolvent. Serves as an
/// independent cross-check of `map_series`.
pub fn map_series_by_word_powers(
    t: &ConvexotonicTuple,
    n: usize,
) -> Result<(FreeMap, FreeMap), Error> {
    let g = t.g();
    let mut pc: Vec<FreeSeries> = (0..g).map(|_| FreeSeries::zero(g, 1, 1, n)).collect();
    let mut qc = pc.clone();
    for alpha in word::words_up_to(g, n.saturating_sub(1)) {
        let xa = t.word_power(&alpha);
        let sign = if alpha.len() % 2 == 0 { 1.0 } else { -1.0 };
        for j in 1..=g {
            for i in 1..=g {
                let z = xa[(j - 1, i - 1)];
                if z.norm() > 0.0 {
                    let w = alpha.prepend(j as u8);
                    pc[i - 1].add_to_coeff(&w, &CMatrix::from_element(1, 1, z));
                    qc[i - 1].add_to_coeff(
                        &w,
                        &CMatrix::from_element(1, 1, z * Complex64::new(sign, 0.0)),
                    );
                }
            }
        }
    }
    Ok((FreeMap::new(pc)?, FreeMap::new(qc)?))
}

/// Solve the module equations `E_k R_j = sum_s (Ξ_j)_{k,s} E_s` for the
/// structure matrices `Ξ` by least squares against the stacked
/// vectorizations of `E`. Fails when `E` is dependent or some product
/// escapes the span.
pub fn structure_matrices(
    e: &MatrixTuple,
    r: &MatrixTuple,
    tol: f64,
) -> Result<ConvexotonicTuple, Error> {
    let g = e.g();
    if r.g() != g {
        return Err(Error::VariableMismatch {
            expected: g,
            got: r.g(),
        });
    }
    let d = e.level();
    if r.level() != d {
        return Err(Error::ShapeMismatch("E and R sizes differ".into()));
    }
    // columns of `stack` are vec(E_s)
    let mut stack = linalg::zeros(d * d, g);
    for s in 1..=g {
        stack.set_column(s - 1, &linalg::vectorize(e.entry(s)).column(0));
    }
    let sv = linalg::singular_values(&stack);
    let (hi, lo) = (sv[0], sv[sv.len() - 1]);
    if g > d * d || lo <= INDEPENDENCE_RATIO * hi {
        return Err(Error::DependentBasis {
            ratio: if hi > 0.0 { lo / hi } else { 0.0 },
        });
    }
    let scale = e.max_entry_norm().max(r.max_entry_norm()).max(1.0);
    let mut xi_entries = Vec::with_capacity(g);
    for j in 1..=g {
        let mut xi_j = linalg::zeros(g, g);
        for k in 1..=g {
            let prod = e.entry(k) * r.entry(j);
            let target = linalg::vectorize(&prod);
            let coeffs = linalg::lstsq(&stack, &target)?;
            let residual = linalg::fro_norm(&(&stack * &coeffs - &target));
            if residual > tol * scale {
                return Err(Error::NotAModule { residual });
            }
            for s in 0..g {
                xi_j[(k - 1, s)] = coeffs[(s, 0)];
            }
        }
        xi_entries.push(xi_j);
    }
    ConvexotonicTuple::new_unchecked(MatrixTuple::new(xi_entries)?)
}

/// Compose the maps of two tuples and test whether the composite is again a
/// convexotonic map. The candidate `Ξc` is read off the degree-2
/// coefficients (the coefficient of `x_j x_k` in `p^i` is `(Ξ_k)_{j,i}`).
pub fn composition_probe(
    a: &ConvexotonicTuple,
    b: &ConvexotonicTuple,
    n: usize,
) -> Result<CompositionReport, Error> {
    if a.g() != b.g() {
        return Err(Error::VariableMismatch {
            expected: a.g(),
            got: b.g(),
        });
    }
    let g = a.g();
    let (pa, _) = a.map_series(n)?;
    let (pb, _) = b.map_series(n)?;
    let composite = pa.compose(&pb)?;
    let degree = composite.degree(1e-12).unwrap_or(0);
    // linear part of any convexotonic map is the identity
    let linear_ok = {
        let mut ok = true;
        for i in 1..=g {
            for j in 1..=g as u8 {
                let c = composite.component(i).coeff(&Word::letter(j))[(0, 0)];
                let want = if j as usize == i { 1.0 } else { 0.0 };
                if (c - Complex64::new(want, 0.0)).norm() > 1e-10 {
                    ok = false;
                }
            }
        }
        ok
    };
    let mut cand = Vec::with_capacity(g);
    for k in 1..=g as u8 {
        let mut xk = linalg::zeros(g, g);
        for i in 1..=g {
            for j in 1..=g as u8 {
                xk[(j as usize - 1, i - 1)] =
                    composite.component(i).coeff(&Word::from_letters(&[j, k]))[(0, 0)];
            }
        }
        cand.push(xk);
    }
    let candidate = ConvexotonicTuple::new_unchecked(MatrixTuple::new(cand)?)?;
    let candidate_ok = candidate.is_convexotonic(1e-10);
    let match_residual = if linear_ok && candidate_ok {
        let (pc, _) = candidate.map_series(n)?;
        pc.distance(&composite)?
    } else {
        f64::INFINITY
    };
    // a polynomial composite of degree > g can never be convexotonic
    let degree_excluded = degree > g;
    let convexotonic = linear_ok && candidate_ok && match_residual < 1e-10 && !degree_excluded;
    Ok(CompositionReport {
        composite,
        degree,
        candidate,
        match_residual,
        convexotonic,
    })
}

#[derive(Clone, Debug)]
pub struct CompositionReport {
    pub composite: FreeMap,
    pub degree: usize,
    pub candidate: ConvexotonicTuple,
    pub match_residual: f64,
    pub convexotonic: bool,
}

/// The ball tuple for a row vector `v ∈ C^g`: `(Ξ_j)_{a,b} = conj(v_a) δ_{jb}`,
/// so that `Λ_Ξ(x) = v* x` and `p(x) = x (I - v* x)^{-1}`.
pub fn ball_tuple(v: &[Complex64]) -> ConvexotonicTuple {
    let g = v.len();
    let entries = (0..g)
        .map(|j| {
            let mut m = linalg::zeros(g, g);
            for a in 0..g {
                m[(a, j)] = v[a].conj();
            }
            m
        })
        .collect();
    ConvexotonicTuple::new_unchecked(MatrixTuple::new(entries).unwrap()).unwrap()
}
