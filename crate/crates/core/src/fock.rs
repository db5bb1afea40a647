//! Truncated Fock space: ladder matrices, deformation parameters and
//! guarded commutator defects.
//!
//! The standard annihilation operator on the first `D + 1` number states is
//! the band matrix `c[n, n+1] = sqrt(n + 1)`. A deformation with real
//! coefficients `(alpha, beta, gamma, delta)`,
//!
//! ```text
//! a = alpha · c + beta  · c†
//! b = gamma · c + delta · c†
//! ```
//!
//! satisfies `[a, b] = (alpha·delta - beta·gamma) · 1`, so the pair is
//! canonical exactly when `alpha·delta - beta·gamma = 1`. Truncation spoils
//! that identity only in the last `g` rows and columns (the *guard band*):
//! products of band matrices are exact away from the cutoff edge, which is
//! why every commutator check here reports the spectral norm of the
//! *top-left guarded block* of `a·b - b·a - 1` alongside the full-matrix
//! norm. The full norm is `O(D)` by construction — the bottom diagonal of a
//! truncated `[c, c†]` is `-D` — and is only useful as a diagnostic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Cutoff geometry of the truncated space: `levels` is the top retained
/// number state `D` (matrices are `(D+1) x (D+1)`) and `guard` is the number
/// of top levels excluded from every asserted identity.
///
/// Each application of a ladder operator can move one level, so a check that
/// multiplies `k` operators needs `guard >= k`; number-operator checks use
/// `guard >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockDim {
    levels: usize,
    guard: usize,
}

impl FockDim {
    /// New cutoff with `levels = D` and a guard band of `guard` top levels.
    pub fn new(levels: usize, guard: usize) -> Result<Self> {
        if levels < 1 {
            return Err(Error::DimensionTooSmall { needed: 1, got: levels });
        }
        if guard >= levels {
            return Err(Error::GuardTooLarge { guard, levels });
        }
        Ok(Self { levels, guard })
    }

    /// Top retained number state `D`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Guard band width `g`.
    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Full matrix side `D + 1`.
    pub fn matrix_size(&self) -> usize {
        self.levels + 1
    }

    /// Side of the guarded top-left block, `D - g + 1`.
    pub fn guarded_size(&self) -> usize {
        self.levels - self.guard + 1
    }
}

/// Provenance tag for a deformation parameter set.
///
/// The named families are one-parameter (or two-parameter) curves through
/// the canonical surface `alpha·delta - beta·gamma = 1`:
///
/// * `Harmonic` — `(1, 0, 0, 1)`, the self-adjoint pair `b = a†`;
/// * `Example3(s)` — `(1, s, s, 1 + s²)`;
/// * `Example3b(s)` — `(1, s, -s, 1 - s²)`;
/// * `Example4(alpha, mu)` — `(alpha, alpha/mu, mu(alpha² - 1)/alpha, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeformationFamily {
    Harmonic,
    Example3 { s: f64 },
    Example3b { s: f64 },
    Example4 { alpha: f64, mu: f64 },
    Custom,
}

impl DeformationFamily {
    /// Short name used in reports and error messages.
    pub fn name(&self) -> &'static str {
        match self {
            DeformationFamily::Harmonic => "harmonic",
            DeformationFamily::Example3 { .. } => "example3",
            DeformationFamily::Example3b { .. } => "example3b",
            DeformationFamily::Example4 { .. } => "example4",
            DeformationFamily::Custom => "custom",
        }
    }
}

/// Real coefficients of a canonical deformation pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub family: DeformationFamily,
}

/// Tolerance on `|alpha·delta - beta·gamma - 1|` at construction.
pub const CANONICAL_TOL: f64 = 1e-12;

impl DeformationParams {
    fn validated(
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        family: DeformationFamily,
    ) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("delta", delta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v} is not finite")));
            }
        }
        if alpha == 0.0 || delta == 0.0 {
            return Err(Error::InvalidParams(
                "alpha and delta must be nonzero (each operator needs a lowering part)".into(),
            ));
        }
        let symplectic = alpha * delta - beta * gamma;
        if (symplectic - 1.0).abs() > CANONICAL_TOL {
            return Err(Error::NotCanonical { value: symplectic });
        }
        Ok(Self { alpha, beta, gamma, delta, family })
    }

    /// The undeformed self-adjoint pair `a = c`, `b = c†`.
    pub fn harmonic() -> Self {
        Self::validated(1.0, 0.0, 0.0, 1.0, DeformationFamily::Harmonic)
            .expect("harmonic pair is canonical")
    }

    /// `a = c + s·c†`, `b = s·c + (1 + s²)·c†`.
    pub fn example3(s: f64) -> Result<Self> {
        Self::validated(1.0, s, s, 1.0 + s * s, DeformationFamily::Example3 { s })
    }

    /// `a = c + s·c†`, `b = -s·c + (1 - s²)·c†`.
    pub fn example3b(s: f64) -> Result<Self> {
        Self::validated(1.0, s, -s, 1.0 - s * s, DeformationFamily::Example3b { s })
    }

    /// `a = alpha·c + (alpha/mu)·c†`, `b = (mu(alpha² - 1)/alpha)·c + alpha·c†`.
    pub fn example4(alpha: f64, mu: f64) -> Result<Self> {
        if alpha == 0.0 || mu == 0.0 {
            return Err(Error::InvalidParams("example4 needs alpha != 0 and mu != 0".into()));
        }
        Self::validated(
            alpha,
            alpha / mu,
            mu * (alpha * alpha - 1.0) / alpha,
            alpha,
            DeformationFamily::Example4 { alpha, mu },
        )
    }

    /// Arbitrary coefficients; must satisfy `alpha·delta - beta·gamma = 1`.
    pub fn custom(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        Self::validated(alpha, beta, gamma, delta, DeformationFamily::Custom)
    }

    /// `|alpha·delta - beta·gamma - 1|`.
    pub fn symplectic_defect(&self) -> f64 {
        (self.alpha * self.delta - self.beta * self.gamma - 1.0).abs()
    }

    /// Two-step ratio `t = -beta / (2·alpha)` of the even vacuum series
    /// annihilated by `a`.
    pub fn vacuum_ratio_phi(&self) -> f64 {
        -self.beta / (2.0 * self.alpha)
    }

    /// Two-step ratio `t' = -gamma / (2·delta)` of the even vacuum series
    /// annihilated by `b†`.
    pub fn vacuum_ratio_psi(&self) -> f64 {
        -self.gamma / (2.0 * self.delta)
    }

    /// The parameter set whose `(a, b)` is the adjoint swap `(b†, a†)` of
    /// this one, exchanging the roles of the two vacuum constructions.
    pub fn dual(&self) -> Self {
        Self {
            alpha: self.delta,
            beta: self.gamma,
            gamma: self.beta,
            delta: self.alpha,
            family: DeformationFamily::Custom,
        }
    }
}

/// A dense operator on the truncated space, tagged with its cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub dim: FockDim,
    pub matrix: DMatrix<Complex64>,
}

impl TruncatedOperator {
    /// Wrap an explicit matrix; the side must match `dim`.
    pub fn new(dim: FockDim, matrix: DMatrix<Complex64>) -> Self {
        assert_eq!(matrix.nrows(), dim.matrix_size(), "matrix side must equal D + 1");
        assert_eq!(matrix.ncols(), dim.matrix_size(), "matrix side must equal D + 1");
        Self { dim, matrix }
    }

    /// Identity on the truncated space.
    pub fn identity(dim: FockDim) -> Self {
        Self { dim, matrix: DMatrix::identity(dim.matrix_size(), dim.matrix_size()) }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    /// Matrix product `self · rhs` (same cutoff required).
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "operators live on different cutoffs");
        Self { dim: self.dim, matrix: &self.matrix * &rhs.matrix }
    }

    /// Apply to a vector.
    pub fn apply(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }

    /// Largest `|i - j|` over nonzero entries (0 for the zero matrix).
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                if self.matrix[(i, j)].norm() > 0.0 {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }

    /// Spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }
}

/// Annihilation matrix: `c[n, n+1] = sqrt(n + 1)`.
pub fn annihilation_matrix(dim: FockDim) -> TruncatedOperator {
    let size = dim.matrix_size();
    let mut m = DMatrix::zeros(size, size);
    for n in 0..dim.levels() {
        m[(n, n + 1)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    TruncatedOperator { dim, matrix: m }
}

/// Creation matrix `c† = c`-adjoint: `c†[n+1, n] = sqrt(n + 1)`.
pub fn creation_matrix(dim: FockDim) -> TruncatedOperator {
    annihilation_matrix(dim).adjoint()
}

/// Build the deformed pair `(a, b)` from canonical coefficients.
pub fn deformation_pair(
    params: &DeformationParams,
    dim: FockDim,
) -> Result<(TruncatedOperator, TruncatedOperator)> {
    let defect = params.symplectic_defect();
    if defect > CANONICAL_TOL {
        return Err(Error::NotCanonical { value: params.alpha * params.delta - params.beta * params.gamma });
    }
    let c = annihilation_matrix(dim);
    let cdag = creation_matrix(dim);
    let lower = |x: f64, y: f64| -> DMatrix<Complex64> {
        &c.matrix * Complex64::new(x, 0.0) + &cdag.matrix * Complex64::new(y, 0.0)
    };
    let a = TruncatedOperator { dim, matrix: lower(params.alpha, params.beta) };
    let b = TruncatedOperator { dim, matrix: lower(params.gamma, params.delta) };
    Ok((a, b))
}

/// Commutator defect of a candidate pair.
#[derive(Debug, Clone, Copy)]
pub struct CommutatorDefect {
    /// Spectral norm of the top-left `(D - g + 1)` block of `ab - ba - 1`.
    pub guarded: f64,
    /// Spectral norm of the full `ab - ba - 1`; `O(D)` for any truncated
    /// canonical pair, reported for diagnostics only.
    pub full: f64,
    /// False when `g = 0`: the guarded block then includes the truncation
    /// row and the "guarded" number is as contaminated as the full one.
    pub reliable: bool,
}

/// Defect of `[a, b] = 1` away from (and including) the truncation edge.
pub fn commutator_defect(a: &TruncatedOperator, b: &TruncatedOperator) -> CommutatorDefect {
    assert_eq!(a.dim, b.dim, "operators live on different cutoffs");
    let size = a.dim.matrix_size();
    let commutator = &a.matrix * &b.matrix - &b.matrix * &a.matrix - DMatrix::identity(size, size);
    CommutatorDefect {
        guarded: linalg::block_norm(&commutator, a.dim.guarded_size()),
        full: linalg::spectral_norm(&commutator),
        reliable: a.dim.guard() >= 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent dense product for oracle checks: plain triple loop.
    fn naive_mul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (n, k, m) = (a.nrows(), a.ncols(), b.ncols());
        assert_eq!(k, b.nrows());
        let mut out = DMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                let mut acc = Complex64::new(0.0, 0.0);
                for l in 0..k {
                    acc += a[(i, l)] * b[(l, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }

    #[test]
    fn annihilation_entries_are_sqrt_n_plus_one() {
        let dim = FockDim::new(5, 1).unwrap();
        let c = annihilation_matrix(dim);
        assert_abs_diff_eq!(c.matrix[(0, 1)].re, 1.0);
        assert_abs_diff_eq!(c.matrix[(2, 3)].re, 3.0f64.sqrt());
        assert_abs_diff_eq!(c.matrix[(4, 5)].re, 5.0f64.sqrt());
        assert_eq!(c.bandwidth(), 1);
        // Everything off the superdiagonal vanishes.
        assert_eq!(c.matrix[(1, 0)], Complex64::new(0.0, 0.0));
        assert_eq!(c.matrix[(0, 2)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn creation_is_exact_adjoint() {
        let dim = FockDim::new(7, 1).unwrap();
        let c = annihilation_matrix(dim);
        let cdag = creation_matrix(dim);
        assert_eq!(cdag.matrix, c.matrix.adjoint());
    }

    #[test]
    fn truncated_ccr_bottom_corner_is_minus_d() {
        let dim = FockDim::new(6, 1).unwrap();
        let c = annihilation_matrix(dim);
        let cdag = creation_matrix(dim);
        let comm = naive_mul(&c.matrix, &cdag.matrix) - naive_mul(&cdag.matrix, &c.matrix);
        assert_abs_diff_eq!(comm[(6, 6)].re, -6.0, epsilon = 1e-14);
        for n in 0..6 {
            assert_abs_diff_eq!(comm[(n, n)].re, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn ccr_defect_guarded_small_full_large() {
        let dim = FockDim::new(100, 2).unwrap();
        let c = annihilation_matrix(dim);
        let cdag = creation_matrix(dim);
        let defect = commutator_defect(&c, &cdag);
        assert!(defect.guarded < 1e-12, "guarded defect {}", defect.guarded);
        assert!(defect.reliable);
        // Full defect: the bottom diagonal of [c, c†] - 1 is -(D + 1).
        assert_abs_diff_eq!(defect.full, 101.0, epsilon = 1e-9);
    }

    #[test]
    fn unguarded_defect_matches_dense_oracle() {
        // Oracle first: at D = 4, g = 0, the naive dense products give
        // [c, c†] - 1 = diag(0, 0, 0, 0, -(D + 1)), so the norm is D + 1 = 5.
        let dim = FockDim::new(4, 0).unwrap();
        let c = annihilation_matrix(dim);
        let cdag = creation_matrix(dim);
        let oracle =
            naive_mul(&c.matrix, &cdag.matrix) - naive_mul(&cdag.matrix, &c.matrix) - DMatrix::identity(5, 5);
        for i in 0..5 {
            for j in 0..5 {
                let expected = if i == 4 && j == 4 { -5.0 } else { 0.0 };
                assert_abs_diff_eq!(oracle[(i, j)].re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(oracle[(i, j)].im, 0.0, epsilon = 1e-14);
            }
        }
        let defect = commutator_defect(&c, &cdag);
        assert_abs_diff_eq!(defect.full, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(defect.guarded, 5.0, epsilon = 1e-12);
        assert!(!defect.reliable, "g = 0 must be flagged unreliable");
    }

    #[test]
    fn example3_pair_entries_and_guarded_defect() {
        let params = DeformationParams::example3(0.5).unwrap();
        let dim = FockDim::new(40, 2).unwrap();
        let (a, b) = deformation_pair(&params, dim).unwrap();
        // a = c + 0.5 c†, b = 0.5 c + 1.25 c† on the lowest levels.
        assert_abs_diff_eq!(a.matrix[(0, 1)].re, 1.0);
        assert_abs_diff_eq!(a.matrix[(1, 0)].re, 0.5);
        assert_abs_diff_eq!(b.matrix[(0, 1)].re, 0.5);
        assert_abs_diff_eq!(b.matrix[(1, 0)].re, 1.25);
        assert_eq!(a.bandwidth(), 1);
        assert_eq!(b.bandwidth(), 1);
        let defect = commutator_defect(&a, &b);
        assert!(defect.guarded < 1e-12, "guarded defect {}", defect.guarded);
    }

    #[test]
    fn example4_is_canonical_by_construction() {
        let params = DeformationParams::example4(2.0, 1.2).unwrap();
        assert_abs_diff_eq!(params.beta, 2.0 / 1.2, epsilon = 1e-15);
        assert_abs_diff_eq!(params.gamma, 1.2 * 3.0 / 2.0, epsilon = 1e-15);
        assert!(params.symplectic_defect() < 1e-13);
    }

    #[test]
    fn non_canonical_coefficients_rejected() {
        let err = DeformationParams::custom(1.0, 0.3, 0.3, 1.0).unwrap_err();
        match err {
            Error::NotCanonical { value } => assert_abs_diff_eq!(value, 0.91, epsilon = 1e-14),
            other => panic!("expected NotCanonical, got {other:?}"),
        }
    }

    #[test]
    fn zero_lowering_part_rejected() {
        assert!(matches!(
            DeformationParams::custom(0.0, 1.0, -1.0, 1.0),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn dual_swap_exchanges_vacuum_ratios() {
        let params = DeformationParams::example3(0.5).unwrap();
        let dual = params.dual();
        assert_abs_diff_eq!(dual.vacuum_ratio_phi(), params.vacuum_ratio_psi(), epsilon = 1e-15);
        assert_abs_diff_eq!(dual.vacuum_ratio_psi(), params.vacuum_ratio_phi(), epsilon = 1e-15);
        assert!(dual.symplectic_defect() < 1e-13);
    }

    #[test]
    fn fock_dim_validation() {
        assert!(FockDim::new(0, 0).is_err());
        assert!(FockDim::new(4, 4).is_err());
        let dim = FockDim::new(10, 3).unwrap();
        assert_eq!(dim.matrix_size(), 11);
        assert_eq!(dim.guarded_size(), 8);
    }
}
