//! Small dense linear-algebra helpers shared across the crate.
//!
//! Everything here wraps nalgebra with the conventions used throughout:
//! Hermitian eigendecompositions are returned sorted ascending, matrix
//! functions of Hermitian matrices go through an eigenvalue floor that
//! errors out (rather than clamping) on near-singular input, and Gauss
//! nodes are generated by Golub–Welsch from the Jacobi matrix of the
//! weight, which keeps node generation deterministic and self-contained.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Spectral norm of the top-left `k`×`k` block.
pub fn block_norm(m: &DMatrix<Complex64>, k: usize) -> f64 {
    let k = k.min(m.nrows()).min(m.ncols());
    spectral_norm(&m.view((0, 0), (k, k)).into_owned())
}

/// Hermitian eigendecomposition, eigenpairs sorted by ascending eigenvalue.
///
/// The input is assumed Hermitian; only rounding-level asymmetry is
/// tolerated (the decomposition reads both triangles through nalgebra).
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let eig = nalgebra::linalg::SymmetricEigen::new(m.clone());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// `f(M)` for Hermitian `M` via the spectral theorem: `W f(Λ) W†`.
///
/// Every eigenvalue must exceed `floor` in magnitude relative to the largest
/// one whenever `f` is singular at zero (negative or fractional powers);
/// violations are an error, never a clamp, so that an ill-conditioned metric
/// surfaces instead of silently flattening.
pub fn hermitian_power(m: &DMatrix<Complex64>, exponent: f64, floor: f64) -> Result<DMatrix<Complex64>> {
    let (values, vectors) = hermitian_eigen(m);
    let scale = values.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if exponent < 0.0 || exponent.fract() != 0.0 {
        for &v in values.iter() {
            if v <= floor * scale {
                return Err(Error::NotPositiveDefinite { eigenvalue: v, floor: floor * scale });
            }
        }
    }
    let powered = DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v.powf(exponent), 0.0)),
    );
    Ok(&vectors * DMatrix::from_diagonal(&powered) * vectors.adjoint())
}

/// Nodes and weights of an `n`-point Gauss rule from a symmetric tridiagonal
/// Jacobi matrix (Golub–Welsch). `mu0` is the total mass of the weight.
/// Returns nodes ascending with `log`-weights (weights can underflow f64 for
/// large Hermite rules; callers exponentiate after adding their own factors).
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        jacobi[(i, i)] = d;
    }
    for (i, &b) in offdiag.iter().enumerate() {
        jacobi[(i, i + 1)] = b;
        jacobi[(i + 1, i)] = b;
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let first = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0.ln() + 2.0 * first.abs().max(f64::MIN_POSITIVE).ln())
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `n`-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && b > a, "need at least one node and a nonempty interval");
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (nodes, log_weights) = golub_welsch(&diag, &offdiag, 2.0);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        nodes.iter().map(|&x| mid + half * x).collect(),
        log_weights.iter().map(|&lw| half * lw.exp()).collect(),
    )
}

/// `n`-point Gauss–Hermite rule with *total* weights `w_i · exp(x_i^2)`,
/// suitable for integrating products of Hermite functions directly:
/// `∫ f ≈ Σ W_i f(x_i)`.
///
/// Nodes come from the Jacobi-matrix eigenvalues; the total weights are
/// the reciprocal Christoffel sums `W_i = 1/Σ_{k<n} h_k(x_i)²` over the
/// orthonormal Hermite functions. The textbook eigenvector-first-component
/// route fails here: for a wide rule those components carry the
/// `e^{-x²/2}` scale of the edge nodes (`~1e-87` at `n = 200`), far below
/// the eigensolver's absolute noise, and no log-space bookkeeping can
/// recover digits the solver never produced. The Christoffel sums are
/// order-one quantities of the same guarded recurrence the synthesis code
/// uses, so they stay accurate arbitrarily far out.
pub fn gauss_hermite_total(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let diag = vec![0.0; n];
    let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    let (nodes, _) = golub_welsch(&diag, &offdiag, std::f64::consts::PI.sqrt());
    let h = hermite_values(n - 1, &nodes);
    let total = (0..n)
        .map(|i| 1.0 / (0..n).map(|k| h[(i, k)] * h[(i, k)]).sum::<f64>())
        .collect();
    (nodes, total)
}

/// Rescaling unit for the log-magnitude Hermite recurrence.
const HERMITE_RESCALE: f64 = 1e200;

/// Orthonormal Hermite functions `h_0..h_nmax` sampled on `xs`; row `i`,
/// column `k` holds `h_k(xs[i])`.
///
/// Seeded with `h_0(x) = π^{-1/4}·e^{-x²/2}` and advanced by the stable
/// two-term recurrence `h_{k+1} = x·√(2/(k+1))·h_k - √(k/(k+1))·h_{k-1}`,
/// carried on a mantissa pair with a shared power-of-`1e200` exponent:
/// for `|x| ≳ 38` the seed underflows `f64` outright, yet the recurrence
/// climbs back to order one once `k` passes the turning point `x²/2`, so
/// the magnitude must be tracked symbolically until then.
pub(crate) fn hermite_values(nmax: usize, xs: &[f64]) -> DMatrix<f64> {
    let lambda = HERMITE_RESCALE.ln();
    let mut out = DMatrix::<f64>::zeros(xs.len(), nmax + 1);
    let readout = |m: f64, k: i32| if k == 0 { m } else { m * HERMITE_RESCALE.powi(k) };
    for (i, &x) in xs.iter().enumerate() {
        // h_0 = π^{-1/4}·e^{-x²/2} as mantissa · RESCALE^k with the
        // residual exponent in (-λ, 0], so the mantissa never overflows.
        let l0 = -0.5 * x * x;
        let mut k = (l0 / lambda).ceil() as i32;
        let mut prev = 0.0f64;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (l0 - f64::from(k) * lambda).exp();
        out[(i, 0)] = readout(cur, k);
        for n in 0..nmax {
            let nf = n as f64;
            let next = x * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            if cur.abs() > HERMITE_RESCALE || prev.abs() > HERMITE_RESCALE {
                cur /= HERMITE_RESCALE;
                prev /= HERMITE_RESCALE;
                k += 1;
            } else if cur.abs() < 1.0 / HERMITE_RESCALE
                && prev.abs() < 1.0 / HERMITE_RESCALE
                && (cur != 0.0 || prev != 0.0)
            {
                cur *= HERMITE_RESCALE;
                prev *= HERMITE_RESCALE;
                k -= 1;
            }
            out[(i, n + 1)] = readout(cur, k);
        }
    }
    out
}

/// Ordinary least-squares line through `(x, y)` points.
#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual of the fitted line.
    pub max_residual: f64,
    /// Coefficient of determination.
    pub r_squared: f64,
}

/// Fit `y ≈ slope · x + intercept` by least squares.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|&x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(&x, &y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut max_residual = 0.0f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - (slope * x + intercept);
        max_residual = max_residual.max(r.abs());
        ss_res += r * r;
        ss_tot += (y - mean_y).powi(2);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LinearFit { slope, intercept, max_residual, r_squared }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_norm_of_known_matrix() {
        // [[0, 2], [0, 0]] has singular values {2, 0}.
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(2.0, 0.0);
        assert_abs_diff_eq!(spectral_norm(&m), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn hermitian_eigen_sorted_and_reconstructs() {
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(3.0, 0.0)]);
        let (values, vectors) = hermitian_eigen(&m);
        assert!(values[0] <= values[1]);
        // Eigenvalues of [[2, -i], [i, 3]] are (5 ± sqrt(5)) / 2.
        assert_abs_diff_eq!(values[0], (5.0 - 5.0f64.sqrt()) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], (5.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-12);
        let diag = DMatrix::from_diagonal(&values.map(|v| c(v, 0.0)));
        let rebuilt = &vectors * diag * vectors.adjoint();
        assert!(max_abs(&(&rebuilt - &m)) < 1e-12);
    }

    #[test]
    fn hermitian_power_roundtrip_and_floor() {
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let half = hermitian_power(&m, 0.5, 1e-13).unwrap();
        let rebuilt = &half * &half;
        assert!(max_abs(&(&rebuilt - &m)) < 1e-12);

        let singular = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            hermitian_power(&singular, -0.5, 1e-13),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(5, 0.0, 2.0);
        // Degree-9 polynomial is exact for a 5-point rule.
        let integral: f64 = nodes.iter().zip(&weights).map(|(&x, &w)| w * x.powi(9)).sum();
        assert_abs_diff_eq!(integral, 2.0f64.powi(10) / 10.0, epsilon = 1e-10);
        let mass: f64 = weights.iter().sum();
        assert_abs_diff_eq!(mass, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn gauss_hermite_total_integrates_gaussian_moments() {
        let (nodes, weights) = gauss_hermite_total(40);
        // ∫ x^2 e^{-x^2} dx = sqrt(pi) / 2, with the e^{x^2} folded into weights.
        let integral: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x * x * (-x * x).exp())
            .sum();
        assert_abs_diff_eq!(integral, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn linear_fit_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let fit = linear_fit(&xs, &ys);
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fit.intercept, 1.0, epsilon = 1e-14);
        assert!(fit.max_residual < 1e-14);
        assert!(fit.r_squared > 0.999_999);
    }
}
