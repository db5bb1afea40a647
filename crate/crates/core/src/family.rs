//! Vacua and the biorthogonal `φ`/`Ψ` families of a deformation pair.
//!
//! The vacuum of a lowering-type operator `x·c + y·c†` is an even squeezed
//! series: solving `(x·c + y·c†)·v = 0` level by level gives `v ∝ Σ_k
//! t^k · sqrt((2k)!)/k! · |2k⟩` with two-step ratio `t = -y/(2x)`. The
//! series is square-summable exactly when `|2t| < 1`, which for a canonical
//! pair means `|beta/alpha| < 1` on the `φ` side (vacuum of `a`) and
//! `|gamma/delta| < 1` on the `Ψ` side (vacuum of `b†`). Both conditions
//! together are the *admissibility* region of the parameters; for the named
//! families it reduces to the familiar intervals (`|s| < 1` for example3,
//! `|s| < (sqrt(5)-1)/2` for example3b, `1 < mu < 1 + 1/(alpha²-1)` for
//! example4 at `alpha > 1`).
//!
//! `φ_0` is normalized to unit length. `Ψ_0` is scaled so that
//! `⟨Ψ_0, φ_0⟩ = 1`; biorthonormality of the whole ladder then follows from
//! the commutation relation alone. The families are
//!
//! ```text
//! φ_n = (1/sqrt(n!)) · b^n  · φ_0      (raised by b)
//! Ψ_n = (1/sqrt(n!)) · (a†)^n · Ψ_0    (raised by a†)
//! ```
//!
//! and every identity asserted downstream — `⟨Ψ_n, φ_m⟩ = δ_nm`, the ladder
//! action `a·φ_n = sqrt(n)·φ_{n-1}`, the number action `(b·a)·φ_n = n·φ_n` —
//! is checked as a residual that must vanish to tolerance away from the
//! truncation edge.
//!
//! "Away from the edge" is quantitative. The truncated commutator carries an
//! exact defect `-(D+1)·|D⟩⟨D|`, and each raise injects it once and drags the
//! previously injected copies one level further down, so member `n` is
//! contaminated on the top `~n` levels and nowhere else. Residuals are
//! therefore measured on Fock levels `0..=D - max(g, n+2)` (raise count plus
//! a two-operator margin — the `g >= nmax + 2` rule). On that block the
//! residuals sit at rounding level; on the full vector they are O(1e-2) at
//! `s = 0.5, D = 100, n = 20` and would drown every identity.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{DeformationFamily, DeformationParams, FockDim, TruncatedOperator};

/// How a vacuum vector is scaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    /// Unit Euclidean norm (`φ_0`).
    UnitNorm,
    /// Scaled so the pairing with the opposite vacuum equals one (`Ψ_0`).
    /// The overlap recorded is `⟨Ψ_unit, φ_0⟩` of the unit-norm series
    /// before scaling — the cosine of the angle between the two vacua
    /// (exactly 1 only in the undeformed case).
    Pairing { raw_overlap: Complex64 },
}

/// A vacuum vector together with its truncation diagnostics.
#[derive(Debug, Clone)]
pub struct Vacuum {
    pub coeffs: DVector<Complex64>,
    /// Relative ℓ²-mass sitting on the guarded top levels.
    pub tail_mass: f64,
    /// Two-step series ratio `t` that generated the coefficients.
    pub ratio: f64,
    pub normalization: Normalization,
}

/// Which construction a family came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Phi,
    Psi,
    /// Orthonormalized family `S^{-1/2} φ_n`.
    Hatted,
    /// Dual family `S^{-1} φ_n` obtained from the Gram inverse.
    Dual,
}

/// A finite family of vectors on the truncated space.
#[derive(Debug, Clone)]
pub struct FockFamily {
    pub vectors: Vec<DVector<Complex64>>,
    pub kind: FamilyKind,
    pub params: Option<DeformationParams>,
    pub dim: FockDim,
    /// Relative top-guard mass of each member.
    pub tail_masses: Vec<f64>,
}

impl FockFamily {
    /// Highest member index.
    pub fn nmax(&self) -> usize {
        self.vectors.len() - 1
    }

    pub fn vector(&self, n: usize) -> &DVector<Complex64> {
        &self.vectors[n]
    }

    /// Members as columns of a `(D+1) x (nmax+1)` matrix.
    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        let rows = self.dim.matrix_size();
        let mut m = DMatrix::zeros(rows, self.vectors.len());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Same family truncated to its first `count` members.
    pub fn truncated(&self, count: usize) -> FockFamily {
        assert!(count >= 1 && count <= self.vectors.len());
        FockFamily {
            vectors: self.vectors[..count].to_vec(),
            kind: self.kind,
            params: self.params,
            dim: self.dim,
            tail_masses: self.tail_masses[..count].to_vec(),
        }
    }
}

/// Admissibility diagnosis of a parameter set.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// `1 - max(|beta/alpha|, |gamma/delta|)`; positive inside the region.
    pub margin: f64,
    /// `|beta/alpha|`, the geometric ratio of the `φ` vacuum series.
    pub phi_series_ratio: f64,
    /// `|gamma/delta|`, the geometric ratio of the `Ψ` vacuum series.
    pub psi_series_ratio: f64,
    pub family: String,
    /// Human-readable violation, `None` when admissible.
    pub reason: Option<String>,
}

impl AdmissibilityReport {
    /// Turn an inadmissible diagnosis into an error.
    pub fn ensure(&self) -> Result<()> {
        match &self.reason {
            None => Ok(()),
            Some(reason) => Err(Error::Admissibility {
                family: self.family.clone(),
                reason: reason.clone(),
            }),
        }
    }
}

/// Square-summability of both vacua: `|beta/alpha| < 1` and `|gamma/delta| < 1`.
pub fn admissible(params: &DeformationParams) -> AdmissibilityReport {
    let phi_ratio = (params.beta / params.alpha).abs();
    let psi_ratio = (params.gamma / params.delta).abs();
    let margin = 1.0 - phi_ratio.max(psi_ratio);
    let admissible = phi_ratio < 1.0 && psi_ratio < 1.0;
    let reason = if admissible {
        None
    } else {
        Some(match params.family {
            DeformationFamily::Example3 { s } => format!("s = {s} outside (-1, 1)"),
            DeformationFamily::Example3b { s } => {
                format!("s = {s} outside +/-(sqrt(5)-1)/2 = +/-0.6180339887498949")
            }
            DeformationFamily::Example4 { alpha, mu } => {
                format!("mu = {mu} outside (1, 1 + 1/(alpha^2 - 1)) = (1, {})", 1.0 + 1.0 / (alpha * alpha - 1.0))
            }
            _ => {
                if phi_ratio >= 1.0 {
                    format!("phi vacuum series ratio |beta/alpha| = {phi_ratio} >= 1")
                } else {
                    format!("psi vacuum series ratio |gamma/delta| = {psi_ratio} >= 1")
                }
            }
        })
    };
    AdmissibilityReport {
        admissible,
        margin,
        phi_series_ratio: phi_ratio,
        psi_series_ratio: psi_ratio,
        family: params.family.name().to_string(),
        reason,
    }
}

/// Un-normalized even series `f_{2k} = t^k sqrt((2k)!)/k!` up to `len`
/// coefficients, via the stable two-step recurrence
/// `f_{2k} = f_{2k-2} · t · sqrt(2k(2k-1))/k`.
pub(crate) fn squeezed_series(t: f64, len: usize) -> DVector<f64> {
    let mut f = DVector::zeros(len);
    f[0] = 1.0;
    let mut k = 1usize;
    while 2 * k < len {
        let two_k = (2 * k) as f64;
        f[2 * k] = f[2 * k - 2] * t * (two_k * (two_k - 1.0)).sqrt() / k as f64;
        k += 1;
    }
    f
}

fn series_vacuum(t: f64, dim: FockDim, side: &str, family: &str) -> Result<(DVector<Complex64>, f64)> {
    if 2.0 * t.abs() >= 1.0 {
        return Err(Error::Admissibility {
            family: family.to_string(),
            reason: format!("{side} vacuum series ratio {} >= 1 (not square-summable)", 2.0 * t.abs()),
        });
    }
    let f = squeezed_series(t, dim.matrix_size());
    let norm_sq: f64 = f.iter().map(|x| x * x).sum();
    let tail_sq: f64 = (dim.guarded_size()..dim.matrix_size()).map(|n| f[n] * f[n]).sum();
    let coeffs = DVector::from_iterator(
        f.len(),
        f.iter().map(|&x| Complex64::new(x / norm_sq.sqrt(), 0.0)),
    );
    Ok((coeffs, tail_sq / norm_sq))
}

/// Unit-norm vacuum of `a`: the even series with `t = -beta/(2 alpha)`.
///
/// Errors: `Admissibility` when the series is not square-summable,
/// `Truncation` when the guarded tail mass exceeds `tol`.
pub fn vacuum_phi(params: &DeformationParams, dim: FockDim, tol: f64) -> Result<Vacuum> {
    let t = params.vacuum_ratio_phi();
    let (coeffs, tail_mass) = series_vacuum(t, dim, "phi", params.family.name())?;
    if tail_mass > tol {
        return Err(Error::Truncation { tail: tail_mass, tol });
    }
    Ok(Vacuum { coeffs, tail_mass, ratio: t, normalization: Normalization::UnitNorm })
}

/// Vacuum of `b†` (the even series with `t' = -gamma/(2 delta)`), scaled so
/// that `⟨Ψ_0, φ_0⟩ = 1`.
///
/// Errors: as [`vacuum_phi`], plus `Pairing` when the two vacua are
/// numerically orthogonal and no such scaling exists.
pub fn vacuum_psi(
    params: &DeformationParams,
    dim: FockDim,
    tol: f64,
    phi0: &Vacuum,
) -> Result<Vacuum> {
    let t = params.vacuum_ratio_psi();
    let (raw, tail_mass) = series_vacuum(t, dim, "psi", params.family.name())?;
    if tail_mass > tol {
        return Err(Error::Truncation { tail: tail_mass, tol });
    }
    let raw_overlap = raw.dotc(&phi0.coeffs);
    if raw_overlap.norm() < 1e-13 {
        return Err(Error::Pairing { value: raw_overlap.norm() });
    }
    let scale = (raw_overlap.inv()).conj();
    Ok(Vacuum {
        coeffs: raw * scale,
        tail_mass,
        ratio: t,
        normalization: Normalization::Pairing { raw_overlap },
    })
}

/// Raise a vacuum into a family: `v_n = raiser · v_{n-1} / sqrt(n)`.
///
/// Preconditions: `nmax + guard <= levels` (each raise climbs one level) and
/// `guard >= 2` so at least the downstream two-operator identities stay
/// clean. Tail masses (relative ℓ²-mass on the top `guard` levels) are
/// recorded per member; any above `tail_tol` is an error. `tail_tol` budgets
/// edge mass, not identity defects, so callers asserting defects at `tol`
/// typically build with a looser `tail_tol` (the pipelines use `100·tol`).
pub fn build_family(
    vacuum: &Vacuum,
    raiser: &TruncatedOperator,
    nmax: usize,
    tail_tol: f64,
    kind: FamilyKind,
    params: Option<DeformationParams>,
) -> Result<FockFamily> {
    let dim = raiser.dim;
    if dim.guard() < 2 {
        return Err(Error::Config(format!(
            "family construction needs a guard band of at least 2 levels, got {}",
            dim.guard()
        )));
    }
    if nmax + dim.guard() > dim.levels() {
        return Err(Error::DimensionTooSmall { needed: nmax + dim.guard(), got: dim.levels() });
    }
    let mut vectors = Vec::with_capacity(nmax + 1);
    let mut tail_masses = Vec::with_capacity(nmax + 1);
    vectors.push(vacuum.coeffs.clone());
    tail_masses.push(vacuum.tail_mass);
    for n in 1..=nmax {
        let next = raiser.apply(&vectors[n - 1]) / Complex64::new((n as f64).sqrt(), 0.0);
        let norm_sq = next.norm_squared();
        let tail_sq: f64 =
            (dim.guarded_size()..dim.matrix_size()).map(|i| next[i].norm_sqr()).sum();
        let tail = tail_sq / norm_sq;
        if tail > tail_tol {
            return Err(Error::Truncation { tail, tol: tail_tol });
        }
        tail_masses.push(tail);
        vectors.push(next);
    }
    Ok(FockFamily { vectors, kind, params, dim, tail_masses })
}

/// Pairing matrix `⟨Ψ_n, φ_m⟩` (conjugate-linear in the first family).
pub fn biorthogonality_matrix(psis: &FockFamily, phis: &FockFamily) -> DMatrix<Complex64> {
    let n = psis.vectors.len();
    let m = phis.vectors.len();
    DMatrix::from_fn(n, m, |i, j| psis.vectors[i].dotc(&phis.vectors[j]))
}

/// Largest deviation of the pairing matrix from the identity.
pub fn biorthogonality_defect(psis: &FockFamily, phis: &FockFamily) -> f64 {
    let mut b = biorthogonality_matrix(psis, phis);
    let k = b.nrows().min(b.ncols());
    for i in 0..k {
        b[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    crate::linalg::max_abs(&b)
}

/// Norm of `v` restricted to Fock levels `0..=top` (the clean block for a
/// depth-`n` member, `top = D - max(g, n+2)` — see the module docs).
pub(crate) fn guarded_member_norm(v: &DVector<Complex64>, dim: FockDim, member: usize) -> f64 {
    let eff_guard = dim.guard().max(member + 2).min(dim.levels());
    let top = dim.levels() - eff_guard;
    v.rows(0, top + 1).norm()
}

/// Residuals of the lowering action: `‖L v_0‖` at `n = 0` and
/// `‖L v_n - sqrt(n) v_{n-1}‖` for `n >= 1`, each measured on the clean
/// block of member `n` (levels `0..=D - max(g, n+2)`).
pub fn ladder_residuals(family: &FockFamily, lowerer: &TruncatedOperator) -> Vec<f64> {
    let dim = family.dim;
    let mut out = Vec::with_capacity(family.vectors.len());
    out.push(guarded_member_norm(&lowerer.apply(&family.vectors[0]), dim, 0));
    for n in 1..family.vectors.len() {
        let lowered = lowerer.apply(&family.vectors[n]);
        let expected = &family.vectors[n - 1] * Complex64::new((n as f64).sqrt(), 0.0);
        out.push(guarded_member_norm(&(lowered - expected), dim, n));
    }
    out
}

/// Residuals of the number action: `‖N v_n - n v_n‖` per member, measured on
/// the clean block of member `n` (levels `0..=D - max(g, n+2)`).
///
/// `N` is a two-operator product, so the cutoff must carry `guard >= 3`.
pub fn number_residuals(family: &FockFamily, number_op: &TruncatedOperator) -> Result<Vec<f64>> {
    if family.dim.guard() < 3 {
        return Err(Error::Config(format!(
            "number checks need a guard band of at least 3 levels, got {}",
            family.dim.guard()
        )));
    }
    Ok((0..family.vectors.len())
        .map(|n| {
            let applied = number_op.apply(&family.vectors[n]);
            let expected = &family.vectors[n] * Complex64::new(n as f64, 0.0);
            guarded_member_norm(&(applied - expected), family.dim, n)
        })
        .collect())
}

/// Number operator `N = b · a` (acts as `n` on the `φ` family).
pub fn number_operator(a: &TruncatedOperator, b: &TruncatedOperator) -> TruncatedOperator {
    b.compose(a)
}

/// Conjugate number operator `𝔑 = a† · b† = N†` (acts as `n` on the `Ψ`s).
pub fn conjugate_number_operator(
    a: &TruncatedOperator,
    b: &TruncatedOperator,
) -> TruncatedOperator {
    a.adjoint().compose(&b.adjoint())
}
