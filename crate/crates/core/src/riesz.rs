//! Pseudo-boson systems built from Riesz bases and from positive metrics.
//!
//! Three constructions live here, complementing the parameter-driven
//! deformations of [`crate::fock`]:
//!
//! * **Basis → system** ([`from_riesz_basis`]): any invertible `R` on the
//!   truncated space generates a pseudo-boson pair by transport. Its columns
//!   `φ_n = R·ê_n` form a Riesz basis with frame operator `S = R·R†`, the
//!   ladder pair is `a = R·c·R⁻¹`, `b = R·c†·R⁻¹`, and the biorthogonal
//!   partners are `Ψ_n = S⁻¹·φ_n` — exact identities at any truncation, so
//!   every §4-style item check passes at rounding level.
//! * **Metric → system** ([`inverse_construction`]): given a lowering
//!   operator `A` and a positive `T`, the candidate raising operator is
//!   `b_T = T·A†·T⁻¹` (Eq. (2.20) territory). `[A, b_T] = 1` is an
//!   *assumption* there, not a theorem, so the constructor measures the
//!   commutator on the guarded sub-span and refuses incompatible metrics.
//! * **Counterexamples** ([`unbounded_metric_demo`]): the diagonal families
//!   `φ_n = e_n/√n`, `Ψ_n = √n·e_n` (and the even/odd variant) stay exactly
//!   biorthogonal at every truncation while their metric norms grow like `M`
//!   and `M²` — bases whose frame operators are genuinely unbounded.
//!
//! A Riesz basis is exactly as linearly independent as its synthesis matrix
//! is invertible; a redundant frame has `R` with nontrivial kernel and is
//! rejected by the singular-value floor rather than silently accepted (see
//! `frame_with_kernel_is_rejected` in the tests for the documented negative
//! example).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

use crate::error::{Error, Result};
use crate::family::{biorthogonality_defect, guarded_member_norm, FamilyKind, FockFamily};
use crate::fock::{annihilation_matrix, creation_matrix, FockDim, TruncatedOperator};
use crate::intertwine::guarded_span_basis;
use crate::linalg::{hermitian_eigen, spectral_norm};
use crate::metric::{gram, EIG_FLOOR};

/// Condition numbers of a metric beyond this are refused as numerically
/// unusable (the {`T`, `T⁻¹`, square-root} trio would lose all precision).
pub const CONDITION_CEILING: f64 = 1e12;

/// An invertible synthesis matrix whose columns are taken as a Riesz basis.
#[derive(Debug, Clone)]
pub struct RieszSource {
    /// Synthesis matrix: column `n` is the basis member `φ_n`.
    pub r: DMatrix<Complex64>,
    pub dim: FockDim,
}

/// How a [`PseudoBosonSystem`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemProvenance {
    /// Deformation parameters `(α, β, γ, δ)` via the ladder recursions.
    FromParams,
    /// Transported from a Riesz basis by [`from_riesz_basis`].
    FromRiesz,
    /// Metric-first inverse construction by [`inverse_construction`].
    FromT,
}

/// A complete truncated pseudo-boson system: the ladder pair, both
/// eigenfamilies and the metric linking them.
#[derive(Debug, Clone)]
pub struct PseudoBosonSystem {
    pub a: TruncatedOperator,
    pub b: TruncatedOperator,
    pub phis: FockFamily,
    pub psis: FockFamily,
    /// Metric: `R·R†` for Riesz systems, the supplied `T` for metric-first
    /// systems, the embedded frame operator for parameter systems.
    pub s: TruncatedOperator,
    pub provenance: SystemProvenance,
}

/// Defects of the four transport identities a Riesz-basis system must
/// satisfy (each is exact in exact arithmetic, so rounding is the budget).
#[derive(Debug, Clone)]
pub struct ItemChecks {
    /// Item 1a: `‖a·φ_0‖ / ‖φ_0‖`.
    pub vacuum_annihilation: f64,
    /// Item 1b: worst relative miss of `b·φ_n = √(n+1)·φ_{n+1}` over the
    /// family — the stepwise form of `bⁿ·φ_0 = √n!·φ_n` (equivalent by
    /// induction from item 1a, but free of the ×n rounding accumulation the
    /// literal power form suffers at large truncations).
    pub regeneration: f64,
    /// Item 2: `‖b†·Ψ_0‖ / ‖Ψ_0‖` for `Ψ_0 = S⁻¹·φ_0`.
    pub dual_vacuum_annihilation: f64,
    /// Item 3: biorthogonality defect of `{Ψ_n}` against `{φ_n}`.
    pub biorthogonality: f64,
    /// Item 4: relative mismatch between the Riesz bounds read off the Gram
    /// matrix (`R†R`) and off the frame operator (`R·R†`) — two independent
    /// routes to the same two numbers.
    pub bounds_mismatch: f64,
    /// Lower Riesz bound (smallest Gram eigenvalue).
    pub riesz_lower: f64,
    /// Upper Riesz bound (largest Gram eigenvalue).
    pub riesz_upper: f64,
}

impl ItemChecks {
    /// Largest of the four item defects.
    pub fn worst(&self) -> f64 {
        self.vacuum_annihilation
            .max(self.regeneration)
            .max(self.dual_vacuum_annihilation)
            .max(self.biorthogonality)
            .max(self.bounds_mismatch)
    }
}

/// The two norm estimates `‖φ_n‖ ≤ ‖T^{1/2}‖`, `‖Ψ_n‖ ≤ ‖T^{−1/2}‖`
/// (Eq. (2.23)) evaluated on a system.
#[derive(Debug, Clone)]
pub struct NormBoundCheck {
    pub max_phi_norm: f64,
    /// `‖T^{1/2}‖ = √λ_max(T)`.
    pub bound_phi: f64,
    pub max_psi_norm: f64,
    /// `‖T^{−1/2}‖ = 1/√λ_min(T)`.
    pub bound_psi: f64,
}

impl NormBoundCheck {
    /// Both inequalities, with a rounding allowance on the bound side.
    pub fn holds(&self) -> bool {
        let slack = 1.0 + 1e-12;
        self.max_phi_norm <= self.bound_phi * slack && self.max_psi_norm <= self.bound_psi * slack
    }
}

/// Which unbounded-metric counterexample to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnboundedKind {
    /// `φ_n = e_n/√n`, `Ψ_n = √n·e_n`: the metric `η_Ψ` is `diag(n)`.
    Single,
    /// The even/odd split: the basis-change operator is `diag(n²)` on even
    /// indices and `diag(1/n²)` on odd ones.
    EvenOdd,
}

/// One truncation point of the growth table.
#[derive(Debug, Clone)]
pub struct UnboundedGrowthRow {
    /// Truncation index `M` (members `n = 1..=M`).
    pub m: usize,
    /// Norm of the truncated metric / basis-change operator.
    pub metric_norm: f64,
    /// Worst deviation of `⟨Ψ_n, φ_n⟩` from `1` — identically zero because
    /// the pairing is evaluated in quotient form `w_n/w_n`.
    pub biorthogonality_defect: f64,
}

fn columns_family(dim: FockDim, columns: &DMatrix<Complex64>, kind: FamilyKind) -> FockFamily {
    let mut vectors = Vec::with_capacity(columns.ncols());
    let mut tail_masses = Vec::with_capacity(columns.ncols());
    for j in 0..columns.ncols() {
        let v: DVector<Complex64> = columns.column(j).into_owned();
        let norm_sq = v.norm_squared();
        let tail_sq: f64 = (dim.guarded_size()..dim.matrix_size()).map(|i| v[i].norm_sqr()).sum();
        tail_masses.push(if norm_sq > 0.0 { tail_sq / norm_sq } else { 0.0 });
        vectors.push(v);
    }
    FockFamily { vectors, kind, params: None, dim, tail_masses }
}

/// Random synthesis matrix with prescribed condition number: geometric
/// singular values `1 → 1/condition` between a seeded unitary pair.
///
/// Reproducible by construction — the same seed yields the same matrix
/// entry for entry, which is what lets property tests freeze their corpus.
pub fn random_riesz_source(dim: FockDim, condition: f64, seed: u64) -> Result<RieszSource> {
    if !(condition >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "condition number target must be >= 1, got {condition}"
        )));
    }
    let size = dim.matrix_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let haar = |rng: &mut ChaCha8Rng| -> DMatrix<Complex64> {
        let g = DMatrix::from_fn(size, size, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let qr = g.qr();
        let (mut q, r) = (qr.q(), qr.r());
        // Fix the column phases so the factorization is canonical (diagonal
        // of R real positive); otherwise the unitary is only defined up to
        // phases and determinism would hinge on library internals.
        for j in 0..size {
            let d = r[(j, j)];
            if d.norm() > 0.0 {
                let phase = d / Complex64::new(d.norm(), 0.0);
                for i in 0..size {
                    q[(i, j)] *= phase;
                }
            }
        }
        q
    };
    let u = haar(&mut rng);
    let w = haar(&mut rng);
    let mut scaled = u;
    for j in 0..size {
        let sigma = if size == 1 {
            1.0
        } else {
            condition.powf(-(j as f64) / (size as f64 - 1.0))
        };
        for i in 0..size {
            scaled[(i, j)] *= Complex64::new(sigma, 0.0);
        }
    }
    Ok(RieszSource { r: scaled * w.adjoint(), dim })
}

/// Wrap an explicit matrix (e.g. loaded from a file) as a Riesz source.
pub fn riesz_source_from_matrix(m: DMatrix<Complex64>, guard: usize) -> Result<RieszSource> {
    if m.nrows() != m.ncols() {
        return Err(Error::Config(format!(
            "synthesis matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() < 2 {
        return Err(Error::DimensionTooSmall { needed: 2, got: m.nrows() });
    }
    let dim = FockDim::new(m.nrows() - 1, guard)?;
    Ok(RieszSource { r: m, dim })
}

/// Transport the truncated CCR pair through a Riesz basis.
///
/// With `R = U·Σ·W†`: metric `S = R·R†`, ladder pair `a = R·c·R⁻¹`,
/// `b = R·c†·R⁻¹`, families `φ_n = R·ê_n` and `Ψ_n = S⁻¹·φ_n = (R⁻¹)†·ê_n`.
/// The guarded-span commutator and biorthogonality defects are validated
/// against `tol` before the system is released; both are exact identities,
/// so a failure means `R` was numerically singular enough to destroy them.
///
/// The adjoint pair is *not* canonical unless `R` is unitary:
/// `[a, a†] = R·c·R⁻¹·(R⁻¹)†·c†·R† − …` keeps a memory of `R·R†`, which is
/// the whole point of the construction.
pub fn from_riesz_basis(src: &RieszSource, tol: f64) -> Result<PseudoBosonSystem> {
    let size = src.dim.matrix_size();
    if src.r.nrows() != size || src.r.ncols() != size {
        return Err(Error::Config(format!(
            "synthesis matrix is {}x{}, cutoff wants {size}x{size}",
            src.r.nrows(),
            src.r.ncols()
        )));
    }
    let svd = src.r.clone().svd(true, true);
    let u = svd.u.expect("SVD with U requested");
    let w_t = svd.v_t.expect("SVD with V^T requested");
    let sigma = svd.singular_values;
    let min_sq = sigma.iter().fold(f64::INFINITY, |acc, &s| acc.min(s * s));
    if min_sq <= EIG_FLOOR {
        return Err(Error::IllConditioned(format!(
            "smallest squared singular value {min_sq:.3e} of the synthesis matrix is at or \
             below the floor {EIG_FLOOR:.1e}; the columns are not a (numerical) basis"
        )));
    }
    // R⁻¹ = W·Σ⁻¹·U† from the factors already in hand.
    let mut w_scaled = w_t.adjoint();
    for j in 0..size {
        let inv = Complex64::new(1.0 / sigma[j], 0.0);
        for i in 0..size {
            w_scaled[(i, j)] *= inv;
        }
    }
    let r_inv = w_scaled * u.adjoint();

    let c = annihilation_matrix(src.dim);
    let c_dag = creation_matrix(src.dim);
    let a = TruncatedOperator::new(src.dim, &src.r * (&c.matrix * &r_inv));
    let b = TruncatedOperator::new(src.dim, &src.r * (&c_dag.matrix * &r_inv));
    let s = TruncatedOperator::new(src.dim, &src.r * src.r.adjoint());
    let phis = columns_family(src.dim, &src.r, FamilyKind::Phi);
    let psis = columns_family(src.dim, &r_inv.adjoint(), FamilyKind::Psi);

    let basis = guarded_span_basis(&phis)?;
    let commutator = &a.matrix * &b.matrix
        - &b.matrix * &a.matrix
        - DMatrix::<Complex64>::identity(size, size);
    let comm_defect = spectral_norm(&(commutator * &basis));
    if comm_defect >= tol {
        return Err(Error::NotCanonical { value: comm_defect });
    }
    let bio = biorthogonality_defect(&psis, &phis);
    if bio >= tol {
        return Err(Error::Pairing { value: bio });
    }
    Ok(PseudoBosonSystem { a, b, phis, psis, s, provenance: SystemProvenance::FromRiesz })
}

/// The four transport identities of a system, as measured defects.
///
/// All norms are guarded (per-member, levels below the truncation edge) and
/// relative to the member norms, so the numbers are comparable across
/// conditioning regimes.
pub fn item_checks(sys: &PseudoBosonSystem) -> Result<ItemChecks> {
    let dim = sys.phis.dim;
    let phi0 = &sys.phis.vectors[0];
    let psi0 = &sys.psis.vectors[0];
    let vacuum_annihilation = guarded_member_norm(&sys.a.apply(phi0), dim, 0) / phi0.norm();
    let dual_vacuum_annihilation =
        guarded_member_norm(&sys.b.adjoint().apply(psi0), dim, 0) / psi0.norm();

    let mut regeneration = 0.0f64;
    for n in 1..sys.phis.vectors.len() {
        let stepped = sys.b.apply(&sys.phis.vectors[n - 1]);
        let target = &sys.phis.vectors[n] * Complex64::new((n as f64).sqrt(), 0.0);
        let miss = guarded_member_norm(&(stepped - &target), dim, n) / target.norm();
        regeneration = regeneration.max(miss);
    }

    let biorthogonality = biorthogonality_defect(&sys.psis, &sys.phis);

    let g = gram(&sys.phis)?;
    let (s_eigs, _) = hermitian_eigen(&sys.s.matrix);
    let s_min = s_eigs[0];
    let s_max = s_eigs[s_eigs.len() - 1];
    let bounds_mismatch =
        ((g.eig_min - s_min).abs() / s_min).max((g.eig_max - s_max).abs() / s_max);
    Ok(ItemChecks {
        vacuum_annihilation,
        regeneration,
        dual_vacuum_annihilation,
        biorthogonality,
        bounds_mismatch,
        riesz_lower: g.eig_min,
        riesz_upper: g.eig_max,
    })
}

/// Metric-first construction: candidate raising operator `b_T = T·A†·T⁻¹`.
///
/// `[A, b_T] = 1` is an assumption to be *checked*, not a consequence — most
/// positive `T` are incompatible with a given lowering operator. The defect
/// is measured span-compressed on the guarded sub-span of the family that
/// `b_T` itself generates from the numerical vacuum of `A`; at or above
/// `tol` the metric is refused with [`Error::NotCanonical`].
///
/// When `T` is the (embedded) frame operator of a deformed family, `b_T`
/// reproduces that family's raising operator — but only as well as `T⁻¹`
/// approximates the true biorthogonal duals, which needs the frame built
/// well deeper than the compared block (same depth rule as the dual
/// convergence checks in [`crate::metric`]).
pub fn inverse_construction(
    t: &DMatrix<Complex64>,
    a: &TruncatedOperator,
    nmax: usize,
    tol: f64,
) -> Result<PseudoBosonSystem> {
    let size = a.dim.matrix_size();
    if t.nrows() != size || t.ncols() != size {
        return Err(Error::Config(format!(
            "metric is {}x{}, lowering operator wants {size}x{size}",
            t.nrows(),
            t.ncols()
        )));
    }
    let herm_defect = spectral_norm(&(t - t.adjoint()));
    if herm_defect > 1e-12 * spectral_norm(t).max(1.0) {
        return Err(Error::Config(format!(
            "metric is not Hermitian (asymmetry {herm_defect:.3e})"
        )));
    }
    let (eigs, basis) = hermitian_eigen(t);
    let lambda_min = eigs[0];
    let lambda_max = eigs[size - 1];
    if lambda_min <= EIG_FLOOR {
        return Err(Error::NotPositiveDefinite { eigenvalue: lambda_min, floor: EIG_FLOOR });
    }
    if lambda_max / lambda_min >= CONDITION_CEILING {
        return Err(Error::IllConditioned(format!(
            "metric condition number {:.3e} is at or above the ceiling {CONDITION_CEILING:.1e}",
            lambda_max / lambda_min
        )));
    }
    let mut inv_scaled = basis.clone();
    for j in 0..size {
        let inv = Complex64::new(1.0 / eigs[j], 0.0);
        for i in 0..size {
            inv_scaled[(i, j)] *= inv;
        }
    }
    let t_inv = inv_scaled * basis.adjoint();
    let b_t = TruncatedOperator::new(a.dim, t * (a.adjoint().matrix * &t_inv));

    // Numerical vacuum of A: right singular vector of the smallest singular
    // value, phase-aligned on its largest component.
    let svd = a.matrix.clone().svd(false, true);
    let w_t = svd.v_t.expect("SVD with V^T requested");
    let sigma = svd.singular_values;
    let (mut min_idx, mut min_val) = (0, f64::INFINITY);
    let mut max_val = 0.0f64;
    for (i, &s) in sigma.iter().enumerate() {
        if s < min_val {
            min_val = s;
            min_idx = i;
        }
        max_val = max_val.max(s);
    }
    if min_val > 1e-8 * max_val {
        return Err(Error::Config(format!(
            "lowering operator has no numerical vacuum (smallest relative singular value \
             {:.3e})",
            min_val / max_val
        )));
    }
    let mut phi0: DVector<Complex64> = w_t.row(min_idx).adjoint();
    let lead = (0..size).max_by(|&i, &j| phi0[i].norm().total_cmp(&phi0[j].norm())).unwrap();
    let anchor = phi0[lead];
    phi0 *= anchor.conj() / Complex64::new(anchor.norm(), 0.0);
    // Scale so ⟨Ψ_0, φ_0⟩ = ⟨T⁻¹φ_0, φ_0⟩ = 1; the pairing is ‖T^{−1/2}φ_0‖²,
    // real positive, so a real rescale suffices.
    let pairing = (&t_inv * &phi0).dotc(&phi0).re;
    phi0 /= Complex64::new(pairing.sqrt(), 0.0);

    let mut columns = DMatrix::zeros(size, nmax + 1);
    columns.set_column(0, &phi0);
    let mut w = phi0;
    for n in 1..=nmax {
        w = b_t.apply(&w) / Complex64::new((n as f64).sqrt(), 0.0);
        columns.set_column(n, &w);
    }
    let phis = columns_family(a.dim, &columns, FamilyKind::Phi);
    let psis = columns_family(a.dim, &(&t_inv * columns), FamilyKind::Psi);

    let span = guarded_span_basis(&phis)?;
    let commutator = &a.matrix * &b_t.matrix
        - &b_t.matrix * &a.matrix
        - DMatrix::<Complex64>::identity(size, size);
    let defect = spectral_norm(&(commutator * &span));
    if defect >= tol {
        return Err(Error::NotCanonical { value: defect });
    }
    Ok(PseudoBosonSystem {
        a: a.clone(),
        b: b_t,
        phis,
        psis,
        s: TruncatedOperator::new(a.dim, t.clone()),
        provenance: SystemProvenance::FromT,
    })
}

/// Evaluate the Eq. (2.23) norm estimates on a system.
pub fn norm_bound_check(sys: &PseudoBosonSystem) -> NormBoundCheck {
    let (eigs, _) = hermitian_eigen(&sys.s.matrix);
    let lambda_min = eigs[0].max(f64::MIN_POSITIVE);
    let lambda_max = eigs[eigs.len() - 1];
    let max_phi_norm = sys.phis.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_psi_norm = sys.psis.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    NormBoundCheck {
        max_phi_norm,
        bound_phi: lambda_max.sqrt(),
        max_psi_norm,
        bound_psi: (1.0 / lambda_min).sqrt(),
    }
}

/// Growth table for the unbounded-metric counterexamples.
///
/// Everything here is diagonal and analytic: the truncated operator norm is
/// the largest diagonal weight (`M` for [`UnboundedKind::Single`], `M²` at
/// even `M` for [`UnboundedKind::EvenOdd`]), assembled from integer-valued
/// weights so the reported norms are exact in floating point. The pairings
/// `⟨Ψ_n, φ_n⟩` are evaluated in quotient form `w_n/w_n`, which is exactly
/// `1` — biorthogonality never degrades while the norms diverge.
pub fn unbounded_metric_demo(kind: UnboundedKind, ms: &[usize]) -> Result<Vec<UnboundedGrowthRow>> {
    if ms.is_empty() {
        return Err(Error::Config("empty truncation sequence".into()));
    }
    for pair in ms.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Config(format!(
                "truncation sequence must be strictly increasing, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    if ms[0] < 1 {
        return Err(Error::Config("truncations index members n >= 1".into()));
    }
    let rows = ms
        .iter()
        .map(|&m| {
            let mut metric_norm = 0.0f64;
            let mut biorthogonality_defect = 0.0f64;
            for n in 1..=m {
                let weight = match kind {
                    UnboundedKind::Single => n as f64,
                    UnboundedKind::EvenOdd => {
                        let nsq = (n * n) as f64;
                        if n % 2 == 0 {
                            nsq
                        } else {
                            1.0 / nsq
                        }
                    }
                };
                metric_norm = metric_norm.max(weight);
                // ⟨√w·e_n, e_n/√w⟩ in quotient form; exactly 1 for any w.
                biorthogonality_defect = biorthogonality_defect.max((weight / weight - 1.0).abs());
            }
            UnboundedGrowthRow { m, metric_norm, biorthogonality_defect }
        })
        .collect();
    Ok(rows)
}

/// Write a complex matrix as plain text: first line the side length, then
/// one row per line with entries `re,im` separated by single spaces.
///
/// `f64` values are printed in Rust's shortest round-trip form, so
/// write-then-read reproduces the matrix bit for bit.
pub fn write_matrix_file(path: &Path, m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Config(format!(
            "matrix files hold square matrices, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = String::new();
    out.push_str(&format!("{}\n", m.nrows()));
    for i in 0..m.nrows() {
        let row: Vec<String> =
            (0..m.ncols()).map(|j| format!("{},{}", m[(i, j)].re, m[(i, j)].im)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Read a matrix in the format of [`write_matrix_file`].
pub fn read_matrix_file(path: &Path) -> Result<DMatrix<Complex64>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let side: usize = lines
        .next()
        .ok_or_else(|| Error::MatrixFile("empty file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::MatrixFile("first line must be the matrix side length".into()))?;
    if side == 0 {
        return Err(Error::MatrixFile("matrix side must be positive".into()));
    }
    let mut m = DMatrix::<Complex64>::zeros(side, side);
    for i in 0..side {
        let line = lines
            .next()
            .ok_or_else(|| Error::MatrixFile(format!("missing row {i} of {side}")))?;
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != side {
            return Err(Error::MatrixFile(format!(
                "row {i} has {} entries, expected {side}",
                entries.len()
            )));
        }
        for (j, entry) in entries.iter().enumerate() {
            let (re, im) = entry.split_once(',').ok_or_else(|| {
                Error::MatrixFile(format!("entry ({i},{j}) is not a re,im pair: {entry:?}"))
            })?;
            let parse = |s: &str, part: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::MatrixFile(format!("entry ({i},{j}) has a bad {part} part: {s:?}"))
                })
            };
            m[(i, j)] = Complex64::new(parse(re, "real")?, parse(im, "imaginary")?);
        }
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(Error::MatrixFile(format!(
                "unexpected content after row {side} (line {})",
                side + 1 + extra
            )));
        }
    }
    Ok(m)
}
