//! Intertwining and pseudo-hermiticity relations between the two number
//! operators, and the eigenvector-transport argument they support.
//!
//! With `N = b·a` and `𝔑 = N† = a†·b†`, the frame operators of the two
//! families intertwine the pair: `b·η_φ = η_φ·a†` on the Ψ-span and
//! `η_Ψ·N = N†·η_Ψ` on the φ-span. Chaining the relations transports
//! eigenvectors across the similarity: `N·(η_φ·Ψ_n) = n·(η_φ·Ψ_n)`, which
//! is how the φ-members are recognized as eigenvectors of `N` without ever
//! diagonalizing anything.
//!
//! Truncation forces two measurement rules. First, the ladder relation
//! consumes the member *above* each tested one (`b·η_φ` applied to `Ψ_n`
//! produces `φ_{n+1}`), so the top members of a finite family have no
//! successor inside the span and testing on the full span measures the
//! truncation cliff — `O(10²)` at `s = 0.5` — rather than the relation.
//! Defects are therefore compressed onto the guarded sub-span of the
//! members `n ≤ nmax − g`. Second, transported eigenvectors inherit the
//! edge contamination of the family recursion, so their residuals use the
//! same per-member guarded norm as the direct number-operator checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::{guarded_member_norm, FockFamily};
use crate::fock::TruncatedOperator;
use crate::linalg::spectral_norm;
use crate::metric;

/// Orthonormal basis of the guarded sub-span: the members `n ≤ nmax − g`
/// with `g` the guard band of the truncation (at least 2).
///
/// This is the test subspace for the intertwining defects; see the module
/// docs for why the top members must sit outside it.
pub fn guarded_span_basis(fam: &FockFamily) -> Result<DMatrix<Complex64>> {
    let margin = fam.dim.guard().max(2);
    if fam.nmax() < margin {
        return Err(Error::Config(format!(
            "guarded span needs nmax > margin {margin}, family has nmax {}",
            fam.nmax()
        )));
    }
    metric::span_basis(&fam.truncated(fam.nmax() + 1 - margin))
}

/// Intertwining defect `‖(B·η_φ − η_φ·A†)·P‖` with `P = U·U†` the
/// projector spanned by the columns of `span_basis` (Eq. 2.18 reads
/// `b·η_φ = η_φ·a†` on the Ψ-span).
///
/// The same routine evaluates the adjoint companion `a†·η_Ψ = η_Ψ·b` by
/// swapping the operand roles: pass `(A†, η_Ψ, B)` and a guarded φ-span
/// basis.
pub fn intertwining_defect_ladder(
    b: &TruncatedOperator,
    eta_phi: &TruncatedOperator,
    a_dag: &TruncatedOperator,
    span_basis: &DMatrix<Complex64>,
) -> f64 {
    let eta_u = &eta_phi.matrix * span_basis;
    let defect = &b.matrix * &eta_u - &eta_phi.matrix * (&a_dag.matrix * span_basis);
    spectral_norm(&defect)
}

/// Pseudo-hermiticity defect `‖(η_Ψ·N − N†·η_Ψ)·P‖` (Eq. 2.19:
/// `η_Ψ·N = 𝔑·η_Ψ` with `𝔑 = N†`), compressed by a guarded φ-span basis.
pub fn pseudohermiticity_defect(
    n_op: &TruncatedOperator,
    eta_psi: &TruncatedOperator,
    span_basis: &DMatrix<Complex64>,
) -> f64 {
    let forward = &eta_psi.matrix * (&n_op.matrix * span_basis);
    let backward = n_op.matrix.adjoint() * (&eta_psi.matrix * span_basis);
    spectral_norm(&(forward - backward))
}

/// Replay the eigenvalue-transport argument: `residual[n]` is the guarded
/// norm of `N·(η_φ·Ψ_n) − n·(η_φ·Ψ_n)`.
///
/// In exact arithmetic `η_φ·Ψ_n = φ_n`, so these residuals must agree with
/// the direct number-operator residuals of the φ-family — the same vectors
/// reached through two different derivations.
pub fn eigen_transport(
    n_op: &TruncatedOperator,
    eta_phi: &TruncatedOperator,
    psis: &FockFamily,
) -> Vec<f64> {
    psis.vectors
        .iter()
        .enumerate()
        .map(|(n, psi)| {
            let transported = eta_phi.apply(psi);
            let residual = n_op.apply(&transported) - transported * Complex64::new(n as f64, 0.0);
            guarded_member_norm(&residual, psis.dim, n)
        })
        .collect()
}

/// Biorthogonal compression `M = W†·N·V` of an operator onto the family
/// pair (`V`, `W` the φ/Ψ member matrices).
///
/// For the number operator the exact compression is `diag(0, 1, …, nmax)`:
/// `M[i][j] = ⟨Ψ_i, N·φ_j⟩ = j·δ_ij`. Since `M` is similar to the
/// span-restriction of `N`, a small deviation pins the span-restricted
/// spectrum to the integers (Gershgorin), for `N†` as well because the
/// swapped compression is exactly `M†`.
pub fn span_compressed_number(
    n_op: &TruncatedOperator,
    phis: &FockFamily,
    psis: &FockFamily,
) -> DMatrix<Complex64> {
    let v = phis.as_matrix();
    let w = psis.as_matrix();
    w.adjoint() * (&n_op.matrix * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{build_family, number_residuals, vacuum_phi, vacuum_psi, FamilyKind};
    use crate::fock::{deformation_pair, DeformationParams, FockDim};
    use crate::metric::metric_operator;

    struct Stage {
        a: TruncatedOperator,
        b: TruncatedOperator,
        phis: FockFamily,
        psis: FockFamily,
    }

    fn stage(params: DeformationParams, d: usize, nmax: usize) -> Stage {
        let dim = FockDim::new(d, 4).unwrap();
        let (a, b) = deformation_pair(&params, dim).unwrap();
        let phi0 = vacuum_phi(&params, dim, 1e-6).unwrap();
        let psi0 = vacuum_psi(&params, dim, 1e-6, &phi0).unwrap();
        let phis = build_family(&phi0, &b, nmax, 1e-6, FamilyKind::Phi, Some(params)).unwrap();
        let psis =
            build_family(&psi0, &a.adjoint(), nmax, 1e-6, FamilyKind::Psi, Some(params)).unwrap();
        Stage { a, b, phis, psis }
    }

    fn example3_stage(s: f64, nmax: usize) -> Stage {
        stage(DeformationParams::example3(s).unwrap(), 100, nmax)
    }

    #[test]
    fn ccr_all_defects_vanish() {
        let st = example3_stage(0.0, 16);
        let eta_phi = metric_operator(&st.phis);
        let eta_psi = metric_operator(&st.psis);
        let p_psi = guarded_span_basis(&st.psis).unwrap();
        let p_phi = guarded_span_basis(&st.phis).unwrap();
        let a_dag = st.a.adjoint();
        let n_op = st.b.compose(&st.a);
        assert!(intertwining_defect_ladder(&st.b, &eta_phi, &a_dag, &p_psi) < 1e-12);
        assert!(pseudohermiticity_defect(&n_op, &eta_psi, &p_phi) < 1e-12);
        for r in eigen_transport(&n_op, &eta_phi, &st.psis) {
            assert!(r < 1e-12);
        }
    }

    #[test]
    fn intertwining_defect_guarded_span_example3() {
        let st = example3_stage(0.5, 16);
        let eta_phi = metric_operator(&st.phis);
        let eta_psi = metric_operator(&st.psis);
        let a_dag = st.a.adjoint();
        let p_psi = guarded_span_basis(&st.psis).unwrap();
        let p_phi = guarded_span_basis(&st.phis).unwrap();

        let primal = intertwining_defect_ladder(&st.b, &eta_phi, &a_dag, &p_psi);
        assert!(primal < 1e-6, "primal intertwining defect {primal:.3e}");
        // Companion relation a†·η_Ψ = η_Ψ·b, same routine with roles swapped.
        let companion = intertwining_defect_ladder(&a_dag, &eta_psi, &st.b, &p_phi);
        assert!(companion < 1e-6, "companion intertwining defect {companion:.3e}");

        // Conjugate transposition leaves the defect norm unchanged:
        // ‖X·P‖ = ‖P·X†‖ for the orthogonal projector P.
        let x = &st.b.matrix * &eta_phi.matrix - &eta_phi.matrix * &a_dag.matrix;
        let left = spectral_norm(&(&x * (&p_psi * p_psi.adjoint())));
        let right = spectral_norm(&((&p_psi * p_psi.adjoint()) * x.adjoint()));
        assert!((left - right).abs() < 1e-10);

        // Negative control: the full span includes members whose successor
        // fell off the family, and the defect there is the truncation cliff.
        let p_full = metric::span_basis(&st.psis).unwrap();
        let cliff = intertwining_defect_ladder(&st.b, &eta_phi, &a_dag, &p_full);
        assert!(cliff > 1e-2, "full-span defect should expose the cliff: {cliff:.3e}");
    }

    #[test]
    fn intertwining_defect_decays_with_truncation_size() {
        // The coarsest truncation deliberately sits near the cliff, so the
        // family build gets a loose tail budget; the point is the decay.
        let params = DeformationParams::example3(0.5).unwrap();
        let defect_at = |d: usize| {
            let dim = FockDim::new(d, 4).unwrap();
            let (a, b) = deformation_pair(&params, dim).unwrap();
            let phi0 = vacuum_phi(&params, dim, 1e-1).unwrap();
            let psi0 = vacuum_psi(&params, dim, 1e-1, &phi0).unwrap();
            let phis =
                build_family(&phi0, &b, 12, 1e-1, FamilyKind::Phi, Some(params)).unwrap();
            let psis =
                build_family(&psi0, &a.adjoint(), 12, 1e-1, FamilyKind::Psi, Some(params))
                    .unwrap();
            let eta_phi = metric_operator(&phis);
            let p_psi = guarded_span_basis(&psis).unwrap();
            intertwining_defect_ladder(&b, &eta_phi, &a.adjoint(), &p_psi)
        };
        let ds = [defect_at(40), defect_at(60), defect_at(100)];
        assert!(
            ds[2] < ds[1] && ds[1] < ds[0],
            "defect should decay with D at fixed nmax: {ds:?}"
        );
    }

    #[test]
    fn pseudohermiticity_example3() {
        let st = example3_stage(0.5, 16);
        let eta_psi = metric_operator(&st.psis);
        let n_op = st.b.compose(&st.a);
        let p_phi = guarded_span_basis(&st.phis).unwrap();
        let d = pseudohermiticity_defect(&n_op, &eta_psi, &p_phi);
        assert!(d < 1e-6, "pseudo-hermiticity defect {d:.3e}");
    }

    /// The example-4 deformation at `α = 2`, `μ = 1.2` has vacuum series
    /// decaying as slowly as `|γ/δ| = 0.9` per two levels, so the guard
    /// argument only wins at a much larger truncation than the default.
    #[test]
    fn pseudohermiticity_example4_slow_decay() {
        let params = DeformationParams::example4(2.0, 1.2).unwrap();
        let st = stage(params, 900, 10);
        let eta_psi = metric_operator(&st.psis);
        let n_op = st.b.compose(&st.a);
        let p_phi = guarded_span_basis(&st.phis).unwrap();
        let d = pseudohermiticity_defect(&n_op, &eta_psi, &p_phi);
        assert!(d < 1e-6, "example4 pseudo-hermiticity defect {d:.3e}");
    }

    #[test]
    fn eigen_transport_matches_number_residuals() {
        let st = example3_stage(0.5, 16);
        let eta_phi = metric_operator(&st.phis);
        let n_op = st.b.compose(&st.a);
        let transported = eigen_transport(&n_op, &eta_phi, &st.psis);
        let direct = number_residuals(&st.phis, &n_op).unwrap();
        for n in 0..=12 {
            assert!(transported[n] < 1e-6, "transport residual[{n}] = {:.3e}", transported[n]);
            let gap = (transported[n] - direct[n]).abs();
            assert!(
                gap < 1e-8,
                "two derivations of residual[{n}] disagree: {:.3e} vs {:.3e}",
                transported[n],
                direct[n]
            );
        }
    }

    #[test]
    fn span_compressed_number_is_integer_diagonal() {
        let st = example3_stage(0.5, 16);
        let n_op = st.b.compose(&st.a);
        let m = span_compressed_number(&n_op, &st.phis, &st.psis);
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let expected = if i == j { i as f64 } else { 0.0 };
                worst = worst.max((m[(i, j)] - Complex64::new(expected, 0.0)).norm());
            }
        }
        assert!(worst < 1e-6, "compressed N deviates from diag(0..16) by {worst:.3e}");
        // Gershgorin then pins every span-restricted eigenvalue of N (and of
        // N†, whose compression is exactly M†) to an integer within 1e-6.
    }
}
