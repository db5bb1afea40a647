//! Pseudo-boson systems on a truncated Fock space.
//!
//! A pseudo-boson pair is a pair of operators `(a, b)` satisfying the
//! canonical commutation relation `[a, b] = 1` with `b ≠ a†`. This crate
//! builds such pairs as Bogoliubov-type deformations of the standard ladder
//! operators, constructs the two biorthogonal vector families they generate,
//! and verifies the structural identities that make those families Riesz
//! bases: biorthogonality, ladder and number-operator action, metric
//! (frame) operators and their intertwining relations, nonlinear coherent
//! states with a resolution of the identity, and the reverse construction
//! that recovers a pseudo-boson pair from an arbitrary Riesz basis.
//!
//! Everything is numerical and finite: operators live on the span of the
//! first `D + 1` Fock levels, and every identity that holds exactly in
//! infinite dimension is checked here as a *defect* (a residual norm) that
//! must stay below a tolerance on a guarded sub-block, away from the
//! truncation edge where a dense cutoff necessarily spoils band algebra.
//!
//! Modules mirror the pipeline:
//!
//! * [`fock`] — truncated ladder matrices, deformation parameters, guarded
//!   commutator defects;
//! * [`family`] — squeezed-series vacua and the `φ`/`Ψ` families they
//!   generate, with admissibility of parameters;
//! * [`metric`] — Gram matrices, frame (metric) operators, Riesz bounds,
//!   dual and orthonormalized families;
//! * [`intertwine`] — intertwining and pseudo-hermiticity defects,
//!   eigenvector transport between number operators;
//! * [`coherent`] — displacement-series coherent states, quadrature
//!   resolution of the identity, Heisenberg uncertainty on the physical
//!   (similarity-transformed) quadratures;
//! * [`riesz`] — pseudo-boson pairs generated from a Riesz basis matrix,
//!   the metric-driven inverse construction, norm bounds and the diagonal
//!   counterexamples with unbounded metrics;
//! * [`position`] — Hermite synthesis on real-line grids, Gaussian
//!   exponent fits of vacua, and the divergence table of the classic
//!   non-Riesz orthonormal-like family;
//! * [`report`] — the analysis/sweep pipeline with deterministic JSON and
//!   CSV reports.

pub mod error;
pub mod linalg;

pub mod fock;
pub mod family;
pub mod metric;
pub mod intertwine;
pub mod coherent;
pub mod riesz;
pub mod position;
pub mod report;

pub use error::{Error, Result};
pub use fock::{
    annihilation_matrix, commutator_defect, creation_matrix, deformation_pair, CommutatorDefect,
    DeformationFamily, DeformationParams, FockDim, TruncatedOperator,
};
pub use family::{
    admissible, biorthogonality_defect, biorthogonality_matrix, build_family, ladder_residuals,
    number_residuals, vacuum_phi, vacuum_psi, AdmissibilityReport, FamilyKind, FockFamily,
    Normalization, Vacuum,
};
pub use coherent::{
    a_phi_operator, coherent_state, eigen_residual, hatted_coherent, heisenberg_product,
    metric_quadrature_defect, n_phi_consistency, poisson_upper_tail, quadrature_integral,
    resolution_quadrature, CoherentKind, CoherentState, NPhiReport,
};
pub use intertwine::{
    eigen_transport, guarded_span_basis, intertwining_defect_ladder, pseudohermiticity_defect,
    span_compressed_number,
};
pub use metric::{
    dual_family, gram, inverse_pair_defect, metric_operator, metric_report, metric_sqrt_pair,
    orthonormalize, resolution_defect, riesz_bounds, span_basis, span_projector,
    span_restricted_defect, GramMatrix, MetricReport, MetricSqrt, EIG_FLOOR,
};
pub use position::{
    deep_vacua, example1_divergence, expected_omega_phi, expected_omega_psi,
    gaussian_exponent_fit, hermite_functions, state_on_gauss_hermite, state_on_grid, uniform_grid,
    vacuum_exponent_report, DivergenceRow, GaussianFit, GridFunction, Quadrature, VacuumExponents,
    DEEP_VACUUM_MAX_LEVELS,
};
pub use riesz::{
    from_riesz_basis, inverse_construction, item_checks, norm_bound_check, random_riesz_source,
    read_matrix_file, riesz_source_from_matrix, unbounded_metric_demo, write_matrix_file,
    ItemChecks, NormBoundCheck, PseudoBosonSystem, RieszSource, SystemProvenance, UnboundedGrowthRow,
    UnboundedKind, CONDITION_CEILING,
};
pub use report::{
    emit_report, format_z, parse_complex, report_json, run_analyze, run_sweep, sweep_csv,
    CoherentEntry, DefectEntry, Diagnostics, ExponentEntry, RieszBracket, RunConfig, RunReport,
    SweepRow, SCHEMA_VERSION,
};
