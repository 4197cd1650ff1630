//! A two-player zero-sum game played on two classical desks at once, where
//! each player's action frequencies on the two desks are tied together by a
//! spin-½ wave function.
//!
//! - [`quantum`]: states, projectors and the payoff operator.
//! - [`geometry`]: the curve in the `(p₁, p₂)` square that the tie imposes.
//! - [`game`]: the equivalent 4×4 classical matrix game and joint distributions.
//! - [`equilibrium`]: saddle-point search and a support-enumeration matrix-game solver.
//! - [`casino`]: seeded Monte-Carlo play of both desks.

pub mod casino;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod geometry;
pub mod quantum;

pub use casino::{
    play_round, simulate, simulate_joint, simulate_with_trace, CasinoRng, RoundOutcome, SimReport,
};
pub use equilibrium::{
    find_equilibrium, grid_saddle_oracle, payoff_gradient, payoff_surface, refine_saddle,
    solve_classical, verify_saddle, ClassicalSolution, EquilibriumFlag, EquilibriumResult,
    SaddleCertificate,
};
pub use error::{Error, Result};
pub use game::{
    bilinear_payoff, classical_matrix, classical_matrix_with, independent_joint, is_product_form,
    marginals, ClassicalMatrix, GameSpec, JointDistribution, LabelConvention,
};
pub use geometry::{
    angles_for_point, conic_coefficients, conic_residual, constraint_conic, curve_points,
    probabilities_from_angle, Conic, ConicCoefficients, CurveKind, CurvePoint,
    ProbabilityQuadruple,
};
pub use quantum::{
    build_payoff_operator, complement, expectation, make_projector, scalar_payoff, weight,
    ObservableFrame, Payoff, PayoffCoefficients, PayoffOperator, Projector, StateVector,
};
