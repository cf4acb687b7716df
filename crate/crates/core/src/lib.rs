// src/lib.rs
//
// Numerical toolkit for the 3D smectic-A energy functional
//
//   E_ε(u) = ∫ (1/2ε)(∂_z u − ½|∇⊥u|²)² + (ε/2)(Δ⊥u)²,
//
// organized bottom-up: finite-difference calculus on uniform grids, the
// energy and its BPS decomposition, rotated entropy vector fields with the
// sharp jump-cost formula, 1D BPS transition profiles and Hopf-Cole edge
// dislocations, and a clamped gradient-descent minimizer with compactness
// diagnostics.

pub mod calculus;
pub mod diagnostics;
pub mod dislocation;
pub mod energy;
pub mod entropy;
pub mod error;
pub mod field;
pub mod grid;
pub mod minimize;
pub mod profile;
pub mod sum;
pub mod threads;

pub use calculus::{
    boundary_flux, deriv1, deriv1_adjoint, deriv2, deriv2_adjoint, divergence, gradient,
    integrate, perp_hessian, perp_laplacian,
};
pub use energy::{
    bps_decomposition, bps_residual, compression_residual, curvature_flux_check, energy,
    equipartition_gap, gauss_curvature, BpsDecomposition, EnergyBreakdown,
};
pub use entropy::{
    div_sigma, entropy_density_eig, entropy_sup_rotations, frame_cost, jump_cost,
    rotation_combo_check, sigma_frame, Frame, JumpStates,
};
pub use diagnostics::{compactness_diagnostics, CompactnessReport, LpNorm};
pub use dislocation::{dislocation_field, DislocationSpec};
pub use energy::bps_verify;
pub use minimize::{
    energy_gradient, interior_window, minimize, ClampMask, IterationRecord, MinimizeConfig,
    MinimizeReport, StepRule, Termination,
};
pub use error::{Error, Result};
pub use field::{sample_field, HessianPerp, ScalarField, VectorField3};
pub use grid::{make_grid, Grid3, Region};
pub use profile::{
    ansatz_field, blended_ansatz_field, profile_energy, profile_rhs, solve_profile, tail_fit,
    ProfileSolution,
};
