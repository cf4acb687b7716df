// src/energy.rs
//
// The smectic energy and its variational structure:
//
//   E_ε(u) = ∫ (1/2ε) R² + (ε/2)(Δ⊥u)²,   R := ∂_z u − ½|∇⊥u|²,
//
// the approximate Gaussian curvature K̄ = det ∇²⊥u with its flux identity
// K̄ = ½ ∇⊥·(∇⊥u Δ⊥u − ½∇⊥|∇⊥u|²), the BPS residual R ∓ εΔ⊥u, and the
// exact completing-the-square decomposition
//
//   E_ε(u) = (1/2ε)∫(R ∓ εΔ⊥u)² ± (2/3)∫K̄u ± ∮Ξ(u)·ν,
//
// with Ξ(u) = ((∂_z u − |∇⊥u|²/6 − uΔ⊥u/3)∇⊥u + (u/6)∇⊥|∇⊥u|², −½|∇⊥u|²).
// sign = +1 selects the upper signs throughout.

use serde::{Deserialize, Serialize};

use crate::calculus::{boundary_flux, deriv1, integrate, perp_hessian, perp_laplacian};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField3};
use crate::grid::Region;

/// Compression/bending split of E_ε over a reporting region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub epsilon: f64,
    /// (1/2ε) ∫ R².
    pub compression: f64,
    /// (ε/2) ∫ (Δ⊥u)².
    pub bending: f64,
    pub total: f64,
    /// ∫ K̄ over the same region.
    pub curvature_integral: f64,
    pub region: Region,
}

/// The three terms of the completing-the-square identity and their sum,
/// returned for comparison against `energy(..).total`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpsDecomposition {
    pub sign: i32,
    /// (1/2ε) ∫ (R − sign·εΔ⊥u)².
    pub square_term: f64,
    /// sign·(2/3) ∫ K̄u.
    pub curvature_term: f64,
    /// sign·∮ Ξ(u)·ν.
    pub flux_term: f64,
    pub reconstructed_total: f64,
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Config(format!("epsilon must be > 0 (got {epsilon})")));
    }
    Ok(())
}

pub(crate) fn check_sign(sign: i32) -> Result<f64> {
    match sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        other => Err(Error::Config(format!("sign must be +1 or -1 (got {other})"))),
    }
}

/// Nodewise compression residual R = ∂_z u − ½|∇⊥u|².
pub fn compression_residual(u: &ScalarField) -> ScalarField {
    let gx = deriv1(u, 0);
    let gy = deriv1(u, 1);
    let gz = deriv1(u, 2);
    let values = (0..u.values.len())
        .map(|n| gz.values[n] - 0.5 * (gx.values[n] * gx.values[n] + gy.values[n] * gy.values[n]))
        .collect();
    ScalarField {
        grid: u.grid.clone(),
        values,
    }
}

/// Nodewise K̄ = ∂²ₓu ∂²ᵧu − (∂ₓᵧu)².
pub fn gauss_curvature(u: &ScalarField) -> ScalarField {
    let h = perp_hessian(u);
    let values = (0..u.values.len())
        .map(|n| h.xx[n] * h.yy[n] - h.xy[n] * h.xy[n])
        .collect();
    ScalarField {
        grid: u.grid.clone(),
        values,
    }
}

fn square(f: &ScalarField) -> ScalarField {
    ScalarField {
        grid: f.grid.clone(),
        values: f.values.iter().map(|v| v * v).collect(),
    }
}

/// Compression/bending/total of E_ε over `region`, plus ∫K̄.
pub fn energy(u: &ScalarField, epsilon: f64, region: &Region) -> Result<EnergyBreakdown> {
    check_epsilon(epsilon)?;
    let r = compression_residual(u);
    let lap = perp_laplacian(u);
    let compression = integrate(&square(&r), region)? / (2.0 * epsilon);
    let bending = integrate(&square(&lap), region)? * epsilon / 2.0;
    let curvature_integral = integrate(&gauss_curvature(u), region)?;
    Ok(EnergyBreakdown {
        epsilon,
        compression,
        bending,
        total: compression + bending,
        curvature_integral,
        region: region.clone(),
    })
}

/// Volume integral of K̄, its boundary-flux form ∮ ½(∇⊥uΔ⊥u − ½∇⊥|∇⊥u|²)·ν,
/// and the absolute mismatch between them.
///
/// ∇⊥|∇⊥u|² is expanded by the chain rule into Hessian products so every
/// factor is a direct stencil of u; re-differencing the discrete |∇⊥u|²
/// would degrade the boundary flux to first order.
pub fn curvature_flux_check(u: &ScalarField) -> (f64, f64, f64) {
    let volume_integral = integrate(&gauss_curvature(u), &Region::full())
        .expect("full region is never empty");
    let gx = deriv1(u, 0);
    let gy = deriv1(u, 1);
    let lap = perp_laplacian(u);
    let h = perp_hessian(u);
    let values = (0..u.values.len())
        .map(|n| {
            // ½∂ₓ|∇⊥u|² = ∂ₓu ∂²ₓu + ∂ᵧu ∂ₓᵧu, and the y analogue.
            let half_s2x = gx.values[n] * h.xx[n] + gy.values[n] * h.xy[n];
            let half_s2y = gx.values[n] * h.xy[n] + gy.values[n] * h.yy[n];
            [
                0.5 * (gx.values[n] * lap.values[n] - half_s2x),
                0.5 * (gy.values[n] * lap.values[n] - half_s2y),
                0.0,
            ]
        })
        .collect();
    let flux_integral = boundary_flux(&VectorField3 {
        grid: u.grid.clone(),
        values,
    });
    (
        volume_integral,
        flux_integral,
        (volume_integral - flux_integral).abs(),
    )
}

/// Nodewise BPS residual R − sign·εΔ⊥u.
pub fn bps_residual(u: &ScalarField, epsilon: f64, sign: i32) -> Result<ScalarField> {
    check_epsilon(epsilon)?;
    let s = check_sign(sign)?;
    let r = compression_residual(u);
    let lap = perp_laplacian(u);
    let values = (0..u.values.len())
        .map(|n| r.values[n] - s * epsilon * lap.values[n])
        .collect();
    Ok(ScalarField {
        grid: u.grid.clone(),
        values,
    })
}

/// Max and L² norms of the BPS residual over an interior window.
pub fn bps_verify(u: &ScalarField, epsilon: f64, sign: i32, window: &Region) -> Result<(f64, f64)> {
    let residual = bps_residual(u, epsilon, sign)?;
    let range = window.node_range(&u.grid)?;
    let mut max_residual = 0.0f64;
    for k in range[2][0]..=range[2][1] {
        for j in range[1][0]..=range[1][1] {
            for i in range[0][0]..=range[0][1] {
                max_residual = max_residual.max(residual.at(i, j, k).abs());
            }
        }
    }
    let l2_residual = integrate(&square(&residual), window)?.sqrt();
    Ok((max_residual, l2_residual))
}

/// |(1/ε)∫R² − ε∫(Δ⊥u)²| over `region`; zero exactly at equipartition.
pub fn equipartition_gap(u: &ScalarField, epsilon: f64, region: &Region) -> Result<f64> {
    check_epsilon(epsilon)?;
    let r = compression_residual(u);
    let lap = perp_laplacian(u);
    let comp = integrate(&square(&r), region)? / epsilon;
    let bend = integrate(&square(&lap), region)? * epsilon;
    Ok((comp - bend).abs())
}

/// Completing-the-square decomposition over the full box.
pub fn bps_decomposition(u: &ScalarField, epsilon: f64, sign: i32) -> Result<BpsDecomposition> {
    check_epsilon(epsilon)?;
    let s = check_sign(sign)?;
    let full = Region::full();
    let residual = bps_residual(u, epsilon, sign)?;
    let square_term = integrate(&square(&residual), &full)? / (2.0 * epsilon);

    let kbar = gauss_curvature(u);
    let ku = ScalarField {
        grid: u.grid.clone(),
        values: (0..u.values.len())
            .map(|n| kbar.values[n] * u.values[n])
            .collect(),
    };
    let curvature_term = s * (2.0 / 3.0) * integrate(&ku, &full)?;

    // Ξ(u) = (coef·∇⊥u + (u/6)∇⊥|∇⊥u|², −½|∇⊥u|²),
    // coef = ∂_z u − |∇⊥u|²/6 − uΔ⊥u/3, with ∇⊥|∇⊥u|² chain-rule expanded
    // into Hessian products (see curvature_flux_check).
    let gx = deriv1(u, 0);
    let gy = deriv1(u, 1);
    let gz = deriv1(u, 2);
    let lap = perp_laplacian(u);
    let hess = perp_hessian(u);
    let values = (0..u.values.len())
        .map(|n| {
            let s2 = gx.values[n] * gx.values[n] + gy.values[n] * gy.values[n];
            let half_s2x = gx.values[n] * hess.xx[n] + gy.values[n] * hess.xy[n];
            let half_s2y = gx.values[n] * hess.xy[n] + gy.values[n] * hess.yy[n];
            let coef = gz.values[n] - s2 / 6.0 - u.values[n] * lap.values[n] / 3.0;
            [
                coef * gx.values[n] + u.values[n] * half_s2x / 3.0,
                coef * gy.values[n] + u.values[n] * half_s2y / 3.0,
                -0.5 * s2,
            ]
        })
        .collect();
    let flux_term = s * boundary_flux(&VectorField3 {
        grid: u.grid.clone(),
        values,
    });

    Ok(BpsDecomposition {
        sign,
        square_term,
        curvature_term,
        flux_term,
        reconstructed_total: square_term + curvature_term + flux_term,
    })
}
