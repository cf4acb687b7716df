// src/diagnostics.rs
//
// Div-curl compactness diagnostics for the pair of fields
//
//   E = (∇⊥u, ½|∇⊥u|²),   B = (−½|∇⊥u|² ∇⊥u, ½|∇⊥u|²),
//
// whose curl and divergence control compactness of low-energy sequences.
// The curl residuals are the discrete forms of
//
//   ∂_z(∂ₓu) − ∂ₓ(½|∇⊥u|²)   and   ∂_z(∂ᵧu) − ∂ᵧ(½|∇⊥u|²),
//
// i.e. the x/y derivatives of the compression strain R. Their raw L² norms
// blow up like the derivative of a transition layer, so the report measures
// the first-order primitives (cumulative trapezoid along the derivative
// axis), which are bounded by the compression energy and shrink like √ε on
// minimizing sequences.

use serde::Serialize;

use crate::calculus::{deriv1, divergence, integrate, perp_laplacian};
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField3};
use crate::grid::Region;
use crate::sum::pairwise_map_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpNorm {
    pub p: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompactnessReport {
    /// ‖∇u‖_{L^p} for each requested exponent.
    pub lp_norms: Vec<LpNorm>,
    /// Combined L² norm of the primitives of the two curl residuals.
    pub curl_residual_l2: f64,
    /// ‖div B‖_{L¹}.
    pub div_b_l1: f64,
    /// Fraction of region nodes with Δ⊥u ≥ 0.
    pub laplacian_nonneg_fraction: f64,
}

/// Antiderivative along `axis` with value 0 on the axis' first face:
/// cumulative trapezoid sums of the sampled integrand.
fn cumulative_trapezoid(f: &ScalarField, axis: usize) -> ScalarField {
    let g = &f.grid;
    let n = g.shape()[axis];
    let s = g.strides()[axis];
    let h = g.spacing()[axis];
    let mut out = vec![0.0; f.values.len()];
    let shape = g.shape();
    let (a, b) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let strides = g.strides();
    for ib in 0..shape[b] {
        for ia in 0..shape[a] {
            let base = ia * strides[a] + ib * strides[b];
            for i in 1..n {
                out[base + i * s] = out[base + (i - 1) * s]
                    + 0.5 * h * (f.values[base + (i - 1) * s] + f.values[base + i * s]);
            }
        }
    }
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// L^p, curl, divergence, and layer-sign diagnostics of `u` over `region`.
pub fn compactness_diagnostics(
    u: &ScalarField,
    ps: &[f64],
    region: &Region,
) -> Result<CompactnessReport> {
    for &p in ps {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Config(format!(
                "Lp exponents must be finite and >= 1 (got {p})"
            )));
        }
    }
    let n = u.values.len();
    let gx = deriv1(u, 0);
    let gy = deriv1(u, 1);
    let gz = deriv1(u, 2);
    let grad_sq: Vec<f64> = (0..n)
        .map(|m| {
            gx.values[m] * gx.values[m]
                + gy.values[m] * gy.values[m]
                + gz.values[m] * gz.values[m]
        })
        .collect();
    let field = |values: Vec<f64>| ScalarField {
        grid: u.grid.clone(),
        values,
    };

    let mut lp_norms = Vec::with_capacity(ps.len());
    for &p in ps {
        let integrand = field(grad_sq.iter().map(|s| s.powf(p / 2.0)).collect());
        lp_norms.push(LpNorm {
            p,
            value: integrate(&integrand, region)?.powf(1.0 / p),
        });
    }

    // Curl residuals of E and their primitives along the derivative axis.
    let half_s2 = field(
        (0..n)
            .map(|m| 0.5 * (gx.values[m] * gx.values[m] + gy.values[m] * gy.values[m]))
            .collect(),
    );
    let rx = field(
        deriv1(&gx, 2)
            .values
            .iter()
            .zip(&deriv1(&half_s2, 0).values)
            .map(|(a, b)| a - b)
            .collect(),
    );
    let ry = field(
        deriv1(&gy, 2)
            .values
            .iter()
            .zip(&deriv1(&half_s2, 1).values)
            .map(|(a, b)| a - b)
            .collect(),
    );
    let px = cumulative_trapezoid(&rx, 0);
    let py = cumulative_trapezoid(&ry, 1);
    let curl_sq = field(
        (0..n)
            .map(|m| px.values[m] * px.values[m] + py.values[m] * py.values[m])
            .collect(),
    );
    let curl_residual_l2 = integrate(&curl_sq, region)?.sqrt();

    let b_field = VectorField3 {
        grid: u.grid.clone(),
        values: (0..n)
            .map(|m| {
                let s = half_s2.values[m];
                [-s * gx.values[m], -s * gy.values[m], s]
            })
            .collect(),
    };
    let div_b = divergence(&b_field);
    let div_b_l1 = integrate(&field(div_b.values.iter().map(|v| v.abs()).collect()), region)?;

    let lap = perp_laplacian(u);
    let range = region.node_range(&u.grid)?;
    let counts = (
        (range[0][1] - range[0][0] + 1)
            * (range[1][1] - range[1][0] + 1)
            * (range[2][1] - range[2][0] + 1),
        {
            let g = &u.grid;
            let nx = range[0][1] - range[0][0] + 1;
            let ny = range[1][1] - range[1][0] + 1;
            let nz = range[2][1] - range[2][0] + 1;
            pairwise_map_sum(nx * ny * nz, &|lin| {
                let i = range[0][0] + lin % nx;
                let j = range[1][0] + (lin / nx) % ny;
                let k = range[2][0] + lin / (nx * ny);
                if lap.values[g.idx(i, j, k)] >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
        },
    );
    let laplacian_nonneg_fraction = counts.1 / counts.0 as f64;

    Ok(CompactnessReport {
        lp_norms,
        curl_residual_l2,
        div_b_l1,
        laplacian_nonneg_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sample_field;
    use crate::grid::make_grid;

    #[test]
    fn ground_state_residuals_vanish() {
        let grid = make_grid(11, 11, 11, [[-0.5, 0.5]; 3]).unwrap();
        let u = sample_field(&grid, |x, _, z| x + 0.5 * z).unwrap();
        let report =
            compactness_diagnostics(&u, &[1.0, 2.0, 4.0], &Region::full()).unwrap();
        assert!(report.curl_residual_l2 <= 1e-10);
        assert!(report.div_b_l1 <= 1e-10);
        // |∇u| = √(1 + ¼) everywhere, so every L^p norm is that constant
        // (unit box volume).
        let c = 1.25f64.sqrt();
        for lp in &report.lp_norms {
            assert!((lp.value - c).abs() < 1e-12, "p = {}", lp.p);
        }
        // Δ⊥u is pure roundoff here, so the sign fraction is only required
        // to be a fraction; curved fields pin it exactly.
        let f = report.laplacian_nonneg_fraction;
        assert!((0.0..=1.0).contains(&f));
    }

    #[test]
    fn paraboloid_laplacian_sign_fraction_is_one() {
        let grid = make_grid(9, 9, 9, [[-1.0, 1.0]; 3]).unwrap();
        let u = sample_field(&grid, |x, y, _| 0.5 * (x * x + y * y)).unwrap();
        let report = compactness_diagnostics(&u, &[2.0], &Region::full()).unwrap();
        assert_eq!(report.laplacian_nonneg_fraction, 1.0);
    }

    #[test]
    fn saddle_laplacian_sign_fraction_is_fractional() {
        let grid = make_grid(9, 9, 9, [[-1.0, 1.0]; 3]).unwrap();
        let u = sample_field(&grid, |x, y, _| x * x - 2.0 * (y * y)).unwrap();
        let report = compactness_diagnostics(&u, &[2.0], &Region::full()).unwrap();
        // Δ⊥u = 2 − 4 < 0 at every node.
        assert_eq!(report.laplacian_nonneg_fraction, 0.0);
    }

    #[test]
    fn rejects_exponents_below_one() {
        let grid = make_grid(5, 5, 5, [[0.0, 1.0]; 3]).unwrap();
        let u = sample_field(&grid, |x, _, _| x).unwrap();
        assert!(compactness_diagnostics(&u, &[0.5], &Region::full()).is_err());
        assert!(compactness_diagnostics(&u, &[f64::INFINITY], &Region::full()).is_err());
    }

    #[test]
    fn primitive_of_x_derivative_recovers_the_field() {
        // cumulative_trapezoid(∂ₓf) ≈ f − f(x₀) for smooth f.
        let grid = make_grid(41, 5, 5, [[0.0, 1.0]; 3]).unwrap();
        let f = sample_field(&grid, |x, y, _| (2.0 * x).sin() + 0.3 * y).unwrap();
        let df = deriv1(&f, 0);
        let prim = cumulative_trapezoid(&df, 0);
        let mut max = 0.0f64;
        for k in 0..5 {
            for j in 0..5 {
                for i in 0..41 {
                    let expect = f.at(i, j, k) - f.at(0, j, k);
                    max = max.max((prim.at(i, j, k) - expect).abs());
                }
            }
        }
        assert!(max < 1e-3, "primitive deviates by {max}");
    }
}
