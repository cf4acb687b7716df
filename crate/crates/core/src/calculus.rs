// src/calculus.rs
//
// Second-order finite-difference calculus on Grid3 fields: first and second
// derivatives along an axis (central stencils inside, one-sided second-order
// stencils on faces), their exact transposes (for the discrete-adjoint energy
// gradient), the perpendicular operators ∇⊥/Δ⊥/∇²⊥, tensor-product
// trapezoidal quadrature over fractional windows, and the surface quadrature
// behind every discrete divergence-theorem check.
//
// Stencils (spacing h, n nodes per line):
//   first derivative:  interior (u[i+1] − u[i−1])/2h,
//                      faces ±(−3u[0] + 4u[1] − u[2])/2h — exact through x².
//   second derivative: interior (u[i−1] − 2u[i] + u[i+1])/h²,
//                      faces (2u[0] − 5u[1] + 4u[2] − u[3])/h² when n ≥ 4
//                      (exact through x³), 3-point fallback when n = 3.

use crate::field::{HessianPerp, ScalarField, VectorField3};
use crate::grid::{Grid3, Region};
use crate::error::Result;
use crate::sum::pairwise_map_sum;

/// Visit every 1D line of the grid along `axis`; the callback receives the
/// linear index of the line's first node. Nodes along the line are then
/// `base + i·stride` for `i` in `0..n`.
fn for_each_line<F: FnMut(usize)>(grid: &Grid3, axis: usize, mut f: F) {
    let shape = grid.shape();
    let strides = grid.strides();
    let (a, b) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    for ib in 0..shape[b] {
        for ia in 0..shape[a] {
            f(ia * strides[a] + ib * strides[b]);
        }
    }
}

/// First derivative along `axis` (0 = x, 1 = y, 2 = z).
pub fn deriv1(u: &ScalarField, axis: usize) -> ScalarField {
    let g = &u.grid;
    let n = g.shape()[axis];
    let s = g.strides()[axis];
    let c = 1.0 / (2.0 * g.spacing()[axis]);
    let v = &u.values;
    let mut out = vec![0.0; v.len()];
    for_each_line(g, axis, |base| {
        out[base] = c * (-3.0 * v[base] + 4.0 * v[base + s] - v[base + 2 * s]);
        for i in 1..n - 1 {
            out[base + i * s] = c * (v[base + (i + 1) * s] - v[base + (i - 1) * s]);
        }
        let e = base + (n - 1) * s;
        out[e] = c * (3.0 * v[e] - 4.0 * v[e - s] + v[e - 2 * s]);
    });
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// Transpose of `deriv1` on the same grid: `⟨deriv1(u), w⟩ = ⟨u, deriv1_adjoint(w)⟩`
/// for the plain Euclidean pairing over nodes.
pub fn deriv1_adjoint(w: &ScalarField, axis: usize) -> ScalarField {
    let g = &w.grid;
    let n = g.shape()[axis];
    let s = g.strides()[axis];
    let c = 1.0 / (2.0 * g.spacing()[axis]);
    let v = &w.values;
    let mut out = vec![0.0; v.len()];
    for_each_line(g, axis, |base| {
        let w0 = v[base];
        out[base] += -3.0 * c * w0;
        out[base + s] += 4.0 * c * w0;
        out[base + 2 * s] += -c * w0;
        for i in 1..n - 1 {
            let wi = v[base + i * s];
            out[base + (i - 1) * s] += -c * wi;
            out[base + (i + 1) * s] += c * wi;
        }
        let e = base + (n - 1) * s;
        let we = v[e];
        out[e] += 3.0 * c * we;
        out[e - s] += -4.0 * c * we;
        out[e - 2 * s] += c * we;
    });
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// Second derivative along `axis`.
pub fn deriv2(u: &ScalarField, axis: usize) -> ScalarField {
    let g = &u.grid;
    let n = g.shape()[axis];
    let s = g.strides()[axis];
    let c = 1.0 / (g.spacing()[axis] * g.spacing()[axis]);
    let v = &u.values;
    let mut out = vec![0.0; v.len()];
    for_each_line(g, axis, |base| {
        if n >= 4 {
            out[base] =
                c * (2.0 * v[base] - 5.0 * v[base + s] + 4.0 * v[base + 2 * s] - v[base + 3 * s]);
        } else {
            out[base] = c * (v[base] - 2.0 * v[base + s] + v[base + 2 * s]);
        }
        for i in 1..n - 1 {
            out[base + i * s] =
                c * (v[base + (i - 1) * s] - 2.0 * v[base + i * s] + v[base + (i + 1) * s]);
        }
        let e = base + (n - 1) * s;
        if n >= 4 {
            out[e] = c * (2.0 * v[e] - 5.0 * v[e - s] + 4.0 * v[e - 2 * s] - v[e - 3 * s]);
        } else {
            out[e] = c * (v[e] - 2.0 * v[e - s] + v[e - 2 * s]);
        }
    });
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// Transpose of `deriv2` on the same grid.
pub fn deriv2_adjoint(w: &ScalarField, axis: usize) -> ScalarField {
    let g = &w.grid;
    let n = g.shape()[axis];
    let s = g.strides()[axis];
    let c = 1.0 / (g.spacing()[axis] * g.spacing()[axis]);
    let v = &w.values;
    let mut out = vec![0.0; v.len()];
    for_each_line(g, axis, |base| {
        let w0 = v[base];
        if n >= 4 {
            out[base] += 2.0 * c * w0;
            out[base + s] += -5.0 * c * w0;
            out[base + 2 * s] += 4.0 * c * w0;
            out[base + 3 * s] += -c * w0;
        } else {
            out[base] += c * w0;
            out[base + s] += -2.0 * c * w0;
            out[base + 2 * s] += c * w0;
        }
        for i in 1..n - 1 {
            let wi = v[base + i * s];
            out[base + (i - 1) * s] += c * wi;
            out[base + i * s] += -2.0 * c * wi;
            out[base + (i + 1) * s] += c * wi;
        }
        let e = base + (n - 1) * s;
        let we = v[e];
        if n >= 4 {
            out[e] += 2.0 * c * we;
            out[e - s] += -5.0 * c * we;
            out[e - 2 * s] += 4.0 * c * we;
            out[e - 3 * s] += -c * we;
        } else {
            out[e] += c * we;
            out[e - s] += -2.0 * c * we;
            out[e - 2 * s] += c * we;
        }
    });
    ScalarField {
        grid: g.clone(),
        values: out,
    }
}

/// Full gradient ∇u = (∂ₓu, ∂ᵧu, ∂_z u).
pub fn gradient(u: &ScalarField) -> VectorField3 {
    let dx = deriv1(u, 0);
    let dy = deriv1(u, 1);
    let dz = deriv1(u, 2);
    let values = (0..u.values.len())
        .map(|n| [dx.values[n], dy.values[n], dz.values[n]])
        .collect();
    VectorField3 {
        grid: u.grid.clone(),
        values,
    }
}

/// Perpendicular Laplacian Δ⊥u = ∂²ₓu + ∂²ᵧu.
pub fn perp_laplacian(u: &ScalarField) -> ScalarField {
    let xx = deriv2(u, 0);
    let yy = deriv2(u, 1);
    let values = xx
        .values
        .iter()
        .zip(&yy.values)
        .map(|(a, b)| a + b)
        .collect();
    ScalarField {
        grid: u.grid.clone(),
        values,
    }
}

/// Perpendicular Hessian ∇²⊥u; the mixed entry is ∂ᵧ applied to ∂ₓu.
pub fn perp_hessian(u: &ScalarField) -> HessianPerp {
    let xx = deriv2(u, 0);
    let yy = deriv2(u, 1);
    let xy = deriv1(&deriv1(u, 0), 1);
    HessianPerp {
        grid: u.grid.clone(),
        xx: xx.values,
        yy: yy.values,
        xy: xy.values,
    }
}

/// Discrete divergence ∂ₓF₁ + ∂ᵧF₂ + ∂_zF₃ with the same first-derivative
/// stencils as `deriv1`.
pub fn divergence(f: &VectorField3) -> ScalarField {
    let g = &f.grid;
    let mut total = vec![0.0; f.values.len()];
    for (axis, comp) in (0..3).zip(0..3) {
        let c = ScalarField {
            grid: g.clone(),
            values: f.values.iter().map(|v| v[comp]).collect(),
        };
        let d = deriv1(&c, axis);
        for (t, dv) in total.iter_mut().zip(&d.values) {
            *t += dv;
        }
    }
    ScalarField {
        grid: g.clone(),
        values: total,
    }
}

/// Trapezoid weight for node index `i` in the inclusive window `[i0, i1]`.
#[inline]
fn trap_weight(i: usize, i0: usize, i1: usize) -> f64 {
    if i == i0 || i == i1 {
        0.5
    } else {
        1.0
    }
}

/// Tensor-product trapezoidal integral of `f` over the window. Exact for
/// per-axis affine integrands; O(h²) otherwise.
pub fn integrate(f: &ScalarField, region: &Region) -> Result<f64> {
    let g = &f.grid;
    let r = region.node_range(g)?;
    let [h, hy, hz] = g.spacing();
    let (nx, ny) = (r[0][1] - r[0][0] + 1, r[1][1] - r[1][0] + 1);
    let nz = r[2][1] - r[2][0] + 1;
    let scale = h * hy * hz;
    Ok(scale
        * pairwise_map_sum(nx * ny * nz, &|lin| {
            let i = r[0][0] + lin % nx;
            let j = r[1][0] + (lin / nx) % ny;
            let k = r[2][0] + lin / (nx * ny);
            let w = trap_weight(i, r[0][0], r[0][1])
                * trap_weight(j, r[1][0], r[1][1])
                * trap_weight(k, r[2][0], r[2][1]);
            w * f.values[g.idx(i, j, k)]
        }))
}

/// Outward flux ∮ F·ν over all six box faces by 2D trapezoidal surface
/// quadrature.
pub fn boundary_flux(f: &VectorField3) -> f64 {
    let g = &f.grid;
    let shape = g.shape();
    let spacing = g.spacing();
    let mut flux = 0.0;
    for axis in 0..3 {
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (na, nb) = (shape[a], shape[b]);
        let area_scale = spacing[a] * spacing[b];
        for (side, sign) in [(0usize, -1.0f64), (shape[axis] - 1, 1.0)] {
            let face_sum = pairwise_map_sum(na * nb, &|lin| {
                let ia = lin % na;
                let ib = lin / na;
                let mut ijk = [0usize; 3];
                ijk[axis] = side;
                ijk[a] = ia;
                ijk[b] = ib;
                let w = trap_weight(ia, 0, na - 1) * trap_weight(ib, 0, nb - 1);
                w * f.values[g.idx(ijk[0], ijk[1], ijk[2])][axis]
            });
            flux += sign * area_scale * face_sum;
        }
    }
    flux
}
