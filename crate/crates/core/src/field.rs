// src/field.rs
//
// Node-indexed data on a Grid3: scalar fields (u and derived densities),
// 3-vector fields (∇u, entropy vectors, flux integrands), and the symmetric
// perpendicular Hessian. Storage is x-fastest to match Grid3::idx.

use crate::error::{Error, Result};
use crate::grid::Grid3;

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid3,
    pub values: Vec<f64>,
}

/// One real 3-vector per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    pub grid: Grid3,
    pub values: Vec<[f64; 3]>,
}

/// Per-node symmetric 2×2 perpendicular Hessian (∂²ₓu, ∂²ᵧu, ∂ₓᵧu); the
/// off-diagonal entry is stored once so symmetry holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianPerp {
    pub grid: Grid3,
    pub xx: Vec<f64>,
    pub yy: Vec<f64>,
    pub xy: Vec<f64>,
}

/// Evaluate `f` at every node. Rejects non-finite samples, naming the node.
pub fn sample_field<F: Fn(f64, f64, f64) -> f64>(grid: &Grid3, f: F) -> Result<ScalarField> {
    let mut values = vec![0.0; grid.len()];
    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let [x, y, z] = grid.node(i, j, k);
                let v = f(x, y, z);
                if !v.is_finite() {
                    return Err(Error::Grid(format!(
                        "non-finite sample {v} at node ({i},{j},{k}) = ({x}, {y}, {z})"
                    )));
                }
                values[grid.idx(i, j, k)] = v;
            }
        }
    }
    Ok(ScalarField {
        grid: grid.clone(),
        values,
    })
}

impl ScalarField {
    pub fn zeros(grid: &Grid3) -> ScalarField {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let idx = self.grid.idx(i, j, k);
        self.values[idx] = v;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Raw little-endian f64 bytes in storage order — the reproducible dump
    /// payload; the sidecar metadata is written by the caller.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }
}

impl VectorField3 {
    pub fn zeros(grid: &Grid3) -> VectorField3 {
        VectorField3 {
            grid: grid.clone(),
            values: vec![[0.0; 3]; grid.len()],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        self.values[self.grid.idx(i, j, k)]
    }
}
