// src/grid.rs
//
// Uniform node-centered rectilinear grid over an axis-aligned box, plus the
// fractional interior windows used to exclude clamped boundary slabs from
// energy reporting. Node (i,j,k) sits at box corner + (i·hx, j·hy, k·hz);
// storage order everywhere is x-fastest, then y, then z.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 3D grid: node counts per axis, the domain box, and the derived
/// spacings `h = (hi − lo)/(n − 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// Domain box `[[x0,x1],[y0,y1],[z0,z1]]`.
    pub bounds: [[f64; 2]; 3],
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
}

/// Build a grid, rejecting node counts below 3 (the difference stencils need
/// three points per axis) and inverted or degenerate boxes.
pub fn make_grid(nx: usize, ny: usize, nz: usize, bounds: [[f64; 2]; 3]) -> Result<Grid3> {
    let counts = [nx, ny, nz];
    for (axis, &n) in counts.iter().enumerate() {
        if n < 3 {
            return Err(Error::Grid(format!(
                "axis {axis} has {n} nodes; stencils need at least 3"
            )));
        }
    }
    for (axis, b) in bounds.iter().enumerate() {
        if !(b[0].is_finite() && b[1].is_finite()) || b[1] <= b[0] {
            return Err(Error::Grid(format!(
                "axis {axis} box [{}, {}] is degenerate or inverted",
                b[0], b[1]
            )));
        }
    }
    Ok(Grid3 {
        nx,
        ny,
        nz,
        bounds,
        hx: (bounds[0][1] - bounds[0][0]) / (nx - 1) as f64,
        hy: (bounds[1][1] - bounds[1][0]) / (ny - 1) as f64,
        hz: (bounds[2][1] - bounds[2][0]) / (nz - 1) as f64,
    })
}

impl Grid3 {
    /// `n³` nodes on the centered unit cube `[−½,½]³`.
    pub fn centered_cube(n: usize) -> Result<Grid3> {
        make_grid(n, n, n, [[-0.5, 0.5]; 3])
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn spacing(&self) -> [f64; 3] {
        [self.hx, self.hy, self.hz]
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        false // counts are ≥ 3 by construction
    }

    /// Linear index of node (i,j,k), x-fastest.
    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    /// Strides of the linear index along x, y, z.
    #[inline]
    pub fn strides(&self) -> [usize; 3] {
        [1, self.nx, self.nx * self.ny]
    }

    /// Coordinate of node index `i` along `axis`.
    #[inline]
    pub fn axis_coord(&self, axis: usize, i: usize) -> f64 {
        self.bounds[axis][0] + self.spacing()[axis] * i as f64
    }

    /// Coordinates of node (i,j,k).
    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [
            self.axis_coord(0, i),
            self.axis_coord(1, j),
            self.axis_coord(2, k),
        ]
    }
}

/// Axis-aligned integration window given as fractions of the box per axis:
/// `Region::full()` is the whole box, `[0.1, 0.9]` per axis trims 10% slabs.
/// Fractions snap to the nearest grid node when a window is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Region {
    pub fn full() -> Region {
        Region {
            lo: [0.0; 3],
            hi: [1.0; 3],
        }
    }

    pub fn window(lo: [f64; 3], hi: [f64; 3]) -> Result<Region> {
        for axis in 0..3 {
            if !(0.0..=1.0).contains(&lo[axis])
                || !(0.0..=1.0).contains(&hi[axis])
                || hi[axis] <= lo[axis]
            {
                return Err(Error::Grid(format!(
                    "axis {axis} window [{}, {}] must satisfy 0 ≤ lo < hi ≤ 1",
                    lo[axis], hi[axis]
                )));
            }
        }
        Ok(Region { lo, hi })
    }

    /// Symmetric window trimming fraction `f` from both ends of every axis.
    pub fn trim(f: f64) -> Result<Region> {
        Region::window([f; 3], [1.0 - f; 3])
    }

    /// Inclusive node index ranges `[i0, i1]` per axis after snapping the
    /// fractions to nodes. Errors if any axis snaps to fewer than 2 nodes.
    pub fn node_range(&self, grid: &Grid3) -> Result<[[usize; 2]; 3]> {
        let shape = grid.shape();
        let mut out = [[0usize; 2]; 3];
        for axis in 0..3 {
            let n = shape[axis];
            let i0 = (self.lo[axis] * (n - 1) as f64).round() as usize;
            let i1 = (self.hi[axis] * (n - 1) as f64).round() as usize;
            let i1 = i1.min(n - 1);
            if i1 < i0 + 1 {
                return Err(Error::Grid(format!(
                    "axis {axis} window [{}, {}] is empty on {n} nodes",
                    self.lo[axis], self.hi[axis]
                )));
            }
            out[axis] = [i0, i1];
        }
        Ok(out)
    }
}
