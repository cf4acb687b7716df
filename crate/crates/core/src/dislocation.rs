// src/dislocation.rs
//
// Hopf-Cole edge dislocation. The substitution S = exp[±u/(2ε)] turns the
// BPS equation ∂_z u − ½(∂_x u)² = ±ε∂²_x u into the diffusion equation
// ∂_z S = ε∂²_x S, whose step-data solution
//
//   S(x,z) = 1 + (e^{±b/4ε} − 1)·½(1 + erf(x/(2√(εz))))
//
// inverts to u = ±2ε ln S: an edge dislocation of Burgers vector b with
// layer-displacement plateaus u → 0 (x → −∞) and u → b/2 (x → +∞).

use serde::{Deserialize, Serialize};

use crate::energy::{check_epsilon, check_sign};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid3;

/// Parameters of the Hopf-Cole dislocation field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DislocationSpec {
    /// Burgers vector magnitude (layer-displacement units), ≥ 0.
    pub b: f64,
    pub epsilon: f64,
    /// ±1, selecting the branch of the Hopf-Cole substitution.
    pub sign: i32,
    /// The (x,z) rectangle, z strictly positive; the field is constant in
    /// y, which only carries the 3D embedding.
    pub grid: Grid3,
}

impl DislocationSpec {
    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)?;
        check_sign(self.sign)?;
        if !self.b.is_finite() || self.b < 0.0 {
            return Err(Error::Config(format!(
                "Burgers vector magnitude must be >= 0 (got {})",
                self.b
            )));
        }
        if self.grid.bounds[2][0] <= 0.0 {
            return Err(Error::Config(format!(
                "dislocation grid needs a strictly positive z range \
                 (got z from {})",
                self.grid.bounds[2][0]
            )));
        }
        Ok(())
    }
}

/// The dislocation displacement u = sign·2ε·ln S on the spec's grid.
pub fn dislocation_field(spec: &DislocationSpec) -> Result<ScalarField> {
    spec.validate()?;
    let s = spec.sign as f64;
    let eps = spec.epsilon;
    let amp = (s * spec.b / (4.0 * eps)).exp() - 1.0;
    let g = &spec.grid;
    let mut out = ScalarField::zeros(g);
    for k in 0..g.nz {
        let z = g.axis_coord(2, k);
        for i in 0..g.nx {
            let x = g.axis_coord(0, i);
            let big_s = 1.0 + amp * 0.5 * (1.0 + libm::erf(x / (2.0 * (eps * z).sqrt())));
            let v = s * 2.0 * eps * big_s.ln();
            for j in 0..g.ny {
                out.set(i, j, k, v);
            }
        }
    }
    Ok(out)
}
