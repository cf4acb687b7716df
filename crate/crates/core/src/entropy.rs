// src/entropy.rs
//
// Rotated entropy vector fields and the sharp jump cost. For an orthonormal
// frame ξ = (cosθ, sinθ), η = (−sinθ, cosθ) and m = (m₁, m₂, m₃),
//
//   Σ_ξη(m) = (m₃m_ξ − m_ξm_η²/2 − m_ξ³/6) ξ
//           + (−m₃m_η + m_ηm_ξ²/2 + m_η³/6) η
//           + (m_η²/2 − m_ξ²/2) ẑ,
//
// which satisfies div Σ_ξη(∇u) = R·(∂²_ξu − ∂²_ηu) and the combination rule
// Σ_ξη = cos2θ·Σ_{e₁e₂} + sin2θ·Σ_{ε₁ε₂} (ε-frame at θ = π/4). The nodewise
// supremum of |R·(∂²_ξu − ∂²_ηu)| over frames equals |R|·|λ₁−λ₂| with λᵢ the
// perp-Hessian eigenvalues. Across a planar jump between compatible states
// the optimal frame pays |Δm⊥|⁴/(12|Δm|).

use serde::{Deserialize, Serialize};

use crate::calculus::{divergence, gradient, perp_hessian};
use crate::energy::compression_residual;
use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField3};
use crate::threads::worker_count;

/// Planar orthonormal frame ξ = (cosθ, sinθ), η = (−sinθ, cosθ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub theta: f64,
}

impl Frame {
    pub fn new(theta: f64) -> Self {
        Frame { theta }
    }

    pub fn xi(&self) -> [f64; 2] {
        [self.theta.cos(), self.theta.sin()]
    }

    pub fn eta(&self) -> [f64; 2] {
        [-self.theta.sin(), self.theta.cos()]
    }
}

/// Two states of ∇u meeting across a plane with unit normal nu.
///
/// Valid states satisfy m₃ = ½|m⊥|² on both sides (single-slope layers),
/// nu ∥ m_plus − m_minus with a nonzero horizontal part, and m_plus ≠ m_minus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpStates {
    pub m_plus: [f64; 3],
    pub m_minus: [f64; 3],
    pub nu: [f64; 3],
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

impl JumpStates {
    /// Validating constructor; see [`JumpStates::validate`].
    pub fn new(m_plus: [f64; 3], m_minus: [f64; 3], nu: [f64; 3]) -> Result<Self> {
        let j = JumpStates { m_plus, m_minus, nu };
        j.validate()?;
        Ok(j)
    }

    /// Build with nu derived as the unit vector along m_plus − m_minus.
    pub fn from_states(m_plus: [f64; 3], m_minus: [f64; 3]) -> Result<Self> {
        let d = [
            m_plus[0] - m_minus[0],
            m_plus[1] - m_minus[1],
            m_plus[2] - m_minus[2],
        ];
        let len = norm3(d);
        if len == 0.0 {
            return Err(Error::Config(
                "jump states invalid: m_plus equals m_minus".into(),
            ));
        }
        JumpStates::new(m_plus, m_minus, [d[0] / len, d[1] / len, d[2] / len])
    }

    /// Check all invariants, reporting the first violated one by name.
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m_plus", self.m_plus), ("m_minus", self.m_minus)] {
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!(
                    "jump states invalid: {name} has a non-finite component"
                )));
            }
            let dev = (m[2] - 0.5 * (m[0] * m[0] + m[1] * m[1])).abs();
            if dev > 1e-12 {
                return Err(Error::Config(format!(
                    "jump states invalid: {name} violates the single-slope relation \
                     m3 = |m_perp|^2/2 (deviation {dev:.3e})"
                )));
            }
        }
        let d = [
            self.m_plus[0] - self.m_minus[0],
            self.m_plus[1] - self.m_minus[1],
            self.m_plus[2] - self.m_minus[2],
        ];
        let dn = norm3(d);
        if dn == 0.0 {
            return Err(Error::Config(
                "jump states invalid: m_plus equals m_minus".into(),
            ));
        }
        let nn = norm3(self.nu);
        if !nn.is_finite() || (nn - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "jump states invalid: nu is not a unit vector (|nu| = {nn})"
            )));
        }
        // sin of the angle between nu and the jump direction.
        let cross = [
            d[1] / dn * self.nu[2] - d[2] / dn * self.nu[1],
            d[2] / dn * self.nu[0] - d[0] / dn * self.nu[2],
            d[0] / dn * self.nu[1] - d[1] / dn * self.nu[0],
        ];
        let sine = norm3(cross);
        if sine > 1e-12 {
            return Err(Error::Config(format!(
                "jump states invalid: nu is not parallel to m_plus - m_minus \
                 (misalignment {sine:.3e})"
            )));
        }
        if (self.nu[0] * self.nu[0] + self.nu[1] * self.nu[1]).sqrt() <= 1e-12 {
            return Err(Error::Config(
                "jump states invalid: nu has no horizontal component".into(),
            ));
        }
        Ok(())
    }
}

/// Σ_ξη(m) in grid coordinates.
pub fn sigma_frame(m: [f64; 3], frame: &Frame) -> [f64; 3] {
    let (c, s) = (frame.theta.cos(), frame.theta.sin());
    let m_xi = m[0] * c + m[1] * s;
    let m_eta = -m[0] * s + m[1] * c;
    let a = m[2] * m_xi - m_xi * m_eta * m_eta / 2.0 - m_xi * m_xi * m_xi / 6.0;
    let b = -m[2] * m_eta + m_eta * m_xi * m_xi / 2.0 + m_eta * m_eta * m_eta / 6.0;
    [
        a * c - b * s,
        a * s + b * c,
        (m_eta * m_eta - m_xi * m_xi) / 2.0,
    ]
}

/// Componentwise max deviation of Σ_ξη(m) from
/// cos2θ·Σ_{θ=0}(m) + sin2θ·Σ_{θ=π/4}(m); ≤ 1e−12 for all inputs.
pub fn rotation_combo_check(m: [f64; 3], theta: f64) -> f64 {
    let lhs = sigma_frame(m, &Frame::new(theta));
    let s0 = sigma_frame(m, &Frame::new(0.0));
    let s45 = sigma_frame(m, &Frame::new(std::f64::consts::FRAC_PI_4));
    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    (0..3)
        .map(|i| (lhs[i] - c2 * s0[i] - s2 * s45[i]).abs())
        .fold(0.0, f64::max)
}

/// Discrete div of the nodewise Σ_ξη(∇u), and the product form
/// R·(∂²_ξu − ∂²_ηu), returned together for identity testing.
pub fn div_sigma(u: &ScalarField, frame: &Frame) -> (ScalarField, ScalarField) {
    let grad = gradient(u);
    let sigma = VectorField3 {
        grid: u.grid.clone(),
        values: grad.values.iter().map(|&m| sigma_frame(m, frame)).collect(),
    };
    let stencil_divergence = divergence(&sigma);

    let r = compression_residual(u);
    let h = perp_hessian(u);
    let (c2, s2) = ((2.0 * frame.theta).cos(), (2.0 * frame.theta).sin());
    // ∂²_ξu − ∂²_ηu = cos2θ(∂²ₓu − ∂²ᵧu) + 2sin2θ ∂ₓᵧu.
    let product_form = ScalarField {
        grid: u.grid.clone(),
        values: (0..u.values.len())
            .map(|n| r.values[n] * (c2 * (h.xx[n] - h.yy[n]) + 2.0 * s2 * h.xy[n]))
            .collect(),
    };
    (stencil_divergence, product_form)
}

/// Nodewise |R|·|λ₁−λ₂| with λᵢ the perp-Hessian eigenvalues; the gap is
/// √((∂²ₓu − ∂²ᵧu)² + 4(∂ₓᵧu)²), exact for symmetric 2×2.
pub fn entropy_density_eig(u: &ScalarField) -> ScalarField {
    let r = compression_residual(u);
    let h = perp_hessian(u);
    let values = (0..u.values.len())
        .map(|n| {
            let d = h.xx[n] - h.yy[n];
            r.values[n].abs() * (d * d + 4.0 * h.xy[n] * h.xy[n]).sqrt()
        })
        .collect();
    ScalarField {
        grid: u.grid.clone(),
        values,
    }
}

/// Nodewise max of |product form| over the frames θ = kπ/n_theta,
/// k = 0..n_theta; approaches entropy_density_eig from below.
pub fn entropy_sup_rotations(u: &ScalarField, n_theta: usize) -> Result<ScalarField> {
    if n_theta < 2 {
        return Err(Error::Config(format!(
            "n_theta must be at least 2 (got {n_theta})"
        )));
    }
    let r = compression_residual(u);
    let h = perp_hessian(u);
    let angles: Vec<(f64, f64)> = (0..n_theta)
        .map(|k| {
            let theta = k as f64 * std::f64::consts::PI / n_theta as f64;
            ((2.0 * theta).cos(), (2.0 * theta).sin())
        })
        .collect();

    let n = u.values.len();
    let mut values = vec![0.0; n];
    let workers = worker_count(n);
    let chunk = n.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, out) in values.chunks_mut(chunk).enumerate() {
            let start = w * chunk;
            let (r, h, angles) = (&r, &h, &angles);
            scope.spawn(move || {
                for (off, slot) in out.iter_mut().enumerate() {
                    let n = start + off;
                    let d = h.xx[n] - h.yy[n];
                    let t = 2.0 * h.xy[n];
                    let best = angles
                        .iter()
                        .map(|&(c2, s2)| (c2 * d + s2 * t).abs())
                        .fold(0.0, f64::max);
                    *slot = r.values[n].abs() * best;
                }
            });
        }
    });
    Ok(ScalarField {
        grid: u.grid.clone(),
        values,
    })
}

/// Sharp cost of a compatible planar jump: |Δm⊥|⁴ / (12|Δm|).
pub fn jump_cost(j: &JumpStates) -> Result<f64> {
    j.validate()?;
    let d = [
        j.m_plus[0] - j.m_minus[0],
        j.m_plus[1] - j.m_minus[1],
        j.m_plus[2] - j.m_minus[2],
    ];
    let perp2 = d[0] * d[0] + d[1] * d[1];
    Ok(perp2 * perp2 / (12.0 * norm3(d)))
}

/// Cost paid by one frame: |(Δm_ξ)⁴ − (Δm_η)⁴| / (12|Δm|); maximized over
/// frames this recovers jump_cost.
pub fn frame_cost(j: &JumpStates, frame: &Frame) -> Result<f64> {
    j.validate()?;
    let d = [
        j.m_plus[0] - j.m_minus[0],
        j.m_plus[1] - j.m_minus[1],
        j.m_plus[2] - j.m_minus[2],
    ];
    let xi = frame.xi();
    let eta = frame.eta();
    let d_xi = d[0] * xi[0] + d[1] * xi[1];
    let d_eta = d[0] * eta[0] + d[1] * eta[1];
    Ok((d_xi.powi(4) - d_eta.powi(4)).abs() / (12.0 * norm3(d)))
}
