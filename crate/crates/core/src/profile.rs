// src/profile.rs
//
// The 1D BPS transition profile between compatible jump states. With
// p = m⁺ − m⁻ and unit normal ν ∥ p, the stretched-variable profile solves
//
//   g′(t) = |g p₃ + m₃⁻ − (g p₁ + m₁⁻)²/2 − (g p₂ + m₂⁻)²/2| / |p⊥·ν⊥|,
//   g(0) = ½,  g(−∞) = 0,  g(+∞) = 1,
//
// whose transition energy ∫ ½N(g)² + ½(p⊥·ν⊥)²g′² dt equals the sharp jump
// cost |Δm⊥|⁴/(12|Δm|) independently of ε. The matched 3D ansatz is
// u(𝐱) = ε|p| G((𝐱·ν)/ε) + m⁻·𝐱 with G an antiderivative of g.

use crate::entropy::JumpStates;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid3;

/// Sampled solution of the profile initial-value problem.
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub j: JumpStates,
    /// Strictly increasing sample times containing t = 0.
    pub ts: Vec<f64>,
    /// Profile values g(tᵢ), strictly inside (0,1), nondecreasing.
    pub gs: Vec<f64>,
    /// Fitted exponential rate of 1−g toward the upper limit.
    pub decay_plus: f64,
    /// Fitted exponential rate of g toward the lower limit.
    pub decay_minus: f64,
    /// |p⊥·ν⊥| = |p⊥|²/|p|, the denominator of the profile equation.
    pub denom: f64,
}

fn jump_vector(j: &JumpStates) -> [f64; 3] {
    [
        j.m_plus[0] - j.m_minus[0],
        j.m_plus[1] - j.m_minus[1],
        j.m_plus[2] - j.m_minus[2],
    ]
}

fn jump_denom(j: &JumpStates) -> f64 {
    let p = jump_vector(j);
    let perp2 = p[0] * p[0] + p[1] * p[1];
    perp2 / (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

/// Numerator N(g) = |g p₃ + m₃⁻ − (g p₁+m₁⁻)²/2 − (g p₂+m₂⁻)²/2|.
fn profile_numerator(g: f64, j: &JumpStates) -> f64 {
    let p = jump_vector(j);
    let w1 = g * p[0] + j.m_minus[0];
    let w2 = g * p[1] + j.m_minus[1];
    (g * p[2] + j.m_minus[2] - 0.5 * (w1 * w1 + w2 * w2)).abs()
}

/// Right-hand side g′ = N(g)/|p⊥·ν⊥| of the profile equation.
pub fn profile_rhs(g: f64, j: &JumpStates) -> f64 {
    profile_numerator(g, j) / jump_denom(j)
}

/// Log-linear least-squares fit ln(vals) ≈ a + slope·t; returns
/// (slope, r²). Nonpositive values are rejected by the caller's filtering.
pub fn tail_fit(ts: &[f64], vals: &[f64]) -> (f64, f64) {
    assert_eq!(ts.len(), vals.len());
    let n = ts.len() as f64;
    let ys: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut stt = 0.0;
    let mut sty = 0.0;
    let mut syy = 0.0;
    for (t, y) in ts.iter().zip(&ys) {
        stt += (t - mean_t) * (t - mean_t);
        sty += (t - mean_t) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sty / stt;
    let r2 = if syy == 0.0 { 1.0 } else { (sty * sty) / (stt * syy) };
    (slope, r2)
}

// Dormand-Prince 5(4) embedded pair.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Largest step taken; keeps the sample times dense enough that the
/// piecewise-linear view of g (and with it the bending energy of fields
/// built from G) stays accurate to O(H_MAX²) relative.
const H_MAX: f64 = 0.01;
const LIMIT_EPS: f64 = 1e-13;

struct Dp54Step {
    g: f64,
    err: f64,
}

fn dp54_step<F: Fn(f64) -> f64>(f: &F, g: f64, h: f64) -> Dp54Step {
    let k1 = f(g);
    let k2 = f(g + h * A2[0] * k1);
    let k3 = f(g + h * (A3[0] * k1 + A3[1] * k2));
    let k4 = f(g + h * (A4[0] * k1 + A4[1] * k2 + A4[2] * k3));
    let k5 = f(g + h * (A5[0] * k1 + A5[1] * k2 + A5[2] * k3 + A5[3] * k4));
    let k6 = f(g + h * (A6[0] * k1 + A6[1] * k2 + A6[2] * k3 + A6[3] * k4 + A6[4] * k5));
    let g5 = g + h * (B5[0] * k1 + B5[2] * k3 + B5[3] * k4 + B5[4] * k5 + B5[5] * k6);
    let k7 = f(g5);
    let g4 = g
        + h * (B4[0] * k1 + B4[2] * k3 + B4[3] * k4 + B4[4] * k5 + B4[5] * k6 + B4[6] * k7);
    Dp54Step {
        g: g5,
        err: (g5 - g4).abs(),
    }
}

/// Integrate y′ = f(y) from y(0) = ½ over [0, span], appending (t, y) pairs
/// after the initial point; stops early once y is within LIMIT_EPS of 1.
/// `f` must be nonnegative with fixed points at 0 and 1, so the exact
/// solution rises monotonically toward 1.
fn integrate_half<F: Fn(f64) -> f64>(
    f: &F,
    span: f64,
    tol: f64,
    ts: &mut Vec<f64>,
    gs: &mut Vec<f64>,
) -> Result<()> {
    let mut t = 0.0;
    let mut g = 0.5;
    let mut h = H_MAX.min(span);
    while t < span && 1.0 - g > LIMIT_EPS {
        h = h.min(span - t);
        let step = dp54_step(f, g, h);
        // Reject and retry smaller on a large local error or on overshoot
        // past the upper fixed point.
        if step.err > tol || step.g > 1.0 {
            if h < 1e-12 {
                return Err(Error::Solver(format!(
                    "profile step size underflow at t = {t:.6} (g = {g:.6}, \
                     local error {:.3e}, proposed value {:.6})",
                    step.err, step.g
                )));
            }
            h *= 0.5;
            continue;
        }
        if step.g > 1.0 + tol || step.g < -tol {
            return Err(Error::Solver(format!(
                "profile left [0,1] at t = {t:.6}: value {:.6e}",
                step.g
            )));
        }
        t += h;
        // The exact flow is nondecreasing; a sub-rounding decrease is noise.
        g = step.g.max(g);
        ts.push(t);
        gs.push(g);
        let grow = if step.err > 0.0 {
            (0.9 * (tol / step.err).powf(0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = (h * grow).min(H_MAX);
    }
    Ok(())
}

/// Solve the profile equation forward and backward from g(0) = ½ on
/// [−t_max, t_max] with local error ≤ tol per step; fit the tail decay
/// rates by log-linear regression over the final quarter of each half.
pub fn solve_profile(j: &JumpStates, t_max: f64, tol: f64) -> Result<ProfileSolution> {
    j.validate()?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Config(format!("t_max must be > 0 (got {t_max})")));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::Config(format!("tol must be > 0 (got {tol})")));
    }
    let denom = jump_denom(j);

    // Forward half: g′ = N(g)/denom.
    let mut ts_fwd = vec![0.0];
    let mut gs_fwd = vec![0.5];
    integrate_half(
        &|g: f64| profile_numerator(g, j) / denom,
        t_max,
        tol,
        &mut ts_fwd,
        &mut gs_fwd,
    )?;

    // Backward half in τ = −t: dg/dτ = −N(g)/denom, g decreasing toward 0.
    // Integrating y(τ) = 1 − g(−τ) keeps the rhs in the nonnegative,
    // fixed-points-at-0-and-1 form expected by the stepper.
    let mut ts_bwd = vec![0.0];
    let mut ys_bwd = vec![0.5];
    integrate_half(
        &|y: f64| profile_numerator(1.0 - y, j) / denom,
        t_max,
        tol,
        &mut ts_bwd,
        &mut ys_bwd,
    )?;

    let mut ts = Vec::with_capacity(ts_fwd.len() + ts_bwd.len() - 1);
    let mut gs = Vec::with_capacity(ts.capacity());
    for i in (1..ts_bwd.len()).rev() {
        ts.push(-ts_bwd[i]);
        gs.push(1.0 - ys_bwd[i]);
    }
    ts.extend_from_slice(&ts_fwd);
    gs.extend_from_slice(&gs_fwd);

    // Each half integrates its variable toward 1, so the fitted quantity is
    // the distance 1 − value over the final quarter: 1−g for the forward
    // half, and 1−y = g (decaying toward 0 in τ) for the backward half.
    let fit_half = |ts_half: &[f64], gs_half: &[f64]| -> Result<f64> {
        let t_end = *ts_half.last().expect("half has samples");
        let cut = 0.75 * t_end;
        let mut fts = Vec::new();
        let mut fvs = Vec::new();
        for (t, g) in ts_half.iter().zip(gs_half) {
            if *t >= cut && 1.0 - g > 0.0 {
                fts.push(*t);
                fvs.push(1.0 - g);
            }
        }
        if fts.len() < 3 {
            return Err(Error::Solver(
                "too few tail samples to fit a decay rate; increase t_max".into(),
            ));
        }
        let (slope, _r2) = tail_fit(&fts, &fvs);
        Ok(-slope)
    };
    let decay_plus = fit_half(&ts_fwd, &gs_fwd)?;
    let decay_minus = fit_half(&ts_bwd, &ys_bwd)?;

    Ok(ProfileSolution {
        j: *j,
        ts,
        gs,
        decay_plus,
        decay_minus,
        denom,
    })
}

impl ProfileSolution {
    /// g′(tᵢ) recovered from the profile equation.
    pub fn gprimes(&self) -> Vec<f64> {
        self.gs
            .iter()
            .map(|&g| profile_numerator(g, &self.j) / self.denom)
            .collect()
    }

    fn span_converged(&self, tol: f64) -> Result<()> {
        let first = *self.gs.first().expect("solution has samples");
        let last = *self.gs.last().expect("solution has samples");
        if first > tol || 1.0 - last > tol {
            return Err(Error::Span(format!(
                "profile span insufficient: g = {first:.3e} at the left end and \
                 1−g = {:.3e} at the right end exceed {tol:.0e}; solve with a \
                 larger t_max",
                1.0 - last
            )));
        }
        Ok(())
    }
}

/// Transition energy ∫ ½N(g)² + ½(p⊥·ν⊥)²g′² dt in the stretched variable,
/// by Hermite-Simpson quadrature over the sample intervals. Equals the jump
/// cost for every valid profile, independent of ε (validated, not used).
pub fn profile_energy(sol: &ProfileSolution, epsilon: f64) -> Result<f64> {
    crate::energy::check_epsilon(epsilon)?;
    sol.span_converged(1e-8)?;
    let j = &sol.j;
    let d = sol.denom;
    let density = |g: f64| {
        let n = profile_numerator(g, j);
        let gp = n / d;
        0.5 * n * n + 0.5 * d * d * gp * gp
    };
    let gps = sol.gprimes();
    let mut total = 0.0;
    for i in 0..sol.ts.len() - 1 {
        let h = sol.ts[i + 1] - sol.ts[i];
        let (ga, gb) = (sol.gs[i], sol.gs[i + 1]);
        let g_mid = 0.5 * (ga + gb) + h * (gps[i] - gps[i + 1]) / 8.0;
        total += h / 6.0 * (density(ga) + 4.0 * density(g_mid) + density(gb));
    }
    Ok(total)
}

/// Antiderivative G of g with G(0) = 0: the exact integral of the
/// piecewise-linear interpolant of the samples, so G is C¹ and equals the
/// cumulative trapezoid sums at the sample times, with fitted-exponential
/// extension beyond the span (G → Γ₋ below, G → t + Γ₊ above).
struct Antiderivative<'a> {
    sol: &'a ProfileSolution,
    cumulative: Vec<f64>,
}

impl<'a> Antiderivative<'a> {
    fn new(sol: &'a ProfileSolution) -> Result<Self> {
        for (name, rate) in [("upper", sol.decay_plus), ("lower", sol.decay_minus)] {
            if !rate.is_finite() || rate <= 0.0 {
                return Err(Error::Span(format!(
                    "fitted {name} tail decay rate {rate} is unusable for \
                     extending the profile beyond its sampled span; solve \
                     with a larger t_max"
                )));
            }
        }
        let zero = sol
            .ts
            .iter()
            .position(|&t| t == 0.0)
            .expect("solution contains t = 0");
        let mut cumulative = vec![0.0; sol.ts.len()];
        for i in zero..sol.ts.len() - 1 {
            let h = sol.ts[i + 1] - sol.ts[i];
            cumulative[i + 1] = cumulative[i] + 0.5 * h * (sol.gs[i] + sol.gs[i + 1]);
        }
        for i in (0..zero).rev() {
            let h = sol.ts[i + 1] - sol.ts[i];
            cumulative[i] = cumulative[i + 1] - 0.5 * h * (sol.gs[i] + sol.gs[i + 1]);
        }
        Ok(Antiderivative { sol, cumulative })
    }

    fn eval(&self, t: f64) -> f64 {
        let ts = &self.sol.ts;
        let n = ts.len();
        if t < ts[0] {
            // g ≈ g₀ e^{λ₋(t−t₀)} ⇒ G(t) = G(t₀) − (g₀/λ₋)(1 − e^{λ₋(t−t₀)}).
            let lam = self.sol.decay_minus;
            let g0 = self.sol.gs[0];
            return self.cumulative[0] - g0 / lam * (1.0 - (lam * (t - ts[0])).exp());
        }
        if t > ts[n - 1] {
            // 1−g ≈ (1−g₁)e^{−λ₊(t−t₁)} ⇒
            // G(t) = G(t₁) + (t−t₁) − ((1−g₁)/λ₊)(1 − e^{−λ₊(t−t₁)}).
            let lam = self.sol.decay_plus;
            let g1 = self.sol.gs[n - 1];
            return self.cumulative[n - 1] + (t - ts[n - 1])
                - (1.0 - g1) / lam * (1.0 - (-lam * (t - ts[n - 1])).exp());
        }
        let hi = ts.partition_point(|&s| s < t).min(n - 1).max(1);
        let lo = hi - 1;
        let dt = ts[hi] - ts[lo];
        let w = t - ts[lo];
        // Integral of the linear interpolant of g over [ts[lo], t].
        let slope = (self.sol.gs[hi] - self.sol.gs[lo]) / dt;
        self.cumulative[lo] + self.sol.gs[lo] * w + 0.5 * slope * w * w
    }

    /// Limits Γ₋ = lim_{t→−∞} G and Γ₊ = lim_{t→+∞} (G − t).
    fn asymptotes(&self) -> (f64, f64) {
        let n = self.sol.ts.len();
        let gamma_minus = self.cumulative[0] - self.sol.gs[0] / self.sol.decay_minus;
        let gamma_plus = self.cumulative[n - 1] - self.sol.ts[n - 1]
            - (1.0 - self.sol.gs[n - 1]) / self.sol.decay_plus;
        (gamma_minus, gamma_plus)
    }
}

fn ansatz_geometry(sol: &ProfileSolution) -> ([f64; 3], f64) {
    let p = jump_vector(&sol.j);
    let plen = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    (sol.j.nu, plen)
}

/// The ε-matched transition field u(𝐱) = ε|p| G((𝐱·ν)/ε) + m⁻·𝐱.
pub fn ansatz_field(sol: &ProfileSolution, grid: &Grid3, epsilon: f64) -> Result<ScalarField> {
    crate::energy::check_epsilon(epsilon)?;
    let anti = Antiderivative::new(sol)?;
    let (nu, plen) = ansatz_geometry(sol);
    let mm = sol.j.m_minus;
    let mut out = ScalarField::zeros(grid);
    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let [x, y, z] = grid.node(i, j, k);
                let sigma = x * nu[0] + y * nu[1] + z * nu[2];
                let v = epsilon * plen * anti.eval(sigma / epsilon)
                    + mm[0] * x
                    + mm[1] * y
                    + mm[2] * z;
                out.set(i, j, k, v);
            }
        }
    }
    Ok(out)
}

/// C² quintic ramp: 0 at q ≤ 0, 1 at q ≥ 1.
fn smoothstep(q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    q * q * q * (q * (6.0 * q - 15.0) + 10.0)
}

/// The transition field truncated for the cube class: outside a central
/// band along ν the field is blended via a C² ramp into (and then frozen
/// at) its affine asymptotes m∓·𝐱 + ε|p|Γ∓, so gradients in the outer
/// slabs equal m∓ exactly.
///
/// `slab_frac` is the frozen fraction at each end of the ν-extent and
/// `blend_frac` the ramp width next to it; both measured as fractions of
/// the box extent along ν.
pub fn blended_ansatz_field(
    sol: &ProfileSolution,
    grid: &Grid3,
    epsilon: f64,
    slab_frac: f64,
    blend_frac: f64,
) -> Result<ScalarField> {
    crate::energy::check_epsilon(epsilon)?;
    if !(slab_frac >= 0.0) || !(blend_frac > 0.0) || slab_frac + blend_frac > 0.5 {
        return Err(Error::Config(format!(
            "blend geometry invalid: need slab_frac >= 0, blend_frac > 0, \
             slab_frac + blend_frac <= 0.5 (got {slab_frac} and {blend_frac})"
        )));
    }
    let anti = Antiderivative::new(sol)?;
    let (nu, plen) = ansatz_geometry(sol);
    let (gamma_minus, gamma_plus) = anti.asymptotes();
    let mm = sol.j.m_minus;
    let mp = sol.j.m_plus;

    // Extent of 𝐱·ν over the box corners.
    let mut smin = f64::INFINITY;
    let mut smax = f64::NEG_INFINITY;
    for ci in 0..8 {
        let x = grid.bounds[0][(ci >> 0) & 1];
        let y = grid.bounds[1][(ci >> 1) & 1];
        let z = grid.bounds[2][(ci >> 2) & 1];
        let s = x * nu[0] + y * nu[1] + z * nu[2];
        smin = smin.min(s);
        smax = smax.max(s);
    }
    let ext = smax - smin;
    let lo_ramp = [smin + slab_frac * ext, smin + (slab_frac + blend_frac) * ext];
    let hi_ramp = [smax - (slab_frac + blend_frac) * ext, smax - slab_frac * ext];

    let mut out = ScalarField::zeros(grid);
    for k in 0..grid.nz {
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let [x, y, z] = grid.node(i, j, k);
                let sigma = x * nu[0] + y * nu[1] + z * nu[2];
                let inner = epsilon * plen * anti.eval(sigma / epsilon)
                    + mm[0] * x
                    + mm[1] * y
                    + mm[2] * z;
                let v = if sigma < lo_ramp[1] {
                    let affine = mm[0] * x + mm[1] * y + mm[2] * z
                        + epsilon * plen * gamma_minus;
                    let s = smoothstep((sigma - lo_ramp[0]) / (lo_ramp[1] - lo_ramp[0]));
                    (1.0 - s) * affine + s * inner
                } else if sigma > hi_ramp[0] {
                    let affine = mp[0] * x + mp[1] * y + mp[2] * z
                        + epsilon * plen * gamma_plus;
                    let s = smoothstep((hi_ramp[1] - sigma) / (hi_ramp[1] - hi_ramp[0]));
                    (1.0 - s) * affine + s * inner
                } else {
                    inner
                };
                out.set(i, j, k, v);
            }
        }
    }
    Ok(out)
}
