// tests/acceptance.rs
//
// The acceptance checklist: one test per criterion, each printing a single
// `criterion NN [PASS|FAIL]` line so the target doubles as a report
// (`cargo test --test acceptance -- --nocapture --test-threads=1` prints
// the lines in order). The three minimizer sweep runs are shared between
// criteria 9, 11, and 12 through a OnceLock so the suite pays for them
// once.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smectic_core::{
    bps_decomposition, bps_verify, compactness_diagnostics, curvature_flux_check, deriv1, deriv2,
    dislocation_field, div_sigma, energy, energy_gradient, entropy_density_eig,
    entropy_sup_rotations, interior_window, jump_cost, make_grid, minimize, profile_energy,
    rotation_combo_check, sample_field, solve_profile, ansatz_field, blended_ansatz_field,
    ClampMask, DislocationSpec, Frame, Grid3, JumpStates, MinimizeConfig, Region, ScalarField,
};
use smectic_core::sum::pairwise_map_sum;

/// 1/(6√5), the sharp cost of the jump from rest to the unit x-tilt.
const UNIT_JUMP_COST: f64 = 0.07453559924999299;
/// √5/4, the logistic decay rate for that same jump.
const UNIT_JUMP_RATE: f64 = 0.5590169943749475;

fn check(n: usize, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n:02} [{verdict}] {name} — {detail}");
    assert!(ok, "criterion {n:02} ({name}) failed: {detail}");
}

/// The two opposite unit tilts sharing one vertical slope; the jump normal
/// is x̂ and the sharp cost is 2/3.
fn cube_states() -> JumpStates {
    JumpStates::from_states([1.0, 0.0, 0.5], [-1.0, 0.0, 0.5]).unwrap()
}

fn asymmetric_field(x: f64, y: f64, z: f64) -> f64 {
    (2.0 * x + y).sin() * (1.0 + 0.3 * z) + (x - y).cos() + 0.4 * (1.5 * y + 0.5 * z).cos()
}

fn refinement_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

struct SweepPoint {
    epsilon: f64,
    equipartition_gap: f64,
    curl_residual_l2: f64,
}

/// Slab-clamped descent from the blended transition ansatz at three ε on
/// grids refined like ε^{3/2} along the jump axis, so the descent
/// conditioning (bending stiffness ε/h⁴ against compression 1/(ε h²))
/// stays comparable and one iteration budget serves the whole sweep.
fn epsilon_sweep() -> &'static [SweepPoint] {
    static SWEEP: OnceLock<Vec<SweepPoint>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let j = cube_states();
        let sol = solve_profile(&j, 40.0, 1e-10).unwrap();
        [(0.2, 76), (0.1, 212), (0.05, 597)]
            .iter()
            .map(|&(epsilon, nx)| {
                let grid = make_grid(nx, 5, 5, [[-0.5, 0.5]; 3]).unwrap();
                let mut u = blended_ansatz_field(&sol, &grid, epsilon, 0.05, 0.05).unwrap();
                let mut cfg = MinimizeConfig::new(epsilon);
                cfg.max_iters = 2000;
                cfg.grad_tol = 1e-12;
                let report = minimize(&mut u, &cfg, &j).unwrap();
                let window = interior_window(&grid, j.nu, cfg.window_frac).unwrap();
                let diag = compactness_diagnostics(&u, &[2.0], &window).unwrap();
                SweepPoint {
                    epsilon,
                    equipartition_gap: report.equipartition_gap,
                    curl_residual_l2: diag.curl_residual_l2,
                }
            })
            .collect()
    })
}

#[test]
fn criterion_01_jump_cost_equals_profile_energy_independent_of_epsilon() {
    let j = JumpStates::from_states([1.0, 0.0, 0.5], [0.0; 3]).unwrap();
    let cost = jump_cost(&j).unwrap();
    let sol = solve_profile(&j, 40.0, 1e-10).unwrap();
    let energies: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&eps| profile_energy(&sol, eps).unwrap())
        .collect();
    let worst_dev = energies
        .iter()
        .map(|e| (e - UNIT_JUMP_COST).abs())
        .fold(0.0, f64::max);
    let spread = energies
        .iter()
        .flat_map(|a| energies.iter().map(move |b| (a - b).abs()))
        .fold(0.0, f64::max);
    let ok = (cost - UNIT_JUMP_COST).abs() < 1e-12 && worst_dev < 1e-6 && spread < 1e-9;
    check(
        1,
        "jump cost matches the profile energy at every epsilon",
        ok,
        &format!(
            "closed form {cost:.12}, quadrature deviation {worst_dev:.2e}, \
             epsilon spread {spread:.2e}"
        ),
    );
}

#[test]
fn criterion_02_profile_solver_reproduces_the_logistic_solution() {
    let j = JumpStates::from_states([1.0, 0.0, 0.5], [0.0; 3]).unwrap();
    let sol = solve_profile(&j, 40.0, 1e-10).unwrap();
    let sup = sol
        .ts
        .iter()
        .zip(&sol.gs)
        .map(|(&t, &g)| (g - 1.0 / (1.0 + (-UNIT_JUMP_RATE * t).exp())).abs())
        .fold(0.0, f64::max);
    let rate_err = (sol.decay_plus - UNIT_JUMP_RATE)
        .abs()
        .max((sol.decay_minus - UNIT_JUMP_RATE).abs())
        / UNIT_JUMP_RATE;
    let ok = sup < 1e-8 && rate_err < 0.02;
    check(
        2,
        "logistic oracle: profile values and tail decay rates",
        ok,
        &format!("sup error {sup:.2e}, worst relative rate error {rate_err:.2e}"),
    );
}

#[test]
fn criterion_03_entropy_divergence_identity_converges_at_second_order() {
    let frame = Frame::new(0.0);
    let mut errors = Vec::new();
    for n in [17, 33, 65] {
        let grid = Grid3::centered_cube(n).unwrap();
        let u = sample_field(&grid, asymmetric_field).unwrap();
        let (stencil, product) = div_sigma(&u, &frame);
        let [nx, ny, nz] = grid.shape();
        let mut max = 0.0f64;
        for k in 2..nz - 2 {
            for j in 2..ny - 2 {
                for i in 2..nx - 2 {
                    max = max.max((stencil.at(i, j, k) - product.at(i, j, k)).abs());
                }
            }
        }
        errors.push(max);
    }
    let orders = refinement_orders(&errors);
    let ok = orders.iter().all(|&p| p >= 1.8);
    check(
        3,
        "divergence of the entropy field matches its product form",
        ok,
        &format!("interior errors {errors:?}, orders {orders:?}"),
    );
}

#[test]
fn criterion_04_rotated_entropies_decompose_over_the_two_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let m = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        ];
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        worst = worst.max(rotation_combo_check(m, theta));
    }
    let ok = worst <= 1e-12;
    check(
        4,
        "cos2θ/sin2θ combination of the two generator entropies",
        ok,
        &format!("worst deviation over 10000 draws {worst:.2e}"),
    );
}

#[test]
fn criterion_05_rotation_supremum_matches_the_eigenvalue_density() {
    let grid = Grid3::centered_cube(33).unwrap();
    let u = sample_field(&grid, asymmetric_field).unwrap();
    let eig = entropy_density_eig(&u);
    let sup = entropy_sup_rotations(&u, 360).unwrap();
    let eig_max = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut worst_rel = 0.0f64;
    let mut ok = true;
    for n in 0..u.values.len() {
        let gap = eig.values[n] - sup.values[n];
        // The sampled sup approaches the envelope from below; a node is
        // judged relative to its own density with an absolute floor where
        // the density vanishes.
        if gap < -1e-12 || gap > 1e-3 * eig.values[n] + 1e-9 * eig_max {
            ok = false;
        }
        if eig.values[n] > 1e-9 * eig_max {
            worst_rel = worst_rel.max(gap / eig.values[n]);
        }
    }
    check(
        5,
        "360-frame supremum recovers |R| times the Hessian eigenvalue gap",
        ok,
        &format!("worst nodewise relative gap {worst_rel:.2e}"),
    );
}

#[test]
fn criterion_06_curvature_volume_integral_equals_its_boundary_flux() {
    let mut errors = Vec::new();
    for n in [17, 33, 65] {
        let grid = Grid3::centered_cube(n).unwrap();
        let u = sample_field(&grid, asymmetric_field).unwrap();
        errors.push(curvature_flux_check(&u).2);
    }
    let orders = refinement_orders(&errors);

    let grid = Grid3::centered_cube(33).unwrap();
    let saddle = sample_field(&grid, |x, y, _| 0.5 * (x * x - y * y)).unwrap();
    let (volume, flux, _) = curvature_flux_check(&saddle);

    let ok = orders.iter().all(|&p| p >= 1.8)
        && (volume + 1.0).abs() < 1e-12
        && (flux + 1.0).abs() < 1e-12;
    check(
        6,
        "Gaussian curvature integral against its flux form",
        ok,
        &format!(
            "orders {orders:?}; saddle volume {volume:.15}, flux {flux:.15}"
        ),
    );
}

#[test]
fn criterion_07_bps_decomposition_reconstructs_the_energy() {
    let epsilon = 0.7;
    let mut all_orders = Vec::new();
    for sign in [1, -1] {
        let mut errors = Vec::new();
        for n in [17, 33, 65] {
            let grid = Grid3::centered_cube(n).unwrap();
            let u = sample_field(&grid, asymmetric_field).unwrap();
            let direct = energy(&u, epsilon, &Region::full()).unwrap().total;
            let decomp = bps_decomposition(&u, epsilon, sign).unwrap();
            errors.push((decomp.reconstructed_total - direct).abs());
        }
        all_orders.push((sign, refinement_orders(&errors)));
    }
    let ok = all_orders
        .iter()
        .all(|(_, orders)| orders.iter().all(|&p| p >= 1.8));
    check(
        7,
        "completing-the-square decomposition, both signs",
        ok,
        &format!("{all_orders:?}"),
    );
}

#[test]
fn criterion_08_dislocation_solves_the_heat_equation_and_bps() {
    let spec_for = |n: usize| DislocationSpec {
        b: 0.5,
        epsilon: 0.2,
        sign: 1,
        grid: make_grid(n, 3, n, [[-2.5, 2.5], [-0.5, 0.5], [0.05, 0.55]]).unwrap(),
    };
    let window = Region::window([0.1, 0.0, 0.1], [0.9, 1.0, 0.9]).unwrap();

    let mut heat_errors = Vec::new();
    let mut bps_errors = Vec::new();
    for n in [65, 129, 257] {
        let spec = spec_for(n);
        let u = dislocation_field(&spec).unwrap();
        let s_field = ScalarField {
            grid: u.grid.clone(),
            values: u
                .values
                .iter()
                .map(|&v| (v / (2.0 * spec.epsilon)).exp())
                .collect(),
        };
        let sz = deriv1(&s_field, 2);
        let sxx = deriv2(&s_field, 0);
        let range = window.node_range(&u.grid).unwrap();
        let mut heat_max = 0.0f64;
        for k in range[2][0]..=range[2][1] {
            for j in range[1][0]..=range[1][1] {
                for i in range[0][0]..=range[0][1] {
                    let m = u.grid.idx(i, j, k);
                    heat_max =
                        heat_max.max((sz.values[m] - spec.epsilon * sxx.values[m]).abs());
                }
            }
        }
        heat_errors.push(heat_max);
        let (bps_max, _) = bps_verify(&u, spec.epsilon, spec.sign, &window).unwrap();
        bps_errors.push(bps_max);
    }
    let heat_orders = refinement_orders(&heat_errors);

    let spec = spec_for(65);
    let u = dislocation_field(&spec).unwrap();
    let [nx, ny, nz] = u.grid.shape();
    let mut plateau_dev = 0.0f64;
    for k in 0..nz {
        for j in 0..ny {
            plateau_dev = plateau_dev
                .max(u.at(0, j, k).abs())
                .max((u.at(nx - 1, j, k) - spec.b / 2.0).abs());
        }
    }

    let ok = heat_orders.iter().all(|&p| p >= 1.8)
        && bps_errors.windows(2).all(|w| w[1] < w[0])
        && plateau_dev < 1e-6;
    check(
        8,
        "Hopf-Cole dislocation: heat balance, BPS residual, plateaus",
        ok,
        &format!(
            "heat orders {heat_orders:?}, BPS residuals {bps_errors:?}, \
             worst plateau deviation {plateau_dev:.2e}"
        ),
    );
}

#[test]
fn criterion_09_cube_descent_lands_in_the_sharp_bracket() {
    let j = cube_states();
    let sol = solve_profile(&j, 40.0, 1e-10).unwrap();

    // Descent at ε = 0.1 on the 49³ cube, every boundary face held at the
    // blended ansatz (transverse faces included: leaving them free lets the
    // transition shed cost through the boundary and undercut the bound
    // that holds for layers meeting the sides tangentially).
    let grid = Grid3::centered_cube(49).unwrap();
    let epsilon = 0.1;
    let mut u = blended_ansatz_field(&sol, &grid, epsilon, 0.05, 0.05).unwrap();
    let mut cfg = MinimizeConfig::new(epsilon);
    cfg.max_iters = 800;
    cfg.grad_tol = 1e-12;
    cfg.frame_clamp = true;
    let report = minimize(&mut u, &cfg, &j).unwrap();
    let nonincreasing = report
        .trajectory
        .windows(2)
        .all(|w| w[1].energy <= w[0].energy + 1e-12);
    let final_interior = report.final_energy.total;
    let lo = 0.95 * report.lower_bound;
    let hi = report.upper_bound + 1e-6;
    let bracketed = final_interior >= lo && final_interior <= hi;

    // The blended ansatz tightens onto the sharp cost as ε shrinks; the
    // grids resolve ε at a fixed ratio so quadrature error cannot mask
    // the trend.
    let mut excesses = Vec::new();
    for (epsilon, nx) in [(0.2, 101), (0.1, 201), (0.05, 401)] {
        let grid = make_grid(nx, 5, 5, [[-0.5, 0.5]; 3]).unwrap();
        let ansatz = blended_ansatz_field(&sol, &grid, epsilon, 0.05, 0.05).unwrap();
        let total = energy(&ansatz, epsilon, &Region::full()).unwrap().total;
        excesses.push(total - report.lower_bound);
    }
    let monotone = excesses.windows(2).all(|w| w[1] < w[0]);

    let ok = nonincreasing && bracketed && monotone;
    check(
        9,
        "minimizer bracket and shrinking ansatz excess",
        ok,
        &format!(
            "final interior {final_interior:.6} in [{lo:.6}, {hi:.6}]: {bracketed}; \
             nonincreasing: {nonincreasing}; ansatz excesses {excesses:?}"
        ),
    );
}

#[test]
fn criterion_10_adjoint_gradient_matches_finite_differences() {
    let grid = make_grid(7, 7, 7, [[-1.0, 1.0]; 3]).unwrap();
    let mask = ClampMask::none(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let epsilon = 0.7;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let sample = |c: &[f64]| {
            sample_field(&grid, |x, y, z| {
                c[0] * (x + 0.7 * y).sin()
                    + c[1] * (y - 0.4 * z).cos()
                    + c[2] * (0.8 * x + 0.5 * z).sin()
                    + c[3] * x * y
                    + c[4] * (z + 0.3 * x).cos()
                    + c[5] * (x - y + z).sin()
            })
            .unwrap()
        };
        let u = sample(&coeffs);
        let dir_coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let phi = sample(&dir_coeffs);
        let grad = energy_gradient(&u, epsilon, &mask).unwrap();
        let pairing = pairwise_map_sum(grid.len(), &|m| grad.values[m] * phi.values[m]);
        let delta = 1e-5;
        let perturbed = |s: f64| {
            let mut v = u.clone();
            for (uv, pv) in v.values.iter_mut().zip(&phi.values) {
                *uv += s * pv;
            }
            energy(&v, epsilon, &Region::full()).unwrap().total
        };
        let fd = (perturbed(delta) - perturbed(-delta)) / (2.0 * delta);
        worst = worst.max((pairing - fd).abs() / fd.abs().max(1.0));
    }
    let ok = worst < 1e-6;
    check(
        10,
        "adjoint energy gradient against central differences",
        ok,
        &format!("worst relative error over 20 fields {worst:.2e}"),
    );
}

#[test]
fn criterion_11_equipartition_on_the_ansatz_and_under_descent() {
    let j = cube_states();
    let sol = solve_profile(&j, 40.0, 1e-10).unwrap();
    let grid = make_grid(257, 5, 5, [[-0.5, 0.5]; 3]).unwrap();
    let u = ansatz_field(&sol, &grid, 0.1).unwrap();
    let breakdown = energy(&u, 0.1, &Region::full()).unwrap();
    let rel = (breakdown.compression - breakdown.bending).abs() / breakdown.bending;

    let gaps: Vec<f64> = epsilon_sweep()
        .iter()
        .map(|p| p.equipartition_gap)
        .collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);

    let ok = rel < 1e-3 && decreasing;
    check(
        11,
        "compression/bending equipartition",
        ok,
        &format!(
            "ansatz relative imbalance {rel:.2e}; minimizer gaps {gaps:?}"
        ),
    );
}

#[test]
fn criterion_12_compactness_residuals_shrink_along_the_sweep() {
    let curls: Vec<f64> = epsilon_sweep()
        .iter()
        .map(|p| p.curl_residual_l2)
        .collect();
    let epsilons: Vec<f64> = epsilon_sweep().iter().map(|p| p.epsilon).collect();
    let decreasing = curls.windows(2).all(|w| w[1] < w[0]);

    let grid = Grid3::centered_cube(21).unwrap();
    let bowl = sample_field(&grid, |x, y, _| 0.5 * (x * x + y * y)).unwrap();
    let diag = compactness_diagnostics(&bowl, &[2.0], &Region::full()).unwrap();
    let fraction = diag.laplacian_nonneg_fraction;

    let ok = decreasing && fraction == 1.0;
    check(
        12,
        "curl residuals decrease and the convex bowl has signed curvature",
        ok,
        &format!(
            "curl L2 over epsilons {epsilons:?}: {curls:?}; \
             nonnegative-Laplacian fraction {fraction}"
        ),
    );
}
