//! Checks of the solvers against the independent oracles: Dykstra
//! alternating projections, sorted closed-form water-filling, and central
//! finite differences.

use cogmimo::channel::{build_scenario, ScenarioChannels, SystemConfig};
use cogmimo::digital::{interference_plus_noise, solve_digital_precoder};
use cogmimo::hybrid_mi::{augmented_lagrangian_gradient, augmented_lagrangian_value};
use cogmimo::numerics::{hermitian_eig, psd_power, PsdPower};
use cogmimo::projections::{HybridFeasibilitySet, TraceConstraintSet};
use cogmimo::rng::SeededRng;
use cogmimo::{CMat, Cx, Real};
use cogmimo_testkit::{dykstra, finite_diff, waterfill};

fn small_config(t_s: usize, r_s: usize) -> SystemConfig<Real> {
    let mut c = SystemConfig::default_64x16();
    c.t_s = t_s;
    c.r_s = r_s;
    c.t_p = 4;
    c.r_p = 4;
    c.n_st = t_s.min(4);
    c.n_sr = r_s.min(4);
    c.l_s = 2;
    c.l_p = 2;
    c
}

fn isolated_scenario(h_ss: CMat, config: SystemConfig<Real>) -> ScenarioChannels<Real> {
    let h_ps = CMat::zeros(config.r_p, config.t_s);
    let h_sp = CMat::zeros(config.r_s, config.t_p);
    let f_p = CMat::from_fn(config.t_p, config.l_p, |i, j| {
        if i == j {
            Cx::new((config.p_max / config.l_p as f64).sqrt(), 0.0)
        } else {
            Cx::new(0.0, 0.0)
        }
    });
    ScenarioChannels::from_parts(h_ss, h_ps, &h_sp, f_p, config).unwrap()
}

#[test]
fn diagonal_channel_matches_waterfilling_oracle() {
    // No interference in or out: classical water-filling over the diagonal
    // gains at noise power σ_n².
    let mut config = small_config(4, 4);
    config.sigma_n_sq = 0.5;
    let gains = [2.0, 1.3, 0.7, 0.2];
    let h_ss = CMat::from_fn(4, 4, |i, j| {
        if i == j {
            Cx::new(gains[i], 0.0)
        } else {
            Cx::new(0.0, 0.0)
        }
    });
    let scenario = isolated_scenario(h_ss, config.clone());
    let sol = solve_digital_precoder(&scenario).unwrap();
    let oracle_gains: Vec<f64> = gains.iter().map(|g| g * g / config.sigma_n_sq).collect();
    let oracle = waterfill::capacity_bits(&oracle_gains, config.p_max);
    assert!(
        (sol.achieved_objective - oracle).abs() < 1e-6,
        "solver {} oracle {}",
        sol.achieved_objective,
        oracle
    );
}

#[test]
fn huge_interference_cap_reduces_to_power_only_waterfilling() {
    for seed in 0..5 {
        let mut config = small_config(8, 4);
        config.i_max = 1e9;
        let scenario = build_scenario(&config, seed).unwrap();
        let sol = solve_digital_precoder(&scenario).unwrap();
        let q = interference_plus_noise(&scenario);
        let qis = psd_power(&q, PsdPower::InvSqrt).unwrap();
        let h_tilde = &qis * &scenario.h_ss;
        let gram = (&h_tilde.adjoint() * &h_tilde).symmetrize();
        let eig = hermitian_eig(&gram).unwrap();
        let oracle = waterfill::capacity_bits(&eig.eigenvalues, config.p_max);
        assert!(
            (sol.achieved_objective - oracle).abs() < 1e-6,
            "seed {seed}: solver {} oracle {}",
            sol.achieved_objective,
            oracle
        );
        assert!(sol.multipliers.1.abs() < 1e-9);
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..5 {
        let mut c = small_config(6, 4);
        c.n_st = 3;
        c.n_sr = 3;
        let scenario = build_scenario(&c, seed).unwrap();
        let mut rng = SeededRng::from_seed(100 + seed);
        let z = CMat::random_gaussian(6, 2, &mut rng).scale_real(0.4);
        let f_rf = CMat::random_unit_modulus(6, 3, &mut rng);
        let f_bb = CMat::random_gaussian(3, 2, &mut rng).scale_real(0.2);
        let lambda = CMat::random_gaussian(6, 2, &mut rng);
        let alpha = 10.0;
        let grad =
            augmented_lagrangian_gradient(&scenario, &z, &f_rf, &f_bb, &lambda, alpha).unwrap();
        let f = |p: &CMat| {
            augmented_lagrangian_value(&scenario, p, &f_rf, &f_bb, &lambda, alpha).unwrap()
        };
        let rel = finite_diff::max_relative_gradient_error(&f, &z, &grad, 1e-5);
        assert!(rel < 1e-5, "seed {seed}: relative gradient error {rel}");
    }
}

#[test]
fn trace_constraint_projection_matches_dykstra() {
    for seed in 0..25 {
        let mut rng = SeededRng::from_seed(3000 + seed);
        let t_s = 3 + (seed as usize % 6); // up to 8
        let l = 1 + (seed as usize % 3); // up to 3
        let h = CMat::random_gaussian(3, t_s, &mut rng);
        let set = TraceConstraintSet::new(h.clone(), 1.0, 0.4).unwrap();
        let a = CMat::random_gaussian(t_s, l, &mut rng).scale_real(2.0);
        let ours = set.project(&a).unwrap();
        let oracle = dykstra::project_power_interference(&a, &h, 1.0, 0.4);
        let dist = ours.dist_frob(&oracle);
        assert!(dist < 1e-5, "seed {seed}: distance to oracle {dist}");
    }
}

#[test]
fn hybrid_feasibility_projection_matches_dykstra() {
    for seed in 0..15 {
        let mut rng = SeededRng::from_seed(4000 + seed);
        let t_s = 8;
        let n_st = 2 + (seed as usize % 2);
        let l = 2;
        let h = CMat::random_gaussian(2, t_s, &mut rng);
        let f_rf = CMat::random_unit_modulus(t_s, n_st, &mut rng);
        let set = HybridFeasibilitySet::new(&h, f_rf.clone(), 1.0, 0.5).unwrap();
        let a = CMat::random_gaussian(n_st, l, &mut rng).scale_real(1.5);
        let ours = set.project(&a).unwrap();
        let oracle = dykstra::project_hybrid_feasibility(&a, &h, &f_rf, 1.0, 0.5);
        let dist = ours.dist_frob(&oracle);
        assert!(dist < 1e-5, "seed {seed}: distance to oracle {dist}");
    }
}
