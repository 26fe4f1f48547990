use std::f64::consts::PI;

use dqg::filtering::{ConstantControl, ControlledHamiltonian, DetectionScheme, FeedbackPolicy, PolicyState};
use dqg::games::*;
use dqg::pde::*;
use dqg::quantum::{sigma_x, sigma_z, ComplexMatrix, ProjectiveState};
use dqg::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn on_circle(phi: f64) -> ProjectiveState {
    ProjectiveState::new(vec![Complex64::from_polar(1.0, phi)]).unwrap()
}

fn mean(f: &GridFunction) -> f64 {
    f.values().iter().sum::<f64>() / f.values().len() as f64
}

fn qutrit_torus_game(u_max: f64, v_max: f64) -> GameSpec {
    let ham = ControlledHamiltonian::new(
        ComplexMatrix::real_diagonal(&[0.0, 0.3, -0.2]).unwrap(),
        ComplexMatrix::real_diagonal(&[1.0, 0.0, 0.0]).unwrap(),
        ComplexMatrix::real_diagonal(&[0.0, 1.0, 0.0]).unwrap(),
    )
    .unwrap();
    let j = ComplexMatrix::new(3, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.2), c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.0), c(0.5, -0.2), c(0.3, 0.0), c(0.0, 0.0)]).unwrap();
    let f = ComplexMatrix::new(3, vec![c(0.2, 0.0), c(0.0, 0.4), c(0.0, 0.0), c(0.0, -0.4), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)]).unwrap();
    let costs = CostPair::new(j, f).unwrap();
    GameSpec::new(DetectionScheme::torus_diagonal(&[1.0, 1.0]).unwrap(), ham, u_max, v_max, costs, 0.5).unwrap()
}

#[test]
fn drift_field_examples() {
    let w = ProjectiveState::new(vec![c(0.3, -0.8)]).unwrap();
    let z = w.coords()[0];
    assert!(drift_field(&ComplexMatrix::identity(2), &w).unwrap()[0].norm() < 1e-15);
    assert!((drift_field(&sigma_z(), &w).unwrap()[0] - 2.0 * Complex64::i() * z).norm() < 1e-15);
    assert!((drift_field(&sigma_x(), &w).unwrap()[0] - Complex64::i() * (z * z - 1.0)).norm() < 1e-15);
}

#[test]
fn cost_rate_examples() {
    let w = ProjectiveState::new(vec![c(0.7, 0.1)]).unwrap();
    assert!((cost_rate(&ComplexMatrix::identity(2), &w).unwrap() - 1.0).abs() < 1e-15);
    assert!((cost_rate(&sigma_z(), &ProjectiveState::origin(1)).unwrap() - 1.0).abs() < 1e-15);
    let far = ProjectiveState::new(vec![c(1e7, 0.0)]).unwrap();
    assert!((cost_rate(&sigma_z(), &far).unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn circle_cost_is_a_shifted_cosine() {
    let j = ComplexMatrix::new(2, vec![c(0.4, 0.0), c(0.3, -1.1), c(0.3, 1.1), c(-0.9, 0.0)]).unwrap();
    for modulus in [0.5, 1.0, 2.5] {
        let cc = circle_cost(&j, modulus).unwrap();
        for k in 0..16 {
            let phi = 2.0 * PI * k as f64 / 16.0;
            let w = ProjectiveState::new(vec![Complex64::from_polar(modulus, phi)]).unwrap();
            assert!((cc.at(phi) - cost_rate(&j, &w).unwrap()).abs() < 1e-14);
        }
    }
    let cc = circle_cost(&sigma_x(), 1.0).unwrap();
    assert_eq!((cc.offset, cc.amplitude, cc.phase), (0.0, 1.0, 0.0));
}

#[test]
fn isaacs_terms_cancel_for_mirrored_players() {
    let h = ComplexMatrix::new(2, vec![c(0.5, 0.0), c(0.2, 0.9), c(0.2, -0.9), c(-0.1, 0.0)]).unwrap();
    let ham = ControlledHamiltonian::new(ComplexMatrix::zeros(2), h.clone(), h).unwrap();
    let costs = CostPair::new(sigma_z(), ComplexMatrix::zeros(2)).unwrap();
    let spec = GameSpec::new(DetectionScheme::pauli(), ham, 1.5, 1.5, costs, 1.0).unwrap();
    let w = ProjectiveState::new(vec![c(0.4, -0.3)]).unwrap();
    let got = isaacs_hamiltonian(&spec, &w, &[0.7, -2.0]).unwrap();
    assert!((got - cost_rate(&sigma_z(), &w).unwrap()).abs() < 1e-14);
}

#[test]
fn pure_control_hamiltonian_is_convex_in_the_gradient() {
    let ham = ControlledHamiltonian::new(ComplexMatrix::zeros(2), sigma_x(), sigma_z()).unwrap();
    let spec = GameSpec::new(DetectionScheme::pauli(), ham, 2.0, 0.0, CostPair::zero(2), 1.0).unwrap();
    let w = ProjectiveState::new(vec![c(0.2, 0.5)]).unwrap();
    let h = |p: [f64; 2]| isaacs_hamiltonian(&spec, &w, &p).unwrap();
    let (p, q) = ([1.0, -0.4], [-0.8, 2.0]);
    for s in [0.1, 0.3, 0.5, 0.9] {
        let mid = [s * p[0] + (1.0 - s) * q[0], s * p[1] + (1.0 - s) * q[1]];
        assert!(h(mid) <= s * h(p) + (1.0 - s) * h(q) + 1e-14);
    }
}

#[test]
fn circle_game_field_is_cost_plus_alpha_abs_gradient() {
    let (u, v) = (1.3, 0.4);
    let game = ZeroSumGame::from_game(&circle_game(u, v, 1.0).unwrap()).unwrap();
    assert_eq!(game.reduction.kappa(), 0.5);
    let grid = game.reduction.grid(32).unwrap();
    let field = IsaacsField::new(&game, &grid);
    for k in 0..20 {
        let phi = 0.31 * k as f64;
        let p = (k as f64 - 9.5) * 0.37;
        let want = phi.cos() + (u - v) * p.abs();
        assert!((field.eval([phi, 0.0], [p, 0.0]) - want).abs() < 1e-14);
    }
}

#[test]
fn zero_costs_give_zero_value_and_payoff() {
    let mut spec = circle_game(1.0, 0.5, 1.0).unwrap();
    spec.costs = CostPair::zero(2);
    let sol = solve_zero_sum(&spec, 32, &MildConfig::default()).unwrap();
    assert!(sol.value.slices().iter().all(|s| s.sup_norm() == 0.0));
    let est = evaluate_policy_mc(&spec, &sol.policy, &on_circle(0.3), &McConfig::new(1e-2, 200, 1)).unwrap();
    assert_eq!((est.mean, est.stderr, est.chart_exits), (0.0, 0.0, 0));
    assert!(!est.flagged);
}

#[test]
fn unsupported_dynamics_are_a_capability_error() {
    let ham = ControlledHamiltonian::zero(3);
    let spec = GameSpec::new(DetectionScheme::gell_mann(3).unwrap(), ham, 1.0, 1.0, CostPair::zero(3), 1.0).unwrap();
    assert!(matches!(solve_zero_sum(&spec, 16, &MildConfig::default()), Err(Error::Capability(_))));
}

#[test]
fn uncontrolled_circle_value_matches_closed_form() {
    // <J> = cos(phi) decays at rate kappa = 1/2 under the heat flow.
    let spec = circle_game(0.0, 0.0, 1.5).unwrap();
    let mut cfg = MildConfig::default();
    cfg.dt = 1e-3;
    let sol = solve_zero_sum(&spec, 64, &cfg).unwrap();
    let amp = (1.0 - (-0.75f64).exp()) / 0.5;
    let err = sol.value.initial().max_abs_diff(&GridFunction::from_fn(sol.value.grid(), |x| amp * x[0].cos()).unwrap()).unwrap();
    assert!(err < 1e-3, "{err}");
}

#[test]
fn uncontrolled_sphere_value_matches_monte_carlo() {
    let ham = ControlledHamiltonian::new(sigma_x().scale_real(0.6), sigma_z(), sigma_x()).unwrap();
    let costs = CostPair::new(sigma_z(), sigma_x()).unwrap();
    let spec = GameSpec::new(DetectionScheme::pauli(), ham, 0.0, 0.0, costs, 0.5).unwrap();
    let mut cfg = MildConfig::default();
    cfg.dt = 1e-3;
    let sol = solve_zero_sum(&spec, 16, &cfg).unwrap();
    let w = ProjectiveState::new(vec![c(0.5, 0.3)]).unwrap();
    let x = stereographic_to_sphere(w.coords()[0]);
    let pde = sol.value.initial().evaluate(x);
    let est = evaluate_policy_mc(&spec, &ConstantControl::default(), &w, &McConfig::new(1e-3, 4000, 11)).unwrap();
    assert!((est.mean - pde).abs() <= 2.0 * est.stderr, "mc {} ± {} vs pde {pde}", est.mean, est.stderr);
    assert_eq!(est.chart_exits, 0);
}

#[test]
fn value_is_monotone_in_control_authority() {
    let levels = [0.0, 0.5, 1.0];
    let values: Vec<Vec<GridFunction>> = levels
        .iter()
        .map(|&u| {
            levels
                .iter()
                .map(|&v| solve_zero_sum(&circle_game(u, v, 1.0).unwrap(), 64, &MildConfig::default()).unwrap().value.initial().clone())
                .collect()
        })
        .collect();
    for i in 0..3 {
        for j in 0..3 {
            let s = values[i][j].values();
            if i + 1 < 3 {
                assert!(values[i + 1][j].values().iter().zip(s).all(|(a, b)| *a >= b - 1e-12));
            }
            if j + 1 < 3 {
                assert!(values[i][j + 1].values().iter().zip(s).all(|(a, b)| *a <= b + 1e-12));
            }
        }
    }
}

#[test]
fn finite_horizon_rate_approaches_lambda() {
    // Spatial mean of S(0)/T behaves like lambda + c/T; check the 1/T law and the limit.
    let lambda = circle_lambda_scaled(1.0, 0.5);
    let rate = |t: f64| mean(solve_zero_sum(&circle_game(1.0, 0.0, t).unwrap(), 128, &MildConfig::default()).unwrap().value.initial()) / t;
    let (r20, r40) = (rate(20.0), rate(40.0));
    let (c20, c40) = (20.0 * (r20 - lambda), 40.0 * (r40 - lambda));
    assert!((c20 - c40).abs() < 0.05 * c20.abs(), "offsets {c20} {c40}");
    let extrapolated = 2.0 * r40 - r20;
    assert!((extrapolated - lambda).abs() < 0.01 * lambda, "{extrapolated} vs {lambda}");
}

#[test]
fn extracted_policy_matches_value_by_monte_carlo() {
    let spec = circle_game(1.0, 0.0, 1.0).unwrap();
    let sol = solve_zero_sum(&spec, 128, &MildConfig::default()).unwrap();
    for phi in [0.0, 2.0] {
        let est = evaluate_policy_mc(&spec, &sol.policy, &on_circle(phi), &McConfig::new(1e-3, 4000, 3)).unwrap();
        let pde = sol.value.initial().evaluate([phi, 0.0]);
        assert!((est.mean - pde).abs() <= (2.0 * est.stderr).max(2e-2), "phi {phi}: {} ± {} vs {pde}", est.mean, est.stderr);
    }
}

struct Waves(f64);

impl FeedbackPolicy for Waves {
    fn bounds(&self) -> (f64, f64) {
        (self.0, 0.0)
    }

    fn control(&self, _t: f64, state: PolicyState<'_>) -> (f64, f64) {
        match state {
            PolicyState::Angles { phi, .. } => (self.0 * phi[0].sin(), 0.0),
            _ => (0.0, 0.0),
        }
    }
}

struct Flipped<'a>(&'a BangBangPolicy);

impl FeedbackPolicy for Flipped<'_> {
    fn bounds(&self) -> (f64, f64) {
        self.0.bounds()
    }

    fn control(&self, t: f64, state: PolicyState<'_>) -> (f64, f64) {
        let (u, v) = self.0.control(t, state);
        (-u, v)
    }
}

#[test]
fn optimal_policy_beats_fixed_alternatives() {
    let spec = circle_game(1.0, 0.0, 1.0).unwrap();
    let sol = solve_zero_sum(&spec, 128, &MildConfig::default()).unwrap();
    let w = on_circle(1.0);
    let cfg = McConfig::new(2e-3, 3000, 5);
    let best = evaluate_policy_mc(&spec, &sol.policy, &w, &cfg).unwrap();
    let alternatives: Vec<Box<dyn FeedbackPolicy>> = vec![
        Box::new(ConstantControl { u: 1.0, v: 0.0 }),
        Box::new(ConstantControl { u: -1.0, v: 0.0 }),
        Box::new(ConstantControl::default()),
        Box::new(Waves(1.0)),
        Box::new(Flipped(&sol.policy)),
    ];
    for p in &alternatives {
        let other = evaluate_policy_mc(&spec, p.as_ref(), &w, &cfg).unwrap();
        assert!(best.mean >= other.mean - 2.0 * other.stderr, "{} vs {}", best.mean, other.mean);
    }
}

#[test]
fn scaling_costs_keeps_the_policy() {
    let spec = qutrit_torus_game(1.0, 0.7);
    let mut scaled = spec.clone();
    scaled.costs = CostPair::new(spec.costs.running.scale_real(3.5), spec.costs.terminal.scale_real(3.5)).unwrap();
    let a = solve_zero_sum(&spec, 24, &MildConfig::default()).unwrap();
    let b = solve_zero_sum(&scaled, 24, &MildConfig::default()).unwrap();
    let diff = b.value.initial().max_abs_diff(&a.value.initial().map(|s| 3.5 * s)).unwrap();
    assert!(diff < 1e-9 * b.value.initial().sup_norm().max(1.0));
    let mut agree = 0;
    let mut total = 0;
    for k in 0..200 {
        let x = [0.137 * k as f64, 0.291 * k as f64 + 0.05];
        let t = 0.5 * (k % 7) as f64 / 7.0;
        let ga = a.policy.gradient_at(t, x);
        // Near-ties may flip on rounding; count only clear signs.
        if ga[0].abs() + ga[1].abs() > 1e-6 {
            total += 1;
            agree += (a.policy.controls_at(t, x) == b.policy.controls_at(t, x)) as usize;
        }
    }
    assert!(agree as f64 >= 0.99 * total as f64, "{agree}/{total}");
}

proptest! {
    #[test]
    fn bang_bang_ignores_positive_scaling(
        theta in 0.05f64..3.1, phi in 0.0f64..6.28, p0 in -5.0f64..5.0, p1 in -5.0f64..5.0, s in 1e-3f64..1e3,
    ) {
        let ham = ControlledHamiltonian::new(ComplexMatrix::zeros(2), sigma_x(), sigma_z()).unwrap();
        let spec = GameSpec::new(DetectionScheme::pauli(), ham, 1.2, 0.8, CostPair::zero(2), 1.0).unwrap();
        let r = Reduction::from_game(&spec).unwrap();
        let x = [theta, phi];
        prop_assert_eq!(bang_bang(&r, x, [p0, p1], 1.2, 0.8), bang_bang(&r, x, [s * p0, s * p1], 1.2, 0.8));
        let (u, v) = bang_bang(&r, x, [p0, p1], 1.2, 0.8);
        prop_assert!(u.abs() <= 1.2 && v.abs() <= 0.8);
    }
}

#[test]
fn antisymmetric_costs_embed_the_zero_sum_game() {
    for spec in [circle_game(1.0, 0.4, 1.0).unwrap(), qutrit_torus_game(1.0, 0.7)] {
        let res = if spec.scheme.channels() == 1 { 128 } else { 32 };
        let scalar = solve_zero_sum(&spec, res, &MildConfig::default()).unwrap();
        let game = NonZeroSumGame::from_game(&spec, spec.costs.negated()).unwrap();
        let (s1, s2) = solve_nonzero_sum(&game, res, &MildConfig::default()).unwrap();
        let e1 = s1.initial().max_abs_diff(scalar.value.initial()).unwrap();
        let e2 = s2.initial().max_abs_diff(&scalar.value.initial().map(|s| -s)).unwrap();
        assert!(e1 <= 1e-3 && e2 <= 1e-3, "{e1} {e2}");
    }
}

#[test]
fn swapping_players_swaps_solutions() {
    let spec = qutrit_torus_game(1.0, 0.6);
    let other = CostPair::new(sigma_z_3(), spec.costs.terminal.scale_real(-0.5)).unwrap();
    let a = NonZeroSumGame::from_game(&spec, other.clone()).unwrap();
    let mut swapped = spec.clone();
    swapped.hamiltonian = ControlledHamiltonian::new(spec.hamiltonian.h0.clone(), spec.hamiltonian.h2.clone(), spec.hamiltonian.h1.clone()).unwrap();
    swapped.u_max = spec.v_max;
    swapped.v_max = spec.u_max;
    swapped.costs = other;
    let b = NonZeroSumGame::from_game(&swapped, spec.costs.clone()).unwrap();
    let (a1, a2) = solve_nonzero_sum(&a, 24, &MildConfig::default()).unwrap();
    let (b1, b2) = solve_nonzero_sum(&b, 24, &MildConfig::default()).unwrap();
    assert!(a1.initial().max_abs_diff(b2.initial()).unwrap() < 1e-12);
    assert!(a2.initial().max_abs_diff(b1.initial()).unwrap() < 1e-12);
}

fn sigma_z_3() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, 0.0, -1.0]).unwrap()
}

#[test]
fn uncontrolled_fields_are_cost_rates() {
    let mut spec = qutrit_torus_game(0.0, 0.0);
    spec.hamiltonian = ControlledHamiltonian::new(ComplexMatrix::zeros(3), spec.hamiltonian.h1.clone(), spec.hamiltonian.h2.clone()).unwrap();
    let game = NonZeroSumGame::from_game(&spec, CostPair::new(sigma_z_3(), sigma_z_3()).unwrap()).unwrap();
    let grid = game.reduction.grid(8).unwrap();
    let fields = build_nonzero_sum_fields(&game, &grid);
    for x in grid.nodes() {
        let got = fields.eval(*x, [1.3, -0.2], [-4.0, 2.0]);
        assert!((got[0] - game.reduction.expectation(&spec.costs.running, *x)).abs() < 1e-14);
        assert!((got[1] - game.reduction.expectation(&sigma_z_3(), *x)).abs() < 1e-14);
    }
}

#[test]
fn two_atom_product_torus_solves() {
    let h = ComplexMatrix::real_diagonal(&[1.0, 0.0]).unwrap();
    let a = ComplexMatrix::real_diagonal(&[0.3, 0.1, -0.2, -0.4]).unwrap();
    let j = sigma_x().kron(&sigma_x()).unwrap();
    let costs = CostPair::new(j, ComplexMatrix::zeros(4)).unwrap();
    let spec = TwoAtomSpec::new(h.clone(), h, a, 1.0, 0.5, costs.clone(), costs.negated(), 0.5).unwrap();
    let zs = ZeroSumGame::from_two_atom(&spec).unwrap();
    let sol = solve_reduced(&zs, 24, &MildConfig::default()).unwrap();
    let (s1, s2) = solve_nonzero_sum(&NonZeroSumGame::from_two_atom(&spec).unwrap(), 24, &MildConfig::default()).unwrap();
    assert!(s1.initial().max_abs_diff(sol.value.initial()).unwrap() < 1e-3);
    assert!(s2.initial().max_abs_diff(&sol.value.initial().map(|s| -s)).unwrap() < 1e-3);

    let entangling = ComplexMatrix::real_diagonal(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    let bad = TwoAtomSpec::new(spec.h_i.clone(), spec.h_ii.clone(), entangling, 1.0, 0.5, costs.clone(), costs, 0.5).unwrap();
    assert!(matches!(ZeroSumGame::from_two_atom(&bad), Err(Error::Capability(_))));
}

#[test]
fn chart_exits_are_counted_and_flagged() {
    let ham = ControlledHamiltonian::zero(2);
    let costs = CostPair::new(sigma_z(), ComplexMatrix::zeros(2)).unwrap();
    let spec = GameSpec::new(DetectionScheme::pauli(), ham, 0.0, 0.0, costs, 0.5).unwrap();
    let mut cfg = McConfig::new(1e-3, 2000, 2);
    cfg.representation = dqg::filtering::Representation::PauliFast;
    let est = evaluate_policy_mc(&spec, &ConstantControl::default(), &ProjectiveState::origin(1), &cfg).unwrap();
    assert!(est.chart_exits > 0 && est.flagged);
    assert_eq!(est.paths + est.chart_exits, 2000);
    cfg.representation = dqg::filtering::Representation::Auto;
    let est = evaluate_policy_mc(&spec, &ConstantControl::default(), &ProjectiveState::origin(1), &cfg).unwrap();
    assert_eq!(est.chart_exits, 0);
}

#[test]
fn circle_ergodic_rate_uses_the_reduced_alpha() {
    let rate = circle_ergodic_rate(&circle_game(1.0, 0.0, 1.0).unwrap()).unwrap().unwrap();
    assert!((rate - circle_lambda(2.0)).abs() < 1e-15);
    let half = circle_ergodic_rate(&circle_game(0.75, 0.25, 1.0).unwrap()).unwrap().unwrap();
    assert!((half - 0.5451657).abs() < 1e-7);
    assert_eq!(circle_ergodic_rate(&qutrit_torus_game(1.0, 0.0)).unwrap(), None);
}
