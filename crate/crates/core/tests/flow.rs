use approx::assert_relative_eq;
use kickflow_core::builtin::{self, explosion, parabolic_kick};
use kickflow_core::flow::{
    compute_orbit, evolve_impulsive, evolve_regularized, flow_smooth, jump_map, Branch, Direction, IntegratorSettings,
    OrbitSettings,
};
use kickflow_core::{Error, ImpulseSchedule, SliceTime, Vec2};

fn settings() -> IntegratorSettings {
    IntegratorSettings::default()
}

#[test]
fn eddy_flow_follows_the_homoclinic() {
    let sys = builtin::eddy();
    let orbit = sys.connection.as_ref().unwrap();
    let x0 = orbit.point(-0.5).unwrap();
    let x1 = flow_smooth(&sys.field, x0, 2.0, 3.5, &settings()).unwrap();
    assert!((x1 - orbit.point(1.0).unwrap()).norm() < 1e-9);
}

#[test]
fn smooth_flow_is_reversible() {
    for sys in [builtin::duffing(), builtin::eddy(), builtin::expanding()] {
        let x0 = Vec2::new(0.3, 0.2);
        let x1 = flow_smooth(&sys.field, x0, 0.0, 2.0, &settings()).unwrap();
        let back = flow_smooth(&sys.field, x1, 2.0, 0.0, &settings()).unwrap();
        assert!((back - x0).norm() < 1e-8, "{:?}", sys.builtin);
    }
}

#[test]
fn rk4_and_dopri5_agree() {
    let f = builtin::duffing_field();
    let x0 = Vec2::new(0.5, 0.1);
    let a = flow_smooth(&f, x0, 0.0, 3.0, &IntegratorSettings::rk4(1e-3)).unwrap();
    let b = flow_smooth(&f, x0, 0.0, 3.0, &settings()).unwrap();
    assert!((a - b).norm() < 1e-10);
}

#[test]
fn jump_round_trip_for_state_dependent_kicks() {
    for alpha in [0.0, 0.3, 0.5, 1.0] {
        let s =
            ImpulseSchedule::new(vec![parabolic_kick(0.0), explosion(1.0, Vec2::new(0.5, 0.8))], 0.05, alpha).unwrap();
        for x in [Vec2::new(0.2, -0.4), Vec2::new(-1.0, 0.5), Vec2::new(0.0, 0.0)] {
            for i in 0..2 {
                let y = jump_map(&s, i, x, Direction::Forward).unwrap();
                let z = jump_map(&s, i, y, Direction::Backward).unwrap();
                assert!((z - x).norm() <= 1e-10, "alpha {alpha} i {i} x {x:?}");
            }
        }
    }
}

#[test]
fn forward_jump_satisfies_the_implicit_rule() {
    let s = ImpulseSchedule::new(vec![parabolic_kick(0.0)], 0.1, 0.25).unwrap();
    let x = Vec2::new(0.4, 0.7);
    let y = jump_map(&s, 0, x, Direction::Forward).unwrap();
    let g = |v: Vec2| Vec2::new(v.x * v.x + v.y * v.y, v.x * v.x);
    let r = y - x - 0.1 * (0.25 * g(x) + 0.75 * g(y));
    assert!(r.norm() <= 1e-12);
}

#[test]
fn jump_at_zero_epsilon_is_identity() {
    let s = ImpulseSchedule::new(vec![parabolic_kick(0.0)], 0.0, 0.5).unwrap();
    let x = Vec2::new(1.0, 2.0);
    assert_eq!(jump_map(&s, 0, x, Direction::Forward).unwrap(), x);
}

#[test]
fn impulsive_evolution_is_flow_jump_flow() {
    let sys = builtin::parabolic();
    let x0 = Vec2::new(0.3, 0.5);
    let direct = evolve_impulsive(&sys.field, &sys.schedule, x0, -0.5, 0.7, &settings()).unwrap();
    let a = flow_smooth(&sys.field, x0, -0.5, 0.0, &settings()).unwrap();
    let b = jump_map(&sys.schedule, 0, a, Direction::Forward).unwrap();
    let c = flow_smooth(&sys.field, b, 0.0, 0.7, &settings()).unwrap();
    assert!((direct - c).norm() < 1e-12);
    let back = evolve_impulsive(&sys.field, &sys.schedule, direct, 0.7, -0.5, &settings()).unwrap();
    assert!((back - x0).norm() < 1e-9);
}

#[test]
fn one_sided_limits_straddle_the_jump() {
    let sys = builtin::parabolic();
    let x0 = Vec2::new(0.3, 0.5);
    let before = evolve_impulsive(&sys.field, &sys.schedule, x0, -0.5, SliceTime::before(0.0), &settings()).unwrap();
    let after = evolve_impulsive(&sys.field, &sys.schedule, x0, -0.5, SliceTime::after(0.0), &settings()).unwrap();
    assert_eq!(jump_map(&sys.schedule, 0, before, Direction::Forward).unwrap(), after);
}

#[test]
fn bare_jump_time_is_rejected() {
    let sys = builtin::parabolic();
    let err = evolve_impulsive(&sys.field, &sys.schedule, Vec2::new(1.0, 1.0), -1.0, 0.0, &settings()).unwrap_err();
    assert_eq!(err, Error::AtJumpTime(0.0));
}

#[test]
fn blow_up_is_reported() {
    let f = kickflow_core::PlanarField::from_fns(
        |x| Vec2::new(x.x * x.x, 0.0),
        |x| kickflow_core::Mat2::new(2.0 * x.x, 0.0, 0.0, 0.0),
    );
    let err = flow_smooth(&f, Vec2::new(1.0, 0.0), 0.0, 2.0, &settings()).unwrap_err();
    assert!(matches!(err, Error::BlowUp { .. } | Error::StepBudget { .. }), "{err:?}");
}

#[test]
fn overlapping_pulses_are_rejected() {
    let sys = builtin::duffing();
    let err = evolve_regularized(&sys.field, &sys.schedule, Vec2::new(0.1, 0.1), -3.0, 3.0, 1.5, &settings());
    assert!(matches!(err, Err(Error::PulseOverlap { .. })));
}

#[test]
fn regularized_kick_converges_linearly_for_one_sided_pulses() {
    let sys = builtin::duffing();
    let x0 = Vec2::new(0.4, -0.3);
    for alpha in [0.0, 1.0] {
        let sched = sys.schedule.with_alpha(alpha).unwrap();
        let reference = evolve_impulsive(&sys.field, &sched, x0, -1.5, 1.5, &settings()).unwrap();
        let ells = [1e-2, 1e-3];
        let errs: Vec<f64> = ells
            .iter()
            .map(|&l| {
                (evolve_regularized(&sys.field, &sched, x0, -1.5, 1.5, l, &settings()).unwrap() - reference).norm()
            })
            .collect();
        let exponent = (errs[0] / errs[1]).log10();
        assert!((exponent - 1.0).abs() <= 0.3, "alpha {alpha}: {errs:?}");
    }
}

#[test]
fn computed_parabolic_branch_matches_closed_form() {
    let sys = builtin::parabolic();
    let saddle = sys.saddles[0];
    let orbit = compute_orbit(&sys.field, &saddle, Branch::UnstablePlus, &OrbitSettings::default()).unwrap();
    for k in 0..=70 {
        let s = -5.0 + 0.1 * k as f64;
        let x = orbit.point(s).unwrap();
        assert!((x - Vec2::new(0.0, s.exp())).norm() <= 1e-6 * (1.0 + s.exp()), "s = {s}");
    }
}

#[test]
fn computed_duffing_branch_matches_homoclinic() {
    let sys = builtin::duffing();
    let exact = sys.connection.as_ref().unwrap();
    let orbit = compute_orbit(
        &sys.field,
        &sys.saddles[0],
        Branch::UnstablePlus,
        &OrbitSettings { amplitude: 4.0, ..OrbitSettings::default() },
    )
    .unwrap();
    for k in 0..=100 {
        let s = -5.0 + 0.1 * k as f64;
        assert!((orbit.point(s).unwrap() - exact.point(s).unwrap()).norm() < 1e-6, "s = {s}");
    }
}

#[test]
fn computed_eddy_branch_stays_on_the_zero_level_set() {
    let sys = builtin::eddy();
    let exact = sys.connection.as_ref().unwrap();
    let settings = OrbitSettings { amplitude: 4.0 * std::f64::consts::SQRT_2, ..OrbitSettings::default() };
    let orbit = compute_orbit(&sys.field, &sys.saddles[0], Branch::UnstablePlus, &settings).unwrap();
    let h = |x: Vec2| x.y * x.y - x.y.powi(3) - x.x * x.x;
    for k in 0..=80 {
        let s = -4.0 + 0.1 * k as f64;
        let x = orbit.point(s).unwrap();
        assert!(h(x).abs() < 1e-9, "s = {s}");
        assert!((x - exact.point(s).unwrap()).norm() < 1e-6, "s = {s}");
    }
}

#[test]
fn saddle_eigen_data_for_the_expanding_flow() {
    let sys = builtin::expanding();
    let a = sys.saddles[0];
    assert_relative_eq!(a.lambda_unstable, 1.0, epsilon = 1e-12);
    assert_relative_eq!(a.lambda_stable, -0.5, epsilon = 1e-12);
    let b = sys.saddles[1];
    assert_relative_eq!(b.lambda_unstable, 1.5, epsilon = 1e-12);
    assert_relative_eq!(b.lambda_stable, -1.0, epsilon = 1e-12);
}
