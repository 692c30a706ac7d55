use std::collections::BTreeMap;

use kickflow_core::builtin;
use kickflow_core::melnikov::MelnikovProblem;
use kickflow_core::{ImpulseSchedule, Vec2};
use kickflow_dsl::{
    compile_field, compile_impulse, differentiate, eval, parse, BinOp, Env, Expr, ExprKind, Func, MapSpec, Var,
};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0u32..1000, 0i32..3).prop_map(|(m, k)| Expr::num(m as f64 / 10f64.powi(k))),
        (1.0f64..1e6).prop_map(Expr::num),
        Just(Expr::var(Var::X1)),
        Just(Expr::var(Var::X2)),
        Just(Expr::var(Var::Param("a".into()))),
    ]
}

fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(8, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::new(ExprKind::Neg(Box::new(e)), Default::default())),
            (proptest::sample::select(Func::ALL.to_vec()), inner.clone())
                .prop_map(|(f, e)| Expr::new(ExprKind::Call(f, Box::new(e)), Default::default())),
            (
                proptest::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]),
                inner.clone(),
                inner
            )
                .prop_map(|(op, a, b)| Expr::new(ExprKind::Bin(op, Box::new(a), Box::new(b)), Default::default())),
        ]
    })
}

/// Smooth everywhere on the sampled box, so finite differences apply.
fn smooth_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1u32..30).prop_map(|m| Expr::num(m as f64 / 10.0)),
        Just(Expr::var(Var::X1)),
        Just(Expr::var(Var::X2)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::new(ExprKind::Neg(Box::new(e)), Default::default())),
            (
                proptest::sample::select(vec![Func::Sin, Func::Cos, Func::Tanh, Func::Sech, Func::Sinh, Func::Cosh]),
                inner.clone()
            )
                .prop_map(|(f, e)| Expr::new(ExprKind::Call(f, Box::new(e)), Default::default())),
            (proptest::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul]), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| Expr::new(ExprKind::Bin(op, Box::new(a), Box::new(b)), Default::default())),
            (inner, 2u32..4).prop_map(|(a, k)| Expr::new(
                ExprKind::Bin(BinOp::Pow, Box::new(a), Box::new(Expr::num(k as f64))),
                Default::default()
            )),
        ]
    })
}

fn params() -> Vec<String> {
    vec!["a".to_string()]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn print_parse_round_trip(e in any_expr()) {
        let text = e.to_string();
        let back = parse(&text, &params()).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn derivative_matches_finite_differences(e in smooth_expr(), x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
        let p = BTreeMap::new();
        let at = |a: f64, b: f64| eval(&e, &Env { x1: a, x2: b, params: &p });
        let h = 1e-5;
        for (v, dx, dy) in [(Var::X1, h, 0.0), (Var::X2, 0.0, h)] {
            let d = differentiate(&e, &v).unwrap();
            let exact = eval(&d, &Env { x1, x2, params: &p }).unwrap();
            let fd = (at(x1 + dx, x2 + dy).unwrap() - at(x1 - dx, x2 - dy).unwrap()) / (2.0 * h);
            let scale = 1.0 + exact.abs() + at(x1, x2).unwrap().abs();
            prop_assert!((exact - fd).abs() <= 1e-5 * scale, "{}: {} vs {}", e, exact, fd);
        }
    }

    #[test]
    fn folding_preserves_values(e in smooth_expr(), x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
        let p = BTreeMap::new();
        let env = Env { x1, x2, params: &p };
        let a = eval(&e, &env).unwrap();
        let b = eval(&e.simplify(), &env).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn differentiation_is_linear(
        e1 in smooth_expr(), e2 in smooth_expr(), a in -3.0f64..3.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0,
    ) {
        let p = BTreeMap::new();
        let env = Env { x1, x2, params: &p };
        let combo = parse(&format!("({a:?}) * ({e1}) + ({e2})"), &[]).unwrap();
        for v in [Var::X1, Var::X2] {
            let lhs = eval(&differentiate(&combo, &v).unwrap(), &env).unwrap();
            let rhs = a * eval(&differentiate(&e1, &v).unwrap(), &env).unwrap()
                + eval(&differentiate(&e2, &v).unwrap(), &env).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn product_rule(e1 in smooth_expr(), e2 in smooth_expr(), x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
        let p = BTreeMap::new();
        let env = Env { x1, x2, params: &p };
        let prod = parse(&format!("({e1}) * ({e2})"), &[]).unwrap();
        let ev = |e: &Expr| eval(e, &env).unwrap();
        let lhs = ev(&differentiate(&prod, &Var::X1).unwrap());
        let rhs = ev(&differentiate(&e1, &Var::X1).unwrap()) * ev(&e2) + ev(&e1) * ev(&differentiate(&e2, &Var::X1).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
    }
}

#[test]
fn documented_values() {
    let p = BTreeMap::new();
    let at = |s: &str, x1: f64, x2: f64| eval(&parse(s, &[]).unwrap(), &Env { x1, x2, params: &p }).unwrap();
    assert_eq!(at("x1 - x1^2", 2.0, 0.0), -2.0);
    assert_eq!(at("2*x2 - 3*x2^2", 0.0, 1.0), -1.0);
    let d = differentiate(&parse("x1 - x1^3", &[]).unwrap(), &Var::X1).unwrap();
    assert_eq!(eval(&d, &Env { x1: 1.0, x2: 0.0, params: &p }).unwrap(), -2.0);
}

#[test]
fn compiled_fields_have_exact_jacobians() {
    let par = compile_field(&MapSpec::new("-3*x1", "x2")).unwrap();
    let eddy = compile_field(&MapSpec::new("2*x2 - 3*x2^2", "2*x1")).unwrap();
    let duf = compile_field(&MapSpec::new("x2", "x1 - x1^3")).unwrap();
    let zero = compile_field(&MapSpec::new("0", "0")).unwrap();
    for x in [Vec2::new(0.3, -0.7), Vec2::new(-2.0, 1.5)] {
        assert_eq!(par.jacobian(x), kickflow_core::Mat2::new(-3.0, 0.0, 0.0, 1.0));
        assert_eq!(eddy.trace(x), 0.0);
        assert_eq!(duf.trace(x), 0.0);
        assert_eq!(zero.velocity(x), Vec2::zeros());
        assert_eq!(zero.jacobian(x), kickflow_core::Mat2::zeros());
    }
}

#[test]
fn text_field_reproduces_duffing_melnikov() {
    let sys = builtin::duffing();
    let f = compile_field(&MapSpec::new("x2", "x1 - x1^3")).unwrap();
    let kicks = vec![
        compile_impulse(-1.0, &MapSpec::new("0", "-1")).unwrap(),
        compile_impulse(1.0, &MapSpec::new("0", "1")).unwrap(),
    ];
    let sched = ImpulseSchedule::new(kicks, 0.01, 0.5).unwrap();
    let orbit = sys.connection.as_ref().unwrap();
    let a = MelnikovProblem::new(&sys.field, &sys.schedule, orbit);
    let b = MelnikovProblem::new(&f, &sched, orbit);
    for (p, t) in [(0.0, 0.3), (1.0, -2.0), (-0.5, 2.5)] {
        assert_eq!(a.distance(p, t).unwrap(), b.distance(p, t).unwrap());
    }
}

#[test]
fn text_field_reproduces_expanding_divergence() {
    let f = compile_field(&MapSpec::new("x1 - x1^2", "2*x1*x2 - x2/2")).unwrap();
    for x in [Vec2::new(0.2, 0.3), Vec2::new(-1.0, 4.0)] {
        assert!((f.trace(x) - 0.5).abs() < 1e-15);
    }
}

#[test]
fn multi_line_errors_report_lines() {
    let e = parse("x1 *\n  (x2 +\n   )", &[]).unwrap_err();
    assert_eq!(e.to_string(), "3:4: expected an operand, found `)`");
}
