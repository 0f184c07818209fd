use proptest::prelude::*;
use qmont_core::funcexpr::{BinOp, Func};
use qmont_core::{as_realfn, parse, Expr};

const CORPUS: &str = include_str!("data/expressions.txt");

fn corpus() -> Vec<&'static str> {
    CORPUS.lines().filter(|l| !l.trim().is_empty()).collect()
}

#[test]
fn corpus_round_trips() {
    let lines = corpus();
    assert_eq!(lines.len(), 50);
    for src in lines {
        let e = parse(src).unwrap_or_else(|err| panic!("{src}: {err}"));
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e, "{src} -> {printed}");
    }
}

#[test]
fn corpus_evaluation_is_deterministic() {
    for src in corpus() {
        let e = parse(src).unwrap();
        for x in [0.25, 0.5, 1.5] {
            let first = e.eval(x).map(f64::to_bits).map_err(|err| err.to_string());
            let again = e.eval(x).map(f64::to_bits).map_err(|err| err.to_string());
            assert_eq!(first, again, "{src} at {x}");
        }
    }
}

#[test]
fn realfn_wrapper_matches_eval() {
    let e = parse("sin(t)^2 + ln(t + 2)").unwrap();
    let f = as_realfn(e.clone(), "g");
    assert_eq!(f.label(), "g");
    assert_eq!(f.eval(0.7).unwrap(), e.eval(0.7).unwrap());
    assert!(parse("ln(t)")
        .map(|e| as_realfn(e, "ln"))
        .unwrap()
        .eval(-1.0)
        .is_err());
}

fn number() -> impl Strategy<Value = f64> {
    prop_oneof![
        (0u32..100).prop_map(f64::from),
        0.0..1e6f64,
        (1e-300..1e300f64),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![number().prop_map(Expr::Num), Just(Expr::Var)];
    leaf.prop_recursive(6, 48, 2, |inner| {
        let op = prop::sample::select(vec![
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Div,
            BinOp::Pow,
        ]);
        let func = prop::sample::select(Func::ALL.to_vec());
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
        ]
    })
}

proptest! {
    #[test]
    fn printed_trees_reparse(e in expr()) {
        let printed = e.to_string();
        let back = parse(&printed);
        prop_assert_eq!(back.as_ref().ok(), Some(&e), "{}", printed);
    }

    #[test]
    fn eval_is_referentially_transparent(e in expr(), x in -5.0..5.0f64) {
        let first = e.eval(x).map(f64::to_bits).map_err(|err| err.to_string());
        let again = e.eval(x).map(f64::to_bits).map_err(|err| err.to_string());
        prop_assert_eq!(first, again);
    }

    #[test]
    fn syntax_errors_point_inside_input(s in "[t0-9+*/^() .a-z-]{0,16}") {
        if let Err(err) = parse(&s) {
            prop_assert!(err.offset <= s.len());
        }
    }
}
