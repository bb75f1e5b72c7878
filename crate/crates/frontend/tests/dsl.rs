use proptest::prelude::*;
use vtc_frontend::ast::{Expr, Idx};
use vtc_frontend::builtin::{builtin, CHIRAL, MAXWELL, NAMES};
use vtc_frontend::{parse_expr, parse_model, parse_model_ast, print_expr, print_model, ModelError};

#[test]
fn builtin_models_resolve() {
    let m = parse_model(MAXWELL).unwrap();
    assert_eq!(m.name, "maxwell");
    assert_eq!(m.sp.dim, 4);
    for f in ["A", "C", "Astar", "Cstar", "E"] {
        assert!(m.fields.contains_key(f), "{f}");
    }
    assert_eq!(m.fields["A"].comps.len(), 4);
    assert_eq!(m.fields["E"].comps.len(), 3);
    assert_eq!(m.master, "L");
    assert!(m.structure.odd);
    let c = parse_model(CHIRAL).unwrap();
    assert_eq!(c.sp.params, vec!["k".to_string()]);
    assert!(c.densities["O"].generators().contains(&vtc_core::Gen::Param(0)));
    assert!(c.algebra.is_some() && c.leaves.is_some());
    assert_eq!(builtin("chiral.vtc"), Some(CHIRAL));
    assert_eq!(NAMES.len(), 2);
}

#[test]
fn print_parse_round_trip_on_builtins() {
    for src in [MAXWELL, CHIRAL] {
        let ast = parse_model_ast(src).unwrap();
        let printed = print_model(&ast);
        assert_eq!(parse_model_ast(&printed).unwrap(), ast);
        assert_eq!(print_model(&parse_model_ast(&printed).unwrap()), printed);
    }
}

#[test]
fn errors_carry_positions_and_kinds() {
    assert!(matches!(parse_model(""), Err(ModelError::Syntax { line: 1, .. })));
    assert!(matches!(parse_model("# only a comment\n"), Err(ModelError::Syntax { .. })));
    match parse_model("dim 2\nfield u { parity even, ghost 0 }\ndensity L = u * $") {
        Err(ModelError::Syntax { line, col, .. }) => assert_eq!((line, col), (3, 17)),
        other => panic!("{other:?}"),
    }
    let base = "dim 1\nfield u { parity even }\nfield p { parity even, role source, conj u }\nstructure { omega = del(p)*del(u)*dx[0] }\n";
    let unknown = format!("{base}density L = v*dx[0]");
    assert!(matches!(parse_model(&unknown), Err(ModelError::UnknownField(n)) if n == "v"));
    let wrong_degree = format!("{base}density L = u");
    assert!(matches!(parse_model(&wrong_degree), Err(ModelError::Grading(_))));
    let mixed = format!("{base}density L = u*dx[0] + u*del(u)*dx[0]");
    assert!(matches!(parse_model(&mixed), Err(ModelError::Grading(_))));
    let parity = "dim 1\nfield u { parity even }\nfield p { parity odd, role source, conj u }\nstructure { omega = del(p)*del(u)*dx[0] }";
    assert!(matches!(parse_model(parity), Err(ModelError::Grading(_))));
    // an even structure needs an odd master density
    assert!(matches!(parse_model(&format!("{base}density L = u*p,[0]*dx[0]")), Err(ModelError::Grading(_))));
    let odd = "dim 1\nfield u { parity even }\nfield p { parity odd, ghost -1, role antifield, conj u }\nstructure { omega = del(p)*del(u)*dx[0] }\n";
    parse_model(&format!("{odd}density L = u*u,[0]*dx[0]\nmaster L")).unwrap();
}

#[test]
fn expressions_evaluate() {
    let m = parse_model(CHIRAL).unwrap();
    let a = m.eval_str("<etabar, d(phi)>").unwrap();
    assert_eq!(a.bidegree(), Some((0, 2)));
    assert!(m.eval_str("phi").is_err());
    assert!(matches!(m.eval_str("phi*phi"), Err(ModelError::Grading(_))));
    assert!(matches!(m.eval_str("u"), Err(ModelError::UnknownField(_))));
    let sum = m.eval_str("sum(a in 0..2, etabar[a]*etabar[a],[1])").unwrap();
    assert_eq!(sum, m.eval_str("etabar[0]*etabar[0],[1] + etabar[1]*etabar[1],[1] + etabar[2]*etabar[2],[1]").unwrap());
    assert_eq!(m.eval_str("x1*dx1").unwrap(), m.eval_str("x[1]*dx[1]").unwrap());
    assert_eq!(m.eval_str("k/2 - k/2").unwrap(), vtc_core::Poly::zero());
    assert!(m.eval_str("k/phi[0]").is_err());
    let w = parse_model(MAXWELL).unwrap();
    assert_eq!(w.eval_str("eta(1, 1)").unwrap(), vtc_core::Poly::int(-1));
    assert_eq!(w.eval_str("ib(0, vol)").unwrap(), w.eval_str("dx[1]*dx[2]*dx[3]").unwrap());
}

#[test]
fn rendered_output_parses_back() {
    let m = parse_model(CHIRAL).unwrap();
    let o = &m.densities["O"];
    assert_eq!(&m.eval_str(&o.render(&m.sp)).unwrap(), o);
    let w = vtc_core::forms::delta(o);
    assert_eq!(m.eval_str(&w.render(&m.sp)).unwrap(), w);
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..20).prop_map(|n| Expr::Num(vtc_core::q(n as i64, 1))),
        prop::sample::select(vec!["k", "u", "vol", "mu"]).prop_map(|s| Expr::Name(s.into())),
        (0u8..3, prop::option::of(prop::collection::vec(0u8..3, 1..3))).prop_map(|(i, der)| Expr::Ref {
            name: "A".into(),
            idx: vec![Idx::Lit(i)],
            der: der.map(|d| d.into_iter().map(Idx::Lit).collect()),
        }),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        let b = |e| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |e| Expr::Neg(b(e))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Add(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Sub(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Mul(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Div(b(x), b(y))),
            (inner.clone(), 0u32..4).prop_map(move |(x, k)| Expr::Pow(b(x), k)),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Pair(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::Comm(b(x), b(y))),
            inner.clone().prop_map(|x| Expr::Call("d".into(), vec![x])),
            inner.clone().prop_map(move |x| Expr::Sum { var: "mu".into(), range: None, body: b(x) }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn expression_round_trip(e in arb_expr()) {
        let text = print_expr(&e);
        prop_assert_eq!(parse_expr(&text).unwrap(), e);
    }
}
