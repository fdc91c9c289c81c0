use eo_core::bsl::{
    parse_document, parse_expression, parse_setdo, pretty_print, print_expression, print_setdo, tokenize,
    BinOp, ContextVar, Declaration, Document, Expr, Literal,
};
use eo_core::scenarios::{SURVIVE_THE_WINTER, VIEW_GENESIS, WINTER_FEAST};
use proptest::prelude::*;

#[test]
fn bundled_world_shape() {
    let doc = parse_document(WINTER_FEAST).unwrap();
    assert_eq!(doc.concepts().count(), 2);
    let props: Vec<_> = doc.properties().collect();
    assert_eq!(props.len(), 21);
    assert_eq!(props.iter().filter(|p| p.data_type.is_some()).count(), 19);
    let (views, domain): (Vec<_>, Vec<_>) = doc.models().partition(|m| m.is_view());
    assert_eq!((domain.len(), views.len()), (2, 1));
    let (views, domain): (Vec<_>, Vec<_>) = doc.individuals().partition(|i| i.is_view());
    assert_eq!((domain.len(), views.len()), (2, 2));
}

#[test]
fn bundled_sources_are_fixed_points() {
    for source in [WINTER_FEAST, SURVIVE_THE_WINTER, VIEW_GENESIS] {
        let doc = parse_document(source).unwrap();
        let printed = pretty_print(&doc);
        let again = parse_document(&printed).unwrap();
        assert_eq!(again, doc);
        assert_eq!(pretty_print(&again), printed);
    }
}

#[test]
fn trivial_documents() {
    assert!(tokenize("").unwrap().is_empty());
    assert!(tokenize("# comment only\n").unwrap().is_empty());
    assert_eq!(pretty_print(&Document::default()), "");
    let one = parse_document("Concept: Instance: Survivor").unwrap();
    assert!(matches!(one.declarations[..], [Declaration::Concept(_)]));
    assert_eq!(pretty_print(&one), "Concept: Instance: Survivor\n");
    assert!(parse_document("Survivor: Model:").is_err());
}

#[test]
fn both_navigation_forms_agree() {
    assert_eq!(
        parse_expression("$($.location).hasTree == 1").unwrap(),
        parse_expression("($$.location).hasTree == 1").unwrap()
    );
}

#[test]
fn setdo_keys_in_any_order() {
    let a = parse_setdo("({'$do': 'EditIndividual', '$IndividualID': $.location, '$Condition': $Value === \"1\", 'hasFire': 1})").unwrap();
    let b = parse_setdo("({'hasFire': 1, '$Condition': $Value === \"1\", '$IndividualID': $.location, '$do': 'EditIndividual'})").unwrap();
    assert_eq!(a, b);
    assert_eq!(parse_setdo(&print_setdo(&a)).unwrap(), a);
    assert!(parse_setdo("({'$do': 'EditIndividual', '$Condition': 1 == 1, 'x': 1})").is_err());
}

fn name() -> impl Strategy<Value = String> {
    "[a-z_][A-Za-z0-9_]{0,8}"
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-400i32..400).prop_map(|n| Expr::Literal(Literal::Number(f64::from(n) / 4.0))),
        "[ -~]{0,6}".prop_map(|s| Expr::Literal(Literal::Text(s))),
        name().prop_map(Expr::Prop),
        (name(), name()).prop_map(|(relation, property)| Expr::Deref { relation, property }),
        Just(Expr::Var(ContextVar::Value)),
        Just(Expr::Var(ContextVar::CurrentIndividual)),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    let op = prop::sample::select(vec![
        BinOp::Eq,
        BinOp::StrictEq,
        BinOp::Lt,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ]);
    leaf().prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::NumCoerce(Box::new(e))),
            (op.clone(), inner.clone(), inner).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse(e in expr()) {
        let text = print_expression(&e);
        prop_assert_eq!(parse_expression(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn parsing_is_pure(e in expr()) {
        let text = print_expression(&e);
        prop_assert_eq!(parse_expression(&text).unwrap(), parse_expression(&text).unwrap());
    }
}
