use graphviz_rust::parse;
use proptest::prelude::*;
use vn_cli::{parse_expression, render_dot, Env, Expr};
use vn_core::{embed, Alphabet, Word};

fn name() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["sigma", "tau", "t", "a", "g_1", "sx"]).prop_map(String::from)
}

fn word() -> impl Strategy<Value = Word> {
    prop::collection::vec(1u8..=3, 0..4).prop_map(Word::from_letters)
}

fn binary_word() -> impl Strategy<Value = Word> {
    prop::collection::vec(1u8..=2, 0..4).prop_map(Word::from_letters)
}

fn cycles() -> impl Strategy<Value = Vec<Vec<u8>>> {
    prop::collection::vec(prop::collection::vec(1u8..=9, 1..4), 0..3)
}

fn ast() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        name().prop_map(Expr::Name),
        Just(Expr::Id),
        cycles().prop_map(Expr::Dot),
        "[a-z]{1,6}(/[a-z]{1,4})?\\.alpha".prop_map(Expr::SAlpha),
    ];
    leaf.prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Product(Box::new(a), Box::new(b))),
            (inner.clone(), -5i64..6).prop_map(|(a, k)| Expr::Power(Box::new(a), k)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Conjugate(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Commutator(Box::new(a), Box::new(b))),
            (word(), inner).prop_map(|(w, g)| Expr::Embed(w, Box::new(g))),
        ]
    })
}

/// Expressions that evaluate without files: names and identity only.
fn closed_ast() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["sigma", "tau", "t"]).prop_map(|s| Expr::Name(s.into())),
        Just(Expr::Id),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Product(Box::new(a), Box::new(b))),
            (inner.clone(), -2i64..3).prop_map(|(a, k)| Expr::Power(Box::new(a), k)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Conjugate(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Commutator(Box::new(a), Box::new(b))),
            (binary_word(), inner).prop_map(|(w, g)| Expr::Embed(w, Box::new(g))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn parse_print_round_trip(e in ast()) {
        let printed = e.to_string();
        let back = parse_expression(&printed).map_err(|err| TestCaseError::fail(format!("{printed}: {err}")))?;
        prop_assert_eq!(back, e);
    }

    #[test]
    fn whitespace_does_not_matter(e in ast()) {
        let printed = e.to_string();
        // spaces between letters of a cycle are separators and must stay
        let chars: Vec<char> = printed.chars().collect();
        let squeezed: String = chars
            .iter()
            .enumerate()
            .filter(|&(i, &c)| {
                c != ' ' || (i > 0 && chars[i - 1].is_ascii_digit() && chars.get(i + 1).is_some_and(char::is_ascii_digit))
            })
            .map(|(_, &c)| c)
            .collect();
        let spaced = printed.replace(' ', "  ").replace('*', " * ").replace('[', " [ ");
        prop_assert_eq!(parse_expression(&spaced).unwrap(), e.clone());
        prop_assert_eq!(parse_expression(&squeezed).unwrap(), e);
    }

    #[test]
    fn eval_follows_the_algebra(a in closed_ast(), b in closed_ast(), n in 2usize..5) {
        let env = Env::new(Alphabet::new(n).unwrap());
        let (ga, gb) = (env.eval(&a).unwrap(), env.eval(&b).unwrap());
        let wrap = |e: &Expr| format!("({e})");
        let ev = |s: String| env.eval(&parse_expression(&s).unwrap()).unwrap();
        prop_assert_eq!(ev(format!("{} * {}", wrap(&a), wrap(&b))), ga.compose(&gb).unwrap());
        prop_assert_eq!(ev(format!("{}^{}", wrap(&a), wrap(&b))), ga.conjugate(&gb).unwrap());
        prop_assert_eq!(ev(format!("[{a}, {b}]")), ga.commutator(&gb).unwrap());
        prop_assert_eq!(ev(format!("{}^-1", wrap(&a))), ga.inverse());
        prop_assert_eq!(ev(format!("embed(1.2, {a})")), embed(&"1.2".parse().unwrap(), &ga).unwrap());
    }

    #[test]
    fn dot_output_parses_and_is_deterministic(e in closed_ast(), n in 2usize..5) {
        let env = Env::new(Alphabet::new(n).unwrap());
        let g = env.eval(&e).unwrap();
        let text = render_dot(&g);
        prop_assert!(parse(&text).is_ok(), "{}", text);
        prop_assert_eq!(&text, &render_dot(&env.eval(&parse_expression(&e.to_string()).unwrap()).unwrap()));
    }
}

#[test]
fn figure_elements_render() {
    for (n, e) in [(5, "dot((1 2))"), (5, "tau"), (2, "id"), (3, "t")] {
        let env = Env::new(Alphabet::new(n).unwrap());
        let text = render_dot(&env.eval(&parse_expression(e).unwrap()).unwrap());
        assert!(parse(&text).is_ok(), "{e}");
    }
}
