use super::*;
use qualred_intervalset::{int, ratio};

fn fixture(name: &str) -> QualitativeGame {
    let path = crate::fixture_dir().join(name);
    parse_game(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn set(s: &str) -> IntervalSet {
    s.parse().unwrap()
}

fn pts(x: &[(i64, i64)]) -> Profile {
    Profile::Points(x.iter().map(|(n, d)| ratio(*n, *d)).collect())
}

fn reals(s: StrategySet) -> IntervalSet {
    s.as_reals().unwrap().clone()
}

#[test]
fn fx1_values() {
    let g = fixture("fx1.qg");
    assert_eq!(g.players(), 2);
    assert_eq!(
        g.as_continuum()
            .unwrap()
            .correspondence(Corr::Pref, 0)
            .unwrap()
            .pieces
            .len(),
        2
    );
    let v = g.eval_value(Corr::Pref, 0, &pts(&[(1, 2), (3, 4)])).unwrap();
    assert_eq!(reals(v), set("(1/2,1]"));
    let v = g.eval_value(Corr::Pref, 0, &pts(&[(1, 1), (3, 4)])).unwrap();
    assert!(v.is_empty());
}

#[test]
fn fx4_comparison_values() {
    let g = fixture("fx4.qg");
    let v = g.eval_value(Corr::Comp, 0, &pts(&[(3, 2), (1, 2)])).unwrap();
    assert_eq!(reals(v), set("[1/2,3/2]"));
    let v = g.eval_value(Corr::Comp, 0, &pts(&[(1, 1), (1, 1)])).unwrap();
    assert_eq!(reals(v), set("{1}"));
    let v = g.eval_value(Corr::Pref, 1, &pts(&[(2, 1), (1, 2)])).unwrap();
    assert_eq!(reals(v), set("(1,2]"));
}

#[test]
fn utility_derivation_fxf1() {
    let g = fixture("fxf1.qg");
    let f = g.as_finite().unwrap();
    let a = LabelSet::from_indices(2, [0]);
    for x2 in 0..2 {
        assert_eq!(f.pref(0, f.flat(&[1, x2])), &a);
        assert!(f.pref(0, f.flat(&[0, x2])).is_empty());
    }
}

#[test]
fn constant_utilities_give_empty_preferences() {
    let labels = vec![
        vec!["a".to_string(), "b".into()],
        vec!["c".into(), "d".into(), "e".into()],
    ];
    let util = (0..2)
        .map(|owner| UtilityTable {
            owner,
            table: vec![int(3); 6],
        })
        .collect();
    let g = FiniteGame::new(labels, None, None, Some(util)).unwrap();
    assert!((0..2).all(|i| (0..6).all(|f| g.pref(i, f).is_empty())));
}

#[test]
fn derive_rejects_continuum() {
    assert_eq!(
        fixture("fx1.qg").derive_pref_from_utility(),
        Err(GameError::ContinuumUtility)
    );
}

#[test]
fn overlap_is_reported_at_the_second_cell() {
    let text = "game \"bad\"\nspace 1 = interval [0,1]\nspace 2 = interval [0,1]\n\
                pref 1 piecewise:\n  when x1 in [0,1] and x2 in [0,1] : empty\n  \
                when x1 in [1,1] and x2 in [1,1] : empty\n\
                pref 2 piecewise:\n  when x2 in [0,1] : empty\n";
    let err = parse_game(text).unwrap_err();
    assert_eq!(err.line, 6);
    assert_eq!(
        err.kind,
        ParseErrorKind::Overlap {
            other_line: 5,
            witness: "(1, 1)".into()
        }
    );
}

#[test]
fn diagnostics() {
    let head = "game \"g\"\nspace 1 = interval [0,1]\nspace 2 = interval [0,1]\n";
    let p2 = "pref 2 piecewise:\n  when x2 in [0,1] : empty\n";
    let cases: Vec<(String, usize, &str)> = vec![
        (
            format!("{head}pref 1 piecewise:\n  when x1 in [0,1/2) : empty\n{p2}"),
            4,
            "no cell covers",
        ),
        (
            format!("{head}pref 1 piecewise:\n  when x1 in [0,1] : (x1,2]\n{p2}"),
            5,
            "leaves the carrier",
        ),
        (
            format!("{head}pref 3 piecewise:\n  when x1 in [0,1] : empty\n{p2}"),
            4,
            "unknown player 3",
        ),
        (
            format!("{head}pref 1 piecewise:\n  when x1 in [0,1] : (x1+1,1]\n{p2}"),
            5,
            "affine",
        ),
        (
            format!("{head}pref 1 piecewise:\n  when x1 in [0,1] : [0,1/4] u [1/2,1]\n{p2}"),
            5,
            "union values",
        ),
        (
            format!("{head}pref 1 piecewise:\n  when x1 in [0,1] : (x9,1]\n{p2}"),
            5,
            "unknown player 9",
        ),
        (
            format!("{head}pref 1 piecewise:\n  when x1 in [0,1] : [1,0]\n{p2}"),
            5,
            "write `empty`",
        ),
        ("space 1 = interval [0,1]\n".to_string(), 1, "expected `game`"),
    ];
    for (text, line, needle) in cases {
        let err = parse_game(&text).unwrap_err();
        assert_eq!(err.line, line, "{err}");
        assert!(err.to_string().contains(needle), "{err}");
    }
}

#[test]
fn finite_diagnostics() {
    let text = "game \"f\"\nspace 1 = finite {a, b}\nspace 2 = finite {c}\n\
                pref 1 table:\n  at (a, c) : {b}\n  at (b, c) : {z}\n\
                pref 2 table:\n  at (a, c) : {}\n  at (b, c) : {}\n";
    let err = parse_game(text).unwrap_err();
    assert_eq!((err.line, err.column), (6, 16));
    assert_eq!(err.kind, ParseErrorKind::UnknownLabel("z".into()));
    let missing = text.replace("  at (b, c) : {z}\n", "");
    assert!(parse_game(&missing)
        .unwrap_err()
        .to_string()
        .contains("lacks profile (b, c)"));
}

#[test]
fn round_trip_is_a_fixed_point() {
    for name in [
        "fx1.qg",
        "fx1-closure.qg",
        "fx4.qg",
        "fx5-derived.qg",
        "fx5-as-printed.qg",
        "fxf1.qg",
    ] {
        let g = fixture(name);
        let text = serialize_game(&g);
        let again = parse_game(&text).unwrap();
        assert_eq!(again, g, "{name}");
        assert_eq!(serialize_game(&again), text, "{name}");
    }
}

#[test]
fn serialized_fxf1_is_stable() {
    let text = serialize_game(&fixture("fxf1.qg"));
    assert!(text.starts_with(
        "game \"fxf1\"\nspace 1 = finite {a, b}\nspace 2 = finite {c, d}\npref 1 table:\n  at (a, c) : {}\n"
    ));
    assert!(text.contains("  at (b, d) : {a}\n"));
    assert_eq!(text, serialize_game(&fixture("fxf1.qg")));
}

#[test]
fn empty_piece_renders_as_empty() {
    let text = serialize_game(&fixture("fx1.qg"));
    assert!(text.contains("when x1 in {1} : empty"));
}

#[test]
fn quoted_labels_round_trip() {
    let text = "game \"q\"\nspace 1 = finite {\"top left\", b}\nspace 2 = finite {c}\n\
                util 1 table:\n  at (\"top left\", c) = 1\n  at (b, c) = 0\n\
                util 2 table:\n  at (\"top left\", c) = 0\n  at (b, c) = 0\n";
    let g = parse_game(text).unwrap();
    assert_eq!(parse_game(&serialize_game(&g)).unwrap(), g);
}

#[test]
fn restricted_game_round_trips_with_ambient() {
    let g = fixture("fx1.qg");
    let c = g.as_continuum().unwrap();
    let r = c.restricted(&[set("{1/2}"), set("{1/2, 1}")]);
    let rg = QualitativeGame::continuum("r", r);
    let text = serialize_game(&rg);
    assert!(text.contains("space 1 = interval {1/2} within [0,1]"));
    assert_eq!(parse_game(&text).unwrap(), rg);
    let v = rg.eval_value(Corr::Pref, 0, &pts(&[(1, 2), (1, 1)])).unwrap();
    assert!(v.is_empty());
}

#[test]
fn relational_cells_cover_the_diagonal() {
    let g = fixture("fx4.qg");
    let q = g.as_continuum().unwrap().correspondence(Corr::Comp, 0).unwrap();
    for p in [[int(0), int(0)], [int(1), int(2)], [int(2), int(1)]] {
        assert_eq!(q.pieces.iter().filter(|pc| pc.cell.contains(&p)).count(), 1);
    }
}
