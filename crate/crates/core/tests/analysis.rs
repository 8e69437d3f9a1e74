mod common;

use common::*;
use qualred_core::analysis::*;
use qualred_core::engine::{dominator_set, restrict, OperatorKind};
use qualred_core::gamespec::{Corr, FiniteCorrespondence, FiniteGame, Profile};
use qualred_core::reduction::{default_step_op, parse_path_script, run_path, star_reduce, PathMode};
use qualred_core::{LabelSet, QualitativeGame, Strategy};
use qualred_intervalset::Rational;

/// 2×2 finite game from per-profile label lists, row-major over (p1, p2).
fn game2(p: [[&[usize]; 4]; 2], q: Option<[[&[usize]; 4]; 2]>) -> QualitativeGame {
    let labels = vec![vec!["a".to_string(), "b".into()], vec!["c".to_string(), "d".into()]];
    let corr = |t: [[&[usize]; 4]; 2]| {
        (0..2)
            .map(|i| FiniteCorrespondence {
                owner: i,
                table: t[i]
                    .iter()
                    .map(|v| LabelSet::from_indices(2, v.iter().copied()))
                    .collect(),
            })
            .collect::<Vec<_>>()
    };
    QualitativeGame::finite("t", FiniteGame::new(labels, Some(corr(p)), q.map(corr), None).unwrap())
}

const NONE: &[usize] = &[];

/// Re-evaluates a hypothesis failure to make sure it is genuine.
fn assert_genuine(game: &QualitativeGame, h: Hypothesis, v: &Violation) {
    let x = v.profile.clone().expect("profile witness");
    let i = v.player;
    let pts = match &x {
        Profile::Points(p) => p.clone(),
        Profile::Labels(_) => Vec::new(),
    };
    match h {
        Hypothesis::StrongIrreflexive => {
            let p = game.eval_value(Corr::Pref, i, &x).unwrap();
            let closed = p.as_reals().unwrap().closure();
            assert!(closed.contains(&pts[i]));
        }
        Hypothesis::OpenLowerSections => {
            let Some(Strategy::Point(y)) = &v.strategy else {
                panic!()
            };
            assert!(game
                .eval_value(Corr::Pref, i, &x)
                .unwrap()
                .as_reals()
                .unwrap()
                .contains(y));
        }
        _ => {}
    }
}

#[test]
fn fx1_property_t_single() {
    let g = fixture("fx1.qg");
    for i in 0..2 {
        assert_eq!(check_property_t_single(&g, i), Verdict::Holds);
    }
}

#[test]
fn finite_property_t_single_violation() {
    // P_1(a,c) = {b}, P_1(b,c) = {a}: b ∈ P_1(a,c) but a ∉ P_1(a,c).
    let g = game2([[&[1], NONE, &[0], NONE], [NONE; 4]], None);
    let v = check_property_t_single(&g, 0);
    let w = v.violation().expect("violation");
    assert_eq!(w.profile, Some(Profile::Labels(vec![0, 0])));
    assert_eq!(w.strategy, Some(Strategy::Label(1)));
    let empty = game2([[NONE; 4], [NONE; 4]], None);
    assert!(check_property_t_single(&empty, 0).holds());
}

#[test]
fn property_t_pair_examples() {
    let g = fixture("fx4.qg");
    for i in 0..2 {
        assert_eq!(check_property_t_pair(&g, i), Ok(Verdict::Holds));
    }
    let g = fixture("fx1-closure.qg");
    for i in 0..2 {
        assert_eq!(check_property_t_pair(&g, i), Ok(Verdict::Holds));
    }
    assert_eq!(
        check_property_t_pair(&fixture("fx1.qg"), 0),
        Err(AnalysisError::MissingQ)
    );
    // Q_1(b,c) = {} is smaller than P_1(b,c) = {a}.
    let g = game2(
        [[NONE, NONE, &[0], NONE], [NONE; 4]],
        Some([[&[0], &[0], NONE, &[1]], [&[0], &[1], &[0], &[1]]]),
    );
    let v = check_property_t_pair(&g, 0).unwrap();
    assert_eq!(v.violation().unwrap().profile, Some(Profile::Labels(vec![1, 0])));
}

#[test]
fn fx4_comparison_hypotheses() {
    let g = fixture("fx4.qg");
    let r = check_selected(
        &g,
        &[
            Hypothesis::PropertyTPair,
            Hypothesis::QReflexive,
            Hypothesis::QClosedConvex,
            Hypothesis::Irreflexive,
        ],
    );
    assert!(r.all_hold(), "{r:?}");
    // {x : y ∈ P_1(x)} = [0,1] × [y,2] is closed on one side
    let v = check_hypothesis(&g, Hypothesis::OpenLowerSections);
    assert_genuine(&g, Hypothesis::OpenLowerSections, v.violation().expect("fails"));
}

#[test]
fn fx1_irreflexivity_flavours() {
    let g = fixture("fx1.qg");
    assert!(check_hypothesis(&g, Hypothesis::Irreflexive).holds());
    assert!(check_hypothesis(&g, Hypothesis::OpenLowerSections).holds());
    let v = check_hypothesis(&g, Hypothesis::StrongIrreflexive);
    let w = v.violation().expect("strong irreflexivity fails");
    assert_genuine(&g, Hypothesis::StrongIrreflexive, w);
    // x_1 lies in the closure of P_1 at (1/2, 1/3)
    let x = Profile::Points(vec![qualred_intervalset::ratio(1, 2), qualred_intervalset::ratio(1, 3)]);
    let p = g.eval_value(Corr::Pref, 0, &x).unwrap();
    assert!(p
        .as_reals()
        .unwrap()
        .closure()
        .contains(&qualred_intervalset::ratio(1, 2)));
    assert!(matches!(
        check_hypothesis(&g, Hypothesis::QReflexive),
        Verdict::NotApplicable(_)
    ));
}

#[test]
fn utility_derived_preferences_are_irreflexive() {
    let g = fixture("fxf1.qg");
    assert!(check_hypothesis(&g, Hypothesis::Irreflexive).holds());
    assert!(check_hypothesis(&g, Hypothesis::OpenLowerSections).holds());
}

#[test]
fn condition_examples_fxf1() {
    let g = fixture("fxf1.qg");
    for op in [OperatorKind::Double, OperatorKind::Tail] {
        let t = star_reduce(&g, op, 10);
        let r = check_conditions(&g, &t);
        assert!(r.c_holds() && r.d_holds());
    }
}

#[test]
fn condition_examples_fx5() {
    let g = fixture("fx5-derived.qg");
    let full = g.full_pairing();
    assert!(condition_d_at(&g, &full).holds());
    // every dominator of 1/2 lies in (1/2,1), all of which are dominated
    let c = condition_c_at(&g, &full);
    assert!(!c.holds());
    let half = pt("1/2");
    assert_eq!(find_undominated_dominator(&g, &full, 0, &half), Ok(None));

    let h = square("{1/2} u {1}");
    let d = condition_d_at(&g, &h);
    let w = d.violation().expect("D fails");
    assert_eq!(w.strategy, Some(half.clone()));
    assert!(dominator_set(&g, &h, 0, &half).set.intersect(h.factor(0)).is_empty());
    // C quantifies over all of G_i, so it fails here as well
    assert!(!condition_c_at(&g, &h).holds());
}

#[test]
fn undominated_dominators() {
    let f = fixture("fxf1.qg");
    let h = f.full_pairing();
    assert_eq!(
        find_undominated_dominator(&f, &h, 0, &label(&f, 0, "b")),
        Ok(Some(label(&f, 0, "a")))
    );
    assert!(matches!(
        find_undominated_dominator(&f, &h, 0, &label(&f, 0, "a")),
        Err(AnalysisError::PreconditionUnmet(..))
    ));
    let g = fixture("fx1.qg");
    assert_eq!(
        find_undominated_dominator(&g, &g.full_pairing(), 0, &pt("1/2")),
        Ok(Some(pt("1")))
    );
}

#[test]
fn maximal_element_examples() {
    let g = fixture("fx1.qg");
    let m = maximal_elements(&g);
    assert_eq!(m.to_json(&g), serde_json::json!([["1", "1"]]));
    let f = fixture("fxf1.qg");
    assert_eq!(
        maximal_elements(&f),
        MaximalElements::Profiles(vec![Profile::Labels(vec![0, 0])])
    );
    let r = restrict(&g, &square("{1/2}"));
    assert_eq!(maximal_elements(&r).to_json(&r), serde_json::json!([["1/2", "1/2"]]));
    let g5 = fixture("fx5-derived.qg");
    assert_eq!(maximal_elements(&g5).to_json(&g5), serde_json::json!([["1", "1"]]));
}

#[test]
fn maximal_region_cells_have_empty_preferences() {
    for name in ["fx1.qg", "fx4.qg", "fx5-derived.qg", "fx5-as-printed.qg"] {
        let g = fixture(name);
        let MaximalElements::Region(cells) = maximal_elements(&g) else {
            panic!()
        };
        let c = g.as_continuum().unwrap();
        for cell in &cells {
            let d = qualred_core::regions::Decomposition::new(&cell.factors, c.constants());
            for r in d.regions() {
                let x = d.sample(&r);
                if !cell.contains(&x) {
                    continue;
                }
                for i in 0..2 {
                    assert!(c.eval(Corr::Pref, i, &x).unwrap().is_empty(), "{name}");
                }
            }
        }
    }
    // FX4: P_1 is empty unless x1 ≤ 1 < x2, and P_2 unless x2 ≤ 1 < x1
    let g = fixture("fx4.qg");
    let json = maximal_elements(&g).to_json(&g);
    let text = json.to_string();
    assert!(text.contains("x1 in [0,1] and x2 in [0,1]"), "{text}");
    assert!(text.contains("x1 in (1,2] and x2 in (1,2]"), "{text}");
}

#[test]
fn preservation_on_fx1() {
    let g = fixture("fx1.qg");
    let t = star_reduce(&g, OperatorKind::Double, 10);
    let r = check_preservation(&g, &t);
    assert_eq!(r.label, PreservationLabel::Equal);

    let script = parse_path_script(&g, &fixture_text("singletons.path")).unwrap();
    let op = OperatorKind::Double;
    let t = run_path(&g, op, default_step_op(op), &script, PathMode::Audit, 10).unwrap();
    let r = check_preservation(&g, &t);
    assert_eq!(r.label, PreservationLabel::ExpectedCounterexample);
    assert_eq!(
        r.only_reduced,
        vec![Profile::Points(vec![qualred_intervalset::ratio(1, 2); 2])]
    );
    assert!(!r.trace_valid);
}

#[test]
fn z_star_examples() {
    // Q ≡ G
    let full: &[usize] = &[0, 1];
    let g = game2([[NONE; 4], [NONE; 4]], Some([[full; 4], [full; 4]]));
    assert_eq!(check_z_star(&g), Ok(Verdict::Holds));
    // Q_i(z) = {z_i}
    let g = game2(
        [[NONE; 4], [NONE; 4]],
        Some([[&[0], &[0], &[1], &[1]], [&[0], &[1], &[0], &[1]]]),
    );
    assert!(!check_z_star(&g).unwrap().holds());
    assert!(matches!(
        check_z_star(&fixture("fx4.qg")),
        Err(AnalysisError::ContinuumUnsupported(_))
    ));
}

#[test]
fn finite_hypotheses_are_exhaustive() {
    // Q_1(x) = {a, c}-style gaps break contiguity
    let labels = vec![
        vec!["l".to_string(), "m".into(), "r".into()],
        vec!["u".to_string(), "v".into()],
    ];
    let s = |v: &[usize], n| LabelSet::from_indices(n, v.iter().copied());
    let pref = vec![
        FiniteCorrespondence {
            owner: 0,
            table: vec![s(&[], 3); 6],
        },
        FiniteCorrespondence {
            owner: 1,
            table: vec![s(&[], 2); 6],
        },
    ];
    let mut q1 = vec![s(&[0, 1, 2], 3); 6];
    q1[3] = s(&[0, 2], 3);
    let comp = vec![
        FiniteCorrespondence { owner: 0, table: q1 },
        FiniteCorrespondence {
            owner: 1,
            table: vec![s(&[0, 1], 2); 6],
        },
    ];
    let g = QualitativeGame::finite("gap", FiniteGame::new(labels, Some(pref), Some(comp), None).unwrap());
    let v = check_hypothesis(&g, Hypothesis::QClosedConvex);
    let w = v.violation().unwrap();
    assert_eq!(w.strategy, Some(Strategy::Label(1)));
    // profile 3 is (m, v), which holds m ∉ Q_1
    assert_eq!(w.profile, Some(Profile::Labels(vec![1, 1])));
    assert!(!check_hypothesis(&g, Hypothesis::QReflexive).holds());
}

#[test]
fn random_points_stay_inside() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let s = set("(0,1/3) u {1/2} u (2/3,1]");
    for _ in 0..500 {
        let p: Rational = random_point(&mut rng, &s);
        assert!(s.contains(&p));
    }
}
