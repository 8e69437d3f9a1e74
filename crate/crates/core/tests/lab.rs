mod common;

use common::*;
use qualred_core::analysis::{check_hypothesis, check_preservation, Hypothesis, PreservationLabel};
use qualred_core::engine::{dominator_set, eliminated_region, OperatorKind};
use qualred_core::lab::{
    discretize, enumerate_maximal_reductions, fuzz, generate_game, grid_value, trial_seed, Check, Constraints,
    FuzzConfig, GenMode, GeneratorConfig, LabError, Outcome, QMode,
};
use qualred_core::reduction::star_reduce;
use qualred_core::{serialize_game, Pairing, Strategy, StrategySet};
use qualred_intervalset::{ratio, IntervalSet};

fn names(game: &qualred_core::QualitativeGame, i: usize, set: &qualred_core::LabelSet) -> Vec<String> {
    let g = game.as_finite().unwrap();
    set.iter().map(|k| g.labels(i)[k].clone()).collect()
}

#[test]
fn fx1_on_the_half_grid() {
    let d = discretize(&fixture("fx1.qg"), &ratio(1, 2)).unwrap();
    let g = d.as_finite().unwrap();
    assert_eq!(g.labels(0), ["0", "1/2", "1"]);
    for y in 0..3 {
        assert_eq!(names(&d, 0, g.pref(0, g.flat(&[0, y]))), ["1/2", "1"]);
        assert_eq!(names(&d, 0, g.pref(0, g.flat(&[1, y]))), ["1"]);
        assert!(g.pref(0, g.flat(&[2, y])).is_empty());
    }
}

#[test]
fn fx5_tenth_grid_one_dominates_nothing() {
    let d = discretize(&fixture("fx5-derived.qg"), &ratio(1, 10)).unwrap();
    let g = d.as_finite().unwrap();
    assert_eq!(g.size(0), 11);
    let one = d.parse_strategy(0, "1").unwrap();
    let Strategy::Label(k) = one else { panic!() };
    for x in 0..11 {
        if x != k {
            let dom = dominator_set(&d, &d.full_pairing(), 0, &Strategy::Label(x)).set;
            assert!(!dom.as_labels().unwrap().contains(k));
        }
    }
}

#[test]
fn grid_must_divide_the_span() {
    assert!(matches!(
        discretize(&fixture("fx1.qg"), &ratio(2, 3)),
        Err(LabError::Grid(..))
    ));
    // a step spanning the whole carrier keeps the endpoints and every constant
    let d = discretize(&fixture("fx4.qg"), &ratio(2, 1)).unwrap();
    assert_eq!(d.as_finite().unwrap().labels(0), ["0", "1", "2"]);
}

#[test]
fn grid_fixtures_match_discretize() {
    for (fixture_name, grid_name, step) in [
        ("fx1.qg", "fx1-grid-half.qg", ratio(1, 2)),
        ("fx4.qg", "fx4-grid-one.qg", ratio(1, 1)),
        ("fx5-derived.qg", "fx5-derived-grid-half.qg", ratio(1, 2)),
    ] {
        let d = discretize(&fixture(fixture_name), &step).unwrap();
        assert_eq!(d.as_finite(), fixture(grid_name).as_finite(), "{grid_name}");
    }
}

#[test]
fn fxf1_has_one_maximal_reduction() {
    let g = fixture("fxf1.qg");
    for op in OperatorKind::ALL {
        let r = enumerate_maximal_reductions(&g, op, 16).unwrap();
        assert_eq!(
            r.limits,
            vec![Pairing::new(vec![labels(&g, 0, &["a"]), labels(&g, 1, &["c"])])]
        );
    }
}

#[test]
fn fx5_half_grid_under_double() {
    // Only 0 is dominated on the 3-point grid, so every order ends at {1/2, 1}².
    let d = discretize(&fixture("fx5-derived.qg"), &ratio(1, 2)).unwrap();
    let r = enumerate_maximal_reductions(&d, OperatorKind::Double, 16).unwrap();
    assert_eq!(
        r.limits,
        vec![Pairing::new(vec![
            labels(&d, 0, &["1/2", "1"]),
            labels(&d, 1, &["1/2", "1"])
        ])]
    );
    assert_eq!(star_reduce(&d, OperatorKind::Double, 10).limit(), &r.limits[0]);
}

#[test]
fn oracle_bound() {
    let d = discretize(&fixture("fx1.qg"), &ratio(1, 10)).unwrap();
    assert_eq!(
        enumerate_maximal_reductions(&d, OperatorKind::Double, 16),
        Err(LabError::BoundExceeded {
            profiles: 121,
            bound: 16
        })
    );
    assert!(matches!(
        enumerate_maximal_reductions(&fixture("fx1.qg"), OperatorKind::Double, 16),
        Err(LabError::NotFinite(_))
    ));
}

#[test]
fn fx4_grid_z_star() {
    let d = discretize(&fixture("fx4.qg"), &ratio(1, 1)).unwrap();
    assert!(check_hypothesis(&d, Hypothesis::ZStar).holds());
}

#[test]
fn fx1_grid_limits() {
    for step in [ratio(1, 10), ratio(1, 100)] {
        let d = discretize(&fixture("fx1.qg"), &step).unwrap();
        let t = star_reduce(&d, OperatorKind::Double, 10);
        assert_eq!(
            t.limit(),
            &Pairing::new(vec![labels(&d, 0, &["1"]), labels(&d, 1, &["1"])])
        );
    }
}

/// Dominator-level containment: a symbolic dominator at a grid point that
/// lies on the grid still dominates there.
#[test]
fn grid_dominators_contain_symbolic_ones() {
    for name in [
        "fx1.qg",
        "fx4.qg",
        "fx5-derived.qg",
        "fx5-as-printed.qg",
        "fx1-closure.qg",
    ] {
        let g = fixture(name);
        let d = discretize(&g, &ratio(1, 10)).unwrap();
        let fg = d.as_finite().unwrap();
        for i in 0..2 {
            let grid = IntervalSet::points(fg.labels(i).iter().map(|l| grid_value(l)));
            for (k, l) in fg.labels(i).iter().enumerate() {
                let sym = dominator_set(&g, &g.full_pairing(), i, &Strategy::Point(grid_value(l))).set;
                let StrategySet::Reals(sym) = sym else { panic!() };
                let on_grid = sym.intersect(&grid);
                let found = dominator_set(&d, &d.full_pairing(), i, &Strategy::Label(k)).set;
                let found =
                    IntervalSet::points(found.as_labels().unwrap().iter().map(|j| grid_value(&fg.labels(i)[j])));
                assert!(on_grid.is_subset(&found), "{name} player {} at {l}", i + 1);
            }
        }
    }
}

#[test]
fn fx1_eliminations_on_the_grid() {
    let g = fixture("fx1.qg");
    let d = discretize(&g, &ratio(1, 10)).unwrap();
    let removed = eliminated_region(&d, &d.full_pairing(), 0, OperatorKind::Double);
    let all_but_one: Vec<&str> = d.as_finite().unwrap().labels(0)[..10]
        .iter()
        .map(String::as_str)
        .collect();
    assert_eq!(removed, labels(&d, 0, &all_but_one));
}

#[test]
fn generator_is_deterministic() {
    let cfg = GeneratorConfig::new(vec![3, 3], 7, GenMode::UtilityDerived);
    let a = serialize_game(&generate_game(&cfg).unwrap());
    assert_eq!(a, serialize_game(&generate_game(&cfg).unwrap()));
    let other = GeneratorConfig { seed: 8, ..cfg.clone() };
    assert_ne!(a, serialize_game(&generate_game(&other).unwrap()));
    // a serialized game parses back to the same game
    let g = generate_game(&cfg).unwrap();
    assert_eq!(qualred_core::parse_game(&a).unwrap().as_finite(), g.as_finite());
}

#[test]
fn generator_constraints_are_verified() {
    for seed in 0..20 {
        for mode in [GenMode::UtilityDerived, GenMode::RawPreference] {
            let mut cfg = GeneratorConfig::new(vec![3, 2, 2], seed, mode);
            cfg.q = QMode::Random;
            cfg.constraints = Constraints {
                irreflexive: true,
                property_t_pair: true,
                q_reflexive: true,
            };
            let g = generate_game(&cfg).unwrap();
            for h in [
                Hypothesis::Irreflexive,
                Hypothesis::PropertyTPair,
                Hypothesis::QReflexive,
            ] {
                assert!(check_hypothesis(&g, h).holds(), "seed {seed} {h:?}");
            }
        }
    }
    let mut bad = GeneratorConfig::new(vec![2, 2], 0, GenMode::RawPreference);
    bad.q = QMode::UpperContour;
    assert!(matches!(generate_game(&bad), Err(LabError::Config(_))));
}

#[test]
fn utility_derived_p_is_strict_improvement() {
    let g = generate_game(&GeneratorConfig::new(vec![3, 3], 11, GenMode::UtilityDerived)).unwrap();
    let f = g.as_finite().unwrap();
    for i in 0..2 {
        for p in 0..9 {
            let x = f.unflat(p);
            for y in 0..3 {
                let mut z = x.clone();
                z[i] = y;
                assert_eq!(
                    f.pref(i, p).contains(y),
                    f.utility(i, f.flat(&z)).unwrap() > f.utility(i, p).unwrap()
                );
            }
        }
    }
}

/// Upper-contour Q makes property T, Q reflexivity and z* hold, so
/// preservation must come out EQUAL with a nontrivial P.
#[test]
fn upper_contour_games_preserve_maximal_elements() {
    let mut nontrivial = 0;
    for seed in 0..40 {
        let mut cfg = GeneratorConfig::new(vec![3, 3], seed, GenMode::UtilityDerived);
        cfg.q = QMode::UpperContour;
        let g = generate_game(&cfg).unwrap();
        let t = star_reduce(&g, OperatorKind::Double, 100);
        if t.stages.len() > 1 {
            nontrivial += 1;
        }
        let r = check_preservation(&g, &t);
        assert_eq!(r.label, PreservationLabel::Equal, "seed {seed}");
    }
    assert!(nontrivial > 0);
}

#[test]
fn trial_seeds_are_stable() {
    assert_eq!(trial_seed(42, 3), trial_seed(42, 3));
    assert_ne!(trial_seed(42, 3), trial_seed(42, 4));
    assert_ne!(trial_seed(42, 3), trial_seed(43, 3));
}

#[test]
fn fuzz_finds_no_c_without_d() {
    let cfg = FuzzConfig::new(GeneratorConfig::new(vec![3, 3], 42, GenMode::UtilityDerived), 500);
    let r = fuzz(&cfg).unwrap();
    assert_eq!(r.trials.len(), 500);
    assert_eq!(r.violations(Check::CImpliesD), 0);
    assert_eq!(r, fuzz(&cfg).unwrap());
    let csv = r.to_csv();
    assert_eq!(csv.lines().count(), 501);
    assert!(csv.starts_with(
        "trial,seed,tail_limit,double_limit,maximal_reductions,lemma1,lemma2,theorem3,sequence,theorem10"
    ));
}

#[test]
fn findings_replay_from_their_seed() {
    let mut g = GeneratorConfig::new(vec![3, 3], 5, GenMode::RawPreference);
    g.constraints.irreflexive = true;
    let cfg = FuzzConfig::new(g.clone(), 200);
    let r = fuzz(&cfg).unwrap();
    for f in &r.findings {
        let replay = generate_game(&GeneratorConfig {
            seed: f.seed,
            ..g.clone()
        })
        .unwrap();
        assert_eq!(serialize_game(&replay), f.game);
        let (outcome, _) = qualred_core::lab::run_check(&replay, f.check, &cfg);
        assert_eq!(outcome, Outcome::Violation);
        let shrunk = qualred_core::parse_game(&f.shrunk).unwrap();
        assert_eq!(
            qualred_core::lab::run_check(&shrunk, f.check, &cfg).0,
            Outcome::Violation
        );
    }
}
