#![allow(dead_code)]

use qualred_core::gamespec::QualitativeGame;
use qualred_core::{parse_game, Pairing, Strategy, StrategySet};
use qualred_intervalset::IntervalSet;

pub fn fixture(name: &str) -> QualitativeGame {
    let path = qualred_core::fixture_dir().join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_game(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(qualred_core::fixture_dir().join(name)).unwrap()
}

pub fn set(text: &str) -> IntervalSet {
    text.parse().unwrap()
}

pub fn reals(text: &str) -> StrategySet {
    StrategySet::Reals(set(text))
}

pub fn pt(text: &str) -> Strategy {
    Strategy::Point(qualred_intervalset::parse_rational(text).unwrap())
}

pub fn square(text: &str) -> Pairing {
    Pairing::new(vec![reals(text), reals(text)])
}

/// Labels of player `i` named in `names`.
pub fn labels(game: &QualitativeGame, i: usize, names: &[&str]) -> StrategySet {
    let g = game.as_finite().unwrap();
    let mut s = qualred_core::LabelSet::empty(g.size(i));
    for n in names {
        s.insert(g.labels(i).iter().position(|l| l == n).unwrap());
    }
    StrategySet::Labels(s)
}

pub fn label(game: &QualitativeGame, i: usize, name: &str) -> Strategy {
    game.parse_strategy(i, name).unwrap()
}
