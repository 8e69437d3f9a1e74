//! JSON views of games and pairings. Rationals and sets are strings.

use qualred_intervalset::format_rational;
use serde_json::{json, Map, Value};

use super::{Backend, Corr, QualitativeGame};
use crate::sets::{Pairing, StrategySet};

pub fn set_to_json(game: &QualitativeGame, i: usize, s: &StrategySet) -> Value {
    Value::String(game.render_set(i, s))
}

/// `{"1": "{1}", "2": "[0,1)"}` keyed by 1-based player number.
pub fn pairing_to_json(game: &QualitativeGame, h: &Pairing) -> Value {
    let mut m = Map::new();
    for (i, f) in h.factors().iter().enumerate() {
        m.insert((i + 1).to_string(), set_to_json(game, i, f));
    }
    Value::Object(m)
}

pub fn game_to_json(game: &QualitativeGame) -> Value {
    match &game.backend {
        Backend::Finite(g) => {
            let table = |corr: Corr| -> Option<Value> {
                g.corr(corr, 0, 0)?;
                Some(Value::Array(
                    (0..g.players())
                        .map(|i| {
                            Value::Array(
                                (0..g.profile_count())
                                    .map(|f| {
                                        let s = g.corr(corr, i, f).expect("checked above");
                                        json!({
                                            "at": g.unflat(f).iter().enumerate()
                                                .map(|(j, k)| g.labels(j)[*k].clone())
                                                .collect::<Vec<_>>(),
                                            "value": s.iter().map(|k| g.labels(i)[k].clone())
                                                .collect::<Vec<_>>(),
                                        })
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                ))
            };
            let utils = g.util_tables().map(|u| {
                u.iter()
                    .map(|t| t.table.iter().map(format_rational).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            });
            json!({
                "name": game.name,
                "backend": "finite",
                "players": g.players(),
                "spaces": (0..g.players()).map(|i| g.labels(i).to_vec()).collect::<Vec<_>>(),
                "pref": table(Corr::Pref),
                "comp": table(Corr::Comp),
                "util": utils,
            })
        }
        Backend::Continuum(g) => {
            let corr = |c: Corr| -> Option<Value> {
                g.correspondence(c, 0)?;
                Some(Value::Array(
                    (0..g.players())
                        .map(|i| {
                            let pieces = &g.correspondence(c, i).expect("checked above").pieces;
                            Value::Array(
                                pieces
                                    .iter()
                                    .map(|p| {
                                        json!({
                                            "cell": p.cell.describe(),
                                            "value": super::dsl_value(&p.value),
                                        })
                                    })
                                    .collect(),
                            )
                        })
                        .collect(),
                ))
            };
            json!({
                "name": game.name,
                "backend": "continuum",
                "players": g.players(),
                "spaces": g.spaces().iter().map(ToString::to_string).collect::<Vec<_>>(),
                "pref": corr(Corr::Pref),
                "comp": corr(Corr::Comp),
            })
        }
    }
}
