//! Fast steps, star reductions, scripted elimination paths and traces.

use std::fmt;

use qualred_intervalset::IntervalSet;
use serde_json::{json, Value};
use thiserror::Error;

pub use crate::engine::OperatorKind;
use crate::engine::{condition_set, eliminated_region};
use crate::gamespec::{pairing_to_json, QualitativeGame};
use crate::sets::{LabelSet, Pairing, Strategy, StrategySet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TraceStatus {
    /// A step removed nothing.
    Converged,
    /// The iteration limit was reached first.
    Capped,
    /// Some player's set became empty.
    Vacuous,
}

impl TraceStatus {
    pub fn name(self) -> &'static str {
        match self {
            TraceStatus::Converged => "CONVERGED",
            TraceStatus::Capped => "CAPPED",
            TraceStatus::Vacuous => "VACUOUS",
        }
    }
}

impl fmt::Display for TraceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A strategy picked out by a check, with the player owning it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub player: usize,
    pub strategy: Strategy,
    pub note: String,
}

/// Whether a step satisfies the literal fast condition of its operator,
/// evaluated on the pairing it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FastAudit {
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    /// True for steps read from a path script.
    pub scripted: bool,
    /// Operator whose condition the step was validated or built with.
    pub step_op: OperatorKind,
    /// For scripted steps kept in audit mode: the first invalid removal.
    pub violation: Option<Witness>,
    pub fast_audit: FastAudit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub op: OperatorKind,
    pub stages: Vec<Pairing>,
    /// `eliminated[t][i] = stages[t]_i \ stages[t+1]_i`.
    pub eliminated: Vec<Vec<StrategySet>>,
    pub steps: Vec<StepRecord>,
    pub status: TraceStatus,
}

impl ReductionTrace {
    pub fn limit(&self) -> &Pairing {
        self.stages.last().expect("a trace has at least one stage")
    }

    /// True when every scripted step passed validation.
    pub fn is_valid_path(&self) -> bool {
        self.steps.iter().all(|s| s.violation.is_none())
    }

    /// Structural invariants: starts at the full pairing, descends, and the
    /// eliminated sets are the stage differences.
    pub fn check_structure(&self, game: &QualitativeGame) -> Result<(), String> {
        if self.stages.first() != Some(&game.full_pairing()) {
            return Err("stage 0 is not the full pairing".into());
        }
        if self.eliminated.len() + 1 != self.stages.len() || self.steps.len() != self.eliminated.len() {
            return Err("bookkeeping lengths disagree".into());
        }
        for (t, w) in self.stages.windows(2).enumerate() {
            if !w[1].is_subset(&w[0]) {
                return Err(format!("stage {} is not inside stage {t}", t + 1));
            }
            if w[0].minus(&w[1]) != self.eliminated[t] {
                return Err(format!("eliminated sets at step {t} do not match the stages"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, game: &QualitativeGame) -> Value {
        let witness = |w: &Option<Witness>| -> Value {
            match w {
                None => Value::Null,
                Some(w) => json!({
                    "player": w.player + 1,
                    "strategy": game.render_strategy(w.player, &w.strategy),
                    "note": w.note,
                }),
            }
        };
        json!({
            "op": self.op.name(),
            "status": self.status.name(),
            "stages": self.stages.iter().map(|h| pairing_to_json(game, h)).collect::<Vec<_>>(),
            "eliminated": self.eliminated.iter().map(|e| {
                pairing_to_json(game, &Pairing::new(e.clone()))
            }).collect::<Vec<_>>(),
            "steps": self.steps.iter().map(|s| json!({
                "scripted": s.scripted,
                "step_op": s.step_op.name(),
                "violation": witness(&s.violation),
                "fast_condition": {
                    "holds": s.fast_audit.holds,
                    "witness": witness(&s.fast_audit.witness),
                },
            })).collect::<Vec<_>>(),
            "limit": pairing_to_json(game, self.limit()),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid removal of {rendered} for player {}: {reason}", player + 1)]
    InvalidRemoval {
        player: usize,
        strategy: Strategy,
        rendered: String,
        reason: String,
    },
    #[error("removal for player {} is not inside the current pairing", player + 1)]
    NotInPairing { player: usize },
    #[error("path script line {line}: {message}")]
    Script { line: usize, message: String },
}

/// Literal fast condition of `op` for the step `from → to`: every removed
/// strategy meets the elimination condition and no survivor does. `→`
/// tests against `from`, `⇒` and `↣` against `to`.
pub fn audit_fast(game: &QualitativeGame, from: &Pairing, to: &Pairing, op: OperatorKind) -> FastAudit {
    for i in 0..game.players() {
        let removed = from.factor(i).difference(to.factor(i));
        let survivors = to.factor(i);
        let (opp, pool) = match op {
            OperatorKind::Arrow => (from, None),
            OperatorKind::Tail => (to, None),
            OperatorKind::Double => (to, Some(to.factor(i))),
        };
        let ok = condition_set(game, opp, i, &removed, pool);
        if let Some(x) = removed.difference(&ok).representative() {
            return FastAudit {
                holds: false,
                witness: Some(Witness {
                    player: i,
                    strategy: x,
                    note: "removed strategy fails the condition".into(),
                }),
            };
        }
        let bad = condition_set(game, opp, i, survivors, pool);
        if let Some(x) = bad.representative() {
            return FastAudit {
                holds: false,
                witness: Some(Witness {
                    player: i,
                    strategy: x,
                    note: "surviving strategy meets the condition".into(),
                }),
            };
        }
    }
    FastAudit {
        holds: true,
        witness: None,
    }
}

/// Removes every player's eliminated region at once.
pub fn fast_step(game: &QualitativeGame, h: &Pairing, op: OperatorKind) -> (Pairing, Vec<StrategySet>, FastAudit) {
    let removed: Vec<StrategySet> = (0..game.players()).map(|i| eliminated_region(game, h, i, op)).collect();
    let next = h.without(&removed);
    let audit = audit_fast(game, h, &next, op);
    (next, removed, audit)
}

fn continue_fast(game: &QualitativeGame, trace: &mut ReductionTrace, max_iters: usize) {
    let mut fast_steps = 0;
    loop {
        let h = trace.limit().clone();
        if h.any_empty() {
            trace.status = TraceStatus::Vacuous;
            return;
        }
        let (next, removed, audit) = fast_step(game, &h, trace.op);
        if removed.iter().all(StrategySet::is_empty) {
            trace.status = TraceStatus::Converged;
            return;
        }
        if fast_steps >= max_iters {
            trace.status = TraceStatus::Capped;
            return;
        }
        trace.stages.push(next);
        trace.eliminated.push(removed);
        trace.steps.push(StepRecord {
            scripted: false,
            step_op: trace.op,
            violation: None,
            fast_audit: audit,
        });
        fast_steps += 1;
    }
}

/// Iterates fast steps of `op` from the full pairing.
pub fn star_reduce(game: &QualitativeGame, op: OperatorKind, max_iters: usize) -> ReductionTrace {
    let mut trace = ReductionTrace {
        op,
        stages: vec![game.full_pairing()],
        eliminated: Vec::new(),
        steps: Vec::new(),
        status: TraceStatus::Converged,
    };
    continue_fast(game, &mut trace, max_iters.max(1));
    trace
}

/// Applies a requested removal after checking each removed strategy against
/// `op`'s elimination condition: `→` over the pre-step opponents, `↣` over
/// the post-step opponents, `⇒` over the post-step opponents with a
/// surviving dominator.
pub fn path_step(
    game: &QualitativeGame,
    h: &Pairing,
    op: OperatorKind,
    removal: &[StrategySet],
) -> Result<Pairing, ReductionError> {
    for (i, r) in removal.iter().enumerate() {
        if !r.is_subset(h.factor(i)) {
            return Err(ReductionError::NotInPairing { player: i });
        }
    }
    let next = h.without(removal);
    for (i, r) in removal.iter().enumerate() {
        if r.is_empty() {
            continue;
        }
        let (opp, pool, reason) = match op {
            OperatorKind::Arrow => (h, None, "no dominator over the pre-step opponents"),
            OperatorKind::Tail => (&next, None, "no dominator over the post-step opponents"),
            OperatorKind::Double => (
                &next,
                Some(next.factor(i)),
                "no surviving dominator over the post-step opponents",
            ),
        };
        let ok = condition_set(game, opp, i, r, pool);
        if let Some(x) = r.difference(&ok).representative() {
            return Err(ReductionError::InvalidRemoval {
                player: i,
                rendered: game.render_strategy(i, &x),
                strategy: x,
                reason: reason.into(),
            });
        }
    }
    Ok(next)
}

/// No player has anything left to eliminate under `op`.
pub fn is_maximal(game: &QualitativeGame, h: &Pairing, op: OperatorKind) -> bool {
    (0..game.players()).all(|i| eliminated_region(game, h, i, op).is_empty())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// An invalid scripted step aborts the run.
    Strict,
    /// Invalid scripted steps are applied anyway and recorded.
    Audit,
}

/// Operator used to validate scripted steps of an `op` trace. The `⇒*`
/// chain is built from `→` steps, so `⇒` paths are validated with `→`.
pub fn default_step_op(op: OperatorKind) -> OperatorKind {
    match op {
        OperatorKind::Arrow | OperatorKind::Double => OperatorKind::Arrow,
        OperatorKind::Tail => OperatorKind::Tail,
    }
}

/// Runs the scripted removals, then fast steps of `op` to a fixpoint.
pub fn run_path(
    game: &QualitativeGame,
    op: OperatorKind,
    step_op: OperatorKind,
    script: &[Vec<StrategySet>],
    mode: PathMode,
    max_iters: usize,
) -> Result<ReductionTrace, ReductionError> {
    let mut trace = ReductionTrace {
        op,
        stages: vec![game.full_pairing()],
        eliminated: Vec::new(),
        steps: Vec::new(),
        status: TraceStatus::Converged,
    };
    for removal in script {
        let h = trace.limit().clone();
        let clipped: Vec<StrategySet> = removal.iter().zip(h.factors()).map(|(r, f)| r.intersect(f)).collect();
        let (next, violation) = match path_step(game, &h, step_op, &clipped) {
            Ok(next) => (next, None),
            Err(e) if mode == PathMode::Strict => return Err(e),
            Err(ReductionError::InvalidRemoval {
                player,
                strategy,
                reason,
                ..
            }) => (
                h.without(&clipped),
                Some(Witness {
                    player,
                    strategy,
                    note: reason,
                }),
            ),
            Err(e) => return Err(e),
        };
        let audit = audit_fast(game, &h, &next, step_op);
        trace.eliminated.push(h.minus(&next));
        trace.stages.push(next);
        trace.steps.push(StepRecord {
            scripted: true,
            step_op,
            violation,
            fast_audit: audit,
        });
    }
    continue_fast(game, &mut trace, max_iters.max(1));
    Ok(trace)
}

/// Reads a path script against `game`. Each non-comment line reads
/// `step: player=1 remove=[0,1/2) ; player=2 remove={0}`; finite players
/// list labels, as in `remove={b, c}`.
pub fn parse_path_script(game: &QualitativeGame, text: &str) -> Result<Vec<Vec<StrategySet>>, ReductionError> {
    let mut steps = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| ReductionError::Script { line, message };
        let rest = body
            .strip_prefix("step:")
            .ok_or_else(|| err("expected `step:`".into()))?;
        let mut removal: Vec<StrategySet> = (0..game.players()).map(|i| game.empty_set(i)).collect();
        for clause in rest.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (player, set) = clause
                .strip_prefix("player=")
                .and_then(|c| c.split_once(char::is_whitespace))
                .ok_or_else(|| err(format!("expected `player=K remove=SET`, found `{clause}`")))?;
            let i: usize = player
                .parse()
                .ok()
                .filter(|p| (1..=game.players()).contains(p))
                .ok_or_else(|| err(format!("unknown player `{player}`")))?;
            let set = set
                .trim()
                .strip_prefix("remove=")
                .ok_or_else(|| err("expected `remove=`".into()))?;
            let parsed = parse_strategy_set(game, i - 1, set).map_err(err)?;
            removal[i - 1] = removal[i - 1].union(&parsed);
        }
        steps.push(removal);
    }
    Ok(steps)
}

/// A set literal for player `i`: interval grammar or a label list.
pub fn parse_strategy_set(game: &QualitativeGame, i: usize, text: &str) -> Result<StrategySet, String> {
    let text = text.trim();
    match game.as_finite() {
        None => text
            .parse::<IntervalSet>()
            .map(StrategySet::Reals)
            .map_err(|e| format!("bad set `{text}`: {}", e.message)),
        Some(g) => {
            if text == "empty" {
                return Ok(StrategySet::Labels(LabelSet::empty(g.size(i))));
            }
            let inner = text
                .strip_prefix('{')
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(|| format!("expected `{{label, ...}}`, found `{text}`"))?;
            let mut set = LabelSet::empty(g.size(i));
            for name in inner.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty()) {
                let k = g
                    .labels(i)
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| format!("unknown label `{name}`"))?;
                set.insert(k);
            }
            Ok(StrategySet::Labels(set))
        }
    }
}
