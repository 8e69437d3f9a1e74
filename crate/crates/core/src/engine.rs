//! Strict dominance over a pairing, dominator sets, and restrictions.

use std::fmt;
use std::str::FromStr;

use qualred_intervalset::{midpoint, IntervalSet, Rational};
use serde::{Deserialize, Serialize};

use crate::gamespec::{
    Backend, Cell, ContinuumGame, Corr, EndpointExpr, FiniteCorrespondence, FiniteGame, QualitativeGame, RelOp,
    SymbolicValue, UtilityTable,
};
use crate::regions::Decomposition;
use crate::sets::{LabelSet, Pairing, Strategy, StrategySet};
use qualred_intervalset::Boundary;

/// The three reduction families: `→`, `⇒` and `↣`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// Dominated over the pre-step opponents, dominator anywhere.
    Arrow,
    /// Dominated over the post-step opponents by a surviving strategy.
    Double,
    /// Dominated over the post-step opponents, dominator anywhere.
    Tail,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [OperatorKind::Arrow, OperatorKind::Double, OperatorKind::Tail];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Arrow => "arrow",
            OperatorKind::Double => "double",
            OperatorKind::Tail => "tail",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "arrow" => Ok(OperatorKind::Arrow),
            "double" => Ok(OperatorKind::Double),
            "tail" => Ok(OperatorKind::Tail),
            other => Err(format!("unknown operator `{other}` (expected arrow, double or tail)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DominatorSet {
    pub player: usize,
    pub base: Strategy,
    pub set: StrategySet,
}

/// `{ y_i : y_i ∈ P_i(x_i, x_-i) for every x_-i ∈ H_-i }`.
///
/// When some opponent factor of `h` is empty the intersection ranges over
/// nothing and the result is all of `G_i`; [`dominates`] still answers
/// false in that case.
pub fn dominator_set(game: &QualitativeGame, h: &Pairing, i: usize, x: &Strategy) -> DominatorSet {
    let set = match (&game.backend, x) {
        (Backend::Finite(g), Strategy::Label(k)) => StrategySet::Labels(finite_dominators(g, h, i, *k)),
        (Backend::Continuum(g), Strategy::Point(p)) => {
            let opp = reals(h);
            StrategySet::Reals(continuum_dominators(g, &opp, i, p))
        }
        _ => panic!("strategy does not match the game's backend"),
    };
    DominatorSet {
        player: i,
        base: x.clone(),
        set,
    }
}

pub fn dominates(game: &QualitativeGame, h: &Pairing, i: usize, y: &Strategy, x: &Strategy) -> bool {
    !h.opponents_vacant(i) && dominator_set(game, h, i, x).set.contains(y)
}

fn reals(h: &Pairing) -> Vec<IntervalSet> {
    h.factors()
        .iter()
        .map(|f| f.as_reals().expect("pairing matches a continuum game").clone())
        .collect()
}

fn labels(h: &Pairing) -> Vec<LabelSet> {
    h.factors()
        .iter()
        .map(|f| f.as_labels().expect("pairing matches a finite game").clone())
        .collect()
}

fn finite_dominators(g: &FiniteGame, h: &Pairing, i: usize, k: usize) -> LabelSet {
    let mut sets = labels(h);
    sets[i] = LabelSet::from_indices(g.size(i), [k]);
    let mut acc = LabelSet::full(g.size(i));
    for f in g.product(&sets) {
        acc.intersect_with(g.pref(i, f));
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn clip(set: &IntervalSet, op: RelOp, c: &Rational) -> IntervalSet {
    match op {
        RelOp::Lt => set.clip_below(c, false),
        RelOp::Le => set.clip_below(c, true),
        RelOp::Eq => set.clip_below(c, true).clip_above(c, true),
        RelOp::Ge => set.clip_above(c, true),
        RelOp::Gt => set.clip_above(c, false),
    }
}

fn flip(op: RelOp) -> RelOp {
    match op {
        RelOp::Lt => RelOp::Gt,
        RelOp::Le => RelOp::Ge,
        RelOp::Eq => RelOp::Eq,
        RelOp::Ge => RelOp::Le,
        RelOp::Gt => RelOp::Lt,
    }
}

/// Per-coordinate range of `cell ∩ ({x_i} × h_-i)`, or `None` when that
/// slice is empty. Entry `i` is `{x_i}`.
pub(crate) fn slice_projection(cell: &Cell, h: &[IntervalSet], i: usize, xi: &Rational) -> Option<Vec<IntervalSet>> {
    if !cell.factors[i].contains(xi) {
        return None;
    }
    let mut f: Vec<IntervalSet> = cell.factors.iter().zip(h).map(|(a, b)| a.intersect(b)).collect();
    f[i] = IntervalSet::point(xi.clone());
    let mut residual = Vec::new();
    for r in &cell.relations {
        if r.left == i {
            f[r.right] = clip(&f[r.right], flip(r.op), xi);
        } else if r.right == i {
            f[r.left] = clip(&f[r.left], r.op, xi);
        } else {
            residual.push(r);
        }
    }
    if f.iter().any(IntervalSet::is_empty) {
        return None;
    }
    if residual.is_empty() {
        return Some(f);
    }
    let d = Decomposition::new(&f, []);
    let mut proj = vec![IntervalSet::empty(); f.len()];
    for r in d.regions() {
        let s = d.sample(&r);
        if residual.iter().all(|rel| rel.holds(&s)) {
            for (v, a) in r.atoms.iter().enumerate() {
                proj[v] = proj[v].union(&d.atom_set(*a));
            }
        }
    }
    (!proj[0].is_empty()).then_some(proj)
}

/// Lower boundary of `∩_s (e(s), ...` over the slice: a coordinate endpoint
/// becomes the supremum of its range, closed unless that supremum is attained
/// under an open bracket.
fn lower(e: &EndpointExpr, closed: bool, proj: &[IntervalSet]) -> Boundary {
    match e {
        EndpointExpr::Const(c) => Boundary::new(c.clone(), closed),
        EndpointExpr::Coord(j) => {
            let (s, attained) = proj[*j].sup().expect("slice is nonempty");
            Boundary::new(s, closed || !attained)
        }
    }
}

fn upper(e: &EndpointExpr, closed: bool, proj: &[IntervalSet]) -> Boundary {
    match e {
        EndpointExpr::Const(c) => Boundary::new(c.clone(), closed),
        EndpointExpr::Coord(j) => {
            let (s, attained) = proj[*j].inf().expect("slice is nonempty");
            Boundary::new(s, closed || !attained)
        }
    }
}

pub(crate) fn continuum_dominators(g: &ContinuumGame, h: &[IntervalSet], i: usize, xi: &Rational) -> IntervalSet {
    let mut acc = g.space(i).clone();
    if h.iter().enumerate().any(|(j, s)| j != i && s.is_empty()) {
        return acc;
    }
    let corr = g.correspondence(Corr::Pref, i).expect("P is always present");
    for piece in &corr.pieces {
        let Some(proj) = slice_projection(&piece.cell, h, i, xi) else {
            continue;
        };
        let value = match &piece.value {
            SymbolicValue::Empty => IntervalSet::empty(),
            SymbolicValue::Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            } => IntervalSet::from_bounds(lower(lo, *lo_closed, &proj), upper(hi, *hi_closed, &proj)),
        };
        acc = acc.intersect(&value);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// `{ x ∈ candidates : D_opp(x) ∩ pool ≠ ∅ }` with `D_opp` the dominator
/// set over `opp_-i`; `pool = None` means no restriction on the dominator.
/// Empty when some opponent factor of `opp` is empty.
pub fn condition_set(
    game: &QualitativeGame,
    opp: &Pairing,
    i: usize,
    candidates: &StrategySet,
    pool: Option<&StrategySet>,
) -> StrategySet {
    if opp.opponents_vacant(i) {
        return candidates.emptied();
    }
    match &game.backend {
        Backend::Finite(g) => {
            let cand = candidates.as_labels().expect("finite candidates");
            let pool = pool.map(|p| p.as_labels().expect("finite pool"));
            StrategySet::Labels(LabelSet::from_indices(
                g.size(i),
                cand.iter().filter(|k| {
                    let d = finite_dominators(g, opp, i, *k);
                    match pool {
                        Some(p) => !d.is_disjoint(p),
                        None => !d.is_empty(),
                    }
                }),
            ))
        }
        Backend::Continuum(g) => {
            let cand = candidates.as_reals().expect("interval candidates");
            let pool = pool.map(|p| p.as_reals().expect("interval pool"));
            StrategySet::Reals(continuum_condition(g, &reals(opp), i, cand, pool))
        }
    }
}

/// Exact: the predicate is constant between consecutive breakpoints drawn
/// from the game's constants and the endpoints of every set involved.
fn continuum_condition(
    g: &ContinuumGame,
    opp: &[IntervalSet],
    i: usize,
    candidates: &IntervalSet,
    pool: Option<&IntervalSet>,
) -> IntervalSet {
    let mut breaks = g.constants();
    for s in opp.iter().chain([candidates]).chain(pool) {
        breaks.extend(s.endpoints());
    }
    breaks.sort();
    breaks.dedup();
    let test = |x: &Rational| {
        let d = continuum_dominators(g, opp, i, x);
        match pool {
            Some(p) => !d.intersect(p).is_empty(),
            None => !d.is_empty(),
        }
    };
    let mut out = IntervalSet::empty();
    for (k, b) in breaks.iter().enumerate() {
        if candidates.contains(b) && test(b) {
            out = out.union(&IntervalSet::point(b.clone()));
        }
        if let Some(next) = breaks.get(k + 1) {
            let m = midpoint(b, next);
            if candidates.contains(&m) && test(&m) {
                let gap = IntervalSet::from_bounds(Boundary::open(b.clone()), Boundary::open(next.clone()));
                out = out.union(&gap.intersect(candidates));
            }
        }
    }
    out
}

/// Strategies of `H_i` whose elimination condition holds at `h` when tested
/// against the current sets.
pub fn eliminated_region(game: &QualitativeGame, h: &Pairing, i: usize, op: OperatorKind) -> StrategySet {
    let own = h.factor(i);
    match op {
        OperatorKind::Double => condition_set(game, h, i, own, Some(own)),
        OperatorKind::Arrow | OperatorKind::Tail => condition_set(game, h, i, own, None),
    }
}

/// The game on `∏ H_i` with `P'_i = P_i ∩ H_i` (and `Q` likewise).
pub fn restrict(game: &QualitativeGame, h: &Pairing) -> QualitativeGame {
    let name = game.name.clone();
    match &game.backend {
        Backend::Continuum(g) => QualitativeGame::continuum(name, g.restricted(&reals(h))),
        Backend::Finite(g) => {
            let keep: Vec<Vec<usize>> = labels(h).iter().map(|s| s.iter().collect()).collect();
            let new_labels: Vec<Vec<String>> = keep
                .iter()
                .enumerate()
                .map(|(i, ks)| ks.iter().map(|k| g.labels(i)[*k].clone()).collect())
                .collect();
            let n = g.players();
            let mut strides = vec![1usize; n];
            for i in (0..n.saturating_sub(1)).rev() {
                strides[i] = strides[i + 1] * keep[i + 1].len();
            }
            let total: usize = keep.iter().map(Vec::len).product();
            let old_of = |f: usize| -> usize {
                let mut rest = f;
                let coords: Vec<usize> = (0..n)
                    .map(|i| {
                        let c = rest / strides[i];
                        rest %= strides[i];
                        keep[i][c]
                    })
                    .collect();
                g.flat(&coords)
            };
            let project = |i: usize, s: &LabelSet| -> LabelSet {
                LabelSet::from_indices(
                    keep[i].len(),
                    keep[i]
                        .iter()
                        .enumerate()
                        .filter(|(_, k)| s.contains(**k))
                        .map(|(pos, _)| pos),
                )
            };
            let corr = |c: Corr| -> Option<Vec<FiniteCorrespondence>> {
                g.corr(c, 0, 0)?;
                Some(
                    (0..n)
                        .map(|i| FiniteCorrespondence {
                            owner: i,
                            table: (0..total)
                                .map(|f| project(i, g.corr(c, i, old_of(f)).expect("present")))
                                .collect(),
                        })
                        .collect(),
                )
            };
            let util = g.util_tables().map(|u| {
                u.iter()
                    .map(|t| UtilityTable {
                        owner: t.owner,
                        table: (0..total).map(|f| t.table[old_of(f)].clone()).collect(),
                    })
                    .collect()
            });
            let restricted = FiniteGame::new_unchecked(new_labels, corr(Corr::Pref), corr(Corr::Comp), util);
            QualitativeGame::finite(name, restricted)
        }
    }
}
