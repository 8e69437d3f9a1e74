//! Hypothesis checks, the C(t) and D(t) conditions, undominated dominators,
//! maximal elements and the preservation check for reduced games.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use qualred_intervalset::{IntervalSet, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::engine::{condition_set, dominator_set, restrict};
use crate::gamespec::{render_point, Backend, Cell, ContinuumGame, Corr, FiniteGame, Profile, QualitativeGame};
use crate::reduction::ReductionTrace;
use crate::regions::{Atom, Decomposition, Region};
use crate::sets::{LabelSet, Pairing, Strategy, StrategySet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("the game has no comparison correspondence Q")]
    MissingQ,
    #[error("strategy {0} of player {1} is not dominated")]
    PreconditionUnmet(String, usize),
    #[error("{0} is only defined for finite games")]
    ContinuumUnsupported(&'static str),
}

/// A concrete violation: the profile, player and strategy involved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub player: usize,
    pub profile: Option<Profile>,
    pub strategy: Option<Strategy>,
    pub note: String,
}

impl Violation {
    pub fn to_json(&self, game: &QualitativeGame) -> Value {
        json!({
            "player": self.player + 1,
            "profile": self.profile.as_ref().map(|p| game.render_profile(p)),
            "strategy": self.strategy.as_ref().map(|s| game.render_strategy(self.player, s)),
            "note": self.note,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Violation),
    /// The check does not apply, e.g. a missing Q or an unsupported backend.
    NotApplicable(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Fails(v) => Some(v),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails(_) => "fails",
            Verdict::NotApplicable(_) => "not-applicable",
        }
    }

    pub fn to_json(&self, game: &QualitativeGame) -> Value {
        match self {
            Verdict::Holds => json!({ "verdict": "holds" }),
            Verdict::Fails(v) => json!({ "verdict": "fails", "witness": v.to_json(game) }),
            Verdict::NotApplicable(why) => json!({ "verdict": "not-applicable", "reason": why }),
        }
    }

    fn first_failure(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        for v in verdicts {
            if !v.holds() {
                return v;
            }
        }
        Verdict::Holds
    }
}

fn fail(player: usize, profile: Option<Profile>, strategy: Option<Strategy>, note: impl Into<String>) -> Verdict {
    Verdict::Fails(Violation {
        player,
        profile,
        strategy,
        note: note.into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Hypothesis {
    Irreflexive,
    StrongIrreflexive,
    PropertyTSingle,
    PropertyTPair,
    QReflexive,
    QClosedConvex,
    OpenLowerSections,
    ZStar,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 8] = [
        Hypothesis::Irreflexive,
        Hypothesis::StrongIrreflexive,
        Hypothesis::PropertyTSingle,
        Hypothesis::PropertyTPair,
        Hypothesis::QReflexive,
        Hypothesis::QClosedConvex,
        Hypothesis::OpenLowerSections,
        Hypothesis::ZStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Irreflexive => "irreflexive",
            Hypothesis::StrongIrreflexive => "strong-irreflexive",
            Hypothesis::PropertyTSingle => "propertyT-single",
            Hypothesis::PropertyTPair => "propertyT-pair",
            Hypothesis::QReflexive => "q-reflexive",
            Hypothesis::QClosedConvex => "q-closed-convex",
            Hypothesis::OpenLowerSections => "open-lower-sections",
            Hypothesis::ZStar => "z-star",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Hypothesis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Hypothesis::ALL
            .into_iter()
            .find(|h| h.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = Hypothesis::ALL.iter().map(|h| h.name()).collect();
                format!("unknown hypothesis `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub entries: Vec<(Hypothesis, Verdict)>,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.holds())
    }

    pub fn get(&self, h: Hypothesis) -> Option<&Verdict> {
        self.entries.iter().find(|(k, _)| *k == h).map(|(_, v)| v)
    }

    pub fn to_json(&self, game: &QualitativeGame) -> Value {
        Value::Object(
            self.entries
                .iter()
                .map(|(h, v)| (h.name().to_string(), v.to_json(game)))
                .collect(),
        )
    }
}

pub fn check_hypotheses(game: &QualitativeGame) -> HypothesisReport {
    check_selected(game, &Hypothesis::ALL)
}

pub fn check_selected(game: &QualitativeGame, which: &[Hypothesis]) -> HypothesisReport {
    HypothesisReport {
        entries: which.iter().map(|h| (*h, check_hypothesis(game, *h))).collect(),
    }
}

pub fn check_hypothesis(game: &QualitativeGame, h: Hypothesis) -> Verdict {
    let players = 0..game.players();
    match h {
        Hypothesis::PropertyTSingle => Verdict::first_failure(players.map(|i| check_property_t_single(game, i))),
        Hypothesis::PropertyTPair => Verdict::first_failure(players.map(|i| match check_property_t_pair(game, i) {
            Ok(v) => v,
            Err(e) => Verdict::NotApplicable(e.to_string()),
        })),
        Hypothesis::ZStar => match check_z_star(game) {
            Ok(v) => v,
            Err(e) => Verdict::NotApplicable(e.to_string()),
        },
        Hypothesis::QReflexive | Hypothesis::QClosedConvex if !game.has_comp() => {
            Verdict::NotApplicable(AnalysisError::MissingQ.to_string())
        }
        _ => match &game.backend {
            Backend::Finite(g) => finite_hypothesis(g, h),
            Backend::Continuum(g) => continuum_hypothesis(g, h),
        },
    }
}

// ---------------------------------------------------------------------------
// Finite backend

fn finite_hypothesis(g: &FiniteGame, h: Hypothesis) -> Verdict {
    let profile = |f: usize| Some(Profile::Labels(g.unflat(f)));
    for f in 0..g.profile_count() {
        for i in 0..g.players() {
            let own = g.coord(f, i);
            match h {
                // the discrete closure is the identity
                Hypothesis::Irreflexive | Hypothesis::StrongIrreflexive => {
                    if g.pref(i, f).contains(own) {
                        return fail(i, profile(f), Some(Strategy::Label(own)), "x_i ∈ P_i(x)");
                    }
                }
                Hypothesis::QReflexive => {
                    if !g.comp(i, f).expect("Q present").contains(own) {
                        return fail(i, profile(f), Some(Strategy::Label(own)), "x_i ∉ Q_i(x)");
                    }
                }
                Hypothesis::QClosedConvex => {
                    let q = g.comp(i, f).expect("Q present");
                    if let (Some(lo), Some(hi)) = (q.first(), q.iter().last()) {
                        if let Some(gap) = (lo..=hi).find(|k| !q.contains(*k)) {
                            return fail(i, profile(f), Some(Strategy::Label(gap)), "Q_i(x) skips a label");
                        }
                    }
                }
                Hypothesis::OpenLowerSections => return Verdict::Holds,
                _ => unreachable!("handled by check_hypothesis"),
            }
        }
    }
    Verdict::Holds
}

fn finite_t_single(g: &FiniteGame, i: usize) -> Verdict {
    for f in 0..g.profile_count() {
        let p = g.pref(i, f);
        for y in p.iter() {
            let moved = g.pref(i, g.with_coord(f, i, y));
            if let Some(z) = moved.difference(p).first() {
                return fail(
                    i,
                    Some(Profile::Labels(g.unflat(f))),
                    Some(Strategy::Label(y)),
                    format!("y ∈ P_i(x) but P_i(y, x_-i) has label #{z} outside P_i(x)"),
                );
            }
        }
    }
    Verdict::Holds
}

fn finite_t_pair(g: &FiniteGame, i: usize) -> Verdict {
    for f in 0..g.profile_count() {
        let p = g.pref(i, f);
        let q = g.comp(i, f).expect("Q present");
        if let Some(z) = p.difference(q).first() {
            return fail(
                i,
                Some(Profile::Labels(g.unflat(f))),
                Some(Strategy::Label(z)),
                "P_i(x) ⊄ Q_i(x)",
            );
        }
        for y in p.iter() {
            let moved = g.comp(i, g.with_coord(f, i, y)).expect("Q present");
            if !moved.is_subset(p) {
                return fail(
                    i,
                    Some(Profile::Labels(g.unflat(f))),
                    Some(Strategy::Label(y)),
                    "y ∈ P_i(x) but Q_i(y, x_-i) ⊄ P_i(x)",
                );
            }
        }
    }
    Verdict::Holds
}

/// Per profile and player, `∩_{z_i} Q_i(z_i, x_-i)`; `z*` exists iff all
/// are nonempty.
pub fn z_star_for(g: &FiniteGame, f: usize) -> Option<Vec<usize>> {
    (0..g.players())
        .map(|i| {
            let mut acc = LabelSet::full(g.size(i));
            for z in 0..g.size(i) {
                acc.intersect_with(g.comp(i, g.with_coord(f, i, z))?);
            }
            acc.first()
        })
        .collect()
}

pub fn check_z_star(game: &QualitativeGame) -> Result<Verdict, AnalysisError> {
    let g = game
        .as_finite()
        .ok_or(AnalysisError::ContinuumUnsupported("the z* condition"))?;
    if g.comp_tables().is_none() {
        return Err(AnalysisError::MissingQ);
    }
    for f in 0..g.profile_count() {
        if z_star_for(g, f).is_none() {
            let i = (0..g.players())
                .find(|i| {
                    let mut acc = LabelSet::full(g.size(*i));
                    for z in 0..g.size(*i) {
                        acc.intersect_with(g.comp(*i, g.with_coord(f, *i, z)).expect("Q present"));
                    }
                    acc.is_empty()
                })
                .unwrap_or(0);
            return Ok(fail(
                i,
                Some(Profile::Labels(g.unflat(f))),
                None,
                "∩ over z_i of Q_i(z_i, x_-i) is empty",
            ));
        }
    }
    Ok(Verdict::Holds)
}

// ---------------------------------------------------------------------------
// Continuum backend
//
// Every predicate below compares coordinates, an optional extra strategy `y`
// and the game's constants, so it is constant on the regions of a
// decomposition over those variables and one sample per region decides it.

const SPOT_CHECKS: usize = 1000;
const SPOT_SEED: u64 = 0x51a7_c0de;

fn eval(g: &ContinuumGame, corr: Corr, i: usize, x: &[Rational]) -> IntervalSet {
    g.eval(corr, i, x).expect("validated game covers every profile")
}

/// Closure within the player's space.
fn rel_closure(g: &ContinuumGame, i: usize, s: &IntervalSet) -> IntervalSet {
    s.closure().intersect(g.space(i))
}

/// Scans all regions over the profile, plus `y ∈ space_i` when `with_y`;
/// then random spot checks. Returns the first point where `bad` reports.
fn scan<F>(g: &ContinuumGame, i: usize, with_y: bool, bad: F) -> Verdict
where
    F: Fn(&[Rational], Option<&Rational>) -> Option<String>,
{
    let mut domains = g.spaces().to_vec();
    if with_y {
        domains.push(g.space(i).clone());
    }
    let n = g.players();
    let report = |p: &[Rational], note: String| {
        let y = with_y.then(|| Strategy::Point(p[n].clone()));
        let own = Strategy::Point(p[i].clone());
        fail(i, Some(Profile::Points(p[..n].to_vec())), y.or(Some(own)), note)
    };
    let d = Decomposition::new(&domains, g.constants());
    for r in d.regions() {
        let p = d.sample(&r);
        if let Some(note) = bad(&p[..n], p.get(n).filter(|_| with_y)) {
            return report(&p, note);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SPOT_SEED ^ i as u64);
    for _ in 0..SPOT_CHECKS {
        let p: Vec<Rational> = domains.iter().map(|s| random_point(&mut rng, s)).collect();
        if let Some(note) = bad(&p[..n], p.get(n).filter(|_| with_y)) {
            return report(&p, note);
        }
    }
    Verdict::Holds
}

/// A random rational of `s` on a 1/1000 lattice of one of its parts.
pub fn random_point<R: Rng>(rng: &mut R, s: &IntervalSet) -> Rational {
    let parts = s.parts();
    let part = &parts[rng.gen_range(0..parts.len())];
    let (lo, hi) = (&part.lo().value, &part.hi().value);
    if lo == hi {
        return lo.clone();
    }
    loop {
        let k: i64 = rng.gen_range(0..=1000);
        let v = lo + (hi - lo) * Rational::new(k.into(), 1000.into());
        if part.contains(&v) {
            return v;
        }
    }
}

fn with_coord(x: &[Rational], i: usize, y: &Rational) -> Vec<Rational> {
    let mut out = x.to_vec();
    out[i] = y.clone();
    out
}

fn continuum_hypothesis(g: &ContinuumGame, h: Hypothesis) -> Verdict {
    let all = (0..g.players()).map(|i| match h {
        Hypothesis::Irreflexive => scan(g, i, false, |x, _| {
            eval(g, Corr::Pref, i, x)
                .contains(&x[i])
                .then(|| "x_i ∈ P_i(x)".to_string())
        }),
        Hypothesis::StrongIrreflexive => scan(g, i, false, |x, _| {
            rel_closure(g, i, &eval(g, Corr::Pref, i, x))
                .contains(&x[i])
                .then(|| "x_i ∈ cl P_i(x)".to_string())
        }),
        Hypothesis::QReflexive => scan(g, i, false, |x, _| {
            (!eval(g, Corr::Comp, i, x).contains(&x[i])).then(|| "x_i ∉ Q_i(x)".to_string())
        }),
        Hypothesis::QClosedConvex => scan(g, i, false, |x, _| {
            let q = eval(g, Corr::Comp, i, x);
            if !q.is_convex() {
                Some(format!("Q_i(x) = {q} is not convex"))
            } else if !q.is_closed() {
                Some(format!("Q_i(x) = {q} is not closed"))
            } else {
                None
            }
        }),
        Hypothesis::OpenLowerSections => open_lower_sections(g, i),
        _ => unreachable!("handled by check_hypothesis"),
    });
    Verdict::first_failure(all)
}

/// `{x : y ∈ P_i(x)}` is open in the product of spaces for every `y`.
/// Strategies `y` in one gap between consecutive constants give
/// order-isomorphic sections, so one `y` per constant and per gap suffices;
/// `y` joins the breakpoints so neighbouring regions decide openness.
fn open_lower_sections(g: &ContinuumGame, i: usize) -> Verdict {
    let consts = g.constants();
    let mut ys: Vec<Rational> = consts.clone();
    ys.extend(consts.windows(2).map(|w| qualred_intervalset::midpoint(&w[0], &w[1])));
    ys.retain(|y| g.space(i).contains(y));
    for y in ys {
        let d = Decomposition::new(g.spaces(), consts.iter().cloned().chain([y.clone()]));
        let inside = |p: &[Rational]| eval(g, Corr::Pref, i, p).contains(&y);
        for r in d.regions() {
            let p = d.sample(&r);
            if !inside(&p) {
                continue;
            }
            if let Some(n) = d.neighbors(&r).into_iter().find(|n| !inside(&d.sample(n))) {
                return fail(
                    i,
                    Some(Profile::Points(p)),
                    Some(Strategy::Point(y.clone())),
                    format!(
                        "lower section of y is not open: it contains this profile but not nearby {}",
                        render_point(&d.sample(&n))
                    ),
                );
            }
        }
    }
    Verdict::Holds
}

/// `y ∈ P_i(x)` implies `cl P_i(y, x_-i) ⊆ P_i(x)`.
pub fn check_property_t_single(game: &QualitativeGame, i: usize) -> Verdict {
    match &game.backend {
        Backend::Finite(g) => finite_t_single(g, i),
        Backend::Continuum(g) => scan(g, i, true, |x, y| {
            let y = y.expect("extra variable");
            let p = eval(g, Corr::Pref, i, x);
            if !p.contains(y) {
                return None;
            }
            let moved = rel_closure(g, i, &eval(g, Corr::Pref, i, &with_coord(x, i, y)));
            (!moved.is_subset(&p)).then(|| format!("y ∈ P_i(x) = {p} but cl P_i(y, x_-i) = {moved}"))
        }),
    }
}

/// `P_i(x) ⊆ Q_i(x)`, and `y ∈ P_i(x)` implies `Q_i(y, x_-i) ⊆ P_i(x)`.
pub fn check_property_t_pair(game: &QualitativeGame, i: usize) -> Result<Verdict, AnalysisError> {
    if !game.has_comp() {
        return Err(AnalysisError::MissingQ);
    }
    Ok(match &game.backend {
        Backend::Finite(g) => finite_t_pair(g, i),
        Backend::Continuum(g) => scan(g, i, true, |x, y| {
            let y = y.expect("extra variable");
            let p = eval(g, Corr::Pref, i, x);
            let q = eval(g, Corr::Comp, i, x);
            if !p.is_subset(&q) {
                return Some(format!("P_i(x) = {p} ⊄ Q_i(x) = {q}"));
            }
            if !p.contains(y) {
                return None;
            }
            let moved = eval(g, Corr::Comp, i, &with_coord(x, i, y));
            (!moved.is_subset(&p)).then(|| format!("y ∈ P_i(x) = {p} but Q_i(y, x_-i) = {moved}"))
        }),
    })
}

// ---------------------------------------------------------------------------
// Conditions C(t) and D(t)

/// Strategies of `G_i` strictly dominated at `h`.
fn dominated(game: &QualitativeGame, h: &Pairing, i: usize) -> StrategySet {
    condition_set(game, h, i, &game.full_set(i), None)
}

/// Every strategy of `G_i` dominated at `h` has a dominator that is itself
/// undominated at `h`.
pub fn condition_c_at(game: &QualitativeGame, h: &Pairing) -> Verdict {
    for i in 0..game.players() {
        let dom = dominated(game, h, i);
        let undominated = game.full_set(i).difference(&dom);
        let ok = condition_set(game, h, i, &dom, Some(&undominated));
        if let Some(x) = dom.difference(&ok).representative() {
            return fail(i, None, Some(x), "dominated, but every dominator is itself dominated");
        }
    }
    Verdict::Holds
}

/// Every strategy of `G_i` dominated at `h` has a dominator inside `h_i`.
pub fn condition_d_at(game: &QualitativeGame, h: &Pairing) -> Verdict {
    for i in 0..game.players() {
        let dom = dominated(game, h, i);
        let ok = condition_set(game, h, i, &dom, Some(h.factor(i)));
        if let Some(x) = dom.difference(&ok).representative() {
            return fail(i, None, Some(x), "dominated, but no dominator survives in the stage");
        }
    }
    Verdict::Holds
}

pub fn check_condition_c(game: &QualitativeGame, trace: &ReductionTrace, t: usize) -> Verdict {
    condition_c_at(game, &trace.stages[t])
}

pub fn check_condition_d(game: &QualitativeGame, trace: &ReductionTrace, t: usize) -> Verdict {
    condition_d_at(game, &trace.stages[t])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageConditions {
    pub stage: usize,
    pub c: Verdict,
    pub d: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    pub stages: Vec<StageConditions>,
}

impl ConditionReport {
    pub fn c_holds(&self) -> bool {
        self.stages.iter().all(|s| s.c.holds())
    }

    pub fn d_holds(&self) -> bool {
        self.stages.iter().all(|s| s.d.holds())
    }

    pub fn to_json(&self, game: &QualitativeGame) -> Value {
        Value::Array(
            self.stages
                .iter()
                .map(|s| json!({ "stage": s.stage, "C": s.c.to_json(game), "D": s.d.to_json(game) }))
                .collect(),
        )
    }
}

pub fn check_conditions(game: &QualitativeGame, trace: &ReductionTrace) -> ConditionReport {
    ConditionReport {
        stages: (0..trace.stages.len())
            .map(|t| StageConditions {
                stage: t,
                c: check_condition_c(game, trace, t),
                d: check_condition_d(game, trace, t),
            })
            .collect(),
    }
}

/// Some `x*_i ∈ H_i` dominating `x_i` at `h` that nothing in `G_i` dominates
/// at `h`. The search is exact on both backends, so `None` is definitive.
pub fn find_undominated_dominator(
    game: &QualitativeGame,
    h: &Pairing,
    i: usize,
    x: &Strategy,
) -> Result<Option<Strategy>, AnalysisError> {
    let d = dominator_set(game, h, i, x).set;
    if h.opponents_vacant(i) || d.is_empty() {
        return Err(AnalysisError::PreconditionUnmet(game.render_strategy(i, x), i + 1));
    }
    let undominated = game.full_set(i).difference(&dominated(game, h, i));
    Ok(d.intersect(h.factor(i)).intersect(&undominated).representative())
}

// ---------------------------------------------------------------------------
// Maximal elements

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaximalElements {
    Profiles(Vec<Profile>),
    /// Exact union of cells, for continuum games.
    Region(Vec<Cell>),
}

impl MaximalElements {
    pub fn is_empty(&self) -> bool {
        match self {
            MaximalElements::Profiles(p) => p.is_empty(),
            MaximalElements::Region(c) => c.is_empty(),
        }
    }

    /// Profiles as arrays of rendered strategies; non-point cells as text.
    pub fn to_json(&self, game: &QualitativeGame) -> Value {
        let strategies = |p: &Profile| -> Value {
            game.profile_strategies(p)
                .iter()
                .enumerate()
                .map(|(i, s)| Value::String(game.render_strategy(i, s)))
                .collect()
        };
        match self {
            MaximalElements::Profiles(ps) => ps.iter().map(strategies).collect(),
            MaximalElements::Region(cells) => cells
                .iter()
                .map(|c| match cell_point(c) {
                    Some(p) => strategies(&Profile::Points(p)),
                    None => Value::String(c.describe()),
                })
                .collect(),
        }
    }
}

fn cell_point(c: &Cell) -> Option<Vec<Rational>> {
    c.factors.iter().map(|f| f.as_point().cloned()).collect()
}

pub fn maximal_elements(game: &QualitativeGame) -> MaximalElements {
    match &game.backend {
        Backend::Finite(g) => MaximalElements::Profiles(
            (0..g.profile_count())
                .filter(|f| (0..g.players()).all(|i| g.pref(i, *f).is_empty()))
                .map(|f| Profile::Labels(g.unflat(f)))
                .collect(),
        ),
        Backend::Continuum(g) => {
            let d = Decomposition::new(g.spaces(), g.constants());
            let regions = d.regions();
            let mut by_atoms: BTreeMap<Vec<Atom>, (usize, Vec<&Region>)> = BTreeMap::new();
            for r in &regions {
                let entry = by_atoms.entry(r.atoms.clone()).or_default();
                entry.0 += 1;
                if is_maximal_point(g, &d.sample(r)) {
                    entry.1.push(r);
                }
            }
            // atom tuples whose every ordering is maximal need no relations
            let mut cells = Vec::new();
            for (atoms, (total, hits)) in by_atoms {
                if hits.len() == total {
                    cells.push(Cell {
                        factors: atoms.iter().map(|a| d.atom_set(*a)).collect(),
                        relations: Vec::new(),
                    });
                } else {
                    cells.extend(hits.into_iter().map(|r| d.describe(r)));
                }
            }
            MaximalElements::Region(merge_cells(cells))
        }
    }
}

fn is_maximal_point(g: &ContinuumGame, x: &[Rational]) -> bool {
    (0..g.players()).all(|i| eval(g, Corr::Pref, i, x).is_empty())
}

/// Merges cells that differ in one factor only and carry the same relations;
/// the union of two such products is again a product.
fn merge_cells(mut cells: Vec<Cell>) -> Vec<Cell> {
    loop {
        let mut merged = false;
        'outer: for a in 0..cells.len() {
            for b in a + 1..cells.len() {
                if cells[a].relations != cells[b].relations {
                    continue;
                }
                let diff: Vec<usize> = (0..cells[a].factors.len())
                    .filter(|k| cells[a].factors[*k] != cells[b].factors[*k])
                    .collect();
                if diff.len() == 1 {
                    let k = diff[0];
                    let joined = cells[a].factors[k].union(&cells[b].factors[k]);
                    cells[a].factors[k] = joined;
                    cells.remove(b);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    cells.sort_by_cached_key(|c| c.describe());
    cells
}

// ---------------------------------------------------------------------------
// Preservation of maximal elements under reduction

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreservationLabel {
    Equal,
    /// Maximal elements differ, but a hypothesis fails or the path is invalid.
    ExpectedCounterexample,
    /// Maximal elements differ although every hypothesis holds.
    TheoremViolation,
}

impl PreservationLabel {
    pub fn name(self) -> &'static str {
        match self {
            PreservationLabel::Equal => "EQUAL",
            PreservationLabel::ExpectedCounterexample => "EXPECTED-COUNTEREXAMPLE",
            PreservationLabel::TheoremViolation => "THEOREM-VIOLATION",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationReport {
    pub label: PreservationLabel,
    pub original: MaximalElements,
    pub reduced: MaximalElements,
    /// Maximal in the original game only (sample profiles for continuum games).
    pub only_original: Vec<Profile>,
    /// Maximal in the reduced game only.
    pub only_reduced: Vec<Profile>,
    pub hypotheses: HypothesisReport,
    pub trace_valid: bool,
}

impl PreservationReport {
    pub fn equal(&self) -> bool {
        self.label == PreservationLabel::Equal
    }

    pub fn to_json(&self, game: &QualitativeGame, reduced_game: &QualitativeGame) -> Value {
        let render = |ps: &[Profile]| ps.iter().map(|p| game.render_profile(p)).collect::<Vec<_>>();
        json!({
            "verdict": if self.equal() { "EQUAL" } else { "NOT-EQUAL" },
            "label": self.label.name(),
            "original": self.original.to_json(game),
            "reduced": self.reduced.to_json(reduced_game),
            "only_original": render(&self.only_original),
            "only_reduced": render(&self.only_reduced),
            "hypotheses": self.hypotheses.to_json(game),
            "trace_valid": self.trace_valid,
        })
    }
}

/// Hypotheses under which reduction keeps the maximal elements.
pub const PRESERVATION_HYPOTHESES: [Hypothesis; 3] =
    [Hypothesis::PropertyTPair, Hypothesis::Irreflexive, Hypothesis::ZStar];

/// Compares the maximal elements of `game` with those of its restriction to
/// the trace's limit.
pub fn check_preservation(game: &QualitativeGame, trace: &ReductionTrace) -> PreservationReport {
    let h = trace.limit();
    let reduced_game = restrict(game, h);
    let original = maximal_elements(game);
    let reduced = maximal_elements(&reduced_game);
    let (only_original, only_reduced) = match &game.backend {
        Backend::Finite(_) => finite_difference(h, &original, &reduced),
        Backend::Continuum(g) => {
            let rg = reduced_game.as_continuum().expect("restriction keeps the backend");
            continuum_difference(g, rg, h)
        }
    };
    let hypotheses = check_selected(game, &PRESERVATION_HYPOTHESES);
    let trace_valid = trace.is_valid_path();
    let label = if only_original.is_empty() && only_reduced.is_empty() {
        PreservationLabel::Equal
    } else if hypotheses.all_hold() && trace_valid {
        PreservationLabel::TheoremViolation
    } else {
        PreservationLabel::ExpectedCounterexample
    };
    PreservationReport {
        label,
        original,
        reduced,
        only_original,
        only_reduced,
        hypotheses,
        trace_valid,
    }
}

fn finite_difference(
    h: &Pairing,
    original: &MaximalElements,
    reduced: &MaximalElements,
) -> (Vec<Profile>, Vec<Profile>) {
    let keep: Vec<Vec<usize>> = h
        .factors()
        .iter()
        .map(|f| f.as_labels().expect("finite pairing").iter().collect())
        .collect();
    let to_set = |m: &MaximalElements, lift: bool| -> BTreeSet<Vec<usize>> {
        let MaximalElements::Profiles(ps) = m else {
            unreachable!("finite")
        };
        ps.iter()
            .map(|p| {
                let Profile::Labels(k) = p else { unreachable!("finite") };
                if lift {
                    k.iter().enumerate().map(|(i, c)| keep[i][*c]).collect()
                } else {
                    k.clone()
                }
            })
            .collect()
    };
    let a = to_set(original, false);
    let b = to_set(reduced, true);
    let only =
        |x: &BTreeSet<Vec<usize>>, y: &BTreeSet<Vec<usize>>| x.difference(y).cloned().map(Profile::Labels).collect();
    (only(&a, &b), only(&b, &a))
}

fn continuum_difference(g: &ContinuumGame, rg: &ContinuumGame, h: &Pairing) -> (Vec<Profile>, Vec<Profile>) {
    let hs: Vec<IntervalSet> = h
        .factors()
        .iter()
        .map(|f| f.as_reals().expect("continuum pairing").clone())
        .collect();
    let mut extra = g.constants();
    for s in &hs {
        extra.extend(s.endpoints());
    }
    let d = Decomposition::new(g.spaces(), extra);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for r in d.regions() {
        let p = d.sample(&r);
        let in_g = is_maximal_point(g, &p);
        let in_h = hs.iter().zip(&p).all(|(s, v)| s.contains(v)) && is_maximal_point(rg, &p);
        match (in_g, in_h) {
            (true, false) => a.push(Profile::Points(p)),
            (false, true) => b.push(Profile::Points(p)),
            _ => {}
        }
    }
    (a, b)
}
