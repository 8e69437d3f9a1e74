//! Random finite games, grid discretization of interval games, the
//! exhaustive elimination-order oracle, and the property fuzzer.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use qualred_intervalset::{format_rational, grid_steps, int, lerp, IntervalSet, Rational};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{
    check_hypothesis, check_preservation, condition_c_at, condition_d_at, Hypothesis, PreservationLabel,
};
use crate::engine::{restrict, OperatorKind};
use crate::gamespec::{pairing_to_json, Corr, FiniteCorrespondence, FiniteGame, QualitativeGame, UtilityTable};
use crate::reduction::{path_step, star_reduce, ReductionTrace};
use crate::serialize_game;
use crate::sets::{LabelSet, Pairing, StrategySet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabError {
    #[error("constraints not satisfied after {0} attempts")]
    ConstraintUnsatisfiable(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("game has {profiles} profiles, above the oracle bound of {bound}")]
    BoundExceeded { profiles: usize, bound: usize },
    #[error("grid step {0} does not divide the span of player {1}'s space")]
    Grid(String, usize),
    #[error("{0} needs a finite game")]
    NotFinite(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Random integer utilities; `P` is the strict-improvement correspondence.
    UtilityDerived,
    /// Each label enters each `P_i(x)` independently with probability 1/2.
    RawPreference,
}

impl FromStr for GenMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "utility-derived" | "utility" => Ok(GenMode::UtilityDerived),
            "raw-preference" | "raw" => Ok(GenMode::RawPreference),
            other => Err(format!(
                "unknown mode `{other}` (expected utility-derived or raw-preference)"
            )),
        }
    }
}

/// How the comparison correspondence `Q` is generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QMode {
    None,
    /// `Q_i ≡ G_i`.
    Full,
    /// Random supersets of `P`.
    Random,
    /// `Q_i(x) = { y : u_i(y, x_-i) ≥ u_i(x) }`; utility-derived games only.
    UpperContour,
}

impl FromStr for QMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(QMode::None),
            "full" => Ok(QMode::Full),
            "random" => Ok(QMode::Random),
            "upper-contour" => Ok(QMode::UpperContour),
            other => Err(format!(
                "unknown Q mode `{other}` (expected none, full, random or upper-contour)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Constraints {
    pub irreflexive: bool,
    pub property_t_pair: bool,
    pub q_reflexive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub sizes: Vec<usize>,
    pub seed: u64,
    pub mode: GenMode,
    pub q: QMode,
    pub constraints: Constraints,
    pub payoff: (i64, i64),
    pub retries: usize,
}

impl GeneratorConfig {
    pub fn new(sizes: Vec<usize>, seed: u64, mode: GenMode) -> Self {
        GeneratorConfig {
            sizes,
            seed,
            mode,
            q: QMode::None,
            constraints: Constraints::default(),
            payoff: (0, 2),
            retries: 20,
        }
    }

    pub fn players(&self) -> usize {
        self.sizes.len()
    }

    fn validate(&self) -> Result<(), LabError> {
        if self.sizes.len() < 2 || self.sizes.contains(&0) {
            return Err(LabError::Config(
                "need at least two players with at least one strategy each".into(),
            ));
        }
        if self.payoff.0 > self.payoff.1 {
            return Err(LabError::Config("empty payoff range".into()));
        }
        if self.q == QMode::UpperContour && self.mode != GenMode::UtilityDerived {
            return Err(LabError::Config("upper-contour Q needs utilities".into()));
        }
        if (self.constraints.property_t_pair || self.constraints.q_reflexive) && self.q == QMode::None {
            return Err(LabError::Config("the requested constraints need a Q".into()));
        }
        Ok(())
    }
}

fn labels_for(sizes: &[usize]) -> Vec<Vec<String>> {
    sizes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let letter = (b'a' + (i % 26) as u8) as char;
            (1..=*n).map(|k| format!("{letter}{k}")).collect()
        })
        .collect()
}

/// Deterministic in the seed; constraints are enforced by repair and then
/// re-verified with the analysis checks.
pub fn generate_game(cfg: &GeneratorConfig) -> Result<QualitativeGame, LabError> {
    cfg.validate()?;
    for attempt in 0..cfg.retries.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(attempt as u64);
        let game = draw(cfg, &mut rng);
        if satisfies(&game, &cfg.constraints) {
            return Ok(game);
        }
    }
    Err(LabError::ConstraintUnsatisfiable(cfg.retries.max(1)))
}

fn satisfies(game: &QualitativeGame, c: &Constraints) -> bool {
    let wanted = [
        (c.irreflexive, Hypothesis::Irreflexive),
        (c.property_t_pair, Hypothesis::PropertyTPair),
        (c.q_reflexive, Hypothesis::QReflexive),
    ];
    wanted
        .iter()
        .filter(|(on, _)| *on)
        .all(|(_, h)| check_hypothesis(game, *h).holds())
}

fn draw(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> QualitativeGame {
    let labels = labels_for(&cfg.sizes);
    let n = cfg.players();
    let total: usize = cfg.sizes.iter().product();
    let shape = FiniteGame::new_unchecked(labels.clone(), None, None, None);
    let util: Option<Vec<UtilityTable>> = (cfg.mode == GenMode::UtilityDerived).then(|| {
        (0..n)
            .map(|i| UtilityTable {
                owner: i,
                table: (0..total)
                    .map(|_| int(rng.gen_range(cfg.payoff.0..=cfg.payoff.1)))
                    .collect(),
            })
            .collect()
    });
    let mut pref: Vec<Vec<LabelSet>> = match &util {
        Some(u) => (0..n)
            .map(|i| {
                (0..total)
                    .map(|f| {
                        let here = &u[i].table[f];
                        LabelSet::from_indices(
                            cfg.sizes[i],
                            (0..cfg.sizes[i]).filter(|k| u[i].table[shape.with_coord(f, i, *k)] > *here),
                        )
                    })
                    .collect()
            })
            .collect(),
        None => (0..n)
            .map(|i| {
                (0..total)
                    .map(|_| LabelSet::from_indices(cfg.sizes[i], (0..cfg.sizes[i]).filter(|_| rng.gen_bool(0.5))))
                    .collect()
            })
            .collect(),
    };
    let mut comp: Option<Vec<Vec<LabelSet>>> = match cfg.q {
        QMode::None => None,
        QMode::Full => Some((0..n).map(|i| vec![LabelSet::full(cfg.sizes[i]); total]).collect()),
        QMode::Random => Some(
            (0..n)
                .map(|i| {
                    (0..total)
                        .map(|f| {
                            let extra =
                                LabelSet::from_indices(cfg.sizes[i], (0..cfg.sizes[i]).filter(|_| rng.gen_bool(0.5)));
                            pref[i][f].union(&extra)
                        })
                        .collect()
                })
                .collect(),
        ),
        QMode::UpperContour => {
            let u = util.as_ref().expect("validated");
            Some(
                (0..n)
                    .map(|i| {
                        (0..total)
                            .map(|f| {
                                let here = &u[i].table[f];
                                LabelSet::from_indices(
                                    cfg.sizes[i],
                                    (0..cfg.sizes[i]).filter(|k| u[i].table[shape.with_coord(f, i, *k)] >= *here),
                                )
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
    };
    repair(&shape, &cfg.constraints, &mut pref, comp.as_mut());
    let corr = |t: Vec<Vec<LabelSet>>| -> Vec<FiniteCorrespondence> {
        t.into_iter()
            .enumerate()
            .map(|(owner, table)| FiniteCorrespondence { owner, table })
            .collect()
    };
    let game = FiniteGame::new(labels, Some(corr(pref)), comp.map(corr), util).expect("generated tables are total");
    QualitativeGame::finite(format!("random-{:016x}", cfg.seed), game)
}

/// Adds own strategies to `Q` when asked, then shrinks `P` until it meets
/// the requested constraints. Every repair only removes from `P`, so the
/// loop terminates.
fn repair(shape: &FiniteGame, c: &Constraints, pref: &mut [Vec<LabelSet>], comp: Option<&mut Vec<Vec<LabelSet>>>) {
    let n = pref.len();
    let total = shape.profile_count();
    let comp = comp.map(|q| {
        if c.q_reflexive {
            for (i, table) in q.iter_mut().enumerate() {
                for (f, s) in table.iter_mut().enumerate() {
                    s.insert(shape.coord(f, i));
                }
            }
        }
        &*q
    });
    if c.irreflexive {
        for (i, table) in pref.iter_mut().enumerate() {
            for (f, s) in table.iter_mut().enumerate() {
                s.remove(shape.coord(f, i));
            }
        }
    }
    let (true, Some(q)) = (c.property_t_pair, comp) else {
        return;
    };
    for i in 0..n {
        for f in 0..total {
            pref[i][f].intersect_with(&q[i][f]);
        }
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for f in 0..total {
                let bad: Vec<usize> = pref[i][f]
                    .iter()
                    .filter(|y| !q[i][shape.with_coord(f, i, *y)].is_subset(&pref[i][f]))
                    .collect();
                for y in bad {
                    pref[i][f].remove(y);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
}

// ---------------------------------------------------------------------------
// Grid discretization

/// Grid points of player `i`: `inf + k * step` inside the space, refined by
/// every constant of the game that lies in the space.
pub fn grid_points(
    space: &IntervalSet,
    constants: &[Rational],
    step: &Rational,
    player: usize,
) -> Result<Vec<Rational>, LabError> {
    let bad = || LabError::Grid(format_rational(step), player + 1);
    let (lo, _) = space.inf().map_err(|_| bad())?;
    let (hi, _) = space.sup().map_err(|_| bad())?;
    let n = grid_steps(&lo, &hi, step).ok_or_else(bad)?;
    let mut points: Vec<Rational> = match n {
        0 => vec![lo.clone()],
        _ => (0..=n)
            .map(|k| lerp(&lo, &hi, k, n))
            .filter(|p| space.contains(p))
            .collect(),
    };
    points.extend(constants.iter().filter(|c| space.contains(c)).cloned());
    points.sort();
    points.dedup();
    Ok(points)
}

/// The finite game on the grid: labels are the rendered grid points and
/// `P_i(x)` is the interval value at `x` intersected with the grid.
pub fn discretize(game: &QualitativeGame, step: &Rational) -> Result<QualitativeGame, LabError> {
    let g = game
        .as_continuum()
        .ok_or_else(|| LabError::Config("discretize needs an interval game".into()))?;
    let consts = g.constants();
    let grids: Vec<Vec<Rational>> = (0..g.players())
        .map(|i| grid_points(g.space(i), &consts, step, i))
        .collect::<Result<_, _>>()?;
    let labels: Vec<Vec<String>> = grids
        .iter()
        .map(|pts| pts.iter().map(format_rational).collect())
        .collect();
    let shape = FiniteGame::new_unchecked(labels.clone(), None, None, None);
    let table = |corr: Corr| -> Vec<FiniteCorrespondence> {
        (0..g.players())
            .map(|i| FiniteCorrespondence {
                owner: i,
                table: (0..shape.profile_count())
                    .map(|f| {
                        let x: Vec<Rational> = shape
                            .unflat(f)
                            .iter()
                            .enumerate()
                            .map(|(j, k)| grids[j][*k].clone())
                            .collect();
                        let v = g.eval(corr, i, &x).expect("validated game");
                        LabelSet::from_indices(
                            grids[i].len(),
                            (0..grids[i].len()).filter(|k| v.contains(&grids[i][*k])),
                        )
                    })
                    .collect(),
            })
            .collect()
    };
    let comp = g.has_comp().then(|| table(Corr::Comp));
    let fg =
        FiniteGame::new(labels, Some(table(Corr::Pref)), comp, None).map_err(|e| LabError::Config(e.to_string()))?;
    Ok(QualitativeGame::finite(
        format!("{}-grid-{}", game.name, format_rational(step)),
        fg,
    ))
}

/// The grid point of a rendered label.
pub fn grid_value(label: &str) -> Rational {
    qualred_intervalset::parse_rational(label).expect("grid labels are rationals")
}

/// A finite pairing over grid labels, as real sets.
pub fn grid_pairing_to_reals(grid: &QualitativeGame, h: &Pairing) -> Vec<IntervalSet> {
    let g = grid.as_finite().expect("grid game");
    h.factors()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            IntervalSet::points(
                f.as_labels()
                    .expect("labels")
                    .iter()
                    .map(|k| grid_value(&g.labels(i)[k])),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Exhaustive elimination orders

pub const DEFAULT_ORACLE_BOUND: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// Distinct terminal pairings, in a canonical order.
    pub limits: Vec<Pairing>,
    /// Condition D held at every pairing reached along every path.
    pub d_everywhere: bool,
    pub visited: usize,
}

/// Depth-first search over every sequence of valid single-strategy removals
/// under `op`; returns the pairings where no removal is valid.
pub fn enumerate_maximal_reductions(
    game: &QualitativeGame,
    op: OperatorKind,
    bound: usize,
) -> Result<OracleResult, LabError> {
    let g = game.as_finite().ok_or(LabError::NotFinite("the oracle"))?;
    if g.profile_count() > bound {
        return Err(LabError::BoundExceeded {
            profiles: g.profile_count(),
            bound,
        });
    }
    let mut seen: HashSet<Pairing> = HashSet::new();
    let mut limits: Vec<Pairing> = Vec::new();
    let mut d_everywhere = true;
    let mut stack = vec![game.full_pairing()];
    while let Some(h) = stack.pop() {
        if !seen.insert(h.clone()) {
            continue;
        }
        if !condition_d_at(game, &h).holds() {
            d_everywhere = false;
        }
        let mut terminal = true;
        for i in 0..g.players() {
            let own = h.factor(i).as_labels().expect("finite").clone();
            for k in own.iter() {
                let mut removal: Vec<StrategySet> = (0..g.players()).map(|j| game.empty_set(j)).collect();
                removal[i] = StrategySet::Labels(LabelSet::from_indices(g.size(i), [k]));
                if let Ok(next) = path_step(game, &h, op, &removal) {
                    terminal = false;
                    stack.push(next);
                }
            }
        }
        if terminal {
            limits.push(h);
        }
    }
    limits.sort_by_cached_key(|h| pairing_to_json(game, h).to_string());
    Ok(OracleResult {
        limits,
        d_everywhere,
        visited: seen.len(),
    })
}

// ---------------------------------------------------------------------------
// Fuzzing

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    /// Both fast limits nonempty ⇒ the `↣` limit lies inside the `⇒` limit.
    TailInsideDouble,
    /// C(t) ⇒ D(t) on every stage of both fast traces.
    CImpliesD,
    /// D everywhere along every elimination order ⇒ one maximal reduction,
    /// equal to the fast limit.
    Confluence,
    /// D(s) for all s < t ⇒ the `↣` and `⇒` traces agree through t.
    Sequence,
    /// The maximal elements survive a fast `⇒` reduction.
    Preservation,
}

impl Check {
    pub const ALL: [Check; 5] = [
        Check::TailInsideDouble,
        Check::CImpliesD,
        Check::Confluence,
        Check::Sequence,
        Check::Preservation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::TailInsideDouble => "lemma1",
            Check::CImpliesD => "lemma2",
            Check::Confluence => "theorem3",
            Check::Sequence => "sequence",
            Check::Preservation => "theorem10",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown check `{s}` (expected lemma1, lemma2, theorem3, sequence or theorem10)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Violation,
    /// The premise of the check did not apply to this game.
    Skipped,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Ok => "ok",
            Outcome::Violation => "violation",
            Outcome::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub check: Check,
    pub trial: usize,
    pub seed: u64,
    pub detail: String,
    /// The generated game.
    pub game: String,
    /// A smaller game with the same violation, after greedy shrinking.
    pub shrunk: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// Fast limit per operator, as pairing JSON.
    pub limits: Vec<(OperatorKind, Value)>,
    /// Number of distinct maximal reductions from the oracle, when run.
    pub maximal_reductions: Option<usize>,
    pub outcomes: Vec<(Check, Outcome)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzReport {
    pub master_seed: u64,
    pub checks: Vec<Check>,
    pub ops: Vec<OperatorKind>,
    pub trials: Vec<TrialRecord>,
    pub findings: Vec<Finding>,
}

impl FuzzReport {
    pub fn violations(&self, check: Check) -> usize {
        self.findings.iter().filter(|f| f.check == check).count()
    }

    pub fn order_dependent(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| t.maximal_reductions.is_some_and(|m| m > 1))
            .count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "master_seed": self.master_seed,
            "trials": self.trials.len(),
            "checks": self.checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
            "ops": self.ops.iter().map(|o| o.name()).collect::<Vec<_>>(),
            "order_dependent_trials": self.order_dependent(),
            "violations": self.checks.iter().map(|c| (c.name().to_string(), json!(self.violations(*c)))).collect::<serde_json::Map<_, _>>(),
            "findings": self.findings.iter().map(|f| json!({
                "check": f.check.name(),
                "trial": f.trial,
                "seed": f.seed,
                "detail": f.detail,
                "game": f.game,
                "shrunk": f.shrunk,
            })).collect::<Vec<_>>(),
            "per_trial": self.trials.iter().map(|t| json!({
                "trial": t.trial,
                "seed": t.seed,
                "limits": t.limits.iter().map(|(op, v)| (op.name().to_string(), v.clone())).collect::<serde_json::Map<_, _>>(),
                "maximal_reductions": t.maximal_reductions,
                "checks": t.outcomes.iter().map(|(c, o)| (c.name().to_string(), json!(o.name()))).collect::<serde_json::Map<_, _>>(),
            })).collect::<Vec<_>>(),
        })
    }

    /// One row per trial.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["trial".to_string(), "seed".into()];
        header.extend(self.ops.iter().map(|o| format!("{o}_limit")));
        header.push("maximal_reductions".into());
        header.extend(self.checks.iter().map(|c| c.name().to_string()));
        w.write_record(&header).expect("in-memory write");
        for t in &self.trials {
            let mut row = vec![t.trial.to_string(), t.seed.to_string()];
            row.extend(t.limits.iter().map(|(_, v)| v.to_string()));
            row.push(t.maximal_reductions.map(|m| m.to_string()).unwrap_or_default());
            row.extend(t.outcomes.iter().map(|(_, o)| o.name().to_string()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Seed of trial `index`, independent of scheduling.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    /// Template; the seed is replaced per trial.
    pub generator: GeneratorConfig,
    /// When set, each trial draws every player's size uniformly from
    /// `1..=max` instead of using the template sizes.
    pub random_sizes: Option<usize>,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub ops: Vec<OperatorKind>,
    pub max_iters: usize,
    /// Step relation explored by the elimination-order oracle.
    pub oracle_op: OperatorKind,
    pub oracle_bound: usize,
}

impl FuzzConfig {
    pub fn new(generator: GeneratorConfig, trials: usize) -> Self {
        FuzzConfig {
            generator,
            random_sizes: None,
            trials,
            checks: Check::ALL.to_vec(),
            ops: vec![OperatorKind::Tail, OperatorKind::Double],
            max_iters: 1000,
            oracle_op: OperatorKind::Arrow,
            oracle_bound: DEFAULT_ORACLE_BOUND,
        }
    }
}

pub fn fuzz(cfg: &FuzzConfig) -> Result<FuzzReport, LabError> {
    let results: Vec<Result<(TrialRecord, Vec<Finding>), LabError>> =
        (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect();
    let mut trials = Vec::with_capacity(cfg.trials);
    let mut findings = Vec::new();
    for r in results {
        let (rec, f) = r?;
        trials.push(rec);
        findings.extend(f);
    }
    Ok(FuzzReport {
        master_seed: cfg.generator.seed,
        checks: cfg.checks.clone(),
        ops: cfg.ops.clone(),
        trials,
        findings,
    })
}

fn trial_config(cfg: &FuzzConfig, t: usize) -> GeneratorConfig {
    let seed = trial_seed(cfg.generator.seed, t);
    let mut g = cfg.generator.clone();
    g.seed = seed;
    if let Some(max) = cfg.random_sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        g.sizes = g.sizes.iter().map(|_| rng.gen_range(1..=max)).collect();
    }
    g
}

fn run_trial(cfg: &FuzzConfig, t: usize) -> Result<(TrialRecord, Vec<Finding>), LabError> {
    let gen = trial_config(cfg, t);
    let game = generate_game(&gen)?;
    let limits = cfg
        .ops
        .iter()
        .map(|op| {
            (
                *op,
                pairing_to_json(&game, star_reduce(&game, *op, cfg.max_iters).limit()),
            )
        })
        .collect();
    let mut outcomes = Vec::new();
    let mut findings = Vec::new();
    let mut maximal_reductions = None;
    for check in &cfg.checks {
        let (outcome, detail) = run_check(&game, *check, cfg);
        if *check == Check::Confluence {
            maximal_reductions = enumerate_maximal_reductions(&game, cfg.oracle_op, cfg.oracle_bound)
                .ok()
                .map(|r| r.limits.len());
        }
        if outcome == Outcome::Violation {
            let shrunk = shrink(&game, *check, cfg);
            findings.push(Finding {
                check: *check,
                trial: t,
                seed: gen.seed,
                detail,
                game: serialize_game(&game),
                shrunk: serialize_game(&shrunk),
            });
        }
        outcomes.push((*check, outcome));
    }
    Ok((
        TrialRecord {
            trial: t,
            seed: gen.seed,
            limits,
            maximal_reductions,
            outcomes,
        },
        findings,
    ))
}

/// Runs one property on one game.
pub fn run_check(game: &QualitativeGame, check: Check, cfg: &FuzzConfig) -> (Outcome, String) {
    let trace = |op| star_reduce(game, op, cfg.max_iters);
    match check {
        Check::TailInsideDouble => {
            let (tail, double) = (trace(OperatorKind::Tail), trace(OperatorKind::Double));
            if tail.limit().any_empty() || double.limit().any_empty() {
                return (Outcome::Skipped, String::new());
            }
            if tail.limit().is_subset(double.limit()) {
                (Outcome::Ok, String::new())
            } else {
                (
                    Outcome::Violation,
                    format!(
                        "tail limit {} is not inside double limit {}",
                        pairing_to_json(game, tail.limit()),
                        pairing_to_json(game, double.limit())
                    ),
                )
            }
        }
        Check::CImpliesD => {
            for op in [OperatorKind::Tail, OperatorKind::Double] {
                let tr = trace(op);
                for (s, h) in tr.stages.iter().enumerate() {
                    if condition_c_at(game, h).holds() && !condition_d_at(game, h).holds() {
                        return (Outcome::Violation, format!("{op} stage {s}: C holds but D fails"));
                    }
                }
            }
            (Outcome::Ok, String::new())
        }
        Check::Confluence => {
            let op = cfg.oracle_op;
            let Ok(r) = enumerate_maximal_reductions(game, op, cfg.oracle_bound) else {
                return (Outcome::Skipped, "above the oracle bound".into());
            };
            if !r.d_everywhere {
                return (Outcome::Skipped, String::new());
            }
            let fast = trace(op);
            if fast.limit().any_empty() {
                return (Outcome::Skipped, "empty fast limit".into());
            }
            if r.limits.len() == 1 && &r.limits[0] == fast.limit() {
                (Outcome::Ok, String::new())
            } else {
                (
                    Outcome::Violation,
                    format!(
                        "{} maximal reductions under {op}; fast limit {}",
                        r.limits.len(),
                        pairing_to_json(game, fast.limit())
                    ),
                )
            }
        }
        Check::Sequence => sequence_check(game, &trace(OperatorKind::Tail), &trace(OperatorKind::Double)),
        Check::Preservation => {
            if !game.has_comp() {
                return (Outcome::Skipped, "no Q".into());
            }
            let r = check_preservation(game, &trace(OperatorKind::Double));
            match r.label {
                PreservationLabel::TheoremViolation => (
                    Outcome::Violation,
                    format!(
                        "maximal elements differ: {} only in G, {} only in the reduction",
                        r.only_original.len(),
                        r.only_reduced.len()
                    ),
                ),
                PreservationLabel::ExpectedCounterexample => (Outcome::Skipped, "hypotheses fail".into()),
                PreservationLabel::Equal => (Outcome::Ok, String::new()),
            }
        }
    }
}

fn sequence_check(game: &QualitativeGame, tail: &ReductionTrace, double: &ReductionTrace) -> (Outcome, String) {
    let stage = |tr: &ReductionTrace, t: usize| tr.stages.get(t).unwrap_or(tr.limit()).clone();
    let horizon = tail.stages.len().max(double.stages.len());
    for t in 0..horizon {
        let (a, b) = (stage(tail, t), stage(double, t));
        if a != b {
            return (
                Outcome::Violation,
                format!(
                    "stage {t}: tail {} vs double {}",
                    pairing_to_json(game, &a),
                    pairing_to_json(game, &b)
                ),
            );
        }
        if !condition_d_at(game, &a).holds() {
            break;
        }
    }
    (Outcome::Ok, String::new())
}

/// Greedily drops single strategies while the violation persists.
pub fn shrink(game: &QualitativeGame, check: Check, cfg: &FuzzConfig) -> QualitativeGame {
    let mut current = game.clone();
    loop {
        let Some(g) = current.as_finite() else { return current };
        let mut next = None;
        'search: for i in 0..g.players() {
            if g.size(i) <= 1 {
                continue;
            }
            for k in 0..g.size(i) {
                let mut h = current.full_pairing();
                let mut f = h.factor(i).as_labels().expect("finite").clone();
                f.remove(k);
                h.set_factor(i, StrategySet::Labels(f));
                let candidate = restrict(&current, &h);
                if run_check(&candidate, check, cfg).0 == Outcome::Violation {
                    next = Some(candidate);
                    break 'search;
                }
            }
        }
        match next {
            Some(c) => current = c,
            None => return current,
        }
    }
}
