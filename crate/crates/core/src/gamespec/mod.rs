//! Qualitative games: finite tables or piecewise interval correspondences.

mod dsl;
mod json;

use std::fmt;

use qualred_intervalset::{format_rational, Boundary, IntervalSet, Rational};
use thiserror::Error;

use crate::regions::Decomposition;
use crate::sets::{LabelSet, Pairing, Strategy, StrategySet};

use dsl::render_value as dsl_value;
pub use dsl::{parse_game, serialize_game, ParseError, ParseErrorKind};
pub use json::{game_to_json, pairing_to_json, set_to_json};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("preferences can only be derived from utilities in a finite game")]
    ContinuumUtility,
    #[error("no utility table for player {0}")]
    MissingUtility(usize),
    #[error("the game has no comparison correspondence")]
    MissingComparison,
    #[error("no cell of correspondence {corr} for player {player} contains {profile}")]
    Uncovered { corr: Corr, player: usize, profile: String },
    #[error("invalid game: {0}")]
    Invalid(String),
}

/// Which correspondence of a game is meant: `P` or `Q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Corr {
    Pref,
    Comp,
}

impl fmt::Display for Corr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Corr::Pref => "P",
            Corr::Comp => "Q",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpace {
    Finite(Vec<String>),
    Continuum(IntervalSet),
}

/// One strategy per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Profile {
    Labels(Vec<usize>),
    Points(Vec<Rational>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EndpointExpr {
    Const(Rational),
    /// Zero-based player index.
    Coord(usize),
}

impl EndpointExpr {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        match self {
            EndpointExpr::Const(c) => c.clone(),
            EndpointExpr::Coord(j) => x[*j].clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymbolicValue {
    Empty,
    Interval {
        lo: EndpointExpr,
        lo_closed: bool,
        hi: EndpointExpr,
        hi_closed: bool,
    },
}

impl SymbolicValue {
    /// Concrete value at `x`; reversed or degenerate-open intervals are empty.
    pub fn eval(&self, x: &[Rational]) -> IntervalSet {
        match self {
            SymbolicValue::Empty => IntervalSet::empty(),
            SymbolicValue::Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            } => IntervalSet::from_bounds(
                Boundary::new(lo.eval(x), *lo_closed),
                Boundary::new(hi.eval(x), *hi_closed),
            ),
        }
    }

    fn constants(&self, out: &mut Vec<Rational>) {
        if let SymbolicValue::Interval { lo, hi, .. } = self {
            for e in [lo, hi] {
                if let EndpointExpr::Const(c) = e {
                    out.push(c.clone());
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl RelOp {
    pub fn holds(self, a: &Rational, b: &Rational) -> bool {
        match self {
            RelOp::Lt => a < b,
            RelOp::Le => a <= b,
            RelOp::Eq => a == b,
            RelOp::Ge => a >= b,
            RelOp::Gt => a > b,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }
}

/// `x_left op x_right` between two coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub left: usize,
    pub op: RelOp,
    pub right: usize,
}

impl Relation {
    pub fn holds(&self, x: &[Rational]) -> bool {
        self.op.holds(&x[self.left], &x[self.right])
    }
}

/// A product of per-player sets, optionally cut by coordinate comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub factors: Vec<IntervalSet>,
    pub relations: Vec<Relation>,
}

impl Cell {
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.factors.iter().zip(x).all(|(f, v)| f.contains(v)) && self.relations.iter().all(|r| r.holds(x))
    }

    fn constants(&self, out: &mut Vec<Rational>) {
        for f in &self.factors {
            out.extend(f.endpoints());
        }
    }

    /// Renders e.g. `x1 in [0,1) and x1 < x2`, with 1-based player numbers.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .enumerate()
            .map(|(j, f)| format!("x{} in {f}", j + 1))
            .collect();
        parts.extend(
            self.relations
                .iter()
                .map(|r| format!("x{} {} x{}", r.left + 1, r.op.symbol(), r.right + 1)),
        );
        parts.join(" and ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Piece {
    pub cell: Cell,
    pub value: SymbolicValue,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseCorrespondence {
    pub owner: usize,
    pub pieces: Vec<Piece>,
}

impl PiecewiseCorrespondence {
    pub fn new(owner: usize, mut pieces: Vec<Piece>) -> Self {
        pieces.sort_by_cached_key(|p| piece_key(&p.cell));
        PiecewiseCorrespondence { owner, pieces }
    }

    pub fn piece_at(&self, x: &[Rational]) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.cell.contains(x))
    }
}

/// Endpoints and closedness of each part, per factor.
type FactorKey = Vec<Vec<(Rational, bool, Rational, bool)>>;

fn piece_key(cell: &Cell) -> (FactorKey, Vec<Relation>) {
    let factors = cell
        .factors
        .iter()
        .map(|f| {
            f.parts()
                .iter()
                .map(|p| {
                    (
                        p.lo().value.clone(),
                        !p.lo().closed,
                        p.hi().value.clone(),
                        p.hi().closed,
                    )
                })
                .collect()
        })
        .collect();
    (factors, cell.relations.clone())
}

/// Correspondence table indexed by flat profile index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteCorrespondence {
    pub owner: usize,
    pub table: Vec<LabelSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UtilityTable {
    pub owner: usize,
    pub table: Vec<Rational>,
}

/// Finite backend. Profiles are numbered in row-major order with the last
/// player varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGame {
    labels: Vec<Vec<String>>,
    strides: Vec<usize>,
    pref: Vec<FiniteCorrespondence>,
    comp: Option<Vec<FiniteCorrespondence>>,
    util: Option<Vec<UtilityTable>>,
}

impl FiniteGame {
    /// Builds a game; when `pref` is `None` it is derived from `util`.
    pub fn new(
        labels: Vec<Vec<String>>,
        pref: Option<Vec<FiniteCorrespondence>>,
        comp: Option<Vec<FiniteCorrespondence>>,
        util: Option<Vec<UtilityTable>>,
    ) -> Result<Self, GameError> {
        let n = labels.len();
        if n < 2 {
            return Err(GameError::Invalid("a game needs at least two players".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(GameError::Invalid(format!("player {} has no strategies", i + 1)));
            }
            let mut sorted = l.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != l.len() {
                return Err(GameError::Invalid(format!("player {} repeats a label", i + 1)));
            }
        }
        let mut strides = vec![1; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * labels[i + 1].len();
        }
        let total = strides[0] * labels[0].len();
        let check_corr = |c: &[FiniteCorrespondence], what: &str| -> Result<(), GameError> {
            if c.len() != n {
                return Err(GameError::Invalid(format!("{what} needs one table per player")));
            }
            for (i, t) in c.iter().enumerate() {
                if t.owner != i || t.table.len() != total || t.table.iter().any(|s| s.universe() != labels[i].len()) {
                    return Err(GameError::Invalid(format!("{what} table {} is malformed", i + 1)));
                }
            }
            Ok(())
        };
        if let Some(u) = &util {
            if u.len() != n
                || u.iter()
                    .enumerate()
                    .any(|(i, t)| t.owner != i || t.table.len() != total)
            {
                return Err(GameError::Invalid("utility tables are malformed".into()));
            }
        }
        if let Some(c) = &comp {
            check_corr(c, "comparison")?;
        }
        if let Some(p) = &pref {
            check_corr(p, "preference")?;
        }
        let mut game = FiniteGame {
            labels,
            strides,
            pref: Vec::new(),
            comp,
            util,
        };
        match pref {
            Some(p) => game.pref = p,
            None => game.pref = game.derived_pref()?,
        }
        Ok(game)
    }

    /// Skips validation and allows empty strategy lists; used for
    /// restrictions, which may empty a player.
    pub(crate) fn new_unchecked(
        labels: Vec<Vec<String>>,
        pref: Option<Vec<FiniteCorrespondence>>,
        comp: Option<Vec<FiniteCorrespondence>>,
        util: Option<Vec<UtilityTable>>,
    ) -> Self {
        let n = labels.len();
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * labels[i + 1].len();
        }
        FiniteGame {
            labels,
            strides,
            pref: pref.unwrap_or_default(),
            comp,
            util,
        }
    }

    pub fn players(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self, i: usize) -> &[String] {
        &self.labels[i]
    }

    pub fn size(&self, i: usize) -> usize {
        self.labels[i].len()
    }

    pub fn profile_count(&self) -> usize {
        self.strides[0] * self.labels[0].len()
    }

    pub fn flat(&self, x: &[usize]) -> usize {
        x.iter().zip(&self.strides).map(|(k, s)| k * s).sum()
    }

    pub fn unflat(&self, mut f: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let k = f / s;
                f %= s;
                k
            })
            .collect()
    }

    pub fn coord(&self, f: usize, i: usize) -> usize {
        (f / self.strides[i]) % self.labels[i].len()
    }

    /// Replaces player `i`'s coordinate of profile `f` by `k`.
    pub fn with_coord(&self, f: usize, i: usize, k: usize) -> usize {
        f - self.coord(f, i) * self.strides[i] + k * self.strides[i]
    }

    /// Flat indices of all profiles whose coordinates lie in `sets`.
    pub fn product(&self, sets: &[LabelSet]) -> Vec<usize> {
        let mut out = vec![0usize];
        for (i, s) in sets.iter().enumerate() {
            let members: Vec<usize> = s.iter().collect();
            out = out
                .into_iter()
                .flat_map(|f| members.iter().map(move |k| f + k * self.strides[i]))
                .collect();
        }
        out
    }

    pub fn pref(&self, i: usize, f: usize) -> &LabelSet {
        &self.pref[i].table[f]
    }

    pub fn comp(&self, i: usize, f: usize) -> Option<&LabelSet> {
        self.comp.as_ref().map(|c| &c[i].table[f])
    }

    pub fn corr(&self, corr: Corr, i: usize, f: usize) -> Option<&LabelSet> {
        match corr {
            Corr::Pref => Some(self.pref(i, f)),
            Corr::Comp => self.comp(i, f),
        }
    }

    pub fn utility(&self, i: usize, f: usize) -> Option<&Rational> {
        self.util.as_ref().map(|u| &u[i].table[f])
    }

    pub fn pref_tables(&self) -> &[FiniteCorrespondence] {
        &self.pref
    }

    pub fn comp_tables(&self) -> Option<&[FiniteCorrespondence]> {
        self.comp.as_deref()
    }

    pub fn util_tables(&self) -> Option<&[UtilityTable]> {
        self.util.as_deref()
    }

    pub fn set_comp(&mut self, comp: Option<Vec<FiniteCorrespondence>>) {
        self.comp = comp;
    }

    fn derived_pref(&self) -> Result<Vec<FiniteCorrespondence>, GameError> {
        let util = self.util.as_ref().ok_or(GameError::MissingUtility(1))?;
        Ok((0..self.players())
            .map(|i| FiniteCorrespondence {
                owner: i,
                table: (0..self.profile_count())
                    .map(|f| {
                        let here = &util[i].table[f];
                        LabelSet::from_indices(
                            self.size(i),
                            (0..self.size(i)).filter(|k| util[i].table[self.with_coord(f, i, *k)] > *here),
                        )
                    })
                    .collect(),
            })
            .collect())
    }
}

/// Continuum backend: one interval-set space per player.
///
/// `ambients` are the spaces the correspondences were authored on; after a
/// restriction the spaces shrink but the ambients stay, so values are always
/// intersected with the current space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuumGame {
    spaces: Vec<IntervalSet>,
    ambients: Vec<IntervalSet>,
    pref: Vec<PiecewiseCorrespondence>,
    comp: Option<Vec<PiecewiseCorrespondence>>,
}

/// A defect found while validating a piecewise correspondence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverageError {
    Overlap {
        first: usize,
        second: usize,
        witness: Vec<Rational>,
    },
    Uncovered {
        witness: Vec<Rational>,
    },
    Escapes {
        piece: usize,
        witness: Vec<Rational>,
    },
}

impl ContinuumGame {
    pub fn new(
        spaces: Vec<IntervalSet>,
        ambients: Vec<IntervalSet>,
        pref: Vec<PiecewiseCorrespondence>,
        comp: Option<Vec<PiecewiseCorrespondence>>,
    ) -> Result<Self, GameError> {
        let game = ContinuumGame::unchecked(spaces, ambients, pref, comp)?;
        for corr in [Corr::Pref, Corr::Comp] {
            for i in 0..game.players() {
                let Some(c) = game.correspondence(corr, i) else {
                    continue;
                };
                if let Err(e) = game.check_correspondence(c) {
                    return Err(GameError::Invalid(format!(
                        "{corr}_{}: {}",
                        i + 1,
                        describe_coverage(&e)
                    )));
                }
            }
        }
        Ok(game)
    }

    pub(crate) fn unchecked(
        spaces: Vec<IntervalSet>,
        ambients: Vec<IntervalSet>,
        pref: Vec<PiecewiseCorrespondence>,
        comp: Option<Vec<PiecewiseCorrespondence>>,
    ) -> Result<Self, GameError> {
        let n = spaces.len();
        if n < 2 {
            return Err(GameError::Invalid("a game needs at least two players".into()));
        }
        if ambients.len() != n || pref.len() != n || comp.as_ref().is_some_and(|c| c.len() != n) {
            return Err(GameError::Invalid("one space and correspondence per player".into()));
        }
        for (i, (s, a)) in spaces.iter().zip(&ambients).enumerate() {
            if !s.is_subset(a) {
                return Err(GameError::Invalid(format!("space {} escapes its ambient set", i + 1)));
            }
        }
        Ok(ContinuumGame {
            spaces,
            ambients,
            pref,
            comp,
        })
    }

    pub fn players(&self) -> usize {
        self.spaces.len()
    }

    pub fn space(&self, i: usize) -> &IntervalSet {
        &self.spaces[i]
    }

    pub fn spaces(&self) -> &[IntervalSet] {
        &self.spaces
    }

    pub fn ambient(&self, i: usize) -> &IntervalSet {
        &self.ambients[i]
    }

    pub fn correspondence(&self, corr: Corr, i: usize) -> Option<&PiecewiseCorrespondence> {
        match corr {
            Corr::Pref => Some(&self.pref[i]),
            Corr::Comp => self.comp.as_ref().map(|c| &c[i]),
        }
    }

    pub fn has_comp(&self) -> bool {
        self.comp.is_some()
    }

    /// `corr_i(x)` intersected with player `i`'s current space.
    pub fn eval(&self, corr: Corr, i: usize, x: &[Rational]) -> Result<IntervalSet, GameError> {
        let c = self.correspondence(corr, i).ok_or(GameError::MissingComparison)?;
        let piece = c.piece_at(x).ok_or_else(|| GameError::Uncovered {
            corr,
            player: i + 1,
            profile: render_point(x),
        })?;
        Ok(piece.value.eval(x).intersect(&self.spaces[i]))
    }

    /// Every rational literal in spaces, ambients, cells and values.
    pub fn constants(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        for s in self.spaces.iter().chain(&self.ambients) {
            out.extend(s.endpoints());
        }
        let comps = self.comp.iter().flatten();
        for c in self.pref.iter().chain(comps) {
            for p in &c.pieces {
                p.cell.constants(&mut out);
                p.value.constants(&mut out);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Exactly one piece must match each profile of the product of spaces,
    /// and its raw value must stay inside the owner's ambient set.
    pub fn check_correspondence(&self, c: &PiecewiseCorrespondence) -> Result<(), CoverageError> {
        let d = Decomposition::new(&self.spaces, self.constants());
        for r in d.regions() {
            let x = d.sample(&r);
            let mut hits = c.pieces.iter().enumerate().filter(|(_, p)| p.cell.contains(&x));
            let Some((k, piece)) = hits.next() else {
                return Err(CoverageError::Uncovered { witness: x });
            };
            if let Some((k2, _)) = hits.next() {
                return Err(CoverageError::Overlap {
                    first: k,
                    second: k2,
                    witness: x,
                });
            }
            if !piece.value.eval(&x).is_subset(&self.ambients[c.owner]) {
                return Err(CoverageError::Escapes { piece: k, witness: x });
            }
        }
        Ok(())
    }

    /// Restriction to `h`: spaces shrink, cell factors are cut to `h`, and
    /// pieces whose box becomes empty are dropped.
    pub fn restricted(&self, h: &[IntervalSet]) -> ContinuumGame {
        let cut = |c: &PiecewiseCorrespondence| {
            PiecewiseCorrespondence::new(
                c.owner,
                c.pieces
                    .iter()
                    .filter_map(|p| {
                        let factors: Vec<IntervalSet> =
                            p.cell.factors.iter().zip(h).map(|(f, s)| f.intersect(s)).collect();
                        (!factors.iter().any(IntervalSet::is_empty)).then(|| Piece {
                            cell: Cell {
                                factors,
                                relations: p.cell.relations.clone(),
                            },
                            value: p.value.clone(),
                        })
                    })
                    .collect(),
            )
        };
        ContinuumGame {
            spaces: h.to_vec(),
            ambients: self.ambients.clone(),
            pref: self.pref.iter().map(cut).collect(),
            comp: self.comp.as_ref().map(|c| c.iter().map(cut).collect()),
        }
    }
}

pub(crate) fn describe_coverage(e: &CoverageError) -> String {
    match e {
        CoverageError::Overlap { first, second, witness } => format!(
            "pieces {} and {} overlap at {}",
            first + 1,
            second + 1,
            render_point(witness)
        ),
        CoverageError::Uncovered { witness } => {
            format!("no piece covers {}", render_point(witness))
        }
        CoverageError::Escapes { piece, witness } => format!(
            "value of piece {} leaves the carrier at {}",
            piece + 1,
            render_point(witness)
        ),
    }
}

pub fn render_point(x: &[Rational]) -> String {
    let coords: Vec<String> = x.iter().map(format_rational).collect();
    format!("({})", coords.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Finite(FiniteGame),
    Continuum(ContinuumGame),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QualitativeGame {
    pub name: String,
    pub backend: Backend,
}

impl QualitativeGame {
    pub fn finite(name: impl Into<String>, game: FiniteGame) -> Self {
        QualitativeGame {
            name: name.into(),
            backend: Backend::Finite(game),
        }
    }

    pub fn continuum(name: impl Into<String>, game: ContinuumGame) -> Self {
        QualitativeGame {
            name: name.into(),
            backend: Backend::Continuum(game),
        }
    }

    pub fn players(&self) -> usize {
        match &self.backend {
            Backend::Finite(g) => g.players(),
            Backend::Continuum(g) => g.players(),
        }
    }

    pub fn as_finite(&self) -> Option<&FiniteGame> {
        match &self.backend {
            Backend::Finite(g) => Some(g),
            Backend::Continuum(_) => None,
        }
    }

    pub fn as_continuum(&self) -> Option<&ContinuumGame> {
        match &self.backend {
            Backend::Continuum(g) => Some(g),
            Backend::Finite(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.backend, Backend::Finite(_))
    }

    pub fn has_comp(&self) -> bool {
        match &self.backend {
            Backend::Finite(g) => g.comp.is_some(),
            Backend::Continuum(g) => g.has_comp(),
        }
    }

    pub fn space(&self, i: usize) -> StrategySpace {
        match &self.backend {
            Backend::Finite(g) => StrategySpace::Finite(g.labels[i].clone()),
            Backend::Continuum(g) => StrategySpace::Continuum(g.spaces[i].clone()),
        }
    }

    /// `G_i` as a strategy set.
    pub fn full_set(&self, i: usize) -> StrategySet {
        match &self.backend {
            Backend::Finite(g) => StrategySet::Labels(LabelSet::full(g.size(i))),
            Backend::Continuum(g) => StrategySet::Reals(g.spaces[i].clone()),
        }
    }

    pub fn full_pairing(&self) -> Pairing {
        Pairing::new((0..self.players()).map(|i| self.full_set(i)).collect())
    }

    pub fn empty_set(&self, i: usize) -> StrategySet {
        self.full_set(i).emptied()
    }

    /// Evaluates `P_i` or `Q_i` at a profile.
    pub fn eval_value(&self, corr: Corr, i: usize, x: &Profile) -> Result<StrategySet, GameError> {
        match (&self.backend, x) {
            (Backend::Finite(g), Profile::Labels(k)) => g
                .corr(corr, i, g.flat(k))
                .cloned()
                .map(StrategySet::Labels)
                .ok_or(GameError::MissingComparison),
            (Backend::Continuum(g), Profile::Points(p)) => g.eval(corr, i, p).map(StrategySet::Reals),
            _ => Err(GameError::Invalid("profile does not match the game's backend".into())),
        }
    }

    /// Replaces `P` by the strict-improvement correspondence of the utilities.
    pub fn derive_pref_from_utility(&self) -> Result<QualitativeGame, GameError> {
        let g = self.as_finite().ok_or(GameError::ContinuumUtility)?;
        let mut out = g.clone();
        out.pref = g.derived_pref()?;
        Ok(QualitativeGame::finite(self.name.clone(), out))
    }

    pub fn render_strategy(&self, i: usize, x: &Strategy) -> String {
        match (&self.backend, x) {
            (Backend::Finite(g), Strategy::Label(k)) => g.labels[i][*k].clone(),
            (_, Strategy::Point(p)) => format_rational(p),
            (_, Strategy::Label(k)) => format!("#{k}"),
        }
    }

    /// `{a, c}` for label sets, the interval grammar for real sets.
    pub fn render_set(&self, i: usize, s: &StrategySet) -> String {
        match (&self.backend, s) {
            (Backend::Finite(g), StrategySet::Labels(l)) => {
                let names: Vec<&str> = l.iter().map(|k| g.labels[i][k].as_str()).collect();
                format!("{{{}}}", names.join(", "))
            }
            (_, StrategySet::Reals(r)) => r.to_string(),
            (_, StrategySet::Labels(l)) => format!("{l:?}"),
        }
    }

    pub fn render_profile(&self, x: &Profile) -> String {
        match (&self.backend, x) {
            (Backend::Finite(g), Profile::Labels(k)) => {
                let names: Vec<&str> = k.iter().enumerate().map(|(i, k)| g.labels[i][*k].as_str()).collect();
                format!("({})", names.join(", "))
            }
            (_, Profile::Points(p)) => render_point(p),
            (_, Profile::Labels(k)) => format!("{k:?}"),
        }
    }

    pub fn profile_strategies(&self, x: &Profile) -> Vec<Strategy> {
        match x {
            Profile::Labels(k) => k.iter().map(|k| Strategy::Label(*k)).collect(),
            Profile::Points(p) => p.iter().cloned().map(Strategy::Point).collect(),
        }
    }

    /// Parses one strategy of player `i` from text (label or rational).
    pub fn parse_strategy(&self, i: usize, text: &str) -> Option<Strategy> {
        match &self.backend {
            Backend::Finite(g) => g.labels[i].iter().position(|l| l == text.trim()).map(Strategy::Label),
            Backend::Continuum(g) => qualred_intervalset::parse_rational(text.trim())
                .ok()
                .filter(|p| g.spaces[i].contains(p))
                .map(Strategy::Point),
        }
    }
}

#[cfg(test)]
mod tests;
