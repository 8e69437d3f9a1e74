//! Strategy subsets shared by both backends, and pairings built from them.

use std::fmt;

use fixedbitset::FixedBitSet;
use qualred_intervalset::{IntervalSet, Rational};

/// Subset of a finite player's labels, addressed by label index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelSet(FixedBitSet);

impl LabelSet {
    pub fn empty(universe: usize) -> Self {
        LabelSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        LabelSet(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut set = Self::empty(universe);
        for k in indices {
            set.insert(k);
        }
        set
    }

    /// Number of labels the set ranges over (not its cardinality).
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, k: usize) {
        self.0.insert(k);
    }

    pub fn remove(&mut self, k: usize) {
        self.0.set(k, false);
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.contains(k)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    pub fn intersect(&self, other: &LabelSet) -> LabelSet {
        LabelSet(&self.0 & &other.0)
    }

    pub fn intersect_with(&mut self, other: &LabelSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn union(&self, other: &LabelSet) -> LabelSet {
        LabelSet(&self.0 | &other.0)
    }

    pub fn difference(&self, other: &LabelSet) -> LabelSet {
        let mut out = self.0.clone();
        out.difference_with(&other.0);
        LabelSet(out)
    }

    pub fn is_subset(&self, other: &LabelSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &LabelSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

/// A single strategy of one player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Label(usize),
    Point(Rational),
}

impl Strategy {
    pub fn as_label(&self) -> Option<usize> {
        match self {
            Strategy::Label(k) => Some(*k),
            Strategy::Point(_) => None,
        }
    }

    pub fn as_point(&self) -> Option<&Rational> {
        match self {
            Strategy::Point(p) => Some(p),
            Strategy::Label(_) => None,
        }
    }
}

/// A concrete subset of one player's strategies.
///
/// Mixing the two variants in one operation is a programming error and
/// panics; every game keeps a single backend.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StrategySet {
    Labels(LabelSet),
    Reals(IntervalSet),
}

macro_rules! zip_sets {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $labels:expr, $reals:expr) => {
        match ($a, $b) {
            (StrategySet::Labels($x), StrategySet::Labels($y)) => $labels,
            (StrategySet::Reals($x), StrategySet::Reals($y)) => $reals,
            _ => panic!("strategy sets from different backends"),
        }
    };
}

impl StrategySet {
    pub fn is_empty(&self) -> bool {
        match self {
            StrategySet::Labels(s) => s.is_empty(),
            StrategySet::Reals(s) => s.is_empty(),
        }
    }

    pub fn contains(&self, x: &Strategy) -> bool {
        match (self, x) {
            (StrategySet::Labels(s), Strategy::Label(k)) => *k < s.universe() && s.contains(*k),
            (StrategySet::Reals(s), Strategy::Point(p)) => s.contains(p),
            _ => false,
        }
    }

    pub fn intersect(&self, other: &StrategySet) -> StrategySet {
        zip_sets!(
            self,
            other,
            |a, b| StrategySet::Labels(a.intersect(b)),
            StrategySet::Reals(a.intersect(b))
        )
    }

    pub fn union(&self, other: &StrategySet) -> StrategySet {
        zip_sets!(
            self,
            other,
            |a, b| StrategySet::Labels(a.union(b)),
            StrategySet::Reals(a.union(b))
        )
    }

    pub fn difference(&self, other: &StrategySet) -> StrategySet {
        zip_sets!(
            self,
            other,
            |a, b| StrategySet::Labels(a.difference(b)),
            StrategySet::Reals(a.difference(b))
        )
    }

    pub fn is_subset(&self, other: &StrategySet) -> bool {
        zip_sets!(self, other, |a, b| a.is_subset(b), a.is_subset(b))
    }

    /// The empty set of the same kind (and label universe) as `self`.
    pub fn emptied(&self) -> StrategySet {
        match self {
            StrategySet::Labels(s) => StrategySet::Labels(LabelSet::empty(s.universe())),
            StrategySet::Reals(_) => StrategySet::Reals(IntervalSet::empty()),
        }
    }

    /// Some member: the first label, or a point of the first interval part.
    pub fn representative(&self) -> Option<Strategy> {
        match self {
            StrategySet::Labels(s) => s.first().map(Strategy::Label),
            StrategySet::Reals(s) => s.representative().map(Strategy::Point),
        }
    }

    pub fn as_labels(&self) -> Option<&LabelSet> {
        match self {
            StrategySet::Labels(s) => Some(s),
            StrategySet::Reals(_) => None,
        }
    }

    pub fn as_reals(&self) -> Option<&IntervalSet> {
        match self {
            StrategySet::Reals(s) => Some(s),
            StrategySet::Labels(_) => None,
        }
    }
}

/// Per-player strategy subsets `H_i ⊆ G_i`; any factor may be empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing {
    factors: Vec<StrategySet>,
}

impl Pairing {
    pub fn new(factors: Vec<StrategySet>) -> Self {
        Pairing { factors }
    }

    pub fn players(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, i: usize) -> &StrategySet {
        &self.factors[i]
    }

    pub fn factors(&self) -> &[StrategySet] {
        &self.factors
    }

    pub fn set_factor(&mut self, i: usize, set: StrategySet) {
        self.factors[i] = set;
    }

    /// True when some player other than `i` has no strategies left.
    pub fn opponents_vacant(&self, i: usize) -> bool {
        self.factors.iter().enumerate().any(|(j, f)| j != i && f.is_empty())
    }

    pub fn any_empty(&self) -> bool {
        self.factors.iter().any(StrategySet::is_empty)
    }

    /// Componentwise inclusion.
    pub fn is_subset(&self, other: &Pairing) -> bool {
        self.factors.len() == other.factors.len()
            && self.factors.iter().zip(&other.factors).all(|(a, b)| a.is_subset(b))
    }

    /// Componentwise difference, one set per player.
    pub fn minus(&self, other: &Pairing) -> Vec<StrategySet> {
        self.factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| a.difference(b))
            .collect()
    }

    /// Removes `removed[i]` from every factor.
    pub fn without(&self, removed: &[StrategySet]) -> Pairing {
        Pairing {
            factors: self.factors.iter().zip(removed).map(|(a, r)| a.difference(r)).collect(),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Label(k) => write!(f, "#{k}"),
            Strategy::Point(p) => f.write_str(&qualred_intervalset::format_rational(p)),
        }
    }
}
