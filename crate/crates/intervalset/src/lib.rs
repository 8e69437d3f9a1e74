//! Exact finite unions of intervals over the rationals.
//!
//! Every [`IntervalSet`] is kept in a single canonical form: parts sorted by
//! their lower endpoint, pairwise disjoint, and never adjacent in a way that
//! would let two of them merge into one interval. Two sets describing the
//! same points therefore compare equal with `==`.
//!
//! ```
//! use qualred_intervalset::IntervalSet;
//!
//! let a: IntervalSet = "[0,1/2) u (1/2,1]".parse().unwrap();
//! let b: IntervalSet = "{1/2}".parse().unwrap();
//! assert_eq!(a.union(&b).to_string(), "[0,1]");
//! ```

mod text;

use std::cmp::Ordering;

use num_traits::Zero;
use thiserror::Error;

pub use num_rational::BigRational as Rational;
pub use text::{format_rational, parse_rational, ParseSetError};

/// Builds a rational from a numerator/denominator pair of machine integers.
///
/// Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("set {set} is not contained in carrier {carrier}")]
    NotSubset { set: String, carrier: String },
    #[error("the empty set has no supremum or infimum")]
    EmptyExtremum,
}

/// One endpoint of an interval.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Boundary {
    pub value: Rational,
    pub closed: bool,
}

impl Boundary {
    pub fn closed(value: Rational) -> Self {
        Boundary { value, closed: true }
    }

    pub fn open(value: Rational) -> Self {
        Boundary { value, closed: false }
    }

    pub fn new(value: Rational, closed: bool) -> Self {
        Boundary { value, closed }
    }
}

// Position of a lower boundary on the line: a closed bound starts at its
// value, an open one just after it.
fn cmp_lower(a: &Boundary, b: &Boundary) -> Ordering {
    a.value.cmp(&b.value).then_with(|| b.closed.cmp(&a.closed))
}

// Upper boundaries: an open bound ends just before its value.
fn cmp_upper(a: &Boundary, b: &Boundary) -> Ordering {
    a.value.cmp(&b.value).then_with(|| a.closed.cmp(&b.closed))
}

fn max_lower(a: &Boundary, b: &Boundary) -> Boundary {
    if cmp_lower(a, b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

fn min_upper(a: &Boundary, b: &Boundary) -> Boundary {
    if cmp_upper(a, b) == Ordering::Greater {
        b.clone()
    } else {
        a.clone()
    }
}

/// A nonempty interval with rational endpoints.
///
/// Either `lo.value < hi.value`, or both values coincide and both sides are
/// closed (a single point).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Boundary,
    hi: Boundary,
}

impl Interval {
    /// Returns `None` when the endpoints describe the empty set.
    pub fn new(lo: Boundary, hi: Boundary) -> Option<Self> {
        match lo.value.cmp(&hi.value) {
            Ordering::Less => Some(Interval { lo, hi }),
            Ordering::Equal if lo.closed && hi.closed => Some(Interval { lo, hi }),
            _ => None,
        }
    }

    pub fn point(p: Rational) -> Self {
        Interval {
            lo: Boundary::closed(p.clone()),
            hi: Boundary::closed(p),
        }
    }

    pub fn lo(&self) -> &Boundary {
        &self.lo
    }

    pub fn hi(&self) -> &Boundary {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo.value == self.hi.value
    }

    pub fn contains(&self, p: &Rational) -> bool {
        let above = match p.cmp(&self.lo.value) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo.closed,
            Ordering::Less => false,
        };
        let below = match p.cmp(&self.hi.value) {
            Ordering::Less => true,
            Ordering::Equal => self.hi.closed,
            Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::new(max_lower(&self.lo, &other.lo), min_upper(&self.hi, &other.hi))
    }

    /// A member of the interval: the lower endpoint when closed, otherwise
    /// the midpoint.
    pub fn representative(&self) -> Rational {
        if self.lo.closed {
            self.lo.value.clone()
        } else {
            midpoint(&self.lo.value, &self.hi.value)
        }
    }

    fn closure(&self) -> Interval {
        Interval {
            lo: Boundary::closed(self.lo.value.clone()),
            hi: Boundary::closed(self.hi.value.clone()),
        }
    }
}

pub fn midpoint(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(2.into())
}

/// Finite union of [`Interval`]s in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    pub fn point(p: Rational) -> Self {
        IntervalSet {
            parts: vec![Interval::point(p)],
        }
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        Self::from_bounds(Boundary::closed(a), Boundary::closed(b))
    }

    pub fn from_bounds(lo: Boundary, hi: Boundary) -> Self {
        Interval::new(lo, hi).into()
    }

    pub fn points<I: IntoIterator<Item = Rational>>(points: I) -> Self {
        Self::from_intervals(points.into_iter().map(Interval::point))
    }

    /// Canonicalizes an arbitrary collection of intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(intervals: I) -> Self {
        let mut parts: Vec<Interval> = intervals.into_iter().collect();
        parts.sort_by(|a, b| cmp_lower(&a.lo, &b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for part in parts {
            if let Some(last) = merged.last_mut() {
                let touches = match part.lo.value.cmp(&last.hi.value) {
                    Ordering::Less => true,
                    Ordering::Equal => part.lo.closed || last.hi.closed,
                    Ordering::Greater => false,
                };
                if touches {
                    if cmp_upper(&part.hi, &last.hi) == Ordering::Greater {
                        last.hi = part.hi;
                    }
                    continue;
                }
            }
            merged.push(part);
        }
        IntervalSet { parts: merged }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].is_point()
    }

    /// `Some(p)` when the set is exactly `{p}`.
    pub fn as_point(&self) -> Option<&Rational> {
        if self.is_point() {
            Some(&self.parts[0].lo.value)
        } else {
            None
        }
    }

    /// True when the set is a single interval (or empty).
    pub fn is_convex(&self) -> bool {
        self.parts.len() <= 1
    }

    pub fn is_closed(&self) -> bool {
        self.parts.iter().all(|p| p.lo.closed && p.hi.closed)
    }

    pub fn contains(&self, p: &Rational) -> bool {
        self.parts.iter().any(|part| part.contains(p))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_intervals(self.parts.iter().chain(other.parts.iter()).cloned())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = (&self.parts[i], &other.parts[j]);
            if let Some(common) = a.intersect(b) {
                out.push(common);
            }
            if cmp_upper(&a.hi, &b.hi) == Ordering::Less {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    /// Set difference `self \ other`, with no containment precondition.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut remaining: Vec<Interval> = self.parts.clone();
        for cut in &other.parts {
            let below = Boundary::new(cut.lo.value.clone(), !cut.lo.closed);
            let above = Boundary::new(cut.hi.value.clone(), !cut.hi.closed);
            remaining = remaining
                .into_iter()
                .flat_map(|part| {
                    let left = Interval::new(part.lo.clone(), min_upper(&part.hi, &below));
                    let right = Interval::new(max_lower(&part.lo, &above), part.hi.clone());
                    left.into_iter().chain(right)
                })
                .collect();
        }
        Self::from_intervals(remaining)
    }

    /// `carrier \ self`, rejecting sets that are not inside the carrier.
    pub fn complement_within(&self, carrier: &IntervalSet) -> Result<IntervalSet, SetError> {
        if !self.is_subset(carrier) {
            return Err(SetError::NotSubset {
                set: self.to_string(),
                carrier: carrier.to_string(),
            });
        }
        Ok(carrier.difference(self))
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn closure(&self) -> IntervalSet {
        Self::from_intervals(self.parts.iter().map(Interval::closure))
    }

    /// Least upper bound and whether it belongs to the set.
    pub fn sup(&self) -> Result<(Rational, bool), SetError> {
        let last = self.parts.last().ok_or(SetError::EmptyExtremum)?;
        Ok((last.hi.value.clone(), last.hi.closed))
    }

    /// Greatest lower bound and whether it belongs to the set.
    pub fn inf(&self) -> Result<(Rational, bool), SetError> {
        let first = self.parts.first().ok_or(SetError::EmptyExtremum)?;
        Ok((first.lo.value.clone(), first.lo.closed))
    }

    /// Points of `self` strictly below `bound`, or at most `bound` when
    /// `inclusive`.
    pub fn clip_below(&self, bound: &Rational, inclusive: bool) -> IntervalSet {
        let cap = Boundary::new(bound.clone(), inclusive);
        Self::from_intervals(
            self.parts
                .iter()
                .filter_map(|p| Interval::new(p.lo.clone(), min_upper(&p.hi, &cap))),
        )
    }

    /// Points of `self` strictly above `bound`, or at least `bound` when
    /// `inclusive`.
    pub fn clip_above(&self, bound: &Rational, inclusive: bool) -> IntervalSet {
        let floor = Boundary::new(bound.clone(), inclusive);
        Self::from_intervals(
            self.parts
                .iter()
                .filter_map(|p| Interval::new(max_lower(&p.lo, &floor), p.hi.clone())),
        )
    }

    /// Every endpoint value appearing in the set, ascending, deduplicated.
    pub fn endpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self
            .parts
            .iter()
            .flat_map(|p| [p.lo.value.clone(), p.hi.value.clone()])
            .collect();
        out.dedup();
        out
    }

    /// Some member of the set, taken from its first part.
    pub fn representative(&self) -> Option<Rational> {
        self.parts.first().map(Interval::representative)
    }

    /// Span `sup - inf`; zero for points, `None` for the empty set.
    pub fn span(&self) -> Option<Rational> {
        let (lo, _) = self.inf().ok()?;
        let (hi, _) = self.sup().ok()?;
        Some(hi - lo)
    }
}

impl From<Interval> for IntervalSet {
    fn from(interval: Interval) -> Self {
        IntervalSet { parts: vec![interval] }
    }
}

impl From<Option<Interval>> for IntervalSet {
    fn from(interval: Option<Interval>) -> Self {
        IntervalSet {
            parts: interval.into_iter().collect(),
        }
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        Self::from_intervals(iter)
    }
}

/// Number of breakpoints `n` such that `step * n` spans `[lo, hi]` exactly.
pub fn grid_steps(lo: &Rational, hi: &Rational, step: &Rational) -> Option<usize> {
    if *step <= Rational::zero() {
        return None;
    }
    let n = (hi - lo) / step;
    if !n.is_integer() {
        return None;
    }
    n.to_integer().try_into().ok()
}

/// `lo + (hi - lo) * k / n`.
pub fn lerp(lo: &Rational, hi: &Rational, k: usize, n: usize) -> Rational {
    let frac = Rational::new(k.into(), n.into());
    lo + (hi - lo) * frac
}
