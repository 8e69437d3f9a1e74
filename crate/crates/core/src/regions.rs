//! Finite decomposition of a box of rational coordinates into regions on
//! which every comparison between coordinates and a fixed set of constants
//! has a constant truth value.
//!
//! A region picks, per variable, an atom of the breakpoint line (a
//! breakpoint itself or the open gap after it) and, for variables sharing a
//! gap, a weak ordering of them. Every predicate built from `<`, `=`
//! between variables and breakpoints is constant on a region, so checking
//! one sample point per region decides it exactly.

use std::collections::BTreeMap;

use qualred_intervalset::{Boundary, IntervalSet, Rational};

use crate::gamespec::{Cell, RelOp, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    /// The breakpoint `b_k`.
    Point(usize),
    /// The open gap `(b_k, b_{k+1})`.
    Gap(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub atoms: Vec<Atom>,
    /// Dense rank of each variable among those sharing its gap; 0 on points.
    pub ranks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    breaks: Vec<Rational>,
    allowed: Vec<Vec<Atom>>,
}

impl Decomposition {
    /// `domains[v]` bounds variable `v`; `extra` adds breakpoints. Domain
    /// endpoints are always breakpoints, so each atom lies inside or outside
    /// a domain entirely.
    pub fn new<I>(domains: &[IntervalSet], extra: I) -> Self
    where
        I: IntoIterator<Item = Rational>,
    {
        let mut breaks: Vec<Rational> = extra.into_iter().collect();
        for d in domains {
            breaks.extend(d.endpoints());
        }
        breaks.sort();
        breaks.dedup();
        let allowed = domains
            .iter()
            .map(|d| {
                let mut atoms = Vec::new();
                for (k, b) in breaks.iter().enumerate() {
                    if d.contains(b) {
                        atoms.push(Atom::Point(k));
                    }
                    if k + 1 < breaks.len() && d.contains(&mid(b, &breaks[k + 1])) {
                        atoms.push(Atom::Gap(k));
                    }
                }
                atoms
            })
            .collect();
        Decomposition { breaks, allowed }
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn vars(&self) -> usize {
        self.allowed.len()
    }

    /// True when some domain is empty, so there are no regions at all.
    pub fn is_vacant(&self) -> bool {
        self.allowed.iter().any(Vec::is_empty)
    }

    pub fn regions(&self) -> Vec<Region> {
        let mut out = Vec::new();
        for atoms in cartesian(&self.allowed) {
            expand_orderings(&atoms, &mut out);
        }
        out
    }

    pub fn sample(&self, r: &Region) -> Vec<Rational> {
        let mut widths: BTreeMap<usize, usize> = BTreeMap::new();
        for (v, a) in r.atoms.iter().enumerate() {
            if let Atom::Gap(k) = a {
                let w = widths.entry(*k).or_default();
                *w = (*w).max(r.ranks[v] + 1);
            }
        }
        r.atoms
            .iter()
            .enumerate()
            .map(|(v, a)| match a {
                Atom::Point(k) => self.breaks[*k].clone(),
                Atom::Gap(k) => {
                    let (lo, hi) = (&self.breaks[*k], &self.breaks[k + 1]);
                    let m = widths[k];
                    let t = Rational::new((r.ranks[v] + 1).into(), (m + 1).into());
                    lo + (hi - lo) * t
                }
            })
            .collect()
    }

    /// Whether the region with sample point `p` lies in the closure of `n`.
    pub fn in_closure(&self, p: &[Rational], n: &Region) -> bool {
        let atoms_ok = n.atoms.iter().zip(p).all(|(a, x)| match a {
            Atom::Point(k) => *x == self.breaks[*k],
            Atom::Gap(k) => self.breaks[*k] <= *x && *x <= self.breaks[k + 1],
        });
        if !atoms_ok {
            return false;
        }
        for u in 0..n.atoms.len() {
            for v in 0..n.atoms.len() {
                if u != v && matches!(n.atoms[u], Atom::Gap(_)) && n.atoms[u] == n.atoms[v] {
                    let ok = match n.ranks[u].cmp(&n.ranks[v]) {
                        std::cmp::Ordering::Less => p[u] <= p[v],
                        std::cmp::Ordering::Equal => p[u] == p[v],
                        std::cmp::Ordering::Greater => true,
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Regions other than `r` whose closure contains `r`.
    pub fn neighbors(&self, r: &Region) -> Vec<Region> {
        let p = self.sample(r);
        let choices: Vec<Vec<Atom>> = r
            .atoms
            .iter()
            .enumerate()
            .map(|(v, a)| match a {
                Atom::Gap(_) => vec![*a],
                Atom::Point(k) => {
                    let mut c = vec![*a];
                    if *k > 0 {
                        c.push(Atom::Gap(k - 1));
                    }
                    c.push(Atom::Gap(*k));
                    c.retain(|x| self.allowed[v].contains(x));
                    c
                }
            })
            .collect();
        let mut candidates = Vec::new();
        for atoms in cartesian(&choices) {
            expand_orderings(&atoms, &mut candidates);
        }
        candidates
            .into_iter()
            .filter(|n| n != r && self.in_closure(&p, n))
            .collect()
    }

    pub fn atom_set(&self, a: Atom) -> IntervalSet {
        match a {
            Atom::Point(k) => IntervalSet::point(self.breaks[k].clone()),
            Atom::Gap(k) => IntervalSet::from_bounds(
                Boundary::open(self.breaks[k].clone()),
                Boundary::open(self.breaks[k + 1].clone()),
            ),
        }
    }

    /// The region as a cell: atom factors plus the ordering relations.
    pub fn describe(&self, r: &Region) -> Cell {
        let factors = r.atoms.iter().map(|a| self.atom_set(*a)).collect();
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, a) in r.atoms.iter().enumerate() {
            if let Atom::Gap(k) = a {
                groups.entry(*k).or_default().push(v);
            }
        }
        let mut relations = Vec::new();
        for vars in groups.values() {
            let mut sorted = vars.clone();
            sorted.sort_by_key(|v| (r.ranks[*v], *v));
            for w in sorted.windows(2) {
                let op = if r.ranks[w[0]] == r.ranks[w[1]] {
                    RelOp::Eq
                } else {
                    RelOp::Lt
                };
                relations.push(Relation {
                    left: w[0],
                    op,
                    right: w[1],
                });
            }
        }
        Cell { factors, relations }
    }
}

fn mid(a: &Rational, b: &Rational) -> Rational {
    (a + b) / Rational::from_integer(2.into())
}

fn cartesian(choices: &[Vec<Atom>]) -> Vec<Vec<Atom>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |a| {
                    let mut next = prefix.clone();
                    next.push(*a);
                    next
                })
            })
            .collect();
    }
    out
}

/// Pushes one region per combination of weak orderings of the variables
/// that share a gap.
fn expand_orderings(atoms: &[Atom], out: &mut Vec<Region>) {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, a) in atoms.iter().enumerate() {
        if let Atom::Gap(k) = a {
            groups.entry(*k).or_default().push(v);
        }
    }
    let mut partial = vec![vec![0usize; atoms.len()]];
    for vars in groups.values().filter(|g| g.len() > 1) {
        let orders = weak_orderings(vars.len());
        partial = partial
            .into_iter()
            .flat_map(|ranks| {
                orders.iter().map(move |ord| {
                    let mut next = ranks.clone();
                    for (slot, v) in vars.iter().enumerate() {
                        next[*v] = ord[slot];
                    }
                    next
                })
            })
            .collect();
    }
    out.extend(partial.into_iter().map(|ranks| Region {
        atoms: atoms.to_vec(),
        ranks,
    }));
}

/// All maps `[g] -> [m]` onto `{0..m}` for some `m`, i.e. dense rankings.
fn weak_orderings(g: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = g.pow(g as u32);
    for code in 0..total {
        let mut c = code;
        let ranks: Vec<usize> = (0..g)
            .map(|_| {
                let r = c % g;
                c /= g;
                r
            })
            .collect();
        let top = ranks.iter().copied().max().unwrap_or(0);
        if (0..=top).all(|r| ranks.contains(&r)) {
            out.push(ranks);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qualred_intervalset::{int, ratio};

    fn unit() -> IntervalSet {
        IntervalSet::closed(int(0), int(1))
    }

    #[test]
    fn weak_orderings_are_fubini_numbers() {
        let counts: Vec<usize> = (1..=4).map(|g| weak_orderings(g).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75]);
    }

    #[test]
    fn unit_square_regions() {
        let d = Decomposition::new(&[unit(), unit()], []);
        // atoms {0}, (0,1), {1} per axis; the shared gap splits three ways
        assert_eq!(d.regions().len(), 8 + 3);
        for r in d.regions() {
            let p = d.sample(&r);
            assert!(d.describe(&r).factors.iter().zip(&p).all(|(f, x)| f.contains(x)));
        }
    }

    #[test]
    fn closure_neighbours_of_a_corner() {
        let d = Decomposition::new(&[unit(), unit()], [ratio(1, 2)]);
        let corner = Region {
            atoms: vec![Atom::Point(0), Atom::Point(0)],
            ranks: vec![0, 0],
        };
        // three gap/point mixes plus three orderings inside the shared gap
        assert_eq!(d.neighbors(&corner).len(), 2 + 3);
    }
}
