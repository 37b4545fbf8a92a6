//! Variables, value sets and domains.

mod range_set;

use std::fmt;

pub use range_set::{DomainValue, RangeSet};

/// Integer value type used throughout the engine.
pub type Val = i64;

/// Value set of a single variable.
pub type IntSet = RangeSet<Val>;

/// Largest magnitude accepted for initial variable bounds. Keeps every
/// linear term well inside `i128` and sums of squares inside `i64`.
pub const MAX_BOUND: Val = 1 << 32;

/// Index of a variable in a [`Domain`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VarId {
    fn from(i: usize) -> Self {
        VarId(i as u32)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Raised when a variable's value set becomes empty.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Wipeout;

/// `Ok(true)` if the domain changed.
pub type Prune = Result<bool, Wipeout>;

/// Bounds and cardinality of one variable's set.
///
/// For an empty set `min` is `Val::MAX` and `max` is `Val::MIN`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Summary {
    pub min: Val,
    pub max: Val,
    pub size: u64,
}

impl Summary {
    pub fn of(s: &IntSet) -> Self {
        Summary { min: s.min().unwrap_or(Val::MAX), max: s.max().unwrap_or(Val::MIN), size: s.len() }
    }
}

/// Before/after record of a single-variable update.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Change {
    pub var: VarId,
    pub before: Summary,
    pub after: Summary,
}

impl Change {
    pub fn changed(&self) -> bool {
        self.before.size != self.after.size
    }
}

/// Total map from variables to value sets.
///
/// Once any variable's set is empty the domain is failed; mutators return
/// `Err(Wipeout)` from then on.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Domain {
    sets: Vec<IntSet>,
    failed: bool,
}

impl Domain {
    pub fn new(sets: Vec<IntSet>) -> Self {
        let failed = sets.iter().any(|s| s.is_empty());
        Domain { sets, failed }
    }

    pub fn from_bounds(bounds: &[(Val, Val)]) -> Self {
        Self::new(bounds.iter().map(|&(l, h)| IntSet::interval(l, h)).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.sets.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> {
        (0..self.sets.len()).map(VarId::from)
    }

    pub fn push(&mut self, s: IntSet) -> VarId {
        self.failed |= s.is_empty();
        self.sets.push(s);
        VarId::from(self.sets.len() - 1)
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    pub fn mark_failed(&mut self) {
        self.failed = true;
    }

    pub fn get(&self, x: VarId) -> &IntSet {
        &self.sets[x.index()]
    }

    pub fn sets(&self) -> &[IntSet] {
        &self.sets
    }

    /// Lower bound. Must not be called on an empty set.
    pub fn min(&self, x: VarId) -> Val {
        self.get(x).min().expect("min of empty set")
    }

    /// Upper bound. Must not be called on an empty set.
    pub fn max(&self, x: VarId) -> Val {
        self.get(x).max().expect("max of empty set")
    }

    pub fn bounds(&self, x: VarId) -> (Val, Val) {
        (self.min(x), self.max(x))
    }

    pub fn size(&self, x: VarId) -> u64 {
        self.get(x).len()
    }

    pub fn contains(&self, x: VarId, v: Val) -> bool {
        self.get(x).contains(v)
    }

    pub fn is_fixed(&self, x: VarId) -> bool {
        self.get(x).len() == 1
    }

    pub fn value(&self, x: VarId) -> Option<Val> {
        self.get(x).value()
    }

    pub fn summary(&self, x: VarId) -> Summary {
        Summary::of(self.get(x))
    }

    /// True when every variable is fixed and the domain is not failed.
    pub fn is_assignment(&self) -> bool {
        !self.failed && self.sets.iter().all(|s| s.len() == 1)
    }

    /// Values of a fully fixed domain.
    pub fn assignment(&self) -> Option<Vec<Val>> {
        if self.failed {
            return None;
        }
        self.sets.iter().map(|s| s.value()).collect()
    }

    /// Pointwise intersection.
    pub fn intersect(&self, other: &Domain) -> Domain {
        assert_eq!(self.sets.len(), other.sets.len());
        Domain::new(self.sets.iter().zip(&other.sets).map(|(a, b)| a.intersect(b)).collect())
    }

    /// `self ⊑ other`: every variable's set is a subset.
    pub fn is_stronger(&self, other: &Domain) -> bool {
        self.sets.len() == other.sets.len() && self.sets.iter().zip(&other.sets).all(|(a, b)| a.is_subset(b))
    }

    /// Replaces each set with its hull.
    pub fn range_relax(&self) -> Domain {
        Domain { sets: self.sets.iter().map(|s| s.hull()).collect(), failed: self.failed }
    }

    /// Intersects `x`'s set with `s` and reports the change.
    pub fn tighten(&mut self, x: VarId, s: &IntSet) -> Change {
        let before = self.summary(x);
        self.restrict(x, s).ok();
        Change { var: x, before, after: self.summary(x) }
    }

    fn check(&mut self, x: VarId, changed: bool) -> Prune {
        if self.sets[x.index()].is_empty() {
            self.failed = true;
            Err(Wipeout)
        } else {
            Ok(changed)
        }
    }

    pub fn set_min(&mut self, x: VarId, v: Val) -> Prune {
        let c = self.sets[x.index()].retain_ge(v);
        self.check(x, c)
    }

    pub fn set_max(&mut self, x: VarId, v: Val) -> Prune {
        let c = self.sets[x.index()].retain_le(v);
        self.check(x, c)
    }

    pub fn set_bounds(&mut self, x: VarId, lo: Val, hi: Val) -> Prune {
        let a = self.set_min(x, lo)?;
        let b = self.set_max(x, hi)?;
        Ok(a || b)
    }

    pub fn fix(&mut self, x: VarId, v: Val) -> Prune {
        self.set_bounds(x, v, v)
    }

    pub fn remove(&mut self, x: VarId, v: Val) -> Prune {
        let c = self.sets[x.index()].remove(v);
        self.check(x, c)
    }

    pub fn restrict(&mut self, x: VarId, s: &IntSet) -> Prune {
        let c = self.sets[x.index()].intersect_with(s);
        self.check(x, c)
    }

    /// Overwrites `x`'s set. Used when restoring snapshots.
    pub fn replace(&mut self, x: VarId, s: IntSet) {
        self.failed |= s.is_empty();
        self.sets[x.index()] = s;
    }
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.failed {
            write!(f, "failed ")?;
        }
        f.debug_map().entries(self.sets.iter().enumerate().map(|(i, s)| (VarId::from(i), s))).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutators_report_change_and_failure() {
        let mut d = Domain::from_bounds(&[(0, 5), (1, 1)]);
        let x = VarId(0);
        assert_eq!(d.set_min(x, 2), Ok(true));
        assert_eq!(d.set_min(x, 2), Ok(false));
        assert_eq!(d.remove(x, 3), Ok(true));
        assert_eq!(d.get(x).ranges(), &[(2, 2), (4, 5)]);
        assert_eq!(d.fix(x, 3), Err(Wipeout));
        assert!(d.is_failed());
    }

    #[test]
    fn tighten_reports_summaries() {
        let mut d = Domain::from_bounds(&[(0, 9)]);
        let ch = d.tighten(VarId(0), &IntSet::from_values([3, 4, 8]));
        assert!(ch.changed());
        assert_eq!(ch.before, Summary { min: 0, max: 9, size: 10 });
        assert_eq!(ch.after, Summary { min: 3, max: 8, size: 3 });
    }

    #[test]
    fn ordering_and_relaxation() {
        let a = Domain::new(vec![IntSet::from_values([1, 3]), IntSet::interval(0, 2)]);
        let b = Domain::from_bounds(&[(0, 4), (0, 2)]);
        assert!(a.is_stronger(&b));
        assert!(!b.is_stronger(&a));
        assert_eq!(a.range_relax().get(VarId(0)), &IntSet::interval(1, 3));
        assert_eq!(a.intersect(&b), a);
    }
}
