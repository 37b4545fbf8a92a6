//! Finite sets of integers stored as sorted, disjoint, non-adjacent ranges.

use std::fmt;
use std::hash::Hash;

use num_traits::{PrimInt, Signed, ToPrimitive};
use smallvec::SmallVec;

/// Integer types a [`RangeSet`] can hold.
pub trait DomainValue: PrimInt + Signed + fmt::Debug + fmt::Display + Hash + Send + Sync + 'static {}

impl<T> DomainValue for T where T: PrimInt + Signed + fmt::Debug + fmt::Display + Hash + Send + Sync + 'static {}

/// A finite set of integers.
///
/// Ranges are kept sorted ascending, pairwise disjoint and separated by a gap
/// of at least two (adjacent ranges are merged), so two sets are equal iff
/// their range lists are equal. The cardinality is cached.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RangeSet<V> {
    ranges: SmallVec<[(V, V); 2]>,
    size: u64,
}

fn width<V: DomainValue>(lo: V, hi: V) -> u64 {
    let w = hi.to_i128().unwrap() - lo.to_i128().unwrap() + 1;
    w.to_u64().unwrap_or(u64::MAX)
}

impl<V: DomainValue> Default for RangeSet<V> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<V: DomainValue> RangeSet<V> {
    pub fn empty() -> Self {
        RangeSet { ranges: SmallVec::new(), size: 0 }
    }

    /// The range `[lo, hi]`; empty when `lo > hi`.
    pub fn interval(lo: V, hi: V) -> Self {
        if lo > hi {
            return Self::empty();
        }
        let mut ranges = SmallVec::new();
        ranges.push((lo, hi));
        RangeSet { ranges, size: width(lo, hi) }
    }

    pub fn singleton(v: V) -> Self {
        Self::interval(v, v)
    }

    pub fn from_values<I: IntoIterator<Item = V>>(values: I) -> Self {
        let mut vs: Vec<V> = values.into_iter().collect();
        vs.sort_unstable();
        vs.dedup();
        Self::from_sorted_ranges(vs.into_iter().map(|v| (v, v)))
    }

    /// Builds a set from arbitrary (possibly overlapping, unsorted) ranges.
    pub fn from_ranges<I: IntoIterator<Item = (V, V)>>(ranges: I) -> Self {
        let mut rs: Vec<(V, V)> = ranges.into_iter().filter(|(l, h)| l <= h).collect();
        rs.sort_unstable();
        Self::from_sorted_ranges(rs)
    }

    // Input sorted by lower bound; overlapping or adjacent ranges are merged.
    fn from_sorted_ranges<I: IntoIterator<Item = (V, V)>>(ranges: I) -> Self {
        let mut out: SmallVec<[(V, V); 2]> = SmallVec::new();
        for (lo, hi) in ranges {
            if let Some(last) = out.last_mut() {
                if last.1 == V::max_value() || lo <= last.1 + V::one() {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                    continue;
                }
            }
            out.push((lo, hi));
        }
        Self::from_normalized(out)
    }

    fn from_normalized(ranges: SmallVec<[(V, V); 2]>) -> Self {
        let size = ranges.iter().map(|&(l, h)| width(l, h)).sum();
        RangeSet { ranges, size }
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Cardinality.
    pub fn len(&self) -> u64 {
        self.size
    }

    pub fn min(&self) -> Option<V> {
        self.ranges.first().map(|r| r.0)
    }

    pub fn max(&self) -> Option<V> {
        self.ranges.last().map(|r| r.1)
    }

    pub fn bounds(&self) -> Option<(V, V)> {
        Some((self.min()?, self.max()?))
    }

    pub fn ranges(&self) -> &[(V, V)] {
        &self.ranges
    }

    pub fn is_range(&self) -> bool {
        self.ranges.len() <= 1
    }

    /// The single value of a fixed set.
    pub fn value(&self) -> Option<V> {
        match self.ranges.as_slice() {
            [(l, h)] if l == h => Some(*l),
            _ => None,
        }
    }

    pub fn contains(&self, v: V) -> bool {
        self.ranges.binary_search_by(|&(lo, hi)| {
            if hi < v {
                std::cmp::Ordering::Less
            } else if lo > v {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        }).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = V> + '_ {
        self.ranges.iter().flat_map(|&(lo, hi)| RangeIter { next: Some(lo), hi })
    }

    /// `{v + c | v ∈ self}`.
    pub fn shift(&self, c: V) -> Self {
        RangeSet { ranges: self.ranges.iter().map(|&(l, h)| (l + c, h + c)).collect(), size: self.size }
    }

    /// Smallest range containing the set.
    pub fn hull(&self) -> Self {
        match self.bounds() {
            Some((lo, hi)) => Self::interval(lo, hi),
            None => Self::empty(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.ranges, &other.ranges);
        let mut out: SmallVec<[(V, V); 2]> = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_normalized(out)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut all: Vec<(V, V)> = self.ranges.iter().chain(other.ranges.iter()).copied().collect();
        all.sort_unstable();
        Self::from_sorted_ranges(all)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out: SmallVec<[(V, V); 2]> = SmallVec::new();
        let b = &other.ranges;
        let mut j = 0;
        for &(lo, hi) in self.ranges.iter() {
            let mut cur = lo;
            let mut open = true;
            while j < b.len() && b[j].1 < cur {
                j += 1;
            }
            let mut k = j;
            while open && k < b.len() && b[k].0 <= hi {
                if b[k].0 > cur {
                    out.push((cur, b[k].0 - V::one()));
                }
                if b[k].1 >= hi {
                    open = false;
                } else {
                    cur = b[k].1 + V::one();
                    k += 1;
                }
            }
            if open {
                out.push((cur, hi));
            }
        }
        Self::from_normalized(out)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.size <= other.size && self.intersect(other).size == self.size
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersect(other).is_empty()
    }

    /// Removes every value below `lo`. Returns whether the set changed.
    pub fn retain_ge(&mut self, lo: V) -> bool {
        match self.min() {
            Some(m) if m < lo => {}
            _ => return false,
        }
        let keep = self.ranges.iter().position(|r| r.1 >= lo);
        match keep {
            None => *self = Self::empty(),
            Some(k) => {
                self.ranges.drain(..k);
                if self.ranges[0].0 < lo {
                    self.ranges[0].0 = lo;
                }
                self.size = self.ranges.iter().map(|&(l, h)| width(l, h)).sum();
            }
        }
        true
    }

    /// Removes every value above `hi`. Returns whether the set changed.
    pub fn retain_le(&mut self, hi: V) -> bool {
        match self.max() {
            Some(m) if m > hi => {}
            _ => return false,
        }
        let keep = self.ranges.iter().rposition(|r| r.0 <= hi);
        match keep {
            None => *self = Self::empty(),
            Some(k) => {
                self.ranges.truncate(k + 1);
                if self.ranges[k].1 > hi {
                    self.ranges[k].1 = hi;
                }
                self.size = self.ranges.iter().map(|&(l, h)| width(l, h)).sum();
            }
        }
        true
    }

    /// Removes a single value. Returns whether the set changed.
    pub fn remove(&mut self, v: V) -> bool {
        let Some(i) = self.ranges.iter().position(|r| r.0 <= v && v <= r.1) else {
            return false;
        };
        let (lo, hi) = self.ranges[i];
        if lo == hi {
            self.ranges.remove(i);
        } else if v == lo {
            self.ranges[i].0 = lo + V::one();
        } else if v == hi {
            self.ranges[i].1 = hi - V::one();
        } else {
            self.ranges[i].1 = v - V::one();
            self.ranges.insert(i + 1, (v + V::one(), hi));
        }
        self.size -= 1;
        true
    }

    /// In-place intersection. Returns whether the set changed.
    pub fn intersect_with(&mut self, other: &Self) -> bool {
        let r = self.intersect(other);
        if r.size != self.size {
            *self = r;
            true
        } else {
            false
        }
    }
}

struct RangeIter<V> {
    next: Option<V>,
    hi: V,
}

impl<V: DomainValue> Iterator for RangeIter<V> {
    type Item = V;
    fn next(&mut self) -> Option<V> {
        let v = self.next?;
        self.next = if v < self.hi { Some(v + V::one()) } else { None };
        Some(v)
    }
}

impl<V: DomainValue> fmt::Debug for RangeSet<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<V: DomainValue> fmt::Display for RangeSet<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ranges.as_slice() {
            [] => write!(f, "{{}}"),
            [(l, h)] if l == h => write!(f, "{{{l}}}"),
            [(l, h)] => write!(f, "[{l}..{h}]"),
            rs => {
                write!(f, "{{")?;
                for (i, (l, h)) in rs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    if l == h {
                        write!(f, "{l}")?;
                    } else {
                        write!(f, "{l}..{h}")?;
                    }
                }
                write!(f, "}}")
            }
        }
    }
}

impl<V: DomainValue> FromIterator<V> for RangeSet<V> {
    fn from_iter<I: IntoIterator<Item = V>>(iter: I) -> Self {
        Self::from_values(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set(vs: &[i64]) -> RangeSet<i64> {
        RangeSet::from_values(vs.iter().copied())
    }

    #[test]
    fn normalizes_adjacent_ranges() {
        let s = RangeSet::from_ranges([(5i64, 7), (1, 2), (3, 4), (9, 9)]);
        assert_eq!(s.ranges(), &[(1, 7), (9, 9)]);
        assert_eq!(s.len(), 8);
        assert_eq!(format!("{s}"), "{1..7,9}");
    }

    #[test]
    fn queries() {
        let s = set(&[2, 5, 9]);
        assert_eq!(s.bounds(), Some((2, 9)));
        assert!(s.contains(5) && !s.contains(6));
        assert_eq!(s.value(), None);
        assert_eq!(set(&[7]).value(), Some(7));
        assert!(RangeSet::<i64>::empty().bounds().is_none());
    }

    #[test]
    fn remove_splits_range() {
        let mut s = RangeSet::interval(0i64, 4);
        assert!(s.remove(2));
        assert_eq!(s.ranges(), &[(0, 1), (3, 4)]);
        assert!(!s.remove(2));
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn retain_bounds() {
        let mut s = set(&[0, 4, 5, 6]);
        assert!(s.retain_ge(1));
        assert_eq!(s.ranges(), &[(4, 6)]);
        assert!(!s.retain_ge(4));
        assert!(s.retain_le(3));
        assert!(s.is_empty());
    }

    #[test]
    fn works_for_narrow_types() {
        let a = RangeSet::interval(-3i32, 3);
        let b = RangeSet::from_values([-5i32, 0, 2, 8]);
        assert_eq!(a.intersect(&b), RangeSet::from_values([0, 2]));
        assert_eq!(a.difference(&b).len(), 5);
    }

    fn small_set() -> impl Strategy<Value = BTreeSet<i64>> {
        proptest::collection::btree_set(-6i64..6, 0..10)
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(a in small_set(), b in small_set(), v in -7i64..7) {
            let ra: RangeSet<i64> = a.iter().copied().collect();
            let rb: RangeSet<i64> = b.iter().copied().collect();
            let inter: BTreeSet<i64> = a.intersection(&b).copied().collect();
            let uni: BTreeSet<i64> = a.union(&b).copied().collect();
            let diff: BTreeSet<i64> = a.difference(&b).copied().collect();
            prop_assert_eq!(ra.intersect(&rb).iter().collect::<BTreeSet<_>>(), inter);
            prop_assert_eq!(ra.union(&rb).iter().collect::<BTreeSet<_>>(), uni);
            prop_assert_eq!(ra.difference(&rb).iter().collect::<BTreeSet<_>>(), diff);
            prop_assert_eq!(ra.is_subset(&rb), a.is_subset(&b));
            prop_assert_eq!(ra.contains(v), a.contains(&v));
            prop_assert_eq!(ra.len() as usize, a.len());
            prop_assert_eq!(ra.min(), a.first().copied());
            prop_assert_eq!(ra.max(), a.last().copied());
            let mut ge = ra.clone();
            ge.retain_ge(v);
            prop_assert_eq!(ge.iter().collect::<BTreeSet<_>>(), a.range(v..).copied().collect::<BTreeSet<_>>());
            let mut le = ra.clone();
            le.retain_le(v);
            prop_assert_eq!(le.iter().collect::<BTreeSet<_>>(), a.range(..=v).copied().collect::<BTreeSet<_>>());
            let mut rm = ra.clone();
            rm.remove(v);
            let mut a2 = a.clone();
            a2.remove(&v);
            prop_assert_eq!(rm, a2.iter().copied().collect::<RangeSet<i64>>());
        }

        #[test]
        fn gaps_are_at_least_two(a in small_set()) {
            let ra: RangeSet<i64> = a.iter().copied().collect();
            for w in ra.ranges().windows(2) {
                prop_assert!(w[0].1 + 2 <= w[1].0);
            }
        }
    }
}
