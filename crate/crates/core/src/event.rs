//! Event classification, event sets and the dependency table.

use bitflags::bitflags;

use crate::domain::{Change, Summary, VarId};

bitflags! {
    /// Kinds of domain change on one variable.
    #[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
    pub struct EventMask: u8 {
        const FIX = 1;
        const LBC = 2;
        const UBC = 4;
        const DMC = 8;
        const BC = Self::LBC.bits() | Self::UBC.bits();
    }
}

impl EventMask {
    /// Individual kinds in a fixed order, used to index per-kind lists.
    pub const KINDS: [EventMask; 4] = [EventMask::FIX, EventMask::LBC, EventMask::UBC, EventMask::DMC];

    fn kind_index(self) -> usize {
        self.bits().trailing_zeros() as usize
    }
}

/// Events raised by a change from `before` to `after`.
pub fn classify_summaries(before: Summary, after: Summary) -> EventMask {
    let mut m = EventMask::empty();
    if after.size == before.size {
        return m;
    }
    m |= EventMask::DMC;
    if after.size == 1 && before.size > 1 {
        m |= EventMask::FIX;
    }
    if after.min > before.min {
        m |= EventMask::LBC;
    }
    if after.max < before.max {
        m |= EventMask::UBC;
    }
    m
}

pub fn classify(ch: &Change) -> EventMask {
    classify_summaries(ch.before, ch.after)
}

/// Per-variable event masks, kept sorted by variable with no empty masks.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct EventSet {
    entries: Vec<(VarId, EventMask)>,
}

impl EventSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same mask on every listed variable.
    pub fn uniform<I: IntoIterator<Item = VarId>>(vars: I, m: EventMask) -> Self {
        let mut s = Self::new();
        for x in vars {
            s.insert(x, m);
        }
        s
    }

    pub fn from_pairs<I: IntoIterator<Item = (VarId, EventMask)>>(pairs: I) -> Self {
        let mut s = Self::new();
        for (x, m) in pairs {
            s.insert(x, m);
        }
        s
    }

    pub fn insert(&mut self, x: VarId, m: EventMask) {
        if m.is_empty() {
            return;
        }
        match self.entries.binary_search_by_key(&x, |e| e.0) {
            Ok(i) => self.entries[i].1 |= m,
            Err(i) => self.entries.insert(i, (x, m)),
        }
    }

    pub fn get(&self, x: VarId) -> EventMask {
        match self.entries.binary_search_by_key(&x, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => EventMask::empty(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of variables with a nonempty mask.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, EventMask)> + '_ {
        self.entries.iter().copied()
    }

    /// Union of masks.
    pub fn merge(&self, other: &EventSet) -> EventSet {
        let mut out = self.clone();
        for (x, m) in other.iter() {
            out.insert(x, m);
        }
        out
    }

    /// Pointwise intersection.
    pub fn intersect(&self, other: &EventSet) -> EventSet {
        EventSet::from_pairs(self.iter().map(|(x, m)| (x, m & other.get(x))))
    }

    pub fn intersects(&self, other: &EventSet) -> bool {
        self.iter().any(|(x, m)| m.intersects(other.get(x)))
    }

    /// Applies `f` to every mask, dropping masks that become empty.
    pub fn map_masks(&self, f: impl Fn(EventMask) -> EventMask) -> EventSet {
        EventSet::from_pairs(self.iter().map(|(x, m)| (x, f(m))))
    }
}

/// Identifies a propagator slot within one solver state.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PropId(pub u32);

impl PropId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    prop: PropId,
    // position of the matching back-reference in `subs[prop]`
    back: u32,
}

#[derive(Clone, Copy, Debug)]
struct BackRef {
    var: VarId,
    kind: u8,
    pos: u32,
}

/// Per-(variable, kind) subscriber lists with O(1) removal.
#[derive(Clone, Default, Debug)]
pub struct DependencyTable {
    lists: Vec<[Vec<Entry>; 4]>,
    subs: Vec<Vec<BackRef>>,
}

impl DependencyTable {
    pub fn new(num_vars: usize) -> Self {
        DependencyTable { lists: vec![Default::default(); num_vars], subs: Vec::new() }
    }

    fn ensure(&mut self, p: PropId, x: VarId) {
        if self.subs.len() <= p.index() {
            self.subs.resize_with(p.index() + 1, Vec::new);
        }
        if self.lists.len() <= x.index() {
            self.lists.resize_with(x.index() + 1, Default::default);
        }
    }

    /// Adds `f`'s subscriptions in `es` (on top of any existing ones).
    pub fn subscribe(&mut self, f: PropId, es: &EventSet) {
        for (x, m) in es.iter() {
            self.ensure(f, x);
            for k in EventMask::KINDS {
                if !m.contains(k) {
                    continue;
                }
                let ki = k.kind_index();
                let dup = self.subs[f.index()].iter().any(|b| b.var == x && b.kind as usize == ki);
                if dup {
                    continue;
                }
                let list = &mut self.lists[x.index()][ki];
                let back = self.subs[f.index()].len() as u32;
                list.push(Entry { prop: f, back });
                self.subs[f.index()].push(BackRef { var: x, kind: ki as u8, pos: list.len() as u32 - 1 });
            }
        }
    }

    /// Removes every subscription of `f`.
    pub fn unsubscribe(&mut self, f: PropId) {
        let Some(refs) = self.subs.get_mut(f.index()) else { return };
        let refs = std::mem::take(refs);
        for b in refs {
            let list = &mut self.lists[b.var.index()][b.kind as usize];
            let pos = b.pos as usize;
            list.swap_remove(pos);
            if pos < list.len() {
                let moved = list[pos];
                self.subs[moved.prop.index()][moved.back as usize].pos = pos as u32;
            }
        }
    }

    /// Replaces `f`'s subscriptions with exactly `es`.
    pub fn resubscribe(&mut self, f: PropId, es: &EventSet) {
        self.unsubscribe(f);
        self.subscribe(f, es);
    }

    /// Current subscriptions of `f`.
    pub fn subscriptions(&self, f: PropId) -> EventSet {
        let mut es = EventSet::new();
        if let Some(refs) = self.subs.get(f.index()) {
            for b in refs {
                es.insert(b.var, EventMask::KINDS[b.kind as usize]);
            }
        }
        es
    }

    /// Calls `visit(f, kind)` for every subscriber of `x` to a kind in `m`.
    /// A propagator subscribed to several kinds in `m` is visited once per kind.
    pub fn for_each_dependent(&self, x: VarId, m: EventMask, mut visit: impl FnMut(PropId, EventMask)) {
        let Some(lists) = self.lists.get(x.index()) else { return };
        for k in EventMask::KINDS {
            if m.contains(k) {
                for e in &lists[k.kind_index()] {
                    visit(e.prop, k);
                }
            }
        }
    }

    /// Propagators subscribed to at least one event in `batch`, without
    /// duplicates, in order of first discovery.
    pub fn dependents(&self, batch: &EventSet) -> Vec<PropId> {
        let mut out: Vec<PropId> = Vec::new();
        for (x, m) in batch.iter() {
            self.for_each_dependent(x, m, |p, _| {
                if !out.contains(&p) {
                    out.push(p);
                }
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Domain, IntSet};

    fn x(i: u32) -> VarId {
        VarId(i)
    }

    #[test]
    fn classify_follows_definitions() {
        let mut d = Domain::new(vec![
            IntSet::from_values([1, 2, 3]),
            IntSet::from_values([3, 4, 5, 6]),
            IntSet::from_values([0, 1]),
        ]);
        let e1 = classify(&d.tighten(x(0), &IntSet::from_values([1, 2])));
        let e2 = classify(&d.tighten(x(1), &IntSet::from_values([3, 5, 6])));
        let e3 = classify(&d.tighten(x(2), &IntSet::singleton(1)));
        assert_eq!(e1, EventMask::UBC | EventMask::DMC);
        assert_eq!(e2, EventMask::DMC);
        assert_eq!(e3, EventMask::FIX | EventMask::LBC | EventMask::DMC);
        let no = classify(&d.tighten(x(2), &IntSet::interval(0, 5)));
        assert!(no.is_empty());
    }

    #[test]
    fn event_set_merge_and_intersect() {
        let a = EventSet::from_pairs([(x(0), EventMask::UBC), (x(2), EventMask::DMC)]);
        let b = EventSet::from_pairs([(x(0), EventMask::LBC), (x(1), EventMask::FIX)]);
        let m = a.merge(&b);
        assert_eq!(m.get(x(0)), EventMask::BC);
        assert_eq!(m.len(), 3);
        assert!(a.intersects(&m));
        assert!(!a.intersects(&EventSet::uniform([x(0)], EventMask::LBC)));
        assert_eq!(a.merge(&EventSet::new()), a);
    }

    #[test]
    fn table_subscribe_unsubscribe() {
        let mut t = DependencyTable::new(3);
        let (fa, fb, fc) = (PropId(0), PropId(1), PropId(2));
        t.subscribe(fa, &EventSet::uniform([x(1)], EventMask::UBC));
        t.subscribe(fb, &EventSet::uniform([x(0)], EventMask::LBC));
        t.subscribe(fc, &EventSet::uniform([x(1)], EventMask::UBC | EventMask::DMC));
        let batch = EventSet::uniform([x(1)], EventMask::UBC);
        assert_eq!(t.dependents(&batch), vec![fa, fc]);
        t.unsubscribe(fa);
        assert_eq!(t.dependents(&batch), vec![fc]);
        t.resubscribe(fc, &EventSet::uniform([x(0)], EventMask::LBC));
        assert!(t.dependents(&batch).is_empty());
        assert_eq!(t.dependents(&EventSet::uniform([x(0)], EventMask::LBC | EventMask::DMC)), vec![fb, fc]);
        assert_eq!(t.subscriptions(fc), EventSet::uniform([x(0)], EventMask::LBC));
    }

    #[test]
    fn duplicate_subscriptions_are_ignored() {
        let mut t = DependencyTable::new(1);
        let es = EventSet::uniform([x(0)], EventMask::DMC);
        t.subscribe(PropId(0), &es);
        t.subscribe(PropId(0), &es);
        t.unsubscribe(PropId(0));
        assert!(t.dependents(&es).is_empty());
    }
}
