//! The incremental propagation engine.
//!
//! A [`Space`] is a complete solver state: domain, propagators, dependency
//! table, queue and counters. It is a plain value, so search copies it to
//! branch.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::domain::{Domain, Summary, MAX_BOUND};
use crate::error::{Error, Result};
use crate::event::{classify_summaries, DependencyTable, EventMask, EventSet, PropId};
use crate::prop::{DynEventMode, PropStatus, Propagator, Priority, StagedKind, StagedPair};

pub mod config;
mod queue;
mod stats;

pub use config::{Combination, DynEvents, EngineConfig, EventLevel, FixpointMode, Granularity, Policy, QueueOrder};
pub use queue::PropQueue;
pub use stats::Stats;

/// What occupies a propagator slot.
#[derive(Clone, Debug)]
pub enum PropEntry {
    Single(Arc<dyn Propagator>),
    Staged(Arc<StagedPair>),
}

impl PropEntry {
    pub fn single(p: impl Propagator + 'static) -> Self {
        PropEntry::Single(Arc::new(p))
    }

    pub fn name(&self) -> String {
        match self {
            PropEntry::Single(f) => f.name(),
            PropEntry::Staged(s) => s.name(),
        }
    }

    pub fn vars(&self) -> &[crate::domain::VarId] {
        match self {
            PropEntry::Single(f) => f.vars(),
            PropEntry::Staged(s) => s.vars(),
        }
    }

    fn events(&self) -> EventSet {
        match self {
            PropEntry::Single(f) => f.events(),
            PropEntry::Staged(s) => s.events(),
        }
    }

    /// The propagator whose fixpoints are this entry's fixpoints.
    pub fn strongest(&self) -> &dyn Propagator {
        match self {
            PropEntry::Single(f) => f.as_ref(),
            PropEntry::Staged(s) => s.strong.as_ref(),
        }
    }
}

/// Stage of a staged propagator. Unstaged slots stay at `None`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Stage {
    None,
    A,
    B,
}

#[derive(Clone, Debug)]
struct Slot {
    entry: PropEntry,
    dead: bool,
    stage: Stage,
    // ticket of the live queue entry
    ticket: Option<u32>,
}

/// One executed step, recorded when tracing is on.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub step: u64,
    pub prop: PropId,
    pub name: String,
    pub stage: Stage,
    pub level: usize,
    pub status: PropStatus,
    pub events: EventSet,
    /// Live queue contents after the step, in level order.
    pub queue: Vec<(usize, PropId)>,
    pub domain: Domain,
}

/// A propagator that was not at a fixpoint although it was not queued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditViolation {
    pub step: u64,
    pub prop: PropId,
    pub name: String,
}

/// Priority after the dynamic rewrite for a propagator with `unfixed`
/// unfixed variables.
pub fn dynamic_priority(p: Priority, unfixed: usize) -> Priority {
    let low = p.level() & 1;
    let cap = match unfixed {
        0..=2 => Priority::BINARY_HIGH.level() + low,
        3 => Priority::TERNARY_HIGH.level() + low,
        _ => return p,
    };
    Priority::new(p.level().min(cap))
}

#[derive(Clone)]
pub struct Space {
    cfg: EngineConfig,
    dom: Domain,
    slots: Vec<Slot>,
    deps: DependencyTable,
    queue: PropQueue,
    next_ticket: u32,
    stats: Stats,
    trace: Vec<TraceStep>,
    violations: Vec<AuditViolation>,
    wake: Vec<EventMask>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("domain", &self.dom)
            .field("props", &self.slots.len())
            .field("queued", &self.queue.len())
            .finish()
    }
}

impl Space {
    pub fn new(dom: Domain, cfg: EngineConfig) -> Result<Self> {
        cfg.validate()?;
        for s in dom.sets() {
            for v in [s.min(), s.max()].into_iter().flatten() {
                if v.abs() > MAX_BOUND {
                    return Err(Error::BoundOutOfRange(v));
                }
            }
        }
        Ok(Space {
            deps: DependencyTable::new(dom.num_vars()),
            queue: PropQueue::new(cfg.queue, cfg.inverse_priorities, cfg.complete_fixpoints),
            cfg,
            dom,
            slots: Vec::new(),
            next_ticket: 0,
            stats: Stats::default(),
            trace: Vec::new(),
            violations: Vec::new(),
            wake: Vec::new(),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn domain(&self) -> &Domain {
        &self.dom
    }

    pub fn is_failed(&self) -> bool {
        self.dom.is_failed()
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Returns the counters and resets them.
    pub fn take_stats(&mut self) -> Stats {
        std::mem::take(&mut self.stats)
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    pub fn violations(&self) -> &[AuditViolation] {
        &self.violations
    }

    pub fn num_props(&self) -> usize {
        self.slots.len()
    }

    pub fn entry(&self, p: PropId) -> &PropEntry {
        &self.slots[p.index()].entry
    }

    pub fn is_dead(&self, p: PropId) -> bool {
        self.slots[p.index()].dead
    }

    pub fn is_queued(&self, p: PropId) -> bool {
        self.slots[p.index()].ticket.is_some()
    }

    pub fn stage(&self, p: PropId) -> Stage {
        self.slots[p.index()].stage
    }

    pub fn subscriptions(&self, p: PropId) -> EventSet {
        self.deps.subscriptions(p)
    }

    /// Live queue contents in level order.
    pub fn queued(&self) -> Vec<(usize, PropId)> {
        self.queue
            .entries()
            .filter(|&(_, p, t)| self.slots[p.index()].ticket == Some(t))
            .map(|(l, p, _)| (l, p))
            .collect()
    }

    fn widen(&self, es: &EventSet, vars: &[crate::domain::VarId]) -> EventSet {
        match self.cfg.events {
            // any change on any variable read
            EventLevel::None => EventSet::uniform(vars.iter().copied(), EventMask::DMC),
            lvl => es.map_masks(|m| lvl.widen(m)),
        }
    }

    fn add_slot(&mut self, entry: PropEntry) -> PropId {
        let p = PropId(self.slots.len() as u32);
        let es = self.widen(&entry.events(), entry.vars());
        self.deps.subscribe(p, &es);
        let stage = if matches!(entry, PropEntry::Staged(_)) { Stage::A } else { Stage::None };
        self.slots.push(Slot { entry, dead: false, stage, ticket: None });
        self.wake.push(EventMask::empty());
        p
    }

    /// Adds a propagator and schedules it.
    pub fn post(&mut self, entry: PropEntry) -> PropId {
        let p = self.add_slot(entry);
        self.enqueue(p);
        p
    }

    pub fn post_prop(&mut self, f: impl Propagator + 'static) -> PropId {
        self.post(PropEntry::single(f))
    }

    /// Adds a propagator without scheduling it. Sound only if the current
    /// domain is already a fixpoint of it.
    pub fn post_unscheduled(&mut self, entry: PropEntry) -> PropId {
        self.add_slot(entry)
    }

    /// Posts `new` and propagates to the mutual fixpoint. Returns false on
    /// failure.
    pub fn isolv(&mut self, new: impl IntoIterator<Item = PropEntry>) -> bool {
        for e in new {
            self.post(e);
        }
        self.propagate()
    }

    /// Priority the propagator would be queued with now.
    pub fn effective_priority(&self, p: PropId) -> Priority {
        let slot = &self.slots[p.index()];
        match &slot.entry {
            PropEntry::Single(f) => {
                let s = f.priority();
                if self.cfg.dynamic_priorities {
                    let unfixed = f.vars().iter().filter(|&&x| !self.dom.is_fixed(x)).count();
                    dynamic_priority(s, unfixed)
                } else {
                    s
                }
            }
            PropEntry::Staged(sp) if slot.stage == Stage::B => sp.strong.priority(),
            PropEntry::Staged(sp) => sp.weak.priority(),
        }
    }

    fn enqueue(&mut self, p: PropId) {
        let level = self.cfg.granularity.level(self.effective_priority(p));
        let t = self.next_ticket;
        self.next_ticket = self.next_ticket.wrapping_add(1);
        self.slots[p.index()].ticket = Some(t);
        self.queue.push(level, p, t);
        self.stats.enqueues += 1;
    }

    fn pop(&mut self) -> Option<(usize, PropId)> {
        while let Some((level, p, t)) = self.queue.pop() {
            let slot = &mut self.slots[p.index()];
            if !slot.dead && slot.ticket == Some(t) {
                slot.ticket = None;
                return Some((level, p));
            }
        }
        None
    }

    fn dispose(&mut self, p: PropId) {
        self.deps.unsubscribe(p);
        let slot = &mut self.slots[p.index()];
        slot.dead = true;
        slot.ticket = None;
    }

    fn wake_staged(&mut self, q: PropId, kind: StagedKind, mask: EventMask) {
        let target = if mask.intersects(kind.a_trigger()) { Stage::A } else { Stage::B };
        let slot = &mut self.slots[q.index()];
        if slot.ticket.is_some() {
            if slot.stage == Stage::B && target == Stage::A {
                slot.stage = Stage::A;
                self.enqueue(q);
            }
        } else {
            slot.stage = target;
            self.enqueue(q);
        }
    }

    /// Runs the queue to exhaustion. Returns false if the domain failed.
    pub fn propagate(&mut self) -> bool {
        if self.dom.is_failed() {
            self.abandon();
            return false;
        }
        loop {
            if self.cfg.audit {
                self.audit();
            }
            let Some((level, p)) = self.pop() else { return true };
            if !self.step(level, p) {
                self.stats.failures += 1;
                self.abandon();
                return false;
            }
        }
    }

    fn abandon(&mut self) {
        self.queue.clear();
        for s in &mut self.slots {
            s.ticket = None;
        }
    }

    fn step(&mut self, level: usize, p: PropId) -> bool {
        let slot = &self.slots[p.index()];
        let stage = slot.stage;
        let (f, staged) = match &slot.entry {
            PropEntry::Single(f) => (f.clone(), None),
            PropEntry::Staged(sp) => {
                let f = if stage == Stage::B { sp.strong.clone() } else { sp.weak.clone() };
                (f, Some(sp.kind))
            }
        };
        let vars = f.vars();
        let before: SmallVec<[Summary; 8]> = vars.iter().map(|&x| self.dom.summary(x)).collect();
        let mut status = f.propagate(&mut self.dom);
        if status == PropStatus::Subsumed && self.cfg.keep_subsumed {
            status = PropStatus::AtFixpoint;
        }

        self.stats.steps += 1;
        self.stats.level_steps[level] += 1;
        if self.stats.prop_steps.len() < self.slots.len() {
            self.stats.prop_steps.resize(self.slots.len(), 0);
        }
        self.stats.prop_steps[p.index()] += 1;

        if status == PropStatus::Failed || self.dom.is_failed() {
            self.record(p, stage, level, PropStatus::Failed, EventSet::new());
            return false;
        }

        let batch = EventSet::from_pairs(
            vars.iter()
                .zip(&before)
                .map(|(&x, &b)| (x, classify_summaries(b, self.dom.summary(x))))
                .filter(|(_, m)| !m.is_empty()),
        );
        let changed = !batch.is_empty();

        // dependents, with the events each one was woken by
        let mut woken: Vec<PropId> = Vec::new();
        {
            let wake = &mut self.wake;
            for (x, m) in batch.iter() {
                self.deps.for_each_dependent(x, m, |q, k| {
                    if wake[q.index()].is_empty() {
                        woken.push(q);
                    }
                    wake[q.index()] |= k;
                });
            }
        }

        let unknown = status == PropStatus::Unknown;
        let dyn_mode = self.cfg.dyn_events.mode();
        let mut self_wake = if staged.is_some() {
            false
        } else {
            let is_dep = !self.wake[p.index()].is_empty();
            match self.cfg.fixpoint {
                FixpointMode::None => is_dep,
                FixpointMode::Static => is_dep && !f.idempotent(),
                FixpointMode::Dynamic => is_dep && unknown,
            }
        };
        if dyn_mode.is_some() && staged.is_none() && unknown && changed {
            self_wake = true;
        }

        if status == PropStatus::Subsumed {
            self.dispose(p);
            self_wake = false;
        } else if let Some(kind) = staged {
            self.after_stage(p, kind, stage, status, changed);
        } else if let Some(mode) = dyn_mode {
            if !unknown || !changed {
                self.refresh_events(p, f.as_ref(), mode);
            }
        }

        for &q in &woken {
            let mask = std::mem::take(&mut self.wake[q.index()]);
            if q == p {
                if self_wake {
                    self.enqueue(p);
                    self_wake = false;
                }
                continue;
            }
            let slot = &self.slots[q.index()];
            if slot.dead {
                continue;
            }
            match &slot.entry {
                PropEntry::Single(_) => {
                    if slot.ticket.is_none() {
                        self.enqueue(q);
                    }
                }
                PropEntry::Staged(sp) => {
                    let kind = sp.kind;
                    self.wake_staged(q, kind, mask);
                }
            }
        }
        if self_wake {
            self.enqueue(p);
        }

        self.record(p, stage, level, status, batch);
        true
    }

    fn after_stage(&mut self, p: PropId, kind: StagedKind, stage: Stage, status: PropStatus, changed: bool) {
        let next = match stage {
            Stage::B if status == PropStatus::Unknown && changed => Stage::B,
            Stage::B | Stage::None => Stage::None,
            Stage::A => {
                let skip = match kind {
                    StagedKind::Linear { unit } => {
                        unit && status == PropStatus::AtFixpoint
                            && self.slots[p.index()].entry.vars().iter().all(|&x| self.dom.get(x).is_range())
                    }
                    _ => false,
                };
                if skip {
                    Stage::None
                } else {
                    Stage::B
                }
            }
        };
        self.slots[p.index()].stage = next;
        if next != Stage::None {
            self.enqueue(p);
        }
    }

    fn refresh_events(&mut self, p: PropId, f: &dyn Propagator, mode: DynEventMode) {
        let Some(es) = f.dynamic_events(&self.dom, mode) else { return };
        let mut es = self.widen(&es, f.vars());
        if mode == DynEventMode::Monotonic {
            es = es.intersect(&self.deps.subscriptions(p));
        }
        self.deps.resubscribe(p, &es);
    }

    fn record(&mut self, p: PropId, stage: Stage, level: usize, status: PropStatus, events: EventSet) {
        if !self.cfg.trace {
            return;
        }
        let step = TraceStep {
            step: self.stats.steps,
            prop: p,
            name: self.slots[p.index()].entry.name(),
            stage,
            level,
            status,
            events,
            queue: self.queued(),
            domain: self.dom.clone(),
        };
        self.trace.push(step);
    }

    /// Applies every unqueued propagator, dead ones included, to a copy of
    /// the domain and records those that would still prune.
    pub fn audit(&mut self) -> bool {
        let mut ok = true;
        let mut d = self.dom.clone();
        for (i, slot) in self.slots.iter().enumerate() {
            if slot.ticket.is_some() {
                continue;
            }
            let f = slot.entry.strongest();
            f.propagate(&mut d);
            self.stats.audit_checks += 1;
            if d != self.dom {
                d.clone_from(&self.dom);
                ok = false;
                self.stats.audit_violations += 1;
                if self.violations.len() < 16 {
                    self.violations.push(AuditViolation { step: self.stats.steps, prop: PropId(i as u32), name: f.name() });
                }
            }
        }
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::VarId;
    use crate::prop::{AllDiffDomain, AllDiffNaive, LinearEqBounds, NeqOffset, Regular, Dfa, Sweep};

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    fn cfg(p: Policy) -> EngineConfig {
        EngineConfig::default().with_policy(p)
    }

    #[test]
    fn empty_new_set_is_a_no_op() {
        let mut s = Space::new(Domain::from_bounds(&[(0, 3)]), cfg(Policy::Input)).unwrap();
        assert!(s.isolv([]));
        assert_eq!(s.stats().steps, 0);
    }

    #[test]
    fn rejects_huge_bounds() {
        let r = Space::new(Domain::from_bounds(&[(0, MAX_BOUND + 1)]), cfg(Policy::Input));
        assert!(matches!(r, Err(Error::BoundOutOfRange(_))));
    }

    #[test]
    fn disjoint_events_do_not_wake() {
        // the propagator subscribes ubc(x2) only; a lower-bound change must not wake it
        let c = EngineConfig { events: EventLevel::FixLbcUbc, ..cfg(Policy::Dfix) };
        let mut s = Space::new(Domain::from_bounds(&[(0, 9), (0, 9)]), c).unwrap();
        let fa = s.post_prop(crate::prop::LeqOffset::new(v(0), v(1), 1));
        assert!(s.propagate());
        let before = s.stats().enqueues;
        s.post_prop(crate::prop::UnaryBound::ge(v(1), 3));
        assert!(s.propagate());
        assert!(!s.is_queued(fa));
        assert_eq!(s.stats().enqueues, before + 1);
    }

    #[test]
    fn idempotent_propagator_not_self_enqueued_under_static() {
        let mut s = Space::new(Domain::from_bounds(&[(0, 1), (0, 1), (0, 2)]), cfg(Policy::Sfix)).unwrap();
        s.post_prop(AllDiffDomain::new(vec![v(0), v(1), v(2)]));
        assert!(s.propagate());
        assert_eq!(s.stats().steps, 1);
    }

    #[test]
    fn input_policy_reruns_self() {
        let mut s = Space::new(Domain::from_bounds(&[(0, 1), (0, 1), (0, 2)]), cfg(Policy::Input)).unwrap();
        s.post_prop(AllDiffDomain::new(vec![v(0), v(1), v(2)]));
        assert!(s.propagate());
        assert_eq!(s.stats().steps, 2);
    }

    #[test]
    fn subsumed_propagators_are_disposed() {
        let mut s = Space::new(Domain::from_bounds(&[(0, 0), (1, 1)]), cfg(Policy::Events)).unwrap();
        let p = s.post_prop(NeqOffset::new(v(0), v(1), 0));
        assert!(s.propagate());
        assert!(s.is_dead(p));
        assert!(s.subscriptions(p).is_empty());
    }

    #[test]
    fn dynamic_priority_bands() {
        assert_eq!(dynamic_priority(Priority::LINEAR_HIGH, 2), Priority::BINARY_HIGH);
        assert_eq!(dynamic_priority(Priority::LINEAR_HIGH, 3), Priority::TERNARY_HIGH);
        assert_eq!(dynamic_priority(Priority::LINEAR_HIGH, 5), Priority::LINEAR_HIGH);
        assert_eq!(dynamic_priority(Priority::UNARY_HIGH, 1), Priority::UNARY_HIGH);
    }

    #[test]
    fn dynamic_priorities_requeue_low() {
        let c = EngineConfig { dynamic_priorities: true, ..cfg(Policy::Events) };
        let mut s = Space::new(Domain::from_bounds(&[(1, 1), (2, 2), (3, 3), (0, 9), (0, 9)]), c).unwrap();
        let vars: Vec<VarId> = (0..5).map(v).collect();
        let p = s.post(PropEntry::single(LinearEqBounds::new(&[1; 5], &vars, 10).unwrap().with_sweep(Sweep::Simultaneous)));
        assert_eq!(s.effective_priority(p), Priority::BINARY_HIGH);
    }

    #[test]
    fn staged_alldiff_transitions() {
        let xs: Vec<VarId> = (0..3).map(v).collect();
        let pair = StagedPair::new(
            StagedKind::AllDiff,
            Arc::new(AllDiffNaive::new(xs.clone())),
            Arc::new(AllDiffDomain::new(xs)),
        );
        let c = EngineConfig { combination: Combination::Staged, ..cfg(Policy::Events) };
        let mut s = Space::new(Domain::from_bounds(&[(0, 2), (0, 2), (0, 2)]), c).unwrap();
        let p = s.post(PropEntry::Staged(Arc::new(pair)));
        assert_eq!(s.stage(p), Stage::A);
        assert!(s.propagate());
        assert_eq!(s.stage(p), Stage::None);
        // fix event: stage A at LINEAR
        s.post_prop(crate::prop::UnaryBound::le(v(0), 0));
        let mut c2 = s.clone();
        c2.pop();
        c2.step(0, PropId(1));
        assert_eq!(c2.stage(p), Stage::A);
        assert_eq!(c2.queued(), vec![(Priority::LINEAR_HIGH.level() as usize, p)]);
        // a removal that fixes nothing: stage B at QUADRATIC
        let mut s2 = s.clone();
        s2.post_prop(crate::prop::UnaryBound::le(v(1), 1));
        s2.pop();
        s2.pop();
        s2.step(0, PropId(2));
        assert_eq!(s2.stage(p), Stage::B);
        assert_eq!(s2.queued(), vec![(Priority::QUADRATIC_LOW.level() as usize, p)]);
        // a later fix event promotes it without duplication
        let mut s3 = s2.clone();
        s3.post_prop(crate::prop::UnaryBound::le(v(0), 0));
        s3.pop();
        s3.step(0, PropId(3));
        assert_eq!(s3.stage(p), Stage::A);
        assert_eq!(s3.queued(), vec![(Priority::LINEAR_HIGH.level() as usize, p)]);
    }

    #[derive(Debug)]
    struct Overconfident(Regular);

    impl Propagator for Overconfident {
        fn name(&self) -> String {
            self.0.name()
        }
        fn vars(&self) -> &[VarId] {
            self.0.vars()
        }
        fn events(&self) -> EventSet {
            self.0.events()
        }
        fn priority(&self) -> Priority {
            self.0.priority()
        }
        fn propagate(&self, d: &mut Domain) -> PropStatus {
            match self.0.propagate(d) {
                PropStatus::Unknown => PropStatus::AtFixpoint,
                s => s,
            }
        }
    }

    fn aliased_regular() -> Regular {
        let dfa = Dfa::new(5, 0, &[4], &[(0, 1, 1), (1, 1, 3), (0, 0, 2), (2, 0, 3), (3, 0, 4)]);
        Regular::new(vec![v(0), v(1), v(0)], Arc::new(dfa)).unwrap()
    }

    #[test]
    fn audit_passes_for_honest_regular() {
        let c = EngineConfig { audit: true, ..cfg(Policy::Dfix) };
        let mut s = Space::new(Domain::from_bounds(&[(0, 1), (0, 1)]), c).unwrap();
        s.post_prop(aliased_regular());
        assert!(s.propagate());
        assert!(s.audit());
        assert_eq!(s.domain().value(v(1)), Some(0));
        assert!(s.violations().is_empty());
    }

    #[test]
    fn audit_catches_false_fixpoint_claim() {
        let c = EngineConfig { audit: true, ..cfg(Policy::Dfix) };
        let mut s = Space::new(Domain::from_bounds(&[(0, 1), (0, 1)]), c).unwrap();
        s.post_prop(Overconfident(aliased_regular()));
        assert!(s.propagate());
        assert!(!s.audit());
    }

    #[test]
    fn audit_catches_suppressed_enqueue() {
        let c = EngineConfig { audit: true, ..cfg(Policy::Input) };
        let mut s = Space::new(Domain::from_bounds(&[(0, 1), (0, 1), (0, 2)]), c).unwrap();
        s.post_unscheduled(PropEntry::single(AllDiffDomain::new(vec![v(0), v(1), v(2)])));
        assert!(!s.audit());
        assert!(s.propagate());
        assert_eq!(s.violations()[0].prop, PropId(0));
    }
}
