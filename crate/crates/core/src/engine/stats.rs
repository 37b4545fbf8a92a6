use crate::prop::Priority;

/// Counters kept by the engine and the search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Propagator executions.
    pub steps: u64,
    /// Queue insertions.
    pub enqueues: u64,
    pub failures: u64,
    pub solutions: u64,
    pub nodes: u64,
    /// Executions per queue level.
    pub level_steps: [u64; Priority::LEVELS],
    /// Executions per propagator slot.
    pub prop_steps: Vec<u64>,
    /// Propagator applications made by the loop-head audit.
    pub audit_checks: u64,
    pub audit_violations: u64,
}

impl Stats {
    /// Adds another set of counters into this one.
    pub fn absorb(&mut self, o: &Stats) {
        self.steps += o.steps;
        self.enqueues += o.enqueues;
        self.failures += o.failures;
        self.solutions += o.solutions;
        self.nodes += o.nodes;
        for (a, b) in self.level_steps.iter_mut().zip(&o.level_steps) {
            *a += b;
        }
        if self.prop_steps.len() < o.prop_steps.len() {
            self.prop_steps.resize(o.prop_steps.len(), 0);
        }
        for (a, b) in self.prop_steps.iter_mut().zip(&o.prop_steps) {
            *a += b;
        }
        self.audit_checks += o.audit_checks;
        self.audit_violations += o.audit_violations;
    }
}
