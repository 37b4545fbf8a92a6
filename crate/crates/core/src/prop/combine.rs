//! Combining a weak and a strong propagator for the same constraint.

use std::sync::Arc;

use crate::domain::{Domain, VarId};
use crate::event::{EventMask, EventSet};
use crate::prop::{distinct, PropStatus, Propagator, Priority};

/// Runs the weak propagator and then, on the same domain, the strong one.
#[derive(Clone, Debug)]
pub struct Immediate {
    weak: Arc<dyn Propagator>,
    strong: Arc<dyn Propagator>,
    vars: Vec<VarId>,
}

impl Immediate {
    pub fn new(weak: Arc<dyn Propagator>, strong: Arc<dyn Propagator>) -> Self {
        let mut vars = weak.vars().to_vec();
        vars.extend_from_slice(strong.vars());
        Immediate { vars: distinct(&vars), weak, strong }
    }
}

impl Propagator for Immediate {
    fn name(&self) -> String {
        format!("{} then {}", self.weak.name(), self.strong.name())
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        self.weak.events().merge(&self.strong.events())
    }
    fn priority(&self) -> Priority {
        self.strong.priority()
    }
    fn idempotent(&self) -> bool {
        self.strong.idempotent()
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        if self.weak.propagate(d) == PropStatus::Failed {
            return PropStatus::Failed;
        }
        self.strong.propagate(d)
    }
}

/// Which stage-transition recipe a staged propagator follows.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StagedKind {
    /// Stage A is woken by fixing events only.
    AllDiff,
    /// Stage A is woken by bounds events. With unit coefficients a stage A
    /// fixpoint over range domains is already domain consistent.
    Linear { unit: bool },
    Generic,
}

impl StagedKind {
    /// Events that send the propagator to stage A.
    pub fn a_trigger(self) -> EventMask {
        match self {
            StagedKind::AllDiff => EventMask::FIX,
            StagedKind::Linear { .. } | StagedKind::Generic => EventMask::BC,
        }
    }
}

/// A weak (stage A) and a strong (stage B) propagator scheduled as one.
#[derive(Clone, Debug)]
pub struct StagedPair {
    pub kind: StagedKind,
    pub weak: Arc<dyn Propagator>,
    pub strong: Arc<dyn Propagator>,
    vars: Vec<VarId>,
}

impl StagedPair {
    pub fn new(kind: StagedKind, weak: Arc<dyn Propagator>, strong: Arc<dyn Propagator>) -> Self {
        let mut vars = weak.vars().to_vec();
        vars.extend_from_slice(strong.vars());
        StagedPair { kind, vars: distinct(&vars), weak, strong }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn events(&self) -> EventSet {
        self.weak.events().merge(&self.strong.events())
    }

    pub fn name(&self) -> String {
        format!("staged {}", self.strong.name())
    }
}
