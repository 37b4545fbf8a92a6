//! The propagator abstraction and the propagator library.

use std::fmt;

use crate::domain::{Domain, VarId, Wipeout};
use crate::event::EventSet;

mod alldiff;
mod arith;
mod binary;
mod boolsum;
mod combine;
mod exactly;
mod generic;
mod lex;
mod linear;
mod min;
mod regular;

pub use alldiff::{AllDiffBounds, AllDiffDomain, AllDiffNaive};
pub use arith::{Abs, Even, GuardedLeq, Mult, Plus};
pub use binary::{EqOffset, LeqOffset, NeqOffset, UnaryBound};
pub use boolsum::{BoolSum, SumRel, Term};
pub use combine::{Immediate, StagedKind, StagedPair};
pub use exactly::Exactly;
pub use generic::{dom_generic, zbnd_wrap, DomGeneric, Predicate, ZbndGeneric, DEFAULT_CAP};
pub use lex::LexLe;
pub use linear::{LinearEqBounds, LinearEqDomain, Sweep};
pub use min::MinProp;
pub use regular::{Dfa, Regular};

/// Outcome of one propagator application.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PropStatus {
    Failed,
    /// Will never prune again on any stronger domain.
    Subsumed,
    /// The result is a fixpoint of the propagator.
    AtFixpoint,
    Unknown,
}

/// Scheduling priority: 14 levels, lower runs first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Priority(u8);

impl Priority {
    pub const UNARY_HIGH: Priority = Priority(0);
    pub const UNARY_LOW: Priority = Priority(1);
    pub const BINARY_HIGH: Priority = Priority(2);
    pub const BINARY_LOW: Priority = Priority(3);
    pub const TERNARY_HIGH: Priority = Priority(4);
    pub const TERNARY_LOW: Priority = Priority(5);
    pub const LINEAR_HIGH: Priority = Priority(6);
    pub const LINEAR_LOW: Priority = Priority(7);
    pub const QUADRATIC_HIGH: Priority = Priority(8);
    pub const QUADRATIC_LOW: Priority = Priority(9);
    pub const CUBIC_HIGH: Priority = Priority(10);
    pub const CUBIC_LOW: Priority = Priority(11);
    pub const VERYSLOW_HIGH: Priority = Priority(12);
    pub const VERYSLOW_LOW: Priority = Priority(13);

    pub const LEVELS: usize = 14;
    const NAMES: [&'static str; 7] = ["UNARY", "BINARY", "TERNARY", "LINEAR", "QUADRATIC", "CUBIC", "VERYSLOW"];

    pub fn new(level: u8) -> Self {
        assert!((level as usize) < Self::LEVELS, "priority level {level} out of range");
        Priority(level)
    }

    pub fn level(self) -> u8 {
        self.0
    }

    /// Level on the 7-step scale (HIGH and LOW merged).
    pub fn band(self) -> u8 {
        self.0 / 2
    }

    pub fn is_high(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Same HIGH/LOW sub-level within another band.
    pub fn in_band(self, band: u8) -> Priority {
        Priority(band * 2 + self.0 % 2)
    }

    /// Bounds-style priority for a constraint over `n` distinct variables.
    pub fn for_arity(n: usize) -> Priority {
        match n {
            0 | 1 => Priority::UNARY_HIGH,
            2 => Priority::BINARY_HIGH,
            3 => Priority::TERNARY_HIGH,
            _ => Priority::LINEAR_HIGH,
        }
    }
}

impl fmt::Debug for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hl = if self.is_high() { "HIGH" } else { "LOW" };
        write!(f, "{}_{}", Self::NAMES[self.band() as usize], hl)
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which kind of dynamic event set to compute.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DynEventMode {
    Monotonic,
    Full,
}

/// A propagator: a contracting, monotone function on domains.
///
/// Propagators are immutable; everything they know about the search state is
/// read from the domain, so one instance can be shared by many solver states.
pub trait Propagator: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    /// Variables read and written.
    fn vars(&self) -> &[VarId];

    /// Static event set.
    fn events(&self) -> EventSet;

    fn priority(&self) -> Priority;

    /// True if every application returns a fixpoint.
    fn idempotent(&self) -> bool {
        false
    }

    /// Applies the propagator in place.
    fn propagate(&self, d: &mut Domain) -> PropStatus;

    /// Event set for the current domain, which must be a fixpoint of this
    /// propagator. `None` keeps the static set.
    fn dynamic_events(&self, _d: &Domain, _mode: DynEventMode) -> Option<EventSet> {
        None
    }
}

/// Runs a pruning body, mapping a wipeout to `Failed`.
pub(crate) fn run(d: &mut Domain, body: impl FnOnce(&mut Domain) -> Result<PropStatus, Wipeout>) -> PropStatus {
    if d.is_failed() {
        return PropStatus::Failed;
    }
    match body(d) {
        Ok(s) => s,
        Err(Wipeout) => {
            d.mark_failed();
            PropStatus::Failed
        }
    }
}

/// Functional form: applies `p` to a copy of `d`.
pub fn apply(p: &dyn Propagator, d: &Domain) -> (Domain, PropStatus) {
    let mut out = d.clone();
    let s = p.propagate(&mut out);
    (out, s)
}

/// Distinct variables in first-occurrence order.
pub(crate) fn distinct(vars: &[VarId]) -> Vec<VarId> {
    let mut out: Vec<VarId> = Vec::with_capacity(vars.len());
    for &x in vars {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

pub(crate) fn all_fixed(d: &Domain, vars: &[VarId]) -> bool {
    vars.iter().all(|&x| d.is_fixed(x))
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Clamps an i128 bound into the value range.
pub(crate) fn clamp(v: i128) -> crate::domain::Val {
    v.clamp(i64::MIN as i128 / 2, i64::MAX as i128 / 2) as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_division() {
        assert_eq!(floor_div(7, 2), 3);
        assert_eq!(floor_div(-7, 2), -4);
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(ceil_div(7, -2), -3);
        assert_eq!(floor_div(7, -2), -4);
        assert_eq!(ceil_div(6, 3), 2);
    }

    #[test]
    fn priority_names_and_bands() {
        assert_eq!(format!("{}", Priority::QUADRATIC_LOW), "QUADRATIC_LOW");
        assert_eq!(Priority::LINEAR_LOW.band(), 3);
        assert_eq!(Priority::LINEAR_LOW.in_band(1), Priority::BINARY_LOW);
        assert_eq!(Priority::for_arity(3), Priority::TERNARY_HIGH);
    }
}
