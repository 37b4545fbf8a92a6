//! Engine configuration: the scheduling dimensions that can be varied
//! independently of the model.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::event::EventMask;
use crate::prop::{DynEventMode, Priority};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum FixpointMode {
    None,
    Static,
    Dynamic,
}

/// Which event kinds are distinguished.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum EventLevel {
    /// Any change on an input variable wakes.
    None,
    Fix,
    FixBc,
    FixLbcUbc,
    FixBcDmc,
}

impl EventLevel {
    /// Widens a subscription to what this level can express.
    pub fn widen(self, m: EventMask) -> EventMask {
        if m.is_empty() {
            return m;
        }
        match self {
            EventLevel::None => EventMask::DMC,
            EventLevel::Fix => {
                let mut out = m & EventMask::FIX;
                if m.intersects(EventMask::BC | EventMask::DMC) {
                    out |= EventMask::DMC;
                }
                out
            }
            EventLevel::FixBc | EventLevel::FixBcDmc => {
                if m.intersects(EventMask::BC) {
                    m | EventMask::BC
                } else {
                    m
                }
            }
            EventLevel::FixLbcUbc => m,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DynEvents {
    Static,
    Monotonic,
    Full,
}

impl DynEvents {
    pub fn mode(self) -> Option<DynEventMode> {
        match self {
            DynEvents::Static => None,
            DynEvents::Monotonic => Some(DynEventMode::Monotonic),
            DynEvents::Full => Some(DynEventMode::Full),
        }
    }
}

/// Order within a priority level.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum QueueOrder {
    Fifo,
    Lifo,
    /// LIFO on the levels whose bit is set, FIFO elsewhere.
    Mixed(u16),
}

impl QueueOrder {
    pub fn is_lifo(self, level: usize) -> bool {
        match self {
            QueueOrder::Fifo => false,
            QueueOrder::Lifo => true,
            QueueOrder::Mixed(mask) => mask >> level & 1 == 1,
        }
    }
}

/// How many distinct priority levels the queue uses.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Granularity {
    One,
    Small,
    Medium,
    Full,
}

impl Granularity {
    /// Queue level for a priority.
    pub fn level(self, p: Priority) -> usize {
        match self {
            Granularity::Full => p.level() as usize,
            Granularity::Medium => p.band() as usize,
            Granularity::Small => match p.band() {
                0..=2 => 0,
                3 | 4 => 1,
                _ => 2,
            },
            Granularity::One => 0,
        }
    }
}

/// How a weak and a strong propagator for one constraint are combined.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Combination {
    Single,
    Immediate,
    Multiple,
    Staged,
}

/// The six wake-up policies, from plain input dependence to fully dynamic
/// event sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Policy {
    Input,
    Sfix,
    Dfix,
    Events,
    Mevents,
    Devents,
}

impl Policy {
    pub const ALL: [Policy; 6] =
        [Policy::Input, Policy::Sfix, Policy::Dfix, Policy::Events, Policy::Mevents, Policy::Devents];

    pub fn settings(self) -> (FixpointMode, EventLevel, DynEvents) {
        use {DynEvents as D, EventLevel as E, FixpointMode as F};
        match self {
            Policy::Input => (F::None, E::None, D::Static),
            Policy::Sfix => (F::Static, E::None, D::Static),
            Policy::Dfix => (F::Dynamic, E::None, D::Static),
            Policy::Events => (F::Dynamic, E::FixBcDmc, D::Static),
            Policy::Mevents => (F::Dynamic, E::FixBcDmc, D::Monotonic),
            Policy::Devents => (F::Dynamic, E::FixBcDmc, D::Full),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct EngineConfig {
    pub fixpoint: FixpointMode,
    pub events: EventLevel,
    pub dyn_events: DynEvents,
    pub queue: QueueOrder,
    pub granularity: Granularity,
    pub inverse_priorities: bool,
    pub complete_fixpoints: bool,
    pub dynamic_priorities: bool,
    pub combination: Combination,
    /// Treat a subsumed result as a plain fixpoint: the propagator stays
    /// subscribed and keeps running.
    pub keep_subsumed: bool,
    /// Check the loop-head invariant before every step. Expensive.
    pub audit: bool,
    /// Record a per-step trace.
    pub trace: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            fixpoint: FixpointMode::Dynamic,
            events: EventLevel::FixBcDmc,
            dyn_events: DynEvents::Static,
            queue: QueueOrder::Fifo,
            granularity: Granularity::Full,
            inverse_priorities: false,
            complete_fixpoints: false,
            dynamic_priorities: false,
            combination: Combination::Single,
            keep_subsumed: false,
            audit: false,
            trace: false,
        }
    }
}

impl EngineConfig {
    pub fn with_policy(mut self, p: Policy) -> Self {
        (self.fixpoint, self.events, self.dyn_events) = p.settings();
        self
    }

    pub fn policy(&self) -> Option<Policy> {
        Policy::ALL.into_iter().find(|p| p.settings() == (self.fixpoint, self.events, self.dyn_events))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dyn_events != DynEvents::Static
            && (self.events != EventLevel::FixBcDmc || self.fixpoint != FixpointMode::Dynamic)
        {
            return Err(Error::InvalidConfig(
                "dynamic event sets need events fix-bc-dmc and dynamic fixpoint reasoning".into(),
            ));
        }
        if self.combination == Combination::Staged && self.granularity < Granularity::Medium {
            return Err(Error::InvalidConfig("staged propagators need medium or full priorities".into()));
        }
        Ok(())
    }

    /// Short label naming the non-default scheduling choices.
    pub fn label(&self) -> String {
        let mut s = match self.policy() {
            Some(p) => format!("{p}"),
            None => format!("{:?}/{:?}/{:?}", self.fixpoint, self.events, self.dyn_events).to_lowercase(),
        };
        match self.queue {
            QueueOrder::Fifo => {}
            QueueOrder::Lifo => s.push_str(",lifo"),
            QueueOrder::Mixed(m) => s.push_str(&format!(",lifo={m:#x}")),
        }
        if self.granularity != Granularity::Full {
            s.push_str(&format!(",{}", format!("{:?}", self.granularity).to_lowercase()));
        }
        if self.inverse_priorities {
            s.push_str(",inverse");
        }
        if self.complete_fixpoints {
            s.push_str(",complete");
        }
        if self.dynamic_priorities {
            s.push_str(",dynprio");
        }
        if self.keep_subsumed {
            s.push_str(",keep-subsumed");
        }
        if self.combination != Combination::Single {
            s.push_str(&format!(",{}", format!("{:?}", self.combination).to_lowercase()));
        }
        s
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Policy::Input => "input",
            Policy::Sfix => "sfix",
            Policy::Dfix => "dfix",
            Policy::Events => "events",
            Policy::Mevents => "mevents",
            Policy::Devents => "devents",
        };
        f.write_str(s)
    }
}

fn parse_err(what: &str, s: &str) -> Error {
    Error::InvalidConfig(format!("unknown {what} `{s}`"))
}

impl FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL.into_iter().find(|p| p.to_string() == s).ok_or_else(|| parse_err("policy", s))
    }
}

impl FromStr for FixpointMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FixpointMode::None),
            "static" => Ok(FixpointMode::Static),
            "dynamic" => Ok(FixpointMode::Dynamic),
            _ => Err(parse_err("fixpoint mode", s)),
        }
    }
}

impl FromStr for EventLevel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(EventLevel::None),
            "fix" => Ok(EventLevel::Fix),
            "fix-bc" => Ok(EventLevel::FixBc),
            "fix-lbc-ubc" => Ok(EventLevel::FixLbcUbc),
            "fix-bc-dmc" => Ok(EventLevel::FixBcDmc),
            _ => Err(parse_err("event level", s)),
        }
    }
}

impl FromStr for DynEvents {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(DynEvents::Static),
            "monotonic" => Ok(DynEvents::Monotonic),
            "full" => Ok(DynEvents::Full),
            _ => Err(parse_err("event-set mode", s)),
        }
    }
}

impl FromStr for QueueOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fifo" => Ok(QueueOrder::Fifo),
            "lifo" => Ok(QueueOrder::Lifo),
            _ => Err(parse_err("queue order", s)),
        }
    }
}

impl FromStr for Granularity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Granularity::One),
            "small" => Ok(Granularity::Small),
            "medium" => Ok(Granularity::Medium),
            "full" => Ok(Granularity::Full),
            _ => Err(parse_err("priority granularity", s)),
        }
    }
}

impl FromStr for Combination {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Combination::Single),
            "immediate" => Ok(Combination::Immediate),
            "multiple" => Ok(Combination::Multiple),
            "staged" => Ok(Combination::Staged),
            _ => Err(parse_err("combination", s)),
        }
    }
}
