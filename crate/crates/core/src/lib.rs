//! Finite-domain constraint propagation with events, priorities and staged
//! propagators.

pub mod bench;
pub mod check;
pub mod domain;
pub mod engine;
pub mod error;
pub mod event;
pub mod model;
pub mod oracle;
pub mod prop;
pub mod search;

pub use domain::{Domain, IntSet, Val, VarId};
pub use error::{Error, Result};
pub use event::{EventMask, EventSet, PropId};
pub use prop::{PropStatus, Propagator, Priority};
pub use engine::{EngineConfig, PropEntry, Space, Stats};
pub use model::{Constraint, Model, Strength};
pub use search::{search, Brancher, Limits, Mode, Outcome, SearchResult, ValSelect, VarSelect};
