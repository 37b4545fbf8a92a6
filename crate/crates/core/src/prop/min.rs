//! `x0 = min(x1, x2)`.

use crate::domain::{Domain, VarId};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, run, DynEventMode, PropStatus, Propagator, Priority};

/// Bounds the result by the arguments and the arguments from below by the
/// result. The rules are applied until stable, so the propagator is
/// idempotent even when bounds fall into holes.
#[derive(Clone, Debug)]
pub struct MinProp {
    vars: [VarId; 3],
}

impl MinProp {
    pub fn new(x0: VarId, x1: VarId, x2: VarId) -> Self {
        MinProp { vars: [x0, x1, x2] }
    }
}

impl Propagator for MinProp {
    fn name(&self) -> String {
        let [x0, x1, x2] = self.vars;
        format!("{x0} = min({x1}, {x2})")
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        let [x0, x1, x2] = self.vars;
        EventSet::from_pairs([(x0, EventMask::LBC), (x1, EventMask::BC), (x2, EventMask::BC)])
    }
    fn priority(&self) -> Priority {
        Priority::TERNARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x0, x1, x2] = self.vars;
        run(d, |d| loop {
            let lo = d.min(x1).min(d.min(x2));
            let hi = d.max(x1).min(d.max(x2));
            let mut ch = d.set_bounds(x0, lo, hi)?;
            let m = d.min(x0);
            ch |= d.set_min(x1, m)?;
            ch |= d.set_min(x2, m)?;
            if !ch {
                return Ok(if all_fixed(d, &self.vars) { PropStatus::Subsumed } else { PropStatus::AtFixpoint });
            }
        })
    }
    fn dynamic_events(&self, d: &Domain, mode: DynEventMode) -> Option<EventSet> {
        let [x0, x1, x2] = self.vars;
        let sup0 = d.max(x0);
        // an argument whose minimum exceeds sup x0 can never matter again
        let live: Vec<VarId> = [x1, x2].into_iter().filter(|&x| d.min(x) <= sup0).collect();
        let mut es = EventSet::uniform([x0], EventMask::LBC);
        match mode {
            DynEventMode::Monotonic => {
                for &x in &live {
                    es.insert(x, EventMask::BC);
                }
            }
            DynEventMode::Full => {
                let least = [x1, x2].iter().map(|&x| d.min(x)).min().unwrap();
                for &x in &live {
                    es.insert(x, EventMask::UBC);
                    if d.min(x) == least {
                        es.insert(x, EventMask::LBC);
                    }
                }
            }
        }
        Some(es)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    fn f_k() -> MinProp {
        MinProp::new(v(0), v(1), v(2))
    }

    #[test]
    fn fixed_arguments() {
        let mut d = Domain::from_bounds(&[(0, 10), (3, 3), (7, 7)]);
        assert_eq!(f_k().propagate(&mut d), PropStatus::Subsumed);
        assert_eq!(d.value(v(0)), Some(3));
    }

    #[test]
    fn monotonic_set_drops_dominated_argument() {
        let d = Domain::from_bounds(&[(1, 3), (0, 9), (5, 7)]);
        let es = f_k().dynamic_events(&d, DynEventMode::Monotonic).unwrap();
        assert_eq!(es, EventSet::from_pairs([(v(0), EventMask::LBC), (v(1), EventMask::BC)]));
    }

    #[test]
    fn full_sets_follow_the_least_argument() {
        let d = Domain::from_bounds(&[(0, 10), (0, 15), (5, 10)]);
        let es = f_k().dynamic_events(&d, DynEventMode::Full).unwrap();
        assert_eq!(es, EventSet::from_pairs([(v(0), EventMask::LBC), (v(1), EventMask::BC), (v(2), EventMask::UBC)]));
        let d = Domain::from_bounds(&[(5, 9), (6, 9), (5, 10)]);
        let es = f_k().dynamic_events(&d, DynEventMode::Full).unwrap();
        assert_eq!(es, EventSet::from_pairs([(v(0), EventMask::LBC), (v(1), EventMask::UBC), (v(2), EventMask::BC)]));
    }
}
