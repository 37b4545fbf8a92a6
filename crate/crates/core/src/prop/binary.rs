//! Unary and binary propagators with constant offsets.

use crate::domain::{Domain, Val, VarId};
use crate::event::{EventMask, EventSet};
use crate::prop::{run, PropStatus, Propagator, Priority};

/// `x ≤ y + c`.
#[derive(Clone, Debug)]
pub struct LeqOffset {
    vars: [VarId; 2],
    c: Val,
}

impl LeqOffset {
    pub fn new(x: VarId, y: VarId, c: Val) -> Self {
        LeqOffset { vars: [x, y], c }
    }
}

impl Propagator for LeqOffset {
    fn name(&self) -> String {
        format!("{} <= {} + {}", self.vars[0], self.vars[1], self.c)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        let [x, y] = self.vars;
        EventSet::from_pairs([(x, EventMask::LBC), (y, EventMask::UBC)])
    }
    fn priority(&self) -> Priority {
        Priority::BINARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x, y] = self.vars;
        run(d, |d| {
            if x == y {
                return if self.c >= 0 { Ok(PropStatus::Subsumed) } else { Err(crate::domain::Wipeout) };
            }
            d.set_max(x, d.max(y) + self.c)?;
            d.set_min(y, d.min(x) - self.c)?;
            Ok(if d.max(x) <= d.min(y) + self.c { PropStatus::Subsumed } else { PropStatus::AtFixpoint })
        })
    }
}

/// `x ≠ y + c`.
#[derive(Clone, Debug)]
pub struct NeqOffset {
    vars: [VarId; 2],
    c: Val,
}

impl NeqOffset {
    pub fn new(x: VarId, y: VarId, c: Val) -> Self {
        NeqOffset { vars: [x, y], c }
    }
}

impl Propagator for NeqOffset {
    fn name(&self) -> String {
        format!("{} != {} + {}", self.vars[0], self.vars[1], self.c)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars, EventMask::FIX)
    }
    fn priority(&self) -> Priority {
        Priority::BINARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x, y] = self.vars;
        let c = self.c;
        run(d, |d| {
            if x == y {
                return if c != 0 { Ok(PropStatus::Subsumed) } else { Err(crate::domain::Wipeout) };
            }
            if let Some(v) = d.value(x) {
                d.remove(y, v - c)?;
                return Ok(PropStatus::Subsumed);
            }
            if let Some(v) = d.value(y) {
                d.remove(x, v + c)?;
                return Ok(PropStatus::Subsumed);
            }
            if d.max(x) < d.min(y) + c || d.min(x) > d.max(y) + c {
                return Ok(PropStatus::Subsumed);
            }
            Ok(PropStatus::AtFixpoint)
        })
    }
}

/// `x = y + c`, domain consistent.
#[derive(Clone, Debug)]
pub struct EqOffset {
    vars: [VarId; 2],
    c: Val,
}

impl EqOffset {
    pub fn new(x: VarId, y: VarId, c: Val) -> Self {
        EqOffset { vars: [x, y], c }
    }
}

impl Propagator for EqOffset {
    fn name(&self) -> String {
        format!("{} = {} + {}", self.vars[0], self.vars[1], self.c)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars, EventMask::DMC)
    }
    fn priority(&self) -> Priority {
        Priority::BINARY_LOW
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x, y] = self.vars;
        run(d, |d| {
            if x == y {
                return if self.c == 0 { Ok(PropStatus::Subsumed) } else { Err(crate::domain::Wipeout) };
            }
            let sy = d.get(y).shift(self.c);
            d.restrict(x, &sy)?;
            let sx = d.get(x).shift(-self.c);
            d.restrict(y, &sx)?;
            Ok(if d.is_fixed(x) { PropStatus::Subsumed } else { PropStatus::AtFixpoint })
        })
    }
}

/// `x ≤ v` or `x ≥ v`; the branching constraints of search.
#[derive(Clone, Debug)]
pub struct UnaryBound {
    vars: [VarId; 1],
    bound: Val,
    upper: bool,
}

impl UnaryBound {
    pub fn le(x: VarId, v: Val) -> Self {
        UnaryBound { vars: [x], bound: v, upper: true }
    }

    pub fn ge(x: VarId, v: Val) -> Self {
        UnaryBound { vars: [x], bound: v, upper: false }
    }
}

impl Propagator for UnaryBound {
    fn name(&self) -> String {
        let op = if self.upper { "<=" } else { ">=" };
        format!("{} {op} {}", self.vars[0], self.bound)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::new()
    }
    fn priority(&self) -> Priority {
        Priority::UNARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let x = self.vars[0];
        run(d, |d| {
            if self.upper {
                d.set_max(x, self.bound)?;
            } else {
                d.set_min(x, self.bound)?;
            }
            Ok(PropStatus::Subsumed)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::IntSet;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    #[test]
    fn leq_offset_cases() {
        let mut d = Domain::new(vec![IntSet::from_values([1, 5, 8]), IntSet::from_values([1, 5])]);
        let p = LeqOffset::new(v(0), v(1), 1);
        assert_eq!(p.propagate(&mut d), PropStatus::AtFixpoint);
        assert_eq!(d.get(v(0)), &IntSet::from_values([1, 5]));
        assert_eq!(d.get(v(1)), &IntSet::from_values([1, 5]));

        let mut d = Domain::from_bounds(&[(1, 3), (3, 7)]);
        let before = d.clone();
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
        assert_eq!(d, before);

        let mut d = Domain::from_bounds(&[(5, 5), (4, 4)]);
        assert_eq!(LeqOffset::new(v(0), v(1), 0).propagate(&mut d), PropStatus::Failed);
    }

    #[test]
    fn neq_offset_cases() {
        let mut d = Domain::new(vec![IntSet::from_values([2, 3]), IntSet::singleton(3)]);
        assert_eq!(NeqOffset::new(v(0), v(1), 0).propagate(&mut d), PropStatus::Subsumed);
        assert_eq!(d.get(v(0)), &IntSet::singleton(2));

        let mut d = Domain::from_bounds(&[(0, 2), (5, 9)]);
        assert_eq!(NeqOffset::new(v(0), v(1), 0).propagate(&mut d), PropStatus::Subsumed);

        let mut d = Domain::from_bounds(&[(4, 4), (4, 4)]);
        assert_eq!(NeqOffset::new(v(0), v(1), 0).propagate(&mut d), PropStatus::Failed);
    }

    #[test]
    fn eq_offset_shifts_holes() {
        let mut d = Domain::new(vec![IntSet::interval(0, 9), IntSet::from_values([1, 4])]);
        EqOffset::new(v(0), v(1), 2).propagate(&mut d);
        assert_eq!(d.get(v(0)), &IntSet::from_values([3, 6]));
    }
}
