//! `exactly(xs, m, k)`: exactly `m` of the `xs` take the constant value `k`.

use crate::domain::{Domain, Val, VarId};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, distinct, run, DynEventMode, PropStatus, Propagator, Priority};

#[derive(Clone, Debug)]
pub struct Exactly {
    xs: Vec<VarId>,
    m: VarId,
    k: Val,
    all: Vec<VarId>,
}

impl Exactly {
    pub fn new(xs: Vec<VarId>, m: VarId, k: Val) -> Self {
        let mut all = xs.clone();
        all.push(m);
        let all = distinct(&all);
        Exactly { xs, m, k, all }
    }

    /// (#fixed to k, #may be k)
    fn counts(&self, d: &Domain) -> (Val, Val) {
        let mut l = 0;
        let mut u = 0;
        for &x in &self.xs {
            if d.contains(x, self.k) {
                u += 1;
                if d.is_fixed(x) {
                    l += 1;
                }
            }
        }
        (l, u)
    }
}

impl Propagator for Exactly {
    fn name(&self) -> String {
        format!("exactly({} vars, {}, {})", self.xs.len(), self.m, self.k)
    }
    fn vars(&self) -> &[VarId] {
        &self.all
    }
    fn events(&self) -> EventSet {
        let mut es = EventSet::uniform(self.xs.iter().copied(), EventMask::DMC);
        es.insert(self.m, EventMask::BC);
        es
    }
    fn priority(&self) -> Priority {
        Priority::LINEAR_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let (m, k) = (self.m, self.k);
        run(d, |d| loop {
            let (l, u) = self.counts(d);
            let mut ch = d.set_bounds(m, l, u)?;
            if d.max(m) == l && u > l {
                for &x in &self.xs {
                    if !d.is_fixed(x) {
                        ch |= d.remove(x, k)?;
                    }
                }
            } else if d.min(m) == u && u > l {
                for &x in &self.xs {
                    if d.contains(x, k) {
                        ch |= d.fix(x, k)?;
                    }
                }
            }
            if !ch {
                return Ok(if all_fixed(d, &self.all) { PropStatus::Subsumed } else { PropStatus::AtFixpoint });
            }
        })
    }
    fn dynamic_events(&self, d: &Domain, _mode: DynEventMode) -> Option<EventSet> {
        // a variable that cannot be k, or is fixed to k, has a known contribution
        let undecided = self.xs.iter().copied().filter(|&x| d.contains(x, self.k) && !d.is_fixed(x));
        let mut es = EventSet::uniform(undecided, EventMask::DMC);
        es.insert(self.m, EventMask::BC);
        Some(es)
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
    fn forced_to_k() {
        let mut d = Domain::from_bounds(&[(0, 1), (0, 1), (0, 1), (3, 3)]);
        let p = Exactly::new(vec![v(0), v(1), v(2)], v(3), 1);
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
        assert!((0..3).all(|i| d.value(v(i)) == Some(1)));
    }

    #[test]
    fn counts_bound_m() {
        // x1 = k, x2 cannot be k, x3 in {k, k+1}
        let k = 4;
        let mut d = Domain::new(vec![
            IntSet::singleton(k),
            IntSet::from_values([0, 1]),
            IntSet::from_values([k, k + 1]),
            IntSet::interval(0, 3),
        ]);
        Exactly::new(vec![v(0), v(1), v(2)], v(3), k).propagate(&mut d);
        assert_eq!(d.bounds(v(3)), (1, 2));
    }

    #[test]
    fn decided_variables_leave_the_event_set() {
        let d = Domain::new(vec![IntSet::from_values([2, 5, 6, 10, 11, 12]), IntSet::interval(0, 9), IntSet::interval(0, 2)]);
        let p = Exactly::new(vec![v(0), v(1)], v(2), 3);
        let es = p.dynamic_events(&d, DynEventMode::Monotonic).unwrap();
        assert_eq!(es.get(v(0)), EventMask::empty());
        assert_eq!(es.get(v(1)), EventMask::DMC);
    }
}
