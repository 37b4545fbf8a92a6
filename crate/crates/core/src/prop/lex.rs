//! `xs ≤lex ys`.

use crate::domain::{Domain, VarId};
use crate::event::{EventMask, EventSet};
use crate::prop::{distinct, run, DynEventMode, PropStatus, Propagator, Priority};

/// Lexicographic ordering of two equal-length vectors.
///
/// Finds the first position `α` whose pair is not fixed to equal values and
/// enforces `x_α ≤ y_α` there, strictly when the suffix after `α` cannot be
/// lexicographically smaller or equal. Rules repeat until stable.
#[derive(Clone, Debug)]
pub struct LexLe {
    xs: Vec<VarId>,
    ys: Vec<VarId>,
    all: Vec<VarId>,
}

impl LexLe {
    pub fn new(xs: Vec<VarId>, ys: Vec<VarId>) -> Self {
        assert_eq!(xs.len(), ys.len(), "lex needs equal lengths");
        let mut all = xs.clone();
        all.extend_from_slice(&ys);
        let all = distinct(&all);
        LexLe { xs, ys, all }
    }

    fn alpha(&self, d: &Domain) -> usize {
        (0..self.xs.len())
            .find(|&i| {
                let (x, y) = (self.xs[i], self.ys[i]);
                x != y && !(d.is_fixed(x) && d.is_fixed(y) && d.value(x) == d.value(y))
            })
            .unwrap_or(self.xs.len())
    }

    /// `suffix_ok[i]`: positions `i..` can still be ≤lex under bounds reasoning.
    fn suffix_ok(&self, d: &Domain) -> Vec<bool> {
        let n = self.xs.len();
        let mut ok = vec![true; n + 1];
        for i in (0..n).rev() {
            let (x, y) = (self.xs[i], self.ys[i]);
            let less = x != y && d.min(x) < d.max(y);
            let equal = x == y || (d.min(x) <= d.max(y) && d.min(y) <= d.max(x));
            ok[i] = less || (equal && ok[i + 1]);
        }
        ok
    }

    fn entailed(&self, d: &Domain) -> bool {
        // ⟨max xs⟩ ≤lex ⟨min ys⟩
        for (&x, &y) in self.xs.iter().zip(&self.ys) {
            let (a, b) = (d.max(x), d.min(y));
            if a < b {
                return true;
            }
            if a > b {
                return false;
            }
        }
        true
    }
}

impl Propagator for LexLe {
    fn name(&self) -> String {
        format!("lex_le({})", self.xs.len())
    }
    fn vars(&self) -> &[VarId] {
        &self.all
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.all.iter().copied(), EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::LINEAR_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        run(d, |d| loop {
            let a = self.alpha(d);
            if a == self.xs.len() || self.entailed(d) {
                return Ok(PropStatus::Subsumed);
            }
            let ok = self.suffix_ok(d);
            let strict = i64::from(!ok[a + 1]);
            // alpha never stops at a position comparing a variable with itself
            let (x, y) = (self.xs[a], self.ys[a]);
            let mut ch = d.set_max(x, d.max(y) - strict)?;
            ch |= d.set_min(y, d.min(x) + strict)?;
            if !ch {
                return Ok(PropStatus::AtFixpoint);
            }
        })
    }
    fn dynamic_events(&self, d: &Domain, _mode: DynEventMode) -> Option<EventSet> {
        // pairs before α are fixed and equal for good
        let a = self.alpha(d);
        let vars = self.xs[a..].iter().chain(&self.ys[a..]).copied();
        Some(EventSet::uniform(vars, EventMask::BC))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    #[test]
    fn strict_prefix_entails() {
        let mut d = Domain::from_bounds(&[(1, 1), (0, 9), (2, 2), (0, 9)]);
        let p = LexLe::new(vec![v(0), v(1)], vec![v(2), v(3)]);
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
    }

    #[test]
    fn equal_vectors_entail() {
        let mut d = Domain::from_bounds(&[(1, 1), (4, 4), (1, 1), (4, 4)]);
        let p = LexLe::new(vec![v(0), v(1)], vec![v(2), v(3)]);
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
    }

    #[test]
    fn shared_head_with_bad_tail_fails() {
        // (x, a) <=lex (x, b) with a in [3,5], b in [0,2]
        let mut d = Domain::from_bounds(&[(0, 9), (3, 5), (0, 2)]);
        let p = LexLe::new(vec![v(0), v(1)], vec![v(0), v(2)]);
        assert_eq!(p.propagate(&mut d), PropStatus::Failed);
    }

    #[test]
    fn strictness_from_suffix() {
        // (x0, 5) <=lex (y0, 3) forces x0 < y0
        let mut d = Domain::from_bounds(&[(0, 4), (5, 5), (0, 4), (3, 3)]);
        let p = LexLe::new(vec![v(0), v(1)], vec![v(2), v(3)]);
        assert_eq!(p.propagate(&mut d), PropStatus::AtFixpoint);
        assert_eq!(d.bounds(v(0)), (0, 3));
        assert_eq!(d.bounds(v(2)), (1, 4));
    }
}
