//! Propagators computed by enumerating tuples: the domain propagator of an
//! arbitrary constraint and its bounds(Z) counterpart.

use std::fmt;
use std::sync::Arc;

use crate::domain::{Domain, IntSet, Val, VarId};
use crate::error::{Error, Result};
use crate::event::{EventMask, EventSet};
use crate::prop::{distinct, PropStatus, Propagator, Priority};

/// Solution test over values listed in the constraint's variable order.
pub type Predicate = Arc<dyn Fn(&[Val]) -> bool + Send + Sync>;

/// Default limit on the number of enumerated tuples.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Prunes `d` to the values that occur in some solution of `pred` over
/// `vars`. Variables may repeat; a tuple must then agree on every copy.
pub fn dom_generic(vars: &[VarId], pred: &(dyn Fn(&[Val]) -> bool + Send + Sync), d: &Domain, cap: u64) -> Result<(Domain, PropStatus)> {
    let mut out = d.clone();
    let status = dom_in_place(vars, pred, &mut out, cap)?;
    Ok((out, status))
}

/// `d ⊓ hull(dom_generic(hull(d)))`.
pub fn zbnd_wrap(vars: &[VarId], pred: &(dyn Fn(&[Val]) -> bool + Send + Sync), d: &Domain, cap: u64) -> Result<(Domain, PropStatus)> {
    let mut out = d.clone();
    let status = zbnd_in_place(vars, pred, &mut out, cap)?;
    Ok((out, status))
}

fn product(d: &Domain, uniq: &[VarId]) -> u128 {
    uniq.iter().map(|&x| d.size(x) as u128).product()
}

fn dom_in_place(vars: &[VarId], pred: &(dyn Fn(&[Val]) -> bool + Send + Sync), d: &mut Domain, cap: u64) -> Result<PropStatus> {
    if d.is_failed() {
        return Ok(PropStatus::Failed);
    }
    let uniq = distinct(vars);
    let total = product(d, &uniq);
    if total > cap as u128 {
        return Err(Error::EnumerationCapExceeded { product: total, cap });
    }
    let pos: Vec<usize> = vars.iter().map(|x| uniq.iter().position(|u| u == x).unwrap()).collect();
    let values: Vec<Vec<Val>> = uniq.iter().map(|&x| d.get(x).iter().collect()).collect();
    let mut seen: Vec<Vec<bool>> = values.iter().map(|v| vec![false; v.len()]).collect();
    let mut idx = vec![0usize; uniq.len()];
    let mut tuple = vec![0 as Val; vars.len()];
    let mut solutions: u128 = 0;
    'outer: loop {
        for (t, &p) in tuple.iter_mut().zip(&pos) {
            *t = values[p][idx[p]];
        }
        if pred(&tuple) {
            solutions += 1;
            for (u, &i) in idx.iter().enumerate() {
                seen[u][i] = true;
            }
        }
        // odometer increment
        for u in (0..uniq.len()).rev() {
            idx[u] += 1;
            if idx[u] < values[u].len() {
                continue 'outer;
            }
            idx[u] = 0;
        }
        break;
    }
    if solutions == 0 {
        if let Some(&x) = uniq.first() {
            d.replace(x, IntSet::empty());
        }
        d.mark_failed();
        return Ok(PropStatus::Failed);
    }
    for (u, &x) in uniq.iter().enumerate() {
        let keep = IntSet::from_values(values[u].iter().zip(&seen[u]).filter(|(_, &s)| s).map(|(&v, _)| v));
        d.restrict(x, &keep).expect("supported values are nonempty");
    }
    if solutions == product(d, &uniq) {
        Ok(PropStatus::Subsumed)
    } else {
        Ok(PropStatus::AtFixpoint)
    }
}

fn zbnd_in_place(vars: &[VarId], pred: &(dyn Fn(&[Val]) -> bool + Send + Sync), d: &mut Domain, cap: u64) -> Result<PropStatus> {
    if d.is_failed() {
        return Ok(PropStatus::Failed);
    }
    let mut relaxed = d.range_relax();
    if dom_in_place(vars, pred, &mut relaxed, cap)? == PropStatus::Failed {
        d.mark_failed();
        return Ok(PropStatus::Failed);
    }
    let mut hole = false;
    for x in distinct(vars) {
        let (lo, hi) = relaxed.bounds(x);
        if d.set_bounds(x, lo, hi).is_err() {
            return Ok(PropStatus::Failed);
        }
        if d.bounds(x) != (lo, hi) {
            hole = true;
        }
    }
    Ok(if hole { PropStatus::Unknown } else { PropStatus::AtFixpoint })
}

/// Domain propagator for an arbitrary constraint, by enumeration.
///
/// Above the enumeration cap it leaves the domain unchanged.
#[derive(Clone)]
pub struct DomGeneric {
    label: String,
    vars: Vec<VarId>,
    pred: Predicate,
    priority: Priority,
    cap: u64,
}

impl DomGeneric {
    pub fn new(label: impl Into<String>, vars: Vec<VarId>, pred: Predicate, priority: Priority) -> Self {
        DomGeneric { label: label.into(), vars, pred, priority, cap: DEFAULT_CAP }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }
}

impl fmt::Debug for DomGeneric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dom({})", self.label)
    }
}

impl Propagator for DomGeneric {
    fn name(&self) -> String {
        format!("dom({})", self.label)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars.iter().copied(), EventMask::DMC)
    }
    fn priority(&self) -> Priority {
        self.priority
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        dom_in_place(&self.vars, &*self.pred, d, self.cap).unwrap_or(PropStatus::AtFixpoint)
    }
}

/// bounds(Z) propagator for an arbitrary constraint, by enumeration.
#[derive(Clone)]
pub struct ZbndGeneric {
    label: String,
    vars: Vec<VarId>,
    pred: Predicate,
    priority: Priority,
    cap: u64,
}

impl ZbndGeneric {
    pub fn new(label: impl Into<String>, vars: Vec<VarId>, pred: Predicate, priority: Priority) -> Self {
        ZbndGeneric { label: label.into(), vars, pred, priority, cap: DEFAULT_CAP }
    }
}

impl fmt::Debug for ZbndGeneric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zbnd({})", self.label)
    }
}

impl Propagator for ZbndGeneric {
    fn name(&self) -> String {
        format!("zbnd({})", self.label)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars.iter().copied(), EventMask::BC)
    }
    fn priority(&self) -> Priority {
        self.priority
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        zbnd_in_place(&self.vars, &*self.pred, d, self.cap).unwrap_or(PropStatus::AtFixpoint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    fn three_x1_eq_two_x2(t: &[Val]) -> bool {
        3 * t[0] == 2 * t[1]
    }

    #[test]
    fn domain_of_linear_equation() {
        let d = Domain::from_bounds(&[(0, 3), (0, 5)]);
        let (out, s) = dom_generic(&[v(0), v(1)], &three_x1_eq_two_x2, &d, DEFAULT_CAP).unwrap();
        assert_eq!(out.get(v(0)), &IntSet::from_values([0, 2]));
        assert_eq!(out.get(v(1)), &IntSet::from_values([0, 3]));
        assert_eq!(s, PropStatus::AtFixpoint);
    }

    #[test]
    fn bounds_of_linear_equation() {
        let d = Domain::from_bounds(&[(0, 3), (0, 5)]);
        let (out, _) = zbnd_wrap(&[v(0), v(1)], &three_x1_eq_two_x2, &d, DEFAULT_CAP).unwrap();
        assert_eq!(out.get(v(0)), &IntSet::interval(0, 2));
        assert_eq!(out.get(v(1)), &IntSet::interval(0, 3));
    }

    #[test]
    fn unsatisfiable_fails_and_solution_is_kept() {
        let d = Domain::from_bounds(&[(1, 1), (1, 1)]);
        let (out, s) = dom_generic(&[v(0), v(1)], &three_x1_eq_two_x2, &d, DEFAULT_CAP).unwrap();
        assert!(out.is_failed());
        assert_eq!(s, PropStatus::Failed);
        let d = Domain::from_bounds(&[(2, 2), (3, 3)]);
        let (out, s) = dom_generic(&[v(0), v(1)], &three_x1_eq_two_x2, &d, DEFAULT_CAP).unwrap();
        assert_eq!(out, d);
        assert_eq!(s, PropStatus::Subsumed);
    }

    #[test]
    fn cap_is_enforced() {
        let d = Domain::from_bounds(&[(0, 999), (0, 999), (0, 999)]);
        let r = dom_generic(&[v(0), v(1), v(2)], &|_| true, &d, DEFAULT_CAP);
        assert!(matches!(r, Err(Error::EnumerationCapExceeded { .. })));
    }

    #[test]
    fn repeated_variables_agree() {
        // x + x = y over x in [0,3], y in [0,3]
        let d = Domain::from_bounds(&[(0, 3), (0, 3)]);
        let (out, _) = dom_generic(&[v(0), v(0), v(1)], &|t| t[0] + t[1] == t[2], &d, DEFAULT_CAP).unwrap();
        assert_eq!(out.get(v(0)), &IntSet::interval(0, 1));
        assert_eq!(out.get(v(1)), &IntSet::from_values([0, 2]));
    }
}
