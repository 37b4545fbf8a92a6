//! Sums of 0/1 variables: `Σ xs ≤ k` and `Σ xs = k`.

use crate::domain::{Domain, Val, VarId, Wipeout};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, distinct, run, DynEventMode, PropStatus, Propagator, Priority};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SumRel {
    Le,
    Eq,
}

/// Right-hand side of a sum.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Term {
    Const(Val),
    Var(VarId),
}

#[derive(Clone, Debug)]
pub struct BoolSum {
    xs: Vec<VarId>,
    rel: SumRel,
    k: Term,
    all: Vec<VarId>,
}

impl BoolSum {
    pub fn new(xs: Vec<VarId>, rel: SumRel, k: Term) -> Self {
        let mut all = xs.clone();
        if let Term::Var(v) = k {
            all.push(v);
        }
        let all = distinct(&all);
        BoolSum { xs, rel, k, all }
    }

    fn k_bounds(&self, d: &Domain) -> (Val, Val) {
        match self.k {
            Term::Const(c) => (c, c),
            Term::Var(v) => d.bounds(v),
        }
    }

    /// (#fixed to 1, undecided variables)
    fn census(&self, d: &Domain) -> (Val, Vec<VarId>) {
        let mut ones = 0;
        let mut und = Vec::new();
        for &x in &self.xs {
            if d.is_fixed(x) {
                if d.value(x) == Some(1) {
                    ones += 1;
                }
            } else if d.contains(x, 1) {
                und.push(x);
            }
        }
        (ones, und)
    }

    fn set_all(d: &mut Domain, xs: &[VarId], v: Val) -> Result<bool, Wipeout> {
        let mut ch = false;
        for &x in xs {
            ch |= d.fix(x, v)?;
        }
        Ok(ch)
    }

    /// Size of a sufficient watch set for `≤` with a constant bound.
    pub fn watch_size(ones: Val, undecided: usize, k: Val) -> usize {
        (ones + undecided as Val - k + 1).clamp(0, undecided as Val) as usize
    }
}

impl Propagator for BoolSum {
    fn name(&self) -> String {
        let op = if self.rel == SumRel::Le { "<=" } else { "=" };
        let rhs = match self.k {
            Term::Const(c) => c.to_string(),
            Term::Var(v) => v.to_string(),
        };
        format!("bool_sum({} vars) {op} {rhs}", self.xs.len())
    }
    fn vars(&self) -> &[VarId] {
        &self.all
    }
    fn events(&self) -> EventSet {
        let mut es = EventSet::uniform(self.xs.iter().copied(), EventMask::FIX);
        if let Term::Var(v) = self.k {
            es.insert(v, EventMask::BC);
        }
        es
    }
    fn priority(&self) -> Priority {
        Priority::LINEAR_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        run(d, |d| loop {
            let (ones, und) = self.census(d);
            let n_und = und.len() as Val;
            let mut ch = false;
            if let Term::Var(v) = self.k {
                ch |= match self.rel {
                    SumRel::Le => d.set_min(v, ones)?,
                    SumRel::Eq => d.set_bounds(v, ones, ones + n_und)?,
                };
            }
            let (klo, khi) = self.k_bounds(d);
            if ones > khi || (self.rel == SumRel::Eq && ones + n_und < klo) {
                return Err(Wipeout);
            }
            if !und.is_empty() {
                if ones == khi {
                    ch |= Self::set_all(d, &und, 0)?;
                } else if self.rel == SumRel::Eq && ones + n_und == klo {
                    ch |= Self::set_all(d, &und, 1)?;
                }
            }
            if !ch {
                let done = match self.rel {
                    SumRel::Le => ones + n_und <= klo,
                    SumRel::Eq => all_fixed(d, &self.all),
                };
                return Ok(if done { PropStatus::Subsumed } else { PropStatus::AtFixpoint });
            }
        })
    }
    fn dynamic_events(&self, d: &Domain, mode: DynEventMode) -> Option<EventSet> {
        let (ones, und) = self.census(d);
        let watched: &[VarId] = match (mode, self.rel, self.k) {
            (DynEventMode::Full, SumRel::Le, Term::Const(k)) => &und[..Self::watch_size(ones, und.len(), k)],
            _ => &und,
        };
        let mut es = EventSet::uniform(watched.iter().copied(), EventMask::FIX);
        if let Term::Var(v) = self.k {
            es.insert(v, EventMask::BC);
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

    fn bools(n: usize) -> Domain {
        Domain::from_bounds(&vec![(0, 1); n])
    }

    #[test]
    fn at_most_two() {
        let mut d = bools(5);
        d.fix(v(0), 1).unwrap();
        d.fix(v(3), 1).unwrap();
        let p = BoolSum::new((0..5).map(v).collect(), SumRel::Le, Term::Const(2));
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
        assert_eq!([1, 2, 4].map(|i| d.value(v(i))), [Some(0); 3]);
    }

    #[test]
    fn exactly_all() {
        let mut d = bools(3);
        let p = BoolSum::new((0..3).map(v).collect(), SumRel::Eq, Term::Const(3));
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
        assert!((0..3).all(|i| d.value(v(i)) == Some(1)));
    }

    #[test]
    fn variable_rhs() {
        let mut d = Domain::from_bounds(&[(1, 1), (0, 1), (0, 1), (0, 9)]);
        let p = BoolSum::new(vec![v(0), v(1), v(2)], SumRel::Eq, Term::Var(v(3)));
        p.propagate(&mut d);
        assert_eq!(d.bounds(v(3)), (1, 3));
    }

    #[test]
    fn watch_set_for_at_most_three_of_ten() {
        let d = bools(10);
        let p = BoolSum::new((0..10).map(v).collect(), SumRel::Le, Term::Const(3));
        let es = p.dynamic_events(&d, DynEventMode::Full).unwrap();
        assert_eq!(es.len(), 8);
    }
}
