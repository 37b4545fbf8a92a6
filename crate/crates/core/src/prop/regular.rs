//! `regular(xs, dfa)`: the sequence of values is accepted by an automaton.

use std::collections::HashMap;
use std::sync::Arc;

use crate::domain::{Domain, IntSet, Val, VarId, Wipeout};
use crate::error::{Error, Result};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, distinct, run, PropStatus, Propagator, Priority};

/// A deterministic automaton; missing transitions reject.
#[derive(Clone, Debug)]
pub struct Dfa {
    states: usize,
    start: usize,
    accepting: Vec<bool>,
    delta: Vec<HashMap<Val, usize>>,
}

impl Dfa {
    pub fn new(states: usize, start: usize, accepting: &[usize], transitions: &[(usize, Val, usize)]) -> Self {
        let mut acc = vec![false; states];
        for &q in accepting {
            acc[q] = true;
        }
        let mut delta = vec![HashMap::new(); states];
        for &(q, v, r) in transitions {
            delta[q].insert(v, r);
        }
        Dfa { states, start, accepting: acc, delta }
    }

    pub fn step(&self, q: usize, v: Val) -> Option<usize> {
        self.delta[q].get(&v).copied()
    }

    pub fn accepts(&self, word: &[Val]) -> bool {
        let mut q = self.start;
        for &v in word {
            match self.step(q, v) {
                Some(r) => q = r,
                None => return false,
            }
        }
        self.accepting[q]
    }

    /// Automaton for a nonogram line: 0/1 cells whose runs of 1s have the
    /// given lengths, in order.
    pub fn nonogram(runs: &[usize]) -> Dfa {
        // states: position in the pattern 0* 1^r1 0+ 1^r2 ... 0*
        let mut trans: Vec<(usize, Val, usize)> = Vec::new();
        let mut q = 0usize;
        trans.push((0, 0, 0));
        for (i, &r) in runs.iter().enumerate() {
            for _ in 0..r {
                trans.push((q, 1, q + 1));
                q += 1;
            }
            if i + 1 < runs.len() {
                // mandatory gap, then optional extra zeros
                trans.push((q, 0, q + 1));
                q += 1;
                trans.push((q, 0, q));
            }
        }
        if !runs.is_empty() {
            trans.push((q, 0, q + 1));
            trans.push((q + 1, 0, q + 1));
        }
        let last = q + usize::from(!runs.is_empty());
        let accepting: Vec<usize> = if runs.is_empty() { vec![0] } else { vec![q, last] };
        Dfa::new(last + 1, 0, &accepting, &trans)
    }
}

/// Layered-graph propagator. With repeated variables a single pass is not a
/// fixpoint, and the propagator says so.
#[derive(Clone, Debug)]
pub struct Regular {
    xs: Vec<VarId>,
    uniq: Vec<VarId>,
    dfa: Arc<Dfa>,
    repeats: bool,
}

impl Regular {
    pub fn new(xs: Vec<VarId>, dfa: Arc<Dfa>) -> Result<Self> {
        // some accepting word of the right length must exist
        let mut layer = vec![false; dfa.states];
        layer[dfa.start] = true;
        for _ in 0..xs.len() {
            let mut next = vec![false; dfa.states];
            for q in (0..dfa.states).filter(|&q| layer[q]) {
                for &r in dfa.delta[q].values() {
                    next[r] = true;
                }
            }
            layer = next;
        }
        if !(0..dfa.states).any(|q| layer[q] && dfa.accepting[q]) {
            return Err(Error::MalformedAutomaton(xs.len()));
        }
        let uniq = distinct(&xs);
        let repeats = uniq.len() != xs.len();
        Ok(Regular { xs, uniq, dfa, repeats })
    }
}

impl Propagator for Regular {
    fn name(&self) -> String {
        format!("regular({})", self.xs.len())
    }
    fn vars(&self) -> &[VarId] {
        &self.uniq
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.uniq.iter().copied(), EventMask::DMC)
    }
    fn priority(&self) -> Priority {
        Priority::VERYSLOW_LOW
    }
    fn idempotent(&self) -> bool {
        !self.repeats
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let dfa = &*self.dfa;
        let n = self.xs.len();
        let s = dfa.states;
        run(d, |d| {
            let values: Vec<Vec<Val>> = self.xs.iter().map(|&x| d.get(x).iter().collect()).collect();
            // forward reachability
            let mut fwd = vec![vec![false; s]; n + 1];
            fwd[0][dfa.start] = true;
            for i in 0..n {
                for q in 0..s {
                    if !fwd[i][q] {
                        continue;
                    }
                    for &v in &values[i] {
                        if let Some(r) = dfa.step(q, v) {
                            fwd[i + 1][r] = true;
                        }
                    }
                }
            }
            // backward: states that still reach acceptance
            let mut bwd = vec![vec![false; s]; n + 1];
            for q in 0..s {
                bwd[n][q] = fwd[n][q] && dfa.accepting[q];
            }
            let mut support: Vec<Vec<Val>> = vec![Vec::new(); n];
            for i in (0..n).rev() {
                for q in 0..s {
                    if !fwd[i][q] {
                        continue;
                    }
                    for &v in &values[i] {
                        if let Some(r) = dfa.step(q, v) {
                            if bwd[i + 1][r] {
                                bwd[i][q] = true;
                                support[i].push(v);
                            }
                        }
                    }
                }
            }
            let mut changed = false;
            for (i, &x) in self.xs.iter().enumerate() {
                let keep = IntSet::from_values(support[i].iter().copied());
                if keep.is_empty() {
                    return Err(Wipeout);
                }
                changed |= d.restrict(x, &keep)?;
            }
            Ok(if all_fixed(d, &self.uniq) {
                // with repeated variables the supports may come from different words
                if self.repeats && !dfa.accepts(&self.xs.iter().map(|&x| d.min(x)).collect::<Vec<_>>()) {
                    return Err(Wipeout);
                }
                PropStatus::Subsumed
            } else if self.repeats && changed {
                PropStatus::Unknown
            } else {
                PropStatus::AtFixpoint
            })
        })
    }
}
