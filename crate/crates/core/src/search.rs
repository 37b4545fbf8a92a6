//! Depth-first search and branch-and-bound over copied solver states.

use crate::domain::{Domain, Val, VarId};
use crate::engine::{PropEntry, Space, Stats};
use crate::prop::UnaryBound;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum VarSelect {
    /// First unfixed variable in the brancher's list.
    #[default]
    InputOrder,
    /// Unfixed variable with the smallest id.
    FirstUnfixed,
    /// Unfixed variable with the fewest values, ties by list order.
    MinSize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ValSelect {
    /// `x = inf` or `x ≥ inf + 1`.
    #[default]
    EqInfVsGeq,
    /// `x ≤ mid` or `x ≥ mid + 1`.
    SplitLeGe,
}

/// Branching rule. An empty variable list means all variables.
#[derive(Clone, Debug, Default)]
pub struct Brancher {
    pub vars: Vec<VarId>,
    pub var_select: VarSelect,
    pub val_select: ValSelect,
}

impl Brancher {
    pub fn new(vars: Vec<VarId>, var_select: VarSelect, val_select: ValSelect) -> Self {
        Brancher { vars, var_select, val_select }
    }

    /// Variable to branch on, or `None` if everything is fixed. Variables
    /// outside the list are used once the list is exhausted.
    pub fn select(&self, d: &Domain) -> Option<VarId> {
        let unfixed = |x: &VarId| !d.is_fixed(*x);
        let listed = match self.var_select {
            VarSelect::InputOrder => self.vars.iter().copied().find(unfixed),
            VarSelect::FirstUnfixed => self.vars.iter().copied().filter(unfixed).min(),
            VarSelect::MinSize => {
                let mut best: Option<VarId> = None;
                for x in self.vars.iter().copied().filter(unfixed) {
                    if best.is_none_or(|b| d.size(x) < d.size(b)) {
                        best = Some(x);
                    }
                }
                best
            }
        };
        listed.or_else(|| d.vars().find(unfixed))
    }

    /// Branch constraints for `x`, in exploration order. Together they cover
    /// the current domain of `x`.
    pub fn branches(&self, d: &Domain, x: VarId) -> Vec<Vec<PropEntry>> {
        let (lo, hi) = d.bounds(x);
        assert!(lo < hi, "branching on fixed variable {x}");
        match self.val_select {
            ValSelect::EqInfVsGeq => vec![
                vec![PropEntry::single(UnaryBound::le(x, lo)), PropEntry::single(UnaryBound::ge(x, lo))],
                vec![PropEntry::single(UnaryBound::ge(x, lo + 1))],
            ],
            ValSelect::SplitLeGe => {
                let mid = lo + (hi - lo).div_euclid(2);
                vec![vec![PropEntry::single(UnaryBound::le(x, mid))], vec![PropEntry::single(UnaryBound::ge(x, mid + 1))]]
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    First,
    All,
    Minimize(VarId),
    Maximize(VarId),
}

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub nodes: Option<u64>,
    /// Maximum number of solutions kept in the result.
    pub keep: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { nodes: None, keep: 10_000 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Outcome {
    Sat,
    Unsat,
    Optimal,
    /// The node limit was hit first.
    Limit,
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub outcome: Outcome,
    /// Solutions in the order found; in optimization mode each is better than
    /// the previous one.
    pub solutions: Vec<Vec<Val>>,
    pub objective: Option<Val>,
    pub stats: Stats,
}

impl SearchResult {
    pub fn best(&self) -> Option<&Vec<Val>> {
        self.solutions.last()
    }
}

/// Explores the space rooted at `root`, which may still have queued
/// propagators. Each node is propagated when taken from the stack.
pub fn search(root: Space, brancher: &Brancher, mode: Mode, limits: Limits) -> SearchResult {
    let mut stats = Stats::default();
    let mut solutions = Vec::new();
    let mut objective: Option<Val> = None;
    let mut stack = vec![root];
    let mut hit_limit = false;

    while let Some(mut s) = stack.pop() {
        if limits.nodes.is_some_and(|n| stats.nodes >= n) {
            hit_limit = true;
            break;
        }
        stats.nodes += 1;
        if let Some(b) = objective {
            match mode {
                Mode::Minimize(o) if s.domain().max(o) >= b => {
                    s.post_prop(UnaryBound::le(o, b - 1));
                }
                Mode::Maximize(o) if s.domain().min(o) <= b => {
                    s.post_prop(UnaryBound::ge(o, b + 1));
                }
                _ => {}
            }
        }
        let ok = s.propagate();
        stats.absorb(&s.take_stats());
        if !ok {
            continue;
        }
        match brancher.select(s.domain()) {
            None => {
                stats.solutions += 1;
                let a = s.domain().assignment().expect("all variables fixed");
                if let Mode::Minimize(o) | Mode::Maximize(o) = mode {
                    objective = Some(a[o.index()]);
                }
                if solutions.len() < limits.keep {
                    solutions.push(a);
                }
                if mode == Mode::First {
                    break;
                }
            }
            Some(x) => {
                let mut branches = brancher.branches(s.domain(), x);
                let last = branches.remove(0);
                for br in branches.into_iter().rev() {
                    let mut c = s.clone();
                    for e in br {
                        c.post(e);
                    }
                    stack.push(c);
                }
                // the first branch reuses the parent state
                for e in last {
                    s.post(e);
                }
                stack.push(s);
            }
        }
    }

    let outcome = if hit_limit {
        Outcome::Limit
    } else if stats.solutions == 0 {
        Outcome::Unsat
    } else if matches!(mode, Mode::Minimize(_) | Mode::Maximize(_)) {
        Outcome::Optimal
    } else {
        Outcome::Sat
    };
    SearchResult { outcome, solutions, objective, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{EngineConfig, Policy};
    use crate::prop::NeqOffset;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    #[test]
    fn branch_shapes() {
        let d = Domain::from_bounds(&[(2, 5), (0, 9)]);
        let b = Brancher::default();
        let br = b.branches(&d, v(0));
        assert_eq!(br.len(), 2);
        assert_eq!(br[0].len(), 2);
        let split = Brancher { val_select: ValSelect::SplitLeGe, ..Brancher::default() };
        let br = split.branches(&d, v(1));
        assert!(br[0][0].name().contains("<= 4"));
        assert!(br[1][0].name().contains(">= 5"));
    }

    #[test]
    fn fixed_root_is_a_solution_without_branching() {
        let s = Space::new(Domain::from_bounds(&[(1, 1), (2, 2)]), EngineConfig::default()).unwrap();
        let r = search(s, &Brancher::default(), Mode::First, Limits::default());
        assert_eq!(r.outcome, Outcome::Sat);
        assert_eq!(r.stats.nodes, 1);
    }

    #[test]
    fn copies_do_not_leak_into_parent() {
        let mut s = Space::new(Domain::from_bounds(&[(0, 3)]), EngineConfig::default()).unwrap();
        let mut c = s.clone();
        c.post_prop(UnaryBound::ge(v(0), 5));
        assert!(!c.propagate());
        assert!(s.propagate());
        assert_eq!(s.domain().bounds(v(0)), (0, 3));
    }

    #[test]
    fn all_solutions_of_a_small_permutation() {
        let cfg = EngineConfig::default().with_policy(Policy::Events);
        let mut s = Space::new(Domain::from_bounds(&[(0, 2); 3]), cfg).unwrap();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            s.post_prop(NeqOffset::new(v(a), v(b), 0));
        }
        let r = search(s, &Brancher::default(), Mode::All, Limits::default());
        assert_eq!(r.solutions.len(), 6);
        assert!(r.stats.failures > 0 || r.stats.nodes >= 6);
    }

    #[test]
    fn minimize() {
        let mut s = Space::new(Domain::from_bounds(&[(0, 5), (0, 5)]), EngineConfig::default()).unwrap();
        s.post_prop(crate::prop::LeqOffset::new(v(1), v(0), -3)); // x1 + 3 <= x0
        let r = search(s, &Brancher::default(), Mode::Minimize(v(0)), Limits::default());
        assert_eq!(r.outcome, Outcome::Optimal);
        assert_eq!(r.objective, Some(3));
    }
}
