//! Declarative models: variables, constraints with a propagation strength,
//! and a search setup. A model turns into a [`Space`] for any engine
//! configuration.

use std::fmt;
use std::sync::Arc;

use crate::domain::{Domain, IntSet, Val, VarId};
use crate::engine::{Combination, EngineConfig, PropEntry, Space};
use crate::error::{Error, Result};
use crate::prop::{
    Abs, AllDiffBounds, AllDiffDomain, AllDiffNaive, BoolSum, Dfa, DomGeneric, EqOffset, Even, Exactly, GuardedLeq,
    Immediate, LeqOffset, LexLe, LinearEqBounds, LinearEqDomain, MinProp, Mult, NeqOffset, Plus, Predicate,
    Propagator, Priority, Regular, StagedKind, StagedPair, SumRel, Sweep, Term,
};
use crate::search::{search, Brancher, Limits, Mode, SearchResult};

/// Requested propagation strength for a constraint.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strength {
    Naive,
    Bounds,
    Domain,
}

#[derive(Clone)]
pub enum Constraint {
    /// `Σ coeffs·vars = rhs`
    Linear { coeffs: Vec<Val>, vars: Vec<VarId>, rhs: Val },
    /// `x ≤ y + c`
    Leq { x: VarId, y: VarId, c: Val },
    /// `x ≠ y + c`
    Neq { x: VarId, y: VarId, c: Val },
    /// `x = y + c`
    EqOffset { x: VarId, y: VarId, c: Val },
    AllDiff(Vec<VarId>),
    /// `y = |x|`
    Abs { x: VarId, y: VarId },
    /// `x = y·z`
    Mult { x: VarId, y: VarId, z: VarId },
    /// `x = y + z`
    Plus { x: VarId, y: VarId, z: VarId },
    /// `x0 = min(x1, x2)`
    Min { x0: VarId, x1: VarId, x2: VarId },
    Exactly { xs: Vec<VarId>, m: VarId, k: Val },
    BoolSum { xs: Vec<VarId>, rel: SumRel, k: Term },
    Regular { xs: Vec<VarId>, dfa: Arc<Dfa> },
    Lex { xs: Vec<VarId>, ys: Vec<VarId> },
    Even(VarId),
    /// `g ≤ gv → x ≤ y + c`
    GuardedLeq { g: VarId, gv: Val, x: VarId, y: VarId, c: Val },
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Linear { coeffs, vars, rhs } => write!(f, "linear({coeffs:?}, {vars:?}, {rhs})"),
            Constraint::Leq { x, y, c } => write!(f, "{x} <= {y} + {c}"),
            Constraint::Neq { x, y, c } => write!(f, "{x} != {y} + {c}"),
            Constraint::EqOffset { x, y, c } => write!(f, "{x} = {y} + {c}"),
            Constraint::AllDiff(xs) => write!(f, "alldiff({xs:?})"),
            Constraint::Abs { x, y } => write!(f, "{y} = |{x}|"),
            Constraint::Mult { x, y, z } => write!(f, "{x} = {y} * {z}"),
            Constraint::Plus { x, y, z } => write!(f, "{x} = {y} + {z}"),
            Constraint::Min { x0, x1, x2 } => write!(f, "{x0} = min({x1}, {x2})"),
            Constraint::Exactly { xs, m, k } => write!(f, "exactly({xs:?}, {m}, {k})"),
            Constraint::BoolSum { xs, rel, k } => write!(f, "bool_sum({xs:?}) {rel:?} {k:?}"),
            Constraint::Regular { xs, .. } => write!(f, "regular({xs:?})"),
            Constraint::Lex { xs, ys } => write!(f, "{xs:?} <=lex {ys:?}"),
            Constraint::Even(x) => write!(f, "even({x})"),
            Constraint::GuardedLeq { g, gv, x, y, c } => write!(f, "{g} <= {gv} -> {x} <= {y} + {c}"),
        }
    }
}

fn dedup_push(out: &mut Vec<VarId>, xs: &[VarId]) {
    for &x in xs {
        if !out.contains(&x) {
            out.push(x);
        }
    }
}

impl Constraint {
    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<VarId> {
        let mut out = Vec::new();
        match self {
            Constraint::Linear { vars, .. } => dedup_push(&mut out, vars),
            Constraint::Leq { x, y, .. } | Constraint::Neq { x, y, .. } | Constraint::EqOffset { x, y, .. } => {
                dedup_push(&mut out, &[*x, *y])
            }
            Constraint::Abs { x, y } => dedup_push(&mut out, &[*x, *y]),
            Constraint::AllDiff(xs) => dedup_push(&mut out, xs),
            Constraint::Mult { x, y, z } | Constraint::Plus { x, y, z } => dedup_push(&mut out, &[*x, *y, *z]),
            Constraint::Min { x0, x1, x2 } => dedup_push(&mut out, &[*x0, *x1, *x2]),
            Constraint::Exactly { xs, m, .. } => {
                dedup_push(&mut out, xs);
                dedup_push(&mut out, &[*m]);
            }
            Constraint::BoolSum { xs, k, .. } => {
                dedup_push(&mut out, xs);
                if let Term::Var(v) = k {
                    dedup_push(&mut out, &[*v]);
                }
            }
            Constraint::Regular { xs, .. } => dedup_push(&mut out, xs),
            Constraint::Lex { xs, ys } => {
                dedup_push(&mut out, xs);
                dedup_push(&mut out, ys);
            }
            Constraint::Even(x) => out.push(*x),
            Constraint::GuardedLeq { g, x, y, .. } => dedup_push(&mut out, &[*g, *x, *y]),
        }
        out
    }

    /// Whether a total assignment (indexed by variable) satisfies the
    /// constraint.
    pub fn holds(&self, a: &[Val]) -> bool {
        let v = |x: &VarId| a[x.index()] as i128;
        match self {
            Constraint::Linear { coeffs, vars, rhs } => {
                coeffs.iter().zip(vars).map(|(&c, x)| c as i128 * v(x)).sum::<i128>() == *rhs as i128
            }
            Constraint::Leq { x, y, c } => v(x) <= v(y) + *c as i128,
            Constraint::Neq { x, y, c } => v(x) != v(y) + *c as i128,
            Constraint::EqOffset { x, y, c } => v(x) == v(y) + *c as i128,
            Constraint::AllDiff(xs) => {
                let mut vals: Vec<i128> = xs.iter().map(v).collect();
                let n = vals.len();
                vals.sort_unstable();
                vals.dedup();
                // a repeated variable is equal to itself
                vals.len() == n
            }
            Constraint::Abs { x, y } => v(y) == v(x).abs(),
            Constraint::Mult { x, y, z } => v(x) == v(y) * v(z),
            Constraint::Plus { x, y, z } => v(x) == v(y) + v(z),
            Constraint::Min { x0, x1, x2 } => v(x0) == v(x1).min(v(x2)),
            Constraint::Exactly { xs, m, k } => xs.iter().filter(|x| v(x) == *k as i128).count() as i128 == v(m),
            Constraint::BoolSum { xs, rel, k } => {
                let s: i128 = xs.iter().map(v).sum();
                let k = match k {
                    Term::Const(c) => *c as i128,
                    Term::Var(y) => v(y),
                };
                match rel {
                    SumRel::Le => s <= k,
                    SumRel::Eq => s == k,
                }
            }
            Constraint::Regular { xs, dfa } => dfa.accepts(&xs.iter().map(|x| a[x.index()]).collect::<Vec<_>>()),
            Constraint::Lex { xs, ys } => {
                let l: Vec<Val> = xs.iter().map(|x| a[x.index()]).collect();
                let r: Vec<Val> = ys.iter().map(|x| a[x.index()]).collect();
                l <= r
            }
            Constraint::Even(x) => v(x) % 2 == 0,
            Constraint::GuardedLeq { g, gv, x, y, c } => v(g) > *gv as i128 || v(x) <= v(y) + *c as i128,
        }
    }

    /// The constraint as a predicate over its own variable list.
    pub fn predicate(&self) -> (Vec<VarId>, Predicate) {
        let vars = self.vars();
        let c = self.clone();
        let width = vars.iter().map(|x| x.index() + 1).max().unwrap_or(0);
        let idx = vars.clone();
        let pred: Predicate = Arc::new(move |t: &[Val]| {
            let mut a = vec![0; width];
            for (x, &val) in idx.iter().zip(t) {
                a[x.index()] = val;
            }
            c.holds(&a)
        });
        (vars, pred)
    }

    fn dom_generic(&self, priority: Priority) -> Arc<dyn Propagator> {
        let (vars, pred) = self.predicate();
        Arc::new(DomGeneric::new(format!("{self:?}"), vars, pred, priority))
    }

    /// Propagators implementing the constraint. Constraints with a weaker
    /// and a stronger algorithm are combined as configured when domain
    /// strength is requested.
    pub fn propagators(&self, strength: Strength, comb: Combination) -> Result<Vec<PropEntry>> {
        let one = |f: Arc<dyn Propagator>| Ok(vec![PropEntry::Single(f)]);
        let pair = |kind: StagedKind, weak: Arc<dyn Propagator>, strong: Arc<dyn Propagator>| {
            Ok(match comb {
                Combination::Single => vec![PropEntry::Single(strong)],
                Combination::Immediate => vec![PropEntry::single(Immediate::new(weak, strong))],
                Combination::Multiple => vec![PropEntry::Single(weak), PropEntry::Single(strong)],
                Combination::Staged => vec![PropEntry::Staged(Arc::new(StagedPair::new(kind, weak, strong)))],
            })
        };
        match self {
            Constraint::Linear { coeffs, vars, rhs } => {
                let bounds: Arc<dyn Propagator> =
                    Arc::new(LinearEqBounds::new(coeffs, vars, *rhs)?.with_sweep(Sweep::Simultaneous));
                if strength == Strength::Domain {
                    let unit = coeffs.iter().all(|c| c.abs() == 1);
                    let strong: Arc<dyn Propagator> = Arc::new(LinearEqDomain::new(coeffs, vars, *rhs)?);
                    pair(StagedKind::Linear { unit }, bounds, strong)
                } else {
                    one(bounds)
                }
            }
            Constraint::AllDiff(xs) => match strength {
                Strength::Naive => one(Arc::new(AllDiffNaive::new(xs.clone()))),
                Strength::Bounds => one(Arc::new(AllDiffBounds::new(xs.clone()))),
                Strength::Domain => {
                    pair(StagedKind::AllDiff, Arc::new(AllDiffNaive::new(xs.clone())), Arc::new(AllDiffDomain::new(xs.clone())))
                }
            },
            Constraint::Abs { x, y } => {
                let b: Arc<dyn Propagator> = Arc::new(Abs::new(*x, *y));
                if strength == Strength::Domain {
                    pair(StagedKind::Generic, b, self.dom_generic(Priority::BINARY_LOW))
                } else {
                    one(b)
                }
            }
            Constraint::Mult { x, y, z } => {
                let b: Arc<dyn Propagator> = Arc::new(Mult::new(*y, *z, *x));
                if strength == Strength::Domain {
                    pair(StagedKind::Generic, b, self.dom_generic(Priority::TERNARY_LOW))
                } else {
                    one(b)
                }
            }
            Constraint::Leq { x, y, c } => one(Arc::new(LeqOffset::new(*x, *y, *c))),
            Constraint::Neq { x, y, c } => one(Arc::new(NeqOffset::new(*x, *y, *c))),
            Constraint::EqOffset { x, y, c } => one(Arc::new(EqOffset::new(*x, *y, *c))),
            Constraint::Plus { x, y, z } => one(Arc::new(Plus::new(*x, *y, *z))),
            Constraint::Min { x0, x1, x2 } => one(Arc::new(MinProp::new(*x0, *x1, *x2))),
            Constraint::Exactly { xs, m, k } => one(Arc::new(Exactly::new(xs.clone(), *m, *k))),
            Constraint::BoolSum { xs, rel, k } => one(Arc::new(BoolSum::new(xs.clone(), *rel, *k))),
            Constraint::Regular { xs, dfa } => one(Arc::new(Regular::new(xs.clone(), dfa.clone())?)),
            Constraint::Lex { xs, ys } => {
                if xs.len() != ys.len() {
                    return Err(Error::InvalidConstraint("lex needs equal lengths".into()));
                }
                one(Arc::new(LexLe::new(xs.clone(), ys.clone())))
            }
            Constraint::Even(x) => one(Arc::new(Even::new(*x))),
            Constraint::GuardedLeq { g, gv, x, y, c } => one(Arc::new(GuardedLeq::new(*g, *gv, *x, *y, *c))),
        }
    }
}

/// A constraint model with its search setup.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub init: Domain,
    pub constraints: Vec<(Constraint, Strength)>,
    pub brancher: Brancher,
    pub mode: Mode,
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            init: Domain::default(),
            constraints: Vec::new(),
            brancher: Brancher::default(),
            mode: Mode::First,
        }
    }

    pub fn var(&mut self, lo: Val, hi: Val) -> VarId {
        self.init.push(IntSet::interval(lo, hi))
    }

    pub fn vars(&mut self, n: usize, lo: Val, hi: Val) -> Vec<VarId> {
        (0..n).map(|_| self.var(lo, hi)).collect()
    }

    pub fn var_in(&mut self, s: IntSet) -> VarId {
        self.init.push(s)
    }

    pub fn constant(&mut self, v: Val) -> VarId {
        self.var(v, v)
    }

    pub fn post(&mut self, c: Constraint, s: Strength) {
        self.constraints.push((c, s));
    }

    pub fn num_vars(&self) -> usize {
        self.init.num_vars()
    }

    /// True if the assignment satisfies every constraint and lies in the
    /// initial domain.
    pub fn check(&self, a: &[Val]) -> bool {
        a.len() == self.num_vars()
            && self.init.vars().all(|x| self.init.contains(x, a[x.index()]))
            && self.constraints.iter().all(|(c, _)| c.holds(a))
    }

    /// Fresh solver state with every propagator posted and queued.
    pub fn space(&self, cfg: EngineConfig) -> Result<Space> {
        let mut s = Space::new(self.init.clone(), cfg)?;
        for (c, strength) in &self.constraints {
            for e in c.propagators(*strength, cfg.combination)? {
                s.post(e);
            }
        }
        Ok(s)
    }

    pub fn solve(&self, cfg: EngineConfig, limits: Limits) -> Result<SearchResult> {
        Ok(search(self.space(cfg)?, &self.brancher, self.mode, limits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_and_predicate_agree() {
        let c = Constraint::Linear { coeffs: vec![3, -2], vars: vec![VarId(1), VarId(0)], rhs: 0 };
        assert!(c.holds(&[3, 2]));
        let (vars, pred) = c.predicate();
        assert_eq!(vars, vec![VarId(1), VarId(0)]);
        assert!(pred(&[2, 3]));
        assert!(!pred(&[3, 2]));
    }

    #[test]
    fn combinations_shape() {
        let c = Constraint::AllDiff(vec![VarId(0), VarId(1)]);
        assert_eq!(c.propagators(Strength::Domain, Combination::Multiple).unwrap().len(), 2);
        assert_eq!(c.propagators(Strength::Domain, Combination::Single).unwrap().len(), 1);
        assert!(matches!(c.propagators(Strength::Domain, Combination::Staged).unwrap()[0], PropEntry::Staged(_)));
        assert_eq!(c.propagators(Strength::Naive, Combination::Multiple).unwrap().len(), 1);
    }
}
