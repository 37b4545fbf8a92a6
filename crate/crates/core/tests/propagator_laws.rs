//! Contracting, monotone and solution-preserving behaviour of the library
//! propagators on random small domains.

use std::sync::Arc;

use fdprop::prop::{
    AllDiffBounds, AllDiffDomain, AllDiffNaive, BoolSum, Dfa, Exactly, LexLe, LinearEqBounds, LinearEqDomain,
    MinProp, Mult, Plus, Regular, SumRel, Term,
};
use fdprop::{Domain, IntSet, PropStatus, Propagator, Val, VarId};
use proptest::prelude::*;

fn v(i: u32) -> VarId {
    VarId(i)
}

type Case = (Box<dyn Propagator>, Box<dyn Fn(&[Val]) -> bool>);

fn library() -> Vec<Case> {
    let dfa = Arc::new(Dfa::new(3, 0, &[0], &[(0, 0, 0), (0, 1, 1), (1, 1, 2), (2, 0, 0), (1, 0, 0), (2, 1, 2)]));
    let d2 = dfa.clone();
    vec![
        (Box::new(AllDiffNaive::new((0..4).map(v).collect())), Box::new(|a: &[Val]| distinct(a))),
        (Box::new(AllDiffBounds::new((0..4).map(v).collect())), Box::new(|a: &[Val]| distinct(a))),
        (Box::new(AllDiffDomain::new((0..4).map(v).collect())), Box::new(|a: &[Val]| distinct(a))),
        (Box::new(LinearEqBounds::new(&[2, -1, 3], &[v(0), v(1), v(2)], 4).unwrap()), Box::new(|a: &[Val]| 2 * a[0] - a[1] + 3 * a[2] == 4)),
        (Box::new(LinearEqDomain::new(&[1, 1, -1], &[v(0), v(1), v(3)], 1).unwrap()), Box::new(|a: &[Val]| a[0] + a[1] - a[3] == 1)),
        (Box::new(MinProp::new(v(0), v(1), v(2))), Box::new(|a: &[Val]| a[0] == a[1].min(a[2]))),
        (Box::new(Exactly::new(vec![v(0), v(1), v(2)], v(3), 2)), Box::new(|a: &[Val]| a[..3].iter().filter(|&&x| x == 2).count() as Val == a[3])),
        (Box::new(LexLe::new(vec![v(0), v(1)], vec![v(2), v(3)])), Box::new(|a: &[Val]| a[..2] <= a[2..])),
        (Box::new(Plus::new(v(0), v(1), v(2))), Box::new(|a: &[Val]| a[0] == a[1] + a[2])),
        (Box::new(Mult::new(v(0), v(1), v(2))), Box::new(|a: &[Val]| a[0] * a[1] == a[2])),
        (Box::new(BoolSum::new(vec![v(0), v(1), v(2)], SumRel::Eq, Term::Var(v(3)))), Box::new(|a: &[Val]| a[..3].iter().sum::<Val>() == a[3])),
        (Box::new(Regular::new((0..4).map(v).collect(), dfa).unwrap()), Box::new(move |a: &[Val]| d2.accepts(a))),
    ]
}

/// Bool sums are only defined on 0/1 arguments.
fn prepare(p: &dyn Propagator, d: &Domain) -> Domain {
    let mut d = d.clone();
    if p.name().starts_with("bool_sum") {
        for x in (0..3).map(v) {
            d.restrict(x, &IntSet::interval(0, 1)).ok();
        }
    }
    d
}

fn distinct(a: &[Val]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] != a[j]))
}

fn below(a: &Domain, b: &Domain) -> bool {
    a.is_failed() || (!b.is_failed() && a.is_stronger(b))
}

fn assignments(d: &Domain) -> Vec<Vec<Val>> {
    let mut out = vec![Vec::new()];
    for x in d.vars() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<Val>| {
                d.get(x).iter().map(move |val| {
                    let mut q = p.clone();
                    q.push(val);
                    q
                })
            })
            .collect();
    }
    out
}

fn domain() -> impl Strategy<Value = Domain> {
    proptest::collection::vec(proptest::collection::btree_set(0..5 as Val, 1..=5), 4)
        .prop_map(|sets| Domain::new(sets.into_iter().map(IntSet::from_values).collect()))
}

/// A domain and a stronger one obtained by dropping values.
fn pair() -> impl Strategy<Value = (Domain, Domain)> {
    (domain(), proptest::collection::vec(any::<u8>(), 4)).prop_map(|(d, masks)| {
        let sets = d
            .vars()
            .zip(masks)
            .map(|(x, m)| {
                let vals: Vec<Val> = d.get(x).iter().collect();
                let kept: Vec<Val> = vals.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, &v)| v).collect();
                IntSet::from_values(if kept.is_empty() { vec![vals[0]] } else { kept })
            })
            .collect();
        (d, Domain::new(sets))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn contracting_and_solution_preserving(d in domain()) {
        for (p, holds) in library() {
            let d = prepare(p.as_ref(), &d);
            if d.is_failed() {
                continue;
            }
            let mut out = d.clone();
            let st = p.propagate(&mut out);
            prop_assert!(below(&out, &d), "{} grew the domain", p.name());
            prop_assert_eq!(st == PropStatus::Failed, out.is_failed());
            for a in assignments(&d).iter().filter(|a| holds(a)) {
                prop_assert!(!out.is_failed(), "{} failed with solution {:?}", p.name(), a);
                prop_assert!(out.vars().all(|x| out.contains(x, a[x.index()])), "{} lost {:?}", p.name(), a);
            }
        }
    }

    #[test]
    fn monotone((weak, strong) in pair()) {
        for (p, _) in library() {
            let mut fw = prepare(p.as_ref(), &weak);
            let mut fs = prepare(p.as_ref(), &strong);
            p.propagate(&mut fw);
            p.propagate(&mut fs);
            prop_assert!(below(&fs, &fw), "{}: f({:?}) = {:?} vs f({:?}) = {:?}", p.name(), strong, fs, weak, fw);
        }
    }

    #[test]
    fn reported_fixpoints_are_fixpoints(d in domain()) {
        for (p, _) in library() {
            let mut once = prepare(p.as_ref(), &d);
            let st = p.propagate(&mut once);
            if matches!(st, PropStatus::AtFixpoint | PropStatus::Subsumed) {
                let mut twice = once.clone();
                p.propagate(&mut twice);
                prop_assert_eq!(&twice, &once, "{} claimed a fixpoint", p.name());
            }
        }
    }
}
