use fdprop::engine::Policy;
use fdprop::prop::{BoolSum, SumRel, Term};
use fdprop::search::{search, Brancher, Limits, Mode};
use fdprop::{Domain, EngineConfig, Space, VarId};

fn at_most(n: usize, k: i64, policy: Policy) -> fdprop::SearchResult {
    let cfg = EngineConfig { audit: true, ..EngineConfig::default().with_policy(policy) };
    let mut s = Space::new(Domain::from_bounds(&vec![(0, 1); n]), cfg).unwrap();
    s.post_prop(BoolSum::new((0..n as u32).map(VarId).collect(), SumRel::Le, Term::Const(k)));
    search(s, &Brancher::default(), Mode::All, Limits::default())
}

#[test]
fn partial_watch_set_finds_every_solution() {
    // Σ_{i≤3} C(10, i)
    let want = 1 + 10 + 45 + 120;
    for p in [Policy::Events, Policy::Mevents, Policy::Devents] {
        let r = at_most(10, 3, p);
        assert_eq!(r.stats.solutions, want, "{p:?}");
        assert_eq!(r.stats.audit_violations, 0, "{p:?}");
    }
}

#[test]
fn partial_watch_set_saves_enqueues() {
    let st = at_most(10, 3, Policy::Events).stats.enqueues;
    let dy = at_most(10, 3, Policy::Devents).stats.enqueues;
    assert!(dy <= st, "{dy} > {st}");
}
