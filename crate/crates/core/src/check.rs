//! Self-check suite: solver results against brute force, plus the
//! loop-head audit and cross-configuration agreement on the registry.

use std::collections::BTreeSet;

use crate::bench::{build_model, MODELS};
use crate::domain::Val;
use crate::engine::{EngineConfig, Policy, QueueOrder};
use crate::error::Result;
use crate::oracle;
use crate::search::{Limits, SearchResult};

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name: name.into(), passed, detail }
}

fn solve(name: &str, n: u32) -> Result<SearchResult> {
    build_model(name, n)?.solve(EngineConfig::default(), Limits::default())
}

fn prefix(solutions: &[Vec<Val>], k: usize) -> BTreeSet<Vec<Val>> {
    solutions.iter().map(|s| s[..k].to_vec()).collect()
}

/// Runs every check. Errors only on a model that fails to build.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    let r = solve("queens", 8)?;
    let want = oracle::queens_count(8);
    out.push(outcome("queens-8 solution count", r.stats.solutions == want, format!("{} vs {want}", r.stats.solutions)));

    let r = solve("magic-sequence", 10)?;
    let want: BTreeSet<Vec<Val>> = oracle::magic_sequences(10).into_iter().collect();
    let got = prefix(&r.solutions, 10);
    out.push(outcome("magic-sequence-10 solutions", got == want, format!("{got:?}")));

    let r = solve("golomb", 7)?;
    let want = oracle::golomb_optimum(7);
    out.push(outcome("golomb-7 optimum", r.objective == Some(want), format!("{:?} vs {want}", r.objective)));

    let want: BTreeSet<Vec<Val>> = oracle::donald_solutions().iter().map(|s| s.to_vec()).collect();
    for name in ["donald-b", "donald-d", "donald-v"] {
        let r = solve(name, 10)?;
        let got = prefix(&r.solutions, 10);
        out.push(outcome(&format!("{name} solutions"), got == want, format!("{got:?}")));
    }

    let r = solve("grocery", 4)?;
    let want = oracle::grocery_solutions();
    let ok = r.best().is_some_and(|s| want.iter().any(|w| w[..] == s[..4]));
    out.push(outcome("grocery solution", ok, format!("{:?}", r.best().map(|s| &s[..4]))));

    let r = solve("partition", 8)?;
    let want = oracle::partition_solutions(8);
    let ok = r.best().is_some_and(|s| want.iter().any(|w| w[..] == s[..8]));
    out.push(outcome("partition-8 solution", ok, format!("{:?}", r.best().map(|s| &s[..8]))));

    for n in 4..=6 {
        let m = build_model("queens", n)?;
        let r = m.solve(EngineConfig::default(), Limits::default())?;
        let want = oracle::enumerate(&m, 1_000_000).unwrap_or_default();
        let got: BTreeSet<Vec<Val>> = r.solutions.iter().cloned().collect();
        let ok = got == want.into_iter().collect();
        out.push(outcome(&format!("queens-{n} matches enumeration"), ok, format!("{} solutions", got.len())));
    }

    let mut violations = 0;
    let mut unsound = 0;
    let mut disagreements = Vec::new();
    for info in MODELS {
        let m = build_model(info.name, info.default)?;
        let mut seen: Option<(u64, u64)> = None;
        for queue in [QueueOrder::Fifo, QueueOrder::Lifo] {
            for p in Policy::ALL {
                let cfg = EngineConfig { queue, audit: true, ..EngineConfig::default().with_policy(p) };
                let r = m.solve(cfg, Limits::default())?;
                violations += r.stats.audit_violations;
                unsound += r.solutions.iter().filter(|s| !m.check(s)).count();
                let key = (r.stats.failures, r.stats.solutions);
                match seen {
                    None => seen = Some(key),
                    Some(k) if k != key => disagreements.push(format!("{} {}", info.name, cfg.label())),
                    _ => {}
                }
            }
        }
    }
    out.push(outcome("loop-head audit", violations == 0, format!("{violations} violations")));
    out.push(outcome("solutions satisfy the model", unsound == 0, format!("{unsound} bad solutions")));
    out.push(outcome("configurations agree", disagreements.is_empty(), disagreements.join("; ")));

    Ok(out)
}
