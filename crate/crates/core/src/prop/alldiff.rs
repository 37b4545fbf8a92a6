//! alldifferent: value elimination, bounds(Z) via Hall intervals, and
//! domain consistency via bipartite matching.

use std::collections::HashMap;

use crate::domain::{Domain, IntSet, Val, VarId, Wipeout};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, run, PropStatus, Propagator, Priority};

/// Removes fixed values from the other variables.
#[derive(Clone, Debug)]
pub struct AllDiffNaive {
    xs: Vec<VarId>,
}

impl AllDiffNaive {
    pub fn new(xs: Vec<VarId>) -> Self {
        AllDiffNaive { xs }
    }
}

impl Propagator for AllDiffNaive {
    fn name(&self) -> String {
        format!("alldiff_naive({})", self.xs.len())
    }
    fn vars(&self) -> &[VarId] {
        &self.xs
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.xs.iter().copied(), EventMask::FIX)
    }
    fn priority(&self) -> Priority {
        Priority::LINEAR_HIGH
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        run(d, |d| {
            let mut fixed: Vec<Val> = Vec::new();
            for &x in &self.xs {
                if let Some(v) = d.value(x) {
                    if fixed.contains(&v) {
                        return Err(Wipeout);
                    }
                    fixed.push(v);
                }
            }
            let e = IntSet::from_values(fixed);
            let mut newly_fixed = false;
            for &x in &self.xs {
                if !d.is_fixed(x) {
                    let rest = d.get(x).difference(&e);
                    d.restrict(x, &rest)?;
                    newly_fixed |= d.is_fixed(x);
                }
            }
            Ok(if newly_fixed {
                PropStatus::Unknown
            } else if all_fixed(d, &self.xs) {
                PropStatus::Subsumed
            } else {
                PropStatus::AtFixpoint
            })
        })
    }
}

/// bounds(Z) consistency: Hall-interval pruning on the range relaxation,
/// intersected with the actual domains.
#[derive(Clone, Debug)]
pub struct AllDiffBounds {
    xs: Vec<VarId>,
}

impl AllDiffBounds {
    pub fn new(xs: Vec<VarId>) -> Self {
        AllDiffBounds { xs }
    }
}

/// Narrows `iv` until no Hall interval is violated. `None` on failure.
fn hall_narrow(iv: &mut [(Val, Val)]) -> Option<()> {
    let n = iv.len();
    loop {
        let mut changed = false;
        let mut lows: Vec<Val> = iv.iter().map(|r| r.0).collect();
        lows.sort_unstable();
        lows.dedup();
        let mut by_max: Vec<usize> = (0..n).collect();
        by_max.sort_unstable_by_key(|&i| iv[i].1);
        'scan: for &a in &lows {
            let mut count = 0i64;
            for &i in &by_max {
                let (lo, hi) = iv[i];
                if lo < a {
                    continue;
                }
                count += 1;
                let b = hi;
                let cap = b - a + 1;
                if count > cap {
                    return None;
                }
                if count == cap {
                    // [a, b] is a Hall interval; everything not inside it avoids it
                    for j in 0..n {
                        let (l, h) = iv[j];
                        if l >= a && h <= b {
                            continue;
                        }
                        let mut nl = l;
                        let mut nh = h;
                        if nl >= a && nl <= b {
                            nl = b + 1;
                        }
                        if nh >= a && nh <= b {
                            nh = a - 1;
                        }
                        if nl > nh {
                            return None;
                        }
                        if (nl, nh) != (l, h) {
                            iv[j] = (nl, nh);
                            changed = true;
                        }
                    }
                    if changed {
                        break 'scan;
                    }
                }
            }
        }
        if !changed {
            return Some(());
        }
    }
}

impl Propagator for AllDiffBounds {
    fn name(&self) -> String {
        format!("alldiff_bounds({})", self.xs.len())
    }
    fn vars(&self) -> &[VarId] {
        &self.xs
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.xs.iter().copied(), EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::LINEAR_HIGH
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        run(d, |d| {
            let mut iv: Vec<(Val, Val)> = self.xs.iter().map(|&x| d.bounds(x)).collect();
            hall_narrow(&mut iv).ok_or(Wipeout)?;
            let mut hole = false;
            for (&x, &(lo, hi)) in self.xs.iter().zip(&iv) {
                d.set_bounds(x, lo, hi)?;
                hole |= d.bounds(x) != (lo, hi);
            }
            let mut sorted: Vec<(Val, Val)> = self.xs.iter().map(|&x| d.bounds(x)).collect();
            sorted.sort_unstable();
            let disjoint = sorted.windows(2).all(|w| w[0].1 < w[1].0);
            Ok(if hole {
                PropStatus::Unknown
            } else if disjoint {
                PropStatus::Subsumed
            } else {
                PropStatus::AtFixpoint
            })
        })
    }
}

/// Domain consistency via maximum matching and strongly connected components.
#[derive(Clone, Debug)]
pub struct AllDiffDomain {
    xs: Vec<VarId>,
}

impl AllDiffDomain {
    pub fn new(xs: Vec<VarId>) -> Self {
        AllDiffDomain { xs }
    }
}

struct Graph {
    // adjacency of variable i: value indices
    adj: Vec<Vec<usize>>,
    nvals: usize,
}

impl Graph {
    /// Kuhn's augmenting paths. Returns var→value matching if it covers all vars.
    fn max_matching(&self) -> Option<Vec<usize>> {
        let n = self.adj.len();
        let mut val_of: Vec<usize> = vec![usize::MAX; n];
        let mut var_of: Vec<usize> = vec![usize::MAX; self.nvals];
        // greedy start
        for i in 0..n {
            if let Some(&v) = self.adj[i].iter().find(|&&v| var_of[v] == usize::MAX) {
                val_of[i] = v;
                var_of[v] = i;
            }
        }
        let mut seen = vec![0u32; self.nvals];
        let mut stamp = 0u32;
        for i in 0..n {
            if val_of[i] != usize::MAX {
                continue;
            }
            stamp += 1;
            if !self.augment(i, &mut val_of, &mut var_of, &mut seen, stamp) {
                return None;
            }
        }
        Some(val_of)
    }

    fn augment(&self, start: usize, val_of: &mut [usize], var_of: &mut [usize], seen: &mut [u32], stamp: u32) -> bool {
        // iterative DFS over (var, next-edge index); parent value stack records the path
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut path_vals: Vec<usize> = Vec::new();
        while let Some(&mut (i, ref mut e)) = stack.last_mut() {
            if *e >= self.adj[i].len() {
                stack.pop();
                path_vals.pop();
                continue;
            }
            let v = self.adj[i][*e];
            *e += 1;
            if seen[v] == stamp {
                continue;
            }
            seen[v] = stamp;
            path_vals.push(v);
            let owner = var_of[v];
            if owner == usize::MAX {
                // flip the path
                for (k, &(vi, _)) in stack.iter().enumerate() {
                    let val = path_vals[k];
                    val_of[vi] = val;
                    var_of[val] = vi;
                }
                return true;
            }
            stack.push((owner, 0));
        }
        false
    }
}

/// Tarjan's SCC over a graph with `n` nodes, iterative.
fn scc(n: usize, succ: &[Vec<usize>]) -> Vec<usize> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut st: Vec<usize> = Vec::new();
    let mut next = 0usize;
    let mut ncomp = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        st.push(root);
        on[root] = true;
        while let Some(&mut (u, ref mut ei)) = work.last_mut() {
            if *ei < succ[u].len() {
                let w = succ[u][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    st.push(w);
                    on[w] = true;
                    work.push((w, 0));
                } else if on[w] {
                    low[u] = low[u].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(p, _)) = work.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    loop {
                        let w = st.pop().unwrap();
                        on[w] = false;
                        comp[w] = ncomp;
                        if w == u {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

impl Propagator for AllDiffDomain {
    fn name(&self) -> String {
        format!("alldiff_domain({})", self.xs.len())
    }
    fn vars(&self) -> &[VarId] {
        &self.xs
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.xs.iter().copied(), EventMask::DMC)
    }
    fn priority(&self) -> Priority {
        Priority::QUADRATIC_LOW
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        run(d, |d| {
            let n = self.xs.len();
            let mut vals: Vec<Val> = Vec::new();
            let mut val_idx: HashMap<Val, usize> = HashMap::new();
            let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
            for &x in &self.xs {
                let mut row = Vec::with_capacity(d.size(x) as usize);
                for v in d.get(x).iter() {
                    let k = *val_idx.entry(v).or_insert_with(|| {
                        vals.push(v);
                        vals.len() - 1
                    });
                    row.push(k);
                }
                adj.push(row);
            }
            let g = Graph { adj, nvals: vals.len() };
            let matching = g.max_matching().ok_or(Wipeout)?;
            let m = vals.len();
            let mut matched_val = vec![usize::MAX; m];
            for (i, &v) in matching.iter().enumerate() {
                matched_val[v] = i;
            }
            // nodes: vars 0..n, values n..n+m
            // matching edge var→value, other edges value→var
            let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n + m];
            for i in 0..n {
                for &v in &g.adj[i] {
                    if matching[i] == v {
                        succ[i].push(n + v);
                    } else {
                        succ[n + v].push(i);
                    }
                }
            }
            // nodes reachable from free values
            let mut reach = vec![false; n + m];
            let mut stack: Vec<usize> = (0..m).filter(|&v| matched_val[v] == usize::MAX).map(|v| n + v).collect();
            for &s in &stack {
                reach[s] = true;
            }
            while let Some(u) = stack.pop() {
                for &w in &succ[u] {
                    if !reach[w] {
                        reach[w] = true;
                        stack.push(w);
                    }
                }
            }
            let comp = scc(n + m, &succ);
            for (i, &x) in self.xs.iter().enumerate() {
                let mut remove: Vec<Val> = Vec::new();
                for &v in &g.adj[i] {
                    let keep = matching[i] == v || reach[n + v] || comp[i] == comp[n + v];
                    if !keep {
                        remove.push(vals[v]);
                    }
                }
                if !remove.is_empty() {
                    let rest = d.get(x).difference(&IntSet::from_values(remove));
                    d.restrict(x, &rest)?;
                }
            }
            Ok(if all_fixed(d, &self.xs) { PropStatus::Subsumed } else { PropStatus::AtFixpoint })
        })
    }
}
