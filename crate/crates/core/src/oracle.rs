//! Brute-force reference answers for the benchmark models. None of these
//! use the propagation engine.

use crate::domain::Val;
use crate::model::Model;

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[Val])) {
    let mut a: Vec<Val> = (0..n as Val).collect();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Number of n-queens placements.
pub fn queens_count(n: usize) -> u64 {
    let mut count = 0;
    for_each_permutation(n, |p| {
        let ok = (0..n).all(|i| (i + 1..n).all(|j| (p[i] - p[j]).unsigned_abs() as usize != j - i));
        count += u64::from(ok);
    });
    count
}

/// All self-describing sequences of length `n`: `x_i` is the number of
/// occurrences of `i`.
pub fn magic_sequences(n: usize) -> Vec<Vec<Val>> {
    // every solution sums to n, so enumerate compositions of n into n parts
    fn rec(n: usize, i: usize, left: Val, cur: &mut Vec<Val>, out: &mut Vec<Vec<Val>>) {
        if i == n {
            if left == 0 && (0..n).all(|v| cur[v] == cur.iter().filter(|&&x| x == v as Val).count() as Val) {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(n, i + 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, n as Val, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Length of the shortest Golomb ruler with `n` marks.
pub fn golomb_optimum(n: usize) -> Val {
    if n <= 1 {
        return 0;
    }
    // rulers 0 < m_1 < ... < m_{n-1} = len, tried for increasing len
    fn rec(marks: &mut Vec<Val>, seen: &mut Vec<bool>, need: usize, len: Val) -> bool {
        if marks.len() == need {
            return true;
        }
        let last = *marks.last().unwrap();
        let remaining = need - marks.len();
        let candidates: Vec<Val> = if remaining == 1 { vec![len] } else { (last + 1..len).collect() };
        for m in candidates {
            let ds: Vec<usize> = marks.iter().map(|&a| (m - a) as usize).collect();
            let mut uniq = ds.clone();
            uniq.sort_unstable();
            uniq.dedup();
            if uniq.len() != ds.len() || ds.iter().any(|&d| seen[d]) {
                continue;
            }
            for &d in &ds {
                seen[d] = true;
            }
            marks.push(m);
            if rec(marks, seen, need, len) {
                return true;
            }
            marks.pop();
            for &d in &ds {
                seen[d] = false;
            }
        }
        false
    }
    let mut len = (n - 1) as Val;
    loop {
        let mut seen = vec![false; len as usize + 1];
        if rec(&mut vec![0], &mut seen, n, len) {
            return len;
        }
        len += 1;
    }
}

/// Digit assignments for DONALD+GERALD=ROBERT, in the letter order
/// `d o n a l g e r b t`.
pub fn donald_solutions() -> Vec<[Val; 10]> {
    let word = |a: &[Val], idx: &[usize]| idx.iter().fold(0, |acc, &i| acc * 10 + a[i]);
    let mut out = Vec::new();
    for_each_permutation(10, |p| {
        // d=0 o=1 n=2 a=3 l=4 g=5 e=6 r=7 b=8 t=9
        if p[0] == 0 || p[5] == 0 || p[7] == 0 {
            return;
        }
        let donald = word(p, &[0, 1, 2, 3, 4, 0]);
        let gerald = word(p, &[5, 6, 7, 3, 4, 0]);
        let robert = word(p, &[7, 1, 8, 6, 7, 9]);
        if donald + gerald == robert {
            out.push(p.try_into().unwrap());
        }
    });
    out
}

/// Prices in cents with sum 711 and product 711·10^6, nondecreasing.
pub fn grocery_solutions() -> Vec<[Val; 4]> {
    let mut out = Vec::new();
    for a in 1..=711 / 4 {
        for b in a..=(711 - a) / 3 {
            for c in b..=(711 - a - b) / 2 {
                let d = 711 - a - b - c;
                if a * b * c * d == 711_000_000 {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

/// Halves of `1..=2n` containing 1, with equal sums and sums of squares.
pub fn partition_solutions(n: usize) -> Vec<Vec<Val>> {
    let top = 2 * n as Val;
    let sum: Val = (1..=top).sum();
    let sq: Val = (1..=top).map(|v| v * v).sum();
    let mut out = Vec::new();
    let mut cur = vec![1];
    fn rec(cur: &mut Vec<Val>, next: Val, top: Val, n: usize, sum: Val, sq: Val, out: &mut Vec<Vec<Val>>) {
        if cur.len() == n {
            if 2 * cur.iter().sum::<Val>() == sum && 2 * cur.iter().map(|v| v * v).sum::<Val>() == sq {
                out.push(cur.clone());
            }
            return;
        }
        for v in next..=top {
            cur.push(v);
            rec(cur, v + 1, top, n, sum, sq, out);
            cur.pop();
        }
    }
    rec(&mut cur, 2, top, n, sum, sq, &mut out);
    out
}

/// Number of all-interval series of length `n` (no symmetry breaking).
pub fn all_interval_count(n: usize) -> u64 {
    let mut count = 0;
    for_each_permutation(n, |p| {
        let mut seen = vec![false; n];
        let ok = p.windows(2).all(|w| {
            let d = (w[1] - w[0]).unsigned_abs() as usize;
            !std::mem::replace(&mut seen[d], true)
        });
        count += u64::from(ok);
    });
    count
}

/// Every assignment of the model's initial domain that satisfies all its
/// constraints, or `None` if there are more than `cap` assignments.
pub fn enumerate(model: &Model, cap: u64) -> Option<Vec<Vec<Val>>> {
    let d = &model.init;
    let mut total: u64 = 1;
    for x in d.vars() {
        total = total.checked_mul(d.size(x))?;
        if total > cap {
            return None;
        }
    }
    let values: Vec<Vec<Val>> = d.vars().map(|x| d.get(x).iter().collect()).collect();
    let mut idx = vec![0usize; values.len()];
    let mut out = Vec::new();
    loop {
        let a: Vec<Val> = idx.iter().zip(&values).map(|(&i, vs)| vs[i]).collect();
        if model.check(&a) {
            out.push(a);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Some(out);
            }
            idx[k] += 1;
            if idx[k] < values[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_are_complete() {
        let mut n = 0;
        for_each_permutation(4, |_| n += 1);
        assert_eq!(n, 24);
    }

    #[test]
    fn small_answers() {
        assert_eq!(queens_count(6), 4);
        assert_eq!(magic_sequences(4).len(), 2);
        assert_eq!(golomb_optimum(4), 6);
        assert_eq!(golomb_optimum(5), 11);
        assert_eq!(all_interval_count(4), 4);
    }
}
