//! Linear equations `Σ a_i x_i = k`.

use std::sync::Arc;

use crate::domain::{Domain, Val, VarId};
use crate::error::{Error, Result};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, ceil_div, clamp, floor_div, run, DomGeneric, PropStatus, Propagator, Priority};

/// Order in which a bounds sweep updates the terms.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Sweep {
    /// Every new bound is computed from the bounds on entry.
    #[default]
    Simultaneous,
    /// Terms are updated in listed order, each seeing the earlier updates.
    Sequential,
}

/// Merges repeated variables and drops zero coefficients.
fn normalize(coeffs: &[Val], vars: &[VarId]) -> Result<(Vec<Val>, Vec<VarId>)> {
    if coeffs.len() != vars.len() {
        return Err(Error::InvalidConstraint(format!("{} coefficients for {} variables", coeffs.len(), vars.len())));
    }
    let mut a: Vec<Val> = Vec::new();
    let mut xs: Vec<VarId> = Vec::new();
    for (&c, &x) in coeffs.iter().zip(vars) {
        match xs.iter().position(|&y| y == x) {
            Some(i) => a[i] += c,
            None => {
                a.push(c);
                xs.push(x);
            }
        }
    }
    let (a, xs): (Vec<Val>, Vec<VarId>) = a.into_iter().zip(xs).filter(|(c, _)| *c != 0).unzip();
    Ok((a, xs))
}

/// bounds(R) propagator for a linear equation.
///
/// Reports `AtFixpoint` when every bound it moved was computed without
/// rounding and did not land in a hole; under those conditions the result is
/// the projection of the real relaxation, hence a fixpoint.
#[derive(Clone, Debug)]
pub struct LinearEqBounds {
    a: Vec<Val>,
    xs: Vec<VarId>,
    k: Val,
    sweep: Sweep,
}

impl LinearEqBounds {
    pub fn new(coeffs: &[Val], vars: &[VarId], k: Val) -> Result<Self> {
        let (a, xs) = normalize(coeffs, vars)?;
        Ok(LinearEqBounds { a, xs, k, sweep: Sweep::Simultaneous })
    }

    pub fn with_sweep(mut self, sweep: Sweep) -> Self {
        self.sweep = sweep;
        self
    }

    pub fn coeffs(&self) -> &[Val] {
        &self.a
    }

    pub fn rhs(&self) -> Val {
        self.k
    }

    fn term_bounds(a: Val, lo: Val, hi: Val) -> (i128, i128) {
        let (p, q) = (a as i128 * lo as i128, a as i128 * hi as i128);
        (p.min(q), p.max(q))
    }

    fn sweep(&self, d: &mut Domain) -> std::result::Result<PropStatus, crate::domain::Wipeout> {
        let n = self.xs.len();
        if n == 0 {
            return if self.k == 0 { Ok(PropStatus::Subsumed) } else { Err(crate::domain::Wipeout) };
        }
        let mut terms: Vec<(i128, i128)> = Vec::with_capacity(n);
        for (&a, &x) in self.a.iter().zip(&self.xs) {
            let (lo, hi) = d.bounds(x);
            terms.push(Self::term_bounds(a, lo, hi));
        }
        let mut sum_lo: i128 = terms.iter().map(|t| t.0).sum();
        let mut sum_hi: i128 = terms.iter().map(|t| t.1).sum();
        let k = self.k as i128;
        let mut exact = true;
        let snapshot = terms.clone();
        let (snap_lo, snap_hi) = (sum_lo, sum_hi);
        for i in 0..n {
            let (a, x) = (self.a[i] as i128, self.xs[i]);
            let (tlo, thi) = match self.sweep {
                Sweep::Simultaneous => snapshot[i],
                Sweep::Sequential => terms[i],
            };
            let (slo, shi) = match self.sweep {
                Sweep::Simultaneous => (snap_lo, snap_hi),
                Sweep::Sequential => (sum_lo, sum_hi),
            };
            // a·x ∈ [k − (others' max), k − (others' min)]
            let rlo = k - (shi - thi);
            let rhi = k - (slo - tlo);
            let (num_lo, num_hi) = if a > 0 { (rlo, rhi) } else { (rhi, rlo) };
            let new_lo = ceil_div(num_lo, a);
            let new_hi = floor_div(num_hi, a);
            let (old_lo, old_hi) = d.bounds(x);
            if new_lo > old_lo as i128 {
                d.set_min(x, clamp(new_lo))?;
                if num_lo % a != 0 || d.min(x) as i128 != new_lo {
                    exact = false;
                }
            }
            if new_hi < old_hi as i128 {
                d.set_max(x, clamp(new_hi))?;
                if num_hi % a != 0 || d.max(x) as i128 != new_hi {
                    exact = false;
                }
            }
            if self.sweep == Sweep::Sequential {
                let (lo, hi) = d.bounds(x);
                let t = Self::term_bounds(self.a[i], lo, hi);
                sum_lo += t.0 - terms[i].0;
                sum_hi += t.1 - terms[i].1;
                terms[i] = t;
            }
        }
        Ok(if all_fixed(d, &self.xs) {
            // a single simultaneous pass can fix everything without meeting k
            let total: i128 = self.a.iter().zip(&self.xs).map(|(&a, &x)| a as i128 * d.min(x) as i128).sum();
            if total != k {
                return Err(crate::domain::Wipeout);
            }
            PropStatus::Subsumed
        } else if exact {
            PropStatus::AtFixpoint
        } else {
            PropStatus::Unknown
        })
    }
}

impl Propagator for LinearEqBounds {
    fn name(&self) -> String {
        let terms: Vec<String> = self.a.iter().zip(&self.xs).map(|(a, x)| format!("{a}*{x}")).collect();
        format!("linear_bounds({} = {})", terms.join(" + "), self.k)
    }
    fn vars(&self) -> &[VarId] {
        &self.xs
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.xs.iter().copied(), EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::for_arity(self.xs.len())
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        run(d, |d| self.sweep(d))
    }
}

/// Domain propagator for a linear equation, by enumeration.
#[derive(Clone, Debug)]
pub struct LinearEqDomain {
    inner: DomGeneric,
}

impl LinearEqDomain {
    pub fn new(coeffs: &[Val], vars: &[VarId], k: Val) -> Result<Self> {
        let (a, xs) = normalize(coeffs, vars)?;
        let a2 = a.clone();
        let pred = Arc::new(move |t: &[Val]| t.iter().zip(&a2).map(|(&v, &c)| v as i128 * c as i128).sum::<i128>() == k as i128);
        Ok(LinearEqDomain { inner: DomGeneric::new(format!("linear {a:?}·{xs:?} = {k}"), xs, pred, Priority::VERYSLOW_LOW) })
    }
}

impl Propagator for LinearEqDomain {
    fn name(&self) -> String {
        format!("linear_domain({})", self.inner.name())
    }
    fn vars(&self) -> &[VarId] {
        self.inner.vars()
    }
    fn events(&self) -> EventSet {
        self.inner.events()
    }
    fn priority(&self) -> Priority {
        Priority::VERYSLOW_LOW
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        self.inner.propagate(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::IntSet;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    // 3x1 = 2x2 written as 3x1 - 2x2 = 0
    fn f_f() -> LinearEqBounds {
        LinearEqBounds::new(&[3, -2], &[v(0), v(1)], 0).unwrap()
    }

    #[test]
    fn non_idempotent_sequence() {
        let mut d = Domain::from_bounds(&[(0, 3), (0, 5)]);
        assert_eq!(f_f().propagate(&mut d), PropStatus::Unknown);
        assert_eq!(d, Domain::from_bounds(&[(0, 3), (0, 4)]));
        f_f().propagate(&mut d);
        assert_eq!(d, Domain::from_bounds(&[(0, 2), (0, 4)]));
        assert_eq!(f_f().propagate(&mut d), PropStatus::AtFixpoint);
        assert_eq!(d, Domain::from_bounds(&[(0, 2), (0, 3)]));
    }

    #[test]
    fn hole_landing_is_not_a_fixpoint() {
        // x + y = 10, y in [0,3], x in {0..6, 9, 10}: x's new min 7 lands in a hole
        let mut d = Domain::new(vec![IntSet::from_ranges([(0, 6), (9, 10)]), IntSet::interval(0, 3)]);
        let p = LinearEqBounds::new(&[1, 1], &[v(0), v(1)], 10).unwrap();
        assert_eq!(p.propagate(&mut d), PropStatus::Unknown);
        assert_eq!(d.bounds(v(0)), (9, 10));
    }

    #[test]
    fn sequential_sweep_uses_fresh_bounds() {
        // x1 = 2x2 with derived x2 listed first: 2x2 - x1 = 0
        let p = LinearEqBounds::new(&[2, -1], &[v(1), v(0)], 0).unwrap().with_sweep(Sweep::Sequential);
        let mut d = Domain::from_bounds(&[(0, 17), (0, 9)]);
        p.propagate(&mut d);
        assert_eq!(d, Domain::from_bounds(&[(0, 16), (0, 8)]));
    }

    #[test]
    fn fixing_everything_checks_the_sum() {
        // 2a - b = 10 with a ∈ [3,8], b ∈ {5,7}: one pass fixes a=8, b=5
        let mut d = Domain::from_bounds(&[(3, 8), (5, 7)]);
        d.remove(v(1), 6).unwrap();
        let f = LinearEqBounds::new(&[2, -1], &[v(0), v(1)], 10).unwrap();
        assert_eq!(f.propagate(&mut d), PropStatus::Failed);
    }

    #[test]
    fn duplicates_are_merged() {
        let p = LinearEqBounds::new(&[1, 1, -1], &[v(0), v(1), v(0)], 4).unwrap();
        assert_eq!(p.vars(), &[v(1)]);
        let mut d = Domain::from_bounds(&[(0, 9), (0, 9)]);
        assert_eq!(p.propagate(&mut d), PropStatus::Subsumed);
        assert_eq!(d.value(v(1)), Some(4));
    }

    #[test]
    fn domain_variant_detects_no_support() {
        // sums of {0,4} and {1,3} are 1,3,5,7
        let p = LinearEqDomain::new(&[1, 1], &[v(0), v(1)], 4).unwrap();
        let mut d = Domain::new(vec![IntSet::from_values([0, 4]), IntSet::from_values([1, 3])]);
        assert_eq!(p.propagate(&mut d), PropStatus::Failed);
    }

    #[test]
    fn domain_variant() {
        let p = LinearEqDomain::new(&[1, 1], &[v(0), v(1)], 4).unwrap();
        let mut d = Domain::new(vec![IntSet::from_values([0, 1, 3, 4]), IntSet::from_values([1, 3])]);
        p.propagate(&mut d);
        assert_eq!(d.get(v(0)), &IntSet::from_values([1, 3]));
        assert_eq!(d.get(v(1)), &IntSet::from_values([1, 3]));
    }
}
