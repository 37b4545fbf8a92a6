//! Small arithmetic constraints, bounds(R) style. Each propagator iterates
//! its own rules until nothing changes, so every result is a fixpoint.

use crate::domain::{Domain, Val, VarId, Wipeout};
use crate::event::{EventMask, EventSet};
use crate::prop::{all_fixed, ceil_div, clamp, floor_div, run, PropStatus, Propagator, Priority};

const MAX_ROUNDS: usize = 10_000;

/// Repeats `round` until it reports no change. Gives up with `Unknown`
/// after a safety bound on the number of rounds.
fn to_fixpoint(
    d: &mut Domain,
    vars: &[VarId],
    mut round: impl FnMut(&mut Domain) -> Result<bool, Wipeout>,
) -> Result<PropStatus, Wipeout> {
    for _ in 0..MAX_ROUNDS {
        if !round(d)? {
            return Ok(if all_fixed(d, vars) { PropStatus::Subsumed } else { PropStatus::AtFixpoint });
        }
    }
    Ok(PropStatus::Unknown)
}

/// `x` is even.
#[derive(Clone, Debug)]
pub struct Even {
    vars: [VarId; 1],
}

impl Even {
    pub fn new(x: VarId) -> Self {
        Even { vars: [x] }
    }
}

impl Propagator for Even {
    fn name(&self) -> String {
        format!("even({})", self.vars[0])
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars, EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::UNARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let x = self.vars[0];
        run(d, |d| {
            to_fixpoint(d, &self.vars, |d| {
                let (lo, hi) = d.bounds(x);
                let nlo = 2 * ceil_div(lo as i128, 2);
                let nhi = 2 * floor_div(hi as i128, 2);
                d.set_bounds(x, clamp(nlo), clamp(nhi))
            })
        })
    }
}

/// `y = |x|`.
#[derive(Clone, Debug)]
pub struct Abs {
    vars: [VarId; 2],
}

impl Abs {
    pub fn new(x: VarId, y: VarId) -> Self {
        Abs { vars: [x, y] }
    }
}

impl Propagator for Abs {
    fn name(&self) -> String {
        format!("{} = abs({})", self.vars[1], self.vars[0])
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars, EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::BINARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x, y] = self.vars;
        run(d, |d| {
            to_fixpoint(d, &self.vars, |d| {
                let mut ch = d.set_min(y, 0)?;
                let (xl, xh) = d.bounds(x);
                let (yl, yh) = if xl >= 0 {
                    (xl, xh)
                } else if xh <= 0 {
                    (-xh, -xl)
                } else {
                    (0, (-xl).max(xh))
                };
                ch |= d.set_bounds(y, yl, yh)?;
                let (yl, yh) = d.bounds(y);
                ch |= d.set_bounds(x, -yh, yh)?;
                if yl > 0 {
                    if d.min(x) > -yl {
                        ch |= d.set_min(x, yl)?;
                    }
                    if d.max(x) < yl {
                        ch |= d.set_max(x, -yl)?;
                    }
                }
                Ok(ch)
            })
        })
    }
}

/// A fraction `num/den` with `den > 0`.
#[derive(Clone, Copy)]
struct Frac(i128, i128);

impl Frac {
    fn new(num: i128, den: i128) -> Self {
        if den < 0 {
            Frac(-num, -den)
        } else {
            Frac(num, den)
        }
    }
    fn lt(self, o: Frac) -> bool {
        self.0 * o.1 < o.0 * self.1
    }
}

/// Hull of `{z / y | z ∈ [zl,zh], y ∈ [yl,yh]}` for `0 ∉ [yl,yh]`, rounded inwards.
fn quotient_hull(zl: i128, zh: i128, yl: i128, yh: i128) -> (i128, i128) {
    let cs = [Frac::new(zl, yl), Frac::new(zl, yh), Frac::new(zh, yl), Frac::new(zh, yh)];
    let mut lo = cs[0];
    let mut hi = cs[0];
    for &c in &cs[1..] {
        if c.lt(lo) {
            lo = c;
        }
        if hi.lt(c) {
            hi = c;
        }
    }
    (ceil_div(lo.0, lo.1), floor_div(hi.0, hi.1))
}

/// Bounds for `x` from `x·y = z`, or `None` when unconstrained.
fn divide(z: (Val, Val), y: (Val, Val)) -> Result<Option<(i128, i128)>, Wipeout> {
    let (zl, zh) = (z.0 as i128, z.1 as i128);
    let (yl, yh) = (y.0 as i128, y.1 as i128);
    let z_has_zero = zl <= 0 && 0 <= zh;
    if yl > 0 || yh < 0 {
        return Ok(Some(quotient_hull(zl, zh, yl, yh)));
    }
    if z_has_zero {
        return Ok(None);
    }
    // y ranges over its nonzero parts
    let mut acc: Option<(i128, i128)> = None;
    if yl <= -1 {
        acc = Some(quotient_hull(zl, zh, yl, -1));
    }
    if yh >= 1 {
        let (l, h) = quotient_hull(zl, zh, 1, yh);
        acc = Some(match acc {
            Some((a, b)) => (a.min(l), b.max(h)),
            None => (l, h),
        });
    }
    acc.map(Some).ok_or(Wipeout)
}

/// `x · y = z`.
#[derive(Clone, Debug)]
pub struct Mult {
    vars: [VarId; 3],
}

impl Mult {
    pub fn new(x: VarId, y: VarId, z: VarId) -> Self {
        Mult { vars: [x, y, z] }
    }
}

impl Propagator for Mult {
    fn name(&self) -> String {
        format!("{} * {} = {}", self.vars[0], self.vars[1], self.vars[2])
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars, EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::TERNARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x, y, z] = self.vars;
        run(d, |d| {
            to_fixpoint(d, &self.vars, |d| {
                let (xl, xh) = d.bounds(x);
                let (yl, yh) = d.bounds(y);
                let corners = [xl as i128 * yl as i128, xl as i128 * yh as i128, xh as i128 * yl as i128, xh as i128 * yh as i128];
                let zl = *corners.iter().min().unwrap();
                let zh = *corners.iter().max().unwrap();
                let mut ch = d.set_bounds(z, clamp(zl), clamp(zh))?;
                if d.min(z) > 0 || d.max(z) < 0 {
                    // a nonzero product has nonzero factors
                    for v in [x, y] {
                        if d.min(v) == 0 {
                            ch |= d.set_min(v, 1)?;
                        }
                        if d.max(v) == 0 {
                            ch |= d.set_max(v, -1)?;
                        }
                    }
                }
                if let Some((l, h)) = divide(d.bounds(z), d.bounds(y))? {
                    ch |= d.set_bounds(x, clamp(l), clamp(h))?;
                }
                if let Some((l, h)) = divide(d.bounds(z), d.bounds(x))? {
                    ch |= d.set_bounds(y, clamp(l), clamp(h))?;
                }
                Ok(ch)
            })
        })
    }
}

/// `x = y + z`.
#[derive(Clone, Debug)]
pub struct Plus {
    vars: [VarId; 3],
}

impl Plus {
    pub fn new(x: VarId, y: VarId, z: VarId) -> Self {
        Plus { vars: [x, y, z] }
    }
}

impl Propagator for Plus {
    fn name(&self) -> String {
        format!("{} = {} + {}", self.vars[0], self.vars[1], self.vars[2])
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        EventSet::uniform(self.vars, EventMask::BC)
    }
    fn priority(&self) -> Priority {
        Priority::TERNARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [x, y, z] = self.vars;
        run(d, |d| {
            to_fixpoint(d, &self.vars, |d| {
                let mut ch = d.set_bounds(x, d.min(y) + d.min(z), d.max(y) + d.max(z))?;
                ch |= d.set_bounds(y, d.min(x) - d.max(z), d.max(x) - d.min(z))?;
                ch |= d.set_bounds(z, d.min(x) - d.max(y), d.max(x) - d.min(y))?;
                Ok(ch)
            })
        })
    }
}

/// `g ≤ gv → x ≤ y + c`.
#[derive(Clone, Debug)]
pub struct GuardedLeq {
    vars: [VarId; 3],
    gv: Val,
    c: Val,
}

impl GuardedLeq {
    pub fn new(g: VarId, gv: Val, x: VarId, y: VarId, c: Val) -> Self {
        GuardedLeq { vars: [g, x, y], gv, c }
    }
}

impl Propagator for GuardedLeq {
    fn name(&self) -> String {
        let [g, x, y] = self.vars;
        format!("{g} <= {} -> {x} <= {y} + {}", self.gv, self.c)
    }
    fn vars(&self) -> &[VarId] {
        &self.vars
    }
    fn events(&self) -> EventSet {
        let [g, x, y] = self.vars;
        EventSet::from_pairs([(g, EventMask::UBC), (x, EventMask::LBC), (y, EventMask::UBC)])
    }
    fn priority(&self) -> Priority {
        Priority::TERNARY_HIGH
    }
    fn idempotent(&self) -> bool {
        true
    }
    fn propagate(&self, d: &mut Domain) -> PropStatus {
        let [g, x, y] = self.vars;
        let (gv, c) = (self.gv, self.c);
        run(d, |d| {
            loop {
                if d.min(g) > gv {
                    return Ok(PropStatus::Subsumed);
                }
                if d.max(g) <= gv {
                    let mut ch = d.set_max(x, d.max(y) + c)?;
                    ch |= d.set_min(y, d.min(x) - c)?;
                    if d.max(x) <= d.min(y) + c {
                        return Ok(PropStatus::Subsumed);
                    }
                    if !ch {
                        return Ok(PropStatus::AtFixpoint);
                    }
                } else if d.min(x) > d.max(y) + c {
                    d.set_min(g, gv + 1)?;
                } else {
                    return Ok(if d.max(x) <= d.min(y) + c { PropStatus::Subsumed } else { PropStatus::AtFixpoint });
                }
            }
        })
    }
}
