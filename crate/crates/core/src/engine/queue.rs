//! The propagator queue: one sequence per priority level.

use std::collections::VecDeque;

use crate::engine::config::QueueOrder;
use crate::event::PropId;
use crate::prop::Priority;

/// Queue entries carry a ticket. The engine keeps the ticket of each
/// propagator's live entry and ignores any other entry it pops, which lets a
/// propagator move between levels without searching the old level.
#[derive(Clone, Debug)]
pub struct PropQueue {
    levels: Vec<VecDeque<(PropId, u32)>>,
    order: QueueOrder,
    inverse: bool,
    complete: bool,
    current: Option<usize>,
    len: usize,
}

impl PropQueue {
    pub fn new(order: QueueOrder, inverse: bool, complete: bool) -> Self {
        PropQueue {
            levels: vec![VecDeque::new(); Priority::LEVELS],
            order,
            inverse,
            complete,
            current: None,
            len: 0,
        }
    }

    /// Number of entries, stale ones included.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, level: usize, p: PropId, ticket: u32) {
        self.levels[level].push_back((p, ticket));
        self.len += 1;
    }

    fn take(&mut self, level: usize) -> Option<(usize, PropId, u32)> {
        let q = &mut self.levels[level];
        let e = if self.order.is_lifo(level) { q.pop_back() } else { q.pop_front() }?;
        self.len -= 1;
        self.current = Some(level);
        Some((level, e.0, e.1))
    }

    /// Removes the next entry: from the lowest nonempty level (highest with
    /// inverse priorities), or from the level being drained when fixpoints
    /// are completed level by level.
    pub fn pop(&mut self) -> Option<(usize, PropId, u32)> {
        if self.len == 0 {
            return None;
        }
        if self.complete {
            if let Some(l) = self.current {
                if !self.levels[l].is_empty() {
                    return self.take(l);
                }
            }
        }
        let n = self.levels.len();
        let level = if self.inverse {
            (0..n).rev().find(|&l| !self.levels[l].is_empty())
        } else {
            (0..n).find(|&l| !self.levels[l].is_empty())
        }?;
        self.take(level)
    }

    pub fn clear(&mut self) {
        for q in &mut self.levels {
            q.clear();
        }
        self.len = 0;
        self.current = None;
    }

    /// Entries in pop order within each level, lowest level first.
    pub fn entries(&self) -> impl Iterator<Item = (usize, PropId, u32)> + '_ {
        self.levels.iter().enumerate().flat_map(|(l, q)| q.iter().map(move |&(p, t)| (l, p, t)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(order: QueueOrder, inverse: bool) -> PropQueue {
        let mut q = PropQueue::new(order, inverse, false);
        q.push(1, PropId(0), 0); // a
        q.push(1, PropId(1), 0); // b
        q.push(4, PropId(2), 0); // c
        q
    }

    #[test]
    fn lowest_level_oldest_first() {
        assert_eq!(filled(QueueOrder::Fifo, false).pop().unwrap().1, PropId(0));
    }

    #[test]
    fn inverse_scans_from_the_top() {
        assert_eq!(filled(QueueOrder::Fifo, true).pop().unwrap().1, PropId(2));
    }

    #[test]
    fn lifo_level() {
        assert_eq!(filled(QueueOrder::Lifo, false).pop().unwrap().1, PropId(1));
        assert_eq!(filled(QueueOrder::Mixed(1 << 1), false).pop().unwrap().1, PropId(1));
        assert_eq!(filled(QueueOrder::Mixed(1 << 4), false).pop().unwrap().1, PropId(0));
    }

    #[test]
    fn complete_fixpoints_drain_the_current_level() {
        let mut q = PropQueue::new(QueueOrder::Fifo, false, true);
        q.push(4, PropId(0), 0);
        q.push(4, PropId(1), 0);
        assert_eq!(q.pop().unwrap().1, PropId(0));
        q.push(1, PropId(2), 0);
        assert_eq!(q.pop().unwrap().1, PropId(1));
        assert_eq!(q.pop().unwrap().1, PropId(2));
        assert!(q.pop().is_none());
    }
}
