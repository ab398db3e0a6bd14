//! Time-ordered event queue. Ties on time are broken by insertion order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    AppSubmitted { app: usize },
    /// The task's input reached its device. `epoch` guards against stale
    /// arrivals after the task was moved.
    TaskStarted { task: usize, epoch: u32 },
    /// Scheduled for the device's current `version`; stale otherwise.
    TaskCompleted { task: usize, device: usize, version: u64 },
    UtilisationChanged { device: usize, native: f64, scripted: bool },
    DeadlineChanged { task: usize, factor: f64 },
    MigrationCompleted { task: usize, epoch: u32 },
    ReservationRotated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub seq: u64,
    pub kind: EventKind,
}

impl Eq for Event {}

impl Ord for Event {
    // reversed so the max-heap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: f64, kind: EventKind) {
        debug_assert!(time >= 0.0, "event scheduled at negative time {time}");
        self.heap.push(Event {
            time,
            seq: self.next_seq,
            kind,
        });
        self.next_seq += 1;
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_by_time_then_sequence() {
        let mut q = EventQueue::new();
        q.push(2.0, EventKind::ReservationRotated);
        q.push(1.0, EventKind::AppSubmitted { app: 0 });
        q.push(1.0, EventKind::AppSubmitted { app: 1 });
        q.push(0.5, EventKind::AppSubmitted { app: 2 });
        let order: Vec<_> = std::iter::from_fn(|| q.pop()).map(|e| (e.time, e.seq)).collect();
        assert_eq!(order, vec![(0.5, 3), (1.0, 1), (1.0, 2), (2.0, 0)]);
    }
}
