use serde::{Deserialize, Serialize};

/// A real interval with explicit endpoint inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
    pub left_closed: bool,
    pub right_closed: bool,
}

impl Interval {
    pub fn new(left: f64, right: f64, left_closed: bool, right_closed: bool) -> Self {
        Interval {
            left,
            right,
            left_closed,
            right_closed,
        }
    }

    pub fn closed(left: f64, right: f64) -> Self {
        Self::new(left, right, true, true)
    }

    pub fn open(left: f64, right: f64) -> Self {
        Self::new(left, right, false, false)
    }

    pub fn point(x: f64) -> Self {
        Self::closed(x, x)
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo = if self.left_closed {
            x >= self.left
        } else {
            x > self.left
        };
        let hi = if self.right_closed {
            x <= self.right
        } else {
            x < self.right
        };
        lo && hi
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn is_singleton(&self) -> bool {
        self.left == self.right && self.left_closed && self.right_closed
    }

    pub fn is_empty(&self) -> bool {
        self.left > self.right
            || (self.left == self.right && !(self.left_closed && self.right_closed))
    }

    /// Union of `self` with an interval that starts where `self` ends.
    pub fn join(&self, next: &Interval) -> Interval {
        debug_assert!(self.right == next.left);
        Interval::new(self.left, next.right, self.left_closed, next.right_closed)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.left_closed { '[' } else { '(' },
            self.left,
            self.right,
            if self.right_closed { ']' } else { ')' }
        )
    }
}
