/// Outcome of an exhaustive axiom check.
///
/// Only the first [`Report::CAP`] violations are stored; `total` counts all of them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report<V> {
    pub violations: Vec<V>,
    pub total: usize,
}

impl<V> Default for Report<V> {
    fn default() -> Self {
        Report { violations: Vec::new(), total: 0 }
    }
}

impl<V> Report<V> {
    pub const CAP: usize = 1000;

    pub fn push(&mut self, v: V) {
        self.total += 1;
        if self.violations.len() < Self::CAP {
            self.violations.push(v);
        }
    }

    pub fn is_ok(&self) -> bool {
        self.total == 0
    }
}
