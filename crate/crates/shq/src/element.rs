use std::fmt;

/// A queue entry: a unique identifier and the value it is sorted by.
///
/// In the event-queue use case the `id` is a neuron number and the `key`
/// is the neuron's predicted firing time in ticks.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Element {
    pub id: u32,
    pub key: u64,
}

impl Element {
    pub fn new(id: u32, key: u64) -> Self {
        Element { id, key }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}:{})", self.id, self.key)
    }
}
