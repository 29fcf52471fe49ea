//! Reference priority queue used as differential-testing ground truth.
//!
//! A plainly-correct ordered set keyed by `(key, id)` plus an id index.
//! Pops are totally ordered, so every comparison against a structured heap
//! queue has a deterministic expected answer. Performance is irrelevant.

use std::collections::{BTreeSet, HashMap};

use crate::element::Element;
use crate::error::ShqError;
use crate::queue::EventQueue;

#[derive(Clone, Debug, Default)]
pub struct OracleQueue {
    ordered: BTreeSet<(u64, u32)>,
    by_id: HashMap<u32, u64>,
}

impl OracleQueue {
    pub fn new() -> Self {
        OracleQueue::default()
    }

    pub fn insert(&mut self, element: Element) -> Result<(), ShqError> {
        if self.by_id.contains_key(&element.id) {
            return Err(ShqError::DuplicateId { id: element.id });
        }
        self.by_id.insert(element.id, element.key);
        self.ordered.insert((element.key, element.id));
        Ok(())
    }

    pub fn delete(&mut self, id: u32) -> Result<Element, ShqError> {
        let key = self.by_id.remove(&id).ok_or(ShqError::NotFound { id })?;
        let removed = self.ordered.remove(&(key, id));
        debug_assert!(removed);
        Ok(Element::new(id, key))
    }

    pub fn delete_insert(&mut self, id: u32, new_key: u64) -> Result<(), ShqError> {
        self.delete(id)?;
        self.insert(Element::new(id, new_key))
    }

    pub fn read(&self, id: u32) -> Option<Element> {
        self.by_id.get(&id).map(|&key| Element::new(id, key))
    }

    pub fn read_top(&self) -> Option<Element> {
        self.ordered.iter().next().map(|&(key, id)| Element::new(id, key))
    }

    pub fn len(&self) -> u64 {
        self.ordered.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.ordered.is_empty()
    }

    /// Remaining contents in pop order.
    pub fn sorted_contents(&self) -> Vec<Element> {
        self.ordered.iter().map(|&(key, id)| Element::new(id, key)).collect()
    }
}

impl EventQueue for OracleQueue {
    fn insert(&mut self, element: Element) -> Result<(), ShqError> {
        OracleQueue::insert(self, element)
    }

    fn delete(&mut self, id: u32) -> Result<Element, ShqError> {
        OracleQueue::delete(self, id)
    }

    fn delete_insert(&mut self, id: u32, new_key: u64) -> Result<(), ShqError> {
        OracleQueue::delete_insert(self, id, new_key)
    }

    fn read_top(&self) -> Option<Element> {
        OracleQueue::read_top(self)
    }

    fn len(&self) -> u64 {
        OracleQueue::len(self)
    }

    fn capacity(&self) -> u64 {
        u64::MAX
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_of_three() {
        let mut q = OracleQueue::new();
        q.insert(Element::new(0, 5)).unwrap();
        q.insert(Element::new(1, 3)).unwrap();
        q.insert(Element::new(2, 7)).unwrap();
        assert_eq!(q.read_top(), Some(Element::new(1, 3)));
        q.delete(1).unwrap();
        assert_eq!(q.read_top(), Some(Element::new(0, 5)));
    }

    #[test]
    fn duplicate_and_missing() {
        let mut q = OracleQueue::new();
        q.insert(Element::new(4, 9)).unwrap();
        assert_eq!(q.insert(Element::new(4, 2)), Err(ShqError::DuplicateId { id: 4 }));
        assert_eq!(q.delete(5), Err(ShqError::NotFound { id: 5 }));
        assert_eq!(q.read(4), Some(Element::new(4, 9)));
        assert_eq!(q.read(5), None);
    }

    #[test]
    fn ties_pop_in_id_order() {
        let mut q = OracleQueue::new();
        q.insert(Element::new(3, 7)).unwrap();
        q.insert(Element::new(1, 7)).unwrap();
        q.insert(Element::new(2, 7)).unwrap();
        assert_eq!(q.read_top(), Some(Element::new(1, 7)));
    }
}
