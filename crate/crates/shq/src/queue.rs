//! The event-queue contract shared by all queue implementations.

use crate::element::Element;
use crate::error::ShqError;
use crate::layout::TreeLayout;
use crate::tree::Shq;

/// Operations an event-driven simulation needs from its queue: insert new
/// events, retarget existing ones, drop them, and read the next one.
/// Implemented by both tree layouts and by [`crate::oracle::OracleQueue`],
/// so they are interchangeable for differential testing.
pub trait EventQueue {
    fn insert(&mut self, element: Element) -> Result<(), ShqError>;
    fn delete(&mut self, id: u32) -> Result<Element, ShqError>;
    fn delete_insert(&mut self, id: u32, new_key: u64) -> Result<(), ShqError>;
    fn read_top(&self) -> Option<Element>;
    fn len(&self) -> u64;
    fn capacity(&self) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<Lay: TreeLayout> EventQueue for Shq<Lay> {
    fn insert(&mut self, element: Element) -> Result<(), ShqError> {
        Shq::insert(self, element)
    }

    fn delete(&mut self, id: u32) -> Result<Element, ShqError> {
        Shq::delete(self, id)
    }

    fn delete_insert(&mut self, id: u32, new_key: u64) -> Result<(), ShqError> {
        Shq::delete_insert(self, id, new_key)
    }

    fn read_top(&self) -> Option<Element> {
        Shq::read_top(self)
    }

    fn len(&self) -> u64 {
        Shq::len(self)
    }

    fn capacity(&self) -> u64 {
        Shq::capacity(self)
    }
}
