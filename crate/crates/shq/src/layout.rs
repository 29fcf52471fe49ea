//! Tree layouts: how element ids map to node slots.
//!
//! Both layouts are leveled binary memory trees. An element's admissible
//! nodes form a single root-to-leaf path selected by its id bits, so
//! locating an element by id costs one node probe per level. The naive
//! layout gives every id its own leaf; the memory-optimized layout shrinks
//! the leaf level to a quarter of that by letting two ids share each
//! internal path and four ids share each leaf node.

use crate::error::ShqError;

/// Largest supported tree depth. A naive tree allocates `2^L - 1` node
/// slots, so this bound keeps allocations sane.
pub const MAX_LEVELS: u8 = 24;

/// Child slot indices one level below a node. At most two.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChildSlots(pub [Option<u64>; 2]);

impl ChildSlots {
    pub const NONE: ChildSlots = ChildSlots([None, None]);

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().filter_map(|c| *c)
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|c| c.is_some()).count()
    }
}

/// Slot geometry of a leveled tree plus the id-to-path mapping.
pub trait TreeLayout: Clone {
    /// Tree depth L. Levels are numbered 0 (root) through L-1 (leaves).
    fn levels(&self) -> u8;
    /// Maximum number of elements the queue can hold: `2^(L-1)`.
    fn capacity(&self) -> u64;
    /// Number of node slots on a level.
    fn level_width(&self, level: u8) -> u64;
    /// The unique node on `level` that `id` may occupy.
    fn path_index(&self, id: u32, level: u8) -> u64;
    /// Slots on `level + 1` that fill a vacancy at `(level, index)`.
    fn children(&self, level: u8, index: u64) -> ChildSlots;
    /// Short name used in reports.
    fn name(&self) -> &'static str;

    /// Total node slots over all levels.
    fn node_count(&self) -> u64 {
        (0..self.levels()).map(|l| self.level_width(l)).sum()
    }
}

/// One exclusive leaf per id: level `l` holds `2^l` slots and the node an
/// id may occupy on it is addressed by the top `l` bits of the id's
/// `(L-1)`-bit representation.
#[derive(Clone, Copy, Debug)]
pub struct NaiveLayout {
    levels: u8,
}

impl NaiveLayout {
    pub fn new(levels: u8) -> Result<Self, ShqError> {
        if !(1..=MAX_LEVELS).contains(&levels) {
            return Err(ShqError::InvalidLevels { levels, min: 1, max: MAX_LEVELS });
        }
        Ok(NaiveLayout { levels })
    }
}

impl TreeLayout for NaiveLayout {
    fn levels(&self) -> u8 {
        self.levels
    }

    fn capacity(&self) -> u64 {
        1 << (self.levels - 1)
    }

    fn level_width(&self, level: u8) -> u64 {
        debug_assert!(level < self.levels);
        1 << level
    }

    fn path_index(&self, id: u32, level: u8) -> u64 {
        debug_assert!((id as u64) < self.capacity());
        debug_assert!(level < self.levels);
        (id as u64) >> (self.levels - 1 - level)
    }

    fn children(&self, level: u8, index: u64) -> ChildSlots {
        if level + 1 >= self.levels {
            return ChildSlots::NONE;
        }
        ChildSlots([Some(2 * index), Some(2 * index + 1)])
    }

    fn name(&self) -> &'static str {
        "naive"
    }
}

/// Leaf level shrunk to 25% of the naive size: internal levels are
/// addressed exactly as in [`NaiveLayout`], so ids differing only in their
/// lowest bit share one full internal path, and the leaf level holds
/// `2^(L-3)` slots addressed by the top `L-3` id bits (four ids per leaf).
/// Each leaf slot therefore has two parent nodes on level `L-2`.
#[derive(Clone, Copy, Debug)]
pub struct MemOptLayout {
    levels: u8,
}

impl MemOptLayout {
    pub fn new(levels: u8) -> Result<Self, ShqError> {
        if !(3..=MAX_LEVELS).contains(&levels) {
            return Err(ShqError::InvalidLevels { levels, min: 3, max: MAX_LEVELS });
        }
        Ok(MemOptLayout { levels })
    }

    fn leaf_level(&self) -> u8 {
        self.levels - 1
    }
}

impl TreeLayout for MemOptLayout {
    fn levels(&self) -> u8 {
        self.levels
    }

    fn capacity(&self) -> u64 {
        1 << (self.levels - 1)
    }

    fn level_width(&self, level: u8) -> u64 {
        debug_assert!(level < self.levels);
        if level == self.leaf_level() {
            1 << (self.levels - 3)
        } else {
            1 << level
        }
    }

    fn path_index(&self, id: u32, level: u8) -> u64 {
        debug_assert!((id as u64) < self.capacity());
        debug_assert!(level < self.levels);
        if level == self.leaf_level() {
            (id as u64) >> 2
        } else {
            (id as u64) >> (self.levels - 1 - level)
        }
    }

    fn children(&self, level: u8, index: u64) -> ChildSlots {
        if level + 1 >= self.levels {
            return ChildSlots::NONE;
        }
        if level + 1 == self.leaf_level() {
            // The shared leaf: a single child slot serving both parents.
            ChildSlots([Some(index >> 1), None])
        } else {
            ChildSlots([Some(2 * index), Some(2 * index + 1)])
        }
    }

    fn name(&self) -> &'static str {
        "memopt"
    }
}
