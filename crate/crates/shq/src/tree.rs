//! Functional (operation-at-a-time) structured heap queue.
//!
//! The queue is a leveled binary memory tree. Every node stores at most one
//! element and three properties hold after each operation:
//!
//! * heap: an occupant's key is never larger than the keys below it on any
//!   occupied path through it;
//! * path: an element only ever sits on the root-to-leaf path selected by
//!   its id bits;
//! * packing: an occupant's next node up its own path is always occupied,
//!   so the root holds the minimum whenever the queue is non-empty.
//!
//! Insert demotes larger elements down the demoted element's own path until
//! a free node is found. Delete locates the target along its path, then
//! repeatedly promotes the smaller child into the vacancy.

use std::fmt::Write as _;

use crate::element::Element;
use crate::error::ShqError;
use crate::layout::{MemOptLayout, NaiveLayout, TreeLayout};

/// A structured heap queue over some tree layout.
#[derive(Clone, Debug)]
pub struct Shq<Lay: TreeLayout> {
    layout: Lay,
    nodes: Vec<Vec<Option<Element>>>,
    count: u64,
}

/// Naive layout: one exclusive leaf per element id.
pub type NaiveShq = Shq<NaiveLayout>;
/// Memory-optimized layout: leaf level shrunk to 25% of the naive size.
pub type MemOptShq = Shq<MemOptLayout>;

impl NaiveShq {
    /// Empty naive queue with `levels` tree levels and capacity `2^(levels-1)`.
    pub fn with_levels(levels: u8) -> Result<Self, ShqError> {
        Ok(Shq::new(NaiveLayout::new(levels)?))
    }
}

impl MemOptShq {
    /// Empty memory-optimized queue; `levels` must be at least 3.
    pub fn with_levels(levels: u8) -> Result<Self, ShqError> {
        Ok(Shq::new(MemOptLayout::new(levels)?))
    }
}

impl<Lay: TreeLayout> Shq<Lay> {
    pub fn new(layout: Lay) -> Self {
        let nodes = (0..layout.levels())
            .map(|l| vec![None; layout.level_width(l) as usize])
            .collect();
        Shq { layout, nodes, count: 0 }
    }

    pub fn layout(&self) -> &Lay {
        &self.layout
    }

    pub fn levels(&self) -> u8 {
        self.layout.levels()
    }

    pub fn capacity(&self) -> u64 {
        self.layout.capacity()
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Total node slots in the tree.
    pub fn node_count(&self) -> u64 {
        self.layout.node_count()
    }

    /// The node on `level` that `id` may occupy, with range checks.
    pub fn path_index(&self, id: u32, level: u8) -> Result<u64, ShqError> {
        self.check_id(id)?;
        if level >= self.levels() {
            return Err(ShqError::LevelOutOfRange { level, levels: self.levels() });
        }
        Ok(self.layout.path_index(id, level))
    }

    fn check_id(&self, id: u32) -> Result<(), ShqError> {
        if (id as u64) < self.capacity() {
            Ok(())
        } else {
            Err(ShqError::IdOutOfRange { id, capacity: self.capacity() })
        }
    }

    pub(crate) fn node(&self, level: u8, index: u64) -> Option<Element> {
        self.nodes[level as usize][index as usize]
    }

    pub(crate) fn set_node(&mut self, level: u8, index: u64, value: Option<Element>) {
        self.nodes[level as usize][index as usize] = value;
    }

    pub(crate) fn set_count(&mut self, count: u64) {
        self.count = count;
    }

    /// Insert a new element. The traveling element is compared against each
    /// occupant down the tree; the larger of the two is demoted and chooses
    /// the next branch. On a key tie the incumbent stays.
    pub fn insert(&mut self, element: Element) -> Result<(), ShqError> {
        self.check_id(element.id)?;
        if self.read(element.id).is_some() {
            return Err(ShqError::DuplicateId { id: element.id });
        }
        if self.count == self.capacity() {
            return Err(ShqError::Full { capacity: self.capacity() });
        }

        let levels = self.levels();
        let mut traveling = element;
        for level in 0..levels {
            let index = self.layout.path_index(traveling.id, level);
            match self.node(level, index) {
                None => {
                    self.set_node(level, index, Some(traveling));
                    self.count += 1;
                    return Ok(());
                }
                Some(_) if level == levels - 1 => {
                    // Occupied leaf on the traveling element's path: cannot
                    // happen while stored ids are unique.
                    return Err(ShqError::StructuralOverflow { id: traveling.id, level });
                }
                Some(occupant) => {
                    if traveling.key < occupant.key {
                        self.set_node(level, index, Some(traveling));
                        traveling = occupant;
                    }
                }
            }
        }
        unreachable!("insert descent terminates at the leaf level");
    }

    /// Remove the element with `id` and return it. The vacancy is refilled
    /// bottom-up: at each hole the smaller eligible child is promoted (ties
    /// go to the lower-index child) until both children are empty.
    pub fn delete(&mut self, id: u32) -> Result<Element, ShqError> {
        self.check_id(id)?;
        let (mut level, mut index, removed) =
            self.locate(id).ok_or(ShqError::NotFound { id })?;

        loop {
            match self.promotion_candidate(level, index) {
                Some((child_index, child)) => {
                    self.set_node(level, index, Some(child));
                    level += 1;
                    index = child_index;
                }
                None => {
                    self.set_node(level, index, None);
                    break;
                }
            }
        }
        self.count -= 1;
        Ok(removed)
    }

    /// Scan the id's path from the root. An empty node ends the scan early:
    /// nothing can sit below a hole on its own path.
    fn locate(&self, id: u32) -> Option<(u8, u64, Element)> {
        for level in 0..self.levels() {
            let index = self.layout.path_index(id, level);
            match self.node(level, index) {
                None => return None,
                Some(occupant) if occupant.id == id => return Some((level, index, occupant)),
                Some(_) => {}
            }
        }
        None
    }

    /// The child that fills a vacancy at `(level, index)`: the smallest-key
    /// occupied child whose own path runs through the vacancy. For the
    /// shared leaf of the memory-optimized layout that last condition keeps
    /// elements on their paths; in the naive layout it always holds.
    pub(crate) fn promotion_candidate(&self, level: u8, index: u64) -> Option<(u64, Element)> {
        let mut best: Option<(u64, Element)> = None;
        for child_index in self.layout.children(level, index).iter() {
            if let Some(child) = self.node(level + 1, child_index) {
                if self.layout.path_index(child.id, level) != index {
                    continue;
                }
                match best {
                    Some((_, elem)) if elem.key <= child.key => {}
                    _ => best = Some((child_index, child)),
                }
            }
        }
        best
    }

    /// Find an element by id without modifying the queue. Costs at most one
    /// node probe per level. An out-of-range id holds nothing.
    pub fn read(&self, id: u32) -> Option<Element> {
        if (id as u64) >= self.capacity() {
            return None;
        }
        self.locate(id).map(|(_, _, elem)| elem)
    }

    /// The root occupant: the minimum-key element of a quiescent queue.
    pub fn read_top(&self) -> Option<Element> {
        self.node(0, 0)
    }

    /// Change the key of a stored element: delete then reinsert.
    pub fn delete_insert(&mut self, id: u32, new_key: u64) -> Result<(), ShqError> {
        self.delete(id)?;
        self.insert(Element::new(id, new_key))
    }

    /// Full-tree sweep of the structural invariants. Returns a description
    /// of the first violation found.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut occupied = 0u64;
        for level in 0..self.levels() {
            let width = self.layout.level_width(level);
            assert_eq!(self.nodes[level as usize].len() as u64, width);
            for index in 0..width {
                let elem = match self.node(level, index) {
                    Some(e) => e,
                    None => continue,
                };
                occupied += 1;
                if (elem.id as u64) >= self.capacity() {
                    return Err(format!("id {} out of range at L{level}[{index}]", elem.id));
                }
                if self.layout.path_index(elem.id, level) != index {
                    return Err(format!(
                        "path violation: {elem} at L{level}[{index}], expected index {}",
                        self.layout.path_index(elem.id, level)
                    ));
                }
                if level > 0 {
                    let up = self.layout.path_index(elem.id, level - 1);
                    match self.node(level - 1, up) {
                        None => {
                            return Err(format!(
                                "empty path parent above {elem} at L{level}[{index}]"
                            ));
                        }
                        Some(parent) if parent.key > elem.key => {
                            return Err(format!(
                                "heap violation: parent {parent} above {elem} at L{level}[{index}]"
                            ));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        if occupied != self.count {
            return Err(format!("count {} but {} occupied nodes", self.count, occupied));
        }
        if self.count > self.capacity() {
            return Err(format!("count {} above capacity {}", self.count, self.capacity()));
        }
        Ok(())
    }

    /// Text dump, one level per line. The bottom line of a memory-optimized
    /// tree annotates each shared leaf slot with its two parent node
    /// indices on the level above.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let levels = self.levels();
        for level in 0..levels {
            let _ = write!(out, "L{level}:");
            let shared_leaf =
                level == levels - 1 && self.layout.level_width(level) < (1u64 << level);
            for index in 0..self.layout.level_width(level) {
                match self.node(level, index) {
                    Some(e) => {
                        let _ = write!(out, " {e}");
                    }
                    None => out.push_str(" --"),
                }
                if shared_leaf {
                    let _ = write!(out, "{{p:{},{}}}", 2 * index, 2 * index + 1);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Raw node placement for tests that need a specific tree state.
    /// The caller is responsible for placing a valid configuration.
    #[doc(hidden)]
    pub fn place_for_test(&mut self, level: u8, index: u64, element: Element) {
        assert!(self.node(level, index).is_none(), "slot already occupied");
        self.set_node(level, index, Some(element));
        self.count += 1;
    }

    /// Snapshot of all node slots, level by level, for equality checks.
    pub fn snapshot(&self) -> Vec<Vec<Option<Element>>> {
        self.nodes.clone()
    }
}

impl<Lay: TreeLayout> PartialEq for Shq<Lay> {
    fn eq(&self, other: &Self) -> bool {
        self.count == other.count && self.nodes == other.nodes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(id: u32, key: u64) -> Element {
        Element::new(id, key)
    }

    #[test]
    fn new_queue_shapes() {
        let q = NaiveShq::with_levels(3).unwrap();
        assert_eq!(q.capacity(), 4);
        assert_eq!(q.node_count(), 7);
        assert_eq!(q.len(), 0);
        assert!(q.read_top().is_none());

        let q = NaiveShq::with_levels(1).unwrap();
        assert_eq!(q.capacity(), 1);
        assert_eq!(q.node_count(), 1);

        let q = NaiveShq::with_levels(4).unwrap();
        assert_eq!(q.capacity(), 8);
        assert_eq!(q.node_count(), 15);

        assert!(NaiveShq::with_levels(0).is_err());
    }

    #[test]
    fn insert_into_empty_lands_in_root() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(2, 9)).unwrap();
        assert_eq!(q.read_top(), Some(e(2, 9)));
        assert_eq!(q.len(), 1);
        q.check_invariants().unwrap();
    }

    /// Insert #7 with key 4: demoted past #3 and #5, then displaces #6,
    /// which drops to its leaf.
    #[test]
    fn insert_demotion_chain() {
        let mut q = NaiveShq::with_levels(4).unwrap();
        q.place_for_test(0, 0, e(3, 1));
        q.place_for_test(1, 1, e(5, 3));
        q.place_for_test(2, 3, e(6, 6));
        q.check_invariants().unwrap();

        q.insert(e(7, 4)).unwrap();

        assert_eq!(q.node(0, 0), Some(e(3, 1)));
        assert_eq!(q.node(1, 1), Some(e(5, 3)));
        assert_eq!(q.node(2, 3), Some(e(7, 4)));
        assert_eq!(q.node(3, 6), Some(e(6, 6)));
        assert_eq!(q.len(), 4);
        q.check_invariants().unwrap();
    }

    #[test]
    fn insert_three_and_check_positions() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(0, 5)).unwrap();
        q.insert(e(1, 3)).unwrap();
        q.insert(e(2, 7)).unwrap();

        assert_eq!(q.node(0, 0), Some(e(1, 3)));
        assert_eq!(q.node(1, 0), Some(e(0, 5)));
        assert_eq!(q.node(1, 1), Some(e(2, 7)));
        q.check_invariants().unwrap();
    }

    #[test]
    fn insert_rejects_duplicates_and_overflow() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(1, 5)).unwrap();
        assert_eq!(q.insert(e(1, 9)), Err(ShqError::DuplicateId { id: 1 }));
        assert_eq!(q.insert(e(9, 1)), Err(ShqError::IdOutOfRange { id: 9, capacity: 4 }));
        for id in [0u32, 2, 3] {
            q.insert(e(id, id as u64)).unwrap();
        }
        assert_eq!(q.len(), q.capacity());
        // At full capacity every in-range id is already stored, so the only
        // reachable insert failures are duplicates and out-of-range ids.
        assert_eq!(q.insert(e(0, 1)), Err(ShqError::DuplicateId { id: 0 }));
        assert_eq!(q.insert(e(4, 1)), Err(ShqError::IdOutOfRange { id: 4, capacity: 4 }));
    }

    /// Delete #3 from the root: #5 beats #2 and is promoted, then #6 beats
    /// #4 and refills the hole left by #5.
    #[test]
    fn delete_promotion_chain() {
        let mut q = NaiveShq::with_levels(4).unwrap();
        q.place_for_test(0, 0, e(3, 1));
        q.place_for_test(1, 0, e(2, 4));
        q.place_for_test(1, 1, e(5, 2));
        q.place_for_test(2, 2, e(4, 7));
        q.place_for_test(2, 3, e(6, 5));
        q.check_invariants().unwrap();

        assert_eq!(q.delete(3).unwrap(), e(3, 1));

        assert_eq!(q.node(0, 0), Some(e(5, 2)));
        assert_eq!(q.node(1, 0), Some(e(2, 4)));
        assert_eq!(q.node(1, 1), Some(e(6, 5)));
        assert_eq!(q.node(2, 2), Some(e(4, 7)));
        assert_eq!(q.node(2, 3), None);
        assert_eq!(q.len(), 4);
        q.check_invariants().unwrap();
    }

    #[test]
    fn delete_only_element_leaves_empty_root() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(2, 8)).unwrap();
        assert_eq!(q.delete(2).unwrap(), e(2, 8));
        assert!(q.is_empty());
        assert!(q.read_top().is_none());
        assert_eq!(q.delete(2), Err(ShqError::NotFound { id: 2 }));
    }

    #[test]
    fn delete_refills_root_with_smaller_child() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(0, 5)).unwrap();
        q.insert(e(1, 3)).unwrap();
        q.insert(e(2, 7)).unwrap();
        assert_eq!(q.delete(1).unwrap(), e(1, 3));
        assert_eq!(q.read_top(), Some(e(0, 5)));
        q.check_invariants().unwrap();
    }

    #[test]
    fn read_hits_and_misses() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(0, 5)).unwrap();
        q.insert(e(1, 3)).unwrap();
        q.insert(e(2, 7)).unwrap();
        assert_eq!(q.read(1), Some(e(1, 3)));
        assert_eq!(q.read(2), Some(e(2, 7)));
        assert_eq!(q.read(3), None);
        assert_eq!(q.read(100), None);
        assert_eq!(q.len(), 3);
    }

    #[test]
    fn read_top_tracks_minimum() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        assert!(q.read_top().is_none());
        q.insert(e(0, 5)).unwrap();
        q.insert(e(1, 3)).unwrap();
        q.insert(e(2, 7)).unwrap();
        assert_eq!(q.read_top().unwrap().key, 3);
        let top = q.read_top().unwrap();
        q.delete(top.id).unwrap();
        assert_eq!(q.read_top().unwrap().key, 5);
    }

    #[test]
    fn delete_insert_same_key_is_identity_on_singleton() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(1, 6)).unwrap();
        q.delete_insert(1, 6).unwrap();
        assert_eq!(q.read_top(), Some(e(1, 6)));
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn delete_insert_moves_top() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(0, 5)).unwrap();
        q.insert(e(1, 3)).unwrap();
        q.insert(e(2, 7)).unwrap();
        q.delete_insert(1, 9).unwrap();
        assert_eq!(q.read_top(), Some(e(0, 5)));
        assert_eq!(q.read(1), Some(e(1, 9)));
        assert_eq!(q.delete_insert(3, 2), Err(ShqError::NotFound { id: 3 }));
        q.check_invariants().unwrap();
    }

    #[test]
    fn tie_break_incumbent_stays_on_insert() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(2, 5)).unwrap();
        q.insert(e(1, 5)).unwrap();
        // Equal keys: #2 keeps the root, #1 is demoted along its own path.
        assert_eq!(q.node(0, 0), Some(e(2, 5)));
        assert_eq!(q.node(1, 0), Some(e(1, 5)));
    }

    #[test]
    fn tie_break_left_child_promoted_on_delete() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.place_for_test(0, 0, e(0, 1));
        q.place_for_test(1, 0, e(1, 4));
        q.place_for_test(1, 1, e(2, 4));
        q.delete(0).unwrap();
        assert_eq!(q.node(0, 0), Some(e(1, 4)));
        assert_eq!(q.node(1, 1), Some(e(2, 4)));
    }

    #[test]
    fn dump_format_naive() {
        let mut q = NaiveShq::with_levels(3).unwrap();
        q.insert(e(0, 5)).unwrap();
        q.insert(e(1, 3)).unwrap();
        q.insert(e(2, 7)).unwrap();
        assert_eq!(q.dump(), "L0: (1:3)\nL1: (0:5) (2:7)\nL2: -- -- -- --\n");
    }

    #[test]
    fn memopt_fill_all_ids() {
        let mut q = MemOptShq::with_levels(4).unwrap();
        for id in [5u32, 2, 7, 0, 3, 6, 1, 4] {
            q.insert(e(id, (id as u64 * 13) % 7)).unwrap();
        }
        assert_eq!(q.len(), 8);
        q.check_invariants().unwrap();
        let leaf_used = (0..q.layout().level_width(3))
            .filter(|&i| q.node(3, i).is_some())
            .count();
        assert!(leaf_used <= 2);
    }

    #[test]
    fn memopt_single_insert_lands_in_root() {
        let mut q = MemOptShq::with_levels(4).unwrap();
        q.insert(e(6, 11)).unwrap();
        assert_eq!(q.read_top(), Some(e(6, 11)));
    }

    #[test]
    fn memopt_leaf_occupant_stays_when_off_path_parent_is_vacated() {
        // Leaf slot 0 of an L=3 tree is shared by ids 0..4. Build a state
        // where the leaf holds an element whose own path runs through the
        // left middle node, then vacate the right middle node: the leaf
        // element must not be promoted off its path.
        let mut q = MemOptShq::with_levels(3).unwrap();
        q.place_for_test(0, 0, e(3, 1)); // path right
        q.place_for_test(1, 0, e(1, 2)); // path left
        q.place_for_test(1, 1, e(2, 3)); // path right
        q.place_for_test(2, 0, e(0, 5)); // path left, demoted past #1
        q.check_invariants().unwrap();

        assert_eq!(q.delete(2).unwrap(), e(2, 3));
        assert_eq!(q.node(1, 1), None, "off-path leaf element must not fill this hole");
        assert_eq!(q.node(2, 0), Some(e(0, 5)));
        q.check_invariants().unwrap();

        // Vacating the on-path parent does promote the leaf element.
        assert_eq!(q.delete(1).unwrap(), e(1, 2));
        assert_eq!(q.node(1, 0), Some(e(0, 5)));
        assert_eq!(q.node(2, 0), None);
        q.check_invariants().unwrap();
    }

    #[test]
    fn dump_format_memopt_annotates_leaf_parents() {
        let mut q = MemOptShq::with_levels(4).unwrap();
        q.place_for_test(0, 0, e(2, 1));
        q.place_for_test(1, 0, e(1, 2));
        q.place_for_test(2, 1, e(3, 9));
        q.check_invariants().unwrap();
        assert_eq!(
            q.dump(),
            "L0: (2:1)\nL1: (1:2) --\nL2: -- (3:9) -- --\nL3: --{p:0,1} --{p:2,3}\n"
        );
    }
}
