//! Grid topology: maps (pre-synaptic neuron, synapse number) to the
//! post-synaptic neuron. Synapse 0 is the self connection used to reset
//! the firing neuron; synapses 1..=8 are the 8-neighborhood. Offsets that
//! leave the grid resolve to nothing and are skipped by the caller.

/// Synapses per neuron including the self-reset connection.
pub const SYNAPSE_COUNT: u8 = 9;

/// (dx, dy) per synapse number. Synapse 0 is the zero offset.
const OFFSETS: [(i32, i32); SYNAPSE_COUNT as usize] = [
    (0, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Order in which an event's synapses are processed: all neighbors first,
/// the pre-synaptic reset last.
pub const PROCESS_ORDER: [u8; SYNAPSE_COUNT as usize] = [1, 2, 3, 4, 5, 6, 7, 8, 0];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolved {
    Neuron { id: u32, is_reset: bool },
    OutOfGrid,
}

#[derive(Clone, Copy, Debug)]
pub struct GridTopology {
    width: u32,
    height: u32,
}

impl GridTopology {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0);
        GridTopology { width, height }
    }

    pub fn neuron_count(&self) -> u32 {
        self.width * self.height
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Post-synaptic neuron for `(pre_id, synapse)`. The reset flag is set
    /// exactly when the offset is zero, i.e. pre and post coincide.
    pub fn resolve(&self, pre_id: u32, synapse: u8) -> Resolved {
        debug_assert!(pre_id < self.neuron_count());
        debug_assert!(synapse < SYNAPSE_COUNT);
        let (dx, dy) = OFFSETS[synapse as usize];
        let x = (pre_id % self.width) as i32 + dx;
        let y = (pre_id / self.width) as i32 + dy;
        if x < 0 || y < 0 || x >= self.width as i32 || y >= self.height as i32 {
            return Resolved::OutOfGrid;
        }
        Resolved::Neuron {
            id: y as u32 * self.width + x as u32,
            is_reset: synapse == 0,
        }
    }

    /// Number of in-grid synapses of a neuron, reset included.
    pub fn degree(&self, pre_id: u32) -> u32 {
        (0..SYNAPSE_COUNT)
            .filter(|&s| matches!(self.resolve(pre_id, s), Resolved::Neuron { .. }))
            .count() as u32
    }
}
