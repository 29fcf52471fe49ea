//! Segment extraction: cluster neurons by their firing phase.
//!
//! After a run, synchronized neurons share (up to quantization) the same
//! remaining time until their next spike. Phases live on a circle of
//! `period_ticks`, so the gap across the wrap point counts too: sorted
//! phases are cut wherever consecutive values differ by more than
//! `eps_ticks`, and each resulting arc becomes one segment.

use crate::engine::NeuronRecord;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentMap {
    /// Per-neuron segment label, raster order.
    pub labels: Vec<u32>,
    pub segment_count: u32,
}

/// Cluster `records` by firing phase at time `now`. Labels are assigned in
/// raster order of each segment's first pixel, so the labeling is stable
/// under any internal reordering.
pub fn extract_segments(
    records: &[NeuronRecord],
    now: u64,
    period_ticks: u64,
    eps_ticks: u64,
) -> SegmentMap {
    assert!(!records.is_empty());
    let n = records.len();

    let mut order: Vec<(u64, usize)> = records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            debug_assert!(r.firing_time >= now);
            ((r.firing_time - now) % period_ticks, i)
        })
        .collect();
    order.sort_unstable();

    // Gap after each sorted position; the last one wraps around the circle.
    let cut_after: Vec<bool> = (0..n)
        .map(|i| {
            let here = order[i].0;
            let next = order[(i + 1) % n].0;
            let gap = if i + 1 == n { next + period_ticks - here } else { next - here };
            gap > eps_ticks
        })
        .collect();

    let mut cluster = vec![0u32; n];
    if cut_after.iter().any(|&c| c) {
        // Start labeling just past some cut so no cluster is split in two.
        let first_cut = cut_after.iter().position(|&c| c).unwrap();
        let mut current = 0u32;
        for step in 0..n {
            let pos = (first_cut + 1 + step) % n;
            cluster[order[pos].1] = current;
            if cut_after[pos] {
                current += 1;
            }
        }
    }
    // else: every neuron within eps of its neighbor around the whole
    // circle: a single segment, labels already zero.

    // Relabel by first appearance in raster order.
    let mut remap = vec![u32::MAX; n];
    let mut next = 0u32;
    let mut labels = vec![0u32; n];
    for i in 0..n {
        let c = cluster[i] as usize;
        if remap[c] == u32::MAX {
            remap[c] = next;
            next += 1;
        }
        labels[i] = remap[c];
    }
    SegmentMap { labels, segment_count: next }
}
