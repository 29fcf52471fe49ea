//! Cycle-model benchmarking: the structured heap queue against an
//! unsorted-list baseline whose find-min scans every slot through a
//! k-wide comparator front-end. The queue's cycles per operation come out
//! of the pipeline simulator; the scan cycles follow the comparator model.
//! Rows are produced by actually running the workloads, never typed in.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::Element;
use crate::error::ShqError;
use crate::pipeline::{OpKind, PipelineSim, QueueOp};
use crate::tree::NaiveShq;

/// Unsorted array of elements indexed by id. Insert, delete and update are
/// direct writes; finding the minimum scans everything.
#[derive(Clone, Debug)]
pub struct ScanQueue {
    slots: Vec<Option<Element>>,
    comparator_width: u64,
}

impl ScanQueue {
    pub fn new(capacity: u64, comparator_width: u64) -> Self {
        assert!(comparator_width >= 1);
        ScanQueue { slots: vec![None; capacity as usize], comparator_width }
    }

    pub fn capacity(&self) -> u64 {
        self.slots.len() as u64
    }

    pub fn insert(&mut self, element: Element) -> Result<(), ShqError> {
        let slot = &mut self.slots[element.id as usize];
        if slot.is_some() {
            return Err(ShqError::DuplicateId { id: element.id });
        }
        *slot = Some(element);
        Ok(())
    }

    pub fn delete(&mut self, id: u32) -> Result<Element, ShqError> {
        self.slots[id as usize].take().ok_or(ShqError::NotFound { id })
    }

    pub fn update(&mut self, id: u32, new_key: u64) -> Result<(), ShqError> {
        match &mut self.slots[id as usize] {
            Some(e) => {
                e.key = new_key;
                Ok(())
            }
            None => Err(ShqError::NotFound { id }),
        }
    }

    /// Scan for the minimum (ties broken by id, matching the oracle) and
    /// the modeled cycle count: `ceil(N/k)` front-end passes plus
    /// `ceil(log2(k))` comparator-tree stages, with N the queue capacity.
    pub fn find_min(&self) -> Result<(Element, u64), ShqError> {
        let min = self
            .slots
            .iter()
            .flatten()
            .min_by_key(|e| (e.key, e.id))
            .copied()
            .ok_or(ShqError::NotFound { id: 0 })?;
        Ok((min, self.find_min_cycles()))
    }

    pub fn find_min_cycles(&self) -> u64 {
        let n = self.capacity();
        let k = self.comparator_width;
        n.div_ceil(k) + (64 - (k - 1).leading_zeros() as u64)
    }
}

/// Structures a sweep can exercise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    /// Pipelined structured heap queue; levels derived from the size.
    Shq,
    /// Unsorted scan baseline with the given comparator width.
    Scan { width: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Workload {
    DeleteInsert,
    Insert,
    FindMin,
    ReadTop,
}

impl Workload {
    fn label(self) -> &'static str {
        match self {
            Workload::DeleteInsert => "delete-insert",
            Workload::Insert => "insert",
            Workload::FindMin => "find-min",
            Workload::ReadTop => "read-top",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub structure: String,
    pub size: u64,
    pub levels: Option<u8>,
    pub workload: Workload,
    pub op: &'static str,
    pub cycles_per_op: u64,
    pub checksum: u64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("structure,n,levels,workload,op,cycles_per_op,checksum\n");
        for row in &self.rows {
            let levels = row.levels.map(|l| l.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.structure,
                row.size,
                levels,
                row.workload.label(),
                row.op,
                row.cycles_per_op,
                row.checksum
            );
        }
        out
    }
}

/// Smallest level count whose capacity holds `size` elements.
pub fn levels_for_capacity(size: u64) -> u8 {
    let mut levels = 1u8;
    while (1u64 << (levels - 1)) < size {
        levels += 1;
    }
    levels
}

/// Run `ops_per_cell` operations of `workload` for every structure at every
/// size and report steady-state cycles per operation. Sizes must be sorted
/// ascending. Deterministic per seed.
pub fn sweep(
    structures: &[Structure],
    sizes: &[u64],
    workload: Workload,
    ops_per_cell: usize,
    seed: u64,
) -> BenchReport {
    assert!(sizes.windows(2).all(|w| w[0] <= w[1]), "sizes must be sorted ascending");
    let mut report = BenchReport::default();
    for &structure in structures {
        for &size in sizes {
            let row = match structure {
                Structure::Shq => shq_cell(size, workload, ops_per_cell, seed),
                Structure::Scan { width } => scan_cell(size, width, workload, ops_per_cell, seed),
            };
            report.rows.push(row);
        }
    }
    report
}

fn shq_cell(size: u64, workload: Workload, ops: usize, seed: u64) -> BenchRow {
    let levels = levels_for_capacity(size);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let populate = size.min(256) as u32;
    let mut tree = NaiveShq::with_levels(levels).expect("bench levels in range");
    for id in 0..populate {
        tree.insert(Element::new(id, rng.gen_range(0..1 << 13))).unwrap();
    }
    let mut checksum = 0u64;
    let mut sim = PipelineSim::new(tree);

    let (kind, op_name) = match workload {
        Workload::DeleteInsert => (OpKind::DeleteInsert, "delete_insert"),
        Workload::Insert => (OpKind::Insert, "insert"),
        Workload::FindMin | Workload::ReadTop => {
            // Served by the dedicated top port: one cycle, no pipeline
            // occupancy. Fold the observed minima into the checksum.
            for i in 0..ops {
                let top = sim.read_top_port().expect("populated queue");
                checksum = checksum
                    .wrapping_mul(31)
                    .wrapping_add(top.key)
                    .wrapping_add(i as u64);
            }
            return BenchRow {
                structure: "shq".into(),
                size,
                levels: Some(levels),
                workload,
                op: "read_top",
                cycles_per_op: 1,
                checksum,
            };
        }
    };

    match workload {
        Workload::DeleteInsert => {
            for _ in 0..ops {
                let id = rng.gen_range(0..populate);
                sim.submit(QueueOp::DeleteInsert { id, new_key: rng.gen_range(0..1 << 13) })
                    .unwrap();
            }
        }
        Workload::Insert => {
            // Fill in batches of fresh ids, draining functionally between
            // batches so every insert is back-to-back with the previous one.
            let capacity = 1u64 << (levels - 1);
            let free: Vec<u32> = (populate..capacity as u32).collect();
            let batch = free.len().max(1);
            let mut cursor = 0usize;
            for _ in 0..ops {
                if cursor == batch {
                    sim.run_until_drained();
                    let mut tree = std::mem::replace(
                        &mut sim,
                        PipelineSim::new(NaiveShq::with_levels(levels).unwrap()),
                    )
                    .into_tree();
                    for &id in &free {
                        tree.delete(id).unwrap();
                    }
                    let stats_prefix = sim.drain_stats();
                    drop(stats_prefix);
                    sim = PipelineSim::new(tree);
                    cursor = 0;
                }
                let id = free[cursor];
                cursor += 1;
                sim.submit(QueueOp::Insert(Element::new(id, rng.gen_range(0..1 << 13)))).unwrap();
            }
        }
        _ => unreachable!(),
    }
    sim.run_until_drained();
    let stats = sim.drain_stats();
    let interval = stats
        .steady_interval(kind)
        .expect("homogeneous workload must settle to one interval");
    if let Some(top) = sim.read_top_port() {
        checksum = checksum.wrapping_mul(31).wrapping_add(top.key);
    }
    checksum = checksum.wrapping_add(sim.tree().len());
    BenchRow {
        structure: "shq".into(),
        size,
        levels: Some(levels),
        workload,
        op: op_name,
        cycles_per_op: interval,
        checksum,
    }
}

fn scan_cell(size: u64, width: u64, workload: Workload, ops: usize, seed: u64) -> BenchRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = ScanQueue::new(size, width);
    let populate = size.min(256) as u32;
    for id in 0..populate {
        q.insert(Element::new(id, rng.gen_range(0..1 << 13))).unwrap();
    }
    let mut checksum = 0u64;
    let (op_name, cycles) = match workload {
        Workload::FindMin | Workload::ReadTop => {
            let mut cycles = 0;
            for _ in 0..ops.max(1) {
                let (min, c) = q.find_min().unwrap();
                cycles = c;
                checksum = checksum.wrapping_mul(31).wrapping_add(min.key);
                // Rotate the minimum so successive scans see fresh contents.
                q.update(min.id, min.key + (1 << 13)).unwrap();
            }
            ("find_min", cycles)
        }
        Workload::DeleteInsert => {
            for _ in 0..ops {
                let id = rng.gen_range(0..populate);
                let old = q.delete(id).unwrap();
                q.insert(Element::new(id, old.key.rotate_left(7) ^ 0x55)).unwrap();
                checksum = checksum.wrapping_mul(31).wrapping_add(old.key);
            }
            // One read-modify-write against an addressed slot.
            ("delete_insert", 1)
        }
        Workload::Insert => {
            for i in 0..ops {
                let id = populate + (i as u32 % (size as u32 - populate).max(1));
                let _ = q.delete(id);
                q.insert(Element::new(id, rng.gen_range(0..1 << 13))).unwrap();
                checksum = checksum.wrapping_add(id as u64);
            }
            ("insert", 1)
        }
    };
    BenchRow {
        structure: format!("scan-k{width}"),
        size,
        levels: None,
        workload,
        op: op_name,
        cycles_per_op: cycles,
        checksum,
    }
}
