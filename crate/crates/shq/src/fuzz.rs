//! Differential fuzzing of the structured heap queues against the oracle.
//!
//! A campaign generates a random but always-valid operation sequence
//! (unique ids, capacity respected), applies it to a queue variant and to
//! [`OracleQueue`] in lockstep, cross-checks reads and the top element as
//! it goes, sweeps the structural invariants, and finally drains both and
//! compares the drain orders. Everything is deterministic per seed.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::element::Element;
use crate::layout::TreeLayout;
use crate::oracle::OracleQueue;
use crate::tree::{MemOptShq, NaiveShq, Shq};

/// Which tree layout a campaign exercises.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Naive,
    Memopt,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Naive => write!(f, "naive"),
            Variant::Memopt => write!(f, "memopt"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FuzzConfig {
    pub seed: u64,
    pub op_count: usize,
    pub levels: u8,
    pub variant: Variant,
}

/// Outcome of one campaign.
#[derive(Clone, Debug)]
pub struct FuzzReport {
    pub config_line: String,
    pub ops_applied: usize,
    pub invariant_sweeps: usize,
    pub divergence: Option<String>,
}

impl FuzzReport {
    pub fn is_success(&self) -> bool {
        self.divergence.is_none()
    }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.divergence {
            None => write!(
                f,
                "ok: {} ({} ops applied, {} invariant sweeps)",
                self.config_line, self.ops_applied, self.invariant_sweeps
            ),
            Some(d) => write!(
                f,
                "DIVERGENCE: {} after {} ops: {}",
                self.config_line, self.ops_applied, d
            ),
        }
    }
}

/// One generated queue operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuzzOp {
    Insert(Element),
    Delete(u32),
    DeleteInsert { id: u32, new_key: u64 },
    Read(u32),
}

/// Generate `count` valid operations for a queue of capacity `capacity`.
/// Validity (unique live ids, deletes target stored ids) is tracked with a
/// shadow id set, so the sequence can be replayed against any
/// implementation without precondition failures.
pub fn random_ops(rng: &mut ChaCha8Rng, capacity: u64, count: usize) -> Vec<FuzzOp> {
    let capacity = capacity as u32;
    let mut live: Vec<u32> = Vec::new();
    let mut free: Vec<u32> = (0..capacity).collect();
    let mut ops = Vec::with_capacity(count);
    for _ in 0..count {
        let roll: f64 = rng.gen();
        let op = if live.is_empty() || (roll < 0.40 && !free.is_empty()) {
            let slot = rng.gen_range(0..free.len());
            let id = free.swap_remove(slot);
            live.push(id);
            FuzzOp::Insert(Element::new(id, random_key(rng)))
        } else if roll < 0.65 {
            let slot = rng.gen_range(0..live.len());
            let id = live.swap_remove(slot);
            free.push(id);
            FuzzOp::Delete(id)
        } else if roll < 0.90 {
            let id = *live.choose(rng).unwrap();
            FuzzOp::DeleteInsert { id, new_key: random_key(rng) }
        } else {
            FuzzOp::Read(rng.gen_range(0..capacity))
        };
        ops.push(op);
    }
    ops
}

/// Keys drawn narrow enough that ties happen regularly.
fn random_key(rng: &mut ChaCha8Rng) -> u64 {
    rng.gen_range(0..1 << 13)
}

/// Drain both queues and compare: the key sequences must match exactly and,
/// within each run of equal keys, the same ids must appear (the structured
/// queue's tie order is unconstrained).
pub fn compare_drains(shq: &[Element], oracle: &[Element]) -> Result<(), String> {
    if shq.len() != oracle.len() {
        return Err(format!("drain lengths differ: {} vs oracle {}", shq.len(), oracle.len()));
    }
    for (i, (ours, truth)) in shq.iter().zip(oracle).enumerate() {
        if ours.key != truth.key {
            return Err(format!(
                "drain key mismatch at position {i}: {ours} vs oracle {truth}"
            ));
        }
    }
    let mut i = 0;
    while i < shq.len() {
        let key = shq[i].key;
        let mut j = i;
        while j < shq.len() && shq[j].key == key {
            j += 1;
        }
        let mut ours: Vec<u32> = shq[i..j].iter().map(|e| e.id).collect();
        let mut theirs: Vec<u32> = oracle[i..j].iter().map(|e| e.id).collect();
        ours.sort_unstable();
        theirs.sort_unstable();
        if ours != theirs {
            return Err(format!(
                "tie group for key {key} holds ids {ours:?} vs oracle {theirs:?}"
            ));
        }
        i = j;
    }
    Ok(())
}

/// Run one differential campaign. Divergence is reported, not panicked.
pub fn fuzz_compare(config: &FuzzConfig) -> FuzzReport {
    match config.variant {
        Variant::Naive => match NaiveShq::with_levels(config.levels) {
            Ok(q) => run_campaign(config, q),
            Err(e) => setup_failure(config, e),
        },
        Variant::Memopt => match MemOptShq::with_levels(config.levels) {
            Ok(q) => run_campaign(config, q),
            Err(e) => setup_failure(config, e),
        },
    }
}

fn setup_failure(config: &FuzzConfig, err: crate::error::ShqError) -> FuzzReport {
    FuzzReport {
        config_line: config_line(config),
        ops_applied: 0,
        invariant_sweeps: 0,
        divergence: Some(format!("setup: {err}")),
    }
}

fn config_line(config: &FuzzConfig) -> String {
    format!(
        "seed={} ops={} levels={} variant={}",
        config.seed, config.op_count, config.levels, config.variant
    )
}

fn run_campaign<Lay: TreeLayout>(config: &FuzzConfig, mut queue: Shq<Lay>) -> FuzzReport {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut oracle = OracleQueue::new();
    let ops = random_ops(&mut rng, queue.capacity(), config.op_count);
    let sweep_stride = if config.levels <= 6 { 1 } else { 100 };
    let mut sweeps = 0usize;

    let report = |applied: usize, sweeps: usize, divergence: Option<String>| FuzzReport {
        config_line: config_line(config),
        ops_applied: applied,
        invariant_sweeps: sweeps,
        divergence,
    };

    for (i, op) in ops.iter().enumerate() {
        let step = match apply_op(&mut queue, &mut oracle, *op) {
            Ok(()) => Ok(()),
            Err(e) => Err(format!("op {i} {op:?}: {e}")),
        };
        if let Err(d) = step {
            return report(i, sweeps, Some(d));
        }
        // O(1) cross-check: both tops must agree on the minimum key.
        let ours = queue.read_top().map(|e| e.key);
        let truth = oracle.read_top().map(|e| e.key);
        if ours != truth {
            return report(i + 1, sweeps, Some(format!(
                "op {i} {op:?}: top key {ours:?} vs oracle {truth:?}"
            )));
        }
        if (i + 1) % sweep_stride == 0 {
            sweeps += 1;
            if let Err(d) = queue.check_invariants() {
                return report(i + 1, sweeps, Some(format!("op {i} {op:?}: {d}")));
            }
        }
    }

    let drained = match drain(&mut queue) {
        Ok(d) => d,
        Err(d) => return report(ops.len(), sweeps, Some(d)),
    };
    let truth = oracle.sorted_contents();
    if let Err(d) = compare_drains(&drained, &truth) {
        return report(ops.len(), sweeps, Some(d));
    }
    report(ops.len(), sweeps, None)
}

fn apply_op<Lay: TreeLayout>(
    queue: &mut Shq<Lay>,
    oracle: &mut OracleQueue,
    op: FuzzOp,
) -> Result<(), String> {
    match op {
        FuzzOp::Insert(e) => {
            queue.insert(e).map_err(|err| format!("insert: {err}"))?;
            oracle.insert(e).map_err(|err| format!("oracle insert: {err}"))?;
        }
        FuzzOp::Delete(id) => {
            let ours = queue.delete(id).map_err(|err| format!("delete: {err}"))?;
            let truth = oracle.delete(id).map_err(|err| format!("oracle delete: {err}"))?;
            if ours != truth {
                return Err(format!("delete returned {ours} vs oracle {truth}"));
            }
        }
        FuzzOp::DeleteInsert { id, new_key } => {
            queue.delete_insert(id, new_key).map_err(|err| format!("delete_insert: {err}"))?;
            oracle
                .delete_insert(id, new_key)
                .map_err(|err| format!("oracle delete_insert: {err}"))?;
        }
        FuzzOp::Read(id) => {
            let ours = queue.read(id);
            let truth = oracle.read(id);
            if ours != truth {
                return Err(format!("read({id}) found {ours:?} vs oracle {truth:?}"));
            }
        }
    }
    Ok(())
}

/// Pop everything by repeated read_top + delete and verify keys never
/// decrease on the way out.
pub fn drain<Lay: TreeLayout>(queue: &mut Shq<Lay>) -> Result<Vec<Element>, String> {
    let mut out = Vec::with_capacity(queue.len() as usize);
    let mut last_key = 0u64;
    while let Some(top) = queue.read_top() {
        if top.key < last_key {
            return Err(format!("drain went backwards: {} after key {last_key}", top));
        }
        last_key = top.key;
        let removed = queue.delete(top.id).map_err(|e| format!("drain delete: {e}"))?;
        if removed != top {
            return Err(format!("drain removed {removed}, expected {top}"));
        }
        out.push(removed);
    }
    if !queue.is_empty() {
        return Err("queue reports non-empty after drain".to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_ops_is_trivial_success() {
        let report = fuzz_compare(&FuzzConfig {
            seed: 1,
            op_count: 0,
            levels: 4,
            variant: Variant::Naive,
        });
        assert!(report.is_success(), "{report}");
        assert_eq!(report.ops_applied, 0);
    }

    #[test]
    fn naive_campaign_matches_oracle() {
        let report = fuzz_compare(&FuzzConfig {
            seed: 1,
            op_count: 10_000,
            levels: 6,
            variant: Variant::Naive,
        });
        assert!(report.is_success(), "{report}");
    }

    #[test]
    fn memopt_campaign_matches_oracle() {
        let report = fuzz_compare(&FuzzConfig {
            seed: 1,
            op_count: 10_000,
            levels: 6,
            variant: Variant::Memopt,
        });
        assert!(report.is_success(), "{report}");
    }

    #[test]
    fn memopt_rejects_levels_below_three() {
        let report = fuzz_compare(&FuzzConfig {
            seed: 1,
            op_count: 10,
            levels: 2,
            variant: Variant::Memopt,
        });
        assert!(!report.is_success());
    }

    #[test]
    fn compare_drains_checks_tie_groups_as_sets() {
        let a = [Element::new(1, 5), Element::new(2, 5), Element::new(3, 6)];
        let b = [Element::new(2, 5), Element::new(1, 5), Element::new(3, 6)];
        assert!(compare_drains(&a, &b).is_ok());
        let c = [Element::new(1, 5), Element::new(4, 5), Element::new(3, 6)];
        assert!(compare_drains(&a, &c).is_err());
        let d = [Element::new(1, 5), Element::new(2, 6), Element::new(3, 6)];
        assert!(compare_drains(&a, &d).is_err());
    }
}
