//! Cycle-level simulator of the pipelined structured heap queue.
//!
//! Each tree level is a pipeline stage. An operation spends three cycles
//! per stage — read, compare, write — and moves down one level every three
//! cycles. Inserts and locate-style reads probe their own level; deletes
//! probe the two child nodes one level below, so a delete's read at stage
//! `s` touches level `s + 1` and its write refills level `s`.
//!
//! The scheduler assigns each submitted operation the earliest issue cycle
//! at which none of its reads can observe a node that an older in-flight
//! operation has yet to write. The characteristic issue spacings
//! (back-to-back inserts every 3 cycles, deletes every 6, delete-insert
//! pairs every 7) are consequences of that rule and of the static
//! read/write offsets — nothing is hard-coded.
//!
//! A delete-insert pair is one compound submission: the insert trails the
//! delete by a single cycle and its compares pick up values the delete
//! part wrote in the same cycle, mirroring the forwarding path a hardware
//! pairing requires. The root's content is available to every stage-0
//! compare through the dedicated top-node port, which is also what
//! [`PipelineSim::read_top_port`] models.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::element::Element;
use crate::error::ShqError;
use crate::layout::TreeLayout;
use crate::tree::Shq;

/// A queue operation to submit to the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueueOp {
    Insert(Element),
    Delete(u32),
    Read(u32),
    DeleteInsert { id: u32, new_key: u64 },
}

/// Submission-level kind, used for statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Insert,
    Delete,
    Read,
    DeleteInsert,
}

/// In-flight part kind. A delete-insert pair contributes two parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartKind {
    Insert,
    Delete,
    Read,
}

impl PartKind {
    fn label(self) -> &'static str {
        match self {
            PartKind::Insert => "insert",
            PartKind::Delete => "delete",
            PartKind::Read => "read",
        }
    }
}

/// Result of a completed operation part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpResult {
    Inserted,
    /// The insert descent found its last-level node occupied. Unreachable
    /// while stored ids are unique.
    InsertOverflow,
    Deleted(Element),
    /// Delete target absent at execution time.
    NotFound,
    ReadHit(Element),
    ReadMiss,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpOutcome {
    pub op_id: u32,
    pub kind: PartKind,
    pub result: OpResult,
}

/// One executed micro-step, for trace output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub cycle: u64,
    pub op_id: u32,
    pub kind: PartKind,
    /// Pipeline stage, 0-based.
    pub stage: u8,
    pub micro: Micro,
    /// Tree level touched, 0-based.
    pub level: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Micro {
    /// Single-node read.
    Read,
    /// Two simultaneous child reads.
    Read2,
    Compare,
    Write,
}

impl Micro {
    fn label(self) -> &'static str {
        match self {
            Micro::Read => "r",
            Micro::Read2 => "r2",
            Micro::Compare => "c",
            Micro::Write => "w",
        }
    }
}

/// Issue log and derived throughput figures.
#[derive(Clone, Debug)]
pub struct CycleStats {
    pub cycles: u64,
    /// Submission order: kind and assigned issue cycle (for pairs, the
    /// delete part's cycle).
    pub submissions: Vec<(OpKind, u64)>,
}

impl CycleStats {
    pub fn count(&self, kind: OpKind) -> usize {
        self.submissions.iter().filter(|(k, _)| *k == kind).count()
    }

    /// Issue-cycle gaps between back-to-back submissions of one kind
    /// (adjacent in submission order with nothing in between).
    pub fn back_to_back_intervals(&self, kind: OpKind) -> Vec<u64> {
        self.submissions
            .windows(2)
            .filter(|w| w[0].0 == kind && w[1].0 == kind)
            .map(|w| w[1].1 - w[0].1)
            .collect()
    }

    /// The uniform back-to-back interval, if every measured gap agrees.
    pub fn steady_interval(&self, kind: OpKind) -> Option<u64> {
        let intervals = self.back_to_back_intervals(kind);
        let first = *intervals.first()?;
        intervals.iter().all(|&i| i == first).then_some(first)
    }
}

#[derive(Clone, Debug)]
enum Phase {
    /// Insert-style descent carrying the element to place.
    Traveling(Element),
    /// Scanning the target's path (deletes and reads).
    Locate(u32),
    /// Refilling a vacancy at this stage's level.
    Promote(u64),
    Done,
}

#[derive(Clone, Copy, Debug)]
struct PendingWrite {
    index: u64,
    value: Option<Element>,
    count_delta: i64,
}

type Snapshot = [Option<(u8, u64, Option<Element>)>; 2];

#[derive(Debug)]
struct Part {
    op_id: u32,
    kind: PartKind,
    /// Insert half of a delete-insert pair: its compares may legitimately
    /// observe nodes the delete half wrote after the read micro-step.
    pair_insert: bool,
    issue: u64,
    phase: Phase,
    pending: Option<PendingWrite>,
    next_phase: Phase,
    snapshot: Snapshot,
}

/// Per-cycle port accounting: each level has one read port used by its own
/// stage, one write port, and one read path from the stage above (child
/// reads). Exceeding any of them, or writing a level that was also read
/// this cycle, is a scheduler bug.
struct PortUse {
    own_read: Vec<u8>,
    below_read: Vec<u8>,
    write: Vec<u8>,
}

impl PortUse {
    fn new(levels: u8) -> Self {
        PortUse {
            own_read: vec![0; levels as usize],
            below_read: vec![0; levels as usize],
            write: vec![0; levels as usize],
        }
    }

    fn assert_clean(&self, cycle: u64) {
        for level in 0..self.own_read.len() {
            assert!(
                self.own_read[level] <= 1,
                "cycle {cycle}: level {level} own-read port driven {} times",
                self.own_read[level]
            );
            assert!(
                self.below_read[level] <= 1,
                "cycle {cycle}: level {level} child-read port driven {} times",
                self.below_read[level]
            );
            assert!(
                self.write[level] <= 1,
                "cycle {cycle}: level {level} write port driven {} times",
                self.write[level]
            );
            let read = self.own_read[level] + self.below_read[level];
            assert!(
                read == 0 || self.write[level] == 0,
                "cycle {cycle}: level {level} read and written in the same cycle"
            );
        }
    }
}

fn read_offset(kind: PartKind, level: u8) -> Option<u64> {
    match kind {
        PartKind::Insert | PartKind::Read => Some(3 * level as u64),
        // Stage s reads its children on level s+1, so level `l` is read by
        // stage l-1; the root is served by the dedicated top port.
        PartKind::Delete => (level >= 1).then(|| 3 * (level as u64 - 1)),
    }
}

fn write_offset(kind: PartKind, level: u8) -> Option<u64> {
    match kind {
        PartKind::Insert | PartKind::Delete => Some(3 * level as u64 + 2),
        PartKind::Read => None,
    }
}

/// Cycle simulator wrapping a tree. Mutations are byte-for-byte equivalent
/// to applying the same operations through the functional queue in
/// submission order.
pub struct PipelineSim<Lay: TreeLayout> {
    tree: Shq<Lay>,
    levels: u8,
    cycle: u64,
    next_op_id: u32,
    issue_floor: u64,
    parts: VecDeque<Part>,
    sched_window: VecDeque<(PartKind, u64)>,
    submissions: Vec<(OpKind, u64)>,
    outcomes: Vec<OpOutcome>,
    trace: Vec<TraceRow>,
}

impl<Lay: TreeLayout> PipelineSim<Lay> {
    pub fn new(tree: Shq<Lay>) -> Self {
        let levels = tree.levels();
        PipelineSim {
            tree,
            levels,
            cycle: 0,
            next_op_id: 0,
            issue_floor: 1,
            parts: VecDeque::new(),
            sched_window: VecDeque::new(),
            submissions: Vec::new(),
            outcomes: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn tree(&self) -> &Shq<Lay> {
        &self.tree
    }

    pub fn into_tree(self) -> Shq<Lay> {
        self.tree
    }

    pub fn outcomes(&self) -> &[OpOutcome] {
        &self.outcomes
    }

    /// Completed operations that failed at execution time.
    pub fn error_count(&self) -> usize {
        self.outcomes
            .iter()
            .filter(|o| matches!(o.result, OpResult::NotFound | OpResult::InsertOverflow))
            .count()
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    /// Trace as CSV. Stages and levels are reported 1-based, so level 1 is
    /// the root, matching the stage numbering of the hardware schedule.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("cycle,op,kind,stage,micro,level\n");
        for row in &self.trace {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                row.cycle,
                row.op_id,
                row.kind.label(),
                row.stage + 1,
                row.micro.label(),
                row.level + 1
            );
        }
        out
    }

    pub fn drain_stats(&self) -> CycleStats {
        CycleStats { cycles: self.cycle, submissions: self.submissions.clone() }
    }

    /// The root occupant as seen through the dedicated top-node read port.
    /// Valid every cycle; once a delete's stage-0 write has committed this
    /// is already the new minimum even while the delete runs below.
    pub fn read_top_port(&self) -> Option<Element> {
        self.tree.read_top()
    }

    /// Schedule an operation. Returns the assigned issue cycle (for a
    /// delete-insert pair, the delete part's cycle; its insert part always
    /// trails by exactly one cycle).
    pub fn submit(&mut self, op: QueueOp) -> Result<u64, ShqError> {
        match op {
            QueueOp::Insert(element) => {
                self.check_id(element.id)?;
                let issue = self.earliest_issue(PartKind::Insert);
                self.push_part(PartKind::Insert, false, issue, Phase::Traveling(element));
                self.record(OpKind::Insert, issue, issue + 1);
                Ok(issue)
            }
            QueueOp::Delete(id) => {
                self.check_id(id)?;
                let issue = self.earliest_issue(PartKind::Delete);
                self.push_part(PartKind::Delete, false, issue, Phase::Locate(id));
                self.record(OpKind::Delete, issue, issue + 1);
                Ok(issue)
            }
            QueueOp::Read(id) => {
                self.check_id(id)?;
                let issue = self.earliest_issue(PartKind::Read);
                self.push_part(PartKind::Read, false, issue, Phase::Locate(id));
                self.record(OpKind::Read, issue, issue + 1);
                Ok(issue)
            }
            QueueOp::DeleteInsert { id, new_key } => {
                self.check_id(id)?;
                let issue = self
                    .earliest_issue(PartKind::Delete)
                    .max(self.earliest_issue(PartKind::Insert).saturating_sub(1));
                self.push_part(PartKind::Delete, false, issue, Phase::Locate(id));
                self.push_part(
                    PartKind::Insert,
                    true,
                    issue + 1,
                    Phase::Traveling(Element::new(id, new_key)),
                );
                self.record(OpKind::DeleteInsert, issue, issue + 2);
                Ok(issue)
            }
        }
    }

    fn check_id(&self, id: u32) -> Result<(), ShqError> {
        if (id as u64) < self.tree.capacity() {
            Ok(())
        } else {
            Err(ShqError::IdOutOfRange { id, capacity: self.tree.capacity() })
        }
    }

    fn push_part(&mut self, kind: PartKind, pair_insert: bool, issue: u64, phase: Phase) {
        let op_id = self.next_op_id;
        self.next_op_id += 1;
        self.parts.push_back(Part {
            op_id,
            kind,
            pair_insert,
            issue,
            phase,
            pending: None,
            next_phase: Phase::Done,
            snapshot: [None, None],
        });
        self.sched_window.push_back((kind, issue));
    }

    fn record(&mut self, kind: OpKind, issue: u64, floor: u64) {
        self.submissions.push((kind, issue));
        self.issue_floor = floor;
        let horizon = 3 * self.levels as u64 + 3;
        while let Some(&(_, old)) = self.sched_window.front() {
            if old + horizon < self.issue_floor {
                self.sched_window.pop_front();
            } else {
                break;
            }
        }
    }

    /// Earliest cycle at which a new part's every read lands strictly after
    /// all older parts' writes to the same level. One issue per cycle.
    fn earliest_issue(&self, kind: PartKind) -> u64 {
        let mut t = (self.cycle + 1).max(self.issue_floor);
        for &(prev_kind, prev_issue) in &self.sched_window {
            for level in 0..self.levels {
                if let (Some(r), Some(w)) = (read_offset(kind, level), write_offset(prev_kind, level))
                {
                    t = t.max((prev_issue + w + 1).saturating_sub(r));
                }
            }
        }
        t
    }

    /// Advance one clock cycle, executing every in-flight micro-step.
    pub fn tick(&mut self) {
        self.cycle += 1;
        let cycle = self.cycle;
        let levels = self.levels;
        let span = 3 * levels as u64;
        let mut ports = PortUse::new(levels);

        let Self { tree, parts, outcomes, trace, .. } = self;
        for part in parts.iter_mut() {
            if cycle < part.issue {
                continue;
            }
            let rel = cycle - part.issue;
            if rel >= span {
                continue;
            }
            let stage = (rel / 3) as u8;
            match rel % 3 {
                0 => micro_read(part, tree, trace, &mut ports, stage, cycle, levels),
                1 => micro_compare(part, tree, outcomes, trace, stage, cycle, levels),
                _ => micro_write(part, tree, trace, &mut ports, stage, cycle),
            }
        }
        parts.retain(|p| cycle + 1 < p.issue + span);
        ports.assert_clean(cycle);
    }

    /// Tick until every scheduled operation has flowed out of the pipe.
    pub fn run_until_drained(&mut self) {
        while !self.parts.is_empty() {
            self.tick();
        }
    }

    /// Elements currently carried in insert pipeline registers, i.e. by
    /// parts that have already issued. Parts scheduled for future cycles
    /// hold nothing yet.
    pub fn traveling_elements(&self) -> Vec<Element> {
        self.parts
            .iter()
            .filter(|p| self.cycle >= p.issue)
            .filter_map(|p| match p.phase {
                Phase::Traveling(e) => Some(e),
                _ => None,
            })
            .collect()
    }

    /// True when no operation is occupying stage 0 this cycle.
    pub fn stage0_idle(&self) -> bool {
        !self.parts.iter().any(|p| {
            self.cycle >= p.issue && self.cycle - p.issue < 3 && !matches!(p.phase, Phase::Done)
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn micro_read<Lay: TreeLayout>(
    part: &mut Part,
    tree: &Shq<Lay>,
    trace: &mut Vec<TraceRow>,
    ports: &mut PortUse,
    stage: u8,
    cycle: u64,
    levels: u8,
) {
    part.snapshot = [None, None];
    match part.phase {
        Phase::Done => {}
        Phase::Traveling(element) => {
            let index = tree.layout().path_index(element.id, stage);
            part.snapshot[0] = Some((stage, index, tree.node(stage, index)));
            ports.own_read[stage as usize] += 1;
            push_row(trace, part, cycle, stage, Micro::Read, stage);
        }
        Phase::Locate(target) if part.kind == PartKind::Read => {
            let index = tree.layout().path_index(target, stage);
            part.snapshot[0] = Some((stage, index, tree.node(stage, index)));
            ports.own_read[stage as usize] += 1;
            push_row(trace, part, cycle, stage, Micro::Read, stage);
        }
        Phase::Locate(target) => {
            let current = tree.layout().path_index(target, stage);
            read_children(part, tree, trace, ports, stage, cycle, levels, current);
        }
        Phase::Promote(vacancy) => {
            read_children(part, tree, trace, ports, stage, cycle, levels, vacancy);
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn read_children<Lay: TreeLayout>(
    part: &mut Part,
    tree: &Shq<Lay>,
    trace: &mut Vec<TraceRow>,
    ports: &mut PortUse,
    stage: u8,
    cycle: u64,
    levels: u8,
    index: u64,
) {
    if stage + 1 >= levels {
        return;
    }
    let slots = tree.layout().children(stage, index);
    let mut filled = 0;
    for child in slots.iter() {
        part.snapshot[filled] = Some((stage + 1, child, tree.node(stage + 1, child)));
        filled += 1;
    }
    if filled > 0 {
        ports.below_read[stage as usize + 1] += 1;
        let micro = if filled == 2 { Micro::Read2 } else { Micro::Read };
        push_row(trace, part, cycle, stage, micro, stage + 1);
    }
}

fn micro_compare<Lay: TreeLayout>(
    part: &mut Part,
    tree: &mut Shq<Lay>,
    outcomes: &mut Vec<OpOutcome>,
    trace: &mut Vec<TraceRow>,
    stage: u8,
    cycle: u64,
    levels: u8,
) {
    if matches!(part.phase, Phase::Done) {
        return;
    }
    // Hazard check: outside the pair forwarding path, everything read one
    // cycle ago must still be in memory unchanged.
    if !part.pair_insert {
        for snap in part.snapshot.iter().flatten() {
            let (level, index, value) = *snap;
            assert!(
                tree.node(level, index) == value,
                "cycle {cycle}: op {} read level {level}[{index}] before an older write",
                part.op_id
            );
        }
    }

    match part.phase {
        Phase::Traveling(element) => {
            let index = tree.layout().path_index(element.id, stage);
            let occupant = tree.node(stage, index);
            match occupant {
                None => {
                    part.pending =
                        Some(PendingWrite { index, value: Some(element), count_delta: 1 });
                    part.next_phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::Inserted,
                    });
                }
                Some(_) if stage == levels - 1 => {
                    part.phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::InsertOverflow,
                    });
                    return;
                }
                Some(inc) => {
                    if element.key < inc.key {
                        part.pending =
                            Some(PendingWrite { index, value: Some(element), count_delta: 0 });
                        part.next_phase = Phase::Traveling(inc);
                    } else {
                        // Incumbent stays (also on ties); write-back as-is.
                        part.pending =
                            Some(PendingWrite { index, value: Some(inc), count_delta: 0 });
                        part.next_phase = Phase::Traveling(element);
                    }
                }
            }
            push_row(trace, part, cycle, stage, Micro::Compare, stage);
        }
        Phase::Locate(target) if part.kind == PartKind::Read => {
            let index = tree.layout().path_index(target, stage);
            push_row(trace, part, cycle, stage, Micro::Compare, stage);
            match tree.node(stage, index) {
                None => {
                    part.phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::ReadMiss,
                    });
                }
                Some(found) if found.id == target => {
                    part.phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::ReadHit(found),
                    });
                }
                Some(_) if stage == levels - 1 => {
                    part.phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::ReadMiss,
                    });
                }
                Some(_) => {}
            }
        }
        Phase::Locate(target) => {
            let index = tree.layout().path_index(target, stage);
            push_row(trace, part, cycle, stage, Micro::Compare, stage);
            match tree.node(stage, index) {
                None => {
                    part.phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::NotFound,
                    });
                }
                Some(found) if found.id == target => {
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::Deleted(found),
                    });
                    stage_promotion(part, tree, stage, index, levels, -1);
                }
                Some(_) if stage == levels - 1 => {
                    part.phase = Phase::Done;
                    outcomes.push(OpOutcome {
                        op_id: part.op_id,
                        kind: part.kind,
                        result: OpResult::NotFound,
                    });
                }
                Some(_) => {}
            }
        }
        Phase::Promote(vacancy) => {
            if stage + 1 < levels {
                push_row(trace, part, cycle, stage, Micro::Compare, stage);
            }
            stage_promotion(part, tree, stage, vacancy, levels, 0);
        }
        Phase::Done => unreachable!(),
    }
}

/// Decide what refills the vacancy at `(stage, index)` and stage the write.
fn stage_promotion<Lay: TreeLayout>(
    part: &mut Part,
    tree: &Shq<Lay>,
    stage: u8,
    index: u64,
    levels: u8,
    count_delta: i64,
) {
    if stage + 1 < levels {
        if let Some((child_index, child)) = tree.promotion_candidate(stage, index) {
            part.pending = Some(PendingWrite { index, value: Some(child), count_delta });
            part.next_phase = Phase::Promote(child_index);
            return;
        }
    }
    part.pending = Some(PendingWrite { index, value: None, count_delta });
    part.next_phase = Phase::Done;
}

fn micro_write<Lay: TreeLayout>(
    part: &mut Part,
    tree: &mut Shq<Lay>,
    trace: &mut Vec<TraceRow>,
    ports: &mut PortUse,
    stage: u8,
    cycle: u64,
) {
    if let Some(pending) = part.pending.take() {
        tree.set_node(stage, pending.index, pending.value);
        let count = (tree.len() as i64 + pending.count_delta) as u64;
        tree.set_count(count);
        part.phase = std::mem::replace(&mut part.next_phase, Phase::Done);
        ports.write[stage as usize] += 1;
        push_row(trace, part, cycle, stage, Micro::Write, stage);
    }
}

fn push_row(trace: &mut Vec<TraceRow>, part: &Part, cycle: u64, stage: u8, micro: Micro, level: u8) {
    trace.push(TraceRow { cycle, op_id: part.op_id, kind: part.kind, stage, micro, level });
}
