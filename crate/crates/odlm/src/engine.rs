//! Event-driven engine: the queue's top entry names the next neuron to
//! fire; processing it touches only that neuron and its neighbors.
//!
//! Neuron state is the predicted absolute firing time (plus the pixel
//! feature). Processing one event at time `t`:
//!
//! 1. read the queue top `(pre, t)` and advance the clock to `t`;
//! 2. for every synapse of `pre` (neighbors first, the self-reset last):
//!    translate the target's firing time into a potential code, add the
//!    pixel-similarity weight (or subtract the threshold for the reset),
//!    translate back into a firing time, write the record back, and issue
//!    a delete-insert to the queue with the new time.
//!
//! Potential codes are clamped to the threshold: a neuron pushed past it
//! is scheduled to fire immediately rather than retroactively.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shq::pipeline::{OpKind, PipelineSim, QueueOp};
use shq::{Element, EventQueue, NaiveShq};

use crate::grid::PixelGrid;
use crate::params::{ModelError, NeuronParams, WeightForm};
use crate::segments::{extract_segments, SegmentMap};
use crate::tables::{apply_spike, ModelTables, POTENTIAL_CODE_MAX};
use crate::topology::{GridTopology, Resolved, PROCESS_ORDER};

/// Per-neuron stored state: when it will next fire, and its pixel feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NeuronRecord {
    /// Absolute tick of the predicted next spike.
    pub firing_time: u64,
    pub pixel: u8,
}

/// Simulation clock: advances only to popped event times.
#[derive(Clone, Copy, Debug)]
pub struct SimClock {
    pub now: u64,
    pub tick_seconds: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct EngineConfig {
    pub seed: u64,
    pub weight_form: WeightForm,
    /// Account queue occupancy: cycles per neuron update are measured on
    /// the pipelined queue once at startup, never assumed.
    pub queue_cycle_accounting: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            seed: 1,
            weight_form: WeightForm::Thresholded,
            queue_cycle_accounting: false,
        }
    }
}

/// Cumulative run counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub events: u64,
    pub neuron_updates: u64,
    /// Potential sums clamped at the threshold code.
    pub clamps: u64,
    /// Remaining-time lookups past the table range.
    pub dt_clamps: u64,
    /// Total queue cycles, when accounting is enabled.
    pub queue_cycles: Option<u64>,
    /// Measured pipelined-queue cycles per delete-insert.
    pub cycles_per_update: Option<u64>,
}

pub struct Engine<Q: EventQueue> {
    tables: ModelTables,
    topology: GridTopology,
    records: Vec<NeuronRecord>,
    /// Instant of each neuron's most recent spike (`u64::MAX` = never).
    /// Spikes exchanged within one instant act on pre-reset potentials,
    /// where they saturate at the threshold and are consumed by the reset;
    /// a neuron that already spiked at `now` is therefore left unchanged
    /// by further same-instant arrivals. Without this, the outcome of a
    /// co-firing group would depend on the order ties pop from the queue.
    last_spike: Vec<u64>,
    queue: Q,
    clock: SimClock,
    stats: RunStats,
    cycles_per_update: Option<u64>,
}

impl<Q: EventQueue> Engine<Q> {
    /// Build an engine over `queue` with randomized initial potentials:
    /// each neuron starts uniformly below threshold, reproducibly per seed.
    pub fn new(
        image: &PixelGrid,
        params: &NeuronParams,
        config: &EngineConfig,
        queue: Q,
    ) -> Result<Self, ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let n = image.len();
        let codes: Vec<u16> =
            (0..n).map(|_| rng.gen_range(0..POTENTIAL_CODE_MAX)).collect();
        Self::with_initial_codes(image, params, config, queue, &codes)
    }

    /// Build with explicit initial potential codes (one per pixel, below
    /// the threshold code). Used for deterministic experiments.
    pub fn with_initial_codes(
        image: &PixelGrid,
        params: &NeuronParams,
        config: &EngineConfig,
        mut queue: Q,
        codes: &[u16],
    ) -> Result<Self, ModelError> {
        let tables = ModelTables::build(params, config.weight_form)?;
        assert_eq!(codes.len(), image.len(), "one initial code per pixel");
        assert!(queue.is_empty(), "queue must start empty");
        assert!(
            queue.capacity() >= image.len() as u64,
            "queue capacity {} below neuron count {}",
            queue.capacity(),
            image.len()
        );

        let mut records = Vec::with_capacity(image.len());
        for (id, (&pixel, &code)) in image.pixels().iter().zip(codes).enumerate() {
            assert!(code < POTENTIAL_CODE_MAX, "initial potential must be below threshold");
            let firing_time = tables.remaining_ticks(code);
            records.push(NeuronRecord { firing_time, pixel });
            queue
                .insert(Element::new(id as u32, firing_time))
                .expect("fresh id must insert");
        }

        let cycles_per_update = config.queue_cycle_accounting.then(measure_update_cycles);
        let tick_seconds = tables.tick_seconds;
        let neuron_count = records.len();
        Ok(Engine {
            tables,
            topology: GridTopology::new(image.width(), image.height()),
            records,
            last_spike: vec![u64::MAX; neuron_count],
            queue,
            clock: SimClock { now: 0, tick_seconds },
            stats: RunStats {
                queue_cycles: cycles_per_update.map(|_| 0),
                cycles_per_update,
                ..RunStats::default()
            },
            cycles_per_update,
        })
    }

    pub fn now(&self) -> u64 {
        self.clock.now
    }

    pub fn clock(&self) -> SimClock {
        self.clock
    }

    pub fn period_ticks(&self) -> u64 {
        self.tables.period_ticks
    }

    pub fn tables(&self) -> &ModelTables {
        &self.tables
    }

    pub fn topology(&self) -> &GridTopology {
        &self.topology
    }

    pub fn records(&self) -> &[NeuronRecord] {
        &self.records
    }

    pub fn queue(&self) -> &Q {
        &self.queue
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    /// Process the next event. Returns how many neurons were updated
    /// (neighbors in grid plus the reset).
    pub fn process_event(&mut self) -> Result<u32, ModelError> {
        let top = self.queue.read_top().ok_or(ModelError::BadParam("event queue is empty"))?;
        let (pre_id, t_spike) = (top.id, top.key);
        debug_assert!(t_spike >= self.clock.now, "event times must not decrease");
        self.clock.now = t_spike;

        let pre = self.records[pre_id as usize];
        assert_eq!(
            pre.firing_time, t_spike,
            "queue and state memory disagree for neuron {pre_id}"
        );

        let mut updated = 0u32;
        for &synapse in PROCESS_ORDER.iter() {
            let (post_id, is_reset) = match self.topology.resolve(pre_id, synapse) {
                Resolved::Neuron { id, is_reset } => (id, is_reset),
                Resolved::OutOfGrid => continue,
            };
            let record = self.records[post_id as usize];
            let weight = self.tables.weight_code(pre.pixel.abs_diff(record.pixel));
            let new_record = if !is_reset && self.last_spike[post_id as usize] == t_spike {
                // Already spiked at this instant: the same-instant exchange
                // saturated at threshold and was consumed by its reset.
                record
            } else {
                self.apply_spike(record, weight, is_reset)
            };
            if is_reset {
                self.last_spike[post_id as usize] = t_spike;
            }
            self.records[post_id as usize] = new_record;
            self.queue
                .delete_insert(post_id, new_record.firing_time)
                .expect("queued neuron must be updatable");
            updated += 1;
        }

        self.stats.events += 1;
        self.stats.neuron_updates += updated as u64;
        if let (Some(cycles), Some(per)) = (&mut self.stats.queue_cycles, self.cycles_per_update)
        {
            *cycles += per * updated as u64;
        }
        Ok(updated)
    }

    /// Current potential code of a record: its remaining time through the
    /// membrane table.
    pub fn potential_now(&self, record: &NeuronRecord) -> u16 {
        debug_assert!(record.firing_time >= self.clock.now);
        let (code, _) = self.tables.potential_of_dt(record.firing_time - self.clock.now);
        code
    }

    fn apply_spike(&mut self, record: NeuronRecord, weight: u16, is_reset: bool) -> NeuronRecord {
        let (firing_time, effects) =
            apply_spike(&self.tables, self.clock.now, record.firing_time, weight, is_reset);
        if effects.clamped {
            self.stats.clamps += 1;
        }
        if effects.dt_clamped {
            self.stats.dt_clamps += 1;
        }
        NeuronRecord { firing_time, pixel: record.pixel }
    }

    /// Process events while the next one is due at or before `t_end_ticks`.
    pub fn run_until(&mut self, t_end_ticks: u64) -> Result<RunStats, ModelError> {
        while let Some(top) = self.queue.read_top() {
            if top.key > t_end_ticks {
                break;
            }
            self.process_event()?;
        }
        Ok(self.stats)
    }

    /// Cluster neurons by firing phase at the current time.
    pub fn extract_segments(&self, eps_ticks: u64) -> SegmentMap {
        extract_segments(&self.records, self.clock.now, self.tables.period_ticks, eps_ticks)
    }

    /// Full coherence sweep: the queue contents must mirror the state
    /// memory one-to-one. Intended for tests.
    pub fn check_queue_coherence(&self) -> Result<(), String>
    where
        Q: Clone,
    {
        let mut queue = self.queue.clone();
        let mut seen = vec![false; self.records.len()];
        while let Some(top) = queue.read_top() {
            queue.delete(top.id).map_err(|e| e.to_string())?;
            let record = &self.records[top.id as usize];
            if record.firing_time != top.key {
                return Err(format!(
                    "neuron {}: queue says {} but state memory says {}",
                    top.id, top.key, record.firing_time
                ));
            }
            if seen[top.id as usize] {
                return Err(format!("neuron {} queued twice", top.id));
            }
            seen[top.id as usize] = true;
        }
        match seen.iter().all(|&s| s) {
            true => Ok(()),
            false => Err("some neurons missing from the queue".to_string()),
        }
    }
}

/// Smallest tree depth whose capacity holds `neurons`, valid for both
/// queue layouts.
pub fn levels_for(neurons: usize) -> u8 {
    shq::bench::levels_for_capacity(neurons as u64).max(3)
}

/// Run a short delete-insert workload through the pipelined queue and read
/// off its steady issue interval. The interval is independent of the tree
/// depth, so a fixed mid-size tree is representative.
fn measure_update_cycles() -> u64 {
    let mut tree = NaiveShq::with_levels(8).expect("static level count");
    tree.insert(Element::new(0, 1 << 20)).unwrap();
    let mut sim = PipelineSim::new(tree);
    for i in 0..64u64 {
        sim.submit(QueueOp::DeleteInsert { id: 0, new_key: (1 << 20) + i }).unwrap();
    }
    sim.run_until_drained();
    sim.drain_stats()
        .steady_interval(OpKind::DeleteInsert)
        .expect("homogeneous workload settles to one interval")
}
