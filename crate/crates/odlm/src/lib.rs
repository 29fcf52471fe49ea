//! Event-driven oscillatory spiking network for pixel-based image
//! segmentation.
//!
//! Every pixel is a leaky integrate-and-fire oscillator; neighbors with
//! similar gray levels couple excitatorily and pull each other into
//! synchrony, so after a fixed run the firing phases cluster by region.
//! The engine stores each neuron as its predicted next firing time,
//! advances from event to event through a priority queue with
//! delete-by-id (any [`shq::EventQueue`] implementation), and performs the
//! per-spike arithmetic with quantized lookup tables.

pub mod engine;
pub mod grid;
pub mod params;
pub mod segments;
pub mod tables;
pub mod topology;

pub use engine::{levels_for, Engine, EngineConfig, NeuronRecord, RunStats, SimClock};
pub use grid::PixelGrid;
pub use params::{ModelError, NeuronParams, WeightForm};
pub use segments::{extract_segments, SegmentMap};
pub use tables::{apply_spike, ModelTables, SpikeEffects, MEMBRANE_TABLE_LEN, POTENTIAL_CODE_MAX, WEIGHT_CODE_MAX};
pub use topology::{GridTopology, Resolved, PROCESS_ORDER, SYNAPSE_COUNT};
