//! Structured heap queue: a hardware-style priority queue in which every
//! element's admissible nodes form a fixed root-to-leaf path selected by
//! its id bits. Locating an element by id probes one node per level, so
//! delete-by-id and update run in constant time per pipeline stage.
//!
//! The crate provides:
//!
//! * [`NaiveShq`] / [`MemOptShq`] — functional queues over the two tree
//!   layouts (one exclusive leaf per id, or a leaf level shrunk to 25%);
//! * [`pipeline::PipelineSim`] — a cycle-level simulator of the pipelined
//!   queue, one tree level per stage, with hazard-derived issue scheduling;
//! * [`oracle::OracleQueue`] and [`fuzz`] — a reference queue and a
//!   differential-fuzzing driver;
//! * [`bench`] — cycle models contrasting the queue with a comparator-scan
//!   baseline across sizes.

pub mod bench;
pub mod element;
pub mod error;
pub mod fuzz;
pub mod layout;
pub mod oracle;
pub mod pipeline;
pub mod queue;
pub mod tree;

pub use element::Element;
pub use error::ShqError;
pub use layout::{MemOptLayout, NaiveLayout, TreeLayout, MAX_LEVELS};
pub use queue::EventQueue;
pub use tree::{MemOptShq, NaiveShq, Shq};
