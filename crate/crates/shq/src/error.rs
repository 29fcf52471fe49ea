use std::error::Error;
use std::fmt;

/// Errors raised by queue construction and mutation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ShqError {
    /// Requested level count is outside the supported range.
    InvalidLevels { levels: u8, min: u8, max: u8 },
    /// Element id does not fit the queue's capacity.
    IdOutOfRange { id: u32, capacity: u64 },
    /// Level index past the bottom of the tree.
    LevelOutOfRange { level: u8, levels: u8 },
    /// An element with this id is already stored.
    DuplicateId { id: u32 },
    /// No element with this id is stored.
    NotFound { id: u32 },
    /// The queue already holds `capacity` elements.
    Full { capacity: u64 },
    /// An insert descent ran out of room on its path. Unreachable while
    /// ids are unique; reported instead of silently dropping an element.
    StructuralOverflow { id: u32, level: u8 },
}

impl fmt::Display for ShqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ShqError::InvalidLevels { levels, min, max } => {
                write!(f, "invalid level count {levels}: must be in {min}..={max}")
            }
            ShqError::IdOutOfRange { id, capacity } => {
                write!(f, "id {id} out of range for capacity {capacity}")
            }
            ShqError::LevelOutOfRange { level, levels } => {
                write!(f, "level {level} out of range for a {levels}-level tree")
            }
            ShqError::DuplicateId { id } => write!(f, "id {id} is already stored"),
            ShqError::NotFound { id } => write!(f, "id {id} not found"),
            ShqError::Full { capacity } => write!(f, "queue is full (capacity {capacity})"),
            ShqError::StructuralOverflow { id, level } => {
                write!(f, "no free node for id {id} at level {level}")
            }
        }
    }
}

impl Error for ShqError {}
