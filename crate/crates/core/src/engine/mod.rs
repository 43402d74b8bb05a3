//! The two dynamics engines and the continuous state they share.

pub mod bitrev;
pub mod event;
mod state;

pub use state::{Disk, EventKind, LoggedEvent, SimState, Table, Wall};

/// Maximum tolerated overlap between two disks, in table lengths.
pub const OVERLAP_TOLERANCE: f64 = 1e-9;
/// Maximum tolerated gap for a pair or wall to count as "in contact".
pub const CONTACT_TOLERANCE: f64 = 1e-9;
