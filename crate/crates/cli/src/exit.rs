//! Process exit codes.

use std::fmt;

pub const OK: i32 = 0;
pub const USAGE: i32 = 1;
pub const DATA: i32 = 2;
pub const INVARIANT: i32 = 3;

/// Marks an error as a usage or configuration problem.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn core_code(e: &lpim_core::Error) -> i32 {
    use lpim_core::Error::*;
    match e {
        InvalidParameter(_) | Capacity { .. } => USAGE,
        Invariant(_) => INVARIANT,
        Parse { .. }
        | Io(_)
        | SelfLoop(_)
        | InvalidNode { .. }
        | NodeCountMismatch { .. }
        | Degenerate(_) => DATA,
    }
}

/// Exit code for an error: the first recognised cause decides, unknown
/// causes count as usage errors.
pub fn code_for(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return USAGE;
    }
    for cause in err.chain() {
        if cause.downcast_ref::<UsageError>().is_some() {
            return USAGE;
        }
        if let Some(e) = cause.downcast_ref::<lpim_core::Error>() {
            return core_code(e);
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
        {
            return DATA;
        }
    }
    USAGE
}
