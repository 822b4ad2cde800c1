use paving::PavingError;

pub const SUCCESS: u8 = 0;
pub const VIOLATION: u8 = 1;
pub const USAGE: u8 = 2;
pub const CAPACITY: u8 = 3;

pub enum Outcome {
    Success,
    /// Ran to completion but some check failed.
    Violation,
}

/// Capacity errors map to 3; everything else (parse, I/O, bad parameters) to 2.
pub fn code_for(err: &anyhow::Error) -> u8 {
    let capacity = err
        .chain()
        .any(|cause| matches!(cause.downcast_ref::<PavingError>(), Some(PavingError::Capacity { .. })));
    if capacity {
        CAPACITY
    } else {
        USAGE
    }
}
