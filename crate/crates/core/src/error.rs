use thiserror::Error;

/// Errors produced by the solvers and the exact-algebra layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("step budget exhausted after {steps} steps at x = {x}")]
    MaxSteps { steps: usize, x: f64 },

    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },

    #[error("trajectory too coarse to certify crossings near x = {x} (|Δθ| = {delta})")]
    Refinement { x: f64, delta: f64 },

    #[error("numerical consistency failure: {0}")]
    Consistency(String),

    #[error("multiple root detected in the level-{level} polynomial")]
    MultipleRoot { level: u32 },

    #[error("ladder terminated: level {level} is numerically trivial")]
    LadderTrivial { level: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
