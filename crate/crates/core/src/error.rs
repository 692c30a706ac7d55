use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid impulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("time {0} coincides with an impulse time; request a one-sided limit instead")]
    AtJumpTime(f64),

    #[error("impulse index {index} out of range (schedule has {len} impulses)")]
    ImpulseIndex { index: usize, len: usize },

    #[error("jump map did not converge after {iterations} iterations (residual {residual:e})")]
    JumpNotConverged { iterations: usize, residual: f64 },

    #[error("jump map Jacobian is singular at ({x}, {y})")]
    SingularJump { x: f64, y: f64 },

    #[error("trajectory blew up near t = {time}")]
    BlowUp { time: f64 },

    #[error("trajectory left the domain near t = {time}")]
    DomainExit { time: f64 },

    #[error("step budget of {max_steps} exhausted at t = {time}")]
    StepBudget { max_steps: usize, time: f64 },

    #[error("pulse width {width} overlaps neighbouring impulses or the integration endpoints")]
    PulseOverlap { width: f64 },

    #[error("Newton iteration for the saddle did not converge from the given guess")]
    SaddleNotConverged,

    #[error("fixed point at ({x}, {y}) is not a hyperbolic saddle (eigenvalues {lambda1}, {lambda2})")]
    NotASaddle { x: f64, y: f64, lambda1: f64, lambda2: f64 },

    #[error("orbit parameter {s} lies outside the window [{min}, {max}]")]
    OutsideWindow { s: f64, min: f64, max: f64 },

    #[error("velocity magnitude {speed:e} is below the degeneracy threshold at parameter {p}")]
    DegenerateVelocity { p: f64, speed: f64 },

    #[error("resolvent horizon {horizon} exceeds the available orbit window")]
    HorizonTooLong { horizon: f64 },

    #[error("argument {tau} outside resolvent table range [{min}, {max}]")]
    OutsideTable { tau: f64, min: f64, max: f64 },

    #[error("orbit kind does not provide the {0} manifold")]
    WrongOrbitKind(&'static str),

    #[error("probe fan does not bracket the normal line at p = {p}; widen the fan")]
    FanNotBracketing { p: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
