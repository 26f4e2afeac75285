use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("{what} supports at most {max} vertices, got {n}")]
    TooLarge { what: &'static str, n: usize, max: usize },
    #[error("{what} needs at least {min} vertices, got {n}")]
    TooSmall { what: &'static str, n: usize, min: usize },
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex set {mask:#x} has bits outside 0..{n}")]
    InvalidVertexSet { mask: u64, n: usize },
    #[error("exponent p = {p} is not allowed here (need p >= {min})")]
    InvalidExponent { p: f64, min: f64 },
    #[error("payoff vector has length {got}, game has {expected} players")]
    LengthMismatch { expected: usize, got: usize },
    #[error("vertex {0} is not in the coalition")]
    NotInCoalition(usize),
    #[error("eigensolver did not converge after {sweeps} sweeps on a graph with n = {n}, m = {m}")]
    NoConvergence { n: usize, m: usize, sweeps: usize },
}
