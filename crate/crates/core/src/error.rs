use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed instance: {0}")]
    Structure(String),

    #[error("customer {customer} has an empty time window after tightening ({location}: [{early}, {late}])")]
    InfeasibleCustomer {
        customer: usize,
        location: usize,
        early: f64,
        late: f64,
    },

    #[error("invalid dataset parameters: {0}")]
    Params(String),

    #[error("solver configuration: {0}")]
    Config(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("model is infeasible")]
    Infeasible,

    #[error("discretization stalled at iteration {iteration}: {flagged} flagged arcs but no new time points")]
    Stall { iteration: usize, flagged: usize },

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
