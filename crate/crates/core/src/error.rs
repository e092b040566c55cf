use std::fmt;

use crate::model::{ParticipantId, TaskId};

/// Errors produced by campaign construction, generation and scenario runs.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter failed its precondition (field name + reason).
    InvalidParams { field: &'static str, reason: String },
    /// The generator could not place a participant with a non-empty
    /// interest set within the retry cap.
    GenerationFailed { participant: u32, retries: u32 },
    /// A task id outside the campaign's task list was referenced.
    UnknownTask(TaskId),
    /// A participant id outside the campaign's participant list was referenced.
    UnknownParticipant(ParticipantId),
    /// A campaign violated a structural invariant.
    InvalidCampaign(String),
    /// An operation requiring a non-empty interest set got an empty one.
    EmptyInterestSet(ParticipantId),
    /// A scalar argument fell outside its documented domain.
    OutOfDomain { what: &'static str, value: f64 },
    /// An aggregate operation received no input.
    EmptyInput(&'static str),
    /// A scenario cell failed; carries the run coordinates.
    ScenarioCell {
        sweep_value: u32,
        repetition: u32,
        message: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParams { field, reason } => {
                write!(f, "invalid parameter `{field}`: {reason}")
            }
            Error::GenerationFailed {
                participant,
                retries,
            } => write!(
                f,
                "could not place participant {participant}: no task in range after {retries} retries"
            ),
            Error::UnknownTask(id) => write!(f, "unknown task id {}", id.0),
            Error::UnknownParticipant(id) => write!(f, "unknown participant id {}", id.0),
            Error::InvalidCampaign(msg) => write!(f, "invalid campaign: {msg}"),
            Error::EmptyInterestSet(id) => {
                write!(f, "participant {} has an empty interest set", id.0)
            }
            Error::OutOfDomain { what, value } => {
                write!(f, "{what} out of domain: {value}")
            }
            Error::EmptyInput(what) => write!(f, "{what} must not be empty"),
            Error::ScenarioCell {
                sweep_value,
                repetition,
                message,
            } => write!(
                f,
                "scenario cell (sweep value {sweep_value}, repetition {repetition}) failed: {message}"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
