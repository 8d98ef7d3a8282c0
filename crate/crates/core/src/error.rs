use crate::model::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} is outside the range of `{variable}`")]
    OutOfRange { variable: String, value: i64 },
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("inconsistent assignment: `{variable}` set to both {first} and {second}")]
    Inconsistent { variable: String, first: i64, second: i64 },
    #[error("unsatisfiable antecedent: `{0}` has no truthmakers")]
    UnsatisfiableAntecedent(String),
    #[error("evidence `{0}` has probability zero")]
    ZeroProbabilityEvidence(String),
    #[error("`{0}` is not a conjunction of atoms")]
    NotConjunctive(String),
    #[error("models have different variable sets")]
    VariableMismatch,
    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),
    #[error("invalid selection function: {0}")]
    InvalidSelection(String),
    #[error("lewis transfer needs a unique closest world, but w{0} selects {1} worlds")]
    NonUniqueSelection(usize, usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
