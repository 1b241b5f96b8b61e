use thiserror::Error;

/// Errors raised by the outage engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    /// Scenario parameters violate an invariant.
    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParam { name: &'static str, detail: String },

    /// A closed-form term produced a non-finite or out-of-window value.
    #[error("evaluation of {component} failed: {detail}")]
    Evaluation {
        component: &'static str,
        detail: String,
    },

    /// The quartic intersection analysis could not be completed.
    #[error("quartic analysis failed: {0}")]
    Quartic(String),

    /// A quantity is mathematically undefined for the given inputs.
    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        func,
        detail: detail.into(),
    }
}

pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        detail: detail.into(),
    }
}

pub(crate) fn evaluation(component: &'static str, detail: impl Into<String>) -> Error {
    Error::Evaluation {
        component,
        detail: detail.into(),
    }
}
