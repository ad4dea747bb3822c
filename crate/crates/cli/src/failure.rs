use mixgap::Error;

pub const EXIT_PARSE: u8 = 2;
pub const EXIT_NON_ERGODIC: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;
pub const EXIT_SOLVER: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn parse(message: impl Into<String>) -> Self {
        Self { code: EXIT_PARSE, message: message.into() }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self { code: EXIT_PRECONDITION, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_)
            | Error::Io(_)
            | Error::InvalidMatrix(_)
            | Error::InvalidTrajectory(_)
            | Error::DimensionMismatch { .. } => EXIT_PARSE,
            Error::NonErgodic | Error::ZeroStationaryEntry(_) => EXIT_NON_ERGODIC,
            Error::NoConvergence(_) | Error::EigensolverFailure(_) | Error::Overflow { .. } => EXIT_SOLVER,
            _ => EXIT_PRECONDITION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::parse(e.to_string())
    }
}
