use std::fmt;
use std::io;
use std::process::ExitCode;

/// Why a command stopped, mapped onto the exit-code contract.
#[derive(Debug)]
pub enum Failure {
    /// A cryptographic check failed. Exit 1.
    Invalid(String),
    /// Bad arguments or undecodable input. Exit 2.
    Usage(String),
    /// The filesystem got in the way. Exit 3.
    Io(String),
}

impl Failure {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Failure::Invalid(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn io(path: &str, err: io::Error) -> Self {
        Failure::Io(format!("{path}: {err}"))
    }

    pub fn io_msg(msg: impl Into<String>) -> Self {
        Failure::Io(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Invalid(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        })
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid: {m}"),
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<catt_core::Error> for Failure {
    fn from(e: catt_core::Error) -> Self {
        match e {
            catt_core::Error::NotAMember(d) => {
                Failure::Invalid(format!("{d} is not a member of the proof"))
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}
