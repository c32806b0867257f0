use addbasis_core::{Error, ErrorClass};
use serde::Serialize;

pub const EXIT_GENERIC: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_DESK_SCALE: u8 = 3;
pub const EXIT_VERIFY_FAILED: u8 = 4;
pub const EXIT_INVARIANT: u8 = 5;

/// A failure with its exit status and a stable code for scripts.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub exit: u8,
    pub class: &'static str,
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn validation(code: &str, message: impl Into<String>) -> Self {
        CliError {
            exit: EXIT_VALIDATION,
            class: "validation",
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            exit: EXIT_GENERIC,
            class: "io",
            code: "io_error".into(),
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (exit, class) = match e.class() {
            ErrorClass::Validation => (EXIT_VALIDATION, "validation"),
            ErrorClass::DeskScale => (EXIT_DESK_SCALE, "desk_scale"),
            ErrorClass::Invariant => (EXIT_INVARIANT, "invariant"),
        };
        CliError {
            exit,
            class,
            code: e.code().into(),
            message: e.to_string(),
        }
    }
}
