use std::fmt;

/// Exit code 2: the input was rejected before or during validation.
pub const EXIT_INPUT: u8 = 2;
/// Exit code 1: an identity or inequality check failed.
pub const EXIT_MATH: u8 = 1;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(e: impl fmt::Display) -> Self {
        Self {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }

    pub fn math(e: impl fmt::Display) -> Self {
        Self {
            code: EXIT_MATH,
            message: e.to_string(),
        }
    }

    /// Failure inside a named pipeline stage; always a mathematical failure.
    pub fn stage(stage: &str, e: impl fmt::Display) -> Self {
        Self::math(format!("stage {stage} failed: {e}"))
    }
}

impl From<lpsieve::Error> for CliError {
    fn from(e: lpsieve::Error) -> Self {
        if e.is_input_error() {
            Self::input(e)
        } else {
            Self::math(e)
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
