use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computation produced non-finite values or a factorization failed.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}

macro_rules! numeric {
    ($($arg:tt)*) => {
        $crate::Error::Numeric(alloc::format!($($arg)*))
    };
}

pub(crate) use invalid;
pub(crate) use numeric;
