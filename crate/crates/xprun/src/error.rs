use std::fmt;
use std::path::PathBuf;

/// Failures surfaced by the runner, each mapped to a process exit code.
#[derive(Debug)]
pub enum XpError {
    /// Unreadable, malformed or inconsistent configuration.
    Config(String),
    Io { path: PathBuf, source: std::io::Error },
    Csv { path: PathBuf, message: String },
    Simulation(holodfs::Error),
}

impl XpError {
    pub fn config(msg: impl Into<String>) -> Self {
        XpError::Config(msg.into())
    }

    /// 2 for numerical-integrity failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            XpError::Simulation(e) if e.is_integrity_failure() => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for XpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XpError::Config(msg) => write!(f, "config error: {msg}"),
            XpError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            XpError::Csv { path, message } => write!(f, "{}: {message}", path.display()),
            XpError::Simulation(e) if e.is_integrity_failure() => {
                write!(f, "numerical integrity failure: {e}")
            }
            XpError::Simulation(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for XpError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            XpError::Io { source, .. } => Some(source),
            XpError::Simulation(e) => Some(e),
            _ => None,
        }
    }
}

impl From<holodfs::Error> for XpError {
    fn from(e: holodfs::Error) -> Self {
        XpError::Simulation(e)
    }
}

pub type XpResult<T> = std::result::Result<T, XpError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(XpError::config("x").exit_code(), 1);
        assert_eq!(XpError::from(holodfs::Error::TraceDrift { drift: 1e-3 }).exit_code(), 2);
        let cp = holodfs::Error::NotCompletelyPositive { min_eigenvalue: -1e-3 };
        assert_eq!(XpError::from(cp).exit_code(), 2);
        assert_eq!(XpError::from(holodfs::Error::InvalidParameter("t".into())).exit_code(), 1);
    }
}
