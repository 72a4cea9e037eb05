use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("norm evaluation failed: {0}")]
    Norm(String),

    #[error("{failed} sample(s) outside the asserted bracket")]
    Bracket { failed: usize },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io { .. } => 1,
            Self::Malformed(_) => 2,
            Self::Invariant(_) => 3,
            Self::Norm(_) => 4,
            Self::Bracket { .. } => 5,
        }
    }

    /// Sorts a core error by the stage that raised it: building operators
    /// reports malformed specs and violated invariants, everything after is a
    /// norm error.
    pub fn from_build(e: plcalc::Error) -> Self {
        use plcalc::Error as E;
        match e {
            E::InvalidParameter(_) | E::DimensionMismatch { .. } => Self::Malformed(e.to_string()),
            _ => Self::Invariant(e.to_string()),
        }
    }

    pub fn from_norm(e: plcalc::Error) -> Self {
        use plcalc::Error as E;
        match &e {
            E::Invariant(_) | E::DisconnectedGraph { .. } | E::NotSelfAdjoint { .. } => Self::Invariant(e.to_string()),
            E::Sample { source, .. } if matches!(**source, E::Invariant(_)) => Self::Invariant(e.to_string()),
            _ => Self::Norm(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;
    use plcalc::Error as E;

    #[test]
    fn stages_map_to_exit_codes() {
        assert_eq!(CliError::from_build(E::InvalidParameter("x".into())).exit_code(), 2);
        assert_eq!(CliError::from_build(E::DisconnectedGraph { kernel_dim: 2 }).exit_code(), 3);
        assert_eq!(CliError::from_norm(E::MissingDecayCertificate).exit_code(), 4);
        let wrapped = E::Sample {
            index: 3,
            source: Box::new(E::Invariant("ratio".into())),
        };
        assert_eq!(CliError::from_norm(wrapped).exit_code(), 3);
        assert_eq!(CliError::Bracket { failed: 1 }.exit_code(), 5);
    }
}
