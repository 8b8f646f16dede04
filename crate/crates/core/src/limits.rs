use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QeError {
    #[error("time limit exceeded")]
    Timeout,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("formula must be quantifier-free")]
    Quantified,
}

impl QeError {
    /// True for the outcomes caused by a [`Budget`] running out.
    pub fn is_limit(&self) -> bool {
        matches!(self, QeError::Timeout | QeError::ResourceLimit(_))
    }
}

/// Cooperative resource limits, polled by the long-running loops.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    deadline: Option<Instant>,
    max_atoms: Option<usize>,
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget::default()
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Budget {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    pub fn with_deadline(mut self, deadline: Instant) -> Budget {
        self.deadline = Some(deadline);
        self
    }

    /// Caps the number of atom occurrences held in intermediate formulas; the
    /// stand-in for a memory limit.
    pub fn with_max_atoms(mut self, max_atoms: usize) -> Budget {
        self.max_atoms = Some(max_atoms);
        self
    }

    pub fn check_time(&self) -> Result<(), QeError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(QeError::Timeout),
            _ => Ok(()),
        }
    }

    pub fn check_size(&self, atoms: usize) -> Result<(), QeError> {
        match self.max_atoms {
            Some(max) if atoms > max => Err(QeError::ResourceLimit(format!("{atoms} atoms held, limit {max}"))),
            _ => Ok(()),
        }
    }
}
