//! Model and engine identifiers shared across the crate.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// The matrix model whose tau-function is being built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Kontsevich-Witten (cubic potential).
    Kw,
    /// Generalized Brezin-Gross-Witten with symbolic parameter `N`.
    Bgw,
    /// Monomial model with potential degree `n + 1`; `Gkm(1)` coincides with
    /// [`Model::Kw`] but only exposes the one-body constraint route.
    Gkm(u32),
}

impl Model {
    /// Degree parameter of the monomial potential, where it applies.
    pub fn monomial_degree(&self) -> Option<u32> {
        match self {
            Model::Kw => Some(1),
            Model::Gkm(n) => Some(*n),
            Model::Bgw => None,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Kw => write!(f, "kw"),
            Model::Bgw => write!(f, "bgw"),
            Model::Gkm(n) => write!(f, "gkm:{n}"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kw" => Ok(Model::Kw),
            "bgw" => Ok(Model::Bgw),
            _ => match s.strip_prefix("gkm:").and_then(|n| n.parse::<u32>().ok()) {
                Some(n) if n >= 1 => Ok(Model::Gkm(n)),
                _ => Err(Error::InvalidArgument(format!(
                    "unknown model `{s}` (expected kw, bgw, or gkm:<n> with n >= 1)"
                ))),
            },
        }
    }
}

/// Which construction of the tau-series to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    /// Graded node operators acting directly on polynomial states.
    Nodes,
    /// Calibrated free-fermion engine driven by the one-body constraint
    /// operator.
    Fermionic,
    /// Cut-and-join exponential (closed-form single operator).
    CutJoin,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineKind::Nodes => write!(f, "nodes"),
            EngineKind::Fermionic => write!(f, "fermionic"),
            EngineKind::CutJoin => write!(f, "cutjoin"),
        }
    }
}

impl FromStr for EngineKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nodes" => Ok(EngineKind::Nodes),
            "fermionic" => Ok(EngineKind::Fermionic),
            "cutjoin" => Ok(EngineKind::CutJoin),
            _ => Err(Error::InvalidArgument(format!(
                "unknown engine `{s}` (expected nodes, fermionic, or cutjoin)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_strings_round_trip() {
        for s in ["kw", "bgw", "gkm:1", "gkm:7"] {
            assert_eq!(Model::from_str(s).unwrap().to_string(), s);
        }
        assert!(Model::from_str("gkm:0").is_err());
        assert!(Model::from_str("kontsevich").is_err());
    }

    #[test]
    fn engine_strings_round_trip() {
        for s in ["nodes", "fermionic", "cutjoin"] {
            assert_eq!(EngineKind::from_str(s).unwrap().to_string(), s);
        }
        assert!(EngineKind::from_str("magic").is_err());
    }
}
