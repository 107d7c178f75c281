//! Generating-function systems for each structure class, exact counting,
//! grammar dynamic programs and cross-checks between them.

mod check;
mod counting;
mod grammars;
mod systems;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::SeriesError;
use crate::structures::{ModelParams, StructureError, StructureFamily};

pub use check::{check_consistency, CheckReport, CheckRow};
pub use counting::{
    count, count_by_links, count_range, expected_count_series, format_pq, generating_series,
    link_distribution, link_moments, symbolic_coefficients, LinkMoments, PqPoly,
};
pub use grammars::{
    dangle_grammar_system, g2_joint_counts, grammar_count, grammar_counts, loop_decomposition_counts,
    DangleGrammarSystem, Grammar,
};
pub use systems::{build_system, describe, GfSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("saturated structures are only modelled without a stem threshold (tau = 0), got tau = {0}")]
    SaturatedWithStemThreshold(u32),
    #[error("grammar {grammar} is only available for theta = 1, got theta = {theta}")]
    UnsupportedGrammar { grammar: String, theta: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dangles {
    None,
    External,
}

impl std::str::FromStr for Dangles {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "no" => Ok(Self::None),
            "external" | "yes" => Ok(Self::External),
            other => Err(format!("unknown dangle mode `{other}`")),
        }
    }
}

/// A family of structures with its thresholds and weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureClass {
    pub family: StructureFamily,
    pub dangles: Dangles,
    pub params: ModelParams,
}

impl StructureClass {
    pub fn new(family: StructureFamily, dangles: Dangles, params: ModelParams) -> Result<Self, ModelError> {
        if family == StructureFamily::Saturated && params.tau > 0 {
            return Err(ModelError::SaturatedWithStemThreshold(params.tau));
        }
        Ok(StructureClass {
            family,
            dangles,
            params,
        })
    }

    /// Plain class at `p = 1`, `q = 0`.
    pub fn plain(family: StructureFamily, theta: u32, tau: u32) -> Result<Self, ModelError> {
        Self::new(family, Dangles::None, ModelParams::thresholds(theta, tau))
    }

    pub fn label(&self) -> String {
        match self.dangles {
            Dangles::None => self.family.name().to_string(),
            Dangles::External => format!("{}+dangles", self.family.name()),
        }
    }
}
