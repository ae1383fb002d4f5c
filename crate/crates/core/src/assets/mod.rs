//! Parametric placeholder generators.
//!
//! The generator catalog (kinds, parameter ranges, semantic tags, archetype)
//! lives in a data file; each kind maps onto one of a handful of geometric
//! archetypes that emit a tagged low-poly proxy. Generation is a pure
//! function of (kind, params, seed).

mod catalog;
mod generate;
mod placeholder;

pub use catalog::{Catalog, GeneratorSpec, ParamSpec, Stage};
pub use generate::{generate, resample_params};
pub use placeholder::{Face, Lod, Part, PlaceholderObject, ProxyBuilder, TaggedPlane};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssetError {
    #[error("unknown generator kind '{0}'")]
    UnknownKind(String),
    #[error("parameter count mismatch for '{kind}': expected {expected}, got {got}")]
    ParamCount {
        kind: String,
        expected: usize,
        got: usize,
    },
    #[error("parameter '{name}' = {value} outside range [{min}, {max}]")]
    ParamRange {
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("catalog parse error: {0}")]
    Catalog(String),
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
}
