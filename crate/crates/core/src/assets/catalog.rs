//! Generator catalog: kinds, parameter ranges, tags, archetypes.

use super::AssetError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::OnceLock;

/// Solve stage an object kind belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Large,
    Medium,
    Small,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Large, Stage::Medium, Stage::Small];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Large => "large",
            Stage::Medium => "medium",
            Stage::Small => "small",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: String,
    pub archetype: String,
    pub stage: Stage,
    pub tags: Vec<String>,
    pub params: Vec<ParamSpec>,
}

impl GeneratorSpec {
    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// Validate a parameter vector against the declared ranges.
    pub fn check_params(&self, params: &[f64]) -> Result<(), AssetError> {
        if params.len() != self.params.len() {
            return Err(AssetError::ParamCount {
                kind: self.kind.clone(),
                expected: self.params.len(),
                got: params.len(),
            });
        }
        for (spec, &v) in self.params.iter().zip(params) {
            if !(v >= spec.min && v <= spec.max) {
                return Err(AssetError::ParamRange {
                    name: spec.name.clone(),
                    value: v,
                    min: spec.min,
                    max: spec.max,
                });
            }
        }
        Ok(())
    }
}

/// The generator catalog plus the semantic hierarchy its tags hang from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Catalog {
    pub hierarchy: BTreeMap<String, Vec<String>>,
    pub kinds: Vec<GeneratorSpec>,
}

static BUILTIN: OnceLock<Catalog> = OnceLock::new();

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> &'static Catalog {
        BUILTIN.get_or_init(|| {
            serde_json::from_str(include_str!("../../data/catalog.json"))
                .expect("builtin catalog is valid")
        })
    }

    pub fn from_json(text: &str) -> Result<Catalog, AssetError> {
        serde_json::from_str(text).map_err(|e| AssetError::Catalog(e.to_string()))
    }

    pub fn spec(&self, kind: &str) -> Result<&GeneratorSpec, AssetError> {
        self.kinds
            .iter()
            .find(|s| s.kind == kind)
            .ok_or_else(|| AssetError::UnknownKind(kind.to_string()))
    }

    pub fn kinds_of_stage(&self, stage: Stage) -> impl Iterator<Item = &GeneratorSpec> {
        self.kinds.iter().filter(move |s| s.stage == stage)
    }

    /// Register the catalog's tag hierarchy and kind tags.
    pub fn install_tags(&self, registry: &mut crate::semantics::TagRegistry) {
        // Parents may reference tags defined later; insert nodes first.
        for tag in self.hierarchy.keys() {
            registry.ensure(tag);
        }
        for (tag, parents) in &self.hierarchy {
            for p in parents {
                registry.ensure(p);
                registry.add_parent(tag, p);
            }
        }
        for spec in &self.kinds {
            for tag in &spec.tags {
                registry.ensure(tag);
            }
        }
    }
}
