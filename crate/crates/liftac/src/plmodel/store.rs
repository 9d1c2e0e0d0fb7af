//! Versioned model store and model references.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize};

use super::{Fts, Lts, ModelError};
use crate::featexpr::Configuration;
use crate::util::digest;

/// Either a product-line model or a single product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Model {
    Fts(Fts),
    Lts(Lts),
}

impl<'de> Deserialize<'de> for Model {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let is_fts = v.get("features").is_some();
        let r = if is_fts {
            serde_json::from_value(v).map(Model::Fts)
        } else {
            serde_json::from_value(v).map(Model::Lts)
        };
        r.map_err(serde::de::Error::custom)
    }
}

impl Model {
    pub fn as_fts(&self) -> Option<&Fts> {
        match self {
            Model::Fts(m) => Some(m),
            Model::Lts(_) => None,
        }
    }

    pub fn to_dot(&self) -> String {
        match self {
            Model::Fts(m) => m.to_dot(),
            Model::Lts(m) => m.to_dot(),
        }
    }
}

/// Reference to a stored model version, optionally narrowed to one product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModelRef {
    pub model: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Configuration>,
}

impl ModelRef {
    pub fn new(model: impl Into<String>, version: impl Into<String>) -> Self {
        ModelRef {
            model: model.into(),
            version: version.into(),
            config: None,
        }
    }

    /// The product of this reference under `c`.
    pub fn at(&self, c: &Configuration) -> Self {
        ModelRef {
            config: Some(c.clone()),
            ..self.clone()
        }
    }

    pub fn with_version(&self, version: &str) -> Self {
        ModelRef {
            version: version.to_string(),
            ..self.clone()
        }
    }
}

impl fmt::Display for ModelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.model, self.version)?;
        if let Some(c) = &self.config {
            write!(f, "|{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModelStore {
    models: BTreeMap<(String, String), Model>,
}

impl ModelStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: &str, version: &str, model: Model) -> ModelRef {
        self.models
            .insert((id.to_string(), version.to_string()), model);
        ModelRef::new(id, version)
    }

    pub fn get(&self, id: &str, version: &str) -> Result<&Model, ModelError> {
        self.models
            .get(&(id.to_string(), version.to_string()))
            .ok_or_else(|| ModelError::Missing(id.to_string(), version.to_string()))
    }

    pub fn model(&self, r: &ModelRef) -> Result<&Model, ModelError> {
        self.get(&r.model, &r.version)
    }

    pub fn fts(&self, r: &ModelRef) -> Result<&Fts, ModelError> {
        match self.model(r)? {
            Model::Fts(m) => Ok(m),
            Model::Lts(_) => Err(ModelError::Malformed(format!(
                "{r} is not a product-line model"
            ))),
        }
    }

    /// The product a reference denotes: an LTS as stored, or an FTS derived
    /// under the reference's configuration.
    pub fn resolve_lts(&self, r: &ModelRef) -> Result<Lts, ModelError> {
        match (self.model(r)?, &r.config) {
            (Model::Lts(l), _) => Ok(l.clone()),
            (Model::Fts(m), Some(c)) => m.derive(&m.alphabet().project(c)),
            (Model::Fts(_), None) => Err(ModelError::NeedsConfiguration(r.model.clone())),
        }
    }

    /// Digest of what the reference denotes, so two references to equal
    /// products share a digest regardless of version tags.
    pub fn content_digest(&self, r: &ModelRef) -> Result<String, ModelError> {
        match (self.model(r)?, &r.config) {
            (Model::Fts(m), None) => Ok(format!("fts:{}", digest(m))),
            _ => Ok(format!("lts:{}", digest(&self.resolve_lts(r)?))),
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = &(String, String)> {
        self.models.keys()
    }
}
