//! JSON spec documents.
//!
//! ```json
//! {
//!   "kind": "single_egg",
//!   "migrant":  { "transitions": [{"const": 0.5}, {"const": 0.5}], "fecundities": [2.0] },
//!   "resident": { "transitions": [{"beverton_holt": {"b": 0.25, "c": 1.0}}, {"const": 0.2}],
//!                 "fecundities": [2.0] },
//!   "phi": 0.5
//! }
//! ```
//!
//! An `isolated` document carries exactly one population block, under
//! either `migrant` or `resident`. Unknown keys, and allocation keys that do
//! not belong to the declared kind, are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::spec::{IsolatedSpec, ModelSpec, SingleEggSpec, TwoEggSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Kind {
    Isolated,
    SingleEgg,
    TwoEgg,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    migrant: Option<IsolatedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resident: Option<IsolatedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi_r: Option<f64>,
}

fn require<T>(value: Option<T>, key: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| Error::SpecFormat(format!("`{kind}` spec requires `{key}`")))
}

fn forbid<T>(value: &Option<T>, key: &str, kind: &str) -> Result<()> {
    match value {
        Some(_) => Err(Error::SpecFormat(format!(
            "`{key}` is not allowed in a `{kind}` spec"
        ))),
        None => Ok(()),
    }
}

impl TryFrom<SpecDocument> for ModelSpec {
    type Error = Error;

    fn try_from(doc: SpecDocument) -> Result<Self> {
        match doc.kind {
            Kind::Isolated => {
                forbid(&doc.phi, "phi", "isolated")?;
                forbid(&doc.phi_s, "phi_s", "isolated")?;
                forbid(&doc.phi_r, "phi_r", "isolated")?;
                match (doc.migrant, doc.resident) {
                    (Some(p), None) | (None, Some(p)) => Ok(ModelSpec::Isolated(p)),
                    _ => Err(Error::SpecFormat(
                        "`isolated` spec requires exactly one of `migrant` or `resident`".into(),
                    )),
                }
            }
            Kind::SingleEgg => {
                forbid(&doc.phi_s, "phi_s", "single_egg")?;
                forbid(&doc.phi_r, "phi_r", "single_egg")?;
                Ok(ModelSpec::SingleEgg(SingleEggSpec {
                    migrant: require(doc.migrant, "migrant", "single_egg")?,
                    resident: require(doc.resident, "resident", "single_egg")?,
                    phi: require(doc.phi, "phi", "single_egg")?,
                }))
            }
            Kind::TwoEgg => {
                forbid(&doc.phi, "phi", "two_egg")?;
                Ok(ModelSpec::TwoEgg(TwoEggSpec {
                    migrant: require(doc.migrant, "migrant", "two_egg")?,
                    resident: require(doc.resident, "resident", "two_egg")?,
                    phi_s: require(doc.phi_s, "phi_s", "two_egg")?,
                    phi_r: require(doc.phi_r, "phi_r", "two_egg")?,
                }))
            }
        }
    }
}

impl From<&ModelSpec> for SpecDocument {
    fn from(spec: &ModelSpec) -> Self {
        let mut doc = SpecDocument {
            kind: Kind::Isolated,
            migrant: None,
            resident: None,
            phi: None,
            phi_s: None,
            phi_r: None,
        };
        match spec {
            ModelSpec::Isolated(s) => doc.migrant = Some(s.clone()),
            ModelSpec::SingleEgg(s) => {
                doc.kind = Kind::SingleEgg;
                doc.migrant = Some(s.migrant.clone());
                doc.resident = Some(s.resident.clone());
                doc.phi = Some(s.phi);
            }
            ModelSpec::TwoEgg(s) => {
                doc.kind = Kind::TwoEgg;
                doc.migrant = Some(s.migrant.clone());
                doc.resident = Some(s.resident.clone());
                doc.phi_s = Some(s.phi_s);
                doc.phi_r = Some(s.phi_r);
            }
        }
        doc
    }
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecDocument::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = SpecDocument::deserialize(d)?;
        ModelSpec::try_from(doc).map_err(serde::de::Error::custom)
    }
}

impl ModelSpec {
    /// Parses a spec document. Structural parsing only; call
    /// [`ModelSpec::validate`] for the model invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SpecFormat(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::SpecFormat(msg) => Error::SpecFormat(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialisation cannot fail")
    }

    /// SHA-256 of the compact canonical serialisation, hex encoded.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serialisation cannot fail");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
