use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GeneratingSet, TailBound};
use crate::error::{Error, Result};
use crate::words::Alphabet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenSetKind {
    Explicit,
    Family,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRef {
    pub name: String,
    #[serde(default = "empty_object")]
    pub params: serde_json::Value,
}

fn empty_object() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailDoc {
    #[serde(rename = "C")]
    pub c: f64,
    pub rho: f64,
    #[serde(rename = "N0")]
    pub n0: usize,
}

impl From<TailBound> for TailDoc {
    fn from(t: TailBound) -> Self {
        Self {
            c: t.c,
            rho: t.rho,
            n0: t.n0,
        }
    }
}

/// On-disk JSON description of a generating set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSetDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    pub kind: GenSetKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailDoc>,
}

impl GenSetDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn build(&self) -> Result<GeneratingSet> {
        match self.kind {
            GenSetKind::Explicit => {
                if self.family.is_some() {
                    return Err(Error::Format("family: not allowed for explicit sets".into()));
                }
                if self.tail.is_some() {
                    return Err(Error::Format("tail: explicit sets omit the tail".into()));
                }
                let tokens = self
                    .alphabet
                    .clone()
                    .ok_or_else(|| Error::Format("alphabet: required for explicit sets".into()))?;
                let alphabet =
                    Alphabet::new(tokens).map_err(|e| Error::Format(format!("alphabet: {e}")))?;
                let words = self
                    .words
                    .as_ref()
                    .ok_or_else(|| Error::Format("words: required for explicit sets".into()))?;
                let parsed = words
                    .iter()
                    .map(|w| alphabet.parse(w))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| Error::Format(format!("words: {e}")))?;
                GeneratingSet::explicit(alphabet, parsed)
            }
            GenSetKind::Family => {
                if self.words.is_some() {
                    return Err(Error::Format("words: not allowed for family sets".into()));
                }
                let fam = self
                    .family
                    .as_ref()
                    .ok_or_else(|| Error::Format("family: required for family sets".into()))?;
                let family = crate::families::family(&fam.name, &fam.params)?;
                if let Some(tokens) = &self.alphabet {
                    if tokens.as_slice() != family.alphabet().tokens() {
                        return Err(Error::Format(format!(
                            "alphabet: {tokens:?} does not match family alphabet {:?}",
                            family.alphabet().tokens()
                        )));
                    }
                }
                let tail = self
                    .tail
                    .map(|t| TailBound::new(t.c, t.rho, t.n0))
                    .transpose()
                    .map_err(|e| Error::Format(format!("tail: {e}")))?;
                GeneratingSet::from_arc(family, tail)
            }
        }
    }
}

impl GeneratingSet {
    pub fn from_json(text: &str) -> Result<Self> {
        GenSetDocument::from_json(text)?.build()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
