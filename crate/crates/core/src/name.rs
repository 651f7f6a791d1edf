//! Dot-separated hierarchical names shared by modules, declarations, and
//! namespaces.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sentinel namespace for dotless declaration names.
pub const ROOT_NAMESPACE: &str = "_root_";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NameError {
    #[error("empty name")]
    Empty,
    #[error("empty component in name {0:?}")]
    EmptyComponent(String),
}

/// A nonempty dot-separated identifier sequence such as
/// `Mathlib.Algebra.Group.Defs`.
///
/// Components are opaque byte strings; no unicode normalization is applied.
/// The depth of a name is its component count (`Mathlib.Init` has depth 2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct DottedName {
    raw: Box<str>,
}

impl DottedName {
    pub fn parse(s: &str) -> Result<Self, NameError> {
        if s.is_empty() {
            return Err(NameError::Empty);
        }
        if s.split('.').any(str::is_empty) {
            return Err(NameError::EmptyComponent(s.to_owned()));
        }
        Ok(DottedName { raw: s.into() })
    }

    /// The root-namespace sentinel used by namespace truncation.
    pub fn root() -> Self {
        DottedName {
            raw: ROOT_NAMESPACE.into(),
        }
    }

    pub fn is_root(&self) -> bool {
        &*self.raw == ROOT_NAMESPACE
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    pub fn components(&self) -> impl Iterator<Item = &str> {
        self.raw.split('.')
    }

    /// Component count; always at least 1.
    pub fn depth(&self) -> usize {
        self.raw.bytes().filter(|&b| b == b'.').count() + 1
    }

    /// The first `k` components, or the whole name when it has fewer.
    pub fn truncated(&self, k: usize) -> DottedName {
        debug_assert!(k >= 1);
        let mut end = self.raw.len();
        let mut seen = 0usize;
        for (i, b) in self.raw.bytes().enumerate() {
            if b == b'.' {
                seen += 1;
                if seen == k {
                    end = i;
                    break;
                }
            }
        }
        DottedName {
            raw: self.raw[..end].into(),
        }
    }

    /// The name with its last component removed; `None` for dotless names.
    pub fn parent(&self) -> Option<DottedName> {
        let cut = self.raw.rfind('.')?;
        Some(DottedName {
            raw: self.raw[..cut].into(),
        })
    }

    /// The leading component (`Mathlib` for `Mathlib.Algebra.Group`).
    pub fn first_component(&self) -> &str {
        self.raw.split('.').next().expect("nonempty name")
    }
}

impl fmt::Display for DottedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

impl TryFrom<String> for DottedName {
    type Error = NameError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        DottedName::parse(&value)
    }
}

impl From<DottedName> for String {
    fn from(value: DottedName) -> Self {
        value.raw.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reports_depth() {
        let n = DottedName::parse("Mathlib.Algebra.Group.Defs").unwrap();
        assert_eq!(n.depth(), 4);
        assert_eq!(n.first_component(), "Mathlib");
        assert_eq!(n.components().count(), 4);
        assert_eq!(DottedName::parse("Mathlib").unwrap().depth(), 1);
    }

    #[test]
    fn rejects_malformed_names() {
        assert_eq!(DottedName::parse(""), Err(NameError::Empty));
        assert!(matches!(
            DottedName::parse("a..b"),
            Err(NameError::EmptyComponent(_))
        ));
        assert!(matches!(
            DottedName::parse(".a"),
            Err(NameError::EmptyComponent(_))
        ));
        assert!(matches!(
            DottedName::parse("a."),
            Err(NameError::EmptyComponent(_))
        ));
    }

    #[test]
    fn truncation_takes_prefixes() {
        let n = DottedName::parse("Mathlib.Algebra.Group.Defs").unwrap();
        assert_eq!(n.truncated(2).as_str(), "Mathlib.Algebra");
        assert_eq!(n.truncated(4).as_str(), "Mathlib.Algebra.Group.Defs");
        assert_eq!(n.truncated(9).as_str(), "Mathlib.Algebra.Group.Defs");
        assert_eq!(n.parent().unwrap().as_str(), "Mathlib.Algebra.Group");
        assert_eq!(DottedName::parse("Init").unwrap().parent(), None);
    }
}
