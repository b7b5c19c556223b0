//! Builtin example diagrams, shipped as embedded `.lad` text.

use crate::diagram::{load, Diagram, DiagramError};

#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub text: &'static str,
}

impl CorpusEntry {
    /// Parses the embedded text. Builtin entries always load.
    pub fn diagram(&self) -> Diagram {
        load(self.text).unwrap_or_else(|e| panic!("builtin {} fails to load: {e}", self.name))
    }

    pub fn file_name(&self) -> String {
        format!("{}.lad", self.name)
    }
}

macro_rules! entry {
    ($name:literal) => {
        CorpusEntry {
            name: $name,
            text: include_str!(concat!("../corpus/", $name, ".lad")),
        }
    };
}

const ENTRIES: &[CorpusEntry] = &[
    entry!("fixed-vertex-T3"),
    entry!("inversion-T3"),
    entry!("lineal-T3"),
    entry!("horocyclic-T3"),
    entry!("focal-T3"),
    entry!("general-autT3"),
    entry!("u-s2-a3"),
    entry!("lineal-Z"),
    entry!("single-edge-inversion"),
];

pub fn all() -> &'static [CorpusEntry] {
    ENTRIES
}

/// Looks an entry up by name, with or without the `.lad` suffix.
pub fn get(name: &str) -> Option<&'static CorpusEntry> {
    let name = name.strip_suffix(".lad").unwrap_or(name);
    ENTRIES.iter().find(|e| e.name == name)
}

pub fn load_builtin(name: &str) -> Result<Diagram, DiagramError> {
    let entry = get(name).ok_or_else(|| DiagramError::Invalid(format!("no builtin `{name}`")))?;
    load(entry.text)
}
