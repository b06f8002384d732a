//! JSON presentation files, optionally carrying abelian peripherals.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Peripheral, PeripheralStructure};
use crate::words::{Alphabet, Presentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralFile {
    pub name: String,
    pub rank: usize,
    pub alphabet: Vec<String>,
    /// Peripheral letter to its image, a word over the group's alphabet.
    pub embedding: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub relators: Vec<String>,
    #[serde(default)]
    pub peripherals: Vec<PeripheralFile>,
}

impl PresentationFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })
    }

    /// The presentation and its validated peripheral structure.
    pub fn build(&self) -> Result<(Presentation, PeripheralStructure)> {
        let alphabet = Alphabet::new(self.alphabet.iter().map(String::as_str))?;
        let presentation = Presentation::parse(alphabet.clone(), &self.relators)?;
        let mut peripherals = Vec::new();
        for p in &self.peripherals {
            if p.rank != p.alphabet.len() {
                return Err(Error::Dimension { expected: p.rank, found: p.alphabet.len() });
            }
            let local = Alphabet::new(p.alphabet.iter().map(String::as_str))?;
            let mut embedding = Vec::new();
            for name in &p.alphabet {
                let image = p
                    .embedding
                    .get(name)
                    .ok_or_else(|| Error::Malformed(format!("peripheral {} has no image for {name}", p.name)))?;
                embedding.push(alphabet.parse_word(image)?);
            }
            peripherals.push(Peripheral::new(p.name.clone(), local, embedding)?);
        }
        let structure = PeripheralStructure { peripherals };
        structure.validate(&alphabet)?;
        Ok((presentation, structure))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_peripherals() {
        let text = r#"{"alphabet":["a","b","t"],"relators":["a*b*a^-1*b^-1"],
            "peripherals":[{"name":"P1","rank":2,"alphabet":["a","b"],"embedding":{"a":"a","b":"b"}}]}"#;
        let (p, s) = PresentationFile::parse(text).unwrap().build().unwrap();
        assert_eq!(p.relators().len(), 1);
        assert_eq!(s.peripherals[0].rank(), 2);
        assert!(PresentationFile::parse("{\"alphabet\":").is_err());
        let bad = r#"{"alphabet":["a"],"peripherals":[{"name":"P","rank":2,"alphabet":["x"],"embedding":{}}]}"#;
        assert!(PresentationFile::parse(bad).unwrap().build().is_err());
    }
}
