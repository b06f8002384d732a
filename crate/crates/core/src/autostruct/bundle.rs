//! On-disk bundles: a manifest plus one automaton file per component.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::AutomaticStructure;
use crate::automata::{AutomatonJson, Fsa, PairFsa};
use crate::error::{Error, Result};
use crate::words::Alphabet;

pub const MANIFEST: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub alphabet: Vec<String>,
    pub unique_reps: bool,
    #[serde(default)]
    pub geodesic: bool,
    pub word_acceptor: String,
    /// Letter (as written, e.g. `a^-1`) to multiplier file.
    pub multipliers: BTreeMap<String, String>,
    pub equality: String,
}

fn invalid(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::StructureInvalid(format!("{}: {e}", path.display()))
}

fn read_automaton(path: &Path) -> Result<AutomatonJson> {
    let text = fs::read_to_string(path).map_err(|e| invalid(path, e))?;
    serde_json::from_str(&text).map_err(|e| invalid(path, e))
}

fn file_name(letter: &str) -> String {
    format!("M_{}.json", letter.replace("^-1", "_inv"))
}

impl AutomaticStructure {
    /// Loads a bundle from its manifest file or from a directory holding
    /// `manifest.json`. Component paths are relative to the manifest.
    pub fn load(path: &Path) -> Result<Self> {
        let manifest_path: PathBuf = if path.is_dir() { path.join(MANIFEST) } else { path.to_path_buf() };
        let dir = manifest_path.parent().map(Path::to_path_buf).unwrap_or_default();
        let text = fs::read_to_string(&manifest_path).map_err(|e| invalid(&manifest_path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| invalid(&manifest_path, e))?;
        let alphabet = Alphabet::new(manifest.alphabet.iter().map(String::as_str))
            .map_err(|e| invalid(&manifest_path, e))?;
        let acceptor_path = dir.join(&manifest.word_acceptor);
        let acceptor = Fsa::from_json(&read_automaton(&acceptor_path)?, Some(&alphabet))
            .map_err(|e| invalid(&acceptor_path, e))?;
        let mut multipliers = Vec::with_capacity(alphabet.num_letters());
        for x in alphabet.letters() {
            let name = alphabet.format_letter(x);
            let file = manifest
                .multipliers
                .get(&name)
                .ok_or_else(|| invalid(&manifest_path, format!("no multiplier for {name}")))?;
            let p = dir.join(file);
            multipliers.push(PairFsa::from_json(&read_automaton(&p)?, Some(&alphabet)).map_err(|e| invalid(&p, e))?);
        }
        let eq_path = dir.join(&manifest.equality);
        let equality =
            PairFsa::from_json(&read_automaton(&eq_path)?, Some(&alphabet)).map_err(|e| invalid(&eq_path, e))?;
        AutomaticStructure::new(alphabet, acceptor, multipliers, equality, manifest.unique_reps, manifest.geodesic)
    }

    /// Writes the bundle into `dir` and returns the manifest path.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let write = |name: &str, json: &AutomatonJson| -> Result<()> {
            fs::write(dir.join(name), serde_json::to_string_pretty(json)?)?;
            Ok(())
        };
        write("L.json", &self.word_acceptor.to_json())?;
        write("M_eps.json", &self.equality.to_json())?;
        let mut multipliers = BTreeMap::new();
        for x in self.alphabet.letters() {
            let name = self.alphabet.format_letter(x);
            let file = file_name(&name);
            write(&file, &self.multiplier(x).to_json())?;
            multipliers.insert(name, file);
        }
        let manifest = Manifest {
            alphabet: self.alphabet.names().to_vec(),
            unique_reps: self.unique_reps,
            geodesic: self.geodesic,
            word_acceptor: "L.json".into(),
            multipliers,
            equality: "M_eps.json".into(),
        };
        let path = dir.join(MANIFEST);
        fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autostruct::builtin_from_spec;

    #[test]
    fn save_and_load() {
        let s = builtin_from_spec("builtin:abelian(a,b)*free(t)").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = s.save(dir.path()).unwrap();
        let back = AutomaticStructure::load(dir.path()).unwrap();
        assert!(back.family().is_none());
        assert!(back.word_acceptor().language_eq(s.word_acceptor()).unwrap());
        let w = s.alphabet().parse_word("t*b*a").unwrap();
        assert_eq!(back.representative(&w).unwrap(), s.representative(&w).unwrap());
        assert!(back.validate(3).is_ok());

        fs::remove_file(dir.path().join("M_a_inv.json")).unwrap();
        assert!(matches!(AutomaticStructure::load(&manifest), Err(Error::StructureInvalid(_))));
    }
}
