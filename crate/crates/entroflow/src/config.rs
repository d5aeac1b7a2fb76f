//! Run configuration: a flat key-value text format with one section per
//! command.
//!
//! ```text
//! # comment lines start with '#'
//! [cycle]
//! partition = 2x2
//! n_cycles = 20
//! coupling = 1.0
//! ```
//!
//! The grammar is strict on purpose — a typo must never silently alter a
//! run. Section names outside the known command set, keys a command does
//! not understand, and duplicate keys or sections are all hard errors.
//! Comments occupy whole lines; values run to the end of the line with
//! surrounding whitespace trimmed.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tolerance::ToleranceSet;

/// The section names the tool understands, one per command.
pub const KNOWN_SECTIONS: [&str; 4] = ["lemmas", "cycle", "classical", "conserve"];

/// Keys every command section accepts on top of its own: the master seed
/// and the tolerance overrides.
pub const COMMON_KEYS: [&str; 8] = [
    "seed",
    "tol_herm",
    "tol_trace",
    "tol_unitary",
    "tol_psd",
    "tol_spec",
    "tol_conserve",
    "tol_entropy",
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// One `[name]` block of key-value pairs.
#[derive(Debug, Clone)]
pub struct Section {
    name: String,
    entries: BTreeMap<String, Entry>,
}

/// A parsed configuration file.
#[derive(Debug, Clone)]
pub struct ConfigFile {
    sections: BTreeMap<String, Section>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

impl ConfigFile {
    /// Parses configuration text, enforcing the structural rules.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, Section> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| invalid(format!("line {line_no}: unterminated section header")))?
                    .trim();
                if !KNOWN_SECTIONS.contains(&name) {
                    return Err(invalid(format!(
                        "line {line_no}: unknown section [{name}] (known: {})",
                        KNOWN_SECTIONS.join(", ")
                    )));
                }
                if sections.contains_key(name) {
                    return Err(invalid(format!("line {line_no}: duplicate section [{name}]")));
                }
                sections.insert(
                    name.to_string(),
                    Section { name: name.to_string(), entries: BTreeMap::new() },
                );
                current = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                invalid(format!("line {line_no}: expected `key = value`, got `{line}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(invalid(format!("line {line_no}: empty key")));
            }
            let section_name = current.as_ref().ok_or_else(|| {
                invalid(format!("line {line_no}: `{key}` appears before any [section]"))
            })?;
            let section = sections.get_mut(section_name).expect("current section exists");
            if section.entries.contains_key(key) {
                return Err(invalid(format!(
                    "line {line_no}: duplicate key `{key}` in [{section_name}]"
                )));
            }
            section
                .entries
                .insert(key.to_string(), Entry { value: value.to_string(), line: line_no });
        }
        Ok(Self { sections })
    }

    /// Reads and parses a configuration file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// The section for a command, or an error naming what is missing.
    pub fn section(&self, name: &str) -> Result<&Section> {
        self.sections.get(name).ok_or_else(|| invalid(format!("config has no [{name}] section")))
    }
}

impl Section {
    /// Rejects any key outside `allowed` plus the common keys.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (key, entry) in &self.entries {
            let known = allowed.contains(&key.as_str()) || COMMON_KEYS.contains(&key.as_str());
            if !known {
                return Err(invalid(format!(
                    "line {}: unknown key `{}` in [{}]",
                    entry.line, key, self.name
                )));
            }
        }
        Ok(())
    }

    /// Raw value of `key`, if present.
    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn parse_with<T>(
        &self,
        key: &str,
        kind: &str,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(entry) => parse(&entry.value).map(Some).ok_or_else(|| {
                invalid(format!(
                    "line {}: [{}] {} = `{}` is not a {kind}",
                    entry.line, self.name, key, entry.value
                ))
            }),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.parse_with(key, "non-negative integer", |v| v.parse().ok())
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.parse_with(key, "non-negative integer", |v| v.parse().ok())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, "decimal number", |v| v.parse().ok())
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.parse_with(key, "boolean (true/false)", |v| match v {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        })
    }

    /// A comma-separated list of positive integers.
    pub fn get_usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        self.parse_with(key, "comma-separated list of positive integers", |v| {
            v.split(',').map(|p| p.trim().parse().ok().filter(|&n: &usize| n > 0)).collect()
        })
    }

    /// The default tolerances with any `tol_*` keys applied on top.
    pub fn tolerances(&self) -> Result<ToleranceSet> {
        let mut tol = ToleranceSet::default();
        tol.herm = self.get_f64("tol_herm")?.unwrap_or(tol.herm);
        tol.trace = self.get_f64("tol_trace")?.unwrap_or(tol.trace);
        tol.unitary = self.get_f64("tol_unitary")?.unwrap_or(tol.unitary);
        tol.psd = self.get_f64("tol_psd")?.unwrap_or(tol.psd);
        tol.spec = self.get_f64("tol_spec")?.unwrap_or(tol.spec);
        tol.conserve = self.get_f64("tol_conserve")?.unwrap_or(tol.conserve);
        tol.entropy = self.get_f64("tol_entropy")?.unwrap_or(tol.entropy);
        tol.validate()?;
        Ok(tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_values() {
        let cfg = ConfigFile::parse(
            "# a comment\n\n[cycle]\npartition = 2x2\nn_cycles = 20\ncoupling = 1.0\n\n[lemmas]\nseed = 3\n",
        )
        .unwrap();
        let cycle = cfg.section("cycle").unwrap();
        assert_eq!(cycle.get_str("partition"), Some("2x2"));
        assert_eq!(cycle.get_usize("n_cycles").unwrap(), Some(20));
        assert_eq!(cycle.get_f64("coupling").unwrap(), Some(1.0));
        assert_eq!(cfg.section("lemmas").unwrap().get_u64("seed").unwrap(), Some(3));
    }

    #[test]
    fn structural_mistakes_are_hard_errors() {
        for (text, needle) in [
            ("[cylce]\n", "unknown section"),
            ("[cycle]\n[cycle]\n", "duplicate section"),
            ("[cycle]\nn_cycles = 1\nn_cycles = 2\n", "duplicate key"),
            ("n_cycles = 1\n", "before any [section]"),
            ("[cycle]\njust some words\n", "expected `key = value`"),
            ("[cycle\n", "unterminated"),
            ("[cycle]\n= 3\n", "empty key"),
        ] {
            let err = ConfigFile::parse(text).unwrap_err();
            assert!(
                err.to_string().contains(needle),
                "for {text:?} expected `{needle}` in `{err}`"
            );
        }
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_numbers() {
        let cfg = ConfigFile::parse("[cycle]\nn_cycles = 20\ncoupling_strenght = 1\n").unwrap();
        let err = cfg.section("cycle").unwrap().check_keys(&["n_cycles", "coupling"]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("coupling_strenght") && msg.contains("line 3"), "got: {msg}");
    }

    #[test]
    fn common_keys_pass_every_command_check() {
        let cfg = ConfigFile::parse("[conserve]\nseed = 7\ntol_conserve = 1e-10\n").unwrap();
        cfg.section("conserve").unwrap().check_keys(&["dims", "trials"]).unwrap();
    }

    #[test]
    fn typed_getters_diagnose_bad_values() {
        let cfg = ConfigFile::parse("[cycle]\nn_cycles = twenty\n").unwrap();
        let err = cfg.section("cycle").unwrap().get_usize("n_cycles").unwrap_err();
        assert!(err.to_string().contains("twenty"), "got: {err}");

        let cfg = ConfigFile::parse("[conserve]\ndims = 2,0,8\n").unwrap();
        assert!(cfg.section("conserve").unwrap().get_usize_list("dims").is_err());
    }

    #[test]
    fn tolerance_overrides_apply_and_validate() {
        let cfg = ConfigFile::parse("[cycle]\ntol_conserve = 1e-12\n").unwrap();
        let tol = cfg.section("cycle").unwrap().tolerances().unwrap();
        assert_eq!(tol.conserve, 1e-12);
        assert_eq!(tol.herm, ToleranceSet::default().herm);

        let cfg = ConfigFile::parse("[cycle]\ntol_psd = -1.0\n").unwrap();
        assert!(cfg.section("cycle").unwrap().tolerances().is_err());
    }

    #[test]
    fn missing_section_is_reported() {
        let cfg = ConfigFile::parse("[lemmas]\nseed = 1\n").unwrap();
        let err = cfg.section("cycle").unwrap_err();
        assert!(err.to_string().contains("[cycle]"));
    }
}
