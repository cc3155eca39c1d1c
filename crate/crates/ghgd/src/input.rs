//! Ingestion of element-list files.
//!
//! Each file carries one identifier per line. Lines are trimmed; empty
//! lines and lines starting with `#` are skipped; duplicates within a file
//! are dropped with a warning. Identifiers are case-sensitive unless case
//! folding is requested.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::problem::{LOHistogram, ProblemSpec};

/// Where the universe comes from: a bare size, or a file enumerating every
/// element.
#[derive(Debug, Clone)]
pub enum UniverseSpec {
    Size(u64),
    File(PathBuf),
}

/// Parsed element lists with a resolved universe size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementLists {
    names: Vec<String>,
    lists: Vec<Vec<String>>,
    n: u64,
}

/// Ingestion result: the lists plus any per-file warnings.
#[derive(Debug)]
pub struct Ingested {
    pub lists: ElementLists,
    pub warnings: Vec<String>,
}

/// Reads every list, resolves the universe, and cross-validates.
pub fn ingest(paths: &[PathBuf], universe: &UniverseSpec, fold_case: bool) -> Result<Ingested> {
    if paths.is_empty() {
        return Err(Error::Input("no element lists given".into()));
    }
    let mut warnings = Vec::new();
    let mut lists = Vec::new();
    let mut names = Vec::new();
    for path in paths {
        lists.push(read_id_file(path, fold_case, &mut warnings)?);
        names.push(path.display().to_string());
    }

    let mut distinct: HashSet<&str> = HashSet::new();
    for list in &lists {
        distinct.extend(list.iter().map(String::as_str));
    }

    let n = match universe {
        UniverseSpec::Size(n) => {
            if (distinct.len() as u64) > *n {
                return Err(Error::Input(format!(
                    "lists contain {} distinct identifiers, more than the universe size {n}",
                    distinct.len()
                )));
            }
            *n
        }
        UniverseSpec::File(path) => {
            let members = read_id_file(path, fold_case, &mut warnings)?;
            let universe_set: HashSet<&str> = members.iter().map(String::as_str).collect();
            for (name, list) in paths.iter().zip(&lists) {
                let unknown: Vec<&str> = list
                    .iter()
                    .map(String::as_str)
                    .filter(|id| !universe_set.contains(id))
                    .collect();
                if !unknown.is_empty() {
                    let shown = unknown[..unknown.len().min(5)].join(", ");
                    let noun = if unknown.len() == 1 {
                        "identifier"
                    } else {
                        "identifiers"
                    };
                    return Err(Error::Input(format!(
                        "{}: {} {noun} not in the universe (e.g. {shown})",
                        name.display(),
                        unknown.len()
                    )));
                }
            }
            universe_set.len() as u64
        }
    };

    let lists = ElementLists { names, lists, n };
    lists.problem_spec()?; // surfaces size violations early
    Ok(Ingested { lists, warnings })
}

fn read_id_file(path: &Path, fold_case: bool, warnings: &mut Vec<String>) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut seen = HashSet::new();
    let mut ids = Vec::new();
    for line in text.lines() {
        let id = line.trim();
        if id.is_empty() || id.starts_with('#') {
            continue;
        }
        let id = if fold_case {
            id.to_lowercase()
        } else {
            id.to_string()
        };
        if seen.insert(id.clone()) {
            ids.push(id);
        } else {
            warnings.push(format!(
                "{}: duplicate identifier `{id}` ignored",
                path.display()
            ));
        }
    }
    Ok(ids)
}

impl ElementLists {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lists(&self) -> &[Vec<String>] {
        &self.lists
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The problem these lists instantiate.
    pub fn problem_spec(&self) -> Result<ProblemSpec> {
        ProblemSpec::new(self.n, self.lists.iter().map(|l| l.len() as u64).collect())
    }

    /// Observed per-level histogram: how many universe elements appear in
    /// exactly `t` of the lists, for `t = 0..=T`.
    pub fn observed_lo_counts(&self) -> LOHistogram {
        let mut level: HashMap<&str, usize> = HashMap::new();
        for list in &self.lists {
            for id in list {
                *level.entry(id.as_str()).or_insert(0) += 1;
            }
        }
        let mut counts = vec![0u64; self.lists.len() + 1];
        for t in level.values() {
            counts[*t] += 1;
        }
        counts[0] = self.n - level.len() as u64;
        LOHistogram::new(counts).expect("histogram is non-empty")
    }
}
