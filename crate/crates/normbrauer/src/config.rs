//! Input parsing: job configuration, ramified-place files, and local
//! invariant files, all in TOML.
//!
//! Job config:
//! ```toml
//! # Optional: a label for the right-hand side a of the norm equation.
//! # The computed groups do not depend on it; it is echoed in reports.
//! a_label = "a"
//!
//! [group]
//! kind = "cyclic_product"          # or "permutation" or "table"
//! orders = [2, 2]                  # cyclic_product: generators g0, g1, ...
//! # kind = "permutation":
//! # degree = 4
//! # [[group.generators]] with name = "r", images = [1, 2, 3, 0]
//! # kind = "table":
//! # table = [[0,1],[1,0]]          # row-major multiplication table
//! # generator_names = { s = 1 }
//!
//! [k]
//! generators = ["g0"]              # words in the named generators
//!
//! [[factors]]
//! label = "K1"
//! generators = ["g1"]
//! ```
//!
//! Ramified-place file: `[[places]]` with `label` and `generators` (words
//! generating a decomposition group).
//!
//! Invariant file: `[[entries]]` with `place`, `index`, `numerator`,
//! `denominator`; indices per place must cover 0..count contiguously.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Deserialize;
use thiserror::Error;

use crate::global::RamifiedPlace;
use crate::group::{build_group, subgroup_closure, FiniteGroup, GroupError, GroupSpec, Subgroup};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("group construction failed: {0}")]
    Group(#[from] GroupError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSection {
    kind: String,
    orders: Option<Vec<usize>>,
    degree: Option<usize>,
    generators: Option<Vec<PermGenerator>>,
    table: Option<Vec<Vec<usize>>>,
    generator_names: Option<BTreeMap<String, usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PermGenerator {
    name: String,
    images: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubfieldSection {
    generators: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorSection {
    label: String,
    generators: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobConfigFile {
    a_label: Option<String>,
    group: GroupSection,
    k: SubfieldSection,
    factors: Vec<FactorSection>,
}

/// A fully resolved job: the Galois group with the distinguished subgroups.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub group: FiniteGroup,
    pub gk: Subgroup,
    pub factors: Vec<(String, Subgroup)>,
    pub a_label: Option<String>,
}

fn group_spec(section: GroupSection) -> Result<GroupSpec, ConfigError> {
    match section.kind.as_str() {
        "cyclic_product" => {
            let orders = section
                .orders
                .ok_or_else(|| ConfigError::Invalid("cyclic_product requires `orders`".into()))?;
            Ok(GroupSpec::CyclicProduct { orders })
        }
        "permutation" => {
            let degree = section
                .degree
                .ok_or_else(|| ConfigError::Invalid("permutation requires `degree`".into()))?;
            let generators = section
                .generators
                .ok_or_else(|| ConfigError::Invalid("permutation requires `generators`".into()))?
                .into_iter()
                .map(|g| (g.name, g.images))
                .collect();
            Ok(GroupSpec::Permutations { degree, generators })
        }
        "table" => {
            let table = section
                .table
                .ok_or_else(|| ConfigError::Invalid("table requires `table`".into()))?;
            Ok(GroupSpec::Table {
                table,
                generator_names: section.generator_names.unwrap_or_default(),
            })
        }
        other => Err(ConfigError::Invalid(format!("unknown group kind `{other}`"))),
    }
}

fn closure_from_words(
    group: &FiniteGroup,
    words: &[String],
) -> Result<Subgroup, ConfigError> {
    let mut elems = Vec::with_capacity(words.len());
    for w in words {
        elems.push(group.resolve_word(w)?);
    }
    Ok(subgroup_closure(group, &elems))
}

pub fn parse_job_config(text: &str) -> Result<JobConfig, ConfigError> {
    let file: JobConfigFile = toml::from_str(text)?;
    if file.factors.is_empty() {
        return Err(ConfigError::Invalid("at least one factor is required".into()));
    }
    let group = build_group(&group_spec(file.group)?)?;
    let gk = closure_from_words(&group, &file.k.generators)?;
    let mut factors = Vec::with_capacity(file.factors.len());
    for f in &file.factors {
        factors.push((f.label.clone(), closure_from_words(&group, &f.generators)?));
    }
    Ok(JobConfig { group, gk, factors, a_label: file.a_label })
}

fn read(path: &str) -> Result<String, ConfigError> {
    std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.to_string(), source })
}

pub fn load_job_config(path: &str) -> Result<JobConfig, ConfigError> {
    parse_job_config(&read(path)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaceSection {
    label: String,
    generators: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RamifiedFile {
    places: Vec<PlaceSection>,
}

pub fn parse_ramified(text: &str, group: &FiniteGroup) -> Result<Vec<RamifiedPlace>, ConfigError> {
    let file: RamifiedFile = toml::from_str(text)?;
    let mut places = Vec::with_capacity(file.places.len());
    for p in &file.places {
        places.push(RamifiedPlace {
            label: p.label.clone(),
            decomposition: closure_from_words(group, &p.generators)?,
        });
    }
    Ok(places)
}

pub fn load_ramified(path: &str, group: &FiniteGroup) -> Result<Vec<RamifiedPlace>, ConfigError> {
    parse_ramified(&read(path)?, group)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantEntry {
    place: String,
    index: usize,
    numerator: i64,
    denominator: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantFile {
    entries: Vec<InvariantEntry>,
}

pub fn parse_invariants(text: &str) -> Result<Vec<(String, Vec<BigRational>)>, ConfigError> {
    let file: InvariantFile = toml::from_str(text)?;
    let mut by_place: Vec<(String, Vec<Option<BigRational>>)> = Vec::new();
    for e in &file.entries {
        if e.denominator == 0 {
            return Err(ConfigError::Invalid(format!(
                "zero denominator at place {}, index {}",
                e.place, e.index
            )));
        }
        let row = match by_place.iter_mut().find(|(l, _)| *l == e.place) {
            Some((_, row)) => row,
            None => {
                by_place.push((e.place.clone(), Vec::new()));
                &mut by_place.last_mut().unwrap().1
            }
        };
        if row.len() <= e.index {
            row.resize(e.index + 1, None);
        }
        if row[e.index].is_some() {
            return Err(ConfigError::Invalid(format!(
                "duplicate entry for place {}, index {}",
                e.place, e.index
            )));
        }
        row[e.index] = Some(BigRational::new(
            BigInt::from(e.numerator),
            BigInt::from(e.denominator),
        ));
    }
    let mut out = Vec::with_capacity(by_place.len());
    for (label, row) in by_place {
        let mut full = Vec::with_capacity(row.len());
        for (i, v) in row.into_iter().enumerate() {
            match v {
                Some(v) => full.push(v),
                None => {
                    return Err(ConfigError::Invalid(format!(
                        "place {label} is missing an entry for index {i}"
                    )))
                }
            }
        }
        out.push((label, full));
    }
    Ok(out)
}

pub fn load_invariants(path: &str) -> Result<Vec<(String, Vec<BigRational>)>, ConfigError> {
    parse_invariants(&read(path)?)
}
