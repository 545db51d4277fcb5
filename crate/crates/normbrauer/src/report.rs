//! Orchestration and reporting: run the full pipeline on a resolved job
//! and emit text or machine-readable (JSON) reports.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comb::{brauer_group, compose_prime_parts, BrauerGroupResult};
use crate::config::JobConfig;
use crate::gamma::{compute_gamma, GammaTable};
use crate::global::{brauer_manin_pairing, c_arith, GlobalError, RamifiedPlace};
use crate::oracle::{character_lattice, sha2_cycl, OracleError, DEFAULT_ORACLE_BUDGET};
use crate::tower::{prime_power_parts, TowerError, TowerSetup};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(
        "oracle mismatch at p = {prime}: combinatorial invariant factors {combinatorial:?}, \
         cohomological {cohomological:?}"
    )]
    OracleMismatch { prime: u64, combinatorial: Vec<u64>, cohomological: Vec<u64> },
    #[error("oracle budget exceeded: {0}")]
    Budget(OracleError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 2,
            RunError::OracleMismatch { .. } => 3,
            RunError::Budget(_) => 4,
        }
    }
}

impl From<TowerError> for RunError {
    fn from(e: TowerError) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<GlobalError> for RunError {
    fn from(e: GlobalError) -> Self {
        RunError::Input(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub oracle: bool,
    pub oracle_budget: usize,
    pub ramified: Option<Vec<RamifiedPlace>>,
    pub invariants: Option<Vec<(String, Vec<BigRational>)>>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            oracle: false,
            oracle_budget: DEFAULT_ORACLE_BUDGET,
            ramified: None,
            invariants: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorReport {
    pub values: Vec<u64>,
    pub moduli: Vec<u64>,
    pub expression: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub invariant_factors: Vec<u64>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartReport {
    pub prime: u64,
    pub n: usize,
    pub e_hat: usize,
    /// `e_table[i][m]` = e_i(m) for m = 0..n.
    pub e_table: Vec<Vec<usize>>,
    /// Factor indices grouped by e_i(n), ascending.
    pub blocks: Vec<(usize, Vec<usize>)>,
    pub factor_labels: Vec<String>,
    /// `gamma_sets[i][m-1]` = sorted conjugacy-class ids in Γᵢᵐ.
    pub gamma_sets: Vec<Vec<Vec<usize>>>,
    /// Pairwise constraint levels m_{ij}.
    pub gamma_levels: Vec<Vec<usize>>,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<GeneratorReport>,
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalPartReport {
    pub prime: u64,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<GeneratorReport>,
    /// Pairing values of the generators against the supplied invariants,
    /// as reduced fractions "num/den" in [0, 1).
    pub pairing_values: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalReport {
    pub place_labels: Vec<String>,
    pub parts: Vec<GlobalPartReport>,
    pub composed_invariant_factors: Vec<u64>,
    /// Present when an invariant file was supplied: true iff the pairing is
    /// nonzero on some generator.
    pub obstruction: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    /// Echo of the optional right-hand-side label; the computed groups are
    /// independent of the actual value of a.
    pub a_label: Option<String>,
    pub parts: Vec<PartReport>,
    pub composed_invariant_factors: Vec<u64>,
    pub global: Option<GlobalReport>,
}

fn small_factors(result: &BrauerGroupResult) -> Vec<u64> {
    result
        .invariant_factors
        .iter()
        .map(|f| f.to_u64().expect("invariant factor exceeds u64"))
        .collect()
}

fn generator_reports(result: &BrauerGroupResult) -> Vec<GeneratorReport> {
    result
        .generators
        .iter()
        .map(|g| GeneratorReport {
            values: g.cmap.values.clone(),
            moduli: g.cmap.moduli.clone(),
            expression: g.expression.render(),
        })
        .collect()
}

fn part_report(
    setup: &TowerSetup,
    gamma: &GammaTable,
    result: &BrauerGroupResult,
    oracle: Option<OracleReport>,
) -> PartReport {
    PartReport {
        prime: setup.p as u64,
        n: setup.n,
        e_hat: setup.e_hat,
        e_table: setup.e.clone(),
        blocks: setup.blocks.iter().map(|(k, v)| (*k, v.clone())).collect(),
        factor_labels: setup.factor_labels.clone(),
        gamma_sets: gamma
            .gamma
            .iter()
            .map(|per_i| per_i.iter().map(|s| s.iter().copied().collect()).collect())
            .collect(),
        gamma_levels: gamma.levels.clone(),
        invariant_factors: small_factors(result),
        generators: generator_reports(result),
        oracle,
    }
}

pub fn run(job: &JobConfig, opts: &RunOptions) -> Result<Report, RunError> {
    let parts = prime_power_parts(&job.group, &job.gk, &job.factors)?;

    let mut part_reports = Vec::new();
    let mut results = Vec::new();
    let mut global_parts = Vec::new();
    let mut arith_results = Vec::new();
    for (p, setup) in &parts {
        let gamma = compute_gamma(setup);
        let result = brauer_group(setup, &gamma);

        let oracle = if opts.oracle {
            let lattice = character_lattice(&setup.group, &setup.gk, &setup.factors);
            let sha = sha2_cycl(&setup.group, &lattice, opts.oracle_budget)
                .map_err(RunError::Budget)?;
            let cohomological: Vec<u64> = sha
                .invariant_factors
                .iter()
                .map(|f| f.to_u64().expect("invariant factor exceeds u64"))
                .collect();
            let combinatorial = small_factors(&result);
            if combinatorial != cohomological {
                return Err(RunError::OracleMismatch {
                    prime: *p as u64,
                    combinatorial,
                    cohomological,
                });
            }
            Some(OracleReport { invariant_factors: cohomological, verdict: "MATCH".into() })
        } else {
            None
        };

        if let Some(places) = &opts.ramified {
            let arith = c_arith(setup, &gamma, places);
            let pairing_values = match &opts.invariants {
                Some(inv) => {
                    let mut vals = Vec::new();
                    for g in &arith.generators {
                        let v = brauer_manin_pairing(&g.cmap, inv)?;
                        vals.push(format!("{}/{}", v.numer(), v.denom()));
                    }
                    Some(vals)
                }
                None => None,
            };
            global_parts.push(GlobalPartReport {
                prime: *p as u64,
                invariant_factors: small_factors(&arith),
                generators: generator_reports(&arith),
                pairing_values,
            });
            arith_results.push((*p, arith));
        }

        part_reports.push(part_report(setup, &gamma, &result, oracle));
        results.push((*p, result));
    }

    let composed = compose_prime_parts(&results);

    let global = match &opts.ramified {
        Some(places) => {
            let obstruction = if opts.invariants.is_some() {
                let mut any = false;
                for gp in &global_parts {
                    if let Some(vals) = &gp.pairing_values {
                        any |= vals.iter().any(|v| v != "0/1");
                    }
                }
                Some(any)
            } else {
                None
            };
            let composed_arith = compose_prime_parts(&arith_results);
            Some(GlobalReport {
                place_labels: places.iter().map(|p| p.label.clone()).collect(),
                parts: global_parts,
                composed_invariant_factors: small_factors(&composed_arith),
                obstruction,
            })
        }
        None => None,
    };

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        a_label: job.a_label.clone(),
        parts: part_reports,
        composed_invariant_factors: small_factors(&composed),
        global,
    })
}

fn render_group(factors: &[u64]) -> String {
    if factors.is_empty() {
        "trivial".to_string()
    } else {
        factors.iter().map(|f| format!("Z/{f}")).collect::<Vec<_>>().join(" x ")
    }
}

pub fn emit_machine(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

pub fn parse_machine(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn emit_text(report: &Report) -> String {
    let mut out = String::new();
    let push = |out: &mut String, s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    if let Some(a) = &report.a_label {
        push(&mut out, format!(
            "Right-hand side: {a} (the computed groups do not depend on its value)"
        ));
    }
    for part in &report.parts {
        push(&mut out, format!("=== prime p = {} (n = {}, e^ = {}) ===", part.prime, part.n, part.e_hat));
        for (i, label) in part.factor_labels.iter().enumerate() {
            push(&mut out, format!("  factor {i} ({label}): e = {:?}", part.e_table[i]));
        }
        for (e, idxs) in &part.blocks {
            push(&mut out, format!("  block e_i(n) = {e}: factors {idxs:?}"));
        }
        for (i, per_i) in part.gamma_sets.iter().enumerate() {
            for (m, set) in per_i.iter().enumerate() {
                if !set.is_empty() {
                    push(&mut out, format!("  Gamma[{i}]^{}: classes {set:?}", m + 1));
                }
            }
        }
        push(&mut out, format!("  unramified Brauer quotient: {}", render_group(&part.invariant_factors)));
        for g in &part.generators {
            push(&mut out, format!("    generator {:?} mod {:?}: {}", g.values, g.moduli, g.expression));
        }
        if let Some(oracle) = &part.oracle {
            push(&mut out, format!(
                "  cohomology cross-check: {} [{}]",
                render_group(&oracle.invariant_factors),
                oracle.verdict
            ));
        }
    }
    push(&mut out, format!(
        "Composed unramified Brauer quotient: {}",
        render_group(&report.composed_invariant_factors)
    ));
    if let Some(global) = &report.global {
        push(&mut out, format!("--- global layer (places: {:?}) ---", global.place_labels));
        for gp in &global.parts {
            push(&mut out, format!(
                "  p = {}: arithmetic quotient {}",
                gp.prime,
                render_group(&gp.invariant_factors)
            ));
            if let Some(vals) = &gp.pairing_values {
                for (g, v) in gp.generators.iter().zip(vals) {
                    push(&mut out, format!("    pairing of {:?}: {v}", g.values));
                }
            }
        }
        push(&mut out, format!(
            "  composed arithmetic quotient: {}",
            render_group(&global.composed_invariant_factors)
        ));
        if let Some(obstruction) = global.obstruction {
            push(&mut out, format!(
                "  Brauer-Manin obstruction: {}",
                if obstruction { "PRESENT" } else { "none detected" }
            ));
        }
    }
    out
}
