//! Batch experiments: configuration, parallel sweeps, summaries, CSV.

pub mod stats;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{lower_bound, Cell, Mode, Placement, TrialRecord, WorldConfig};
use crate::error::{Error, Result};
use crate::protocols::{Algorithm, PhiSpec, DEFAULT_RHO};

pub use stats::{summarize, SampleStats};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CAP_MULTIPLIER: f64 = 50.0;

/// Experiment description, read from TOML. Unknown keys are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_epsilon: Option<f64>,
    pub distances: Vec<u64>,
    pub agents: Vec<u64>,
    pub trials: u64,
    #[serde(default = "default_cap_multiplier")]
    pub cap_multiplier: f64,
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_placement")]
    pub placement: String,
}

fn default_cap_multiplier() -> f64 {
    DEFAULT_CAP_MULTIPLIER
}

fn default_mode() -> String {
    "phase".into()
}

fn default_placement() -> String {
    "random".into()
}

/// One `(D, k)` cell of a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellKey {
    pub index: u64,
    pub distance: u64,
    pub agents: u64,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("spec", e.message().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    /// Builds the algorithm, checking that only its own parameters are set.
    pub fn algorithm(&self) -> Result<Algorithm> {
        let mut used = Vec::new();
        let alg = match self.algorithm.as_str() {
            "known-k" => Algorithm::KnownK,
            "rho-approx" => {
                used.push("rho");
                Algorithm::RhoApprox {
                    rho: self.rho.unwrap_or(DEFAULT_RHO),
                }
            }
            "uniform" => {
                used.push("phi");
                let phi = self
                    .phi
                    .as_deref()
                    .ok_or_else(|| Error::config("phi", "required by `uniform`"))?
                    .parse::<PhiSpec>()?;
                Algorithm::Uniform { phi }
            }
            "log-k" => {
                used.push("rho");
                Algorithm::LogK {
                    rho: self.rho.unwrap_or(DEFAULT_RHO),
                }
            }
            "psi" => {
                used.extend(["rho", "psi_epsilon"]);
                Algorithm::Psi {
                    epsilon: self
                        .psi_epsilon
                        .ok_or_else(|| Error::config("psi_epsilon", "required by `psi`"))?,
                    rho: self.rho.unwrap_or(DEFAULT_RHO),
                }
            }
            "harmonic" => {
                used.push("delta");
                Algorithm::Harmonic {
                    delta: self
                        .delta
                        .ok_or_else(|| Error::config("delta", "required by `harmonic`"))?,
                }
            }
            other => {
                return Err(Error::config(
                    "algorithm",
                    format!("unknown algorithm `{other}`; expected one of known-k, rho-approx, uniform, log-k, psi, harmonic"),
                ))
            }
        };
        let set = [
            ("phi", self.phi.is_some()),
            ("rho", self.rho.is_some()),
            ("delta", self.delta.is_some()),
            ("psi_epsilon", self.psi_epsilon.is_some()),
        ];
        if let Some((field, _)) = set.iter().find(|(f, present)| *present && !used.contains(f)) {
            return Err(Error::config(*field, format!("not a parameter of `{}`", self.algorithm)));
        }
        alg.validate()?;
        Ok(alg)
    }

    pub fn mode(&self) -> Result<Mode> {
        self.mode.parse()
    }

    pub fn placement(&self) -> Result<Placement> {
        self.placement.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let alg = self.algorithm()?;
        self.mode()?;
        let placement = self.placement()?;
        if self.distances.is_empty() {
            return Err(Error::config("distances", "must not be empty"));
        }
        if self.agents.is_empty() {
            return Err(Error::config("agents", "must not be empty"));
        }
        if let Some(pos) = self.distances.iter().position(|&d| d == 0) {
            return Err(Error::config(format!("distances[{pos}]"), "must be >= 1"));
        }
        let min_k = alg.min_agents();
        if let Some(pos) = self.agents.iter().position(|&k| k < min_k) {
            return Err(Error::config(
                format!("agents[{pos}]"),
                format!("`{}` needs at least {min_k} agents", alg.name()),
            ));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if !(self.cap_multiplier > 0.0 && self.cap_multiplier.is_finite()) {
            return Err(Error::config("cap_multiplier", "must be positive"));
        }
        if let Placement::Fixed(p) = placement {
            if let Some(pos) = self.distances.iter().position(|&d| d != p.norm1()) {
                return Err(Error::config(
                    format!("distances[{pos}]"),
                    format!("fixed placement {p} lies at distance {}", p.norm1()),
                ));
            }
        }
        for cell in self.cells() {
            self.cap(&alg, cell.distance, cell.agents)?;
        }
        Ok(())
    }

    /// Cells in output order: distance-major, then agent count.
    pub fn cells(&self) -> Vec<CellKey> {
        self.distances
            .iter()
            .flat_map(|&distance| self.agents.iter().map(move |&agents| (distance, agents)))
            .enumerate()
            .map(|(index, (distance, agents))| CellKey {
                index: index as u64,
                distance,
                agents,
            })
            .collect()
    }

    pub fn cap(&self, alg: &Algorithm, distance: u64, k: u64) -> Result<u64> {
        round_cap(self.cap_multiplier, alg, distance, k)
    }
}

/// `⌈m · nominal competitiveness · lower_bound(D, k)⌉`.
pub fn round_cap(multiplier: f64, alg: &Algorithm, distance: u64, k: u64) -> Result<u64> {
    let lb = distance
        .checked_mul(distance)
        .map(|sq| distance.saturating_add(sq.div_ceil(k)))
        .ok_or_else(|| Error::Overflow(format!("D² for D = {distance}")))?;
    let cap = (multiplier * alg.nominal_competitiveness(distance, k) * lb as f64).ceil();
    if cap.is_nan() || cap >= u64::MAX as f64 {
        return Err(Error::Overflow(format!("round cap for D = {distance}, k = {k}")));
    }
    Ok((cap as u64).max(1))
}

/// Per-cell result row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub algorithm: String,
    pub params: String,
    #[serde(rename = "D")]
    pub distance: u64,
    pub k: u64,
    pub trials: u64,
    pub mean: Option<f64>,
    pub ci95: Option<f64>,
    pub median: Option<f64>,
    pub censored: u64,
    /// `mean / lower_bound(D, k)`.
    pub competitiveness: Option<f64>,
    pub advice_bits: u64,
    pub seed: u64,
    pub mode: Mode,
    pub schema_version: u32,
}

/// Per-trial row, enough to rebuild every [`CellSummary`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub algorithm: String,
    pub params: String,
    pub cell: u64,
    pub trial: u64,
    #[serde(rename = "D")]
    pub distance: u64,
    pub k: u64,
    pub treasure_x: i64,
    pub treasure_y: i64,
    pub hitting_time: Option<u64>,
    pub finder: Option<u64>,
    pub cap: u64,
    pub phases: u64,
    pub advice_bits: u64,
    pub seed: u64,
    pub mode: Mode,
    pub schema_version: u32,
}

impl TrialRow {
    pub fn new(alg: &Algorithm, record: &TrialRecord) -> Self {
        TrialRow {
            algorithm: alg.name().into(),
            params: alg.params(),
            cell: record.cell,
            trial: record.trial,
            distance: record.distance,
            k: record.agents,
            treasure_x: record.treasure.x,
            treasure_y: record.treasure.y,
            hitting_time: record.hitting_time,
            finder: record.finder.map(|f| f as u64),
            cap: record.cap,
            phases: record.total_phases(),
            advice_bits: record.advice.len() as u64,
            seed: record.master_seed,
            mode: record.mode,
            schema_version: SCHEMA_VERSION,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub summaries: Vec<CellSummary>,
    pub trials: Vec<TrialRow>,
}

/// Runs every trial of every cell in parallel. Output is ordered by
/// `(cell, trial)` and depends only on the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let alg = spec.algorithm()?;
    let mode = spec.mode()?;
    let placement = spec.placement()?;
    let cells = spec
        .cells()
        .into_iter()
        .map(|key| {
            let world = WorldConfig {
                distance: key.distance,
                placement,
                agents: key.agents,
                cap: spec.cap(&alg, key.distance, key.agents)?,
            };
            Ok((key, Cell::new(alg.clone(), world)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let trials: Vec<TrialRow> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (key, cell) = &cells[c];
            TrialRow::new(&alg, &cell.run_trial(spec.seed, key.index, t, mode))
        })
        .collect();
    Ok(ExperimentResult {
        summaries: summarize_trials(&trials),
        trials,
    })
}

/// Groups trial rows by cell (in order of first appearance) and summarizes.
pub fn summarize_trials(rows: &[TrialRow]) -> Vec<CellSummary> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<(u64, u64), Vec<&TrialRow>> = BTreeMap::new();
    for row in rows {
        let key = (row.seed, row.cell);
        groups
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(row);
    }
    order
        .into_iter()
        .map(|key| {
            let group = &groups[&key];
            let first = group[0];
            let samples: Vec<u64> = group.iter().filter_map(|r| r.hitting_time).collect();
            let censored = (group.len() - samples.len()) as u64;
            let s = summarize(&samples, censored);
            let lb = lower_bound(first.distance, first.k) as f64;
            CellSummary {
                algorithm: first.algorithm.clone(),
                params: first.params.clone(),
                distance: first.distance,
                k: first.k,
                trials: group.len() as u64,
                mean: s.mean,
                ci95: s.ci95,
                median: s.median,
                censored,
                competitiveness: s.mean.map(|m| m / lb),
                advice_bits: first.advice_bits,
                seed: first.seed,
                mode: first.mode,
                schema_version: SCHEMA_VERSION,
            }
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::config("csv", e.to_string()))?;
    }
    w.flush().map_err(|e| Error::config("csv", e.to_string()))
}

pub fn read_trials<R: Read>(input: R) -> Result<Vec<TrialRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| Error::config(format!("row {}", i + 1), e.to_string())))
        .collect()
}

/// Fixed-width text table of summaries.
pub fn format_table(rows: &[CellSummary]) -> String {
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"));
    let mut s = format!(
        "{:<12} {:>6} {:>6} {:>7} {:>12} {:>10} {:>12} {:>8} {:>8}\n",
        "algorithm", "D", "k", "trials", "mean", "ci95", "median", "cens", "comp"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<12} {:>6} {:>6} {:>7} {:>12} {:>10} {:>12} {:>8} {:>8}\n",
            r.algorithm,
            r.distance,
            r.k,
            r.trials,
            fmt(r.mean),
            fmt(r.ci95),
            fmt(r.median),
            r.censored,
            fmt(r.competitiveness)
        ));
    }
    s
}
