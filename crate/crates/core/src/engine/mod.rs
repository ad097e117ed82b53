//! Synchronous execution of agents against a placed treasure.
//!
//! Two executors consume the same leg stream:
//!
//! * [`Mode::PhaseLevel`] resolves each leg in O(1) with the closed-form
//!   path and spiral queries;
//! * [`Mode::StepLevel`] walks every edge and compares every visited node
//!   with the target.
//!
//! Since both pull legs (and therefore random draws) in the same order and
//! stop at the same leg, they return identical hitting times.

pub mod rings;

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{manhattan, sample_sphere, Point};
use crate::protocols::cursor::{resolve_directive, ResolvedPhase};
use crate::protocols::schedule::phase_legs;
use crate::protocols::{
    AdviceBits, AgentCursor, AgentProgram, AgentRng, Algorithm, HarmonicSampler, PhaseDirective,
};

pub use rings::{
    measure_coverage, coverage_horizon, ring_coverage, CoverageConfig, CoverageStats, RingCoverage,
    RingSpec, DEFAULT_COVERAGE_PHI,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "step")]
    StepLevel,
    #[default]
    #[serde(rename = "phase")]
    PhaseLevel,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::StepLevel => "step",
            Mode::PhaseLevel => "phase",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(Mode::StepLevel),
            "phase" => Ok(Mode::PhaseLevel),
            other => Err(Error::config("mode", format!("expected `step` or `phase`, got `{other}`"))),
        }
    }
}

/// Identifies one agent's random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master: u64,
    pub cell: u64,
    pub trial: u64,
    pub agent: u64,
}

impl StreamKey {
    /// Agent slot reserved for the treasure placement stream.
    pub const PLACEMENT: u64 = u64::MAX;

    pub fn rng(&self) -> AgentRng {
        let mut seed = [0u8; 32];
        for (chunk, word) in seed
            .chunks_exact_mut(8)
            .zip([self.master, self.cell, self.trial, self.agent])
        {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        AgentRng::from_seed(seed)
    }
}

/// `D + ⌈D²/k⌉`, the normalizer for competitiveness.
pub fn lower_bound(distance: u64, k: u64) -> u64 {
    distance + (distance * distance).div_ceil(k.max(1))
}

/// Result of one phase evaluated in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseOutcome {
    pub destination: Point,
    /// Time since the phase began at which the target was first visited.
    pub hit: Option<u64>,
    /// Length of the whole phase (outbound walk, spiral, return).
    pub elapsed: u64,
    /// Where the spiral ended.
    pub spiral_end: Point,
}

impl PhaseOutcome {
    pub fn found(&self) -> bool {
        self.hit.is_some()
    }
}

/// Evaluates a phase starting at the source: resolves the destination from
/// `rng`, then checks the outbound walk, the spiral and the return walk.
pub fn phase_outcome(
    directive: &PhaseDirective,
    treasure: Point,
    rng: &mut AgentRng,
    sampler: Option<&HarmonicSampler>,
) -> PhaseOutcome {
    resolved_phase_outcome(resolve_directive(directive, rng, sampler), treasure)
}

pub fn resolved_phase_outcome(phase: ResolvedPhase, treasure: Point) -> PhaseOutcome {
    let legs = phase_legs(Point::ORIGIN, phase.destination, phase.budget);
    let mut t = 0u64;
    let mut hit = None;
    for leg in &legs {
        if let Some(off) = leg.hit_offset(treasure) {
            hit = Some(t.saturating_add(off));
            break;
        }
        t = t.saturating_add(leg.len());
    }
    PhaseOutcome {
        destination: phase.destination,
        hit,
        elapsed: legs.iter().fold(0u64, |acc, l| acc.saturating_add(l.len())),
        spiral_end: legs[1].end_point(),
    }
}

/// Time at which the agent first stands on `treasure`, if no later than
/// `cap`.
pub fn agent_hitting_time(cursor: &mut AgentCursor, treasure: Point, cap: u64, mode: Mode) -> Option<u64> {
    match mode {
        Mode::PhaseLevel => phase_level_time(cursor, treasure, cap),
        Mode::StepLevel => {
            let mut found = None;
            walk_trajectory(cursor, cap, |t, p| {
                if p == treasure {
                    found = Some(t);
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            found
        }
    }
}

fn phase_level_time(cursor: &mut AgentCursor, treasure: Point, cap: u64) -> Option<u64> {
    let mut t = 0u64;
    while t < cap {
        let leg = cursor.next_leg()?;
        if let Some(off) = leg.hit_offset(treasure) {
            let hit = t.saturating_add(off);
            return (hit <= cap).then_some(hit);
        }
        t = t.saturating_add(leg.len());
    }
    None
}

/// Walks the agent edge by edge for at most `horizon` rounds, calling
/// `visit(round, node)` after every move. Returns the number of rounds
/// walked.
pub fn walk_trajectory<F>(cursor: &mut AgentCursor, horizon: u64, mut visit: F) -> u64
where
    F: FnMut(u64, Point) -> ControlFlow<()>,
{
    let mut t = 0u64;
    while t < horizon {
        let Some(leg) = cursor.next_leg() else { break };
        for p in leg.steps() {
            t += 1;
            if visit(t, p).is_break() || t >= horizon {
                return t;
            }
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    /// Uniform over the `4D` nodes at distance `D`, redrawn every trial.
    RandomOnSphere,
    Fixed(Point),
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Placement::RandomOnSphere => f.write_str("random"),
            Placement::Fixed(p) => write!(f, "fixed:{},{}", p.x, p.y),
        }
    }
}

impl FromStr for Placement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "random" {
            return Ok(Placement::RandomOnSphere);
        }
        let bad = || Error::config("placement", format!("expected `random` or `fixed:x,y`, got `{s}`"));
        let coords = s.strip_prefix("fixed:").ok_or_else(bad)?;
        let (x, y) = coords.split_once(',').ok_or_else(bad)?;
        Ok(Placement::Fixed(Point::new(
            x.trim().parse().map_err(|_| bad())?,
            y.trim().parse().map_err(|_| bad())?,
        )))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorldConfig {
    pub distance: u64,
    pub placement: Placement,
    pub agents: u64,
    /// Last round considered; later finds count as censored.
    pub cap: u64,
}

impl WorldConfig {
    pub fn validate(&self) -> Result<()> {
        if self.distance == 0 {
            return Err(Error::config("distances", "treasure distance must be >= 1"));
        }
        if self.agents == 0 {
            return Err(Error::config("agents", "agent count must be >= 1"));
        }
        if self.cap == 0 {
            return Err(Error::config("cap", "round cap must be >= 1"));
        }
        if let Placement::Fixed(p) = self.placement {
            if p.norm1() != self.distance {
                return Err(Error::config(
                    "placement",
                    format!("{p} is at distance {}, not {}", p.norm1(), self.distance),
                ));
            }
        }
        Ok(())
    }

    pub fn place_treasure(&self, key: StreamKey) -> Point {
        match self.placement {
            Placement::Fixed(p) => p,
            Placement::RandomOnSphere => {
                let mut rng = StreamKey { agent: StreamKey::PLACEMENT, ..key }.rng();
                sample_sphere(self.distance, &mut rng)
            }
        }
    }
}

/// Outcome of all agents of one execution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemOutcome {
    pub hitting_time: Option<u64>,
    pub finder: Option<usize>,
    pub phases: Vec<u64>,
}

/// Runs one agent per key and keeps the earliest find (lowest index on
/// ties). Agents after the current best only run until they could still
/// beat it.
pub fn system_hitting_time(
    program: &AgentProgram,
    keys: &[StreamKey],
    treasure: Point,
    cap: u64,
    mode: Mode,
) -> SystemOutcome {
    let mut best: Option<(u64, usize)> = None;
    let mut phases = Vec::with_capacity(keys.len());
    for (idx, key) in keys.iter().enumerate() {
        let limit = best.map_or(cap, |(t, _)| t - 1);
        if limit == 0 {
            phases.push(0);
            continue;
        }
        let mut cursor = program.spawn(key.rng());
        let hit = agent_hitting_time(&mut cursor, treasure, limit, mode);
        phases.push(cursor.phases());
        if let Some(t) = hit {
            best = Some((t, idx));
        }
    }
    SystemOutcome {
        hitting_time: best.map(|b| b.0),
        finder: best.map(|b| b.1),
        phases,
    }
}

/// Outcome of one system execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub cell: u64,
    pub trial: u64,
    pub master_seed: u64,
    pub distance: u64,
    pub agents: u64,
    pub treasure: Point,
    /// `None` when censored at `cap`.
    pub hitting_time: Option<u64>,
    pub finder: Option<usize>,
    pub cap: u64,
    pub phases: Vec<u64>,
    pub advice: AdviceBits,
    pub mode: Mode,
}

impl TrialRecord {
    pub fn censored(&self) -> bool {
        self.hitting_time.is_none()
    }

    pub fn total_phases(&self) -> u64 {
        self.phases.iter().sum()
    }
}

/// An algorithm bound to a world: advice and program are computed once
/// and shared by every trial.
#[derive(Clone, Debug)]
pub struct Cell {
    pub algorithm: Algorithm,
    pub world: WorldConfig,
    pub advice: AdviceBits,
    pub program: AgentProgram,
}

impl Cell {
    pub fn new(algorithm: Algorithm, world: WorldConfig) -> Result<Self> {
        world.validate()?;
        let advice = algorithm.advice(world.agents)?;
        let program = algorithm.program(&advice)?;
        Ok(Cell {
            algorithm,
            world,
            advice,
            program,
        })
    }

    /// Like [`Cell::new`] but reusing an already-built program.
    pub fn with_program(algorithm: Algorithm, world: WorldConfig, program: AgentProgram) -> Result<Self> {
        world.validate()?;
        let advice = algorithm.advice(world.agents)?;
        Ok(Cell {
            algorithm,
            world,
            advice,
            program,
        })
    }

    pub fn keys(&self, master_seed: u64, cell: u64, trial: u64) -> Vec<StreamKey> {
        (0..self.world.agents)
            .map(|agent| StreamKey {
                master: master_seed,
                cell,
                trial,
                agent,
            })
            .collect()
    }

    pub fn run_trial(&self, master_seed: u64, cell: u64, trial: u64, mode: Mode) -> TrialRecord {
        let base = StreamKey {
            master: master_seed,
            cell,
            trial,
            agent: 0,
        };
        let treasure = self.world.place_treasure(base);
        let keys = self.keys(master_seed, cell, trial);
        let outcome = system_hitting_time(&self.program, &keys, treasure, self.world.cap, mode);
        if let Some(t) = outcome.hitting_time {
            assert!(
                t >= manhattan(treasure, Point::ORIGIN),
                "hitting time {t} below the walking distance to {treasure}"
            );
        }
        TrialRecord {
            cell,
            trial,
            master_seed,
            distance: self.world.distance,
            agents: self.world.agents,
            treasure,
            hitting_time: outcome.hitting_time,
            finder: outcome.finder,
            cap: self.world.cap,
            phases: outcome.phases,
            advice: self.advice.clone(),
            mode,
        }
    }
}

/// One trial of `algorithm` in `world` (cell index 0).
pub fn run_trial(
    algorithm: &Algorithm,
    world: &WorldConfig,
    master_seed: u64,
    trial: u64,
    mode: Mode,
) -> Result<TrialRecord> {
    Ok(Cell::new(algorithm.clone(), *world)?.run_trial(master_seed, 0, trial, mode))
}
