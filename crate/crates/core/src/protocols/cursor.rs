//! Per-agent execution state: turns a program into a lazy stream of legs.

use std::collections::VecDeque;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{sample_uniform_ball, Leg, Point};

use super::harmonic::HarmonicSampler;
use super::phi::PhiSpec;
use super::schedule::{
    harmonic_directive, phase_legs, Destination, KnownKSchedule, PhaseDirective, SpiralBudget,
    UniformSchedule,
};

/// Random stream owned by one agent.
pub type AgentRng = ChaCha8Rng;

/// Source of phase directives for the single-loop protocols.
#[derive(Clone, Debug)]
pub enum Schedule {
    KnownK(KnownKSchedule),
    Uniform(UniformSchedule),
    /// One heavy-tailed phase, then the agent halts.
    Harmonic { delta: f64, done: bool },
}

impl Schedule {
    pub fn known_k(k_assumed: u64) -> Self {
        Schedule::KnownK(KnownKSchedule::new(k_assumed))
    }

    pub fn uniform(phi: PhiSpec) -> Self {
        Schedule::Uniform(UniformSchedule::new(phi))
    }

    pub fn harmonic(delta: f64) -> Self {
        Schedule::Harmonic { delta, done: false }
    }
}

impl Iterator for Schedule {
    type Item = PhaseDirective;

    fn next(&mut self) -> Option<PhaseDirective> {
        match self {
            Schedule::KnownK(s) => s.next(),
            Schedule::Uniform(s) => s.next(),
            Schedule::Harmonic { delta, done } => {
                if *done {
                    None
                } else {
                    *done = true;
                    Some(harmonic_directive(*delta))
                }
            }
        }
    }
}

/// A directive with its random choices made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolvedPhase {
    pub destination: Point,
    pub budget: u64,
}

/// Draws the destination (and, for distance-dependent budgets, the budget)
/// of a directive from the agent's stream.
pub fn resolve_directive(
    directive: &PhaseDirective,
    rng: &mut AgentRng,
    sampler: Option<&HarmonicSampler>,
) -> ResolvedPhase {
    let destination = match directive.destination {
        Destination::UniformInBall(r) => sample_uniform_ball(r, rng),
        Destination::HeavyTail { .. } => sampler
            .expect("heavy-tail destination needs a sampler")
            .sample_node(rng),
        Destination::Explicit(p) => p,
    };
    let budget = match directive.budget {
        SpiralBudget::Fixed(t) => t,
        SpiralBudget::DistancePower { exponent } => match sampler {
            Some(s) if (exponent - 2.0 - s.delta()).abs() < 1e-12 => s.budget(destination.norm1()),
            _ => {
                let t = (destination.norm1() as f64).powf(exponent).ceil();
                if t >= u64::MAX as f64 { u64::MAX } else { t as u64 }
            }
        },
    };
    ResolvedPhase {
        destination,
        budget: budget.max(1),
    }
}

/// Cursor over a single-loop protocol.
#[derive(Clone, Debug)]
pub struct PhasedCursor {
    schedule: Schedule,
    rng: AgentRng,
    sampler: Option<Arc<HarmonicSampler>>,
    pending: VecDeque<Leg>,
    phases: u64,
}

impl PhasedCursor {
    pub fn new(schedule: Schedule, rng: AgentRng, sampler: Option<Arc<HarmonicSampler>>) -> Self {
        PhasedCursor {
            schedule,
            rng,
            sampler,
            pending: VecDeque::with_capacity(3),
            phases: 0,
        }
    }

    pub fn phases(&self) -> u64 {
        self.phases
    }

    /// Next non-empty leg, or `None` once the program has halted.
    pub fn next_leg(&mut self) -> Option<Leg> {
        loop {
            if let Some(leg) = self.pending.pop_front() {
                if !leg.is_empty() {
                    return Some(leg);
                }
                continue;
            }
            let directive = self.schedule.next()?;
            let phase = resolve_directive(&directive, &mut self.rng, self.sampler.as_deref());
            self.phases += 1;
            self.pending
                .extend(phase_legs(Point::ORIGIN, phase.destination, phase.budget));
        }
    }

    /// Next resolved phase, bypassing leg generation (used by tests that
    /// inspect the random choices directly).
    pub fn next_phase(&mut self) -> Option<ResolvedPhase> {
        let directive = self.schedule.next()?;
        self.phases += 1;
        Some(resolve_directive(&directive, &mut self.rng, self.sampler.as_deref()))
    }
}

#[derive(Clone, Debug)]
struct SubProgram {
    cursor: PhasedCursor,
    /// Unconsumed tail of a leg cut at a slice boundary.
    carry: Option<Leg>,
    /// Where the sub-program stands between slices.
    paused_at: Point,
}

/// What an interleaved leg is for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LegRole {
    /// Source to the paused position of the guess about to run.
    Commute,
    /// Budgeted steps of sub-program `guess` during `stage`.
    Slice { guess: usize, stage: u32 },
    /// Back to the source after a slice.
    Return,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SliceState {
    Commute,
    Run { remaining: u64 },
    Return,
}

/// Round-robin over persistent sub-programs: in stage `j`, every guess in
/// turn gets `2^j` further steps of its own known-`k` program, bracketed by
/// a commute from the source to where it paused and a walk back.
#[derive(Clone, Debug)]
pub struct InterleavedCursor {
    subs: Vec<SubProgram>,
    stage: u32,
    current: usize,
    state: SliceState,
}

impl InterleavedCursor {
    /// `assumed` holds one assumed agent count per guess; each sub-program
    /// draws from its own stream, derived from `rng`.
    pub fn new(assumed: &[u64], rng: &AgentRng) -> Self {
        let seed = rng.get_seed();
        let subs = assumed
            .iter()
            .enumerate()
            .map(|(idx, &k)| {
                let mut sub_rng = AgentRng::from_seed(seed);
                sub_rng.set_stream(idx as u64 + 1);
                SubProgram {
                    cursor: PhasedCursor::new(Schedule::known_k(k), sub_rng, None),
                    carry: None,
                    paused_at: Point::ORIGIN,
                }
            })
            .collect();
        InterleavedCursor {
            subs,
            stage: 1,
            current: 0,
            state: SliceState::Commute,
        }
    }

    pub fn phases(&self) -> u64 {
        self.subs.iter().map(|s| s.cursor.phases()).sum()
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    fn slice_budget(&self) -> u64 {
        if self.stage < 64 {
            1u64 << self.stage
        } else {
            u64::MAX
        }
    }

    fn advance_guess(&mut self) {
        self.current += 1;
        if self.current == self.subs.len() {
            self.current = 0;
            self.stage += 1;
        }
        self.state = SliceState::Commute;
    }

    pub fn next_leg(&mut self) -> Option<Leg> {
        self.next_tagged().map(|(leg, _)| leg)
    }

    pub fn next_tagged(&mut self) -> Option<(Leg, LegRole)> {
        if self.subs.is_empty() {
            return None;
        }
        loop {
            match self.state {
                SliceState::Commute => {
                    self.state = SliceState::Run {
                        remaining: self.slice_budget(),
                    };
                    let at = self.subs[self.current].paused_at;
                    if at != Point::ORIGIN {
                        return Some((Leg::Walk { from: Point::ORIGIN, to: at }, LegRole::Commute));
                    }
                }
                SliceState::Run { remaining } => {
                    if remaining == 0 {
                        self.state = SliceState::Return;
                        continue;
                    }
                    let guess = self.current;
                    let sub = &mut self.subs[guess];
                    let leg = match sub.carry.take() {
                        Some(leg) => leg,
                        None => match sub.cursor.next_leg() {
                            Some(leg) => leg,
                            None => {
                                self.state = SliceState::Return;
                                continue;
                            }
                        },
                    };
                    let leg = if leg.len() > remaining {
                        let (head, tail) = leg.split_at(remaining);
                        sub.carry = Some(tail);
                        head
                    } else {
                        leg
                    };
                    sub.paused_at = leg.end_point();
                    self.state = SliceState::Run {
                        remaining: remaining - leg.len(),
                    };
                    return Some((leg, LegRole::Slice { guess, stage: self.stage }));
                }
                SliceState::Return => {
                    let at = self.subs[self.current].paused_at;
                    self.advance_guess();
                    if at != Point::ORIGIN {
                        return Some((Leg::Walk { from: at, to: Point::ORIGIN }, LegRole::Return));
                    }
                }
            }
        }
    }
}

/// Execution state of one agent.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum AgentCursor {
    Phased(PhasedCursor),
    Interleaved(InterleavedCursor),
}

impl AgentCursor {
    pub fn next_leg(&mut self) -> Option<Leg> {
        match self {
            AgentCursor::Phased(c) => c.next_leg(),
            AgentCursor::Interleaved(c) => c.next_leg(),
        }
    }

    /// Phases started so far (summed over sub-programs).
    pub fn phases(&self) -> u64 {
        match self {
            AgentCursor::Phased(c) => c.phases(),
            AgentCursor::Interleaved(c) => c.phases(),
        }
    }
}
