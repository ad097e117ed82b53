//! Phase directives and the loop structures that generate them.

use crate::grid::{spiral_cover_steps, spiral_position, Leg, Point};

use super::phi::PhiSpec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Destination {
    /// Uniform node of the ball of this radius around the source.
    UniformInBall(u64),
    /// Heavy-tailed node, `P(u) ∝ d(u)^-(2+δ)`.
    HeavyTail { delta: f64 },
    Explicit(Point),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpiralBudget {
    Fixed(u64),
    /// `⌈d(u)^exponent⌉` for the chosen destination `u`.
    DistancePower { exponent: f64 },
}

/// Walk to a destination, spiral for a budget, walk back to the source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDirective {
    pub destination: Destination,
    pub budget: SpiralBudget,
}

/// The three legs of a phase once the destination and budget are known.
/// The spiral runs [`spiral_cover_steps`]`(budget)` steps.
pub fn phase_legs(source: Point, dest: Point, budget: u64) -> [Leg; 3] {
    let steps = spiral_cover_steps(budget);
    let end = dest + spiral_position(steps);
    [
        Leg::Walk { from: source, to: dest },
        Leg::Spiral { center: dest, start: 0, end: steps },
        Leg::Walk { from: end, to: source },
    ]
}

fn ceil_u64(v: f64) -> u64 {
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v.ceil() as u64
    }
}

/// Phase `i` of the known-`k` protocol: ball radius `2^i`, budget
/// `⌈2^(2i+2) / k⌉`.
pub fn known_k_directive(k_assumed: u64, i: u32) -> PhaseDirective {
    let k = k_assumed.max(1) as u128;
    let radius = if i < 63 { 1u64 << i } else { u64::MAX / 4 };
    let budget = if 2 * i + 2 < 128 {
        u64::try_from((1u128 << (2 * i + 2)).div_ceil(k)).unwrap_or(u64::MAX)
    } else {
        u64::MAX
    };
    PhaseDirective {
        destination: Destination::UniformInBall(radius),
        budget: SpiralBudget::Fixed(budget.max(1)),
    }
}

/// Phase `j` of stage `i` of the uniform protocol: radius
/// `⌈√(2^(i+j) / Φ(2^j))⌉`, budget `⌈2^(i+2) / Φ(2^j)⌉`.
pub fn uniform_directive(phi: &PhiSpec, i: u32, j: u32) -> PhaseDirective {
    let phi_j = phi.at_pow2(j);
    let radius = ((i + j) as f64).exp2() / phi_j;
    let budget = ((i + 2) as f64).exp2() / phi_j;
    PhaseDirective {
        destination: Destination::UniformInBall(ceil_u64(radius.sqrt()).clamp(1, u64::MAX / 4)),
        budget: SpiralBudget::Fixed(ceil_u64(budget).max(1)),
    }
}

pub fn harmonic_directive(delta: f64) -> PhaseDirective {
    PhaseDirective {
        destination: Destination::HeavyTail { delta },
        budget: SpiralBudget::DistancePower { exponent: 2.0 + delta },
    }
}

/// Stage `j = 1, 2, ...`; phase `i = 1..=j`.
#[derive(Clone, Debug)]
pub struct KnownKSchedule {
    k_assumed: u64,
    stage: u32,
    phase: u32,
}

impl KnownKSchedule {
    pub fn new(k_assumed: u64) -> Self {
        KnownKSchedule { k_assumed, stage: 1, phase: 1 }
    }
}

impl Iterator for KnownKSchedule {
    type Item = PhaseDirective;

    fn next(&mut self) -> Option<PhaseDirective> {
        let d = known_k_directive(self.k_assumed, self.phase);
        if self.phase == self.stage {
            self.stage += 1;
            self.phase = 1;
        } else {
            self.phase += 1;
        }
        Some(d)
    }
}

/// Epoch `ℓ = 0, 1, ...`; stage `i = 0..=ℓ`; phase `j = 0..=i`.
#[derive(Clone, Debug)]
pub struct UniformSchedule {
    phi: PhiSpec,
    epoch: u32,
    stage: u32,
    phase: u32,
}

impl UniformSchedule {
    pub fn new(phi: PhiSpec) -> Self {
        UniformSchedule { phi, epoch: 0, stage: 0, phase: 0 }
    }
}

impl Iterator for UniformSchedule {
    type Item = PhaseDirective;

    fn next(&mut self) -> Option<PhaseDirective> {
        let d = uniform_directive(&self.phi, self.stage, self.phase);
        if self.phase < self.stage {
            self.phase += 1;
        } else if self.stage < self.epoch {
            self.stage += 1;
            self.phase = 0;
        } else {
            self.epoch += 1;
            self.stage = 0;
            self.phase = 0;
        }
        Some(d)
    }
}
