//! Search protocols and their oracles.
//!
//! An [`Algorithm`] pairs an advice scheme with a protocol. The oracle
//! side ([`Algorithm::advice`]) maps the agent count to the advice every
//! agent receives; the protocol side ([`Algorithm::program`]) decodes that
//! advice into an immutable [`AgentProgram`]. Each agent then runs its own
//! [`AgentCursor`], a lazy stream of trajectory legs driven by a private
//! random stream.

pub mod advice;
pub mod cursor;
pub mod harmonic;
pub mod phi;
pub mod schedule;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub use advice::{
    build_guess_set, decode_psi_subset, oracle_assign, psi_size, psi_width, AdviceBits,
    AdviceScheme, GuessSet,
};
pub use cursor::{AgentCursor, AgentRng, InterleavedCursor, LegRole, PhasedCursor, Schedule};
pub use harmonic::{harmonic_normalizer, HarmonicParams, HarmonicSampler};
pub use phi::PhiSpec;
pub use schedule::{Destination, PhaseDirective, SpiralBudget};

/// Default approximation factor of the guess-based protocols: a guess `g`
/// with `g <= k < 2g` is a 2-approximation of `k`.
pub const DEFAULT_RHO: f64 = 2.0;

/// Algorithm configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    /// Known agent count; advice is `k` itself.
    KnownK,
    /// Runs the known-`k` protocol with `⌊k_a / ρ⌋`, where `k_a` is a
    /// power-of-two approximation of `k`.
    RhoApprox { rho: f64 },
    /// No advice; budgets driven by `Φ`.
    Uniform { phi: PhiSpec },
    /// Advice `⌊log log k⌋`; interleaves every guess of `S(α)`.
    LogK { rho: f64 },
    /// `2(Ψ(k) + 2)` advice bits; interleaves a block of `S(α)`.
    Psi { epsilon: f64, rho: f64 },
    /// Single heavy-tailed excursion.
    Harmonic { delta: f64 },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::KnownK => "known-k",
            Algorithm::RhoApprox { .. } => "rho-approx",
            Algorithm::Uniform { .. } => "uniform",
            Algorithm::LogK { .. } => "log-k",
            Algorithm::Psi { .. } => "psi",
            Algorithm::Harmonic { .. } => "harmonic",
        }
    }

    /// Parameter string, `;`-separated `key=value`.
    pub fn params(&self) -> String {
        match self {
            Algorithm::KnownK => String::new(),
            Algorithm::RhoApprox { rho } | Algorithm::LogK { rho } => format!("rho={rho}"),
            Algorithm::Uniform { phi } => format!("phi={phi}"),
            Algorithm::Psi { epsilon, rho } => format!("epsilon={epsilon};rho={rho}"),
            Algorithm::Harmonic { delta } => format!("delta={delta}"),
        }
    }

    pub fn scheme(&self) -> AdviceScheme {
        match *self {
            Algorithm::KnownK => AdviceScheme::KnownK,
            Algorithm::RhoApprox { .. } => AdviceScheme::RhoApprox,
            Algorithm::Uniform { .. } | Algorithm::Harmonic { .. } => AdviceScheme::None,
            Algorithm::LogK { .. } => AdviceScheme::LogK,
            Algorithm::Psi { epsilon, .. } => AdviceScheme::Psi { epsilon },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Algorithm::RhoApprox { rho } | Algorithm::LogK { rho } | Algorithm::Psi { rho, .. }
                if !(rho >= 1.0 && rho.is_finite()) =>
            {
                Err(Error::config("rho", format!("must be >= 1, got {rho}")))
            }
            Algorithm::Psi { epsilon, .. } if !(epsilon > 0.0 && epsilon <= 1.0) => {
                Err(Error::config("psi_epsilon", format!("must lie in (0, 1], got {epsilon}")))
            }
            Algorithm::Uniform { phi } => phi.validate(),
            Algorithm::Harmonic { delta } if !(delta > 0.0 && delta.is_finite()) => {
                Err(Error::config("delta", format!("must be positive, got {delta}")))
            }
            _ => Ok(()),
        }
    }

    /// Smallest agent count the oracle accepts.
    pub fn min_agents(&self) -> u64 {
        self.scheme().min_agents()
    }

    /// Oracle: the advice each of the `k` agents receives.
    pub fn advice(&self, k: u64) -> Result<AdviceBits> {
        self.validate()?;
        oracle_assign(self.scheme(), k)
    }

    /// Protocol: decodes `advice` into the program every agent runs.
    pub fn program(&self, advice: &AdviceBits) -> Result<AgentProgram> {
        self.validate()?;
        Ok(match *self {
            Algorithm::KnownK => AgentProgram::known_k(advice::decode_known_k(advice)?),
            Algorithm::RhoApprox { rho } => AgentProgram::rho_approx(advice, rho)?,
            Algorithm::Uniform { phi } => AgentProgram::uniform(phi),
            Algorithm::LogK { rho } => {
                AgentProgram::interleaved(&advice::decode_log_k(advice)?, rho)?
            }
            Algorithm::Psi { rho, .. } => {
                if !advice.len().is_multiple_of(2) {
                    return Err(Error::Decode(format!("odd advice length {}", advice.len())));
                }
                let width = (advice.len() / 2) as u32;
                AgentProgram::interleaved(&decode_psi_subset(advice, width)?, rho)?
            }
            Algorithm::Harmonic { delta } => AgentProgram::harmonic(delta)?,
        })
    }

    /// Competitiveness the algorithm is expected to achieve against
    /// `D + D²/k`, up to its hidden constant.
    pub fn nominal_competitiveness(&self, distance: u64, k: u64) -> f64 {
        let (d, kf) = (distance as f64, k as f64);
        match *self {
            Algorithm::KnownK => 1.0,
            Algorithm::RhoApprox { rho } => rho * rho,
            Algorithm::Uniform { phi } => phi.eval(kf),
            Algorithm::LogK { .. } => kf.log2().max(1.0),
            Algorithm::Psi { .. } => self
                .advice(k)
                .and_then(|a| self.program(&a))
                .map(|p| match p {
                    AgentProgram::Interleaved { assumed, .. } => assumed.len() as f64,
                    _ => 1.0,
                })
                .unwrap_or(1.0),
            Algorithm::Harmonic { delta } => {
                (d + d.powf(2.0 + delta) / kf) / (d + (d * d / kf).ceil())
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            f.write_str(self.name())
        } else {
            write!(f, "{}[{}]", self.name(), params)
        }
    }
}

/// Immutable program shared by all agents of a run.
#[derive(Clone, Debug)]
pub enum AgentProgram {
    KnownK { k_assumed: u64 },
    Uniform { phi: PhiSpec },
    Harmonic { sampler: Arc<HarmonicSampler> },
    /// One persistent known-`k` sub-program per assumed count.
    Interleaved { assumed: Vec<u64> },
}

impl AgentProgram {
    pub fn known_k(k_assumed: u64) -> Self {
        AgentProgram::KnownK {
            k_assumed: k_assumed.max(1),
        }
    }

    /// Known-`k` protocol with parameter `max(1, ⌊k_a / ρ⌋)`.
    pub fn rho_approx(advice: &AdviceBits, rho: f64) -> Result<Self> {
        let k_a = advice::decode_rho_approx(advice)?;
        Ok(Self::known_k(assumed_count(k_a, rho)))
    }

    pub fn uniform(phi: PhiSpec) -> Self {
        AgentProgram::Uniform { phi }
    }

    pub fn harmonic(delta: f64) -> Result<Self> {
        Ok(AgentProgram::Harmonic {
            sampler: Arc::new(HarmonicSampler::new(delta)?),
        })
    }

    pub fn harmonic_with(sampler: Arc<HarmonicSampler>) -> Self {
        AgentProgram::Harmonic { sampler }
    }

    /// Interleaves one known-`k` sub-program per guess, each assuming
    /// `max(1, ⌊g / ρ⌋)` agents.
    pub fn interleaved(guesses: &GuessSet, rho: f64) -> Result<Self> {
        if guesses.is_empty() {
            return Err(Error::Precondition("empty guess set".into()));
        }
        Ok(AgentProgram::Interleaved {
            assumed: guesses.elements.iter().map(|&g| assumed_count(g, rho)).collect(),
        })
    }

    /// Starts an agent on its own stream.
    pub fn spawn(&self, rng: AgentRng) -> AgentCursor {
        match self {
            AgentProgram::KnownK { k_assumed } => {
                AgentCursor::Phased(PhasedCursor::new(Schedule::known_k(*k_assumed), rng, None))
            }
            AgentProgram::Uniform { phi } => {
                AgentCursor::Phased(PhasedCursor::new(Schedule::uniform(*phi), rng, None))
            }
            AgentProgram::Harmonic { sampler } => AgentCursor::Phased(PhasedCursor::new(
                Schedule::harmonic(sampler.delta()),
                rng,
                Some(sampler.clone()),
            )),
            AgentProgram::Interleaved { assumed } => {
                AgentCursor::Interleaved(InterleavedCursor::new(assumed, &rng))
            }
        }
    }
}

fn assumed_count(k: u64, rho: f64) -> u64 {
    ((k as f64 / rho).floor() as u64).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_approx_parameter() {
        let alg = Algorithm::RhoApprox { rho: 2.0 };
        let p = alg.program(&alg.advice(1024).unwrap()).unwrap();
        assert!(matches!(p, AgentProgram::KnownK { k_assumed: 512 }));
        for k in 4..8 {
            let p = alg.program(&alg.advice(k).unwrap()).unwrap();
            assert!(matches!(p, AgentProgram::KnownK { k_assumed: 2 }));
        }
        let exact = Algorithm::RhoApprox { rho: 1.0 };
        for m in 1..20 {
            let p = exact.program(&exact.advice(1 << m).unwrap()).unwrap();
            assert!(matches!(p, AgentProgram::KnownK { k_assumed } if k_assumed == 1 << m));
        }
        assert!(alg.program(&AdviceBits::empty()).is_err());
    }

    #[test]
    fn log_k_program_covers_guess_set() {
        let alg = Algorithm::LogK { rho: 1.0 };
        let p = alg.program(&alg.advice(4096).unwrap()).unwrap();
        match p {
            AgentProgram::Interleaved { assumed } => {
                assert_eq!(assumed, build_guess_set(3).unwrap().elements)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn config_errors() {
        assert!(Algorithm::LogK { rho: 0.5 }.advice(16).is_err());
        assert!(Algorithm::Psi { epsilon: 0.0, rho: 2.0 }.advice(16).is_err());
        assert!(Algorithm::Harmonic { delta: -1.0 }.advice(16).is_err());
        assert!(Algorithm::LogK { rho: 2.0 }.advice(3).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Algorithm::KnownK.to_string(), "known-k");
        assert_eq!(
            Algorithm::Uniform { phi: PhiSpec::PolyLog(1.5) }.to_string(),
            "uniform[phi=polylog:1.5]"
        );
    }
}
