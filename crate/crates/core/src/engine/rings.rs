//! Dyadic ring coverage.
//!
//! For an upper agent count `K` the rings are
//! `R_i = { u : 2^(j0+i) < d(u) <= 2^(j0+i+1) }`, `i = 1..=⌊log K / 2⌋`,
//! with `j0 = ⌊log K / 2⌋ - 2`. Coverage counts the distinct nodes of each
//! ring visited by a team within a round horizon.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ball_size, Point};
use crate::protocols::{AgentProgram, PhiSpec};

use super::{walk_trajectory, StreamKey};

/// Default `Φ` for the coverage horizon: the measured competitiveness
/// constant of the known-`k` protocol.
pub const DEFAULT_COVERAGE_PHI: PhiSpec = PhiSpec::Constant(9);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RingSpec {
    pub k_upper: u64,
}

impl RingSpec {
    pub fn new(k_upper: u64) -> Result<Self> {
        if k_upper < 4 || !k_upper.is_power_of_two() {
            return Err(Error::config("k_upper", format!("must be a power of two >= 4, got {k_upper}")));
        }
        Ok(RingSpec { k_upper })
    }

    /// `⌊log K / 2⌋`, also the number of rings.
    pub fn count(&self) -> u32 {
        self.k_upper.ilog2() / 2
    }

    fn j0(&self) -> i64 {
        self.count() as i64 - 2
    }

    /// `(inner, outer]` distance bounds of ring `i`.
    pub fn bounds(&self, i: u32) -> Result<(u64, u64)> {
        if i == 0 || i > self.count() {
            return Err(Error::Range {
                index: i as u64,
                bound: self.count() as u64 + 1,
            });
        }
        let e = (self.j0() + i as i64) as u32;
        Ok((1 << e, 1 << (e + 1)))
    }

    pub fn size(&self, i: u32) -> Result<u64> {
        let (inner, outer) = self.bounds(i)?;
        Ok(ball_size(outer) - ball_size(inner))
    }

    /// Index of the ring containing distance `d`, if any.
    pub fn ring_of(&self, d: u64) -> Option<u32> {
        if d < 2 {
            return None;
        }
        let e = (d - 1).ilog2() as i64;
        let i = e - self.j0();
        (1..=self.count() as i64).contains(&i).then_some(i as u32)
    }

    pub fn outer_radius(&self) -> u64 {
        self.bounds(self.count()).map_or(0, |b| b.1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RingCoverage {
    pub index: u32,
    pub inner: u64,
    pub outer: u64,
    pub size: u64,
    /// Distinct visited nodes per trial.
    pub visited: Vec<u64>,
}

impl RingCoverage {
    pub fn mean(&self) -> f64 {
        if self.visited.is_empty() {
            return 0.0;
        }
        self.visited.iter().sum::<u64>() as f64 / self.visited.len() as f64
    }

    pub fn min(&self) -> u64 {
        self.visited.iter().copied().min().unwrap_or(0)
    }

    pub fn mean_fraction(&self) -> f64 {
        self.mean() / self.size as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverageStats {
    pub k: u64,
    pub horizon: u64,
    pub trials: u64,
    pub rings: Vec<RingCoverage>,
}

impl CoverageStats {
    pub fn ring(&self, i: u32) -> Option<&RingCoverage> {
        self.rings.iter().find(|r| r.index == i)
    }
}

/// Runs `k` agents of `program` for `horizon` rounds per trial and counts
/// the distinct nodes they visit in every ring.
pub fn measure_coverage(
    program: &AgentProgram,
    k: u64,
    rings: &RingSpec,
    horizon: u64,
    trials: u64,
    seed: u64,
) -> CoverageStats {
    let outer = rings.outer_radius() as i64;
    let side = (2 * outer + 1) as usize;
    let per_trial: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut seen = vec![false; side * side];
            let mut counts = vec![0u64; rings.count() as usize];
            for agent in 0..k {
                let key = StreamKey { master: seed, cell: 0, trial, agent };
                let mut cursor = program.spawn(key.rng());
                walk_trajectory(&mut cursor, horizon, |_, p: Point| {
                    if p.norm_inf() <= outer as u64 {
                        let slot = (p.y + outer) as usize * side + (p.x + outer) as usize;
                        if !seen[slot] {
                            seen[slot] = true;
                            if let Some(i) = rings.ring_of(p.norm1()) {
                                counts[i as usize - 1] += 1;
                            }
                        }
                    }
                    ControlFlow::Continue(())
                });
            }
            counts
        })
        .collect();
    let rings_out = (1..=rings.count())
        .map(|i| {
            let (inner, outer) = rings.bounds(i).expect("index in range");
            RingCoverage {
                index: i,
                inner,
                outer,
                size: ball_size(outer) - ball_size(inner),
                visited: per_trial.iter().map(|c| c[i as usize - 1]).collect(),
            }
        })
        .collect();
    CoverageStats {
        k,
        horizon,
        trials,
        rings: rings_out,
    }
}

/// Round count `T = ⌈Φ(k_i) · outer_i² / k_i⌉` at which `k_i = 2^i` agents
/// are expected to have covered ring `i`.
pub fn coverage_horizon(rings: &RingSpec, i: u32, phi: &PhiSpec) -> Result<u64> {
    let (_, outer) = rings.bounds(i)?;
    let k_i = 1u64 << i;
    Ok((phi.eval(k_i as f64) * (outer * outer) as f64 / k_i as f64).ceil() as u64)
}

#[derive(Clone, Debug)]
pub struct CoverageConfig {
    pub rings: RingSpec,
    /// Team size; must be `2^i` for a ring index `i`.
    pub k: u64,
    pub phi: PhiSpec,
    /// Horizon as a multiple of [`coverage_horizon`].
    pub horizon_factor: u64,
    pub trials: u64,
    pub seed: u64,
}

/// Coverage of the ring matched to `config.k` after
/// `horizon_factor · T` rounds. Rejects team sizes that are not a ring
/// index power and horizons with `T < k²`.
pub fn ring_coverage(program: &AgentProgram, config: &CoverageConfig) -> Result<(u32, CoverageStats)> {
    let k = config.k;
    if !k.is_power_of_two() || k < 2 {
        return Err(Error::config("k", format!("must be a power of two >= 2, got {k}")));
    }
    let i = k.ilog2();
    if i > config.rings.count() {
        return Err(Error::config(
            "k",
            format!("no ring {i} for K = {}", config.rings.k_upper),
        ));
    }
    let t = coverage_horizon(&config.rings, i, &config.phi)?;
    if t < k.saturating_mul(k) {
        return Err(Error::config("horizon", format!("T = {t} is below k² = {}", k * k)));
    }
    let horizon = t.saturating_mul(config.horizon_factor.max(1));
    Ok((
        i,
        measure_coverage(program, k, &config.rings, horizon, config.trials, config.seed),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_geometry() {
        let r = RingSpec::new(256).unwrap();
        assert_eq!(r.count(), 4);
        assert_eq!(r.bounds(1).unwrap(), (8, 16));
        assert_eq!(r.bounds(4).unwrap(), (64, 128));
        assert!(r.bounds(5).is_err());
        for d in 1..=200 {
            let expect = (1..=4).find(|&i| {
                let (a, b) = r.bounds(i).unwrap();
                a < d && d <= b
            });
            assert_eq!(r.ring_of(d), expect, "d = {d}");
        }
        let brute = (-16i64..=16)
            .flat_map(|x| (-16i64..=16).map(move |y| Point::new(x, y).norm1()))
            .filter(|&d| 8 < d && d <= 16)
            .count() as u64;
        assert_eq!(r.size(1).unwrap(), brute);
        assert!(RingSpec::new(100).is_err());
        assert_eq!(RingSpec::new(4).unwrap().bounds(1).unwrap(), (1, 2));
    }

    #[test]
    fn zero_horizon_visits_nothing() {
        let r = RingSpec::new(16).unwrap();
        let s = measure_coverage(&AgentProgram::known_k(4), 4, &r, 0, 3, 0);
        assert!(s.rings.iter().all(|c| c.visited.iter().all(|&v| v == 0)));
    }

    #[test]
    fn long_horizon_covers_small_rings() {
        let r = RingSpec::new(16).unwrap();
        let s = measure_coverage(&AgentProgram::known_k(4), 4, &r, 200_000, 2, 9);
        for c in &s.rings {
            assert_eq!(c.min(), c.size, "ring {}", c.index);
        }
    }

    #[test]
    fn invalid_coverage_requests() {
        let rings = RingSpec::new(256).unwrap();
        let cfg = |k| CoverageConfig {
            rings,
            k,
            phi: PhiSpec::Constant(1),
            horizon_factor: 4,
            trials: 1,
            seed: 0,
        };
        let p = AgentProgram::known_k(4);
        assert!(ring_coverage(&p, &cfg(6)).is_err());
        assert!(ring_coverage(&p, &cfg(1024)).is_err());
        assert_eq!(coverage_horizon(&rings, 2, &PhiSpec::Constant(1)).unwrap(), 256);
    }
}
