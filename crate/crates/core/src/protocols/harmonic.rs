//! Heavy-tailed destination law of the harmonic protocol.
//!
//! A node `u != s` is chosen with probability `c_δ / d(u)^(2+δ)`. Since
//! there are `4d` nodes at distance `d`, the distance itself follows
//! `P(d) = 4 c_δ d^-(1+δ)`, a zeta law with exponent `1+δ`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{nth_node_at_distance, Point};

/// Direct-summation cutoff for the normalizer and the tabulated CDF.
pub const TAIL_CUTOFF: u64 = 1_000_000;

/// Distances are clamped here. Any agent drawing a larger distance cannot
/// return within a `u64` round budget anyway.
pub const MAX_DISTANCE: u64 = 1 << 60;

/// `Σ_{d > n} d^-s` by Euler-Maclaurin (three correction terms).
fn zeta_tail(n: f64, s: f64) -> f64 {
    n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s / 12.0 * n.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0)
}

#[derive(Clone, Debug)]
pub struct HarmonicParams {
    pub delta: f64,
    pub c_delta: f64,
    pub tail_cutoff: u64,
}

/// Normalizer `c_δ = 1 / (4 ζ(1+δ))`.
pub fn harmonic_normalizer(delta: f64) -> Result<HarmonicParams> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("δ must be positive, got {delta}")));
    }
    let s = 1.0 + delta;
    // smallest terms first
    let head: f64 = (1..=TAIL_CUTOFF).rev().map(|d| (d as f64).powf(-s)).sum();
    let zeta = head + zeta_tail(TAIL_CUTOFF as f64, s);
    Ok(HarmonicParams {
        delta,
        c_delta: 1.0 / (4.0 * zeta),
        tail_cutoff: TAIL_CUTOFF,
    })
}

/// Exact inverse-CDF sampler for the destination distance.
#[derive(Clone, Debug)]
pub struct HarmonicSampler {
    params: HarmonicParams,
    /// `cdf[d-1] = P(distance <= d)` for `d <= TAIL_CUTOFF`.
    cdf: Vec<f64>,
}

impl HarmonicSampler {
    pub fn new(delta: f64) -> Result<Self> {
        let params = harmonic_normalizer(delta)?;
        let s = 1.0 + delta;
        let scale = 4.0 * params.c_delta;
        let mut acc = 0.0;
        let cdf = (1..=params.tail_cutoff)
            .map(|d| {
                acc += scale * (d as f64).powf(-s);
                acc
            })
            .collect();
        Ok(HarmonicSampler { params, cdf })
    }

    pub fn params(&self) -> &HarmonicParams {
        &self.params
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    /// `P(distance <= d)` from the table (exact up to the cutoff) or the
    /// tail expansion beyond it.
    pub fn cdf(&self, d: u64) -> f64 {
        if d == 0 {
            0.0
        } else if d <= self.params.tail_cutoff {
            self.cdf[d as usize - 1]
        } else {
            1.0 - 4.0 * self.params.c_delta * zeta_tail(d as f64, 1.0 + self.params.delta)
        }
    }

    /// Draws a distance `d >= 1`. One uniform draw per sample.
    pub fn sample_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let last = *self.cdf.last().unwrap();
        if u < last {
            // smallest d with cdf(d) > u
            return self.cdf.partition_point(|&c| c <= u) as u64 + 1;
        }
        // Tail: Σ_{m>d} m^-s ≈ (d + 1/2)^-δ / δ; pick the smallest d whose
        // survival drops below 1 - u.
        let delta = self.params.delta;
        let survival = (1.0 - u).max(f64::MIN_POSITIVE);
        let x = (4.0 * self.params.c_delta / (delta * survival)).powf(1.0 / delta) - 0.5;
        if x.is_nan() || x >= MAX_DISTANCE as f64 {
            return MAX_DISTANCE;
        }
        (x.floor() as u64 + 1).clamp(self.params.tail_cutoff + 1, MAX_DISTANCE)
    }

    /// Draws a destination node: heavy-tailed distance, then a uniform
    /// node on that sphere.
    pub fn sample_node<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let d = self.sample_distance(rng);
        let idx = rng.random_range(0..4 * d);
        nth_node_at_distance(d, idx).expect("index drawn in range")
    }

    /// Spiral budget `⌈d^(2+δ)⌉`, saturating.
    pub fn budget(&self, d: u64) -> u64 {
        let t = (d as f64).powf(2.0 + self.params.delta).ceil();
        if t >= u64::MAX as f64 {
            u64::MAX
        } else {
            t as u64
        }
    }
}
