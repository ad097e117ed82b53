//! Self-check suites behind `ants verify`.
//!
//! Each check prints as one `key=value` line, so the output can be grepped
//! or parsed by scripts.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{
    measure_coverage, ring_coverage, CoverageConfig, Mode, Placement, RingSpec, WorldConfig,
    DEFAULT_COVERAGE_PHI,
};
use crate::error::{Error, Result};
use crate::grid::{spiral_cover_steps, spiral_hit_index, spiral_position, Point, SpiralWalk};
use crate::harness::{round_cap, DEFAULT_CAP_MULTIPLIER};
use crate::protocols::advice::{ceil_loglog, floor_log2, floor_loglog};
use crate::protocols::{
    build_guess_set, decode_psi_subset, oracle_assign, psi_size, AdviceScheme, AgentProgram,
    Algorithm, PhiSpec, DEFAULT_RHO,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Spiral,
    Advice,
    Modes,
    Rings,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spiral" => Ok(Suite::Spiral),
            "advice" => Ok(Suite::Advice),
            "modes" => Ok(Suite::Modes),
            "rings" => Ok(Suite::Rings),
            other => Err(Error::config(
                "suite",
                format!("unknown suite `{other}`; expected spiral, advice, modes or rings"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, failures: usize, total: usize, first: Option<String>) -> Self {
        let mut detail = format!("cases={total} failures={failures}");
        if let Some(f) = first {
            detail.push_str(&format!(" first_failure=\"{f}\""));
        }
        Check {
            name: name.into(),
            passed: failures == 0,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "pass" } else { "fail" };
        write!(f, "check={} status={} {}", self.name, status, self.detail)
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Collects failures of a family of cases into one [`Check`].
struct Tally {
    total: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            total: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures += 1;
            self.first.get_or_insert_with(what);
        }
    }

    fn finish(self, name: &str) -> Check {
        Check::new(name, self.failures, self.total, self.first)
    }
}

pub fn verify(suite: Suite) -> Report {
    let checks = match suite {
        Suite::Spiral => spiral_checks(4096, 1_000_000, 64),
        Suite::Advice => advice_checks(1 << 20),
        Suite::Modes => mode_checks(1000, 0),
        Suite::Rings => ring_checks(1 << 10),
    };
    Report { checks }
}

/// Coverage of every budget in `1..=max_budget` against a brute-force
/// first-visit table, plus closed forms against the iterative walk.
pub fn spiral_checks(max_budget: u64, max_index: u64, max_offset: i64) -> Vec<Check> {
    let max_steps = spiral_cover_steps(max_budget);
    let horizon = max_index.max(max_steps);
    let mut first_visit: HashMap<Point, u64> = HashMap::from([(Point::ORIGIN, 0)]);
    let mut closed = Tally::new();
    for (n, p) in (1..=horizon).zip(SpiralWalk::new()) {
        first_visit.entry(p).or_insert(n);
        if n <= max_index {
            closed.record(spiral_position(n) == p, || format!("n={n}"));
        }
    }

    let mut coverage = Tally::new();
    for x in 1..=max_budget {
        let r = (x.isqrt() / 2) as i64;
        let steps = spiral_cover_steps(x);
        let ok = (-r..=r).all(|dx| {
            let rest = r - dx.abs();
            (-rest..=rest).all(|dy| first_visit.get(&Point::new(dx, dy)).is_some_and(|&n| n <= steps))
        });
        coverage.record(ok, || format!("budget={x}"));
    }

    let mut inverse = Tally::new();
    for x in -max_offset..=max_offset {
        for y in -max_offset..=max_offset {
            let p = Point::new(x, y);
            let ok = first_visit.get(&p) == Some(&spiral_hit_index(p));
            inverse.record(ok, || format!("offset={p}"));
        }
    }
    vec![
        coverage.finish("spiral.coverage"),
        closed.finish("spiral.position"),
        inverse.finish("spiral.hit_index"),
    ]
}

/// Advice lengths and guess-set laws for every `k` in `4..=k_max`.
pub fn advice_checks(k_max: u64) -> Vec<Check> {
    let ks: Vec<u64> = (4..=k_max).collect();
    let names = [
        "advice.rho_approx_length",
        "advice.log_k_length",
        "advice.psi_length",
        "advice.guess_set",
        "advice.psi_subset",
    ];
    let per_chunk: Vec<Vec<(usize, Option<String>)>> = ks
        .par_chunks(4096)
        .map(|chunk| {
            let mut slots = vec![(0, None); names.len()];
            for &k in chunk {
                for (slot, ok) in advice_case(k).into_iter().enumerate() {
                    if !ok {
                        slots[slot].0 += 1;
                        slots[slot].1.get_or_insert_with(|| format!("k={k}"));
                    }
                }
            }
            slots
        })
        .collect();
    names
        .iter()
        .enumerate()
        .map(|(slot, name)| {
            let failures = per_chunk.iter().map(|c| c[slot].0).sum();
            let first = per_chunk.iter().find_map(|c| c[slot].1.clone());
            Check::new(name, failures, ks.len(), first)
        })
        .collect()
}

fn advice_case(k: u64) -> [bool; 5] {
    let len = |scheme| oracle_assign(scheme, k).map(|a| a.len());
    let rho_ok = len(AdviceScheme::RhoApprox).is_ok_and(|l| l as u32 <= ceil_loglog(k));
    let log_k_ok =
        len(AdviceScheme::LogK).is_ok_and(|l| l as f64 <= (k as f64).log2().log2().log2().max(0.0) + 2.0 + 1e-9);

    let mut psi_ok = true;
    let mut subset_ok = true;
    let alpha = floor_loglog(k);
    let target = 1u64 << floor_log2(k);
    for epsilon in [0.5, 1.0] {
        let width = psi_size(k, epsilon) + 2;
        match oracle_assign(AdviceScheme::Psi { epsilon }, k) {
            Ok(a) => {
                psi_ok &= a.len() == 2 * width as usize;
                let expect = (1usize << alpha).div_ceil(1usize << width.min(63)).max(1);
                subset_ok &= decode_psi_subset(&a, width)
                    .is_ok_and(|s| s.len() == expect && s.contains(target));
            }
            Err(_) => {
                psi_ok = false;
                subset_ok = false;
            }
        }
    }
    let guess_ok = build_guess_set(alpha)
        .is_ok_and(|s| s.len() as u32 <= floor_log2(k) && s.elements.iter().any(|&g| g <= k && k < 2 * g));
    [rho_ok, log_k_ok, psi_ok, guess_ok, subset_ok]
}

/// Every algorithm family with the parameters exercised by the checks.
pub fn algorithm_zoo() -> Vec<Algorithm> {
    vec![
        Algorithm::KnownK,
        Algorithm::RhoApprox { rho: DEFAULT_RHO },
        Algorithm::Uniform {
            phi: PhiSpec::PolyLog(1.5),
        },
        Algorithm::LogK { rho: DEFAULT_RHO },
        Algorithm::Psi {
            epsilon: 0.5,
            rho: DEFAULT_RHO,
        },
        Algorithm::Psi {
            epsilon: 1.0,
            rho: DEFAULT_RHO,
        },
        Algorithm::Harmonic { delta: 0.5 },
        Algorithm::Harmonic { delta: 1.0 },
    ]
}

/// A random `(algorithm, D, k)` with `D <= 64` and `k <= 16`.
pub fn random_config<R: Rng>(rng: &mut R) -> (Algorithm, WorldConfig) {
    let zoo = algorithm_zoo();
    let alg = zoo[rng.random_range(0..zoo.len())].clone();
    let distance = rng.random_range(1..=64);
    let agents = rng.random_range(alg.min_agents()..=16);
    let placement = if rng.random_bool(0.5) {
        Placement::RandomOnSphere
    } else {
        let idx = rng.random_range(0..4 * distance);
        Placement::Fixed(crate::grid::nth_node_at_distance(distance, idx).expect("index in range"))
    };
    let cap = round_cap(DEFAULT_CAP_MULTIPLIER, &alg, distance, agents).expect("small cells cannot overflow");
    (
        alg,
        WorldConfig {
            distance,
            placement,
            agents,
            cap,
        },
    )
}

/// Paired step-level and phase-level runs on `configs` random cells.
pub fn mode_checks(configs: u64, seed: u64) -> Vec<Check> {
    let results: Vec<(bool, String, bool)> = (0..configs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let (alg, world) = random_config(&mut rng);
            let cell = crate::engine::Cell::new(alg.clone(), world).expect("valid config");
            let a = cell.run_trial(seed, i, 0, Mode::PhaseLevel);
            let b = cell.run_trial(seed, i, 0, Mode::StepLevel);
            let floor = a.hitting_time.is_none_or(|t| t >= world.distance);
            (
                a.hitting_time == b.hitting_time && a.finder == b.finder,
                format!("{alg} D={} k={} config={i}", world.distance, world.agents),
                floor,
            )
        })
        .collect();
    let mut equal = Tally::new();
    let mut floor = Tally::new();
    for (ok, what, above) in results {
        equal.record(ok, || what.clone());
        floor.record(above, || what);
    }
    vec![equal.finish("modes.equivalence"), floor.finish("modes.distance_floor")]
}

/// Ring geometry up to `k_upper_max` and a short known-`k` coverage run.
pub fn ring_checks(k_upper_max: u64) -> Vec<Check> {
    let mut sizes = Tally::new();
    let mut disjoint = Tally::new();
    let mut m = 2;
    while (1u64 << m) <= k_upper_max {
        let rings = RingSpec::new(1 << m).expect("power of two");
        let outer = rings.outer_radius() as i64;
        let mut counts = vec![0u64; rings.count() as usize];
        for x in -outer..=outer {
            for y in -outer..=outer {
                let d = Point::new(x, y).norm1();
                let hits: Vec<u32> = (1..=rings.count())
                    .filter(|&i| {
                        let (a, b) = rings.bounds(i).expect("in range");
                        a < d && d <= b
                    })
                    .collect();
                disjoint.record(hits.len() <= 1, || format!("K=2^{m} d={d}"));
                if let Some(&i) = hits.first() {
                    counts[i as usize - 1] += 1;
                }
            }
        }
        for i in 1..=rings.count() {
            let ok = rings.size(i).is_ok_and(|s| s == counts[i as usize - 1]);
            sizes.record(ok, || format!("K=2^{m} ring={i}"));
        }
        m += 1;
    }

    let rings = RingSpec::new(256).expect("power of two");
    let program = AgentProgram::known_k(4);
    let cfg = CoverageConfig {
        rings,
        k: 4,
        phi: DEFAULT_COVERAGE_PHI,
        horizon_factor: 4,
        trials: 10,
        seed: 0,
    };
    let mut coverage = Tally::new();
    match ring_coverage(&program, &cfg) {
        Ok((i, stats)) => {
            let frac = stats.ring(i).map_or(0.0, |r| r.mean_fraction());
            coverage.record(frac >= 0.1, || format!("k=4 fraction={frac:.3}"));
        }
        Err(e) => coverage.record(false, || e.to_string()),
    }
    let mut monotone = Tally::new();
    let mut prev: Option<Vec<f64>> = None;
    for horizon in [0, 500, 2000, 8000] {
        let s = measure_coverage(&program, 4, &rings, horizon, 4, 1);
        let means: Vec<f64> = s.rings.iter().map(|r| r.mean()).collect();
        let bounded = s
            .rings
            .iter()
            .all(|r| r.visited.iter().all(|&v| v <= r.size && v <= horizon * 4));
        monotone.record(bounded, || format!("horizon={horizon} exceeds bounds"));
        if let Some(p) = &prev {
            let ok = p.iter().zip(&means).all(|(a, b)| a <= b);
            monotone.record(ok, || format!("horizon={horizon}"));
        }
        prev = Some(means);
    }
    vec![
        sizes.finish("rings.size"),
        disjoint.finish("rings.disjoint"),
        coverage.finish("rings.coverage"),
        monotone.finish("rings.monotone"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for c in spiral_checks(64, 2000, 8)
            .into_iter()
            .chain(advice_checks(5000))
            .chain(mode_checks(20, 3))
        {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn check_line_format() {
        let c = Check::new("x.y", 1, 3, Some("k=5".into()));
        assert_eq!(c.to_string(), "check=x.y status=fail cases=3 failures=1 first_failure=\"k=5\"");
        assert!("nope".parse::<Suite>().is_err());
    }
}
