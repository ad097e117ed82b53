//! Acceptance suite. Prints one line per criterion and exits non-zero if
//! any criterion fails.
//!
//! Statistical constants below were measured once with seed 1 and frozen;
//! a criterion passes when the fresh measurement stays within the band.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ants_core::engine::{ring_coverage, Cell, CoverageConfig, Mode, Placement, RingSpec, WorldConfig};
use ants_core::grid::{nth_node_at_distance, spiral_cover_steps, spiral_hit_index, spiral_position, Point};
use ants_core::harness::{round_cap, run_experiment, CellSummary, ExperimentSpec, TrialRow};
use ants_core::protocols::{
    build_guess_set, decode_psi_subset, harmonic_normalizer, oracle_assign, AdviceScheme, Algorithm,
    PhiSpec,
};

const SEED: u64 = 1;
/// Regression band around every frozen constant.
const TOLERANCE: f64 = 0.20;

/// Worst cell of the known-k sweep.
const KNOWN_K_C: f64 = 9.05;
/// Known-k flatness bound (max cell / min cell).
const KNOWN_K_FLATNESS: f64 = 4.0;
/// Worst `competitiveness / Φ(k)` of the uniform sweep.
const UNIFORM_C: f64 = 21.7;
/// Worst `competitiveness / log k` of the log-k sweep.
const LOG_K_C: f64 = 8.9;
/// Worst successful `time / (D + D^2.5 / k)` of the harmonic run.
const HARMONIC_C: f64 = 3.47;
const HARMONIC_SUCCESS: f64 = 0.8;
const RING_FRACTION: f64 = 0.1;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn within_band(measured: f64, frozen: f64) -> bool {
    measured <= frozen * (1.0 + TOLERANCE) && measured >= frozen * (1.0 - TOLERANCE)
}

/// Hitting times collected from every suite for the distance floor.
#[derive(Default)]
struct Floor {
    checked: u64,
    violations: u64,
}

impl Floor {
    fn rows(&mut self, rows: &[TrialRow]) {
        for r in rows {
            self.one(r.hitting_time, r.distance);
        }
    }

    fn one(&mut self, t: Option<u64>, d: u64) {
        if let Some(t) = t {
            self.checked += 1;
            if t < d {
                self.violations += 1;
            }
        }
    }
}

/// Independent spiral: E1 N1 W2 S2 E3 N3 ..., returns offsets for steps
/// `0..=n`.
fn enumerate_spiral(n: u64) -> Vec<Point> {
    let dirs = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut out = Vec::with_capacity(n as usize + 1);
    let (mut x, mut y) = (0i64, 0i64);
    out.push(Point::new(x, y));
    let mut run = 1u64;
    let mut d = 0;
    'outer: loop {
        for _ in 0..2 {
            for _ in 0..run {
                if out.len() as u64 > n {
                    break 'outer;
                }
                x += dirs[d].0;
                y += dirs[d].1;
                out.push(Point::new(x, y));
            }
            d = (d + 1) % 4;
        }
        run += 1;
    }
    out
}

fn first_visits(walk: &[Point]) -> HashMap<Point, u64> {
    let mut m = HashMap::new();
    for (i, &p) in walk.iter().enumerate() {
        m.entry(p).or_insert(i as u64);
    }
    m
}

fn criterion_1() -> Verdict {
    let max_budget = 4096u64;
    let visits = first_visits(&enumerate_spiral(spiral_cover_steps(max_budget)));
    let mut bad = Vec::new();
    for x in 1..=max_budget {
        let r = ((x as f64).sqrt() / 2.0).floor() as i64;
        let steps = spiral_cover_steps(x);
        for dx in -r..=r {
            let rest = r - dx.abs();
            for dy in -rest..=rest {
                if visits.get(&Point::new(dx, dy)).is_none_or(|&i| i > steps) {
                    bad.push(x);
                }
            }
        }
    }
    bad.dedup();
    verdict(bad.is_empty(), format!("budgets=1..{max_budget} failing={}", bad.len()))
}

fn criterion_2() -> Verdict {
    let n_max = 1_000_000u64;
    let walk = enumerate_spiral(n_max.max(130 * 130));
    let position_bad = (0..=n_max).filter(|&n| spiral_position(n) != walk[n as usize]).count();
    let visits = first_visits(&walk);
    let mut index_bad = 0;
    for x in -64..=64 {
        for y in -64..=64 {
            let p = Point::new(x, y);
            if visits.get(&p) != Some(&spiral_hit_index(p)) {
                index_bad += 1;
            }
        }
    }
    verdict(
        position_bad == 0 && index_bad == 0,
        format!("positions n<=10^6 mismatches={position_bad}; offsets |.|inf<=64 mismatches={index_bad}"),
    )
}

fn all_algorithms() -> Vec<Algorithm> {
    vec![
        Algorithm::KnownK,
        Algorithm::RhoApprox { rho: 2.0 },
        Algorithm::Uniform { phi: PhiSpec::PolyLog(1.5) },
        Algorithm::LogK { rho: 2.0 },
        Algorithm::Psi { epsilon: 0.5, rho: 2.0 },
        Algorithm::Harmonic { delta: 0.5 },
    ]
}

fn criterion_3(floor: &mut Floor) -> Verdict {
    let algs = all_algorithms();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let configs: Vec<(Algorithm, WorldConfig)> = (0..1000)
        .map(|_| {
            let alg = algs[rng.random_range(0..algs.len())].clone();
            let distance = rng.random_range(1..=64u64);
            let agents = rng.random_range(alg.min_agents()..=16);
            let placement = Placement::Fixed(
                nth_node_at_distance(distance, rng.random_range(0..4 * distance)).unwrap(),
            );
            let cap = round_cap(50.0, &alg, distance, agents).unwrap();
            (alg, WorldConfig { distance, placement, agents, cap })
        })
        .collect();
    let mut mismatches = 0;
    let mut censored = 0;
    for (i, (alg, world)) in configs.iter().enumerate() {
        let cell = Cell::new(alg.clone(), *world).unwrap();
        let a = cell.run_trial(SEED, i as u64, 0, Mode::PhaseLevel);
        let b = cell.run_trial(SEED, i as u64, 0, Mode::StepLevel);
        if a.hitting_time != b.hitting_time || a.finder != b.finder {
            mismatches += 1;
        }
        censored += a.censored() as u32;
        floor.one(a.hitting_time, world.distance);
    }
    verdict(
        mismatches == 0,
        format!("configs=1000 mismatches={mismatches} censored={censored}"),
    )
}

fn sweep(algorithm: &str, extra: &str, distances: &str, agents: &str, trials: u64) -> ExperimentSpec {
    ExperimentSpec::from_toml(&format!(
        "algorithm = \"{algorithm}\"\n{extra}\ndistances = {distances}\nagents = {agents}\ntrials = {trials}\nseed = {SEED}\n"
    ))
    .unwrap()
}

fn comps(rows: &[CellSummary], norm: impl Fn(u64) -> f64) -> Vec<f64> {
    rows.iter()
        .map(|r| r.competitiveness.unwrap_or(f64::INFINITY) / norm(r.k))
        .collect()
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn criterion_4(floor: &mut Floor) -> Verdict {
    let spec = sweep("known-k", "", "[16, 32, 64, 128]", "[1, 4, 16, 64, 256]", 200);
    let run = run_experiment(&spec).unwrap();
    floor.rows(&run.trials);
    let c = comps(&run.summaries, |_| 1.0);
    let flat = max(&c) / min(&c);
    verdict(
        within_band(max(&c), KNOWN_K_C) && flat <= KNOWN_K_FLATNESS,
        format!(
            "cells=20 max={:.3} (C*={KNOWN_K_C} ±20%) min={:.3} flatness={flat:.2} (<= {KNOWN_K_FLATNESS})",
            max(&c),
            min(&c)
        ),
    )
}

fn criterion_5(floor: &mut Floor) -> Verdict {
    let phi = PhiSpec::PolyLog(1.5);
    let spec = sweep("uniform", "phi = \"polylog:1.5\"", "[16, 32, 64, 128]", "[1, 4, 16, 64, 256]", 200);
    let run = run_experiment(&spec).unwrap();
    floor.rows(&run.trials);
    let c = comps(&run.summaries, |k| phi.eval(k as f64));
    verdict(
        within_band(max(&c), UNIFORM_C),
        format!("cells=20 max comp/Φ(k)={:.3} (frozen {UNIFORM_C} ±20%)", max(&c)),
    )
}

/// `⌈log₂ log₂ k⌉` by integer search: smallest `a` with `log k <= 2^a`.
fn ceil_loglog(k: u64) -> u32 {
    let bits = 64 - (k - 1).leading_zeros(); // ⌈log k⌉
    (0..).find(|&a| bits <= 1 << a).unwrap()
}

fn criterion_6() -> Verdict {
    let mut failures: HashMap<&str, u64> = HashMap::new();
    let mut fail = |what| *failures.entry(what).or_default() += 1;
    for k in 4..=(1u64 << 20) {
        let lg = 63 - k.leading_zeros();
        let rho = oracle_assign(AdviceScheme::RhoApprox, k).unwrap();
        if rho.len() as u32 > ceil_loglog(k) {
            fail("rho-approx");
        }
        let log_k = oracle_assign(AdviceScheme::LogK, k).unwrap();
        if log_k.len() as f64 > (k as f64).log2().log2().log2().max(0.0) + 2.0 + 1e-12 {
            fail("log-k");
        }
        for epsilon in [0.5, 1.0] {
            let psi = ((k as f64).log2().log2().powf(epsilon).ceil() as usize).max(1);
            if oracle_assign(AdviceScheme::Psi { epsilon }, k).unwrap().len() != 2 * (psi + 2) {
                fail("psi");
            }
        }
        let alpha = 31 - lg.leading_zeros();
        let set = build_guess_set(alpha).unwrap();
        if !set.elements.iter().any(|&g| g <= k && k < 2 * g) || set.len() as u32 > lg {
            fail("guess-set");
        }
    }
    verdict(
        failures.is_empty(),
        format!("k=4..2^20 exhaustive failures={failures:?}"),
    )
}

fn criterion_7(floor: &mut Floor) -> Verdict {
    let spec = sweep("log-k", "", "[16, 32, 64]", "[16, 256, 4096]", 200);
    let run = run_experiment(&spec).unwrap();
    floor.rows(&run.trials);
    let c = comps(&run.summaries, |k| (k as f64).log2());
    verdict(
        within_band(max(&c), LOG_K_C),
        format!("cells=9 max comp/log k={:.3} (frozen {LOG_K_C} ±20%)", max(&c)),
    )
}

fn criterion_8() -> Verdict {
    let mut bad = 0u64;
    for epsilon in [0.5, 1.0] {
        for k in 4..=(1u64 << 20) {
            let advice = oracle_assign(AdviceScheme::Psi { epsilon }, k).unwrap();
            let b = (advice.len() / 2) as u32;
            let lg = 63 - k.leading_zeros();
            let alpha = 31 - lg.leading_zeros();
            let expect = ((1u64 << alpha) as f64 / (b as f64).exp2()).ceil().max(1.0) as usize;
            let subset = decode_psi_subset(&advice, b).unwrap();
            if subset.len() != expect || !subset.contains(1 << lg) {
                bad += 1;
            }
        }
    }
    verdict(bad == 0, format!("k=4..2^20 ε∈{{0.5,1}} failures={bad}"))
}

fn criterion_9(floor: &mut Floor) -> Verdict {
    let (delta, distance, k) = (0.5, 32u64, 4096u64);
    let c_delta = harmonic_normalizer(delta).unwrap().c_delta;
    let beta = 5f64.ln();
    let alpha = 40.0 * beta / c_delta;
    let premise = (k as f64) > alpha * (distance as f64).powf(delta);
    let alg = Algorithm::Harmonic { delta };
    let world = WorldConfig {
        distance,
        placement: Placement::RandomOnSphere,
        agents: k,
        cap: round_cap(50.0, &alg, distance, k).unwrap(),
    };
    let cell = Cell::new(alg, world).unwrap();
    let trials = 500;
    let norm = distance as f64 + (distance as f64).powf(2.0 + delta) / k as f64;
    let mut found = 0;
    let mut worst = 0.0f64;
    for t in 0..trials {
        let r = cell.run_trial(SEED, 0, t, Mode::PhaseLevel);
        floor.one(r.hitting_time, distance);
        if let Some(h) = r.hitting_time {
            found += 1;
            worst = worst.max(h as f64 / norm);
        }
    }
    let success = found as f64 / trials as f64;
    verdict(
        premise && success >= HARMONIC_SUCCESS && within_band(worst, HARMONIC_C),
        format!(
            "α·D^δ={:.0} < k={k}: {premise}; success={success:.3} (>= {HARMONIC_SUCCESS}); worst time/(D+D^2.5/k)={worst:.3} (frozen {HARMONIC_C} ±20%)",
            alpha * (distance as f64).powf(delta)
        ),
    )
}

fn criterion_10(floor: &Floor) -> Verdict {
    verdict(
        floor.violations == 0 && floor.checked > 0,
        format!("non-censored trials checked={} below D={}", floor.checked, floor.violations),
    )
}

fn criterion_11() -> Verdict {
    let rings = RingSpec::new(256).unwrap();
    let phi = PhiSpec::Constant(KNOWN_K_C.round() as u64);
    let mut parts = Vec::new();
    let mut ok = true;
    for k in [4u64, 16] {
        let alg = Algorithm::KnownK;
        let program = alg.program(&alg.advice(k).unwrap()).unwrap();
        let cfg = CoverageConfig { rings, k, phi, horizon_factor: 4, trials: 50, seed: SEED };
        let (i, stats) = ring_coverage(&program, &cfg).unwrap();
        let frac = stats.ring(i).unwrap().mean_fraction();
        ok &= frac >= RING_FRACTION;
        parts.push(format!("k={k} ring={i} horizon={} fraction={frac:.3}", stats.horizon));
    }
    verdict(ok, format!("{} (>= {RING_FRACTION})", parts.join("; ")))
}

fn main() {
    let mut floor = Floor::default();
    type Run<'a> = Box<dyn FnMut(&mut Floor) -> Verdict + 'a>;
    let criteria: Vec<(u32, &str, Duration, Run)> = vec![
        (1, "spiral coverage", Duration::from_secs(60), Box::new(|_| criterion_1())),
        (2, "spiral closed forms", Duration::from_secs(60), Box::new(|_| criterion_2())),
        (3, "mode equivalence", Duration::from_secs(300), Box::new(criterion_3)),
        (4, "known-k constant competitiveness", Duration::from_secs(600), Box::new(criterion_4)),
        (5, "uniform Φ-competitiveness", Duration::from_secs(900), Box::new(criterion_5)),
        (6, "advice sizes", Duration::from_secs(60), Box::new(|_| criterion_6())),
        (7, "log-k competitiveness", Duration::from_secs(900), Box::new(criterion_7)),
        (8, "psi subset law", Duration::from_secs(60), Box::new(|_| criterion_8())),
        (9, "harmonic success", Duration::from_secs(300), Box::new(criterion_9)),
        (10, "distance floor", Duration::from_secs(60), Box::new(|f| criterion_10(f))),
        (11, "ring coverage", Duration::from_secs(600), Box::new(|_| criterion_11())),
    ];
    let mut failed = 0;
    for (n, name, limit, mut run) in criteria {
        let start = Instant::now();
        let v = run(&mut floor);
        let elapsed = start.elapsed();
        let passed = v.passed && elapsed <= limit;
        failed += !passed as u32;
        println!(
            "criterion {n:>2} {} {name}: {} [{:.1}s / {}s]",
            if passed { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
