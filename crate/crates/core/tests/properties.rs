use std::collections::HashSet;
use std::ops::ControlFlow;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ants_core::engine::{
    agent_hitting_time, measure_coverage, system_hitting_time, walk_trajectory, Cell, Mode, Placement,
    RingSpec, StreamKey, WorldConfig,
};
use ants_core::grid::{
    lpath, lpath_hit_index, manhattan, sample_sphere, spiral_hit_index, spiral_position, Leg, Point,
};
use ants_core::harness::summarize;
use ants_core::protocols::{oracle_assign, AdviceScheme, AgentProgram, Algorithm, PhiSpec};

fn point(r: i64) -> impl Strategy<Value = Point> {
    (-r..=r, -r..=r).prop_map(|(x, y)| Point::new(x, y))
}

fn algorithm() -> impl Strategy<Value = Algorithm> {
    prop_oneof![
        Just(Algorithm::KnownK),
        Just(Algorithm::RhoApprox { rho: 2.0 }),
        Just(Algorithm::Uniform { phi: PhiSpec::PolyLog(1.5) }),
        Just(Algorithm::LogK { rho: 2.0 }),
        Just(Algorithm::Psi { epsilon: 0.5, rho: 2.0 }),
        Just(Algorithm::Harmonic { delta: 1.0 }),
    ]
}

/// Rebuilds the node sequence of a leg from the closed forms only.
fn rewalk(leg: &Leg) -> Vec<Point> {
    match *leg {
        Leg::Walk { from, to } => lpath(from, to),
        Leg::Spiral { center, start, end } => {
            (start + 1..=end).map(|n| center + spiral_position(n)).collect()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn metric_axioms(a in point(1 << 40), b in point(1 << 40), c in point(1 << 40)) {
        prop_assert_eq!(manhattan(a, b), manhattan(b, a));
        prop_assert!(manhattan(a, c) <= manhattan(a, b) + manhattan(b, c));
        prop_assert_eq!(manhattan(a, a), 0);
    }

    #[test]
    fn spiral_round_trip(p in point(1 << 20), n in 0u64..(1 << 40)) {
        prop_assert_eq!(spiral_position(spiral_hit_index(p)), p);
        prop_assert_eq!(spiral_hit_index(spiral_position(n)), n);
    }

    #[test]
    fn lpath_is_a_shortest_path(a in point(30), b in point(30), t in point(30)) {
        let path = lpath(a, b);
        prop_assert_eq!(path.len() as u64, manhattan(a, b));
        let mut prev = a;
        for &p in &path {
            prop_assert_eq!(manhattan(prev, p), 1);
            prev = p;
        }
        let expect = path.iter().position(|&p| p == t).map(|i| i as u64 + 1);
        prop_assert_eq!(lpath_hit_index(a, b, t), expect);
    }

    #[test]
    fn leg_queries_match_stepping(
        center in point(20),
        start in 0u64..300,
        len in 0u64..300,
        cut in 0u64..400,
        target in point(30),
    ) {
        let leg = Leg::Spiral { center, start, end: start + len };
        let steps: Vec<Point> = leg.steps().collect();
        prop_assert_eq!(&steps, &rewalk(&leg));
        let expect = steps.iter().position(|&p| p == target).map(|i| i as u64 + 1);
        prop_assert_eq!(leg.hit_offset(target), expect);
        if 0 < cut && cut < len {
            let (head, tail) = leg.split_at(cut);
            prop_assert_eq!(head.len(), cut);
            let joined: Vec<Point> = head.steps().chain(tail.steps()).collect();
            prop_assert_eq!(joined, steps);
        }
    }

    #[test]
    fn sphere_samples_lie_on_sphere(d in 1u64..10_000, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(sample_sphere(d, &mut rng).norm1(), d);
    }

    #[test]
    fn guess_sets_hold_the_count(k in 4u64..(1 << 62)) {
        let log_k = Algorithm::LogK { rho: 1.0 };
        let a = oracle_assign(AdviceScheme::LogK, k).unwrap();
        match log_k.program(&a).unwrap() {
            AgentProgram::Interleaved { assumed } => {
                prop_assert!(assumed.iter().any(|&g| g <= k && k < 2 * g));
            }
            other => prop_assert!(false, "{other:?}"),
        }
        for epsilon in [0.5, 1.0] {
            let psi = Algorithm::Psi { epsilon, rho: 1.0 };
            match psi.program(&psi.advice(k).unwrap()).unwrap() {
                AgentProgram::Interleaved { assumed } => {
                    prop_assert!(assumed.contains(&(1 << k.ilog2())));
                }
                other => prop_assert!(false, "{other:?}"),
            }
        }
    }

    #[test]
    fn summary_statistics_are_sane(xs in prop::collection::vec(1u64..1_000_000, 1..80), cens in 0u64..5) {
        let s = summarize(&xs, cens);
        let (lo, hi) = (*xs.iter().min().unwrap() as f64, *xs.iter().max().unwrap() as f64);
        let mean = s.mean.unwrap();
        prop_assert!(lo <= mean && mean <= hi);
        let median = s.median.unwrap();
        prop_assert!(lo <= median && median <= hi);
        prop_assert_eq!(s.ci95.is_none(), xs.len() == 1);
        prop_assert!(s.ci95.unwrap_or(0.0) >= 0.0);
        prop_assert_eq!(s.censored, cens);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modes_agree(alg in algorithm(), d in 1u64..40, extra in 0u64..12, seed in any::<u64>(), trial in 0u64..1000) {
        let world = WorldConfig {
            distance: d,
            placement: Placement::RandomOnSphere,
            agents: alg.min_agents() + extra,
            cap: 30_000,
        };
        let cell = Cell::new(alg, world).unwrap();
        let a = cell.run_trial(seed, 0, trial, Mode::PhaseLevel);
        let b = cell.run_trial(seed, 0, trial, Mode::StepLevel);
        prop_assert_eq!(a.hitting_time, b.hitting_time);
        prop_assert_eq!(a.finder, b.finder);
        prop_assert_eq!(&a.phases, &b.phases);
        if let Some(t) = a.hitting_time {
            prop_assert!(t >= d);
        }
    }

    #[test]
    fn more_agents_never_hurt(alg in algorithm(), d in 1u64..40, seed in any::<u64>(), target_idx in any::<u64>()) {
        let k = alg.min_agents().max(4);
        let program = alg.program(&alg.advice(k).unwrap()).unwrap();
        let treasure = ants_core::grid::nth_node_at_distance(d, target_idx % (4 * d)).unwrap();
        let keys: Vec<StreamKey> = (0..12).map(|agent| StreamKey { master: seed, cell: 0, trial: 0, agent }).collect();
        let mut prev: Option<u64> = None;
        for n in 1..=keys.len() {
            let t = system_hitting_time(&program, &keys[..n], treasure, 20_000, Mode::PhaseLevel).hitting_time;
            if let Some(p) = prev {
                prop_assert!(t.is_some_and(|t| t <= p));
            }
            prev = t.or(prev);
        }
    }

    #[test]
    fn trajectory_matches_rewalk(alg in algorithm(), seed in any::<u64>(), horizon in 0u64..5000) {
        let k = alg.min_agents();
        let program = alg.program(&alg.advice(k).unwrap()).unwrap();
        let key = StreamKey { master: seed, cell: 0, trial: 0, agent: 0 };

        let mut walked = Vec::new();
        let mut cursor = program.spawn(key.rng());
        walk_trajectory(&mut cursor, horizon, |_, p| {
            walked.push(p);
            ControlFlow::Continue(())
        });

        let mut expect = Vec::new();
        let mut cursor = program.spawn(key.rng());
        while (expect.len() as u64) < horizon {
            match cursor.next_leg() {
                Some(leg) => expect.extend(rewalk(&leg)),
                None => break,
            }
        }
        expect.truncate(horizon as usize);
        prop_assert_eq!(&walked, &expect);

        // first visit of any walked node agrees with the hitting time query
        if let Some(&target) = walked.last() {
            let first = walked.iter().position(|&p| p == target).unwrap() as u64 + 1;
            let mut cursor = program.spawn(key.rng());
            prop_assert_eq!(agent_hitting_time(&mut cursor, target, horizon, Mode::PhaseLevel), Some(first));
        }
    }
}

#[test]
fn ring_counts_match_visited_set() {
    let rings = RingSpec::new(64).unwrap();
    let program = AgentProgram::known_k(2);
    let horizon = 6000;
    let stats = measure_coverage(&program, 2, &rings, horizon, 1, 4);
    let mut seen = HashSet::new();
    for agent in 0..2 {
        let key = StreamKey { master: 4, cell: 0, trial: 0, agent };
        let mut cursor = program.spawn(key.rng());
        walk_trajectory(&mut cursor, horizon, |_, p| {
            seen.insert(p);
            ControlFlow::Continue(())
        });
    }
    for r in &stats.rings {
        let expect = seen
            .iter()
            .filter(|p| r.inner < p.norm1() && p.norm1() <= r.outer)
            .count() as u64;
        assert_eq!(r.visited, vec![expect], "ring {}", r.index);
        assert!(expect <= r.size && expect <= horizon * 2);
    }
}

#[test]
fn coverage_grows_with_horizon() {
    let rings = RingSpec::new(256).unwrap();
    let program = AgentProgram::known_k(4);
    let mut prev = vec![0u64; rings.count() as usize];
    for horizon in [0, 100, 1000, 5000, 20_000] {
        let s = measure_coverage(&program, 4, &rings, horizon, 1, 7);
        let now: Vec<u64> = s.rings.iter().map(|r| r.visited[0]).collect();
        assert!(prev.iter().zip(&now).all(|(a, b)| a <= b), "{prev:?} -> {now:?}");
        prev = now;
    }
}
