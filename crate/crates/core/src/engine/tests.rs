use super::*;
use crate::protocols::{AgentState, Phase};

fn seed(run: u64) -> RunSeed {
    RunSeed { master: 42, run }
}

#[test]
fn two_agents_initiate_equally_often() {
    let mut coin = SeededCoin::new(1);
    let trials = 100_000;
    let zero_first = (0..trials)
        .filter(|_| sample_pair(2, &mut coin) == (0, 1))
        .count();
    let p = zero_first as f64 / trials as f64;
    assert!((p - 0.5).abs() <= 0.01, "{p}");
}

#[test]
fn pairs_are_distinct_and_in_range() {
    let mut coin = SeededCoin::new(2);
    for _ in 0..10_000 {
        let (u, v) = sample_pair(7, &mut coin);
        assert!(u < 7 && v < 7 && u != v);
    }
}

#[test]
fn step_needs_two_agents() {
    let protocol = EpidemicProtocol;
    let mut pop = Population::new(vec![1u64]);
    let err = step(&mut pop, &protocol, &mut SeededCoin::new(0)).unwrap_err();
    assert_eq!(err, EngineError::PopulationTooSmall);
    assert_eq!(err.to_string(), "population too small");
}

#[test]
fn step_sequence_is_deterministic() {
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let trace = || {
        let mut pop = Population::new(vec![protocol.initial(0, 100); 100]);
        let mut coin = SeededCoin::new(9);
        for _ in 0..10_000 {
            step(&mut pop, &protocol, &mut coin).unwrap();
        }
        pop.states().to_vec()
    };
    assert_eq!(trace(), trace());
}

#[test]
fn only_the_initiator_changes() {
    let protocol = ChvpProtocol {
        start: 50,
        spread: true,
    };
    let mut pop = Population::new((0..10).map(|i| protocol.initial(i, 10)).collect());
    let mut coin = SeededCoin::new(4);
    for _ in 0..1000 {
        let before = pop.states().to_vec();
        let rec = step(&mut pop, &protocol, &mut coin).unwrap();
        for (i, (a, b)) in before.iter().zip(pop.states()).enumerate() {
            if i != rec.initiator {
                assert_eq!(a, b);
            }
        }
        assert_eq!(
            pop.states()[rec.initiator],
            (before[rec.initiator].max(before[rec.responder])) - 1
        );
    }
}

#[test]
fn epidemic_informs_everyone_within_bound() {
    let n = 1024;
    let bound = (4.0 * 3.0 * n as f64 * (n as f64).log2()) as u64;
    let protocol = EpidemicProtocol;
    let mut done = 0;
    for r in 0..100 {
        let mut pop = Population::new((0..n).map(|i| protocol.initial(i, n)).collect());
        let mut coin = seed(r).coin();
        for _ in 0..bound {
            step(&mut pop, &protocol, &mut coin).unwrap();
        }
        if pop.states().iter().all(|&x| x == 1) {
            done += 1;
        }
    }
    assert!(done >= 99, "{done}");
}

#[test]
fn one_snapshot_per_unit_time() {
    let record = run(&RunConfig::new(1000, 10.0), &EpidemicProtocol, seed(0)).unwrap();
    assert_eq!(record.snapshots.len(), 10);
    for (i, s) in record.snapshots.iter().enumerate() {
        assert_eq!(s.parallel_time, (i + 1) as f64);
        assert_eq!(s.phase_counts, [0, 0, 0]);
    }
}

#[test]
fn fractional_duration_ends_with_partial_snapshot() {
    let record = run(&RunConfig::new(100, 2.5), &EpidemicProtocol, seed(0)).unwrap();
    let times: Vec<f64> = record.snapshots.iter().map(|s| s.parallel_time).collect();
    assert_eq!(times, vec![1.0, 2.0, 2.5]);
}

#[test]
fn final_snapshot_only() {
    let mut config = RunConfig::new(100, 5.0);
    config.record_snapshots = false;
    let record = run(&config, &EpidemicProtocol, seed(0)).unwrap();
    assert_eq!(record.snapshots.len(), 1);
    assert_eq!(record.snapshots[0].parallel_time, 5.0);
}

#[test]
fn removal_applies_at_next_boundary() {
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let config = RunConfig::new(1000, 1400.0).with_schedule(vec![AdversaryEvent::remove(
        1350.0,
        950,
        RemovalPolicy::UniformRandom,
    )]);
    let record = run(&config, &protocol, seed(3)).unwrap();
    let at = |t: f64| {
        record
            .snapshots
            .iter()
            .find(|s| s.parallel_time == t)
            .unwrap()
    };
    assert_eq!(at(1350.0).n, 1000);
    assert_eq!(at(1351.0).n, 50);
    assert_eq!(record.snapshots.last().unwrap().parallel_time, 1400.0);
}

#[test]
fn fractional_event_time_waits_for_boundary() {
    let config = RunConfig::new(100, 4.0).with_schedule(vec![AdversaryEvent::add(1.5, 100)]);
    let record = run(&config, &EpidemicProtocol, seed(0)).unwrap();
    let sizes: Vec<u64> = record.snapshots.iter().map(|s| s.n).collect();
    assert_eq!(sizes, vec![100, 100, 200, 200]);
}

#[test]
fn remove_to_five_percent() {
    let protocol = EpidemicProtocol;
    let mut pop = Population::new(vec![0u64; 10_000]);
    let event = AdversaryEvent::remove(0.0, 9500, RemovalPolicy::UniformRandom);
    apply_adversary_event(&mut pop, &event, &protocol, &mut SeededCoin::new(0)).unwrap();
    assert_eq!(pop.len(), 500);
}

#[test]
fn adding_nothing_is_a_no_op() {
    let protocol = EpidemicProtocol;
    let mut pop = Population::new(vec![0u64; 10]);
    let before = pop.clone();
    apply_adversary_event(
        &mut pop,
        &AdversaryEvent::add(0.0, 0),
        &protocol,
        &mut SeededCoin::new(0),
    )
    .unwrap();
    assert_eq!(pop, before);
}

#[test]
fn removing_all_but_one_is_rejected() {
    let protocol = EpidemicProtocol;
    let mut pop = Population::new(vec![0u64; 10]);
    let event = AdversaryEvent::remove(0.0, 9, RemovalPolicy::UniformRandom);
    let err = apply_adversary_event(&mut pop, &event, &protocol, &mut SeededCoin::new(0));
    assert_eq!(err, Err(EngineError::PopulationTooSmall));
    assert_eq!(pop.len(), 10);
    assert!(matches!(
        validate_schedule(10, &[event]),
        Err(EngineError::InvalidSchedule { index: 0, .. })
    ));
}

#[test]
fn targeted_removal_takes_extremes() {
    let protocol = ChvpProtocol {
        start: 0,
        spread: false,
    };
    let mut pop = Population::new(vec![5i64, 9, 1, 9, 3]);
    let event = AdversaryEvent::remove(0.0, 2, RemovalPolicy::LargestEstimateFirst);
    apply_adversary_event(&mut pop, &event, &protocol, &mut SeededCoin::new(0)).unwrap();
    assert_eq!(pop.states(), &[5, 1, 3]);
    let event = AdversaryEvent::remove(0.0, 1, RemovalPolicy::SmallestEstimateFirst);
    apply_adversary_event(&mut pop, &event, &protocol, &mut SeededCoin::new(0)).unwrap();
    assert_eq!(pop.states(), &[5, 3]);
    assert_eq!(pop.ids(), &[0, 4]);
}

#[test]
fn joined_agents_get_fresh_ids_and_state() {
    let params = ProtocolParams::empirical();
    let protocol = DscProtocol::with_initial_estimate(params, 60).unwrap();
    let mut pop = Population::new(vec![protocol.initial(0, 2); 2]);
    apply_adversary_event(
        &mut pop,
        &AdversaryEvent::add(0.0, 2),
        &protocol,
        &mut SeededCoin::new(0),
    )
    .unwrap();
    assert_eq!(pop.ids(), &[0, 1, 2, 3]);
    assert_eq!(pop.states()[0].max, 60);
    assert_eq!(pop.states()[3], crate::protocols::init_state(&params));
}

#[test]
fn invalid_configs_are_rejected() {
    let p = EpidemicProtocol;
    assert!(matches!(
        run(&RunConfig::new(1, 1.0), &p, seed(0)),
        Err(EngineError::InvalidConfig(_))
    ));
    assert!(matches!(
        run(&RunConfig::new(10, 0.0), &p, seed(0)),
        Err(EngineError::InvalidConfig(_))
    ));
    let unordered = vec![AdversaryEvent::add(5.0, 1), AdversaryEvent::add(2.0, 1)];
    assert!(matches!(
        run(
            &RunConfig::new(10, 10.0).with_schedule(unordered),
            &p,
            seed(0)
        ),
        Err(EngineError::InvalidSchedule { index: 1, .. })
    ));
}

#[test]
fn time_never_exceeds_global_ceiling() {
    let params = ProtocolParams::empirical();
    let protocol = DscProtocol::new(params);
    for r in 0..3 {
        let mut pop = Population::new(vec![protocol.initial(0, 200); 200]);
        let mut coin = seed(r).coin();
        for _ in 0..200 * 300 {
            step(&mut pop, &protocol, &mut coin).unwrap();
            let global = pop
                .states()
                .iter()
                .map(AgentState::effective_max)
                .max()
                .unwrap();
            let ceiling = params.tau1() * global as i64;
            assert!(pop.states().iter().all(|s| s.time <= ceiling));
        }
    }
}

#[test]
fn phase_counts_cover_population() {
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let config = RunConfig::new(500, 100.0).with_schedule(vec![AdversaryEvent::add(50.0, 100)]);
    let record = run(&config, &protocol, seed(1)).unwrap();
    for s in &record.snapshots {
        assert_eq!(s.phase_counts.iter().sum::<u64>(), s.n);
        assert!(s.est_min <= s.est_median && s.est_median <= s.est_max);
    }
    assert_eq!(record.snapshots.last().unwrap().n, 600);
    assert_eq!(Phase::ALL.len(), 3);
}

#[test]
fn runs_depend_only_on_seed() {
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let config = RunConfig::new(300, 50.0).with_reset_log(true);
    let a = run(&config, &protocol, seed(5)).unwrap();
    let b = run(&config, &protocol, seed(5)).unwrap();
    let c = run(&config, &protocol, seed(6)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.snapshots, c.snapshots);
}

#[test]
fn reset_log_matches_snapshot_counts() {
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let config = RunConfig::new(300, 100.0).with_reset_log(true);
    let record = run(&config, &protocol, seed(8)).unwrap();
    let logged = record.resets.as_ref().unwrap();
    let counted: u64 = record.snapshots.iter().map(|s| s.resets).sum();
    assert_eq!(logged.len() as u64, counted);
    assert!(logged
        .windows(2)
        .all(|w| w[0].parallel_time <= w[1].parallel_time));
}

#[test]
fn observer_sees_every_snapshot() {
    let mut seen = Vec::new();
    let record = run_observed(
        &RunConfig::new(50, 6.0),
        &EpidemicProtocol,
        seed(0),
        |pop, snap| {
            assert_eq!(pop.len() as u64, snap.n);
            seen.push(snap.parallel_time);
        },
    )
    .unwrap();
    assert_eq!(
        seen,
        record
            .snapshots
            .iter()
            .map(|s| s.parallel_time)
            .collect::<Vec<_>>()
    );
}
