//! Engine behavior on the synthetic maneuver fixtures.

mod common;

use common::fixtures;

use rulemon_core::engine::{check_trace, builtin_rules, Denominator};
use rulemon_core::monitor::VerdictValue;
use rulemon_core::world::AgentId;

fn flagged(report: &rulemon_core::engine::ViolationReport, rule: &str) -> Vec<u64> {
    report
        .rule(rule)
        .unwrap()
        .flagged_agents()
        .iter()
        .map(|a| a.0)
        .collect()
}

#[test]
fn right_pass_flags_exactly_the_passer() {
    let fixture = fixtures::right_pass("normal", false);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert_eq!(flagged(&report, "no_right_passing"), vec![1]);

    // the monitor decides within the recorded trace
    let rule = report.rule("no_right_passing").unwrap();
    let violating = rule
        .instances
        .iter()
        .find(|i| i.verdict.value == VerdictValue::Violated)
        .unwrap();
    assert_eq!(violating.tuple, vec![AgentId(1), AgentId(2)]);
    // pointwise violations exactly while the ego is still behind (frames
    // 0..=9; the bumpers tie at frame 10)
    assert_eq!(violating.violation_frames, (0..=9).collect::<Vec<_>>());
}

#[test]
fn right_pass_on_acceleration_lane_is_allowed() {
    let fixture = fixtures::right_pass("acceleration", false);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert!(flagged(&report, "no_right_passing").is_empty());
}

#[test]
fn right_pass_in_dense_traffic_is_allowed() {
    let fixture = fixtures::right_pass("normal", true);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert!(flagged(&report, "no_right_passing").is_empty());
}

#[test]
fn slow_left_pass_violates_speed_advantage() {
    let fixture = fixtures::left_pass(1.0);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert_eq!(flagged(&report, "speed_advantage"), vec![1]);
    // and a slow left pass is not a right-passing violation
    assert!(flagged(&report, "no_right_passing").is_empty());
}

#[test]
fn brisk_left_pass_satisfies_speed_advantage() {
    let fixture = fixtures::left_pass(4.0);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert!(flagged(&report, "speed_advantage").is_empty());
    assert!(flagged(&report, "no_right_passing").is_empty());
}

#[test]
fn tailgating_violates_safe_distance_at_every_scene() {
    let fixture = fixtures::tailgate();
    let trace = fixture.trace();
    let report = check_trace(&trace, builtin_rules(), &fixture.params).unwrap();
    assert_eq!(flagged(&report, "safe_distance"), vec![1]);

    let rule = report.rule("safe_distance").unwrap();
    let follower = rule
        .instances
        .iter()
        .find(|i| i.tuple == vec![AgentId(1)])
        .unwrap();
    // violated at all 100 scenes: per-instance fraction 1.0
    assert_eq!(follower.violation_frames.len(), trace.len());
    assert_eq!(follower.premise_frames.len(), trace.len());
    let leader = rule
        .instances
        .iter()
        .find(|i| i.tuple == vec![AgentId(2)])
        .unwrap();
    assert!(leader.violation_frames.is_empty());
}

#[test]
fn safe_distance_metrics_coincide_exactly() {
    for fixture in [
        fixtures::tailgate(),
        fixtures::clean(),
        fixtures::lane_change_quad(),
        fixtures::right_pass("normal", false),
    ] {
        let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
        let per_time = report.metric_per_time();
        let sd = &per_time["safe_distance"];
        assert_eq!(Some(sd.by_total), sd.by_premise_active);
    }
}

#[test]
fn one_of_four_lane_changes_is_unsafe() {
    let fixture = fixtures::lane_change_quad();
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    let rule = report.rule("safe_lane_change").unwrap();
    let ego = rule
        .instances
        .iter()
        .find(|i| i.tuple == vec![AgentId(1)])
        .unwrap();
    assert_eq!(ego.premise_frames, vec![10, 30, 50, 70]);
    assert_eq!(ego.violation_frames, vec![50]);
    let per_time = report.metric_per_time();
    assert_eq!(per_time["safe_lane_change"].by_premise_active, Some(0.25));
}

#[test]
fn compliant_zipper_has_no_violations() {
    let fixture = fixtures::zipper(true);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    let rule = report.rule("zipper_merge").unwrap();
    // the situation is instantiated but not violated
    assert!(!rule.instances.is_empty());
    assert!(flagged(&report, "zipper_merge").is_empty());
}

#[test]
fn blocking_the_zipper_is_one_violation() {
    let fixture = fixtures::zipper(false);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    let rule = report.rule("zipper_merge").unwrap();
    let violating: Vec<_> = rule
        .instances
        .iter()
        .filter(|i| i.verdict.value == VerdictValue::Violated)
        .collect();
    assert_eq!(violating.len(), 1);
    assert_eq!(
        violating[0].tuple,
        vec![AgentId(1), AgentId(2), AgentId(3)]
    );
    assert_eq!(flagged(&report, "zipper_merge"), vec![1]);
}

#[test]
fn accelerating_while_being_overtaken_is_a_violation() {
    let fixture = fixtures::being_overtaken(0.6);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert_eq!(flagged(&report, "being_overtaken"), vec![1]);

    let fixture = fixtures::being_overtaken(0.4);
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert!(flagged(&report, "being_overtaken").is_empty());
}

#[test]
fn clean_fixture_reports_all_zero_metrics() {
    let fixture = fixtures::clean();
    let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
    assert_eq!(report.total_violations(), 0);
    for (_, fraction) in report.metric_once_per_agent(Denominator::AllAgents) {
        assert_eq!(fraction, 0.0);
    }
    for (_, per_time) in report.metric_per_time() {
        assert_eq!(per_time.by_total, 0.0);
    }
}

#[test]
fn single_agent_trace_instantiates_only_unary_rules() {
    let fixture = fixtures::clean();
    let rows: Vec<_> = fixture
        .rows
        .iter()
        .filter(|r| r.track_id == 1)
        .cloned()
        .collect();
    let trace = rulemon_core::world::assemble(rows, fixture.map.clone()).unwrap();
    let prepared: Vec<_> = builtin_rules()
        .into_iter()
        .map(|r| rulemon_core::engine::PreparedRule::new(r, &fixture.params).unwrap())
        .collect();
    let instances = rulemon_core::engine::instantiate(&trace, &prepared);
    assert_eq!(instances.len(), 2);
    let rules: Vec<&str> = instances
        .iter()
        .map(|i| prepared[i.rule_idx].rule.name.as_str())
        .collect();
    assert!(rules.contains(&"safe_lane_change"));
    assert!(rules.contains(&"safe_distance"));
}

#[test]
fn distant_pairs_are_pruned() {
    // two agents 100 m apart, never within 40 m: no pairwise instances
    let fixture = fixtures::clean();
    let trace = fixture.trace();
    let prepared: Vec<_> = builtin_rules()
        .into_iter()
        .map(|r| rulemon_core::engine::PreparedRule::new(r, &fixture.params).unwrap())
        .collect();
    let instances = rulemon_core::engine::instantiate(&trace, &prepared);
    assert!(instances.iter().all(|i| i.tuple.len() == 1));
}

#[test]
fn zipper_fixture_instantiates_the_expected_triple() {
    let fixture = fixtures::zipper(true);
    let trace = fixture.trace();
    let prepared: Vec<_> = builtin_rules()
        .into_iter()
        .map(|r| rulemon_core::engine::PreparedRule::new(r, &fixture.params).unwrap())
        .collect();
    let instances = rulemon_core::engine::instantiate(&trace, &prepared);
    let triples: Vec<_> = instances.iter().filter(|i| i.tuple.len() == 3).collect();
    assert_eq!(triples.len(), 1);
    assert_eq!(
        triples[0].tuple,
        vec![AgentId(1), AgentId(2), AgentId(3)]
    );
}

#[test]
fn monitor_verdict_matches_pointwise_violations() {
    // the monitor flags an instance iff some scene has premise & !conclusion
    for fixture in [
        fixtures::right_pass("normal", false),
        fixtures::left_pass(1.0),
        fixtures::tailgate(),
        fixtures::zipper(false),
        fixtures::zipper(true),
        fixtures::being_overtaken(0.6),
        fixtures::lane_change_quad(),
    ] {
        let report = check_trace(&fixture.trace(), builtin_rules(), &fixture.params).unwrap();
        for rule in &report.rules {
            for instance in &rule.instances {
                assert_eq!(
                    instance.verdict.value == VerdictValue::Violated,
                    !instance.violation_frames.is_empty(),
                    "{} {:?}",
                    rule.rule,
                    instance.tuple
                );
            }
        }
    }
}

#[test]
fn no_instances_yield_an_empty_report() {
    let fixture = fixtures::clean();
    let trace = fixture.trace();
    let prepared: Vec<_> = builtin_rules()
        .into_iter()
        .map(|r| rulemon_core::engine::PreparedRule::new(r, &fixture.params).unwrap())
        .collect();
    let report = rulemon_core::engine::run(&trace, &prepared, &[]);
    assert_eq!(report.total_violations(), 0);
    assert!(report.rules.iter().all(|r| r.instances.is_empty()));
    for (_, per_time) in report.metric_per_time() {
        assert_eq!(per_time.by_total, 0.0);
        assert_eq!(per_time.by_premise_active, None);
    }
}

#[test]
fn reports_are_deterministic_across_worker_counts() {
    let fixture = fixtures::right_pass("normal", true);
    let trace = fixture.trace();
    let render = |workers: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        pool.install(|| {
            let report = check_trace(&trace, builtin_rules(), &fixture.params).unwrap();
            serde_json::to_string_pretty(&report.to_json(Denominator::AllAgents, true)).unwrap()
        })
    };
    let single = render(1);
    let parallel = render(8);
    assert_eq!(single, parallel);
}
