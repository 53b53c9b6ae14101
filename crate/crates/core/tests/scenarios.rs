use immersed_fsi::bench::{run_scenario, stability_sweep, Scenario};
use immersed_fsi::schemes::SchemeKind;
use immersed_fsi::Error;

#[test]
fn zero_length_run_returns_the_initial_state() {
    let sc = Scenario::ellipse_relax();
    let config = sc.scheme(SchemeKind::Monolithic, 0, 0.01, 0.0);
    let out = run_scenario(&sc, sc.resolution(8), &config, 0, &mut |_, _| {}).unwrap();
    assert_eq!(out.records.len(), 1);
    assert_eq!(out.state, out.initial);
}

#[test]
fn observer_sees_every_step_in_order() {
    let sc = Scenario::ellipse_relax();
    let config = sc.scheme(SchemeKind::InertialSplitCorrected, 1, 0.01, 0.05);
    let mut seen = Vec::new();
    run_scenario(&sc, sc.resolution(8), &config, 5, &mut |rec, state| {
        assert_eq!(rec.n, state.step);
        seen.push(rec.n);
    })
    .unwrap();
    assert_eq!(seen, vec![0, 1, 2, 3, 4, 5]);
}

#[test]
fn steady_circle_energy_decays_under_every_unconditional_scheme() {
    let sc = Scenario::steady_circle();
    for (kind, r) in [
        (SchemeKind::Monolithic, 0),
        (SchemeKind::MonolithicLinearized, 0),
        (SchemeKind::InertialSplitCorrected, 0),
    ] {
        let config = sc.scheme(kind, r, 0.02, 0.2);
        let out = run_scenario(&sc, sc.resolution(8), &config, 10, &mut |_, _| {}).unwrap();
        let e0 = out.records[0].energy;
        for rec in &out.records {
            assert!(rec.energy <= e0 * (1.0 + 1e-12), "{kind}: step {}", rec.n);
        }
    }
}

#[test]
fn linearized_monolithic_satisfies_the_energy_identity() {
    let sc = Scenario::ellipse_relax();
    let config = sc.scheme(SchemeKind::MonolithicLinearized, 0, 0.05, 0.5);
    let out = run_scenario(&sc, sc.resolution(8), &config, 10, &mut |_, _| {}).unwrap();
    let e0 = out.records[0].energy;
    for rec in &out.records {
        assert!((rec.energy + rec.dissipation_cum - e0).abs() <= 1e-10 * e0);
    }
}

#[test]
fn plain_split_beyond_its_restriction_is_flagged() {
    let sc = Scenario::ellipse_relax();
    let points = stability_sweep(&sc, sc.resolution(8), SchemeKind::InertialSplit, 1, &[1e-3, 0.2], 5).unwrap();
    assert!(points[0].aborted.is_none() && points[0].stable);
    assert!(points[0].cfl.satisfied);
    assert!(!points[1].cfl.satisfied);
    assert!(!points[1].cfl.unconditional);
}

#[test]
fn invalid_time_step_is_rejected_before_running() {
    let sc = Scenario::ellipse_relax();
    let config = sc.scheme(SchemeKind::Monolithic, 0, -0.1, 0.0);
    let err = run_scenario(&sc, sc.resolution(8), &config, 1, &mut |_, _| {}).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn failed_sweep_points_are_recorded_and_the_sweep_continues() {
    let sc = Scenario::ellipse_relax();
    let points = stability_sweep(&sc, sc.resolution(16), SchemeKind::InertialSplit, 1, &[0.05, 1e-3], 40).unwrap();
    assert_eq!(points.len(), 2);
    assert!(!points[0].stable);
    assert!(points[0].aborted.is_some());
    assert!(points[1].stable);
}
