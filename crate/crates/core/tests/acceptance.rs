//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Failures are reported but do
//! not change the exit status unless `ACCEPTANCE_STRICT=1` is set, so the
//! full workspace test run stays usable while known gaps are documented.

use std::time::{Duration, Instant};

use immersed_fsi::assembly::{assemble_coupling, assemble_solid};
use immersed_fsi::bench::{
    convergence_study, run_scenario, stability_sweep, stokes_mms, with_thread_cap, Scenario, StudyPlan, StudyTable,
    SweepPoint,
};
use immersed_fsi::diagnostics::EnergyRecord;
use immersed_fsi::mesh::{build_ellipse, build_unit_square, cut_segment, FluidMesh, SolidMesh};
use immersed_fsi::schemes::SchemeKind;
use immersed_fsi::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

struct Suite {
    failed: Vec<usize>,
}

impl Suite {
    fn check(&mut self, id: usize, name: &str, budget: Option<Duration>, f: impl FnOnce() -> Result<Verdict>) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (mut pass, mut detail) = match outcome {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if let Some(limit) = budget {
            if elapsed > limit {
                pass = false;
                detail.push_str(&format!("; over the {} s budget", limit.as_secs()));
            }
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name}: {detail} [{:.1} s]", elapsed.as_secs_f64());
        if !pass {
            self.failed.push(id);
        }
    }
}

const SWEEP_TAUS: [f64; 6] = [0.04, 0.08, 0.16, 0.32, 0.64, 1.28];
const SWEEP_STEPS: usize = 100;
const SWEEP_N: usize = 32;

fn sweep(kind: SchemeKind, r: usize) -> Result<Vec<SweepPoint>> {
    let sc = Scenario::ellipse_relax();
    stability_sweep(&sc, sc.resolution(SWEEP_N), kind, r, &SWEEP_TAUS, SWEEP_STEPS)
}

fn sweep_verdict(points: &[SweepPoint]) -> Verdict {
    let bad: Vec<String> = points
        .iter()
        .filter(|p| !p.stable)
        .map(|p| match &p.aborted {
            Some(msg) => format!("tau {} ({msg})", p.tau),
            None => format!("tau {}", p.tau),
        })
        .collect();
    let worst = points
        .iter()
        .filter(|p| p.bound.is_finite())
        .map(|p| p.max_energy / p.bound)
        .fold(f64::NAN, f64::max);
    let ratio = if worst.is_nan() { String::new() } else { format!(", max E/bound {worst:.6}") };
    if bad.is_empty() {
        verdict(true, format!("{} of {} step sizes within the bound{ratio}", points.len(), points.len()))
    } else {
        verdict(false, format!("bound violated for {}{ratio}", bad.join(", ")))
    }
}

fn sweep_records(points: &[SweepPoint]) -> impl Iterator<Item = &EnergyRecord> {
    points.iter().flat_map(|p| p.records.iter())
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn time_study(kind: SchemeKind, r: usize) -> Result<StudyTable> {
    let sc = Scenario::ellipse_relax();
    let taus = vec![0.064, 0.032, 0.016, 0.008];
    let plan = StudyPlan::Time { n: 64, tau_ref: 0.008 / 8.0, taus, t_eval: 0.064 };
    convergence_study(&plan, &sc, &sc.scheme(kind, r, 0.064, 0.064))
}

fn rates(table: &StudyTable, pick: impl Fn(&immersed_fsi::bench::StudyRow) -> Option<f64>) -> Vec<f64> {
    table.rows.iter().filter_map(pick).collect()
}

fn fmt_rates(rs: &[f64]) -> String {
    let parts: Vec<String> = rs.iter().map(|r| format!("{r:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

fn time_verdict(table: &StudyTable) -> (bool, String) {
    let rs = rates(table, |r| r.rate_total);
    let monotone = table.rows.windows(2).all(|w| w[1].errors.total < w[0].errors.total);
    let ok = monotone && rs.len() == 3 && rs.iter().all(|r| (0.7..=1.3).contains(r));
    (ok, format!("rates {}{}", fmt_rates(&rs), if monotone { "" } else { ", errors not decreasing" }))
}

fn random_placement(rng: &mut ChaCha8Rng) -> (FluidMesh, SolidMesh, Vec<[f64; 2]>) {
    let n = [7, 8, 13, 16, 32][rng.gen_range(0..5)];
    let fluid = build_unit_square(n).unwrap();
    loop {
        let center = [rng.gen_range(0.3..0.7), rng.gen_range(0.3..0.7)];
        let a = rng.gen_range(0.05..0.25);
        let b = rng.gen_range(0.05..0.25);
        let m = rng.gen_range(8..80);
        let Ok(solid) = build_ellipse(center, a, b, m) else { continue };
        let jitter = 0.2 * solid.h();
        let moved: Vec<[f64; 2]> = solid
            .nodes()
            .iter()
            .map(|x| [x[0] + rng.gen_range(-jitter..jitter), x[1] + rng.gen_range(-jitter..jitter)])
            .collect();
        return (fluid, solid, moved);
    }
}

/// Largest violation of the assembly identities over one placement.
fn assembly_defects(fluid: &FluidMesh, solid: &SolidMesh, moved: &[[f64; 2]]) -> Result<(f64, f64, f64)> {
    let model = Scenario::ellipse_relax().solid;
    let blocks = assemble_solid(solid, &model);
    let ns = 2 * solid.num_nodes();
    let mut ls_vs_ms: f64 = 0.0;
    for i in 0..ns {
        for j in 0..ns {
            ls_vs_ms = ls_vs_ms.max((blocks.multiplier.get(i, j) - blocks.mass.get(i, j)).abs());
        }
    }

    let mut cut_defect: f64 = 0.0;
    for seg in solid.segments() {
        let (p0, p1) = (moved[seg[0]], moved[seg[1]]);
        let cut = cut_segment(fluid, p0, p1)?;
        let mut t = 0.0;
        for piece in &cut.pieces {
            cut_defect = cut_defect.max((piece.t_start - t).abs());
            t = piece.t_end;
            let mid = 0.5 * (piece.t_start + piece.t_end) / cut.length;
            let x = [p0[0] + mid * (p1[0] - p0[0]), p0[1] + mid * (p1[1] - p0[1])];
            let bary = fluid.barycentric(piece.triangle, x);
            let outside = bary.iter().map(|&l| (-l).max(0.0)).fold(0.0, f64::max);
            cut_defect = cut_defect.max(outside);
        }
        cut_defect = cut_defect.max((t - cut.length).abs());
    }

    // Constant fields are reproduced exactly, and so are linear ones because
    // the trace of a P1 field along a straight piece is linear.
    let lf = assemble_coupling(fluid, solid, moved)?;
    let ls = &blocks.multiplier;
    let nv = fluid.num_vertices();
    let fields: [&dyn Fn([f64; 2]) -> [f64; 2]; 3] =
        [&|_| [1.0, 0.0], &|_| [0.0, 1.0], &|x| [0.3 + 2.0 * x[0] - x[1], -1.0 + 0.5 * x[0] + 3.0 * x[1]]];
    let mut lf_defect: f64 = 0.0;
    for field in fields {
        let u: Vec<f64> = fluid.vertices().iter().flat_map(|&x| field(x)).collect();
        let at_nodes: Vec<f64> = moved.iter().flat_map(|&x| field(x)).collect();
        debug_assert_eq!(u.len(), 2 * nv);
        let lhs = lf.mul_vec(&u);
        let rhs = ls.mul_vec(&at_nodes);
        lf_defect = lf_defect.max(max_of(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs())));
    }
    Ok((ls_vs_ms, cut_defect, lf_defect))
}

fn main() {
    let mut suite = Suite { failed: Vec::new() };
    let total = Instant::now();

    suite.check(1, "energy identity", Some(Duration::from_secs(30)), || {
        let sc = Scenario::ellipse_relax();
        let config = sc.scheme(SchemeKind::Monolithic, 0, 0.05, 2.5);
        let out = run_scenario(&sc, sc.resolution(16), &config, 50, &mut |_, _| {})?;
        let e0 = out.records[0].energy;
        let worst = max_of(out.records.iter().map(|r| (r.energy + r.dissipation_cum - e0).abs() / e0));
        Ok(verdict(worst <= 1e-8, format!("max |E+D-E0|/E0 = {worst:.2e} over {} steps (tol 1e-8)", out.records.len() - 1)))
    });

    let mut mono = None;
    suite.check(2, "monolithic unconditional stability", Some(Duration::from_secs(180)), || {
        let points = sweep(SchemeKind::Monolithic, 0)?;
        let v = sweep_verdict(&points);
        mono = Some(points);
        Ok(v)
    });

    let mut corrected_r0 = None;
    suite.check(3, "corrected split r=0 stability", None, || {
        let points = sweep(SchemeKind::InertialSplitCorrected, 0)?;
        let v = sweep_verdict(&points);
        corrected_r0 = Some(points);
        Ok(v)
    });

    let mut corrected_r1 = None;
    suite.check(4, "corrected split r=1 stability", None, || {
        let points = sweep(SchemeKind::InertialSplitCorrected, 1)?;
        let v = sweep_verdict(&points);
        corrected_r1 = Some(points);
        Ok(v)
    });

    suite.check(5, "fractional-velocity identity", None, || {
        let (Some(r0), Some(r1)) = (&corrected_r0, &corrected_r1) else {
            return Ok(verdict(false, "sweeps of criteria 3 and 4 did not complete"));
        };
        // r = 2 is only stable under a step restriction, so it runs below it.
        let sc = Scenario::ellipse_relax();
        let config = sc.scheme(SchemeKind::InertialSplitCorrected, 2, 0.002, 0.1);
        let r2 = run_scenario(&sc, sc.resolution(SWEEP_N), &config, 50, &mut |_, _| {})?;
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for rec in sweep_records(r0).chain(sweep_records(r1)).chain(r2.records.iter()).filter(|r| r.n > 0) {
            match rec.frac_identity_residual {
                Some(res) => worst = worst.max(res),
                None => return Ok(verdict(false, format!("no residual recorded at step {}", rec.n))),
            }
            count += 1;
        }
        Ok(verdict(worst <= 1e-9, format!("max residual {worst:.2e} over {count} steps, r = 0, 1, 2 (tol 1e-9)")))
    });

    suite.check(6, "kinematic constraint", None, || {
        let (Some(m), Some(r0), Some(r1)) = (&mono, &corrected_r0, &corrected_r1) else {
            return Ok(verdict(false, "sweeps of criteria 2 to 4 did not complete"));
        };
        let worst_mono = max_of(sweep_records(m).map(|r| r.kinematic_residual));
        let worst_split = max_of(sweep_records(r0).chain(sweep_records(r1)).map(|r| r.kinematic_residual));
        let steps = sweep_records(m).chain(sweep_records(r0)).chain(sweep_records(r1)).count();
        Ok(verdict(
            worst_mono <= 1e-9 && worst_split <= 1e-9,
            format!("monolithic {worst_mono:.2e}, corrected split {worst_split:.2e} over {steps} records (tol 1e-9)"),
        ))
    });

    let mut mono_time_csv = None;
    suite.check(7, "time-convergence rates", Some(Duration::from_secs(600)), || {
        let mono = time_study(SchemeKind::Monolithic, 0)?;
        let corrected = time_study(SchemeKind::InertialSplitCorrected, 1)?;
        let (ok_m, d_m) = time_verdict(&mono);
        let (ok_a, d_a) = time_verdict(&corrected);
        mono_time_csv = Some((mono.error_rows(), mono.field_rows()));
        Ok(verdict(ok_m && ok_a, format!("monolithic {d_m}; corrected split r=1 {d_a}; required [0.7, 1.3]")))
    });

    suite.check(8, "space-convergence rates", None, || {
        let sc = Scenario::steady_circle();
        let plan = StudyPlan::Space { tau: 5e-4, ns: vec![8, 16, 32, 64], n_ref: 128, t_eval: 1e-3 };
        let table = convergence_study(&plan, &sc, &sc.scheme(SchemeKind::Monolithic, 0, 5e-4, 1e-3))?;
        let rs = rates(&table, |r| r.rate_total);
        let ok = rs.len() == 3 && rs.iter().all(|r| (0.6..=1.05).contains(r));
        Ok(verdict(ok, format!("total-error rates {} (required [0.6, 1.05])", fmt_rates(&rs))))
    });

    suite.check(9, "global field rates", None, || {
        let sc = Scenario::steady_circle();
        let plan = StudyPlan::Global {
            ns: vec![8, 16, 32, 64],
            taus: vec![0.064, 0.032, 0.016, 0.008],
            n_ref: 128,
            tau_ref: 0.001,
            t_eval: 0.064,
        };
        let table = convergence_study(&plan, &sc, &sc.scheme(SchemeKind::Monolithic, 0, 0.064, 0.064))?;
        let last = table.last_row();
        let get = |r: Option<f64>| r.unwrap_or(f64::NAN);
        let (u, p, d, v) = (get(last.rate_u), get(last.rate_p), get(last.rate_d), get(last.rate_ddot));
        let checks = [
            ("u", u, u >= 1.2, ">= 1.2"),
            ("p", p, (0.25..=0.6).contains(&p), "in [0.25, 0.6]"),
            ("d", d, (0.6..=1.05).contains(&d), "in [0.6, 1.05]"),
            ("ddot", v, (0.6..=1.3).contains(&v), "in [0.6, 1.3]"),
        ];
        let detail: Vec<String> = checks
            .iter()
            .map(|(name, val, ok, want)| format!("{name} {val:.3}{}", if *ok { String::new() } else { format!(" (not {want})") }))
            .collect();
        Ok(verdict(checks.iter().all(|c| c.2), format!("finest-pair rates {}", detail.join(", "))))
    });

    suite.check(10, "Stokes manufactured solution", Some(Duration::from_secs(120)), || {
        let sc = Scenario::ellipse_relax();
        let rows = stokes_mms(&[8, 16, 32, 64], 1.0, sc.gamma)?;
        let last = rows.last().expect("four meshes");
        let get = |r: Option<f64>| r.unwrap_or(f64::NAN);
        let (h1, l2, p) = (get(last.rate_u_h1), get(last.rate_u_l2), get(last.rate_p_l2));
        let ok = (h1 - 1.0).abs() <= 0.15 && (l2 - 2.0).abs() <= 0.2 && p >= 0.9;
        Ok(verdict(ok, format!("velocity H1 {h1:.3}, velocity L2 {l2:.3}, pressure L2 {p:.3}")))
    });

    suite.check(11, "assembly oracles", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let (mut ls, mut cut, mut lf) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..50 {
            let (fluid, solid, moved) = random_placement(&mut rng);
            let (a, b, c) = assembly_defects(&fluid, &solid, &moved)?;
            ls = ls.max(a);
            cut = cut.max(b);
            lf = lf.max(c);
        }
        Ok(verdict(
            ls <= 1e-14 && cut <= 1e-12 && lf <= 1e-12,
            format!("50 placements: |L_s - M_s| {ls:.1e} (tol 1e-14), cut partition {cut:.1e}, L_f consistency {lf:.1e} (tol 1e-12)"),
        ))
    });

    suite.check(12, "determinism across thread caps", None, || {
        let Some(reference) = &mono_time_csv else {
            return Ok(verdict(false, "study of criterion 7 did not complete"));
        };
        let capped = |threads| {
            with_thread_cap(Some(threads), || time_study(SchemeKind::Monolithic, 0))
                .map(|t| (t.error_rows(), t.field_rows()))
        };
        let one = capped(1)?;
        let two = capped(2)?;
        let same = one == two && &one == reference;
        Ok(verdict(same, if same { "CSV rows identical for caps 1, 2 and default" } else { "CSV rows differ" }))
    });

    println!(
        "acceptance: {} of 12 criteria passed in {:.0} s",
        12 - suite.failed.len(),
        total.elapsed().as_secs_f64()
    );
    if !suite.failed.is_empty() {
        println!("acceptance: failing criteria {:?}", suite.failed);
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
