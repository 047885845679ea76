//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gwp_core::dynamics::{lift_state, project_state, DetBranch};
use gwp_core::integrate::{
    convergence_slope, drift_report, integrate_hagedorn, integrate_heller, integrate_trajectory,
    StateSample, TrajectoryRecord,
};
use gwp_core::verify::{run_suite, Suite};

use crate::output::{
    self, CheckEntry, CheckSummary, CompareSummary, PointSummary, SimulateSummary,
};
use crate::scenario::{self, Scenario, SweepPoint};
use crate::{CliError, OUT_DIR_ENV};

fn resolve_out_dir(cli: Option<&Path>, from_scenario: Option<&str>) -> Result<PathBuf, CliError> {
    let dir = cli
        .map(PathBuf::from)
        .or_else(|| from_scenario.map(PathBuf::from))
        .or_else(|| std::env::var(OUT_DIR_ENV).ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Runtime(format!("cannot create output dir {}: {e}", dir.display())))?;
    Ok(dir)
}

fn prefix_for(file: &Path, sc: &Scenario) -> String {
    sc.output
        .prefix
        .clone()
        .unwrap_or_else(|| file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into()))
}

fn drift_numbers(rec: &TrajectoryRecord<f64>) -> (f64, f64, Option<f64>, Option<f64>, f64) {
    match drift_report(std::slice::from_ref(rec)) {
        Ok(summary) => {
            let r = &summary.records[0];
            (r.energy_max, r.energy_final, r.momentum_max, r.onshell_max, r.angular_max)
        }
        Err(_) => (0.0, 0.0, None, None, 0.0),
    }
}

fn run_point(
    sc: &Scenario,
    pt: SweepPoint,
    out_dir: &Path,
    prefix: &str,
    tol: Option<f64>,
) -> Result<PointSummary, CliError> {
    let v = sc.build_potential(pt.lambda)?;
    let prm = sc.sim_params(Some(pt.hbar));
    let spec = sc.step_spec(Some(pt.dt))?;
    let initial = sc.initial_for_formulation(&prm)?;
    let rec = integrate_trajectory(initial, v.as_ref(), &prm, &spec)
        .map_err(|e| CliError::Config(format!("run: {e}")))?;
    let csv = format!("{prefix}_{:03}.csv", pt.index);
    output::write_csv(&out_dir.join(&csv), &rec)
        .map_err(|e| CliError::Runtime(format!("cannot write {csv}: {e}")))?;
    let (energy_max, energy_final, momentum_max, onshell_max, angular_max) = drift_numbers(&rec);
    let termination = rec
        .termination
        .as_ref()
        .map(|t| format!("terminated at t = {}: {}", t.t, t.error));
    Ok(PointSummary {
        index: pt.index,
        hbar: pt.hbar,
        dt: pt.dt,
        lambda: pt.lambda,
        csv,
        samples: rec.len(),
        energy_drift_max: energy_max,
        energy_drift_final: energy_final,
        momentum_residual_max: momentum_max,
        onshell_residual_max: onshell_max,
        angular_drift_max: angular_max,
        termination,
        tol,
        tol_breached: tol.map(|t| energy_max > t),
    })
}

pub fn simulate(file: &Path, out: Option<&Path>, tol: Option<f64>) -> Result<(), CliError> {
    let sc = scenario::load(file)?;
    let out_dir = resolve_out_dir(out, sc.output.dir.as_deref())?;
    let prefix = prefix_for(file, &sc);
    let points = sc.sweep_points();

    // worker pool over sweep points; each worker owns its trajectory
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<PointSummary, CliError>>>> =
        points.iter().map(|_| Mutex::new(None)).collect();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(2)
        .min(points.len())
        .max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= points.len() {
                    break;
                }
                let outcome = run_point(&sc, points[i], &out_dir, &prefix, tol);
                *slots[i].lock().expect("no poisoned slot") = Some(outcome);
            });
        }
    });

    let mut summaries = Vec::with_capacity(points.len());
    for slot in slots {
        summaries.push(slot.into_inner().expect("no poisoned slot").expect("every point ran")?);
    }

    // slope across dt when it is the only swept axis
    let energy_drift_slope = {
        let dts: std::collections::BTreeSet<u64> =
            summaries.iter().map(|s| s.dt.to_bits()).collect();
        let hbars: std::collections::BTreeSet<u64> =
            summaries.iter().map(|s| s.hbar.to_bits()).collect();
        let lambdas: std::collections::BTreeSet<Option<u64>> =
            summaries.iter().map(|s| s.lambda.map(f64::to_bits)).collect();
        if dts.len() >= 2 && hbars.len() == 1 && lambdas.len() == 1 {
            let xs: Vec<f64> = summaries.iter().map(|s| s.dt).collect();
            let ys: Vec<f64> = summaries.iter().map(|s| s.energy_drift_max).collect();
            Some(convergence_slope(&xs, &ys))
        } else {
            None
        }
    };

    for s in &summaries {
        println!(
            "point {:03}: hbar = {}, dt = {}, lambda = {:?} -> {} ({} samples, max energy drift {:.3e}{})",
            s.index,
            s.hbar,
            s.dt,
            s.lambda,
            s.csv,
            s.samples,
            s.energy_drift_max,
            s.termination.as_deref().map(|t| format!("; {t}")).unwrap_or_default(),
        );
    }

    let summary = SimulateSummary {
        scenario: file.display().to_string(),
        points: summaries,
        energy_drift_slope,
    };
    let summary_path = out_dir.join(format!("{prefix}_summary.json"));
    output::write_json(&summary_path, &summary)
        .map_err(|e| CliError::Runtime(format!("cannot write summary: {e}")))?;
    println!("summary: {}", summary_path.display());
    Ok(())
}

pub fn compare(file: &Path, out: Option<&Path>, tol: Option<f64>) -> Result<(), CliError> {
    let sc = scenario::load(file)?;
    if sc.run.scheme != "rk4" {
        return Err(CliError::Config(
            "run.scheme: compare integrates both formulations and requires \"rk4\"".into(),
        ));
    }
    let out_dir = resolve_out_dir(out, sc.output.dir.as_deref())?;
    let prefix = prefix_for(file, &sc);
    let tolerance = tol.unwrap_or(sc.compare.tolerance);
    let prm = sc.sim_params(None);
    let v = sc.build_potential(None)?;
    let spec = sc.step_spec(None)?;

    // matched initial data in both parametrizations
    let (hag0, hel0) = match sc.initial_state()? {
        StateSample::Hagedorn(s) => {
            let branch = DetBranch::from_q(s.qp.q())
                .map_err(|e| CliError::Config(format!("initial: {e}")))?;
            let h = project_state(&s, &prm, &branch)
                .map_err(|e| CliError::Config(format!("initial: cannot project: {e}")))?;
            (s, h)
        }
        StateSample::Heller(h) => {
            let (s, _) = lift_state(&h)
                .map_err(|e| CliError::Config(format!("initial: cannot lift: {e}")))?;
            (s, h)
        }
    };

    let lifted = integrate_hagedorn(hag0, v.as_ref(), &prm, &spec)
        .map_err(|e| CliError::Config(format!("run: {e}")))?;
    let reduced = integrate_heller(hel0, v.as_ref(), &prm, &spec)
        .map_err(|e| CliError::Config(format!("run: {e}")))?;
    for rec in [&lifted, &reduced] {
        if let Some(t) = &rec.termination {
            return Err(CliError::Runtime(format!("terminated at t = {}: {}", t.t, t.error)));
        }
    }

    let mut max_projection_gap = 0.0f64;
    let mut max_phase_gap = 0.0f64;
    for k in 0..lifted.len() {
        let (s, theta) = match (&lifted.states[k], lifted.observables[k].arg_det_q) {
            (StateSample::Hagedorn(s), Some(theta)) => (s, theta),
            _ => unreachable!("lifted record holds lifted states"),
        };
        let h = match &reduced.states[k] {
            StateSample::Heller(h) => h,
            _ => unreachable!("reduced record holds reduced states"),
        };
        let q_inv = gwp_core::cmat::guarded_inverse(s.qp.q())
            .map_err(|e| CliError::Runtime(format!("at t = {}: {e}", lifted.times[k])))?;
        let projected = s.qp.p() * q_inv;
        max_projection_gap = max_projection_gap.max((projected - h.x.to_complex()).norm());
        max_phase_gap =
            max_phase_gap.max((h.phase - (s.action - 0.5 * prm.hbar * theta)).abs());
    }

    let pass = max_projection_gap <= tolerance && max_phase_gap <= tolerance;
    let summary = CompareSummary {
        scenario: file.display().to_string(),
        potential: sc.potential.name.clone(),
        t_end: sc.run.t_end,
        dt: sc.run.dt,
        samples: lifted.len(),
        max_projection_gap,
        max_phase_gap,
        tolerance,
        pass,
    };
    let path = out_dir.join(format!("{prefix}_compare.json"));
    output::write_json(&path, &summary)
        .map_err(|e| CliError::Runtime(format!("cannot write report: {e}")))?;
    println!(
        "compare [{}]: max projection gap {max_projection_gap:.3e}, max phase gap {max_phase_gap:.3e}, tolerance {tolerance:.3e} -> {}",
        sc.potential.name,
        if pass { "PASS" } else { "FAIL" },
    );
    println!("report: {}", path.display());
    if pass {
        Ok(())
    } else {
        Err(CliError::Breach(format!(
            "projection gap {max_projection_gap:.3e} / phase gap {max_phase_gap:.3e} exceed tolerance {tolerance:.3e}"
        )))
    }
}

pub fn check(
    suite_name: &str,
    seed: u64,
    samples: usize,
    dim: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let suite = match suite_name {
        "geometry" => Suite::Geometry,
        "reduction" => Suite::Reduction,
        "dynamics" => Suite::Dynamics,
        "all" => Suite::All,
        other => {
            return Err(CliError::Config(format!(
                "check: unknown suite {other:?} (expected geometry, reduction, dynamics, or all)"
            )));
        }
    };
    if samples == 0 {
        println!("check {suite_name}: empty report (zero samples requested)");
        return Ok(());
    }
    let dims: Vec<usize> = match dim {
        Some(0) => return Err(CliError::Config("check: --dim must be ≥ 1".into())),
        Some(d) if d > 8 => {
            return Err(CliError::Config("check: --dim larger than 8 is not supported".into()))
        }
        Some(d) => vec![d],
        None => vec![1, 2, 3],
    };

    let results = run_suite(suite, seed, samples, &dims);
    let mut failures = Vec::new();
    for r in &results {
        println!(
            "{}/{} (d ≤ {}, {} samples): {} worst {:.3e} tol {:.3e}",
            r.suite,
            r.name,
            r.dim,
            r.samples,
            if r.pass { "PASS" } else { "FAIL" },
            r.worst,
            r.tol,
        );
        if !r.pass {
            failures.push(format!("{}/{}", r.suite, r.name));
        }
    }

    let out_dir = resolve_out_dir(out, None)?;
    let summary = CheckSummary {
        suite: suite_name.to_string(),
        seed,
        samples,
        entries: results
            .iter()
            .map(|r| CheckEntry {
                suite: r.suite.to_string(),
                name: r.name.to_string(),
                dim: r.dim,
                samples: r.samples,
                tol: r.tol,
                worst: r.worst,
                pass: r.pass,
            })
            .collect(),
        pass: failures.is_empty(),
    };
    let path = out_dir.join(format!("check_{suite_name}.json"));
    output::write_json(&path, &summary)
        .map_err(|e| CliError::Runtime(format!("cannot write report: {e}")))?;
    println!("report: {}", path.display());

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Breach(format!("failing properties: {}", failures.join(", "))))
    }
}
