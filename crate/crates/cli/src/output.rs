//! Trajectory CSV files and JSON summaries. Floats are written in Rust's
//! shortest round-trip decimal form; unavailable observables are NaN.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use gwp_core::integrate::{StateSample, TrajectoryRecord};

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn push_matrix(cols: &mut Vec<String>, name: &str, d: usize) {
    for i in 0..d {
        for j in 0..d {
            cols.push(format!("{name}_{i}_{j}"));
        }
    }
}

/// Column layout, in emission order. Documented in the README; tests rely on
/// it being stable.
pub fn header(rec: &TrajectoryRecord<f64>) -> Vec<String> {
    let d = rec.states[0].dim();
    let mut cols = vec!["t".to_string()];
    for i in 0..d {
        cols.push(format!("q_{i}"));
    }
    for i in 0..d {
        cols.push(format!("p_{i}"));
    }
    match &rec.states[0] {
        StateSample::Hagedorn(_) => {
            push_matrix(&mut cols, "re_q", d);
            push_matrix(&mut cols, "im_q", d);
            push_matrix(&mut cols, "re_p", d);
            push_matrix(&mut cols, "im_p", d);
            cols.push("action".to_string());
        }
        StateSample::Heller(_) => {
            push_matrix(&mut cols, "a", d);
            push_matrix(&mut cols, "b", d);
            cols.push("phase".to_string());
        }
    }
    cols.push("energy".to_string());
    cols.push("momentum_residual".to_string());
    cols.push("onshell_residual".to_string());
    cols.push("arg_det_q".to_string());
    for i in 0..d {
        for j in (i + 1)..d {
            cols.push(format!("j_{i}_{j}"));
        }
    }
    cols
}

pub fn write_csv(path: &Path, rec: &TrajectoryRecord<f64>) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{}", header(rec).join(","))?;
    let d = rec.states[0].dim();
    for k in 0..rec.len() {
        let mut row = vec![fmt(rec.times[k])];
        match &rec.states[k] {
            StateSample::Hagedorn(s) => {
                row.extend(s.q.iter().map(|&x| fmt(x)));
                row.extend(s.p.iter().map(|&x| fmt(x)));
                for m in [s.qp.q(), s.qp.p()] {
                    for part in [0, 1] {
                        for i in 0..d {
                            for j in 0..d {
                                let z = m[(i, j)];
                                row.push(fmt(if part == 0 { z.re } else { z.im }));
                            }
                        }
                    }
                }
                row.push(fmt(s.action));
            }
            StateSample::Heller(s) => {
                row.extend(s.q.iter().map(|&x| fmt(x)));
                row.extend(s.p.iter().map(|&x| fmt(x)));
                for m in [s.x.a(), s.x.b()] {
                    for i in 0..d {
                        for j in 0..d {
                            row.push(fmt(m[(i, j)]));
                        }
                    }
                }
                row.push(fmt(s.phase));
            }
        }
        let obs = &rec.observables[k];
        row.push(fmt(obs.energy));
        row.push(fmt(obs.momentum_residual.unwrap_or(f64::NAN)));
        row.push(fmt(obs.onshell_residual.unwrap_or(f64::NAN)));
        row.push(fmt(obs.arg_det_q.unwrap_or(f64::NAN)));
        for i in 0..d {
            for j in (i + 1)..d {
                row.push(fmt(obs.angular[(i, j)]));
            }
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Per-sweep-point entry of the simulate summary.
#[derive(Debug, Serialize)]
pub struct PointSummary {
    pub index: usize,
    pub hbar: f64,
    pub dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub csv: String,
    pub samples: usize,
    pub energy_drift_max: f64,
    pub energy_drift_final: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub momentum_residual_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub onshell_residual_max: Option<f64>,
    pub angular_drift_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_breached: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub scenario: String,
    pub points: Vec<PointSummary>,
    /// Log-log slope of max energy drift against dt, when dt is the only
    /// swept axis.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_drift_slope: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub scenario: String,
    pub potential: String,
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
    pub max_projection_gap: f64,
    pub max_phase_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckEntry {
    pub suite: String,
    pub name: String,
    pub dim: usize,
    pub samples: usize,
    pub tol: f64,
    pub worst: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckSummary {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub entries: Vec<CheckEntry>,
    pub pass: bool,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable summary");
    std::fs::write(path, text + "\n")
}
