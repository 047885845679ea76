//! TOML scenario files: schema, validation, and construction of the core
//! objects they describe.

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use gwp_core::dynamics::{
    lift_state, project_state, DetBranch, HagedornState, HellerState, Potential, Quadratic,
    Quartic1D, RadialAnharmonic, SimParams,
};
use gwp_core::integrate::{Scheme, StateSample, StepSpec};
use gwp_core::matlin::SymMatrix;
use gwp_core::siegel::SiegelPoint;
use gwp_core::spgroup::ComplexQP;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub potential: PotentialCfg,
    #[serde(default)]
    pub params: ParamsCfg,
    pub run: RunCfg,
    pub initial: InitialCfg,
    #[serde(default)]
    pub output: OutputCfg,
    #[serde(default)]
    pub sweep: SweepCfg,
    #[serde(default)]
    pub compare: CompareCfg,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCfg {
    pub name: String,
    /// quadratic: full coefficient matrix K (row major), or the isotropic
    /// shorthand `k_iso`.
    pub k: Option<Vec<Vec<f64>>>,
    pub k_iso: Option<f64>,
    pub b: Option<Vec<f64>>,
    pub c: Option<f64>,
    /// quartic1d
    pub omega2: Option<f64>,
    /// quartic1d and radial_anharmonic
    pub lambda: Option<f64>,
    /// radial_anharmonic
    pub a: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsCfg {
    pub mass: f64,
    pub hbar: f64,
    pub corrected: bool,
}

impl Default for ParamsCfg {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, corrected: false }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunCfg {
    /// "hagedorn" | "heller"; defaults to the initial-state parametrization.
    pub formulation: Option<String>,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_scheme")]
    pub scheme: String,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

fn default_scheme() -> String {
    "rk4".to_string()
}

fn default_sample_every() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCfg {
    pub kind: String,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// hagedorn blocks (all four required together); omitting them selects
    /// the coherent pair Q = I, P = iI
    pub q_mat_re: Option<Vec<Vec<f64>>>,
    pub q_mat_im: Option<Vec<Vec<f64>>>,
    pub p_mat_re: Option<Vec<Vec<f64>>>,
    pub p_mat_im: Option<Vec<Vec<f64>>>,
    pub action: Option<f64>,
    /// heller blocks; omitting them selects 𝒜 = 0, ℬ = I
    pub a: Option<Vec<Vec<f64>>>,
    pub b_mat: Option<Vec<Vec<f64>>>,
    pub phi: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    pub dir: Option<String>,
    pub prefix: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub hbar: Option<Vec<f64>>,
    pub dt: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareCfg {
    pub tolerance: f64,
}

impl Default for CompareCfg {
    fn default() -> Self {
        Self { tolerance: 1e-6 }
    }
}

pub fn load(path: &std::path::Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let scenario: Scenario = toml::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    pub fn dim(&self) -> usize {
        self.initial.q.len()
    }

    fn validate(&self) -> Result<(), CliError> {
        let d = self.initial.q.len();
        if d == 0 {
            return Err(CliError::Config("initial.q: must be nonempty".into()));
        }
        if self.initial.p.len() != d {
            return Err(CliError::Config(format!(
                "initial.p: length {} does not match initial.q length {d}",
                self.initial.p.len()
            )));
        }
        let hag_given = self.initial.q_mat_re.is_some()
            || self.initial.q_mat_im.is_some()
            || self.initial.p_mat_re.is_some()
            || self.initial.p_mat_im.is_some()
            || self.initial.action.is_some();
        let hel_given =
            self.initial.a.is_some() || self.initial.b_mat.is_some() || self.initial.phi.is_some();
        match self.initial.kind.as_str() {
            "hagedorn" if hel_given => {
                return Err(CliError::Config(
                    "initial: kind = \"hagedorn\" but heller fields (a/b_mat/phi) are set; give exactly one parametrization".into(),
                ));
            }
            "heller" if hag_given => {
                return Err(CliError::Config(
                    "initial: kind = \"heller\" but hagedorn fields (q_mat_*/p_mat_*/action) are set; give exactly one parametrization".into(),
                ));
            }
            "hagedorn" | "heller" => {}
            other => {
                return Err(CliError::Config(format!(
                    "initial.kind: unknown parametrization {other:?} (expected \"hagedorn\" or \"heller\")"
                )));
            }
        }
        match self.run.formulation.as_deref() {
            None | Some("hagedorn") | Some("heller") => {}
            Some(other) => {
                return Err(CliError::Config(format!(
                    "run.formulation: unknown formulation {other:?}"
                )));
            }
        }
        match self.run.scheme.as_str() {
            "rk4" | "strang" => {}
            other => {
                return Err(CliError::Config(format!("run.scheme: unknown scheme {other:?}")));
            }
        }
        if self.run.dt <= 0.0 || !self.run.dt.is_finite() {
            return Err(CliError::Config("run.dt: must be positive".into()));
        }
        if self.run.t_end < 0.0 {
            return Err(CliError::Config("run.t_end: must be nonnegative".into()));
        }
        if self.run.sample_every == 0 {
            return Err(CliError::Config("run.sample_every: must be ≥ 1".into()));
        }
        if self.sweep.lambda.is_some() && self.potential.name == "quadratic" {
            return Err(CliError::Config(
                "sweep.lambda: quadratic potentials have no lambda parameter".into(),
            ));
        }
        self.build_potential(None).map(|_| ())?;
        self.initial_state()?;
        Ok(())
    }

    /// Instantiate the potential; `lambda` overrides the configured value
    /// during sweeps.
    pub fn build_potential(&self, lambda: Option<f64>) -> Result<Box<dyn Potential<f64>>, CliError> {
        let d = self.dim();
        let p = &self.potential;
        match p.name.as_str() {
            "quadratic" => {
                let k = if let Some(rows) = &p.k {
                    SymMatrix::new(matrix_from_rows(rows, "potential.k")?)
                        .map_err(|e| CliError::Config(format!("potential.k: {e}")))?
                } else {
                    let k_iso = p.k_iso.unwrap_or(1.0);
                    SymMatrix::new(DMatrix::identity(d, d) * k_iso).expect("diagonal")
                };
                let b = p
                    .b
                    .clone()
                    .map(DVector::from_vec)
                    .unwrap_or_else(|| DVector::zeros(k.dim()));
                let quad = Quadratic::new(k, b, p.c.unwrap_or(0.0))
                    .map_err(|e| CliError::Config(format!("potential: {e}")))?;
                Ok(Box::new(quad))
            }
            "quartic1d" => {
                if d != 1 {
                    return Err(CliError::Config(format!(
                        "potential.name: quartic1d needs d = 1, scenario has d = {d}"
                    )));
                }
                Ok(Box::new(Quartic1D::new(
                    p.omega2.unwrap_or(1.0),
                    lambda.or(p.lambda).unwrap_or(0.1),
                )))
            }
            "radial_anharmonic" => Ok(Box::new(RadialAnharmonic::new(
                p.a.unwrap_or(1.0),
                lambda.or(p.lambda).unwrap_or(0.1),
            ))),
            other => Err(CliError::Config(format!(
                "potential.name: unknown potential {other:?} (expected quadratic, quartic1d, or radial_anharmonic)"
            ))),
        }
    }

    /// The initial state exactly as parametrized in the file.
    pub fn initial_state(&self) -> Result<StateSample<f64>, CliError> {
        let d = self.dim();
        let q = DVector::from_vec(self.initial.q.clone());
        let p = DVector::from_vec(self.initial.p.clone());
        match self.initial.kind.as_str() {
            "hagedorn" => {
                let qp = match (
                    &self.initial.q_mat_re,
                    &self.initial.q_mat_im,
                    &self.initial.p_mat_re,
                    &self.initial.p_mat_im,
                ) {
                    (None, None, None, None) => ComplexQP::coherent(d),
                    (Some(qr), Some(qi), Some(pr), Some(pi)) => {
                        let q_mat = gwp_core::cmat::complexify(
                            &matrix_from_rows(qr, "initial.q_mat_re")?,
                            &matrix_from_rows(qi, "initial.q_mat_im")?,
                        );
                        let p_mat = gwp_core::cmat::complexify(
                            &matrix_from_rows(pr, "initial.p_mat_re")?,
                            &matrix_from_rows(pi, "initial.p_mat_im")?,
                        );
                        ComplexQP::new(q_mat, p_mat)
                            .map_err(|e| CliError::Config(format!("initial: {e}")))?
                    }
                    _ => {
                        return Err(CliError::Config(
                            "initial: q_mat_re/q_mat_im/p_mat_re/p_mat_im must be given together".into(),
                        ));
                    }
                };
                let state = HagedornState::new(q, p, qp, self.initial.action.unwrap_or(0.0))
                    .map_err(|e| CliError::Config(format!("initial: {e}")))?;
                Ok(StateSample::Hagedorn(state))
            }
            "heller" => {
                let x = match (&self.initial.a, &self.initial.b_mat) {
                    (None, None) => SiegelPoint::base_point(d),
                    (Some(a), Some(b)) => SiegelPoint::from_parts(
                        matrix_from_rows(a, "initial.a")?,
                        matrix_from_rows(b, "initial.b_mat")?,
                    )
                    .map_err(|e| CliError::Config(format!("initial: {e}")))?,
                    _ => {
                        return Err(CliError::Config(
                            "initial: a and b_mat must be given together".into(),
                        ));
                    }
                };
                let state = HellerState::new(q, p, x, self.initial.phi.unwrap_or(0.0))
                    .map_err(|e| CliError::Config(format!("initial: {e}")))?;
                Ok(StateSample::Heller(state))
            }
            other => Err(CliError::Config(format!("initial.kind: unknown parametrization {other:?}"))),
        }
    }

    /// The initial state converted to the requested run formulation
    /// (lifting through the section, or projecting through the quotient map).
    pub fn initial_for_formulation(
        &self,
        prm: &SimParams<f64>,
    ) -> Result<StateSample<f64>, CliError> {
        let initial = self.initial_state()?;
        let target = self
            .run
            .formulation
            .clone()
            .unwrap_or_else(|| self.initial.kind.clone());
        match (initial, target.as_str()) {
            (s @ StateSample::Hagedorn(_), "hagedorn") => Ok(s),
            (s @ StateSample::Heller(_), "heller") => Ok(s),
            (StateSample::Heller(h), "hagedorn") => {
                let (lifted, _) = lift_state(&h)
                    .map_err(|e| CliError::Config(format!("initial: cannot lift: {e}")))?;
                Ok(StateSample::Hagedorn(lifted))
            }
            (StateSample::Hagedorn(s), "heller") => {
                let branch = DetBranch::from_q(s.qp.q())
                    .map_err(|e| CliError::Config(format!("initial: {e}")))?;
                let projected = project_state(&s, prm, &branch)
                    .map_err(|e| CliError::Config(format!("initial: cannot project: {e}")))?;
                Ok(StateSample::Heller(projected))
            }
            (_, other) => Err(CliError::Config(format!("run.formulation: unknown formulation {other:?}"))),
        }
    }

    pub fn sim_params(&self, hbar: Option<f64>) -> SimParams<f64> {
        SimParams::new(self.params.mass, hbar.unwrap_or(self.params.hbar), self.params.corrected)
    }

    pub fn step_spec(&self, dt: Option<f64>) -> Result<StepSpec<f64>, CliError> {
        let scheme = match self.run.scheme.as_str() {
            "rk4" => Scheme::Rk4,
            "strang" => Scheme::Strang,
            other => return Err(CliError::Config(format!("run.scheme: unknown scheme {other:?}"))),
        };
        StepSpec::new(dt.unwrap_or(self.run.dt), self.run.t_end, scheme, self.run.sample_every)
            .map_err(|e| CliError::Config(format!("run: {e}")))
    }

    /// Cartesian sweep over the configured axes; a scenario without a [sweep]
    /// table yields the single configured point.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let hbars = self.sweep.hbar.clone().unwrap_or_else(|| vec![self.params.hbar]);
        let dts = self.sweep.dt.clone().unwrap_or_else(|| vec![self.run.dt]);
        let lambdas: Vec<Option<f64>> = match &self.sweep.lambda {
            Some(ls) => ls.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let mut points = Vec::new();
        let mut index = 0usize;
        for &hbar in &hbars {
            for &dt in &dts {
                for &lambda in &lambdas {
                    points.push(SweepPoint { index, hbar, dt, lambda });
                    index += 1;
                }
            }
        }
        points
    }
}

/// One point of the (ħ, dt, λ) sweep grid.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub index: usize,
    pub hbar: f64,
    pub dt: f64,
    pub lambda: Option<f64>,
}

fn matrix_from_rows(rows: &[Vec<f64>], key: &str) -> Result<DMatrix<f64>, CliError> {
    let r = rows.len();
    if r == 0 {
        return Err(CliError::Config(format!("{key}: matrix must be nonempty")));
    }
    let c = rows[0].len();
    if rows.iter().any(|row| row.len() != c) {
        return Err(CliError::Config(format!("{key}: rows have inconsistent lengths")));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}
