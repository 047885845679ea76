//! Fixed-step time integration: an RK4 baseline for both formulations and a
//! Strang splitting for the separable extended Hamiltonian of the lifted
//! system, plus the trajectory driver with observable sampling and the
//! invariant-drift reporting.

use nalgebra::DMatrix;
use num_traits::Float;

use crate::dynamics::{
    angular_momentum, extended_hamiltonian, hagedorn_rhs, heller_rhs, reduced_angular_momentum,
    reduced_extended_hamiltonian, third_contraction_or_fd, DetBranch, HagedornDeriv, HagedornState,
    HellerDeriv, HellerState, Potential, SimParams,
};
use crate::cmat::{from_real, im_part, re_part};
use crate::error::{Error, Result};
use crate::reduction::{is_on_level_j, PhasePoint};
use crate::scalar::{real, Real};

/// Available steppers. Strang applies to the lifted formulation only, where
/// the extended Hamiltonian splits into a kinetic (p, P) drift and a
/// potential (q, Q)-frozen kick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rk4,
    Strang,
}

/// Fixed-step integration window and sampling stride.
#[derive(Debug, Clone, Copy)]
pub struct StepSpec<T: Real> {
    pub dt: T,
    pub t_end: T,
    pub scheme: Scheme,
    pub sample_every: usize,
}

impl<T: Real> StepSpec<T> {
    pub fn new(dt: T, t_end: T, scheme: Scheme, sample_every: usize) -> Result<Self> {
        let spec = Self { dt, t_end, scheme, sample_every };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt <= T::zero() || !Float::is_finite(self.dt) {
            return Err(Error::ShapeMismatch { context: "dt must be positive and finite".into() });
        }
        if self.t_end < T::zero() || !Float::is_finite(self.t_end) {
            return Err(Error::ShapeMismatch { context: "t_end must be nonnegative and finite".into() });
        }
        if self.sample_every == 0 {
            return Err(Error::ShapeMismatch { context: "sample_every must be ≥ 1".into() });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        let ratio = self.t_end / self.dt;
        Float::round(ratio).to_f64().unwrap_or(0.0) as usize
    }
}

/// One classical RK4 step of the lifted system; S rides along as an augmented
/// component through the same stages.
pub fn rk4_step_hagedorn<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
    dt: T,
) -> HagedornState<T> {
    let half = dt * real::<T>(0.5);
    let k1 = hagedorn_rhs(s, v, prm);
    let k2 = hagedorn_rhs(&s.add_scaled(&k1, half), v, prm);
    let k3 = hagedorn_rhs(&s.add_scaled(&k2, half), v, prm);
    let k4 = hagedorn_rhs(&s.add_scaled(&k3, dt), v, prm);
    let two = real::<T>(2.0);
    let incr = HagedornDeriv::weighted_sum(&[(T::one(), &k1), (two, &k2), (two, &k3), (T::one(), &k4)]);
    s.add_scaled(&incr, dt / real::<T>(6.0))
}

/// One RK4 step of the reduced system; fails with `BLost` when ℬ leaves the
/// cone mid-stage (step size too large, not a defect).
pub fn rk4_step_heller<T: Real, P: Potential<T> + ?Sized>(
    s: &HellerState<T>,
    v: &P,
    prm: &SimParams<T>,
    dt: T,
) -> Result<HellerState<T>> {
    let half = dt * real::<T>(0.5);
    let k1 = heller_rhs(s, v, prm);
    let k2 = heller_rhs(&s.add_scaled(&k1, half)?, v, prm);
    let k3 = heller_rhs(&s.add_scaled(&k2, half)?, v, prm);
    let k4 = heller_rhs(&s.add_scaled(&k3, dt)?, v, prm);
    let two = real::<T>(2.0);
    let incr = HellerDeriv::weighted_sum(&[(T::one(), &k1), (two, &k2), (two, &k3), (T::one(), &k4)]);
    s.add_scaled(&incr, dt / real::<T>(6.0))
}

/// Potential kick with (q, Q) frozen: exact for any step length since the
/// right-hand side is constant along the kick flow.
fn strang_kick<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
    h: T,
) -> HagedornState<T> {
    let mut dp = -v.gradient(&s.q);
    if prm.corrected {
        let gram = re_part(&(s.qp.q() * s.qp.q().adjoint()));
        dp -= third_contraction_or_fd(v, &s.q, &gram) * (prm.hbar * real::<T>(0.25));
    }
    let hess = v.hessian(&s.q);
    let p_mat = s.qp.p() - (from_real(&hess) * s.qp.q()) * nalgebra::Complex::new(h, T::zero());
    HagedornState {
        q: s.q.clone(),
        p: &s.p + dp * h,
        qp: crate::spgroup::ComplexQP::new(s.qp.q().clone(), p_mat).expect("shapes preserved"),
        action: s.action - v.value(&s.q) * h,
    }
}

/// Kinetic drift with (p, P) frozen: exact.
fn strang_drift<T: Real>(s: &HagedornState<T>, prm: &SimParams<T>, h: T) -> HagedornState<T> {
    let inv_m = T::one() / prm.mass;
    let q_mat = s.qp.q() + s.qp.p() * nalgebra::Complex::new(h * inv_m, T::zero());
    HagedornState {
        q: &s.q + &s.p * (h * inv_m),
        p: s.p.clone(),
        qp: crate::spgroup::ComplexQP::new(q_mat, s.qp.p().clone()).expect("shapes preserved"),
        action: s.action + s.p.norm_squared() * (h * inv_m * real::<T>(0.5)),
    }
}

/// Second-order Strang step: half kick, full drift, half kick.
pub fn strang_step_hagedorn<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
    dt: T,
) -> HagedornState<T> {
    let half = dt * real::<T>(0.5);
    let kicked = strang_kick(s, v, prm, half);
    let drifted = strang_drift(&kicked, prm, dt);
    strang_kick(&drifted, v, prm, half)
}

/// A sampled state of either formulation.
#[derive(Debug, Clone)]
pub enum StateSample<T: Real> {
    Hagedorn(HagedornState<T>),
    Heller(HellerState<T>),
}

impl<T: Real> StateSample<T> {
    pub fn dim(&self) -> usize {
        match self {
            StateSample::Hagedorn(s) => s.dim(),
            StateSample::Heller(s) => s.dim(),
        }
    }
}

/// Per-sample observables. The lifted-only diagnostics (level-set residual,
/// constraint residual, branch angle) are `None` on reduced trajectories.
#[derive(Debug, Clone)]
pub struct Observables<T: Real> {
    pub energy: T,
    pub momentum_residual: Option<T>,
    pub onshell_residual: Option<T>,
    pub arg_det_q: Option<T>,
    pub angular: DMatrix<T>,
}

/// Why a run stopped before t_end.
#[derive(Debug, Clone)]
pub struct Termination<T: Real> {
    pub t: T,
    pub error: Error,
}

/// Sampled trajectory with observables; immutable after production.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord<T: Real> {
    pub dt: T,
    pub scheme: Scheme,
    pub times: Vec<T>,
    pub states: Vec<StateSample<T>>,
    pub observables: Vec<Observables<T>>,
    pub termination: Option<Termination<T>>,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&StateSample<T>> {
        self.states.last()
    }
}

fn hagedorn_observables<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
    theta: T,
) -> Observables<T> {
    let z = PhasePoint::new(
        re_part(s.qp.q()),
        im_part(s.qp.q()),
        re_part(s.qp.p()),
        im_part(s.qp.p()),
    )
    .expect("state blocks are square");
    Observables {
        energy: extended_hamiltonian(s, v, prm),
        momentum_residual: Some(is_on_level_j(&z, real(crate::reduction::LEVEL_TOL)).residual),
        onshell_residual: Some(s.on_shell_residual()),
        arg_det_q: Some(theta),
        angular: angular_momentum(s, prm),
    }
}

fn heller_observables<T: Real, P: Potential<T> + ?Sized>(
    s: &HellerState<T>,
    v: &P,
    prm: &SimParams<T>,
) -> Observables<T> {
    Observables {
        energy: reduced_extended_hamiltonian(s, v, prm),
        momentum_residual: None,
        onshell_residual: None,
        arg_det_q: None,
        angular: reduced_angular_momentum(s, prm),
    }
}

fn check_dims<T: Real, P: Potential<T> + ?Sized>(state_dim: usize, v: &P) -> Result<()> {
    if let Some(d) = v.dim() {
        if d != state_dim {
            return Err(Error::ShapeMismatch {
                context: format!("potential expects d = {d}, state has d = {state_dim}"),
            });
        }
    }
    Ok(())
}

/// Drive the lifted system over the requested window. Guard violations
/// (branch tracking, singular Q) terminate early and return the partial
/// record with a diagnostic.
pub fn integrate_hagedorn<T: Real, P: Potential<T> + ?Sized>(
    initial: HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
    spec: &StepSpec<T>,
) -> Result<TrajectoryRecord<T>> {
    spec.validate()?;
    check_dims(initial.dim(), v)?;
    let steps = spec.steps();
    let mut branch = DetBranch::from_q(initial.qp.q())?;
    let mut record = TrajectoryRecord {
        dt: spec.dt,
        scheme: spec.scheme,
        times: vec![T::zero()],
        states: vec![StateSample::Hagedorn(initial.clone())],
        observables: vec![hagedorn_observables(&initial, v, prm, branch.theta())],
        termination: None,
    };
    let mut state = initial;
    for k in 1..=steps {
        let next = match spec.scheme {
            Scheme::Rk4 => rk4_step_hagedorn(&state, v, prm, spec.dt),
            Scheme::Strang => strang_step_hagedorn(&state, v, prm, spec.dt),
        };
        let t = spec.dt * real::<T>(k as f64);
        match branch.advance(next.qp.q()) {
            Ok(_) => {}
            Err(error) => {
                record.termination = Some(Termination { t, error });
                return Ok(record);
            }
        }
        state = next;
        if k.is_multiple_of(spec.sample_every) || k == steps {
            record.times.push(t);
            record.states.push(StateSample::Hagedorn(state.clone()));
            record.observables.push(hagedorn_observables(&state, v, prm, branch.theta()));
        }
    }
    Ok(record)
}

/// Drive the reduced system. A width matrix leaving the cone terminates the
/// run with a `BLost` diagnostic and a partial record.
pub fn integrate_heller<T: Real, P: Potential<T> + ?Sized>(
    initial: HellerState<T>,
    v: &P,
    prm: &SimParams<T>,
    spec: &StepSpec<T>,
) -> Result<TrajectoryRecord<T>> {
    spec.validate()?;
    check_dims(initial.dim(), v)?;
    if spec.scheme == Scheme::Strang {
        return Err(Error::UnsupportedScheme {
            context: "Strang splitting applies to the lifted (Q, P) formulation".into(),
        });
    }
    let steps = spec.steps();
    let mut record = TrajectoryRecord {
        dt: spec.dt,
        scheme: spec.scheme,
        times: vec![T::zero()],
        states: vec![StateSample::Heller(initial.clone())],
        observables: vec![heller_observables(&initial, v, prm)],
        termination: None,
    };
    let mut state = initial;
    for k in 1..=steps {
        let t = spec.dt * real::<T>(k as f64);
        let next = match rk4_step_heller(&state, v, prm, spec.dt) {
            Ok(next) => next,
            Err(error) => {
                record.termination = Some(Termination { t, error });
                return Ok(record);
            }
        };
        state = next;
        if k.is_multiple_of(spec.sample_every) || k == steps {
            record.times.push(t);
            record.states.push(StateSample::Heller(state.clone()));
            record.observables.push(heller_observables(&state, v, prm));
        }
    }
    Ok(record)
}

/// Dispatch on the state kind.
pub fn integrate_trajectory<T: Real, P: Potential<T> + ?Sized>(
    initial: StateSample<T>,
    v: &P,
    prm: &SimParams<T>,
    spec: &StepSpec<T>,
) -> Result<TrajectoryRecord<T>> {
    match initial {
        StateSample::Hagedorn(s) => integrate_hagedorn(s, v, prm, spec),
        StateSample::Heller(s) => integrate_heller(s, v, prm, spec),
    }
}

/// Max/final drift of each tracked invariant over one record.
#[derive(Debug, Clone)]
pub struct RecordDrift<T: Real> {
    pub dt: T,
    pub energy_max: T,
    pub energy_final: T,
    pub momentum_max: Option<T>,
    pub onshell_max: Option<T>,
    pub angular_max: T,
}

/// Summary across records; the slope is fitted when several distinct step
/// sizes are supplied.
#[derive(Debug, Clone)]
pub struct DriftSummary<T: Real> {
    pub records: Vec<RecordDrift<T>>,
    pub energy_slope: Option<T>,
}

/// Least-squares slope of ln y against ln x.
pub fn convergence_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let n = real::<T>(xs.len() as f64);
    let lx: Vec<T> = xs.iter().map(|&x| Float::ln(x)).collect();
    let ly: Vec<T> = ys.iter().map(|&y| Float::ln(Float::max(y, real(1e-300)))).collect();
    let mx = lx.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = ly.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut num = T::zero();
    let mut den = T::zero();
    for (x, y) in lx.iter().zip(ly.iter()) {
        num += (*x - mx) * (*y - my);
        den += (*x - mx) * (*x - mx);
    }
    num / den
}

/// Summarize invariant drift; with several records at distinct dt the final
/// energy-drift maxima also get a log-log slope fit.
pub fn drift_report<T: Real>(records: &[TrajectoryRecord<T>]) -> Result<DriftSummary<T>> {
    if records.is_empty() || records.iter().any(|r| r.len() < 2) {
        return Err(Error::EmptyRecord);
    }
    let mut out = Vec::with_capacity(records.len());
    for rec in records {
        let e0 = rec.observables[0].energy;
        let j0 = rec.observables[0].angular.clone();
        let mut energy_max = T::zero();
        let mut momentum_max: Option<T> = None;
        let mut onshell_max: Option<T> = None;
        let mut angular_max = T::zero();
        for obs in &rec.observables {
            energy_max = Float::max(energy_max, Float::abs(obs.energy - e0));
            if let Some(m) = obs.momentum_residual {
                momentum_max = Some(Float::max(momentum_max.unwrap_or(T::zero()), m));
            }
            if let Some(s) = obs.onshell_residual {
                onshell_max = Some(Float::max(onshell_max.unwrap_or(T::zero()), s));
            }
            angular_max = Float::max(angular_max, (&obs.angular - &j0).norm());
        }
        let energy_final = Float::abs(rec.observables.last().expect("nonempty").energy - e0);
        out.push(RecordDrift {
            dt: rec.dt,
            energy_max,
            energy_final,
            momentum_max,
            onshell_max,
            angular_max,
        });
    }
    let mut dts: Vec<T> = out.iter().map(|r| r.dt).collect();
    dts.dedup();
    let energy_slope = if dts.len() >= 2 {
        let xs: Vec<T> = out.iter().map(|r| r.dt).collect();
        let ys: Vec<T> = out.iter().map(|r| r.energy_max).collect();
        Some(convergence_slope(&xs, &ys))
    } else {
        None
    };
    Ok(DriftSummary { records: out, energy_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, DVector};

    use crate::dynamics::Quadratic;

    fn harmonic() -> Quadratic<f64> {
        Quadratic::isotropic(1, 1.0)
    }

    #[test]
    fn rk4_keeps_the_coherent_fixed_point() {
        let prm = SimParams::default();
        let v = harmonic();
        let mut s = HellerState::<f64>::coherent(1);
        for _ in 0..100 {
            s = rk4_step_heller(&s, &v, &prm, 0.01).unwrap();
        }
        assert!(s.x.a().norm() < 1e-10);
        assert!((s.x.b()[(0, 0)] - 1.0).abs() < 1e-10);
        assert!(s.q.norm() < 1e-12 && s.p.norm() < 1e-12);
    }

    #[test]
    fn rk4_tracks_the_closed_form_rotation() {
        let prm = SimParams::default();
        let v = harmonic();
        let spec = StepSpec::new(1e-3, 2.0 * std::f64::consts::PI, Scheme::Rk4, 1000).unwrap();
        let rec = integrate_hagedorn(HagedornState::coherent(1), &v, &prm, &spec).unwrap();
        assert!(rec.termination.is_none());
        let t_f = *rec.times.last().unwrap();
        let last = match rec.final_state().unwrap() {
            StateSample::Hagedorn(s) => s.clone(),
            _ => unreachable!(),
        };
        // Q(t) = e^{it}; after one period the pair is back where it started
        assert!((last.qp.q()[(0, 0)] - Complex::new(0.0, t_f).exp()).norm() < 1e-9);
        assert!((t_f - 2.0 * std::f64::consts::PI).abs() < 1e-3);
    }

    #[test]
    fn rk4_is_exact_on_polynomial_flows() {
        let prm = SimParams::default();
        let v = Quadratic::free(1);
        let mut s = HagedornState::<f64>::coherent(1);
        s.p = DVector::from_vec(vec![1.0]);
        let spec = StepSpec::new(0.125, 1.0, Scheme::Rk4, 1).unwrap();
        let rec = integrate_hagedorn(s, &v, &prm, &spec).unwrap();
        let last = match rec.final_state().unwrap() {
            StateSample::Hagedorn(s) => s.clone(),
            _ => unreachable!(),
        };
        assert!((last.q[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn strang_energy_error_is_bounded_over_a_period() {
        let prm = SimParams::default();
        let v = harmonic();
        let mut s = HagedornState::<f64>::coherent(1);
        s.q = DVector::from_vec(vec![0.7]);
        s.p = DVector::from_vec(vec![-0.2]);
        let spec = StepSpec::new(1e-2, 2.0 * std::f64::consts::PI, Scheme::Strang, 10).unwrap();
        let rec = integrate_hagedorn(s, &v, &prm, &spec).unwrap();
        let drift = drift_report(std::slice::from_ref(&rec)).unwrap();
        assert!(drift.records[0].energy_max <= 1e-4, "max drift {}", drift.records[0].energy_max);
    }

    #[test]
    fn strang_drift_is_exact_for_free_particle() {
        let prm = SimParams::default();
        let v = Quadratic::free(1);
        let mut s = HagedornState::<f64>::coherent(1);
        s.p = DVector::from_vec(vec![0.5]);
        let stepped = strang_step_hagedorn(&s, &v, &prm, 0.25);
        assert!((stepped.q[0] - 0.125).abs() < 1e-15);
        assert!((stepped.p[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn momentum_map_is_conserved_on_the_harmonic_run() {
        let prm = SimParams::default();
        let v = harmonic();
        let spec = StepSpec::new(1e-3, 10.0, Scheme::Rk4, 100).unwrap();
        let mut s = HagedornState::<f64>::coherent(1);
        s.q = DVector::from_vec(vec![1.0]);
        let rec = integrate_hagedorn(s, &v, &prm, &spec).unwrap();
        let worst = rec
            .observables
            .iter()
            .map(|o| o.momentum_residual.unwrap())
            .fold(0.0f64, f64::max);
        assert!(worst <= 1e-9, "worst level-set residual {worst}");
    }

    #[test]
    fn oversized_steps_trip_the_branch_guard() {
        let prm = SimParams::default();
        let v = harmonic();
        let spec = StepSpec::new(2.0, 10.0, Scheme::Rk4, 1).unwrap();
        let rec = integrate_hagedorn(HagedornState::coherent(1), &v, &prm, &spec).unwrap();
        assert!(!rec.is_empty());
        let term = rec.termination.expect("guard should trip");
        assert!(matches!(term.error, Error::StepGuardViolation { .. }));
    }

    #[test]
    fn heller_rejects_strang() {
        let prm = SimParams::default();
        let spec = StepSpec::new(1e-2, 1.0, Scheme::Strang, 1).unwrap();
        let out = integrate_heller(HellerState::coherent(1), &harmonic(), &prm, &spec);
        assert!(matches!(out, Err(Error::UnsupportedScheme { .. })));
    }

    #[test]
    fn drift_report_needs_samples() {
        assert!(matches!(drift_report::<f64>(&[]), Err(Error::EmptyRecord)));
    }

    #[test]
    fn convergence_slope_recovers_power_laws() {
        let xs = [4e-3, 2e-3, 1e-3];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powi(4)).collect();
        let slope = convergence_slope(&xs, &ys);
        assert!((slope - 4.0).abs() < 1e-12);
    }
}
