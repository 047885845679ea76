//! Semiclassical Gaussian wave packet dynamics in both parametrizations:
//! the lifted linear (Q, P) flow on Sp(2d,ℝ) and the reduced Riccati flow on
//! Σ_d, with the Hamiltonians, phases, wavefunctions, Schrödinger residual,
//! and angular momenta that tie them together.

pub mod potential;

use nalgebra::{Complex, DMatrix, DVector};
use num_traits::Float;

use crate::cmat::{from_real, guarded_inverse, im_part, re_part, CMat};
use crate::error::{Error, Result};
use crate::matlin::{symmetrize, SymMatrix};
use crate::scalar::{real, Real};
use crate::siegel::SiegelPoint;
use crate::spgroup::ComplexQP;

pub use potential::{third_contraction_or_fd, CallablePotential, Potential, Quadratic, Quartic1D, RadialAnharmonic};

/// Physical parameters shared by both formulations. `corrected` switches
/// between the quadratic-exact equations and the ħ-corrected Hamiltonian
/// equations for general potentials.
#[derive(Debug, Clone, Copy)]
pub struct SimParams<T: Real> {
    pub mass: T,
    pub hbar: T,
    pub corrected: bool,
}

impl<T: Real> Default for SimParams<T> {
    fn default() -> Self {
        Self { mass: T::one(), hbar: T::one(), corrected: false }
    }
}

impl<T: Real> SimParams<T> {
    pub fn new(mass: T, hbar: T, corrected: bool) -> Self {
        Self { mass, hbar, corrected }
    }
}

/// Lifted state (q, p, Q, P, S) on T*ℝ^d × Z_d with the classical action S.
///
/// The (Q, P) constraints are monitored, never enforced per step: constraint
/// drift is the integrator-quality diagnostic.
#[derive(Debug, Clone)]
pub struct HagedornState<T: Real> {
    pub q: DVector<T>,
    pub p: DVector<T>,
    pub qp: ComplexQP<T>,
    pub action: T,
}

impl<T: Real> HagedornState<T> {
    pub fn new(q: DVector<T>, p: DVector<T>, qp: ComplexQP<T>, action: T) -> Result<Self> {
        if q.len() != p.len() || q.len() != qp.dim() {
            return Err(Error::ShapeMismatch {
                context: format!("state dims disagree: |q| = {}, |p| = {}, Q is {1}x{1}", q.len(), qp.dim()),
            });
        }
        Ok(Self { q, p, qp, action })
    }

    /// The coherent state at the phase-space origin: Q = I, P = iI, S = 0.
    pub fn coherent(d: usize) -> Self {
        Self {
            q: DVector::zeros(d),
            p: DVector::zeros(d),
            qp: ComplexQP::coherent(d),
            action: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn on_shell_residual(&self) -> T {
        self.qp.on_shell_residual()
    }

    pub fn add_scaled(&self, k: &HagedornDeriv<T>, h: T) -> Self {
        let hc = Complex::new(h, T::zero());
        Self {
            q: &self.q + &k.dq * h,
            p: &self.p + &k.dp * h,
            qp: ComplexQP::new(self.qp.q() + &k.dq_mat * hc, self.qp.p() + &k.dp_mat * hc)
                .expect("shapes preserved"),
            action: self.action + k.daction * h,
        }
    }
}

/// Reduced state (q, p, 𝒜 + iℬ, φ) on T*ℝ^d × Σ_d with the phase φ.
#[derive(Debug, Clone)]
pub struct HellerState<T: Real> {
    pub q: DVector<T>,
    pub p: DVector<T>,
    pub x: SiegelPoint<T>,
    pub phase: T,
}

impl<T: Real> HellerState<T> {
    pub fn new(q: DVector<T>, p: DVector<T>, x: SiegelPoint<T>, phase: T) -> Result<Self> {
        if q.len() != p.len() || q.len() != x.dim() {
            return Err(Error::ShapeMismatch {
                context: format!("state dims disagree: |q| = {}, |p| = {}, Σ point has d = {}", q.len(), p.len(), x.dim()),
            });
        }
        Ok(Self { q, p, x, phase })
    }

    /// Coherent state at the origin: 𝒜 = 0, ℬ = I, φ = 0.
    pub fn coherent(d: usize) -> Self {
        Self {
            q: DVector::zeros(d),
            p: DVector::zeros(d),
            x: SiegelPoint::base_point(d),
            phase: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// State + h · derivative. Fails with `BLost` when the width matrix ℬ
    /// leaves the positive-definite cone.
    pub fn add_scaled(&self, k: &HellerDeriv<T>, h: T) -> Result<Self> {
        let a = SymMatrix::new(self.x.a() + &k.da * h).expect("sum of symmetric matrices");
        let b_raw = self.x.b() + &k.db * h;
        let b = crate::matlin::SpdMatrix::new(b_raw).map_err(|e| match e {
            Error::NotPositiveDefinite { min_eig, .. } => Error::BLost { min_eig },
            other => other,
        })?;
        Ok(Self {
            q: &self.q + &k.dq * h,
            p: &self.p + &k.dp * h,
            x: SiegelPoint::new(a, b)?,
            phase: self.phase + k.dphase * h,
        })
    }
}

/// Time derivative of a [`HagedornState`].
#[derive(Debug, Clone)]
pub struct HagedornDeriv<T: Real> {
    pub dq: DVector<T>,
    pub dp: DVector<T>,
    pub dq_mat: CMat<T>,
    pub dp_mat: CMat<T>,
    pub daction: T,
}

impl<T: Real> HagedornDeriv<T> {
    /// Σ cᵢ · kᵢ.
    pub fn weighted_sum(terms: &[(T, &Self)]) -> Self {
        let first = terms[0].1;
        let d = first.dq.len();
        let mut out = Self {
            dq: DVector::zeros(d),
            dp: DVector::zeros(d),
            dq_mat: CMat::zeros(d, d),
            dp_mat: CMat::zeros(d, d),
            daction: T::zero(),
        };
        for (c, k) in terms {
            let cc = Complex::new(*c, T::zero());
            out.dq += &k.dq * *c;
            out.dp += &k.dp * *c;
            out.dq_mat += &k.dq_mat * cc;
            out.dp_mat += &k.dp_mat * cc;
            out.daction += k.daction * *c;
        }
        out
    }
}

/// Time derivative of a [`HellerState`]; the matrix blocks stay symmetric.
#[derive(Debug, Clone)]
pub struct HellerDeriv<T: Real> {
    pub dq: DVector<T>,
    pub dp: DVector<T>,
    pub da: DMatrix<T>,
    pub db: DMatrix<T>,
    pub dphase: T,
}

impl<T: Real> HellerDeriv<T> {
    pub fn weighted_sum(terms: &[(T, &Self)]) -> Self {
        let first = terms[0].1;
        let d = first.dq.len();
        let mut out = Self {
            dq: DVector::zeros(d),
            dp: DVector::zeros(d),
            da: DMatrix::zeros(d, d),
            db: DMatrix::zeros(d, d),
            dphase: T::zero(),
        };
        for (c, k) in terms {
            out.dq += &k.dq * *c;
            out.dp += &k.dp * *c;
            out.da += &k.da * *c;
            out.db += &k.db * *c;
            out.dphase += k.dphase * *c;
        }
        out
    }
}

/// Re(Q Q*) = Q₁Q₁ᵀ + Q₂Q₂ᵀ, the real symmetric matrix the third-derivative
/// term contracts against in the lifted equations.
fn q_gram_real<T: Real>(qp: &ComplexQP<T>) -> DMatrix<T> {
    re_part(&(qp.q() * qp.q().adjoint()))
}

/// Lifted vector field: q̇ = p/m, Q̇ = P/m, Ṗ = −∇²V(q) Q,
/// ṗ = −∇V(q) − (ħ/4)·∂_q tr[Q* ∇²V(q) Q] (the last term only when
/// `corrected`), Ṡ = p²/2m − V(q).
pub fn hagedorn_rhs<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
) -> HagedornDeriv<T> {
    let inv_m = T::one() / prm.mass;
    let hess = v.hessian(&s.q);
    let mut dp = -v.gradient(&s.q);
    if prm.corrected {
        let third = third_contraction_or_fd(v, &s.q, &q_gram_real(&s.qp));
        dp -= third * (prm.hbar * real::<T>(0.25));
    }
    HagedornDeriv {
        dq: &s.p * inv_m,
        dp,
        dq_mat: s.qp.p() * Complex::new(inv_m, T::zero()),
        dp_mat: -(from_real(&hess) * s.qp.q()),
        daction: s.p.norm_squared() * (inv_m * real::<T>(0.5)) - v.value(&s.q),
    }
}

/// Reduced vector field: 𝒜̇ = −(𝒜² − ℬ²)/m − ∇²V(q),
/// ℬ̇ = −(𝒜ℬ + ℬ𝒜)/m, ṗ as in the lifted flow with ℬ⁻¹ in place of Re(QQ*),
/// φ̇ = p²/2m − V(q) − (ħ/2m) tr ℬ.
pub fn heller_rhs<T: Real, P: Potential<T> + ?Sized>(
    s: &HellerState<T>,
    v: &P,
    prm: &SimParams<T>,
) -> HellerDeriv<T> {
    let inv_m = T::one() / prm.mass;
    let a = s.x.a();
    let b = s.x.b();
    let hess = v.hessian(&s.q);
    let da = symmetrize(&(-(a * a - b * b) * inv_m - &hess));
    let db = symmetrize(&(-(a * b + b * a) * inv_m));
    let mut dp = -v.gradient(&s.q);
    if prm.corrected {
        let third = third_contraction_or_fd(v, &s.q, &s.x.b_inverse());
        dp -= third * (prm.hbar * real::<T>(0.25));
    }
    let dphase = s.p.norm_squared() * (inv_m * real::<T>(0.5))
        - v.value(&s.q)
        - prm.hbar * inv_m * real::<T>(0.5) * b.trace();
    HellerDeriv { dq: &s.p * inv_m, dp, da, db, dphase }
}

/// H_Zd(Q, P) = tr(P*P)/2m + tr(Q* K Q)/2 for a constant Hessian K.
pub fn lifted_quadratic_hamiltonian<T: Real>(qp: &ComplexQP<T>, hess: &DMatrix<T>, mass: T) -> T {
    let kinetic = (qp.p().adjoint() * qp.p()).trace().re / (real::<T>(2.0) * mass);
    let potential = (qp.q().adjoint() * from_real(hess) * qp.q()).trace().re * real::<T>(0.5);
    kinetic + potential
}

/// H̄_J(𝒜, ℬ) = ½ tr[ℬ⁻¹((𝒜² + ℬ²)/m + K)].
pub fn reduced_quadratic_hamiltonian<T: Real>(x: &SiegelPoint<T>, hess: &DMatrix<T>, mass: T) -> T {
    let a = x.a();
    let b = x.b();
    let inner = (a * a + b * b) / mass + hess;
    (x.b_inverse() * inner).trace() * real::<T>(0.5)
}

/// Extended Hamiltonian H = p²/2m + V(q) + (ħ/2) H_Zd with the Hessian at q.
pub fn extended_hamiltonian<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    v: &P,
    prm: &SimParams<T>,
) -> T {
    s.p.norm_squared() / (real::<T>(2.0) * prm.mass)
        + v.value(&s.q)
        + prm.hbar * real::<T>(0.5) * lifted_quadratic_hamiltonian(&s.qp, &v.hessian(&s.q), prm.mass)
}

/// Reduced extended Hamiltonian H̄ = p²/2m + V(q) + (ħ/4) tr[ℬ⁻¹((𝒜² + ℬ²)/m + ∇²V(q))].
pub fn reduced_extended_hamiltonian<T: Real, P: Potential<T> + ?Sized>(
    s: &HellerState<T>,
    v: &P,
    prm: &SimParams<T>,
) -> T {
    s.p.norm_squared() / (real::<T>(2.0) * prm.mass)
        + v.value(&s.q)
        + prm.hbar * real::<T>(0.5) * reduced_quadratic_hamiltonian(&s.x, &v.hessian(&s.q), prm.mass)
}

/// (q ⋄ p)_{ij} = q_j p_i − q_i p_j.
pub fn diamond<T: Real>(q: &DVector<T>, p: &DVector<T>) -> DMatrix<T> {
    let d = q.len();
    DMatrix::from_fn(d, d, |i, j| q[j] * p[i] - q[i] * p[j])
}

/// Semiclassical angular momentum
/// J = q ⋄ p + (ħ/2)(P₁Q₁ᵀ + P₂Q₂ᵀ − Q₁P₁ᵀ − Q₂P₂ᵀ), a skew d×d matrix.
pub fn angular_momentum<T: Real>(s: &HagedornState<T>, prm: &SimParams<T>) -> DMatrix<T> {
    let q1 = re_part(s.qp.q());
    let q2 = im_part(s.qp.q());
    let p1 = re_part(s.qp.p());
    let p2 = im_part(s.qp.p());
    let matrix_part = &p1 * q1.transpose() + &p2 * q2.transpose()
        - q1 * p1.transpose()
        - q2 * p2.transpose();
    diamond(&s.q, &s.p) + matrix_part * (prm.hbar * real::<T>(0.5))
}

/// Reduced angular momentum J̄ = q ⋄ p − (ħ/2)[ℬ⁻¹, 𝒜].
pub fn reduced_angular_momentum<T: Real>(s: &HellerState<T>, prm: &SimParams<T>) -> DMatrix<T> {
    let b_inv = s.x.b_inverse();
    let a = s.x.a();
    let commutator = &b_inv * a - a * &b_inv;
    diamond(&s.q, &s.p) - commutator * (prm.hbar * real::<T>(0.5))
}

/// Rotation action Υ_R on the lifted state: (q, p, Q, P) ↦ (Rq, Rp, RQ, RP).
pub fn rotate_hagedorn<T: Real>(s: &HagedornState<T>, r: &DMatrix<T>) -> HagedornState<T> {
    let rc = from_real(r);
    HagedornState {
        q: r * &s.q,
        p: r * &s.p,
        qp: ComplexQP::new(&rc * s.qp.q(), &rc * s.qp.p()).expect("shapes preserved"),
        action: s.action,
    }
}

/// Induced action Γ_R on the reduced state: (q, p, 𝒜, ℬ) ↦ (Rq, Rp, R𝒜Rᵀ, RℬRᵀ).
pub fn rotate_heller<T: Real>(s: &HellerState<T>, r: &DMatrix<T>) -> Result<HellerState<T>> {
    let a = symmetrize(&(r * s.x.a() * r.transpose()));
    let b = symmetrize(&(r * s.x.b() * r.transpose()));
    Ok(HellerState {
        q: r * &s.q,
        p: r * &s.p,
        x: SiegelPoint::from_parts(a, b)?,
        phase: s.phase,
    })
}

/// Continuous determination of arg det Q along a trajectory. Each step adds
/// the principal-branch increment of det Q(t+dt)/det Q(t); steps that would
/// rotate the determinant by π/2 or more are rejected as guard violations.
#[derive(Debug, Clone)]
pub struct DetBranch<T: Real> {
    theta: T,
    det: Complex<T>,
}

impl<T: Real> DetBranch<T> {
    /// Start tracking at the principal branch of arg det Q.
    pub fn from_q(q: &CMat<T>) -> Result<Self> {
        let det = q.determinant();
        if det.norm() == T::zero() || !Float::is_finite(det.norm()) {
            return Err(Error::SingularQ { det_abs: det.norm().to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { theta: det.arg(), det })
    }

    /// Resume tracking at a previously recorded unwrapped angle, e.g. when
    /// post-processing a sampled trajectory. `theta` must determine the same
    /// branch point as det Q up to full turns.
    pub fn resume(q: &CMat<T>, theta: T) -> Result<Self> {
        let mut branch = Self::from_q(q)?;
        let turns = Float::round((theta - branch.theta) / (real::<T>(2.0) * T::pi()));
        let resumed = branch.theta + turns * real::<T>(2.0) * T::pi();
        let mismatch = Float::abs(resumed - theta);
        if mismatch > real(1e-6) {
            return Err(Error::StepGuardViolation {
                increment: mismatch.to_f64().unwrap_or(f64::NAN),
            });
        }
        branch.theta = theta;
        Ok(branch)
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn det(&self) -> Complex<T> {
        self.det
    }

    /// Advance to the determinant of the next Q; returns the updated unwrapped
    /// angle.
    pub fn advance(&mut self, q_next: &CMat<T>) -> Result<T> {
        let det_next = q_next.determinant();
        if det_next.norm() == T::zero() || !Float::is_finite(det_next.norm()) {
            return Err(Error::SingularQ { det_abs: det_next.norm().to_f64().unwrap_or(f64::NAN) });
        }
        let increment = (det_next / self.det).arg();
        if Float::abs(increment) >= T::frac_pi_2() {
            return Err(Error::StepGuardViolation {
                increment: increment.to_f64().unwrap_or(f64::NAN),
            });
        }
        self.theta += increment;
        self.det = det_next;
        Ok(self.theta)
    }
}

/// Phase dictionary relating the two parametrizations:
/// φ = S − (ħ/2)·arg det Q with the continuously unwrapped argument.
///
/// The sign is fixed by the harmonic coherent-state oracle
/// (Q(t) = e^{it}, Ṡ = 0, φ̇ = −ħ/2) and by pointwise equality of the two
/// wavefunction forms.
pub fn phase_from_action<T: Real>(action: T, theta: T, hbar: T) -> T {
    action - hbar * real::<T>(0.5) * theta
}

/// Inverse dictionary S = φ + (ħ/2)·arg det Q.
pub fn action_from_phase<T: Real>(phase: T, theta: T, hbar: T) -> T {
    phase + hbar * real::<T>(0.5) * theta
}

/// Project the lifted state to the reduced one: X = PQ⁻¹,
/// φ = S − (ħ/2)·arg det Q with the branch supplied by the caller.
pub fn project_state<T: Real>(
    s: &HagedornState<T>,
    prm: &SimParams<T>,
    branch: &DetBranch<T>,
) -> Result<HellerState<T>> {
    let residual = s.on_shell_residual();
    if residual > crate::spgroup::sp_tol() {
        return Err(Error::OffShell { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    let x = SiegelPoint::from_qp(s.qp.q(), s.qp.p()).map_err(|e| match e {
        Error::SingularDenominator { .. } => Error::SingularQ {
            det_abs: s.qp.q().determinant().norm().to_f64().unwrap_or(f64::NAN),
        },
        other => other,
    })?;
    HellerState::new(
        s.q.clone(),
        s.p.clone(),
        x,
        phase_from_action(s.action, branch.theta(), prm.hbar),
    )
}

/// Opt-in post-processing step for drifted (Q, P) pairs: rebuild the nearest
/// structured symplectic point through the Iwasawa factors, unitarizing the
/// fiber factor by its polar decomposition. Never applied implicitly — the
/// constraint drift stays visible to the caller until this is requested.
pub fn resymplectify<T: Real>(qp: &ComplexQP<T>) -> Result<ComplexQP<T>> {
    let d = qp.dim();
    let a = re_part(qp.q());
    let b = im_part(qp.q());
    let c = re_part(qp.p());
    let dd = im_part(qp.p());

    let gram = crate::matlin::SpdMatrix::new(&a * a.transpose() + &b * b.transpose())?;
    let gram_inv = crate::matlin::spd_power(&gram, crate::matlin::SpdPower::Inverse);
    let l = crate::matlin::spd_power(&gram, crate::matlin::SpdPower::Sqrt);
    let l_inv = crate::matlin::spd_power(&gram, crate::matlin::SpdPower::InvSqrt);
    let p_sym = symmetrize(&((&c * a.transpose() + &dd * b.transpose()) * gram_inv.matrix()));

    // raw fiber factor [[U, V], [−V, U]]; its polar factor stays J-commuting,
    // hence lands exactly in Sp(2d,ℝ) ∩ O(2d)
    let u = l_inv.matrix() * &a;
    let v = l_inv.matrix() * &b;
    let mut r = DMatrix::zeros(2 * d, 2 * d);
    r.view_mut((0, 0), (d, d)).copy_from(&u);
    r.view_mut((0, d), (d, d)).copy_from(&v);
    r.view_mut((d, 0), (d, d)).copy_from(&(-&v));
    r.view_mut((d, d), (d, d)).copy_from(&u);
    let rtr = crate::matlin::SpdMatrix::new(r.transpose() * &r)?;
    let r_polar = &r * crate::matlin::spd_power(&rtr, crate::matlin::SpdPower::InvSqrt).matrix();

    let mut x2 = DMatrix::zeros(2 * d, 2 * d);
    x2.view_mut((0, 0), (d, d)).copy_from(l.matrix());
    x2.view_mut((d, 0), (d, d)).copy_from(&(&p_sym * l.matrix()));
    x2.view_mut((d, d), (d, d)).copy_from(l_inv.matrix());
    let z = x2 * r_polar;

    ComplexQP::new(
        crate::cmat::complexify(
            &z.view((0, 0), (d, d)).into_owned(),
            &z.view((0, d), (d, d)).into_owned(),
        ),
        crate::cmat::complexify(
            &z.view((d, 0), (d, d)).into_owned(),
            &z.view((d, d), (d, d)).into_owned(),
        ),
    )
}

/// Lift a reduced state through the section: Q = ℬ^{−1/2},
/// P = 𝒜ℬ^{−1/2} + iℬ^{1/2}. det Q > 0, so the branch starts at θ = 0 and
/// S = φ.
pub fn lift_state<T: Real>(s: &HellerState<T>) -> Result<(HagedornState<T>, DetBranch<T>)> {
    let sp = crate::siegel::section(&s.x);
    let block = crate::spgroup::BlockSymplectic::from_matrix(&sp)?;
    let qp = crate::spgroup::to_complex(&block);
    let branch = DetBranch::from_q(qp.q())?;
    let lifted = HagedornState::new(s.q.clone(), s.p.clone(), qp, s.phase)?;
    Ok((lifted, branch))
}

/// ψ₀(x) in the reduced parametrization:
/// (det ℬ/(πħ)^d)^{1/4} exp{(i/ħ)[½(x−q)ᵀ(𝒜+iℬ)(x−q) + p·(x−q) + φ]}.
pub fn heller_wavefunction<T: Real>(
    s: &HellerState<T>,
    x: &DVector<T>,
    prm: &SimParams<T>,
) -> Complex<T> {
    let d = s.dim();
    let y = x - &s.q;
    let c = s.x.to_complex();
    let yc = y.map(|t| Complex::new(t, T::zero()));
    let quad = (&yc.transpose() * &c * &yc)[(0, 0)] * Complex::new(real::<T>(0.5), T::zero());
    let linear = Complex::new(s.p.dot(&y), T::zero());
    let phase = Complex::new(s.phase, T::zero());
    let exponent = (quad + linear + phase) * Complex::new(T::zero(), T::one() / prm.hbar);
    let det_b = s.x.b().determinant();
    let pi_hbar = T::pi() * prm.hbar;
    let prefactor = Float::powf(det_b / Float::powi(pi_hbar, d as i32), real::<T>(0.25));
    exponent.exp() * Complex::new(prefactor, T::zero())
}

/// ψ₀(x) in the lifted parametrization with the continuously tracked branch
/// of (det Q)^{−1/2}:
/// (πħ)^{−d/4} |det Q|^{−1/2} e^{−iθ/2} exp{(i/ħ)[½(x−q)ᵀPQ⁻¹(x−q) + p·(x−q) + S]}.
pub fn hagedorn_wavefunction<T: Real>(
    s: &HagedornState<T>,
    x: &DVector<T>,
    prm: &SimParams<T>,
    theta: T,
) -> Result<Complex<T>> {
    let d = s.dim();
    let det_q = s.qp.q().determinant();
    if det_q.norm() == T::zero() || !Float::is_finite(det_q.norm()) {
        return Err(Error::SingularQ { det_abs: det_q.norm().to_f64().unwrap_or(f64::NAN) });
    }
    let q_inv = guarded_inverse(s.qp.q()).map_err(|_| Error::SingularQ {
        det_abs: det_q.norm().to_f64().unwrap_or(f64::NAN),
    })?;
    let c = s.qp.p() * q_inv;
    let y = x - &s.q;
    let yc = y.map(|t| Complex::new(t, T::zero()));
    let quad = (&yc.transpose() * &c * &yc)[(0, 0)] * Complex::new(real::<T>(0.5), T::zero());
    let linear = Complex::new(s.p.dot(&y), T::zero());
    let action = Complex::new(s.action, T::zero());
    let exponent = (quad + linear + action) * Complex::new(T::zero(), T::one() / prm.hbar);
    let pi_hbar = T::pi() * prm.hbar;
    let magnitude = Float::powf(pi_hbar, -(real::<T>(0.25)) * real::<T>(d as f64))
        / Float::sqrt(det_q.norm());
    let half_theta = Complex::new(T::zero(), -theta * real::<T>(0.5)).exp();
    Ok(exponent.exp() * half_theta * Complex::new(magnitude, T::zero()))
}

/// Common factor of the Schrödinger residual for a Gaussian
/// ψ = N(t) e^{(i/ħ)[½yᵀCy + p·y + φ]}: W = residual/ψ, assembled from the
/// parameter velocities by the chain rule and the analytic spatial
/// derivatives.
#[allow(clippy::too_many_arguments)]
fn residual_factor<T: Real>(
    y: &DVector<T>,
    c: &CMat<T>,
    c_dot: &CMat<T>,
    p: &DVector<T>,
    dq: &DVector<T>,
    dp: &DVector<T>,
    dphase: T,
    n_dot_over_n: Complex<T>,
    v_at_x: T,
    prm: &SimParams<T>,
) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let hbar = Complex::new(prm.hbar, T::zero());
    let half = Complex::new(real::<T>(0.5), T::zero());
    let yc = y.map(|t| Complex::new(t, T::zero()));
    let cy = c * &yc;

    // ∂_t E = ½yᵀĊy − q̇ᵀCy + ṗ·y − p·q̇ + φ̇
    let de = (&yc.transpose() * c_dot * &yc)[(0, 0)] * half
        - dq.map(|t| Complex::new(t, T::zero())).dot(&cy)
        + Complex::new(dp.dot(y) - p.dot(dq) + dphase, T::zero());

    // (ħ²/2m)Δψ/ψ = (iħ/2m) tr C − (1/2m)(Cy + p)·(Cy + p), bilinear square
    let cy_plus_p = &cy + p.map(|t| Complex::new(t, T::zero()));
    let two_m = Complex::new(real::<T>(2.0) * prm.mass, T::zero());
    let laplace_term = i * hbar * c.trace() / two_m - cy_plus_p.dot(&cy_plus_p) / two_m;

    i * hbar * n_dot_over_n - de + laplace_term - Complex::new(v_at_x, T::zero())
}

/// Pointwise residual iħ∂_tψ − [−ħ²Δ/2m + V(x)]ψ of the reduced form, with
/// ∂_tψ induced by the supplied parameter velocities.
pub fn heller_residual<T: Real, P: Potential<T> + ?Sized>(
    s: &HellerState<T>,
    ds: &HellerDeriv<T>,
    v: &P,
    x: &DVector<T>,
    prm: &SimParams<T>,
) -> Complex<T> {
    let y = x - &s.q;
    let c = s.x.to_complex();
    let c_dot = crate::cmat::complexify(&ds.da, &ds.db);
    // Ṅ/N = ¼ tr(ℬ⁻¹ℬ̇)
    let n_dot = Complex::new((s.x.b_inverse() * &ds.db).trace() * real::<T>(0.25), T::zero());
    let w = residual_factor(&y, &c, &c_dot, &s.p, &ds.dq, &ds.dp, ds.dphase, n_dot, v.value(x), prm);
    heller_wavefunction(s, x, prm) * w
}

/// Pointwise residual of the lifted form; `theta` is the unwrapped arg det Q
/// used by the wavefunction value.
pub fn hagedorn_residual<T: Real, P: Potential<T> + ?Sized>(
    s: &HagedornState<T>,
    ds: &HagedornDeriv<T>,
    v: &P,
    x: &DVector<T>,
    prm: &SimParams<T>,
    theta: T,
) -> Result<Complex<T>> {
    let y = x - &s.q;
    let q_inv = guarded_inverse(s.qp.q())?;
    let c = s.qp.p() * &q_inv;
    let c_dot = &ds.dp_mat * &q_inv - &c * &ds.dq_mat * &q_inv;
    // Ṅ/N = −½ tr(Q⁻¹Q̇); covers both the amplitude and the branch phase
    let n_dot = -(q_inv * &ds.dq_mat).trace() * Complex::new(real::<T>(0.5), T::zero());
    let w = residual_factor(&y, &c, &c_dot, &s.p, &ds.dq, &ds.dp, ds.daction, n_dot, v.value(x), prm);
    Ok(hagedorn_wavefunction(s, x, prm, theta)? * w)
}

/// Tensor-product quadrature grid for d ≤ 2 expectation values.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec<T: Real> {
    pub points_per_dim: usize,
    pub half_width_sigmas: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self { points_per_dim: 2048, half_width_sigmas: real(8.0) }
    }
}

/// Packet width scale σ = sqrt(ħ / (2·λ_min(ℬ))).
fn packet_sigma<T: Real>(s: &HellerState<T>, prm: &SimParams<T>) -> T {
    Float::sqrt(prm.hbar / (real::<T>(2.0) * s.x.b_spd().min_eigenvalue()))
}

fn quadrature_grid<T: Real>(
    s: &HellerState<T>,
    prm: &SimParams<T>,
    grid: &GridSpec<T>,
) -> Result<(Vec<T>, T, T)> {
    let d = s.dim();
    if d > 2 {
        return Err(Error::ShapeMismatch {
            context: format!("grid quadrature supports d ≤ 2, got d = {d}"),
        });
    }
    let sigma = packet_sigma(s, prm);
    if grid.half_width_sigmas < real(5.0) {
        return Err(Error::GridTooCoarse {
            context: format!(
                "window must cover at least 10σ (half-width ≥ 5σ), got {:.2}σ",
                grid.half_width_sigmas.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    let half_width = grid.half_width_sigmas * sigma;
    let n = grid.points_per_dim;
    if n < 2 {
        return Err(Error::GridTooCoarse { context: "need at least 2 points per axis".into() });
    }
    let dx = real::<T>(2.0) * half_width / real::<T>((n - 1) as f64);
    if dx > sigma / real(4.0) {
        return Err(Error::GridTooCoarse {
            context: format!(
                "grid step {:.3e} does not resolve σ = {:.3e} (need dx ≤ σ/4)",
                dx.to_f64().unwrap_or(f64::NAN),
                sigma.to_f64().unwrap_or(f64::NAN)
            ),
        });
    }
    let offsets: Vec<T> = (0..n)
        .map(|k| -half_width + dx * real::<T>(k as f64))
        .collect();
    Ok((offsets, dx, sigma))
}

fn trapezoid_weight<T: Real>(k: usize, n: usize, dx: T) -> T {
    if k == 0 || k == n - 1 {
        dx * real(0.5)
    } else {
        dx
    }
}

/// ∫ conj(ψ)·(Ĥψ) dx over the grid window by the trapezoid rule, with Ĥψ
/// evaluated analytically on the Gaussian. d ≤ 2.
pub fn expectation_energy<T: Real, P: Potential<T> + ?Sized>(
    s: &HellerState<T>,
    v: &P,
    prm: &SimParams<T>,
    grid: &GridSpec<T>,
) -> Result<T> {
    let (offsets, dx, _) = quadrature_grid(s, prm, grid)?;
    let n = offsets.len();
    let c = s.x.to_complex();
    let i = Complex::new(T::zero(), T::one());
    let hbar = prm.hbar;
    let two_m = real::<T>(2.0) * prm.mass;

    // Ĥψ/ψ = −(iħ/2m) tr C + (1/2m)(Cy+p)·(Cy+p) + V(x)
    let local = |x: &DVector<T>| -> T {
        let y = x - &s.q;
        let yc = y.map(|t| Complex::new(t, T::zero()));
        let cy_plus_p = &c * yc + s.p.map(|t| Complex::new(t, T::zero()));
        let h_over_psi = -i * Complex::new(hbar, T::zero()) * c.trace() / Complex::new(two_m, T::zero())
            + cy_plus_p.dot(&cy_plus_p) / Complex::new(two_m, T::zero())
            + Complex::new(v.value(x), T::zero());
        let psi = heller_wavefunction(s, x, prm);
        (psi.conj() * psi * h_over_psi).re
    };

    let total = match s.dim() {
        1 => {
            let mut acc = T::zero();
            for (k, off) in offsets.iter().enumerate() {
                let x = DVector::from_vec(vec![s.q[0] + *off]);
                acc += local(&x) * trapezoid_weight(k, n, dx);
            }
            acc
        }
        2 => {
            let mut acc = T::zero();
            for (k1, o1) in offsets.iter().enumerate() {
                for (k2, o2) in offsets.iter().enumerate() {
                    let x = DVector::from_vec(vec![s.q[0] + *o1, s.q[1] + *o2]);
                    let w = trapezoid_weight(k1, n, dx) * trapezoid_weight(k2, n, dx);
                    acc += local(&x) * w;
                }
            }
            acc
        }
        _ => unreachable!("dimension checked by quadrature_grid"),
    };
    Ok(total)
}

/// ∫ |ψ|² dx over the grid window; equals 1 up to window truncation.
pub fn norm_squared<T: Real>(
    s: &HellerState<T>,
    prm: &SimParams<T>,
    grid: &GridSpec<T>,
) -> Result<T> {
    let (offsets, dx, _) = quadrature_grid(s, prm, grid)?;
    let n = offsets.len();
    let density = |x: &DVector<T>| -> T {
        let psi = heller_wavefunction(s, x, prm);
        (psi.conj() * psi).re
    };
    let total = match s.dim() {
        1 => {
            let mut acc = T::zero();
            for (k, off) in offsets.iter().enumerate() {
                let x = DVector::from_vec(vec![s.q[0] + *off]);
                acc += density(&x) * trapezoid_weight(k, n, dx);
            }
            acc
        }
        2 => {
            let mut acc = T::zero();
            for (k1, o1) in offsets.iter().enumerate() {
                for (k2, o2) in offsets.iter().enumerate() {
                    let x = DVector::from_vec(vec![s.q[0] + *o1, s.q[1] + *o2]);
                    acc += density(&x) * trapezoid_weight(k1, n, dx) * trapezoid_weight(k2, n, dx);
                }
            }
            acc
        }
        _ => unreachable!(),
    };
    Ok(total)
}
