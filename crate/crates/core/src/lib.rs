//! Structure-preserving numerics for Gaussian wave packet dynamics.
//!
//! The crate realizes the Siegel upper half space Σ_d as a symplectic quotient
//! of the matrix phase space Z_d = M_{2d}(ℝ) by the right O(2d) action, and
//! integrates the two standard formulations of Gaussian wave packet dynamics:
//! the lifted linear flow of a complex pair (Q, P) on Sp(2d,ℝ) and the reduced
//! matrix Riccati flow of 𝒜 + iℬ on Σ_d. Every algebraic identity connecting
//! the two pictures is checkable numerically through [`verify`].
//!
//! All kernels are generic over the scalar (f32 or f64) via [`scalar::Real`];
//! the `*64` aliases below fix the double-precision instantiation used by the
//! CLI and the verification suites.
//!
//! ```
//! use gwp_core::dynamics::{project_state, DetBranch, Quadratic, SimParams};
//! use gwp_core::integrate::{integrate_hagedorn, Scheme, StateSample, StepSpec};
//! use gwp_core::HagedornState64;
//!
//! // a displaced coherent packet in a harmonic well, integrated in the
//! // lifted (Q, P) parametrization
//! let potential = Quadratic::isotropic(1, 1.0);
//! let params = SimParams::default();
//! let mut initial = HagedornState64::coherent(1);
//! initial.q[0] = 1.0;
//!
//! let spec = StepSpec::new(1e-3, 5.0, Scheme::Rk4, 100).unwrap();
//! let record = integrate_hagedorn(initial, &potential, &params, &spec).unwrap();
//! assert!(record.termination.is_none());
//!
//! // the constraint residual stays at roundoff, and the final state projects
//! // onto the Siegel upper half space
//! let worst = record.observables.iter()
//!     .filter_map(|o| o.onshell_residual)
//!     .fold(0.0f64, f64::max);
//! assert!(worst < 1e-10);
//!
//! let (state, theta) = match (record.states.last(), record.observables.last()) {
//!     (Some(StateSample::Hagedorn(s)), Some(o)) => (s, o.arg_det_q.unwrap()),
//!     _ => unreachable!(),
//! };
//! let branch = DetBranch::resume(state.qp.q(), theta).unwrap();
//! let reduced = project_state(state, &params, &branch).unwrap();
//! assert!(reduced.x.b()[(0, 0)] > 0.0);
//! ```

pub mod cmat;
pub mod error;
pub mod integrate;
pub mod matlin;
pub mod dynamics;
pub mod reduction;
pub mod sample;
pub mod scalar;
pub mod siegel;
pub mod verify;
pub mod spgroup;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SymMatrix64 = matlin::SymMatrix<f64>;
pub type SpdMatrix64 = matlin::SpdMatrix<f64>;
pub type SiegelPoint64 = siegel::SiegelPoint<f64>;
pub type SiegelTangent64 = siegel::SiegelTangent<f64>;
pub type BlockSymplectic64 = spgroup::BlockSymplectic<f64>;
pub type UnitaryPair64 = spgroup::UnitaryPair<f64>;
pub type ComplexQP64 = spgroup::ComplexQP<f64>;
pub type PhasePoint64 = reduction::PhasePoint<f64>;
pub type HagedornState64 = dynamics::HagedornState<f64>;
pub type HellerState64 = dynamics::HellerState<f64>;
pub type SimParams64 = dynamics::SimParams<f64>;
pub type TrajectoryRecord64 = integrate::TrajectoryRecord<f64>;
