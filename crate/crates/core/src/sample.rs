//! Seeded random fixtures for property checks: symmetric/SPD matrices, group
//! elements via the exponential map, level-set points, and tangents.
//!
//! Everything is driven by a counter-based RNG so identical seeds reproduce
//! identical fixtures on any platform.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{HagedornState, HellerState};
use crate::matlin::{symmetrize, SpdMatrix, SymMatrix};
use crate::reduction::{PhasePoint, PhaseTangent};
use crate::scalar::{real, Real};
use crate::siegel::{SiegelPoint, SiegelTangent};
use crate::spgroup::{extract_unitary, symplectic_j, BlockSymplectic, ComplexQP, UnitaryPair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform<T: Real>(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> T {
    real(rng.gen_range(lo..hi))
}

pub fn vector<T: Real>(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DVector<T> {
    DVector::from_fn(d, |_, _| uniform(rng, -scale, scale))
}

pub fn matrix<T: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| uniform(rng, -scale, scale))
}

pub fn symmetric<T: Real>(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<T> {
    symmetrize(&matrix(rng, d, d, scale))
}

pub fn skew<T: Real>(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<T> {
    let m = matrix::<T>(rng, d, d, scale);
    (&m - m.transpose()) * real::<T>(0.5)
}

/// G Gᵀ + εI with ε = 1: positive-definite with a modest condition number.
pub fn spd<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> SpdMatrix<T> {
    let g = matrix::<T>(rng, d, d, 1.0);
    let m = &g * g.transpose() + DMatrix::<T>::identity(d, d);
    SpdMatrix::new(m).expect("G Gᵀ + εI is positive definite")
}

/// exp(J·S) for random symmetric S with ‖S‖_F drawn from (0, 2]: an arbitrary
/// symplectic matrix reachable from the identity.
pub fn symplectic<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<T> {
    let mut s = symmetric::<T>(rng, 2 * d, 1.0);
    let norm = s.norm();
    if norm > T::zero() {
        let target: T = uniform(rng, 0.05, 2.0);
        s *= target / norm;
    }
    (symplectic_j::<T>(d) * s).exp()
}

pub fn block_symplectic<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> BlockSymplectic<T> {
    BlockSymplectic::from_matrix(&symplectic(rng, d)).expect("exponential fixture is symplectic")
}

/// exp of a skew matrix: a rotation in SO(n).
pub fn orthogonal<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<T> {
    skew::<T>(rng, n, 1.0).exp()
}

/// A unitary pair through the embedded u(d) algebra [[X, Y], [−Y, X]]
/// (X skew, Y symmetric): exp lands in Sp(2d,ℝ) ∩ O(2d).
pub fn unitary_pair<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> UnitaryPair<T> {
    let x = skew::<T>(rng, d, 1.0);
    let y = symmetric::<T>(rng, d, 1.0);
    let mut xi = DMatrix::zeros(2 * d, 2 * d);
    xi.view_mut((0, 0), (d, d)).copy_from(&x);
    xi.view_mut((0, d), (d, d)).copy_from(&y);
    xi.view_mut((d, 0), (d, d)).copy_from(&(-&y));
    xi.view_mut((d, d), (d, d)).copy_from(&x);
    extract_unitary(&xi.exp()).expect("exp of the embedded algebra is in the isotropy group")
}

pub fn siegel_point<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> SiegelPoint<T> {
    SiegelPoint::new(
        SymMatrix::new(symmetric(rng, d, 1.0)).expect("symmetrized"),
        spd(rng, d),
    )
    .expect("matching dims")
}

pub fn siegel_tangent<T: Real>(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> SiegelTangent<T> {
    SiegelTangent::new(
        SymMatrix::new(symmetric(rng, d, scale)).expect("symmetrized"),
        SymMatrix::new(symmetric(rng, d, scale)).expect("symmetrized"),
    )
    .expect("matching dims")
}

/// On-shell complex pair: the complex view of a random symplectic matrix.
pub fn onshell_qp<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> ComplexQP<T> {
    crate::spgroup::to_complex(&block_symplectic(rng, d))
}

/// A free point of Z_d (generally off the level set).
pub fn phase_point<T: Real>(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> PhasePoint<T> {
    PhasePoint::new(
        matrix(rng, d, d, scale),
        matrix(rng, d, d, scale),
        matrix(rng, d, d, scale),
        matrix(rng, d, d, scale),
    )
    .expect("square blocks")
}

/// A point on the momentum level set M⁻¹(J) = Sp(2d,ℝ).
pub fn level_point<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> PhasePoint<T> {
    PhasePoint::from_matrix(&symplectic(rng, d)).expect("square")
}

/// Tangent to the level set at Z: right-translate Z·(J·S) of the symplectic
/// algebra, exactly tangent by group structure.
pub fn level_tangent<T: Real>(rng: &mut ChaCha8Rng, z: &PhasePoint<T>) -> PhaseTangent<T> {
    let d = z.dim();
    let s = symmetric::<T>(rng, 2 * d, 1.0);
    PhaseTangent::from_matrix(&(z.to_matrix() * symplectic_j::<T>(d) * s)).expect("square")
}

/// Vertical tangent Z·ξ with ξ in the embedded isotropy algebra u(d).
pub fn vertical_tangent<T: Real>(rng: &mut ChaCha8Rng, z: &PhasePoint<T>) -> PhaseTangent<T> {
    let d = z.dim();
    let x = skew::<T>(rng, d, 1.0);
    let y = symmetric::<T>(rng, d, 1.0);
    let mut xi = DMatrix::zeros(2 * d, 2 * d);
    xi.view_mut((0, 0), (d, d)).copy_from(&x);
    xi.view_mut((0, d), (d, d)).copy_from(&y);
    xi.view_mut((d, 0), (d, d)).copy_from(&(-&y));
    xi.view_mut((d, d), (d, d)).copy_from(&x);
    PhaseTangent::from_matrix(&(z.to_matrix() * xi)).expect("square")
}

/// Random lifted state with an on-shell pair.
pub fn hagedorn_state<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> HagedornState<T> {
    HagedornState::new(
        vector(rng, d, 1.0),
        vector(rng, d, 1.0),
        onshell_qp(rng, d),
        uniform(rng, -1.0, 1.0),
    )
    .expect("matching dims")
}

/// Random reduced state.
pub fn heller_state<T: Real>(rng: &mut ChaCha8Rng, d: usize) -> HellerState<T> {
    HellerState::new(
        vector(rng, d, 1.0),
        vector(rng, d, 1.0),
        siegel_point(rng, d),
        uniform(rng, -1.0, 1.0),
    )
    .expect("matching dims")
}
