//! The big phase space Z_d ≅ M_{2d}(ℝ) with its canonical forms, the right
//! O(2d) action, the momentum map, the level-set/Sp(2d,ℝ) identification, and
//! the numerical check of the reduced symplectic form.

use nalgebra::DMatrix;
use num_traits::Float;

use crate::cmat::complexify;
use crate::error::{Error, Result};
use crate::matlin::{symmetrize, Diagnostic, SymMatrix};
use crate::scalar::{real, Real};
use crate::siegel::{siegel_form, SiegelPoint, SiegelTangent};
use crate::spgroup::symplectic_j;

/// Tolerance for level-set membership and linearized-constraint checks.
pub const LEVEL_TOL: f64 = 1e-8;

/// A point Z = [[Q₁, Q₂], [P₁, P₂]] of Z_d. No invariant: the level set is a
/// predicate, not a structural property.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint<T: Real> {
    pub q1: DMatrix<T>,
    pub q2: DMatrix<T>,
    pub p1: DMatrix<T>,
    pub p2: DMatrix<T>,
}

/// Z_d is a vector space, so tangent vectors carry the same block structure.
pub type PhaseTangent<T> = PhasePoint<T>;

impl<T: Real> PhasePoint<T> {
    pub fn new(q1: DMatrix<T>, q2: DMatrix<T>, p1: DMatrix<T>, p2: DMatrix<T>) -> Result<Self> {
        let d = q1.nrows();
        for (name, m) in [("Q1", &q1), ("Q2", &q2), ("P1", &p1), ("P2", &p2)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::ShapeMismatch {
                    context: format!("block {name} is {}x{}, expected {d}x{d}", m.nrows(), m.ncols()),
                });
            }
        }
        Ok(Self { q1, q2, p1, p2 })
    }

    pub fn from_matrix(z: &DMatrix<T>) -> Result<Self> {
        if z.nrows() != z.ncols() || !z.nrows().is_multiple_of(2) {
            return Err(Error::ShapeMismatch {
                context: format!("phase point must be 2d x 2d, got {}x{}", z.nrows(), z.ncols()),
            });
        }
        let d = z.nrows() / 2;
        Self::new(
            z.view((0, 0), (d, d)).into_owned(),
            z.view((0, d), (d, d)).into_owned(),
            z.view((d, 0), (d, d)).into_owned(),
            z.view((d, d), (d, d)).into_owned(),
        )
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            q1: DMatrix::zeros(d, d),
            q2: DMatrix::zeros(d, d),
            p1: DMatrix::zeros(d, d),
            p2: DMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.q1.nrows()
    }

    pub fn to_matrix(&self) -> DMatrix<T> {
        let d = self.dim();
        let mut z = DMatrix::zeros(2 * d, 2 * d);
        z.view_mut((0, 0), (d, d)).copy_from(&self.q1);
        z.view_mut((0, d), (d, d)).copy_from(&self.q2);
        z.view_mut((d, 0), (d, d)).copy_from(&self.p1);
        z.view_mut((d, d), (d, d)).copy_from(&self.p2);
        z
    }

    /// π(Z) = P Q⁻¹ with Q = Q₁ + iQ₂, P = P₁ + iP₂.
    pub fn project(&self) -> Result<SiegelPoint<T>> {
        let q = complexify(&self.q1, &self.q2);
        let p = complexify(&self.p1, &self.p2);
        SiegelPoint::from_qp(&q, &p)
    }
}

/// The canonical one-form Θ = tr(P₁ᵀ dQ₁) + tr(P₂ᵀ dQ₂) evaluated on a tangent.
pub fn theta_eval<T: Real>(z: &PhasePoint<T>, v: &PhaseTangent<T>) -> T {
    (z.p1.transpose() * &v.q1).trace() + (z.p2.transpose() * &v.q2).trace()
}

/// The standard symplectic form Ω = dQ₁ ∧ dP₁ + dQ₂ ∧ dP₂ on a tangent pair.
pub fn omega_eval<T: Real>(z: &PhasePoint<T>, v: &PhaseTangent<T>, w: &PhaseTangent<T>) -> T {
    let _ = z; // Z_d is linear; the form is constant
    (v.q1.transpose() * &w.p1).trace() - (w.q1.transpose() * &v.p1).trace()
        + (v.q2.transpose() * &w.p2).trace()
        - (w.q2.transpose() * &v.p2).trace()
}

/// Right action Φ_R(Z) = Z·R of O(2d).
pub fn o2d_act<T: Real>(z: &PhasePoint<T>, r: &DMatrix<T>) -> Result<PhasePoint<T>> {
    let n = 2 * z.dim();
    if r.nrows() != n || r.ncols() != n {
        return Err(Error::ShapeMismatch {
            context: format!("rotation must be {n}x{n}, got {}x{}", r.nrows(), r.ncols()),
        });
    }
    let residual = (r.transpose() * r - DMatrix::<T>::identity(n, n)).norm();
    if residual > Float::max(real(1e-10), T::epsilon() * real::<T>(512.0)) {
        return Err(Error::NotOrthogonal { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    PhasePoint::from_matrix(&(z.to_matrix() * r))
}

/// Momentum map value, stored by blocks [[M₁₁, M₁₂], [−M₁₂ᵀ, M₂₂]] with
/// M₁₁, M₂₂ skew.
#[derive(Debug, Clone)]
pub struct MomentumValue<T: Real> {
    pub m11: DMatrix<T>,
    pub m12: DMatrix<T>,
    pub m22: DMatrix<T>,
}

impl<T: Real> MomentumValue<T> {
    /// The assembled 2d×2d value; skew-symmetric by construction.
    pub fn assemble(&self) -> DMatrix<T> {
        let d = self.m11.nrows();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&self.m11);
        m.view_mut((0, d), (d, d)).copy_from(&self.m12);
        m.view_mut((d, 0), (d, d)).copy_from(&(-self.m12.transpose()));
        m.view_mut((d, d), (d, d)).copy_from(&self.m22);
        m
    }
}

/// M(Z): M₁₁ = Q₁ᵀP₁ − P₁ᵀQ₁, M₂₂ = Q₂ᵀP₂ − P₂ᵀQ₂, M₁₂ = Q₁ᵀP₂ − P₁ᵀQ₂.
pub fn momentum_map<T: Real>(z: &PhasePoint<T>) -> MomentumValue<T> {
    let skew_part = |a: &DMatrix<T>, b: &DMatrix<T>| a.transpose() * b - b.transpose() * a;
    MomentumValue {
        m11: skew_part(&z.q1, &z.p1),
        m22: skew_part(&z.q2, &z.p2),
        m12: z.q1.transpose() * &z.p2 - z.p1.transpose() * &z.q2,
    }
}

/// Directional derivative dM(Z)·v of the momentum map (M is quadratic, so the
/// differential is the symmetrized bilinear form). Used as the linearized
/// level-set constraint.
pub fn momentum_differential<T: Real>(z: &PhasePoint<T>, v: &PhaseTangent<T>) -> DMatrix<T> {
    let j = symplectic_j::<T>(z.dim());
    let zm = z.to_matrix();
    let vm = v.to_matrix();
    vm.transpose() * &j * &zm + zm.transpose() * &j * vm
}

/// Lie-algebra inner product ⟨ξ, η⟩ = ½ tr(ξᵀη) on o(2d).
pub fn lie_pairing<T: Real>(xi: &DMatrix<T>, eta: &DMatrix<T>) -> Result<T> {
    for m in [xi, eta] {
        let residual = (m + m.transpose()).norm();
        let tol = Float::max(real::<T>(1e-10), T::epsilon() * real::<T>(512.0));
        if residual > tol * Float::max(T::one(), m.norm()) {
            return Err(Error::NotSkew { residual: residual.to_f64().unwrap_or(f64::NAN) });
        }
    }
    Ok((xi.transpose() * eta).trace() * real::<T>(0.5))
}

/// Level-set membership diagnostic: residual ‖M(Z) − J‖_F.
pub fn is_on_level_j<T: Real>(z: &PhasePoint<T>, tol: T) -> Diagnostic<T> {
    let residual = (momentum_map(z).assemble() - symplectic_j::<T>(z.dim())).norm();
    Diagnostic { pass: residual <= tol, residual }
}

/// Both sides of the defining identity ⟨M(Z), ξ⟩ = Θ(Z ξ).
pub fn pairing_identity<T: Real>(z: &PhasePoint<T>, xi: &DMatrix<T>) -> Result<(T, T)> {
    let m = momentum_map(z).assemble();
    let lhs = lie_pairing(&m, xi)?;
    let generator = PhaseTangent::from_matrix(&(z.to_matrix() * xi))?;
    let rhs = theta_eval(z, &generator);
    Ok((lhs, rhs))
}

/// Analytic differential of π: δ(PQ⁻¹) = δP·Q⁻¹ − PQ⁻¹·δQ·Q⁻¹, split into
/// symmetric real/imaginary parts.
pub fn projection_differential<T: Real>(
    z: &PhasePoint<T>,
    v: &PhaseTangent<T>,
) -> Result<SiegelTangent<T>> {
    let q = complexify(&z.q1, &z.q2);
    let p = complexify(&z.p1, &z.p2);
    let dq = complexify(&v.q1, &v.q2);
    let dp = complexify(&v.p1, &v.p2);
    let q_inv = crate::cmat::guarded_inverse(&q)?;
    let dc = &dp * &q_inv - &p * &q_inv * dq * &q_inv;
    let da = SymMatrix::new(symmetrize(&crate::cmat::re_part(&dc)))
        .expect("symmetrized matrix is symmetric");
    let db = SymMatrix::new(symmetrize(&crate::cmat::im_part(&dc)))
        .expect("symmetrized matrix is symmetric");
    SiegelTangent::new(da, db)
}

/// Evaluate both sides of the reduced-form identity
/// Ω_Zd(v, w) = −½ Ω_Σd(Tπ v, Tπ w) at a level-set point with tangents
/// satisfying the linearized constraint.
pub fn reduced_form_check<T: Real>(
    z: &PhasePoint<T>,
    v: &PhaseTangent<T>,
    w: &PhaseTangent<T>,
) -> Result<(T, T)> {
    let level = is_on_level_j(z, real(LEVEL_TOL));
    if !level.pass {
        return Err(Error::NotOnLevelSet {
            residual: level.residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    for tangent in [v, w] {
        let residual = momentum_differential(z, tangent).norm();
        if residual > real(LEVEL_TOL) {
            return Err(Error::TangencyViolation {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let lhs = omega_eval(z, v, w);
    let x = z.project()?;
    let tv = projection_differential(z, v)?;
    let tw = projection_differential(z, w)?;
    let rhs = -real::<T>(0.5) * siegel_form(&x, &tv, &tw);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(q1: f64, q2: f64, p1: f64, p2: f64) -> PhasePoint<f64> {
        PhasePoint::new(
            DMatrix::from_element(1, 1, q1),
            DMatrix::from_element(1, 1, q2),
            DMatrix::from_element(1, 1, p1),
            DMatrix::from_element(1, 1, p2),
        )
        .unwrap()
    }

    fn identity_point(d: usize) -> PhasePoint<f64> {
        PhasePoint::from_matrix(&DMatrix::identity(2 * d, 2 * d)).unwrap()
    }

    #[test]
    fn theta_examples() {
        let z = pp(0.0, 0.0, 3.0, 4.0);
        let v = pp(1.0, 1.0, 0.0, 0.0);
        assert!((theta_eval(&z, &v) - 7.0).abs() < 1e-15);

        // zero momentum kills Θ
        let z0 = pp(0.5, -0.2, 0.0, 0.0);
        assert!(theta_eval(&z0, &v).abs() < 1e-15);

        // vertical fiber directions are killed too
        let w = pp(0.0, 0.0, 2.0, -1.0);
        assert!(theta_eval(&z, &w).abs() < 1e-15);
    }

    #[test]
    fn omega_examples() {
        let z = identity_point(1);
        let v = pp(1.0, 0.0, 0.0, 0.0);
        let w = pp(0.0, 0.0, 1.0, 0.0);
        let w2 = pp(0.0, 0.0, 0.0, 1.0);
        assert!(omega_eval(&z, &v, &v).abs() < 1e-15);
        assert!((omega_eval(&z, &v, &w) - 1.0).abs() < 1e-15);
        assert!(omega_eval(&z, &v, &w2).abs() < 1e-15);
    }

    #[test]
    fn o2d_examples() {
        let z = pp(0.3, 1.0, -0.4, 0.9);
        let acted = o2d_act(&z, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(acted, z);

        let j = symplectic_j::<f64>(1);
        let acted = o2d_act(&identity_point(1), &j).unwrap();
        assert_eq!(acted, pp(0.0, 1.0, -1.0, 0.0));

        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        assert!(matches!(o2d_act(&z, &bad), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn momentum_examples() {
        let m = momentum_map(&identity_point(2)).assemble();
        assert!((m - symplectic_j::<f64>(2)).norm() < 1e-15);

        let m = momentum_map(&PhasePoint::<f64>::zeros(2)).assemble();
        assert!(m.norm() < 1e-15);

        let z2 = PhasePoint::from_matrix(&(DMatrix::identity(4, 4) * 2.0)).unwrap();
        let m = momentum_map(&z2).assemble();
        assert!((m - symplectic_j::<f64>(2) * 4.0).norm() < 1e-15);
    }

    #[test]
    fn lie_pairing_examples() {
        let j1 = symplectic_j::<f64>(1);
        assert!((lie_pairing(&j1, &j1).unwrap() - 1.0).abs() < 1e-15);
        let j3 = symplectic_j::<f64>(3);
        assert!((lie_pairing(&j3, &j3).unwrap() - 3.0).abs() < 1e-15);

        let zero = DMatrix::<f64>::zeros(2, 2);
        assert!(lie_pairing(&j1, &zero).unwrap().abs() < 1e-15);

        let a = 1.37;
        let xi = DMatrix::from_row_slice(2, 2, &[0.0, a, -a, 0.0]);
        assert!((lie_pairing(&xi, &xi).unwrap() - a * a).abs() < 1e-14);

        let sym = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(lie_pairing(&sym, &j1), Err(Error::NotSkew { .. })));
    }

    #[test]
    fn level_set_examples() {
        assert!(is_on_level_j(&identity_point(2), 1e-10).pass);

        let z2 = PhasePoint::from_matrix(&(DMatrix::identity(4, 4) * 2.0)).unwrap();
        let diag = is_on_level_j(&z2, 1e-10);
        assert!(!diag.pass);
        assert!((diag.residual - 3.0 * 4.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pairing_identity_examples() {
        let (lhs, rhs) = pairing_identity(&PhasePoint::zeros(2), &symplectic_j::<f64>(2)).unwrap();
        assert!(lhs.abs() < 1e-15 && rhs.abs() < 1e-15);

        let d = 3;
        let (lhs, rhs) = pairing_identity(&identity_point(d), &symplectic_j::<f64>(d)).unwrap();
        assert!((lhs - d as f64).abs() < 1e-13);
        assert!((rhs - d as f64).abs() < 1e-13);
    }

    #[test]
    fn reduced_form_antisymmetry_and_base_point() {
        let z = identity_point(1);
        // v = Z J S_v with S_v symmetric is tangent to the level set
        let j = symplectic_j::<f64>(1);
        let sv = DMatrix::from_row_slice(2, 2, &[0.4, -0.1, -0.1, 0.8]);
        let sw = DMatrix::from_row_slice(2, 2, &[-0.3, 0.5, 0.5, 0.2]);
        let v = PhaseTangent::from_matrix(&(z.to_matrix() * &j * sv)).unwrap();
        let w = PhaseTangent::from_matrix(&(z.to_matrix() * &j * sw)).unwrap();

        let (lhs, rhs) = reduced_form_check(&z, &v, &v).unwrap();
        assert!(lhs.abs() < 1e-14 && rhs.abs() < 1e-14);

        let (lhs, rhs) = reduced_form_check(&z, &v, &w).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn reduced_form_on_horizontal_lifts_at_the_base_point() {
        // Horizontal lifts through the section: differentiate section(X(ε))
        // along Siegel curves X(ε) = iI + ε(dA + i dB).
        let d = 2;
        let z = identity_point(d);
        let eps = 1e-6;
        let lift = |da: &DMatrix<f64>, db: &DMatrix<f64>| -> PhaseTangent<f64> {
            let id = DMatrix::<f64>::identity(d, d);
            let plus = crate::siegel::SiegelPoint::from_parts(da * eps, &id + db * eps).unwrap();
            let minus = crate::siegel::SiegelPoint::from_parts(da * (-eps), &id - db * eps).unwrap();
            let fd = (crate::siegel::section(&plus) - crate::siegel::section(&minus)) / (2.0 * eps);
            PhaseTangent::from_matrix(&fd).unwrap()
        };
        let e_sym = |i: usize, j: usize| {
            let mut m = DMatrix::<f64>::zeros(d, d);
            m[(i, j)] = 1.0;
            m[(j, i)] = 1.0;
            m
        };
        let v = lift(&e_sym(0, 0), &DMatrix::zeros(d, d));
        let w = lift(&DMatrix::zeros(d, d), &e_sym(0, 1));
        let (lhs, rhs) = reduced_form_check(&z, &v, &w).unwrap();
        assert!((lhs - rhs).abs() < 1e-9, "lhs {lhs}, rhs {rhs}");

        let v2 = lift(&e_sym(0, 1), &e_sym(1, 1));
        let (lhs, rhs) = reduced_form_check(&z, &v, &v2).unwrap();
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn reduced_form_rejects_off_level() {
        let z2 = PhasePoint::from_matrix(&(DMatrix::identity(2, 2) * 2.0)).unwrap();
        let v = pp(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            reduced_form_check(&z2, &v, &v),
            Err(Error::NotOnLevelSet { .. })
        ));

        let z = identity_point(1);
        let not_tangent = pp(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            reduced_form_check(&z, &not_tangent, &not_tangent),
            Err(Error::TangencyViolation { .. })
        ));
    }
}
