//! The Siegel upper half space Σ_d: complex symmetric matrices 𝒜 + i ℬ with
//! ℬ positive-definite, together with the Sp(2d,ℝ) Möbius action, the section
//! through the base point iI, the Siegel metric and symplectic form, and the
//! matrix Riccati right-hand side that drives the reduced dynamics.

use nalgebra::{Complex, DMatrix};

use crate::cmat::{complexify, csymmetrize, from_real, guarded_inverse, CMat};
use crate::error::{Error, Result};
use crate::matlin::{spd_power, SpdMatrix, SpdPower, SymMatrix};
use crate::scalar::Real;
use crate::spgroup;

/// A point 𝒜 + i ℬ of Σ_d, stored as the real pair (A, B).
///
/// Keeping real parts separate makes the SPD invariant and the symplectic-form
/// formula direct; the complex view is a conversion.
#[derive(Debug, Clone)]
pub struct SiegelPoint<T: Real> {
    a: SymMatrix<T>,
    b: SpdMatrix<T>,
}

impl<T: Real> SiegelPoint<T> {
    pub fn new(a: SymMatrix<T>, b: SpdMatrix<T>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::ShapeMismatch {
                context: format!("Siegel point blocks disagree: A is {}x{0}, B is {1}x{1}", a.dim(), b.dim()),
            });
        }
        Ok(Self { a, b })
    }

    /// Validate and build from raw real and imaginary parts.
    pub fn from_parts(a: DMatrix<T>, b: DMatrix<T>) -> Result<Self> {
        Self::new(SymMatrix::new(a)?, SpdMatrix::new(b)?)
    }

    /// The base point iI_d.
    pub fn base_point(d: usize) -> Self {
        Self { a: SymMatrix::zeros(d), b: SpdMatrix::identity(d) }
    }

    /// π(Q, P) = P Q⁻¹ for a complex pair, symmetrized and validated.
    pub fn from_qp(q: &CMat<T>, p: &CMat<T>) -> Result<Self> {
        let q_inv = guarded_inverse(q)?;
        let c = csymmetrize(&(p * q_inv));
        Self::from_complex(&c)
    }

    /// Split a complex symmetric matrix into (A, B) and validate.
    pub fn from_complex(c: &CMat<T>) -> Result<Self> {
        Self::from_parts(crate::cmat::re_part(c), crate::cmat::im_part(c))
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &DMatrix<T> {
        self.a.matrix()
    }

    pub fn b(&self) -> &DMatrix<T> {
        self.b.matrix()
    }

    pub fn b_spd(&self) -> &SpdMatrix<T> {
        &self.b
    }

    /// 𝒞 = 𝒜 + iℬ.
    pub fn to_complex(&self) -> CMat<T> {
        complexify(self.a(), self.b())
    }

    /// ℬ⁻¹ through the SPD eigendecomposition.
    pub fn b_inverse(&self) -> DMatrix<T> {
        spd_power(&self.b, SpdPower::Inverse).into_inner()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self.a() - other.a()).norm() + (self.b() - other.b()).norm()
    }
}

/// A tangent vector (d𝒜, dℬ) at a point of Σ_d: a pair of symmetric matrices
/// (dℬ unconstrained in sign).
#[derive(Debug, Clone)]
pub struct SiegelTangent<T: Real> {
    pub da: SymMatrix<T>,
    pub db: SymMatrix<T>,
}

impl<T: Real> SiegelTangent<T> {
    pub fn new(da: SymMatrix<T>, db: SymMatrix<T>) -> Result<Self> {
        if da.dim() != db.dim() {
            return Err(Error::ShapeMismatch {
                context: "Siegel tangent blocks disagree in dimension".to_string(),
            });
        }
        Ok(Self { da, db })
    }

    pub fn from_parts(da: DMatrix<T>, db: DMatrix<T>) -> Result<Self> {
        Self::new(SymMatrix::new(da)?, SymMatrix::new(db)?)
    }

    pub fn dim(&self) -> usize {
        self.da.dim()
    }

    /// d𝒞 = d𝒜 + i dℬ.
    pub fn to_complex(&self) -> CMat<T> {
        complexify(self.da.matrix(), self.db.matrix())
    }
}

/// Generalized linear fractional transformation Ψ_S(𝒳) = (C + D𝒳)(A + B𝒳)⁻¹.
///
/// `s` must be symplectic; the result is symmetrized before validation since
/// the exact image is symmetric by the group action.
pub fn mobius_act<T: Real>(s: &DMatrix<T>, x: &SiegelPoint<T>) -> Result<SiegelPoint<T>> {
    let d = x.dim();
    let diag = spgroup::is_symplectic(s, spgroup::sp_tol());
    if !diag.pass {
        return Err(Error::NotSymplectic {
            residual: diag.residual.to_f64().unwrap_or(f64::NAN),
            tol: spgroup::SP_TOL,
        });
    }
    if s.nrows() != 2 * d {
        return Err(Error::ShapeMismatch {
            context: format!("symplectic matrix is {}x{}, point has d = {}", s.nrows(), s.ncols(), d),
        });
    }
    let xc = x.to_complex();
    let a = from_real(&s.view((0, 0), (d, d)).into_owned());
    let b = from_real(&s.view((0, d), (d, d)).into_owned());
    let c = from_real(&s.view((d, 0), (d, d)).into_owned());
    let dd = from_real(&s.view((d, d), (d, d)).into_owned());
    let denom_inv = guarded_inverse(&(&a + &b * &xc))?;
    let image = csymmetrize(&((&c + &dd * &xc) * denom_inv));
    SiegelPoint::from_complex(&image)
}

/// The transitive section X(𝒜, ℬ) = [[ℬ^{−1/2}, 0], [𝒜ℬ^{−1/2}, ℬ^{1/2}]],
/// a symplectic matrix with Ψ_X(iI) = 𝒜 + iℬ.
pub fn section<T: Real>(x: &SiegelPoint<T>) -> DMatrix<T> {
    let d = x.dim();
    let b_inv_half = spd_power(x.b_spd(), SpdPower::InvSqrt);
    let b_half = spd_power(x.b_spd(), SpdPower::Sqrt);
    let lower_left = x.a() * b_inv_half.matrix();
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    s.view_mut((0, 0), (d, d)).copy_from(b_inv_half.matrix());
    s.view_mut((d, 0), (d, d)).copy_from(&lower_left);
    s.view_mut((d, d), (d, d)).copy_from(b_half.matrix());
    s
}

/// The Siegel symplectic form Ω_Σd = −dℬ⁻¹ ∧ d𝒜 evaluated on a tangent pair.
///
/// Wedge convention: dα ∧ dβ (u, v) = α_u β_v − α_v β_u, no 1/2.
pub fn siegel_form<T: Real>(x: &SiegelPoint<T>, u: &SiegelTangent<T>, v: &SiegelTangent<T>) -> T {
    let b_inv = x.b_inverse();
    // δ_w(ℬ⁻¹) = −ℬ⁻¹ dB_w ℬ⁻¹
    let delta_u = -(&b_inv * u.db.matrix() * &b_inv);
    let delta_v = -(&b_inv * v.db.matrix() * &b_inv);
    let term_uv = (delta_u * v.da.matrix()).trace();
    let term_vu = (delta_v * u.da.matrix()).trace();
    -(term_uv - term_vu)
}

/// The Hermitian Siegel metric g_Σd(u, v) = tr(ℬ⁻¹ d𝒞_u ℬ⁻¹ d𝒞̄_v).
pub fn siegel_metric<T: Real>(
    x: &SiegelPoint<T>,
    u: &SiegelTangent<T>,
    v: &SiegelTangent<T>,
) -> Complex<T> {
    let b_inv = from_real(&x.b_inverse());
    let dc_u = u.to_complex();
    let dc_v_bar = v.to_complex().map(|z| z.conj());
    (&b_inv * dc_u * &b_inv * dc_v_bar).trace()
}

/// Matrix Riccati right-hand side 𝒞̇ = −𝒞²/m − ∇²V.
///
/// Splitting 𝒞 = 𝒜 + iℬ recovers the coupled (𝒜, ℬ) equations of the
/// reduced flow.
pub fn riccati_rhs<T: Real>(c: &CMat<T>, hess_v: &DMatrix<T>, mass: T) -> CMat<T> {
    let inv_m = Complex::new(-T::one() / mass, T::zero());
    (c * c) * inv_m - from_real(hess_v)
}
