//! The symplectic group Sp(2d,ℝ) in block form, the U(d) embedding, the
//! Iwasawa decomposition, the quotient projection onto Σ_d, and the complex
//! (Q, P) view with its constraint pair.
//!
//! Block dictionary used throughout: the blocks (A, B, C, D) of a symplectic
//! matrix are (Re Q, Im Q, Re P, Im P); both constraint forms of the complex
//! pair follow from it.

use nalgebra::{Complex, DMatrix};

use crate::cmat::{complexify, im_part, re_part, CMat};
use crate::error::{Error, Result};
use crate::matlin::{symmetrize, Diagnostic, SpdMatrix, SpdPower, SymMatrix};
use crate::scalar::{real, Real};
use crate::siegel::{section, SiegelPoint};

/// Absolute membership tolerance for group/constraint checks on unit-scale data.
pub const SP_TOL: f64 = 1e-8;

/// [`SP_TOL`] lifted into the scalar type, epsilon-floored for f32.
pub fn sp_tol<T: Real>() -> T {
    Float::max(real(SP_TOL), T::epsilon() * real::<T>(2048.0))
}

/// The standard symplectic structure matrix J = [[0, I], [−I, 0]].
pub fn symplectic_j<T: Real>(d: usize) -> DMatrix<T> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = T::one();
        j[(d + i, i)] = -T::one();
    }
    j
}

/// Membership check SᵀJS = J; reports the raw residual either way.
pub fn is_symplectic<T: Real>(s: &DMatrix<T>, tol: T) -> Diagnostic<T> {
    if s.nrows() != s.ncols() || !s.nrows().is_multiple_of(2) {
        return Diagnostic { pass: false, residual: T::infinity() };
    }
    let j = symplectic_j::<T>(s.nrows() / 2);
    let residual = (s.transpose() * &j * s - &j).norm();
    Diagnostic { pass: residual <= tol, residual }
}

/// A symplectic matrix stored by its d×d blocks [[A, B], [C, D]].
#[derive(Debug, Clone)]
pub struct BlockSymplectic<T: Real> {
    a: DMatrix<T>,
    b: DMatrix<T>,
    c: DMatrix<T>,
    d: DMatrix<T>,
}

impl<T: Real> BlockSymplectic<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>, c: DMatrix<T>, d: DMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::ShapeMismatch {
                    context: format!("block {name} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols()),
                });
            }
        }
        let candidate = Self { a, b, c, d };
        let diag = is_symplectic(&candidate.to_matrix(), sp_tol());
        if !diag.pass {
            return Err(Error::NotSymplectic {
                residual: diag.residual.to_f64().unwrap_or(f64::NAN),
                tol: SP_TOL,
            });
        }
        Ok(candidate)
    }

    pub fn from_matrix(s: &DMatrix<T>) -> Result<Self> {
        if s.nrows() != s.ncols() || !s.nrows().is_multiple_of(2) {
            return Err(Error::ShapeMismatch {
                context: format!("symplectic matrix must be 2d x 2d, got {}x{}", s.nrows(), s.ncols()),
            });
        }
        let d = s.nrows() / 2;
        Self::new(
            s.view((0, 0), (d, d)).into_owned(),
            s.view((0, d), (d, d)).into_owned(),
            s.view((d, 0), (d, d)).into_owned(),
            s.view((d, d), (d, d)).into_owned(),
        )
    }

    pub fn identity(d: usize) -> Self {
        Self {
            a: DMatrix::identity(d, d),
            b: DMatrix::zeros(d, d),
            c: DMatrix::zeros(d, d),
            d: DMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn blocks(&self) -> (&DMatrix<T>, &DMatrix<T>, &DMatrix<T>, &DMatrix<T>) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn to_matrix(&self) -> DMatrix<T> {
        let d = self.dim();
        let mut s = DMatrix::zeros(2 * d, 2 * d);
        s.view_mut((0, 0), (d, d)).copy_from(&self.a);
        s.view_mut((0, d), (d, d)).copy_from(&self.b);
        s.view_mut((d, 0), (d, d)).copy_from(&self.c);
        s.view_mut((d, d), (d, d)).copy_from(&self.d);
        s
    }
}

/// A real pair (U, V) with U + iV ∈ U(d).
#[derive(Debug, Clone)]
pub struct UnitaryPair<T: Real> {
    u: DMatrix<T>,
    v: DMatrix<T>,
}

impl<T: Real> UnitaryPair<T> {
    pub fn new(u: DMatrix<T>, v: DMatrix<T>) -> Result<Self> {
        let d = u.nrows();
        if u.ncols() != d || v.nrows() != d || v.ncols() != d {
            return Err(Error::ShapeMismatch { context: "unitary pair blocks must be square and equal-sized".into() });
        }
        let id = DMatrix::<T>::identity(d, d);
        let r1 = (u.transpose() * &u + v.transpose() * &v - id).norm();
        let r2 = (u.transpose() * &v - v.transpose() * &u).norm();
        let residual = Float::max(r1, r2);
        if residual > sp_tol() {
            return Err(Error::NotUnitary { residual: residual.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(Self { u, v })
    }

    pub fn identity(d: usize) -> Self {
        Self { u: DMatrix::identity(d, d), v: DMatrix::zeros(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &DMatrix<T> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<T> {
        &self.v
    }

    /// U + iV as a complex matrix.
    pub fn to_complex(&self) -> CMat<T> {
        complexify(&self.u, &self.v)
    }
}

use num_traits::Float;

/// U + iV ↦ [[U, V], [−V, U]] ∈ Sp(2d,ℝ) ∩ O(2d).
pub fn embed_unitary<T: Real>(p: &UnitaryPair<T>) -> DMatrix<T> {
    let d = p.dim();
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    s.view_mut((0, 0), (d, d)).copy_from(&p.u);
    s.view_mut((0, d), (d, d)).copy_from(&p.v);
    s.view_mut((d, 0), (d, d)).copy_from(&(-&p.v));
    s.view_mut((d, d), (d, d)).copy_from(&p.u);
    s
}

/// Inverse of [`embed_unitary`] on its image; validates the block pattern
/// before trusting it.
pub fn extract_unitary<T: Real>(s: &DMatrix<T>) -> Result<UnitaryPair<T>> {
    if s.nrows() != s.ncols() || !s.nrows().is_multiple_of(2) {
        return Err(Error::ShapeMismatch {
            context: format!("expected 2d x 2d matrix, got {}x{}", s.nrows(), s.ncols()),
        });
    }
    let d = s.nrows() / 2;
    let tl = s.view((0, 0), (d, d)).into_owned();
    let tr = s.view((0, d), (d, d)).into_owned();
    let bl = s.view((d, 0), (d, d)).into_owned();
    let br = s.view((d, d), (d, d)).into_owned();
    let pattern = Float::max((&tl - &br).norm(), (&tr + &bl).norm());
    if pattern > sp_tol() {
        return Err(Error::NotUnitary { residual: pattern.to_f64().unwrap_or(f64::NAN) });
    }
    UnitaryPair::new(tl, tr)
}

/// Iwasawa factors of a symplectic matrix: S = [[L, 0], [PL, L⁻¹]] · embed(𝒰).
#[derive(Debug, Clone)]
pub struct Iwasawa<T: Real> {
    pub psym: SymMatrix<T>,
    pub l: SpdMatrix<T>,
    pub u: UnitaryPair<T>,
}

impl<T: Real> Iwasawa<T> {
    /// [[L, 0], [PL, L⁻¹]] · embed(𝒰).
    pub fn reconstruct(&self) -> DMatrix<T> {
        let d = self.l.dim();
        let l = self.l.matrix();
        let l_inv = crate::matlin::spd_power(&self.l, SpdPower::Inverse);
        let pl = self.psym.matrix() * l;
        let mut x2 = DMatrix::zeros(2 * d, 2 * d);
        x2.view_mut((0, 0), (d, d)).copy_from(l);
        x2.view_mut((d, 0), (d, d)).copy_from(&pl);
        x2.view_mut((d, d), (d, d)).copy_from(l_inv.matrix());
        x2 * embed_unitary(&self.u)
    }
}

/// Iwasawa decomposition: P = (CAᵀ + DBᵀ)(AAᵀ + BBᵀ)⁻¹, L = (AAᵀ + BBᵀ)^{1/2},
/// 𝒰 = L⁻¹(A + iB).
pub fn iwasawa<T: Real>(s: &BlockSymplectic<T>) -> Result<Iwasawa<T>> {
    let (a, b, c, d) = s.blocks();
    let gram = SpdMatrix::new(a * a.transpose() + b * b.transpose())?;
    let gram_inv = crate::matlin::spd_power(&gram, SpdPower::Inverse);
    let p_raw = (c * a.transpose() + d * b.transpose()) * gram_inv.matrix();
    let psym = SymMatrix::new(symmetrize(&p_raw))?;
    let l = crate::matlin::spd_power(&gram, SpdPower::Sqrt);
    let l_inv = crate::matlin::spd_power(&gram, SpdPower::InvSqrt);
    let u = UnitaryPair::new(l_inv.matrix() * a, l_inv.matrix() * b)?;
    Ok(Iwasawa { psym, l, u })
}

/// Quotient projection π(S) = (C + iD)(A + iB)⁻¹ ∈ Σ_d.
pub fn project_to_siegel<T: Real>(s: &BlockSymplectic<T>) -> Result<SiegelPoint<T>> {
    let (a, b, c, d) = s.blocks();
    let q = complexify(a, b);
    let p = complexify(c, d);
    SiegelPoint::from_qp(&q, &p)
}

/// The element of the fiber over X determined by the unitary 𝒰:
/// section(X) · embed(𝒰).
pub fn fiber_point<T: Real>(x: &SiegelPoint<T>, u: &UnitaryPair<T>) -> Result<BlockSymplectic<T>> {
    BlockSymplectic::from_matrix(&(section(x) * embed_unitary(u)))
}

/// The complex pair (Q, P) of a symplectic matrix, Q = A + iB, P = C + iD.
#[derive(Debug, Clone)]
pub struct ComplexQP<T: Real> {
    q: CMat<T>,
    p: CMat<T>,
}

impl<T: Real> ComplexQP<T> {
    pub fn new(q: CMat<T>, p: CMat<T>) -> Result<Self> {
        let d = q.nrows();
        if q.ncols() != d || p.nrows() != d || p.ncols() != d {
            return Err(Error::ShapeMismatch { context: "Q and P must be square and equal-sized".into() });
        }
        Ok(Self { q, p })
    }

    /// The coherent pair Q = I, P = iI over the base point.
    pub fn coherent(d: usize) -> Self {
        let q = crate::cmat::from_real(&DMatrix::<T>::identity(d, d));
        let p = q.map(|z| z * Complex::new(T::zero(), T::one()));
        Self { q, p }
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &CMat<T> {
        &self.q
    }

    pub fn p(&self) -> &CMat<T> {
        &self.p
    }

    /// ‖QᵀP − PᵀQ‖_F.
    pub fn symmetry_residual(&self) -> T {
        (self.q.transpose() * &self.p - self.p.transpose() * &self.q).norm()
    }

    /// ‖Q*P − P*Q − 2iI‖_F.
    pub fn normalization_residual(&self) -> T {
        let d = self.dim();
        let two_i = Complex::new(T::zero(), real::<T>(2.0));
        let target = CMat::<T>::identity(d, d) * two_i;
        (self.q.adjoint() * &self.p - self.p.adjoint() * &self.q - target).norm()
    }

    /// Worst of the two constraint residuals.
    pub fn on_shell_residual(&self) -> T {
        Float::max(self.symmetry_residual(), self.normalization_residual())
    }

    pub fn is_on_shell(&self, tol: T) -> bool {
        self.on_shell_residual() <= tol
    }
}

/// Block read-off (A, B, C, D) → (Q, P) = (A + iB, C + iD).
pub fn to_complex<T: Real>(s: &BlockSymplectic<T>) -> ComplexQP<T> {
    let (a, b, c, d) = s.blocks();
    ComplexQP { q: complexify(a, b), p: complexify(c, d) }
}

/// Inverse of [`to_complex`]; requires the pair to satisfy the constraints.
pub fn from_complex<T: Real>(c: &ComplexQP<T>) -> Result<BlockSymplectic<T>> {
    let residual = c.on_shell_residual();
    if residual > sp_tol() {
        return Err(Error::ConstraintViolation { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    BlockSymplectic::new(re_part(&c.q), im_part(&c.q), re_part(&c.p), im_part(&c.p))
}
