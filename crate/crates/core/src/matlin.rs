//! Dense small-matrix kernels: symmetric eigendecomposition, SPD powers,
//! structure validation, matrix distances.
//!
//! Everything here targets the d ≤ 16 regime; all decompositions are plain
//! O(d³) dense algorithms.

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Relative symmetry tolerance: 1e-9 · max(1, ‖S‖_F) in f64; floored at a
/// small multiple of the machine epsilon so the f32 instantiation stays
/// usable.
pub fn sym_tol<T: Real>(m: &DMatrix<T>) -> T {
    Float::max(real::<T>(1e-9), T::epsilon() * real::<T>(256.0)) * Float::max(T::one(), m.norm())
}

/// Positive-definiteness floor: 1e-12 · max(1, ‖B‖_F) in f64, epsilon-floored
/// like [`sym_tol`].
pub fn spd_floor<T: Real>(m: &DMatrix<T>) -> T {
    Float::max(real::<T>(1e-12), T::epsilon() * real::<T>(16.0)) * Float::max(T::one(), m.norm())
}

/// Frobenius distance ‖A − B‖_F.
pub fn fro_distance<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    (a - b).norm()
}

/// (S + Sᵀ)/2.
pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * real::<T>(0.5)
}

/// Outcome of a structure check; never an error.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostic<T> {
    pub pass: bool,
    pub residual: T,
}

/// Structure classes recognized by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Symmetric,
    Spd,
    Orthogonal,
    Skew,
}

/// Check a square matrix against a structure class.
///
/// Residual semantics: ‖S − Sᵀ‖_F (symmetric), min-eigenvalue margin above
/// the SPD floor (spd), ‖SᵀS − I‖_F (orthogonal), ‖S + Sᵀ‖_F (skew).
pub fn validate<T: Real>(m: &DMatrix<T>, kind: MatrixKind) -> Diagnostic<T> {
    match kind {
        MatrixKind::Symmetric => {
            let residual = fro_distance(m, &m.transpose());
            Diagnostic { pass: residual <= sym_tol(m), residual }
        }
        MatrixKind::Spd => {
            let sym_res = fro_distance(m, &m.transpose());
            if sym_res > sym_tol(m) {
                return Diagnostic { pass: false, residual: -sym_res };
            }
            let sym = SymMatrix { entries: symmetrize(m) };
            let min_eig = sym_eig(&sym).eigenvalues.min();
            let margin = min_eig - spd_floor(m);
            Diagnostic { pass: margin > T::zero(), residual: margin }
        }
        MatrixKind::Orthogonal => {
            let n = m.nrows();
            let residual = (m.transpose() * m - DMatrix::<T>::identity(n, n)).norm();
            Diagnostic { pass: residual <= real(1e-10), residual }
        }
        MatrixKind::Skew => {
            let residual = (m + m.transpose()).norm();
            Diagnostic { pass: residual <= sym_tol(m), residual }
        }
    }
}

/// A validated symmetric matrix. Construction symmetrizes the input when the
/// asymmetry is below tolerance and rejects it otherwise, so downstream flows
/// stay on the symmetric subspace without masking real defects.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T: Real> {
    entries: DMatrix<T>,
}

impl<T: Real> SymMatrix<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::ShapeMismatch {
                context: format!("symmetric matrix must be square, got {}x{}", m.nrows(), m.ncols()),
            });
        }
        let residual = fro_distance(&m, &m.transpose());
        let tol = sym_tol(&m);
        if residual > tol {
            return Err(Error::NonSymmetric {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { entries: symmetrize(&m) })
    }

    pub fn zeros(d: usize) -> Self {
        Self { entries: DMatrix::zeros(d, d) }
    }

    pub fn identity(d: usize) -> Self {
        Self { entries: DMatrix::identity(d, d) }
    }

    pub fn from_fn(d: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let m = DMatrix::from_fn(d, d, f);
        Self { entries: symmetrize(&m) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.entries
    }
}

/// A validated symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix<T: Real> {
    entries: DMatrix<T>,
}

impl<T: Real> SpdMatrix<T> {
    pub fn new(m: DMatrix<T>) -> Result<Self> {
        let sym = SymMatrix::new(m)?;
        let floor = spd_floor(sym.matrix());
        let min_eig = sym_eig(&sym).eigenvalues.min();
        if min_eig <= floor {
            return Err(Error::NotPositiveDefinite {
                min_eig: min_eig.to_f64().unwrap_or(f64::NAN),
                floor: floor.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { entries: sym.into_inner() })
    }

    pub fn identity(d: usize) -> Self {
        Self { entries: DMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn into_inner(self) -> DMatrix<T> {
        self.entries
    }

    pub fn to_sym(&self) -> SymMatrix<T> {
        SymMatrix { entries: self.entries.clone() }
    }

    pub fn min_eigenvalue(&self) -> T {
        sym_eig(&self.to_sym()).eigenvalues.min()
    }
}

/// Eigendecomposition S = V diag(λ) Vᵀ with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct SymEig<T: Real> {
    pub eigenvalues: DVector<T>,
    pub eigenvectors: DMatrix<T>,
}

impl<T: Real> SymEig<T> {
    /// V diag(λ) Vᵀ.
    pub fn reconstruct(&self) -> DMatrix<T> {
        let d = DMatrix::from_diagonal(&self.eigenvalues);
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi sweeps, eigenvalues sorted
/// descending. Jacobi converges to machine accuracy at these sizes, which the
/// downstream group-membership tolerances rely on.
pub fn sym_eig<T: Real>(s: &SymMatrix<T>) -> SymEig<T> {
    let d = s.dim();
    let mut a = s.matrix().clone();
    let mut v = DMatrix::<T>::identity(d, d);
    let scale = Float::max(a.norm(), T::one());
    let stop = scale * real::<T>(1e-15) * real::<T>(d as f64);

    for _sweep in 0..40 {
        let mut off = T::zero();
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if Float::sqrt(off + off) <= stop {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                if Float::abs(apq) <= scale * real(1e-300) {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (real::<T>(2.0) * apq);
                let t = if theta >= T::zero() {
                    T::one() / (theta + Float::sqrt(theta * theta + T::one()))
                } else {
                    -T::one() / (-theta + Float::sqrt(theta * theta + T::one()))
                };
                let c = T::one() / Float::sqrt(t * t + T::one());
                let sn = t * c;
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .partial_cmp(&a[(i, i)])
            .expect("eigenvalues of a real symmetric matrix are finite")
    });
    let eigenvalues = DVector::from_fn(d, |i, _| a[(order[i], order[i])]);
    let eigenvectors = DMatrix::from_fn(d, d, |i, j| v[(i, order[j])]);
    SymEig { eigenvalues, eigenvectors }
}

/// Exponents supported by [`spd_power`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdPower {
    /// B^{1/2}
    Sqrt,
    /// B^{−1/2}
    InvSqrt,
    /// B^{−1}
    Inverse,
}

impl SpdPower {
    fn apply<T: Real>(self, lambda: T) -> T {
        match self {
            SpdPower::Sqrt => Float::sqrt(lambda),
            SpdPower::InvSqrt => T::one() / Float::sqrt(lambda),
            SpdPower::Inverse => T::one() / lambda,
        }
    }
}

/// B^{1/2}, B^{−1/2}, or B^{−1} via the symmetric eigendecomposition.
///
/// Eigendecomposition gives all powers uniformly at this matrix scale, and the
/// result stays exactly symmetric by construction.
pub fn spd_power<T: Real>(b: &SpdMatrix<T>, power: SpdPower) -> SpdMatrix<T> {
    let eig = sym_eig(&b.to_sym());
    let powered = DVector::from_fn(b.dim(), |i, _| power.apply(eig.eigenvalues[i]));
    let m = &eig.eigenvectors * DMatrix::from_diagonal(&powered) * eig.eigenvectors.transpose();
    SpdMatrix { entries: symmetrize(&m) }
}
