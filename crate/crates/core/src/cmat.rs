//! Small helpers for complex matrices built on top of the real scalar type.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::scalar::{real, Real};

/// Dense complex matrix over the crate scalar.
pub type CMat<T> = DMatrix<Complex<T>>;

/// Condition-number guard for matrix denominators.
pub const COND_GUARD: f64 = 1e12;

pub fn complexify<T: Real>(re: &DMatrix<T>, im: &DMatrix<T>) -> CMat<T> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex::new(re[(i, j)], im[(i, j)]))
}

pub fn from_real<T: Real>(re: &DMatrix<T>) -> CMat<T> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex::new(re[(i, j)], T::zero()))
}

pub fn re_part<T: Real>(m: &CMat<T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

pub fn im_part<T: Real>(m: &CMat<T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].im)
}

pub fn csymmetrize<T: Real>(m: &CMat<T>) -> CMat<T> {
    (m + m.transpose()) * Complex::new(real::<T>(0.5), T::zero())
}

/// 2-norm condition number via singular values.
pub fn cond_2<T: Real>(m: &CMat<T>) -> T {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= T::zero() {
        return T::infinity();
    }
    smax / smin
}

/// Invert with a conditioning guard; ill-conditioned input is an error
/// rather than a silently garbage result.
pub fn guarded_inverse<T: Real>(m: &CMat<T>) -> Result<CMat<T>> {
    let cond = cond_2(m);
    if cond >= real(COND_GUARD) || !num_traits::Float::is_finite(cond) {
        return Err(Error::SingularDenominator {
            cond: cond.to_f64().unwrap_or(f64::INFINITY),
            guard: COND_GUARD,
        });
    }
    m.clone().try_inverse().ok_or(Error::SingularDenominator {
        cond: f64::INFINITY,
        guard: COND_GUARD,
    })
}
