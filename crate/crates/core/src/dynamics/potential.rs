//! Potential models: value / gradient / Hessian evaluators, plus the third
//! derivative contraction needed by the ħ-corrected momentum equation.

use nalgebra::{DMatrix, DVector};
use num_traits::Float;

use crate::matlin::SymMatrix;
use crate::scalar::{real, Real};

/// Evaluator triple for a potential V ∈ C³(ℝ^d).
pub trait Potential<T: Real> {
    /// Fixed dimension, or `None` when the potential works in any dimension.
    fn dim(&self) -> Option<usize> {
        None
    }

    fn value(&self, q: &DVector<T>) -> T;

    fn gradient(&self, q: &DVector<T>) -> DVector<T>;

    fn hessian(&self, q: &DVector<T>) -> DMatrix<T>;

    /// ∂_i [Σ_{jk} (∇²V)_{jk}(q) G_{jk}] for symmetric G, when available in
    /// closed form. `None` falls back to finite differences of the Hessian.
    fn third_contraction(&self, q: &DVector<T>, g: &DMatrix<T>) -> Option<DVector<T>> {
        let _ = (q, g);
        None
    }
}

/// Analytic third-derivative contraction when the model provides one, else
/// central finite differences of the Hessian with step 1e-6 · max(1, |q|).
pub fn third_contraction_or_fd<T: Real, P: Potential<T> + ?Sized>(
    potential: &P,
    q: &DVector<T>,
    g: &DMatrix<T>,
) -> DVector<T> {
    if let Some(exact) = potential.third_contraction(q, g) {
        return exact;
    }
    let h = real::<T>(1e-6) * Float::max(T::one(), q.norm());
    let d = q.len();
    DVector::from_fn(d, |i, _| {
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[i] += h;
        qm[i] -= h;
        let dh = potential.hessian(&qp) - potential.hessian(&qm);
        (dh.component_mul(g)).sum() / (real::<T>(2.0) * h)
    })
}

/// V(q) = ½ qᵀKq + b·q + c. The Hessian is constant, so the packet equations
/// are exact and the third-derivative term vanishes identically.
#[derive(Debug, Clone)]
pub struct Quadratic<T: Real> {
    k: SymMatrix<T>,
    b: DVector<T>,
    c: T,
}

impl<T: Real> Quadratic<T> {
    pub fn new(k: SymMatrix<T>, b: DVector<T>, c: T) -> crate::error::Result<Self> {
        if k.dim() != b.len() {
            return Err(crate::error::Error::ShapeMismatch {
                context: format!("quadratic potential: K is {0}x{0} but b has length {1}", k.dim(), b.len()),
            });
        }
        Ok(Self { k, b, c })
    }

    /// Isotropic oscillator V(q) = ½ k |q|².
    pub fn isotropic(d: usize, k: T) -> Self {
        Self {
            k: SymMatrix::from_fn(d, |i, j| if i == j { k } else { T::zero() }),
            b: DVector::zeros(d),
            c: T::zero(),
        }
    }

    /// The free particle V = 0.
    pub fn free(d: usize) -> Self {
        Self::isotropic(d, T::zero())
    }
}

impl<T: Real> Potential<T> for Quadratic<T> {
    fn dim(&self) -> Option<usize> {
        Some(self.k.dim())
    }

    fn value(&self, q: &DVector<T>) -> T {
        (q.transpose() * self.k.matrix() * q)[(0, 0)] * real::<T>(0.5) + self.b.dot(q) + self.c
    }

    fn gradient(&self, q: &DVector<T>) -> DVector<T> {
        self.k.matrix() * q + &self.b
    }

    fn hessian(&self, _q: &DVector<T>) -> DMatrix<T> {
        self.k.matrix().clone()
    }

    fn third_contraction(&self, q: &DVector<T>, _g: &DMatrix<T>) -> Option<DVector<T>> {
        Some(DVector::zeros(q.len()))
    }
}

/// One-dimensional V(q) = ½ ω² q² + λ q⁴.
#[derive(Debug, Clone)]
pub struct Quartic1D<T: Real> {
    pub omega2: T,
    pub lambda: T,
}

impl<T: Real> Quartic1D<T> {
    pub fn new(omega2: T, lambda: T) -> Self {
        Self { omega2, lambda }
    }
}

impl<T: Real> Potential<T> for Quartic1D<T> {
    fn dim(&self) -> Option<usize> {
        Some(1)
    }

    fn value(&self, q: &DVector<T>) -> T {
        let x = q[0];
        real::<T>(0.5) * self.omega2 * x * x + self.lambda * x * x * x * x
    }

    fn gradient(&self, q: &DVector<T>) -> DVector<T> {
        let x = q[0];
        DVector::from_element(1, self.omega2 * x + real::<T>(4.0) * self.lambda * x * x * x)
    }

    fn hessian(&self, q: &DVector<T>) -> DMatrix<T> {
        let x = q[0];
        DMatrix::from_element(1, 1, self.omega2 + real::<T>(12.0) * self.lambda * x * x)
    }

    fn third_contraction(&self, q: &DVector<T>, g: &DMatrix<T>) -> Option<DVector<T>> {
        // V'''(q) = 24 λ q
        Some(DVector::from_element(1, real::<T>(24.0) * self.lambda * q[0] * g[(0, 0)]))
    }
}

/// Rotation-invariant V(q) = a|q|²/2 + λ(|q|²)².
#[derive(Debug, Clone)]
pub struct RadialAnharmonic<T: Real> {
    pub a: T,
    pub lambda: T,
}

impl<T: Real> RadialAnharmonic<T> {
    pub fn new(a: T, lambda: T) -> Self {
        Self { a, lambda }
    }
}

impl<T: Real> Potential<T> for RadialAnharmonic<T> {
    fn value(&self, q: &DVector<T>) -> T {
        let r2 = q.norm_squared();
        real::<T>(0.5) * self.a * r2 + self.lambda * r2 * r2
    }

    fn gradient(&self, q: &DVector<T>) -> DVector<T> {
        let r2 = q.norm_squared();
        q * (self.a + real::<T>(4.0) * self.lambda * r2)
    }

    fn hessian(&self, q: &DVector<T>) -> DMatrix<T> {
        let d = q.len();
        let r2 = q.norm_squared();
        let four_lambda = real::<T>(4.0) * self.lambda;
        let mut h = DMatrix::identity(d, d) * (self.a + four_lambda * r2);
        h += (q * q.transpose()) * (real::<T>(2.0) * four_lambda);
        h
    }

    fn third_contraction(&self, q: &DVector<T>, g: &DMatrix<T>) -> Option<DVector<T>> {
        // ∂_i (∇²V)_{jk} = 8λ (q_i δ_{jk} + δ_{ij} q_k + q_j δ_{ik})
        let eight_lambda = real::<T>(8.0) * self.lambda;
        let tr_g = g.trace();
        let gq = g * q;
        Some((q * tr_g + gq * real::<T>(2.0)) * eight_lambda)
    }
}

/// A potential assembled from user-supplied closures; the third-derivative
/// contraction falls back to finite differences.
pub struct CallablePotential<T, FV, FG, FH>
where
    T: Real,
    FV: Fn(&DVector<T>) -> T,
    FG: Fn(&DVector<T>) -> DVector<T>,
    FH: Fn(&DVector<T>) -> DMatrix<T>,
{
    pub value: FV,
    pub gradient: FG,
    pub hessian: FH,
    pub dim: Option<usize>,
    _marker: std::marker::PhantomData<T>,
}

impl<T, FV, FG, FH> CallablePotential<T, FV, FG, FH>
where
    T: Real,
    FV: Fn(&DVector<T>) -> T,
    FG: Fn(&DVector<T>) -> DVector<T>,
    FH: Fn(&DVector<T>) -> DMatrix<T>,
{
    pub fn new(value: FV, gradient: FG, hessian: FH, dim: Option<usize>) -> Self {
        Self { value, gradient, hessian, dim, _marker: std::marker::PhantomData }
    }
}

impl<T, FV, FG, FH> Potential<T> for CallablePotential<T, FV, FG, FH>
where
    T: Real,
    FV: Fn(&DVector<T>) -> T,
    FG: Fn(&DVector<T>) -> DVector<T>,
    FH: Fn(&DVector<T>) -> DMatrix<T>,
{
    fn dim(&self) -> Option<usize> {
        self.dim
    }

    fn value(&self, q: &DVector<T>) -> T {
        (self.value)(q)
    }

    fn gradient(&self, q: &DVector<T>) -> DVector<T> {
        (self.gradient)(q)
    }

    fn hessian(&self, q: &DVector<T>) -> DMatrix<T> {
        (self.hessian)(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient<P: Potential<f64>>(v: &P, q: &DVector<f64>) -> DVector<f64> {
        let h = 1e-6;
        DVector::from_fn(q.len(), |i, _| {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[i] += h;
            qm[i] -= h;
            (v.value(&qp) - v.value(&qm)) / (2.0 * h)
        })
    }

    fn fd_hessian<P: Potential<f64>>(v: &P, q: &DVector<f64>) -> DMatrix<f64> {
        let h = 1e-6;
        DMatrix::from_fn(q.len(), q.len(), |i, j| {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[j] += h;
            qm[j] -= h;
            (v.gradient(&qp)[i] - v.gradient(&qm)[i]) / (2.0 * h)
        })
    }

    #[test]
    fn builtin_derivatives_match_finite_differences() {
        let q1 = DVector::from_vec(vec![0.7]);
        let q3 = DVector::from_vec(vec![0.4, -0.9, 0.3]);

        let quad = Quadratic::new(
            SymMatrix::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.5, -0.2, 0.0, -0.2, 1.0])).unwrap(),
            DVector::from_vec(vec![0.1, 0.0, -0.4]),
            0.7,
        )
        .unwrap();
        let quartic = Quartic1D::new(1.0, 0.1);
        let radial = RadialAnharmonic::new(1.0, 0.1);

        assert!((quad.gradient(&q3) - fd_gradient(&quad, &q3)).norm() < 1e-6);
        assert!((quad.hessian(&q3) - fd_hessian(&quad, &q3)).norm() < 1e-6);
        assert!((quartic.gradient(&q1) - fd_gradient(&quartic, &q1)).norm() < 1e-6);
        assert!((quartic.hessian(&q1) - fd_hessian(&quartic, &q1)).norm() < 1e-6);
        assert!((radial.gradient(&q3) - fd_gradient(&radial, &q3)).norm() < 1e-6);
        assert!((radial.hessian(&q3) - fd_hessian(&radial, &q3)).norm() < 1e-6);
    }

    #[test]
    fn third_contraction_matches_fd_fallback() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, 0.8, -0.1, 0.0, -0.1, 1.3]);
        let q = DVector::from_vec(vec![0.5, -0.2, 0.9]);
        let radial = RadialAnharmonic::new(1.0, 0.1);

        let exact = radial.third_contraction(&q, &g).unwrap();
        // route the same model through the FD path via a closure wrapper
        let wrapped = CallablePotential::new(
            |x: &DVector<f64>| radial.value(x),
            |x: &DVector<f64>| radial.gradient(x),
            |x: &DVector<f64>| radial.hessian(x),
            Some(3),
        );
        let fd = third_contraction_or_fd(&wrapped, &q, &g);
        assert!((exact - fd).norm() < 1e-5);

        let quartic = Quartic1D::new(1.0, 0.1);
        let q1 = DVector::from_vec(vec![0.7]);
        let g1 = DMatrix::from_element(1, 1, 1.4);
        let exact = quartic.third_contraction(&q1, &g1).unwrap();
        let wrapped = CallablePotential::new(
            |x: &DVector<f64>| quartic.value(x),
            |x: &DVector<f64>| quartic.gradient(x),
            |x: &DVector<f64>| quartic.hessian(x),
            Some(1),
        );
        let fd = third_contraction_or_fd(&wrapped, &q1, &g1);
        assert!((exact - fd).norm() < 1e-5);
    }
}
