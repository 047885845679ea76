//! Property tests over free inputs: linearity and antisymmetry of the
//! canonical forms, the momentum-map pairing identity, eigendecomposition
//! round trips, and the SPD power laws.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use gwp_core::dynamics::diamond;
use gwp_core::matlin::{spd_power, sym_eig, SpdMatrix, SpdPower, SymMatrix};
use gwp_core::reduction::{momentum_map, omega_eval, pairing_identity, theta_eval, PhasePoint};

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, n)
}

fn square(d: usize, v: &[f64], offset: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| v[offset + i * d + j])
}

fn phase_point(d: usize, v: &[f64]) -> PhasePoint<f64> {
    let n = d * d;
    PhasePoint::new(
        square(d, v, 0),
        square(d, v, n),
        square(d, v, 2 * n),
        square(d, v, 3 * n),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn theta_is_linear_in_the_tangent(d in 1usize..4, raw in entries(4 * 16 * 3), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let n = 4 * d * d;
        let z = phase_point(d, &raw[..n]);
        let v = phase_point(d, &raw[n..2 * n]);
        let w = phase_point(d, &raw[2 * n..3 * n]);
        let combo = PhasePoint::from_matrix(&(v.to_matrix() * a + w.to_matrix() * b)).unwrap();
        let lhs = theta_eval(&z, &combo);
        let rhs = a * theta_eval(&z, &v) + b * theta_eval(&z, &w);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn omega_is_antisymmetric(d in 1usize..4, raw in entries(4 * 16 * 3)) {
        let n = 4 * d * d;
        let z = phase_point(d, &raw[..n]);
        let v = phase_point(d, &raw[n..2 * n]);
        let w = phase_point(d, &raw[2 * n..3 * n]);
        prop_assert!((omega_eval(&z, &v, &w) + omega_eval(&z, &w, &v)).abs() <= 1e-10);
        prop_assert!(omega_eval(&z, &v, &v).abs() <= 1e-10);
    }

    #[test]
    fn momentum_value_is_skew_and_quadratic(d in 1usize..4, raw in entries(4 * 16), c in -2.0f64..2.0) {
        let n = 4 * d * d;
        let z = phase_point(d, &raw[..n]);
        let m = momentum_map(&z).assemble();
        prop_assert!((&m + m.transpose()).norm() <= 1e-12);

        let scaled = PhasePoint::from_matrix(&(z.to_matrix() * c)).unwrap();
        let ms = momentum_map(&scaled).assemble();
        prop_assert!((ms - m * (c * c)).norm() <= 1e-9);
    }

    #[test]
    fn momentum_pairs_as_theta_of_the_generator(d in 1usize..4, raw in entries(4 * 16), skew_raw in entries(4 * 16)) {
        let n = 4 * d * d;
        let z = phase_point(d, &raw[..n]);
        let g = square(2 * d, &skew_raw[..4 * d * d], 0);
        let xi = (&g - g.transpose()) * 0.5;
        let (lhs, rhs) = pairing_identity(&z, &xi).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn sym_eig_reconstructs(d in 1usize..9, raw in entries(64)) {
        let m = square(d, &raw[..d * d], 0);
        let s = SymMatrix::new((&m + m.transpose()) * 0.5).unwrap();
        let e = sym_eig(&s);
        let norm = s.matrix().norm().max(1e-12);
        prop_assert!((e.reconstruct() - s.matrix()).norm() <= 1e-11 * norm.max(1.0));
        let d_id = DMatrix::<f64>::identity(d, d);
        prop_assert!((e.eigenvectors.transpose() * &e.eigenvectors - d_id).norm() <= 1e-12);
    }

    #[test]
    fn spd_power_laws_hold(d in 1usize..9, raw in entries(64)) {
        let g = square(d, &raw[..d * d], 0);
        let b = SpdMatrix::new(&g * g.transpose() + DMatrix::<f64>::identity(d, d) * 0.05).unwrap();
        let half = spd_power(&b, SpdPower::Sqrt);
        prop_assert!((half.matrix() * half.matrix() - b.matrix()).norm() <= 1e-10 * b.matrix().norm().max(1.0));

        let inv_half = spd_power(&b, SpdPower::InvSqrt);
        let id = DMatrix::<f64>::identity(d, d);
        prop_assert!((half.matrix() * inv_half.matrix() - &id).norm() <= 1e-10);

        let inv = spd_power(&b, SpdPower::Inverse);
        prop_assert!((inv.matrix() * b.matrix() - &id).norm() <= 1e-9);
    }

    #[test]
    fn diamond_is_skew_and_bilinear(d in 1usize..5, raw in entries(15), c in -2.0f64..2.0) {
        let q = DVector::from_fn(d, |i, _| raw[i]);
        let p = DVector::from_fn(d, |i, _| raw[d + i]);
        let m = diamond(&q, &p);
        prop_assert!((&m + m.transpose()).norm() <= 1e-12);
        let scaled = diamond(&(&q * c), &p);
        prop_assert!((scaled - &m * c).norm() <= 1e-10);
    }
}
