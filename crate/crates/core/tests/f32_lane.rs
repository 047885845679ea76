//! The single-precision instantiation of the kernels: same algebra, looser
//! (epsilon-scaled) tolerances.

use nalgebra::{Complex, DMatrix, DVector};

use gwp_core::dynamics::{heller_rhs, HellerState, Quadratic, SimParams};
use gwp_core::integrate::rk4_step_heller;
use gwp_core::matlin::{spd_power, SpdMatrix, SpdPower, SymMatrix};
use gwp_core::siegel::{mobius_act, section, SiegelPoint};
use gwp_core::spgroup::{is_symplectic, project_to_siegel, to_complex, BlockSymplectic};

#[test]
fn kernels_work_in_single_precision() {
    let a = SymMatrix::<f32>::new(DMatrix::from_row_slice(2, 2, &[0.3, -0.1, -0.1, 0.8])).unwrap();
    let b = SpdMatrix::<f32>::new(DMatrix::from_row_slice(2, 2, &[1.5, 0.2, 0.2, 1.1])).unwrap();

    let half = spd_power(&b, SpdPower::Sqrt);
    assert!((half.matrix() * half.matrix() - b.matrix()).norm() < 1e-5);

    let x = SiegelPoint::new(a, b).unwrap();
    let s = section(&x);
    assert!(is_symplectic(&s, 1e-4).pass);

    let reached = mobius_act(&s, &SiegelPoint::<f32>::base_point(2)).unwrap();
    assert!(reached.distance(&x) < 1e-4);

    let block = BlockSymplectic::from_matrix(&s).unwrap();
    let back = project_to_siegel(&block).unwrap();
    assert!(back.distance(&x) < 1e-4);
    assert!(to_complex(&block).on_shell_residual() < 1e-4);
}

#[test]
fn reduced_flow_steps_in_single_precision() {
    let prm = SimParams::<f32>::new(1.0, 1.0, false);
    let v = Quadratic::<f32>::isotropic(1, 1.0);
    let s = HellerState::<f32>::coherent(1);

    // coherent fixed point up to single-precision roundoff
    let ds = heller_rhs(&s, &v, &prm);
    assert!(ds.da.norm() < 1e-6 && ds.db.norm() < 1e-6);
    assert!((ds.dphase + 0.5).abs() < 1e-6);

    let mut state = HellerState::<f32>::new(
        DVector::from_vec(vec![0.5]),
        DVector::from_vec(vec![0.0]),
        SiegelPoint::base_point(1),
        0.0,
    )
    .unwrap();
    for _ in 0..100 {
        state = rk4_step_heller(&state, &v, &prm, 1e-2).unwrap();
    }
    // q(t) = 0.5 cos t at t = 1
    assert!((state.q[0] - 0.5 * 1.0f32.cos()).abs() < 1e-4);
    assert!((state.x.b()[(0, 0)] - 1.0).abs() < 1e-4);

    // complex arithmetic in f32
    let c = DMatrix::from_element(1, 1, Complex::new(0.0f32, 1.0f32));
    let r = gwp_core::siegel::riccati_rhs(&c, &DMatrix::from_element(1, 1, 1.0f32), 1.0f32);
    assert!(r[(0, 0)].norm() < 1e-6);
}
