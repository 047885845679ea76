//! Acceptance suite: every algebraic and conservation identity the library
//! claims, checked numerically at its pinned tolerance. One pass/fail line is
//! printed per criterion; run with `cargo test --test acceptance -- --nocapture`
//! to see them.

use std::time::Instant;

use nalgebra::{Complex, DMatrix, DVector};

use gwp_core::cmat::{guarded_inverse, im_part, re_part};
use gwp_core::dynamics::{
    angular_momentum, extended_hamiltonian, hagedorn_residual, hagedorn_rhs, heller_residual,
    heller_rhs, project_state, reduced_angular_momentum, reduced_extended_hamiltonian,
    rotate_hagedorn, DetBranch, GridSpec, HagedornState, HellerState, Potential, Quadratic,
    Quartic1D, RadialAnharmonic, SimParams,
};
use gwp_core::integrate::{
    convergence_slope, drift_report, integrate_hagedorn, integrate_heller, StateSample, Scheme,
    StepSpec,
};
use gwp_core::reduction::{
    is_on_level_j, momentum_differential, momentum_map, o2d_act, reduced_form_check, PhasePoint,
    PhaseTangent,
};
use gwp_core::sample;
use gwp_core::spgroup::{is_symplectic, ComplexQP};

const SEED: u64 = 0x5eed_2024;

fn report(criterion: u32, name: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion} ({name}): {verdict} — {detail}");
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

fn phase_blocks(s: &HagedornState<f64>) -> PhasePoint<f64> {
    PhasePoint::new(
        re_part(s.qp.q()),
        im_part(s.qp.q()),
        re_part(s.qp.p()),
        im_part(s.qp.p()),
    )
    .unwrap()
}

#[test]
fn criterion_01_reduced_symplectic_form() {
    let start = Instant::now();
    let mut rng = sample::rng(SEED ^ 1);
    let mut worst = 0.0f64;
    let mut worst_vertical = 0.0f64;
    for d in [1usize, 2, 3] {
        for _ in 0..1000 {
            let z = sample::level_point::<f64>(&mut rng, d);
            let v = sample::level_tangent(&mut rng, &z);
            let w = sample::level_tangent(&mut rng, &z);
            let (lhs, rhs) = reduced_form_check(&z, &v, &w).unwrap();
            worst = worst.max((lhs - rhs).abs());

            let vert = sample::vertical_tangent(&mut rng, &z);
            let (lhs, rhs) = reduced_form_check(&z, &vert, &w).unwrap();
            worst_vertical = worst_vertical.max(lhs.abs()).max(rhs.abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        "reduced symplectic form is -1/2 the Siegel form",
        worst <= 1e-9 && worst_vertical <= 1e-11 && elapsed < 10.0,
        format!("worst |Ω_Z + ½Ω_Σ∘Tπ| = {worst:.3e} (tol 1e-9), vertical kernel {worst_vertical:.3e} (tol 1e-11), runtime {elapsed:.2} s (< 10 s)"),
    );
}

#[test]
fn criterion_02_level_set_is_the_symplectic_group() {
    let mut rng = sample::rng(SEED ^ 2);
    let mut worst = 0.0f64;
    let mut flag_disagreements = 0usize;
    let mut wrongly_accepted = 0usize;
    for d in [1usize, 2, 3] {
        for _ in 0..334 {
            let z = sample::level_point::<f64>(&mut rng, d);
            let level = is_on_level_j(&z, 1e-9);
            let group = is_symplectic(&z.to_matrix(), 1e-9);
            worst = worst.max(level.residual).max(group.residual);
            if level.pass != group.pass || !level.pass {
                flag_disagreements += 1;
            }

            // push the same point past the 1e-4 residual scale
            let mut zm = z.to_matrix();
            let mut noise = sample::matrix::<f64>(&mut rng, 2 * d, 2 * d, 1.0);
            noise *= 1e-2 / noise.norm();
            zm += &noise;
            let mut perturbed = PhasePoint::from_matrix(&zm).unwrap();
            let mut guard = 0;
            while is_on_level_j(&perturbed, 1e-8).residual <= 1e-4 && guard < 64 {
                zm += &noise;
                perturbed = PhasePoint::from_matrix(&zm).unwrap();
                guard += 1;
            }
            if is_on_level_j(&perturbed, 1e-8).pass
                || is_symplectic(&perturbed.to_matrix(), 1e-8).pass
            {
                wrongly_accepted += 1;
            }
        }
    }
    report(
        2,
        "momentum level set = Sp(2d,R)",
        worst <= 1e-9 && flag_disagreements == 0 && wrongly_accepted == 0,
        format!("worst fixture residual {worst:.3e} (tol 1e-9), flag disagreements {flag_disagreements}, wrongly accepted perturbations {wrongly_accepted}"),
    );
}

#[test]
fn criterion_03_equivariance_and_noether() {
    let mut rng = sample::rng(SEED ^ 3);

    let mut worst_equiv = 0.0f64;
    for _ in 0..500 {
        let d = 1 + (rng_usize(&mut rng) % 3);
        let z = sample::phase_point::<f64>(&mut rng, d, 1.0);
        let r = sample::orthogonal::<f64>(&mut rng, 2 * d);
        let lhs = momentum_map(&o2d_act(&z, &r).unwrap()).assemble();
        let rhs = r.transpose() * momentum_map(&z).assemble() * &r;
        worst_equiv = worst_equiv.max((lhs - rhs).norm());
    }

    let mut worst_inst = 0.0f64;
    let prm = SimParams::new(1.0, 1.0, true);
    for d in [1usize, 2, 3] {
        let v: Box<dyn Potential<f64>> = if d == 1 {
            Box::new(Quartic1D::new(1.0, 0.1))
        } else {
            Box::new(RadialAnharmonic::new(1.0, 0.1))
        };
        for _ in 0..170 {
            let s = sample::hagedorn_state::<f64>(&mut rng, d);
            let field = hagedorn_rhs(&s, v.as_ref(), &prm);
            let z = phase_blocks(&s);
            let zdot = PhaseTangent::new(
                re_part(&field.dq_mat),
                im_part(&field.dq_mat),
                re_part(&field.dp_mat),
                im_part(&field.dp_mat),
            )
            .unwrap();
            worst_inst = worst_inst.max(momentum_differential(&z, &zdot).norm());
        }
    }

    // harmonic conservation run
    let v = Quadratic::isotropic(1, 1.0);
    let mut s = HagedornState::<f64>::coherent(1);
    s.q = DVector::from_vec(vec![1.0]);
    let spec = StepSpec::new(1e-3, 10.0, Scheme::Rk4, 10).unwrap();
    let rec = integrate_hagedorn(s, &v, &SimParams::default(), &spec).unwrap();
    let worst_run = rec
        .observables
        .iter()
        .map(|o| o.momentum_residual.unwrap())
        .fold(0.0f64, f64::max);

    report(
        3,
        "momentum map equivariance and Noether conservation",
        worst_equiv <= 1e-12 && worst_inst <= 1e-10 && worst_run <= 1e-9,
        format!("equivariance {worst_equiv:.3e} (tol 1e-12), instantaneous dM/dt {worst_inst:.3e} (tol 1e-10), run max ‖M−J‖ {worst_run:.3e} (tol 1e-9)"),
    );
}

fn rng_usize(rng: &mut rand_chacha::ChaCha8Rng) -> usize {
    sample::uniform::<f64>(rng, 0.0, 1e6) as usize
}

#[test]
fn criterion_04_quadratic_exactness() {
    let harmonic = Quadratic::isotropic(1, 1.0);
    let free = Quadratic::free(1);
    let xs: Vec<DVector<f64>> = (0..101)
        .map(|k| DVector::from_vec(vec![-5.0 + 0.1 * k as f64]))
        .collect();
    let mut worst = 0.0f64;
    let mut worst_flag_gap = 0.0f64;

    for v in [&harmonic, &free] {
        for corrected in [false, true] {
            let prm = SimParams::new(1.0, 1.0, corrected);
            let spec = StepSpec::new(1e-3, 1.0, Scheme::Rk4, 1000).unwrap();

            // lifted formulation
            let mut s0 = HagedornState::<f64>::coherent(1);
            s0.q = DVector::from_vec(vec![0.4]);
            s0.p = DVector::from_vec(vec![0.3]);
            // corrected and plain right-hand sides must coincide for quadratic V
            let plain = hagedorn_rhs(&s0, v, &SimParams::new(1.0, 1.0, false));
            let corr = hagedorn_rhs(&s0, v, &SimParams::new(1.0, 1.0, true));
            worst_flag_gap = worst_flag_gap.max((&plain.dp - &corr.dp).norm());

            let rec = integrate_hagedorn(s0, v, &prm, &spec).unwrap();
            let theta = rec.observables.last().unwrap().arg_det_q.unwrap();
            let s = match rec.final_state().unwrap() {
                StateSample::Hagedorn(s) => s.clone(),
                _ => unreachable!(),
            };
            let ds = hagedorn_rhs(&s, v, &prm);
            for x in &xs {
                let r = hagedorn_residual(&s, &ds, v, x, &prm, theta).unwrap();
                let psi = gwp_core::dynamics::hagedorn_wavefunction(&s, x, &prm, theta).unwrap();
                worst = worst.max(r.norm() / psi.norm());
            }

            // reduced formulation
            let mut h0 = HellerState::<f64>::coherent(1);
            h0.q = DVector::from_vec(vec![0.4]);
            h0.p = DVector::from_vec(vec![0.3]);
            let rec = integrate_heller(h0, v, &prm, &spec).unwrap();
            let h = match rec.final_state().unwrap() {
                StateSample::Heller(s) => s.clone(),
                _ => unreachable!(),
            };
            let dh = heller_rhs(&h, v, &prm);
            for x in &xs {
                let r = heller_residual(&h, &dh, v, x, &prm);
                let psi = gwp_core::dynamics::heller_wavefunction(&h, x, &prm);
                worst = worst.max(r.norm() / psi.norm());
            }
        }
    }
    report(
        4,
        "quadratic potentials solved exactly",
        worst <= 1e-9 && worst_flag_gap <= 1e-14,
        format!("worst relative Schrödinger residual {worst:.3e} over 101 grid points (tol 1e-9); corrected-flag gap {worst_flag_gap:.3e}"),
    );
}

#[test]
fn criterion_05_two_formulation_commutation() {
    let harmonic = Quadratic::isotropic(1, 1.0);
    let quartic = Quartic1D::new(1.0, 0.1);
    let prm = SimParams::new(1.0, 1.0, false);
    let spec = StepSpec::new(1e-3, 10.0, Scheme::Rk4, 10).unwrap();
    let mut detail = String::new();
    let mut pass = true;

    for (name, v) in [("harmonic", &harmonic as &dyn Potential<f64>), ("quartic", &quartic)] {
        let start = Instant::now();
        let mut s0 = HagedornState::<f64>::coherent(1);
        s0.q = DVector::from_vec(vec![1.0]);
        let branch0 = DetBranch::from_q(s0.qp.q()).unwrap();
        let h0 = project_state(&s0, &prm, &branch0).unwrap();

        let lifted = integrate_hagedorn(s0, v, &prm, &spec).unwrap();
        let reduced = integrate_heller(h0, v, &prm, &spec).unwrap();
        assert_eq!(lifted.len(), reduced.len());

        let mut gap_point = 0.0f64;
        let mut gap_phase = 0.0f64;
        for k in 0..lifted.len() {
            let (s, theta) = match (&lifted.states[k], lifted.observables[k].arg_det_q) {
                (StateSample::Hagedorn(s), Some(theta)) => (s, theta),
                _ => unreachable!(),
            };
            let h = match &reduced.states[k] {
                StateSample::Heller(h) => h,
                _ => unreachable!(),
            };
            let q_inv = guarded_inverse(s.qp.q()).unwrap();
            let projected = s.qp.p() * q_inv;
            gap_point = gap_point.max((projected - h.x.to_complex()).norm());
            gap_phase = gap_phase.max((h.phase - (s.action - 0.5 * prm.hbar * theta)).abs());
        }
        let elapsed = start.elapsed().as_secs_f64();
        pass &= gap_point <= 1e-6 && gap_phase <= 1e-6 && elapsed < 5.0;
        detail.push_str(&format!(
            "[{name}: point gap {gap_point:.3e}, phase gap {gap_phase:.3e} (tol 1e-6), {elapsed:.2} s] "
        ));
    }
    report(5, "lifted and reduced runs commute with projection", pass, detail);
}

#[test]
fn criterion_06_section_4_4_identities() {
    let mut rng = sample::rng(SEED ^ 6);
    let prm = SimParams::new(1.0, 1.0, false);

    let mut worst_gram = 0.0f64;
    let mut worst_comm = 0.0f64;
    for d in [1usize, 2, 3] {
        for _ in 0..334 {
            let qp = sample::onshell_qp::<f64>(&mut rng, d);
            let x = gwp_core::siegel::SiegelPoint::from_qp(qp.q(), qp.p()).unwrap();
            let b_inv = x.b_inverse();
            worst_gram = worst_gram.max(
                (qp.q() * qp.q().adjoint() - gwp_core::cmat::from_real(&b_inv)).norm(),
            );
            let lhs = qp.p() * qp.q().adjoint() - qp.q() * qp.p().adjoint();
            let bracket = x.a() * &b_inv - &b_inv * x.a();
            let two_i = gwp_core::cmat::from_real(&DMatrix::<f64>::identity(d, d))
                * Complex::new(0.0, 2.0);
            worst_comm = worst_comm.max((lhs - (gwp_core::cmat::from_real(&bracket) + two_i)).norm());
        }
    }

    let mut worst_proj = 0.0f64;
    for d in [2usize, 3] {
        for _ in 0..250 {
            let s = sample::hagedorn_state::<f64>(&mut rng, d);
            let branch = DetBranch::from_q(s.qp.q()).unwrap();
            let h = project_state(&s, &prm, &branch).unwrap();
            worst_proj = worst_proj
                .max((angular_momentum(&s, &prm) - reduced_angular_momentum(&h, &prm)).norm());
        }
    }

    let mut worst_equiv = 0.0f64;
    for _ in 0..500 {
        let s = sample::hagedorn_state::<f64>(&mut rng, 3);
        let r = sample::orthogonal::<f64>(&mut rng, 3);
        let lhs = angular_momentum(&rotate_hagedorn(&s, &r), &prm);
        let rhs = &r * angular_momentum(&s, &prm) * r.transpose();
        worst_equiv = worst_equiv.max((lhs - rhs).norm());
    }

    report(
        6,
        "on-shell algebraic identities",
        worst_gram <= 1e-9 && worst_comm <= 1e-9 && worst_proj <= 1e-10 && worst_equiv <= 1e-12,
        format!("QQ*−B⁻¹ {worst_gram:.3e} (1e-9), PQ*−QP*−[A,B⁻¹]−2iI {worst_comm:.3e} (1e-9), J−J̄∘Π {worst_proj:.3e} (1e-10), SO(3) equivariance {worst_equiv:.3e} (1e-12)"),
    );
}

#[test]
fn criterion_07_angular_momentum_conservation() {
    let v = RadialAnharmonic::new(1.0, 0.1);
    let prm = SimParams::new(1.0, 1.0, true);
    let s0 = HagedornState::new(
        DVector::from_vec(vec![1.0, 0.0, 0.0]),
        DVector::from_vec(vec![0.0, 1.0, 0.0]),
        ComplexQP::coherent(3),
        0.0,
    )
    .unwrap();
    let spec = StepSpec::new(1e-3, 10.0, Scheme::Rk4, 10).unwrap();
    let rec = integrate_hagedorn(s0, &v, &prm, &spec).unwrap();
    assert!(rec.termination.is_none());
    let j0 = rec.observables[0].angular.clone();
    let worst = rec
        .observables
        .iter()
        .map(|o| (&o.angular - &j0).norm())
        .fold(0.0f64, f64::max);
    report(
        7,
        "semiclassical angular momentum conserved",
        worst <= 1e-8,
        format!("max ‖J(t) − J(0)‖_F = {worst:.3e} over t ∈ [0, 10] (tol 1e-8)"),
    );
}

#[test]
fn criterion_08_hamiltonian_reduction_identity() {
    let mut rng = sample::rng(SEED ^ 8);
    let prm = SimParams::new(1.0, 1.0, true);
    let quartic = Quartic1D::new(1.0, 0.1);
    let mut worst = 0.0f64;
    for d in [1usize, 2, 3] {
        for _ in 0..334 {
            let s = sample::hagedorn_state::<f64>(&mut rng, d);
            let branch = DetBranch::from_q(s.qp.q()).unwrap();
            let h = project_state(&s, &prm, &branch).unwrap();

            let k = gwp_core::matlin::SymMatrix::new(sample::symmetric(&mut rng, d, 1.0)).unwrap();
            let quad = Quadratic::new(k, sample::vector(&mut rng, d, 1.0), 0.2).unwrap();
            worst = worst.max(
                (extended_hamiltonian(&s, &quad, &prm) - reduced_extended_hamiltonian(&h, &quad, &prm))
                    .abs(),
            );
            if d == 1 {
                worst = worst.max(
                    (extended_hamiltonian(&s, &quartic, &prm)
                        - reduced_extended_hamiltonian(&h, &quartic, &prm))
                    .abs(),
                );
            }
        }
    }
    report(
        8,
        "H equals the reduced Hamiltonian after projection",
        worst <= 1e-10,
        format!("worst |H − H̄∘Π| = {worst:.3e} on-shell (tol 1e-10)"),
    );
}

#[test]
fn criterion_09_expectation_value_remark() {
    let quartic = Quartic1D::new(1.0, 0.1);
    let grid = GridSpec { points_per_dim: 4096, half_width_sigmas: 8.0 };

    let state = |_hbar: f64| -> HellerState<f64> {
        HellerState::new(
            DVector::from_vec(vec![0.3]),
            DVector::from_vec(vec![0.2]),
            gwp_core::siegel::SiegelPoint::from_parts(
                DMatrix::from_element(1, 1, 0.2),
                DMatrix::from_element(1, 1, 1.1),
            )
            .unwrap(),
            0.0,
        )
        .unwrap()
    };

    let hbars = [0.5, 0.25, 0.125];
    let mut gaps = Vec::new();
    for &hbar in &hbars {
        let prm = SimParams::new(1.0, hbar, false);
        let s = state(hbar);
        let quadrature = gwp_core::dynamics::expectation_energy(&s, &quartic, &prm, &grid).unwrap();
        let reduced = reduced_extended_hamiltonian(&s, &quartic, &prm);
        gaps.push((quadrature - reduced).abs());
    }
    let slope = convergence_slope(&hbars, &gaps);

    // quadratic potentials agree exactly (up to quadrature error)
    let harmonic = Quadratic::isotropic(1, 1.0);
    let prm = SimParams::new(1.0, 1.0, false);
    let s = state(1.0);
    let quad_gap = (gwp_core::dynamics::expectation_energy(&s, &harmonic, &prm, &grid).unwrap()
        - reduced_extended_hamiltonian(&s, &harmonic, &prm))
    .abs();

    report(
        9,
        "⟨ψ|Hψ⟩ = H̄ + O(ħ²)",
        (slope - 2.0).abs() <= 0.3 && quad_gap <= 1e-8,
        {
            let gaps_str: Vec<String> = gaps.iter().map(|g| format!("{g:.3e}")).collect();
            format!("log-log slope {slope:.3} (2.0 ± 0.3), gaps {gaps_str:?}, quadratic-case gap {quad_gap:.3e} (tol 1e-8)")
        },
    );
}

#[test]
fn criterion_10_integrator_orders() {
    let v = Quadratic::isotropic(1, 1.0);
    let prm = SimParams::default();
    let dts = [4e-3, 2e-3, 1e-3];

    let mut rk4_errors = Vec::new();
    let mut strang_errors = Vec::new();
    let mut rk4_records = Vec::new();
    for &dt in &dts {
        for (scheme, errors) in [(Scheme::Rk4, &mut rk4_errors), (Scheme::Strang, &mut strang_errors)] {
            let spec = StepSpec::new(dt, 2.0 * std::f64::consts::PI, scheme, 100).unwrap();
            let rec = integrate_hagedorn(HagedornState::coherent(1), &v, &prm, &spec).unwrap();
            let t_f = *rec.times.last().unwrap();
            let s = match rec.final_state().unwrap() {
                StateSample::Hagedorn(s) => s.clone(),
                _ => unreachable!(),
            };
            let oracle = Complex::new(0.0, t_f).exp();
            let err = (s.qp.q()[(0, 0)] - oracle).norm()
                + (s.qp.p()[(0, 0)] - Complex::new(0.0, 1.0) * oracle).norm();
            errors.push(err);
            if scheme == Scheme::Rk4 {
                rk4_records.push(rec);
            }
        }
    }
    let rk4_slope = convergence_slope(&dts, &rk4_errors);
    let strang_slope = convergence_slope(&dts, &strang_errors);

    // drift_report's slope fit over the same rk4 records, on the energy
    // drift of a nonlinear run where the generic O(dt⁴) rate applies
    drop(rk4_records);
    let quartic = Quartic1D::new(1.0, 0.1);
    let prm_hamiltonian = SimParams::new(1.0, 1.0, true);
    let mut drift_records = Vec::new();
    for &dt in &[2e-2, 1e-2, 5e-3] {
        let spec = StepSpec::new(dt, 2.0 * std::f64::consts::PI, Scheme::Rk4, 10).unwrap();
        let mut s = HagedornState::<f64>::coherent(1);
        s.q = DVector::from_vec(vec![1.0]);
        drift_records.push(integrate_hagedorn(s, &quartic, &prm_hamiltonian, &spec).unwrap());
    }
    let drift_slope = drift_report(&drift_records).unwrap().energy_slope.unwrap();

    report(
        10,
        "integrator convergence orders",
        (rk4_slope - 4.0).abs() <= 0.3
            && (strang_slope - 2.0).abs() <= 0.3
            && (drift_slope - 4.0).abs() <= 0.3,
        format!("rk4 oracle slope {rk4_slope:.3} (4.0 ± 0.3), strang oracle slope {strang_slope:.3} (2.0 ± 0.3), rk4 quartic energy-drift slope {drift_slope:.3} (4.0 ± 0.3)"),
    );
}

#[test]
fn criterion_11_hbar_scaling_surrogate() {
    // The rigorous O(t√ħ) bound needs an exact propagator; the check here is
    // the monotone decrease of the windowed Schrödinger residual as ħ → 0.
    let v = Quartic1D::new(1.0, 0.1);
    let hbars = [1.0, 0.1, 0.01];
    let mut maxima = Vec::new();
    for &hbar in &hbars {
        let prm = SimParams::new(1.0, hbar, false);
        let mut s0 = HellerState::<f64>::coherent(1);
        s0.q = DVector::from_vec(vec![1.0]);
        let spec = StepSpec::new(1e-3, 1.0, Scheme::Rk4, 1000).unwrap();
        let rec = integrate_heller(s0, &v, &prm, &spec).unwrap();
        let h = match rec.final_state().unwrap() {
            StateSample::Heller(s) => s.clone(),
            _ => unreachable!(),
        };
        let dh = heller_rhs(&h, &v, &prm);
        let sigma = (hbar / (2.0 * h.x.b_spd().min_eigenvalue())).sqrt();
        let mut worst = 0.0f64;
        for k in 0..=200 {
            let x = DVector::from_vec(vec![h.q[0] - 6.0 * sigma + 0.06 * sigma * k as f64]);
            worst = worst.max(heller_residual(&h, &dh, &v, &x, &prm).norm());
        }
        maxima.push(worst);
    }
    let monotone = maxima[0] > maxima[1] && maxima[1] > maxima[2];
    report(
        11,
        "residual decreases monotonically as ħ → 0",
        monotone,
        {
            let maxima_str: Vec<String> = maxima.iter().map(|m| format!("{m:.3e}")).collect();
            format!("windowed max |residual| at ħ = 1, 0.1, 0.01: {maxima_str:?} (monotone decrease asserted, no rate claimed)")
        },
    );
}
