//! Seeded property batteries over the whole library: the geometry of Σ_d and
//! Sp(2d,ℝ), the momentum-map reduction, and the dynamics identities. Each
//! battery reports its worst-case residual against a pinned tolerance; the
//! CLI `check` subcommand and the acceptance suite both run through here.

use nalgebra::{Complex, DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::cmat::{from_real, im_part, re_part};
use crate::dynamics::{
    self, angular_momentum, extended_hamiltonian, hagedorn_rhs, heller_rhs, project_state,
    reduced_angular_momentum, reduced_extended_hamiltonian, rotate_hagedorn, rotate_heller,
    DetBranch, HagedornDeriv, HagedornState, HellerDeriv, HellerState, Potential, Quadratic,
    Quartic1D, RadialAnharmonic, SimParams,
};
use crate::matlin::SymMatrix;
use crate::reduction::{
    is_on_level_j, momentum_differential, momentum_map, o2d_act, omega_eval,
    pairing_identity, projection_differential, reduced_form_check, theta_eval, PhasePoint,
    PhaseTangent,
};
use crate::sample;
use crate::siegel::{mobius_act, section, siegel_form, siegel_metric, SiegelPoint, SiegelTangent};
use crate::spgroup::{
    embed_unitary, is_symplectic, iwasawa, project_to_siegel, BlockSymplectic,
};

/// Verification suites exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Reduction,
    Dynamics,
    All,
}

/// Outcome of one property battery.
#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub suite: &'static str,
    pub name: &'static str,
    /// Largest dimension exercised.
    pub dim: usize,
    pub samples: usize,
    pub tol: f64,
    pub worst: f64,
    pub pass: bool,
}

fn result(
    suite: &'static str,
    name: &'static str,
    dim: usize,
    samples: usize,
    tol: f64,
    worst: f64,
) -> PropertyResult {
    PropertyResult { suite, name, dim, samples, tol, worst, pass: worst <= tol }
}

fn max_dim(dims: &[usize]) -> usize {
    dims.iter().copied().max().unwrap_or(0)
}

/// Split a per-suite sample budget across dimensions, at least one each.
fn per_dim(samples: usize, dims: &[usize]) -> usize {
    (samples / dims.len().max(1)).max(1)
}

/// Five-point central difference of f at 0; O(h⁴) truncation error.
fn fd5(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

fn anharmonic_for(d: usize) -> Box<dyn Potential<f64>> {
    if d == 1 {
        Box::new(Quartic1D::new(1.0, 0.1))
    } else {
        Box::new(RadialAnharmonic::new(1.0, 0.1))
    }
}

fn random_quadratic(rng: &mut ChaCha8Rng, d: usize) -> Quadratic<f64> {
    let k = SymMatrix::new(sample::symmetric(rng, d, 1.0)).expect("symmetrized");
    Quadratic::new(k, sample::vector(rng, d, 1.0), sample::uniform(rng, -1.0, 1.0))
        .expect("matching dims")
}

// ---------------------------------------------------------------------------
// geometry
// ---------------------------------------------------------------------------

pub fn geometry_suite(seed: u64, samples: usize, dims: &[usize]) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    let n = per_dim(samples, dims);

    // Möbius group action law: Ψ(S₁S₂, X) = Ψ(S₁, Ψ(S₂, X))
    {
        let mut rng = sample::rng(seed ^ 0x47_01);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s1 = sample::symplectic::<f64>(&mut rng, d);
                let s2 = sample::symplectic::<f64>(&mut rng, d);
                let x = sample::siegel_point(&mut rng, d);
                let joint = mobius_act(&(&s1 * &s2), &x).unwrap();
                let nested = mobius_act(&s1, &mobius_act(&s2, &x).unwrap()).unwrap();
                worst = worst.max(joint.distance(&nested));
            }
        }
        out.push(result("geometry", "mobius_group_action_law", max_dim(dims), n * dims.len(), 1e-9, worst));
    }

    // transitivity through the section: Ψ(section(X), iI) = X
    {
        let mut rng = sample::rng(seed ^ 0x47_02);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let x = sample::siegel_point(&mut rng, d);
                let reached = mobius_act(&section(&x), &SiegelPoint::base_point(d)).unwrap();
                worst = worst.max(reached.distance(&x));
            }
        }
        out.push(result("geometry", "section_transitivity", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // isotropy: embedded unitaries fix the base point
    {
        let mut rng = sample::rng(seed ^ 0x47_03);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let u = sample::unitary_pair::<f64>(&mut rng, d);
                let moved = mobius_act(&embed_unitary(&u), &SiegelPoint::base_point(d)).unwrap();
                worst = worst.max(moved.distance(&SiegelPoint::base_point(d)));
            }
        }
        out.push(result("geometry", "isotropy_fixes_base_point", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // Iwasawa factors reassemble the matrix
    {
        let mut rng = sample::rng(seed ^ 0x47_04);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s = sample::block_symplectic::<f64>(&mut rng, d);
                let iw = iwasawa(&s).unwrap();
                worst = worst.max((iw.reconstruct() - s.to_matrix()).norm());
            }
        }
        out.push(result("geometry", "iwasawa_reconstruction", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // both projection formulas agree: (C+iD)(A+iB)⁻¹ = P + iL⁻²
    {
        let mut rng = sample::rng(seed ^ 0x47_05);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s = sample::block_symplectic::<f64>(&mut rng, d);
                let direct = project_to_siegel(&s).unwrap();
                let iw = iwasawa(&s).unwrap();
                let l_inv2 = crate::matlin::spd_power(&iw.l, crate::matlin::SpdPower::Inverse);
                let via_iwasawa = SiegelPoint::from_parts(
                    iw.psym.matrix().clone(),
                    l_inv2.matrix() * l_inv2.matrix(),
                )
                .unwrap();
                worst = worst.max(direct.distance(&via_iwasawa));
            }
        }
        out.push(result("geometry", "projection_formulas_agree", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // π is constant on fibers and a left inverse of the section
    {
        let mut rng = sample::rng(seed ^ 0x47_06);
        let mut worst_fiber = 0.0f64;
        let mut worst_section = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s = sample::block_symplectic::<f64>(&mut rng, d);
                let u = sample::unitary_pair::<f64>(&mut rng, d);
                let moved = BlockSymplectic::from_matrix(&(s.to_matrix() * embed_unitary(&u))).unwrap();
                worst_fiber = worst_fiber
                    .max(project_to_siegel(&moved).unwrap().distance(&project_to_siegel(&s).unwrap()));

                let x = sample::siegel_point(&mut rng, d);
                let lifted = BlockSymplectic::from_matrix(&section(&x)).unwrap();
                worst_section = worst_section.max(project_to_siegel(&lifted).unwrap().distance(&x));
            }
        }
        out.push(result("geometry", "projection_fiber_constant", max_dim(dims), n * dims.len(), 1e-10, worst_fiber));
        out.push(result("geometry", "projection_section_identity", max_dim(dims), n * dims.len(), 1e-10, worst_section));
    }

    // Ω_Σd: antisymmetry, bilinearity, and Im of the antisymmetrized metric
    {
        let mut rng = sample::rng(seed ^ 0x47_07);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let x = sample::siegel_point::<f64>(&mut rng, d);
                let u = sample::siegel_tangent::<f64>(&mut rng, d, 1.0);
                let v = sample::siegel_tangent::<f64>(&mut rng, d, 1.0);
                let w = sample::siegel_tangent::<f64>(&mut rng, d, 1.0);
                let (a, b) = (0.7, -1.3);

                worst = worst.max((siegel_form(&x, &u, &v) + siegel_form(&x, &v, &u)).abs());

                let combo = SiegelTangent::from_parts(
                    u.da.matrix() * a + w.da.matrix() * b,
                    u.db.matrix() * a + w.db.matrix() * b,
                )
                .unwrap();
                let lin = siegel_form(&x, &combo, &v)
                    - (a * siegel_form(&x, &u, &v) + b * siegel_form(&x, &w, &v));
                worst = worst.max(lin.abs());

                let g_uv = siegel_metric(&x, &u, &v);
                let g_vu = siegel_metric(&x, &v, &u);
                let im_antisym = ((g_uv - g_vu) * Complex::new(0.5, 0.0)).im;
                worst = worst.max((im_antisym - siegel_form(&x, &u, &v)).abs());
            }
        }
        out.push(result("geometry", "siegel_form_and_metric_consistency", max_dim(dims), n * dims.len(), 1e-12, worst));
    }

    // on-shell pair identities: QQ* = ℬ⁻¹ and PQ* − QP* = [𝒜, ℬ⁻¹] + 2iI
    {
        let mut rng = sample::rng(seed ^ 0x47_08);
        let mut worst_gram = 0.0f64;
        let mut worst_comm = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let qp = sample::onshell_qp::<f64>(&mut rng, d);
                let x = SiegelPoint::from_qp(qp.q(), qp.p()).unwrap();
                let b_inv = x.b_inverse();
                worst_gram = worst_gram.max((qp.q() * qp.q().adjoint() - from_real(&b_inv)).norm());

                let lhs = qp.p() * qp.q().adjoint() - qp.q() * qp.p().adjoint();
                let bracket = x.a() * &b_inv - &b_inv * x.a();
                let two_i_id = from_real(&DMatrix::<f64>::identity(d, d)) * Complex::new(0.0, 2.0);
                worst_comm = worst_comm.max((lhs - (from_real(&bracket) + two_i_id)).norm());
            }
        }
        out.push(result("geometry", "onshell_gram_identity", max_dim(dims), n * dims.len(), 1e-9, worst_gram));
        out.push(result("geometry", "onshell_commutator_identity", max_dim(dims), n * dims.len(), 1e-9, worst_comm));
    }

    // exponential fixtures land on the group
    {
        let mut rng = sample::rng(seed ^ 0x47_09);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s = sample::symplectic::<f64>(&mut rng, d);
                worst = worst.max(is_symplectic(&s, 1e-10).residual);
            }
        }
        out.push(result("geometry", "symplectic_fixture_residual", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    out
}

// ---------------------------------------------------------------------------
// reduction
// ---------------------------------------------------------------------------

pub fn reduction_suite(seed: u64, samples: usize, dims: &[usize]) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    let n = per_dim(samples, dims);

    // equivariance M(ZR) = Rᵀ M(Z) R
    {
        let mut rng = sample::rng(seed ^ 0x52_01);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::phase_point::<f64>(&mut rng, d, 1.0);
                let r = sample::orthogonal::<f64>(&mut rng, 2 * d);
                let lhs = momentum_map(&o2d_act(&z, &r).unwrap()).assemble();
                let rhs = r.transpose() * momentum_map(&z).assemble() * &r;
                worst = worst.max((lhs - rhs).norm());
            }
        }
        out.push(result("reduction", "momentum_equivariance", max_dim(dims), n * dims.len(), 1e-12, worst));
    }

    // Φ leaves Θ and Ω invariant
    {
        let mut rng = sample::rng(seed ^ 0x52_02);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::phase_point::<f64>(&mut rng, d, 1.0);
                let v = sample::phase_point::<f64>(&mut rng, d, 1.0);
                let w = sample::phase_point::<f64>(&mut rng, d, 1.0);
                let r = sample::orthogonal::<f64>(&mut rng, 2 * d);
                let zr = o2d_act(&z, &r).unwrap();
                let vr = o2d_act(&v, &r).unwrap();
                let wr = o2d_act(&w, &r).unwrap();
                worst = worst.max((theta_eval(&zr, &vr) - theta_eval(&z, &v)).abs());
                worst = worst.max((omega_eval(&zr, &vr, &wr) - omega_eval(&z, &v, &w)).abs());
            }
        }
        out.push(result("reduction", "forms_invariant_under_o2d", max_dim(dims), n * dims.len(), 1e-12, worst));
    }

    // defining identity ⟨M(Z), ξ⟩ = Θ(Zξ)
    {
        let mut rng = sample::rng(seed ^ 0x52_03);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::phase_point::<f64>(&mut rng, d, 1.0);
                let xi = sample::skew::<f64>(&mut rng, 2 * d, 1.0);
                let (lhs, rhs) = pairing_identity(&z, &xi).unwrap();
                worst = worst.max((lhs - rhs).abs());
            }
        }
        out.push(result("reduction", "momentum_pairing_identity", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // M⁻¹(J) = Sp(2d,ℝ): identical residuals, agreeing flags
    {
        let mut rng = sample::rng(seed ^ 0x52_04);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let level = is_on_level_j(&z, 1e-9);
                let group = is_symplectic(&z.to_matrix(), 1e-9);
                worst = worst.max((level.residual - group.residual).abs());
                worst = worst.max(level.residual);
                if level.pass != group.pass {
                    worst = f64::INFINITY;
                }
            }
        }
        out.push(result("reduction", "level_set_is_symplectic_group", max_dim(dims), n * dims.len(), 1e-9, worst));
    }

    // perturbations past the 1e-4 scale are rejected by both predicates
    {
        let mut rng = sample::rng(seed ^ 0x52_05);
        let mut wrongly_accepted = 0usize;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let mut zm = z.to_matrix();
                let mut noise = sample::matrix::<f64>(&mut rng, 2 * d, 2 * d, 1.0);
                noise *= 1e-2 / noise.norm();
                zm += &noise;
                let mut perturbed = PhasePoint::from_matrix(&zm).unwrap();
                // rescale the perturbation until the residual clears 1e-4
                let mut guard = 0;
                while is_on_level_j(&perturbed, 1e-9).residual <= 1e-4 && guard < 60 {
                    zm += &noise;
                    perturbed = PhasePoint::from_matrix(&zm).unwrap();
                    guard += 1;
                }
                let level = is_on_level_j(&perturbed, 1e-8);
                let group = is_symplectic(&perturbed.to_matrix(), 1e-8);
                if level.pass || group.pass {
                    wrongly_accepted += 1;
                }
            }
        }
        out.push(result("reduction", "perturbed_points_rejected", max_dim(dims), n * dims.len(), 0.0, wrongly_accepted as f64));
    }

    // the isotropy action preserves the level set
    {
        let mut rng = sample::rng(seed ^ 0x52_06);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let u = sample::unitary_pair::<f64>(&mut rng, d);
                let moved = o2d_act(&z, &embed_unitary(&u)).unwrap();
                worst = worst.max(is_on_level_j(&moved, 1e-9).residual);
            }
        }
        out.push(result("reduction", "level_preserved_by_isotropy", max_dim(dims), n * dims.len(), 1e-9, worst));
    }

    // right-translated algebra directions satisfy the linearized constraint
    {
        let mut rng = sample::rng(seed ^ 0x52_07);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let v = sample::level_tangent(&mut rng, &z);
                worst = worst.max(momentum_differential(&z, &v).norm());
            }
        }
        out.push(result("reduction", "tangent_sampler_tangency", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // reduced-form identity: Ω_Zd(v, w) = −½ Ω_Σd(Tπ v, Tπ w) on the level set
    {
        let mut rng = sample::rng(seed ^ 0x52_08);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let v = sample::level_tangent(&mut rng, &z);
                let w = sample::level_tangent(&mut rng, &z);
                let (lhs, rhs) = reduced_form_check(&z, &v, &w).unwrap();
                worst = worst.max((lhs - rhs).abs());
            }
        }
        out.push(result("reduction", "reduced_form_identity", max_dim(dims), n * dims.len(), 1e-9, worst));
    }

    // vertical directions lie in the kernel of both sides
    {
        let mut rng = sample::rng(seed ^ 0x52_09);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let vert = sample::vertical_tangent(&mut rng, &z);
                let w = sample::level_tangent(&mut rng, &z);
                let (lhs, rhs) = reduced_form_check(&z, &vert, &w).unwrap();
                worst = worst.max(lhs.abs()).max(rhs.abs());
            }
        }
        out.push(result("reduction", "vertical_vectors_in_kernel", max_dim(dims), n * dims.len(), 1e-11, worst));
    }

    // analytic Tπ against a central finite difference of π
    {
        let mut rng = sample::rng(seed ^ 0x52_0a);
        let mut worst = 0.0f64;
        let eps = 1e-6;
        for &d in dims {
            for _ in 0..n {
                let z = sample::level_point::<f64>(&mut rng, d);
                let v = sample::level_tangent(&mut rng, &z);
                let analytic = projection_differential(&z, &v).unwrap();
                let shift = |sign: f64| -> SiegelPoint<f64> {
                    PhasePoint::from_matrix(&(z.to_matrix() + v.to_matrix() * (sign * eps)))
                        .unwrap()
                        .project()
                        .unwrap()
                };
                let (plus, minus) = (shift(1.0), shift(-1.0));
                let fd_a = (plus.a() - minus.a()) / (2.0 * eps);
                let fd_b = (plus.b() - minus.b()) / (2.0 * eps);
                worst = worst.max((analytic.da.matrix() - fd_a).norm());
                worst = worst.max((analytic.db.matrix() - fd_b).norm());
            }
        }
        out.push(result("reduction", "projection_differential_vs_fd", max_dim(dims), n * dims.len(), 1e-6, worst));
    }

    out
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

/// Ω = dq∧dp + (ħ/2)Ω_Zd evaluated on two lifted tangents.
fn omega_lifted(hbar: f64, u: &HagedornDeriv<f64>, v: &HagedornDeriv<f64>) -> f64 {
    let classical = u.dq.dot(&v.dp) - v.dq.dot(&u.dp);
    let zd = |a: &HagedornDeriv<f64>, b: &HagedornDeriv<f64>| -> f64 {
        (re_part(&a.dq_mat).transpose() * re_part(&b.dp_mat)).trace()
            + (im_part(&a.dq_mat).transpose() * im_part(&b.dp_mat)).trace()
    };
    classical + 0.5 * hbar * (zd(u, v) - zd(v, u))
}

/// Ω̄ = dq∧dp + (ħ/4) dℬ⁻¹∧d𝒜 evaluated on two reduced tangents at x.
fn omega_reduced(
    hbar: f64,
    x: &SiegelPoint<f64>,
    u: &HellerDeriv<f64>,
    v: &HellerDeriv<f64>,
) -> f64 {
    let classical = u.dq.dot(&v.dp) - v.dq.dot(&u.dp);
    let tu = SiegelTangent::from_parts(u.da.clone(), u.db.clone()).unwrap();
    let tv = SiegelTangent::from_parts(v.da.clone(), v.db.clone()).unwrap();
    classical - 0.25 * hbar * siegel_form(x, &tu, &tv)
}

fn random_hagedorn_direction(rng: &mut ChaCha8Rng, d: usize) -> HagedornDeriv<f64> {
    HagedornDeriv {
        dq: sample::vector(rng, d, 1.0),
        dp: sample::vector(rng, d, 1.0),
        dq_mat: crate::cmat::complexify(&sample::matrix(rng, d, d, 1.0), &sample::matrix(rng, d, d, 1.0)),
        dp_mat: crate::cmat::complexify(&sample::matrix(rng, d, d, 1.0), &sample::matrix(rng, d, d, 1.0)),
        daction: 0.0,
    }
}

fn random_heller_direction(rng: &mut ChaCha8Rng, d: usize) -> HellerDeriv<f64> {
    HellerDeriv {
        dq: sample::vector(rng, d, 1.0),
        dp: sample::vector(rng, d, 1.0),
        da: sample::symmetric(rng, d, 1.0),
        db: sample::symmetric(rng, d, 0.2),
        dphase: 0.0,
    }
}

/// Unit-scale fixtures keep the finite-difference probes of conserved
/// quantities away from the roundoff floor of the absolute tolerance.
fn tame_hagedorn(rng: &mut ChaCha8Rng, d: usize) -> HagedornState<f64> {
    let mut s = sample::symmetric::<f64>(rng, 2 * d, 1.0);
    let norm = s.norm();
    if norm > 0.0 {
        s *= sample::uniform::<f64>(rng, 0.05, 0.7) / norm;
    }
    let m = (crate::spgroup::symplectic_j::<f64>(d) * s).exp();
    let qp = crate::spgroup::to_complex(&BlockSymplectic::from_matrix(&m).unwrap());
    HagedornState::new(
        sample::vector(rng, d, 0.7),
        sample::vector(rng, d, 0.7),
        qp,
        sample::uniform(rng, -0.5, 0.5),
    )
    .unwrap()
}

fn tame_heller(rng: &mut ChaCha8Rng, d: usize) -> HellerState<f64> {
    let g = sample::matrix::<f64>(rng, d, d, 0.5);
    let b = &g * g.transpose() + DMatrix::<f64>::identity(d, d);
    HellerState::new(
        sample::vector(rng, d, 0.7),
        sample::vector(rng, d, 0.7),
        SiegelPoint::from_parts(sample::symmetric(rng, d, 0.5), b).unwrap(),
        sample::uniform(rng, -0.5, 0.5),
    )
    .unwrap()
}

fn hagedorn_rhs_norm(k: &HagedornDeriv<f64>) -> f64 {
    (k.dq.norm_squared() + k.dp.norm_squared() + k.dq_mat.norm_squared() + k.dp_mat.norm_squared())
        .sqrt()
}

pub fn dynamics_suite(seed: u64, samples: usize, dims: &[usize]) -> Vec<PropertyResult> {
    let mut out = Vec::new();
    let n = per_dim(samples, dims);
    let prm_corrected = SimParams::new(1.0, 1.0, true);

    // the lifted field satisfies Ω(X_H, Y) = dH·Y for the extended H,
    // across masses and values of ħ
    {
        let mut rng = sample::rng(seed ^ 0x44_01);
        let mut worst = 0.0f64;
        for &d in dims {
            let v = anharmonic_for(d);
            for _ in 0..n {
                let prm = SimParams::new(
                    sample::uniform(&mut rng, 0.5, 2.0),
                    sample::uniform(&mut rng, 0.4, 2.0),
                    true,
                );
                let s = sample::hagedorn_state::<f64>(&mut rng, d);
                let field = hagedorn_rhs(&s, v.as_ref(), &prm);
                for _ in 0..4 {
                    let y = random_hagedorn_direction(&mut rng, d);
                    let pairing = omega_lifted(prm.hbar, &field, &y);
                    let dh = fd5(
                        |h| extended_hamiltonian(&s.add_scaled(&y, h), v.as_ref(), &prm),
                        1e-4,
                    );
                    worst = worst.max((pairing - dh).abs());
                }
            }
        }
        out.push(result("dynamics", "lifted_field_is_hamiltonian", max_dim(dims), n * dims.len(), 1e-6, worst));
    }

    // the reduced field satisfies Ω̄(X_H̄, Y) = dH̄·Y
    {
        let mut rng = sample::rng(seed ^ 0x44_02);
        let mut worst = 0.0f64;
        for &d in dims {
            let v = anharmonic_for(d);
            for _ in 0..n {
                let prm = SimParams::new(
                    sample::uniform(&mut rng, 0.5, 2.0),
                    sample::uniform(&mut rng, 0.4, 2.0),
                    true,
                );
                let s = sample::heller_state::<f64>(&mut rng, d);
                let field = heller_rhs(&s, v.as_ref(), &prm);
                for _ in 0..4 {
                    let y = random_heller_direction(&mut rng, d);
                    let pairing = omega_reduced(prm.hbar, &s.x, &field, &y);
                    let dh = fd5(
                        |h| {
                            reduced_extended_hamiltonian(
                                &s.add_scaled(&y, h).expect("small perturbation keeps ℬ positive"),
                                v.as_ref(),
                                &prm,
                            )
                        },
                        1e-4,
                    );
                    worst = worst.max((pairing - dh).abs());
                }
            }
        }
        out.push(result("dynamics", "reduced_field_is_hamiltonian", max_dim(dims), n * dims.len(), 1e-6, worst));
    }

    // Tπ maps the lifted field onto the reduced field, both flags
    {
        let mut rng = sample::rng(seed ^ 0x44_03);
        let mut worst = 0.0f64;
        for &d in dims {
            let v = anharmonic_for(d);
            for corrected in [false, true] {
                for _ in 0..n {
                    let prm = SimParams::new(
                        sample::uniform(&mut rng, 0.5, 2.0),
                        sample::uniform(&mut rng, 0.4, 2.0),
                        corrected,
                    );
                    let s = sample::hagedorn_state::<f64>(&mut rng, d);
                    let branch = DetBranch::from_q(s.qp.q()).unwrap();
                    let projected = project_state(&s, &prm, &branch).unwrap();
                    let lifted = hagedorn_rhs(&s, v.as_ref(), &prm);
                    let reduced = heller_rhs(&projected, v.as_ref(), &prm);

                    let q_inv = crate::cmat::guarded_inverse(s.qp.q()).unwrap();
                    let c = s.qp.p() * &q_inv;
                    let dc = &lifted.dp_mat * &q_inv - &c * &lifted.dq_mat * &q_inv;
                    worst = worst.max((re_part(&dc) - &reduced.da).norm());
                    worst = worst.max((im_part(&dc) - &reduced.db).norm());
                    worst = worst.max((&lifted.dq - &reduced.dq).norm());
                    worst = worst.max((&lifted.dp - &reduced.dp).norm());

                    // phase dictionary at the velocity level:
                    // φ̇ = Ṡ − (ħ/2)·d/dt arg det Q, with d/dt arg det Q = Im tr(Q⁻¹Q̇)
                    let theta_dot = (q_inv * &lifted.dq_mat).trace().im;
                    let dphase = lifted.daction - 0.5 * prm.hbar * theta_dot;
                    worst = worst.max((dphase - reduced.dphase).abs());
                }
            }
        }
        out.push(result("dynamics", "projection_commutes_with_flow", max_dim(dims), 2 * n * dims.len(), 1e-10, worst));
    }

    // d/dt H = 0 along the corrected flow (finite-difference directional derivative)
    {
        let mut rng = sample::rng(seed ^ 0x44_04);
        let mut worst = 0.0f64;
        for &d in dims {
            let v = anharmonic_for(d);
            for _ in 0..n {
                let s = tame_hagedorn(&mut rng, d);
                let field = hagedorn_rhs(&s, v.as_ref(), &prm_corrected);
                let h = 1e-3 / hagedorn_rhs_norm(&field).max(1.0);
                let dh = fd5(
                    |t| extended_hamiltonian(&s.add_scaled(&field, t), v.as_ref(), &prm_corrected),
                    h,
                );
                worst = worst.max(dh.abs());

                let hs = tame_heller(&mut rng, d);
                let hfield = heller_rhs(&hs, v.as_ref(), &prm_corrected);
                let hnorm = (hfield.dq.norm_squared()
                    + hfield.dp.norm_squared()
                    + hfield.da.norm_squared()
                    + hfield.db.norm_squared())
                .sqrt();
                let dh = fd5(
                    |t| {
                        reduced_extended_hamiltonian(
                            &hs.add_scaled(&hfield, t).expect("small step"),
                            v.as_ref(),
                            &prm_corrected,
                        )
                    },
                    1e-3 / hnorm.max(1.0),
                );
                worst = worst.max(dh.abs());
            }
        }
        out.push(result("dynamics", "energy_derivative_vanishes", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // d/dt M = 0 along the lifted flow (Noether for the O(2d) symmetry)
    {
        let mut rng = sample::rng(seed ^ 0x44_05);
        let mut worst = 0.0f64;
        for &d in dims {
            let v = anharmonic_for(d);
            for corrected in [false, true] {
                let prm = SimParams::new(1.0, 1.0, corrected);
                for _ in 0..n {
                    let s = sample::hagedorn_state::<f64>(&mut rng, d);
                    let field = hagedorn_rhs(&s, v.as_ref(), &prm);
                    let z = PhasePoint::new(
                        re_part(s.qp.q()),
                        im_part(s.qp.q()),
                        re_part(s.qp.p()),
                        im_part(s.qp.p()),
                    )
                    .unwrap();
                    let zdot = PhaseTangent::new(
                        re_part(&field.dq_mat),
                        im_part(&field.dq_mat),
                        re_part(&field.dp_mat),
                        im_part(&field.dp_mat),
                    )
                    .unwrap();
                    worst = worst.max(momentum_differential(&z, &zdot).norm());
                }
            }
        }
        out.push(result("dynamics", "momentum_derivative_vanishes", max_dim(dims), 2 * n * dims.len(), 1e-10, worst));
    }

    // rotation equivariance of both angular momenta and invariance of H (d = 3)
    {
        let mut rng = sample::rng(seed ^ 0x44_06);
        let mut worst_j = 0.0f64;
        let mut worst_h = 0.0f64;
        let d = 3;
        let v = RadialAnharmonic::new(1.0, 0.1);
        for _ in 0..samples.max(1) {
            let s = sample::hagedorn_state::<f64>(&mut rng, d);
            let r = sample::orthogonal::<f64>(&mut rng, d);
            let rotated = rotate_hagedorn(&s, &r);
            let lhs = angular_momentum(&rotated, &prm_corrected);
            let rhs = &r * angular_momentum(&s, &prm_corrected) * r.transpose();
            worst_j = worst_j.max((lhs - rhs).norm());
            worst_h = worst_h.max(
                (extended_hamiltonian(&rotated, &v, &prm_corrected)
                    - extended_hamiltonian(&s, &v, &prm_corrected))
                .abs(),
            );

            let hs = sample::heller_state::<f64>(&mut rng, d);
            let rotated = rotate_heller(&hs, &r).unwrap();
            let lhs = reduced_angular_momentum(&rotated, &prm_corrected);
            let rhs = &r * reduced_angular_momentum(&hs, &prm_corrected) * r.transpose();
            worst_j = worst_j.max((lhs - rhs).norm());
            worst_h = worst_h.max(
                (reduced_extended_hamiltonian(&rotated, &v, &prm_corrected)
                    - reduced_extended_hamiltonian(&hs, &v, &prm_corrected))
                .abs(),
            );
        }
        out.push(result("dynamics", "angular_momentum_equivariance", d, samples, 1e-12, worst_j));
        out.push(result("dynamics", "hamiltonian_rotation_invariance", d, samples, 1e-12, worst_h));
    }

    // the complex Riccati field splits into the (𝒜, ℬ) components
    {
        let mut rng = sample::rng(seed ^ 0x44_07);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let quad = random_quadratic(&mut rng, d);
                let s = sample::heller_state::<f64>(&mut rng, d);
                let prm = SimParams::new(sample::uniform(&mut rng, 0.5, 2.0), 1.0, false);
                let field = heller_rhs(&s, &quad, &prm);
                let rhs = crate::siegel::riccati_rhs(&s.x.to_complex(), &quad.hessian(&s.q), prm.mass);
                worst = worst.max((re_part(&rhs) - &field.da).norm());
                worst = worst.max((im_part(&rhs) - &field.db).norm());
            }
        }
        out.push(result("dynamics", "riccati_split_consistency", max_dim(dims), n * dims.len(), 1e-14, worst));
    }

    // H on the level set equals H̄ after projection (quadratic and quartic)
    {
        let mut rng = sample::rng(seed ^ 0x44_08);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s = sample::hagedorn_state::<f64>(&mut rng, d);
                let branch = DetBranch::from_q(s.qp.q()).unwrap();
                let projected = project_state(&s, &prm_corrected, &branch).unwrap();

                let quad = random_quadratic(&mut rng, d);
                worst = worst.max(
                    (extended_hamiltonian(&s, &quad, &prm_corrected)
                        - reduced_extended_hamiltonian(&projected, &quad, &prm_corrected))
                    .abs(),
                );
                if d == 1 {
                    let quartic = Quartic1D::new(1.0, 0.1);
                    worst = worst.max(
                        (extended_hamiltonian(&s, &quartic, &prm_corrected)
                            - reduced_extended_hamiltonian(&projected, &quartic, &prm_corrected))
                        .abs(),
                    );
                }
            }
        }
        out.push(result("dynamics", "hamiltonian_reduction_identity", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // J on the level set projects onto J̄
    {
        let mut rng = sample::rng(seed ^ 0x44_09);
        let mut worst = 0.0f64;
        for &d in dims.iter().filter(|&&d| d >= 2) {
            for _ in 0..n {
                let s = sample::hagedorn_state::<f64>(&mut rng, d);
                let branch = DetBranch::from_q(s.qp.q()).unwrap();
                let projected = project_state(&s, &prm_corrected, &branch).unwrap();
                let lhs = angular_momentum(&s, &prm_corrected);
                let rhs = reduced_angular_momentum(&projected, &prm_corrected);
                worst = worst.max((lhs - rhs).norm());
            }
        }
        out.push(result("dynamics", "angular_momentum_projects", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // the two wavefunction forms agree pointwise through the phase dictionary
    {
        let mut rng = sample::rng(seed ^ 0x44_0a);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let s = sample::hagedorn_state::<f64>(&mut rng, d);
                let branch = DetBranch::from_q(s.qp.q()).unwrap();
                let projected = project_state(&s, &prm_corrected, &branch).unwrap();
                for _ in 0..3 {
                    let x = &s.q + sample::vector::<f64>(&mut rng, d, 1.5);
                    let hag = dynamics::hagedorn_wavefunction(&s, &x, &prm_corrected, branch.theta())
                        .unwrap();
                    let hel = dynamics::heller_wavefunction(&projected, &x, &prm_corrected);
                    worst = worst.max((hag - hel).norm());
                }
            }
        }
        out.push(result("dynamics", "wavefunction_forms_agree", max_dim(dims), n * dims.len(), 1e-12, worst));
    }

    // quadratic potentials: the residual vanishes at every point, both forms
    {
        let mut rng = sample::rng(seed ^ 0x44_0b);
        let mut worst = 0.0f64;
        let prm = SimParams::new(1.0, 1.0, false);
        for &d in dims {
            let v = Quadratic::isotropic(d, 1.0);
            for _ in 0..n {
                let s = sample::hagedorn_state::<f64>(&mut rng, d);
                let ds = hagedorn_rhs(&s, &v, &prm);
                let theta = DetBranch::from_q(s.qp.q()).unwrap().theta();
                let hs = sample::heller_state::<f64>(&mut rng, d);
                let dhs = heller_rhs(&hs, &v, &prm);
                for _ in 0..3 {
                    let x = &s.q + sample::vector::<f64>(&mut rng, d, 2.0);
                    let r = dynamics::hagedorn_residual(&s, &ds, &v, &x, &prm, theta).unwrap();
                    let psi = dynamics::hagedorn_wavefunction(&s, &x, &prm, theta).unwrap();
                    worst = worst.max(r.norm() / psi.norm());

                    let x = &hs.q + sample::vector::<f64>(&mut rng, d, 2.0);
                    let r = dynamics::heller_residual(&hs, &dhs, &v, &x, &prm);
                    let psi = dynamics::heller_wavefunction(&hs, &x, &prm);
                    worst = worst.max(r.norm() / psi.norm());
                }
            }
        }
        out.push(result("dynamics", "quadratic_residual_vanishes", max_dim(dims), n * dims.len(), 1e-10, worst));
    }

    // corrected and plain equations coincide for quadratic potentials
    {
        let mut rng = sample::rng(seed ^ 0x44_0c);
        let mut worst = 0.0f64;
        for &d in dims {
            for _ in 0..n {
                let quad = random_quadratic(&mut rng, d);
                let s = sample::hagedorn_state::<f64>(&mut rng, d);
                let plain = hagedorn_rhs(&s, &quad, &SimParams::new(1.0, 1.0, false));
                let corr = hagedorn_rhs(&s, &quad, &SimParams::new(1.0, 1.0, true));
                worst = worst.max((&plain.dp - &corr.dp).norm());

                let hs = sample::heller_state::<f64>(&mut rng, d);
                let plain = heller_rhs(&hs, &quad, &SimParams::new(1.0, 1.0, false));
                let corr = heller_rhs(&hs, &quad, &SimParams::new(1.0, 1.0, true));
                worst = worst.max((&plain.dp - &corr.dp).norm());
            }
        }
        out.push(result("dynamics", "corrected_flag_inert_for_quadratic", max_dim(dims), n * dims.len(), 1e-15, worst));
    }

    // built-in potential derivatives agree with finite differences of the value
    {
        let mut rng = sample::rng(seed ^ 0x44_0d);
        let mut worst = 0.0f64;
        let fd_probe = |v: &dyn Potential<f64>, q: &DVector<f64>| -> f64 {
            let h = 1e-5;
            let d = q.len();
            let mut w = 0.0f64;
            let grad = v.gradient(q);
            for i in 0..d {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[i] += h;
                qm[i] -= h;
                let fd = (v.value(&qp) - v.value(&qm)) / (2.0 * h);
                w = w.max((fd - grad[i]).abs() / grad[i].abs().max(1.0));
                let col = (v.gradient(&qp) - v.gradient(&qm)) / (2.0 * h);
                let hess = v.hessian(q);
                for j in 0..d {
                    w = w.max((col[j] - hess[(j, i)]).abs() / hess[(j, i)].abs().max(1.0));
                }
            }
            w
        };
        for &d in dims {
            for _ in 0..n.min(50) {
                let q = sample::vector::<f64>(&mut rng, d, 1.5);
                let quad = random_quadratic(&mut rng, d);
                worst = worst.max(fd_probe(&quad, &q));
                worst = worst.max(fd_probe(&RadialAnharmonic::new(1.0, 0.1), &q));
                if d == 1 {
                    worst = worst.max(fd_probe(&Quartic1D::new(1.0, 0.1), &q));
                }
            }
        }
        out.push(result("dynamics", "potential_derivative_consistency", max_dim(dims), n.min(50) * dims.len(), 1e-6, worst));
    }

    out
}

/// Run a suite (or all of them) with a fixed seed and per-property sample
/// budget over the requested dimensions.
pub fn run_suite(suite: Suite, seed: u64, samples: usize, dims: &[usize]) -> Vec<PropertyResult> {
    let dims = if dims.is_empty() { &[1, 2, 3][..] } else { dims };
    match suite {
        Suite::Geometry => geometry_suite(seed, samples, dims),
        Suite::Reduction => reduction_suite(seed, samples, dims),
        Suite::Dynamics => dynamics_suite(seed, samples, dims),
        Suite::All => {
            let mut out = geometry_suite(seed, samples, dims);
            out.extend(reduction_suite(seed, samples, dims));
            out.extend(dynamics_suite(seed, samples, dims));
            out
        }
    }
}
