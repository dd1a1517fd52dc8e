use proptest::prelude::*;
use wfpo_core::experiments::{prepare_pulse, run_full, GridParams};
use wfpo_core::pulse::{ChirpedGaussian, TimeField, TimeGrid};
use wfpo_core::quantum::{
    lindblad_rhs, propagate, DensityMatrix, FranckCondon, LindbladGenerator, SystemModel, Target,
};
use wfpo_core::{Op, C64};

#[test]
fn lab_and_rotating_frames_agree() {
    let model = SystemModel::table1().with_mu(0.05);
    let pulse = ChirpedGaussian::new(1.0, 0.5, 100.0).unwrap();
    let grids = GridParams {
        rk4_step: Some(4e-4),
        stride: 50,
        ..GridParams::default()
    };
    let field = prepare_pulse(&pulse, &grids).unwrap().field;
    let rho0 = DensityMatrix::ground();
    let rot = propagate(&LindbladGenerator::rotating(&model).unwrap(), &rho0, &field, 50).unwrap();
    let lab = propagate(&LindbladGenerator::lab(&model, 100.0).unwrap(), &rho0, &field, 50).unwrap();
    let (a, b) = (rot.final_state().level_populations(), lab.final_state().level_populations());
    assert!(a[2] > 1e-3, "transfer too small to compare: {a:?}");
    for k in 0..4 {
        assert!((a[k] - b[k]).abs() < 1e-6, "level {}: {} vs {}", k + 1, a[k], b[k]);
    }
    // populations agree along the way, not only at the end
    for (x, y) in rot.states.iter().zip(&lab.states).step_by(37) {
        assert!((x.population(Target::ExcitedSurface) - y.population(Target::ExcitedSurface)).abs() < 1e-6);
    }
}

#[test]
fn halving_the_step_changes_little() {
    let model = SystemModel::table1();
    for chirp in [80.0, -80.0] {
        let pulse = ChirpedGaussian::new(1.0, chirp, 0.0).unwrap();
        let coarse = run_full(&model, &pulse, &GridParams::default()).unwrap();
        let fine = run_full(
            &model,
            &pulse,
            &GridParams {
                rk4_step: Some(0.005),
                ..GridParams::default()
            },
        )
        .unwrap();
        for target in [Target::ExcitedSurface, Target::Level(2)] {
            let (a, b) = (coarse.final_population(target), fine.final_population(target));
            assert!((a - b).abs() < 1e-8 * a, "χ={chirp} {target}: {a:e} vs {b:e}");
        }
    }
}

#[test]
fn field_free_excited_population_is_conserved() {
    let mut op = Op::zeros();
    op[(0, 0)] = C64::new(0.3, 0.0);
    op[(1, 1)] = C64::new(0.2, 0.0);
    op[(2, 2)] = C64::new(0.4, 0.0);
    op[(3, 3)] = C64::new(0.1, 0.0);
    op[(0, 1)] = C64::new(0.1, 0.05);
    op[(1, 0)] = op[(0, 1)].conj();
    op[(0, 2)] = C64::new(0.05, -0.02);
    op[(2, 0)] = op[(0, 2)].conj();
    let rho0 = DensityMatrix::new(op).unwrap();
    let field = TimeField::zeros(TimeGrid::centered(200.0, 80001).unwrap());
    let gen = LindbladGenerator::rotating(&SystemModel::table1().with_gamma(0.3)).unwrap();
    let traj = propagate(&gen, &rho0, &field, 1000).unwrap();
    let p0 = rho0.population(Target::ExcitedSurface);
    for s in &traj.states {
        assert!((s.population(Target::ExcitedSurface) - p0).abs() < 1e-10);
    }
    // relaxation drains |4⟩ into |3⟩ within the surface
    let end = traj.final_state().level_populations();
    assert!(end[3] < 1e-30 && (end[2] - 0.5).abs() < 1e-10);
    assert!(traj.defects.within_tolerance());
}

#[test]
fn strong_field_keeps_the_state_physical() {
    let model = SystemModel::table1().with_mu(0.3).with_gamma(0.5);
    let pulse = ChirpedGaussian::new(1.0, -3.0, 0.0).unwrap();
    let grids = GridParams {
        stride: 1,
        ..GridParams::default()
    };
    let traj = run_full(&model, &pulse, &grids).unwrap();
    assert!(traj.final_population(Target::ExcitedSurface) > 0.1);
    assert!(traj.defects.trace_drift < 1e-10);
    assert!(traj.defects.hermiticity < 1e-12);
    assert!(traj.defects.min_eigenvalue > -1e-9);
}

fn random_state(re: &[f64], im: &[f64], w: &[f64]) -> Op {
    // ρ = Σ w_k |v_k⟩⟨v_k| / Σ w_k with columns of a random complex matrix
    let m = Op::from_fn(|i, j| C64::new(re[4 * i + j], im[4 * i + j]));
    let mut rho = Op::zeros();
    for (k, wk) in w.iter().enumerate().take(4) {
        let v = m.column(k);
        let n = v.norm_squared();
        rho += v * v.adjoint() * C64::new(wk / n, 0.0);
    }
    rho / rho.trace()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(
        re in prop::collection::vec(-1.0f64..1.0, 16),
        im in prop::collection::vec(-1.0f64..1.0, 16),
        w in prop::collection::vec(0.01f64..1.0, 4),
        eps_re in -5.0f64..5.0,
        eps_im in -5.0f64..5.0,
        gamma in 0.0f64..3.0,
        mu in 0.0f64..0.5,
        f in prop::collection::vec(0.0f64..1.0, 4),
    ) {
        let model = SystemModel {
            mu,
            gamma,
            fc: FranckCondon { f14: f[0], f23: f[1], f24: f[2], f13: f[3] },
            ..SystemModel::table1()
        };
        let gen = LindbladGenerator::rotating(&model).unwrap();
        let rho = random_state(&re, &im, &w);
        let d = lindblad_rhs(&gen, &rho, C64::new(eps_re, eps_im));
        prop_assert!(d.trace().norm() < 1e-14);
        prop_assert!((d - d.adjoint()).iter().all(|z| z.norm() < 1e-14));
        let fast = gen.rhs(&rho, C64::new(eps_re, eps_im));
        prop_assert!((fast - d).iter().all(|z| z.norm() < 1e-14));
    }
}
