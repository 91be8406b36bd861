use std::collections::HashMap;

use num_complex::Complex64;

use super::*;
use crate::spectral::{
    curl_2d, divergence, dk_seminorm_l2, leray_project, lp_norm, random_scalar, random_velocity,
    transform, Field, Grid, RandomSpec,
};

fn g2(n: usize) -> Grid {
    Grid::new(2, n).unwrap()
}

fn tg_vorticity(g: Grid) -> Field {
    Field::scalar_from_fn(g, |x| -2.0 * x[0].cos() * x[1].cos())
}

fn random_state(model: Model, n: usize, seed: u64, nu: f64) -> FlowState {
    let spec = RandomSpec::new(seed).with_cutoff(4.0);
    Initial::RandomSmooth(spec).state(model, &g2(n), nu).unwrap()
}

#[test]
fn sqg_velocity_of_single_mode() {
    let g = g2(32);
    let theta = Field::scalar_from_fn(g, |x| x[0].sin());
    let s = FlowState::new(Model::Sqg, theta, 0.0, 0.0).unwrap();
    let v = velocity_of(&s).unwrap();
    let expect = Field::vector_from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
    assert!(v.max_abs_diff(&expect).unwrap() < 1e-13);
}

#[test]
fn euler_velocity_of() {
    let g = g2(32);
    let zero = FlowState::new(Model::Euler2D, Field::zeros(g, 1), 0.0, 0.0).unwrap();
    assert_eq!(velocity_of(&zero).unwrap().max_abs(), 0.0);

    let w = Field::scalar_from_fn(g, |x| 2.0 * x[0].sin() * x[1].sin());
    let s = FlowState::new(Model::Euler2D, w.clone(), 0.0, 0.0).unwrap();
    let v = velocity_of(&s).unwrap();
    assert!(curl_2d(&v).unwrap().max_abs_diff(&w).unwrap() < 1e-10);
    assert!(divergence(&v).unwrap().max_abs() < 1e-10);
}

#[test]
fn state_validation() {
    let g = g2(16);
    let shifted = Field::scalar_from_fn(g, |x| 1.0 + x[0].sin());
    assert!(FlowState::new(Model::Euler2D, shifted.clone(), 0.0, 0.0).is_err());
    assert!(FlowState::new(Model::Sqg, shifted, 0.0, 0.0).is_ok());
    assert!(FlowState::new(Model::Euler2D, tg_vorticity(g), 0.1, 0.0).is_err());
    assert!(FlowState::new(Model::NS2D, tg_vorticity(g), -0.1, 0.0).is_err());
    let g3 = Grid::new(3, 8).unwrap();
    assert!(FlowState::new(Model::Euler2D, Field::zeros(g3, 1), 0.0, 0.0).is_err());
}

#[test]
fn steady_right_hand_sides() {
    let g = g2(64);
    let theta = Field::scalar_from_fn(g, |x| x[0].sin());
    let s = FlowState::new(Model::Sqg, theta, 0.0, 0.0).unwrap();
    assert!(rhs(&s).unwrap().max_abs() <= 1e-10);

    let tg = FlowState::new(Model::Euler2D, tg_vorticity(g), 0.0, 0.0).unwrap();
    assert!(rhs(&tg).unwrap().max_abs() <= 1e-10);

    let zero = FlowState::new(Model::NS2D, Field::zeros(g, 1), 0.3, 0.0).unwrap();
    assert_eq!(rhs(&zero).unwrap().max_abs(), 0.0);
}

#[test]
fn inviscid_rhs_is_orthogonal_to_state() {
    for model in [Model::Euler2D, Model::Sqg] {
        for seed in 0..4 {
            let s = random_state(model, 32, seed, 0.0);
            let r = rhs(&s).unwrap();
            let q = s.prognostic();
            let dot: f64 = q.values().iter().zip(r.values()).map(|(a, b)| a * b).sum::<f64>()
                * q.grid().cell_volume();
            let scale = lp_norm(q, 2.0).unwrap() * lp_norm(&r, 2.0).unwrap();
            assert!(dot.abs() <= 1e-8 * scale, "{model} seed {seed}: {dot}");
        }
    }
}

#[test]
fn nonlinear_term_of_taylor_green_is_a_gradient() {
    let g = g2(32);
    let v = Field::vector_from_fn(g, |x| [x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos(), 0.0]);
    let nl = nonlinear_term(&v).unwrap();
    assert!(nl.max_abs() > 0.1);
    assert!(leray_project(&nl).unwrap().max_abs() <= 1e-8);
    assert_eq!(nonlinear_term(&Field::zeros(g, 2)).unwrap().max_abs(), 0.0);
}

/// Direct convolution of the nonzero Fourier modes of `v_j` and `∂_j v_i`, restricted
/// to the retained band.
fn convolved_nonlinear(v: &Field) -> Vec<HashMap<[i64; 3], Complex64>> {
    let g = *v.grid();
    let dim = g.dim();
    let spec = transform(v).unwrap();
    let modes = |c: usize| -> Vec<([i64; 3], Complex64)> {
        spec.component(c)
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-14)
            .map(|(s, z)| (g.wavevector(s), *z))
            .collect()
    };
    let cut = g.dealias_cutoff();
    (0..dim)
        .map(|i| {
            let mut out: HashMap<[i64; 3], Complex64> = HashMap::new();
            for j in 0..dim {
                for (a, za) in modes(j) {
                    for (b, zb) in modes(i) {
                        let d = zb * Complex64::new(0.0, b[j] as f64);
                        let k = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                        if k.iter().all(|x| x.abs() <= cut) {
                            *out.entry(k).or_default() += za * d;
                        }
                    }
                }
            }
            out
        })
        .collect()
}

fn check_against_convolution(v: &Field) {
    let g = *v.grid();
    let got = transform(&nonlinear_term(v).unwrap()).unwrap();
    let expect = convolved_nonlinear(v);
    for (i, map) in expect.iter().enumerate() {
        for slot in 0..g.len() {
            let k = g.wavevector(slot);
            let e = map.get(&k).copied().unwrap_or_default();
            assert!((got.component(i)[slot] - e).norm() < 1e-8, "component {i} mode {k:?}");
        }
    }
}

#[test]
fn nonlinear_term_3d_matches_direct_convolution() {
    let g = Grid::new(3, 16).unwrap();
    let tg = Field::vector_from_fn(g, |x| {
        [x[0].cos() * x[1].sin() * x[2].sin(), -x[0].sin() * x[1].cos() * x[2].sin(), 0.0]
    });
    check_against_convolution(&tg);
    // closed form: (−sin2x₁ sin²x₃/2, −sin2x₂ sin²x₃/2, 0)
    let nl = nonlinear_term(&tg).unwrap();
    let expect = Field::vector_from_fn(g, |x| {
        let s3 = x[2].sin().powi(2);
        [-(2.0 * x[0]).sin() * s3 / 2.0, -(2.0 * x[1]).sin() * s3 / 2.0, 0.0]
    });
    assert!(nl.max_abs_diff(&expect).unwrap() < 1e-12);

    let r = random_velocity(&g, &RandomSpec::new(4).with_cutoff(2.0)).unwrap();
    check_against_convolution(&r);
}

#[test]
fn steady_states_survive_stepping() {
    let g = g2(32);
    let cases = [
        FlowState::new(Model::Euler2D, tg_vorticity(g), 0.0, 0.0).unwrap(),
        FlowState::new(Model::Sqg, Field::scalar_from_fn(g, |x| x[0].sin()), 0.0, 0.0).unwrap(),
    ];
    for s0 in cases {
        let mut s = s0.clone();
        for _ in 0..100 {
            s = step_rk4(&s, 0.01).unwrap();
        }
        assert!(s.prognostic().max_abs_diff(s0.prognostic()).unwrap() <= 1e-8);
        assert!((s.t() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn navier_stokes_taylor_green_decays_exactly() {
    let g = g2(32);
    let nu = 0.01;
    let s0 = Initial::TaylorGreen2d { amplitude: 1.0 }.state(Model::NS2D, &g, nu).unwrap();
    let cfg = StepperConfig {
        t_end: 1.0,
        ..Default::default()
    };
    let out = run(s0.clone(), &cfg, &mut |_: &FlowState| Ok(())).unwrap();
    assert_eq!(out.status, RunStatus::Completed);
    assert_eq!(out.state.t(), 1.0);
    let expect = s0.prognostic().scaled((-2.0 * nu).exp());
    assert!(out.state.prognostic().max_abs_diff(&expect).unwrap() <= 1e-6);
}

#[test]
fn rk4_is_fourth_order() {
    let s0 = random_state(Model::Euler2D, 32, 7, 0.0);
    let solve = |dt: f64| {
        let mut s = s0.clone();
        let steps = (0.8 / dt).round() as usize;
        for _ in 0..steps {
            s = step_rk4(&s, dt).unwrap();
        }
        s.prognostic().clone()
    };
    let a = solve(0.2);
    let b = solve(0.1);
    let c = solve(0.05);
    let e1 = a.max_abs_diff(&b).unwrap();
    let e2 = b.max_abs_diff(&c).unwrap();
    let ratio = e1 / e2;
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio} ({e1:e} / {e2:e})");
}

#[test]
fn euler_energy_is_conserved() {
    let s0 = random_state(Model::Euler2D, 64, 3, 0.0);
    let e0 = lp_norm(&velocity_of(&s0).unwrap(), 2.0).unwrap();
    let cfg = StepperConfig {
        t_end: 0.5,
        ..Default::default()
    };
    let out = run(s0, &cfg, &mut |_: &FlowState| Ok(())).unwrap();
    let e1 = lp_norm(&velocity_of(&out.state).unwrap(), 2.0).unwrap();
    assert!((e1 - e0).abs() / e0 < 1e-6);
}

#[test]
fn run_records_on_schedule() {
    let s0 = random_state(Model::Sqg, 16, 1, 0.0);
    let cfg = StepperConfig {
        dt: Some(0.03),
        t_end: 0.1,
        record_every: 2,
        ..Default::default()
    };
    let mut times = Vec::new();
    let out = run(s0, &cfg, &mut |s: &FlowState| {
        times.push(s.t());
        Ok(())
    })
    .unwrap();
    assert_eq!(out.steps, 4);
    assert_eq!(times.len(), 3);
    assert_eq!(times[0], 0.0);
    assert!((times[1] - 0.06).abs() < 1e-15);
    assert_eq!(times[2], 0.1);
}

#[test]
fn auto_dt_respects_cfl() {
    let s0 = random_state(Model::Euler2D, 32, 5, 0.0);
    let cfg = StepperConfig::default();
    let dt = cfg.dt_for(&s0).unwrap();
    let vmax = velocity_of(&s0).unwrap().max_magnitude();
    assert!(dt * vmax / s0.grid().spacing() <= cfg.cfl_safety + 1e-12);
}

#[test]
fn non_finite_state_is_reported() {
    let g = g2(16);
    let w = random_scalar(&g, &RandomSpec::new(2).with_cutoff(5.0).with_amplitude(50.0)).unwrap();
    let s0 = FlowState::new(Model::Euler2D, w, 0.0, 0.0).unwrap();
    let cfg = StepperConfig::fixed(5.0, 1e6);
    let mut seen = 0;
    let out = run(s0, &cfg, &mut |_: &FlowState| {
        seen += 1;
        Ok(())
    })
    .unwrap();
    match out.status {
        RunStatus::BlowupSuspected { step, .. } => assert_eq!(step, out.steps + 1),
        RunStatus::Completed => panic!("expected the oversized step to diverge"),
    }
    assert!(out.state.prognostic().is_finite());
    assert_eq!(seen, out.steps + 1);
}

#[test]
fn stepper_rejects_bad_config() {
    let s0 = random_state(Model::Euler2D, 16, 1, 0.0);
    let mut noop = |_: &FlowState| Ok(());
    for cfg in [
        StepperConfig { cfl_safety: 0.0, ..Default::default() },
        StepperConfig { record_every: 0, ..Default::default() },
        StepperConfig { dt: Some(-1.0), ..Default::default() },
        StepperConfig { t_end: -1.0, ..Default::default() },
    ] {
        assert!(run(s0.clone(), &cfg, &mut noop).is_err());
    }
}

#[test]
fn presets() {
    let g = g2(32);
    assert!(Initial::SqgSingleMode { mode: 0, amplitude: 1.0 }.field(&g).is_err());
    assert!(Initial::SqgSingleMode { mode: 11, amplitude: 1.0 }.field(&g).is_err());
    let z = Initial::TaylorGreen2d { amplitude: 0.0 };
    assert!(z.state(Model::Euler2D, &g, 0.0).is_err());
    let tg = Initial::TaylorGreen2d { amplitude: 1.0 }.state(Model::Euler2D, &g, 0.0).unwrap();
    let v = velocity_of(&tg).unwrap();
    let expect = Field::vector_from_fn(g, |x| [x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos(), 0.0]);
    assert!(v.max_abs_diff(&expect).unwrap() < 1e-13);
    let k3 = dk_seminorm_l2(&v, 3).unwrap();
    assert!(k3 > 0.0);
}

#[test]
fn raw_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = g2(16);
    let v = Field::vector_from_fn(g, |x| [x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos(), 0.0]);
    let path = dir.path().join("v.bin");
    write_raw_field(&path, &v).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(bytes.len(), 24 + 8 * 2 * 256);
    assert_eq!(&bytes[..8], &2u64.to_le_bytes());
    assert_eq!(&bytes[8..16], &16u64.to_le_bytes());
    assert_eq!(&bytes[16..24], &2u64.to_le_bytes());
    assert_eq!(read_raw_field(&path).unwrap(), v);

    // a velocity file becomes its vorticity
    let w = Initial::File { path: path.clone() }.field(&g).unwrap();
    assert!(w.max_abs_diff(&tg_vorticity(g)).unwrap() < 1e-12);
    assert!(Initial::File { path: path.clone() }.field(&g2(32)).is_err());

    std::fs::write(&path, &bytes[..100]).unwrap();
    assert!(read_raw_field(&path).is_err());
}
