use super::*;
use crate::flow::{step_rk4, velocity_of, FlowState, Initial, Model, StepperConfig};
use crate::spectral::{
    dk_seminorm_l2, dk_tensor, lp_norm, random_scalar, random_velocity, velocity_gradient, Field,
    Grid, RandomSpec,
};

fn g2(n: usize) -> Grid {
    Grid::new(2, n).unwrap()
}

fn tg_velocity(g: Grid) -> Field {
    Field::vector_from_fn(g, |x| [x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos(), 0.0])
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Central difference of `ln L` at the middle of three states one step `dt` apart.
fn log_rate(s0: &FlowState, dt: f64, norm: impl Fn(&FlowState) -> f64) -> (FlowState, f64) {
    let s1 = step_rk4(s0, dt).unwrap();
    let s2 = step_rk4(&s1, dt).unwrap();
    let r = (norm(&s2).ln() - norm(s0).ln()) / (2.0 * dt);
    (s1, r)
}

fn params(family: Family, k: usize, p: f64, nu: f64) -> SeriesParams {
    SeriesParams {
        family,
        dim: 2,
        k,
        p,
        nu,
    }
}

#[test]
fn alpha_k_examples() {
    let g = g2(64);
    assert!(alpha_k(&tg_velocity(g), 3).unwrap().abs() <= 1e-8);
    assert_eq!(alpha_k(&Field::zeros(g, 2), 3).unwrap(), 0.0);
    assert!(alpha_k(&Field::zeros(g, 1), 3).is_err());
}

#[test]
fn alpha_k_is_the_log_derivative_of_dk_norm() {
    let s0 = Initial::RandomSmooth(RandomSpec::new(11).with_cutoff(6.0))
        .state(Model::Euler2D, &g2(64), 0.0)
        .unwrap();
    let k = 3;
    let (mid, fd) = log_rate(&s0, 1e-4, |s| dk_seminorm_l2(&velocity_of(s).unwrap(), k).unwrap());
    let a = alpha_k(&velocity_of(&mid).unwrap(), k).unwrap();
    assert!(rel(fd, a) < 1e-4, "fd {fd} alpha {a}");
}

#[test]
fn alpha_local_abc_flow() {
    let g = Grid::new(3, 16).unwrap();
    let abc = Field::vector_from_fn(g, |x| {
        [x[2].sin() + x[1].cos(), x[0].sin() + x[2].cos(), x[1].sin() + x[0].cos()]
    });
    let a = alpha_local(&abc).unwrap();
    // ∇v(0) is a cyclic permutation, S has ½ off the diagonal and ξ = (1,1,1)/√3
    assert!((a.component(0)[0] - 1.0).abs() < 1e-12);

    // v = (a sin x₂, b sin x₃, c sin x₁): ω = −(b cos x₃, c cos x₁, a cos x₂)
    let (ca, cb, cc) = (0.7, -1.3, 0.4);
    let v = Field::vector_from_fn(g, |x| [ca * x[1].sin(), cb * x[2].sin(), cc * x[0].sin()]);
    let al = alpha_local(&v).unwrap();
    for slot in [5usize, 77, 1234, 3001] {
        let x = g.point(slot);
        let w = [-cb * x[2].cos(), -cc * x[0].cos(), -ca * x[1].cos()];
        let m = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        let xi = [w[0] / m, w[1] / m, w[2] / m];
        let expect = ca * x[1].cos() * xi[0] * xi[1]
            + cb * x[2].cos() * xi[1] * xi[2]
            + cc * x[0].cos() * xi[0] * xi[2];
        assert!((al.component(0)[slot] - expect).abs() < 1e-12);
    }

    assert_eq!(alpha_local(&Field::zeros(g, 3)).unwrap().max_abs(), 0.0);
    assert!(alpha_local(&tg_velocity(g2(16))).is_err());
}

#[test]
fn pointwise_alpha_bounds() {
    let g = Grid::new(3, 16).unwrap();
    for seed in 0..5 {
        let v = random_velocity(&g, &RandomSpec::new(seed).with_cutoff(4.0)).unwrap();
        let a = alpha_local(&v).unwrap().max_abs();
        assert!(a <= grad_v_linf(&v).unwrap() + 1e-12);
    }
    let g = g2(32);
    for seed in 0..5 {
        let th = random_scalar(&g, &RandomSpec::new(seed).with_cutoff(6.0)).unwrap();
        let a = alpha_hat_local(&th).unwrap().max_abs();
        assert!(a <= grad_v_linf(&sqg_velocity(&th).unwrap()).unwrap() + 1e-12);
    }
}

#[test]
fn alpha_hat_examples() {
    let g = g2(32);
    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    assert!(alpha_hat_local(&s).unwrap().max_abs() < 1e-14);
    let c = Field::scalar_from_fn(g, |_| 2.0);
    assert_eq!(alpha_hat_local(&c).unwrap().max_abs(), 0.0);
}

#[test]
fn lp_rate_examples() {
    let g = g2(32);
    let v = random_velocity(&g, &RandomSpec::new(3).with_cutoff(6.0)).unwrap();
    let r2 = lp_rates(&v, 2.0, 0.0).unwrap();
    assert!(r2.gamma.abs() < 1e-10);
    let grad = velocity_gradient(&v).unwrap();
    let expect = (lp_norm(&grad, 2.0).unwrap() / lp_norm(&v, 2.0).unwrap()).powi(2);
    assert!(rel(r2.delta, expect) < 1e-10);

    let tg = tg_velocity(g);
    for p in [2.0, 4.0] {
        let r = lp_rates(&tg, p, 0.01).unwrap();
        assert!((r.lambda + 0.02).abs() < 1e-6, "p={p}: {r:?}");
        assert!(r.delta >= 0.0);
    }
    assert_eq!(lp_rates(&Field::zeros(g, 2), 4.0, 0.1).unwrap().lambda, 0.0);
    assert!(lp_rates(&tg, 1.5, 0.0).is_err());
}

#[test]
fn lambda_p_is_the_log_derivative_of_lp_norm() {
    let nu = 0.05;
    let s0 = Initial::RandomSmooth(RandomSpec::new(5).with_cutoff(5.0))
        .state(Model::NS2D, &g2(64), nu)
        .unwrap();
    for p in [2.0, 4.0] {
        let (mid, fd) = log_rate(&s0, 1e-4, |s| lp_norm(&velocity_of(s).unwrap(), p).unwrap());
        let l = lambda_p(&velocity_of(&mid).unwrap(), p, nu).unwrap();
        assert!(rel(fd, l) < 1e-4, "p={p}: fd {fd} lambda {l}");
    }
}

#[test]
fn alpha_kp_examples() {
    let g = g2(64);
    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    assert!(alpha_kp(&s, 3, 2.0).unwrap().abs() <= 1e-10);
    assert_eq!(alpha_kp(&Field::zeros(g, 1), 3, 2.0).unwrap(), 0.0);
    assert!(alpha_kp(&s, 3, 1.0).is_err());

    let s0 = Initial::RandomSmooth(RandomSpec::new(9).with_cutoff(6.0))
        .state(Model::Sqg, &g, 0.0)
        .unwrap();
    for p in [2.0, 4.0] {
        let (mid, fd) = log_rate(&s0, 1e-4, |s| {
            lp_norm(&dk_tensor(s.prognostic(), 3).unwrap(), p).unwrap()
        });
        let a = alpha_kp(mid.prognostic(), 3, p).unwrap();
        assert!(rel(fd, a) < 1e-4, "p={p}: fd {fd} alpha {a}");
    }
}

#[test]
fn gn_ratio_decreases_with_frequency() {
    let g = g2(64);
    let mut last = f64::INFINITY;
    for m in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let f = Field::scalar_from_fn(g, |x| (m * x[0]).sin());
        let r = gn_ratio(&f, 3, 2.0).unwrap().unwrap();
        // ‖∇f‖_∞ = m and ‖D³f‖^{2/3}‖f‖^{1/3} = m²‖f‖
        let expect = 1.0 / (m * lp_norm(&f, 2.0).unwrap());
        assert!(rel(r, expect) < 1e-10);
        assert!(r < last);
        last = r;
    }
    assert_eq!(gn_ratio(&Field::zeros(g, 1), 3, 2.0).unwrap(), None);
}

#[test]
fn commutator_ratio_examples() {
    let g = g2(32);
    let f = Field::scalar_from_fn(g, |_| 1.5);
    let h = random_scalar(&g, &RandomSpec::new(1).with_cutoff(5.0)).unwrap();
    assert_eq!(commutator_ratio(&f, &h, 3, 2.0).unwrap(), Some(0.0));
    let f = random_scalar(&g, &RandomSpec::new(2).with_cutoff(5.0)).unwrap();
    let r = commutator_ratio(&f, &h, 3, 2.0).unwrap().unwrap();
    assert!(r > 0.0 && r.is_finite());
    assert_eq!(commutator_ratio(&f, &Field::zeros(g, 1), 3, 2.0).unwrap(), Some(0.0));
}

#[test]
fn scale_x_examples() {
    let mut s = DiagnosticSample::at(0.0);
    s.dk_v_l2 = Some(1.0);
    let pe = params(Family::Euler, 3, 2.0, 0.0);
    assert_eq!(scale_x(&pe, &s, 1.0, 1.0).unwrap(), (1.0, 1.0));
    let (x1, _) = scale_x(&pe, &s, 1.7, 2.0).unwrap();
    s.dk_v_l2 = Some(2.0);
    let (x2, _) = scale_x(&pe, &s, 1.7, 2.0).unwrap();
    assert!(rel(x2 / x1, 2f64.powf(4.0 / 6.0)) < 1e-14);

    s.v_lp = Some(3.0);
    let pn = params(Family::NavierStokes, 3, 2.0, 0.1);
    assert_eq!(scale_x(&pn, &s, 0.0, 5.0).unwrap(), (3.0, 3.0));
    let pn4 = params(Family::NavierStokes, 3, 4.0, 0.1);
    let (_, y) = scale_x(&pn4, &s, 0.0, 16.0).unwrap();
    assert!(rel(y, 3.0 * 16f64.powf(0.25)) < 1e-14);

    assert!(scale_x(&pe, &s, 1.0, 0.0).is_err());
    s.dk_theta_lp = None;
    assert!(scale_x(&params(Family::Sqg, 3, 2.0, 0.0), &s, 1.0, 1.0).is_err());
}

#[test]
fn scaling_exponents() {
    let e = params(Family::Euler, 3, 2.0, 0.0).scaling().unwrap();
    assert!(rel(e.c, 1.5) < 1e-15 && rel(e.a, 2.0 / 3.0) < 1e-15);
    let n = params(Family::NavierStokes, 3, 4.0, 0.0).scaling().unwrap();
    assert!(rel(n.c, 0.25) < 1e-15 && n.a == 1.0);
    assert_eq!(params(Family::NavierStokes, 3, 2.0, 0.0).scaling().unwrap().c, 0.0);
    assert!(params(Family::NavierStokes, 3, 1.5, 0.0).scaling().is_err());
    let q = params(Family::Sqg, 3, 2.0, 0.0).scaling().unwrap();
    assert!(rel(q.c, 1.5) < 1e-15 && rel(q.tau_power(), 1.0) < 1e-15);
    assert!(!params(Family::Euler, 2, 2.0, 0.0).k_is_supercritical());
    assert!(params(Family::Euler, 3, 2.0, 0.0).k_is_supercritical());
    assert!(!params(Family::Sqg, 2, 2.0, 0.0).k_is_supercritical());
}

fn constant_series(family: Family, p: f64, f: impl Fn(f64) -> DiagnosticSample) -> DiagnosticSeries {
    let samples = (0..=50).map(|i| f(i as f64 / 50.0)).collect();
    DiagnosticSeries::new(SeriesMeta::new("synthetic", params(family, 3, p, 0.0)), samples).unwrap()
}

#[test]
fn time_integrals() {
    let s = constant_series(Family::Euler, 2.0, |t| DiagnosticSample {
        omega_linf: Some(2.5),
        ..DiagnosticSample::at(t)
    });
    assert!((bkm_integral(&s).unwrap() - 2.5).abs() < 1e-14);
    assert!(serrin_integral(&s, 2.0).is_err());

    let nu = 0.01;
    let p = 4.0;
    let v0 = 1.3;
    let s = constant_series(Family::NavierStokes, p, |t| DiagnosticSample {
        v_lp: Some(v0 * (-2.0 * nu * t).exp()),
        ..DiagnosticSample::at(t)
    });
    let e = 2.0 * p / (p - 2.0);
    let exact = v0.powf(e) * (1.0 - (-2.0 * nu * e).exp()) / (2.0 * nu * e);
    assert!(rel(serrin_integral(&s, p).unwrap(), exact) < 1e-5);
    assert!(serrin_integral(&s, 3.0).is_err());

    let one = DiagnosticSeries::new(
        SeriesMeta::new("synthetic", params(Family::Euler, 3, 2.0, 0.0)),
        vec![DiagnosticSample::at(0.0)],
    )
    .unwrap();
    assert!(bkm_integral(&one).is_err());
}

#[test]
fn euler_taylor_green_recording() {
    let g = g2(64);
    let s0 = Initial::TaylorGreen2d { amplitude: 1.0 }.state(Model::Euler2D, &g, 0.0).unwrap();
    let cfg = StepperConfig {
        t_end: 0.5,
        ..Default::default()
    };
    let mut meta = SeriesMeta::new("simulation", params(Family::Euler, 3, 4.0, 0.0));
    meta.seed = Some(1);
    let (series, status) = record_run(s0, &cfg, params(Family::Euler, 3, 4.0, 0.0), meta).unwrap();
    assert_eq!(status, crate::flow::RunStatus::Completed);
    for s in series.samples() {
        assert!(s.alpha_k.unwrap().abs() < 1e-8);
        assert!(s.lambda_p.is_none() && s.alpha_kp.is_none() && s.alpha_linf.is_none());
        assert!((s.omega_linf.unwrap() - 2.0).abs() < 1e-12);
    }
    assert!((bkm_integral(&series).unwrap() - 2.0 * 0.5).abs() < 1e-10);
    let x = series.column("x_scale").unwrap();
    assert!(x.iter().all(|v| rel(*v, x[0]) < 1e-10));
    assert!(series.column("alpha_kp").is_err());
}

#[test]
fn sqg_recording_has_sqg_columns() {
    let g = g2(32);
    let s0 = Initial::RandomSmooth(RandomSpec::new(3).with_cutoff(5.0))
        .state(Model::Sqg, &g, 0.0)
        .unwrap();
    let mut rec = Recorder::new(params(Family::Sqg, 3, 4.0, 0.0)).unwrap();
    crate::flow::run(s0, &StepperConfig { t_end: 0.05, ..Default::default() }, &mut rec).unwrap();
    let series = rec
        .into_series(SeriesMeta::new("simulation", params(Family::Sqg, 3, 4.0, 0.0)))
        .unwrap();
    assert!(series.has_column("alpha_kp") && series.has_column("alpha_linf"));
    assert!(!series.has_column("alpha_k") && !series.has_column("omega_linf"));
    let first = &series.samples()[0];
    let sc = params(Family::Sqg, 3, 4.0, 0.0).scaling().unwrap();
    let expect = first.dk_theta_lp.unwrap().powf(sc.a) * first.theta_lp.unwrap().powf(1.0 - sc.a);
    assert!(rel(first.x_scale.unwrap(), expect) < 1e-14);

    assert!(Recorder::new(params(Family::Sqg, 0, 4.0, 0.0)).is_err());
}

#[test]
fn csv_round_trip_keeps_absent_cells() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let s = constant_series(Family::Sqg, 4.0, |t| DiagnosticSample {
        alpha_kp: Some(0.1 + t / 3.0),
        x_scale: Some(1e-300 + t),
        ..DiagnosticSample::at(t)
    });
    s.save(&path).unwrap();
    let back = DiagnosticSeries::load(&path).unwrap();
    assert_eq!(back, s);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), COLUMNS.join(","));
    assert!(text.lines().nth(1).unwrap().contains(",,"));
    assert!(sidecar_path(&path).exists());

    std::fs::write(&path, "t,alpha_k\n0,1\n").unwrap();
    assert!(DiagnosticSeries::load(&path).is_err());
}

#[test]
fn series_rejects_unordered_times() {
    let meta = SeriesMeta::new("synthetic", params(Family::Euler, 3, 2.0, 0.0));
    let bad = vec![DiagnosticSample::at(0.0), DiagnosticSample::at(0.0)];
    assert!(DiagnosticSeries::new(meta, bad).is_err());
}

#[test]
fn small_constant_fit() {
    let cfg = FitConfig {
        n: 32,
        family_size: 6,
        ..Default::default()
    };
    let fitted = fit_constants(&cfg).unwrap();
    for v in fitted.to_map().values() {
        assert!(v.is_finite() && *v > 0.0);
    }
    assert!(rel(fitted.k_euler, 3.0 / (4.0 * fitted.c_kn)) < 1e-15);
    // the fit family itself never exceeds its own supremum
    let fit = family_ratios(&cfg, false).unwrap();
    assert!(fit.iter().all(|m| m.commutator.unwrap() <= fitted.commutator));
    let held = family_ratios(&cfg, true).unwrap();
    assert!(fit.iter().zip(&held).all(|(a, b)| a.seed != b.seed));
    assert_eq!(fit, family_ratios(&cfg, false).unwrap());
}
