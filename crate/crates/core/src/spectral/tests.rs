use std::f64::consts::PI;

use proptest::prelude::*;

use super::*;

fn g2(n: usize) -> Grid {
    Grid::new(2, n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn rand2(n: usize, seed: u64) -> Field {
    random_scalar(&g2(n), &RandomSpec::new(seed).with_cutoff(6.0)).unwrap()
}

#[test]
fn round_trip_random_field() {
    let f = rand2(32, 11);
    let back = inverse(&transform(&f).unwrap());
    assert!(back.max_abs_diff(&f).unwrap() <= 1e-12 * f.max_abs());
    assert!(transform(&f).unwrap().hermitian_defect() < 1e-15);
}

#[test]
fn derivative_examples() {
    let g = g2(32);
    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    let c = Field::scalar_from_fn(g, |x| x[0].cos());
    assert!(derivative(&s, &[1, 0]).unwrap().max_abs_diff(&c).unwrap() < 1e-12);

    let k = Field::scalar_from_fn(g, |_| 2.5);
    assert!(derivative(&k, &[1, 1]).unwrap().max_abs() < 1e-14);

    let s3 = Field::scalar_from_fn(g, |x| (3.0 * x[0]).sin());
    let expect = s3.scaled(-9.0);
    assert!(derivative(&s3, &[2, 0]).unwrap().max_abs_diff(&expect).unwrap() < 1e-10);
    assert!(derivative(&s3, &[2]).is_err());
}

#[test]
fn seminorm_examples() {
    let g = g2(32);
    let f = rand2(32, 3);
    assert!(rel(dk_seminorm_l2(&f, 0).unwrap(), lp_norm(&f, 2.0).unwrap()) < 1e-12);

    for m in [1.0, 2.0, 5.0] {
        let s = Field::scalar_from_fn(g, |x| (m * x[0]).sin());
        let base = lp_norm(&s, 2.0).unwrap();
        for k in 0..5 {
            let got = dk_seminorm_l2(&s, k).unwrap();
            assert!(rel(got, m.powi(k as i32) * base) < 1e-12, "m={m} k={k}");
        }
    }
    let a = -3.5;
    assert!(rel(dk_seminorm_l2(&f.scaled(a), 3).unwrap(), a.abs() * dk_seminorm_l2(&f, 3).unwrap()) < 1e-12);
}

#[test]
fn dk_tensor_examples() {
    let g = g2(32);
    let f = rand2(32, 5);
    let t1 = dk_tensor(&f, 1).unwrap();
    let grad = gradient(&f).unwrap();
    assert_eq!(t1.components(), 2);
    // lexicographically descending order puts ∂₁ first
    assert!(t1.max_abs_diff(&grad).unwrap() < 1e-13);

    for k in 1..=4 {
        let t = dk_tensor(&f, k).unwrap();
        let quad = lp_norm(&t, 2.0).unwrap();
        assert!(rel(quad, dk_seminorm_l2(&f, k).unwrap()) < 1e-10, "k={k}");
    }

    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    let mag = dk_tensor(&s, 2).unwrap().magnitude();
    for (i, m) in mag.iter().enumerate() {
        assert!((m - g.point(i)[0].sin().abs()).abs() < 1e-12);
    }
    assert!(dk_tensor(&s, 0).is_err());
}

#[test]
fn multinomial_identity() {
    // Σ_{|β|=k} (k!/β!) ξ^{2β} = |ξ|^{2k}
    let xi: [f64; 3] = [0.7, -1.3, 2.1];
    for dim in [2, 3] {
        for k in 1..=6 {
            let lhs: f64 = multi_indices(dim, k)
                .iter()
                .map(|b| {
                    multinomial(b) * b.iter().enumerate().map(|(d, &e)| xi[d].powi(2 * e as i32)).product::<f64>()
                })
                .sum();
            let r2: f64 = xi[..dim].iter().map(|x| x * x).sum();
            assert!(rel(lhs, r2.powi(k as i32)) < 1e-12);
        }
    }
}

#[test]
fn lp_norm_examples() {
    for dim in [2, 3] {
        let g = Grid::new(dim, 8).unwrap();
        let c = Field::scalar_from_fn(g, |_| -2.0);
        for p in [1.0, 2.0, 3.5] {
            let expect = 2.0 * (2.0 * PI).powf(dim as f64 / p);
            assert!(rel(lp_norm(&c, p).unwrap(), expect) < 1e-12);
        }
    }
    let g = g2(16);
    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    assert!(rel(lp_norm(&s, 2.0).unwrap(), (2.0 * PI * PI).sqrt()) < 1e-12);
    assert!((lp_norm(&s, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
    assert!(lp_norm(&s, 0.5).is_err());
}

#[test]
fn interpolant_max_is_grid_independent() {
    let g = g2(16);
    let f = Field::scalar_from_fn(g, |x| 2.0 * (x[0] - 0.3).cos() * (x[1] + 0.11).cos());
    assert!(f.max_abs() < 1.99);
    assert!((max_abs_interpolant(&f).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn riesz_examples() {
    let g = g2(32);
    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    let c = Field::scalar_from_fn(g, |x| x[0].cos());
    assert!(riesz(&s, 0).unwrap().max_abs_diff(&c).unwrap() < 1e-13);
    assert!(riesz(&s, 1).unwrap().max_abs() < 1e-14);
    let k = Field::scalar_from_fn(g, |_| 4.0);
    assert!(riesz(&k, 0).unwrap().max_abs() < 1e-15);
    assert!(inv_sqrt_laplacian(&k).unwrap().max_abs() < 1e-15);

    let f = rand2(32, 8);
    let mut acc = Field::zeros(g, 1);
    for j in 0..2 {
        acc = acc.axpy(1.0, &riesz(&riesz(&f, j).unwrap(), j).unwrap()).unwrap();
    }
    assert!(acc.axpy(1.0, &f).unwrap().max_abs() < 1e-10);
    assert!(riesz(&f, 2).is_err());
}

#[test]
fn biot_savart_examples() {
    let g = g2(32);
    let w = Field::scalar_from_fn(g, |x| 2.0 * x[0].sin() * x[1].sin());
    let v = biot_savart_2d(&w).unwrap();
    assert!(curl_2d(&v).unwrap().max_abs_diff(&w).unwrap() < 1e-10);
    // ψ = −sin x₁ sin x₂, v = (sin x₁ cos x₂, −cos x₁ sin x₂)
    let expect = Field::vector_from_fn(g, |x| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0]);
    assert!(v.max_abs_diff(&expect).unwrap() < 1e-13);

    assert!(biot_savart_2d(&Field::zeros(g, 1)).unwrap().max_abs() == 0.0);

    let r = rand2(32, 21);
    let vr = biot_savart_2d(&r).unwrap();
    assert!(divergence(&vr).unwrap().max_abs() <= 1e-10);

    let shifted = Field::scalar_from_fn(g, |x| 1.0 + x[0].sin());
    assert!(matches!(biot_savart_2d(&shifted), Err(crate::Error::NonzeroMean { .. })));
}

#[test]
fn leray_examples() {
    let g = g2(32);
    let phi = rand2(32, 4);
    let grad = gradient(&phi).unwrap();
    assert!(leray_project(&grad).unwrap().max_abs() < 1e-12);

    let u = random_velocity(&g, &RandomSpec::new(9).with_cutoff(6.0)).unwrap();
    assert!(leray_project(&u).unwrap().max_abs_diff(&u).unwrap() < 1e-12);

    let mixed = u.axpy(1.0, &grad).unwrap();
    let once = leray_project(&mixed).unwrap();
    let twice = leray_project(&once).unwrap();
    assert!(twice.max_abs_diff(&once).unwrap() < 1e-12);
    assert!(once.max_abs_diff(&u).unwrap() < 1e-12);
}

#[test]
fn perp_gradient_examples() {
    let g = g2(16);
    let s = Field::scalar_from_fn(g, |x| x[0].sin());
    let expect = Field::vector_from_fn(g, |x| [0.0, x[0].cos(), 0.0]);
    assert!(perp_gradient(&s).unwrap().max_abs_diff(&expect).unwrap() < 1e-13);
    assert!(perp_gradient(&Field::scalar_from_fn(g, |_| 3.0)).unwrap().max_abs() < 1e-15);
    let r = rand2(32, 2);
    assert!(divergence(&perp_gradient(&r).unwrap()).unwrap().max_abs() < 1e-12);
}

#[test]
fn pressure_taylor_green() {
    let g = g2(32);
    let v = Field::vector_from_fn(g, |x| [x[0].cos() * x[1].sin(), -x[0].sin() * x[1].cos(), 0.0]);
    let p = pressure_from_velocity(&v).unwrap();
    let expect = Field::scalar_from_fn(g, |x| -((2.0 * x[0]).cos() + (2.0 * x[1]).cos()) / 4.0);
    assert!(p.max_abs_diff(&expect).unwrap() < 1e-8);
    assert!(pressure_from_velocity(&Field::zeros(g, 2)).unwrap().max_abs() == 0.0);
}

#[test]
fn pressure_poisson_residual() {
    for dim in [2, 3] {
        let n = if dim == 2 { 64 } else { 16 };
        let g = Grid::new(dim, n).unwrap();
        let v = random_velocity(&g, &RandomSpec::new(17).with_cutoff(if dim == 2 { 8.0 } else { 2.5 })).unwrap();
        let p = pressure_from_velocity(&v).unwrap();
        let mut lap = Field::zeros(g, 1);
        let mut divdiv = Field::zeros(g, 1);
        for j in 0..dim {
            let mut b = vec![0; dim];
            b[j] = 2;
            lap = lap.axpy(1.0, &derivative(&p, &b).unwrap()).unwrap();
            for k in 0..dim {
                let prod: Vec<f64> = v.component(j).iter().zip(v.component(k)).map(|(a, c)| a * c).collect();
                let pf = Field::new(g, 1, prod).unwrap();
                let mut b = vec![0; dim];
                b[j] += 1;
                b[k] += 1;
                divdiv = divdiv.axpy(1.0, &derivative(&pf, &b).unwrap()).unwrap();
            }
        }
        let resid = lap.axpy(1.0, &divdiv).unwrap().max_abs();
        assert!(resid <= 1e-8, "dim {dim}: {resid}");
    }
}

#[test]
fn dealias_examples() {
    for n in [16usize, 32, 64, 128] {
        let g = g2(n);
        let full = Spectrum::from_parts(g, 1, vec![num_complex::Complex64::new(1.0, 0.0); g.len()]);
        let cut = dealias(&full);
        let survivors = cut.component(0).iter().filter(|z| z.norm() > 0.0).count();
        let per_axis = 2 * (n / 3) + 1;
        assert_eq!(survivors, per_axis * per_axis, "n={n}");
        if n % 3 == 2 {
            assert_eq!(per_axis, 2 * n / 3);
        }
        assert_eq!(dealias(&cut), cut);
    }

    // e^{i m x}·e^{i m x} with m = n/2 − 1 lands on frequency 2m − n = −2 on the grid.
    let n = 32;
    let g = g2(n);
    let m = (n / 2 - 1) as f64;
    let a = Field::scalar_from_fn(g, |x| (m * x[0]).cos());
    let prod = Field::new(g, 1, a.values().iter().map(|v| v * v).collect()).unwrap();
    let raw = transform(&prod).unwrap();
    // exact convolution: cos² = 1/2 + cos(2m x)/2, so 2m = n − 2 is unrepresentable
    assert!((raw.at(0, [-2, 0, 0]).unwrap().re - 0.25).abs() < 1e-14);
    let a_cut = inverse(&dealias(&transform(&a).unwrap()));
    assert!(a_cut.max_abs() < 1e-14);
    let prod_cut = Field::new(g, 1, a_cut.values().iter().map(|v| v * v).collect()).unwrap();
    assert!(transform(&prod_cut).unwrap().at(0, [-2, 0, 0]).unwrap().norm() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn plancherel(seed in 0u64..10_000, dim in 2usize..=3) {
        let g = Grid::new(dim, 16).unwrap();
        let f = random_scalar(&g, &RandomSpec::new(seed).with_cutoff(4.0)).unwrap();
        let s = transform(&f).unwrap();
        let spec: f64 = s.component(0).iter().map(|z| z.norm_sqr()).sum::<f64>() * g.volume();
        prop_assert!(rel(lp_norm(&f, 2.0).unwrap().powi(2), spec) < 1e-10);
    }

    #[test]
    fn seminorm_matches_tensor(seed in 0u64..10_000, k in 1usize..=5, dim in 2usize..=3) {
        let g = Grid::new(dim, 16).unwrap();
        let f = random_velocity(&g, &RandomSpec::new(seed).with_cutoff(4.0)).unwrap();
        let t = dk_tensor(&f, k).unwrap();
        prop_assert!(rel(lp_norm(&t, 2.0).unwrap(), dk_seminorm_l2(&f, k).unwrap()) < 1e-10);
    }

    #[test]
    fn leray_output_divergence_free(seed in 0u64..10_000, dim in 2usize..=3) {
        let g = Grid::new(dim, 16).unwrap();
        let parts: Vec<Field> = (0..dim)
            .map(|c| random_scalar(&g, &RandomSpec::new(seed + 100 * c as u64).with_cutoff(5.0)).unwrap())
            .collect();
        let u = Field::stack(&parts).unwrap();
        let p = leray_project(&u).unwrap();
        prop_assert!(divergence(&p).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn biot_savart_then_curl_is_identity(seed in 0u64..10_000) {
        let w = rand2(32, seed);
        let v = biot_savart_2d(&w).unwrap();
        prop_assert!(curl_2d(&v).unwrap().max_abs_diff(&w).unwrap() <= 1e-10);
    }

    #[test]
    fn riesz_commutes_with_derivative(seed in 0u64..10_000, j in 0usize..2, a in 0usize..3, b in 0usize..3) {
        let f = rand2(32, seed);
        let lhs = riesz(&derivative(&f, &[a, b]).unwrap(), j).unwrap();
        let rhs = derivative(&riesz(&f, j).unwrap(), &[a, b]).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-10 * (1.0 + rhs.max_abs()));
    }
}
