//! Statistical checks of the subordinator and inverse-subordinator samplers.

use subdiff_core::special::gamma_fn;
use subdiff_core::subordinator::*;
use subdiff_core::RngStream;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// KS critical value at level 0.01.
fn ks_critical(n: usize, m: usize) -> f64 {
    1.628 * ((n + m) as f64 / (n * m) as f64).sqrt()
}

#[test]
fn stable_increment_is_positive() {
    for i in 0..1000 {
        let x = sample_stable_subordinator_increment(0.7, 1.0, RngStream::new(3, i)).unwrap();
        assert!(x > 0.0 && x.is_finite());
    }
    assert!(sample_stable_subordinator_increment(1.0, 1.0, RngStream::new(0, 0)).is_err());
    assert!(sample_stable_subordinator_increment(0.0, 1.0, RngStream::new(0, 0)).is_err());
    assert!(sample_stable_subordinator_increment(0.5, 0.0, RngStream::new(0, 0)).is_err());
}

#[test]
fn half_stable_median_matches_levy_law() {
    // For α = 1/2 the law has density x^{-3/2} e^{-1/(4x)} / (2√π), whose CDF is
    // erfc(1/(2√x)). Its median, found by bisection on that CDF:
    let cdf = |x: f64| libm::erfc(1.0 / (2.0 * x.sqrt()));
    let (mut lo, mut hi) = (0.1, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let median = 0.5 * (lo + hi);
    assert!((median - 1.0990).abs() < 1e-4);

    let n = 100_000;
    let mut xs: Vec<f64> = (0..n)
        .map(|i| sample_stable_subordinator_increment(0.5, 1.0, RngStream::new(11, i)).unwrap())
        .collect();
    xs.sort_by(f64::total_cmp);
    let sample_median = xs[n as usize / 2];
    // SE of a sample median: 1 / (2 f(m) √n)
    let density =
        (-1.0 / (4.0 * median)).exp() / (2.0 * std::f64::consts::PI.sqrt() * median.powf(1.5));
    let se = 1.0 / (2.0 * density * (n as f64).sqrt());
    assert!(
        (sample_median - median).abs() < 4.0 * se,
        "{sample_median} vs {median} (se {se})"
    );
}

#[test]
fn stable_increment_self_similar() {
    let n = 20_000;
    let scale = 8f64.powf(1.0 / 0.7);
    let mut scaled: Vec<f64> = (0..n)
        .map(|i| {
            scale * sample_stable_subordinator_increment(0.7, 1.0, RngStream::new(23, i)).unwrap()
        })
        .collect();
    let mut direct: Vec<f64> = (0..n)
        .map(|i| sample_stable_subordinator_increment(0.7, 8.0, RngStream::new(24, i)).unwrap())
        .collect();
    let d = ks_statistic(&mut scaled, &mut direct);
    assert!(d < ks_critical(n as usize, n as usize), "KS statistic {d}");
}

#[test]
fn tempered_increment_mean_and_positivity() {
    let n = 100_000;
    let xs: Vec<f64> = (0..n)
        .map(|i| sample_tempered_increment(0.7, 1.0, 1.0, RngStream::new(31, i)).unwrap())
        .collect();
    assert!(xs.iter().all(|&x| x > 0.0));
    let (mean, se) = mean_and_se(&xs);
    // ψ'(0) = α λ^{α-1} dt
    assert!((mean - 0.7).abs() < 3.0 * se, "mean {mean} se {se}");
}

#[test]
fn tempered_increment_with_long_step_splits_rejection() {
    // dt λ^α = 20: a single rejection step would accept with probability e^-20.
    let n = 20_000;
    let xs: Vec<f64> = (0..n)
        .map(|i| sample_tempered_increment(0.6, 1.0, 20.0, RngStream::new(32, i)).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&xs);
    assert!((mean - 0.6 * 20.0).abs() < 3.0 * se, "mean {mean} se {se}");
}

#[test]
fn tempered_tends_to_stable_as_lambda_vanishes() {
    let n = 20_000;
    let mut tempered: Vec<f64> = (0..n)
        .map(|i| sample_tempered_increment(0.7, 1e-9, 1.0, RngStream::new(41, i)).unwrap())
        .collect();
    let mut stable: Vec<f64> = (0..n)
        .map(|i| sample_stable_subordinator_increment(0.7, 1.0, RngStream::new(42, i)).unwrap())
        .collect();
    let d = ks_statistic(&mut tempered, &mut stable);
    assert!(d < ks_critical(n as usize, n as usize), "KS statistic {d}");
    assert_eq!(
        LaplaceExponentSpec::tempered(0.7, 0.0).unwrap().family(),
        Family::AlphaStable
    );
    assert!(sample_tempered_increment(0.7, 0.0, 1.0, RngStream::new(0, 0)).is_err());
}

#[test]
fn identity_clock_is_exact() {
    let id = LaplaceExponentSpec::identity();
    for &t in &[0.1, 1.0, 2.0, 17.25] {
        assert_eq!(
            sample_inverse_at(&id, t, 0.3, RngStream::new(1, 2)).unwrap(),
            t
        );
    }
    let p = sample_inverse_path(&id, &[0.0, 0.5, 1.0], 0.01, RngStream::new(0, 0)).unwrap();
    assert_eq!(p.values, [0.0, 0.5, 1.0]);
}

#[test]
fn inverse_moments_match_closed_form() {
    // Each (α, t) cell shares its draws across the three moment orders.
    let m = 20_000;
    for &alpha in &[0.5, 0.7, 0.9] {
        let spec = LaplaceExponentSpec::stable(alpha).unwrap();
        for &t in &[0.5, 1.0, 2.0] {
            let delta = default_delta(&spec, t);
            let draws: Vec<f64> = (0..m)
                .map(|i| sample_inverse_at(&spec, t, delta, RngStream::new(51, i)).unwrap())
                .collect();
            for &k in &[1.0, 1.5, 2.0] {
                let powered: Vec<f64> = draws.iter().map(|s| s.powf(k)).collect();
                let (mean, se) = mean_and_se(&powered);
                let exact = inverse_moment(alpha, k, t).unwrap();
                assert!(
                    (mean - exact).abs() < 3.0 * se,
                    "alpha={alpha} t={t} k={k}: {mean} vs {exact} (se {se})"
                );
            }
        }
    }
}

#[test]
fn inverse_moment_reference_values() {
    assert!((inverse_moment(1.0, 1.0, 3.0).unwrap() - 3.0).abs() < 1e-14);
    let g17 = gamma_fn(1.7).unwrap();
    assert!((inverse_moment(0.7, 1.0, 1.0).unwrap() - 1.0 / g17).abs() < 1e-14);
    assert!((1.0 / g17 - 1.10055).abs() < 1e-5);
    let expected = 2f64.powf(1.05) * gamma_fn(2.5).unwrap() / gamma_fn(2.05).unwrap();
    assert!((inverse_moment(0.7, 1.5, 2.0).unwrap() - expected).abs() < 1e-13);
    assert!((inverse_moment(0.5, 2.0, 1.0).unwrap() - 2.0).abs() < 1e-14);
    assert!(inverse_moment(0.0, 1.0, 1.0).is_err());
    assert!(inverse_moment(0.5, 0.0, 1.0).is_err());
    assert!(inverse_moment(0.5, 1.0, 0.0).is_err());
}

#[test]
fn path_mean_curve_follows_power_law() {
    let spec = LaplaceExponentSpec::stable(0.7).unwrap();
    let grid: Vec<f64> = (1..=1000).map(|j| j as f64 / 1000.0).collect();
    let delta = default_delta(&spec, 1.0);
    let paths = 10_000;
    let mut sum = vec![0.0; grid.len()];
    let mut sum_sq = vec![0.0; grid.len()];
    for i in 0..paths {
        let p = sample_inverse_path(&spec, &grid, delta, RngStream::new(61, i)).unwrap();
        assert!(p.is_nondecreasing());
        for (j, v) in p.values.iter().enumerate() {
            sum[j] += v;
            sum_sq[j] += v * v;
        }
    }
    let n = paths as f64;
    let g17 = gamma_fn(1.7).unwrap();
    for (j, &t) in grid.iter().enumerate() {
        let mean = sum[j] / n;
        let se = ((sum_sq[j] / n - mean * mean) * n / (n - 1.0) / n).sqrt();
        let exact = t.powf(0.7) / g17;
        // The staircase sits in [S - δ, S], so its mean lies in [E S - δ, E S].
        assert!(
            mean > exact - delta - 3.0 * se && mean < exact + 3.0 * se,
            "t={t}: {mean} vs {exact} (se {se}, delta {delta})"
        );
    }
}

#[test]
fn staircase_refinement_sandwich() {
    for (seed, &alpha) in [0.5, 0.7, 0.9].iter().enumerate() {
        let spec = LaplaceExponentSpec::stable(alpha).unwrap();
        let fine = SubordinatorPath::sample(&spec, 0.0005, 20_000, RngStream::new(seed as u64, 0))
            .unwrap();
        assert_eq!(fine.values[0], 0.0);
        assert!(fine.values.windows(2).all(|w| w[1] > w[0]));
        let coarse = fine.coarsen(2);
        let top = *coarse.values.last().unwrap();
        for j in 0..200 {
            let t = top * j as f64 / 200.0;
            let (Some(c), Some(f)) = (coarse.inverse_at(t), fine.inverse_at(t)) else {
                continue;
            };
            assert!(f >= c && f <= c + coarse.step, "t={t}: coarse {c} fine {f}");
        }
    }
}

#[test]
fn path_and_first_passage_share_the_driving_noise() {
    let spec = LaplaceExponentSpec::stable(0.6).unwrap();
    let delta = 1e-3;
    let rng = RngStream::new(5, 77);
    let path = SubordinatorPath::sample(&spec, delta, 200_000, rng).unwrap();
    let direct = sample_inverse_at(&spec, 1.0, delta, rng).unwrap();
    assert_eq!(path.inverse_at(1.0), Some(direct));
    let along = sample_inverse_path(&spec, &[0.25, 0.5, 1.0], delta, rng).unwrap();
    assert_eq!(along.terminal(), direct);
    assert_eq!(along.values[0], path.inverse_at(0.25).unwrap());
}

#[test]
fn step_cap_is_reported() {
    let spec = LaplaceExponentSpec::stable(0.7).unwrap();
    let scheme = Staircase::new(1e-6).unwrap().with_max_steps(100);
    let err = scheme
        .inverse_at(&spec, 10.0, &mut RngStream::new(0, 0).sampler())
        .unwrap_err();
    assert!(matches!(
        err,
        subdiff_core::Error::StepLimit { limit: 100, .. }
    ));
}

#[test]
fn invalid_inputs() {
    let spec = LaplaceExponentSpec::stable(0.7).unwrap();
    assert!(sample_inverse_at(&spec, 0.0, 0.1, RngStream::new(0, 0)).is_err());
    assert!(sample_inverse_at(&spec, 1.0, 0.0, RngStream::new(0, 0)).is_err());
    assert!(sample_inverse_path(&spec, &[], 0.1, RngStream::new(0, 0)).is_err());
    assert!(sample_inverse_path(&spec, &[0.5, 0.5], 0.1, RngStream::new(0, 0)).is_err());
    assert!(sample_inverse_path(&spec, &[-0.1, 0.5], 0.1, RngStream::new(0, 0)).is_err());
    assert!(LaplaceExponentSpec::stable(1.0).is_err());
    assert!(LaplaceExponentSpec::tempered(0.5, -1.0).is_err());
    assert_eq!(
        LaplaceExponentSpec::from_alpha(1.0).unwrap().family(),
        Family::Identity
    );
}

#[test]
fn laplace_exponents() {
    let s = LaplaceExponentSpec::stable(0.5).unwrap();
    assert!((s.laplace_exponent(4.0) - 2.0).abs() < 1e-15);
    let t = LaplaceExponentSpec::tempered(0.5, 1.0).unwrap();
    assert!((t.laplace_exponent(3.0) - 1.0).abs() < 1e-15);
    assert_eq!(LaplaceExponentSpec::identity().laplace_exponent(2.5), 2.5);
}
