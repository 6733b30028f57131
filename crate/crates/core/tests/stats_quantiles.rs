use sdrforge::stats::{mean_ci, t_quantile};

/// Simpson's rule on `[a, b]` with `n` (even) intervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// t CDF via `x = √ν tan θ`, which turns the density into `cos^(ν-1) θ`.
fn t_cdf(t: f64, dof: f64) -> f64 {
    let g = |th: f64| th.cos().powf(dof - 1.0);
    let total = simpson(g, 0.0, std::f64::consts::FRAC_PI_2, 4000);
    let part = simpson(g, 0.0, (t.abs() / dof.sqrt()).atan(), 4000);
    0.5 + t.signum() * 0.5 * part / total
}

fn bisect_quantile(p: f64, dof: f64) -> f64 {
    let (mut lo, mut hi) = (-1e4, 1e4);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if t_cdf(mid, dof) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn quantiles_match_numerical_integration() {
    for dof in 1..=30 {
        for p in [0.9, 0.95, 0.975, 0.995, 0.1, 0.025] {
            let reference = bisect_quantile(p, dof as f64);
            let got = t_quantile(p, dof as f64);
            assert!((got - reference).abs() < 1e-4, "dof {dof} p {p}: {got} vs {reference}");
        }
    }
}

#[test]
fn half_width_fixture_from_integrated_quantile() {
    let xs = [1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0];
    let s = mean_ci(&xs, 0.95).unwrap();
    let sd = (xs.iter().map(|x| (x - 1.125f64).powi(2)).sum::<f64>() / 7.0).sqrt();
    let expect = bisect_quantile(0.975, 7.0) * sd / 8f64.sqrt();
    assert!((s.ci_half_width.unwrap() - expect).abs() < 1e-6);
    assert!((expect - 0.2956).abs() < 1e-3);
}
