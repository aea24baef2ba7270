use oet_core::channel::{draw_trace, SeedSpec, TrialStream};

const SEED: u64 = 0x0E7_5EED;

fn draws(count: u64) -> Vec<f64> {
    (0..count)
        .map(|t| draw_trace(SeedSpec::new(SEED, t), 1).unwrap().play_order()[0])
        .collect()
}

#[test]
fn mean_and_tail() {
    let xs = draws(1_000_000);
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    assert!((mean - 1.0).abs() < 0.003, "mean {mean}");
    let tail = xs.iter().filter(|&&x| x > 1.0).count() as f64 / xs.len() as f64;
    assert!((tail - (-1.0f64).exp()).abs() < 0.0015, "tail {tail}");
    assert!(xs.iter().all(|x| x.is_finite() && *x >= 0.0));
}

#[test]
fn kolmogorov_smirnov() {
    let mut xs = draws(100_000);
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x).exp();
            (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample KS statistic
    let critical = 1.628 / n.sqrt();
    assert!(d < critical, "D = {d}, critical {critical}");
}

#[test]
fn neighbouring_substreams_uncorrelated() {
    let count = 100_000;
    let (mut a, mut b) = (Vec::with_capacity(count), Vec::with_capacity(count));
    for i in 0..count as u64 {
        a.push(draw_trace(SeedSpec::new(SEED, 2 * i), 1).unwrap().play_order()[0]);
        b.push(draw_trace(SeedSpec::new(SEED, 2 * i + 1), 1).unwrap().play_order()[0]);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(&a), mean(&b));
    let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    let r = cov / (va * vb).sqrt();
    assert!(r.abs() < 0.01, "correlation {r}");
}

#[test]
fn frames_within_a_trace_are_independent_draws() {
    let mut s = TrialStream::new(SeedSpec::new(SEED, 0));
    let t = s.draw_trace(200_000).unwrap();
    let g = t.play_order();
    let m = g.iter().sum::<f64>() / g.len() as f64;
    assert!((m - 1.0).abs() < 0.007);
    let lag1: f64 =
        g.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    assert!(lag1.abs() < 0.01);
}
