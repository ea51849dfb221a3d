//! Paired-sample statistics for the ordering checks.

/// Mean and standard error of a sample.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2);
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// One-sided paired t-test of `H0: mean(a − b) ≤ 0` against `mean > 0` at
/// the 5% level. Returns `(mean_diff, t_statistic, reject_h0)`.
pub fn paired_one_sided_t(a: &[f64], b: &[f64]) -> (f64, f64, bool) {
    assert_eq!(a.len(), b.len());
    let diffs: Vec<f64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
    let (mean, stderr) = mean_stderr(&diffs);
    if stderr == 0.0 {
        // Degenerate paired samples: the sign of the mean decides.
        return (mean, f64::INFINITY * mean.signum(), mean > 0.0);
    }
    let t = mean / stderr;
    let crit = t_critical_95(diffs.len() - 1);
    (mean, t, t > crit)
}

/// Upper 95% quantile of Student's t, interpolated in 1/df over a fixed
/// table; adequate for the sample sizes used here.
pub fn t_critical_95(df: usize) -> f64 {
    const TABLE: [(f64, f64); 9] = [
        (1.0, 6.314),
        (2.0, 2.920),
        (5.0, 2.015),
        (10.0, 1.812),
        (20.0, 1.725),
        (30.0, 1.697),
        (50.0, 1.676),
        (100.0, 1.660),
        (1e12, 1.645),
    ];
    let df = df.max(1) as f64;
    let x = 1.0 / df;
    for w in TABLE.windows(2) {
        let (d0, t0) = w[0];
        let (d1, t1) = w[1];
        if df >= d0 && df <= d1 {
            let x0 = 1.0 / d0;
            let x1 = 1.0 / d1;
            return t1 + (t0 - t1) * (x - x1) / (x0 - x1);
        }
    }
    1.645
}

/// Median of a sample.
pub fn median(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    assert!(n > 0);
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_critical_matches_table_points() {
        assert!((t_critical_95(10) - 1.812).abs() < 1e-9);
        assert!((t_critical_95(49) - 1.676).abs() < 0.01);
        assert!(t_critical_95(1_000_000) < 1.646);
    }

    #[test]
    fn obvious_difference_rejects() {
        let a: Vec<f64> = (0..30).map(|i| 10.0 + (i % 3) as f64 * 0.1).collect();
        let b: Vec<f64> = (0..30).map(|i| 1.0 + (i % 5) as f64 * 0.1).collect();
        let (mean, _, reject) = paired_one_sided_t(&a, &b);
        assert!(mean > 0.0 && reject);
    }

    #[test]
    fn symmetric_noise_does_not_reject() {
        let a: Vec<f64> = (0..40).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let b = vec![0.0; 40];
        let (_, _, reject) = paired_one_sided_t(&a, &b);
        assert!(!reject);
    }
}
