//! Classical water-filling oracle: sorted closed form over scalar gains.

/// Power allocation `p_i = max(0, w − 1/g_i)` with `Σ p_i = budget`,
/// returned alongside the water level `w`. Gains may come in any order;
/// non-positive gains receive nothing.
pub fn allocate(gains: &[f64], budget: f64) -> (Vec<f64>, f64) {
    assert!(budget > 0.0);
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&i, &j| gains[j].partial_cmp(&gains[i]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| gains[i]).collect();

    let mut level = 0.0;
    let mut active = 0;
    let mut inv_sum = 0.0;
    for k in 0..sorted.len() {
        if sorted[k] <= 0.0 {
            break;
        }
        inv_sum += 1.0 / sorted[k];
        let candidate = (budget + inv_sum) / (k + 1) as f64;
        // Valid when every active gain still clears the level.
        if candidate >= 1.0 / sorted[k] {
            level = candidate;
            active = k + 1;
        }
    }
    let mut alloc = vec![0.0; gains.len()];
    for k in 0..active {
        alloc[order[k]] = level - 1.0 / sorted[k];
    }
    (alloc, level)
}

/// Capacity `Σ log2(1 + g_i p_i)` of the water-filling allocation.
pub fn capacity_bits(gains: &[f64], budget: f64) -> f64 {
    let (alloc, _) = allocate(gains, budget);
    gains
        .iter()
        .zip(alloc.iter())
        .map(|(&g, &p)| (1.0 + g * p).log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_is_exhausted() {
        let gains = [3.0, 1.0, 0.2];
        let (alloc, _) = allocate(&gains, 2.0);
        let total: f64 = alloc.iter().sum();
        assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weak_mode_gets_nothing() {
        let gains = [10.0, 0.01];
        let (alloc, level) = allocate(&gains, 0.5);
        assert!(alloc[1] == 0.0);
        assert!(level < 1.0 / 0.01);
    }

    #[test]
    fn equal_gains_split_evenly() {
        let gains = [2.0, 2.0, 2.0];
        let (alloc, _) = allocate(&gains, 3.0);
        for &p in &alloc {
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_gain_closed_form() {
        let c = capacity_bits(&[4.0], 2.0);
        assert!((c - (1.0f64 + 8.0).log2()).abs() < 1e-12);
    }
}
