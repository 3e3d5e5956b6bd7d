//! Pearson and Spearman correlation with average-rank tie handling.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
}

impl StatsError {
    pub fn category(&self) -> &'static str {
        "degenerate-input"
    }
}

/// Pearson product-moment correlation.
///
/// Requires two equal-length lists of at least two values, each with nonzero
/// variance. The result is clamped to `[-1, 1]` to absorb rounding.
pub fn pearson_correlation(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::DegenerateInput("length mismatch"));
    }
    if xs.len() < 2 {
        return Err(StatsError::DegenerateInput("fewer than two observations"));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        return Err(StatsError::DegenerateInput("zero variance"));
    }
    Ok((cov / (var_x * var_y).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank-order correlation: Pearson correlation of the rank vectors,
/// with ties receiving average ranks. With no ties this equals
/// `1 - 6*sum(d^2) / (n*(n^2-1))`.
pub fn spearman_correlation(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::DegenerateInput("length mismatch"));
    }
    pearson_correlation(&average_ranks(xs), &average_ranks(ys))
}

/// 1-based ranks; tied values share the mean of the ranks they would occupy.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN in rank input"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // Positions i..j hold a tie group; ranks are 1-based.
        let avg = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_perfect_linear() {
        assert_eq!(
            pearson_correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(),
            1.0
        );
        assert_eq!(
            pearson_correlation(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(),
            -1.0
        );
    }

    #[test]
    fn pearson_hand_value() {
        // Closed-form evaluation: cov = 4, var_x = var_y = 5 => r = 0.8.
        let r = pearson_correlation(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn pearson_rejects_degenerate_inputs() {
        assert!(pearson_correlation(&[1.0], &[2.0]).is_err());
        assert!(pearson_correlation(&[1.0, 2.0], &[5.0, 5.0]).is_err());
        assert!(pearson_correlation(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn spearman_identity() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman_correlation(&xs, &xs).unwrap(), 1.0);
    }

    #[test]
    fn spearman_matches_no_ties_formula() {
        // d^2 sums hand-checked: 1 - 6*sum(d^2)/(n(n^2-1)).
        let bk: Vec<f64> = (1..=11).map(|r| r as f64).collect();
        let bnc = [4.0, 1.0, 2.0, 3.0, 10.0, 5.0, 6.0, 8.0, 11.0, 9.0, 7.0];
        let rho = spearman_correlation(&bk, &bnc).unwrap();
        assert!((rho - (1.0 - 6.0 * 60.0 / (11.0 * 120.0))).abs() < 1e-12);
    }

    #[test]
    fn average_ranks_handle_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 30.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
    }
}
