//! Savitzky–Golay smoothing.

use crate::error::{Error, Result};

/// Default window length used for plotted series.
pub const DEFAULT_WINDOW: usize = 11;
/// Default polynomial order used for plotted series.
pub const DEFAULT_ORDER: usize = 2;

/// Least-squares polynomial smoothing over a centered window. Near the ends
/// the window is truncated to the available samples and the fit order is
/// reduced if fewer than `order + 1` points remain. Series shorter than the
/// window are returned unchanged.
pub fn savgol_smooth(series: &[f64], window: usize, order: usize) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("window must be odd and positive, got {window}")));
    }
    if order >= window {
        return Err(Error::InvalidArgument(format!("order {order} must be below window {window}")));
    }
    let n = series.len();
    if n < window {
        return Ok(series.to_vec());
    }
    let half = window / 2;
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let deg = order.min(hi - lo);
            fit_at_zero(&series[lo..=hi], lo as f64 - i as f64, deg)
        })
        .collect())
}

/// Value at abscissa 0 of the degree-`deg` least-squares polynomial through
/// `ys` placed at `t0, t0+1, ...`.
fn fit_at_zero(ys: &[f64], t0: f64, deg: usize) -> f64 {
    let m = deg + 1;
    let mut a = vec![vec![0.0; m + 1]; m];
    for (j, &y) in ys.iter().enumerate() {
        let t = t0 + j as f64;
        let mut pows = vec![1.0; 2 * m];
        for k in 1..2 * m {
            pows[k] = pows[k - 1] * t;
        }
        for r in 0..m {
            for c in 0..m {
                a[r][c] += pows[r + c];
            }
            a[r][m] += pows[r] * y;
        }
    }
    // Gaussian elimination with partial pivoting on the normal equations.
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            for c in col..=m {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut coef = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * coef[c]).sum();
        coef[r] = (a[r][m] - s) / a[r][r];
    }
    coef[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_quadratics_exactly() {
        let ys: Vec<f64> = (0..30).map(|i| 0.5 * (i * i) as f64 - 3.0 * i as f64 + 2.0).collect();
        let s = savgol_smooth(&ys, 11, 2).unwrap();
        for (a, b) in ys.iter().zip(&s) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn short_series_unchanged() {
        let ys = vec![1.0, 5.0, 2.0];
        assert_eq!(savgol_smooth(&ys, 11, 2).unwrap(), ys);
    }

    #[test]
    fn argument_checks() {
        assert!(savgol_smooth(&[0.0; 20], 10, 2).is_err());
        assert!(savgol_smooth(&[0.0; 20], 5, 5).is_err());
    }
}
