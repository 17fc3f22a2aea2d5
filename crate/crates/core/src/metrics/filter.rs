//! Series filters: centred moving mean and the cubic smoothing spline.

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Centred moving average over an odd window. Near the ends the window
/// shrinks symmetrically so every output is a centred mean.
pub fn moving_mean<T: Scalar>(series: &[T], window: usize) -> Result<Vec<T>> {
    let n = series.len();
    if window == 0 || window.is_multiple_of(2) || window > n {
        return Err(Error::BadWindow { window, len: n });
    }
    let half = window / 2;
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(T::zero());
    for &x in series {
        prefix.push(*prefix.last().unwrap() + x);
    }
    Ok((0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let (lo, hi) = (i - h, i + h + 1);
            // Direct summation for short windows keeps the result exact for
            // constant input; prefix sums are used otherwise.
            if hi - lo <= 32 {
                series[lo..hi].iter().copied().sum::<T>() / T::from_usize_lossy(hi - lo)
            } else {
                (prefix[hi] - prefix[lo]) / T::from_usize_lossy(hi - lo)
            }
        })
        .collect())
}

/// Cubic smoothing spline through `(t_i, y_i)` minimizing
/// `sum (y_i - f(t_i))^2 + lambda * integral f''^2`, evaluated at the knots.
///
/// Reinsch's formulation: with the second-difference matrix `Q` and the
/// tridiagonal `R`, solve `(R + lambda Q'Q) gamma = Q'y` and return
/// `y - lambda Q gamma`. The system is pentadiagonal and solved in O(n).
pub fn spline_smooth<T: Scalar>(t: &[T], y: &[T], lambda: T) -> Result<Vec<T>> {
    let n = y.len();
    if t.len() != n {
        return Err(Error::LengthMismatch(t.len(), n));
    }
    if n < 4 {
        return Err(Error::SeriesTooShort { needed: 4, got: n });
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let h: Vec<T> = t.windows(2).map(|w| w[1] - w[0]).collect();
    if h.iter().any(|&hi| !(hi > T::zero())) {
        return Err(Error::InvalidParameter("timestamps must be strictly increasing".into()));
    }
    if lambda == T::zero() {
        return Ok(y.to_vec());
    }

    let m = n - 2;
    // Column j of Q (interior knot j+1) has entries at rows j, j+1, j+2.
    let q: Vec<[T; 3]> = (0..m)
        .map(|j| {
            let (a, b) = (T::one() / h[j], T::one() / h[j + 1]);
            [a, -a - b, b]
        })
        .collect();

    let three = T::lit(3.0);
    let six = T::lit(6.0);
    // Symmetric band: band[j][k] = A[j][j+k], k = 0..=2.
    let mut band = vec![[T::zero(); 3]; m];
    for j in 0..m {
        band[j][0] = (h[j] + h[j + 1]) / three + lambda * (q[j][0] * q[j][0] + q[j][1] * q[j][1] + q[j][2] * q[j][2]);
        if j + 1 < m {
            band[j][1] = h[j + 1] / six + lambda * (q[j][1] * q[j + 1][0] + q[j][2] * q[j + 1][1]);
        }
        if j + 2 < m {
            band[j][2] = lambda * q[j][2] * q[j + 2][0];
        }
    }
    let rhs: Vec<T> = (0..m).map(|j| q[j][0] * y[j] + q[j][1] * y[j + 1] + q[j][2] * y[j + 2]).collect();
    let gamma = solve_pentadiagonal(&band, &rhs);

    let mut out = y.to_vec();
    for j in 0..m {
        for k in 0..3 {
            out[j + k] = out[j + k] - lambda * q[j][k] * gamma[j];
        }
    }
    Ok(out)
}

/// LDL' solve of a symmetric positive definite matrix with two
/// super-diagonals.
fn solve_pentadiagonal<T: Scalar>(band: &[[T; 3]], rhs: &[T]) -> Vec<T> {
    let m = band.len();
    // l[i] = [L(i, i-1), L(i, i-2)]
    let mut l = vec![[T::zero(); 2]; m];
    let mut d = vec![T::zero(); m];
    for i in 0..m {
        if i >= 2 {
            l[i][1] = band[i - 2][2] / d[i - 2];
        }
        if i >= 1 {
            let mut s = band[i - 1][1];
            if i >= 2 {
                s = s - l[i][1] * l[i - 1][0] * d[i - 2];
            }
            l[i][0] = s / d[i - 1];
        }
        let mut di = band[i][0];
        if i >= 1 {
            di = di - l[i][0] * l[i][0] * d[i - 1];
        }
        if i >= 2 {
            di = di - l[i][1] * l[i][1] * d[i - 2];
        }
        d[i] = di;
    }
    let mut z = rhs.to_vec();
    for i in 0..m {
        if i >= 1 {
            z[i] = z[i] - l[i][0] * z[i - 1];
        }
        if i >= 2 {
            z[i] = z[i] - l[i][1] * z[i - 2];
        }
    }
    for i in 0..m {
        z[i] = z[i] / d[i];
    }
    for i in (0..m).rev() {
        if i + 1 < m {
            z[i] = z[i] - l[i + 1][0] * z[i + 1];
        }
        if i + 2 < m {
            z[i] = z[i] - l[i + 2][1] * z[i + 2];
        }
    }
    z
}

/// Elementwise `|raw - smoothed|`.
pub fn local_variability<T: Scalar>(raw: &[T], smoothed: &[T]) -> Result<Vec<T>> {
    if raw.len() != smoothed.len() {
        return Err(Error::LengthMismatch(raw.len(), smoothed.len()));
    }
    Ok(raw.iter().zip(smoothed).map(|(r, s)| (*r - *s).abs()).collect())
}

/// Moving mean followed by the smoothing spline.
pub fn smooth_series<T: Scalar>(t: &[T], y: &[T], window: usize, lambda: T) -> Result<Vec<T>> {
    let mm = moving_mean(y, window)?;
    spline_smooth(t, &mm, lambda)
}

/// Sample standard deviation (n - 1 denominator), two-pass.
pub fn sample_sd<T: Scalar>(x: &[T]) -> Result<T> {
    if x.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: x.len() });
    }
    let n = T::from_usize_lossy(x.len());
    let mean = x.iter().copied().sum::<T>() / n;
    let ss: T = x.iter().map(|&v| (v - mean) * (v - mean)).sum();
    Ok((ss / (n - T::one())).sqrt())
}

/// Linear-interpolation percentile, `q` in [0, 1]. `None` for empty input.
pub fn percentile<T: Scalar>(x: &[T], q: T) -> Option<T> {
    if x.is_empty() {
        return None;
    }
    let mut v = x.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let pos = q.max(T::zero()).min(T::one()) * T::from_usize_lossy(v.len() - 1);
    let lo = pos.floor().to_usize().unwrap_or(0);
    let hi = (lo + 1).min(v.len() - 1);
    let frac = pos - T::from_usize_lossy(lo);
    Some(v[lo] + (v[hi] - v[lo]) * frac)
}
