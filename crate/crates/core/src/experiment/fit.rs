//! Power-law fitting of empirical ratios: least squares of log y against
//! log C + a·log x + b·log log x, solved by exact normal equations.

use crate::{ensure, Error, Result};

/// y ≈ C · x^a · (log x)^b, with the residual RMS of the log-space fit.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub coefficient: f64,
    pub x_exponent: f64,
    pub log_exponent: f64,
    pub residual_rms: f64,
}

/// Solves the symmetric 3×3 system A·v = b by Gaussian elimination with
/// partial pivoting. A pivot collapsing relative to the matrix scale means
/// the design is rank-deficient.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-12 * scale {
            return Err(Error::InsufficientData(
                "fit_power_law: rank-deficient design (predictors collinear; \
                 need at least 3 distinct x values)"
                    .into(),
            ));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut v = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * v[k];
        }
        v[row] = s / a[row][row];
    }
    Ok(v)
}

/// Least-squares fit of log y = log C + a·log x + b·log log x.
/// Requires ≥ 3 samples with x > 1 (log log must exist) and y > 0.
pub fn fit_power_law(samples: &[(f64, f64)]) -> Result<PowerLawFit> {
    ensure!(
        samples.len() >= 3,
        "fit_power_law: need at least 3 samples, got {}",
        samples.len()
    );
    for &(x, y) in samples {
        ensure!(
            x.is_finite() && y.is_finite() && x > 1.0 && y > 0.0,
            "fit_power_law: samples need x > 1 and y > 0, got ({x}, {y})"
        );
    }
    let mut a = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(x, y) in samples {
        let phi = [1.0, x.ln(), x.ln().ln()];
        let ly = y.ln();
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += phi[i] * phi[j];
            }
            rhs[i] += phi[i] * ly;
        }
    }
    let v = solve3(a, rhs)?;
    let mut ss = 0.0;
    for &(x, y) in samples {
        let pred = v[0] + v[1] * x.ln() + v[2] * x.ln().ln();
        ss += (y.ln() - pred).powi(2);
    }
    Ok(PowerLawFit {
        coefficient: v[0].exp(),
        x_exponent: v[1],
        log_exponent: v[2],
        residual_rms: (ss / samples.len() as f64).sqrt(),
    })
}
