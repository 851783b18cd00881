use super::lu::refine;
use super::{DenseMatrix, SolveDiagnostics};
use crate::{Error, Result};

/// Householder QR of `A^T` for an `m x n` matrix `A` with `m <= n`.
struct TransposeQr {
    /// Column-major `n x m` storage: reflector vectors below the diagonal,
    /// `R` on and above it.
    qr: Vec<Vec<f64>>,
    r_diag: Vec<f64>,
    n: usize,
}

impl TransposeQr {
    fn factor(a: &DenseMatrix) -> Result<Self> {
        let (m, n) = (a.rows(), a.cols());
        if m > n {
            return Err(Error::InvalidArgument(format!(
                "minimum-norm solve needs rows <= cols, got {m}x{n}"
            )));
        }
        let threshold = f64::EPSILON * n as f64 * a.norm_inf();
        // Column k of A^T is row k of A.
        let mut qr: Vec<Vec<f64>> = (0..m).map(|k| a.row(k).to_vec()).collect();
        let mut r_diag = vec![0.0; m];
        for k in 0..m {
            let norm = qr[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > threshold) {
                return Err(Error::RankDeficient {
                    step: k + 1,
                    pivot: norm,
                    threshold,
                });
            }
            let alpha = if qr[k][k] > 0.0 { -norm } else { norm };
            // v = x - alpha e_1, stored in place and normalised so v_1 = 1
            let v1 = qr[k][k] - alpha;
            for i in k + 1..n {
                qr[k][i] /= v1;
            }
            qr[k][k] = 1.0;
            let tau = -v1 / alpha;
            for j in k + 1..m {
                let s: f64 = (k..n).map(|i| qr[k][i] * qr[j][i]).sum::<f64>() * tau;
                for i in k..n {
                    let vk = qr[k][i];
                    qr[j][i] -= s * vk;
                }
            }
            r_diag[k] = alpha;
            // keep tau where the unit v_1 used to be
            qr[k][k] = tau;
        }
        Ok(Self { qr, r_diag, n })
    }

    fn m(&self) -> usize {
        self.r_diag.len()
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.r_diag[i],
            std::cmp::Ordering::Less => self.qr[j][i],
            std::cmp::Ordering::Greater => 0.0,
        }
    }

    /// `x = Q [R^-T b; 0]`, the minimum-norm solution of `A x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut z = vec![0.0; self.n];
        for i in 0..m {
            let s: f64 = (0..i).map(|k| self.r(k, i) * z[k]).sum();
            z[i] = (b[i] - s) / self.r_diag[i];
        }
        for k in (0..m).rev() {
            let tau = self.qr[k][k];
            let v = |i: usize| if i == k { 1.0 } else { self.qr[k][i] };
            let s: f64 = (k..self.n).map(|i| v(i) * z[i]).sum::<f64>() * tau;
            for i in k..self.n {
                z[i] -= s * v(i);
            }
        }
        z
    }

    /// Exact `||R||_1 ||R^-1||_1` from an explicit triangular inverse.
    fn condition_one(&self) -> f64 {
        let m = self.m();
        let r_norm = (0..m)
            .map(|j| (0..=j).map(|i| self.r(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut inv_norm: f64 = 0.0;
        for j in 0..m {
            // column j of R^-1 by back substitution
            let mut col = vec![0.0; m];
            col[j] = 1.0 / self.r_diag[j];
            for i in (0..j).rev() {
                let s: f64 = (i + 1..=j).map(|k| self.r(i, k) * col[k]).sum();
                col[i] = -s / self.r_diag[i];
            }
            inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
        }
        (r_norm * inv_norm).max(1.0)
    }
}

/// Minimum 2-norm solution of an underdetermined full-row-rank system.
///
/// Uses a Householder QR of `A^T`; refinement corrections are themselves
/// minimum-norm solves, so the iterate stays in the row space of `A`.
pub fn solve_min_norm(a: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, SolveDiagnostics)> {
    if b.len() != a.rows() {
        return Err(Error::Dimension {
            what: "right-hand side",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let qr = TransposeQr::factor(a)?;
    let condition = qr.condition_one();
    if !(condition * f64::EPSILON < 1.0) {
        return Err(Error::IllConditioned { condition });
    }
    let x = refine(a, b, qr.solve(b), |r| qr.solve(r));
    let diagnostics = SolveDiagnostics {
        residual_inf_norm: super::residual_inf_norm(a, &x, b),
        condition_estimate: condition,
    };
    Ok((x, diagnostics))
}
