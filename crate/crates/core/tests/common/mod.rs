//! Independent reference computations for the test suites. Nothing here
//! calls into the crate's numerical kernels.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub fn rational_matrix(rows: &[Vec<f64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| rational(v)).collect())
        .collect()
}

/// Exact determinant by fraction-valued elimination.
pub fn det(mut a: Vec<Vec<BigRational>>) -> BigRational {
    let n = a.len();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigRational::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= &pivot;
        for i in k + 1..n {
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Cramer's rule in exact rational arithmetic.
pub fn cramer(a: &[Vec<BigRational>], b: &[BigRational]) -> Vec<BigRational> {
    let d = det(a.to_vec());
    assert!(!d.is_zero(), "singular oracle system");
    (0..a.len())
        .map(|col| {
            let replaced: Vec<Vec<BigRational>> = a
                .iter()
                .zip(b)
                .map(|(row, bi)| {
                    let mut r = row.clone();
                    r[col] = bi.clone();
                    r
                })
                .collect();
            det(replaced) / &d
        })
        .collect()
}

pub fn cramer_f64(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let ra = rational_matrix(a);
    let rb: Vec<BigRational> = b.iter().map(|&v| rational(v)).collect();
    cramer(&ra, &rb)
        .iter()
        .map(|v| v.to_f64().unwrap())
        .collect()
}

/// Minimum-norm solution `A^T (A A^T)^-1 b`, exactly.
pub fn min_norm_exact(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let ra = rational_matrix(a);
    let m = ra.len();
    let n = ra[0].len();
    let gram: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..n).fold(BigRational::zero(), |s, k| s + &ra[i][k] * &ra[j][k])
                })
                .collect()
        })
        .collect();
    let rb: Vec<BigRational> = b.iter().map(|&v| rational(v)).collect();
    let y = cramer(&gram, &rb);
    (0..n)
        .map(|k| {
            (0..m)
                .fold(BigRational::zero(), |s, i| s + &ra[i][k] * &y[i])
                .to_f64()
                .unwrap()
        })
        .collect()
}

pub fn abs_rational(x: &BigRational) -> BigRational {
    x.abs()
}

pub fn int_matrix(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect()
}

/// `J1(x) = (1/pi) int_0^pi cos(t - x sin t) dt` by the trapezoid rule,
/// which converges geometrically for this periodic, even integrand.
pub fn bessel_j1_quadrature(x: f64) -> f64 {
    let panels = 400;
    let h = std::f64::consts::PI / panels as f64;
    let f = |t: f64| (t - x * t.sin()).cos();
    let mut sum = 0.5 * (f(0.0) + f(std::f64::consts::PI));
    for k in 1..panels {
        sum += f(k as f64 * h);
    }
    sum * h / std::f64::consts::PI
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    while (b - a).abs() > 1e-13 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
    }
    0.5 * (a + b)
}

/// `m_ij` straight from the defining expression.
pub fn factor(i: usize, j: usize, d: f64, r: f64) -> f64 {
    let t = (i as f64 - j as f64) * d / r;
    (1.0 + t * t).powf(-1.5)
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn max_relative_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs() / scale))
}
