//! Error-free transformations and the twice-working-precision dot product
//! of Ogita, Rump and Oishi.

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot product computed as if in twice the working precision, then rounded.
pub fn dot2(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut s = 0.0;
    let mut c = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (p, pe) = two_prod(a, b);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

/// `b - A x` for one row, accumulated in the same extended manner.
pub(crate) fn residual_entry(row: &[f64], x: &[f64], b: f64) -> f64 {
    let mut s = b;
    let mut c = 0.0;
    for (&a, &v) in row.iter().zip(x) {
        let (p, pe) = two_prod(-a, v);
        let (t, se) = two_sum(s, p);
        s = t;
        c += pe + se;
    }
    s + c
}

pub(crate) fn residual(a: &super::DenseMatrix, x: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| residual_entry(a.row(i), x, b[i]))
        .collect()
}

/// `||A x - b||_inf` with every component evaluated in compensated arithmetic.
pub fn residual_inf_norm(a: &super::DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
    super::inf_norm(&residual(a, x, b))
}
