use crate::{Error, Result};

/// Largest argument magnitude accepted by [`bessel_j1`].
pub const J1_ARG_LIMIT: f64 = 12.0;

/// Bessel function of the first kind, order one, by its ascending series
///
/// `J1(x) = sum_k (-1)^k / (k! (k+1)!) (x/2)^(2k+1)`.
///
/// Terms are added until one falls below `1e-16` of the running sum. The
/// alternating series loses digits to cancellation as `|x|` grows, so the
/// domain is capped at [`J1_ARG_LIMIT`].
pub fn bessel_j1(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > J1_ARG_LIMIT {
        return Err(Error::Domain {
            function: "bessel_j1",
            value: x,
            reason: "series evaluation requires |x| <= 12",
        });
    }
    // Odd function: evaluate on |x| and restore the sign exactly.
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(x);
    }
    let half = 0.5 * ax;
    let half_sq = half * half;
    let mut term = half;
    let mut sum = half;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -half_sq / (k * (k + 1.0));
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            break;
        }
    }
    Ok(if x < 0.0 { -sum } else { sum })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arguments() {
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
        // 0.1 - 0.1^3/2 + 0.1^5/12 - ...
        assert!((bessel_j1(0.2).unwrap() - 0.099_500_832_639_236).abs() < 1e-15);
        assert_eq!(bessel_j1(-0.2).unwrap(), -bessel_j1(0.2).unwrap());
    }

    #[test]
    fn known_values() {
        // tabulated values of J1
        assert!((bessel_j1(1.0).unwrap() - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((bessel_j1(5.0).unwrap() + 0.327_579_137_591_465_2).abs() < 1e-14);
        assert!(bessel_j1(3.831_705_970_207_512).unwrap().abs() < 1e-12);
    }

    #[test]
    fn domain() {
        assert!(bessel_j1(12.0).is_ok());
        assert!(bessel_j1(12.5).is_err());
        assert!(bessel_j1(f64::NAN).is_err());
    }
}
