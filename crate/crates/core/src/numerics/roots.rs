//! Bisection on a bracketing interval.

use crate::error::{Error, Result};

/// Root of a continuous function with a sign change on [lo, hi], by
/// bisection to relative width `rel_tol`. The function need not be monotone,
/// but with multiple roots only one of them is found.
pub fn find_root_monotone<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "bisection needs a finite interval with lo < hi, got [{lo}, {hi}]"
        )));
    }
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::NotBracketed { lo, hi });
    }
    let mut lo = lo;
    let mut hi = hi;
    let sign_lo = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * (1.0 + mid.abs()) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cube_root_of_two() {
        let r = find_root_monotone(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2f64.powf(1.0 / 3.0), max_relative = 1e-12);
    }

    #[test]
    fn decreasing_function() {
        let r = find_root_monotone(|x| (-x).exp() - 0.5, 0.0, 10.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn endpoint_roots_returned_directly() {
        assert_eq!(find_root_monotone(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(find_root_monotone(|x| x - 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn same_sign_is_an_error() {
        assert!(matches!(
            find_root_monotone(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NotBracketed { .. })
        ));
    }

    #[test]
    fn bad_interval_rejected() {
        assert!(find_root_monotone(|x| x, 1.0, 0.0, 1e-12).is_err());
        assert!(find_root_monotone(|x| x, 0.0, f64::INFINITY, 1e-12).is_err());
    }
}
