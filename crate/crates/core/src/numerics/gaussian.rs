//! Closed-form moments of quadratic expressions in a Gaussian variable.

use crate::error::{Error, Result};

/// E[exp(a Z^2 + b Z + c)] for Z ~ N(m, s2):
///
///   (1 - 2 a s2)^(-1/2) exp{ c + a m^2 + b m + s2 (b + 2 a m)^2 / (2 (1 - 2 a s2)) }
///
/// finite only while 1 - 2 a s2 > 0; otherwise the moment diverges.
pub fn gaussian_exp_quadratic(a: f64, b: f64, c: f64, m: f64, s2: f64) -> Result<f64> {
    if !(s2 >= 0.0) {
        return Err(Error::InvalidParameter(format!("variance must be >= 0, got {s2}")));
    }
    let factor = 1.0 - 2.0 * a * s2;
    if factor <= 0.0 {
        return Err(Error::MomentDivergent { factor });
    }
    let slope = b + 2.0 * a * m;
    Ok(factor.powf(-0.5) * (c + a * m * m + b * m + s2 * slope * slope / (2.0 * factor)).exp())
}

/// E[a Z^2 + b Z + c] for Z ~ N(m, s2), i.e. a (m^2 + s2) + b m + c.
pub fn gaussian_quadratic_mean(a: f64, b: f64, c: f64, m: f64, s2: f64) -> f64 {
    a * (m * m + s2) + b * m + c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_hermite;
    use approx::assert_relative_eq;

    #[test]
    fn reduces_to_lognormal_mean() {
        // a = 0: E[exp(bZ + c)] = exp(bm + c + b^2 s2 / 2)
        let v = gaussian_exp_quadratic(0.0, 0.7, -0.2, 1.3, 2.0).unwrap();
        assert_relative_eq!(
            v,
            (0.7 * 1.3 - 0.2 + 0.5 * 0.49 * 2.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn matches_quadrature() {
        let g = gauss_hermite(128).unwrap();
        let cases = [
            (0.1, 0.3, -0.5, 0.2, 1.0),
            (-0.8, 1.0, 0.0, -1.0, 0.5),
            (0.2, -0.4, 0.3, 2.0, 1.9),
            (0.0, 0.0, 1.0, 5.0, 3.0),
        ];
        for &(a, b, c, m, s2) in &cases {
            let closed = gaussian_exp_quadratic(a, b, c, m, s2).unwrap();
            let s = s2.sqrt();
            let quad = g.integrate(|z| {
                let x = m + s * z;
                (a * x * x + b * x + c).exp()
            });
            assert_relative_eq!(closed, quad, max_relative = 1e-10);
        }
    }

    #[test]
    fn diverges_at_critical_curvature() {
        assert!(matches!(
            gaussian_exp_quadratic(0.5, 0.0, 0.0, 0.0, 1.0),
            Err(Error::MomentDivergent { .. })
        ));
        assert!(matches!(
            gaussian_exp_quadratic(2.0, 0.0, 0.0, 0.0, 1.0),
            Err(Error::MomentDivergent { factor }) if factor < 0.0
        ));
        // just inside the boundary is fine
        assert!(gaussian_exp_quadratic(0.499, 0.0, 0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn degenerate_variance_is_a_point_mass() {
        let v = gaussian_exp_quadratic(0.3, -0.2, 0.1, 1.5, 0.0).unwrap();
        assert_relative_eq!(v, (0.3 * 2.25 - 0.2 * 1.5 + 0.1f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn quadratic_mean() {
        assert_relative_eq!(
            gaussian_quadratic_mean(2.0, -1.0, 0.5, 3.0, 4.0),
            2.0 * 13.0 - 3.0 + 0.5,
            max_relative = 1e-14
        );
        let g = gauss_hermite(8).unwrap();
        let quad = g.integrate(|z| {
            let x = -0.7 + 1.3 * z;
            0.4 * x * x + 0.9 * x - 2.0
        });
        assert_relative_eq!(
            gaussian_quadratic_mean(0.4, 0.9, -2.0, -0.7, 1.69),
            quad,
            max_relative = 1e-12
        );
    }
}
