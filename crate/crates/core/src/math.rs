//! Scalar helpers shared by the group implementations.
//!
//! `core` has no transcendental functions, so everything routes through
//! `libm`.

pub use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

/// Below this magnitude `sinc` and `1/sinc` switch to their Taylor series.
pub const SINC_TAYLOR_CUTOFF: f64 = 1e-4;

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `sin(x) / x`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_TAYLOR_CUTOFF {
        let x2 = x * x;
        // 1 - x^2/6 + x^4/120 - x^6/5040
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        sin(x) / x
    }
}

/// `x / sin(x)`, with value 1 at 0. Only meaningful for `|x| < pi`.
pub fn inv_sinc(x: f64) -> f64 {
    if x.abs() < SINC_TAYLOR_CUTOFF {
        let x2 = x * x;
        // 1 + x^2/6 + 7x^4/360 + 31x^6/15120
        1.0 + x2 * (1.0 / 6.0 + x2 * (7.0 / 360.0 + x2 * 31.0 / 15120.0))
    } else {
        x / sin(x)
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    if (-PI..PI).contains(&theta) {
        return theta;
    }
    let mut w = theta - TAU * floor((theta + PI) / TAU);
    if w >= PI {
        w -= TAU;
    }
    if w < -PI {
        w += TAU;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_is_continuous_across_cutoff() {
        for &x in &[SINC_TAYLOR_CUTOFF * 0.999, SINC_TAYLOR_CUTOFF * 1.001] {
            assert!((sinc(x) - libm::sin(x) / x).abs() < 1e-16);
            assert!((inv_sinc(x) - x / libm::sin(x)).abs() < 1e-15);
        }
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(inv_sinc(0.0), 1.0);
        assert!((sinc(-0.3) - sinc(0.3)).abs() == 0.0);
    }

    #[test]
    fn wrap_angle_lands_in_half_open_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert_eq!(wrap_angle(0.25), 0.25);
        assert!((wrap_angle(1.5 * PI) + 0.5 * PI).abs() < 1e-15);
        assert!((wrap_angle(-3.0 * PI) + PI).abs() < 1e-14);
        for k in -20..20 {
            let w = wrap_angle(k as f64 * 0.77);
            assert!((-PI..PI).contains(&w));
        }
    }
}
