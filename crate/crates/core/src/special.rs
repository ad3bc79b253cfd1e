//! Error function, its inverse, and the principal-branch Lambert W series.

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// Crossover between the power series and the continued fraction for erf.
const SERIES_LIMIT: f64 = 3.0;
const MAX_ITER: usize = 500;

/// `erf(x)`.
pub fn erf<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < T::zero() {
        return -erf(-x);
    }
    if x < lit(SERIES_LIMIT) {
        erf_series(x)
    } else {
        T::one() - erfc_cf(x)
    }
}

/// `erfc(x) = 1 - erf(x)`, accurate in the upper tail.
pub fn erfc<T: Real>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x < lit(SERIES_LIMIT) {
        T::one() - erf(x)
    } else {
        erfc_cf(x)
    }
}

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1*3*...*(2n+1)); all terms positive.
fn erf_series<T: Real>(x: T) -> T {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_ITER {
        term = term * lit::<T>(2.0) * x2 / count::<T>(2 * n as u64 + 1);
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
    }
    sum * T::FRAC_2_SQRT_PI() * (-x2).exp()
}

// Continued fraction erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// evaluated with the modified Lentz method. Used for x >= 3.
fn erfc_cf<T: Real>(x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for n in 1..MAX_ITER {
        let a = count::<T>(n as u64) / lit(2.0);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() / (f * T::PI().sqrt())
}

/// Inverse error function on `(-1, 1)`.
///
/// A closed-form starting point is refined by Newton steps until the step is
/// below machine precision; in `f64` `|erf(erfinv(y)) - y| < 1e-9` holds.
pub fn erfinv<T: Real>(y: T) -> Result<T> {
    if y.is_nan() || y <= -T::one() || y >= T::one() {
        return Err(Error::Domain(format!("erfinv({y}) outside (-1, 1)")));
    }
    if y == T::zero() {
        return Ok(T::zero());
    }
    let a = lit::<T>(0.147);
    let ln = (T::one() - y * y).ln();
    let t = lit::<T>(2.0) / (T::PI() * a) + ln / lit(2.0);
    let mut x = ((t * t - ln / a).sqrt() - t).sqrt();
    if y < T::zero() {
        x = -x;
    }
    for _ in 0..100 {
        let slope = T::FRAC_2_SQRT_PI() * (-x * x).exp();
        if slope == T::zero() {
            break;
        }
        let step = (erf(x) - y) / slope;
        x = x - step;
        if step.abs() <= T::epsilon() * x.abs().max(T::one()) {
            break;
        }
    }
    Ok(x)
}

/// Largest `|x|` the Lambert series is evaluated at.
pub const LAMBERT_SERIES_LIMIT: f64 = 0.4;

/// Principal branch `W_0(x)` by its Taylor series
/// `sum_{n>=1} (-n)^{n-1} x^n / n!`, truncated after `terms` terms.
///
/// The series converges only for `|x| < 1/e`; between `1/e` and the domain
/// limit of 0.4 the truncated sum is returned as is.
pub fn lambert_w_series<T: Real>(x: T, terms: usize) -> Result<T> {
    if x.is_nan() || x.abs() >= lit(LAMBERT_SERIES_LIMIT) {
        return Err(Error::Domain(format!(
            "lambert series argument {x} outside |x| < {LAMBERT_SERIES_LIMIT}"
        )));
    }
    // t_{n+1} = t_n * (-x) * (1 + 1/n)^{n-1}
    let mut term = x;
    let mut sum = T::zero();
    for n in 1..=terms {
        sum = sum + term;
        let nf = count::<T>(n as u64);
        term = term * -x * (T::one() + nf.recip()).powi(n as i32 - 1);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_values() {
        // Abramowitz & Stegun table values
        let cases: [(f64, f64); 6] = [
            (0.0, 0.0),
            (0.5, 0.520_499_877_813_046_5),
            (1.0, 0.842_700_792_949_714_9),
            (2.0, 0.995_322_265_018_952_7),
            (3.0, 0.999_977_909_503_001_4),
            (4.0, 0.999_999_984_582_742_1),
        ];
        for (x, want) in cases {
            assert!((erf(x) - want).abs() < 1e-14, "erf({x})");
            assert!((erf(-x) + want).abs() < 1e-14);
        }
    }

    #[test]
    fn erfc_tail() {
        assert!((erfc(5.0f64) - 1.537_459_794_428_034_8e-12).abs() < 1e-24);
        assert!((erfc(1.0f64) - 0.157_299_207_050_285_1).abs() < 1e-14);
    }

    #[test]
    fn erf_single_precision() {
        assert!((erf(1.0f32) - 0.842_700_8).abs() < 1e-6);
    }

    #[test]
    fn erfinv_round_trip() {
        for i in -999..=999 {
            let y = i as f64 / 1000.0;
            let x = erfinv(y).unwrap();
            assert!((erf(x) - y).abs() < 1e-12, "y = {y}");
        }
    }

    #[test]
    fn erfinv_domain() {
        assert!(erfinv(1.0f64).is_err());
        assert!(erfinv(-1.0f64).is_err());
        assert!(erfinv(f64::NAN).is_err());
        assert_eq!(erfinv(0.0f64).unwrap(), 0.0);
    }

    #[test]
    fn lambert_identity() {
        for i in -20..=20 {
            let x = i as f64 / 100.0;
            let w = lambert_w_series(x, 30).unwrap();
            assert!((w * w.exp() - x).abs() < 1e-6, "x = {x}");
        }
        assert_eq!(lambert_w_series(0.0f64, 30).unwrap(), 0.0);
        assert!(lambert_w_series(0.4f64, 30).is_err());
        assert!(lambert_w_series(-0.5f64, 30).is_err());
    }
}
