//! Small helpers on top of `num_rational::BigRational`.

use alloc::string::String;
use alloc::string::ToString;
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Floor of a rational as a BigInt.
pub fn floor_int(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// Fractional part in [0, 1).
pub fn frac(x: &BigRational) -> BigRational {
    x - BigRational::from_integer(floor_int(x))
}

/// Power with integer exponent, negative allowed. Panics on 0^negative.
pub fn pow(x: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        num_traits::pow::pow(x.clone(), e as usize)
    } else {
        assert!(!x.is_zero(), "zero to a negative power");
        num_traits::pow::pow(x.recip(), (-e) as usize)
    }
}

/// Rounds outward to a dyadic rational: result has denominator 2^bits,
/// result >= x when `up`, <= x otherwise. Keeps interval endpoints from
/// accumulating giant denominators during refinement.
pub fn round_dyadic(x: &BigRational, bits: u32, up: bool) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    let fl = scaled.floor().to_integer();
    let num = if up && scaled != BigRational::from_integer(fl.clone()) {
        fl + 1
    } else {
        fl
    };
    BigRational::new(num, scale)
}

/// 2^-bits as a rational.
pub fn eps(bits: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << bits)
}

/// Decimal rendering with a fixed number of fraction digits, round to nearest.
/// Deterministic, used for report output.
pub fn to_decimal(x: &BigRational, digits: u32) -> String {
    let neg = x.is_negative();
    let ax = x.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = &ax * BigRational::from_integer(scale.clone());
    // round half up
    let rounded = (scaled + rat(1, 2)).floor().to_integer();
    let ip = &rounded / &scale;
    let fp = &rounded % &scale;
    let mut fstr = fp.to_string();
    while (fstr.len() as u32) < digits {
        fstr.insert(0, '0');
    }
    let sign = if neg && (!ip.is_zero() || !fp.is_zero()) { "-" } else { "" };
    if digits == 0 {
        alloc::format!("{}{}", sign, ip)
    } else {
        alloc::format!("{}{}.{}", sign, ip, fstr)
    }
}

/// Upper bound for sqrt(x), exact when x is a perfect square of a rational
/// with small terms. Used for norm bounds where an overestimate is safe.
pub fn sqrt_upper(x: &BigRational) -> BigRational {
    assert!(!x.is_negative());
    if x.is_zero() {
        return BigRational::zero();
    }
    // integer sqrt of ceil(x * 4^k) over 2^k with k fixed
    let k = 32u32;
    let scale = BigInt::one() << (2 * k);
    let scaled = x * BigRational::from_integer(scale);
    let n = scaled.ceil().to_integer();
    let s = num_integer::Roots::sqrt(&n) + 1;
    BigRational::new(s, BigInt::one() << k)
}

/// Bounds l <= sqrt(x) <= u with u - l = 2^-bits, for x >= 0.
pub fn sqrt_bounds(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative());
    if x.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    // t <= x 4^bits < t + 1 gives isqrt(t) <= sqrt(x) 2^bits < isqrt(t) + 1
    let scale = BigInt::one() << (2 * bits);
    let t = (x * BigRational::from_integer(scale)).floor().to_integer();
    let r = num_integer::Roots::sqrt(&t);
    let denom = BigInt::one() << bits;
    (
        BigRational::new(r.clone(), denom.clone()),
        BigRational::new(r + 1, denom),
    )
}

/// f64 view, for seeding numeric root finders only.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(match x.numer().sign() {
        Sign::Minus => f64::MIN,
        _ => f64::MAX,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_in_unit_interval() {
        assert_eq!(frac(&rat(-7, 2)), rat(1, 2));
        assert_eq!(frac(&rat(7, 2)), rat(1, 2));
        assert_eq!(frac(&int(3)), int(0));
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = rat(1, 3);
        let lo = round_dyadic(&x, 8, false);
        let hi = round_dyadic(&x, 8, true);
        assert!(lo <= x && x <= hi);
        assert!(hi - lo <= eps(8));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 3), 4), "0.3333");
        assert_eq!(to_decimal(&rat(-1, 2), 2), "-0.50");
        assert_eq!(to_decimal(&int(2), 3), "2.000");
    }

    #[test]
    fn sqrt_upper_is_upper() {
        let x = rat(2, 1);
        let s = sqrt_upper(&x);
        assert!(&s * &s >= x);
        assert!(s < rat(15, 10));
    }

    #[test]
    fn sqrt_bounds_bracket_tightly() {
        for (n, d) in [(2i64, 1i64), (1, 8), (9, 4), (1, 97)] {
            let x = rat(n, d);
            let (lo, hi) = sqrt_bounds(&x, 24);
            assert!(&lo * &lo <= x);
            assert!(&hi * &hi >= x);
            assert_eq!(hi - lo, eps(24));
        }
        assert_eq!(sqrt_bounds(&int(0), 24), (int(0), int(0)));
        // perfect squares sit on the lower endpoint
        let (lo, hi) = sqrt_bounds(&rat(9, 4), 10);
        assert_eq!(lo, rat(3, 2));
        assert!(hi > rat(3, 2));
    }
}
