//! Fixed significant-digit decimal rendering with round-half-even, computed
//! exactly from a rational (or from the exact binary value of an `f64`).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Significant digits used for every decimal in emitted records.
pub const SIG_DIGITS: usize = 15;

fn pow10(e: u32) -> BigUint {
    num_traits::pow(BigUint::from(10u32), e as usize)
}

/// `value` to `digits` significant digits, round-half-even.
///
/// Plain notation for exponents in `-5..digits`, scientific otherwise.
pub fn format_rational(value: &BigRational, digits: usize) -> String {
    assert!(digits > 0);
    if value.is_zero() {
        return format!("0.{}", "0".repeat(digits - 1));
    }
    let neg = value.is_negative();
    let num = value.numer().magnitude().clone();
    let den = value.denom().magnitude().clone();

    // decimal exponent e with 10^e <= |v| < 10^(e+1)
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let ge = |e: i64| -> bool {
        if e >= 0 {
            num >= &den * pow10(e as u32)
        } else {
            &num * pow10((-e) as u32) >= den
        }
    };
    while !ge(e) {
        e -= 1;
    }
    while ge(e + 1) {
        e += 1;
    }

    // mantissa = round(|v| * 10^(digits-1-e))
    let shift = digits as i64 - 1 - e;
    let (n, d) = if shift >= 0 {
        (num * pow10(shift as u32), den)
    } else {
        (num, den * pow10((-shift) as u32))
    };
    let (mut m, r) = n.div_rem(&d);
    let twice = r << 1usize;
    if twice > d || (twice == d && m.is_odd()) {
        m += 1u32;
    }
    if m == pow10(digits as u32) {
        m /= 10u32;
        e += 1;
    }
    let mantissa = m.to_string();
    debug_assert_eq!(mantissa.len(), digits);

    let body = if (-5..digits as i64).contains(&e) {
        if e >= 0 {
            let (int, frac) = mantissa.split_at(e as usize + 1);
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), mantissa)
        }
    } else {
        let (lead, rest) = mantissa.split_at(1);
        if rest.is_empty() {
            format!("{lead}e{e}")
        } else {
            format!("{lead}.{rest}e{e}")
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// [`format_rational`] applied to the exact value of `x`.
pub fn format_f64(x: f64, digits: usize) -> String {
    match BigRational::from_float(x) {
        Some(r) => format_rational(&r, digits),
        None if x.is_nan() => "NaN".to_string(),
        None if x > 0.0 => "inf".to_string(),
        None => "-inf".to_string(),
    }
}

/// Parses a `num/den` (or bare integer) string back into a rational.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => s
            .trim()
            .parse::<BigInt>()
            .ok()
            .map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn fixed_digits() {
        assert_eq!(format_rational(&q(5, 8), 15), "0.625000000000000");
        assert_eq!(format_rational(&q(1, 1), 15), "1.00000000000000");
        assert_eq!(format_rational(&q(1, 3), 15), "0.333333333333333");
        assert_eq!(format_rational(&q(2, 3), 15), "0.666666666666667");
        assert_eq!(format_rational(&q(0, 1), 3), "0.00");
        assert_eq!(format_rational(&q(-1, 8), 3), "-0.125");
        assert_eq!(format_rational(&q(123456, 1), 3), "1.23e5");
        assert_eq!(format_rational(&q(123, 1), 3), "123");
    }

    #[test]
    fn half_even() {
        assert_eq!(format_rational(&q(1125, 1000), 3), "1.12");
        assert_eq!(format_rational(&q(1135, 1000), 3), "1.14");
        assert_eq!(format_rational(&q(9995, 10000), 3), "1.00");
        assert_eq!(format_rational(&q(99951, 100000), 3), "1.00");
    }

    #[test]
    fn small_and_large() {
        assert_eq!(format_rational(&q(1, 1_000_000), 3), "1.00e-6");
        assert_eq!(format_rational(&q(1, 100_000), 3), "0.0000100");
        assert_eq!(format_rational(&q(12345, 1), 3), "1.23e4");
        assert_eq!(format_rational(&q(1, 1024), 1), "0.001");
    }

    #[test]
    fn floats() {
        assert_eq!(format_f64(0.5, 15), "0.500000000000000");
        assert_eq!(format_f64(0.1, 17), "0.10000000000000001");
        assert_eq!(format_f64(f64::NAN, 15), "NaN");
    }

    #[test]
    fn parse() {
        assert_eq!(parse_ratio("5/8"), Some(q(5, 8)));
        assert_eq!(parse_ratio("10/16"), Some(q(5, 8)));
        assert_eq!(parse_ratio("1"), Some(q(1, 1)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("x/2"), None);
    }
}
