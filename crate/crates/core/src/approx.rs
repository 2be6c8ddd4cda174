//! Normal approximation and Chernoff upper bound for the equalization
//! probability, both read off the coin-toss form
//! `2 P(Bin(b+w-1, 1/2) <= w-1)`.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{domain, Result};
use crate::exact::{ExactProbability, UrnConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxKind {
    Approximation,
    UpperBound,
}

impl ApproxKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ApproxKind::Approximation => "approximation",
            ApproxKind::UpperBound => "upper_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxResult {
    pub value: f64,
    pub kind: ApproxKind,
    pub exact_ref: Option<ExactProbability>,
    pub abs_error: Option<f64>,
    pub rel_error: Option<f64>,
}

impl ApproxResult {
    fn new(value: f64, kind: ApproxKind) -> Self {
        Self {
            value,
            kind,
            exact_ref: None,
            abs_error: None,
            rel_error: None,
        }
    }

    /// Attaches the exact value and the resulting errors.
    pub fn compared_to(mut self, exact: &ExactProbability) -> Self {
        let e = exact.to_f64();
        let abs = (self.value - e).abs();
        self.abs_error = Some(abs);
        self.rel_error = Some(if e > 0.0 { abs / e } else { f64::INFINITY });
        self.exact_ref = Some(exact.clone());
        self
    }

    /// For bounds: whether `value >= exact` holds in exact arithmetic.
    pub fn dominates(&self, exact: &ExactProbability) -> bool {
        match BigRational::from_float(self.value) {
            Some(v) => v >= *exact.value(),
            None => false,
        }
    }
}

/// Standard normal CDF, `Phi(z) = erfc(-z / sqrt 2) / 2`.
///
/// `erfc` is the fdlibm rational-approximation algorithm (via `libm`), good
/// to about one ulp, far inside the 1e-10 absolute target on `|z| <= 8`.
pub fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn require_black_majority(config: UrnConfig) -> Result<()> {
    if config.black() <= config.white() {
        return domain(format!("approximations require b > w (got {config})"));
    }
    Ok(())
}

/// de Moivre-Laplace with continuity correction:
/// `2 Phi((w - 1/2 - n/2) / (sqrt(n)/2))`, `n = b + w - 1`.
pub fn normal_approximation(config: UrnConfig) -> Result<ApproxResult> {
    require_black_majority(config)?;
    let n = (config.total() - 1) as f64;
    let z = (config.white() as f64 - 0.5 - n / 2.0) / (n.sqrt() / 2.0);
    Ok(ApproxResult::new(
        2.0 * standard_normal_cdf(z),
        ApproxKind::Approximation,
    ))
}

/// `D(a || q)` in nats, with the `0 ln 0 = 0` convention.
pub fn kl_bernoulli(a: f64, q: f64) -> f64 {
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    term(a, q) + term(1.0 - a, 1.0 - q)
}

/// Chernoff bound `2 exp(-n D(a || 1/2))` with `a = (w-1)/n`, `n = b + w - 1`.
pub fn chernoff_bound(config: UrnConfig) -> Result<ApproxResult> {
    require_black_majority(config)?;
    let n = config.total() - 1;
    let value = if config.white() == 1 {
        // D(0 || 1/2) = ln 2, so the bound is exactly 2^(1-n)
        libm::ldexp(1.0, 1 - n.to_i32().unwrap_or(i32::MAX))
    } else {
        let a = (config.white() - 1) as f64 / n as f64;
        (2.0 * (-(n as f64) * kl_bernoulli(a, 0.5)).exp()).min(1.0)
    };
    Ok(ApproxResult::new(value, ApproxKind::UpperBound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::equalization_probability;

    fn urn(b: u64, w: u64) -> UrnConfig {
        UrnConfig::new(b, w).unwrap()
    }

    #[test]
    fn phi_basics() {
        assert_eq!(standard_normal_cdf(0.0), 0.5);
        for z in [0.1, 0.5, 1.0, 1.96, 3.0, 7.5] {
            let s = standard_normal_cdf(z) + standard_normal_cdf(-z);
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chernoff_exact_cases() {
        assert_eq!(chernoff_bound(urn(3, 1)).unwrap().value, 0.25);
        assert_eq!(chernoff_bound(urn(2, 1)).unwrap().value, 0.5);
        let r = chernoff_bound(urn(5, 3)).unwrap();
        assert!(r.dominates(&equalization_probability(urn(5, 3))));
        assert_eq!(r.kind, ApproxKind::UpperBound);
    }

    #[test]
    fn kl_limits() {
        assert!((kl_bernoulli(0.0, 0.5) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(kl_bernoulli(0.5, 0.5), 0.0);
    }

    #[test]
    fn normal_is_below_one() {
        let r = normal_approximation(urn(2, 1)).unwrap();
        assert!((r.value - 0.4795001221869535).abs() < 1e-12);
        for w in [1, 10, 100, 1000] {
            let v = normal_approximation(urn(w + 1, w)).unwrap().value;
            assert!(v > 0.0 && v < 1.0);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(normal_approximation(urn(2, 2)).is_err());
        assert!(chernoff_bound(urn(1, 3)).is_err());
    }

    #[test]
    fn comparison_fills_errors() {
        let exact = equalization_probability(urn(2, 1));
        let r = normal_approximation(urn(2, 1)).unwrap().compared_to(&exact);
        assert!(r.abs_error.unwrap() > 0.02 && r.abs_error.unwrap() < 0.021);
        assert_eq!(r.exact_ref, Some(exact));
    }
}
