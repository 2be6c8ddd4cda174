//! Exact closed forms for the equalization probability and the beta/binomial
//! identities behind them.
//!
//! For integer shapes the beta CDF is a binomial tail sum:
//!
//! ```text
//! F_{b,w}(x) = sum_{j=b}^{n} C(n,j) x^j (1-x)^(n-j),   n = b + w - 1
//! ```
//!
//! and an urn started with `b > w` equalizes with probability `2 F_{b,w}(1/2)`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Initial urn contents: `black` and `white` balls, both at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UrnConfig {
    black: u64,
    white: u64,
}

impl UrnConfig {
    pub fn new(black: u64, white: u64) -> Result<Self> {
        if black == 0 || white == 0 {
            return domain(format!(
                "urn needs at least one ball of each color (got b={black}, w={white})"
            ));
        }
        Ok(Self { black, white })
    }

    pub fn black(&self) -> u64 {
        self.black
    }

    pub fn white(&self) -> u64 {
        self.white
    }

    pub fn total(&self) -> u64 {
        self.black + self.white
    }

    /// Excess of black over white balls before the first draw.
    pub fn initial_excess(&self) -> i64 {
        self.black as i64 - self.white as i64
    }

    /// The same urn with the colors relabeled.
    pub fn swapped(&self) -> Self {
        Self {
            black: self.white,
            white: self.black,
        }
    }

    pub fn as_beta(&self) -> BetaParams {
        BetaParams {
            b: self.black,
            w: self.white,
        }
    }
}

impl fmt::Display for UrnConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(b={}, w={})", self.black, self.white)
    }
}

/// A probability held as a rational in lowest terms.
///
/// `BigRational` normalizes on construction, so two equal probabilities are
/// structurally equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProbability(BigRational);

impl ExactProbability {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return domain(format!("{value} is not a probability"));
        }
        Ok(Self(value))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_inner(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `num/den` rendering, the lossless interchange form.
    pub fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Display for ExactProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Integer shape parameters of the beta distribution `Beta_{b,w}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BetaParams {
    b: u64,
    w: u64,
}

impl BetaParams {
    pub fn new(b: u64, w: u64) -> Result<Self> {
        if b == 0 || w == 0 {
            return domain(format!("beta shapes must be positive (got b={b}, w={w})"));
        }
        Ok(Self { b, w })
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    pub fn w(&self) -> u64 {
        self.w
    }

    /// Number of trials in the equivalent binomial tail, `b + w - 1`.
    pub fn trials(&self) -> u64 {
        self.b + self.w - 1
    }

    pub fn mean(&self) -> f64 {
        self.b as f64 / (self.b + self.w) as f64
    }
}

/// `C(n, k)` as an exact integer.
pub fn binomial_coefficient(n: u64, k: u64) -> Result<BigUint> {
    if k > n {
        return domain(format!("C({n},{k}) requires k <= n"));
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc *= n - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// Row `C(n, 0..=n)` via the multiplicative recurrence.
pub(crate) fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for j in 0..n {
        c = c * (n - j) / (j + 1);
        row.push(c.clone());
    }
    row
}

/// Natural log of `C(n, k)` through log-gamma.
pub(crate) fn ln_binomial(n: u64, k: u64) -> f64 {
    let n = n as f64;
    let k = k as f64;
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// Density of `Beta_{b,w}` at `p`.
///
/// The normalizer `(b+w-1)!/((b-1)!(w-1)!)` equals `(b+w-1) C(b+w-2, b-1)`;
/// everything is combined in log space so large shapes neither overflow nor
/// underflow prematurely.
pub fn beta_density(params: BetaParams, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("beta density needs 0 < p < 1 (got {p})"));
    }
    let (b, w) = (params.b, params.w);
    if b == 1 && w == 1 {
        return Ok(1.0);
    }
    let ln_norm = ((b + w - 1) as f64).ln() + ln_binomial(b + w - 2, b - 1);
    let ln_kernel = (b - 1) as f64 * p.ln() + (w - 1) as f64 * libm::log1p(-p);
    Ok((ln_norm + ln_kernel).exp())
}

/// `F_{b,w}(x)` as an exact rational, via the binomial tail sum.
pub fn beta_cdf_rational(params: BetaParams, x: &BigRational) -> Result<ExactProbability> {
    if x.is_negative() || *x > BigRational::one() {
        return domain(format!("beta CDF needs 0 <= x <= 1 (got {x})"));
    }
    let n = params.trials();
    // x = p/q in lowest terms; the sum becomes sum C(n,j) p^j (q-p)^(n-j) / q^n
    let p = x.numer().magnitude().clone();
    let q = x.denom().magnitude().clone();
    let r = &q - &p;

    // (q-p)^k for k = 0..=n-b, consumed from the top as j climbs
    let mut r_pows = Vec::with_capacity((n - params.b + 1) as usize);
    let mut acc = BigUint::one();
    for _ in params.b..=n {
        r_pows.push(acc.clone());
        acc *= &r;
    }

    let mut num = BigUint::zero();
    let mut c = binomial_coefficient(n, params.b)?;
    let mut p_pow = num_traits::pow(p.clone(), params.b as usize);
    for j in params.b..=n {
        num += &c * &p_pow * &r_pows[(n - j) as usize];
        if j < n {
            c = c * (n - j) / (j + 1);
            p_pow *= &p;
        }
    }
    let den = num_traits::pow(q, n as usize);
    ExactProbability::new(BigRational::new(num.into(), den.into()))
}

/// Floating-point `F_{b,w}(x)`.
///
/// Each binomial term is formed in log space and the terms are added in
/// ascending order of magnitude.
pub fn beta_cdf_real(params: BetaParams, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("beta CDF needs 0 <= x <= 1 (got {x})"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let n = params.trials();
    let ln_x = x.ln();
    let ln_1mx = libm::log1p(-x);
    let mut terms: Vec<f64> = (params.b..=n)
        .map(|j| (ln_binomial(n, j) + j as f64 * ln_x + (n - j) as f64 * ln_1mx).exp())
        .collect();
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum::<f64>().min(1.0))
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn pow2(e: u64) -> BigRational {
    BigRational::from_integer((BigUint::one() << e as usize).into())
}

/// Probability that an urn started at `config` ever holds equal numbers of
/// black and white balls.
///
/// Equal starting counts give 1 (equalized at time zero). When white
/// outnumbers black the colors are swapped.
pub fn equalization_probability(config: UrnConfig) -> ExactProbability {
    let (b, w) = (config.black, config.white);
    if b == w {
        return ExactProbability::one();
    }
    let params = if b > w {
        config.as_beta()
    } else {
        config.swapped().as_beta()
    };
    let tail = beta_cdf_rational(params, &half()).expect("1/2 lies in [0,1]");
    ExactProbability::new(tail.into_inner() * BigRational::from_integer(2.into()))
        .expect("2 F(1/2) <= 1 when b > w")
}

fn require_black_majority(config: UrnConfig) -> Result<()> {
    if config.black <= config.white {
        return domain(format!(
            "explicit sum forms require b > w (got b={}, w={})",
            config.black, config.white
        ));
    }
    Ok(())
}

/// `2^{-(b+w-2)} sum_{j=0}^{w-1} C(b+w-1, j)`: cheap when `w` is small.
pub fn equalization_probability_binomial(config: UrnConfig) -> Result<ExactProbability> {
    require_black_majority(config)?;
    let n = config.total() - 1;
    let row = binomial_row(n);
    let sum: BigUint = row[..config.white as usize].iter().sum();
    ExactProbability::new(BigRational::from_integer(sum.into()) / pow2(n - 1))
}

/// `1 - 2^{-(b+w-1)} sum_{j=w}^{b-1} C(b+w-1, j)`: cheap when `b - w` is small.
pub fn equalization_probability_complement(config: UrnConfig) -> Result<ExactProbability> {
    require_black_majority(config)?;
    let n = config.total() - 1;
    let row = binomial_row(n);
    let sum: BigUint = row[config.white as usize..config.black as usize]
        .iter()
        .sum();
    ExactProbability::new(BigRational::one() - BigRational::from_integer(sum.into()) / pow2(n))
}

/// Number of binomial terms each explicit form sums: `(w, b - w)`.
pub fn explicit_form_term_counts(config: UrnConfig) -> (u64, u64) {
    (config.white, config.black.saturating_sub(config.white))
}
