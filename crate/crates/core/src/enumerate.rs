//! Brute-force enumeration of draw sequences, the reference against which
//! the DP and the simulators are checked.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{binomial_coefficient, UrnConfig};

/// Longest sequence length [`enumerate_sequences`] will expand (2^20 paths).
pub const MAX_ENUMERATION_STEPS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Draw {
    Black,
    White,
}

impl fmt::Display for Draw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Draw::Black => "B",
            Draw::White => "W",
        })
    }
}

/// One draw sequence with its exact probability under the urn law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceProbability {
    pub draws: Vec<Draw>,
    pub probability: BigRational,
}

impl SequenceProbability {
    pub fn black_count(&self) -> usize {
        self.draws.iter().filter(|d| **d == Draw::Black).count()
    }

    /// First step at which the excess equals `target_diff`, if any.
    pub fn hitting_time(&self, config: UrnConfig, target_diff: i64) -> Option<usize> {
        let mut s = config.initial_excess();
        if s == target_diff {
            return Some(0);
        }
        for (i, d) in self.draws.iter().enumerate() {
            s += match d {
                Draw::Black => 1,
                Draw::White => -1,
            };
            if s == target_diff {
                return Some(i + 1);
            }
        }
        None
    }

    pub fn label(&self) -> String {
        self.draws.iter().map(ToString::to_string).collect()
    }
}

/// Every length-`n` draw sequence with its probability, black-first
/// lexicographic order.
pub fn enumerate_sequences(config: UrnConfig, n: u32) -> Result<Vec<SequenceProbability>> {
    if n > MAX_ENUMERATION_STEPS {
        return Err(Error::Resource {
            what: format!("enumerating 2^{n} draw sequences"),
            max_feasible: MAX_ENUMERATION_STEPS as u64,
        });
    }
    let mut out = Vec::with_capacity(1 << n);
    let mut draws = Vec::with_capacity(n as usize);
    expand(
        config.black(),
        config.white(),
        n,
        &mut draws,
        BigUint::one(),
        BigUint::one(),
        &mut out,
    );
    Ok(out)
}

fn expand(
    black: u64,
    white: u64,
    remaining: u32,
    draws: &mut Vec<Draw>,
    num: BigUint,
    den: BigUint,
    out: &mut Vec<SequenceProbability>,
) {
    if remaining == 0 {
        out.push(SequenceProbability {
            draws: draws.clone(),
            probability: BigRational::new(num.into(), den.into()),
        });
        return;
    }
    let total = black + white;
    let den = den * total;
    draws.push(Draw::Black);
    expand(
        black + 1,
        white,
        remaining - 1,
        draws,
        &num * black,
        den.clone(),
        out,
    );
    draws.pop();
    draws.push(Draw::White);
    expand(
        black,
        white + 1,
        remaining - 1,
        draws,
        num * white,
        den,
        out,
    );
    draws.pop();
}

/// `P(tau_m <= n)` by summing over all length-`n` sequences.
pub fn first_passage_by_enumeration(
    config: UrnConfig,
    target_diff: i64,
    n: u32,
) -> Result<BigRational> {
    Ok(enumerate_sequences(config, n)?
        .into_iter()
        .filter(|s| s.hitting_time(config, target_diff).is_some())
        .fold(BigRational::zero(), |acc, s| acc + s.probability))
}

/// `x (x+1) ... (x+k-1)`.
fn rising(x: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (x + i))
}

/// Law of the number of black draws in the first `n` steps.
///
/// `P(k) = C(n,k) b^(k) w^(n-k) / (b+w)^(n)` with rising factorials `x^(k)`.
pub fn marginal_black_distribution(config: UrnConfig, n: u64) -> Vec<BigRational> {
    let den: BigRational = BigRational::from_integer(rising(config.total(), n).into());
    (0..=n)
        .map(|k| {
            let c = binomial_coefficient(n, k).expect("k <= n");
            let num = c * rising(config.black(), k) * rising(config.white(), n - k);
            BigRational::from_integer(num.into()) / &den
        })
        .collect()
}

/// `E[B_n / N_n]` under [`marginal_black_distribution`].
pub fn expected_black_fraction(config: UrnConfig, n: u64) -> BigRational {
    let pmf = marginal_black_distribution(config, n);
    let balls = BigRational::from_integer((config.total() + n).into());
    pmf.into_iter()
        .enumerate()
        .map(|(k, p)| p * BigRational::from_integer((config.black() + k as u64).into()))
        .fold(BigRational::zero(), |acc, x| acc + x)
        / balls
}
