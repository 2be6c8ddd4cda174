//! Exact finite-horizon first-passage probabilities for the excess process
//! `S_n = B_n - W_n`.
//!
//! The forward recursion runs over `(step n, black draws k)`, where
//! `S = (b - w) + 2k - n`. Every cell at step `n` shares the denominator
//! `(b+w)(b+w+1)...(b+w+n-1)`, so the table stores integer numerators and
//! only the reported probabilities are reduced to lowest terms.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::UrnConfig;
use crate::exec::{map_indexed, Execution};

/// Memory cap used when the caller does not supply one (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Rows shorter than this are always advanced sequentially.
const PARALLEL_ROW_MIN: usize = 256;

/// First-passage law of `S` to the level `target_diff`, truncated at `horizon`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpTable {
    pub config: UrnConfig,
    pub target_diff: i64,
    pub horizon: u64,
    /// `hit_pmf[n] = P(tau = n)` for `n = 0..=horizon`.
    pub hit_pmf: Vec<BigRational>,
    /// `P(tau <= horizon)`.
    pub cumulative: BigRational,
}

impl DpTable {
    /// `P(tau <= n)` for every `n <= horizon`.
    pub fn cumulative_by_step(&self) -> Vec<BigRational> {
        let mut acc = BigRational::zero();
        self.hit_pmf
            .iter()
            .map(|p| {
                acc += p;
                acc.clone()
            })
            .collect()
    }
}

/// Estimated peak memory (bytes) of a run to `horizon`.
///
/// Two rows of `horizon + 1` numerators bounded by the common denominator,
/// plus the reported pmf, whose reduced fractions are no wider.
pub fn estimated_memory(config: UrnConfig, horizon: u64) -> u64 {
    let total = config.total() as f64;
    let bits: f64 = (0..horizon).map(|i| (total + i as f64).log2()).sum::<f64>() + 64.0;
    let per_entry = bits / 8.0 + 32.0;
    let entries = 4.0 * (horizon as f64 + 1.0);
    (per_entry * entries).min(u64::MAX as f64) as u64
}

/// Largest horizon whose estimated memory fits in `budget` bytes.
pub fn max_feasible_horizon(config: UrnConfig, budget: u64) -> u64 {
    if estimated_memory(config, 0) > budget {
        return 0;
    }
    let (mut lo, mut hi) = (0u64, 1u64);
    while estimated_memory(config, hi) <= budget {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            return lo;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if estimated_memory(config, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `P(tau_m = n)` for `n <= horizon` under [`DEFAULT_MEMORY_BUDGET`].
pub fn first_passage_dp(config: UrnConfig, target_diff: i64, horizon: u64) -> Result<DpTable> {
    first_passage_dp_with(
        config,
        target_diff,
        horizon,
        DEFAULT_MEMORY_BUDGET,
        Execution::default(),
    )
}

/// Full-control variant: explicit memory budget and row scheduling.
pub fn first_passage_dp_with(
    config: UrnConfig,
    target_diff: i64,
    horizon: u64,
    memory_budget: u64,
    exec: Execution,
) -> Result<DpTable> {
    if estimated_memory(config, horizon) > memory_budget {
        return Err(Error::Resource {
            what: format!(
                "DP horizon {horizon} for {config} needs ~{} bytes, budget is {memory_budget}",
                estimated_memory(config, horizon)
            ),
            max_feasible: max_feasible_horizon(config, memory_budget),
        });
    }
    let len = usize::try_from(horizon)
        .ok()
        .and_then(|h| h.checked_add(1))
        .ok_or_else(|| Error::Domain(format!("horizon {horizon} too large")))?;

    let s0 = config.initial_excess();
    let mut hit_pmf = vec![BigRational::zero(); len];
    if s0 == target_diff {
        hit_pmf[0] = BigRational::one();
        return Ok(DpTable {
            config,
            target_diff,
            horizon,
            hit_pmf,
            cumulative: BigRational::one(),
        });
    }

    let b = config.black();
    let w = config.white();
    let total = config.total();
    let mut row: Vec<BigUint> = vec![BigUint::one()];
    let mut denom = BigUint::one();
    // running numerator of P(tau <= n) over `denom`
    let mut cum_num = BigUint::zero();

    for n in 0..horizon {
        let prev = &row;
        let next_len = prev.len() + 1;
        let cell = |k: usize| -> BigUint {
            // arrive at k blacks either by a black draw from k-1 or a white draw from k
            let mut v = BigUint::zero();
            if k > 0 {
                let from = &prev[k - 1];
                if !from.is_zero() {
                    v += from * (b + k as u64 - 1);
                }
            }
            if k < prev.len() {
                let from = &prev[k];
                if !from.is_zero() {
                    v += from * (w + n - k as u64);
                }
            }
            v
        };
        let sched = if next_len >= PARALLEL_ROW_MIN {
            exec
        } else {
            Execution::Sequential
        };
        let mut next = map_indexed(next_len, sched, cell);
        denom *= total + n;
        cum_num *= total + n;

        // at step n+1, S = target  <=>  2k = target - s0 + n + 1
        let twice_k = target_diff - s0 + n as i64 + 1;
        if twice_k >= 0 && twice_k % 2 == 0 && ((twice_k / 2) as usize) < next_len {
            let k = (twice_k / 2) as usize;
            let hit = std::mem::take(&mut next[k]);
            if !hit.is_zero() {
                cum_num += &hit;
                hit_pmf[n as usize + 1] = BigRational::new(hit.into(), denom.clone().into());
            }
        }
        row = next;
    }

    let cumulative = BigRational::new(cum_num.into(), denom.into());
    Ok(DpTable {
        config,
        target_diff,
        horizon,
        hit_pmf,
        cumulative,
    })
}
