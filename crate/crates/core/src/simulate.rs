//! Seeded Monte Carlo for the urn.
//!
//! Every estimator splits its samples into `n_streams` fixed blocks. Block `i`
//! draws from ChaCha8 seeded with `seed` on stream `(stream_id << 32) | i`,
//! and block results are combined in block order. The output is therefore a
//! pure function of `(parameters, seed, n_streams)`, whatever the thread
//! count. Only integer arithmetic and basic IEEE operations touch the random
//! draws, so results are also identical across platforms.

use rand::distr::Open01;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::exact::{BetaParams, UrnConfig};
use crate::exec::{map_indexed, Execution};

/// Root seed plus a stream offset for independent replications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed {
    pub seed: u64,
    pub stream_id: u32,
}

impl RngSeed {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u32) -> Self {
        Self { seed, stream_id }
    }

    /// Generator for block `block` of this seed.
    pub fn rng(&self, block: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((self.stream_id as u64) << 32) | block as u64);
        rng
    }
}

/// Urn contents during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UrnState {
    pub black: u64,
    pub white: u64,
}

impl UrnState {
    pub fn total(&self) -> u64 {
        self.black + self.white
    }

    pub fn excess(&self) -> i64 {
        self.black as i64 - self.white as i64
    }

    pub fn fraction_black(&self) -> f64 {
        self.black as f64 / self.total() as f64
    }

    /// Draws one ball and returns it with a twin; true when it was black.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let black = rng.random_range(0..self.total()) < self.black;
        if black {
            self.black += 1;
        } else {
            self.white += 1;
        }
        black
    }
}

impl From<UrnConfig> for UrnState {
    fn from(c: UrnConfig) -> Self {
        Self {
            black: c.black(),
            white: c.white(),
        }
    }
}

/// One transition of the urn.
pub fn step_urn<R: Rng + ?Sized>(state: UrnState, rng: &mut R) -> UrnState {
    let mut next = state;
    next.step(rng);
    next
}

/// Outcome of one trajectory run until the target level or the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstPassageSample {
    pub hit: bool,
    pub tau: Option<u64>,
    /// Excess when the run stopped: the target if hit, else `S` at the horizon.
    pub final_s: i64,
}

pub fn run_first_passage<R: Rng + ?Sized>(
    config: UrnConfig,
    target_diff: i64,
    horizon: u64,
    rng: &mut R,
) -> FirstPassageSample {
    let mut state = UrnState::from(config);
    let mut s = state.excess();
    if s == target_diff {
        return FirstPassageSample {
            hit: true,
            tau: Some(0),
            final_s: s,
        };
    }
    for n in 1..=horizon {
        s += if state.step(rng) { 1 } else { -1 };
        if s == target_diff {
            return FirstPassageSample {
                hit: true,
                tau: Some(n),
                final_s: s,
            };
        }
    }
    FirstPassageSample {
        hit: false,
        tau: None,
        final_s: s,
    }
}

/// Monte Carlo point estimate with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithCI {
    pub p_hat: f64,
    pub std_err: f64,
    pub ci95: (f64, f64),
    pub n_samples: u64,
    /// Set when the standard error is zero, so the interval carries no information.
    pub degenerate: bool,
}

const Z95: f64 = 1.959963984540054;

impl EstimateWithCI {
    /// From the sum and sum of squares of `n` summands taking values in `[0,1]`.
    pub fn from_moments(sum: f64, sum_sq: f64, n: u64) -> Self {
        let nf = n as f64;
        let p_hat = sum / nf;
        let var = (sum_sq / nf - p_hat * p_hat).max(0.0);
        let std_err = (var / nf).sqrt();
        let lo = (p_hat - Z95 * std_err).max(0.0);
        let hi = (p_hat + Z95 * std_err).min(1.0);
        Self {
            p_hat,
            std_err,
            ci95: (lo.min(p_hat), hi.max(p_hat)),
            n_samples: n,
            degenerate: std_err == 0.0,
        }
    }

    /// From `hits` successes in `n` Bernoulli trials.
    pub fn from_hits(hits: u64, n: u64) -> Self {
        Self::from_moments(hits as f64, hits as f64, n)
    }

    /// `(p_hat - reference) / std_err`, absent for degenerate estimates.
    pub fn z_score(&self, reference: f64) -> Option<f64> {
        (!self.degenerate).then(|| (self.p_hat - reference) / self.std_err)
    }
}

fn check_counts(n_samples: u64, n_streams: u32) -> Result<()> {
    if n_samples == 0 {
        return domain("need at least one sample");
    }
    if n_streams == 0 {
        return domain("need at least one stream");
    }
    Ok(())
}

/// Samples assigned to block `i` when `n` samples are split over `blocks`.
fn block_len(n: u64, blocks: u32, i: u32) -> u64 {
    let blocks = blocks as u64;
    n / blocks + u64::from((i as u64) < n % blocks)
}

/// Fraction of trajectories that reach `target_diff` within `horizon` steps.
pub fn estimate_equalization(
    config: UrnConfig,
    target_diff: i64,
    horizon: u64,
    n_samples: u64,
    seed: RngSeed,
    n_streams: u32,
) -> Result<EstimateWithCI> {
    estimate_equalization_with(
        config,
        target_diff,
        horizon,
        n_samples,
        seed,
        n_streams,
        Execution::default(),
    )
}

pub fn estimate_equalization_with(
    config: UrnConfig,
    target_diff: i64,
    horizon: u64,
    n_samples: u64,
    seed: RngSeed,
    n_streams: u32,
    exec: Execution,
) -> Result<EstimateWithCI> {
    check_counts(n_samples, n_streams)?;
    let hits: u64 = map_indexed(n_streams as usize, exec, |i| {
        let i = i as u32;
        let mut rng = seed.rng(i);
        (0..block_len(n_samples, n_streams, i))
            .filter(|_| run_first_passage(config, target_diff, horizon, &mut rng).hit)
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(EstimateWithCI::from_hits(hits, n_samples))
}

/// Order-statistic sampler for `Beta_{b,w}` with a reusable scratch buffer.
///
/// Draws `b + w - 1` open-interval uniforms and returns the `b`-th smallest,
/// found by quickselect.
#[derive(Debug, Clone)]
pub struct BetaOrderSampler {
    params: BetaParams,
    scratch: Vec<f64>,
}

impl BetaOrderSampler {
    pub fn new(params: BetaParams) -> Self {
        Self {
            params,
            scratch: Vec::with_capacity(params.trials() as usize),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let n = self.params.trials() as usize;
        self.scratch.clear();
        self.scratch
            .extend((0..n).map(|_| rng.sample::<f64, _>(Open01)));
        let rank = self.params.b() as usize - 1;
        let (_, kth, _) = self.scratch.select_nth_unstable_by(rank, f64::total_cmp);
        *kth
    }
}

pub fn sample_beta_order_statistic<R: Rng + ?Sized>(params: BetaParams, rng: &mut R) -> f64 {
    BetaOrderSampler::new(params).sample(rng)
}

/// `x^k` by repeated squaring; deterministic where `powi` is not guaranteed to be.
fn pow_u64(mut x: f64, mut k: u64) -> f64 {
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= x;
        }
        x *= x;
        k >>= 1;
    }
    acc
}

/// Probability that a walk stepping up with probability `p` ever falls
/// `gap` levels: `min(1, ((1-p)/p)^gap)`.
pub fn ruin_probability(p: f64, gap: u64) -> f64 {
    if p <= 0.5 {
        1.0
    } else {
        pow_u64((1.0 - p) / p, gap).min(1.0)
    }
}

/// Untruncated estimate of the equalization probability: mix the biased-walk
/// ruin probability over a `Beta_{b,w}` success rate.
pub fn definetti_estimator(
    config: UrnConfig,
    n_samples: u64,
    seed: RngSeed,
    n_streams: u32,
) -> Result<EstimateWithCI> {
    definetti_estimator_with(config, n_samples, seed, n_streams, Execution::default())
}

pub fn definetti_estimator_with(
    config: UrnConfig,
    n_samples: u64,
    seed: RngSeed,
    n_streams: u32,
    exec: Execution,
) -> Result<EstimateWithCI> {
    if config.black() <= config.white() {
        return domain(format!(
            "de Finetti estimator requires b > w (got {config})"
        ));
    }
    check_counts(n_samples, n_streams)?;
    let gap = config.black() - config.white();
    let params = config.as_beta();
    let (sum, sum_sq) = map_indexed(n_streams as usize, exec, |i| {
        let i = i as u32;
        let mut rng = seed.rng(i);
        let mut sampler = BetaOrderSampler::new(params);
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..block_len(n_samples, n_streams, i) {
            let x = ruin_probability(sampler.sample(&mut rng), gap);
            s += x;
            s2 += x * x;
        }
        (s, s2)
    })
    .into_iter()
    .fold((0.0, 0.0), |(a, b), (s, s2)| (a + s, b + s2));
    Ok(EstimateWithCI::from_moments(sum, sum_sq, n_samples))
}

/// Black fraction `B_n / N_n` after `n_steps` draws.
pub fn limit_fraction_sample<R: Rng + ?Sized>(config: UrnConfig, n_steps: u64, rng: &mut R) -> f64 {
    let mut state = UrnState::from(config);
    for _ in 0..n_steps {
        state.step(rng);
    }
    state.fraction_black()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn urn(b: u64, w: u64) -> UrnConfig {
        UrnConfig::new(b, w).unwrap()
    }

    #[test]
    fn step_adds_one_ball() {
        let mut rng = RngSeed::new(1).rng(0);
        let mut s = UrnState { black: 2, white: 1 };
        for n in 1..=50 {
            s = step_urn(s, &mut rng);
            assert_eq!(s.total(), 3 + n);
        }
    }

    #[test]
    fn step_frequencies() {
        let mut rng = RngSeed::new(7).rng(0);
        let n = 200_000;
        let start = UrnState { black: 2, white: 1 };
        let blacks = (0..n)
            .filter(|_| step_urn(start, &mut rng) == UrnState { black: 3, white: 1 })
            .count() as f64;
        let p = 2.0 / 3.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((blacks / n as f64 - p).abs() < 4.0 * se);
    }

    #[test]
    fn trivial_runs() {
        let mut rng = RngSeed::new(0).rng(0);
        let s = run_first_passage(urn(2, 1), 0, 0, &mut rng);
        assert_eq!(
            s,
            FirstPassageSample {
                hit: false,
                tau: None,
                final_s: 1
            }
        );
        let s = run_first_passage(urn(2, 1), 1, 1000, &mut rng);
        assert_eq!(s.tau, Some(0));
        assert!(s.hit);
    }

    #[test]
    fn hit_lands_on_target() {
        let mut rng = RngSeed::new(3).rng(0);
        for _ in 0..1000 {
            let s = run_first_passage(urn(4, 1), 0, 50, &mut rng);
            if s.hit {
                assert!(s.tau.unwrap() <= 50);
                assert_eq!(s.final_s, 0);
                assert_eq!(s.tau.unwrap() % 2, 1);
            }
        }
    }

    #[test]
    fn single_sample_is_degenerate() {
        let e = estimate_equalization(urn(2, 1), 0, 10, 1, RngSeed::new(5), 1).unwrap();
        assert!(e.p_hat == 0.0 || e.p_hat == 1.0);
        assert_eq!(e.std_err, 0.0);
        assert!(e.degenerate);
        assert_eq!(e.z_score(0.5), None);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(estimate_equalization(urn(2, 1), 0, 10, 0, RngSeed::new(5), 4).is_err());
        assert!(estimate_equalization(urn(2, 1), 0, 10, 10, RngSeed::new(5), 0).is_err());
        assert!(definetti_estimator(urn(2, 2), 10, RngSeed::new(5), 1).is_err());
    }

    #[test]
    fn block_split_covers_all_samples() {
        for (n, t) in [(10u64, 3u32), (7, 7), (3, 8), (1_000_001, 64)] {
            let total: u64 = (0..t).map(|i| block_len(n, t, i)).sum();
            assert_eq!(total, n);
        }
    }

    #[test]
    fn beta_one_one_is_the_uniform() {
        let seed = RngSeed::new(11);
        let mut a = seed.rng(0);
        let mut b = seed.rng(0);
        let params = BetaParams::new(1, 1).unwrap();
        for _ in 0..100 {
            let u: f64 = b.sample(Open01);
            assert_eq!(sample_beta_order_statistic(params, &mut a), u);
        }
    }

    #[test]
    fn ruin_clamp() {
        assert_eq!(ruin_probability(0.5, 3), 1.0);
        assert_eq!(ruin_probability(0.2, 1), 1.0);
        assert!((ruin_probability(0.75, 2) - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(pow_u64(0.5, 10), 1.0 / 1024.0);
    }

    #[test]
    fn fraction_at_zero_steps() {
        let mut rng = RngSeed::new(0).rng(0);
        assert_eq!(limit_fraction_sample(urn(1, 1), 0, &mut rng), 0.5);
    }

    #[test]
    fn execution_policy_does_not_change_estimates() {
        let c = urn(3, 2);
        let seed = RngSeed::with_stream(99, 2);
        let a =
            estimate_equalization_with(c, 0, 60, 20_000, seed, 16, Execution::Sequential).unwrap();
        let b =
            estimate_equalization_with(c, 0, 60, 20_000, seed, 16, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let a = definetti_estimator_with(c, 20_000, seed, 16, Execution::Sequential).unwrap();
        let b = definetti_estimator_with(c, 20_000, seed, 16, Execution::Parallel).unwrap();
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
        assert_eq!(a.std_err.to_bits(), b.std_err.to_bits());
    }

    #[test]
    fn interval_contains_estimate() {
        for hits in [0, 1, 50, 99, 100] {
            let e = EstimateWithCI::from_hits(hits, 100);
            assert!(e.ci95.0 <= e.p_hat && e.p_hat <= e.ci95.1);
            let bound = e.p_hat * (1.0 - e.p_hat) / 100.0;
            assert!(e.std_err * e.std_err <= bound + 1e-15);
        }
    }
}
