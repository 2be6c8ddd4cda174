//! Independent reference computations shared by the integration tests.
//!
//! None of these call into the library's own evaluation paths.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn choose(n: u64, k: u64) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `F_{b,w}(x)` by integrating the density polynomial term by term:
/// `p^(b-1) (1-p)^(w-1) = sum_i C(w-1,i) (-1)^i p^(b-1+i)`, integrated from 0 to x,
/// times the factorial normalizer `(b+w-1)! / ((b-1)! (w-1)!)`.
pub fn beta_cdf_by_integration(b: u64, w: u64, x: &BigRational) -> BigRational {
    let norm =
        BigRational::from_integer(factorial(b + w - 1) / (factorial(b - 1) * factorial(w - 1)));
    let mut integral = BigRational::zero();
    for i in 0..w {
        let power = b + i;
        let term = BigRational::from_integer(choose(w - 1, i))
            * num_traits::pow(x.clone(), power as usize)
            / BigRational::from_integer(BigInt::from(power));
        if i % 2 == 0 {
            integral += term;
        } else {
            integral -= term;
        }
    }
    norm * integral
}

/// `2 F_{b,w}(1/2)` via the integration oracle.
pub fn equalization_by_integration(b: u64, w: u64) -> BigRational {
    q(2, 1) * beta_cdf_by_integration(b, w, &q(1, 2))
}

/// Walks every length-`n` path by hand (independent of the library's
/// enumerator) and sums the probability of those touching `target`.
pub fn first_passage_brute_force(b: u64, w: u64, target: i64, n: u32) -> BigRational {
    let mut total = BigRational::zero();
    for mask in 0u32..(1 << n) {
        let (mut black, mut white) = (b, w);
        let mut p = BigRational::one();
        let mut s = b as i64 - w as i64;
        let mut hit = s == target;
        for step in 0..n {
            let balls = black + white;
            if mask >> step & 1 == 1 {
                p *= q(black as i64, balls as i64);
                black += 1;
                s += 1;
            } else {
                p *= q(white as i64, balls as i64);
                white += 1;
                s -= 1;
            }
            hit |= s == target;
        }
        if hit {
            total += p;
        }
    }
    total
}

/// Standard normal CDF by composite Simpson quadrature of the density on
/// `[0, |z|]` with `steps` panels.
pub fn normal_cdf_by_quadrature(z: f64, steps: usize) -> f64 {
    let density = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let a = z.abs();
    let h = a / steps as f64;
    let mut s = density(0.0) + density(a);
    for i in 1..steps {
        let t = i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * density(t);
    }
    let half_mass = s * h / 3.0;
    if z >= 0.0 {
        0.5 + half_mass
    } else {
        0.5 - half_mass
    }
}
