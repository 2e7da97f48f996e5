//! Moebius function, the square-free zeta normalization and the prime
//! entanglement spectrum `ε_p = s ln p`.
//!
//! The normalization `A_F = ζ(2s)/ζ(s) = Π_p (1 + p^{-s})^{-1}` is evaluated
//! both as a truncated Euler product and as the truncated sum
//! `1/A_F = Σ_k |μ(k)| k^{-s}`, each with an analytic tail estimate.
//! `E0 = -ln A_F = ln(ζ(s)/ζ(2s))`.

use serde::{Deserialize, Serialize};

use crate::designer::{DesignTarget, OrderingPolicy};
use crate::error::{Error, Result};

/// Smallest truncation accepted by [`normalization`].
pub const MIN_TRUNCATION: usize = 1_000;
/// Largest truncation the adaptive doubling may reach.
pub const MAX_TRUNCATION: usize = 10_000_000;
/// Successive estimates closer than this stop the doubling.
pub const CONVERGENCE_TOL: f64 = 1e-10;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `μ(n)` by trial division.
pub fn moebius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::invalid("moebius(0) is undefined"));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Primes up to `limit` together with `μ(k)` for `k ≤ limit` (`μ[0] = 0`).
#[derive(Debug, Clone)]
pub struct Sieve {
    pub primes: Vec<u32>,
    pub moebius: Vec<i8>,
}

impl Sieve {
    /// Linear sieve.
    pub fn new(limit: usize) -> Self {
        let mut mu = vec![0i8; limit + 1];
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        if limit >= 1 {
            mu[1] = 1;
        }
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i as u32);
                mu[i] = -1;
            }
            for &p in &primes {
                let p = p as usize;
                let m = i * p;
                if m > limit {
                    break;
                }
                composite[m] = true;
                if i % p == 0 {
                    mu[m] = 0;
                    break;
                }
                mu[m] = -mu[i];
            }
        }
        Sieve { primes, moebius: mu }
    }
}

/// The first `n` primes, ascending.
pub fn first_primes(n: usize) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n ≥ 6
    let x = n.max(6) as f64;
    let bound = (x * (x.ln() + x.ln().ln())).ceil() as usize + 1;
    Sieve::new(bound).primes.into_iter().take(n).map(u64::from).collect()
}

/// Exponential integral `E1(x)` for `x > 0`.
fn exp_integral_e1(x: f64) -> f64 {
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        // modified Lentz on the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Logarithmic integral `li(x) = Ei(ln x)` for `x > 1`, by the power series.
fn log_integral(x: f64) -> f64 {
    let t = x.ln();
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..400 {
        term *= t / k as f64;
        let add = term / k as f64;
        sum += add;
        if add < 1e-17 * sum {
            break;
        }
    }
    EULER_GAMMA + t.ln() + sum
}

/// `Σ_{p > K} p^{-s}` from `π(x) ≈ li(x) - li(√x)/2`, anchored at the exact
/// count `π(K)`.
fn prime_tail(s: f64, k: f64, pi_k: f64) -> f64 {
    let lk = k.ln();
    let smooth = exp_integral_e1((s - 1.0) * lk) - 0.5 * exp_integral_e1((s - 0.5) * lk);
    let boundary = (log_integral(k) - 0.5 * log_integral(k.sqrt()) - pi_k) * k.powf(-s);
    smooth + boundary
}

/// `Σ_{k > K} |μ(k)| k^{-s}` from the square-free density `6/π²`, anchored at
/// the exact count `Q(K)`.
fn square_free_tail(s: f64, k: f64, q_k: f64) -> f64 {
    let density = 6.0 / std::f64::consts::PI.powi(2);
    density * s * k.powf(1.0 - s) / (s - 1.0) - q_k * k.powf(-s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub s: f64,
    /// Euler-product value of `A_F`.
    #[serde(rename = "A_F")]
    pub a_f: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    /// `A_F` from the square-free sum.
    pub a_f_direct: f64,
    /// Final truncation `K`.
    pub truncation: usize,
}

impl Normalization {
    pub fn discrepancy(&self) -> f64 {
        (self.a_f - self.a_f_direct).abs()
    }
}

fn estimates(s: f64, k: usize) -> (f64, f64) {
    let sieve = Sieve::new(k);
    let mut log_euler = 0.0;
    for &p in &sieve.primes {
        log_euler -= (p as f64).powf(-s).ln_1p();
    }
    // ln(1 + x) = x + O(x²) on the tail; x² terms are below K^{1-2s}
    log_euler -= prime_tail(s, k as f64, sieve.primes.len() as f64);

    let mut sum = 0.0;
    let mut count = 0usize;
    // descending order adds the small terms first
    for n in (1..=k).rev() {
        if sieve.moebius[n] != 0 {
            sum += (n as f64).powf(-s);
            count += 1;
        }
    }
    sum += square_free_tail(s, k as f64, count as f64);
    (log_euler.exp(), 1.0 / sum)
}

/// `A_F(s)` with truncation doubled from `k_min` until both estimates settle.
pub fn normalization(s: f64, k_min: usize) -> Result<Normalization> {
    if s.is_nan() || s <= 1.0 {
        return Err(Error::Divergent(s));
    }
    if k_min < MIN_TRUNCATION {
        return Err(Error::invalid(format!("truncation must be at least {MIN_TRUNCATION}")));
    }
    let mut k = k_min.min(MAX_TRUNCATION);
    let mut prev = estimates(s, k);
    while k * 2 <= MAX_TRUNCATION {
        k *= 2;
        let next = estimates(s, k);
        let settled = (next.0 - prev.0).abs() < CONVERGENCE_TOL && (next.1 - prev.1).abs() < CONVERGENCE_TOL;
        prev = next;
        if settled {
            break;
        }
    }
    let (a_f, a_f_direct) = prev;
    Ok(Normalization { s, a_f, e0: -a_f.ln(), a_f_direct, truncation: k })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeSpectrum {
    pub s: f64,
    pub pairs: usize,
    /// First `pairs` primes, descending.
    pub primes: Vec<u64>,
    /// `s ln p`, descending.
    pub eps: Vec<f64>,
    #[serde(rename = "A_F")]
    pub a_f: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
}

fn prime_energies(s: f64, pairs: usize) -> (Vec<u64>, Vec<f64>) {
    let mut primes = first_primes(pairs);
    primes.reverse();
    let eps = primes.iter().map(|&p| s * (p as f64).ln()).collect();
    (primes, eps)
}

pub fn prime_spectrum(s: f64, pairs: usize) -> Result<PrimeSpectrum> {
    if pairs == 0 {
        return Err(Error::invalid("need at least one pair"));
    }
    let norm = normalization(s, MIN_TRUNCATION)?;
    let (primes, eps) = prime_energies(s, pairs);
    Ok(PrimeSpectrum { s, pairs, primes, eps, a_f: norm.a_f, e0: norm.e0 })
}

/// Design target placing `s ln p` on the pairs, largest prime innermost.
pub fn prime_spectrum_target(s: f64, pairs: usize, couplings: Vec<f64>) -> Result<DesignTarget> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("entanglement temperature must be non-negative, got {s}")));
    }
    if pairs == 0 {
        return Err(Error::invalid("need at least one pair"));
    }
    let (_, eps) = prime_energies(s, pairs);
    Ok(DesignTarget::energies(eps, couplings).with_ordering(OrderingPolicy::AsGiven))
}
