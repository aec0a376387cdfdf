//! Φ(x, y): the number of integers in [1, x] with no prime factor below y.
//!
//! Three independent routes are provided. The sieve counts survivors of a
//! segmented marking pass directly from the definition. Legendre's formula
//! sums μ(d)⌊x/d⌋ over the divisors d of Q_k, either over a materialized
//! divisor list or through the recursion Φ(x, p_{k+1}) = Φ(x, p_k) −
//! Φ(⌊x/p_k⌋, p_k). All three must agree wherever they overlap.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bounds::mertens_product_of;
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

/// `auto` switches from the sieve to recursive Legendre above this x.
pub const AUTO_SIEVE_MAX: u64 = 1_000_000;
const COUNT_SEGMENT: u64 = 1 << 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sieve,
    Legendre,
    Auto,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sieve" => Ok(Algorithm::Sieve),
            "legendre" => Ok(Algorithm::Legendre),
            "auto" => Ok(Algorithm::Auto),
            other => Err(Error::invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiQuery {
    pub x: f64,
    pub y: f64,
    pub algorithm: Algorithm,
}

impl PhiQuery {
    pub fn new(x: f64, y: f64, algorithm: Algorithm) -> Result<Self> {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::invalid(format!("x must be a finite real >= 0, got {x}")));
        }
        if !(y >= 2.0) || !y.is_finite() {
            return Err(Error::invalid(format!("y must be a finite real >= 2, got {y}")));
        }
        Ok(PhiQuery { x, y, algorithm })
    }

    pub fn eval(&self, table: &PrimeTable) -> Result<u64> {
        let n = self.x.floor() as u64;
        match self.algorithm {
            Algorithm::Sieve => phi_sieve(self.x, self.y, table),
            Algorithm::Auto if n <= AUTO_SIEVE_MAX => phi_sieve(self.x, self.y, table),
            Algorithm::Legendre | Algorithm::Auto => {
                let below = sieving_primes(n, self.y, table)?;
                let opts = LegendreOptions {
                    max_direct_k: if self.algorithm == Algorithm::Auto { 0 } else { DEFAULT_MAX_DIRECT_K },
                    ..LegendreOptions::default()
                };
                legendre_with(n, &below, &opts)
            }
        }
    }
}

/// Primes below `y` that can divide something in [2, n].
fn sieving_primes(n: u64, y: f64, table: &PrimeTable) -> Result<Vec<u64>> {
    let cap = y.min(n as f64 + 1.0);
    if cap > table.limit() as f64 + 1.0 {
        return Err(Error::OutOfRange {
            what: "y",
            value: y,
            limit: table.limit(),
        });
    }
    Ok(table.primes_below(cap).iter().map(|&q| q as u64).collect())
}

fn check_x(x: f64, table: &PrimeTable) -> Result<u64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("x must be a finite real >= 0, got {x}")));
    }
    if x.floor() > table.limit() as f64 {
        return Err(Error::OutOfRange {
            what: "x",
            value: x,
            limit: table.limit(),
        });
    }
    Ok(x.floor() as u64)
}

/// Φ(x, y) by marking multiples of every prime below y, segment by segment.
pub fn phi_sieve(x: f64, y: f64, table: &PrimeTable) -> Result<u64> {
    if y.is_nan() {
        return Err(Error::invalid("y is NaN"));
    }
    let n = check_x(x, table)?;
    let sieve: Vec<u64> = sieving_primes(n, y, table)?;
    if sieve.is_empty() {
        return Ok(n);
    }
    let mut count = 0u64;
    let mut marked = vec![false; COUNT_SEGMENT.min(n.max(1)) as usize];
    let mut lo = 1u64;
    while lo <= n {
        let hi = (lo + COUNT_SEGMENT - 1).min(n);
        let len = (hi - lo + 1) as usize;
        marked[..len].fill(false);
        for &q in &sieve {
            if q > hi {
                break;
            }
            let mut m = lo.div_ceil(q).max(1) * q;
            while m <= hi {
                marked[(m - lo) as usize] = true;
                m += q;
            }
        }
        count += marked[..len].iter().filter(|&&b| !b).count() as u64;
        lo = hi + 1;
    }
    Ok(count)
}

/// Φ(m, y) for every m in [0, n_max], from one marking pass.
pub fn rough_prefix_counts(n_max: u64, y: f64, table: &PrimeTable) -> Result<Vec<u32>> {
    check_x(n_max as f64, table)?;
    let mut rough = vec![true; n_max as usize + 1];
    rough[0] = false;
    for q in sieving_primes(n_max, y, table)? {
        let mut m = q;
        while m <= n_max {
            rough[m as usize] = false;
            m += q;
        }
    }
    let mut acc = 0u32;
    Ok(rough
        .into_iter()
        .map(|r| {
            acc += r as u32;
            acc
        })
        .collect())
}

pub const DEFAULT_MAX_DIRECT_K: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LegendreOptions {
    /// Largest k summed over a materialized divisor list.
    pub max_direct_k: usize,
    /// Fall back to the recursion above `max_direct_k` instead of failing.
    pub recursive_fallback: bool,
}

impl Default for LegendreOptions {
    fn default() -> Self {
        LegendreOptions {
            max_direct_k: DEFAULT_MAX_DIRECT_K,
            recursive_fallback: true,
        }
    }
}

fn require_prime(p: u64, table: &PrimeTable) -> Result<()> {
    if p > table.limit() {
        return Err(Error::OutOfRange {
            what: "p",
            value: p as f64,
            limit: table.limit(),
        });
    }
    if !table.contains(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    Ok(())
}

/// Φ(x, p) = Σ_{d | Q_k} μ(d)⌊x/d⌋ with p = p_{k+1}.
pub fn phi_legendre(x: f64, p: u64, table: &PrimeTable) -> Result<u64> {
    phi_legendre_with(x, p, table, &LegendreOptions::default())
}

pub fn phi_legendre_with(x: f64, p: u64, table: &PrimeTable, opts: &LegendreOptions) -> Result<u64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("x must be a finite real >= 0, got {x}")));
    }
    require_prime(p, table)?;
    let below: Vec<u64> = table.primes_below(p as f64).iter().map(|&q| q as u64).collect();
    legendre_with(x.floor() as u64, &below, opts)
}

fn legendre_with(n: u64, below: &[u64], opts: &LegendreOptions) -> Result<u64> {
    if below.len() <= opts.max_direct_k {
        Ok(legendre_direct(n, below))
    } else if opts.recursive_fallback {
        Ok(legendre_recursive(n, below))
    } else {
        Err(Error::ResourceLimit {
            what: "Legendre divisor count exponent k",
            needed: below.len() as u64,
            budget: opts.max_direct_k as u64,
        })
    }
}

/// The inclusion–exclusion sum over all 2^k divisors, in exact integers.
/// Divisors d > n contribute ⌊n/d⌋ = 0 and are skipped.
pub fn legendre_direct(n: u64, primes: &[u64]) -> u64 {
    fn go(n: u64, d: u64, positive: bool, primes: &[u64]) -> i128 {
        let term = (n / d) as i128;
        let mut sum = if positive { term } else { -term };
        for (i, &q) in primes.iter().enumerate() {
            match d.checked_mul(q) {
                Some(next) if next <= n => sum += go(n, next, !positive, &primes[i + 1..]),
                _ => break,
            }
        }
        sum
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    let sum = go(n, 1, true, &sorted);
    debug_assert!(sum >= 0);
    sum as u64
}

/// Φ(n, p_{k+1}) = Φ(n, p_k) − Φ(⌊n/p_k⌋, p_k), memoized per call.
pub fn legendre_recursive(n: u64, primes: &[u64]) -> u64 {
    fn go(n: u64, k: usize, primes: &[u64], memo: &mut HashMap<(u64, usize), u64>) -> u64 {
        if k == 0 || n == 0 {
            return n;
        }
        // every m in [2, n] has a prime factor <= n <= p_k
        if primes[k - 1] >= n {
            return 1;
        }
        if let Some(&v) = memo.get(&(n, k)) {
            return v;
        }
        let v = go(n, k - 1, primes, memo) - go(n / primes[k - 1], k - 1, primes, memo);
        memo.insert((n, k), v);
        v
    }
    go(n, primes.len(), primes, &mut HashMap::new())
}

/// The explicit set X_n^p of p-rough integers up to n.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoughSet {
    pub n: u64,
    pub p: u64,
    pub members: Vec<u64>,
}

impl RoughSet {
    pub fn count(&self) -> u64 {
        self.members.len() as u64
    }
}

pub fn rough_set(n: u64, p: u64, table: &PrimeTable) -> Result<RoughSet> {
    check_x(n as f64, table)?;
    if p <= table.limit() && !table.contains(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let mut rough = vec![true; n as usize + 1];
    for q in sieving_primes(n, p as f64, table)? {
        let mut m = q;
        while m <= n {
            rough[m as usize] = false;
            m += q;
        }
    }
    let members = (1..=n).filter(|&m| rough[m as usize]).collect();
    Ok(RoughSet { n, p, members })
}

/// Φ(⌊zp/2⌋, p).
pub fn phi_half_integer(z: u64, p: u64, table: &PrimeTable) -> Result<u64> {
    phi_sieve((z * p / 2) as f64, p as f64, table)
}

/// p^α ∏_{q<p}(1 − 1/q) − 2^{π(p)}, as a real. Large terms are combined in
/// log space and the result saturates to ±∞ only if it is itself out of
/// `f64` range.
pub fn mertens_lower_bound(p: u64, alpha: f64, table: &PrimeTable) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be > 0, got {alpha}")));
    }
    require_prime(p, table)?;
    let product = mertens_product_of(table.primes_below(p as f64));
    let pi_p = table.rank_unchecked(p) as f64;
    let ln_main = alpha * (p as f64).ln() + product.ln();
    let ln_sub = pi_p * std::f64::consts::LN_2;
    const LN_1E300: f64 = 690.775_527_898_213_7;
    if ln_main.max(ln_sub) <= LN_1E300 {
        return Ok(ln_main.exp() - ln_sub.exp());
    }
    // e^a − e^b = ±e^{max} (1 − e^{−|a−b|})
    let (big, small, sign) = if ln_main >= ln_sub {
        (ln_main, ln_sub, 1.0)
    } else {
        (ln_sub, ln_main, -1.0)
    };
    let ln_abs = big + (-(-(big - small)).exp()).ln_1p();
    Ok(sign * ln_abs.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable {
        PrimeTable::new(200_000).unwrap()
    }

    #[test]
    fn sieve_examples() {
        let t = table();
        assert_eq!(phi_sieve(22.0, 11.0, &t).unwrap(), 5);
        assert_eq!(phi_sieve(33.0, 11.0, &t).unwrap(), 8);
        for x in [0.0, 1.0, 7.5, 1000.0] {
            assert_eq!(phi_sieve(x, 2.0, &t).unwrap(), x.floor() as u64);
        }
        assert_eq!(phi_sieve(10.0, 100.0, &t).unwrap(), 1);
        assert!(matches!(phi_sieve(200_001.0, 3.0, &t), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn non_prime_y_compares_directly() {
        let t = table();
        assert_eq!(phi_sieve(100.0, 10.5, &t).unwrap(), phi_sieve(100.0, 11.0, &t).unwrap());
        assert_eq!(phi_sieve(100.0, 11.5, &t).unwrap(), phi_sieve(100.0, 13.0, &t).unwrap());
    }

    #[test]
    fn legendre_examples() {
        let t = table();
        assert_eq!(phi_legendre(38.5, 11, &t).unwrap(), 9);
        assert_eq!(phi_legendre(22.0, 11, &t).unwrap(), 5);
        assert_eq!(
            phi_legendre(1e5, 47, &t).unwrap(),
            phi_sieve(1e5, 47.0, &t).unwrap()
        );
        assert!(phi_legendre(10.0, 12, &t).is_err());
    }

    #[test]
    fn legendre_routes_agree() {
        let t = table();
        let below: Vec<u64> = t.primes_below(60.0).iter().map(|&q| q as u64).collect();
        for n in (0..5000).step_by(37) {
            assert_eq!(legendre_direct(n, &below), legendre_recursive(n, &below), "n={n}");
        }
    }

    #[test]
    fn legendre_budget() {
        let t = table();
        let strict = LegendreOptions { max_direct_k: 4, recursive_fallback: false };
        assert!(matches!(
            phi_legendre_with(1000.0, 13, &t, &strict),
            Err(Error::ResourceLimit { .. })
        ));
        let fallback = LegendreOptions { max_direct_k: 4, recursive_fallback: true };
        assert_eq!(
            phi_legendre_with(1000.0, 13, &t, &fallback).unwrap(),
            phi_sieve(1000.0, 13.0, &t).unwrap()
        );
    }

    #[test]
    fn rough_set_examples() {
        let t = table();
        assert_eq!(rough_set(26, 13, &t).unwrap().members, vec![1, 13, 17, 19, 23]);
        assert_eq!(rough_set(10, 2, &t).unwrap().members, (1..=10).collect::<Vec<_>>());
        let s = rough_set(69, 23, &t).unwrap();
        assert_eq!(s.members, vec![1, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67]);
        assert_eq!(s.count(), phi_sieve(69.0, 23.0, &t).unwrap());
        assert!(rough_set(10, 4, &t).is_err());
    }

    #[test]
    fn half_integer_examples() {
        let t = table();
        assert_eq!(phi_half_integer(5, 11, &t).unwrap(), 6);
        assert_eq!(phi_half_integer(4, 13, &t).unwrap(), 5);
        assert_eq!(phi_half_integer(19, 11, &t).unwrap(), 24);
    }

    #[test]
    fn prefix_counts_match_pointwise() {
        let t = table();
        let counts = rough_prefix_counts(3000, 17.0, &t).unwrap();
        for n in [0u64, 1, 16, 17, 34, 999, 3000] {
            assert_eq!(counts[n as usize] as u64, phi_sieve(n as f64, 17.0, &t).unwrap());
        }
    }

    #[test]
    fn mertens_lower_bound_examples() {
        let t = table();
        // 6859 · ∏_{q<19}(1 − 1/q) − 2^8, product evaluated independently
        let prod: f64 = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0].iter().map(|q| 1.0 - 1.0 / q).product();
        let want = 6859.0 * prod - 256.0;
        let got = mertens_lower_bound(19, 3.0, &t).unwrap();
        assert!((got - want).abs() < 1e-6, "{got} {want}");
        assert!(got <= phi_sieve(6859.0, 19.0, &t).unwrap() as f64);

        // the subtracted term is 2^{π(p)}, so π(2) = 1 gives 2 − 2
        assert_eq!(mertens_lower_bound(2, 1.0, &t).unwrap(), 0.0);
        let got = mertens_lower_bound(11, 2.0, &t).unwrap();
        assert!((got - (121.0 * 8.0 / 35.0 - 32.0)).abs() < 1e-9);
        assert_eq!(phi_sieve(121.0, 11.0, &t).unwrap(), 28);
    }

    #[test]
    fn mertens_lower_bound_log_space() {
        let t = PrimeTable::new(3000).unwrap();
        // p^α ~ 10^640: the difference is dominated by the main term
        let v = mertens_lower_bound(2971, 185.0, &t).unwrap();
        assert!(v.is_infinite() && v > 0.0);
        // 2^{π(p)} dominates when α is tiny
        let v = mertens_lower_bound(2971, 0.5, &t).unwrap();
        assert!(v < 0.0);
        // in range but only through log space: 2^{π(2971)} ≈ 10^128, p^α ≈ 10^301
        let v = mertens_lower_bound(2971, 86.7, &t).unwrap();
        let direct = 86.7 * 2971f64.ln() + mertens_product_of(t.primes_below(2971.0)).ln();
        assert!(((v.ln() - direct) / direct).abs() < 1e-12);
    }

    #[test]
    fn query_validation_and_auto() {
        let t = table();
        assert!(PhiQuery::new(-1.0, 3.0, Algorithm::Auto).is_err());
        assert!(PhiQuery::new(1.0, 1.5, Algorithm::Auto).is_err());
        let q = PhiQuery::new(150_000.0, 29.0, Algorithm::Legendre).unwrap();
        assert_eq!(q.eval(&t).unwrap(), phi_sieve(150_000.0, 29.0, &t).unwrap());
        let q = PhiQuery::new(5e6, 29.0, Algorithm::Auto).unwrap();
        assert_eq!(q.eval(&t).unwrap(), legendre_direct(5_000_000, &[2, 3, 5, 7, 11, 13, 17, 19, 23]));
        assert_eq!("sieve".parse::<Algorithm>().unwrap(), Algorithm::Sieve);
        assert!("fast".parse::<Algorithm>().is_err());
    }
}
