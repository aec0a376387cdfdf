//! Prime generation and the arithmetic that sits directly on top of it:
//! prime counting, primorials, the Möbius function and the square-free
//! divisors of a primorial.
//!
//! The table is produced by a segmented sieve of Eratosthenes that stores
//! only odd numbers, one byte per candidate, `segment_len` candidates at a
//! time. Resident memory is the prime list itself plus one segment.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_bigint::BigUint;

use crate::error::{Error, Result};

pub const DEFAULT_TABLE_LIMIT: u64 = 100_000_000;
pub const DEFAULT_SEGMENT_LEN: usize = 1 << 20;
/// Largest k for which the 2^k divisors of Q_k are materialized.
pub const DEFAULT_MAX_DIVISOR_K: usize = 25;

const CACHE_MAGIC: &[u8; 4] = b"RCPT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Largest limit a table may be built for.
    pub budget: u64,
    /// Odd candidates per sieve segment.
    pub segment_len: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            budget: DEFAULT_TABLE_LIMIT,
            segment_len: DEFAULT_SEGMENT_LEN,
        }
    }
}

/// All primes up to `limit`, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

pub fn build_prime_table(limit: u64) -> Result<PrimeTable> {
    PrimeTable::new(limit)
}

/// π(x) for real x, read from `table`.
pub fn prime_count(x: f64, table: &PrimeTable) -> Result<u64> {
    table.prime_count(x)
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_config(limit, &SieveConfig::default())
    }

    pub fn with_config(limit: u64, config: &SieveConfig) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!("prime table limit must be >= 2, got {limit}")));
        }
        if limit > config.budget {
            return Err(Error::ResourceLimit {
                what: "prime table limit",
                needed: limit,
                budget: config.budget,
            });
        }
        if limit > u32::MAX as u64 {
            return Err(Error::ResourceLimit {
                what: "prime table limit (32-bit storage)",
                needed: limit,
                budget: u32::MAX as u64,
            });
        }
        if config.segment_len == 0 {
            return Err(Error::invalid("segment length must be positive"));
        }
        Ok(PrimeTable {
            limit,
            primes: segmented_sieve(limit, config.segment_len),
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().map(|&p| p as u64)
    }

    /// The k-th prime, 1-based (`nth(1) == Some(2)`).
    pub fn nth(&self, k: usize) -> Option<u64> {
        k.checked_sub(1)
            .and_then(|i| self.primes.get(i))
            .map(|&p| p as u64)
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= u32::MAX as u64 && self.primes.binary_search(&(n as u32)).is_ok()
    }

    /// Number of listed primes <= x.
    pub fn rank(&self, x: u64) -> Result<u64> {
        if x > self.limit {
            return Err(Error::OutOfRange {
                what: "x",
                value: x as f64,
                limit: self.limit,
            });
        }
        Ok(self.rank_unchecked(x))
    }

    pub(crate) fn rank_unchecked(&self, x: u64) -> u64 {
        self.primes.partition_point(|&p| (p as u64) <= x) as u64
    }

    /// π(x) = π(⌊x⌋).
    pub fn prime_count(&self, x: f64) -> Result<u64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::invalid(format!("prime_count needs x >= 0, got {x}")));
        }
        if x > self.limit as f64 {
            return Err(Error::OutOfRange {
                what: "x",
                value: x,
                limit: self.limit,
            });
        }
        Ok(self.rank_unchecked(x.floor() as u64))
    }

    /// The primes strictly less than `y`.
    pub fn primes_below(&self, y: f64) -> &[u32] {
        let end = self.primes.partition_point(|&p| (p as f64) < y);
        &self.primes[..end]
    }

    /// Least prime strictly inside (x, 6x/5), if any.
    pub fn prime_in_interval(&self, x: f64) -> Result<Option<u64>> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::invalid(format!("interval start must be >= 0, got {x}")));
        }
        let upper = 6.0 * x / 5.0;
        if upper > self.limit as f64 {
            return Err(Error::OutOfRange {
                what: "6x/5",
                value: upper,
                limit: self.limit,
            });
        }
        let idx = self.rank_unchecked(x.floor() as u64) as usize;
        Ok(self
            .primes
            .get(idx)
            .map(|&p| p as u64)
            .filter(|&p| 5.0 * (p as f64) < 6.0 * x))
    }

    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        for &p in &self.primes {
            w.write_all(&(p as u64).to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Parse("prime cache: bad magic".into()));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let limit = u64::from_le_bytes(word);
        if !(2..=u32::MAX as u64).contains(&limit) {
            return Err(Error::Parse(format!("prime cache: bad limit {limit}")));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if rest.len() % 8 != 0 {
            return Err(Error::Parse("prime cache: truncated entry".into()));
        }
        let mut primes = Vec::with_capacity(rest.len() / 8);
        for chunk in rest.chunks_exact(8) {
            let p = u64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
            if p > limit || primes.last().is_some_and(|&q: &u32| q as u64 >= p) {
                return Err(Error::Parse(format!("prime cache: entry {p} out of order")));
            }
            primes.push(p as u32);
        }
        Ok(PrimeTable { limit, primes })
    }

    /// Reads `path` if it holds a table for exactly `limit`; otherwise sieves
    /// and (re)writes the cache. A corrupt cache is rebuilt, not reported.
    pub fn load_or_build(path: &Path, limit: u64, config: &SieveConfig) -> Result<Self> {
        if let Ok(f) = File::open(path) {
            if let Ok(table) = Self::read_cache(BufReader::new(f)) {
                if table.limit == limit {
                    return Ok(table);
                }
            }
        }
        let table = Self::with_config(limit, config)?;
        table.write_cache(BufWriter::new(File::create(path)?))?;
        Ok(table)
    }
}

/// Plain sieve for the base primes below the segmented range.
fn simple_sieve(limit: usize) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn segmented_sieve(limit: u64, segment_len: usize) -> Vec<u32> {
    let root = isqrt(limit);
    let base = simple_sieve(root as usize);
    let mut primes = vec![2u32];
    // Slot i of a segment starting at odd `lo` stands for lo + 2i.
    let mut seg = vec![false; segment_len];
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + 2 * segment_len as u64 - 2).min(limit | 1);
        let slots = ((hi - lo) / 2 + 1) as usize;
        seg[..slots].fill(false);
        for &q in base.iter().skip(1) {
            let q = q as u64;
            if q * q > hi {
                break;
            }
            let mut start = (q * q).max(lo.div_ceil(q) * q);
            if start % 2 == 0 {
                start += q;
            }
            let mut j = ((start - lo) / 2) as usize;
            while j < slots {
                seg[j] = true;
                j += q as usize;
            }
        }
        for (i, &c) in seg[..slots].iter().enumerate() {
            let n = lo + 2 * i as u64;
            if !c && n <= limit {
                primes.push(n as u32);
            }
        }
        lo = hi + 2;
    }
    primes
}

/// The first `k` primes, sieving as far as needed.
pub(crate) fn first_primes(k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    let kf = k.max(6) as f64;
    // p_k < k(ln k + ln ln k) for k >= 6
    let bound = (kf * (kf.ln() + kf.ln().ln())).ceil() as usize + 16;
    simple_sieve(bound)
        .into_iter()
        .take(k)
        .map(u64::from)
        .collect()
}

/// Q_k, the product of the first k primes.
pub fn primorial(k: usize) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::invalid("primorial index must be >= 1"));
    }
    Ok(first_primes(k)
        .into_iter()
        .fold(BigUint::from(1u32), |acc, p| acc * p))
}

/// Möbius μ(n) by trial division.
pub fn mobius(n: u64) -> i8 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let mut n = n;
    let mut sign = 1i8;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MobiusDivisor {
    pub d: u128,
    pub mu: i8,
}

/// All divisors of Q_k tagged with μ(d), ascending in d.
pub fn squarefree_divisors(k: usize) -> Result<Vec<MobiusDivisor>> {
    squarefree_divisors_with_budget(k, DEFAULT_MAX_DIVISOR_K)
}

pub fn squarefree_divisors_with_budget(k: usize, max_k: usize) -> Result<Vec<MobiusDivisor>> {
    if k == 0 {
        return Err(Error::invalid("divisor enumeration needs k >= 1"));
    }
    if k > max_k || k > 26 {
        return Err(Error::ResourceLimit {
            what: "square-free divisors of Q_k (k)",
            needed: k as u64,
            budget: max_k.min(26) as u64,
        });
    }
    Ok(divisors_of_primes(&first_primes(k)))
}

pub(crate) fn divisors_of_primes(primes: &[u64]) -> Vec<MobiusDivisor> {
    let mut out = Vec::with_capacity(1 << primes.len());
    out.push(MobiusDivisor { d: 1, mu: 1 });
    for &p in primes {
        let n = out.len();
        for i in 0..n {
            let MobiusDivisor { d, mu } = out[i];
            out.push(MobiusDivisor {
                d: d * p as u128,
                mu: -mu,
            });
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn small_tables() {
        let t = build_prime_table(30).unwrap();
        assert_eq!(
            t.iter().collect::<Vec<_>>(),
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
        );
        assert_eq!(build_prime_table(2).unwrap().primes(), &[2]);
        assert_eq!(build_prime_table(100).unwrap().rank(100).unwrap(), 25);
    }

    #[test]
    fn sieve_matches_trial_division_for_odd_segment_sizes() {
        let oracle = trial_division_primes(5000);
        for seg in [1, 2, 3, 7, 64, 1000, 1 << 20] {
            let cfg = SieveConfig {
                segment_len: seg,
                ..SieveConfig::default()
            };
            for limit in [2, 3, 4, 9, 25, 49, 50, 121, 4999, 5000] {
                let t = PrimeTable::with_config(limit, &cfg).unwrap();
                let want: Vec<u64> = oracle.iter().copied().filter(|&p| p <= limit).collect();
                assert_eq!(t.iter().collect::<Vec<_>>(), want, "seg={seg} limit={limit}");
            }
        }
    }

    #[test]
    fn prime_count_examples() {
        let t = build_prime_table(1000).unwrap();
        assert_eq!(prime_count(2.0, &t).unwrap(), 1);
        assert_eq!(prime_count(17.0, &t).unwrap(), 7);
        assert_eq!(prime_count(10.5, &t).unwrap(), 4);
        assert_eq!(prime_count(1.0, &t).unwrap(), 0);
        assert!(matches!(
            prime_count(1000.5, &t),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn limit_errors() {
        assert!(matches!(build_prime_table(1), Err(Error::InvalidInput(_))));
        let tight = SieveConfig {
            budget: 1000,
            ..SieveConfig::default()
        };
        let err = PrimeTable::with_config(1001, &tight).unwrap_err();
        assert!(err.to_string().contains("1000"), "{err}");
    }

    #[test]
    fn primorial_examples() {
        assert_eq!(primorial(1).unwrap(), BigUint::from(2u32));
        assert_eq!(primorial(4).unwrap(), BigUint::from(210u32));
        assert_eq!(primorial(6).unwrap(), BigUint::from(30030u32));
        let p = first_primes(40);
        for k in 2..=40 {
            assert_eq!(
                primorial(k).unwrap(),
                primorial(k - 1).unwrap() * p[k - 1]
            );
        }
        assert!(primorial(0).is_err());
    }

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(49), 0);
        assert_eq!(mobius(97), -1);
    }

    #[test]
    fn divisor_examples() {
        let pairs = |k| {
            squarefree_divisors(k)
                .unwrap()
                .into_iter()
                .map(|m| (m.d, m.mu))
                .collect::<Vec<_>>()
        };
        assert_eq!(pairs(1), vec![(1, 1), (2, -1)]);
        assert_eq!(pairs(2), vec![(1, 1), (2, -1), (3, -1), (6, 1)]);
        let four = squarefree_divisors(4).unwrap();
        assert_eq!(four.len(), 16);
        assert_eq!(four.iter().filter(|m| m.mu == 1).count(), 8);
        for m in &four {
            assert_eq!(m.mu, mobius(m.d as u64));
            assert_eq!(210 % m.d, 0);
        }
        assert!(matches!(
            squarefree_divisors_with_budget(10, 8),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn nagura_interval_examples() {
        let t = build_prime_table(200).unwrap();
        assert_eq!(t.prime_in_interval(25.0).unwrap(), Some(29));
        assert_eq!(t.prime_in_interval(100.0).unwrap(), Some(101));
        assert_eq!(t.prime_in_interval(24.0).unwrap(), None);
        assert!(t.prime_in_interval(180.0).is_err());
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let t = build_prime_table(10_000).unwrap();
        let mut buf = Vec::new();
        t.write_cache(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"RCPT");
        assert_eq!(u64::from_le_bytes(buf[4..12].try_into().unwrap()), 10_000);
        assert_eq!(PrimeTable::read_cache(&buf[..]).unwrap(), t);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(PrimeTable::read_cache(&bad[..]).is_err());
        let truncated = &buf[..buf.len() - 3];
        assert!(PrimeTable::read_cache(truncated).is_err());
    }

    #[test]
    fn load_or_build_writes_then_reads() {
        let dir = std::env::temp_dir().join(format!("rcpt-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("primes.bin");
        let cfg = SieveConfig::default();
        let built = PrimeTable::load_or_build(&path, 5000, &cfg).unwrap();
        let loaded = PrimeTable::load_or_build(&path, 5000, &cfg).unwrap();
        assert_eq!(built, loaded);
        let other = PrimeTable::load_or_build(&path, 6000, &cfg).unwrap();
        assert_eq!(other.limit(), 6000);
        std::fs::remove_dir_all(&dir).ok();
    }
}
