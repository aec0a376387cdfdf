//! Analytic inequalities used by the case analysis, evaluated in binary
//! floating point, plus a uniform scanning driver that records every grid
//! point into a [`BoundReport`].
//!
//! Quantities such as `2^(cp/ln p)` and `p^(α-1)` overflow `f64` long before
//! the interesting primes run out (p = 2971 gives exponents past 10^400), so
//! every ratio of that shape is formed from logarithms and exponentiated
//! only once the result is back in range.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{divisors_of_primes, first_primes, PrimeTable};

/// Rosser coefficient in `π(x) < c·x/ln x`.
pub const C: f64 = 1.25506;
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
pub const DUSART_EPS: f64 = 0.0058;
pub const DUSART_QUAD: f64 = 0.2;
pub const RATIO_CAP: f64 = 11.0 / 8.0;
/// Strict inequalities need a margin above this to count as passing.
pub const DELTA: f64 = 1e-9;
/// Largest number of factors multiplied in exact rationals.
pub const EXACT_PRODUCT_MAX_FACTORS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c: f64,
    pub gamma: f64,
    pub dusart_eps: f64,
    pub dusart_quad: f64,
    pub ratio_cap: f64,
}

pub const CONSTANTS: Constants = Constants {
    c: C,
    gamma: EULER_GAMMA,
    dusart_eps: DUSART_EPS,
    dusart_quad: DUSART_QUAD,
    ratio_cap: RATIO_CAP,
};

impl Constants {
    pub fn exp_gamma(&self) -> f64 {
        self.gamma.exp()
    }

    pub fn exp_neg_gamma(&self) -> f64 {
        (-self.gamma).exp()
    }
}

pub fn rosser_upper(x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::invalid(format!("rosser_upper needs x > 1, got {x}")));
    }
    Ok(C * x / x.ln())
}

pub fn rosser_lower(x: f64) -> Result<f64> {
    if !(x >= 17.0) {
        return Err(Error::invalid(format!("rosser_lower needs x >= 17, got {x}")));
    }
    Ok(x / x.ln())
}

/// d = (p − 2c) / (2 ln p); note p^d = e^{(p − 2c)/2}.
pub fn threshold_d(p: u64) -> Result<f64> {
    if p < 11 {
        return Err(Error::invalid(format!("threshold_d needs p >= 11, got {p}")));
    }
    Ok(threshold_d_unchecked(p as f64))
}

pub(crate) fn threshold_d_unchecked(p: f64) -> f64 {
    (p - 2.0 * C) / (2.0 * p.ln())
}

/// ln(2^{cp/ln p}) = (c ln 2) p / ln p.
fn ln_pow2_term(p: f64) -> f64 {
    C * std::f64::consts::LN_2 * p / p.ln()
}

/// f(p) = (2^{cp/ln p} + 1) / p^{d−1}.
pub fn power2_ratio(p: u64) -> Result<f64> {
    if p < 19 {
        return Err(Error::invalid(format!("power2_ratio needs p >= 19, got {p}")));
    }
    let pf = p as f64;
    let lp = pf.ln();
    // ln p^{d-1} = (p − 2c)/2 − ln p
    let ln_denominator = (pf - 2.0 * C) / 2.0 - lp;
    let ln_f1 = ln_pow2_term(pf) - ln_denominator;
    let ln_f2 = -ln_denominator;
    Ok(ln_f1.exp() + ln_f2.exp())
}

/// ln f(p); finite where f(p) itself underflows.
pub fn ln_power2_ratio(p: u64) -> Result<f64> {
    if p < 19 {
        return Err(Error::invalid(format!("power2_ratio needs p >= 19, got {p}")));
    }
    let pf = p as f64;
    let ln_denominator = (pf - 2.0 * C) / 2.0 - pf.ln();
    let t = ln_pow2_term(pf);
    Ok(t - ln_denominator + (-t).exp().ln_1p())
}

/// ∏_{q<p} (1 − 1/q) as an exact rational over the given primes.
pub fn mertens_product_exact(primes: &[u64]) -> BigRational {
    primes.iter().fold(BigRational::one(), |acc, &q| {
        acc * BigRational::new(BigInt::from(q - 1), BigInt::from(q))
    })
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// ∏ (q − 1)/q with the rounding error of every multiply and divide carried
/// in a second word.
pub fn mertens_product_compensated<I: IntoIterator<Item = u64>>(primes: I) -> f64 {
    let mut hi = 1.0f64;
    let mut err = 0.0f64;
    for q in primes {
        let num = (q - 1) as f64;
        let den = q as f64;
        let (prod, lo) = two_product(hi, num);
        err = err.mul_add(num, lo);
        let quot = prod / den;
        let rem = (-quot).mul_add(den, prod);
        err = (err + rem) / den;
        hi = quot;
    }
    hi + err
}

/// ∏_{q<p} (1 − 1/q) over the primes below `p` read from `table`.
pub fn mertens_product(p: u64, table: &PrimeTable) -> Result<f64> {
    if p < 3 {
        return Err(Error::invalid(format!("mertens_product needs p >= 3, got {p}")));
    }
    if p > table.limit() {
        return Err(Error::OutOfRange {
            what: "p",
            value: p as f64,
            limit: table.limit(),
        });
    }
    let below = table.primes_below(p as f64);
    Ok(mertens_product_of(below))
}

pub(crate) fn mertens_product_of(below: &[u32]) -> f64 {
    if below.len() <= EXACT_PRODUCT_MAX_FACTORS {
        let primes: Vec<u64> = below.iter().map(|&q| q as u64).collect();
        mertens_product_exact(&primes)
            .to_f64()
            .expect("ratio in (0, 1] converts")
    } else {
        mertens_product_compensated(below.iter().map(|&q| q as u64))
    }
}

/// (1 − 0.2/ln²p) / (e^γ ln p), minus 0.0058 when `with_correction`.
pub fn dusart_rhs(p: f64, with_correction: bool) -> Result<f64> {
    if !(p >= 19.0) {
        return Err(Error::invalid(format!("dusart_rhs needs p >= 19, got {p}")));
    }
    Ok(dusart_rhs_unchecked(p, with_correction))
}

fn dusart_rhs_unchecked(p: f64, with_correction: bool) -> f64 {
    let lp = p.ln();
    let base = (1.0 - DUSART_QUAD / (lp * lp)) / (CONSTANTS.exp_gamma() * lp);
    if with_correction {
        base - DUSART_EPS
    } else {
        base
    }
}

/// p·(1 − 0.2/ln²p)/(e^γ ln p): the main term that must reach 27/8 for
/// large p.
pub fn euler_main_term(p: f64) -> Result<f64> {
    Ok(p * dusart_rhs(p, false)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EulerVariant {
    /// 19 ≤ p ≤ 2971: includes the −0.0058p correction.
    SmallP,
    /// p ≥ 2999: no correction term.
    LargeP,
}

/// p/(e^γ ln p)(1 − 0.2/ln²p) [− 0.0058p] − 2^{cp/ln p}/p^{α−1}.
pub fn euler_lhs(p: u64, alpha: f64, variant: EulerVariant) -> Result<f64> {
    if p < 19 {
        return Err(Error::invalid(format!("euler_lhs needs p >= 19, got {p}")));
    }
    let d = threshold_d_unchecked(p as f64);
    if !(alpha >= d) {
        return Err(Error::invalid(format!(
            "euler_lhs needs alpha >= d = {d} for p = {p}, got {alpha}"
        )));
    }
    Ok(euler_lhs_unchecked(p as f64, alpha, variant))
}

fn euler_lhs_unchecked(p: f64, alpha: f64, variant: EulerVariant) -> f64 {
    let main = p * dusart_rhs_unchecked(p, false);
    let correction = match variant {
        EulerVariant::SmallP => DUSART_EPS * p,
        EulerVariant::LargeP => 0.0,
    };
    let ratio = (ln_pow2_term(p) - (alpha - 1.0) * p.ln()).exp();
    main - correction - ratio
}

/// 2 + 1/p^{α−1}, the right-hand side the Euler-constant inequality must beat.
pub fn euler_rhs(p: f64, alpha: f64) -> f64 {
    2.0 + (-(alpha - 1.0) * p.ln()).exp()
}

/// The bound Φ(n, p) ≥ coefficient·n − offset obtained from Legendre's
/// formula by replacing every floor with its lower estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearLowerBound {
    pub p: u64,
    /// ∏_{q<p} (1 − 1/q), reduced.
    pub coefficient: BigRational,
    /// Number of positive-μ divisors of Q_k other than 1.
    pub offset: u64,
}

impl LinearLowerBound {
    pub fn for_prime(p: u64) -> Result<Self> {
        if !matches!(p, 11 | 13 | 17) {
            return Err(Error::invalid(format!(
                "linear Legendre bound is tabulated for p in {{11, 13, 17}}, got {p}"
            )));
        }
        let below: Vec<u64> = first_primes(8).into_iter().filter(|&q| q < p).collect();
        let divisors = divisors_of_primes(&below);
        let offset = divisors.iter().filter(|m| m.mu == 1).count() as u64 - 1;
        Ok(LinearLowerBound {
            p,
            coefficient: mertens_product_exact(&below),
            offset,
        })
    }

    pub fn value(&self, n: u64) -> BigRational {
        &self.coefficient * BigRational::from_integer(BigInt::from(n))
            - BigRational::from_integer(BigInt::from(self.offset))
    }

    pub fn value_f64(&self, n: u64) -> f64 {
        self.value(n).to_f64().expect("finite")
    }

    /// Exact test of `value(n) > target`.
    pub fn exceeds(&self, n: u64, target: u64) -> bool {
        self.value(n) > BigRational::from_integer(BigInt::from(target))
    }

    /// Exact test of `value(n) >= target`.
    pub fn reaches(&self, n: u64, target: u64) -> bool {
        self.value(n) >= BigRational::from_integer(BigInt::from(target))
    }
}

pub fn legendre_linear_lower(p: u64, n: u64) -> Result<f64> {
    Ok(LinearLowerBound::for_prime(p)?.value_f64(n))
}

/// Print tolerance for a value shown with `precision` decimals: half a unit
/// in the last place plus a tenth of one.
pub fn print_tolerance(precision: u8) -> f64 {
    let unit = 10f64.powi(-(precision as i32));
    0.5 * unit + 0.1 * unit
}

/// Round half away from zero at `precision` decimals.
pub fn round_half_away(value: f64, precision: u8) -> f64 {
    let scale = 10f64.powi(precision as i32);
    (value * scale).round() / scale
}

// ---------------------------------------------------------------------------
// Scanning

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Marginal,
    Fail,
}

impl Status {
    pub fn worst(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Marginal, _) | (_, Marginal) => Marginal,
            _ => Pass,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Marginal => "marginal",
            Status::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    LessEq,
    Greater,
    GreaterEq,
}

impl Relation {
    fn margin(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Less | Relation::LessEq => rhs - lhs,
            Relation::Greater | Relation::GreaterEq => lhs - rhs,
        }
    }

    fn strict(self) -> bool {
        matches!(self, Relation::Less | Relation::Greater)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFailure {
    pub input: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub domain: String,
    pub points: u64,
    pub failures: Vec<BoundFailure>,
    /// Smallest satisfied-side slack over all points; `None` for an empty scan.
    pub worst_margin: Option<f64>,
    pub status: Status,
    pub marginal_count: u64,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Collects grid evaluations of one inequality. Accumulators for disjoint
/// parts of a domain merge into the same report a sequential scan produces.
#[derive(Debug, Clone)]
pub struct ScanAccumulator {
    relation: Relation,
    points: u64,
    failures: Vec<BoundFailure>,
    worst: Option<f64>,
    marginal: u64,
}

impl ScanAccumulator {
    pub fn new(relation: Relation) -> Self {
        ScanAccumulator {
            relation,
            points: 0,
            failures: Vec::new(),
            worst: None,
            marginal: 0,
        }
    }

    pub fn record(&mut self, input: &[f64], lhs: f64, rhs: f64) {
        self.points += 1;
        let margin = self.relation.margin(lhs, rhs);
        // NaN counts as a failure, never as slack
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        self.worst = Some(self.worst.map_or(margin, |w| w.min(margin)));
        let failed = if self.relation.strict() {
            margin <= 0.0
        } else {
            margin < -DELTA
        };
        if failed {
            self.failures.push(BoundFailure {
                input: input.to_vec(),
                lhs,
                rhs,
            });
        } else if margin <= DELTA {
            self.marginal += 1;
        }
    }

    pub fn merge(mut self, other: ScanAccumulator) -> Self {
        self.points += other.points;
        self.failures.extend(other.failures);
        self.worst = match (self.worst, other.worst) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.marginal += other.marginal;
        self
    }

    pub fn finish(mut self, name: &str, domain: &str) -> BoundReport {
        self.failures.sort_by(|a, b| {
            a.input
                .iter()
                .zip(&b.input)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let status = if !self.failures.is_empty() {
            Status::Fail
        } else if self.marginal > 0 {
            Status::Marginal
        } else {
            Status::Pass
        };
        BoundReport {
            name: name.to_string(),
            domain: domain.to_string(),
            points: self.points,
            failures: self.failures,
            worst_margin: self.worst,
            status,
            marginal_count: self.marginal,
        }
    }
}

/// Closed numeric range; each registered inequality decides which grid it
/// walks inside it (integers, primes, or primes with an auxiliary grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::invalid(format!("bad range {lo}:{hi}")));
        }
        Ok(Domain { lo, hi })
    }

    /// Parses `a:b`.
    pub fn parse(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("range must look like lo:hi, got {s:?}")))?;
        let lo = a.trim().parse::<f64>().map_err(|e| Error::invalid(format!("{a:?}: {e}")))?;
        let hi = b.trim().parse::<f64>().map_err(|e| Error::invalid(format!("{b:?}: {e}")))?;
        Domain::new(lo, hi)
    }

    fn clamp_lo(self, lo: f64) -> Domain {
        Domain {
            lo: self.lo.max(lo),
            hi: self.hi,
        }
    }

    fn int_range(self) -> std::ops::RangeInclusive<u64> {
        let lo = self.lo.max(0.0).ceil() as u64;
        let hi = self.hi.floor().max(0.0) as u64;
        lo..=hi
    }
}

/// Registered inequality names with their default domains.
pub const INEQUALITIES: &[(&str, f64, f64)] = &[
    ("rosser_upper", 2.0, 1e6),
    ("rosser_lower", 17.0, 1e6),
    ("nagura", 25.0, 1e6),
    ("eq1", 97.0, 1e4),
    ("case2_ratio", 97.0, 1e4),
    ("power2_cap", 19.0, 1e4),
    ("power2_decreasing", 19.0, 1e4),
    ("threshold_d", 13.0, 1e4),
    ("case3_ratio", 13.0, 3e3),
    ("euler_small", 19.0, 2971.0),
    ("euler_large", 2999.0, 1e4),
    ("euler_main_term", 2999.0, 1e4),
    ("dusart_cor", 19.0, 2971.0),
    ("dusart_large", 2999.0, 1e4),
];

pub fn default_domain(name: &str) -> Result<Domain> {
    INEQUALITIES
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, lo, hi)| Domain { lo, hi })
        .ok_or_else(|| unknown(name))
}

fn unknown(name: &str) -> Error {
    let names: Vec<&str> = INEQUALITIES.iter().map(|(n, _, _)| *n).collect();
    Error::invalid(format!(
        "unknown inequality {name:?}; known: {}",
        names.join(", ")
    ))
}

fn check_table(table: &PrimeTable, hi: f64, what: &'static str) -> Result<()> {
    if hi > table.limit() as f64 {
        return Err(Error::OutOfRange {
            what,
            value: hi,
            limit: table.limit(),
        });
    }
    Ok(())
}

fn primes_in(table: &PrimeTable, d: Domain) -> Result<Vec<u64>> {
    check_table(table, d.hi, "range end")?;
    Ok(table
        .iter()
        .filter(|&p| p as f64 >= d.lo && p as f64 <= d.hi)
        .collect())
}

/// z grid for the second case: 6.01, then quarter steps up to 2p (this
/// includes every integer).
pub fn z_grid(p: u64) -> Vec<f64> {
    let mut zs = vec![6.01];
    let mut k = 25u64; // z = k/4
    while k <= 8 * p {
        zs.push(k as f64 / 4.0);
        k += 1;
    }
    zs
}

/// `per_unit` uniform points per unit interval strictly inside (lo, hi),
/// plus `hi`, plus `lo` when `include_lo`.
pub fn alpha_grid(lo: f64, hi: f64, per_unit: u32, include_lo: bool) -> Vec<f64> {
    let mut out = Vec::new();
    if include_lo {
        out.push(lo);
    }
    if hi <= lo {
        return out;
    }
    let step = 1.0 / per_unit as f64;
    let mut j = 1u64;
    loop {
        let a = lo + j as f64 * step;
        if a >= hi {
            break;
        }
        out.push(a);
        j += 1;
    }
    out.push(hi);
    out
}

/// Runs the named inequality over every grid point of `domain`.
pub fn scan_inequality(name: &str, domain: &Domain, table: &PrimeTable) -> Result<BoundReport> {
    use Relation::*;
    let d = *domain;
    let label = format!("[{}, {}]", d.lo, d.hi);

    let per_p = |primes: Vec<u64>, rel: Relation, f: &(dyn Fn(u64, &mut ScanAccumulator) + Sync)| {
        primes
            .par_iter()
            .map(|&p| {
                let mut acc = ScanAccumulator::new(rel);
                f(p, &mut acc);
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(ScanAccumulator::new(rel), ScanAccumulator::merge)
    };

    let acc = match name {
        "rosser_upper" | "rosser_lower" => {
            let (rel, lo) = if name == "rosser_upper" {
                (Less, 2.0)
            } else {
                (Greater, 17.0)
            };
            let d = d.clamp_lo(lo);
            check_table(table, d.hi, "range end")?;
            let mut acc = ScanAccumulator::new(rel);
            let range = d.int_range();
            let start = *range.start();
            let mut pi = if start == 0 { 0 } else { table.rank_unchecked(start - 1) };
            for x in range {
                if table.contains(x) {
                    pi += 1;
                }
                let xf = x as f64;
                let rhs = if rel == Less { C * xf / xf.ln() } else { xf / xf.ln() };
                acc.record(&[xf], pi as f64, rhs);
            }
            acc
        }
        "nagura" => {
            check_table(table, 1.2 * d.hi, "6x/5 at range end")?;
            let mut acc = ScanAccumulator::new(Less);
            let primes = table.primes();
            for x in d.int_range() {
                let idx = table.rank_unchecked(x) as usize;
                let next = primes.get(idx).map_or(f64::INFINITY, |&p| p as f64);
                acc.record(&[x as f64], 5.0 * next, 6.0 * x as f64);
            }
            acc
        }
        "eq1" | "case2_ratio" => {
            let primes = primes_in(table, d.clamp_lo(97.0))?;
            let eq1 = name == "eq1";
            per_p(primes, GreaterEq, &|p, acc| {
                let pf = p as f64;
                let lp = pf.ln();
                for z in z_grid(p) {
                    if eq1 {
                        acc.record(&[pf, z], pf / (4.0 * lp) * (z - 5.02024), z - 1.0);
                    } else {
                        acc.record(&[pf, z], pf / lp, (4.0 * z - 4.0) / (z - 5.02024));
                    }
                }
            })
        }
        "power2_cap" => {
            let primes = primes_in(table, d.clamp_lo(19.0))?;
            let mut acc = ScanAccumulator::new(Less);
            for p in primes {
                acc.record(&[p as f64], power2_ratio(p)?, RATIO_CAP);
            }
            acc
        }
        "power2_decreasing" => {
            let primes = primes_in(table, d.clamp_lo(19.0))?;
            let mut acc = ScanAccumulator::new(Less);
            for w in primes.windows(2) {
                acc.record(&[w[1] as f64], ln_power2_ratio(w[1])?, ln_power2_ratio(w[0])?);
            }
            acc
        }
        "threshold_d" => {
            let primes = primes_in(table, d.clamp_lo(13.0))?;
            let mut acc = ScanAccumulator::new(Greater);
            for p in primes {
                acc.record(&[p as f64], threshold_d(p)?, 2.0);
            }
            acc
        }
        "case3_ratio" => {
            let primes = primes_in(table, d.clamp_lo(13.0))?;
            per_p(primes, Less, &|p, acc| {
                let pf = p as f64;
                let lp = pf.ln();
                let dd = threshold_d_unchecked(pf);
                for a in alpha_grid(2.0, dd, 64, false) {
                    acc.record(&[pf, a], a * (-(a - 2.0) * lp).exp(), 2.0);
                }
            })
        }
        "euler_small" | "euler_large" => {
            let small = name == "euler_small";
            let primes = if small {
                primes_in(table, Domain { lo: d.lo.max(19.0), hi: d.hi.min(2971.0) })?
            } else {
                primes_in(table, d.clamp_lo(2999.0))?
            };
            let mut acc = ScanAccumulator::new(if small { Greater } else { GreaterEq });
            for p in primes {
                let pf = p as f64;
                let dd = threshold_d_unchecked(pf);
                if small {
                    acc.record(&[pf], euler_lhs(p, dd, EulerVariant::SmallP)?, 2.01);
                } else {
                    acc.record(&[pf], euler_lhs(p, dd, EulerVariant::LargeP)?, euler_rhs(pf, dd));
                }
            }
            acc
        }
        "euler_main_term" => {
            let primes = primes_in(table, d.clamp_lo(19.0))?;
            let mut acc = ScanAccumulator::new(GreaterEq);
            for p in primes {
                acc.record(&[p as f64], euler_main_term(p as f64)?, 27.0 / 8.0);
            }
            acc
        }
        "dusart_cor" | "dusart_large" => {
            let cor = name == "dusart_cor";
            let primes = if cor {
                primes_in(table, Domain { lo: d.lo.max(19.0), hi: d.hi.min(2971.0) })?
            } else {
                primes_in(table, d.clamp_lo(2999.0))?
            };
            let mut acc = ScanAccumulator::new(Greater);
            for p in primes {
                acc.record(&[p as f64], mertens_product(p, table)?, dusart_rhs(p as f64, cor)?);
            }
            acc
        }
        other => return Err(unknown(other)),
    };
    Ok(acc.finish(name, &label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constants_match_definitions() {
        // H_m − ln m − 1/(2m) + 1/(12m²) converges to γ with error O(m⁻⁴)
        let m = 100_000u32;
        let mut h = 0.0f64;
        for k in (1..=m).rev() {
            h += 1.0 / k as f64;
        }
        let mf = m as f64;
        let g = h - mf.ln() - 1.0 / (2.0 * mf) + 1.0 / (12.0 * mf * mf);
        assert!(close(g, EULER_GAMMA, 1e-12), "{g}");
        assert_eq!(CONSTANTS.c, 1.25506);
        assert_eq!(CONSTANTS.ratio_cap, 1.375);
    }

    #[test]
    fn rosser_examples() {
        let up = rosser_upper(100.0).unwrap();
        assert!(close(up, 27.2537, 1e-3), "{up}");
        let lo = rosser_lower(17.0).unwrap();
        assert!(close(lo, 6.0003, 1e-3) && lo < 7.0, "{lo}");
        assert!(close(rosser_upper(std::f64::consts::E).unwrap(), C * std::f64::consts::E, 1e-12));
        assert!(rosser_upper(1.0).is_err());
        assert!(rosser_lower(16.9).is_err());
    }

    #[test]
    fn threshold_anchors() {
        let pow = |p: u64| (p as f64).powf(threshold_d(p).unwrap());
        assert!(close(pow(11), 69.8, 0.1), "{}", pow(11));
        assert!(close(pow(13), 189.6, 0.1), "{}", pow(13));
        assert!(close(pow(17), 1401.0, 1.0), "{}", pow(17));
        assert!(threshold_d(11).unwrap() < 2.0);
        assert!(threshold_d(13).unwrap() > 2.0);
        assert!(threshold_d(7).is_err());
    }

    #[test]
    fn power2_ratio_anchors() {
        let f19 = power2_ratio(19).unwrap();
        assert!((1.367..=1.379).contains(&f19), "{f19}");
        assert!(close(f19, 1.373, 5e-4), "{f19}");
        assert!(power2_ratio(23).unwrap() < f19);
        let big = power2_ratio(2971).unwrap();
        assert!((0.0..1e-300).contains(&big), "{big}");
        // the naive denominator overflows
        assert!(2971f64.powf(threshold_d(2971).unwrap() - 1.0).is_infinite());
        assert!(power2_ratio(17).is_err());
        assert!((ln_power2_ratio(19).unwrap() - f19.ln()).abs() < 1e-13);
        assert!(ln_power2_ratio(2971).unwrap() > ln_power2_ratio(2999).unwrap());
    }

    #[test]
    fn compensated_product_tracks_exact() {
        let primes = first_primes(64);
        for k in 1..=64 {
            let exact = mertens_product_exact(&primes[..k]).to_f64().unwrap();
            let comp = mertens_product_compensated(primes[..k].iter().copied());
            assert!(((exact - comp) / exact).abs() < 1e-14, "k={k} {exact} {comp}");
        }
    }

    #[test]
    fn mertens_anchors() {
        let t = PrimeTable::new(3000).unwrap();
        assert_eq!(mertens_product(3, &t).unwrap(), 0.5);
        assert!(close(mertens_product(19, &t).unwrap(), 0.181, 5e-4));
        assert!(close(mertens_product(2971, &t).unwrap(), 0.070, 5e-4));
        assert!(mertens_product(2, &t).is_err());
    }

    #[test]
    fn dusart_and_euler_anchors() {
        assert!(close(dusart_rhs(19.0, true).unwrap(), 0.180, 5e-4));
        assert!(close(dusart_rhs(769.0, true).unwrap(), 0.078, 5e-4));
        let g = euler_main_term(2999.0).unwrap();
        assert!((209.2..=210.2).contains(&g), "{g}");
        let f = |p: u64| euler_lhs(p, threshold_d(p).unwrap(), EulerVariant::SmallP).unwrap();
        assert!(close(f(19), 2.06, 5e-3), "{}", f(19));
        assert!(close(f(1409), 100.52, 5e-3), "{}", f(1409));
        assert!(close(f(2971), 190.72, 5e-3), "{}", f(2971));
        let d = threshold_d(19).unwrap();
        assert!(euler_lhs(19, d - 0.01, EulerVariant::SmallP).is_err());
        assert!(dusart_rhs(18.0, true).is_err());
    }

    #[test]
    fn linear_bound_coefficients_are_derived() {
        let expect = [(11, 48, 210, 7), (13, 480, 2310, 15), (17, 5760, 30030, 31)];
        for (p, num, den, off) in expect {
            let b = LinearLowerBound::for_prime(p).unwrap();
            assert_eq!(
                b.coefficient,
                BigRational::new(BigInt::from(num), BigInt::from(den))
            );
            assert_eq!(b.offset, off);
        }
        assert_eq!(legendre_linear_lower(11, 210).unwrap(), 41.0);
        assert_eq!(legendre_linear_lower(13, 2310).unwrap(), 465.0);
        assert_eq!(legendre_linear_lower(17, 30030).unwrap(), 5729.0);
        assert!(legendre_linear_lower(19, 100).is_err());
        let b = LinearLowerBound::for_prime(11).unwrap();
        assert!(b.exceeds(150, 150 * 2 / 11));
        assert!(!b.reaches(150, 150 * 2 / 11 + 1));
    }

    #[test]
    fn tolerance_and_rounding() {
        assert!(close(print_tolerance(2), 0.006, 1e-15));
        assert!(close(print_tolerance(3), 0.0006, 1e-15));
        assert_eq!(round_half_away(0.1805, 3), 0.181);
        assert_eq!(round_half_away(-2.5, 0), -3.0);
        assert_eq!(round_half_away(2.004, 2), 2.0);
    }

    #[test]
    fn accumulator_classification() {
        let mut acc = ScanAccumulator::new(Relation::Greater);
        acc.record(&[1.0], 2.0, 1.0);
        acc.record(&[2.0], 1.0 + 1e-10, 1.0);
        let r = acc.clone().finish("t", "d");
        assert_eq!(r.status, Status::Marginal);
        assert_eq!(r.marginal_count, 1);
        assert!(r.failures.is_empty());
        acc.record(&[0.5], 1.0, 1.0);
        let r = acc.finish("t", "d");
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.worst_margin, Some(0.0));

        let mut ge = ScanAccumulator::new(Relation::GreaterEq);
        ge.record(&[0.0], 2.0, 2.0);
        assert_eq!(ge.finish("t", "d").status, Status::Marginal);
        let empty = ScanAccumulator::new(Relation::Less).finish("e", "d");
        assert_eq!(empty.worst_margin, None);
        assert_eq!(empty.status, Status::Pass);
    }

    #[test]
    fn merged_scan_equals_sequential() {
        let mut seq = ScanAccumulator::new(Relation::Less);
        let mut a = ScanAccumulator::new(Relation::Less);
        let mut b = ScanAccumulator::new(Relation::Less);
        for i in 0..20 {
            let lhs = (i % 7) as f64;
            let input = [i as f64];
            seq.record(&input, lhs, 4.0);
            if i % 2 == 0 { a.record(&input, lhs, 4.0) } else { b.record(&input, lhs, 4.0) }
        }
        assert_eq!(b.merge(a).finish("x", "d"), seq.finish("x", "d"));
    }

    #[test]
    fn grids() {
        let g = alpha_grid(2.0, 2.1, 64, false);
        assert_eq!(g.len(), 7);
        assert_eq!(*g.last().unwrap(), 2.1);
        assert!(g[0] > 2.0);
        assert!(alpha_grid(2.0, 1.9, 64, false).is_empty());
        let z = z_grid(97);
        assert_eq!(z[0], 6.01);
        assert_eq!(*z.last().unwrap(), 194.0);
        assert!(z.contains(&7.0) && z.contains(&6.25));
    }

    #[test]
    fn scan_examples() {
        let t = PrimeTable::new(20_000).unwrap();
        let r = scan_inequality("eq1", &Domain::new(97.0, 1000.0).unwrap(), &t).unwrap();
        assert_eq!(r.status, Status::Pass, "{r:?}");
        let r = scan_inequality("power2_cap", &default_domain("power2_cap").unwrap(), &t).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.points, 1229 - 7);
        let r = scan_inequality("rosser_lower", &Domain::new(17.0, 10_000.0).unwrap(), &t).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.points, 10_000 - 16);
        let r = scan_inequality("nagura", &Domain::new(24.0, 100.0).unwrap(), &t).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.failures.len(), 1);
        assert_eq!(r.failures[0].input, vec![24.0]);
        assert!(scan_inequality("bogus", &Domain::new(1.0, 2.0).unwrap(), &t).is_err());
        assert!(scan_inequality("rosser_upper", &Domain::new(2.0, 1e6).unwrap(), &t).is_err());
    }

    #[test]
    fn domain_parsing() {
        assert_eq!(Domain::parse("19:10000").unwrap(), Domain { lo: 19.0, hi: 1e4 });
        assert!(Domain::parse("19").is_err());
        assert!(Domain::parse("5:1").is_err());
        assert!(Domain::parse("a:1").is_err());
    }
}
