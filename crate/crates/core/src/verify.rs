//! Machine checks of Φ(n, p) ≥ ⌊2n/p⌋ + 1 for primes p ≥ 11 and n ≥ 2p.
//!
//! [`verify_theorem`] counts rough numbers directly. The case drivers
//! reproduce the finite computations and inequality chains of the four-way
//! split 2p ≤ n ≤ 3p, 3p < n ≤ p², p² < n ≤ p^d and n > p^d.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    euler_lhs, euler_rhs, scan_inequality, threshold_d, BoundReport, Domain, EulerVariant,
    LinearLowerBound, Relation, ScanAccumulator, Status, C,
};
use crate::bounds::{alpha_grid, z_grid};
use crate::error::{Error, Result};
use crate::format_significant;
use crate::primes::PrimeTable;
use crate::tables::{check_table, fixture, Cell, CellMismatch, TableId};

/// Counterexamples kept per report; the total is still counted.
pub const MAX_COUNTEREXAMPLES: usize = 1000;
/// Largest n for which case drivers evaluate Φ directly by default.
pub const DEFAULT_PHI_CAP: u64 = 1_000_000;
/// Upper end of the linear-bound range for p ∈ {11, 13, 17}.
pub const LINEAR_BOUND_MAX: u64 = 100_000;
/// Second-case scans stop at this prime; larger p use the analytic chain.
pub const SCAN_P_MAX: u64 = 89;
/// Last prime covered by the tabulated Mertens data.
pub const SMALL_P_MAX: u64 = 2971;

const SEGMENT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub p: u64,
    pub n: u64,
    pub phi: u64,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p: u64,
    /// (z, Φ(⌊pz/2⌋, p))
    pub values: Vec<(u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub target: String,
    pub status: Status,
    pub checked: u64,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed_ms: u64,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<BoundReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mismatches: Vec<CellMismatch>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scans: Vec<ScanRow>,
}

impl VerificationReport {
    pub fn new(target: impl Into<String>) -> Self {
        VerificationReport {
            target: target.into(),
            status: Status::Pass,
            checked: 0,
            counterexamples: Vec::new(),
            elapsed_ms: 0,
            notes: Vec::new(),
            checks: Vec::new(),
            mismatches: Vec::new(),
            scans: Vec::new(),
        }
    }

    fn recompute_status(&mut self) {
        let mut status = self.checks.iter().fold(Status::Pass, |s, c| s.worst(c.status));
        if !self.counterexamples.is_empty() || !self.mismatches.is_empty() {
            status = Status::Fail;
        }
        self.status = self.status.worst(status);
    }

    /// Stamps the elapsed time and derives the status from the contents.
    pub fn finish(&mut self, start: Instant) {
        self.elapsed_ms = start.elapsed().as_millis() as u64;
        self.recompute_status();
    }

    /// Marks the report failed without a counterexample.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
        self.status = Status::Fail;
    }

    pub fn add_check(&mut self, check: BoundReport) {
        self.checked += check.points;
        self.checks.push(check);
    }

    /// Folds another report into this one.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.checked += other.checked;
        let room = MAX_COUNTEREXAMPLES.saturating_sub(self.counterexamples.len());
        self.counterexamples.extend(other.counterexamples.into_iter().take(room));
        self.checks.extend(other.checks);
        self.mismatches.extend(other.mismatches);
        self.scans.extend(other.scans);
        let target = other.target;
        self.notes.extend(other.notes.into_iter().map(|n| format!("{target}: {n}")));
        self.status = self.status.worst(other.status);
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "target: {}", self.target);
        let _ = writeln!(out, "status: {}", self.status);
        let _ = writeln!(out, "checked: {}", self.checked);
        let _ = writeln!(out, "counterexamples: {}", self.counterexamples.len());
        for c in self.counterexamples.iter().take(20) {
            let _ = writeln!(out, "  p={} n={} phi={} bound={}", c.p, c.n, c.phi, c.bound);
        }
        if !self.mismatches.is_empty() {
            let _ = writeln!(out, "mismatches: {}", self.mismatches.len());
            for m in self.mismatches.iter().take(20) {
                let _ = writeln!(
                    out,
                    "  {} {}: computed {} fixture {}",
                    m.row, m.column, m.computed, m.fixture
                );
            }
        }
        for s in &self.scans {
            let values: Vec<String> = s.values.iter().map(|(_, v)| v.to_string()).collect();
            let first = s.values.first().map_or(0, |v| v.0);
            let last = s.values.last().map_or(0, |v| v.0);
            let _ = writeln!(out, "scan p={} z={first}..{last}: {}", s.p, values.join(" "));
        }
        if !self.checks.is_empty() {
            let _ = writeln!(out, "checks:");
            for c in &self.checks {
                let margin = c
                    .worst_margin
                    .map_or_else(|| "-".to_string(), |m| format_significant(m, 6));
                let _ = writeln!(
                    out,
                    "  {} {}: {} ({} points, worst margin {margin})",
                    c.name, c.domain, c.status, c.points
                );
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out, "notes:");
            for n in &self.notes {
                let _ = writeln!(out, "  - {n}");
            }
        }
        let _ = writeln!(out, "elapsed: {} ms", self.elapsed_ms);
        out
    }
}

/// Builds a report for claims that must hold with exact equality, where a
/// zero margin is the expected outcome rather than a near miss.
fn equality_report(name: &str, domain: &str, cases: &[(Vec<f64>, f64, f64)]) -> BoundReport {
    let failures: Vec<_> = cases
        .iter()
        .filter(|(_, l, r)| l != r)
        .map(|(input, lhs, rhs)| crate::bounds::BoundFailure {
            input: input.clone(),
            lhs: *lhs,
            rhs: *rhs,
        })
        .collect();
    let status = if failures.is_empty() { Status::Pass } else { Status::Fail };
    BoundReport {
        name: name.to_string(),
        domain: domain.to_string(),
        points: cases.len() as u64,
        failures,
        worst_margin: Some(0.0),
        status,
        marginal_count: 0,
    }
}

/// The interval endpoints 2p, 3p, p², p^d of the case split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseSplit {
    pub p: u64,
    pub boundaries: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    One,
    Two,
    Three,
    Four,
}

impl CaseSplit {
    pub fn new(p: u64) -> Result<Self> {
        if p < 11 {
            return Err(Error::invalid(format!("case split needs p >= 11, got {p}")));
        }
        let pf = p as f64;
        Ok(CaseSplit {
            p,
            boundaries: [2.0 * pf, 3.0 * pf, pf * pf, pf.powf(threshold_d(p)?)],
        })
    }

    /// (p², p^d] is empty.
    pub fn third_interval_empty(&self) -> bool {
        self.boundaries[3] <= self.boundaries[2]
    }

    pub fn is_increasing(&self) -> bool {
        self.boundaries.windows(2).all(|w| w[0] < w[1])
    }

    /// `None` below 2p.
    pub fn case_of(&self, n: u64) -> Option<Case> {
        let n = n as f64;
        let [a, b, c, d] = self.boundaries;
        if n < a {
            None
        } else if n <= b {
            Some(Case::One)
        } else if n <= c {
            Some(Case::Two)
        } else if n <= d {
            Some(Case::Three)
        } else {
            Some(Case::Four)
        }
    }
}

// ---------------------------------------------------------------------------
// Rough counting

fn sieving_primes(p: u64, table: &PrimeTable) -> Vec<u64> {
    table.primes_below(p as f64).iter().map(|&q| q as u64).collect()
}

/// Calls `visit(n, Φ(n, p))` for every n in [1, n_max], marking one segment
/// at a time.
fn walk_rough_counts(n_max: u64, sieve: &[u64], mut visit: impl FnMut(u64, u64)) {
    let mut marked = vec![false; SEGMENT.min(n_max.max(1)) as usize];
    let mut count = 0u64;
    let mut lo = 1u64;
    while lo <= n_max {
        let hi = (lo + SEGMENT - 1).min(n_max);
        let len = (hi - lo + 1) as usize;
        marked[..len].fill(false);
        for &q in sieve {
            if q > hi {
                break;
            }
            let mut m = lo.div_ceil(q) * q;
            while m <= hi {
                marked[(m - lo) as usize] = true;
                m += q;
            }
        }
        for (i, &is_marked) in marked[..len].iter().enumerate() {
            if !is_marked {
                count += 1;
            }
            visit(lo + i as u64, count);
        }
        lo = hi + 1;
    }
}

/// Φ(m, p) for m in [0, n_max].
fn prefix_counts(n_max: u64, p: u64, table: &PrimeTable) -> Vec<u64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(0);
    walk_rough_counts(n_max, &sieving_primes(p, table), |_, c| out.push(c));
    out
}

/// Checks the bound for every n in [from, to]; returns (checked, counterexamples).
fn theorem_range(p: u64, from: u64, to: u64, table: &PrimeTable) -> (u64, Vec<Counterexample>) {
    let mut checked = 0;
    let mut bad = Vec::new();
    if from > to {
        return (0, bad);
    }
    walk_rough_counts(to, &sieving_primes(p, table), |n, phi| {
        if n >= from {
            checked += 1;
            let bound = 2 * n / p + 1;
            if phi < bound && bad.len() < MAX_COUNTEREXAMPLES {
                bad.push(Counterexample { p, n, phi, bound });
            }
        }
    });
    (checked, bad)
}

fn require_limit(table: &PrimeTable, needed: u64, what: &'static str) -> Result<()> {
    if needed > table.limit() {
        return Err(Error::ResourceLimit {
            what,
            needed,
            budget: table.limit(),
        });
    }
    Ok(())
}

fn primes_between(table: &PrimeTable, lo: u64, hi: u64) -> Vec<u64> {
    table.iter().skip_while(|&p| p < lo).take_while(|&p| p <= hi).collect()
}

/// Merges per-prime accumulators in order; each slot keeps its relation.
fn merge_into<const N: usize>(merged: &mut [ScanAccumulator; N], parts: [ScanAccumulator; N]) {
    for (m, a) in merged.iter_mut().zip(parts) {
        let placeholder = ScanAccumulator::new(Relation::GreaterEq);
        *m = std::mem::replace(m, placeholder).merge(a);
    }
}

fn push_counterexamples(report: &mut VerificationReport, found: Vec<Counterexample>) {
    let room = MAX_COUNTEREXAMPLES.saturating_sub(report.counterexamples.len());
    if found.len() > room {
        report.notes.push(format!("counterexample list truncated at {MAX_COUNTEREXAMPLES}"));
    }
    report.counterexamples.extend(found.into_iter().take(room));
}

// ---------------------------------------------------------------------------
// Brute force

/// Φ(n, p) ≥ ⌊2n/p⌋ + 1 for every prime 11 ≤ p ≤ p_max and 2p ≤ n ≤ n_max.
pub fn verify_theorem(p_max: u64, n_max: u64, table: &PrimeTable) -> Result<VerificationReport> {
    let start = Instant::now();
    require_limit(table, n_max, "n_max")?;
    require_limit(table, p_max, "p_max")?;
    let mut report = VerificationReport::new("theorem");
    let primes = primes_between(table, 11, p_max.min(n_max / 2));
    let results: Vec<_> = primes
        .par_iter()
        .map(|&p| theorem_range(p, 2 * p, n_max, table))
        .collect();
    for (checked, bad) in results {
        report.checked += checked;
        push_counterexamples(&mut report, bad);
    }

    let mut split_cases = Vec::new();
    for &p in &primes {
        let split = CaseSplit::new(p)?;
        let pf = p as f64;
        let empty = if split.third_interval_empty() { 1.0 } else { 0.0 };
        let expect_empty = if p == 11 { 1.0 } else { 0.0 };
        split_cases.push((vec![pf], empty, expect_empty));
        if p > 11 {
            let inc = if split.is_increasing() { 1.0 } else { 0.0 };
            split_cases.push((vec![pf], inc, 1.0));
        }
    }
    if !primes.is_empty() {
        let domain = format!("[11, {}]", primes[primes.len() - 1]);
        report.add_check(equality_report("case_split", &domain, &split_cases));
    }
    report.notes.push(format!(
        "{} primes, n from 2p to {n_max}; the four cases cover [2p, oo) for each",
        primes.len()
    ));
    report.finish(start);
    Ok(report)
}

// ---------------------------------------------------------------------------
// First case

/// Φ(2p, p) ≥ 5, Φ(5p/2, p) ≥ 6, Φ(3p, p) ≥ 7 for every prime 11 ≤ p ≤ p_max,
/// plus the printed rough sets for 11 ≤ p ≤ 23.
pub fn verify_case1(p_max: u64, table: &PrimeTable) -> Result<VerificationReport> {
    let start = Instant::now();
    require_limit(table, 3 * p_max.max(23), "3 p_max")?;
    let mut report = VerificationReport::new("lemma-1");
    let primes = primes_between(table, 11, p_max);
    let results: Vec<Vec<Counterexample>> = primes
        .par_iter()
        .map(|&p| {
            let counts = prefix_counts(3 * p, p, table);
            [(2 * p, 5u64), (5 * p / 2, 6), (3 * p, 7)]
                .into_iter()
                .filter(|&(n, need)| counts[n as usize] < need)
                .map(|(n, need)| Counterexample {
                    p,
                    n,
                    phi: counts[n as usize],
                    bound: need,
                })
                .collect()
        })
        .collect();
    for bad in results {
        report.checked += 3;
        push_counterexamples(&mut report, bad);
    }

    let sets = check_table(TableId::T1, table)?;
    report.checked += sets.checked;
    report.mismatches.extend(sets.mismatches);
    report.notes.push("rough sets X_n^p for 11 <= p <= 23 diffed against Table 1".into());
    report.finish(start);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Second case

/// (z, Φ(⌊pz/2⌋, p)) for z = 7, 8, … up to the first value ≥ 2p + 1, or
/// z = 2p if that comes first.
pub fn case2_scan(p: u64, table: &PrimeTable) -> Result<Vec<(u64, u64)>> {
    if p < 11 {
        return Err(Error::invalid(format!("scan needs p >= 11, got {p}")));
    }
    require_limit(table, p * p, "p^2")?;
    if !table.contains(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    let counts = prefix_counts(p * p, p, table);
    let mut out = Vec::new();
    for z in 7..=2 * p {
        let phi = counts[(p * z / 2) as usize];
        out.push((z, phi));
        if phi > 2 * p {
            break;
        }
    }
    Ok(out)
}

fn printed_scan(p: u64) -> Result<Option<Vec<(u64, u64)>>> {
    let mut values = Vec::new();
    let mut found = false;
    for (id, first_z) in [(TableId::T2a, 7u64), (TableId::T2b, 19)] {
        let t = fixture(id)?;
        if let Some(row) = t.rows.iter().find(|r| r[0] == Cell::Int(p)) {
            found = true;
            for (j, cell) in row[1..].iter().enumerate() {
                if let Cell::Int(v) = cell {
                    values.push((first_z + j as u64, *v));
                }
            }
        }
    }
    Ok(found.then_some(values))
}

/// The scan for one prime 11 ≤ p ≤ 89, diffed against Tables 2a/2b.
pub fn verify_case2_scan(p: u64, table: &PrimeTable) -> Result<(Vec<(u64, u64)>, VerificationReport)> {
    let start = Instant::now();
    if !(11..=SCAN_P_MAX).contains(&p) {
        return Err(Error::invalid(format!("scans cover 11 <= p <= {SCAN_P_MAX}, got {p}")));
    }
    let scan = case2_scan(p, table)?;
    let mut report = VerificationReport::new("lemma-2");
    for &(z, phi) in &scan {
        report.checked += 1;
        if phi < z + 1 {
            push_counterexamples(&mut report, vec![Counterexample { p, n: p * z / 2, phi, bound: z + 1 }]);
        }
    }
    match scan.last() {
        Some(&(_, phi)) if phi > 2 * p => {}
        _ => report.fail(format!("scan for p = {p} never reached 2p + 1 = {}", 2 * p + 1)),
    }
    match printed_scan(p)? {
        None => report.fail(format!("no printed scan row for p = {p}")),
        Some(printed) => {
            let len = printed.len().max(scan.len());
            for i in 0..len {
                let ours = scan.get(i);
                let theirs = printed.get(i);
                if ours != theirs {
                    let z = ours.or(theirs).map_or(0, |v| v.0);
                    let show = |v: Option<&(u64, u64)>| v.map_or("<none>".to_string(), |v| v.1.to_string());
                    report.mismatches.push(CellMismatch {
                        row: format!("p={p}"),
                        column: format!("z{z}"),
                        computed: show(ours),
                        fixture: show(theirs),
                    });
                }
            }
        }
    }
    report.scans.push(ScanRow { p, values: scan.clone() });
    report.finish(start);
    Ok((scan, report))
}

/// (4z − 4)/(z − 5.02024)
fn case2_ratio(z: f64) -> f64 {
    (4.0 * z - 4.0) / (z - 5.02024)
}

/// The analytic argument for primes lo ≤ p ≤ hi (lo ≥ 97): the two numeric
/// anchors, monotonicity of the z-ratio, the inequality (p/4 ln p)(z −
/// 5.02024) ≥ z − 1, and every link of the chain from Φ(pz/2, p) down to
/// ⌊2n/p⌋ + 1 at grid points. π is taken from the sieve while pz/2 lies in
/// the table; Φ is evaluated directly while p² ≤ `phi_cap`.
pub fn verify_case2_analytic(lo: u64, hi: u64, table: &PrimeTable, phi_cap: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    if lo < 97 || hi < lo {
        return Err(Error::invalid(format!("analytic range needs 97 <= lo <= hi, got {lo}..{hi}")));
    }
    require_limit(table, hi, "p range end")?;
    let mut report = VerificationReport::new("lemma-2");

    let mut acc = ScanAccumulator::new(Relation::GreaterEq);
    acc.record(&[97.0], 97.0 / 97f64.ln(), 20.42);
    report.add_check(acc.finish("p_over_ln_p", "p = 97"));
    let mut acc = ScanAccumulator::new(Relation::LessEq);
    acc.record(&[6.0], case2_ratio(6.0), 20.42);
    report.add_check(acc.finish("z_ratio_at_6", "z = 6"));

    let mut acc = ScanAccumulator::new(Relation::Less);
    let mut zs = vec![6.0];
    zs.extend(z_grid(hi));
    for w in zs.windows(2) {
        acc.record(&[w[1]], case2_ratio(w[1]), case2_ratio(w[0]));
    }
    report.add_check(acc.finish("z_ratio_decreasing", &format!("[6, {}]", 2 * hi)));

    let domain = Domain::new(lo as f64, hi as f64)?;
    report.add_check(scan_inequality("case2_ratio", &domain, table)?);
    report.add_check(scan_inequality("eq1", &domain, table)?);

    let primes = primes_between(table, lo, hi);
    let limit = table.limit();
    type Accs = [ScanAccumulator; 3];
    type Cases = Vec<(Vec<f64>, f64, f64)>;
    let per_p: Vec<(Accs, Cases, Cases, Vec<Counterexample>, u64)> = primes
        .par_iter()
        .map(|&p| {
            let mut accs: Accs = std::array::from_fn(|_| ScanAccumulator::new(Relation::GreaterEq));
            let mut endpoint = Vec::new();
            let mut identity = Vec::new();
            let mut bad = Vec::new();
            let mut analytic_only = 0u64;
            let pf = p as f64;
            let lp = pf.ln();
            let pi_p = table.rank_unchecked(p) as f64;
            let counts = (p * p <= phi_cap).then(|| prefix_counts(p * p, p, table));
            for z in z_grid(p) {
                let x = pf * z / 2.0;
                let b = x / x.ln() - C * pf / lp + 2.0;
                let c = (pf * z - 5.02024 * pf) / (4.0 * lp) + 2.0;
                if z < 2.0 * pf {
                    accs[1].record(&[pf, z], b, c);
                } else {
                    // x = p², where both sides are the same expression
                    endpoint.push((vec![pf, z], x, pf * pf));
                }
                accs[2].record(&[pf, z], c, z + 1.0);
                if x > limit as f64 {
                    analytic_only += 1;
                    continue;
                }
                let a = table.rank_unchecked(x.floor() as u64) as f64 - pi_p + 2.0;
                accs[0].record(&[pf, z], a, b);
                if let (Some(counts), true) = (&counts, z.fract() == 0.0) {
                    let n = p * z as u64 / 2;
                    let phi = counts[n as usize];
                    // below p² the rough numbers are 1 and the primes in [p, n]
                    let square = if n == p * p { 1.0 } else { 0.0 };
                    identity.push((vec![pf, z], phi as f64, a + square));
                    let bound = 2 * n / p + 1;
                    if phi < bound {
                        bad.push(Counterexample { p, n, phi, bound });
                    }
                }
            }
            (accs, endpoint, identity, bad, analytic_only)
        })
        .collect();

    let names = ["chain_rosser", "chain_log", "chain_eq1"];
    let mut merged: Accs = std::array::from_fn(|_| ScanAccumulator::new(Relation::GreaterEq));
    let mut endpoints = Vec::new();
    let mut identities = Vec::new();
    let mut analytic_only = 0;
    for (accs, endpoint, identity, bad, skipped) in per_p {
        merge_into(&mut merged, accs);
        endpoints.extend(endpoint);
        identities.extend(identity);
        push_counterexamples(&mut report, bad);
        analytic_only += skipped;
    }
    let label = format!("[{lo}, {hi}]");
    for (name, acc) in names.iter().zip(merged) {
        report.add_check(acc.finish(&format!("case2_{name}"), &label));
    }
    report.add_check(equality_report("case2_chain_log_endpoint", &label, &endpoints));
    report.add_check(equality_report("case2_chain_phi", &label, &identities));
    if analytic_only > 0 {
        report.notes.push(format!(
            "analytic-only: {analytic_only} grid points with pz/2 beyond the prime table"
        ));
    }
    report.notes.push(format!("Phi evaluated directly for p with p^2 <= {phi_cap}"));
    report.finish(start);
    Ok(report)
}

/// Scans for 11 ≤ p ≤ min(p_max, 89), then the analytic chain for
/// 97 ≤ p ≤ p_max.
pub fn verify_case2(p_max: u64, table: &PrimeTable, phi_cap: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new("lemma-2");
    for p in primes_between(table, 11, p_max.min(SCAN_P_MAX)) {
        let (_, r) = verify_case2_scan(p, table)?;
        report.checked += r.checked;
        push_counterexamples(&mut report, r.counterexamples);
        report.mismatches.extend(r.mismatches);
        report.scans.extend(r.scans);
        report.notes.extend(r.notes);
        report.status = report.status.worst(r.status);
    }
    if p_max >= 97 {
        let r = verify_case2_analytic(97, p_max, table, phi_cap)?;
        report.checked += r.checked;
        push_counterexamples(&mut report, r.counterexamples);
        report.checks.extend(r.checks);
        report.notes.extend(r.notes);
        report.status = report.status.worst(r.status);
    }
    report.finish(start);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Third case

/// The argument for p² < n ≤ p^d over primes lo ≤ p ≤ hi: vacuity at 11,
/// α/p^{α−2} < 2 and its monotonicity on an α grid, the scaled inequality
/// p − cα/p^{α−2} ≥ 2α ln p, and the final bound normalized by p^{α−1}.
/// π and Φ cross-checks run where p^α lies in the table and below `phi_cap`.
pub fn verify_case3_analytic(lo: u64, hi: u64, table: &PrimeTable, phi_cap: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    if lo < 11 || hi < lo {
        return Err(Error::invalid(format!("case 3 range needs 11 <= lo <= hi, got {lo}..{hi}")));
    }
    require_limit(table, hi, "p range end")?;
    let mut report = VerificationReport::new("lemma-3");

    if lo <= 11 {
        let mut acc = ScanAccumulator::new(Relation::Less);
        acc.record(&[11.0], threshold_d(11)?, 2.0);
        report.add_check(acc.finish("case3_vacuous", "p = 11"));
        report.notes.push(format!(
            "p = 11: d = {} < 2, so p^2 < n <= p^d is empty",
            format_significant(threshold_d(11)?, 6)
        ));
    }
    let lo = lo.max(13);
    if hi < lo {
        report.finish(start);
        return Ok(report);
    }
    let primes = primes_between(table, lo, hi);
    let boundary: Vec<_> = primes
        .iter()
        .map(|&p| (vec![p as f64, 2.0], 2.0 * (p as f64).powf(0.0), 2.0))
        .collect();
    report.add_check(equality_report("case3_boundary", &format!("[{lo}, {hi}], alpha = 2"), &boundary));
    report.add_check(scan_inequality("case3_ratio", &Domain::new(lo as f64, hi as f64)?, table)?);

    let limit = table.limit();
    type Accs = [ScanAccumulator; 5];
    let fresh = || -> Accs {
        [
            ScanAccumulator::new(Relation::Less),
            ScanAccumulator::new(Relation::GreaterEq),
            ScanAccumulator::new(Relation::GreaterEq),
            ScanAccumulator::new(Relation::GreaterEq),
            ScanAccumulator::new(Relation::GreaterEq),
        ]
    };
    let per_p: Vec<(Accs, Vec<Counterexample>, u64)> = primes
        .par_iter()
        .map(|&p| {
            let mut accs = fresh();
            let pf = p as f64;
            let lp = pf.ln();
            let d = threshold_d(p).expect("p >= 13");
            let grid = alpha_grid(2.0, d, 64, true);
            let ln_ratio = |a: f64| a.ln() - (a - 2.0) * lp;
            for w in grid.windows(2) {
                accs[0].record(&[pf, w[1]], ln_ratio(w[1]), ln_ratio(w[0]));
            }
            let pi_p = table.rank_unchecked(p) as f64;
            for &a in &grid {
                let scaled = pf - C * a * (-(a - 2.0) * lp).exp();
                accs[1].record(&[pf, a], scaled, 2.0 * a * lp);
                let inv = (-(a - 1.0) * lp).exp();
                accs[2].record(&[pf, a], scaled / (a * lp) + 2.0 * inv, 2.0 + inv);
                let ln_n = a * lp;
                if ln_n <= (limit as f64).ln() {
                    let x = ln_n.exp();
                    let pi = table.rank_unchecked(x.floor() as u64) as f64;
                    let lower = x / (a * lp) - C * pf / lp + 2.0;
                    accs[3].record(&[pf, a], pi - pi_p + 2.0, lower);
                    accs[4].record(&[pf, a], lower, (2.0 * x / pf).floor() + 1.0);
                }
            }
            let (checked, bad) = if pf.powf(d) <= phi_cap as f64 {
                theorem_range(p, p * p + 1, pf.powf(d).floor() as u64, table)
            } else {
                (0, Vec::new())
            };
            (accs, bad, checked)
        })
        .collect();

    let names = [
        "case3_ratio_decreasing",
        "case3_scaled_chain",
        "case3_final_normalized",
        "case3_rosser_step",
        "case3_final_direct",
    ];
    let mut merged = fresh();
    let mut direct = 0;
    for (accs, bad, checked) in per_p {
        merge_into(&mut merged, accs);
        push_counterexamples(&mut report, bad);
        direct += checked;
    }
    let label = format!("[{lo}, {hi}]");
    for (name, acc) in names.iter().zip(merged) {
        report.add_check(acc.finish(name, &label));
    }
    report.checked += direct;
    report.notes.push(format!(
        "Phi checked directly at {direct} integers n in (p^2, p^d] with p^d <= {phi_cap}"
    ));
    report.finish(start);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Fourth case

/// Thresholds from which the linear Legendre bounds take over.
pub const LINEAR_THRESHOLDS: [(u64, u64); 3] = [(11, 150), (13, 297), (17, 1402)];

/// Tables 9 and 10 with their stopping rule, the linear Legendre bounds for
/// p ∈ {11, 13, 17} on [threshold, `linear_max`], and for 19 ≤ p ≤ 2971 the
/// composition of the Mertens-product, prime-count and Euler-constant
/// bounds at α = d and on an α grid above it. With `large_hi` ≥ 2999 the
/// large-prime inequalities are also scanned up to that bound.
pub fn verify_case4(table: &PrimeTable, linear_max: u64, large_hi: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    require_limit(table, linear_max.max(SMALL_P_MAX), "linear bound range")?;
    let mut report = VerificationReport::new("lemma-4");

    // (a) small n
    let mut stops = Vec::new();
    for (id, p, target) in [(TableId::T9, 11u64, 28u64), (TableId::T10, 13, 46)] {
        let r = check_table(id, table)?;
        report.checked += r.checked;
        report.mismatches.extend(r.mismatches);
        let threshold = LINEAR_THRESHOLDS.iter().find(|t| t.0 == p).expect("listed").1;
        let pd = (p as f64).powf(threshold_d(p)?);
        let counts = prefix_counts(threshold, p, table);
        let first = pd.floor() as u64 + 1;
        let stop = (first..threshold).find(|&n| counts[n as usize] >= target);
        let printed: Vec<f64> = fixture(id)?
            .rows
            .iter()
            .filter_map(|r| match r[0] {
                Cell::Int(n) => Some(n as f64),
                _ => None,
            })
            .collect();
        let pf = p as f64;
        // the printed rows start just above p^d and stop at the first Φ ≥ target
        stops.push((vec![pf, 0.0], first as f64, printed.first().copied().unwrap_or(f64::NAN)));
        stops.push((vec![pf, 1.0], stop.map_or(f64::NAN, |s| s as f64), printed.last().copied().unwrap_or(f64::NAN)));
        // the largest b below the threshold is the target
        stops.push((vec![pf, 2.0], (2 * (threshold - 1) / p + 1) as f64, target as f64));
        for n in first..threshold {
            let bound = 2 * n / p + 1;
            report.checked += 1;
            if counts[n as usize] < bound {
                push_counterexamples(&mut report, vec![Counterexample { p, n, phi: counts[n as usize], bound }]);
            }
        }
    }
    report.add_check(equality_report("case4_small_n_stops", "p in {11, 13}", &stops));

    // (b) linear bounds
    let expected = [(11u64, 48i64, 210i64, 7u64), (13, 480, 2310, 15), (17, 5760, 30030, 31)];
    let mut coefficients = Vec::new();
    for &(p, num, den, offset) in &expected {
        let bound = LinearLowerBound::for_prime(p)?;
        let want = BigRational::new(BigInt::from(num), BigInt::from(den));
        let same = if bound.coefficient == want { 1.0 } else { 0.0 };
        coefficients.push((vec![p as f64, 0.0], same, 1.0));
        coefficients.push((vec![p as f64, 1.0], bound.offset as f64, offset as f64));
    }
    report.add_check(equality_report("case4_linear_coefficients", "p in {11, 13, 17}", &coefficients));

    for &(p, threshold) in &LINEAR_THRESHOLDS {
        let bound = LinearLowerBound::for_prime(p)?;
        let mut acc = ScanAccumulator::new(Relation::Greater);
        let mut literal_failures = Vec::new();
        let mut disagreements = 0u64;
        for n in threshold..=linear_max {
            let floor = 2 * n / p;
            let exact = bound.exceeds(n, floor);
            let value = bound.value_f64(n);
            acc.record(&[p as f64, n as f64], value, floor as f64);
            if exact != (value > floor as f64) {
                disagreements += 1;
            }
            if !bound.reaches(n, floor + 1) {
                literal_failures.push(n);
            }
        }
        report.add_check(acc.finish(&format!("case4_linear_p{p}"), &format!("[{threshold}, {linear_max}]")));
        if disagreements > 0 {
            report.fail(format!("p = {p}: {disagreements} points where rational and float comparisons disagree"));
        }
        if let Some(&n) = literal_failures.first() {
            report.notes.push(format!(
                "p = {p}: the literal form LHS >= floor(2n/p) + 1 fails at {} points, first n = {n} \
                 (LHS = {} < {}); the bound used is LHS > floor(2n/p), which suffices since Phi is an integer",
                literal_failures.len(),
                format_significant(bound.value_f64(n), 6),
                2 * n / p + 1
            ));
        }
        let (checked, bad) = theorem_range(p, threshold, linear_max, table);
        report.checked += checked;
        push_counterexamples(&mut report, bad);
    }

    // (c) 19 ≤ p ≤ 2971
    let small = Domain::new(19.0, SMALL_P_MAX as f64)?;
    report.add_check(scan_inequality("dusart_cor", &small, table)?);
    report.add_check(scan_inequality("euler_small", &small, table)?);
    let primes = primes_between(table, 19, SMALL_P_MAX);
    type Accs = [ScanAccumulator; 3];
    let fresh = || -> Accs {
        [
            ScanAccumulator::new(Relation::Less),
            ScanAccumulator::new(Relation::GreaterEq),
            ScanAccumulator::new(Relation::GreaterEq),
        ]
    };
    let per_p: Vec<Result<(Accs, u64, Vec<Counterexample>)>> = primes
        .par_iter()
        .map(|&p| {
            let mut accs = fresh();
            let pf = p as f64;
            let lp = pf.ln();
            let pi_p = table.rank_unchecked(p) as f64;
            accs[0].record(&[pf], pi_p, C * pf / lp);
            let d = threshold_d(p)?;
            let product = crate::bounds::mertens_product(p, table)?;
            for a in alpha_grid(d, d + 2.0, 64, true) {
                accs[1].record(&[pf, a], euler_lhs(p, a, EulerVariant::SmallP)?, euler_rhs(pf, a));
                // p^{α−1}(p·∏ − 2^{π(p)}/p^{α−1}) ≥ 2p^{α−1} + 1, divided by p^{α−1}
                let sub = (pi_p * std::f64::consts::LN_2 - (a - 1.0) * lp).exp();
                accs[2].record(&[pf, a], pf * product - sub, euler_rhs(pf, a));
            }
            let pd = pf.powf(d);
            let (checked, bad) = if pd < linear_max as f64 {
                theorem_range(p, pd.floor() as u64 + 1, linear_max, table)
            } else {
                (0, Vec::new())
            };
            Ok((accs, checked, bad))
        })
        .collect();
    let mut merged = fresh();
    for r in per_p {
        let (accs, checked, bad) = r?;
        merge_into(&mut merged, accs);
        report.checked += checked;
        push_counterexamples(&mut report, bad);
    }
    let label = format!("[19, {SMALL_P_MAX}]");
    for (name, acc) in ["case4_pi_bound", "case4_euler_alpha_grid", "case4_composition"]
        .iter()
        .zip(merged)
    {
        report.add_check(acc.finish(name, &label));
    }

    // (d) p ≥ 2999
    if large_hi >= 2999 {
        require_limit(table, large_hi, "large-prime range end")?;
        let large = Domain::new(2999.0, large_hi as f64)?;
        for name in ["dusart_large", "euler_large", "euler_main_term"] {
            report.add_check(scan_inequality(name, &large, table)?);
        }
        report.notes.push(format!(
            "analytic-only: 2999 <= p <= {large_hi} checks the inequality chain at alpha = d, not Phi; \
             p beyond {large_hi} rests on the cited Mertens-product bound"
        ));
    }
    report.finish(start);
    Ok(report)
}

// ---------------------------------------------------------------------------
// Everything

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyAllOptions {
    pub p_max: u64,
    pub n_max: u64,
    pub phi_cap: u64,
    pub linear_max: u64,
    pub large_hi: u64,
}

impl Default for VerifyAllOptions {
    fn default() -> Self {
        VerifyAllOptions {
            p_max: 199,
            n_max: 50_000,
            phi_cap: DEFAULT_PHI_CAP,
            linear_max: LINEAR_BOUND_MAX,
            large_hi: 10_000,
        }
    }
}

/// Brute force plus all four case drivers, with case 3 run over
/// 11 ≤ p ≤ max(p_max, 2971).
pub fn verify_all(opts: &VerifyAllOptions, table: &PrimeTable) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut report = VerificationReport::new("all");
    report.absorb(verify_theorem(opts.p_max, opts.n_max, table)?);
    report.absorb(verify_case1(opts.p_max, table)?);
    report.absorb(verify_case2(opts.p_max.max(SCAN_P_MAX), table, opts.phi_cap)?);
    report.absorb(verify_case3_analytic(11, opts.p_max.max(SMALL_P_MAX), table, opts.phi_cap)?);
    report.absorb(verify_case4(table, opts.linear_max, opts.large_hi)?);
    report.finish(start);
    Ok(report)
}
