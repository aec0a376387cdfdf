//! Counting rough numbers and checking, by machine, every finite
//! computation behind the bound Φ(n, p) ≥ ⌊2n/p⌋ + 1 for primes p ≥ 11 and
//! n ≥ 2p.
//!
//! - [`primes`]: sieve, π(x), primorials, Möbius-tagged divisors
//! - [`phi`]: Φ(x, y) by sieve and by Legendre's formula, rough sets
//! - [`bounds`]: the analytic inequalities and a scanning driver
//! - [`buchstab`]: numerical ω(u)
//! - [`verify`]: the four-case theorem driver
//! - [`tables`]: regeneration and diffing of the tabulated data

pub mod bounds;
pub mod buchstab;
pub mod error;
mod numfmt;
pub mod phi;
pub mod primes;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use numfmt::format_significant;
pub use primes::PrimeTable;
