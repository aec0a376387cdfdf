//! Buchstab's function ω(u): ω(u) = 1/u on [1, 2] and (uω(u))' = ω(u − 1)
//! beyond, which governs Φ(x, x^{1/u}) ~ ω(u)·x / ln(x^{1/u}).
//!
//! The delay equation is written as ω'(u) = (ω(u − 1) − ω(u))/u and stepped
//! forward from u = 2 on a uniform grid whose spacing divides 1, so the
//! delayed argument of every full step lands on an earlier grid point.

use serde::{Deserialize, Serialize};

use crate::bounds::CONSTANTS;
use crate::error::{Error, Result};
use crate::numfmt::format_significant;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const MAX_STEP: f64 = 0.01;
pub const MAX_U: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Explicit midpoint; the delay at half steps is interpolated linearly.
    Midpoint,
    /// Trapezoidal quadrature of uω(u) = 1 + ∫_2^u ω(t − 1) dt.
    Trapezoid,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Midpoint => "midpoint",
            Scheme::Trapezoid => "trapezoid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuchstabGrid {
    u_max: f64,
    step: f64,
    /// ω(1 + i·step)
    values: Vec<f64>,
    method: Scheme,
}

pub fn build_grid(u_max: f64, step: f64) -> Result<BuchstabGrid> {
    BuchstabGrid::build(u_max, step, Scheme::Midpoint)
}

impl BuchstabGrid {
    pub fn build(u_max: f64, step: f64, method: Scheme) -> Result<Self> {
        if !(2.0..=MAX_U).contains(&u_max) {
            return Err(Error::invalid(format!("u_max must lie in [2, {MAX_U}], got {u_max}")));
        }
        if !(step > 0.0 && step <= MAX_STEP) {
            return Err(Error::invalid(format!("step must lie in (0, {MAX_STEP}], got {step}")));
        }
        let per_unit = (1.0 / step).round();
        if ((1.0 / step) - per_unit).abs() > 1e-6 * per_unit {
            return Err(Error::invalid(format!("1/step must be an integer, got step {step}")));
        }
        let m = per_unit as usize;
        let step = 1.0 / per_unit;
        let n = ((u_max - 1.0) * per_unit).ceil() as usize;
        let u_at = |i: usize| 1.0 + i as f64 * step;

        let mut w = Vec::with_capacity(n + 1);
        for i in 0..=n.min(m) {
            w.push(1.0 / u_at(i));
        }
        for i in m..n {
            let u = u_at(i);
            let next = match method {
                Scheme::Midpoint => {
                    let k1 = (w[i - m] - w[i]) / u;
                    let mid = w[i] + 0.5 * step * k1;
                    let um = u + 0.5 * step;
                    let delayed = if um - 1.0 <= 2.0 {
                        1.0 / (um - 1.0)
                    } else {
                        0.5 * (w[i - m] + w[i - m + 1])
                    };
                    w[i] + step * (delayed - mid) / um
                }
                Scheme::Trapezoid => {
                    let area = 0.5 * step * (w[i - m] + w[i + 1 - m]);
                    (u * w[i] + area) / u_at(i + 1)
                }
            };
            w.push(next);
        }
        Ok(BuchstabGrid {
            u_max: u_at(n),
            step,
            values: w,
            method,
        })
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn method(&self) -> Scheme {
        self.method
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &w)| (1.0 + i as f64 * self.step, w))
    }

    /// ω(u): exact on [1, 2], linear between grid points beyond.
    pub fn omega(&self, u: f64) -> Result<f64> {
        if !(1.0..=self.u_max + 1e-12).contains(&u) {
            return Err(Error::invalid(format!(
                "u = {u} outside the grid range [1, {}]",
                self.u_max
            )));
        }
        if u <= 2.0 {
            return Ok(1.0 / u);
        }
        let t = (u - 1.0) / self.step;
        let j = (t.floor() as usize).min(self.values.len() - 1);
        let frac = t - j as f64;
        if frac < 1e-9 || j + 1 == self.values.len() {
            return Ok(self.values[j]);
        }
        Ok(self.values[j] * (1.0 - frac) + self.values[j + 1] * frac)
    }

    /// ω(u)·u·x/ln x
    pub fn estimate(&self, x: f64, u: f64) -> Result<f64> {
        check_estimate_domain(x, u)?;
        Ok(self.omega(u)? * u * x / x.ln())
    }

    /// `u,omega` rows with 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,omega\n");
        for (u, w) in self.points() {
            out.push_str(&format_significant(u, 15));
            out.push(',');
            out.push_str(&format_significant(w, 15));
            out.push('\n');
        }
        out
    }
}

/// The limiting value e^{−γ}.
pub fn omega_limit() -> f64 {
    CONSTANTS.exp_neg_gamma()
}

/// Closed form on [2, 3]: ω(u) = (1 + ln(u − 1))/u.
pub fn omega_closed_form_2_3(u: f64) -> f64 {
    (1.0 + (u - 1.0).ln()) / u
}

/// Richardson extrapolation of two midpoint grids (step and step/2); the
/// leading h² error terms cancel.
pub fn omega_extrapolated(u: f64, step: f64) -> Result<f64> {
    if (1.0..=2.0).contains(&u) {
        return Ok(1.0 / u);
    }
    let u_max = u.max(2.0);
    let coarse = BuchstabGrid::build(u_max, step, Scheme::Midpoint)?.omega(u)?;
    let fine = BuchstabGrid::build(u_max, step / 2.0, Scheme::Midpoint)?.omega(u)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn check_estimate_domain(x: f64, u: f64) -> Result<()> {
    if !(x >= 4.0) || !(u >= 1.0) {
        return Err(Error::invalid(format!(
            "estimate needs x >= 4 and u >= 1, got x = {x}, u = {u}"
        )));
    }
    if x.ln() / u < std::f64::consts::LN_2 {
        return Err(Error::invalid(format!("x^(1/u) < 2 for x = {x}, u = {u}")));
    }
    Ok(())
}

/// ω(u)·x / ln(x^{1/u}), with ω from a default-step grid when u > 2.
pub fn buchstab_estimate(x: f64, u: f64) -> Result<f64> {
    check_estimate_domain(x, u)?;
    let omega = if u <= 2.0 {
        1.0 / u
    } else {
        build_grid(u, DEFAULT_STEP)?.omega(u)?
    };
    Ok(omega * u * x / x.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definitional_segment() {
        let g = build_grid(4.0, DEFAULT_STEP).unwrap();
        assert_eq!(g.omega(1.5).unwrap(), 2.0 / 3.0);
        assert_eq!(g.omega(1.0).unwrap(), 1.0);
        assert_eq!(g.omega(2.0).unwrap(), 0.5);
        for (u, w) in g.points().take_while(|(u, _)| *u <= 2.0) {
            assert_eq!(w, 1.0 / u);
        }
    }

    #[test]
    fn closed_form_on_second_segment() {
        let g = build_grid(3.0, DEFAULT_STEP).unwrap();
        let h = g.step();
        for (u, w) in g.points().filter(|(u, _)| *u >= 2.0) {
            assert!((w - omega_closed_form_2_3(u)).abs() <= 10.0 * h * h, "u={u}");
        }
        assert!((g.omega(2.5).unwrap() - 0.562_186).abs() < 1e-6);
    }

    #[test]
    fn continuity_at_two() {
        let g = build_grid(3.0, 1e-3).unwrap();
        assert!((g.omega(2.0).unwrap() - 0.5).abs() <= 1e-10);
        assert!((omega_closed_form_2_3(2.0) - 0.5).abs() <= 1e-15);
        // right derivative (ω(1) − ω(2))/2 = 1/4
        let slope = (g.omega(2.001).unwrap() - 0.5) / 0.001;
        assert!((slope - 0.25).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn values_in_unit_interval_and_converge() {
        let g = build_grid(12.0, DEFAULT_STEP).unwrap();
        let limit = omega_limit();
        for (u, w) in g.points() {
            assert!(w > 0.0 && w <= 1.0);
            if u >= 6.0 {
                assert!((w - limit).abs() <= 1e-4, "u={u}");
            }
        }
        assert!((g.omega(10.0).unwrap() - limit).abs() <= 1e-6);
    }

    #[test]
    fn schemes_agree() {
        let a = BuchstabGrid::build(6.0, 1e-3, Scheme::Midpoint).unwrap();
        let b = BuchstabGrid::build(6.0, 1e-3, Scheme::Trapezoid).unwrap();
        for u in [2.5, 3.3, 4.75, 6.0] {
            assert!((a.omega(u).unwrap() - b.omega(u).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn extrapolation_sharpens() {
        let want = omega_closed_form_2_3(2.5);
        assert!((omega_extrapolated(2.5, 1e-3).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(build_grid(1.5, 1e-3).is_err());
        assert!(build_grid(51.0, 1e-3).is_err());
        assert!(build_grid(4.0, 0.02).is_err());
        assert!(build_grid(4.0, 0.003).is_err());
        assert!(build_grid(4.0, 0.0).is_err());
        let g = build_grid(3.0, 1e-3).unwrap();
        assert!(g.omega(3.5).is_err());
        assert!(g.omega(0.5).is_err());
        assert!(buchstab_estimate(3.0, 1.5).is_err());
        assert!(buchstab_estimate(16.0, 5.0).is_err());
    }

    #[test]
    fn estimate_examples() {
        let e = buchstab_estimate(1e6, 2.0).unwrap();
        assert!((e - 72382.4).abs() < 0.1, "{e}");
        let x = 1e5;
        assert!((buchstab_estimate(x, 1.0).unwrap() - x / x.ln()).abs() < 1e-9);
        let e = buchstab_estimate(1e4, 1.5).unwrap();
        assert!((e - 1085.7).abs() < 0.05, "{e}");
    }

    #[test]
    fn csv_export() {
        let g = build_grid(2.01, 1e-2).unwrap();
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("u,omega"));
        assert_eq!(lines.next(), Some("1,1"));
        assert_eq!(lines.nth(49), Some("1.5,0.666666666666667"));
    }
}
