use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::numfmt::format_sig;

/// Largest |f_DD| accepted by [`validate_coupling`]: (16 cos(π/9) − 8)/π.
pub fn coupling_bound() -> f64 {
    (16.0 * (PI / 9.0).cos() - 8.0) / PI
}

/// Supremum of |f₁| over the solver domain 0 < θ₁ < θ₂ ≤ ¼ with f₃ = 0:
/// (8 cos(π/9) − 4)/π.
pub fn solvable_bound() -> f64 {
    (8.0 * (PI / 9.0).cos() - 4.0) / PI
}

/// Largest θ₂ accepted by the solver, so that τ₁ + τ₂ ≤ τ₃.
pub const THETA_MAX: f64 = 0.25;
/// Residual tolerance of the root finder.
pub const ROOT_TOL: f64 = 1e-12;
const GRID: usize = 64;
const SEEDS: usize = 12;
const MAX_NEWTON: usize = 100;

/// k-th harmonic filter coefficient of the five-pulse block, k in 1..=4.
pub fn filter_coefficient(theta1: f64, theta2: f64, k: u32) -> Result<f64> {
    if !(1..=4).contains(&k) {
        return Err(Error::OutOfRange { name: "k", detail: format!("harmonic {k} not in 1..=4") });
    }
    let kf = k as f64;
    let sign = if k.is_multiple_of(2) { 0.0 } else { -2.0 };
    let sum: f64 = [theta1, theta2]
        .iter()
        .enumerate()
        .map(|(j, &th)| {
            let parity = if j == 0 { -1.0 } else { 1.0 };
            parity * sign * (2.0 * PI * kf * th).sin()
        })
        .sum();
    let tail = if k.is_multiple_of(2) { 0.0 } else { (kf * PI / 2.0).sin() };
    Ok(4.0 / (PI * kf) * (sum + tail))
}

fn f1(a: f64, b: f64) -> f64 {
    4.0 / PI * (1.0 + 2.0 * (2.0 * PI * a).sin() - 2.0 * (2.0 * PI * b).sin())
}

fn f3(a: f64, b: f64) -> f64 {
    4.0 / (3.0 * PI) * (2.0 * (6.0 * PI * a).sin() - 2.0 * (6.0 * PI * b).sin() - 1.0)
}

/// ∂(f₁, f₃)/∂(θ₁, θ₂)
fn jacobian(a: f64, b: f64) -> [[f64; 2]; 2] {
    [
        [16.0 * (2.0 * PI * a).cos(), -16.0 * (2.0 * PI * b).cos()],
        [16.0 * (6.0 * PI * a).cos(), -16.0 * (6.0 * PI * b).cos()],
    ]
}

/// One AXY configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterDesign {
    pub f_dd: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// s
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    /// Filter centre 1/(2τ), Hz.
    pub omega_dd: f64,
    /// Interpulse spacing, s.
    pub tau: f64,
    pub residual_f1: f64,
    pub residual_f3: f64,
}

pub fn validate_coupling(f_dd: f64) -> Result<()> {
    let bound = coupling_bound();
    if !f_dd.is_finite() || f_dd.abs() >= bound {
        return Err(Error::CouplingOutOfRange { value: f_dd, bound });
    }
    Ok(())
}

fn in_domain(a: f64, b: f64) -> bool {
    a > 0.0 && a < b && b <= THETA_MAX
}

fn residual(a: f64, b: f64, target: f64) -> (f64, f64) {
    (f1(a, b) - target, f3(a, b))
}

fn norm((r1, r3): (f64, f64)) -> f64 {
    r1.abs().max(r3.abs())
}

/// Damped Newton from one seed, staying inside the ordered domain.
fn newton(mut a: f64, mut b: f64, target: f64) -> Option<(f64, f64)> {
    let mut r = residual(a, b, target);
    for _ in 0..MAX_NEWTON {
        if norm(r) < ROOT_TOL {
            return Some((a, b));
        }
        let j = jacobian(a, b);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let da = (j[1][1] * r.0 - j[0][1] * r.1) / det;
        let db = (-j[1][0] * r.0 + j[0][0] * r.1) / det;
        let mut step = 1.0;
        loop {
            let (na, nb) = (a - step * da, b - step * db);
            if in_domain(na, nb) {
                let nr = residual(na, nb, target);
                if norm(nr) < norm(r) || step < 1e-3 {
                    a = na;
                    b = nb;
                    r = nr;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-10 {
                return None;
            }
        }
    }
    (norm(r) < ROOT_TOL).then_some((a, b))
}

/// Finds (θ₁, θ₂) with f₁ = f_DD and f₃ = 0 and lays out the block for spacing τ.
///
/// Roots are searched in 0 < θ₁ < θ₂ ≤ ¼; when several exist the one with the
/// smallest θ₂ − θ₁ wins, then the smaller θ₁.
pub fn solve_timings(f_dd: f64, tau: f64) -> Result<FilterDesign> {
    validate_coupling(f_dd)?;
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::OutOfRange { name: "tau", detail: format!("must be positive, got {tau}") });
    }
    let h = THETA_MAX / GRID as f64;
    let mut grid = Vec::with_capacity(GRID * GRID / 2);
    for i in 0..GRID {
        for j in i + 1..=GRID {
            let (a, b) = ((i as f64 + 0.5) * h, j as f64 * h);
            if in_domain(a, b) {
                grid.push((norm(residual(a, b, f_dd)), a, b));
            }
        }
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut best: Option<(f64, f64)> = None;
    for &(_, a, b) in grid.iter().take(SEEDS) {
        if let Some((ra, rb)) = newton(a, b, f_dd) {
            let better = match best {
                None => true,
                Some((ba, bb)) => {
                    let (gap, bgap) = (rb - ra, bb - ba);
                    gap < bgap - 1e-12 || ((gap - bgap).abs() <= 1e-12 && ra < ba)
                }
            };
            if better {
                best = Some((ra, rb));
            }
        }
    }
    let (theta1, theta2) = best.ok_or_else(|| Error::NoFilterRoot {
        f_dd,
        detail: format!(
            "no solution with 0 < θ₁ < θ₂ ≤ {THETA_MAX}; the block fits only |f_dd| < {:.6}",
            solvable_bound()
        ),
    })?;
    let omega_dd = 1.0 / (2.0 * tau);
    let (r1, r3) = residual(theta1, theta2, f_dd);
    Ok(FilterDesign {
        f_dd,
        theta1,
        theta2,
        tau1: theta1 / omega_dd,
        tau2: (theta2 - theta1) / omega_dd,
        tau3: 1.0 / (4.0 * omega_dd),
        omega_dd,
        tau,
        residual_f1: r1.abs(),
        residual_f3: r3.abs(),
    })
}

pub const DESIGN_CSV_HEADER: &str = "f_dd,theta1,theta2,tau1_s,tau2_s,tau3_s,tau_s";

pub fn designs_to_csv(designs: &[FilterDesign]) -> String {
    let mut out = String::from(DESIGN_CSV_HEADER);
    out.push('\n');
    for d in designs {
        let row = [d.f_dd, d.theta1, d.theta2, d.tau1, d.tau2, d.tau3, d.tau].map(format_sig);
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}
