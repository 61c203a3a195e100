//! Connection radii of the asymptotically optimal planners.
//!
//! All three share the term `(mu / zeta_d) * (log n / n)`, where `mu` is the
//! free-space volume and `zeta_d` the volume of the unit `d`-ball. Logs are natural.
//! `n` is taken as a real number so the closed forms can be evaluated anywhere.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Default `eta` for the FMT* radius.
pub const DEFAULT_ETA: f64 = 0.1;

/// Volume of the unit ball in `d` dimensions, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    std::f64::consts::PI.powf(h) / gamma(h + 1.0)
}

fn shared_term(n: f64, d: usize, mu_free: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if !(n >= 2.0 && n.is_finite()) {
        return Err(Error::InvalidParameter(format!("sample count must be >= 2, got {n}")));
    }
    if !(mu_free > 0.0 && mu_free.is_finite()) {
        return Err(Error::InvalidParameter(format!("free volume must be positive, got {mu_free}")));
    }
    Ok(mu_free / unit_ball_volume(d) * (n.ln() / n))
}

/// `2 [(1 + 1/d) (mu / zeta_d) (log n / n)]^(1/d)`.
pub fn radius_prm_star(n: f64, d: usize, mu_free: f64) -> Result<f64> {
    let df = d as f64;
    let s = shared_term(n, d, mu_free)?;
    Ok(2.0 * ((1.0 + 1.0 / df) * s).powf(1.0 / df))
}

/// `2 (1 + eta) [(1/d) (mu / zeta_d) (log n / n)]^(1/d)`.
pub fn radius_fmt_star(n: f64, d: usize, mu_free: f64, eta: f64) -> Result<f64> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
    }
    let df = d as f64;
    let s = shared_term(n, d, mu_free)?;
    Ok(2.0 * (1.0 + eta) * (s / df).powf(1.0 / df))
}

/// `[2 (1 + 1/d) (mu / zeta_d) (log i / i)]^(1/d)` at iteration `i`.
pub fn radius_rrt_star(i: f64, d: usize, mu_free: f64) -> Result<f64> {
    let df = d as f64;
    let s = shared_term(i, d, mu_free)?;
    Ok((2.0 * (1.0 + 1.0 / df) * s).powf(1.0 / df))
}

/// Which radius a roadmap planner connects with.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub enum RadiusRule {
    #[default]
    PrmStar,
    FmtStar {
        eta: f64,
    },
    /// A constant radius, independent of `n`.
    Fixed(f64),
}

impl RadiusRule {
    pub fn radius(self, n: f64, d: usize, mu_free: f64) -> Result<f64> {
        match self {
            RadiusRule::PrmStar => radius_prm_star(n, d, mu_free),
            RadiusRule::FmtStar { eta } => radius_fmt_star(n, d, mu_free, eta),
            RadiusRule::Fixed(r) if r >= 0.0 && r.is_finite() => Ok(r),
            RadiusRule::Fixed(r) => Err(Error::InvalidParameter(format!("radius must be >= 0, got {r}"))),
        }
    }
}
