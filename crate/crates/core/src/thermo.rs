//! Canonical-ensemble thermodynamics of a chain with identical bond potentials.
//!
//! Under the Gibbs measure each bond stretch `y` is independent with density
//! proportional to `exp(-phi(y) / theta)`, and each momentum is Gaussian with
//! variance `theta`.

use serde::{Deserialize, Serialize};

use crate::error::{FpuError, Result};
use crate::quadrature;

const MOMENT_TOL: f64 = 1e-12;
const THETA_TOL: f64 = 1e-10;

/// An even bond potential `phi(y)`.
pub trait BondPotential {
    fn energy(&self, y: f64) -> f64;
    /// Truncation point of the half-line integration at temperature `theta`.
    fn cutoff(&self, theta: f64) -> f64;
    /// Length scale of the density, used to seed the subdivision.
    fn scale(&self, theta: f64) -> f64;
}

/// `phi(y) = y^2/2 + beta y^4/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticBond {
    pub beta: f64,
}

impl BondPotential for QuarticBond {
    fn energy(&self, y: f64) -> f64 {
        let y2 = y * y;
        0.5 * y2 + 0.25 * self.beta * y2 * y2
    }

    fn cutoff(&self, theta: f64) -> f64 {
        let g = 12.0 * theta.sqrt();
        if self.beta > 0.0 {
            g.max(12.0 * (4.0 * theta / self.beta).powf(0.25))
        } else {
            g
        }
    }

    fn scale(&self, theta: f64) -> f64 {
        let g = theta.sqrt();
        if self.beta > 0.0 {
            g.min((4.0 * theta / self.beta).powf(0.25))
        } else {
            g
        }
    }
}

/// Moments of `y` under the single-bond Gibbs density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondMoments {
    pub y2: f64,
    pub y4: f64,
    /// Mean bond potential `<phi(y)>`.
    pub phi: f64,
    /// Normalization `int exp(-phi/theta) dy` over the real line.
    pub z: f64,
}

pub fn gibbs_moments<P: BondPotential>(pot: &P, theta: f64) -> Result<BondMoments> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(FpuError::InvalidParameter(format!("temperature must be positive, got {theta}")));
    }
    let ymax = pot.cutoff(theta);
    let s = pot.scale(theta);
    let mut breaks = vec![0.0];
    let mut x = s;
    while x < ymax {
        breaks.push(x);
        x *= 2.0;
    }
    breaks.push(ymax);
    let r = quadrature::integrate(
        |y| {
            let e = pot.energy(y);
            let w = (-e / theta).exp();
            let y2 = y * y;
            [w, y2 * w, y2 * y2 * w, e * w]
        },
        &breaks,
        MOMENT_TOL,
    )?;
    Ok(BondMoments { y2: r[1] / r[0], y4: r[2] / r[0], phi: r[3] / r[0], z: 2.0 * r[0] })
}

/// `(<y^2>, <y^4>, Z_y)` for the quartic bond.
pub fn bond_moments(beta: f64, theta: f64) -> Result<(f64, f64, f64)> {
    check_beta(beta)?;
    if beta == 0.0 {
        if !(theta > 0.0) {
            return Err(FpuError::InvalidParameter(format!("temperature must be positive, got {theta}")));
        }
        return Ok((theta, 3.0 * theta * theta, (2.0 * std::f64::consts::PI * theta).sqrt()));
    }
    let m = gibbs_moments(&QuarticBond { beta }, theta)?;
    Ok((m.y2, m.y4, m.z))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(FpuError::InvalidParameter(format!("beta must be >= 0, got {beta}")));
    }
    Ok(())
}

fn check_edensity(e: f64) -> Result<()> {
    if !(e > 0.0) || !e.is_finite() {
        return Err(FpuError::InvalidParameter(format!("energy density must be > 0, got {e}")));
    }
    Ok(())
}

/// Temperature at which `theta/2 + <phi(y)> = edensity`, for any bond potential.
pub fn solve_temperature_for<P: BondPotential>(pot: &P, edensity: f64) -> Result<f64> {
    check_edensity(edensity)?;
    let residual = |theta: f64| -> Result<f64> { Ok(0.5 * theta + gibbs_moments(pot, theta)?.phi - edensity) };
    let mut lo = 0.0;
    let mut hi = 2.0 * edensity;
    if residual(hi)? < 0.0 {
        return Err(FpuError::BracketFailure(format!("no root below 2 e = {hi}")));
    }
    while hi - lo > THETA_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if residual(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn solve_temperature(beta: f64, edensity: f64) -> Result<f64> {
    check_beta(beta)?;
    check_edensity(edensity)?;
    if beta == 0.0 {
        return Ok(edensity);
    }
    solve_temperature_for(&QuarticBond { beta }, edensity)
}

/// Equilibrium quantities at fixed `(beta, edensity)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoSolution {
    pub beta: f64,
    pub edensity: f64,
    pub theta: f64,
    pub y2: f64,
    pub y4: f64,
    pub eta: f64,
    pub eta_sc: f64,
    pub a_coef: f64,
    pub b_coef: f64,
    pub ae: f64,
    pub ae_tilde: f64,
}

impl ThermoSolution {
    pub fn solve(beta: f64, edensity: f64) -> Result<Self> {
        let theta = solve_temperature(beta, edensity)?;
        let (y2, y4, _) = bond_moments(beta, theta)?;
        Ok(Self::from_moments(beta, edensity, theta, y2, y4))
    }

    fn from_moments(beta: f64, edensity: f64, theta: f64, y2: f64, y4: f64) -> Self {
        let eta = if beta == 0.0 { 1.0 } else { (theta / y2).sqrt() };
        let a = 1.0 + 1.5 * beta * y2;
        let b = 1.5 * beta * theta;
        let eta_sc = ((a + (a * a + 4.0 * b).sqrt()) / 2.0).sqrt();
        let h2 = 0.5 * theta + 0.5 * y2;
        let h4 = 0.25 * beta * y4;
        let ae = h4 / h2;
        let ae_tilde = if beta == 0.0 { 0.0 } else { (edensity - theta) / theta };
        Self { beta, edensity, theta, y2, y4, eta, eta_sc, a_coef: a, b_coef: b, ae, ae_tilde }
    }
}

pub fn eta_exact(beta: f64, edensity: f64) -> Result<f64> {
    Ok(ThermoSolution::solve(beta, edensity)?.eta)
}

/// `(eta_sc, A, B)` from the mean-field closure.
pub fn eta_selfconsistent(beta: f64, edensity: f64) -> Result<(f64, f64, f64)> {
    let s = ThermoSolution::solve(beta, edensity)?;
    Ok((s.eta_sc, s.a_coef, s.b_coef))
}

/// `(ae, ae_tilde)`. The renormalized measure is signed: it is negative once the
/// renormalized quadratic part exceeds the total energy.
pub fn effective_nonlinearity(beta: f64, edensity: f64) -> Result<(f64, f64)> {
    let s = ThermoSolution::solve(beta, edensity)?;
    Ok((s.ae, s.ae_tilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::gamma;

    #[test]
    fn gaussian_limit() {
        let (y2, y4, z) = bond_moments(0.0, 0.7).unwrap();
        assert_eq!(y2, 0.7);
        assert!((y4 - 1.47).abs() < 1e-15);
        assert!((z - (2.0 * std::f64::consts::PI * 0.7).sqrt()).abs() < 1e-15);
        // the quadrature path gives the same at tiny beta
        let m = gibbs_moments(&QuarticBond { beta: 1e-14 }, 0.7).unwrap();
        assert!((m.y2 - 0.7).abs() < 1e-10);
        assert!((m.y4 - 1.47).abs() < 1e-10);
    }

    #[test]
    fn pure_quartic_limit() {
        let (beta, theta) = (1e8, 1.0);
        let (y2, _, _) = bond_moments(beta, theta).unwrap();
        let expected = (4.0 * theta / beta).sqrt() * gamma(0.75) / gamma(0.25);
        assert!((y2 - expected).abs() < 1e-3 * expected, "{y2} vs {expected}");
    }

    #[test]
    fn temperature_limits() {
        assert_eq!(solve_temperature(0.0, 0.37).unwrap(), 0.37);
        let t = solve_temperature(1e6, 1.0).unwrap();
        assert!((t - 4.0 / 3.0).abs() < 1e-3);
        // first-order coefficient 3/4 e^2 of the weak-coupling expansion
        let t = solve_temperature(1e-4, 1.0).unwrap();
        assert!(((t - 1.0) / 1e-4 - 0.75).abs() < 1e-2, "{t}");
        // at beta = 0.01 the second-order term is already about 4e-4
        let t = solve_temperature(0.01, 1.0).unwrap();
        assert!((t - 1.0075).abs() < 1e-3, "{t}");
    }

    #[test]
    fn reference_eta() {
        let s = ThermoSolution::solve(0.5, 100.0 / 256.0).unwrap();
        assert!((s.eta - 1.1812).abs() < 0.002, "{}", s.eta);
        assert!((s.eta_sc - s.eta).abs() < 0.03 * s.eta);
        assert!((s.b_coef - 1.5 * s.beta * s.theta).abs() <= 1e-12 * s.b_coef);
        assert!(s.theta > 0.0 && s.theta < 2.0 * s.edensity);
        let e = eta_exact(1e-4, 1.0).unwrap();
        assert!(((e - 1.0) / 1e-4 - 1.5).abs() < 2e-2, "{e}");
        let e = eta_exact(0.01, 1.0).unwrap();
        assert!((e - 1.015).abs() < 1e-3, "{e}");
    }

    #[test]
    fn free_chain_is_trivial() {
        let s = ThermoSolution::solve(0.0, 2.0).unwrap();
        assert_eq!((s.eta, s.eta_sc, s.a_coef, s.b_coef, s.ae, s.ae_tilde), (1.0, 1.0, 1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn strong_coupling_nonlinearity() {
        let (ae, aet) = effective_nonlinearity(1e4, 100.0 / 256.0).unwrap();
        assert!((ae - 0.5).abs() < 0.05, "{ae}");
        assert!((aet.abs() - 0.25).abs() < 0.05, "{aet}");
        assert!(aet < 0.0);
    }

    #[test]
    fn selfconsistent_large_beta_slope() {
        let (a, _, _) = eta_selfconsistent(1e3, 1.0).unwrap();
        let (b, _, _) = eta_selfconsistent(1e5, 1.0).unwrap();
        let slope = (b / a).ln() / 100f64.ln();
        assert!((slope - 0.25).abs() < 0.01, "{slope}");
    }

    #[test]
    fn invalid_inputs() {
        assert!(solve_temperature(-1.0, 1.0).is_err());
        assert!(solve_temperature(1.0, 0.0).is_err());
        assert!(bond_moments(1.0, 0.0).is_err());
    }
}
