//! Energy per unit area of periodic stripe patterns with the optimal
//! one-dimensional interface profile.

use crate::energy::{Objective, Params, PlanarEnergy};
use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid2D};

/// Nodes per `ε` used to resolve the interfaces.
pub const NODES_PER_EPS: f64 = 8.0;

/// Rescaled energy per unit area of stripes of period `L` (two interfaces per
/// period) with profile `tanh(d/(√2ε))`, `d` the signed distance to the
/// nearest stripe boundary, on a periodic cell. The uniform state has zero
/// energy on the same cell.
pub fn stripe_energy(period: f64, lambda: f64, eps: f64, gamma: f64) -> Result<f64> {
    stripe_energy_with(period, lambda, eps, gamma, NODES_PER_EPS)
}

pub fn stripe_energy_with(period: f64, lambda: f64, eps: f64, gamma: f64, nodes_per_eps: f64) -> Result<f64> {
    if !(period > 4.0 * eps) {
        return Err(Error::InvalidParameter(format!("period {period} must exceed 4ε = {}", 4.0 * eps)));
    }
    if nodes_per_eps < NODES_PER_EPS {
        return Err(Error::GridTooCoarse { feature: "interface width ε".into(), nodes: nodes_per_eps });
    }
    let n = (period * nodes_per_eps / eps).ceil() as usize;
    let h = period / n as f64;
    let grid = Grid2D::new(n, 1, h, h, [0.0, 0.0])?;
    let params = if lambda > 0.0 {
        Params::from_lambda(lambda, eps, gamma)?
    } else {
        let mut p = Params::new(0.0, gamma);
        p.eps = Some(eps);
        p
    };
    let e = PlanarEnergy::rescaled(grid, vec![true; n], Boundary::Periodic, &params, None)?;
    let s2e = std::f64::consts::SQRT_2 * eps;
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) * h;
            let d = if t < 0.5 * period { t.min(0.5 * period - t) } else { -(t - 0.5 * period).min(period - t) };
            (d / s2e).tanh()
        })
        .collect();
    Ok(e.value(&x) / (period * h))
}

/// Golden-section search of `stripe_energy` over `ln L ∈ [ln lo, ln hi]`.
pub fn optimal_period(lambda: f64, eps: f64, gamma: f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let f = |t: f64| stripe_energy(t.exp(), lambda, eps, gamma);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let t = 0.5 * (a + b);
    Ok((t.exp(), f(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unresolved() {
        assert!(stripe_energy(0.01, 1.0, 0.01, 10.0).is_err());
        assert!(stripe_energy_with(1.0, 1.0, 0.01, 10.0, 4.0).is_err());
    }
}
