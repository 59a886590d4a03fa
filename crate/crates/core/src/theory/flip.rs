//! Return probabilities of the flip walk on the infinite red/blue tree.
//!
//! Root the `(r+b)`-regular tree at `v`. A vertex is red or blue according
//! to the color of the edge leading to it from the root side. `psi_r`
//! (`psi_b`) is the probability that a walk standing at a red (blue) vertex
//! moves further from the root and later comes back; it solves
//!
//! ```text
//! psi_r = (r-1)·rho_r²/(1-psi_r) + b·rho_b²/(1-psi_b)
//! psi_b =     r·rho_r²/(1-psi_r) + (b-1)·rho_b²/(1-psi_b)
//! f     =     r·rho_r²/(1-psi_r) + b·rho_b²/(1-psi_b)
//! ```
//!
//! where `f` is the first-return probability to the root and `1/(1-f)` the
//! expected number of visits, which sets the cover-time constant. The
//! relevant solution is the smallest one; it is the limit of the monotone
//! iteration started at `(0, 0)`.

use serde::Serialize;

use crate::error::{Error, Result};

const DAMPING: f64 = 0.5;
const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITERS: usize = 1_000_000;
const FLIP_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipSolution {
    pub r: usize,
    pub b: usize,
    pub rho_r: f64,
    pub rho_b: f64,
    pub psi_r: f64,
    pub psi_b: f64,
    /// First-return probability to the root.
    pub f: f64,
    pub xi_r: f64,
    pub xi_b: f64,
    /// `1/(1-f)`.
    pub expected_returns: f64,
    pub feasible: bool,
    /// `rho_r ≤ rho_b`, the regime in which transience is guaranteed.
    pub within_hypothesis: bool,
    pub iterations: usize,
}

impl FlipSolution {
    /// Largest absolute residual of the three defining equations.
    pub fn residual(&self) -> f64 {
        let (psi_r, psi_b, f) = flip_map(self.r, self.b, self.rho_r, self.rho_b, self.psi_r, self.psi_b);
        (psi_r - self.psi_r).abs().max((psi_b - self.psi_b).abs()).max((f - self.f).abs())
    }
}

/// Right-hand sides of the three equations at `(psi_r, psi_b)`.
fn flip_map(r: usize, b: usize, rho_r: f64, rho_b: f64, psi_r: f64, psi_b: f64) -> (f64, f64, f64) {
    let red = rho_r * rho_r / (1.0 - psi_r);
    let blue = rho_b * rho_b / (1.0 - psi_b);
    let (r, b) = (r as f64, b as f64);
    ((r - 1.0) * red + b * blue, r * red + (b - 1.0) * blue, r * red + b * blue)
}

fn check_flip_params(r: usize, b: usize, rho_r: f64, rho_b: f64) -> Result<()> {
    if r < 1 || b < 1 || r + b < 3 {
        return Err(Error::param(format!("flip walk needs r ≥ 1, b ≥ 1, r + b ≥ 3 (r={r}, b={b})")));
    }
    if !(rho_r > 0.0 && rho_b > 0.0) {
        return Err(Error::param("flip probabilities must be positive"));
    }
    let total = r as f64 * rho_r + b as f64 * rho_b;
    if (total - 1.0).abs() > FLIP_SUM_TOL {
        return Err(Error::param(format!("r·rho_r + b·rho_b must equal 1 (got {total})")));
    }
    Ok(())
}

/// Solves the return-probability system by damped fixed-point iteration
/// from `(0, 0)` (damping 0.5, tolerance 1e-12, at most 1e6 rounds).
///
/// The iterates never decrease; a decrease or an iterate reaching 1 is
/// reported as a numeric error. A converged solution whose escape
/// probabilities are not both positive is recurrent and rejected.
pub fn flip_fixed_point(r: usize, b: usize, rho_r: f64, rho_b: f64) -> Result<FlipSolution> {
    check_flip_params(r, b, rho_r, rho_b)?;
    let (mut psi_r, mut psi_b) = (0.0f64, 0.0f64);
    let mut iterations = 0;
    loop {
        if iterations >= FIXED_POINT_MAX_ITERS {
            return Err(Error::Numeric(format!(
                "flip fixed point did not converge in {FIXED_POINT_MAX_ITERS} iterations"
            )));
        }
        iterations += 1;
        let (tr, tb, _) = flip_map(r, b, rho_r, rho_b, psi_r, psi_b);
        let next_r = psi_r + DAMPING * (tr - psi_r);
        let next_b = psi_b + DAMPING * (tb - psi_b);
        if !(next_r.is_finite() && next_b.is_finite()) || next_r >= 1.0 || next_b >= 1.0 {
            return Err(Error::Numeric("flip iteration left [0, 1): no transient fixed point".into()));
        }
        if next_r < psi_r - 1e-15 || next_b < psi_b - 1e-15 {
            return Err(Error::Numeric("flip iteration lost monotonicity".into()));
        }
        let step = (next_r - psi_r).abs().max((next_b - psi_b).abs());
        psi_r = next_r;
        psi_b = next_b;
        if step < FIXED_POINT_TOL {
            break;
        }
    }
    let (_, _, f) = flip_map(r, b, rho_r, rho_b, psi_r, psi_b);
    let xi_r = 1.0 - rho_r - psi_r;
    let xi_b = 1.0 - rho_b - psi_b;
    let feasible = xi_r > 0.0 && xi_b > 0.0;
    if !feasible {
        return Err(Error::Infeasible(format!(
            "escape probabilities xi_r={xi_r}, xi_b={xi_b}: the walk is recurrent"
        )));
    }
    Ok(FlipSolution {
        r,
        b,
        rho_r,
        rho_b,
        psi_r,
        psi_b,
        f,
        xi_r,
        xi_b,
        expected_returns: 1.0 / (1.0 - f),
        feasible,
        within_hypothesis: rho_r <= rho_b,
        iterations,
    })
}

fn check_q_range(q: f64, b: usize) -> Result<()> {
    if b < 2 {
        return Err(Error::param(format!("b ≥ 2 required (b={b})")));
    }
    let lo = b as f64 / (b as f64 + 1.0);
    if !(q >= lo - 1e-15 && q <= 1.0) {
        return Err(Error::param(format!("q must lie in [{lo}, 1] (q={q})")));
    }
    Ok(())
}

/// The single-variable reduction for `r = 1`, in `z = psi_b` with
/// `q = b·rho_b = 1 - rho_r`:
///
/// `F(z) = z - (1-q)²(1-z)/(1-q²/b-z) - (b-1)q²/(b²(1-z))`.
#[allow(non_snake_case)]
pub fn flip_F(z: f64, q: f64, b: usize) -> Result<f64> {
    check_q_range(q, b)?;
    let bf = b as f64;
    let pole = 1.0 - q * q / bf;
    // At q = 1 the red term vanishes identically and the pole is removable.
    if !(0.0..1.0).contains(&z) || (z == pole && q < 1.0) {
        return Err(Error::param(format!("z={z} is outside [0, 1) or on the pole {pole}")));
    }
    let red = if q < 1.0 { (1.0 - q).powi(2) * (1.0 - z) / (pole - z) } else { 0.0 };
    Ok(z - red - (bf - 1.0) * q * q / (bf * bf * (1.0 - z)))
}

/// Smallest root of [`flip_F`] by bisection on `[0, 1/2]`, where
/// `F(0) < 0 < F(1/2)` whenever `q < 1`.
pub fn flip_smallest_root(q: f64, b: usize) -> Result<f64> {
    check_q_range(q, b)?;
    if q >= 1.0 {
        return Err(Error::param("q < 1 required for the root bracket"));
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    let (f_lo, f_hi) = (flip_F(lo, q, b)?, flip_F(hi, q, b)?);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Numeric(format!("root not bracketed: F(0)={f_lo}, F(1/2)={f_hi}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if flip_F(mid, q, b)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Roots of the cubic numerator `N(w)` for `r = 1, b = 2`, in `w = 1 - z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct B2Roots {
    pub q: f64,
    /// `q/2`: escape probability zero (recurrent).
    pub w_half: f64,
    /// `(q/4)[(3-q) + √(9-10q+q²)]`: the transient solution.
    pub w_plus: f64,
    /// `(q/4)[(3-q) - √(9-10q+q²)]`: negative escape probability.
    pub w_minus: f64,
}

impl B2Roots {
    /// `psi_b = 1 - w_plus`.
    pub fn psi_b(&self) -> f64 {
        1.0 - self.w_plus
    }

    /// Blue escape probability `w - q/2` implied by root `w`.
    pub fn xi_b(&self, w: f64) -> f64 {
        w - self.q / 2.0
    }
}

/// Coefficients `[1, c2, c1, c0]` of the monic cubic
/// `N(w) = w³ - (q/2)(4-q)w² + (3/4)q²w - q⁴/8`.
pub fn cubic_coefficients_b2(q: f64) -> [f64; 4] {
    [1.0, -0.5 * q * (4.0 - q), 0.75 * q * q, -q.powi(4) / 8.0]
}

pub fn flip_roots_b2(q: f64) -> Result<B2Roots> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::param(format!("q must lie in (0, 1] (q={q})")));
    }
    let disc = 9.0 - 10.0 * q + q * q;
    assert!(disc >= 0.0, "discriminant 9-10q+q² is non-negative for q ≤ 1");
    let s = disc.sqrt();
    Ok(B2Roots {
        q,
        w_half: q / 2.0,
        w_plus: q / 4.0 * ((3.0 - q) + s),
        w_minus: q / 4.0 * ((3.0 - q) - s),
    })
}

/// Flip-walk cover-time constant for `r = 1, b = 2` as a function of
/// `q = 2·rho_b = 1 - rho_r`:
///
/// `θ(q) = 2/(q(5-q+s)) + 2/(q(1-q+s))`, `s = √(9-10q+q²)`.
///
/// Diverges (returns `+∞`) at `q = 0` and `q = 1`. Values below `q = 2/3`
/// have `rho_r > rho_b`.
pub fn theta_flip(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param(format!("q must lie in [0, 1] (q={q})")));
    }
    if q == 0.0 || q == 1.0 {
        return Ok(f64::INFINITY);
    }
    let s = (9.0 - 10.0 * q + q * q).sqrt();
    Ok(2.0 / (q * (5.0 - q + s)) + 2.0 / (q * (1.0 - q + s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_three_regular_solution() {
        let s = flip_fixed_point(1, 2, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((s.psi_r - 1.0 / 3.0).abs() < 1e-10);
        assert!((s.psi_b - 1.0 / 3.0).abs() < 1e-10);
        assert!((s.f - 0.5).abs() < 1e-10);
        assert!((s.expected_returns - 2.0).abs() < 1e-9);
        assert!(s.residual() < 1e-10);
    }

    #[test]
    fn escape_identities_hold() {
        let s = flip_fixed_point(2, 3, 0.1, 0.8 / 3.0).unwrap();
        assert!((s.rho_r + s.psi_r + s.xi_r - 1.0).abs() < 1e-15);
        assert!((s.rho_b + s.psi_b + s.xi_b - 1.0).abs() < 1e-15);
        // f - psi_b = rho_b²/(1-psi_b) for every r.
        assert!((s.f - s.psi_b - s.rho_b * s.rho_b / (1.0 - s.psi_b)).abs() < 1e-10);
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(flip_fixed_point(1, 2, 0.2, 0.2), Err(Error::Parameter(_))));
        assert!(matches!(flip_fixed_point(1, 2, 0.0, 0.5), Err(Error::Parameter(_))));
        assert!(matches!(flip_F(0.1, 0.5, 2), Err(Error::Parameter(_))));
        assert!(flip_F(1.0 - 0.9 * 0.9 / 3.0, 0.9, 3).is_err()); // pole
        assert!(flip_F(1.0, 1.0, 2).is_err());
        assert!(flip_smallest_root(1.0, 3).is_err());
        assert!(theta_flip(1.5).is_err());
    }

    #[test]
    fn extreme_q_roots() {
        for b in 2..6 {
            let bf = b as f64;
            let q = bf / (bf + 1.0);
            for z in [1.0 / (bf + 1.0), bf / (bf + 1.0)] {
                assert!(flip_F(z, q, b).unwrap().abs() < 1e-12, "b={b} z={z}");
            }
        }
        for b in 3..6 {
            let bf = b as f64;
            for z in [1.0 / bf, (bf - 1.0) / bf] {
                assert!(flip_F(z, 1.0, b).unwrap().abs() < 1e-12, "b={b} z={z}");
            }
        }
    }

    #[test]
    fn f_at_half_for_b2() {
        let q = 2.0 / 3.0;
        let v = flip_F(0.5, q, 2).unwrap();
        assert!((v - 7.0 / 90.0).abs() < 1e-14);
        assert!((v - (1.0 - q) * ((1.0 + q) / 2.0 - 1.0 / (1.0 + q))).abs() < 1e-14);
    }

    #[test]
    fn b2_roots_at_two_thirds() {
        let roots = flip_roots_b2(2.0 / 3.0).unwrap();
        assert!((roots.w_half - 1.0 / 3.0).abs() < 1e-15);
        assert!((roots.w_plus - 2.0 / 3.0).abs() < 1e-15);
        assert!((roots.w_minus - 1.0 / 9.0).abs() < 1e-15);
        assert!((roots.psi_b() - 1.0 / 3.0).abs() < 1e-15);
        assert!((roots.xi_b(roots.w_plus) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn theta_endpoints() {
        assert!((theta_flip(2.0 / 3.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(theta_flip(1.0).unwrap().is_infinite());
        assert!(theta_flip(0.0).unwrap().is_infinite());
    }
}
