//! Closed-form and numerically solved cover-time predictions.
//!
//! Cover times on the graphs of this crate grow like `θ·n·ln n`; this module
//! computes `θ` for each walk model, plus the first-visit predictor
//! `P(v unvisited by t) ≈ (1+p_v)^(-t)`.

mod flip;

use serde::Serialize;

use crate::error::{Error, Result};

pub use flip::{
    cubic_coefficients_b2, flip_F, flip_fixed_point, flip_roots_b2, flip_smallest_root, theta_flip,
    B2Roots, FlipSolution,
};

/// `(r+b-1)/(r+b-2)`: unconstrained cover-time constant of an
/// `(r+b)`-regular random graph.
pub fn sigma_rb(r: usize, b: usize) -> Result<f64> {
    let d = r + b;
    if d < 3 {
        return Err(Error::param(format!("sigma_rb needs r + b ≥ 3 (r={r}, b={b})")));
    }
    Ok((d as f64 - 1.0) / (d as f64 - 2.0))
}

/// `(b-1)/(b-2)`: cover-time constant of the blue subgraph alone. Undefined
/// for `b = 2`, where the blue graph is a union of cycles.
pub fn sigma_b(b: usize) -> Result<f64> {
    if b < 3 {
        return Err(Error::param(format!("sigma_b needs b ≥ 3 (b={b})")));
    }
    Ok((b as f64 - 1.0) / (b as f64 - 2.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1) (alpha={alpha})")));
    }
    Ok(())
}

/// Red-use budget of an α-constrained smooth walk, as a multiple of
/// `n·ln n`: `α·σ_RB·r/(r+b)`.
pub fn gamma_budget(alpha: f64, r: usize, b: usize) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha * sigma_rb(r, b)? * r as f64 / (r + b) as f64)
}

/// `α·σ_RB + (1-α)·σ_B` for the α-constrained smooth walk (`b ≥ 3`).
pub fn smooth_cover_const(alpha: f64, r: usize, b: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must lie in [0, 1] (alpha={alpha})")));
    }
    Ok(alpha * sigma_rb(r, b)? + (1.0 - alpha) * sigma_b(b)?)
}

/// `(1 + C/F)·(r+1)/r` for congestion pricing over a blue Hamilton cycle.
pub fn congestion_cover_const(peak: u64, off_peak: u64, r: usize) -> Result<f64> {
    if off_peak == 0 {
        return Err(Error::param("off-peak period F must be at least 1"));
    }
    if r == 0 {
        return Err(Error::param("r ≥ 1 required"));
    }
    Ok((1.0 + peak as f64 / off_peak as f64) * (r as f64 + 1.0) / r as f64)
}

/// Expected visits to a locally tree-like vertex of an `s`-regular graph
/// (including time 0): `(s-1)/(s-2)`.
pub fn returns_tree(s: usize) -> Result<f64> {
    if s <= 2 {
        return Err(Error::param(format!("returns_tree needs s ≥ 3 (s={s})")));
    }
    Ok((s as f64 - 1.0) / (s as f64 - 2.0))
}

/// First-visit rate `p_v = π_v / R_v`.
pub fn p_v(pi_v: f64, r_v: f64) -> Result<f64> {
    if !(pi_v > 0.0 && pi_v <= 1.0) || !(r_v >= 1.0 && r_v.is_finite()) {
        return Err(Error::param(format!("need 0 < pi_v ≤ 1 and R_v ≥ 1 (pi_v={pi_v}, R_v={r_v})")));
    }
    Ok(pi_v / r_v)
}

/// Probability that `v` is still unvisited after `t` steps, `(1+p_v)^(-t)`.
pub fn nonvisit_prob(p_v: f64, t: f64) -> Result<f64> {
    if !(p_v > 0.0 && p_v < 1.0) || !(t >= 0.0) {
        return Err(Error::param(format!("need 0 < p_v < 1 and t ≥ 0 (p_v={p_v}, t={t})")));
    }
    Ok((-t * p_v.ln_1p()).exp())
}

/// Walk model and parameters a prediction is requested for.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Unconstrained walk on an `(r+b)`-regular union.
    Simple { r: usize, b: usize },
    Flip { r: usize, b: usize, rho_r: f64, rho_b: f64 },
    Smooth { alpha: f64, r: usize, b: usize },
    /// Blue Hamilton cycle with `peak`/`off_peak` periods.
    Congestion { peak: u64, off_peak: u64, r: usize },
    /// Oblivious walk on a union with `b ≥ 3` whose red budget runs out after
    /// `budget_frac·σ_RB·n·ln n` steps.
    ObliviousUnion { r: usize, b: usize, budget_frac: f64 },
    /// Oblivious walk over a blue Hamilton cycle.
    ObliviousHamilton { r: usize, budget_frac: f64 },
    /// Oblivious walk over a blue random 2-factor.
    ObliviousTwoFactor { r: usize, budget_frac: f64 },
}

/// Growth law of the predicted cover time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CoverLaw {
    /// `theta·n·ln n`.
    NLogN { theta: f64 },
    /// `n²/2`: the walk is left to finish on a blue cycle.
    HalfNSquared,
    /// The walk is expected never to cover.
    FailureExpected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverConstant {
    pub model: Model,
    pub law: CoverLaw,
    pub n: usize,
}

impl CoverConstant {
    pub fn theta(&self) -> Option<f64> {
        match self.law {
            CoverLaw::NLogN { theta } => Some(theta),
            _ => None,
        }
    }

    pub fn predicted_cover(&self) -> Option<f64> {
        let n = self.n as f64;
        match self.law {
            CoverLaw::NLogN { theta } => Some(theta * n * n.ln()),
            CoverLaw::HalfNSquared => Some(n * n / 2.0),
            CoverLaw::FailureExpected => None,
        }
    }
}

fn check_budget_frac(x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::param(format!("budget fraction must be non-negative (got {x})")));
    }
    Ok(())
}

/// Predicted cover-time law for `model` on `n` vertices.
pub fn predict(model: &Model, n: usize) -> Result<CoverConstant> {
    if n < 3 {
        return Err(Error::param(format!("n ≥ 3 required (n={n})")));
    }
    let law = match *model {
        Model::Simple { r, b } => CoverLaw::NLogN { theta: sigma_rb(r, b)? },
        Model::Flip { r, b, rho_r, rho_b } => {
            CoverLaw::NLogN { theta: flip_fixed_point(r, b, rho_r, rho_b)?.expected_returns }
        }
        Model::Smooth { alpha, r, b } => {
            check_alpha(alpha)?;
            CoverLaw::NLogN { theta: smooth_cover_const(alpha, r, b)? }
        }
        Model::Congestion { peak, off_peak, r } => {
            CoverLaw::NLogN { theta: congestion_cover_const(peak, off_peak, r)? }
        }
        Model::ObliviousUnion { r, b, budget_frac } => {
            check_budget_frac(budget_frac)?;
            let alpha = budget_frac.min(1.0);
            CoverLaw::NLogN { theta: smooth_cover_const(alpha, r, b)? }
        }
        Model::ObliviousHamilton { r, budget_frac } | Model::ObliviousTwoFactor { r, budget_frac } => {
            check_budget_frac(budget_frac)?;
            let sigma = sigma_rb(r, 2)?;
            if budget_frac >= 1.0 {
                CoverLaw::NLogN { theta: sigma }
            } else if matches!(model, Model::ObliviousHamilton { .. }) {
                CoverLaw::HalfNSquared
            } else {
                CoverLaw::FailureExpected
            }
        }
    };
    Ok(CoverConstant { model: model.clone(), law, n })
}
