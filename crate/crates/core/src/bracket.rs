//! Spectral window and the inner-cylinder Dirichlet eigenvalues
//! `λ_{n,m,k} = (x_{m,k}/a)² + λ_∞^n`, which bound the windowed spectrum
//! from above.
//!
//! Transverse indices are 1-based throughout: `n = 1` is the ground level of
//! the Neumann/Dirichlet operator.

use serde::{Deserialize, Serialize};

use crate::specfun::{bessel_zero, sorted_zeros, MAX_ORDER, MAX_ZERO_INDEX};
use crate::transverse::{ground, levels, BoundaryType, WaveguideParams, MAX_LEVELS};
use crate::{Error, Result};

/// `[λ_∞^1, λ_0^1)`; the essential spectrum starts at `upper`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub lower: f64,
    pub upper: f64,
}

impl SpectralWindow {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, lambda: f64) -> bool {
        self.lower <= lambda && lambda < self.upper
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketEstimate {
    pub n: usize,
    pub m: u32,
    pub k: u32,
    pub lambda: f64,
    pub multiplicity: u32,
}

/// Result of [`dirichlet_disc_levels`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscLevels {
    pub entries: Vec<BracketEstimate>,
    /// `a = 0`: there is no inner cylinder.
    pub degenerate: bool,
    /// Some `λ_∞^n` with `n >= 2` lies below the cutoff, so excited
    /// transverse levels contribute.
    pub higher_transverse: bool,
}

pub fn window(params: &WaveguideParams) -> Result<SpectralWindow> {
    let lower = ground(params, BoundaryType::NeumannDirichlet)?.lambda;
    let upper = ground(params, BoundaryType::DirichletDirichlet)?.lambda;
    Ok(SpectralWindow { lower, upper })
}

/// All `λ_{n,m,k} < below` with `n <= n_max`, `m <= m_max`, `k <= k_max`,
/// sorted ascending (ties by `n`, then `m`).
pub fn dirichlet_disc_levels(
    params: &WaveguideParams,
    below: f64,
    n_max: usize,
    m_max: u32,
    k_max: u32,
) -> Result<DiscLevels> {
    params.validate()?;
    if n_max == 0 || n_max > MAX_LEVELS || m_max > MAX_ORDER || k_max == 0 || k_max > MAX_ZERO_INDEX {
        return Err(Error::InvalidParams(format!(
            "caps out of range: n_max={n_max} (1..={MAX_LEVELS}), m_max={m_max} (<= {MAX_ORDER}), k_max={k_max} (1..={MAX_ZERO_INDEX})"
        )));
    }
    if params.a == 0.0 {
        return Ok(DiscLevels { entries: Vec::new(), degenerate: true, higher_transverse: false });
    }
    let mixed = levels(params, BoundaryType::NeumannDirichlet, n_max.max(2))?;
    let higher_transverse = mixed[1].lambda < below;
    let mut entries = Vec::new();
    for t in mixed.iter().take(n_max) {
        if t.lambda >= below {
            break;
        }
        for m in 0..=m_max {
            let mut any = false;
            for k in 1..=k_max {
                let x = bessel_zero(m, k)?;
                let lambda = (x / params.a).powi(2) + t.lambda;
                if lambda >= below {
                    break;
                }
                any = true;
                entries.push(BracketEstimate { n: t.n, m, k, lambda, multiplicity: if m == 0 { 1 } else { 2 } });
            }
            if !any {
                break;
            }
        }
    }
    entries.sort_by(|p, q| p.lambda.total_cmp(&q.lambda).then(p.n.cmp(&q.n)).then(p.m.cmp(&q.m)));
    Ok(DiscLevels { entries, degenerate: false, higher_transverse })
}

/// Number of `λ_{n,m,k} < λ_0^1`, with multiplicity.
pub fn count_certified(params: &WaveguideParams) -> Result<usize> {
    params.validate()?;
    if params.a == 0.0 {
        return Ok(0);
    }
    let w = window(params)?;
    let all = dirichlet_disc_levels(params, w.upper, MAX_LEVELS, MAX_ORDER, MAX_ZERO_INDEX)?;
    let caps_hit = all.entries.iter().any(|e| e.m == MAX_ORDER || e.k == MAX_ZERO_INDEX || e.n == MAX_LEVELS);
    if caps_hit {
        return Err(Error::Domain(format!("a = {} needs more Bessel zeros than the supported caps", params.a)));
    }
    Ok(all.entries.iter().map(|e| e.multiplicity as usize).sum())
}

/// `a*_i = x(i)/√(λ_0^1 − λ_∞^1)`, with `x(i)` the `i`-th positive zero
/// over all orders.
pub fn sufficient_radius(params: &WaveguideParams, i: usize) -> Result<f64> {
    if i == 0 {
        return Err(Error::InvalidParams("threshold index is 1-based".into()));
    }
    let w = window(params)?;
    let zeros = sorted_zeros(i)?;
    Ok(zeros[i - 1].x / w.gap().sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub a: f64,
    pub curves: Vec<f64>,
    pub edge: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureTable {
    pub window: SpectralWindow,
    /// `x(1), …, x(i_max)`.
    pub zeros: Vec<f64>,
    pub rows: Vec<FigureRow>,
}

/// `curve_i(a) = (x(i)/a)² + λ_∞^1` against the edge `λ_0^1` on `steps`
/// equally spaced radii from `a_min` to `a_max` inclusive.
pub fn figure_curves(params: &WaveguideParams, a_min: f64, a_max: f64, steps: usize, i_max: usize) -> Result<FigureTable> {
    if !(a_min > 0.0 && a_min < a_max && a_max.is_finite()) || steps < 2 || i_max == 0 {
        return Err(Error::InvalidParams(format!(
            "need 0 < a_min < a_max, steps >= 2, i_max >= 1 (got {a_min}, {a_max}, {steps}, {i_max})"
        )));
    }
    let w = window(params)?;
    let zeros: Vec<f64> = sorted_zeros(i_max)?.into_iter().map(|z| z.x).collect();
    let rows = (0..steps)
        .map(|s| {
            let a = if s + 1 == steps { a_max } else { a_min + (a_max - a_min) * s as f64 / (steps - 1) as f64 };
            FigureRow { a, curves: zeros.iter().map(|x| (x / a).powi(2) + w.lower).collect(), edge: w.upper }
        })
        .collect();
    Ok(FigureTable { window: w, zeros, rows })
}
