//! The transverse operators `−∂²_z + F z` on `[0, d]`.
//!
//! With `x(z) = F^{1/3} z − λ F^{−2/3}` every solution is a combination of
//! `Ai(x)` and `Bi(x)`. Writing `Ai = M sin φ`, `Bi = M cos φ` and
//! `Ai' = N sin ψ`, `Bi' = N cos ψ`, the two determinants become
//!
//! * Dirichlet/Dirichlet: `M(x0) M(x1) sin(φ(x0) − φ(x1))`,
//! * Neumann/Dirichlet: `N(x0) M(x1) sin(ψ(x0) − φ(x1))`,
//!
//! and both phase differences are strictly increasing in `λ > 0`. Level `n`
//! is the root of `φ(x0) − φ(x1) = nπ`, respectively
//! `ψ(x0) − φ(x1) = (n − 1)π`, found by bisection on a guaranteed bracket.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::specfun::{ai_zero, aip_zero, airy_phase, reference_phase_difference, GaussLegendre};
use crate::{Error, Result};

/// Largest `count` accepted by [`levels`].
pub const MAX_LEVELS: usize = 100;

/// Below `F < TRIG_SWITCH · (π/d)³` the trigonometric spectrum plus the
/// first-order field shift is used.
pub const TRIG_SWITCH: f64 = 1e-8;

/// Physical configuration: field `F`, layer width `d`, window radius `a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    #[serde(rename = "F")]
    pub f: f64,
    pub d: f64,
    pub a: f64,
}

impl WaveguideParams {
    pub fn new(f: f64, d: f64, a: f64) -> Result<Self> {
        let p = Self { f, d, a };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.f >= 0.0) {
            return Err(Error::InvalidParams(format!("F must be finite and >= 0, got {}", self.f)));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::InvalidParams(format!("d must be finite and > 0, got {}", self.d)));
        }
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(Error::InvalidParams(format!("a must be finite and >= 0, got {}", self.a)));
        }
        Ok(())
    }

    fn uses_trig(&self) -> bool {
        self.f < TRIG_SWITCH * (PI / self.d).powi(3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryType {
    /// Dirichlet at both ends (`a = 0`).
    DirichletDirichlet,
    /// Neumann at `z = 0`, Dirichlet at `z = d` (`a = ∞`).
    NeumannDirichlet,
}

/// The functions `u`, `v` that `alpha` and `beta` multiply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    /// `u = sin(kz)`, `v = cos(kz)`.
    Trig { wavenumber: f64 },
    /// `u = Ai(x(z))`, `v = Bi(x(z))` with `x(z) = x0 + cbrt_f·z`.
    /// `span = cbrt_f·d`; `phi1_rem` is the phase remainder at `x0 + span`.
    Airy { cbrt_f: f64, x0: f64, span: f64, phi1_rem: f64, amplitude: f64 },
}

/// One normalized eigenpair `χ = α u + β v` of the transverse operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseLevel {
    pub n: usize,
    pub bc: BoundaryType,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub basis: Basis,
}

impl TransverseLevel {
    /// `χ(z)`.
    pub fn value(&self, z: f64) -> f64 {
        match self.basis {
            Basis::Trig { wavenumber } => self.alpha * (wavenumber * z).sin() + self.beta * (wavenumber * z).cos(),
            Basis::Airy { cbrt_f, x0, span, phi1_rem, amplitude } => {
                let x = x0 + cbrt_f * z;
                let ph = airy_phase(x);
                let angle = reference_phase_difference(x, (span - cbrt_f * z).max(0.0)) + ph.phi_rem - phi1_rem;
                signed_exp(amplitude, ph.ln_modulus, angle.sin())
            }
        }
    }

    /// `χ'(z)`.
    pub fn derivative(&self, z: f64) -> f64 {
        match self.basis {
            Basis::Trig { wavenumber } => {
                wavenumber * (self.alpha * (wavenumber * z).cos() - self.beta * (wavenumber * z).sin())
            }
            Basis::Airy { cbrt_f, x0, span, phi1_rem, amplitude } => {
                let x = x0 + cbrt_f * z;
                let ph = airy_phase(x);
                let angle = reference_phase_difference(x, (span - cbrt_f * z).max(0.0)) + ph.psi_rem - phi1_rem;
                cbrt_f * signed_exp(amplitude, ph.ln_modulus_deriv, angle.sin())
            }
        }
    }
}

fn signed_exp(amplitude: f64, ln_mod: f64, s: f64) -> f64 {
    if s == 0.0 {
        return 0.0;
    }
    amplitude.signum() * s.signum() * (amplitude.abs().ln() + ln_mod + s.abs().ln()).exp()
}

/// The first `count` levels in increasing order.
pub fn levels(params: &WaveguideParams, bc: BoundaryType, count: usize) -> Result<Vec<TransverseLevel>> {
    params.validate()?;
    if count == 0 || count > MAX_LEVELS {
        return Err(Error::InvalidParams(format!("count must lie in 1..={MAX_LEVELS}, got {count}")));
    }
    if params.uses_trig() {
        return Ok((1..=count).map(|n| trig_level(params, bc, n)).collect());
    }
    let mut out = Vec::with_capacity(count);
    let mut lo = 0.0;
    for n in 1..=count {
        let lambda = airy_root(params, bc, n, lo)?;
        out.push(airy_level(params, bc, n, lambda));
        lo = lambda;
    }
    Ok(out)
}

/// Ground level `λ^1` only.
pub fn ground(params: &WaveguideParams, bc: BoundaryType) -> Result<TransverseLevel> {
    Ok(levels(params, bc, 1)?.remove(0))
}

fn trig_wavenumber(d: f64, bc: BoundaryType, n: usize) -> f64 {
    match bc {
        BoundaryType::DirichletDirichlet => n as f64 * PI / d,
        BoundaryType::NeumannDirichlet => (2 * n - 1) as f64 * PI / (2.0 * d),
    }
}

fn trig_level(params: &WaveguideParams, bc: BoundaryType, n: usize) -> TransverseLevel {
    let d = params.d;
    let k = trig_wavenumber(d, bc, n);
    let amp = (2.0 / d).sqrt();
    // First-order shift F<z>.
    let (alpha, beta, mean_z) = match bc {
        BoundaryType::DirichletDirichlet => (amp, 0.0, d / 2.0),
        BoundaryType::NeumannDirichlet => (0.0, amp, d / 2.0 - 1.0 / (2.0 * d * k * k)),
    };
    let mut level = TransverseLevel { n, bc, lambda: k * k + params.f * mean_z, alpha, beta, basis: Basis::Trig { wavenumber: k } };
    fix_gauge(&mut level, d);
    level
}

/// Phase function minus its target; increasing in `λ`.
fn phase_excess(params: &WaveguideParams, bc: BoundaryType, n: usize, lambda: f64) -> f64 {
    let c = params.f.cbrt();
    let x0 = -lambda / (c * c);
    let span = c * params.d;
    let p0 = airy_phase(x0);
    let p1 = airy_phase(x0 + span);
    let refd = reference_phase_difference(x0, span);
    match bc {
        BoundaryType::DirichletDirichlet => refd + p0.phi_rem - p1.phi_rem - n as f64 * PI,
        BoundaryType::NeumannDirichlet => refd + p0.psi_rem - p1.phi_rem - (n - 1) as f64 * PI,
    }
}

fn airy_root(params: &WaveguideParams, bc: BoundaryType, n: usize, lo_start: f64) -> Result<f64> {
    let mut lo = lo_start;
    let base = (n as f64 * PI / params.d).powi(2) + params.f * params.d;
    let mut hi = base + 1.0;
    let f_lo = phase_excess(params, bc, n, lo);
    let mut f_hi = phase_excess(params, bc, n, hi);
    let mut grow = 0;
    while f_hi <= 0.0 && grow < 20 {
        hi = 2.0 * hi + 1.0;
        f_hi = phase_excess(params, bc, n, hi);
        grow += 1;
    }
    if f_lo >= 0.0 || f_hi <= 0.0 {
        return Err(Error::RootBracket { level: n, lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        if phase_excess(params, bc, n, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn airy_level(params: &WaveguideParams, bc: BoundaryType, n: usize, lambda: f64) -> TransverseLevel {
    let c = params.f.cbrt();
    let x0 = -lambda / (c * c);
    let span = c * params.d;
    let p1 = airy_phase(x0 + span);
    let mut level = TransverseLevel {
        n,
        bc,
        lambda,
        alpha: 0.0,
        beta: 0.0,
        basis: Basis::Airy { cbrt_f: c, x0, span, phi1_rem: p1.phi_rem, amplitude: 1.0 },
    };
    let norm2 = norm_squared(&level, params.d);
    let amp = 1.0 / norm2.sqrt();
    if let Basis::Airy { amplitude, .. } = &mut level.basis {
        *amplitude = amp;
    }
    fix_gauge(&mut level, params.d);
    level
}

/// Airy argument past which `χ²` is below `e^{-140}` of its peak.
const DECAY_X: f64 = 30.0;

/// Composite Gauss–Legendre rule on `[0, d]` resolving `level`: panels
/// follow the oscillations and the Airy span up to the point where the
/// function has decayed, and a coarse rule covers the rest.
pub fn resolving_rule(level: &TransverseLevel, d: f64) -> (Vec<f64>, Vec<f64>) {
    let gl = GaussLegendre::new(20);
    let (z_end, span) = match level.basis {
        Basis::Trig { .. } => (d, 0.0),
        Basis::Airy { cbrt_f, x0, .. } => {
            let z_end = ((DECAY_X - x0) / cbrt_f).min(d);
            (z_end, cbrt_f * z_end)
        }
    };
    let panels = 2 * level.n + 4 * span.ceil() as usize + 8;
    let (mut zs, mut ws) = gl.composite(0.0, z_end, panels);
    if z_end < d {
        let (z2, w2) = gl.composite(z_end, d, 16);
        zs.extend(z2);
        ws.extend(w2);
    }
    (zs, ws)
}

fn norm_squared(level: &TransverseLevel, d: f64) -> f64 {
    let (zs, ws) = resolving_rule(level, d);
    zs.iter().zip(&ws).map(|(z, w)| w * level.value(*z).powi(2)).sum()
}

fn fix_gauge(level: &mut TransverseLevel, d: f64) {
    let mid = level.value(0.5 * d);
    let flip = if mid.abs() > 1e-8 {
        mid < 0.0
    } else {
        // Node at the midpoint: make χ positive just inside z = 0.
        level.value(1e-3 * d) < 0.0
    };
    if flip {
        level.alpha = -level.alpha;
        level.beta = -level.beta;
        if let Basis::Airy { amplitude, .. } = &mut level.basis {
            *amplitude = -*amplitude;
        }
    }
    if let Basis::Airy { amplitude, x0, span, phi1_rem, .. } = level.basis {
        let x1 = x0 + span;
        // χ = A M sin(φ − φ1) = A cos φ1 · Ai − A sin φ1 · Bi.
        let phi1 = if x1 < 0.0 { crate::specfun::zeta(x1) + phi1_rem } else { phi1_rem };
        level.alpha = amplitude * phi1.cos();
        level.beta = -amplitude * phi1.sin();
    }
}

/// `χ''(z) = (F z − λ) χ(z)`.
pub fn chi1_second_derivative(level: &TransverseLevel, params: &WaveguideParams, z: f64) -> f64 {
    (params.f * z - level.lambda) * level.value(z)
}

/// Eigenvalues of the three-point discretization on `nodes` unknowns,
/// found by Sturm-sequence bisection.
pub fn fd_levels_oracle(params: &WaveguideParams, bc: BoundaryType, count: usize, nodes: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if nodes < 100 {
        return Err(Error::InvalidParams(format!("nodes must be >= 100, got {nodes}")));
    }
    if count == 0 || count > nodes {
        return Err(Error::InvalidParams(format!("count must lie in 1..={nodes}, got {count}")));
    }
    let d = params.d;
    let (diag, off) = match bc {
        BoundaryType::DirichletDirichlet => {
            let h = d / (nodes + 1) as f64;
            let ih2 = 1.0 / (h * h);
            let diag: Vec<f64> = (1..=nodes).map(|j| 2.0 * ih2 + params.f * j as f64 * h).collect();
            (diag, vec![-ih2; nodes - 1])
        }
        BoundaryType::NeumannDirichlet => {
            // Unknowns at z_j = j h, j = 0..nodes−1, z_nodes = d. The ghost
            // row (2χ0 − 2χ1)/h² is symmetrized by scaling χ0 by 1/√2.
            let h = d / nodes as f64;
            let ih2 = 1.0 / (h * h);
            let diag: Vec<f64> = (0..nodes).map(|j| 2.0 * ih2 + params.f * j as f64 * h).collect();
            let mut off = vec![-ih2; nodes - 1];
            off[0] = -std::f64::consts::SQRT_2 * ih2;
            (diag, off)
        }
    };
    let off2: Vec<f64> = off.iter().map(|e| e * e).collect();
    let (mut glo, mut ghi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..nodes {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < nodes { off[i].abs() } else { 0.0 };
        glo = glo.min(diag[i] - r);
        ghi = ghi.max(diag[i] + r);
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (mut lo, mut hi) = (out.last().copied().unwrap_or(glo), ghi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(&diag, &off2, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// Number of eigenvalues below `x`.
fn sturm_count(diag: &[f64], off2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 { f64::EPSILON * (off2[i - 1].sqrt() + 1.0) } else { q };
        q = diag[i] - x - off2[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Weak-field formula with `o(F)` remainder; `n` is 1-based.
pub fn asymptotic_weak(params: &WaveguideParams, bc: BoundaryType, n: usize) -> f64 {
    let (d, f) = (params.d, params.f);
    match bc {
        BoundaryType::DirichletDirichlet => {
            let np = n as f64 * PI;
            ((np + (np * np + d.powi(3) * f).sqrt()) / (2.0 * d)).powi(2)
        }
        BoundaryType::NeumannDirichlet => {
            let m = 2.0 * (n - 1) as f64 + 1.0;
            let h = m * PI / 2.0;
            ((h + (h * h + d.powi(3) * f).sqrt()) / (2.0 * d)).powi(2)
        }
    }
}

/// Strong-field values: the closed form as printed for this model, and the
/// Airy-zero asymptotics `|a_n| F^{2/3}` (`|a'_n| F^{2/3}` for the mixed
/// case). The two differ; only the latter tracks [`levels`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongField {
    pub paper_convention: f64,
    pub airy_zero: f64,
}

pub fn asymptotic_strong(params: &WaveguideParams, bc: BoundaryType, n: usize) -> Result<StrongField> {
    let f = params.f;
    if !(f > 0.0) {
        return Err(Error::Domain("strong-field asymptotics need F > 0".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParams("level index is 1-based".into()));
    }
    let f23 = f.cbrt().powi(2);
    let (printed, zero) = match bc {
        BoundaryType::DirichletDirichlet => (
            (1.5 * f * PI * (2.0 * n as f64 - 0.25)).powf(2.0 / 3.0),
            -ai_zero(n as u32),
        ),
        BoundaryType::NeumannDirichlet => (
            (1.5 * f * PI * (2.0 * (n - 1) as f64 + 0.75)).powf(2.0 / 3.0),
            -aip_zero(n as u32),
        ),
    };
    Ok(StrongField { paper_convention: printed, airy_zero: zero * f23 })
}
