//! Variational certificate that the windowed layer has a bound state.
//!
//! Trial function, in cylindrical coordinates:
//!
//! `Φ(r, z) = ϕ_τ(r) [χ_1(z) + ε φ(r)² g(z)]`
//!
//! with `χ_1` the Dirichlet/Dirichlet transverse ground state, `φ` a bump
//! supported in `(0, a)`, `ϕ_τ` a cutoff equal to one on `[0, b]` and
//! stretched logarithmically beyond, and `g` a vertical profile. Then
//!
//! `Q[Φ] = Q_r[Φ] − λ_0^1 ‖Φ‖² = A τ + B ε² − C ε`
//!
//! exactly, so `Q < 0` for small `ε` and smaller `τ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bracket::{window, SpectralWindow};
use crate::specfun::{integrate, integrate_with_breaks, GaussLegendre};
use crate::transverse::{chi1_second_derivative, ground, resolving_rule, BoundaryType, TransverseLevel, WaveguideParams};
use crate::{Error, Result};

pub const BUMP: &str = "phi(r) = exp(-1/(1-((2r-a)/a)^2)) on (0,a), 0 elsewhere";
pub const CUTOFF: &str =
    "varphi(s) = 1 - S((s-b)/b) on [b,2b] with S(t) = 6t^5-15t^4+10t^3; varphi_tau(r) = varphi(b + tau ln(r/b)) for r >= b";

pub const QUAD_REL_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 40;

/// `g(z)` multiplying the bump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerticalProfile {
    /// `g = 1`. Does not vanish on the Dirichlet top face, so `Φ` is outside
    /// the form domain; kept for comparison with the literal construction.
    Flat,
    /// `g = cos(πz/(2d))`: vanishes at `z = d`, free at the window.
    QuarterCosine,
}

impl VerticalProfile {
    pub fn value(self, z: f64, d: f64) -> f64 {
        match self {
            VerticalProfile::Flat => 1.0,
            VerticalProfile::QuarterCosine => (0.5 * PI * z / d).cos(),
        }
    }

    pub fn derivative(self, z: f64, d: f64) -> f64 {
        match self {
            VerticalProfile::Flat => 0.0,
            VerticalProfile::QuarterCosine => -0.5 * PI / d * (0.5 * PI * z / d).sin(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    /// Window radius; the bump lives on `(0, a)`.
    pub a: f64,
    /// Plateau radius of the cutoff.
    pub b: f64,
    pub tau: f64,
    pub eps: f64,
    pub profile: VerticalProfile,
}

impl TrialSpec {
    pub fn new(a: f64, tau: f64, eps: f64, profile: VerticalProfile) -> Self {
        Self { a, b: 2.0 * a, tau, eps, profile }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > self.a && self.tau > 0.0 && self.eps >= 0.0)
            || !(self.b.is_finite() && self.tau.is_finite() && self.eps.is_finite())
        {
            return Err(Error::InvalidParams(format!(
                "trial spec needs a > 0, b > a, tau > 0, eps >= 0 (got a={}, b={}, tau={}, eps={})",
                self.a, self.b, self.tau, self.eps
            )));
        }
        Ok(())
    }
}

/// `(φ(r), φ'(r))`.
pub fn bump(a: f64, r: f64) -> (f64, f64) {
    if r <= 0.0 || r >= a {
        return (0.0, 0.0);
    }
    let u = (2.0 * r - a) / a;
    let w = 1.0 - u * u;
    let v = (-1.0 / w).exp();
    (v, v * (-2.0 * u / (w * w)) * (2.0 / a))
}

/// `(ϕ(s), ϕ'(s))` for the unstretched cutoff.
pub fn cutoff(b: f64, s: f64) -> (f64, f64) {
    if s <= b {
        return (1.0, 0.0);
    }
    if s >= 2.0 * b {
        return (0.0, 0.0);
    }
    let t = (s - b) / b;
    let smooth = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    let slope = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    (1.0 - smooth, -slope / b)
}

/// `(ϕ_τ(r), r ϕ_τ'(r))`. The second entry stays finite where `r` itself
/// would overflow.
pub fn cutoff_tau(b: f64, tau: f64, r: f64) -> (f64, f64) {
    if r <= b {
        return (1.0, 0.0);
    }
    let (v, d) = cutoff(b, b + tau * (r / b).ln());
    (v, tau * d)
}

/// `‖ϕ'‖²` on `ds`, equal to `10/(7b)`.
pub fn cutoff_energy(b: f64) -> Result<f64> {
    Ok(integrate(|s| cutoff(b, s).1.powi(2), b, 2.0 * b, QUAD_REL_TOL / b)?)
}

/// `‖ϕ_τ'‖²` on `r dr`, integrated in `u = ln r` over the stretched tail.
pub fn stretched_cutoff_energy(b: f64, tau: f64) -> Result<f64> {
    let lo = b.ln();
    let hi = lo + b / tau;
    let f = |u: f64| {
        // r ϕ_τ'(r) at r = e^u, formed from the log directly.
        let s = b + tau * (u - lo);
        (tau * cutoff(b, s).1).powi(2)
    };
    let scale = tau * 10.0 / (7.0 * b);
    Ok(integrate(f, lo, hi, QUAD_REL_TOL * scale)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Coefficients {
    pub fn q(&self, tau: f64, eps: f64) -> f64 {
        self.a * tau + self.b * eps * eps - self.c * eps
    }
}

/// `A`, `B`, `C` from products of one-dimensional integrals.
pub fn coefficients(params: &WaveguideParams, spec: &TrialSpec) -> Result<Coefficients> {
    params.validate()?;
    spec.validate()?;
    let chi = ground(params, BoundaryType::DirichletDirichlet)?;
    coefficients_with(params, spec, &chi)
}

fn coefficients_with(params: &WaveguideParams, spec: &TrialSpec, chi: &TransverseLevel) -> Result<Coefficients> {
    let (d, f, lam) = (params.d, params.f, chi.lambda);
    let a = spec.a;
    let g = spec.profile;

    let coef_a = 2.0 * PI * cutoff_energy(spec.b)?;

    let rtol = QUAD_REL_TOL * a * a;
    let p2 = integrate(|r| bump(a, r).0.powi(2) * r, 0.0, a, rtol)?;
    let p4 = integrate(|r| bump(a, r).0.powi(4) * r, 0.0, a, rtol)?;
    let pd = integrate(|r| (bump(a, r).0 * bump(a, r).1).powi(2) * r, 0.0, a, QUAD_REL_TOL)?;

    let (zg, wg) = GaussLegendre::new(20).composite(0.0, d, 32);
    let on_profile = |h: &dyn Fn(f64) -> f64| -> f64 { zg.iter().zip(&wg).map(|(&z, w)| w * h(z)).sum() };
    let g2 = on_profile(&|z| g.value(z, d).powi(2));
    let gd = on_profile(&|z| g.derivative(z, d).powi(2));
    let gv = on_profile(&|z| (f * z - lam) * g.value(z, d).powi(2));
    let (zs, ws) = resolving_rule(chi, d);
    let j: f64 = zs
        .iter()
        .zip(&ws)
        .map(|(&z, w)| w * (chi.derivative(z) * g.derivative(z, d) + chi1_second_derivative(chi, params, z) * g.value(z, d)))
        .sum();

    let coef_b = 2.0 * PI * (4.0 * pd * g2 + p4 * (gd + gv));
    let coef_c = -2.0 * 2.0 * PI * p2 * j;
    Ok(Coefficients { a: coef_a, b: coef_b, c: coef_c })
}

/// `Q[Φ]` by two-dimensional quadrature: adaptive in `r` on `[0, b]`,
/// composite Gauss–Legendre in `z`. On the tail `r > b` the trial function
/// is `ϕ_τ χ_1`, whose `z`-integral reduces by `‖χ_1‖ = 1` and the
/// eigen-equation to the cutoff energy.
pub fn q_functional(params: &WaveguideParams, spec: &TrialSpec) -> Result<f64> {
    params.validate()?;
    spec.validate()?;
    let chi = ground(params, BoundaryType::DirichletDirichlet)?;
    q_functional_with(params, spec, &chi)
}

struct ZNodes {
    z: Vec<f64>,
    w: Vec<f64>,
    chi: Vec<f64>,
    dchi: Vec<f64>,
    g: Vec<f64>,
    dg: Vec<f64>,
}

fn z_nodes(params: &WaveguideParams, spec: &TrialSpec, chi: &TransverseLevel) -> ZNodes {
    let d = params.d;
    let (z, w) = resolving_rule(chi, d);
    ZNodes {
        chi: z.iter().map(|&t| chi.value(t)).collect(),
        dchi: z.iter().map(|&t| chi.derivative(t)).collect(),
        g: z.iter().map(|&t| spec.profile.value(t, d)).collect(),
        dg: z.iter().map(|&t| spec.profile.derivative(t, d)).collect(),
        z,
        w,
    }
}

fn q_functional_with(params: &WaveguideParams, spec: &TrialSpec, chi: &TransverseLevel) -> Result<f64> {
    let nodes = z_nodes(params, spec, chi);
    let (f, lam, eps) = (params.f, chi.lambda, spec.eps);
    // Integrand and the sum of the magnitudes of its terms.
    let terms = |r: f64| -> (f64, f64) {
        let (ph, dph) = bump(spec.a, r);
        let (cut, r_dcut) = cutoff_tau(spec.b, spec.tau, r);
        let dcut = if r > 0.0 { r_dcut / r } else { 0.0 };
        let bump2 = ph * ph;
        let (mut acc, mut gross) = (0.0, 0.0);
        for j in 0..nodes.z.len() {
            let inner = nodes.chi[j] + eps * bump2 * nodes.g[j];
            let d_r = dcut * inner + cut * eps * 2.0 * ph * dph * nodes.g[j];
            let d_z = cut * (nodes.dchi[j] + eps * bump2 * nodes.dg[j]);
            let phi = cut * inner;
            let pot = (f * nodes.z[j] - lam) * phi * phi;
            acc += nodes.w[j] * (d_r * d_r + d_z * d_z + pot);
            gross += nodes.w[j] * (d_r * d_r + d_z * d_z + pot.abs());
        }
        (2.0 * PI * r * acc, 2.0 * PI * r * gross)
    };
    let gl = GaussLegendre::new(20);
    let (rs, ws) = gl.composite(0.0, spec.b, 64);
    let scale: f64 = rs.iter().zip(&ws).map(|(r, w)| w * terms(*r).1).sum::<f64>().max(f64::MIN_POSITIVE);
    let radial = |r: f64| terms(r).0;
    let core = integrate_with_breaks(radial, &[0.0, spec.a, spec.b], QUAD_REL_TOL * scale)?;
    let norm: f64 = nodes.w.iter().zip(&nodes.chi).map(|(w, c)| w * c * c).sum();
    let tail = 2.0 * PI * stretched_cutoff_energy(spec.b, spec.tau)? * norm;
    Ok(core + tail)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub spec: TrialSpec,
    pub q_value: f64,
    pub coeff_a: f64,
    pub coeff_b: f64,
    pub coeff_c: f64,
    pub window: SpectralWindow,
}

impl Certificate {
    /// `A τ + B ε² − C ε`.
    pub fn decomposition(&self) -> f64 {
        Coefficients { a: self.coeff_a, b: self.coeff_b, c: self.coeff_c }.q(self.spec.tau, self.spec.eps)
    }

    pub fn is_valid(&self) -> bool {
        self.q_value < 0.0 && self.spec.profile == VerticalProfile::QuarterCosine
    }
}

/// Search for `(τ, ε)` with `Q[Φ] < 0`, using the admissible profile.
pub fn certify(params: &WaveguideParams) -> Result<Certificate> {
    certify_with_profile(params, VerticalProfile::QuarterCosine)
}

pub fn certify_with_profile(params: &WaveguideParams, profile: VerticalProfile) -> Result<Certificate> {
    params.validate()?;
    if !(params.a > 0.0) {
        return Err(Error::InvalidParams("certify needs a > 0".into()));
    }
    let chi = ground(params, BoundaryType::DirichletDirichlet)?;
    let win = window(params)?;
    let probe = TrialSpec::new(params.a, 1.0, 1.0, profile);
    let k = coefficients_with(params, &probe, &chi)?;
    let mut eps = if k.b > 0.0 { k.c / (2.0 * k.b) } else { 1.0 };
    let mut last_q = f64::NAN;
    for _ in 0..=MAX_HALVINGS {
        let gain = k.c * eps - k.b * eps * eps;
        if gain > 0.0 {
            let tau = (gain / (4.0 * k.a)).min(1.0);
            let spec = TrialSpec { tau, eps, ..probe };
            let q = q_functional_with(params, &spec, &chi)?;
            last_q = q;
            if q < 0.0 {
                return Ok(Certificate { spec, q_value: q, coeff_a: k.a, coeff_b: k.b, coeff_c: k.c, window: win });
            }
        }
        eps *= 0.5;
    }
    Err(Error::CertificateNotFound { a: k.a, b: k.b, c: k.c, q: last_q })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(1.0, 0.0), (0.0, 0.0));
        assert_eq!(bump(1.0, 1.0), (0.0, 0.0));
        let (v, dv) = bump(2.0, 1.0);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15 && dv.abs() < 1e-15);
        let h = 1e-6;
        let fd = (bump(2.0, 0.7 + h).0 - bump(2.0, 0.7 - h).0) / (2.0 * h);
        assert!((fd - bump(2.0, 0.7).1).abs() < 1e-8);
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(2.0, 1.0), (1.0, 0.0));
        assert_eq!(cutoff(2.0, 4.0), (0.0, 0.0));
        assert!((cutoff(2.0, 3.0).0 - 0.5).abs() < 1e-15);
        assert!((cutoff_energy(2.0).unwrap() - 10.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn zero_amplitude_costs_only_the_cutoff() {
        let p = WaveguideParams::new(1.0, 1.0, 1.0).unwrap();
        for tau in [1e-3, 0.1, 1.0] {
            let spec = TrialSpec::new(1.0, tau, 0.0, VerticalProfile::QuarterCosine);
            let q = q_functional(&p, &spec).unwrap();
            let want = 2.0 * PI * tau * 10.0 / (7.0 * 2.0);
            assert!(q > 0.0);
            assert!((q - want).abs() < 1e-8, "tau={tau}: {q} vs {want}");
        }
    }
}
