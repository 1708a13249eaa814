//! Airy functions of a real argument.
//!
//! Three regimes share the work:
//!
//! * `x > 8`: the exponentially scaled asymptotic expansions in
//!   `zeta = (2/3) x^(3/2)`.
//! * `x < -8`: the modulus/phase asymptotic expansions.
//! * `|x| <= 8`: a local Taylor expansion of `y'' = x y` about the nearest
//!   node of a half-unit anchor grid. The anchors for `Bi` and for `Ai` on
//!   the negative axis are propagated outward from the exact values at the
//!   origin; the `Ai` anchors on the positive axis are propagated backward
//!   from `x = 12`, where the asymptotic series is accurate to roughly
//!   `exp(-2 zeta) ~ 1e-24`. Stepping only in the direction in which the
//!   wanted solution is dominant keeps the propagation stable.
//!
//! For `x > 0` the results are stored scaled: `Ai·e^zeta`, `Bi·e^-zeta`, so
//! both solutions are representable far beyond the double-precision range
//! of the raw values.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

/// `Ai(0) = 1 / (3^(2/3) Γ(2/3))`.
pub const AI_0: f64 = 0.355_028_053_887_817_24;
/// `Ai'(0) = -1 / (3^(1/3) Γ(1/3))`.
pub const AIP_0: f64 = -0.258_819_403_792_806_8;
/// `Bi(0) = √3 Ai(0)`.
pub const BI_0: f64 = 0.614_926_627_446_000_7;
/// `Bi'(0) = -√3 Ai'(0)`.
pub const BIP_0: f64 = 0.448_288_357_353_826_36;

/// Beyond this magnitude the asymptotic expansions are used directly.
pub const ASYMPTOTIC_CUTOFF: f64 = 8.0;
const ANCHOR_SPACING: f64 = 0.5;
const ANCHOR_COUNT: usize = 33; // -8.0, -7.5, ..., 8.0
const AI_BACKWARD_START: f64 = 12.0;

/// Values of `Ai`, `Ai'`, `Bi`, `Bi'` at `x`.
///
/// For `x > 0` the stored values are `Ai·e^ξ`, `Ai'·e^ξ`, `Bi·e^-ξ`,
/// `Bi'·e^-ξ` with `ξ = scale_exp = (2/3) x^(3/2)`; for `x <= 0` the raw
/// values are stored and `scale_exp = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryPair {
    pub x: f64,
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
    pub scale_exp: f64,
}

impl AiryPair {
    /// Unscaled `Ai(x)`; underflows to zero for large positive `x`.
    pub fn ai_raw(&self) -> f64 {
        self.ai * (-self.scale_exp).exp()
    }

    pub fn aip_raw(&self) -> f64 {
        self.aip * (-self.scale_exp).exp()
    }

    /// Unscaled `Bi(x)`; overflows to infinity for large positive `x`.
    pub fn bi_raw(&self) -> f64 {
        self.bi * self.scale_exp.exp()
    }

    pub fn bip_raw(&self) -> f64 {
        self.bip * self.scale_exp.exp()
    }

    /// `π·(Ai Bi' − Ai' Bi)`; the scale factors cancel, so this is formed
    /// without overflow for any `x`.
    pub fn wronskian_times_pi(&self) -> f64 {
        PI * (self.ai * self.bip - self.aip * self.bi)
    }
}

/// Evaluates the Airy functions and their derivatives at a finite `x`.
pub fn airy(x: f64) -> AiryPair {
    debug_assert!(x.is_finite(), "airy argument must be finite");
    if x > ASYMPTOTIC_CUTOFF {
        asymptotic_positive(x)
    } else if x < -ASYMPTOTIC_CUTOFF {
        asymptotic_negative(x).0
    } else {
        let anchors = anchors();
        let j = ((x + ASYMPTOTIC_CUTOFF) / ANCHOR_SPACING).round() as usize;
        let j = j.min(ANCHOR_COUNT - 1);
        let x0 = anchor_x(j);
        let t = x - x0;
        let (ai, aip) = taylor_step(x0, anchors.ai[j], t);
        let (bi, bip) = taylor_step(x0, anchors.bi[j], t);
        if x > 0.0 {
            let xi = zeta(x);
            let (up, down) = (xi.exp(), (-xi).exp());
            AiryPair { x, ai: ai * up, aip: aip * up, bi: bi * down, bip: bip * down, scale_exp: xi }
        } else {
            AiryPair { x, ai, aip, bi, bip, scale_exp: 0.0 }
        }
    }
}

/// `(2/3)|x|^(3/2)`.
#[inline]
pub fn zeta(x: f64) -> f64 {
    let t = x.abs();
    2.0 / 3.0 * t * t.sqrt()
}

/// Modulus/phase description of the Airy pair.
///
/// `phi = atan2(Ai, Bi)` and `psi = atan2(Ai', Bi')` are taken on their
/// continuous branches through `phi(0) = π/6`, `psi(0) = −π/6`. Each is
/// stored as `reference + remainder`, where `reference = (2/3)(−x)^(3/2)`
/// for `x < 0` and zero otherwise; the remainder stays within a fraction of
/// `π`. Differences of phases at nearby large negative arguments are then
/// formed from the references without cancellation (see
/// [`reference_phase_difference`]).
///
/// `phi` decreases monotonically in `x` (its derivative is `−1/(π M²)`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AiryPhase {
    pub x: f64,
    pub reference: f64,
    pub phi_rem: f64,
    pub psi_rem: f64,
    /// `ln sqrt(Ai² + Bi²)`.
    pub ln_modulus: f64,
    /// `ln sqrt(Ai'² + Bi'²)`.
    pub ln_modulus_deriv: f64,
}

impl AiryPhase {
    pub fn phi(&self) -> f64 {
        self.reference + self.phi_rem
    }

    pub fn psi(&self) -> f64 {
        self.reference + self.psi_rem
    }
}

pub fn airy_phase(x: f64) -> AiryPhase {
    if x < -ASYMPTOTIC_CUTOFF {
        let (_, ph) = asymptotic_negative(x);
        return ph;
    }
    let p = airy(x);
    if x > 0.0 {
        let xi = p.scale_exp;
        let damp = (-2.0 * xi).exp();
        let phi_rem = (p.ai * damp).atan2(p.bi);
        let psi_rem = (p.aip * damp).atan2(p.bip);
        let ln_modulus = xi + 0.5 * ((p.ai * damp).powi(2) + p.bi * p.bi).ln();
        let ln_modulus_deriv = xi + 0.5 * ((p.aip * damp).powi(2) + p.bip * p.bip).ln();
        AiryPhase { x, reference: 0.0, phi_rem, psi_rem, ln_modulus, ln_modulus_deriv }
    } else {
        let xi = zeta(x);
        let phi_rem = FRAC_PI_4 + wrap_pi(p.ai.atan2(p.bi) - xi - FRAC_PI_4);
        let psi_rem = -FRAC_PI_4 + wrap_pi(p.aip.atan2(p.bip) - xi + FRAC_PI_4);
        AiryPhase {
            x,
            reference: xi,
            phi_rem,
            psi_rem,
            ln_modulus: 0.5 * (p.ai * p.ai + p.bi * p.bi).ln(),
            ln_modulus_deriv: 0.5 * (p.aip * p.aip + p.bip * p.bip).ln(),
        }
    }
}

/// `reference(x0) − reference(x0 + span)` for `span >= 0`, computed without
/// cancellation when both arguments are large and negative.
pub fn reference_phase_difference(x0: f64, span: f64) -> f64 {
    let x1 = x0 + span;
    if x1 < 0.0 {
        let (t0, t1) = (-x0, -x1);
        let num = span * (t0 * t0 + t0 * t1 + t1 * t1);
        let den = t0 * t0.sqrt() + t1 * t1.sqrt();
        2.0 / 3.0 * num / den
    } else if x0 < 0.0 {
        zeta(x0)
    } else {
        0.0
    }
}

/// The `n`-th zero of `Ai` (negative, `n >= 1`).
pub fn ai_zero(n: u32) -> f64 {
    assert!(n >= 1, "zero index is 1-based");
    let t = 3.0 * PI * (4.0 * n as f64 - 1.0) / 8.0;
    let mut x = -t.powf(2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t) - 5.0 / 36.0 / t.powi(4));
    for _ in 0..50 {
        let p = airy(x);
        let step = p.ai / p.aip;
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

/// The `n`-th zero of `Ai'` (negative, `n >= 1`).
pub fn aip_zero(n: u32) -> f64 {
    assert!(n >= 1, "zero index is 1-based");
    let t = 3.0 * PI * (4.0 * n as f64 - 3.0) / 8.0;
    let mut x = -t.powf(2.0 / 3.0) * (1.0 - 7.0 / 48.0 / (t * t) + 35.0 / 288.0 / t.powi(4));
    for _ in 0..50 {
        let p = airy(x);
        // (Ai')' = x Ai
        let step = p.aip / (x * p.ai);
        x -= step;
        if step.abs() <= 1e-16 * x.abs() {
            break;
        }
    }
    x
}

fn wrap_pi(v: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut w = v % two_pi;
    if w > PI {
        w -= two_pi;
    } else if w <= -PI {
        w += two_pi;
    }
    w
}

fn anchor_x(j: usize) -> f64 {
    -ASYMPTOTIC_CUTOFF + ANCHOR_SPACING * j as f64
}

struct Anchors {
    ai: [(f64, f64); ANCHOR_COUNT],
    bi: [(f64, f64); ANCHOR_COUNT],
}

fn anchors() -> &'static Anchors {
    static ANCHORS: OnceLock<Anchors> = OnceLock::new();
    ANCHORS.get_or_init(build_anchors)
}

fn build_anchors() -> Anchors {
    let mid = ANCHOR_COUNT / 2;
    let mut ai = [(0.0, 0.0); ANCHOR_COUNT];
    let mut bi = [(0.0, 0.0); ANCHOR_COUNT];
    ai[mid] = (AI_0, AIP_0);
    bi[mid] = (BI_0, BIP_0);

    for j in (0..mid).rev() {
        let x0 = anchor_x(j + 1);
        ai[j] = taylor_step(x0, ai[j + 1], -ANCHOR_SPACING);
        bi[j] = taylor_step(x0, bi[j + 1], -ANCHOR_SPACING);
    }
    for j in mid + 1..ANCHOR_COUNT {
        let x0 = anchor_x(j - 1);
        bi[j] = taylor_step(x0, bi[j - 1], ANCHOR_SPACING);
    }

    // Ai is recessive to the right: propagate it leftward from a point where
    // the asymptotic expansion is essentially exact.
    let start = asymptotic_positive(AI_BACKWARD_START);
    let down = (-start.scale_exp).exp();
    let mut state = (start.ai * down, start.aip * down);
    let mut x = AI_BACKWARD_START;
    while x > ASYMPTOTIC_CUTOFF + 1e-12 {
        state = taylor_step(x, state, -ANCHOR_SPACING);
        x -= ANCHOR_SPACING;
    }
    ai[ANCHOR_COUNT - 1] = state;
    for j in (mid + 1..ANCHOR_COUNT - 1).rev() {
        let x0 = anchor_x(j + 1);
        ai[j] = taylor_step(x0, ai[j + 1], -ANCHOR_SPACING);
    }
    Anchors { ai, bi }
}

/// Advances a solution of `y'' = x y` from `x0` to `x0 + t` by its Taylor
/// series about `x0`. Coefficients obey `c[n+2] = (x0 c[n] + c[n-1]) / ((n+2)(n+1))`.
fn taylor_step(x0: f64, (y0, yp0): (f64, f64), t: f64) -> (f64, f64) {
    let mut c_prev2 = 0.0; // c[n-1]
    let mut c_prev = y0; // c[n]
    let mut c_cur = yp0; // c[n+1]
    let mut y = y0 + yp0 * t;
    let mut yp = yp0;
    let mut tn = t; // t^(n+1)
    let mut n = 0usize;
    let mut quiet = 0;
    loop {
        let c_next = (x0 * c_prev + c_prev2) / (((n + 2) * (n + 1)) as f64);
        let term = c_next * tn * t;
        let dterm = (n + 2) as f64 * c_next * tn;
        y += term;
        yp += dterm;
        tn *= t;
        c_prev2 = c_prev;
        c_prev = c_cur;
        c_cur = c_next;
        n += 1;
        let scale = y.abs().max(yp.abs()).max(f64::MIN_POSITIVE);
        if term.abs().max(dterm.abs()) <= 1e-18 * scale {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if n > 400 {
            break;
        }
    }
    (y, yp)
}

/// Coefficient sequences `u_k`, `v_k` of the Airy asymptotic expansions,
/// summed against powers of `1/zeta`. Returns
/// `(Σ(−1)^k u_k ζ^-k, Σ u_k ζ^-k, Σ(−1)^k v_k ζ^-k, Σ v_k ζ^-k)`.
fn asymptotic_sums(xi: f64) -> (f64, f64, f64, f64) {
    let mut u = 1.0;
    let (mut su_alt, mut su, mut sv_alt, mut sv) = (1.0, 1.0, 1.0, 1.0);
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        pow /= xi;
        let tu = u * pow;
        let tv = v * pow;
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su_alt += sign * tu;
        su += tu;
        sv_alt += sign * tv;
        sv += tv;
        last = mag;
        if mag < 1e-18 {
            break;
        }
    }
    (su_alt, su, sv_alt, sv)
}

fn asymptotic_positive(x: f64) -> AiryPair {
    let xi = zeta(x);
    let (su_alt, su, sv_alt, sv) = asymptotic_sums(xi);
    let q = x.powf(0.25);
    let sp = PI.sqrt();
    AiryPair {
        x,
        ai: su_alt / (2.0 * sp * q),
        aip: -q * sv_alt / (2.0 * sp),
        bi: su / (sp * q),
        bip: q * sv / sp,
        scale_exp: xi,
    }
}

/// Modulus/phase asymptotics for `x < 0`; also yields the phase record.
fn asymptotic_negative(x: f64) -> (AiryPair, AiryPhase) {
    let t = -x;
    let xi = zeta(t);
    // Split the alternating sums into even and odd parts.
    let mut u = 1.0;
    let (mut p, mut q, mut r, mut s) = (1.0, 0.0, 1.0, 0.0);
    let mut pow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        pow /= xi;
        let (tu, tv) = (u * pow, v * pow);
        let mag = tu.abs().max(tv.abs());
        if mag > last {
            break;
        }
        // (−1)^j for index 2j or 2j+1
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * tu;
            r += sign * tv;
        } else {
            q += sign * tu;
            s += sign * tv;
        }
        last = mag;
        if mag < 1e-18 {
            break;
        }
    }
    let chi = xi - FRAC_PI_4;
    let (sc, cc) = chi.sin_cos();
    let sp = PI.sqrt();
    let k_amp = 1.0 / (sp * t.powf(0.25));
    let l_amp = t.powf(0.25) / sp;
    let pair = AiryPair {
        x,
        ai: k_amp * (cc * p + sc * q),
        bi: k_amp * (-sc * p + cc * q),
        aip: l_amp * (sc * r - cc * s),
        bip: l_amp * (cc * r + sc * s),
        scale_exp: 0.0,
    };
    let phase = AiryPhase {
        x,
        reference: xi,
        phi_rem: FRAC_PI_4 - q.atan2(p),
        psi_rem: -FRAC_PI_4 - s.atan2(r),
        ln_modulus: k_amp.ln() + 0.5 * (p * p + q * q).ln(),
        ln_modulus_deriv: l_amp.ln() + 0.5 * (r * r + s * s).ln(),
    };
    (pair, phase)
}
