//! One-dimensional quadrature: adaptive Simpson with Richardson error
//! control, and composite Gauss–Legendre for fixed tensor-product grids.

use super::QuadratureError;

const MAX_DEPTH: u32 = 52;
const INITIAL_PANELS: usize = 8;
/// Integrand evaluations allowed per call before giving up.
const MAX_EVALS: usize = 4_000_000;

/// Adaptive Simpson estimate of `∫_lo^hi f` with absolute error `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, QuadratureError> {
    integrate_with_breaks(f, &[lo, hi], tol)
}

/// As [`integrate`], over consecutive intervals `points[i]..points[i+1]`.
/// Kinks of a piecewise-smooth integrand belong in `points`.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
) -> Result<f64, QuadratureError> {
    if points.len() < 2 {
        return Err(QuadratureError::InvalidInterval { lo: f64::NAN, hi: f64::NAN });
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if !(lo < hi) || points.windows(2).any(|w| !(w[0] < w[1])) || !(tol > 0.0) {
        return Err(QuadratureError::InvalidInterval { lo, hi });
    }
    let total = hi - lo;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut converged = true;
    let mut evals = 0usize;
    for w in points.windows(2) {
        let width = (w[1] - w[0]) / INITIAL_PANELS as f64;
        for p in 0..INITIAL_PANELS {
            let a = w[0] + width * p as f64;
            let b = if p + 1 == INITIAL_PANELS { w[1] } else { a + width };
            let panel_tol = tol * (b - a) / total;
            let (v, ok) = adaptive_panel(&f, a, b, panel_tol, &mut evals);
            converged &= ok;
            // Neumaier summation across panels.
            let t = sum + v;
            comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
            sum = t;
        }
    }
    let estimate = sum + comp;
    if converged && estimate.is_finite() {
        Ok(estimate)
    } else {
        Err(QuadratureError::NoConvergence { estimate, lo, hi })
    }
}

struct Segment {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, evals: &mut usize) -> (f64, bool) {
    *evals += 3;
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let mut stack = vec![Segment { a, b, fa, fm, fb, whole: simpson(a, b, fa, fm, fb), tol, depth: 0 }];
    let mut total = 0.0;
    let mut ok = true;
    while let Some(s) = stack.pop() {
        let m = 0.5 * (s.a + s.b);
        let lm = 0.5 * (s.a + m);
        let rm = 0.5 * (m + s.b);
        let flm = f(lm);
        let frm = f(rm);
        *evals += 2;
        let left = simpson(s.a, m, s.fa, flm, s.fm);
        let right = simpson(m, s.b, s.fm, frm, s.fb);
        let diff = left + right - s.whole;
        let roundoff_floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if diff.abs() <= 15.0 * s.tol || diff.abs() <= roundoff_floor {
            total += left + right + diff / 15.0;
            continue;
        }
        if s.depth >= MAX_DEPTH || *evals >= MAX_EVALS || (s.b - s.a) <= 8.0 * f64::EPSILON * m.abs().max(1.0) {
            ok = false;
            total += left + right + diff / 15.0;
            continue;
        }
        let half = 0.5 * s.tol;
        stack.push(Segment { a: s.a, b: m, fa: s.fa, fm: flm, fb: s.fm, whole: left, tol: half, depth: s.depth + 1 });
        stack.push(Segment { a: m, b: s.b, fa: s.fm, fm: frm, fb: s.fb, whole: right, tol: half, depth: s.depth + 1 });
    }
    (total, ok)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights of the composite rule with `panels` equal panels
    /// on `[lo, hi]`.
    pub fn composite(&self, lo: f64, hi: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let width = (hi - lo) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.nodes.len());
        let mut ws = Vec::with_capacity(panels * self.nodes.len());
        for p in 0..panels {
            let mid = lo + width * (p as f64 + 0.5);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(mid + 0.5 * width * x);
                ws.push(0.5 * width * w);
            }
        }
        (xs, ws)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}
