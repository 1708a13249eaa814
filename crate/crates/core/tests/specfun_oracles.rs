//! Special functions checked against independent series oracles.

use std::f64::consts::PI;

use proptest::prelude::*;
use stark_window::specfun::{
    ai_zero, airy, bessel_j, bessel_zero, integrate, mcmahon_guess, sorted_zeros, AI_0, AIP_0, BI_0, BIP_0,
};

/// Double-double accumulator (Knuth two-sum), enough to sum the Maclaurin
/// series of the Airy functions without visible rounding for |x| <= 5.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn add(self, v: f64) -> Dd {
        let s = self.hi + v;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (v - bp);
        let lo = self.lo + err;
        let hi = s + lo;
        Dd { hi, lo: lo - (hi - s) }
    }
}

/// Maclaurin oracle: Ai = c1 f − c2 g, Bi = √3 (c1 f + c2 g), with
/// f = Σ 3^k (1/3)_k x^{3k}/(3k)!, g = Σ 3^k (2/3)_k x^{3k+1}/(3k+1)!.
fn airy_series_oracle(x: f64) -> (f64, f64) {
    let (c1, c2) = (AI_0, -AIP_0);
    let x3 = x * x * x;
    let mut f = Dd { hi: 0.0, lo: 0.0 };
    let mut g = Dd { hi: 0.0, lo: 0.0 };
    let (mut tf, mut tg) = (1.0, x);
    for k in 0..200 {
        f = f.add(tf);
        g = g.add(tg);
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        if tf.abs() < 1e-40 && tg.abs() < 1e-40 {
            break;
        }
    }
    let ai = c1 * f.hi - c2 * g.hi + (c1 * f.lo - c2 * g.lo);
    let bi = 3f64.sqrt() * (c1 * f.hi + c2 * g.hi + (c1 * f.lo + c2 * g.lo));
    (ai, bi)
}

fn bessel_series_oracle(m: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut lead = 1.0;
    for i in 1..=m {
        lead *= half / i as f64;
    }
    let mut acc = Dd { hi: 0.0, lo: 0.0 };
    let mut term = lead;
    for k in 0..300 {
        acc = acc.add(term);
        let kf = (k + 1) as f64;
        term *= -half * half / (kf * (kf + m as f64));
        if term.abs() < 1e-40 {
            break;
        }
    }
    acc.hi + acc.lo
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn airy_origin_values_match_series_constants() {
    let p = airy(0.0);
    assert!((p.ai - 0.3550280538878172).abs() < 1e-15);
    assert!((p.bi - 0.6149266274460007).abs() < 1e-15);
    assert!((BI_0 - 3f64.sqrt() * AI_0).abs() < 1e-15);
    assert!((BIP_0 + 3f64.sqrt() * AIP_0).abs() < 1e-15);
}

#[test]
fn airy_matches_series_oracle_on_moderate_arguments() {
    let mut x = -5.0;
    while x <= 2.0 {
        let (ai, bi) = airy_series_oracle(x);
        let p = airy(x);
        assert!((p.ai_raw() - ai).abs() <= 1e-12 * (ai.abs() + bi.abs()), "Ai({x})");
        assert!((p.bi_raw() - bi).abs() <= 1e-12 * bi.abs().max(1.0), "Bi({x})");
        x += 0.0625;
    }
}

#[test]
fn first_ai_zero_matches_series_bisection() {
    let oracle = bisect(|x| airy_series_oracle(x).0, -2.5, -2.0);
    assert!((oracle - (-2.338107410459767)).abs() < 1e-13);
    assert!((ai_zero(1) - oracle).abs() < 1e-12);
    assert!(airy(-2.338107410459767).ai.abs() < 1e-10);
}

#[test]
fn wronskian_holds_on_a_dense_grid() {
    let n = 10_000;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = -20.0 + 50.0 * i as f64 / (n - 1) as f64;
        worst = worst.max((airy(x).wronskian_times_pi() - 1.0).abs());
    }
    assert!(worst <= 1e-10, "worst Wronskian defect {worst:e}");
}

#[test]
fn wronskian_holds_far_out() {
    for &x in &[1e2, 1e3, 1e4, -1e2, -1e3] {
        let w = airy(x).wronskian_times_pi();
        assert!((w - 1.0).abs() < 1e-10, "x = {x}: {w}");
    }
}

#[test]
fn airy_equation_residual_is_second_order() {
    // Centered second differences of Ai against x·Ai: error O(h²).
    let resid = |h: f64| {
        let mut worst: f64 = 0.0;
        for i in 0..60 {
            let x = -6.0 + 0.2 * i as f64;
            let f = |t: f64| airy(t).ai_raw();
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            worst = worst.max((d2 - x * f(x)).abs());
        }
        worst
    };
    let (e1, e2) = (resid(1e-2), resid(5e-3));
    assert!(e1 < 1e-4, "{e1}");
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn bessel_trivial_and_oracle_values() {
    assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
    assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
    assert!(bessel_j(0, 2.404825557695773).unwrap().abs() < 1e-10);
    for m in [0, 1, 2, 5, 13] {
        for &x in &[0.3, 1.0, 4.5, 7.9, 8.1, 10.0, 11.0] {
            let o = bessel_series_oracle(m, x);
            let v = bessel_j(m, x).unwrap();
            assert!((v - o).abs() < 1e-12, "J_{m}({x}) = {v} vs {o}");
        }
    }
}

#[test]
fn bessel_large_argument_matches_hankel_leading_terms() {
    // J_0(x) ≈ sqrt(2/(πx)) [P cos(x − π/4) − Q sin(x − π/4)] with two terms.
    for &x in &[200.0, 500.0, 1000.0] {
        let w = x - PI / 4.0;
        let p = 1.0 - 9.0 / (128.0 * x * x);
        let q = -1.0 / (8.0 * x) + 75.0 / (1024.0 * x * x * x);
        let approx = (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin());
        let v = bessel_j(0, x).unwrap();
        assert!((v - approx).abs() < 1e-10, "J_0({x}) = {v} vs {approx}");
    }
}

#[test]
fn bessel_zeros_match_series_bisection() {
    let z01 = bisect(|x| bessel_series_oracle(0, x), 2.0, 3.0);
    let z11 = bisect(|x| bessel_series_oracle(1, x), 3.5, 4.0);
    assert!((z01 - 2.404825557695773).abs() < 1e-13);
    assert!((z11 - 3.831705970207512).abs() < 1e-13);
    assert!((bessel_zero(0, 1).unwrap() - z01).abs() < 1e-10);
    assert!((bessel_zero(1, 1).unwrap() - z11).abs() < 1e-10);
}

#[test]
fn bessel_zeros_are_zeros_and_interlace() {
    for m in 0..=10u32 {
        for k in 1..=10u32 {
            let x = bessel_zero(m, k).unwrap();
            assert!(bessel_j(m, x).unwrap().abs() <= 1e-10);
            assert!(x < bessel_zero(m + 1, k).unwrap(), "x_{m},{k} < x_{},{k}", m + 1);
            assert!(bessel_zero(m + 1, k).unwrap() < bessel_zero(m, k + 1).unwrap());
        }
    }
}

#[test]
fn mcmahon_offset_settles_down() {
    for m in [0u32, 1, 3, 8] {
        let offs: Vec<f64> = (5..=40)
            .map(|k| bessel_zero(m, k).unwrap() - (k as f64 + m as f64 / 2.0 - 0.25) * PI)
            .collect();
        for w in offs.windows(2) {
            assert!(w[1].abs() <= w[0].abs() + 1e-12, "m={m}: {:?}", w);
        }
        let beta5 = (5.0 + m as f64 / 2.0 - 0.25) * PI;
        assert!(offs[0].abs() < (4.0 * (m * m) as f64 + 1.0) / (8.0 * beta5) + 0.1);
        let last = bessel_zero(m, 40).unwrap();
        assert!((last - mcmahon_guess(m, 40)).abs() < 1e-4, "{}", last - mcmahon_guess(m, 40));
    }
}

#[test]
fn quadrature_examples() {
    assert_eq!(integrate(|_| 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0);
    let d = 3.5;
    assert!((integrate(|z| z, 0.0, d, 1e-12).unwrap() - d * d / 2.0).abs() < 1e-13);
    assert!((integrate(f64::sin, 0.0, PI, 1e-10).unwrap() - 2.0).abs() < 1e-10);
}

proptest! {
    #[test]
    fn bessel_three_term_recurrence(m in 1u32..20, x in 0.5f64..100.0) {
        let jm = bessel_j(m, x).unwrap();
        let lhs = bessel_j(m - 1, x).unwrap() + bessel_j(m + 1, x).unwrap();
        let rhs = 2.0 * m as f64 / x * jm;
        let scale = lhs.abs().max(rhs.abs()).max(bessel_j(m - 1, x).unwrap().abs()).max(1e-300);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * scale, "m={} x={} lhs={} rhs={}", m, x, lhs, rhs);
    }

    #[test]
    fn airy_wronskian_anywhere(x in -200.0f64..500.0) {
        prop_assert!((airy(x).wronskian_times_pi() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sorted_zeros_agree_with_a_brute_table() {
    let got = sorted_zeros(400).unwrap();
    let mut all = vec![];
    for m in 0..=64u32 {
        for k in 1..=30u32 {
            all.push(bessel_zero(m, k).unwrap());
        }
    }
    all.sort_by(f64::total_cmp);
    assert!(got.windows(2).all(|w| w[0].x <= w[1].x));
    for (z, want) in got.iter().zip(&all) {
        assert_eq!(z.x, *want);
    }
}
