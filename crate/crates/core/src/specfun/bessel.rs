//! Bessel functions of the first kind of integer order, and their zeros.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{OnceLock, RwLock};

use super::SpecFunError;

/// Largest supported order.
pub const MAX_ORDER: u32 = 64;
/// Largest supported zero index.
pub const MAX_ZERO_INDEX: u32 = 1000;
/// Arguments up to this value use the ascending series.
const SERIES_LIMIT: f64 = 8.0;

/// `J_m(x)` for `x >= 0`.
pub fn bessel_j(m: u32, x: f64) -> Result<f64, SpecFunError> {
    check_order(m)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain { what: "bessel_j argument", value: x });
    }
    Ok(j_unchecked(m, x))
}

/// `(J_m(x), J_m'(x))`.
pub fn bessel_j_with_derivative(m: u32, x: f64) -> Result<(f64, f64), SpecFunError> {
    check_order(m)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain { what: "bessel_j argument", value: x });
    }
    Ok(j_and_derivative(m, x))
}

fn check_order(m: u32) -> Result<(), SpecFunError> {
    if m > MAX_ORDER {
        Err(SpecFunError::UnsupportedOrder { order: m, max: MAX_ORDER })
    } else {
        Ok(())
    }
}

fn j_unchecked(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        j_series(m, x)
    } else {
        miller(m, x).1
    }
}

fn j_and_derivative(m: u32, x: f64) -> (f64, f64) {
    if x == 0.0 {
        let d = if m == 1 { 0.5 } else { 0.0 };
        return (if m == 0 { 1.0 } else { 0.0 }, d);
    }
    let (below, jm, above) = if x <= SERIES_LIMIT {
        let below = if m == 0 { -j_series(1, x) } else { j_series(m - 1, x) };
        (below, j_series(m, x), j_series(m + 1, x))
    } else {
        miller(m, x)
    };
    // J_{-1} = −J_1, so the same formula covers m = 0.
    (jm, 0.5 * (below - above))
}

/// Ascending series `Σ (−1)^k (x/2)^(2k+m) / (k! (k+m)!)`.
fn j_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for i in 1..=m {
        lead *= half / i as f64;
    }
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence normalized by `J_0 + 2 Σ J_2k = 1`.
/// Returns `(J_{m−1}, J_m, J_{m+1})`, with `J_{−1} = −J_1`.
fn miller(m: u32, x: f64) -> (f64, f64, f64) {
    let top = (m as f64).max(x);
    let start = (top + 20.0 + 12.0 * top.cbrt()).ceil() as usize;
    let start = start + start % 2;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut sum = 0.0;
    let (mut jm_minus, mut jm, mut jm_plus) = (0.0, 0.0, 0.0);
    let m = m as usize;
    let mut k = start;
    loop {
        if k == m + 1 {
            jm_plus = cur;
        }
        if k == m {
            jm = cur;
        }
        if m > 0 && k == m - 1 {
            jm_minus = cur;
        }
        if k % 2 == 0 {
            sum += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            sum *= s;
            jm *= s;
            jm_plus *= s;
            jm_minus *= s;
        }
    }
    if m == 0 {
        // `next` holds J_1 once the loop reaches k = 0.
        jm_minus = -next;
    }
    (jm_minus / sum, jm / sum, jm_plus / sum)
}

/// McMahon's large-zero expansion for `x_{m,k}`.
pub fn mcmahon_guess(m: u32, k: u32) -> f64 {
    let beta = (k as f64 + 0.5 * m as f64 - 0.25) * PI;
    let mu = 4.0 * (m as f64).powi(2);
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
}

/// Memo of positive Bessel zeros, filled in order per angular order.
///
/// Every lookup returns the same value whether or not it was cached; the
/// zeros of one order are always produced sequentially from the first.
#[derive(Debug, Default)]
pub struct BesselZeroTable {
    entries: RwLock<HashMap<u32, Vec<f64>>>,
}

impl BesselZeroTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// `x_{m,k}`, the `k`-th positive zero of `J_m` (`k >= 1`).
    pub fn zero(&self, m: u32, k: u32) -> Result<f64, SpecFunError> {
        check_order(m)?;
        if k == 0 || k > MAX_ZERO_INDEX {
            return Err(SpecFunError::UnsupportedIndex { index: k, max: MAX_ZERO_INDEX });
        }
        if let Some(v) = self.entries.read().expect("zero table poisoned").get(&m) {
            if let Some(&z) = v.get(k as usize - 1) {
                return Ok(z);
            }
        }
        let mut guard = self.entries.write().expect("zero table poisoned");
        let zeros = guard.entry(m).or_default();
        while zeros.len() < k as usize {
            let next_k = zeros.len() as u32 + 1;
            let z = next_zero(m, next_k, zeros.last().copied())?;
            zeros.push(z);
        }
        Ok(zeros[k as usize - 1])
    }

    /// Number of `(m, k)` entries currently stored.
    pub fn len(&self) -> usize {
        self.entries.read().expect("zero table poisoned").values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn global_table() -> &'static BesselZeroTable {
    static TABLE: OnceLock<BesselZeroTable> = OnceLock::new();
    TABLE.get_or_init(BesselZeroTable::new)
}

/// `x_{m,k}` from the process-wide memo table.
pub fn bessel_zero(m: u32, k: u32) -> Result<f64, SpecFunError> {
    global_table().zero(m, k)
}

/// A positive Bessel zero labelled with its order and index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelledZero {
    pub m: u32,
    pub k: u32,
    pub x: f64,
}

/// The `count` smallest positive zeros over all orders, ascending; ties are
/// broken by the smaller order.
pub fn sorted_zeros(count: usize) -> Result<Vec<LabelledZero>, SpecFunError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let count_u32 = u32::try_from(count)
        .ok()
        .filter(|&c| c <= MAX_ZERO_INDEX)
        .ok_or(SpecFunError::UnsupportedIndex { index: u32::MAX, max: MAX_ZERO_INDEX })?;
    // The order-0 zeros alone supply `count` values below x_{0,count}; grow
    // a tighter bound until enough zeros of all orders lie under it.
    let ceiling = bessel_zero(0, count_u32)?;
    let mut bound = bessel_zero(0, 1)?.max(ceiling / (count as f64).sqrt());
    let mut all = Vec::new();
    loop {
        all.clear();
        for m in 0.. {
            if m > MAX_ORDER {
                return Err(SpecFunError::UnsupportedOrder { order: m, max: MAX_ORDER });
            }
            if bessel_zero(m, 1)? > bound {
                break;
            }
            for k in 1..=MAX_ZERO_INDEX {
                let x = bessel_zero(m, k)?;
                if x > bound {
                    break;
                }
                all.push(LabelledZero { m, k, x });
            }
        }
        if all.len() >= count || bound >= ceiling {
            break;
        }
        bound = (bound * 1.25).min(ceiling);
    }
    all.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.m.cmp(&b.m)));
    all.truncate(count);
    Ok(all)
}

fn next_zero(m: u32, k: u32, prev: Option<f64>) -> Result<f64, SpecFunError> {
    // No zero of J_m lies in (0, m]; consecutive zeros are more than 3 apart.
    let mut lo = match prev {
        Some(p) => p + 2.5,
        None => (m as f64).max(1.0),
    };
    let mut f_lo = j_unchecked(m, lo);
    let step = 0.5;
    let mut hi = lo + step;
    let mut f_hi = j_unchecked(m, hi);
    let mut scans = 0;
    while f_lo.signum() == f_hi.signum() {
        lo = hi;
        f_lo = f_hi;
        hi += step;
        f_hi = j_unchecked(m, hi);
        scans += 1;
        if scans > 100_000 {
            return Err(SpecFunError::ZeroSearch { order: m, index: k });
        }
    }
    let guess = mcmahon_guess(m, k);
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let (f, df) = j_and_derivative(m, x);
        if f == 0.0 {
            return Ok(x);
        }
        if f.signum() == f_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df;
        let next = if df != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}
