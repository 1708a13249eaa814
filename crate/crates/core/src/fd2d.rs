//! Axisymmetric finite differences for `−(1/r)∂_r(r∂_r) + m²/r² − ∂²_z + Fz`
//! on `(0, r_max) × (0, d)`.
//!
//! Radial nodes are cell centred, `r_i = (i + 1/2) h_r`, so the axis needs no
//! boundary row. Vertical nodes are vertices, `z_j = j h_z`; the row `j = 0`
//! exists only where the bottom is Neumann, with half weight `h_z/2`.
//! The stiffness matrix `K` and mass `M = diag(r_i h_r w_j)` are assembled in
//! conservative form and the returned operator is `M^{-1/2} K M^{-1/2}`,
//! symmetric entry for entry.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bracket::{window, SpectralWindow};
use crate::transverse::{ground, BoundaryType, WaveguideParams};
use crate::{Error, Result};

/// Residual bound every returned eigenpair satisfies.
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const MAX_EIGS: usize = 10;
const MAX_ITERATIONS: usize = 2000;
const SEED: u64 = 0x5eed_2d;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylGrid {
    pub nr: usize,
    pub nz: usize,
    pub r_max: f64,
    pub d: f64,
}

impl CylGrid {
    pub fn new(nr: usize, nz: usize, r_max: f64, d: f64) -> Result<Self> {
        if nr < 8 || nz < 8 {
            return Err(Error::InvalidParams(format!("grid needs nr, nz >= 8 (got {nr}, {nz})")));
        }
        if !(r_max > 0.0 && r_max.is_finite() && d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParams(format!("grid needs r_max, d > 0 (got {r_max}, {d})")));
        }
        Ok(Self { nr, nz, r_max, d })
    }

    pub fn h_r(&self) -> f64 {
        self.r_max / self.nr as f64
    }

    pub fn h_z(&self) -> f64 {
        self.d / self.nz as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h_r()
    }

    pub fn z(&self, j: usize) -> f64 {
        j as f64 * self.h_z()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowBC {
    /// Cylinder `r < a` (so `r_max = a`), Neumann bottom, Dirichlet side.
    InnerDirichlet,
    /// Cylinder `r < a`, Neumann bottom, Neumann side.
    InnerNeumann,
    /// The window problem cut off at `r_max >= 4a` with a Dirichlet wall.
    TruncatedFull,
}

/// Assembled operator in compressed-row form.
#[derive(Clone, Debug)]
pub struct SymOperator {
    pub params: WaveguideParams,
    pub grid: CylGrid,
    pub bc: WindowBC,
    pub m: u32,
    /// `(i, j)` for each unknown, `i`-major with `j` fastest.
    pub nodes: Vec<(usize, usize)>,
    /// Mass weight `r_i h_r w_j` per unknown.
    pub mass: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SymOperator {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    /// `max |S_pq − S_qp|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in 0..self.dim() {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                worst = worst.max((self.vals[k] - self.entry(self.cols[k], row)).abs());
            }
        }
        worst
    }

    pub fn bandwidth(&self) -> usize {
        (0..self.dim())
            .flat_map(|row| self.cols[self.row_ptr[row]..self.row_ptr[row + 1]].iter().map(move |&c| row.abs_diff(c)))
            .max()
            .unwrap_or(0)
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for row in 0..self.dim() {
            let mut acc = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            y[row] = acc;
        }
    }

    /// Converts a vector of the symmetric problem to grid values `u`.
    pub fn to_grid_values(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.mass).map(|(x, m)| x / m.sqrt()).collect()
    }
}

pub fn assemble(params: &WaveguideParams, grid: &CylGrid, bc: WindowBC, m: u32) -> Result<SymOperator> {
    params.validate()?;
    if (grid.d - params.d).abs() > 1e-12 * params.d {
        return Err(Error::Assembly(format!("grid height {} differs from d = {}", grid.d, params.d)));
    }
    match bc {
        WindowBC::InnerDirichlet | WindowBC::InnerNeumann => {
            if !(params.a > 0.0) || (grid.r_max - params.a).abs() > 1e-12 * params.a {
                return Err(Error::Assembly(format!("inner problems need r_max = a > 0 (r_max = {}, a = {})", grid.r_max, params.a)));
            }
        }
        WindowBC::TruncatedFull => {
            if !(params.a > 0.0) || grid.r_max < 4.0 * params.a * (1.0 - 1e-12) {
                return Err(Error::Assembly(format!("truncated problem needs r_max >= 4a (r_max = {}, a = {})", grid.r_max, params.a)));
            }
        }
    }
    let (nr, nz) = (grid.nr, grid.nz);
    let (hr, hz) = (grid.h_r(), grid.h_z());
    let neumann_bottom = |i: usize| match bc {
        WindowBC::TruncatedFull => grid.r(i) <= params.a,
        _ => true,
    };
    let j0: Vec<usize> = (0..nr).map(|i| if neumann_bottom(i) { 0 } else { 1 }).collect();
    let mut start = vec![0usize; nr + 1];
    for i in 0..nr {
        start[i + 1] = start[i] + (nz - j0[i]);
    }
    let index = |i: usize, j: usize| -> Option<usize> {
        if i < nr && j >= j0[i] && j < nz {
            Some(start[i] + j - j0[i])
        } else {
            None
        }
    };
    let wz = |j: usize| if j == 0 { 0.5 * hz } else { hz };
    let mass_at = |i: usize, j: usize| grid.r(i) * hr * wz(j);
    let face = |i: usize| (i + 1) as f64 * hr; // r_{i+1/2}
    let outer_dirichlet = bc != WindowBC::InnerNeumann;

    let n = start[nr];
    let mut nodes = Vec::with_capacity(n);
    let mut mass = Vec::with_capacity(n);
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    row_ptr.push(0);
    // Symmetric couplings, computed identically from either side.
    let r_link = |i: usize, j: usize| -face(i) * wz(j) / hr / (mass_at(i, j) * mass_at(i + 1, j)).sqrt();
    let z_link = |i: usize, j: usize| -grid.r(i) * hr / hz / (mass_at(i, j) * mass_at(i, j + 1)).sqrt();
    let m2 = (m as f64).powi(2);
    for i in 0..nr {
        for j in j0[i]..nz {
            let ri = grid.r(i);
            let mij = mass_at(i, j);
            let inner_face = if i == 0 { 0.0 } else { face(i - 1) };
            let outer_face = if i + 1 < nr {
                face(i)
            } else if outer_dirichlet {
                2.0 * face(i)
            } else {
                0.0
            };
            let k_rr = (inner_face + outer_face) * wz(j) / hr;
            let k_zz = if j == 0 { ri * hr / hz } else { 2.0 * ri * hr / hz };
            let k_m = m2 * hr * wz(j) / ri;
            let diag = (k_rr + k_zz + k_m) / mij + params.f * grid.z(j);

            let mut push = |c: usize, v: f64| {
                cols.push(c);
                vals.push(v);
            };
            if i > 0 {
                if let Some(c) = index(i - 1, j) {
                    push(c, r_link(i - 1, j));
                }
            }
            if j > 0 {
                if let Some(c) = index(i, j - 1) {
                    push(c, z_link(i, j - 1));
                }
            }
            push(index(i, j).expect("own node"), diag);
            if let Some(c) = index(i, j + 1) {
                push(c, z_link(i, j));
            }
            if let Some(c) = index(i + 1, j) {
                push(c, r_link(i, j));
            }
            row_ptr.push(cols.len());
            nodes.push((i, j));
            mass.push(mij);
        }
    }
    Ok(SymOperator { params: *params, grid: *grid, bc, m, nodes, mass, row_ptr, cols, vals })
}

/// Lower band Cholesky factor of a symmetric positive definite matrix.
struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    fn factor(op: &SymOperator, shift: f64) -> Option<Self> {
        let n = op.dim();
        let bw = op.bandwidth();
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        for row in 0..n {
            for k in op.row_ptr[row]..op.row_ptr[row + 1] {
                let c = op.cols[k];
                if c <= row {
                    let v = if c == row { op.vals[k] - shift } else { op.vals[k] };
                    l[row * w + (c + bw - row)] = v;
                }
            }
        }
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let klo = lo.max(j.saturating_sub(bw));
                let mut s = l[i * w + (j + bw - i)];
                let ri = i * w + bw - i;
                let rj = j * w + bw - j;
                for k in klo..j {
                    s -= l[ri + k] * l[rj + k];
                }
                if j == i {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[ri + i] = s.sqrt();
                } else {
                    l[ri + j] = s / l[rj + j];
                }
            }
        }
        Some(Self { n, bw, l })
    }

    #[cfg(test)]
    fn solve(&self, b: &mut [f64]) {
        self.solve_block(b, 1);
    }

    /// Solves for `p` right-hand sides stored interleaved, `b[i * p + c]`,
    /// streaming the factor once.
    fn solve_block(&self, b: &mut [f64], p: usize) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        let mut s = vec![0.0; p];
        for i in 0..n {
            let ri = i * w + bw - i;
            s.copy_from_slice(&b[i * p..(i + 1) * p]);
            for k in i.saturating_sub(bw)..i {
                let l = self.l[ri + k];
                let bk = &b[k * p..(k + 1) * p];
                s.iter_mut().zip(bk).for_each(|(s, x)| *s -= l * x);
            }
            let diag = self.l[ri + i];
            b[i * p..(i + 1) * p].iter_mut().zip(&s).for_each(|(x, s)| *x = s / diag);
        }
        for i in (0..n).rev() {
            let ri = i * w + bw - i;
            let diag = self.l[ri + i];
            b[i * p..(i + 1) * p].iter_mut().for_each(|x| *x /= diag);
            s.copy_from_slice(&b[i * p..(i + 1) * p]);
            for k in i.saturating_sub(bw)..i {
                let l = self.l[ri + k];
                b[k * p..(k + 1) * p].iter_mut().zip(&s).for_each(|(x, s)| *x -= l * s);
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub grid: CylGrid,
    pub bc: WindowBC,
    pub m: u32,
    pub iterations: usize,
    pub shift: f64,
    /// Unit vectors of the symmetric problem, one per value.
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn orthonormalize(vs: &mut [Vec<f64>]) {
    for pass in 0..2 {
        for i in 0..vs.len() {
            let (done, rest) = vs.split_at_mut(i);
            let v = &mut rest[0];
            for u in done.iter() {
                let c = dot(u, v);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
            }
            let nrm = dot(v, v).sqrt();
            if nrm > 0.0 {
                v.iter_mut().for_each(|x| *x /= nrm);
            }
            let _ = pass;
        }
    }
}

/// The `k` smallest eigenpairs by block shift-invert iteration with
/// Rayleigh–Ritz, shift `0.9 λ_∞^1`.
pub fn lowest_eigs(op: &SymOperator, k: usize, tol: f64) -> Result<EigResult> {
    if k == 0 || k > MAX_EIGS || k > op.dim() {
        return Err(Error::InvalidParams(format!("k must lie in 1..={} (got {k})", MAX_EIGS.min(op.dim()))));
    }
    let lower = ground(&op.params, BoundaryType::NeumannDirichlet)?.lambda;
    let mut shift = 0.9 * lower;
    let chol = match BandCholesky::factor(op, shift) {
        Some(c) => c,
        None => {
            shift = 0.0;
            BandCholesky::factor(op, shift).ok_or_else(|| Error::Assembly("operator is not positive definite".into()))?
        }
    };
    let n = op.dim();
    let p = (k + 6).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut x: Vec<Vec<f64>> = (0..p).map(|_| (0..n).map(|_| rng.gen::<f64>() - 0.5).collect()).collect();
    orthonormalize(&mut x);
    let mut prev = vec![f64::INFINITY; k];
    let mut sx = vec![vec![0.0; n]; p];
    let mut best = (f64::INFINITY, Vec::new());
    for it in 1..=MAX_ITERATIONS {
        let mut block = vec![0.0; n * p];
        for (c, v) in x.iter().enumerate() {
            v.iter().enumerate().for_each(|(i, e)| block[i * p + c] = *e);
        }
        chol.solve_block(&mut block, p);
        for (c, v) in x.iter_mut().enumerate() {
            v.iter_mut().enumerate().for_each(|(i, e)| *e = block[i * p + c]);
        }
        orthonormalize(&mut x);
        for (v, s) in x.iter().zip(sx.iter_mut()) {
            op.apply(v, s);
        }
        let h = DMatrix::from_fn(p, p, |a, b| 0.5 * (dot(&x[a], &sx[b]) + dot(&x[b], &sx[a])));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let theta: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        let rotate = |src: &[Vec<f64>]| -> Vec<Vec<f64>> {
            order
                .iter()
                .map(|&c| {
                    let mut out = vec![0.0; n];
                    for (a, s) in src.iter().enumerate() {
                        let coef = eig.eigenvectors[(a, c)];
                        out.iter_mut().zip(s).for_each(|(o, v)| *o += coef * v);
                    }
                    out
                })
                .collect()
        };
        x = rotate(&x);
        sx = rotate(&sx);
        let residuals: Vec<f64> = (0..k)
            .map(|c| {
                let nv = dot(&x[c], &x[c]).sqrt();
                sx[c].iter().zip(&x[c]).map(|(s, v)| (s - theta[c] * v).powi(2)).sum::<f64>().sqrt() / nv
            })
            .collect();
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        let change = (0..k).map(|c| (theta[c] - prev[c]).abs()).fold(0.0, f64::max);
        if worst < best.0 {
            best = (worst, theta[..k].to_vec());
        }
        if worst <= RESIDUAL_TOL && change <= tol {
            let vectors = x[..k].to_vec();
            return Ok(EigResult {
                values: theta[..k].to_vec(),
                residuals,
                grid: op.grid,
                bc: op.bc,
                m: op.m,
                iterations: it,
                shift,
                vectors,
            });
        }
        prev = theta[..k].to_vec();
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: best.0, values: best.1 })
}

/// Assemble and solve in one call.
pub fn solve(params: &WaveguideParams, grid: &CylGrid, bc: WindowBC, m: u32, k: usize) -> Result<EigResult> {
    let op = assemble(params, grid, bc, m)?;
    lowest_eigs(&op, k, 1e-12)
}

/// Grid for an inner problem with `nr` radial and `nz` vertical cells.
pub fn inner_grid(params: &WaveguideParams, nr: usize, nz: usize) -> Result<CylGrid> {
    CylGrid::new(nr, nz, params.a, params.d)
}

/// Grid for the truncated problem with `cells_per_a` radial cells across
/// the window, so the window edge falls on a cell face. `r_max` is rounded
/// up to a whole number of cells.
pub fn truncated_grid(params: &WaveguideParams, r_max: f64, cells_per_a: usize, nz: usize) -> Result<CylGrid> {
    if !(params.a > 0.0) || !(r_max >= 4.0 * params.a) || cells_per_a == 0 {
        return Err(Error::InvalidParams(format!("need a > 0, r_max >= 4a, cells_per_a >= 1 (a = {}, r_max = {r_max})", params.a)));
    }
    let h = params.a / cells_per_a as f64;
    let nr = (r_max / h - 1e-9).ceil() as usize;
    CylGrid::new(nr, nz, nr as f64 * h, params.d)
}

/// Eigenvalues on a grid and on the grid with half the cells in each
/// direction, with the estimate `|λ_h − λ_2h|`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Refined {
    pub fine: EigResult,
    pub coarse_values: Vec<f64>,
    pub error_estimate: Vec<f64>,
}

pub fn solve_refined(params: &WaveguideParams, grid: &CylGrid, bc: WindowBC, m: u32, k: usize) -> Result<Refined> {
    if grid.nr % 2 != 0 || grid.nz % 2 != 0 || grid.nr < 16 || grid.nz < 16 {
        return Err(Error::InvalidParams("refinement needs even nr, nz >= 16".into()));
    }
    let fine = solve(params, grid, bc, m, k)?;
    let coarse_grid = CylGrid::new(grid.nr / 2, grid.nz / 2, grid.r_max, grid.d)?;
    let coarse = solve(params, &coarse_grid, bc, m, k)?;
    let error_estimate = fine.values.iter().zip(&coarse.values).map(|(f, c)| (f - c).abs()).collect();
    Ok(Refined { fine, coarse_values: coarse.values, error_estimate })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowGroundState {
    pub result: EigResult,
    pub window: SpectralWindow,
    /// `|λ_h − λ_2h|` per value.
    pub error_estimate: Vec<f64>,
    /// Value lies below the essential-spectrum edge by more than its
    /// error estimate.
    pub below_edge: Vec<bool>,
}

/// Lowest `k` eigenvalues of the truncated window problem, with a coarse
/// companion solve for the error estimate.
pub fn window_ground_state(
    params: &WaveguideParams,
    r_max: f64,
    cells_per_a: usize,
    nz: usize,
    k: usize,
) -> Result<WindowGroundState> {
    if cells_per_a % 2 != 0 || nz % 2 != 0 {
        return Err(Error::InvalidParams("cells_per_a and nz must be even".into()));
    }
    let grid = truncated_grid(params, r_max, cells_per_a, nz)?;
    let coarse_grid = truncated_grid(params, grid.r_max, cells_per_a / 2, nz / 2)?;
    let fine = solve(params, &grid, WindowBC::TruncatedFull, 0, k)?;
    let coarse = solve(params, &coarse_grid, WindowBC::TruncatedFull, 0, k)?;
    let win = window(params)?;
    let error_estimate: Vec<f64> = fine.values.iter().zip(&coarse.values).map(|(f, c)| (f - c).abs()).collect();
    let below_edge = fine.values.iter().zip(&error_estimate).map(|(v, e)| v + e < win.upper).collect();
    Ok(WindowGroundState { result: fine, window: win, error_estimate, below_edge })
}
