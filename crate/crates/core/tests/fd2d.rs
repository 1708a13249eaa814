use std::f64::consts::PI;

use stark_window::bracket::window;
use stark_window::certify::certify;
use stark_window::fd2d::{
    assemble, inner_grid, lowest_eigs, solve, solve_refined, truncated_grid, window_ground_state, CylGrid, WindowBC,
    RESIDUAL_TOL,
};
use stark_window::specfun::bessel_zero;
use stark_window::transverse::{fd_levels_oracle, ground};
use stark_window::{BoundaryType, WaveguideParams};

fn p(f: f64, d: f64, a: f64) -> WaveguideParams {
    WaveguideParams::new(f, d, a).unwrap()
}

fn analytic_inner(params: &WaveguideParams, m: u32, k: u32) -> f64 {
    let lower = ground(params, BoundaryType::NeumannDirichlet).unwrap().lambda;
    (bessel_zero(m, k).unwrap() / params.a).powi(2) + lower
}

#[test]
fn wide_inner_dirichlet_cylinder_matches_bracket() {
    let params = p(0.0, PI, 10.0);
    let r = solve_refined(&params, &inner_grid(&params, 64, 64).unwrap(), WindowBC::InnerDirichlet, 0, 1).unwrap();
    let exact = (2.404825557695773f64 / 10.0).powi(2) + 0.25;
    assert!((exact - 0.307832).abs() < 1e-6);
    assert!((r.fine.values[0] - exact).abs() <= r.error_estimate[0], "{} vs {exact}", r.fine.values[0]);
    assert!(r.fine.residuals.iter().all(|&x| x <= RESIDUAL_TOL));
}

#[test]
fn inner_dirichlet_converges_at_second_order() {
    let params = p(2.0, 1.0, 1.5);
    for m in [0u32, 1] {
        let exact = analytic_inner(&params, m, 1);
        let err = |n: usize| solve(&params, &inner_grid(&params, n, n).unwrap(), WindowBC::InnerDirichlet, m, 1).unwrap().values[0] - exact;
        let (e1, e2) = (err(24), err(48));
        let ratio = e1 / e2;
        assert!((3.6..4.4).contains(&ratio), "m={m}: ratio {ratio}");
    }
}

#[test]
fn inner_neumann_matches_one_dimensional_oracles() {
    // m = 0: the lowest radial Neumann mode is constant, the next has
    // wavenumber x_{1,1}/a (J_0' = −J_1).
    let params = p(1.0, 1.0, 1.0);
    let flat = solve(&params, &inner_grid(&params, 8, 100).unwrap(), WindowBC::InnerNeumann, 0, 1).unwrap();
    let z_fd = fd_levels_oracle(&params, BoundaryType::NeumannDirichlet, 1, 100).unwrap()[0];
    assert!((flat.values[0] - z_fd).abs() < 1e-9, "{} vs {z_fd}", flat.values[0]);
    let n = 48;
    let r = solve(&params, &inner_grid(&params, n, n).unwrap(), WindowBC::InnerNeumann, 0, 2).unwrap();
    let want = analytic_inner(&params, 1, 1);
    let coarse = solve(&params, &inner_grid(&params, n / 2, n / 2).unwrap(), WindowBC::InnerNeumann, 0, 2).unwrap();
    let (e1, e2) = (coarse.values[1] - want, r.values[1] - want);
    assert!(e2.abs() < e1.abs() && (3.0..5.0).contains(&(e1 / e2)), "{e1} {e2}");
}

#[test]
fn operator_bookkeeping() {
    let params = p(1.0, 2.0, 1.0);
    let g = CylGrid::new(40, 16, 5.0, 2.0).unwrap();
    let op = assemble(&params, &g, WindowBC::TruncatedFull, 0).unwrap();
    assert_eq!(op.max_asymmetry(), 0.0);
    // 8 columns under the window keep the bottom row.
    assert_eq!(op.dim(), 8 * 16 + 32 * 15);
    assert!(op.nodes.iter().all(|&(i, j)| j > 0 || g.r(i) <= 1.0));
    let inner = assemble(&params, &inner_grid(&params, 10, 16).unwrap(), WindowBC::InnerNeumann, 2).unwrap();
    assert_eq!(inner.dim(), 10 * 16);
    assert_eq!(inner.max_asymmetry(), 0.0);
}

#[test]
fn sandwich_on_matched_grids() {
    let params = p(1.0, PI, 3.0);
    let n = 32;
    let edge = window(&params).unwrap().upper;
    let lo = solve_refined(&params, &inner_grid(&params, n, n).unwrap(), WindowBC::InnerNeumann, 0, 3).unwrap();
    let hi = solve_refined(&params, &inner_grid(&params, n, n).unwrap(), WindowBC::InnerDirichlet, 0, 3).unwrap();
    let mid = window_ground_state(&params, 24.0, n, n, 3).unwrap();
    for k in 0..3 {
        let t = mid.result.values[k];
        let slack = 5.0 * (mid.error_estimate[k] + lo.error_estimate[k] + hi.error_estimate[k]);
        // The Neumann side bounds only while the outer region stays above the edge.
        assert!(lo.fine.values[k].min(edge) <= t + slack, "k={k}");
        assert!(t <= hi.fine.values[k] + slack, "k={k}");
        // Same spacing: the discrete inequalities hold exactly.
        assert!(lo.fine.values[k].min(edge) <= t + 1e-9 && t <= hi.fine.values[k] + 1e-9);
    }
    // Interleaving for k = 2.
    assert!(hi.fine.values[0] <= mid.result.values[1] + mid.error_estimate[1]);
    // It does not extend to k = 3: the second inner Dirichlet level, over
    // all angular orders, sits above the third truncated level here.
    let m1 = solve(&params, &inner_grid(&params, n, n).unwrap(), WindowBC::InnerDirichlet, 1, 1).unwrap();
    let second = m1.values[0].min(hi.fine.values[1]);
    assert!(second > mid.result.values[2] + 5.0 * mid.error_estimate[2], "{second} vs {}", mid.result.values[2]);
}

#[test]
fn truncation_radius_only_lowers_the_ground_state() {
    let params = p(1.0, 1.0, 1.0);
    let vals: Vec<f64> = [4.0, 8.0, 16.0]
        .iter()
        .map(|&r| solve(&params, &truncated_grid(&params, r, 16, 16).unwrap(), WindowBC::TruncatedFull, 0, 1).unwrap().values[0])
        .collect();
    assert!(vals[1] <= vals[0] && vals[2] <= vals[1], "{vals:?}");
    assert!(vals[1] - vals[2] < vals[0] - vals[1]);
}

#[test]
fn certified_parameters_have_a_resolved_bound_state() {
    for &(f, a) in &[(1.0, 1.0), (10.0, 1.0)] {
        let params = p(f, 1.0, a);
        assert!(certify(&params).unwrap().q_value < 0.0);
        let g = window_ground_state(&params, 8.0 * a, 16, 16, 1).unwrap();
        let delta = g.window.upper - g.result.values[0];
        assert!(delta > 3.0 * g.error_estimate[0], "F={f}: gap {delta}, estimate {}", g.error_estimate[0]);
        assert!(g.below_edge[0]);
        assert!(g.result.values[0] >= g.window.lower - g.error_estimate[0]);
    }
}

#[test]
fn eigen_requests_are_validated() {
    let params = p(1.0, 1.0, 1.0);
    let op = assemble(&params, &inner_grid(&params, 8, 8).unwrap(), WindowBC::InnerDirichlet, 0).unwrap();
    assert!(lowest_eigs(&op, 0, 1e-10).is_err());
    assert!(lowest_eigs(&op, 11, 1e-10).is_err());
    assert!(window_ground_state(&params, 2.0, 16, 16, 1).is_err());
}
