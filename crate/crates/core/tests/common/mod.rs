//! Shared helpers for the integration suites.
//!
//! The central-difference oracle below is the independent reference every
//! analytic gradient is checked against; it only ever calls forward passes.

use sedx_core::params::{assign_from_flat, to_flat, FlattenParams};

pub const FD_STEP: f64 = 1e-5;
pub const REL_TOL: f64 = 1e-4;
pub const ABS_FLOOR: f64 = 1e-6;

/// Central finite differences of `loss` with respect to every parameter of
/// `params`, probing one coordinate at a time.
pub fn finite_difference_grads<P: FlattenParams + Clone>(
    params: &P,
    mut loss: impl FnMut(&P) -> f64,
) -> Vec<f64> {
    let flat = to_flat(params);
    let mut grads = Vec::with_capacity(flat.len());
    for i in 0..flat.len() {
        let mut probe = params.clone();
        let mut bumped = flat.clone();
        bumped[i] = flat[i] + FD_STEP;
        assign_from_flat(&mut probe, &bumped).unwrap();
        let up = loss(&probe);
        bumped[i] = flat[i] - FD_STEP;
        assign_from_flat(&mut probe, &bumped).unwrap();
        let down = loss(&probe);
        grads.push((up - down) / (2.0 * FD_STEP));
    }
    grads
}

/// Asserts element-wise agreement within `REL_TOL` relative error with an
/// `ABS_FLOOR` absolute floor.
pub fn assert_grads_close(analytic: &[f64], numeric: &[f64], what: &str) {
    assert_eq!(analytic.len(), numeric.len(), "{what}: gradient lengths");
    for (i, (a, n)) in analytic.iter().zip(numeric).enumerate() {
        let tol = REL_TOL * a.abs().max(n.abs()) + ABS_FLOOR;
        assert!(
            (a - n).abs() <= tol,
            "{what}: grad[{i}] analytic {a} vs numeric {n} (tol {tol})"
        );
    }
}
