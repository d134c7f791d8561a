//! Numerical constants and the tolerance record shared by every module.

/// Default number of grid intervals (the grid has `DEFAULT_N + 1` nodes).
pub const DEFAULT_N: usize = 2048;

/// Largest jet order the polynomial builders and constructors are exercised at.
pub const K_MAX: usize = 6;

/// Tolerance for quantities that are exact up to floating-point rounding.
pub const TOL_EXACT: f64 = 1e-10;

/// Tolerance for quantities carrying grid-dependent discretization error.
pub const TOL_NUM: f64 = 1e-6;

/// Residual target for monotone root finding, `|f(y) - x| <= TOL_ROOT`.
pub const TOL_ROOT: f64 = 1e-13;

/// Smallest first derivative accepted at any node.
pub const DPOS_MIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub exact: f64,
    pub num: f64,
    pub root: f64,
    pub dpos_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: TOL_EXACT,
            num: TOL_NUM,
            root: TOL_ROOT,
            dpos_min: DPOS_MIN,
        }
    }
}
