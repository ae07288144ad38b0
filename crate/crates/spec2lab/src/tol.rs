//! Global tolerances. Everything is relative to a norm unless noted.

/// Absolute floor for all relative tolerances.
pub const ABS_FLOOR: f64 = 1e-14;
/// Accepted `‖H − H*‖_F / max(1, ‖H‖_F)` on construction.
pub const HERMITIAN: f64 = 1e-12;
/// Eigendecomposition residuals.
pub const EIG: f64 = 1e-10;
/// Negative eigenvalues above `−PSD·‖M‖` are clamped.
pub const PSD: f64 = 1e-10;
/// Gram residual accepted for orthonormal sets.
pub const ORTHONORMAL: f64 = 1e-10;
/// Point-multiset comparisons, times the problem scale.
pub const POINTS: f64 = 1e-8;

/// Version tag written into reports so that stored verdicts can be tied to
/// the tolerances that produced them.
pub const VERSION: &str = "tol-1";

pub fn all() -> Vec<(&'static str, f64)> {
    vec![
        ("abs_floor", ABS_FLOOR),
        ("hermitian", HERMITIAN),
        ("eig", EIG),
        ("psd", PSD),
        ("orthonormal", ORTHONORMAL),
        ("points", POINTS),
    ]
}
