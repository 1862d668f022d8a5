//! Tolerance for float-backend comparisons.
//!
//! Exact-backend computations never consult this value.  Float elimination
//! thresholds are `eps() * max|entry|` of the matrix being reduced; scalar
//! comparisons use `eps()` as an absolute bound.
//!
//! The value is thread-local so concurrent callers (test threads, parallel
//! pipelines) can override it independently.

use std::cell::Cell;

/// Default float tolerance used when nothing overrides it.
pub const DEFAULT_EPS: f64 = 1e-9;

thread_local! {
    static EPS: Cell<f64> = const { Cell::new(DEFAULT_EPS) };
}

/// Current tolerance for this thread.
pub fn eps() -> f64 {
    EPS.with(|e| e.get())
}

/// Replace the tolerance for this thread (must be positive and finite).
pub fn set_eps(e: f64) {
    assert!(e.is_finite() && e > 0.0, "tolerance must be positive");
    EPS.with(|c| c.set(e));
}

/// Run `f` with a temporarily overridden tolerance, restoring on exit.
pub fn with_eps<T>(e: f64, f: impl FnOnce() -> T) -> T {
    let old = eps();
    set_eps(e);
    let out = f();
    set_eps(old);
    out
}
