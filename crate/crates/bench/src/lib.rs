//! Shared inputs for the benchmarks.

use fracdirac_core::{GridFunction, C64};

/// Smooth periodic test signal on `[0, 2π)` with a few low modes.
pub fn smooth_signal(n: usize) -> GridFunction {
    GridFunction::from_fn(n, std::f64::consts::TAU, |x| {
        C64::new(x.sin() + 0.5 * (3.0 * x).cos(), 0.25 * (2.0 * x).sin())
    })
    .expect("power-of-two grid")
}
