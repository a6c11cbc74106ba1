//! Benchmark inputs shared by the criterion targets.

use ep_core::init::smooth_random;
use ep_core::{PeriodicGrid, VectorField};

/// Smooth velocity on a standard grid, fixed seed.
pub fn sample_velocity(dim: usize, points_per_axis: usize) -> VectorField {
    let grid = PeriodicGrid::standard(dim, points_per_axis).expect("power-of-two grid");
    smooth_random(&grid, 0.5, 4.0, 1).expect("resolved spectrum")
}
