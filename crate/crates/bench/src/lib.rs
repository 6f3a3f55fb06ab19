//! Shared fixtures for the benchmarks.

use cmc_core::{Domain, Field, Grid, Vec2};

pub fn star() -> Domain {
    Domain::polar_star(1.0, 0.3, 5).expect("valid star")
}

/// A smooth spacelike field on `grid`.
pub fn smooth_field(grid: &Grid) -> Field {
    Field::from_fn(grid, &|p: Vec2| 0.2 * (1.0 - p.norm_sq()) + 0.05 * (3.0 * p.x).sin())
}
