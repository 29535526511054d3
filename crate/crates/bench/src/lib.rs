//! Shared fixtures for the pipeline benchmarks.

use threebody::{BodyState, SystemConfig, Vec2};

/// Equal-mass binary (separation 2) with a light companion at distance 20
/// holding `light_fraction` of the total mass.
pub fn hierarchical(light_fraction: f64) -> SystemConfig {
    let m3 = 2.0 * light_fraction / (1.0 - light_fraction);
    let v_inner = 0.5;
    let v_outer = ((2.0 + m3) / 20.0f64).sqrt();
    SystemConfig::new(
        [1.0, 1.0, m3],
        1.0,
        [
            BodyState::new(Vec2::new(1.0, 0.0), Vec2::new(0.0, v_inner)),
            BodyState::new(Vec2::new(-1.0, 0.0), Vec2::new(0.0, -v_inner)),
            BodyState::new(Vec2::new(20.0, 0.0), Vec2::new(0.0, v_outer)),
        ],
        0.0,
    )
    .expect("valid fixture")
}

pub fn uniform_grid(start: f64, stop: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
