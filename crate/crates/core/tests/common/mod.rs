#![allow(dead_code)]

use heat_trace::fields::Component;
use heat_trace::{GridSpec, Potential64, Shape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn grid(half_width: f64, points: usize) -> GridSpec {
    GridSpec::new(1, half_width, points).unwrap()
}

pub fn well(grid: GridSpec, depth: f64, a: f64) -> Potential64 {
    Potential64::from_shape(grid, Shape::Well { depth, half_width: a }).unwrap()
}

pub fn bump(grid: GridSpec, amplitude: f64, a: f64) -> Potential64 {
    Potential64::from_shape(grid, Shape::Bump { amplitude, radius: a }).unwrap()
}

pub fn delta_box(grid: GridSpec, weight: f64, width: f64) -> Potential64 {
    Potential64::from_shape(grid, Shape::DeltaApprox { weight, width }).unwrap()
}

/// Sum of up to three smooth bumps with random signs, centres and radii, `‖V‖∞ ≤ sup`.
pub fn random_bumps(grid: GridSpec, seed: u64, sup: f64) -> Potential64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = 0.5 * grid.guard_radius();
    let count = rng.random_range(1..=3);
    let comps: Vec<Component> = (0..count)
        .map(|_| {
            let radius = rng.random_range(0.4..1.2);
            let centre = rng.random_range(-(reach - radius)..(reach - radius));
            let amp = rng.random_range(-1.0..1.0) * sup / count as f64;
            Component {
                shape: Shape::Bump { amplitude: amp, radius },
                center: vec![centre],
                weight: 1.0,
            }
        })
        .collect();
    Potential64::from_components(grid, comps).unwrap()
}

/// Random mix of wells and bumps, used where discontinuities are welcome.
pub fn random_mixed(grid: GridSpec, seed: u64, sup: f64) -> Potential64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = 0.5 * grid.guard_radius();
    let count = rng.random_range(1..=3);
    let comps: Vec<Component> = (0..count)
        .map(|_| {
            let radius = rng.random_range(0.3..1.0);
            let centre = rng.random_range(-(reach - radius)..(reach - radius));
            let amp = rng.random_range(-1.0..1.0) * sup / count as f64;
            let shape = if rng.random_bool(0.5) {
                Shape::Well { depth: amp, half_width: radius }
            } else {
                Shape::Bump { amplitude: amp, radius }
            };
            Component { shape, center: vec![centre], weight: 1.0 }
        })
        .collect();
    Potential64::from_components(grid, comps).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
