//! Fixed detector layouts shared by the benchmarks.

use btz_tripartite::{BtzBackground, DetectorConfiguration, StaticDetector};

/// Three detectors at equal distance `d` from the horizon, 120° apart, `ℓ = 10`.
pub fn triangle(mass: f64, d: f64, omega: f64) -> DetectorConfiguration {
    let bg = BtzBackground::dirichlet(10.0, mass).expect("valid background");
    let detectors = (0..3)
        .map(|i| {
            let phi = 2.0 * std::f64::consts::PI * f64::from(i) / 3.0;
            StaticDetector::at_horizon_distance(&bg, d, phi, omega).expect("valid detector")
        })
        .collect();
    DetectorConfiguration::new(bg, detectors).expect("valid configuration")
}

/// Three detectors on a radial line, the nearest at `d`, one unit apart.
pub fn line(mass: f64, d: f64, omega: f64) -> DetectorConfiguration {
    let bg = BtzBackground::dirichlet(10.0, mass).expect("valid background");
    let detectors = (0..3)
        .map(|i| StaticDetector::at_horizon_distance(&bg, d + f64::from(i), 0.0, omega).expect("valid detector"))
        .collect();
    DetectorConfiguration::new(bg, detectors).expect("valid configuration")
}
