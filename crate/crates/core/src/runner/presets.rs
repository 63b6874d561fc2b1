//! Built-in experiment configurations for the eight numerical examples.

use std::f64::consts::PI;

use crate::forward::NoiseSpec;
use crate::imaging::ConvolutionMethod;
use crate::runner::config::{ExperimentConfig, Generator, IndicatorSet, ScattererSpec};
use crate::scene::{Medium, Point, ReceiverLayout, SamplingGrid, ShapeSpec, Signal, TimeGrid, Trajectory};

pub const SOUND_SPEED: f64 = 340.0;
pub const BASE_PERIOD: f64 = 14.0;
pub const SOURCE_RADIUS: f64 = 60.0;
pub const RECEIVER_RADIUS: f64 = 72.0;
/// Receivers on the 2-D measurement circle when none is specified.
pub const RECEIVERS_2D: usize = 64;
pub const RECEIVERS_3D: usize = 50;
/// Radius of a point-like circle or sphere.
pub const POINT_RADIUS: f64 = 0.01;
pub const DEFAULT_SEED: u64 = 1;

/// `ω₀ = 2π/T`.
pub fn omega0() -> f64 {
    2.0 * PI / BASE_PERIOD
}

/// Preset names with a one-line description.
pub const PRESETS: &[(&str, &str)] = &[
    ("example1-points-N1", "three point-like scatterers, lambda_1, I1 and I2"),
    ("example1-points-N3", "three point-like scatterers, lambda_3, I1 and I2"),
    ("example1-points-N10", "three point-like scatterers, lambda_10, I1 and I2"),
    ("example1-extended-N1", "circle R=10 at the origin, lambda_1, I1 and I2"),
    ("example1-extended-N3", "circle R=10 at the origin, lambda_3, I1 and I2"),
    ("example1-extended-N10", "circle R=10 at the origin, lambda_10, I1 and I2"),
    ("example2-omega3", "five point-like scatterers, emitter at 3 omega0"),
    ("example2-omega7", "five point-like scatterers, emitter at 7 omega0"),
    ("example2-omega9", "five point-like scatterers, emitter at 9 omega0"),
    ("example3-three-s5", "three point-like scatterers, 5% noise"),
    ("example3-five-s5", "five point-like scatterers, 5% noise"),
    ("example3-close-s5", "five clustered point-like scatterers, 5% noise"),
    ("example3-three-s20", "three point-like scatterers, 20% noise"),
    ("example3-five-s20", "five point-like scatterers, 20% noise"),
    ("example3-close-s20", "five clustered point-like scatterers, 20% noise"),
    ("example4-circle-s5", "circle R=10 at the origin, 5% noise"),
    ("example4-acorn-s5", "acorn R=6 at the origin, 5% noise"),
    ("example4-square-s5", "square R=3*sqrt(2) at (-8,-8), 5% noise"),
    ("example4-circle-s20", "circle R=10 at the origin, 20% noise"),
    ("example4-acorn-s20", "acorn R=6 at the origin, 20% noise"),
    ("example4-square-s20", "square R=3*sqrt(2) at (-8,-8), 20% noise"),
    ("example5-receivers-circle", "circle, receivers on the upper half circle only"),
    ("example5-receivers-acorn", "acorn, receivers on the upper half circle only"),
    ("example5-receivers-square", "square, receivers on the upper half circle only"),
    ("example5-path-circle", "circle, emitter traverses a semicircle"),
    ("example5-path-acorn", "acorn, emitter traverses a semicircle"),
    ("example5-path-square", "square, emitter traverses a semicircle"),
    ("example6-acorn-kite", "acorn at (-12,-12) and kite at (15,15)"),
    ("example6-circle-square", "circle at (-15,-15) and square at (10,10)"),
    ("example6-acorn-circle", "acorn at (-10,-10) and circle at (10,10)"),
    ("example7-one-point", "3-D, point-like scatterer at (8,-16,4)"),
    ("example7-two-points", "3-D, point-like scatterers at (-20,-16,-12) and (12,16,20)"),
    ("example8-one-cube", "3-D, cube [-11,11]^3"),
    ("example8-two-cubes", "3-D, cubes [12,24]^3 and [-24,-12]^3"),
];

/// Short names resolving to a representative variant.
pub const ALIASES: &[(&str, &str)] = &[
    ("example1", "example1-points-N10"),
    ("example2", "example2-omega3"),
    ("example3", "example3-three-s5"),
    ("example4", "example4-circle-s5"),
    ("example5", "example5-receivers-circle"),
    ("example6", "example6-acorn-kite"),
    ("example7", "example7-one-point"),
    ("example8", "example8-one-cube"),
];

pub fn resolve(name: &str) -> Option<&'static str> {
    ALIASES
        .iter()
        .find(|(a, _)| *a == name)
        .map(|(_, target)| *target)
        .or_else(|| PRESETS.iter().find(|(n, _)| *n == name).map(|(n, _)| *n))
}

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let name = resolve(name)?;
    let (example, rest) = name.split_once('-')?;
    let cfg = match example {
        "example1" => {
            let (what, n) = rest.split_once("-N")?;
            let n: u32 = n.parse().ok()?;
            let scatterers = match what {
                "points" => three_points(),
                _ => vec![extended(circle(0.0, 0.0, 10.0))],
            };
            plane(name, n, 1.0, scatterers, 0.05, IndicatorSet::Both)
        }
        "example2" => {
            let m: f64 = rest.strip_prefix("omega")?.parse().ok()?;
            plane(name, 10, m, five_points(), 0.05, IndicatorSet::Both)
        }
        "example3" => {
            let (set, sigma) = rest.split_once('-')?;
            let scatterers = match set {
                "three" => three_points(),
                "five" => five_points(),
                _ => clustered_points(),
            };
            plane(name, 10, 1.0, scatterers, noise_level(sigma)?, IndicatorSet::I2)
        }
        "example4" => {
            let (shape, sigma) = rest.split_once('-')?;
            plane(name, 10, 1.0, vec![extended(single_shape(shape)?)], noise_level(sigma)?, IndicatorSet::I2)
        }
        "example5" => {
            let (variant, shape) = rest.split_once('-')?;
            let mut cfg = plane(name, 10, 1.0, vec![extended(single_shape(shape)?)], 0.05, IndicatorSet::I2);
            if variant == "receivers" {
                cfg.receivers = ReceiverLayout::Arc {
                    radius: RECEIVER_RADIUS,
                    count: RECEIVERS_2D / 2,
                    span: PI,
                    start: 0.0,
                };
            } else {
                cfg.time_grid = TimeGrid {
                    total_time: BASE_PERIOD / 2.0,
                    steps: 1280,
                };
            }
            cfg
        }
        "example6" => {
            let pair = match rest {
                "acorn-kite" => [acorn(-12.0, -12.0, 2.4), kite(15.0, 15.0, 6.0)],
                "circle-square" => [circle(-15.0, -15.0, 6.0), square(10.0, 10.0, 3.0 * 2f64.sqrt())],
                _ => [acorn(-10.0, -10.0, 3.6), circle(10.0, 10.0, 2.0)],
            };
            plane(name, 10, 1.0, pair.into_iter().map(extended).collect(), 0.05, IndicatorSet::I2)
        }
        "example7" => {
            let centers: &[[f64; 3]] = match rest {
                "one-point" => &[[8.0, -16.0, 4.0]],
                _ => &[[-20.0, -16.0, -12.0], [12.0, 16.0, 20.0]],
            };
            let scatterers = centers
                .iter()
                .map(|c| {
                    ScattererSpec::new(
                        ShapeSpec::Sphere {
                            center: Point::from(*c),
                            radius: POINT_RADIUS,
                        },
                        true,
                    )
                })
                .collect();
            space(name, scatterers)
        }
        "example8" => {
            let cubes: &[([f64; 3], f64)] = match rest {
                "one-cube" => &[([0.0; 3], 11.0)],
                _ => &[([18.0; 3], 6.0), ([-18.0; 3], 6.0)],
            };
            let scatterers = cubes
                .iter()
                .map(|(c, h)| {
                    extended(ShapeSpec::Cube {
                        center: Point::from(*c),
                        half_width: *h,
                    })
                })
                .collect();
            space(name, scatterers)
        }
        _ => return None,
    };
    Some(cfg.complete())
}

fn noise_level(tag: &str) -> Option<f64> {
    match tag {
        "s5" => Some(0.05),
        "s20" => Some(0.2),
        _ => None,
    }
}

fn plane(
    name: &str,
    periods: u32,
    omega_multiple: f64,
    scatterers: Vec<ScattererSpec>,
    sigma: f64,
    indicators: IndicatorSet,
) -> ExperimentConfig {
    ExperimentConfig {
        name: name.into(),
        medium: Medium {
            sound_speed: SOUND_SPEED,
        },
        trajectory: Trajectory::Circle2d {
            radius: SOURCE_RADIUS,
            angular_speed: omega_multiple * omega0(),
            phase: 0.0,
        },
        signal: Signal::lambda_n(periods, BASE_PERIOD),
        scatterers,
        receivers: ReceiverLayout::Circle {
            radius: RECEIVER_RADIUS,
            count: RECEIVERS_2D,
        },
        time_grid: TimeGrid {
            total_time: BASE_PERIOD,
            steps: 256 * periods as usize,
        },
        sampling_grid: SamplingGrid {
            lower: vec![-36.0; 2],
            upper: vec![36.0; 2],
            counts: vec![36; 2],
        },
        noise: NoiseSpec {
            sigma,
            seed: DEFAULT_SEED,
        },
        indicators,
        generator: Generator::Bie,
        convolution: ConvolutionMethod::Fft,
        verify_direct: false,
        scale: 1.0,
        overlay: true,
        output_dir: None,
    }
}

fn space(name: &str, scatterers: Vec<ScattererSpec>) -> ExperimentConfig {
    let periods = 10;
    let total_time = 3.0 * BASE_PERIOD;
    ExperimentConfig {
        trajectory: Trajectory::Spiral3d {
            radius: SOURCE_RADIUS,
            turns: 5.0,
            total_time,
        },
        receivers: ReceiverLayout::Sphere {
            radius: RECEIVER_RADIUS,
            count: RECEIVERS_3D,
        },
        time_grid: TimeGrid {
            total_time,
            steps: 256 * periods * 3,
        },
        sampling_grid: SamplingGrid {
            lower: vec![-40.0; 3],
            upper: vec![40.0; 3],
            counts: vec![21; 3],
        },
        ..plane(name, periods as u32, 1.0, scatterers, 0.05, IndicatorSet::I2)
    }
}

fn point_at(x: f64, y: f64) -> ScattererSpec {
    ScattererSpec::new(circle(x, y, POINT_RADIUS), true)
}

fn extended(shape: ShapeSpec) -> ScattererSpec {
    ScattererSpec::new(shape, false)
}

fn three_points() -> Vec<ScattererSpec> {
    vec![point_at(-24.0, -24.0), point_at(0.0, 20.0), point_at(15.0, -10.0)]
}

fn five_points() -> Vec<ScattererSpec> {
    vec![
        point_at(-24.0, -24.0),
        point_at(-24.0, 15.0),
        point_at(0.0, 0.0),
        point_at(10.0, -20.0),
        point_at(24.0, 20.0),
    ]
}

fn clustered_points() -> Vec<ScattererSpec> {
    vec![
        point_at(-28.0, -28.0),
        point_at(-20.0, -20.0),
        point_at(0.0, 0.0),
        point_at(8.0, 12.0),
        point_at(20.0, 0.0),
    ]
}

fn single_shape(tag: &str) -> Option<ShapeSpec> {
    match tag {
        "circle" => Some(circle(0.0, 0.0, 10.0)),
        "acorn" => Some(acorn(0.0, 0.0, 6.0)),
        "square" => Some(square(-8.0, -8.0, 3.0 * 2f64.sqrt())),
        _ => None,
    }
}

fn circle(x: f64, y: f64, radius: f64) -> ShapeSpec {
    ShapeSpec::Circle {
        center: Point::new(x, y, 0.0),
        radius,
    }
}

fn acorn(x: f64, y: f64, scale: f64) -> ShapeSpec {
    ShapeSpec::Acorn {
        center: Point::new(x, y, 0.0),
        scale,
    }
}

fn square(x: f64, y: f64, scale: f64) -> ShapeSpec {
    ShapeSpec::Square {
        center: Point::new(x, y, 0.0),
        scale,
    }
}

fn kite(x: f64, y: f64, scale: f64) -> ShapeSpec {
    ShapeSpec::Kite {
        center: Point::new(x, y, 0.0),
        scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::parse_config;
    use crate::scene::make_receivers;

    #[test]
    fn every_preset_parses_and_is_subsonic() {
        for (name, _) in PRESETS.iter().chain(ALIASES) {
            let cfg = preset(name).unwrap_or_else(|| panic!("{name} missing"));
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(cfg.max_sampled_speed().unwrap() < cfg.medium.sound_speed);
            let parsed = parse_config(&format!(r#"{{"preset": "{name}"}}"#)).unwrap();
            assert_eq!(parsed, cfg);
        }
        for k in 1..=8 {
            assert!(preset(&format!("example{k}")).is_some());
        }
    }

    #[test]
    fn fastest_emitter_speed() {
        let cfg = preset("example2-omega9").unwrap();
        let v = cfg.max_sampled_speed().unwrap();
        assert!((v - 9.0 * omega0() * 60.0).abs() < 1e-9);
        assert!((v - 242.0).abs() < 1.0);
    }

    #[test]
    fn limited_aperture_stays_in_span() {
        for shape in ["circle", "acorn", "square"] {
            let cfg = preset(&format!("example5-receivers-{shape}")).unwrap();
            let ReceiverLayout::Arc { span, start, .. } = cfg.receivers else {
                panic!("expected an arc layout");
            };
            let arr = make_receivers(&cfg.receivers).unwrap();
            for p in &arr.points {
                let a = p.y.atan2(p.x).rem_euclid(2.0 * PI);
                assert!(a >= start && a <= start + span, "angle {a}");
            }
        }
    }

    #[test]
    fn time_steps_follow_period_count() {
        assert_eq!(preset("example1-points-N3").unwrap().time_grid.steps, 768);
        assert_eq!(preset("example7").unwrap().time_grid.steps, 7680);
        let half = preset("example5-path-acorn").unwrap();
        assert_eq!(half.time_grid.dt(), preset("example4").unwrap().time_grid.dt());
    }

    #[test]
    fn unknown_names() {
        assert!(preset("example9").is_none());
        assert!(preset("example1-points-N").is_none());
    }
}
