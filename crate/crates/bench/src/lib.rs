//! Workload builders shared by the criterion benches.

use proximeter_core::eval::MeasurementPair;
use proximeter_core::fusion::{MotionEvent, RangeReading};
use proximeter_core::pipeline::InputEvent;
use proximeter_core::sector::Sector;
use proximeter_core::sim::{NoiseSpec, Scenario, ScenarioCamera, SubjectSpec, TrajectoryPoint};

const SIDES: [Sector; 3] = [Sector::Left, Sector::Right, Sector::Back];

/// A scenario with `subjects` subjects walking `points_per_subject` points
/// each, cycling through all sectors and sweeping 0.3..4.3 m.
pub fn synthetic_scenario(subjects: usize, points_per_subject: usize, noisy: bool) -> Scenario {
    let sectors = [Sector::Front, Sector::Left, Sector::Right, Sector::Back];
    let subjects = (0..subjects)
        .map(|s| SubjectSpec {
            subject_id: format!("subject-{s}"),
            true_height_m: 1.5 + 0.05 * s as f64,
            trajectory: (0..points_per_subject)
                .map(|p| TrajectoryPoint {
                    timestamp_ms: (p as u64) * 100,
                    sector: sectors[(s + p) % sectors.len()],
                    true_distance_m: 0.3 + (p % 9) as f64 * 0.5,
                })
                .collect(),
        })
        .collect();
    Scenario {
        camera: ScenarioCamera {
            camera_id: "bench-cam".into(),
            focal_length_px: 600.0,
            assumed_subject_extent_m: 1.6256,
            true_focal_length_px: None,
        },
        subjects,
        markers: vec![],
        noise: if noisy {
            NoiseSpec {
                sigma_px: 2.0,
                sigma_m: 0.02,
            }
        } else {
            NoiseSpec::default()
        },
        seed: 7,
    }
}

/// Alternating motion/range pairs across the ultrasonic sectors, every pair
/// armed and consumed.
pub fn side_event_stream(pairs: usize) -> Vec<InputEvent> {
    let mut events = Vec::with_capacity(pairs * 2);
    for i in 0..pairs {
        let t = (i as u64) * 50;
        let sector = SIDES[i % SIDES.len()];
        let distance = 0.3 + (i % 8) as f64 * 0.45;
        events.push(InputEvent::Motion(MotionEvent::new(t, sector).unwrap()));
        events.push(InputEvent::Range(
            RangeReading::new(t, sector, distance).unwrap(),
        ));
    }
    events
}

/// Detected/actual pairs spread over 0.5..4.5 m with small offsets.
pub fn reference_pairs(n: usize) -> Vec<MeasurementPair> {
    (0..n)
        .map(|i| {
            let actual = 0.5 + (i % 40) as f64 * 0.1;
            let detected = actual + ((i % 7) as f64 - 3.0) * 0.01;
            MeasurementPair::new(format!("pair-{i}"), detected, actual)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proximeter_core::fusion::FusionConfig;
    use proximeter_core::sim::run_scenario;

    #[test]
    fn builders_produce_valid_workloads() {
        let log = run_scenario(&synthetic_scenario(3, 12, true), &FusionConfig::default())
            .unwrap();
        assert!(!log.entries.is_empty());
        assert_eq!(side_event_stream(10).len(), 20);
        assert_eq!(reference_pairs(5).len(), 5);
    }
}
