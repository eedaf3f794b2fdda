//! Percent-error metrics and report generation.

use serde::{Deserialize, Serialize};

use crate::error::{positive_finite, Error, Result};

/// Which measurement divides the error. `Detected` mirrors the device's own
/// bookkeeping (error relative to the sensor estimate); `Actual` is the
/// textbook convention (error relative to ground truth).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    #[default]
    Detected,
    Actual,
}

impl std::str::FromStr for Denominator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "detected" => Ok(Denominator::Detected),
            "actual" => Ok(Denominator::Actual),
            other => Err(Error::invalid_argument(
                "denominator",
                format!("expected `detected` or `actual`, got `{other}`"),
            )),
        }
    }
}

/// Absolute percent error of a detected measurement, with the detected value
/// as denominator.
pub fn percent_error(detected: f64, actual: f64) -> Result<f64> {
    percent_error_with(Denominator::Detected, detected, actual)
}

pub fn percent_error_with(denominator: Denominator, detected: f64, actual: f64) -> Result<f64> {
    positive_finite("detected", detected)?;
    positive_finite("actual", actual)?;
    let denom = match denominator {
        Denominator::Detected => detected,
        Denominator::Actual => actual,
    };
    Ok((detected - actual).abs() / denom * 100.0)
}

/// One labeled detected-vs-actual measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPair {
    pub label: String,
    pub detected_m: f64,
    pub actual_m: f64,
}

impl MeasurementPair {
    pub fn new(label: impl Into<String>, detected_m: f64, actual_m: f64) -> Self {
        MeasurementPair {
            label: label.into(),
            detected_m,
            actual_m,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub detected_m: f64,
    pub actual_m: f64,
    /// Signed difference, detected minus actual.
    pub difference_m: f64,
    pub percent_error: f64,
}

/// Per-row percent errors plus summary statistics. Rows preserve input order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercentErrorReport {
    pub rows: Vec<ReportRow>,
    pub count: usize,
    pub mean_percent_error: f64,
    pub max_percent_error: f64,
}

/// Computes a report over the given pairs; empty input yields an empty
/// report with count 0.
pub fn summarize(denominator: Denominator, pairs: &[MeasurementPair]) -> Result<PercentErrorReport> {
    let mut rows = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let pe = percent_error_with(denominator, pair.detected_m, pair.actual_m)?;
        rows.push(ReportRow {
            label: pair.label.clone(),
            detected_m: pair.detected_m,
            actual_m: pair.actual_m,
            difference_m: pair.detected_m - pair.actual_m,
            percent_error: pe,
        });
    }
    let count = rows.len();
    let mean = if count == 0 {
        0.0
    } else {
        rows.iter().map(|r| r.percent_error).sum::<f64>() / count as f64
    };
    let max = rows
        .iter()
        .map(|r| r.percent_error)
        .fold(0.0f64, f64::max);
    Ok(PercentErrorReport {
        rows,
        count,
        mean_percent_error: mean,
        max_percent_error: max,
    })
}

impl PercentErrorReport {
    /// Aligned plain-text table, two decimal places.
    pub fn to_text_table(&self) -> String {
        let label_w = self
            .rows
            .iter()
            .map(|r| r.label.len())
            .chain(["label".len()])
            .max()
            .unwrap_or(5);
        let mut out = format!(
            "{:<label_w$}  {:>10}  {:>10}  {:>12}  {:>13}\n",
            "label", "detected_m", "actual_m", "difference_m", "percent_error"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<label_w$}  {:>10.2}  {:>10.2}  {:>12.2}  {:>13.2}\n",
                r.label, r.detected_m, r.actual_m, r.difference_m, r.percent_error
            ));
        }
        out.push_str(&format!(
            "\nrows: {}  mean percent error: {:.2}  max percent error: {:.2}\n",
            self.count, self.mean_percent_error, self.max_percent_error
        ));
        out
    }

    /// CSV rendering, four decimal places.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,detected_m,actual_m,difference_m,percent_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.4},{:.4},{:.4},{:.4}\n",
                csv_field(&r.label),
                r.detected_m,
                r.actual_m,
                r.difference_m,
                r.percent_error
            ));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_rows_match_frozen_values() {
        assert_abs_diff_eq!(percent_error(2.02, 2.0).unwrap(), 0.9901, epsilon = 5e-5);
        assert_abs_diff_eq!(percent_error(2.95, 3.0).unwrap(), 1.6949, epsilon = 5e-5);
        assert_abs_diff_eq!(percent_error(4.06, 4.0).unwrap(), 1.4778, epsilon = 5e-5);
    }

    #[test]
    fn zero_error_when_equal() {
        assert_eq!(percent_error(1.7, 1.7).unwrap(), 0.0);
    }

    #[test]
    fn negative_differences_are_disregarded() {
        let a = percent_error(2.95, 3.0).unwrap();
        assert!(a > 0.0);
        assert_abs_diff_eq!(a, 0.05 / 2.95 * 100.0, epsilon = 1e-12);
    }

    #[test]
    fn denominator_variants_differ() {
        let by_detected = percent_error_with(Denominator::Detected, 2.0, 1.0).unwrap();
        let by_actual = percent_error_with(Denominator::Actual, 2.0, 1.0).unwrap();
        assert_abs_diff_eq!(by_detected, 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(by_actual, 100.0, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(percent_error(0.0, 1.0).is_err());
        assert!(percent_error(1.0, -1.0).is_err());
        assert!(percent_error(f64::NAN, 1.0).is_err());
    }

    fn reference_pairs() -> Vec<MeasurementPair> {
        vec![
            MeasurementPair::new("right", 2.02, 2.0),
            MeasurementPair::new("middle", 2.95, 3.0),
            MeasurementPair::new("left", 4.06, 4.0),
        ]
    }

    #[test]
    fn summary_over_reference_rows() {
        let report = summarize(Denominator::Detected, &reference_pairs()).unwrap();
        assert_eq!(report.count, 3);
        assert_abs_diff_eq!(report.mean_percent_error, 1.3876, epsilon = 5e-5);
        assert_abs_diff_eq!(report.max_percent_error, 1.6949, epsilon = 5e-5);
        assert_abs_diff_eq!(report.rows[0].difference_m, 0.02, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rows[1].difference_m, -0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(report.rows[2].difference_m, 0.06, epsilon = 1e-12);
        let labels: Vec<&str> = report.rows.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["right", "middle", "left"]);
    }

    #[test]
    fn single_identical_pair_summarizes_to_zero() {
        let report = summarize(
            Denominator::Detected,
            &[MeasurementPair::new("a", 1.3, 1.3)],
        )
        .unwrap();
        assert_eq!(report.mean_percent_error, 0.0);
        assert_eq!(report.max_percent_error, 0.0);
    }

    #[test]
    fn empty_input_is_an_empty_report() {
        let report = summarize(Denominator::Detected, &[]).unwrap();
        assert_eq!(report.count, 0);
        assert!(report.rows.is_empty());
        assert_eq!(report.mean_percent_error, 0.0);
    }

    #[test]
    fn text_table_rounds_to_two_decimals() {
        let table = summarize(Denominator::Detected, &reference_pairs())
            .unwrap()
            .to_text_table();
        assert!(table.contains("0.99"));
        assert!(table.contains("1.69"));
        assert!(table.contains("1.48"));
        assert!(table.contains("-0.05"));
        assert!(table.contains("mean percent error: 1.39"));
    }

    #[test]
    fn csv_rounds_to_four_decimals() {
        let csv = summarize(Denominator::Detected, &reference_pairs())
            .unwrap()
            .to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "label,detected_m,actual_m,difference_m,percent_error"
        );
        assert_eq!(lines.next().unwrap(), "right,2.0200,2.0000,0.0200,0.9901");
        assert_eq!(lines.next().unwrap(), "middle,2.9500,3.0000,-0.0500,1.6949");
        assert_eq!(lines.next().unwrap(), "left,4.0600,4.0000,0.0600,1.4778");
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        let report = summarize(
            Denominator::Detected,
            &[MeasurementPair::new("a,b \"c\"", 1.0, 1.0)],
        )
        .unwrap();
        assert!(report.to_csv().contains("\"a,b \"\"c\"\"\""));
    }

    proptest! {
        #[test]
        fn invariant_under_common_scaling(
            a in 1.0e-3..1.0e3f64,
            b in 1.0e-3..1.0e3f64,
            k in 1.0e-3..1.0e3f64,
        ) {
            let base = percent_error(a, b).unwrap();
            let scaled = percent_error(k * a, k * b).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-9 * base.abs().max(1.0));
        }

        #[test]
        fn non_negative_and_zero_only_at_equality(
            a in 1.0e-3..1.0e3f64,
            b in 1.0e-3..1.0e3f64,
        ) {
            let pe = percent_error(a, b).unwrap();
            prop_assert!(pe >= 0.0);
            if a != b {
                prop_assert!(pe > 0.0);
            }
        }
    }
}
