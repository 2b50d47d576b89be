//! CSV encoding and parsing with fixed numeric precision.
//!
//! Every numeric cell uses a fixed number of decimals (headways 4, flows 2,
//! penetration rates 2) so repeated runs emit byte-identical files and
//! parse/re-encode round-trips are stable.

use laneopt_core::{
    CalibrationReport, CalibrationTarget, Scenario, SweepSeries, TransitionRange,
};

use crate::error::{CliError, CliResult};

pub fn fmt_flow(value: f64) -> String {
    format!("{value:.2}")
}

pub fn fmt_headway(value: f64) -> String {
    format!("{value:.4}")
}

pub fn fmt_rate(value: f64) -> String {
    format!("{value:.2}")
}

/// One row per grid point: the optimum and its flow breakdown.
pub fn sweep_csv(series: &SweepSeries) -> String {
    let mut out = String::from("p,l_A_opt,Q,q_A,p_prime_A,C_mix_unallocated,q_mix,C_mix_single_lane\n");
    for point in &series.points {
        let best = &point.result.best;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_rate(point.p.value()),
            best.dedicated_lanes,
            fmt_flow(best.throughput),
            fmt_flow(best.dedicated_flow),
            fmt_rate(best.residual_penetration.value()),
            fmt_flow(point.unallocated_capacity),
            fmt_flow(best.mixed_flow),
            fmt_flow(point.single_lane_capacity),
        ));
    }
    out
}

pub fn transitions_csv(ranges: &[TransitionRange]) -> String {
    let mut out = String::from("l_A,p_low,p_high\n");
    for range in ranges {
        out.push_str(&format!(
            "{},{},{}\n",
            range.dedicated_lanes,
            fmt_rate(range.p_low.value()),
            fmt_rate(range.p_high.value()),
        ));
    }
    out
}

/// Parses transitions.csv back into (l_A, p_low, p_high) rows.
pub fn parse_transitions_csv(text: &str) -> CliResult<Vec<(u32, f64, f64)>> {
    let mut rows = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (index == 0 && line.starts_with("l_A")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Input(format!(
                "transitions line {}: expected 3 fields, got {}",
                index + 1,
                fields.len()
            )));
        }
        let parse_err =
            |field: &str, e| CliError::Input(format!("transitions line {}: {field}: {e}", index + 1));
        rows.push((
            fields[0].parse::<u32>().map_err(|e| parse_err("l_A", e.to_string()))?,
            fields[1].parse::<f64>().map_err(|e| parse_err("p_low", e.to_string()))?,
            fields[2].parse::<f64>().map_err(|e| parse_err("p_high", e.to_string()))?,
        ));
    }
    Ok(rows)
}

/// Re-encodes parsed transition rows with the standard precision.
pub fn encode_transitions(rows: &[(u32, f64, f64)]) -> String {
    let mut out = String::from("l_A,p_low,p_high\n");
    for (lanes, low, high) in rows {
        out.push_str(&format!("{},{},{}\n", lanes, fmt_rate(*low), fmt_rate(*high)));
    }
    out
}

/// Parses a calibration targets file: `scenario,L,l_A,p_low,p_high` rows,
/// with an optional header line.
pub fn parse_targets(text: &str) -> CliResult<Vec<CalibrationTarget>> {
    let mut targets = Vec::new();
    for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (index == 0 && line.starts_with("scenario")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(CliError::Input(format!(
                "targets line {}: expected scenario,L,l_A,p_low,p_high",
                index + 1
            )));
        }
        let parse_err =
            |field: &str, e: String| CliError::Input(format!("targets line {}: {field}: {e}", index + 1));
        let scenario: Scenario = fields[0]
            .parse()
            .map_err(|e: laneopt_core::DomainError| parse_err("scenario", e.to_string()))?;
        targets.push(CalibrationTarget {
            scenario,
            lanes: fields[1].parse().map_err(|e: std::num::ParseIntError| {
                parse_err("L", e.to_string())
            })?,
            dedicated_lanes: fields[2].parse().map_err(|e: std::num::ParseIntError| {
                parse_err("l_A", e.to_string())
            })?,
            p_low: fields[3].parse().map_err(|e: std::num::ParseFloatError| {
                parse_err("p_low", e.to_string())
            })?,
            p_high: fields[4].parse().map_err(|e: std::num::ParseFloatError| {
                parse_err("p_high", e.to_string())
            })?,
        });
    }
    Ok(targets)
}

/// One row per target with the fit at the calibrated demand.
pub fn calibration_csv(report: &CalibrationReport) -> String {
    let mut out = String::from(
        "D,scenario,L,l_A,expected_p_low,expected_p_high,computed_p_low,computed_p_high,residual,discrepant\n",
    );
    for fit in &report.fits {
        let (computed_low, computed_high) = match fit.computed {
            Some((low, high)) => (fmt_rate(low), fmt_rate(high)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            fmt_flow(report.best_demand),
            fit.target.scenario,
            fit.target.lanes,
            fit.target.dedicated_lanes,
            fmt_rate(fit.target.p_low),
            fmt_rate(fit.target.p_high),
            computed_low,
            computed_high,
            fmt_rate(fit.residual),
            fit.discrepant,
        ));
    }
    out
}
