//! The five subcommands: capacity, optimize, sweep, simulate, calibrate.

use std::path::{Path, PathBuf};

use laneopt_core::{
    calibrate_demand, extract_transition_ranges, optimize_allocation, reference_targets,
    ring::DEFAULT_TOLERANCE, sweep_penetration, trial_seeds, verify_convergence,
    CalibrationReport, CalibrationTarget, SweepSeries,
};

use crate::config::{write_atomic, RunSettings};
use crate::csvio::{
    calibration_csv, fmt_flow, fmt_headway, fmt_rate, parse_targets, sweep_csv, transitions_csv,
};
use crate::error::{io_error, CliError, CliResult};
use crate::svg::{line_chart, step_chart, Series};

/// Mixed-traffic capacity over the grid (or at a single penetration rate).
pub fn cmd_capacity(settings: &RunSettings) -> CliResult<()> {
    let rates = match settings.p {
        Some(p) => vec![p],
        None => settings.grid()?,
    };
    let mut csv = String::from("p,h_mix,C_mix\n");
    println!("p, h_mix, C_mix");
    for p in rates {
        let headway = settings.profile.mixed_headway(p);
        let capacity = settings.profile.mixed_capacity(p);
        println!(
            "{}, {}, {}",
            fmt_rate(p.value()),
            fmt_headway(headway),
            fmt_flow(capacity)
        );
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_rate(p.value()),
            fmt_headway(headway),
            fmt_flow(capacity)
        ));
    }
    if let Some(dir) = &settings.output_dir {
        ensure_dir(dir)?;
        write_atomic(&dir.join("capacity.csv"), &csv)?;
    }
    Ok(())
}

/// Evaluates every candidate dedicated-lane count at one penetration rate
/// and marks the argmax.
pub fn cmd_optimize(settings: &RunSettings) -> CliResult<()> {
    let p = settings.penetration_or_input_error()?;
    let config = settings.freeway()?;
    let result = optimize_allocation(&config, p)?;
    println!("l_A, q_A, p_prime_A, C_mix, q_mix, Q");
    for candidate in &result.candidates {
        let marker = if candidate.dedicated_lanes == result.best.dedicated_lanes {
            "  *"
        } else {
            ""
        };
        println!(
            "{}, {}, {}, {}, {}, {}{}",
            candidate.dedicated_lanes,
            fmt_flow(candidate.dedicated_flow),
            fmt_rate(candidate.residual_penetration.value()),
            fmt_flow(candidate.mixed_capacity),
            fmt_flow(candidate.mixed_flow),
            fmt_flow(candidate.throughput),
            marker
        );
    }
    println!(
        "optimal l_A = {} with Q = {} veh/hr",
        result.best.dedicated_lanes,
        fmt_flow(result.best.throughput)
    );
    Ok(())
}

/// Sweeps the penetration grid, prints the transition ranges and writes the
/// CSV and SVG artifacts.
pub fn cmd_sweep(settings: &RunSettings) -> CliResult<()> {
    let config = settings.freeway()?;
    let grid = settings.grid()?;
    let series = sweep_penetration(&config, &grid)?;
    let ranges = extract_transition_ranges(&series);

    println!(
        "sweep: scenario={} L={} D={} step={}",
        settings.scenario_label,
        settings.lanes,
        fmt_flow(settings.demand),
        settings.grid_step
    );
    for range in &ranges {
        println!(
            "l_A={} optimal for {} <= p <= {}",
            range.dedicated_lanes,
            fmt_rate(range.p_low.value()),
            fmt_rate(range.p_high.value())
        );
    }

    let dir = settings
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    write_atomic(&dir.join("sweep.csv"), &sweep_csv(&series))?;
    write_atomic(&dir.join("transitions.csv"), &transitions_csv(&ranges))?;
    write_sweep_charts(&dir, &series, &settings.scenario_label)?;
    println!("artifacts written to {}", dir.display());
    Ok(())
}

fn write_sweep_charts(dir: &Path, series: &SweepSeries, scenario: &str) -> CliResult<()> {
    let allocation: Vec<(f64, f64)> = series
        .points
        .iter()
        .map(|pt| (pt.p.value(), pt.result.best.dedicated_lanes as f64))
        .collect();
    let single: Vec<(f64, f64)> = series
        .points
        .iter()
        .map(|pt| (pt.p.value(), pt.single_lane_capacity))
        .collect();
    let unallocated: Vec<(f64, f64)> = series
        .points
        .iter()
        .map(|pt| (pt.p.value(), pt.unallocated_capacity))
        .collect();
    let throughput: Vec<(f64, f64)> = series
        .points
        .iter()
        .map(|pt| (pt.p.value(), pt.result.best.throughput))
        .collect();

    write_atomic(
        &dir.join("allocation.svg"),
        &step_chart(
            &format!("Optimal dedicated lanes ({scenario})"),
            "CAV penetration rate",
            "dedicated lanes",
            &[Series { label: "l_A".into(), points: allocation }],
        ),
    )?;
    write_atomic(
        &dir.join("capacity.svg"),
        &line_chart(
            &format!("Mixed-lane capacity ({scenario})"),
            "CAV penetration rate",
            "capacity (veh/hr/lane)",
            &[
                Series { label: "single lane".into(), points: single },
                Series { label: "unallocated @ optimum".into(), points: unallocated },
            ],
        ),
    )?;
    write_atomic(
        &dir.join("throughput.svg"),
        &line_chart(
            &format!("Total throughput at optimum ({scenario})"),
            "CAV penetration rate",
            "throughput (veh/hr)",
            &[Series { label: "Q".into(), points: throughput }],
        ),
    )
}

/// Runs the ring Monte Carlo trials and verifies convergence to the closed
/// form; verification failure exits with code 5.
pub fn cmd_simulate(settings: &RunSettings) -> CliResult<()> {
    let p = settings.penetration_or_input_error()?;
    let sim = settings.simulate;
    let seeds = trial_seeds(sim.seed, sim.trials);
    let report = verify_convergence(&settings.profile, p, sim.n, &seeds)?;

    println!(
        "simulate: scenario={} p={} n={} trials={} base_seed={}",
        settings.scenario_label,
        fmt_rate(p.value()),
        sim.n,
        sim.trials,
        sim.seed
    );
    println!("trial, seed, empirical_h, rel_deviation");
    for (index, trial) in report.trials.iter().enumerate() {
        let deviation =
            (trial.empirical_headway - report.expected_headway).abs() / report.expected_headway;
        println!(
            "{}, {}, {}, {:.6}",
            index,
            trial.seed,
            fmt_headway(trial.empirical_headway),
            deviation
        );
    }
    println!("closed-form h_mix = {}", fmt_headway(report.expected_headway));
    println!("mean empirical h  = {}", fmt_headway(report.mean_empirical_headway));
    println!(
        "max relative deviation = {:.6} (tolerance {})",
        report.max_relative_deviation, DEFAULT_TOLERANCE
    );
    if report.within_tolerance(DEFAULT_TOLERANCE) {
        println!("converged");
        Ok(())
    } else {
        Err(CliError::Verification(format!(
            "empirical headway deviates {:.6} from the closed form (tolerance {})",
            report.max_relative_deviation, DEFAULT_TOLERANCE
        )))
    }
}

/// Calibrates the demand level against transition-range targets and writes
/// the residual report. Contradictory targets produce residuals, not errors.
pub fn cmd_calibrate(
    settings: &RunSettings,
    targets_path: Option<&Path>,
    d_min: f64,
    d_max: f64,
    d_step: f64,
) -> CliResult<()> {
    let targets: Vec<CalibrationTarget> = match targets_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read targets {}: {e}", path.display())))?;
            let parsed = parse_targets(&text)?;
            if parsed.is_empty() {
                return Err(CliError::Input(format!(
                    "targets file {} holds no targets",
                    path.display()
                )));
            }
            parsed
        }
        None => reference_targets(),
    };

    if !(d_step > 0.0) || !d_step.is_finite() {
        return Err(CliError::Input(format!("d-step must be positive, got {d_step}")));
    }
    if d_max < d_min {
        return Err(CliError::Input(format!(
            "d-max {d_max} is below d-min {d_min}"
        )));
    }
    let mut demand_grid = Vec::new();
    let mut step_index = 0u64;
    loop {
        let demand = d_min + step_index as f64 * d_step;
        if demand > d_max + 1e-9 {
            break;
        }
        demand_grid.push(demand);
        step_index += 1;
    }

    let report = calibrate_demand(&targets, &demand_grid)?;
    print_calibration(&report);

    let dir = settings
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    ensure_dir(&dir)?;
    write_atomic(&dir.join("calibration.csv"), &calibration_csv(&report))?;
    Ok(())
}

fn print_calibration(report: &CalibrationReport) {
    println!(
        "best-fit D = {} veh/hr/lane (total residual {})",
        fmt_flow(report.best_demand),
        fmt_rate(report.total_residual)
    );
    println!("scenario, L, l_A, expected, computed, residual");
    for fit in &report.fits {
        let computed = match fit.computed {
            Some((low, high)) => format!("[{}, {}]", fmt_rate(low), fmt_rate(high)),
            None => "none".to_string(),
        };
        let flag = if fit.discrepant { "  DISCREPANT" } else { "" };
        println!(
            "{}, {}, {}, [{}, {}], {}, {}{}",
            fit.target.scenario,
            fit.target.lanes,
            fit.target.dedicated_lanes,
            fmt_rate(fit.target.p_low),
            fmt_rate(fit.target.p_high),
            computed,
            fmt_rate(fit.residual),
            flag
        );
    }
    // Summarize discrepancies per lane-count group so a target set mixing
    // several geometries shows where the single demand cannot fit.
    let mut groups: Vec<u32> = report.fits.iter().map(|f| f.target.lanes).collect();
    groups.sort_unstable();
    groups.dedup();
    for lanes in groups {
        let total = report.fits.iter().filter(|f| f.target.lanes == lanes).count();
        let discrepant = report
            .fits
            .iter()
            .filter(|f| f.target.lanes == lanes && f.discrepant)
            .count();
        if discrepant > 0 {
            println!(
                "L={lanes}: {discrepant} of {total} targets cannot be met at the calibrated demand"
            );
        }
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error("cannot create output dir", dir, e))
}
