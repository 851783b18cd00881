//! CSV and JSON renderings of results.
//!
//! CSV is the plotting interchange; JSON reports additionally echo the
//! scenario in lab units so a result file is self-describing. Numbers are
//! printed in shortest round-trip form, so output is byte-identical for
//! identical inputs.

use std::fmt::Write as _;

use serde::Serialize;

use crate::addressing::{SweepRow, VoltageSolution};
use crate::equilibrium::{EquilibriumString, SpacingDeviation};
use crate::fields::FieldProfile;
use crate::micromotion::MotionReport;
use crate::model::{LabConfig, Scenario};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `electrode,scaled_voltage,voltage_V`
pub fn voltage_csv(solution: &VoltageSolution) -> String {
    let mut out = String::from("electrode,scaled_voltage,voltage_V\n");
    for (j, (s, u)) in solution
        .scaled_voltages
        .iter()
        .zip(&solution.voltages)
        .enumerate()
    {
        let _ = writeln!(out, "{},{},{}", j + 1, s, u);
    }
    out
}

/// `z_um,e_perp_V_per_m`
pub fn profile_csv(profile: &FieldProfile) -> String {
    let mut out = String::from("z_um,e_perp_V_per_m\n");
    for &(z, e) in &profile.samples {
        let _ = writeln!(out, "{},{}", z * 1e6, e);
    }
    out
}

/// `ion,e_perp_V_per_m,y_nm,xi_nm,kappa,rabi_ratio[,ez_V_per_m,z_disp_nm]`
pub fn motion_csv(report: &MotionReport) -> String {
    let axial = report.has_axial();
    let mut out = String::from("ion,e_perp_V_per_m,y_nm,xi_nm,kappa,rabi_ratio");
    if axial {
        out.push_str(",ez_V_per_m,z_disp_nm");
    }
    out.push('\n');
    for m in &report.ions {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            m.ion,
            m.e_perp,
            m.displacement_y * 1e9,
            m.micromotion_amp * 1e9,
            m.kappa,
            m.rabi_ratio
        );
        if axial {
            let _ = write!(
                out,
                ",{},{}",
                m.axial_field.unwrap_or(f64::NAN),
                m.axial_displacement.unwrap_or(f64::NAN) * 1e9
            );
        }
        out.push('\n');
    }
    out
}

/// `param,peak_scaled_voltage,peak_voltage_V,condition_estimate`; rows
/// whose solve failed carry `NaN` in every value column.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,peak_scaled_voltage,peak_voltage_V,condition_estimate\n");
    for row in rows {
        match &row.outcome {
            Ok(p) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    row.param, p.peak_scaled_voltage, p.peak_voltage, p.condition_estimate
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{},NaN,NaN,NaN", row.param);
            }
        }
    }
    out
}

/// `ion,scaled_position`
pub fn equilibrium_csv(string: &EquilibriumString) -> String {
    let mut out = String::from("ion,scaled_position\n");
    for (i, u) in string.scaled_positions.iter().enumerate() {
        let _ = writeln!(out, "{},{}", i + 1, u);
    }
    out
}

/// `gap,normalized_gap`
pub fn spacing_csv(spacing: &SpacingDeviation) -> String {
    let mut out = String::from("gap,normalized_gap\n");
    for (k, g) in spacing.normalized_gaps.iter().enumerate() {
        let _ = writeln!(out, "{},{}", k + 1, g);
    }
    out
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    scenario: LabConfig,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(scenario: &Scenario, command: &str, body: T) -> String {
    let env = Envelope {
        tool: TOOL_NAME,
        version: TOOL_VERSION,
        command,
        scenario: scenario.lab_config(),
        body,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("report serialises");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct VoltageBody<'a> {
    scaled_voltages: &'a [f64],
    #[serde(rename = "voltages_V")]
    voltages: &'a [f64],
    #[serde(rename = "peak_abs_voltage_V")]
    peak_abs_voltage: f64,
    residual: f64,
    condition_estimate: f64,
    achieved_kappa: &'a [f64],
}

/// JSON report for a voltage solution, with the scenario echo.
pub fn voltage_json(scenario: &Scenario, solution: &VoltageSolution, command: &str) -> String {
    envelope(
        scenario,
        command,
        VoltageBody {
            scaled_voltages: &solution.scaled_voltages,
            voltages: &solution.voltages,
            peak_abs_voltage: solution.peak_abs_voltage,
            residual: solution.diagnostics.residual_inf_norm,
            condition_estimate: solution.diagnostics.condition_estimate,
            achieved_kappa: &solution.achieved_kappa,
        },
    )
}

/// JSON report for a motion chain.
pub fn motion_json(scenario: &Scenario, report: &MotionReport, command: &str) -> String {
    envelope(scenario, command, report)
}
