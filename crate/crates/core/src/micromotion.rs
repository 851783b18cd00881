//! From static field to sideband coupling: pseudopotential displacement,
//! driven micromotion amplitude, modulation index and `J1` Rabi ratio.

use serde::Serialize;

use crate::addressing::VoltageSolution;
use crate::fields::{axial_field_at_ions, perpendicular_field_at_ions};
use crate::model::Scenario;
use crate::numerics::bessel_j1;
use crate::{Error, Result};

/// Location of the first maximum of `J1`.
pub const J1_FIRST_MAX_ARG: f64 = 1.841_183_781_340_659_3;

/// Relative tolerance for agreement of the two micromotion-amplitude forms.
const BRANCH_TOLERANCE: f64 = 1e-12;

pub fn q_parameter(scenario: &Scenario) -> f64 {
    scenario.q_parameter()
}

/// Static offset `y = 8 Q E / (m q^2 Omega_rf^2)` produced by a
/// perpendicular field `E` in the pseudopotential.
pub fn displacement(scenario: &Scenario, e_perp: f64) -> f64 {
    let q = scenario.q_parameter();
    let omega = scenario.drive.omega;
    8.0 * scenario.species.charge * e_perp / (scenario.species.mass * q * q * omega * omega)
}

/// Driven micromotion amplitude `xi = y q / 2`.
pub fn micromotion_amplitude(scenario: &Scenario, y: f64) -> f64 {
    y * scenario.q_parameter() / 2.0
}

/// `xi = 2 E r^2 / V`, the same amplitude written in terms of the field.
pub fn micromotion_amplitude_from_field(scenario: &Scenario, e_perp: f64) -> f64 {
    2.0 * e_perp * scenario.geometry.r * scenario.geometry.r / scenario.drive.amplitude
}

/// [`micromotion_amplitude`], cross-checked against the field form.
pub fn micromotion_amplitude_checked(scenario: &Scenario, y: f64, e_perp: f64) -> Result<f64> {
    let xi = micromotion_amplitude(scenario, y);
    let xi_field = micromotion_amplitude_from_field(scenario, e_perp);
    let scale = xi.abs().max(xi_field.abs());
    if (xi - xi_field).abs() > BRANCH_TOLERANCE * scale {
        return Err(Error::Inconsistent(format!(
            "micromotion amplitude y q/2 = {xi:e} m disagrees with 2 E r^2 / V = {xi_field:e} m"
        )));
    }
    Ok(xi)
}

/// `kappa = k xi`, with the wavevector taken parallel to the displacement.
/// Signs are kept: a negative index means the ion was pushed the other way.
pub fn modulation_index(scenario: &Scenario, xi: f64) -> f64 {
    scenario.laser.k * xi
}

/// First-sideband to carrier Rabi frequency ratio, `J1(kappa)`.
pub fn rabi_ratio(kappa: f64) -> Result<f64> {
    bessel_j1(kappa)
}

/// Smallest positive `kappa` with `J1(kappa) = target_ratio`.
pub fn kappa_for_ratio(target_ratio: f64) -> Result<f64> {
    let ceiling = bessel_j1(J1_FIRST_MAX_ARG)?;
    if !(target_ratio > 0.0 && target_ratio < ceiling) {
        return Err(Error::Domain {
            function: "kappa_for_ratio",
            value: target_ratio,
            reason: "ratio must lie strictly between 0 and max J1 = 0.58187",
        });
    }
    // J1 increases monotonically on [0, first maximum]
    let (mut lo, mut hi) = (0.0_f64, J1_FIRST_MAX_ARG);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if bessel_j1(mid)? < target_ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Axial offset `Q E_z / (m omega_z^2)` in the harmonic axial well.
pub fn axial_displacement(scenario: &Scenario, e_axial: f64, omega_z: f64) -> f64 {
    scenario.species.charge * e_axial / (scenario.species.mass * omega_z * omega_z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IonMotion {
    /// 1-based
    pub ion: usize,
    /// V/m
    pub e_perp: f64,
    /// m
    pub displacement_y: f64,
    /// m
    pub micromotion_amp: f64,
    pub kappa: f64,
    pub rabi_ratio: f64,
    /// V/m, only with an axial secular frequency
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axial_field: Option<f64>,
    /// m, only with an axial secular frequency
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axial_displacement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotionReport {
    pub q: f64,
    pub ions: Vec<IonMotion>,
}

impl MotionReport {
    pub fn has_axial(&self) -> bool {
        self.ions.iter().any(|m| m.axial_field.is_some())
    }
}

/// Runs the full chain field -> y -> xi -> kappa -> J1 for every ion.
pub fn motion_report(scenario: &Scenario, solution: &VoltageSolution) -> Result<MotionReport> {
    let geometry = &scenario.geometry;
    let e_perp = perpendicular_field_at_ions(geometry, &solution.voltages)?;
    let axial = match scenario.axial_secular_freq {
        Some(omega_z) => Some((axial_field_at_ions(geometry, &solution.voltages)?, omega_z)),
        None => None,
    };
    let ions = e_perp
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let y = displacement(scenario, e);
            let xi = micromotion_amplitude_checked(scenario, y, e)?;
            let kappa = modulation_index(scenario, xi);
            let (axial_field, axial_displacement) = match &axial {
                Some((ez, omega_z)) => (
                    Some(ez[i]),
                    Some(self::axial_displacement(scenario, ez[i], *omega_z)),
                ),
                None => (None, None),
            };
            Ok(IonMotion {
                ion: i + 1,
                e_perp: e,
                displacement_y: y,
                micromotion_amp: xi,
                kappa,
                rabi_ratio: rabi_ratio(kappa)?,
                axial_field,
                axial_displacement,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MotionReport {
        q: scenario.q_parameter(),
        ions,
    })
}
