//! Equilibrium positions of an ion string in a harmonic axial well.
//!
//! Positions are in units of `l = (Q^2 / (4 pi eps0 m omega_z^2))^(1/3)`,
//! where the potential energy reduces to
//! `V(u) = sum_i u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|`.

use serde::Serialize;

use crate::addressing::{solve_with_factors, VoltageSolution};
use crate::fields::distance_factors_at;
use crate::model::{IonSpecies, Scenario, VACUUM_PERMITTIVITY};
use crate::numerics::{solve_square, DenseMatrix};
use crate::{Error, Result};

pub const MAX_IONS: usize = 200;
const MAX_ITERATIONS: usize = 200;
const GRADIENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumString {
    pub scaled_positions: Vec<f64>,
    pub n: usize,
    pub gradient_norm: f64,
    pub iterations: usize,
}

impl EquilibriumString {
    pub fn gaps(&self) -> Vec<f64> {
        self.scaled_positions.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Gap between the two central ions; for odd `n` the gap just left of
    /// the centre ion (equal to the one on its right by symmetry).
    pub fn central_gap(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.gaps()[(self.n - 2) / 2])
    }
}

/// Length unit `l` in metres for a species in an axial well `omega_z`.
pub fn length_scale(species: &IonSpecies, omega_z: f64) -> f64 {
    let q = species.charge;
    (q * q / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * species.mass * omega_z * omega_z))
        .cbrt()
}

/// Scaled potential energy of a configuration.
pub fn scaled_energy(u: &[f64]) -> f64 {
    let mut e: f64 = u.iter().map(|x| 0.5 * x * x).sum();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            e += 1.0 / (u[i] - u[j]).abs();
        }
    }
    e
}

/// Gradient of [`scaled_energy`].
pub fn scaled_gradient(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|i| {
            let coulomb: f64 = (0..u.len())
                .filter(|&j| j != i)
                .map(|j| {
                    let delta = u[i] - u[j];
                    delta.signum() / (delta * delta)
                })
                .sum();
            u[i] - coulomb
        })
        .collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
fn strictly_increasing(u: &[f64]) -> bool {
    u.windows(2).all(|w| w[0] < w[1])
}

/// Positions carried as unevaluated sums `hi + lo`.
///
/// Near the minimum the Hessian of a long string reaches ~1e3, so rounding
/// a position to the nearest double already leaves a gradient of order
/// 1e-12. The extra word lets the iteration resolve the minimum below that.
#[derive(Clone)]
struct SplitPositions {
    hi: Vec<f64>,
    lo: Vec<f64>,
}

impl SplitPositions {
    fn delta(&self, i: usize, j: usize) -> f64 {
        (self.hi[i] - self.hi[j]) + (self.lo[i] - self.lo[j])
    }

    fn rounded(&self) -> Vec<f64> {
        self.hi.iter().zip(&self.lo).map(|(h, l)| h + l).collect()
    }

    fn energy(&self) -> f64 {
        let n = self.hi.len();
        let mut e: f64 = self.rounded().iter().map(|x| 0.5 * x * x).sum();
        for i in 0..n {
            for j in i + 1..n {
                e += 1.0 / self.delta(i, j).abs();
            }
        }
        e
    }

    fn gradient(&self) -> Vec<f64> {
        let n = self.hi.len();
        (0..n)
            .map(|i| {
                let coulomb: f64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| {
                        let delta = self.delta(i, j);
                        delta.signum() / (delta * delta)
                    })
                    .sum();
                (self.hi[i] - coulomb) + self.lo[i]
            })
            .collect()
    }

    fn hessian(&self) -> DenseMatrix {
        let n = self.hi.len();
        let mut h = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let c = 2.0 / self.delta(i, j).abs().powi(3);
                    h[(i, j)] = -c;
                    h[(i, i)] += c;
                }
            }
        }
        h
    }

    fn ordered(&self) -> bool {
        (1..self.hi.len()).all(|i| self.delta(i, i - 1) > 0.0)
    }

    fn step(&self, dx: &[f64], alpha: f64) -> Self {
        let mut next = self.clone();
        for i in 0..dx.len() {
            let t = self.lo[i] + alpha * dx[i];
            let s = self.hi[i] + t;
            let z = s - self.hi[i];
            next.lo[i] = (self.hi[i] - (s - z)) + (t - z);
            next.hi[i] = s;
        }
        next
    }
}

/// Minimises the scaled energy by damped Newton iteration from unit gaps.
pub fn equilibrium_positions(n: usize) -> Result<EquilibriumString> {
    if n == 0 || n > MAX_IONS {
        return Err(Error::InvalidArgument(format!(
            "ion count must be in 1..={MAX_IONS}, got {n}"
        )));
    }
    let mut u = SplitPositions {
        hi: (0..n).map(|i| i as f64 - 0.5 * (n as f64 - 1.0)).collect(),
        lo: vec![0.0; n],
    };
    let mut g = u.gradient();
    let mut g_norm = max_abs(&g);
    let mut energy = u.energy();
    for iteration in 0..=MAX_ITERATIONS {
        if g_norm < GRADIENT_TOLERANCE {
            let positions = u.rounded();
            let gradient_norm = max_abs(&scaled_gradient(&positions));
            return Ok(EquilibriumString {
                scaled_positions: positions,
                n,
                gradient_norm,
                iterations: iteration,
            });
        }
        if iteration == MAX_ITERATIONS {
            break;
        }
        let minus_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let (step, _) = solve_square(&u.hessian(), &minus_g)?;
        let slope: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum();

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = u.step(&step, alpha);
            if trial.ordered() {
                let e_trial = trial.energy();
                let g_trial = trial.gradient();
                let g_trial_norm = max_abs(&g_trial);
                // Armijo on the energy; near the minimum the energy stalls at
                // rounding level, where a falling gradient norm suffices.
                if e_trial <= energy + 1e-4 * alpha * slope || g_trial_norm < g_norm {
                    u = trial;
                    g = g_trial;
                    g_norm = g_trial_norm;
                    energy = e_trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        gradient_norm: g_norm,
    })
}

/// Adjacent gaps normalised by the central gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingDeviation {
    pub normalized_gaps: Vec<f64>,
    /// `max_k |gap_k / central_gap - 1|`
    pub max_deviation: f64,
}

pub fn spacing_deviation(n: usize) -> Result<SpacingDeviation> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "spacing deviation needs at least 3 ions, got {n}"
        )));
    }
    Ok(spacing_of(&equilibrium_positions(n)?))
}

pub fn spacing_of(string: &EquilibriumString) -> SpacingDeviation {
    let central = string.central_gap().unwrap_or(1.0);
    let normalized_gaps: Vec<f64> = string.gaps().iter().map(|g| g / central).collect();
    let max_deviation = normalized_gaps
        .iter()
        .fold(0.0, |m: f64, g| m.max((g - 1.0).abs()));
    SpacingDeviation {
        normalized_gaps,
        max_deviation,
    }
}

/// Axial ion positions (m) for the exact string, scaled so that the central
/// gap equals `d` and centred on the electrode array.
pub fn exact_ion_positions(scenario: &Scenario) -> Result<Vec<f64>> {
    let g = &scenario.geometry;
    let string = equilibrium_positions(g.n_ions)?;
    let scale = string.central_gap().map_or(g.d, |gap| g.d / gap);
    let center = g.string_center();
    Ok(string
        .scaled_positions
        .iter()
        .map(|u| center + u * scale)
        .collect())
}

/// Addressing solve with ions at their exact equilibrium positions instead
/// of uniformly spaced; electrodes stay at `j d`.
pub fn solve_with_exact_positions(scenario: &Scenario) -> Result<VoltageSolution> {
    let g = &scenario.geometry;
    if g.n_sections != g.n_ions {
        return Err(Error::InvalidArgument(format!(
            "exact-position solve needs n_sections = n_ions, got {} and {}",
            g.n_sections, g.n_ions
        )));
    }
    let z = exact_ion_positions(scenario)?;
    solve_with_factors(scenario, &distance_factors_at(g, &z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_strings() {
        assert_eq!(equilibrium_positions(1).unwrap().scaled_positions, vec![0.0]);
        let two = equilibrium_positions(2).unwrap();
        let a = 0.25_f64.cbrt();
        assert!((two.scaled_positions[1] - a).abs() < 1e-12);
        assert!((two.scaled_positions[0] + a).abs() < 1e-12);
        // u^3 = 5/4 for the outer ions of three
        let three = equilibrium_positions(3).unwrap();
        let b = 1.25_f64.cbrt();
        assert!((three.scaled_positions[2] - b).abs() < 1e-12);
        assert!(three.scaled_positions[1].abs() < 1e-12);
    }

    #[test]
    fn argument_range() {
        assert!(equilibrium_positions(0).is_err());
        assert!(equilibrium_positions(201).is_err());
        assert!(spacing_deviation(2).is_err());
    }

    #[test]
    fn largest_string_converges() {
        let s = equilibrium_positions(MAX_IONS).unwrap();
        // gradient at the rounded positions sits at the double-precision floor
        assert!(s.gradient_norm < 1e-10, "{}", s.gradient_norm);
        assert!(strictly_increasing(&s.scaled_positions));
    }

    #[test]
    fn three_ion_spacing_is_uniform() {
        let dev = spacing_deviation(3).unwrap();
        assert!(dev.max_deviation < 1e-12);
    }

    #[test]
    fn beryllium_length_scale() {
        // l^3 = e^2 / (4 pi eps0 m w^2) for 9Be+ at 5 MHz, about 2.50 µm
        let l = length_scale(&IonSpecies::beryllium9(), 2.0 * std::f64::consts::PI * 5e6);
        let m = 9.012 * crate::model::ATOMIC_MASS_UNIT;
        let e = crate::model::ELEMENTARY_CHARGE;
        let w = 2.0 * std::f64::consts::PI * 5e6;
        let expected = e * e / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * m * w * w);
        assert!((l.powi(3) - expected).abs() < 1e-12 * expected);
        assert!((l - 2.4998e-6).abs() < 1e-9, "{l}");
    }

    #[test]
    fn rectangular_geometry_rejected() {
        let s = Scenario::reference_three_ion();
        let g = crate::model::TrapGeometry::new(15e-6, 3e-6, 3, 4).unwrap();
        let wide = s.with_geometry(g, s.target.clone()).unwrap();
        assert!(solve_with_exact_positions(&wide).is_err());
    }
}
