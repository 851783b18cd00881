//! Field of the segmented ground rod, each section modelled as a conducting
//! sphere of radius `d/2` held at its section voltage.

use serde::Serialize;

use crate::model::TrapGeometry;
use crate::numerics::{dot2, DenseMatrix};
use crate::{Error, Result};

/// Field magnitude `U d / (2 dist^2)` of one sphere electrode at `dist`.
pub fn electrode_field_magnitude(voltage: f64, d: f64, dist: f64) -> Result<f64> {
    if !(dist > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "distance must be positive, got {dist}"
        )));
    }
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "section length must be positive, got {d}"
        )));
    }
    Ok(voltage * d / (2.0 * dist * dist))
}

/// `(1 + (dz / r)^2)^(-3/2)`: the perpendicular field at axial offset `dz`
/// relative to the field directly above the electrode.
#[inline]
pub(crate) fn relative_distance_factor(dz: f64, r: f64) -> f64 {
    let t = dz / r;
    (1.0 + t * t).powf(-1.5)
}

/// Relative distance factors `m_ij` between ions (rows) and electrodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceFactorMatrix {
    pub m: DenseMatrix,
    /// `d / r`
    pub ratio: f64,
}

impl DistanceFactorMatrix {
    pub fn n_ions(&self) -> usize {
        self.m.rows()
    }

    pub fn n_sections(&self) -> usize {
        self.m.cols()
    }
}

/// `m_ij = (1 + [(i - j) d / r]^2)^(-3/2)` for the uniform string.
pub fn build_distance_factors(geometry: &TrapGeometry) -> DistanceFactorMatrix {
    let ratio = geometry.d / geometry.r;
    let m = DenseMatrix::from_fn(geometry.n_ions, geometry.n_sections, |i, j| {
        let k = i as f64 - j as f64;
        let t = k * ratio;
        (1.0 + t * t).powf(-1.5)
    });
    DistanceFactorMatrix { m, ratio }
}

/// Distance factors for ions at arbitrary axial positions (m), electrodes
/// staying at `j d`.
pub fn distance_factors_at(geometry: &TrapGeometry, ion_z: &[f64]) -> DistanceFactorMatrix {
    let m = DenseMatrix::from_fn(ion_z.len(), geometry.n_sections, |i, j| {
        relative_distance_factor(ion_z[i] - geometry.electrode_z(j + 1), geometry.r)
    });
    DistanceFactorMatrix {
        m,
        ratio: geometry.d / geometry.r,
    }
}

fn check_voltages(geometry: &TrapGeometry, voltages: &[f64]) -> Result<()> {
    if voltages.len() != geometry.n_sections {
        return Err(Error::Dimension {
            what: "electrode voltages",
            expected: geometry.n_sections,
            found: voltages.len(),
        });
    }
    Ok(())
}

/// Total perpendicular field at each ion, `E_i = sum_j m_ij U_j d / (2 r^2)`.
pub fn perpendicular_field_at_ions(geometry: &TrapGeometry, voltages: &[f64]) -> Result<Vec<f64>> {
    check_voltages(geometry, voltages)?;
    let factors = build_distance_factors(geometry);
    let scale = geometry.d / (2.0 * geometry.r * geometry.r);
    Ok((0..geometry.n_ions)
        .map(|i| scale * dot2(factors.m.row(i), voltages))
        .collect())
}

/// Perpendicular field on the trap axis at an arbitrary `z` (m).
pub fn perpendicular_field_at(geometry: &TrapGeometry, voltages: &[f64], z: f64) -> Result<f64> {
    check_voltages(geometry, voltages)?;
    Ok(perpendicular_unchecked(geometry, voltages, z))
}

fn perpendicular_unchecked(geometry: &TrapGeometry, voltages: &[f64], z: f64) -> f64 {
    let factors: Vec<f64> = (1..=geometry.n_sections)
        .map(|j| relative_distance_factor(z - geometry.electrode_z(j), geometry.r))
        .collect();
    geometry.d / (2.0 * geometry.r * geometry.r) * dot2(&factors, voltages)
}

/// Perpendicular field sampled along the axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldProfile {
    /// `(z, E_perp)` in m and V/m, `z` strictly increasing.
    pub samples: Vec<(f64, f64)>,
    pub voltages: Vec<f64>,
}

impl FieldProfile {
    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, &(_, e)| m.max(e.abs()))
    }

    /// Axial positions where the field changes sign, located by linear
    /// interpolation between bracketing samples. Exact zeros at a sample
    /// count once.
    pub fn zero_crossings(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for &(z, e) in &self.samples {
            if e == 0.0 {
                continue;
            }
            if let Some((z0, e0)) = prev {
                if (e0 < 0.0) != (e < 0.0) {
                    out.push(z0 + (z - z0) * e0 / (e0 - e));
                }
            }
            prev = Some((z, e));
        }
        out
    }
}

/// Uniformly sampled perpendicular field between `z_min` and `z_max` (m).
pub fn perpendicular_field_profile(
    geometry: &TrapGeometry,
    voltages: &[f64],
    z_min: f64,
    z_max: f64,
    n_samples: usize,
) -> Result<FieldProfile> {
    check_voltages(geometry, voltages)?;
    if !(z_min.is_finite() && z_max.is_finite() && z_min < z_max) {
        return Err(Error::InvalidArgument(format!(
            "profile range must satisfy z_min < z_max, got [{z_min}, {z_max}]"
        )));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "profile needs at least 2 samples, got {n_samples}"
        )));
    }
    let step = (z_max - z_min) / (n_samples - 1) as f64;
    let samples = (0..n_samples)
        .map(|s| {
            let z = if s + 1 == n_samples {
                z_max
            } else {
                z_min + s as f64 * step
            };
            (z, perpendicular_unchecked(geometry, voltages, z))
        })
        .collect();
    Ok(FieldProfile {
        samples,
        voltages: voltages.to_vec(),
    })
}

/// Signed axial field at each ion,
/// `E_z,i = sum_j U_j d^2 (i - j) / (2 (r^2 + [(i - j) d]^2)^(3/2))`.
///
/// Positive values point toward larger `z`.
pub fn axial_field_at_ions(geometry: &TrapGeometry, voltages: &[f64]) -> Result<Vec<f64>> {
    check_voltages(geometry, voltages)?;
    Ok(geometry
        .ion_positions()
        .iter()
        .map(|&z| axial_unchecked(geometry, voltages, z))
        .collect())
}

pub(crate) fn axial_unchecked(geometry: &TrapGeometry, voltages: &[f64], z: f64) -> f64 {
    let (r, d) = (geometry.r, geometry.d);
    let terms: Vec<f64> = (1..=geometry.n_sections)
        .map(|j| {
            // offset in units of d keeps the i = j term exactly zero
            let k = (z - geometry.electrode_z(j)) / d;
            let kd = k * d;
            d * d * k / (2.0 * (r * r + kd * kd).powf(1.5))
        })
        .collect();
    dot2(&terms, voltages)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometry(n: usize) -> TrapGeometry {
        TrapGeometry::uniform(15e-6, 3e-6, n).unwrap()
    }

    #[test]
    fn sphere_field() {
        let e = electrode_field_magnitude(1.0, 3e-6, 15e-6).unwrap();
        assert!((e - 6666.666_666_666_667).abs() < 1e-9);
        assert_eq!(electrode_field_magnitude(0.0, 3e-6, 1e-6).unwrap(), 0.0);
        let far = electrode_field_magnitude(1.0, 3e-6, 30e-6).unwrap();
        assert!((far - e / 4.0).abs() < 1e-12 * e);
        assert!(electrode_field_magnitude(1.0, 3e-6, 0.0).is_err());
    }

    #[test]
    fn distance_factor_values() {
        let f = build_distance_factors(&geometry(3));
        assert_eq!(f.ratio, 0.2);
        assert_eq!(f.m[(1, 1)], 1.0);
        // 1.04^-1.5 and 1.16^-1.5
        assert!((f.m[(0, 1)] - 0.942_866_9).abs() < 1e-6);
        assert!((f.m[(0, 2)] - 0.800_411_6).abs() < 1e-6);
    }

    #[test]
    fn single_electrode_field_at_facing_ion() {
        let g = geometry(3);
        let e = perpendicular_field_at_ions(&g, &[1.0, 0.0, 0.0]).unwrap();
        assert!((e[0] - 6666.666_666_666_667).abs() < 1e-9);
        assert!(e[1] < e[0] && e[2] < e[1]);
        let zero = perpendicular_field_at_ions(&g, &[0.0; 3]).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        assert!(perpendicular_field_at_ions(&g, &[1.0; 2]).is_err());
    }

    #[test]
    fn single_electrode_profile_peaks_over_it() {
        let g = geometry(5);
        let v = [0.0, 0.0, 1.0, 0.0, 0.0];
        let p = perpendicular_field_profile(&g, &v, 0.0, 18e-6, 181).unwrap();
        let (imax, _) = p
            .samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .unwrap();
        assert!((p.samples[imax].0 - 9e-6).abs() < 1e-12);
        for s in 0..p.samples.len() {
            let mirror = p.samples.len() - 1 - s;
            let (a, b) = (p.samples[s].1, p.samples[mirror].1);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        }
        assert!(p.zero_crossings().is_empty());
    }

    #[test]
    fn profile_errors() {
        let g = geometry(3);
        assert!(perpendicular_field_profile(&g, &[0.0; 3], 1.0, 0.0, 10).is_err());
        assert!(perpendicular_field_profile(&g, &[0.0; 3], 0.0, 1.0, 1).is_err());
        let p = perpendicular_field_profile(&g, &[0.0; 3], 0.0, 1e-5, 11).unwrap();
        assert_eq!(p.max_abs(), 0.0);
        assert!(p.samples.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn axial_direction_and_symmetry() {
        let g = geometry(3);
        // electrode directly below: no axial component
        let ez = axial_field_at_ions(&g, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(ez[1], 0.0);
        // ion 3 is to the right of electrode 2 and is pushed further right
        assert!(ez[2] > 0.0 && ez[0] < 0.0);
        let sym = axial_field_at_ions(&g, &[0.3, -1.0, 0.3]).unwrap();
        assert!(sym[1].abs() < 1e-12 * sym[0].abs());
    }
}
