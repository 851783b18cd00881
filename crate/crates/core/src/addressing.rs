//! Compensation voltages that modulate a chosen set of ions.
//!
//! With every ion initially on the rf node, the modulation index each ion
//! picks up is linear in the section voltages:
//! `kappa_i = (k d / V) sum_j m_ij U_j`. Requesting `kappa_i = kappa e_i`
//! gives the system `m (U / V) = kappa / (k d) e`, solved here directly for
//! square geometries and in the minimum-norm sense when there are more
//! sections than ions.

use rayon::prelude::*;
use serde::Serialize;

use crate::fields::{build_distance_factors, DistanceFactorMatrix};
use crate::model::{check_ion_index, ModulationTarget, Scenario, TrapGeometry};
use crate::numerics::{dot2, solve_min_norm, solve_square, SolveDiagnostics};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoltageSolution {
    /// `U_j / V`
    pub scaled_voltages: Vec<f64>,
    /// `U_j`, volts.
    pub voltages: Vec<f64>,
    /// `max_j |U_j|`, volts.
    pub peak_abs_voltage: f64,
    pub diagnostics: SolveDiagnostics,
    /// Per-ion modulation index obtained by forward-modelling the voltages.
    pub achieved_kappa: Vec<f64>,
    /// Requested per-ion modulation index `kappa * weights`.
    pub target_kappa: Vec<f64>,
}

impl VoltageSolution {
    /// `max_j |U_j / V|`
    pub fn peak_abs_scaled(&self) -> f64 {
        self.scaled_voltages.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest deviation between achieved and requested modulation index.
    pub fn kappa_error(&self) -> f64 {
        self.achieved_kappa
            .iter()
            .zip(&self.target_kappa)
            .fold(0.0, |m, (a, t)| m.max((a - t).abs()))
    }
}

/// Solves for the scenario's own target.
pub fn solve_addressing(scenario: &Scenario) -> Result<VoltageSolution> {
    let factors = build_distance_factors(&scenario.geometry);
    solve_with_factors(scenario, &factors)
}

/// Solves `m (U/V) = kappa/(k d) e` for an explicit distance-factor matrix.
pub fn solve_with_factors(
    scenario: &Scenario,
    factors: &DistanceFactorMatrix,
) -> Result<VoltageSolution> {
    let target = &scenario.target;
    if factors.n_ions() != target.weights.len() {
        return Err(Error::Dimension {
            what: "distance-factor rows",
            expected: target.weights.len(),
            found: factors.n_ions(),
        });
    }
    let k = scenario.laser.k;
    let d = scenario.geometry.d;
    let v = scenario.drive.amplitude;
    let rhs_scale = target.kappa / (k * d);
    let rhs: Vec<f64> = target.weights.iter().map(|w| rhs_scale * w).collect();

    let (scaled, diagnostics) = if factors.m.is_square() {
        solve_square(&factors.m, &rhs)?
    } else {
        solve_min_norm(&factors.m, &rhs)?
    };
    let voltages: Vec<f64> = scaled.iter().map(|s| s * v).collect();
    let achieved_kappa = forward_kappa(factors, &voltages, k, d, v);
    let peak_abs_voltage = voltages.iter().fold(0.0, |m: f64, u| m.max(u.abs()));
    Ok(VoltageSolution {
        scaled_voltages: scaled,
        voltages,
        peak_abs_voltage,
        diagnostics,
        achieved_kappa,
        target_kappa: target.kappa_targets(),
    })
}

/// `kappa_i = (k d / V) sum_j m_ij U_j`.
pub fn forward_kappa(
    factors: &DistanceFactorMatrix,
    voltages: &[f64],
    k: f64,
    d: f64,
    rf_amplitude: f64,
) -> Vec<f64> {
    let scale = k * d / rf_amplitude;
    (0..factors.n_ions())
        .map(|i| scale * dot2(factors.m.row(i), voltages))
        .collect()
}

/// Pushes ions `l1` and `l2` (1-based) off the node with equal index.
pub fn solve_pair(scenario: &Scenario, l1: usize, l2: usize) -> Result<VoltageSolution> {
    let n = scenario.geometry.n_ions;
    check_ion_index(l1, n)?;
    check_ion_index(l2, n)?;
    if l1 == l2 {
        return Err(Error::InvalidArgument(format!(
            "pair addressing needs two distinct ions, got {l1} twice"
        )));
    }
    let mut w = vec![0.0; n];
    w[l1 - 1] = 1.0;
    w[l2 - 1] = 1.0;
    solve_weighted(scenario, &w)
}

/// Per-ion target `kappa_i = kappa * weights[i]`.
pub fn solve_weighted(scenario: &Scenario, weights: &[f64]) -> Result<VoltageSolution> {
    if weights.len() != scenario.geometry.n_ions {
        return Err(Error::Dimension {
            what: "target weights",
            expected: scenario.geometry.n_ions,
            found: weights.len(),
        });
    }
    let target = ModulationTarget::new(weights.to_vec(), scenario.target.kappa)?;
    solve_addressing(&scenario.with_target(target)?)
}

/// Parameter swept by [`conditioning_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Values of `r / d`; `d`, `kappa`, `k` and the target stay fixed.
    Ratio(Vec<f64>),
    /// Ion counts, each solved on a square geometry addressing the centre
    /// ion `(N + 1) / 2` (integer division).
    IonCount(Vec<usize>),
}

impl Sweep {
    /// Parses `ratio=2,5,10`, `n=3,10,51`, `n=3..51` or `n=3..51:2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |reason: &str| {
            Error::InvalidArgument(format!("invalid sweep spec `{spec}`: {reason}"))
        };
        let (key, values) = spec
            .split_once('=')
            .ok_or_else(|| bad("expected `ratio=...` or `n=...`"))?;
        match key.trim() {
            "ratio" => {
                let ratios = values
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("ratios must be numbers"))?;
                if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return Err(bad("ratios must be positive"));
                }
                Ok(Sweep::Ratio(ratios))
            }
            "n" => {
                let values = values.trim();
                let counts = if let Some((lo, rest)) = values.split_once("..") {
                    let (hi, step) = match rest.split_once(':') {
                        Some((hi, step)) => (hi, step),
                        None => (rest, "1"),
                    };
                    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad range"));
                    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
                    if step == 0 || lo > hi {
                        return Err(bad("range must be increasing with a positive step"));
                    }
                    (lo..=hi).step_by(step).collect()
                } else {
                    values
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| bad("ion counts must be positive integers"))?
                };
                if counts.contains(&0) {
                    return Err(bad("ion counts must be >= 1"));
                }
                Ok(Sweep::IonCount(counts))
            }
            other => Err(bad(&format!("unknown sweep parameter `{other}`"))),
        }
    }

    fn params(&self) -> Vec<f64> {
        match self {
            Sweep::Ratio(r) => r.clone(),
            Sweep::IonCount(n) => n.iter().map(|&n| n as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub peak_scaled_voltage: f64,
    pub peak_voltage: f64,
    pub condition_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub outcome: Result<SweepPoint>,
}

/// Re-solves the scenario for each swept value.
///
/// Rows are independent and evaluated in parallel; output order follows
/// the input order. A failing row records its error and does not stop
/// the sweep.
pub fn conditioning_sweep(scenario: &Scenario, sweep: &Sweep) -> Vec<SweepRow> {
    let params = sweep.params();
    params
        .par_iter()
        .map(|&param| SweepRow {
            param,
            outcome: sweep_point(scenario, sweep, param),
        })
        .collect()
}

fn sweep_point(scenario: &Scenario, sweep: &Sweep, param: f64) -> Result<SweepPoint> {
    let g = scenario.geometry;
    let swept = match sweep {
        Sweep::Ratio(_) => {
            let geometry = TrapGeometry::new(param * g.d, g.d, g.n_ions, g.n_sections)?;
            scenario.with_geometry(geometry, scenario.target.clone())?
        }
        Sweep::IonCount(_) => {
            let n = param as usize;
            let geometry = TrapGeometry::uniform(g.r, g.d, n)?;
            let target = ModulationTarget::single(n, n.div_ceil(2), scenario.target.kappa)?;
            scenario.with_geometry(geometry, target)?
        }
    };
    let solution = solve_addressing(&swept)?;
    Ok(SweepPoint {
        peak_scaled_voltage: solution.peak_abs_scaled(),
        peak_voltage: solution.peak_abs_voltage,
        condition_estimate: solution.diagnostics.condition_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kappa_gives_zero_voltages() {
        let s = Scenario::reference_three_ion();
        let zero = s
            .with_target(ModulationTarget::single(3, 2, 0.0).unwrap())
            .unwrap();
        let sol = solve_addressing(&zero).unwrap();
        assert!(sol.voltages.iter().all(|&u| u == 0.0));
        assert_eq!(sol.peak_abs_voltage, 0.0);
    }

    #[test]
    fn pair_argument_checks() {
        let s = Scenario::reference_three_ion();
        assert!(solve_pair(&s, 1, 1).is_err());
        assert!(solve_pair(&s, 0, 2).is_err());
        assert!(solve_pair(&s, 1, 4).is_err());
        assert!(solve_weighted(&s, &[1.0, 0.0]).is_err());
        assert!(solve_weighted(&s, &[0.0; 3]).is_err());
    }

    #[test]
    fn pair_is_mirror_symmetric() {
        let s = Scenario::reference_three_ion();
        let sol = solve_pair(&s, 1, 3).unwrap();
        let v = &sol.scaled_voltages;
        assert!((v[0] - v[2]).abs() <= 1e-12 * v[0].abs());
    }

    #[test]
    fn extra_sections_use_minimum_norm() {
        let s = Scenario::reference_three_ion();
        let g = TrapGeometry::new(15e-6, 3e-6, 3, 5).unwrap();
        let wide = s.with_geometry(g, s.target.clone()).unwrap();
        let sol = solve_addressing(&wide).unwrap();
        assert_eq!(sol.voltages.len(), 5);
        assert!(sol.kappa_error() <= 1e-10 * 0.2);
        // the two extra sections let the peak drop below the square solve
        let square = solve_addressing(&s).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        assert!(norm(&sol.scaled_voltages) < norm(&square.scaled_voltages));
    }

    #[test]
    fn sweep_specs() {
        assert_eq!(
            Sweep::parse("ratio=2,5,10").unwrap(),
            Sweep::Ratio(vec![2.0, 5.0, 10.0])
        );
        assert_eq!(Sweep::parse("n=3..7:2").unwrap(), Sweep::IonCount(vec![3, 5, 7]));
        assert_eq!(Sweep::parse("n=3..5").unwrap(), Sweep::IonCount(vec![3, 4, 5]));
        assert_eq!(Sweep::parse("n=3,10").unwrap(), Sweep::IonCount(vec![3, 10]));
        for bad in ["ratio=", "ratio=-1", "n=0", "n=5..3", "n=3..9:0", "x=1", "ratio"] {
            assert!(Sweep::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn failing_rows_do_not_abort() {
        let s = Scenario::reference_three_ion();
        // r/d = 0.5 puts r = 1.5 µm and q far above the stability limit
        let rows = conditioning_sweep(&s, &Sweep::Ratio(vec![0.5, 5.0]));
        assert!(matches!(
            rows[0].outcome,
            Err(Error::PseudopotentialInvalid { .. })
        ));
        assert!(rows[1].outcome.is_ok());
        assert_eq!(rows[1].param, 5.0);
    }
}
