mod common;

use common::max_relative_diff;
use ionaddr::addressing::solve_addressing;
use ionaddr::equilibrium::{exact_ion_positions, solve_with_exact_positions, spacing_deviation};
use ionaddr::fields::perpendicular_field_at;
use ionaddr::model::Scenario;

#[test]
fn three_ions_sit_on_the_uniform_grid() {
    let s = Scenario::reference_three_ion();
    let z = exact_ion_positions(&s).unwrap();
    for (i, zi) in z.iter().enumerate() {
        assert!((zi - s.geometry.ion_z(i + 1)).abs() < 1e-10 * s.geometry.d);
    }
    let uniform = solve_addressing(&s).unwrap();
    let exact = solve_with_exact_positions(&s).unwrap();
    assert!(max_relative_diff(&uniform.scaled_voltages, &exact.scaled_voltages) < 1e-10);
}

#[test]
fn ten_ions_at_exact_positions_stay_selective() {
    let s = Scenario::reference(10, 5);
    let z = exact_ion_positions(&s).unwrap();
    let sol = solve_with_exact_positions(&s).unwrap();
    let fields: Vec<f64> = z
        .iter()
        .map(|&zi| perpendicular_field_at(&s.geometry, &sol.voltages, zi).unwrap())
        .collect();
    let addressed = fields[4].abs();
    for (i, e) in fields.iter().enumerate() {
        if i != 4 {
            assert!(e.abs() < 1e-9 * addressed, "ion {}: {e}", i + 1);
        }
    }
    for (i, k) in sol.achieved_kappa.iter().enumerate() {
        let want = if i == 4 { 0.2 } else { 0.0 };
        assert!((k - want).abs() < 1e-10 * 0.2);
    }
    // the non-uniform string needs a different voltage pattern
    let uniform = solve_addressing(&s).unwrap();
    assert!((uniform.peak_abs_scaled() - sol.peak_abs_scaled()).abs() > 1e-3 * uniform.peak_abs_scaled());
}

#[test]
fn rectangular_geometry_is_rejected() {
    let s = Scenario::reference(3, 2);
    let g = ionaddr::model::TrapGeometry::new(s.geometry.r, s.geometry.d, 3, 5).unwrap();
    let s = s.with_geometry(g, s.target.clone()).unwrap();
    assert!(matches!(
        solve_with_exact_positions(&s),
        Err(ionaddr::Error::InvalidArgument(_))
    ));
}

#[test]
fn outer_gaps_widen() {
    let ten = spacing_deviation(10).unwrap().normalized_gaps;
    assert_eq!(ten.len(), 9);
    assert!(ten[0] > ten[1] && ten[1] > ten[2] && ten[2] > ten[3]);
    assert!((ten[0] - ten[8]).abs() < 1e-10);

    let long = spacing_deviation(51).unwrap();
    let g = &long.normalized_gaps;
    let mid = g.len() / 2;
    assert!((g[mid] - 1.0).abs() < (g[0] - 1.0).abs());
    assert!((long.max_deviation - (g[0] - 1.0).abs()).abs() < 1e-12);
    assert!(spacing_deviation(2).is_err());
}
