//! Field profile along ten ions with ion 5 addressed: nodes at the other nine.

use ionaddr::addressing::solve_addressing;
use ionaddr::fields::{perpendicular_field_at_ions, perpendicular_field_profile};
use ionaddr::model::Scenario;

fn main() -> ionaddr::Result<()> {
    let s = Scenario::reference(10, 5);
    let g = &s.geometry;
    let sol = solve_addressing(&s)?;
    let profile = perpendicular_field_profile(g, &sol.voltages, 0.5 * g.d, 10.5 * g.d, 2000)?;
    let at_ions = perpendicular_field_at_ions(g, &sol.voltages)?;
    for (i, e) in at_ions.iter().enumerate() {
        println!("ion {:2}  z = {:5.1} um  E = {e:+.3e} V/m", i + 1, g.ion_z(i + 1) * 1e6);
    }
    println!("max |E| on the axis: {:.2} V/m", profile.max_abs());
    let zeros: Vec<String> = profile
        .zero_crossings()
        .iter()
        .map(|z| format!("{:.2}", z / g.d))
        .collect();
    println!("zero crossings (units of d): {}", zeros.join(" "));
    Ok(())
}
