//! Equilibrium positions of a Coulomb string and how uneven its spacing is.

use ionaddr::equilibrium::{equilibrium_positions, length_scale, spacing_of};
use ionaddr::model::IonSpecies;

fn main() -> ionaddr::Result<()> {
    let l = length_scale(&IonSpecies::beryllium9(), 2.0 * std::f64::consts::PI * 2e6);
    println!("length scale for Be+ at 2 MHz: {:.3} um", l * 1e6);
    for n in [2, 3, 10, 51] {
        let s = equilibrium_positions(n)?;
        let spacing = spacing_of(&s);
        println!(
            "N = {n:2}: outer ion at {:.5}, {} Newton steps, gradient {:.1e}, max gap deviation {:.3}",
            s.scaled_positions[n - 1],
            s.iterations,
            s.gradient_norm,
            spacing.max_deviation
        );
    }
    Ok(())
}
