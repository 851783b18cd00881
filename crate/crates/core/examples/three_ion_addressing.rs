//! Compensation voltages for the three-ion reference trap, centre and edge ion.

use ionaddr::addressing::solve_addressing;
use ionaddr::model::Scenario;

fn main() -> ionaddr::Result<()> {
    for ion in [2, 1] {
        let s = Scenario::reference(3, ion);
        let sol = solve_addressing(&s)?;
        println!("target ion {ion}");
        for (j, (u, v)) in sol.scaled_voltages.iter().zip(&sol.voltages).enumerate() {
            println!("  U{}/V = {u:+.6}   U{} = {v:+.4} V", j + 1, j + 1);
        }
        println!(
            "  peak {:.4} V, condition {:.1}, residual {:.2e}",
            sol.peak_abs_voltage, sol.diagnostics.condition_estimate, sol.diagnostics.residual_inf_norm
        );
    }
    Ok(())
}
