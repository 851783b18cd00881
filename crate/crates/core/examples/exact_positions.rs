//! Uniform-spacing approximation versus ions placed at their true equilibrium.

use ionaddr::addressing::solve_addressing;
use ionaddr::equilibrium::solve_with_exact_positions;
use ionaddr::model::Scenario;

fn main() -> ionaddr::Result<()> {
    for n in [3, 10, 21] {
        let s = Scenario::reference(n, n.div_ceil(2));
        let uniform = solve_addressing(&s)?;
        let exact = solve_with_exact_positions(&s)?;
        println!(
            "N = {n:2}: peak |U/V| uniform {:.4}, exact positions {:.4}",
            uniform.peak_abs_scaled(),
            exact.peak_abs_scaled()
        );
    }
    Ok(())
}
