//! Pick the modulation index for a desired sideband-to-carrier ratio, then solve.

use ionaddr::addressing::solve_addressing;
use ionaddr::micromotion::{kappa_for_ratio, rabi_ratio};
use ionaddr::model::{ModulationTarget, Scenario};

fn main() -> ionaddr::Result<()> {
    let base = Scenario::reference(10, 5);
    for ratio in [0.05, 0.1, 0.2, 0.4] {
        let kappa = kappa_for_ratio(ratio)?;
        let s = base.with_target(ModulationTarget::single(10, 5, kappa)?)?;
        let sol = solve_addressing(&s)?;
        println!(
            "ratio {ratio:.2}: kappa = {kappa:.6} (J1 = {:.6}), peak U = {:.3} V",
            rabi_ratio(kappa)?,
            sol.peak_abs_voltage
        );
    }
    Ok(())
}
