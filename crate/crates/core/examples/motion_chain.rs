//! Field -> displacement -> micromotion -> modulation index -> sideband ratio.

use ionaddr::addressing::solve_addressing;
use ionaddr::micromotion::motion_report;
use ionaddr::model::Scenario;

fn main() -> ionaddr::Result<()> {
    let s = Scenario::reference_three_ion();
    let sol = solve_addressing(&s)?;
    let report = motion_report(&s, &sol)?;
    println!("q = {:.5}", report.q);
    for m in &report.ions {
        println!(
            "ion {}  E = {:+9.4} V/m  y = {:+8.3} nm  xi = {:+7.4} nm  kappa = {:+.6}  J1 = {:+.6}",
            m.ion,
            m.e_perp,
            m.displacement_y * 1e9,
            m.micromotion_amp * 1e9,
            m.kappa,
            m.rabi_ratio
        );
    }
    Ok(())
}
