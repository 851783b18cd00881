//! Two ions at once, and an arbitrary weighted pattern.

use ionaddr::addressing::{solve_pair, solve_weighted};
use ionaddr::model::Scenario;

fn main() -> ionaddr::Result<()> {
    let s = Scenario::reference(10, 5);
    let pair = solve_pair(&s, 5, 6)?;
    println!("pair (5, 6): kappa = {:?}", rounded(&pair.achieved_kappa));

    let weights = [0.0, 1.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, -1.0, 0.0];
    let w = solve_weighted(&s, &weights)?;
    println!("weighted:    kappa = {:?}", rounded(&w.achieved_kappa));
    println!("peak voltages {:.3} V and {:.3} V", pair.peak_abs_voltage, w.peak_abs_voltage);
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e6).round() / 1e6 + 0.0).collect()
}
