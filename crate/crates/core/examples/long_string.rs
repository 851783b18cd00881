//! Peak voltage growth with string length, up to 51 ions addressing the centre.

use ionaddr::addressing::{conditioning_sweep, Sweep};
use ionaddr::model::Scenario;

fn main() {
    let s = Scenario::reference(3, 2);
    let sweep = Sweep::IonCount((3..=51).step_by(4).collect());
    for row in conditioning_sweep(&s, &sweep) {
        match row.outcome {
            Ok(p) => println!(
                "N = {:2}  peak |U/V| = {:8.4}  peak U = {:8.3} V  cond = {:.3e}",
                row.param, p.peak_scaled_voltage, p.peak_voltage, p.condition_estimate
            ),
            Err(e) => println!("N = {:2}  {e}", row.param),
        }
    }
}
