//! How the electrode distance r, relative to the ion spacing, drives up the voltages.

use ionaddr::addressing::{conditioning_sweep, Sweep};
use ionaddr::model::Scenario;

fn main() -> ionaddr::Result<()> {
    let s = Scenario::reference_three_ion();
    // r = 1 d would push q past the stability limit at this drive
    let sweep = Sweep::parse("ratio=1,2,3,5,7,10")?;
    println!("r/d  peak|U/V|   condition");
    for row in conditioning_sweep(&s, &sweep) {
        match row.outcome {
            Ok(p) => println!(
                "{:3}  {:9.4}  {:10.1}",
                row.param, p.peak_scaled_voltage, p.condition_estimate
            ),
            Err(e) => println!("{:3}  {e}", row.param),
        }
    }
    Ok(())
}
