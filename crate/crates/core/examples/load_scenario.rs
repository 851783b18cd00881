//! Load a scenario file and write the CSV and JSON reports the CLI produces.

use ionaddr::addressing::solve_addressing;
use ionaddr::model::load_scenario;
use ionaddr::report::{voltage_csv, voltage_json};

fn main() -> ionaddr::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/be_10ion.toml").into());
    let s = load_scenario(&std::fs::read_to_string(path)?)?;
    let sol = solve_addressing(&s)?;
    print!("{}", voltage_csv(&sol));
    println!("{}", voltage_json(&s, &sol, "solve"));
    Ok(())
}
