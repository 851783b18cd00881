//! Validated scenario types and the lab-unit configuration format.
//!
//! Configuration files are flat TOML key/value tables in lab units
//! (amu, elementary charges, volts, MHz, µm, nm). Everything is converted
//! to SI on ingestion and type invariants are checked once, here; the rest
//! of the crate assumes a valid [`Scenario`].
//!
//! | key              | unit | constraint                         |
//! |------------------|------|------------------------------------|
//! | `mass_amu`       | u    | > 0                                |
//! | `charge_e`       | e    | integer >= 1                       |
//! | `rf_amplitude_V` | V    | > 0                                |
//! | `rf_freq_MHz`    | MHz  | > 0, `Omega_rf = 2 pi f`           |
//! | `r_um`           | µm   | > 0                                |
//! | `d_um`           | µm   | > 0                                |
//! | `n_ions`         |      | integer >= 1                       |
//! | `n_sections`     |      | integer >= `n_ions`                |
//! | `wavelength_nm`  | nm   | > 0, `k = 2 pi / lambda`           |
//! | `kappa`          |      | >= 0                               |
//! | `target`         |      | `"2"`, `"1,3"` or `"1:1.0,2:0.5"`  |
//! | `axial_freq_MHz` | MHz  | optional, > 0                      |

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::{Error, Result};

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Upper bound on the Mathieu `q` parameter accepted by scenario validation.
///
/// Slightly inside the `q ~ 0.908` edge of the lowest stability region.
pub const MAX_Q: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IonSpecies {
    /// kg
    pub mass: f64,
    /// C
    pub charge: f64,
}

impl IonSpecies {
    pub fn new(mass: f64, charge: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("charge", charge)?;
        Ok(Self { mass, charge })
    }

    /// Species from lab units: atomic mass units and a charge state.
    pub fn from_lab(mass_amu: f64, charge_e: u32) -> Result<Self> {
        positive("mass_amu", mass_amu)?;
        if charge_e == 0 {
            return Err(invalid("charge_e", 0, "must be a positive integer"));
        }
        Ok(Self {
            mass: mass_amu * ATOMIC_MASS_UNIT,
            charge: f64::from(charge_e) * ELEMENTARY_CHARGE,
        })
    }

    /// ⁹Be⁺
    pub fn beryllium9() -> Self {
        Self::from_lab(9.012, 1).expect("valid species")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RfDrive {
    /// rf amplitude `V`, volts.
    pub amplitude: f64,
    /// rf angular frequency `Omega_rf`, rad/s.
    pub omega: f64,
}

impl RfDrive {
    pub fn new(amplitude: f64, omega: f64) -> Result<Self> {
        positive("rf amplitude", amplitude)?;
        positive("rf angular frequency", omega)?;
        Ok(Self { amplitude, omega })
    }

    pub fn from_lab(amplitude_v: f64, freq_mhz: f64) -> Result<Self> {
        positive("rf_amplitude_V", amplitude_v)?;
        positive("rf_freq_MHz", freq_mhz)?;
        Ok(Self {
            amplitude: amplitude_v,
            omega: 2.0 * PI * freq_mhz * 1e6,
        })
    }
}

/// Segmented-rod geometry. Ion `i` and electrode `j` (1-based) sit at axial
/// coordinates `i d` and `j d`, so ion `i` faces electrode `i` directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapGeometry {
    /// Ion-to-electrode distance, m.
    pub r: f64,
    /// Section length and ion spacing, m.
    pub d: f64,
    pub n_sections: usize,
    pub n_ions: usize,
}

impl TrapGeometry {
    pub fn new(r: f64, d: f64, n_ions: usize, n_sections: usize) -> Result<Self> {
        positive("r", r)?;
        positive("d", d)?;
        if n_ions == 0 {
            return Err(invalid("n_ions", 0, "must be at least 1"));
        }
        if n_sections < n_ions {
            return Err(Error::SectionsBelowIons { n_sections, n_ions });
        }
        Ok(Self {
            r,
            d,
            n_sections,
            n_ions,
        })
    }

    /// Square geometry with one section per ion.
    pub fn uniform(r: f64, d: f64, n: usize) -> Result<Self> {
        Self::new(r, d, n, n)
    }

    /// Axial coordinate of ion `i` (1-based), m.
    pub fn ion_z(&self, i: usize) -> f64 {
        i as f64 * self.d
    }

    /// Axial coordinate of electrode `j` (1-based), m.
    pub fn electrode_z(&self, j: usize) -> f64 {
        j as f64 * self.d
    }

    pub fn ion_positions(&self) -> Vec<f64> {
        (1..=self.n_ions).map(|i| self.ion_z(i)).collect()
    }

    /// Axial midpoint of the ion string.
    pub fn string_center(&self) -> f64 {
        0.5 * (self.n_ions as f64 + 1.0) * self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaserCoupling {
    /// Wavevector magnitude along the displacement direction, rad/m.
    pub k: f64,
}

impl LaserCoupling {
    pub fn new(k: f64) -> Result<Self> {
        positive("k", k)?;
        Ok(Self { k })
    }

    pub fn from_wavelength(lambda: f64) -> Result<Self> {
        Ok(Self {
            k: wavevector_from_wavelength(lambda)?,
        })
    }
}

/// `k = 2 pi / lambda`.
pub fn wavevector_from_wavelength(lambda: f64) -> Result<f64> {
    positive("wavelength", lambda)?;
    Ok(2.0 * PI / lambda)
}

/// Requested modulation pattern: ion `i` should see `kappa * weights[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulationTarget {
    pub weights: Vec<f64>,
    pub kappa: f64,
}

impl ModulationTarget {
    pub fn new(weights: Vec<f64>, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid("kappa", kappa, "must be finite and >= 0"));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
            return Err(invalid("target", w, "weights must be finite"));
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidTarget {
                spec: format!("{weights:?}"),
                reason: "at least one weight must be nonzero".into(),
            });
        }
        Ok(Self { weights, kappa })
    }

    /// Addresses only `ion` (1-based) among `n_ions`.
    pub fn single(n_ions: usize, ion: usize, kappa: f64) -> Result<Self> {
        check_ion_index(ion, n_ions)?;
        let mut w = vec![0.0; n_ions];
        w[ion - 1] = 1.0;
        Self::new(w, kappa)
    }

    /// Parses a target spec against `n_ions`.
    ///
    /// Items are comma separated; each is an ion index (weight 1) or an
    /// `index:weight` pair. Indices are 1-based and may not repeat.
    pub fn parse(spec: &str, n_ions: usize, kappa: f64) -> Result<Self> {
        let bad = |reason: String| Error::InvalidTarget {
            spec: spec.to_string(),
            reason,
        };
        let mut weights = vec![0.0; n_ions];
        let mut seen = vec![false; n_ions];
        let items: Vec<&str> = spec.split(',').map(str::trim).collect();
        if items.iter().any(|s| s.is_empty()) {
            return Err(bad("empty item".into()));
        }
        for item in items {
            let (idx, weight) = match item.split_once(':') {
                Some((i, w)) => (
                    i.trim(),
                    w.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(format!("weight `{w}` is not a number")))?,
                ),
                None => (item, 1.0),
            };
            let ion: usize = idx
                .parse()
                .map_err(|_| bad(format!("ion index `{idx}` is not a positive integer")))?;
            if ion == 0 || ion > n_ions {
                return Err(bad(format!("ion index {ion} outside 1..={n_ions}")));
            }
            if seen[ion - 1] {
                return Err(bad(format!("ion index {ion} given twice")));
            }
            seen[ion - 1] = true;
            weights[ion - 1] = weight;
        }
        Self::new(weights, kappa).map_err(|e| match e {
            Error::InvalidTarget { reason, .. } => bad(reason),
            other => other,
        })
    }

    /// Canonical spec string: plain indices when all weights are one.
    pub fn to_spec(&self) -> String {
        let nonzero: Vec<(usize, f64)> = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| (i + 1, w))
            .collect();
        let plain = nonzero.iter().all(|&(_, w)| w == 1.0);
        nonzero
            .iter()
            .map(|&(i, w)| if plain { i.to_string() } else { format!("{i}:{w}") })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Right-hand-side pattern `kappa * weights`.
    pub fn kappa_targets(&self) -> Vec<f64> {
        self.weights.iter().map(|w| self.kappa * w).collect()
    }
}

pub(crate) fn check_ion_index(ion: usize, n_ions: usize) -> Result<()> {
    if ion == 0 || ion > n_ions {
        return Err(Error::InvalidArgument(format!(
            "ion index {ion} outside 1..={n_ions}"
        )));
    }
    Ok(())
}

/// Complete, validated problem statement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub species: IonSpecies,
    pub drive: RfDrive,
    pub geometry: TrapGeometry,
    pub laser: LaserCoupling,
    pub target: ModulationTarget,
    /// Axial secular angular frequency `omega_z`, rad/s.
    pub axial_secular_freq: Option<f64>,
}

impl Scenario {
    /// Assembles a scenario and checks the cross-field invariants.
    pub fn new(
        species: IonSpecies,
        drive: RfDrive,
        geometry: TrapGeometry,
        laser: LaserCoupling,
        target: ModulationTarget,
        axial_secular_freq: Option<f64>,
    ) -> Result<Self> {
        if target.weights.len() != geometry.n_ions {
            return Err(Error::Dimension {
                what: "target weights",
                expected: geometry.n_ions,
                found: target.weights.len(),
            });
        }
        if let Some(w) = axial_secular_freq {
            positive("axial_freq", w)?;
        }
        let s = Self {
            species,
            drive,
            geometry,
            laser,
            target,
            axial_secular_freq,
        };
        let q = s.q_parameter();
        if !(q < MAX_Q) {
            return Err(Error::PseudopotentialInvalid { q, limit: MAX_Q });
        }
        Ok(s)
    }

    /// Mathieu parameter `q = 2 Q V / (m r^2 Omega_rf^2)`.
    pub fn q_parameter(&self) -> f64 {
        2.0 * self.species.charge * self.drive.amplitude
            / (self.species.mass
                * self.geometry.r
                * self.geometry.r
                * self.drive.omega
                * self.drive.omega)
    }

    /// The three-ion ⁹Be⁺ case centred on ion 2: V = 2.5 V, 246 MHz drive,
    /// r = 15 µm, d = 3 µm, 313 nm light and kappa = 0.2.
    pub fn reference_three_ion() -> Self {
        Self::reference(3, 2)
    }

    /// The reference trap with `n` ions and sections, addressing `ion`.
    pub fn reference(n: usize, ion: usize) -> Self {
        Self::new(
            IonSpecies::beryllium9(),
            RfDrive::from_lab(2.5, 246.0).expect("valid drive"),
            TrapGeometry::uniform(15e-6, 3e-6, n).expect("valid geometry"),
            LaserCoupling::from_wavelength(313e-9).expect("valid wavelength"),
            ModulationTarget::single(n, ion, 0.2).expect("valid target"),
            None,
        )
        .expect("reference scenario is valid")
    }

    /// Same scenario with a different target.
    pub fn with_target(&self, target: ModulationTarget) -> Result<Self> {
        Self::new(
            self.species,
            self.drive,
            self.geometry,
            self.laser,
            target,
            self.axial_secular_freq,
        )
    }

    pub fn with_geometry(&self, geometry: TrapGeometry, target: ModulationTarget) -> Result<Self> {
        Self::new(
            self.species,
            self.drive,
            geometry,
            self.laser,
            target,
            self.axial_secular_freq,
        )
    }

    /// Re-emits the scenario as configuration text in lab units.
    pub fn to_config_text(&self) -> String {
        let c = self.lab_config();
        let mut out = String::new();
        let _ = writeln!(out, "mass_amu = {:?}", c.mass_amu);
        let _ = writeln!(out, "charge_e = {}", c.charge_e);
        let _ = writeln!(out, "rf_amplitude_V = {:?}", c.rf_amplitude_v);
        let _ = writeln!(out, "rf_freq_MHz = {:?}", c.rf_freq_mhz);
        let _ = writeln!(out, "r_um = {:?}", c.r_um);
        let _ = writeln!(out, "d_um = {:?}", c.d_um);
        let _ = writeln!(out, "n_ions = {}", c.n_ions);
        let _ = writeln!(out, "n_sections = {}", c.n_sections);
        let _ = writeln!(out, "wavelength_nm = {:?}", c.wavelength_nm);
        let _ = writeln!(out, "kappa = {:?}", c.kappa);
        let _ = writeln!(out, "target = \"{}\"", c.target);
        if let Some(f) = c.axial_freq_mhz {
            let _ = writeln!(out, "axial_freq_MHz = {f:?}");
        }
        out
    }

    /// The scenario expressed in the configuration's lab units.
    pub fn lab_config(&self) -> LabConfig {
        LabConfig {
            mass_amu: self.species.mass / ATOMIC_MASS_UNIT,
            charge_e: (self.species.charge / ELEMENTARY_CHARGE).round() as u32,
            rf_amplitude_v: self.drive.amplitude,
            rf_freq_mhz: self.drive.omega / (2.0 * PI) / 1e6,
            r_um: self.geometry.r * 1e6,
            d_um: self.geometry.d * 1e6,
            n_ions: self.geometry.n_ions,
            n_sections: self.geometry.n_sections,
            wavelength_nm: 2.0 * PI / self.laser.k * 1e9,
            kappa: self.target.kappa,
            target: self.target.to_spec(),
            axial_freq_mhz: self.axial_secular_freq.map(|w| w / (2.0 * PI) / 1e6),
            q: self.q_parameter(),
        }
    }
}

/// Lab-unit echo of a scenario, embedded in JSON reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabConfig {
    pub mass_amu: f64,
    pub charge_e: u32,
    #[serde(rename = "rf_amplitude_V")]
    pub rf_amplitude_v: f64,
    #[serde(rename = "rf_freq_MHz")]
    pub rf_freq_mhz: f64,
    pub r_um: f64,
    pub d_um: f64,
    pub n_ions: usize,
    pub n_sections: usize,
    pub wavelength_nm: f64,
    pub kappa: f64,
    pub target: String,
    #[serde(rename = "axial_freq_MHz", skip_serializing_if = "Option::is_none")]
    pub axial_freq_mhz: Option<f64>,
    pub q: f64,
}

const KNOWN_KEYS: [&str; 12] = [
    "mass_amu",
    "charge_e",
    "rf_amplitude_V",
    "rf_freq_MHz",
    "r_um",
    "d_um",
    "n_ions",
    "n_sections",
    "wavelength_nm",
    "kappa",
    "target",
    "axial_freq_MHz",
];

/// Parses and validates a scenario configuration.
pub fn load_scenario(config_text: &str) -> Result<Scenario> {
    let table: toml::Table = config_text
        .parse()
        .map_err(|e: toml::de::Error| Error::Syntax(e.message().to_string()))?;
    if let Some(key) = table.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(Error::UnknownKey(key.clone()));
    }
    let cfg = Keys(&table);

    let species = IonSpecies::from_lab(cfg.positive("mass_amu")?, cfg.count("charge_e", 1)? as u32)?;
    let drive = RfDrive::from_lab(cfg.positive("rf_amplitude_V")?, cfg.positive("rf_freq_MHz")?)?;
    let n_ions = cfg.count("n_ions", 1)?;
    let n_sections = cfg.count("n_sections", 1)?;
    let geometry = TrapGeometry::new(
        cfg.positive("r_um")? / 1e6,
        cfg.positive("d_um")? / 1e6,
        n_ions,
        n_sections,
    )?;
    let laser = LaserCoupling::from_wavelength(cfg.positive("wavelength_nm")? / 1e9)?;
    let kappa = cfg.number("kappa")?;
    if !(kappa >= 0.0) {
        return Err(invalid("kappa", kappa, "must be >= 0"));
    }
    let target_spec = match table.get("target") {
        Some(toml::Value::String(s)) => s.clone(),
        Some(toml::Value::Integer(i)) => i.to_string(),
        Some(other) => return Err(invalid("target", other, "must be a string or ion index")),
        None => return Err(Error::MissingKey("target")),
    };
    let target = ModulationTarget::parse(&target_spec, n_ions, kappa)?;
    let axial = match table.get("axial_freq_MHz") {
        Some(_) => Some(2.0 * PI * cfg.positive("axial_freq_MHz")? * 1e6),
        None => None,
    };
    Scenario::new(species, drive, geometry, laser, target, axial)
}

struct Keys<'a>(&'a toml::Table);

impl Keys<'_> {
    fn number(&self, key: &'static str) -> Result<f64> {
        match self.0.get(key) {
            None => Err(Error::MissingKey(key)),
            Some(toml::Value::Float(v)) => Ok(*v),
            Some(toml::Value::Integer(v)) => Ok(*v as f64),
            Some(other) => Err(invalid(key, other, "expected a number")),
        }
    }

    fn positive(&self, key: &'static str) -> Result<f64> {
        let v = self.number(key)?;
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(key, v, "must be positive"));
        }
        Ok(v)
    }

    fn count(&self, key: &'static str, min: i64) -> Result<usize> {
        match self.0.get(key) {
            None => Err(Error::MissingKey(key)),
            Some(toml::Value::Integer(v)) if *v >= min => Ok(*v as usize),
            Some(toml::Value::Integer(v)) => {
                Err(invalid(key, v, &format!("must be an integer >= {min}")))
            }
            Some(other) => Err(invalid(key, other, "expected an integer")),
        }
    }
}

fn invalid(key: &str, value: impl std::fmt::Display, reason: &str) -> Error {
    Error::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.to_string(),
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(key, v, "must be positive"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const REFERENCE: &str = r#"
mass_amu = 9.012
charge_e = 1
rf_amplitude_V = 2.5
rf_freq_MHz = 246.0
r_um = 15.0
d_um = 3.0
n_ions = 3
n_sections = 3
wavelength_nm = 313.0
kappa = 0.2
target = "2"
"#;

    #[test]
    fn reference_config_loads() {
        let s = load_scenario(REFERENCE).unwrap();
        assert_eq!(s, Scenario::reference_three_ion());
        // q = 2QV / (m r^2 Omega^2) with m = 9.012 u
        assert!((s.q_parameter() - 0.0996).abs() < 5e-5, "{}", s.q_parameter());
        assert_eq!(s.target.weights, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn fewer_sections_than_ions() {
        let text = REFERENCE
            .replace("n_ions = 3", "n_ions = 5")
            .replace("target = \"2\"", "target = \"1\"");
        let err = load_scenario(&text).unwrap_err();
        assert!(err.to_string().contains("n_sections < n_ions"), "{err}");
    }

    #[test]
    fn large_q_rejected() {
        // q scales linearly with V: 0.0996 * 30.1 ~ 3.0 V -> 1.2 needs V ~ 30.1 V
        let text = REFERENCE.replace("rf_amplitude_V = 2.5", "rf_amplitude_V = 30.12");
        let err = load_scenario(&text).unwrap_err();
        match &err {
            Error::PseudopotentialInvalid { q, .. } => assert!((q - 1.2).abs() < 0.01),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("pseudopotential invalid"));
    }

    #[test]
    fn missing_and_bad_keys_are_named() {
        let text = REFERENCE.replace("r_um = 15.0\n", "");
        assert_eq!(load_scenario(&text).unwrap_err(), Error::MissingKey("r_um"));
        let text = REFERENCE.replace("d_um = 3.0", "d_um = -3.0");
        let msg = load_scenario(&text).unwrap_err().to_string();
        assert!(msg.contains("d_um") && msg.contains("-3"), "{msg}");
        let text = format!("{REFERENCE}\nfoo = 1\n");
        assert!(matches!(load_scenario(&text), Err(Error::UnknownKey(_))));
        assert!(matches!(load_scenario("mass_amu = "), Err(Error::Syntax(_))));
    }

    #[test]
    fn target_specs() {
        let t = ModulationTarget::parse("1,3", 3, 0.2).unwrap();
        assert_eq!(t.weights, vec![1.0, 0.0, 1.0]);
        assert_eq!(t.to_spec(), "1,3");
        let t = ModulationTarget::parse("1:1, 2:2.5", 4, 0.2).unwrap();
        assert_eq!(t.weights, vec![1.0, 2.5, 0.0, 0.0]);
        assert_eq!(t.to_spec(), "1:1,2:2.5");
        for bad in ["0", "4", "1,1", "a", "1:x", "", "1,", "2:0"] {
            assert!(ModulationTarget::parse(bad, 3, 0.2).is_err(), "{bad}");
        }
        let integer_target = REFERENCE.replace("target = \"2\"", "target = 2");
        assert!(load_scenario(&integer_target).is_ok());
    }

    #[test]
    fn wavevector() {
        let k = wavevector_from_wavelength(313e-9).unwrap();
        assert!((k - 2.007_40e7).abs() < 1e2);
        assert_eq!(k * 313e-9, 2.0 * PI);
        assert_eq!(wavevector_from_wavelength(626e-9).unwrap(), k / 2.0);
        assert!(wavevector_from_wavelength(0.0).is_err());
        assert!(wavevector_from_wavelength(-1e-9).is_err());
    }

    #[test]
    fn config_round_trip() {
        let s = load_scenario(REFERENCE).unwrap();
        let again = load_scenario(&s.to_config_text()).unwrap();
        let (a, b) = (s.lab_config(), again.lab_config());
        for (x, y) in [
            (a.mass_amu, b.mass_amu),
            (a.rf_freq_mhz, b.rf_freq_mhz),
            (a.r_um, b.r_um),
            (a.wavelength_nm, b.wavelength_nm),
        ] {
            assert!((x - y).abs() <= 1e-12 * x.abs());
        }
        assert!((a.mass_amu - 9.012).abs() < 1e-12 * 9.012);
    }

    #[test]
    fn axial_frequency_is_optional() {
        let s = load_scenario(&format!("{REFERENCE}axial_freq_MHz = 5.0\n")).unwrap();
        assert!((s.axial_secular_freq.unwrap() - 2.0 * PI * 5e6).abs() < 1e-3);
        assert!(load_scenario(&format!("{REFERENCE}axial_freq_MHz = 0\n")).is_err());
    }
}
