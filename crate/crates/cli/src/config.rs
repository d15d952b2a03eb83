//! Run configuration: flat JSON keys, command-line overrides, eV conversion.

use std::path::{Path, PathBuf};

use ati_core::kinematics::{Atom, LaserField, ELECTRON_REST_ENERGY_EV};
use ati_core::spectra::Mode;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// hbar c in eV m.
const HBAR_C_EV_M: f64 = 1.973_269_804e-7;

pub fn ev_to_natural(ev: f64) -> f64 {
    ev / ELECTRON_REST_ENERGY_EV
}

pub fn natural_to_ev(e: f64) -> f64 {
    e * ELECTRON_REST_ENERGY_EV
}

/// xi = e F0 / (m c omega) for a peak field given in V/cm.
pub fn xi_from_peak_field(v_per_cm: f64, photon_energy_ev: f64) -> f64 {
    let v_per_m = 100.0 * v_per_cm;
    v_per_m * HBAR_C_EV_M / (photon_energy_ev * ELECTRON_REST_ENERGY_EV)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Circular,
    Linear,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Relativistic,
    Nonrelativistic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModeKey {
    On,
    Off,
}

impl From<ModeKey> for Mode {
    fn from(m: ModeKey) -> Mode {
        match m {
            ModeKey::On => Mode::On,
            ModeKey::Off => Mode::Off,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NRange {
    Auto(AutoTag),
    Explicit([i64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub photon_energy_ev: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity_xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_field_v_per_cm: Option<f64>,
    #[serde(default = "default_polarization")]
    pub polarization: Polarization,
    /// Ellipticity for `elliptic`; ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(default = "default_z_a")]
    pub z_a: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding_energy_ev: Option<f64>,
    #[serde(default = "default_theta_points")]
    pub theta_points: usize,
    #[serde(default = "default_phi_points")]
    pub phi_points: usize,
    #[serde(default = "default_n_range")]
    pub n_range: NRange,
    #[serde(default = "default_mode")]
    pub mode: ModeKey,
    // left out of echoed configs so reruns into different directories match
    #[serde(default = "default_output", skip_serializing)]
    pub output_path: PathBuf,
    #[serde(default = "default_formula")]
    pub formula: Formula,
}

fn default_polarization() -> Polarization {
    Polarization::Circular
}
fn default_z_a() -> u32 {
    1
}
fn default_theta_points() -> usize {
    64
}
fn default_phi_points() -> usize {
    1
}
fn default_n_range() -> NRange {
    NRange::Auto(AutoTag::Auto)
}
fn default_mode() -> ModeKey {
    ModeKey::On
}
fn default_output() -> PathBuf {
    PathBuf::from("ati-out")
}
fn default_formula() -> Formula {
    Formula::Relativistic
}

/// Field and atom in internal units.
#[derive(Debug, Clone, Copy)]
pub struct Physical {
    pub field: LaserField,
    pub atom: Atom,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: Map<String, Value>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, overrides).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parse a JSON document and apply flag overrides on top of it.
    pub fn parse(text: &str, overrides: Map<String, Value>) -> Result<Self, CliError> {
        let mut doc: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
        let obj = doc.as_object_mut().ok_or_else(|| CliError::Config("top level must be a JSON object".into()))?;
        for (k, v) in overrides {
            // an intensity flag replaces whichever form the file used
            if k == "intensity_xi" {
                obj.remove("peak_field_v_per_cm");
            } else if k == "peak_field_v_per_cm" {
                obj.remove("intensity_xi");
            }
            obj.insert(k, v);
        }
        let cfg: RunConfig = serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.photon_energy_ev > 0.0 && self.photon_energy_ev.is_finite()) {
            return bad(format!("photon_energy_ev: must be positive, got {}", self.photon_energy_ev));
        }
        match (self.intensity_xi, self.peak_field_v_per_cm) {
            (Some(_), Some(_)) => return bad("intensity_xi and peak_field_v_per_cm are mutually exclusive".into()),
            (None, None) => return bad("one of intensity_xi or peak_field_v_per_cm is required".into()),
            (Some(x), None) | (None, Some(x)) if !(x >= 0.0 && x.is_finite()) => {
                return bad(format!("intensity must be finite and non-negative, got {x}"))
            }
            _ => {}
        }
        if self.theta_points < 8 {
            return bad(format!("theta_points: need at least 8, got {}", self.theta_points));
        }
        if self.phi_points < 1 {
            return bad("phi_points: need at least 1".into());
        }
        if self.z_a < 1 {
            return bad("z_a: must be at least 1".into());
        }
        if let Some(e) = self.binding_energy_ev {
            if !(e > 0.0 && e < ELECTRON_REST_ENERGY_EV) {
                return bad(format!("binding_energy_ev: out of range, got {e}"));
            }
        }
        match (self.polarization, self.zeta) {
            (Polarization::Elliptic, None) => return bad("polarization elliptic needs zeta".into()),
            (Polarization::Elliptic, Some(z)) if !(-1.0..=1.0).contains(&z) => {
                return bad(format!("zeta: must lie in [-1, 1], got {z}"))
            }
            _ => {}
        }
        if let NRange::Explicit([lo, hi]) = self.n_range {
            if lo > hi || lo < 1 {
                return bad(format!("n_range: need 1 <= lo <= hi, got [{lo}, {hi}]"));
            }
        }
        if self.formula != Formula::Relativistic && self.polarization == Polarization::Elliptic {
            return bad("nonrelativistic formulas exist for circular and linear polarization only".into());
        }
        Ok(())
    }

    pub fn xi(&self) -> f64 {
        match (self.intensity_xi, self.peak_field_v_per_cm) {
            (Some(x), _) => x,
            (None, Some(f)) => xi_from_peak_field(f, self.photon_energy_ev),
            (None, None) => 0.0,
        }
    }

    pub fn zeta(&self) -> f64 {
        match self.polarization {
            Polarization::Circular => 1.0,
            Polarization::Linear => 0.0,
            Polarization::Elliptic => self.zeta.unwrap_or(0.0),
        }
    }

    pub fn physical(&self) -> Result<Physical, CliError> {
        let field = LaserField::new(ev_to_natural(self.photon_energy_ev), self.xi(), self.zeta())
            .map_err(|e| CliError::Config(e.to_string()))?;
        let atom = match self.binding_energy_ev {
            Some(e) => Atom::with_binding_energy(self.z_a, ev_to_natural(e)),
            None => Atom::hydrogenic(self.z_a),
        }
        .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Physical { field, atom })
    }
}
