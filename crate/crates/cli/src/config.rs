//! JSON configuration files.

use std::f64::consts::PI;
use std::path::Path;

use gawqed::{GiantAtom, SymmetricConfig, SystemConfig, Topology};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
    /// Phase in units of π.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_pi: Option<f64>,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub points: Vec<PointSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub alpha_sq: f64,
    #[serde(default)]
    pub detuning: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetricSpec {
    pub topology: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_pi: Option<f64>,
    #[serde(default = "unit")]
    pub gamma: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomSpec>>,
    #[serde(default)]
    pub delta_ab: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_unit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<SymmetricSpec>,
}

/// A validated configuration.
#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub system: SystemConfig,
    /// Set when the file used the symmetric shortcut.
    pub symmetric: Option<SymmetricConfig>,
    pub drive: Option<DriveConfig>,
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn either(value: Option<f64>, in_pi: Option<f64>, what: &str) -> Result<f64, CliError> {
    match (value, in_pi) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => Ok(v * PI),
        (Some(_), Some(_)) => Err(schema(format!("{what}: give either the value or its _pi form, not both"))),
        (None, None) => Err(schema(format!("{what}: missing"))),
    }
}

fn finite(x: f64, what: &str) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(schema(format!("{what} must be finite, got {x}")))
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<Setup, CliError> {
        let delta_ab = finite(self.delta_ab, "delta_ab")?;
        if let Some(d) = &self.drive {
            if !(d.alpha_sq.is_finite() && d.alpha_sq >= 0.0) {
                return Err(schema(format!("drive.alpha_sq must be finite and non-negative, got {}", d.alpha_sq)));
            }
            finite(d.detuning, "drive.detuning")?;
        }
        let (system, symmetric) = match (&self.atoms, &self.symmetric) {
            (Some(_), Some(_)) => return Err(schema("give either atoms or symmetric, not both")),
            (None, None) => return Err(schema("missing atoms (or the symmetric shortcut)")),
            (None, Some(s)) => {
                let sym = s.expand_spec()?;
                let system = sym.expand_with(delta_ab).map_err(|e| schema(e.to_string()))?;
                (system, Some(sym))
            }
            (Some(atoms), None) => (explicit(atoms, delta_ab)?, None),
        };
        let system = match self.rate_unit {
            Some(u) => system.with_rate_unit(u).map_err(|e| schema(e.to_string()))?,
            None => system,
        };
        Ok(Setup {
            system,
            symmetric,
            drive: self.drive,
        })
    }
}

impl SymmetricSpec {
    pub fn expand_spec(&self) -> Result<SymmetricConfig, CliError> {
        let topology: Topology = self
            .topology
            .parse()
            .map_err(|_| schema(format!("symmetric.topology: unknown topology {:?}", self.topology)))?;
        let phi = finite(either(self.phi, self.phi_pi, "symmetric.phi")?, "symmetric.phi")?;
        if phi < 0.0 {
            return Err(schema(format!("symmetric.phi must be non-negative, got {phi}")));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(schema(format!("symmetric.gamma must be finite and positive, got {}", self.gamma)));
        }
        Ok(SymmetricConfig::new(topology, phi, self.gamma))
    }
}

fn explicit(atoms: &[AtomSpec], delta_ab: f64) -> Result<SystemConfig, CliError> {
    if atoms.len() != 2 {
        return Err(schema(format!("atoms: expected exactly two entries, got {}", atoms.len())));
    }
    let mut built = Vec::with_capacity(2);
    for (label, atom) in ["a", "b"].iter().zip(atoms) {
        if atom.points.len() != 2 {
            return Err(schema(format!("atom {label}: expected two points, got {}", atom.points.len())));
        }
        let mut pts = [(0.0, 0.0); 2];
        for (k, p) in atom.points.iter().enumerate() {
            let what = format!("atom {label} point {}", k + 1);
            let phase = finite(either(p.phase, p.phase_pi, &format!("{what} phase"))?, &format!("{what} phase"))?;
            pts[k] = (phase, p.rate);
        }
        built.push(GiantAtom::from_pairs(pts[0], pts[1]));
    }
    SystemConfig::new(built[0], built[1], delta_ab).map_err(|e| schema(e.to_string()))
}

/// Explicit four-point geometry of a symmetric shortcut, as it would be
/// written in a config file.
pub fn expand_symmetric(topology: Topology, phi: f64, gamma: f64, delta_ab: f64) -> Result<ConfigFile, CliError> {
    let sym = SymmetricConfig::new(topology, phi, gamma);
    let cfg = sym.expand_with(delta_ab).map_err(|e| schema(e.to_string()))?;
    let atom = |a: &GiantAtom| AtomSpec {
        points: a
            .points
            .iter()
            .map(|p| PointSpec {
                phase: Some(p.phase),
                phase_pi: None,
                rate: p.rate,
            })
            .collect(),
    };
    Ok(ConfigFile {
        atoms: Some(vec![atom(&cfg.atom_a), atom(&cfg.atom_b)]),
        delta_ab,
        rate_unit: Some(cfg.rate_unit),
        drive: None,
        symmetric: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_orderings() {
        let phi = 0.3;
        for (t, a, b) in [
            (Topology::Separate, (0.0, phi), (2.0 * phi, 3.0 * phi)),
            (Topology::Braided, (0.0, 2.0 * phi), (phi, 3.0 * phi)),
            (Topology::Nested, (0.0, 3.0 * phi), (phi, 2.0 * phi)),
        ] {
            let f = expand_symmetric(t, phi, 1.0, 0.0).unwrap();
            let atoms = f.atoms.unwrap();
            let ph = |k: usize, j: usize| atoms[k].points[j].phase.unwrap();
            assert_eq!((ph(0, 0), ph(0, 1)), a);
            assert!((ph(1, 0) - b.0).abs() < 1e-15 && (ph(1, 1) - b.1).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            r#"{"delta_ab": 0}"#,
            r#"{"atoms": [{"points": [{"phase": 0, "rate": 1}, {"phase": 1, "rate": 1}]}]}"#,
            r#"{"symmetric": {"topology": "coiled", "phi": 1}}"#,
            r#"{"symmetric": {"topology": "nested", "phi": 1, "phi_pi": 0.3}}"#,
            r#"{"symmetric": {"topology": "nested", "phi": 1}, "extra": 3}"#,
            r#"{"atoms": [{"points": [{"phase": 0, "rate": -1}, {"phase": 1, "rate": 1}]},
                          {"points": [{"phase": 2, "rate": 1}, {"phase": 3, "rate": 1}]}]}"#,
        ] {
            let r = ConfigFile::from_json(text).and_then(|c| c.validate());
            assert!(matches!(r, Err(CliError::Schema(_))), "{text}");
        }
    }

    #[test]
    fn phase_in_units_of_pi() {
        let text = r#"{"atoms": [{"points": [{"phase_pi": 0, "rate": 1}, {"phase_pi": 0.5, "rate": 1}]},
                                 {"points": [{"phase_pi": 1, "rate": 1}, {"phase_pi": 1.5, "rate": 1}]}],
                       "delta_ab": 0.2}"#;
        let setup = ConfigFile::from_json(text).unwrap().validate().unwrap();
        assert!((setup.system.atom_b.points[1].phase - 1.5 * PI).abs() < 1e-15);
        assert_eq!(setup.system.delta_ab, 0.2);
    }
}
