//! Measurement-setting construction from planar angle parametrizations, and
//! grouping into the per-party (unprimed, primed) pairs the inequality uses.

use serde::{Deserialize, Serialize};

use crate::error::{GwiError, Result};
use crate::qstate::Observable;

/// Plane in which settings are parametrized by a single angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Plane {
    /// `a = cos(phi) sigma_x + sin(phi) sigma_y`, phi measured from the X axis.
    Xy,
    /// `a = cos(phi) sigma_z + sin(phi) sigma_x`, phi measured from the Z axis.
    Xz,
}

impl Plane {
    pub fn setting(self, phi: f64) -> Result<Observable> {
        match self {
            Plane::Xy => xy_setting(phi),
            Plane::Xz => xz_setting(phi),
        }
    }
}

impl std::str::FromStr for Plane {
    type Err = GwiError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xy" => Ok(Plane::Xy),
            "xz" => Ok(Plane::Xz),
            other => Err(GwiError::Domain(format!("unknown plane '{other}', expected xy or xz"))),
        }
    }
}

/// Bloch vector `(cos phi, sin phi, 0)`.
pub fn xy_setting(phi: f64) -> Result<Observable> {
    if !phi.is_finite() {
        return Err(GwiError::Domain("angle must be finite".into()));
    }
    Observable::new(phi.cos(), phi.sin(), 0.0)
}

/// Bloch vector `(sin phi, 0, cos phi)`.
pub fn xz_setting(phi: f64) -> Result<Observable> {
    if !phi.is_finite() {
        return Err(GwiError::Domain("angle must be finite".into()));
    }
    Observable::new(phi.sin(), 0.0, phi.cos())
}

/// The two dichotomic observables measured by one party.
#[derive(Clone, Copy, Debug)]
pub struct SettingPair {
    pub unprimed: Observable,
    pub primed: Observable,
}

impl SettingPair {
    pub fn get(&self, choice: usize) -> Option<Observable> {
        match choice {
            0 => Some(self.unprimed),
            1 => Some(self.primed),
            _ => None,
        }
    }
}

/// One setting pair per party.
#[derive(Clone, Debug)]
pub struct SettingSet {
    pairs: Vec<SettingPair>,
}

impl SettingSet {
    pub fn new(pairs: Vec<SettingPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(GwiError::Validation("setting set must not be empty".into()));
        }
        Ok(SettingSet { pairs })
    }

    /// Builds per-party pairs from `(phi, phi')` angles in the given plane.
    pub fn from_angles(plane: Plane, angles: &[(f64, f64)]) -> Result<Self> {
        if angles.is_empty() {
            return Err(GwiError::Validation("angle list must not be empty".into()));
        }
        let pairs = angles
            .iter()
            .map(|&(phi, phip)| {
                Ok(SettingPair {
                    unprimed: plane.setting(phi)?,
                    primed: plane.setting(phip)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SettingSet { pairs })
    }

    /// Builds from a flat list `[phi_1, phi'_1, phi_2, phi'_2, ...]`.
    pub fn from_flat_angles(plane: Plane, flat: &[f64]) -> Result<Self> {
        if flat.is_empty() || flat.len() % 2 != 0 {
            return Err(GwiError::Validation(format!(
                "need an even, non-zero number of angles, got {}",
                flat.len()
            )));
        }
        let pairs: Vec<(f64, f64)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        SettingSet::from_angles(plane, &pairs)
    }

    pub fn n_parties(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[SettingPair] {
        &self.pairs
    }

    pub fn pair(&self, party: usize) -> &SettingPair {
        &self.pairs[party]
    }
}

/// Convenience alias matching the 0 = unprimed / 1 = primed choice indexing
/// used by expressions.
pub const UNPRIMED: usize = 0;
pub const PRIMED: usize = 1;
