//! Physical inputs of the tripod-EIT model and their configuration file.
//!
//! Everything is stored in SI base units with `ħ` kept explicit: a magnetic
//! energy `μB` (J) always enters a frequency as `μB/ħ` (rad/s). Magnetic
//! moments are stored as the product `μᵢ = m_F g_F μ_B`; the configuration
//! file may give either the product or the `(m_f, g_f)` pair.
//!
//! The on-disk format is TOML with five tables (`levels`, `fields`, `magnet`,
//! `ensemble`, `beam`). Unknown keys are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};

use crate::consts::{C, HBAR, MU_B};
use crate::error::{Error, Result};
use crate::medium::{self, EffectiveCoefficients};

/// Default configuration shipped with the crate (rubidium D1 line, 2 mm
/// beam, 50 mm cell, 910 μG/mm gradient).
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSet {
    /// Bare angular frequency of `|+⟩` (rad/s).
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub omega_s: f64,
    pub omega_e: f64,
    /// Magnetic moment of `|+⟩` (J/T).
    #[serde(deserialize_with = "moment")]
    pub mu_plus: f64,
    #[serde(deserialize_with = "moment")]
    pub mu_minus: f64,
    #[serde(deserialize_with = "moment")]
    pub mu_s: f64,
    #[serde(deserialize_with = "moment")]
    pub mu_e: f64,
}

impl LevelSet {
    /// `|+⟩` and `|−⟩` coincide at zero field.
    pub fn is_degenerate(&self) -> bool {
        self.omega_plus == self.omega_minus
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MomentSpec {
    Product(f64),
    Zeeman { m_f: f64, g_f: f64 },
}

fn moment<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<f64, D::Error> {
    Ok(match MomentSpec::deserialize(de)? {
        MomentSpec::Product(mu) => mu,
        MomentSpec::Zeeman { m_f, g_f } => m_f * g_f * MU_B,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSet {
    /// Probe carrier (rad/s).
    pub nu: f64,
    /// Control carrier (rad/s).
    pub nu_c: f64,
    /// Carrier wavenumbers (1/m). Removed by the rotating frame; kept for the record.
    pub k: f64,
    pub k_c: f64,
    /// Control Rabi frequency as `[re, im]` (rad/s).
    pub rabi: Complex64,
    /// Dipole matrix elements of `|±⟩ ↔ |e⟩` (C·m).
    pub d_e_plus: f64,
    pub d_e_minus: f64,
    /// Excited-state decay `Γ` (rad/s).
    pub gamma_excited: f64,
    /// Ground-coherence relaxation `γ` (rad/s).
    pub gamma_ground: f64,
    /// Vacuum permittivity (F/m).
    pub epsilon0: f64,
}

/// `B(x) = b0 + b1·x` along the propagation axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnetProfile {
    /// Tesla.
    pub b0: f64,
    /// Tesla per metre.
    pub b1: f64,
}

impl MagnetProfile {
    pub fn at(&self, x: f64) -> f64 {
        self.b0 + self.b1 * x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleGeometry {
    pub n_atoms: f64,
    /// Cell volume (m³).
    pub volume: f64,
    /// Cell length (m).
    pub length: f64,
    /// Replaces the derived prefactor `N|gⱼ|²/(2|Ω|²)` for both polarizations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfMode {
    /// `t_f = L/c`.
    LOverC,
    /// `t_f = L/v_g` with `group_velocity` from the beam table.
    LOverVg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    /// Gaussian width (m).
    pub a: f64,
    /// Preselection polarization angle (rad).
    pub alpha: f64,
    pub t_f_mode: TfMode,
    /// Group velocity (m/s), required by `l_over_vg`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_velocity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSystem {
    pub levels: LevelSet,
    pub fields: FieldSet,
    pub magnet: MagnetProfile,
    pub ensemble: EnsembleGeometry,
    pub beam: BeamConfig,
}

impl PhysicalSystem {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::from_toml_with_overrides(text, &[])
    }

    /// Parses a TOML document after applying `table.key = value` patches.
    ///
    /// Values are read as TOML literals (`1e-3`, `true`, `"l_over_vg"`); a
    /// bare word that is not a TOML literal is taken as a string.
    pub fn from_toml_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut doc: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        for (key, value) in overrides {
            apply_override(&mut doc, key, value)?;
        }
        let system: PhysicalSystem = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        system.validate()?;
        Ok(system)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn default_config() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG).expect("shipped default configuration is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let l = &self.levels;
        let f = &self.fields;
        for (name, v) in [
            ("levels.omega_plus", l.omega_plus),
            ("levels.omega_minus", l.omega_minus),
            ("levels.omega_s", l.omega_s),
            ("levels.omega_e", l.omega_e),
            ("levels.mu_plus", l.mu_plus),
            ("levels.mu_minus", l.mu_minus),
            ("levels.mu_s", l.mu_s),
            ("levels.mu_e", l.mu_e),
            ("fields.nu", f.nu),
            ("fields.nu_c", f.nu_c),
            ("fields.k", f.k),
            ("fields.k_c", f.k_c),
            ("fields.rabi", f.rabi.re),
            ("fields.rabi", f.rabi.im),
            ("fields.d_e_plus", f.d_e_plus),
            ("fields.d_e_minus", f.d_e_minus),
            ("fields.gamma_excited", f.gamma_excited),
            ("fields.gamma_ground", f.gamma_ground),
            ("fields.epsilon0", f.epsilon0),
            ("magnet.b0", self.magnet.b0),
            ("magnet.b1", self.magnet.b1),
            ("ensemble.n_atoms", self.ensemble.n_atoms),
            ("ensemble.volume", self.ensemble.volume),
            ("ensemble.length", self.ensemble.length),
            ("beam.a", self.beam.a),
            ("beam.alpha", self.beam.alpha),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if f.rabi.norm() <= 0.0 {
            return Err(Error::invalid("fields.rabi", "|Omega| must be positive"));
        }
        if f.gamma_excited < 0.0 {
            return Err(Error::invalid("fields.gamma_excited", "must be >= 0"));
        }
        if f.gamma_ground < 0.0 {
            return Err(Error::invalid("fields.gamma_ground", "must be >= 0"));
        }
        if f.epsilon0 <= 0.0 {
            return Err(Error::invalid("fields.epsilon0", "must be positive"));
        }
        if self.ensemble.n_atoms < 1.0 {
            return Err(Error::invalid("ensemble.n_atoms", "must be >= 1"));
        }
        if self.ensemble.volume <= 0.0 {
            return Err(Error::invalid("ensemble.volume", "must be positive"));
        }
        if self.ensemble.length <= 0.0 {
            return Err(Error::invalid("ensemble.length", "must be positive"));
        }
        if let Some(kappa) = self.ensemble.kappa_override {
            if !kappa.is_finite() {
                return Err(Error::invalid("ensemble.kappa_override", "must be finite"));
            }
        }
        if self.beam.a <= 0.0 {
            return Err(Error::invalid("beam.a", "must be positive"));
        }
        match (self.beam.t_f_mode, self.beam.group_velocity) {
            (TfMode::LOverVg, None) => {
                return Err(Error::invalid(
                    "beam.group_velocity",
                    "required when t_f_mode = \"l_over_vg\"",
                ))
            }
            (_, Some(vg)) if !(vg.is_finite() && vg > 0.0) => {
                return Err(Error::invalid("beam.group_velocity", "must be positive"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Interaction time `t_f` (s).
    pub fn interaction_time(&self) -> f64 {
        let length = self.ensemble.length;
        match self.beam.t_f_mode {
            TfMode::LOverC => length / C,
            TfMode::LOverVg => length / self.beam.group_velocity.unwrap_or(C),
        }
    }

    /// Prefactor `κ` that makes the σ₊ momentum kick `|b1₊|·t_f` equal `1/a`.
    ///
    /// Solves `κ·|μ₊ − μ_s|·|B₁|/ħ·t_f = 1/a`.
    pub fn calibrate_kappa(&self) -> Result<f64> {
        let kick_per_kappa = (self.levels.mu_plus - self.levels.mu_s).abs() * self.magnet.b1.abs()
            / HBAR
            * self.interaction_time();
        if kick_per_kappa == 0.0 {
            return Err(Error::invalid(
                "magnet.b1",
                "calibration needs mu_plus != mu_s and b1 != 0",
            ));
        }
        Ok(1.0 / (self.beam.a * kick_per_kappa))
    }
}

fn apply_override(doc: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let (table, field) = key
        .split_once('.')
        .ok_or_else(|| Error::Config(format!("override `{key}` must look like table.key")))?;
    let parsed = match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key v was just written"),
        Err(_) => toml::Value::String(value.to_string()),
    };
    let entry = doc
        .entry(table.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(field.to_string(), parsed);
            Ok(())
        }
        _ => Err(Error::Config(format!("`{table}` is not a table"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeThresholds {
    /// Minimum ratio accepted as "much greater than".
    pub much_greater: f64,
    /// Maximum `a·|b1|·t_f` accepted as weak coupling.
    pub weak_coupling: f64,
    /// Half-width of the transverse region checked, in units of `a`.
    pub extent_widths: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self {
            much_greater: 100.0,
            weak_coupling: 0.3,
            extent_widths: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtLeast,
    AtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeCheck {
    pub ratio: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub ok: bool,
}

impl RegimeCheck {
    fn at_least(ratio: f64, threshold: f64) -> Self {
        Self {
            ratio,
            threshold,
            bound: Bound::AtLeast,
            ok: ratio >= threshold,
        }
    }

    fn at_most(ratio: f64, threshold: f64) -> Self {
        Self {
            ratio,
            threshold,
            bound: Bound::AtMost,
            ok: ratio <= threshold,
        }
    }
}

/// Dimensionless checks of the strong-control-field regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    /// `|Ω|²/(Γγ)`.
    pub dephasing: RegimeCheck,
    /// `|Ω|²/max Δⱼ²` over `|x| ≤ x_max`.
    pub raman: RegimeCheck,
    /// `|Ω|/|(μ₊ − μ₋)B_max/ħ|`.
    pub zeeman: RegimeCheck,
    /// `a·|b1|·t_f`, the meter/system coupling.
    pub weak_coupling: RegimeCheck,
    /// Transverse half-extent over which detunings were maximised (m).
    pub x_max: f64,
}

impl RegimeReport {
    /// The three strong-drive assumptions behind the effective Hamiltonian.
    pub fn assumptions_hold(&self) -> bool {
        self.dephasing.ok && self.raman.ok && self.zeeman.ok
    }

    pub fn all_ok(&self) -> bool {
        self.assumptions_hold() && self.weak_coupling.ok
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub fn validate_regime(system: &PhysicalSystem, coeffs: &EffectiveCoefficients) -> RegimeReport {
    validate_regime_with(system, coeffs, &RegimeThresholds::default())
}

pub fn validate_regime_with(
    system: &PhysicalSystem,
    coeffs: &EffectiveCoefficients,
    thresholds: &RegimeThresholds,
) -> RegimeReport {
    let rabi2 = system.fields.rabi.norm_sqr();
    let x_max = thresholds.extent_widths * system.beam.a;
    let detunings = medium::raman_detunings(system);
    let max_raman = [detunings.raman_plus, detunings.raman_minus]
        .iter()
        .flat_map(|d| [d.at(-x_max).abs(), d.at(x_max).abs()])
        .fold(0.0, f64::max);
    let b_max = system
        .magnet
        .at(-x_max)
        .abs()
        .max(system.magnet.at(x_max).abs());
    let zeeman_split = ((system.levels.mu_plus - system.levels.mu_minus) * b_max / HBAR).abs();
    let coupling = system.beam.a * coeffs.b1().abs() * system.interaction_time();

    RegimeReport {
        dephasing: RegimeCheck::at_least(
            ratio(
                rabi2,
                system.fields.gamma_excited * system.fields.gamma_ground,
            ),
            thresholds.much_greater,
        ),
        raman: RegimeCheck::at_least(ratio(rabi2, max_raman * max_raman), thresholds.much_greater),
        zeeman: RegimeCheck::at_least(ratio(rabi2.sqrt(), zeeman_split), thresholds.much_greater),
        weak_coupling: RegimeCheck::at_most(coupling, thresholds.weak_coupling),
        x_max,
    }
}
