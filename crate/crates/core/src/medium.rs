//! Detunings, linear response and effective-Hamiltonian coefficients.
//!
//! With `B(x) = B₀ + B₁x` each polarization component sees
//! `Hⱼ = c·p_z + b0ⱼ + b1ⱼ·x`, where
//!
//! ```text
//! b0ⱼ = κⱼ [ωⱼ + ν − ω_s − ν_c + (μⱼ − μ_s) B₀/ħ]
//! b1ⱼ = κⱼ (μⱼ − μ_s) B₁/ħ
//! κⱼ  = N |gⱼ|² / (2|Ω|²)
//! ```
//!
//! `b0ⱼ` is the constant part of `κⱼ·Δⱼ` with `Δⱼ = δⱼ − δ_c`; the excited
//! level `ω_e` and moment `μ_e` cancel between `δⱼ` and `δ_c`, so the
//! coefficients never depend on them.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::consts::HBAR;
use crate::error::{Error, Result};
use crate::physparams::PhysicalSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarization {
    #[serde(rename = "sigma_plus")]
    Plus,
    #[serde(rename = "sigma_minus")]
    Minus,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Plus, Polarization::Minus];

    pub fn label(self) -> &'static str {
        match self {
            Polarization::Plus => "sigma_plus",
            Polarization::Minus => "sigma_minus",
        }
    }
}

/// `constant + gradient·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Affine {
    pub constant: f64,
    pub gradient: f64,
}

impl Affine {
    pub fn at(&self, x: f64) -> f64 {
        self.constant + self.gradient * x
    }
}

impl std::ops::Sub for Affine {
    type Output = Affine;

    fn sub(self, rhs: Affine) -> Affine {
        Affine {
            constant: self.constant - rhs.constant,
            gradient: self.gradient - rhs.gradient,
        }
    }
}

/// One-photon detunings `δ₊, δ₋, δ_c` and Raman detunings `Δ± = δ± − δ_c`,
/// all in rad/s and affine in `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detunings {
    pub delta_plus: Affine,
    pub delta_minus: Affine,
    pub delta_c: Affine,
    pub raman_plus: Affine,
    pub raman_minus: Affine,
}

impl Detunings {
    pub fn raman(&self, pol: Polarization) -> Affine {
        match pol {
            Polarization::Plus => self.raman_plus,
            Polarization::Minus => self.raman_minus,
        }
    }
}

/// `b0ⱼ` (rad/s) and `b1ⱼ` (rad/(s·m)) for both polarizations.
///
/// The differences and averages are computed on demand so they can never
/// drift from their definitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoefficients {
    pub b0_plus: f64,
    pub b0_minus: f64,
    pub b1_plus: f64,
    pub b1_minus: f64,
}

impl EffectiveCoefficients {
    pub fn new(b0_plus: f64, b0_minus: f64, b1_plus: f64, b1_minus: f64) -> Self {
        Self {
            b0_plus,
            b0_minus,
            b1_plus,
            b1_minus,
        }
    }

    pub fn b0_of(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::Plus => self.b0_plus,
            Polarization::Minus => self.b0_minus,
        }
    }

    pub fn b1_of(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::Plus => self.b1_plus,
            Polarization::Minus => self.b1_minus,
        }
    }

    /// `b0₊ − b0₋`
    pub fn b0(&self) -> f64 {
        self.b0_plus - self.b0_minus
    }

    /// `b1₊ − b1₋`
    pub fn b1(&self) -> f64 {
        self.b1_plus - self.b1_minus
    }

    pub fn b0_bar(&self) -> f64 {
        0.5 * (self.b0_plus + self.b0_minus)
    }

    pub fn b1_bar(&self) -> f64 {
        0.5 * (self.b1_plus + self.b1_minus)
    }
}

impl Serialize for EffectiveCoefficients {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EffectiveCoefficients", 8)?;
        st.serialize_field("b0_plus", &self.b0_plus)?;
        st.serialize_field("b0_minus", &self.b0_minus)?;
        st.serialize_field("b1_plus", &self.b1_plus)?;
        st.serialize_field("b1_minus", &self.b1_minus)?;
        st.serialize_field("b0", &self.b0())?;
        st.serialize_field("b1", &self.b1())?;
        st.serialize_field("b0_bar", &self.b0_bar())?;
        st.serialize_field("b1_bar", &self.b1_bar())?;
        st.end()
    }
}

/// Single-photon coupling `gⱼ = d·sqrt(ν / (2 ε₀ V ħ))` (rad/s per unit
/// slowly-varying amplitude).
pub fn coupling_strength(d_ej: f64, nu: f64, volume: f64, epsilon0: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::invalid("volume", "must be positive"));
    }
    if !(nu > 0.0) {
        return Err(Error::invalid("nu", "must be positive"));
    }
    Ok(d_ej * (nu / (2.0 * epsilon0 * volume * HBAR)).sqrt())
}

pub fn raman_detunings(system: &PhysicalSystem) -> Detunings {
    let l = &system.levels;
    let f = &system.fields;
    let m = &system.magnet;
    let zeeman = |mu: f64| Affine {
        constant: mu * m.b0 / HBAR,
        gradient: mu * m.b1 / HBAR,
    };
    let one_photon = |omega: f64, carrier: f64, mu: f64| {
        let z = zeeman(mu - l.mu_e);
        Affine {
            constant: omega - l.omega_e + carrier + z.constant,
            gradient: z.gradient,
        }
    };
    let delta_plus = one_photon(l.omega_plus, f.nu, l.mu_plus);
    let delta_minus = one_photon(l.omega_minus, f.nu, l.mu_minus);
    let delta_c = one_photon(l.omega_s, f.nu_c, l.mu_s);
    Detunings {
        delta_plus,
        delta_minus,
        delta_c,
        raman_plus: delta_plus - delta_c,
        raman_minus: delta_minus - delta_c,
    }
}

/// Steady-state first-order coherence `Θⱼₑ = −Δⱼ gⱼ Eⱼ / (2 Ω Ω*)`.
pub fn linear_coherence(
    raman: f64,
    g_j: f64,
    e_j: Complex64,
    rabi: Complex64,
) -> Result<Complex64> {
    let rabi2 = rabi.norm_sqr();
    if rabi2 == 0.0 {
        return Err(Error::invalid("rabi", "Omega must be nonzero"));
    }
    Ok(e_j * (-raman * g_j / (2.0 * rabi2)))
}

/// `κⱼ`: the override when present, otherwise `N|gⱼ|²/(2|Ω|²)`.
pub fn coupling_prefactor(system: &PhysicalSystem, pol: Polarization) -> Result<f64> {
    if let Some(kappa) = system.ensemble.kappa_override {
        return Ok(kappa);
    }
    derived_prefactor(system, pol)
}

/// `N|gⱼ|²/(2|Ω|²)`, ignoring any override.
pub fn derived_prefactor(system: &PhysicalSystem, pol: Polarization) -> Result<f64> {
    let f = &system.fields;
    let d = match pol {
        Polarization::Plus => f.d_e_plus,
        Polarization::Minus => f.d_e_minus,
    };
    let rabi2 = f.rabi.norm_sqr();
    if rabi2 == 0.0 {
        return Err(Error::invalid("fields.rabi", "Omega must be nonzero"));
    }
    let g = coupling_strength(d, f.nu, system.ensemble.volume, f.epsilon0)?;
    Ok(system.ensemble.n_atoms * g * g / (2.0 * rabi2))
}

pub fn effective_coefficients(system: &PhysicalSystem) -> Result<EffectiveCoefficients> {
    let l = &system.levels;
    let f = &system.fields;
    let m = &system.magnet;
    let coeff = |pol: Polarization| -> Result<(f64, f64)> {
        let kappa = coupling_prefactor(system, pol)?;
        let (omega_j, mu_j) = match pol {
            Polarization::Plus => (l.omega_plus, l.mu_plus),
            Polarization::Minus => (l.omega_minus, l.mu_minus),
        };
        let dmu = mu_j - l.mu_s;
        let b0 = kappa * (omega_j + f.nu - l.omega_s - f.nu_c + dmu * m.b0 / HBAR);
        let b1 = kappa * (dmu * m.b1 / HBAR);
        Ok((b0, b1))
    };
    let (b0_plus, b1_plus) = coeff(Polarization::Plus)?;
    let (b0_minus, b1_minus) = coeff(Polarization::Minus)?;
    Ok(EffectiveCoefficients::new(
        b0_plus, b0_minus, b1_plus, b1_minus,
    ))
}
