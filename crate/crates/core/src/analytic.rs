//! Closed-form meter evolution and postselected statistics.
//!
//! The probe starts as a 2-D Gaussian of width `a`,
//! `E(x, z, 0) = (2πa²)^(−1/2) exp(−(x² + z²)/(4a²))`, normalised so that
//! `∫∫|E|² dx dz = 1`. Under `Hⱼ = c·p_z + b0ⱼ + b1ⱼx` each component picks
//! up the pure phase `exp(−i(b0ⱼ + b1ⱼx)t)` and translates by `ct` along z.
//!
//! Transverse statistics use the 1-D marginal
//! `u(x) = (2πa²)^(−1/4) exp(−x²/(4a²))`, `∫|u|² dx = 1`; the z factor
//! separates and is dropped.
//!
//! Momentum amplitudes use `Ẽ(k) = ∫ E(r) e^{−ik·r} d²r`, so that
//! `∫|Ẽ|² d²k/(2π)² = ∫|E|² d²r`.
//!
//! Postselecting onto `|V⟩` leaves the transverse density
//! `ρ(x) = ½|u(x)|² (1 − cos(θ + βx))` with `θ = α + b0·t` and `β = b1·t`.
//! With `ε = aβ` and `f = exp(−ε²/2)`:
//!
//! ```text
//! P    = (1 − f cos θ)/2
//! ⟨x⟩  = a²β f sin θ / (1 − f cos θ)
//! ⟨Δx²⟩ = a² [1 + ε² f (cos θ − f) / (1 − f cos θ)²]
//! ```
//!
//! The variance is the rearranged form of
//! `a²[1 + (ε²−2) f cos θ + (cos²θ − ε²) f²]/(1 − f cos θ)²`; the
//! rearrangement avoids the O(1) cancellation in the numerator near the dark
//! fringe. `1 − f cos θ` is evaluated as `(1 − f) + 2f sin²(θ/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::consts::C;
use crate::error::{Error, Result};
use crate::medium::{EffectiveCoefficients, Polarization};

/// A normalised Gaussian meter of width `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMeter {
    a: f64,
}

impl GaussianMeter {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", "beam width must be positive"));
        }
        Ok(Self { a })
    }

    pub fn width(&self) -> f64 {
        self.a
    }

    pub fn peak(&self) -> f64 {
        (2.0 * PI * self.a * self.a).sqrt().recip()
    }

    /// `E(x, z, 0)`.
    pub fn initial(&self, x: f64, z: f64) -> Complex64 {
        let a2 = self.a * self.a;
        Complex64::new(self.peak() * (-(x * x + z * z) / (4.0 * a2)).exp(), 0.0)
    }

    /// `Eⱼ(x, z, t)`.
    pub fn evolved(
        &self,
        x: f64,
        z: f64,
        t: f64,
        pol: Polarization,
        coeffs: &EffectiveCoefficients,
    ) -> Complex64 {
        let a2 = self.a * self.a;
        let zc = z - C * t;
        let modulus = self.peak() * (-(zc * zc + x * x) / (4.0 * a2)).exp();
        let phase = -(t * coeffs.b0_of(pol)) - t * coeffs.b1_of(pol) * x;
        Complex64::from_polar(modulus, phase)
    }

    /// `Ẽⱼ(k_x, k_z, t)`.
    pub fn momentum(
        &self,
        kx: f64,
        kz: f64,
        t: f64,
        pol: Polarization,
        coeffs: &EffectiveCoefficients,
    ) -> Complex64 {
        let a2 = self.a * self.a;
        let shifted = kx + coeffs.b1_of(pol) * t;
        let modulus = 2.0 * (2.0 * a2 * PI).sqrt() * (-a2 * kz * kz - a2 * shifted * shifted).exp();
        let phase = -coeffs.b0_of(pol) * t - C * kz * t;
        Complex64::from_polar(modulus, phase)
    }

    /// 1-D transverse amplitude `uⱼ(x, t)`, unit norm over x.
    pub fn transverse(
        &self,
        x: f64,
        t: f64,
        pol: Polarization,
        coeffs: &EffectiveCoefficients,
    ) -> Complex64 {
        let a2 = self.a * self.a;
        let modulus = (2.0 * PI * a2).powf(-0.25) * (-x * x / (4.0 * a2)).exp();
        let phase = -(t * coeffs.b0_of(pol)) - t * coeffs.b1_of(pol) * x;
        Complex64::from_polar(modulus, phase)
    }

    /// Fourier transform of [`GaussianMeter::transverse`], `∫ u e^{−ikx} dx`.
    pub fn transverse_momentum(
        &self,
        kx: f64,
        t: f64,
        pol: Polarization,
        coeffs: &EffectiveCoefficients,
    ) -> Complex64 {
        let a2 = self.a * self.a;
        let shifted = kx + coeffs.b1_of(pol) * t;
        let modulus =
            (2.0 * PI * a2).powf(-0.25) * 2.0 * (PI * a2).sqrt() * (-a2 * shifted * shifted).exp();
        Complex64::from_polar(modulus, -coeffs.b0_of(pol) * t)
    }
}

pub fn initial_envelope(x: f64, z: f64, a: f64) -> Result<Complex64> {
    Ok(GaussianMeter::new(a)?.initial(x, z))
}

pub fn evolved_envelope(
    x: f64,
    z: f64,
    t: f64,
    pol: Polarization,
    coeffs: &EffectiveCoefficients,
    a: f64,
) -> Result<Complex64> {
    Ok(GaussianMeter::new(a)?.evolved(x, z, t, pol, coeffs))
}

pub fn momentum_envelope(
    kx: f64,
    kz: f64,
    t: f64,
    pol: Polarization,
    coeffs: &EffectiveCoefficients,
    a: f64,
) -> Result<Complex64> {
    Ok(GaussianMeter::new(a)?.momentum(kx, kz, t, pol, coeffs))
}

/// The `|V⟩`-postselected meter for given `θ = α + b0·t`, `β = b1·t` and `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Postselection {
    pub theta: f64,
    pub beta: f64,
    pub a: f64,
}

impl Postselection {
    pub fn new(t: f64, alpha: f64, coeffs: &EffectiveCoefficients, a: f64) -> Result<Self> {
        GaussianMeter::new(a)?;
        Ok(Self {
            theta: alpha + coeffs.b0() * t,
            beta: coeffs.b1() * t,
            a,
        })
    }

    /// Directly from `θ` and the coupling `ε = a·β`.
    pub fn from_coupling(theta: f64, epsilon: f64, a: f64) -> Result<Self> {
        GaussianMeter::new(a)?;
        Ok(Self {
            theta,
            beta: epsilon / a,
            a,
        })
    }

    /// `ε = a·b1·t`.
    pub fn coupling(&self) -> f64 {
        self.a * self.beta
    }

    /// Overlap factor `f = exp(−ε²/2)`.
    pub fn overlap(&self) -> f64 {
        let e = self.coupling();
        (-0.5 * e * e).exp()
    }

    fn one_minus_overlap(&self) -> f64 {
        let e = self.coupling();
        -(-0.5 * e * e).exp_m1()
    }

    /// `1 − f cos θ`, without cancellation.
    fn dark(&self) -> f64 {
        let s = (0.5 * self.theta).sin();
        self.one_minus_overlap() + 2.0 * self.overlap() * s * s
    }

    /// `cos θ − f`, as the difference of two small positive quantities.
    fn cos_minus_overlap(&self) -> f64 {
        let s = (0.5 * self.theta).sin();
        self.one_minus_overlap() - 2.0 * s * s
    }

    /// Unnormalised density `½|u(x)|²(1 − cos(θ + βx))`.
    pub fn density(&self, x: f64) -> f64 {
        let a2 = self.a * self.a;
        let gauss = (2.0 * PI * a2).sqrt().recip() * (-x * x / (2.0 * a2)).exp();
        let s = (0.5 * (self.theta + self.beta * x)).sin();
        gauss * s * s
    }

    /// Postselection probability onto `|V⟩`.
    pub fn probability(&self) -> f64 {
        0.5 * self.dark()
    }

    /// Probability of the complementary `|H⟩` outcome, `(1 + f cos θ)/2`.
    pub fn probability_h(&self) -> f64 {
        let c = (0.5 * self.theta).cos();
        0.5 * (self.overlap() * 2.0 * c * c + self.one_minus_overlap())
    }

    pub fn mean(&self) -> Result<f64> {
        let dark = self.dark();
        if !(dark > 0.0) {
            return Err(Error::UndefinedPostselection);
        }
        let a2 = self.a * self.a;
        Ok(self.theta.sin() * a2 * self.beta * self.overlap() / dark)
    }

    pub fn variance(&self) -> Result<f64> {
        let dark = self.dark();
        let dark2 = dark * dark;
        if !(dark2 > 0.0) {
            return Err(Error::UndefinedPostselection);
        }
        let a2 = self.a * self.a;
        let e2 = self.coupling() * self.coupling();
        Ok(a2 * (1.0 + e2 * self.overlap() * self.cos_minus_overlap() / dark2))
    }
}

pub fn postselected_density(
    x: f64,
    t: f64,
    alpha: f64,
    coeffs: &EffectiveCoefficients,
    a: f64,
) -> Result<f64> {
    Ok(Postselection::new(t, alpha, coeffs, a)?.density(x))
}

/// Centroid of the `|V⟩`-postselected meter.
pub fn mean_x(t: f64, alpha: f64, coeffs: &EffectiveCoefficients, a: f64) -> Result<f64> {
    Postselection::new(t, alpha, coeffs, a)?.mean()
}

/// Transverse variance of the `|V⟩`-postselected meter.
///
/// The density depends on `α` and `b0` only through `θ = α + b0·t`, so the
/// same expression holds for any `b0`.
pub fn var_x(t: f64, alpha: f64, coeffs: &EffectiveCoefficients, a: f64) -> Result<f64> {
    Postselection::new(t, alpha, coeffs, a)?.variance()
}

pub fn postselect_probability(
    t: f64,
    alpha: f64,
    coeffs: &EffectiveCoefficients,
    a: f64,
) -> Result<f64> {
    Ok(Postselection::new(t, alpha, coeffs, a)?.probability())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReshapeMode {
    /// `(2πa²)^(−1/2) exp(−(x² − x·x_wv + x_wv²)/(4a²))`, as commonly quoted.
    /// Peaks at `x_wv/2` and loses norm as `exp(−3x_wv²/(8a²))`.
    Literal,
    /// `(2πa²)^(−1/2) exp(−(x − x_wv)²/(4a²))`: the input profile moved to `x_wv`.
    Shifted,
}

/// Reshaped transverse amplitude for a linearized meter shift `x_wv`, on the
/// same 2-D normalisation as [`GaussianMeter::initial`].
pub fn reshaped_gaussian(x: f64, x_wv: f64, a: f64, mode: ReshapeMode) -> Result<f64> {
    let meter = GaussianMeter::new(a)?;
    let a2 = a * a;
    let exponent = match mode {
        ReshapeMode::Literal => x * x - x * x_wv + x_wv * x_wv,
        ReshapeMode::Shifted => (x - x_wv) * (x - x_wv),
    };
    Ok(meter.peak() * (-exponent / (4.0 * a2)).exp())
}

pub fn reshaped_gaussian_paper(x: f64, x_wv: f64, a: f64) -> Result<f64> {
    reshaped_gaussian(x, x_wv, a, ReshapeMode::Literal)
}

/// `∫∫|Ψ|² dx dz` of the literal reshaped profile: `exp(−3x_wv²/(8a²))`.
pub fn literal_norm(x_wv: f64, a: f64) -> f64 {
    (-3.0 * x_wv * x_wv / (8.0 * a * a)).exp()
}

/// Peak position of the literal reshaped profile.
pub fn literal_argmax(x_wv: f64) -> f64 {
    0.5 * x_wv
}
