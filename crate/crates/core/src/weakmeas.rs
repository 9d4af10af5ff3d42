//! Polarization qubit, pre/postselection and weak values.
//!
//! Column-vector convention: `|σ₊⟩ = (1, 0)ᵀ`, `|σ₋⟩ = (0, 1)ᵀ`, with
//! `|H⟩ = (|σ₊⟩ + |σ₋⟩)/√2` and `|V⟩ = −i(|σ₊⟩ − |σ₋⟩)/√2`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::consts::C;
use crate::error::{Error, Result};
use crate::medium::EffectiveCoefficients;

/// Default overlap floor below which a weak value is refused.
pub const OVERLAP_FLOOR: f64 = 1e-12;

/// Beam deflection observed under ordinary EIT conditions in a 5 cm cell
/// (rad), kept for comparison with amplified angles.
pub const REFERENCE_DEFLECTION: f64 = 2e-5;

const HERMITIAN_TOL: f64 = 1e-14;

/// A normalised polarization state over `|σ₊⟩, |σ₋⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    amps: [Complex64; 2],
}

impl Qubit {
    /// Normalises `(plus, minus)`. Fails on the zero vector.
    pub fn new(plus: Complex64, minus: Complex64) -> Result<Self> {
        let norm = (plus.norm_sqr() + minus.norm_sqr()).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid(
                "qubit",
                "amplitudes must have finite nonzero norm",
            ));
        }
        Ok(Self {
            amps: [plus / norm, minus / norm],
        })
    }

    fn raw(plus: Complex64, minus: Complex64) -> Self {
        Self {
            amps: [plus, minus],
        }
    }

    pub fn sigma_plus() -> Self {
        Self::raw(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn sigma_minus() -> Self {
        Self::raw(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    pub fn horizontal() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::raw(h, h)
    }

    pub fn vertical() -> Self {
        Self::raw(
            Complex64::new(0.0, -FRAC_1_SQRT_2),
            Complex64::new(0.0, FRAC_1_SQRT_2),
        )
    }

    pub fn plus(&self) -> Complex64 {
        self.amps[0]
    }

    pub fn minus(&self) -> Complex64 {
        self.amps[1]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Qubit) -> Complex64 {
        self.amps[0].conj() * other.amps[0] + self.amps[1].conj() * other.amps[1]
    }

    /// Multiplies by `e^{iφ}`.
    pub fn with_phase(&self, phi: f64) -> Self {
        let p = Complex64::from_polar(1.0, phi);
        Self::raw(self.amps[0] * p, self.amps[1] * p)
    }

    fn apply(&self, op: &Observable2) -> [Complex64; 2] {
        let m = &op.m;
        [
            m[0][0] * self.amps[0] + m[0][1] * self.amps[1],
            m[1][0] * self.amps[0] + m[1][1] * self.amps[1],
        ]
    }
}

/// A 2×2 Hermitian observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observable2 {
    m: [[Complex64; 2]; 2],
}

impl Observable2 {
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        let deviation = [
            (m[0][0] - m[0][0].conj()).norm(),
            (m[1][1] - m[1][1].conj()).norm(),
            (m[0][1] - m[1][0].conj()).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        if !(deviation < HERMITIAN_TOL) {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(Self { m })
    }

    /// Pauli `σ_z`; eigenvalue +1 on `|σ₊⟩`, −1 on `|σ₋⟩`.
    pub fn sigma_z() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            m: [[one, zero], [zero, -one]],
        }
    }

    /// `⟨bra|A|ket⟩`.
    pub fn sandwich(&self, bra: &Qubit, ket: &Qubit) -> Complex64 {
        let v = ket.apply(self);
        bra.plus().conj() * v[0] + bra.minus().conj() * v[1]
    }
}

/// `cos(α/2)|H⟩ + sin(α/2)|V⟩`.
pub fn preselect(alpha: f64) -> Qubit {
    let (s, c) = (0.5 * alpha).sin_cos();
    let h = Qubit::horizontal();
    let v = Qubit::vertical();
    Qubit::raw(c * h.plus() + s * v.plus(), c * h.minus() + s * v.minus())
}

/// The preselected state after the free spin evolution, with its global
/// phase `−b̄0·t` kept separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preselected {
    pub state: Qubit,
    pub global_phase: f64,
}

/// `(e^{−iθ/2}|σ₊⟩ + e^{iθ/2}|σ₋⟩)/√2` with `θ = α + b0·t`.
///
/// The x-dependent average phase `b̄1·x·t` multiplies both components
/// equally and drops out of every ratio, so it is not tracked.
pub fn evolved_pre(alpha: f64, coeffs: &EffectiveCoefficients, t: f64) -> Preselected {
    let half = 0.5 * (alpha + coeffs.b0() * t);
    Preselected {
        state: Qubit::raw(
            Complex64::from_polar(FRAC_1_SQRT_2, -half),
            Complex64::from_polar(FRAC_1_SQRT_2, half),
        ),
        global_phase: -coeffs.b0_bar() * t,
    }
}

pub fn weak_value(pre: &Qubit, post: &Qubit, observable: &Observable2) -> Result<Complex64> {
    weak_value_with_floor(pre, post, observable, OVERLAP_FLOOR)
}

/// `⟨post|A|pre⟩ / ⟨post|pre⟩`, refused when `|⟨post|pre⟩| < floor`.
pub fn weak_value_with_floor(
    pre: &Qubit,
    post: &Qubit,
    observable: &Observable2,
    floor: f64,
) -> Result<Complex64> {
    let overlap = post.inner(pre);
    if !(overlap.norm() >= floor) {
        return Err(Error::OrthogonalSelection {
            overlap: overlap.norm(),
            floor,
        });
    }
    Ok(observable.sandwich(post, pre) / overlap)
}

/// `⟨σ_z⟩_w` for the evolved preselection and `|V⟩` postselection.
pub fn sigma_z_weak_value(alpha: f64, coeffs: &EffectiveCoefficients, t: f64) -> Result<Complex64> {
    let pre = evolved_pre(alpha, coeffs, t);
    weak_value(&pre.state, &Qubit::vertical(), &Observable2::sigma_z())
}

/// Comparison mode that ignores the free evolution: `⟨σ_z⟩_w` for
/// `preselect(α)` and `|V⟩`, i.e. `i·cot(α/2)`.
pub fn naive_weak_value(alpha: f64) -> Result<Complex64> {
    weak_value(
        &preselect(alpha),
        &Qubit::vertical(),
        &Observable2::sigma_z(),
    )
}

/// Linearized meter shift `a²·b1·t·Im⟨σ_z⟩_w`.
pub fn aav_mean_shift(weak_value: Complex64, a: f64, b1: f64, t: f64) -> f64 {
    a * a * b1 * t * weak_value.im
}

fn aav_at(alpha: f64, coeffs: &EffectiveCoefficients, a: f64, t: f64) -> Result<f64> {
    let w = sigma_z_weak_value(alpha, coeffs, t).map_err(|_| Error::Divergence {
        theta: alpha + coeffs.b0() * t,
    })?;
    Ok(aav_mean_shift(w, a, coeffs.b1(), t))
}

/// Relative step of the centred difference in [`deflection_angle_fd`].
pub const FD_RELATIVE_STEP: f64 = 1e-4;

/// Deflection angle `c⁻¹·d⟨x⟩_wv/dt` (rad).
///
/// With `b0 = 0` the shift is linear in `t` and the closed derivative
/// `a²·b1·cot(α/2)/c` is used; otherwise [`deflection_angle_fd`].
pub fn deflection_angle(coeffs: &EffectiveCoefficients, alpha: f64, a: f64, t: f64) -> Result<f64> {
    if coeffs.b0() == 0.0 {
        let half = 0.5 * alpha;
        if half.sin().abs() < OVERLAP_FLOOR {
            return Err(Error::Divergence { theta: alpha });
        }
        Ok(a * a * coeffs.b1() / (half.tan() * C))
    } else {
        deflection_angle_fd(coeffs, alpha, a, t)
    }
}

/// Centred difference of the linearized shift with step
/// `h = FD_RELATIVE_STEP·t` (or `FD_RELATIVE_STEP/|b0|` at `t = 0`).
pub fn deflection_angle_fd(
    coeffs: &EffectiveCoefficients,
    alpha: f64,
    a: f64,
    t: f64,
) -> Result<f64> {
    let scale = if t != 0.0 {
        t.abs()
    } else if coeffs.b0() != 0.0 {
        coeffs.b0().abs().recip()
    } else {
        1.0
    };
    let h = FD_RELATIVE_STEP * scale;
    // Check the evaluation point itself before the stencil.
    aav_at(alpha, coeffs, a, t)?;
    let hi = aav_at(alpha, coeffs, a, t + h)?;
    let lo = aav_at(alpha, coeffs, a, t - h)?;
    Ok((hi - lo) / (2.0 * h) / C)
}

/// `θ` in `(0, π)` maximising `|⟨x⟩|` of the exact postselected centroid:
/// `cos θ* = exp(−ε²/2)`, evaluated as `2·asin(√((1 − f)/2))`.
pub fn optimal_theta(coeffs: &EffectiveCoefficients, a: f64, t: f64) -> Result<f64> {
    optimal_theta_for_coupling(a * coeffs.b1() * t)
}

pub fn optimal_theta_for_coupling(epsilon: f64) -> Result<f64> {
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::NoExtremum);
    }
    let one_minus_f = -(-0.5 * epsilon * epsilon).exp_m1();
    Ok(2.0 * (0.5 * one_minus_f).sqrt().asin())
}
