//! Grid-based spinor-field evolution, used as an independent oracle for the
//! closed forms in [`crate::analytic`].
//!
//! The effective Hamiltonian has no transverse kinetic term and `x`
//! commutes with `p_z`, so each component evolves by the exact local phase
//! `exp(−i(b0ⱼ + b1ⱼx)t)` on the x grid; the z translation is carried
//! analytically and never sampled.
//!
//! Discrete transform convention: `Ẽ(k_m) = dx·Σₙ E(xₙ) e^{−ik_m xₙ}`, which
//! makes `Σ|E|²dx = Σ|Ẽ|²dk/(2π)` exactly.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::medium::{EffectiveCoefficients, Polarization};
use crate::weakmeas::Qubit;

pub const MIN_POINTS: usize = 1 << 10;
pub const DEFAULT_POINTS: usize = 1 << 14;
/// Default grid extent in units of the beam width.
pub const DEFAULT_EXTENT_WIDTHS: f64 = 16.0;
/// Largest boundary/peak density ratio accepted by [`moments`].
pub const BOUNDARY_LIMIT: f64 = 1e-12;

/// Uniform grid `xₙ = −extent/2 + n·dx`, `n = 0..n_points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    n_points: usize,
    extent: f64,
}

impl Grid1D {
    pub fn new(n_points: usize, extent: f64) -> Result<Self> {
        if !n_points.is_power_of_two() || n_points < MIN_POINTS {
            return Err(Error::invalid(
                "n_points",
                format!("must be a power of two >= {MIN_POINTS}, got {n_points}"),
            ));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::invalid("extent", "must be positive"));
        }
        Ok(Self { n_points, extent })
    }

    /// `2¹⁴` points over `16a`.
    pub fn default_for(a: f64) -> Result<Self> {
        Self::new(DEFAULT_POINTS, DEFAULT_EXTENT_WIDTHS * a)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn dx(&self) -> f64 {
        self.extent / self.n_points as f64
    }

    /// Conjugate spacing `2π/(n·dx)`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.extent
    }

    pub fn origin(&self) -> f64 {
        -0.5 * self.extent
    }

    pub fn x(&self, i: usize) -> f64 {
        self.origin() + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Wavenumbers in ascending order, `k_m = m·dk` for `m = −n/2..n/2`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let half = (self.n_points / 2) as isize;
        (-half..half).map(|m| m as f64 * self.dk()).collect()
    }

    /// Requires `extent ≥ 8a + 2|shift|`.
    pub fn check_beam(&self, a: f64, shift: f64) -> Result<()> {
        let required = 8.0 * a + 2.0 * shift.abs();
        if self.extent < required {
            return Err(Error::GridTooSmall {
                extent: self.extent,
                required,
            });
        }
        Ok(())
    }
}

/// Two-component field `[E₊(x), E₋(x)]` on a grid at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: Grid1D,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub time: f64,
}

impl SpinorField {
    pub fn component(&self, pol: Polarization) -> &[Complex64] {
        match pol {
            Polarization::Plus => &self.plus,
            Polarization::Minus => &self.minus,
        }
    }

    /// `Σ|Eⱼ|² dx` for one component.
    pub fn population(&self, pol: Polarization) -> f64 {
        kahan_sum(self.component(pol).iter().map(|e| e.norm_sqr())) * self.grid.dx()
    }

    /// `Σ(|E₊|² + |E₋|²) dx`.
    pub fn norm(&self) -> f64 {
        self.population(Polarization::Plus) + self.population(Polarization::Minus)
    }
}

/// Gaussian meter of width `a` in both components with spinor weights
/// `(e^{−iα/2}, e^{iα/2})/√2`.
pub fn init_field(grid: &Grid1D, a: f64, alpha: f64) -> Result<SpinorField> {
    if !(a > 0.0) {
        return Err(Error::invalid("a", "beam width must be positive"));
    }
    grid.check_beam(a, 0.0)?;
    let amp = (2.0 * PI * a * a).powf(-0.25);
    let meter: Vec<f64> = grid
        .positions()
        .into_iter()
        .map(|x| amp * (-x * x / (4.0 * a * a)).exp())
        .collect();
    let w_plus = Complex64::from_polar(FRAC_1_SQRT_2, -0.5 * alpha);
    let w_minus = Complex64::from_polar(FRAC_1_SQRT_2, 0.5 * alpha);
    Ok(SpinorField {
        grid: *grid,
        plus: meter.iter().map(|&u| w_plus * u).collect(),
        minus: meter.iter().map(|&u| w_minus * u).collect(),
        time: 0.0,
    })
}

/// Advances the field by `t` under `diag(H₊, H₋)`.
pub fn propagate(field: &SpinorField, coeffs: &EffectiveCoefficients, t: f64) -> SpinorField {
    let grid = field.grid;
    let kick = |pol: Polarization, comp: &[Complex64]| -> Vec<Complex64> {
        let (b0, b1) = (coeffs.b0_of(pol), coeffs.b1_of(pol));
        comp.iter()
            .enumerate()
            .map(|(i, &e)| e * Complex64::from_polar(1.0, -(b0 + b1 * grid.x(i)) * t))
            .collect()
    };
    SpinorField {
        grid,
        plus: kick(Polarization::Plus, &field.plus),
        minus: kick(Polarization::Minus, &field.minus),
        time: field.time + t,
    }
}

/// [`propagate`] in `steps` equal sub-steps. Must agree with the single step.
pub fn propagate_stepped(
    field: &SpinorField,
    coeffs: &EffectiveCoefficients,
    t: f64,
    steps: usize,
) -> SpinorField {
    let dt = t / steps.max(1) as f64;
    let mut out = field.clone();
    for _ in 0..steps.max(1) {
        out = propagate(&out, coeffs, dt);
    }
    out.time = field.time + t;
    out
}

/// Momentum-space field on ascending wavenumbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub wavenumbers: Vec<f64>,
    pub dk: f64,
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub time: f64,
}

impl Spectrum {
    pub fn component(&self, pol: Polarization) -> &[Complex64] {
        match pol {
            Polarization::Plus => &self.plus,
            Polarization::Minus => &self.minus,
        }
    }

    /// `Σ|Ẽⱼ|² dk/(2π)`.
    pub fn population(&self, pol: Polarization) -> f64 {
        kahan_sum(self.component(pol).iter().map(|e| e.norm_sqr())) * self.dk / (2.0 * PI)
    }

    pub fn norm(&self) -> f64 {
        self.population(Polarization::Plus) + self.population(Polarization::Minus)
    }

    /// `Σk|Ẽⱼ|² / Σ|Ẽⱼ|²`.
    pub fn centroid(&self, pol: Polarization) -> Result<f64> {
        let comp = self.component(pol);
        let w = kahan_sum(comp.iter().map(|e| e.norm_sqr()));
        if w == 0.0 {
            return Err(Error::UndefinedPostselection);
        }
        let m = kahan_sum(
            comp.iter()
                .zip(&self.wavenumbers)
                .map(|(e, k)| k * e.norm_sqr()),
        );
        Ok(m / w)
    }
}

pub fn dft_spectrum(field: &SpinorField) -> Spectrum {
    let grid = field.grid;
    let n = grid.n_points();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let wavenumbers = grid.wavenumbers();
    let x0 = grid.origin();
    let dx = grid.dx();
    let transform = |comp: &[Complex64]| -> Vec<Complex64> {
        let mut buf = comp.to_vec();
        fft.process(&mut buf);
        // Ascending k: index m ≥ 0 at buf[m], m < 0 at buf[n + m].
        wavenumbers
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let src = (j + n / 2) % n;
                buf[src] * Complex64::from_polar(dx, -k * x0)
            })
            .collect()
    };
    Spectrum {
        plus: transform(&field.plus),
        minus: transform(&field.minus),
        dk: grid.dk(),
        wavenumbers,
        time: field.time,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Moments {
    pub norm: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Trapezoidal norm, mean and variance of a sampled density.
///
/// Refuses densities whose boundary samples exceed [`BOUNDARY_LIMIT`] of
/// the peak; an all-zero density has no centroid.
pub fn moments(grid: &Grid1D, density: &[f64]) -> Result<Moments> {
    if density.len() != grid.n_points() {
        return Err(Error::invalid("density", "length does not match grid"));
    }
    if density.iter().any(|d| !(*d >= 0.0)) {
        return Err(Error::invalid(
            "density",
            "samples must be finite and nonnegative",
        ));
    }
    let peak = density.iter().copied().fold(0.0, f64::max);
    let edge = density[0].max(density[density.len() - 1]);
    if peak > 0.0 && edge > BOUNDARY_LIMIT * peak {
        return Err(Error::BoundaryMass {
            ratio: edge / peak,
            limit: BOUNDARY_LIMIT,
        });
    }
    let dx = grid.dx();
    let last = density.len() - 1;
    let weight = |i: usize| if i == 0 || i == last { 0.5 * dx } else { dx };
    let norm = kahan_sum(density.iter().enumerate().map(|(i, d)| weight(i) * d));
    if norm == 0.0 {
        return Err(Error::UndefinedPostselection);
    }
    let mean = kahan_sum(
        density
            .iter()
            .enumerate()
            .map(|(i, d)| weight(i) * d * grid.x(i)),
    ) / norm;
    let variance = kahan_sum(density.iter().enumerate().map(|(i, d)| {
        let dev = grid.x(i) - mean;
        weight(i) * d * dev * dev
    })) / norm;
    Ok(Moments {
        norm,
        mean,
        variance,
    })
}

/// Pointwise `⟨post|Φ(x)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostselectedField {
    pub grid: Grid1D,
    pub amplitude: Vec<Complex64>,
}

impl PostselectedField {
    pub fn density(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn moments(&self) -> Result<Moments> {
        moments(&self.grid, &self.density())
    }
}

pub fn postselect_field(field: &SpinorField, post: &Qubit) -> PostselectedField {
    let (cp, cm) = (post.plus().conj(), post.minus().conj());
    PostselectedField {
        grid: field.grid,
        amplitude: field
            .plus
            .iter()
            .zip(&field.minus)
            .map(|(&ep, &em)| cp * ep + cm * em)
            .collect(),
    }
}

/// Neumaier-compensated sum.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
