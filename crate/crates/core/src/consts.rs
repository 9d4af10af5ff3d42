//! CODATA 2018 constants, SI units.

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;

/// Vacuum permittivity (F/m).
pub const EPSILON0: f64 = 8.854_187_812_8e-12;

/// Bohr magneton (J/T).
pub const MU_B: f64 = 9.274_010_078_3e-24;
