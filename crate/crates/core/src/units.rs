//! Unit conversions.
//!
//! Internally every frequency and rate is an angular frequency in rad/us and
//! every time is in us. External inputs quote plain frequencies nu in MHz (or
//! kHz); the conversion is omega = 2*pi*nu, exploiting 1 MHz = 1/us.

use crate::scalar::Scalar;

/// Plain frequency in MHz to angular frequency in rad/us.
pub fn mhz<T: Scalar>(value: f64) -> T {
    T::of(2.0 * std::f64::consts::PI * value)
}

/// Plain frequency in kHz to angular frequency in rad/us.
pub fn khz<T: Scalar>(value: f64) -> T {
    mhz(value * 1e-3)
}

/// Angular frequency in rad/us back to a plain frequency in MHz.
pub fn to_mhz<T: Scalar>(omega: T) -> f64 {
    omega.to64() / (2.0 * std::f64::consts::PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_roundtrip() {
        let kappa: f64 = mhz(1.3);
        assert!((kappa - 2.0 * std::f64::consts::PI * 1.3).abs() < 1e-15);
        assert!((to_mhz(kappa) - 1.3).abs() < 1e-14);
        let gamma: f64 = khz(0.55);
        assert!((to_mhz(gamma) - 0.55e-3).abs() < 1e-18);
    }
}
