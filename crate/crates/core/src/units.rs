//! Conversions between the internal angular units and the linear units used
//! in files and reports.

use std::f64::consts::TAU;

/// Linear frequency in MHz to angular frequency in rad/ns.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    TAU * f_mhz * 1e-3
}

/// Angular frequency in rad/ns to linear frequency in MHz.
pub fn angular_to_mhz(omega: f64) -> f64 {
    omega / TAU * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let f = 1.46;
        assert!((angular_to_mhz(mhz_to_angular(f)) - f).abs() < 1e-15);
        // 1 MHz is one cycle per microsecond
        assert!((mhz_to_angular(1.0) * 1000.0 - TAU).abs() < 1e-12);
    }
}
