//! Gamma function for positive arguments via the Lanczos approximation of ln Γ.

#![allow(clippy::excessive_precision)]

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("gamma is only defined here for positive finite arguments, got {0}")]
pub struct GammaError(pub f64);

const LANCZOS_G: f64 = 7.0;

// g = 7, n = 9 coefficients (Godfrey).
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_741_78;

/// Natural logarithm of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, GammaError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(GammaError(x));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the series argument away from zero.
        return Ok(ln_gamma(x + 1.0)? - x.ln());
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + sum.ln())
}

/// Γ(x) for x > 0, computed as `exp(ln_gamma(x))`.
pub fn gamma(x: f64) -> Result<f64, GammaError> {
    ln_gamma(x).map(f64::exp)
}
