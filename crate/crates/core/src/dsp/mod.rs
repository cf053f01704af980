//! Shared signal-processing primitives used by both ends of the link.

mod fft;
mod filter;
mod resample;
mod rrc;

pub use fft::{fft_in_place, frequency_of_bin, next_fast_len, welch_psd};
pub(crate) use fft::hann;
pub use filter::{analytic_bandpass, convolve_full, ideal_bandpass, upsample_and_filter};
pub use resample::{kaiser_lowpass, resample};
pub use rrc::design_rrc;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Box-Muller transform of two uniforms into two independent standard normals.
///
/// `u1` must lie in `(0, 1]` (it feeds a logarithm) and `u2` in `[0, 1)`.
pub fn box_muller(u1: f64, u2: f64) -> Result<(f64, f64)> {
    if !(u1 > 0.0 && u1 <= 1.0) {
        return Err(Error::param("u1", format!("{u1} outside (0, 1]")));
    }
    if !(0.0..1.0).contains(&u2) {
        return Err(Error::param("u2", format!("{u2} outside [0, 1)")));
    }
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * PI * u2;
    Ok((r * theta.cos(), r * theta.sin()))
}

/// Scale-invariant error vector magnitude (RMS, as a fraction).
///
/// The received sequence is first fitted to the reference by the best
/// complex gain, so only shape distortion and noise count.
pub fn evm(received: &[Complex64], reference: &[Complex64]) -> f64 {
    scale_invariant_mse(received, reference).sqrt()
}

/// `min_g |g z - x|^2 / |x|^2` over complex `g`.
pub fn scale_invariant_mse(received: &[Complex64], reference: &[Complex64]) -> f64 {
    let (mut zz, mut xx, mut zx) = (0.0, 0.0, Complex64::new(0.0, 0.0));
    for (z, x) in received.iter().zip(reference) {
        zz += z.norm_sqr();
        xx += x.norm_sqr();
        zx += z.conj() * x;
    }
    if xx == 0.0 {
        return 0.0;
    }
    if zz == 0.0 {
        return 1.0;
    }
    ((xx - zx.norm_sqr() / zz) / xx).max(0.0)
}
