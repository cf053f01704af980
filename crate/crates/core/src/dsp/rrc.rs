use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::{Error, Result};

/// Root-raised-cosine taps of length `span * sps + 1`, normalized to unit energy.
///
/// The two removable singularities (t = 0 and |t| = T/(4 rolloff)) take
/// their analytic limits.
pub fn design_rrc(rolloff: f64, span: usize, sps: usize) -> Result<Vec<f64>> {
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::param("rolloff", format!("{rolloff} outside (0, 1]")));
    }
    if span == 0 || !span.is_multiple_of(2) {
        return Err(Error::param("span", format!("{span} must be even and positive")));
    }
    if sps < 2 {
        return Err(Error::param("samples_per_symbol", format!("{sps} < 2")));
    }
    let len = span * sps + 1;
    let mid = (span * sps / 2) as f64;
    let mut taps: Vec<f64> = (0..len)
        .map(|i| rrc_impulse((i as f64 - mid) / sps as f64, rolloff))
        .collect();
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let s = energy.sqrt().recip();
    taps.iter_mut().for_each(|h| *h *= s);
    Ok(taps)
}

/// Unnormalized RRC impulse response at `t` symbol periods.
pub(crate) fn rrc_impulse(t: f64, b: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - b + 4.0 * b / PI;
    }
    if ((4.0 * b * t).abs() - 1.0).abs() < 1e-9 {
        let arg = PI / (4.0 * b);
        return b * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
    let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
    num / den
}
