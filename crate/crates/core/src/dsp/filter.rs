use num_complex::Complex64;

use super::fft::{fft_in_place, frequency_of_bin};
use crate::{Error, Result, Samples, Waveform};

fn check_band(w: &Waveform, f_center: f64, bandwidth: f64) -> Result<()> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::param("bandwidth", format!("{bandwidth} must be positive")));
    }
    let nyq = w.sample_rate() / 2.0;
    let low = f_center - bandwidth / 2.0;
    let high = f_center + bandwidth / 2.0;
    if !f_center.is_finite() || low.abs().max(high.abs()) > nyq {
        return Err(Error::BandOutsideNyquist {
            low_hz: low,
            high_hz: high,
            nyquist_hz: nyq,
        });
    }
    Ok(())
}

fn in_band(f: f64, center: f64, half: f64) -> bool {
    (f - center).abs() <= half * (1.0 + 1e-12)
}

/// Brick-wall DFT-domain bandpass over the whole buffer.
///
/// Real input keeps the mirrored band too and stays real.
pub fn ideal_bandpass(w: &Waveform, f_center: f64, bandwidth: f64) -> Result<Waveform> {
    check_band(w, f_center, bandwidth)?;
    let n = w.len();
    let fs = w.sample_rate();
    let half = bandwidth / 2.0;
    let mut buf = w.to_complex_vec();
    fft_in_place(&mut buf, false);
    let real = !w.is_complex();
    for (k, z) in buf.iter_mut().enumerate() {
        let f = frequency_of_bin(k, n, fs);
        let keep = in_band(f, f_center, half) || (real && in_band(f, -f_center, half));
        if !keep {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    fft_in_place(&mut buf, true);
    let samples = if real {
        Samples::Real(buf.into_iter().map(|z| z.re).collect())
    } else {
        Samples::Complex(buf)
    };
    Ok(w.with_samples(samples)?.with_center(f_center).with_bandwidth(bandwidth))
}

/// One-sided bandpass producing the analytic (complex) version of a band.
///
/// Only the positive-frequency band is kept and doubled, so a real tone
/// `A cos(2 pi f t + p)` in the band comes out as `A exp(i(2 pi f t + p))`.
/// Complex input is filtered without the doubling.
pub fn analytic_bandpass(w: &Waveform, f_center: f64, bandwidth: f64) -> Result<Waveform> {
    check_band(w, f_center, bandwidth)?;
    let n = w.len();
    let fs = w.sample_rate();
    let half = bandwidth / 2.0;
    let gain = if w.is_complex() { 1.0 } else { 2.0 };
    let mut buf = w.to_complex_vec();
    fft_in_place(&mut buf, false);
    for (k, z) in buf.iter_mut().enumerate() {
        let f = frequency_of_bin(k, n, fs);
        if in_band(f, f_center, half) {
            *z *= gain;
        } else {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    fft_in_place(&mut buf, true);
    Ok(Waveform::complex(buf, fs)?
        .with_center(f_center)
        .with_bandwidth(bandwidth))
}

/// Full linear convolution of a complex sequence with real taps.
pub fn convolve_full(x: &[Complex64], h: &[f64]) -> Vec<Complex64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); x.len() + h.len() - 1];
    for (i, &v) in x.iter().enumerate() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, &t) in out[i..i + h.len()].iter_mut().zip(h) {
            *o += v * t;
        }
    }
    out
}

/// Zero-insertion upsampling by `sps` followed by FIR filtering.
///
/// Output length is `sps * symbols.len() + taps.len() - 1`; symbol `k`
/// places a copy of the taps starting at sample `k * sps`.
pub fn upsample_and_filter(symbols: &[Complex64], sps: usize, taps: &[f64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); sps * symbols.len() + taps.len() - 1];
    for (k, &s) in symbols.iter().enumerate() {
        if s == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, &t) in out[k * sps..k * sps + taps.len()].iter_mut().zip(taps) {
            *o += s * t;
        }
    }
    out
}
