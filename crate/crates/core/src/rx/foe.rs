use num_complex::Complex64;

use crate::dsp::{analytic_bandpass, fft_in_place, frequency_of_bin, welch_psd};
use crate::{Error, Result, Waveform};

const MIN_LEN: usize = 1 << 14;
const WELCH_SEGMENTS: usize = 16;
const DETECTION_DB: f64 = 10.0;

/// Frequency of the strongest line in `search_band` (Hz, positive for real traces).
///
/// Detection runs on a 16-segment Welch PSD: the peak must clear the in-band
/// median by 10 dB. The frequency is then refined on the full-length
/// Hann-windowed periodogram by three-point parabolic interpolation of the
/// log magnitude.
pub fn estimate_frequency_offset(trace: &Waveform, search_band: (f64, f64)) -> Result<f64> {
    let n = trace.len();
    if n < MIN_LEN {
        return Err(Error::param("trace", format!("{n} samples < {MIN_LEN}")));
    }
    let (lo, hi) = (search_band.0.min(search_band.1), search_band.0.max(search_band.1));
    let fs = trace.sample_rate();
    if lo.abs().max(hi.abs()) > fs / 2.0 {
        return Err(Error::BandOutsideNyquist {
            low_hz: lo,
            high_hz: hi,
            nyquist_hz: fs / 2.0,
        });
    }
    let mut x = trace.to_complex_vec();

    let seg = n / WELCH_SEGMENTS;
    let psd = welch_psd(&x, seg);
    let mut band: Vec<(usize, f64)> = psd
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let f = frequency_of_bin(*k, seg, fs);
            f >= lo && f <= hi
        })
        .map(|(k, p)| (k, *p))
        .collect();
    if band.len() < 3 {
        return Err(Error::param("search_band", "narrower than three Welch bins"));
    }
    let (peak_bin, peak) = band
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    band.sort_by(|a, b| a.1.total_cmp(&b.1));
    let median = band[band.len() / 2].1;
    let ratio_db = 10.0 * (peak / median).log10();
    if !(ratio_db > DETECTION_DB) {
        return Err(Error::FrequencyEstimation {
            peak_over_median_db: ratio_db,
        });
    }
    let coarse = frequency_of_bin(peak_bin, seg, fs);

    let window = crate::dsp::hann(n);
    x.iter_mut().zip(&window).for_each(|(z, w)| *z *= *w);
    drop(window);
    fft_in_place(&mut x, false);
    let bin_hz = fs / n as f64;
    let reach = 2.0 * fs / seg as f64;
    let (mut best, mut best_p) = (0usize, -1.0);
    for (k, z) in x.iter().enumerate() {
        let f = frequency_of_bin(k, n, fs);
        if (f - coarse).abs() <= reach && f >= lo && f <= hi {
            let p = z.norm_sqr();
            if p > best_p {
                best = k;
                best_p = p;
            }
        }
    }
    let at = |k: isize| -> f64 {
        let idx = k.rem_euclid(n as isize) as usize;
        x[idx].norm().max(f64::MIN_POSITIVE).ln()
    };
    let (a, b, c) = (at(best as isize - 1), at(best as isize), at(best as isize + 1));
    let denom = a - 2.0 * b + c;
    let delta = if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    Ok(frequency_of_bin(best, n, fs) + delta.clamp(-0.5, 0.5) * bin_hz)
}

/// Analytic bandpass around `f_center`, then mix the band down to 0 Hz.
pub fn downconvert_branch(trace: &Waveform, f_center: f64, bandwidth: f64) -> Result<Waveform> {
    let mut w = analytic_bandpass(trace, f_center, bandwidth)?;
    let step = -2.0 * std::f64::consts::PI * f_center / trace.sample_rate();
    for (n, z) in w.as_complex_mut().expect("complex").iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, step * n as f64);
    }
    Ok(w.with_center(0.0))
}
