use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{convolve_full, design_rrc, resample};
use crate::tx::{SymbolFrame, TrainingReference};
use crate::{Error, Result, Waveform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyncConfig {
    pub target_sps: usize,
    pub rolloff: f64,
    pub span_symbols: usize,
    /// Minimum peak-to-sidelobe confidence.
    pub threshold: f64,
    /// Extra symbols of timing uncertainty searched beyond the filter delays.
    pub search_symbols: usize,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self {
            target_sps: 4,
            rolloff: 0.3,
            span_symbols: 32,
            threshold: 0.7,
            search_symbols: 256,
        }
    }
}

/// Symbol-spaced output of the matched filter and frame synchronizer.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncOutput {
    pub frame: SymbolFrame,
    /// Sample index (at `target_sps`) of symbol 0.
    pub start: usize,
    /// `1 - max sidelobe / peak` of the training correlation.
    pub confidence: f64,
}

fn reduce(a: usize, b: usize) -> (usize, usize) {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    (a / x, b / x)
}

/// Resample `baseband` to `cfg.target_sps` samples per symbol and apply the
/// RRC matched filter with its group delay removed.
pub fn matched_filter(baseband: &Waveform, symbol_rate: f64, cfg: &SyncConfig) -> Result<Vec<Complex64>> {
    let sps_in = baseband.sample_rate() / symbol_rate;
    let sps_in_int = sps_in.round() as usize;
    if sps_in_int == 0 || (sps_in - sps_in_int as f64).abs() > 1e-9 {
        return Err(Error::param(
            "sample_rate",
            format!("{sps_in} samples per symbol is not an integer"),
        ));
    }
    let sps = cfg.target_sps;
    let (up, down) = reduce(sps, sps_in_int);
    let resampled = resample(baseband, up, down)?.to_complex_vec();
    let taps = design_rrc(cfg.rolloff, cfg.span_symbols, sps)?;
    let delay = taps.len() / 2;
    let mut full = convolve_full(&resampled, &taps);
    full.drain(..delay);
    Ok(full)
}

/// Resample to `target_sps`, apply the RRC matched filter (delay removed),
/// find the frame start by correlating with the known training symbols and
/// decimate to one sample per symbol.
///
/// Confidence is the correlation peak's margin over the strongest
/// candidate at least one symbol away from it; it must reach
/// `cfg.threshold`.
pub fn matched_filter_and_sync(
    baseband: &Waveform,
    symbol_rate: f64,
    cfg: &SyncConfig,
    reference: &TrainingReference,
) -> Result<SyncOutput> {
    let sps = cfg.target_sps;
    let filtered = matched_filter(baseband, symbol_rate, cfg)?;
    let y = &filtered[..];

    let positions: Vec<usize> = reference.positions().collect();
    let window = sps * (2 * cfg.span_symbols + cfg.search_symbols);
    let mut corr = vec![0.0; window];
    for (tau, c) in corr.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, t) in positions.iter().zip(&reference.symbols) {
            let i = tau + sps * k;
            if i >= y.len() {
                break;
            }
            acc += y[i] * t.conj();
        }
        *c = acc.norm();
    }
    let (start, peak) = corr
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty window");
    let sidelobe = corr
        .iter()
        .enumerate()
        .filter(|(tau, _)| tau.abs_diff(start) >= sps)
        .map(|(_, c)| *c)
        .fold(0.0, f64::max);
    let confidence = if peak > 0.0 { 1.0 - sidelobe / peak } else { 0.0 };
    if !(confidence >= cfg.threshold) {
        return Err(Error::SyncFailure {
            confidence,
            threshold: cfg.threshold,
        });
    }
    let last = start + sps * (reference.total_symbols - 1);
    if last >= y.len() {
        return Err(Error::LengthMismatch {
            what: "frame end vs filtered samples",
            left: last + 1,
            right: y.len(),
        });
    }
    let symbols = (0..reference.total_symbols).map(|k| y[start + sps * k]).collect();
    let frame = SymbolFrame::new(symbols, reference.roles(), symbol_rate)?;
    Ok(SyncOutput {
        frame,
        start,
        confidence,
    })
}

/// Per-quadrature noise gain from real detector samples to matched-filter
/// symbols: analytic extraction doubles the one-sided band, resampling
/// scales the noise density per sample and the taps contribute their energy.
pub fn chain_noise_gain(input_rate: f64, output_rate: f64, taps: &[f64]) -> f64 {
    2.0 * (output_rate / input_rate) * taps.iter().map(|h| h * h).sum::<f64>()
}
