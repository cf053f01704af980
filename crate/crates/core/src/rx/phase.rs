use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tx::SymbolFrame;
use crate::{Error, Result, Samples, Waveform};

/// Pilot SNR below which a trajectory is flagged as low confidence.
pub const MIN_PILOT_SNR_DB: f64 = 10.0;

/// Estimated carrier phase, one value per baseband sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrajectory {
    pub phase: Vec<f64>,
    pub source_bandwidth: f64,
    /// Pilot SNR estimated from amplitude fluctuations, dB.
    pub snr_db: f64,
    pub low_confidence: bool,
}

/// Unwrap a phase sequence so adjacent samples never jump by more than pi.
pub fn unwrap_phase(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    let mut prev = None;
    for &p in raw {
        if let Some(q) = prev {
            let d: f64 = p - q;
            if d.abs() > PI {
                offset -= 2.0 * PI * (d / (2.0 * PI)).round();
            }
        }
        prev = Some(p);
        out.push(p + offset);
    }
    out
}

/// Centered moving average with a window that shrinks symmetrically at the
/// edges, so linear trends pass through unchanged.
fn centered_average(x: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = x.len();
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let base = x[i];
            let s: f64 = x[i - h..=i + h].iter().map(|v| v - base).sum();
            base + s / (2 * h + 1) as f64
        })
        .collect()
}

/// Unwrapped pilot phase smoothed over `window` samples.
pub fn estimate_phase(pilot_baseband: &Waveform, window: usize) -> Result<PhaseTrajectory> {
    let z = pilot_baseband
        .as_complex()
        .ok_or_else(|| Error::param("pilot_baseband", "must be complex"))?;
    if window == 0 {
        return Err(Error::param("smoothing_window", "must be at least 1"));
    }
    let raw: Vec<f64> = z.iter().map(|v| v.arg()).collect();
    let phase = centered_average(&unwrap_phase(&raw), window);

    let n = z.len() as f64;
    let mean_amp = z.iter().map(|v| v.norm()).sum::<f64>() / n;
    let var_amp = z.iter().map(|v| (v.norm() - mean_amp).powi(2)).sum::<f64>() / n;
    let snr = if var_amp > 0.0 {
        mean_amp * mean_amp / (2.0 * var_amp)
    } else {
        f64::INFINITY
    };
    let snr_db = (10.0 * snr.log10()).min(300.0);
    Ok(PhaseTrajectory {
        phase,
        source_bandwidth: pilot_baseband
            .bandwidth_hint
            .unwrap_or(pilot_baseband.sample_rate()),
        snr_db,
        low_confidence: !(snr_db >= MIN_PILOT_SNR_DB),
    })
}

/// Multiply each sample by `exp(-i phase)`.
pub fn compensate_phase(quantum_baseband: &Waveform, pt: &PhaseTrajectory) -> Result<Waveform> {
    if quantum_baseband.len() != pt.phase.len() {
        return Err(Error::LengthMismatch {
            what: "baseband vs phase trajectory",
            left: quantum_baseband.len(),
            right: pt.phase.len(),
        });
    }
    let z = quantum_baseband.to_complex_vec();
    let out = z
        .iter()
        .zip(&pt.phase)
        .map(|(v, p)| v * Complex64::from_polar(1.0, -p))
        .collect();
    quantum_baseband.with_samples(Samples::Complex(out))
}

/// Variance of block-averaged training phases.
///
/// Training symbols are grouped into consecutive blocks of `block`; each
/// block yields `arg(sum y conj(t))`. The unwrapped block phases' variance
/// measures slow carrier-phase wander that the training sees.
pub fn training_phase_variance(frame: &SymbolFrame, reference: &[Complex64], block: usize) -> Result<f64> {
    let received = frame.select(crate::tx::SymbolRole::Training);
    if received.len() != reference.len() {
        return Err(Error::LengthMismatch {
            what: "training symbols vs reference",
            left: received.len(),
            right: reference.len(),
        });
    }
    let blocks = received.len() / block.max(1);
    if blocks < 2 {
        return Err(Error::InsufficientTraining {
            needed: 2 * block,
            available: received.len(),
        });
    }
    let raw: Vec<f64> = (0..blocks)
        .map(|b| {
            let r = b * block..(b + 1) * block;
            received[r.clone()]
                .iter()
                .zip(&reference[r])
                .map(|(y, t)| y * t.conj())
                .sum::<Complex64>()
                .arg()
        })
        .collect();
    let ph = unwrap_phase(&raw);
    let m = ph.iter().sum::<f64>() / blocks as f64;
    Ok(ph.iter().map(|p| (p - m).powi(2)).sum::<f64>() / blocks as f64)
}
