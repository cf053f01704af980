//! Bob's DSP chain: frequency-offset estimation on the pilot, band
//! selection and down-conversion, pilot-aided phase recovery, resampling,
//! matched filtering with frame sync, and training-aided equalization.

mod equalizer;
mod foe;
mod phase;
mod sync;

pub use equalizer::{equalize, EqualizerConfig, EqualizerMode, EqualizerOutput, MimoFir};
pub use foe::{downconvert_branch, estimate_frequency_offset};
pub use phase::{
    compensate_phase, estimate_phase, training_phase_variance, unwrap_phase, PhaseTrajectory, MIN_PILOT_SNR_DB,
};
pub use sync::{chain_noise_gain, matched_filter, matched_filter_and_sync, SyncConfig, SyncOutput};

use serde::{Deserialize, Serialize};

use crate::dsp::design_rrc;
use crate::tx::{SymbolFrame, TrainingReference};
use crate::{Error, Result, Waveform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RxConfig {
    pub quantum_bandwidth_hz: f64,
    pub pilot_bandwidth_hz: f64,
    /// Window (Hz) on the pilot IF trace searched for the pilot line.
    pub foe_search_band_hz: (f64, f64),
    pub phase_window: usize,
    pub phase_compensation: bool,
    /// Training symbols per block for the phase-variance diagnostic.
    pub phase_block: usize,
    /// Also run sync without phase compensation to measure the reduction
    /// in training phase variance.
    pub phase_diagnostics: bool,
    pub sync: SyncConfig,
    pub equalizer: EqualizerConfig,
}

impl Default for RxConfig {
    fn default() -> Self {
        Self {
            quantum_bandwidth_hz: 1.3e9,
            pilot_bandwidth_hz: 200e3,
            foe_search_band_hz: (1.65e9, 1.85e9),
            phase_window: 64,
            phase_compensation: true,
            phase_block: 1024,
            phase_diagnostics: false,
            sync: SyncConfig::default(),
            equalizer: EqualizerConfig::default(),
        }
    }
}

impl RxConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.quantum_bandwidth_hz > 0.0 && self.pilot_bandwidth_hz > 0.0) {
            return Err(Error::param("bandwidth", "filter bandwidths must be positive"));
        }
        if self.phase_window == 0 || self.phase_block == 0 {
            return Err(Error::param("phase_window", "windows must be at least 1"));
        }
        if self.equalizer.num_taps.is_multiple_of(2) {
            return Err(Error::param("equalizer.num_taps", "must be odd"));
        }
        if !(self.sync.threshold > 0.0 && self.sync.threshold < 1.0) {
            return Err(Error::param("sync.threshold", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Per-quadrature noise gain of the fixed filters for a given input rate.
    pub fn noise_gain(&self, input_rate: f64, symbol_rate: f64) -> Result<f64> {
        let out_rate = self.sync.target_sps as f64 * symbol_rate;
        let taps = design_rrc(self.sync.rolloff, self.sync.span_symbols, self.sync.target_sps)?;
        Ok(chain_noise_gain(input_rate, out_rate, &taps))
    }
}

/// Everything the chain measured while recovering one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RxMetrics {
    pub pilot_frequency_hz: f64,
    pub quantum_center_hz: f64,
    pub pilot_snr_db: f64,
    pub pilot_low_confidence: bool,
    pub sync_start: usize,
    pub sync_confidence: f64,
    pub evm_before_eq: f64,
    pub evm_after_eq: f64,
    pub equalizer_regularized: bool,
    pub equalizer_kept_taps: usize,
    /// Block-averaged training phase variance after compensation, rad^2.
    pub residual_phase_variance: Option<f64>,
    /// The same quantity with phase compensation skipped.
    pub uncompensated_phase_variance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RxOutput {
    /// Equalized symbols in raw detector units.
    pub symbols: SymbolFrame,
    pub metrics: RxMetrics,
}

/// Run the full chain on one frame.
///
/// `signal_len` is the length of the leading signal slot; the pilot branch
/// is filtered over the whole trace, the quantum branch over the signal
/// slot only. `pilot_offset_hz` is the pilot frequency minus the quantum
/// band center, both in the optical field.
pub fn receive(
    quantum_trace: &Waveform,
    pilot_trace: &Waveform,
    signal_len: usize,
    pilot_offset_hz: f64,
    symbol_rate: f64,
    reference: &TrainingReference,
    cfg: &RxConfig,
) -> Result<RxOutput> {
    cfg.validate()?;
    quantum_trace.check_same_rate(pilot_trace, "pilot trace")?;
    let f_pilot = estimate_frequency_offset(pilot_trace, cfg.foe_search_band_hz)?;
    let f_quantum = f_pilot - pilot_offset_hz;

    let pilot_bb = downconvert_branch(pilot_trace, f_pilot, cfg.pilot_bandwidth_hz)?.slice(0, signal_len)?;
    let trajectory = estimate_phase(&pilot_bb, cfg.phase_window)?;
    drop(pilot_bb);

    let q_bb = downconvert_branch(&quantum_trace.slice(0, signal_len)?, f_quantum, cfg.quantum_bandwidth_hz)?;
    let training = &reference.symbols;

    let uncompensated_phase_variance = if cfg.phase_diagnostics {
        let raw = matched_filter_and_sync(&q_bb, symbol_rate, &cfg.sync, reference)?;
        Some(training_phase_variance(&raw.frame, training, cfg.phase_block)?)
    } else {
        None
    };
    let compensated = if cfg.phase_compensation {
        compensate_phase(&q_bb, &trajectory)?
    } else {
        q_bb
    };
    let synced = matched_filter_and_sync(&compensated, symbol_rate, &cfg.sync, reference)?;
    drop(compensated);
    let residual_phase_variance = training_phase_variance(&synced.frame, training, cfg.phase_block).ok();
    let eq = equalize(&synced.frame, training, &cfg.equalizer)?;

    Ok(RxOutput {
        symbols: eq.frame,
        metrics: RxMetrics {
            pilot_frequency_hz: f_pilot,
            quantum_center_hz: f_quantum,
            pilot_snr_db: trajectory.snr_db,
            pilot_low_confidence: trajectory.low_confidence,
            sync_start: synced.start,
            sync_confidence: synced.confidence,
            evm_before_eq: eq.mse_before.sqrt(),
            evm_after_eq: eq.mse_after.sqrt(),
            equalizer_regularized: eq.regularized,
            equalizer_kept_taps: eq.kept_taps,
            residual_phase_variance,
            uncompensated_phase_variance,
        },
    })
}
