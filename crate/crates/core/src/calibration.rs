//! One-time shot-noise-unit calibration.
//!
//! The SNU scale is the total noise variance seen with the LO on and the
//! signal gated off, so electronic noise is folded into the unit instead of
//! being subtracted. Its effect on security moves into the untrusted loss
//! through [`CalibrationRecord::loss_transfer`].

use serde::{Deserialize, Serialize};

use crate::tx::{FrameSchedule, SlotKind, SymbolFrame};
use crate::{Error, Result, Samples, Waveform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    /// Per-sample variance with the LO off, raw units.
    pub v_elec_raw: f64,
    /// Per-sample variance over calibration slots (shot + electronic), raw units.
    pub v_total_raw: f64,
    /// Raw-to-SNU variance divisor; equal to `v_total_raw`.
    pub snu_scale: f64,
    /// Indices into the schedule's slot list that were averaged.
    pub slot_ids: Vec<usize>,
}

impl CalibrationRecord {
    /// Fraction of the calibrated unit that is electronic noise.
    pub fn electronic_share(&self) -> f64 {
        self.v_elec_raw / self.v_total_raw
    }

    /// Electronic noise relative to shot noise, `v_el`.
    pub fn electronic_noise_snu(&self) -> f64 {
        self.v_elec_raw / (self.v_total_raw - self.v_elec_raw)
    }

    /// Factor `1 / (1 + v_el)` by which trusted electronic noise shows up as
    /// extra channel loss under one-time calibration.
    pub fn loss_transfer(&self) -> f64 {
        1.0 - self.electronic_share()
    }
}

/// Per-quadrature variance: real samples directly, complex as the mean of
/// the I and Q variances.
fn quadrature_moments(w: &Samples, range: std::ops::Range<usize>) -> (f64, f64, usize) {
    match w {
        Samples::Real(v) => {
            let s = &v[range];
            (s.iter().sum(), s.iter().map(|x| x * x).sum(), s.len())
        }
        Samples::Complex(v) => {
            let s = &v[range];
            let sum: f64 = s.iter().map(|z| z.re + z.im).sum();
            let sq: f64 = s.iter().map(|z| z.norm_sqr()).sum();
            (sum, sq, 2 * s.len())
        }
    }
}

fn variance(sum: f64, sq: f64, n: usize) -> f64 {
    let n = n as f64;
    let m = sum / n;
    sq / n - m * m
}

/// Build the record from an LO-off trace and the calibration slots of a
/// gated trace. Signal slots are never read.
pub fn calibrate_snu(elec_trace: &Waveform, gated_trace: &Waveform, schedule: &FrameSchedule) -> Result<CalibrationRecord> {
    if elec_trace.len() < 2 {
        return Err(Error::param("elec_trace", "needs at least two samples"));
    }
    if schedule.total_len() > gated_trace.len() {
        return Err(Error::LengthMismatch {
            what: "schedule vs gated trace",
            left: schedule.total_len(),
            right: gated_trace.len(),
        });
    }
    let (s, q, n) = quadrature_moments(elec_trace.samples(), 0..elec_trace.len());
    let v_elec_raw = variance(s, q, n);

    let (mut sum, mut sq, mut count) = (0.0, 0.0, 0);
    let mut slot_ids = Vec::new();
    for (id, slot) in schedule.slots.iter().enumerate() {
        if slot.kind == SlotKind::Calibration {
            let (s, q, n) = quadrature_moments(gated_trace.samples(), slot.range());
            sum += s;
            sq += q;
            count += n;
            slot_ids.push(id);
        }
    }
    if count < 2 {
        return Err(Error::Schedule("no calibration samples in the schedule".into()));
    }
    let v_total_raw = variance(sum, sq, count);
    if !(v_total_raw > v_elec_raw) || v_elec_raw < 0.0 {
        return Err(Error::Calibration {
            total: v_total_raw,
            electronic: v_elec_raw,
        });
    }
    Ok(CalibrationRecord {
        v_elec_raw,
        v_total_raw,
        snu_scale: v_total_raw,
        slot_ids,
    })
}

/// Divide symbols by `sqrt(snu_scale * sps_gain)`, where `sps_gain` is the
/// per-quadrature noise gain of the DSP chain from detector samples to
/// symbols.
pub fn normalize_symbols(frame: &SymbolFrame, rec: &CalibrationRecord, sps_gain: f64) -> Result<SymbolFrame> {
    if !(sps_gain > 0.0) || !(rec.snu_scale > 0.0) {
        return Err(Error::param("sps_gain", "scale and chain gain must be positive"));
    }
    let k = 1.0 / (rec.snu_scale * sps_gain).sqrt();
    frame.with_symbols(frame.symbols.iter().map(|z| z * k).collect())
}
