//! Physics from Alice's optical field to Bob's digitized IF traces.
//!
//! Raw detector units are chosen so that shot noise has variance 1 per real
//! trace sample. The quantum and pilot branches are carried as separate
//! complex analytic fields (ideal polarization demultiplexing) and share one
//! laser phase-noise path and one frequency offset.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::ideal_bandpass;
use crate::tx::{FrameSchedule, SlotKind};
use crate::{Decibel, Error, Result, RngStream, Samples, Waveform};

/// Photon energy over electron charge at 1 nm, in volt-nanometres.
const HC_OVER_Q: f64 = 1239.841984;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelParams {
    pub length_km: f64,
    pub alpha_db_per_km: f64,
    pub untrusted_loss_db: Decibel,
    /// Per-quadrature excess noise referred to the channel input, SNU.
    pub excess_noise_input: f64,
    pub cfo_hz: f64,
    pub combined_linewidth_hz: f64,
    /// Pilot leakage into the quantum polarization; `None` is ideal demux.
    pub pbs_crosstalk_db: Option<Decibel>,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            length_km: 28.6,
            alpha_db_per_km: 0.2,
            untrusted_loss_db: Decibel::lit(5.0),
            excess_noise_input: 0.055,
            cfo_hz: 1.55e9,
            combined_linewidth_hz: 200.0,
            pbs_crosstalk_db: None,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.length_km >= 0.0) {
            return Err(Error::param("length_km", format!("{} < 0", self.length_km)));
        }
        if !(self.alpha_db_per_km > 0.0) {
            return Err(Error::param("alpha_db_per_km", format!("{} <= 0", self.alpha_db_per_km)));
        }
        if !(self.excess_noise_input >= 0.0) {
            return Err(Error::param("excess_noise_input", format!("{} < 0", self.excess_noise_input)));
        }
        if !(self.combined_linewidth_hz >= 0.0) {
            return Err(Error::param("combined_linewidth_hz", "must be non-negative"));
        }
        if !self.cfo_hz.is_finite() {
            return Err(Error::param("cfo_hz", "must be finite"));
        }
        Ok(())
    }

    pub fn transmittance(&self) -> Result<f64> {
        fiber_transmittance(self.length_km, self.alpha_db_per_km, self.untrusted_loss_db)
    }
}

/// `T = 10^(-(alpha L + untrusted) / 10)`.
pub fn fiber_transmittance(length_km: f64, alpha_db_per_km: f64, untrusted: Decibel) -> Result<f64> {
    if !(length_km >= 0.0) || !(alpha_db_per_km >= 0.0) || untrusted.value() < 0.0 {
        return Err(Error::param("fiber", "length, attenuation and loss must be non-negative"));
    }
    Ok(10f64.powf(-(alpha_db_per_km * length_km + untrusted.value()) / 10.0))
}

/// How a clearance figure relates electronic noise to the optical noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClearanceConvention {
    /// Clearance is (shot + electronic) / electronic.
    TotalOverElectronic,
    /// Clearance is shot / electronic.
    ShotOverElectronic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiverParams {
    pub responsivity_a_per_w: f64,
    pub wavelength_nm: f64,
    pub coupling_loss_db: Decibel,
    pub extra_loss_db: Decibel,
    pub clearance_db: Decibel,
    pub clearance_convention: ClearanceConvention,
    pub bandwidth_hz: f64,
}

impl Default for ReceiverParams {
    fn default() -> Self {
        Self {
            responsivity_a_per_w: 0.8,
            wavelength_nm: 1550.12,
            coupling_loss_db: Decibel::lit(4.0),
            extra_loss_db: Decibel::lit(0.5),
            clearance_db: Decibel::lit(7.42),
            clearance_convention: ClearanceConvention::TotalOverElectronic,
            bandwidth_hz: 1.5e9,
        }
    }
}

impl ReceiverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.responsivity_a_per_w > 0.0) {
            return Err(Error::param("responsivity_a_per_w", "must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::param("bandwidth_hz", "must be positive"));
        }
        if self.coupling_loss_db.value() < 0.0 || self.extra_loss_db.value() < 0.0 {
            return Err(Error::param("loss", "losses must be non-negative"));
        }
        self.efficiency()?;
        self.electronic_noise()?;
        Ok(())
    }

    pub fn efficiency(&self) -> Result<f64> {
        detection_efficiency(self)
    }

    pub fn electronic_noise(&self) -> Result<f64> {
        electronic_noise_from_clearance(self.clearance_db, self.clearance_convention)
    }
}

/// Responsivity times the photon-energy factor, times coupling and extra loss.
pub fn detection_efficiency(rx: &ReceiverParams) -> Result<f64> {
    if !(rx.wavelength_nm > 1000.0 && rx.wavelength_nm < 2000.0) {
        return Err(Error::param("wavelength_nm", format!("{} outside (1000, 2000)", rx.wavelength_nm)));
    }
    let qe = rx.responsivity_a_per_w * HC_OVER_Q / rx.wavelength_nm;
    let loss = 10f64.powf(-(rx.coupling_loss_db.value() + rx.extra_loss_db.value()) / 10.0);
    let eta = qe * loss;
    if !(eta > 0.0 && eta <= 1.0 + 1e-12) {
        return Err(Error::param("detection efficiency", format!("{eta} outside (0, 1]")));
    }
    Ok(eta.min(1.0))
}

/// Electronic noise in SNU (shot noise = 1) from a clearance figure.
pub fn electronic_noise_from_clearance(clearance: Decibel, convention: ClearanceConvention) -> Result<f64> {
    if clearance.value() <= 0.0 {
        return Err(Error::param("clearance_db", format!("{} must be positive", clearance.value())));
    }
    let r = clearance.to_linear();
    Ok(match convention {
        ClearanceConvention::TotalOverElectronic => 1.0 / (r - 1.0),
        ClearanceConvention::ShotOverElectronic => 1.0 / r,
    })
}

/// Wiener phase walk with increments of variance `2 pi linewidth / fs`, starting at 0.
pub fn wiener_phase(n: usize, linewidth_hz: f64, sample_rate: f64, rng: &mut RngStream) -> Vec<f64> {
    let sigma = (2.0 * PI * linewidth_hz / sample_rate).sqrt();
    let mut phi = 0.0;
    (0..n)
        .map(|i| {
            if i > 0 && sigma > 0.0 {
                phi += sigma * rng.standard_normal();
            }
            phi
        })
        .collect()
}

fn complex_gaussian(n: usize, per_quadrature_var: f64, rng: &mut RngStream) -> Vec<Complex64> {
    let s = per_quadrature_var.sqrt();
    (0..n)
        .map(|_| Complex64::new(s * rng.standard_normal(), s * rng.standard_normal()))
        .collect()
}

/// Fiber and untrusted loss, excess noise, laser phase noise and frequency offset.
///
/// Excess noise is white complex Gaussian with per-quadrature variance
/// `T * eps` per sample, confined to the quantum waveform's band (its
/// center and bandwidth hints) before the shared rotation. Both branches
/// see the same `exp(i (phi(t) + 2 pi cfo t))`.
pub fn apply_channel(
    quantum: &Waveform,
    pilot: &Waveform,
    p: &ChannelParams,
    rng: &mut RngStream,
) -> Result<(Waveform, Waveform)> {
    p.validate()?;
    quantum.check_same_rate(pilot, "pilot")?;
    if quantum.len() != pilot.len() {
        return Err(Error::LengthMismatch {
            what: "quantum vs pilot",
            left: quantum.len(),
            right: pilot.len(),
        });
    }
    let fs = quantum.sample_rate();
    let n = quantum.len();
    let t = p.transmittance()?;
    let amp = t.sqrt();
    let mut phase_rng = rng.substream(1);
    let mut noise_rng = rng.substream(2);

    let mut q = quantum.to_complex_vec();
    q.iter_mut().for_each(|z| *z *= amp);
    if p.excess_noise_input > 0.0 {
        let e = complex_gaussian(n, t * p.excess_noise_input, &mut noise_rng);
        let mut e = Waveform::complex(e, fs)?;
        if let Some(bw) = quantum.bandwidth_hint {
            e = ideal_bandpass(&e, quantum.center_frequency_hint, bw)?;
        }
        for (z, v) in q.iter_mut().zip(e.as_complex().expect("complex")) {
            *z += v;
        }
    }
    let mut pl = pilot.to_complex_vec();
    pl.iter_mut().for_each(|z| *z *= amp);
    if let Some(x) = p.pbs_crosstalk_db {
        let leak = x.to_amplitude();
        for (a, b) in q.iter_mut().zip(pl.iter_mut()) {
            let (qa, pb) = (*a, *b);
            *a = qa + pb * leak;
            *b = pb + qa * leak;
        }
    }

    let phi = wiener_phase(n, p.combined_linewidth_hz, fs, &mut phase_rng);
    let w = 2.0 * PI * p.cfo_hz / fs;
    for (i, ((a, b), ph)) in q.iter_mut().zip(pl.iter_mut()).zip(&phi).enumerate() {
        let rot = Complex64::from_polar(1.0, ph + w * i as f64);
        *a *= rot;
        *b *= rot;
    }

    let q_out = quantum
        .with_samples(Samples::Complex(q))?
        .with_center(quantum.center_frequency_hint + p.cfo_hz);
    let p_out = pilot
        .with_samples(Samples::Complex(pl))?
        .with_center(pilot.center_frequency_hint + p.cfo_hz);
    Ok((q_out, p_out))
}

/// AOM gating: calibration slots attenuated by `extinction_db` in power.
///
/// `f64::INFINITY` blanks the calibration slots exactly.
pub fn aom_gate(w: &Waveform, schedule: &FrameSchedule, extinction_db: f64) -> Result<Waveform> {
    if schedule.total_len() != w.len() {
        return Err(Error::LengthMismatch {
            what: "schedule vs waveform",
            left: schedule.total_len(),
            right: w.len(),
        });
    }
    if !(extinction_db >= 0.0) {
        return Err(Error::param("extinction_db", format!("{extinction_db} < 0")));
    }
    let g = if extinction_db.is_infinite() {
        0.0
    } else {
        10f64.powf(-extinction_db / 20.0)
    };
    let mut out = w.clone();
    for slot in schedule.slots_of(SlotKind::Calibration) {
        if let Some(v) = out.as_real_mut() {
            v[slot.range()].iter_mut().for_each(|x| *x *= g);
        } else if let Some(v) = out.as_complex_mut() {
            v[slot.range()].iter_mut().for_each(|z| *z *= g);
        }
    }
    Ok(out)
}

/// Detector model derived from [`ReceiverParams`], with noise switches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detector {
    pub efficiency: f64,
    /// Electronic noise variance in SNU.
    pub electronic_noise: f64,
    /// LO on: shot noise present.
    pub shot_noise: bool,
    pub electronic_noise_on: bool,
}

impl Detector {
    pub fn from_receiver(rx: &ReceiverParams) -> Result<Self> {
        Ok(Self {
            efficiency: rx.efficiency()?,
            electronic_noise: rx.electronic_noise()?,
            shot_noise: true,
            electronic_noise_on: true,
        })
    }

    /// Transparent detector: unit efficiency, no noise.
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            electronic_noise: 0.0,
            shot_noise: false,
            electronic_noise_on: false,
        }
    }

    pub fn noise_variance(&self) -> f64 {
        let shot = if self.shot_noise { 1.0 } else { 0.0 };
        let el = if self.electronic_noise_on { self.electronic_noise } else { 0.0 };
        shot + el
    }

    /// Real IF trace of one branch: `sqrt(eta) Re(field)` plus white noise.
    pub fn detect(&self, field: &Waveform, rng: &mut RngStream) -> Result<Waveform> {
        let g = self.efficiency.sqrt();
        let s = self.noise_variance().sqrt();
        let x: Vec<f64> = match field.samples() {
            Samples::Real(v) => v.iter().map(|&x| g * x + s * rng.standard_normal()).collect(),
            Samples::Complex(v) => v.iter().map(|z| g * z.re + s * rng.standard_normal()).collect(),
        };
        let mut out = field.with_samples(Samples::Real(x))?;
        out.center_frequency_hint = field.center_frequency_hint.abs();
        Ok(out)
    }
}

/// Balanced heterodyne detection of both branches against an independent LO.
pub fn heterodyne_detect(
    quantum: &Waveform,
    pilot: &Waveform,
    det: &Detector,
    rng: &mut RngStream,
) -> Result<(Waveform, Waveform)> {
    quantum.check_same_rate(pilot, "pilot")?;
    let q = det.detect(quantum, &mut rng.substream(11))?;
    let p = det.detect(pilot, &mut rng.substream(12))?;
    Ok((q, p))
}
