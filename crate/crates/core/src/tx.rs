//! Alice's DSP: Gaussian symbols, QPSK training, pulse shaping with digital
//! up-conversion, pilot tone synthesis and the gated frame schedule.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{box_muller, design_rrc, upsample_and_filter};
use crate::{Decibel, Error, Result, RngStream, Waveform};

/// Stream id reserved for the training pattern so it never collides with
/// per-frame data streams.
const TRAINING_STREAM: u64 = 0x7261_696e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolRole {
    Data,
    Training,
}

/// Complex symbols `x + i p` with a role label per symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolFrame {
    pub symbols: Vec<Complex64>,
    pub roles: Vec<SymbolRole>,
    pub symbol_rate: f64,
}

impl SymbolFrame {
    pub fn new(symbols: Vec<Complex64>, roles: Vec<SymbolRole>, symbol_rate: f64) -> Result<Self> {
        if symbols.len() != roles.len() {
            return Err(Error::LengthMismatch {
                what: "symbols vs roles",
                left: symbols.len(),
                right: roles.len(),
            });
        }
        if !(symbol_rate > 0.0) {
            return Err(Error::param("symbol_rate", format!("{symbol_rate} must be positive")));
        }
        Ok(Self {
            symbols,
            roles,
            symbol_rate,
        })
    }

    /// Frame whose symbols are all data.
    pub fn data(symbols: Vec<Complex64>, symbol_rate: f64) -> Result<Self> {
        let roles = vec![SymbolRole::Data; symbols.len()];
        Self::new(symbols, roles, symbol_rate)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn indices(&self, role: SymbolRole) -> impl Iterator<Item = usize> + '_ {
        self.roles
            .iter()
            .enumerate()
            .filter(move |(_, r)| **r == role)
            .map(|(i, _)| i)
    }

    pub fn count(&self, role: SymbolRole) -> usize {
        self.roles.iter().filter(|r| **r == role).count()
    }

    /// Symbols with the given role, in frame order.
    pub fn select(&self, role: SymbolRole) -> Vec<Complex64> {
        self.indices(role).map(|i| self.symbols[i]).collect()
    }

    /// Same roles and rate, new symbol values.
    pub fn with_symbols(&self, symbols: Vec<Complex64>) -> Result<Self> {
        Self::new(symbols, self.roles.clone(), self.symbol_rate)
    }
}

/// i.i.d. Gaussian quadratures with per-quadrature variance `v_mod`.
///
/// Uniforms come from 16-bit words and go through Box-Muller.
pub fn generate_gaussian_symbols(
    n: usize,
    v_mod: f64,
    symbol_rate: f64,
    rng: &mut RngStream,
) -> Result<SymbolFrame> {
    if n == 0 {
        return Err(Error::param("n", "need at least one symbol"));
    }
    if !(v_mod >= 0.0) || !v_mod.is_finite() {
        return Err(Error::param("v_mod", format!("{v_mod} must be non-negative")));
    }
    let s = v_mod.sqrt();
    let symbols = (0..n)
        .map(|_| {
            let (u1, u2) = rng.uniform16_pair();
            let (x, p) = box_muller(u1, u2)?;
            Ok(Complex64::new(s * x, s * p))
        })
        .collect::<Result<Vec<_>>>()?;
    SymbolFrame::data(symbols, symbol_rate)
}

/// Deterministic QPSK training sequence `{+-1 +-i} * sqrt(v_mod)`.
///
/// Each quadrature has variance `v_mod`, matching the data symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingPattern {
    pub seed: u64,
    pub v_mod: f64,
}

impl TrainingPattern {
    pub fn new(seed: u64, v_mod: f64) -> Self {
        Self { seed, v_mod }
    }

    pub fn amplitude(&self) -> f64 {
        self.v_mod.sqrt()
    }

    /// First `count` symbols of the sequence.
    pub fn symbols(&self, count: usize) -> Vec<Complex64> {
        let mut rng = RngStream::new(self.seed, TRAINING_STREAM);
        let a = self.amplitude();
        let mut out = Vec::with_capacity(count);
        let mut word = 0u32;
        for i in 0..count {
            if i % 16 == 0 {
                word = rand::RngCore::next_u32(&mut rng);
            }
            let bits = (word >> (2 * (i % 16))) & 3;
            let re = if bits & 1 == 0 { a } else { -a };
            let im = if bits & 2 == 0 { a } else { -a };
            out.push(Complex64::new(re, im));
        }
        out
    }
}

/// Training period: one training symbol every `period` positions.
pub fn training_period(ratio: f64) -> Result<usize> {
    if !(ratio > 0.0 && ratio <= 0.5) {
        return Err(Error::param("training_ratio", format!("{ratio} outside (0, 0.5]")));
    }
    Ok((1.0 / ratio).round() as usize)
}

/// Total frame length for `data` symbols at the given training period.
pub fn interleaved_len(data: usize, period: usize) -> usize {
    data + data / (period - 1)
}

/// Insert training symbols at every position `k` with `k % P == P - 1`,
/// where `P = round(1 / ratio)`.
pub fn interleave_training(
    data: &SymbolFrame,
    training_ratio: f64,
    pattern: &TrainingPattern,
) -> Result<SymbolFrame> {
    let period = training_period(training_ratio)?;
    let total = interleaved_len(data.len(), period);
    let training = pattern.symbols(total / period);
    let mut symbols = Vec::with_capacity(total);
    let mut roles = Vec::with_capacity(total);
    let mut d = data.symbols.iter();
    let mut t = training.iter();
    for k in 0..total {
        if k % period == period - 1 {
            symbols.push(*t.next().expect("training count"));
            roles.push(SymbolRole::Training);
        } else {
            symbols.push(*d.next().expect("data count"));
            roles.push(SymbolRole::Data);
        }
    }
    SymbolFrame::new(symbols, roles, data.symbol_rate)
}

/// Receiver-side knowledge of the training layout of a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingReference {
    pub period: usize,
    pub total_symbols: usize,
    /// Known training values in frame order.
    pub symbols: Vec<Complex64>,
}

impl TrainingReference {
    pub fn new(data_symbols: usize, training_ratio: f64, pattern: &TrainingPattern) -> Result<Self> {
        let period = training_period(training_ratio)?;
        let total_symbols = interleaved_len(data_symbols, period);
        Ok(Self {
            period,
            total_symbols,
            symbols: pattern.symbols(total_symbols / period),
        })
    }

    /// Frame positions of the training symbols.
    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.symbols.len()).map(move |j| j * self.period + self.period - 1)
    }

    pub fn roles(&self) -> Vec<SymbolRole> {
        (0..self.total_symbols)
            .map(|k| {
                if k % self.period == self.period - 1 {
                    SymbolRole::Training
                } else {
                    SymbolRole::Data
                }
            })
            .collect()
    }
}

/// Split a frame into its data symbols (as a data frame) and training symbols.
pub fn deinterleave(frame: &SymbolFrame) -> Result<(SymbolFrame, Vec<Complex64>)> {
    let data = SymbolFrame::data(frame.select(SymbolRole::Data), frame.symbol_rate)?;
    Ok((data, frame.select(SymbolRole::Training)))
}

/// Which optical sideband carries the quantum signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sideband {
    Lower,
    Upper,
}

impl Sideband {
    pub fn sign(self) -> f64 {
        match self {
            Sideband::Lower => -1.0,
            Sideband::Upper => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapingConfig {
    pub samples_per_symbol: usize,
    pub rolloff: f64,
    pub span_symbols: usize,
    pub f_shift_hz: f64,
    pub sample_rate: f64,
    pub sideband: Sideband,
    /// Residual optical carrier relative to the mean quantum power; `None` disables it.
    pub residual_carrier_dbc: Option<Decibel>,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        Self {
            samples_per_symbol: 5,
            rolloff: 0.3,
            span_symbols: 32,
            f_shift_hz: 750e6,
            sample_rate: 5e9,
            sideband: Sideband::Lower,
            residual_carrier_dbc: Some(Decibel::lit(-50.0)),
        }
    }
}

impl ShapingConfig {
    pub fn symbol_rate(&self) -> f64 {
        self.sample_rate / self.samples_per_symbol as f64
    }

    pub fn occupied_bandwidth(&self) -> f64 {
        (1.0 + self.rolloff) * self.symbol_rate()
    }

    /// Signed center of the quantum band in the optical field.
    pub fn field_center(&self) -> f64 {
        self.sideband.sign() * self.f_shift_hz
    }

    /// Number of samples produced for `symbols` symbols.
    pub fn output_len(&self, symbols: usize) -> usize {
        self.samples_per_symbol * symbols + self.span_symbols * self.samples_per_symbol
    }

    /// Delay in samples from symbol 0 to the peak of its pulse.
    pub fn pulse_delay(&self) -> usize {
        self.span_symbols * self.samples_per_symbol / 2
    }
}

/// Zero-insertion upsampling, RRC shaping and a complex shift to the
/// configured sideband.
///
/// The result is the complex analytic optical field; its real part is the
/// AWG drive. Symbol `k` peaks at sample `k * sps + pulse_delay()`.
pub fn shape_and_upconvert(frame: &SymbolFrame, cfg: &ShapingConfig) -> Result<Waveform> {
    let sps = cfg.samples_per_symbol;
    let expected_fs = sps as f64 * frame.symbol_rate;
    if ((cfg.sample_rate - expected_fs) / cfg.sample_rate).abs() > 1e-9 {
        return Err(Error::param(
            "sample_rate",
            format!("{} != sps * symbol rate = {expected_fs}", cfg.sample_rate),
        ));
    }
    let half_bw = cfg.occupied_bandwidth() / 2.0;
    let nyq = cfg.sample_rate / 2.0;
    if cfg.f_shift_hz - half_bw <= 0.0 || cfg.f_shift_hz + half_bw >= nyq {
        return Err(Error::BandOutsideNyquist {
            low_hz: cfg.f_shift_hz - half_bw,
            high_hz: cfg.f_shift_hz + half_bw,
            nyquist_hz: nyq,
        });
    }
    let taps = design_rrc(cfg.rolloff, cfg.span_symbols, sps)?;
    let mut field = upsample_and_filter(&frame.symbols, sps, &taps);
    let w = 2.0 * PI * cfg.field_center() / cfg.sample_rate;
    for (n, z) in field.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, w * n as f64);
    }
    if let Some(dbc) = cfg.residual_carrier_dbc {
        let v_mod = nominal_v_mod(frame);
        let p_signal = 2.0 * v_mod / sps as f64;
        let c = (p_signal * dbc.to_linear()).sqrt();
        field.iter_mut().for_each(|z| z.re += c);
    }
    Ok(Waveform::complex(field, cfg.sample_rate)?
        .with_center(cfg.field_center())
        .with_bandwidth(cfg.occupied_bandwidth()))
}

fn nominal_v_mod(frame: &SymbolFrame) -> f64 {
    let n = frame.len().max(1) as f64;
    frame.symbols.iter().map(|z| z.norm_sqr()).sum::<f64>() / (2.0 * n)
}

/// Constant-amplitude complex tone at `f_pilot` carrying `power_ratio` more
/// power than `reference_power` (the mean quantum-signal power).
pub fn synthesize_pilot(
    sample_rate: f64,
    f_pilot: f64,
    power_ratio: Decibel,
    reference_power: f64,
    length: usize,
    quantum_band: (f64, f64),
) -> Result<Waveform> {
    if !(f_pilot > 0.0 && f_pilot < sample_rate / 2.0) {
        return Err(Error::param("f_pilot", format!("{f_pilot} outside (0, fs/2)")));
    }
    let (lo, hi) = (quantum_band.0.min(quantum_band.1), quantum_band.0.max(quantum_band.1));
    if f_pilot >= lo && f_pilot <= hi {
        return Err(Error::PilotCollision {
            pilot_hz: f_pilot,
            low_hz: lo,
            high_hz: hi,
        });
    }
    let amp = (reference_power * power_ratio.to_linear()).sqrt();
    let w = 2.0 * PI * f_pilot / sample_rate;
    let tone = (0..length)
        .map(|n| Complex64::from_polar(amp, w * n as f64))
        .collect();
    Ok(Waveform::complex(tone, sample_rate)?.with_center(f_pilot))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Signal,
    Calibration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub kind: SlotKind,
    pub start: usize,
    pub len: usize,
}

impl Slot {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Ordered, gap-free partition of a frame into signal and calibration slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSchedule {
    pub slots: Vec<Slot>,
    pub usable_fraction: f64,
}

impl FrameSchedule {
    pub fn total_len(&self) -> usize {
        self.slots.last().map_or(0, |s| s.start + s.len)
    }

    pub fn slots_of(&self, kind: SlotKind) -> impl Iterator<Item = &Slot> {
        self.slots.iter().filter(move |s| s.kind == kind)
    }
}

/// Alternating signal/calibration slots with signal share `1 - overhead`.
///
/// Each period is one signal slot followed by one calibration slot of
/// `calib_slot` samples; the frame must hold a whole number of periods.
pub fn build_frame_schedule(total: usize, overhead: f64, calib_slot: usize) -> Result<FrameSchedule> {
    if !(0.0..1.0).contains(&overhead) {
        return Err(Error::param("overhead", format!("{overhead} outside [0, 1)")));
    }
    if total == 0 {
        return Err(Error::Schedule("frame has no samples".into()));
    }
    if overhead == 0.0 {
        return Ok(FrameSchedule {
            slots: vec![Slot {
                kind: SlotKind::Signal,
                start: 0,
                len: total,
            }],
            usable_fraction: 1.0,
        });
    }
    if calib_slot == 0 {
        return Err(Error::Schedule("calibration slot length is zero".into()));
    }
    let signal_exact = calib_slot as f64 * (1.0 - overhead) / overhead;
    let signal = signal_exact.round() as usize;
    if signal == 0 || (signal_exact - signal as f64).abs() > 1e-9 * signal_exact.max(1.0) {
        return Err(Error::Schedule(format!(
            "calibration slot {calib_slot} gives non-integer signal slot {signal_exact}"
        )));
    }
    let period = signal + calib_slot;
    if !total.is_multiple_of(period) {
        return Err(Error::Schedule(format!(
            "frame of {total} samples is not a multiple of the slot period {period}"
        )));
    }
    let mut slots = Vec::with_capacity(2 * total / period);
    for p in 0..total / period {
        let start = p * period;
        slots.push(Slot {
            kind: SlotKind::Signal,
            start,
            len: signal,
        });
        slots.push(Slot {
            kind: SlotKind::Calibration,
            start: start + signal,
            len: calib_slot,
        });
    }
    Ok(FrameSchedule {
        slots,
        usable_fraction: signal as f64 / period as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{convolve_full, fft_in_place, frequency_of_bin};
    use proptest::prelude::*;

    #[test]
    fn zero_variance_gives_zero_symbols() {
        let mut rng = RngStream::new(1, 0);
        let f = generate_gaussian_symbols(100, 0.0, 1e9, &mut rng).unwrap();
        assert!(f.symbols.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        assert!(f.roles.iter().all(|r| *r == SymbolRole::Data));
    }

    #[test]
    fn gaussian_variance_within_chi_square_bound() {
        let mut rng = RngStream::new(11, 3);
        let f = generate_gaussian_symbols(1_000_000, 8.0, 1e9, &mut rng).unwrap();
        let n = f.len() as f64;
        let vx = f.symbols.iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let vp = f.symbols.iter().map(|z| z.im * z.im).sum::<f64>() / n;
        assert!((7.93..=8.07).contains(&vx), "{vx}");
        assert!((7.93..=8.07).contains(&vp), "{vp}");
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_gaussian_symbols(500, 8.0, 1e9, &mut RngStream::new(4, 9)).unwrap();
        let b = generate_gaussian_symbols(500, 8.0, 1e9, &mut RngStream::new(4, 9)).unwrap();
        assert_eq!(a, b);
        let c = generate_gaussian_symbols(500, 8.0, 1e9, &mut RngStream::new(4, 10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn every_tenth_symbol_is_training() {
        let mut rng = RngStream::new(2, 0);
        let data = generate_gaussian_symbols(900, 8.0, 1e9, &mut rng).unwrap();
        let pat = TrainingPattern::new(77, 8.0);
        let f = interleave_training(&data, 0.1, &pat).unwrap();
        assert_eq!(f.len(), 1000);
        for (k, r) in f.roles.iter().enumerate() {
            assert_eq!(*r == SymbolRole::Training, k % 10 == 9);
        }
        let (back, training) = deinterleave(&f).unwrap();
        assert_eq!(back, data);
        let reference = TrainingReference::new(900, 0.1, &pat).unwrap();
        assert_eq!(reference.roles(), f.roles);
        assert_eq!(reference.symbols, training);
        assert!(reference.positions().all(|k| f.roles[k] == SymbolRole::Training));
        assert_eq!(training, pat.symbols(100));
        for t in &training {
            assert!((t.re.abs() - 8f64.sqrt()).abs() < 1e-15);
            assert!((t.im.abs() - 8f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn training_ratio_validated() {
        let data = SymbolFrame::data(vec![Complex64::new(1.0, 0.0); 10], 1.0).unwrap();
        let pat = TrainingPattern::new(1, 1.0);
        assert!(interleave_training(&data, 0.0, &pat).is_err());
        assert!(interleave_training(&data, 0.6, &pat).is_err());
        assert!(interleave_training(&data, 0.5, &pat).is_ok());
    }

    #[test]
    fn training_pattern_uses_all_four_points() {
        let s = TrainingPattern::new(3, 1.0).symbols(4000);
        for (re, im) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let c = s.iter().filter(|z| z.re == re && z.im == im).count();
            assert!((900..1100).contains(&c), "{c}");
        }
    }

    fn cfg_no_carrier() -> ShapingConfig {
        ShapingConfig {
            residual_carrier_dbc: None,
            ..ShapingConfig::default()
        }
    }

    #[test]
    fn zero_frame_gives_zero_waveform() {
        let f = SymbolFrame::data(vec![Complex64::new(0.0, 0.0); 64], 1e9).unwrap();
        let w = shape_and_upconvert(&f, &cfg_no_carrier()).unwrap();
        assert!(w.as_complex().unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn single_symbol_is_shifted_modulated_pulse() {
        let cfg = cfg_no_carrier();
        let mut s = vec![Complex64::new(0.0, 0.0); 20];
        s[3] = Complex64::new(1.0, 0.0);
        let f = SymbolFrame::data(s, 1e9).unwrap();
        let w = shape_and_upconvert(&f, &cfg).unwrap();
        let taps = design_rrc(0.3, 32, 5).unwrap();
        let y = w.as_complex().unwrap();
        for (n, z) in y.iter().enumerate() {
            let h = if (15..15 + taps.len()).contains(&n) { taps[n - 15] } else { 0.0 };
            let want = Complex64::from_polar(h, -2.0 * PI * 750e6 * n as f64 / 5e9);
            assert!((z - want).norm() < 1e-12);
        }
        // Independent reference: explicit zero-stuffed convolution.
        let mut up = vec![Complex64::new(0.0, 0.0); 100];
        up[15] = Complex64::new(1.0, 0.0);
        let c = convolve_full(&up, &taps);
        for n in 0..y.len() {
            assert!((y[n].norm() - c[n].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_sideband_beyond_nyquist() {
        let f = SymbolFrame::data(vec![Complex64::new(1.0, 0.0); 8], 1e9).unwrap();
        let cfg = ShapingConfig {
            f_shift_hz: 2.0e9,
            ..cfg_no_carrier()
        };
        assert!(matches!(shape_and_upconvert(&f, &cfg), Err(Error::BandOutsideNyquist { .. })));
        let cfg = ShapingConfig {
            f_shift_hz: 0.5e9,
            ..cfg_no_carrier()
        };
        assert!(shape_and_upconvert(&f, &cfg).is_err());
    }

    #[test]
    fn spectrum_confined_and_occupies_bandwidth() {
        let mut rng = RngStream::new(8, 1);
        let f = generate_gaussian_symbols(8192, 8.0, 1e9, &mut rng).unwrap();
        let w = shape_and_upconvert(&f, &cfg_no_carrier()).unwrap();
        let mut x = w.to_complex_vec();
        let n = x.len();
        fft_in_place(&mut x, false);
        let (mut inside, mut outside) = (0.0, 0.0);
        let edge = 0.65e9 * 1.05;
        for (k, z) in x.iter().enumerate() {
            let f = frequency_of_bin(k, n, 5e9);
            if (f + 750e6).abs() <= edge {
                inside += z.norm_sqr();
            } else {
                outside += z.norm_sqr();
            }
        }
        assert!(10.0 * (outside / inside).log10() < -40.0);

        // -20 dB occupied bandwidth from the smoothed PSD.
        let psd = crate::dsp::welch_psd(w.as_complex().unwrap(), 1000);
        let peak = psd.iter().cloned().fold(0.0, f64::max);
        let above: Vec<f64> = (0..1000)
            .filter(|&k| psd[k] >= peak * 0.01)
            .map(|k| frequency_of_bin(k, 1000, 5e9))
            .collect();
        let lo = above.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = above.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let occupied = hi - lo;
        assert!((occupied - 1.3e9).abs() < 0.1e9, "{occupied}");
    }

    #[test]
    fn residual_carrier_level() {
        let f = SymbolFrame::data(vec![Complex64::new(2.0, 2.0); 100], 1e9).unwrap();
        let on = shape_and_upconvert(&f, &ShapingConfig::default()).unwrap();
        let off = shape_and_upconvert(&f, &cfg_no_carrier()).unwrap();
        let d = on.as_complex().unwrap()[0] - off.as_complex().unwrap()[0];
        let want = (2.0 * 4.0 / 5.0 * 1e-5f64).sqrt();
        assert!((d.re - want).abs() < 1e-15 && d.im == 0.0);
    }

    #[test]
    fn pilot_power_and_line() {
        let p = synthesize_pilot(5e9, 200e6, Decibel::lit(20.0), 0.5, 10_000, (-1.4e9, -0.1e9)).unwrap();
        assert!((p.mean_power() - 50.0).abs() < 1e-9);
        let p0 = synthesize_pilot(5e9, 200e6, Decibel::lit(0.0), 0.5, 10_000, (-1.4e9, -0.1e9)).unwrap();
        assert!((p0.mean_power().sqrt() - 0.5f64.sqrt()).abs() < 1e-12);
        let mut x = p.to_complex_vec();
        fft_in_place(&mut x, false);
        let total: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let line = x[400].norm_sqr();
        assert!((line / total - 1.0).abs() < 1e-12);
        assert!(matches!(
            synthesize_pilot(5e9, 200e6, Decibel::lit(20.0), 1.0, 10, (0.1e9, 1.4e9)),
            Err(Error::PilotCollision { .. })
        ));
    }

    #[test]
    fn schedule_examples() {
        let s = build_frame_schedule(1000, 0.5, 250).unwrap();
        assert_eq!(s.slots.len(), 4);
        assert!(s.slots.iter().all(|x| x.len == 250));
        assert_eq!(s.usable_fraction, 0.5);
        let s = build_frame_schedule(1000, 0.0, 0).unwrap();
        assert_eq!(s.slots.len(), 1);
        assert_eq!(s.usable_fraction, 1.0);
        assert!(build_frame_schedule(1000, 0.5, 300).is_err());
        assert!(build_frame_schedule(1000, 1.0, 10).is_err());
    }

    #[test]
    fn schedules_tile_exhaustively() {
        for total in 1..=60 {
            for calib in 1..=total {
                for overhead in [0.0, 0.2, 0.25, 0.5, 0.75] {
                    if let Ok(s) = build_frame_schedule(total, overhead, calib) {
                        let mut next = 0;
                        for slot in &s.slots {
                            assert_eq!(slot.start, next);
                            assert!(slot.len > 0);
                            next += slot.len;
                        }
                        assert_eq!(next, total);
                        assert!((s.usable_fraction - (1.0 - overhead)).abs() < 1e-12);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn shaping_is_linear(seed in 0u64..1000, a in -3.0f64..3.0) {
            let cfg = cfg_no_carrier();
            let mut rng = RngStream::new(seed, 0);
            let f1 = generate_gaussian_symbols(40, 8.0, 1e9, &mut rng).unwrap();
            let f2 = generate_gaussian_symbols(40, 8.0, 1e9, &mut rng).unwrap();
            let sum: Vec<Complex64> = f1.symbols.iter().zip(&f2.symbols).map(|(x, y)| x * a + y).collect();
            let fs = SymbolFrame::data(sum, 1e9).unwrap();
            let y1 = shape_and_upconvert(&f1, &cfg).unwrap();
            let y2 = shape_and_upconvert(&f2, &cfg).unwrap();
            let ys = shape_and_upconvert(&fs, &cfg).unwrap();
            for ((p, q), s) in y1.as_complex().unwrap().iter().zip(y2.as_complex().unwrap()).zip(ys.as_complex().unwrap()) {
                prop_assert!((p * a + q - s).norm() < 1e-12);
            }
        }

        #[test]
        fn interleave_round_trip(n in 1usize..400, inv in 2usize..20, seed in 0u64..50) {
            let ratio = 1.0 / inv as f64;
            let mut rng = RngStream::new(seed, 1);
            let data = generate_gaussian_symbols(n, 1.0, 1e9, &mut rng).unwrap();
            let f = interleave_training(&data, ratio, &TrainingPattern::new(seed, 1.0)).unwrap();
            prop_assert_eq!(f.len(), interleaved_len(n, inv));
            let (back, _) = deinterleave(&f).unwrap();
            prop_assert_eq!(back, data);
        }
    }
}
