//! Uniformly sampled signal buffers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Samples {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Real(v) => v.len(),
            Samples::Complex(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A sampled signal with its rate and spectral placement.
///
/// `center_frequency_hint` and `bandwidth_hint` describe where the useful
/// content sits (signed frequency for complex buffers); they are metadata
/// only and never alter the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    samples: Samples,
    sample_rate: f64,
    pub center_frequency_hint: f64,
    pub bandwidth_hint: Option<f64>,
}

impl Waveform {
    pub fn new(samples: Samples, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::param("sample_rate", format!("{sample_rate} must be positive")));
        }
        if samples.is_empty() {
            return Err(Error::param("samples", "waveform must not be empty"));
        }
        Ok(Self {
            samples,
            sample_rate,
            center_frequency_hint: 0.0,
            bandwidth_hint: None,
        })
    }

    pub fn real(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        Self::new(Samples::Real(samples), sample_rate)
    }

    pub fn complex(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        Self::new(Samples::Complex(samples), sample_rate)
    }

    pub fn with_center(mut self, center_hz: f64) -> Self {
        self.center_frequency_hint = center_hz;
        self
    }

    pub fn with_bandwidth(mut self, bandwidth_hz: f64) -> Self {
        self.bandwidth_hint = Some(bandwidth_hz);
        self
    }

    /// Same metadata, new samples. Length may change; it must stay non-empty.
    pub fn with_samples(&self, samples: Samples) -> Result<Self> {
        let mut out = Self::new(samples, self.sample_rate)?;
        out.center_frequency_hint = self.center_frequency_hint;
        out.bandwidth_hint = self.bandwidth_hint;
        Ok(out)
    }

    pub fn samples(&self) -> &Samples {
        &self.samples
    }

    pub fn into_samples(self) -> Samples {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.samples, Samples::Complex(_))
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    pub fn as_real(&self) -> Option<&[f64]> {
        match &self.samples {
            Samples::Real(v) => Some(v),
            Samples::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&[Complex64]> {
        match &self.samples {
            Samples::Complex(v) => Some(v),
            Samples::Real(_) => None,
        }
    }

    pub fn as_complex_mut(&mut self) -> Option<&mut Vec<Complex64>> {
        match &mut self.samples {
            Samples::Complex(v) => Some(v),
            Samples::Real(_) => None,
        }
    }

    pub fn as_real_mut(&mut self) -> Option<&mut Vec<f64>> {
        match &mut self.samples {
            Samples::Real(v) => Some(v),
            Samples::Complex(_) => None,
        }
    }

    /// Samples promoted to complex (real buffers get a zero imaginary part).
    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        match &self.samples {
            Samples::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Samples::Complex(v) => v.clone(),
        }
    }

    /// Real part of a complex buffer; a real buffer is returned unchanged.
    pub fn real_part(&self) -> Waveform {
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real(v.clone()),
            Samples::Complex(v) => Samples::Real(v.iter().map(|z| z.re).collect()),
        };
        let mut out = self.with_samples(samples).expect("non-empty");
        if self.is_complex() {
            out.center_frequency_hint = self.center_frequency_hint.abs();
        }
        out
    }

    /// Mean of |x|^2 over all samples.
    pub fn mean_power(&self) -> f64 {
        let n = self.len() as f64;
        match &self.samples {
            Samples::Real(v) => v.iter().map(|x| x * x).sum::<f64>() / n,
            Samples::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>() / n,
        }
    }

    pub fn slice(&self, start: usize, len: usize) -> Result<Waveform> {
        if start + len > self.len() || len == 0 {
            return Err(Error::param(
                "slice",
                format!("[{start}, {}) outside waveform of length {}", start + len, self.len()),
            ));
        }
        let samples = match &self.samples {
            Samples::Real(v) => Samples::Real(v[start..start + len].to_vec()),
            Samples::Complex(v) => Samples::Complex(v[start..start + len].to_vec()),
        };
        self.with_samples(samples)
    }

    /// Zero-pad (or truncate) to `len` samples.
    pub fn resized(&self, len: usize) -> Result<Waveform> {
        let samples = match &self.samples {
            Samples::Real(v) => {
                let mut v = v.clone();
                v.resize(len, 0.0);
                Samples::Real(v)
            }
            Samples::Complex(v) => {
                let mut v = v.clone();
                v.resize(len, Complex64::new(0.0, 0.0));
                Samples::Complex(v)
            }
        };
        self.with_samples(samples)
    }

    pub(crate) fn check_same_rate(&self, other: &Waveform, what: &'static str) -> Result<()> {
        let rel = (self.sample_rate - other.sample_rate).abs() / self.sample_rate;
        if rel > 1e-12 {
            return Err(Error::param(
                what,
                format!("sample rates differ: {} vs {}", self.sample_rate, other.sample_rate),
            ));
        }
        Ok(())
    }
}
