use std::f64::consts::PI;
use std::ops::{AddAssign, Mul};

use num_complex::Complex64;

use crate::{Error, Result, Samples, Waveform};

const STOPBAND_DB: f64 = 80.0;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser-windowed sinc low-pass, odd length and symmetric.
///
/// `cutoff` and `transition` are fractions of the sample rate; the window
/// is sized for `stopband_db` of attenuation. DC gain is 1.
pub fn kaiser_lowpass(cutoff: f64, transition: f64, stopband_db: f64) -> Vec<f64> {
    let beta = if stopband_db > 50.0 {
        0.1102 * (stopband_db - 8.7)
    } else if stopband_db >= 21.0 {
        0.5842 * (stopband_db - 21.0).powf(0.4) + 0.07886 * (stopband_db - 21.0)
    } else {
        0.0
    };
    let order = ((stopband_db - 7.95) / (2.285 * 2.0 * PI * transition)).ceil() as usize;
    let half = order.div_ceil(2).max(1);
    let norm = bessel_i0(beta);
    let mut h: Vec<f64> = (0..=2 * half)
        .map(|i| {
            let j = i as f64 - half as f64;
            let r = j / half as f64;
            let win = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / norm;
            let x = 2.0 * cutoff * j;
            let sinc = if j == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
            2.0 * cutoff * sinc * win
        })
        .collect();
    let s: f64 = h.iter().sum();
    h.iter_mut().for_each(|v| *v /= s);
    h
}

struct Polyphase {
    up: usize,
    down: usize,
    // Per phase: smallest branch offset and its taps.
    branches: Vec<(i64, Vec<f64>)>,
}

impl Polyphase {
    fn new(up: usize, down: usize, proto: &[f64]) -> Self {
        let half = (proto.len() / 2) as i64;
        let upi = up as i64;
        let branches = (0..upi)
            .map(|r| {
                let d_min = (-half - r).div_euclid(upi) + i64::from((-half - r).rem_euclid(upi) != 0);
                let d_max = (half - r).div_euclid(upi);
                let taps = (d_min..=d_max)
                    .map(|d| proto[(d * upi + r + half) as usize] * up as f64)
                    .collect();
                (d_min, taps)
            })
            .collect();
        Polyphase { up, down, branches }
    }

    fn run<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        let out_len = (x.len() * self.up).div_ceil(self.down);
        let n = x.len() as i64;
        (0..out_len)
            .map(|m| {
                let pos = (m * self.down) as i64;
                let q = pos.div_euclid(self.up as i64);
                let r = pos.rem_euclid(self.up as i64) as usize;
                let (d_min, taps) = &self.branches[r];
                let mut acc = T::default();
                for (i, &t) in taps.iter().enumerate() {
                    let k = q - (d_min + i as i64);
                    if (0..n).contains(&k) {
                        acc += x[k as usize] * t;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Rational-rate conversion by `up / down` with a zero-delay anti-alias filter.
///
/// Output sample `m` sits at input time `m * down / up`. The low-pass cuts
/// at 0.95 of the lower Nyquist frequency with an 80 dB Kaiser design.
pub fn resample(w: &Waveform, up: usize, down: usize) -> Result<Waveform> {
    if up == 0 || down == 0 {
        return Err(Error::param("up/down", "rates must be at least 1"));
    }
    if gcd(up, down) != 1 {
        return Err(Error::param("up/down", format!("{up}/{down} not coprime")));
    }
    if up == 1 && down == 1 {
        return Ok(w.clone());
    }
    let fs_up = w.sample_rate() * up as f64;
    let nyq_min = 0.5 * w.sample_rate().min(w.sample_rate() * up as f64 / down as f64);
    let proto = kaiser_lowpass(0.95 * nyq_min / fs_up, 0.1 * nyq_min / fs_up, STOPBAND_DB);
    let pp = Polyphase::new(up, down, &proto);
    let samples = match w.samples() {
        Samples::Real(x) => Samples::Real(pp.run(x)),
        Samples::Complex(x) => Samples::Complex(pp.run::<Complex64>(x)),
    };
    let mut out = Waveform::new(samples, w.sample_rate() * up as f64 / down as f64)?;
    out.center_frequency_hint = w.center_frequency_hint;
    out.bandwidth_hint = w.bandwidth_hint;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::welch_psd;
    use crate::RngStream;

    #[test]
    fn identity_is_bit_exact() {
        let w = Waveform::real(vec![0.1, -2.0, 3.5], 5.0).unwrap();
        assert_eq!(resample(&w, 1, 1).unwrap(), w);
        assert!(resample(&w, 2, 4).is_err());
        assert!(resample(&w, 0, 1).is_err());
    }

    #[test]
    fn bessel_reference() {
        assert_eq!(bessel_i0(0.0), 1.0);
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(5.0) - 27.239_871_823_604_45).abs() < 1e-11);
    }

    #[test]
    fn tone_amplitude_preserved_five_to_four() {
        let fs = 5e9;
        for f in [100.0, 3.0e8, 1.7e9] {
            let x: Vec<f64> = (0..40_000).map(|i| (2.0 * PI * f * i as f64 / fs).cos()).collect();
            let y = resample(&Waveform::real(x, fs).unwrap(), 4, 5).unwrap();
            assert_eq!(y.sample_rate(), 4e9);
            let y = y.as_real().unwrap();
            for (m, v) in y.iter().enumerate().skip(1000).take(y.len() - 2000) {
                let want = (2.0 * PI * f * m as f64 / 4e9).cos();
                assert!((v - want).abs() < 1e-3, "f={f} m={m}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn up_then_down_keeps_noise_spectrum() {
        let mut rng = RngStream::new(5, 0);
        let x: Vec<Complex64> = (0..1 << 16)
            .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()))
            .collect();
        let w = Waveform::complex(x.clone(), 1.0).unwrap();
        let back = resample(&resample(&w, 2, 1).unwrap(), 1, 2).unwrap();
        let a = welch_psd(&x, 256);
        let b = welch_psd(back.as_complex().unwrap(), 256);
        // Compare bins well inside the 0.95 Nyquist passband.
        for k in (0..256).filter(|&k| {
            let f = if k < 128 { k } else { 256 - k };
            f < 115
        }) {
            let ratio = b[k] / a[k];
            assert!((ratio - 1.0).abs() < 0.02, "bin {k}: {ratio}");
        }
    }
}
