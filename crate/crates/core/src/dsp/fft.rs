use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward or inverse FFT. The inverse is scaled by 1/N.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n == 0 {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    plan.process(buf);
    if inverse {
        let s = 1.0 / n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }
}

/// Signed frequency of DFT bin `k` for an `n`-point transform.
pub fn frequency_of_bin(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = k as f64;
    let nf = n as f64;
    if k < nf / 2.0 {
        k * sample_rate / nf
    } else {
        (k - nf) * sample_rate / nf
    }
}

/// Smallest 5-smooth integer (2^a 3^b 5^c) not below `n`.
pub fn next_fast_len(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let mut best = usize::MAX;
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut v = p35;
            while v < n {
                v *= 2;
            }
            best = best.min(v);
            if p35 >= n {
                break;
            }
            p35 *= 3;
        }
        if p5 >= n {
            break;
        }
        p5 *= 5;
    }
    best
}

/// Averaged periodogram over non-overlapping Hann-windowed segments.
///
/// Returns `seg_len` bins in FFT order (power per bin, arbitrary scale).
pub fn welch_psd(x: &[Complex64], seg_len: usize) -> Vec<f64> {
    let segments = x.len() / seg_len;
    let window = hann(seg_len);
    let mut acc = vec![0.0; seg_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); seg_len];
    for s in 0..segments {
        let chunk = &x[s * seg_len..(s + 1) * seg_len];
        for ((b, &v), &w) in buf.iter_mut().zip(chunk).zip(&window) {
            *b = v * w;
        }
        fft_in_place(&mut buf, false);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let norm = 1.0 / segments.max(1) as f64;
    acc.iter_mut().for_each(|a| *a *= norm);
    acc
}

pub(crate) fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
        .collect()
}
