//! Gaussian symbols through RRC shaping and the sideband shift, with the
//! pilot tone placed outside the quantum band.
//!
//! ```text
//! cargo run --release -p cvqkd --example pulse_shaping
//! ```

use cvqkd::dsp::{design_rrc, frequency_of_bin, welch_psd};
use cvqkd::tx::{generate_gaussian_symbols, shape_and_upconvert, synthesize_pilot, ShapingConfig};
use cvqkd::{Decibel, RngStream};

fn main() -> cvqkd::Result<()> {
    let cfg = ShapingConfig::default();
    let frame = generate_gaussian_symbols(1 << 15, 8.0, cfg.symbol_rate(), &mut RngStream::new(1, 0))?;
    let field = shape_and_upconvert(&frame, &cfg)?;
    let center = cfg.field_center();
    let half = cfg.occupied_bandwidth() / 2.0;
    println!(
        "{} symbols -> {} samples at {:.1} GS/s, band {:.0} MHz +- {:.0} MHz",
        frame.len(),
        field.len(),
        cfg.sample_rate / 1e9,
        center / 1e6,
        half / 1e6
    );

    let pilot = synthesize_pilot(cfg.sample_rate, 200e6, Decibel::new(20.0)?, field.mean_power(), field.len(), (center - half, center + half))?;
    println!("pilot power / quantum power: {:.1} dB", 10.0 * (pilot.mean_power() / field.mean_power()).log10());

    let seg = 4096;
    let psd = welch_psd(&field.to_complex_vec(), seg);
    let (mut inside, mut outside) = (0.0, 0.0);
    for (k, p) in psd.iter().enumerate() {
        let f = frequency_of_bin(k, seg, cfg.sample_rate);
        if (f - center).abs() <= half {
            inside += p;
        } else {
            outside += p;
        }
    }
    println!("power outside the occupied band: {:.1} dB", 10.0 * (outside / inside).log10());

    let h = design_rrc(cfg.rolloff, cfg.span_symbols, cfg.samples_per_symbol)?;
    let sps = cfg.samples_per_symbol;
    let mid = h.len() - 1;
    let cascade = |k: usize| -> f64 { (0..h.len()).filter(|&i| k >= i && k - i < h.len()).map(|i| h[i] * h[k - i]).sum() };
    let isi = (1..=mid / sps).map(|j| cascade(mid + j * sps).abs()).fold(0.0, f64::max);
    println!("matched RRC pair: peak {:.6}, worst symbol-spaced ISI {isi:.2e}", cascade(mid));
    Ok(())
}
