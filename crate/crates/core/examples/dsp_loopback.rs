//! Noise-free back-to-back link through the full receiver chain, with and
//! without laser phase noise.
//!
//! ```text
//! cargo run --release -p cvqkd --example dsp_loopback
//! ```

use cvqkd::harness::{run_endtoend, CalibrationMode, SystemConfig};
use cvqkd::Decibel;

fn main() -> cvqkd::Result<()> {
    for linewidth in [0.0, 200.0, 2000.0] {
        let mut cfg = SystemConfig {
            frames: 1,
            symbols_per_frame: 100_000,
            ..SystemConfig::default()
        };
        cfg.channel.length_km = 0.0;
        cfg.channel.untrusted_loss_db = Decibel::new(0.0)?;
        cfg.channel.excess_noise_input = 0.0;
        cfg.channel.combined_linewidth_hz = linewidth;
        cfg.detection.shot_noise = false;
        cfg.detection.electronic_noise = false;
        cfg.detection.electronic_noise_in_untrusted_loss = false;
        cfg.calibration.mode = CalibrationMode::Nominal;
        let out = run_endtoend(&cfg)?;
        let f = &out.report.frames[0];
        if let Some(e) = &f.error {
            println!("linewidth {linewidth} Hz: {} failed: {}", e.stage, e.message);
            continue;
        }
        let m = f.metrics.as_ref().expect("metrics");
        println!(
            "linewidth {linewidth:>6} Hz: CFO estimate {:.6} GHz, sync at {} (confidence {:.3}), EVM {:.3}% -> {:.3}% after equalization",
            m.pilot_frequency_hz / 1e9,
            m.sync_start,
            m.sync_confidence,
            100.0 * m.evm_before_eq,
            100.0 * m.evm_after_eq
        );
    }
    Ok(())
}
