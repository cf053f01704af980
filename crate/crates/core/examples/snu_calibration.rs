//! One-time shot-noise-unit calibration from an LO-off recording and the
//! gated calibration slots.
//!
//! ```text
//! cargo run --release -p cvqkd --example snu_calibration
//! ```

use cvqkd::calibration::calibrate_snu;
use cvqkd::channel::{Detector, ReceiverParams};
use cvqkd::tx::build_frame_schedule;
use cvqkd::{RngStream, Waveform};

fn main() -> cvqkd::Result<()> {
    let rx = ReceiverParams::default();
    let det = Detector::from_receiver(&rx)?;
    let fs = 5e9;
    let mut rng = RngStream::new(11, 0);

    let lo_off = Detector { shot_noise: false, ..det };
    let elec = lo_off.detect(&Waveform::real(vec![0.0; 1 << 20], fs)?, &mut rng)?;
    // The quantum signal is gated off in the calibration slots, so a zero
    // field is what the detector sees there.
    let schedule = build_frame_schedule(1 << 21, 0.5, 1 << 16)?;
    let gated = det.detect(&Waveform::real(vec![0.0; 1 << 21], fs)?, &mut rng)?;
    let rec = calibrate_snu(&elec, &gated, &schedule)?;

    println!("clearance {:.2} dB -> v_el {:.4} SNU", rx.clearance_db.value(), rx.electronic_noise()?);
    println!("LO-off variance {:.5}, calibration-slot variance {:.5} (raw units)", rec.v_elec_raw, rec.v_total_raw);
    println!("measured clearance {:.3} dB", 10.0 * (rec.v_total_raw / rec.v_elec_raw).log10());
    println!("electronic share {:.4}, v_el {:.4} SNU", rec.electronic_share(), rec.electronic_noise_snu());
    println!("loss transfer factor {:.4} ({:.3} dB)", rec.loss_transfer(), -10.0 * rec.loss_transfer().log10());
    println!("averaged {} calibration slots", rec.slot_ids.len());
    Ok(())
}
