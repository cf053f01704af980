//! Record detector traces to the binary waveform format and calibrate from
//! the files, as `cvqkd calibrate` does.
//!
//! ```text
//! cargo run --release -p cvqkd --example waveform_files
//! ```

use cvqkd::calibration::calibrate_snu;
use cvqkd::channel::{Detector, ReceiverParams};
use cvqkd::io::{read_waveform, write_waveform, HEADER_LEN};
use cvqkd::tx::build_frame_schedule;
use cvqkd::{RngStream, Waveform};

fn main() -> cvqkd::Result<()> {
    let dir = std::env::temp_dir().join("cvqkd_waveforms");
    std::fs::create_dir_all(&dir)?;
    let det = Detector::from_receiver(&ReceiverParams::default())?;
    let mut rng = RngStream::new(2, 0);
    let fs = 5e9;

    let elec = Detector { shot_noise: false, ..det }.detect(&Waveform::real(vec![0.0; 1 << 18], fs)?, &mut rng)?;
    let gated = det.detect(&Waveform::real(vec![0.0; 1 << 19], fs)?, &mut rng)?;
    let (elec_path, gated_path) = (dir.join("elec.cvwf"), dir.join("gated.cvwf"));
    write_waveform(&elec_path, &elec)?;
    write_waveform(&gated_path, &gated)?;
    println!(
        "wrote {} ({} bytes, {HEADER_LEN}-byte header)",
        gated_path.display(),
        std::fs::metadata(&gated_path)?.len()
    );

    let elec = read_waveform(&elec_path)?;
    let gated = read_waveform(&gated_path)?;
    let schedule = build_frame_schedule(gated.len(), 0.5, 8192)?;
    let rec = calibrate_snu(&elec, &gated, &schedule)?;
    println!(
        "snu scale {:.5}, electronic share {:.4} over {} calibration slots",
        rec.snu_scale,
        rec.electronic_share(),
        rec.slot_ids.len()
    );
    Ok(())
}
