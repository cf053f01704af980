//! Quick invariant suite behind `cvqkd selftest`.
//!
//! Each check is small enough to finish in a second or two; the full-size
//! versions live in the acceptance tests.

use crate::calibration::{calibrate_snu, normalize_symbols};
use crate::channel::{detection_efficiency, ReceiverParams};
use crate::dsp::design_rrc;
use crate::estimation::{estimate_from_stats, synthetic_stats, worst_case_bounds, ExcessNoiseReferral, DEFAULT_Z};
use crate::harness::{run_endtoend, sweep_distance, sweep_distances, SystemConfig};
use crate::rx::{chain_noise_gain, downconvert_branch, estimate_frequency_offset, matched_filter, SyncConfig};
use crate::security::{holevo_terms, plob_bound, secret_key_rate};
use crate::symplectic::generic_holevo;
use crate::tx::{build_frame_schedule, SymbolFrame};
use crate::{Complex64, Result, RngStream, Waveform};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match body() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Run every check in a fixed order.
pub fn run_selftest() -> Vec<Check> {
    vec![
        check("detection_efficiency", || {
            let eta = detection_efficiency(&ReceiverParams::default())?;
            Ok(((0.2265..=0.2275).contains(&eta), format!("eta = {eta:.5}")))
        }),
        check("key_per_symbol_mapping", || {
            let k = secret_key_rate(1e9, 0.5, 1.0, 0.00276, 0.0, 0.0).bits_per_second;
            Ok(((k - 1.38e6).abs() < 1e-6, format!("0.00276 bit/symbol -> {:.6} Mbps", k / 1e6)))
        }),
        check("holevo_closed_form_vs_generic", holevo_agreement),
        check("plob_reference", || {
            let t = 10f64.powf(-(28.6 * 0.2 + 5.0) / 10.0);
            let k = plob_bound(t, 5e8)?;
            Ok(((k / 63.8e6 - 1.0).abs() < 1e-3, format!("{:.3} Mbps", k / 1e6)))
        }),
        check("rrc_nyquist", rrc_nyquist),
        check("frequency_offset_estimator", foe_tones),
        check("snu_noise_floor", snu_floor),
        check("worst_case_coverage", coverage),
        check("sweep_monotone", || {
            let cfg = SystemConfig::default();
            let rows = sweep_distance(&cfg, &sweep_distances(0.0, 120.0, 2.0)?)?;
            let mono = rows.windows(2).all(|w| {
                w[1].k_asym <= w[0].k_asym
                    && w[1].k_plob <= w[0].k_plob
                    && w[1].k_finite.iter().zip(&w[0].k_finite).all(|(a, b)| a <= b)
            });
            let bounded = rows.iter().all(|r| r.k_finite.iter().chain([&r.k_asym]).all(|&k| k <= r.k_plob));
            Ok((mono && bounded, format!("{} rows", rows.len())))
        }),
        check("config_round_trip", || {
            let cfg = SystemConfig::default();
            let back = SystemConfig::from_json(&cfg.to_json()?)?;
            Ok((back == cfg, "default config".into()))
        }),
        check("deterministic_run", || {
            let cfg = SystemConfig {
                frames: 1,
                symbols_per_frame: 20_000,
                ..SystemConfig::default()
            };
            let a = serde_json::to_string(&run_endtoend(&cfg)?.report)?;
            let b = serde_json::to_string(&run_endtoend(&cfg)?.report)?;
            Ok((a == b, format!("{} report bytes", a.len())))
        }),
    ]
}

fn holevo_agreement() -> Result<(bool, String)> {
    let mut rng = RngStream::new(0x5e1f, 0);
    let mut worst: f64 = 0.0;
    let draws = 500;
    for _ in 0..draws {
        let (u1, u2) = rng.uniform53_pair();
        let (u3, u4) = rng.uniform53_pair();
        let (u5, _) = rng.uniform53_pair();
        let (v, t, e, eta, vel) = (0.5 + 40.0 * u1, 1e-3 + 0.998 * u2, 0.2 * u3, 0.05 + 0.9 * u4, 0.5 * u5);
        let c = holevo_terms(v, t, e, eta, vel)?;
        let g = generic_holevo(v, t, e, eta, vel)?;
        let d = [
            c.nu1 - g.eve[1],
            c.nu2 - g.eve[0],
            c.nu3 - g.conditional[2],
            c.nu4 - g.conditional[1],
            c.chi_be - g.chi_be,
        ];
        worst = d.iter().fold(worst, |m, x| m.max(x.abs()));
    }
    Ok((worst < 1e-9, format!("max deviation {worst:.2e} over {draws} draws")))
}

fn rrc_nyquist() -> Result<(bool, String)> {
    let sps = 5;
    let h = design_rrc(0.3, 32, sps)?;
    let n = h.len();
    let mid = n - 1;
    let c: Vec<f64> = (0..2 * n - 1)
        .map(|k| (0..n).filter(|&i| k >= i && k - i < n).map(|i| h[i] * h[k - i]).sum())
        .collect();
    let worst = (1..=mid / sps).map(|k| c[mid + k * sps].abs().max(c[mid - k * sps].abs())).fold(0.0, f64::max);
    Ok((worst < 1e-3 && (c[mid] - 1.0).abs() < 1e-3, format!("max ISI {worst:.2e}")))
}

fn foe_tones() -> Result<(bool, String)> {
    let n = 1 << 15;
    let fs = 5e9;
    let bin = fs / n as f64;
    let amp = 2000f64.sqrt();
    let mut rng = RngStream::new(0xf0e, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (u, _) = rng.uniform53_pair();
        let f = 1.66e9 + 0.18e9 * u;
        let x: Vec<f64> = (0..n)
            .map(|i| amp * (2.0 * std::f64::consts::PI * f * i as f64 / fs).cos() + rng.standard_normal())
            .collect();
        let got = estimate_frequency_offset(&Waveform::real(x, fs)?, (1.65e9, 1.85e9))?;
        worst = worst.max(((got - f) / bin).abs());
    }
    Ok((worst < 0.1, format!("max error {worst:.3} bin over 20 tones")))
}

fn snu_floor() -> Result<(bool, String)> {
    let fs = 5e9;
    let v_el = ReceiverParams::default().electronic_noise()?;
    let mut rng = RngStream::new(0xca1, 0);
    let mut gauss = |n: usize, var: f64| -> Vec<f64> { (0..n).map(|_| var.sqrt() * rng.standard_normal()).collect() };
    let schedule = build_frame_schedule(1 << 19, 0.5, 1 << 18)?;
    let elec = Waveform::real(gauss(1 << 18, v_el), fs)?;
    let calib = Waveform::real(gauss(1 << 19, 1.0 + v_el), fs)?;
    let rec = calibrate_snu(&elec, &calib, &schedule)?;
    let noise = Waveform::real(gauss(1 << 20, 1.0 + v_el), fs)?;
    let cfg = SyncConfig::default();
    let y = matched_filter(&downconvert_branch(&noise, 800e6, 1.3e9)?, 1e9, &cfg)?;
    let symbols: Vec<Complex64> = y.iter().step_by(cfg.target_sps).skip(100).take(150_000).copied().collect();
    let gain = chain_noise_gain(fs, 1e9 * cfg.target_sps as f64, &design_rrc(cfg.rolloff, cfg.span_symbols, cfg.target_sps)?);
    let out = normalize_symbols(&SymbolFrame::data(symbols, 1e9)?, &rec, gain)?;
    let n = out.len() as f64;
    let vi = out.symbols.iter().map(|z| z.re * z.re).sum::<f64>() / n;
    let vq = out.symbols.iter().map(|z| z.im * z.im).sum::<f64>() / n;
    let share = rec.electronic_share() / (v_el / (1.0 + v_el));
    let ok = (vi - 1.0).abs() < 0.02 && (vq - 1.0).abs() < 0.02 && (share - 1.0).abs() < 0.02;
    Ok((ok, format!("floor I {vi:.4} Q {vq:.4} SNU, electronic share ratio {share:.4}")))
}

fn coverage() -> Result<(bool, String)> {
    let (t, eta, eps, v_mod) = (0.0847, 0.2271, 0.055, 8.0);
    let mut rng = RngStream::new(0xc0e, 0);
    let trials = 200;
    let mut covered = 0;
    for _ in 0..trials {
        let s = synthetic_stats(20_000, t, eta, eps, v_mod, &mut rng)?;
        let est = estimate_from_stats(&s, eta, v_mod, ExcessNoiseReferral::ChannelInput)?;
        let w = worst_case_bounds(&est, DEFAULT_Z)?;
        if w.transmittance_min() <= t && w.eps_max_input() >= eps {
            covered += 1;
        }
    }
    Ok((covered == trials, format!("{covered}/{trials} covered at 6.5 sigma")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_check_passes() {
        let checks = run_selftest();
        assert_eq!(checks.len(), 11);
        for c in &checks {
            assert!(c.passed, "{c}");
        }
        assert!(checks[0].to_string().starts_with("PASS detection_efficiency"));
    }
}
