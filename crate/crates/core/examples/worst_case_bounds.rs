//! Parameter estimation, 6.5-sigma worst-case bounds and the finite-size
//! key rate as the block length grows.
//!
//! ```text
//! cargo run --release -p cvqkd --example worst_case_bounds
//! ```

use cvqkd::estimation::{estimate_from_stats, synthetic_stats, worst_case_bounds, ExcessNoiseReferral};
use cvqkd::harness::SystemConfig;
use cvqkd::security::key_rate_pipeline;
use cvqkd::RngStream;

fn main() -> cvqkd::Result<()> {
    let cfg = SystemConfig::default();
    let p = cfg.security_params()?;
    let mut rng = RngStream::new(5, 0);
    println!("true T {:.5}, eps {:.4} SNU", p.t_channel, p.eps);
    for n in [10_000, 100_000, 1_000_000, 10_000_000] {
        let stats = synthetic_stats(n, p.t_channel, p.eta_trusted, p.eps, p.v_mod, &mut rng)?;
        let est = estimate_from_stats(&stats, p.eta_trusted, p.v_mod, ExcessNoiseReferral::ChannelInput)?;
        let w = worst_case_bounds(&est, p.z)?;
        let r = key_rate_pipeline(&p, Some(&est))?;
        println!(
            "n = {n:>8}: T {:.5} (min {:.5}), eps {:+.4} +- {:.4} (max {:.4}), K_asym {:.3} Mbps, K_finite {:.3} Mbps",
            est.transmittance(),
            w.transmittance_min(),
            est.eps_input(),
            est.sigma_eps,
            w.eps_max_input(),
            r.k_asym / 1e6,
            r.k_finite / 1e6
        );
    }
    Ok(())
}
