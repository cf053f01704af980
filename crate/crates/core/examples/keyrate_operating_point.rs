//! Key rate at the reference operating point, from parameters alone.
//!
//! ```text
//! cargo run --release -p cvqkd --example keyrate_operating_point
//! ```

use cvqkd::harness::{evaluate_key_rate, SystemConfig};
use cvqkd::security::{key_rate_pipeline, SecurityParams};

fn main() -> cvqkd::Result<()> {
    let cfg = SystemConfig::default();
    let s = evaluate_key_rate(&cfg)?;
    let b = &s.budget;
    println!("eta {:.4}, v_el {:.4} SNU, transfer {:.4}", b.eta, b.v_el, b.electronic_noise_transfer);
    println!("physical attenuator {:.3} dB, T_eff {:.5}", b.physical_untrusted_loss_db, b.t_effective);

    let r = &s.report;
    let h = &r.holevo;
    println!("nu = [{:.6}, {:.6}, {:.6}, {:.6}]", h.nu1, h.nu2, h.nu3, h.nu4);
    println!("I_AB {:.6} bit, chi_BE {:.6} bit, key {:.6} bit/symbol", r.i_ab, r.chi_be, r.key_per_symbol);
    println!("K_asym {:.4} Mbps", r.k_asym / 1e6);

    let p = cfg.security_params()?;
    for n in [1e10, 1e9] {
        let q = SecurityParams { n_finite: Some(n), ..p.clone() };
        let f = key_rate_pipeline(&q, None)?;
        println!(
            "n = {n:.0e}: T_worst {:.5}, eps_worst {:.4}, Delta {:.2e}, K {:.4} Mbps",
            f.t_worst.unwrap_or(f64::NAN),
            f.eps_worst.unwrap_or(f64::NAN),
            f.delta_n,
            f.k_finite / 1e6
        );
    }
    for v in &s.referral_variants {
        println!("{:?} referral: K_asym {:.4} Mbps", v.conventions.excess_noise_referral, v.k_asym / 1e6);
    }
    println!("PLOB {:.2} Mbps", s.k_plob / 1e6);
    Ok(())
}
