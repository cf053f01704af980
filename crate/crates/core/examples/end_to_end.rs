//! Full link simulation at the reference operating point.
//!
//! Frames and symbols per frame can be overridden from the command line:
//!
//! ```text
//! cargo run --release -p cvqkd --example end_to_end -- 4 250000
//! ```

use cvqkd::harness::{run_endtoend, SystemConfig};

fn main() -> cvqkd::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = SystemConfig::default();
    if let Some(frames) = args.next() {
        cfg.frames = frames.parse().expect("frames");
    }
    if let Some(n) = args.next() {
        cfg.symbols_per_frame = n.parse().expect("symbols per frame");
    }
    let out = run_endtoend(&cfg)?;
    let r = &out.report;
    for f in &r.frames {
        match (&f.metrics, &f.error) {
            (Some(m), _) => println!("frame {}: {} symbols, EVM {:.3}%", f.frame, f.symbols, 100.0 * m.evm_after_eq),
            (_, Some(e)) => println!("frame {}: failed in {}: {}", f.frame, e.stage, e.message),
            _ => println!("frame {}: no output", f.frame),
        }
    }
    let b = &r.budget;
    println!("configured T_eff {:.5}, eps {:.4} SNU", b.t_effective, r.config.channel.excess_noise_input);
    if let Some(e) = &r.estimate {
        println!(
            "estimated  T {:.5} +- {:.5}, eps {:.4} +- {:.4} SNU over {} symbols",
            e.transmittance(),
            4.0 * e.t_hat * e.sigma_t / e.eta,
            e.eps_input(),
            e.sigma_eps,
            e.n_used
        );
    }
    if let Some(k) = &r.key_rate {
        println!("K_asym {:.4} Mbps, K_finite {:.4} Mbps (n = {:.3e})", k.k_asym / 1e6, k.k_finite / 1e6, k.n_finite.unwrap_or(f64::INFINITY));
    }
    for e in &r.errors {
        println!("error in {}: {}", e.stage, e.message);
    }
    println!("{:.1} s on {} threads", out.timing.total_seconds, out.timing.threads);
    Ok(())
}
