//! Rate-versus-distance table with finite-size and PLOB columns.
//!
//! ```text
//! cargo run --release -p cvqkd --example distance_sweep > sweep.csv
//! ```

use cvqkd::harness::{sweep_csv, sweep_distance, sweep_distances, SystemConfig};

fn main() -> cvqkd::Result<()> {
    let cfg = SystemConfig::default();
    let distances = sweep_distances(0.0, 120.0, 5.0)?;
    let rows = sweep_distance(&cfg, &distances)?;
    print!("{}", sweep_csv(&rows, &cfg.sweep.n_values));

    let reach = |k: &dyn Fn(usize) -> f64| (0..rows.len()).rev().find(|&i| k(i) > 0.0).map(|i| rows[i].distance_km);
    eprintln!("last positive K_asym at {:?} km", reach(&|i| rows[i].k_asym));
    for (j, n) in cfg.sweep.n_values.iter().enumerate() {
        eprintln!("last positive K(n = {n:e}) at {:?} km", reach(&|i| rows[i].k_finite[j]));
    }
    Ok(())
}
