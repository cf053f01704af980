//! Digital twin of a real-local-oscillator continuous-variable QKD link.
//!
//! The crate covers the whole link at desk scale: Alice's transmitter DSP
//! ([`tx`]), a parameterized fiber and heterodyne-receiver physics model
//! ([`channel`]), Bob's receiver DSP chain ([`rx`]), one-time shot-noise-unit
//! calibration ([`calibration`]), channel parameter estimation with
//! worst-case bounds ([`estimation`]) and the key-rate layer ([`security`]).
//! [`harness`] ties the stages together into end-to-end runs, key-rate-only
//! evaluations and distance sweeps.
//!
//! Units: all quadrature variances are in shot-noise units (SNU) with the
//! vacuum variance equal to 1 per quadrature. Under the one-time
//! calibration the SNU scale is shot plus electronic noise.
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! ```text
//! cargo run --release -p cvqkd --example keyrate_operating_point
//! cargo run --release -p cvqkd --example distance_sweep
//! cargo run --release -p cvqkd --example end_to_end
//! ```

pub mod calibration;
pub mod channel;
pub mod dsp;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod io;
pub mod rng;
pub mod rx;
pub mod security;
pub mod selftest;
pub mod symplectic;
pub mod tx;
pub mod units;
pub mod waveform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rng::RngStream;
pub use units::Decibel;
pub use waveform::{Samples, Waveform};
