//! Channel parameter estimation from paired Alice/Bob symbols.
//!
//! Both quadratures are pooled into one linear model `y = t x + z` with
//! `t = sqrt(eta T / 2)` under heterodyne detection. Confidence intervals are
//! Gaussian approximations; worst-case bounds sit `z` standard deviations
//! from the point estimates.

use serde::{Deserialize, Serialize};

use crate::tx::{SymbolFrame, SymbolRole};
use crate::{Error, Result, RngStream};

/// Smallest number of paired symbols accepted by the estimator.
pub const MIN_SYMBOLS: u64 = 10_000;

/// Default worst-case width in standard deviations.
pub const DEFAULT_Z: f64 = 6.5;

/// Where the excess-noise figure is referred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExcessNoiseReferral {
    /// Transmitter output; the detector sees `eta T eps / 2`.
    #[default]
    ChannelInput,
    /// Channel output; the detector sees `eta eps / 2`.
    ChannelOutput,
}

/// Additive sums over real samples (both quadratures pooled).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SufficientStats {
    /// Number of real samples, twice the symbol count.
    pub n: u64,
    pub sxx: f64,
    pub sxy: f64,
    pub syy: f64,
}

impl SufficientStats {
    /// Sums over the data symbols of two aligned frames.
    pub fn from_frames(alice: &SymbolFrame, bob: &SymbolFrame) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(Error::LengthMismatch {
                what: "alice vs bob symbols",
                left: alice.len(),
                right: bob.len(),
            });
        }
        if alice.roles != bob.roles {
            return Err(Error::param("bob", "symbol roles differ from alice"));
        }
        let mut s = Self::default();
        for k in alice.indices(SymbolRole::Data) {
            let (x, y) = (alice.symbols[k], bob.symbols[k]);
            s.push(x.re, y.re);
            s.push(x.im, y.im);
        }
        Ok(s)
    }

    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sxx += x * x;
        self.sxy += x * y;
        self.syy += y * y;
    }

    pub fn merge(&mut self, other: &Self) {
        self.n += other.n;
        self.sxx += other.sxx;
        self.sxy += other.sxy;
        self.syy += other.syy;
    }

    /// Paired symbols represented by these sums.
    pub fn symbols(&self) -> u64 {
        self.n / 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEstimate {
    /// Amplitude gain `sqrt(eta T / 2)`.
    pub t_hat: f64,
    /// Per-quadrature excess noise in the declared referral, SNU.
    pub eps_hat: f64,
    /// Residual noise variance per quadrature, SNU.
    pub sigma2_hat: f64,
    pub sigma_t: f64,
    pub sigma_eps: f64,
    pub t_min: f64,
    pub eps_max: f64,
    /// Width of the worst-case bounds in standard deviations.
    pub z: f64,
    /// Paired symbols used.
    pub n_used: u64,
    pub convention: ExcessNoiseReferral,
    pub eta: f64,
    pub v_mod: f64,
    /// `t_min <= 0`: the channel cannot be certified and the key rate is zero.
    pub abort: bool,
    /// Residual noise far below one SNU; the data are not shot-noise limited.
    pub degenerate: bool,
}

impl ChannelEstimate {
    /// Channel transmittance `2 t^2 / eta`.
    pub fn transmittance(&self) -> f64 {
        2.0 * self.t_hat * self.t_hat / self.eta
    }

    pub fn transmittance_min(&self) -> f64 {
        if self.t_min > 0.0 {
            2.0 * self.t_min * self.t_min / self.eta
        } else {
            0.0
        }
    }

    /// Point estimate of the excess noise referred to the channel input.
    pub fn eps_input(&self) -> f64 {
        match self.convention {
            ExcessNoiseReferral::ChannelInput => self.eps_hat,
            ExcessNoiseReferral::ChannelOutput => self.eps_hat / self.transmittance(),
        }
    }

    /// Worst-case excess noise referred to the channel input.
    pub fn eps_max_input(&self) -> f64 {
        match self.convention {
            ExcessNoiseReferral::ChannelInput => self.eps_max,
            ExcessNoiseReferral::ChannelOutput => {
                let t = self.transmittance_min();
                if t > 0.0 {
                    self.eps_max / t
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Estimate an ideal estimator would return on `n_symbols` symbols of a
    /// channel with the given truth; `eps` is in the `convention` referral.
    pub fn expected(
        transmittance: f64,
        eps: f64,
        eta: f64,
        v_mod: f64,
        n_symbols: u64,
        convention: ExcessNoiseReferral,
    ) -> Result<Self> {
        check_positive("eta", eta)?;
        check_positive("v_mod", v_mod)?;
        if !(transmittance > 0.0 && transmittance <= 1.0) {
            return Err(Error::param("transmittance", format!("{transmittance} outside (0, 1]")));
        }
        if n_symbols == 0 {
            return Err(Error::param("n_symbols", "must be positive"));
        }
        let t = (eta * transmittance / 2.0).sqrt();
        let sigma2 = match convention {
            ExcessNoiseReferral::ChannelInput => 1.0 + t * t * eps,
            ExcessNoiseReferral::ChannelOutput => 1.0 + eta * eps / 2.0,
        };
        Ok(build(t, sigma2, 2 * n_symbols, eta, v_mod, convention))
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be positive")))
    }
}

/// Map a residual variance to excess noise under the referral.
fn eps_from_sigma2(sigma2: f64, t: f64, eta: f64, convention: ExcessNoiseReferral) -> f64 {
    match convention {
        ExcessNoiseReferral::ChannelInput => (sigma2 - 1.0) / (t * t),
        ExcessNoiseReferral::ChannelOutput => 2.0 * (sigma2 - 1.0) / eta,
    }
}

/// Point estimate plus standard deviations, bounds at `z = 0`.
fn build(t: f64, sigma2: f64, n_real: u64, eta: f64, v_mod: f64, convention: ExcessNoiseReferral) -> ChannelEstimate {
    let n = n_real as f64;
    let eps_hat = eps_from_sigma2(sigma2, t, eta, convention);
    let sigma_t = (sigma2 / (n * v_mod)).sqrt();
    let sigma_s2 = sigma2 * (2.0 / n).sqrt();
    let sigma_eps = match convention {
        ExcessNoiseReferral::ChannelInput => {
            let d_s2 = sigma_s2 / (t * t);
            let d_t = 2.0 * (sigma2 - 1.0) / (t * t * t) * sigma_t;
            d_s2.hypot(d_t)
        }
        ExcessNoiseReferral::ChannelOutput => 2.0 * sigma_s2 / eta,
    };
    let est = ChannelEstimate {
        t_hat: t,
        eps_hat,
        sigma2_hat: sigma2,
        sigma_t,
        sigma_eps,
        t_min: t,
        eps_max: eps_hat,
        z: 0.0,
        n_used: n_real / 2,
        convention,
        eta,
        v_mod,
        abort: false,
        degenerate: sigma2 < 0.5,
    };
    worst_case_bounds(&est, 0.0).expect("z = 0 is valid")
}

/// Estimate from merged sums.
pub fn estimate_from_stats(
    stats: &SufficientStats,
    eta: f64,
    v_mod: f64,
    convention: ExcessNoiseReferral,
) -> Result<ChannelEstimate> {
    check_positive("eta", eta)?;
    check_positive("v_mod", v_mod)?;
    if stats.symbols() < MIN_SYMBOLS {
        return Err(Error::param(
            "n",
            format!("{} symbols < {MIN_SYMBOLS}", stats.symbols()),
        ));
    }
    let n = stats.n as f64;
    let observed = stats.sxx / n;
    if !(observed >= v_mod / 2.0) {
        return Err(Error::Misalignment { observed, v_mod });
    }
    let t = stats.sxy / stats.sxx;
    let sigma2 = ((stats.syy - stats.sxy * stats.sxy / stats.sxx) / n).max(0.0);
    let mut est = build(t, sigma2, stats.n, eta, v_mod, convention);
    est.abort = !(t > 0.0);
    Ok(est)
}

/// Pooled maximum-likelihood estimate over the data symbols of aligned
/// frames; `bob` must be in SNU.
pub fn estimate_channel(
    alice: &SymbolFrame,
    bob: &SymbolFrame,
    eta: f64,
    v_mod: f64,
    convention: ExcessNoiseReferral,
) -> Result<ChannelEstimate> {
    estimate_from_stats(&SufficientStats::from_frames(alice, bob)?, eta, v_mod, convention)
}

/// Move `t` down and `eps` up by `z` standard deviations.
///
/// `sigma_t = sqrt(sigma2 / (n v_mod))` and `sigma_sigma2 = sigma2 sqrt(2/n)`
/// with `n` real samples; `eps_max` is the excess noise implied by
/// `sigma2 + z sigma_sigma2` at `t_min`, clamped at zero. A non-positive
/// `t_min` sets `abort` and leaves `eps_max` at the point estimate.
pub fn worst_case_bounds(est: &ChannelEstimate, z: f64) -> Result<ChannelEstimate> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(Error::param("z", format!("{z} must be non-negative")));
    }
    let n = (2 * est.n_used) as f64;
    let sigma_s2 = est.sigma2_hat * (2.0 / n).sqrt();
    let t_min = est.t_hat - z * est.sigma_t;
    let s2_max = est.sigma2_hat + z * sigma_s2;
    let abort = !(t_min > 0.0);
    let eps_max = if abort || z == 0.0 {
        est.eps_hat.max(0.0)
    } else {
        eps_from_sigma2(s2_max, t_min, est.eta, est.convention).max(0.0)
    };
    Ok(ChannelEstimate {
        t_min,
        eps_max: eps_max.max(est.eps_hat),
        z,
        abort: abort || est.abort,
        ..est.clone()
    })
}

/// Split total input-referred excess noise into Alice's part and the part
/// added at Bob, `eps_b = (eps_tot - eps_a) T_tot`.
pub fn decompose_excess_noise(eps_tot: f64, t_tot: f64, eps_a: f64) -> Result<f64> {
    if !(t_tot > 0.0 && t_tot <= 1.0) {
        return Err(Error::param("t_tot", format!("{t_tot} outside (0, 1]")));
    }
    let eps_b = (eps_tot - eps_a) * t_tot;
    if !(eps_b >= 0.0) {
        return Err(Error::param("eps_a", format!("{eps_a} exceeds total {eps_tot}")));
    }
    Ok(eps_b)
}

/// `eps_tot = eps_a + eps_b / T_tot`.
pub fn compose_excess_noise(eps_a: f64, eps_b: f64, t_tot: f64) -> Result<f64> {
    if !(t_tot > 0.0 && t_tot <= 1.0) {
        return Err(Error::param("t_tot", format!("{t_tot} outside (0, 1]")));
    }
    Ok(eps_a + eps_b / t_tot)
}

/// Draw paired frames from the linear-Gaussian link model: Alice's
/// quadratures have variance `v_mod`, Bob sees `t x` plus noise of variance
/// `1 + t^2 eps_input` per quadrature, in SNU.
pub fn synthetic_link(
    n_symbols: usize,
    transmittance: f64,
    eta: f64,
    eps_input: f64,
    v_mod: f64,
    rng: &mut RngStream,
) -> Result<(SymbolFrame, SymbolFrame)> {
    let mut alice = Vec::with_capacity(n_symbols);
    let mut bob = Vec::with_capacity(n_symbols);
    synthetic_pairs(n_symbols, transmittance, eta, eps_input, v_mod, rng, |x, y| {
        alice.push(x);
        bob.push(y);
    })?;
    Ok((SymbolFrame::data(alice, 1.0)?, SymbolFrame::data(bob, 1.0)?))
}

/// Sufficient statistics of [`synthetic_link`] without materializing frames.
pub fn synthetic_stats(
    n_symbols: usize,
    transmittance: f64,
    eta: f64,
    eps_input: f64,
    v_mod: f64,
    rng: &mut RngStream,
) -> Result<SufficientStats> {
    let mut s = SufficientStats::default();
    synthetic_pairs(n_symbols, transmittance, eta, eps_input, v_mod, rng, |x, y| {
        s.push(x.re, y.re);
        s.push(x.im, y.im);
    })?;
    Ok(s)
}

fn synthetic_pairs(
    n: usize,
    transmittance: f64,
    eta: f64,
    eps_input: f64,
    v_mod: f64,
    rng: &mut RngStream,
    mut sink: impl FnMut(crate::Complex64, crate::Complex64),
) -> Result<()> {
    check_positive("eta", eta)?;
    check_positive("v_mod", v_mod)?;
    if !(0.0..=1.0).contains(&transmittance) || !(eps_input >= 0.0) {
        return Err(Error::param("transmittance", "T must lie in [0, 1] and eps be non-negative"));
    }
    let t = (eta * transmittance / 2.0).sqrt();
    let sx = v_mod.sqrt();
    let sn = (1.0 + t * t * eps_input).sqrt();
    for _ in 0..n {
        let x = crate::Complex64::new(sx * rng.standard_normal(), sx * rng.standard_normal());
        let noise = crate::Complex64::new(sn * rng.standard_normal(), sn * rng.standard_normal());
        sink(x, t * x + noise);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use proptest::prelude::*;

    const T: f64 = 0.0847;
    const ETA: f64 = 0.2271;
    const EPS: f64 = 0.055;
    const V_MOD: f64 = 8.0;

    #[test]
    fn noiseless_gain_is_exact_and_flagged() {
        let mut rng = RngStream::new(1, 0);
        let x: Vec<Complex64> = (0..20_000)
            .map(|_| Complex64::new(rng.standard_normal(), rng.standard_normal()) * V_MOD.sqrt())
            .collect();
        let y: Vec<Complex64> = x.iter().map(|v| v * 0.3).collect();
        let alice = SymbolFrame::data(x, 1.0).unwrap();
        let bob = SymbolFrame::data(y, 1.0).unwrap();
        let est = estimate_channel(&alice, &bob, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
        assert!((est.t_hat - 0.3).abs() < 1e-12);
        assert!(est.degenerate);
        assert!(est.eps_hat < 0.0);
    }

    #[test]
    fn operating_point_recovered() {
        let mut rng = RngStream::new(2, 0);
        let (a, b) = synthetic_link(1_000_000, T, ETA, EPS, V_MOD, &mut rng).unwrap();
        let est = estimate_channel(&a, &b, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
        assert!((est.transmittance() / T - 1.0).abs() < 0.01);
        assert!((est.eps_hat - EPS).abs() < 3.0 * est.sigma_eps, "{} +- {}", est.eps_hat, est.sigma_eps);
        assert_eq!(est.n_used, 1_000_000);
        assert!(!est.degenerate && !est.abort);
    }

    #[test]
    fn null_excess_noise() {
        let mut rng = RngStream::new(3, 0);
        let s = synthetic_stats(1_000_000, T, ETA, 0.0, V_MOD, &mut rng).unwrap();
        let est = estimate_from_stats(&s, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
        assert!(est.eps_hat.abs() < 3.0 * est.sigma_eps);
    }

    #[test]
    fn output_referral_scales_by_transmittance() {
        let mut rng = RngStream::new(4, 0);
        let s = synthetic_stats(200_000, T, ETA, EPS, V_MOD, &mut rng).unwrap();
        let a = estimate_from_stats(&s, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
        let b = estimate_from_stats(&s, ETA, V_MOD, ExcessNoiseReferral::ChannelOutput).unwrap();
        assert!((b.eps_hat - a.eps_hat * a.transmittance()).abs() < 1e-12);
        assert!((b.eps_input() - a.eps_hat).abs() < 1e-12);
    }

    #[test]
    fn misaligned_frames_rejected() {
        let x = vec![Complex64::new(0.1, -0.1); 20_000];
        let f = SymbolFrame::data(x, 1.0).unwrap();
        assert!(matches!(
            estimate_channel(&f, &f, ETA, V_MOD, ExcessNoiseReferral::ChannelInput),
            Err(Error::Misalignment { .. })
        ));
        let short = SymbolFrame::data(vec![Complex64::new(3.0, 3.0); 100], 1.0).unwrap();
        assert!(estimate_channel(&short, &short, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).is_err());
    }

    #[test]
    fn stats_merge_matches_concatenation() {
        let mut rng = RngStream::new(5, 0);
        let (a1, b1) = synthetic_link(1000, T, ETA, EPS, V_MOD, &mut rng).unwrap();
        let (a2, b2) = synthetic_link(1500, T, ETA, EPS, V_MOD, &mut rng).unwrap();
        let mut s = SufficientStats::from_frames(&a1, &b1).unwrap();
        s.merge(&SufficientStats::from_frames(&a2, &b2).unwrap());
        let cat = |p: &SymbolFrame, q: &SymbolFrame| {
            SymbolFrame::data(p.symbols.iter().chain(&q.symbols).copied().collect(), 1.0).unwrap()
        };
        let whole = SufficientStats::from_frames(&cat(&a1, &a2), &cat(&b1, &b2)).unwrap();
        assert_eq!(s.n, whole.n);
        assert!((s.sxy - whole.sxy).abs() < 1e-9 * whole.sxy.abs());
        assert!((s.syy - whole.syy).abs() < 1e-9 * whole.syy);
    }

    #[test]
    fn training_symbols_excluded() {
        let x: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let roles = vec![SymbolRole::Data, SymbolRole::Training, SymbolRole::Data, SymbolRole::Training];
        let f = SymbolFrame::new(x, roles, 1.0).unwrap();
        let s = SufficientStats::from_frames(&f, &f).unwrap();
        assert_eq!(s.n, 4);
        assert_eq!(s.sxx, 0.0 + 1.0 + 4.0 + 1.0);
    }

    #[test]
    fn zero_width_bounds_are_point_estimates() {
        let est = ChannelEstimate::expected(T, EPS, ETA, V_MOD, 100_000, ExcessNoiseReferral::ChannelInput).unwrap();
        let b = worst_case_bounds(&est, 0.0).unwrap();
        assert_eq!(b.t_min, est.t_hat);
        assert!((b.eps_max - EPS).abs() < 1e-12);
        let huge = ChannelEstimate::expected(T, EPS, ETA, V_MOD, 1 << 50, ExcessNoiseReferral::ChannelInput).unwrap();
        let hb = worst_case_bounds(&huge, 6.5).unwrap();
        assert!((hb.t_min / huge.t_hat - 1.0).abs() < 1e-5);
        assert!((hb.eps_max - EPS).abs() < 1e-3);
    }

    #[test]
    fn tiny_samples_abort() {
        let est = ChannelEstimate::expected(1e-6, EPS, ETA, V_MOD, 10, ExcessNoiseReferral::ChannelInput).unwrap();
        let b = worst_case_bounds(&est, 6.5).unwrap();
        assert!(b.abort);
        assert_eq!(b.transmittance_min(), 0.0);
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(decompose_excess_noise(0.055, 0.3, 0.055).unwrap(), 0.0);
        assert!((decompose_excess_noise(0.055, 0.1, 0.02).unwrap() - 0.0035).abs() < 1e-15);
        assert!(decompose_excess_noise(0.01, 0.1, 0.02).is_err());
        assert!(decompose_excess_noise(0.05, 0.0, 0.02).is_err());
    }

    #[test]
    fn consistency_over_sample_sizes() {
        for (n, seed) in [(10_000usize, 10u64), (100_000, 11), (1_000_000, 12)] {
            let trials = 100;
            let mut dt = Vec::with_capacity(trials);
            let mut de = Vec::with_capacity(trials);
            for k in 0..trials {
                let mut rng = RngStream::new(seed, k as u64);
                let s = synthetic_stats(n, T, ETA, EPS, V_MOD, &mut rng).unwrap();
                let est = estimate_from_stats(&s, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
                dt.push(est.transmittance() - T);
                de.push(est.eps_hat - EPS);
            }
            for d in [&dt, &de] {
                let m = d.iter().sum::<f64>() / trials as f64;
                let sd = (d.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
                let se = sd / (trials as f64).sqrt();
                assert!(m.abs() < 3.0 * se, "n = {n}: bias {m} vs se {se}");
            }
        }
    }

    #[test]
    fn standard_deviations_match_spread() {
        let trials = 400;
        let mut t = Vec::new();
        let mut e = Vec::new();
        let mut last = None;
        for k in 0..trials {
            let mut rng = RngStream::new(13, k);
            let s = synthetic_stats(20_000, T, ETA, EPS, V_MOD, &mut rng).unwrap();
            let est = estimate_from_stats(&s, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
            t.push(est.t_hat);
            e.push(est.eps_hat);
            last = Some(est);
        }
        let sd = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        let est = last.unwrap();
        assert!((sd(&t) / est.sigma_t - 1.0).abs() < 0.15);
        assert!((sd(&e) / est.sigma_eps - 1.0).abs() < 0.15);
    }

    #[test]
    fn coverage_at_default_width() {
        let mut misses = 0;
        for k in 0..1000 {
            let mut rng = RngStream::new(14, k);
            let s = synthetic_stats(10_000, T, ETA, EPS, V_MOD, &mut rng).unwrap();
            let est = estimate_from_stats(&s, ETA, V_MOD, ExcessNoiseReferral::ChannelInput).unwrap();
            let b = worst_case_bounds(&est, DEFAULT_Z).unwrap();
            let t_true = (ETA * T / 2.0).sqrt();
            if !(b.t_min <= t_true && EPS <= b.eps_max) {
                misses += 1;
            }
        }
        assert!(misses <= 1, "{misses}");
    }

    proptest! {
        #[test]
        fn bounds_monotone_in_z(z1 in 0.0f64..10.0, dz in 0.0f64..5.0, n in 10_000u64..10_000_000) {
            let est = ChannelEstimate::expected(T, EPS, ETA, V_MOD, n, ExcessNoiseReferral::ChannelInput).unwrap();
            let a = worst_case_bounds(&est, z1).unwrap();
            let b = worst_case_bounds(&est, z1 + dz).unwrap();
            prop_assert!(b.t_min <= a.t_min);
            prop_assert!(b.eps_max >= a.eps_max);
            prop_assert!(a.t_min <= est.t_hat && a.eps_max >= est.eps_hat);
        }

        #[test]
        fn bounds_tighten_with_n(n in 10_000u64..10_000_000, k in 2u64..100) {
            let small = ChannelEstimate::expected(T, EPS, ETA, V_MOD, n, ExcessNoiseReferral::ChannelInput).unwrap();
            let big = ChannelEstimate::expected(T, EPS, ETA, V_MOD, n * k, ExcessNoiseReferral::ChannelInput).unwrap();
            let a = worst_case_bounds(&small, 6.5).unwrap();
            let b = worst_case_bounds(&big, 6.5).unwrap();
            prop_assert!(b.t_min >= a.t_min);
            prop_assert!(b.eps_max <= a.eps_max);
        }

        #[test]
        fn compose_inverts_decompose(eps_a in 0.0f64..0.5, extra in 0.0f64..0.5, t in 1e-4f64..1.0) {
            let tot = eps_a + extra;
            let b = decompose_excess_noise(tot, t, eps_a).unwrap();
            let back = compose_excess_noise(eps_a, b, t).unwrap();
            prop_assert!((back - tot).abs() < 1e-12 * tot.max(1.0));
        }
    }
}
