//! Key-rate layer: heterodyne mutual information, the Holevo bound of a
//! Gaussian entangling cloner with a trusted detector efficiency, the
//! finite-size offset and the repeaterless PLOB reference.

use serde::{Deserialize, Serialize};

use crate::channel::{fiber_transmittance, ClearanceConvention, ReceiverParams};
use crate::estimation::{worst_case_bounds, ChannelEstimate, ExcessNoiseReferral, DEFAULT_Z};
use crate::{Decibel, Error, Result};

/// Tolerance below 1 accepted for symplectic eigenvalues.
const PHYSICAL_TOL: f64 = 1e-9;

/// Identifier stamped on every report for the Eve model used.
pub const HOLEVO_MODEL: &str = "gaussian_entangling_cloner/trusted_efficiency/heterodyne";

/// Identifier of the finite-size offset form.
pub const DELTA_FORM: &str = "7*sqrt(log2(2/eps_smooth)/n)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SecurityParams {
    pub v_mod: f64,
    /// Untrusted channel transmittance, including any transferred loss.
    pub t_channel: f64,
    /// Excess noise in `referral`, SNU.
    pub eps: f64,
    pub referral: ExcessNoiseReferral,
    pub eta_trusted: f64,
    /// Trusted electronic noise in SNU; zero under one-time calibration.
    pub v_el_trusted: f64,
    pub beta: f64,
    pub f_rep: f64,
    pub overhead_a: f64,
    /// Block length for the finite-size rate; `None` is the asymptotic limit.
    pub n_finite: Option<f64>,
    pub eps_smooth: f64,
    /// Worst-case width in standard deviations.
    pub z: f64,
    /// Echoed into the convention record.
    pub clearance_convention: ClearanceConvention,
    /// `1 / (1 + v_el)` moved from trusted noise into untrusted loss.
    pub electronic_noise_transfer: f64,
}

impl Default for SecurityParams {
    fn default() -> Self {
        let rx = ReceiverParams::default();
        let v_el = rx.electronic_noise().expect("default receiver is valid");
        Self {
            v_mod: 8.0,
            t_channel: fiber_transmittance(28.6, 0.2, Decibel::lit(5.0)).expect("valid"),
            eps: 0.055,
            referral: ExcessNoiseReferral::ChannelInput,
            eta_trusted: rx.efficiency().expect("default receiver is valid"),
            v_el_trusted: 0.0,
            beta: 0.956,
            f_rep: 1e9,
            overhead_a: 0.5,
            n_finite: Some(1e9),
            eps_smooth: 1e-10,
            z: DEFAULT_Z,
            clearance_convention: rx.clearance_convention,
            electronic_noise_transfer: 1.0 / (1.0 + v_el),
        }
    }
}

impl SecurityParams {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v <= 1.0;
        if !(self.v_mod > 0.0 && self.v_mod.is_finite()) {
            return Err(Error::param("v_mod", format!("{} must be positive", self.v_mod)));
        }
        if !(self.t_channel >= 0.0 && self.t_channel <= 1.0) {
            return Err(Error::param("t_channel", format!("{} outside [0, 1]", self.t_channel)));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::param("eps", format!("{} must be non-negative", self.eps)));
        }
        if !in_unit(self.eta_trusted) {
            return Err(Error::param("eta_trusted", format!("{} outside (0, 1]", self.eta_trusted)));
        }
        if !(self.v_el_trusted >= 0.0) {
            return Err(Error::param("v_el_trusted", "must be non-negative"));
        }
        if !in_unit(self.beta) {
            return Err(Error::param("beta", format!("{} outside (0, 1]", self.beta)));
        }
        if !(self.f_rep > 0.0 && self.f_rep.is_finite()) {
            return Err(Error::param("f_rep", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.overhead_a) {
            return Err(Error::param("overhead_a", format!("{} outside [0, 1)", self.overhead_a)));
        }
        if let Some(n) = self.n_finite {
            if !(n >= 1.0) {
                return Err(Error::param("n_finite", format!("{n} < 1")));
            }
        }
        if !(self.eps_smooth > 0.0 && self.eps_smooth < 1.0) {
            return Err(Error::param("eps_smooth", "must lie in (0, 1)"));
        }
        if !(self.z >= 0.0 && self.z.is_finite()) {
            return Err(Error::param("z", "must be non-negative"));
        }
        Ok(())
    }

    /// Excess noise referred to the channel input.
    pub fn eps_input(&self) -> f64 {
        to_input(self.eps, self.t_channel, self.referral)
    }
}

fn to_input(eps: f64, t: f64, referral: ExcessNoiseReferral) -> f64 {
    match referral {
        ExcessNoiseReferral::ChannelInput => eps,
        ExcessNoiseReferral::ChannelOutput if t > 0.0 => eps / t,
        ExcessNoiseReferral::ChannelOutput => f64::MAX,
    }
}

/// `G(x) = (x+1) log2(x+1) - x log2(x)`, the entropy of a thermal state
/// with mean photon number `x`.
pub fn g_function(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::param("x", format!("{x} < 0")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// `log2(1 + SNR)` with `SNR = (eta T v_mod / 2) / (1 + eta T eps / 2 + v_el)`.
pub fn mutual_information_at(v_mod: f64, t: f64, eps_input: f64, eta: f64, v_el: f64) -> f64 {
    let signal = eta * t * v_mod / 2.0;
    let noise = 1.0 + eta * t * eps_input / 2.0 + v_el;
    (signal / noise).ln_1p() / std::f64::consts::LN_2
}

/// Heterodyne mutual information between Alice and Bob, bits per symbol.
pub fn mutual_information(p: &SecurityParams) -> f64 {
    mutual_information_at(p.v_mod, p.t_channel, p.eps_input(), p.eta_trusted, p.v_el_trusted)
}

/// Symplectic eigenvalues and the resulting Holevo quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolevoTerms {
    /// Spectrum of the two-mode state shared by Alice and Bob's channel output.
    pub nu1: f64,
    pub nu2: f64,
    /// Spectrum of Alice's mode and the trusted-loss mode, conditioned on
    /// Bob's heterodyne outcome. A fifth eigenvalue is exactly 1.
    pub nu3: f64,
    pub nu4: f64,
    pub chi_be: f64,
}

/// Entries `(a, b, c)` of the two-mode covariance matrix before Bob's
/// detector: `a = V`, `b = T(V - 1 + eps) + 1`, `c = sqrt(T(V^2 - 1))`.
pub fn covariance_entries(v_mod: f64, t: f64, eps_input: f64) -> (f64, f64, f64) {
    let v = v_mod + 1.0;
    (v, t * (v - 1.0 + eps_input) + 1.0, (t * (v * v - 1.0)).sqrt())
}

/// Heterodyne detector noise referred to Bob's input, `(2 - eta + 2 v_el) / eta`.
pub fn heterodyne_noise(eta: f64, v_el: f64) -> f64 {
    (2.0 - eta + 2.0 * v_el) / eta
}

/// Holevo bound between Bob's data and Eve for explicit parameters.
///
/// Eve purifies the channel state; the detector efficiency (a beam
/// splitter) and any electronic noise (an EPR ancilla) are trusted and stay
/// out of her reach, so her conditional entropy is that of Alice's mode plus
/// the trusted modes given Bob's heterodyne outcome.
pub fn holevo_terms(v_mod: f64, t: f64, eps_input: f64, eta: f64, v_el: f64) -> Result<HolevoTerms> {
    let v = v_mod + 1.0;
    // u = T * chi_line with chi_line = 1/T - 1 + eps; finite at T = 0.
    let u = 1.0 - t + t * eps_input;
    let chi_het = heterodyne_noise(eta, v_el);

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + (t * v + u).powi(2);
    let b = (v * u + t).powi(2);
    let (nu1, nu2) = spectrum_pair(a, b);

    let den = (t * v + u + chi_het).powi(2);
    let c = (a * chi_het * chi_het + b + 1.0 + 2.0 * chi_het * (v * b.sqrt() + t * v + u) + 2.0 * t * (v * v - 1.0)) / den;
    let d = (v + b.sqrt() * chi_het).powi(2) / den;
    let (nu3, nu4) = spectrum_pair(c, d);

    for nu in [nu1, nu2, nu3, nu4] {
        if !(nu >= 1.0 - PHYSICAL_TOL) {
            return Err(Error::Unphysical { value: nu });
        }
    }
    let g = |nu: f64| g_function(((nu - 1.0) / 2.0).max(0.0)).expect("non-negative argument");
    let mut chi_be = g(nu1) + g(nu2) - g(nu3) - g(nu4);
    if chi_be < 0.0 && chi_be > -PHYSICAL_TOL {
        chi_be = 0.0;
    }
    if !(chi_be >= 0.0) {
        return Err(Error::Unphysical { value: chi_be });
    }
    Ok(HolevoTerms {
        nu1,
        nu2,
        nu3,
        nu4,
        chi_be,
    })
}

/// Roots of `nu^4 - a nu^2 + b = 0`, larger first. The product `sqrt(b)`
/// gives the smaller root without cancellation.
fn spectrum_pair(a: f64, b: f64) -> (f64, f64) {
    let disc = (a * a - 4.0 * b).max(0.0).sqrt();
    let hi = ((a + disc) / 2.0).sqrt();
    let lo = if hi > 0.0 { b.sqrt() / hi } else { 0.0 };
    (hi, lo)
}

pub fn holevo_bound(p: &SecurityParams) -> Result<HolevoTerms> {
    holevo_terms(p.v_mod, p.t_channel, p.eps_input(), p.eta_trusted, p.v_el_trusted)
}

/// Privacy-amplification offset `7 sqrt(log2(2/eps_smooth) / n)`; zero for
/// an infinite block.
pub fn finite_size_delta(n: f64, eps_smooth: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(Error::param("n", format!("{n} < 1")));
    }
    if !(eps_smooth > 0.0 && eps_smooth < 1.0) {
        return Err(Error::param("eps_smooth", format!("{eps_smooth} outside (0, 1)")));
    }
    if n.is_infinite() {
        return Ok(0.0);
    }
    Ok(7.0 * ((2.0 / eps_smooth).log2() / n).sqrt())
}

/// Rate clamped at zero, with the clamp recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyRate {
    pub bits_per_second: f64,
    pub below_threshold: bool,
}

/// `K = f (1 - a) max(0, beta I_AB - chi_BE - delta)`.
pub fn secret_key_rate(f: f64, a: f64, beta: f64, i_ab: f64, chi_be: f64, delta: f64) -> KeyRate {
    let per_symbol = beta * i_ab - chi_be - delta;
    KeyRate {
        bits_per_second: f * (1.0 - a) * per_symbol.max(0.0),
        below_threshold: !(per_symbol > 0.0),
    }
}

/// Repeaterless bound `f_eff (-log2(1 - T))`.
pub fn plob_bound(t_total: f64, f_eff: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t_total) {
        return Err(Error::param("t_total", format!("{t_total} outside [0, 1)")));
    }
    Ok(-f_eff * (-t_total).ln_1p() / std::f64::consts::LN_2)
}

/// Conventions a key rate depends on, stamped into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionRecord {
    pub snu: String,
    pub excess_noise_referral: ExcessNoiseReferral,
    pub clearance: ClearanceConvention,
    pub holevo_model: String,
    pub delta_form: String,
    pub electronic_noise_transfer: f64,
    pub worst_case_z: f64,
    /// Where the channel parameters came from: `exact` or `estimated`.
    pub parameter_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRateReport {
    /// Transmittance and input-referred excess noise behind the asymptotic rate.
    pub t_point: f64,
    pub eps_point: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub holevo: HolevoTerms,
    /// `beta I_AB - chi_BE` before clamping, bits per symbol.
    pub key_per_symbol: f64,
    pub k_asym: f64,
    pub asym_below_threshold: bool,
    /// Worst-case parameters behind the finite-size rate.
    pub t_worst: Option<f64>,
    pub eps_worst: Option<f64>,
    pub n_finite: Option<f64>,
    pub delta_n: f64,
    pub i_ab_finite: f64,
    pub chi_be_finite: f64,
    pub k_finite: f64,
    pub finite_below_threshold: bool,
    /// Parameter estimation could not certify the channel.
    pub abort: bool,
    pub conventions: ConventionRecord,
    pub inputs: SecurityParams,
}

/// Asymptotic rate from point values. The finite-size rate keeps the
/// measured mutual information but evaluates Eve's bound at the `z`-sigma
/// worst-case channel and subtracts the offset.
///
/// Without an estimate the channel is taken from `p` and the worst case is
/// what an ideal estimator would certify on `n_finite` symbols. With an
/// estimate its point values drive the asymptotic rate and its own sample
/// count sets both the bounds and the offset.
pub fn key_rate_pipeline(p: &SecurityParams, est: Option<&ChannelEstimate>) -> Result<KeyRateReport> {
    p.validate()?;
    if let Some(e) = est {
        if e.convention != p.referral {
            return Err(Error::param("referral", "estimate and parameters use different referrals"));
        }
    }
    let (t_point, eps_point) = match est {
        Some(e) => (e.transmittance().min(1.0), e.eps_input().max(0.0)),
        None => (p.t_channel, p.eps_input()),
    };
    let i_ab = mutual_information_at(p.v_mod, t_point, eps_point, p.eta_trusted, p.v_el_trusted);
    let holevo = holevo_terms(p.v_mod, t_point, eps_point, p.eta_trusted, p.v_el_trusted)?;
    let asym = secret_key_rate(p.f_rep, p.overhead_a, p.beta, i_ab, holevo.chi_be, 0.0);

    let bounded = match (est, p.n_finite) {
        (Some(e), _) => Some((worst_case_bounds(e, p.z)?, e.n_used as f64)),
        (None, Some(n)) if n.is_finite() => {
            let e = ChannelEstimate::expected(
                p.t_channel,
                p.eps,
                p.eta_trusted,
                p.v_mod,
                n.round() as u64,
                p.referral,
            )?;
            Some((worst_case_bounds(&e, p.z)?, n))
        }
        (None, _) => None,
    };

    let mut abort = false;
    let (t_worst, eps_worst, n_finite, delta_n, i_fin, chi_fin, fin) = match bounded {
        Some((b, n)) if b.abort => {
            abort = true;
            let delta = finite_size_delta(n.max(1.0), p.eps_smooth)?;
            let zero = KeyRate {
                bits_per_second: 0.0,
                below_threshold: true,
            };
            (Some(0.0), Some(b.eps_max_input()), Some(n), delta, 0.0, 0.0, zero)
        }
        Some((b, n)) => {
            let (t, eps) = (b.transmittance_min().min(1.0), b.eps_max_input());
            let delta = finite_size_delta(n, p.eps_smooth)?;
            let chi = holevo_terms(p.v_mod, t, eps, p.eta_trusted, p.v_el_trusted)?.chi_be;
            let k = secret_key_rate(p.f_rep, p.overhead_a, p.beta, i_ab, chi, delta);
            (Some(t), Some(eps), Some(n), delta, i_ab, chi, k)
        }
        None => (None, None, None, 0.0, i_ab, holevo.chi_be, asym),
    };

    Ok(KeyRateReport {
        t_point,
        eps_point,
        i_ab,
        chi_be: holevo.chi_be,
        holevo,
        key_per_symbol: p.beta * i_ab - holevo.chi_be,
        k_asym: asym.bits_per_second,
        asym_below_threshold: asym.below_threshold,
        t_worst,
        eps_worst,
        n_finite,
        delta_n,
        i_ab_finite: i_fin,
        chi_be_finite: chi_fin,
        k_finite: fin.bits_per_second,
        finite_below_threshold: fin.below_threshold,
        abort,
        conventions: ConventionRecord {
            snu: "shot_plus_electronic_one_time".into(),
            excess_noise_referral: p.referral,
            clearance: p.clearance_convention,
            holevo_model: HOLEVO_MODEL.into(),
            delta_form: DELTA_FORM.into(),
            electronic_noise_transfer: p.electronic_noise_transfer,
            worst_case_z: p.z,
            parameter_source: if est.is_some() { "estimated" } else { "exact" }.into(),
        },
        inputs: p.clone(),
    })
}

/// The same evaluation under every excess-noise referral, with `p.eps`
/// reinterpreted in each.
pub fn referral_variants(p: &SecurityParams) -> Result<Vec<KeyRateReport>> {
    [ExcessNoiseReferral::ChannelInput, ExcessNoiseReferral::ChannelOutput]
        .into_iter()
        .map(|referral| {
            key_rate_pipeline(
                &SecurityParams {
                    referral,
                    ..p.clone()
                },
                None,
            )
        })
        .collect()
}
