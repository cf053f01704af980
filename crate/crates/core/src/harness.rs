//! Configuration, end-to-end runs, key-rate-only evaluation and distance
//! sweeps.
//!
//! A run is a sequence of frames. Each frame is one signal slot followed by
//! one calibration slot; every frame draws from its own RNG stream so frames
//! can be processed in any order and reduced deterministically.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate_snu, normalize_symbols, CalibrationRecord};
use crate::channel::{aom_gate, apply_channel, fiber_transmittance, heterodyne_detect, ChannelParams, Detector, ReceiverParams};
use crate::dsp::next_fast_len;
use crate::estimation::{estimate_from_stats, worst_case_bounds, ChannelEstimate, ExcessNoiseReferral, SufficientStats, DEFAULT_Z};
use crate::rx::{receive, RxConfig, RxMetrics};
use crate::security::{key_rate_pipeline, plob_bound, referral_variants, KeyRateReport, SecurityParams};
use crate::tx::{
    build_frame_schedule, generate_gaussian_symbols, interleave_training, shape_and_upconvert, synthesize_pilot,
    FrameSchedule, ShapingConfig, TrainingPattern, TrainingReference,
};
use crate::units::linear_to_db;
use crate::{Decibel, Error, Result, RngStream, Samples, Waveform};

/// Bumped whenever the report layout changes.
pub const REPORT_SCHEMA: u32 = 1;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "CVQKD_THREADS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TxConfig {
    /// Per-quadrature modulation variance, SNU.
    pub v_mod: f64,
    pub training_ratio: f64,
    pub training_seed: u64,
    /// Pilot frequency in the optical field, Hz.
    pub pilot_frequency_hz: f64,
    /// Pilot power over the mean quantum power.
    pub pilot_power_db: Decibel,
    /// Calibration share of each frame.
    pub overhead: f64,
    pub shaping: ShapingConfig,
}

impl Default for TxConfig {
    fn default() -> Self {
        Self {
            v_mod: 8.0,
            training_ratio: 1.0 / 16.0,
            training_seed: 7,
            pilot_frequency_hz: 200e6,
            pilot_power_db: Decibel::lit(20.0),
            overhead: 0.5,
            shaping: ShapingConfig::default(),
        }
    }
}

/// Noise switches and gating at the receiver front end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectionConfig {
    pub shot_noise: bool,
    pub electronic_noise: bool,
    /// AOM extinction in the calibration slots; `None` blanks them exactly.
    pub aom_extinction_db: Option<Decibel>,
    /// Treat the configured untrusted loss as a total that already contains
    /// the electronic-noise transfer `10 log10(1 + v_el)`, so the physical
    /// attenuator is set that much lower.
    pub electronic_noise_in_untrusted_loss: bool,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            shot_noise: true,
            electronic_noise: true,
            aom_extinction_db: Some(Decibel::lit(50.0)),
            electronic_noise_in_untrusted_loss: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    /// From the LO-off trace and the frame's calibration slots.
    Measured,
    /// From the detector model; for noise-free runs.
    Nominal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub mode: CalibrationMode,
    /// Length of the one-time LO-off recording.
    pub elec_samples: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            mode: CalibrationMode::Measured,
            elec_samples: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimationConfig {
    pub z: f64,
    pub referral: ExcessNoiseReferral,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self {
            z: DEFAULT_Z,
            referral: ExcessNoiseReferral::ChannelInput,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SecurityConfig {
    pub beta: f64,
    pub f_rep: f64,
    pub overhead_a: f64,
    pub eps_smooth: f64,
    /// Block length for key-rate-only evaluation; `None` is asymptotic only.
    pub n_finite: Option<f64>,
    pub v_el_trusted: f64,
}

impl Default for SecurityConfig {
    fn default() -> Self {
        Self {
            beta: 0.956,
            f_rep: 1e9,
            overhead_a: 0.5,
            eps_smooth: 1e-10,
            n_finite: Some(1e9),
            v_el_trusted: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub from_km: f64,
    pub to_km: f64,
    pub step_km: f64,
    /// Block lengths of the finite-size columns.
    pub n_values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            from_km: 0.0,
            to_km: 120.0,
            step_km: 1.0,
            n_values: vec![1e10, 1e9],
        }
    }
}

/// Every tunable of a run; defaults are the reference operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub seed: u64,
    pub frames: usize,
    /// Data symbols per frame (training symbols come on top).
    pub symbols_per_frame: usize,
    pub output_dir: String,
    pub tx: TxConfig,
    pub channel: ChannelParams,
    pub receiver: ReceiverParams,
    pub detection: DetectionConfig,
    pub rx: RxConfig,
    pub calibration: CalibrationConfig,
    pub estimation: EstimationConfig,
    pub security: SecurityConfig,
    pub sweep: SweepConfig,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            frames: 4,
            symbols_per_frame: 250_000,
            output_dir: "out".into(),
            tx: TxConfig::default(),
            channel: ChannelParams::default(),
            receiver: ReceiverParams::default(),
            detection: DetectionConfig::default(),
            rx: RxConfig::default(),
            calibration: CalibrationConfig::default(),
            estimation: EstimationConfig::default(),
            security: SecurityConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

/// Derived physical quantities of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub eta: f64,
    /// Electronic noise actually present, SNU of shot noise.
    pub v_el: f64,
    /// `1 / (1 + v_el)` under one-time calibration.
    pub electronic_noise_transfer: f64,
    /// Loss of the physical attenuator after removing the transfer.
    pub physical_untrusted_loss_db: f64,
    pub t_physical: f64,
    /// Transmittance seen in SNU after calibration.
    pub t_effective: f64,
    /// Excess noise injected at the channel input, SNU.
    pub eps_input: f64,
    /// Expected calibrated unit in raw detector variance.
    pub expected_snu: f64,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::param("frames", "need at least one frame"));
        }
        if self.symbols_per_frame < 1000 {
            return Err(Error::param("symbols_per_frame", "need at least 1000 symbols"));
        }
        if !(self.tx.v_mod > 0.0 && self.tx.v_mod.is_finite()) {
            return Err(Error::param("tx.v_mod", "must be positive"));
        }
        if !(self.tx.overhead > 0.0 && self.tx.overhead < 1.0) {
            return Err(Error::param("tx.overhead", "must lie in (0, 1) to leave calibration slots"));
        }
        self.channel.validate()?;
        self.receiver.validate()?;
        self.rx.validate()?;
        if self.calibration.mode == CalibrationMode::Measured && !self.detection.shot_noise {
            return Err(Error::param("calibration.mode", "measured calibration needs shot noise"));
        }
        if self.calibration.elec_samples < 2 {
            return Err(Error::param("calibration.elec_samples", "need at least two samples"));
        }
        if !(self.estimation.z >= 0.0 && self.estimation.z.is_finite()) {
            return Err(Error::param("estimation.z", "must be non-negative"));
        }
        let s = &self.sweep;
        if !(s.step_km > 0.0 && s.from_km >= 0.0 && s.to_km >= s.from_km) {
            return Err(Error::param("sweep", "need 0 <= from <= to and a positive step"));
        }
        if s.n_values.iter().any(|n| !(*n >= 1.0)) {
            return Err(Error::param("sweep.n_values", "block lengths must be at least 1"));
        }
        self.link_budget()?;
        self.security_params()?.validate()
    }

    pub fn link_budget(&self) -> Result<LinkBudget> {
        let eta = self.receiver.efficiency()?;
        let v_el = if self.detection.electronic_noise {
            self.receiver.electronic_noise()?
        } else {
            0.0
        };
        let transfer_db = 10.0 * (1.0 + v_el).log10();
        let untrusted = self.channel.untrusted_loss_db.value();
        let physical = if self.detection.electronic_noise_in_untrusted_loss {
            untrusted - transfer_db
        } else {
            untrusted
        };
        if physical < -1e-12 {
            return Err(Error::param(
                "channel.untrusted_loss_db",
                format!("{untrusted} dB cannot hold the {transfer_db:.4} dB electronic-noise transfer"),
            ));
        }
        let physical = physical.max(0.0);
        let t_physical = fiber_transmittance(self.channel.length_km, self.channel.alpha_db_per_km, Decibel::new(physical)?)?;
        let shot = if self.detection.shot_noise { 1.0 } else { 0.0 };
        let expected_snu = match self.calibration.mode {
            CalibrationMode::Measured => shot + v_el,
            CalibrationMode::Nominal => 1.0 + v_el,
        };
        let t_effective = t_physical / expected_snu;
        let eps = self.channel.excess_noise_input;
        let eps_input = match self.estimation.referral {
            ExcessNoiseReferral::ChannelInput => eps,
            ExcessNoiseReferral::ChannelOutput => eps / t_effective,
        };
        Ok(LinkBudget {
            eta,
            v_el,
            electronic_noise_transfer: 1.0 / (1.0 + v_el),
            physical_untrusted_loss_db: physical,
            t_physical,
            t_effective,
            eps_input,
            expected_snu,
        })
    }

    /// Security parameters of the configured link, channel taken at its
    /// effective (post-calibration) transmittance.
    pub fn security_params(&self) -> Result<SecurityParams> {
        let b = self.link_budget()?;
        Ok(SecurityParams {
            v_mod: self.tx.v_mod,
            t_channel: b.t_effective.min(1.0),
            eps: self.channel.excess_noise_input,
            referral: self.estimation.referral,
            eta_trusted: b.eta,
            v_el_trusted: self.security.v_el_trusted,
            beta: self.security.beta,
            f_rep: self.security.f_rep,
            overhead_a: self.security.overhead_a,
            n_finite: self.security.n_finite,
            eps_smooth: self.security.eps_smooth,
            z: self.estimation.z,
            clearance_convention: self.receiver.clearance_convention,
            electronic_noise_transfer: b.electronic_noise_transfer,
        })
    }

    /// Worker threads: `CVQKD_THREADS` if set, else the available cores.
    pub fn worker_threads() -> usize {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

/// A failure tagged with where it happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub frame: Option<usize>,
    pub message: String,
}

impl StageError {
    fn new(stage: &str, frame: Option<usize>, e: &Error) -> Self {
        Self {
            stage: stage.into(),
            frame,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub frame: usize,
    pub symbols: usize,
    pub samples: usize,
    pub metrics: Option<RxMetrics>,
    pub calibration: Option<CalibrationRecord>,
    pub stats: Option<SufficientStats>,
    pub error: Option<StageError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub budget: LinkBudget,
    pub frames: Vec<FrameReport>,
    /// Data symbols that entered estimation.
    pub total_symbols: u64,
    /// Detector samples simulated per branch.
    pub total_samples: u64,
    pub stats: SufficientStats,
    pub estimate: Option<ChannelEstimate>,
    pub worst_case: Option<ChannelEstimate>,
    pub key_rate: Option<KeyRateReport>,
    pub errors: Vec<StageError>,
    pub config: SystemConfig,
}

impl ExperimentReport {
    pub fn succeeded(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Wall-clock figures, kept apart from the report so reports stay
/// byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub threads: usize,
    pub total_seconds: f64,
    pub frame_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub timing: Timing,
}

impl RunOutput {
    /// Write `report.json` and `timing.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&self.report)? + "\n")?;
        std::fs::write(dir.join("timing.json"), serde_json::to_string_pretty(&self.timing)? + "\n")?;
        Ok(())
    }
}

/// Everything shared by all frames of a run.
struct FramePlan {
    reference: TrainingReference,
    pattern: TrainingPattern,
    schedule: FrameSchedule,
    signal_len: usize,
    symbol_rate: f64,
    pilot_offset: f64,
    quantum_band: (f64, f64),
    noise_gain: f64,
    channel: ChannelParams,
    detector: Detector,
    extinction_db: f64,
    nominal: Option<CalibrationRecord>,
}

impl FramePlan {
    fn new(cfg: &SystemConfig, budget: &LinkBudget) -> Result<Self> {
        let shaping = &cfg.tx.shaping;
        let pattern = TrainingPattern::new(cfg.tx.training_seed, cfg.tx.v_mod);
        let reference = TrainingReference::new(cfg.symbols_per_frame, cfg.tx.training_ratio, &pattern)?;
        let signal_len = next_fast_len(shaping.output_len(reference.total_symbols));
        let a = cfg.tx.overhead;
        let calib_len = (signal_len as f64 * a / (1.0 - a)).round() as usize;
        let schedule = build_frame_schedule(signal_len + calib_len, a, calib_len)?;
        let symbol_rate = shaping.symbol_rate();
        let center = shaping.field_center();
        let half = shaping.occupied_bandwidth() / 2.0;
        let mut channel = cfg.channel.clone();
        channel.untrusted_loss_db = Decibel::new(budget.physical_untrusted_loss_db)?;
        channel.excess_noise_input = budget.eps_input;
        let detector = Detector {
            efficiency: budget.eta,
            electronic_noise: cfg.receiver.electronic_noise()?,
            shot_noise: cfg.detection.shot_noise,
            electronic_noise_on: cfg.detection.electronic_noise,
        };
        let nominal = (cfg.calibration.mode == CalibrationMode::Nominal).then(|| CalibrationRecord {
            v_elec_raw: budget.v_el,
            v_total_raw: budget.expected_snu,
            snu_scale: budget.expected_snu,
            slot_ids: Vec::new(),
        });
        Ok(Self {
            noise_gain: cfg.rx.noise_gain(shaping.sample_rate, symbol_rate)?,
            reference,
            pattern,
            schedule,
            signal_len,
            symbol_rate,
            pilot_offset: cfg.tx.pilot_frequency_hz - center,
            quantum_band: (center - half, center + half),
            channel,
            detector,
            extinction_db: cfg.detection.aom_extinction_db.map_or(f64::INFINITY, |d| d.value()),
            nominal,
        })
    }
}

/// The one-time LO-off recording.
fn record_electronic_noise(cfg: &SystemConfig, det: &Detector) -> Result<Waveform> {
    let lo_off = Detector {
        shot_noise: false,
        ..*det
    };
    let zeros = Waveform::real(vec![0.0; cfg.calibration.elec_samples], cfg.tx.shaping.sample_rate)?;
    lo_off.detect(&zeros, &mut RngStream::new(cfg.seed, 0))
}

struct FrameOutcome {
    report: FrameReport,
    seconds: f64,
}

fn run_frame(cfg: &SystemConfig, plan: &FramePlan, elec: Option<&Waveform>, k: usize) -> FrameOutcome {
    let start = Instant::now();
    let mut report = FrameReport {
        frame: k,
        symbols: 0,
        samples: plan.schedule.total_len(),
        metrics: None,
        calibration: None,
        stats: None,
        error: None,
    };
    if let Err((stage, e)) = frame_stages(cfg, plan, elec, k, &mut report) {
        report.error = Some(StageError::new(stage, Some(k), &e));
    }
    FrameOutcome {
        report,
        seconds: start.elapsed().as_secs_f64(),
    }
}

type Staged<T> = std::result::Result<T, (&'static str, Error)>;

fn at<T>(stage: &'static str, r: Result<T>) -> Staged<T> {
    r.map_err(|e| (stage, e))
}

fn frame_stages(
    cfg: &SystemConfig,
    plan: &FramePlan,
    elec: Option<&Waveform>,
    k: usize,
    report: &mut FrameReport,
) -> Staged<()> {
    let rng = RngStream::new(cfg.seed, k as u64 + 1);
    let shaping = &cfg.tx.shaping;
    let total = plan.schedule.total_len();

    let (alice, quantum, pilot) = at("tx", (|| {
        let data = generate_gaussian_symbols(cfg.symbols_per_frame, cfg.tx.v_mod, plan.symbol_rate, &mut rng.substream(100))?;
        let alice = interleave_training(&data, cfg.tx.training_ratio, &plan.pattern)?;
        let field = shape_and_upconvert(&alice, shaping)?;
        let reference_power = field.mean_power();
        let quantum = field.resized(total)?;
        let pilot = synthesize_pilot(
            shaping.sample_rate,
            cfg.tx.pilot_frequency_hz,
            cfg.tx.pilot_power_db,
            reference_power,
            total,
            plan.quantum_band,
        )?;
        Ok((alice, quantum, pilot))
    })())?;

    let (q_trace, p_trace) = at("channel", (|| {
        let (q, p) = apply_channel(&quantum, &pilot, &plan.channel, &mut rng.substream(200))?;
        let q = aom_gate(&q, &plan.schedule, plan.extinction_db)?;
        let p = aom_gate(&p, &plan.schedule, plan.extinction_db)?;
        heterodyne_detect(&q, &p, &plan.detector, &mut rng.substream(300))
    })())?;
    drop((quantum, pilot));

    let record = match (&plan.nominal, elec) {
        (Some(rec), _) => rec.clone(),
        (None, Some(elec)) => at("calibration", calibrate_snu(elec, &q_trace, &plan.schedule))?,
        (None, None) => return Err(("calibration", Error::param("elec_trace", "missing LO-off recording"))),
    };
    report.calibration = Some(record.clone());

    let out = at(
        "rx",
        receive(
            &q_trace,
            &p_trace,
            plan.signal_len,
            plan.pilot_offset,
            plan.symbol_rate,
            &plan.reference,
            &cfg.rx,
        ),
    )?;
    drop((q_trace, p_trace));
    report.metrics = Some(out.metrics);

    let bob = at("normalization", normalize_symbols(&out.symbols, &record, plan.noise_gain))?;
    let stats = at("estimation", SufficientStats::from_frames(&alice, &bob))?;
    report.symbols = stats.symbols() as usize;
    report.stats = Some(stats);
    Ok(())
}

/// Simulate the configured link end to end and estimate the key rate from
/// the recovered symbols.
///
/// Frame failures are recorded and the remaining frames still contribute;
/// the report is deterministic for a fixed configuration.
pub fn run_endtoend(cfg: &SystemConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let start = Instant::now();
    let budget = cfg.link_budget()?;
    let plan = FramePlan::new(cfg, &budget)?;
    let mut errors = Vec::new();
    let elec = if plan.nominal.is_none() {
        match record_electronic_noise(cfg, &plan.detector) {
            Ok(w) => Some(w),
            Err(e) => {
                errors.push(StageError::new("calibration", None, &e));
                None
            }
        }
    } else {
        None
    };

    let threads = SystemConfig::worker_threads().min(cfg.frames).max(1);
    let mut outcomes: Vec<Option<FrameOutcome>> = (0..cfg.frames).map(|_| None).collect();
    for chunk in (0..cfg.frames).collect::<Vec<_>>().chunks(threads) {
        std::thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&k| {
                    let (plan, elec) = (&plan, elec.as_ref());
                    (k, s.spawn(move || run_frame(cfg, plan, elec, k)))
                })
                .collect();
            for (k, h) in handles {
                outcomes[k] = Some(h.join().expect("frame worker panicked"));
            }
        });
    }

    let mut frames = Vec::with_capacity(cfg.frames);
    let mut frame_seconds = Vec::with_capacity(cfg.frames);
    let mut stats = SufficientStats::default();
    for o in outcomes.into_iter().map(|o| o.expect("every frame ran")) {
        if let Some(s) = &o.report.stats {
            stats.merge(s);
        }
        if let Some(e) = &o.report.error {
            errors.push(e.clone());
        }
        frame_seconds.push(o.seconds);
        frames.push(o.report);
    }

    let mut estimate = None;
    let mut worst_case = None;
    let mut key_rate = None;
    match estimate_from_stats(&stats, budget.eta, cfg.tx.v_mod, cfg.estimation.referral) {
        Ok(est) => {
            match worst_case_bounds(&est, cfg.estimation.z) {
                Ok(w) => worst_case = Some(w),
                Err(e) => errors.push(StageError::new("estimation", None, &e)),
            }
            match cfg.security_params().and_then(|p| key_rate_pipeline(&p, Some(&est))) {
                Ok(r) => key_rate = Some(r),
                Err(e) => errors.push(StageError::new("security", None, &e)),
            }
            estimate = Some(est);
        }
        Err(e) => errors.push(StageError::new("estimation", None, &e)),
    }

    let report = ExperimentReport {
        schema: REPORT_SCHEMA,
        total_symbols: stats.symbols(),
        total_samples: frames.iter().map(|f| f.samples as u64).sum(),
        budget,
        frames,
        stats,
        estimate,
        worst_case,
        key_rate,
        errors,
        config: cfg.clone(),
    };
    Ok(RunOutput {
        report,
        timing: Timing {
            threads,
            total_seconds: start.elapsed().as_secs_f64(),
            frame_seconds,
        },
    })
}

/// Key-rate-only evaluation of the configured link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyRateSummary {
    pub budget: LinkBudget,
    pub report: KeyRateReport,
    /// The same inputs under each excess-noise referral.
    pub referral_variants: Vec<KeyRateReport>,
    /// PLOB bound at the same transmittance and effective rate `f (1 - a)`.
    pub k_plob: f64,
}

pub fn evaluate_key_rate(cfg: &SystemConfig) -> Result<KeyRateSummary> {
    cfg.validate()?;
    let p = cfg.security_params()?;
    Ok(KeyRateSummary {
        budget: cfg.link_budget()?,
        report: key_rate_pipeline(&p, None)?,
        referral_variants: referral_variants(&p)?,
        k_plob: plob_bound(p.t_channel, p.f_rep * (1.0 - p.overhead_a))?,
    })
}

/// One row of a rate-versus-distance table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub distance_km: f64,
    pub t: f64,
    pub k_asym: f64,
    /// One entry per configured block length.
    pub k_finite: Vec<f64>,
    pub k_plob: f64,
}

/// `from, from + step, ...` up to and including `to` (within rounding).
pub fn sweep_distances(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && to >= from && from >= 0.0) {
        return Err(Error::param("sweep", "need 0 <= from <= to and a positive step"));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| from + i as f64 * step).collect())
}

/// Analytic key rates along the distance axis at the configured untrusted
/// loss, with the PLOB bound at the same transmittance.
pub fn sweep_distance(cfg: &SystemConfig, distances_km: &[f64]) -> Result<Vec<SweepRow>> {
    if distances_km.is_empty() {
        return Err(Error::param("distances_km", "empty"));
    }
    if distances_km.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("distances_km", "must be strictly ascending"));
    }
    distances_km
        .iter()
        .map(|&d| {
            let mut c = cfg.clone();
            c.channel.length_km = d;
            let mut p = c.security_params()?;
            p.n_finite = None;
            let k_asym = key_rate_pipeline(&p, None)?.k_asym;
            let k_finite = cfg
                .sweep
                .n_values
                .iter()
                .map(|&n| {
                    let q = SecurityParams {
                        n_finite: Some(n),
                        ..p.clone()
                    };
                    Ok(key_rate_pipeline(&q, None)?.k_finite)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepRow {
                distance_km: d,
                t: p.t_channel,
                k_asym,
                k_finite,
                k_plob: plob_bound(p.t_channel, p.f_rep * (1.0 - p.overhead_a))?,
            })
        })
        .collect()
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros trimmed.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        let decimals = (8 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}

/// Column name for a finite-size block length, e.g. `K_1e10`.
pub fn finite_column(n: f64) -> String {
    format!("K_{n:e}")
}

/// CSV with header `distance_km,T,K_asym,K_<n>...,K_plob`.
pub fn sweep_csv(rows: &[SweepRow], n_values: &[f64]) -> String {
    let mut out = String::from("distance_km,T,K_asym");
    for &n in n_values {
        out.push(',');
        out.push_str(&finite_column(n));
    }
    out.push_str(",K_plob\n");
    for r in rows {
        let mut cells = vec![format_sig9(r.distance_km), format_sig9(r.t), format_sig9(r.k_asym)];
        cells.extend(r.k_finite.iter().map(|&k| format_sig9(k)));
        cells.push(format_sig9(r.k_plob));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Raw-trace power of a waveform in dB relative to one SNU; handy for logs.
pub fn power_snu_db(w: &Waveform, snu_scale: f64) -> Result<f64> {
    let p = match w.samples() {
        Samples::Real(v) => v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64,
        Samples::Complex(v) => v.iter().map(|z| z.norm_sqr()).sum::<f64>() / (2 * v.len()) as f64,
    };
    Ok(linear_to_db(p / snu_scale)?.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let cfg = SystemConfig::default();
        let back = SystemConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        let partial = SystemConfig::from_json(r#"{"seed": 9, "channel": {"length_km": 10.0}}"#).unwrap();
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.channel.length_km, 10.0);
        assert_eq!(partial.channel.alpha_db_per_km, 0.2);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(SystemConfig::from_json(r#"{"sed": 9}"#).is_err());
        assert!(SystemConfig::from_json(r#"{"channel": {"lenght_km": 1}}"#).is_err());
        assert!(SystemConfig::from_json(r#"{"frames": 0}"#).is_err());
    }

    #[test]
    fn default_budget_transfers_electronic_noise() {
        let b = SystemConfig::default().link_budget().unwrap();
        assert!((b.v_el - 0.2212).abs() < 1e-4);
        let nominal = fiber_transmittance(28.6, 0.2, Decibel::lit(5.0)).unwrap();
        assert!((b.t_effective / nominal - 1.0).abs() < 1e-12);
        assert!((b.physical_untrusted_loss_db - (5.0 - 10.0 * 1.2212f64.log10())).abs() < 1e-3);
        let mut off = SystemConfig::default();
        off.detection.electronic_noise_in_untrusted_loss = false;
        let b = off.link_budget().unwrap();
        assert!((b.t_effective * (1.0 + b.v_el) / nominal - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_untrusted_loss_cannot_hold_transfer() {
        let mut cfg = SystemConfig::default();
        cfg.channel.untrusted_loss_db = Decibel::lit(0.5);
        assert!(cfg.validate().is_err());
        cfg.detection.electronic_noise_in_untrusted_loss = false;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(28.6), "28.6");
        assert_eq!(format_sig9(63859612.345678), "63859612.3");
        assert_eq!(format_sig9(0.0847227414), "0.0847227414");
        assert_eq!(format_sig9(1.23456789012e-7), "1.23456789e-07");
        assert_eq!(format_sig9(1e10), "1e+10");
        assert_eq!(format_sig9(-2.5), "-2.5");
    }

    #[test]
    fn sweep_rows_and_columns() {
        let d = sweep_distances(0.0, 50.0, 1.0).unwrap();
        assert_eq!(d.len(), 51);
        assert_eq!(sweep_distances(0.0, 1.0, 0.1).unwrap().len(), 11);
        assert!(sweep_distances(5.0, 1.0, 1.0).is_err());
        let cfg = SystemConfig::default();
        let rows = sweep_distance(&cfg, &d).unwrap();
        let csv = sweep_csv(&rows, &cfg.sweep.n_values);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "distance_km,T,K_asym,K_1e10,K_1e9,K_plob");
        assert_eq!(lines.count(), 51);
        assert!(sweep_distance(&cfg, &[2.0, 1.0]).is_err());
        assert!(sweep_distance(&cfg, &[]).is_err());
    }

    #[test]
    fn sweep_columns_monotone_and_bounded() {
        let cfg = SystemConfig::default();
        let rows = sweep_distance(&cfg, &sweep_distances(0.0, 120.0, 1.0).unwrap()).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].k_asym <= w[0].k_asym);
            assert!(w[1].k_plob <= w[0].k_plob);
            for j in 0..2 {
                assert!(w[1].k_finite[j] <= w[0].k_finite[j]);
            }
        }
        for r in &rows {
            assert!(r.k_plob >= r.k_asym);
            assert!(r.k_asym >= r.k_finite[0] && r.k_finite[0] >= r.k_finite[1]);
        }
        let cutoff = |f: &dyn Fn(&SweepRow) -> f64| rows.iter().position(|r| f(r) == 0.0);
        let asym = cutoff(&|r| r.k_asym).expect("asymptotic rate reaches zero by 120 km");
        let f9 = cutoff(&|r| r.k_finite[1]).unwrap();
        let f10 = cutoff(&|r| r.k_finite[0]).unwrap();
        assert!(f9 < f10 && f10 < asym, "{f9} {f10} {asym}");
        assert!(rows[50].k_asym > 0.0);
    }

    #[test]
    fn keyrate_summary_at_default_point() {
        let s = evaluate_key_rate(&SystemConfig::default()).unwrap();
        assert!(s.report.k_asym > 1e6 && s.report.k_asym < 1e7, "{}", s.report.k_asym);
        assert!((s.k_plob / 63.8596e6 - 1.0).abs() < 1e-3);
        assert!(s.k_plob > s.report.k_asym);
        assert_eq!(s.referral_variants.len(), 2);
    }
}
