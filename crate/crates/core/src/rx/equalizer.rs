use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::scale_invariant_mse;
use crate::tx::{SymbolFrame, SymbolRole};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EqualizerMode {
    LeastSquares,
    /// Normalized LMS over the training symbols with step `mu`.
    Lms { mu: f64, passes: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EqualizerConfig {
    /// Odd number of symbol-spaced taps.
    pub num_taps: usize,
    pub mode: EqualizerMode,
    /// Taps whose fitted value is below this many standard errors are
    /// dropped before a refit; `None` keeps every tap.
    pub prune_z: Option<f64>,
}

impl Default for EqualizerConfig {
    fn default() -> Self {
        Self {
            num_taps: 21,
            mode: EqualizerMode::LeastSquares,
            prune_z: Some(4.0),
        }
    }
}

/// 2x2 real MIMO FIR acting on stacked `(x, p)` pairs.
///
/// `rows[0]` produces `x`, `rows[1]` produces `p`. Each row holds
/// `2 * num_taps` weights ordered `(x, p)` per tap, tap 0 at offset
/// `-(num_taps / 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MimoFir {
    pub num_taps: usize,
    pub rows: [Vec<f64>; 2],
}

impl MimoFir {
    pub fn identity(num_taps: usize) -> Self {
        let mut rows = [vec![0.0; 2 * num_taps], vec![0.0; 2 * num_taps]];
        let c = num_taps / 2;
        rows[0][2 * c] = 1.0;
        rows[1][2 * c + 1] = 1.0;
        Self { num_taps, rows }
    }

    /// The 2x2 block at tap offset `j` (relative to the center).
    pub fn block(&self, j: i64) -> [[f64; 2]; 2] {
        let t = (j + (self.num_taps / 2) as i64) as usize;
        [
            [self.rows[0][2 * t], self.rows[0][2 * t + 1]],
            [self.rows[1][2 * t], self.rows[1][2 * t + 1]],
        ]
    }

    pub fn apply(&self, y: &[Complex64]) -> Vec<Complex64> {
        let half = (self.num_taps / 2) as i64;
        let active: Vec<Vec<(i64, usize, f64)>> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(i, w)| ((i / 2) as i64 - half, i % 2, *w))
                    .collect()
            })
            .collect();
        let n = y.len() as i64;
        (0..n)
            .map(|k| {
                let mut out = [0.0; 2];
                for (o, taps) in out.iter_mut().zip(&active) {
                    for &(j, comp, w) in taps {
                        let i = k + j;
                        if (0..n).contains(&i) {
                            let v = y[i as usize];
                            *o += w * if comp == 0 { v.re } else { v.im };
                        }
                    }
                }
                Complex64::new(out[0], out[1])
            })
            .collect()
    }

    fn mean_row_energy(&self) -> f64 {
        self.rows.iter().flatten().map(|w| w * w).sum::<f64>() / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualizerOutput {
    pub frame: SymbolFrame,
    pub filter: MimoFir,
    /// Scale-invariant training MSE before and after equalization.
    pub mse_before: f64,
    pub mse_after: f64,
    /// Normal equations needed ridge regularization.
    pub regularized: bool,
    pub kept_taps: usize,
}

fn regressor(y: &[Complex64], k: usize, num_taps: usize, out: &mut [f64]) {
    let half = (num_taps / 2) as i64;
    let n = y.len() as i64;
    for t in 0..num_taps {
        let i = k as i64 + t as i64 - half;
        let v = if (0..n).contains(&i) {
            y[i as usize]
        } else {
            Complex64::new(0.0, 0.0)
        };
        out[2 * t] = v.re;
        out[2 * t + 1] = v.im;
    }
}

/// Solve `R w = b`, falling back to a ridge term if `R` is not positive definite.
fn solve_spd(r: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, Option<DMatrix<f64>>, bool) {
    if let Some(ch) = r.clone().cholesky() {
        let w = ch.solve(b);
        return (w, Some(ch.inverse()), false);
    }
    let dim = r.nrows();
    let scale = (r.trace() / dim as f64).max(f64::MIN_POSITIVE);
    let mut lambda = 1e-10 * scale;
    loop {
        let reg = r + DMatrix::identity(dim, dim) * lambda;
        if let Some(ch) = reg.cholesky() {
            return (ch.solve(b), Some(ch.inverse()), true);
        }
        lambda *= 100.0;
        if lambda > 1e6 * scale {
            return (DVector::zeros(dim), None, true);
        }
    }
}

fn subset(r: &DMatrix<f64>, b: &DVector<f64>, keep: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
    let m = keep.len();
    let rs = DMatrix::from_fn(m, m, |i, j| r[(keep[i], keep[j])]);
    let bs = DVector::from_fn(m, |i, _| b[keep[i]]);
    (rs, bs)
}

/// Fit a 2x2 real MIMO FIR on the training symbols and apply it to the frame.
///
/// Least squares is solved through the normal equations (Cholesky, ridge
/// fallback). Optional significance pruning drops taps that are within
/// `prune_z` standard errors of zero and refits; the center 2x2 block is
/// always kept. The fitted filter is finally divided by the square root of
/// its mean row energy so a white noise floor keeps its level.
pub fn equalize(frame: &SymbolFrame, training: &[Complex64], cfg: &EqualizerConfig) -> Result<EqualizerOutput> {
    if cfg.num_taps == 0 || cfg.num_taps.is_multiple_of(2) {
        return Err(Error::param("num_taps", format!("{} must be odd", cfg.num_taps)));
    }
    let positions: Vec<usize> = frame.indices(SymbolRole::Training).collect();
    if positions.len() != training.len() {
        return Err(Error::LengthMismatch {
            what: "training positions vs reference",
            left: positions.len(),
            right: training.len(),
        });
    }
    let needed = 4 * cfg.num_taps;
    if positions.len() < needed {
        return Err(Error::InsufficientTraining {
            needed,
            available: positions.len(),
        });
    }
    let y = &frame.symbols;
    let received: Vec<Complex64> = positions.iter().map(|&k| y[k]).collect();
    let mse_before = scale_invariant_mse(&received, training);

    let (mut filter, regularized, kept) = match cfg.mode {
        EqualizerMode::LeastSquares => fit_least_squares(y, &positions, training, cfg)?,
        EqualizerMode::Lms { mu, passes } => fit_lms(y, &positions, training, cfg.num_taps, mu, passes),
    };
    let e = filter.mean_row_energy();
    if e > 0.0 {
        let s = e.sqrt().recip();
        filter.rows.iter_mut().flatten().for_each(|w| *w *= s);
    }
    let z = filter.apply(y);
    let after: Vec<Complex64> = positions.iter().map(|&k| z[k]).collect();
    let mse_after = scale_invariant_mse(&after, training);
    Ok(EqualizerOutput {
        frame: frame.with_symbols(z)?,
        filter,
        mse_before,
        mse_after,
        regularized,
        kept_taps: kept,
    })
}

fn fit_least_squares(
    y: &[Complex64],
    positions: &[usize],
    training: &[Complex64],
    cfg: &EqualizerConfig,
) -> Result<(MimoFir, bool, usize)> {
    let dim = 2 * cfg.num_taps;
    let mut r = DMatrix::<f64>::zeros(dim, dim);
    let mut b = [DVector::<f64>::zeros(dim), DVector::<f64>::zeros(dim)];
    let mut tt = [0.0; 2];
    let mut reg = vec![0.0; dim];
    for (&k, t) in positions.iter().zip(training) {
        regressor(y, k, cfg.num_taps, &mut reg);
        let v = DVector::from_column_slice(&reg);
        r.syger(1.0, &v, &v, 1.0);
        b[0].axpy(t.re, &v, 1.0);
        b[1].axpy(t.im, &v, 1.0);
        tt[0] += t.re * t.re;
        tt[1] += t.im * t.im;
    }
    r.fill_upper_triangle_with_lower_triangle();

    let center = [cfg.num_taps / 2 * 2, cfg.num_taps / 2 * 2 + 1];
    let m = positions.len() as f64;
    let mut rows = [vec![0.0; dim], vec![0.0; dim]];
    let mut regularized = false;
    let mut kept = 0;
    for row in 0..2 {
        let (w, inv, flag) = solve_spd(&r, &b[row]);
        regularized |= flag;
        let mut keep: Vec<usize> = (0..dim).collect();
        if let (Some(z_min), Some(inv)) = (cfg.prune_z, inv) {
            let resid = (tt[row] - w.dot(&b[row])).max(0.0);
            let dof = m - dim as f64;
            let sigma2 = if dof > 0.0 { resid / dof } else { 0.0 };
            if sigma2 > 1e-24 * tt[row] / m {
                keep = (0..dim)
                    .filter(|&i| {
                        let se = (sigma2 * inv[(i, i)]).sqrt();
                        center.contains(&i) || w[i].abs() >= z_min * se
                    })
                    .collect();
            }
        }
        if keep.len() == dim {
            rows[row] = w.iter().copied().collect();
        } else {
            let (rs, bs) = subset(&r, &b[row], &keep);
            let (ws, _, flag) = solve_spd(&rs, &bs);
            regularized |= flag;
            for (i, &idx) in keep.iter().enumerate() {
                rows[row][idx] = ws[i];
            }
        }
        kept += keep.len();
    }
    Ok((
        MimoFir {
            num_taps: cfg.num_taps,
            rows,
        },
        regularized,
        kept,
    ))
}

fn fit_lms(
    y: &[Complex64],
    positions: &[usize],
    training: &[Complex64],
    num_taps: usize,
    mu: f64,
    passes: usize,
) -> (MimoFir, bool, usize) {
    let dim = 2 * num_taps;
    // Start from the best single complex gain on the center tap.
    let (mut zz, mut zx) = (0.0, Complex64::new(0.0, 0.0));
    for (&k, t) in positions.iter().zip(training) {
        zz += y[k].norm_sqr();
        zx += y[k].conj() * t;
    }
    let g = if zz > 0.0 { zx / zz } else { Complex64::new(1.0, 0.0) };
    let mut f = MimoFir::identity(num_taps);
    let c = 2 * (num_taps / 2);
    f.rows[0][c] = g.re;
    f.rows[0][c + 1] = -g.im;
    f.rows[1][c] = g.im;
    f.rows[1][c + 1] = g.re;
    let mut reg = vec![0.0; dim];
    for _ in 0..passes.max(1) {
        for (&k, t) in positions.iter().zip(training) {
            regressor(y, k, num_taps, &mut reg);
            let norm: f64 = reg.iter().map(|v| v * v).sum::<f64>() + 1e-12;
            for (row, target) in [t.re, t.im].into_iter().enumerate() {
                let out: f64 = f.rows[row].iter().zip(&reg).map(|(w, v)| w * v).sum();
                let e = target - out;
                for (w, v) in f.rows[row].iter_mut().zip(&reg) {
                    *w += mu * e * v / norm;
                }
            }
        }
    }
    (f, false, dim * 2)
}
