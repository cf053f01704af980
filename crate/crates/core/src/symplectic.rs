//! Numerical Gaussian-state entropies from full covariance matrices.
//!
//! An independent route to the Holevo bound: build the joint covariance of
//! Alice's EPR half, Bob's detected mode and the trusted-noise modes, apply
//! heterodyne conditioning numerically and take symplectic spectra. The
//! closed forms in [`crate::security`] must agree with it.
//!
//! Quadrature ordering is `(x1, p1, x2, p2, ...)`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// Block-diagonal symplectic form for `modes` modes.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a positive-definite covariance, ascending.
///
/// Uses the symmetric form `-S Omega gamma Omega S` with `S = gamma^(1/2)`,
/// whose eigenvalues are the squared symplectic eigenvalues, each twice.
pub fn symplectic_eigenvalues(gamma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = gamma.nrows();
    if n == 0 || !n.is_multiple_of(2) || gamma.ncols() != n {
        return Err(Error::param("gamma", "needs a square matrix of even size"));
    }
    let eig = SymmetricEigen::new(gamma.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::param("gamma", "not positive definite"));
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let s = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let omega = symplectic_form(n / 2);
    let m = -(&s * &omega * gamma * &omega * &s);
    let m = (&m + m.transpose()) * 0.5;
    let mut sq: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    sq.sort_by(f64::total_cmp);
    Ok(sq.chunks(2).map(|p| (0.5 * (p[0] + p[1])).max(0.0).sqrt()).collect())
}

/// Von Neumann entropy in bits of a Gaussian state.
pub fn entropy(gamma: &DMatrix<f64>) -> Result<f64> {
    Ok(symplectic_eigenvalues(gamma)?.into_iter().map(entropy_term).sum())
}

fn entropy_term(nu: f64) -> f64 {
    let x = ((nu - 1.0) / 2.0).max(0.0);
    if x < 1e-15 {
        0.0
    } else {
        (x + 1.0) * (x + 1.0).log2() - x * x.log2()
    }
}

/// Conditional covariance of the modes in `keep` after heterodyne on `mode`.
pub fn heterodyne_condition(gamma: &DMatrix<f64>, mode: usize, keep: &[usize]) -> DMatrix<f64> {
    let idx: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
    let b = [2 * mode, 2 * mode + 1];
    let ga = DMatrix::from_fn(idx.len(), idx.len(), |i, j| gamma[(idx[i], idx[j])]);
    let sigma = DMatrix::from_fn(idx.len(), 2, |i, j| gamma[(idx[i], b[j])]);
    let gb = DMatrix::from_fn(2, 2, |i, j| gamma[(b[i], b[j])] + if i == j { 1.0 } else { 0.0 });
    let inv = gb.try_inverse().expect("gamma_B + I is positive definite");
    ga - &sigma * inv * sigma.transpose()
}

fn set_block(g: &mut DMatrix<f64>, i: usize, j: usize, diag: (f64, f64)) {
    g[(2 * i, 2 * j)] = diag.0;
    g[(2 * i + 1, 2 * j + 1)] = diag.1;
    g[(2 * j, 2 * i)] = diag.0;
    g[(2 * j + 1, 2 * i + 1)] = diag.1;
}

/// Joint covariance of modes `[A, B, F, G]` after the trusted detector.
///
/// `A` is Alice's EPR half, `B` the mode entering the heterodyne, `F` the
/// other beam-splitter output and `G` the purification of the noise ancilla
/// whose variance `1 + 2 v_el / (1 - eta)` reproduces the electronic noise.
pub fn trusted_detector_covariance(v_mod: f64, t: f64, eps_input: f64, eta: f64, v_el: f64) -> Result<DMatrix<f64>> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::param("eta", "must lie in (0, 1) for the beam-splitter model"));
    }
    let v = v_mod + 1.0;
    let vb = t * (v - 1.0 + eps_input) + 1.0;
    let c = (t * (v * v - 1.0)).sqrt();
    let w = 1.0 + 2.0 * v_el / (1.0 - eta);
    let cw = (w * w - 1.0).sqrt();
    let (se, sr) = (eta.sqrt(), (1.0 - eta).sqrt());

    let mut g = DMatrix::zeros(8, 8);
    set_block(&mut g, 0, 0, (v, v));
    // B = sqrt(eta) B1 + sqrt(1-eta) F0, F = -sqrt(1-eta) B1 + sqrt(eta) F0.
    let vb_out = eta * vb + (1.0 - eta) * w;
    let vf_out = (1.0 - eta) * vb + eta * w;
    set_block(&mut g, 1, 1, (vb_out, vb_out));
    set_block(&mut g, 2, 2, (vf_out, vf_out));
    set_block(&mut g, 3, 3, (w, w));
    set_block(&mut g, 0, 1, (se * c, -se * c));
    set_block(&mut g, 0, 2, (-sr * c, sr * c));
    let bf = se * sr * (w - vb);
    set_block(&mut g, 1, 2, (bf, bf));
    set_block(&mut g, 1, 3, (sr * cw, -sr * cw));
    set_block(&mut g, 2, 3, (se * cw, -se * cw));
    Ok(g)
}

/// Symplectic spectra and Holevo bound computed numerically.
#[derive(Debug, Clone, PartialEq)]
pub struct GenericHolevo {
    /// Spectrum of Eve's state (= Alice plus the channel output), ascending.
    pub eve: Vec<f64>,
    /// Spectrum of the trusted modes conditioned on Bob's outcome, ascending.
    pub conditional: Vec<f64>,
    pub chi_be: f64,
}

pub fn generic_holevo(v_mod: f64, t: f64, eps_input: f64, eta: f64, v_el: f64) -> Result<GenericHolevo> {
    let v = v_mod + 1.0;
    let vb = t * (v - 1.0 + eps_input) + 1.0;
    let c = (t * (v * v - 1.0)).sqrt();
    let mut ab = DMatrix::zeros(4, 4);
    set_block(&mut ab, 0, 0, (v, v));
    set_block(&mut ab, 1, 1, (vb, vb));
    set_block(&mut ab, 0, 1, (c, -c));
    let eve = symplectic_eigenvalues(&ab)?;

    let full = trusted_detector_covariance(v_mod, t, eps_input, eta, v_el)?;
    let cond = heterodyne_condition(&full, 1, &[0, 2, 3]);
    let conditional = symplectic_eigenvalues(&cond)?;
    let chi_be = eve.iter().map(|&n| entropy_term(n)).sum::<f64>() - conditional.iter().map(|&n| entropy_term(n)).sum::<f64>();
    Ok(GenericHolevo { eve, conditional, chi_be })
}
