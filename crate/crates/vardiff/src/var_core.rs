//! Core VAR types: observed panels, model descriptions, companion
//! reformulation, and sample moments.
//!
//! A VAR(p) process here follows the convention
//! `x_t = sum_k A_k^T x_{t-k} + e_t`, so the lag-1 companion recursion reads
//! `xt_t = Atilde^T xt_{t-1} + et_t` on stacked windows
//! `xt_t = (x_{t+p-1}; ...; x_t)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, VardiffError};
use crate::linalg::{
    self, is_symmetric, max_abs, reciprocal_condition, spectral_radius, symmetrize, DMat, DVec,
};

/// One observed d-channel series; rows are channels, columns are time points.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    pub data: DMat,
    pub condition_label: u8,
}

impl TimeSeriesPanel {
    pub fn new(data: DMat, condition_label: u8) -> Result<Self> {
        if data.nrows() < 1 || data.ncols() < 2 {
            return Err(VardiffError::Ingestion(format!(
                "panel must be at least 1 x 2, got {} x {}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(VardiffError::Ingestion(
                "panel contains non-finite entries".into(),
            ));
        }
        Ok(Self {
            data,
            condition_label,
        })
    }

    /// Number of channels.
    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Number of time points.
    pub fn len(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.data.ncols() == 0
    }

    /// Subtracts the per-channel sample mean.
    pub fn centered(&self) -> Self {
        let n = self.len() as f64;
        let mut data = self.data.clone();
        for i in 0..data.nrows() {
            let mean = data.row(i).sum() / n;
            for j in 0..data.ncols() {
                data[(i, j)] -= mean;
            }
        }
        Self {
            data,
            condition_label: self.condition_label,
        }
    }

    /// Keeps every `stride`-th time point starting from the first.
    pub fn downsample(&self, stride: usize) -> Result<Self> {
        self.interleaved_subsample(0, stride)
    }

    /// Columns `offset, offset + stride, offset + 2 stride, ...`
    /// (`offset` is zero-based).
    pub fn interleaved_subsample(&self, offset: usize, stride: usize) -> Result<Self> {
        if stride == 0 || offset >= stride {
            return Err(VardiffError::Ingestion(format!(
                "invalid subsample offset {offset} for stride {stride}"
            )));
        }
        let cols: Vec<usize> = (offset..self.len()).step_by(stride).collect();
        if cols.len() < 2 {
            return Err(VardiffError::InsufficientData {
                needed: 2,
                got: cols.len(),
            });
        }
        let mut data = DMat::zeros(self.dim(), cols.len());
        for (k, &c) in cols.iter().enumerate() {
            data.set_column(k, &self.data.column(c));
        }
        Ok(Self {
            data,
            condition_label: self.condition_label,
        })
    }
}

/// Number of time points in the interleaved subsample with the given
/// zero-based offset; matches `interleaved_subsample`.
pub fn subsample_len(n: usize, offset: usize, stride: usize) -> usize {
    if offset >= n {
        0
    } else {
        (n - offset - 1) / stride + 1
    }
}

/// A VAR(p) model: transitions A_1..A_p, innovation covariance, and an
/// optional stationary covariance of the stacked (companion) process.
#[derive(Debug, Clone, PartialEq)]
pub struct VarModel {
    pub order: usize,
    pub transitions: Vec<DMat>,
    pub noise_cov: DMat,
    pub stationary_cov: Option<DMat>,
    /// Companion spectral radius strictly below 1.
    pub stable: bool,
}

impl VarModel {
    /// Validates dimensions, symmetry of the noise covariance (tolerance
    /// 1e-10, eigenvalues >= 0), and — when `stationary_cov` is present for
    /// p = 1 — the fixed-point identity `S = A^T S A + Psi` to 1e-8.
    pub fn new(
        transitions: Vec<DMat>,
        noise_cov: DMat,
        stationary_cov: Option<DMat>,
    ) -> Result<Self> {
        let p = transitions.len();
        if p == 0 {
            return Err(VardiffError::InvalidModel("order must be >= 1".into()));
        }
        let d = transitions[0].nrows();
        for (k, a) in transitions.iter().enumerate() {
            if a.nrows() != d || a.ncols() != d {
                return Err(VardiffError::InvalidModel(format!(
                    "transition {} is {} x {}, expected {d} x {d}",
                    k + 1,
                    a.nrows(),
                    a.ncols()
                )));
            }
        }
        if noise_cov.nrows() != d || noise_cov.ncols() != d {
            return Err(VardiffError::InvalidModel(format!(
                "noise covariance is {} x {}, expected {d} x {d}",
                noise_cov.nrows(),
                noise_cov.ncols()
            )));
        }
        if !is_symmetric(&noise_cov, 1e-10) {
            return Err(VardiffError::InvalidModel(
                "noise covariance not symmetric".into(),
            ));
        }
        if linalg::sym_lambda_min(&noise_cov) < -1e-10 {
            return Err(VardiffError::InvalidModel(
                "noise covariance has a negative eigenvalue".into(),
            ));
        }
        if let Some(s) = &stationary_cov {
            if s.nrows() != d * p || s.ncols() != d * p {
                return Err(VardiffError::InvalidModel(format!(
                    "stationary covariance is {} x {}, expected {} x {}",
                    s.nrows(),
                    s.ncols(),
                    d * p,
                    d * p
                )));
            }
            if p == 1 {
                let resid = s - transitions[0].transpose() * s * &transitions[0] - &noise_cov;
                if max_abs(&resid) > 1e-8 {
                    return Err(VardiffError::InvalidModel(format!(
                        "stationary covariance violates the Lyapunov identity by {:.3e}",
                        max_abs(&resid)
                    )));
                }
            }
        }
        let mut model = Self {
            order: p,
            transitions,
            noise_cov,
            stationary_cov,
            stable: false,
        };
        model.stable = spectral_radius(&build_companion(&model)?.transition) < 1.0;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.transitions[0].nrows()
    }

    /// Stacked dimension d p of the companion process.
    pub fn companion_dim(&self) -> usize {
        self.dim() * self.order
    }
}

/// Companion (lag-1) form of a VAR(p): first block column stacks A_1..A_p,
/// identity blocks sit on the block super-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CompanionForm {
    pub dim: usize,
    pub transition: DMat,
}

/// Builds the dp x dp companion transition matrix. For p = 1 the companion
/// equals A_1.
pub fn build_companion(model: &VarModel) -> Result<CompanionForm> {
    let d = model.dim();
    let p = model.order;
    let dp = d * p;
    let mut m = DMat::zeros(dp, dp);
    for (k, a) in model.transitions.iter().enumerate() {
        m.view_mut((k * d, 0), (d, d)).copy_from(a);
        if k + 1 < p {
            m.view_mut((k * d, (k + 1) * d), (d, d))
                .copy_from(&DMat::identity(d, d));
        }
    }
    Ok(CompanionForm {
        dim: dp,
        transition: m,
    })
}

/// Stacked windows `xt_t = (x_{t+p-1}; ...; x_t)` for `t = 1..n-p+1`,
/// in time order.
pub fn companion_windows(panel: &TimeSeriesPanel, p: usize) -> Result<Vec<DVec>> {
    let d = panel.dim();
    let n = panel.len();
    if p == 0 {
        return Err(VardiffError::InvalidModel("order must be >= 1".into()));
    }
    if n < p + 1 {
        return Err(VardiffError::InsufficientData {
            needed: p + 1,
            got: n,
        });
    }
    let count = n - p + 1;
    let mut out = Vec::with_capacity(count);
    for t in 0..count {
        let mut v = DVec::zeros(d * p);
        for k in 0..p {
            // block k holds x_{t+p-1-k} (newest first)
            let col = panel.data.column(t + p - 1 - k);
            v.rows_mut(k * d, d).copy_from(&col);
        }
        out.push(v);
    }
    Ok(out)
}

/// Sample companion covariance and lag-1 cross moment of one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimates {
    /// Symmetrized window covariance, dp x dp.
    pub sigma_hat: DMat,
    /// Lag-1 cross moment `mean of xt_t xt_{t+1}^T`, dp x dp.
    pub theta_hat: DMat,
    /// Number of stacked windows, n - p + 1.
    pub n_effective: usize,
}

/// Window covariance `sigma_hat = mean_t xt_t xt_t^T` over n - p + 1 windows
/// and cross moment `theta_hat = mean_t xt_t xt_{t+1}^T` over n - p pairs.
///
/// The caller is expected to have centered the panel already (see
/// `TimeSeriesPanel::centered`); no centering happens here.
pub fn estimate_moments(panel: &TimeSeriesPanel, p: usize) -> Result<MomentEstimates> {
    let n = panel.len();
    if n < p + 2 {
        return Err(VardiffError::InsufficientData {
            needed: p + 2,
            got: n,
        });
    }
    if panel.data.iter().any(|v| !v.is_finite()) {
        return Err(VardiffError::Ingestion(
            "panel contains non-finite entries".into(),
        ));
    }
    let windows = companion_windows(panel, p)?;
    let dp = panel.dim() * p;
    let m = windows.len();
    let mut stacked = DMat::zeros(dp, m);
    for (t, w) in windows.iter().enumerate() {
        stacked.set_column(t, w);
    }
    let sigma = (&stacked * stacked.transpose()).scale(1.0 / m as f64);
    let head = stacked.columns(0, m - 1);
    let tail = stacked.columns(1, m - 1);
    let theta = (head * tail.transpose()).scale(1.0 / (m - 1) as f64);
    Ok(MomentEstimates {
        sigma_hat: symmetrize(&sigma),
        theta_hat: theta,
        n_effective: m,
    })
}

/// Yule-Walker transition `Sigma^{-1} Theta`.
///
/// Fails with a near-singular error when the reciprocal condition number of
/// `sigma` drops below 1e-12.
pub fn yule_walker_transition(sigma: &DMat, theta: &DMat) -> Result<DMat> {
    if sigma.nrows() != sigma.ncols() || sigma.nrows() != theta.nrows() {
        return Err(VardiffError::DimensionMismatch(format!(
            "sigma {}x{} vs theta {}x{}",
            sigma.nrows(),
            sigma.ncols(),
            theta.nrows(),
            theta.ncols()
        )));
    }
    let rcond = reciprocal_condition(sigma);
    if rcond < 1e-12 {
        return Err(VardiffError::NearSingular { rcond });
    }
    sigma
        .clone()
        .lu()
        .solve(theta)
        .ok_or(VardiffError::NearSingular { rcond })
}

/// Population moments of a stable model: stationary companion covariance
/// `Sigma` (from the Lyapunov identity) and `Theta = Sigma Atilde`.
pub fn population_moments(model: &VarModel) -> Result<(DMat, DMat)> {
    if !model.stable {
        return Err(VardiffError::InvalidModel(
            "population moments need a stable model".into(),
        ));
    }
    let comp = build_companion(model)?;
    let d = model.dim();
    let dp = model.companion_dim();
    let mut q = DMat::zeros(dp, dp);
    q.view_mut((0, 0), (d, d)).copy_from(&model.noise_cov);
    let sigma = match &model.stationary_cov {
        Some(s) => s.clone(),
        None => linalg::solve_discrete_lyapunov(&comp.transition, &q)?,
    };
    let theta = &sigma * &comp.transition;
    Ok((sigma, theta))
}
