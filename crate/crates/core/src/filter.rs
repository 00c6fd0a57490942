//! Per-sample adaptive filter kernels: plain LMS and l0-LMS.
//!
//! The l0-LMS update adds a zero attractor to the LMS gradient step:
//!
//! ```text
//! y(n)       = w(n)^T x(n)
//! e(n)       = d(n) - y(n)
//! w_i(n+1)   = w_i(n) + P_ii [ mu e(n) x(n-i+1) + kappa beta f_beta(w_i(n)) ]
//! ```
//!
//! `f_beta` is the first-order Taylor linearisation of the derivative of the
//! exponential l0 surrogate `1 - exp(-beta |a|)`. It is nonzero only inside
//! the attraction zone `|a| <= 1/beta`, where it points toward zero.
//!
//! `P` is a diagonal 0/1 matrix given as an [`UpdateMask`]; a full mask gives
//! the ordinary (full update) algorithm.

use crate::error::{Error, Result};
use crate::schedule::UpdateMask;

/// Default attractor shape parameter; the attraction zone is `|w| <= 0.1`.
pub const DEFAULT_BETA: f64 = 10.0;

/// Zero attractor of the linearised l0 penalty.
///
/// Returns `beta^2 a + beta` on `[-1/beta, 0)`, `beta^2 a - beta` on `(0, 1/beta]`
/// and zero elsewhere. `f_beta(0) = 0` so exactly-zero taps stay put.
#[inline]
pub fn f_beta(a: f64, beta: f64) -> f64 {
    let zone = 1.0 / beta;
    if a == 0.0 || a.abs() > zone {
        0.0
    } else if a < 0.0 {
        beta * beta * a + beta
    } else {
        beta * beta * a - beta
    }
}

/// Step size and attractor parameters of one component filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub mu: f64,
    pub kappa: f64,
    pub beta: f64,
}

impl FilterParams {
    pub fn new(mu: f64, kappa: f64, beta: f64) -> Result<Self> {
        let params = FilterParams { mu, kappa, beta };
        params.validate()?;
        Ok(params)
    }

    /// Plain LMS: no zero attraction.
    pub fn lms(mu: f64) -> Self {
        FilterParams {
            mu,
            kappa: 0.0,
            beta: DEFAULT_BETA,
        }
    }

    pub fn l0(mu: f64, kappa: f64) -> Self {
        FilterParams {
            mu,
            kappa,
            beta: DEFAULT_BETA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::contract(format!("mu must be > 0, got {}", self.mu)));
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::contract(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::contract(format!(
                "beta must be > 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Output and a-priori error of one filter step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub y: f64,
    pub e: f64,
}

/// Tap weights of one component filter together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    w: Vec<f64>,
    params: FilterParams,
}

impl FilterState {
    /// A filter of `len` taps starting from the zero vector.
    pub fn new(len: usize, params: FilterParams) -> Result<Self> {
        if len == 0 {
            return Err(Error::contract("filter length must be >= 1"));
        }
        params.validate()?;
        Ok(FilterState {
            w: vec![0.0; len],
            params,
        })
    }

    pub fn from_weights(w: Vec<f64>, params: FilterParams) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::contract("filter length must be >= 1"));
        }
        params.validate()?;
        Ok(FilterState { w, params })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    /// Inner product of the taps with `x`, ordered `x(n), x(n-1), ..., x(n-L+1)`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::contract(format!(
                "input window has length {}, filter has {} taps",
                x.len(),
                self.w.len()
            )));
        }
        Ok(dot(&self.w, x))
    }

    /// One l0-LMS iteration restricted to the taps selected by `mask`.
    ///
    /// On divergence the taps are left in their (non-finite) updated state and
    /// a [`Error::Divergence`] is returned with `iteration` filled in; the
    /// caller supplies run and filter context.
    pub fn l0lms_step(&mut self, x: &[f64], d: f64, mask: &UpdateMask) -> Result<StepOutput> {
        let y = self.predict(x)?;
        if mask.len() != self.w.len() {
            return Err(Error::contract(format!(
                "mask has length {}, filter has {} taps",
                mask.len(),
                self.w.len()
            )));
        }
        let e = d - y;
        let FilterParams { mu, kappa, beta } = self.params;
        let mu_e = mu * e;
        let kb = kappa * beta;
        let mut finite = true;
        for ((w, &xi), &on) in self.w.iter_mut().zip(x).zip(mask.bits()) {
            if on {
                let inc = mu_e * xi + kb * f_beta(*w, beta);
                *w += inc;
                finite &= w.is_finite();
            }
        }
        if !finite {
            return Err(Error::Divergence {
                run: 0,
                iteration: 0,
                filter: 0,
            });
        }
        Ok(StepOutput { y, e })
    }

    /// Plain LMS iteration with a full update, ignoring `kappa`.
    pub fn lms_step(&mut self, x: &[f64], d: f64) -> Result<StepOutput> {
        let y = self.predict(x)?;
        let e = d - y;
        let mu_e = self.params.mu * e;
        for (w, &xi) in self.w.iter_mut().zip(x) {
            *w += mu_e * xi;
        }
        if self.w.iter().any(|w| !w.is_finite()) {
            return Err(Error::Divergence {
                run: 0,
                iteration: 0,
                filter: 0,
            });
        }
        Ok(StepOutput { y, e })
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// Squared deviation `||w - w_opt||^2`.
pub fn msd(w: &[f64], w_opt: &[f64]) -> Result<f64> {
    if w.len() != w_opt.len() {
        return Err(Error::contract(format!(
            "msd of vectors with lengths {} and {}",
            w.len(),
            w_opt.len()
        )));
    }
    Ok(w
        .iter()
        .zip(w_opt)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}
