//! Mixing of component-filter outputs.
//!
//! Three mechanisms are provided:
//!
//! * [`SigmoidCombiner`]: convex combination `y = lambda y1 + (1 - lambda) y2` with
//!   `lambda = sigmoid(a)` and a stochastic-gradient update of `a`.
//! * [`RlsCombiner2`]: the same convex structure, but `a` is driven by an
//!   exponentially-weighted least-squares gain computed from the output
//!   difference `y_d = y1 - y2`. [`rls_step2_direct`] is the unconstrained
//!   recursion on `lambda` itself and matches [`batch_lambda_opt`] exactly.
//! * [`SoftmaxCombinerM`]: `M` filters mixed by softmax weights of a
//!   pre-activation vector, each component with its own RLS-type gain.
//!
//! Pre-activations are kept in `[-A_MAX, A_MAX]` so the weights never stick
//! at 0 or 1.

use crate::error::{Error, Result};

/// Clip bound on the mixing pre-activations.
pub const A_MAX: f64 = 5.0;
/// Default forgetting factor of the least-squares combiners.
pub const DEFAULT_FORGETTING: f64 = 0.99;
/// Default regularisation; the inverse-energy states start at `1 / DEFAULT_DELTA`.
pub const DEFAULT_DELTA: f64 = 1e-2;
/// Inverse-energy states are capped here.
pub const SATURATION_CEILING: f64 = 1e12;

#[inline]
fn clip(a: f64) -> f64 {
    a.clamp(-A_MAX, A_MAX)
}

/// `1 / (1 + exp(-a))`.
#[inline]
pub fn sigmoid_lambda(a: f64) -> f64 {
    1.0 / (1.0 + (-a).exp())
}

/// `lam y1 + (1 - lam) y2`.
#[inline]
pub fn combine2(lam: f64, y1: f64, y2: f64) -> f64 {
    lam * y1 + (1.0 - lam) * y2
}

/// Gradient-driven two-filter convex combiner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmoidCombiner {
    a: f64,
    mu_c: f64,
}

impl SigmoidCombiner {
    pub fn new(mu_c: f64) -> Result<Self> {
        if !(mu_c.is_finite() && mu_c > 0.0) {
            return Err(Error::contract(format!("mu_c must be > 0, got {mu_c}")));
        }
        Ok(SigmoidCombiner { a: 0.0, mu_c })
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = clip(a);
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mu_c(&self) -> f64 {
        self.mu_c
    }

    pub fn lambda(&self) -> f64 {
        sigmoid_lambda(self.a)
    }

    /// `a += mu_c e (y1 - y2) lambda (1 - lambda)`, then clip.
    ///
    /// `e` must be the combined error `d - combine2(lambda, y1, y2)` at the current `a`.
    pub fn grad_step(&mut self, e: f64, y1: f64, y2: f64) {
        let lam = self.lambda();
        self.a = clip(self.a + self.mu_c * e * (y1 - y2) * lam * (1.0 - lam));
    }

    /// Combines, then adapts. Returns the combined output produced with the pre-update weight.
    pub fn step(&mut self, y1: f64, y2: f64, d: f64) -> f64 {
        let y = combine2(self.lambda(), y1, y2);
        self.grad_step(d - y, y1, y2);
        y
    }
}

/// Exponentially-weighted least-squares mixing weight over a full history.
///
/// Minimises `sum_k beta_f^k (d(n-k) - y2(n-k) - lam (y1(n-k) - y2(n-k)))^2`.
/// The last sample of each slice is the most recent. The result is not confined to `[0, 1]`.
pub fn batch_lambda_opt(y1: &[f64], y2: &[f64], d: &[f64], beta_f: f64) -> Result<f64> {
    if y1.len() != y2.len() || y1.len() != d.len() {
        return Err(Error::contract("histories must have equal lengths"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    let mut weight = 1.0;
    for i in (0..y1.len()).rev() {
        let yd = y1[i] - y2[i];
        den += weight * yd * yd;
        num += weight * yd * (d[i] - y2[i]);
        weight *= beta_f;
    }
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok(num / den)
}

/// Least-squares gain `r_in y_d / (beta_f + y_d^2 r_in)`.
#[inline]
pub fn rls_gain2(r_in: f64, y_d: f64, beta_f: f64) -> f64 {
    (1.0 / beta_f) * r_in / (1.0 + (1.0 / beta_f) * y_d * y_d * r_in) * y_d
}

/// `1 / (beta_f / r_in + y_d^2)`, capped at [`SATURATION_CEILING`]. The flag is set when capped.
#[inline]
fn update_inverse_energy(r_in: f64, y_d: f64, beta_f: f64) -> (f64, bool) {
    let next = 1.0 / (beta_f / r_in + y_d * y_d);
    if next > SATURATION_CEILING || !next.is_finite() {
        (SATURATION_CEILING, true)
    } else {
        (next, false)
    }
}

fn check_forgetting(beta_f: f64) -> Result<()> {
    if !(beta_f > 0.0 && beta_f <= 1.0) {
        return Err(Error::contract(format!(
            "forgetting factor must lie in (0, 1], got {beta_f}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::contract(format!(
            "regularisation must be > 0, got {delta}"
        )));
    }
    Ok(())
}

/// Result of one unconstrained least-squares step on `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectStep {
    pub lam: f64,
    pub r_in: f64,
    pub y_c: f64,
    pub e_c: f64,
    pub saturated: bool,
}

/// One recursive least-squares step on the mixing weight itself (no sigmoid, no clipping).
pub fn rls_step2_direct(lam: f64, r_in: f64, y1: f64, y2: f64, d: f64, beta_f: f64) -> DirectStep {
    let y_d = y1 - y2;
    let y_c = combine2(lam, y1, y2);
    let e_c = d - y_c;
    let k = rls_gain2(r_in, y_d, beta_f);
    let (r_next, saturated) = update_inverse_energy(r_in, y_d, beta_f);
    DirectStep {
        lam: lam + k * e_c,
        r_in: r_next,
        y_c,
        e_c,
        saturated,
    }
}

/// Two-filter convex combiner with a least-squares (RLS-type) update of the pre-activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlsCombiner2 {
    a: f64,
    r_in: f64,
    beta_f: f64,
    saturations: u64,
}

impl RlsCombiner2 {
    pub fn new(beta_f: f64) -> Result<Self> {
        Self::with_delta(beta_f, DEFAULT_DELTA)
    }

    pub fn with_delta(beta_f: f64, delta: f64) -> Result<Self> {
        check_forgetting(beta_f)?;
        check_delta(delta)?;
        Ok(RlsCombiner2 {
            a: 0.0,
            r_in: 1.0 / delta,
            beta_f,
            saturations: 0,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r_in(&self) -> f64 {
        self.r_in
    }

    pub fn beta_f(&self) -> f64 {
        self.beta_f
    }

    pub fn lambda(&self) -> f64 {
        sigmoid_lambda(self.a)
    }

    /// Number of steps on which `r_in` hit the ceiling.
    pub fn saturations(&self) -> u64 {
        self.saturations
    }

    /// Combines with the current weight, then moves `a` by the least-squares increment.
    pub fn step(&mut self, y1: f64, y2: f64, d: f64) -> f64 {
        let y_d = y1 - y2;
        let y_c = combine2(self.lambda(), y1, y2);
        let e_c = d - y_c;
        let k = rls_gain2(self.r_in, y_d, self.beta_f);
        self.a = clip(self.a + k * e_c);
        let (r_next, saturated) = update_inverse_energy(self.r_in, y_d, self.beta_f);
        self.r_in = r_next;
        self.saturations += saturated as u64;
        y_c
    }
}

/// Softmax of `phi`, computed with max subtraction.
pub fn softmax_weights(phi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; phi.len()];
    softmax_into(phi, &mut out);
    out
}

pub(crate) fn softmax_into(phi: &[f64], out: &mut [f64]) {
    let max = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &p) in out.iter_mut().zip(phi) {
        *o = (p - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// `M`-filter softmax combiner with per-component RLS-type gains.
///
/// Per sample, with `psi = softmax(phi)` and `y_c = sum psi_k y_k`:
///
/// ```text
/// g_k     = y_c - y_k
/// k_k     = p_k g_k / (lambda_f + p_k g_k^2)
/// phi_k  += k_k (d - y_k)
/// p_k     = 1 / (lambda_f / p_k + g_k^2)
/// ```
///
/// When a component of `phi` leaves `[-5, 5]`, `phi` is first shifted to zero
/// mean (the weights do not change) and then clipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxCombinerM {
    phi: Vec<f64>,
    p: Vec<f64>,
    lambda_f: f64,
    psi: Vec<f64>,
    saturations: u64,
}

impl SoftmaxCombinerM {
    pub fn new(m: usize, lambda_f: f64) -> Result<Self> {
        Self::with_delta(m, lambda_f, DEFAULT_DELTA)
    }

    pub fn with_delta(m: usize, lambda_f: f64, delta: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::contract(format!(
                "softmax combiner needs at least 2 filters, got {m}"
            )));
        }
        check_forgetting(lambda_f)?;
        check_delta(delta)?;
        Ok(SoftmaxCombinerM {
            phi: vec![0.0; m],
            p: vec![1.0 / delta; m],
            lambda_f,
            psi: vec![1.0 / m as f64; m],
            saturations: 0,
        })
    }

    /// Overrides the state; used for hand-traced checks.
    pub fn with_state(mut self, phi: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if phi.len() != self.phi.len() || p.len() != self.p.len() {
            return Err(Error::contract("state vectors must have length M"));
        }
        if p.iter().any(|&v| v.is_nan() || v <= 0.0) {
            return Err(Error::contract("gain memories must be > 0"));
        }
        self.phi = phi;
        self.p = p;
        softmax_into(&self.phi, &mut self.psi);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn lambda_f(&self) -> f64 {
        self.lambda_f
    }

    /// Current mixing weights.
    pub fn weights(&self) -> &[f64] {
        &self.psi
    }

    pub fn saturations(&self) -> u64 {
        self.saturations
    }

    /// Combines `y` with the current weights, then updates `phi` and `p`.
    pub fn step(&mut self, y: &[f64], d: f64) -> Result<f64> {
        if y.len() != self.phi.len() {
            return Err(Error::contract(format!(
                "expected {} outputs, got {}",
                self.phi.len(),
                y.len()
            )));
        }
        let y_c: f64 = self.psi.iter().zip(y).map(|(w, y)| w * y).sum();
        let lf = self.lambda_f;
        for ((phi, p), &yk) in self.phi.iter_mut().zip(self.p.iter_mut()).zip(y) {
            let g = y_c - yk;
            let e_k = d - yk;
            let gain = (1.0 / lf) * *p * g / (1.0 + (1.0 / lf) * *p * g * g);
            *phi += gain * e_k;
            let (p_next, saturated) = update_inverse_energy(*p, g, lf);
            *p = p_next;
            self.saturations += saturated as u64;
        }
        if self.phi.iter().any(|v| v.abs() > A_MAX) {
            let mean = self.phi.iter().sum::<f64>() / self.phi.len() as f64;
            for v in &mut self.phi {
                *v = clip(*v - mean);
            }
        }
        softmax_into(&self.phi, &mut self.psi);
        Ok(y_c)
    }
}
