//! Closed-form conjugate integrals, expressed per basis index for the engine.

use crate::engine::IndexLaw;
use crate::numeric::{ln_beta, ln_gamma};

/// `log E[Π θ_k^{c_k}]` under `Dirichlet(α)`:
/// `Σ_k [lnΓ(α_k + c_k) − lnΓ(α_k)] + lnΓ(Σα) − lnΓ(Σα + Σc)`.
#[derive(Debug, Clone)]
pub struct DirichletLaw {
    alpha: Vec<f64>,
    ln_gamma_alpha: Vec<f64>,
    alpha_sum: f64,
}

impl DirichletLaw {
    pub fn new(alpha: Vec<f64>) -> Self {
        let alpha_sum = alpha.iter().sum();
        let ln_gamma_alpha = alpha.iter().map(|&a| ln_gamma(a)).collect();
        Self { alpha, ln_gamma_alpha, alpha_sum }
    }
}

impl IndexLaw for DirichletLaw {
    fn index_term(&self, k: usize, count: u32, _tally: u32) -> f64 {
        if count == 0 {
            return 0.0;
        }
        ln_gamma(self.alpha[k] + f64::from(count)) - self.ln_gamma_alpha[k]
    }

    fn total_term(&self, total: u32) -> f64 {
        if total == 0 {
            return 0.0;
        }
        ln_gamma(self.alpha_sum) - ln_gamma(self.alpha_sum + f64::from(total))
    }
}

/// `log E[Π θ_k^{c_k} exp(−θ_k s_k)]` under independent `Gamma(a_k, b_k)`
/// where `s_k` is a data-dependent exposure:
/// `Σ_k [a_k ln b_k − lnΓ(a_k) + lnΓ(a_k + c_k) − (a_k + c_k) ln(b_k + s_k)]`.
#[derive(Debug, Clone)]
pub struct GammaLaw {
    shape: Vec<f64>,
    offset: Vec<f64>,
    ln_rate: Vec<f64>,
}

impl GammaLaw {
    pub fn new(shape: Vec<f64>, rate: Vec<f64>, exposure: &[f64]) -> Self {
        let offset = shape
            .iter()
            .zip(&rate)
            .map(|(&a, &b)| a * b.ln() - ln_gamma(a))
            .collect();
        let ln_rate = rate.iter().zip(exposure).map(|(&b, &s)| (b + s).ln()).collect();
        Self { shape, offset, ln_rate }
    }
}

impl IndexLaw for GammaLaw {
    fn index_term(&self, k: usize, count: u32, _tally: u32) -> f64 {
        let a = self.shape[k] + f64::from(count);
        self.offset[k] + ln_gamma(a) - a * self.ln_rate[k]
    }
}

/// `log E[Π θ_k^{x_k} (1 − θ_k)^{c_k − x_k}]` under independent `Beta(a_k, b_k)`:
/// `Σ_k [ln B(a_k + x_k, b_k + c_k − x_k) − ln B(a_k, b_k)]`. The evaluation
/// slot carries a success.
#[derive(Debug, Clone)]
pub struct BetaLaw {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl BetaLaw {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Self {
        Self { a, b }
    }
}

impl IndexLaw for BetaLaw {
    fn index_term(&self, k: usize, count: u32, tally: u32) -> f64 {
        if count == 0 {
            return 0.0;
        }
        let (a, b) = (self.a[k], self.b[k]);
        ln_beta(a + f64::from(tally), b + f64::from(count - tally)) - ln_beta(a, b)
    }

    fn eval_tally(&self) -> u32 {
        1
    }
}
