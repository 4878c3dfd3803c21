//! Ratio-of-sums posterior functionals.
//!
//! Every model in this crate has a posterior mean of the form
//!
//! ```text
//!   Σ_j π(j) Σ_{i0..in} Π_s w_s(i_s) exp L_j(stats(i0..in))
//!   ---------------------------------------------------------
//!   Σ_j π(j) Σ_{i1..in} Π_s w_s(i_s) exp L_j(stats(i1..in))
//! ```
//!
//! where slot `s` picks one of at most `q` basis indices (or a composition of
//! a count over them), `w_s` are basis values at the observation, slot 0 sits
//! at the query point and `L_j` is the closed-form log of the conjugate
//! integral over `θ` given the per-index counts.
//!
//! [`Prepared`] does the expensive part once per data set: either an exact
//! depth-first enumeration over all configurations, or `N` sampled
//! configurations per dimension. Slot 0 only ever adds one unit at a single
//! index, so the tables store, per configuration, the log integral for every
//! possible slot-0 index. Evaluating at a point is then `O(q)` (exact) or
//! `O(Nq)` (Monte Carlo) per dimension, and the denominator is shared by all
//! points.

mod exact;
mod mc;
pub mod slot;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::LogSumExp;
use crate::priors::DimensionPrior;
use crate::splinebasis::{ScaledBasis, SparseRow, SplineBasis};

pub use slot::{Candidate, Compositions, Slot, SlotKind};

/// Default cap on the number of configurations exact enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Per-index decomposition of the log integrated weight:
/// `L(stats) = Σ_k index_term(k, c_k, x_k) + total_term(Σ_k c_k)`.
pub trait IndexLaw: Send + Sync {
    fn index_term(&self, k: usize, count: u32, tally: u32) -> f64;

    fn total_term(&self, _total: u32) -> f64 {
        0.0
    }

    /// Tally carried by the evaluation slot.
    fn eval_tally(&self) -> u32 {
        0
    }
}

/// Basis used to build the evaluation slot at a query point.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalBasis {
    Plain(SplineBasis),
    Scaled(ScaledBasis),
}

impl EvalBasis {
    pub fn eval(&self, x: f64) -> Result<SparseRow> {
        match self {
            EvalBasis::Plain(b) => b.eval(x),
            EvalBasis::Scaled(b) => b.eval(x),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            EvalBasis::Plain(b) => b.dim(),
            EvalBasis::Scaled(b) => b.dim(),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            EvalBasis::Plain(b) => b.order(),
            EvalBasis::Scaled(b) => b.base().order(),
        }
    }
}

/// Builds an observation slot at `location`: a single-index slot when
/// `count` is `None`, otherwise a composition slot.
pub fn build_slot(basis: &EvalBasis, location: f64, count: Option<u32>, tally: u32) -> Result<Slot> {
    let row = basis.eval(location)?;
    Ok(match count {
        None => Slot::single(row, tally),
        Some(x) => Slot::composition(row, x),
    })
}

/// Everything needed for one dimension `j` of the mixture.
pub struct DimensionTerm {
    pub dim: usize,
    pub log_prior: f64,
    /// Constant log factor of this dimension (normalizers not in the law).
    pub log_const: f64,
    pub slots: Vec<Slot>,
    pub law: Box<dyn IndexLaw>,
    pub eval: EvalBasis,
}

impl DimensionTerm {
    fn validate(&self) -> Result<()> {
        if self.eval.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: self.eval.dim() });
        }
        for (i, s) in self.slots.iter().enumerate() {
            s.check(i)?;
            if s.first + s.width() > self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: s.first + s.width() });
            }
        }
        Ok(())
    }
}

/// A full ratio-of-sums problem, one term per dimension.
pub struct RatioSumSpec {
    pub terms: Vec<DimensionTerm>,
}

impl RatioSumSpec {
    /// Builds one term per dimension in the prior's range.
    pub fn from_prior(
        prior: &DimensionPrior,
        mut make: impl FnMut(usize, f64) -> Result<DimensionTerm>,
    ) -> Result<Self> {
        let terms = prior.support().map(|(j, lp)| make(j, lp)).collect::<Result<Vec<_>>>()?;
        Ok(Self { terms })
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.dim).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    /// Candidates drawn in proportion to their slot weights.
    Weighted,
    /// Candidates drawn uniformly; importance weights carry the slot weights.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo { samples: usize, seed: u64, proposal: Proposal },
}

impl Method {
    pub fn mc(samples: usize, seed: u64) -> Self {
        Method::MonteCarlo { samples, seed, proposal: Proposal::Weighted }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    pub budget: u64,
    /// Also tabulate two-slot increments for second moments.
    pub second_moments: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, second_moments: false }
    }
}

/// Posterior mean at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioResult {
    pub value: f64,
    /// Delta-method standard error; zero for exact evaluation.
    pub stderr: f64,
    pub dims: Vec<usize>,
    pub log_num_by_dim: Vec<f64>,
    pub log_den_by_dim: Vec<f64>,
    /// Draws per dimension; zero for exact evaluation.
    pub samples: usize,
    pub seed: Option<u64>,
}

/// Per-configuration statistics: counts and tallies per basis index.
#[derive(Debug, Clone)]
pub(crate) struct Stats {
    counts: Vec<u32>,
    tallies: Vec<u32>,
    total: u32,
}

impl Stats {
    fn new(dim: usize) -> Self {
        Self { counts: vec![0; dim], tallies: vec![0; dim], total: 0 }
    }

    fn apply(&mut self, slot: &Slot, parts: &[u32]) {
        for (i, &p) in parts.iter().enumerate() {
            self.counts[slot.first + i] += p;
            self.tallies[slot.first + i] += p * slot.tally;
            self.total += p;
        }
    }

    fn revert(&mut self, slot: &Slot, parts: &[u32]) {
        for (i, &p) in parts.iter().enumerate() {
            self.counts[slot.first + i] -= p;
            self.tallies[slot.first + i] -= p * slot.tally;
            self.total -= p;
        }
    }
}

/// Log integrals of one configuration: without slot 0, with slot 0 at each
/// index, and (optionally) with two evaluation slots at banded index pairs.
pub(crate) struct LeafValues {
    pub base: f64,
    pub single: Vec<f64>,
    /// Index `k * q + d` holds the pair `(k, k + d)`.
    pub pairs: Vec<f64>,
    terms: Vec<f64>,
    up: Vec<f64>,
}

impl LeafValues {
    fn new(dim: usize, q: usize, second: bool) -> Self {
        Self {
            base: 0.0,
            single: vec![0.0; dim],
            pairs: if second { vec![f64::NEG_INFINITY; dim * q] } else { Vec::new() },
            terms: vec![0.0; dim],
            up: vec![0.0; dim],
        }
    }

    fn evaluate(&mut self, law: &dyn IndexLaw, stats: &Stats, q: usize) {
        let dim = stats.counts.len();
        let et = law.eval_tally();
        let t0 = law.total_term(stats.total);
        let t1 = law.total_term(stats.total + 1);
        let mut base = t0;
        for k in 0..dim {
            let (c, x) = (stats.counts[k], stats.tallies[k]);
            self.terms[k] = law.index_term(k, c, x);
            self.up[k] = law.index_term(k, c + 1, x + et) - self.terms[k];
            base += self.terms[k];
        }
        self.base = base;
        for k in 0..dim {
            self.single[k] = base + self.up[k] - t0 + t1;
        }
        if !self.pairs.is_empty() {
            let t2 = law.total_term(stats.total + 2);
            for k in 0..dim {
                let (c, x) = (stats.counts[k], stats.tallies[k]);
                let both = law.index_term(k, c + 2, x + 2 * et) - self.terms[k];
                self.pairs[k * q] = base + both - t0 + t2;
                for d in 1..q {
                    let l = k + d;
                    if l < dim {
                        self.pairs[k * q + d] = base + self.up[k] + self.up[l] - t0 + t2;
                    }
                }
            }
        }
    }
}

enum Tables {
    Exact(Vec<exact::ExactTable>),
    Mc(mc::McTables),
}

/// Data-dependent tables ready for evaluation at any number of points.
pub struct Prepared {
    dims: Vec<usize>,
    log_scales: Vec<f64>,
    evals: Vec<EvalBasis>,
    method: Method,
    second_moments: bool,
    tables: Tables,
}

impl Prepared {
    pub fn new(spec: &RatioSumSpec, method: Method, options: EngineOptions) -> Result<Self> {
        if spec.terms.is_empty() {
            return Err(Error::param("dimension prior", "no dimensions to mix over"));
        }
        for t in &spec.terms {
            t.validate()?;
        }
        let tables = match method {
            Method::Exact => {
                let needed: f64 = spec
                    .terms
                    .iter()
                    .map(|t| t.slots.iter().map(Slot::candidate_count).product::<f64>())
                    .sum();
                if needed > options.budget as f64 {
                    return Err(Error::EnumerationBudget { needed, budget: options.budget });
                }
                let tables = spec
                    .terms
                    .par_iter()
                    .map(|t| exact::enumerate(t, options.second_moments))
                    .collect::<Vec<_>>();
                Tables::Exact(tables)
            }
            Method::MonteCarlo { samples, seed, proposal } => {
                if samples < 2 {
                    return Err(Error::param("samples", "Monte Carlo needs at least 2 draws"));
                }
                Tables::Mc(mc::McTables::draw(spec, samples, seed, proposal, options.second_moments)?)
            }
        };
        Ok(Self {
            dims: spec.dims(),
            log_scales: spec.terms.iter().map(|t| t.log_prior + t.log_const).collect(),
            evals: spec.terms.iter().map(|t| t.eval.clone()).collect(),
            method,
            second_moments: options.second_moments,
            tables,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Posterior mean at `x`.
    pub fn ratio_at(&self, x: f64) -> Result<RatioResult> {
        let rows = self.rows(x)?;
        match &self.tables {
            Tables::Exact(tables) => Ok(exact::ratio(self, tables, &rows)),
            Tables::Mc(tables) => tables.ratio(self, &rows),
        }
    }

    /// Posterior means over a grid, evaluated in parallel.
    pub fn ratio_grid(&self, xs: &[f64]) -> Result<Vec<RatioResult>> {
        xs.par_iter().map(|&x| self.ratio_at(x)).collect()
    }

    /// `E[f(x)^2 | data]`; requires tables built with `second_moments`.
    pub fn second_moment_at(&self, x: f64) -> Result<f64> {
        if !self.second_moments {
            return Err(Error::param("second_moments", "tables were built without pair increments"));
        }
        let rows = self.rows(x)?;
        match &self.tables {
            Tables::Exact(tables) => Ok(exact::second_moment(self, tables, &rows)),
            Tables::Mc(tables) => tables.second_moment(self, &rows),
        }
    }

    /// Posterior variance of `f(x)`, clamped at zero.
    pub fn variance_at(&self, x: f64) -> Result<f64> {
        let m = self.ratio_at(x)?.value;
        Ok((self.second_moment_at(x)? - m * m).max(0.0))
    }

    /// Posterior probabilities of each dimension.
    pub fn dimension_posterior(&self) -> Vec<(usize, f64)> {
        let logs: Vec<f64> = match &self.tables {
            Tables::Exact(tables) => tables
                .iter()
                .zip(&self.log_scales)
                .map(|(t, s)| s + t.log_den)
                .collect(),
            Tables::Mc(tables) => tables.log_den_by_dim(),
        };
        normalize_logs(&self.dims, &logs)
    }

    /// Monte Carlo variant that samples slot 0 instead of summing it; used to
    /// check the Rao-Blackwellized estimator.
    pub fn ratio_at_sampled_eval(&self, x: f64, seed: u64) -> Result<RatioResult> {
        let rows = self.rows(x)?;
        match &self.tables {
            Tables::Mc(tables) => tables.ratio_sampled_eval(self, &rows, seed),
            Tables::Exact(_) => Err(Error::param("method", "sampled evaluation slot needs Monte Carlo tables")),
        }
    }

    fn rows(&self, x: f64) -> Result<Vec<SparseRow>> {
        self.evals.iter().map(|e| e.eval(x)).collect()
    }
}

fn normalize_logs(dims: &[usize], logs: &[f64]) -> Vec<(usize, f64)> {
    let mut acc = LogSumExp::new();
    logs.iter().for_each(|&l| acc.push(l));
    let norm = acc.value();
    dims.iter().zip(logs).map(|(&j, &l)| (j, (l - norm).exp())).collect()
}

/// Exact posterior mean at a single point.
pub fn exact_ratio(spec: &RatioSumSpec, x: f64) -> Result<RatioResult> {
    Prepared::new(spec, Method::Exact, EngineOptions::default())?.ratio_at(x)
}

/// Monte Carlo posterior mean at a single point with `samples` draws per dimension.
pub fn mc_ratio(spec: &RatioSumSpec, x: f64, samples: usize, seed: u64) -> Result<RatioResult> {
    Prepared::new(spec, Method::mc(samples, seed), EngineOptions::default())?.ratio_at(x)
}

/// Posterior over the basis dimension.
pub fn dimension_posterior(spec: &RatioSumSpec, method: Method) -> Result<Vec<(usize, f64)>> {
    Ok(Prepared::new(spec, method, EngineOptions::default())?.dimension_posterior())
}
