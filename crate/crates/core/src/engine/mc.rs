//! Self-normalized importance sampling over slot configurations.
//!
//! Each dimension gets its own `N` draws from a ChaCha stream keyed by
//! `(seed, term index)`. Numerator and denominator share the draws; the
//! evaluation slot is summed analytically per draw. Stored per-draw values are
//! exponentiated relative to one global shift, so nothing is exponentiated
//! from a raw log weight.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{DimensionTerm, LeafValues, Prepared, Proposal, RatioResult, RatioSumSpec, Stats};
use crate::error::{Error, Result};
use crate::splinebasis::SparseRow;

/// Stream offset for the sampled-evaluation-slot variant.
const EVAL_STREAM_OFFSET: u64 = 1 << 32;

struct McTerm {
    dim: usize,
    q: usize,
    den: Vec<f64>,
    den_mean: f64,
    den_var: f64,
    single: Vec<f64>,
    pairs: Vec<f64>,
}

pub(crate) struct McTables {
    terms: Vec<McTerm>,
    shift: f64,
    samples: usize,
    seed: u64,
}

struct RawDraws {
    base: Vec<f64>,
    single: Vec<f64>,
    pairs: Vec<f64>,
}

fn draw_term(
    term: &DimensionTerm,
    stream: u64,
    samples: usize,
    seed: u64,
    proposal: Proposal,
    second: bool,
) -> RawDraws {
    let dim = term.dim;
    let q = term.eval.order();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let cumulative: Vec<Vec<f64>> = term
        .slots
        .iter()
        .map(|s| {
            s.basis
                .iter()
                .scan(0.0, |acc, &b| {
                    *acc += b;
                    Some(*acc)
                })
                .collect()
        })
        .collect();
    let candidates: Vec<_> = match proposal {
        Proposal::Weighted => Vec::new(),
        Proposal::Uniform => term.slots.iter().map(|s| s.candidates()).collect(),
    };
    let weighted_const: f64 = term.slots.iter().map(|s| s.log_weight_sum()).sum();

    let mut stats = Stats::new(dim);
    let mut leaf = LeafValues::new(dim, q, second);
    let mut parts: Vec<Vec<u32>> = term.slots.iter().map(|s| vec![0; s.width()]).collect();
    let mut out = RawDraws {
        base: Vec::with_capacity(samples),
        single: Vec::with_capacity(samples * dim),
        pairs: Vec::with_capacity(if second { samples * dim * q } else { 0 }),
    };

    for _ in 0..samples {
        let mut log_iw = 0.0;
        for (s, slot) in term.slots.iter().enumerate() {
            match proposal {
                Proposal::Weighted => slot.sample_weighted(&cumulative[s], &mut rng, &mut parts[s]),
                Proposal::Uniform => {
                    let cands = &candidates[s];
                    let c = &cands[rng.random_range(0..cands.len())];
                    parts[s].copy_from_slice(&c.parts);
                    log_iw += c.log_weight + (cands.len() as f64).ln();
                }
            }
            stats.apply(slot, &parts[s]);
        }
        if proposal == Proposal::Weighted {
            log_iw = weighted_const;
        }
        leaf.evaluate(term.law.as_ref(), &stats, q);
        out.base.push(log_iw + leaf.base);
        out.single.extend(leaf.single.iter().map(|v| log_iw + v));
        if second {
            out.pairs.extend(leaf.pairs.iter().map(|v| log_iw + v));
        }
        for (slot, p) in term.slots.iter().zip(&parts) {
            stats.revert(slot, p);
        }
    }
    out
}

/// Mean of `num`, variance of `num` and covariance with `den` (unbiased).
fn moments(num: &[f64], den: &[f64], den_mean: f64) -> (f64, f64, f64) {
    let n = num.len() as f64;
    let mean = num.iter().sum::<f64>() / n;
    let (mut ss, mut cross) = (0.0, 0.0);
    for (a, b) in num.iter().zip(den) {
        ss += (a - mean) * (a - mean);
        cross += (a - mean) * (b - den_mean);
    }
    (mean, ss / (n - 1.0), cross / (n - 1.0))
}

impl McTables {
    pub(crate) fn draw(
        spec: &RatioSumSpec,
        samples: usize,
        seed: u64,
        proposal: Proposal,
        second: bool,
    ) -> Result<Self> {
        let raw: Vec<RawDraws> = spec
            .terms
            .par_iter()
            .enumerate()
            .map(|(t, term)| draw_term(term, t as u64, samples, seed, proposal, second))
            .collect();
        let scales: Vec<f64> = spec.terms.iter().map(|t| t.log_prior + t.log_const).collect();
        let shift = raw
            .iter()
            .zip(&scales)
            .flat_map(|(r, s)| r.base.iter().map(move |b| s + b))
            .fold(f64::NEG_INFINITY, f64::max);
        if !shift.is_finite() {
            return Err(Error::DegenerateDenominator);
        }
        let terms = raw
            .into_iter()
            .zip(spec.terms.iter().zip(&scales))
            .map(|(r, (term, &scale))| {
                let lift = |v: f64| (scale + v - shift).exp();
                let den: Vec<f64> = r.base.iter().map(|&v| lift(v)).collect();
                let den_mean = den.iter().sum::<f64>() / samples as f64;
                let den_var = den.iter().map(|d| (d - den_mean) * (d - den_mean)).sum::<f64>()
                    / (samples as f64 - 1.0);
                McTerm {
                    dim: term.dim,
                    q: term.eval.order(),
                    den,
                    den_mean,
                    den_var,
                    single: r.single.iter().map(|&v| lift(v)).collect(),
                    pairs: r.pairs.iter().map(|&v| lift(v)).collect(),
                }
            })
            .collect();
        Ok(Self { terms, shift, samples, seed })
    }

    pub(crate) fn log_den_by_dim(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.den_mean.ln() + self.shift).collect()
    }

    fn combine(
        &self,
        prep: &Prepared,
        per_term: impl Fn(usize, &McTerm) -> Vec<f64>,
    ) -> Result<RatioResult> {
        let n = self.samples as f64;
        let (mut num, mut den) = (0.0, 0.0);
        let (mut var_n, mut var_d, mut cov) = (0.0, 0.0, 0.0);
        let mut log_num_by_dim = Vec::with_capacity(self.terms.len());
        let mut log_den_by_dim = Vec::with_capacity(self.terms.len());
        for (t, term) in self.terms.iter().enumerate() {
            let draws = per_term(t, term);
            let (m, v, c) = moments(&draws, &term.den, term.den_mean);
            num += m;
            den += term.den_mean;
            var_n += v / n;
            var_d += term.den_var / n;
            cov += c / n;
            log_num_by_dim.push(m.ln() + self.shift);
            log_den_by_dim.push(term.den_mean.ln() + self.shift);
        }
        if !(den > 0.0) || !den.is_finite() || !num.is_finite() {
            return Err(Error::DegenerateDenominator);
        }
        let value = num / den;
        let var = (var_n - 2.0 * value * cov + value * value * var_d) / (den * den);
        Ok(RatioResult {
            value,
            stderr: var.max(0.0).sqrt(),
            dims: prep.dims.clone(),
            log_num_by_dim,
            log_den_by_dim,
            samples: self.samples,
            seed: Some(self.seed),
        })
    }

    pub(crate) fn ratio(&self, prep: &Prepared, rows: &[SparseRow]) -> Result<RatioResult> {
        self.combine(prep, |t, term| {
            let row = &rows[t];
            term.single
                .chunks_exact(term.dim)
                .map(|d| row.iter().map(|(k, w)| w * d[k]).sum())
                .collect()
        })
    }

    pub(crate) fn ratio_sampled_eval(&self, prep: &Prepared, rows: &[SparseRow], seed: u64) -> Result<RatioResult> {
        self.combine(prep, |t, term| {
            let row = &rows[t];
            let total: f64 = row.values.iter().sum();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(EVAL_STREAM_OFFSET + t as u64);
            term.single
                .chunks_exact(term.dim)
                .map(|d| {
                    let u = rng.random::<f64>() * total;
                    let mut acc = 0.0;
                    let mut pick = row.first;
                    for (k, w) in row.iter() {
                        acc += w;
                        if w > 0.0 {
                            pick = k;
                        }
                        if u < acc && w > 0.0 {
                            break;
                        }
                    }
                    total * d[pick]
                })
                .collect()
        })
    }

    pub(crate) fn second_moment(&self, _prep: &Prepared, rows: &[SparseRow]) -> Result<f64> {
        let (mut num, mut den) = (0.0, 0.0);
        for (term, row) in self.terms.iter().zip(rows) {
            let q = term.q;
            let total: f64 = term
                .pairs
                .chunks_exact(term.dim * q)
                .map(|p| {
                    let mut s = 0.0;
                    for (ka, wa) in row.iter() {
                        for (kb, wb) in row.iter() {
                            let (k, l) = (ka.min(kb), ka.max(kb));
                            s += wa * wb * p[k * q + (l - k)];
                        }
                    }
                    s
                })
                .sum();
            num += total / self.samples as f64;
            den += term.den_mean;
        }
        if !(den > 0.0) {
            return Err(Error::DegenerateDenominator);
        }
        Ok(num / den)
    }
}
