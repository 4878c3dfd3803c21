//! Observation slots: the per-observation index choices that the posterior
//! sums range over.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, LogSumExp};
use crate::splinebasis::SparseRow;

/// How a slot contributes to the per-index counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    /// One basis index is chosen; its count grows by one.
    Single,
    /// A weak composition of `count` over the supported indices is chosen.
    Composition { count: u32 },
}

/// One observation's candidate assignments over its `q`-wide support window.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    pub first: usize,
    /// Basis values over the window.
    pub basis: Vec<f64>,
    pub kind: SlotKind,
    /// Amount added to the per-index tally for every unit of count.
    pub tally: u32,
}

/// A concrete candidate: count increments over the slot window.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub log_weight: f64,
    pub parts: Vec<u32>,
}

impl Slot {
    pub fn single(row: SparseRow, tally: u32) -> Self {
        Self { first: row.first, basis: row.values, kind: SlotKind::Single, tally }
    }

    pub fn composition(row: SparseRow, count: u32) -> Self {
        Self {
            first: row.first,
            basis: row.values,
            kind: SlotKind::Composition { count },
            tally: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.basis.len()
    }

    /// Total count this slot adds across indices.
    pub fn units(&self) -> u32 {
        match self.kind {
            SlotKind::Single => 1,
            SlotKind::Composition { count } => count,
        }
    }

    /// `ln Σ_candidates weight`. For a composition slot this is
    /// `X ln(Σ B) - ln X!` by the multinomial theorem.
    pub fn log_weight_sum(&self) -> f64 {
        let total: f64 = self.basis.iter().sum();
        match self.kind {
            SlotKind::Single => total.ln(),
            SlotKind::Composition { count } => f64::from(count) * total.ln() - ln_factorial(count),
        }
    }

    /// Number of candidates with positive weight.
    pub fn candidate_count(&self) -> f64 {
        let positive = self.basis.iter().filter(|&&b| b > 0.0).count() as f64;
        match self.kind {
            SlotKind::Single => positive,
            SlotKind::Composition { count } => binomial(f64::from(count) + positive - 1.0, positive - 1.0),
        }
    }

    /// All candidates with positive weight, in lexicographic order of parts.
    pub fn candidates(&self) -> Vec<Candidate> {
        match self.kind {
            SlotKind::Single => self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b > 0.0)
                .map(|(i, &b)| {
                    let mut parts = vec![0; self.width()];
                    parts[i] = 1;
                    Candidate { log_weight: b.ln(), parts }
                })
                .collect(),
            SlotKind::Composition { count } => {
                let logs: Vec<f64> = self.basis.iter().map(|b| b.ln()).collect();
                Compositions::new(count, self.width())
                    .filter(|parts| parts.iter().zip(&self.basis).all(|(&s, &b)| s == 0 || b > 0.0))
                    .map(|parts| {
                        let log_weight = parts
                            .iter()
                            .zip(&logs)
                            .map(|(&s, &l)| if s == 0 { 0.0 } else { f64::from(s) * l - ln_factorial(s) })
                            .sum();
                        Candidate { log_weight, parts }
                    })
                    .collect()
            }
        }
    }

    pub(crate) fn check(&self, slot: usize) -> Result<()> {
        if self.basis.iter().any(|b| !b.is_finite() || *b < 0.0) || !self.basis.iter().any(|&b| b > 0.0) {
            return Err(Error::ZeroWeightSlot { slot });
        }
        Ok(())
    }

    /// Draws parts with probability proportional to the candidate weights.
    pub(crate) fn sample_weighted<R: Rng + ?Sized>(&self, cumulative: &[f64], rng: &mut R, parts: &mut [u32]) {
        parts.iter_mut().for_each(|p| *p = 0);
        let total = cumulative[cumulative.len() - 1];
        for _ in 0..self.units() {
            let u = rng.random::<f64>() * total;
            let i = cumulative.iter().position(|&c| u < c).unwrap_or(cumulative.len() - 1);
            parts[i] += 1;
        }
    }
}

/// Weighted sum over a composition slot's candidates times `X!`; equals
/// `(Σ B)^X` by the multinomial theorem.
pub fn multinomial_total(slot: &Slot) -> f64 {
    let mut acc = LogSumExp::new();
    for c in slot.candidates() {
        acc.push(c.log_weight);
    }
    (acc.value() + ln_factorial(slot.units())).exp()
}

fn binomial(n: f64, k: f64) -> f64 {
    use crate::numeric::ln_gamma;
    if k < 0.0 {
        return 0.0;
    }
    (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)).exp().round()
}

/// Lazy lexicographic enumeration of weak compositions of `total` into
/// `parts` nonnegative integers.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<u32>>,
}

impl Compositions {
    pub fn new(total: u32, parts: usize) -> Self {
        let current = if parts == 0 {
            None
        } else {
            let mut first = vec![0; parts];
            first[parts - 1] = total;
            Some(first)
        };
        Self { current }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let n = out.len();
        // Successor: find the rightmost position before the last that can grow
        // while something remains to its right.
        let mut next = out.clone();
        let mut advanced = false;
        for i in (0..n.saturating_sub(1)).rev() {
            let rest: u32 = next[i + 1..].iter().sum();
            if rest > 0 {
                next[i] += 1;
                for v in next[i + 1..].iter_mut() {
                    *v = 0;
                }
                next[n - 1] = rest - 1;
                advanced = true;
                break;
            }
        }
        if advanced {
            self.current = Some(next);
        }
        Some(out)
    }
}
