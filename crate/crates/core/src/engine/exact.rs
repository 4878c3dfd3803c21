//! Exact evaluation by depth-first enumeration of slot configurations.

use super::{Candidate, DimensionTerm, LeafValues, Prepared, RatioResult, Stats};
use crate::numeric::LogSumExp;
use crate::splinebasis::SparseRow;

pub(crate) struct ExactTable {
    pub log_den: f64,
    pub single: Vec<f64>,
    pub pairs: Vec<f64>,
    q: usize,
}

struct Walker<'a> {
    term: &'a DimensionTerm,
    candidates: Vec<Vec<Candidate>>,
    stats: Stats,
    leaf: LeafValues,
    q: usize,
    den: LogSumExp,
    single: Vec<LogSumExp>,
    pairs: Vec<LogSumExp>,
}

impl Walker<'_> {
    fn descend(&mut self, depth: usize, log_weight: f64) {
        if depth == self.candidates.len() {
            self.leaf.evaluate(self.term.law.as_ref(), &self.stats, self.q);
            self.den.push(log_weight + self.leaf.base);
            for (acc, v) in self.single.iter_mut().zip(&self.leaf.single) {
                acc.push(log_weight + v);
            }
            for (acc, v) in self.pairs.iter_mut().zip(&self.leaf.pairs) {
                acc.push(log_weight + v);
            }
            return;
        }
        let slot = &self.term.slots[depth];
        for c in 0..self.candidates[depth].len() {
            let (lw, parts) = {
                let cand = &self.candidates[depth][c];
                (cand.log_weight, std::mem::take(&mut self.candidates[depth][c].parts))
            };
            self.stats.apply(slot, &parts);
            self.descend(depth + 1, log_weight + lw);
            self.stats.revert(slot, &parts);
            self.candidates[depth][c].parts = parts;
        }
    }
}

pub(crate) fn enumerate(term: &DimensionTerm, second: bool) -> ExactTable {
    let dim = term.dim;
    let q = term.eval.order();
    let mut walker = Walker {
        term,
        candidates: term.slots.iter().map(|s| s.candidates()).collect(),
        stats: Stats::new(dim),
        leaf: LeafValues::new(dim, q, second),
        q,
        den: LogSumExp::new(),
        single: vec![LogSumExp::new(); dim],
        pairs: vec![LogSumExp::new(); if second { dim * q } else { 0 }],
    };
    walker.descend(0, 0.0);
    ExactTable {
        log_den: walker.den.value(),
        single: walker.single.iter().map(LogSumExp::value).collect(),
        pairs: walker.pairs.iter().map(LogSumExp::value).collect(),
        q,
    }
}

pub(crate) fn ratio(prep: &Prepared, tables: &[ExactTable], rows: &[SparseRow]) -> RatioResult {
    let mut log_num_by_dim = Vec::with_capacity(tables.len());
    let mut log_den_by_dim = Vec::with_capacity(tables.len());
    let (mut num, mut den) = (LogSumExp::new(), LogSumExp::new());
    for ((table, row), scale) in tables.iter().zip(rows).zip(&prep.log_scales) {
        let mut acc = LogSumExp::new();
        for (k, w) in row.iter() {
            if w > 0.0 {
                acc.push(w.ln() + table.single[k]);
            }
        }
        let n = scale + acc.value();
        let d = scale + table.log_den;
        num.push(n);
        den.push(d);
        log_num_by_dim.push(n);
        log_den_by_dim.push(d);
    }
    RatioResult {
        value: (num.value() - den.value()).exp(),
        stderr: 0.0,
        dims: prep.dims.clone(),
        log_num_by_dim,
        log_den_by_dim,
        samples: 0,
        seed: None,
    }
}

pub(crate) fn second_moment(prep: &Prepared, tables: &[ExactTable], rows: &[SparseRow]) -> f64 {
    let (mut num, mut den) = (LogSumExp::new(), LogSumExp::new());
    for ((table, row), scale) in tables.iter().zip(rows).zip(&prep.log_scales) {
        for (ka, wa) in row.iter().filter(|(_, w)| *w > 0.0) {
            for (kb, wb) in row.iter().filter(|(_, w)| *w > 0.0) {
                let (k, l) = (ka.min(kb), ka.max(kb));
                num.push(scale + wa.ln() + wb.ln() + table.pairs[k * table.q + (l - k)]);
            }
        }
        den.push(scale + table.log_den);
    }
    (num.value() - den.value()).exp()
}
