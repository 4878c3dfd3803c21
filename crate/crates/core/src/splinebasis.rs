//! Uniform clamped B-spline bases on [0, 1].
//!
//! A basis of order `q` (degree `q - 1`) over `K` equal subintervals has
//! dimension `J = q + K - 1`. The knot vector repeats each boundary knot `q`
//! times, so the first and last basis functions interpolate the endpoints.
//! Evaluation is sparse: at any `x` exactly `q` consecutive functions can be
//! nonzero, and [`SparseRow`] carries the offset of the first one together
//! with their values.
//!
//! Indices are 0-based throughout the crate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;

/// The `q` consecutive basis values that can be nonzero at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    pub first: usize,
    pub values: Vec<f64>,
}

impl SparseRow {
    /// `(index, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.first + i, v))
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (k, v) in self.iter() {
            out[k] = v;
        }
        out
    }

    /// `Σ θ_k B_k(x)` over the support.
    pub fn dot(&self, coefficients: &[f64]) -> f64 {
        self.iter().map(|(k, v)| coefficients[k] * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplineBasis {
    order: usize,
    intervals: usize,
    knots: Vec<f64>,
}

impl SplineBasis {
    /// Basis of order `q` on `K` equal subintervals.
    pub fn new(order: usize, intervals: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::param("q", "spline order must be at least 1"));
        }
        if intervals == 0 {
            return Err(Error::param("K", "need at least one subinterval"));
        }
        let kf = intervals as f64;
        let mut knots = Vec::with_capacity(2 * order + intervals - 1);
        knots.extend(std::iter::repeat_n(0.0, order - 1));
        knots.extend((0..=intervals).map(|m| m as f64 / kf));
        knots.extend(std::iter::repeat_n(1.0, order - 1));
        Ok(Self {
            order,
            intervals,
            knots,
        })
    }

    /// Basis of order `q` with dimension `J`; requires `J >= q`.
    pub fn with_dim(order: usize, dim: usize) -> Result<Self> {
        if dim < order || order == 0 {
            return Err(Error::param(
                "J",
                format!("dimension {dim} is smaller than the spline order {order}"),
            ));
        }
        Self::new(order, dim + 1 - order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn dim(&self) -> usize {
        self.order + self.intervals - 1
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Index of the subinterval containing `x`; `x = 1` belongs to the last.
    pub fn interval_of(&self, x: f64) -> usize {
        ((x * self.intervals as f64).floor() as usize).min(self.intervals - 1)
    }

    /// Sparse evaluation via the Cox-de Boor triangle.
    pub fn eval(&self, x: f64) -> Result<SparseRow> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { x });
        }
        let mut values = vec![0.0; self.order];
        let first = self.eval_into(x, &mut values);
        Ok(SparseRow { first, values })
    }

    /// Writes the `q` support values into `out` and returns the first index.
    /// `x` must already be validated.
    pub fn eval_into(&self, x: f64, out: &mut [f64]) -> usize {
        let q = self.order;
        let m = self.interval_of(x);
        let span = m + q - 1;
        let t = &self.knots;
        out[0] = 1.0;
        let mut left = vec![0.0; q];
        let mut right = vec![0.0; q];
        for d in 1..q {
            left[d] = x - t[span + 1 - d];
            right[d] = t[span + d] - x;
            let mut saved = 0.0;
            for r in 0..d {
                let tmp = out[r] / (right[r + 1] + left[d - r]);
                out[r] = saved + right[r + 1] * tmp;
                saved = left[d - r] * tmp;
            }
            out[d] = saved;
        }
        m
    }

    pub fn eval_dense(&self, x: f64) -> Result<Vec<f64>> {
        Ok(self.eval(x)?.to_dense(self.dim()))
    }

    /// `∫₀¹ B_i` for every basis function, `(t_{i+q} - t_i) / q`.
    ///
    /// For `K >= q - 1` this is the familiar three-case formula: `i/(qK)` on the
    /// left boundary block, `1/K` in the interior and the mirror image on the right.
    pub fn integrals(&self) -> Vec<f64> {
        let q = self.order;
        (0..self.dim())
            .map(|i| (self.knots[i + q] - self.knots[i]) / q as f64)
            .collect()
    }

    /// Gram matrix `∫ B_k B_l dμ`.
    pub fn gram(&self, measure: Measure<'_>) -> Result<DMatrix<f64>> {
        let dim = self.dim();
        let q = self.order;
        let mut gram = DMatrix::zeros(dim, dim);
        let mut row = vec![0.0; q];
        let mut accumulate = |x: f64, w: f64, row: &mut [f64]| {
            let first = self.eval_into(x, row);
            for a in 0..q {
                for b in a..q {
                    let v = w * row[a] * row[b];
                    gram[(first + a, first + b)] += v;
                    if b != a {
                        gram[(first + b, first + a)] += v;
                    }
                }
            }
        };
        match measure {
            Measure::Lebesgue => {
                // Products have degree 2q - 2, so q nodes per interval are exact.
                let (nodes, weights) = gauss_legendre(q);
                let h = 1.0 / self.intervals as f64;
                for m in 0..self.intervals {
                    let lo = m as f64 * h;
                    for (z, w) in nodes.iter().zip(&weights) {
                        accumulate(lo + 0.5 * h * (z + 1.0), 0.5 * h * w, &mut row);
                    }
                }
            }
            Measure::Empirical(points) => {
                if points.is_empty() {
                    return Ok(gram);
                }
                let w = 1.0 / points.len() as f64;
                for &x in points {
                    if !(0.0..=1.0).contains(&x) {
                        return Err(Error::OutOfDomain { x });
                    }
                    accumulate(x, w, &mut row);
                }
            }
        }
        Ok(gram)
    }

    /// Dense `n × J` design matrix of basis values at `points`.
    pub fn design(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        let mut design = DMatrix::zeros(points.len(), self.dim());
        for (r, &x) in points.iter().enumerate() {
            let row = self.eval(x)?;
            for (k, v) in row.iter() {
                design[(r, k)] = v;
            }
        }
        Ok(design)
    }

    /// Least-squares coefficients of `targets` sampled at `points`.
    pub fn least_squares(&self, points: &[f64], targets: &[f64]) -> Result<Vec<f64>> {
        if points.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: targets.len(),
            });
        }
        let dim = self.dim();
        let q = self.order;
        let mut normal = DMatrix::<f64>::zeros(dim, dim);
        let mut rhs = DVector::<f64>::zeros(dim);
        let mut row = vec![0.0; q];
        for (&x, &y) in points.iter().zip(targets) {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfDomain { x });
            }
            let first = self.eval_into(x, &mut row);
            for a in 0..q {
                rhs[first + a] += row[a] * y;
                for b in 0..q {
                    normal[(first + a, first + b)] += row[a] * row[b];
                }
            }
        }
        let chol = normal.cholesky().ok_or_else(|| {
            Error::Singular("normal equations of the least-squares fit".to_string())
        })?;
        Ok(chol.solve(&rhs).iter().copied().collect())
    }

    /// Least-squares fit of `f` on an equally spaced grid of `grid_size` points.
    pub fn fit_function(&self, f: impl Fn(f64) -> f64, grid_size: usize) -> Result<Vec<f64>> {
        if grid_size < 4 * self.dim() {
            return Err(Error::param(
                "grid_size",
                format!("need at least 4J = {} points", 4 * self.dim()),
            ));
        }
        let points = unit_grid(grid_size);
        let targets: Vec<f64> = points.iter().map(|&x| f(x)).collect();
        self.least_squares(&points, &targets)
    }

    /// `Σ θ_k B_k(x)`.
    pub fn combine(&self, coefficients: &[f64], x: f64) -> Result<f64> {
        if coefficients.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: coefficients.len(),
            });
        }
        Ok(self.eval(x)?.dot(coefficients))
    }
}

/// Measure for [`SplineBasis::gram`].
#[derive(Debug, Clone, Copy)]
pub enum Measure<'a> {
    Lebesgue,
    /// Uniform weights `1/n` on the given points.
    Empirical(&'a [f64]),
}

/// Basis rescaled so every function integrates to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledBasis {
    base: SplineBasis,
    integrals: Vec<f64>,
}

impl ScaledBasis {
    pub fn new(base: SplineBasis) -> Self {
        let integrals = base.integrals();
        Self { base, integrals }
    }

    pub fn base(&self) -> &SplineBasis {
        &self.base
    }

    pub fn integrals(&self) -> &[f64] {
        &self.integrals
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn eval(&self, x: f64) -> Result<SparseRow> {
        let mut row = self.base.eval(x)?;
        for (i, v) in row.values.iter_mut().enumerate() {
            *v /= self.integrals[row.first + i];
        }
        Ok(row)
    }
}

/// `n` equally spaced points from 0 to 1 inclusive.
pub fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn dimension_is_order_plus_intervals_minus_one() {
        assert_eq!(SplineBasis::new(3, 5).unwrap().dim(), 7);
        assert_eq!(SplineBasis::new(1, 4).unwrap().dim(), 4);
        assert_eq!(SplineBasis::new(2, 1).unwrap().dim(), 2);
        assert!(SplineBasis::new(0, 3).is_err());
        assert!(SplineBasis::new(3, 0).is_err());
    }

    #[test]
    fn order_one_is_histogram_indicators() {
        let b = SplineBasis::new(1, 4).unwrap();
        for (x, bin) in [(0.1, 0), (0.3, 1), (0.5, 2), (0.99, 3), (1.0, 3)] {
            assert_eq!(b.eval_dense(x).unwrap(), {
                let mut v = vec![0.0; 4];
                v[bin] = 1.0;
                v
            });
        }
    }

    #[test]
    fn linear_single_interval_is_hat_pair() {
        let b = SplineBasis::new(2, 1).unwrap();
        for x in [0.0, 0.25, 0.7, 1.0] {
            let v = b.eval_dense(x).unwrap();
            assert_abs_diff_eq!(v[0], 1.0 - x, epsilon = 1e-15);
            assert_abs_diff_eq!(v[1], x, epsilon = 1e-15);
        }
    }

    #[test]
    fn clamped_left_endpoint_interpolates() {
        let b = SplineBasis::new(2, 2).unwrap();
        assert_eq!(b.eval_dense(0.0).unwrap(), vec![1.0, 0.0, 0.0]);
        let b = SplineBasis::new(3, 5).unwrap();
        let right = b.eval_dense(1.0).unwrap();
        assert_abs_diff_eq!(right[6], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_points_outside_unit_interval() {
        let b = SplineBasis::new(3, 5).unwrap();
        assert!(matches!(b.eval(-1e-9), Err(Error::OutOfDomain { .. })));
        assert!(b.eval(1.0 + 1e-12).is_err());
        assert!(b.eval(f64::NAN).is_err());
    }

    #[test]
    fn integrals_match_three_case_formula() {
        let b = SplineBasis::new(3, 5).unwrap();
        let want = [1.0 / 15.0, 2.0 / 15.0, 0.2, 0.2, 0.2, 2.0 / 15.0, 1.0 / 15.0];
        for (got, want) in b.integrals().iter().zip(want) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let hist = SplineBasis::new(1, 6).unwrap();
        assert!(hist.integrals().iter().all(|v| (v - 1.0 / 6.0).abs() < 1e-15));
        for q in 1..5 {
            for k in 1..30 {
                let s: f64 = SplineBasis::new(q, k).unwrap().integrals().iter().sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn scaled_indicator_is_reciprocal_width() {
        let s = ScaledBasis::new(SplineBasis::new(1, 4).unwrap());
        let row = s.eval(0.3).unwrap();
        assert_eq!(row.first, 1);
        assert_abs_diff_eq!(row.values[0], 4.0, epsilon = 1e-15);
        let s = ScaledBasis::new(SplineBasis::new(3, 5).unwrap());
        let x = 0.05;
        let plain = s.base().eval_dense(x).unwrap()[0];
        assert_abs_diff_eq!(s.eval(x).unwrap().values[0], 15.0 * plain, epsilon = 1e-13);
    }

    #[test]
    fn lebesgue_gram_of_histogram_is_diagonal() {
        let g = SplineBasis::new(1, 5).unwrap().gram(Measure::Lebesgue).unwrap();
        for k in 0..5 {
            for l in 0..5 {
                let want = if k == l { 0.2 } else { 0.0 };
                assert_abs_diff_eq!(g[(k, l)], want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn gram_is_banded_and_symmetric() {
        let b = SplineBasis::new(3, 7).unwrap();
        let pts: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).fract()).collect();
        for g in [b.gram(Measure::Lebesgue).unwrap(), b.gram(Measure::Empirical(&pts)).unwrap()] {
            for k in 0..b.dim() {
                for l in 0..b.dim() {
                    assert_eq!(g[(k, l)], g[(l, k)]);
                    if k.abs_diff(l) >= 3 {
                        assert_eq!(g[(k, l)], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn least_squares_recovers_spline_and_linears() {
        let b = SplineBasis::new(3, 6).unwrap();
        let theta: Vec<f64> = (0..b.dim()).map(|i| (i as f64).sin() + 2.0).collect();
        let fitted = b.fit_function(|x| b.combine(&theta, x).unwrap(), 400).unwrap();
        for (a, c) in fitted.iter().zip(&theta) {
            assert_abs_diff_eq!(a, c, epsilon = 1e-8);
        }
        let lin = b.fit_function(|x| x, 400).unwrap();
        for x in unit_grid(101) {
            assert_abs_diff_eq!(b.combine(&lin, x).unwrap(), x, epsilon = 1e-8);
        }
    }

    #[test]
    fn positive_smooth_target_gets_positive_coefficients() {
        let b = SplineBasis::with_dim(3, 32).unwrap();
        let theta = b.fit_function(|x| 2.0 - x, 1000).unwrap();
        assert!(theta.iter().all(|&t| t > 0.0));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let b = SplineBasis::new(3, 5).unwrap();
        assert!(b.fit_function(|x| x, 10).is_err());
        // Every point in one subinterval: the normal equations are singular.
        let pts = vec![0.01; 40];
        assert!(matches!(b.least_squares(&pts, &pts), Err(Error::Singular(_))));
    }

    proptest! {
        #[test]
        fn partition_of_unity_and_local_support(q in 1usize..5, k in 1usize..41, x in 0.0f64..=1.0) {
            let b = SplineBasis::new(q, k).unwrap();
            let row = b.eval(x).unwrap();
            prop_assert_eq!(row.values.len(), q);
            prop_assert!(row.first + q <= b.dim());
            prop_assert!(row.values.iter().all(|&v| v >= 0.0));
            prop_assert!((row.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
