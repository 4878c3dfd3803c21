use proptest::prelude::*;

use randseries::density::{fit_density, DensityFit, DensityModel};
use randseries::engine::slot::{multinomial_total, Slot};
use randseries::engine::Method;
use randseries::linmodel::{fit_gauss_regression, fit_whitenoise, GaussRegressionModel, SequenceModel};
use randseries::oracle::{quad_integrate, reference_periodogram};
use randseries::regression::{fit_binary, fit_poisson, BinaryModel, PoissonModel};
use randseries::spectral::periodogram;
use randseries::splinebasis::unit_grid;
use randseries::{CoefFamily, DimensionPrior, SparseRow, SplineBasis};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn unit_points(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..=1.0, 0..=max)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn basis_is_a_nonnegative_partition_of_unity(q in 1usize..=4, k in 1usize..=40, x in 0.0f64..=1.0) {
        let b = SplineBasis::new(q, k).unwrap();
        let row = b.eval(x).unwrap();
        prop_assert!(row.values.iter().all(|&v| v >= 0.0));
        prop_assert!((row.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(row.first + q <= b.dim());
    }

    #[test]
    fn density_is_normalized(data in unit_points(5), q in 1usize..=3, extra in 0usize..=2) {
        let prior = DimensionPrior::geometric(0.3, q, q + extra).unwrap();
        let model = DensityModel::new(q, prior, CoefFamily::Dirichlet { alpha: 1.0 }).unwrap();
        let fit = DensityFit::new(&data, &model, Method::Exact, false).unwrap();
        let total = quad_integrate(|x| fit.mean_at(x).unwrap(), 0.0, 1.0, 1e-11).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-8, "integral {total}");
    }

    #[test]
    fn density_ignores_data_order(mut data in unit_points(6), rot in 0usize..6) {
        let model = DensityModel::new(2, "geom:0.4:2:4".parse().unwrap(), CoefFamily::Dirichlet { alpha: 1.0 }).unwrap();
        let grid = unit_grid(9);
        let a = fit_density(&data, &model, &grid, Method::Exact).unwrap();
        let r = if data.is_empty() { 0 } else { rot % data.len() };
        data.rotate_left(r);
        data.reverse();
        let b = fit_density(&data, &model, &grid, Method::Exact).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn binary_estimates_are_probabilities(pairs in prop::collection::vec((0.0f64..=1.0, 0u8..=1), 0..=6)) {
        let (z, x): (Vec<f64>, Vec<u8>) = pairs.into_iter().unzip();
        let model = BinaryModel::new(2, "geom:0.4:2:4".parse().unwrap(), CoefFamily::Beta { a: 1.0, b: 1.0 }).unwrap();
        let grid = unit_grid(11);
        for method in [Method::Exact, Method::mc(200, 9)] {
            let est = fit_binary(&z, &x, &model, &grid, method).unwrap();
            prop_assert!(est.mean.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn binary_label_flip(pairs in prop::collection::vec((0.0f64..=1.0, 0u8..=1), 0..=5), a in 0.5f64..3.0) {
        let (z, x): (Vec<f64>, Vec<u8>) = pairs.into_iter().unzip();
        let flipped: Vec<u8> = x.iter().map(|v| 1 - v).collect();
        let model = BinaryModel::new(2, "geom:0.4:2:3".parse().unwrap(), CoefFamily::Beta { a, b: a }).unwrap();
        let grid = unit_grid(7);
        let p = fit_binary(&z, &x, &model, &grid, Method::Exact).unwrap();
        let q = fit_binary(&z, &flipped, &model, &grid, Method::Exact).unwrap();
        for (u, v) in p.mean.iter().zip(&q.mean) {
            prop_assert!((u + v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_estimates_are_nonnegative(pairs in prop::collection::vec((0.0f64..=1.0, 0u32..=4), 0..=4)) {
        let (z, x): (Vec<f64>, Vec<u32>) = pairs.into_iter().unzip();
        let model = PoissonModel::new(2, "geom:0.4:2:3".parse().unwrap(), CoefFamily::Gamma { shape: 1.0, rate: 1.0 }).unwrap();
        let grid = unit_grid(7);
        for method in [Method::Exact, Method::mc(200, 4)] {
            let est = fit_poisson(&z, &x, &model, &grid, method).unwrap();
            prop_assert!(est.mean.iter().all(|&v| v >= 0.0 && v.is_finite()));
            let mass: f64 = est.dimension_posterior.iter().map(|p| p.1).sum();
            prop_assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn multinomial_expansion(values in prop::collection::vec(0.01f64..1.0, 1..=4), count in 0u32..=6) {
        let total: f64 = values.iter().sum();
        let slot = Slot::composition(SparseRow { first: 0, values }, count);
        let got = multinomial_total(&slot);
        prop_assert!((got - total.powi(count as i32)).abs() < 1e-12 * total.powi(count as i32).max(1.0));
    }

    #[test]
    fn periodogram_matches_reference(series in prop::collection::vec(-5.0f64..5.0, 2..=64)) {
        let fast = periodogram(&series).unwrap();
        let slow = reference_periodogram(&series);
        prop_assert_eq!(fast.len(), series.len() / 2);
        for (a, b) in fast.ordinates.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn whitenoise_posterior_sums_to_one(x in prop::collection::vec(-3.0f64..3.0, 1..=8), tau2 in 0.01f64..10.0, n in 1.0f64..50.0) {
        let m = x.len();
        let model = SequenceModel { observations: x, n, tau2, dim_prior: DimensionPrior::geometric(0.3, 1, m).unwrap() };
        let fit = fit_whitenoise(&model).unwrap();
        let mass: f64 = fit.dimension_posterior.iter().map(|p| p.1).sum();
        prop_assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_regression_ignores_row_order(rows in prop::collection::vec((0.0f64..=1.0, -2.0f64..2.0), 1..=8)) {
        let model = GaussRegressionModel::new(2, "geom:0.4:2:5".parse().unwrap(), 1.0, 1.0, 1.0).unwrap();
        let (z, x): (Vec<f64>, Vec<f64>) = rows.iter().copied().unzip();
        let (zr, xr): (Vec<f64>, Vec<f64>) = rows.iter().rev().copied().unzip();
        let a = fit_gauss_regression(&model, &z, &x, &[0.1, 0.5]).unwrap();
        let b = fit_gauss_regression(&model, &zr, &xr, &[0.1, 0.5]).unwrap();
        prop_assert_eq!(a.dimension_posterior, b.dimension_posterior);
        prop_assert_eq!(a.mean, b.mean);
    }
}
