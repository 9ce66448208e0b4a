mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use sturm_core::harness::{
    draw_samples, generate_synthetic, resize_tensor, run_nested_cv, run_nested_cv_observed, select_top_features,
    sparsity, stratified_folds, CvPlan, FitStage, SynthSpec,
};
use sturm_core::{accuracy, fit_sturm, inner_product, tubal_rank, Label, SturmConfig, Tensor3, DEFAULT_RANK_TOL};

fn seed42(noise: f64) -> SynthSpec {
    SynthSpec {
        dims: dims(10, 10, 10),
        samples: 100,
        true_tubal_rank: 2,
        density: 0.2,
        noise_sigma: noise,
        seed: 42,
    }
}

/// Tent-weight formulation of clamped half-pixel linear interpolation.
fn tent_weights(n: usize, n_out: usize) -> Vec<Vec<f64>> {
    (0..n_out)
        .map(|o| {
            let s = ((o as f64 + 0.5) * n as f64 / n_out as f64 - 0.5).clamp(0.0, (n - 1) as f64);
            (0..n).map(|i| (1.0 - (s - i as f64).abs()).max(0.0)).collect()
        })
        .collect()
}

fn resize_oracle(a: &Tensor3, out: (usize, usize, usize)) -> Tensor3 {
    let d = a.dims();
    let (w1, w2, w3) = (tent_weights(d.i1, out.0), tent_weights(d.i2, out.1), tent_weights(d.i3, out.2));
    Tensor3::from_fn(dims(out.0, out.1, out.2), |p, q, r| {
        let mut acc = 0.0;
        for i in 0..d.i1 {
            for j in 0..d.i2 {
                for k in 0..d.i3 {
                    acc += w1[p][i] * w2[q][j] * w3[r][k] * a.get(i, j, k);
                }
            }
        }
        acc
    })
    .unwrap()
}

#[test]
fn resize_matches_trilinear_oracle() {
    let ramp = Tensor3::from_fn(dims(4, 4, 4), |i, _, _| i as f64).unwrap();
    let small = resize_tensor(&ramp, 0.5).unwrap();
    assert_eq!(small.dims(), dims(2, 2, 2));
    assert!(rel_err(&small, &resize_oracle(&ramp, (2, 2, 2))) < 1e-14);

    let mut r = rng(40);
    for trial in 0..20 {
        let d = dims(r.random_range(1..=9), r.random_range(1..=9), r.random_range(1..=9));
        let a = random_tensor(d, &mut r);
        let beta = [0.3, 0.5, 0.7][trial % 3];
        let out = resize_tensor(&a, beta).unwrap();
        let size = |n: usize| ((beta * n as f64 - 1e-9).ceil() as usize).max(1);
        assert_eq!(out.dims(), dims(size(d.i1), size(d.i2), size(d.i3)));
        let o = out.dims();
        assert!(rel_err(&out, &resize_oracle(&a, (o.i1, o.i2, o.i3))) < 1e-12);
    }
}

#[test]
fn top_features_match_sort_oracle() {
    let mut r = rng(41);
    for _ in 0..100 {
        let d = dims(r.random_range(1..=6), r.random_range(1..=6), r.random_range(1..=6));
        // coarse values so ties actually happen
        let w = Tensor3::from_fn(d, |_, _, _| r.random_range(-4i32..=4) as f64).unwrap();
        let eta = r.random_range(0.5..=100.0);
        let total = d.len();
        let want = ((eta * total as f64 / 100.0 - 1e-9).ceil() as usize).clamp(1, total);
        let mut order: Vec<usize> = (0..total).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (w.as_slice()[a].abs(), w.as_slice()[b].abs());
            y.partial_cmp(&x).unwrap().then(a.cmp(&b))
        });
        let chosen: BTreeSet<usize> = order[..want].iter().copied().collect();
        let mask = select_top_features(&w, eta).unwrap();
        for (i, &m) in mask.as_slice().iter().enumerate() {
            assert_eq!(m, if chosen.contains(&i) { 1.0 } else { 0.0 });
        }
        let zeros = w.as_slice().iter().filter(|v| **v == 0.0).count();
        assert_eq!(sparsity(&w, 0.0), zeros as f64 / total as f64);
        let near = w.as_slice().iter().filter(|v| v.abs() <= 1.0).count();
        assert_eq!(sparsity(&w, 1.0), near as f64 / total as f64);
    }
}

#[test]
fn synthetic_seed_42_golden() {
    let (ds, w_star) = generate_synthetic(&seed42(0.1)).unwrap();
    let first = ds.samples()[0].as_slice();
    let sum: f64 = first.iter().sum();
    let abs: f64 = first.iter().map(|v| v.abs()).sum();
    assert!((sum - 2.948998421790).abs() < 1e-9, "{sum}");
    assert!((abs - 775.914197366369).abs() < 1e-9, "{abs}");
    assert_eq!(w_star.as_slice().iter().filter(|v| **v != 0.0).count(), 200);
    assert!((fro(&w_star) - 1.0).abs() < 1e-12);
    let (again, _) = generate_synthetic(&seed42(0.1)).unwrap();
    assert_eq!(ds, again);
}

#[test]
fn noiseless_labels_are_consistent() {
    let (ds, w_star) = generate_synthetic(&seed42(0.0)).unwrap();
    for (x, &y) in ds.samples().iter().zip(ds.labels()) {
        assert_eq!(Label::from_score(inner_product(x, &w_star).unwrap()), y);
    }
    let held = draw_samples(&w_star, 50, 0.0, 7).unwrap();
    assert_eq!(accuracy(&w_star, &held).unwrap(), 1.0);
}

#[test]
fn full_density_keeps_requested_rank() {
    for rank in 1..=3 {
        let spec = SynthSpec {
            dims: dims(5, 4, 6),
            samples: 3,
            true_tubal_rank: rank,
            density: 1.0,
            noise_sigma: 0.0,
            seed: rank as u64,
        };
        let (_, w) = generate_synthetic(&spec).unwrap();
        assert_eq!(tubal_rank(&w, DEFAULT_RANK_TOL).unwrap(), rank);
    }
}

#[test]
fn singleton_grid_equals_plain_cross_validation() {
    let (ds, _) = generate_synthetic(&SynthSpec {
        samples: 60,
        dims: dims(4, 4, 3),
        ..seed42(0.1)
    })
    .unwrap();
    let plan = CvPlan::single(0.01, 0.01, 1.0, 100.0);
    let report = run_nested_cv(&ds, &plan, 9).unwrap();
    let folds = stratified_folds(ds.labels(), 10, 9, 0).unwrap();
    let config = SturmConfig::new(0.01, 0.01);
    let mut accs = Vec::new();
    for (f, test) in folds.iter().enumerate() {
        let train: Vec<usize> = (0..60).filter(|i| !test.contains(i)).collect();
        let fit = fit_sturm(&ds.subset(&train).unwrap(), &config).unwrap();
        let acc = accuracy(&fit.w, &ds.subset(test).unwrap()).unwrap();
        assert_eq!(report.folds[f].accuracy, acc);
        assert_eq!(report.folds[f].sparsity, sparsity(&fit.w, 0.0));
        accs.push(acc);
    }
    let mean = accs.iter().sum::<f64>() / 10.0;
    let sd = (accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / 9.0).sqrt();
    assert!((report.mean_accuracy - mean).abs() < 1e-12);
    assert!((report.std_accuracy - sd).abs() < 1e-12);
}

#[test]
fn nested_cv_never_touches_the_test_fold() {
    let (ds, _) = generate_synthetic(&SynthSpec {
        samples: 40,
        dims: dims(3, 3, 2),
        ..seed42(0.2)
    })
    .unwrap();
    let plan = CvPlan {
        outer_folds: 4,
        inner_folds: 3,
        tau_grid: vec![0.01, 1.0],
        gamma_grid: vec![0.01, 1.0],
        beta_grid: vec![0.5, 1.0],
        eta_grid: vec![50.0, 100.0],
        ..CvPlan::default()
    };
    let outer = stratified_folds(ds.labels(), 4, 3, 0).unwrap();
    let mut inner_fits = vec![0usize; 4];
    let mut refits = vec![0usize; 4];
    run_nested_cv_observed(&ds, &plan, 3, |ev| {
        let test: BTreeSet<usize> = outer[ev.outer_fold].iter().copied().collect();
        match ev.stage {
            FitStage::Inner { .. } => {
                inner_fits[ev.outer_fold] += 1;
                assert!(ev.train.iter().chain(ev.eval).all(|i| !test.contains(i)));
                assert!(ev.train.iter().all(|i| !ev.eval.contains(i)));
            }
            FitStage::Refit => {
                refits[ev.outer_fold] += 1;
                assert!(ev.train.iter().all(|i| !test.contains(i)));
                assert_eq!(ev.eval.iter().copied().collect::<BTreeSet<_>>(), test);
                assert_eq!(ev.train.len() + ev.eval.len(), 40);
            }
        }
    })
    .unwrap();
    // 2 betas x 2 taus x 2 gammas x 3 inner folds
    assert_eq!(inner_fits, vec![24; 4]);
    assert_eq!(refits, vec![1; 4]);
}

#[test]
fn nested_cv_is_deterministic_and_reports_winners_from_the_grid() {
    let (ds, _) = generate_synthetic(&SynthSpec {
        samples: 30,
        dims: dims(3, 3, 2),
        ..seed42(0.0)
    })
    .unwrap();
    let plan = CvPlan {
        outer_folds: 3,
        inner_folds: 3,
        tau_grid: vec![0.1, 10.0],
        gamma_grid: vec![0.1],
        beta_grid: vec![1.0, 0.7],
        eta_grid: vec![10.0, 100.0],
        ..CvPlan::default()
    };
    let a = run_nested_cv(&ds, &plan, 5).unwrap();
    assert_eq!(a, run_nested_cv(&ds, &plan, 5).unwrap());
    for f in &a.folds {
        assert!(plan.tau_grid.contains(&f.tau) && plan.beta_grid.contains(&f.beta) && plan.eta_grid.contains(&f.eta));
        assert!((0.0..=1.0).contains(&f.accuracy) && (0.0..=1.0).contains(&f.sparsity));
    }
}

#[test]
fn seed_42_noiseless_cross_validation_golden() {
    // With M = 100 samples against I = 1000 coefficients the near-unpenalized
    // fit generalizes at chance level; the value is frozen to catch drift.
    let (ds, _) = generate_synthetic(&seed42(0.0)).unwrap();
    let report = run_nested_cv(&ds, &CvPlan::single(1e-3, 1e-3, 1.0, 100.0), 42).unwrap();
    assert!(report.mean_accuracy >= 0.45 - 0.05, "{}", report.mean_accuracy);
}

#[test]
fn infeasible_folds_suggest_fewer() {
    let (ds, _) = generate_synthetic(&SynthSpec {
        samples: 12,
        dims: dims(2, 2, 2),
        ..seed42(0.0)
    })
    .unwrap();
    let err = run_nested_cv(&ds, &CvPlan::single(0.1, 0.1, 1.0, 100.0), 1).unwrap_err();
    assert!(err.to_string().contains("use at most"), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn folds_partition_and_stratify(neg in 2usize..40, pos in 2usize..40, k in 2usize..6, seed in 0u64..1000) {
        prop_assume!(neg >= k && pos >= k);
        let mut labels = vec![Label::Negative; neg];
        labels.extend(vec![Label::Positive; pos]);
        let folds = stratified_folds(&labels, k, seed, 0).unwrap();
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..neg + pos).collect::<Vec<_>>());
        for f in &folds {
            let p = f.iter().filter(|&&i| labels[i] == Label::Positive).count() as f64;
            let n = f.len() as f64 - p;
            prop_assert!((p - pos as f64 / k as f64).abs() <= 1.0);
            prop_assert!((n - neg as f64 / k as f64).abs() <= 1.0);
        }
    }

    #[test]
    fn resize_preserves_constants(v in -5.0f64..5.0, a in 1usize..7, b in 1usize..7, c in 1usize..7, beta in 0.05f64..=1.0) {
        let t = Tensor3::filled(dims(a, b, c), v).unwrap();
        let out = resize_tensor(&t, beta).unwrap();
        prop_assert!(out.as_slice().iter().all(|x| (x - v).abs() <= 1e-12 * v.abs().max(1.0)));
    }
}
