mod common;

use common::rng;
use jointsc::complex::binomial;
use jointsc::datagen::{
    filtered_signals, make_bundle, sample_er_selection, sample_triangle_truth, stage_rng, EdgePrior, FilterKind,
    SignalBundle, SynthConfig,
};
use jointsc::smoothness::quadratic_form;
use jointsc::{CandidateComplex, CostVectors};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn bundles_repeat_per_seed_and_differ_across_seeds() {
    let cfg = SynthConfig {
        n0: 9,
        f0: 6,
        f1: 6,
        seed: 17,
        ..SynthConfig::default()
    };
    let a = make_bundle(&cfg).unwrap();
    let b = make_bundle(&cfg).unwrap();
    assert_eq!(a, b);
    let c = make_bundle(&SynthConfig { seed: 18, ..cfg }).unwrap();
    assert_ne!(a.x0, c.x0);
}

#[test]
fn er_sampling_repeats_per_seed() {
    let a = sample_er_selection(12, 0.4, &mut stage_rng(5, 1)).unwrap();
    let b = sample_er_selection(12, 0.4, &mut stage_rng(5, 1)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), binomial(12, 2));
}

#[test]
fn filtering_lowers_expected_smoothness_energy() {
    let cx = CandidateComplex::new(8).unwrap();
    let s1 = sample_er_selection(8, 0.6, &mut stage_rng(2, 1)).unwrap();
    let l = cx.laplacian_node(&s1).unwrap();
    let mut r = rng(99);
    let (mut filtered, mut white) = (0.0, 0.0);
    for _ in 0..200 {
        let x = filtered_signals(&l, 1, 0.0, FilterKind::InvOnePlusLambda, &mut r).unwrap();
        filtered += quadratic_form(&l, &x).unwrap();
        let w_values: Vec<f64> = (0..8).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
        let w = jointsc::DenseMatrix::from_row_major(8, 1, w_values).unwrap();
        white += quadratic_form(&l, &w).unwrap();
    }
    assert!(filtered < white, "filtered {filtered} vs white {white}");
}

#[test]
fn zero_noise_output_is_bitwise_repeatable() {
    let cx = CandidateComplex::new(6).unwrap();
    let l = cx.laplacian_upper_edge(&vec![true; cx.n_triangles()]).unwrap();
    let a = filtered_signals(&l, 4, 0.0, FilterKind::InvOnePlusLambda, &mut stage_rng(8, 4)).unwrap();
    let b = filtered_signals(&l, 4, 0.0, FilterKind::InvOnePlusLambda, &mut stage_rng(8, 4)).unwrap();
    assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
}

fn separation(prior: EdgePrior) -> (f64, f64) {
    let (mut on, mut n_on, mut off, mut n_off) = (0.0, 0, 0.0, 0);
    for seed in 0..10 {
        let b = make_bundle(&SynthConfig {
            n0: 10,
            er_p: 0.6,
            seed,
            edge_prior: prior,
            ..SynthConfig::default()
        })
        .unwrap();
        let cx = CandidateComplex::new(10).unwrap();
        let costs = CostVectors::new(&cx, &b.x0, &b.x1bar, prior.matched_measure()).unwrap();
        for (t, &h) in costs.h2.iter().enumerate() {
            if b.truth.s2[t] {
                on += h;
                n_on += 1;
            } else {
                off += h;
                n_off += 1;
            }
        }
    }
    (on / n_on as f64, off / n_off as f64)
}

#[test]
fn true_triangles_are_smoother_under_low_curl() {
    let (on, off) = separation(EdgePrior::LowCurl);
    assert!(on < off, "true {on} vs other {off}");
}

#[test]
fn true_triangles_are_smoother_under_similarity() {
    let (on, off) = separation(EdgePrior::Similarity);
    assert!(on < off, "true {on} vs other {off}");
}

#[test]
fn bundle_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let b = make_bundle(&SynthConfig {
        n0: 7,
        f0: 3,
        f1: 5,
        noise_sigma: 0.1,
        edge_prior: EdgePrior::Similarity,
        seed: 4,
        ..SynthConfig::default()
    })
    .unwrap();
    b.save(dir.path()).unwrap();
    assert_eq!(SignalBundle::load(dir.path()).unwrap(), b);
}

#[test]
fn invalid_configs_are_rejected() {
    for cfg in [
        SynthConfig { n0: 2, ..SynthConfig::default() },
        SynthConfig { er_p: 0.0, ..SynthConfig::default() },
        SynthConfig { triangle_fraction: 1.5, ..SynthConfig::default() },
        SynthConfig { f1: 0, ..SynthConfig::default() },
        SynthConfig { noise_sigma: -1.0, ..SynthConfig::default() },
    ] {
        assert!(make_bundle(&cfg).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bundles_are_consistent(n0 in 3usize..=9, p in 0.05f64..=1.0, frac in 0.0f64..=1.0, seed in any::<u64>(), sim in any::<bool>()) {
        let cfg = SynthConfig {
            n0,
            er_p: p,
            triangle_fraction: frac,
            f0: 2,
            f1: 3,
            seed,
            edge_prior: if sim { EdgePrior::Similarity } else { EdgePrior::LowCurl },
            ..SynthConfig::default()
        };
        let b = make_bundle(&cfg).unwrap();
        let cx = CandidateComplex::new(n0).unwrap();
        prop_assert!(cx.validate_inclusion(&b.truth).unwrap().is_empty());
        prop_assert_eq!(b.x1bar.rows(), binomial(n0, 2));
        prop_assert_eq!(b.x0.rows(), n0);
        let feasible = jointsc::learners::feasible_triangles(&cx, &b.truth.s1).unwrap().len();
        prop_assert_eq!(b.truth.n_triangles(), (frac * feasible as f64).floor() as usize);
    }

    #[test]
    fn triangle_truth_is_closed(n0 in 3usize..=8, seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let cx = CandidateComplex::new(n0).unwrap();
        let s1 = sample_er_selection(n0, 0.7, &mut stage_rng(seed, 1)).unwrap();
        let s2 = sample_triangle_truth(&cx, &s1, frac, &mut stage_rng(seed, 2)).unwrap();
        let sel = jointsc::Selection { s1, s2 };
        prop_assert!(cx.validate_inclusion(&sel).unwrap().is_empty());
    }
}
