mod common;

use ctar::baselines::{
    cause_train, checkpoint, mf_ips_train, mf_train, CauseHyper, Hyper, Interaction, PropensityTable,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[test]
fn gradient_matches_finite_differences() {
    let worst = common::gradient_sweep(100, 17);
    assert!(worst < 1e-5, "worst relative error {worst}");
}

#[test]
fn recovers_a_planted_rank_two_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let vec2 = |rng: &mut ChaCha8Rng| -> [f64; 2] { [StandardNormal.sample(rng), StandardNormal.sample(rng)] };
    let users: Vec<[f64; 2]> = (0..30).map(|_| vec2(&mut rng)).collect();
    let tags: Vec<[f64; 2]> = (0..30).map(|_| vec2(&mut rng)).collect();
    let mut data = Vec::new();
    for (u, p) in users.iter().enumerate() {
        for (t, q) in tags.iter().enumerate() {
            let s = p[0] * q[0] + p[1] * q[1];
            // Keep a margin around the decision boundary.
            if s.abs() > 0.3 {
                data.push(Interaction::new(u as u32, t as u32, u8::from(s > 0.0)));
            }
        }
    }
    let hyper = Hyper {
        dim: 4,
        lr: 0.5,
        reg: 0.0,
        epochs: 400,
        init_std: 0.3,
        ..Hyper::default()
    };
    let (model, _) = mf_train(&data, &hyper).unwrap();
    let mse = data
        .iter()
        .map(|i| (model.predict(i.user, i.tag) - i.y()).powi(2))
        .sum::<f64>()
        / data.len() as f64;
    assert!(mse < 0.01, "held-in mse {mse}");
}

#[test]
fn training_is_bit_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let data = common::random_interactions(200, 20, 15, &mut rng);
    let hyper = Hyper {
        seed: 42,
        ..Hyper::default()
    };
    let (a, la) = mf_train(&data, &hyper).unwrap();
    let (b, lb) = mf_train(&data, &hyper).unwrap();
    assert_eq!(a.params(), b.params());
    assert_eq!(la, lb);
    let (c, _) = mf_train(&data, &Hyper { seed: 43, ..hyper }).unwrap();
    assert_ne!(a.params(), c.params());
}

#[test]
fn constant_propensity_ips_equals_plain_mf() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let data: Vec<Interaction> = common::random_interactions(150, 12, 10, &mut rng)
        .into_iter()
        .map(|i| Interaction { weight: 1.0, ..i })
        .collect();
    let hyper = Hyper::default();
    let (mf, _) = mf_train(&data, &hyper).unwrap();
    for p in [0.01, 0.3, 1.0] {
        let table = PropensityTable {
            p_obs_given_neg: p,
            p_obs_given_pos: p,
        };
        let (ips, _) = mf_ips_train(&data, &table, &hyper).unwrap();
        // Mean-1 rescaling leaves weights within an ulp or so of 1.
        let gap = ips
            .params()
            .iter()
            .zip(mf.params())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-9, "p = {p}: max parameter gap {gap}");
    }
}

#[test]
fn ips_risk_is_closer_to_full_data_risk() {
    // Population of labels with label-dependent observation.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 2000;
    let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.random_bool(0.3))).collect();
    let table = PropensityTable {
        p_obs_given_neg: 0.1,
        p_obs_given_pos: 0.5,
    };
    let pred = 0.4;
    let loss = |y: u8| (pred - f64::from(y)).powi(2);
    let full = labels.iter().map(|&y| loss(y)).sum::<f64>() / n as f64;

    let (mut naive_sum, mut ips_sum) = (0.0, 0.0);
    let resamples = 1000;
    for _ in 0..resamples {
        let observed: Vec<Interaction> = labels
            .iter()
            .enumerate()
            .filter(|(_, &y)| rng.random_bool(table.get(y)))
            .map(|(i, &y)| Interaction::new(i as u32, 0, y))
            .collect();
        let m = observed.len() as f64;
        naive_sum += observed.iter().map(|i| loss(i.label)).sum::<f64>() / m;
        ips_sum += table
            .weigh(&observed)
            .iter()
            .map(|i| i.weight * loss(i.label))
            .sum::<f64>()
            / m;
    }
    let naive = naive_sum / resamples as f64;
    let ips = ips_sum / resamples as f64;
    assert!(
        (ips - full).abs() < (naive - full).abs(),
        "full {full} naive {naive} ips {ips}"
    );
}

#[test]
fn cause_tracks_the_control_model_when_tied_hard() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let biased = common::random_interactions(200, 10, 10, &mut rng);
    let unbiased = common::random_interactions(40, 10, 10, &mut rng);
    let hyper = CauseHyper {
        tie_reg: 1e9,
        ..CauseHyper::default()
    };
    let (model, log) = cause_train(&biased, &unbiased, &hyper).unwrap();
    assert!(model.max_tag_distance() < 1e-3);
    assert_eq!(log.objective.len(), hyper.base.epochs + 1);
}

#[test]
fn checkpoint_round_trips_a_trained_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let data = common::random_interactions(100, 8, 9, &mut rng);
    let (model, _) = mf_train(&data, &Hyper::default()).unwrap();
    let mut buf = Vec::new();
    checkpoint::write_model(&model, &mut buf).unwrap();
    let back = checkpoint::read_model(buf.as_slice()).unwrap();
    assert_eq!(back, model);
}
