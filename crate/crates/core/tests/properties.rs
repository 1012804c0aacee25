use mmwave_snc::inverse_moment::truncation_point;
use mmwave_snc::{
    backlog_bound, delay_bound, exact_inverse_moment, lemma1_bound, AffineEnvelope, BoundQuery,
    DiscretizationConfig, ServiceCharacterization, ServiceMode, ShadowingChannel,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, LogNormal, Normal};

const IOTA: f64 = std::f64::consts::LN_10 / 10.0;

fn channel(kappa: f64, sigma: f64) -> ShadowingChannel {
    ShadowingChannel::new(kappa, sigma, 500e6, 1.0).unwrap()
}

#[test]
fn snr_samples_pass_a_ks_test() {
    let ch = channel(25.0, 8.0);
    let reference = LogNormal::new(IOTA * 25.0, IOTA * 8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 20_000;
    let mut xs: Vec<f64> = (0..n).map(|_| ch.sample_snr(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = reference.cdf(x);
            (f - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - f)
        })
        .fold(0.0, f64::max);
    // 1% critical value
    assert!(d < 1.63 / (n as f64).sqrt(), "D = {d}");
}

// Normal CDF in dB at 40 significant digits: (dB, cdf, sf) for kappa 25, sigma 8.
const CDF_TABLE: [(f64, f64, f64); 8] = [
    (-30.0, 3.0994929517572154e-12, 0.999_999_999_996_900_5),
    (-5.0, 8.841_728_520_080_387e-5, 0.9999115827147992),
    (10.0, 0.030396361765261375, 0.969_603_638_234_738_6),
    (24.0, 0.45026177516988711, 0.549_738_224_830_112_9),
    (25.0, 0.5, 0.5),
    (33.0, 0.841_344_746_068_542_9, 0.15865525393145705),
    (50.0, 0.999_110_974_700_891_6, 0.000_889_025_299_108_432),
    (70.0, 0.999_999_990_724_601_2, 9.275_398_734_560_822e-9),
];

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn cdf_matches_high_precision_values() {
    let ch = channel(25.0, 8.0);
    for (db, cdf, sf) in CDF_TABLE {
        let x = 10f64.powf(db / 10.0);
        assert!(rel(ch.snr_cdf(x).unwrap(), cdf) < 1e-13, "cdf at {db} dB");
        assert!(rel(ch.snr_sf(x).unwrap(), sf) < 1e-13, "sf at {db} dB");
    }
}

#[test]
fn cdf_agrees_with_statrs() {
    let normal = Normal::new(25.0, 8.0).unwrap();
    let ch = channel(25.0, 8.0);
    for (db, _, _) in CDF_TABLE {
        let x = 10f64.powf(db / 10.0);
        // statrs is only good to about 1e-11 here
        assert!(rel(ch.snr_cdf(x).unwrap(), normal.cdf(db)) < 1e-9, "{db}");
        assert!(rel(ch.snr_sf(x).unwrap(), normal.sf(db)) < 1e-9, "{db}");
    }
}

#[test]
fn exact_inverse_moment_matches_high_precision_values() {
    // (kappa, sigma, c, E[(1 + snr)^-c]) from 40-digit quadrature.
    let cases = [
        (25.0, 8.0, 0.5, 0.083_281_641_072_185_1),
        (25.0, 8.0, 10.0, 2.3320311914196523e-5),
        (
            19.97018185995314,
            0.5,
            17.110226965455883,
            3.797_005_058_733_935e-34,
        ),
        (5.0, 3.0, 2.0, 0.083_200_177_395_830_51),
    ];
    for (kappa, sigma, c, want) in cases {
        let got = exact_inverse_moment(&channel(kappa, sigma).inverse_moment_source(), c).unwrap();
        assert!(
            rel(got, want) < 1e-8,
            "{kappa} {sigma} {c}: {got} vs {want}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lemma_dominates_the_limit(
        kappa in 0.0..40.0f64,
        sigma in 0.5..12.0f64,
        c in 0.05..20.0f64,
        step in prop_oneof![Just(1.0), Just(0.1), Just(0.01)],
    ) {
        let ch = channel(kappa, sigma);
        let exact = exact_inverse_moment(&ch.inverse_moment_source(), c).unwrap();
        let cfg = DiscretizationConfig { step_delta: step, tail_mass_tol: 1e-6, ..Default::default() };
        let v = lemma1_bound(&ch, c, &cfg).unwrap().value;
        prop_assert!(v >= exact * (1.0 - 1e-12), "{v} < {exact}");
        prop_assert!(v <= 1.0);
    }

    #[test]
    fn halving_the_step_never_loosens(
        kappa in 0.0..40.0f64,
        sigma in 0.5..12.0f64,
        c in 0.05..20.0f64,
    ) {
        let ch = channel(kappa, sigma);
        let coarse = DiscretizationConfig { step_delta: 0.2, tail_mass_tol: 1e-6, ..Default::default() };
        let fine = DiscretizationConfig { step_delta: 0.1, ..coarse };
        let a = lemma1_bound(&ch, c, &coarse).unwrap().value;
        let b = lemma1_bound(&ch, c, &fine).unwrap().value;
        prop_assert!(b <= a * (1.0 + 1e-12));
    }

    #[test]
    fn truncation_point_moves_out_as_tol_shrinks(
        kappa in 0.0..40.0f64,
        sigma in 0.5..12.0f64,
        c in 0.05..20.0f64,
    ) {
        let ch = channel(kappa, sigma);
        let loose = truncation_point(&ch, c, 1e-3).unwrap();
        let tight = truncation_point(&ch, c, 1e-9).unwrap();
        prop_assert!(tight >= loose);
    }

    #[test]
    fn q_is_non_increasing_in_theta(
        kappa in 5.0..40.0f64,
        sigma in 0.0..12.0f64,
        t1 in 1e-11..1e-8f64,
        ratio in 1.0..4.0f64,
    ) {
        let svc = ServiceCharacterization::new(channel(kappa, sigma), ServiceMode::Limit);
        let a = svc.q_of_theta(t1).unwrap();
        let b = svc.q_of_theta(t1 * ratio).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12));
    }

    #[test]
    fn backlog_bound_monotone_in_epsilon_and_rate(
        kappa in 15.0..35.0f64,
        sigma in 1.0..10.0f64,
        load in 0.05..0.7f64,
    ) {
        let ch = channel(kappa, sigma);
        let svc = ServiceCharacterization::new(ch, ServiceMode::Limit);
        // Rate as a fraction of the median capacity.
        let capacity = ch.capacity_bits_per_slot(ch.median_snr()).unwrap();
        let env = AffineEnvelope::constant_rate(load * capacity).unwrap();
        let heavier = AffineEnvelope::constant_rate(load * 1.2 * capacity).unwrap();
        let b3 = backlog_bound(&env, &svc, &BoundQuery::backlog(1e-3).unwrap());
        let b6 = backlog_bound(&env, &svc, &BoundQuery::backlog(1e-6).unwrap());
        let h3 = backlog_bound(&heavier, &svc, &BoundQuery::backlog(1e-3).unwrap());
        if let (Ok(b3), Ok(b6), Ok(h3)) = (b3, b6, h3) {
            prop_assert!(b6.value >= b3.value);
            prop_assert!(h3.value >= b3.value);
        }
    }

    #[test]
    fn delay_bound_non_increasing_in_kappa(
        kappa in 5.0..35.0f64,
        step in 1.0..10.0f64,
        sigma in 1.0..10.0f64,
    ) {
        let env = AffineEnvelope::constant_rate(1e9).unwrap();
        let q = BoundQuery::delay(1e-3).unwrap();
        let low = ServiceCharacterization::new(channel(kappa, sigma), ServiceMode::Limit);
        let high = ServiceCharacterization::new(channel(kappa + step, sigma), ServiceMode::Limit);
        if let Ok(w_low) = delay_bound(&env, &low, &q) {
            let w_high = delay_bound(&env, &high, &q).unwrap();
            prop_assert!(w_high.value <= w_low.value);
        }
    }
}
