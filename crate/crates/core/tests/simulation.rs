use approx::assert_abs_diff_eq;
use oet_core::analytics::{expected_energy, harmonic_number};
use oet_core::channel::{ChannelTrace, SeedSpec, TrialStream};
use oet_core::policies::{decide_optimal, PolicySpec};
use oet_core::simulator::{monte_carlo, outage_probability, run_episode, with_workers};
use oet_core::units::dbm_to_mw;
use oet_core::Scheme;
use proptest::prelude::*;

const SEED: u64 = 20_190_917;

fn policy(scheme: Scheme, budget: f64, e: f64, n: usize) -> PolicySpec {
    PolicySpec::new(scheme, budget, e, n).unwrap()
}

#[test]
fn monte_carlo_examples() {
    let s = monte_carlo(&policy(Scheme::Optimal, 1.0, 0.0, 2), 1_000_000, SEED).unwrap();
    assert!((s.mean - (1.0 + (-1.0f64).exp())).abs() < 3.0 * s.std_error, "{s:?}");

    let s = monte_carlo(&policy(Scheme::Genie, 1.0, 0.0, 3), 1_000_000, SEED).unwrap();
    assert!((s.mean - 11.0 / 6.0).abs() < 3.0 * s.std_error, "{s:?}");

    let s = monte_carlo(&policy(Scheme::Random, 1.0, 0.1, 5), 100_000, SEED).unwrap();
    assert!((s.mean - 0.9).abs() < 3.0 * s.std_error, "{s:?}");

    let s = monte_carlo(&policy(Scheme::Equal, 1.0, 0.1, 10), 10_000, SEED).unwrap();
    assert_eq!(s.mean, 0.0);
    assert_eq!(s.std_error, 0.0);
}

#[test]
fn worker_count_does_not_change_results() {
    for scheme in Scheme::ALL {
        let p = policy(scheme, 1.0, 0.05, 7);
        let one = with_workers(1, || monte_carlo(&p, 50_001, SEED)).unwrap().unwrap();
        let four = with_workers(4, || monte_carlo(&p, 50_001, SEED)).unwrap().unwrap();
        let seven = with_workers(7, || outage_probability(&p, 0.5, 50_001, SEED))
            .unwrap()
            .unwrap();
        let two = with_workers(2, || outage_probability(&p, 0.5, 50_001, SEED))
            .unwrap()
            .unwrap();
        assert_eq!(one.mean.to_bits(), four.mean.to_bits());
        assert_eq!(one.std_error.to_bits(), four.std_error.to_bits());
        assert_eq!(seven, two);
    }
}

#[test]
fn analytic_agreement_sweep() {
    let mut checked = 0;
    for frac in [0.0, 0.01, 0.05, 0.1] {
        for n in 1..=30 {
            for scheme in Scheme::ALL {
                let Ok(report) = expected_energy(scheme, 1.0, frac, n) else {
                    continue;
                };
                let s = monte_carlo(&policy(scheme, 1.0, frac, n), 100_000, SEED).unwrap();
                let diff = (s.mean - report.expected_energy).abs();
                assert!(
                    diff <= 3.0 * s.std_error + 1e-12,
                    "{scheme} n={n} e={frac}: mc {} ± {} vs {}",
                    s.mean,
                    s.std_error,
                    report.expected_energy
                );
                checked += 1;
            }
        }
    }
    // genie has a closed form at e_t > 0 only for N = 1
    assert_eq!(checked, 30 * 4 * 3 + 30 + 3);
}

#[test]
fn outage_single_frame_closed_form() {
    // P = 10 mW, threshold 10 mW: P(g < 1)
    let p = policy(Scheme::Optimal, 10.0, 0.0, 1);
    let s = outage_probability(&p, 10.0, 1_000_000, SEED).unwrap();
    let f = s.outage_frequency.unwrap();
    let expect = 1.0 - (-1.0f64).exp();
    assert!((f - expect).abs() < 3.0 * s.outage_std_error.unwrap(), "{f}");
}

#[test]
fn outage_genie_two_frames_closed_form() {
    for budget in [5.0, 20.0, 60.0] {
        let p = policy(Scheme::Genie, budget, 0.0, 2);
        let s = outage_probability(&p, 10.0, 400_000, SEED).unwrap();
        let expect = (1.0 - (-10.0f64 / budget).exp()).powi(2);
        let f = s.outage_frequency.unwrap();
        assert!(
            (f - expect).abs() < 3.0 * s.outage_std_error.unwrap() + 1e-12,
            "P={budget}: {f} vs {expect}"
        );
    }
}

#[test]
fn outage_anchor_three_frames() {
    let p = policy(Scheme::Optimal, dbm_to_mw(16.0), 0.0, 3);
    let s = outage_probability(&p, dbm_to_mw(10.0), 1_000_000, SEED).unwrap();
    assert!((s.outage_frequency.unwrap() - 0.1).abs() < 0.03);
}

#[test]
fn genie_outage_monotone() {
    let threshold = dbm_to_mw(10.0);
    let mut by_n = Vec::new();
    for n in 1..=3 {
        let mut prev = 1.0;
        for dbm in (0..=30).step_by(6) {
            let s = outage_probability(
                &policy(Scheme::Genie, dbm_to_mw(dbm as f64), 0.0, n),
                threshold,
                200_000,
                SEED,
            )
            .unwrap();
            let f = s.outage_frequency.unwrap();
            assert!(f <= prev, "n={n} P={dbm}dBm");
            prev = f;
            if dbm == 12 {
                by_n.push(f);
            }
        }
    }
    assert!(by_n.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn genie_matches_harmonic_mean_across_horizons() {
    for n in [1, 4, 12] {
        let s = monte_carlo(&policy(Scheme::Genie, 2.0, 0.0, n), 200_000, SEED).unwrap();
        assert!((s.mean - 2.0 * harmonic_number(n)).abs() < 3.0 * s.std_error);
    }
}

fn stream_trace(seed: u64, n: usize) -> (ChannelTrace, TrialStream) {
    let mut s = TrialStream::new(SeedSpec::new(seed, 0));
    let t = s.draw_trace(n).unwrap();
    (t, s)
}

#[test]
fn optimal_decisions_are_causal() {
    for seed in 0..500 {
        let n = 8;
        let p = policy(Scheme::Optimal, 1.0, 0.05, n);
        let (trace, mut s) = stream_trace(seed, n);
        let base = run_episode(&p, &trace, s.rng_mut()).unwrap();
        let tx = base.transmit_frame.unwrap();
        // Replace every gain after the transmit frame.
        let mut gains = trace.play_order().to_vec();
        let cut = n - tx;
        for g in &mut gains[cut..] {
            *g = 10.0 - *g;
            *g = g.abs();
        }
        let other = ChannelTrace::from_play_order(gains).unwrap();
        let again = run_episode(&p, &other, s.rng_mut()).unwrap();
        assert_eq!(again.transmit_frame, Some(tx));
        assert_eq!(again.harvested, base.harvested);
        // And frame by frame, the decisions only see (j, A, g).
        let table = p.threshold_table().unwrap();
        let mut available = 1.0;
        for j in (tx..n).rev() {
            let a = decide_optimal(j, available, trace.gain(j), table).unwrap();
            let b = decide_optimal(j, available, other.gain(j), table).unwrap();
            assert_eq!(a, b);
            available -= a.transmit_energy;
        }
    }
}

#[test]
fn genie_dominates_optimal_per_episode() {
    for seed in 0..2000 {
        let n = 1 + (seed as usize % 12);
        let (trace, mut s) = stream_trace(seed, n);
        let genie = run_episode(&policy(Scheme::Genie, 1.0, 0.0, n), &trace, s.rng_mut()).unwrap();
        let opt = run_episode(&policy(Scheme::Optimal, 1.0, 0.0, n), &trace, s.rng_mut()).unwrap();
        assert!(genie.harvested >= opt.harvested);
    }
}

proptest! {
    #[test]
    fn episodes_respect_budget(
        seed in any::<u64>(),
        n in 1usize..25,
        budget in 0.01f64..100.0,
        frac in 0.0f64..0.5,
        scheme_idx in 0usize..4,
    ) {
        let scheme = Scheme::ALL[scheme_idx];
        let p = policy(scheme, budget, frac * budget, n);
        let (trace, mut s) = stream_trace(seed, n);
        let r = run_episode(&p, &trace, s.rng_mut()).unwrap();
        prop_assert!(r.total_spent() <= budget * (1.0 + 1e-12));
        prop_assert!(r.harvested >= 0.0);
        prop_assert!(r.energy_spent.iter().all(|&e| e >= 0.0));
        let e = frac * budget;
        // Recompute harvest from the ledger: sum over frames of (rho - e_t) g
        // wherever the frame paid for estimation.
        let ledger: f64 = (0..n)
            .filter(|&j| r.energy_spent[j] > 0.0 || (e == 0.0 && r.energy_spent[j] == 0.0))
            .map(|j| (r.energy_spent[j] - e).max(0.0) * trace.gain(j))
            .sum();
        prop_assert!((ledger - r.harvested).abs() <= 1e-9 * (1.0 + r.harvested));
        if scheme == Scheme::Optimal {
            let harvesting = (0..n).filter(|&j| r.energy_spent[j] > e * (1.0 + 1e-9) + 1e-15).count();
            prop_assert!(harvesting <= 1);
        }
    }
}

#[test]
fn equal_and_random_frame_one() {
    for scheme in Scheme::ALL {
        let s = monte_carlo(&policy(scheme, 1.0, 0.1, 1), 100_000, SEED).unwrap();
        assert!((s.mean - 0.9).abs() < 3.0 * s.std_error);
    }
    assert_abs_diff_eq!(
        expected_energy(Scheme::Equal, 1.0, 0.1, 1).unwrap().expected_energy,
        0.9,
        epsilon = 1e-15
    );
}
