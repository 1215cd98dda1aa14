use proptest::prelude::*;
use rmrpa::bounds;
use rmrpa::fht;
use rmrpa::rm::{self, is_codeword, is_codeword_by_elimination};
use rmrpa::rpa::aggregate;
use rmrpa::sim::{self, TrialConfig, Transmission};
use rmrpa::subspace::{coset_index_map, enumerate_subspaces, project, Subspace};
use rmrpa::{rpa_decode, CodeParams, RpaConfig, Word};

fn code(m: u32, r: u32) -> CodeParams {
    CodeParams::new(m, r).unwrap()
}

fn word_of(bits: &[bool]) -> Word {
    Word::from_bits(bits).unwrap()
}

/// (m, r, message bits) with m <= 7.
fn message() -> impl Strategy<Value = (u32, u32, Vec<bool>)> {
    (2u32..=7)
        .prop_flat_map(|m| (Just(m), 0..=m))
        .prop_flat_map(|(m, r)| (Just(m), Just(r), prop::collection::vec(any::<bool>(), rm::dimension(code(m, r)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn encoding_is_linear_and_lands_in_the_code((m, r, a) in message(), seed in any::<u64>()) {
        let params = code(m, r);
        let b: Vec<bool> = a.iter().enumerate().map(|(i, x)| x ^ (seed >> (i % 64) & 1 == 1)).collect();
        let sum: Vec<bool> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let (ca, cb) = (rm::encode(&a, params).unwrap(), rm::encode(&b, params).unwrap());
        prop_assert_eq!(rm::encode(&sum, params).unwrap(), ca.xor(&cb));
        prop_assert!(is_codeword(&ca, params).unwrap());
        prop_assert!(is_codeword_by_elimination(&ca, params).unwrap());
        prop_assert_eq!(rm::message_of(&ca, params).unwrap(), Some(a));
    }

    #[test]
    fn membership_tests_agree(m in 2u32..=6, r in 0u32..=6, bits in prop::collection::vec(any::<bool>(), 64)) {
        let r = r.min(m);
        let y = word_of(&bits[..1 << m]);
        prop_assert_eq!(
            is_codeword(&y, code(m, r)).unwrap(),
            is_codeword_by_elimination(&y, code(m, r)).unwrap()
        );
    }

    #[test]
    fn projection_is_linear_and_preserves_codes((m, r, a) in message(), k in 1u32..=2, pick in any::<prop::sample::Index>(), noise in prop::collection::vec(any::<bool>(), 128)) {
        prop_assume!(k <= r && k < m);
        let subspaces = enumerate_subspaces(m, k).unwrap();
        let map = coset_index_map(pick.get(&subspaces));
        let c = rm::encode(&a, code(m, r)).unwrap();
        let nu = word_of(&noise[..1 << m]);
        let (pc, pn) = (project(&c, &map).unwrap(), project(&nu, &map).unwrap());
        prop_assert!(is_codeword(&pc, code(m - k, r - k)).unwrap());
        prop_assert_eq!(project(&c.xor(&nu), &map).unwrap(), pc.xor(&pn));
    }

    #[test]
    fn coset_map_partitions_the_space(m in 1u32..=7, gens in prop::collection::vec(0u32..128, 0..4)) {
        let gens: Vec<u32> = gens.into_iter().map(|g| g & ((1 << m) - 1)).collect();
        let s = Subspace::span(m, &gens).unwrap();
        let map = coset_index_map(&s);
        let mut sizes = vec![0usize; 1 << map.quotient_m()];
        for z in 0..1u32 << m {
            sizes[map.index_of(z) as usize] += 1;
            prop_assert_eq!(map.index_of(z) == 0, s.contains(z));
        }
        prop_assert!(sizes.iter().all(|&n| n == 1 << s.dim()));
    }

    #[test]
    fn fht_distance_equals_exhaustive_distance(m in 2u32..=4, bits in prop::collection::vec(any::<bool>(), 16)) {
        let y = word_of(&bits[..1 << m]);
        let fo = fht::estimate_to_word(fht::ml_decode_first_order(&y).unwrap(), m);
        let ml = fht::brute_force_ml(&y, code(m, 1)).unwrap();
        prop_assert_eq!(fo.distance(&y), ml.distance(&y));
    }

    #[test]
    fn hadamard_transform_is_an_involution_up_to_scale(m in 1u32..=8, vals in prop::collection::vec(-50i32..50, 256)) {
        let mut v = vals[..1 << m].to_vec();
        fht::hadamard_in_place(&mut v);
        fht::hadamard_in_place(&mut v);
        let back: Vec<i32> = v.iter().map(|x| x >> m).collect();
        prop_assert_eq!(&back[..], &vals[..1 << m]);
    }

    #[test]
    fn codewords_are_fixed_points_of_rpa((m, r, a) in message(), k in 1u32..=2) {
        prop_assume!((1..=3).contains(&r) && k <= r.max(1) && (r <= 1 || (r - 1) % k == 0));
        let cfg = RpaConfig::with_default_iterations(code(m, r), k).unwrap();
        let c = rm::encode(&a, code(m, r)).unwrap();
        let out = rpa_decode(&c, &cfg, false).unwrap();
        prop_assert_eq!(out.estimate, c);
        prop_assert!(out.converged);
    }

    #[test]
    fn converged_estimates_are_aggregation_fixed_points(bits in prop::collection::vec(any::<bool>(), 32)) {
        let y = word_of(&bits);
        let cfg = RpaConfig::with_default_iterations(code(5, 2), 1).unwrap();
        let out = rpa_decode(&y, &cfg, false).unwrap();
        prop_assert_eq!(out.estimate.len(), 32);
        if out.converged {
            let family = rmrpa::rpa::subspace_family(5, 1).unwrap();
            let decoded: Vec<Word> = family
                .maps
                .iter()
                .map(|map| {
                    let proj = project(&out.estimate, map).unwrap();
                    fht::estimate_to_word(fht::ml_decode_first_order(&proj).unwrap(), 4)
                })
                .collect();
            prop_assert_eq!(aggregate(&out.estimate, &decoded, &family.maps).unwrap(), out.estimate);
        }
    }

    #[test]
    fn noise_levels_are_monotone(p in 0.001f64..0.499, q in 0.001f64..0.499, j in 0u32..6) {
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        prop_assume!(hi - lo > 1e-6);
        // levels saturate at exactly 1/2 once the bias drops below one ulp
        let (cur, next) = (bounds::p_level(p, j), bounds::p_level(p, j + 1));
        prop_assert!(next >= cur && (next == 0.5 || next > cur));
        let (a, b) = (bounds::p_level(lo, j), bounds::p_level(hi, j));
        prop_assert!(b >= a && (b == 0.5 || b > a));
        prop_assert!(bounds::eta(hi).unwrap() < bounds::eta(lo).unwrap());
        prop_assert!(bounds::eta_bar(hi).unwrap() < bounds::eta_bar(lo).unwrap());
    }

    #[test]
    fn bound_identities_hold(p in 0.001f64..0.499, r in 2u32..8) {
        prop_assume!(bounds::p_bar(p, r).unwrap() < 0.5);
        let lhs = bounds::eta(bounds::p_bar(p, r).unwrap()).unwrap();
        let rhs = 0.5 * (1.0 - 2.0 * p).powf(2f64.powi(r as i32 - 1));
        prop_assert!((lhs - rhs).abs() <= 1e-12);
        let lhs = bounds::eta(p).unwrap();
        let rhs = bounds::eta_bar(bounds::p_level(p, 1)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn vacuous_flag_matches_sign(m in 2u32..40, r in 2u32..6, p in 0.01f64..0.3, frac in 0.01f64..0.99) {
        prop_assume!(r <= m);
        let eps = frac * bounds::validity_edge(p, r).unwrap();
        let b = bounds::bound_thm1(m, r, p, eps).unwrap();
        prop_assert_eq!(b.vacuous, b.log2_value >= 0.0);
    }

    #[test]
    fn trial_results_are_consistent(seed in any::<u64>(), p in 0.0f64..0.2) {
        let cfg = TrialConfig { code: code(4, 2), k: 1, p, max_iter: 4, num_trials: 200, master_seed: seed };
        let res = sim::run_trials_with_workers(&cfg, 2).unwrap();
        prop_assert!(res.block_errors <= res.trials);
        prop_assert!(res.ci_low <= res.p_err_hat && res.p_err_hat <= res.ci_high);
        prop_assert!(res.tie_free_errors <= res.block_errors);
        prop_assert_eq!(res, sim::run_trials_with_workers(&cfg, 3).unwrap());
    }
}

fn joint_gap(a: u64, n_a: u64, b: u64, n_b: u64) -> f64 {
    let (pa, pb) = (a as f64 / n_a as f64, b as f64 / n_b as f64);
    let se = (pa * (1.0 - pa) / n_a as f64 + pb * (1.0 - pb) / n_b as f64).sqrt();
    (pa - pb).abs() / se
}

#[test]
fn tie_free_error_rate_does_not_depend_on_the_codeword() {
    let cfg = TrialConfig { code: code(5, 2), k: 1, p: 0.1, max_iter: 5, num_trials: 20_000, master_seed: 99 };
    let zeros = sim::run_trials_with(&cfg, None, Transmission::AllZeros).unwrap();
    let random = sim::run_trials_with(&cfg, None, Transmission::RandomCodeword).unwrap();
    let gap = joint_gap(
        zeros.tie_free_errors,
        zeros.trials - zeros.tied_trials,
        random.tie_free_errors,
        random.trials - random.tied_trials,
    );
    assert!(gap <= 3.0, "{zeros:?} {random:?}");
    // the tied fraction is itself codeword-independent
    assert!(joint_gap(zeros.tied_trials, zeros.trials, random.tied_trials, random.trials) <= 3.0);
    // tie-breaking toward the zero word favours all-zeros transmission
    assert!(zeros.block_errors <= random.block_errors);
}

#[test]
fn wilson_intervals_shrink_and_nest() {
    let base = TrialConfig { code: code(4, 2), k: 1, p: 0.05, max_iter: 4, num_trials: 1_000, master_seed: 5 };
    let results: Vec<_> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&n| sim::run_trials(&TrialConfig { num_trials: n, ..base }).unwrap())
        .collect();
    for w in results.windows(2) {
        let ratio = (w[0].ci_high - w[0].ci_low) / (w[1].ci_high - w[1].ci_low);
        assert!((ratio - 10f64.sqrt()).abs() < 1.0, "width ratio {ratio}");
    }
    let last = results.last().unwrap();
    for r in &results[..2] {
        assert!(r.ci_low <= last.p_err_hat && last.p_err_hat <= r.ci_high, "{r:?} vs {last:?}");
    }
}

#[test]
fn forced_low_weight_noise_never_causes_errors() {
    let cfg = TrialConfig { code: code(4, 2), k: 1, p: 0.01, max_iter: 4, num_trials: 500, master_seed: 1 };
    let res = sim::run_trials_custom(&cfg, None, |i| {
        let weight_one = i % 17 != 16;
        let nu = if weight_one { Word::from_ones(16, [(i % 17) as usize]) } else { Word::zeros(16) };
        (Word::zeros(16), nu)
    })
    .unwrap();
    assert_eq!(res.block_errors, 0);
}
