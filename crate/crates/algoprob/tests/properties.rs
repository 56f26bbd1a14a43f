//! Cross-module invariants: codec bijections, machine symmetry closures,
//! aggregation algebra, serialization round trips and schedule-independent
//! determinism.

use proptest::prelude::*;

use algoprob::bits::BitString;
use algoprob::distribution::{complement_code, reverse_code, DistMeta, TupleDistribution};
use algoprob::experiment::{machine_experiment, SampleSpec};
use algoprob::ingestion::{ingest_bytes, WindowMode};
use algoprob::machines::{run_ca, run_tag, run_tm, CaRule, TagRuleSet, TmRuleTable};
use algoprob::priorcoder::{build_codebook, decode, encode};
use algoprob::rng::Xoshiro256;
use algoprob::MachineClass;

proptest! {
    #[test]
    fn tm_codec_round_trip(n_states in 1u16..=4, frac in 0.0f64..1.0) {
        let size = TmRuleTable::class_size(n_states).unwrap();
        let index = ((size as f64) * frac) as u64 % size;
        let table = TmRuleTable::decode(index, n_states).unwrap();
        prop_assert_eq!(table.encode(), index);
    }

    #[test]
    fn tm_complement_and_mirror_closures(index in 0u64..4096, steps in 1u32..60) {
        let table = TmRuleTable::decode(index, 2).unwrap();
        for blank in [0u8, 1] {
            let base = run_tm(&table, blank, steps);

            let comp = run_tm(&table.complemented(), 1 - blank, steps);
            prop_assert_eq!(&comp.bits, &base.bits.complemented());

            let mirror = run_tm(&table.mirrored(), blank, steps);
            prop_assert_eq!(&mirror.bits, &base.bits.reversed());
        }
    }

    #[test]
    fn ca_conjugate_closure(code in 0u64..65536, steps in 1u32..40) {
        let rule = CaRule::decode(code).unwrap();
        let a = run_ca(&rule, 0, steps);
        let b = run_ca(&rule.conjugated(), 1, steps);
        prop_assert_eq!(&a.bits.complemented(), &b.bits);
    }

    #[test]
    fn tag_codec_and_complement(index in 0u64..50625, steps in 1u32..50) {
        let rules = TagRuleSet::decode(index).unwrap();
        prop_assert_eq!(rules.encode(), index);
        let comp = rules.complemented();
        for init in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let word = BitString::from_bits(init.to_vec());
            let a = run_tag(&rules, &word, steps);
            let b = run_tag(&comp, &word.complemented(), steps);
            prop_assert_eq!(&a.bits.complemented(), &b.bits);
        }
    }

    #[test]
    fn aggregation_splits_merge(
        strings in prop::collection::vec(prop::collection::vec(0u8..2, 0..40), 0..12),
        cut in 0usize..12,
        k in 1u8..6,
    ) {
        let bits: Vec<BitString> = strings.into_iter().map(BitString::from_bits).collect();
        let cut = cut.min(bits.len());
        let all = TupleDistribution::aggregate(&bits, k, DistMeta::default()).unwrap();
        let left = TupleDistribution::aggregate(&bits[..cut], k, DistMeta::default()).unwrap();
        let right = TupleDistribution::aggregate(&bits[cut..], k, DistMeta::default()).unwrap();
        let merged = left.merge(&right).unwrap();
        prop_assert_eq!(merged.entries(), all.entries());
    }

    #[test]
    fn ranking_is_scale_invariant(
        counts in prop::collection::btree_map(0u32..32, 1u64..500, 1..20),
        scale in 1u64..50,
    ) {
        let d = TupleDistribution::from_counts(5, counts.clone(), DistMeta::default()).unwrap();
        let scaled = TupleDistribution::from_counts(
            5,
            counts.into_iter().map(|(c, n)| (c, n * scale)),
            DistMeta::default(),
        )
        .unwrap();
        let order: Vec<u32> = d.rank().unwrap().entries().iter().map(|e| e.0).collect();
        let scaled_order: Vec<u32> =
            scaled.rank().unwrap().entries().iter().map(|e| e.0).collect();
        prop_assert_eq!(order, scaled_order);
    }

    #[test]
    fn distribution_serialization_round_trips(
        counts in prop::collection::btree_map(0u32..64, 1u64..10_000, 1..30),
    ) {
        let d = TupleDistribution::from_counts(6, counts, DistMeta::labeled("TM")).unwrap();
        let json = d.to_json();
        let from_json = TupleDistribution::from_json(&json).unwrap();
        prop_assert_eq!(&from_json, &d);
        prop_assert_eq!(from_json.to_json(), json);

        let csv = d.to_csv();
        let from_csv = TupleDistribution::from_csv(&csv).unwrap();
        prop_assert_eq!(from_csv.entries(), d.entries());
        prop_assert_eq!(from_csv.to_csv(), csv);
    }

    #[test]
    fn prior_coder_round_trips(bits in prop::collection::vec(0u8..2, 0..600)) {
        let reference = TupleDistribution::from_counts(
            4,
            [(0, 500), (15, 220), (5, 30), (10, 30), (7, 1)],
            DistMeta::default(),
        )
        .unwrap();
        let book = build_codebook(&reference).unwrap();
        let input = BitString::from_bits(bits);
        let payload = encode(&input, &book).unwrap();
        prop_assert_eq!(decode(&payload, &book).unwrap(), input);
    }
}

#[test]
fn bit_reversed_stream_gives_tuple_reversed_distribution() {
    let mut rng = Xoshiro256::seeded(404);
    for k in 1u8..=6 {
        let bits: BitString = (0..300).map(|_| (rng.next_u64() & 1) as u8).collect();
        let forward = TupleDistribution::aggregate([&bits], k, DistMeta::default()).unwrap();
        let backward =
            TupleDistribution::aggregate([&bits.reversed()], k, DistMeta::default()).unwrap();
        assert_eq!(forward.total(), backward.total());
        for &(code, count) in forward.entries() {
            assert_eq!(count, backward.count(reverse_code(code, k)), "k={k}");
        }
    }
}

#[test]
fn byte_ingestion_is_deterministic() {
    let mut rng = Xoshiro256::seeded(1001);
    let bytes: Vec<u8> = (0..4096).map(|_| rng.next_u64() as u8).collect();
    let a = ingest_bytes(&bytes, 5, WindowMode::Sliding).unwrap();
    let b = ingest_bytes(&bytes, 5, WindowMode::Sliding).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_json(), b.to_json());
}

/// The same experiment produces identical counts on a single-threaded and a
/// multi-threaded scheduler.
#[test]
fn experiments_are_schedule_independent() {
    let spec = SampleSpec::sample(MachineClass::Tm, 120, 5).with_steps(40);
    let serial = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        pool.install(|| machine_experiment(&spec, 4).unwrap())
    };
    let parallel = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        pool.install(|| machine_experiment(&spec, 4).unwrap())
    };
    assert_eq!(serial, parallel);
}

/// Permutation p-values come out identical on serial and parallel
/// schedulers (each trial draws from its own (seed, index) stream).
#[test]
fn permutation_test_is_schedule_independent() {
    use algoprob::stats::{permutation_test, spearman, PairedRanking, TiePolicy};
    let mut rng = Xoshiro256::seeded(606);
    let x: Vec<f64> = (0..32).map(|_| rng.unit_f64()).collect();
    let y: Vec<f64> = (0..32).map(|_| rng.unit_f64()).collect();
    let p = PairedRanking::from_values(x, y).unwrap();
    let rho = spearman(&p, TiePolicy::Fractional).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| permutation_test(&p, rho, TiePolicy::Fractional, 2000, 42))
    };
    assert_eq!(run(1).to_bits(), run(4).to_bits());
}

/// Exhaustive 2-state enumeration at desk scale: the tuple distribution is
/// exactly invariant under complement (both blank tapes are aggregated) and
/// under reversal (the rule space is mirror-closed).
#[test]
fn exhaustive_small_tm_distribution_symmetries() {
    let spec = SampleSpec::exhaustive(MachineClass::Tm)
        .with_n_states(2)
        .with_steps(25);
    let d = machine_experiment(&spec, 4).unwrap();
    assert!(d.total() > 0);
    for &(code, count) in d.entries() {
        assert_eq!(count, d.count(complement_code(code, 4)), "complement");
        assert_eq!(count, d.count(reverse_code(code, 4)), "reversal");
    }
}

#[test]
fn sample_indices_are_a_subset_of_exhaustive() {
    let sampled = machine_experiment(
        &SampleSpec::sample(MachineClass::Ts, 300, 17).with_steps(15),
        4,
    )
    .unwrap();
    let exhaustive =
        machine_experiment(&SampleSpec::exhaustive(MachineClass::Ts).with_steps(15), 4).unwrap();
    for &(code, count) in sampled.entries() {
        assert!(count <= exhaustive.count(code));
    }
}
