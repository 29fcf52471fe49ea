//! Property tests: both tree layouts against the reference queue, plus the
//! fill-to-capacity guarantee.

use proptest::collection::vec;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shq::fuzz::{compare_drains, drain, fuzz_compare, random_ops, FuzzConfig, FuzzOp, Variant};
use shq::oracle::OracleQueue;
use shq::{Element, MemOptShq, NaiveShq, Shq, TreeLayout};

/// Interpret raw (choice, id, key) triples as a valid op sequence against
/// the live id set, apply to tree and oracle, and drain-compare.
fn run_script<Lay: TreeLayout>(mut queue: Shq<Lay>, script: &[(u8, u32, u64)]) {
    let mut oracle = OracleQueue::new();
    let capacity = queue.capacity();
    for &(choice, id_raw, key) in script {
        let id = (id_raw as u64 % capacity) as u32;
        match choice % 4 {
            0 => {
                if queue.read(id).is_none() {
                    queue.insert(Element::new(id, key)).unwrap();
                    oracle.insert(Element::new(id, key)).unwrap();
                }
            }
            1 => {
                if queue.read(id).is_some() {
                    assert_eq!(queue.delete(id).unwrap(), oracle.delete(id).unwrap());
                }
            }
            2 => {
                if queue.read(id).is_some() {
                    queue.delete_insert(id, key).unwrap();
                    oracle.delete_insert(id, key).unwrap();
                }
            }
            _ => {
                assert_eq!(queue.read(id), oracle.read(id));
            }
        }
        queue.check_invariants().unwrap();
        assert_eq!(queue.read_top().map(|e| e.key), oracle.read_top().map(|e| e.key));
    }
    let drained = drain(&mut queue).unwrap();
    compare_drains(&drained, &oracle.sorted_contents()).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn naive_matches_oracle(script in vec((any::<u8>(), any::<u32>(), 0u64..512), 0..200)) {
        run_script(NaiveShq::with_levels(5).unwrap(), &script);
    }

    #[test]
    fn memopt_matches_oracle(script in vec((any::<u8>(), any::<u32>(), 0u64..512), 0..200)) {
        run_script(MemOptShq::with_levels(5).unwrap(), &script);
    }

    #[test]
    fn any_distinct_id_fill_succeeds(levels in 3u8..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let capacity = 1u64 << (levels - 1);
        let mut ids: Vec<u32> = (0..capacity as u32).collect();
        ids.shuffle(&mut rng);

        let mut naive = NaiveShq::with_levels(levels).unwrap();
        let mut memopt = MemOptShq::with_levels(levels).unwrap();
        for &id in &ids {
            let key = (id as u64).wrapping_mul(0x9e3779b9) % 97;
            naive.insert(Element::new(id, key)).unwrap();
            memopt.insert(Element::new(id, key)).unwrap();
        }
        prop_assert_eq!(naive.len(), capacity);
        prop_assert_eq!(memopt.len(), capacity);
        naive.check_invariants().unwrap();
        memopt.check_invariants().unwrap();
    }
}

/// Large mirrored run: one hundred thousand random operations applied to
/// the naive queue and the oracle in lockstep, then drained.
#[test]
fn hundred_thousand_ops_mirror_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut queue = NaiveShq::with_levels(9).unwrap();
    let mut oracle = OracleQueue::new();
    for op in random_ops(&mut rng, queue.capacity(), 100_000) {
        match op {
            FuzzOp::Insert(e) => {
                queue.insert(e).unwrap();
                oracle.insert(e).unwrap();
            }
            FuzzOp::Delete(id) => {
                assert_eq!(queue.delete(id).unwrap(), oracle.delete(id).unwrap());
            }
            FuzzOp::DeleteInsert { id, new_key } => {
                queue.delete_insert(id, new_key).unwrap();
                oracle.delete_insert(id, new_key).unwrap();
            }
            FuzzOp::Read(id) => assert_eq!(queue.read(id), oracle.read(id)),
        }
    }
    let drained = drain(&mut queue).unwrap();
    compare_drains(&drained, &oracle.sorted_contents()).unwrap();
}

/// The two layouts drain identically on identical operation sequences.
#[test]
fn naive_and_memopt_drains_agree() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut naive = NaiveShq::with_levels(6).unwrap();
        let mut memopt = MemOptShq::with_levels(6).unwrap();
        for op in random_ops(&mut rng, naive.capacity(), 3000) {
            match op {
                FuzzOp::Insert(e) => {
                    naive.insert(e).unwrap();
                    memopt.insert(e).unwrap();
                }
                FuzzOp::Delete(id) => {
                    assert_eq!(naive.delete(id).unwrap(), memopt.delete(id).unwrap());
                }
                FuzzOp::DeleteInsert { id, new_key } => {
                    naive.delete_insert(id, new_key).unwrap();
                    memopt.delete_insert(id, new_key).unwrap();
                }
                FuzzOp::Read(id) => assert_eq!(naive.read(id), memopt.read(id)),
            }
        }
        let a = drain(&mut naive).unwrap();
        let b = drain(&mut memopt).unwrap();
        compare_drains(&a, &b).unwrap();
    }
}

#[test]
fn fuzz_campaigns_smoke() {
    for variant in [Variant::Naive, Variant::Memopt] {
        for levels in [4u8, 7] {
            let report =
                fuzz_compare(&FuzzConfig { seed: 9, op_count: 2000, levels, variant });
            assert!(report.is_success(), "{report}");
        }
    }
}
