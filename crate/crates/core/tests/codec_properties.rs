use concurrent_codes::channel::{self, RngStream};
use concurrent_codes::codec::{
    decode, detect_gaps, encode_message, encode_set, gap_threshold, GapMask, Interval,
};
use concurrent_codes::{CodecParams, Codeword, MessageWord};
use proptest::prelude::*;

fn params() -> CodecParams {
    CodecParams::default()
}

fn words(values: &[u8]) -> Vec<MessageWord> {
    let p = params();
    let mut v: Vec<MessageWord> = values.iter().map(|&x| p.message(x as u64).unwrap()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[test]
fn encode_examples() {
    let p = params();
    let zero = encode_message(&p, p.message(0).unwrap(), 1).unwrap();
    assert_eq!(
        zero,
        vec![0x002, 0x004, 0x008, 0x010, 0x020, 0x040, 0x080, 0x100, 0x201, 0x402]
    );
    let one = encode_message(&p, p.message(1).unwrap(), 1).unwrap();
    assert_eq!(
        one,
        vec![0x003, 0x006, 0x00c, 0x018, 0x030, 0x060, 0x0c0, 0x180, 0x301, 0x603]
    );
}

#[test]
fn shared_prefix_shares_marks() {
    let p = params();
    let cw = encode_set(&p, &words(&[0x00, 0x80])).unwrap();
    assert!(cw.mark_count() <= 13, "{}", cw.mark_count());
    let cw = encode_set(&p, &words(&[0x02, 0x00])).unwrap();
    assert!(cw.mark_count() < 20);
}

#[test]
fn gap_covering_erased_tail_restores_message() {
    let p = params();
    let truth = words(&[0x00]);
    let cw = encode_set(&p, &truth).unwrap();
    let gap = GapMask::single(0x100, 0x403 - 0x100);
    let cut = channel::cut_gap(&cw, 0x100, 0x403 - 0x100).unwrap();
    assert_eq!(cut.mark_count(), 7);
    let without = decode(&p, &cut, None).unwrap();
    assert!(without.messages.is_empty());
    let with = decode(&p, &cut, Some(&gap)).unwrap();
    assert!(with.contains(truth[0]));
    assert!(with.per_seed[0].gap_assisted.contains(&truth[0]));
}

#[test]
fn dense_codeword_with_hole_detects_the_hole() {
    let mut cw = Codeword::ones(11).unwrap();
    cw.clear_range(500, 900).unwrap();
    assert_eq!(detect_gaps(&cw, 205).intervals(), &[Interval { start: 500, len: 900 }]);
}

#[test]
fn gap_threshold_examples() {
    assert_eq!(gap_threshold(5, 2048, 10, 0.02).unwrap(), 204);
    let e = gap_threshold(5, 2048, 10, 0.01).unwrap();
    assert!((235..=245).contains(&e), "{e}");
}

#[test]
fn eighty_messages_round_trip() {
    let p = params();
    let mut rng = RngStream::new(80);
    for _ in 0..20 {
        let truth = concurrent_codes::experiment::random_messages(&p, 80, &mut rng).unwrap();
        let r = decode(&p, &encode_set(&p, &truth).unwrap(), None).unwrap();
        assert_eq!(r.messages, truth);
    }
}

fn message_set() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 0..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn decoded_contains_encoded(values in message_set(), noise in 0usize..600, seed in any::<u64>()) {
        let p = params();
        let truth = words(&values);
        let cw = encode_set(&p, &truth).unwrap();
        let noisy = channel::add_random_marks(&cw, noise, &mut RngStream::new(seed)).unwrap();
        let r = decode(&p, &noisy, None).unwrap();
        for t in &truth {
            prop_assert!(r.contains(*t));
        }
    }

    #[test]
    fn adding_marks_never_removes_messages(values in message_set(), extra in prop::collection::vec(0usize..2048, 0..300)) {
        let p = params();
        let x = encode_set(&p, &words(&values)).unwrap();
        let mut y = x.clone();
        for j in extra {
            y.set(j);
        }
        let rx = decode(&p, &x, None).unwrap();
        let ry = decode(&p, &y, None).unwrap();
        for m in &rx.messages {
            prop_assert!(ry.contains(*m));
        }
    }

    #[test]
    fn enlarging_gaps_never_removes_messages(values in message_set(), start in 0usize..2000, len in 1usize..48, grow in 0usize..400) {
        let p = params();
        let cw = encode_set(&p, &words(&values)).unwrap();
        let small = GapMask::single(start, len);
        let big_start = start.saturating_sub(grow);
        let big = GapMask::single(big_start, (start + len + grow).min(2048) - big_start);
        let rs = decode(&p, &cw, Some(&small)).unwrap();
        let rb = decode(&p, &cw, Some(&big)).unwrap();
        for m in &rs.messages {
            prop_assert!(rb.contains(*m));
        }
    }

    #[test]
    fn branch_and_call_accounting(values in message_set(), noise in 0usize..900, seed in any::<u64>()) {
        let p = params();
        let cw = encode_set(&p, &words(&values)).unwrap();
        let noisy = channel::add_random_marks(&cw, noise, &mut RngStream::new(seed)).unwrap();
        let r = decode(&p, &noisy, None).unwrap();
        let b = &r.branches_per_round;
        prop_assert_eq!(b.len(), 10);
        let mut prev = 1usize;
        let mut calls = 0u64;
        for (i, &bi) in b.iter().enumerate() {
            prop_assert!(bi <= 1 << (i + 1));
            if i < 8 {
                prop_assert!(bi <= 2 * prev);
                calls += 2 * prev as u64;
            } else {
                prop_assert!(bi <= prev);
                calls += prev as u64;
            }
            prev = bi;
        }
        prop_assert_eq!(r.hash_calls, calls);
        prop_assert_eq!(b[9], r.messages.len());
    }

    #[test]
    fn mark_sharing_bound(values in message_set()) {
        let p = params();
        let truth = words(&values);
        let cw = encode_set(&p, &truth).unwrap();
        prop_assert!(cw.mark_count() <= 10 * truth.len());
        let first_bits: std::collections::BTreeSet<u64> = truth.iter().map(|m| m.value() & 1).collect();
        if first_bits.len() < truth.len() {
            prop_assert!(cw.mark_count() < 10 * truth.len());
        }
    }

    #[test]
    fn ccw_round_trip(width in 2u32..13, marks in prop::collection::vec(any::<usize>(), 0..200)) {
        let len = 1usize << width;
        let cw = Codeword::from_marks(width, marks.into_iter().map(|m| m % len)).unwrap();
        prop_assert_eq!(Codeword::from_ccw(&cw.to_ccw()).unwrap(), cw);
    }

    #[test]
    fn detected_runs_are_maximal_zero_runs(marks in prop::collection::vec(0usize..256, 0..40), min_gap in 1usize..40) {
        let cw = Codeword::from_marks(8, marks).unwrap();
        let mask = detect_gaps(&cw, min_gap);
        for iv in mask.intervals() {
            prop_assert!(iv.len >= min_gap);
            prop_assert!((iv.start..iv.end()).all(|j| !cw.get(j)));
            prop_assert!(iv.start == 0 || cw.get(iv.start - 1));
            prop_assert!(iv.end() == 256 || cw.get(iv.end()));
        }
        let covered: usize = (0..256).filter(|&j| mask.contains(j)).count();
        prop_assert_eq!(covered, mask.covered());
    }
}
