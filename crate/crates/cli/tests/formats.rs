use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relstance::formats::*;
use relstance_core::data::{InteractionKind, InteractionPair, InteractionSet, Split, Stance};
use relstance_core::RelationalEmbedding;

#[test]
fn edges_keep_order_and_duplicates() {
    let set = parse_edges("a\tb\nb\tc\na\tb".as_bytes(), InteractionKind::Retweet).unwrap();
    assert_eq!(set.len(), 3);
    assert_eq!(set.pairs()[0], set.pairs()[2]);
    assert_eq!(set.pairs()[0], InteractionPair::new("a", "b", InteractionKind::Retweet).unwrap());
    assert_eq!(set.count(InteractionKind::Retweet), 3);
}

#[test]
fn empty_edge_file_is_empty_set() {
    let set = parse_edges("".as_bytes(), InteractionKind::Retweet).unwrap();
    assert!(set.is_empty());
    assert_eq!(set.count(InteractionKind::Retweet) + set.count(InteractionKind::Friend), 0);
}

#[test]
fn per_line_kind_overrides_default() {
    let set = parse_edges("a\tb\tFRIEND\na\tc".as_bytes(), InteractionKind::Retweet).unwrap();
    assert_eq!(set.pairs()[0].kind, InteractionKind::Friend);
    assert_eq!(set.pairs()[1].kind, InteractionKind::Retweet);
}

#[test]
fn malformed_edges_report_line_numbers() {
    let input = "# header comment\na\tb\n\nonlyone\nx\ty\tLIKE\n\tz\nc\td\n";
    let err = parse_edges(input.as_bytes(), InteractionKind::Retweet).unwrap_err();
    assert!(err.to_string().starts_with("line 4:"), "{err}");
    let (set, errors) = parse_edges_lenient(input.as_bytes(), InteractionKind::Retweet).unwrap();
    // nothing silently dropped: 5 candidate lines = 2 accepted + 3 errors
    assert_eq!(set.len() + errors.len(), 5);
    let lines: Vec<String> = errors.iter().map(|e| e.to_string()[..7].to_string()).collect();
    assert_eq!(lines, ["line 4:", "line 5:", "line 6:"]);
}

#[test]
fn tweets_parse() {
    let d = parse_tweets("id\tuser\ttext\tlabel\tsplit\nt1\tu1\thello\tFAVOR\tTRAIN\n".as_bytes()).unwrap();
    assert_eq!(d.len(), 1);
    assert_eq!(d.count(Split::Train, Stance::Favor), 1);
    assert_eq!(d.split_len(Split::Test), 0);
}

#[test]
fn tweet_errors() {
    let dup = "id\tuser\ttext\tlabel\tsplit\nt1\tu1\ta\tFAVOR\tTRAIN\nt1\tu2\tb\tNONE\tTEST\n";
    let e = parse_tweets(dup.as_bytes()).unwrap_err();
    assert!(matches!(&e, FormatError::DuplicateId(id) if id == "t1"), "{e}");
    let bad = "id\tuser\ttext\tlabel\tsplit\nt1\tu1\ta\tFAVOR\tTRAIN\nt2\tu1\tb\tYES\tTRAIN\n";
    let e = parse_tweets(bad.as_bytes()).unwrap_err();
    assert!(e.to_string().starts_with("line 3:") && e.to_string().contains("YES"), "{e}");
    let neutral = "id\tuser\ttext\tlabel\tsplit\nt1\tu1\ta\tNEUTRAL\tTEST\n";
    assert_eq!(parse_tweets(neutral.as_bytes()).unwrap().records()[0].stance, Stance::None);
}

#[test]
fn tweet_text_escapes_round_trip() {
    let input = "id\tuser\ttext\tlabel\tsplit\nt1\tu1\tline\\none\\ttab\tAGAINST\tTEST\n";
    let d = parse_tweets(input.as_bytes()).unwrap();
    assert_eq!(d.records()[0].text, "line\none\ttab");
    let mut out = Vec::new();
    write_tweets(&d, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), input);
}

#[test]
fn word_vectors() {
    let t = load_word_vectors("2 2\ncat 1 0\ndog 0 1".as_bytes()).unwrap();
    assert_eq!((t.dim(), t.len()), (2, 2));
    let e = load_word_vectors("2 2\ncat 1 0\ncat 1 0 0".as_bytes()).unwrap_err();
    assert!(e.to_string().contains("cat"), "{e}");
    let t = load_word_vectors("cat 1 0\ncat 0 1".as_bytes()).unwrap();
    assert_eq!(t.get("cat").unwrap(), &[0.0, 1.0]);
    assert!(load_word_vectors("cat 1 x".as_bytes()).is_err());
}

#[test]
fn embedding_format_echo() {
    let e = RelationalEmbedding::new(vec!["u1".into()], vec![0.5, -0.25], 2).unwrap();
    let mut out = Vec::new();
    write_embedding(&e, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), "1 2\nu1 0.5 -0.25\n");
}

#[test]
fn embedding_row_count_checked() {
    let e = read_embedding("3 2\na 1 2\nb 3 4\n".as_bytes()).unwrap_err();
    assert!(matches!(e, FormatError::RowCount { declared: 3, found: 2 }), "{e}");
}

#[test]
fn random_embedding_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let users: Vec<String> = (0..5).map(|i| format!("user{i}")).collect();
    let values: Vec<f64> = (0..50).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let e = RelationalEmbedding::new(users, values, 10).unwrap();
    let mut out = Vec::new();
    write_embedding(&e, &mut out).unwrap();
    let back = read_embedding(out.as_slice()).unwrap();
    assert_eq!(back.users(), e.users());
    for (a, b) in back.matrix().iter().zip(e.matrix()) {
        assert!((a - b).abs() < 1e-8);
    }
}

fn kind() -> impl Strategy<Value = InteractionKind> {
    prop_oneof![Just(InteractionKind::Retweet), Just(InteractionKind::Friend)]
}

proptest! {
    #[test]
    fn edges_round_trip(pairs in prop::collection::vec(("[a-z0-9_]{1,6}", "[a-z0-9_]{1,6}", kind()), 0..30)) {
        let set: InteractionSet = pairs
            .into_iter()
            .map(|(s, t, k)| InteractionPair::new(s, t, k).unwrap())
            .collect();
        let mut out = Vec::new();
        serialize_edges(&set, &mut out).unwrap();
        let back = parse_edges(out.as_slice(), InteractionKind::Retweet).unwrap();
        prop_assert_eq!(back, set);
    }

    #[test]
    fn g9_round_trips_within_precision(x in -1e12f64..1e12) {
        let y: f64 = fmt_g9(x).parse().unwrap();
        prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1e-300));
    }
}
