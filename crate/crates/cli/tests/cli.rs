use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use relstance::formats::{parse_tweets, read_embedding, write_tweets};
use relstance::train_parallel;
use relstance_core::data::{InteractionKind, InteractionPair, InteractionSet, LabeledTweet, Split, TweetDataset};
use relstance_core::TrainConfig;

const BIN: &str = env!("CARGO_BIN_EXE_relstance");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--preset", "clean", "--seed", "1", "--out-dir", "d"];
    args.extend_from_slice(extra);
    ok(dir, &args);
}

#[test]
fn version_is_machine_readable() {
    let out = Command::new(BIN).arg("--version").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("relstance {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["train-emb", "--out", "e.vec"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    synth(tmp.path(), &[]);
    let out = run(tmp.path(), &["pipeline", "--system", "ftemb-svm", "--tweets", "d/tweets.tsv", "--out-dir", "p"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(tmp.path(), &["pipeline", "--system", "relemb-svm", "--tweets", "d/tweets.tsv", "--out-dir", "p"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(tmp.path(), &["pipeline", "--system", "bogus", "--tweets", "d/tweets.tsv", "--out-dir", "p"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["train-emb", "--edges", "missing.tsv", "--out", "e.vec"]);
    assert_eq!(out.status.code(), Some(1));
    fs::write(tmp.path().join("bad.tsv"), "a\tb\nbroken\n").unwrap();
    let out = run(tmp.path(), &["train-emb", "--edges", "bad.tsv", "--out", "e.vec"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn train_emb_writes_embedding_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    let out = run(
        tmp.path(),
        &["train-emb", "--edges", "d/retweets.tsv:retweet", "--mode", "retweet", "--dim", "10", "--seed", "7", "--epochs", "3", "--out", "e.vec"],
    );
    assert!(out.status.success());
    // one progress line per epoch
    assert_eq!(String::from_utf8_lossy(&out.stderr).matches("epoch ").count(), 3);
    let emb = read_embedding(fs::File::open(tmp.path().join("e.vec")).map(std::io::BufReader::new).unwrap()).unwrap();
    assert_eq!(emb.dim(), 10);
    let m = relstance::RunManifest::read(&tmp.path().join("e.vec.manifest.json")).unwrap();
    assert_eq!(m.subcommand, "train-emb");
    assert_eq!(m.seed, 7);
    assert_eq!(m.config["dim"], 10);
    assert_eq!(m.config["negatives_k"], 5);
    assert!(m.inputs.contains_key("d/retweets.tsv"));
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    fs::write(tmp.path().join("cfg.json"), r#"{"dim": 4, "epochs": 2, "seed": 9}"#).unwrap();
    ok(tmp.path(), &["train-emb", "--edges", "d/retweets.tsv", "--config", "cfg.json", "--dim", "6", "--quiet", "--out", "e.vec"]);
    let m = relstance::RunManifest::read(&tmp.path().join("e.vec.manifest.json")).unwrap();
    assert_eq!(m.config["dim"], 6);
    assert_eq!(m.config["epochs"], 2);
    assert_eq!(m.seed, 9);
    assert!(m.inputs.contains_key("cfg.json"));
}

#[test]
fn synth_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth(a.path(), &[]);
    synth(b.path(), &[]);
    for f in ["retweets.tsv", "friends.tsv", "tweets.tsv", "wordvecs.vec", "manifest.json"] {
        assert_eq!(fs::read(a.path().join("d").join(f)).unwrap(), fs::read(b.path().join("d").join(f)).unwrap(), "{f}");
    }
}

/// Replaces every TEST text with a marker token and returns the new file.
fn poison_test_texts(dir: &Path) {
    let path = dir.join("d/tweets.tsv");
    let d = parse_tweets(fs::read(&path).unwrap().as_slice()).unwrap();
    let records = d
        .records()
        .iter()
        .map(|t| LabeledTweet {
            text: if t.split == Split::Test { format!("{} leakmarker", t.text) } else { t.text.clone() },
            ..t.clone()
        })
        .collect();
    let mut out = Vec::new();
    write_tweets(&TweetDataset::new(records).unwrap(), &mut out).unwrap();
    fs::write(&path, out).unwrap();
}

#[test]
fn fitted_vocabularies_never_see_test_texts() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    poison_test_texts(tmp.path());
    ok(tmp.path(), &["train-emb", "--edges", "d/retweets.tsv", "--epochs", "2", "--quiet", "--out", "e.vec"]);
    for system in ["tfidf-svm", "backoff:tfidf-svm", "ensemble:tfidf-svm"] {
        let dir = format!("p_{}", system.replace(':', "_"));
        ok(tmp.path(), &["pipeline", "--system", system, "--tweets", "d/tweets.tsv", "--emb", "e.vec", "--out-dir", &dir]);
        let model: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join(&dir).join("model.json")).unwrap()).unwrap();
        let vocab = model["tfidf"]["vocabulary"].as_object().expect("tfidf model saved");
        assert!(!vocab.is_empty());
        assert!(!vocab.contains_key("leakmarker"), "{system} fitted on TEST text");
    }
}

#[test]
fn cv_ignores_the_test_split() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    let cv = ["cv", "--system", "tfidf-svm", "--tweets", "d/tweets.tsv", "--grid", "C=1", "gamma=1", "--folds", "3", "--quiet", "--out-dir"];
    ok(tmp.path(), &[&cv[..], &["a"]].concat());
    poison_test_texts(tmp.path());
    ok(tmp.path(), &[&cv[..], &["b"]].concat());
    assert_eq!(fs::read(tmp.path().join("a/cv.json")).unwrap(), fs::read(tmp.path().join("b/cv.json")).unwrap());
}

#[test]
fn backoff_without_known_users_equals_text_system() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    fs::write(tmp.path().join("other.tsv"), "x1\tx2\nx2\tx3\nx3\tx1\n").unwrap();
    ok(tmp.path(), &["train-emb", "--edges", "other.tsv", "--dim", "4", "--quiet", "--out", "e.vec"]);
    ok(tmp.path(), &["pipeline", "--system", "tfidf-svm", "--tweets", "d/tweets.tsv", "--out-dir", "t"]);
    ok(tmp.path(), &["pipeline", "--system", "backoff:tfidf-svm", "--tweets", "d/tweets.tsv", "--emb", "e.vec", "--out-dir", "b"]);
    assert_eq!(fs::read(tmp.path().join("t/report.json")).unwrap(), fs::read(tmp.path().join("b/report.json")).unwrap());
    let preds = fs::read_to_string(tmp.path().join("b/predictions.tsv")).unwrap();
    assert!(preds.lines().all(|l| l.ends_with("\tTEXTUAL-BACKOFF")));
}

#[test]
fn ensemble_predicts_every_test_tweet() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    ok(tmp.path(), &["train-emb", "--edges", "d/retweets.tsv", "--epochs", "3", "--quiet", "--out", "e.vec"]);
    ok(tmp.path(), &["pipeline", "--system", "ensemble:tfidf-svm", "--tweets", "d/tweets.tsv", "--emb", "e.vec", "--out-dir", "p"]);
    let d = parse_tweets(fs::read(tmp.path().join("d/tweets.tsv")).unwrap().as_slice()).unwrap();
    let preds = fs::read_to_string(tmp.path().join("p/predictions.tsv")).unwrap();
    assert_eq!(preds.lines().count(), d.split_len(Split::Test));
    let confusion = fs::read_to_string(tmp.path().join("p/confusion.tsv")).unwrap();
    assert!(confusion.starts_with("gold\\pred\tAGAINST\tFAVOR\tNONE\n"));
}

#[test]
fn cv_table_has_one_row_per_cell() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    ok(
        tmp.path(),
        &[
            "cv", "--system", "relemb-svm", "--tweets", "d/tweets.tsv", "--edges", "d/retweets.tsv:retweet", "--edges",
            "d/friends.tsv:friend", "--grid", "dims=10,20", "C=1,10", "gamma=0.1,1", "--folds", "5", "--epochs", "2", "--quiet",
            "--out-dir", "cv",
        ],
    );
    let v: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("cv/cv.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2 * 2 * 2 * 3);
    assert!(fs::read_to_string(tmp.path().join("cv/cv.txt")).unwrap().contains('*'));
}

#[test]
fn viz_writes_svg_and_coordinates() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), &[]);
    ok(tmp.path(), &["train-emb", "--edges", "d/retweets.tsv", "--epochs", "3", "--quiet", "--out", "e.vec"]);
    ok(tmp.path(), &["viz", "--emb", "e.vec", "--tweets", "d/tweets.tsv", "--out", "fig.svg"]);
    let svg = fs::read_to_string(tmp.path().join("fig.svg")).unwrap();
    let coords = fs::read_to_string(tmp.path().join("fig.tsv")).unwrap();
    // TRAIN users only: 75 per community
    assert_eq!(coords.lines().count(), 1 + 225);
    assert_eq!(svg.matches(r#"class="marker""#).count(), 225);
    assert!(tmp.path().join("fig.svg.manifest.json").exists());
    ok(tmp.path(), &["viz", "--emb", "e.vec", "--tweets", "d/tweets.tsv", "--all-users", "--out", "all.svg"]);
    assert_eq!(fs::read_to_string(tmp.path().join("all.tsv")).unwrap().lines().count(), 1 + 300);
}

#[test]
fn parallel_trainer_separates_cliques() {
    let mut set = InteractionSet::new();
    for clique in [0..8, 8..16] {
        for a in clique.clone() {
            for b in clique.clone() {
                if a != b {
                    for _ in 0..5 {
                        set.push(InteractionPair::new(format!("u{a}"), format!("u{b}"), InteractionKind::Retweet).unwrap());
                    }
                }
            }
        }
    }
    let cfg = TrainConfig {
        dim: 4,
        epochs: 100,
        threads: 3,
        ..TrainConfig::default()
    };
    let mut epochs = 0;
    let emb = train_parallel(&set, &cfg, |_| epochs += 1).unwrap();
    assert_eq!(epochs, 100);
    assert_eq!(emb.len(), 16);
    let cos = |a: usize, b: usize| {
        let (x, y) = (emb.row(&format!("u{a}")).unwrap(), emb.row(&format!("u{b}")).unwrap());
        let d: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
        d / (x.iter().map(|v| v * v).sum::<f64>().sqrt() * y.iter().map(|v| v * v).sum::<f64>().sqrt())
    };
    let (mut intra, mut inter) = (Vec::new(), Vec::new());
    for a in 0..16 {
        for b in (a + 1)..16 {
            if (a < 8) == (b < 8) { intra.push(cos(a, b)) } else { inter.push(cos(a, b)) }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&intra) > mean(&inter) + 0.3, "{} vs {}", mean(&intra), mean(&inter));
    // every user's nearest neighbour lies in its own clique
    for a in 0..16 {
        let nn = (0..16).filter(|&b| b != a).max_by(|&x, &y| cos(a, x).total_cmp(&cos(a, y))).unwrap();
        assert_eq!(a < 8, nn < 8, "user {a} nearest to {nn}");
    }
}

#[test]
fn single_thread_matches_sequential_trainer() {
    let set: InteractionSet = (0..40)
        .map(|i| InteractionPair::new(format!("u{}", i % 7), format!("u{}", (i * 3) % 5), InteractionKind::Retweet).unwrap())
        .collect();
    let cfg = TrainConfig { dim: 3, epochs: 4, ..TrainConfig::default() };
    let a = train_parallel(&set, &cfg, |_| {}).unwrap();
    let b = relstance_core::relemb::train(&set, &cfg).unwrap();
    assert_eq!(a, b);
}
