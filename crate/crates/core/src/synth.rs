//! Seeded planted-community fixtures: interaction graphs whose communities
//! carry the stance signal, plus skewed-vocabulary tweet texts.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{
    InteractionKind, InteractionPair, InteractionSet, LabeledTweet, Split, Stance, TweetDataset,
    WordVectorTable,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommunitySpec {
    pub stance: Stance,
    pub size: usize,
    /// Probability that a member's tweet carries the community stance.
    pub signal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub communities: Vec<CommunitySpec>,
    /// Relative weight of a retweet landing on one given member of the
    /// author's own community ...
    pub p_in: f64,
    /// ... and on one given member of another community.
    pub p_out: f64,
    pub pairs_per_user: usize,
    pub friend_p_in: f64,
    pub friend_p_out: f64,
    pub friends_per_user: usize,
    pub tweets_per_user: usize,
    pub tokens_per_tweet: usize,
    pub community_vocab: usize,
    pub noise_vocab: usize,
    /// Fraction of tokens drawn from the shared noise pool.
    pub text_noise: f64,
    /// Fraction of users (per community) whose tweets are all TEST.
    pub test_fraction: f64,
    /// Fraction of TEST users left out of both interaction sets.
    pub unknown_user_fraction: f64,
    pub word_dim: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Preset::Clean.config()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Sharply separated communities.
    Clean,
    /// Communities bleed into each other; labels are noisier.
    Overlap,
    /// Small communities with almost no homophily.
    Transversal,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Clean, Preset::Overlap, Preset::Transversal];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Clean => "clean",
            Preset::Overlap => "overlap",
            Preset::Transversal => "transversal",
        }
    }

    pub fn config(self) -> SynthConfig {
        let three = |size, signal| {
            Stance::ALL
                .iter()
                .map(|&stance| CommunitySpec {
                    stance,
                    size,
                    signal,
                })
                .collect()
        };
        let base = SynthConfig {
            communities: three(100, 0.95),
            p_in: 0.1,
            p_out: 0.01,
            pairs_per_user: 100,
            friend_p_in: 0.06,
            friend_p_out: 0.02,
            friends_per_user: 50,
            tweets_per_user: 3,
            tokens_per_tweet: 6,
            community_vocab: 150,
            noise_vocab: 400,
            text_noise: 0.5,
            test_fraction: 0.25,
            unknown_user_fraction: 0.0,
            word_dim: 16,
            seed: 1,
        };
        match self {
            Preset::Clean => base,
            Preset::Overlap => SynthConfig {
                communities: three(100, 0.8),
                p_in: 0.06,
                p_out: 0.02,
                friend_p_in: 0.04,
                friend_p_out: 0.02,
                text_noise: 0.6,
                unknown_user_fraction: 0.1,
                ..base
            },
            Preset::Transversal => SynthConfig {
                communities: three(40, 0.9),
                p_in: 0.011,
                p_out: 0.01,
                friend_p_in: 0.011,
                friend_p_out: 0.01,
                unknown_user_fraction: 0.1,
                ..base
            },
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset `{s}`")))
    }
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

impl SynthConfig {
    pub fn n_users(&self) -> usize {
        self.communities.iter().map(|c| c.size).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.communities.is_empty() || self.communities.iter().any(|c| c.size == 0) {
            return bad("every community needs at least one user");
        }
        if self.communities.iter().any(|c| !unit(c.signal)) {
            return bad("signal must lie in [0, 1]");
        }
        for p in [self.p_in, self.p_out, self.friend_p_in, self.friend_p_out] {
            if !unit(p) {
                return bad("edge probabilities must lie in [0, 1]");
            }
        }
        if self.p_in == 0.0 && self.p_out == 0.0 {
            return bad("p_in and p_out cannot both be zero");
        }
        if self.friends_per_user > 0 && self.friend_p_in == 0.0 && self.friend_p_out == 0.0 {
            return bad("friend_p_in and friend_p_out cannot both be zero");
        }
        for f in [self.text_noise, self.test_fraction, self.unknown_user_fraction] {
            if !unit(f) {
                return bad("fractions must lie in [0, 1]");
            }
        }
        if self.tweets_per_user == 0 || self.tokens_per_tweet == 0 {
            return bad("every user needs at least one non-empty tweet");
        }
        if self.community_vocab == 0 || self.noise_vocab == 0 || self.word_dim == 0 {
            return bad("vocabulary sizes and word_dim must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub retweets: InteractionSet,
    pub friends: InteractionSet,
    pub tweets: TweetDataset,
    pub word_vectors: WordVectorTable,
    /// Community index per user, aligned with [`SynthData::users`].
    pub community: Vec<usize>,
    pub users: Vec<String>,
    /// Users left out of both interaction sets.
    pub unknown: Vec<String>,
}

pub fn user_id(i: usize) -> String {
    format!("u{i:04}")
}

fn community_token(c: usize, i: usize) -> String {
    format!("c{c}w{i}")
}

fn noise_token(i: usize) -> String {
    format!("n{i}")
}

/// Zipf(1) sampler over `n` ranks.
struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    fn new(n: usize) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (1..=n)
            .map(|r| {
                acc += 1.0 / r as f64;
                acc
            })
            .collect();
        cdf.iter_mut().for_each(|c| *c /= acc);
        Self { cdf }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1)
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    cfg.validate()?;
    // one stream per stage, so changing e.g. the text settings leaves the
    // graph and the labels untouched
    let stream = |s: u64| {
        let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
        r.set_stream(s);
        r
    };
    let mut rng = stream(0);
    let n = cfg.n_users();
    let users: Vec<String> = (0..n).map(user_id).collect();
    let mut community = Vec::with_capacity(n);
    for (c, spec) in cfg.communities.iter().enumerate() {
        community.extend(core::iter::repeat(c).take(spec.size));
    }

    // user-disjoint split, stratified by community
    let mut is_test = vec![false; n];
    let mut start = 0;
    let mut test_users = Vec::new();
    for spec in &cfg.communities {
        let mut members: Vec<usize> = (start..start + spec.size).collect();
        members.shuffle(&mut rng);
        let n_test = libm::round(cfg.test_fraction * spec.size as f64) as usize;
        for &u in &members[..n_test] {
            is_test[u] = true;
            test_users.push(u);
        }
        start += spec.size;
    }
    test_users.sort_unstable();
    test_users.shuffle(&mut rng);
    let n_unknown = libm::round(cfg.unknown_user_fraction * test_users.len() as f64) as usize;
    let mut known = vec![true; n];
    for &u in &test_users[..n_unknown] {
        known[u] = false;
    }

    let mut members_by_comm: Vec<Vec<usize>> = vec![Vec::new(); cfg.communities.len()];
    for u in 0..n {
        if known[u] {
            members_by_comm[community[u]].push(u);
        }
    }

    let draw_edges = |kind, p_in: f64, p_out: f64, per_user: usize, rng: &mut ChaCha8Rng| {
        let mut set = InteractionSet::new();
        if per_user == 0 {
            return Ok(set);
        }
        for u in (0..n).filter(|&u| known[u]) {
            let own = &members_by_comm[community[u]];
            let inside: Vec<usize> = own.iter().copied().filter(|&v| v != u).collect();
            let outside: Vec<usize> = members_by_comm
                .iter()
                .enumerate()
                .filter(|(c, _)| *c != community[u])
                .flat_map(|(_, m)| m.iter().copied())
                .collect();
            let w_in = p_in * inside.len() as f64;
            let w_out = p_out * outside.len() as f64;
            if w_in + w_out <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "user {} has no reachable interaction target",
                    users[u]
                )));
            }
            for _ in 0..per_user {
                let pool = if rng.gen::<f64>() * (w_in + w_out) < w_in {
                    &inside
                } else {
                    &outside
                };
                let v = pool[rng.gen_range(0..pool.len())];
                set.push(InteractionPair::new(users[u].clone(), users[v].clone(), kind)?);
            }
        }
        Ok(set)
    };
    let retweets = draw_edges(
        InteractionKind::Retweet,
        cfg.p_in,
        cfg.p_out,
        cfg.pairs_per_user,
        &mut stream(1),
    )?;
    let friends = draw_edges(
        InteractionKind::Friend,
        cfg.friend_p_in,
        cfg.friend_p_out,
        cfg.friends_per_user,
        &mut stream(2),
    )?;
    let mut label_rng = stream(3);
    let mut text_rng = stream(4);

    let community_zipf = Zipf::new(cfg.community_vocab);
    let noise_zipf = Zipf::new(cfg.noise_vocab);
    let mut records = Vec::with_capacity(n * cfg.tweets_per_user);
    for u in 0..n {
        let c = community[u];
        let spec = cfg.communities[c];
        for j in 0..cfg.tweets_per_user {
            let stance = if label_rng.gen::<f64>() < spec.signal {
                spec.stance
            } else {
                let others: Vec<Stance> =
                    Stance::ALL.into_iter().filter(|&s| s != spec.stance).collect();
                others[label_rng.gen_range(0..others.len())]
            };
            let mut words = Vec::with_capacity(cfg.tokens_per_tweet);
            for _ in 0..cfg.tokens_per_tweet {
                if text_rng.gen::<f64>() < cfg.text_noise {
                    words.push(noise_token(noise_zipf.sample(&mut text_rng)));
                } else {
                    words.push(community_token(c, community_zipf.sample(&mut text_rng)));
                }
            }
            records.push(LabeledTweet {
                tweet_id: format!("t{u:04}_{j}"),
                author: users[u].clone(),
                text: words.join(" "),
                stance,
                split: if is_test[u] { Split::Test } else { Split::Train },
            });
        }
    }
    let tweets = TweetDataset::new(records)?;

    let mut rng = stream(5);
    let mut word_vectors = WordVectorTable::new(cfg.word_dim)?;
    let uniform = |scale: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
        (0..cfg.word_dim).map(|_| rng.gen_range(-scale..scale)).collect()
    };
    for c in 0..cfg.communities.len() {
        let center = uniform(1.0, &mut rng);
        for i in 0..cfg.community_vocab {
            let jitter = uniform(0.5, &mut rng);
            let v = center.iter().zip(&jitter).map(|(a, b)| a + b).collect();
            word_vectors.insert(community_token(c, i), v)?;
        }
    }
    for i in 0..cfg.noise_vocab {
        let v = uniform(1.0, &mut rng);
        word_vectors.insert(noise_token(i), v)?;
    }

    let unknown = (0..n).filter(|&u| !known[u]).map(|u| users[u].clone()).collect();
    Ok(SynthData {
        retweets,
        friends,
        tweets,
        word_vectors,
        community,
        users,
        unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    fn two_communities() -> SynthConfig {
        SynthConfig {
            communities: vec![
                CommunitySpec {
                    stance: Stance::Favor,
                    size: 50,
                    signal: 0.9,
                },
                CommunitySpec {
                    stance: Stance::Against,
                    size: 50,
                    signal: 0.9,
                },
            ],
            p_in: 0.1,
            p_out: 0.01,
            pairs_per_user: 20,
            test_fraction: 0.0,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn intra_fraction_matches_mixture() {
        let cfg = two_communities();
        let d = generate(&cfg).unwrap();
        let comm = |id: &str| d.community[id[1..].parse::<usize>().unwrap()];
        let intra = d
            .retweets
            .iter()
            .filter(|p| comm(&p.source) == comm(&p.target))
            .count();
        let frac = intra as f64 / d.retweets.len() as f64;
        // 0.1·49 / (0.1·49 + 0.01·50)
        let expect = 4.9 / 5.4;
        assert!((frac - expect).abs() < 0.05, "{frac}");
        assert!((frac - 10.0 / 11.0).abs() < 0.05);
    }

    #[test]
    fn labels_follow_signal() {
        let mut cfg = two_communities();
        cfg.tweets_per_user = 10;
        let d = generate(&cfg).unwrap();
        let agree = d
            .tweets
            .records()
            .iter()
            .filter(|t| {
                let c = d.community[t.author[1..].parse::<usize>().unwrap()];
                t.stance == cfg.communities[c].stance
            })
            .count();
        let n = d.tweets.len() as f64;
        let sigma = libm::sqrt(n * 0.9 * 0.1);
        assert!((agree as f64 - 0.9 * n).abs() < 3.0 * sigma);
    }

    #[test]
    fn extremes() {
        let mut cfg = two_communities();
        cfg.communities.iter_mut().for_each(|c| c.signal = 1.0);
        cfg.text_noise = 1.0;
        let d = generate(&cfg).unwrap();
        for t in d.tweets.records() {
            let c = d.community[t.author[1..].parse::<usize>().unwrap()];
            assert_eq!(t.stance, cfg.communities[c].stance);
            assert!(t.text.split(' ').all(|w| w.starts_with('n')));
        }
    }

    #[test]
    fn unknown_users_have_no_pairs() {
        let mut cfg = Preset::Clean.config();
        cfg.unknown_user_fraction = 0.5;
        let d = generate(&cfg).unwrap();
        assert!(!d.unknown.is_empty());
        let unknown: BTreeSet<&str> = d.unknown.iter().map(|s| s.as_str()).collect();
        for p in d.retweets.iter().chain(d.friends.iter()) {
            assert!(!unknown.contains(p.source.as_str()));
            assert!(!unknown.contains(p.target.as_str()));
        }
        for u in &unknown {
            assert!(d.tweets.records().iter().any(|t| t.author == *u && t.split == Split::Test));
        }
    }

    #[test]
    fn split_is_user_disjoint() {
        let d = generate(&Preset::Clean.config()).unwrap();
        let train: BTreeSet<&str> = d.tweets.train().map(|t| t.author.as_str()).collect();
        assert!(d.tweets.test().all(|t| !train.contains(t.author.as_str())));
        assert_eq!(d.tweets.split_len(Split::Test), 75 * 3);
    }

    #[test]
    fn deterministic() {
        let a = generate(&Preset::Overlap.config()).unwrap();
        let b = generate(&Preset::Overlap.config()).unwrap();
        assert_eq!(a.retweets, b.retweets);
        assert_eq!(a.friends, b.friends);
        assert_eq!(a.tweets, b.tweets);
    }

    #[test]
    fn infeasible_rejected() {
        let mut cfg = two_communities();
        cfg.p_in = 0.0;
        cfg.p_out = 0.0;
        assert!(generate(&cfg).is_err());
        let mut cfg = two_communities();
        cfg.communities[0].size = 1;
        cfg.p_out = 0.0;
        assert!(generate(&cfg).is_err());
    }
}
