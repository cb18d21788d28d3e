use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::data::InteractionSet;
use crate::error::{Error, Result};

/// Contiguous user indexing plus per-slot occurrence counts.
///
/// Indices follow first appearance in the pair stream (source before target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    index: BTreeMap<String, usize>,
    users: Vec<String>,
    source_freq: Vec<u64>,
    target_freq: Vec<u64>,
}

impl Vocab {
    pub fn build(pairs: &InteractionSet) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput("no interaction pairs to build a vocabulary from"));
        }
        let mut vocab = Vocab {
            index: BTreeMap::new(),
            users: Vec::new(),
            source_freq: Vec::new(),
            target_freq: Vec::new(),
        };
        for p in pairs {
            let s = vocab.intern(&p.source);
            vocab.source_freq[s] += 1;
            let t = vocab.intern(&p.target);
            vocab.target_freq[t] += 1;
        }
        Ok(vocab)
    }

    fn intern(&mut self, user: &str) -> usize {
        if let Some(&i) = self.index.get(user) {
            return i;
        }
        let i = self.users.len();
        self.index.insert(user.into(), i);
        self.users.push(user.into());
        self.source_freq.push(0);
        self.target_freq.push(0);
        i
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn id(&self, user: &str) -> Option<usize> {
        self.index.get(user).copied()
    }

    pub fn user(&self, id: usize) -> &str {
        &self.users[id]
    }

    pub fn users(&self) -> &[String] {
        &self.users
    }

    pub fn source_freq(&self, id: usize) -> u64 {
        self.source_freq[id]
    }

    pub fn target_freq(&self, id: usize) -> u64 {
        self.target_freq[id]
    }

    pub fn target_freqs(&self) -> &[u64] {
        &self.target_freq
    }

    /// Total occurrences over both slots; at least one for every user.
    pub fn freq(&self, id: usize) -> u64 {
        self.source_freq[id] + self.target_freq[id]
    }

    pub fn total_target(&self) -> u64 {
        self.target_freq.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{InteractionKind, InteractionPair};

    fn set(edges: &[(&str, &str)]) -> InteractionSet {
        edges
            .iter()
            .map(|(s, t)| InteractionPair::new(*s, *t, InteractionKind::Retweet).unwrap())
            .collect()
    }

    #[test]
    fn counts_source_and_target_slots() {
        let v = Vocab::build(&set(&[("a", "b"), ("b", "c"), ("a", "b")])).unwrap();
        assert_eq!(v.len(), 3);
        let (a, b, c) = (v.id("a").unwrap(), v.id("b").unwrap(), v.id("c").unwrap());
        assert_eq!(v.target_freq(b), 2);
        assert_eq!(v.target_freq(c), 1);
        assert_eq!(v.source_freq(a), 2);
        assert_eq!(v.source_freq(b), 1);
        assert!((0..v.len()).all(|i| v.freq(i) >= 1));
        let mut ids: Vec<usize> = v.users().iter().map(|u| v.id(u).unwrap()).collect();
        ids.sort_unstable();
        assert_eq!(ids, [0, 1, 2]);
    }

    #[test]
    fn self_loop_single_user() {
        let v = Vocab::build(&set(&[("a", "a")])).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.freq(0), 2);
    }

    #[test]
    fn empty_set_is_error() {
        assert!(Vocab::build(&InteractionSet::new()).is_err());
    }
}
