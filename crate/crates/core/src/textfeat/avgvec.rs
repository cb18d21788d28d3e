use alloc::vec;
use alloc::vec::Vec;

use crate::data::WordVectorTable;

/// Mean of the in-vocabulary word vectors and the number of hits. Zero
/// vector when nothing is found.
pub fn avg_word_vectors<S: AsRef<str>>(tokens: &[S], table: &WordVectorTable) -> (Vec<f64>, usize) {
    let mut acc = vec![0.0; table.dim()];
    let mut hits = 0usize;
    for t in tokens {
        if let Some(v) = table.get(t.as_ref()) {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
            hits += 1;
        }
    }
    if hits > 0 {
        let n = hits as f64;
        acc.iter_mut().for_each(|a| *a /= n);
    }
    (acc, hits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> WordVectorTable {
        let mut t = WordVectorTable::new(2).unwrap();
        t.insert("cat", vec![1.0, 0.0]).unwrap();
        t.insert("dog", vec![0.0, 1.0]).unwrap();
        t
    }

    #[test]
    fn averages_and_skips_oov() {
        let t = table();
        assert_eq!(avg_word_vectors(&["cat", "dog"], &t), (vec![0.5, 0.5], 2));
        assert_eq!(avg_word_vectors(&["cat", "unicorn"], &t), (vec![1.0, 0.0], 1));
        let none: [&str; 0] = [];
        assert_eq!(avg_word_vectors(&none, &t), (vec![0.0, 0.0], 0));
    }
}
