use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::data::Stance;
use crate::error::{Error, Result};

/// Counts indexed `[gold][predicted]` in `AGAINST, FAVOR, NONE` order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn new(gold: &[Stance], pred: &[Stance]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::LengthMismatch {
                left: gold.len(),
                right: pred.len(),
            });
        }
        let mut counts = [[0u64; 3]; 3];
        for (g, p) in gold.iter().zip(pred) {
            counts[g.index()][p.index()] += 1;
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn true_positives(&self, c: Stance) -> u64 {
        self.counts[c.index()][c.index()]
    }

    /// Predicted `c`, gold something else.
    pub fn false_positives(&self, c: Stance) -> u64 {
        (0..3).map(|g| self.counts[g][c.index()]).sum::<u64>() - self.true_positives(c)
    }

    /// Gold `c`, predicted something else.
    pub fn false_negatives(&self, c: Stance) -> u64 {
        self.counts[c.index()].iter().sum::<u64>() - self.true_positives(c)
    }

    /// `gold\pred` header row then one row per gold class.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("gold\\pred");
        for c in Stance::ALL {
            let _ = write!(s, "\t{c}");
        }
        s.push('\n');
        for g in Stance::ALL {
            s.push_str(g.as_str());
            for p in Stance::ALL {
                let _ = write!(s, "\t{}", self.counts[g.index()][p.index()]);
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub f1_against: f64,
    pub f1_favor: f64,
    /// Mean of the AGAINST and FAVOR F1 scores.
    pub f1_avg: f64,
    /// Per class in `AGAINST, FAVOR, NONE` order.
    pub precision: [f64; 3],
    pub recall: [f64; 3],
    pub f1: [f64; 3],
    pub n: usize,
    pub confusion: ConfusionMatrix,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// F1 of FAVOR and AGAINST and their mean. NONE only matters through the
/// errors it causes for the other two classes; 0/0 counts as 0.
pub fn f1_favor_against(gold: &[Stance], pred: &[Stance]) -> Result<EvalReport> {
    let cm = ConfusionMatrix::new(gold, pred)?;
    let mut precision = [0.0; 3];
    let mut recall = [0.0; 3];
    let mut f1s = [0.0; 3];
    for c in Stance::ALL {
        let tp = cm.true_positives(c);
        let p = ratio(tp, tp + cm.false_positives(c));
        let r = ratio(tp, tp + cm.false_negatives(c));
        precision[c.index()] = p;
        recall[c.index()] = r;
        f1s[c.index()] = f1(p, r);
    }
    let f1_against = f1s[Stance::Against.index()];
    let f1_favor = f1s[Stance::Favor.index()];
    Ok(EvalReport {
        f1_against,
        f1_favor,
        f1_avg: (f1_against + f1_favor) / 2.0,
        precision,
        recall,
        f1: f1s,
        n: gold.len(),
        confusion: cm,
    })
}

impl EvalReport {
    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let mut s = format!("{:<8} {:>9} {:>9} {:>9}\n", "class", "precision", "recall", "f1");
        for c in Stance::ALL {
            let i = c.index();
            let _ = writeln!(
                s,
                "{:<8} {:>9.4} {:>9.4} {:>9.4}",
                c.as_str(),
                self.precision[i],
                self.recall[i],
                self.f1[i]
            );
        }
        let _ = writeln!(s, "f1_avg(AGAINST,FAVOR) = {:.4}  n = {}", self.f1_avg, self.n);
        s
    }
}
