//! Community transition summaries between aligned time points.

use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::DynamicClustering;
use crate::model::{confusion_matrix, MembershipSequence};

/// Movement between aligned communities from `t` to `t + lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionStep {
    /// 1-based index of the source time point.
    pub t_index: usize,
    /// `counts[a][b]`: nodes in community `a + 1` at the source and `b + 1` at the target.
    pub counts: Vec<Vec<u64>>,
    /// `counts` as percentages of the source community size (rows of empty communities are zero).
    pub percentages: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionSummary {
    pub k: usize,
    pub lag: usize,
    pub steps: Vec<TransitionStep>,
    /// False when the labels were not certified alignable; the percentages then
    /// compare communities whose correspondence is not identified.
    pub alignable: bool,
}

impl TransitionSummary {
    /// Long-format CSV with header `t_index,from,to,count,percent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_index,from,to,count,percent\n");
        for step in &self.steps {
            for (a, row) in step.counts.iter().enumerate() {
                for (b, &c) in row.iter().enumerate() {
                    writeln!(out, "{},{},{},{c},{:.6}", step.t_index, a + 1, b + 1, step.percentages[a][b])
                        .expect("writing to a String cannot fail");
                }
            }
        }
        out
    }

    /// Percentage of community `from` (1-based) leaving for `to` at step `t_index`.
    pub fn percentage(&self, t_index: usize, from: usize, to: usize) -> Option<f64> {
        let step = self.steps.iter().find(|s| s.t_index == t_index)?;
        step.percentages.get(from.checked_sub(1)?)?.get(to.checked_sub(1)?).copied()
    }
}

pub fn summarize_membership_transitions(
    seq: &MembershipSequence,
    lag: usize,
    alignable: bool,
) -> Result<TransitionSummary> {
    if lag == 0 || lag >= seq.len() {
        return Err(Error::invalid(format!("lag must lie in 1..{}", seq.len())));
    }
    if !alignable {
        warn!("transition summary computed from labels that are not certified alignable");
    }
    let k = seq.k();
    let steps = (0..seq.len() - lag)
        .map(|t| {
            let counts = confusion_matrix(seq.row(t), seq.row(t + lag), k)?.counts;
            let percentages = counts
                .iter()
                .map(|row| {
                    let size: u64 = row.iter().sum();
                    row.iter().map(|&c| if size == 0 { 0.0 } else { 100.0 * c as f64 / size as f64 }).collect()
                })
                .collect();
            Ok(TransitionStep { t_index: t + 1, counts, percentages })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionSummary { k, lag, steps, alignable })
}

/// Consecutive-step transitions of an aligned clustering.
pub fn summarize_transitions(clustering: &DynamicClustering) -> Result<TransitionSummary> {
    summarize_membership_transitions(&clustering.aligned, 1, clustering.alignable)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_memberships_stay_put() {
        let row = vec![1, 1, 2, 2, 3];
        let seq = MembershipSequence::new(3, vec![row.clone(); 4]).unwrap();
        let s = summarize_membership_transitions(&seq, 1, true).unwrap();
        assert_eq!(s.steps.len(), 3);
        for step in &s.steps {
            for a in 0..3 {
                for b in 0..3 {
                    if a != b {
                        assert_eq!(step.percentages[a][b], 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn single_exit_is_ten_percent() {
        let mut before = vec![1; 10];
        before.extend(vec![2; 5]);
        let mut after = before.clone();
        after[3] = 2;
        let seq = MembershipSequence::new(2, vec![before.clone(), after]).unwrap();
        let s = summarize_membership_transitions(&seq, 1, true).unwrap();
        assert_eq!(s.percentage(1, 1, 2), Some(10.0));
        assert_eq!(s.percentage(1, 1, 1), Some(90.0));
        let sizes: Vec<u64> = s.steps[0].counts.iter().map(|r| r.iter().sum()).collect();
        assert_eq!(sizes, vec![10, 5]);
        let csv = s.to_csv();
        assert!(csv.contains("1,1,2,1,10.000000\n"));
    }

    #[test]
    fn lag_is_validated() {
        let seq = MembershipSequence::new(2, vec![vec![1, 2]; 3]).unwrap();
        assert!(summarize_membership_transitions(&seq, 0, true).is_err());
        assert!(summarize_membership_transitions(&seq, 3, true).is_err());
        assert_eq!(summarize_membership_transitions(&seq, 2, false).unwrap().steps.len(), 1);
    }
}
